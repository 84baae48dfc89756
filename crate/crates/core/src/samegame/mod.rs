//! SameGame: remove groups of two or more same-colored cells, let the rest
//! fall and slide left, and score `(n - 2)^2` per group plus 1000 for a
//! cleared board.
//!
//! Moves are coded by Zobrist hashing of the removed cells. The selective
//! policy keeps the dominant color for the end of the game, and the bias
//! favors large groups.

mod board;
mod zobrist;

pub use board::{Board, Cell, ColorBase, Group, CLEAR_BONUS};
pub use zobrist::{ZobristTable, DEFAULT_ZOBRIST_SEED};

use crate::error::{Error, Result};
use crate::problem::{IllegalMove, MoveDescriptor, Problem};

/// Cap on the size bias.
pub const MAX_BIAS: f64 = 8.0;

/// Move number after which size-2 groups of the dominant color are allowed.
pub const TABU_RELEASE_MOVE: u32 = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelectiveRule {
    /// Release size-2 dominant groups from move 10 on instead of after it.
    pub inclusive: bool,
}

impl SelectiveRule {
    fn releases(&self, move_number: u32) -> bool {
        if self.inclusive {
            move_number >= TABU_RELEASE_MOVE
        } else {
            move_number > TABU_RELEASE_MOVE
        }
    }

    /// Whether the selective policy allows a group of `color` and `size`.
    pub fn allows(&self, board: &Board, color: u8, size: usize) -> bool {
        color != board.dominant() || (size == 2 && self.releases(board.move_number()))
    }
}

/// Groups allowed by the selective policy, or every group when the policy
/// would allow none.
pub fn selective_moves(board: &Board, rule: SelectiveRule) -> Vec<Group> {
    let groups = board.find_groups();
    if groups.iter().any(|g| rule.allows(board, g.color, g.size())) {
        groups
            .into_iter()
            .filter(|g| rule.allows(board, g.color, g.size()))
            .collect()
    } else {
        groups
    }
}

/// `min(n - 2 - tabu, 8)` where `tabu` is 1 for a size-2 group of the
/// dominant color.
pub fn samegame_bias(group: &Group, board: &Board) -> f64 {
    size_bias(group.size(), group.color, board.dominant())
}

#[inline]
fn size_bias(size: usize, color: u8, dominant: u8) -> f64 {
    let tabu = if size == 2 && color == dominant {
        1.0
    } else {
        0.0
    };
    (size as f64 - 2.0 - tabu).min(MAX_BIAS)
}

/// Final score of a board with no group left.
pub fn samegame_score(board: &Board) -> Result<f64> {
    if !board.is_terminal() {
        return Err(Error::NotTerminal);
    }
    Ok(board.score() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SameGameConfig {
    /// Apply the selective policy.
    pub selective: bool,
    pub rule: SelectiveRule,
    /// Add the size bias to the softmax.
    pub bias: bool,
    pub zobrist_seed: u64,
}

impl Default for SameGameConfig {
    fn default() -> Self {
        Self {
            selective: true,
            rule: SelectiveRule::default(),
            bias: true,
            zobrist_seed: DEFAULT_ZOBRIST_SEED,
        }
    }
}

/// Search problem from one initial board. A move is named by the lowest
/// cell (column-major) of the group it removes.
#[derive(Debug, Clone)]
pub struct SameGame {
    initial: Board,
    zobrist: ZobristTable,
    config: SameGameConfig,
}

struct Candidate {
    anchor: usize,
    color: u8,
    size: usize,
    code: u64,
}

impl SameGame {
    pub fn new(initial: Board, config: SameGameConfig) -> Self {
        let zobrist = ZobristTable::new(
            config.zobrist_seed,
            initial.width(),
            initial.height(),
            initial.colors(),
        );
        Self {
            initial,
            zobrist,
            config,
        }
    }

    pub fn board(&self) -> &Board {
        &self.initial
    }

    pub fn zobrist(&self) -> &ZobristTable {
        &self.zobrist
    }

    pub fn config(&self) -> &SameGameConfig {
        &self.config
    }
}

impl Problem for SameGame {
    type State = Board;
    type Move = Cell;

    fn initial_state(&self) -> Board {
        self.initial.clone()
    }

    fn is_terminal(&self, board: &Board) -> bool {
        board.is_terminal()
    }

    fn legal_moves(&self, board: &Board, out: &mut Vec<MoveDescriptor<Cell>>) {
        let cells = board.width() * board.height();
        let mut seen = vec![false; cells];
        let mut buf = Vec::with_capacity(32);
        let mut candidates = Vec::with_capacity(32);
        for start in 0..cells {
            let color = board.cell_at(start);
            if color == 0 || seen[start] {
                continue;
            }
            buf.clear();
            board.component(start, &mut seen, &mut buf);
            if buf.len() < 2 {
                continue;
            }
            let code = buf
                .iter()
                .fold(0, |acc, &i| acc ^ self.zobrist.value_at(i, color));
            candidates.push(Candidate {
                anchor: start,
                color,
                size: buf.len(),
                code,
            });
        }
        let rule = self.config.rule;
        let filter = self.config.selective
            && candidates
                .iter()
                .any(|c| rule.allows(board, c.color, c.size));
        let dominant = board.dominant();
        for c in candidates {
            if filter && !rule.allows(board, c.color, c.size) {
                continue;
            }
            let bias = if self.config.bias {
                size_bias(c.size, c.color, dominant)
            } else {
                0.0
            };
            out.push(MoveDescriptor::new(board.cell_of(c.anchor), c.code, bias));
        }
    }

    fn play(&self, board: &mut Board, cell: &Cell) -> Result<(), IllegalMove> {
        board.remove_group_at(*cell).map(|_| ())
    }

    fn score(&self, board: &Board) -> Result<f64> {
        samegame_score(board)
    }
}
