use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::IllegalMove;

/// Points for clearing the whole board.
pub const CLEAR_BONUS: u64 = 1000;

/// `(row, col)` with row 0 at the bottom and col 0 at the left.
pub type Cell = (usize, usize);

/// How digits in a board file map to colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorBase {
    /// `1..=9` are colors, `0` and `.` are empty.
    #[default]
    OneBased,
    /// `0..=8` are colors 1..=9, `.` is empty.
    ZeroBased,
}

/// A maximal 4-connected set of at least two same-colored cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub color: u8,
    pub cells: Vec<Cell>,
}

impl Group {
    pub fn size(&self) -> usize {
        self.cells.len()
    }
}

/// SameGame position. Cells are stored column by column from the bottom;
/// 0 is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Board {
    width: usize,
    height: usize,
    cells: Vec<u8>,
    colors: u8,
    dominant: u8,
    move_number: u32,
    score: u64,
    occupied: usize,
}

impl Board {
    /// Builds a board from rows listed top first. The dominant color is the
    /// most frequent one, ties going to the smallest color.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if height == 0 || width == 0 {
            return Err(Error::parse(1, "empty board"));
        }
        let mut cells = vec![0u8; width * height];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::parse(
                    r + 1,
                    format!("row has {} cells, expected {width}", row.len()),
                ));
            }
            let bottom_row = height - 1 - r;
            for (c, &color) in row.iter().enumerate() {
                cells[c * height + bottom_row] = color;
            }
        }
        Ok(Self::from_cells(width, height, cells))
    }

    fn from_cells(width: usize, height: usize, cells: Vec<u8>) -> Self {
        let colors = cells.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0usize; colors as usize + 1];
        for &c in &cells {
            counts[c as usize] += 1;
        }
        let mut dominant = 0;
        for color in 1..=colors {
            if counts[color as usize] > counts[dominant as usize] {
                dominant = color;
            }
        }
        let occupied = cells.iter().filter(|&&c| c != 0).count();
        let mut board = Self {
            width,
            height,
            cells,
            colors,
            dominant,
            move_number: 0,
            score: 0,
            occupied,
        };
        board.settle();
        board
    }

    /// Parses rows of color digits, top row first. Digits may be separated
    /// by whitespace or written contiguously.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, ColorBase::OneBased)
    }

    pub fn parse_with(text: &str, base: ColorBase) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = if line.contains(char::is_whitespace) {
                line.split_whitespace().collect()
            } else {
                line.split("").filter(|t| !t.is_empty()).collect()
            };
            let row = tokens
                .iter()
                .map(|t| {
                    parse_color(t, base)
                        .ok_or_else(|| Error::parse(idx + 1, format!("invalid color token {t:?}")))
                })
                .collect::<Result<Vec<u8>>>()?;
            if let Some(first) = rows.first().map(Vec::len) {
                if row.len() != first {
                    return Err(Error::parse(
                        idx + 1,
                        format!("row has {} cells, expected {first}", row.len()),
                    ));
                }
            }
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// Uniformly random full board with colors `1..=colors`.
    pub fn random<R: Rng + ?Sized>(width: usize, height: usize, colors: u8, rng: &mut R) -> Self {
        assert!(width > 0 && height > 0 && colors > 0);
        let cells = (0..width * height)
            .map(|_| rng.gen_range(1..=colors))
            .collect();
        Self::from_cells(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Largest color id on the initial board.
    pub fn colors(&self) -> u8 {
        self.colors
    }

    /// Most frequent color on the initial board; kept fixed as moves are played.
    pub fn dominant(&self) -> u8 {
        self.dominant
    }

    /// Moves played so far.
    pub fn move_number(&self) -> u32 {
        self.move_number
    }

    /// Points accumulated so far, clear bonus included.
    pub fn score(&self) -> u64 {
        self.score
    }

    #[cfg(test)]
    pub(crate) fn set_move_number_for_test(&mut self, n: u32) {
        self.move_number = n;
    }

    pub fn occupied(&self) -> usize {
        self.occupied
    }

    pub fn is_cleared(&self) -> bool {
        self.occupied == 0
    }

    #[inline]
    pub fn get(&self, (row, col): Cell) -> u8 {
        self.cells[col * self.height + row]
    }

    #[inline]
    pub(crate) fn cell_at(&self, index: usize) -> u8 {
        self.cells[index]
    }

    #[inline]
    pub(crate) fn index(&self, (row, col): Cell) -> usize {
        col * self.height + row
    }

    #[inline]
    pub(crate) fn cell_of(&self, index: usize) -> Cell {
        (index % self.height, index / self.height)
    }

    /// Rows top first, for display.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.height)
            .rev()
            .map(|r| (0..self.width).map(|c| self.get((r, c))).collect())
            .collect()
    }

    /// True when no two orthogonally adjacent cells share a color.
    pub fn is_terminal(&self) -> bool {
        let h = self.height;
        for col in 0..self.width {
            let column = &self.cells[col * h..(col + 1) * h];
            if column[0] == 0 {
                break;
            }
            for row in 0..h {
                let c = column[row];
                if c == 0 {
                    break;
                }
                if row + 1 < h && column[row + 1] == c {
                    return false;
                }
                if col + 1 < self.width && self.cells[(col + 1) * h + row] == c {
                    return false;
                }
            }
        }
        true
    }

    /// Flood fill from `start` over same-colored neighbors. Appends the cell
    /// indices to `out` and marks them in `seen`.
    pub(crate) fn component(&self, start: usize, seen: &mut [bool], out: &mut Vec<usize>) {
        let color = self.cells[start];
        let h = self.height;
        let first = out.len();
        seen[start] = true;
        out.push(start);
        let mut next = first;
        while next < out.len() {
            let i = out[next];
            next += 1;
            let (row, col) = (i % h, i / h);
            let mut visit = |j: usize| {
                if !seen[j] && self.cells[j] == color {
                    seen[j] = true;
                    out.push(j);
                }
            };
            if row > 0 {
                visit(i - 1);
            }
            if row + 1 < h {
                visit(i + 1);
            }
            if col > 0 {
                visit(i - h);
            }
            if col + 1 < self.width {
                visit(i + h);
            }
        }
    }

    /// Every group of two or more cells, in column-major scan order of its
    /// lowest cell.
    pub fn find_groups(&self) -> Vec<Group> {
        let mut seen = vec![false; self.cells.len()];
        let mut buf = Vec::new();
        let mut groups = Vec::new();
        for start in 0..self.cells.len() {
            if seen[start] || self.cells[start] == 0 {
                continue;
            }
            buf.clear();
            self.component(start, &mut seen, &mut buf);
            if buf.len() >= 2 {
                groups.push(Group {
                    color: self.cells[start],
                    cells: buf.iter().map(|&i| self.cell_of(i)).collect(),
                });
            }
        }
        groups
    }

    /// Removes `group`, which must be a current group of this board, and
    /// returns the resulting board.
    pub fn apply_move(&self, group: &Group) -> Result<Board, IllegalMove> {
        let &(row, col) = group
            .cells
            .first()
            .ok_or_else(|| IllegalMove("empty group".into()))?;
        if row >= self.height || col >= self.width {
            return Err(IllegalMove(format!("cell ({row}, {col}) off the board")));
        }
        let start = self.index((row, col));
        if self.cells[start] != group.color || group.color == 0 {
            return Err(IllegalMove(format!(
                "cell ({row}, {col}) does not hold color {}",
                group.color
            )));
        }
        let mut seen = vec![false; self.cells.len()];
        let mut found = Vec::new();
        self.component(start, &mut seen, &mut found);
        let mut listed: Vec<usize> = group
            .cells
            .iter()
            .filter(|&&(r, c)| r < self.height && c < self.width)
            .map(|&cell| self.index(cell))
            .collect();
        listed.sort_unstable();
        listed.dedup();
        found.sort_unstable();
        if listed.len() != group.cells.len() || listed != found {
            return Err(IllegalMove("cells do not form a current group".into()));
        }
        if found.len() < 2 {
            return Err(IllegalMove("a group needs at least two cells".into()));
        }
        let mut next = self.clone();
        next.remove(&found);
        Ok(next)
    }

    /// Removes the group containing `cell`.
    pub(crate) fn remove_group_at(&mut self, cell: Cell) -> Result<usize, IllegalMove> {
        let (row, col) = cell;
        if row >= self.height || col >= self.width {
            return Err(IllegalMove(format!("cell ({row}, {col}) off the board")));
        }
        let start = self.index(cell);
        if self.cells[start] == 0 {
            return Err(IllegalMove(format!("cell ({row}, {col}) is empty")));
        }
        let mut seen = vec![false; self.cells.len()];
        let mut found = Vec::with_capacity(16);
        self.component(start, &mut seen, &mut found);
        if found.len() < 2 {
            return Err(IllegalMove(format!("cell ({row}, {col}) is isolated")));
        }
        self.remove(&found);
        Ok(found.len())
    }

    fn remove(&mut self, indices: &[usize]) {
        for &i in indices {
            self.cells[i] = 0;
        }
        let n = indices.len() as u64;
        self.occupied -= indices.len();
        self.score += (n - 2) * (n - 2);
        self.move_number += 1;
        if self.occupied == 0 {
            self.score += CLEAR_BONUS;
        }
        self.settle();
    }

    /// Drops cells to the bottom of their columns, then shifts non-empty
    /// columns to the left.
    fn settle(&mut self) {
        let h = self.height;
        let mut target_col = 0;
        for col in 0..self.width {
            let column = &mut self.cells[col * h..(col + 1) * h];
            let mut filled = 0;
            for row in 0..h {
                if column[row] != 0 {
                    column.swap(filled, row);
                    filled += 1;
                }
            }
            if filled == 0 {
                continue;
            }
            if target_col != col {
                let (left, right) = self.cells.split_at_mut(col * h);
                left[target_col * h..(target_col + 1) * h].copy_from_slice(&right[..h]);
                right[..h].fill(0);
            }
            target_col += 1;
        }
    }
}

fn parse_color(token: &str, base: ColorBase) -> Option<u8> {
    if token == "." {
        return Some(0);
    }
    let digit: u8 = token.parse().ok()?;
    match base {
        ColorBase::OneBased if digit <= 9 => Some(digit),
        ColorBase::ZeroBased if digit <= 8 => Some(digit + 1),
        _ => None,
    }
}
