use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::board::{Cell, Group};

pub const DEFAULT_ZOBRIST_SEED: u64 = 0x5347_4d45;

/// One random 64-bit value per (cell, color).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZobristTable {
    width: usize,
    height: usize,
    colors: usize,
    values: Vec<u64>,
}

impl ZobristTable {
    pub fn new(seed: u64, width: usize, height: usize, colors: u8) -> Self {
        let colors = colors as usize + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..width * height * colors).map(|_| rng.gen()).collect();
        Self {
            width,
            height,
            colors,
            values,
        }
    }

    #[inline]
    pub fn value(&self, (row, col): Cell, color: u8) -> u64 {
        self.value_at(col * self.height + row, color)
    }

    #[inline]
    pub(crate) fn value_at(&self, index: usize, color: u8) -> u64 {
        self.values[index * self.colors + color as usize]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// XOR of the values of the group's cells in its color.
    pub fn code(&self, group: &Group) -> u64 {
        group
            .cells
            .iter()
            .fold(0, |acc, &cell| acc ^ self.value(cell, group.color))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_cell_code_is_the_table_entry() {
        let t = ZobristTable::new(DEFAULT_ZOBRIST_SEED, 15, 15, 5);
        let g = Group {
            color: 4,
            cells: vec![(3, 7)],
        };
        assert_eq!(t.code(&g), t.value((3, 7), 4));
    }

    #[test]
    fn same_seed_same_table() {
        assert_eq!(ZobristTable::new(9, 5, 5, 3), ZobristTable::new(9, 5, 5, 3));
        assert_ne!(
            ZobristTable::new(9, 5, 5, 3),
            ZobristTable::new(10, 5, 5, 3)
        );
    }

    #[test]
    fn entries_are_distinct() {
        let t = ZobristTable::new(DEFAULT_ZOBRIST_SEED, 15, 15, 5);
        let mut v = t.values.clone();
        v.sort_unstable();
        v.dedup();
        assert_eq!(v.len(), t.values.len());
    }

    proptest! {
        #[test]
        fn code_ignores_cell_order(
            seed in any::<u64>(),
            cells in prop::collection::btree_set((0usize..15, 0usize..15), 1..40),
            color in 1u8..=5,
            rot in any::<usize>(),
        ) {
            let t = ZobristTable::new(seed, 15, 15, 5);
            let mut cells: Vec<Cell> = cells.into_iter().collect();
            let a = t.code(&Group { color, cells: cells.clone() });
            let k = rot % cells.len();
            cells.rotate_left(k);
            cells.reverse();
            prop_assert_eq!(a, t.code(&Group { color, cells }));
        }

        #[test]
        fn color_changes_code(
            seed in any::<u64>(),
            cells in prop::collection::btree_set((0usize..15, 0usize..15), 1..40),
            color in 1u8..=5,
            other in 1u8..=5,
        ) {
            prop_assume!(color != other);
            let t = ZobristTable::new(seed, 15, 15, 5);
            let cells: Vec<Cell> = cells.into_iter().collect();
            prop_assert_ne!(
                t.code(&Group { color, cells: cells.clone() }),
                t.code(&Group { color: other, cells })
            );
        }
    }
}
