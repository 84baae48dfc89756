//! Memo of a playout: for each step the codes and biases of every legal
//! move and the index of the one sampled. Adapt reads this instead of
//! regenerating moves.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlayoutRecord<M> {
    codes: Vec<u64>,
    biases: Vec<f64>,
    // step i spans codes[offsets[i]..offsets[i + 1]]
    offsets: Vec<usize>,
    chosen: Vec<usize>,
    moves: Vec<M>,
    score: f64,
}

/// One decision of a playout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<'a> {
    pub codes: &'a [u64],
    pub biases: &'a [f64],
    pub chosen: usize,
}

impl<M> Default for PlayoutRecord<M> {
    fn default() -> Self {
        Self {
            codes: Vec::new(),
            biases: Vec::new(),
            offsets: vec![0],
            chosen: Vec::new(),
            moves: Vec::new(),
            score: f64::NEG_INFINITY,
        }
    }
}

impl<M> PlayoutRecord<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.codes.clear();
        self.biases.clear();
        self.offsets.truncate(1);
        self.chosen.clear();
        self.moves.clear();
        self.score = f64::NEG_INFINITY;
    }

    /// Appends a step. Nothing is checked here; see [`PlayoutRecord::validate`].
    pub fn push_step(&mut self, codes: &[u64], biases: &[f64], chosen: usize, mv: M) {
        self.codes.extend_from_slice(codes);
        self.biases.extend_from_slice(biases);
        self.offsets.push(self.codes.len());
        self.chosen.push(chosen);
        self.moves.push(mv);
    }

    pub(crate) fn push_raw(
        &mut self,
        codes: impl Iterator<Item = u64>,
        biases: impl Iterator<Item = f64>,
        chosen: usize,
        mv: M,
    ) {
        self.codes.extend(codes);
        self.biases.extend(biases);
        self.offsets.push(self.codes.len());
        self.chosen.push(chosen);
        self.moves.push(mv);
    }

    pub fn set_score(&mut self, score: f64) {
        self.score = score;
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn moves(&self) -> &[M] {
        &self.moves
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn step(&self, i: usize) -> Step<'_> {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        Step {
            codes: &self.codes[lo..hi],
            biases: &self.biases[lo..hi],
            chosen: self.chosen[i],
        }
    }

    pub fn steps(&self) -> impl ExactSizeIterator<Item = Step<'_>> + '_ {
        (0..self.len()).map(move |i| self.step(i))
    }

    /// Total number of recorded move entries over all steps.
    pub fn total_moves(&self) -> usize {
        self.codes.len()
    }

    /// Checks that every step has at least one move and a chosen index in range.
    pub fn validate(&self) -> Result<()> {
        for (i, step) in self.steps().enumerate() {
            if step.chosen >= step.codes.len() {
                return Err(Error::MalformedRecord {
                    step: i,
                    reason: format!(
                        "chosen index {} out of range for {} moves",
                        step.chosen,
                        step.codes.len()
                    ),
                });
            }
        }
        Ok(())
    }
}
