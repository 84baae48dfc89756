//! The contract a domain implements to be searched.

use thiserror::Error;

use crate::error::{Error, Result};

/// A legal move together with the code its weight is stored under and the
/// bias added to its softmax exponent in the current state.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveDescriptor<M> {
    pub mv: M,
    pub code: u64,
    pub bias: f64,
}

impl<M> MoveDescriptor<M> {
    pub fn new(mv: M, code: u64, bias: f64) -> Self {
        Self { mv, code, bias }
    }
}

/// Reason a domain refused a move.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct IllegalMove(pub String);

/// A deterministic single-agent optimization problem. Scores are maximized.
///
/// `play` must be deterministic: replaying a move sequence from
/// `initial_state` reproduces the same states, the same legal-move lists and
/// the same codes and biases. Adapt relies on this when it reuses the codes
/// recorded during a playout.
pub trait Problem {
    type State: Clone;
    type Move: Clone;

    fn initial_state(&self) -> Self::State;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Appends the legal moves of `state` to `out` (which the caller clears).
    fn legal_moves(&self, state: &Self::State, out: &mut Vec<MoveDescriptor<Self::Move>>);

    fn play(&self, state: &mut Self::State, mv: &Self::Move) -> Result<(), IllegalMove>;

    /// Score of a terminal state. Errors on non-terminal states.
    fn score(&self, state: &Self::State) -> Result<f64>;
}

/// Plays `moves` from the initial state and returns the state reached.
pub fn replay<P: Problem>(problem: &P, moves: &[P::Move]) -> Result<P::State> {
    let mut state = problem.initial_state();
    for (step, mv) in moves.iter().enumerate() {
        problem
            .play(&mut state, mv)
            .map_err(|source| Error::IllegalMove { step, source })?;
    }
    Ok(state)
}
