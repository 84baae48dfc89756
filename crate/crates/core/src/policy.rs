//! Move-code weights and the softmax that turns them into move probabilities.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// Weight per move code. Codes never written read as zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Policy {
    weights: FxHashMap<u64, f64>,
}

impl Policy {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn weight(&self, code: u64) -> f64 {
        self.weights.get(&code).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, code: u64, weight: f64) {
        self.weights.insert(code, weight);
    }

    #[inline]
    pub fn add(&mut self, code: u64, delta: f64) {
        *self.weights.entry(code).or_insert(0.0) += delta;
    }

    /// Number of codes with an explicit entry.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.weights.iter().map(|(&c, &w)| (c, w))
    }
}

impl FromIterator<(u64, f64)> for Policy {
    fn from_iter<I: IntoIterator<Item = (u64, f64)>>(iter: I) -> Self {
        Self {
            weights: iter.into_iter().collect(),
        }
    }
}

/// Softmax over `w / tau + bias`, one entry per move.
///
/// The largest exponent is subtracted before exponentiation, so large
/// weights do not overflow.
pub fn move_probabilities(weights: &[f64], biases: &[f64], tau: f64) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::EmptyMoves);
    }
    if weights.len() != biases.len() {
        return Err(Error::LengthMismatch {
            weights: weights.len(),
            biases: biases.len(),
        });
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidTemperature(tau));
    }
    if let Some(&bad) = weights.iter().chain(biases).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let mut out = Vec::with_capacity(weights.len());
    let z = exponentiate(weights.iter().copied(), biases, tau, &mut out);
    out.iter_mut().for_each(|o| *o /= z);
    Ok(out)
}

/// Writes the unnormalized terms `exp(w/tau + bias - max)` into `out` and
/// returns their sum.
#[inline]
pub(crate) fn exponentiate(
    weights: impl Iterator<Item = f64>,
    biases: &[f64],
    tau: f64,
    out: &mut Vec<f64>,
) -> f64 {
    out.clear();
    out.extend(weights.zip(biases).map(|(w, &b)| w / tau + b));
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        z += *o;
    }
    z
}

/// [`exponentiate`] with weights looked up by code.
#[inline]
pub(crate) fn exponentiate_codes(
    policy: &Policy,
    codes: &[u64],
    biases: &[f64],
    tau: f64,
    out: &mut Vec<f64>,
) -> f64 {
    exponentiate(codes.iter().map(|&c| policy.weight(c)), biases, tau, out)
}
