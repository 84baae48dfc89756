//! Gibbs-sampled playouts, policy adaptation and the nested search.

use std::mem;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::policy::{exponentiate_codes, Policy};
use crate::problem::{MoveDescriptor, Problem};
use crate::record::PlayoutRecord;

/// When a search stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// Run the nested search to completion once.
    Unlimited,
    /// Stop after this many playouts in total; restarts are allowed until then.
    Playouts(u64),
    /// Stop once this much wall-clock time has elapsed; restarts are allowed until then.
    Seconds(f64),
}

/// How the policy is updated toward the best sequence of a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdaptMode {
    /// Update a copy of the policy while reading probabilities from the original.
    #[default]
    Copy,
    /// Compute every step's probabilities first, then update in place.
    InPlace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    /// Learning rate.
    pub alpha: f64,
    /// Softmax temperature.
    pub tau: f64,
    /// Iterations per level.
    pub iterations: usize,
    /// Nesting depth; 0 is a single playout.
    pub levels: usize,
    pub budget: Budget,
    pub seed: u64,
    pub adapt: AdaptMode,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            tau: 1.0,
            iterations: 100,
            levels: 3,
            budget: Budget::Unlimited,
            seed: 0,
            adapt: AdaptMode::Copy,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidTemperature(self.tau));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        match self.budget {
            Budget::Playouts(0) => Err(Error::Config("playout budget must be positive".into())),
            Budget::Seconds(s) if !(s.is_finite() && s > 0.0) => Err(Error::Config(format!(
                "time budget must be positive, got {s}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub playouts: u64,
    pub adapts: u64,
}

/// A new best score seen by a search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Improvement {
    pub elapsed_secs: f64,
    /// Playouts completed when the score was found, this one included.
    pub playouts: u64,
    pub score: f64,
}

struct Scratch<M> {
    moves: Vec<MoveDescriptor<M>>,
    codes: Vec<u64>,
    biases: Vec<f64>,
    terms: Vec<f64>,
}

impl<M> Default for Scratch<M> {
    fn default() -> Self {
        Self {
            moves: Vec::new(),
            codes: Vec::new(),
            biases: Vec::new(),
            terms: Vec::new(),
        }
    }
}

/// Draws an index with probability `terms[i] / z`.
#[inline]
fn sample<R: Rng + ?Sized>(terms: &[f64], z: f64, rng: &mut R) -> usize {
    let target = rng.gen::<f64>() * z;
    let mut acc = 0.0;
    for (i, &t) in terms.iter().enumerate() {
        acc += t;
        if target < acc {
            return i;
        }
    }
    // rounding left target at or above the final partial sum
    terms
        .iter()
        .rposition(|&t| t > 0.0)
        .unwrap_or(terms.len() - 1)
}

fn playout_into<P: Problem, R: Rng + ?Sized>(
    problem: &P,
    policy: &Policy,
    tau: f64,
    rng: &mut R,
    scratch: &mut Scratch<P::Move>,
    out: &mut PlayoutRecord<P::Move>,
) -> Result<()> {
    out.clear();
    let mut state = problem.initial_state();
    while !problem.is_terminal(&state) {
        scratch.moves.clear();
        problem.legal_moves(&state, &mut scratch.moves);
        if scratch.moves.is_empty() {
            return Err(Error::Stalled);
        }
        scratch.codes.clear();
        scratch.biases.clear();
        for d in &scratch.moves {
            scratch.codes.push(d.code);
            scratch.biases.push(d.bias);
        }
        let z = exponentiate_codes(
            policy,
            &scratch.codes,
            &scratch.biases,
            tau,
            &mut scratch.terms,
        );
        let chosen = sample(&scratch.terms, z, rng);
        let mv = &scratch.moves[chosen].mv;
        problem
            .play(&mut state, mv)
            .map_err(|source| Error::IllegalMove {
                step: out.len(),
                source,
            })?;
        out.push_raw(
            scratch.codes.iter().copied(),
            scratch.biases.iter().copied(),
            chosen,
            mv.clone(),
        );
    }
    out.set_score(problem.score(&state)?);
    Ok(())
}

/// Plays one episode from the initial state, sampling each move from the
/// softmax of `weight / tau + bias` over the legal moves.
pub fn playout<P: Problem, R: Rng + ?Sized>(
    problem: &P,
    policy: &Policy,
    tau: f64,
    rng: &mut R,
) -> Result<PlayoutRecord<P::Move>> {
    let mut out = PlayoutRecord::new();
    playout_into(problem, policy, tau, rng, &mut Scratch::default(), &mut out)?;
    Ok(out)
}

/// Moves the policy one gradient step toward the moves of `record`.
///
/// Probabilities for every step are read from `policy` while the updates go
/// to a copy, which is returned. A code appearing at several steps
/// accumulates all of its updates.
pub fn adapt<M>(
    policy: &Policy,
    record: &PlayoutRecord<M>,
    alpha: f64,
    tau: f64,
) -> Result<Policy> {
    record.validate()?;
    let rate = alpha / tau;
    let mut next = policy.clone();
    let mut terms = Vec::new();
    for step in record.steps() {
        let z = exponentiate_codes(policy, step.codes, step.biases, tau, &mut terms);
        for (m, (&code, &t)) in step.codes.iter().zip(&terms).enumerate() {
            let delta = -rate * (t / z - indicator(m == step.chosen));
            if delta != 0.0 {
                next.add(code, delta);
            }
        }
    }
    Ok(next)
}

/// Same update as [`adapt`], applied in place: all step probabilities are
/// computed first from the unmodified policy, then the deltas are added.
pub fn adapt_optimized<M>(
    policy: &mut Policy,
    record: &PlayoutRecord<M>,
    alpha: f64,
    tau: f64,
) -> Result<()> {
    record.validate()?;
    let rate = alpha / tau;
    let mut terms = Vec::with_capacity(record.total_moves());
    let mut sums = Vec::with_capacity(record.len());
    let mut buf = Vec::new();
    for step in record.steps() {
        sums.push(exponentiate_codes(
            policy,
            step.codes,
            step.biases,
            tau,
            &mut buf,
        ));
        terms.extend_from_slice(&buf);
    }
    let mut terms = terms.iter();
    for (step, &z) in record.steps().zip(&sums) {
        for (m, (&code, &t)) in step.codes.iter().zip(terms.by_ref()).enumerate() {
            let delta = -rate * (t / z - indicator(m == step.chosen));
            if delta != 0.0 {
                policy.add(code, delta);
            }
        }
    }
    Ok(())
}

#[inline]
fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

type Observer<'p, M> = Box<dyn FnMut(&PlayoutRecord<M>) + 'p>;

/// Nested rollout policy adaptation over one problem.
///
/// Each level works on its own copy of the policy it receives, runs
/// `iterations` calls of the level below, keeps the best sequence (a tie
/// replaces it) and adapts toward it after every iteration. The wall-clock
/// budget is measured from construction.
pub struct Search<'p, P: Problem, R> {
    problem: &'p P,
    params: SearchParams,
    rng: R,
    started: Instant,
    stats: SearchStats,
    best: PlayoutRecord<P::Move>,
    trace: Vec<Improvement>,
    observer: Option<Observer<'p, P::Move>>,
    scratch: Scratch<P::Move>,
    exhausted: bool,
}

impl<'p, P: Problem> Search<'p, P, ChaCha8Rng> {
    /// A search whose generator is seeded from `params.seed`.
    pub fn seeded(problem: &'p P, params: SearchParams) -> Result<Self> {
        let rng = ChaCha8Rng::seed_from_u64(params.seed);
        Self::new(problem, params, rng)
    }
}

impl<'p, P: Problem, R: Rng> Search<'p, P, R> {
    pub fn new(problem: &'p P, params: SearchParams, rng: R) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            problem,
            params,
            rng,
            started: Instant::now(),
            stats: SearchStats::default(),
            best: PlayoutRecord::new(),
            trace: Vec::new(),
            observer: None,
            scratch: Scratch::default(),
            exhausted: false,
        })
    }

    /// Calls `f` after every playout.
    pub fn with_observer(mut self, f: impl FnMut(&PlayoutRecord<P::Move>) + 'p) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn params(&self) -> &SearchParams {
        &self.params
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// Every strict improvement of the best score, in order.
    pub fn trace(&self) -> &[Improvement] {
        &self.trace
    }

    /// Best playout seen so far (score `-inf` before the first playout).
    pub fn best(&self) -> &PlayoutRecord<P::Move> {
        &self.best
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn elapsed_secs(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    /// One nested search at `level`, returning that level's best sequence.
    pub fn gnrpa(&mut self, level: usize, policy: &Policy) -> Result<PlayoutRecord<P::Move>> {
        let mut out = PlayoutRecord::new();
        self.nested_into(level, policy, &mut out)?;
        Ok(out)
    }

    /// Runs the configured number of levels from `initial`. With a bounded
    /// budget the search restarts from `initial` until the budget is spent.
    /// Returns the first playout that reached the best score.
    pub fn run(&mut self, initial: &Policy) -> Result<PlayoutRecord<P::Move>> {
        let mut out = PlayoutRecord::new();
        loop {
            self.nested_into(self.params.levels, initial, &mut out)?;
            if self.exhausted || self.params.budget == Budget::Unlimited {
                break;
            }
        }
        Ok(self.best.clone())
    }

    fn nested_into(
        &mut self,
        level: usize,
        policy: &Policy,
        out: &mut PlayoutRecord<P::Move>,
    ) -> Result<()> {
        if level == 0 {
            return self.playout_counted(policy, out);
        }
        let mut policy = policy.clone();
        let mut best = PlayoutRecord::new();
        let mut candidate = PlayoutRecord::new();
        for i in 0..self.params.iterations {
            if i > 0 && self.exhausted {
                break;
            }
            self.nested_into(level - 1, &policy, &mut candidate)?;
            if candidate.score() >= best.score() {
                mem::swap(&mut best, &mut candidate);
            }
            if self.exhausted {
                break;
            }
            self.adapt(&mut policy, &best)?;
        }
        mem::swap(out, &mut best);
        Ok(())
    }

    fn adapt(&mut self, policy: &mut Policy, best: &PlayoutRecord<P::Move>) -> Result<()> {
        let SearchParams { alpha, tau, .. } = self.params;
        match self.params.adapt {
            AdaptMode::Copy => {
                // the temporary policy is copied back, not moved
                let next = adapt(policy, best, alpha, tau)?;
                policy.clone_from(&next);
            }
            AdaptMode::InPlace => adapt_optimized(policy, best, alpha, tau)?,
        }
        self.stats.adapts += 1;
        Ok(())
    }

    fn playout_counted(&mut self, policy: &Policy, out: &mut PlayoutRecord<P::Move>) -> Result<()> {
        playout_into(
            self.problem,
            policy,
            self.params.tau,
            &mut self.rng,
            &mut self.scratch,
            out,
        )?;
        self.stats.playouts += 1;
        let elapsed = self.started.elapsed().as_secs_f64();
        if out.score() > self.best.score() {
            self.best.clone_from(out);
            self.trace.push(Improvement {
                elapsed_secs: elapsed,
                playouts: self.stats.playouts,
                score: out.score(),
            });
        }
        if let Some(observer) = self.observer.as_mut() {
            observer(out);
        }
        self.exhausted = match self.params.budget {
            Budget::Unlimited => false,
            Budget::Playouts(n) => self.stats.playouts >= n,
            Budget::Seconds(s) => elapsed >= s,
        };
        Ok(())
    }
}

/// One nested search at `level` from `policy` with a caller-supplied generator.
pub fn gnrpa<P: Problem, R: Rng>(
    level: usize,
    policy: &Policy,
    problem: &P,
    params: SearchParams,
    rng: R,
) -> Result<PlayoutRecord<P::Move>> {
    Search::new(problem, params, rng)?.gnrpa(level, policy)
}
