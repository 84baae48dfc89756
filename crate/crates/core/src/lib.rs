//! Nested Rollout Policy Adaptation (NRPA) and its generalization with a
//! softmax temperature and per-move bias (GNRPA).
//!
//! The engine is domain agnostic: anything implementing [`Problem`] can be
//! searched. Two domains ship with the crate:
//!
//! - [`tsptw`]: traveling salesman with time windows, scored by tour length
//!   plus a large penalty per violated window, biased toward near cities.
//! - [`samegame`]: the SameGame puzzle with Zobrist move codes, a selective
//!   policy on the dominant color, and a group-size bias.
//!
//! [`bench`] repeats searches across seeds and aggregates best-so-far scores
//! at doubling time checkpoints.
//!
//! ```
//! use gnrpa::{Budget, Policy, Search, SearchParams};
//! use gnrpa::tsptw::{Tsptw, TsptwInstance};
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//!
//! let text = "0 0 0 0 0 1000 0\n1 3 4 0 0 1000 0\n2 0 8 0 0 1000 0\n";
//! let problem = Tsptw::new(TsptwInstance::parse(text).unwrap());
//! let params = SearchParams {
//!     levels: 1,
//!     iterations: 10,
//!     budget: Budget::Unlimited,
//!     ..SearchParams::default()
//! };
//! let mut search = Search::new(&problem, params, ChaCha8Rng::seed_from_u64(1)).unwrap();
//! let best = search.run(&Policy::new()).unwrap();
//! assert_eq!(best.score(), -18.0);
//! ```

pub mod bench;
mod error;
pub mod policy;
pub mod problem;
pub mod record;
pub mod samegame;
pub mod search;
pub mod tsptw;

pub use error::{Error, Result};
pub use policy::{move_probabilities, Policy};
pub use problem::{replay, IllegalMove, MoveDescriptor, Problem};
pub use record::{PlayoutRecord, Step};
pub use search::{
    adapt, adapt_optimized, gnrpa, playout, AdaptMode, Budget, Improvement, Search, SearchParams,
    SearchStats,
};
