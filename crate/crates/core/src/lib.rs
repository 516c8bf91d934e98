//! Light constant-weight codes and the combinatorics of leave-pair-out
//! cross-validation (LPOCV).
//!
//! Every LPOCV behaviour of a learner on a fixed sample of size `n` with `w`
//! positives is an orientation of the Johnson graph `J(n, w)`: vertices are
//! the labelings, and the number of LPO errors on a labeling is the outdegree
//! of its vertex. The crate is organised along that correspondence:
//!
//! * [`cwords`] constant-weight binary words (labelings).
//! * [`johnson`] Johnson graphs, induced subgraphs, orientations and the
//!   bounded-outdegree feasibility test.
//! * [`codes`] `W`-light code constructions, verification and exhaustive
//!   maximum sizes.
//! * [`bounds`] upper/lower bounds on the maximum size and critical values
//!   derived from them.
//! * [`wilcoxon`] the exact Wilcoxon-Mann-Whitney null distribution.
//! * [`lpocv`] learners, LPOCV statistics, null distributions and the
//!   simulation harness.

pub mod bounds;
pub mod codes;
pub mod cwords;
mod error;
pub mod grid;
pub mod johnson;
pub mod lpocv;
pub mod wilcoxon;

pub use error::{Error, Result};
