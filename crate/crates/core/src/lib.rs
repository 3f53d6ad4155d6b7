//! Trace-driven planning for cellular content pre-push broadcasting.
//!
//! A visit trace (user, title, cell) is indexed once into an immutable
//! [`TraceDataset`]. On top of it the crate provides:
//!
//! - [`stats`]: cumulative-share concentration curves over users, titles and
//!   cells, and the per-user geographic concentration profile.
//! - [`placement`]: the most-active-cell location heuristic and the
//!   hit / missing / mistaken partition of estimated versus actual cells.
//! - [`plan`]: the transmission cost model (unicast baseline, perfect
//!   placement, assumed location, limited coverage), per-title coverage
//!   sweeps and whole-trace traffic curves versus broadcast ratio.
//! - [`synth`]: a seeded synthetic trace generator with Zipf popularity and
//!   activity and a configurable per-user cell profile.
//! - [`cli`]: the `prepush` command-line front end.

pub mod cli;
mod error;
pub mod fraction;
pub mod placement;
pub mod plan;
pub mod stats;
pub mod synth;
pub mod trace;

pub use error::{Error, Result};
pub use trace::{CellIx, TitleIx, TraceDataset, UserIx, VisitRecord};
