//! Memetic walrus optimization for adaptive curriculum sequencing.
//!
//! The crate has three layers:
//!
//! - a problem layer ([`model`], [`objective`], [`generate`]) describing
//!   curriculum instances, their weighted penalty objective and a seeded
//!   synthetic generator;
//! - an optimization layer ([`optimizer`], [`benchmarks`]) with the memetic
//!   walrus metaheuristic, its plain-walrus ablation and nine classic test
//!   functions;
//! - a results layer ([`sequencer`], [`stats`]) that turns selections into
//!   ordered learning paths and runs seeded multi-run campaigns with
//!   rank-sum significance testing and CSV export.
//!
//! The accompanying guide in `book/` walks through each layer; its code
//! snippets are compiled as doc-tests below.

pub mod benchmarks;
pub mod generate;
pub mod model;
pub mod objective;
pub mod optimizer;
pub mod sequencer;
pub mod stats;

pub use model::{AcsInstance, SelectionMatrix};
pub use objective::AcsObjective;
pub use optimizer::{optimize, OptimizerConfig, RunRecord};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(model, "../../../book/src/model.md");
    chapter!(objective, "../../../book/src/objective.md");
    chapter!(optimizer, "../../../book/src/optimizer.md");
    chapter!(benchmarks, "../../../book/src/benchmarks.md");
    chapter!(sequencing, "../../../book/src/sequencing.md");
    chapter!(experiments, "../../../book/src/experiments.md");
}
