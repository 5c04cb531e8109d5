//! Core library for context-sensitive word-pair similarity.
//!
//! The pipeline has four layers, each its own module:
//!
//! * [`simlex`] — a merged word-pair similarity store on a `[0, 10]`
//!   scale, expanded by a monotonic transitive-closure rule.
//! * [`wordnet`] — a WordNet 3.0 database parser, corpus-based
//!   information content, and Jiang–Conrath similarity over the
//!   hypernym taxonomy.
//! * [`features`] — sentence-pair instances, region splitting, and a
//!   145-dimension feature extractor plus unsupervised target
//!   construction for the regression stage.
//! * [`learn`] — ridge regression, extremely-randomized trees,
//!   AdaBoost.R2, recursive feature elimination, PLS, cross-validated
//!   grid search, and a two-stage stacked ensemble.
//! * [`metrics`] — evaluation measures (Pearson, error ratios,
//!   agreement statistics, best-worst scaling, F1).
//!
//! Everything is deterministic: map iteration uses ordered containers,
//! and all randomness flows from explicit seeds.

pub mod features;
pub mod learn;
pub mod metrics;
pub mod simlex;
pub mod text;
pub mod wordnet;
