//! Free-energy emotional dynamics for scene-annotated videos.
//!
//! The crate wires five stages into one pipeline:
//!
//! 1. [`corpus`] — annotation data model, JSONL parsing and validation,
//!    observation alphabets, categorical encoding, and a synthetic-corpus
//!    generator that doubles as a test oracle.
//! 2. [`model`] — the two-modality categorical HMM with Dirichlet
//!    concentrations, per-segment transition matrices, variational-Bayes
//!    training, ELBO evaluation, and a hyperparameter sweep harness.
//! 3. [`inference`] — exact forward filtering producing per-scene predictive
//!    priors, posteriors, and log-evidence increments, plus a brute-force
//!    enumeration oracle.
//! 4. [`emotion`] — scene-level free-energy metrics (KLD, Bayesian surprise,
//!    uncertainty, Shannon surprise), repeated-viewing habituation, and
//!    video-level emotional indices.
//! 5. [`analysis`] — correlations with p-values and bootstrap CIs, k-means
//!    clustering with silhouette/ARI/Kneedle selection, ANOVA, and chi-square
//!    with standardized residuals.
//!
//! [`pipeline`] composes the stages behind the `scenefe` CLI.

pub mod analysis;
pub mod corpus;
pub mod emotion;
pub mod inference;
pub mod mat;
pub mod model;
pub mod pipeline;
pub mod rng;
