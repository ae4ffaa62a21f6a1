//! Core of the dcFCI causal-discovery engine.
//!
//! Everything here is pure computation over in-memory values: mixed graphs
//! and m-separation, FCI with the complete orientation rules, the
//! Markov-equivalence machinery (minimal separators, triples with order),
//! likelihood-ratio CI tests over nested regressions, Bayes factor
//! posteriors, the data-PAG compatibility scores, and the dcFCI search
//! itself. Caching, threads and file formats live in the `dcfci` crate.
#![no_std]

extern crate alloc;

pub mod ancestral;
pub mod bayes;
pub mod citest;
pub mod exec;
pub mod fci;
pub mod graph;
pub mod mec;
pub mod metrics;
pub mod msep;
pub mod regression;
pub mod scoring;
pub mod search;
pub mod special;
pub mod vars;

#[cfg(feature = "fixtures")]
pub mod fixtures;

mod linalg;

pub use graph::{GraphClass, GraphError, Mark, MixedGraph};
pub use vars::{CiKey, VarSet};
