//! Chirotopes, their bowtie products and modular decomposition into
//! chirotope trees, with exact triangulation counting and realization.

#![forbid(unsafe_code)]

pub mod bowtie;
pub mod chain;
pub mod chirotope;
pub mod counting;
pub mod error;
pub mod geometry;
pub mod io;
pub mod label;
pub mod poly;
pub mod random;
pub mod realization;
pub mod rewrite;
pub mod tree;
pub mod triangulation;

pub use chirotope::{Chirotope, SignFunction};
pub use bowtie::{bowtie, factorize, find_nontrivial_module, is_module};
pub use error::{Axiom, Error, Result, TreeViolationKind};
pub use geometry::{chirotope_of_points, Point, PointConfig};
pub use label::Label;
pub use tree::{ChirotopeTree, Edge, NodeId, TreeFingerprint};
