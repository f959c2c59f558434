//! Exact lattice, Weyl group and finite-group computations for flat bundles
//! over elliptic curves with non-simply-laced structure group, realized on
//! blow-ups of F1 and P2.

pub mod linalg;
pub mod lattice;
pub mod abelian;
pub mod rootsys;
pub mod folding;
pub mod moduli;
pub mod config;
pub mod liealg;
pub mod repbundles;
