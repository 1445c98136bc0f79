//! Group-structured Riesz bases, frames, wandering subspaces, oblique
//! multiwavelets and biorthogonal duals for unitary group actions.
//!
//! Orbit families `G(X) = { g x : g in G, x in X }` of a discrete abelian group
//! acting by translation on `l2(G)^m` are analysed through their Fourier
//! fibers ([`fiberization`]); constructions ([`robertson`], [`oblique`]) are
//! carried out pointwise on the dual group and checked against brute-force
//! dense realizations ([`oracle`]). Finite non-abelian groups are handled
//! through explicit intertwiners ([`nonabelian`]).

pub mod cli;
pub mod error;
pub mod fiberization;
pub mod group_model;
pub mod linalg;
pub mod nonabelian;
pub mod oblique;
pub mod oracle;
pub mod robertson;

pub use error::{Error, Result};
