//! Exact symbolic calculus of marked garland shapes.
//!
//! A *garland shape* is a finite set of copies of a fixed manifold together
//! with a multiset of graded marks (finite point families on the copies).
//! This crate implements the graded algebra those shapes generate:
//!
//! - [`shape`] — shapes, marks, canonical forms up to copy permutation and
//!   point relabeling, disjoint union, component signatures.
//! - [`sign`] — multilinear polynomials over GF(2) in parity variables and
//!   Koszul signs for permuting graded factors.
//! - [`calculus`] — formal sums of decorated terms and the operations
//!   `product` (•), `bracket` ([-,-]), `lift`, `proj` and `delta` as exact
//!   mark/grading rewrites, parametrized by dimensions, ring and sign rule.
//! - [`lab`] — seeded randomized verification of the algebraic identities
//!   with counterexample shrinking and reproducible reports.
//! - [`bv`] — an abstract prover deriving the Gerstenhaber relations and the
//!   Leibniz rule from the seven-term Batalin–Vilkovisky relation by exact
//!   rational linear algebra, with replayable certificates.
//! - [`signsearch`] — enumeration of candidate sign conventions for the
//!   graded Jacobi identity, tested against the integer-coefficient calculus.
//! - [`textio`], [`dot`], [`report`], [`cli`] — the element grammar, DOT
//!   export, line-oriented reports and the command-line front end.
//!
//! # Examples
//!
//! The `examples/` directory is the guided tour; each file is runnable:
//!
//! ```bash
//! cargo run -p garlands --example product_basics
//! cargo run -p garlands --example bracket_and_jacobi
//! cargo run -p garlands --example lift_proj_delta
//! cargo run -p garlands --example identity_lab
//! cargo run -p garlands --example bv_prop51
//! cargo run -p garlands --example sign_search
//! cargo run -p garlands --example element_grammar
//! cargo run -p garlands --example export_dot
//! ```
//!
//! The same functionality is reachable in batch form through the `garlands`
//! binary; see the crate README for the subcommand reference.

pub mod bv;
pub mod calculus;
mod canon;
pub mod cli;
pub mod dot;
pub mod lab;
pub mod report;
pub mod shape;
pub mod sign;
pub mod signsearch;
pub mod textio;

pub use calculus::{Algebra, AlgebraParams, BaseGenerator, DecoratedTerm, Element, Ring};
pub use shape::{ComponentSignature, GarlandShape, Mark, PointRef};
pub use sign::{koszul_sign, ParityExpr, ParityPoly};
