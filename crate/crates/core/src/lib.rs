//! Exact moments of the edge density of the Brownian cographon, and the
//! simulation machinery around the number `S_k` of distinct last common
//! ancestors of `k` random leaf pairs in the Brownian CRT.
//!
//! The crate is organised by subsystem:
//!
//! * [`numbers`] and [`moments`]: double factorials, Catalan numbers and the
//!   exact moment polynomials `a_k(p) = E p^{S_k}` in rational arithmetic.
//! * [`tree`]: uniform planted binary trees (Rémy's construction), LCA
//!   counting, an exhaustive enumeration oracle and Dyck-path excursions.
//! * [`matching`]: subtree-size laws and perfect-matching probabilities that
//!   give `E S_k` as an explicit finite sum.
//! * [`intervals`]: random interval graphs and the Poisson greedy chain.
//! * [`divisor`] and [`quadrature`]: divisor-weighted Riemann sums.
//! * [`montecarlo`]: reproducible replicate streams and summaries.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod divisor;
pub mod error;
pub mod intervals;
pub mod matching;
pub mod moments;
pub mod montecarlo;
pub mod numbers;
pub mod quadrature;
pub mod rational;
pub mod tree;

pub use error::{Error, Result};
pub use rational::BigRat;
