//! Computational toolkit for theta lifts of nearly holomorphic modular forms
//! at level 1.
//!
//! The crate is organized bottom-up:
//! - [`poly`]: exact rational polynomial families (Hermite-type sequences and
//!   their relatives) with their recursions and generating-series identities.
//! - [`special`]: floating-point evaluation of the singular Schwartz functions
//!   built from those polynomials, incomplete-gamma kernels, and the
//!   regularization special functions.
//! - [`quad`]: adaptive Gauss–Kronrod and fixed Gauss–Legendre quadrature with
//!   error estimates.
//! - [`lattice`]: one-dimensional lattice sums of singular Schwartz functions,
//!   their Fourier-side closed forms, and small-parameter asymptotics.
//! - [`bqf`]: binary quadratic forms under SL₂(ℤ): class representatives,
//!   Hurwitz class numbers, genus characters, CM points, closed geodesics.
//! - [`modular`]: q-expansions of level-1 modular forms, nearly holomorphic
//!   form arithmetic, raising/lowering operators, and point evaluation via
//!   fundamental-domain reduction.
//! - [`trace`]: CM-value traces, cycle integrals over closed geodesics,
//!   regularized traces at square discriminants, and genus-character twists.
//! - [`lift`]: assembly and evaluation of the lift expansions, with a direct
//!   theta-kernel integral oracle.

pub mod bqf;
pub mod error;
pub mod lattice;
pub mod lift;
pub mod modular;
pub mod poly;
pub mod quad;
pub mod special;
pub mod trace;

pub use error::{Error, Result};
