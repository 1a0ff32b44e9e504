//! Functional models for rational Schur functions on the right half-plane.
//!
//! A Schur function `φ` is held as a state-space realization `(A, B, C, D)` with
//! `φ(μ) = D + C(μ − A)⁻¹B`. The models live in a reproducing kernel Hilbert
//! space `H_s` of pairs `[x₁(μ); x₂(μ*)]` on `C₊ × C₊`, and every element the
//! crate manipulates is a finite combination of kernel sections, so norms are
//! Gram quadratic forms and evaluations are closed-form rational expressions.

pub mod corpus;
pub mod disk;
pub mod error;
pub mod ext;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod past_future;
pub mod realize;
pub mod report;
pub mod sampling;
pub mod schur;
pub mod span;
pub mod suite;

pub use error::{Error, Result};
pub use kernel::{KernelBlock, KernelPoint};
pub use report::{Detail, Report, RunConfig};
pub use schur::{ConservativeNode, DiskSchur, StateSpaceSchur};
pub use span::{ControlDerivative, Section, SpanElement};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
