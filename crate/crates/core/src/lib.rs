//! Numerical geometric control for LTI systems `(A, B, C, D)`.
//!
//! The crate computes the classical invariant subspaces of a quadruple and
//! synthesizes real feedback matrices from kernels of the reachability and
//! Rosenbrock pencils. The [`verify`] module drives seeded randomized checks
//! of the rank identities that tie these objects together.
//!
//! Everything here is `no_std` + `alloc`; file formats, reports and the CLI
//! live in the `geokit` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod assignment;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod pencils;
pub mod sysmodel;
pub mod verify;

pub use assignment::FeedbackResult;
pub use error::GeoError;
pub use linalg::{c64, CMat, RMat, Subspace, Tol};
pub use pencils::{PencilKernel, PencilKind, SpectrumSpec};
pub use sysmodel::{GenSpec, SystemQuad};

pub type Result<T, E = GeoError> = core::result::Result<T, E>;
