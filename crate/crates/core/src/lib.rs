//! Asymptotics of linear flows `e^{t a}` on Grassmannians of a
//! finite-dimensional complex vector space.
//!
//! The crate computes, for a linear generator `a` and a subspace `D`:
//!
//! - the limiting subspace `D_inf` with explicit frame curves along
//!   `e^{t a} D` ([`shadow`]),
//! - the omega-limit torus of the flow through `D_inf` and the
//!   transversality (minimal growth) verdict against a complement `K`
//!   ([`omega`]),
//! - the full asymptotic expansion of the projection onto `e^{t a} D`
//!   along `K`, organized over the real exponent semigroup ([`projasym`]),
//! - a companion symbol algebra for components
//!   `lambda^{nu/m} p(lambda^{i mu}, log lambda) / q(...)` ([`symalg`]).
//!
//! Everything runs in one of two arithmetic modes: exact Gaussian-rational
//! arithmetic or double-precision floats, selected by the scalar type.

pub mod eig;
pub mod exppoly;
pub mod linalg;
pub mod mat;
pub mod omega;
pub mod par;
pub mod projasym;
pub mod scalar;
pub mod shadow;
pub mod spectral;
pub mod symalg;

pub use linalg::{Frame, Subspace, Tolerances};
pub use scalar::{GaussianRational, RealField, Scalar, CF64, R64};
