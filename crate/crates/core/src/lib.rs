//! Exact squared-norm certificates for bihomogeneous Hermitian polynomials.
//!
//! The crate answers one family of questions: given a real-valued
//! bihomogeneous polynomial `f(z, z̄) = Σ E_{μν} z^μ z̄^ν` on `ℂ^n` that is
//! positive away from the origin, find a multiplier degree `d` such that the
//! product of `f` with a positivity-preserving multiplier is a Hermitian
//! squared norm `‖h(z)‖²`, and produce a replayable certificate of that
//! identity.
//!
//! Two multiplier families are supported:
//!
//! * **Euclidean**: `‖z‖^{2d} · f = ‖h‖²` — the classical stabilization of
//!   positive bihomogeneous forms;
//! * **Domain**: `‖Φ^d(z)‖² · f = ‖h‖²`, where `Φ^d` is an orthonormal basis
//!   of the degree-`d` holomorphic polynomials under the L² inner product of
//!   a bounded circled domain (ball, polydisc, egg, linear image of the
//!   ball, or a sampled point cloud).
//!
//! The certificate core runs over exact Gaussian-rational arithmetic: the
//! positivity test is a diagonal-pivoting LDL* factorization with no square
//! roots, so a certificate replays as an exact matrix identity and a failed
//! search returns a concrete vector with a negative quadratic-form value.
//! Square roots appear only in the optional float-tower output (the
//! components of `h` and Monte-Carlo cross-checks).
//!
//! Modules mirror the pipeline: [`poly`] (sparse polynomial algebra),
//! [`herm`] (coefficient matrices and the exact PSD test), [`cert`]
//! (decomposition certificates and the verifier), [`domains`] (Gram
//! matrices, orthonormal bases, Monte-Carlo integration), [`stabilize`]
//! (the multiplier-degree search), and [`bergman`] (truncated reproducing
//! kernels).

pub mod bergman;
pub mod cert;
pub mod domains;
pub mod error;
pub mod herm;
pub mod json;
pub mod mat;
pub mod multiindex;
pub mod poly;
pub mod scalar;
pub mod stabilize;

pub use error::{Error, Result};

/// Exact complex scalar: Gaussian rationals `a + bi`, `a, b ∈ ℚ`.
pub use scalar::GaussianRational;
/// Float complex scalar.
pub use scalar::Complex64;
/// Exact real scalar: arbitrary-precision rationals.
pub use scalar::Rational;

/// Bihomogeneous polynomial over the exact tower (certificate arithmetic).
pub type ExactBihom = poly::BihomPoly<GaussianRational>;
/// Bihomogeneous polynomial over the float tower.
pub type FloatBihom = poly::BihomPoly<Complex64>;
/// Holomorphic homogeneous polynomial over the exact tower.
pub type ExactHolo = poly::HoloPoly<GaussianRational>;
/// Holomorphic homogeneous polynomial over the float tower.
pub type FloatHolo = poly::HoloPoly<Complex64>;
/// Hermitian coefficient matrix over the exact tower.
pub type ExactHerm = herm::HermMatrix<GaussianRational>;
/// Squared-norm certificate over the exact tower.
pub type ExactCertificate = cert::SosCertificate<GaussianRational>;
/// Squared-norm certificate over the float tower (numeric-grade).
pub type FloatCertificate = cert::SosCertificate<Complex64>;
