//! Squared-norm certificates and their verifier.
//!
//! A successful LDL* factorization `P E P* = L D L*` of the coefficient
//! matrix of a product polynomial turns directly into components
//! `h_s(z) = √D_s · Σ_k L[k][s] z^{α_{perm[k]}}`, giving the identity
//! `product = Σ_s |h_s(z)|²`. The certificate stores the exact data
//! `(perm, L, D)` — no square roots — plus the float components for
//! consumers; [`verify`] replays `P* L D L* P` against the freshly
//! recomputed coefficient matrix entry by entry and bounds the numeric
//! residual of the float components on a fixed grid.

use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::herm::{ldlt_psd, to_matrix, LdlFactorization, NegativityWitness, PsdOutcome};
use crate::mat::Mat;
use crate::multiindex::enumerate_basis;
use crate::poly::{BihomPoly, HoloPoly};
use crate::scalar::{Complex64, RealScalar, Scalar};

/// Multiplier family a certificate was produced under. `Euclidean` with
/// `d = 0` means a bare decomposition of the input itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainId {
    Euclidean,
    Ball,
    Polydisc,
    Egg(u32),
    LinearBall,
    Sampled,
}

impl DomainId {
    pub fn as_str(&self) -> String {
        match self {
            DomainId::Euclidean => "euclidean".into(),
            DomainId::Ball => "ball".into(),
            DomainId::Polydisc => "polydisc".into(),
            DomainId::Egg(p) => format!("egg:{p}"),
            DomainId::LinearBall => "linear-ball".into(),
            DomainId::Sampled => "sampled".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(DomainId::Euclidean),
            "ball" => Ok(DomainId::Ball),
            "polydisc" => Ok(DomainId::Polydisc),
            "linear-ball" => Ok(DomainId::LinearBall),
            "sampled" => Ok(DomainId::Sampled),
            other => {
                if let Some(p) = other.strip_prefix("egg:") {
                    let p: u32 = p.parse().map_err(|_| {
                        Error::invalid("domain", format!("bad egg exponent in `{other}`"))
                    })?;
                    Ok(DomainId::Egg(p))
                } else {
                    Err(Error::invalid("domain", format!("unknown domain `{other}`")))
                }
            }
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str())
    }
}

/// Replayable witness that a product polynomial is a Hermitian squared norm.
#[derive(Clone, Debug)]
pub struct SosCertificate<S: Scalar> {
    /// Number of variables.
    pub n: usize,
    /// Degree of the product's monomial basis (input bidegree + `d`).
    pub degree: u32,
    /// Multiplier family.
    pub domain: DomainId,
    /// Multiplier degree.
    pub d: u32,
    /// Pivot order: `perm[k]` is the basis index pivoted at step `k`.
    pub perm: Vec<usize>,
    /// Unit lower-triangular multipliers, in pivot order.
    pub unit_lower: Mat<S>,
    /// Real pivots; strictly positive for the first `rank` slots.
    pub pivots: Vec<S::Real>,
    /// Number of positive pivots = number of squared-norm components.
    pub rank: usize,
    /// True when the factorization is positive definite (full rank).
    pub strict: bool,
    /// Float components of `h`; the only square roots in the pipeline.
    pub components: Vec<HoloPoly<Complex64>>,
    /// True when the verdict rests on float arithmetic.
    pub numeric: bool,
}

/// Result of a decomposition attempt: a certificate or a disproof.
#[derive(Clone, Debug)]
pub enum DecomposeOutcome<S: Scalar> {
    Certificate(SosCertificate<S>),
    NotPsd(NegativityWitness<S>),
}

impl<S: Scalar> DecomposeOutcome<S> {
    pub fn certificate(self) -> Option<SosCertificate<S>> {
        match self {
            DecomposeOutcome::Certificate(c) => Some(c),
            DecomposeOutcome::NotPsd(_) => None,
        }
    }

    pub fn is_certificate(&self) -> bool {
        matches!(self, DecomposeOutcome::Certificate(_))
    }
}

/// Decompose `f` as a Hermitian squared norm, or disprove semidefiniteness.
///
/// With `strict` set, a rank-deficient (merely semidefinite) factorization
/// is an error instead of a certificate.
pub fn decompose<S: Scalar>(f: &BihomPoly<S>, strict: bool) -> Result<DecomposeOutcome<S>> {
    decompose_tagged(f, strict, DomainId::Euclidean, 0)
}

/// [`decompose`] with explicit multiplier provenance recorded in the
/// certificate; used by the stabilization search.
pub fn decompose_tagged<S: Scalar>(
    f: &BihomPoly<S>,
    strict: bool,
    domain: DomainId,
    d: u32,
) -> Result<DecomposeOutcome<S>> {
    let e = to_matrix(f);
    match ldlt_psd(&e)? {
        PsdOutcome::NotPsd(w) => Ok(DecomposeOutcome::NotPsd(w)),
        PsdOutcome::Factored(fact) => {
            if strict && fact.rank < e.size() {
                return Err(Error::StrictnessViolation {
                    step: fact.rank,
                    rank: fact.rank,
                    size: e.size(),
                });
            }
            Ok(DecomposeOutcome::Certificate(certificate_from_factorization(
                f, fact, domain, d,
            )))
        }
    }
}

fn certificate_from_factorization<S: Scalar>(
    f: &BihomPoly<S>,
    fact: LdlFactorization<S>,
    domain: DomainId,
    d: u32,
) -> SosCertificate<S> {
    let basis = enumerate_basis(f.vars(), f.bidegree());
    let size = fact.size();
    let mut components = Vec::with_capacity(fact.rank);
    for s in 0..fact.rank {
        let root = fact.pivots[s].to_f64().sqrt();
        let mut terms = Vec::new();
        for k in s..size {
            let l = if k == s {
                Complex64::new(1.0, 0.0)
            } else {
                fact.unit_lower[(k, s)].to_c64()
            };
            if l.norm_sqr() == 0.0 {
                continue;
            }
            terms.push((basis[fact.perm[k]].clone(), l * root));
        }
        components.push(
            HoloPoly::from_terms(f.vars(), f.bidegree(), terms)
                .expect("factorization terms share the basis degree"),
        );
    }
    let strict = fact.rank == size;
    SosCertificate {
        n: f.vars(),
        degree: f.bidegree(),
        domain,
        d,
        perm: fact.perm,
        unit_lower: fact.unit_lower,
        pivots: fact.pivots,
        rank: fact.rank,
        strict,
        components,
        numeric: fact.numeric,
    }
}

/// Outcome of replaying a certificate against a product polynomial.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// Permutation, triangularity, pivot-sign, and shape checks.
    pub structure_ok: bool,
    /// Human-readable reason when structure fails.
    pub structure_error: Option<String>,
    /// First entry where `P* L D L* P` differs from the coefficient matrix.
    pub first_mismatch: Option<(usize, usize)>,
    /// Largest float deviation `|product(z) - Σ|h_s(z)|²|` over the fixed
    /// evaluation grid.
    pub residual: f64,
    /// Residual bound actually applied (`1e-8 · scale`).
    pub residual_bound: f64,
    /// True when the certificate was float-grade.
    pub numeric: bool,
}

impl VerifyReport {
    pub fn matrix_ok(&self) -> bool {
        self.first_mismatch.is_none()
    }

    pub fn residual_ok(&self) -> bool {
        self.residual <= self.residual_bound
    }

    pub fn pass(&self) -> bool {
        self.structure_ok && self.matrix_ok() && self.residual_ok()
    }
}

/// Replay a certificate against the product polynomial it claims to
/// decompose. Matrix comparison is exact in the exact tower.
pub fn verify<S: Scalar>(cert: &SosCertificate<S>, product: &BihomPoly<S>) -> Result<VerifyReport> {
    let mut structure_error = None;
    let size = enumerate_basis(product.vars(), product.bidegree()).len();

    let mut check = |ok: bool, msg: &str| {
        if !ok && structure_error.is_none() {
            structure_error = Some(msg.to_string());
        }
        ok
    };

    let mut structure_ok = true;
    structure_ok &= check(cert.n == product.vars(), "variable count mismatch");
    structure_ok &= check(cert.degree == product.bidegree(), "basis degree mismatch");
    structure_ok &= check(cert.perm.len() == size, "permutation length mismatch");
    structure_ok &= check(
        cert.unit_lower.nrows() == size && cert.unit_lower.ncols() == size,
        "L shape mismatch",
    );
    structure_ok &= check(cert.pivots.len() == size, "pivot count mismatch");
    structure_ok &= check(cert.rank <= size, "rank exceeds size");
    structure_ok &= check(
        cert.components.len() == cert.rank,
        "component count differs from rank",
    );

    if structure_ok {
        let mut seen = vec![false; size];
        for &p in &cert.perm {
            if p >= size || seen[p] {
                structure_ok &= check(false, "perm is not a permutation");
                break;
            }
            seen[p] = true;
        }
        let zero = <S::Real as Zero>::zero();
        for (s, p) in cert.pivots.iter().enumerate() {
            if s < cert.rank {
                structure_ok &= check(*p > zero || !S::EXACT, "nonpositive pivot in rank block");
            } else {
                structure_ok &= check(p.clone().abs() == zero || !S::EXACT, "nonzero pivot past rank");
            }
        }
        'tri: for i in 0..size {
            for j in 0..size {
                let e = &cert.unit_lower[(i, j)];
                let ok = if i == j {
                    *e == S::one()
                } else if j > i {
                    e.is_zero()
                } else {
                    true
                };
                if !ok {
                    structure_ok &= check(false, "L is not unit lower-triangular");
                    break 'tri;
                }
            }
        }
    }

    // Entrywise replay of P* L D L* P against the recomputed matrix.
    let mut first_mismatch = None;
    if structure_ok {
        let e = to_matrix(product);
        // Comparison tolerance (squared): zero exactly in the exact tower,
        // (1e-9)² · max|entry|² in floats.
        let scale_sq = e.mat().max_abs_sq();
        let tol_sq = <S::Real as RealScalar>::pivot_threshold(
            &<S::Real as RealScalar>::pivot_threshold(&scale_sq),
        );
        let fact = LdlFactorization {
            perm: cert.perm.clone(),
            unit_lower: cert.unit_lower.clone(),
            pivots: cert.pivots.clone(),
            rank: cert.rank,
            skipped: Vec::new(),
            numeric: cert.numeric,
        };
        'outer: for i in 0..size {
            for j in 0..size {
                let diff = fact.reconstruct_entry(i, j) - e.mat()[(i, j)].clone();
                if diff.abs_sq() > tol_sq {
                    first_mismatch = Some((i, j));
                    break 'outer;
                }
            }
        }
    }

    // Numeric residual of the float components on a fixed grid.
    let product_f = product.to_c64();
    let grid = evaluation_grid(product.vars());
    let mut residual = 0.0f64;
    let mut scale = 1.0f64;
    for z in &grid {
        let direct = product_f.eval(z)?;
        let sos: f64 = cert
            .components
            .iter()
            .map(|h| h.eval(z).map(|v| v.norm_sqr()))
            .sum::<Result<f64>>()?;
        residual = residual.max((direct - sos).abs());
        scale = scale.max(direct.abs());
    }

    Ok(VerifyReport {
        structure_ok,
        structure_error,
        first_mismatch,
        residual,
        residual_bound: 1e-8 * scale,
        numeric: cert.numeric,
    })
}

/// Fixed deterministic grid in the unit polydisc used for residual bounds.
pub fn evaluation_grid(n: usize) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    (0..24)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let r = rng.gen::<f64>().sqrt();
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    Complex64::new(r * theta.cos(), r * theta.sin())
                })
                .collect()
        })
        .collect()
}
