//! Stabilization search: find the smallest power of a positive multiplier
//! that turns a bihomogeneous polynomial into a squared norm.
//!
//! A real bihomogeneous `f` that is strictly positive away from the origin
//! need not be a squared norm itself, but `‖z‖^{2d} · f` is one for every
//! sufficiently large `d`; the smallest such `d₀` is the (Euclidean)
//! stabilization exponent. Replacing `‖z‖^{2d}` by the squared norm
//! `‖Φᵈ(z)‖²` of an orthonormal basis adapted to a bounded circled domain
//! gives the domain-mode analogue, with the same eventual behaviour on
//! domains with smooth finite-type boundary.
//!
//! [`stabilize_euclidean`] and [`stabilize_domain`] run the search bottom-up
//! and return the first certified degree together with the factorization
//! evidence for every degree tried. Positivity on the unit sphere is checked
//! first by projected gradient descent; a certified negative value aborts the
//! search with the offending point, since no amount of multiplication can
//! repair a sign change.

use crate::cert::{decompose_tagged, DecomposeOutcome, DomainId, SosCertificate};
use crate::domains::{DomainSpec, GramProvenance};
use crate::error::{Error, Result};
use crate::herm::NegativityWitness;
use crate::poly::BihomPoly;
use crate::scalar::{rational_from_f64, Complex64, Rational, RealScalar, Scalar};
use num_traits::Zero;

/// Outcome of one multiplier degree: either the product factored, or a
/// vector certifying its coefficient matrix is not positive semidefinite.
#[derive(Clone, Debug)]
pub struct DegreeTrial<S: Scalar> {
    pub d: u32,
    pub psd: bool,
    pub witness: Option<NegativityWitness<S>>,
}

/// Numerically estimated minimum of `f` over the unit sphere.
#[derive(Clone, Debug)]
pub struct SphereMinEstimate {
    pub value: f64,
    pub point: Vec<Complex64>,
    pub starts: usize,
}

/// A successful stabilization run.
#[derive(Clone, Debug)]
pub struct StabilizationResult<S: Scalar> {
    pub domain: DomainId,
    /// Smallest multiplier degree whose product is a squared norm.
    pub d0: u32,
    pub certificate: SosCertificate<S>,
    /// Every degree tried on the way up, including `d0` itself.
    pub tested: Vec<DegreeTrial<S>>,
    /// Confirmation runs just past `d0` (domain mode checks that success
    /// persists; Euclidean persistence is a theorem but is recorded too).
    pub tail: Vec<DegreeTrial<S>>,
    pub sphere: SphereMinEstimate,
    /// Degree cap the search was allowed to reach.
    pub cap: u32,
    /// True when any float arithmetic or Monte-Carlo data entered the run.
    pub numeric: bool,
    /// Whether the domain satisfies the hypotheses under which eventual
    /// stabilization is guaranteed (always true in Euclidean mode).
    pub hypotheses_met: bool,
}

/// Result of a stabilization search that was allowed to run to its cap.
#[derive(Clone, Debug)]
pub enum StabilizeOutcome<S: Scalar> {
    Stabilized(Box<StabilizationResult<S>>),
    /// No degree up to the cap produced a squared norm.
    CapExceeded {
        tested: Vec<DegreeTrial<S>>,
        sphere: SphereMinEstimate,
        cap: u32,
    },
}

impl<S: Scalar> StabilizeOutcome<S> {
    pub fn stabilized(self) -> Option<StabilizationResult<S>> {
        match self {
            StabilizeOutcome::Stabilized(r) => Some(*r),
            StabilizeOutcome::CapExceeded { .. } => None,
        }
    }

    pub fn d0(&self) -> Option<u32> {
        match self {
            StabilizeOutcome::Stabilized(r) => Some(r.d0),
            StabilizeOutcome::CapExceeded { .. } => None,
        }
    }
}

/// Search for the smallest `d` with `‖z‖^{2d} · f` a squared norm.
///
/// Fails with [`Error::HypothesisViolated`] when `f` is certifiably
/// negative somewhere on the unit sphere (exact tower: certified by exact
/// re-evaluation at a nearby rational point; float tower: by a value below
/// the numeric tolerance).
pub fn stabilize_euclidean<S: Scalar>(
    f: &BihomPoly<S>,
    d_max: u32,
) -> Result<StabilizeOutcome<S>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    f.require_hermitian()?;
    let sphere = reject_if_negative(f)?;
    let norm_sq = BihomPoly::<S>::norm_power(f.vars(), 1);
    let mut product = f.clone();
    let mut tested = Vec::new();
    for d in 0..=d_max {
        if d > 0 {
            product = product.mul(&norm_sq)?;
        }
        match decompose_tagged(&product, false, DomainId::Euclidean, d)? {
            DecomposeOutcome::Certificate(cert) => {
                tested.push(DegreeTrial { d, psd: true, witness: None });
                let tail = euclidean_tail(f, d, d_max)?;
                let numeric = cert.numeric;
                return Ok(StabilizeOutcome::Stabilized(Box::new(StabilizationResult {
                    domain: DomainId::Euclidean,
                    d0: d,
                    certificate: cert,
                    tested,
                    tail,
                    sphere,
                    cap: d_max,
                    numeric,
                    hypotheses_met: true,
                })));
            }
            DecomposeOutcome::NotPsd(witness) => {
                tested.push(DegreeTrial { d, psd: false, witness: Some(witness) });
            }
        }
    }
    Ok(StabilizeOutcome::CapExceeded { tested, sphere, cap: d_max })
}

/// Search for the smallest `d` with `‖Φᵈ(z)‖² · f` a squared norm, where
/// `Φᵈ` is an orthonormal basis of degree-`d` holomorphic polynomials on
/// the domain. The effective cap is the smaller of `d_max` and the
/// domain's Gram degree cap.
pub fn stabilize_domain<S: Scalar>(
    f: &BihomPoly<S>,
    domain: &DomainSpec,
    d_max: u32,
) -> Result<StabilizeOutcome<S>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    f.require_hermitian()?;
    if f.vars() != domain.vars() {
        return Err(Error::DimensionMismatch {
            expected: domain.vars(),
            got: f.vars(),
        });
    }
    let sphere = reject_if_negative(f)?;
    let cap = d_max.min(domain.max_gram_degree());
    let mut tested = Vec::new();
    let mut numeric_gram = false;
    for d in 0..=cap {
        let (trial, cert) = domain_trial(f, domain, d, &mut numeric_gram)?;
        tested.push(trial);
        if let Some(cert) = cert {
            let d0 = d;
            let mut tail = Vec::new();
            for dt in d0 + 1..=(d0 + 2).min(cap) {
                let (trial, _) = domain_trial(f, domain, dt, &mut numeric_gram)?;
                tail.push(trial);
            }
            let numeric = cert.numeric || numeric_gram;
            return Ok(StabilizeOutcome::Stabilized(Box::new(StabilizationResult {
                domain: domain.id(),
                d0,
                certificate: cert,
                tested,
                tail,
                sphere,
                cap,
                numeric,
                hypotheses_met: domain.hypotheses_met(),
            })));
        }
    }
    Ok(StabilizeOutcome::CapExceeded { tested, sphere, cap })
}

/// One domain-mode degree: build `‖Φᵈ‖² · f` and try to factor it.
fn domain_trial<S: Scalar>(
    f: &BihomPoly<S>,
    domain: &DomainSpec,
    d: u32,
    numeric_gram: &mut bool,
) -> Result<(DegreeTrial<S>, Option<SosCertificate<S>>)> {
    let gram = domain.gram::<S>(d)?;
    if gram.provenance == GramProvenance::MonteCarlo {
        *numeric_gram = true;
    }
    let multiplier = domain.phi_squared_norm::<S>(d)?;
    let product = multiplier.mul(f)?;
    match decompose_tagged(&product, false, domain.id(), d)? {
        DecomposeOutcome::Certificate(cert) => {
            Ok((DegreeTrial { d, psd: true, witness: None }, Some(cert)))
        }
        DecomposeOutcome::NotPsd(witness) => Ok((
            DegreeTrial { d, psd: false, witness: Some(witness) },
            None,
        )),
    }
}

/// Confirmation trials at `d0+1`, `d0+2` in Euclidean mode.
fn euclidean_tail<S: Scalar>(
    f: &BihomPoly<S>,
    d0: u32,
    d_max: u32,
) -> Result<Vec<DegreeTrial<S>>> {
    let mut tail = Vec::new();
    for d in d0 + 1..=(d0 + 2).min(d_max.max(d0)) {
        let product = f.mul(&BihomPoly::<S>::norm_power(f.vars(), d))?;
        let trial = match decompose_tagged(&product, false, DomainId::Euclidean, d)? {
            DecomposeOutcome::Certificate(_) => DegreeTrial { d, psd: true, witness: None },
            DecomposeOutcome::NotPsd(witness) => DegreeTrial {
                d,
                psd: false,
                witness: Some(witness),
            },
        };
        tail.push(trial);
    }
    Ok(tail)
}

/// Numerically minimize `f` over the unit sphere by multi-start projected
/// gradient descent. Deterministic: starts come from a low-discrepancy
/// lattice, not an RNG, so repeated runs agree bit for bit.
pub fn check_positive_on_sphere<S: Scalar>(f: &BihomPoly<S>) -> Result<SphereMinEstimate> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let ff = f.to_c64();
    let n = ff.vars();
    let starts = 24 + 8 * n;
    let mut best_value = f64::INFINITY;
    let mut best_point = vec![Complex64::new(1.0, 0.0); n];
    for k in 0..starts {
        let mut point = sphere_start(n, k);
        let mut value = ff.eval(&point)?;
        for _ in 0..300 {
            let (_, wgrad) = ff.eval_with_gradient(&point)?;
            // Real gradient from the holomorphic partials, then its
            // component tangent to the sphere.
            let mut grad: Vec<f64> = Vec::with_capacity(2 * n);
            for g in &wgrad {
                grad.push(2.0 * g.re);
                grad.push(-2.0 * g.im);
            }
            let flat: Vec<f64> = point.iter().flat_map(|c| [c.re, c.im]).collect();
            let radial: f64 = grad.iter().zip(&flat).map(|(a, b)| a * b).sum();
            let tangent: Vec<f64> = grad
                .iter()
                .zip(&flat)
                .map(|(g, x)| g - radial * x)
                .collect();
            let t_norm_sq: f64 = tangent.iter().map(|t| t * t).sum();
            if t_norm_sq <= 1e-24 {
                break;
            }
            let mut eta = 0.5;
            let mut stepped = false;
            while eta > 1e-14 {
                let cand = retract(&flat, &tangent, eta);
                let cand_value = ff.eval(&cand)?;
                if cand_value <= value - 1e-4 * eta * t_norm_sq {
                    point = cand;
                    value = cand_value;
                    stepped = true;
                    break;
                }
                eta *= 0.5;
            }
            if !stepped {
                break;
            }
        }
        if value < best_value {
            best_value = value;
            best_point = point;
        }
    }
    Ok(SphereMinEstimate {
        value: best_value,
        point: best_point,
        starts,
    })
}

/// Run the sphere check and reject certified negativity.
///
/// In the exact tower the float argmin is snapped to exact dyadic
/// coordinates and `f` re-evaluated exactly there; bihomogeneity makes a
/// negative value at ANY nonzero point a disproof on the sphere, so no
/// renormalization is needed, and descent noise can never cause a false
/// rejection. The float tower rejects below `-1e-9` times the coefficient
/// scale.
fn reject_if_negative<S: Scalar>(f: &BihomPoly<S>) -> Result<SphereMinEstimate> {
    let estimate = check_positive_on_sphere(f)?;
    let scale: f64 = f
        .terms()
        .map(|(_, c)| c.to_c64().norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    if estimate.value >= -1e-9 * scale {
        return Ok(estimate);
    }
    if S::EXACT {
        let zq: Vec<S> = estimate
            .point
            .iter()
            .map(|c| {
                let re = rational_from_f64(c.re).unwrap_or_else(Rational::zero);
                let im = rational_from_f64(c.im).unwrap_or_else(Rational::zero);
                S::from_rational_pair(&re, &im)
            })
            .collect();
        let exact_value = f.eval(&zq)?;
        if exact_value < <S::Real as num_traits::Zero>::zero() {
            return Err(Error::HypothesisViolated {
                point: estimate.point.iter().map(|c| (c.re, c.im)).collect(),
                value: exact_value.to_f64(),
            });
        }
        // Descent noise, not a certified sign change: carry on.
        return Ok(estimate);
    }
    Err(Error::HypothesisViolated {
        point: estimate.point.iter().map(|c| (c.re, c.im)).collect(),
        value: estimate.value,
    })
}

/// Step along the tangent direction and renormalize back to the sphere.
fn retract(flat: &[f64], tangent: &[f64], eta: f64) -> Vec<Complex64> {
    let moved: Vec<f64> = flat
        .iter()
        .zip(tangent)
        .map(|(x, t)| x - eta * t)
        .collect();
    let norm = moved.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    moved
        .chunks(2)
        .map(|p| Complex64::new(p[0] / norm, p[1] / norm))
        .collect()
}

/// `k`-th point of a deterministic low-discrepancy sequence on the unit
/// sphere of ℂⁿ: a Kronecker lattice in `[0,1)^{2n}` pushed through
/// Box–Muller and normalized.
fn sphere_start(n: usize, k: usize) -> Vec<Complex64> {
    let m = 2 * n;
    // Generalized golden ratio: the positive root of x^{m+1} = x + 1.
    let mut phi = 1.5_f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (m as f64 + 1.0));
    }
    let u: Vec<f64> = (0..m)
        .map(|i| {
            let alpha = phi.powi(-(i as i32 + 1));
            (0.5 + alpha * (k as f64 + 1.0)).fract()
        })
        .collect();
    let mut gauss = Vec::with_capacity(m);
    for pair in u.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        let r = (-2.0 * (1.0 - a).max(1e-12).ln()).sqrt();
        let theta = std::f64::consts::TAU * b;
        gauss.push(r * theta.cos());
        gauss.push(r * theta.sin());
    }
    let norm = gauss.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    gauss
        .chunks(2)
        .map(|p| Complex64::new(p[0] / norm, p[1] / norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::scalar::{GaussianRational, Rational};
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// `|z₁|⁴ - λ |z₁z₂|² + |z₂|⁴`.
    fn lambda_family(lambda: Rational) -> BihomPoly<GaussianRational> {
        let e = |a: u32, b: u32| MultiIndex::new(vec![a, b]);
        BihomPoly::from_terms(
            2,
            2,
            [
                (e(2, 0), e(2, 0), GaussianRational::from_integer(1)),
                (e(1, 1), e(1, 1), GaussianRational::from_real(-lambda)),
                (e(0, 2), e(0, 2), GaussianRational::from_integer(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn already_square_norm_stabilizes_at_zero() {
        let f = lambda_family(q(0, 1));
        let out = stabilize_euclidean(&f, 10).unwrap();
        let r = out.stabilized().unwrap();
        assert_eq!(r.d0, 0);
        assert!(r.tested.len() == 1 && r.tested[0].psd);
        assert!(r.tail.iter().all(|t| t.psd));
    }

    #[test]
    fn lambda_one_needs_one_power() {
        let f = lambda_family(q(1, 1));
        let out = stabilize_euclidean(&f, 10).unwrap();
        let r = out.stabilized().unwrap();
        assert_eq!(r.d0, 1);
        assert!(!r.tested[0].psd);
        let w = r.tested[0].witness.as_ref().unwrap();
        assert!(w.value < Rational::zero());
    }

    #[test]
    fn lambda_three_halves_needs_five() {
        let f = lambda_family(q(3, 2));
        let out = stabilize_euclidean(&f, 10).unwrap();
        assert_eq!(out.d0(), Some(5));
    }

    #[test]
    fn cap_exceeded_reports_all_trials() {
        let f = lambda_family(q(3, 2));
        match stabilize_euclidean(&f, 3).unwrap() {
            StabilizeOutcome::CapExceeded { tested, cap, .. } => {
                assert_eq!(cap, 3);
                assert_eq!(tested.len(), 4);
                assert!(tested.iter().all(|t| !t.psd));
            }
            StabilizeOutcome::Stabilized(_) => panic!("should not stabilize by degree 3"),
        }
    }

    #[test]
    fn negative_on_sphere_is_rejected_exactly() {
        // λ = 3 dips to -1/4 on the sphere; the exact tower must certify
        // the negative value, not trust the float descent.
        let f = lambda_family(q(3, 1));
        match stabilize_euclidean(&f, 10) {
            Err(Error::HypothesisViolated { value, .. }) => {
                assert!(value < 0.0, "certified value {value}");
            }
            other => panic!("expected hypothesis violation, got {other:?}"),
        }
    }

    #[test]
    fn sphere_minimum_matches_closed_form() {
        // min over the sphere of the λ-family is (2-λ)/4 for 0 ≤ λ ≤ 2.
        let f = lambda_family(q(3, 2));
        let est = check_positive_on_sphere(&f).unwrap();
        assert!((est.value - 0.125).abs() < 1e-6, "estimate {}", est.value);
        // The reported argmin must reproduce the reported value.
        let at_point = f.to_c64().eval(&est.point).unwrap();
        assert!((at_point - est.value).abs() < 1e-12);
    }

    #[test]
    fn domain_mode_ball_lambda_one() {
        let f = lambda_family(q(1, 1));
        let ball = DomainSpec::ball(2).unwrap();
        let out = stabilize_domain(&f, &ball, 16).unwrap();
        let r = out.stabilized().unwrap();
        assert!(r.hypotheses_met);
        assert!(!r.numeric);
        assert!(r.tail.iter().all(|t| t.psd), "tail verdicts {:?}",
            r.tail.iter().map(|t| t.psd).collect::<Vec<_>>());
        // The ball multiplier is a positive multiple of ‖z‖^{2d}, so the
        // domain answer must match the Euclidean one exactly.
        let euclid = stabilize_euclidean(&f, 16).unwrap();
        assert_eq!(r.d0, euclid.d0().unwrap());
    }

    #[test]
    fn domain_mode_egg_two_lambda_one() {
        let f = lambda_family(q(1, 1));
        let egg = DomainSpec::egg(2).unwrap();
        let out = stabilize_domain(&f, &egg, 16).unwrap();
        assert_eq!(out.d0(), Some(2));
    }

    #[test]
    fn domain_mode_polydisc_lambda_one() {
        let f = lambda_family(q(1, 1));
        let pd = DomainSpec::polydisc(2).unwrap();
        let out = stabilize_domain(&f, &pd, 16).unwrap();
        let r = out.stabilized().unwrap();
        assert_eq!(r.d0, 1);
        assert!(!r.hypotheses_met, "polydisc boundary is not smooth");
    }

    #[test]
    fn zero_polynomial_rejected() {
        let z = BihomPoly::<GaussianRational>::zero(2, 1);
        assert!(matches!(
            stabilize_euclidean(&z, 4),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn scaling_does_not_change_d0() {
        let f = lambda_family(q(3, 2));
        let g = f.scale_real(&q(7, 3));
        assert_eq!(
            stabilize_euclidean(&f, 8).unwrap().d0(),
            stabilize_euclidean(&g, 8).unwrap().d0(),
        );
    }
}
