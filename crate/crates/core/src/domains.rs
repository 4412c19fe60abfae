//! Bounded circled domains and their monomial Gram matrices.
//!
//! For a bounded circled domain `Ω ⊂ ℂ^n` the holomorphic homogeneous
//! spaces of distinct degrees are L²(Ω)-orthogonal, so all integration
//! happens one degree at a time against the Gram matrix
//! `c_{αβ} = ⟨z^α, z^β⟩_Ω = ∫_Ω z^α conj(z^β) dV`.
//!
//! Supported kinds and their Gram entries (each stored after dividing out a
//! fixed positive constant κ, recorded per kind, so entries are exact
//! rationals):
//!
//! | kind            | domain                      | entry (diagonal unless noted)        | κ        |
//! |-----------------|-----------------------------|--------------------------------------|----------|
//! | ball `n`        | `‖z‖ < 1`                   | `n! α! / (n+|α|)!`                   | `πⁿ/n!`  |
//! | polydisc `n`    | `max |z_j| < 1`             | `∏ 1/(α_j+1)`                        | `πⁿ`     |
//! | egg `p` (n = 2) | `|z₁|² + |z₂|^{2p} < 1`     | `α₁! p^{α₁+1} / ∏_{j=0}^{α₁+1}(α₂+1+jp)` | `π²` |
//! | linear-ball `A` | `‖Az‖ < 1`                  | full matrix `|det A|⁻² · T C T*`, `T` the monomial representation of `A⁻¹` | `πⁿ/n!` |
//! | sampled         | point cloud with volume     | Monte-Carlo average (float tower only) | `1`    |
//!
//! Rescaling a Gram by a positive constant moves no positivity verdict, so
//! the κ convention is free; Monte-Carlo cross-checks multiply the stored
//! entries back by κ before comparing against raw Lebesgue estimates.
//!
//! The first three kinds are Reinhardt (invariant under independent
//! rotations of each coordinate), which forces their Grams diagonal. The
//! linear ball is circled but generally not Reinhardt and exercises the
//! dense paths.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cert::DomainId;
use crate::error::{Error, Result};
use crate::herm::{ldlt_psd, HermMatrix, PsdOutcome};
use crate::mat::Mat;
use crate::multiindex::{enumerate_basis, factorial, MultiIndex};
use crate::poly::{BihomPoly, HoloPoly};
use crate::scalar::{Complex64, GaussianRational, Rational, RealScalar, Scalar};

/// Default degree caps for closed-form Gram construction. Diagonal kinds
/// cost nothing per entry and must reach the multiplier degrees the
/// stabilization search needs; the dense congruence for linear balls grows
/// with the basis dimension and is capped lower.
const DIAGONAL_GRAM_CAP: u32 = 64;
const DENSE_GRAM_CAP: u32 = 16;
const SAMPLED_GRAM_CAP: u32 = 12;

/// How a Gram matrix was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramProvenance {
    ClosedForm,
    MonteCarlo,
}

/// Monomial Gram matrix of one degree, indexed graded-lex.
#[derive(Clone, Debug)]
pub struct GramMatrix<S> {
    pub degree: u32,
    pub mat: Mat<S>,
    pub provenance: GramProvenance,
}

#[derive(Clone, Debug)]
enum DomainKind {
    Ball { n: usize },
    Polydisc { n: usize },
    Egg { p: u32 },
    LinearBall { a: Mat<GaussianRational>, a_inv: Mat<GaussianRational> },
    Sampled { points: Vec<Vec<Complex64>>, volume: f64 },
}

/// A bounded circled domain with enough structure to integrate monomials.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    kind: DomainKind,
    max_gram_degree: u32,
}

impl DomainSpec {
    pub fn ball(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("domain", "ball needs at least one variable"));
        }
        Ok(DomainSpec {
            kind: DomainKind::Ball { n },
            max_gram_degree: DIAGONAL_GRAM_CAP,
        })
    }

    pub fn polydisc(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("domain", "polydisc needs at least one variable"));
        }
        Ok(DomainSpec {
            kind: DomainKind::Polydisc { n },
            max_gram_degree: DIAGONAL_GRAM_CAP,
        })
    }

    /// The egg `|z₁|² + |z₂|^{2p} < 1` in two variables, integer `p ≥ 1`.
    pub fn egg(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("domain", "egg exponent p must be at least 1"));
        }
        Ok(DomainSpec {
            kind: DomainKind::Egg { p },
            max_gram_degree: DIAGONAL_GRAM_CAP,
        })
    }

    /// The linear image `‖Az‖ < 1` of the unit ball under an invertible
    /// matrix with Gaussian-rational entries.
    pub fn linear_ball(a: Mat<GaussianRational>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::invalid("domain", "linear-ball matrix must be square"));
        }
        let a_inv = a
            .inverse()
            .map_err(|_| Error::invalid("domain", "linear-ball matrix is singular"))?;
        Ok(DomainSpec {
            kind: DomainKind::LinearBall { a, a_inv },
            max_gram_degree: DENSE_GRAM_CAP,
        })
    }

    /// A point-cloud stand-in for a domain of the given volume; Gram
    /// matrices over it are Monte-Carlo estimates in the float tower.
    pub fn sampled(points: Vec<Vec<Complex64>>, volume: f64) -> Result<Self> {
        let n = points
            .first()
            .ok_or_else(|| Error::invalid("domain", "sampled domain needs at least one point"))?
            .len();
        if n == 0 {
            return Err(Error::invalid("domain", "sampled points need at least one coordinate"));
        }
        if let Some(k) = points.iter().position(|p| p.len() != n) {
            return Err(Error::invalid(
                "domain",
                format!("point {k} has {} coordinates, expected {n}", points[k].len()),
            ));
        }
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::invalid("domain", "sampled volume must be positive and finite"));
        }
        Ok(DomainSpec {
            kind: DomainKind::Sampled { points, volume },
            max_gram_degree: SAMPLED_GRAM_CAP,
        })
    }

    /// Override the closed-form degree cap.
    pub fn with_max_gram_degree(mut self, cap: u32) -> Self {
        self.max_gram_degree = cap;
        self
    }

    pub fn vars(&self) -> usize {
        match &self.kind {
            DomainKind::Ball { n } | DomainKind::Polydisc { n } => *n,
            DomainKind::Egg { .. } => 2,
            DomainKind::LinearBall { a, .. } => a.nrows(),
            DomainKind::Sampled { points, .. } => points[0].len(),
        }
    }

    pub fn id(&self) -> DomainId {
        match &self.kind {
            DomainKind::Ball { .. } => DomainId::Ball,
            DomainKind::Polydisc { .. } => DomainId::Polydisc,
            DomainKind::Egg { p } => DomainId::Egg(*p),
            DomainKind::LinearBall { .. } => DomainId::LinearBall,
            DomainKind::Sampled { .. } => DomainId::Sampled,
        }
    }

    pub fn max_gram_degree(&self) -> u32 {
        self.max_gram_degree
    }

    /// The defining matrix of a linear ball, when that is the kind.
    pub fn linear_matrix(&self) -> Option<&Mat<GaussianRational>> {
        match &self.kind {
            DomainKind::LinearBall { a, .. } => Some(a),
            _ => None,
        }
    }

    /// The egg exponent, when that is the kind.
    pub fn egg_exponent(&self) -> Option<u32> {
        match &self.kind {
            DomainKind::Egg { p } => Some(*p),
            _ => None,
        }
    }

    /// Point cloud and volume, when the kind is sampled.
    pub fn sample_data(&self) -> Option<(&[Vec<Complex64>], f64)> {
        match &self.kind {
            DomainKind::Sampled { points, volume } => Some((points, *volume)),
            _ => None,
        }
    }

    /// Reinhardt domains force diagonal Gram matrices.
    pub fn is_reinhardt(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::Ball { .. } | DomainKind::Polydisc { .. } | DomainKind::Egg { .. }
        )
    }

    /// Whether the smooth, finite-type hypotheses behind the domain-mode
    /// stabilization theorem hold. The polydisc has non-smooth boundary;
    /// a sampled cloud is unknown. Certificates are still produced, with
    /// this flag recorded.
    pub fn hypotheses_met(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::Ball { .. } | DomainKind::Egg { .. } | DomainKind::LinearBall { .. }
        )
    }

    /// The constant κ with `stored Gram = Lebesgue Gram / κ`.
    pub fn scale_factor(&self) -> f64 {
        let pi = std::f64::consts::PI;
        match &self.kind {
            DomainKind::Ball { n } => ball_volume(*n),
            DomainKind::LinearBall { a, .. } => ball_volume(a.nrows()),
            DomainKind::Polydisc { n } => pi.powi(*n as i32),
            DomainKind::Egg { .. } => pi * pi,
            DomainKind::Sampled { .. } => 1.0,
        }
    }

    /// Gram matrix of degree `d`, exact for closed-form kinds (in either
    /// tower), Monte-Carlo for sampled clouds (float tower only).
    pub fn gram<S: Scalar>(&self, d: u32) -> Result<GramMatrix<S>> {
        if d > self.max_gram_degree {
            return Err(Error::DegreeOverflow {
                degree: d as usize,
                cap: self.max_gram_degree as usize,
                context: format!("{} Gram matrix", self.id()),
            });
        }
        let basis = enumerate_basis(self.vars(), d);
        match &self.kind {
            DomainKind::Ball { n } => Ok(diagonal_gram(&basis, |alpha| ball_entry(*n, alpha))),
            DomainKind::Polydisc { .. } => {
                Ok(diagonal_gram(&basis, polydisc_entry))
            }
            DomainKind::Egg { p } => Ok(diagonal_gram(&basis, |alpha| egg_entry(*p, alpha))),
            DomainKind::LinearBall { a, a_inv } => {
                let exact = linear_ball_gram(a, a_inv, &basis)?;
                Ok(GramMatrix {
                    degree: d,
                    mat: exact.map(|c| S::from_rational_pair(&c.re, &c.im)),
                    provenance: GramProvenance::ClosedForm,
                })
            }
            DomainKind::Sampled { points, volume } => {
                if S::EXACT {
                    return Err(Error::TowerMismatch {
                        context: "sampled-domain Gram entries are Monte-Carlo floats".into(),
                    });
                }
                let float = sampled_gram(points, *volume, &basis)?;
                Ok(GramMatrix {
                    degree: d,
                    mat: float.map(|c| {
                        // Dyadic detour keeps the conversion exact; `S` is
                        // the float tower here, so nothing is lost.
                        let re = crate::scalar::rational_from_f64(c.re)
                            .unwrap_or_else(Rational::zero);
                        let im = crate::scalar::rational_from_f64(c.im)
                            .unwrap_or_else(Rational::zero);
                        S::from_rational_pair(&re, &im)
                    }),
                    provenance: GramProvenance::MonteCarlo,
                })
            }
        }
    }

    /// Orthonormal basis `Φ^d` of the degree-`d` holomorphic polynomials
    /// under the (scaled) L²(Ω) inner product, with float coefficients:
    /// normalization is the one place square roots are unavoidable.
    pub fn orthonormal_basis(&self, d: u32) -> Result<Vec<HoloPoly<Complex64>>> {
        let basis = enumerate_basis(self.vars(), d);
        if self.is_reinhardt() {
            // Diagonal Gram: Φ_α = z^α / √c_α in basis order.
            let gram: GramMatrix<GaussianRational> = self.gram(d)?;
            return basis
                .iter()
                .enumerate()
                .map(|(i, alpha)| {
                    let c = gram.mat[(i, i)].to_c64().re;
                    HoloPoly::from_terms(
                        self.vars(),
                        d,
                        [(alpha.clone(), Complex64::new(1.0 / c.sqrt(), 0.0))],
                    )
                })
                .collect();
        }
        match &self.kind {
            DomainKind::Sampled { .. } => {
                let gram: GramMatrix<Complex64> = self.gram(d)?;
                orthonormalize(self.vars(), d, &gram.mat, &basis)
            }
            _ => {
                let gram: GramMatrix<GaussianRational> = self.gram(d)?;
                orthonormalize(self.vars(), d, &gram.mat, &basis)
            }
        }
    }

    /// `‖Φ^d(z)‖² = Σ_{αβ} (c⁻¹)_{βα} z^α z̄^β` as an exact congruence form:
    /// the squared norm of the orthonormal basis needs no square roots.
    pub fn phi_squared_norm<S: Scalar>(&self, d: u32) -> Result<BihomPoly<S>> {
        let gram: GramMatrix<S> = self.gram(d)?;
        let inv = gram.mat.inverse().map_err(|_| Error::GramUnavailable {
            domain: self.id().to_string(),
            degree: d as usize,
            reason: "Gram matrix is singular".into(),
        })?;
        let herm = HermMatrix::new(self.vars(), d, inv.conjugate())?;
        Ok(crate::herm::from_matrix(&herm))
    }

    /// Monte-Carlo estimate of the raw Lebesgue inner product
    /// `⟨p, q⟩ = ∫_Ω p(w) conj(q(w)) dV(w)` with componentwise standard
    /// errors. Deterministic for a fixed seed regardless of `jobs`.
    pub fn mc_inner_product(
        &self,
        p: &HoloPoly<Complex64>,
        q: &HoloPoly<Complex64>,
        samples: u64,
        seed: u64,
        jobs: usize,
    ) -> Result<McEstimate> {
        if p.vars() != self.vars() || q.vars() != self.vars() {
            return Err(Error::DimensionMismatch {
                expected: self.vars(),
                got: p.vars().max(q.vars()),
            });
        }
        self.mc_integral(
            |z: &[Complex64]| {
                let a = p.eval(z).expect("dimension checked");
                let b = q.eval(z).expect("dimension checked");
                a * b.conj()
            },
            samples,
            seed,
            jobs,
        )
    }

    /// Monte-Carlo estimate of `∫_Ω g dV` for an arbitrary integrand, with
    /// the same seeding and determinism guarantees as
    /// [`DomainSpec::mc_inner_product`].
    pub fn mc_integral(
        &self,
        g: impl Fn(&[Complex64]) -> Complex64 + Send + Sync,
        samples: u64,
        seed: u64,
        jobs: usize,
    ) -> Result<McEstimate> {
        match &self.kind {
            DomainKind::Sampled { points, volume } => Ok(cloud_average(points, *volume, g)),
            _ => {
                let sampler = self.sampler()?;
                sampler.integrate(g, samples, seed, jobs)
            }
        }
    }

    /// Rejection sampler from the smallest axis-aligned bounding polydisc.
    fn sampler(&self) -> Result<BoxSampler<'_>> {
        let (radii, member): (Vec<f64>, MemberFn<'_>) = match &self.kind {
            DomainKind::Ball { n } => (
                vec![1.0; *n],
                Box::new(|z: &[Complex64]| z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1.0),
            ),
            DomainKind::Polydisc { n } => (vec![1.0; *n], Box::new(|_z: &[Complex64]| true)),
            DomainKind::Egg { p } => {
                let p = *p;
                (
                    vec![1.0, 1.0],
                    Box::new(move |z: &[Complex64]| {
                        z[0].norm_sqr() + z[1].norm_sqr().powi(p as i32) < 1.0
                    }),
                )
            }
            DomainKind::LinearBall { a, a_inv } => {
                let af: Vec<Vec<Complex64>> = (0..a.nrows())
                    .map(|i| a.row(i).iter().map(Scalar::to_c64).collect())
                    .collect();
                // |z_j| over the domain is maximized at ‖row_j(A⁻¹)‖₂
                // (Cauchy–Schwarz, attained), giving the tightest box.
                let radii: Vec<f64> = (0..a_inv.nrows())
                    .map(|i| {
                        a_inv
                            .row(i)
                            .iter()
                            .map(|c| c.to_c64().norm_sqr())
                            .sum::<f64>()
                            .sqrt()
                    })
                    .collect();
                (
                    radii,
                    Box::new(move |z: &[Complex64]| {
                        af.iter()
                            .map(|row| {
                                row.iter()
                                    .zip(z)
                                    .map(|(m, zj)| m * zj)
                                    .sum::<Complex64>()
                                    .norm_sqr()
                            })
                            .sum::<f64>()
                            < 1.0
                    }),
                )
            }
            DomainKind::Sampled { .. } => {
                return Err(Error::invalid("domain", "sampled domains have no rejection sampler"))
            }
        };
        Ok(BoxSampler { radii, member })
    }
}

type MemberFn<'a> = Box<dyn Fn(&[Complex64]) -> bool + Send + Sync + 'a>;

/// Lebesgue volume `πⁿ/n!` of the unit ball in ℂⁿ.
fn ball_volume(n: usize) -> f64 {
    let mut v = 1.0;
    for k in 1..=n {
        v *= std::f64::consts::PI / k as f64;
    }
    v
}

/// Monte-Carlo estimate with componentwise standard errors.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub value: Complex64,
    pub std_err: Complex64,
    pub samples: u64,
    pub accepted: u64,
}

impl McEstimate {
    /// `|value - expected|` within `k` standard errors, componentwise.
    pub fn within_sigma(&self, expected: Complex64, k: f64) -> bool {
        (self.value.re - expected.re).abs() <= k * self.std_err.re.max(f64::MIN_POSITIVE)
            && (self.value.im - expected.im).abs() <= k * self.std_err.im.max(f64::MIN_POSITIVE)
    }
}

struct BoxSampler<'a> {
    radii: Vec<f64>,
    member: MemberFn<'a>,
}

const MC_BLOCK: u64 = 1 << 14;

impl BoxSampler<'_> {
    fn box_volume(&self) -> f64 {
        self.radii
            .iter()
            .map(|r| std::f64::consts::PI * r * r)
            .product()
    }

    /// Integrate `f` over the domain by rejection from the bounding box.
    ///
    /// Samples are drawn in fixed-size blocks, each from its own ChaCha
    /// stream derived from (seed, block index), and block sums are reduced
    /// in index order — so the result is bit-identical for any `jobs`.
    fn integrate(
        &self,
        f: impl Fn(&[Complex64]) -> Complex64 + Send + Sync,
        samples: u64,
        seed: u64,
        jobs: usize,
    ) -> Result<McEstimate> {
        let n_blocks = samples.div_ceil(MC_BLOCK);
        let block_sums: Vec<BlockSum> = run_blocks(n_blocks, jobs, |b| {
            let lo = b * MC_BLOCK;
            let hi = (lo + MC_BLOCK).min(samples);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b + 1);
            let mut sum = BlockSum::default();
            let mut z = vec![Complex64::new(0.0, 0.0); self.radii.len()];
            for _ in lo..hi {
                for (slot, r) in z.iter_mut().zip(&self.radii) {
                    let rad = r * rng.gen::<f64>().sqrt();
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    *slot = Complex64::new(rad * theta.cos(), rad * theta.sin());
                }
                if (self.member)(&z) {
                    sum.accept(f(&z));
                } else {
                    sum.reject();
                }
            }
            sum
        });
        let total = block_sums
            .into_iter()
            .fold(BlockSum::default(), BlockSum::merge);
        if total.accepted == 0 {
            return Err(Error::ZeroAcceptance {
                drawn: samples as usize,
            });
        }
        Ok(total.finish(self.box_volume(), samples))
    }
}

/// Direct average over a stored point cloud (every point is "accepted").
fn cloud_average(
    points: &[Vec<Complex64>],
    volume: f64,
    f: impl Fn(&[Complex64]) -> Complex64,
) -> McEstimate {
    let mut sum = BlockSum::default();
    for pt in points {
        sum.accept(f(pt));
    }
    sum.finish(volume, points.len() as u64)
}

#[derive(Clone, Copy, Default)]
struct BlockSum {
    sum_re: f64,
    sum_im: f64,
    sum_re2: f64,
    sum_im2: f64,
    accepted: u64,
    drawn: u64,
}

impl BlockSum {
    fn accept(&mut self, v: Complex64) {
        self.sum_re += v.re;
        self.sum_im += v.im;
        self.sum_re2 += v.re * v.re;
        self.sum_im2 += v.im * v.im;
        self.accepted += 1;
        self.drawn += 1;
    }

    fn reject(&mut self) {
        self.drawn += 1;
    }

    fn merge(self, other: BlockSum) -> BlockSum {
        BlockSum {
            sum_re: self.sum_re + other.sum_re,
            sum_im: self.sum_im + other.sum_im,
            sum_re2: self.sum_re2 + other.sum_re2,
            sum_im2: self.sum_im2 + other.sum_im2,
            accepted: self.accepted + other.accepted,
            drawn: self.drawn + other.drawn,
        }
    }

    /// Estimate `weight · mean(v)` where rejected draws contribute zero,
    /// with the standard error of that mean.
    fn finish(self, weight: f64, samples: u64) -> McEstimate {
        let n = self.drawn.max(1) as f64;
        let mean_re = self.sum_re / n;
        let mean_im = self.sum_im / n;
        // Sample variance of the zero-padded values.
        let var_re = ((self.sum_re2 / n) - mean_re * mean_re).max(0.0) * n / (n - 1.0).max(1.0);
        let var_im = ((self.sum_im2 / n) - mean_im * mean_im).max(0.0) * n / (n - 1.0).max(1.0);
        McEstimate {
            value: Complex64::new(weight * mean_re, weight * mean_im),
            std_err: Complex64::new(
                weight * (var_re / n).sqrt(),
                weight * (var_im / n).sqrt(),
            ),
            samples,
            accepted: self.accepted,
        }
    }
}

/// Run per-block work across a bounded worker pool, returning results in
/// block order regardless of scheduling.
fn run_blocks<T: Send>(
    n_blocks: u64,
    jobs: usize,
    work: impl Fn(u64) -> T + Send + Sync,
) -> Vec<T> {
    let jobs = jobs.max(1);
    if jobs == 1 || n_blocks <= 1 {
        return (0..n_blocks).map(work).collect();
    }
    let slots: Vec<Option<T>> = (0..n_blocks).map(|_| None).collect();
    let out = std::sync::Mutex::new(slots);
    let next = std::sync::atomic::AtomicU64::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(n_blocks as usize) {
            scope.spawn(|| loop {
                let b = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if b >= n_blocks {
                    break;
                }
                let value = work(b);
                out.lock().unwrap()[b as usize] = Some(value);
            });
        }
    });
    out.into_inner()
        .unwrap()
        .into_iter()
        .map(|c| c.expect("block computed"))
        .collect()
}

fn diagonal_gram<S: Scalar>(
    basis: &[MultiIndex],
    entry: impl Fn(&MultiIndex) -> Rational,
) -> GramMatrix<S> {
    let mut mat = Mat::zeros(basis.len(), basis.len());
    for (i, alpha) in basis.iter().enumerate() {
        mat[(i, i)] = S::from_rational(&entry(alpha));
    }
    GramMatrix {
        degree: basis.first().map(|a| a.degree()).unwrap_or(0),
        mat,
        provenance: GramProvenance::ClosedForm,
    }
}

/// Ball: `c_α = n! α! / (n + |α|)!` (Lebesgue over `πⁿ/n!`).
fn ball_entry(n: usize, alpha: &MultiIndex) -> Rational {
    let num = factorial(n as u64) * alpha.factorial();
    let den = factorial(n as u64 + alpha.degree() as u64);
    Rational::new(num.into(), den.into())
}

/// Polydisc: `c_α = ∏ 1/(α_j + 1)` (Lebesgue over `πⁿ`).
fn polydisc_entry(alpha: &MultiIndex) -> Rational {
    let den: BigInt = alpha
        .exponents()
        .iter()
        .map(|&e| BigInt::from(e as u64 + 1))
        .product();
    Rational::new(BigInt::one(), den)
}

/// Egg `|z₁|² + |z₂|^{2p} < 1`: reducing the radial integral to a Beta
/// function with one integer argument gives, for `α = (a, b)`,
/// `c_α = a! p^{a+1} / ∏_{j=0}^{a+1} (b + 1 + j p)` (Lebesgue over `π²`).
fn egg_entry(p: u32, alpha: &MultiIndex) -> Rational {
    let (a, b) = (alpha.exponents()[0] as u64, alpha.exponents()[1] as u64);
    let p = p as u64;
    let mut num: BigInt = factorial(a).into();
    num *= BigInt::from(p).pow(a as u32 + 1);
    let mut den = BigInt::one();
    for j in 0..=(a + 1) {
        den *= BigInt::from(b + 1 + j * p);
    }
    Rational::new(num, den)
}

/// Linear ball `‖Az‖ < 1`: substituting `z = A⁻¹w` maps the monomial basis
/// through `T` (the degree-`d` representation of `A⁻¹`) and contributes the
/// real Jacobian `|det A|⁻²`, so `c = |det A|⁻² · T C_ball T*` exactly.
fn linear_ball_gram(
    a: &Mat<GaussianRational>,
    a_inv: &Mat<GaussianRational>,
    basis: &[MultiIndex],
) -> Result<Mat<GaussianRational>> {
    let n = a.nrows();
    let dim = basis.len();
    // T[i][k] = coefficient of w^{β_k} in (A⁻¹ w)^{α_i}.
    let mut t = Mat::<GaussianRational>::zeros(dim, dim);
    for (i, alpha) in basis.iter().enumerate() {
        let image = HoloPoly::<GaussianRational>::monomial(alpha.clone()).compose_linear(a_inv)?;
        for (k, beta) in basis.iter().enumerate() {
            t[(i, k)] = image.coeff(beta);
        }
    }
    let ball: GramMatrix<GaussianRational> =
        diagonal_gram(basis, |alpha| ball_entry(n, alpha));
    let det = determinant(a);
    let det_sq = det.abs_sq();
    if det_sq.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let scale = GaussianRational::from_real(Rational::one() / det_sq);
    let mut gram = t.mul(&ball.mat).mul(&t.adjoint());
    for i in 0..dim {
        for k in 0..dim {
            gram[(i, k)] = gram[(i, k)].clone() * scale.clone();
        }
    }
    Ok(gram)
}

/// Exact determinant by fraction-free-ish Gaussian elimination.
fn determinant(a: &Mat<GaussianRational>) -> GaussianRational {
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = GaussianRational::one();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[(r, col)].is_zero());
        let Some(pr) = pivot_row else {
            return GaussianRational::zero();
        };
        if pr != col {
            m.swap_rows(col, pr);
            det = -det;
        }
        let p = m[(col, col)].clone();
        det = det * p.clone();
        for r in col + 1..n {
            let factor = m[(r, col)].clone() / p.clone();
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let v = m[(r, c)].clone() - factor.clone() * m[(col, c)].clone();
                m[(r, c)] = v;
            }
        }
    }
    det
}

/// Monte-Carlo Gram over a point cloud: `c_{αβ} = (V/N) Σ z^α conj(z^β)`.
fn sampled_gram(
    points: &[Vec<Complex64>],
    volume: f64,
    basis: &[MultiIndex],
) -> Result<Mat<Complex64>> {
    let dim = basis.len();
    if points.len() < dim {
        return Err(Error::InsufficientSamples {
            got: points.len(),
            needed: dim,
            degree: basis.first().map(|a| a.degree()).unwrap_or(0) as usize,
        });
    }
    let mut acc = Mat::<Complex64>::zeros(dim, dim);
    for pt in points {
        let values: Vec<Complex64> = basis
            .iter()
            .map(|alpha| {
                alpha
                    .exponents()
                    .iter()
                    .enumerate()
                    .fold(Complex64::new(1.0, 0.0), |m, (j, &e)| m * pt[j].powu(e))
            })
            .collect();
        for i in 0..dim {
            for j in 0..=i {
                let v = values[i] * values[j].conj();
                acc[(i, j)] += v;
            }
        }
    }
    let w = volume / points.len() as f64;
    let mut out = Mat::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v = acc[(i, j)] * w;
            out[(i, j)] = v;
            if i != j {
                out[(j, i)] = v.conj();
            } else {
                out[(i, i)] = Complex64::new(v.re, 0.0);
            }
        }
    }
    Ok(out)
}

/// Orthonormalize the monomial basis against a positive-definite Gram via
/// the root-free factorization: with `P C P* = L D L*`, the rows of
/// `D^{-1/2} L⁻¹` (pulled back through the permutation) are orthonormal.
fn orthonormalize<S: Scalar>(
    n: usize,
    d: u32,
    gram: &Mat<S>,
    basis: &[MultiIndex],
) -> Result<Vec<HoloPoly<Complex64>>> {
    let herm = HermMatrix::new(n, d, gram.clone())?;
    let fact = match ldlt_psd(&herm)? {
        PsdOutcome::Factored(f) if f.rank == basis.len() => f,
        _ => {
            return Err(Error::GramUnavailable {
                domain: "orthonormal basis".into(),
                degree: d as usize,
                reason: "Gram matrix is not positive definite".into(),
            })
        }
    };
    let linv = fact.unit_lower.unit_lower_inverse();
    let mut out = Vec::with_capacity(basis.len());
    for k in 0..basis.len() {
        let scale = 1.0 / fact.pivots[k].to_f64().sqrt();
        let mut terms = Vec::new();
        for l in 0..=k {
            let c = linv[(k, l)].to_c64() * scale;
            if c.norm_sqr() > 0.0 {
                terms.push((basis[fact.perm[l]].clone(), c));
            }
        }
        out.push(HoloPoly::from_terms(n, d, terms)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RealScalar;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn g(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d)
    }

    fn diag_of(gram: &GramMatrix<GaussianRational>) -> Vec<Rational> {
        (0..gram.mat.nrows()).map(|i| gram.mat[(i, i)].re.clone()).collect()
    }

    #[test]
    fn ball_gram_one_variable() {
        let ball = DomainSpec::ball(1).unwrap();
        let gram: GramMatrix<GaussianRational> = ball.gram(2).unwrap();
        assert_eq!(diag_of(&gram), vec![q(1, 3)]);
    }

    #[test]
    fn ball_gram_two_variables_degree_two() {
        let ball = DomainSpec::ball(2).unwrap();
        let gram: GramMatrix<GaussianRational> = ball.gram(2).unwrap();
        assert_eq!(diag_of(&gram), vec![q(1, 6), q(1, 12), q(1, 6)]);
    }

    #[test]
    fn polydisc_gram_degree_two() {
        let pd = DomainSpec::polydisc(2).unwrap();
        let gram: GramMatrix<GaussianRational> = pd.gram(2).unwrap();
        assert_eq!(diag_of(&gram), vec![q(1, 3), q(1, 4), q(1, 3)]);
    }

    #[test]
    fn egg_p1_matches_unscaled_ball() {
        // p = 1 is the unit ball of ℂ² under the raw π² convention:
        // c_(a,b) = a! b! / (a+b+2)!.
        let egg = DomainSpec::egg(1).unwrap();
        let gram: GramMatrix<GaussianRational> = egg.gram(3).unwrap();
        for (i, alpha) in enumerate_basis(2, 3).iter().enumerate() {
            let (a, b) = (alpha.exponents()[0] as u64, alpha.exponents()[1] as u64);
            let expect = Rational::new(
                (factorial(a) * factorial(b)).into(),
                factorial(a + b + 2).into(),
            );
            assert_eq!(gram.mat[(i, i)].re, expect, "entry {alpha}");
        }
    }

    #[test]
    fn egg_constant_entry() {
        let egg = DomainSpec::egg(2).unwrap();
        let gram: GramMatrix<GaussianRational> = egg.gram(0).unwrap();
        assert_eq!(gram.mat[(0, 0)].re, q(2, 3));
    }

    #[test]
    fn linear_ball_identity_matches_ball() {
        let a = Mat::identity(2);
        let lb = DomainSpec::linear_ball(a).unwrap();
        let ball = DomainSpec::ball(2).unwrap();
        for d in 0..=3 {
            let g1: GramMatrix<GaussianRational> = lb.gram(d).unwrap();
            let g2: GramMatrix<GaussianRational> = ball.gram(d).unwrap();
            assert_eq!(g1.mat, g2.mat, "degree {d}");
        }
    }

    #[test]
    fn linear_ball_rotation_invariance() {
        // A rational rotation is unitary: the Gram must equal the ball's.
        let u = Mat::from_rows(vec![
            vec![g(3, 5), g(4, 5)],
            vec![g(-4, 5), g(3, 5)],
        ])
        .unwrap();
        let lb = DomainSpec::linear_ball(u).unwrap();
        let ball = DomainSpec::ball(2).unwrap();
        for d in 0..=4 {
            let g1: GramMatrix<GaussianRational> = lb.gram(d).unwrap();
            let g2: GramMatrix<GaussianRational> = ball.gram(d).unwrap();
            assert_eq!(g1.mat, g2.mat, "degree {d}");
        }
    }

    #[test]
    fn linear_ball_shear_dense_entries() {
        // A = [[1, 1/2], [0, 1]]; by hand, at degree 1:
        // T = A⁻¹ = [[1, -1/2], [0, 1]], C = diag(1/3, 1/3), det = 1,
        // gram = T C T* = [[5/12, -1/6], [-1/6, 1/3]].
        let a = Mat::from_rows(vec![vec![g(1, 1), g(1, 2)], vec![g(0, 1), g(1, 1)]]).unwrap();
        let lb = DomainSpec::linear_ball(a).unwrap();
        assert!(!lb.is_reinhardt());
        let gram: GramMatrix<GaussianRational> = lb.gram(1).unwrap();
        assert_eq!(gram.mat[(0, 0)], g(5, 12));
        assert_eq!(gram.mat[(0, 1)], g(-1, 6));
        assert_eq!(gram.mat[(1, 0)], g(-1, 6));
        assert_eq!(gram.mat[(1, 1)], g(1, 3));
    }

    #[test]
    fn reinhardt_grams_are_diagonal() {
        for dom in [
            DomainSpec::ball(3).unwrap(),
            DomainSpec::polydisc(2).unwrap(),
            DomainSpec::egg(3).unwrap(),
        ] {
            let gram: GramMatrix<GaussianRational> = dom.gram(3).unwrap();
            for i in 0..gram.mat.nrows() {
                for j in 0..gram.mat.ncols() {
                    if i != j {
                        assert!(gram.mat[(i, j)].is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let lb = DomainSpec::linear_ball(Mat::identity(2)).unwrap();
        assert!(matches!(
            lb.gram::<GaussianRational>(17),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn phi_squared_norm_ball_degree_one() {
        // (3!/2!) ‖z‖² = 3(|z₁|² + |z₂|²).
        let ball = DomainSpec::ball(2).unwrap();
        let phi: BihomPoly<GaussianRational> = ball.phi_squared_norm(1).unwrap();
        let expect = BihomPoly::<GaussianRational>::norm_power(2, 1).scale_real(&q(3, 1));
        assert_eq!(phi, expect);
    }

    #[test]
    fn phi_squared_norm_polydisc_degree_one() {
        let pd = DomainSpec::polydisc(2).unwrap();
        let phi: BihomPoly<GaussianRational> = pd.phi_squared_norm(1).unwrap();
        let expect = BihomPoly::<GaussianRational>::norm_power(2, 1).scale_real(&q(2, 1));
        assert_eq!(phi, expect);
    }

    #[test]
    fn phi_squared_norm_degree_zero_is_inverse_volume() {
        let egg = DomainSpec::egg(2).unwrap();
        let phi: BihomPoly<GaussianRational> = egg.phi_squared_norm(0).unwrap();
        let z = MultiIndex::zero(2);
        assert_eq!(phi.coeff(&z, &z), GaussianRational::from_real(q(3, 2)));
    }

    #[test]
    fn ball_phi_is_binomial_times_norm_power() {
        let ball = DomainSpec::ball(3).unwrap();
        for d in 0..=4u32 {
            let phi: BihomPoly<GaussianRational> = ball.phi_squared_norm(d).unwrap();
            let binom = crate::multiindex::binomial(3 + d as u64, d as u64);
            let factor = Rational::from_integer(binom.into());
            let expect =
                BihomPoly::<GaussianRational>::norm_power(3, d).scale_real(&factor);
            assert_eq!(phi, expect, "degree {d}");
        }
    }

    #[test]
    fn orthonormal_basis_has_identity_gram_shear() {
        let a = Mat::from_rows(vec![vec![g(1, 1), g(1, 2)], vec![g(0, 1), g(1, 1)]]).unwrap();
        let lb = DomainSpec::linear_ball(a).unwrap();
        let d = 2;
        let phis = lb.orthonormal_basis(d).unwrap();
        let gram: GramMatrix<GaussianRational> = lb.gram(d).unwrap();
        let gf = gram.mat.map(|c| c.to_c64());
        let basis = enumerate_basis(2, d);
        // ⟨Φ_j, Φ_k⟩ = u_j C u_k* over dense coefficient vectors.
        for (j, pj) in phis.iter().enumerate() {
            for (k, pk) in phis.iter().enumerate() {
                let uj: Vec<Complex64> = basis.iter().map(|a| pj.coeff(a)).collect();
                let uk: Vec<Complex64> = basis.iter().map(|a| pk.coeff(a)).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, ur) in uj.iter().enumerate() {
                    for (c, uc) in uk.iter().enumerate() {
                        acc += ur * gf[(r, c)] * uc.conj();
                    }
                }
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (acc.re - expect).abs() < 1e-10 && acc.im.abs() < 1e-10,
                    "⟨Φ_{j}, Φ_{k}⟩ = {acc}"
                );
            }
        }
    }

    #[test]
    fn mc_matches_closed_form_on_ball() {
        let ball = DomainSpec::ball(2).unwrap();
        let z1 = HoloPoly::<Complex64>::monomial(MultiIndex::new(vec![1, 0]));
        let est = ball.mc_inner_product(&z1, &z1, 200_000, 7, 1).unwrap();
        // Raw Lebesgue value: stored (1/3) times κ = π²/2, i.e. π²/6.
        let expect = std::f64::consts::PI.powi(2) / 6.0;
        assert!(
            est.within_sigma(Complex64::new(expect, 0.0), 3.5),
            "estimate {} ± {} vs {expect}",
            est.value,
            est.std_err
        );
    }

    #[test]
    fn mc_cross_degree_orthogonality() {
        let ball = DomainSpec::ball(2).unwrap();
        let z1 = HoloPoly::<Complex64>::monomial(MultiIndex::new(vec![1, 0]));
        let z2sq = HoloPoly::<Complex64>::monomial(MultiIndex::new(vec![0, 2]));
        let est = ball.mc_inner_product(&z1, &z2sq, 100_000, 11, 1).unwrap();
        assert!(est.within_sigma(Complex64::new(0.0, 0.0), 3.5));
    }

    #[test]
    fn mc_deterministic_across_jobs() {
        let egg = DomainSpec::egg(2).unwrap();
        let p = HoloPoly::<Complex64>::monomial(MultiIndex::new(vec![1, 1]));
        let a = egg.mc_inner_product(&p, &p, 100_000, 3, 1).unwrap();
        let b = egg.mc_inner_product(&p, &p, 100_000, 3, 4).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.std_err, b.std_err);
        assert_eq!(a.accepted, b.accepted);
    }

    #[test]
    fn sampled_tower_mismatch_in_exact() {
        let pts = vec![vec![Complex64::new(0.1, 0.0)], vec![Complex64::new(0.0, 0.2)]];
        let dom = DomainSpec::sampled(pts, 2.5).unwrap();
        assert!(matches!(
            dom.gram::<GaussianRational>(0),
            Err(Error::TowerMismatch { .. })
        ));
        assert!(dom.gram::<Complex64>(0).is_ok());
    }

    #[test]
    fn sampled_gram_needs_enough_points() {
        let pts = vec![vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)]];
        let dom = DomainSpec::sampled(pts, 1.0).unwrap();
        assert!(matches!(
            dom.gram::<Complex64>(1),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn scale_factors() {
        let pi = std::f64::consts::PI;
        assert!((DomainSpec::ball(2).unwrap().scale_factor() - pi * pi / 2.0).abs() < 1e-12);
        assert!((DomainSpec::polydisc(3).unwrap().scale_factor() - pi.powi(3)).abs() < 1e-9);
        assert!((DomainSpec::egg(4).unwrap().scale_factor() - pi * pi).abs() < 1e-12);
    }

    #[test]
    fn pivot_threshold_sanity() {
        // Guard: the float tower really thresholds, the exact tower never.
        assert_eq!(Rational::pivot_threshold(&q(5, 1)), Rational::zero());
        assert!(f64::pivot_threshold(&5.0) > 0.0);
    }
}
