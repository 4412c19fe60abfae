//! Shared helpers for the integration suites: random instance generators
//! and independently implemented oracles that the library is checked
//! against. Everything here deliberately avoids the library's own
//! algorithms — multiplication is a dense double loop, positivity comes
//! from an eigenvalue solver, ranks come from row reduction, Monte-Carlo
//! sampling is reimplemented from scratch — so agreement is evidence, not
//! tautology.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bihom::multiindex::{enumerate_basis, MultiIndex};
use bihom::poly::{BihomPoly, HoloPoly};
use bihom::scalar::{Complex64, GaussianRational, Rational, Scalar};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn g(n: i64, d: i64) -> GaussianRational {
    GaussianRational::from_ratio(n, d)
}

pub fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

// ---------------------------------------------------------------------
// The two-parameter example family
// ---------------------------------------------------------------------

/// `|z₁|⁴ - λ |z₁ z₂|² + |z₂|⁴` — diagonal, positive on the sphere for
/// `λ < 2`, a squared norm only for `λ ≤ 0`.
pub fn lambda_family(lambda: &Rational) -> BihomPoly<GaussianRational> {
    BihomPoly::from_terms(
        2,
        2,
        [
            (mi(&[2, 0]), mi(&[2, 0]), GaussianRational::from_integer(1)),
            (
                mi(&[1, 1]),
                mi(&[1, 1]),
                GaussianRational::from_real(-lambda.clone()),
            ),
            (mi(&[0, 2]), mi(&[0, 2]), GaussianRational::from_integer(1)),
        ],
    )
    .unwrap()
}

/// Independent stabilization-degree oracle for the family: the product
/// with `‖z‖^{2d}` stays diagonal, with the coefficient of
/// `|z₁|^{2a} |z₂|^{2(d+2-a)}` equal to `C(d,a-2) - λ C(d,a-1) + C(d,a)`;
/// the smallest `d` making every coefficient nonnegative is `d₀`.
pub fn lambda_d0_oracle(lambda: &Rational, bound: u32) -> Option<u32> {
    let choose = |d: u32, j: i64| -> Rational {
        if j < 0 || j > d as i64 {
            return Rational::zero();
        }
        Rational::from_integer(bihom::multiindex::binomial(d as u64, j as u64).into())
    };
    (0..=bound).find(|&d| {
        (0..=(d as i64 + 2)).all(|a| {
            let c = choose(d, a - 2) - lambda.clone() * choose(d, a - 1) + choose(d, a);
            c >= Rational::zero()
        })
    })
}

// ---------------------------------------------------------------------
// Dense reference algebra
// ---------------------------------------------------------------------

/// Dense reference product of two bihomogeneous polynomials: a plain
/// quadruple loop over coefficient tables.
pub fn naive_mul(
    f: &BihomPoly<GaussianRational>,
    g: &BihomPoly<GaussianRational>,
) -> BihomPoly<GaussianRational> {
    let n = f.vars();
    let mut acc: Vec<(MultiIndex, MultiIndex, GaussianRational)> = Vec::new();
    for ((fmu, fnu), fc) in f.terms() {
        for ((gmu, gnu), gc) in g.terms() {
            let mu = fmu.add(gmu);
            let nu = fnu.add(gnu);
            let c = fc.clone() * gc.clone();
            if let Some(slot) = acc.iter_mut().find(|(m, v, _)| *m == mu && *v == nu) {
                slot.2 = slot.2.clone() + c;
            } else {
                acc.push((mu, nu, c));
            }
        }
    }
    acc.retain(|(_, _, c)| !c.is_zero());
    BihomPoly::from_terms(n, f.bidegree() + g.bidegree(), acc).unwrap()
}

/// Exact rank of a set of coefficient vectors by straightforward row
/// reduction over the Gaussian rationals.
pub fn rref_rank(mut rows: Vec<Vec<GaussianRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        for cell in &mut rows[rank][col..] {
            *cell = cell.clone() / p.clone();
        }
        let pivot_row = rows[rank][col..].to_vec();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (cell, lead) in row[col..].iter_mut().zip(&pivot_row) {
                *cell = cell.clone() - factor.clone() * lead.clone();
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Positive-semidefiniteness oracle, end to end independent of the
/// library: assemble the coefficient matrix of `f` against the graded
/// monomial basis by hand, embed the Hermitian `X + iY` as the real
/// symmetric `[[X, -Y], [Y, X]]`, and ask an eigenvalue solver. One-sided
/// by construction: a clearly negative eigenvalue refutes PSD, while a
/// borderline matrix may pass on rounding, so use it only in the
/// "library says PSD ⇒ oracle must not see a negative eigenvalue"
/// direction.
pub fn psd_by_eigenvalues(f: &BihomPoly<GaussianRational>) -> bool {
    let basis = enumerate_basis(f.vars(), f.bidegree());
    let index: std::collections::HashMap<&MultiIndex, usize> =
        basis.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let n = basis.len();
    let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for ((mu, nu), coeff) in f.terms() {
        let (i, j) = (index[mu], index[nu]);
        let c = coeff.to_c64();
        real[(i, j)] = c.re;
        real[(i + n, j + n)] = c.re;
        real[(i, j + n)] = -c.im;
        real[(i + n, j)] = c.im;
    }
    let scale = real.amax().max(1.0);
    let eigen = real.symmetric_eigen();
    eigen.eigenvalues.iter().all(|&ev| ev >= -1e-9 * scale)
}

// ---------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------

pub fn rand_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.gen_range(-9i64..=9);
    let den = rng.gen_range(1i64..=9);
    q(num, den)
}

pub fn rand_gaussian(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::new(rand_rational(rng), rand_rational(rng))
}

/// Random sparse holomorphic polynomial with at least one nonzero term.
pub fn rand_holo(rng: &mut ChaCha8Rng, n: usize, d: u32) -> HoloPoly<GaussianRational> {
    let basis = enumerate_basis(n, d);
    loop {
        let mut terms: Vec<(MultiIndex, GaussianRational)> = Vec::new();
        for alpha in &basis {
            if rng.gen_bool(0.5) {
                terms.push((alpha.clone(), rand_gaussian(rng)));
            }
        }
        let p = HoloPoly::from_terms(n, d, terms).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random squared norm `Σ |h_k|²` with `k` components.
pub fn rand_squared_norm(
    rng: &mut ChaCha8Rng,
    n: usize,
    d: u32,
    k: usize,
) -> (BihomPoly<GaussianRational>, Vec<HoloPoly<GaussianRational>>) {
    let comps: Vec<HoloPoly<GaussianRational>> =
        (0..k).map(|_| rand_holo(rng, n, d)).collect();
    (BihomPoly::from_squared_norm(&comps).unwrap(), comps)
}

/// Random Hermitian bihomogeneous polynomial (usually indefinite).
pub fn rand_hermitian(rng: &mut ChaCha8Rng, n: usize, d: u32) -> BihomPoly<GaussianRational> {
    let basis = enumerate_basis(n, d);
    let mut terms: Vec<(MultiIndex, MultiIndex, GaussianRational)> = Vec::new();
    for (i, mu) in basis.iter().enumerate() {
        for nu in &basis[i..] {
            if !rng.gen_bool(0.6) {
                continue;
            }
            if mu == nu {
                terms.push((mu.clone(), nu.clone(), GaussianRational::from_real(rand_rational(rng))));
            } else {
                let c = rand_gaussian(rng);
                terms.push((mu.clone(), nu.clone(), c.clone()));
                terms.push((nu.clone(), mu.clone(), c.conj()));
            }
        }
    }
    BihomPoly::from_terms(n, d, terms).unwrap()
}

/// Random exact point with small rational coordinates.
pub fn rand_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<GaussianRational> {
    (0..n).map(|_| rand_gaussian(rng)).collect()
}

// ---------------------------------------------------------------------
// Independent Monte-Carlo machinery
// ---------------------------------------------------------------------

/// Hand-derived Lebesgue volumes of the supported closed-form domains.
pub enum RefDomain {
    Ball(usize),
    Polydisc(usize),
    Egg(u32),
}

impl RefDomain {
    pub fn vars(&self) -> usize {
        match self {
            RefDomain::Ball(n) | RefDomain::Polydisc(n) => *n,
            RefDomain::Egg(_) => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        let pi = std::f64::consts::PI;
        match self {
            RefDomain::Ball(n) => (1..=*n).fold(1.0, |v, k| v * pi / k as f64),
            RefDomain::Polydisc(n) => pi.powi(*n as i32),
            // Slice by the first coordinate: area π(1-s) over |z₂|^{2p}=s.
            RefDomain::Egg(p) => pi * pi * (*p as f64) / (*p as f64 + 1.0),
        }
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        match self {
            RefDomain::Ball(_) => z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1.0,
            RefDomain::Polydisc(_) => z.iter().all(|c| c.norm_sqr() < 1.0),
            RefDomain::Egg(p) => z[0].norm_sqr() + z[1].norm_sqr().powi(*p as i32) < 1.0,
        }
    }
}

/// Uniform sample from the domain by rejection from the unit polydisc,
/// written against `rand` directly rather than the library's sampler.
pub fn sample_points(dom: &RefDomain, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dom.vars();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: Vec<Complex64> = (0..n)
            .map(|_| {
                let x: f64 = rng.gen_range(-1.0..1.0);
                let y: f64 = rng.gen_range(-1.0..1.0);
                Complex64::new(x, y)
            })
            .collect();
        if z.iter().all(|c| c.norm_sqr() < 1.0) && dom.contains(&z) {
            out.push(z);
        }
    }
    out
}

/// Monte-Carlo estimate (value, standard error) of
/// `∫ z^α conj(z^β) dV` from a uniform cloud of known volume.
pub struct EntryEstimate {
    pub value: Complex64,
    pub std_err: f64,
}

/// Estimate every Gram entry of one degree from a shared point cloud.
pub fn cloud_gram(
    points: &[Vec<Complex64>],
    volume: f64,
    basis: &[MultiIndex],
) -> Vec<Vec<EntryEstimate>> {
    let dim = basis.len();
    let n_pts = points.len() as f64;
    let mut sums = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    let mut sq_sums = vec![vec![0.0f64; dim]; dim];
    for pt in points {
        let monos: Vec<Complex64> = basis
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
            for j in 0..dim {
                let v = monos[i] * monos[j].conj();
                sums[i][j] += v;
                sq_sums[i][j] += v.norm_sqr();
            }
        }
    }
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let mean = sums[i][j] / n_pts;
                    let var = (sq_sums[i][j] / n_pts - mean.norm_sqr()).max(0.0);
                    EntryEstimate {
                        value: volume * mean,
                        std_err: volume * (var / n_pts).sqrt(),
                    }
                })
                .collect()
        })
        .collect()
}

/// Reference Wallis-style sanity value used to validate the cloud sampler
/// itself: `∫_{unit disc} |z|² dA = π/2`.
pub fn disc_second_moment(points: &[Vec<Complex64>]) -> f64 {
    let n = points.len() as f64;
    std::f64::consts::PI * points.iter().map(|p| p[0].norm_sqr()).sum::<f64>() / n
}
