//! Homogeneous polynomial algebra.
//!
//! Two sparse types share the graded-lex conventions of
//! [`crate::multiindex`]:
//!
//! * [`HoloPoly`] — a holomorphic homogeneous polynomial
//!   `p(z) = Σ_α c_α z^α` with `|α| = d` for every stored term.
//! * [`BihomPoly`] — a bihomogeneous real-valued polynomial
//!   `f(z, z̄) = Σ_{μν} E_{μν} z^μ z̄^ν` with `|μ| = |ν| = m` and Hermitian
//!   coefficients `E_{μν} = conj(E_{νμ})`, the class whose positivity this
//!   crate certifies.
//!
//! Zero coefficients are dropped eagerly, so structural equality is equality
//! of canonical forms. The zero polynomial keeps its declared shape `(n, m)`
//! with an empty term map.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_basis, multinomial_rational, MultiIndex};
use crate::scalar::{Complex64, Scalar};

/// Holomorphic homogeneous polynomial `Σ c_α z^α` of one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloPoly<S> {
    n: usize,
    degree: u32,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> HoloPoly<S> {
    pub fn zero(n: usize, degree: u32) -> Self {
        HoloPoly {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Build from `(α, c)` pairs, validating shape and dropping zeros.
    pub fn from_terms(
        n: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: alpha.len(),
                });
            }
            if alpha.degree() != degree {
                return Err(Error::DegreeMismatch {
                    context: format!("term {alpha} has degree {}, expected {degree}", alpha.degree()),
                });
            }
            if c.is_zero() {
                continue;
            }
            let slot = map.entry(alpha).or_insert_with(S::zero);
            *slot = slot.clone() + c;
        }
        map.retain(|_, c: &mut S| !c.is_zero());
        Ok(HoloPoly { n, degree, terms: map })
    }

    /// The single monomial `z^α` with coefficient one.
    pub fn monomial(alpha: MultiIndex) -> Self {
        let n = alpha.len();
        let degree = alpha.degree();
        let mut terms = BTreeMap::new();
        terms.insert(alpha, S::one());
        HoloPoly { n, degree, terms }
    }

    /// The linear form `Σ_k coeffs_k z_k`.
    pub fn linear_form(coeffs: &[S]) -> Self {
        let n = coeffs.len();
        HoloPoly {
            n,
            degree: 1,
            terms: coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (MultiIndex::unit(n, j), c.clone()))
                .collect(),
        }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> S {
        self.terms.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    /// Dense coefficient vector over the graded-lex basis of this degree.
    pub fn dense_coeffs(&self) -> Vec<S> {
        enumerate_basis(self.n, self.degree)
            .iter()
            .map(|alpha| self.coeff(alpha))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut terms = self.terms.clone();
        for (alpha, c) in &other.terms {
            let slot = terms.entry(alpha.clone()).or_insert_with(S::zero);
            *slot = slot.clone() + c.clone();
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(HoloPoly {
            n: self.n,
            degree: self.degree,
            terms,
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return HoloPoly::zero(self.n, self.degree);
        }
        HoloPoly {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(a, x)| (a.clone(), x.clone() * c.clone()))
                .collect(),
        }
    }

    /// Product of two homogeneous polynomials; degrees add.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut terms: BTreeMap<MultiIndex, S> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let key = a.add(b);
                let slot = terms.entry(key).or_insert_with(S::zero);
                *slot = slot.clone() + ca.clone() * cb.clone();
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(HoloPoly {
            n: self.n,
            degree: self.degree + other.degree,
            terms,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = HoloPoly::from_terms(self.n, 0, [(MultiIndex::zero(self.n), S::one())])
            .expect("constant one");
        for _ in 0..k {
            acc = acc.mul(self).expect("same variable count");
        }
        acc
    }

    pub fn eval(&self, z: &[S]) -> Result<S> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let mut acc = S::zero();
        for (alpha, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in alpha.exponents().iter().enumerate() {
                for _ in 0..e {
                    t = t * z[j].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Explicit lossy conversion into the float tower.
    pub fn to_c64(&self) -> HoloPoly<Complex64> {
        HoloPoly {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c.to_c64()))
                .collect(),
        }
    }

    /// Image under the linear substitution `z ↦ M z`: each variable `z_j`
    /// is replaced by the linear form `Σ_k M[j][k] z_k`.
    pub fn compose_linear(&self, m: &crate::mat::Mat<S>) -> Result<Self> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: m.nrows(),
            });
        }
        let forms: Vec<HoloPoly<S>> = (0..self.n)
            .map(|j| HoloPoly::linear_form(m.row(j)))
            .collect();
        let mut out = HoloPoly::zero(self.n, self.degree);
        for (alpha, c) in &self.terms {
            let mut term =
                HoloPoly::from_terms(self.n, 0, [(MultiIndex::zero(self.n), c.clone())])?;
            for (j, &e) in alpha.exponents().iter().enumerate() {
                term = term.mul(&forms[j].pow(e))?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                context: format!("degrees {} and {}", self.degree, other.degree),
            });
        }
        Ok(())
    }
}

/// Bihomogeneous Hermitian polynomial `Σ E_{μν} z^μ z̄^ν`, real-valued on
/// all of `ℂ^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BihomPoly<S> {
    n: usize,
    m: u32,
    terms: BTreeMap<(MultiIndex, MultiIndex), S>,
}

impl<S: Scalar> BihomPoly<S> {
    pub fn zero(n: usize, m: u32) -> Self {
        BihomPoly {
            n,
            m,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial `1` (bidegree zero).
    pub fn one(n: usize) -> Self {
        let z = MultiIndex::zero(n);
        let mut terms = BTreeMap::new();
        terms.insert((z.clone(), z), S::one());
        BihomPoly { n, m: 0, terms }
    }

    /// Build from `(μ, ν, c)` triples. Every coefficient of a valid input
    /// satisfies `E_{μν} = conj(E_{νμ})`; this constructor requires it and
    /// rejects violations rather than repairing them.
    pub fn from_terms(
        n: usize,
        m: u32,
        terms: impl IntoIterator<Item = (MultiIndex, MultiIndex, S)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<(MultiIndex, MultiIndex), S> = BTreeMap::new();
        for (mu, nu, c) in terms {
            if mu.len() != n || nu.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: mu.len().max(nu.len()),
                });
            }
            if mu.degree() != m || nu.degree() != m {
                return Err(Error::DegreeMismatch {
                    context: format!(
                        "term z^{mu} z̄^{nu} has bidegree ({},{}), expected ({m},{m})",
                        mu.degree(),
                        nu.degree()
                    ),
                });
            }
            let slot = map.entry((mu, nu)).or_insert_with(S::zero);
            *slot = slot.clone() + c;
        }
        map.retain(|_, c| !c.is_zero());
        let poly = BihomPoly { n, m, terms: map };
        poly.require_hermitian()?;
        Ok(poly)
    }

    /// Diagonal Hermitian polynomial `Σ c_α |z^α|²` from real coefficients.
    pub fn from_diagonal(
        n: usize,
        m: u32,
        diag: impl IntoIterator<Item = (MultiIndex, S::Real)>,
    ) -> Result<Self> {
        BihomPoly::from_terms(
            n,
            m,
            diag.into_iter()
                .map(|(alpha, c)| (alpha.clone(), alpha, S::from_real(c))),
        )
    }

    /// `‖A(z)‖² = Σ_k A_k(z) conj(A_k(z))` for a list of holomorphic
    /// components sharing one shape.
    pub fn from_squared_norm(components: &[HoloPoly<S>]) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::MixedComponents {
            context: "empty component list".into(),
        })?;
        let (n, d) = (first.vars(), first.degree());
        for (k, p) in components.iter().enumerate() {
            if p.vars() != n || p.degree() != d {
                return Err(Error::MixedComponents {
                    context: format!(
                        "component {k} has shape ({}, {}), expected ({n}, {d})",
                        p.vars(),
                        p.degree()
                    ),
                });
            }
        }
        let mut terms: BTreeMap<(MultiIndex, MultiIndex), S> = BTreeMap::new();
        for p in components {
            for (alpha, a) in p.terms() {
                for (beta, b) in p.terms() {
                    let key = (alpha.clone(), beta.clone());
                    let slot = terms.entry(key).or_insert_with(S::zero);
                    *slot = slot.clone() + a.clone() * b.conj();
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(BihomPoly { n, m: d, terms })
    }

    /// `‖z‖^{2d} = (Σ |z_j|²)^d`, expanded exactly into its multinomial
    /// diagonal `Σ_{|α|=d} (d!/α!) z^α z̄^α`.
    pub fn norm_power(n: usize, d: u32) -> Self {
        let mut terms = BTreeMap::new();
        for alpha in enumerate_basis(n, d) {
            let c = S::from_rational(&multinomial_rational(&alpha));
            terms.insert((alpha.clone(), alpha), c);
        }
        BihomPoly { n, m: d, terms }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    /// Bidegree `m`: total degree `m` in `z` and `m` in `z̄`.
    pub fn bidegree(&self) -> u32 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mu: &MultiIndex, nu: &MultiIndex) -> S {
        self.terms
            .get(&(mu.clone(), nu.clone()))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// Verify `E_{μν} = conj(E_{νμ})` for every stored term.
    pub fn require_hermitian(&self) -> Result<()> {
        for ((mu, nu), c) in &self.terms {
            let mirror = self.coeff(nu, mu);
            if mirror.conj() != *c {
                return Err(Error::invalid(
                    "polynomial",
                    format!("coefficient at (z^{mu}, z̄^{nu}) is not the conjugate of its mirror"),
                ));
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.m != other.m {
            return Err(Error::DegreeMismatch {
                context: format!("bidegrees {} and {}", self.m, other.m),
            });
        }
        let mut terms = self.terms.clone();
        for (key, c) in &other.terms {
            let slot = terms.entry(key.clone()).or_insert_with(S::zero);
            *slot = slot.clone() + c.clone();
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(BihomPoly {
            n: self.n,
            m: self.m,
            terms,
        })
    }

    /// Scale by a real constant (keeps the Hermitian property).
    pub fn scale_real(&self, c: &S::Real) -> Self {
        if c.is_zero() {
            return BihomPoly::zero(self.n, self.m);
        }
        let s = S::from_real(c.clone());
        BihomPoly {
            n: self.n,
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(k, x)| (k.clone(), x.clone() * s.clone()))
                .collect(),
        }
    }

    /// Bihomogeneous product; bidegrees add and Hermitian symmetry is
    /// preserved term by term.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut terms: BTreeMap<(MultiIndex, MultiIndex), S> = BTreeMap::new();
        for ((mu1, nu1), a) in &self.terms {
            for ((mu2, nu2), b) in &other.terms {
                let key = (mu1.add(mu2), nu1.add(nu2));
                let slot = terms.entry(key).or_insert_with(S::zero);
                *slot = slot.clone() + a.clone() * b.clone();
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(BihomPoly {
            n: self.n,
            m: self.m + other.m,
            terms,
        })
    }

    /// Full complex evaluation `Σ E_{μν} z^μ conj(z)^ν`. For Hermitian
    /// coefficients the imaginary part vanishes (exactly in the exact
    /// tower); use [`BihomPoly::eval`] for the real value.
    pub fn eval_complex(&self, z: &[S]) -> Result<S> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let pows = power_table(z, self.m);
        let conj_pows: Vec<Vec<S>> = pows
            .iter()
            .map(|col| col.iter().map(Scalar::conj).collect())
            .collect();
        let mut acc = S::zero();
        for ((mu, nu), c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in mu.exponents().iter().enumerate() {
                t = t * pows[j][e as usize].clone();
            }
            for (j, &e) in nu.exponents().iter().enumerate() {
                t = t * conj_pows[j][e as usize].clone();
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Real value of the polynomial at a point.
    pub fn eval(&self, z: &[S]) -> Result<S::Real> {
        Ok(self.eval_complex(z)?.real())
    }

    /// Value together with the holomorphic (Wirtinger) partials
    /// `∂f/∂z_j = Σ E_{μν} μ_j z^{μ-e_j} z̄^ν`. For the real-valued `f`
    /// the real gradient follows as `∂f/∂x_j = 2 Re ∂f/∂z_j`,
    /// `∂f/∂y_j = -2 Im ∂f/∂z_j`.
    pub fn eval_with_gradient(&self, z: &[S]) -> Result<(S, Vec<S>)> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let pows = power_table(z, self.m);
        let conj_pows: Vec<Vec<S>> = pows
            .iter()
            .map(|col| col.iter().map(Scalar::conj).collect())
            .collect();
        let mut value = S::zero();
        let mut grad = vec![S::zero(); self.n];
        for ((mu, nu), c) in &self.terms {
            let mut anti = c.clone();
            for (j, &e) in nu.exponents().iter().enumerate() {
                anti = anti * conj_pows[j][e as usize].clone();
            }
            let mut holo = S::one();
            for (j, &e) in mu.exponents().iter().enumerate() {
                holo = holo * pows[j][e as usize].clone();
            }
            value = value + anti.clone() * holo;
            for (j, &e) in mu.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                // μ_j z^{μ-e_j}: divide out one z_j when possible, else
                // rebuild the monomial without it.
                let mut dm = anti.clone();
                dm = dm * S::from_real(<S::Real as crate::scalar::RealScalar>::from_usize(e as usize));
                for (k, &ek) in mu.exponents().iter().enumerate() {
                    let ee = if k == j { ek - 1 } else { ek };
                    dm = dm * pows[k][ee as usize].clone();
                }
                grad[j] = grad[j].clone() + dm;
            }
        }
        Ok((value, grad))
    }

    /// Explicit lossy conversion into the float tower.
    pub fn to_c64(&self) -> BihomPoly<Complex64> {
        BihomPoly {
            n: self.n,
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.to_c64()))
                .collect(),
        }
    }

    /// Substitute `z ↦ M z` in both holomorphic and antiholomorphic slots:
    /// the pullback `f(Mz, conj(Mz))`, again bihomogeneous Hermitian.
    pub fn compose_linear(&self, m: &crate::mat::Mat<S>) -> Result<Self> {
        let mut images: BTreeMap<MultiIndex, HoloPoly<S>> = BTreeMap::new();
        let mut image = |alpha: &MultiIndex| -> Result<HoloPoly<S>> {
            if let Some(p) = images.get(alpha) {
                return Ok(p.clone());
            }
            let p = HoloPoly::<S>::monomial(alpha.clone()).compose_linear(m)?;
            images.insert(alpha.clone(), p.clone());
            Ok(p)
        };
        let mut out = BihomPoly::zero(self.n, self.m);
        for ((mu, nu), c) in &self.terms {
            let pm = image(mu)?;
            let pn = image(nu)?;
            // c * pm(z) * conj(pn(z)) as bihomogeneous terms.
            let mut partial: BTreeMap<(MultiIndex, MultiIndex), S> = BTreeMap::new();
            for (a, ca) in pm.terms() {
                for (b, cb) in pn.terms() {
                    let key = (a.clone(), b.clone());
                    let slot = partial.entry(key).or_insert_with(S::zero);
                    *slot = slot.clone() + c.clone() * ca.clone() * cb.conj();
                }
            }
            partial.retain(|_, v| !v.is_zero());
            out = out.add(&BihomPoly {
                n: self.n,
                m: self.m,
                terms: partial,
            })?;
        }
        Ok(out)
    }
}

/// Per-variable powers `z_j^0 … z_j^max` for repeated monomial evaluation.
fn power_table<S: Scalar>(z: &[S], max: u32) -> Vec<Vec<S>> {
    z.iter()
        .map(|zj| {
            let mut col = Vec::with_capacity(max as usize + 1);
            col.push(S::one());
            for k in 1..=max as usize {
                let prev = col[k - 1].clone();
                col.push(prev * zj.clone());
            }
            col
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{GaussianRational, Rational};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn g(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    /// `|z_1|⁴ - λ |z_1 z_2|² + |z_2|⁴`.
    fn lambda_family(lambda: Rational) -> BihomPoly<GaussianRational> {
        BihomPoly::from_diagonal(
            2,
            2,
            [
                (mi(&[2, 0]), q(1, 1)),
                (mi(&[1, 1]), -lambda),
                (mi(&[0, 2]), q(1, 1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_lambda_family_at_ones() {
        let f = lambda_family(q(1, 1));
        let z = vec![g(1, 1), g(1, 1)];
        assert_eq!(f.eval(&z).unwrap(), q(1, 1));
        assert!(f.eval_complex(&z).unwrap().imag().is_zero());
    }

    #[test]
    fn norm_power_squared_has_central_two() {
        let np1 = BihomPoly::<GaussianRational>::norm_power(2, 1);
        let sq = np1.mul(&np1).unwrap();
        assert_eq!(sq.coeff(&mi(&[1, 1]), &mi(&[1, 1])), g(2, 1));
        assert_eq!(sq, BihomPoly::norm_power(2, 2));
    }

    #[test]
    fn norm_power_coefficients_are_multinomials() {
        let np = BihomPoly::<GaussianRational>::norm_power(2, 3);
        let diag: Vec<GaussianRational> = enumerate_basis(2, 3)
            .iter()
            .map(|a| np.coeff(a, a))
            .collect();
        assert_eq!(diag, vec![g(1, 1), g(3, 1), g(3, 1), g(1, 1)]);
    }

    #[test]
    fn lambda_one_times_norm_power_is_sum_of_sixth_powers() {
        let f = lambda_family(q(1, 1));
        let product = f.mul(&BihomPoly::norm_power(2, 1)).unwrap();
        let expect = BihomPoly::from_diagonal(
            2,
            3,
            [(mi(&[3, 0]), q(1, 1)), (mi(&[0, 3]), q(1, 1))],
        )
        .unwrap();
        assert_eq!(product, expect);
    }

    #[test]
    fn squared_norm_expansion_collapses() {
        // ‖(z₁²+z₂², i(z₁²−z₂²))‖² = 2|z₁|⁴ + 2|z₂|⁴
        let i = GaussianRational::new(q(0, 1), q(1, 1));
        let p1 = HoloPoly::from_terms(
            2,
            2,
            [(mi(&[2, 0]), g(1, 1)), (mi(&[0, 2]), g(1, 1))],
        )
        .unwrap();
        let p2 = HoloPoly::from_terms(
            2,
            2,
            [(mi(&[2, 0]), i.clone()), (mi(&[0, 2]), -i)],
        )
        .unwrap();
        let f = BihomPoly::from_squared_norm(&[p1, p2]).unwrap();
        let expect = BihomPoly::from_diagonal(
            2,
            2,
            [(mi(&[2, 0]), q(2, 1)), (mi(&[0, 2]), q(2, 1))],
        )
        .unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn squared_norm_matches_pointwise_sum() {
        let p1 = HoloPoly::from_terms(2, 1, [(mi(&[1, 0]), g(1, 2)), (mi(&[0, 1]), g(-1, 3))])
            .unwrap();
        let p2 = HoloPoly::from_terms(2, 1, [(mi(&[0, 1]), g(2, 1))]).unwrap();
        let f = BihomPoly::from_squared_norm(&[p1.clone(), p2.clone()]).unwrap();
        let z = vec![
            GaussianRational::new(q(1, 2), q(1, 3)),
            GaussianRational::new(q(-1, 5), q(2, 1)),
        ];
        let direct = p1.eval(&z).unwrap().abs_sq() + p2.eval(&z).unwrap().abs_sq();
        assert_eq!(f.eval(&z).unwrap(), direct);
    }

    #[test]
    fn non_hermitian_terms_rejected() {
        let r = BihomPoly::from_terms(2, 1, [(mi(&[1, 0]), mi(&[0, 1]), g(1, 1))]);
        assert!(r.is_err(), "one-sided off-diagonal term is not Hermitian");
        let ok = BihomPoly::from_terms(
            2,
            1,
            [
                (mi(&[1, 0]), mi(&[0, 1]), g(1, 1)),
                (mi(&[0, 1]), mi(&[1, 0]), g(1, 1)),
            ],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn mixed_component_shapes_rejected() {
        let p1 = HoloPoly::<GaussianRational>::monomial(mi(&[1, 0]));
        let p2 = HoloPoly::<GaussianRational>::monomial(mi(&[2, 0]));
        assert!(matches!(
            BihomPoly::from_squared_norm(&[p1, p2]),
            Err(Error::MixedComponents { .. })
        ));
    }

    #[test]
    fn zero_polynomial_is_legal_in_algebra() {
        let zero = BihomPoly::<GaussianRational>::zero(2, 2);
        let f = lambda_family(q(1, 1));
        assert!(zero.mul(&f).unwrap().is_zero());
        assert_eq!(zero.mul(&f).unwrap().bidegree(), 4);
        assert!(zero.eval(&[g(1, 1), g(2, 1)]).unwrap().is_zero());
    }

    #[test]
    fn bihomogeneity_under_complex_scaling() {
        let f = lambda_family(q(3, 2));
        let z = vec![
            GaussianRational::new(q(1, 2), q(-1, 4)),
            GaussianRational::new(q(2, 3), q(1, 1)),
        ];
        let lam = GaussianRational::new(q(3, 5), q(4, 5));
        let scaled: Vec<GaussianRational> =
            z.iter().map(|zj| zj.clone() * lam.clone()).collect();
        let factor = lam.abs_sq(); // |λ|²
        let mut expect = f.eval(&z).unwrap();
        for _ in 0..f.bidegree() {
            expect *= factor.clone();
        }
        assert_eq!(f.eval(&scaled).unwrap(), expect);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let f = lambda_family(q(3, 2)).to_c64();
        let z = vec![Complex64::new(0.4, -0.3), Complex64::new(0.8, 0.1)];
        let (v, grad) = f.eval_with_gradient(&z).unwrap();
        assert!(v.im.abs() < 1e-12);
        let h = 1e-6;
        for j in 0..2 {
            let mut zp = z.clone();
            zp[j] += Complex64::new(h, 0.0);
            let dre = (f.eval(&zp).unwrap() - f.eval(&z).unwrap()) / h;
            let mut zq = z.clone();
            zq[j] += Complex64::new(0.0, h);
            let dim = (f.eval(&zq).unwrap() - f.eval(&z).unwrap()) / h;
            assert!((2.0 * grad[j].re - dre).abs() < 1e-4, "x-derivative var {j}");
            assert!((-2.0 * grad[j].im - dim).abs() < 1e-4, "y-derivative var {j}");
        }
    }

    #[test]
    fn compose_with_rational_rotation_preserves_values() {
        let f = lambda_family(q(1, 1));
        let u = crate::mat::Mat::from_rows(vec![
            vec![g(3, 5), g(4, 5)],
            vec![g(-4, 5), g(3, 5)],
        ])
        .unwrap();
        let fu = f.compose_linear(&u).unwrap();
        fu.require_hermitian().unwrap();
        let z = vec![
            GaussianRational::new(q(1, 3), q(1, 7)),
            GaussianRational::new(q(-2, 5), q(1, 2)),
        ];
        // f(Uz) evaluated two ways.
        let uz: Vec<GaussianRational> = (0..2)
            .map(|r| {
                u.row(r)
                    .iter()
                    .zip(&z)
                    .fold(GaussianRational::zero(), |acc, (m, zj)| {
                        acc + m.clone() * zj.clone()
                    })
            })
            .collect();
        assert_eq!(fu.eval(&z).unwrap(), f.eval(&uz).unwrap());
    }
}
