//! Multi-indices and the graded-lexicographic monomial order.
//!
//! A multi-index `α = (α_1, …, α_n)` names the monomial `z^α = ∏ z_j^{α_j}`.
//! Throughout the crate the monomials of one degree are listed in descending
//! lexicographic order of exponents — for `n = 2, d = 2` that is
//! `(2,0), (1,1), (0,2)` — and [`MultiIndex`]'s `Ord` sorts first by degree
//! and then by that listing, so sorted maps iterate in basis order.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    /// The index `(0, …, 0)` in `n` variables.
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The index with a single `1` in position `j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|α| = Σ α_j`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()
            .map(MultiIndex)
    }

    /// `α!` as an exact big integer.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().map(|&e| factorial(e as u64)).product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            // Within a degree, descending lex: larger leading exponents first.
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices in `n` variables of total degree `d`, in graded-lex
/// order. The list has `C(d+n-1, n-1)` entries.
pub fn enumerate_basis(n: usize, d: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "need at least one variable");
    let mut out = Vec::with_capacity(dim_homogeneous(n, d));
    let mut prefix = Vec::with_capacity(n);
    fill(n, d, &mut prefix, &mut out);
    out
}

fn fill(slots: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if slots == 1 {
        prefix.push(remaining);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for k in (0..=remaining).rev() {
        prefix.push(k);
        fill(slots - 1, remaining - k, prefix, out);
        prefix.pop();
    }
}

/// Dimension of the homogeneous polynomials of degree `d` in `n` variables,
/// `C(d+n-1, n-1)`.
pub fn dim_homogeneous(n: usize, d: u32) -> usize {
    let b = binomial(d as u64 + n as u64 - 1, n as u64 - 1);
    usize::try_from(&b).expect("basis dimension exceeds usize")
}

pub fn factorial(k: u64) -> BigUint {
    (1..=k).map(BigUint::from).product::<BigUint>().max(BigUint::one())
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

/// `d! / α!` for `|α| = d`: the multinomial coefficient counting monomial
/// orderings, exact.
pub fn multinomial(alpha: &MultiIndex) -> BigUint {
    let mut acc = BigUint::one();
    let mut partial: u64 = 0;
    for &e in alpha.exponents() {
        partial += e as u64;
        acc *= binomial(partial, e as u64);
    }
    acc
}

/// The multinomial as an exact rational, convenient for scalar embedding.
pub fn multinomial_rational(alpha: &MultiIndex) -> BigRational {
    BigRational::from_integer(multinomial(alpha).into())
}
