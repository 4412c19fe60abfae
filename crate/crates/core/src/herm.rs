//! Hermitian coefficient matrices and the pivoted LDL* positivity test.
//!
//! A bihomogeneous polynomial of bidegree `m` in `n` variables is the
//! quadratic form of its coefficient matrix against the degree-`m` monomial
//! basis: `f(z, z̄) = v(z)* E v(z)` with `v(z)_i = z^{α_i}` in graded-lex
//! order. Positivity questions about `f` become semidefiniteness questions
//! about `E`, which this module decides *exactly* over the rational tower:
//!
//! * diagonal pivoting with the largest remaining diagonal entry,
//! * `P E P* = L D L*` with unit lower-triangular `L` and real pivots `D`,
//! * a zero pivot is accepted only when its whole trailing row/column
//!   vanishes (the PSD case); otherwise a concrete vector `v` with
//!   `v* E v < 0` is produced and re-checked against the original matrix.
//!
//! No square roots are taken anywhere, so a factorization over the exact
//! tower is a replayable identity rather than a numerical claim. Runs over
//! the float tower use a relative pivot threshold and are flagged
//! numeric-grade.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::multiindex::{enumerate_basis, MultiIndex};
use crate::poly::BihomPoly;
use crate::scalar::{RealScalar, Scalar};

/// Hermitian coefficient matrix of a bihomogeneous polynomial, indexed by
/// the graded-lex monomial basis of one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix<S> {
    n: usize,
    degree: u32,
    mat: Mat<S>,
}

impl<S: Scalar> HermMatrix<S> {
    /// Wrap a square matrix, checking its size against the monomial basis
    /// and its Hermitian symmetry (exactly in the exact tower, to within
    /// rounding noise in floats).
    pub fn new(n: usize, degree: u32, mat: Mat<S>) -> Result<Self> {
        let dim = enumerate_basis(n, degree).len();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: mat.nrows(),
            });
        }
        let herm = HermMatrix { n, degree, mat };
        herm.require_hermitian()?;
        Ok(herm)
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Mat<S> {
        &self.mat
    }

    fn require_hermitian(&self) -> Result<()> {
        let defect = self.mat.hermitian_defect();
        let scale = self.mat.max_abs_sq();
        let tol = if S::EXACT {
            <S::Real as Zero>::zero()
        } else {
            // Defect and scale are both squared magnitudes.
            <S::Real as RealScalar>::pivot_threshold(&scale)
        };
        if defect > tol {
            // Locate the worst entry for the error message.
            for i in 0..self.size() {
                for j in 0..=i {
                    if (self.mat[(i, j)].clone() - self.mat[(j, i)].conj()).abs_sq() > tol {
                        return Err(Error::NotHermitian { row: i, col: j });
                    }
                }
            }
        }
        Ok(())
    }

    /// Quadratic form `v* E v`; real for Hermitian `E`.
    pub fn quadratic_form(&self, v: &[S]) -> S::Real {
        let n = self.size();
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + v[i].conj() * self.mat[(i, j)].clone() * v[j].clone();
            }
        }
        acc.real()
    }
}

/// Coefficient matrix of `f` against the degree-`m` monomial basis.
pub fn to_matrix<S: Scalar>(f: &BihomPoly<S>) -> HermMatrix<S> {
    let basis = enumerate_basis(f.vars(), f.bidegree());
    let index: std::collections::BTreeMap<&MultiIndex, usize> =
        basis.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut mat = Mat::zeros(basis.len(), basis.len());
    for ((mu, nu), c) in f.terms() {
        let i = index[mu];
        let j = index[nu];
        mat[(i, j)] = c.clone();
    }
    HermMatrix {
        n: f.vars(),
        degree: f.bidegree(),
        mat,
    }
}

/// Polynomial whose coefficient matrix is `e` (inverse of [`to_matrix`]).
pub fn from_matrix<S: Scalar>(e: &HermMatrix<S>) -> BihomPoly<S> {
    let basis = enumerate_basis(e.n, e.degree);
    let mut terms = Vec::new();
    for i in 0..e.size() {
        for j in 0..e.size() {
            let c = e.mat[(i, j)].clone();
            if !c.is_zero() {
                terms.push((basis[i].clone(), basis[j].clone(), c));
            }
        }
    }
    BihomPoly::from_terms(e.n, e.degree, terms).expect("matrix entries are Hermitian")
}

/// Permuted factorization `P E P* = L D L*` certifying `E ⪰ 0`.
#[derive(Clone, Debug)]
pub struct LdlFactorization<S: Scalar> {
    /// `perm[k]` is the original basis index pivoted at step `k`; skipped
    /// (zero-pivot) indices fill the tail.
    pub perm: Vec<usize>,
    /// Unit lower-triangular multipliers in pivot order.
    pub unit_lower: Mat<S>,
    /// Real pivots in pivot order; strictly positive for the first `rank`
    /// slots, zero afterwards.
    pub pivots: Vec<S::Real>,
    /// Number of strictly positive pivots.
    pub rank: usize,
    /// Original indices whose pivot is zero (their trailing rows vanished).
    pub skipped: Vec<usize>,
    /// True when the verdict was computed in the float tower and therefore
    /// rests on thresholded comparisons.
    pub numeric: bool,
}

impl<S: Scalar> LdlFactorization<S> {
    /// Entry `(i, j)` of `P* L D L* P`, i.e. the reconstruction of the
    /// original matrix. Used by certificate replay.
    pub fn reconstruct_entry(&self, i: usize, j: usize) -> S {
        let slot_of = self.inverse_perm();
        let (k, l) = (slot_of[i], slot_of[j]);
        let mut acc = S::zero();
        for s in 0..self.rank {
            let a = lower_entry(&self.unit_lower, k, s);
            let b = lower_entry(&self.unit_lower, l, s);
            acc = acc + a * b.conj() * S::from_real(self.pivots[s].clone());
        }
        acc
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.perm.len()];
        for (slot, &orig) in self.perm.iter().enumerate() {
            inv[orig] = slot;
        }
        inv
    }
}

fn lower_entry<S: Scalar>(l: &Mat<S>, row: usize, col: usize) -> S {
    use std::cmp::Ordering::*;
    match row.cmp(&col) {
        Less => S::zero(),
        Equal => S::one(),
        Greater => l[(row, col)].clone(),
    }
}

/// Explicit disproof of positive semidefiniteness: a vector with a
/// negative quadratic form value, exact in the exact tower.
#[derive(Clone, Debug)]
pub struct NegativityWitness<S: Scalar> {
    pub vector: Vec<S>,
    /// `v* E v`, strictly negative.
    pub value: S::Real,
}

/// Outcome of the semidefiniteness decision.
#[derive(Clone, Debug)]
pub enum PsdOutcome<S: Scalar> {
    Factored(LdlFactorization<S>),
    NotPsd(NegativityWitness<S>),
}

impl<S: Scalar> PsdOutcome<S> {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Factored(_))
    }
}

/// Decide `E ⪰ 0` by diagonal-pivoting LDL* and return either the
/// factorization or a negativity witness.
///
/// Pivot selection always takes the largest remaining diagonal entry. When
/// that maximum is (tolerated as) zero, semidefiniteness forces the whole
/// remaining block to vanish; any surviving negative diagonal or off-
/// diagonal entry yields a candidate witness, which is accepted only after
/// exact (or thresholded) re-evaluation against the original matrix.
pub fn ldlt_psd<S: Scalar>(e: &HermMatrix<S>) -> Result<PsdOutcome<S>> {
    e.require_hermitian()?;
    let n = e.size();
    let mut work = e.mat.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    // Multipliers keyed by (original row, pivot step), so permuting costs
    // nothing.
    let mut mul = Mat::<S>::zeros(n, n);
    let mut pivots = vec![<S::Real as Zero>::zero(); n];

    // Problem scale for the float tower: the largest initial diagonal.
    let mut scale = <S::Real as Zero>::zero();
    for i in 0..n {
        let d = work[(i, i)].real();
        if d > scale {
            scale = d;
        }
    }
    let tol = <S::Real as RealScalar>::pivot_threshold(&scale);

    let mut step = 0usize;
    while step < n {
        // Largest remaining diagonal.
        let mut best = step;
        let mut best_val = work[(perm[step], perm[step])].real();
        for k in step + 1..n {
            let v = work[(perm[k], perm[k])].real();
            if v > best_val {
                best = k;
                best_val = v;
            }
        }

        if best_val > tol {
            perm.swap(step, best);
            let p = perm[step];
            pivots[step] = best_val.clone();
            let pivot = S::from_real(best_val.clone());
            for &o in &perm[step + 1..] {
                let m = work[(o, p)].clone() / pivot.clone();
                mul[(o, step)] = m;
            }
            // Hermitian Schur update of the remaining block.
            for k in step + 1..n {
                let ok = perm[k];
                let lk = mul[(ok, step)].clone();
                for &ol in &perm[step + 1..=k] {
                    let delta = lk.clone() * mul[(ol, step)].conj() * pivot.clone();
                    let updated = work[(ok, ol)].clone() - delta;
                    work[(ok, ol)] = updated.clone();
                    if ok != ol {
                        work[(ol, ok)] = updated.conj();
                    } else {
                        // Keep the diagonal exactly real against float drift.
                        work[(ok, ok)] = S::from_real(updated.real());
                    }
                }
            }
            step += 1;
            continue;
        }

        // Max remaining diagonal is zero (within tolerance). For a PSD
        // matrix the whole remaining block must vanish; look for a
        // candidate contradiction.
        let mut candidate: Option<Vec<(usize, S)>> = None;

        // Most negative remaining diagonal.
        let mut neg_slot = None;
        let mut neg_val = -tol.clone();
        for k in step..n {
            let v = work[(perm[k], perm[k])].real();
            if v < neg_val {
                neg_slot = Some(k);
                neg_val = v;
            }
        }
        if let Some(k) = neg_slot {
            candidate = Some(vec![(k, S::one())]);
        } else {
            // Largest remaining off-diagonal entry.
            let mut best_off: Option<(usize, usize)> = None;
            let mut best_mag = <S::Real as Zero>::zero();
            for k in step..n {
                for l in step..k {
                    let mag = work[(perm[k], perm[l])].abs_sq();
                    if mag > best_mag {
                        best_mag = mag;
                        best_off = Some((k, l));
                    }
                }
            }
            if let Some((k, l)) = best_off {
                // On the 2×2 block with (near-)zero diagonal, the choice
                // u_l = -s, u_k = 1 with s = S(l,k) drives the form to
                // -2|s|² + O(diag).
                let s = work[(perm[l], perm[k])].clone();
                if !s.is_zero() {
                    candidate = Some(vec![(l, -s), (k, S::one())]);
                }
            }
        }

        if let Some(support) = candidate {
            let witness = build_witness(e, &perm, &mul, step, &support);
            // Accept only a witness that truly evaluates negative; in the
            // float tower tiny residue blocks may fail this and are then
            // treated as zero.
            if witness.value < -tol {
                return Ok(PsdOutcome::NotPsd(witness));
            }
        }

        // Remaining block is (numerically) zero: those rows are skipped
        // with zero pivots.
        break;
    }

    let rank = step;
    let skipped = perm[rank..].to_vec();

    // Re-key multipliers from original-row to pivot-slot order.
    let mut unit_lower = Mat::<S>::identity(n);
    for (slot, &orig) in perm.iter().enumerate() {
        for s in 0..rank.min(slot) {
            unit_lower[(slot, s)] = mul[(orig, s)].clone();
        }
    }

    Ok(PsdOutcome::Factored(LdlFactorization {
        perm,
        unit_lower,
        pivots,
        rank,
        skipped,
        numeric: !S::EXACT,
    }))
}

/// Lift a vector supported on trailing Schur slots back to the original
/// coordinates through the unit-triangular solve `L₁₁* y₁ = -L₂₁* u`, and
/// evaluate the quadratic form against the *original* matrix.
fn build_witness<S: Scalar>(
    e: &HermMatrix<S>,
    perm: &[usize],
    mul: &Mat<S>,
    completed: usize,
    support: &[(usize, S)],
) -> NegativityWitness<S> {
    let n = e.size();
    let mut y = vec![S::zero(); n];
    for (slot, v) in support {
        y[*slot] = v.clone();
    }
    for s in (0..completed).rev() {
        // y[s] = -Σ_{r>s} conj(L[r][s]) y[r]
        let mut acc = S::zero();
        for r in s + 1..n {
            if y[r].is_zero() {
                continue;
            }
            acc = acc + mul[(perm[r], s)].conj() * y[r].clone();
        }
        y[s] = -acc;
    }
    let mut vector = vec![S::zero(); n];
    for (slot, &orig) in perm.iter().enumerate() {
        vector[orig] = y[slot].clone();
    }
    let value = e.quadratic_form(&vector);
    NegativityWitness { vector, value }
}

/// Matrix of the integral operator induced by `E` against a basis Gram
/// matrix `c`: the congruence `c̄ E c̄` (with `c̄ = cᵀ` for Hermitian `c`).
/// For a positive-definite Gram this has the same definiteness as `E`, which
/// is how operator-level positivity is realized computationally.
pub fn operator_congruence<S: Scalar>(e: &HermMatrix<S>, gram: &Mat<S>) -> Result<HermMatrix<S>> {
    if gram.nrows() != e.size() || gram.ncols() != e.size() {
        return Err(Error::DimensionMismatch {
            expected: e.size(),
            got: gram.nrows(),
        });
    }
    let cbar = gram.conjugate();
    let q = cbar.mul(&e.mat).mul(&cbar);
    HermMatrix::new(e.n, e.degree, q)
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

    fn diag_matrix(vals: &[Rational]) -> HermMatrix<GaussianRational> {
        // n = 2, degree = len - 1 gives exactly len basis monomials.
        let n = 2;
        let d = (vals.len() - 1) as u32;
        let mut mat = Mat::zeros(vals.len(), vals.len());
        for (k, v) in vals.iter().enumerate() {
            mat[(k, k)] = GaussianRational::from_real(v.clone());
        }
        HermMatrix::new(n, d, mat).unwrap()
    }

    #[test]
    fn matrix_round_trip_keeps_basis_order() {
        let f = BihomPoly::<GaussianRational>::from_diagonal(
            2,
            2,
            [
                (mi(&[2, 0]), q(1, 1)),
                (mi(&[1, 1]), q(-3, 2)),
                (mi(&[0, 2]), q(1, 1)),
            ],
        )
        .unwrap();
        let e = to_matrix(&f);
        assert_eq!(e.size(), 3);
        assert_eq!(e.mat()[(1, 1)], GaussianRational::from_real(q(-3, 2)));
        assert_eq!(from_matrix(&e), f);
    }

    #[test]
    fn indefinite_diagonal_yields_unit_witness() {
        let e = diag_matrix(&[q(1, 1), q(-1, 1), q(1, 1)]);
        match ldlt_psd(&e).unwrap() {
            PsdOutcome::NotPsd(w) => {
                assert_eq!(w.value, q(-1, 1));
                assert_eq!(w.vector[1], GaussianRational::from_integer(1));
                assert_eq!(e.quadratic_form(&w.vector), w.value);
            }
            PsdOutcome::Factored(_) => panic!("expected a witness"),
        }
    }

    #[test]
    fn psd_with_zero_rows_factors_with_skips() {
        let e = diag_matrix(&[q(2, 1), q(0, 1), q(1, 3)]);
        match ldlt_psd(&e).unwrap() {
            PsdOutcome::Factored(f) => {
                assert_eq!(f.rank, 2);
                assert_eq!(f.skipped, vec![1]);
                assert!(!f.numeric);
                // Pivots are selected largest first.
                assert_eq!(f.pivots[0], q(2, 1));
                assert_eq!(f.pivots[1], q(1, 3));
                for i in 0..3 {
                    for j in 0..3 {
                        assert_eq!(f.reconstruct_entry(i, j), e.mat()[(i, j)]);
                    }
                }
            }
            PsdOutcome::NotPsd(w) => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn zero_diagonal_with_offdiagonal_is_rejected() {
        // [[0, a], [ā, 0]] with a = 1/2 + i/3 is indefinite.
        let a = GaussianRational::new(q(1, 2), q(1, 3));
        let mut mat = Mat::zeros(2, 2);
        mat[(0, 1)] = a.clone();
        mat[(1, 0)] = a.conj();
        let e = HermMatrix::new(2, 1, mat).unwrap();
        match ldlt_psd(&e).unwrap() {
            PsdOutcome::NotPsd(w) => {
                assert!(w.value < Rational::zero());
                assert_eq!(e.quadratic_form(&w.vector), w.value);
            }
            PsdOutcome::Factored(_) => panic!("expected a witness"),
        }
    }

    #[test]
    fn dense_psd_reconstructs_exactly() {
        // Gram matrix of the components (z₁+z₂, z₁-z₂, i z₂) — PSD rank 2.
        let i = GaussianRational::new(q(0, 1), q(1, 1));
        let rows = vec![
            vec![g(2, 1), g(0, 1)],
            vec![g(0, 1) - i.clone() * g(0, 1), g(3, 1)],
        ];
        let mut mat = Mat::from_rows(rows).unwrap();
        // Make it genuinely complex Hermitian: E01 = 1-i, E10 = 1+i.
        mat[(0, 1)] = GaussianRational::new(q(1, 1), q(-1, 1));
        mat[(1, 0)] = GaussianRational::new(q(1, 1), q(1, 1));
        let e = HermMatrix::new(2, 1, mat).unwrap();
        match ldlt_psd(&e).unwrap() {
            PsdOutcome::Factored(f) => {
                assert_eq!(f.rank, 2);
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(f.reconstruct_entry(i, j), e.mat()[(i, j)]);
                    }
                }
            }
            PsdOutcome::NotPsd(w) => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut mat = Mat::zeros(2, 2);
        mat[(0, 1)] = g(1, 1);
        let r = HermMatrix::new(2, 1, mat);
        assert!(matches!(r, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn float_tower_flags_numeric() {
        let f = BihomPoly::<GaussianRational>::norm_power(2, 2).to_c64();
        let e = to_matrix(&f);
        match ldlt_psd(&e).unwrap() {
            PsdOutcome::Factored(fact) => assert!(fact.numeric),
            PsdOutcome::NotPsd(w) => panic!("norm power is PSD, got {w:?}"),
        }
    }

    #[test]
    fn congruence_preserves_verdict() {
        let e_neg = diag_matrix(&[q(1, 1), q(-1, 2), q(2, 1)]);
        let e_pos = diag_matrix(&[q(1, 1), q(1, 2), q(2, 1)]);
        // A positive-definite "Gram": diag(1, 1/2, 1/3) plus a Hermitian bump.
        let mut c = Mat::zeros(3, 3);
        c[(0, 0)] = g(1, 1);
        c[(1, 1)] = g(1, 2);
        c[(2, 2)] = g(1, 3);
        c[(0, 1)] = GaussianRational::new(q(1, 10), q(1, 20));
        c[(1, 0)] = c[(0, 1)].conj();
        for e in [&e_neg, &e_pos] {
            let q_form = operator_congruence(e, &c).unwrap();
            let before = ldlt_psd(e).unwrap().is_psd();
            let after = ldlt_psd(&q_form).unwrap().is_psd();
            assert_eq!(before, after);
        }
    }
}
