//! Degree-truncated Bergman kernels for the supported domains.
//!
//! On a bounded circled domain the monomial degrees are mutually
//! orthogonal, so the Bergman kernel splits into degree blocks
//! `K(z, w) = Σ_d Σ_k Φ^d_k(z) conj(Φ^d_k(w))` over orthonormal bases
//! `Φ^d` of the holomorphic homogeneous spaces. Truncating the outer sum
//! at a degree `D` gives a polynomial kernel that reproduces every
//! holomorphic polynomial of degree at most `D`.
//!
//! All inner products here are the *scaled* ones used by
//! [`DomainSpec::gram`] (Lebesgue divided by the domain constant κ), so
//! this kernel equals κ times the classical Lebesgue-normalized kernel.
//! On the unit ball the scaled truncation has the exact closed form
//! `Σ_{d ≤ D} C(n+d, d) ‖z‖^{2d}`, the degree-`D` partial sum of
//! `(1 - ‖z‖²)^{-(n+1)}`.

use crate::domains::{DomainSpec, GramMatrix, McEstimate};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::multiindex::enumerate_basis;
use crate::poly::HoloPoly;
use crate::scalar::{Complex64, GaussianRational, Scalar};

/// Bergman kernel truncated to total degree `max_degree`.
#[derive(Clone, Debug)]
pub struct TruncatedKernel {
    domain: DomainSpec,
    max_degree: u32,
    bases: Vec<Vec<HoloPoly<Complex64>>>,
}

/// Build the truncated kernel by orthonormalizing each degree block.
pub fn truncated_kernel(domain: &DomainSpec, max_degree: u32) -> Result<TruncatedKernel> {
    let mut bases = Vec::with_capacity(max_degree as usize + 1);
    for d in 0..=max_degree {
        bases.push(domain.orthonormal_basis(d)?);
    }
    Ok(TruncatedKernel {
        domain: domain.clone(),
        max_degree,
        bases,
    })
}

impl TruncatedKernel {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Orthonormal basis of one degree block.
    pub fn basis(&self, d: u32) -> &[HoloPoly<Complex64>] {
        &self.bases[d as usize]
    }

    /// `K_D(z, w) = Σ_{d ≤ D} Σ_k Φ^d_k(z) conj(Φ^d_k(w))`.
    pub fn eval(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for block in &self.bases {
            for phi in block {
                acc += phi.eval(z)? * phi.eval(w)?.conj();
            }
        }
        Ok(acc)
    }

    /// Diagonal `K_D(z, z) ≥ 0`.
    pub fn diag(&self, z: &[Complex64]) -> Result<f64> {
        self.diag_partial(z, self.max_degree)
    }

    /// Diagonal of the sub-truncation at `up_to ≤ max_degree`; partial sums
    /// are nondecreasing in the truncation degree.
    pub fn diag_partial(&self, z: &[Complex64], up_to: u32) -> Result<f64> {
        if up_to > self.max_degree {
            return Err(Error::DegreeOverflow {
                degree: up_to as usize,
                cap: self.max_degree as usize,
                context: "kernel truncation".into(),
            });
        }
        let mut acc = 0.0;
        for block in &self.bases[..=up_to as usize] {
            for phi in block {
                acc += phi.eval(z)?.norm_sqr();
            }
        }
        Ok(acc)
    }

    /// Monte-Carlo check of the reproducing property: estimates
    /// `(1/κ) ∫_Ω p(w) conj(K_D(w, ζ)) dV(w)`, which must equal `p(ζ)`
    /// whenever `deg p ≤ D`. Returns the estimate alongside `p(ζ)`.
    pub fn reproduce_mc(
        &self,
        p: &HoloPoly<Complex64>,
        zeta: &[Complex64],
        samples: u64,
        seed: u64,
        jobs: usize,
    ) -> Result<(McEstimate, Complex64)> {
        if p.degree() > self.max_degree {
            return Err(Error::DegreeOverflow {
                degree: p.degree() as usize,
                cap: self.max_degree as usize,
                context: "kernel reproduction".into(),
            });
        }
        let expect = p.eval(zeta)?;
        let kernel_at = |w: &[Complex64]| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for block in &self.bases {
                for phi in block {
                    let pw = phi.eval(w).expect("dimension fixed by kernel");
                    let pz = phi.eval(zeta).expect("dimension fixed by kernel");
                    acc += pw * pz.conj();
                }
            }
            acc
        };
        let mut est = self.domain.mc_integral(
            |w| {
                let pv = p.eval(w).expect("dimension fixed by kernel");
                pv * kernel_at(w).conj()
            },
            samples,
            seed,
            jobs,
        )?;
        let kappa = self.domain.scale_factor();
        est.value /= kappa;
        est.std_err /= kappa;
        Ok((est, expect))
    }
}

/// Exact reproduction identity, one degree at a time: the kernel block of
/// degree `d` has coefficient matrix `C⁻¹` against the monomial Gram `C`,
/// and reproduction of every polynomial in the block is precisely
/// `C · C⁻¹ = I`, verified here in exact arithmetic.
pub fn exact_reproduction_check(domain: &DomainSpec, max_degree: u32) -> Result<()> {
    for d in 0..=max_degree {
        let gram: GramMatrix<GaussianRational> = domain.gram(d)?;
        let inv = gram.mat.inverse()?;
        let prod = gram.mat.mul(&inv);
        let id = Mat::<GaussianRational>::identity(prod.nrows());
        if prod != id {
            return Err(Error::invalid(
                "kernel",
                format!("degree-{d} block of {} fails C·C⁻¹ = I", domain.id()),
            ));
        }
    }
    Ok(())
}

/// Exact reproduction at a point: returns the pair
/// `(⟨p, K_d(·, ζ)⟩, p(ζ))`, computed entirely in rational arithmetic;
/// the two must agree for every holomorphic `p` of homogeneous degree `d`.
pub fn reproduce_exact(
    domain: &DomainSpec,
    p: &HoloPoly<GaussianRational>,
    zeta: &[GaussianRational],
) -> Result<(GaussianRational, GaussianRational)> {
    let d = p.degree();
    let gram: GramMatrix<GaussianRational> = domain.gram(d)?;
    let inv = gram.mat.inverse()?;
    let basis = enumerate_basis(p.vars(), d);
    // Coefficients of K(·, ζ) in the monomial basis: t_α = Σ_β (C⁻¹)_{βα} conj(ζ^β).
    let zeta_pows: Vec<GaussianRational> = basis
        .iter()
        .map(|beta| {
            HoloPoly::<GaussianRational>::monomial(beta.clone())
                .eval(zeta)
                .expect("dimension checked by caller")
        })
        .collect();
    let dim = basis.len();
    let mut t = vec![GaussianRational::from_integer(0); dim];
    for (alpha_i, slot) in t.iter_mut().enumerate() {
        for beta_i in 0..dim {
            *slot = slot.clone() + inv[(beta_i, alpha_i)].clone() * zeta_pows[beta_i].conj();
        }
    }
    // ⟨p, q⟩ = Σ_{αβ} p_α conj(q_β) C_{αβ}.
    let p_coeffs: Vec<GaussianRational> = basis.iter().map(|a| p.coeff(a)).collect();
    let mut inner = GaussianRational::from_integer(0);
    for (i, pc) in p_coeffs.iter().enumerate() {
        for (j, tj) in t.iter().enumerate() {
            inner = inner + pc.clone() * tj.conj() * gram.mat[(i, j)].clone();
        }
    }
    Ok((inner, p.eval(zeta)?))
}
