//! The past/future map `Γ : H_c → H_o` and its adjoint on kernel sections.
//!
//! Sections are written `K_o(·, λ)γ ∈ H_o` and `K_c(·, λ*)ν ∈ H_c`. Then
//! `Γ K_c(·, λ*)ν = μ ↦ (φ(λ̄*) − φ(μ))/(μ − λ̄*) ν` and
//! `Γ* K_o(·, λ)γ = μ* ↦ (φ(λ)* − φ(μ̄*)*)/(μ* − λ̄) γ`.

use num_complex::Complex64;

use crate::kernel::{k_c, k_o};
use crate::linalg;
use crate::report::Report;
use crate::schur::StateSpaceSchur;
use crate::span::psd_report;
use crate::{CMatrix, CVector, Error, Result};

/// The function `μ ↦ (φ(λ*) − φ(μ))/(μ − λ*) ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaImage {
    pub lambda_star: Complex64,
    pub nu: CVector,
}

impl GammaImage {
    pub fn eval(&self, phi: &StateSpaceSchur, mu: Complex64) -> Result<CVector> {
        Ok(phi.diff_quotient(self.lambda_star, mu)? * &self.nu)
    }
}

/// The function `μ ↦ (φ̃(λ) − φ̃(μ))/(μ − λ) γ` with `φ̃(μ) = φ(μ̄)*`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaAdjointImage {
    pub lambda: Complex64,
    pub gamma: CVector,
}

impl GammaAdjointImage {
    /// Evaluated as `(C(λ̄ − A)⁻¹(μ̄ − A)⁻¹B)* γ`, without forming `φ̃`.
    pub fn eval(&self, phi: &StateSpaceSchur, mu: Complex64) -> Result<CVector> {
        Ok(phi.diff_quotient(mu.conj(), self.lambda.conj())?.adjoint() * &self.gamma)
    }
}

fn in_half_plane(z: Complex64) -> Result<()> {
    if z.re > 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain(z, "expected Re > 0"))
    }
}

/// `Γ K_c(·, λ̄*)ν`, the function `μ ↦ (φ(λ*) − φ(μ))/(μ − λ*) ν`.
pub fn gamma_apply(
    phi: &StateSpaceSchur,
    lambda_star: Complex64,
    nu: CVector,
) -> Result<GammaImage> {
    in_half_plane(lambda_star)?;
    if nu.len() != phi.inputs() {
        return Err(Error::Dimension("ν must have length m".into()));
    }
    Ok(GammaImage { lambda_star, nu })
}

/// `Γ* K_o(·, λ̄)γ`, the function `μ ↦ (φ̃(λ) − φ̃(μ))/(μ − λ) γ`.
pub fn gamma_adj_apply(
    phi: &StateSpaceSchur,
    lambda: Complex64,
    gamma: CVector,
) -> Result<GammaAdjointImage> {
    in_half_plane(lambda)?;
    if gamma.len() != phi.outputs() {
        return Err(Error::Dimension("γ must have length p".into()));
    }
    Ok(GammaAdjointImage { lambda, gamma })
}

/// `X[i][j] = ⟨Γ K_c(·, λ*_j)ν_j, K_o(·, λ_i)γ_i⟩_{H_o} = γ_i* K₁₂(λ_i, λ*_j) ν_j`.
pub fn cross_gram(
    phi: &StateSpaceSchur,
    o_points: &[(Complex64, CVector)],
    c_points: &[(Complex64, CVector)],
) -> Result<CMatrix> {
    let mut x = CMatrix::zeros(o_points.len(), c_points.len());
    for (j, (ls, nu)) in c_points.iter().enumerate() {
        let g = gamma_apply(phi, ls.conj(), nu.clone())?;
        for (i, (l, gamma)) in o_points.iter().enumerate() {
            in_half_plane(*l)?;
            x[(i, j)] = (gamma.adjoint() * g.eval(phi, *l)?)[(0, 0)];
        }
    }
    Ok(x)
}

/// Gram matrix of `[1, Γ; Γ*, 1]` on `H_o ⊕ H_c` over the given sections, with
/// the cross block multiplied by `cross_scale` (1 for the true operator).
pub fn block_gram(
    phi: &StateSpaceSchur,
    o_points: &[(Complex64, CVector)],
    c_points: &[(Complex64, CVector)],
    cross_scale: f64,
) -> Result<CMatrix> {
    let (no, nc) = (o_points.len(), c_points.len());
    let mut g = CMatrix::zeros(no + nc, no + nc);
    for (i, (li, gi)) in o_points.iter().enumerate() {
        for (k, (lk, gk)) in o_points.iter().enumerate() {
            g[(i, k)] = (gi.adjoint() * k_o(phi, *li, *lk)? * gk)[(0, 0)];
        }
    }
    for (j, (lj, nj)) in c_points.iter().enumerate() {
        for (l, (ll, nl)) in c_points.iter().enumerate() {
            g[(no + j, no + l)] = (nj.adjoint() * k_c(phi, *lj, *ll)? * nl)[(0, 0)];
        }
    }
    let x = cross_gram(phi, o_points, c_points)? * Complex64::new(cross_scale, 0.0);
    g.view_mut((0, no), (no, nc)).copy_from(&x);
    g.view_mut((no, 0), (nc, no)).copy_from(&x.adjoint());
    Ok(g)
}

/// `Γ` is a contraction iff `[1, Γ; Γ*, 1] ≥ 0`; checked on the sampled sections.
pub fn contractivity_check(
    phi: &StateSpaceSchur,
    o_points: &[(Complex64, CVector)],
    c_points: &[(Complex64, CVector)],
    postol: f64,
) -> Result<Report> {
    let g = block_gram(phi, o_points, c_points, 1.0)?;
    Ok(psd_report("gamma_contractivity", &g, postol))
}

/// `⟨Γ k_c, k_o⟩_{H_o} = ⟨k_c, Γ* k_o⟩_{H_c}` for every pair of sampled sections,
/// evaluating each side through its own formula.
pub fn duality_check(
    phi: &StateSpaceSchur,
    o_points: &[(Complex64, CVector)],
    c_points: &[(Complex64, CVector)],
    tol: f64,
) -> Result<Report> {
    let mut worst: f64 = 0.0;
    for (l, gamma) in o_points {
        let adj = gamma_adj_apply(phi, l.conj(), gamma.clone())?;
        for (ls, nu) in c_points {
            let fwd = gamma_apply(phi, ls.conj(), nu.clone())?;
            let lhs = (gamma.adjoint() * fwd.eval(phi, *l)?)[(0, 0)];
            let rhs = (nu.adjoint() * adj.eval(phi, *ls)?)[(0, 0)].conj();
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(Report::from_residual("gamma_duality", worst, tol))
}

/// Pointwise identity `φ(μ)(−ν)/(μ − λ*) = Γ-image(μ) − φ(λ*)ν/(μ − λ*)`,
/// comparing the direct ratio with the state-space difference quotient. Probes
/// where the realization is singular are skipped and counted.
pub fn hankel_identity_check(
    phi: &StateSpaceSchur,
    lambda_star: Complex64,
    nu: &CVector,
    probes: &[Complex64],
    tol: f64,
) -> Result<Report> {
    let g = gamma_apply(phi, lambda_star, nu.clone())?;
    let phi_ls = phi.eval(lambda_star)?;
    let mut worst: f64 = 0.0;
    let mut skipped = 0usize;
    for &mu in probes {
        let gap = mu - lambda_star;
        if gap.norm() < 1e-6 {
            skipped += 1;
            continue;
        }
        let (Ok(phi_mu), Ok(gv)) = (phi.eval(mu), g.eval(phi, mu)) else {
            skipped += 1;
            continue;
        };
        let lhs = -(phi_mu * nu) / gap;
        let rhs = gv - (&phi_ls * nu) / gap;
        let scale = 1f64.max(linalg::vec_norm(&lhs));
        worst = worst.max(linalg::vec_diff(&lhs, &rhs) / scale);
    }
    Ok(Report::from_residual("hankel_identity", worst, tol)
        .with_detail("probes", probes.len() as f64)
        .with_detail("skipped", skipped as f64))
}
