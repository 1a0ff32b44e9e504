//! Reproducing kernels: `K_o`, `K_c`, the block kernel `K_s`, its extrapolation
//! variant and the disk kernel of a Cayley-transformed function.
//!
//! Off-diagonal blocks are difference quotients and are always evaluated in
//! state-space form, so coincident points need no special casing.

use num_complex::Complex64;

use crate::linalg::{frobenius, identity};
use crate::report::Report;
use crate::schur::{DiskSchur, StateSpaceSchur};
use crate::{CMatrix, Error, Result};

/// Point `(λ, λ*)` of `C₊ × C₊`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPoint {
    pub lambda: Complex64,
    pub lambda_star: Complex64,
}

impl KernelPoint {
    pub fn new(lambda: Complex64, lambda_star: Complex64) -> Result<Self> {
        for z in [lambda, lambda_star] {
            if z.re.is_nan() || z.re <= 0.0 || !z.im.is_finite() || !z.re.is_finite() {
                return Err(Error::OutsideDomain(z, "kernel points need Re > 0"));
            }
        }
        Ok(KernelPoint {
            lambda,
            lambda_star,
        })
    }

    /// `(λ, λ)`.
    pub fn diagonal(lambda: Complex64) -> Result<Self> {
        Self::new(lambda, lambda)
    }
}

/// Kernel value split into its `p × p`, `p × m`, `m × p` and `m × m` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelBlock {
    pub k11: CMatrix,
    pub k12: CMatrix,
    pub k21: CMatrix,
    pub k22: CMatrix,
}

impl KernelBlock {
    pub fn to_matrix(&self) -> CMatrix {
        let (p, m) = (self.k11.nrows(), self.k22.nrows());
        let mut out = CMatrix::zeros(p + m, p + m);
        out.view_mut((0, 0), (p, p)).copy_from(&self.k11);
        out.view_mut((0, p), (p, m)).copy_from(&self.k12);
        out.view_mut((p, 0), (m, p)).copy_from(&self.k21);
        out.view_mut((p, p), (m, m)).copy_from(&self.k22);
        out
    }

    pub fn from_matrix(full: &CMatrix, p: usize) -> Self {
        let m = full.nrows() - p;
        KernelBlock {
            k11: full.view((0, 0), (p, p)).into_owned(),
            k12: full.view((0, p), (p, m)).into_owned(),
            k21: full.view((p, 0), (m, p)).into_owned(),
            k22: full.view((p, p), (m, m)).into_owned(),
        }
    }
}

/// Everything `K_s(·, ·)` needs from one point, in either argument slot.
#[derive(Clone, Debug)]
pub(crate) struct PointData {
    pub pt: KernelPoint,
    /// `φ(λ)`.
    pub phi_l: CMatrix,
    /// `φ(λ̄*)`.
    pub phi_sc: CMatrix,
    /// `C(λ − A)⁻¹`.
    pub h: CMatrix,
    /// `(λ̄* − A)⁻¹B`.
    pub rb: CMatrix,
}

impl PointData {
    pub fn new(phi: &StateSpaceSchur, pt: KernelPoint) -> Result<Self> {
        let sc = pt.lambda_star.conj();
        let h = phi.c_resolvent(pt.lambda)?;
        let rb = phi.resolvent_b(sc)?;
        let phi_l = &phi.d + &h * &phi.b;
        let phi_sc = &phi.d + &phi.c * &rb;
        Ok(PointData {
            pt,
            phi_l,
            phi_sc,
            h,
            rb,
        })
    }
}

/// `K_s(row, col)` from cached point data.
pub(crate) fn block_from_data(row: &PointData, col: &PointData) -> KernelBlock {
    let (p, m) = row.phi_l.shape();
    let (mu, mus) = (row.pt.lambda, row.pt.lambda_star);
    let (la, las) = (col.pt.lambda, col.pt.lambda_star);
    KernelBlock {
        k11: (identity(p) - &row.phi_l * col.phi_l.adjoint()) / (mu + la.conj()),
        k12: &row.h * &col.rb,
        k21: (&col.h * &row.rb).adjoint(),
        k22: (identity(m) - row.phi_sc.adjoint() * &col.phi_sc) / (mus + las.conj()),
    }
}

/// `K_o(μ, λ) = (1 − φ(μ)φ(λ)*)/(μ + λ̄)`.
pub fn k_o(phi: &StateSpaceSchur, mu: Complex64, lambda: Complex64) -> Result<CMatrix> {
    for z in [mu, lambda] {
        if z.re.is_nan() || z.re <= 0.0 {
            return Err(Error::OutsideDomain(z, "kernel points need Re > 0"));
        }
    }
    let p = phi.outputs();
    Ok((identity(p) - phi.eval(mu)? * phi.eval(lambda)?.adjoint()) / (mu + lambda.conj()))
}

/// `K_c(μ*, λ*)`: the `K_o` kernel of `φ̃`.
pub fn k_c(phi: &StateSpaceSchur, mu_star: Complex64, lambda_star: Complex64) -> Result<CMatrix> {
    k_o(&phi.tilde(), mu_star, lambda_star)
}

/// Block kernel `K_s((μ, μ*), (λ, λ*))`.
pub fn k_s(phi: &StateSpaceSchur, mu: KernelPoint, lambda: KernelPoint) -> Result<KernelBlock> {
    let row = PointData::new(phi, mu)?;
    let col = PointData::new(phi, lambda)?;
    Ok(block_from_data(&row, &col))
}

/// Stacked observation/control factor `[C(μ − A)⁻¹; B*(μ* − A*)⁻¹]`.
pub fn factor(phi: &StateSpaceSchur, pt: KernelPoint) -> Result<CMatrix> {
    let h = phi.c_resolvent(pt.lambda)?;
    let g = phi.resolvent_b(pt.lambda_star.conj())?.adjoint();
    let (p, m, n) = (h.nrows(), g.nrows(), phi.n());
    let mut out = CMatrix::zeros(p + m, n);
    out.view_mut((0, 0), (p, n)).copy_from(&h);
    out.view_mut((p, 0), (m, n)).copy_from(&g);
    Ok(out)
}

/// `K_s` assembled from the realization as `F(μ, μ*) F(λ, λ*)*`; equal to
/// [`k_s`] exactly when the realization is conservative.
pub fn k_s_factored(
    phi: &StateSpaceSchur,
    mu: KernelPoint,
    lambda: KernelPoint,
) -> Result<KernelBlock> {
    let full = factor(phi, mu)? * factor(phi, lambda)?.adjoint();
    Ok(KernelBlock::from_matrix(&full, phi.outputs()))
}

/// Largest `‖K_s − F F*‖_F` over all ordered pairs of `points`.
pub fn kolmogorov_residual(
    phi: &StateSpaceSchur,
    points: &[KernelPoint],
    tol: f64,
) -> Result<Report> {
    let data: Vec<PointData> = points
        .iter()
        .map(|&p| PointData::new(phi, p))
        .collect::<Result<_>>()?;
    let factors: Vec<CMatrix> = points
        .iter()
        .map(|&p| factor(phi, p))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, row) in data.iter().enumerate() {
        for (j, col) in data.iter().enumerate() {
            let ratio = block_from_data(row, col).to_matrix();
            let fact = &factors[i] * factors[j].adjoint();
            worst = worst.max(frobenius(&(ratio - fact)));
        }
    }
    Ok(
        Report::from_residual("kolmogorov_factorization", worst, tol)
            .with_detail("points", points.len() as f64),
    )
}

/// Extrapolation kernel `diag(β − μ, β + μ*) K_s diag(β̄ − λ̄, β̄ + λ̄*)`.
pub fn k_ext(
    phi: &StateSpaceSchur,
    beta: Complex64,
    mu: KernelPoint,
    lambda: KernelPoint,
) -> Result<KernelBlock> {
    let k = k_s(phi, mu, lambda)?;
    let (r1, r2) = (beta - mu.lambda, beta + mu.lambda_star);
    let (c1, c2) = (
        (beta - lambda.lambda).conj(),
        (beta + lambda.lambda_star).conj(),
    );
    Ok(KernelBlock {
        k11: k.k11 * (r1 * c1),
        k12: k.k12 * (r1 * c2),
        k21: k.k21 * (r2 * c1),
        k22: k.k22 * (r2 * c2),
    })
}

/// Per-point data for the disk kernel.
#[derive(Clone, Debug)]
pub(crate) struct DiskPointData {
    pub w: Complex64,
    /// `ϕ(w)`.
    pub phi_w: CMatrix,
    /// `ϕ(w̄)`.
    pub phi_wc: CMatrix,
    /// `C(1 − wA)⁻¹`.
    pub h: CMatrix,
    /// `(1 − w̄A)⁻¹B`.
    pub rb: CMatrix,
}

impl DiskPointData {
    pub fn new(phi: &DiskSchur, w: Complex64) -> Result<Self> {
        if w.norm().is_nan() || w.norm() >= 1.0 {
            return Err(Error::OutsideDomain(w, "disk points need |w| < 1"));
        }
        let h = phi.c_resolvent(w)?;
        let rb = phi.resolvent_b(w.conj())?;
        let phi_w = &phi.d + (&h * &phi.b) * w;
        let phi_wc = &phi.d + (&phi.c * &rb) * w.conj();
        Ok(DiskPointData {
            w,
            phi_w,
            phi_wc,
            h,
            rb,
        })
    }
}

pub(crate) fn disk_block_from_data(row: &DiskPointData, col: &DiskPointData) -> KernelBlock {
    let (p, m) = row.phi_w.shape();
    let denom = Complex64::new(1.0, 0.0) - row.w * col.w.conj();
    KernelBlock {
        k11: (identity(p) - &row.phi_w * col.phi_w.adjoint()) / denom,
        k12: &row.h * &col.rb,
        k21: (&col.h * &row.rb).adjoint(),
        k22: (identity(m) - row.phi_wc.adjoint() * &col.phi_wc) / denom,
    }
}

/// Disk block kernel of `ϕ`:
/// `[(1 − ϕ(z)ϕ(w)*)/(1 − zw̄), (ϕ(z) − ϕ(w̄))/(z − w̄); (ϕ(z̄)* − ϕ(w)*)/(z − w̄), (1 − ϕ(z̄)*ϕ(w̄))/(1 − zw̄)]`.
pub fn k_disk(phi: &DiskSchur, z: Complex64, w: Complex64) -> Result<KernelBlock> {
    let row = DiskPointData::new(phi, z)?;
    let col = DiskPointData::new(phi, w)?;
    Ok(disk_block_from_data(&row, &col))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, rel_diff};
    use crate::schur::make_conservative;

    fn ones() -> KernelPoint {
        KernelPoint::diagonal(c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn blaschke_all_ones() {
        let k = k_s(&StateSpaceSchur::blaschke(), ones(), ones())
            .unwrap()
            .to_matrix();
        let want = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(rel_diff(&k, &want) < 1e-15);
    }

    /// Independent closed form: every block of the Blaschke kernel is `±2/((a+1)(b̄+1))`.
    #[test]
    fn blaschke_closed_form_blocks() {
        let b = StateSpaceSchur::blaschke();
        let f = |a: Complex64, bb: Complex64| 2.0 / ((a + 1.0) * (bb.conj() + 1.0));
        let p = KernelPoint::new(c(0.4, 1.2), c(2.0, -0.3)).unwrap();
        let q = KernelPoint::new(c(1.5, -0.8), c(0.7, 0.0)).unwrap();
        let k = k_s(&b, p, q).unwrap();
        assert!((k.k11[(0, 0)] - f(p.lambda, q.lambda)).norm() < 1e-15);
        assert!((k.k12[(0, 0)] + f(p.lambda, q.lambda_star)).norm() < 1e-15);
        assert!((k.k21[(0, 0)] + f(p.lambda_star, q.lambda)).norm() < 1e-15);
        assert!((k.k22[(0, 0)] - f(p.lambda_star, q.lambda_star)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_blocks_match_scalar_kernels() {
        let phi = make_conservative(3, 2, 4).unwrap().schur().clone();
        let p = KernelPoint::new(c(0.4, 1.2), c(2.0, -0.3)).unwrap();
        let q = KernelPoint::new(c(1.5, -0.8), c(0.7, 0.1)).unwrap();
        let k = k_s(&phi, p, q).unwrap();
        assert!(rel_diff(&k.k11, &k_o(&phi, p.lambda, q.lambda).unwrap()) < 1e-14);
        assert!(rel_diff(&k.k22, &k_c(&phi, p.lambda_star, q.lambda_star).unwrap()) < 1e-14);
        // Ratio form of the cross block away from the removable singularity.
        let ratio = (phi.eval(q.lambda_star.conj()).unwrap() - phi.eval(p.lambda).unwrap())
            / (p.lambda - q.lambda_star.conj());
        assert!(rel_diff(&k.k12, &ratio) < 1e-13);
    }

    #[test]
    fn kernel_is_hermitian() {
        let phi = make_conservative(2, 2, 8)
            .unwrap()
            .schur()
            .scale_outputs(0.7);
        let p = KernelPoint::new(c(0.4, 1.2), c(2.0, -0.3)).unwrap();
        let q = KernelPoint::new(c(1.5, -0.8), c(0.7, 0.1)).unwrap();
        let kpq = k_s(&phi, p, q).unwrap().to_matrix();
        let kqp = k_s(&phi, q, p).unwrap().to_matrix();
        assert!(rel_diff(&kpq, &kqp.adjoint()) < 1e-14);
    }

    #[test]
    fn ext_kernel_at_beta_one() {
        let k = k_ext(&StateSpaceSchur::blaschke(), c(1.0, 0.0), ones(), ones())
            .unwrap()
            .to_matrix();
        let want =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        assert!(rel_diff(&k, &want) < 1e-15);
    }

    #[test]
    fn factorization_needs_conservative_realization() {
        let b = StateSpaceSchur::blaschke();
        assert!(kolmogorov_residual(&b, &[ones()], 1e-10).unwrap().pass);
        let half = b.scale_outputs(0.5);
        let r = kolmogorov_residual(&half, &[ones()], 1e-10).unwrap();
        // Ratio form gives 1/2 in the (1,1) block, factored form 1/8.
        assert!(r.residual > 0.375 - 1e-12);
    }

    #[test]
    fn disk_kernel_of_minus_z() {
        let phi = DiskSchur::cayley(&StateSpaceSchur::blaschke(), c(1.0, 0.0)).unwrap();
        let k = k_disk(&phi, c(0.2, 0.1), c(-0.4, 0.3)).unwrap();
        assert!((k.k11[(0, 0)] - 1.0).norm() < 1e-15);
        assert!((k.k12[(0, 0)] + 1.0).norm() < 1e-15);
        assert!((k.k22[(0, 0)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn points_outside_half_plane_rejected() {
        assert!(KernelPoint::new(c(-0.1, 0.0), c(1.0, 0.0)).is_err());
        assert!(KernelPoint::new(c(1.0, 0.0), c(0.0, 1.0)).is_err());
    }
}
