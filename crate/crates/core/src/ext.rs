//! The extrapolation space `H_{s,−1}` rigged at `β`.
//!
//! An element is stored through a representative function
//! `x + [μa₁(μ); −μ*a₂(μ*)] + [φ(μ); 1]u + [1; φ̃(μ*)]γ₀`, i.e.
//! `x + A_{s,−1}a + B_s u` plus an element of the quotient kernel
//! `Z_s = {[1; φ̃(μ*)]γ}`. The norm is `‖R_β e‖_{H_s}`, and the β-normalized
//! representative is the one whose first component vanishes at `β`.

use num_complex::Complex64;

use crate::kernel::{k_ext, KernelPoint};
use crate::linalg::{self, c, vec_diff, vec_norm};
use crate::model::{apply, control_section, resolvent, resolvent_pointwise};
use crate::report::Report;
use crate::schur::StateSpaceSchur;
use crate::span::{evaluate, gram_of, inner, norm, Section, SpanElement};
use crate::{CMatrix, CVector, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtElement {
    pub beta: Complex64,
    /// Component already in `H_s`.
    pub base: SpanElement,
    /// `a` in the `A_{s,−1}a` term.
    pub shifted: SpanElement,
    /// `u` in the `B_s u` term.
    pub input: CVector,
    /// `γ₀` of the `Z_s` term.
    pub zs: CVector,
}

fn check_beta(beta: Complex64) -> Result<()> {
    if beta.re > 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain(
            beta,
            "rigging parameter needs Re β > 0",
        ))
    }
}

impl ExtElement {
    pub fn zero(phi: &StateSpaceSchur, beta: Complex64) -> Result<Self> {
        check_beta(beta)?;
        Ok(ExtElement {
            beta,
            base: SpanElement::zero(),
            shifted: SpanElement::zero(),
            input: CVector::zeros(phi.inputs()),
            zs: CVector::zeros(phi.outputs()),
        })
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.beta != other.beta {
            return Err(Error::Invalid(
                "extrapolation elements rigged at different β".into(),
            ));
        }
        Ok(ExtElement {
            beta: self.beta,
            base: self.base.plus(&other.base),
            shifted: self.shifted.plus(&other.shifted),
            input: &self.input + &other.input,
            zs: &self.zs + &other.zs,
        })
    }

    /// Value of the stored representative at `(μ, μ*)`.
    pub fn value(&self, phi: &StateSpaceSchur, at: KernelPoint) -> Result<CVector> {
        let p = phi.outputs();
        let (mu, mus) = (at.lambda, at.lambda_star);
        let x = evaluate(phi, &self.base, at)?;
        let a = evaluate(phi, &self.shifted, at)?;
        let top = x.rows(0, p) + a.rows(0, p) * mu + phi.eval(mu)? * &self.input + &self.zs;
        let bottom = x.rows(p, phi.inputs()) - a.rows(p, phi.inputs()) * mus
            + &self.input
            + phi.eval(mus.conj())?.adjoint() * &self.zs;
        Ok(linalg::stack_vec(&top, &bottom))
    }

    /// The same class with its representative normalized at `β`.
    pub fn normalized(&self, phi: &StateSpaceSchur) -> Result<Self> {
        let p = phi.outputs();
        let v = self.value(phi, KernelPoint::new(self.beta, self.beta)?)?;
        let mut out = self.clone();
        out.zs -= v.rows(0, p);
        Ok(out)
    }

    /// `R_α e = R_α x + (αR_α a − a) + (α − A_{s,−1})⁻¹B_s u`; the `Z_s` term maps to 0.
    pub fn resolvent(&self, phi: &StateSpaceSchur, alpha: Complex64) -> Result<SpanElement> {
        let rx = resolvent(phi, alpha, &self.base)?;
        let ra = resolvent(phi, alpha, &self.shifted)?;
        let ru = control_section(phi, alpha, &self.input)?;
        Ok(rx.plus(&ra.scaled(alpha)).minus(&self.shifted).plus(&ru))
    }
}

/// `ι^β x`: an `H_s` span viewed in `H_{s,−1}`.
pub fn iota(phi: &StateSpaceSchur, beta: Complex64, x: &SpanElement) -> Result<ExtElement> {
    let mut e = ExtElement::zero(phi, beta)?;
    e.base = x.clone();
    Ok(e)
}

/// `A_{s,−1}x`.
pub fn ext_apply_a(phi: &StateSpaceSchur, beta: Complex64, x: &SpanElement) -> Result<ExtElement> {
    let mut e = ExtElement::zero(phi, beta)?;
    e.shifted = x.clone();
    Ok(e)
}

/// `B_s u`.
pub fn ext_b(phi: &StateSpaceSchur, beta: Complex64, u: &CVector) -> Result<ExtElement> {
    if u.len() != phi.inputs() {
        return Err(Error::Dimension("u must have length m".into()));
    }
    let mut e = ExtElement::zero(phi, beta)?;
    e.input = u.clone();
    Ok(e)
}

/// `‖R_β e‖_{H_s}`.
pub fn ext_norm(phi: &StateSpaceSchur, e: &ExtElement) -> Result<f64> {
    norm(phi, &e.resolvent(phi, e.beta)?)
}

/// `⟨e, f⟩_{H_{s,−1}} = ⟨R_β e, R_β f⟩_{H_s}`.
pub fn ext_inner(phi: &StateSpaceSchur, e: &ExtElement, f: &ExtElement) -> Result<Complex64> {
    if e.beta != f.beta {
        return Err(Error::Invalid(
            "extrapolation elements rigged at different β".into(),
        ));
    }
    inner(phi, &e.resolvent(phi, e.beta)?, &f.resolvent(phi, f.beta)?)
}

/// Kernel section `K_{s,−1}(·, P)v`, built as `(β − A_{s,−1})K_s(·, P)diag(β̄ − λ̄, β̄ + λ̄*)v`.
pub fn ext_kernel_section(
    phi: &StateSpaceSchur,
    beta: Complex64,
    at: KernelPoint,
    v: &CVector,
) -> Result<ExtElement> {
    let p = phi.outputs();
    let (l, ls) = (at.lambda, at.lambda_star);
    let gamma = v.rows(0, p) * (beta.conj() - l.conj());
    let nu = v.rows(p, phi.inputs()) * (beta.conj() + ls.conj());
    let k = SpanElement::single(Section::new(at, gamma, nu));
    let mut e = ExtElement::zero(phi, beta)?;
    e.base = k.scaled(beta);
    e.shifted = k.scaled(c(-1.0, 0.0));
    Ok(e)
}

/// Largest pointwise gap between the closed-form `R_α e` and the defining
/// resolvent formula applied to the representative of `e`.
pub fn ext_resolvent_residual(
    phi: &StateSpaceSchur,
    e: &ExtElement,
    alpha: Complex64,
    probes: &[KernelPoint],
) -> Result<f64> {
    let r = e.resolvent(phi, alpha)?;
    let mut worst: f64 = 0.0;
    for &pt in probes {
        let closed = evaluate(phi, &r, pt)?;
        let formula = resolvent_pointwise(phi, alpha, |q| e.value(phi, q), pt)?;
        worst = worst.max(vec_diff(&closed, &formula) / (1.0 + vec_norm(&formula)));
    }
    Ok(worst)
}

/// For a domain span `x` with input `u`: the normalized class of `A_{s,−1}x + B_s u`
/// agrees pointwise with the normalized model image `z`.
pub fn ext_domain_residual(
    phi: &StateSpaceSchur,
    beta: Complex64,
    x: &SpanElement,
    probes: &[KernelPoint],
) -> Result<f64> {
    let pair = apply(phi, x)?;
    let e = ext_apply_a(phi, beta, x)?
        .plus(&ext_b(phi, beta, &pair.u)?)?
        .normalized(phi)?;
    let z = iota(phi, beta, &pair.z)?.normalized(phi)?;
    let mut worst: f64 = 0.0;
    for &pt in probes {
        let a = e.value(phi, pt)?;
        let b = z.value(phi, pt)?;
        worst = worst.max(vec_diff(&a, &b) / (1.0 + vec_norm(&b)));
    }
    Ok(worst)
}

/// Kernel consistency of `H_{s,−1}`: over the given points and vectors,
/// the Gram of the kernel sections equals the `K_{s,−1}` values, their
/// normalized representatives evaluate to the kernel columns, and
/// `B_s u = K_{s,−1}(·, (β, β̄))[0; u]/(2Re β)` pointwise.
pub fn ext_kernel_check(
    phi: &StateSpaceSchur,
    beta: Complex64,
    basis: &[(KernelPoint, CVector)],
    inputs: &[CVector],
    tol: f64,
) -> Result<Report> {
    let sections: Vec<ExtElement> = basis
        .iter()
        .map(|(pt, v)| ext_kernel_section(phi, beta, *pt, v))
        .collect::<Result<_>>()?;
    let resolved: Vec<SpanElement> = sections
        .iter()
        .map(|e| e.resolvent(phi, beta))
        .collect::<Result<_>>()?;
    let g = gram_of(phi, &resolved)?;
    let n = basis.len();
    let mut kernel = CMatrix::zeros(n, n);
    let mut scale: f64 = 1.0;
    for i in 0..n {
        for j in 0..n {
            let (pi, vi) = &basis[i];
            let (pj, vj) = &basis[j];
            kernel[(i, j)] = (vi.adjoint() * k_ext(phi, beta, *pi, *pj)?.to_matrix() * vj)[(0, 0)];
            scale = scale.max(kernel[(i, j)].norm());
        }
    }
    let gram_gap = linalg::frobenius(&(&g - &kernel)) / scale;

    let mut value_gap: f64 = 0.0;
    for (e, (pt, v)) in sections.iter().zip(basis) {
        let e = e.normalized(phi)?;
        for (q, _) in basis {
            let col = k_ext(phi, beta, *q, *pt)?.to_matrix() * v;
            value_gap = value_gap.max(vec_diff(&e.value(phi, *q)?, &col) / (1.0 + vec_norm(&col)));
        }
    }

    let p = phi.outputs();
    let rig = KernelPoint::new(beta, beta.conj())?;
    let mut b_gap: f64 = 0.0;
    for u in inputs {
        let e = ext_b(phi, beta, u)?.normalized(phi)?;
        let v = linalg::stack_vec(&CVector::zeros(p), u);
        for (q, _) in basis {
            let col = k_ext(phi, beta, *q, rig)?.to_matrix() * &v * c(0.5 / beta.re, 0.0);
            b_gap = b_gap.max(vec_diff(&e.value(phi, *q)?, &col) / (1.0 + vec_norm(&col)));
        }
    }
    Ok(
        Report::from_residual("ext_kernel", gram_gap.max(value_gap).max(b_gap), tol)
            .with_detail("gram_gap", gram_gap)
            .with_detail("value_gap", value_gap)
            .with_detail("b_section_gap", b_gap),
    )
}

/// `‖ι^β x‖_{−1} ≤ ‖x‖/Re β` on each span, the continuity of the embedding.
pub fn iota_bound_check(
    phi: &StateSpaceSchur,
    beta: Complex64,
    spans: &[SpanElement],
) -> Result<Report> {
    let mut excess: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    for x in spans {
        let nx = norm(phi, x)?;
        let ne = ext_norm(phi, &iota(phi, beta, x)?)?;
        let bound = nx / beta.re;
        excess = excess.max(ne - bound * (1.0 + 1e-9) - 1e-14);
        if nx > 0.0 {
            ratio = ratio.max(ne / bound);
        }
    }
    Ok(Report::from_residual("iota_bound", excess.max(0.0), 0.0).with_detail("max_ratio", ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;
    use crate::schur::make_conservative;

    fn one(v: f64) -> CVector {
        CVector::from_element(1, c(v, 0.0))
    }

    #[test]
    fn blaschke_b_norm() {
        let b = StateSpaceSchur::blaschke();
        let e = ext_b(&b, c(1.0, 0.0), &one(1.0)).unwrap();
        assert!((ext_norm(&b, &e).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            ext_norm(&b, &ExtElement::zero(&b, c(1.0, 0.0)).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn blaschke_resolvent_of_b_is_control_section() {
        let b = StateSpaceSchur::blaschke();
        let alpha = c(2.0, 0.5);
        let r = ext_b(&b, c(1.0, 0.0), &one(1.0))
            .unwrap()
            .resolvent(&b, alpha)
            .unwrap();
        let mut s = Sampler::new(2);
        for _ in 0..5 {
            let pt = s.kernel_point();
            let v = evaluate(&b, &r, pt).unwrap();
            let w = crate::model::control_section_values(&b, alpha, &one(1.0), pt).unwrap();
            assert!(vec_diff(&v, &w) < 1e-12);
        }
    }

    #[test]
    fn normalization_zeroes_first_component_at_beta() {
        let phi = make_conservative(2, 2, 4).unwrap().schur().clone();
        let mut s = Sampler::new(8);
        let beta = c(1.1, 0.4);
        let mut e = ext_apply_a(&phi, beta, &s.span(2, 2, 3)).unwrap();
        e = e.plus(&ext_b(&phi, beta, &s.cvector(2)).unwrap()).unwrap();
        let v = e
            .normalized(&phi)
            .unwrap()
            .value(&phi, KernelPoint::new(beta, c(0.7, 0.1)).unwrap())
            .unwrap();
        assert!(vec_norm(&v.rows(0, 2).into_owned()) < 1e-12);
    }

    #[test]
    fn extension_resolvent_two_routes() {
        let phi = make_conservative(3, 1, 6).unwrap().schur().clone();
        let mut s = Sampler::new(9);
        let beta = c(0.8, -0.2);
        for _ in 0..4 {
            let e = ext_apply_a(&phi, beta, &s.span(1, 1, 3))
                .unwrap()
                .plus(&ext_b(&phi, beta, &s.cvector(1)).unwrap())
                .unwrap()
                .plus(&iota(&phi, beta, &s.span(1, 1, 2)).unwrap())
                .unwrap();
            let probes: Vec<_> = (0..4).map(|_| s.kernel_point()).collect();
            let alpha = s.half_plane_point();
            assert!(ext_resolvent_residual(&phi, &e, alpha, &probes).unwrap() < 1e-10);
        }
    }

    #[test]
    fn domain_image_matches_model() {
        let phi = make_conservative(2, 2, 3)
            .unwrap()
            .schur()
            .scale_outputs(0.7);
        let mut s = Sampler::new(10);
        let probes: Vec<_> = (0..4).map(|_| s.kernel_point()).collect();
        for _ in 0..4 {
            assert!(
                ext_domain_residual(&phi, c(1.0, 0.3), &s.span(2, 2, 3), &probes).unwrap() < 1e-10
            );
        }
    }

    #[test]
    fn kernel_sections_reproduce() {
        let phi = make_conservative(2, 1, 11).unwrap().schur().clone();
        let mut s = Sampler::new(11);
        let basis: Vec<_> = (0..5).map(|_| (s.kernel_point(), s.cvector(2))).collect();
        let inputs: Vec<_> = (0..2).map(|_| s.cvector(1)).collect();
        let r = ext_kernel_check(&phi, c(1.3, 0.2), &basis, &inputs, 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn embedding_is_bounded() {
        let phi = make_conservative(2, 1, 12).unwrap().schur().clone();
        let mut s = Sampler::new(12);
        let spans: Vec<_> = (0..8).map(|_| s.span(1, 1, 3)).collect();
        assert!(iota_bound_check(&phi, c(0.6, 1.0), &spans).unwrap().pass);
    }
}
