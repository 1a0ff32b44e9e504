//! Finite spans of kernel sections in `H_s`.
//!
//! A [`Section`] at `(λ, λ*)` with coefficient `[γ; ν]` is the function
//! `K_s(·, (λ, λ*))[γ; ν]`. A [`ControlDerivative`] at `λ*` is
//! `−∂/∂λ̄* K_s(·, (·, λ*))[0; ν]`, which is what the resolvent produces when its
//! parameter coincides with `λ̄*`. Inner products follow from the reproducing
//! property: `⟨K_s(·,P)v, K_s(·,Q)w⟩ = w* K_s(Q, P) v`, linear in the first slot.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::kernel::{block_from_data, k_c, k_o, KernelPoint, PointData};
use crate::linalg::{self, identity, rel_diff, stack_vec};
use crate::report::Report;
use crate::schur::StateSpaceSchur;
use crate::{CMatrix, CVector, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub point: KernelPoint,
    pub gamma: CVector,
    pub nu: CVector,
}

impl Section {
    pub fn new(point: KernelPoint, gamma: CVector, nu: CVector) -> Self {
        Section { point, gamma, nu }
    }

    /// Stacked coefficient `[γ; ν]`.
    pub fn coefficient(&self) -> CVector {
        stack_vec(&self.gamma, &self.nu)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Section {
            point: self.point,
            gamma: &self.gamma * s,
            nu: &self.nu * s,
        }
    }
}

/// `−∂/∂λ̄* K_s(·, (·, λ*))[0; ν]`, equivalently `(λ̄* − A_{s,−1})⁻² B_s ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlDerivative {
    pub lambda_star: Complex64,
    pub nu: CVector,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpanElement {
    pub sections: Vec<Section>,
    pub derivatives: Vec<ControlDerivative>,
}

impl SpanElement {
    pub fn zero() -> Self {
        SpanElement::default()
    }

    pub fn from_sections(sections: Vec<Section>) -> Self {
        SpanElement {
            sections,
            derivatives: Vec::new(),
        }
    }

    pub fn single(section: Section) -> Self {
        Self::from_sections(vec![section])
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty() && self.derivatives.is_empty()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        SpanElement {
            sections: self.sections.iter().map(|t| t.scaled(s)).collect(),
            derivatives: self
                .derivatives
                .iter()
                .map(|d| ControlDerivative {
                    lambda_star: d.lambda_star,
                    nu: &d.nu * s,
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sections.extend(other.sections.iter().cloned());
        out.derivatives.extend(other.derivatives.iter().cloned());
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn check_dims(&self, p: usize, m: usize) -> Result<()> {
        let bad_section = self
            .sections
            .iter()
            .any(|s| s.gamma.len() != p || s.nu.len() != m);
        let bad_deriv = self.derivatives.iter().any(|d| d.nu.len() != m);
        if bad_section || bad_deriv {
            return Err(Error::Dimension(format!(
                "span coefficients must have lengths p = {p}, m = {m}"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<Vec<SectionJson>> {
        if !self.derivatives.is_empty() {
            return Err(Error::Invalid(
                "derivative terms have no section serialization".into(),
            ));
        }
        Ok(self
            .sections
            .iter()
            .map(SectionJson::from_section)
            .collect())
    }

    pub fn from_json(items: &[SectionJson]) -> Result<Self> {
        Ok(Self::from_sections(
            items
                .iter()
                .map(SectionJson::to_section)
                .collect::<Result<_>>()?,
        ))
    }
}

/// Serialized section: points and coefficients as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionJson {
    pub lambda: [f64; 2],
    pub lambda_star: [f64; 2],
    pub gamma: Vec<[f64; 2]>,
    pub nu: Vec<[f64; 2]>,
}

impl SectionJson {
    pub fn from_section(s: &Section) -> Self {
        let pair = |z: Complex64| [z.re, z.im];
        SectionJson {
            lambda: pair(s.point.lambda),
            lambda_star: pair(s.point.lambda_star),
            gamma: s.gamma.iter().map(|&z| pair(z)).collect(),
            nu: s.nu.iter().map(|&z| pair(z)).collect(),
        }
    }

    pub fn to_section(&self) -> Result<Section> {
        let z = |a: [f64; 2]| Complex64::new(a[0], a[1]);
        let v = |xs: &[[f64; 2]]| CVector::from_iterator(xs.len(), xs.iter().map(|&a| z(a)));
        Ok(Section {
            point: KernelPoint::new(z(self.lambda), z(self.lambda_star))?,
            gamma: v(&self.gamma),
            nu: v(&self.nu),
        })
    }
}

/// Cached data for a derivative term at `λ*`, with `t = λ̄*`.
#[derive(Clone, Debug)]
struct DerivData {
    t: Complex64,
    /// `φ(t)`.
    phi_t: CMatrix,
    /// `φ'(t)`.
    dphi_t: CMatrix,
    /// `(t − A)⁻²B`.
    rb2: CMatrix,
}

impl DerivData {
    fn new(phi: &StateSpaceSchur, lambda_star: Complex64) -> Result<Self> {
        let t = lambda_star.conj();
        let rb = phi.resolvent_b(t)?;
        let rb2 = linalg::shifted_solve(&phi.a, t, &rb)?;
        Ok(DerivData {
            t,
            phi_t: &phi.d + &phi.c * &rb,
            dphi_t: -(&phi.c * &rb2),
            rb2,
        })
    }

    /// Value at `row` as a `(p + m) × m` matrix acting on `ν`.
    fn eval_at(&self, row: &PointData) -> CMatrix {
        let p = row.phi_l.nrows();
        let m = self.phi_t.ncols();
        let top = &row.h * &self.rb2;
        let s = row.pt.lambda_star + self.t;
        let a = row.phi_sc.adjoint();
        let bottom = (&a * &self.dphi_t * s + identity(m) - &a * &self.phi_t) / (s * s);
        let mut out = CMatrix::zeros(p + m, m);
        out.view_mut((0, 0), (p, m)).copy_from(&top);
        out.view_mut((p, 0), (m, m)).copy_from(&bottom);
        out
    }

    /// `∂_s ∂_t K₂₂(s, t)` at `s = row.λ*`, `t = col.t`; the Gram block `⟨col, row⟩`.
    fn mixed(row: &DerivData, col: &DerivData) -> CMatrix {
        let m = col.phi_t.ncols();
        let s = row.t.conj() + col.t;
        let a = row.phi_t.adjoint();
        let da = row.dphi_t.adjoint();
        let n = identity(m) - &a * &col.phi_t;
        let n_s = -(&da * &col.phi_t);
        let n_t = -(&a * &col.dphi_t);
        let n_st = -(&da * &col.dphi_t);
        n_st / s - (n_s + n_t) / (s * s) + n * (2.0 / (s * s * s))
    }
}

enum Term {
    Kernel(PointData, CVector),
    Deriv(DerivData, CVector),
}

/// Span with all per-point evaluations done once.
pub(crate) struct Prepared {
    terms: Vec<Term>,
}

impl Prepared {
    pub fn new(phi: &StateSpaceSchur, x: &SpanElement) -> Result<Self> {
        x.check_dims(phi.outputs(), phi.inputs())?;
        let mut terms = Vec::with_capacity(x.sections.len() + x.derivatives.len());
        for s in &x.sections {
            terms.push(Term::Kernel(PointData::new(phi, s.point)?, s.coefficient()));
        }
        for d in &x.derivatives {
            terms.push(Term::Deriv(
                DerivData::new(phi, d.lambda_star)?,
                d.nu.clone(),
            ));
        }
        Ok(Prepared { terms })
    }

    pub fn eval_data(&self, row: &PointData) -> CVector {
        let (p, m) = row.phi_l.shape();
        let mut out = CVector::zeros(p + m);
        for t in &self.terms {
            match t {
                Term::Kernel(col, v) => out += block_from_data(row, col).to_matrix() * v,
                Term::Deriv(d, nu) => out += d.eval_at(row) * nu,
            }
        }
        out
    }
}

fn term_inner(x: &Term, y: &Term) -> Complex64 {
    match (x, y) {
        (Term::Kernel(px, v), Term::Kernel(py, w)) => {
            (w.adjoint() * block_from_data(py, px).to_matrix() * v)[(0, 0)]
        }
        (Term::Deriv(d, nu), Term::Kernel(py, w)) => (w.adjoint() * d.eval_at(py) * nu)[(0, 0)],
        (Term::Kernel(px, v), Term::Deriv(d, nu)) => {
            (v.adjoint() * d.eval_at(px) * nu)[(0, 0)].conj()
        }
        (Term::Deriv(dx, nu), Term::Deriv(dy, nu2)) => {
            (nu2.adjoint() * DerivData::mixed(dy, dx) * nu)[(0, 0)]
        }
    }
}

pub(crate) fn inner_prepared(x: &Prepared, y: &Prepared) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for tx in &x.terms {
        for ty in &y.terms {
            acc += term_inner(tx, ty);
        }
    }
    acc
}

/// `⟨x, y⟩_{H_s}`, linear in `x`.
pub fn inner(phi: &StateSpaceSchur, x: &SpanElement, y: &SpanElement) -> Result<Complex64> {
    Ok(inner_prepared(
        &Prepared::new(phi, x)?,
        &Prepared::new(phi, y)?,
    ))
}

pub fn norm(phi: &StateSpaceSchur, x: &SpanElement) -> Result<f64> {
    Ok(inner(phi, x, x)?.re.max(0.0).sqrt())
}

/// Gram matrix `G` of many spans, `G[i][j] = ⟨x_j, x_i⟩`, so that
/// `⟨Σ c_j x_j, Σ d_i x_i⟩ = d* G c`.
pub fn gram_of(phi: &StateSpaceSchur, xs: &[SpanElement]) -> Result<CMatrix> {
    let prepared: Vec<Prepared> = xs
        .iter()
        .map(|x| Prepared::new(phi, x))
        .collect::<Result<_>>()?;
    let n = xs.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = inner_prepared(&prepared[j], &prepared[i]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Gram matrix of the sections `K_s(·, P_j) v_j`: `G[i][j] = v_i* K_s(P_i, P_j) v_j`.
pub fn gram(phi: &StateSpaceSchur, basis: &[(KernelPoint, CVector)]) -> Result<CMatrix> {
    let (p, m) = (phi.outputs(), phi.inputs());
    if basis.iter().any(|(_, v)| v.len() != p + m) {
        return Err(Error::Dimension(format!(
            "basis vectors must have length {}",
            p + m
        )));
    }
    let data: Vec<PointData> = basis
        .iter()
        .map(|(pt, _)| PointData::new(phi, *pt))
        .collect::<Result<_>>()?;
    let n = basis.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let k = block_from_data(&data[i], &data[j]).to_matrix();
            let v = (basis[i].1.adjoint() * k * &basis[j].1)[(0, 0)];
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// `x(μ, μ*)` as the stacked vector `[x₁(μ); x₂(μ*)]`.
pub fn evaluate(phi: &StateSpaceSchur, x: &SpanElement, at: KernelPoint) -> Result<CVector> {
    let prepared = Prepared::new(phi, x)?;
    Ok(prepared.eval_data(&PointData::new(phi, at)?))
}

/// Evaluations of `x` at several points, sharing the preparation of `x`.
pub fn evaluate_many(
    phi: &StateSpaceSchur,
    x: &SpanElement,
    at: &[KernelPoint],
) -> Result<Vec<CVector>> {
    let prepared = Prepared::new(phi, x)?;
    at.iter()
        .map(|&pt| Ok(prepared.eval_data(&PointData::new(phi, pt)?)))
        .collect()
}

/// PSD certificate: `λ_min ≥ −postol · max(1, λ_max)` for a Hermitian matrix.
/// The residual is the larger of the relative negativity and the relative
/// non-Hermitian part, so an asymmetric matrix also fails.
pub fn psd_report(name: &str, m: &CMatrix, postol: f64) -> Report {
    let ev = linalg::hermitian_eigenvalues(m);
    let lo = ev.first().copied().unwrap_or(0.0);
    let hi = ev.last().copied().unwrap_or(0.0);
    let scale = hi.max(1.0);
    let negativity = (-lo).max(0.0) / scale;
    let asym = linalg::frobenius(&(m - m.adjoint())) / linalg::frobenius(m).max(1.0);
    let residual = if asym > 1e-12 {
        negativity.max(asym)
    } else {
        negativity
    };
    Report::from_residual(name, residual, postol)
        .with_detail("min_eigenvalue", lo)
        .with_detail("max_eigenvalue", hi)
        .with_detail("asymmetry", asym)
        .with_detail("size", m.nrows() as f64)
}

pub fn positivity_check(
    phi: &StateSpaceSchur,
    basis: &[(KernelPoint, CVector)],
    postol: f64,
) -> Result<Report> {
    Ok(psd_report("gram_positivity", &gram(phi, basis)?, postol))
}

/// Section-level isometries: the Gram matrices of `[0; ν]` and `[γ; 0]` sections
/// in `H_s` agree with the `K_c` and `K_o` Grams, and the first component of a
/// `[0; ν]` section is the difference quotient `(φ(λ̄*) − φ(μ))/(μ − λ̄*) ν`.
pub fn isometry_sections_check(
    phi: &StateSpaceSchur,
    points: &[KernelPoint],
    tol: f64,
) -> Result<Report> {
    let (p, m) = (phi.outputs(), phi.inputs());
    let unit = |len: usize, k: usize, off: usize, total: usize| {
        let mut v = CVector::zeros(total);
        if k < len {
            v[off + k] = Complex64::new(1.0, 0.0);
        }
        v
    };
    let mut c_basis = Vec::new();
    let mut o_basis = Vec::new();
    for &pt in points {
        for k in 0..m {
            c_basis.push((pt, unit(m, k, p, p + m)));
        }
        for k in 0..p {
            o_basis.push((pt, unit(p, k, 0, p + m)));
        }
    }
    let gs_c = gram(phi, &c_basis)?;
    let gs_o = gram(phi, &o_basis)?;
    let block = |f: &dyn Fn(Complex64, Complex64) -> Result<CMatrix>,
                 star: bool,
                 dim: usize|
     -> Result<CMatrix> {
        let n = points.len();
        let mut g = CMatrix::zeros(n * dim, n * dim);
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                let (x, y) = if star {
                    (a.lambda_star, b.lambda_star)
                } else {
                    (a.lambda, b.lambda)
                };
                g.view_mut((i * dim, j * dim), (dim, dim))
                    .copy_from(&f(x, y)?);
            }
        }
        Ok(g)
    };
    let gc = block(&|x, y| k_c(phi, x, y), true, m)?;
    let go = block(&|x, y| k_o(phi, x, y), false, p)?;
    let mut pointwise: f64 = 0.0;
    for a in points {
        for b in points {
            let gap = b.lambda - a.lambda_star.conj();
            if gap.norm() < 1e-3 {
                continue;
            }
            let x = SpanElement::single(Section::new(
                *a,
                CVector::zeros(p),
                CVector::from_element(m, Complex64::new(1.0, 0.0)),
            ));
            let v = evaluate(phi, &x, *b)?;
            let ratio = (phi.eval(a.lambda_star.conj())? - phi.eval(b.lambda)?) / gap;
            let want = ratio * CVector::from_element(m, Complex64::new(1.0, 0.0));
            pointwise = pointwise.max(linalg::vec_diff(&v.rows(0, p).into_owned(), &want));
        }
    }
    let r_c = rel_diff(&gs_c, &gc);
    let r_o = rel_diff(&gs_o, &go);
    Ok(
        Report::from_residual("section_isometry", r_c.max(r_o).max(pointwise), tol)
            .with_detail("control_gram", r_c)
            .with_detail("observation_gram", r_o)
            .with_detail("gamma_pointwise", pointwise),
    )
}

/// `‖x_i(μ)‖ ≤ √2‖x‖/√(2 Re μ)` for both components at `μ = μ* = r`, within a
/// relative margin of `1e−9`.
pub fn decay_check(phi: &StateSpaceSchur, x: &SpanElement, real_parts: &[f64]) -> Result<Report> {
    let p = phi.outputs();
    let nx = norm(phi, x)?;
    let mut worst: f64 = 0.0;
    let mut excess: f64 = 0.0;
    for &r in real_parts {
        let v = evaluate(phi, x, KernelPoint::diagonal(Complex64::new(r, 0.0))?)?;
        let bound = std::f64::consts::SQRT_2 * nx / (2.0 * r).sqrt();
        for part in [
            v.rows(0, p).into_owned(),
            v.rows(p, v.len() - p).into_owned(),
        ] {
            let lhs = linalg::vec_norm(&part);
            if bound > 0.0 {
                worst = worst.max(lhs / bound);
            }
            excess = excess.max(lhs - bound * (1.0 + 1e-9));
        }
    }
    Ok(Report::from_residual("decay_bound", excess.max(0.0), 0.0)
        .with_detail("max_ratio", worst)
        .with_detail("norm", nx))
}

/// `|⟨x, K_s(·,P)v⟩ − v* x(P)|` over the given probes.
pub fn reproducing_residual(
    phi: &StateSpaceSchur,
    x: &SpanElement,
    probes: &[(KernelPoint, CVector)],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (pt, v) in probes {
        let (p, m) = (phi.outputs(), phi.inputs());
        let k = SpanElement::single(Section::new(
            *pt,
            v.rows(0, p).into_owned(),
            v.rows(p, m).into_owned(),
        ));
        let lhs = inner(phi, x, &k)?;
        let rhs = (v.adjoint() * evaluate(phi, x, *pt)?)[(0, 0)];
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Orthogonal projection onto the reachable part `R_s`, the closed span of
/// `[0; ν]` sections. Exposed only for inputs already in `R_s`, where it is the
/// identity; other inputs have no finite section representation of their image.
pub fn project_reachable(x: &SpanElement) -> Result<SpanElement> {
    if x.sections
        .iter()
        .all(|s| s.gamma.iter().all(|z| *z == Complex64::new(0.0, 0.0)))
    {
        Ok(x.clone())
    } else {
        Err(Error::DomainViolation(
            "projection onto R_s is finite only on [0; ν] sections".into(),
        ))
    }
}

/// Orthogonal projection onto `R_s†`, the closed span of `[γ; 0]` sections;
/// same restriction as [`project_reachable`].
pub fn project_coreachable(x: &SpanElement) -> Result<SpanElement> {
    let zero_nu = x
        .sections
        .iter()
        .all(|s| s.nu.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    if zero_nu && x.derivatives.is_empty() {
        Ok(x.clone())
    } else {
        Err(Error::DomainViolation(
            "projection onto R_s† is finite only on [γ; 0] sections".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::sampling::Sampler;
    use crate::schur::make_conservative;

    fn one_vec(v: f64) -> CVector {
        CVector::from_element(1, c(v, 0.0))
    }

    fn ones() -> KernelPoint {
        KernelPoint::diagonal(c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn blaschke_section_gram_and_values() {
        let b = StateSpaceSchur::blaschke();
        let x = SpanElement::single(Section::new(ones(), one_vec(1.0), one_vec(0.0)));
        assert!((inner(&b, &x, &x).unwrap() - 0.5).norm() < 1e-15);
        let v = evaluate(&b, &x, KernelPoint::diagonal(c(2.0, 0.0)).unwrap()).unwrap();
        // [1/(μ+1); −1/(μ*+1)] at μ = μ* = 2.
        assert!((v[0] - 1.0 / 3.0).norm() < 1e-15);
        assert!((v[1] + 1.0 / 3.0).norm() < 1e-15);
    }

    #[test]
    fn gram_and_inner_agree() {
        let phi = make_conservative(2, 1, 3).unwrap().schur().clone();
        let mut s = Sampler::new(2);
        let secs: Vec<Section> = (0..4).map(|_| s.section(1, 1)).collect();
        let basis: Vec<_> = secs.iter().map(|t| (t.point, t.coefficient())).collect();
        let g = gram(&phi, &basis).unwrap();
        let spans: Vec<SpanElement> = secs.into_iter().map(SpanElement::single).collect();
        let g2 = gram_of(&phi, &spans).unwrap();
        assert!(rel_diff(&g, &g2) < 1e-14);
    }

    #[test]
    fn blaschke_decay_examples() {
        let b = StateSpaceSchur::blaschke();
        let x = SpanElement::single(Section::new(ones(), one_vec(1.0), one_vec(0.0)));
        let r = decay_check(&b, &x, &[1.0, 100.0]).unwrap();
        assert!(r.pass);
        assert!(
            (r.detail("max_ratio").unwrap() - 0.5 / std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12
        );
        assert!(decay_check(&b, &SpanElement::zero(), &[1.0]).unwrap().pass);
    }

    #[test]
    fn sign_flipped_cross_block_is_rejected() {
        let good = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(psd_report("g", &good, 1e-9).pass);
        let flipped =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)]);
        assert!(!psd_report("g", &flipped, 1e-9).pass);
        let doubled = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0)],
        );
        let r = psd_report("g", &doubled, 1e-9);
        assert!(!r.pass);
        assert!((r.detail("min_eigenvalue").unwrap() + 0.5).abs() < 1e-14);
    }

    /// Second-order terms against a central difference of ordinary sections in
    /// `t = λ̄*`.
    #[test]
    fn derivative_term_matches_finite_difference() {
        let phi = make_conservative(2, 1, 21).unwrap().schur().clone();
        let ls = c(0.9, 0.4);
        let nu = one_vec(1.0);
        let d = SpanElement {
            sections: vec![],
            derivatives: vec![ControlDerivative {
                lambda_star: ls,
                nu: nu.clone(),
            }],
        };
        let h = 1e-4;
        let sec = |t: Complex64| {
            Section::new(
                KernelPoint::new(c(1.0, 0.0), t.conj()).unwrap(),
                one_vec(0.0),
                nu.clone(),
            )
        };
        let t = ls.conj();
        let fd = SpanElement::from_sections(vec![
            sec(t + h).scaled(c(-0.5 / h, 0.0)),
            sec(t - h).scaled(c(0.5 / h, 0.0)),
        ]);
        let probe = KernelPoint::new(c(0.6, -0.3), c(1.7, 0.2)).unwrap();
        let a = evaluate(&phi, &d, probe).unwrap();
        let b = evaluate(&phi, &fd, probe).unwrap();
        assert!(linalg::vec_diff(&a, &b) < 1e-7);
        let nd = inner(&phi, &d, &d).unwrap();
        let nf = inner(&phi, &fd, &fd).unwrap();
        assert!((nd - nf).norm() < 1e-6 * nd.norm().max(1.0));
        let other = SpanElement::single(Section::new(probe, one_vec(0.3), one_vec(-1.1)));
        let x1 = inner(&phi, &d, &other).unwrap();
        let x2 = inner(&phi, &fd, &other).unwrap();
        assert!((x1 - x2).norm() < 1e-7);
    }

    /// Closed form for the Blaschke factor: `∂_s∂_t 2/((s+1)(t+1)) = 1/8` at `s = t = 1`.
    #[test]
    fn derivative_self_inner_for_blaschke() {
        let b = StateSpaceSchur::blaschke();
        let d = SpanElement {
            sections: vec![],
            derivatives: vec![ControlDerivative {
                lambda_star: c(1.0, 0.0),
                nu: one_vec(1.0),
            }],
        };
        assert!((inner(&b, &d, &d).unwrap() - 0.125).norm() < 1e-15);
    }

    #[test]
    fn projections_reject_mixed_sections() {
        let x = SpanElement::single(Section::new(ones(), one_vec(1.0), one_vec(0.0)));
        assert!(project_reachable(&x).is_err());
        assert_eq!(project_coreachable(&x).unwrap(), x);
    }

    #[test]
    fn json_round_trip() {
        let mut s = Sampler::new(4);
        let x = s.span(2, 1, 3);
        let text = serde_json::to_string(&x.to_json().unwrap()).unwrap();
        let items: Vec<SectionJson> = serde_json::from_str(&text).unwrap();
        assert_eq!(SpanElement::from_json(&items).unwrap(), x);
    }
}
