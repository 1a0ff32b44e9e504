//! Disk side: the unitary functional model on the disk kernel space `𝐇_s`, the
//! Cayley transform of the half-plane model, and the unitary map `Ξ` between them.
//!
//! Elements of `𝐇_s` are finite sums of kernel sections `𝐊(·, w)[γ; ν]` and of
//! origin terms `𝐀^k𝐁ν`. Origin terms are the Taylor coefficients of
//! `w̄ ↦ 𝐊(·, w)[0; ν] = Σ w̄^k 𝐀^k𝐁ν`; they make the span closed under `𝐀`.

use num_complex::Complex64;

use crate::kernel::{disk_block_from_data, k_disk, k_s, DiskPointData, KernelBlock, KernelPoint};
use crate::linalg::{self, c, identity, rank, vec_diff, vec_norm};
use crate::model::{control_section, resolvent};
use crate::report::Report;
use crate::schur::{cayley_map, cayley_map_inv, DiskSchur, StateSpaceSchur};
use crate::span::{evaluate, gram_of, ControlDerivative, Section, SpanElement};
use crate::{CMatrix, CVector, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DiskSection {
    pub w: Complex64,
    pub gamma: CVector,
    pub nu: CVector,
}

impl DiskSection {
    pub fn new(w: Complex64, gamma: CVector, nu: CVector) -> Self {
        DiskSection { w, gamma, nu }
    }

    fn coefficient(&self) -> CVector {
        linalg::stack_vec(&self.gamma, &self.nu)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct DiskSpan {
    pub sections: Vec<DiskSection>,
    /// `powers[k]` is the `ν` of the origin term `𝐀^k𝐁ν`.
    pub powers: Vec<CVector>,
}

impl DiskSpan {
    pub fn zero() -> Self {
        DiskSpan::default()
    }

    pub fn single(s: DiskSection) -> Self {
        DiskSpan {
            sections: vec![s],
            powers: Vec::new(),
        }
    }

    fn add_power(&mut self, k: usize, nu: &CVector) {
        while self.powers.len() <= k {
            self.powers.push(CVector::zeros(nu.len()));
        }
        self.powers[k] += nu;
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        DiskSpan {
            sections: self
                .sections
                .iter()
                .map(|x| DiskSection::new(x.w, &x.gamma * s, &x.nu * s))
                .collect(),
            powers: self.powers.iter().map(|v| v * s).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sections.extend(other.sections.iter().cloned());
        for (k, v) in other.powers.iter().enumerate() {
            out.add_power(k, v);
        }
        out
    }
}

/// `A^kB` for `k < count` and the Taylor coefficients `ϕ_0 = D`, `ϕ_j = CA^{j−1}B`
/// for `j ≤ count`.
struct Taylor {
    ab: Vec<CMatrix>,
    coeffs: Vec<CMatrix>,
}

impl Taylor {
    fn new(phi: &DiskSchur, count: usize) -> Self {
        let mut ab = Vec::with_capacity(count);
        let mut coeffs = vec![phi.d.clone()];
        let mut cur = phi.b.clone();
        for _ in 0..count {
            coeffs.push(&phi.c * &cur);
            let next = &phi.a * &cur;
            ab.push(cur);
            cur = next;
        }
        Taylor { ab, coeffs }
    }

    /// Value of `𝐀^k𝐁` at the row point: `[C(1 − zA)⁻¹A^kB; z^k − ϕ̃(z)Σ_{j≤k} ϕ_j z^{k−j}]`.
    fn power_at(&self, k: usize, row: &DiskPointData) -> CMatrix {
        let (p, m) = row.phi_w.shape();
        let z = row.w;
        let top = &row.h * &self.ab[k];
        let mut sum = CMatrix::zeros(p, m);
        let mut zp = c(1.0, 0.0);
        for j in (0..=k).rev() {
            sum += &self.coeffs[j] * zp;
            zp *= z;
        }
        let zk = z.powu(k as u32);
        let bottom = identity(m) * zk - row.phi_wc.adjoint() * sum;
        let mut out = CMatrix::zeros(p + m, m);
        out.view_mut((0, 0), (p, m)).copy_from(&top);
        out.view_mut((p, 0), (m, m)).copy_from(&bottom);
        out
    }

    /// `⟨𝐀^k𝐁ν, 𝐀^l𝐁ν'⟩ = ν'*(δ_{lk} − Σ_{n ≤ min(k,l)} ϕ_{l−n}*ϕ_{k−n})ν`.
    fn power_gram(&self, l: usize, k: usize) -> CMatrix {
        let m = self.coeffs[0].ncols();
        let mut out = if l == k {
            identity(m)
        } else {
            CMatrix::zeros(m, m)
        };
        for n in 0..=l.min(k) {
            out -= self.coeffs[l - n].adjoint() * &self.coeffs[k - n];
        }
        out
    }
}

struct DiskPrepared {
    sections: Vec<(DiskPointData, CVector)>,
    powers: Vec<CVector>,
}

impl DiskPrepared {
    fn new(phi: &DiskSchur, x: &DiskSpan) -> Result<Self> {
        let (p, m) = (phi.outputs(), phi.inputs());
        let mut sections = Vec::with_capacity(x.sections.len());
        for s in &x.sections {
            if s.gamma.len() != p || s.nu.len() != m {
                return Err(Error::Dimension(
                    "disk section vectors must have lengths p and m".into(),
                ));
            }
            sections.push((DiskPointData::new(phi, s.w)?, s.coefficient()));
        }
        if x.powers.iter().any(|v| v.len() != m) {
            return Err(Error::Dimension("origin terms need length m".into()));
        }
        Ok(DiskPrepared {
            sections,
            powers: x.powers.clone(),
        })
    }

    fn eval(&self, row: &DiskPointData, t: &Taylor) -> CVector {
        let (p, m) = row.phi_w.shape();
        let mut out = CVector::zeros(p + m);
        for (col, v) in &self.sections {
            out += disk_block_from_data(row, col).to_matrix() * v;
        }
        for (k, nu) in self.powers.iter().enumerate() {
            out += t.power_at(k, row) * nu;
        }
        out
    }
}

fn disk_inner_prepared(x: &DiskPrepared, y: &DiskPrepared, t: &Taylor) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for (q, w) in &y.sections {
        acc += (w.adjoint() * x.eval(q, t))[(0, 0)];
    }
    for (l, nu2) in y.powers.iter().enumerate() {
        for (pt, v) in &x.sections {
            acc += (v.adjoint() * t.power_at(l, pt) * nu2)[(0, 0)].conj();
        }
        for (k, nu) in x.powers.iter().enumerate() {
            acc += (nu2.adjoint() * t.power_gram(l, k) * nu)[(0, 0)];
        }
    }
    acc
}

fn taylor_for(phi: &DiskSchur, spans: &[&DiskSpan]) -> Taylor {
    let n = spans.iter().map(|x| x.powers.len()).max().unwrap_or(0);
    Taylor::new(phi, n)
}

/// `⟨x, y⟩_{𝐇_s}`, linear in `x`.
pub fn disk_inner(phi: &DiskSchur, x: &DiskSpan, y: &DiskSpan) -> Result<Complex64> {
    let t = taylor_for(phi, &[x, y]);
    Ok(disk_inner_prepared(
        &DiskPrepared::new(phi, x)?,
        &DiskPrepared::new(phi, y)?,
        &t,
    ))
}

/// `G[i][j] = ⟨x_j, x_i⟩`.
pub fn disk_gram(phi: &DiskSchur, xs: &[DiskSpan]) -> Result<CMatrix> {
    let refs: Vec<&DiskSpan> = xs.iter().collect();
    let t = taylor_for(phi, &refs);
    let prepared: Vec<DiskPrepared> = xs
        .iter()
        .map(|x| DiskPrepared::new(phi, x))
        .collect::<Result<_>>()?;
    let n = xs.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = disk_inner_prepared(&prepared[j], &prepared[i], &t);
        }
    }
    Ok(g)
}

pub fn disk_evaluate(phi: &DiskSchur, x: &DiskSpan, z: Complex64) -> Result<CVector> {
    let t = taylor_for(phi, &[x]);
    Ok(DiskPrepared::new(phi, x)?.eval(&DiskPointData::new(phi, z)?, &t))
}

/// Below this modulus `𝐀𝐊(·, w)[0; ν]` is summed as `Σ w̄^k 𝐀^{k+1}𝐁ν`
/// instead of the difference quotient, which would cancel badly.
const ORIGIN_RADIUS: f64 = 1e-3;

/// `𝐀x + 𝐁u` and `𝐂x + 𝐃u` of the disk model, in span form:
/// * `𝐀𝐊(·,w)[γ; 0] = w̄𝐊(·,w)[γ; 0] − 𝐊(·,0)[0; ϕ(w)*γ]`;
/// * `𝐀𝐊(·,w)[0; ν] = (𝐊(·,w)[0; ν] − 𝐊(·,0)[0; ν])/w̄`;
/// * `𝐀` shifts origin terms, `𝐁u = 𝐊(·,0)[0; u]`, `𝐂x = x₁(0)`, `𝐃 = ϕ(0)`.
pub fn disk_model_apply(phi: &DiskSchur, x: &DiskSpan, u: &CVector) -> Result<(DiskSpan, CVector)> {
    let (p, m) = (phi.outputs(), phi.inputs());
    if u.len() != m {
        return Err(Error::Dimension("u must have length m".into()));
    }
    let v0 = disk_evaluate(phi, x, c(0.0, 0.0))?;
    let y = v0.rows(0, p) + &phi.d * u;
    let mut out = DiskSpan::zero();
    for (k, nu) in x.powers.iter().enumerate() {
        out.add_power(k + 1, nu);
    }
    out.add_power(0, u);
    for s in &x.sections {
        let w = s.w;
        let wc = w.conj();
        out.sections
            .push(DiskSection::new(w, &s.gamma * wc, CVector::zeros(m)));
        out.add_power(0, &-(phi.eval(w)?.adjoint() * &s.gamma));
        if w.norm() > ORIGIN_RADIUS {
            out.sections
                .push(DiskSection::new(w, CVector::zeros(p), &s.nu / wc));
            out.add_power(0, &(&s.nu * -(c(1.0, 0.0) / wc)));
        } else {
            let terms = if w.norm() == 0.0 {
                1
            } else {
                (18.0 / -w.norm().log10()).ceil() as usize + 1
            };
            let mut wk = c(1.0, 0.0);
            for k in 0..terms {
                out.add_power(k + 1, &(&s.nu * wk));
                wk *= wc;
            }
        }
    }
    Ok((out, y))
}

/// The disk model read off pointwise at `z ≠ 0`:
/// `[(f(z) − f(0))/z; zg(z) − ϕ̃(z)f(0)] + [(ϕ(z) − ϕ(0))/z; 1 − ϕ̃(z)ϕ(0)]u`.
pub fn disk_model_pointwise(
    phi: &DiskSchur,
    x: &DiskSpan,
    u: &CVector,
    z: Complex64,
) -> Result<CVector> {
    if z.norm() < 1e-8 {
        return Err(Error::OutsideDomain(
            z,
            "pointwise disk formula needs z ≠ 0",
        ));
    }
    let (p, m) = (phi.outputs(), phi.inputs());
    let v = disk_evaluate(phi, x, z)?;
    let f0 = disk_evaluate(phi, x, c(0.0, 0.0))?.rows(0, p).into_owned();
    let phi_tilde = phi.eval(z.conj())?.adjoint();
    let top = (v.rows(0, p) - &f0) / z + (phi.eval(z)? - &phi.d) * u / z;
    let bottom = v.rows(p, m) * z - &phi_tilde * &f0 + (identity(m) - &phi_tilde * &phi.d) * u;
    Ok(linalg::stack_vec(&top, &bottom))
}

fn gram_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = 1f64.max(linalg::frobenius(a)).max(linalg::frobenius(b));
    linalg::frobenius(&(a - b)) / scale
}

/// `G[i][j] = ⟨x_j, x_i⟩ + u_i*u_j` for the domain pairs.
fn pair_gram(state: &CMatrix, signals: &[CVector]) -> CMatrix {
    let mut g = state.clone();
    for i in 0..signals.len() {
        for j in 0..signals.len() {
            g[(i, j)] += (signals[i].adjoint() * &signals[j])[(0, 0)];
        }
    }
    g
}

/// Isometry of the disk model on the given pairs, compared at Gram level.
pub fn disk_isometry_check(
    phi: &DiskSchur,
    xs: &[DiskSpan],
    us: &[CVector],
    tol: f64,
) -> Result<Report> {
    let mut images = Vec::with_capacity(xs.len());
    let mut outputs = Vec::with_capacity(xs.len());
    for (x, u) in xs.iter().zip(us) {
        let (z, y) = disk_model_apply(phi, x, u)?;
        images.push(z);
        outputs.push(y);
    }
    let g_in = pair_gram(&disk_gram(phi, xs)?, us);
    let g_out = pair_gram(&disk_gram(phi, &images)?, &outputs);
    Ok(
        Report::from_residual("disk_isometry", gram_gap(&g_in, &g_out), tol)
            .with_detail("pairs", xs.len() as f64),
    )
}

/// Cayley transform of the half-plane model:
/// `𝐀 = 2Re α·R_α − 1`, `𝐁u = b_scale·R_αB_s u`, `𝐂x = √(2Re α)·x₁(α)`, `𝐃 = φ(α)`.
/// `b_scale` is `√(2Re α)` for the true colligation.
#[derive(Clone, Debug)]
pub struct CayleyColligation {
    pub phi: StateSpaceSchur,
    pub alpha: Complex64,
    pub b_scale: f64,
}

impl CayleyColligation {
    pub fn new(phi: &StateSpaceSchur, alpha: Complex64) -> Result<Self> {
        if alpha.re.is_nan() || alpha.re <= 0.0 {
            return Err(Error::OutsideDomain(
                alpha,
                "Cayley parameter must satisfy Re α > 0",
            ));
        }
        Ok(CayleyColligation {
            phi: phi.clone(),
            alpha,
            b_scale: (2.0 * alpha.re).sqrt(),
        })
    }

    pub fn with_b_scale(mut self, s: f64) -> Self {
        self.b_scale = s;
        self
    }

    pub fn a(&self, x: &SpanElement) -> Result<SpanElement> {
        let r = resolvent(&self.phi, self.alpha, x)?;
        Ok(r.scaled(c(2.0 * self.alpha.re, 0.0)).minus(x))
    }

    pub fn b(&self, u: &CVector) -> Result<SpanElement> {
        Ok(control_section(&self.phi, self.alpha, u)?.scaled(c(self.b_scale, 0.0)))
    }

    pub fn c(&self, x: &SpanElement) -> Result<CVector> {
        let v = evaluate(&self.phi, x, KernelPoint::new(self.alpha, self.alpha)?)?;
        Ok(v.rows(0, self.phi.outputs()) * c((2.0 * self.alpha.re).sqrt(), 0.0))
    }

    pub fn d(&self) -> Result<CMatrix> {
        self.phi.eval(self.alpha)
    }

    pub fn apply(&self, x: &SpanElement, u: &CVector) -> Result<(SpanElement, CVector)> {
        if u.len() != self.phi.inputs() {
            return Err(Error::Dimension("u must have length m".into()));
        }
        let z = self.a(x)?.plus(&self.b(u)?);
        let y = self.c(x)? + self.d()? * u;
        Ok((z, y))
    }
}

/// Gram-level isometry of the Cayley colligation on the given pairs. The ranks
/// of the domain and image Grams are reported as a finite-section certificate
/// of surjectivity.
pub fn unitarity_check(
    col: &CayleyColligation,
    xs: &[SpanElement],
    us: &[CVector],
    tol: f64,
) -> Result<Report> {
    let mut images = Vec::with_capacity(xs.len());
    let mut outputs = Vec::with_capacity(xs.len());
    for (x, u) in xs.iter().zip(us) {
        let (z, y) = col.apply(x, u)?;
        images.push(z);
        outputs.push(y);
    }
    let g_in = pair_gram(&gram_of(&col.phi, xs)?, us);
    let g_out = pair_gram(&gram_of(&col.phi, &images)?, &outputs);
    let (r_in, r_out) = (rank(&g_in), rank(&g_out));
    let gap = gram_gap(&g_in, &g_out);
    let residual = if r_in == r_out { gap } else { f64::INFINITY };
    Ok(Report::from_residual("cayley_unitarity", residual, tol)
        .with_detail("gram_gap", gap)
        .with_detail("rank_domain", r_in as f64)
        .with_detail("rank_image", r_out as f64))
}

fn sqrt2re(alpha: Complex64) -> f64 {
    (2.0 * alpha.re).sqrt()
}

/// `Ξ` on a disk span:
/// `Ξ𝐊(·,w)[γ; ν] = K_s(·,(λ,λ*))[(α + λ̄)γ; (ᾱ + λ̄*)ν]/√(2Re α)` with
/// `λ = m_α(w)`, `λ* = m_ᾱ(w)`; `Ξ𝐁ν = √(2Re α)K_s(·,(·,ᾱ))[0; ν]` and
/// `Ξ𝐀𝐁ν = √(2Re α)(2Re α·D(ᾱ, ν) − K_s(·,(·,ᾱ))[0; ν])`. Higher origin terms
/// would need third-order poles and are rejected.
pub fn xi_apply(phi: &StateSpaceSchur, alpha: Complex64, x: &DiskSpan) -> Result<SpanElement> {
    if alpha.re.is_nan() || alpha.re <= 0.0 {
        return Err(Error::OutsideDomain(
            alpha,
            "Cayley parameter must satisfy Re α > 0",
        ));
    }
    let s = sqrt2re(alpha);
    let mut out = SpanElement::zero();
    for sec in &x.sections {
        let l = cayley_map(alpha, sec.w);
        let ls = cayley_map(alpha.conj(), sec.w);
        let pt = KernelPoint::new(l, ls)?;
        out.sections.push(Section::new(
            pt,
            &sec.gamma * ((alpha + l.conj()) / s),
            &sec.nu * ((alpha.conj() + ls.conj()) / s),
        ));
    }
    let p = phi.outputs();
    let origin = KernelPoint::diagonal(alpha.conj())?;
    for (k, nu) in x.powers.iter().enumerate() {
        match k {
            0 => out
                .sections
                .push(Section::new(origin, CVector::zeros(p), nu * c(s, 0.0))),
            1 => {
                out.sections
                    .push(Section::new(origin, CVector::zeros(p), nu * c(-s, 0.0)));
                out.derivatives.push(ControlDerivative {
                    lambda_star: alpha.conj(),
                    nu: nu * c(s * s * s, 0.0),
                });
            }
            _ if nu.iter().all(|z| z.norm() == 0.0) => {}
            _ => return Err(Error::UnsupportedPole(alpha)),
        }
    }
    Ok(out)
}

/// `Ξ[f; g](μ, μ*) = √(2Re α)[f(m_α⁻¹(μ))/(ᾱ + μ); g(m_ᾱ⁻¹(μ*))/(α + μ*)]`.
pub fn xi_pointwise(
    phi: &DiskSchur,
    alpha: Complex64,
    x: &DiskSpan,
    at: KernelPoint,
) -> Result<CVector> {
    let (p, m) = (phi.outputs(), phi.inputs());
    let (mu, mus) = (at.lambda, at.lambda_star);
    let s = sqrt2re(alpha);
    let f = disk_evaluate(phi, x, cayley_map_inv(alpha, mu))?;
    let g = disk_evaluate(phi, x, cayley_map_inv(alpha.conj(), mus))?;
    let top = f.rows(0, p) * (s / (alpha.conj() + mu));
    let bottom = g.rows(p, m) * (s / (alpha + mus));
    Ok(linalg::stack_vec(&top, &bottom))
}

/// Right-hand side of the Cayley kernel relation:
/// `diag(ᾱ + μ, α + μ*) K_s(μ, μ*, λ, λ*) diag(α + λ̄, ᾱ + λ̄*)/(2Re α)`.
pub fn cayley_kernel(
    phi: &StateSpaceSchur,
    alpha: Complex64,
    z: Complex64,
    w: Complex64,
) -> Result<KernelBlock> {
    let mu = KernelPoint::new(cayley_map(alpha, z), cayley_map(alpha.conj(), z))?;
    let la = KernelPoint::new(cayley_map(alpha, w), cayley_map(alpha.conj(), w))?;
    let k = k_s(phi, mu, la)?;
    let (r1, r2) = (alpha.conj() + mu.lambda, alpha + mu.lambda_star);
    let (c1, c2) = (
        alpha + la.lambda.conj(),
        alpha.conj() + la.lambda_star.conj(),
    );
    let s = 1.0 / (2.0 * alpha.re);
    Ok(KernelBlock {
        k11: k.k11 * (r1 * c1 * s),
        k12: k.k12 * (r1 * c2 * s),
        k21: k.k21 * (r2 * c1 * s),
        k22: k.k22 * (r2 * c2 * s),
    })
}

fn pointwise_gap(a: &CVector, b: &CVector) -> f64 {
    vec_diff(a, b) / (1.0 + vec_norm(b))
}

/// `Ξ` certification at the given disk points:
/// the Cayley kernel relation on every point pair, `Ξ` of sections against the
/// pointwise formula, Gram preservation, and the intertwinement
/// `𝐀_{s,α}Ξ = Ξ𝐀_s`, `𝐂_{s,α}Ξ = 𝐂_s`, `Ξ𝐁_s = 𝐁_{s,α}`, `𝐃_{s,α} = 𝐃_s`.
pub fn xi_check(
    phi: &StateSpaceSchur,
    alpha: Complex64,
    sections: &[DiskSection],
    probes: &[KernelPoint],
    tol: f64,
) -> Result<Report> {
    let disk = DiskSchur::cayley(phi, alpha)?;
    let col = CayleyColligation::new(phi, alpha)?;

    let mut kernel_gap: f64 = 0.0;
    for a in sections {
        for b in sections {
            let lhs = k_disk(&disk, a.w, b.w)?.to_matrix();
            let rhs = cayley_kernel(phi, alpha, a.w, b.w)?.to_matrix();
            kernel_gap = kernel_gap.max(linalg::rel_diff(&lhs, &rhs));
        }
    }

    let spans: Vec<DiskSpan> = sections.iter().cloned().map(DiskSpan::single).collect();
    let mut value_gap: f64 = 0.0;
    let mut images = Vec::with_capacity(spans.len());
    for x in &spans {
        let xi = xi_apply(phi, alpha, x)?;
        for &pt in probes {
            value_gap = value_gap.max(pointwise_gap(
                &evaluate(phi, &xi, pt)?,
                &xi_pointwise(&disk, alpha, x, pt)?,
            ));
        }
        images.push(xi);
    }
    let norm_gap = gram_gap(&disk_gram(&disk, &spans)?, &gram_of(phi, &images)?);

    let m = phi.inputs();
    let mut inter_gap: f64 = 0.0;
    for (x, xi) in spans.iter().zip(&images) {
        let (ax, cx) = disk_model_apply(&disk, x, &CVector::zeros(m))?;
        let lhs = col.a(xi)?;
        let rhs = xi_apply(phi, alpha, &ax)?;
        for &pt in probes {
            inter_gap = inter_gap.max(pointwise_gap(
                &evaluate(phi, &lhs, pt)?,
                &evaluate(phi, &rhs, pt)?,
            ));
            // The pointwise Ξ formula on 𝐀_s x keeps the origin terms honest.
            inter_gap = inter_gap.max(pointwise_gap(
                &evaluate(phi, &rhs, pt)?,
                &xi_pointwise(&disk, alpha, &ax, pt)?,
            ));
        }
        inter_gap = inter_gap.max(pointwise_gap(&col.c(xi)?, &cx));
    }
    for j in 0..m {
        let mut u = CVector::zeros(m);
        u[j] = c(1.0, 0.0);
        let (bu, _) = disk_model_apply(&disk, &DiskSpan::zero(), &u)?;
        let lhs = xi_apply(phi, alpha, &bu)?;
        let rhs = col.b(&u)?;
        for &pt in probes {
            inter_gap = inter_gap.max(pointwise_gap(
                &evaluate(phi, &lhs, pt)?,
                &evaluate(phi, &rhs, pt)?,
            ));
        }
    }
    let d_gap = linalg::rel_diff(&col.d()?, &disk.d);

    let worst = kernel_gap
        .max(value_gap)
        .max(norm_gap)
        .max(inter_gap)
        .max(d_gap);
    Ok(Report::from_residual("xi_unitary_similarity", worst, tol)
        .with_detail("kernel_relation", kernel_gap)
        .with_detail("section_values", value_gap)
        .with_detail("gram_preservation", norm_gap)
        .with_detail("intertwinement", inter_gap)
        .with_detail("d_gap", d_gap))
}
