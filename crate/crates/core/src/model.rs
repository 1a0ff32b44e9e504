//! The conservative system node `S_s` on `H_s`.
//!
//! The domain is generated by spanning pairs: a section `x = K_s(·,(λ,λ*))[γ; ν]`
//! with input `u = φ(λ)*γ + ν` is mapped to the state derivative
//! `z = K_s(·,(λ,λ*))[−λ̄γ; λ̄*ν]` and output `y = γ + φ(λ̄*)ν`. Finite sums of
//! spanning pairs are the only domain elements the crate accepts.

use num_complex::Complex64;

use crate::kernel::KernelPoint;
use crate::linalg::{self, identity, vec_diff, vec_norm};
use crate::report::Report;
use crate::schur::StateSpaceSchur;
use crate::span::{
    evaluate, evaluate_many, inner, ControlDerivative, Prepared, Section, SpanElement,
};
use crate::{CVector, Error, Result};

/// Domain side `(x, u)` together with its image `(z, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelPair {
    pub x: SpanElement,
    pub u: CVector,
    pub z: SpanElement,
    pub y: CVector,
}

fn sections_only(x: &SpanElement) -> Result<()> {
    if x.derivatives.is_empty() {
        Ok(())
    } else {
        Err(Error::DomainViolation(
            "second-order terms are not spanning pairs".into(),
        ))
    }
}

fn zeros(n: usize) -> CVector {
    CVector::zeros(n)
}

/// Input `Σ φ(λ)*γ + ν` that makes `x` a sum of spanning pairs.
pub fn domain_input(phi: &StateSpaceSchur, x: &SpanElement) -> Result<CVector> {
    sections_only(x)?;
    x.check_dims(phi.outputs(), phi.inputs())?;
    let mut u = zeros(phi.inputs());
    for s in &x.sections {
        u += phi.eval(s.point.lambda)?.adjoint() * &s.gamma + &s.nu;
    }
    Ok(u)
}

/// Model action on a sum of spanning pairs.
pub fn apply(phi: &StateSpaceSchur, x: &SpanElement) -> Result<ModelPair> {
    let u = domain_input(phi, x)?;
    let mut y = zeros(phi.outputs());
    let mut z = Vec::with_capacity(x.sections.len());
    for s in &x.sections {
        let (l, ls) = (s.point.lambda, s.point.lambda_star);
        y += &s.gamma + phi.eval(ls.conj())? * &s.nu;
        z.push(Section::new(
            s.point,
            &s.gamma * -l.conj(),
            &s.nu * ls.conj(),
        ));
    }
    Ok(ModelPair {
        x: x.clone(),
        u,
        z: SpanElement::from_sections(z),
        y,
    })
}

/// Adjoint node on its spanning pairs: input `γ + φ(λ̄*)ν`, image
/// `K_s(·,(λ,λ*))[λ̄γ; −λ̄*ν]`, output `φ(λ)*γ + ν`. The returned pair holds
/// the input in `u` and the output in `y`.
pub fn apply_adjoint(phi: &StateSpaceSchur, x: &SpanElement) -> Result<ModelPair> {
    sections_only(x)?;
    x.check_dims(phi.outputs(), phi.inputs())?;
    let mut input = zeros(phi.outputs());
    let mut output = zeros(phi.inputs());
    let mut z = Vec::with_capacity(x.sections.len());
    for s in &x.sections {
        let (l, ls) = (s.point.lambda, s.point.lambda_star);
        input += &s.gamma + phi.eval(ls.conj())? * &s.nu;
        output += phi.eval(l)?.adjoint() * &s.gamma + &s.nu;
        z.push(Section::new(
            s.point,
            &s.gamma * l.conj(),
            &s.nu * -ls.conj(),
        ));
    }
    Ok(ModelPair {
        x: x.clone(),
        u: input,
        z: SpanElement::from_sections(z),
        y: output,
    })
}

/// `lim_{η→∞} η x₁(η)` in closed form: `Σ (1 − Dφ(λ)*)γ + (φ(λ̄*) − D)ν`.
pub fn observe(phi: &StateSpaceSchur, x: &SpanElement) -> Result<CVector> {
    sections_only(x)?;
    x.check_dims(phi.outputs(), phi.inputs())?;
    let p = phi.outputs();
    let mut y = zeros(p);
    for s in &x.sections {
        y += (identity(p) - &phi.d * phi.eval(s.point.lambda)?.adjoint()) * &s.gamma;
        y += (phi.eval(s.point.lambda_star.conj())? - &phi.d) * &s.nu;
    }
    Ok(y)
}

/// Pointwise image values and output from the explicit formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitImage {
    pub z: Vec<CVector>,
    pub y: CVector,
}

/// `y = lim η x₁(η) + Du` and
/// `z(μ, μ*) = [μ x₁(μ); −μ* x₂(μ*)] + [φ(μ); 1]u − [1; φ(μ̄*)*]y` at each probe.
pub fn apply_explicit(
    phi: &StateSpaceSchur,
    x: &SpanElement,
    u: &CVector,
    probes: &[KernelPoint],
) -> Result<ExplicitImage> {
    let expected = domain_input(phi, x)?;
    if u.len() != expected.len() {
        return Err(Error::Dimension("u must have length m".into()));
    }
    let scale = 1.0 + vec_norm(&expected);
    if vec_diff(u, &expected) > 1e-10 * scale {
        return Err(Error::DomainViolation(
            "u does not match the section decomposition of x".into(),
        ));
    }
    let (p, m) = (phi.outputs(), phi.inputs());
    let y = observe(phi, x)? + &phi.d * u;
    let values = evaluate_many(phi, x, probes)?;
    let mut z = Vec::with_capacity(probes.len());
    for (pt, v) in probes.iter().zip(values) {
        let (mu, mus) = (pt.lambda, pt.lambda_star);
        let top = v.rows(0, p) * mu + phi.eval(mu)? * u - &y;
        let bottom = v.rows(p, m) * -mus + u - phi.eval(mus.conj())?.adjoint() * &y;
        z.push(linalg::stack_vec(&top, &bottom));
    }
    Ok(ExplicitImage { z, y })
}

/// `|2Re⟨z, x⟩ − (‖u‖² − ‖y‖²)|` and the scale `1 + ‖x‖² + ‖u‖²`.
pub fn energy_defect(phi: &StateSpaceSchur, pair: &ModelPair) -> Result<(f64, f64)> {
    let zx = inner(phi, &pair.z, &pair.x)?;
    let xx = inner(phi, &pair.x, &pair.x)?.re;
    let uu = pair.u.norm_squared();
    let defect = (2.0 * zx.re - (uu - pair.y.norm_squared())).abs();
    Ok((defect, 1.0 + xx + uu))
}

/// Energy balance on each span plus the polarized identity on every pair of
/// sections that occur in them.
pub fn energy_balance_check(
    phi: &StateSpaceSchur,
    spans: &[SpanElement],
    tol: f64,
) -> Result<Report> {
    let mut worst: f64 = 0.0;
    for x in spans {
        let (d, s) = energy_defect(phi, &apply(phi, x)?)?;
        worst = worst.max(d / s);
    }
    let sections: Vec<Section> = spans
        .iter()
        .flat_map(|x| x.sections.iter().cloned())
        .collect();
    let polar = polarized_energy_residual(phi, &sections)?;
    Ok(
        Report::from_residual("energy_balance", worst.max(polar), tol)
            .with_detail("balance", worst)
            .with_detail("polarized", polar)
            .with_detail("spans", spans.len() as f64),
    )
}

/// `max |⟨x_i, z_j⟩ + ⟨z_i, x_j⟩ + ⟨y_i, y_j⟩ − ⟨u_i, u_j⟩|`, relative to the
/// sizes of the pairs.
pub fn polarized_energy_residual(phi: &StateSpaceSchur, sections: &[Section]) -> Result<f64> {
    let pairs: Vec<ModelPair> = sections
        .iter()
        .map(|s| apply(phi, &SpanElement::single(s.clone())))
        .collect::<Result<_>>()?;
    let prepared_x: Vec<Prepared> = pairs
        .iter()
        .map(|q| Prepared::new(phi, &q.x))
        .collect::<Result<_>>()?;
    let prepared_z: Vec<Prepared> = pairs
        .iter()
        .map(|q| Prepared::new(phi, &q.z))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..pairs.len() {
        for j in 0..pairs.len() {
            let lhs = crate::span::inner_prepared(&prepared_x[i], &prepared_z[j])
                + crate::span::inner_prepared(&prepared_z[i], &prepared_x[j]);
            let rhs = -(pairs[j].y.adjoint() * &pairs[i].y)[(0, 0)]
                + (pairs[j].u.adjoint() * &pairs[i].u)[(0, 0)];
            let scale =
                1.0 + pairs[i].u.norm() * pairs[j].u.norm() + pairs[i].y.norm() * pairs[j].y.norm();
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    Ok(worst)
}

/// Adjoint pairing `⟨z, x'⟩ + ⟨y, y'⟩ = ⟨x, z'⟩ + ⟨u, u'⟩` between model pairs
/// `(x, u) ↦ (z, y)` and adjoint pairs `(x', y') ↦ (z', u')`.
pub fn adjoint_pairing_residual(
    phi: &StateSpaceSchur,
    x: &SpanElement,
    xd: &SpanElement,
) -> Result<f64> {
    let s = apply(phi, x)?;
    let a = apply_adjoint(phi, xd)?;
    let lhs = inner(phi, &s.z, &a.x)? + (a.u.adjoint() * &s.y)[(0, 0)];
    let rhs = inner(phi, &s.x, &a.z)? + (a.y.adjoint() * &s.u)[(0, 0)];
    let scale = 1.0 + s.u.norm() * a.y.norm() + s.y.norm() * a.u.norm();
    Ok((lhs - rhs).norm() / scale)
}

/// Time-flow inversion: the adjoint applied to `(x, y)` returns `(−z, u)`.
pub fn time_flow_inverse_residual(
    phi: &StateSpaceSchur,
    x: &SpanElement,
    probes: &[KernelPoint],
) -> Result<f64> {
    let s = apply(phi, x)?;
    let a = apply_adjoint(phi, x)?;
    let mut worst = vec_diff(&a.u, &s.y).max(vec_diff(&a.y, &s.u));
    let zs = evaluate_many(phi, &s.z, probes)?;
    let za = evaluate_many(phi, &a.z, probes)?;
    for (p, q) in zs.iter().zip(&za) {
        worst = worst.max(vec_norm(&(p + q)));
    }
    Ok(worst)
}

/// `‖apply(x).z(P) − apply_explicit(x, u)(P)‖` over the probes, together with
/// the output mismatch.
pub fn explicit_route_residual(
    phi: &StateSpaceSchur,
    x: &SpanElement,
    probes: &[KernelPoint],
) -> Result<f64> {
    let pair = apply(phi, x)?;
    let explicit = apply_explicit(phi, x, &pair.u, probes)?;
    let values = evaluate_many(phi, &pair.z, probes)?;
    let mut worst = vec_diff(&explicit.y, &pair.y);
    for (v, w) in values.iter().zip(&explicit.z) {
        worst = worst.max(vec_diff(v, w) / (1.0 + vec_norm(v)));
    }
    Ok(worst)
}

/// `η x₂(η) + φ̃(η) y − u` at a large real `η`; tends to zero on domain spans.
pub fn output_limit_residual(phi: &StateSpaceSchur, x: &SpanElement, eta: f64) -> Result<f64> {
    let pair = apply(phi, x)?;
    let p = phi.outputs();
    let pt = KernelPoint::diagonal(Complex64::new(eta, 0.0))?;
    let v = evaluate(phi, x, pt)?;
    let x2 = v.rows(p, phi.inputs()).into_owned();
    let phi_tilde = phi.eval(Complex64::new(eta, 0.0))?.adjoint();
    Ok(vec_norm(
        &(x2 * Complex64::new(eta, 0.0) + phi_tilde * &pair.y - &pair.u),
    ))
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    if alpha.re > 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain(
            alpha,
            "resolvent parameter needs Re α > 0",
        ))
    }
}

/// Relative distance below which `α` is treated as coinciding with `λ̄*`.
const COLLISION_TOL: f64 = 1e-9;

fn collides(alpha: Complex64, t: Complex64) -> bool {
    (alpha - t).norm() <= COLLISION_TOL * (1.0 + alpha.norm())
}

/// `(α − A_{s,−1})⁻¹B_s u`, the section `K_s(·, (ᾱ, ᾱ))[0; u]`.
pub fn control_section(
    phi: &StateSpaceSchur,
    alpha: Complex64,
    u: &CVector,
) -> Result<SpanElement> {
    check_alpha(alpha)?;
    let pt = KernelPoint::diagonal(alpha.conj())?;
    Ok(SpanElement::single(Section::new(
        pt,
        zeros(phi.outputs()),
        u.clone(),
    )))
}

/// `[(φ(μ) − φ(α))/(α − μ); (1 − φ̃(μ*)φ(α))/(α + μ*)] u` evaluated directly.
pub fn control_section_values(
    phi: &StateSpaceSchur,
    alpha: Complex64,
    u: &CVector,
    at: KernelPoint,
) -> Result<CVector> {
    let (mu, mus) = (at.lambda, at.lambda_star);
    let m = phi.inputs();
    let top = phi.diff_quotient(mu, alpha)? * u;
    let bottom =
        (identity(m) - phi.eval(mus.conj())?.adjoint() * phi.eval(alpha)?) * u / (alpha + mus);
    Ok(linalg::stack_vec(&top, &bottom))
}

/// Resolvent `(α − A_s)⁻¹` on a span, in closed form.
///
/// * `[γ; 0]` at `(λ, λ*)` ↦ `K_s(·,(λ, ᾱ))[γ; −φ(λ)*γ] / (α + λ̄)`;
/// * `[0; ν]` at `λ*` ↦ `(K_s(·,λ*)[0; ν] − K_s(·,ᾱ)[0; ν]) / (α − λ̄*)`, or the
///   second-order term at `λ*` when `α = λ̄*`;
/// * a second-order term at `λ*` ↦ `(D − R_α k)/(α − λ̄*)` with `k` its first-order section.
///
/// Returns the span and the number of collisions resolved by the second-order branch.
pub fn resolvent_counted(
    phi: &StateSpaceSchur,
    alpha: Complex64,
    x: &SpanElement,
) -> Result<(SpanElement, usize)> {
    check_alpha(alpha)?;
    x.check_dims(phi.outputs(), phi.inputs())?;
    let p = phi.outputs();
    let mut out = SpanElement::zero();
    let mut collisions = 0;
    let at_alpha = |l: Complex64| KernelPoint::new(l, alpha.conj());
    for s in &x.sections {
        let (l, ls) = (s.point.lambda, s.point.lambda_star);
        if s.gamma.iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
            let nu = -(phi.eval(l)?.adjoint() * &s.gamma);
            let sec = Section::new(at_alpha(l)?, s.gamma.clone(), nu);
            out.sections.push(sec.scaled(1.0 / (alpha + l.conj())));
        }
        if s.nu.iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
            let t = ls.conj();
            if collides(alpha, t) {
                collisions += 1;
                out.derivatives.push(ControlDerivative {
                    lambda_star: alpha.conj(),
                    nu: s.nu.clone(),
                });
            } else {
                let w = 1.0 / (alpha - t);
                out.sections
                    .push(Section::new(s.point, zeros(p), &s.nu * w));
                out.sections
                    .push(Section::new(at_alpha(l)?, zeros(p), &s.nu * -w));
            }
        }
    }
    for d in &x.derivatives {
        let t = d.lambda_star.conj();
        if collides(alpha, t) {
            return Err(Error::UnsupportedPole(alpha));
        }
        let w = 1.0 / (alpha - t);
        let k = SpanElement::single(Section::new(
            KernelPoint::diagonal(d.lambda_star)?,
            zeros(p),
            d.nu.clone(),
        ));
        let rk = resolvent_counted(phi, alpha, &k)?.0;
        let mut term = SpanElement {
            sections: Vec::new(),
            derivatives: vec![d.clone()],
        };
        term = term.minus(&rk).scaled(w);
        out = out.plus(&term);
    }
    Ok((out, collisions))
}

pub fn resolvent(phi: &StateSpaceSchur, alpha: Complex64, x: &SpanElement) -> Result<SpanElement> {
    Ok(resolvent_counted(phi, alpha, x)?.0)
}

/// The defining formula
/// `(R_α x)(μ, μ*) = [(x₁(μ) − x₁(α))/(α − μ); (x₂(μ*) − φ̃(μ*)x₁(α))/(α + μ*)]`
/// applied to any pointwise-evaluable `x`; requires `μ ≠ α`.
pub fn resolvent_pointwise<F>(
    phi: &StateSpaceSchur,
    alpha: Complex64,
    x: F,
    at: KernelPoint,
) -> Result<CVector>
where
    F: Fn(KernelPoint) -> Result<CVector>,
{
    let (p, m) = (phi.outputs(), phi.inputs());
    let (mu, mus) = (at.lambda, at.lambda_star);
    if (mu - alpha).norm() < 1e-8 {
        return Err(Error::OutsideDomain(
            mu,
            "pointwise resolvent formula needs μ ≠ α",
        ));
    }
    let v = x(at)?;
    let va = x(KernelPoint::new(alpha, mus)?)?;
    let xa = va.rows(0, p).into_owned();
    let top = (v.rows(0, p) - &xa) / (alpha - mu);
    let bottom = (v.rows(p, m) - phi.eval(mus.conj())?.adjoint() * &xa) / (alpha + mus);
    Ok(linalg::stack_vec(&top, &bottom))
}

/// `|(R_α − R_β)x − (β − α)R_α R_β x|` pointwise, over spans and probes.
pub fn resolvent_identity_residual(
    phi: &StateSpaceSchur,
    alpha: Complex64,
    beta: Complex64,
    x: &SpanElement,
    probes: &[KernelPoint],
) -> Result<f64> {
    let ra = resolvent(phi, alpha, x)?;
    let rb = resolvent(phi, beta, x)?;
    let rab = resolvent(phi, alpha, &rb)?;
    let lhs = ra.minus(&rb);
    let rhs = rab.scaled(beta - alpha);
    let l = evaluate_many(phi, &lhs, probes)?;
    let r = evaluate_many(phi, &rhs, probes)?;
    Ok(l.iter()
        .zip(&r)
        .map(|(a, b)| vec_diff(a, b) / (1.0 + vec_norm(a)))
        .fold(0.0, f64::max))
}

/// Transfer function recovered from the model: the output of the spanning pair
/// `K_s(·, ᾱ)[0; u]`, computed as `lim η x₁(η) + Du`.
pub fn transfer(phi: &StateSpaceSchur, alpha: Complex64, u: &CVector) -> Result<CVector> {
    let x = control_section(phi, alpha, u)?;
    Ok(observe(phi, &x)? + &phi.d * u)
}

/// Max `‖transfer(α, u) − φ(α)u‖` over the given parameters.
pub fn transfer_check(
    phi: &StateSpaceSchur,
    cases: &[(Complex64, CVector)],
    tol: f64,
) -> Result<Report> {
    let mut worst: f64 = 0.0;
    for (alpha, u) in cases {
        let y = transfer(phi, *alpha, u)?;
        worst = worst.max(vec_diff(&y, &(phi.eval(*alpha)? * u)));
    }
    Ok(Report::from_residual("transfer_recovery", worst, tol)
        .with_detail("cases", cases.len() as f64))
}
