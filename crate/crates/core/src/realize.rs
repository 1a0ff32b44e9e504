//! Finite-dimensional realizations: i/s/o resolvents, input/output maps on
//! kernel sections, reachable and unobservable subspaces, the bilateral input
//! map into the state space, and intertwinement checks between two nodes.

use num_complex::Complex64;

use crate::kernel::{k_c, k_o, KernelPoint};
use crate::linalg::{
    self, frobenius, identity, orth_complement, orth_range, projector, rank, rel_diff,
    shifted_solve,
};
use crate::model::apply;
use crate::past_future::cross_gram;
use crate::report::Report;
use crate::sampling::Sampler;
use crate::schur::{ConservativeNode, StateSpaceSchur};
use crate::span::{evaluate, gram_of, Section, SpanElement};
use crate::{CMatrix, CVector, Error, Result};

/// `𝔖(λ) = [(λ − A)⁻¹, (λ − A)⁻¹B; C(λ − A)⁻¹, φ(λ)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoResolvent {
    pub lambda: Complex64,
    pub xx: CMatrix,
    pub xu: CMatrix,
    pub yx: CMatrix,
    pub yu: CMatrix,
}

impl IsoResolvent {
    pub fn to_matrix(&self) -> CMatrix {
        let (n, m) = self.xu.shape();
        let p = self.yx.nrows();
        let mut out = CMatrix::zeros(n + p, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&self.xx);
        out.view_mut((0, n), (n, m)).copy_from(&self.xu);
        out.view_mut((n, 0), (p, n)).copy_from(&self.yx);
        out.view_mut((n, n), (p, m)).copy_from(&self.yu);
        out
    }
}

pub fn iso_resolvent(node: &StateSpaceSchur, lambda: Complex64) -> Result<IsoResolvent> {
    let xx = node.resolvent(lambda)?;
    let xu = &xx * &node.b;
    let yx = &node.c * &xx;
    let yu = &node.d + &yx * &node.b;
    Ok(IsoResolvent {
        lambda,
        xx,
        xu,
        yx,
        yu,
    })
}

/// `‖𝔖^d(λ) − 𝔖(λ̄)*‖` with `𝔖^d` the resolvent of the dual node.
pub fn iso_duality_residual(node: &StateSpaceSchur, lambda: Complex64) -> Result<f64> {
    let dual = iso_resolvent(&node.tilde(), lambda)?.to_matrix();
    let primal = iso_resolvent(node, lambda.conj())?.to_matrix().adjoint();
    Ok(rel_diff(&dual, &primal))
}

/// `H(μ) = C(μ − A)⁻¹` and `G(μ*) = B*(μ* − A*)⁻¹`.
pub fn hg(node: &StateSpaceSchur, mu: Complex64, mu_star: Complex64) -> Result<(CMatrix, CMatrix)> {
    let h = node.c_resolvent(mu)?;
    let g = node.resolvent_b(mu_star.conj())?.adjoint();
    Ok((h, g))
}

/// `𝔅 K_c(·, λ*)ν = (λ̄* − A)⁻¹Bν`, one column per section.
pub fn input_map(node: &StateSpaceSchur, c_points: &[(Complex64, CVector)]) -> Result<CMatrix> {
    let n = node.n();
    let mut out = CMatrix::zeros(n, c_points.len());
    for (j, (ls, nu)) in c_points.iter().enumerate() {
        out.set_column(j, &(node.resolvent_b(ls.conj())? * nu));
    }
    Ok(out)
}

/// `ℭ* K_o(·, λ)γ = (λ̄ − A*)⁻¹C*γ`, one column per section.
pub fn output_adjoint_map(
    node: &StateSpaceSchur,
    o_points: &[(Complex64, CVector)],
) -> Result<CMatrix> {
    let n = node.n();
    let mut out = CMatrix::zeros(n, o_points.len());
    for (i, (l, gamma)) in o_points.iter().enumerate() {
        out.set_column(i, &(node.c_resolvent(*l)?.adjoint() * gamma));
    }
    Ok(out)
}

fn o_gram(node: &StateSpaceSchur, o_points: &[(Complex64, CVector)]) -> Result<CMatrix> {
    let n = o_points.len();
    let mut g = CMatrix::zeros(n, n);
    for (i, (li, gi)) in o_points.iter().enumerate() {
        for (j, (lj, gj)) in o_points.iter().enumerate() {
            g[(i, j)] = (gi.adjoint() * k_o(node, *li, *lj)? * gj)[(0, 0)];
        }
    }
    Ok(g)
}

fn c_gram(node: &StateSpaceSchur, c_points: &[(Complex64, CVector)]) -> Result<CMatrix> {
    let n = c_points.len();
    let mut g = CMatrix::zeros(n, n);
    for (i, (li, ni)) in c_points.iter().enumerate() {
        for (j, (lj, nj)) in c_points.iter().enumerate() {
            g[(i, j)] = (ni.adjoint() * k_c(node, *li, *lj)? * nj)[(0, 0)];
        }
    }
    Ok(g)
}

fn gap(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = 1f64.max(frobenius(a)).max(frobenius(b));
    frobenius(&(a - b)) / scale
}

/// Contractivity of `𝔅` and `ℭ*` on the sampled sections, `G − M*M ≥ 0`, with
/// the isometry gaps `‖G − M*M‖` reported (zero for conservative nodes).
pub fn io_maps_check(
    node: &StateSpaceSchur,
    o_points: &[(Complex64, CVector)],
    c_points: &[(Complex64, CVector)],
    postol: f64,
) -> Result<Report> {
    let mc = input_map(node, c_points)?;
    let mo = output_adjoint_map(node, o_points)?;
    let gc = c_gram(node, c_points)?;
    let go = o_gram(node, o_points)?;
    let dc = &gc - mc.adjoint() * &mc;
    let dout = &go - mo.adjoint() * &mo;
    let rc = crate::span::psd_report("input_map_contraction", &dc, postol);
    let ro = crate::span::psd_report("output_map_contraction", &dout, postol);
    Ok(Report::all("io_maps", &[rc, ro])
        .with_detail("input_isometry_gap", gap(&gc, &(mc.adjoint() * &mc)))
        .with_detail("output_isometry_gap", gap(&go, &(mo.adjoint() * &mo))))
}

/// `⟨𝔅c_j, ℭ*o_i⟩_{Cⁿ}` against the closed-form cross Gram of `Γ`.
pub fn gamma_consistency(
    node: &StateSpaceSchur,
    o_points: &[(Complex64, CVector)],
    c_points: &[(Complex64, CVector)],
    tol: f64,
) -> Result<Report> {
    let state = output_adjoint_map(node, o_points)?.adjoint() * input_map(node, c_points)?;
    let closed = cross_gram(node, o_points, c_points)?;
    Ok(Report::from_residual(
        "gamma_consistency",
        gap(&state, &closed),
        tol,
    ))
}

/// Orthonormal bases of the subspaces of `Cⁿ` attached to a realization.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspaces {
    /// `𝔎`, spanned by `(λ − A)⁻¹B`.
    pub reachable: CMatrix,
    /// `𝔘`, the joint kernel of `C(λ − A)⁻¹`.
    pub unobservable: CMatrix,
    /// `𝔎† = 𝔘^⊥`, spanned by `(λ̄ − A*)⁻¹C*`.
    pub reachable_dual: CMatrix,
}

impl Subspaces {
    /// Orthonormal basis of `𝔎 + 𝔎†`.
    pub fn combined(&self) -> CMatrix {
        let n = self.reachable.nrows();
        let mut stack = CMatrix::zeros(n, self.reachable.ncols() + self.reachable_dual.ncols());
        stack
            .view_mut((0, 0), self.reachable.shape())
            .copy_from(&self.reachable);
        stack
            .view_mut((0, self.reachable.ncols()), self.reachable_dual.shape())
            .copy_from(&self.reachable_dual);
        orth_range(&stack)
    }
}

/// `n + 2` seeded resolvent points in `C₊`.
fn resolvent_points(n: usize, seed: u64) -> Vec<Complex64> {
    let mut s = Sampler::new(seed);
    (0..n + 2).map(|_| s.half_plane_point()).collect()
}

fn hstack(blocks: &[CMatrix], rows: usize) -> CMatrix {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), b.shape()).copy_from(b);
        at += b.ncols();
    }
    out
}

pub fn subspaces(node: &StateSpaceSchur, seed: u64) -> Result<Subspaces> {
    let n = node.n();
    let pts = resolvent_points(n, seed);
    let reach: Vec<CMatrix> = pts
        .iter()
        .map(|&l| node.resolvent_b(l))
        .collect::<Result<_>>()?;
    let obs: Vec<CMatrix> = pts
        .iter()
        .map(|&l| node.c_resolvent(l).map(|h| h.adjoint()))
        .collect::<Result<_>>()?;
    let reachable = orth_range(&hstack(&reach, n));
    let reachable_dual = orth_range(&hstack(&obs, n));
    let unobservable = orth_complement(&reachable_dual, n);
    Ok(Subspaces {
        reachable,
        unobservable,
        reachable_dual,
    })
}

/// Rank of `[(λ̄ − A*)⁻¹C*, (λ̄* − A)⁻¹B]` over sampled points equals `n`.
pub fn simplicity_check(node: &StateSpaceSchur, seed: u64) -> Result<Report> {
    let n = node.n();
    let pts = resolvent_points(n, seed);
    let mut blocks = Vec::with_capacity(2 * pts.len());
    for &l in &pts {
        blocks.push(node.c_resolvent(l)?.adjoint());
        blocks.push(node.resolvent_b(l.conj())?);
    }
    let r = rank(&hstack(&blocks, n));
    Ok(Report::from_residual("simplicity", (n - r) as f64, 0.0)
        .with_detail("rank", r as f64)
        .with_detail("n", n as f64))
}

/// `𝔅_bil K_s(·,(λ,λ*))[γ; ν] = (λ̄ − A*)⁻¹C*γ + (λ̄* − A)⁻¹Bν`.
pub fn bilateral_image(node: &StateSpaceSchur, s: &Section) -> Result<CVector> {
    let (l, ls) = (s.point.lambda, s.point.lambda_star);
    Ok(node.c_resolvent(l)?.adjoint() * &s.gamma + node.resolvent_b(ls.conj())? * &s.nu)
}

/// `𝔅_bil` on a span of first-order sections.
pub fn bilateral_apply(node: &StateSpaceSchur, x: &SpanElement) -> Result<CVector> {
    if !x.derivatives.is_empty() {
        return Err(Error::DomainViolation(
            "bilateral map is applied to first-order sections only".into(),
        ));
    }
    let mut out = CVector::zeros(node.n());
    for s in &x.sections {
        out += bilateral_image(node, s)?;
    }
    Ok(out)
}

/// Bilateral input map on the sampled sections of a conservative node:
/// * isometry `M*M = G` with `M` the images and `G` the `H_s` Gram;
/// * the factorized values `[H(μ); G(μ*)]M` reproduce the sections at the probes;
/// * `range M = 𝔎 + 𝔎†` (projection gap);
/// * `𝔅𝔅* = 1` after compression to `𝔎 + 𝔎†`; uncompressed only for simple
///   nodes, reported as `unitary`.
pub fn bilateral_check(
    node: &ConservativeNode,
    sections: &[Section],
    probes: &[KernelPoint],
    seed: u64,
    tol: f64,
) -> Result<Report> {
    let phi = node.schur();
    let n = phi.n();
    let mut m = CMatrix::zeros(n, sections.len());
    for (j, s) in sections.iter().enumerate() {
        m.set_column(j, &bilateral_image(phi, s)?);
    }
    let spans: Vec<SpanElement> = sections.iter().cloned().map(SpanElement::single).collect();
    let g = gram_of(phi, &spans)?;
    let iso = gap(&(m.adjoint() * &m), &g);

    let mut value_gap: f64 = 0.0;
    for &pt in probes {
        let f = crate::kernel::factor(phi, pt)?;
        for (j, x) in spans.iter().enumerate() {
            let direct = evaluate(phi, x, pt)?;
            let via = &f * m.column(j);
            value_gap =
                value_gap.max(linalg::vec_diff(&direct, &via) / (1.0 + linalg::vec_norm(&direct)));
        }
    }

    let range = orth_range(&m);
    let subs = subspaces(phi, seed)?;
    let p_comb = projector(&subs.combined());
    let proj = gap(&projector(&range), &p_comb);
    // 𝔅𝔅* assembled from the sections as M G⁺ M*.
    let bb = &m * linalg::pinv_psd(&g, 1e-10) * m.adjoint();
    let coiso = gap(&bb, &identity(n));
    let coiso_projected = gap(&(&p_comb * &bb * &p_comb), &p_comb);
    let unitary = coiso <= tol;
    let residual = iso.max(value_gap).max(proj).max(coiso_projected);
    Ok(Report::from_residual("bilateral_map", residual, tol)
        .with_detail("isometry_gap", iso)
        .with_detail("factor_value_gap", value_gap)
        .with_detail("projection_gap", proj)
        .with_detail("coisometry_gap", coiso)
        .with_detail("projected_coisometry_gap", coiso_projected)
        .with_detail("unitary", f64::from(u8::from(unitary)))
        .with_detail("range_dim", range.ncols() as f64)
        .with_detail("n", n as f64))
}

/// `ℭ*Γ𝔅*` restricted to `𝔎` against `P_{𝔎†}` restricted to `𝔎`, with `ℭ*Γ𝔅*`
/// assembled from section data as `N G_o⁺ X G_c⁺ M_c*`.
pub fn reachable_projection_check(
    node: &ConservativeNode,
    o_points: &[(Complex64, CVector)],
    c_points: &[(Complex64, CVector)],
    seed: u64,
    tol: f64,
) -> Result<Report> {
    let phi = node.schur();
    let mc = input_map(phi, c_points)?;
    let no = output_adjoint_map(phi, o_points)?;
    let gc = c_gram(phi, c_points)?;
    let go = o_gram(phi, o_points)?;
    let x = cross_gram(phi, o_points, c_points)?;
    let composed =
        &no * linalg::pinv_psd(&go, 1e-12) * x * linalg::pinv_psd(&gc, 1e-12) * mc.adjoint();
    let subs = subspaces(phi, seed)?;
    let k = &subs.reachable;
    let lhs = &composed * k;
    let rhs = projector(&subs.reachable_dual) * k;
    Ok(Report::from_residual(
        "reachable_projection",
        gap(&lhs, &rhs),
        tol,
    ))
}

/// The node acting on `(𝔅_bil x, u)` agrees with `𝔅_bil` of the model image and
/// the model output, for each section split into its `C*`-part and `B`-part.
pub fn model_intertwine(node: &ConservativeNode, sections: &[Section], tol: f64) -> Result<Report> {
    let phi = node.schur();
    let (p, m) = (phi.outputs(), phi.inputs());
    let mut worst: f64 = 0.0;
    for s in sections {
        let parts = [
            Section::new(s.point, s.gamma.clone(), CVector::zeros(m)),
            Section::new(s.point, CVector::zeros(p), s.nu.clone()),
            s.clone(),
        ];
        for part in parts {
            let x = SpanElement::single(part);
            let pair = apply(phi, &x)?;
            let state = bilateral_apply(phi, &x)?;
            let z = &phi.a * &state + &phi.b * &pair.u;
            let y = &phi.c * &state + &phi.d * &pair.u;
            let z_model = bilateral_apply(phi, &pair.z)?;
            let scale = 1.0 + linalg::vec_norm(&z_model) + linalg::vec_norm(&pair.y);
            worst =
                worst.max((linalg::vec_diff(&z, &z_model) + linalg::vec_diff(&y, &pair.y)) / scale);
        }
    }
    Ok(Report::from_residual("model_intertwine", worst, tol)
        .with_detail("sections", sections.len() as f64))
}

fn check_e(e: &CMatrix, node0: &StateSpaceSchur, node1: &StateSpaceSchur) -> Result<()> {
    if e.shape() != (node1.n(), node0.n()) {
        return Err(Error::Dimension(format!(
            "E must be {}x{}, got {}x{}",
            node1.n(),
            node0.n(),
            e.nrows(),
            e.ncols()
        )));
    }
    if node0.inputs() != node1.inputs() || node0.outputs() != node1.outputs() {
        return Err(Error::Dimension(
            "nodes must share input and output dimensions".into(),
        ));
    }
    Ok(())
}

/// Residuals of the four blocks of `diag(E, 1)𝔖₀(λ) = 𝔖₁(λ)diag(E, 1)` at each `λ`.
pub fn intertwine_check(
    e: &CMatrix,
    node0: &StateSpaceSchur,
    node1: &StateSpaceSchur,
    lambdas: &[Complex64],
    tol: f64,
) -> Result<Report> {
    check_e(e, node0, node1)?;
    let mut blocks = [0f64; 4];
    for &l in lambdas {
        let s0 = iso_resolvent(node0, l)?;
        let s1 = iso_resolvent(node1, l)?;
        blocks[0] = blocks[0].max(gap(&(e * &s0.xx), &(&s1.xx * e)));
        blocks[1] = blocks[1].max(gap(&(e * &s0.xu), &s1.xu));
        blocks[2] = blocks[2].max(gap(&s0.yx, &(&s1.yx * e)));
        blocks[3] = blocks[3].max(gap(&s0.yu, &s1.yu));
    }
    let worst = blocks.iter().copied().fold(0.0, f64::max);
    Ok(Report::from_residual("resolvent_intertwine", worst, tol)
        .with_detail("block_xx", blocks[0])
        .with_detail("block_xu", blocks[1])
        .with_detail("block_yx", blocks[2])
        .with_detail("block_yu", blocks[3])
        .with_detail("points", lambdas.len() as f64))
}

/// `EA₀ = A₁E`, `EB₀ = B₁`, `C₀ = C₁E`, `D₀ = D₁`: the bounded form of the inclusion
/// `diag(E, 1)S₀ ⊂ S₁diag(E, 1)`.
pub fn direct_intertwine_check(
    e: &CMatrix,
    node0: &StateSpaceSchur,
    node1: &StateSpaceSchur,
    tol: f64,
) -> Result<Report> {
    check_e(e, node0, node1)?;
    let worst = gap(&(e * &node0.a), &(&node1.a * e))
        .max(gap(&(e * &node0.b), &node1.b))
        .max(gap(&node0.c, &(&node1.c * e)))
        .max(gap(&node0.d, &node1.d));
    Ok(Report::from_residual("direct_intertwine", worst, tol))
}

/// Runs the resolvent check for `E*` between the dual nodes and requires the
/// same verdict as for `E` between the primal nodes.
pub fn dual_intertwine_check(
    e: &CMatrix,
    node0: &StateSpaceSchur,
    node1: &StateSpaceSchur,
    lambdas: &[Complex64],
    tol: f64,
) -> Result<Report> {
    let primal = intertwine_check(e, node0, node1, lambdas, tol)?;
    let dual_lambdas: Vec<Complex64> = lambdas.iter().map(|l| l.conj()).collect();
    let dual = intertwine_check(
        &e.adjoint(),
        &node1.tilde(),
        &node0.tilde(),
        &dual_lambdas,
        tol,
    )?;
    let agree = primal.pass == dual.pass;
    Ok(
        Report::from_residual("dual_intertwine", if agree { 0.0 } else { 1.0 }, 0.0)
            .with_detail("primal_pass", f64::from(u8::from(primal.pass)))
            .with_detail("dual_pass", f64::from(u8::from(dual.pass)))
            .with_detail("primal_residual", primal.residual)
            .with_detail("dual_residual", dual.residual),
    )
}

/// `E_{−1} = (α − A₁)E(α − A₀)⁻¹` with the residuals of `E_{−1} = E` on the state
/// space, `E_{−1}A₀ = A₁E`, `E_{−1}B₀ = B₁` and `E(α − A₀)⁻¹ = (α − A₁)⁻¹E_{−1}`.
pub fn ext_intertwine(
    e: &CMatrix,
    node0: &StateSpaceSchur,
    node1: &StateSpaceSchur,
    alpha: Complex64,
    tol: f64,
) -> Result<(CMatrix, Report)> {
    check_e(e, node0, node1)?;
    let n1 = node1.n();
    let r0 = node0.resolvent(alpha)?;
    let shifted1 = identity(n1) * alpha - &node1.a;
    let e_ext = &shifted1 * e * &r0;
    let restrict = gap(&e_ext, e);
    let generator = gap(&(&e_ext * &node0.a), &(&node1.a * e));
    let b_transport = gap(&(&e_ext * &node0.b), &node1.b);
    let resolvent = gap(&(e * &r0), &shifted_solve(&node1.a, alpha, &e_ext)?);
    let worst = restrict.max(generator).max(b_transport).max(resolvent);
    let report = Report::from_residual("ext_intertwine", worst, tol)
        .with_detail("restriction", restrict)
        .with_detail("generator", generator)
        .with_detail("b_transport", b_transport)
        .with_detail("resolvent", resolvent);
    Ok((e_ext, report))
}
