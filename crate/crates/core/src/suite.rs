//! Named verification suites over a realization, each a deterministic function
//! of its inputs and the run configuration.

use num_complex::Complex64;

use crate::disk::{
    disk_isometry_check, unitarity_check, xi_check, CayleyColligation, DiskSection, DiskSpan,
};
use crate::ext::{ext_domain_residual, ext_kernel_check, iota_bound_check};
use crate::kernel::kolmogorov_residual;
use crate::linalg::{c, rel_diff};
use crate::model::{
    energy_balance_check, explicit_route_residual, output_limit_residual,
    resolvent_identity_residual, transfer_check,
};
use crate::past_future::{contractivity_check, duality_check};
use crate::realize::{
    bilateral_check, direct_intertwine_check, dual_intertwine_check, ext_intertwine,
    gamma_consistency, intertwine_check, io_maps_check, model_intertwine,
};
use crate::sampling::Sampler;
use crate::schur::{
    cayley_function, conservative_residuals, schur_class_check, DiskSchur, CONSERVATIVE_TOL,
};
use crate::span::{decay_check, isometry_sections_check, positivity_check};
use crate::{
    CMatrix, CVector, ConservativeNode, KernelPoint, Report, Result, RunConfig, Section,
    SpanElement, StateSpaceSchur,
};

/// Real parts at which the decay bound is probed.
pub const DECAY_REAL_PARTS: [f64; 4] = [1.0, 10.0, 100.0, 1e4];

/// Largest number of sections in a sampled span.
const SPAN_TERMS: usize = 3;

/// Deterministic sample streams; each suite draws from its own sub-seed so
/// adding a check to one suite does not shift another.
fn sampler(cfg: &RunConfig, salt: u64) -> Sampler {
    Sampler::new(
        cfg.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(salt),
    )
}

/// Schur-class certificate, with the conservativity residual of square
/// realizations attached as details.
pub fn validate(phi: &StateSpaceSchur, cfg: &RunConfig) -> Result<Vec<Report>> {
    let mut r = schur_class_check(phi, cfg.grid, cfg.tol);
    if phi.inputs() == phi.outputs() {
        let res = conservative_residuals(phi)?.max();
        r = r
            .with_detail("conservative_residual", res)
            .with_detail("conservative", f64::from(u8::from(res <= CONSERVATIVE_TOL)));
    }
    Ok(vec![r])
}

fn basis(s: &mut Sampler, phi: &StateSpaceSchur, count: usize) -> Vec<(KernelPoint, CVector)> {
    let (p, m) = (phi.outputs(), phi.inputs());
    (0..count)
        .map(|_| (s.kernel_point(), s.cvector(p + m)))
        .collect()
}

fn spans(s: &mut Sampler, phi: &StateSpaceSchur, count: usize) -> Vec<SpanElement> {
    (0..count)
        .map(|_| s.span(phi.outputs(), phi.inputs(), SPAN_TERMS))
        .collect()
}

fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter()
        .try_fold(0.0, |acc: f64, r| r.map(|v| acc.max(v)))
}

/// The half-plane model suite: kernel positivity, section isometries, energy
/// balance, transfer recovery, resolvent identity, decay, the two routes to
/// the model action, the output limit, past/future checks, the extrapolation
/// space and, for conservative realizations, the realization-side checks.
pub fn model(phi: &StateSpaceSchur, cfg: &RunConfig) -> Result<Vec<Report>> {
    let (p, m) = (phi.outputs(), phi.inputs());
    let mut s = sampler(cfg, 1);
    let mut out = Vec::new();

    out.push(positivity_check(
        phi,
        &basis(&mut s, phi, cfg.points),
        cfg.postol,
    )?);
    let points: Vec<KernelPoint> = (0..cfg.points).map(|_| s.kernel_point()).collect();
    out.push(isometry_sections_check(phi, &points, cfg.tol)?);

    let xs = spans(&mut s, phi, cfg.points);
    out.push(energy_balance_check(phi, &xs, cfg.tol)?);

    let cases: Vec<(Complex64, CVector)> = (0..10)
        .map(|_| (s.half_plane_point(), s.cvector(m)))
        .collect();
    out.push(transfer_check(phi, &cases, cfg.tol)?);

    let probes: Vec<KernelPoint> = (0..5).map(|_| s.kernel_point()).collect();
    let (alpha, beta) = (cfg.alpha, s.half_plane_point());
    let res = worst(
        xs.iter()
            .map(|x| resolvent_identity_residual(phi, alpha, beta, x, &probes)),
    )?;
    out.push(
        Report::from_residual("resolvent_identity", res, cfg.tol)
            .with_detail("spans", xs.len() as f64),
    );

    let decay: Vec<Report> = xs
        .iter()
        .take(10)
        .map(|x| decay_check(phi, x, &DECAY_REAL_PARTS))
        .collect::<Result<_>>()?;
    out.push(Report::all("decay_bound", &decay));

    let route = worst(xs.iter().map(|x| explicit_route_residual(phi, x, &probes)))?;
    out.push(
        Report::from_residual("explicit_route", route, cfg.tol)
            .with_detail("spans", xs.len() as f64),
    );

    let limit = worst(xs.iter().map(|x| output_limit_residual(phi, x, 1e6)))?;
    out.push(Report::from_residual("output_limit", limit, 1e-5));

    let o_points: Vec<(Complex64, CVector)> = (0..cfg.points / 2)
        .map(|_| (s.half_plane_point(), s.cvector(p)))
        .collect();
    let c_points: Vec<(Complex64, CVector)> = (0..cfg.points / 2)
        .map(|_| (s.half_plane_point(), s.cvector(m)))
        .collect();
    out.push(contractivity_check(phi, &o_points, &c_points, cfg.postol)?);
    out.push(duality_check(phi, &o_points, &c_points, cfg.tol)?);

    let ext_basis = basis(&mut s, phi, cfg.points.min(10));
    let inputs: Vec<CVector> = (0..3).map(|_| s.cvector(m)).collect();
    out.push(ext_kernel_check(
        phi, cfg.beta, &ext_basis, &inputs, cfg.tol,
    )?);
    out.push(iota_bound_check(phi, cfg.beta, &xs)?);
    let dom = worst(
        xs.iter()
            .map(|x| ext_domain_residual(phi, cfg.beta, x, &probes)),
    )?;
    out.push(Report::from_residual("ext_domain", dom, cfg.tol));

    if let Ok(node) = ConservativeNode::certify(phi.clone()) {
        out.extend(realization(&node, cfg)?);
    }
    Ok(out)
}

/// Checks that use the state space of a conservative realization.
pub fn realization(node: &ConservativeNode, cfg: &RunConfig) -> Result<Vec<Report>> {
    let phi = node.schur();
    let (p, m) = (phi.outputs(), phi.inputs());
    let mut s = sampler(cfg, 2);
    let points: Vec<KernelPoint> = (0..cfg.points).map(|_| s.kernel_point()).collect();
    let sections: Vec<Section> = (0..cfg.points).map(|_| s.section(p, m)).collect();
    let probes: Vec<KernelPoint> = (0..5).map(|_| s.kernel_point()).collect();
    let o_points: Vec<(Complex64, CVector)> = (0..cfg.points / 2)
        .map(|_| (s.half_plane_point(), s.cvector(p)))
        .collect();
    let c_points: Vec<(Complex64, CVector)> = (0..cfg.points / 2)
        .map(|_| (s.half_plane_point(), s.cvector(m)))
        .collect();
    Ok(vec![
        kolmogorov_residual(phi, &points, cfg.tol)?,
        bilateral_check(node, &sections, &probes, cfg.seed, cfg.tol)?,
        model_intertwine(node, &sections, cfg.tol)?,
        io_maps_check(phi, &o_points, &c_points, cfg.postol)?,
        gamma_consistency(phi, &o_points, &c_points, cfg.tol)?,
    ])
}

/// Disk recovery at `cfg.alpha`: the realized disk function against `φ∘m_α`,
/// the disk model isometry, the Cayley colligation and the unitary `Ξ`.
pub fn cayley(phi: &StateSpaceSchur, cfg: &RunConfig) -> Result<Vec<Report>> {
    let (p, m) = (phi.outputs(), phi.inputs());
    let alpha = cfg.alpha;
    let disk = DiskSchur::cayley(phi, alpha)?;
    let mut s = sampler(cfg, 3);

    let zs: Vec<Complex64> = (0..10).map(|_| s.disk_point(0.95)).collect();
    let rec = worst(
        zs.iter()
            .map(|&z| Ok(rel_diff(&disk.eval(z)?, &cayley_function(phi, alpha, z)?))),
    )?;
    let mut out =
        vec![Report::from_residual("disk_recovery", rec, cfg.tol)
            .with_detail("points", zs.len() as f64)];

    let dsections: Vec<DiskSection> = (0..cfg.points.min(10))
        .map(|_| DiskSection::new(s.disk_point(0.9), s.cvector(p), s.cvector(m)))
        .collect();
    let dspans: Vec<DiskSpan> = dsections.iter().cloned().map(DiskSpan::single).collect();
    let dus: Vec<CVector> = dspans.iter().map(|_| s.cvector(m)).collect();
    out.push(disk_isometry_check(&disk, &dspans, &dus, cfg.tol)?);

    let col = CayleyColligation::new(phi, alpha)?;
    let xs = spans(&mut s, phi, cfg.points);
    let us: Vec<CVector> = xs.iter().map(|_| s.cvector(m)).collect();
    out.push(unitarity_check(&col, &xs, &us, cfg.tol)?);

    let probes: Vec<KernelPoint> = (0..5).map(|_| s.kernel_point()).collect();
    out.push(xi_check(phi, alpha, &dsections, &probes, cfg.tol)?);
    Ok(out)
}

/// Intertwinement of `node0` and `node1` by `E` through the i/s/o resolvents,
/// its bounded form, the dual check and the extrapolated `E_{−1}` at `cfg.alpha`.
pub fn intertwine(
    e: &CMatrix,
    node0: &StateSpaceSchur,
    node1: &StateSpaceSchur,
    cfg: &RunConfig,
) -> Result<Vec<Report>> {
    let mut s = sampler(cfg, 4);
    let lambdas: Vec<Complex64> = (0..cfg.points.min(10))
        .map(|_| s.half_plane_point())
        .collect();
    let (_, ext) = ext_intertwine(e, node0, node1, cfg.alpha, cfg.tol)?;
    Ok(vec![
        intertwine_check(e, node0, node1, &lambdas, cfg.tol)?,
        direct_intertwine_check(e, node0, node1, cfg.tol)?,
        dual_intertwine_check(e, node0, node1, &lambdas, cfg.tol)?,
        ext,
    ])
}

/// Roll-up of a report stream: counts and the overall verdict.
pub fn summary(reports: &[Report]) -> Report {
    let failed = reports.iter().filter(|r| !r.pass).count();
    Report::from_residual("summary", failed as f64, 0.0)
        .with_detail("reports", reports.len() as f64)
        .with_detail("failed", failed as f64)
}

/// Parses `re,im` (or a bare real) into a complex number.
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let mut parts = text.split(',').map(str::trim);
    let re = parts.next()?.parse().ok()?;
    let im = match parts.next() {
        Some(t) => t.parse().ok()?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return None;
    }
    Some(c(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_flags() {
        assert_eq!(parse_complex("2,1"), Some(c(2.0, 1.0)));
        assert_eq!(parse_complex(" 0.5 "), Some(c(0.5, 0.0)));
        assert_eq!(parse_complex("1,-3e-2"), Some(c(1.0, -0.03)));
        assert_eq!(parse_complex("1,2,3"), None);
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn summary_counts_failures() {
        let rs = [
            Report::from_residual("a", 0.0, 1.0),
            Report::from_residual("b", 2.0, 1.0),
        ];
        let s = summary(&rs);
        assert!(!s.pass);
        assert_eq!(s.detail("failed"), Some(1.0));
        assert!(summary(&rs[..1]).pass);
    }

    #[test]
    fn unitary_constant_suite_is_vacuous_but_passes() {
        let phi = StateSpaceSchur::constant(CMatrix::from_element(1, 1, c(0.0, 1.0)));
        let cfg = RunConfig {
            points: 6,
            ..RunConfig::default()
        };
        for r in validate(&phi, &cfg)
            .unwrap()
            .into_iter()
            .chain(model(&phi, &cfg).unwrap())
        {
            assert!(r.pass, "{r:?}");
        }
    }
}
