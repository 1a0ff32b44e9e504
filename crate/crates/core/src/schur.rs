//! Rational Schur functions given by state-space realizations.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, frobenius, identity, shifted_solve, shifted_solve_left};
use crate::report::Report;
use crate::sampling::Sampler;
use crate::{CMatrix, Error, Result};

/// Realization `(A, B, C, D)` of `φ(μ) = D + C(μ − A)⁻¹B`, with `A` of size
/// `n × n`, `B` of size `n × m`, `C` of size `p × n` and `D` of size `p × m`.
///
/// Construction checks only shapes. Whether `A` is Hurwitz and `φ` contractive
/// on `iR` is reported by [`schur_class_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceSchur {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl StateSpaceSchur {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let n = a.nrows();
        let (p, m) = d.shape();
        if a.ncols() != n || b.shape() != (n, m) || c.shape() != (p, n) {
            return Err(Error::Dimension(format!(
                "A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        Ok(StateSpaceSchur { a, b, c, d })
    }

    /// Constant function `φ ≡ d` with an empty state space.
    pub fn constant(d: CMatrix) -> Self {
        let (p, m) = d.shape();
        StateSpaceSchur {
            a: CMatrix::zeros(0, 0),
            b: CMatrix::zeros(0, m),
            c: CMatrix::zeros(p, 0),
            d,
        }
    }

    /// Scalar Blaschke factor `(μ − 1)/(μ + 1)` realized by `(−1, √2, −√2, 1)`.
    pub fn blaschke() -> Self {
        let s = std::f64::consts::SQRT_2;
        let one = |z: f64| CMatrix::from_element(1, 1, c(z, 0.0));
        StateSpaceSchur {
            a: one(-1.0),
            b: one(s),
            c: one(-s),
            d: one(1.0),
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Input dimension `m`.
    pub fn inputs(&self) -> usize {
        self.d.ncols()
    }

    /// Output dimension `p`.
    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }

    pub fn resolvent(&self, mu: Complex64) -> Result<CMatrix> {
        shifted_solve(&self.a, mu, &identity(self.n()))
    }

    /// `(μ − A)⁻¹B`.
    pub fn resolvent_b(&self, mu: Complex64) -> Result<CMatrix> {
        shifted_solve(&self.a, mu, &self.b)
    }

    /// `C(μ − A)⁻¹`.
    pub fn c_resolvent(&self, mu: Complex64) -> Result<CMatrix> {
        shifted_solve_left(&self.a, mu, &self.c)
    }

    pub fn eval(&self, mu: Complex64) -> Result<CMatrix> {
        Ok(&self.d + &self.c * self.resolvent_b(mu)?)
    }

    /// `φ'(μ) = −C(μ − A)⁻²B`.
    pub fn derivative(&self, mu: Complex64) -> Result<CMatrix> {
        let rb = self.resolvent_b(mu)?;
        Ok(-(&self.c * shifted_solve(&self.a, mu, &rb)?))
    }

    /// Realization `(A*, C*, B*, D*)` of `φ̃(μ) = φ(μ̄)*`.
    pub fn tilde(&self) -> Self {
        StateSpaceSchur {
            a: self.a.adjoint(),
            b: self.c.adjoint(),
            c: self.b.adjoint(),
            d: self.d.adjoint(),
        }
    }

    /// `(φ(a) − φ(b))/(b − a)` in the pole-free form `C(b − A)⁻¹(a − A)⁻¹B`,
    /// valid also at `a = b`.
    pub fn diff_quotient(&self, a: Complex64, b: Complex64) -> Result<CMatrix> {
        Ok(self.c_resolvent(b)? * self.resolvent_b(a)?)
    }

    /// Realization of `s·φ`, scaling `C` and `D`.
    pub fn scale_outputs(&self, s: f64) -> Self {
        StateSpaceSchur {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.scale(s),
            d: self.d.scale(s),
        }
    }

    /// Realization of `diag(φ, ψ)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        StateSpaceSchur {
            a: linalg::block_diag(&self.a, &other.a),
            b: linalg::block_diag(&self.b, &other.b),
            c: linalg::block_diag(&self.c, &other.c),
            d: linalg::block_diag(&self.d, &other.d),
        }
    }

    /// State-space change of basis `x ↦ Tx`: `(TAT⁻¹, TB, CT⁻¹, D)`.
    pub fn similarity(&self, t: &CMatrix) -> Result<Self> {
        let n = self.n();
        let tinv =
            linalg::solve(t, &identity(n)).ok_or(Error::Invalid("singular similarity".into()))?;
        Self::new(
            t * &self.a * &tinv,
            t * &self.b,
            &self.c * &tinv,
            self.d.clone(),
        )
    }

    pub fn to_json(&self) -> SchurJson {
        SchurJson {
            n: self.n(),
            m: self.inputs(),
            p: self.outputs(),
            a: matrix_to_rows(&self.a),
            b: matrix_to_rows(&self.b),
            c: matrix_to_rows(&self.c),
            d: matrix_to_rows(&self.d),
        }
    }

    pub fn from_json(j: &SchurJson) -> Result<Self> {
        Self::new(
            rows_to_matrix(&j.a, j.n, j.n)?,
            rows_to_matrix(&j.b, j.n, j.m)?,
            rows_to_matrix(&j.c, j.p, j.n)?,
            rows_to_matrix(&j.d, j.p, j.m)?,
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&serde_json::from_str(&text)?)
    }
}

/// On-disk form of a realization: row-major matrices of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurJson {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Rebuilds an `r × c` matrix; rows may be omitted entirely when `c == 0`.
pub fn rows_to_matrix(rows: &[Vec<[f64; 2]>], r: usize, cols: usize) -> Result<CMatrix> {
    if cols == 0 && (rows.is_empty() || rows.len() == r) && rows.iter().all(|row| row.is_empty()) {
        return Ok(CMatrix::zeros(r, 0));
    }
    if rows.len() != r || rows.iter().any(|row| row.len() != cols) {
        return Err(Error::Dimension(format!("expected {r} x {cols} matrix")));
    }
    Ok(CMatrix::from_fn(r, cols, |i, j| {
        c(rows[i][j][0], rows[i][j][1])
    }))
}

/// Residuals of the five conservativity identities, each relative Frobenius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservativeResiduals {
    /// `A + A* + C*C = 0`.
    pub observability: f64,
    /// `B + C*D = 0`.
    pub coupling: f64,
    /// `D*D = I`.
    pub d_isometry: f64,
    /// `DD* = I`.
    pub d_coisometry: f64,
    /// `A + A* + BB* = 0`.
    pub controllability: f64,
}

impl ConservativeResiduals {
    pub fn max(&self) -> f64 {
        [
            self.observability,
            self.coupling,
            self.d_isometry,
            self.d_coisometry,
            self.controllability,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn conservative_residuals(s: &StateSpaceSchur) -> Result<ConservativeResiduals> {
    let (p, m) = (s.outputs(), s.inputs());
    if p != m {
        return Err(Error::Dimension(format!(
            "conservative realization needs p = m, got {p} x {m}"
        )));
    }
    let herm = &s.a + s.a.adjoint();
    let rel =
        |x: &CMatrix, y: &CMatrix| frobenius(&(x + y)) / 1f64.max(frobenius(x)).max(frobenius(y));
    Ok(ConservativeResiduals {
        observability: rel(&herm, &(s.c.adjoint() * &s.c)),
        coupling: rel(&s.b, &(s.c.adjoint() * &s.d)),
        d_isometry: linalg::rel_diff(&(s.d.adjoint() * &s.d), &identity(m)),
        d_coisometry: linalg::rel_diff(&(&s.d * s.d.adjoint()), &identity(p)),
        controllability: rel(&herm, &(&s.b * s.b.adjoint())),
    })
}

/// Realization certified to satisfy `A + A* = −C*C = −BB*`, `B = −C*D`, `D` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservativeNode {
    schur: StateSpaceSchur,
    residual: f64,
}

/// Residual bound used when certifying conservativity.
pub const CONSERVATIVE_TOL: f64 = 1e-10;

impl ConservativeNode {
    pub fn certify(schur: StateSpaceSchur) -> Result<Self> {
        let residual = conservative_residuals(&schur)?.max();
        if residual <= CONSERVATIVE_TOL {
            Ok(ConservativeNode { schur, residual })
        } else {
            Err(Error::NotConservative(residual))
        }
    }

    /// Node with `A = iS − C*C/2`, `B = −C*D` for unitary `D` and Hermitian `S`.
    pub fn from_parts(c_mat: CMatrix, d: CMatrix, s: CMatrix) -> Result<Self> {
        let n = c_mat.ncols();
        if s.shape() != (n, n) {
            return Err(Error::Dimension("S must be n x n".into()));
        }
        let ctc = c_mat.adjoint() * &c_mat;
        let a = s * c(0.0, 1.0) - ctc.scale(0.5);
        let b = -(c_mat.adjoint() * &d);
        Self::certify(StateSpaceSchur::new(a, b, c_mat, d)?)
    }

    pub fn schur(&self) -> &StateSpaceSchur {
        &self.schur
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Adjoint node `(A*, C*, B*, D*)`, again conservative.
    pub fn dual(&self) -> Self {
        ConservativeNode {
            schur: self.schur.tilde(),
            residual: self.residual,
        }
    }
}

/// Random conservative node with `n` states and `m` inputs and outputs.
pub fn make_conservative(n: usize, m: usize, seed: u64) -> Result<ConservativeNode> {
    let mut s = Sampler::new(seed);
    let d = s.unitary(m);
    let c_mat = s.cmatrix(m, n);
    let herm = s.hermitian(n);
    ConservativeNode::from_parts(c_mat, d, herm)
}

/// Hurwitz test plus `sup ‖φ(iω)‖ ≤ 1 + tol` over `grid_size` log-spaced
/// frequencies in `[10⁻³, 10³]`, both signs, together with `ω = 0` and `ω = ∞`.
pub fn schur_class_check(phi: &StateSpaceSchur, grid_size: usize, tol: f64) -> Report {
    let abscissa = linalg::spectral_abscissa(&phi.a);
    let hurwitz = abscissa < 0.0;
    let mut sup = linalg::max_singular_value(&phi.d);
    let mut singular = false;
    let mut omegas = vec![0.0];
    for k in 0..grid_size {
        let t = if grid_size > 1 {
            k as f64 / (grid_size - 1) as f64
        } else {
            0.5
        };
        let w = 10f64.powf(-3.0 + 6.0 * t);
        omegas.push(w);
        omegas.push(-w);
    }
    for w in omegas {
        match phi.eval(c(0.0, w)) {
            Ok(v) => sup = sup.max(linalg::max_singular_value(&v)),
            Err(_) => singular = true,
        }
    }
    let excess = if singular || !hurwitz {
        f64::INFINITY
    } else {
        (sup - 1.0).max(0.0)
    };
    Report::from_residual("schur_class", excess, tol)
        .with_detail("sup_norm", sup)
        .with_detail("spectral_abscissa", abscissa)
        .with_detail("hurwitz", f64::from(u8::from(hurwitz)))
        .with_detail("grid_size", grid_size as f64)
}

/// Cayley disk map `m_α(z) = (α − ᾱz)/(1 + z)`, sending `D` onto `C₊` for `Re α > 0`.
pub fn cayley_map(alpha: Complex64, z: Complex64) -> Complex64 {
    (alpha - alpha.conj() * z) / (1.0 + z)
}

/// Inverse of [`cayley_map`]: `(α − μ)/(ᾱ + μ)`.
pub fn cayley_map_inv(alpha: Complex64, mu: Complex64) -> Complex64 {
    (alpha - mu) / (alpha.conj() + mu)
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    if alpha.re > 0.0 && alpha.re.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDomain(
            alpha,
            "Cayley parameter must satisfy Re α > 0",
        ))
    }
}

/// `φ_α(z) = φ(m_α(z))` for `|z| < 1`.
pub fn cayley_function(phi: &StateSpaceSchur, alpha: Complex64, z: Complex64) -> Result<CMatrix> {
    check_alpha(alpha)?;
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDomain(
            z,
            "disk functions are evaluated in |z| < 1",
        ));
    }
    phi.eval(cayley_map(alpha, z))
}

/// Disk-convention realization: `ϕ(z) = D + zC(1 − zA)⁻¹B`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskSchur {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl DiskSchur {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let s = StateSpaceSchur::new(a, b, c, d)?;
        Ok(DiskSchur {
            a: s.a,
            b: s.b,
            c: s.c,
            d: s.d,
        })
    }

    /// Realization of `φ ∘ m_α`: `((ᾱ + A)(α − A)⁻¹, √(2Re α)(α − A)⁻¹B,
    /// √(2Re α)C(α − A)⁻¹, φ(α))`.
    pub fn cayley(phi: &StateSpaceSchur, alpha: Complex64) -> Result<Self> {
        check_alpha(alpha)?;
        let n = phi.n();
        let r = phi.resolvent(alpha)?;
        let s = (2.0 * alpha.re).sqrt();
        let a = (CMatrix::from_diagonal_element(n, n, alpha.conj()) + &phi.a) * &r;
        Ok(DiskSchur {
            a,
            b: (&r * &phi.b).scale(s),
            c: (&phi.c * &r).scale(s),
            d: phi.eval(alpha)?,
        })
    }

    pub fn inputs(&self) -> usize {
        self.d.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }

    /// `(1 − ζA)⁻¹B`.
    pub fn resolvent_b(&self, zeta: Complex64) -> Result<CMatrix> {
        let n = self.a.nrows();
        let m = identity(n) - &self.a * zeta;
        linalg::solve(&m, &self.b).ok_or(Error::SingularResolvent(zeta))
    }

    /// `C(1 − zA)⁻¹`.
    pub fn c_resolvent(&self, z: Complex64) -> Result<CMatrix> {
        let n = self.a.nrows();
        let m = identity(n) - &self.a * z;
        let x =
            linalg::solve(&m.adjoint(), &self.c.adjoint()).ok_or(Error::SingularResolvent(z))?;
        Ok(x.adjoint())
    }

    pub fn eval(&self, z: Complex64) -> Result<CMatrix> {
        Ok(&self.d + (&self.c * self.resolvent_b(z)?) * z)
    }

    /// `(ϕ(z) − ϕ(ζ))/(z − ζ)` as `C(1 − zA)⁻¹(1 − ζA)⁻¹B`, valid also at `z = ζ`.
    pub fn diff_quotient(&self, z: Complex64, zeta: Complex64) -> Result<CMatrix> {
        Ok(self.c_resolvent(z)? * self.resolvent_b(zeta)?)
    }

    /// `ϕ'(0) = CB`.
    pub fn derivative_at_origin(&self) -> CMatrix {
        &self.c * &self.b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(m: &CMatrix) -> Complex64 {
        assert_eq!(m.shape(), (1, 1));
        m[(0, 0)]
    }

    #[test]
    fn blaschke_values() {
        let b = StateSpaceSchur::blaschke();
        assert!(scalar(&b.eval(c(1.0, 0.0)).unwrap()).norm() < 1e-15);
        assert!((scalar(&b.eval(c(2.0, 0.0)).unwrap()) - 1.0 / 3.0).norm() < 1e-15);
        let z = c(0.3, 1.7);
        assert!((scalar(&b.eval(z).unwrap()) - (z - 1.0) / (z + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn blaschke_is_self_tilde() {
        let b = StateSpaceSchur::blaschke();
        let t = b.tilde();
        for z in [c(0.3, 1.1), c(2.0, -0.4)] {
            assert!((scalar(&t.eval(z).unwrap()) - scalar(&b.eval(z).unwrap())).norm() < 1e-15);
        }
    }

    #[test]
    fn diff_quotient_of_blaschke() {
        let b = StateSpaceSchur::blaschke();
        let q = scalar(&b.diff_quotient(c(1.0, 0.0), c(2.0, 0.0)).unwrap());
        assert!((q + 1.0 / 3.0).norm() < 1e-15);
        // Confluent case: −φ'(1) = −1/2.
        let q = scalar(&b.diff_quotient(c(1.0, 0.0), c(1.0, 0.0)).unwrap());
        assert!((q + 0.5).norm() < 1e-15);
    }

    #[test]
    fn singular_resolvent_is_reported() {
        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let bad = StateSpaceSchur::new(one.clone(), one.clone(), one.clone(), one).unwrap();
        assert!(matches!(
            bad.eval(c(1.0, 0.0)),
            Err(Error::SingularResolvent(_))
        ));
    }

    #[test]
    fn shapes_are_validated() {
        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        assert!(StateSpaceSchur::new(one.clone(), CMatrix::zeros(2, 1), one.clone(), one).is_err());
    }

    #[test]
    fn from_parts_reproduces_blaschke() {
        let one = |z: f64| CMatrix::from_element(1, 1, c(z, 0.0));
        let node = ConservativeNode::from_parts(one(-std::f64::consts::SQRT_2), one(1.0), one(0.0))
            .unwrap();
        assert!(linalg::rel_diff(&node.schur().a, &StateSpaceSchur::blaschke().a) < 1e-15);
        assert!(linalg::rel_diff(&node.schur().b, &StateSpaceSchur::blaschke().b) < 1e-15);
    }

    #[test]
    fn random_conservative_nodes_certify() {
        for seed in 0..5 {
            let node = make_conservative(3, 2, seed).unwrap();
            assert!(node.residual() <= 1e-12);
            assert!(linalg::spectral_abscissa(&node.schur().a) < 0.0);
            assert!(schur_class_check(node.schur(), 64, 1e-9).pass);
        }
    }

    #[test]
    fn scaled_blaschke_is_not_conservative() {
        let half = StateSpaceSchur::blaschke().scale_outputs(0.5);
        assert!(matches!(
            ConservativeNode::certify(half),
            Err(Error::NotConservative(_))
        ));
    }

    #[test]
    fn schur_check_verdicts() {
        assert!(schur_class_check(&StateSpaceSchur::blaschke(), 512, 1e-9).pass);
        let big = StateSpaceSchur::constant(CMatrix::from_element(1, 1, c(1.5, 0.0)));
        let r = schur_class_check(&big, 16, 1e-9);
        assert!(!r.pass);
        assert!((r.residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cayley_of_blaschke_is_minus_z() {
        let b = StateSpaceSchur::blaschke();
        for z in [c(0.0, 0.0), c(0.5, 0.0), c(-0.3, 0.4)] {
            let v = scalar(&cayley_function(&b, c(1.0, 0.0), z).unwrap());
            assert!((v + z).norm() < 1e-15);
        }
        assert!(cayley_function(&b, c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(cayley_function(&b, c(-1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn disk_realization_matches_composition() {
        let phi = make_conservative(3, 2, 11).unwrap().schur().clone();
        let alpha = c(0.8, -0.6);
        let dr = DiskSchur::cayley(&phi, alpha).unwrap();
        for z in [c(0.0, 0.0), c(0.4, 0.1), c(-0.2, -0.7)] {
            let lhs = dr.eval(z).unwrap();
            let rhs = cayley_function(&phi, alpha, z).unwrap();
            assert!(linalg::rel_diff(&lhs, &rhs) < 1e-13);
        }
    }

    #[test]
    fn cayley_maps_invert() {
        let alpha = c(1.3, 0.4);
        let z = c(0.2, -0.5);
        let mu = cayley_map(alpha, z);
        assert!(mu.re > 0.0);
        assert!((cayley_map_inv(alpha, mu) - z).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip_including_empty_state() {
        for phi in [
            StateSpaceSchur::blaschke(),
            StateSpaceSchur::constant(CMatrix::from_element(1, 1, c(0.3, 0.0))),
        ] {
            let text = serde_json::to_string(&phi.to_json()).unwrap();
            let back = StateSpaceSchur::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, phi);
        }
    }
}
