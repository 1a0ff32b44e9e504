//! Seeded sampling of points, vectors and matrices.
//!
//! Every random quantity in the crate flows through [`Sampler`], so a seed fixes
//! all outputs bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel::KernelPoint;
use crate::span::{Section, SpanElement};
use crate::{CMatrix, CVector};

pub struct Sampler {
    rng: ChaCha8Rng,
}

/// Fixed part of the default point cloud: real parts `{0.5, 1, 2}` shifted by `±0.7i`.
pub fn grid_points() -> Vec<Complex64> {
    let mut out = Vec::new();
    for re in [0.5, 1.0, 2.0] {
        for im in [-0.7, 0.7] {
            out.push(Complex64::new(re, im));
        }
    }
    out
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian (unit variance overall).
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal()) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn cvector(&mut self, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| self.complex_normal())
    }

    pub fn cmatrix(&mut self, r: usize, c: usize) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| self.complex_normal())
    }

    pub fn hermitian(&mut self, n: usize) -> CMatrix {
        let g = self.cmatrix(n, n);
        (&g + g.adjoint()).scale(0.5)
    }

    /// Haar-distributed unitary via QR of a Gaussian matrix with phase correction.
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        if n == 0 {
            return CMatrix::zeros(0, 0);
        }
        let g = self.cmatrix(n, n);
        let qr = g.qr();
        let (q, r) = qr.unpack();
        let mut q = q;
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        q
    }

    /// Point in the right half-plane drawn from the box `[0.2, 3] × [−3, 3]i`.
    pub fn half_plane_point(&mut self) -> Complex64 {
        Complex64::new(self.uniform(0.2, 3.0), self.uniform(-3.0, 3.0))
    }

    /// Point of the default cloud: a grid point or a uniform box sample, evenly.
    pub fn cloud_point(&mut self) -> Complex64 {
        if self.rng.random_bool(0.5) {
            let g = grid_points();
            g[self.index(g.len())]
        } else {
            self.half_plane_point()
        }
    }

    pub fn kernel_point(&mut self) -> KernelPoint {
        let l = self.cloud_point();
        let ls = self.cloud_point();
        KernelPoint::new(l, ls).expect("sampled points lie in the right half-plane")
    }

    /// Point of the open disk of radius `r`.
    pub fn disk_point(&mut self, r: f64) -> Complex64 {
        let rad = r * self.uniform(0.0, 1.0).sqrt();
        let ang = self.uniform(0.0, std::f64::consts::TAU);
        Complex64::from_polar(rad, ang)
    }

    pub fn section(&mut self, p: usize, m: usize) -> Section {
        let point = self.kernel_point();
        Section {
            point,
            gamma: self.cvector(p),
            nu: self.cvector(m),
        }
    }

    /// Span of `1..=max_terms` random sections.
    pub fn span(&mut self, p: usize, m: usize, max_terms: usize) -> SpanElement {
        let k = 1 + self.index(max_terms.max(1));
        SpanElement::from_sections((0..k).map(|_| self.section(p, m)).collect())
    }
}
