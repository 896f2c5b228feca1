//! Collocation grid on the unit disk.
//!
//! Angular direction: equispaced Fourier collocation with `n_theta` nodes
//! (even). Radial direction: the positive half of a Chebyshev extreme-point
//! grid on [-1, 1] with an odd polynomial degree, so the origin is not a node
//! and the boundary r = 1 is. A function on the disk satisfies
//! `f(-r, theta) = f(r, theta + pi)`, so radial differentiation acts on the
//! antipodally extended column and is spectrally accurate; the parity
//! constraints per angular mode (mode m vanishes to order m at the origin)
//! are inherited from that identification rather than imposed.
//!
//! Radial quadrature weights are moment-fitted in u = r^2: the rule
//! integrates polynomials in u of degree <= n_r - 1 (that is, even
//! polynomials in r of degree <= 2 n_r - 2) exactly against r dr. The
//! angular average of a smooth disk field is even in r under the antipodal
//! identification, so this is the exactness class that disk integrals
//! actually exercise; odd 1-D radial moments converge spectrally instead.
//! The fitted weights are positive (checked at construction) and the moment
//! system in the Chebyshev basis of u has condition number ~1.5.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Collocation grid on the unit disk. Immutable after construction; shared
/// between fields via `Arc`.
pub struct DiskGrid {
    /// Number of radial nodes in (0, 1].
    pub n_r: usize,
    /// Number of angular nodes (even).
    pub n_theta: usize,
    /// Radial nodes, strictly increasing, last node exactly 1.
    pub radial_nodes: Vec<f64>,
    /// Radial quadrature weights for integration against r dr on [0, 1].
    pub quadrature_weights: Vec<f64>,
    /// Angular nodes theta_k = 2 pi k / n_theta.
    pub thetas: Vec<f64>,
    cos_t: Vec<f64>,
    sin_t: Vec<f64>,
    /// Chebyshev differentiation matrix on the 2 n_r extended nodes.
    cheb_d: DMatrix<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DiskGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DiskGrid({}x{})", self.n_r, self.n_theta)
    }
}

impl PartialEq for DiskGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_r == other.n_r && self.n_theta == other.n_theta
    }
}

fn cheb_diff_matrix(nodes: &[f64]) -> DMatrix<f64> {
    let n = nodes.len();
    let mut d = DMatrix::zeros(n, n);
    let c = |i: usize| -> f64 {
        if i == 0 || i == n - 1 {
            2.0
        } else {
            1.0
        }
    };
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                d[(i, j)] = c(i) / c(j) * sign / (nodes[i] - nodes[j]);
            }
        }
    }
    // Diagonal by the negative-sum trick: rows annihilate constants exactly.
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                s += d[(i, j)];
            }
        }
        d[(i, i)] = -s;
    }
    d
}

/// Chebyshev polynomial T_k(x) by recurrence.
fn cheb_t(k: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    match k {
        0 => t0,
        1 => t1,
        _ => {
            for _ in 2..=k {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            t1
        }
    }
}

/// integral of T_k over [-1, 1]: 2/(1-k^2) for even k, 0 for odd k.
fn cheb_integral(k: usize) -> f64 {
    if k % 2 == 0 {
        2.0 / (1.0 - (k * k) as f64)
    } else {
        0.0
    }
}

impl DiskGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Arc<Self>> {
        if n_r < 8 {
            return Err(Error::Config(format!("n_r = {n_r} must be >= 8")));
        }
        if n_theta < 16 || n_theta % 2 != 0 {
            return Err(Error::Config(format!(
                "n_theta = {n_theta} must be even and >= 16"
            )));
        }
        let big_n = 2 * n_r - 1; // polynomial degree of the extended grid
        let ext_nodes: Vec<f64> = (0..=big_n)
            .map(|i| (PI * i as f64 / big_n as f64).cos())
            .collect();
        // Positive nodes are i = 0..n_r (descending); store ascending.
        let mut radial_nodes: Vec<f64> = ext_nodes[..n_r].to_vec();
        radial_nodes.reverse();
        // Snap the boundary node exactly.
        let last = radial_nodes.len() - 1;
        radial_nodes[last] = 1.0;

        let cheb_d = cheb_diff_matrix(&ext_nodes);

        // Moment fit in u = r^2, Chebyshev basis: sum_j w_j T_k(2 u_j - 1)
        // equals the moment of T_k(2u - 1) against du/2 on [0, 1]
        // (the substitution u = r^2 gives r dr = du / 2).
        let mut a = DMatrix::zeros(n_r, n_r);
        let mut m = nalgebra::DVector::zeros(n_r);
        for k in 0..n_r {
            for j in 0..n_r {
                let u = radial_nodes[j] * radial_nodes[j];
                a[(k, j)] = cheb_t(k, 2.0 * u - 1.0);
            }
            // int_0^1 T_k(2u-1) du = (1/2) int_{-1}^1 T_k(s) ds
            m[k] = 0.5 * (0.5 * cheb_integral(k));
        }
        let lu = a.lu();
        let w = lu
            .solve(&m)
            .ok_or_else(|| Error::SolveFailure("radial quadrature moment system".into()))?;
        let quadrature_weights: Vec<f64> = w.iter().copied().collect();
        for (j, &wj) in quadrature_weights.iter().enumerate() {
            if !(wj > 0.0) {
                return Err(Error::Config(format!(
                    "nonpositive radial quadrature weight w[{j}] = {wj:.3e} at n_r = {n_r}"
                )));
            }
        }

        let thetas: Vec<f64> = (0..n_theta)
            .map(|k| 2.0 * PI * k as f64 / n_theta as f64)
            .collect();
        let cos_t = thetas.iter().map(|t| t.cos()).collect();
        let sin_t = thetas.iter().map(|t| t.sin()).collect();

        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(n_theta);
        let fft_inv = planner.plan_fft_inverse(n_theta);

        Ok(Arc::new(DiskGrid {
            n_r,
            n_theta,
            radial_nodes,
            quadrature_weights,
            thetas,
            cos_t,
            sin_t,
            cheb_d,
            fft_fwd,
            fft_inv,
        }))
    }

    /// Node position in Cartesian coordinates.
    pub fn position(&self, ja: usize, k: usize) -> (f64, f64) {
        let r = self.radial_nodes[ja];
        (r * self.cos_t[k], r * self.sin_t[k])
    }

    /// Fill an array from a function of the Cartesian coordinates.
    pub fn eval(&self, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
        let mut out = Array2::zeros((self.n_r, self.n_theta));
        for ja in 0..self.n_r {
            for k in 0..self.n_theta {
                let (x, y) = self.position(ja, k);
                out[[ja, k]] = f(x, y);
            }
        }
        out
    }

    /// Extended column representation: row i of the result corresponds to the
    /// extended Chebyshev node x_i, using f(-r, theta) = f(r, theta + pi).
    fn extend(&self, f: &Array2<f64>) -> DMatrix<f64> {
        let (n_r, n_t) = (self.n_r, self.n_theta);
        let half = n_t / 2;
        let mut ext = DMatrix::zeros(2 * n_r, n_t);
        for i in 0..n_r {
            let ja = n_r - 1 - i;
            for k in 0..n_t {
                ext[(i, k)] = f[[ja, k]];
            }
        }
        for i in n_r..2 * n_r {
            let ja = i - n_r;
            for k in 0..n_t {
                ext[(i, k)] = f[[ja, (k + half) % n_t]];
            }
        }
        ext
    }

    /// Radial derivative (spectral via the extended Chebyshev grid).
    pub fn d_r(&self, f: &Array2<f64>) -> Array2<f64> {
        let ext = self.extend(f);
        let der = &self.cheb_d * ext;
        let mut out = Array2::zeros((self.n_r, self.n_theta));
        for i in 0..self.n_r {
            let ja = self.n_r - 1 - i;
            for k in 0..self.n_theta {
                out[[ja, k]] = der[(i, k)];
            }
        }
        out
    }

    /// Angular derivative (spectral via FFT; the Nyquist mode of the
    /// derivative is set to zero).
    pub fn d_theta(&self, f: &Array2<f64>) -> Array2<f64> {
        let n = self.n_theta;
        let mut out = Array2::zeros((self.n_r, n));
        let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        for ja in 0..self.n_r {
            for k in 0..n {
                buf[k] = Complex64::new(f[[ja, k]], 0.0);
            }
            self.fft_fwd.process(&mut buf);
            for (idx, v) in buf.iter_mut().enumerate() {
                let m = if idx < n / 2 {
                    idx as f64
                } else if idx == n / 2 {
                    0.0
                } else {
                    idx as f64 - n as f64
                };
                *v = Complex64::new(0.0, m) * *v;
            }
            self.fft_inv.process(&mut buf);
            for k in 0..n {
                out[[ja, k]] = buf[k].re / n as f64;
            }
        }
        out
    }

    /// Forward angular FFT of every radial row (unnormalized, rustfft
    /// convention). Used by the mode-separated elliptic solvers.
    pub fn angular_modes(&self, f: &Array2<f64>) -> Vec<Vec<Complex64>> {
        let n = self.n_theta;
        let mut rows = Vec::with_capacity(self.n_r);
        let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        for ja in 0..self.n_r {
            for k in 0..n {
                buf[k] = Complex64::new(f[[ja, k]], 0.0);
            }
            self.fft_fwd.process(&mut buf);
            rows.push(buf.clone());
        }
        rows
    }

    /// Inverse of [`angular_modes`], discarding imaginary residue.
    pub fn from_angular_modes(&self, rows: &[Vec<Complex64>]) -> Array2<f64> {
        let n = self.n_theta;
        let mut out = Array2::zeros((self.n_r, n));
        let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        for (ja, row) in rows.iter().enumerate() {
            buf.copy_from_slice(row);
            self.fft_inv.process(&mut buf);
            for k in 0..n {
                out[[ja, k]] = buf[k].re / n as f64;
            }
        }
        out
    }

    /// Zero all angular Fourier modes with |m| > keep.
    pub fn angular_lowpass(&self, f: &Array2<f64>, keep: usize) -> Array2<f64> {
        let n = self.n_theta;
        let mut rows = self.angular_modes(f);
        for row in rows.iter_mut() {
            for (idx, v) in row.iter_mut().enumerate() {
                let m = if idx <= n / 2 { idx } else { n - idx };
                if m > keep {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
        self.from_angular_modes(&rows)
    }

    /// Cartesian derivative along y^1.
    pub fn d1(&self, f: &Array2<f64>) -> Array2<f64> {
        let dr = self.d_r(f);
        let dt = self.d_theta(f);
        let mut out = Array2::zeros((self.n_r, self.n_theta));
        for ja in 0..self.n_r {
            let r = self.radial_nodes[ja];
            for k in 0..self.n_theta {
                out[[ja, k]] = self.cos_t[k] * dr[[ja, k]] - self.sin_t[k] / r * dt[[ja, k]];
            }
        }
        out
    }

    /// Cartesian derivative along y^2.
    pub fn d2(&self, f: &Array2<f64>) -> Array2<f64> {
        let dr = self.d_r(f);
        let dt = self.d_theta(f);
        let mut out = Array2::zeros((self.n_r, self.n_theta));
        for ja in 0..self.n_r {
            let r = self.radial_nodes[ja];
            for k in 0..self.n_theta {
                out[[ja, k]] = self.sin_t[k] * dr[[ja, k]] + self.cos_t[k] / r * dt[[ja, k]];
            }
        }
        out
    }

    /// Integral over the disk with Lebesgue measure dy = r dr dtheta.
    pub fn integrate(&self, f: &Array2<f64>) -> f64 {
        let dtheta = 2.0 * PI / self.n_theta as f64;
        let mut acc = 0.0;
        for ja in 0..self.n_r {
            let mut row = 0.0;
            for k in 0..self.n_theta {
                row += f[[ja, k]];
            }
            acc += self.quadrature_weights[ja] * row;
        }
        acc * dtheta
    }

    /// Index of the boundary ring (r = 1).
    pub fn boundary_index(&self) -> usize {
        self.n_r - 1
    }

    /// Smallest radial spacing at the boundary, used by collar-width checks.
    pub fn boundary_spacing(&self) -> f64 {
        1.0 - self.radial_nodes[self.n_r - 2]
    }

    /// Folded radial differentiation matrix for a fixed angular parity
    /// s = +-1: acts on values at the ascending positive nodes of a radial
    /// profile u with u(-r) = s u(r).
    pub fn folded_d(&self, parity: f64) -> DMatrix<f64> {
        self.fold(&self.cheb_d, parity)
    }

    /// Folded second-derivative matrix (the square of the full matrix, then
    /// folded; the extension of u has the same parity for both rows used).
    pub fn folded_d2(&self, parity: f64) -> DMatrix<f64> {
        let d2 = &self.cheb_d * &self.cheb_d;
        self.fold(&d2, parity)
    }

    fn fold(&self, full: &DMatrix<f64>, parity: f64) -> DMatrix<f64> {
        let n_r = self.n_r;
        let big_n = 2 * n_r - 1;
        let mut out = DMatrix::zeros(n_r, n_r);
        // row i (ext) -> ja_row = n_r-1-i ; col j (ext, positive) -> ja_col =
        // n_r-1-j ; negative col j' = big_n - j carries parity * u.
        for i in 0..n_r {
            let ja_row = n_r - 1 - i;
            for j in 0..n_r {
                let ja_col = n_r - 1 - j;
                out[(ja_row, ja_col)] = full[(i, j)] + parity * full[(i, big_n - j)];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_ascend_and_end_at_one() {
        for n_r in [8usize, 16, 33, 48, 96, 128] {
            let g = DiskGrid::new(n_r, 16).unwrap();
            assert_eq!(g.radial_nodes.len(), n_r);
            for w in g.radial_nodes.windows(2) {
                assert!(w[0] < w[1]);
            }
            assert!(g.radial_nodes[0] > 0.0);
            assert_eq!(g.radial_nodes[n_r - 1], 1.0);
        }
    }

    #[test]
    fn quadrature_weights_positive_and_exact() {
        for n_r in [8usize, 12, 16, 24, 32, 48, 64, 96, 128] {
            let g = DiskGrid::new(n_r, 16).unwrap();
            for &w in &g.quadrature_weights {
                assert!(w > 0.0, "n_r={n_r}");
            }
            // exact on even powers r^{2q} against r dr for q <= n_r - 1
            for q in 0..n_r {
                let s: f64 = g
                    .radial_nodes
                    .iter()
                    .zip(&g.quadrature_weights)
                    .map(|(r, w)| w * r.powi(2 * q as i32))
                    .sum();
                let exact = 1.0 / (2.0 * q as f64 + 2.0);
                assert!(
                    (s - exact).abs() < 1e-12 * exact.max(1e-3),
                    "n_r={n_r} q={q}: {s} vs {exact}"
                );
            }
            // odd radial moments converge spectrally (not exactly); check a
            // tight tolerance at moderate size
            if n_r >= 32 {
                let s: f64 = g
                    .radial_nodes
                    .iter()
                    .zip(&g.quadrature_weights)
                    .map(|(r, w)| w * r)
                    .sum();
                assert!((s - 1.0 / 3.0).abs() < 1e-6, "n_r={n_r}: odd moment {s}");
            }
        }
    }

    #[test]
    fn quadrature_exact_on_disk_polynomials() {
        // integrals of smooth disk monomials x^p y^q are exact because the
        // angular average of a disk polynomial is even in r
        let g = DiskGrid::new(10, 32).unwrap();
        let cases: Vec<(Box<dyn Fn(f64, f64) -> f64>, f64)> = vec![
            (Box::new(|x: f64, _: f64| x * x), PI / 4.0),
            (Box::new(|x: f64, y: f64| x * x * y * y), PI / 24.0),
            (Box::new(|x: f64, _: f64| x), 0.0),
            (Box::new(|x: f64, y: f64| x.powi(4) + y.powi(4)), PI / 4.0),
        ];
        for (f, exact) in cases {
            let arr = g.eval(|x, y| f(x, y));
            assert!((g.integrate(&arr) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn disk_area_is_pi() {
        let g = DiskGrid::new(16, 32).unwrap();
        let one = Array2::from_elem((16, 32), 1.0);
        assert!((g.integrate(&one) - PI).abs() < 1e-13);
    }

    #[test]
    fn derivatives_exact_on_polynomials() {
        let g = DiskGrid::new(12, 24).unwrap();
        // f = x^3 y - 2 x y^2 + y
        let f = g.eval(|x, y| x.powi(3) * y - 2.0 * x * y * y + y);
        let fx = g.eval(|x, y| 3.0 * x * x * y - 2.0 * y * y);
        let fy = g.eval(|x, y| x.powi(3) - 4.0 * x * y + 1.0);
        let dx = g.d1(&f);
        let dy = g.d2(&f);
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                assert!((dx[[ja, k]] - fx[[ja, k]]).abs() < 1e-10);
                assert!((dy[[ja, k]] - fy[[ja, k]]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn derivatives_spectral_on_smooth_field() {
        // error should fall very fast with n_r on an analytic non-polynomial
        let errs: Vec<f64> = [8usize, 16, 32]
            .iter()
            .map(|&n_r| {
                let g = DiskGrid::new(n_r, 64).unwrap();
                let f = g.eval(|x, y| (7.0 * x + 0.4 * y).sin() * (y * 5.0).cos());
                let fx = g.eval(|x, y| 7.0 * (7.0 * x + 0.4 * y).cos() * (y * 5.0).cos());
                let dx = g.d1(&f);
                let mut e: f64 = 0.0;
                for ja in 0..g.n_r {
                    for k in 0..g.n_theta {
                        e = e.max((dx[[ja, k]] - fx[[ja, k]]).abs());
                    }
                }
                e
            })
            .collect();
        assert!(errs[1] < errs[0] * 1e-3, "{errs:?}");
        assert!(errs[2] < 1e-9, "{errs:?}");
    }

    #[test]
    fn folded_matrices_match_full_path() {
        let g = DiskGrid::new(10, 20).unwrap();
        // even profile u(r) = cos(2r), parity +1
        let u: Vec<f64> = g.radial_nodes.iter().map(|r| (2.0 * r).cos()).collect();
        let du_exact: Vec<f64> = g.radial_nodes.iter().map(|r| -2.0 * (2.0 * r).sin()).collect();
        let d = g.folded_d(1.0);
        let un = nalgebra::DVector::from_vec(u);
        let du = &d * &un;
        for ja in 0..g.n_r {
            assert!((du[ja] - du_exact[ja]).abs() < 1e-9);
        }
        // odd profile u(r) = r^3, parity -1
        let u: Vec<f64> = g.radial_nodes.iter().map(|r| r.powi(3)).collect();
        let d = g.folded_d(-1.0);
        let d2 = g.folded_d2(-1.0);
        let un = nalgebra::DVector::from_vec(u);
        let du = &d * &un;
        let d2u = &d2 * &un;
        for ja in 0..g.n_r {
            let r = g.radial_nodes[ja];
            assert!((du[ja] - 3.0 * r * r).abs() < 1e-10);
            assert!((d2u[ja] - 6.0 * r).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(DiskGrid::new(4, 16).is_err());
        assert!(DiskGrid::new(8, 15).is_err());
    }
}
