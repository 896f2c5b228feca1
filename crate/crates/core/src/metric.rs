//! Coordinate maps, trajectories and the induced metric data.
//!
//! A `CoordinateState` is a snapshot of the Lagrangian coordinate map
//! x = x(t, y) on the disk together with the material velocity V = D_t x and
//! optionally the acceleration D_t^2 x. `metric_from_state` computes the
//! pulled-back flat metric g_ab = (dx^i/dy^a)(dx^i/dy^b), its inverse, the
//! volume factor kappa = det(dx/dy) = sqrt(det g), sigma = ln kappa, and,
//! when the velocity or acceleration is available, the listed material time
//! derivatives of those quantities.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymTensor, TwoForm, VectorField};
use crate::grid::DiskGrid;

/// Snapshot of the coordinate map at one time.
#[derive(Debug, Clone)]
pub struct CoordinateState {
    pub grid: Arc<DiskGrid>,
    /// Eulerian positions x^i(y).
    pub x: [Array2<f64>; 2],
    /// Material velocity V^i = D_t x^i (Eulerian components).
    pub v: Option<[Array2<f64>; 2]>,
    /// Material acceleration D_t^2 x^i.
    pub a: Option<[Array2<f64>; 2]>,
}

impl CoordinateState {
    pub fn identity(grid: &Arc<DiskGrid>) -> Self {
        let x1 = grid.eval(|x, _| x);
        let x2 = grid.eval(|_, y| y);
        CoordinateState {
            grid: grid.clone(),
            x: [x1, x2],
            v: None,
            a: None,
        }
    }

    pub fn velocity_field(&self) -> Option<VectorField> {
        self.v.as_ref().map(|v| VectorField {
            grid: self.grid.clone(),
            comp: [v[0].clone(), v[1].clone()],
        })
    }
}

/// Classification used to route elliptic solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricClass {
    /// g = gamma * identity with a spatially constant gamma (gamma = 1 is the
    /// flat case); solves decouple per angular mode.
    Isotropic { gamma: f64 },
    /// Anything else; solves use dense assembly.
    General,
}

/// Metric quantities derived from a coordinate state.
#[derive(Debug, Clone)]
pub struct MetricData {
    pub grid: Arc<DiskGrid>,
    pub g: SymTensor,
    pub g_inv: SymTensor,
    pub kappa: ScalarField,
    pub sigma: ScalarField,
    /// Jacobian dx^i/dy^a, indexed [i][a].
    pub jac: [[Array2<f64>; 2]; 2],
    /// Inverse Jacobian dy^a/dx^i, indexed [a][i].
    pub jac_inv: [[Array2<f64>; 2]; 2],
    /// D_t g_ab (present when the state carried a velocity).
    pub dt_g: Option<SymTensor>,
    /// Vorticity two-form omega_ab pulled back to the Lagrangian frame.
    pub omega: Option<TwoForm>,
    /// sigma-dot = div V.
    pub sigma_dot: Option<ScalarField>,
    /// sigma-double-dot = D_t div V (needs the acceleration).
    pub sigma_ddot: Option<ScalarField>,
    /// D_t^2 g_ab (needs the acceleration).
    pub dt2_g: Option<SymTensor>,
    /// D_t omega_ab (needs the acceleration).
    pub dt_omega: Option<TwoForm>,
    pub class: MetricClass,
}

impl MetricData {
    /// Identity-map metric (flat).
    pub fn flat(grid: &Arc<DiskGrid>) -> Self {
        metric_from_state(&CoordinateState::identity(grid)).expect("identity map is regular")
    }

    /// Eulerian partial derivatives of a scalar: d_i f = (dy^a/dx^i) d_a f.
    pub fn eulerian_d(&self, f: &Array2<f64>) -> [Array2<f64>; 2] {
        let d1 = self.grid.d1(f);
        let d2 = self.grid.d2(f);
        let mut out = [
            Array2::zeros((self.grid.n_r, self.grid.n_theta)),
            Array2::zeros((self.grid.n_r, self.grid.n_theta)),
        ];
        for i in 0..2 {
            out[i] = &(&self.jac_inv[0][i] * &d1) + &(&self.jac_inv[1][i] * &d2);
        }
        out
    }

    /// Eulerian gradient of a 2-component field: out[i][k] = d_i F^k.
    pub fn eulerian_grad(&self, f: &[Array2<f64>; 2]) -> [[Array2<f64>; 2]; 2] {
        let g0 = self.eulerian_d(&f[0]);
        let g1 = self.eulerian_d(&f[1]);
        // g0[i] = d_i F^0, g1[i] = d_i F^1
        [
            [g0[0].clone(), g1[0].clone()],
            [g0[1].clone(), g1[1].clone()],
        ]
    }

    /// Eulerian divergence d_i F^i of a 2-component field.
    pub fn eulerian_div(&self, f: &[Array2<f64>; 2]) -> Array2<f64> {
        let g = self.eulerian_grad(f);
        &g[0][0] + &g[1][1]
    }

    /// det(g) at every node.
    pub fn det_g(&self) -> Array2<f64> {
        &(&self.g.c11 * &self.g.c22) - &(&self.g.c12 * &self.g.c12)
    }
}

const JACOBIAN_FLOOR: f64 = 1e-10;
const ISOTROPY_TOL: f64 = 1e-11;

/// Compute metric data from a coordinate state. Fails with
/// [`Error::SingularJacobian`] if |det dx/dy| dips below 1e-10 anywhere.
pub fn metric_from_state(state: &CoordinateState) -> Result<MetricData> {
    let grid = &state.grid;
    let (n_r, n_t) = (grid.n_r, grid.n_theta);

    // jac[i][a] = d_a x^i
    let jac = [
        [grid.d1(&state.x[0]), grid.d2(&state.x[0])],
        [grid.d1(&state.x[1]), grid.d2(&state.x[1])],
    ];

    let mut det = Array2::zeros((n_r, n_t));
    for ja in 0..n_r {
        for k in 0..n_t {
            let d = jac[0][0][[ja, k]] * jac[1][1][[ja, k]]
                - jac[0][1][[ja, k]] * jac[1][0][[ja, k]];
            if d.abs() < JACOBIAN_FLOOR {
                return Err(Error::SingularJacobian {
                    min_det: d,
                    node: (ja, k),
                });
            }
            det[[ja, k]] = d;
        }
    }

    // Inverse Jacobian dy^a/dx^i by the 2x2 adjugate.
    let mut jac_inv = [
        [Array2::zeros((n_r, n_t)), Array2::zeros((n_r, n_t))],
        [Array2::zeros((n_r, n_t)), Array2::zeros((n_r, n_t))],
    ];
    for ja in 0..n_r {
        for k in 0..n_t {
            let d = det[[ja, k]];
            jac_inv[0][0][[ja, k]] = jac[1][1][[ja, k]] / d;
            jac_inv[0][1][[ja, k]] = -jac[0][1][[ja, k]] / d;
            jac_inv[1][0][[ja, k]] = -jac[1][0][[ja, k]] / d;
            jac_inv[1][1][[ja, k]] = jac[0][0][[ja, k]] / d;
        }
    }

    let mut g = SymTensor::zeros(grid);
    g.c11 = &(&jac[0][0] * &jac[0][0]) + &(&jac[1][0] * &jac[1][0]);
    g.c12 = &(&jac[0][0] * &jac[0][1]) + &(&jac[1][0] * &jac[1][1]);
    g.c22 = &(&jac[0][1] * &jac[0][1]) + &(&jac[1][1] * &jac[1][1]);

    let mut g_inv = SymTensor::zeros(grid);
    for ja in 0..n_r {
        for k in 0..n_t {
            let dg = g.c11[[ja, k]] * g.c22[[ja, k]] - g.c12[[ja, k]] * g.c12[[ja, k]];
            g_inv.c11[[ja, k]] = g.c22[[ja, k]] / dg;
            g_inv.c12[[ja, k]] = -g.c12[[ja, k]] / dg;
            g_inv.c22[[ja, k]] = g.c11[[ja, k]] / dg;
        }
    }

    let kappa = ScalarField {
        grid: grid.clone(),
        values: det,
    };
    let sigma = ScalarField {
        grid: grid.clone(),
        values: kappa.values.mapv(f64::ln),
    };

    // Classify for solver routing.
    let gamma = g.c11[[0, 0]];
    let mut iso = true;
    for ja in 0..n_r {
        for k in 0..n_t {
            if (g.c11[[ja, k]] - gamma).abs() > ISOTROPY_TOL * gamma.abs()
                || (g.c22[[ja, k]] - gamma).abs() > ISOTROPY_TOL * gamma.abs()
                || g.c12[[ja, k]].abs() > ISOTROPY_TOL * gamma.abs()
                || (kappa.values[[ja, k]] - gamma).abs() > ISOTROPY_TOL * gamma.abs()
            {
                iso = false;
            }
        }
    }
    let class = if iso {
        MetricClass::Isotropic { gamma }
    } else {
        MetricClass::General
    };

    let mut m = MetricData {
        grid: grid.clone(),
        g,
        g_inv,
        kappa,
        sigma,
        jac,
        jac_inv,
        dt_g: None,
        omega: None,
        sigma_dot: None,
        sigma_ddot: None,
        dt2_g: None,
        dt_omega: None,
        class,
    };

    if let Some(v) = &state.v {
        // dv[a][i] = d_a V^i (Lagrangian derivatives of the Eulerian
        // components).
        let dv = [
            [m.grid.d1(&v[0]), m.grid.d1(&v[1])],
            [m.grid.d2(&v[0]), m.grid.d2(&v[1])],
        ];
        // M_ab = (d_a V^j) J^j_b ; D_t g = M + M^T, omega = M - M^T.
        let mm = |a: usize, b: usize| -> Array2<f64> {
            &(&dv[a][0] * &m.jac[0][b]) + &(&dv[a][1] * &m.jac[1][b])
        };
        let m01 = mm(0, 1);
        let m10 = mm(1, 0);
        let mut dt_g = SymTensor::zeros(grid);
        dt_g.c11 = mm(0, 0).mapv(|x| 2.0 * x);
        dt_g.c22 = mm(1, 1).mapv(|x| 2.0 * x);
        dt_g.c12 = &m01 + &m10;
        m.dt_g = Some(dt_g);
        let mut omega = TwoForm::zeros(grid);
        omega.comp12 = &m01 - &m10;
        m.omega = Some(omega);

        // sigma-dot = div V (Eulerian divergence).
        let sdot = m.eulerian_div(v);
        m.sigma_dot = Some(ScalarField {
            grid: grid.clone(),
            values: sdot,
        });

        if let Some(acc) = &state.a {
            // sigma-ddot = D_t div V = div A - tr((dV)^2)
            let q = m.eulerian_grad(v); // q[i][k] = d_i V^k
            let div_a = m.eulerian_div(acc);
            let mut tr_q2: Array2<f64> = Array2::zeros((n_r, n_t));
            for i in 0..2 {
                for k in 0..2 {
                    tr_q2 = &tr_q2 + &(&q[i][k] * &q[k][i]);
                }
            }
            m.sigma_ddot = Some(ScalarField {
                grid: grid.clone(),
                values: &div_a - &tr_q2,
            });

            // D_t^2 g_ab = (d_a A^j) J^j_b + J^j_a (d_b A^j) + 2 (d_a V^j)(d_b V^j)
            let da = [
                [m.grid.d1(&acc[0]), m.grid.d1(&acc[1])],
                [m.grid.d2(&acc[0]), m.grid.d2(&acc[1])],
            ];
            let na = |a: usize, b: usize| -> Array2<f64> {
                &(&da[a][0] * &m.jac[0][b]) + &(&da[a][1] * &m.jac[1][b])
            };
            let vv = |a: usize, b: usize| -> Array2<f64> {
                &(&dv[a][0] * &dv[b][0]) + &(&dv[a][1] * &dv[b][1])
            };
            let mut dt2_g = SymTensor::zeros(grid);
            dt2_g.c11 = &na(0, 0).mapv(|x| 2.0 * x) + &vv(0, 0).mapv(|x| 2.0 * x);
            dt2_g.c22 = &na(1, 1).mapv(|x| 2.0 * x) + &vv(1, 1).mapv(|x| 2.0 * x);
            dt2_g.c12 = &(&na(0, 1) + &na(1, 0)) + &vv(0, 1).mapv(|x| 2.0 * x);
            m.dt2_g = Some(dt2_g);

            // D_t omega_ab = (d_a A^j) J^j_b - J^j_a (d_b A^j)
            let mut dt_omega = TwoForm::zeros(grid);
            dt_omega.comp12 = &na(0, 1) - &na(1, 0);
            m.dt_omega = Some(dt_omega);
        }
    }

    Ok(m)
}

/// A path of coordinate states: either closed-form in time or sampled on a
/// uniform time grid (derivatives by second-order differences).
pub trait AnalyticPath: Send + Sync {
    fn state(&self, grid: &Arc<DiskGrid>, t: f64) -> CoordinateState;
    fn label(&self) -> &'static str {
        "analytic"
    }
}

pub enum Trajectory {
    Analytic {
        grid: Arc<DiskGrid>,
        path: Arc<dyn AnalyticPath>,
    },
    Sampled {
        grid: Arc<DiskGrid>,
        times: Vec<f64>,
        states: Vec<CoordinateState>,
    },
}

impl Trajectory {
    pub fn analytic(grid: Arc<DiskGrid>, path: Arc<dyn AnalyticPath>) -> Self {
        Trajectory::Analytic { grid, path }
    }

    /// Build a sampled trajectory from positions on a uniform time grid;
    /// velocities and accelerations by centered second-order differences,
    /// one-sided second-order at the endpoints.
    pub fn from_samples(
        grid: Arc<DiskGrid>,
        times: Vec<f64>,
        xs: Vec<[Array2<f64>; 2]>,
    ) -> Result<Self> {
        let n = times.len();
        if n < 4 {
            return Err(Error::Config("need at least 4 samples".into()));
        }
        let dt = times[1] - times[0];
        for w in times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-12 * dt.abs().max(1.0) {
                return Err(Error::Config("sampled trajectory must be uniform in time".into()));
            }
        }
        let mut states = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = [
                Array2::zeros((grid.n_r, grid.n_theta)),
                Array2::zeros((grid.n_r, grid.n_theta)),
            ];
            let mut a = v.clone();
            for c in 0..2 {
                if i == 0 {
                    v[c] = (&xs[0][c] * (-3.0) + &(&xs[1][c] * 4.0) - &xs[2][c]) / (2.0 * dt);
                    a[c] = (&(&xs[0][c] * 2.0) - &(&xs[1][c] * 5.0) + &(&xs[2][c] * 4.0)
                        - &xs[3][c])
                        / (dt * dt);
                } else if i == n - 1 {
                    v[c] = (&xs[n - 1][c] * 3.0 - &(&xs[n - 2][c] * 4.0) + &xs[n - 3][c])
                        / (2.0 * dt);
                    a[c] = (&(&xs[n - 1][c] * 2.0) - &(&xs[n - 2][c] * 5.0)
                        + &(&xs[n - 3][c] * 4.0)
                        - &xs[n - 4][c])
                        / (dt * dt);
                } else {
                    v[c] = (&xs[i + 1][c] - &xs[i - 1][c]) / (2.0 * dt);
                    a[c] = (&(&xs[i + 1][c] + &xs[i - 1][c]) - &(&xs[i][c] * 2.0)) / (dt * dt);
                }
            }
            states.push(CoordinateState {
                grid: grid.clone(),
                x: xs[i].clone(),
                v: Some(v),
                a: Some(a),
            });
        }
        Ok(Trajectory::Sampled {
            grid,
            times,
            states,
        })
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        match self {
            Trajectory::Analytic { grid, .. } => grid,
            Trajectory::Sampled { grid, .. } => grid,
        }
    }

    pub fn state_at(&self, t: f64) -> Result<CoordinateState> {
        match self {
            Trajectory::Analytic { grid, path } => Ok(path.state(grid, t)),
            Trajectory::Sampled { times, states, .. } => {
                let idx = times
                    .iter()
                    .position(|&ti| (ti - t).abs() < 1e-9)
                    .ok_or_else(|| {
                        Error::Config(format!("time {t} is not a sample of the trajectory"))
                    })?;
                Ok(states[idx].clone())
            }
        }
    }

    pub fn sample_times(&self) -> Option<&[f64]> {
        match self {
            Trajectory::Analytic { .. } => None,
            Trajectory::Sampled { times, .. } => Some(times),
        }
    }
}

// ---------------------------------------------------------------------------
// Built-in analytic paths used across the test and experiment suites.
// ---------------------------------------------------------------------------

/// Static identity map x = y.
pub struct StaticIdentity;

impl AnalyticPath for StaticIdentity {
    fn state(&self, grid: &Arc<DiskGrid>, _t: f64) -> CoordinateState {
        let mut s = CoordinateState::identity(grid);
        let z = Array2::zeros((grid.n_r, grid.n_theta));
        s.v = Some([z.clone(), z.clone()]);
        s.a = Some([z.clone(), z]);
        s
    }
    fn label(&self) -> &'static str {
        "static-identity"
    }
}

/// Rigid rotation x = R(omega t) y.
pub struct RigidRotation {
    pub omega: f64,
}

impl AnalyticPath for RigidRotation {
    fn state(&self, grid: &Arc<DiskGrid>, t: f64) -> CoordinateState {
        let w = self.omega;
        let (c, s) = ((w * t).cos(), (w * t).sin());
        let x1 = grid.eval(|x, y| c * x - s * y);
        let x2 = grid.eval(|x, y| s * x + c * y);
        let v1 = grid.eval(|x, y| w * (-s * x - c * y));
        let v2 = grid.eval(|x, y| w * (c * x - s * y));
        let a1 = grid.eval(|x, y| -w * w * (c * x - s * y));
        let a2 = grid.eval(|x, y| -w * w * (s * x + c * y));
        CoordinateState {
            grid: grid.clone(),
            x: [x1, x2],
            v: Some([v1, v2]),
            a: Some([a1, a2]),
        }
    }
    fn label(&self) -> &'static str {
        "rigid-rotation"
    }
}

/// Incompressible irrotational strain x = (e^{kt} y1, e^{-kt} y2).
pub struct StrainFlow {
    pub rate: f64,
}

impl AnalyticPath for StrainFlow {
    fn state(&self, grid: &Arc<DiskGrid>, t: f64) -> CoordinateState {
        let k = self.rate;
        let (ep, em) = ((k * t).exp(), (-k * t).exp());
        let x1 = grid.eval(|x, _| ep * x);
        let x2 = grid.eval(|_, y| em * y);
        let v1 = grid.eval(|x, _| k * ep * x);
        let v2 = grid.eval(|_, y| -k * em * y);
        let a1 = grid.eval(|x, _| k * k * ep * x);
        let a2 = grid.eval(|_, y| k * k * em * y);
        CoordinateState {
            grid: grid.clone(),
            x: [x1, x2],
            v: Some([v1, v2]),
            a: Some([a1, a2]),
        }
    }
    fn label(&self) -> &'static str {
        "irrotational-strain"
    }
}

/// Uniform dilation x = (1 + alpha t) y (volume changing).
pub struct Dilation {
    pub alpha: f64,
}

impl AnalyticPath for Dilation {
    fn state(&self, grid: &Arc<DiskGrid>, t: f64) -> CoordinateState {
        let s = 1.0 + self.alpha * t;
        let al = self.alpha;
        let x1 = grid.eval(|x, _| s * x);
        let x2 = grid.eval(|_, y| s * y);
        let v1 = grid.eval(|x, _| al * x);
        let v2 = grid.eval(|_, y| al * y);
        let z = Array2::zeros((grid.n_r, grid.n_theta));
        CoordinateState {
            grid: grid.clone(),
            x: [x1, x2],
            v: Some([v1, v2]),
            a: Some([z.clone(), z]),
        }
    }
    fn label(&self) -> &'static str {
        "dilation"
    }
}

/// Linear shear x = (y1 + t y2, y2) (volume preserving, metric varies).
pub struct ShearFlow;

impl AnalyticPath for ShearFlow {
    fn state(&self, grid: &Arc<DiskGrid>, t: f64) -> CoordinateState {
        let x1 = grid.eval(|x, y| x + t * y);
        let x2 = grid.eval(|_, y| y);
        let v1 = grid.eval(|_, y| y);
        let z = Array2::zeros((grid.n_r, grid.n_theta));
        CoordinateState {
            grid: grid.clone(),
            x: [x1, x2],
            v: Some([v1, z.clone()]),
            a: Some([z.clone(), z]),
        }
    }
    fn label(&self) -> &'static str {
        "linear-shear"
    }
}

/// Static quadratic perturbation of the identity; generic curved metric.
pub struct QuadraticMap {
    pub eps: f64,
}

impl AnalyticPath for QuadraticMap {
    fn state(&self, grid: &Arc<DiskGrid>, _t: f64) -> CoordinateState {
        let e = self.eps;
        let x1 = grid.eval(|x, y| x + e * x * y);
        let x2 = grid.eval(|x, y| y + e * (x * x - y * y));
        let z = Array2::zeros((grid.n_r, grid.n_theta));
        CoordinateState {
            grid: grid.clone(),
            x: [x1, x2],
            v: Some([z.clone(), z.clone()]),
            a: Some([z.clone(), z]),
        }
    }
    fn label(&self) -> &'static str {
        "quadratic-map"
    }
}

/// Rotation composed with dilation; exercises sigma-dot, omega and dt_g at
/// once while the metric stays isotropic (fast solver path).
pub struct RotatingDilation {
    pub omega: f64,
    pub alpha: f64,
}

impl AnalyticPath for RotatingDilation {
    fn state(&self, grid: &Arc<DiskGrid>, t: f64) -> CoordinateState {
        let (w, al) = (self.omega, self.alpha);
        let s = 1.0 + al * t;
        let (c, sn) = ((w * t).cos(), (w * t).sin());
        // x = s R y, V = al R y + s w J R y, A = 2 al w J R y - s w^2 R y
        let rx = |x: f64, y: f64| (c * x - sn * y, sn * x + c * y);
        let x1 = grid.eval(|x, y| s * rx(x, y).0);
        let x2 = grid.eval(|x, y| s * rx(x, y).1);
        let v1 = grid.eval(|x, y| {
            let (r1, r2) = rx(x, y);
            al * r1 - s * w * r2
        });
        let v2 = grid.eval(|x, y| {
            let (r1, r2) = rx(x, y);
            al * r2 + s * w * r1
        });
        let a1 = grid.eval(|x, y| {
            let (r1, r2) = rx(x, y);
            -2.0 * al * w * r2 - s * w * w * r1
        });
        let a2 = grid.eval(|x, y| {
            let (r1, r2) = rx(x, y);
            2.0 * al * w * r1 - s * w * w * r2
        });
        CoordinateState {
            grid: grid.clone(),
            x: [x1, x2],
            v: Some([v1, v2]),
            a: Some([a1, a2]),
        }
    }
    fn label(&self) -> &'static str {
        "rotating-dilation"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<DiskGrid> {
        DiskGrid::new(12, 24).unwrap()
    }

    #[test]
    fn identity_map_metric() {
        let g = grid();
        let m = MetricData::flat(&g);
        assert!(matches!(m.class, MetricClass::Isotropic { gamma } if (gamma - 1.0).abs() < 1e-12));
        assert!((m.g.c11[[3, 5]] - 1.0).abs() < 1e-12);
        assert!(m.g.c12[[3, 5]].abs() < 1e-12);
        assert!((m.kappa.values[[3, 5]] - 1.0).abs() < 1e-12);
        assert!(m.sigma.values[[3, 5]].abs() < 1e-12);
    }

    #[test]
    fn dilation_map_metric() {
        let g = grid();
        // x = 2y: g = 4 delta, kappa = 4
        let s = CoordinateState {
            grid: g.clone(),
            x: [g.eval(|x, _| 2.0 * x), g.eval(|_, y| 2.0 * y)],
            v: None,
            a: None,
        };
        let m = metric_from_state(&s).unwrap();
        assert!((m.g.c11[[4, 7]] - 4.0).abs() < 1e-11);
        assert!((m.kappa.values[[4, 7]] - 4.0).abs() < 1e-11);
        assert!(matches!(m.class, MetricClass::Isotropic { gamma } if (gamma - 4.0).abs() < 1e-10));
    }

    #[test]
    fn rotation_is_isometry() {
        let g = grid();
        let path = RigidRotation { omega: 0.7 };
        let s = path.state(&g, 0.4);
        let m = metric_from_state(&s).unwrap();
        assert!((m.g.c11[[5, 3]] - 1.0).abs() < 1e-11);
        assert!(m.g.c12[[5, 3]].abs() < 1e-11);
        assert!((m.kappa.values[[5, 3]] - 1.0).abs() < 1e-11);
        // sigma-dot vanishes for an isometry
        assert!(m.sigma_dot.unwrap().max_abs() < 1e-10);
        // omega_12 = -2 w for V = w(-y, x): d1 v2 - d2 v1 = 2w; pulled back by
        // a rotation the two-form component is preserved.
        let om = m.omega.unwrap();
        assert!((om.comp12[[5, 3]] - (-(2.0 * 0.7))).abs() < 1e-10 || (om.comp12[[5, 3]] - 2.0 * 0.7).abs() < 1e-10);
    }

    #[test]
    fn kappa_matches_sqrt_det_g() {
        let g = grid();
        let path = QuadraticMap { eps: 0.15 };
        let s = path.state(&g, 0.0);
        let m = metric_from_state(&s).unwrap();
        let det = m.det_g();
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                let rel = (m.kappa.values[[ja, k]] - det[[ja, k]].sqrt()).abs()
                    / det[[ja, k]].sqrt();
                assert!(rel < 1e-12);
            }
        }
        assert!(matches!(m.class, MetricClass::General));
    }

    #[test]
    fn g_times_g_inv_is_identity() {
        let g = grid();
        let s = (QuadraticMap { eps: 0.2 }).state(&g, 0.0);
        let m = metric_from_state(&s).unwrap();
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                let a11 = m.g.c11[[ja, k]] * m.g_inv.c11[[ja, k]]
                    + m.g.c12[[ja, k]] * m.g_inv.c12[[ja, k]];
                let a12 = m.g.c11[[ja, k]] * m.g_inv.c12[[ja, k]]
                    + m.g.c12[[ja, k]] * m.g_inv.c22[[ja, k]];
                assert!((a11 - 1.0).abs() < 1e-12);
                assert!(a12.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_jacobian_detected() {
        let g = grid();
        // x collapses both coordinates onto one line
        let s = CoordinateState {
            grid: g.clone(),
            x: [g.eval(|x, y| x + y), g.eval(|x, y| x + y)],
            v: None,
            a: None,
        };
        assert!(matches!(
            metric_from_state(&s),
            Err(Error::SingularJacobian { .. })
        ));
    }

    #[test]
    fn time_derivatives_match_finite_differences() {
        let g = grid();
        let path = RotatingDilation {
            omega: 0.9,
            alpha: 0.3,
        };
        let t0 = 0.25;
        // first differences balance spectral noise (~1e-14) at h = 1e-5;
        // second differences need a larger step
        let h = 1e-4;
        let m0 = metric_from_state(&path.state(&g, t0)).unwrap();
        let mp = metric_from_state(&path.state(&g, t0 + h)).unwrap();
        let mm = metric_from_state(&path.state(&g, t0 - h)).unwrap();
        let dt_g = m0.dt_g.as_ref().unwrap();
        let fd11 = (&mp.g.c11 - &mm.g.c11) / (2.0 * h);
        let fd12 = (&mp.g.c12 - &mm.g.c12) / (2.0 * h);
        let mut err: f64 = 0.0;
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                err = err.max((dt_g.c11[[ja, k]] - fd11[[ja, k]]).abs());
                err = err.max((dt_g.c12[[ja, k]] - fd12[[ja, k]]).abs());
            }
        }
        assert!(err < 1e-6, "dt_g err {err}");

        // sigma-dot and sigma-ddot
        let sd = m0.sigma_dot.as_ref().unwrap();
        let fd_sigma = (&mp.sigma.values - &mm.sigma.values) / (2.0 * h);
        let mut err: f64 = 0.0;
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                err = err.max((sd.values[[ja, k]] - fd_sigma[[ja, k]]).abs());
            }
        }
        assert!(err < 1e-6, "sigma_dot err {err}");

        let sdd = m0.sigma_ddot.as_ref().unwrap();
        let fdd = (&(&mp.sigma.values + &mm.sigma.values) - &(&m0.sigma.values * 2.0))
            / (h * h);
        let mut err: f64 = 0.0;
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                err = err.max((sdd.values[[ja, k]] - fdd[[ja, k]]).abs());
            }
        }
        assert!(err < 1e-5, "sigma_ddot err {err}");

        // dt2_g
        let dt2 = m0.dt2_g.as_ref().unwrap();
        let fdd11 = (&(&mp.g.c11 + &mm.g.c11) - &(&m0.g.c11 * 2.0)) / (h * h);
        let mut err: f64 = 0.0;
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                err = err.max((dt2.c11[[ja, k]] - fdd11[[ja, k]]).abs());
            }
        }
        assert!(err < 1e-4, "dt2_g err {err}");

        // dt_omega
        let dw = m0.dt_omega.as_ref().unwrap();
        let fdw = (&mp.omega.as_ref().unwrap().comp12 - &mm.omega.as_ref().unwrap().comp12)
            / (2.0 * h);
        let mut err: f64 = 0.0;
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                err = err.max((dw.comp12[[ja, k]] - fdw[[ja, k]]).abs());
            }
        }
        assert!(err < 1e-6, "dt_omega err {err}");
    }

    #[test]
    fn sampled_trajectory_derivatives() {
        let g = grid();
        let path = RigidRotation { omega: 1.1 };
        let dt = 1e-3;
        let times: Vec<f64> = (0..8).map(|i| i as f64 * dt).collect();
        let xs: Vec<[Array2<f64>; 2]> = times
            .iter()
            .map(|&t| path.state(&g, t).x)
            .collect();
        let traj = Trajectory::from_samples(g.clone(), times.clone(), xs).unwrap();
        let s = traj.state_at(3.0 * dt).unwrap();
        let exact = path.state(&g, 3.0 * dt);
        let v = s.v.unwrap();
        let ve = exact.v.unwrap();
        let mut err: f64 = 0.0;
        for ja in 0..g.n_r {
            for k in 0..g.n_theta {
                err = err.max((v[0][[ja, k]] - ve[0][[ja, k]]).abs());
            }
        }
        assert!(err < 1e-6, "sampled velocity err {err}");
    }
}
