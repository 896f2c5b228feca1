//! Field calculus on the disk: divergence, curl, index raising/lowering,
//! frame transforms, inner products, Sobolev and Hoelder norms, the
//! interpolation-inequality probe and the coordinate-condition monitor.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{OneForm, ScalarField, TwoForm, VectorField};
use crate::metric::{MetricData, Trajectory};

/// Metric divergence div W = kappa^{-1} d_a (kappa W^a).
pub fn divergence(w: &VectorField, m: &MetricData) -> ScalarField {
    let grid = &w.grid;
    let kw0 = &m.kappa.values * &w.comp[0];
    let kw1 = &m.kappa.values * &w.comp[1];
    let d = &grid.d1(&kw0) + &grid.d2(&kw1);
    ScalarField {
        grid: grid.clone(),
        values: &d / &m.kappa.values,
    }
}

/// Exterior derivative of a one-form: (curl w)_ab = d_a w_b - d_b w_a.
/// Metric independent.
pub fn curl(w: &OneForm) -> TwoForm {
    let grid = &w.grid;
    TwoForm {
        grid: grid.clone(),
        comp12: &grid.d1(&w.comp[1]) - &grid.d2(&w.comp[0]),
    }
}

/// Gradient of a scalar as a one-form.
pub fn gradient(q: &ScalarField) -> OneForm {
    OneForm {
        grid: q.grid.clone(),
        comp: [q.grid.d1(&q.values), q.grid.d2(&q.values)],
    }
}

/// Lower an index: w_a = g_ab W^b.
pub fn lower_index(w: &VectorField, m: &MetricData) -> OneForm {
    m.g.contract(w)
}

/// Raise an index: W^a = g^ab w_b.
pub fn raise_index(w: &OneForm, m: &MetricData) -> VectorField {
    VectorField {
        grid: w.grid.clone(),
        comp: [
            &(&m.g_inv.c11 * &w.comp[0]) + &(&m.g_inv.c12 * &w.comp[1]),
            &(&m.g_inv.c12 * &w.comp[0]) + &(&m.g_inv.c22 * &w.comp[1]),
        ],
    }
}

/// Pull an Eulerian-component field back to the Lagrangian frame:
/// W^a = (dy^a/dx^i) dx^i.
pub fn to_lagrangian(dx: &VectorField, m: &MetricData) -> VectorField {
    VectorField {
        grid: dx.grid.clone(),
        comp: [
            &(&m.jac_inv[0][0] * &dx.comp[0]) + &(&m.jac_inv[0][1] * &dx.comp[1]),
            &(&m.jac_inv[1][0] * &dx.comp[0]) + &(&m.jac_inv[1][1] * &dx.comp[1]),
        ],
    }
}

/// Push a Lagrangian-frame field to Eulerian components:
/// dx^i = (dx^i/dy^a) W^a.
pub fn to_eulerian(w: &VectorField, m: &MetricData) -> VectorField {
    VectorField {
        grid: w.grid.clone(),
        comp: [
            &(&m.jac[0][0] * &w.comp[0]) + &(&m.jac[0][1] * &w.comp[1]),
            &(&m.jac[1][0] * &w.comp[0]) + &(&m.jac[1][1] * &w.comp[1]),
        ],
    }
}

/// Pull an Eulerian covector to a Lagrangian one-form: w_a = (dx^i/dy^a) u_i.
pub fn oneform_to_lagrangian(u: &OneForm, m: &MetricData) -> OneForm {
    OneForm {
        grid: u.grid.clone(),
        comp: [
            &(&m.jac[0][0] * &u.comp[0]) + &(&m.jac[1][0] * &u.comp[1]),
            &(&m.jac[0][1] * &u.comp[0]) + &(&m.jac[1][1] * &u.comp[1]),
        ],
    }
}

/// Contraction of a one-form with a vector field (a scalar).
pub fn pair(w: &OneForm, v: &VectorField) -> ScalarField {
    ScalarField {
        grid: w.grid.clone(),
        values: &(&w.comp[0] * &v.comp[0]) + &(&w.comp[1] * &v.comp[1]),
    }
}

/// Weighted inner product <U, W> = integral of g_ab U^a W^b kappa dy.
pub fn inner_product(u: &VectorField, w: &VectorField, m: &MetricData) -> f64 {
    let gw = m.g.contract(w);
    let integrand = &(&(&gw.comp[0] * &u.comp[0]) + &(&gw.comp[1] * &u.comp[1]))
        * &m.kappa.values;
    u.grid.integrate(&integrand)
}

/// Norm induced by [`inner_product`].
pub fn metric_norm(w: &VectorField, m: &MetricData) -> f64 {
    inner_product(w, w, m).max(0.0).sqrt()
}

/// L2 norm against the plain Lebesgue measure dy (no metric weight).
pub fn l2_norm_scalar(f: &ScalarField) -> f64 {
    f.grid.integrate(&(&f.values * &f.values)).max(0.0).sqrt()
}

pub fn l2_norm_components(comps: &[&Array2<f64>], grid: &crate::grid::DiskGrid) -> f64 {
    let mut sq = Array2::zeros((grid.n_r, grid.n_theta));
    for c in comps {
        sq = &sq + &(*c * *c);
    }
    grid.integrate(&sq).max(0.0).sqrt()
}

/// Multi-index coordinate derivatives d_y^alpha up to total order `r` for a
/// list of component arrays. Returned per order: all derivatives with
/// |alpha| = j, for each input component.
fn derivative_table(
    grid: &crate::grid::DiskGrid,
    comps: &[&Array2<f64>],
    r: usize,
) -> Vec<Vec<Array2<f64>>> {
    // table[j] holds, for each component, the (j+1) derivatives
    // d1^j, d1^{j-1} d2, ..., d2^j (order of mixed partials is immaterial for
    // smooth fields; we differentiate in a fixed order).
    let mut table: Vec<Vec<Array2<f64>>> = vec![comps.iter().map(|c| (*c).clone()).collect()];
    for j in 1..=r {
        let prev = &table[j - 1];
        let per = j; // j entries per component at order j-1
        let mut cur: Vec<Array2<f64>> = Vec::new();
        for ci in 0..comps.len() {
            // entries ci*per .. ci*per+per-1 are the order j-1 derivatives
            // with k = number of d2 applications, k = 0..j-1
            for k in 0..=j {
                let src = if k < j {
                    // add one d1 to the entry with k d2's
                    grid.d1(&prev[ci * per + k])
                } else {
                    // add one d2 to the entry with j-1 d2's
                    grid.d2(&prev[ci * per + (j - 1)])
                };
                cur.push(src);
            }
        }
        table.push(cur);
    }
    table
}

/// Grid derivative budget for Sobolev/Hoelder norms.
pub const DERIVATIVE_BUDGET: usize = 4;

/// Sobolev norm (sum over |alpha| <= r of the L2 norms of d_y^alpha applied
/// to every component, Lebesgue measure).
pub fn sobolev_norm(
    grid: &crate::grid::DiskGrid,
    comps: &[&Array2<f64>],
    r: usize,
) -> Result<f64> {
    if r > DERIVATIVE_BUDGET {
        return Err(Error::ResolutionExceeded {
            order: r,
            budget: DERIVATIVE_BUDGET,
        });
    }
    let table = derivative_table(grid, comps, r);
    let mut total = 0.0;
    for (j, level) in table.iter().enumerate() {
        let per = j + 1;
        for k in 0..per {
            // gather this multi-index across components -> one L2 norm
            let slice: Vec<&Array2<f64>> = (0..comps.len()).map(|ci| &level[ci * per + k]).collect();
            total += l2_norm_components(&slice, grid);
        }
    }
    Ok(total)
}

pub fn sobolev_norm_scalar(f: &ScalarField, r: usize) -> Result<f64> {
    sobolev_norm(&f.grid, &[&f.values], r)
}

pub fn sobolev_norm_vector(w: &VectorField, r: usize) -> Result<f64> {
    sobolev_norm(&w.grid, &[&w.comp[0], &w.comp[1]], r)
}

/// Hoelder norm of a set of components.
///
/// For integer `a` this is the C^a norm: the sum over all multi-indices
/// |alpha| <= a of sup |d^alpha u|. For k < a <= k+1 it is the sup of
/// |d^alpha u(x) - d^alpha u(y)| / |x - y|^{a-k} over all grid node pairs and
/// all |alpha| = k, plus sup |u|. The all-pairs scan is O(N^2) in the node
/// count; this is the documented cost hot spot of the norm ladder.
pub fn holder_norm(grid: &crate::grid::DiskGrid, comps: &[&Array2<f64>], a: f64) -> Result<f64> {
    if a < 0.0 {
        return Err(Error::Config("Hoelder exponent must be >= 0".into()));
    }
    if a > DERIVATIVE_BUDGET as f64 {
        return Err(Error::ResolutionExceeded {
            order: a.ceil() as usize,
            budget: DERIVATIVE_BUDGET,
        });
    }
    let is_integer = (a - a.round()).abs() < 1e-12;
    if is_integer {
        let k = a.round() as usize;
        let table = derivative_table(grid, comps, k);
        let mut total = 0.0;
        for level in table.iter() {
            for arr in level.iter() {
                total += arr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            }
        }
        return Ok(total);
    }
    let k = a.floor() as usize;
    let expo = a - k as f64;
    let table = derivative_table(grid, comps, k);
    let top = &table[k];
    let per = k + 1;

    // node positions, flattened
    let n = grid.n_r * grid.n_theta;
    let mut px = vec![0.0f64; n];
    let mut py = vec![0.0f64; n];
    for ja in 0..grid.n_r {
        for kk in 0..grid.n_theta {
            let (x, y) = grid.position(ja, kk);
            px[ja * grid.n_theta + kk] = x;
            py[ja * grid.n_theta + kk] = y;
        }
    }
    // flatten top-level derivatives
    let flat: Vec<Vec<f64>> = top
        .iter()
        .map(|arr| arr.iter().copied().collect())
        .collect();
    let mut quot: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = px[i] - px[j];
            let dy = py[i] - py[j];
            let dist = (dx * dx + dy * dy).sqrt();
            if dist < 1e-14 {
                continue;
            }
            let dpow = dist.powf(expo);
            let mut diff_sum = 0.0;
            for ci in 0..comps.len() {
                for kk in 0..per {
                    let f = &flat[ci * per + kk];
                    diff_sum += (f[i] - f[j]).abs();
                }
            }
            quot = quot.max(diff_sum / dpow);
        }
    }
    let sup: f64 = comps
        .iter()
        .map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .sum();
    Ok(quot + sup)
}

pub fn holder_norm_scalar(f: &ScalarField, a: f64) -> Result<f64> {
    holder_norm(&f.grid, &[&f.values], a)
}

pub fn holder_norm_vector(w: &VectorField, a: f64) -> Result<f64> {
    holder_norm(&w.grid, &[&w.comp[0], &w.comp[1]], a)
}

/// Interpolation-inequality probe: the ratio
/// `|u|_c / (|u|_a^lambda |u|_b^{1-lambda})` with lambda a + (1-lambda) b = c,
/// for both the Hoelder and Sobolev ladders.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InterpolationReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
    pub holder_ratio: f64,
    pub sobolev_ratio: f64,
}

pub fn interpolation_probe(f: &ScalarField, a: f64, b: f64, c: f64) -> Result<InterpolationReport> {
    if !(a <= c && c <= b) || (a - b).abs() < 1e-14 {
        return Err(Error::Config("need a <= c <= b with a < b".into()));
    }
    let lambda = (b - c) / (b - a);
    let ha = holder_norm_scalar(f, a)?;
    let hb = holder_norm_scalar(f, b)?;
    let hc = holder_norm_scalar(f, c)?;
    let holder_ratio = hc / (ha.powf(lambda) * hb.powf(1.0 - lambda)).max(1e-300);
    // Sobolev ladder uses integer rungs (nearest integers).
    let (ia, ib, ic) = (a.round() as usize, b.round() as usize, c.round() as usize);
    let sa = sobolev_norm_scalar(f, ia)?;
    let sb = sobolev_norm_scalar(f, ib)?;
    let sc = sobolev_norm_scalar(f, ic)?;
    let lam_s = if ib == ia {
        0.5
    } else {
        (ib as f64 - ic as f64) / (ib as f64 - ia as f64)
    };
    let sobolev_ratio = sc / (sa.powf(lam_s) * sb.powf(1.0 - lam_s)).max(1e-300);
    Ok(InterpolationReport {
        a,
        b,
        c,
        lambda,
        holder_ratio,
        sobolev_ratio,
    })
}

/// Report from the coordinate-condition monitor.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CoordinateMonitorReport {
    pub times: Vec<f64>,
    /// M(t) = sup over nodes of sqrt(|dx/dy|^2 + |dy/dx|^2) (Frobenius).
    pub m_values: Vec<f64>,
    /// Whether M(t) <= 2 M(0) holds for every reported time.
    pub doubling_ok: bool,
    /// sup_t |x-dot(t)|_{C^1}, measured.
    pub xdot_c1: f64,
    /// The sufficient-condition product T * |x-dot|_1 * M(0).
    pub threshold_product: f64,
    /// threshold_product <= 1/8.
    pub threshold_ok: bool,
    /// sup over nodes and times of the coordinate-condition quantity
    /// sqrt(|dx/dy|^2 + |dy/dx|^2) compared against the supplied c1.
    pub c1_margin: f64,
}

/// Monitor the coordinate condition along a trajectory: reports
/// M(t) = sup sqrt(|dx/dy|^2 + |dy/dx|^2) per time, the doubling check
/// M(t) <= 2 M(0) and the sufficient threshold T |x-dot|_1 M(0) <= 1/8
/// evaluated with measured norms.
pub fn coordinate_monitor(traj: &Trajectory, times: &[f64], c1: f64) -> Result<CoordinateMonitorReport> {
    let grid = traj.grid().clone();
    let mut m_values = Vec::with_capacity(times.len());
    let mut xdot_c1: f64 = 0.0;
    for &t in times {
        let st = traj.state_at(t)?;
        let m = crate::metric::metric_from_state(&st)?;
        let mut worst: f64 = 0.0;
        for ja in 0..grid.n_r {
            for k in 0..grid.n_theta {
                let mut fwd = 0.0;
                let mut inv = 0.0;
                for i in 0..2 {
                    for a in 0..2 {
                        fwd += m.jac[i][a][[ja, k]] * m.jac[i][a][[ja, k]];
                        inv += m.jac_inv[a][i][[ja, k]] * m.jac_inv[a][i][[ja, k]];
                    }
                }
                worst = worst.max((fwd + inv).sqrt());
            }
        }
        m_values.push(worst);
        if let Some(v) = &st.v {
            let c1norm = holder_norm(&grid, &[&v[0], &v[1]], 1.0)?;
            xdot_c1 = xdot_c1.max(c1norm);
        }
    }
    let m0 = m_values[0];
    let doubling_ok = m_values.iter().all(|&mv| mv <= 2.0 * m0 + 1e-12);
    let horizon = times.last().copied().unwrap_or(0.0) - times.first().copied().unwrap_or(0.0);
    let threshold_product = horizon * xdot_c1 * m0;
    Ok(CoordinateMonitorReport {
        times: times.to_vec(),
        m_values: m_values.clone(),
        doubling_ok,
        xdot_c1,
        threshold_product,
        threshold_ok: threshold_product <= 0.125,
        c1_margin: c1 - m_values.iter().cloned().fold(0.0f64, f64::max),
    })
}
