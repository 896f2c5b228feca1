//! Discrete fields over a [`DiskGrid`].
//!
//! Components are stored with respect to the fixed Cartesian frame of the
//! Lagrangian coordinates, so every component is a plain smooth function on
//! the disk and the antipodal identification used by the radial spectral
//! derivative applies componentwise. `VectorField` components are
//! contravariant W^a, `OneForm` components covariant w_a, and a `TwoForm`
//! stores its single independent component beta_12 (beta_21 = -beta_12, so
//! antisymmetry is exact by construction).

use std::sync::Arc;

use ndarray::Array2;

use crate::grid::DiskGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Vector,
    OneForm,
    TwoForm,
    SymTensor,
}

impl FieldKind {
    pub fn label(&self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Vector => "vector",
            FieldKind::OneForm => "oneform",
            FieldKind::TwoForm => "twoform",
            FieldKind::SymTensor => "symtensor",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "scalar" => Some(FieldKind::Scalar),
            "vector" => Some(FieldKind::Vector),
            "oneform" => Some(FieldKind::OneForm),
            "twoform" => Some(FieldKind::TwoForm),
            "symtensor" => Some(FieldKind::SymTensor),
            _ => None,
        }
    }

    pub fn components(&self) -> usize {
        match self {
            FieldKind::Scalar | FieldKind::TwoForm => 1,
            FieldKind::Vector | FieldKind::OneForm => 2,
            FieldKind::SymTensor => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<DiskGrid>,
    pub values: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct VectorField {
    pub grid: Arc<DiskGrid>,
    pub comp: [Array2<f64>; 2],
}

#[derive(Debug, Clone)]
pub struct OneForm {
    pub grid: Arc<DiskGrid>,
    pub comp: [Array2<f64>; 2],
}

#[derive(Debug, Clone)]
pub struct TwoForm {
    pub grid: Arc<DiskGrid>,
    /// The (1,2) component; the (2,1) component is its negative.
    pub comp12: Array2<f64>,
}

/// Symmetric 2-tensor field (metric, its time derivatives, ...).
#[derive(Debug, Clone)]
pub struct SymTensor {
    pub grid: Arc<DiskGrid>,
    pub c11: Array2<f64>,
    pub c12: Array2<f64>,
    pub c22: Array2<f64>,
}

fn shape(grid: &DiskGrid) -> (usize, usize) {
    (grid.n_r, grid.n_theta)
}

impl ScalarField {
    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: Array2::zeros(shape(grid)),
        }
    }

    pub fn from_fn(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: grid.eval(f),
        }
    }

    pub fn constant(grid: &Arc<DiskGrid>, c: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: Array2::from_elem(shape(grid), c),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, a: f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: &self.values * a,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: &self.values + &o.values,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: &self.values - &o.values,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: &self.values * &o.values,
        }
    }

    /// Values on the boundary ring r = 1, indexed by the angular node.
    pub fn boundary_trace(&self) -> Vec<f64> {
        let b = self.grid.boundary_index();
        (0..self.grid.n_theta).map(|k| self.values[[b, k]]).collect()
    }
}

impl VectorField {
    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        VectorField {
            grid: grid.clone(),
            comp: [Array2::zeros(shape(grid)), Array2::zeros(shape(grid))],
        }
    }

    pub fn from_fn(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut a = Array2::zeros(shape(grid));
        let mut b = Array2::zeros(shape(grid));
        for ja in 0..grid.n_r {
            for k in 0..grid.n_theta {
                let (x, y) = grid.position(ja, k);
                let (u, v) = f(x, y);
                a[[ja, k]] = u;
                b[[ja, k]] = v;
            }
        }
        VectorField {
            grid: grid.clone(),
            comp: [a, b],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comp
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.comp.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn scale(&self, a: f64) -> Self {
        VectorField {
            grid: self.grid.clone(),
            comp: [&self.comp[0] * a, &self.comp[1] * a],
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        VectorField {
            grid: self.grid.clone(),
            comp: [&self.comp[0] + &o.comp[0], &self.comp[1] + &o.comp[1]],
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        VectorField {
            grid: self.grid.clone(),
            comp: [&self.comp[0] - &o.comp[0], &self.comp[1] - &o.comp[1]],
        }
    }

    /// self + a * other
    pub fn axpy(&self, a: f64, o: &Self) -> Self {
        VectorField {
            grid: self.grid.clone(),
            comp: [
                &self.comp[0] + &(&o.comp[0] * a),
                &self.comp[1] + &(&o.comp[1] * a),
            ],
        }
    }
}

impl OneForm {
    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        OneForm {
            grid: grid.clone(),
            comp: [Array2::zeros(shape(grid)), Array2::zeros(shape(grid))],
        }
    }

    pub fn from_fn(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let v = VectorField::from_fn(grid, f);
        OneForm {
            grid: v.grid,
            comp: v.comp,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comp
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, a: f64) -> Self {
        OneForm {
            grid: self.grid.clone(),
            comp: [&self.comp[0] * a, &self.comp[1] * a],
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        OneForm {
            grid: self.grid.clone(),
            comp: [&self.comp[0] + &o.comp[0], &self.comp[1] + &o.comp[1]],
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        OneForm {
            grid: self.grid.clone(),
            comp: [&self.comp[0] - &o.comp[0], &self.comp[1] - &o.comp[1]],
        }
    }
}

impl TwoForm {
    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        TwoForm {
            grid: grid.clone(),
            comp12: Array2::zeros(shape(grid)),
        }
    }

    /// The component beta_ab for index pair (a, b); antisymmetry is exact.
    pub fn component(&self, a: usize, b: usize, ja: usize, k: usize) -> f64 {
        match (a, b) {
            (0, 1) => self.comp12[[ja, k]],
            (1, 0) => -self.comp12[[ja, k]],
            _ => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comp12.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, a: f64) -> Self {
        TwoForm {
            grid: self.grid.clone(),
            comp12: &self.comp12 * a,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        TwoForm {
            grid: self.grid.clone(),
            comp12: &self.comp12 + &o.comp12,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        TwoForm {
            grid: self.grid.clone(),
            comp12: &self.comp12 - &o.comp12,
        }
    }
}

impl SymTensor {
    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        SymTensor {
            grid: grid.clone(),
            c11: Array2::zeros(shape(grid)),
            c12: Array2::zeros(shape(grid)),
            c22: Array2::zeros(shape(grid)),
        }
    }

    pub fn identity(grid: &Arc<DiskGrid>) -> Self {
        SymTensor {
            grid: grid.clone(),
            c11: Array2::from_elem(shape(grid), 1.0),
            c12: Array2::zeros(shape(grid)),
            c22: Array2::from_elem(shape(grid), 1.0),
        }
    }

    pub fn component(&self, a: usize, b: usize, ja: usize, k: usize) -> f64 {
        match (a, b) {
            (0, 0) => self.c11[[ja, k]],
            (1, 1) => self.c22[[ja, k]],
            _ => self.c12[[ja, k]],
        }
    }

    pub fn max_abs(&self) -> f64 {
        [&self.c11, &self.c12, &self.c22]
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, a: f64) -> Self {
        SymTensor {
            grid: self.grid.clone(),
            c11: &self.c11 * a,
            c12: &self.c12 * a,
            c22: &self.c22 * a,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        SymTensor {
            grid: self.grid.clone(),
            c11: &self.c11 + &o.c11,
            c12: &self.c12 + &o.c12,
            c22: &self.c22 + &o.c22,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SymTensor {
            grid: self.grid.clone(),
            c11: &self.c11 - &o.c11,
            c12: &self.c12 - &o.c12,
            c22: &self.c22 - &o.c22,
        }
    }

    /// Contract against a vector: (T W)_a = T_ab W^b, producing a one-form.
    pub fn contract(&self, w: &VectorField) -> OneForm {
        OneForm {
            grid: self.grid.clone(),
            comp: [
                &(&self.c11 * &w.comp[0]) + &(&self.c12 * &w.comp[1]),
                &(&self.c12 * &w.comp[0]) + &(&self.c22 * &w.comp[1]),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twoform_antisymmetry_exact() {
        let g = DiskGrid::new(8, 16).unwrap();
        let mut b = TwoForm::zeros(&g);
        b.comp12[[3, 5]] = 2.5;
        assert_eq!(b.component(0, 1, 3, 5), 2.5);
        assert_eq!(b.component(1, 0, 3, 5), -2.5);
        assert_eq!(b.component(0, 0, 3, 5), 0.0);
    }

    #[test]
    fn symtensor_contract() {
        let g = DiskGrid::new(8, 16).unwrap();
        let t = SymTensor::identity(&g);
        let w = VectorField::from_fn(&g, |x, y| (x, y));
        let f = t.contract(&w);
        assert!((f.comp[0][[2, 3]] - w.comp[0][[2, 3]]).abs() < 1e-15);
    }
}
