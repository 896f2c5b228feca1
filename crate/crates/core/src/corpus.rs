//! Seeded random field corpora for the invariant suites.
//!
//! Fields are band-limited combinations of solid-harmonic-type modes
//! r^m trig(m theta) with smooth radial envelopes, so spectral operations on
//! them carry their full accuracy. Generation uses the counter-based ChaCha12
//! stream cipher (`rand_chacha::ChaCha12Rng`); a (seed, stream) pair fully
//! determines a corpus, which keeps every suite byte-reproducible.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::field::{OneForm, ScalarField, TwoForm, VectorField};
use crate::grid::DiskGrid;

pub struct CorpusGen {
    rng: ChaCha12Rng,
    /// Highest angular mode used (keep well below the grid Nyquist).
    pub max_mode: usize,
    /// Highest radial polynomial degree above the mode order.
    pub max_radial: usize,
}

impl CorpusGen {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        CorpusGen {
            rng,
            max_mode: 6,
            max_radial: 4,
        }
    }

    /// A smooth band-limited scalar field with coefficients in [-1, 1].
    pub fn scalar(&mut self, grid: &Arc<DiskGrid>) -> ScalarField {
        let mut terms: Vec<(usize, usize, f64, f64)> = Vec::new();
        for m in 0..=self.max_mode {
            for p in 0..=self.max_radial {
                let ac: f64 = self.rng.gen_range(-1.0..1.0);
                let as_: f64 = self.rng.gen_range(-1.0..1.0);
                terms.push((m, p, ac, as_));
            }
        }
        let f = move |x: f64, y: f64| {
            let r = x.hypot(y);
            let t = y.atan2(x);
            let mut acc = 0.0;
            for &(m, p, ac, as_) in &terms {
                // r^m * r^{2p} keeps the smoothness through the origin
                let radial = r.powi((m + 2 * p) as i32);
                acc += radial * (ac * (m as f64 * t).cos() + as_ * (m as f64 * t).sin());
            }
            acc
        };
        ScalarField::from_fn(grid, f)
    }

    /// A scalar field that vanishes on the boundary ring (handy for Dirichlet
    /// data and for pressures).
    pub fn scalar_boundary_vanishing(&mut self, grid: &Arc<DiskGrid>) -> ScalarField {
        let f = self.scalar(grid);
        let window = grid.eval(|x, y| 1.0 - (x * x + y * y));
        ScalarField {
            grid: grid.clone(),
            values: &f.values * &window,
        }
    }

    /// A smooth band-limited vector field.
    pub fn vector(&mut self, grid: &Arc<DiskGrid>) -> VectorField {
        let a = self.scalar(grid);
        let b = self.scalar(grid);
        VectorField {
            grid: grid.clone(),
            comp: [a.values, b.values],
        }
    }

    /// A divergence-free vector field built as the rotated gradient of a
    /// stream function (exact curl construction, flat metric).
    pub fn divergence_free(&mut self, grid: &Arc<DiskGrid>) -> VectorField {
        let psi = self.scalar(grid);
        VectorField {
            grid: grid.clone(),
            comp: [
                grid.d2(&psi.values).mapv(|v| -v),
                grid.d1(&psi.values),
            ],
        }
    }

    pub fn oneform(&mut self, grid: &Arc<DiskGrid>) -> OneForm {
        let v = self.vector(grid);
        OneForm {
            grid: v.grid,
            comp: v.comp,
        }
    }

    pub fn twoform(&mut self, grid: &Arc<DiskGrid>) -> TwoForm {
        let s = self.scalar(grid);
        TwoForm {
            grid: grid.clone(),
            comp12: s.values,
        }
    }

    /// Rough scalar: a Weierstrass-type angular sum with Hoelder regularity
    /// `b` (lacunary frequencies 3^k, amplitudes 3^{-k b}), times a smooth
    /// radial envelope. Frequencies are capped at the grid Nyquist.
    pub fn rough_scalar(&mut self, grid: &Arc<DiskGrid>, b: f64) -> ScalarField {
        let nyquist = grid.n_theta / 2;
        let mut freqs = Vec::new();
        let mut f = 3usize;
        while f < nyquist {
            freqs.push(f);
            f *= 3;
        }
        let phases: Vec<f64> = (0..freqs.len())
            .map(|_| self.rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let f = move |x: f64, y: f64| {
            let r = x.hypot(y);
            let t = y.atan2(x);
            let env = r * r * (1.5 - r); // smooth, vanishes at origin
            let mut acc = 0.0;
            for (i, &fq) in freqs.iter().enumerate() {
                acc += (fq as f64).powf(-b) * (fq as f64 * t + phases[i]).cos();
            }
            env * acc
        };
        ScalarField::from_fn(grid, f)
    }

    /// Single high angular mode at a controlled fraction of the Nyquist.
    pub fn oscillatory_scalar(&mut self, grid: &Arc<DiskGrid>, frac: f64) -> ScalarField {
        let m = ((grid.n_theta as f64 / 2.0) * frac).floor().max(1.0) as usize;
        let phase: f64 = self.rng.gen_range(0.0..std::f64::consts::TAU);
        ScalarField::from_fn(grid, move |x, y| {
            let r = x.hypot(y);
            let t = y.atan2(x);
            // keep r^m under control: normalized solid harmonic profile
            r.powi(m.min(12) as i32) * (m as f64 * t + phase).cos()
        })
    }
}
