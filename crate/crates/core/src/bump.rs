//! Smooth cutoff profiles shared by the tangential frame, the boundary
//! collar and the smoothing operators.
//!
//! Everything is built from one polynomial smoothstep: the regularized
//! incomplete beta function S(s) = I_s(N+1, N+1) with N = 7, a degree-15
//! polynomial rising from 0 at s <= 0 to 1 at s >= 1 with seven vanishing
//! derivatives at both ends. Plateau locations are fixed by the
//! constructions that use them; the profile in between only needs enough
//! smoothness for the fourth-order norm ladders, and a polynomial profile is
//! exactly representable by the spectral basis (no under-resolved transition
//! features, unlike exponential bumps).

/// Smoothness order of the transition (vanishing derivatives at the ends).
pub const STEP_ORDER: usize = 7;

fn binom(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// 1 / B(N+1, N+1) where B is the beta function.
fn beta_inv() -> f64 {
    // B(N+1, N+1) = N!^2 / (2N+1)!
    let n = STEP_ORDER;
    let mut acc = 1.0; // (2N+1)! / N!^2 = (N+1) * binom(2N+1, N) ... compute directly
    for i in 1..=(2 * n + 1) {
        acc *= i as f64;
    }
    let mut fact_n = 1.0;
    for i in 1..=n {
        fact_n *= i as f64;
    }
    acc / (fact_n * fact_n)
}

/// Smooth step: 0 for s <= 0, 1 for s >= 1, strictly increasing in between,
/// with step(s) + step(1-s) = 1.
pub fn step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        // S(s) = (1/B) sum_j binom(N,j) (-1)^j s^{N+j+1} / (N+j+1)
        let n = STEP_ORDER;
        let mut acc = 0.0;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom(n, j) * s.powi((n + j + 1) as i32) / (n + j + 1) as f64;
        }
        acc * beta_inv()
    }
}

/// Derivative of [`step`]: s^N (1-s)^N / B on (0, 1).
pub fn step_prime(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (s * (1.0 - s)).powi(STEP_ORDER as i32) * beta_inv()
    }
}

/// Second derivative of [`step`].
pub fn step_prime2(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let n = STEP_ORDER as f64;
        n * (s * (1.0 - s)).powi(STEP_ORDER as i32 - 1) * (1.0 - 2.0 * s) * beta_inv()
    }
}

/// Antiderivative of [`step`] with value 0 at s = 0 (exact polynomial
/// integration; constant continuation for s > 1 adds s - 1/2 ... handled by
/// callers staying within [0, 1]).
pub fn step_integral(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        // integral over [0,1] is 1/2 by symmetry, then slope 1
        0.5 + (s - 1.0)
    } else {
        let n = STEP_ORDER;
        let mut acc = 0.0;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let p = (n + j + 1) as f64;
            acc += sign * binom(n, j) * s.powi((n + j + 2) as i32) / (p * (p + 1.0));
        }
        acc * beta_inv()
    }
}

/// Even cutoff: 1 on |s| <= 1/4, 0 on |s| >= 1/2.
pub fn cutoff(s: f64) -> f64 {
    step((0.5 - s.abs()) / 0.25)
}

/// Derivative of [`cutoff`].
pub fn cutoff_prime(s: f64) -> f64 {
    let sign = if s >= 0.0 { 1.0 } else { -1.0 };
    -sign / 0.25 * step_prime((0.5 - s.abs()) / 0.25)
}

/// Second derivative of [`cutoff`].
pub fn cutoff_prime2(s: f64) -> f64 {
    // chain rule with z = (1/2 - |s|)/(1/4); z'' = 0 away from s = 0 and the
    // kink at s = 0 sits inside the plateau where everything vanishes
    step_prime2((0.5 - s.abs()) / 0.25) / (0.25 * 0.25)
}

/// Odd companion: g(s) = s on |s| <= 1/4 (so g' = 1 there), 0 on |s| >= 1/2.
pub fn ramp(s: f64) -> f64 {
    s * cutoff(s)
}

/// Derivative of [`ramp`].
pub fn ramp_prime(s: f64) -> f64 {
    cutoff(s) + s * cutoff_prime(s)
}

/// Second derivative of [`ramp`].
pub fn ramp_prime2(s: f64) -> f64 {
    2.0 * cutoff_prime(s) + s * cutoff_prime2(s)
}

/// Smoothed distance profile rho(d): equals d for d <= 1/4, constant 1/2 for
/// d >= 3/4, with rho' >= 0 throughout. On the transition
/// rho'(d) = step((3/4 - d)/(1/2)), whose integral over [1/4, 3/4] is exactly
/// 1/4 by the symmetry of `step`.
pub fn rho(d: f64) -> f64 {
    if d <= 0.25 {
        d
    } else if d >= 0.75 {
        0.5
    } else {
        // rho(d) = 1/4 + int_{1/4}^d step((3/4 - t)/(1/2)) dt
        //        = 1/4 + (1/2) [F(1) - F((3/4 - d)/(1/2))],  F = step_integral
        0.25 + 0.5 * (step_integral(1.0) - step_integral((0.75 - d) / 0.5))
    }
}

/// Derivative of [`rho`]; equals 1 for d <= 1/4 and 0 for d >= 3/4.
pub fn rho_prime(d: f64) -> f64 {
    step((0.75 - d) / 0.5)
}

/// Collar transition chi(rho): 0 for rho <= 1/4, 1 for rho >= 3/4.
pub fn chi(r: f64) -> f64 {
    step((r - 0.25) / 0.5)
}

/// Derivative of [`chi`].
pub fn chi_prime(r: f64) -> f64 {
    step_prime((r - 0.25) / 0.5) / 0.5
}
