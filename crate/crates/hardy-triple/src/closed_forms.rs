//! Closed-form bubbles for the scalar Hardy-critical equation and the sharp
//! constants attached to them.
//!
//! The scalar problem `-Δv - λ v/|x|^2 = v^{2*-1}` has the explicit radial
//! solution family
//!
//! ```text
//! z_μ(r) = μ^{-(N-2)/2} C / ( (r/μ)^a (1 + (r/μ)^{2-4a/(N-2)})^{(N-2)/2} )
//! ```
//!
//! with `a = (N-2)/2 - sqrt((N-2)^2/4 - λ)`.  The normalization `C` is pinned
//! here by substituting the ansatz into the ODE at one radius and
//! cross-checking at a second, so that every downstream quadrature check is
//! absolute rather than up-to-scale.

use std::sync::Arc;

use thiserror::Error;

use crate::grid::{
    critical_exponent, critical_mass, dirichlet_energy, hardy_threshold, weighted_norm_sq,
    GridError, RadialGrid, RadialProfile,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("lambda={lambda} outside (0, {limit}) for N={n_dim}")]
    Domain { lambda: f64, limit: f64, n_dim: u32 },
    #[error("radius must be positive, got {r}")]
    BadRadius { r: f64 },
    #[error("dimension must be at least 3, got {n_dim}")]
    BadDimension { n_dim: u32 },
    #[error("scale must be positive, got {mu}")]
    BadScale { mu: f64 },
    #[error("two-radius normalization disagreed: C({r1})={c1}, C({r2})={c2}")]
    Consistency { r1: f64, c1: f64, r2: f64, c2: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Singularity exponent `a = (N-2)/2 - sqrt((N-2)^2/4 - λ)` of the bubble.
pub fn bubble_exponent(lambda: f64, n_dim: u32) -> Result<f64, ClosedFormError> {
    if n_dim < 3 {
        return Err(ClosedFormError::BadDimension { n_dim });
    }
    let limit = hardy_threshold(n_dim);
    if !(lambda > 0.0 && lambda < limit) {
        return Err(ClosedFormError::Domain { lambda, limit, n_dim });
    }
    let half = (n_dim as f64 - 2.0) / 2.0;
    Ok(half - (half * half - lambda).sqrt())
}

/// Parameters of one scalar bubble `z_μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleParams {
    pub n_dim: u32,
    pub lambda: f64,
    pub mu: f64,
    /// ODE-pinned normalization constant `C`.
    pub normalization: f64,
}

impl BubbleParams {
    /// Builds the parameter set with the normalization solved from the ODE.
    pub fn new(n_dim: u32, lambda: f64, mu: f64) -> Result<Self, ClosedFormError> {
        if !(mu > 0.0) {
            return Err(ClosedFormError::BadScale { mu });
        }
        let normalization = bubble_normalization(lambda, n_dim)?;
        Ok(BubbleParams {
            n_dim,
            lambda,
            mu,
            normalization,
        })
    }

    pub fn exponent(&self) -> f64 {
        bubble_exponent(self.lambda, self.n_dim).expect("validated at construction")
    }

    /// Decay exponent `b = 2 - 4a/(N-2)` of the outer factor.
    pub fn outer_exponent(&self) -> f64 {
        2.0 - 4.0 * self.exponent() / (self.n_dim as f64 - 2.0)
    }
}

/// Pointwise evaluation of `z_μ(r)`; the profile is singular at the origin
/// whenever `a > 0`.
pub fn bubble_value(p: &BubbleParams, r: f64) -> Result<f64, ClosedFormError> {
    if !(r > 0.0) {
        return Err(ClosedFormError::BadRadius { r });
    }
    let a = p.exponent();
    let b = p.outer_exponent();
    let m = (p.n_dim as f64 - 2.0) / 2.0;
    let rho = r / p.mu;
    Ok(p.mu.powf(-m) * p.normalization / (rho.powf(a) * (1.0 + rho.powf(b)).powf(m)))
}

/// The `w'/w` and `(w'/w)'` of the unnormalized bubble shape
/// `w = r^{-a} (1+r^b)^{-m}`, used to substitute the ansatz into the ODE.
fn shape_log_derivatives(a: f64, b: f64, m: f64, r: f64) -> (f64, f64) {
    let rb = r.powf(b);
    let phi = rb / (1.0 + rb);
    let q = -(a + m * b * phi) / r;
    let qp = (a + m * b * phi) / (r * r) - m * b * b * phi * (1.0 - phi) / (r * r);
    (q, qp)
}

fn normalization_at(lambda: f64, n_dim: u32, a: f64, b: f64, r: f64) -> f64 {
    let nf = n_dim as f64;
    let m = (nf - 2.0) / 2.0;
    let (q, qp) = shape_log_derivatives(a, b, m, r);
    // -Δz - λ z/r² = z^{2*-1} with the ansatz z = C w gives
    // C^{2*-2} = [-(Q' + Q²) - (N-1)Q/r - λ/r²] / w^{2*-2}.
    let lhs_over_w = -(qp + q * q) - (nf - 1.0) * q / r - lambda / (r * r);
    let w_power = r.powf(-4.0 * a / (nf - 2.0)) * (1.0 + r.powf(b)).powf(-2.0);
    let c_power = lhs_over_w / w_power;
    c_power.powf((nf - 2.0) / 4.0)
}

/// The unique `C > 0` making `z_1` an exact solution of the scalar equation,
/// obtained by substitution at one radius and validated at a second.
pub fn bubble_normalization(lambda: f64, n_dim: u32) -> Result<f64, ClosedFormError> {
    let a = bubble_exponent(lambda, n_dim)?;
    let b = 2.0 - 4.0 * a / (n_dim as f64 - 2.0);
    let (r1, r2) = (0.7, 1.9);
    let c1 = normalization_at(lambda, n_dim, a, b, r1);
    let c2 = normalization_at(lambda, n_dim, a, b, r2);
    if !(c1 > 0.0 && c2 > 0.0) || (c1 - c2).abs() > 1e-10 * c1.abs().max(c2.abs()) {
        return Err(ClosedFormError::Consistency { r1, c1, r2, c2 });
    }
    Ok(0.5 * (c1 + c2))
}

/// Samples the bubble on a grid.
pub fn bubble_profile(p: &BubbleParams, grid: &Arc<RadialGrid>) -> RadialProfile {
    let a = p.exponent();
    let b = p.outer_exponent();
    let m = (p.n_dim as f64 - 2.0) / 2.0;
    let scale = p.mu.powf(-m);
    RadialProfile::from_fn(grid, |r| {
        let rho = r / p.mu;
        scale * p.normalization / (rho.powf(a) * (1.0 + rho.powf(b)).powf(m))
    })
}

/// Pointwise relative residual of the radial Euler-Lagrange equation for an
/// exact bubble evaluated with analytic derivatives; machine-precision small.
pub fn bubble_ode_residual(p: &BubbleParams, r: f64) -> Result<f64, ClosedFormError> {
    if !(r > 0.0) {
        return Err(ClosedFormError::BadRadius { r });
    }
    let nf = p.n_dim as f64;
    let a = p.exponent();
    let b = p.outer_exponent();
    let m = (nf - 2.0) / 2.0;
    let z = bubble_value(p, r)?;
    let rho = r / p.mu;
    let (q, qp) = shape_log_derivatives(a, b, m, rho);
    // Derivatives in r of z(r) = μ^{-m} C w(r/μ) pick up 1/μ factors.
    let q_r = q / p.mu;
    let qp_r = qp / (p.mu * p.mu);
    let lhs = z * (-(qp_r + q_r * q_r) - (nf - 1.0) * q_r / r - p.lambda / (r * r));
    let rhs = z.powf(critical_exponent(p.n_dim) - 1.0);
    Ok((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE))
}

/// Sharp embedding constants for a triple of Hardy parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpConstants {
    /// Sobolev constant of `D^{1,2} -> L^{2*}`.
    pub s_cal: f64,
    /// Per-component sharp constants `S_i = (1 - 4λ_i/(N-2)^2)^{(N-1)/N} S_cal`.
    pub s_i: [f64; 3],
    /// Scalar least-energy levels `A_i = S_i^{N/2}/N`.
    pub a_i: [f64; 3],
    /// `S = min_i S_i`.
    pub s_min: f64,
    /// `C̄ = (3/N) S_cal^{N/2}`.
    pub c_bar: f64,
}

pub fn sharp_constants(
    lambdas: [f64; 3],
    n_dim: u32,
    s_cal: f64,
) -> Result<SharpConstants, ClosedFormError> {
    let nf = n_dim as f64;
    let mut s_i = [0.0; 3];
    let mut a_i = [0.0; 3];
    for (k, &lambda) in lambdas.iter().enumerate() {
        // Reuse the domain validation of the exponent.
        bubble_exponent(lambda, n_dim)?;
        let factor = (1.0 - 4.0 * lambda / ((nf - 2.0) * (nf - 2.0))).powf((nf - 1.0) / nf);
        s_i[k] = factor * s_cal;
        a_i[k] = s_i[k].powf(nf / 2.0) / nf;
    }
    let s_min = s_i.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(SharpConstants {
        s_cal,
        s_i,
        a_i,
        s_min,
        c_bar: 3.0 / nf * s_cal.powf(nf / 2.0),
    })
}

/// Numerical Sobolev constant: Rayleigh quotient of the classical λ=0 bubble
/// on the given radial window.
pub fn sobolev_constant_with(
    n_dim: u32,
    r_min: f64,
    r_max: f64,
    count: usize,
) -> Result<f64, ClosedFormError> {
    let grid = RadialGrid::log_spaced(n_dim, r_min, r_max, count)?;
    let m = (n_dim as f64 - 2.0) / 2.0;
    let u = RadialProfile::from_fn(&grid, |r| (1.0 + r * r).powf(-m));
    let num = dirichlet_energy(&u);
    let den = critical_mass(&u).powf(2.0 / critical_exponent(n_dim));
    Ok(num / den)
}

/// Numerical Sobolev constant on the default window `[1e-4, 1e4]`, 4096 nodes.
pub fn sobolev_constant(n_dim: u32) -> Result<f64, ClosedFormError> {
    sobolev_constant_with(n_dim, 1e-4, 1e4, 4096)
}

/// Quadrature Rayleigh quotient `‖u‖_λ² / |u|_{2*}²` of a profile.
pub fn rayleigh_quotient(u: &RadialProfile, lambda: f64) -> Result<f64, ClosedFormError> {
    let num = weighted_norm_sq(u, lambda)?;
    let den = critical_mass(u).powf(2.0 / critical_exponent(u.grid().dimension()));
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{hardy_term, lp_power_integral, make_log_grid};
    use rand::{Rng, SeedableRng};

    /// Γ at integer and half-integer arguments, test oracle only.
    fn gamma_half(two_x: u32) -> f64 {
        let mut g = if two_x % 2 == 0 {
            1.0
        } else {
            std::f64::consts::PI.sqrt()
        };
        let mut t = if two_x % 2 == 0 { 2 } else { 1 };
        while t + 2 <= two_x {
            g *= t as f64 / 2.0;
            t += 2;
        }
        g
    }

    /// Talenti's closed form for the Sobolev constant.
    fn talenti(n: u32) -> f64 {
        let nf = n as f64;
        std::f64::consts::PI * nf * (nf - 2.0) * (gamma_half(n) / gamma_half(2 * n)).powf(2.0 / nf)
    }

    #[test]
    fn exponent_limits_and_exact_value() {
        // λ -> 0 collapses to the classical exponent a = 0.
        assert!(bubble_exponent(1e-12, 4).unwrap() < 1e-11);
        // λ = 3/4 at N = 4 gives a = 1/2 exactly.
        assert_eq!(bubble_exponent(0.75, 4).unwrap(), 0.5);
        // The Hardy threshold itself is excluded.
        assert!(matches!(
            bubble_exponent(hardy_threshold(3), 3),
            Err(ClosedFormError::Domain { .. })
        ));
        assert!(bubble_exponent(-0.1, 5).is_err());
    }

    #[test]
    fn exponent_monotone_in_lambda() {
        for n in [3u32, 4, 5, 6] {
            let lim = hardy_threshold(n);
            let mut prev = 0.0;
            for k in 1..20 {
                let a = bubble_exponent(lim * k as f64 / 20.0, n).unwrap();
                assert!(a > prev && a < (n as f64 - 2.0) / 2.0);
                prev = a;
            }
        }
    }

    #[test]
    fn bubble_dilation_covariance() {
        let p1 = BubbleParams::new(4, 0.5, 1.0).unwrap();
        for &m in &[0.3, 2.0, 17.0] {
            let pm = BubbleParams { mu: m, ..p1 };
            for &r in &[0.05, 0.7, 3.0, 40.0] {
                let lhs = bubble_value(&pm, r).unwrap();
                let rhs = m.powf(-1.0) * bubble_value(&p1, r / m).unwrap();
                assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs());
            }
        }
        assert!(bubble_value(&p1, 0.0).is_err());
        assert!(bubble_value(&p1, -1.0).is_err());
    }

    #[test]
    fn normalization_matches_classical_limit() {
        // λ -> 0, N = 4: C -> (N(N-2))^{(N-2)/4} = 8^{1/2}.
        let c = bubble_normalization(1e-12, 4).unwrap();
        assert!((c - 8.0f64.sqrt()).abs() < 1e-6);
        // Same limit in N = 5: (15)^{3/4}.
        let c5 = bubble_normalization(1e-12, 5).unwrap();
        assert!((c5 - 15.0f64.powf(0.75)).abs() < 1e-6);
    }

    #[test]
    fn normalization_two_radius_consistency() {
        let p = BubbleParams::new(5, hardy_threshold(5) / 2.0, 1.0).unwrap();
        assert!(p.normalization > 0.0);
        // The residual is analytic, so it is machine small at random radii.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let r = 10f64.powf(rng.gen_range(-2.0..2.0));
            assert!(bubble_ode_residual(&p, r).unwrap() < 1e-6);
        }
    }

    #[test]
    fn classical_instanton_value_at_scale_radius() {
        let p = BubbleParams::new(4, 1e-13, 1.0).unwrap();
        let got = bubble_value(&p, 1.0).unwrap();
        // √8 / (1 + 1) = √2 for the Aubin-Talenti instanton at its scale radius.
        assert!((got - 2.0f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn discrete_ode_residual_shrinks_under_refinement() {
        // Finite-difference residual of the sampled bubble on a log grid.
        let p = BubbleParams::new(4, 0.5, 1.0).unwrap();
        let residual = |count: usize| {
            let g = make_log_grid(4, 1e-4, 1e4, count).unwrap();
            let u = bubble_profile(&p, &g);
            let lap = u.radial_laplacian();
            let mut worst: f64 = 0.0;
            for (k, &r) in g.nodes().iter().enumerate() {
                if !(0.01..=100.0).contains(&r) {
                    continue;
                }
                let v = u.values()[k];
                let res = -lap[k] - p.lambda * v / (r * r) - v.powi(3);
                let scale = lap[k].abs() + p.lambda * v / (r * r) + v.powi(3);
                worst = worst.max(res.abs() / scale);
            }
            worst
        };
        let coarse = residual(2048);
        let fine = residual(4096);
        assert!(coarse < 1e-3, "coarse residual {coarse:e}");
        assert!(fine < coarse * 0.55, "no second-order decay: {coarse:e} -> {fine:e}");
    }

    #[test]
    fn sobolev_constant_matches_talenti() {
        for n in [3u32, 4, 5] {
            let quad = sobolev_constant(n).unwrap();
            let oracle = talenti(n);
            assert!(
                (quad - oracle).abs() <= 5e-3 * oracle,
                "N={n}: {quad} vs {oracle}"
            );
        }
    }

    #[test]
    fn sobolev_constant_refines_monotonically() {
        let oracle = talenti(4);
        let e1 = (sobolev_constant_with(4, 1e-4, 1e4, 1024).unwrap() - oracle).abs();
        let e2 = (sobolev_constant_with(4, 1e-4, 1e4, 2048).unwrap() - oracle).abs();
        assert!(e2 < e1);
    }

    #[test]
    fn sharp_constants_invariants() {
        let s_cal = talenti(4);
        let c = sharp_constants([0.5, 0.5, 0.5], 4, s_cal).unwrap();
        // (1/2)^{3/4} ratio for λ = Λ_4/2.
        let ratio = 0.5f64.powf(0.75);
        for k in 0..3 {
            assert!((c.s_i[k] / s_cal - ratio).abs() < 1e-12);
            assert!((c.a_i[k] - c.s_i[k].powi(2) / 4.0).abs() < 1e-12);
            assert!(c.a_i[k] < s_cal.powi(2) / 4.0);
        }
        assert!((c.c_bar - 0.75 * s_cal * s_cal).abs() < 1e-12 * c.c_bar);

        // Monotonicity: smaller λ gives a larger sharp constant.
        let c2 = sharp_constants([0.2, 0.5, 0.8], 4, s_cal).unwrap();
        assert!(c2.s_i[0] > c2.s_i[1] && c2.s_i[1] > c2.s_i[2]);
        assert_eq!(c2.s_min, c2.s_i[2]);

        assert!(sharp_constants([1.1, 0.5, 0.5], 4, s_cal).is_err());
    }

    #[test]
    fn quadrature_constants_match_closed_forms() {
        // ‖z‖_λ² of the normalized bubble equals N A_i, and the Rayleigh
        // quotient equals S_i, to quadrature accuracy.
        let g = make_log_grid(4, 1e-4, 1e4, 4096).unwrap();
        let s_cal = talenti(4);
        let lambda = 0.5;
        let c = sharp_constants([lambda; 3], 4, s_cal).unwrap();
        let p = BubbleParams::new(4, lambda, 1.0).unwrap();
        let u = bubble_profile(&p, &g);

        let norm = weighted_norm_sq(&u, lambda).unwrap();
        assert!((norm - 4.0 * c.a_i[0]).abs() < 5e-3 * norm);

        let s_quad = rayleigh_quotient(&u, lambda).unwrap();
        assert!((s_quad - c.s_i[0]).abs() < 5e-3 * c.s_i[0]);

        // Nehari identity of the exact solution: ‖z‖² = |z|_{2*}^{2*}.
        let mass = critical_mass(&u);
        assert!((norm - mass).abs() < 5e-3 * norm);
    }

    #[test]
    fn rayleigh_quotient_dilation_invariant() {
        let lambda = 0.3;
        let base = BubbleParams::new(4, lambda, 1.0).unwrap();
        let g = make_log_grid(4, 1e-4, 1e4, 4096).unwrap();
        let q1 = rayleigh_quotient(&bubble_profile(&base, &g), lambda).unwrap();
        let dilated = BubbleParams { mu: 3.7, ..base };
        let q2 = rayleigh_quotient(&bubble_profile(&dilated, &g), lambda).unwrap();
        assert!((q1 - q2).abs() < 1e-4 * q1);
    }

    #[test]
    fn hardy_bubble_couples_to_grid_operations() {
        // Cross-module sanity: lp_power_integral on the bubble reproduces the
        // critical mass, and the Hardy term stays below the Dirichlet energy.
        let g = make_log_grid(5, 1e-4, 1e4, 4096).unwrap();
        let p = BubbleParams::new(5, 1.0, 1.0).unwrap();
        let u = bubble_profile(&p, &g);
        let pw = critical_exponent(5) / 2.0;
        let mass = lp_power_integral(&u, &u, pw).unwrap();
        assert!(mass > 0.0);
        assert!(hardy_threshold(5) * hardy_term(&u, 1.0) / 1.0 <= dirichlet_energy(&u) * (1.0 + 1e-3));
    }
}
