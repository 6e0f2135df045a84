//! Radial discretization and weighted quadrature on a logarithmic grid.
//!
//! Every integral over `R^N` of a radial function reduces to
//! `ω_{N-1} ∫_0^∞ f(r) r^{N-1} dr`.  The grid stores geometrically spaced
//! nodes together with quadrature weights that fold the `r^{N-1}` Jacobian
//! into a trapezoidal rule in the log variable.  The plain trapezoid cannot
//! integrate the Jacobian itself to the required accuracy, so the end weights
//! carry the Gregory correction (3/8, 7/6, 23/24); interior weights are the
//! usual ones.  For integrands that decay at both ends of the log window the
//! rule converges faster than any power of the mesh width.
//!
//! Derivatives are centered differences in the log variable, one-sided at the
//! endpoints.  Profiles are implicitly zero outside `[r_min, r_max]`.

use std::io::{BufRead, Write};
use std::sync::Arc;

use thiserror::Error;

/// Fraction of the total integral allowed in the last decade before the tail
/// monitor flags a profile as under-resolved.
pub const TAIL_WARN_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid radial range: r_min={r_min}, r_max={r_max} (need 0 < r_min < r_max)")]
    BadRange { r_min: f64, r_max: f64 },
    #[error("grid needs at least 16 nodes, got {requested}")]
    TooFewNodes { requested: usize },
    #[error("dimension must be at least 3, got {n_dim}")]
    BadDimension { n_dim: u32 },
    #[error("profiles live on different grids")]
    GridMismatch,
    #[error("exponent must be positive, got {p}")]
    BadExponent { p: f64 },
    #[error("weighted norm is negative ({value:e}); grid too coarse or lambda too close to the Hardy threshold")]
    NegativeNorm { value: f64 },
    #[error("profile file: {0}")]
    ProfileData(String),
}

/// Geometrically spaced radial grid with quadrature weights for the
/// `r^{N-1}` surface-weighted measure.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    n_dim: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_step: f64,
    sphere_area: f64,
}

/// `2 π^{N/2} / Γ(N/2)`, the area of the unit sphere in `R^N`.
pub fn sphere_area(n_dim: u32) -> f64 {
    let half = n_dim as f64 / 2.0;
    // Γ(N/2) by downward recursion from Γ(1)=1 or Γ(1/2)=√π.
    let mut gamma = if n_dim % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if n_dim % 2 == 0 { 1.0 } else { 0.5 };
    while x + 0.5 < half {
        gamma *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(half) / gamma
}

/// Sobolev critical exponent `2* = 2N/(N-2)`.
pub fn critical_exponent(n_dim: u32) -> f64 {
    2.0 * n_dim as f64 / (n_dim as f64 - 2.0)
}

/// Hardy threshold `Λ_N = (N-2)^2/4`.
pub fn hardy_threshold(n_dim: u32) -> f64 {
    let m = n_dim as f64 - 2.0;
    m * m / 4.0
}

impl RadialGrid {
    /// Builds the log-spaced grid with Gregory-corrected trapezoidal weights.
    pub fn log_spaced(n_dim: u32, r_min: f64, r_max: f64, count: usize) -> Result<Arc<Self>, GridError> {
        if n_dim < 3 {
            return Err(GridError::BadDimension { n_dim });
        }
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(GridError::BadRange { r_min, r_max });
        }
        if count < 16 {
            return Err(GridError::TooFewNodes { requested: count });
        }
        let x_min = r_min.ln();
        let h = (r_max.ln() - x_min) / (count - 1) as f64;
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for k in 0..count {
            let r = (x_min + k as f64 * h).exp();
            nodes.push(r);
        }
        // Trapezoid in x = ln r against f(r) r^{N-1} dr = f e^{Nx} dx, with
        // Gregory end weights so that smooth non-decaying integrands (the
        // Jacobian itself) are still integrated to O(h^4).
        for k in 0..count {
            let c = gregory_coefficient(k, count);
            weights.push(c * h * nodes[k].powi(n_dim as i32));
        }
        Ok(Arc::new(RadialGrid {
            n_dim,
            nodes,
            weights,
            log_step: h,
            sphere_area: sphere_area(n_dim),
        }))
    }

    pub fn dimension(&self) -> u32 {
        self.n_dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    pub fn sphere_area(&self) -> f64 {
        self.sphere_area
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// `∫ f r^{N-1} dr` over the grid window (no sphere factor).
    pub fn quad(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.nodes.len());
        let mut acc = 0.0;
        for (w, v) in self.weights.iter().zip(samples) {
            acc += w * v;
        }
        acc
    }

    /// `ω_{N-1} ∫ f r^{N-1} dr`: the full volume integral of a radial sampler.
    pub fn volume_integral(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (w, &r) in self.weights.iter().zip(&self.nodes) {
            acc += w * f(r);
        }
        self.sphere_area * acc
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.n_dim == other.n_dim
                && self.nodes.len() == other.nodes.len()
                && self.nodes[0] == other.nodes[0]
                && self.r_max() == other.r_max())
    }
}

fn gregory_coefficient(k: usize, count: usize) -> f64 {
    let from_end = (count - 1).saturating_sub(k).min(k);
    // Gregory end weights with three difference corrections, O(h^5) on
    // smooth non-periodic integrands.
    match from_end {
        0 => 251.0 / 720.0,
        1 => 299.0 / 240.0,
        2 => 211.0 / 240.0,
        3 => 739.0 / 720.0,
        _ => 1.0,
    }
}

/// Free-function form of the grid constructor.
pub fn make_log_grid(n_dim: u32, r_min: f64, r_max: f64, count: usize) -> Result<Arc<RadialGrid>, GridError> {
    RadialGrid::log_spaced(n_dim, r_min, r_max, count)
}

/// A real radial function sampled on a shared grid.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn from_values(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count must match grid");
        RadialProfile { grid, values }
    }

    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        RadialProfile {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        RadialProfile {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// du/dr at every node: centered differences in the log variable,
    /// one-sided second-order stencils at the ends.
    pub fn radial_derivative(&self) -> Vec<f64> {
        let u = &self.values;
        let r = self.grid.nodes();
        let h = self.grid.log_step();
        let n = u.len();
        let mut d = vec![0.0; n];
        d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h * r[0]);
        for k in 1..n - 1 {
            d[k] = (u[k + 1] - u[k - 1]) / (2.0 * h * r[k]);
        }
        d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h * r[n - 1]);
        d
    }

    /// `Δu = u'' + (N-1) u'/r` at every node via the log-variable stencil
    /// `(φ'' + (N-2) φ')/r^2`.
    pub fn radial_laplacian(&self) -> Vec<f64> {
        let u = &self.values;
        let r = self.grid.nodes();
        let h = self.grid.log_step();
        let m = self.grid.dimension() as f64 - 2.0;
        let n = u.len();
        let mut out = vec![0.0; n];
        for k in 1..n - 1 {
            let d2 = (u[k + 1] - 2.0 * u[k] + u[k - 1]) / (h * h);
            let d1 = (u[k + 1] - u[k - 1]) / (2.0 * h);
            out[k] = (d2 + m * d1) / (r[k] * r[k]);
        }
        // One-sided second-order stencils at the ends.
        let d2_0 = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
        let d1_0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        out[0] = (d2_0 + m * d1_0) / (r[0] * r[0]);
        let l = n - 1;
        let d2_l = (2.0 * u[l] - 5.0 * u[l - 1] + 4.0 * u[l - 2] - u[l - 3]) / (h * h);
        let d1_l = (3.0 * u[l] - 4.0 * u[l - 1] + u[l - 2]) / (2.0 * h);
        out[l] = (d2_l + m * d1_l) / (r[l] * r[l]);
        out
    }

    /// Share of the quadrature mass of `u^2 r^{N-1}` carried by the last
    /// decade of the grid; used to monitor truncation of slowly decaying
    /// tails.
    pub fn tail_fraction(&self) -> f64 {
        let g = &self.grid;
        let cut = g.r_max() / 10.0;
        let mut total = 0.0;
        let mut tail = 0.0;
        for ((w, &r), v) in g.weights().iter().zip(g.nodes()).zip(&self.values) {
            let m = w * v * v;
            total += m;
            if r >= cut {
                tail += m;
            }
        }
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }
}

fn check_same_grid(a: &RadialProfile, b: &RadialProfile) -> Result<(), GridError> {
    if a.grid.same_grid(&b.grid) {
        Ok(())
    } else {
        Err(GridError::GridMismatch)
    }
}

/// `ω_{N-1} ∫ (u')^2 r^{N-1} dr`.
pub fn dirichlet_energy(u: &RadialProfile) -> f64 {
    let d = u.radial_derivative();
    u.grid.sphere_area() * u.grid.quad(&d.iter().map(|x| x * x).collect::<Vec<_>>())
}

/// `λ ω_{N-1} ∫ u^2 r^{N-3} dr`.
pub fn hardy_term(u: &RadialProfile, lambda: f64) -> f64 {
    let g = &u.grid;
    let mut acc = 0.0;
    for ((w, &r), v) in g.weights().iter().zip(g.nodes()).zip(&u.values) {
        acc += w * v * v / (r * r);
    }
    lambda * g.sphere_area() * acc
}

/// `‖u‖_λ^2 = ∫ |∇u|^2 - λ u^2/|x|^2`.
pub fn weighted_norm_sq(u: &RadialProfile, lambda: f64) -> Result<f64, GridError> {
    let e = dirichlet_energy(u);
    let value = e - hardy_term(u, lambda);
    if value < -1e-10 * e.max(f64::MIN_POSITIVE) {
        return Err(GridError::NegativeNorm { value });
    }
    Ok(value)
}

/// `ω_{N-1} ∫ |u|^p |v|^p r^{N-1} dr`.
pub fn lp_power_integral(u: &RadialProfile, v: &RadialProfile, p: f64) -> Result<f64, GridError> {
    check_same_grid(u, v)?;
    if !(p > 0.0) {
        return Err(GridError::BadExponent { p });
    }
    let g = &u.grid;
    let mut acc = 0.0;
    if p == 1.0 {
        for ((w, a), b) in g.weights().iter().zip(&u.values).zip(&v.values) {
            acc += w * (a * b).abs();
        }
    } else if p == 2.0 {
        for ((w, a), b) in g.weights().iter().zip(&u.values).zip(&v.values) {
            acc += w * a * a * b * b;
        }
    } else {
        for ((w, a), b) in g.weights().iter().zip(&u.values).zip(&v.values) {
            if *a != 0.0 && *b != 0.0 {
                acc += w * a.abs().powf(p) * b.abs().powf(p);
            }
        }
    }
    Ok(g.sphere_area() * acc)
}

/// `|u|_{2*}^{2*}`, the critical-power mass of one profile.
pub fn critical_mass(u: &RadialProfile) -> f64 {
    let p = critical_exponent(u.grid.dimension()) / 2.0;
    lp_power_integral(u, u, p).expect("same grid")
}

/// Writes a profile as two-column text `r value`, one node per line.
pub fn write_profile(u: &RadialProfile, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "# radial profile: N={} nodes={}", u.grid.dimension(), u.grid.len())?;
    writeln!(out, "# r value")?;
    for (&r, v) in u.grid.nodes().iter().zip(u.values()) {
        writeln!(out, "{:.16e} {:.16e}", r, v)?;
    }
    Ok(())
}

/// Reads a two-column `r value` file onto the given grid.  Whitespace
/// separated, `#` starts a comment.  Values at nodes not present in the data
/// are filled by linear interpolation in log r; nodes outside the data range
/// are zero.
pub fn read_profile(grid: &Arc<RadialGrid>, input: &mut impl BufRead) -> Result<RadialProfile, GridError> {
    let mut data: Vec<(f64, f64)> = Vec::new();
    let mut line = String::new();
    loop {
        line.clear();
        let n = input
            .read_line(&mut line)
            .map_err(|e| GridError::ProfileData(e.to_string()))?;
        if n == 0 {
            break;
        }
        let body = match line.split('#').next() {
            Some(b) => b.trim(),
            None => continue,
        };
        if body.is_empty() {
            continue;
        }
        let mut parts = body.split_whitespace();
        let r: f64 = parts
            .next()
            .ok_or_else(|| GridError::ProfileData(format!("missing radius in line {line:?}")))?
            .parse()
            .map_err(|e| GridError::ProfileData(format!("bad radius: {e}")))?;
        let v: f64 = parts
            .next()
            .ok_or_else(|| GridError::ProfileData(format!("missing value in line {line:?}")))?
            .parse()
            .map_err(|e| GridError::ProfileData(format!("bad value: {e}")))?;
        if !(r > 0.0) || !v.is_finite() {
            return Err(GridError::ProfileData(format!("bad sample ({r}, {v})")));
        }
        data.push((r, v));
    }
    if data.len() < 2 {
        return Err(GridError::ProfileData("need at least two samples".into()));
    }
    data.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let values = grid
        .nodes()
        .iter()
        .map(|&r| interp_log(&data, r))
        .collect();
    Ok(RadialProfile::from_values(Arc::clone(grid), values))
}

fn interp_log(data: &[(f64, f64)], r: f64) -> f64 {
    if r < data[0].0 || r > data[data.len() - 1].0 {
        return 0.0;
    }
    let idx = data.partition_point(|&(x, _)| x <= r);
    if idx == 0 {
        return data[0].1;
    }
    if idx >= data.len() {
        return data[data.len() - 1].1;
    }
    let (r0, v0) = data[idx - 1];
    let (r1, v1) = data[idx];
    if r1 == r0 {
        return v0;
    }
    let t = (r.ln() - r0.ln()) / (r1.ln() - r0.ln());
    v0 + t * (v1 - v0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_grid(n: u32) -> Arc<RadialGrid> {
        RadialGrid::log_spaced(n, 1e-4, 1e4, 4096).unwrap()
    }

    #[test]
    fn constructor_contract() {
        let g = RadialGrid::log_spaced(3, 1e-4, 1e4, 4096).unwrap();
        assert_eq!(g.len(), 4096);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!((g.r_min() - 1e-4).abs() < 1e-18);
        assert!((g.r_max() - 1e4).abs() < 1e-10 * 1e4);
    }

    #[test]
    fn bad_ranges_rejected() {
        assert!(RadialGrid::log_spaced(3, 0.0, 1.0, 64).is_err());
        assert!(RadialGrid::log_spaced(3, 2.0, 1.0, 64).is_err());
        assert!(RadialGrid::log_spaced(3, 1e-3, 1.0, 8).is_err());
        assert!(RadialGrid::log_spaced(2, 1e-3, 1.0, 64).is_err());
    }

    #[test]
    fn constant_one_integrates_exactly() {
        for n in 3..=6u32 {
            let g = RadialGrid::log_spaced(n, 1e-4, 1e4, 4096).unwrap();
            let quad: f64 = g.weights().iter().sum();
            let exact = (g.r_max().powi(n as i32) - g.r_min().powi(n as i32)) / n as f64;
            assert!(
                (quad - exact).abs() <= 1e-8 * exact,
                "N={n}: relative error {:e}",
                (quad - exact).abs() / exact
            );
        }
    }

    #[test]
    fn gaussian_moment_matches_analytic() {
        // ∫_0^∞ e^{-r^2} r^2 dr = √π/4 in the N=3 weight.
        let g = default_grid(3);
        let quad = g.quad(&g.nodes().iter().map(|&r| (-r * r).exp()).collect::<Vec<_>>());
        let exact = std::f64::consts::PI.sqrt() / 4.0;
        assert!(
            (quad - exact).abs() <= 1e-6 * exact,
            "relative error {:e}",
            (quad - exact).abs() / exact
        );
    }

    #[test]
    fn exponential_moments_match_analytic() {
        // ∫ r^k e^{-r} r^{N-1} dr = Γ(N+k) for integer N+k.
        let g = default_grid(4);
        for k in 0..3u32 {
            let quad = g.quad(
                &g.nodes()
                    .iter()
                    .map(|&r| r.powi(k as i32) * (-r).exp())
                    .collect::<Vec<_>>(),
            );
            let exact = (1..(4 + k)).map(|m| m as f64).product::<f64>();
            assert!(
                (quad - exact).abs() <= 1e-6 * exact,
                "k={k}: relative error {:e}",
                (quad - exact).abs() / exact
            );
        }
    }

    #[test]
    fn refinement_reduces_error() {
        let exact = std::f64::consts::PI.sqrt() / 4.0;
        let err = |k: usize| {
            let g = RadialGrid::log_spaced(3, 1e-3, 50.0, k).unwrap();
            let quad = g.quad(&g.nodes().iter().map(|&r| (-r * r).exp()).collect::<Vec<_>>());
            (quad - exact).abs()
        };
        let coarse = err(16);
        let fine = err(32);
        assert!(fine * 2.0 <= coarse, "coarse={coarse:e} fine={fine:e}");
    }

    #[test]
    fn dirichlet_zero_for_constants_and_quadratic_scaling() {
        let g = default_grid(4);
        let c = RadialProfile::from_fn(&g, |_| 1.0);
        assert!(dirichlet_energy(&c) < 1e-20);

        let u = RadialProfile::from_fn(&g, |r| (-(r.ln()).powi(2)).exp());
        let e1 = dirichlet_energy(&u);
        let e3 = dirichlet_energy(&u.scaled(3.0));
        assert!((e3 - 9.0 * e1).abs() <= 1e-14 * e3);
    }

    #[test]
    fn hardy_zero_lambda_and_dilation_covariance() {
        let g = default_grid(5);
        let u = RadialProfile::from_fn(&g, |r| (-(r.ln() - 0.3).powi(2)).exp());
        assert_eq!(hardy_term(&u, 0.0), 0.0);

        // m^{-(N-2)/2} u(r/m) leaves the Hardy quadratic form unchanged.
        let m: f64 = 2.7;
        let pow = -(5.0 - 2.0) / 2.0;
        let v = RadialProfile::from_fn(&g, |r| m.powf(pow) * (-((r / m).ln() - 0.3).powi(2)).exp());
        let a = hardy_term(&u, 1.0);
        let b = hardy_term(&v, 1.0);
        assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn discrete_hardy_inequality_on_random_bumps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for n in 3..=6u32 {
            let g = default_grid(n);
            for _ in 0..50 {
                // Bump supports stay well inside the window: the e^{(N-2)x}
                // weight amplifies any right-edge tail.
                let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..4))
                    .map(|_| {
                        (
                            rng.gen_range(-4.0..4.0),
                            rng.gen_range(0.3..0.8),
                            rng.gen_range(-1.0..1.0f64).signum() * rng.gen_range(0.2..1.0),
                        )
                    })
                    .collect();
                let u = RadialProfile::from_fn(&g, |r| {
                    let x = r.ln();
                    bumps
                        .iter()
                        .map(|&(m, s, c)| c * (-(x - m) * (x - m) / (2.0 * s * s)).exp())
                        .sum()
                });
                let lhs = hardy_threshold(n) * hardy_term(&u, 1.0);
                let rhs = dirichlet_energy(&u);
                assert!(lhs <= rhs * (1.0 + 1e-3), "N={n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn weighted_norm_reduces_and_rejects() {
        let g = default_grid(4);
        let u = RadialProfile::from_fn(&g, |r| (-(r.ln()).powi(2)).exp());
        let e = dirichlet_energy(&u);
        assert_eq!(weighted_norm_sq(&u, 0.0).unwrap(), e);
        let z = RadialProfile::zeros(&g);
        assert_eq!(weighted_norm_sq(&z, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn lp_power_integral_diagonal_and_disjoint() {
        let g = default_grid(4);
        let u = RadialProfile::from_fn(&g, |r| 1.0 / (1.0 + r * r));
        let p = critical_exponent(4) / 2.0;
        let diag = lp_power_integral(&u, &u, p).unwrap();
        // |u|_{2*}^{2*} computed directly.
        let direct = g.volume_integral(|r| (1.0 / (1.0 + r * r)).powi(4));
        assert!((diag - direct).abs() <= 1e-12 * direct);

        let a = RadialProfile::from_fn(&g, |r| if r < 0.5 { 1.0 } else { 0.0 });
        let b = RadialProfile::from_fn(&g, |r| if r > 2.0 { 1.0 } else { 0.0 });
        assert_eq!(lp_power_integral(&a, &b, p).unwrap(), 0.0);
    }

    #[test]
    fn lp_power_integral_holder_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let g = default_grid(4);
        let p = critical_exponent(4) / 2.0;
        for _ in 0..20 {
            let (m1, m2) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let u = RadialProfile::from_fn(&g, |r| (-(r.ln() - m1).powi(2)).exp());
            let v = RadialProfile::from_fn(&g, |r| (-(r.ln() - m2).powi(2)).exp());
            let cross = lp_power_integral(&u, &v, p).unwrap();
            let bound = critical_mass(&u).sqrt() * critical_mass(&v).sqrt();
            assert!(cross <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn grid_mismatch_detected() {
        let g1 = default_grid(4);
        let g2 = RadialGrid::log_spaced(4, 1e-3, 1e3, 1024).unwrap();
        let u = RadialProfile::from_fn(&g1, |r| r.min(1.0));
        let v = RadialProfile::from_fn(&g2, |r| r.min(1.0));
        assert_eq!(lp_power_integral(&u, &v, 2.0), Err(GridError::GridMismatch));
    }

    #[test]
    fn profile_roundtrip_and_interpolation() {
        let g = RadialGrid::log_spaced(4, 1e-2, 1e2, 128).unwrap();
        let u = RadialProfile::from_fn(&g, |r| 1.0 / (1.0 + r * r));
        let mut buf = Vec::new();
        write_profile(&u, &mut buf).unwrap();
        let back = read_profile(&g, &mut buf.as_slice()).unwrap();
        for (a, b) in u.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12));
        }

        // Sparse data interpolates in log r; outside the range it is zero.
        let text = "# sparse\n0.1 1.0\n10.0 3.0\n";
        let v = read_profile(&g, &mut text.as_bytes()).unwrap();
        let mid = v.values()[g.nodes().iter().position(|&r| r >= 1.0).unwrap()];
        assert!((mid - 2.0).abs() < 0.05);
        assert_eq!(v.values()[0], 0.0);
        assert_eq!(*v.values().last().unwrap(), 0.0);
    }

    #[test]
    fn tail_fraction_flags_slow_decay() {
        let g = default_grid(4);
        let compact = RadialProfile::from_fn(&g, |r| (-(r.ln()).powi(2)).exp());
        assert!(compact.tail_fraction() < TAIL_WARN_FRACTION);
        let heavy = RadialProfile::from_fn(&g, |r| 1.0 / (1.0 + r));
        assert!(heavy.tail_fraction() > TAIL_WARN_FRACTION);
    }
}
