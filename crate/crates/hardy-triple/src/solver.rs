//! Constrained energy minimization and the experiment procedures built on it.
//!
//! Two descent engines share one preconditioner:
//!
//! * quotient descent minimizes `E(u)/F(u)^{2/2*}` over nonzero triples; its
//!   minimum is the ground-state level after the one-dimensional rescaling
//!   onto the full-derivative constraint set;
//! * constrained descent takes a gradient step of the energy on every
//!   component and reprojects onto the per-component constraint set with the
//!   regime-appropriate projection.
//!
//! The preconditioner is the tridiagonal `H¹`-type operator assembled from
//! the log-grid Dirichlet form plus the inverse-square mass; without it the
//! `r^N` spread of the quadrature weights makes plain gradient steps useless.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::closed_forms::{bubble_profile, BubbleParams, ClosedFormError};
use crate::functional::{
    condition_1_13_check, energy, interaction_matrix, nehari_full_residual, ConditionVerdict,
    CouplingMatrix, FunctionalError, TripleState,
};
use crate::grid::{critical_exponent, GridError, RadialGrid, RadialProfile};
use crate::mat3;
use crate::nehari::{
    cubic_coefficients, project_two_block, NehariCoefficients, NehariError, Regime,
};
use crate::thresholds::{chain_for, ThresholdError};

/// A component counts as numerically zero in a classification when its
/// `L^{2*}` norm falls below this fraction of the largest component's.  The
/// norm (not its `2*`-th power) is the right yardstick: in the weakly
/// cooperative regime for `N ≥ 5` the minority components of the ground
/// state carry amplitudes of order `β³`, far above this cut in norm but not
/// in critical mass.
pub const CLASSIFICATION_NORM_FRACTION: f64 = 1e-6;

/// Converged results carry a relative stationarity measure below this.
pub const CONVERGED_GRADIENT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("optimizer did not reach a stationary point after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: u32, residual: f64 },
    #[error("coupling form is nonpositive on the iterate (F = {value:e})")]
    InvalidQuotient { value: f64 },
    #[error("projection failed: {0}")]
    ProjectionFailure(#[from] NehariError),
    #[error("state is not on the constraint set (relative residual {residual:e})")]
    NotOnManifold { residual: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub max_iter: u32,
    /// Relative energy-stall tolerance.
    pub tol: f64,
    pub restarts: u32,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            max_iter: 2000,
            tol: 1e-13,
            restarts: 8,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelKind {
    GroundStateN,
    LeastEnergyM,
    PairAij,
    ScalarAi,
    TwoBlockAtilde,
}

impl fmt::Display for LevelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LevelKind::GroundStateN => "ground-state-N",
            LevelKind::LeastEnergyM => "least-energy-M",
            LevelKind::PairAij => "pair-A_ij",
            LevelKind::ScalarAi => "scalar-A_i",
            LevelKind::TwoBlockAtilde => "two-block-Atilde",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    FullyNontrivial,
    SemiTrivial { zero_components: u8 },
    Trivial,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::FullyNontrivial => f.write_str("fully-nontrivial"),
            Classification::SemiTrivial { zero_components } => {
                write!(f, "semi-trivial({zero_components})")
            }
            Classification::Trivial => f.write_str("trivial"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSummary {
    /// Relative stationarity measure of the discrete objective.
    pub gradient: f64,
    /// Worst relative constraint residual of the reported state.
    pub constraint: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub state: TripleState,
    pub energy: f64,
    pub level_kind: LevelKind,
    pub classification: Classification,
    pub residuals: ResidualSummary,
    pub iterations: u32,
    pub converged: bool,
}

impl MinimizeResult {
    /// Flat `key: value` record, 17 significant digits.
    pub fn to_key_value_text(&self) -> String {
        let lam = self.state.lambdas();
        let beta = self.state.beta().off_diagonal();
        let entries: Vec<(&str, String)> = vec![
            ("N", format!("{}", self.state.dimension())),
            ("level_kind", format!("\"{}\"", self.level_kind)),
            ("classification", format!("\"{}\"", self.classification)),
            ("energy", format!("{:.16e}", self.energy)),
            ("gradient_residual", format!("{:.16e}", self.residuals.gradient)),
            ("constraint_residual", format!("{:.16e}", self.residuals.constraint)),
            ("iterations", format!("{}", self.iterations)),
            ("converged", format!("{}", self.converged)),
            ("lambda_1", format!("{:.16e}", lam[0])),
            ("lambda_2", format!("{:.16e}", lam[1])),
            ("lambda_3", format!("{:.16e}", lam[2])),
            ("beta_12", format!("{:.16e}", beta[0])),
            ("beta_13", format!("{:.16e}", beta[1])),
            ("beta_23", format!("{:.16e}", beta[2])),
        ];
        let mut out = String::from("{\n");
        for (i, (k, v)) in entries.iter().enumerate() {
            let sep = if i + 1 == entries.len() { "" } else { "," };
            out.push_str(&format!("  \"{k}\": {v}{sep}\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Classifies a state by the relative `L^{2*}` norms of its components.
pub fn classify(state: &TripleState) -> Classification {
    let two_star = critical_exponent(state.dimension());
    let norms: Vec<f64> = state
        .masses()
        .iter()
        .map(|m| m.powf(1.0 / two_star))
        .collect();
    let top = norms.iter().cloned().fold(0.0f64, f64::max);
    if top <= 0.0 {
        return Classification::Trivial;
    }
    let zeros = norms
        .iter()
        .filter(|&&m| m < CLASSIFICATION_NORM_FRACTION * top)
        .count() as u8;
    if zeros == 0 {
        Classification::FullyNontrivial
    } else if zeros == 3 {
        Classification::Trivial
    } else {
        Classification::SemiTrivial {
            zero_components: zeros,
        }
    }
}

// ---------------------------------------------------------------------------
// Preconditioner and discrete gradients
// ---------------------------------------------------------------------------

/// Tridiagonal SPD operator: log-grid Dirichlet stiffness plus the
/// inverse-square mass, used as the descent metric.
pub(crate) struct Preconditioner {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Preconditioner {
    /// Metric operator `T - (λ - σ) M` with `T` the tridiagonal log-grid
    /// Dirichlet stiffness and `M` the inverse-square mass; the shift
    /// `σ = Λ_N/10` keeps it positive definite for every admissible λ.
    pub(crate) fn for_operator(grid: &RadialGrid, lambda: f64) -> Self {
        let n = grid.len();
        let h = grid.log_step();
        let r = grid.nodes();
        let m = (grid.dimension() as f64 - 2.0) / 2.0;
        let sigma = crate::grid::hardy_threshold(grid.dimension()) * 0.1;
        let mut off = vec![0.0; n - 1];
        let mut diag = vec![0.0; n];
        for k in 0..n - 1 {
            let c = (r[k] * r[k + 1]).powf(m) / h;
            off[k] = -c;
            diag[k] += c;
            diag[k + 1] += c;
        }
        for k in 0..n {
            diag[k] += (sigma - lambda) * grid.weights()[k] / (r[k] * r[k]);
        }
        // Boundary nodes are frozen in the descent; decouple their rows so
        // the operator acts on the pinned-end interior space, where the
        // discrete Hardy bound keeps the shifted form positive definite.
        diag[0] -= (sigma - lambda) * grid.weights()[0] / (r[0] * r[0]);
        diag[n - 1] -= (sigma - lambda) * grid.weights()[n - 1] / (r[n - 1] * r[n - 1]);
        off[0] = 0.0;
        off[n - 2] = 0.0;
        Preconditioner { diag, off }
    }

    pub(crate) fn for_grid(grid: &RadialGrid) -> Self {
        Self::for_operator(grid, -1.0)
    }

    /// Thomas solve of the tridiagonal system.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = self.off[0] / self.diag[0];
        d[0] = rhs[0] / self.diag[0];
        for k in 1..n {
            let m = self.diag[k] - self.off[k - 1] * c[k - 1];
            if k < n - 1 {
                c[k] = self.off[k] / m;
            }
            d[k] = (rhs[k] - self.off[k - 1] * d[k - 1]) / m;
        }
        let mut x = d;
        for k in (0..n - 1).rev() {
            let next = x[k + 1];
            x[k] -= c[k] * next;
        }
        x
    }

    pub(crate) fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[k] = self.diag[k] * v[k];
            if k > 0 {
                out[k] += self.off[k - 1] * v[k - 1];
            }
            if k + 1 < n {
                out[k] += self.off[k] * v[k + 1];
            }
        }
        out
    }
}

fn pow_p(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else if p == 3.0 {
        let a = x.abs();
        a * a * a
    } else if x == 0.0 {
        0.0
    } else {
        x.abs().powf(p)
    }
}

/// `|x|^{p-2} x`, the odd power used by coupling gradients; zero at zero for
/// every p > 1.
fn odd_pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p == 2.0 {
        x
    } else if p == 3.0 {
        x.abs() * x
    } else {
        x.abs().powf(p - 2.0) * x
    }
}

/// Exact gradient of the discrete Dirichlet energy
/// `ω Σ w_k ((Du)_k)²` with the one-sided end stencils of the derivative.
fn dirichlet_gradient(u: &RadialProfile) -> Vec<f64> {
    let grid = u.grid();
    let n = grid.len();
    let h = grid.log_step();
    let r = grid.nodes();
    let w = grid.weights();
    let omega = grid.sphere_area();
    let d = u.radial_derivative();
    let mut g = vec![0.0; n];
    // q_k = 2 ω w_k d_k distributed through the stencil coefficients.
    let q: Vec<f64> = (0..n).map(|k| 2.0 * omega * w[k] * d[k]).collect();
    {
        let c = q[0] / (2.0 * h * r[0]);
        g[0] += -3.0 * c;
        g[1] += 4.0 * c;
        g[2] += -c;
    }
    for k in 1..n - 1 {
        let c = q[k] / (2.0 * h * r[k]);
        g[k + 1] += c;
        g[k - 1] -= c;
    }
    {
        let c = q[n - 1] / (2.0 * h * r[n - 1]);
        g[n - 1] += 3.0 * c;
        g[n - 2] -= 4.0 * c;
        g[n - 3] += c;
    }
    g
}

/// Gradient of `‖u‖_λ²` (Dirichlet minus Hardy quadratic forms).
fn norm_sq_gradient(u: &RadialProfile, lambda: f64) -> Vec<f64> {
    let grid = u.grid();
    let mut g = dirichlet_gradient(u);
    for (k, gv) in g.iter_mut().enumerate() {
        let r = grid.nodes()[k];
        *gv -= 2.0 * lambda * grid.sphere_area() * grid.weights()[k] * u.values()[k] / (r * r);
    }
    g
}

/// Pointwise coupling densities `Σ_j β_ij |u_j|^p` for one component.
fn coupling_density(state: &TripleState, i: usize, p: f64, active: &[usize]) -> Vec<f64> {
    let n = state.grid().len();
    let mut out = vec![0.0; n];
    for &j in active {
        let b = state.beta().get(i, j);
        if b == 0.0 {
            continue;
        }
        let uj = state.component(j).values();
        for k in 0..n {
            out[k] += b * pow_p(uj[k], p);
        }
    }
    out
}

/// `F(u) = Σ_{ij} β_ij ∫ |u_i|^p |u_j|^p` over the active components.
fn coupling_form(state: &TripleState, active: &[usize]) -> f64 {
    let grid = state.grid();
    let p = critical_exponent(state.dimension()) / 2.0;
    let mut acc = 0.0;
    for &i in active {
        let ui = state.component(i).values();
        let dens = coupling_density(state, i, p, active);
        for k in 0..grid.len() {
            acc += grid.weights()[k] * pow_p(ui[k], p) * dens[k];
        }
    }
    grid.sphere_area() * acc
}

/// Gradient of `F` with respect to component `i`.
fn coupling_gradient(state: &TripleState, i: usize, active: &[usize]) -> Vec<f64> {
    let grid = state.grid();
    let p = critical_exponent(state.dimension()) / 2.0;
    let dens = coupling_density(state, i, p, active);
    let ui = state.component(i).values();
    let mut g = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        g[k] = 2.0 * p * grid.sphere_area() * grid.weights()[k] * odd_pow(ui[k], p) * dens[k];
    }
    g
}

/// Boundary nodes are not descent variables: profiles are implicitly zero
/// outside the window, and a free outer boundary value reopens the
/// truncated-window Hardy instability (boundary modes can push the weighted
/// norm to zero).
fn freeze_ends(v: &mut [f64]) {
    let n = v.len();
    v[0] = 0.0;
    v[n - 1] = 0.0;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yv, xv) in y.iter_mut().zip(x) {
        *yv += alpha * xv;
    }
}

// ---------------------------------------------------------------------------
// Quotient descent (ground-state level)
// ---------------------------------------------------------------------------

struct DescentOutcome {
    iterations: u32,
    stationarity: f64,
    converged: bool,
}

/// Minimizes `E/F^{2/2*}` in place over the active components.
fn minimize_quotient(
    state: &mut TripleState,
    active: &[usize],
    opts: &OptimizerOptions,
) -> Result<DescentOutcome, SolverError> {
    let two_star = critical_exponent(state.dimension());
    let exponent = 2.0 / two_star;
    let pres: Vec<Preconditioner> = active
        .iter()
        .map(|&i| Preconditioner::for_operator(state.grid(), state.lambdas()[i]))
        .collect();

    let eval = |state: &TripleState| -> Result<(f64, f64, f64), SolverError> {
        let norms = state.norms_sq()?;
        let e: f64 = active.iter().map(|&i| norms[i]).sum();
        let f = coupling_form(state, active);
        if !(f > 0.0) {
            return Err(SolverError::InvalidQuotient { value: f });
        }
        if !(e > 0.0) {
            return Err(SolverError::InvalidQuotient { value: e });
        }
        Ok((e, f, e / f.powf(exponent)))
    };

    // Normalize to F = 1.
    let (_, f0, _) = eval(state)?;
    let c = f0.powf(-1.0 / two_star);
    for &i in active {
        state.component_mut(i).scale(c);
    }

    let (mut e, mut f, mut quot) = eval(state)?;
    let mut step = 1.0;
    let mut stall = 0u32;
    let mut stationarity = f64::INFINITY;
    let mut iterations = 0;
    let mut prev: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> = None;

    while iterations < opts.max_iter {
        // Euclidean gradient of the quotient scaled by F^{2/2*} > 0.
        let ratio = exponent * e / f;
        let mut grads: Vec<Vec<f64>> = Vec::with_capacity(active.len());
        for &i in active {
            let mut g = norm_sq_gradient(state.component(i), state.lambdas()[i]);
            let cf = coupling_gradient(state, i, active);
            axpy(&mut g, -ratio, &cf);
            freeze_ends(&mut g);
            grads.push(g);
        }
        let mut dirs: Vec<Vec<f64>> = grads
            .iter()
            .zip(&pres)
            .map(|(g, pre)| pre.solve(g))
            .collect();
        for d in &mut dirs {
            freeze_ends(d);
        }
        let g_dot_d: f64 = grads.iter().zip(&dirs).map(|(g, d)| dot(g, d)).sum();
        if std::env::var_os("HT_TRACE").is_some() {
            let m = state.masses();
            let top = m.iter().cloned().fold(0.0f64, f64::max);
            eprintln!(
                "iter {iterations}: quot={quot:.9e} step={step:.3e} gd={g_dot_d:.3e} m=[{:.2e} {:.2e} {:.2e}]",
                m[0] / top, m[1] / top, m[2] / top
            );
        }

        // Dimensionless stationarity: Cauchy bound for the relative change of
        // the quotient under a relative move of the iterate in the metric.
        let mut u_pu = 0.0;
        for (slot, &i) in active.iter().enumerate() {
            let pu = pres[slot].apply(state.component(i).values());
            u_pu += dot(state.component(i).values(), &pu);
        }
        stationarity = (g_dot_d.max(0.0) * u_pu).sqrt() / quot.max(f64::MIN_POSITIVE);
        if stationarity < CONVERGED_GRADIENT_TOL {
            return Ok(DescentOutcome {
                iterations,
                stationarity,
                converged: true,
            });
        }

        // Barzilai-Borwein step along the preconditioned gradient, with an
        // Armijo backtracking safeguard.
        if let Some((u_prev, g_prev, d_prev)) = &prev {
            let mut du_dg = 0.0;
            let mut dg_dd = 0.0;
            for (slot, &i) in active.iter().enumerate() {
                let u = state.component(i).values();
                for k in 0..u.len() {
                    let du = u[k] - u_prev[slot][k];
                    let dg = grads[slot][k] - g_prev[slot][k];
                    let dd = dirs[slot][k] - d_prev[slot][k];
                    du_dg += du * dg;
                    dg_dd += dg * dd;
                }
            }
            if du_dg.abs() > 0.0 && dg_dd > 0.0 {
                step = (du_dg.abs() / dg_dd).clamp(1e-12, 1e4);
            }
        }

        let mut accepted = false;
        for _ in 0..50 {
            let mut trial = state.clone();
            for (slot, &i) in active.iter().enumerate() {
                axpy(trial.component_mut(i).values_mut(), -step, &dirs[slot]);
            }
            match eval(&trial) {
                Ok((te, tf, tq)) if tq < quot - 1e-6 * step * g_dot_d => {
                    let rel_drop = (quot - tq) / quot.max(f64::MIN_POSITIVE);
                    prev = Some((
                        active
                            .iter()
                            .map(|&i| state.component(i).values().to_vec())
                            .collect(),
                        grads.clone(),
                        dirs.clone(),
                    ));
                    *state = trial;
                    e = te;
                    f = tf;
                    quot = tq;
                    accepted = true;
                    if rel_drop < opts.tol {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                    break;
                }
                _ => step *= 0.5,
            }
        }
        iterations += 1;
        if !accepted || stall >= 30 {
            break;
        }
        // Keep F pinned at one so the scales stay bounded.
        let c = f.powf(-1.0 / two_star);
        if (c - 1.0).abs() > 1e-3 {
            for &i in active {
                state.component_mut(i).scale(c);
            }
            // The rescale breaks the BB secant pair.
            prev = None;
            let fresh = eval(state)?;
            e = fresh.0;
            f = fresh.1;
            quot = fresh.2;
        }
    }

    Ok(DescentOutcome {
        iterations,
        stationarity,
        converged: stationarity < CONVERGED_GRADIENT_TOL,
    })
}

/// Rescales the state onto the full-derivative constraint set and packages
/// the result; the level value is `I` of the rescaled state.
fn package_quotient_result(
    mut state: TripleState,
    active: &[usize],
    outcome: DescentOutcome,
    level_kind: LevelKind,
) -> Result<MinimizeResult, SolverError> {
    let two_star = critical_exponent(state.dimension());
    let norms = state.norms_sq()?;
    let e: f64 = active.iter().map(|&i| norms[i]).sum();
    let f = coupling_form(&state, active);
    if !(f > 0.0) {
        return Err(SolverError::InvalidQuotient { value: f });
    }
    let t = (e / f).powf(1.0 / (two_star - 2.0));
    for &i in active {
        state.component_mut(i).scale(t);
    }
    let value = energy(&state)?;
    let constraint = nehari_full_residual(&state)?;
    let classification = classify(&state);
    Ok(MinimizeResult {
        state,
        energy: value,
        level_kind,
        classification,
        residuals: ResidualSummary {
            gradient: outcome.stationarity,
            constraint,
        },
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

/// Ground-state level: quotient descent from the given start.
pub fn ground_state_level(
    state0: &TripleState,
    opts: &OptimizerOptions,
) -> Result<MinimizeResult, SolverError> {
    let report = condition_1_13_check(state0.beta(), 32, opts.seed);
    if let ConditionVerdict::Counterexample { value, .. } = report.verdict {
        return Err(SolverError::Domain(format!(
            "coupling positivity condition falsified (witness value {value:e}); the quotient is not bounded away from zero"
        )));
    }
    let mut state = state0.clone();
    let active: Vec<usize> = state.live_components();
    if active.is_empty() {
        return Err(SolverError::Domain("initial state is zero".into()));
    }
    let outcome = minimize_quotient(&mut state, &active, opts)?;
    package_quotient_result(state, &active, outcome, LevelKind::GroundStateN)
}

/// Scalar ground state `A_i`: single-component quotient descent from a
/// log-Gaussian bump.
pub fn scalar_ground_state(
    lambda: f64,
    n_dim: u32,
    grid: &Arc<RadialGrid>,
    opts: &OptimizerOptions,
) -> Result<MinimizeResult, SolverError> {
    if grid.dimension() != n_dim {
        return Err(SolverError::Domain(format!(
            "grid dimension {} does not match N = {n_dim}",
            grid.dimension()
        )));
    }
    let bump = RadialProfile::from_fn(grid, |r| (-(r.ln()).powi(2) / 2.0).exp());
    let mut state = TripleState::new(
        [bump, RadialProfile::zeros(grid), RadialProfile::zeros(grid)],
        [lambda; 3],
        CouplingMatrix::identity(),
    )?;
    let outcome = minimize_quotient(&mut state, &[0], opts)?;
    let mut result = package_quotient_result(state, &[0], outcome, LevelKind::ScalarAi)?;
    // Single-component constraint residual: scalar identity ‖u‖² = |u|_{2*}^{2*}.
    let norms = result.state.norms_sq()?;
    let mass = result.state.masses()[0];
    result.residuals.constraint = (norms[0] - mass).abs() / norms[0].max(f64::MIN_POSITIVE);
    Ok(result)
}

// ---------------------------------------------------------------------------
// Constrained descent on the per-component constraint set
// ---------------------------------------------------------------------------

/// Regime-appropriate projection of the active components; returns amplitude
/// multipliers.
fn project_regime(state: &TripleState, active: &[usize]) -> Result<NehariCoefficients, NehariError> {
    match state.dimension() {
        4 => {
            let m = interaction_matrix(state);
            let margins = mat3::dominance_margins(m.entries(), active);
            let margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
            if margin <= 0.0 {
                return Err(NehariError::NotDominant { margin });
            }
            let norms = state.norms_sq().map_err(NehariError::Functional)?;
            let s = mat3::solve_masked(m.entries(), &norms, active)
                .ok_or(NehariError::NotDominant { margin })?;
            let mut t = [0.0; 3];
            for &i in active {
                if s[i] <= 0.0 {
                    return Err(NehariError::NonpositiveCoefficient { index: i, value: s[i] });
                }
                t[i] = s[i].sqrt();
            }
            Ok(NehariCoefficients {
                t,
                regime: Regime::LinearN4,
                converged: true,
                iterations: 1,
            })
        }
        3 => {
            let norms = state.norms_sq().map_err(NehariError::Functional)?;
            let b = interaction_matrix(state);
            let (t, iterations) = cubic_coefficients(&norms, b.entries(), active)?;
            Ok(NehariCoefficients {
                t,
                regime: Regime::CubicN3,
                converged: true,
                iterations,
            })
        }
        n => {
            let p = n as f64 / (n as f64 - 2.0);
            project_two_block(state, p)
        }
    }
}

/// Worst relative residual of the constraints targeted by the regime.
fn regime_constraint_residual(state: &TripleState, active: &[usize]) -> Result<f64, SolverError> {
    let norms = state.norms_sq()?;
    let m = interaction_matrix(state);
    if state.dimension() >= 5 {
        // Two-block constraints.
        let block_norm = norms[0] + norms[1];
        let block_rhs = m.get(0, 0) + m.get(0, 1) + m.get(1, 0) + m.get(1, 1)
            + m.get(0, 2)
            + m.get(1, 2);
        let single_rhs = m.get(2, 2) + m.get(2, 0) + m.get(2, 1);
        let r1 = (block_norm - block_rhs).abs() / block_norm.max(f64::MIN_POSITIVE);
        let r2 = (norms[2] - single_rhs).abs() / norms[2].max(f64::MIN_POSITIVE);
        return Ok(r1.max(r2));
    }
    let rows = m.row_sums();
    let mut worst = 0.0f64;
    for &i in active {
        worst = worst.max((norms[i] - rows[i]).abs() / norms[i].max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Projected descent of `I` on the regime constraint set, in place.
fn minimize_constrained(
    state: &mut TripleState,
    active: &[usize],
    opts: &OptimizerOptions,
) -> Result<DescentOutcome, SolverError> {
    let coeff = project_regime(state, active)?;
    *state = state.rescaled(coeff.t);
    let mut value = energy(state)?;
    let mut step = 1.0;
    let mut stall = 0u32;
    let mut stationarity = f64::INFINITY;
    let mut iterations = 0;
    let two_star = critical_exponent(state.dimension());
    let pres: Vec<Preconditioner> = active
        .iter()
        .map(|&i| Preconditioner::for_operator(state.grid(), state.lambdas()[i]))
        .collect();

    while iterations < opts.max_iter {
        // Gradient of I per component, with the per-component scaling
        // direction removed: the projection fixes those directions, so only
        // the transverse part drives the descent.
        let mut grads: Vec<Vec<f64>> = Vec::with_capacity(active.len());
        for &i in active {
            let mut g = norm_sq_gradient(state.component(i), state.lambdas()[i]);
            for v in g.iter_mut() {
                *v *= 0.5;
            }
            let cf = coupling_gradient(state, i, active);
            axpy(&mut g, -1.0 / two_star, &cf);
            let u = state.component(i).values();
            let uu = dot(u, u);
            if uu > 0.0 {
                let gu = dot(&g, u);
                let factor = gu / uu;
                for (gv, uv) in g.iter_mut().zip(u) {
                    *gv -= factor * uv;
                }
            }
            freeze_ends(&mut g);
            grads.push(g);
        }
        let mut dirs: Vec<Vec<f64>> = grads
            .iter()
            .zip(&pres)
            .map(|(g, pre)| pre.solve(g))
            .collect();
        for d in &mut dirs {
            freeze_ends(d);
        }
        let g_dot_d: f64 = grads.iter().zip(&dirs).map(|(g, d)| dot(g, d)).sum();
        let mut u_pu = 0.0;
        for (slot, &i) in active.iter().enumerate() {
            let pu = pres[slot].apply(state.component(i).values());
            u_pu += dot(state.component(i).values(), &pu);
        }
        stationarity = (g_dot_d.max(0.0) * u_pu).sqrt() / value.abs().max(f64::MIN_POSITIVE);
        if stationarity < CONVERGED_GRADIENT_TOL {
            return Ok(DescentOutcome {
                iterations,
                stationarity,
                converged: true,
            });
        }

        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = state.clone();
            for (slot, &i) in active.iter().enumerate() {
                axpy(trial.component_mut(i).values_mut(), -step, &dirs[slot]);
            }
            let projected = project_regime(&trial, active)
                .ok()
                .map(|c| trial.rescaled(c.t));
            if let Some(projected) = projected {
                let tv = energy(&projected)?;
                if tv < value - 1e-4 * step * g_dot_d.max(0.0) {
                    let rel_drop = (value - tv) / value.abs().max(f64::MIN_POSITIVE);
                    *state = projected;
                    value = tv;
                    step = (step * 1.5).min(1e6);
                    accepted = true;
                    if rel_drop < opts.tol {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                    break;
                }
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted || stall >= 30 {
            break;
        }
    }

    Ok(DescentOutcome {
        iterations,
        stationarity,
        converged: stationarity < CONVERGED_GRADIENT_TOL,
    })
}

/// Least-energy level over the per-component constraint set (`N = 3, 4`) or
/// the two-block sub-manifold (`N ≥ 5`).
pub fn least_energy_level_m(
    state0: &TripleState,
    opts: &OptimizerOptions,
) -> Result<MinimizeResult, SolverError> {
    let mut state = state0.clone();
    let n = state.dimension();
    let active = [0usize, 1, 2];
    let outcome = minimize_constrained(&mut state, &active, opts)?;
    let constraint = regime_constraint_residual(&state, &active)?;
    let value = energy(&state)?;
    let classification = classify(&state);
    Ok(MinimizeResult {
        state,
        energy: value,
        level_kind: if n >= 5 {
            LevelKind::TwoBlockAtilde
        } else {
            LevelKind::LeastEnergyM
        },
        classification,
        residuals: ResidualSummary {
            gradient: outcome.stationarity,
            constraint,
        },
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

/// Two-component least-energy level `A_ij`.
///
/// For `N = 3, 4` this is projected descent on the pair constraint set; for
/// `N ≥ 5` the pair set is the single joint constraint, handled by the
/// quotient engine.
pub fn pair_level(
    lambdas: [f64; 2],
    beta12: f64,
    n_dim: u32,
    grid: &Arc<RadialGrid>,
    opts: &OptimizerOptions,
) -> Result<MinimizeResult, SolverError> {
    if grid.dimension() != n_dim {
        return Err(SolverError::Domain(format!(
            "grid dimension {} does not match N = {n_dim}",
            grid.dimension()
        )));
    }
    let beta = CouplingMatrix::from_off_diagonal(beta12, 0.0, 0.0);
    let mut best: Option<MinimizeResult> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = restart_rng(opts.seed, restart);
        let mut components: Vec<RadialProfile> = Vec::with_capacity(2);
        for &lambda in &lambdas {
            let mu = rng.gen_range(0.5..2.0);
            let params = BubbleParams::new(n_dim, lambda, mu)?;
            components.push(bubble_profile(&params, grid));
        }
        let state = TripleState::new(
            [
                components[0].clone(),
                components[1].clone(),
                RadialProfile::zeros(grid),
            ],
            [lambdas[0], lambdas[1], lambdas[0]],
            beta,
        )?;
        let result = if n_dim >= 5 {
            let mut work = state;
            let outcome = minimize_quotient(&mut work, &[0, 1], opts)?;
            let mut r = package_quotient_result(work, &[0, 1], outcome, LevelKind::PairAij)?;
            r.residuals.constraint = {
                let norms = r.state.norms_sq()?;
                let m = interaction_matrix(&r.state);
                let total = norms[0] + norms[1];
                let rhs = m.get(0, 0) + 2.0 * m.get(0, 1) + m.get(1, 1);
                (total - rhs).abs() / total.max(f64::MIN_POSITIVE)
            };
            r
        } else {
            let mut work = state;
            let outcome = match minimize_constrained(&mut work, &[0, 1], opts) {
                Ok(o) => o,
                Err(SolverError::ProjectionFailure(_)) => continue,
                Err(e) => return Err(e),
            };
            let constraint = regime_constraint_residual(&work, &[0, 1])?;
            let value = energy(&work)?;
            let classification = classify(&work);
            MinimizeResult {
                state: work,
                energy: value,
                level_kind: LevelKind::PairAij,
                classification,
                residuals: ResidualSummary {
                    gradient: outcome.stationarity,
                    constraint,
                },
                iterations: outcome.iterations,
                converged: outcome.converged,
            }
        };
        if best.as_ref().map_or(true, |b| result.energy < b.energy) {
            best = Some(result);
        }
    }
    best.ok_or(SolverError::NoConvergence {
        iterations: 0,
        residual: f64::NAN,
    })
}

// ---------------------------------------------------------------------------
// Restart drivers
// ---------------------------------------------------------------------------

fn restart_rng(seed: u64, restart: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    )
}

/// One row of a restart or scan table.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub mu: f64,
    pub t: [f64; 3],
    pub energy: f64,
    pub constraint_residual: f64,
    pub classification: String,
}

/// Renders rows as CSV with the fixed header, LF endings.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("mu,t1,t2,t3,energy,constraint_residual,classification\n");
    for row in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            row.mu,
            row.t[0],
            row.t[1],
            row.t[2],
            row.energy,
            row.constraint_residual,
            row.classification
        ));
    }
    out
}

/// Per-component scalar constraint factors of a state, for reporting: the
/// amplitude each live component would need to satisfy its own constraint
/// with the others frozen.  Dead components report zero.
fn component_scalar_factors(state: &TripleState) -> [f64; 3] {
    let two_star = critical_exponent(state.dimension());
    let norms = match state.norms_sq() {
        Ok(n) => n,
        Err(_) => return [f64::NAN; 3],
    };
    let rows = interaction_matrix(state).row_sums();
    let two_star_inv = 1.0 / critical_exponent(state.dimension());
    let norms_l: Vec<f64> = state.masses().iter().map(|m| m.powf(two_star_inv)).collect();
    let top = norms_l.iter().cloned().fold(0.0f64, f64::max);
    let mut out = [0.0; 3];
    for i in 0..3 {
        if norms_l[i] < CLASSIFICATION_NORM_FRACTION * top {
            continue;
        }
        if rows[i] > 0.0 {
            out[i] = (norms[i] / rows[i]).powf(1.0 / (two_star - 2.0));
        }
    }
    out
}

/// Shared experiment parameters for the restart drivers.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub n_dim: u32,
    pub lambdas: [f64; 3],
    pub beta: CouplingMatrix,
    pub grid: Arc<RadialGrid>,
}

fn random_bubble_state(
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(TripleState, f64), SolverError> {
    let mut components: Vec<RadialProfile> = Vec::with_capacity(3);
    let mut mu_product = 1.0;
    for i in 0..3 {
        let mu = rng.gen_range(0.5..2.0);
        mu_product *= mu;
        let params = BubbleParams::new(cfg.n_dim, cfg.lambdas[i], mu)?;
        components.push(bubble_profile(&params, &cfg.grid));
    }
    let state = TripleState::new(
        [
            components[0].clone(),
            components[1].clone(),
            components[2].clone(),
        ],
        cfg.lambdas,
        cfg.beta,
    )?;
    Ok((state, mu_product.powf(1.0 / 3.0)))
}

/// Ground-state level with restarts; returns the best run and one table row
/// per restart.
pub fn ground_state_search(
    cfg: &SearchConfig,
    opts: &OptimizerOptions,
) -> Result<(MinimizeResult, Vec<ResultRow>), SolverError> {
    let mut best: Option<MinimizeResult> = None;
    let mut rows = Vec::new();
    for restart in 0..opts.restarts.max(1) {
        let mut rng = restart_rng(opts.seed, restart);
        let (state0, mu_geo) = random_bubble_state(cfg, &mut rng)?;
        let result = ground_state_level(&state0, opts)?;
        rows.push(ResultRow {
            mu: mu_geo,
            t: component_scalar_factors(&result.state),
            energy: result.energy,
            constraint_residual: result.residuals.constraint,
            classification: result.classification.to_string(),
        });
        if best.as_ref().map_or(true, |b| result.energy < b.energy) {
            best = Some(result);
        }
    }
    Ok((best.expect("at least one restart"), rows))
}

/// Least-energy level with restarts; restarts whose projection fails are
/// recorded and skipped.
pub fn least_energy_search(
    cfg: &SearchConfig,
    opts: &OptimizerOptions,
) -> Result<(MinimizeResult, Vec<ResultRow>), SolverError> {
    let mut best: Option<MinimizeResult> = None;
    let mut rows = Vec::new();
    let mut last_failure: Option<SolverError> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = restart_rng(opts.seed, restart);
        let (state0, mu_geo) = random_bubble_state(cfg, &mut rng)?;
        match least_energy_level_m(&state0, opts) {
            Ok(result) => {
                rows.push(ResultRow {
                    mu: mu_geo,
                    t: component_scalar_factors(&result.state),
                    energy: result.energy,
                    constraint_residual: result.residuals.constraint,
                    classification: result.classification.to_string(),
                });
                if best.as_ref().map_or(true, |b| result.energy < b.energy) {
                    best = Some(result);
                }
            }
            Err(e @ SolverError::ProjectionFailure(_)) => {
                rows.push(ResultRow {
                    mu: mu_geo,
                    t: [f64::NAN; 3],
                    energy: f64::NAN,
                    constraint_residual: f64::NAN,
                    classification: "projection-failed".into(),
                });
                last_failure = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    match best {
        Some(b) => Ok((b, rows)),
        None => Err(last_failure.unwrap_or(SolverError::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        })),
    }
}

// ---------------------------------------------------------------------------
// Semi-triviality certificate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateComponent {
    /// Whether `I(u) ≤ I(t_k u_k, 0, 0)` holds for this slot, the
    /// energy-comparison premise a ground state satisfies for every slot.
    pub premise_ok: bool,
    /// Lower bound on `max β_ij` forced by the proof chain through this slot.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub n_dim: u32,
    pub per_component: [CertificateComponent; 3],
    /// Largest bound among premise-satisfying slots.
    pub forced_bound: Option<f64>,
    /// The universal floor of the chain: `√2/2` for N = 4, `1` for N = 3.
    pub floor: f64,
}

/// Evaluates the semi-triviality proof chain on a fully nontrivial state on
/// the full-derivative constraint set: the data-driven lower bound on
/// `max β_ij` that ground-state status would force.
pub fn semi_triviality_certificate(state: &TripleState) -> Result<CertificateReport, SolverError> {
    let n = state.dimension();
    if n != 3 && n != 4 {
        return Err(SolverError::Domain(format!(
            "certificate is defined for N = 3 and N = 4, got N = {n}"
        )));
    }
    let full_res = nehari_full_residual(state)?;
    if full_res > 1e-6 {
        return Err(SolverError::NotOnManifold { residual: full_res });
    }
    if classify(state) != Classification::FullyNontrivial {
        return Err(SolverError::Domain(
            "certificate needs a fully nontrivial state".into(),
        ));
    }

    let two_star = critical_exponent(n);
    let norms = state.norms_sq()?;
    let masses = state.masses();
    let pair = state.pairings();
    let total_energy = energy(state)?;
    let nf = n as f64;

    let mut per_component = [CertificateComponent {
        premise_ok: false,
        bound: 0.0,
    }; 3];
    for k in 0..3 {
        // Single-slot projection level: I(t_k u_k, 0, 0) = (1/N) t_k² ‖u_k‖².
        let t_sq = (norms[k] / masses[k]).powf(2.0 / (two_star - 2.0));
        let single_level = t_sq * norms[k] / nf;
        let premise_ok = total_energy <= single_level * (1.0 + 1e-9);
        let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
        let overlap: f64 = others.iter().map(|&j| pair[k][j]).sum();
        let y: f64 = others.iter().map(|&i| masses[i]).sum();
        let bound = if overlap <= 0.0 {
            f64::INFINITY
        } else if n == 4 {
            (masses[k] * y).sqrt() / overlap
        } else {
            (masses[k] * y * y + 2.0 * masses[k] * masses[k] * y).cbrt() / overlap
        };
        per_component[k] = CertificateComponent { premise_ok, bound };
    }
    let forced_bound = per_component
        .iter()
        .filter(|c| c.premise_ok)
        .map(|c| c.bound)
        .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.max(b))));
    Ok(CertificateReport {
        n_dim: n,
        per_component,
        forced_bound,
        floor: if n == 4 { 0.5f64.sqrt() } else { 1.0 },
    })
}

// ---------------------------------------------------------------------------
// Mixed-case escaping-bubble scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MixedScanConfig {
    pub n_dim: u32,
    pub lambdas: [f64; 3],
    pub beta12: f64,
    pub beta13: f64,
    pub beta23: f64,
    pub mu_schedule: Vec<f64>,
    /// Inner radius of the shared grid; the outer radius `r_max_base` is
    /// additionally scaled by the largest μ in the schedule.
    pub r_min: f64,
    pub r_max_base: f64,
    pub grid_points: usize,
    /// Accept λ_1 ≠ λ_2 for N = 3, 4 and label the run exploratory.
    pub allow_unequal_pair_lambdas: bool,
}

#[derive(Debug, Clone)]
pub struct ScanTable {
    pub rows: Vec<ResultRow>,
    /// Pair level estimate `A_12` from the scan's own pair minimizer.
    pub pair_energy: f64,
    /// Scalar level `A_3` of the escaping component.
    pub a3: f64,
    /// Cross overlaps `Σ_{i=1,2} ∫ |e_i|^{2*/2} |z_μ|^{2*/2}` per μ.
    pub overlaps: Vec<f64>,
    /// Scaling cap `t̂` for the N = 3 regime.
    pub t_hat: Option<f64>,
    pub exploratory: bool,
}

/// Builds the escaping-bubble family over the μ schedule, projects each trial
/// onto the regime manifold, and records the projected energies.
pub fn mixed_case_scan(
    cfg: &MixedScanConfig,
    opts: &OptimizerOptions,
) -> Result<ScanTable, SolverError> {
    if !(cfg.beta12 > 0.0 && cfg.beta13 < 0.0 && cfg.beta23 < 0.0) {
        return Err(SolverError::Domain(
            "mixed case needs beta_12 > 0, beta_13 < 0, beta_23 < 0".into(),
        ));
    }
    if cfg.mu_schedule.is_empty() {
        return Err(SolverError::Domain("empty mu schedule".into()));
    }
    let exploratory = cfg.lambdas[0] != cfg.lambdas[1];
    if exploratory && !cfg.allow_unequal_pair_lambdas && cfg.n_dim < 5 {
        return Err(SolverError::Domain(
            "lambda_1 must equal lambda_2 for N = 3, 4 (set allow_unequal_pair_lambdas to explore)"
                .into(),
        ));
    }
    // Regime cap on the pair coupling in the chain dimensions.
    if cfg.n_dim == 3 || cfg.n_dim == 4 {
        let s_cal = crate::closed_forms::sobolev_constant(cfg.n_dim)?;
        let report = chain_for(cfg.n_dim, cfg.lambdas, s_cal)?;
        if cfg.beta12 >= report.final_value {
            return Err(SolverError::Domain(format!(
                "beta_12 = {} is not below the regime threshold {} = {:.3e}",
                cfg.beta12, report.final_name, report.final_value
            )));
        }
    }

    let mu_max = cfg.mu_schedule.iter().cloned().fold(1.0f64, f64::max);
    let grid = RadialGrid::log_spaced(
        cfg.n_dim,
        cfg.r_min,
        cfg.r_max_base * mu_max,
        cfg.grid_points,
    )?;

    // Pair minimizer of the (1,2) block, computed once.
    let pair = pair_level(
        [cfg.lambdas[0], cfg.lambdas[1]],
        cfg.beta12,
        cfg.n_dim,
        &grid,
        opts,
    )?;
    let e1 = pair.state.component(0).clone();
    let e2 = pair.state.component(1).clone();
    let pair_energy = pair.energy;
    let pair_norm_sum = {
        let n = pair.state.norms_sq()?;
        n[0] + n[1]
    };

    // t̂ cap for the N = 3 regime.
    let t_hat = if cfg.n_dim == 3 {
        let s_cal = crate::closed_forms::sobolev_constant(3)?;
        crate::thresholds::n3_chain(cfg.lambdas, s_cal, Some(pair_norm_sum))?.t_hat
    } else {
        None
    };

    let beta = CouplingMatrix::from_off_diagonal(cfg.beta12, cfg.beta13, cfg.beta23);
    let p = critical_exponent(cfg.n_dim) / 2.0;
    let mut rows = Vec::with_capacity(cfg.mu_schedule.len());
    let mut overlaps = Vec::with_capacity(cfg.mu_schedule.len());
    let mut a3 = 0.0;

    for &mu in &cfg.mu_schedule {
        let params = BubbleParams::new(cfg.n_dim, cfg.lambdas[2], mu)?;
        let z3 = bubble_profile(&params, &grid);
        let state = TripleState::new([e1.clone(), e2.clone(), z3], cfg.lambdas, beta)?;
        if a3 == 0.0 {
            a3 = state.norms_sq()?[2] / cfg.n_dim as f64;
        }
        let overlap = crate::grid::lp_power_integral(state.component(0), state.component(2), p)?
            + crate::grid::lp_power_integral(state.component(1), state.component(2), p)?;
        overlaps.push(overlap);

        let projection = match cfg.n_dim {
            4 => project_regime(&state, &[0, 1, 2]),
            3 => {
                // Dominance regime of the escaping bubble; the cap t̂ bounds
                // the maximizer.
                let norms = match state.norms_sq() {
                    Ok(n) => n,
                    Err(e) => return Err(e.into()),
                };
                let b = interaction_matrix(&state);
                cubic_coefficients(&norms, b.entries(), &[0, 1, 2]).map(|(t, iterations)| {
                    NehariCoefficients {
                        t,
                        regime: Regime::CubicN3,
                        converged: true,
                        iterations,
                    }
                })
            }
            _ => project_two_block(&state, p),
        };
        match projection {
            Ok(coeff) => {
                let projected = state.rescaled(coeff.t);
                let value = energy(&projected)?;
                let residual = regime_constraint_residual(&projected, &[0, 1, 2])?;
                let mut classification = classify(&projected).to_string();
                if let Some(cap) = t_hat {
                    if coeff.t.iter().any(|&t| t > cap) {
                        classification = format!("{classification};above-t-hat");
                    }
                }
                rows.push(ResultRow {
                    mu,
                    t: coeff.t,
                    energy: value,
                    constraint_residual: residual,
                    classification,
                });
            }
            Err(err) => {
                rows.push(ResultRow {
                    mu,
                    t: [f64::NAN; 3],
                    energy: f64::NAN,
                    constraint_residual: f64::NAN,
                    classification: format!("projection-failed:{}", failure_tag(&err)),
                });
            }
        }
    }

    Ok(ScanTable {
        rows,
        pair_energy,
        a3,
        overlaps,
        t_hat,
        exploratory,
    })
}

fn failure_tag(err: &NehariError) -> &'static str {
    match err {
        NehariError::NotDominant { .. } => "not-dominant",
        NehariError::NonpositiveCoefficient { .. } => "nonpositive-coefficient",
        NehariError::NotPD { .. } => "not-positive-definite",
        NehariError::NoConvergence { .. } => "no-convergence",
        NehariError::NoRoot { .. } => "no-root",
        NehariError::ZeroProfile => "zero-profile",
        NehariError::Domain(_) => "domain",
        NehariError::Functional(_) => "functional",
        NehariError::Grid(_) => "grid",
    }
}
