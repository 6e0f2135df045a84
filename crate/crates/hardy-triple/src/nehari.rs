//! Projection of trial states onto the Nehari constraint sets.
//!
//! Three regimes, dictated by the dimension through the coupling exponent
//! `2*/2`:
//!
//! * `N = 4`: the constraints are linear in the squared amplitudes and solved
//!   by Cramer's rule, guarded by strict diagonal dominance;
//! * `N = 3`: the constraints are cubic; the substitution `s_i = t_i^3` turns
//!   the scaling energy into a strictly concave function whenever the
//!   interaction matrix is positive definite, and a damped Newton iteration
//!   finds its unique positive critical point;
//! * `N ≥ 5`: the per-component set is not closed, so projection targets the
//!   two-block sub-manifold that constrains the `(u_1,u_2)` block and `u_3`
//!   separately; a one-dimensional root bracket in the block scaling `t`
//!   reduces the system to bisection.

use thiserror::Error;

use crate::functional::{interaction_matrix, FunctionalError, TripleState};
use crate::grid::{critical_exponent, critical_mass, weighted_norm_sq, GridError, RadialProfile};
use crate::mat3;

const NEWTON_MAX_ITER: u32 = 200;
const NEWTON_REL_TOL: f64 = 1e-12;
const BISECTION_T_MAX: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NehariError {
    #[error("cannot project the zero profile")]
    ZeroProfile,
    #[error("interaction matrix is not strictly diagonally dominant (margin {margin:e})")]
    NotDominant { margin: f64 },
    #[error("projection produced a nonpositive coefficient s_{index} = {value:e}")]
    NonpositiveCoefficient { index: usize, value: f64 },
    #[error("interaction matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPD { min_eigenvalue: f64 },
    #[error("projection did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: u32, residual: f64 },
    #[error("block root function has no sign change below t = {t_max:e}")]
    NoRoot { t_max: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Which constraint set a projection targeted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    LinearN4,
    CubicN3,
    GeneralP,
    TwoBlock,
}

/// Amplitude multipliers returned by a projection; `t[i] u_i` satisfies the
/// targeted constraints when `converged` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NehariCoefficients {
    pub t: [f64; 3],
    pub regime: Regime,
    pub converged: bool,
    pub iterations: u32,
}

impl NehariCoefficients {
    pub fn max_deviation_from_one(&self) -> f64 {
        self.t
            .iter()
            .map(|&t| (t - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Scalar Nehari scaling: `t^{2*-2} = ‖u‖_λ² / |u|_{2*}^{2*}`.
pub fn project_single(u: &RadialProfile, lambda: f64) -> Result<f64, NehariError> {
    let mass = critical_mass(u);
    if mass <= 0.0 {
        return Err(NehariError::ZeroProfile);
    }
    let norm = weighted_norm_sq(u, lambda)?;
    let two_star = critical_exponent(u.grid().dimension());
    Ok((norm / mass).powf(1.0 / (two_star - 2.0)))
}

fn live_or_err(state: &TripleState, want: &[usize]) -> Result<(), NehariError> {
    let live = state.live_components();
    for i in want {
        if !live.contains(i) {
            return Err(NehariError::ZeroProfile);
        }
    }
    Ok(())
}

/// Linear projection for `N = 4`: solves `M_B[u] s = (‖u_i‖_i²)` by Cramer's
/// rule and scales by `√s_i`.
pub fn project_linear_n4(state: &TripleState) -> Result<NehariCoefficients, NehariError> {
    if state.dimension() != 4 {
        return Err(NehariError::Domain(format!(
            "linear projection needs N = 4, got N = {}",
            state.dimension()
        )));
    }
    live_or_err(state, &[0, 1, 2])?;
    let m = interaction_matrix(state);
    let margins = mat3::dominance_margins(m.entries(), &[0, 1, 2]);
    let margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    if margin <= 0.0 {
        return Err(NehariError::NotDominant { margin });
    }
    let norms = state.norms_sq()?;
    let s = mat3::solve3(m.entries(), &norms).ok_or(NehariError::NotDominant { margin })?;
    for (index, &value) in s.iter().enumerate() {
        if value <= 0.0 {
            return Err(NehariError::NonpositiveCoefficient { index, value });
        }
    }
    Ok(NehariCoefficients {
        t: [s[0].sqrt(), s[1].sqrt(), s[2].sqrt()],
        regime: Regime::LinearN4,
        converged: true,
        iterations: 1,
    })
}

/// Damped Newton on the concave substituted problem for the cubic (`N = 3`)
/// stationarity system, over the active component set.  Interior helper
/// shared by the public `N = 3` projection (which additionally enforces the
/// cooperative sign regime) and the mixed-case scan (which works in the
/// diagonally dominant regime of the escaping bubble).
pub(crate) fn cubic_coefficients(
    norms: &[f64; 3],
    b: &[[f64; 3]; 3],
    active: &[usize],
) -> Result<([f64; 3], u32), NehariError> {
    let eigs = mat3::sym_eigenvalues_masked(b, active);
    let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig <= 0.0 {
        return Err(NehariError::NotPD {
            min_eigenvalue: min_eig,
        });
    }

    // Decoupled start: s_i = (n_i / B_ii)^{3/4}.
    let mut s = [0.0f64; 3];
    for &i in active {
        if norms[i] <= 0.0 || b[i][i] <= 0.0 {
            return Err(NehariError::ZeroProfile);
        }
        s[i] = (norms[i] / b[i][i]).powf(0.75);
    }

    let grad = |s: &[f64; 3]| {
        let mut f = [0.0f64; 3];
        for &i in active {
            let bs: f64 = active.iter().map(|&j| b[i][j] * s[j]).sum();
            f[i] = s[i].powf(-1.0 / 3.0) * norms[i] - bs;
        }
        f
    };
    let residual = |s: &[f64; 3]| {
        // Relative stationarity residual in the t variables.
        let mut worst = 0.0f64;
        for &i in active {
            let lhs = s[i].powf(2.0 / 3.0) * norms[i];
            let rhs: f64 = active.iter().map(|&j| s[i] * b[i][j] * s[j]).sum();
            worst = worst.max((lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE));
        }
        worst
    };

    let mut f = grad(&s);
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITER {
        if residual(&s) < NEWTON_REL_TOL {
            let mut t = [0.0f64; 3];
            for &i in active {
                t[i] = s[i].powf(1.0 / 3.0);
            }
            return Ok((t, iterations));
        }
        let mut jac = [[0.0f64; 3]; 3];
        for &i in active {
            for &j in active {
                jac[i][j] = -b[i][j];
            }
            jac[i][i] -= norms[i] * s[i].powf(-4.0 / 3.0) / 3.0;
        }
        let mut rhs = [0.0f64; 3];
        for &i in active {
            rhs[i] = -f[i];
        }
        let delta = mat3::solve_masked(&jac, &rhs, active).ok_or(NehariError::NotPD {
            min_eigenvalue: min_eig,
        })?;

        // Backtrack by halves until the iterate stays positive and the
        // gradient norm decreases.
        let f_norm: f64 = active.iter().map(|&i| f[i] * f[i]).sum();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = s;
            let mut positive = true;
            for &i in active {
                trial[i] = s[i] + alpha * delta[i];
                if trial[i] <= 0.0 {
                    positive = false;
                    break;
                }
            }
            if positive {
                let ft = grad(&trial);
                let ft_norm: f64 = active.iter().map(|&i| ft[i] * ft[i]).sum();
                if ft_norm <= f_norm * (1.0 - 1e-4 * alpha) || ft_norm < NEWTON_REL_TOL {
                    s = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    let res = residual(&s);
    if res < NEWTON_REL_TOL {
        let mut t = [0.0f64; 3];
        for &i in active {
            t[i] = s[i].powf(1.0 / 3.0);
        }
        return Ok((t, iterations));
    }
    Err(NehariError::NoConvergence {
        iterations,
        residual: res,
    })
}

/// Cubic projection for `N = 3` in the cooperative regime: nonnegative
/// couplings and a positive definite interaction matrix.
pub fn project_cubic_n3(state: &TripleState) -> Result<NehariCoefficients, NehariError> {
    if state.dimension() != 3 {
        return Err(NehariError::Domain(format!(
            "cubic projection needs N = 3, got N = {}",
            state.dimension()
        )));
    }
    live_or_err(state, &[0, 1, 2])?;
    if state.beta().min_off_diagonal() < 0.0 {
        return Err(NehariError::Domain(
            "cubic projection requires nonnegative couplings".into(),
        ));
    }
    let norms = state.norms_sq()?;
    let b = interaction_matrix(state);
    let (t, iterations) = cubic_coefficients(&norms, b.entries(), &[0, 1, 2])?;
    Ok(NehariCoefficients {
        t,
        regime: Regime::CubicN3,
        converged: true,
        iterations,
    })
}

/// Two-block projection for `N ≥ 5`: finds `t` for the `(u_1, u_2)` block and
/// `s` for `u_3` so that the scaled state lies on the block manifold.
pub fn project_two_block(state: &TripleState, p: f64) -> Result<NehariCoefficients, NehariError> {
    let n = state.dimension();
    if n < 5 {
        return Err(NehariError::Domain(format!(
            "two-block projection needs N >= 5, got N = {n}"
        )));
    }
    let p_expect = n as f64 / (n as f64 - 2.0);
    if !(p > 1.0 && p < 2.0) || (p - p_expect).abs() > 1e-12 * p_expect {
        return Err(NehariError::Domain(format!(
            "exponent p = {p} does not match N/(N-2) = {p_expect}"
        )));
    }
    let beta = state.beta();
    if !(beta.get(0, 1) > 0.0 && beta.get(0, 2) < 0.0 && beta.get(1, 2) < 0.0) {
        return Err(NehariError::Domain(
            "two-block regime needs beta_12 > 0, beta_13 < 0, beta_23 < 0".into(),
        ));
    }
    let live = state.live_components();
    if !live.contains(&2) || !(live.contains(&0) || live.contains(&1)) {
        return Err(NehariError::ZeroProfile);
    }

    let norms = state.norms_sq()?;
    let m = interaction_matrix(state);
    let block_p = norms[0] + norms[1];
    let block_q = m.get(0, 0) + m.get(0, 1) + m.get(1, 0) + m.get(1, 1);
    let single_p = norms[2];
    let single_q = m.get(2, 2);
    let cross = -(m.get(0, 2) + m.get(1, 2));
    if block_q <= 0.0 || single_q <= 0.0 {
        return Err(NehariError::ZeroProfile);
    }

    let exp_decouple = 1.0 / (2.0 * p - 2.0);
    if cross <= 1e-14 * block_q.max(single_q) {
        // Disjoint blocks: independent scalar scalings.
        let t = (block_p / block_q).powf(exp_decouple);
        let s = (single_p / single_q).powf(exp_decouple);
        return Ok(NehariCoefficients {
            t: [t, t, s],
            regime: Regime::TwoBlock,
            converged: true,
            iterations: 0,
        });
    }

    // Eliminate s through the block equation:
    //   s^p = (Q t^p − P t^{2−p}) / R =: φ(t),  positive for t above the
    //   decoupled block scaling t* = (P/Q)^{1/(2p−2)}.
    // The remaining single-component equation becomes g(t) = 0 with
    //   g(t) = P₃ Y^{(2−p)/p} + t^{2p−2} (R² − Q₃ Q + Q₃ P t^{2−2p}) / R,
    //   Y(t) = (Q − P t^{2−2p}) / R,
    // which tends to R > 0 as t decreases to t* and to −∞ when R² < Q₃ Q.
    let t_star = (block_p / block_q).powf(exp_decouple);
    let g = |t: f64| {
        let y = (block_q - block_p * t.powf(2.0 - 2.0 * p)) / cross;
        single_p * y.powf((2.0 - p) / p)
            + t.powf(2.0 * p - 2.0)
                * (cross * cross - single_q * block_q
                    + single_q * block_p * t.powf(2.0 - 2.0 * p))
                / cross
    };

    let t_lo = t_star * (1.0 + 1e-9);
    let mut t_hi = (2.0 * t_star).max(2.0);
    let g_lo = g(t_lo);
    if !g_lo.is_finite() {
        return Err(NehariError::Domain("block root function is not finite".into()));
    }
    let mut iterations = 0u32;
    while g(t_hi) > 0.0 {
        t_hi *= 2.0;
        iterations += 1;
        if t_hi > BISECTION_T_MAX {
            return Err(NehariError::NoRoot { t_max: BISECTION_T_MAX });
        }
    }
    let (mut lo, mut hi) = (t_lo, t_hi);
    if g_lo <= 0.0 {
        // Root pinched against the lower bracket; fall back to the bracket
        // endpoint (the scaled state will not pass the residual gate).
        hi = t_lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if (hi - lo) <= 1e-14 * hi {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let s = ((block_q * t.powf(p) - block_p * t.powf(2.0 - p)) / cross).powf(1.0 / p);
    if !(s > 0.0) || !s.is_finite() {
        return Err(NehariError::NonpositiveCoefficient { index: 2, value: s });
    }

    // Residuals of both block constraints for the scaled state.
    let res_block = (t * t * block_p - t.powf(2.0 * p) * block_q + t.powf(p) * s.powf(p) * cross)
        .abs()
        / (t * t * block_p).max(f64::MIN_POSITIVE);
    let res_single = (s * s * single_p - s.powf(2.0 * p) * single_q
        + t.powf(p) * s.powf(p) * cross)
        .abs()
        / (s * s * single_p).max(f64::MIN_POSITIVE);
    let converged = res_block < 1e-8 && res_single < 1e-8;
    Ok(NehariCoefficients {
        t: [t, t, s],
        regime: Regime::TwoBlock,
        converged,
        iterations,
    })
}

/// Maximum of `I(c_1 u_1, c_2 u_2, c_3 u_3)` over nonnegative amplitudes,
/// zero components held at zero.  Newton ascent from the all-ones start with
/// a coarse-scan fallback.
pub fn max_over_segment(state: &TripleState) -> Result<f64, NehariError> {
    Ok(max_over_segment_with_coefficients(state)?.0)
}

pub(crate) fn max_over_segment_with_coefficients(
    state: &TripleState,
) -> Result<(f64, [f64; 3]), NehariError> {
    let live = state.live_components();
    if live.is_empty() {
        return Err(NehariError::ZeroProfile);
    }
    let norms = state.norms_sq()?;
    let b = *interaction_matrix(state).entries();
    let two_star = critical_exponent(state.dimension());
    let p = two_star / 2.0;

    let value = |c: &[f64; 3]| {
        let mut quad = 0.0;
        let mut coupling = 0.0;
        for &i in &live {
            quad += c[i] * c[i] * norms[i];
            for &j in &live {
                coupling += c[i].powf(p) * c[j].powf(p) * b[i][j];
            }
        }
        0.5 * quad - coupling / two_star
    };
    let gradient = |c: &[f64; 3]| {
        let mut g = [0.0f64; 3];
        for &i in &live {
            let bs: f64 = live.iter().map(|&j| b[i][j] * c[j].powf(p)).sum();
            g[i] = c[i] * norms[i] - c[i].powf(p - 1.0) * bs;
        }
        g
    };

    let polish = |start: [f64; 3]| -> Option<([f64; 3], f64)> {
        let mut c = start;
        for _ in 0..500 {
            let g = gradient(&c);
            let gn: f64 = live.iter().map(|&i| g[i] * g[i]).sum();
            let scale: f64 = live
                .iter()
                .map(|&i| (c[i] * norms[i]).powi(2))
                .sum::<f64>()
                .max(f64::MIN_POSITIVE);
            if gn < 1e-24 * scale {
                return Some((c, value(&c)));
            }
            // Ascent with backtracking on the value.
            let v0 = value(&c);
            let mut step = 1.0 / norms.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
            let mut moved = false;
            for _ in 0..60 {
                let mut trial = c;
                let mut ok = true;
                for &i in &live {
                    trial[i] = c[i] + step * g[i];
                    if trial[i] <= 0.0 {
                        ok = false;
                        break;
                    }
                }
                if ok && value(&trial) > v0 {
                    c = trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                return Some((c, value(&c)));
            }
        }
        Some((c, value(&c)))
    };

    let mut ones = [0.0f64; 3];
    for &i in &live {
        ones[i] = 1.0;
    }
    let mut best = polish(ones).ok_or(NehariError::NoConvergence {
        iterations: 500,
        residual: f64::NAN,
    })?;

    // Coarse scan guard: if a distinctly better segment point exists, polish
    // from there instead (outside the concave regimes the all-ones basin may
    // not be global).
    let steps = 16usize;
    let mut scan_best = (ones, f64::NEG_INFINITY);
    let mut idx = vec![0usize; live.len()];
    loop {
        let mut c = [0.0f64; 3];
        for (slot, &i) in live.iter().enumerate() {
            c[i] = 0.15 + 2.0 * idx[slot] as f64 / steps as f64;
        }
        let v = value(&c);
        if v > scan_best.1 {
            scan_best = (c, v);
        }
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] <= steps {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == live.len() {
                break;
            }
        }
        if carry == live.len() {
            break;
        }
    }
    if scan_best.1 > best.1 * (1.0 + 1e-9) + 1e-12 {
        if let Some(polished) = polish(scan_best.0) {
            if polished.1 > best.1 {
                best = polished;
            }
        }
    }
    Ok((best.1, best.0))
}
