//! The system energy, the interaction matrix of coupled critical pairings,
//! positivity checks for the coupling quadratic form, and Nehari-set
//! membership diagnostics.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{
    critical_exponent, hardy_threshold, lp_power_integral, weighted_norm_sq, GridError,
    RadialGrid, RadialProfile,
};
use crate::mat3;

/// Relative Nehari membership tolerance: a constraint counts as satisfied
/// when its residual is below this fraction of `‖u_i‖_i²`.
pub const NEHARI_REL_TOL: f64 = 1e-8;

/// A component counts as nonzero when its critical mass exceeds this fraction
/// of the largest component's.
pub const NONZERO_MASS_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("lambda_{index} = {lambda} outside (0, {limit})")]
    BadLambda { index: usize, lambda: f64, limit: f64 },
    #[error("component {index} lives on a different grid")]
    GridMismatch { index: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Symmetric coupling matrix with unit diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    values: [[f64; 3]; 3],
}

impl CouplingMatrix {
    pub fn from_off_diagonal(beta12: f64, beta13: f64, beta23: f64) -> Self {
        CouplingMatrix {
            values: [
                [1.0, beta12, beta13],
                [beta12, 1.0, beta23],
                [beta13, beta23, 1.0],
            ],
        }
    }

    pub fn identity() -> Self {
        Self::from_off_diagonal(0.0, 0.0, 0.0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn as_array(&self) -> &[[f64; 3]; 3] {
        &self.values
    }

    pub fn off_diagonal(&self) -> [f64; 3] {
        [self.values[0][1], self.values[0][2], self.values[1][2]]
    }

    pub fn min_off_diagonal(&self) -> f64 {
        self.off_diagonal().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        self.off_diagonal()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Candidate solution: three radial profiles on one shared grid plus the
/// parameter bundle.
#[derive(Debug, Clone)]
pub struct TripleState {
    components: [RadialProfile; 3],
    lambdas: [f64; 3],
    beta: CouplingMatrix,
}

impl TripleState {
    pub fn new(
        components: [RadialProfile; 3],
        lambdas: [f64; 3],
        beta: CouplingMatrix,
    ) -> Result<Self, FunctionalError> {
        let grid = components[0].grid();
        let limit = hardy_threshold(grid.dimension());
        for (index, c) in components.iter().enumerate().skip(1) {
            if !c.grid().same_grid(grid) {
                return Err(FunctionalError::GridMismatch { index });
            }
        }
        for (index, &lambda) in lambdas.iter().enumerate() {
            if !(lambda > 0.0 && lambda < limit) {
                return Err(FunctionalError::BadLambda { index, lambda, limit });
            }
        }
        Ok(TripleState {
            components,
            lambdas,
            beta,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.components[0].grid()
    }

    pub fn dimension(&self) -> u32 {
        self.grid().dimension()
    }

    pub fn components(&self) -> &[RadialProfile; 3] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &RadialProfile {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut RadialProfile {
        &mut self.components[i]
    }

    pub fn lambdas(&self) -> [f64; 3] {
        self.lambdas
    }

    pub fn beta(&self) -> &CouplingMatrix {
        &self.beta
    }

    /// Rescales each component by the given amplitude factor.
    pub fn rescaled(&self, factors: [f64; 3]) -> TripleState {
        let mut out = self.clone();
        for i in 0..3 {
            out.components[i].scale(factors[i]);
        }
        out
    }

    /// Weighted norms `‖u_i‖_i²`.
    pub fn norms_sq(&self) -> Result<[f64; 3], FunctionalError> {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = weighted_norm_sq(&self.components[i], self.lambdas[i])?;
        }
        Ok(out)
    }

    /// Unsigned critical pairings `P_ij = ∫ |u_i|^{2*/2} |u_j|^{2*/2}`.
    pub fn pairings(&self) -> [[f64; 3]; 3] {
        let p = critical_exponent(self.dimension()) / 2.0;
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = lp_power_integral(&self.components[i], &self.components[j], p)
                    .expect("components share a grid");
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }

    /// Critical masses `|u_i|_{2*}^{2*}`.
    pub fn masses(&self) -> [f64; 3] {
        let p = critical_exponent(self.dimension()) / 2.0;
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = lp_power_integral(&self.components[i], &self.components[i], p)
                .expect("same grid");
        }
        out
    }

    /// Indices of the components that carry critical mass.
    pub fn live_components(&self) -> Vec<usize> {
        let m = self.masses();
        let top = m.iter().cloned().fold(0.0f64, f64::max);
        (0..3)
            .filter(|&i| m[i] > NONZERO_MASS_FRACTION * top && m[i] > 0.0)
            .collect()
    }
}

/// The matrix `M_B[u]_{hk} = ∫ β_hk |u_h|^{2*/2} |u_k|^{2*/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionMatrix {
    m: [[f64; 3]; 3],
}

impl InteractionMatrix {
    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn row_sums(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.m[i].iter().sum();
        }
        out
    }
}

pub fn interaction_matrix(state: &TripleState) -> InteractionMatrix {
    let pair = state.pairings();
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = state.beta().get(i, j) * pair[i][j];
        }
    }
    InteractionMatrix { m }
}

/// The system energy
/// `I(u) = (1/2) Σ ‖u_i‖_i² − (1/2*) Σ_{i,j} β_ij ∫ |u_i|^{2*/2} |u_j|^{2*/2}`.
pub fn energy(state: &TripleState) -> Result<f64, FunctionalError> {
    let norms = state.norms_sq()?;
    let inter = interaction_matrix(state);
    let two_star = critical_exponent(state.dimension());
    let coupling: f64 = inter.entries().iter().flatten().sum();
    Ok(0.5 * norms.iter().sum::<f64>() - coupling / two_star)
}

/// Signed per-component Nehari residuals `‖u_i‖_i² − Σ_j M_B[u]_ij`.
pub fn nehari_residuals(state: &TripleState) -> Result<[f64; 3], FunctionalError> {
    let norms = state.norms_sq()?;
    let rows = interaction_matrix(state).row_sums();
    Ok([norms[0] - rows[0], norms[1] - rows[1], norms[2] - rows[2]])
}

/// Relative residual of the full-derivative constraint defining the set N:
/// `|Σ‖u_i‖² − ΣM_ij| / Σ‖u_i‖²`.
pub fn nehari_full_residual(state: &TripleState) -> Result<f64, FunctionalError> {
    let norms = state.norms_sq()?;
    let total: f64 = norms.iter().sum();
    let coupling: f64 = interaction_matrix(state).entries().iter().flatten().sum();
    Ok((total - coupling).abs() / total.max(f64::MIN_POSITIVE))
}

/// Membership summary for the per-component set M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub residuals: [f64; 3],
    pub relative: [f64; 3],
    pub nonzero: [bool; 3],
    pub on_manifold: bool,
}

pub fn membership(state: &TripleState) -> Result<Membership, FunctionalError> {
    let residuals = nehari_residuals(state)?;
    let norms = state.norms_sq()?;
    let masses = state.masses();
    let top = masses.iter().cloned().fold(0.0f64, f64::max);
    let mut relative = [0.0; 3];
    let mut nonzero = [false; 3];
    for i in 0..3 {
        relative[i] = residuals[i].abs() / norms[i].max(f64::MIN_POSITIVE);
        nonzero[i] = masses[i] > NONZERO_MASS_FRACTION * top && masses[i] > 0.0;
    }
    let on_manifold = (0..3).all(|i| nonzero[i] && relative[i] < NEHARI_REL_TOL);
    Ok(Membership {
        residuals,
        relative,
        nonzero,
        on_manifold,
    })
}

/// Grid-weighted `L²` norm of the strong-form residual of each equation,
/// assembled with the same log-grid stencils as the quadrature.
pub fn gradient_residual(state: &TripleState) -> Result<[f64; 3], FunctionalError> {
    let grid = state.grid();
    let p = critical_exponent(state.dimension()) / 2.0;
    let nodes = grid.nodes();
    let mut out = [0.0; 3];
    let laps: Vec<Vec<f64>> = state
        .components()
        .iter()
        .map(|c| c.radial_laplacian())
        .collect();
    for i in 0..3 {
        let u = state.component(i).values();
        let mut acc = 0.0;
        for (k, (&r, w)) in nodes.iter().zip(grid.weights()).enumerate() {
            let ui = u[k];
            let mut coupling = ui.abs().powf(2.0 * p - 2.0) * ui;
            for j in 0..3 {
                if j != i {
                    let uj = state.component(j).values()[k];
                    if uj != 0.0 && ui != 0.0 {
                        coupling += state.beta().get(i, j)
                            * uj.abs().powf(p)
                            * ui.abs().powf(p - 2.0)
                            * ui;
                    }
                }
            }
            let res = -laps[i][k] - state.lambdas()[i] * ui / (r * r) - coupling;
            acc += w * res * res;
        }
        out[i] = (grid.sphere_area() * acc).sqrt();
    }
    Ok(out)
}

/// Verdict of the positivity check for the coupling quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionVerdict {
    /// The sufficient condition holds: nonnegative couplings or a positive
    /// semidefinite coupling matrix.
    ProvedSufficient { reason: &'static str },
    /// A profile triple with nonpositive quadratic form was found.
    Counterexample { value: f64, trial: usize },
    /// Neither proved nor falsified within the trial budget.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub verdict: ConditionVerdict,
    pub trials: usize,
    pub min_value: f64,
}

/// Checks the standing positivity condition on the coupling form: first the
/// paper-level sufficient conditions, then a randomized falsification search
/// over nonzero profile triples.
pub fn condition_1_13_check(beta: &CouplingMatrix, trials: usize, seed: u64) -> ConditionReport {
    let eigs = mat3::sym_eigenvalues3(beta.as_array());
    if beta.min_off_diagonal() >= 0.0 {
        return ConditionReport {
            verdict: ConditionVerdict::ProvedSufficient {
                reason: "all off-diagonal couplings are nonnegative",
            },
            trials: 0,
            min_value: f64::INFINITY,
        };
    }
    if eigs[0] >= -1e-14 {
        return ConditionReport {
            verdict: ConditionVerdict::ProvedSufficient {
                reason: "coupling matrix is positive semidefinite",
            },
            trials: 0,
            min_value: f64::INFINITY,
        };
    }

    let grid = RadialGrid::log_spaced(4, 1e-3, 1e3, 256).expect("static grid parameters");
    let p = critical_exponent(4) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_value = f64::INFINITY;
    let bump = |m: f64, s: f64| move |r: f64| (-(r.ln() - m).powi(2) / (2.0 * s * s)).exp();

    for trial in 0..trials.max(1) {
        let profiles: [RadialProfile; 3] = if trial == 0 {
            // Deterministic first trial: three equal profiles, the classic
            // witness for strongly competitive couplings.
            let f = bump(0.0, 1.0);
            [
                RadialProfile::from_fn(&grid, f),
                RadialProfile::from_fn(&grid, f),
                RadialProfile::from_fn(&grid, f),
            ]
        } else {
            let mut make = || {
                let m = rng.gen_range(-2.0..2.0);
                let s = rng.gen_range(0.4..1.6);
                RadialProfile::from_fn(&grid, bump(m, s))
            };
            [make(), make(), make()]
        };
        let mut value = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                value += beta.get(i, j)
                    * lp_power_integral(&profiles[i], &profiles[j], p).expect("same grid");
            }
        }
        min_value = min_value.min(value);
        if value <= 0.0 {
            return ConditionReport {
                verdict: ConditionVerdict::Counterexample { value, trial },
                trials: trial + 1,
                min_value,
            };
        }
    }
    ConditionReport {
        verdict: ConditionVerdict::Unknown,
        trials: trials.max(1),
        min_value,
    }
}

/// Gershgorin verdict for an interaction matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GershgorinVerdict {
    pub dominant: bool,
    /// `min_i (m_ii − Σ_{j≠i} |m_ij|)`.
    pub margin: f64,
    /// Smallest eigenvalue, computed when the dominance test passes.
    pub min_eigenvalue: Option<f64>,
}

/// Strict diagonal dominance check; on success the direct eigenvalue solve
/// confirms the Gershgorin floor `θ_min ≥ margin`.
pub fn gershgorin_pd(m: &InteractionMatrix) -> GershgorinVerdict {
    let margins = mat3::dominance_margins(m.entries(), &[0, 1, 2]);
    let margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    if margin > 0.0 {
        let eigs = mat3::sym_eigenvalues3(m.entries());
        debug_assert!(eigs[0] >= margin - 1e-12 * margin.abs().max(1.0));
        GershgorinVerdict {
            dominant: true,
            margin,
            min_eigenvalue: Some(eigs[0]),
        }
    } else {
        GershgorinVerdict {
            dominant: false,
            margin,
            min_eigenvalue: None,
        }
    }
}
