//! The explicit coupling-threshold chains.
//!
//! For `N = 4` the chain runs through `β_1, β_2, β'_3, β_3, β_4, κ, β_5` and
//! ends in `β̃ = min{β_4, β_5}`; for `N = 3` through `β̂_1, C_3, C_4, β̂_2, π,
//! β̂_3` ending in `β̂ = min{β̂_1, β̂_2, β̂_3, 1}`.  Every entry is an explicit
//! function of the sharp constants, so the whole report is pure arithmetic.
//!
//! One naming wrinkle is repaired here: the two-sided bound on the critical
//! masses is stored as an unambiguous `(lower_bound, upper_bound)` pair, and
//! the second chain entry uses `S·L²/(16 C̄ U)`, which is what the diagonal
//! dominance estimate actually consumes.  The literal reading with the
//! letters swapped is exposed as the flagged entry `beta_2_swapped` for
//! comparison and is never used downstream.

use thiserror::Error;

use crate::closed_forms::{sharp_constants, ClosedFormError, SharpConstants};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("chain for N={requested} is not defined (only N=3 and N=4 carry chains)")]
    NoChain { requested: u32 },
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

/// The full constant chain for a given `(N, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub n_dim: u32,
    pub lambdas: [f64; 3],
    pub s_cal: f64,
    pub s_i: [f64; 3],
    pub a_i: [f64; 3],
    pub s_min: f64,
    pub c_bar: f64,
    /// Two-sided bound on `|u_i|_4²` (N=4) or `|u_i|_6^6` (N=3) on the
    /// low-energy part of the constraint set.
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Named chain entries in computation order.
    pub chain: Vec<(String, f64)>,
    /// `κ` for N=4, `π` for N=3.
    pub kappa_or_pi: f64,
    pub final_name: &'static str,
    pub final_value: f64,
    /// `γ = min{C_3/4, (3/2) A_3}`, N=3 only.
    pub gamma: Option<f64>,
    /// Scaling cap `t̂`, N=3 only, requires pair data.
    pub t_hat: Option<f64>,
}

impl ThresholdReport {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.chain
            .iter()
            .find(|(k, _)| k == key)
            .map(|&(_, v)| v)
    }

    /// Flat `key: value` text map with 17 significant digits, in a fixed
    /// order, JSON-compatible.
    pub fn to_key_value_text(&self) -> String {
        let mut entries: Vec<(String, f64)> = vec![("N".into(), self.n_dim as f64)];
        for (k, v) in [
            ("lambda_1", self.lambdas[0]),
            ("lambda_2", self.lambdas[1]),
            ("lambda_3", self.lambdas[2]),
            ("S_cal", self.s_cal),
            ("S_1", self.s_i[0]),
            ("S_2", self.s_i[1]),
            ("S_3", self.s_i[2]),
            ("A_1", self.a_i[0]),
            ("A_2", self.a_i[1]),
            ("A_3", self.a_i[2]),
            ("S_min", self.s_min),
            ("C_bar", self.c_bar),
            ("lower_bound", self.lower_bound),
            ("upper_bound", self.upper_bound),
        ] {
            entries.push((k.into(), v));
        }
        entries.extend(self.chain.iter().cloned());
        entries.push((
            if self.n_dim == 4 { "kappa" } else { "pi" }.into(),
            self.kappa_or_pi,
        ));
        entries.push((self.final_name.into(), self.final_value));
        if let Some(g) = self.gamma {
            entries.push(("gamma".into(), g));
        }
        if let Some(t) = self.t_hat {
            entries.push(("t_hat".into(), t));
        }
        let mut out = String::from("{\n");
        for (i, (k, v)) in entries.iter().enumerate() {
            let sep = if i + 1 == entries.len() { "" } else { "," };
            if k == "N" {
                out.push_str(&format!("  \"{}\": {}{}\n", k, *v as u32, sep));
            } else {
                out.push_str(&format!("  \"{}\": {:.16e}{}\n", k, v, sep));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// `C̄ = (3/N) S_cal^{N/2}`, the disjoint-triple energy cap.
pub fn c_bar(n_dim: u32, s_cal: f64) -> f64 {
    3.0 / n_dim as f64 * s_cal.powf(n_dim as f64 / 2.0)
}

/// Two-sided bounds on the per-component critical mass along the low-energy
/// part of the constraint set.
///
/// `N = 4`: `U = 8C̄/S` and `L = S − 8 β C̄ / S`, which is `S/2` at the chain
/// cap `β = β_1 = S²/(16 C̄)`.
///
/// `N = 3`: `U = (6C̄/S)³`; the lower bound is the smallest positive root of
/// `S x^{1/3} = x + β S^{-3/2} (6C̄)^{3/2} x^{1/2}`, i.e. `L = t⁶` with `t`
/// the unique positive root of `t⁴ + b t − S`, `b = β S^{-3/2} (6C̄)^{3/2}`.
pub fn estimate2_bounds(
    n_dim: u32,
    s_min: f64,
    c_bar: f64,
    beta_cap: f64,
) -> Result<(f64, f64), ThresholdError> {
    match n_dim {
        4 => {
            let upper = 8.0 * c_bar / s_min;
            let lower = s_min - 8.0 * beta_cap * c_bar / s_min;
            Ok((lower, upper))
        }
        3 => {
            let upper = (6.0 * c_bar / s_min).powi(3);
            let b = beta_cap * s_min.powf(-1.5) * (6.0 * c_bar).powf(1.5);
            // t⁴ + b t − S is strictly increasing on t > 0: bisect.
            let f = |t: f64| t.powi(4) + b * t - s_min;
            let mut lo = 0.0;
            let mut hi = s_min.powf(0.25).max(1.0);
            while f(hi) < 0.0 {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            Ok((t.powi(6), upper))
        }
        other => Err(ThresholdError::NoChain { requested: other }),
    }
}

fn validated_constants(
    lambdas: [f64; 3],
    n_dim: u32,
    s_cal: f64,
) -> Result<SharpConstants, ThresholdError> {
    Ok(sharp_constants(lambdas, n_dim, s_cal)?)
}

/// The `N = 4` chain ending in `β̃`.
pub fn n4_chain(lambdas: [f64; 3], s_cal: f64) -> Result<ThresholdReport, ThresholdError> {
    let c = validated_constants(lambdas, 4, s_cal)?;
    let s = c.s_min;
    let cb = c.c_bar;
    let beta_1 = s * s / (16.0 * cb);
    let (lower, upper) = estimate2_bounds(4, s, cb, beta_1)?;
    let beta_2 = beta_1.min(s * lower * lower / (16.0 * cb * upper));
    // The literal lettering of the two-sided bound, flagged for comparison.
    let beta_2_swapped = beta_1.min(s * upper * upper / (16.0 * cb * lower));

    let mut beta_3_prime = f64::INFINITY;
    let mut pair_cap = f64::INFINITY;
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let (li, lj) = (1.0 - lambdas[i], 1.0 - lambdas[j]);
            beta_3_prime = beta_3_prime.min(li / lj);
            beta_3_prime =
                beta_3_prime.min(li.powf(0.75) * lj.powf(0.75) / (li.powf(1.5) + lj.powf(1.5)));
            pair_cap = pair_cap.min(s.powi(4) / (16.0 * (c.a_i[i] + c.a_i[j])));
        }
    }
    beta_3_prime *= 0.5;
    let beta_3 = 1.0f64.min(beta_3_prime).min(pair_cap);
    let total_a: f64 = c.a_i.iter().sum();
    let beta_4 = beta_2.min(beta_3).min(s * s / (16.0 * total_a));
    let kappa = 0.5
        * c.a_i
            .iter()
            .map(|&a| s_cal * s_cal - 4.0 * a)
            .fold(f64::INFINITY, f64::min);
    let beta_5 = kappa * s / (6.0 * s_cal.powi(3));
    let beta_tilde = beta_4.min(beta_5);

    Ok(ThresholdReport {
        n_dim: 4,
        lambdas,
        s_cal,
        s_i: c.s_i,
        a_i: c.a_i,
        s_min: s,
        c_bar: cb,
        lower_bound: lower,
        upper_bound: upper,
        chain: vec![
            ("beta_1".into(), beta_1),
            ("beta_2".into(), beta_2),
            ("beta_2_swapped".into(), beta_2_swapped),
            ("beta_3_prime".into(), beta_3_prime),
            ("beta_3".into(), beta_3),
            ("beta_4".into(), beta_4),
            ("beta_5".into(), beta_5),
        ],
        kappa_or_pi: kappa,
        final_name: "beta_tilde",
        final_value: beta_tilde,
        gamma: None,
        t_hat: None,
    })
}

/// The `N = 3` chain ending in `β̂`; `pair_norm_sq_sum = ‖e_1‖_1² + ‖e_2‖_2²`
/// of a pair minimizer, when available, feeds the scaling cap `t̂`.
pub fn n3_chain(
    lambdas: [f64; 3],
    s_cal: f64,
    pair_norm_sq_sum: Option<f64>,
) -> Result<ThresholdReport, ThresholdError> {
    let c = validated_constants(lambdas, 3, s_cal)?;
    let s = c.s_min;
    let cb = c.c_bar;
    let six_cb = 6.0 * cb;
    let beta_hat_1 = 7.0 * s.powi(3) / (12.0 * six_cb * six_cb);
    let (c3, c4) = estimate2_bounds(3, s, cb, beta_hat_1)?;
    let beta_hat_2 = (c3 * s.powf(1.5) / (2.0 * c4.sqrt() * six_cb.powf(1.5)))
        .min(c3 * s.powi(3) / (12.0 * six_cb * six_cb));
    let pi = 0.5
        * c.a_i
            .iter()
            .map(|&a| s_cal.powi(3) - (3.0 * a) * (3.0 * a))
            .fold(f64::INFINITY, f64::min);
    let beta_hat_3 = pi * s.powi(3) / (2.0 * s_cal.powi(3) * six_cb * six_cb);
    let beta_hat = beta_hat_1.min(beta_hat_2).min(beta_hat_3).min(1.0);
    let gamma = (c3 / 4.0).min(1.5 * c.a_i[2]);
    let t_hat =
        pair_norm_sq_sum.map(|pair| (pair.max(3.0 * c.a_i[2]) / gamma).powf(0.25));

    Ok(ThresholdReport {
        n_dim: 3,
        lambdas,
        s_cal,
        s_i: c.s_i,
        a_i: c.a_i,
        s_min: s,
        c_bar: cb,
        lower_bound: c3,
        upper_bound: c4,
        chain: vec![
            ("beta_hat_1".into(), beta_hat_1),
            ("C_3".into(), c3),
            ("C_4".into(), c4),
            ("beta_hat_2".into(), beta_hat_2),
            ("beta_hat_3".into(), beta_hat_3),
        ],
        kappa_or_pi: pi,
        final_name: "beta_hat",
        final_value: beta_hat,
        gamma: Some(gamma),
        t_hat,
    })
}

/// Dispatches on the dimension; `N ∉ {3,4}` has no chain.
pub fn chain_for(
    n_dim: u32,
    lambdas: [f64; 3],
    s_cal: f64,
) -> Result<ThresholdReport, ThresholdError> {
    match n_dim {
        3 => n3_chain(lambdas, s_cal, None),
        4 => n4_chain(lambdas, s_cal),
        other => Err(ThresholdError::NoChain { requested: other }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::hardy_threshold;
    use rand::{Rng, SeedableRng};

    const S4: f64 = 10.259112708057987; // quadrature-checked Sobolev constant, N=4
    const S3: f64 = 5.477900636437615; // N=3

    #[test]
    fn c_bar_substitutions() {
        assert!((c_bar(4, S4) - 0.75 * S4 * S4).abs() < 1e-12);
        assert!((c_bar(3, S3) - S3.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn estimate2_exact_n4_values() {
        let s = 0.5f64.powf(0.75) * S4;
        let cb = c_bar(4, S4);
        let beta_1 = s * s / (16.0 * cb);
        let (l, u) = estimate2_bounds(4, s, cb, beta_1).unwrap();
        assert!((l - s / 2.0).abs() < 1e-12 * s);
        assert!((u - 8.0 * cb / s).abs() < 1e-12 * u);
    }

    #[test]
    fn estimate2_n3_root_properties() {
        let s = 0.5f64.powf(2.0 / 3.0) * S3;
        let cb = c_bar(3, S3);
        let beta_hat_1 = 7.0 * s.powi(3) / (12.0 * (6.0 * cb).powi(2));
        let (l, u) = estimate2_bounds(3, s, cb, beta_hat_1).unwrap();
        assert!(l > 0.0 && l < u);
        // The root satisfies the defining equation.
        let b = beta_hat_1 * s.powf(-1.5) * (6.0 * cb).powf(1.5);
        let t = l.powf(1.0 / 6.0);
        assert!((t.powi(4) + b * t - s).abs() < 1e-9 * s);
        assert!(estimate2_bounds(5, s, cb, 0.1).is_err());
    }

    #[test]
    fn n4_chain_positive_monotone_and_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let l: [f64; 3] = [
                rng.gen_range(0.02..0.98),
                rng.gen_range(0.02..0.98),
                rng.gen_range(0.02..0.98),
            ];
            let rep = n4_chain(l, S4).unwrap();
            for (name, v) in &rep.chain {
                assert!(*v > 0.0, "{name} nonpositive: {v}");
            }
            assert!(rep.kappa_or_pi > 0.0);
            assert!(rep.final_value > 0.0);
            let b1 = rep.get("beta_1").unwrap();
            let b2 = rep.get("beta_2").unwrap();
            let b4 = rep.get("beta_4").unwrap();
            assert!(rep.final_value <= b4 && b4 <= b2 && b2 <= b1);
        }

        // Permutation equivariance of the min-based finals.
        let l = [0.3, 0.6, 0.8];
        let rep = n4_chain(l, S4).unwrap();
        let rep_p = n4_chain([0.8, 0.3, 0.6], S4).unwrap();
        assert!((rep.final_value - rep_p.final_value).abs() < 1e-15);
        assert!((rep.kappa_or_pi - rep_p.kappa_or_pi).abs() < 1e-15);

        // All-equal lambdas make the report symmetric across components.
        let rep = n4_chain([0.5; 3], S4).unwrap();
        assert_eq!(rep.s_i[0], rep.s_i[1]);
        assert_eq!(rep.a_i[1], rep.a_i[2]);

        assert!(n4_chain([1.2, 0.5, 0.5], S4).is_err());
    }

    #[test]
    fn n3_chain_positive_and_capped() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let lim = hardy_threshold(3);
        for _ in 0..200 {
            let l: [f64; 3] = [
                rng.gen_range(0.02 * lim..0.98 * lim),
                rng.gen_range(0.02 * lim..0.98 * lim),
                rng.gen_range(0.02 * lim..0.98 * lim),
            ];
            let rep = n3_chain(l, S3, None).unwrap();
            for (name, v) in &rep.chain {
                assert!(*v > 0.0, "{name} nonpositive: {v}");
            }
            assert!(rep.kappa_or_pi > 0.0, "pi must be positive");
            assert!(rep.final_value > 0.0 && rep.final_value <= 1.0);
            assert!(rep.final_value <= rep.get("beta_hat_1").unwrap());
            assert!(rep.gamma.unwrap() > 0.0);
        }
        assert!(n3_chain([0.3, 0.1, 0.1], S3, None).is_err());
    }

    #[test]
    fn t_hat_needs_pair_data() {
        let l = [0.1, 0.1, 0.1];
        let rep = n3_chain(l, S3, None).unwrap();
        assert!(rep.t_hat.is_none());
        let rep = n3_chain(l, S3, Some(2.5)).unwrap();
        let gamma = rep.gamma.unwrap();
        let expect = (2.5f64.max(3.0 * rep.a_i[2]) / gamma).powf(0.25);
        assert_eq!(rep.t_hat.unwrap(), expect);
    }

    #[test]
    fn report_serialization_is_flat_and_parseable() {
        let rep = n4_chain([0.5; 3], S4).unwrap();
        let text = rep.to_key_value_text();
        assert!(text.contains("\"beta_tilde\":"));
        assert!(text.contains("\"kappa\":"));
        assert!(text.contains("\"beta_2_swapped\":"));
        // 17 significant digits: mantissa with 16 decimals.
        let line = text
            .lines()
            .find(|l| l.contains("\"S_cal\""))
            .unwrap();
        let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
        assert!(mantissa.contains('e'));
        assert_eq!(mantissa.split('.').nth(1).unwrap().split('e').next().unwrap().len(), 16);

        let rep3 = n3_chain([0.1; 3], S3, Some(1.0)).unwrap();
        let text3 = rep3.to_key_value_text();
        assert!(text3.contains("\"beta_hat\":"));
        assert!(text3.contains("\"pi\":"));
        assert!(text3.contains("\"t_hat\":"));
    }
}
