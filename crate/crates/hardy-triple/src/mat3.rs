//! Small dense helpers for the 3x3 (and masked 2x2) systems that show up in
//! Nehari projections: Cramer solves, Gershgorin dominance margins, and a
//! closed-form symmetric eigenvalue solve.

/// Determinant of a 3x3 matrix.
pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves `m x = b` by Cramer's rule.  Returns `None` when the determinant is
/// numerically zero relative to the matrix scale.
pub fn solve3(m: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let d = det3(m);
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .powi(3);
    if d.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return None;
    }
    let mut x = [0.0; 3];
    for col in 0..3 {
        let mut mc = *m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        x[col] = det3(&mc) / d;
    }
    Some(x)
}

/// Solves the subsystem of `m x = b` restricted to the active indices;
/// inactive slots of the result are zero.
pub fn solve_masked(m: &[[f64; 3]; 3], b: &[f64; 3], active: &[usize]) -> Option<[f64; 3]> {
    let mut x = [0.0; 3];
    match active.len() {
        0 => Some(x),
        1 => {
            let i = active[0];
            if m[i][i].abs() <= f64::MIN_POSITIVE {
                return None;
            }
            x[i] = b[i] / m[i][i];
            Some(x)
        }
        2 => {
            let (i, j) = (active[0], active[1]);
            let d = m[i][i] * m[j][j] - m[i][j] * m[j][i];
            let scale = m[i][i]
                .abs()
                .max(m[j][j].abs())
                .max(m[i][j].abs())
                .max(m[j][i].abs());
            if d.abs() <= 1e-14 * (scale * scale).max(f64::MIN_POSITIVE) {
                return None;
            }
            x[i] = (b[i] * m[j][j] - m[i][j] * b[j]) / d;
            x[j] = (m[i][i] * b[j] - b[i] * m[j][i]) / d;
            Some(x)
        }
        3 => solve3(m, b),
        _ => None,
    }
}

/// Row margins `m_ii - Σ_{j≠i} |m_ij|` over the active indices.
pub fn dominance_margins(m: &[[f64; 3]; 3], active: &[usize]) -> Vec<f64> {
    active
        .iter()
        .map(|&i| {
            let off: f64 = active
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| m[i][j].abs())
                .sum();
            m[i][i] - off
        })
        .collect()
}

/// Strict diagonal dominance over the active indices.
pub fn is_strictly_dominant(m: &[[f64; 3]; 3], active: &[usize]) -> bool {
    dominance_margins(m, active).iter().all(|&g| g > 0.0)
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending, by the trigonometric
/// closed form.
pub fn sym_eigenvalues3(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return d;
    }
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (m[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let mut out = [e1, e2, e3];
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Eigenvalues of the symmetric submatrix on the active indices, ascending.
pub fn sym_eigenvalues_masked(m: &[[f64; 3]; 3], active: &[usize]) -> Vec<f64> {
    match active.len() {
        0 => vec![],
        1 => vec![m[active[0]][active[0]]],
        2 => {
            let (i, j) = (active[0], active[1]);
            let tr = m[i][i] + m[j][j];
            let det = m[i][i] * m[j][j] - m[i][j] * m[j][i];
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            vec![tr / 2.0 - disc, tr / 2.0 + disc]
        }
        _ => sym_eigenvalues3(m).to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cramer_reproduces_known_solution() {
        let m = [[4.0, 1.0, 0.5], [1.0, 3.0, -0.5], [0.5, -0.5, 5.0]];
        let x = [1.5, -2.0, 0.25];
        let b = [
            m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
            m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
            m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
        ];
        let got = solve3(&m, &b).unwrap();
        for k in 0..3 {
            assert!((got[k] - x[k]).abs() < 1e-12);
        }
        assert!(solve3(&[[1.0, 1.0, 1.0]; 3], &b).is_none());
    }

    #[test]
    fn masked_solve_matches_full_on_block() {
        let m = [[4.0, 1.0, 0.0], [1.0, 3.0, 0.0], [0.0, 0.0, 1.0]];
        let b = [5.0, 4.0, 0.0];
        let x = solve_masked(&m, &b, &[0, 1]).unwrap();
        assert!((m[0][0] * x[0] + m[0][1] * x[1] - b[0]).abs() < 1e-12);
        assert!((m[1][0] * x[0] + m[1][1] * x[1] - b[1]).abs() < 1e-12);
        assert_eq!(x[2], 0.0);
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(sym_eigenvalues3(&id), [1.0, 1.0, 1.0]);

        // diag(2,2,2) with off-diagonal 1/2: eigenvalues 3/2, 3/2, 3.
        let m = [[2.0, 0.5, 0.5], [0.5, 2.0, 0.5], [0.5, 0.5, 2.0]];
        let e = sym_eigenvalues3(&m);
        assert!((e[0] - 1.5).abs() < 1e-12);
        assert!((e[1] - 1.5).abs() < 1e-12);
        assert!((e[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dominance_implies_positive_definiteness() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let mut m = [[0.0f64; 3]; 3];
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let v = rng.gen_range(-1.0..1.0);
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            for (i, row) in m.iter_mut().enumerate() {
                let off: f64 = row.iter().map(|v| v.abs()).sum::<f64>() - row[i].abs();
                row[i] = off + rng.gen_range(0.01..1.0);
            }
            assert!(is_strictly_dominant(&m, &[0, 1, 2]));
            let margins = dominance_margins(&m, &[0, 1, 2]);
            let floor = margins.iter().cloned().fold(f64::INFINITY, f64::min);
            let eigs = sym_eigenvalues3(&m);
            assert!(eigs[0] >= floor - 1e-12, "{eigs:?} vs floor {floor}");
            assert!(eigs[0] > 0.0);
        }
    }
}
