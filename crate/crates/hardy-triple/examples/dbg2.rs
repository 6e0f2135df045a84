use hardy_triple::functional::*;
use hardy_triple::grid::*;
use hardy_triple::closed_forms::*;

fn main() {
    let n = 3u32;
    let lambda = hardy_threshold(n) / 2.0;
    let grid = make_log_grid(n, 1e-4, 1e4, 1024).unwrap();
    let beta = CouplingMatrix::from_off_diagonal(0.05, 0.05, 0.05);
    let z = bubble_profile(&BubbleParams::new(n, lambda, 1.0).unwrap(), &grid);
    let eps = 0.036;
    let state = TripleState::new([z.clone(), z.scaled(eps), z.scaled(eps)], [lambda; 3], beta).unwrap();
    // quotient at eps vs at eps*(1 - delta): direct finite difference of the
    // quotient in the minority-scaling direction.
    let quot = |s: &TripleState| {
        let norms = s.norms_sq().unwrap();
        let e: f64 = norms.iter().sum();
        let p = state.pairings();
        let mut f = 0.0;
        let pr = s.pairings();
        let _ = p;
        for i in 0..3 { for j in 0..3 { f += s.beta().get(i,j) * pr[i][j]; } }
        e / f.powf(1.0/3.0)
    };
    let q0 = quot(&state);
    for delta in [1e-2, 1e-3] {
        let pert = TripleState::new([z.clone(), z.scaled(eps*(1.0-delta)), z.scaled(eps)], [lambda; 3], beta).unwrap();
        println!("delta={delta:e}: dquot/ (eps*delta) = {:e}", (quot(&pert)-q0)/(eps*delta));
    }
    println!("q0 = {q0}");
}
