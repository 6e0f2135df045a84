use hardy_triple::functional::*;
use hardy_triple::grid::*;
use hardy_triple::solver;
use hardy_triple::closed_forms::*;

fn main() {
    for n in [4u32, 5u32, 3u32] {
        let lambda = hardy_threshold(n) / 2.0;
        let grid = make_log_grid(n, 1e-4, 1e4, 1024).unwrap();
        let beta = CouplingMatrix::from_off_diagonal(0.05, 0.05, 0.05);
        let mk = |mu: f64| bubble_profile(&BubbleParams::new(n, lambda, mu).unwrap(), &grid);
        let state = TripleState::new([mk(0.7), mk(1.1), mk(1.9)], [lambda; 3], beta).unwrap();
        let opts = solver::OptimizerOptions { max_iter: 4000, restarts: 1, seed: 11, ..Default::default() };
        let r = solver::ground_state_level(&state, &opts).unwrap();
        let m = r.state.masses();
        let two_star = critical_exponent(n);
        let norms: Vec<f64> = m.iter().map(|x| x.powf(1.0/two_star)).collect();
        let top = norms.iter().cloned().fold(0.0, f64::max);
        println!("N={n} class={} iters={} conv={} grad={:.2e} norm-ratios {:?}",
            r.classification, r.iterations, r.converged, r.residuals.gradient,
            norms.iter().map(|x| x/top).collect::<Vec<_>>());
    }
}
