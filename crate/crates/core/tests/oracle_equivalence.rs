mod common;

use common::{random_instance, rng};
use vco_core::benders::{solve_normal_case, solve_vco, SolveOptions};
use vco_core::oracle::{oracle_solve_normal, oracle_solve_vco};

#[test]
fn vco_matches_oracle_on_random_instances() {
    let mut rng = rng(7);
    for case in 0..60 {
        let n = 4 + case % 6;
        let inst = random_instance(&mut rng, n);
        let sol = solve_vco(&inst, &SolveOptions::default()).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let oracle = oracle_solve_vco(&inst, 12).unwrap();
        assert!(
            (sol.value - oracle.best_value).abs() <= 1e-6,
            "case {case}: {} vs {}",
            sol.value,
            oracle.best_value
        );
        assert!(sol.state.iterations <= 10 * n);
    }
}

#[test]
fn normal_case_matches_oracle_on_random_instances() {
    let mut rng = rng(11);
    for case in 0..50 {
        let n = 4 + case % 6;
        let inst = random_instance(&mut rng, n);
        let sol = solve_normal_case(&inst, &SolveOptions::default()).unwrap();
        let (_, v) = oracle_solve_normal(&inst, 12).unwrap();
        assert!((sol.value - v).abs() <= 1e-6, "case {case}");
    }
}
