mod common;

use common::{rel, run};
use toelanczos_core::diagnostics::err_solution;
use toelanczos_core::problems::{analytic_const3, builtin};

#[test]
fn const3_solution_errors() {
    let p = builtin("const3").unwrap();
    for (m, want) in [(10, 8.230e-2), (100, 7.019e-3)] {
        let r = run(&p, m, 3);
        let e = err_solution(&analytic_const3(&r.mesh).values, &r.solution.values).unwrap();
        println!("M = {m}: err_sol = {e:.4e}");
        assert!(rel(e, want) < 0.05, "M = {m}: {e:e} vs {want:e}");
    }
}
