mod common;

use common::run;
use num_complex::Complex64 as C64;
use toelanczos_core::diagnostics::{convergence_slope, err_solution};
use toelanczos_core::discretize::*;
use toelanczos_core::problems::{analytic_cos1, builtin, Problem, Term};
use toelanczos_core::tensor::{BlockStructure, MatM};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn closed_mesh_examples() {
    let mesh = build_mesh(0.0, 1.0, 10).unwrap();
    assert_eq!(mesh.h, 1.0 / 9.0);
    assert_eq!((mesh.tau[0], mesh.tau[9]), (0.0, 1.0));
    assert_eq!(build_mesh(1e-4, 1.0, 2).unwrap().tau, vec![1e-4, 1.0]);
    assert_eq!(build_mesh(0.0, 1.0, 101).unwrap().tau[50], 0.5);
    let mesh = build_mesh(-2.0, 3.0, 37).unwrap();
    assert!(mesh.tau.windows(2).all(|w| ((w[1] - w[0]) - mesh.h).abs() < 1e-14));
    assert!(build_mesh(0.0, 1.0, 1).is_err());
    assert!(build_mesh(1.0, 1.0, 5).is_err());
    assert!(build_mesh(0.0, f64::NAN, 5).is_err());
}

#[test]
fn right_endpoint_mesh() {
    let mesh = build_mesh_with(0.0, 1.0, 4, MeshRule::RightEndpoint).unwrap();
    assert_eq!(mesh.h, 0.25);
    assert_eq!(mesh.tau, vec![0.25, 0.5, 0.75, 1.0]);
    assert_eq!(MeshRule::default(), MeshRule::RightEndpoint);
}

#[test]
fn theta_examples() {
    let mesh = build_mesh(0.0, 1.0, 2).unwrap();
    assert_eq!(theta_matrix(&mesh), MatM::new(2, vec![c(1.0), c(0.0), c(1.0), c(1.0)]).unwrap());
    let mesh = build_mesh(0.0, 1.0, 3).unwrap();
    let want = MatM::new(3, [0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5].map(c).to_vec()).unwrap();
    assert_eq!(theta_matrix(&mesh), want);
    let th = theta_matrix(&build_mesh(0.0, 2.0, 5).unwrap());
    assert!((0..5).all(|i| th.get(i, 0) == c(0.5)));
}

#[test]
fn linear_entry_by_hand() {
    let mut p = Problem::new("t", 1, (0.0, 1.0), vec![c(1.0)], vec![c(1.0)]).unwrap();
    p.push_term(0, 0, Term::monomial(1.0, 1)).unwrap();
    let a = discretize_problem(&p, &build_mesh(0.0, 1.0, 3).unwrap()).unwrap();
    let want = MatM::new(3, [0.0, 0.0, 0.0, 0.25, 0.25, 0.0, 0.5, 0.5, 0.5].map(c).to_vec()).unwrap();
    assert_eq!(a.slice(0, 0), want);
}

#[test]
fn constant_problem_slices_are_scaled_theta() {
    let p = builtin("const3").unwrap();
    let mesh = build_mesh(0.0, 1.0, 7).unwrap();
    let a = discretize_problem(&p, &mesh).unwrap();
    let th = theta_matrix(&mesh);
    let dense = p.eval(0.3);
    for k in 0..3 {
        for l in 0..3 {
            let want = th.scale(dense[(k, l)]);
            if dense[(k, l)] == c(0.0) {
                assert_eq!(a.structure(k, l), BlockStructure::Zero);
            } else {
                assert_eq!(a.structure(k, l), BlockStructure::LowerTriangular);
                assert_eq!(a.slice(k, l), want);
            }
        }
    }
    assert_eq!(a.slice(0, 1), th);
}

#[test]
fn rows_are_constant_below_diagonal() {
    let p = builtin("timedep5").unwrap();
    let mesh = build_mesh(p.interval.0, p.interval.1, 12).unwrap();
    let a = discretize_problem(&p, &mesh).unwrap();
    for k in 0..5 {
        for l in 0..5 {
            let s = a.slice(k, l);
            for i in 0..12 {
                let x = s.get(i, 0);
                for j in 0..=i {
                    assert_eq!(s.get(i, j).re.to_bits(), x.re.to_bits());
                    assert_eq!(s.get(i, j).im.to_bits(), x.im.to_bits());
                }
                for j in i + 1..12 {
                    assert_eq!(s.get(i, j), c(0.0));
                }
                assert_eq!(x, p.eval_entry(k, l, mesh.tau[i]) * mesh.h);
            }
        }
    }
}

#[test]
fn non_finite_sample_names_the_entry() {
    let mut p = Problem::new("overflow", 2, (0.0, 1e10), vec![c(1.0), c(0.0)], vec![c(1.0), c(0.0)]).unwrap();
    p.push_term(1, 0, Term::monomial(1e300, 2)).unwrap();
    assert!(p.push_term(0, 0, Term::constant(f64::INFINITY)).is_err());
    match discretize_problem(&p, &build_mesh(0.0, 1e10, 4).unwrap()) {
        Err(toelanczos_core::Error::NonFiniteSample { k: 1, l: 0, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn scalar_cosine_converges_first_order() {
    let p = builtin("cos1").unwrap();
    let points: Vec<(usize, f64)> = [10, 40, 160]
        .into_iter()
        .map(|m| {
            let r = run(&p, m, 1);
            (m, err_solution(&analytic_cos1(&r.mesh).values, &r.solution.values).unwrap())
        })
        .collect();
    let slope = convergence_slope(&points).unwrap();
    assert!((slope + 1.0).abs() <= 0.15, "{slope} from {points:?}");
}
