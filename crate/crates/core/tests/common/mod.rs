#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toelanczos_core::discretize::{build_mesh_with, discretize_problem, Mesh, MeshRule};
use toelanczos_core::lanczos::{tensor_lanczos, LanczosOptions, LanczosResult};
use toelanczos_core::problems::Problem;
use toelanczos_core::resolvent::{approx_solution, SolutionVec};
use toelanczos_core::tensor::{HyperVec, Orientation, Tensor4};

pub struct Run {
    pub mesh: Mesh,
    pub a: Tensor4,
    pub result: LanczosResult,
    pub solution: SolutionVec,
}

pub fn run(p: &Problem, m: usize, n: usize) -> Run {
    run_with(p, m, n, &LanczosOptions::default())
}

pub fn run_with(p: &Problem, m: usize, n: usize, opts: &LanczosOptions) -> Run {
    let mesh = build_mesh_with(p.interval.0, p.interval.1, m, MeshRule::RightEndpoint).unwrap();
    let a = discretize_problem(p, &mesh).unwrap();
    let result = tensor_lanczos(&a, &p.v, &p.w, n, opts).unwrap();
    let solution = approx_solution(&result.tri, &mesh, result.normalization).unwrap();
    Run { mesh, a, result, solution }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cx(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_tensor(rng: &mut ChaCha8Rng, n1: usize, n2: usize, m: usize) -> Tensor4 {
    Tensor4::from_fn(n1, n2, m, |_, _, _, _| cx(rng))
}

pub fn random_lower_tensor(rng: &mut ChaCha8Rng, n1: usize, n2: usize, m: usize) -> Tensor4 {
    Tensor4::from_fn(n1, n2, m, |_, _, j1, j2| if j2 > j1 { C64::new(0.0, 0.0) } else { cx(rng) })
}

pub fn random_hypervec(rng: &mut ChaCha8Rng, n: usize, m: usize, o: Orientation) -> HyperVec {
    HyperVec::from_fn(n, m, o, |_, _, _| cx(rng))
}

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

/// A dense random problem on `[0, 1]` with polynomial and cosine entries.
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> Problem {
    use toelanczos_core::problems::Term;
    let v: Vec<C64> = (0..n).map(|_| cx(rng)).collect();
    let w: Vec<C64> = (0..n).map(|_| cx(rng)).collect();
    let mut p = Problem::new("random", n, (0.0, 1.0), v, w).unwrap();
    for k in 0..n {
        for l in 0..n {
            p.push_term(k, l, Term::constant(cx(rng))).unwrap();
            p.push_term(k, l, Term::monomial(cx(rng), rng.random_range(1..3))).unwrap();
            p.push_term(k, l, Term::cos(cx(rng), rng.random_range(0.5..3.0))).unwrap();
        }
    }
    p
}

/// `𝒱_n` as an `N × n` tensor and `𝒲_n` as an `n × N` tensor.
pub fn basis_tensors(result: &LanczosResult) -> (Tensor4, Tensor4) {
    let vs = &result.v_basis;
    let ws = &result.w_basis;
    let (nn, m, n) = (vs[0].n(), vs[0].m(), vs.len());
    let v = Tensor4::from_fn(nn, n, m, |i1, i2, j1, j2| vs[i2].get(i1, j1, j2));
    let w = Tensor4::from_fn(n, nn, m, |i1, i2, j1, j2| ws[i1].get(i2, j1, j2));
    (v, w)
}
