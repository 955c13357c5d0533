mod common;

use common::{cx, random_tensor, rng};
use num_complex::Complex64 as C64;
use toelanczos_core::discretize::{build_mesh_with, discretize_problem, MeshRule};
use toelanczos_core::problems::{nmr_generate, NmrKind, NmrOverrides, DEFAULT_SEED};
use toelanczos_core::tensor::{star_identity, Tensor4};
use toelanczos_core::tt::*;

fn rel_err(a: &Tensor4, t: &TTTensor) -> f64 {
    tt_reconstruct(t).unwrap().sub(a).unwrap().frobenius() / a.frobenius()
}

fn check_bounds(t: &TTTensor) {
    let bound = rank_bounds(t.mode_sizes);
    assert_eq!((t.ranks[0], t.ranks[4]), (1, 1));
    for k in 0..5 {
        assert!(t.ranks[k] <= bound[k], "{:?} vs {:?}", t.ranks, bound);
    }
}

fn rank_one(n: usize, m: usize, seed: u64) -> Tensor4 {
    let mut g = rng(seed);
    let x: Vec<Vec<C64>> = [n, n, m, m].iter().map(|&s| (0..s).map(|_| cx(&mut g)).collect()).collect();
    Tensor4::from_fn(n, n, m, |a, b, c, d| x[0][a] * x[1][b] * x[2][c] * x[3][d])
}

fn experiment1(m: usize, nu: Option<f64>) -> Tensor4 {
    let ov = NmrOverrides { nu, ..Default::default() };
    let p = nmr_generate(NmrKind::One, DEFAULT_SEED, &ov).unwrap().problem;
    let mesh = build_mesh_with(p.interval.0, p.interval.1, m, MeshRule::RightEndpoint).unwrap();
    discretize_problem(&p, &mesh).unwrap()
}

#[test]
fn rank_one_tensor() {
    let a = rank_one(3, 4, 1);
    let t = tt_svd(&a, 1e-10).unwrap();
    assert_eq!(t.ranks, [1, 1, 1, 1, 1]);
    assert!(rel_err(&a, &t) < 1e-13);

    let a = rank_one(16, 8, 2);
    let t = tt_svd(&a, 1e-10).unwrap();
    assert_eq!(t.params(), 48);
    assert_eq!(compression_factor(&t, &a).unwrap(), 48.0 / 16384.0);
}

#[test]
fn known_cores_round_trip() {
    let mut g = rng(3);
    let dims = [(1, 3, 2), (2, 3, 3), (3, 4, 2), (2, 4, 1)];
    let cores = dims.map(|(r, n, s)| Core { r_left: r, n, r_right: s, data: (0..r * n * s).map(|_| cx(&mut g)).collect() });
    let t = TTTensor::new(cores, 0.0).unwrap();
    assert_eq!(t.ranks, [1, 2, 3, 2, 1]);
    let a = tt_reconstruct(&t).unwrap();
    let direct = Tensor4::from_fn(3, 3, 4, |i1, i2, j1, j2| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    acc += t.cores[0].get(0, i1, a) * t.cores[1].get(a, i2, b) * t.cores[2].get(b, j1, c) * t.cores[3].get(c, j2, 0);
                }
            }
        }
        acc
    });
    assert!(a.sub(&direct).unwrap().frobenius() < 1e-13 * direct.frobenius());

    let back = tt_svd(&a, 1e-12).unwrap();
    assert!(rel_err(&a, &back) < 1e-12);
    assert!(back.ranks.iter().zip(&t.ranks).all(|(x, y)| x <= y));
}

#[test]
fn tolerance_contract_on_random_tensors() {
    let mut g = rng(4);
    for (i, tol) in [1e-1, 1e-3, 1e-6, 1e-10].into_iter().enumerate() {
        let a = random_tensor(&mut g, 2 + i % 2, 3, 4);
        let t = tt_svd(&a, tol).unwrap();
        assert!(rel_err(&a, &t) <= tol, "tol {tol}: {}", rel_err(&a, &t));
        assert_eq!(t.tol_used, tol);
        check_bounds(&t);
    }
    let id = star_identity(4, 5);
    let t = tt_svd(&id, 1e-8).unwrap();
    assert!(rel_err(&id, &t) <= 1e-8);
    check_bounds(&t);
    assert!(tt_svd(&id, 0.0).is_err());
}

#[test]
fn rank_bound_values() {
    assert_eq!(rank_bounds([16, 16, 500, 500]), [1, 16, 256, 500, 1]);
    assert_eq!(rank_bounds([2, 3, 4, 4]), [1, 2, 6, 4, 1]);
}

#[test]
fn compression_factor_arithmetic() {
    let cf: f64 = 747768.0 / 2004000.0;
    assert!((cf - 0.37314).abs() < 5e-6);
    assert!(compression_factor(&tt_svd(&rank_one(2, 2, 9), 1e-6).unwrap(), &Tensor4::zeros(2, 2, 2)).is_err());
    let a = random_tensor(&mut rng(5), 2, 2, 2);
    let t = tt_svd(&a, 1e-12).unwrap();
    assert_eq!(compression_factor(&t, &a).unwrap(), t.params() as f64 / 16.0);
}

#[test]
fn experiment1_ranks() {
    let a = experiment1(500, None);
    assert_eq!(a.nnz(), 16 * 500 * 501 / 2);
    let t = tt_svd(&a, 1e-10).unwrap();
    assert_eq!(t.ranks[1], 16, "{:?}", t.ranks);
    assert!(t.ranks[2] <= 3, "{:?}", t.ranks);
    assert!(rel_err(&a, &t) <= 1e-10);
    check_bounds(&t);
}

#[test]
fn ranks_grow_with_tighter_tolerance() {
    for a in [experiment1(60, None), random_tensor(&mut rng(6), 3, 3, 5)] {
        let loose = tt_svd(&a, 1e-5).unwrap();
        let tight = tt_svd(&a, 1e-10).unwrap();
        assert!(loose.ranks.iter().zip(&tight.ranks).all(|(l, t)| l <= t), "{:?} {:?}", loose.ranks, tight.ranks);
        assert!(rel_err(&a, &loose) <= 1e-5);
    }
}

#[test]
fn leading_ranks_do_not_depend_on_frequency() {
    let fast = tt_svd(&experiment1(80, Some(1e4)), 1e-10).unwrap();
    let slow = tt_svd(&experiment1(80, Some(1e1)), 1e-10).unwrap();
    assert_eq!(fast.ranks[..3], slow.ranks[..3]);
}

#[test]
fn ttf_round_trip() {
    let a = experiment1(12, None);
    let t = tt_svd(&a, 1e-10).unwrap();
    let mut buf = Vec::new();
    write_ttf(&mut buf, &t).unwrap();
    assert_eq!(&buf[..4], b"TTF1");
    let back = read_ttf(buf.as_slice()).unwrap();
    assert_eq!(back, t);
    let mut again = Vec::new();
    write_ttf(&mut again, &back).unwrap();
    assert_eq!(again, buf);
    assert!(read_ttf(&buf[..buf.len() - 3]).is_err());
}
