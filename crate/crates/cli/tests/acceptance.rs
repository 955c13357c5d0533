//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any fails. Runs in a few minutes in the dev profile;
//! the M = 500 and M = 1000 runs dominate.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{random_hypervec, random_problem, random_tensor, rng, run};
use num_complex::Complex64 as C64;
use serde_json::Value;
use toelanczos_core::diagnostics::{err_biorth, err_recurrences, err_solution};
use toelanczos_core::discretize::{build_mesh_with, discretize_problem, MeshRule};
use toelanczos_core::lanczos::*;
use toelanczos_core::problems::*;
use toelanczos_core::resolvent::{approx_solution, oracle};
use toelanczos_core::tensor::*;
use toelanczos_core::tt::{rank_bounds, tt_reconstruct, tt_svd};

type Check = Result<String, String>;

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toelanczos")).args(args).output().expect("binary runs");
    let stderr = String::from_utf8_lossy(&out.stderr);
    let code = out.status.code().unwrap_or(-1);
    if code != 0 {
        eprintln!("  toelanczos {}: exit {code}\n{stderr}", args.join(" "));
    }
    (code, String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn cli_json(args: &[&str]) -> (i32, Value) {
    let (code, s) = cli(args);
    (code, serde_json::from_str(&s).unwrap_or(Value::Null))
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err_sols(doc: &Value) -> Vec<(usize, f64)> {
    doc["rows"]
        .as_array()
        .map(|rows| {
            rows.iter()
                .map(|r| (r["meta"]["M"].as_u64().unwrap_or(0) as usize, r["err_sol"].as_f64().unwrap_or(f64::NAN)))
                .collect()
        })
        .unwrap_or_default()
}

fn table_check(args: &[&str], expected: &[(usize, f64)]) -> Check {
    let (code, doc) = cli_json(args);
    ensure(code == 0, || format!("exit code {code}"))?;
    let got = err_sols(&doc);
    let mut notes = Vec::new();
    let mut ok = got.len() == expected.len();
    for (&(m, want), &(gm, e)) in expected.iter().zip(&got) {
        let r = rel(e, want);
        ok &= gm == m && r <= 0.05;
        notes.push(format!("M={m}: {e:.4e} vs {want:.3e} ({:.1}%)", 100.0 * r));
    }
    let s = notes.join(", ");
    if ok {
        Ok(s)
    } else {
        Err(s)
    }
}

fn c1() -> Check {
    table_check(
        &["convergence", "--problem", "const3", "--M", "10,100,1000", "--allow-large", "--reference", "analytic", "--format", "json"],
        &[(10, 8.230e-2), (100, 7.019e-3), (1000, 6.918e-4)],
    )
}

fn c2() -> Check {
    table_check(
        &["convergence", "--problem", "timedep5", "--M", "10,100", "--reference", "rk45", "--rtol", "1e-10", "--format", "json"],
        &[(10, 2.360e-1), (100, 2.257e-2)],
    )
}

fn c3() -> Check {
    let p = builtin("const3").unwrap();
    let mut worst = [0.0f64; 3];
    for m in [10, 25, 50, 100] {
        let r = run(&p, m, 3);
        let (ev, ew) = err_recurrences(&r.result, &r.a).unwrap();
        let eo = err_biorth(&r.result).unwrap();
        let em = toelanczos_core::diagnostics::err_moments(&r.result, &r.a, &p.v, &p.w, 5).unwrap();
        let em = em.iter().copied().fold(0.0, f64::max);
        ensure(ew == 0.0, || format!("M={m}: err_W = {ew:e}"))?;
        ensure(ev < 1e-12 && eo < 1e-12 && em < 1e-12, || {
            format!("M={m}: err_V {ev:e}, err_o {eo:e}, err_M {em:e}")
        })?;
        worst = [worst[0].max(ev), worst[1].max(eo), worst[2].max(em)];
    }
    Ok(format!("max err_V {:.1e}, err_o {:.1e}, err_M {:.1e}, err_W 0", worst[0], worst[1], worst[2]))
}

fn c4() -> Check {
    let mut g = rng(4);
    let (mut wr, mut wm) = (0.0f64, 0.0f64);
    for case in 0..20 {
        let n = 1 + case % 4;
        let m = 3 + (case * 7) % 10;
        let p = random_problem(&mut g, n);
        let r = run(&p, m, n);
        let (ev, ew) = err_recurrences(&r.result, &r.a).unwrap();
        wr = wr.max(ev).max(ew);

        let wv = p.wv();
        let vn: Vec<C64> = p.v.iter().map(|x| x / wv).collect();
        let (wd, v0) = (lift_dual(&p.w, m).unwrap(), lift(&vn, m).unwrap());
        let t = assemble_tridiag(&r.result.tri);
        let mut e1 = vec![C64::new(0.0, 0.0); r.result.tri.n];
        e1[0] = C64::new(1.0, 0.0);
        let (ed, ee) = (lift_dual(&e1, m).unwrap(), lift(&e1, m).unwrap());
        for k in 0..2 * r.result.tri.n {
            let lhs = star_inner(&wd, &star_mul_tv(&star_pow(&r.a, k).unwrap(), &v0).unwrap()).unwrap();
            let rhs = star_inner(&ed, &star_mul_tv(&star_pow(&t, k).unwrap(), &ee).unwrap()).unwrap();
            let e = lhs.sub(&rhs).unwrap().frobenius() / lhs.frobenius().max(rhs.frobenius());
            wm = wm.max(e);
        }
    }
    ensure(wr < 1e-10 && wm < 1e-10, || format!("residual {wr:e}, moments {wm:e}"))?;
    Ok(format!("20 problems: max residual {wr:.1e}, max moment mismatch {wm:.1e}"))
}

fn c5() -> Check {
    let start = Instant::now();
    let mut g = rng(5);
    let mut worst = 0.0f64;
    let rel_m = |x: &nalgebra::DMatrix<C64>, y: &nalgebra::DMatrix<C64>| {
        let d = (x - y).norm();
        if d == 0.0 { 0.0 } else { d / x.norm().max(y.norm()) }
    };
    for i in 0..200 {
        let m = 1 + i % 6;
        let (n1, n2, n3) = (1 + i % 4, 1 + (i / 4) % 4, 1 + (i / 16) % 3);
        let a = random_tensor(&mut g, n1, n2, m);
        let b = random_tensor(&mut g, n2, n3, m);
        let c = random_tensor(&mut g, n3, n2, m);
        let e = match i % 3 {
            0 => {
                let lhs = star_mul_tt(&star_mul_tt(&a, &b).unwrap(), &c).unwrap();
                let rhs = star_mul_tt(&a, &star_mul_tt(&b, &c).unwrap()).unwrap();
                rel_m(&to_block_matrix(&lhs), &to_block_matrix(&rhs))
            }
            1 => {
                let b2 = random_tensor(&mut g, n2, n3, m);
                let lhs = star_mul_tt(&a, &b.add(&b2).unwrap()).unwrap();
                let rhs = star_mul_tt(&a, &b).unwrap().add(&star_mul_tt(&a, &b2).unwrap()).unwrap();
                rel_m(&to_block_matrix(&lhs), &to_block_matrix(&rhs))
            }
            _ => {
                let v = random_hypervec(&mut g, n2, m, Orientation::Right);
                let lhs = hypervec_to_block_matrix(&star_mul_tv(&a, &v).unwrap());
                let rhs = to_block_matrix(&a) * hypervec_to_block_matrix(&v);
                rel_m(&lhs, &rhs)
            }
        };
        worst = worst.max(e);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-12, || format!("max relative error {worst:e}"))?;
    ensure(secs < 1.0, || format!("took {secs:.2}s"))?;
    Ok(format!("200 checks, max relative error {worst:.1e}, {:.0} ms", secs * 1e3))
}

fn c6() -> Check {
    let mut worst = 0.0f64;
    for id in ["const3", "timedep5"] {
        let p = builtin(id).unwrap();
        for m in [5, 10, 25, 50] {
            let r = run(&p, m, p.n);
            let want = oracle::neumann_solution(&r.a, &p.v, &p.w, &r.mesh).unwrap();
            let e = err_solution(&want, &r.solution.values).unwrap();
            ensure(e < 1e-8, || format!("{id} M={m}: {e:e}"))?;
            worst = worst.max(e);
        }
    }
    Ok(format!("max relative difference {worst:.1e}"))
}

fn c7() -> Check {
    let mut notes = Vec::new();
    for kind in ["nmr1", "nmr2", "nmr3"] {
        let (code, doc) =
            cli_json(&["convergence", "--problem", kind, "--M", "5,50,500", "--allow-large", "--format", "json"]);
        ensure(code == 0, || format!("{kind}: exit code {code}"))?;
        let errs = err_sols(&doc);
        let slope = doc["slope"].as_f64().unwrap_or(f64::NAN);
        ensure(errs.len() == 3 && errs.windows(2).all(|w| w[1].1 < w[0].1), || format!("{kind}: not monotone {errs:?}"))?;
        ensure((-1.3..=-0.7).contains(&slope), || format!("{kind}: slope {slope}"))?;
        notes.push(format!("{kind} slope {slope:.3}"));
    }
    let params = nmr_generate(NmrKind::One, DEFAULT_SEED, &NmrOverrides::default()).unwrap();
    let p = &params.problem;
    let mesh = build_mesh_with(p.interval.0, p.interval.1, 200, MeshRule::RightEndpoint).unwrap();
    let exact = analytic_nmr1(&mesh, &params).values;
    let ode = rk45_reference(p, &mesh, 1e-10, 1e-12).unwrap().values;
    let d = exact.iter().zip(&ode).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    ensure(d < 1e-7, || format!("nmr1 analytic vs RK45: {d:e}"))?;
    notes.push(format!("nmr1 analytic vs RK45 {d:.1e}"));
    Ok(notes.join(", "))
}

fn c8() -> Check {
    let (code, doc) =
        cli_json(&["ttranks", "--problem", "nmr1", "--M", "500", "--tol-tt", "1e-10", "--allow-large", "--format", "json"]);
    ensure(code == 0, || format!("exit code {code}"))?;
    let ranks: Vec<u64> = doc[0]["ranks"].as_array().map(|r| r.iter().filter_map(Value::as_u64).collect()).unwrap_or_default();
    ensure(ranks.len() == 5 && ranks[1] == 16 && ranks[2] <= 3, || format!("ranks {ranks:?}"))?;

    let cf: f64 = 747768.0 / 2004000.0;
    ensure((cf - 0.37314).abs() < 5e-6, || format!("C.F. {cf}"))?;

    let params = nmr_generate(NmrKind::One, DEFAULT_SEED, &NmrOverrides::default()).unwrap();
    let p = &params.problem;
    let mesh = build_mesh_with(p.interval.0, p.interval.1, 40, MeshRule::RightEndpoint).unwrap();
    let mut g = rng(8);
    let tensors = [discretize_problem(p, &mesh).unwrap(), random_tensor(&mut g, 3, 2, 5), random_tensor(&mut g, 2, 4, 3)];
    for a in &tensors {
        for tol in [1e-3, 1e-5, 1e-10] {
            let t = tt_svd(a, tol).unwrap();
            let bounds = rank_bounds(t.mode_sizes);
            ensure(t.ranks.iter().zip(&bounds).all(|(r, b)| r <= b), || format!("{:?} exceeds {bounds:?}", t.ranks))?;
            let back = tt_reconstruct(&t).unwrap();
            let e = to_block_matrix(&back.sub(a).unwrap()).norm() / to_block_matrix(a).norm();
            ensure(e <= tol, || format!("reconstruction {e:e} > {tol:e}"))?;
        }
    }
    Ok(format!("M=500 ranks {ranks:?}, C.F. {cf:.5}, bounds and reconstruction hold"))
}

/// A cyclic shift: `A e₀ = e₂`, `e₀ᵀ A = e₁ᵀ`, so the first residuals are
/// orthogonal while `e₀ᵀ U e₀` still picks up every third power.
fn sparse_cycle() -> Problem {
    let e0 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let mut p = Problem::new("cycle", 3, (0.0, 2.0), e0.clone(), e0).unwrap();
    p.push_term(0, 1, Term::constant(1.0)).unwrap();
    p.push_term(1, 2, Term::constant(1.0)).unwrap();
    p.push_term(2, 0, Term::constant(1.0)).unwrap();
    p
}

fn c9() -> Check {
    let p = sparse_cycle();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cycle.json");
    std::fs::write(&file, p.to_json().unwrap()).unwrap();
    let (code, _) = cli(&["run", "--problem-file", file.to_str().unwrap(), "--M", "8", "--n", "3", "--reference", "none"]);
    ensure(code == 5, || format!("exit code {code}, expected 5"))?;

    let mesh = build_mesh_with(0.0, 2.0, 8, MeshRule::RightEndpoint).unwrap();
    let a = discretize_problem(&p, &mesh).unwrap();
    let solve = |w: &[C64], v: &[C64]| {
        let r = tensor_lanczos(&a, v, w, 3, &LanczosOptions::default()).unwrap();
        approx_solution(&r.tri, &mesh, r.normalization).unwrap().values
    };
    let mut worst = 0.0f64;
    for (i, j) in [(0, 0), (1, 1), (2, 2)] {
        let mut unit = vec![vec![C64::new(0.0, 0.0); 3]; 2];
        unit[0][i] = C64::new(1.0, 0.0);
        unit[1][j] = C64::new(1.0, 0.0);
        let direct = oracle::neumann_solution(&a, &unit[1], &unit[0], &mesh).unwrap();
        let [(w1, v1), (w2, v2)] = split_unit_vectors(i, j, 3).unwrap();
        let (s1, s2) = (solve(&w1, &v1), solve(&w2, &v2));
        let diff: Vec<C64> = s1.iter().zip(&s2).map(|(a, b)| a - b).collect();
        let e = err_solution(&direct, &diff).unwrap();
        ensure(e < 1e-8, || format!("split recovery ({i}, {j}): {e:e}"))?;
        worst = worst.max(e);
    }
    Ok(format!("exit 5, split recovery within {worst:.1e}"))
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn c10() -> Check {
    let commands: &[&[&str]] = &[
        &["convergence", "--problem", "const3", "--M", "10,100"],
        &["convergence", "--problem", "const3", "--M", "10,100", "--format", "json"],
        &["run", "--problem", "timedep5", "--M", "10", "--reference", "rk45", "--rtol", "1e-10"],
        &["convergence", "--problem", "nmr2", "--M", "5,50"],
        &["convergence", "--problem", "nmr3", "--M", "5,50", "--format", "json"],
        &["ttranks", "--problem", "nmr1", "--M", "100", "--tol-tt", "1e-5,1e-10"],
        &["ttranks", "--problem", "nmr1", "--M", "100", "--format", "json"],
    ];
    for args in commands {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let mut full: Vec<&str> = args.to_vec();
            let d = dir.path().to_str().unwrap().to_string();
            full.extend(["--output", &d]);
            let (code, stdout) = cli(&full);
            ensure(code == 0, || format!("{}: exit {code}", args.join(" ")))?;
            outputs.push((stdout, read_dir(dir.path())));
        }
        ensure(!outputs[0].1.is_empty(), || format!("{}: no files written", args.join(" ")))?;
        ensure(outputs[0] == outputs[1], || format!("{}: outputs differ", args.join(" ")))?;
    }
    Ok(format!("{} commands byte-identical across reruns", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("const3 error table", c1),
        ("timedep5 error table", c2),
        ("const3 recurrence, biorthogonality and moment measures", c3),
        ("random-problem recurrences and moments", c4),
        ("product algebra and flattening", c5),
        ("continued fraction vs Neumann series", c6),
        ("NMR first-order convergence", c7),
        ("tensor-train ranks and compression", c8),
        ("serious breakdown and split recovery", c9),
        ("determinism", c10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str()) || *s == k.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {k}: {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {k}: {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
