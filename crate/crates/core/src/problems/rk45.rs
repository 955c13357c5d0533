//! Adaptive Dormand–Prince 5(4) integration of `u' = A(t) u` with the
//! fourth-order continuous extension for output between steps.

use num_complex::Complex64 as C64;

use super::{Problem, Reference, ReferenceKind, Term};
use crate::discretize::Mesh;
use crate::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;
const MAX_STEPS: usize = 50_000_000;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

struct Rhs<'a> {
    n: usize,
    entries: Vec<(usize, usize, &'a [Term])>,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, y: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for &(k, l, terms) in &self.entries {
            let a: C64 = terms.iter().map(|term| term.eval(t)).sum();
            out[k] += a * y[l];
        }
        debug_assert_eq!(out.len(), self.n);
    }
}

fn err_norm(e: &[C64], y0: &[C64], y1: &[C64], rtol: f64, atol: f64) -> f64 {
    let s: f64 = e
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (s / e.len() as f64).sqrt()
}

/// Integrates `u' = A(t) u`, `u(a) = v` and returns `u` at every `t` in
/// `t_out` (non-decreasing, within the problem interval).
pub fn rk45_solve(p: &Problem, t_out: &[f64], rtol: f64, atol: f64) -> Result<Vec<Vec<C64>>> {
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(Error::Input(format!("tolerances must be positive, got rtol = {rtol}, atol = {atol}")));
    }
    let (t0, t1) = p.interval;
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.iter().any(|&t| t < t0 || t > t1 * (1.0 + 1e-15) + 1e-300) {
        return Err(Error::Input("output times must be non-decreasing and inside the interval".into()));
    }
    let n = p.n;
    let rhs = Rhs { n, entries: p.nonzero_entries().map(|((k, l), ts)| (k, l, ts)).collect() };
    let t_end = t_out.last().copied().unwrap_or(t0);
    let mut out = Vec::with_capacity(t_out.len());
    let mut next = 0;
    let mut t = t0;
    let mut y = p.v.clone();
    while next < t_out.len() && t_out[next] <= t0 {
        out.push(y.clone());
        next += 1;
    }
    if next == t_out.len() {
        return Ok(out);
    }

    let zero = vec![C64::new(0.0, 0.0); n];
    let mut k: Vec<Vec<C64>> = vec![zero.clone(); 7];
    rhs.eval(t, &y, &mut k[0]);
    let mut h = initial_step(&rhs, t, &y, &k[0], t_end - t0, rtol, atol);
    let mut ytmp = zero.clone();
    let mut y1 = zero.clone();
    let mut errv = zero.clone();
    let mut steps = 0;

    while next < t_out.len() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Stiff { t });
        }
        if h < 16.0 * f64::EPSILON * t.abs().max(1e-300) {
            return Err(Error::Stiff { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += kj[i] * (h * A[s][j]);
                }
                ytmp[i] = acc;
            }
            rhs.eval(t + C[s] * h, &ytmp, &mut k[s]);
        }
        // Stage 7 is evaluated at the fifth-order solution.
        y1.copy_from_slice(&ytmp);
        for i in 0..n {
            errv[i] = (0..7).map(|j| k[j][i] * (h * E[j])).sum();
        }
        let err = err_norm(&errv, &y, &y1, rtol, atol);
        if err <= 1.0 {
            let t_new = if last { t_end } else { t + h };
            while next < t_out.len() && t_out[next] <= t_new {
                let theta = ((t_out[next] - t) / h).clamp(0.0, 1.0);
                out.push(dense(&y, &y1, &k, h, theta));
                next += 1;
            }
            t = t_new;
            y.copy_from_slice(&y1);
            let k7 = k[6].clone();
            k[0] = k7;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 1.0) } else { 0.1 };
            h *= fac;
        }
    }
    Ok(out)
}

fn dense(y0: &[C64], y1: &[C64], k: &[Vec<C64>], h: f64, theta: f64) -> Vec<C64> {
    let th1 = 1.0 - theta;
    (0..y0.len())
        .map(|i| {
            let ydiff = y1[i] - y0[i];
            let bspl = k[0][i] * h - ydiff;
            let r4 = ydiff - k[6][i] * h - bspl;
            let r5: C64 = (0..7).map(|j| k[j][i] * D[j]).sum::<C64>() * h;
            y0[i] + (ydiff + (bspl + (r4 + r5 * th1) * theta) * th1) * theta
        })
        .collect()
}

fn initial_step(rhs: &Rhs, t: f64, y: &[C64], f0: &[C64], span: f64, rtol: f64, atol: f64) -> f64 {
    let norm = |v: &[C64]| {
        let s: f64 = v.iter().zip(y).map(|(x, y)| (x.norm() / (atol + rtol * y.norm())).powi(2)).sum();
        (s / v.len() as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<C64> = y.iter().zip(f0).map(|(y, f)| y + f * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
    rhs.eval(t + h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}

/// `ŝ_i = wᴴ u(τ_i)` from an adaptive integration.
pub fn rk45_reference(p: &Problem, mesh: &Mesh, rtol: f64, atol: f64) -> Result<Reference> {
    let us = rk45_solve(p, &mesh.tau, rtol, atol)?;
    let values = us.iter().map(|u| p.w.iter().zip(u).map(|(w, u)| w.conj() * u).sum()).collect();
    Ok(Reference { kind: ReferenceKind::Rk45 { rtol, atol }, tau: mesh.tau.clone(), values })
}
