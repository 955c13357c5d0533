use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::nmr::{NmrKind, NmrParams};
use super::{Reference, ReferenceKind};
use crate::discretize::Mesh;

/// `(exp(A t))₀₀` for the `const3` matrix.
pub fn const3_closed_form(t: f64) -> f64 {
    -0.5 * (2.0 * t).sinh() + 0.5 * (2.0 * t).cosh() + 0.5 * (2f64.sqrt() * t).cosh()
}

fn sampled(mesh: &Mesh, f: impl Fn(f64) -> C64) -> Reference {
    Reference { kind: ReferenceKind::Analytic, tau: mesh.tau.clone(), values: mesh.tau.iter().map(|&t| f(t)).collect() }
}

pub fn analytic_const3(mesh: &Mesh) -> Reference {
    sampled(mesh, |t| C64::new(const3_closed_form(t), 0.0))
}

/// `exp(sin t)`, the solution for `A(t) = [cos t]`.
pub fn analytic_cos1(mesh: &Mesh) -> Reference {
    sampled(mesh, |t| C64::new(t.sin().exp(), 0.0))
}

/// `wᴴ U(t) v` for a kind-1 problem, whose propagator is diagonal with
/// phases given by the exact integral of each diagonal entry.
///
/// # Panics
///
/// If `params` is not of kind 1.
pub fn analytic_nmr1(mesh: &Mesh, params: &NmrParams) -> Reference {
    assert_eq!(params.kind, NmrKind::One, "closed form exists for kind 1 only");
    let p = &params.problem;
    let (t0, nu) = (p.interval.0, params.nu);
    let phase = |k: usize, t: f64| {
        let w1 = 2.0 * PI * nu;
        let w2 = 4.0 * PI * nu;
        params.alpha[k] * (t - t0)
            + params.beta[k] / w1 * ((w1 * t).sin() - (w1 * t0).sin())
            + params.gamma[k] / w2 * ((w2 * t).sin() - (w2 * t0).sin())
    };
    sampled(mesh, |t| {
        (0..p.n).map(|k| p.w[k].conj() * p.v[k] * C64::from_polar(1.0, -2.0 * PI * phase(k, t))).sum()
    })
}
