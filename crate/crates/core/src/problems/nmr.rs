//! Seeded spin-system Hamiltonians on four spins (`N = 16`), with
//! `A(t) = -2πi · H(t)`.
//!
//! Coefficients are drawn uniformly from fixed ranges with a ChaCha stream,
//! so a seed fully determines the problem.
//!
//! | kind | `H(t)` | interval |
//! |------|--------|----------|
//! | 1 | `diag(α + β cos 2πνt + γ cos 4πνt)` | `[0, 5e-5]` |
//! | 2 | `diag(α) + B cos 2πνt + C cos 4πνt` | `[0, 5e-6]` |
//! | 3 | `diag(α) + B p(t) + C q(t)` | `[0, 1e-3]` |
//!
//! with `p(t) = 0.5 + cos 4t + sin 10t − 0.4 sin 16t` and
//! `q(t) = sin 4t + cos 8t + 2 sin 12t`. `B` is real symmetric; `C` is real
//! symmetric for kind 2 and Hermitian for kind 3. Kind 2 couples basis states
//! that differ by a flip-flop of two spins, kind 3 states that differ by a
//! single spin flip.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Problem, Term};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 7;
const N: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NmrKind {
    One,
    Two,
    Three,
}

impl NmrKind {
    pub fn from_index(k: u32) -> Result<Self> {
        match k {
            1 => Ok(NmrKind::One),
            2 => Ok(NmrKind::Two),
            3 => Ok(NmrKind::Three),
            _ => Err(Error::Input(format!("NMR kind must be 1, 2 or 3, got {k}"))),
        }
    }

    pub fn default_interval(self) -> (f64, f64) {
        match self {
            NmrKind::One => (0.0, 5e-5),
            NmrKind::Two => (0.0, 5e-6),
            NmrKind::Three => (0.0, 1e-3),
        }
    }

    /// Lanczos iterations used for this experiment.
    pub fn default_iterations(self) -> usize {
        match self {
            NmrKind::One => 3,
            NmrKind::Two | NmrKind::Three => 4,
        }
    }

    fn id(self) -> &'static str {
        match self {
            NmrKind::One => "nmr1",
            NmrKind::Two => "nmr2",
            NmrKind::Three => "nmr3",
        }
    }

    /// Whether basis states `i` and `j` are coupled by `B` and `C`.
    pub fn coupled(self, i: usize, j: usize) -> bool {
        let d = i ^ j;
        match self {
            NmrKind::One => i == j,
            NmrKind::Two => i == j || (d.count_ones() == 2 && (i & d).count_ones() == 1),
            NmrKind::Three => d.count_ones() <= 1,
        }
    }
}

/// Replacements for the random draws and defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NmrOverrides {
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub nu: Option<f64>,
    pub interval: Option<(f64, f64)>,
    pub v: Option<Vec<C64>>,
    pub w: Option<Vec<C64>>,
}

/// A generated problem together with the coefficients behind it.
///
/// `beta` and `gamma` are only populated for kind 1, where they are the
/// diagonal modulation amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct NmrParams {
    pub kind: NmrKind,
    pub seed: u64,
    pub nu: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub problem: Problem,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn check_len(name: &str, v: &[f64]) -> Result<()> {
    if v.len() != N {
        return Err(Error::Input(format!("override `{name}` must have {N} entries, got {}", v.len())));
    }
    Ok(())
}

/// Upper triangle of a coupling matrix, row-major, mirrored on use.
fn coupling(kind: NmrKind, rng: &mut ChaCha8Rng, scale: f64, complex: bool) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for i in 0..N {
        for j in i..N {
            if kind.coupled(i, j) {
                let re = rng.random_range(-scale..scale);
                let im = if complex && i != j { rng.random_range(-scale..scale) } else { 0.0 };
                out.push((i, j, C64::new(re, im)));
            }
        }
    }
    out
}

/// Builds the kind-`kind` problem for `seed`.
pub fn nmr_generate(kind: NmrKind, seed: u64, ov: &NmrOverrides) -> Result<NmrParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nu = ov.nu.unwrap_or(1e4);
    let (a_lo, a_hi, scale) = match kind {
        NmrKind::One => (2000.0, 6000.0, 1000.0),
        NmrKind::Two => (2e4, 6e4, 1e4),
        NmrKind::Three => (100.0, 300.0, 60.0),
    };
    let alpha = uniform(&mut rng, a_lo, a_hi, N);
    let alpha = ov.alpha.clone().unwrap_or(alpha);
    check_len("alpha", &alpha)?;

    let ones = vec![C64::new(1.0, 0.0); N];
    let pattern: Vec<C64> = (0..N).map(|i| C64::new(if i % 3 == 0 { 0.0 } else { 1.0 }, 0.0)).collect();
    let default_v = if kind == NmrKind::Three { ones } else { pattern };
    let v = ov.v.clone().unwrap_or_else(|| default_v.clone());
    let w = ov.w.clone().unwrap_or(default_v);

    let mut p = Problem::new(kind.id(), N, ov.interval.unwrap_or(kind.default_interval()), v, w)?;
    let s = C64::new(0.0, -2.0 * PI);
    let (w1, w2) = (2.0 * PI * nu, 4.0 * PI * nu);
    let (mut beta, mut gamma) = (Vec::new(), Vec::new());

    match kind {
        NmrKind::One => {
            beta = ov.beta.clone().unwrap_or(uniform(&mut rng, -scale, scale, N));
            gamma = ov.gamma.clone().unwrap_or(uniform(&mut rng, -scale, scale, N));
            check_len("beta", &beta)?;
            check_len("gamma", &gamma)?;
            for k in 0..N {
                p.push_term(k, k, Term::constant(s * alpha[k]))?;
                p.push_term(k, k, Term::cos(s * beta[k], w1))?;
                p.push_term(k, k, Term::cos(s * gamma[k], w2))?;
            }
        }
        NmrKind::Two | NmrKind::Three => {
            let b = coupling(kind, &mut rng, scale, false);
            let c = coupling(kind, &mut rng, scale, kind == NmrKind::Three);
            for k in 0..N {
                p.push_term(k, k, Term::constant(s * alpha[k]))?;
            }
            let mut add = |i: usize, j: usize, x: C64, shape: &dyn Fn(C64) -> Vec<Term>| -> Result<()> {
                for t in shape(s * x) {
                    p.push_term(i, j, t)?;
                }
                if i != j {
                    for t in shape(s * x.conj()) {
                        p.push_term(j, i, t)?;
                    }
                }
                Ok(())
            };
            let (shape_b, shape_c): (Box<dyn Fn(C64) -> Vec<Term>>, Box<dyn Fn(C64) -> Vec<Term>>) = match kind {
                NmrKind::Two => (Box::new(move |x| vec![Term::cos(x, w1)]), Box::new(move |x| vec![Term::cos(x, w2)])),
                _ => (
                    Box::new(|x| {
                        vec![Term::constant(x * 0.5), Term::cos(x, 4.0), Term::sin(x, 10.0), Term::sin(x * -0.4, 16.0)]
                    }),
                    Box::new(|x| vec![Term::sin(x, 4.0), Term::cos(x, 8.0), Term::sin(x * 2.0, 12.0)]),
                ),
            };
            for &(i, j, x) in &b {
                add(i, j, x, shape_b.as_ref())?;
            }
            for &(i, j, x) in &c {
                add(i, j, x, shape_c.as_ref())?;
            }
        }
    }
    Ok(NmrParams { kind, seed, nu, alpha, beta, gamma, problem: p })
}
