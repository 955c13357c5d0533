//! Symbolic matrix-valued functions `A(t)`, the built-in test problems and
//! reference solutions.
//!
//! Entry `(k, l)` of `A(t)` is a sum of terms `c · t^p · g(ω t)` with
//! `g ∈ {1, cos, sin}`. Indices are 0-based throughout the API and in the
//! JSON format.

mod analytic;
mod nmr;
mod rk45;

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::discretize::Mesh;
use crate::{Error, Result};

pub use analytic::{analytic_const3, analytic_cos1, analytic_nmr1, const3_closed_form};
pub use nmr::{nmr_generate, NmrKind, NmrOverrides, NmrParams, DEFAULT_SEED};
pub use rk45::{rk45_reference, rk45_solve, DEFAULT_ATOL, DEFAULT_RTOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    None,
    Cos,
    Sin,
}

/// `coeff · t^power · trig(omega · t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "TermRepr", into = "TermRepr")]
pub struct Term {
    pub coeff: C64,
    pub power: u32,
    pub trig: Trig,
    pub omega: f64,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    re: f64,
    #[serde(default)]
    im: f64,
    #[serde(default)]
    power: u32,
    #[serde(default = "default_trig")]
    trig: Trig,
    #[serde(default)]
    omega: f64,
}

fn default_trig() -> Trig {
    Trig::None
}

impl From<TermRepr> for Term {
    fn from(r: TermRepr) -> Self {
        Term { coeff: C64::new(r.re, r.im), power: r.power, trig: r.trig, omega: r.omega }
    }
}

impl From<Term> for TermRepr {
    fn from(t: Term) -> Self {
        TermRepr { re: t.coeff.re, im: t.coeff.im, power: t.power, trig: t.trig, omega: t.omega }
    }
}

impl Term {
    pub fn constant(c: impl Into<C64>) -> Self {
        Term { coeff: c.into(), power: 0, trig: Trig::None, omega: 0.0 }
    }

    pub fn monomial(c: impl Into<C64>, power: u32) -> Self {
        Term { coeff: c.into(), power, trig: Trig::None, omega: 0.0 }
    }

    pub fn cos(c: impl Into<C64>, omega: f64) -> Self {
        Term { coeff: c.into(), power: 0, trig: Trig::Cos, omega }
    }

    pub fn sin(c: impl Into<C64>, omega: f64) -> Self {
        Term { coeff: c.into(), power: 0, trig: Trig::Sin, omega }
    }

    pub fn eval(&self, t: f64) -> C64 {
        let g = match self.trig {
            Trig::None => 1.0,
            Trig::Cos => (self.omega * t).cos(),
            Trig::Sin => (self.omega * t).sin(),
        };
        let p = if self.power == 0 { 1.0 } else { t.powi(self.power as i32) };
        self.coeff * (p * g)
    }
}

/// Complex number as `{re, im}` in JSON.
#[derive(Clone, Copy, Serialize, Deserialize)]
struct Cx {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    k: usize,
    l: usize,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct ProblemRepr {
    id: String,
    n: usize,
    interval: [f64; 2],
    v: Vec<Cx>,
    w: Vec<Cx>,
    entries: Vec<EntryRepr>,
}

/// A matrix-valued function on an interval together with the vectors of the
/// bilinear form `wᴴ U(t) v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemRepr", into = "ProblemRepr")]
pub struct Problem {
    pub id: String,
    pub n: usize,
    pub interval: (f64, f64),
    entries: BTreeMap<(usize, usize), Vec<Term>>,
    pub v: Vec<C64>,
    pub w: Vec<C64>,
}

impl TryFrom<ProblemRepr> for Problem {
    type Error = Error;

    fn try_from(r: ProblemRepr) -> Result<Self> {
        let mut p = Problem::new(
            r.id,
            r.n,
            (r.interval[0], r.interval[1]),
            r.v.iter().map(|c| C64::new(c.re, c.im)).collect(),
            r.w.iter().map(|c| C64::new(c.re, c.im)).collect(),
        )?;
        for e in r.entries {
            for t in e.terms {
                p.push_term(e.k, e.l, t)?;
            }
        }
        Ok(p)
    }
}

impl From<Problem> for ProblemRepr {
    fn from(p: Problem) -> Self {
        let cx = |v: &[C64]| v.iter().map(|z| Cx { re: z.re, im: z.im }).collect();
        ProblemRepr {
            v: cx(&p.v),
            w: cx(&p.w),
            id: p.id,
            n: p.n,
            interval: [p.interval.0, p.interval.1],
            entries: p.entries.into_iter().map(|((k, l), terms)| EntryRepr { k, l, terms }).collect(),
        }
    }
}

impl Problem {
    pub fn new(id: impl Into<String>, n: usize, interval: (f64, f64), v: Vec<C64>, w: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("problem size must be at least 1".into()));
        }
        if v.len() != n || w.len() != n {
            return Err(Error::Input(format!("v and w must have length {n}, got {} and {}", v.len(), w.len())));
        }
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Input(format!("invalid interval [{a}, {b}]")));
        }
        Ok(Problem { id: id.into(), n, interval, entries: BTreeMap::new(), v, w })
    }

    pub fn push_term(&mut self, k: usize, l: usize, t: Term) -> Result<()> {
        if k >= self.n || l >= self.n {
            return Err(Error::Input(format!("entry ({k}, {l}) outside a {0}×{0} problem", self.n)));
        }
        if !(t.coeff.re.is_finite() && t.coeff.im.is_finite() && t.omega.is_finite()) {
            return Err(Error::Input(format!("non-finite term in entry ({k}, {l})")));
        }
        self.entries.entry((k, l)).or_default().push(t);
        Ok(())
    }

    /// Terms of entry `(k, l)`; empty for structurally zero entries.
    pub fn entry(&self, k: usize, l: usize) -> &[Term] {
        self.entries.get(&(k, l)).map_or(&[], Vec::as_slice)
    }

    /// Structurally nonzero entries in row-major order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = ((usize, usize), &[Term])> {
        self.entries.iter().filter(|(_, ts)| !ts.is_empty()).map(|(kl, ts)| (*kl, ts.as_slice()))
    }

    pub fn eval_entry(&self, k: usize, l: usize, t: f64) -> C64 {
        self.entry(k, l).iter().fold(C64::new(0.0, 0.0), |acc, term| acc + term.eval(t))
    }

    pub fn eval(&self, t: f64) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for ((k, l), _) in self.nonzero_entries() {
            out[(k, l)] = self.eval_entry(k, l, t);
        }
        out
    }

    /// `wᴴv`.
    pub fn wv(&self) -> C64 {
        self.w.iter().zip(&self.v).map(|(w, v)| w.conj() * v).sum()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// How a reference solution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ReferenceKind {
    Analytic,
    Rk45 { rtol: f64, atol: f64 },
}

/// Samples `ŝ_i ≈ wᴴ U(τ_i) v` on a mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub kind: ReferenceKind,
    pub tau: Vec<f64>,
    pub values: Vec<C64>,
}

pub const BUILTIN_IDS: &[&str] = &["const3", "timedep5", "nmr1", "nmr2", "nmr3", "zero1", "cos1"];

fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); n];
    e[i] = C64::new(1.0, 0.0);
    e
}

/// The built-in problems.
///
/// * `const3`: constant 3×3 matrix `[[-1,1,1],[1,0,1],[1,1,-1]]`, `v = w = e₀`, `[0, 1]`.
/// * `timedep5`: a 5×5 polynomial/cosine matrix, `v = w = e₀`, `[1e-4, 1]`.
/// * `nmr1`..`nmr3`: seeded spin-system Hamiltonians, see [`nmr_generate`].
/// * `zero1`: `A ≡ [0]` on `[0, 1]`.
/// * `cos1`: `A(t) = [cos t]` on `[0, 1]`, with `U(t) = exp(sin t)`.
pub fn builtin(id: &str) -> Result<Problem> {
    match id {
        "const3" => const3(),
        "timedep5" => timedep5(),
        "nmr1" => nmr_generate(NmrKind::One, DEFAULT_SEED, &NmrOverrides::default()).map(|p| p.problem),
        "nmr2" => nmr_generate(NmrKind::Two, DEFAULT_SEED, &NmrOverrides::default()).map(|p| p.problem),
        "nmr3" => nmr_generate(NmrKind::Three, DEFAULT_SEED, &NmrOverrides::default()).map(|p| p.problem),
        "zero1" => Problem::new("zero1", 1, (0.0, 1.0), unit(1, 0), unit(1, 0)),
        "cos1" => {
            let mut p = Problem::new("cos1", 1, (0.0, 1.0), unit(1, 0), unit(1, 0))?;
            p.push_term(0, 0, Term::cos(1.0, 1.0))?;
            Ok(p)
        }
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

fn const3() -> Result<Problem> {
    let a = [[-1.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, -1.0]];
    let mut p = Problem::new("const3", 3, (0.0, 1.0), unit(3, 0), unit(3, 0))?;
    for (k, row) in a.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            if x != 0.0 {
                p.push_term(k, l, Term::constant(x))?;
            }
        }
    }
    Ok(p)
}

fn timedep5() -> Result<Problem> {
    use Term as T;
    let cos = || T::cos(1.0, 1.0);
    let t = |c: f64| T::monomial(c, 1);
    let c = |x: f64| T::constant(x);
    let rows: [[Vec<Term>; 5]; 5] = [
        [vec![cos()], vec![], vec![c(1.0)], vec![c(2.0)], vec![c(1.0)]],
        [vec![], vec![cos(), t(-1.0)], vec![c(1.0), t(-3.0)], vec![t(1.0)], vec![]],
        [vec![], vec![t(1.0)], vec![t(2.0), cos()], vec![], vec![]],
        [vec![], vec![c(1.0)], vec![t(2.0), c(1.0)], vec![t(1.0), cos()], vec![t(1.0)]],
        [vec![t(1.0)], vec![t(-1.0), c(-1.0)], vec![t(-6.0), c(-1.0)], vec![c(1.0), t(-2.0)], vec![cos(), t(-2.0)]],
    ];
    let mut p = Problem::new("timedep5", 5, (1e-4, 1.0), unit(5, 0), unit(5, 0))?;
    for (k, row) in rows.into_iter().enumerate() {
        for (l, terms) in row.into_iter().enumerate() {
            for term in terms {
                p.push_term(k, l, term)?;
            }
        }
    }
    Ok(p)
}

/// The reference attached to a problem when one exists in closed form.
pub fn analytic_reference(p: &Problem, mesh: &Mesh) -> Option<Reference> {
    match p.id.as_str() {
        "const3" if *p == const3().ok()? => Some(analytic_const3(mesh)),
        "cos1" if *p == builtin("cos1").ok()? => Some(analytic_cos1(mesh)),
        "zero1" if *p == builtin("zero1").ok()? => Some(Reference {
            kind: ReferenceKind::Analytic,
            tau: mesh.tau.clone(),
            values: vec![p.wv(); mesh.m],
        }),
        "nmr1" => {
            let params = nmr_generate(NmrKind::One, DEFAULT_SEED, &NmrOverrides::default()).ok()?;
            (params.problem == *p).then(|| analytic_nmr1(mesh, &params))
        }
        _ => None,
    }
}
