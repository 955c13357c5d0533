//! The tensor non-Hermitian Lanczos process.
//!
//! Starting from `V₁ = v ⊗ I` and `W₁ᴰ = w̄ ⊗ I` with `wᴴv = 1`, each step
//! computes
//!
//! ```text
//! α_k      = W_kᴰ ⋆ A ⋆ V_k
//! Ŵ_{k+1}ᴰ = W_kᴰ ⋆ A − α_k × W_kᴰ − β_k × W_{k−1}ᴰ
//! V̂_{k+1}  = A ⋆ V_k − V_k × α_k − V_{k−1} × γ_k
//! β_{k+1}  = γ_{k+1}⁻¹ (Ŵ_{k+1}ᴰ ⋆ V̂_{k+1})
//! V_{k+1}  = V̂_{k+1} × β_{k+1}⁻¹,   W_{k+1}ᴰ = γ_{k+1}⁻¹ × Ŵ_{k+1}ᴰ
//! ```
//!
//! After the last step the unnormalized `V̂_{n+1}` and `Ŵ_{n+1}ᴰ` are kept
//! as the residual terms of the three-term recurrence.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::tensor::{
    lift, lift_dual, scale_v, star_inner, star_mul_tv, star_mul_vt, Block, HyperVec, MatM, Orientation, RightSolver,
    Side, Tensor4,
};
use crate::{Error, Result};

pub const DEFAULT_EPS_LUCKY: f64 = 1e-13;
pub const DEFAULT_EPS_SERIOUS: f64 = 1e13;

/// Choice of the free scaling `γ_{k+1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRule {
    /// `γ_{k+1} = I`: no rescaling.
    #[default]
    Identity,
    /// `γ_{k+1} = c · I`.
    Scalar(C64),
}

impl GammaRule {
    fn gamma(self, m: usize) -> MatM {
        match self {
            GammaRule::Identity => MatM::identity(m),
            GammaRule::Scalar(c) => MatM::identity(m).scale(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    pub gamma_rule: GammaRule,
    pub eps_lucky: f64,
    pub eps_serious: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { gamma_rule: GammaRule::Identity, eps_lucky: DEFAULT_EPS_LUCKY, eps_serious: DEFAULT_EPS_SERIOUS }
    }
}

/// Block-tridiagonal coefficients. `betas[i]` and `gammas[i]` hold
/// `β_{i+2}` and `γ_{i+2}` in 1-based iteration numbering.
#[derive(Clone, Debug, PartialEq)]
pub struct TriTensor {
    pub n: usize,
    pub m: usize,
    pub alphas: Vec<MatM>,
    pub betas: Vec<MatM>,
    pub gammas: Vec<MatM>,
}

impl TriTensor {
    pub fn new(alphas: Vec<MatM>, betas: Vec<MatM>, gammas: Vec<MatM>) -> Result<Self> {
        let n = alphas.len();
        if n == 0 || betas.len() + 1 != n || gammas.len() + 1 != n {
            return Err(Error::shape(
                "TriTensor::new",
                format!("{} alphas, {} betas, {} gammas", n, betas.len(), gammas.len()),
            ));
        }
        let m = alphas[0].m();
        if alphas.iter().chain(&betas).chain(&gammas).any(|x| x.m() != m) {
            return Err(Error::shape("TriTensor::new", "coefficient sizes differ"));
        }
        Ok(TriTensor { n, m, alphas, betas, gammas })
    }

    /// The leading `k` iterations.
    pub fn truncated(&self, k: usize) -> TriTensor {
        let k = k.clamp(1, self.n);
        TriTensor {
            n: k,
            m: self.m,
            alphas: self.alphas[..k].to_vec(),
            betas: self.betas[..k - 1].to_vec(),
            gammas: self.gammas[..k - 1].to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownSide {
    V,
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum LanczosStatus {
    Completed,
    /// A residual vanished after `iteration` steps; the bases span an
    /// invariant subspace and the result is exact up to discretization.
    LuckyBreakdown { iteration: usize, side: BreakdownSide },
    /// `β_{iteration+1}` was numerically singular.
    SeriousBreakdown { iteration: usize, condition: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Breakdown {
    None,
    Lucky(BreakdownSide),
    Serious { condition: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LanczosResult {
    pub tri: TriTensor,
    pub v_basis: Vec<HyperVec>,
    pub w_basis: Vec<HyperVec>,
    /// `V̂_{n+1} = V_{n+1} × β_{n+1}`.
    pub residual_v: HyperVec,
    /// `Ŵ_{n+1}ᴰ = γ_{n+1} × W_{n+1}ᴰ`.
    pub residual_w: HyperVec,
    pub status: LanczosStatus,
    /// `wᴴv` of the caller's vectors; `v` was divided by it.
    pub normalization: C64,
    pub gamma_rule: GammaRule,
}

/// Decides whether the step that produced `v_hat`, `w_hat` and `beta` broke
/// down. A vanishing residual (relative to the previous basis vector) is a
/// lucky breakdown and takes precedence over an ill-conditioned `beta`.
pub fn classify_breakdown(
    v_hat: &HyperVec,
    w_hat: &HyperVec,
    v_prev_norm: f64,
    w_prev_norm: f64,
    beta: &MatM,
    eps_lucky: f64,
    eps_serious: f64,
) -> Breakdown {
    if v_hat.frobenius() < eps_lucky * v_prev_norm {
        return Breakdown::Lucky(BreakdownSide::V);
    }
    if w_hat.frobenius() < eps_lucky * w_prev_norm {
        return Breakdown::Lucky(BreakdownSide::W);
    }
    let condition = beta.condition_number();
    if !(condition <= eps_serious) {
        return Breakdown::Serious { condition };
    }
    Breakdown::None
}

fn solve_blocks(v: &HyperVec, f: impl Fn(&MatM) -> Result<MatM> + Sync, keeps_lower: bool) -> Result<HyperVec> {
    let blocks = v
        .blocks()
        .par_iter()
        .map(|b| match b {
            Block::Zero => Ok(Block::Zero),
            Block::Lower(x) if keeps_lower => Ok(Block::Lower(f(x)?)),
            Block::Lower(x) | Block::Dense(x) => Ok(Block::Dense(f(x)?)),
        })
        .collect::<Result<Vec<_>>>()?;
    HyperVec::from_blocks(v.m(), v.orientation(), blocks)
}

/// Runs `n` steps of the tensor Lanczos process on `a` with starting
/// vectors `v`, `w`.
///
/// A lucky breakdown ends the run early with `Ok` and the status set. A
/// serious breakdown returns [`Error::SeriousBreakdown`] carrying the
/// iterations completed so far.
pub fn tensor_lanczos(a: &Tensor4, v: &[C64], w: &[C64], n: usize, opts: &LanczosOptions) -> Result<LanczosResult> {
    let (nn, n2, m) = a.dims();
    if nn != n2 {
        return Err(Error::shape("tensor_lanczos", format!("outer modes {nn}×{n2} are not square")));
    }
    if v.len() != nn || w.len() != nn {
        return Err(Error::shape("tensor_lanczos", format!("vectors of length {}, {} for N = {nn}", v.len(), w.len())));
    }
    if n == 0 {
        return Err(Error::Input("at least one iteration is required".into()));
    }
    let wv: C64 = w.iter().zip(v).map(|(w, v)| w.conj() * v).sum();
    if wv == C64::new(0.0, 0.0) || !wv.is_finite() {
        return Err(Error::DegenerateStart);
    }
    let v_scaled: Vec<C64> = v.iter().map(|x| x / wv).collect();

    let mut vs = vec![lift(&v_scaled, m)?];
    let mut ws = vec![lift_dual(w, m)?];
    let mut alphas: Vec<MatM> = Vec::with_capacity(n);
    let mut betas: Vec<MatM> = Vec::new();
    let mut gammas: Vec<MatM> = Vec::new();

    let finish = |alphas, betas, gammas, vs, ws, rv, rw, status| -> Result<LanczosResult> {
        Ok(LanczosResult {
            tri: TriTensor::new(alphas, betas, gammas)?,
            v_basis: vs,
            w_basis: ws,
            residual_v: rv,
            residual_w: rw,
            status,
            normalization: wv,
            gamma_rule: opts.gamma_rule,
        })
    };

    for k in 0..n {
        let (vk, wk) = (&vs[k], &ws[k]);
        let av = star_mul_tv(a, vk)?;
        let wa = star_mul_vt(wk, a)?;
        let alpha = star_inner(wk, &av)?;

        let mut w_hat = wa.sub(&scale_v(wk, &alpha, Side::Left)?)?;
        let mut v_hat = av.sub(&scale_v(vk, &alpha, Side::Right)?)?;
        if k > 0 {
            w_hat = w_hat.sub(&scale_v(&ws[k - 1], &betas[k - 1], Side::Left)?)?;
            v_hat = v_hat.sub(&scale_v(&vs[k - 1], &gammas[k - 1], Side::Right)?)?;
        }
        alphas.push(alpha);

        if k + 1 == n {
            return finish(alphas, betas, gammas, vs, ws, v_hat, w_hat, LanczosStatus::Completed);
        }

        let gamma = opts.gamma_rule.gamma(m);
        let inner = star_inner(&w_hat, &v_hat)?;
        let beta = match opts.gamma_rule {
            GammaRule::Identity => inner,
            GammaRule::Scalar(_) => gamma.solve_left(&inner)?,
        };
        match classify_breakdown(&v_hat, &w_hat, vk.frobenius(), wk.frobenius(), &beta, opts.eps_lucky, opts.eps_serious)
        {
            Breakdown::None => {}
            Breakdown::Lucky(side) => {
                let status = LanczosStatus::LuckyBreakdown { iteration: k + 1, side };
                return finish(alphas, betas, gammas, vs, ws, v_hat, w_hat, status);
            }
            Breakdown::Serious { condition } => {
                let partial = finish(alphas, betas, gammas, vs, ws, v_hat, w_hat, LanczosStatus::SeriousBreakdown {
                    iteration: k + 1,
                    condition,
                })?;
                return Err(Error::SeriousBreakdown { iteration: k + 1, condition, partial: Box::new(partial) });
            }
        }

        let solver = RightSolver::new(&beta)?;
        let v_next = solve_blocks(&v_hat, |x| solver.solve(x), solver.preserves_lower())?;
        let w_next = match opts.gamma_rule {
            GammaRule::Identity => w_hat,
            GammaRule::Scalar(c) => {
                let inv = C64::new(1.0, 0.0) / c;
                solve_blocks(&w_hat, |x| Ok(x.scale(inv)), true)?
            }
        };
        debug_assert_eq!(w_next.orientation(), Orientation::Dual);
        vs.push(v_next);
        ws.push(w_next);
        betas.push(beta);
        gammas.push(gamma);
    }
    unreachable!("the loop returns on its last iteration")
}

/// Materializes `T_n`: `α_i` on the diagonal, `γ_{i+1}` at `(i, i+1)` and
/// `β_{i+1}` at `(i+1, i)`.
pub fn assemble_tridiag(tri: &TriTensor) -> Tensor4 {
    let mut t = Tensor4::zeros(tri.n, tri.n, tri.m);
    let put = |t: &mut Tensor4, i: usize, j: usize, x: &MatM| {
        t.set_block(i, j, Block::classify(x.clone())).expect("coefficient size");
    };
    for (i, a) in tri.alphas.iter().enumerate() {
        put(&mut t, i, i, a);
    }
    for (i, (b, g)) in tri.betas.iter().zip(&tri.gammas).enumerate() {
        put(&mut t, i, i + 1, g);
        put(&mut t, i + 1, i, b);
    }
    t
}

/// A bilinear problem `(w, v)`.
pub type VectorPair = (Vec<C64>, Vec<C64>);

/// Splits `e_iᴴ U e_j` into `(e + e_i)ᴴ U e_j − eᴴ U e_j`, where `e` is the
/// all-ones vector. Full vectors avoid the breakdowns that sparse unit
/// vectors provoke on sparse tensors.
pub fn split_unit_vectors(i: usize, j: usize, n: usize) -> Result<[VectorPair; 2]> {
    if i >= n || j >= n {
        return Err(Error::Input(format!("unit indices ({i}, {j}) out of range for N = {n}")));
    }
    let one = C64::new(1.0, 0.0);
    let e = vec![one; n];
    let mut e_i = e.clone();
    e_i[i] += one;
    let mut e_j = vec![C64::new(0.0, 0.0); n];
    e_j[j] = one;
    Ok([(e_i, e_j.clone()), (e, e_j)])
}
