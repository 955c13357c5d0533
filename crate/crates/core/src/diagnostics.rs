//! Error measures for a Lanczos run and its solution.
//!
//! All norms are rooted Frobenius norms, and every measure is a ratio.
//! `𝒱_n` is the `N × n` tensor whose columns are `V_1..V_n` and `𝒲_n` the
//! `n × N` tensor whose rows are `W_1ᴰ..W_nᴰ`.

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::lanczos::{assemble_tridiag, GammaRule, LanczosResult, LanczosStatus};
use crate::tensor::{lift, lift_dual, scale_v, star_inner, star_mul_tv, star_mul_vt, HyperVec, MatM, Side, Tensor4};
use crate::{Error, Result};

fn ratio(num: f64, a: f64, b: f64) -> f64 {
    let den = a.max(b);
    if num == 0.0 { 0.0 } else { num / den }
}

fn sum_sq(v: &HyperVec) -> f64 {
    v.frobenius().powi(2)
}

/// `‖𝒲_n ⋆ 𝒱_n − 𝓘‖ / max(‖𝒱_n‖, ‖𝒲_n‖)`.
pub fn err_biorth(result: &LanczosResult) -> Result<f64> {
    let (vs, ws) = (&result.v_basis, &result.w_basis);
    let m = result.tri.m;
    let mut num = 0.0;
    for (i, w) in ws.iter().enumerate() {
        for (j, v) in vs.iter().enumerate() {
            let mut x = star_inner(w, v)?;
            if i == j {
                x = x.sub(&MatM::identity(m))?;
            }
            num += x.frobenius().powi(2);
        }
    }
    let nv: f64 = vs.iter().map(sum_sq).sum::<f64>().sqrt();
    let nw: f64 = ws.iter().map(sum_sq).sum::<f64>().sqrt();
    Ok(ratio(num.sqrt(), nv, nw))
}

/// `(err_V, err_W)`: relative residuals of `𝒜⋆𝒱_n = 𝒱_n⋆𝒯_n + Ṽ_n` and
/// `𝒲_n⋆𝒜 = 𝒯_n⋆𝒲_n + W̃_n`.
///
/// Each column (row) is evaluated in the same order as the recurrence that
/// produced it, so with `γ ≡ I` the `W` side, which is definitional, comes
/// out exactly zero.
pub fn err_recurrences(result: &LanczosResult, a: &Tensor4) -> Result<(f64, f64)> {
    let tri = &result.tri;
    let n = tri.n;
    let (vs, ws) = (&result.v_basis, &result.w_basis);
    let identity_gamma = result.gamma_rule == GammaRule::Identity;
    let (mut rv, mut av, mut tv) = (0.0, 0.0, 0.0);
    let (mut rw, mut wa, mut tw) = (0.0, 0.0, 0.0);

    for j in 0..n {
        // V side, column j.
        let avj = star_mul_tv(a, &vs[j])?;
        let mut lin = scale_v(&vs[j], &tri.alphas[j], Side::Right)?;
        let mut res = avj.sub(&lin)?;
        if j > 0 {
            let prev = scale_v(&vs[j - 1], &tri.gammas[j - 1], Side::Right)?;
            res = res.sub(&prev)?;
            lin = lin.add(&prev)?;
        }
        let next = if j + 1 < n { scale_v(&vs[j + 1], &tri.betas[j], Side::Right)? } else { result.residual_v.clone() };
        res = res.sub(&next)?;
        lin = lin.add(&next)?;
        rv += sum_sq(&res);
        av += sum_sq(&avj);
        tv += sum_sq(&lin);

        // W side, row j.
        let waj = star_mul_vt(&ws[j], a)?;
        let mut lin = scale_v(&ws[j], &tri.alphas[j], Side::Left)?;
        let mut res = waj.sub(&lin)?;
        if j > 0 {
            let prev = scale_v(&ws[j - 1], &tri.betas[j - 1], Side::Left)?;
            res = res.sub(&prev)?;
            lin = lin.add(&prev)?;
        }
        let next = if j + 1 == n {
            result.residual_w.clone()
        } else if identity_gamma {
            ws[j + 1].clone()
        } else {
            scale_v(&ws[j + 1], &tri.gammas[j], Side::Left)?
        };
        res = res.sub(&next)?;
        lin = lin.add(&next)?;
        rw += sum_sq(&res);
        wa += sum_sq(&waj);
        tw += sum_sq(&lin);
    }
    Ok((ratio(rv.sqrt(), av.sqrt(), tv.sqrt()), ratio(rw.sqrt(), wa.sqrt(), tw.sqrt())))
}

/// The moments `Wᴰ ⋆ A^{k⋆} ⋆ V` for `k = 0..=k_max`, where
/// `V = v/(wᴴv) ⊗ I` and `Wᴰ = w̄ ⊗ I`.
pub fn moments(a: &Tensor4, v: &[C64], w: &[C64], k_max: usize) -> Result<Vec<MatM>> {
    let m = a.m();
    let wv: C64 = w.iter().zip(v).map(|(w, v)| w.conj() * v).sum();
    if wv == C64::new(0.0, 0.0) {
        return Err(Error::DegenerateStart);
    }
    let v: Vec<C64> = v.iter().map(|x| x / wv).collect();
    let wd = lift_dual(w, m)?;
    let mut x = lift(&v, m)?;
    let mut out = vec![star_inner(&wd, &x)?];
    for _ in 0..k_max {
        x = star_mul_tv(a, &x)?;
        out.push(star_inner(&wd, &x)?);
    }
    Ok(out)
}

/// `err_M(k)` for `k = 0..=k_max`: relative mismatch between the moments of
/// `A` and those of `T_n` seen from `E₁`.
///
/// Powers are applied as repeated products with a hypervector, which equals
/// `star_pow` by associativity and avoids forming `A^{k⋆}`.
pub fn err_moments(result: &LanczosResult, a: &Tensor4, v: &[C64], w: &[C64], k_max: usize) -> Result<Vec<f64>> {
    let lhs = moments(a, v, w, k_max)?;
    let t = assemble_tridiag(&result.tri);
    let mut e1 = vec![C64::new(0.0, 0.0); result.tri.n];
    e1[0] = C64::new(1.0, 0.0);
    let rhs = moments(&t, &e1, &e1, k_max)?;
    lhs.iter()
        .zip(&rhs)
        .map(|(x, y)| Ok(ratio(x.sub(y)?.frobenius(), x.frobenius(), y.frobenius())))
        .collect()
}

/// `‖ŝ − s‖₂ / ‖ŝ‖₂`.
pub fn err_solution(s_hat: &[C64], s_n: &[C64]) -> Result<f64> {
    if s_hat.len() != s_n.len() {
        return Err(Error::shape("err_solution", format!("lengths {} and {}", s_hat.len(), s_n.len())));
    }
    let num: f64 = s_hat.iter().zip(s_n).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = s_hat.iter().map(|a| a.norm_sqr()).sum();
    Ok(ratio(num.sqrt(), den.sqrt(), 0.0))
}

/// Least-squares slope of `log err` against `log M`.
pub fn convergence_slope(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Input("a slope needs at least two points".into()));
    }
    if points.iter().any(|&(m, e)| m == 0 || !(e > 0.0) || !e.is_finite()) {
        return Err(Error::Input("slope points need M > 0 and finite positive errors".into()));
    }
    let xs: Vec<f64> = points.iter().map(|&(m, _)| (m as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("slope needs at least two distinct M".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub problem: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub n: usize,
    pub status: LanczosStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub err_o: f64,
    pub err_v: f64,
    pub err_w: f64,
    /// `err_M(k)` for `k = 0..2n−1`.
    pub err_m: Vec<f64>,
    pub err_sol: Option<f64>,
    pub meta: ReportMeta,
}

pub const REPORT_CSV_HEADER: &str = "problem,M,n,status,err_o,err_v,err_w,err_m_max,err_sol";

impl ErrorReport {
    /// All measures for `result`; `err_sol` when both samples are given.
    pub fn compute(
        problem: &str,
        result: &LanczosResult,
        a: &Tensor4,
        v: &[C64],
        w: &[C64],
        solution: Option<(&[C64], &[C64])>,
    ) -> Result<Self> {
        let n = result.tri.n;
        let (err_v, err_w) = err_recurrences(result, a)?;
        Ok(ErrorReport {
            err_o: err_biorth(result)?,
            err_v,
            err_w,
            err_m: err_moments(result, a, v, w, 2 * n - 1)?,
            err_sol: solution.map(|(s_hat, s)| err_solution(s_hat, s)).transpose()?,
            meta: ReportMeta { problem: problem.to_string(), m: a.m(), n, status: result.status },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn status_name(&self) -> &'static str {
        match self.meta.status {
            LanczosStatus::Completed => "completed",
            LanczosStatus::LuckyBreakdown { .. } => "lucky_breakdown",
            LanczosStatus::SeriousBreakdown { .. } => "serious_breakdown",
        }
    }

    pub fn csv_row(&self) -> String {
        let m_max = self.err_m.iter().copied().fold(0.0, f64::max);
        let sol = self.err_sol.map_or(String::new(), |e| format!("{e:e}"));
        format!(
            "{},{},{},{},{:e},{:e},{:e},{:e},{}",
            self.meta.problem,
            self.meta.m,
            self.meta.n,
            self.status_name(),
            self.err_o,
            self.err_v,
            self.err_w,
            m_max,
            sol
        )
    }

    pub fn write_csv<W: Write>(rows: &[ErrorReport], mut w: W) -> std::io::Result<()> {
        writeln!(w, "{REPORT_CSV_HEADER}")?;
        for r in rows {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }
}
