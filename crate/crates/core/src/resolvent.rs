//! The `(1,1)` block of the ⋆-resolvent `(I − T_n)^{-⋆}` and the resulting
//! approximation of `wᴴ U(τ_i) v`.

use std::io::Write;

use num_complex::Complex64 as C64;

use crate::discretize::Mesh;
use crate::lanczos::TriTensor;
use crate::tensor::MatM;
use crate::{Error, Result};

/// Per-level condition estimates above this are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1.0 / f64::EPSILON;

/// Cheap condition estimate: the diagonal ratio for triangular matrices
/// (a lower bound on the 2-norm condition number) and the exact 2-norm
/// condition number otherwise.
fn condition_estimate(s: &MatM) -> f64 {
    if s.is_lower() {
        let d: Vec<f64> = (0..s.m()).map(|i| s.get(i, i).norm()).collect();
        let max = d.iter().copied().fold(0.0, f64::max);
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 { f64::INFINITY } else { max / min }
    } else {
        s.condition_number()
    }
}

/// `R₁₁` together with the condition estimate of the matrix inverted at
/// each depth (`conditions[0]` is the outermost level).
#[derive(Clone, Debug, PartialEq)]
pub struct ResolventDetails {
    pub r11: MatM,
    pub conditions: Vec<f64>,
}

/// Evaluates the continued fraction from the innermost level outwards:
/// `S_n = I − α_n`, `S_k = (I − α_k) − γ_{k+1} S_{k+1}⁻¹ β_{k+1}`, and
/// `R₁₁ = S₁⁻¹`. Every inverse is applied as a linear solve.
pub fn star_resolvent_11_details(tri: &TriTensor) -> Result<ResolventDetails> {
    let n = tri.n;
    let mut conditions = vec![0.0; n];
    let check = |s: &MatM, depth: usize, conditions: &mut Vec<f64>| -> Result<()> {
        let c = condition_estimate(s);
        conditions[depth - 1] = c;
        if !(c <= SINGULAR_CONDITION) {
            return Err(Error::ResolventSingular { depth, condition: c });
        }
        Ok(())
    };
    fn singular(depth: usize, s: &MatM) -> impl Fn(Error) -> Error + '_ {
        move |_| Error::ResolventSingular { depth, condition: condition_estimate(s) }
    }

    let mut s = tri.alphas[n - 1].one_minus();
    for k in (0..n - 1).rev() {
        check(&s, k + 2, &mut conditions)?;
        let x = s.solve_left(&tri.betas[k]).map_err(singular(k + 2, &s))?;
        let gx = tri.gammas[k].mul(&x)?;
        s = tri.alphas[k].one_minus().sub(&gx)?;
    }
    check(&s, 1, &mut conditions)?;
    let r11 = s.solve_left(&MatM::identity(tri.m)).map_err(singular(1, &s))?;
    Ok(ResolventDetails { r11, conditions })
}

pub fn star_resolvent_11(tri: &TriTensor) -> Result<MatM> {
    Ok(star_resolvent_11_details(tri)?.r11)
}

/// Samples `s_i ≈ wᴴ U(τ_i) v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionVec {
    pub mesh: Mesh,
    pub values: Vec<C64>,
    pub n_used: usize,
    pub normalization: C64,
}

impl SolutionVec {
    /// Writes `tau,re_s,im_s` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tau,re_s,im_s")?;
        for (t, s) in self.mesh.tau.iter().zip(&self.values) {
            writeln!(w, "{t:e},{:e},{:e}", s.re, s.im)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// `s = c · (1/h) · θ · R₁₁ · e₁` with `c` the normalization removed before
/// the Lanczos run. Since `θ = h·tril(ones)`, this is `c` times the running
/// sum of the first column of `R₁₁`.
pub fn approx_solution(tri: &TriTensor, mesh: &Mesh, normalization: C64) -> Result<SolutionVec> {
    if tri.m != mesh.m {
        return Err(Error::shape("approx_solution", format!("coefficients of size {} on a mesh of {}", tri.m, mesh.m)));
    }
    let r11 = star_resolvent_11(tri)?;
    Ok(SolutionVec { mesh: mesh.clone(), values: solution_from_r11(&r11, normalization), n_used: tri.n, normalization })
}

pub(crate) fn solution_from_r11(r11: &MatM, normalization: C64) -> Vec<C64> {
    let mut acc = C64::new(0.0, 0.0);
    (0..r11.m())
        .map(|i| {
            acc += r11.get(i, 0);
            acc * normalization
        })
        .collect()
}

/// Reference evaluations of the ⋆-resolvent by its power series.
#[cfg(any(test, feature = "oracles"))]
pub mod oracle {
    use num_complex::Complex64 as C64;

    use super::solution_from_r11;
    use crate::discretize::Mesh;
    use crate::tensor::{lift, lift_dual, star_inner, star_mul_tv, MatM, Tensor4};
    use crate::Result;

    /// `Σ_k Wᴰ ⋆ A^{k⋆} ⋆ V` with `V = v ⊗ I`, `Wᴰ = w̄ ⊗ I`, truncated after
    /// `max_terms` terms or once `‖Wᴰ‖·‖A^{k⋆} ⋆ V‖` drops below `1e-16` of
    /// the sum. Single terms can vanish without the tail doing so.
    pub fn neumann_bilinear(a: &Tensor4, v: &[C64], w: &[C64], max_terms: usize) -> Result<MatM> {
        let m = a.m();
        let wd = lift_dual(w, m)?;
        let w_norm = wd.frobenius();
        let mut x = lift(v, m)?;
        let mut sum = star_inner(&wd, &x)?;
        for _ in 0..max_terms {
            x = star_mul_tv(a, &x)?;
            sum = sum.add(&star_inner(&wd, &x)?)?;
            if w_norm * x.frobenius() < 1e-16 * sum.frobenius() {
                break;
            }
        }
        Ok(sum)
    }

    /// The solution samples obtained from the full discretized operator.
    pub fn neumann_solution(a: &Tensor4, v: &[C64], w: &[C64], mesh: &Mesh) -> Result<Vec<C64>> {
        let r = neumann_bilinear(a, v, w, (a.n1() * mesh.m).max(400))?;
        Ok(solution_from_r11(&r, C64::new(1.0, 0.0)))
    }
}
