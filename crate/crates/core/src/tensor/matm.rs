use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex `m × m` matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatM {
    m: usize,
    data: Vec<C64>,
}

impl MatM {
    pub fn new(m: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != m * m {
            return Err(Error::shape("MatM::new", format!("{} entries for m = {m}", data.len())));
        }
        Ok(MatM { m, data })
    }

    pub fn zeros(m: usize) -> Self {
        MatM { m, data: vec![ZERO; m * m] }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_fn(m, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        MatM { m, data }
    }

    pub fn diag(d: &[C64]) -> Self {
        let m = d.len();
        Self::from_fn(m, |i, j| if i == j { d[i] } else { ZERO })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(i < self.m && j < self.m, "index ({i}, {j}) out of bounds for m = {}", self.m);
        self.data[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        assert!(i < self.m && j < self.m, "index ({i}, {j}) out of bounds for m = {}", self.m);
        self.data[i * self.m + j] = z;
    }

    /// True when every entry strictly above the diagonal is exactly zero.
    pub fn is_lower(&self) -> bool {
        let m = self.m;
        (0..m).all(|i| self.data[i * m + i + 1..(i + 1) * m].iter().all(|z| *z == ZERO))
    }

    /// True for the exact identity.
    pub fn is_identity(&self) -> bool {
        let m = self.m;
        self.data.iter().enumerate().all(|(k, z)| *z == if k / m == k % m { ONE } else { ZERO })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius(&self) -> f64 {
        sum_sq(&self.data).sqrt()
    }

    fn check_same(&self, other: &MatM, op: &'static str) -> Result<()> {
        if self.m != other.m {
            return Err(Error::shape(op, format!("m = {} vs m = {}", self.m, other.m)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &MatM) -> Result<MatM> {
        self.check_same(other, "MatM::mul")?;
        let mut out = vec![ZERO; self.m * self.m];
        let lower = self.is_lower() && other.is_lower();
        gemm_acc(&mut out, &self.data, &other.data, self.m, lower);
        Ok(MatM { m: self.m, data: out })
    }

    pub fn add(&self, other: &MatM) -> Result<MatM> {
        self.check_same(other, "MatM::add")?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &MatM) -> Result<MatM> {
        self.check_same(other, "MatM::sub")?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn scale(&self, c: C64) -> MatM {
        MatM { m: self.m, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// `I − self`.
    pub fn one_minus(&self) -> MatM {
        let mut out = self.scale(-ONE);
        for i in 0..self.m {
            out.data[i * self.m + i] += ONE;
        }
        out
    }

    fn zip(&self, other: &MatM, f: impl Fn(C64, C64) -> C64) -> MatM {
        MatM { m: self.m, data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.m, self.m, &self.data)
    }

    pub fn from_dmatrix(d: &DMatrix<C64>) -> Result<Self> {
        if d.nrows() != d.ncols() {
            return Err(Error::shape("MatM::from_dmatrix", format!("{}×{} is not square", d.nrows(), d.ncols())));
        }
        let m = d.nrows();
        Ok(Self::from_fn(m, |i, j| d[(i, j)]))
    }

    /// 2-norm condition number `σ_max / σ_min`; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        if self.m == 0 {
            return 1.0;
        }
        let mat = faer::Mat::from_fn(self.m, self.m, |i, j| self.get(i, j));
        let Ok(sv) = mat.singular_values() else {
            return f64::INFINITY;
        };
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 || !min.is_finite() {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Solves `self · X = rhs`.
    pub fn solve_left(&self, rhs: &MatM) -> Result<MatM> {
        self.check_same(rhs, "MatM::solve_left")?;
        if self.is_lower() {
            return lower_solve_left(self, rhs);
        }
        let lu = self.to_dmatrix().lu();
        let x = lu.solve(&rhs.to_dmatrix()).ok_or(Error::Singular)?;
        let out = MatM::from_dmatrix(&x)?;
        if out.is_finite() { Ok(out) } else { Err(Error::Singular) }
    }

    /// Solves `X · self = rhs`.
    pub fn solve_right(&self, rhs: &MatM) -> Result<MatM> {
        self.check_same(rhs, "MatM::solve_right")?;
        if self.is_lower() {
            return lower_solve_right(self, rhs);
        }
        // X·B = R  <=>  Bᵀ·Xᵀ = Rᵀ
        let lu = self.to_dmatrix().transpose().lu();
        let xt = lu.solve(&rhs.to_dmatrix().transpose()).ok_or(Error::Singular)?;
        let out = MatM::from_dmatrix(&xt.transpose())?;
        if out.is_finite() { Ok(out) } else { Err(Error::Singular) }
    }
}

/// A matrix factored once for repeated solves `X · B = R`.
pub struct RightSolver {
    b: MatM,
    lu: Option<nalgebra::linalg::LU<C64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl RightSolver {
    pub fn new(b: &MatM) -> Result<Self> {
        if b.is_lower() {
            lower_diag(b)?;
            return Ok(RightSolver { b: b.clone(), lu: None });
        }
        let lu = b.to_dmatrix().transpose().lu();
        if !lu.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(RightSolver { b: b.clone(), lu: Some(lu) })
    }

    /// Whether solutions of lower-triangular right-hand sides stay lower.
    pub fn preserves_lower(&self) -> bool {
        self.lu.is_none()
    }

    pub fn solve(&self, rhs: &MatM) -> Result<MatM> {
        self.b.check_same(rhs, "RightSolver::solve")?;
        match &self.lu {
            None => lower_solve_right(&self.b, rhs),
            Some(lu) => {
                let xt = lu.solve(&rhs.to_dmatrix().transpose()).ok_or(Error::Singular)?;
                let out = MatM::from_dmatrix(&xt.transpose())?;
                if out.is_finite() { Ok(out) } else { Err(Error::Singular) }
            }
        }
    }
}

pub(crate) fn sum_sq(data: &[C64]) -> f64 {
    data.iter().map(|z| z.norm_sqr()).sum()
}

/// Rows of `b` kept hot in cache per pass of [`gemm_acc`].
const K_BLOCK: usize = 32;

/// `c += a · b` for row-major `m × m` operands, summing over the inner index
/// in ascending order. With `lower` set, both operands must be lower
/// triangular and only the lower triangle of `c` is touched; for every
/// entry the nonzero terms are added in the same order as the dense loop, so
/// the two paths agree bit for bit. Blocking over the inner index keeps that
/// order.
pub(crate) fn gemm_acc(c: &mut [C64], a: &[C64], b: &[C64], m: usize, lower: bool) {
    debug_assert!(c.len() == m * m && a.len() == m * m && b.len() == m * m);
    for k0 in (0..m).step_by(K_BLOCK) {
        let k1 = (k0 + K_BLOCK).min(m);
        let i0 = if lower { k0 } else { 0 };
        for i in i0..m {
            let crow = &mut c[i * m..(i + 1) * m];
            let kmax = if lower { k1.min(i + 1) } else { k1 };
            for k in k0..kmax {
                let aik = a[i * m + k];
                if aik == ZERO {
                    continue;
                }
                let jmax = if lower { k + 1 } else { m };
                let brow = &b[k * m..k * m + jmax];
                for (cj, bkj) in crow[..jmax].iter_mut().zip(brow) {
                    *cj += aik * bkj;
                }
            }
        }
    }
}

fn lower_diag(l: &MatM) -> Result<Vec<C64>> {
    let d: Vec<C64> = (0..l.m).map(|i| l.data[i * l.m + i]).collect();
    if d.contains(&ZERO) {
        return Err(Error::Singular);
    }
    Ok(d)
}

/// Forward substitution for `L · X = R`, one row of `X` at a time.
fn lower_solve_left(l: &MatM, r: &MatM) -> Result<MatM> {
    let m = l.m;
    let d = lower_diag(l)?;
    let r_lower = r.is_lower();
    let mut x = r.clone();
    for i in 0..m {
        let end = if r_lower { i + 1 } else { m };
        let (done, rest) = x.data.split_at_mut(i * m);
        let row = &mut rest[..end];
        for k in 0..i {
            let lik = l.data[i * m + k];
            if lik == ZERO {
                continue;
            }
            let kend = if r_lower { k + 1 } else { m };
            for (xj, xkj) in row[..kend].iter_mut().zip(&done[k * m..k * m + kend]) {
                *xj -= lik * xkj;
            }
        }
        let inv = d[i];
        row.iter_mut().for_each(|z| *z /= inv);
    }
    if x.is_finite() { Ok(x) } else { Err(Error::Singular) }
}

/// Back substitution for `X · L = R`, one row of `X` at a time: once
/// `x_k` is known, row `k` of `L` is eliminated from the remaining entries.
fn lower_solve_right(l: &MatM, r: &MatM) -> Result<MatM> {
    let m = l.m;
    let d = lower_diag(l)?;
    let r_lower = r.is_lower();
    let mut x = r.clone();
    for i in 0..m {
        let end = if r_lower { i + 1 } else { m };
        let row = &mut x.data[i * m..i * m + end];
        for k in (0..end).rev() {
            let xk = row[k] / d[k];
            row[k] = xk;
            if xk == ZERO {
                continue;
            }
            for (xj, lkj) in row[..k].iter_mut().zip(&l.data[k * m..k * m + k]) {
                *xj -= xk * lkj;
            }
        }
    }
    if x.is_finite() { Ok(x) } else { Err(Error::Singular) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, lower: bool, rng: &mut ChaCha8Rng) -> MatM {
        MatM::from_fn(m, |i, j| {
            if lower && j > i {
                ZERO
            } else {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }
        })
    }

    #[test]
    fn lower_kernel_matches_dense_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [1, 2, 5, 9] {
            let a = random(m, true, &mut rng);
            let b = random(m, true, &mut rng);
            let mut dense = vec![ZERO; m * m];
            let mut tri = vec![ZERO; m * m];
            gemm_acc(&mut dense, a.data(), b.data(), m, false);
            gemm_acc(&mut tri, a.data(), b.data(), m, true);
            for (x, y) in dense.iter().zip(&tri) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn solves_agree_with_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = 6;
        let mut l = random(m, true, &mut rng);
        for i in 0..m {
            l.set(i, i, l.get(i, i) + C64::new(3.0, 0.0));
        }
        let r = random(m, false, &mut rng);
        let x = l.solve_left(&r).unwrap();
        assert!(l.mul(&x).unwrap().sub(&r).unwrap().frobenius() < 1e-12);
        let y = l.solve_right(&r).unwrap();
        assert!(y.mul(&l).unwrap().sub(&r).unwrap().frobenius() < 1e-12);

        let g = random(m, false, &mut rng);
        let x = g.solve_left(&r).unwrap();
        assert!(g.mul(&x).unwrap().sub(&r).unwrap().frobenius() < 1e-9);
        let y = g.solve_right(&r).unwrap();
        assert!(y.mul(&g).unwrap().sub(&r).unwrap().frobenius() < 1e-9);
    }

    #[test]
    fn lower_rhs_gives_exactly_lower_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut l = random(7, true, &mut rng);
        for i in 0..7 {
            l.set(i, i, C64::new(2.0, 0.5));
        }
        let r = random(7, true, &mut rng);
        assert!(l.solve_left(&r).unwrap().is_lower());
        assert!(l.solve_right(&r).unwrap().is_lower());
    }

    #[test]
    fn singular_is_reported() {
        let z = MatM::zeros(3);
        assert!(matches!(z.solve_left(&MatM::identity(3)), Err(Error::Singular)));
        assert_eq!(z.condition_number(), f64::INFINITY);
        assert!((MatM::identity(4).condition_number() - 1.0).abs() < 1e-15);
    }
}
