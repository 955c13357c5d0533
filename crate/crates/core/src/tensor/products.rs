use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::block::{Acc, Block};
use super::hypervec::{HyperVec, Orientation};
use super::matm::MatM;
use super::tensor4::Tensor4;
use crate::{Error, Result};

/// Side on which an `m × m` matrix multiplies each slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_m(op: &'static str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::shape(op, format!("inner size {a} vs {b}")));
    }
    Ok(())
}

/// `(a ⋆ b)[i1,i3] = Σ_k a[i1,k] · b[k,i3]`.
pub fn star_mul_tt(a: &Tensor4, b: &Tensor4) -> Result<Tensor4> {
    check_m("star_mul_tt", a.m(), b.m())?;
    if a.n2() != b.n1() {
        return Err(Error::shape("star_mul_tt", format!("{}×{} times {}×{}", a.n1(), a.n2(), b.n1(), b.n2())));
    }
    let (n1, n3, m) = (a.n1(), b.n2(), a.m());
    let blocks = (0..n1 * n3)
        .into_par_iter()
        .map(|idx| {
            let (i1, i3) = (idx % n1, idx / n1);
            let mut acc = Acc::new(m);
            for k in 0..a.n2() {
                acc.add(a.block(i1, k), b.block(k, i3));
            }
            acc.finish()
        })
        .collect();
    Tensor4::from_blocks(n1, n3, m, blocks)
}

/// `(a ⋆ v)[i] = Σ_k a[i,k] · v[k]` for a right hypervector `v`.
pub fn star_mul_tv(a: &Tensor4, v: &HyperVec) -> Result<HyperVec> {
    v.expect(Orientation::Right, "star_mul_tv")?;
    check_m("star_mul_tv", a.m(), v.m())?;
    if a.n2() != v.n() {
        return Err(Error::shape("star_mul_tv", format!("{}×{} tensor times length-{} hypervector", a.n1(), a.n2(), v.n())));
    }
    let m = a.m();
    let blocks = (0..a.n1())
        .into_par_iter()
        .map(|i| {
            let mut acc = Acc::new(m);
            for k in 0..a.n2() {
                acc.add(a.block(i, k), v.block(k));
            }
            acc.finish()
        })
        .collect();
    Ok(HyperVec::from_parts(m, Orientation::Right, blocks))
}

/// `(w ⋆ a)[i] = Σ_k w[k] · a[k,i]` for a dual hypervector `w`.
pub fn star_mul_vt(w: &HyperVec, a: &Tensor4) -> Result<HyperVec> {
    w.expect(Orientation::Dual, "star_mul_vt")?;
    check_m("star_mul_vt", a.m(), w.m())?;
    if a.n1() != w.n() {
        return Err(Error::shape("star_mul_vt", format!("length-{} hypervector times {}×{} tensor", w.n(), a.n1(), a.n2())));
    }
    let m = a.m();
    let blocks = (0..a.n2())
        .into_par_iter()
        .map(|i| {
            let mut acc = Acc::new(m);
            for k in 0..a.n1() {
                acc.add(w.block(k), a.block(k, i));
            }
            acc.finish()
        })
        .collect();
    Ok(HyperVec::from_parts(m, Orientation::Dual, blocks))
}

/// `Σ_k w[k] · v[k]`.
pub fn star_inner(w: &HyperVec, v: &HyperVec) -> Result<MatM> {
    w.expect(Orientation::Dual, "star_inner")?;
    v.expect(Orientation::Right, "star_inner")?;
    check_m("star_inner", w.m(), v.m())?;
    if w.n() != v.n() {
        return Err(Error::shape("star_inner", format!("lengths {} and {}", w.n(), v.n())));
    }
    let mut acc = Acc::new(w.m());
    for k in 0..w.n() {
        acc.add(w.block(k), v.block(k));
    }
    Ok(acc.finish().to_mat(w.m()))
}

/// Multiplies every slice of `a` by `mat` on the given side.
pub fn scale_t(a: &Tensor4, mat: &MatM, side: Side) -> Result<Tensor4> {
    check_m("scale_t", a.m(), mat.m())?;
    let lower = mat.is_lower();
    let blocks = a.blocks().par_iter().map(|b| b.scaled(mat, lower, side == Side::Left)).collect();
    Tensor4::from_blocks(a.n1(), a.n2(), a.m(), blocks)
}

/// Multiplies every slice of `v` by `mat` on the given side.
pub fn scale_v(v: &HyperVec, mat: &MatM, side: Side) -> Result<HyperVec> {
    check_m("scale_v", v.m(), mat.m())?;
    let lower = mat.is_lower();
    let blocks = v.blocks().par_iter().map(|b| b.scaled(mat, lower, side == Side::Left)).collect();
    Ok(HyperVec::from_parts(v.m(), v.orientation(), blocks))
}

fn lift_with(a: &[C64], m: usize, orientation: Orientation, f: impl Fn(C64) -> C64) -> Result<HyperVec> {
    if a.is_empty() || m == 0 {
        return Err(Error::shape("lift", format!("length {} with m = {m}", a.len())));
    }
    let blocks = a
        .iter()
        .map(|&z| if z == C64::new(0.0, 0.0) { Block::Zero } else { Block::Lower(MatM::diag(&vec![f(z); m])) })
        .collect();
    Ok(HyperVec::from_parts(m, orientation, blocks))
}

/// `a ⊗ I_m` as a right hypervector.
pub fn lift(a: &[C64], m: usize) -> Result<HyperVec> {
    lift_with(a, m, Orientation::Right, |z| z)
}

/// `conj(a) ⊗ I_m` as a dual hypervector.
pub fn lift_dual(a: &[C64], m: usize) -> Result<HyperVec> {
    lift_with(a, m, Orientation::Dual, |z| z.conj())
}

pub fn star_identity(n: usize, m: usize) -> Tensor4 {
    let mut t = Tensor4::zeros(n, n, m);
    for i in 0..n {
        t.set_block(i, i, Block::Lower(MatM::identity(m))).expect("identity slice");
    }
    t
}

/// `a^{k⋆}`, with `a^{0⋆}` the ⋆-identity.
pub fn star_pow(a: &Tensor4, k: usize) -> Result<Tensor4> {
    if a.n1() != a.n2() {
        return Err(Error::shape("star_pow", format!("outer modes {}×{} are not square", a.n1(), a.n2())));
    }
    let mut out = star_identity(a.n1(), a.m());
    for _ in 0..k {
        out = star_mul_tt(&out, a)?;
    }
    Ok(out)
}

/// Objects with a (rooted) Frobenius norm.
pub trait Frobenius {
    fn frobenius(&self) -> f64;
}

impl Frobenius for Tensor4 {
    fn frobenius(&self) -> f64 {
        Tensor4::frobenius(self)
    }
}

impl Frobenius for HyperVec {
    fn frobenius(&self) -> f64 {
        HyperVec::frobenius(self)
    }
}

impl Frobenius for MatM {
    fn frobenius(&self) -> f64 {
        MatM::frobenius(self)
    }
}

pub fn frobenius<T: Frobenius + ?Sized>(x: &T) -> f64 {
    x.frobenius()
}

/// Flattens to the `(n1·m) × (n2·m)` block matrix whose block `(i1,i2)` is
/// slice `(i1,i2)`.
pub fn to_block_matrix(a: &Tensor4) -> DMatrix<C64> {
    let m = a.m();
    DMatrix::from_fn(a.n1() * m, a.n2() * m, |r, c| a.get(r / m, c / m, r % m, c % m))
}

/// Inverse of [`to_block_matrix`]; slice tags are inferred from the values.
pub fn from_block_matrix(mat: &DMatrix<C64>, n1: usize, n2: usize, m: usize) -> Result<Tensor4> {
    if mat.nrows() != n1 * m || mat.ncols() != n2 * m {
        return Err(Error::shape(
            "from_block_matrix",
            format!("{}×{} matrix for {n1}×{n2} blocks of size {m}", mat.nrows(), mat.ncols()),
        ));
    }
    Ok(Tensor4::from_fn(n1, n2, m, |i1, i2, j1, j2| mat[(i1 * m + j1, i2 * m + j2)]))
}

/// A right hypervector becomes an `(n·m) × m` column of blocks, a dual one an
/// `m × (n·m)` row of blocks.
pub fn hypervec_to_block_matrix(v: &HyperVec) -> DMatrix<C64> {
    let m = v.m();
    match v.orientation() {
        Orientation::Right => DMatrix::from_fn(v.n() * m, m, |r, c| v.get(r / m, r % m, c)),
        Orientation::Dual => DMatrix::from_fn(m, v.n() * m, |r, c| v.get(c / m, r, c % m)),
    }
}

pub fn hypervec_from_block_matrix(mat: &DMatrix<C64>, m: usize, orientation: Orientation) -> Result<HyperVec> {
    let bad = || Error::shape("hypervec_from_block_matrix", format!("{}×{} matrix with m = {m}", mat.nrows(), mat.ncols()));
    match orientation {
        Orientation::Right => {
            if m == 0 || mat.ncols() != m || !mat.nrows().is_multiple_of(m) {
                return Err(bad());
            }
            Ok(HyperVec::from_fn(mat.nrows() / m, m, orientation, |i, j1, j2| mat[(i * m + j1, j2)]))
        }
        Orientation::Dual => {
            if m == 0 || mat.nrows() != m || !mat.ncols().is_multiple_of(m) {
                return Err(bad());
            }
            Ok(HyperVec::from_fn(mat.ncols() / m, m, orientation, |i, j1, j2| mat[(j1, i * m + j2)]))
        }
    }
}
