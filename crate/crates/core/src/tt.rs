//! Tensor-train decomposition of four-mode tensors.
//!
//! Modes are swept in the order `(i1, i2, j1, j2)`. Before the sweep, the
//! nonzero slices are stacked as rows of `S` and `Sᴴ = Q R` is factored, so
//! the first two unfoldings are decomposed on the small coefficient tensor
//! `Ĉ[i1, i2, :]` (rows of `Rᴴ`) instead of on vectors of length `m²`. `Qᴴ`
//! has orthonormal rows, so this leaves singular values unchanged, and all
//! SVDs are computed directly, never through Gram matrices.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::tensor::{Block, MatM, Tensor4};
use crate::{Error, Result};

/// One TT core: slices `G(i)` of size `r_left × r_right`, stored with index
/// `(a, i, b)` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Core {
    pub r_left: usize,
    pub n: usize,
    pub r_right: usize,
    pub data: Vec<C64>,
}

impl Core {
    pub fn get(&self, a: usize, i: usize, b: usize) -> C64 {
        self.data[(a * self.n + i) * self.r_right + b]
    }

    fn from_fn(r_left: usize, n: usize, r_right: usize, f: impl Fn(usize, usize, usize) -> C64) -> Core {
        let mut data = Vec::with_capacity(r_left * n * r_right);
        for a in 0..r_left {
            for i in 0..n {
                for b in 0..r_right {
                    data.push(f(a, i, b));
                }
            }
        }
        Core { r_left, n, r_right, data }
    }

    pub fn params(&self) -> usize {
        self.data.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TTTensor {
    pub cores: [Core; 4],
    /// `r₀..r₄`, with `r₀ = r₄ = 1`.
    pub ranks: [usize; 5],
    pub mode_sizes: [usize; 4],
    pub tol_used: f64,
}

impl TTTensor {
    pub fn new(cores: [Core; 4], tol_used: f64) -> Result<Self> {
        let mut ranks = [1; 5];
        for (k, c) in cores.iter().enumerate() {
            if c.data.len() != c.r_left * c.n * c.r_right {
                return Err(Error::shape("TTTensor::new", format!("core {k} has {} entries", c.data.len())));
            }
            if c.r_left != ranks[k] {
                return Err(Error::shape("TTTensor::new", format!("core {k} starts with rank {}", c.r_left)));
            }
            ranks[k + 1] = c.r_right;
        }
        if ranks[4] != 1 {
            return Err(Error::shape("TTTensor::new", "last rank must be 1"));
        }
        let mode_sizes = [cores[0].n, cores[1].n, cores[2].n, cores[3].n];
        if mode_sizes[2] != mode_sizes[3] {
            return Err(Error::shape("TTTensor::new", "inner modes must have equal size"));
        }
        Ok(TTTensor { cores, ranks, mode_sizes, tol_used })
    }

    /// Number of stored parameters, `Σ r_{k−1} n_k r_k`.
    pub fn params(&self) -> usize {
        self.cores.iter().map(Core::params).sum()
    }
}

/// Largest rank each unfolding admits: `min(∏_{j≤k} n_j, ∏_{j>k} n_j)`.
pub fn rank_bounds(mode_sizes: [usize; 4]) -> [usize; 5] {
    let mut out = [1; 5];
    for k in 1..4 {
        let left: usize = mode_sizes[..k].iter().product();
        let right: usize = mode_sizes[k..].iter().product();
        out[k] = left.min(right);
    }
    out
}

/// Truncated SVD of `x`: keeps the smallest rank whose discarded tail has
/// Frobenius norm at most `delta` (at least 1). Returns `(U_r, Σ_r V_rᴴ)`.
fn truncated_svd(x: DMatrix<C64>, delta: f64) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let xf = faer::Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)]);
    let svd = xf.thin_svd().map_err(|e| Error::Input(format!("SVD failed to converge: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    // Singular values come sorted in nonincreasing order.
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let mut tail = 0.0;
    let mut r = s.len();
    while r > 1 {
        let next = tail + s[r - 1].powi(2);
        if next.sqrt() > delta {
            break;
        }
        tail = next;
        r -= 1;
    }
    let r = r.max(1);
    let ur = DMatrix::from_fn(u.nrows(), r, |i, j| u[(i, j)]);
    let sv = DMatrix::from_fn(r, v.nrows(), |i, j| v[(j, i)].conj() * s[i]);
    Ok((ur, sv))
}

/// TT-SVD with per-step threshold `tol·‖a‖_F/√3`, so that the relative
/// reconstruction error is at most `tol`.
pub fn tt_svd(a: &Tensor4, tol: f64) -> Result<TTTensor> {
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let (n1, n2, m) = a.dims();
    let m2 = m * m;
    let nonzero: Vec<(usize, &MatM)> = a.blocks().iter().enumerate().filter_map(|(k, b)| b.mat().map(|x| (k, x))).collect();
    let norm = a.frobenius();
    if nonzero.is_empty() || norm == 0.0 {
        let zero_core = |n| Core::from_fn(1, n, 1, |_, _, _| C64::new(0.0, 0.0));
        return TTTensor::new([zero_core(n1), zero_core(n2), zero_core(m), zero_core(m)], tol);
    }
    let delta = tol * norm / 3f64.sqrt();

    // Sᴴ = Q R, with column r of Sᴴ the conjugated entries of slice r.
    let s_count = nonzero.len();
    let sh = DMatrix::from_fn(m2, s_count, |p, r| nonzero[r].1.data()[p].conj());
    let qr = sh.qr();
    let (q, rmat) = (qr.q(), qr.r());
    let qd = q.ncols();
    // Ĉ[i1, i2, c] = conj(R[c, r(i1, i2)]).
    let mut chat = vec![C64::new(0.0, 0.0); n1 * n2 * qd];
    for (r, &(k, _)) in nonzero.iter().enumerate() {
        let (i1, i2) = (k % n1, k / n1);
        for c in 0..qd {
            chat[(i1 * n2 + i2) * qd + c] = rmat[(c, r)].conj();
        }
    }

    let x1 = DMatrix::from_fn(n1, n2 * qd, |i1, col| chat[i1 * n2 * qd + col]);
    let (u1, c1) = truncated_svd(x1, delta)?;
    let r1 = u1.ncols();
    let g1 = Core::from_fn(1, n1, r1, |_, i, b| u1[(i, b)]);

    let x2 = DMatrix::from_fn(r1 * n2, qd, |row, c| c1[(row / n2, (row % n2) * qd + c)]);
    let (u2, b2) = truncated_svd(x2, delta)?;
    let r2 = u2.ncols();
    let g2 = Core::from_fn(r1, n2, r2, |a, i, b| u2[(a * n2 + i, b)]);

    // Back to full inner modes: C2 = B Qᴴ, r2 × m².
    let c2 = &b2 * q.adjoint();
    let x3 = DMatrix::from_fn(r2 * m, m, |row, j2| c2[(row / m, (row % m) * m + j2)]);
    let (u3, g4m) = truncated_svd(x3, delta)?;
    let r3 = u3.ncols();
    let g3 = Core::from_fn(r2, m, r3, |a, j, b| u3[(a * m + j, b)]);
    let g4 = Core::from_fn(r3, m, 1, |a, j, _| g4m[(a, j)]);
    TTTensor::new([g1, g2, g3, g4], tol)
}

/// Contracts the cores back into a full tensor.
pub fn tt_reconstruct(t: &TTTensor) -> Result<Tensor4> {
    let [n1, n2, m, _] = t.mode_sizes;
    let [g1, g2, g3, g4] = &t.cores;
    let (r1, r2, r3) = (t.ranks[1], t.ranks[2], t.ranks[3]);
    // G3·G4 once: (r2, j1, j2).
    let mut g34 = vec![C64::new(0.0, 0.0); r2 * m * m];
    for a in 0..r2 {
        for j1 in 0..m {
            for j2 in 0..m {
                g34[(a * m + j1) * m + j2] = (0..r3).map(|b| g3.get(a, j1, b) * g4.get(b, j2, 0)).sum();
            }
        }
    }
    let mut blocks = Vec::with_capacity(n1 * n2);
    for i2 in 0..n2 {
        for i1 in 0..n1 {
            let v: Vec<C64> = (0..r2).map(|b| (0..r1).map(|a| g1.get(0, i1, a) * g2.get(a, i2, b)).sum()).collect();
            let slice = MatM::from_fn(m, |j1, j2| (0..r2).map(|b| v[b] * g34[(b * m + j1) * m + j2]).sum());
            blocks.push(Block::classify(slice));
        }
    }
    Tensor4::from_blocks(n1, n2, m, blocks)
}

/// Stored parameters over exact nonzeros of `a`.
pub fn compression_factor(t: &TTTensor, a: &Tensor4) -> Result<f64> {
    let nnz = a.nnz();
    if nnz == 0 {
        return Err(Error::Input("compression factor of a zero tensor is undefined".into()));
    }
    Ok(t.params() as f64 / nnz as f64)
}

const TTF_MAGIC: &[u8; 4] = b"TTF1";

/// `TTF1`: magic, ranks `r₀..r₄` and mode sizes as little-endian `u64`,
/// `tol_used` as `f64`, then each core's entries as `(re, im)` pairs in
/// `(a, i, b)` row-major order.
pub fn write_ttf<W: Write>(mut w: W, t: &TTTensor) -> Result<()> {
    w.write_all(TTF_MAGIC)?;
    for x in t.ranks.iter().chain(&t.mode_sizes) {
        w.write_all(&(*x as u64).to_le_bytes())?;
    }
    w.write_all(&t.tol_used.to_le_bytes())?;
    for c in &t.cores {
        for z in &c.data {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_ttf<R: Read>(mut r: R) -> Result<TTTensor> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != TTF_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut words = [0usize; 9];
    for x in &mut words {
        let mut b = [0u8; 8];
        r.read_exact(&mut b)?;
        *x = usize::try_from(u64::from_le_bytes(b)).map_err(|_| Error::Format("dimension too large".into()))?;
    }
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let tol = f64::from_le_bytes(b);
    let (ranks, sizes) = (&words[..5], &words[5..]);
    let mut cores = Vec::with_capacity(4);
    for k in 0..4 {
        let len = ranks[k]
            .checked_mul(sizes[k])
            .and_then(|x| x.checked_mul(ranks[k + 1]))
            .ok_or_else(|| Error::Format("core size overflows".into()))?;
        let mut data = Vec::with_capacity(len);
        let mut buf = [0u8; 16];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            data.push(C64::new(
                f64::from_le_bytes(buf[..8].try_into().unwrap()),
                f64::from_le_bytes(buf[8..].try_into().unwrap()),
            ));
        }
        cores.push(Core { r_left: ranks[k], n: sizes[k], r_right: ranks[k + 1], data });
    }
    let cores: [Core; 4] = cores.try_into().expect("four cores");
    TTTensor::new(cores, tol)
}
