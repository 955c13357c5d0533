use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matm::{gemm_acc, MatM};

/// Structural tag carried by every `m × m` slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockStructure {
    Dense,
    LowerTriangular,
    Zero,
}

impl BlockStructure {
    pub(crate) fn code(self) -> u8 {
        match self {
            BlockStructure::Dense => 0,
            BlockStructure::LowerTriangular => 1,
            BlockStructure::Zero => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(BlockStructure::Dense),
            1 => Some(BlockStructure::LowerTriangular),
            2 => Some(BlockStructure::Zero),
            _ => None,
        }
    }
}

/// One `m × m` slice of a tensor or hypervector.
///
/// `Lower` guarantees exact zeros above the diagonal and `Zero` stores
/// nothing; both are promises the product kernels rely on.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    Zero,
    Lower(MatM),
    Dense(MatM),
}

impl Block {
    /// Tags a matrix by inspecting its entries.
    pub fn classify(mat: MatM) -> Block {
        if mat.is_zero() {
            Block::Zero
        } else if mat.is_lower() {
            Block::Lower(mat)
        } else {
            Block::Dense(mat)
        }
    }

    /// Wraps `mat` under a requested tag, checking the promise.
    pub(crate) fn with_structure(mat: MatM, s: BlockStructure) -> Option<Block> {
        match s {
            BlockStructure::Zero => mat.is_zero().then_some(Block::Zero),
            BlockStructure::LowerTriangular => mat.is_lower().then_some(Block::Lower(mat)),
            BlockStructure::Dense => Some(Block::Dense(mat)),
        }
    }

    pub fn structure(&self) -> BlockStructure {
        match self {
            Block::Zero => BlockStructure::Zero,
            Block::Lower(_) => BlockStructure::LowerTriangular,
            Block::Dense(_) => BlockStructure::Dense,
        }
    }

    pub fn mat(&self) -> Option<&MatM> {
        match self {
            Block::Zero => None,
            Block::Lower(a) | Block::Dense(a) => Some(a),
        }
    }

    pub fn to_mat(&self, m: usize) -> MatM {
        self.mat().cloned().unwrap_or_else(|| MatM::zeros(m))
    }

    pub fn get(&self, m: usize, j1: usize, j2: usize) -> C64 {
        match self.mat() {
            Some(a) => a.get(j1, j2),
            None => {
                assert!(j1 < m && j2 < m, "index ({j1}, {j2}) out of bounds for m = {m}");
                C64::new(0.0, 0.0)
            }
        }
    }

    pub fn is_lower(&self) -> bool {
        !matches!(self, Block::Dense(_))
    }

    pub fn sum_sq(&self) -> f64 {
        self.mat().map_or(0.0, |a| super::matm::sum_sq(a.data()))
    }

    /// Elementwise `self + s·other`.
    pub(crate) fn axpy(&self, s: f64, other: &Block) -> Block {
        let tag = |lower: bool, mat| if lower { Block::Lower(mat) } else { Block::Dense(mat) };
        match (self, other) {
            (_, Block::Zero) => self.clone(),
            (Block::Zero, b) => {
                let mat = b.mat().unwrap().scale(C64::new(s, 0.0));
                tag(b.is_lower(), mat)
            }
            (a, b) => {
                let (x, y) = (a.mat().unwrap(), b.mat().unwrap());
                let data = x.data().iter().zip(y.data()).map(|(p, q)| p + q * s).collect();
                tag(a.is_lower() && b.is_lower(), MatM::new(x.m(), data).unwrap())
            }
        }
    }

    /// `self · m` or `m · self` where `m` is tagged by inspection.
    pub(crate) fn scaled(&self, mat: &MatM, mat_lower: bool, left: bool) -> Block {
        let Some(a) = self.mat() else { return Block::Zero };
        if mat.is_identity() {
            return self.clone();
        }
        let lower = self.is_lower() && mat_lower;
        let mut acc = Acc::new(a.m());
        if left {
            acc.add_raw(mat, a, lower);
        } else {
            acc.add_raw(a, mat, lower);
        }
        acc.finish()
    }
}

/// Running sum of slice products with structure tracking.
pub(crate) struct Acc {
    m: usize,
    data: Option<Vec<C64>>,
    lower: bool,
}

impl Acc {
    pub(crate) fn new(m: usize) -> Self {
        Acc { m, data: None, lower: true }
    }

    pub(crate) fn add(&mut self, a: &Block, b: &Block) {
        if let (Some(x), Some(y)) = (a.mat(), b.mat()) {
            self.add_raw(x, y, a.is_lower() && b.is_lower());
        }
    }

    fn add_raw(&mut self, x: &MatM, y: &MatM, lower: bool) {
        let m = self.m;
        let buf = self.data.get_or_insert_with(|| vec![C64::new(0.0, 0.0); m * m]);
        gemm_acc(buf, x.data(), y.data(), m, lower);
        self.lower &= lower;
    }

    pub(crate) fn finish(self) -> Block {
        match self.data {
            None => Block::Zero,
            Some(d) => {
                let mat = MatM::new(self.m, d).expect("accumulator size");
                if self.lower {
                    Block::Lower(mat)
                } else {
                    Block::Dense(mat)
                }
            }
        }
    }
}
