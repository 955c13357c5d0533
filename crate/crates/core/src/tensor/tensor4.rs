use num_complex::Complex64 as C64;

use super::block::{Block, BlockStructure};
use super::matm::MatM;
use crate::{Error, Result};

/// Four-mode tensor `n1 × n2 × m × m`, stored as `n1·n2` slices in
/// column-of-blocks order (`i1` varies fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    n1: usize,
    n2: usize,
    m: usize,
    blocks: Vec<Block>,
}

impl Tensor4 {
    pub fn zeros(n1: usize, n2: usize, m: usize) -> Self {
        Tensor4 { n1, n2, m, blocks: vec![Block::Zero; n1 * n2] }
    }

    /// Builds a tensor from slices in column-of-blocks order.
    pub fn from_blocks(n1: usize, n2: usize, m: usize, blocks: Vec<Block>) -> Result<Self> {
        if blocks.len() != n1 * n2 {
            return Err(Error::shape("Tensor4::from_blocks", format!("{} slices for {n1}×{n2}", blocks.len())));
        }
        for b in &blocks {
            check_block(b, m, "Tensor4::from_blocks")?;
        }
        Ok(Tensor4 { n1, n2, m, blocks })
    }

    /// Dense constructor; slice tags are inferred from the values.
    pub fn from_fn(n1: usize, n2: usize, m: usize, mut f: impl FnMut(usize, usize, usize, usize) -> C64) -> Self {
        let mut blocks = Vec::with_capacity(n1 * n2);
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                blocks.push(Block::classify(MatM::from_fn(m, |j1, j2| f(i1, i2, j1, j2))));
            }
        }
        Tensor4 { n1, n2, m, blocks }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn index(&self, i1: usize, i2: usize) -> usize {
        assert!(i1 < self.n1 && i2 < self.n2, "slice ({i1}, {i2}) out of bounds for {}×{}", self.n1, self.n2);
        i1 + self.n1 * i2
    }

    pub fn block(&self, i1: usize, i2: usize) -> &Block {
        &self.blocks[self.index(i1, i2)]
    }

    pub fn set_block(&mut self, i1: usize, i2: usize, b: Block) -> Result<()> {
        check_block(&b, self.m, "Tensor4::set_block")?;
        let k = self.index(i1, i2);
        self.blocks[k] = b;
        Ok(())
    }

    pub fn slice(&self, i1: usize, i2: usize) -> MatM {
        self.block(i1, i2).to_mat(self.m)
    }

    pub fn structure(&self, i1: usize, i2: usize) -> BlockStructure {
        self.block(i1, i2).structure()
    }

    pub fn get(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> C64 {
        self.block(i1, i2).get(self.m, j1, j2)
    }

    /// Number of entries that are exactly nonzero.
    pub fn nnz(&self) -> usize {
        self.blocks
            .iter()
            .filter_map(Block::mat)
            .map(|a| a.data().iter().filter(|z| **z != C64::new(0.0, 0.0)).count())
            .sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.blocks.iter().map(Block::sum_sq).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Tensor4) -> Result<Tensor4> {
        self.combine(other, 1.0, "Tensor4::add")
    }

    pub fn sub(&self, other: &Tensor4) -> Result<Tensor4> {
        self.combine(other, -1.0, "Tensor4::sub")
    }

    fn combine(&self, other: &Tensor4, s: f64, op: &'static str) -> Result<Tensor4> {
        if (self.n1, self.n2, self.m) != (other.n1, other.n2, other.m) {
            return Err(Error::shape(op, format!("{:?} vs {:?}", self.dims(), other.dims())));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.axpy(s, b)).collect();
        Ok(Tensor4 { n1: self.n1, n2: self.n2, m: self.m, blocks })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.m)
    }
}

pub(crate) fn check_block(b: &Block, m: usize, op: &'static str) -> Result<()> {
    match b {
        Block::Zero => Ok(()),
        Block::Lower(a) | Block::Dense(a) => {
            if a.m() != m {
                return Err(Error::shape(op, format!("slice of size {} in a tensor with m = {m}", a.m())));
            }
            if matches!(b, Block::Lower(_)) && !a.is_lower() {
                return Err(Error::Input(format!("{op}: slice tagged lower triangular has nonzero upper entries")));
            }
            Ok(())
        }
    }
}
