use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::block::{Block, BlockStructure};
use super::matm::MatM;
use super::tensor4::check_block;
use crate::{Error, Result};

/// Whether a hypervector acts from the right (`V`) or from the left (`Wᴰ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Right,
    Dual,
}

impl Orientation {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Orientation::Right => "right",
            Orientation::Dual => "dual",
        }
    }
}

/// Three-mode tensor `n × m × m` with an orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperVec {
    n: usize,
    m: usize,
    orientation: Orientation,
    blocks: Vec<Block>,
}

impl HyperVec {
    pub fn zeros(n: usize, m: usize, orientation: Orientation) -> Self {
        HyperVec { n, m, orientation, blocks: vec![Block::Zero; n] }
    }

    pub fn from_blocks(m: usize, orientation: Orientation, blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            check_block(b, m, "HyperVec::from_blocks")?;
        }
        Ok(HyperVec { n: blocks.len(), m, orientation, blocks })
    }

    pub fn from_fn(n: usize, m: usize, orientation: Orientation, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let blocks = (0..n).map(|i| Block::classify(MatM::from_fn(m, |j1, j2| f(i, j1, j2)))).collect();
        HyperVec { n, m, orientation, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &Block {
        &self.blocks[i]
    }

    pub fn slice(&self, i: usize) -> MatM {
        self.blocks[i].to_mat(self.m)
    }

    pub fn structure(&self, i: usize) -> BlockStructure {
        self.blocks[i].structure()
    }

    pub fn get(&self, i: usize, j1: usize, j2: usize) -> C64 {
        self.blocks[i].get(self.m, j1, j2)
    }

    pub fn frobenius(&self) -> f64 {
        self.blocks.iter().map(Block::sum_sq).sum::<f64>().sqrt()
    }

    /// Same data, opposite orientation.
    pub fn reoriented(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn add(&self, other: &HyperVec) -> Result<HyperVec> {
        self.combine(other, 1.0, "HyperVec::add")
    }

    pub fn sub(&self, other: &HyperVec) -> Result<HyperVec> {
        self.combine(other, -1.0, "HyperVec::sub")
    }

    fn combine(&self, other: &HyperVec, s: f64, op: &'static str) -> Result<HyperVec> {
        if (self.n, self.m) != (other.n, other.m) {
            return Err(Error::shape(op, format!("({}, {}) vs ({}, {})", self.n, self.m, other.n, other.m)));
        }
        if self.orientation != other.orientation {
            return Err(Error::Orientation { op, expected: self.orientation.name() });
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.axpy(s, b)).collect();
        Ok(HyperVec { n: self.n, m: self.m, orientation: self.orientation, blocks })
    }

    pub(crate) fn expect(&self, o: Orientation, op: &'static str) -> Result<()> {
        if self.orientation != o {
            return Err(Error::Orientation { op, expected: o.name() });
        }
        Ok(())
    }

    pub(crate) fn from_parts(m: usize, orientation: Orientation, blocks: Vec<Block>) -> Self {
        HyperVec { n: blocks.len(), m, orientation, blocks }
    }
}
