//! Slice-structured tensors and the ⋆-products between them.
//!
//! All products are block-matrix products in disguise: a [`Tensor4`] is an
//! `n1 × n2` matrix of `m × m` blocks, a right [`HyperVec`] a column of
//! blocks and a dual one a row of blocks. Reductions over the outer index run
//! in ascending order, so results do not depend on the thread count.

mod block;
mod hypervec;
pub mod io;
mod matm;
mod products;
mod tensor4;

pub use block::{Block, BlockStructure};
pub use hypervec::{HyperVec, Orientation};
pub use matm::{MatM, RightSolver};
pub use products::{
    frobenius, from_block_matrix, hypervec_from_block_matrix, hypervec_to_block_matrix, lift, lift_dual, scale_t,
    scale_v, star_identity, star_inner, star_mul_tt, star_mul_tv, star_mul_vt, star_pow, to_block_matrix, Frobenius,
    Side,
};
pub use tensor4::Tensor4;
