//! Equispaced meshes and the rectangle-rule discretization of `A(t)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::problems::Problem;
use crate::tensor::{Block, MatM, Tensor4};
use crate::{Error, Result};

/// Where the `M` sample points sit in `[a, b]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshRule {
    /// `h = (b − a)/(M − 1)`, `τ_i = a + (i − 1)h`: both endpoints included.
    Closed,
    /// `h = (b − a)/M`, `τ_i = a + i·h`: right endpoints of `M` equal cells.
    /// This is the rule under which the rectangle-rule approximation and
    /// its error tables line up, so the pipeline uses it by default.
    #[default]
    RightEndpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    pub h: f64,
    pub tau: Vec<f64>,
    pub rule: MeshRule,
}

/// Closed mesh with `τ₁ = a` and `τ_M = b`.
pub fn build_mesh(a: f64, b: f64, m: usize) -> Result<Mesh> {
    build_mesh_with(a, b, m, MeshRule::Closed)
}

pub fn build_mesh_with(a: f64, b: f64, m: usize, rule: MeshRule) -> Result<Mesh> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::Input(format!("degenerate interval [{a}, {b}]")));
    }
    let min = if rule == MeshRule::Closed { 2 } else { 1 };
    if m < min {
        return Err(Error::Input(format!("mesh needs at least {min} points, got {m}")));
    }
    let (h, tau) = match rule {
        MeshRule::Closed => {
            let h = (b - a) / (m - 1) as f64;
            let mut tau: Vec<f64> = (0..m).map(|i| a + i as f64 * h).collect();
            tau[m - 1] = b;
            (h, tau)
        }
        MeshRule::RightEndpoint => {
            let h = (b - a) / m as f64;
            let mut tau: Vec<f64> = (1..=m).map(|i| a + i as f64 * h).collect();
            tau[m - 1] = b;
            (h, tau)
        }
    };
    Ok(Mesh { a, b, m, h, tau, rule })
}

/// `h` times the lower-triangular all-ones matrix.
pub fn theta_matrix(mesh: &Mesh) -> MatM {
    let h = C64::new(mesh.h, 0.0);
    MatM::from_fn(mesh.m, |i, j| if j <= i { h } else { C64::new(0.0, 0.0) })
}

/// The `N × N × M × M` tensor whose slice `(k, l)` has entries
/// `A_kl(τ_i)·h` on and below the diagonal and zeros above.
///
/// Entries without terms become zero slices; every other slice is tagged
/// lower triangular.
pub fn discretize_problem(p: &Problem, mesh: &Mesh) -> Result<Tensor4> {
    let m = mesh.m;
    let entries: Vec<_> = p.nonzero_entries().map(|(kl, _)| kl).collect();
    let slices: Vec<((usize, usize), MatM)> = entries
        .par_iter()
        .map(|&(k, l)| {
            let mut mat = MatM::zeros(m);
            for (i, &t) in mesh.tau.iter().enumerate() {
                let x = p.eval_entry(k, l, t);
                if !(x.re.is_finite() && x.im.is_finite()) {
                    return Err(Error::NonFiniteSample { k, l, t });
                }
                let x = x * mesh.h;
                mat.data_mut()[i * m..=i * m + i].fill(x);
            }
            Ok(((k, l), mat))
        })
        .collect::<Result<_>>()?;
    let mut out = Tensor4::zeros(p.n, p.n, m);
    for ((k, l), mat) in slices {
        out.set_block(k, l, Block::Lower(mat))?;
    }
    Ok(out)
}
