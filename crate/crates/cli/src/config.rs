use std::path::Path;

use num_complex::Complex64 as C64;
use toelanczos_core::discretize::{build_mesh_with, Mesh, MeshRule};
use toelanczos_core::problems::{
    analytic_const3, analytic_cos1, analytic_nmr1, analytic_reference, builtin, nmr_generate, rk45_reference, NmrKind,
    NmrOverrides, NmrParams, Problem, ReferenceKind,
};

use crate::{CliError, MeshArg, ReferenceArg};

/// Runs with `M³·N²·n` above this need `--allow-large`.
pub const WORK_BUDGET: f64 = 1e10;

/// A problem ready to run, with the generator parameters when it came
/// from one.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub label: String,
    pub problem: Problem,
    pub nmr: Option<NmrParams>,
}

fn nmr_kind(id: &str) -> Option<NmrKind> {
    match id {
        "nmr1" => Some(NmrKind::One),
        "nmr2" => Some(NmrKind::Two),
        "nmr3" => Some(NmrKind::Three),
        _ => None,
    }
}

pub fn resolve(problem: Option<&str>, file: Option<&Path>, seed: u64) -> Result<Resolved, CliError> {
    match (problem, file) {
        (Some(id), None) => {
            if let Some(kind) = nmr_kind(id) {
                let params = nmr_generate(kind, seed, &NmrOverrides::default())?;
                return Ok(Resolved { label: id.to_string(), problem: params.problem.clone(), nmr: Some(params) });
            }
            let problem = builtin(id).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Resolved { label: id.to_string(), problem, nmr: None })
        }
        (None, Some(path)) => {
            let problem = Problem::load(path)?;
            Ok(Resolved { label: problem.id.clone(), problem, nmr: None })
        }
        _ => Err(CliError::Usage("exactly one of --problem and --problem-file is required".into())),
    }
}

impl Resolved {
    pub fn default_iterations(&self) -> usize {
        self.nmr.as_ref().map_or(self.problem.n, |p| p.kind.default_iterations())
    }

    /// The closed-form reference, if this problem has one.
    fn analytic(&self, mesh: &Mesh) -> Option<Vec<C64>> {
        if let Some(params) = &self.nmr {
            return (params.kind == NmrKind::One).then(|| analytic_nmr1(mesh, params).values);
        }
        if let Some(r) = analytic_reference(&self.problem, mesh) {
            return Some(r.values);
        }
        // Builtins loaded from a file under their own id.
        match self.problem.id.as_str() {
            "const3" if builtin("const3").ok()? == self.problem => Some(analytic_const3(mesh).values),
            "cos1" if builtin("cos1").ok()? == self.problem => Some(analytic_cos1(mesh).values),
            _ => None,
        }
    }

    /// `(kind name, samples)` of the requested reference, or `None` for
    /// `--reference none`.
    pub fn reference(
        &self,
        mesh: &Mesh,
        kind: ReferenceArg,
        rtol: f64,
        atol: f64,
    ) -> Result<Option<(&'static str, Vec<C64>)>, CliError> {
        let rk45 = || -> Result<_, CliError> {
            let r = rk45_reference(&self.problem, mesh, rtol, atol)?;
            debug_assert_eq!(r.kind, ReferenceKind::Rk45 { rtol, atol });
            Ok(Some(("rk45", r.values)))
        };
        match kind {
            ReferenceArg::None => Ok(None),
            ReferenceArg::Rk45 => rk45(),
            ReferenceArg::Analytic => match self.analytic(mesh) {
                Some(v) => Ok(Some(("analytic", v))),
                None => Err(CliError::Usage(format!("problem `{}` has no analytic reference", self.label))),
            },
            ReferenceArg::Auto => match self.analytic(mesh) {
                Some(v) => Ok(Some(("analytic", v))),
                None => rk45(),
            },
        }
    }
}

pub fn mesh_rule(m: MeshArg) -> MeshRule {
    match m {
        MeshArg::Right => MeshRule::RightEndpoint,
        MeshArg::Closed => MeshRule::Closed,
    }
}

pub fn mesh_for(p: &Problem, m: usize, rule: MeshArg) -> Result<Mesh, CliError> {
    if m < 2 {
        return Err(CliError::Usage(format!("M must be at least 2, got {m}")));
    }
    Ok(build_mesh_with(p.interval.0, p.interval.1, m, mesh_rule(rule))?)
}

pub fn check_budget(n_outer: usize, ms: &[usize], n: usize, allow_large: bool) -> Result<(), CliError> {
    if allow_large {
        return Ok(());
    }
    for &m in ms {
        let work = (m as f64).powi(3) * (n_outer as f64).powi(2) * n as f64;
        if work > WORK_BUDGET {
            return Err(CliError::Usage(format!(
                "M = {m} needs about {work:.1e} operations (budget {WORK_BUDGET:.0e}); pass --allow-large to run it"
            )));
        }
    }
    Ok(())
}
