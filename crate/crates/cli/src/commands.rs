use std::io::Write;
use std::path::Path;

use serde::Serialize;
use toelanczos_core::diagnostics::{convergence_slope, ErrorReport, REPORT_CSV_HEADER};
use toelanczos_core::discretize::discretize_problem;
use toelanczos_core::lanczos::{tensor_lanczos, LanczosOptions, LanczosStatus};
use toelanczos_core::resolvent::{approx_solution, SolutionVec};
use toelanczos_core::tensor::{io::load_t4f, Tensor4};
use toelanczos_core::tt::{compression_factor, tt_svd};
use toelanczos_core::Error;

use crate::config::{check_budget, mesh_for, resolve, Resolved};
use crate::output::{emit, json_bytes};
use crate::{CliError, CommonArgs, ExitCode, Format, MeshArg, TtArgs};

/// One pipeline execution.
pub struct Outcome {
    pub report: ErrorReport,
    pub solution: Option<SolutionVec>,
    pub reference: Option<&'static str>,
    pub code: ExitCode,
}

fn run_one(res: &Resolved, m: usize, n: usize, args: &CommonArgs) -> Result<Outcome, CliError> {
    let p = &res.problem;
    let mesh = mesh_for(p, m, args.problem.mesh)?;
    let a = discretize_problem(p, &mesh)?;
    let opts = LanczosOptions { eps_lucky: args.eps_lucky, eps_serious: args.eps_serious, ..Default::default() };
    let (result, mut code) = match tensor_lanczos(&a, &p.v, &p.w, n, &opts) {
        Ok(r) => {
            let code = match r.status {
                LanczosStatus::LuckyBreakdown { .. } => ExitCode::Lucky,
                _ => ExitCode::Ok,
            };
            (r, code)
        }
        Err(Error::SeriousBreakdown { partial, .. }) => (*partial, ExitCode::Serious),
        Err(e) => return Err(e.into()),
    };
    let solution = match approx_solution(&result.tri, &mesh, result.normalization) {
        Ok(s) => Some(s),
        Err(e @ Error::ResolventSingular { .. }) => {
            if code == ExitCode::Ok {
                code = ExitCode::ResolventSingular;
            }
            eprintln!("warning: {e}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let reference = match &solution {
        Some(_) => res.reference(&mesh, args.reference, args.rtol, args.atol)?,
        None => None,
    };
    let pair = reference.as_ref().zip(solution.as_ref()).map(|((_, r), s)| (r.as_slice(), s.values.as_slice()));
    let report = ErrorReport::compute(&res.label, &result, &a, &p.v, &p.w, pair)?;
    Ok(Outcome { report, solution, reference: reference.map(|(k, _)| k), code })
}

fn setup(args: &CommonArgs) -> Result<(Resolved, usize), CliError> {
    let pa = &args.problem;
    let res = resolve(pa.problem.as_deref(), pa.problem_file.as_deref(), pa.seed)?;
    let n = args.n.unwrap_or_else(|| res.default_iterations());
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    for &m in &args.m {
        if m < 2 {
            return Err(CliError::Usage(format!("M must be at least 2, got {m}")));
        }
    }
    check_budget(res.problem.n, &args.m, n, pa.allow_large)?;
    Ok((res, n))
}

fn mesh_name(m: MeshArg) -> &'static str {
    match m {
        MeshArg::Right => "right",
        MeshArg::Closed => "closed",
    }
}

#[derive(Serialize)]
struct RunDoc<'a> {
    exit: &'static str,
    reference: Option<&'static str>,
    mesh: &'static str,
    h: Option<f64>,
    #[serde(flatten)]
    report: &'a ErrorReport,
}

fn report_csv(rows: &[&ErrorReport]) -> Vec<u8> {
    let mut s = format!("{REPORT_CSV_HEADER}\n");
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s.into_bytes()
}

/// `run`: one pipeline execution. Writes `report.{csv,json}` and
/// `solution.csv` into the output directory, or the report to stdout.
pub fn cmd_run(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitCode, CliError> {
    if args.m.len() != 1 {
        return Err(CliError::Usage("run takes a single --M; use `convergence` for sweeps".into()));
    }
    let (res, n) = setup(args)?;
    let o = run_one(&res, args.m[0], n, args)?;
    let dir = args.problem.output.as_deref();
    let (name, bytes) = match args.problem.format {
        Format::Csv => ("report.csv", report_csv(&[&o.report])),
        Format::Json => {
            let doc = RunDoc {
                exit: o.code.name(),
                reference: o.reference,
                mesh: mesh_name(args.problem.mesh),
                h: o.solution.as_ref().map(|s| s.mesh.h),
                report: &o.report,
            };
            ("report.json", json_bytes(&doc))
        }
    };
    emit(dir, name, &bytes, out)?;
    if let (Some(d), Some(s)) = (dir, &o.solution) {
        emit(Some(d), "solution.csv", s.to_csv().as_bytes(), out)?;
    }
    let sol = o.report.err_sol.map_or("n/a".to_string(), |e| format!("{e:.4e}"));
    writeln!(err, "{} M={} n={} status={} err_sol={sol}", res.label, args.m[0], o.report.meta.n, o.report.status_name())?;
    Ok(o.code)
}

#[derive(Serialize)]
struct ConvergenceDoc<'a> {
    problem: &'a str,
    n: usize,
    reference: Option<&'static str>,
    rows: Vec<&'a ErrorReport>,
    slope: Option<f64>,
}

/// `convergence`: one report row per M and the log-log slope of `err_sol`.
///
/// CSV output is `convergence.csv` (report rows) plus `slope.csv`
/// (`problem,n,reference,points,slope`); JSON output is a single
/// `convergence.json`. Without an output directory the table goes to
/// stdout and the slope to stderr.
pub fn cmd_convergence(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitCode, CliError> {
    let (res, n) = setup(args)?;
    let mut outcomes = Vec::with_capacity(args.m.len());
    for &m in &args.m {
        let o = run_one(&res, m, n, args)?;
        writeln!(err, "{} M={m} status={} err_sol={:?}", res.label, o.report.status_name(), o.report.err_sol)?;
        outcomes.push(o);
    }
    let points: Vec<(usize, f64)> =
        outcomes.iter().filter_map(|o| o.report.err_sol.filter(|e| *e > 0.0).map(|e| (o.report.meta.m, e))).collect();
    let slope = convergence_slope(&points).ok();
    let reference = outcomes.iter().find_map(|o| o.reference);
    let rows: Vec<&ErrorReport> = outcomes.iter().map(|o| &o.report).collect();
    let dir = args.problem.output.as_deref();
    match args.problem.format {
        Format::Csv => {
            emit(dir, "convergence.csv", &report_csv(&rows), out)?;
            let slope_s = slope.map_or(String::new(), |s| format!("{s:e}"));
            let line = format!(
                "problem,n,reference,points,slope\n{},{n},{},{},{slope_s}\n",
                res.label,
                reference.unwrap_or("none"),
                points.len()
            );
            match dir {
                Some(d) => emit(Some(d), "slope.csv", line.as_bytes(), out)?,
                None => write!(err, "{line}")?,
            }
        }
        Format::Json => {
            let doc = ConvergenceDoc { problem: &res.label, n, reference, rows, slope };
            emit(dir, "convergence.json", &json_bytes(&doc), out)?;
        }
    }
    let code = outcomes.iter().map(|o| o.code).find(|c| *c != ExitCode::Ok).unwrap_or(ExitCode::Ok);
    Ok(code)
}

#[derive(Serialize)]
struct TtRow {
    problem: String,
    #[serde(rename = "M")]
    m: usize,
    tol: f64,
    nnz: usize,
    ranks: [usize; 5],
    params: usize,
    cf: f64,
}

pub const TT_CSV_HEADER: &str = "problem,M,tol,nnz,ranks,params,cf";

fn tt_rows(label: &str, a: &Tensor4, tols: &[f64]) -> Result<Vec<TtRow>, CliError> {
    tols.iter()
        .map(|&tol| {
            let t = tt_svd(a, tol)?;
            Ok(TtRow {
                problem: label.to_string(),
                m: a.m(),
                tol,
                nnz: a.nnz(),
                ranks: t.ranks,
                params: t.params(),
                cf: compression_factor(&t, a)?,
            })
        })
        .collect()
}

/// `ttranks`: TT ranks, parameter counts and compression factors for
/// every `(M, tol)` pair. Writes `ttranks.{csv,json}`.
pub fn cmd_ttranks(args: &TtArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitCode, CliError> {
    if args.tol_tt.iter().any(|t| !(*t > 0.0)) {
        return Err(CliError::Usage("--tol-tt values must be positive".into()));
    }
    let mut rows = Vec::new();
    if let Some(path) = &args.tensor {
        let a = load_t4f(path)?;
        let label = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("tensor");
        rows.extend(tt_rows(label, &a, &args.tol_tt)?);
    } else {
        if args.m.is_empty() {
            return Err(CliError::Usage("--M is required unless --tensor is given".into()));
        }
        let res = resolve(args.problem.as_deref(), args.problem_file.as_deref(), args.seed)?;
        check_budget(res.problem.n, &args.m, 1, args.allow_large)?;
        for &m in &args.m {
            let mesh = mesh_for(&res.problem, m, args.mesh)?;
            let a = discretize_problem(&res.problem, &mesh)?;
            rows.extend(tt_rows(&res.label, &a, &args.tol_tt)?);
        }
    }
    for r in &rows {
        writeln!(err, "{} M={} tol={:e} ranks={:?} cf={:.5}", r.problem, r.m, r.tol, r.ranks, r.cf)?;
    }
    let dir = args.output.as_deref();
    match args.format {
        Format::Csv => {
            let mut s = format!("{TT_CSV_HEADER}\n");
            for r in &rows {
                let ranks: Vec<String> = r.ranks.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!(
                    "{},{},{:e},{},{},{},{:e}\n",
                    r.problem,
                    r.m,
                    r.tol,
                    r.nnz,
                    ranks.join(" "),
                    r.params,
                    r.cf
                ));
            }
            emit(dir, "ttranks.csv", s.as_bytes(), out)?;
        }
        Format::Json => emit(dir, "ttranks.json", &json_bytes(&rows), out)?,
    }
    Ok(ExitCode::Ok)
}
