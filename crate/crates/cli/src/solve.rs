use std::path::Path;

use distrode::dist_algebra::{DeltaJson, Side};
use distrode::solver::{
    residual, sample_solution, solve_bvp_global, solve_ivp_global, Condition, Existence, GeneralizedSolution,
    ProblemJson, SampleRow, SolveOptions,
};
use distrode::Scalar;
use serde::Serialize;

use crate::fail::{CliError, EXIT_AFFINE, EXIT_NO_SOLUTION, EXIT_OK, EXIT_RUNTIME};
use crate::report::{
    num, prepare_out, read_input, write_file, write_json, ExistenceTag, ResidualSummary, RunReport,
    ValidationSummary,
};

#[derive(Clone, Copy, Debug)]
pub struct SolveArgs {
    pub mesh: usize,
    pub opts: SolveOptions,
    pub residual_tol: f64,
}

#[derive(Serialize)]
struct SolveBody {
    validation: ValidationSummary,
    existence: ExistenceTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<ResidualSummary>,
}

#[derive(Serialize)]
struct DeltaFile {
    dist_order: usize,
    terms: Vec<DeltaJson>,
}

/// Uniform mesh over the domain with the singular points merged in.
fn mesh_points(sol: &GeneralizedSolution, size: usize) -> Vec<f64> {
    let (lo, hi) = sol.domain;
    let mut pts: Vec<f64> = match size {
        0 => vec![],
        1 => vec![lo],
        _ => (0..size).map(|k| lo + (hi - lo) * k as f64 / (size - 1) as f64).collect(),
    };
    if let Some(last) = pts.last_mut() {
        *last = hi;
    }
    pts.extend(sol.interfaces.iter().map(|s| s.x0));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn solution_csv(rows: &[SampleRow], n: usize) -> String {
    let mut s = String::from("x,side");
    for k in 0..n {
        s.push_str(&format!(",d{k}_re,d{k}_im"));
    }
    s.push('\n');
    for r in rows {
        let side = match r.side {
            Some(Side::Left) => "left",
            Some(Side::Right) => "right",
            None => "",
        };
        s.push_str(&num(r.x));
        s.push(',');
        s.push_str(side);
        for v in &r.jet {
            s.push_str(&format!(",{},{}", num(v.re), num(v.im)));
        }
        s.push('\n');
    }
    s
}

pub fn cmd_solve(problem: &Path, out: &Path, args: SolveArgs) -> Result<i32, CliError> {
    let (bytes, digest) = read_input(problem)?;
    let parsed: ProblemJson = serde_json::from_slice(&bytes).map_err(|e| CliError::json(problem, e))?;
    let spec = parsed.to_spec()?;
    let sol = match &parsed.condition {
        Condition::Ivp { x0, c } => {
            let c: Vec<Scalar> = c.iter().map(|&v| Scalar::new(v, 0.0)).collect();
            solve_ivp_global(&spec, *x0, &c, args.opts)?
        }
        Condition::Bvp { rows } => solve_bvp_global(&spec, rows, args.opts)?,
    };
    prepare_out(out)?;

    let mut outputs = Vec::new();
    let mut residuals = None;
    let mut message = None;
    let code = if sol.existence == Existence::None {
        message = Some("interface and side conditions are inconsistent".to_string());
        EXIT_NO_SOLUTION
    } else {
        let r = ResidualSummary::new(residual(&spec, &sol)?, args.residual_tol, sol.relative_residual);
        let rows = sample_solution(&sol, &mesh_points(&sol, args.mesh))?;
        write_file(out, "solution.csv", &solution_csv(&rows, sol.n))?;
        let delta = DeltaFile {
            dist_order: sol.delta.max_order().map_or(0, |k| k + 1),
            terms: sol
                .delta
                .terms()
                .iter()
                .map(|t| DeltaJson {
                    x: t.x,
                    order: t.order,
                    re: t.coef.re,
                    im: t.coef.im,
                })
                .collect(),
        };
        write_json(out, "delta.json", &delta)?;
        outputs.extend(["solution.csv".to_string(), "delta.json".to_string()]);
        let within = r.within();
        residuals = Some(r);
        if !within {
            message = Some("residual above tolerance".to_string());
            EXIT_RUNTIME
        } else if let Existence::AffineFamily(d) = sol.existence {
            message = Some(format!("affine family of dimension {d}; minimum-norm representative written"));
            EXIT_AFFINE
        } else {
            EXIT_OK
        }
    };
    outputs.push("report.json".to_string());
    let report = RunReport {
        command: "solve",
        input: Some(digest),
        body: SolveBody {
            validation: ValidationSummary::of(&sol),
            existence: sol.existence.into(),
            residuals,
        },
        outputs,
        exit_code: code,
        message,
    };
    write_json(out, "report.json", &report)?;
    Ok(code)
}
