use std::path::Path;

use distrode::beam::{beam_closed_form, curves_csv, s_parameter, solve_beam, BeamConstants, BeamSpec};
use distrode::solver::SolveOptions;
use serde::Serialize;

use crate::fail::{CliError, EXIT_OK, EXIT_RUNTIME};
use crate::report::{
    prepare_out, read_input, write_file, write_json, ExistenceTag, ResidualSummary, RunReport, ValidationSummary,
};

/// Relative agreement required between solver and closed-form constants.
pub const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct BeamArgs {
    pub npoints: usize,
    pub opts: SolveOptions,
    pub residual_tol: f64,
}

#[derive(Serialize)]
struct Comparison {
    max_rel_diff: f64,
    tolerance: f64,
    agrees: bool,
}

#[derive(Serialize)]
struct ConstantsFile {
    spec: BeamSpec,
    #[serde(rename = "S")]
    s: f64,
    solver: BeamConstants,
    closed_form: BeamConstants,
    comparison: Comparison,
    slope_jump: f64,
    predicted_slope_jump: f64,
    midpoint_deflection: f64,
}

#[derive(Serialize)]
struct BeamBody {
    validation: ValidationSummary,
    existence: ExistenceTag,
    residuals: ResidualSummary,
    closed_form: Comparison,
}

pub fn cmd_beam(beam_file: &Path, out: &Path, args: BeamArgs) -> Result<i32, CliError> {
    let (bytes, digest) = read_input(beam_file)?;
    let spec: BeamSpec = serde_json::from_slice(&bytes).map_err(|e| CliError::json(beam_file, e))?;
    spec.check()?;
    let sol = solve_beam(&spec, args.opts)?;
    prepare_out(out)?;

    let closed = beam_closed_form(&spec);
    let d = sol.constants.max_rel_diff(&closed, &spec);
    let comparison = || Comparison {
        max_rel_diff: d,
        tolerance: AGREEMENT_TOL,
        agrees: d <= AGREEMENT_TOL,
    };
    write_file(out, "curves.csv", &curves_csv(&sol.emit_curves(args.npoints)?))?;
    let constants = ConstantsFile {
        spec: spec.clone(),
        s: s_parameter(&spec),
        solver: sol.constants,
        closed_form: closed,
        comparison: comparison(),
        slope_jump: sol.slope_jump,
        predicted_slope_jump: sol.predicted_slope_jump(),
        midpoint_deflection: sol.constants.eps_plus,
    };
    write_json(out, "constants.json", &constants)?;

    let residuals = ResidualSummary::new(sol.residual, args.residual_tol, sol.w.relative_residual);
    let (code, message) = if !residuals.within() {
        (EXIT_RUNTIME, Some("residual above tolerance".to_string()))
    } else if d > AGREEMENT_TOL {
        (EXIT_RUNTIME, Some("solver and closed-form constants disagree".to_string()))
    } else {
        (EXIT_OK, None)
    };
    let report = RunReport {
        command: "beam",
        input: Some(digest),
        body: BeamBody {
            validation: ValidationSummary::of(&sol.w),
            existence: sol.w.existence.into(),
            residuals,
            closed_form: comparison(),
        },
        outputs: vec!["curves.csv".into(), "constants.json".into(), "report.json".into()],
        exit_code: code,
        message,
    };
    write_json(out, "report.json", &report)?;
    Ok(code)
}
