use std::path::Path;

use distrode::dist_algebra::{DistA, DistAJson};
use distrode::exec::ExecMode;
use distrode::regularization::{convergence_report, dyadic_schedule, RegSide};
use distrode::smooth_fn::parse_expr;
use distrode::solver::{
    expand_divergence, solve_bvp_global, solve_ivp_global, Condition, Existence, ProblemJson, SolveOptions,
};
use distrode::Scalar;
use serde::{Deserialize, Serialize};

use crate::fail::{CliError, EXIT_OK, EXIT_RUNTIME};
use crate::report::{num, prepare_out, read_input, write_file, write_json, RunReport};

pub const DEFAULT_TEST: &str = "exp(-1*x^2/4)";

#[derive(Clone, Debug)]
pub struct CheckArgs {
    pub schedule: Vec<f64>,
    pub final_tol: f64,
    pub opts: SolveOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SideChoice {
    Plus,
    Minus,
    #[default]
    Both,
}

impl SideChoice {
    fn sides(self) -> &'static [RegSide] {
        match self {
            SideChoice::Plus => &[RegSide::Plus],
            SideChoice::Minus => &[RegSide::Minus],
            SideChoice::Both => &[RegSide::Plus, RegSide::Minus],
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    #[serde(default)]
    name: Option<String>,
    coefficient: DistAJson,
    psi: DistAJson,
    #[serde(default)]
    side: SideChoice,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    pairs: Vec<PairJson>,
    #[serde(default)]
    tests: Vec<String>,
}

struct Triple {
    name: String,
    f: DistA,
    psi: DistA,
    sides: Vec<RegSide>,
}

#[derive(Serialize)]
struct Sequence {
    pair: String,
    test: String,
    side: RegSide,
    nonincreasing: bool,
    final_residual: f64,
    fitted_slope: Option<f64>,
}

#[derive(Serialize)]
struct CheckBody {
    schedule: Vec<f64>,
    final_tolerance: f64,
    sequences: Vec<Sequence>,
    all_pass: bool,
}

/// `"lo..hi"` gives `2^-lo, ..., 2^-hi`; otherwise a comma-separated list
/// of widths.
pub fn parse_schedule(src: &str) -> Result<Vec<f64>, CliError> {
    let src = src.trim();
    let sched = if let Some((lo, hi)) = src.split_once("..") {
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| CliError::validation(format!("schedule bound {s:?}: {e}")))
        };
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if hi < lo {
            vec![]
        } else {
            dyadic_schedule(lo, hi)
        }
    } else {
        src.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::validation(format!("schedule entry {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if sched.is_empty() {
        return Err(CliError::validation("empty regularization schedule"));
    }
    if sched.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(CliError::validation("schedule widths must be positive"));
    }
    Ok(sched)
}

fn pair_triples(file: &PairFile) -> Result<Vec<Triple>, CliError> {
    file.pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(Triple {
                name: p.name.clone().unwrap_or_else(|| format!("pair{i}")),
                f: p.coefficient.to_dist()?,
                psi: p.psi.to_dist()?,
                sides: p.side.sides().to_vec(),
            })
        })
        .collect()
}

/// Coefficients of a solved problem against the matching derivative of the
/// solution: `a_i` from the plus side, `b_i` from the minus side.
fn problem_triples(problem: &ProblemJson, opts: SolveOptions) -> Result<Vec<Triple>, CliError> {
    let spec = expand_divergence(&problem.to_spec()?)?;
    let sol = match &problem.condition {
        Condition::Ivp { x0, c } => {
            let c: Vec<Scalar> = c.iter().map(|&v| Scalar::new(v, 0.0)).collect();
            solve_ivp_global(&spec, *x0, &c, opts)?
        }
        Condition::Bvp { rows } => solve_bvp_global(&spec, rows, opts)?,
    };
    if sol.existence == Existence::None {
        return Err(CliError::runtime("problem has no solution to regularize against"));
    }
    let psi = sol.to_dist()?;
    let mut out = Vec::new();
    let mut d = psi;
    for i in 0..=spec.n {
        for (f, side, label) in [(&spec.a[i], RegSide::Plus, "a"), (&spec.b[i], RegSide::Minus, "b")] {
            if f.deltas().is_empty() && f.sing_supp().is_empty() && f.pieces().iter().all(|p| p.is_zero()) {
                continue;
            }
            out.push(Triple {
                name: format!("{label}{i}"),
                f: f.clone(),
                psi: d.clone(),
                sides: vec![side],
            });
        }
        if i < spec.n {
            d = d.derivative(1)?;
        }
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn cmd_check_regularization(input: &Path, out: &Path, args: &CheckArgs) -> Result<i32, CliError> {
    let (bytes, digest) = read_input(input)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| CliError::json(input, e))?;
    let (triples, tests) = if value.get("n").is_some() {
        let problem: ProblemJson = serde_json::from_slice(&bytes).map_err(|e| CliError::json(input, e))?;
        (problem_triples(&problem, args.opts)?, vec![])
    } else {
        let file: PairFile = serde_json::from_slice(&bytes).map_err(|e| CliError::json(input, e))?;
        (pair_triples(&file)?, file.tests)
    };
    let tests = if tests.is_empty() { vec![DEFAULT_TEST.to_string()] } else { tests };
    let parsed_tests = tests
        .iter()
        .map(|t| parse_expr(t).map_err(|e| CliError::validation(format!("test function {t:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    prepare_out(out)?;

    let mut csv = String::from("pair,test,side,eps,residual,slope\n");
    let mut sequences = Vec::new();
    for tr in &triples {
        for (name, t) in tests.iter().zip(&parsed_tests) {
            for &side in &tr.sides {
                let rep = convergence_report(&tr.f, &tr.psi, t, &args.schedule, side, ExecMode::auto())?;
                let side_name = match side {
                    RegSide::Plus => "plus",
                    RegSide::Minus => "minus",
                };
                for r in &rep.rows {
                    let slope = r.slope.map_or("nan".to_string(), num);
                    csv.push_str(&format!(
                        "{},{},{side_name},{},{},{slope}\n",
                        csv_field(&tr.name),
                        csv_field(name),
                        num(r.eps),
                        num(r.residual)
                    ));
                }
                sequences.push(Sequence {
                    pair: tr.name.clone(),
                    test: name.clone(),
                    side,
                    nonincreasing: rep.is_nonincreasing(),
                    final_residual: rep.final_residual(),
                    fitted_slope: rep.fitted_slope(),
                });
            }
        }
    }
    write_file(out, "convergence.csv", &csv)?;
    let all_pass = sequences
        .iter()
        .all(|s| s.nonincreasing && s.final_residual <= args.final_tol);
    let code = if all_pass { EXIT_OK } else { EXIT_RUNTIME };
    let report = RunReport {
        command: "check-reg",
        input: Some(digest),
        body: CheckBody {
            schedule: args.schedule.clone(),
            final_tolerance: args.final_tol,
            sequences,
            all_pass,
        },
        outputs: vec!["convergence.csv".into(), "report.json".into()],
        exit_code: code,
        message: (!all_pass).then(|| "some residual sequence failed to converge".to_string()),
    };
    write_json(out, "report.json", &report)?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_range() {
        let s = parse_schedule("3..5").unwrap();
        assert_eq!(s, vec![0.125, 0.0625, 0.03125]);
    }

    #[test]
    fn explicit_list() {
        assert_eq!(parse_schedule("0.1, 0.05,0.01").unwrap(), vec![0.1, 0.05, 0.01]);
    }

    #[test]
    fn empty_schedules_are_rejected() {
        for s in ["", " , ", "5..3"] {
            assert_eq!(parse_schedule(s).unwrap_err().code, crate::fail::EXIT_VALIDATION, "{s:?}");
        }
        assert!(parse_schedule("0.1,-0.2").is_err());
        assert!(parse_schedule("a..3").is_err());
    }
}
