use bjorth::catalog::{self, SuiteReport};
use bjorth::cones::{bj_orthogonal_vectors, in_minus, in_plus, oracle_orthogonal};
use bjorth::operators::{bj_orthogonal_operators, bj_orthogonal_operators_oracle, operator_norm};
use bjorth::symmetry::{scan_symmetric_points, SymmetryKind};
use bjorth::{Settings, Space, Verdict};

use crate::args::{Kind, Mode, SpaceArgs, Suite};
use crate::input;
use crate::report::{CommandReport, Report};
use crate::UsageError;

fn lib<T>(r: bjorth::Result<T>) -> Result<T, UsageError> {
    r.map_err(|e| UsageError(e.to_string()))
}

pub fn check_orth(
    space_args: &SpaceArgs,
    mode: Mode,
    operands: Option<&str>,
    matrix: Option<&str>,
    matrix2: Option<&str>,
    settings: Settings,
) -> Result<Report, UsageError> {
    let space = input::space(space_args, settings)?;
    let mut r = CommandReport::new("check-orth");
    r.param("space", space.descriptor());
    match mode {
        Mode::Vectors => {
            let text = operands.ok_or_else(|| UsageError("--operands is required in vectors mode".into()))?;
            let (x, y) = input::vector_operands(text)?;
            input::check_dim("--operands: field `x`", x.len(), &space)?;
            input::check_dim("--operands: field `y`", y.len(), &space)?;
            r.param("mode", "vectors");
            r.param("x", &x);
            r.param("y", &y);
            vectors(&space, &x, &y, &mut r)?;
        }
        Mode::Operators => {
            let (t, a) = match (operands, matrix, matrix2) {
                (Some(text), None, None) => input::operator_operands(text)?,
                (None, Some(m1), Some(m2)) => (input::matrix("matrix", m1)?, input::matrix("matrix2", m2)?),
                _ => {
                    return Err(UsageError(
                        "operators mode needs either --operands or both --matrix and --matrix2".into(),
                    ))
                }
            };
            input::check_dim("T", t.dim(), &space)?;
            input::check_dim("A", a.dim(), &space)?;
            r.param("mode", "operators");
            r.param("t", &t);
            r.param("a", &a);
            let route = lib(bj_orthogonal_operators(&space, &t, &a))?;
            let oracle = lib(bj_orthogonal_operators_oracle(&space, &t, &a))?;
            r.verdict = Some(route.verdict.verdict);
            if !route.verdict.is_indeterminate() && !oracle.is_indeterminate() && route.verdict.verdict != oracle.verdict {
                r.notes.push("the witness route and the line-search oracle disagree".into());
            }
            r.result("norm_t", lib(operator_norm(&space, &t))?);
            r.result("witness_route", route);
            r.result("line_search", oracle);
        }
    }
    Ok(Report::Command(r))
}

fn vectors(space: &Space, x: &[f64], y: &[f64], r: &mut CommandReport) -> Result<(), UsageError> {
    let verdict = lib(bj_orthogonal_vectors(space, x, y))?;
    r.verdict = Some(verdict.verdict);
    r.result("verdict", verdict);
    let zero = |v: &[f64]| v.iter().all(|c| *c == 0.0);
    if zero(x) {
        r.notes.push("x = 0: 0 ⊥_B y holds for every y by convention".into());
        return Ok(());
    }
    if zero(y) {
        r.notes.push("y = 0: x ⊥_B 0 holds for every x".into());
        return Ok(());
    }
    r.result("derivative_interval", lib(space.derivative_interval(x, y))?);
    r.result("plus_cone", lib(in_plus(space, x, y))?);
    r.result("minus_cone", lib(in_minus(space, x, y))?);
    r.result("line_search", lib(oracle_orthogonal(space, x, y))?);
    r.result("reverse", lib(bj_orthogonal_vectors(space, y, x))?);
    Ok(())
}

pub fn operator_norm_cmd(space_args: &SpaceArgs, matrix: &str, settings: Settings) -> Result<Report, UsageError> {
    let space = input::space(space_args, settings)?;
    let t = input::matrix("matrix", matrix)?;
    input::check_dim("--matrix", t.dim(), &space)?;
    let mut r = CommandReport::new("operator-norm");
    r.param("space", space.descriptor());
    r.param("matrix", &t);
    r.result("attainment", lib(operator_norm(&space, &t))?);
    Ok(Report::Command(r))
}

pub fn verify(suite: Suite, p: Option<f64>, n: usize, trials: Option<usize>, seed: u64, s: Settings) -> Result<Report, UsageError> {
    let res = s.resolution;
    let one = |r: bjorth::Result<SuiteReport>| lib(r).map(Report::Suite);
    match suite {
        Suite::Example11 => one(catalog::example_1_1_suite(&s)),
        Suite::Example22 => one(catalog::example_2_2_suite(trials.unwrap_or(1000), seed, &s)),
        Suite::Prop28 => one(catalog::prop_2_8_scan(p.unwrap_or(3.0), res, &s)),
        Suite::Prop29 => one(catalog::prop_2_9_scan(p.unwrap_or(3.0), res, &s)),
        Suite::Thm210 => one(catalog::thm_2_10_cases(p.unwrap_or(2.0), &s)),
        Suite::BhatiaSemrl => one(catalog::hilbert_bhatia_semrl_suite(n, trials.unwrap_or(1000), seed, &s)),
        Suite::Invertibility => one(catalog::invertibility_suite(p.unwrap_or(3.0), trials.unwrap_or(100), seed, &s)),
        Suite::RightAsymmetry => one(catalog::right_asymmetry_suite(&s)),
        Suite::All => {
            let mut all = vec![catalog::example_1_1_suite(&s), catalog::example_2_2_suite(1000, seed, &s)];
            all.extend([1.5, 3.0, 4.0].map(|p| catalog::prop_2_8_scan(p, res, &s)));
            all.extend([3.0, 4.0].map(|p| catalog::prop_2_9_scan(p, res, &s)));
            all.extend([2.0, 3.0, 4.0].map(|p| catalog::thm_2_10_cases(p, &s)));
            all.extend([2, 3].map(|n| catalog::hilbert_bhatia_semrl_suite(n, 1000, seed, &s)));
            all.extend([3.0, 4.0].map(|p| catalog::invertibility_suite(p, 100, seed, &s)));
            all.push(catalog::right_asymmetry_suite(&s));
            Ok(Report::Suites(all.into_iter().map(lib).collect::<Result<_, _>>()?))
        }
    }
}

pub fn scan_symmetric(space_args: &SpaceArgs, kind: Kind, settings: Settings) -> Result<Report, UsageError> {
    let space = input::space(space_args, settings)?;
    let kind = match kind {
        Kind::Left => SymmetryKind::Left,
        Kind::Right => SymmetryKind::Right,
    };
    let scan = lib(scan_symmetric_points(&space, kind, settings.resolution))?;
    let mut r = CommandReport::new("scan-symmetric");
    r.param("space", space.descriptor());
    r.param("kind", kind);
    r.param("resolution", settings.resolution);
    if scan.mode == "sampled" {
        let msg = format!("dimension {} has no exhaustive scan; sampled {} points instead", space.dim(), scan.scanned);
        eprintln!("warning: {msg}");
        r.notes.push(msg);
    }
    if scan.all_symmetric {
        r.notes.push(format!("all {} scanned points symmetric", scan.scanned));
    } else {
        r.notes.push(format!("{} symmetric clusters among {} scanned points", scan.clusters.len(), scan.scanned));
    }
    if scan.indeterminate > 0 {
        r.verdict = Some(Verdict::Indeterminate);
        r.notes.push(format!("{} points had indeterminate reverse tests", scan.indeterminate));
    }
    r.result("scan", scan);
    Ok(Report::Command(r))
}

pub fn conjecture_search(n: usize, p: f64, trials: usize, seed: u64, settings: Settings) -> Result<Report, UsageError> {
    lib(catalog::conjecture_2_13_search(n, p, trials, seed, &settings)).map(Report::Suite)
}
