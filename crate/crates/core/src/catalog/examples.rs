use crate::catalog::{num, vec_str, SuiteReport};
use crate::cones::{bj_orthogonal_vectors, Verdict};
use crate::error::Result;
use crate::linalg::projective_distance;
use crate::operators::{operator_norm, OperatorMatrix};
use crate::settings::Settings;
use crate::spaces::Space;
use crate::symmetry::{falsify_left_symmetry_sampled, is_left_symmetric_point, Counterexample, SymmetryKind};

/// The hexagon norm and the operator `[[3/4, -√3/4], [√3/4, 3/4]]`: norm one,
/// attained exactly at the six vertices.
pub fn example_1_1_suite(settings: &Settings) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("example-1-1", settings);
    let space = Space::hexagon().with(*settings)?;
    let s3 = 3f64.sqrt();
    let t = OperatorMatrix::from_rows(vec![vec![0.75, -s3 / 4.0], vec![s3 / 4.0, 0.75]])?;
    let vertices = [[1.0, 0.0], [0.5, s3 / 2.0], [-0.5, s3 / 2.0], [-1.0, 0.0], [-0.5, -s3 / 2.0], [0.5, -s3 / 2.0]];
    r.param("matrix", &t);

    let m = operator_norm(&space, &t)?;
    r.expect("operator norm", "1 within 1e-9", num(m.value), (m.value - 1.0).abs() <= 1e-9);
    r.expect("attainment computed exactly", true, m.exact, m.exact);
    r.expect("antipodal witness clusters", 3, m.witnesses.len(), m.witnesses.len() == 3);
    for v in &vertices {
        let d = m.witnesses.iter().map(|w| projective_distance(w, v)).fold(f64::INFINITY, f64::min);
        r.expect(format!("vertex {} attains the norm", vec_str(v)), "matched within 1e-6", num(d), d <= 1e-6);
    }
    let spurious = m
        .witnesses
        .iter()
        .filter(|w| vertices.iter().all(|v| projective_distance(w, v) > 1e-6))
        .count();
    r.expect("witnesses away from the vertices", 0, spurious, spurious == 0);
    let arc_len = m
        .arcs_2d
        .as_ref()
        .map(|a| a.arcs.iter().map(|[lo, hi]| hi - lo).fold(0.0, f64::max))
        .unwrap_or(0.0);
    r.expect("longest attainment arc", "0 (no edge arcs)", num(arc_len), arc_len <= 1e-9);

    // Independent evaluation at vertices and edge midpoints.
    let hex_norm = |v: &[f64]| space.norm(v).expect("planar");
    let vmax = vertices.iter().map(|v| (hex_norm(&t.apply_unchecked(v)) - 1.0).abs()).fold(0.0, f64::max);
    r.expect("|‖Tv‖ - 1| over vertices", "<= 1e-12", num(vmax), vmax <= 1e-12);
    let mid = (0..6)
        .map(|k| {
            let (a, b) = (vertices[k], vertices[(k + 1) % 6]);
            hex_norm(&t.apply_unchecked(&[0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]))
        })
        .fold(0.0, f64::max);
    r.expect("max ‖Tm‖ over edge midpoints", "< 1", num(mid), mid < 1.0 - 1e-6);

    let control = operator_norm(&space, &t.scale(0.99))?;
    r.expect("control: norm of 0.99 T", "0.99 within 1e-9", num(control.value), (control.value - 0.99).abs() <= 1e-9);
    Ok(r)
}

/// In `l_1^2`, `T(1,0) = (1/2, 1/2)` and `T(0,1) = 0` is a nonzero left
/// symmetric operator; in `l_2^2` the same shape is not.
pub fn example_2_2_suite(trials: usize, seed: u64, settings: &Settings) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("example-2-2", settings);
    r.param("trials", trials);
    r.param("seed", seed);
    let l1 = Space::lp(2, 1.0)?.with(*settings)?;
    let t = OperatorMatrix::from_rows(vec![vec![0.5, 0.0], vec![0.5, 0.0]])?;
    r.param("matrix", &t);

    // Independent column computation: the l1 ball has extreme points ±e_j,
    // so ‖T‖ = max_j ‖Te_j‖_1 and M_T is spanned by the maximizing columns.
    let cols: Vec<f64> = (0..2).map(|j| t.column(j).iter().map(|c| c.abs()).sum()).collect();
    let m = operator_norm(&l1, &t)?;
    r.expect("column norms", "(1, 0)", vec_str(&cols), cols == vec![1.0, 0.0]);
    r.expect("operator norm", "1", num(m.value), (m.value - 1.0).abs() <= 1e-12);
    let single = m.witnesses.len() == 1 && projective_distance(&m.witnesses[0], &[1.0, 0.0]) <= 1e-12;
    let observed: Vec<String> = m.witnesses.iter().map(|w| vec_str(w)).collect();
    r.expect("attainment set", "{±(1, 0)}", format!("±{}", observed.join(", ±")), single && m.exact);

    let v = is_left_symmetric_point(&l1, &[0.5, 0.5], settings.resolution)?;
    r.expect("(1/2, 1/2) is left symmetric in l1", "symmetric", format!("{:?}", v.verdict), v.is_symmetric());
    let y = [1.0, -1.0];
    r.expect_verdict("(1/2, 1/2) ⊥ (1, -1)", Verdict::Holds, bj_orthogonal_vectors(&l1, &[0.5, 0.5], &y)?);
    r.expect_verdict("(1, -1) ⊥ (1/2, 1/2)", Verdict::Holds, bj_orthogonal_vectors(&l1, &y, &[0.5, 0.5])?);

    let v = falsify_left_symmetry_sampled(&l1, &t, trials, seed)?;
    let found = usize::from(v.counterexample.is_some());
    r.expect("conditioned samples with A not orthogonal to T", 0, found, found == 0);
    r.expect("indeterminate samples", 0, v.indeterminate, v.indeterminate == 0);
    r.artifact("l1_verdict", &v);

    let l2 = Space::lp(2, 2.0)?.with(*settings)?;
    let controls = [("same shape", t.clone()), ("diag(1, 0)", OperatorMatrix::diag(&[1.0, 0.0]))];
    for (name, c) in controls {
        let v = falsify_left_symmetry_sampled(&l2, &c, 100, seed)?;
        let ok = matches!(&v.counterexample, Some(Counterexample::Operator(a))
            if crate::symmetry::recheck_operator_counterexample(&l2, &c, SymmetryKind::Left, a)?);
        r.expect(
            format!("l2 control {name}: counterexample within 100 trials"),
            "found",
            match &v.counterexample {
                Some(_) => format!("found at trial {}", v.trials_or_resolution),
                None => "none".into(),
            },
            ok,
        );
    }
    Ok(r)
}
