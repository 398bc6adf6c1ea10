//! Property tests for the cone, operator, symmetry and catalog invariants.
//! Reference values come from test-side oracles: a direct `l_p` norm, a
//! hexagon facet formula and brute-force meshes.

use std::f64::consts::PI;

use bjorth::catalog::{self, CheckStatus};
use bjorth::cones::{bj_orthogonal_vectors, in_minus, in_plus, right_orthogonal_direction};
use bjorth::operators::{bj_orthogonal_operators, bj_orthogonal_operators_oracle, operator_norm};
use bjorth::symmetry::{
    falsify_left_symmetry, falsify_right_symmetry, norming_hyperplane, recheck_operator_counterexample,
    witness_left_asym_thm24, witness_left_asym_thm25,
};
use bjorth::{Counterexample, OperatorMatrix, Settings, Space, SymmetryKind};
use proptest::prelude::*;

type Norm = Box<dyn Fn(&[f64]) -> f64>;

/// A planar test space with an independent implementation of its norm.
fn planar(idx: usize) -> (Space, Norm) {
    let lp = |p: f64| -> Norm {
        Box::new(move |v: &[f64]| v.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p))
    };
    match idx {
        0 => (Space::lp(2, 1.0).unwrap(), Box::new(|v: &[f64]| v[0].abs() + v[1].abs())),
        1 => (Space::lp(2, 1.5).unwrap(), lp(1.5)),
        2 => (Space::lp(2, 2.0).unwrap(), lp(2.0)),
        3 => (Space::lp(2, 3.0).unwrap(), lp(3.0)),
        4 => (Space::lp(2, 4.0).unwrap(), lp(4.0)),
        5 => (Space::lp(2, f64::INFINITY).unwrap(), Box::new(|v: &[f64]| v[0].abs().max(v[1].abs()))),
        _ => (
            Space::hexagon(),
            Box::new(|v: &[f64]| {
                (0..6)
                    .map(|k| {
                        let a = k as f64 * PI / 3.0 + PI / 6.0;
                        (a.cos() * v[0] + a.sin() * v[1]) / (3f64.sqrt() / 2.0)
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            }),
        ),
    }
}

const PLANAR: usize = 7;

fn nonzero(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n).prop_filter("nonzero", |v| v.iter().any(|c| c.abs() > 1e-3))
}

fn matrix2() -> impl Strategy<Value = OperatorMatrix> {
    prop::collection::vec(-5.0f64..5.0, 4)
        .prop_filter("nonzero", |v| v.iter().any(|c| c.abs() > 1e-2))
        .prop_map(|v| OperatorMatrix::from_row_major(2, v).unwrap())
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|c| -c).collect()
}

fn scale(v: &[f64], c: f64) -> Vec<f64> {
    v.iter().map(|a| a * c).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cones_cover_the_space(idx in 0..PLANAR, x in nonzero(2), y in nonzero(2)) {
        let (s, _) = planar(idx);
        let (p, m) = (in_plus(&s, &x, &y).unwrap(), in_minus(&s, &x, &y).unwrap());
        prop_assert!(!(p.fails() && m.fails()));
    }

    #[test]
    fn orthogonality_is_the_cone_intersection(idx in 0..PLANAR, x in nonzero(2), y in nonzero(2)) {
        let (s, _) = planar(idx);
        let (p, m) = (in_plus(&s, &x, &y).unwrap(), in_minus(&s, &x, &y).unwrap());
        let o = bj_orthogonal_vectors(&s, &x, &y).unwrap();
        if !(p.is_indeterminate() || m.is_indeterminate() || o.is_indeterminate()) {
            prop_assert_eq!(o.holds(), p.holds() && m.holds());
        }
    }

    #[test]
    fn cones_are_positively_homogeneous(
        idx in 0..PLANAR, x in nonzero(2), y in nonzero(2), le in -3.0f64..3.0, lm in -3.0f64..3.0,
    ) {
        let (s, _) = planar(idx);
        let (eta, mu) = (10f64.powf(le), 10f64.powf(lm));
        let (xs, ys) = (scale(&x, mu), scale(&y, eta));
        for (a, b) in [
            (in_plus(&s, &x, &y).unwrap(), in_plus(&s, &xs, &ys).unwrap()),
            (in_minus(&s, &x, &y).unwrap(), in_minus(&s, &xs, &ys).unwrap()),
        ] {
            if !(a.is_indeterminate() || b.is_indeterminate()) {
                prop_assert_eq!(a.verdict, b.verdict);
            }
        }
    }

    #[test]
    fn negation_swaps_the_cones(idx in 0..PLANAR, x in nonzero(2), y in nonzero(2)) {
        let (s, _) = planar(idx);
        let p = in_plus(&s, &x, &y).unwrap();
        let m1 = in_minus(&s, &x, &neg(&y)).unwrap();
        let m2 = in_minus(&s, &neg(&x), &y).unwrap();
        prop_assert_eq!(p.verdict, m1.verdict);
        prop_assert_eq!(p.verdict, m2.verdict);
    }

    /// Orthogonality against a brute-force line scan with the test-side norm.
    #[test]
    fn orthogonality_matches_a_line_scan(idx in 0..PLANAR, x in nonzero(2), y in nonzero(2)) {
        let (s, norm) = planar(idx);
        let o = bj_orthogonal_vectors(&s, &x, &y).unwrap();
        let (nx, ny) = (norm(&x), norm(&y));
        let reach = 4.0 * nx / ny;
        let mut lambdas: Vec<f64> = (-2000..=2000).map(|i| reach * i as f64 / 2000.0).collect();
        lambdas.extend((1..12).flat_map(|k| [10f64.powi(-k), -(10f64.powi(-k))]).map(|l| l * nx / ny));
        let min = lambdas.iter().map(|l| norm(&[x[0] + l * y[0], x[1] + l * y[1]])).fold(f64::INFINITY, f64::min);
        if o.holds() {
            prop_assert!(min >= nx * (1.0 - 1e-9), "holds but ‖x+λy‖ dips to {min} < {nx}");
        }
        if o.fails() {
            prop_assert!(min < nx, "fails but no λ shortens x");
        }
    }

    #[test]
    fn operator_verdict_is_homogeneous(idx in 0..PLANAR, t in matrix2(), a in matrix2(), c in 0.01f64..100.0, d in 0.01f64..100.0) {
        let (s, _) = planar(idx);
        let base = bj_orthogonal_operators(&s, &t, &a).unwrap().verdict;
        let scaled = bj_orthogonal_operators(&s, &t.scale(c), &a.scale(d)).unwrap().verdict;
        let flipped = bj_orthogonal_operators(&s, &t, &a.scale(-d)).unwrap().verdict;
        if !(base.is_indeterminate() || scaled.is_indeterminate()) {
            prop_assert_eq!(base.verdict, scaled.verdict);
        }
        if !(base.is_indeterminate() || flipped.is_indeterminate()) {
            prop_assert_eq!(base.verdict, flipped.verdict);
        }
    }

    #[test]
    fn operator_norm_matches_brute_force(idx in 0..PLANAR, t in matrix2()) {
        let (s, norm) = planar(idx);
        let m = operator_norm(&s, &t).unwrap();
        let count = 4 * s.settings().resolution;
        // Polyhedral balls peak at extreme points, which join the mesh.
        let vertices: &[f64] = match idx {
            0 => &[0.0, PI / 2.0],
            5 => &[PI / 4.0, 3.0 * PI / 4.0],
            6 => &[0.0, PI / 3.0, 2.0 * PI / 3.0],
            _ => &[],
        };
        let brute = (0..count)
            .map(|k| PI * k as f64 / count as f64)
            .chain(vertices.iter().copied())
            .map(|th| {
                let u = [th.cos(), th.sin()];
                norm(&t.apply(&u).unwrap()) / norm(&u)
            })
            .fold(0.0, f64::max);
        prop_assert!(m.value >= brute * (1.0 - 1e-12), "norm {} below mesh value {}", m.value, brute);
        prop_assert!(m.value - brute <= 1e-7 * m.value.max(1.0), "norm {} vs mesh {}", m.value, brute);
        for w in &m.witnesses {
            let r = norm(&t.apply(w).unwrap()) / norm(w);
            prop_assert!((r - m.value).abs() <= 1e-7 * m.value, "witness ratio {} vs {}", r, m.value);
        }
    }

    #[test]
    fn zero_operator_conventions(idx in 0..PLANAR, t in matrix2()) {
        let (s, _) = planar(idx);
        let z = OperatorMatrix::zeros(2);
        prop_assert!(bj_orthogonal_operators(&s, &t, &z).unwrap().verdict.holds());
        prop_assert!(bj_orthogonal_operators(&s, &z, &t).unwrap().verdict.holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn falsifier_counterexamples_recheck(pi in 0usize..3, t in matrix2(), seed in any::<u64>()) {
        let s = Space::lp(2, [1.5, 3.0, 4.0][pi]).unwrap();
        for kind in [SymmetryKind::Left, SymmetryKind::Right] {
            let v = match kind {
                SymmetryKind::Left => falsify_left_symmetry(&s, &t, 64, seed).unwrap(),
                SymmetryKind::Right => falsify_right_symmetry(&s, &t, 64, seed).unwrap(),
            };
            if let Some(Counterexample::Operator(a)) = &v.counterexample {
                prop_assert!(recheck_operator_counterexample(&s, &t, kind, a).unwrap());
                // Confirm the broken direction with the line-search oracle.
                let broken = match kind {
                    SymmetryKind::Left => bj_orthogonal_operators_oracle(&s, a, &t).unwrap(),
                    SymmetryKind::Right => bj_orthogonal_operators_oracle(&s, &t, a).unwrap(),
                };
                prop_assert!(!broken.holds());
            }
        }
    }

    #[test]
    fn falsifiers_are_deterministic(t in matrix2(), seed in any::<u64>()) {
        let s = Space::lp(2, 3.0).unwrap();
        let a = serde_json::to_string(&falsify_left_symmetry(&s, &t, 32, seed).unwrap()).unwrap();
        let b = serde_json::to_string(&falsify_left_symmetry(&s, &t, 32, seed).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    /// A point of `M_T` whose image is not left symmetric yields a rank-one
    /// `A` with `T ⊥_B A` and `A ⊥̸_B T`.
    #[test]
    fn partner_construction_breaks_left_symmetry(pi in 0usize..2, t in matrix2()) {
        let s = Space::lp(2, [3.0, 4.0][pi]).unwrap();
        let m = operator_norm(&s, &t).unwrap();
        let x1 = m.witnesses[0].clone();
        let tx = t.apply(&x1).unwrap();
        // y1 with Tx1 ⊥_B y1, taken from the kernel of the norming functional.
        let f = s.support_face(&tx).unwrap().functionals().swap_remove(0);
        let y1 = vec![-f[1], f[0]];
        prop_assume!(bj_orthogonal_vectors(&s, &y1, &tx).unwrap().fails());
        let a = witness_left_asym_thm24(&s, &t, &x1, &y1, &norming_hyperplane(&s, &x1).unwrap()).unwrap();
        prop_assert!(bj_orthogonal_operators(&s, &t, &a).unwrap().verdict.holds());
        prop_assert!(bj_orthogonal_operators(&s, &a, &t).unwrap().verdict.fails());
        prop_assert!(bj_orthogonal_operators_oracle(&s, &a, &t).unwrap().fails());
    }

    #[test]
    fn kernel_construction_breaks_left_symmetry(pi in 0usize..3, t in matrix2()) {
        let s = Space::lp(2, [1.5, 3.0, 4.0][pi]).unwrap();
        let m = operator_norm(&s, &t).unwrap();
        let x = m.witnesses[0].clone();
        let y = right_orthogonal_direction(&s, &x, &[-x[1], x[0]]).unwrap();
        let ty = t.apply(&y).unwrap();
        prop_assume!(s.norm(&ty).unwrap() > 1e-3 * m.value);
        let a = witness_left_asym_thm25(&s, &t, &x, &y).unwrap();
        prop_assert!(bj_orthogonal_operators(&s, &t, &a).unwrap().verdict.holds());
        prop_assert!(bj_orthogonal_operators(&s, &a, &t).unwrap().verdict.fails());
    }

    #[test]
    fn reports_are_deterministic_and_counted(seed in any::<u64>()) {
        let settings = Settings::default();
        let r = catalog::example_2_2_suite(20, seed, &settings).unwrap();
        let again = catalog::example_2_2_suite(20, seed, &settings).unwrap();
        prop_assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
        let tally = |st: CheckStatus| r.checks.iter().filter(|c| c.status == st).count();
        prop_assert_eq!(r.counts.pass, tally(CheckStatus::Pass));
        prop_assert_eq!(r.counts.fail, tally(CheckStatus::Fail));
        prop_assert_eq!(r.counts.indeterminate, tally(CheckStatus::Indeterminate));
        prop_assert_eq!(r.counts.info, tally(CheckStatus::Info));
        prop_assert_eq!(r.passed, r.counts.fail == 0 && r.counts.indeterminate == 0);
    }

    #[test]
    fn case_targets_are_the_listed_points(p in 2.0f64..8.0) {
        let points = catalog::symmetric_points(p);
        let cases = catalog::case_specs(p);
        prop_assert_eq!(cases.len(), 32);
        for chunk in cases.chunks(8) {
            let targets: Vec<[f64; 2]> = chunk.iter().map(|c| c.tx_target).collect();
            prop_assert_eq!(&targets, &points);
        }
        // Independent check: each listed point is on the unit sphere.
        for q in &points {
            let n = (q[0].abs().powf(p) + q[1].abs().powf(p)).powf(1.0 / p);
            prop_assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
