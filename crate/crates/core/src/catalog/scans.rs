use std::f64::consts::PI;

use crate::catalog::{angle_between, num, vec_str, CheckStatus, SuiteReport};
use crate::cones::{bj_orthogonal_vectors, circle_roots};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::par;
use crate::settings::Settings;
use crate::spaces::Space;
use crate::symmetry::is_left_symmetric_point;

/// The eight left-symmetric points of the unit sphere of `l_p^2`:
/// `±(1,0)`, `±(0,1)`, `±(c,c)`, `±(c,-c)` with `c = 2^{-1/p}`.
pub fn symmetric_points(p: f64) -> Vec<[f64; 2]> {
    let c = 2f64.powf(-1.0 / p);
    let base = [[1.0, 0.0], [0.0, 1.0], [c, c], [c, -c]];
    base.iter().flat_map(|v| [*v, [-v[0], -v[1]]]).collect()
}

/// Mutually orthogonal unit pairs `(x, y)` of `l_p^2`, one per sign class:
/// the axes in both orders and the two diagonals in both orders.
pub fn mutual_pairs(p: f64) -> Vec<([f64; 2], [f64; 2])> {
    let c = 2f64.powf(-1.0 / p);
    vec![
        ([1.0, 0.0], [0.0, 1.0]),
        ([0.0, 1.0], [1.0, 0.0]),
        ([c, c], [c, -c]),
        ([c, -c], [c, c]),
    ]
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("the scan needs 1 < p < ∞ (got {p})")));
    }
    Ok(())
}

fn smooth_plane(p: f64, resolution: usize, settings: &Settings) -> Result<Space> {
    check_exponent(p)?;
    Space::lp(2, p)?.with(Settings { resolution, ..*settings })
}

/// Unit direction orthogonal to `x` (the kernel of its norming functional).
fn partner(space: &Space, x: &[f64]) -> Vec<f64> {
    let g = space.smooth_gradient(x);
    space.normalize(&[-g[1], g[0]]).expect("nonzero gradient")
}

/// Signed defect of the reverse relation at the direction `θ`: with `y` the
/// orthogonal partner of `x = (cos θ, sin θ)`, the value `f_y(x)`. It
/// vanishes exactly where `x` is left symmetric.
fn defect(space: &Space, theta: f64) -> f64 {
    let x = [theta.cos(), theta.sin()];
    let y = partner(space, &x);
    dot(&space.smooth_gradient(&y), &x)
}

fn nearest(points: &[[f64; 2]], v: &[f64]) -> f64 {
    points.iter().map(|q| angle_between(q, v)).fold(f64::INFINITY, f64::min)
}

/// Scan the sphere of `l_p^2` for left-symmetric points and compare with the
/// eight listed points.
///
/// Located points come from sign changes of the reverse-relation defect,
/// refined by bisection; every mesh point is also classified directly.
/// At `p = 2` every point is symmetric and the exactness claim is skipped.
pub fn prop_2_8_scan(p: f64, resolution: usize, settings: &Settings) -> Result<SuiteReport> {
    let space = smooth_plane(p, resolution, settings)?;
    let mut r = SuiteReport::new("prop-2-8", settings);
    r.param("p", p);
    r.param("resolution", resolution);
    let listed = symmetric_points(p);
    let tol = 2.0 * PI / resolution as f64;

    for q in &listed {
        let v = is_left_symmetric_point(&space, q, resolution)?;
        r.expect(format!("listed point {} is left symmetric", vec_str(q)), "symmetric", format!("{:?}", v.verdict), v.is_symmetric());
    }

    let step = 2.0 * PI / resolution as f64;
    let mesh = par::map_range(resolution, |k| {
        let x = space.unit_at(k as f64 * step);
        let v = is_left_symmetric_point(&space, &x, resolution).expect("unit point");
        (x, v.is_symmetric(), v.indeterminate)
    });
    let symmetric: Vec<&Vec<f64>> = mesh.iter().filter(|m| m.1).map(|m| &m.0).collect();
    let indet: usize = mesh.iter().map(|m| m.2).sum();
    r.expect("indeterminate mesh classifications", 0, indet, indet == 0);

    if p == 2.0 {
        r.note("p = 2 is the Hilbert case: every point is left symmetric, so the eight-point claim is skipped");
        r.expect("mesh points classified symmetric", resolution, symmetric.len(), symmetric.len() == resolution);
        return Ok(r);
    }

    let far = symmetric.iter().filter(|x| nearest(&listed, x) > tol).count();
    r.expect("mesh points classified symmetric away from the listed points", 0, far, far == 0);
    r.info("mesh points classified symmetric", symmetric.len());

    let roots = circle_roots(|t| defect(&space, t), resolution, 0.0);
    let located: Vec<Vec<f64>> = roots.iter().map(|&t| space.unit_at(t)).collect();
    r.expect("located left-symmetric points", 8, located.len(), located.len() == 8);
    for x in &located {
        let d = nearest(&listed, x);
        r.expect(format!("located point {} near a listed point", vec_str(x)), format!("<= {}", num(tol)), num(d), d <= tol);
    }
    for q in &listed {
        let d = located.iter().map(|x| angle_between(q, x)).fold(f64::INFINITY, f64::min);
        r.expect(format!("listed point {} located", vec_str(q)), format!("<= {}", num(tol)), num(d), d <= tol);
    }
    r.artifact("located", &located);
    Ok(r)
}

/// Scan the sphere of `l_p^2` for mutually orthogonal pairs and compare with
/// the four families: axes paired with axes, diagonals with diagonals.
pub fn prop_2_9_scan(p: f64, resolution: usize, settings: &Settings) -> Result<SuiteReport> {
    let space = smooth_plane(p, resolution, settings)?;
    let mut r = SuiteReport::new("prop-2-9", settings);
    r.param("p", p);
    r.param("resolution", resolution);
    let tol = 2.0 * PI / resolution as f64;
    let families = mutual_pairs(p);
    let family_distance = |x: &[f64], y: &[f64]| {
        families
            .iter()
            .map(|(fx, fy)| {
                let dx = angle_between(fx, x).min(PI - angle_between(fx, x));
                let dy = angle_between(fy, y).min(PI - angle_between(fy, y));
                dx.max(dy)
            })
            .fold(f64::INFINITY, f64::min)
    };

    let step = 2.0 * PI / resolution as f64;
    let mesh = par::map_range(resolution, |k| {
        let x = space.unit_at(k as f64 * step);
        let y = partner(&space, &x);
        let forward = bj_orthogonal_vectors(&space, &x, &y).expect("unit vectors");
        let reverse = bj_orthogonal_vectors(&space, &y, &x).expect("unit vectors");
        (x, y, forward, reverse)
    });
    let forward_ok = mesh.iter().all(|m| m.2.holds());
    r.expect("every mesh point is orthogonal to its partner", true, forward_ok, forward_ok);
    let indet = mesh.iter().filter(|m| m.3.is_indeterminate()).count();
    r.expect("indeterminate reverse tests", 0, indet, indet == 0);
    let mutual: Vec<_> = mesh.iter().filter(|m| m.3.holds()).collect();

    if p == 2.0 {
        r.note("p = 2 is the Hilbert case: every orthogonal pair is mutual, so exactness is skipped (degenerate)");
        r.expect("mutual mesh pairs", resolution, mutual.len(), mutual.len() == resolution);
        return Ok(r);
    }
    r.info("mutual mesh pairs", mutual.len());
    let far = mutual.iter().filter(|m| family_distance(&m.0, &m.1) > tol).count();
    r.expect("mutual mesh pairs outside the four families", 0, far, far == 0);

    let roots = circle_roots(|t| defect(&space, t), resolution, 0.0);
    r.expect("located mutual pairs (both signs)", 8, roots.len(), roots.len() == 8);
    let mut hit = vec![false; families.len()];
    for &t in &roots {
        let x = space.unit_at(t);
        let y = partner(&space, &x);
        let d = family_distance(&x, &y);
        for (k, (fx, fy)) in families.iter().enumerate() {
            let dx = angle_between(fx, &x).min(PI - angle_between(fx, &x));
            let dy = angle_between(fy, &y).min(PI - angle_between(fy, &y));
            hit[k] |= dx.max(dy) <= tol;
        }
        r.expect(format!("pair {} ⊥ {} lies in a family", vec_str(&x), vec_str(&y)), format!("<= {}", num(tol)), num(d), d <= tol);
    }
    for (k, (fx, fy)) in families.iter().enumerate() {
        let status = if hit[k] { CheckStatus::Pass } else { CheckStatus::Fail };
        r.push(format!("family {} ⊥ {} located", vec_str(fx), vec_str(fy)), "located", hit[k], status);
    }
    Ok(r)
}
