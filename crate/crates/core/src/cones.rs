//! Vector-level Birkhoff-James orthogonality and the one-sided cones
//! `x⁺ = { y : ‖x + λy‖ >= ‖x‖ for λ >= 0 }` and `x⁻` (same for `λ <= 0`).
//!
//! Cone membership is read off the one-sided derivatives of the convex map
//! `λ ↦ ‖x + λy‖` at zero: `y ∈ x⁺` iff the right derivative is `>= 0` and
//! `y ∈ x⁻` iff the left derivative is `<= 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, is_zero};
use crate::settings::Settings;
use crate::spaces::Space;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

/// A sign decision with the scalar that decided it.
///
/// The deciding scalar must be `>= 0` for the predicate to hold. Margins
/// within `eps` below zero count as zero and hold; margins in
/// `(-band, -eps)` are indeterminate; margins at or below `-band` fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriState {
    pub verdict: Verdict,
    /// Serialized as `null` when infinite (the zero-vector convention).
    pub margin: f64,
}

impl TriState {
    pub fn classify(margin: f64, settings: &Settings) -> TriState {
        let verdict = if margin >= -settings.eps {
            Verdict::Holds
        } else if margin <= -settings.band {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        };
        TriState { verdict, margin }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    pub fn is_indeterminate(&self) -> bool {
        self.verdict == Verdict::Indeterminate
    }

    /// Conjunction: decided by the smaller margin.
    pub fn and(self, other: TriState, settings: &Settings) -> TriState {
        TriState::classify(self.margin.min(other.margin), settings)
    }

    pub(crate) fn vacuous() -> TriState {
        TriState { verdict: Verdict::Holds, margin: f64::INFINITY }
    }
}

/// Result of minimizing `λ ↦ ‖x + λy‖` over the bracket
/// `[-2‖x‖/‖y‖, 2‖x‖/‖y‖]`, which contains every minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearchResult {
    pub lambda_star: f64,
    pub value: f64,
    pub bracket: (f64, f64),
}

fn check_nonzero(x: &[f64]) -> Result<()> {
    if is_zero(x) {
        Err(Error::ZeroVector)
    } else {
        Ok(())
    }
}

/// Decide `y ∈ x⁺`. The margin is the right derivative divided by `‖y‖`.
pub fn in_plus(space: &Space, x: &[f64], y: &[f64]) -> Result<TriState> {
    let d = space.derivative_interval(x, y)?;
    let ny = space.norm(y)?;
    let margin = if ny == 0.0 { 0.0 } else { d.hi / ny };
    Ok(TriState::classify(margin, space.settings()))
}

/// Decide `y ∈ x⁻`. The margin is minus the left derivative divided by `‖y‖`.
pub fn in_minus(space: &Space, x: &[f64], y: &[f64]) -> Result<TriState> {
    let d = space.derivative_interval(x, y)?;
    let ny = space.norm(y)?;
    let margin = if ny == 0.0 { 0.0 } else { -d.lo / ny };
    Ok(TriState::classify(margin, space.settings()))
}

/// Decide `x ⊥_B y`. `0 ⊥_B y` holds for every `y` (infinite margin).
pub fn bj_orthogonal_vectors(space: &Space, x: &[f64], y: &[f64]) -> Result<TriState> {
    if x.len() == space.dim() && is_zero(x) {
        space.norm(y)?;
        return Ok(TriState::vacuous());
    }
    let d = space.derivative_interval(x, y)?;
    let ny = space.norm(y)?;
    let margin = if ny == 0.0 { 0.0 } else { d.hi.min(-d.lo) / ny };
    Ok(TriState::classify(margin, space.settings()))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimize `λ ↦ ‖x + λy‖` by a 64-interval grid followed by golden-section
/// refinement of the best cell. Independent of the derivative machinery.
pub fn line_min_oracle(space: &Space, x: &[f64], y: &[f64]) -> Result<LineSearchResult> {
    let nx = space.norm(x)?;
    let ny = space.norm(y)?;
    if ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let half = 2.0 * nx / ny;
    let phi = |l: f64| space.norm_unchecked(&axpy(x, l, y));
    const CELLS: usize = 64;
    let grid: Vec<f64> = (0..=CELLS).map(|i| -half + 2.0 * half * i as f64 / CELLS as f64).collect();
    let (best_i, best_v) = grid
        .iter()
        .map(|&l| phi(l))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(CELLS)];
    let (gl, gv) = golden_section(phi, lo, hi, 1e-10);
    let mut best = (grid[best_i], best_v);
    if gv < best.1 {
        best = (gl, gv);
    }
    if nx <= best.1 {
        best = (0.0, nx);
    }
    Ok(LineSearchResult { lambda_star: best.0, value: best.1, bracket: (-half, half) })
}

/// Orthogonality verdict from the line-search oracle alone.
///
/// A decrease below `‖x‖` beyond rounding means orthogonality fails; the
/// margin is the secant slope `(min - ‖x‖) / (|λ*| ‖y‖)`, which lies between
/// the one-sided derivative and zero, so it is classified with the same band.
pub fn oracle_orthogonal(space: &Space, x: &[f64], y: &[f64]) -> Result<TriState> {
    let nx = space.norm(x)?;
    let ny = space.norm(y)?;
    if nx == 0.0 {
        return Ok(TriState::vacuous());
    }
    if ny == 0.0 {
        return Ok(TriState::classify(0.0, space.settings()));
    }
    let r = line_min_oracle(space, x, y)?;
    let drop = r.value - nx;
    let margin = if drop >= -1e-13 * nx || r.lambda_star == 0.0 {
        0.0
    } else {
        drop / (r.lambda_star.abs() * ny)
    };
    Ok(TriState::classify(margin, space.settings()))
}

/// Zeros of a continuous `2π`-periodic function sampled at `count` equally
/// spaced angles, refined by bisection.
pub(crate) fn circle_roots<F: Fn(f64) -> f64>(f: F, count: usize, zero: f64) -> Vec<f64> {
    let step = 2.0 * PI / count as f64;
    let vals: Vec<f64> = (0..count).map(|k| f(k as f64 * step)).collect();
    let mut roots = Vec::new();
    for k in 0..count {
        let (a, b) = (vals[k], vals[(k + 1) % count]);
        let ta = k as f64 * step;
        if a.abs() <= zero {
            roots.push(ta);
        } else if b.abs() > zero && a.signum() != b.signum() {
            let (mut lo, mut hi) = (ta, ta + step);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == a.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push((0.5 * (lo + hi)).rem_euclid(2.0 * PI));
        }
    }
    roots
}

/// The arc of directions `θ ∈ [0, π)` (Euclidean angle, modulo sign) along
/// which `x ⊥_B y`, as `(start, length)`. Planar spaces only.
pub(crate) fn orthogonal_arc_2d(space: &Space, x: &[f64], resolution: usize) -> Result<(f64, f64)> {
    if space.dim() != 2 {
        return Err(Error::Unsupported("orthogonal direction scans need a planar space".into()));
    }
    check_nonzero(x)?;
    space.norm(x)?;
    let count = resolution.max(8);
    let dir = |t: f64| [t.cos(), t.sin()];
    let hi = |t: f64| space.derivative_unchecked(x, &dir(t)).hi;
    let lo = |t: f64| space.derivative_unchecked(x, &dir(t)).lo;
    let zero = 1e-15;
    let hr = circle_roots(hi, count, zero);
    let lr = circle_roots(lo, count, zero);
    let (Some(h), Some(l)) = (hr.first(), lr.first()) else {
        return Err(Error::Precondition("no sign change found for the derivative bounds".into()));
    };
    let (h, l) = (h.rem_euclid(PI), l.rem_euclid(PI));
    let len_lh = (h - l).rem_euclid(PI);
    if len_lh < 1e-10 || PI - len_lh < 1e-10 {
        return Ok((h.min(l), 0.0));
    }
    let is_orth = |t: f64| {
        let d = space.derivative_unchecked(x, &dir(t));
        d.hi >= -1e-12 && d.lo <= 1e-12
    };
    if is_orth(l + 0.5 * len_lh) {
        Ok((l, len_lh))
    } else {
        Ok((h, PI - len_lh))
    }
}

/// Unit directions `y` (up to sign) with `x ⊥_B y` in a planar space.
///
/// The orthogonal directions form a single double cone. A smooth point
/// gives one direction; otherwise the two extreme rays and the middle ray
/// of the cone are returned.
pub fn orthogonal_directions_2d(space: &Space, x: &[f64], resolution: usize) -> Result<Vec<Vec<f64>>> {
    let (start, len) = orthogonal_arc_2d(space, x, resolution)?;
    if len == 0.0 {
        return Ok(vec![space.unit_at(start)]);
    }
    Ok([start, start + 0.5 * len, start + len].iter().map(|&t| space.unit_at(t)).collect())
}

/// A unit vector `y` with `y ⊥_B x`: the residual of the best approximation
/// of `start` by multiples of `x`, found by bisection on the derivative of
/// `t ↦ ‖start + t x‖`.
pub fn right_orthogonal_direction(space: &Space, x: &[f64], start: &[f64]) -> Result<Vec<f64>> {
    let nx = space.norm(x)?;
    let ns = space.norm(start)?;
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let at = |t: f64| axpy(start, t, x);
    // -1: strictly left of the zero set of the derivative, 1: strictly right.
    let side = |t: f64| {
        let d = space.derivative_unchecked(&at(t), x);
        if d.hi < 0.0 {
            -1
        } else if d.lo > 0.0 {
            1
        } else {
            0
        }
    };
    // Shrink `[a, b]` onto the edge of the tolerance band on one side.
    let bisect = |mut a: f64, mut b: f64, left: bool| {
        for _ in 0..200 {
            let t = 0.5 * (a + b);
            if t <= a || t >= b {
                break;
            }
            let outside = side(t) == if left { -1 } else { 1 };
            if outside == left {
                a = t;
            } else {
                b = t;
            }
        }
        (a, b)
    };
    let bound = 2.0 * ns / nx + 1.0;
    let (mut a, mut b) = (-bound, bound);
    let mut t = 0.0;
    let mut hit = false;
    for _ in 0..200 {
        t = 0.5 * (a + b);
        if space.norm_unchecked(&at(t)) <= 1e-12 * ns {
            return Err(Error::Precondition("start direction is parallel to x".into()));
        }
        match side(t) {
            -1 => a = t,
            1 => b = t,
            _ => {
                hit = true;
                break;
            }
        }
        if b - a <= f64::EPSILON * bound {
            break;
        }
    }
    if hit {
        // The tolerance band around a kink was hit. Pin its edges and
        // intersect the two linear pieces of `t ↦ ‖start + t x‖` meeting there.
        let (a1, _) = bisect(a, t, true);
        let (_, b1) = bisect(t, b, false);
        let phi = |t: f64| space.norm_unchecked(&at(t));
        let ha = space.derivative_unchecked(&at(a1), x).hi;
        let lb = space.derivative_unchecked(&at(b1), x).lo;
        if lb > ha {
            let k = (phi(b1) - phi(a1) + ha * a1 - lb * b1) / (ha - lb);
            if k.is_finite() && (a1..=b1).contains(&k) && side(k) == 0 {
                t = k;
            }
        }
    }
    space.normalize(&at(t))
}
