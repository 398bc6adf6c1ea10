//! Supported normed spaces and their analytic norm and support data.
//!
//! Two families are supported: `l_p^n` for `p` in `[1, ∞]` and planar norms
//! whose unit sphere is a centrally symmetric convex polygon.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs, scaled};
use crate::settings::Settings;

/// Exponent of an `l_p` norm; `∞` serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExpVisitor;
        impl Visitor<'_> for ExpVisitor {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(Exponent::INFINITY),
                    _ => Err(E::custom(format!("unknown exponent {v:?}"))),
                }
            }
        }
        d.deserialize_any(ExpVisitor)
    }
}

/// Serializable description of a space, matching the JSON schema
/// `{"type":"lp","dim":n,"p":number|"inf"}` or
/// `{"type":"polygon2","vertices":[[x,y],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceDescriptor {
    Lp { dim: usize, p: Exponent },
    Polygon2 { vertices: Vec<[f64; 2]> },
}

/// One-sided derivatives of `λ ↦ ‖x + λy‖` at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeInterval {
    pub lo: f64,
    pub hi: f64,
}

/// Norming functionals of a point: the subdifferential of the norm there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportFace {
    /// The point is smooth; exactly one functional norms it.
    Unique(Vec<f64>),
    /// Vertices of the face of the dual ball norming the point.
    Face(Vec<Vec<f64>>),
}

impl SupportFace {
    pub fn functionals(&self) -> Vec<Vec<f64>> {
        match self {
            SupportFace::Unique(f) => vec![f.clone()],
            SupportFace::Face(fs) => fs.clone(),
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, SupportFace::Unique(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Lp { dim: usize, p: f64 },
    Polygon {
        vertices: Vec<[f64; 2]>,
        angles: Vec<f64>,
        /// `facets[k]` is the functional equal to 1 on the edge `v_k → v_{k+1}`.
        facets: Vec<[f64; 2]>,
    },
}

/// A validated space together with the numerical settings used by every
/// computation performed in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    descriptor: SpaceDescriptor,
    kind: Kind,
    settings: Settings,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn angle_of(v: [f64; 2]) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

impl Space {
    pub fn new(descriptor: SpaceDescriptor) -> Result<Space> {
        Space::with_settings(descriptor, Settings::default())
    }

    pub fn with_settings(descriptor: SpaceDescriptor, settings: Settings) -> Result<Space> {
        settings.validate()?;
        let kind = match &descriptor {
            SpaceDescriptor::Lp { dim, p } => {
                if *dim == 0 {
                    return Err(Error::InvalidSpace("dim must be at least 1".into()));
                }
                let p = p.value();
                if p.is_nan() || p < 1.0 {
                    return Err(Error::InvalidSpace(format!("p must be >= 1 or inf (got {p})")));
                }
                Kind::Lp { dim: *dim, p }
            }
            SpaceDescriptor::Polygon2 { vertices } => polygon_kind(vertices)?,
        };
        Ok(Space { descriptor, kind, settings })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Space> {
        Space::new(SpaceDescriptor::Lp { dim, p: Exponent(p) })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Space> {
        Space::new(SpaceDescriptor::Polygon2 { vertices })
    }

    /// The regular hexagon norm with vertices at `±(1,0)`, `±(1/2, √3/2)`,
    /// `±(-1/2, √3/2)`.
    pub fn hexagon() -> Space {
        let s = 3f64.sqrt() / 2.0;
        Space::polygon(vec![
            [1.0, 0.0],
            [0.5, s],
            [-0.5, s],
            [-1.0, 0.0],
            [-0.5, -s],
            [0.5, -s],
        ])
        .expect("hexagon is a valid polygon")
    }

    pub fn with(mut self, settings: Settings) -> Result<Space> {
        settings.validate()?;
        self.settings = settings;
        Ok(self)
    }

    pub fn descriptor(&self) -> &SpaceDescriptor {
        &self.descriptor
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Lp { dim, .. } => *dim,
            Kind::Polygon { .. } => 2,
        }
    }

    /// `Some(p)` for `l_p` spaces.
    pub fn exponent(&self) -> Option<f64> {
        match &self.kind {
            Kind::Lp { p, .. } => Some(*p),
            Kind::Polygon { .. } => None,
        }
    }

    /// Every nonzero point has a unique norming functional.
    pub fn is_smooth(&self) -> bool {
        matches!(self.kind, Kind::Lp { dim, p } if (p > 1.0 && p.is_finite()) || dim == 1)
    }

    /// The unit sphere contains no segments.
    pub fn is_strictly_convex(&self) -> bool {
        self.is_smooth()
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, Kind::Lp { dim, p } if p == 2.0 || dim == 1)
    }

    /// Whether the unit ball is a polytope (`l_1`, `l_∞`, polygons).
    pub fn is_polyhedral(&self) -> bool {
        match self.kind {
            Kind::Lp { dim, p } => dim > 1 && (p == 1.0 || p.is_infinite()),
            Kind::Polygon { .. } => true,
        }
    }

    /// Counterclockwise vertex list of the unit sphere for planar polyhedral
    /// spaces.
    pub fn polygon_vertices(&self) -> Option<Vec<[f64; 2]>> {
        match &self.kind {
            Kind::Polygon { vertices, .. } => Some(vertices.clone()),
            Kind::Lp { dim: 2, p } if *p == 1.0 => {
                Some(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
            }
            Kind::Lp { dim: 2, p } if p.is_infinite() => {
                Some(vec![[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
            }
            _ => None,
        }
    }

    /// Extreme points of the unit ball for polyhedral spaces. `l_∞^n` is
    /// limited to `n <= 20`.
    pub fn extreme_points(&self) -> Result<Option<Vec<Vec<f64>>>> {
        match &self.kind {
            Kind::Polygon { vertices, .. } => {
                Ok(Some(vertices.iter().map(|v| v.to_vec()).collect()))
            }
            Kind::Lp { dim, p } if *dim > 1 && *p == 1.0 => {
                let mut pts = Vec::with_capacity(2 * dim);
                for i in 0..*dim {
                    for s in [1.0, -1.0] {
                        let mut e = vec![0.0; *dim];
                        e[i] = s;
                        pts.push(e);
                    }
                }
                Ok(Some(pts))
            }
            Kind::Lp { dim, p } if *dim > 1 && p.is_infinite() => {
                if *dim > 20 {
                    return Err(Error::Unsupported(format!(
                        "l_inf operator norms are limited to dim <= 20 (got {dim})"
                    )));
                }
                let pts = (0u32..(1u32 << dim))
                    .map(|mask| {
                        (0..*dim)
                            .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                            .collect()
                    })
                    .collect();
                Ok(Some(pts))
            }
            _ => Ok(None),
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.norm_unchecked(v))
    }

    pub(crate) fn norm_unchecked(&self, v: &[f64]) -> f64 {
        match &self.kind {
            Kind::Lp { p, .. } => lp_norm(v, *p),
            Kind::Polygon { angles, facets, .. } => {
                if v[0] == 0.0 && v[1] == 0.0 {
                    return 0.0;
                }
                let a = angle_of([v[0], v[1]]);
                // sector k spans [angles[k], angles[k+1])
                let k = angles.partition_point(|t| *t <= a);
                let k = if k == 0 { angles.len() - 1 } else { k - 1 };
                let f = facets[k];
                (f[0] * v[0] + f[1] * v[1]).max(0.0)
            }
        }
    }

    /// Rescale a nonzero vector onto the unit sphere.
    pub fn normalize(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.norm(v)?;
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(scaled(v, 1.0 / n))
    }

    pub fn derivative_interval(&self, x: &[f64], y: &[f64]) -> Result<DerivativeInterval> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        if x.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(self.derivative_unchecked(x, y))
    }

    pub(crate) fn derivative_unchecked(&self, x: &[f64], y: &[f64]) -> DerivativeInterval {
        let eps = self.settings.eps;
        match &self.kind {
            Kind::Lp { p, .. } if *p == 1.0 => {
                let cut = eps * max_abs(x);
                let (mut base, mut free) = (0.0, 0.0);
                for (xi, yi) in x.iter().zip(y) {
                    if xi.abs() <= cut {
                        free += yi.abs();
                    } else {
                        base += xi.signum() * yi;
                    }
                }
                DerivativeInterval { lo: base - free, hi: base + free }
            }
            Kind::Lp { p, .. } if p.is_infinite() => {
                let m = max_abs(x);
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for (xi, yi) in x.iter().zip(y) {
                    if xi.abs() >= (1.0 - eps) * m {
                        let d = xi.signum() * yi;
                        lo = lo.min(d);
                        hi = hi.max(d);
                    }
                }
                DerivativeInterval { lo, hi }
            }
            Kind::Lp { .. } => {
                let d = dot(&self.smooth_gradient(x), y);
                DerivativeInterval { lo: d, hi: d }
            }
            Kind::Polygon { .. } => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for f in self.active_facets(x) {
                    let d = f[0] * y[0] + f[1] * y[1];
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
                DerivativeInterval { lo, hi }
            }
        }
    }

    /// Gradient of the norm at a nonzero point of a smooth `l_p` space:
    /// `sign(x_i) (|x_i| / ‖x‖)^{p-1}`.
    pub(crate) fn smooth_gradient(&self, x: &[f64]) -> Vec<f64> {
        let p = match self.kind {
            Kind::Lp { p, .. } => p,
            Kind::Polygon { .. } => unreachable!("polygons are not smooth"),
        };
        let n = lp_norm(x, p);
        if p == 2.0 {
            return scaled(x, 1.0 / n);
        }
        x.iter().map(|xi| xi.signum() * (xi.abs() / n).powf(p - 1.0)).collect()
    }

    /// For smooth `l_p`: the unit vector `x` with `f(x) = ‖f‖_*`, the
    /// inverse of [`Space::smooth_gradient`] up to scaling.
    pub(crate) fn smooth_norming_vector(&self, f: &[f64]) -> Vec<f64> {
        let p = match self.kind {
            Kind::Lp { p, .. } => p,
            Kind::Polygon { .. } => unreachable!("polygons are not smooth"),
        };
        let m = max_abs(f);
        let x: Vec<f64> = if p == 2.0 {
            f.to_vec()
        } else {
            let e = 1.0 / (p - 1.0);
            f.iter().map(|fi| fi.signum() * (fi.abs() / m).powf(e)).collect()
        };
        let n = lp_norm(&x, p);
        scaled(&x, 1.0 / n)
    }

    fn active_facets(&self, x: &[f64]) -> Vec<[f64; 2]> {
        let Kind::Polygon { facets, .. } = &self.kind else {
            unreachable!()
        };
        let n = self.norm_unchecked(x);
        facets
            .iter()
            .copied()
            .filter(|f| f[0] * x[0] + f[1] * x[1] >= n - self.settings.eps * n)
            .collect()
    }

    pub fn support_face(&self, x: &[f64]) -> Result<SupportFace> {
        self.check_dim(x)?;
        if x.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroVector);
        }
        let eps = self.settings.eps;
        let face = match &self.kind {
            Kind::Lp { dim, p } if *p == 1.0 => {
                let cut = eps * max_abs(x);
                let zeros: Vec<usize> = (0..*dim).filter(|&i| x[i].abs() <= cut).collect();
                let base: Vec<f64> =
                    x.iter().map(|xi| if xi.abs() <= cut { 0.0 } else { xi.signum() }).collect();
                if zeros.is_empty() {
                    SupportFace::Unique(base)
                } else {
                    if zeros.len() > 20 {
                        return Err(Error::Unsupported("support face too large".into()));
                    }
                    let verts = (0u32..(1 << zeros.len()))
                        .map(|mask| {
                            let mut f = base.clone();
                            for (bit, &i) in zeros.iter().enumerate() {
                                f[i] = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
                            }
                            f
                        })
                        .collect();
                    SupportFace::Face(verts)
                }
            }
            Kind::Lp { dim, p } if p.is_infinite() => {
                let m = max_abs(x);
                let verts: Vec<Vec<f64>> = (0..*dim)
                    .filter(|&i| x[i].abs() >= (1.0 - eps) * m)
                    .map(|i| {
                        let mut f = vec![0.0; *dim];
                        f[i] = x[i].signum();
                        f
                    })
                    .collect();
                if verts.len() == 1 {
                    SupportFace::Unique(verts.into_iter().next().unwrap())
                } else {
                    SupportFace::Face(verts)
                }
            }
            Kind::Lp { .. } => SupportFace::Unique(self.smooth_gradient(x)),
            Kind::Polygon { .. } => {
                let fs: Vec<Vec<f64>> =
                    self.active_facets(x).into_iter().map(|f| f.to_vec()).collect();
                if fs.len() == 1 {
                    SupportFace::Unique(fs.into_iter().next().unwrap())
                } else {
                    SupportFace::Face(fs)
                }
            }
        };
        Ok(face)
    }

    /// Dual norm of a functional: its supremum over the unit ball.
    pub fn dual_norm(&self, f: &[f64]) -> Result<f64> {
        self.check_dim(f)?;
        Ok(match &self.kind {
            Kind::Lp { p, .. } => {
                let q = if *p == 1.0 {
                    f64::INFINITY
                } else if p.is_infinite() {
                    1.0
                } else {
                    p / (p - 1.0)
                };
                lp_norm(f, q)
            }
            Kind::Polygon { vertices, .. } => vertices
                .iter()
                .map(|v| f[0] * v[0] + f[1] * v[1])
                .fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Deterministic unit vectors covering the sphere.
    ///
    /// In the plane these are the directions at angles `2πk/resolution`,
    /// normalized in this space's norm. In dimension three a Fibonacci
    /// lattice is used, and above that a Halton sequence pushed through
    /// Box-Muller.
    pub fn sphere_mesh(&self, resolution: usize) -> Result<Vec<Vec<f64>>> {
        if resolution == 0 {
            return Err(Error::InvalidParameter("resolution must be positive".into()));
        }
        let n = self.dim();
        let raw: Vec<Vec<f64>> = match n {
            1 => vec![vec![1.0], vec![-1.0]],
            2 => (0..resolution)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / resolution as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            3 => fibonacci_sphere(resolution),
            _ => halton_gaussian(n, resolution),
        };
        Ok(raw
            .into_iter()
            .map(|v| {
                let nv = self.norm_unchecked(&v);
                scaled(&v, 1.0 / nv)
            })
            .collect())
    }

    /// The point of the unit sphere in direction `θ` (planar spaces only).
    pub(crate) fn unit_at(&self, theta: f64) -> Vec<f64> {
        let v = [theta.cos(), theta.sin()];
        let n = self.norm_unchecked(&v);
        vec![v[0] / n, v[1] / n]
    }
}

fn polygon_kind(vertices: &[[f64; 2]]) -> Result<Kind> {
    let m = vertices.len();
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidSpace(format!(
            "polygon needs an even number (>= 4) of vertices, got {m}"
        )));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpace("polygon vertices must be finite".into()));
    }
    let scale = vertices.iter().flatten().fold(0.0_f64, |a, c| a.max(c.abs()));
    let tol = 1e-9 * scale;
    let half = m / 2;
    for k in 0..half {
        let (a, b) = (vertices[k], vertices[k + half]);
        if (a[0] + b[0]).abs() > tol || (a[1] + b[1]).abs() > tol {
            return Err(Error::InvalidSpace(format!(
                "polygon is not centrally symmetric: vertex {k} has no antipode"
            )));
        }
    }
    let mut total = 0.0;
    for k in 0..m {
        let (a, b, c) = (vertices[k], vertices[(k + 1) % m], vertices[(k + 2) % m]);
        let cr = cross(a, b);
        if cr <= 0.0 {
            return Err(Error::InvalidSpace(format!(
                "vertices {k} and {} are not in strict counterclockwise order around the origin",
                (k + 1) % m
            )));
        }
        let turn = cross([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]);
        if turn < -tol * scale {
            return Err(Error::InvalidSpace(format!("polygon is not convex at vertex {}", (k + 1) % m)));
        }
        total += cr.atan2(a[0] * b[0] + a[1] * b[1]);
    }
    if (total - 2.0 * PI).abs() > 1e-6 {
        return Err(Error::InvalidSpace("vertices wind around the origin more than once".into()));
    }
    // Rotate so that angles are increasing from the vertex with smallest angle.
    let start = (0..m)
        .min_by(|&i, &j| angle_of(vertices[i]).partial_cmp(&angle_of(vertices[j])).unwrap())
        .unwrap();
    let ordered: Vec<[f64; 2]> = (0..m).map(|k| vertices[(start + k) % m]).collect();
    let angles = ordered.iter().map(|v| angle_of(*v)).collect();
    let facets = (0..m)
        .map(|k| {
            let (a, b) = (ordered[k], ordered[(k + 1) % m]);
            let det = cross(a, b);
            [(b[1] - a[1]) / det, (a[0] - b[0]) / det]
        })
        .collect();
    Ok(Kind::Polygon { vertices: ordered, angles, facets })
}

/// `M (Σ (|v_i|/M)^p)^{1/p}` with `M = max |v_i|`; stable for large `p`.
pub(crate) fn lp_norm(v: &[f64], p: f64) -> f64 {
    let m = max_abs(v);
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    if p == 2.0 {
        let s: f64 = v.iter().map(|x| (x / m) * (x / m)).sum();
        return m * s.sqrt();
    }
    if p.fract() == 0.0 && p <= 32.0 {
        let k = p as i32;
        let s: f64 = v.iter().map(|x| (x.abs() / m).powi(k)).sum();
        return m * s.powf(1.0 / p);
    }
    let s: f64 = v.iter().map(|x| (x.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn halton_gaussian(n: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [usize; 24] =
        [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];
    let pairs = n.div_ceil(2);
    assert!(2 * pairs <= PRIMES.len(), "dimension too large for the Halton mesh");
    (0..count)
        .map(|i| {
            let mut v = Vec::with_capacity(2 * pairs);
            for k in 0..pairs {
                let u1 = radical_inverse(i + 1, PRIMES[2 * k]).max(1e-300);
                let u2 = radical_inverse(i + 1, PRIMES[2 * k + 1]);
                let r = (-2.0 * u1.ln()).sqrt();
                v.push(r * (2.0 * PI * u2).cos());
                v.push(r * (2.0 * PI * u2).sin());
            }
            v.truncate(n);
            if v.iter().all(|c| *c == 0.0) {
                v[0] = 1.0;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S3: f64 = 1.7320508075688772;

    /// One-sided difference quotient of `λ ↦ ‖x + λy‖` at 0.
    fn quotient(space: &Space, x: &[f64], y: &[f64], h: f64) -> f64 {
        let xh: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + h * b).collect();
        (space.norm(&xh).unwrap() - space.norm(x).unwrap()) / h
    }

    fn spaces() -> Vec<Space> {
        vec![
            Space::lp(2, 1.0).unwrap(),
            Space::lp(2, 1.5).unwrap(),
            Space::lp(2, 2.0).unwrap(),
            Space::lp(2, 3.0).unwrap(),
            Space::lp(3, 4.0).unwrap(),
            Space::lp(3, f64::INFINITY).unwrap(),
            Space::hexagon(),
        ]
    }

    #[test]
    fn hexagon_norm_examples() {
        let h = Space::hexagon();
        assert!((h.norm(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((h.norm(&[0.75, S3 / 4.0]).unwrap() - 1.0).abs() < 1e-15);
        // every vertex has norm one; so does every edge midpoint
        let verts = h.polygon_vertices().unwrap();
        for k in 0..6 {
            let (a, b) = (verts[k], verts[(k + 1) % 6]);
            assert!((h.norm(&a).unwrap() - 1.0).abs() < 1e-15);
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            assert!((h.norm(&mid).unwrap() - 1.0).abs() < 1e-15);
        }
        // (0, 1) lies at distance √3/2 along the top edge direction
        assert!((h.norm(&[0.0, 1.0]).unwrap() - 2.0 / S3).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        assert_eq!(Space::lp(2, 3.0).unwrap().norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(Space::hexagon().norm(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = Space::lp(3, 2.0).unwrap();
        assert_eq!(s.norm(&[1.0, 2.0]), Err(Error::DimensionMismatch { expected: 3, got: 2 }));
        assert!(Space::hexagon().norm(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn large_exponent_does_not_overflow() {
        let s = Space::lp(3, 400.0).unwrap();
        let n = s.norm(&[1e200, 5e199, -1e200]).unwrap();
        assert!(n.is_finite());
        assert!((n / 1e200 - 2f64.powf(1.0 / 400.0)).abs() < 1e-12);
    }

    #[test]
    fn polygon_validation() {
        assert!(Space::polygon(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]).is_err());
        // not symmetric
        assert!(Space::polygon(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -2.0]]).is_err());
        // clockwise
        assert!(Space::polygon(vec![[1.0, 0.0], [0.0, -1.0], [-1.0, 0.0], [0.0, 1.0]]).is_err());
        // non-convex star
        let s = 0.2;
        assert!(Space::polygon(vec![
            [1.0, 0.0],
            [s, s],
            [0.0, 1.0],
            [-s, s],
            [-1.0, 0.0],
            [-s, -s],
            [0.0, -1.0],
            [s, -s]
        ])
        .is_err());
        assert!(Space::lp(0, 2.0).is_err());
        assert!(Space::lp(2, 0.5).is_err());
    }

    #[test]
    fn space_json_round_trip() {
        let d: SpaceDescriptor = serde_json::from_str(r#"{"type":"lp","dim":2,"p":"inf"}"#).unwrap();
        assert_eq!(d, SpaceDescriptor::Lp { dim: 2, p: Exponent::INFINITY });
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"type":"lp","dim":2,"p":"inf"}"#);
        let d: SpaceDescriptor =
            serde_json::from_str(r#"{"type":"polygon2","vertices":[[1,0],[0,1],[-1,0],[0,-1]]}"#)
                .unwrap();
        assert!(Space::new(d).unwrap().is_polyhedral());
        assert!(serde_json::from_str::<SpaceDescriptor>(r#"{"type":"lp","dim":2,"p":"two"}"#).is_err());
    }

    #[test]
    fn flags() {
        assert!(Space::lp(2, 3.0).unwrap().is_smooth());
        assert!(!Space::lp(2, 1.0).unwrap().is_smooth());
        assert!(!Space::lp(2, f64::INFINITY).unwrap().is_strictly_convex());
        assert!(!Space::hexagon().is_smooth());
        assert!(!Space::hexagon().is_strictly_convex());
    }

    #[test]
    fn derivative_interval_examples() {
        let l2 = Space::lp(2, 2.0).unwrap();
        let l1 = Space::lp(2, 1.0).unwrap();
        assert_eq!(
            l2.derivative_interval(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            DerivativeInterval { lo: 0.0, hi: 0.0 }
        );
        assert_eq!(
            l1.derivative_interval(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            DerivativeInterval { lo: -1.0, hi: 1.0 }
        );
        assert_eq!(
            l2.derivative_interval(&[1.0, 0.0], &[1.0, 1.0]).unwrap(),
            DerivativeInterval { lo: 1.0, hi: 1.0 }
        );
        assert_eq!(l2.derivative_interval(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn l1_derivative_matches_brute_force_flatness() {
        // oracle: ‖(1,0) + λ(0,1)‖₁ = 1 + |λ| on both sides
        let l1 = Space::lp(2, 1.0).unwrap();
        for h in [1e-3, 1e-6] {
            assert!((quotient(&l1, &[1.0, 0.0], &[0.0, 1.0], h) - 1.0).abs() < 1e-9);
            assert!((quotient(&l1, &[1.0, 0.0], &[0.0, 1.0], -h) + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn support_face_examples() {
        let l3 = Space::lp(3, 2.0).unwrap();
        assert_eq!(l3.support_face(&[1.0, 0.0, 0.0]).unwrap(), SupportFace::Unique(vec![1.0, 0.0, 0.0]));
        let l1 = Space::lp(2, 1.0).unwrap();
        let face = l1.support_face(&[1.0, 0.0]).unwrap();
        let mut fs = face.functionals();
        fs.sort_by(|a, b| b[1].partial_cmp(&a[1]).unwrap());
        assert_eq!(fs, vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
        let h = Space::hexagon();
        match h.support_face(&[0.75, S3 / 4.0]).unwrap() {
            SupportFace::Unique(f) => {
                // supporting line through (1,0) and (1/2, √3/2)
                assert!((f[0] - 1.0).abs() < 1e-14 && (f[1] - 1.0 / S3).abs() < 1e-14);
            }
            other => panic!("expected a unique functional, got {other:?}"),
        }
        assert!(matches!(h.support_face(&[1.0, 0.0]).unwrap(), SupportFace::Face(ref v) if v.len() == 2));
    }

    #[test]
    fn sphere_mesh_examples() {
        let l2 = Space::lp(2, 2.0).unwrap();
        let m = l2.sphere_mesh(4).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (v, e) in m.iter().zip(expect) {
            assert!((v[0] - e[0]).abs() < 1e-15 && (v[1] - e[1]).abs() < 1e-15);
        }
        let h = Space::hexagon();
        let m = h.sphere_mesh(6).unwrap();
        let verts = h.polygon_vertices().unwrap();
        for (v, e) in m.iter().zip(verts) {
            assert!((v[0] - e[0]).abs() < 1e-12 && (v[1] - e[1]).abs() < 1e-12);
        }
        for s in [Space::lp(2, 3.0).unwrap(), Space::lp(3, 3.0).unwrap(), Space::lp(5, 1.5).unwrap()] {
            for v in s.sphere_mesh(64).unwrap() {
                assert!((s.norm(&v).unwrap() - 1.0).abs() <= 1e-12);
            }
        }
        assert!(l2.sphere_mesh(0).is_err());
    }

    #[test]
    fn polygon_norm_agrees_with_max_of_facets() {
        // independent route: Minkowski functional as max over all facet functionals
        let h = Space::hexagon();
        let Kind::Polygon { facets, .. } = &h.kind else { unreachable!() };
        for k in 0..360 {
            let t = k as f64 * PI / 180.0 + 0.01;
            let v = [3.0 * t.cos(), 3.0 * t.sin()];
            let brute = facets.iter().map(|f| f[0] * v[0] + f[1] * v[1]).fold(f64::MIN, f64::max);
            assert!((h.norm(&v).unwrap() - brute).abs() < 1e-12);
        }
    }

    fn vec_in(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, dim)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn homogeneity_and_triangle(idx in 0usize..7, c in -100.0f64..100.0, seed in vec_in(6)) {
            let s = &spaces()[idx];
            let n = s.dim();
            let (u, v) = (&seed[..n], &seed[3..3 + n]);
            let cu: Vec<f64> = u.iter().map(|x| c * x).collect();
            let nu = s.norm(u).unwrap();
            prop_assert!((s.norm(&cu).unwrap() - c.abs() * nu).abs() <= 1e-10 * (1.0 + c.abs() * nu));
            let w: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
            prop_assert!(s.norm(&w).unwrap() <= nu + s.norm(v).unwrap() + 1e-10);
        }

        #[test]
        fn derivative_matches_difference_quotients(idx in 0usize..7, seed in vec_in(6)) {
            let s = &spaces()[idx];
            let n = s.dim();
            let (x, y) = (&seed[..n], &seed[3..3 + n]);
            prop_assume!(s.norm(x).unwrap() > 1e-3);
            let d = s.derivative_interval(x, y).unwrap();
            prop_assert!(d.lo <= d.hi);
            let ny = s.norm(y).unwrap();
            prop_assert!(d.hi.abs() <= ny * (1.0 + 1e-12) + 1e-12);
            prop_assert!(d.lo.abs() <= ny * (1.0 + 1e-12) + 1e-12);
            // convexity: quotients are nonincreasing as h decreases to zero
            let q_big = quotient(s, x, y, 1e-4);
            let q_small = quotient(s, x, y, 1e-7);
            prop_assert!(q_small <= q_big + 1e-6);
            // one-sided quotients overshoot the derivatives by O(h ‖y‖² / ‖x‖)
            let slack = 1e-4 * (1.0 + ny) * (1.0 + ny / s.norm(x).unwrap());
            prop_assert!(q_small - d.hi >= -1e-6, "hi {} vs quotient {}", d.hi, q_small);
            prop_assert!(q_small - d.hi <= slack);
            let ql = quotient(s, x, y, -1e-7);
            prop_assert!(d.lo - ql >= -1e-6);
            prop_assert!(d.lo - ql <= slack);
        }

        #[test]
        fn derivative_scaling(idx in 0usize..7, seed in vec_in(6), c in 0.01f64..100.0) {
            let s = &spaces()[idx];
            let n = s.dim();
            let (x, y) = (&seed[..n], &seed[3..3 + n]);
            prop_assume!(s.norm(x).unwrap() > 1e-3);
            let d = s.derivative_interval(x, y).unwrap();
            let cy: Vec<f64> = y.iter().map(|v| c * v).collect();
            let dc = s.derivative_interval(x, &cy).unwrap();
            prop_assert!((dc.hi - c * d.hi).abs() <= 1e-9 * c * (1.0 + d.hi.abs()));
            prop_assert!((dc.lo - c * d.lo).abs() <= 1e-9 * c * (1.0 + d.lo.abs()));
            let ny: Vec<f64> = y.iter().map(|v| -c * v).collect();
            let dn = s.derivative_interval(x, &ny).unwrap();
            prop_assert!((dn.hi + c * d.lo).abs() <= 1e-9 * c * (1.0 + d.lo.abs()));
            prop_assert!((dn.lo + c * d.hi).abs() <= 1e-9 * c * (1.0 + d.hi.abs()));
        }

        #[test]
        fn support_functionals_norm_the_point(idx in 0usize..7, seed in vec_in(3)) {
            let s = &spaces()[idx];
            let x = &seed[..s.dim()];
            prop_assume!(s.norm(x).unwrap() > 1e-3);
            let nx = s.norm(x).unwrap();
            for f in s.support_face(x).unwrap().functionals() {
                prop_assert!((dot(&f, x) - nx).abs() <= 1e-9 * (1.0 + nx));
                prop_assert!(s.dual_norm(&f).unwrap() <= 1.0 + 1e-9);
            }
        }
    }
}
