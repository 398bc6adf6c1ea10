//! Operators on a space: operator norms, norm-attainment sets `M_T` and
//! orthogonality `T ⊥_B A` under the operator norm.
//!
//! Two independent decision routes are provided. The witness route scans
//! `M_T` for a point `x` with `Ax ∈ (Tx)⁺` and a point `y` with
//! `Ay ∈ (Ty)⁻`; the oracle route minimizes `λ ↦ ‖T + λA‖` directly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cones::{golden_section, TriState};
use crate::error::{Error, Result};
use crate::linalg::{canonical_sign, is_zero, max_abs, projective_distance, unit_vector};
use crate::par;
use crate::spaces::Space;

/// Points within this relative distance of the maximum are treated as
/// numerically attaining and enter the orthogonality decision.
const SAMPLE_RTOL: f64 = 1e-12;
const POWER_ITERS: usize = 500;

/// A square real matrix acting on column vectors: column `j` is the image
/// of the `j`-th standard basis vector. Serialized row-major as
/// `{"matrix": [[a11, a12], [a21, a22]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct OperatorMatrix {
    n: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for OperatorMatrix {
    type Error = Error;
    fn try_from(m: MatrixJson) -> Result<Self> {
        OperatorMatrix::from_rows(m.matrix)
    }
}

impl From<OperatorMatrix> for MatrixJson {
    fn from(t: OperatorMatrix) -> Self {
        MatrixJson { matrix: t.rows() }
    }
}

impl OperatorMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<OperatorMatrix> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidOperator("matrix must have at least one row".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidOperator(format!(
                "matrix must be square: {n} rows but a row of length {}",
                r.len()
            )));
        }
        OperatorMatrix::from_row_major(n, rows.concat())
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<OperatorMatrix> {
        if n == 0 || data.len() != n * n {
            return Err(Error::InvalidOperator(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidOperator("matrix entries must be finite".into()));
        }
        Ok(OperatorMatrix { n, data })
    }

    /// The matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<OperatorMatrix> {
        let n = columns.len();
        let mut data = vec![0.0; n * n];
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            for (i, v) in c.iter().enumerate() {
                data[i * n + j] = *v;
            }
        }
        OperatorMatrix::from_row_major(n, data)
    }

    pub fn identity(n: usize) -> OperatorMatrix {
        OperatorMatrix::diag(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> OperatorMatrix {
        OperatorMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn diag(d: &[f64]) -> OperatorMatrix {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = *v;
        }
        OperatorMatrix { n, data }
    }

    /// `u fᵀ`, the map `v ↦ f(v) u`.
    pub fn rank_one(u: &[f64], f: &[f64]) -> Result<OperatorMatrix> {
        if u.len() != f.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), got: f.len() });
        }
        let data = u.iter().flat_map(|ui| f.iter().map(move |fj| ui * fj)).collect();
        OperatorMatrix::from_row_major(u.len(), data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &[f64]) -> Vec<f64> {
        self.data.chunks(self.n).map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `Tᵀ f`: the functional `v ↦ f(Tv)`.
    pub(crate) fn transpose_apply_unchecked(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, r) in self.data.chunks(self.n).enumerate() {
            for (o, a) in out.iter_mut().zip(r) {
                *o += f[i] * a;
            }
        }
        out
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: f64, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(self.add_scaled_unchecked(c, other))
    }

    pub(crate) fn add_scaled_unchecked(&self, c: f64, other: &OperatorMatrix) -> OperatorMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + c * b).collect();
        OperatorMatrix { n: self.n, data }
    }

    pub fn scale(&self, c: f64) -> OperatorMatrix {
        OperatorMatrix { n: self.n, data: self.data.iter().map(|a| c * a).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        Ok(OperatorMatrix { n, data })
    }

    pub fn transpose(&self) -> OperatorMatrix {
        let n = self.n;
        let data = (0..n * n).map(|k| self.get(k % n, k / n)).collect();
        OperatorMatrix { n, data }
    }
}

/// Angular intervals of `M_T` in the plane. Each `[a, b]` (with `a <= b`)
/// stands for the directions `θ ∈ [a, b]` and their antipodes, so `M_T` is
/// the union of these arcs and their negatives. A single interval means
/// `M_T = ±D` with `D` connected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arcs2d {
    pub arcs: Vec<[f64; 2]>,
    pub connected: bool,
}

/// The operator norm and the set where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormAttainment {
    pub value: f64,
    /// One unit vector per antipodal cluster of `M_T`.
    pub witnesses: Vec<Vec<f64>>,
    /// True when computed exactly from extreme points of the unit ball.
    pub exact: bool,
    pub arcs_2d: Option<Arcs2d>,
    /// Every computed point of `M_T`, one sign per antipodal pair, that the
    /// orthogonality decision inspects. Contains the witnesses.
    pub samples: Vec<Vec<f64>>,
}

/// Outcome of the witness route for `T ⊥_B A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthDecision {
    pub verdict: TriState,
    /// A point `x ∈ M_T` with `Ax ∈ (Tx)⁺`, when one was found.
    pub witness_plus: Option<Vec<f64>>,
    /// A point `y ∈ M_T` with `Ay ∈ (Ty)⁻`, when one was found.
    pub witness_minus: Option<Vec<f64>>,
    /// Best plus and minus margins over `M_T`, in units of `max_j ‖Ae_j‖`.
    pub margins: (f64, f64),
}

/// A hyperplane `H = ker f` with an explicit basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub basis: Vec<Vec<f64>>,
    pub normal_functional: Vec<f64>,
}

impl Hyperplane {
    /// Basis `e_j - (f_j / f_k) e_k` (`j ≠ k`) where `k` maximizes `|f_k|`.
    pub fn kernel_of(f: &[f64]) -> Result<Hyperplane> {
        if is_zero(f) {
            return Err(Error::ZeroVector);
        }
        let n = f.len();
        let k = (0..n).max_by(|&a, &b| f[a].abs().total_cmp(&f[b].abs())).unwrap();
        let basis = (0..n)
            .filter(|&j| j != k)
            .map(|j| {
                let mut b = unit_vector(n, j);
                b[k] = -f[j] / f[k];
                b
            })
            .collect();
        Ok(Hyperplane { basis, normal_functional: f.to_vec() })
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let s: f64 = self.normal_functional.iter().zip(v).map(|(a, b)| a * b).sum();
        s.abs() <= tol * max_abs(v).max(1.0)
    }
}

/// Scale used to make operator margins dimensionless.
pub(crate) fn column_scale(space: &Space, a: &OperatorMatrix) -> f64 {
    (0..a.dim()).map(|j| space.norm_unchecked(&a.column(j))).fold(0.0, f64::max)
}

fn check_operator(space: &Space, t: &OperatorMatrix) -> Result<()> {
    if t.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: t.dim() });
    }
    Ok(())
}

fn angle_of(v: &[f64]) -> f64 {
    v[1].atan2(v[0])
}

/// Precomputed directions for repeated operator-norm evaluations on one space.
pub(crate) struct NormSolver<'a> {
    space: &'a Space,
    mesh: Mesh,
    multistart: usize,
}

enum Mesh {
    /// Dimension one: the norm is `|t|`.
    Line,
    /// Extreme points of a polyhedral unit ball.
    Extreme(Vec<Vec<f64>>),
    /// Half circle of unit vectors at angles `k · step`.
    Circle { angles: Vec<f64>, points: Vec<Vec<f64>>, step: f64 },
    /// Unit sphere directions in dimension three and above.
    Sphere { points: Vec<Vec<f64>>, step: f64 },
}

struct Point {
    x: Vec<f64>,
    value: f64,
}

/// Surface area of the Euclidean unit sphere in `R^n`.
fn sphere_area(n: usize) -> f64 {
    // A_n = 2π^{n/2} / Γ(n/2), via A_{n+2} = 2π A_n / n.
    let (mut a, mut k) = if n.is_multiple_of(2) { (2.0 * PI, 2) } else { (4.0 * PI, 3) };
    while k < n {
        a *= 2.0 * PI / k as f64;
        k += 2;
    }
    a
}

impl<'a> NormSolver<'a> {
    pub(crate) fn new(space: &'a Space) -> Result<NormSolver<'a>> {
        NormSolver::with_multistart(space, space.settings().multistart)
    }

    pub(crate) fn with_multistart(space: &'a Space, multistart: usize) -> Result<NormSolver<'a>> {
        let n = space.dim();
        let settings = space.settings();
        let mesh = if n == 1 {
            Mesh::Line
        } else if let Some(ext) = space.extreme_points()? {
            match space.polygon_vertices() {
                Some(v) => Mesh::Extreme(v.iter().map(|p| p.to_vec()).collect()),
                None => Mesh::Extreme(ext),
            }
        } else if n == 2 {
            let r = settings.resolution + settings.resolution % 2;
            let step = 2.0 * PI / r as f64;
            let angles: Vec<f64> = (0..r / 2).map(|k| k as f64 * step).collect();
            let points = angles.iter().map(|&t| space.unit_at(t)).collect();
            Mesh::Circle { angles, points, step }
        } else {
            let count = settings.directions_nd;
            let points = space.sphere_mesh(count)?;
            let step = (sphere_area(n) / count as f64).powf(1.0 / (n as f64 - 1.0));
            Mesh::Sphere { points, step }
        };
        Ok(NormSolver { space, mesh, multistart: multistart.max(1) })
    }

    fn norm_of(&self, t: &OperatorMatrix, x: &[f64]) -> f64 {
        self.space.norm_unchecked(&t.apply_unchecked(x))
    }

    /// `‖T‖` alone. Planar meshes skip the witness polish, since the value
    /// is already exact to rounding once the angle is within `1e-9`.
    pub(crate) fn value(&self, t: &OperatorMatrix) -> f64 {
        match &self.mesh {
            Mesh::Line => t.get(0, 0).abs(),
            Mesh::Extreme(pts) => pts.iter().map(|e| self.norm_of(t, e)).fold(0.0, f64::max),
            Mesh::Circle { .. } => {
                let vals = self.circle_values(t);
                self.circle_peaks(&vals)
                    .into_iter()
                    .map(|k| self.golden_peak(t, k).1)
                    .fold(0.0, f64::max)
            }
            Mesh::Sphere { .. } => self.smooth_points(t).0.iter().map(|p| p.value).fold(0.0, f64::max),
        }
    }

    fn circle_values(&self, t: &OperatorMatrix) -> Vec<f64> {
        let Mesh::Circle { points, .. } = &self.mesh else { unreachable!() };
        let (a, b, c, d) = (t.get(0, 0), t.get(0, 1), t.get(1, 0), t.get(1, 1));
        points
            .iter()
            .map(|u| self.space.norm_unchecked(&[a * u[0] + b * u[1], c * u[0] + d * u[1]]))
            .collect()
    }

    /// Indices of the best `multistart` local maxima on the half circle,
    /// which wraps onto itself through the antipodal map.
    fn circle_peaks(&self, vals: &[f64]) -> Vec<usize> {
        let m = vals.len();
        let mut peaks: Vec<usize> = (0..m)
            .filter(|&k| {
                let v = vals[k];
                v >= vals[(k + m - 1) % m] && v >= vals[(k + 1) % m]
            })
            .collect();
        peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
        peaks.truncate(self.multistart);
        peaks
    }

    /// Golden-section maximization of `θ ↦ ‖T u(θ)‖` around mesh index `k`.
    fn golden_peak(&self, t: &OperatorMatrix, k: usize) -> (Vec<f64>, f64) {
        let Mesh::Circle { points, angles, step } = &self.mesh else { unreachable!() };
        let f = |th: f64| -self.norm_of(t, &self.space.unit_at(th));
        let (th, v) = golden_section(f, angles[k] - step, angles[k] + step, 1e-10);
        let v0 = self.norm_of(t, &points[k]);
        if -v >= v0 {
            (self.space.unit_at(th), -v)
        } else {
            (points[k].clone(), v0)
        }
    }

    /// Refined local maxima followed by all mesh points, both with values.
    fn smooth_points(&self, t: &OperatorMatrix) -> (Vec<Point>, Vec<Point>) {
        let (points, starts) = match &self.mesh {
            Mesh::Circle { points, .. } => {
                let vals = self.circle_values(t);
                let refined: Vec<Point> = self
                    .circle_peaks(&vals)
                    .into_iter()
                    .map(|k| self.power_refine(t, self.golden_peak(t, k).0))
                    .collect();
                let mesh = points.iter().zip(vals).map(|(x, value)| Point { x: x.clone(), value });
                (mesh.collect::<Vec<_>>(), refined)
            }
            Mesh::Sphere { points, step } => {
                let vals: Vec<f64> = points.iter().map(|u| self.norm_of(t, u)).collect();
                let mut order: Vec<usize> = (0..vals.len()).collect();
                order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
                let radius = self.space.settings().cluster_steps * step;
                let mut chosen: Vec<usize> = Vec::new();
                for &k in &order {
                    if chosen.len() >= self.multistart {
                        break;
                    }
                    if chosen.iter().all(|&c| projective_distance(&points[c], &points[k]) > radius) {
                        chosen.push(k);
                    }
                }
                let refined =
                    chosen.iter().map(|&k| self.power_refine(t, points[k].clone())).collect();
                let mesh = points.iter().zip(vals).map(|(x, value)| Point { x: x.clone(), value });
                (mesh.collect::<Vec<_>>(), refined)
            }
            _ => unreachable!("smooth_points needs a mesh"),
        };
        (starts, points)
    }

    /// Nonlinear power iteration `x ← J*(Tᵀ J(Tx))`, where `J` maps a point
    /// to its norming functional and `J*` a functional to its norming unit
    /// vector. Each step cannot decrease `‖Tx‖` by Hölder's inequality; a
    /// guard stops at the first step that would.
    fn power_refine(&self, t: &OperatorMatrix, mut x: Vec<f64>) -> Point {
        let mut v = self.norm_of(t, &x);
        for _ in 0..POWER_ITERS {
            let y = t.apply_unchecked(&x);
            if is_zero(&y) {
                break;
            }
            let z = t.transpose_apply_unchecked(&self.space.smooth_gradient(&y));
            if is_zero(&z) {
                break;
            }
            let xn = self.space.smooth_norming_vector(&z);
            let vn = self.norm_of(t, &xn);
            // The iteration is monotone in exact arithmetic; near a flat
            // maximum the value only moves by rounding while x still improves.
            // Written so that a NaN value also stops the iteration.
            if vn.partial_cmp(&(v * (1.0 - 4.0 * f64::EPSILON))).is_none_or(|o| o.is_lt()) {
                break;
            }
            let moved = projective_distance(&xn, &x);
            x = xn;
            v = vn;
            if moved <= 1e-15 {
                break;
            }
        }
        Point { x, value: v }
    }

    pub(crate) fn attainment(&self, t: &OperatorMatrix) -> NormAttainment {
        let n = self.space.dim();
        if t.is_zero() {
            let e = self.space.normalize(&unit_vector(n, 0)).expect("nonzero");
            let arcs_2d = (n == 2).then(|| Arcs2d { arcs: vec![[0.0, PI]], connected: true });
            return NormAttainment {
                value: 0.0,
                witnesses: vec![e.clone()],
                exact: true,
                arcs_2d,
                samples: vec![e],
            };
        }
        match &self.mesh {
            Mesh::Line => {
                let e = self.space.normalize(&[1.0]).expect("nonzero");
                NormAttainment {
                    value: self.norm_of(t, &e),
                    witnesses: vec![e.clone()],
                    exact: true,
                    arcs_2d: None,
                    samples: vec![e],
                }
            }
            Mesh::Extreme(pts) => self.polyhedral_attainment(t, pts),
            Mesh::Circle { step, .. } => self.circle_attainment(t, *step),
            Mesh::Sphere { step, .. } => self.sphere_attainment(t, *step),
        }
    }

    fn polyhedral_attainment(&self, t: &OperatorMatrix, pts: &[Vec<f64>]) -> NormAttainment {
        let vals: Vec<f64> = pts.iter().map(|e| self.norm_of(t, e)).collect();
        let value = vals.iter().copied().fold(0.0, f64::max);
        let cut = value * (1.0 - SAMPLE_RTOL);
        let att: Vec<bool> = vals.iter().map(|v| *v >= cut).collect();
        if self.space.dim() != 2 {
            let mut witnesses: Vec<Vec<f64>> = Vec::new();
            for (e, _) in pts.iter().zip(&att).filter(|(_, a)| **a) {
                if witnesses.iter().all(|w| projective_distance(w, e) > 1e-9) {
                    witnesses.push(canonical_sign(e));
                }
            }
            return NormAttainment {
                value,
                samples: witnesses.clone(),
                witnesses,
                exact: true,
                arcs_2d: None,
            };
        }
        // Planar: vertices are in counterclockwise order. An edge belongs to
        // M_T when both ends and its midpoint attain (convexity along the edge).
        let m = pts.len();
        let edge: Vec<bool> = (0..m)
            .map(|k| {
                let (a, b) = (&pts[k], &pts[(k + 1) % m]);
                att[k] && att[(k + 1) % m] && {
                    let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                    self.norm_of(t, &mid) >= cut
                }
            })
            .collect();
        let turn = |k: usize| {
            let (a, b) = (&pts[k], &pts[(k + 1) % m]);
            (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
        };
        if edge.iter().all(|e| *e) {
            let a = angle_of(&pts[0]);
            return NormAttainment {
                value,
                witnesses: vec![canonical_sign(&pts[0])],
                exact: true,
                arcs_2d: Some(Arcs2d { arcs: vec![[a, a + PI]], connected: true }),
                samples: pts[..m / 2].to_vec(),
            };
        }
        let (mut witnesses, mut samples, mut arcs) = (Vec::new(), Vec::new(), Vec::new());
        for s in 0..m / 2 {
            // a run starts where the incoming edge does not attain
            if !att[s] || edge[(s + m - 1) % m] {
                continue;
            }
            let start = angle_of(&pts[s]);
            let mut end = start;
            let mut k = s;
            samples.push(pts[s].clone());
            while edge[k] {
                end += turn(k);
                k = (k + 1) % m;
                samples.push(pts[k].clone());
            }
            witnesses.push(canonical_sign(&pts[s]));
            arcs.push([start, end]);
        }
        // Runs that start in the second half but wrap into the first are
        // represented by their antipodes, which start in the first half.
        let connected = arcs.len() == 1;
        NormAttainment {
            value,
            witnesses,
            exact: true,
            arcs_2d: Some(Arcs2d { arcs, connected }),
            samples,
        }
    }

    fn circle_attainment(&self, t: &OperatorMatrix, step: f64) -> NormAttainment {
        let settings = self.space.settings();
        let (refined, mesh) = self.smooth_points(t);
        let value = refined.iter().chain(&mesh).map(|p| p.value).fold(0.0, f64::max);
        let near_cut = value * (1.0 - settings.value_rtol);
        let tight_cut = value * (1.0 - SAMPLE_RTOL);
        // refined points first so they win ties for cluster representative
        let near: Vec<&Point> =
            refined.iter().chain(&mesh).filter(|p| p.value >= near_cut).collect();
        let radius = settings.cluster_steps * step;
        let angles: Vec<f64> = near.iter().map(|p| angle_of(&p.x).rem_euclid(PI)).collect();
        let groups = circle_groups(&angles, PI, radius);

        let mut witnesses = Vec::new();
        let mut samples = Vec::new();
        let mut arcs = Vec::new();
        let full = groups.len() == 1 && groups[0].full;
        for g in &groups {
            let rep = g
                .members
                .iter()
                .map(|(i, _)| *i)
                .fold(None::<usize>, |b, i| match b {
                    Some(j) if near[j].value >= near[i].value => Some(j),
                    _ => Some(i),
                })
                .expect("groups are nonempty");
            witnesses.push(canonical_sign(&near[rep].x));
            samples.push(near[rep].x.clone());
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (i, a) in &g.members {
                if near[*i].value >= tight_cut || *i == rep {
                    lo = lo.min(*a);
                    hi = hi.max(*a);
                    if *i != rep {
                        samples.push(near[*i].x.clone());
                    }
                }
            }
            arcs.push([lo, hi]);
        }
        if full {
            arcs = vec![[0.0, PI]];
        }
        let connected = arcs.len() == 1;
        NormAttainment {
            value,
            witnesses,
            exact: false,
            arcs_2d: Some(Arcs2d { arcs, connected }),
            samples,
        }
    }

    fn sphere_attainment(&self, t: &OperatorMatrix, step: f64) -> NormAttainment {
        let settings = self.space.settings();
        let (refined, mesh) = self.smooth_points(t);
        let value = refined.iter().chain(&mesh).map(|p| p.value).fold(0.0, f64::max);
        let near_cut = value * (1.0 - settings.value_rtol);
        let tight_cut = value * (1.0 - SAMPLE_RTOL);
        let mut near: Vec<&Point> =
            refined.iter().chain(&mesh).filter(|p| p.value >= near_cut).collect();
        // stable sort keeps refined points ahead of mesh points on ties
        near.sort_by(|a, b| b.value.total_cmp(&a.value));
        let radius = settings.cluster_steps * step;
        let mut reps: Vec<&Point> = Vec::new();
        let mut samples = Vec::new();
        for p in near {
            let fresh = reps.iter().all(|r| projective_distance(&r.x, &p.x) >= radius);
            if fresh {
                reps.push(p);
                samples.push(p.x.clone());
            } else if p.value >= tight_cut {
                samples.push(p.x.clone());
            }
        }
        NormAttainment {
            value,
            witnesses: reps.iter().map(|r| canonical_sign(&r.x)).collect(),
            exact: false,
            arcs_2d: None,
            samples,
        }
    }
}

struct CircleGroup {
    /// (index into the input, unwrapped angle)
    members: Vec<(usize, f64)>,
    /// The group closes up around the whole circle.
    full: bool,
}

/// Groups points on a circle of length `period` whose consecutive gaps are
/// below `radius`.
fn circle_groups(angles: &[f64], period: f64, radius: f64) -> Vec<CircleGroup> {
    if angles.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<(usize, f64)>> = vec![vec![(order[0], angles[order[0]])]];
    for w in order.windows(2) {
        let (a, b) = (angles[w[0]], angles[w[1]]);
        if b - a >= radius {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push((w[1], b));
    }
    let first = angles[order[0]];
    let last = angles[*order.last().unwrap()];
    let wraps = first + period - last < radius;
    if wraps && groups.len() == 1 {
        return vec![CircleGroup { members: groups.pop().unwrap(), full: true }];
    }
    if wraps {
        let tail = groups.pop().unwrap();
        let head = &mut groups[0];
        let mut merged: Vec<(usize, f64)> = tail.into_iter().map(|(i, a)| (i, a - period)).collect();
        merged.append(head);
        *head = merged;
    }
    groups.into_iter().map(|members| CircleGroup { members, full: false }).collect()
}

/// `‖T‖` together with the set `M_T` where it is attained.
///
/// Polyhedral spaces are handled exactly over the extreme points of the
/// unit ball. Smooth `l_p` spaces use a mesh scan refined from the best
/// local maxima; witnesses within `value_rtol` of the maximum are clustered
/// at `cluster_steps` mesh steps.
pub fn operator_norm(space: &Space, t: &OperatorMatrix) -> Result<NormAttainment> {
    check_operator(space, t)?;
    Ok(NormSolver::new(space)?.attainment(t))
}

fn margins_at(space: &Space, t: &OperatorMatrix, a: &OperatorMatrix, x: &[f64], scale: f64) -> (f64, f64) {
    let tx = t.apply_unchecked(x);
    if is_zero(&tx) {
        return (f64::INFINITY, f64::INFINITY);
    }
    let d = space.derivative_unchecked(&tx, &a.apply_unchecked(x));
    (d.hi / scale, -d.lo / scale)
}

/// Decide `T ⊥_B A` from the norm-attainment set: it holds iff some
/// `x ∈ M_T` has `Ax ∈ (Tx)⁺` and some (possibly different) `y ∈ M_T` has
/// `Ay ∈ (Ty)⁻`. `0 ⊥_B A` holds for every `A`.
pub fn bj_orthogonal_operators(space: &Space, t: &OperatorMatrix, a: &OperatorMatrix) -> Result<OrthDecision> {
    check_operator(space, t)?;
    check_operator(space, a)?;
    let m = NormSolver::new(space)?.attainment(t);
    bj_orthogonal_operators_given(space, t, &m, a)
}

/// As [`bj_orthogonal_operators`] with a precomputed `M_T`, so one
/// attainment set can serve many `A`.
pub fn bj_orthogonal_operators_given(
    space: &Space,
    t: &OperatorMatrix,
    m: &NormAttainment,
    a: &OperatorMatrix,
) -> Result<OrthDecision> {
    check_operator(space, t)?;
    check_operator(space, a)?;
    let settings = space.settings();
    if t.is_zero() {
        let w = m.samples.first().cloned();
        return Ok(OrthDecision {
            verdict: TriState::vacuous(),
            witness_plus: w.clone(),
            witness_minus: w,
            margins: (f64::INFINITY, f64::INFINITY),
        });
    }
    let scale = column_scale(space, a);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut best_plus = (f64::NEG_INFINITY, None::<Vec<f64>>);
    let mut best_minus = (f64::NEG_INFINITY, None::<Vec<f64>>);
    let mut consider = |x: &[f64]| {
        let (mp, mm) = margins_at(space, t, a, x, scale);
        if mp > best_plus.0 {
            best_plus = (mp, Some(x.to_vec()));
        }
        if mm > best_minus.0 {
            best_minus = (mm, Some(x.to_vec()));
        }
    };
    for x in &m.samples {
        consider(x);
    }
    // Along genuine planar arcs of M_T the margins vary continuously; scan
    // each arc and polish the best sample by golden section.
    if let (Some(arcs), false) = (&m.arcs_2d, m.exact) {
        for &[lo, hi] in &arcs.arcs {
            if hi - lo <= 1e-12 {
                continue;
            }
            const SCAN: usize = 256;
            let at = |k: usize| lo + (hi - lo) * k as f64 / SCAN as f64;
            for sel in [0usize, 1] {
                let f = |th: f64| {
                    let mm = margins_at(space, t, a, &space.unit_at(th), scale);
                    if sel == 0 { mm.0 } else { mm.1 }
                };
                let (kbest, _) = (0..=SCAN)
                    .map(|k| (k, f(at(k))))
                    .fold((0, f64::NEG_INFINITY), |b, (k, v)| if v > b.1 { (k, v) } else { b });
                let (l, r) = (at(kbest.saturating_sub(1)), at((kbest + 1).min(SCAN)));
                let (th, _) = golden_section(|th| -f(th), l, r, 1e-12);
                consider(&space.unit_at(th));
                consider(&space.unit_at(at(kbest)));
            }
        }
    }
    let verdict = TriState::classify(best_plus.0.min(best_minus.0), settings);
    let keep = |(mg, w): (f64, Option<Vec<f64>>)| if mg >= -settings.eps { w } else { None };
    let margins = (best_plus.0, best_minus.0);
    Ok(OrthDecision {
        verdict,
        witness_plus: keep(best_plus),
        witness_minus: keep(best_minus),
        margins,
    })
}

/// Decide `T ⊥_B A` by minimizing the convex `ψ(λ) = ‖T + λA‖` over
/// `|λ| <= 2‖T‖/‖A‖`, which contains every minimizer since
/// `ψ(λ) >= |λ|‖A‖ - ‖T‖`. Independent of the cone machinery.
///
/// The margin is the steepest secant slope `(ψ(λ) - ‖T‖) / (|λ| max_j‖Ae_j‖)`
/// found on the way to the minimizer; decreases within `1e-12 ‖T‖` count as
/// rounding.
pub fn bj_orthogonal_operators_oracle(
    space: &Space,
    t: &OperatorMatrix,
    a: &OperatorMatrix,
) -> Result<TriState> {
    check_operator(space, t)?;
    check_operator(space, a)?;
    let settings = space.settings();
    if a.is_zero() {
        return Ok(TriState::classify(0.0, settings));
    }
    if t.is_zero() {
        return Ok(TriState::vacuous());
    }
    let full = NormSolver::new(space)?;
    let fast = NormSolver::with_multistart(space, settings.multistart.min(4))?;
    let nt = full.value(t);
    let na = full.value(a);
    let scale = column_scale(space, a);
    let half = 2.0 * nt / na;
    let psi = |l: f64| fast.value(&t.add_scaled_unchecked(l, a));

    const CELLS: usize = 64;
    let grid: Vec<f64> =
        (0..=CELLS).map(|i| -half + 2.0 * half * i as f64 / CELLS as f64).collect();
    let vals = par::map_range(grid.len(), |i| psi(grid[i]));
    let best = (0..=CELLS).fold(0, |b, i| if vals[i] < vals[b] { i } else { b });
    let (gl, gv) = golden_section(
        psi,
        grid[best.saturating_sub(1)],
        grid[(best + 1).min(CELLS)],
        1e-10 * half,
    );
    let (lstar, vstar) = if gv < vals[best] { (gl, gv) } else { (grid[best], vals[best]) };
    let noise = 1e-12 * nt;
    if vstar - nt >= -noise || lstar == 0.0 {
        return Ok(TriState::classify(0.0, settings));
    }
    // Secant slopes steepen towards zero for a convex ψ; walk in until the
    // decrease drops to rounding level.
    let mut margin = (vstar - nt) / (lstar.abs() * scale);
    let mut l = lstar;
    for _ in 0..40 {
        l *= 0.5;
        let drop = psi(l) - nt;
        if drop >= -noise {
            break;
        }
        margin = margin.min(drop / (l.abs() * scale));
    }
    Ok(TriState::classify(margin, settings))
}

/// Find `x ∈ D` with `Tx ⊥_B Ax` when `M_T = ±D` for a connected arc `D`
/// and `T ⊥_B A` holds (planar spaces only).
///
/// Returns `Ok(None)` when the search fails, which would contradict the
/// statement being reproduced, and `Err(Error::Precondition)` when the
/// hypotheses are not met.
pub fn corollary_2_3_check(space: &Space, t: &OperatorMatrix, a: &OperatorMatrix) -> Result<Option<Vec<f64>>> {
    check_operator(space, t)?;
    check_operator(space, a)?;
    if space.dim() != 2 {
        return Err(Error::Precondition("the connected-arc check is planar only".into()));
    }
    let m = NormSolver::new(space)?.attainment(t);
    let arcs = m.arcs_2d.clone().expect("planar attainment has arcs");
    if !arcs.connected {
        return Err(Error::Precondition(format!(
            "M_T is not of the form ±D with D connected ({} antipodal components)",
            arcs.arcs.len()
        )));
    }
    let decision = bj_orthogonal_operators_given(space, t, &m, a)?;
    if !decision.verdict.holds() {
        return Err(Error::Precondition("T ⊥_B A does not hold".into()));
    }
    let eps = space.settings().eps;
    let scale = column_scale(space, a);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let both = |x: &[f64]| {
        let (p, q) = margins_at(space, t, a, x, scale);
        (p >= -eps, q >= -eps)
    };
    let (wp, wm) = match (decision.witness_plus, decision.witness_minus) {
        (Some(p), Some(q)) => (p, q),
        _ => return Ok(None),
    };
    for w in [&wp, &wm] {
        if both(w) == (true, true) {
            return Ok(Some(w.clone()));
        }
    }
    let [lo, hi] = arcs.arcs[0];
    if hi - lo <= 1e-12 {
        return Ok(None);
    }
    // Place both witnesses on D, then bisect keeping `plus` on the left end
    // and `minus` on the right end.
    let on_arc = |w: &[f64]| {
        let mut th = angle_of(w);
        while th < lo - 1e-9 {
            th += PI;
        }
        while th > hi + 1e-9 {
            th -= PI;
        }
        th.clamp(lo, hi)
    };
    let (mut l, mut r) = (on_arc(&wp), on_arc(&wm));
    for _ in 0..200 {
        let mid = 0.5 * (l + r);
        let x = space.unit_at(mid);
        match both(&x) {
            (true, true) => return Ok(Some(x)),
            (true, false) => l = mid,
            _ => r = mid,
        }
        if (r - l).abs() <= 1e-15 {
            break;
        }
    }
    for th in [l, r] {
        let x = space.unit_at(th);
        if both(&x) == (true, true) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}
