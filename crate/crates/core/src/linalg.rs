//! Small dense helpers on plain slices. Dimensions here are tiny (2 to ~20).

use nalgebra::DMatrix;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn scaled(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

pub(crate) fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub(crate) fn euclid(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub(crate) fn is_zero(a: &[f64]) -> bool {
    a.iter().all(|x| *x == 0.0)
}

pub(crate) fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Distance between the lines spanned by two vectors, as the smaller of
/// `|a - b|` and `|a + b|` after Euclidean normalization.
pub(crate) fn projective_distance(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (euclid(a), euclid(b));
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x / na, y / nb);
        plus += (x - y) * (x - y);
        minus += (x + y) * (x + y);
    }
    plus.min(minus).sqrt()
}

/// Orientation representative of a line: first entry larger than 1e-12 in
/// magnitude made positive.
pub(crate) fn canonical_sign(v: &[f64]) -> Vec<f64> {
    let scale = max_abs(v);
    match v.iter().find(|x| x.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        Some(x) if *x < 0.0 => scaled(v, -1.0),
        _ => v.to_vec(),
    }
}

/// Row-echelon null space of an `n x n` row-major matrix with the given
/// relative pivot tolerance. Free variables produce standard-looking basis
/// vectors, so `diag(1, 0, 0)` yields `{e2, e3}`.
pub(crate) fn null_space(rows: &[f64], n: usize, rtol: f64) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| rows[i * n..(i + 1) * n].to_vec()).collect();
    let scale = max_abs(rows).max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == n {
            break;
        }
        let (best, val) = (r..n)
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= rtol * scale {
            continue;
        }
        m.swap(r, best);
        let piv = m[r][c];
        for e in m[r].iter_mut() {
            *e /= piv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            let f = row[c];
            if i != r && f != 0.0 {
                for (e, p) in row.iter_mut().zip(&pivot_row) {
                    *e -= f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; n];
            v[f] = 1.0;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f];
            }
            v
        })
        .collect()
}

pub(crate) fn to_dmatrix(rows: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, rows)
}

/// Singular values in decreasing order.
pub(crate) fn singular_values(rows: &[f64], n: usize) -> Vec<f64> {
    let mut s: Vec<f64> = to_dmatrix(rows, n).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one_diagonal() {
        let ns = null_space(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 3, 1e-8);
        assert_eq!(ns, vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn null_space_general() {
        // rows (1,2,3),(2,4,6),(1,1,1): rank 2
        let m = [1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 1.0, 1.0, 1.0];
        let ns = null_space(&m, 3, 1e-10);
        assert_eq!(ns.len(), 1);
        for i in 0..3 {
            assert!(dot(&m[3 * i..3 * i + 3], &ns[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn projective_distance_ignores_sign() {
        assert!(projective_distance(&[1.0, 1.0], &[-2.0, -2.0]) < 1e-15);
        assert!((projective_distance(&[1.0, 0.0], &[0.0, 1.0]) - 2f64.sqrt()).abs() < 1e-15);
    }
}
