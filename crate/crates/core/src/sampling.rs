//! Seeded random draws. Every trial gets its own ChaCha stream derived from
//! `(seed, trial)`, so results do not depend on evaluation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operators::OperatorMatrix;
use crate::spaces::Space;

pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub(crate) fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub(crate) fn gaussian_operator(rng: &mut ChaCha8Rng, n: usize) -> OperatorMatrix {
    OperatorMatrix::from_row_major(n, gaussian_vec(rng, n * n)).expect("square data")
}

/// A random unit vector of `space`. Falls back to `e1` on the (measure
/// zero) event of a zero draw.
pub(crate) fn unit_vec(space: &Space, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v = gaussian_vec(rng, space.dim());
    space.normalize(&v).unwrap_or_else(|_| {
        let mut e = vec![0.0; space.dim()];
        e[0] = 1.0;
        e
    })
}

/// A random element of the support face at `x`: a random convex combination
/// of the face's extreme functionals.
pub(crate) fn face_functional(space: &Space, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let face = space.support_face(x).expect("nonzero point").functionals();
    if face.len() == 1 {
        return face.into_iter().next().unwrap();
    }
    let w: Vec<f64> = (0..face.len()).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let mut f = vec![0.0; x.len()];
    for (g, c) in face.iter().zip(&w) {
        for (fi, gi) in f.iter_mut().zip(g) {
            *fi += c / total * gi;
        }
    }
    f
}
