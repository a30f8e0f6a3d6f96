//! Seeded sampling helpers.
//!
//! All randomness flows from `ChaCha8Rng` seeded with a `u64`; normal deviates use the
//! Box-Muller transform so that instances reproduce across implementations.

use nalgebra::DMatrix;
use rand::Rng;

/// One standard normal deviate from two uniforms (cosine branch of Box-Muller).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Matrix of i.i.d. standard normals, filled column by column.
pub fn standard_normal_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for v in m.iter_mut() {
        *v = standard_normal(rng);
    }
    m
}

/// Uniform deviate on `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
