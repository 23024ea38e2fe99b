//! Exact sampling of the entrance law at time `t` via the tridiagonal
//! beta = 2 random-matrix model: diagonal standard normals, off-diagonal
//! chi variables with decreasing degrees of freedom, eigenvalues scaled by
//! `sqrt(t)`.

use crate::error::{Error, Result};
use crate::point::OrderedPoint;
use crate::Time;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, RngExt};
use rand_distr::{ChiSquared, Distribution, StandardNormal};

/// Draws an exact sample of the ordered spectrum distributed as the
/// entrance law `mu^n_t` (ascending).
pub fn sample_gue_spectrum<R: Rng + ?Sized>(n: usize, t: Time, rng: &mut R) -> Result<OrderedPoint> {
    if n == 0 {
        return Err(Error::domain("spectrum dimension must be >= 1"));
    }
    let scale = t.get().sqrt();
    if n == 1 {
        let z: f64 = rng.sample(StandardNormal);
        return OrderedPoint::new(vec![scale * z]);
    }

    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        m[(i, i)] = z;
    }
    for k in 0..n - 1 {
        // off-diagonal k couples rows k and k+1: chi_{2(n-1-k)} / sqrt(2)
        let df = 2.0 * (n - 1 - k) as f64;
        let c = ChiSquared::new(df)
            .map_err(|e| Error::Numerical(format!("chi-squared setup: {e}")))?
            .sample(rng)
            .sqrt()
            / std::f64::consts::SQRT_2;
        m[(k, k + 1)] = c;
        m[(k + 1, k)] = c;
    }

    let eigen = SymmetricEigen::try_new(m, 1e-13, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eigen.eigenvalues.iter().map(|v| v * scale).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    OrderedPoint::new(values)
}
