//! Small dense vector helpers and the minimal-norm solve `Jᵀ(JJᵀ)⁻¹r`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Smallest singular value accepted for the Jacobian.
pub const SIGMA_MIN: f64 = 1e-8;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(c: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

/// `a + c·b`
pub fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

/// Smallest singular value of a wide `p×n` matrix, from the smallest
/// eigenvalue of `JJᵀ`.
pub fn sigma_min(j: &DMatrix<f64>) -> f64 {
    let g = j * j.transpose();
    let lam = g.symmetric_eigenvalues().min();
    lam.max(0.0).sqrt()
}

/// Minimal-norm solution `Jᵀ(JJᵀ)⁻¹r` of `J·dx = r`.
///
/// Errors when the smallest singular value of `J` is below `sigma_floor`.
pub fn min_norm_solve(j: &DMatrix<f64>, r: &[f64], sigma_floor: f64) -> Result<Vec<f64>> {
    let g = j * j.transpose();
    let smin = g.symmetric_eigenvalues().min().max(0.0).sqrt();
    if !(smin >= sigma_floor) {
        return Err(Error::RankDeficient { sigma_min: smin });
    }
    let rhs = DVector::from_column_slice(r);
    let y = match g.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => g
            .lu()
            .solve(&rhs)
            .ok_or(Error::RankDeficient { sigma_min: smin })?,
    };
    Ok((j.transpose() * y).as_slice().to_vec())
}

/// Component of `v` orthogonal to the row space of `j`.
pub fn kernel_component(j: &DMatrix<f64>, v: &[f64]) -> Result<Vec<f64>> {
    let jv = j * DVector::from_column_slice(v);
    let row_part = min_norm_solve(j, jv.as_slice(), 0.0)?;
    Ok(sub(v, &row_part))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_norm_solution_is_in_row_space() {
        let j = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0]);
        let dx = min_norm_solve(&j, &[1.0, -1.0], SIGMA_MIN).unwrap();
        let back = &j * DVector::from_column_slice(&dx);
        assert!((back[0] - 1.0).abs() < 1e-14 && (back[1] + 1.0).abs() < 1e-14);
        let k = kernel_component(&j, &dx).unwrap();
        assert!(norm(&k) < 1e-14);
    }

    #[test]
    fn rank_deficiency_detected() {
        let j = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert!(matches!(
            min_norm_solve(&j, &[1.0, 2.0], SIGMA_MIN),
            Err(Error::RankDeficient { .. })
        ));
        assert!(sigma_min(&j) < 1e-7);
    }

    #[test]
    fn sigma_min_of_projection() {
        let j = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!((sigma_min(&j) - 1.0).abs() < 1e-15);
    }
}
