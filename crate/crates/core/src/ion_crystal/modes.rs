//! Axial and transverse normal modes of a linear chain.
//!
//! Frequencies are in units of the axial center-of-mass frequency. Column `m`
//! of [`NormalModes::axial`] holds the participation of each ion in mode `m`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NormalModes {
    /// Ascending axial mode frequencies; the first is 1.
    pub axial_freqs: Vec<f64>,
    /// Ascending transverse mode frequencies; the last is the anisotropy.
    pub transverse_freqs: Vec<f64>,
    /// Orthonormal `A[p][m]`.
    pub axial: DMatrix<f64>,
    /// Orthonormal `T[p][m]`.
    pub transverse: DMatrix<f64>,
}

fn couplings(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    DMatrix::from_fn(n, n, |p, q| {
        if p == q {
            0.0
        } else {
            1.0 / (u[p] - u[q]).abs().powi(3)
        }
    })
}

/// Axial Hessian `δ_pq(1 + 2Σ_r c_pr) − 2c_pq`.
pub fn axial_hessian(u: &[f64]) -> DMatrix<f64> {
    let c = couplings(u);
    let n = u.len();
    DMatrix::from_fn(n, n, |p, q| {
        if p == q {
            1.0 + 2.0 * c.row(p).sum()
        } else {
            -2.0 * c[(p, q)]
        }
    })
}

/// Transverse Hessian `δ_pq(β² − Σ_r c_pr) + c_pq`, with β = ω_t/ω_a.
pub fn transverse_hessian(u: &[f64], anisotropy: f64) -> DMatrix<f64> {
    let c = couplings(u);
    let n = u.len();
    DMatrix::from_fn(n, n, |p, q| {
        if p == q {
            anisotropy * anisotropy - c.row(p).sum()
        } else {
            c[(p, q)]
        }
    })
}

/// Ascending eigenpairs with each eigenvector's first non-negligible entry positive.
fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vecs = DMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, |x| x.signum());
        vecs.set_column(col, &(v * sign));
    }
    (vals, vecs)
}

pub fn normal_modes(positions: &[f64], anisotropy: f64) -> Result<NormalModes> {
    if !(anisotropy.is_finite() && anisotropy > 0.0) {
        return Err(Error::range("anisotropy", anisotropy, "must be positive"));
    }
    let (wa2, axial) = sorted_eigen(axial_hessian(positions));
    let (wt2, transverse) = sorted_eigen(transverse_hessian(positions, anisotropy));
    if let Some((mode, &omega_sq)) = wt2.iter().enumerate().find(|(_, &w)| w <= 0.0) {
        return Err(Error::ZigZag { mode, omega_sq });
    }
    Ok(NormalModes {
        axial_freqs: wa2.iter().map(|w| w.sqrt()).collect(),
        transverse_freqs: wt2.iter().map(|w| w.sqrt()).collect(),
        axial,
        transverse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion_crystal::equilibrium::equilibrium_positions;

    fn modes(n: usize, beta: f64) -> NormalModes {
        normal_modes(&equilibrium_positions(n).unwrap().positions, beta).unwrap()
    }

    #[test]
    fn two_ion_frequencies() {
        let m = modes(2, 10.0);
        assert!((m.axial_freqs[0] - 1.0).abs() < 1e-10);
        assert!((m.axial_freqs[1] - 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn three_ion_frequencies() {
        let m = modes(3, 10.0);
        assert!((m.axial_freqs[0] - 1.0).abs() < 1e-10);
        assert!((m.axial_freqs[1] - 3f64.sqrt()).abs() < 1e-10);
        assert!((m.axial_freqs[2] - (29.0f64 / 5.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn center_of_mass_modes() {
        for n in [1, 4, 9, 25] {
            let m = modes(n, 30.0);
            let inv = 1.0 / (n as f64).sqrt();
            assert!((m.axial_freqs[0] - 1.0).abs() < 1e-10);
            assert!((m.transverse_freqs[n - 1] - 30.0).abs() < 1e-10);
            for p in 0..n {
                assert!((m.axial[(p, 0)] - inv).abs() < 1e-10);
                assert!((m.transverse[(p, n - 1)] - inv).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn matrices_orthonormal_and_diagonalizing() {
        let u = equilibrium_positions(15).unwrap().positions;
        let m = normal_modes(&u, 10.0).unwrap();
        for (mat, h, freqs) in [
            (&m.axial, axial_hessian(&u), &m.axial_freqs),
            (
                &m.transverse,
                transverse_hessian(&u, 10.0),
                &m.transverse_freqs,
            ),
        ] {
            let id = mat.transpose() * mat;
            let d = mat.transpose() * h * mat;
            for i in 0..15 {
                for j in 0..15 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((id[(i, j)] - want).abs() < 1e-10);
                    if i == j {
                        assert!((d[(i, i)] - freqs[i] * freqs[i]).abs() < 1e-9);
                    } else {
                        assert!(d[(i, j)].abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn sign_convention() {
        let m = modes(6, 10.0);
        for col in 0..6 {
            let first = m
                .axial
                .column(col)
                .iter()
                .copied()
                .find(|x| x.abs() > 1e-12)
                .unwrap();
            assert!(first > 0.0);
        }
    }

    #[test]
    fn weak_transverse_confinement_is_zigzag() {
        let u = equilibrium_positions(10).unwrap().positions;
        match normal_modes(&u, 2.0) {
            Err(Error::ZigZag { mode, omega_sq }) => {
                assert_eq!(mode, 0);
                assert!(omega_sq < 0.0);
            }
            other => panic!("expected zig-zag, got {other:?}"),
        }
    }
}
