//! Equilibrium of N ions in a harmonic well with Coulomb repulsion.
//!
//! Positions are in units of `d = (e²/(4πε₀ m ω_a²))^{1/3}`, where the
//! potential reads `Σ u_p²/2 + Σ_{p<q} 1/|u_p − u_q|`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MAX_IONS: usize = 100;
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 200;

/// Ascending dimensionless ion positions.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    pub positions: Vec<f64>,
    /// Max-norm of the potential gradient at the solution.
    pub residual: f64,
    pub iterations: usize,
}

fn potential(u: &[f64]) -> f64 {
    let mut v: f64 = u.iter().map(|x| 0.5 * x * x).sum();
    for p in 0..u.len() {
        for q in p + 1..u.len() {
            v += 1.0 / (u[q] - u[p]).abs();
        }
    }
    v
}

fn gradient(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut g = u.to_vec();
    for p in 0..n {
        for q in 0..n {
            if p != q {
                let d = u[p] - u[q];
                g[p] -= d.signum() / (d * d);
            }
        }
    }
    g
}

fn hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut h = DMatrix::zeros(n, n);
    for p in 0..n {
        h[(p, p)] = 1.0;
        for q in 0..n {
            if p != q {
                let c = 2.0 / (u[p] - u[q]).abs().powi(3);
                h[(p, q)] = -c;
                h[(p, p)] += c;
            }
        }
    }
    h
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn is_ascending(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[0] < w[1])
}

/// Damped Newton solve from a uniformly spaced start.
pub fn equilibrium_positions(n: usize) -> Result<EquilibriumSolution> {
    if n == 0 || n > MAX_IONS {
        return Err(Error::range("N", n as f64, "ion count must lie in 1..=100"));
    }
    if n == 1 {
        return Ok(EquilibriumSolution {
            positions: vec![0.0],
            residual: 0.0,
            iterations: 0,
        });
    }
    // chain length grows roughly like N^0.56
    let half = 0.5 * (n as f64).powf(0.56);
    let mut u: Vec<f64> = (0..n)
        .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
        .collect();
    let mut g = gradient(&u);
    let mut residual = max_abs(&g);
    let mut v = potential(&u);
    for iter in 0..NEWTON_MAX_ITER {
        if residual < NEWTON_TOL {
            return Ok(finish(u, residual, iter));
        }
        let step = hessian(&u)
            .lu()
            .solve(&DVector::from_column_slice(&g))
            .ok_or(Error::NonConvergence {
                method: "equilibrium Newton",
                iterations: iter,
                residual,
            })?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x - t * s).collect();
            if is_ascending(&trial) {
                let gt = gradient(&trial);
                let rt = max_abs(&gt);
                let vt = potential(&trial);
                if vt < v || rt < residual {
                    u = trial;
                    g = gt;
                    residual = rt;
                    v = vt;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-10 {
                return Err(Error::NonConvergence {
                    method: "equilibrium Newton",
                    iterations: iter,
                    residual,
                });
            }
        }
    }
    if residual < NEWTON_TOL {
        return Ok(finish(u, residual, NEWTON_MAX_ITER));
    }
    Err(Error::NonConvergence {
        method: "equilibrium Newton",
        iterations: NEWTON_MAX_ITER,
        residual,
    })
}

fn finish(u: Vec<f64>, residual: f64, iterations: usize) -> EquilibriumSolution {
    EquilibriumSolution {
        positions: u,
        residual,
        iterations,
    }
}

/// `Σ_{p>q} (U_p − U_q)²`.
pub fn pairwise_spread(positions: &[f64]) -> f64 {
    let mut s = 0.0;
    for p in 0..positions.len() {
        for q in 0..p {
            let d = positions[p] - positions[q];
            s += d * d;
        }
    }
    s
}

/// Power-law fit `S(N) ≈ prefactor · N^exponent` of the pairwise spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadFit {
    pub prefactor: f64,
    pub exponent: f64,
    /// Coefficient of determination of the log-log fit.
    pub r_squared: f64,
}

/// Least-squares line through `(ln N, ln S(N))`.
pub fn spread_fit(ns: &[usize]) -> Result<SpreadFit> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 5 {
        return Err(Error::range(
            "N_range",
            ns.len() as f64,
            "spread fit needs at least 5 distinct ion counts",
        ));
    }
    if let Some(&bad) = ns.iter().find(|&&n| !(5..=50).contains(&n)) {
        return Err(Error::range(
            "N_range",
            bad as f64,
            "ion counts must lie in 5..=50",
        ));
    }
    let mut xs = Vec::with_capacity(ns.len());
    let mut ys = Vec::with_capacity(ns.len());
    for &n in &ns {
        let eq = equilibrium_positions(n)?;
        xs.push((n as f64).ln());
        ys.push(pairwise_spread(&eq.positions).ln());
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(SpreadFit {
        prefactor: intercept.exp(),
        exponent: slope,
        r_squared: 1.0 - ss_res / syy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ion_sits_at_center() {
        assert_eq!(equilibrium_positions(1).unwrap().positions, vec![0.0]);
    }

    #[test]
    fn two_ions_balance_forces() {
        // u = 1/(2u)² on the right ion
        let u = equilibrium_positions(2).unwrap().positions;
        let want = 0.25f64.cbrt();
        assert!((u[1] - want).abs() < 1e-12);
        assert!((u[0] + want).abs() < 1e-12);
    }

    #[test]
    fn three_ions_closed_form() {
        // outer ion: u = 1/u² + 1/(2u)² → u³ = 5/4
        let u = equilibrium_positions(3).unwrap().positions;
        let want = 1.25f64.cbrt();
        assert!(u[1].abs() < 1e-12);
        assert!((u[2] - want).abs() < 1e-12);
        assert!((u[0] + want).abs() < 1e-12);
    }

    #[test]
    fn large_chains_converge_symmetric() {
        for n in [4, 10, 37, 64, 100] {
            let eq = equilibrium_positions(n).unwrap();
            let u = &eq.positions;
            assert!(eq.residual < NEWTON_TOL, "N={n}: {}", eq.residual);
            assert!(u.iter().sum::<f64>().abs() < 1e-10);
            for i in 0..n {
                assert!((u[i] + u[n - 1 - i]).abs() < 1e-10, "N={n} i={i}");
            }
            assert!(is_ascending(u));
        }
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(equilibrium_positions(0).is_err());
        assert!(equilibrium_positions(101).is_err());
    }

    #[test]
    fn spread_matches_centered_identity() {
        // with Σu = 0, Σ_{p>q}(u_p-u_q)² = N Σ u²
        let u = equilibrium_positions(12).unwrap().positions;
        let alt = 12.0 * u.iter().map(|x| x * x).sum::<f64>();
        assert!((pairwise_spread(&u) - alt).abs() < 1e-10 * alt);
    }

    #[test]
    fn spread_fit_input_checks() {
        assert!(spread_fit(&[5, 6, 7, 8]).is_err());
        assert!(spread_fit(&[4, 5, 6, 7, 8]).is_err());
        assert!(spread_fit(&[10, 20, 30, 40, 51]).is_err());
        assert!(spread_fit(&[5, 5, 6, 7, 8, 8]).is_err());
        assert!(spread_fit(&[5, 6, 7, 8, 9]).is_ok());
    }
}
