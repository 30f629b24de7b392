//! Two-ion heralded-state fidelity with recoil in separate traps.

use crate::error::{Error, Result};
use crate::quadrature::laguerre_doubling;

pub const RECOIL_REL_TOL: f64 = 1e-8;
const MAX_NODES: usize = 1024;

fn check(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::range(name, v, "must be non-negative and finite"))
    }
}

/// `∫₀^∞ dτ e^{−τ} exp(−4η²(n̄+½)[1 − cos χ · cos(ν τ/Γ)])`.
pub fn recoil_fidelity(eta: f64, nbar: f64, nu_over_gamma: f64, chi: f64) -> Result<f64> {
    check("eta", eta)?;
    check("nbar", nbar)?;
    check("nu_over_gamma", nu_over_gamma)?;
    if !chi.is_finite() {
        return Err(Error::range("chi", chi, "must be finite"));
    }
    let a = 4.0 * eta * eta * (nbar + 0.5);
    if a == 0.0 {
        return Ok(1.0);
    }
    let cos_chi = chi.cos();
    let est = laguerre_doubling(
        |tau| (-a * (1.0 - cos_chi * (nu_over_gamma * tau).cos())).exp(),
        RECOIL_REL_TOL,
        MAX_NODES,
    )?;
    Ok(est.value.min(1.0))
}

/// Weak-confinement limit `e^{−4η²(n̄+½)(1 − cos χ)}`.
pub fn recoil_fidelity_weak_confinement(eta: f64, nbar: f64, chi: f64) -> Result<f64> {
    check("eta", eta)?;
    check("nbar", nbar)?;
    if !chi.is_finite() {
        return Err(Error::range("chi", chi, "must be finite"));
    }
    Ok((-4.0 * eta * eta * (nbar + 0.5) * (1.0 - chi.cos())).exp())
}
