//! Linear ion crystals: statics, normal modes, and the elastic scattering
//! pattern that sets the fidelity of single-photon W-state heralding.

pub mod equilibrium;
pub mod modes;
pub mod monte_carlo;
pub mod recoil;
pub mod scattering;
pub mod spot;

pub use equilibrium::{
    equilibrium_positions, pairwise_spread, spread_fit, EquilibriumSolution, SpreadFit,
};
pub use modes::{normal_modes, NormalModes};
pub use recoil::{recoil_fidelity, recoil_fidelity_weak_confinement};
pub use scattering::{
    cross_section, lattice_factor, pattern_csv, radiation_pattern, Normalization, ScatterGeometry,
};
pub use spot::{spot_metrics, threshold_window, SpotMetrics, ThresholdWindow};

use crate::error::{check_positive, Error, Result};

/// Recoil frequency over linewidth for the 370 nm Yb⁺ line: 8.5 kHz / 19.6 MHz.
pub const YB_RECOIL_OVER_LINEWIDTH: f64 = 8.5e3 / 19.6e6;

/// Doppler-limited thermal occupations.
///
/// With `s² = ω_R Γ / ω_a²` and `r = ω_R / Γ`, each mode of dimensionless
/// frequency ν gets `n̄ = Γ/(2ω) = s/(2√r ν)` and `η² = ω_R/ω = s√r/ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerParams {
    /// `√(ω_R Γ)/ω_a`.
    pub recoil_scale: f64,
    /// `ω_R / Γ`.
    pub recoil_over_linewidth: f64,
}

impl Default for DopplerParams {
    fn default() -> Self {
        DopplerParams {
            recoil_scale: 1.0,
            recoil_over_linewidth: YB_RECOIL_OVER_LINEWIDTH,
        }
    }
}

impl DopplerParams {
    /// `(η², n̄)` for a mode of dimensionless frequency `nu`.
    pub fn mode(&self, nu: f64) -> (f64, f64) {
        let s = self.recoil_scale;
        let r = self.recoil_over_linewidth;
        (s * r.sqrt() / nu, s / (2.0 * r.sqrt() * nu))
    }
}

/// A linear chain with its per-mode Lamb-Dicke parameters and occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct IonCrystal {
    /// Axial center-of-mass angular frequency (rad/s).
    pub omega_a1: f64,
    /// Transverse (single-ion) angular frequency (rad/s).
    pub omega_t: f64,
    /// `|k|·d`.
    pub eta_lambda: f64,
    pub positions: Vec<f64>,
    pub modes: NormalModes,
    pub lamb_dicke_axial: Vec<f64>,
    pub lamb_dicke_transverse: Vec<f64>,
    pub nbar_axial: Vec<f64>,
    pub nbar_transverse: Vec<f64>,
}

impl IonCrystal {
    /// Solves the statics and normal modes; occupations and Lamb-Dicke
    /// parameters start at zero.
    pub fn new(n: usize, omega_a1: f64, omega_t: f64, eta_lambda: f64) -> Result<Self> {
        check_positive("omega_a1", omega_a1)?;
        check_positive("omega_t", omega_t)?;
        check_positive("eta_lambda", eta_lambda)?;
        let eq = equilibrium_positions(n)?;
        let modes = normal_modes(&eq.positions, omega_t / omega_a1)?;
        Ok(IonCrystal {
            omega_a1,
            omega_t,
            eta_lambda,
            positions: eq.positions,
            modes,
            lamb_dicke_axial: vec![0.0; n],
            lamb_dicke_transverse: vec![0.0; n],
            nbar_axial: vec![0.0; n],
            nbar_transverse: vec![0.0; n],
        })
    }

    /// Crystal with Doppler-limited occupations on every mode.
    pub fn doppler_limited(
        n: usize,
        anisotropy: f64,
        eta_lambda: f64,
        doppler: DopplerParams,
    ) -> Result<Self> {
        check_positive("recoil_scale", doppler.recoil_scale)?;
        check_positive("recoil_over_linewidth", doppler.recoil_over_linewidth)?;
        let mut c = IonCrystal::new(n, 1.0, anisotropy, eta_lambda)?;
        let (ea, na): (Vec<f64>, Vec<f64>) = c
            .modes
            .axial_freqs
            .iter()
            .map(|&nu| doppler.mode(nu))
            .unzip();
        let (et, nt): (Vec<f64>, Vec<f64>) = c
            .modes
            .transverse_freqs
            .iter()
            .map(|&nu| doppler.mode(nu))
            .unzip();
        c.lamb_dicke_axial = ea.into_iter().map(f64::sqrt).collect();
        c.lamb_dicke_transverse = et.into_iter().map(f64::sqrt).collect();
        c.nbar_axial = na;
        c.nbar_transverse = nt;
        Ok(c)
    }

    /// Replaces the per-mode thermal data.
    pub fn with_thermal(
        mut self,
        lamb_dicke_axial: Vec<f64>,
        lamb_dicke_transverse: Vec<f64>,
        nbar_axial: Vec<f64>,
        nbar_transverse: Vec<f64>,
    ) -> Result<Self> {
        let n = self.len();
        for (name, v) in [
            ("lamb_dicke_axial", &lamb_dicke_axial),
            ("lamb_dicke_transverse", &lamb_dicke_transverse),
            ("nbar_axial", &nbar_axial),
            ("nbar_transverse", &nbar_transverse),
        ] {
            if v.len() != n {
                return Err(Error::range(
                    name,
                    v.len() as f64,
                    "need one value per mode",
                ));
            }
            if let Some(&bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::range(name, bad, "must be non-negative"));
            }
        }
        self.lamb_dicke_axial = lamb_dicke_axial;
        self.lamb_dicke_transverse = lamb_dicke_transverse;
        self.nbar_axial = nbar_axial;
        self.nbar_transverse = nbar_transverse;
        Ok(self)
    }

    /// Adds `delta` quanta to every mode.
    pub fn warmer(&self, delta: f64) -> Self {
        let mut c = self.clone();
        c.nbar_axial.iter_mut().for_each(|x| *x += delta);
        c.nbar_transverse.iter_mut().for_each(|x| *x += delta);
        c
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn anisotropy(&self) -> f64 {
        self.omega_t / self.omega_a1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doppler_rule_products() {
        let d = DopplerParams::default();
        for nu in [1.0, 1.7, 10.0] {
            let (eta2, nbar) = d.mode(nu);
            assert!((eta2 * nbar - 1.0 / (2.0 * nu * nu)).abs() < 1e-14);
        }
    }

    #[test]
    fn crystal_rejects_bad_inputs() {
        assert!(IonCrystal::new(3, 1.0, 10.0, -1.0).is_err());
        assert!(IonCrystal::doppler_limited(20, 1.5, 600.0, DopplerParams::default()).is_err());
        let c = IonCrystal::new(3, 1.0, 10.0, 600.0).unwrap();
        assert!(c
            .clone()
            .with_thermal(vec![0.1; 2], vec![0.1; 3], vec![0.0; 3], vec![0.0; 3])
            .is_err());
        assert!(c
            .with_thermal(vec![0.1; 3], vec![0.1; 3], vec![-1.0; 3], vec![0.0; 3])
            .is_err());
    }
}
