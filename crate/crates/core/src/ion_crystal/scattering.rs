//! Elastic scattering cross-section of a thermal ion chain.
//!
//! The chain lies along x̂ and the scattering plane contains x̂ and the
//! in-plane transverse axis ŷ. Angles are measured from x̂.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::IonCrystal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterGeometry {
    pub theta_in: f64,
    pub theta_out: f64,
}

impl ScatterGeometry {
    pub fn new(theta_in: f64, theta_out: f64) -> Self {
        ScatterGeometry {
            theta_in,
            theta_out,
        }
    }

    /// `(Δk̂·x̂, Δk̂·ŷ)` for unit in/out wavevectors.
    pub fn delta_k(&self) -> (f64, f64) {
        (
            self.theta_out.cos() - self.theta_in.cos(),
            self.theta_out.sin() - self.theta_in.sin(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Raw double sum; equals N² in the forward direction.
    #[default]
    Raw,
    /// Divided by N².
    PerN2,
}

/// Whether the thermal exponentials are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DebyeWaller {
    Thermal,
    /// Zero exponent: the cold rigid lattice.
    Off,
}

/// Per-mode `η_m²(n̄_m + ½)` for both directions.
fn thermal_weights(c: &IonCrystal) -> (Vec<f64>, Vec<f64>) {
    let w = |eta: &[f64], nbar: &[f64]| -> Vec<f64> {
        eta.iter()
            .zip(nbar)
            .map(|(e, n)| e * e * (n + 0.5))
            .collect()
    };
    (
        w(&c.lamb_dicke_axial, &c.nbar_axial),
        w(&c.lamb_dicke_transverse, &c.nbar_transverse),
    )
}

fn exponent(c: &IonCrystal, wa: &[f64], wt: &[f64], p: usize, q: usize, dkx: f64, dky: f64) -> f64 {
    let (a, t) = (&c.modes.axial, &c.modes.transverse);
    let mut ax = 0.0;
    let mut tr = 0.0;
    for m in 0..c.len() {
        ax += (a[(p, m)] - a[(q, m)]).powi(2) * wa[m];
        tr += (t[(p, m)] - t[(q, m)]).powi(2) * wt[m];
    }
    -(ax * dkx * dkx + tr * dky * dky)
}

/// Complex contribution of the ordered pair (p, q).
pub fn pair_term(c: &IonCrystal, geom: &ScatterGeometry, p: usize, q: usize) -> Complex64 {
    let (wa, wt) = thermal_weights(c);
    pair_term_with(c, &wa, &wt, geom, p, q, DebyeWaller::Thermal)
}

fn pair_term_with(
    c: &IonCrystal,
    wa: &[f64],
    wt: &[f64],
    geom: &ScatterGeometry,
    p: usize,
    q: usize,
    dw: DebyeWaller,
) -> Complex64 {
    let (dkx, dky) = geom.delta_k();
    let phase = c.eta_lambda * (c.positions[p] - c.positions[q]) * dkx;
    let envelope = match dw {
        DebyeWaller::Thermal => exponent(c, wa, wt, p, q, dkx, dky).exp(),
        DebyeWaller::Off => 1.0,
    };
    Complex64::from_polar(envelope, phase)
}

pub(crate) fn cross_section_with(c: &IonCrystal, geom: &ScatterGeometry, dw: DebyeWaller) -> f64 {
    let (wa, wt) = thermal_weights(c);
    let n = c.len();
    // N diagonal terms plus twice the real part of each unordered pair
    let mut off = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            off += pair_term_with(c, &wa, &wt, geom, p, q, dw).re;
        }
    }
    n as f64 + 2.0 * off
}

/// Differential cross-section `Σ_{p,q} e^{iη_λ(U_p−U_q)Δk̂·x̂} e^{−DW_pq}`.
pub fn cross_section(c: &IonCrystal, geom: &ScatterGeometry, norm: Normalization) -> f64 {
    let raw = cross_section_with(c, geom, DebyeWaller::Thermal);
    match norm {
        Normalization::Raw => raw,
        Normalization::PerN2 => raw / (c.len() * c.len()) as f64,
    }
}

/// Cross-section of the same chain held rigidly at its equilibrium sites.
pub fn lattice_factor(c: &IonCrystal, geom: &ScatterGeometry) -> f64 {
    cross_section_with(c, geom, DebyeWaller::Off)
}

/// Output angles `θ_in + 2π(k − grid/2)/grid`, so the forward direction is sampled exactly.
pub fn pattern_angles(theta_in: f64, grid: usize) -> Vec<f64> {
    let half = (grid / 2) as i64;
    (0..grid)
        .map(|k| theta_in + 2.0 * std::f64::consts::PI * (k as i64 - half) as f64 / grid as f64)
        .collect()
}

/// `(θ_out, normalized cross-section)` over a full turn.
pub fn radiation_pattern(c: &IonCrystal, theta_in: f64, grid: usize) -> Vec<(f64, f64)> {
    assert!(grid >= 2, "pattern grid needs at least 2 points");
    pattern_angles(theta_in, grid)
        .into_iter()
        .map(|t| {
            (
                t,
                cross_section(c, &ScatterGeometry::new(theta_in, t), Normalization::PerN2),
            )
        })
        .collect()
}

/// CSV with header `theta_out_rad,normalized_intensity` and LF endings.
pub fn pattern_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("theta_out_rad,normalized_intensity\n");
    for (t, v) in samples {
        let _ = writeln!(out, "{t},{v}");
    }
    out
}
