//! Photon collection: a parabolic mirror imaged into a single-mode fiber, and
//! an optical cavity in the Purcell regime.

pub mod cavity;
pub mod mirror;

pub use cavity::{cavity_collection, CavityParams, CavityReport};
pub use mirror::{
    coupling_csv, coupling_curve, coupling_vs_radius, fiber_overlap_numeric,
    mirror_gate_coincidence, optimize_focus, reflected_field, sigma_coupling_analytic, FieldVector,
    FocusOptimum,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// Polarization `α x̂ + β ŷ` with `|α|² + |β|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jones {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Jones {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::range(
                "|alpha|^2 + |beta|^2",
                n,
                "Jones vector must be normalized",
            ));
        }
        Ok(Jones { alpha, beta })
    }

    /// `(1, −i)/√2`, the vector that collects σ⁺ light.
    pub fn left_circular() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Jones {
            alpha: Complex64::new(h, 0.0),
            beta: Complex64::new(0.0, -h),
        }
    }

    /// `(1, i)/√2`, the vector that collects σ⁻ light.
    pub fn right_circular() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Jones {
            alpha: Complex64::new(h, 0.0),
            beta: Complex64::new(0.0, h),
        }
    }

    pub fn horizontal() -> Self {
        Jones {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    /// `|α ± iβ|²` with the sign of `m`.
    pub fn sigma_factor(&self, m: i32) -> f64 {
        let i = Complex64::new(0.0, m.signum() as f64);
        (self.alpha + i * self.beta).norm_sqr()
    }
}

/// Paraboloid `z = ρ²/4f − f` with the emitter at its focus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paraboloid {
    pub f: f64,
    /// Mirror radius; `None` for an unbounded mirror.
    pub rho_max: Option<f64>,
}

impl Paraboloid {
    pub fn new(f: f64, rho_max: Option<f64>) -> Result<Self> {
        check_positive("f", f)?;
        if let Some(r) = rho_max {
            check_positive("rho_max", r)?;
        }
        Ok(Paraboloid { f, rho_max })
    }
}

/// Gaussian fiber mode `e^{−ρ²/w²}(α x̂ + β ŷ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberMode {
    pub w: f64,
    pub jones: Jones,
}

impl FiberMode {
    pub fn new(w: f64, jones: Jones) -> Result<Self> {
        check_positive("w", w)?;
        Ok(FiberMode { w, jones })
    }
}
