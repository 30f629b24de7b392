//! Cavity-enhanced collection.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// Rates are angular frequencies; transmissions are fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Atom-cavity coupling g.
    pub g: f64,
    /// Cavity field decay κ.
    pub kappa: f64,
    /// Free-space emission rate Γ.
    pub gamma: f64,
    /// Outcoupling mirror transmission T_l.
    pub t_l: f64,
    /// Total round-trip loss ℒ.
    pub loss_total: f64,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::range("g", self.g, "must be non-negative"));
        }
        check_positive("kappa", self.kappa)?;
        check_positive("gamma", self.gamma)?;
        check_positive("T_l", self.t_l)?;
        check_positive("L_total", self.loss_total)?;
        if self.t_l > self.loss_total {
            return Err(Error::range(
                "T_l",
                self.t_l,
                "cannot exceed the total loss L_total",
            ));
        }
        Ok(())
    }

    /// Cooperativity `C = g²/(κΓ)`.
    pub fn cooperativity(&self) -> f64 {
        self.g * self.g / (self.kappa * self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityReport {
    #[serde(rename = "C")]
    pub cooperativity: f64,
    pub p_c: f64,
    /// `[T_l/ℒ, 2κ/(2κ+Γ), 2C/(1+2C)]`.
    pub factors: [f64; 3],
}

/// `p_c = (T_l/ℒ)·(2κ/(2κ+Γ))·(2C/(1+2C))`.
pub fn cavity_collection(params: &CavityParams) -> Result<CavityReport> {
    params.validate()?;
    let c = params.cooperativity();
    let outcoupling = params.t_l / params.loss_total;
    let rate = 2.0 * params.kappa / (2.0 * params.kappa + params.gamma);
    let purcell = 2.0 * c / (1.0 + 2.0 * c);
    Ok(CavityReport {
        cooperativity: c,
        p_c: outcoupling * rate * purcell,
        factors: [outcoupling, rate, purcell],
    })
}
