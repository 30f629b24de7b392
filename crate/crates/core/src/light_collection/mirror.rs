//! Dipole emission collimated by a parabolic mirror and projected onto a
//! Gaussian fiber mode.
//!
//! The overlap numerator uses the plain product `E·G` (no conjugation), which
//! is what produces the `|α ± iβ|²` selection factor for σ± light.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{FiberMode, Jones, Paraboloid};
use crate::error::{check_probability, Error, Result};
use crate::quadrature::{golden_section_max, integrate_adaptive, integrate_semi_infinite};
use crate::special::scaled_upper_gamma_minus_one;

/// Azimuthal sample count. The φ-dependence is a trigonometric polynomial of
/// degree ≤ 2, which the periodic trapezoid integrates exactly.
const PHI_POINTS: usize = 16;
const OVERLAP_REL_TOL: f64 = 1e-10;
const OVERLAP_ABS_TOL: f64 = 1e-15;

pub const FOCUS_BRACKET: (f64, f64) = (0.05, 5.0);
pub const FOCUS_TOL: f64 = 1e-6;
const COARSE_POINTS: usize = 64;

fn dipole_norm() -> f64 {
    (3.0 / (16.0 * std::f64::consts::PI)).sqrt()
}

/// Field in the collimated beam, split into radial and azimuthal parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    pub rho: Complex64,
    pub phi: Complex64,
}

impl FieldVector {
    /// `(E_x, E_y)` at azimuth `phi`.
    pub fn cartesian(&self, phi: f64) -> (Complex64, Complex64) {
        let (s, c) = phi.sin_cos();
        (self.rho * c - self.phi * s, self.rho * s + self.phi * c)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.rho.norm_sqr() + self.phi.norm_sqr()
    }
}

fn check_m(m: i32) -> Result<()> {
    if m.abs() > 1 {
        return Err(Error::range(
            "m",
            m as f64,
            "dipole transitions have m in {-1, 0, +1}",
        ));
    }
    Ok(())
}

/// Reflected field of the `Δm = m` dipole at radius `rho` and azimuth `phi`.
pub fn reflected_field(m: i32, f: f64, rho: f64, phi: f64) -> Result<FieldVector> {
    check_m(m)?;
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::range("rho", rho, "must be non-negative"));
    }
    let c = dipole_norm();
    let d = rho * rho + 4.0 * f * f;
    let k = 4.0 * f / d;
    let i = Complex64::new(0.0, 1.0);
    Ok(if m == 0 {
        FieldVector {
            rho: -i * k * c * (4.0 * f * rho / d),
            phi: Complex64::new(0.0, 0.0),
        }
    } else {
        let s = m as f64;
        let pre = i * s * k * c * Complex64::from_polar(1.0, s * phi);
        let a = (rho * rho - 4.0 * f * f) / d;
        FieldVector {
            rho: pre * (-a),
            phi: pre * i * s,
        }
    })
}

fn integrate_to(f: impl Fn(f64) -> f64, rho_max: Option<f64>, scale: f64) -> Result<f64> {
    let r = match rho_max {
        Some(r) => integrate_adaptive(f, 0.0, r, OVERLAP_REL_TOL, OVERLAP_ABS_TOL)?,
        None => integrate_semi_infinite(f, 0.0, scale, OVERLAP_REL_TOL, OVERLAP_ABS_TOL)?,
    };
    Ok(r.value)
}

/// Fiber coupling `|∫ E·G|² / (∫|E|² ∫|G|²)` evaluated numerically.
///
/// Works in units of the fiber waist. The radial integrals use adaptive
/// Gauss–Kronrod; the azimuthal integral uses a 16-point periodic rule.
pub fn fiber_overlap_numeric(m: i32, mirror: &Paraboloid, fiber: &FiberMode) -> Result<f64> {
    check_m(m)?;
    let f = mirror.f / fiber.w;
    let rho_max = mirror.rho_max.map(|r| r / fiber.w);
    let Jones { alpha, beta } = fiber.jones;
    let dphi = 2.0 * std::f64::consts::PI / PHI_POINTS as f64;
    let azimuthal = |rho: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..PHI_POINTS {
            let phi = j as f64 * dphi;
            let e = reflected_field(m, f, rho, phi).expect("validated inputs");
            let (ex, ey) = e.cartesian(phi);
            acc += ex * alpha + ey * beta;
        }
        acc * dphi * rho * (-rho * rho).exp()
    };
    let re = integrate_to(|r| azimuthal(r).re, rho_max, 1.0)?;
    let im = integrate_to(|r| azimuthal(r).im, rho_max, 1.0)?;
    let numerator = re * re + im * im;
    if numerator == 0.0 {
        return Ok(0.0);
    }
    let field_power = 2.0
        * std::f64::consts::PI
        * integrate_to(
            |r| {
                r * reflected_field(m, f, r, 0.0)
                    .expect("validated inputs")
                    .norm_sqr()
            },
            None,
            2.0 * f,
        )?;
    let mode_power = std::f64::consts::PI / 2.0;
    Ok((numerator / (field_power * mode_power)).clamp(0.0, 1.0))
}

/// Closed form for σ± light:
/// `(3/2)(2f/w)⁶ |α ± iβ|² e^{2x₀} |Γ(−1, x₀) − Γ(−1, x₁)|²`
/// with `x₀ = 4f²/w²` and `x₁ = (ρ₀² + 4f²)/w²`.
///
/// Evaluated with `g(x) = e^x Γ(−1, x)` as
/// `|g(x₀) − e^{−(x₁−x₀)} g(x₁)|²`, which stays finite for any f/w.
pub fn sigma_coupling_analytic(
    m: i32,
    f: f64,
    fiber: &FiberMode,
    rho_max: Option<f64>,
) -> Result<f64> {
    if m.abs() != 1 {
        return Err(Error::range(
            "m",
            m as f64,
            "closed form covers m = +1 or -1",
        ));
    }
    let mirror = Paraboloid::new(f, rho_max)?;
    let fw = mirror.f / fiber.w;
    let x0 = 4.0 * fw * fw;
    let bracket = match mirror.rho_max {
        None => scaled_upper_gamma_minus_one(x0),
        Some(r) => {
            let gap = (r / fiber.w).powi(2);
            scaled_upper_gamma_minus_one(x0) - (-gap).exp() * scaled_upper_gamma_minus_one(x0 + gap)
        }
    };
    let p = 1.5 * (2.0 * fw).powi(6) * fiber.jones.sigma_factor(m) * bracket * bracket;
    Ok(p.clamp(0.0, 1.0))
}

/// Best focal length for a given fiber and mirror radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusOptimum {
    pub f_star: f64,
    pub p_star: f64,
}

/// Maximizes the σ⁺ analytic coupling over `f/w ∈ [0.05, 5]`: log-spaced
/// scan to bracket the peak, then golden-section search to 1e-6 in f/w.
pub fn optimize_focus(m: i32, fiber: &FiberMode, rho_max: Option<f64>) -> Result<FocusOptimum> {
    let (lo, hi) = FOCUS_BRACKET;
    let eval = |fw: f64| sigma_coupling_analytic(m, fw * fiber.w, fiber, rho_max);
    let grid: Vec<f64> = (0..COARSE_POINTS)
        .map(|k| lo * (hi / lo).powf(k as f64 / (COARSE_POINTS - 1) as f64))
        .collect();
    let values = grid
        .iter()
        .map(|&x| eval(x))
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if best == 0 || best == COARSE_POINTS - 1 || values[best] == 0.0 {
        return Err(Error::NoInteriorMaximum {
            lo,
            hi,
            f_lo: values[0],
            f_hi: values[COARSE_POINTS - 1],
        });
    }
    let (x, p) = golden_section_max(
        |x| eval(x).unwrap_or(0.0),
        grid[best - 1],
        grid[best + 1],
        FOCUS_TOL,
    );
    Ok(FocusOptimum {
        f_star: x * fiber.w,
        p_star: p,
    })
}

/// `(f/w, P_σ)` pairs for plotting.
pub fn coupling_curve(
    m: i32,
    fiber: &FiberMode,
    rho_max: Option<f64>,
    f_over_w: &[f64],
) -> Result<Vec<(f64, f64)>> {
    f_over_w
        .iter()
        .map(|&x| Ok((x, sigma_coupling_analytic(m, x * fiber.w, fiber, rho_max)?)))
        .collect()
}

/// Optimal coupling for each mirror radius, with the focus re-optimized per
/// radius. Returns `(ρ₀, f*, P*)`.
pub fn coupling_vs_radius(
    m: i32,
    fiber: &FiberMode,
    radii: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    radii
        .iter()
        .map(|&r| {
            let opt = optimize_focus(m, fiber, Some(r))?;
            Ok((r, opt.f_star, opt.p_star))
        })
        .collect()
}

/// CSV with header `f_over_w,P_sigma` and LF endings.
pub fn coupling_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("f_over_w,P_sigma\n");
    for (x, p) in curve {
        let _ = writeln!(out, "{x},{p}");
    }
    out
}

/// Type II coincidence probability through the mirror setup,
/// `p_B (η/8)²`: each photon loses three factors of ½.
pub fn mirror_gate_coincidence(eta: f64, p_b: f64) -> Result<f64> {
    check_probability("eta", eta)?;
    check_probability("p_B", p_b)?;
    Ok(p_b * (eta / 8.0).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fiber(j: Jones) -> FiberMode {
        FiberMode::new(1.0, j).unwrap()
    }

    #[test]
    fn pi_light_is_radial_donut() {
        let f = 0.7;
        for rho in [0.1, 0.5, 2.0] {
            let e = reflected_field(0, f, rho, 0.3).unwrap();
            let d = rho * rho + 4.0 * f * f;
            let want = -(4.0 * f / d) * dipole_norm() * (4.0 * f * rho / d);
            assert_eq!(e.phi, Complex64::new(0.0, 0.0));
            assert!((e.rho - Complex64::new(0.0, want)).norm() < 1e-15);
        }
    }

    #[test]
    fn sigma_field_azimuthal_at_two_f() {
        let e = reflected_field(1, 0.5, 1.0, 0.4).unwrap();
        assert!(e.rho.norm() < 1e-16);
        assert!(e.phi.norm() > 0.0);
    }

    #[test]
    fn sigma_field_circular_on_axis() {
        for m in [1, -1] {
            let e = reflected_field(m, 0.5, 0.0, 0.9).unwrap();
            let (ex, ey) = e.cartesian(0.9);
            // E_y = ±i E_x
            assert!((ey - ex * Complex64::new(0.0, m as f64)).norm() < 1e-15);
        }
        assert!(reflected_field(2, 0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn analytic_selection_rules() {
        let left = fiber(Jones::left_circular());
        let right = fiber(Jones::right_circular());
        assert_eq!(sigma_coupling_analytic(1, 0.5, &right, None).unwrap(), 0.0);
        assert_eq!(sigma_coupling_analytic(-1, 0.5, &left, None).unwrap(), 0.0);
        assert!(sigma_coupling_analytic(1, 0.5, &left, None).unwrap() > 0.4);
        assert!(sigma_coupling_analytic(1, 0.5, &left, Some(1e-4)).unwrap() < 1e-12);
    }

    #[test]
    fn analytic_survives_large_focus() {
        let p = sigma_coupling_analytic(1, 40.0, &fiber(Jones::left_circular()), None).unwrap();
        assert!(p.is_finite() && p >= 0.0 && p < 0.01);
    }

    #[test]
    fn numeric_unbounded_field_power_is_one() {
        // total dipole power maps onto the plane unchanged
        let f = 0.8;
        let power = 2.0
            * std::f64::consts::PI
            * integrate_semi_infinite(
                |r| r * reflected_field(1, f, r, 0.0).unwrap().norm_sqr(),
                0.0,
                2.0 * f,
                1e-12,
                0.0,
            )
            .unwrap()
            .value;
        assert!((power - 1.0).abs() < 1e-10);
    }

    #[test]
    fn numeric_matches_analytic_example() {
        let fib = fiber(Jones::left_circular());
        let mirror = Paraboloid::new(0.536, None).unwrap();
        let num = fiber_overlap_numeric(1, &mirror, &fib).unwrap();
        let ana = sigma_coupling_analytic(1, 0.536, &fib, None).unwrap();
        assert!(((num - ana) / ana).abs() < 1e-6);
        assert!((num - 0.49).abs() < 0.01);
    }

    #[test]
    fn tiny_waist_does_not_couple() {
        let fib = FiberMode::new(1e-3, Jones::left_circular()).unwrap();
        let mirror = Paraboloid::new(1.0, None).unwrap();
        assert!(fiber_overlap_numeric(1, &mirror, &fib).unwrap() < 1e-6);
    }

    #[test]
    fn focus_optimum() {
        let opt = optimize_focus(1, &fiber(Jones::left_circular()), None).unwrap();
        assert!((opt.f_star - 0.532).abs() < 0.01);
        assert!((opt.p_star - 0.490).abs() < 0.005);
    }

    #[test]
    fn optimum_grows_with_mirror() {
        let fib = fiber(Jones::left_circular());
        let rows = coupling_vs_radius(1, &fib, &[0.5, 1.0, 1.5, 2.0, 3.0, 5.0]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].2 >= w[0].2 - 1e-9);
        }
    }

    #[test]
    fn gate_coincidence_quadratic() {
        assert!((mirror_gate_coincidence(1.0, 0.25).unwrap() - 0.25 / 64.0).abs() < 1e-15);
        assert_eq!(mirror_gate_coincidence(0.0, 0.25).unwrap(), 0.0);
        let a = mirror_gate_coincidence(0.3, 0.5).unwrap();
        let b = mirror_gate_coincidence(0.6, 0.5).unwrap();
        assert!((b - 4.0 * a).abs() < 1e-15);
    }

    #[test]
    fn curve_csv_layout() {
        let fib = fiber(Jones::left_circular());
        let curve = coupling_curve(1, &fib, None, &[0.25, 0.5, 1.0]).unwrap();
        let csv = coupling_csv(&curve);
        assert!(csv.starts_with("f_over_w,P_sigma\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
