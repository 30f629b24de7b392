//! Gaussian-displacement sampling of the scattering pattern.
//!
//! Each normal coordinate is drawn as ξ ~ N(0, n̄ + ½) in units of √(ħ/mω),
//! so a mode with Lamb-Dicke parameter η adds phase `√2·η·ξ` per unit of
//! participation and wavevector projection. The intensity `|Σ_p e^{iφ_p}|²`
//! is averaged over samples. Shares no code with the closed-form sum.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::scattering::{pattern_angles, ScatterGeometry};
use super::IonCrystal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Raw (un-normalized) cross-section estimate from `samples` displacement draws.
///
/// `stream` selects an independent ChaCha stream under the same seed.
pub fn cross_section_mc(
    c: &IonCrystal,
    geom: &ScatterGeometry,
    samples: usize,
    seed: u64,
    stream: u64,
) -> McEstimate {
    assert!(samples >= 2, "need at least two samples for an error bar");
    let n = c.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let (dkx, dky) = geom.delta_k();
    let sqrt2 = std::f64::consts::SQRT_2;
    // phase per unit ξ for each mode
    let ka: Vec<f64> = (0..n)
        .map(|m| sqrt2 * c.lamb_dicke_axial[m] * dkx)
        .collect();
    let kt: Vec<f64> = (0..n)
        .map(|m| sqrt2 * c.lamb_dicke_transverse[m] * dky)
        .collect();
    let sa: Vec<f64> = c.nbar_axial.iter().map(|x| (x + 0.5).sqrt()).collect();
    let st: Vec<f64> = c.nbar_transverse.iter().map(|x| (x + 0.5).sqrt()).collect();
    let base: Vec<f64> = c.positions.iter().map(|u| c.eta_lambda * u * dkx).collect();

    let mut xa = vec![0.0; n];
    let mut xt = vec![0.0; n];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        for m in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            xa[m] = z * sa[m] * ka[m];
            let z: f64 = StandardNormal.sample(&mut rng);
            xt[m] = z * st[m] * kt[m];
        }
        let mut field = Complex64::new(0.0, 0.0);
        for p in 0..n {
            let mut phi = base[p];
            for m in 0..n {
                phi += c.modes.axial[(p, m)] * xa[m] + c.modes.transverse[(p, m)] * xt[m];
            }
            field += Complex64::from_polar(1.0, phi);
        }
        let i = field.norm_sqr();
        sum += i;
        sum_sq += i * i;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = (sum_sq / k - mean * mean).max(0.0) * k / (k - 1.0);
    McEstimate {
        mean,
        std_error: (var / k).sqrt(),
        samples,
    }
}

/// Normalized pattern estimate on the same grid as
/// [`radiation_pattern`](super::radiation_pattern), one stream per angle.
pub fn radiation_pattern_mc(
    c: &IonCrystal,
    theta_in: f64,
    grid: usize,
    samples: usize,
    seed: u64,
) -> Vec<(f64, McEstimate)> {
    let n2 = (c.len() * c.len()) as f64;
    pattern_angles(theta_in, grid)
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            let e = cross_section_mc(
                c,
                &ScatterGeometry::new(theta_in, t),
                samples,
                seed,
                k as u64,
            );
            (
                t,
                McEstimate {
                    mean: e.mean / n2,
                    std_error: e.std_error / n2,
                    samples,
                },
            )
        })
        .collect()
}
