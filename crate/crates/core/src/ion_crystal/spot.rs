//! Forward-spot size estimates and threshold analysis of computed patterns.

use crate::error::{check_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotMetrics {
    /// Half-width δθ of the spot (rad).
    pub delta_theta: f64,
    /// Fraction of in-plane photons landing in the spot, `2δθ/2π`.
    pub fraction: f64,
    /// Witness threshold `(N−1)/N`.
    pub witness_floor: f64,
}

impl SpotMetrics {
    pub fn full_width(&self) -> f64 {
        2.0 * self.delta_theta
    }
}

/// Scaling-law estimates with `f = (N−1)/N`:
/// `2δθ = 2·1.7(1−f)^{1/4} η_λ^{−1/2} N^{−0.21}` and
/// fraction `= 0.55 η_λ^{−1/2} N^{−0.46}`.
pub fn spot_metrics(n: usize, eta_lambda: f64) -> Result<SpotMetrics> {
    if n < 2 {
        return Err(Error::range(
            "N",
            n as f64,
            "spot size needs at least 2 ions",
        ));
    }
    check_positive("eta_lambda", eta_lambda)?;
    let nf = n as f64;
    let f = (nf - 1.0) / nf;
    let root = eta_lambda.sqrt();
    Ok(SpotMetrics {
        delta_theta: 1.7 * (1.0 - f).powf(0.25) / root * nf.powf(-0.21),
        fraction: 0.55 / root * nf.powf(-0.46),
        witness_floor: f,
    })
}

/// Where a sampled pattern exceeds a threshold, relative to its forward lobe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdWindow {
    /// Half-width of the contiguous forward region above threshold, with the
    /// crossing linearly interpolated (larger of the two sides).
    pub lobe_half_width: f64,
    pub points_above: usize,
    /// Samples above threshold that are not part of the forward lobe.
    pub points_outside_lobe: usize,
    /// Largest value anywhere outside the forward lobe.
    pub max_outside_lobe: f64,
    /// Largest |θ − θ_in| of any sample above threshold.
    pub max_offset_above: f64,
}

impl ThresholdWindow {
    pub fn only_forward(&self) -> bool {
        self.points_outside_lobe == 0
    }
}

/// Analyzes `(θ, value)` samples ordered by angle and containing `theta_in`.
pub fn threshold_window(
    samples: &[(f64, f64)],
    theta_in: f64,
    threshold: f64,
) -> Result<ThresholdWindow> {
    let fwd = samples
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 .0 - theta_in)
                .abs()
                .total_cmp(&(b.1 .0 - theta_in).abs())
        })
        .map(|(i, _)| i)
        .ok_or_else(|| Error::range("grid", 0.0, "pattern has no samples"))?;
    if samples[fwd].1 <= threshold {
        return Err(Error::range(
            "threshold",
            threshold,
            "forward value does not exceed the threshold",
        ));
    }
    let crossing = |inside: usize, outside: usize| {
        let (t0, v0) = samples[inside];
        let (t1, v1) = samples[outside];
        let t = t0 + (t1 - t0) * (v0 - threshold) / (v0 - v1);
        (t - theta_in).abs()
    };
    let mut hi = fwd;
    while hi + 1 < samples.len() && samples[hi + 1].1 > threshold {
        hi += 1;
    }
    let mut lo = fwd;
    while lo > 0 && samples[lo - 1].1 > threshold {
        lo -= 1;
    }
    let right = if hi + 1 < samples.len() {
        crossing(hi, hi + 1)
    } else {
        (samples[hi].0 - theta_in).abs()
    };
    let left = if lo > 0 {
        crossing(lo, lo - 1)
    } else {
        (samples[lo].0 - theta_in).abs()
    };
    let mut points_above = 0;
    let mut outside = 0;
    let mut max_outside = f64::NEG_INFINITY;
    let mut max_offset = 0.0f64;
    for (i, &(t, v)) in samples.iter().enumerate() {
        let in_lobe = (lo..=hi).contains(&i);
        if v > threshold {
            points_above += 1;
            max_offset = max_offset.max((t - theta_in).abs());
            if !in_lobe {
                outside += 1;
            }
        }
        if !in_lobe {
            max_outside = max_outside.max(v);
        }
    }
    Ok(ThresholdWindow {
        lobe_half_width: left.max(right),
        points_above,
        points_outside_lobe: outside,
        max_outside_lobe: max_outside,
        max_offset_above: max_offset,
    })
}
