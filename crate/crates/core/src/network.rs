//! Time-resource estimates for remote gates, repeater chains and cluster states.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_probability, Error, Result};
use crate::heralding::{type1_success, type2_success, SPEED_OF_LIGHT};

/// Julian year in seconds.
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// Inputs to [`network_report`]. Times are in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub p_e: f64,
    pub p_c: f64,
    pub p_t: f64,
    pub eta_det: f64,
    #[serde(rename = "p_B")]
    pub p_b: f64,
    pub tau_rep: f64,
    /// Herald success probability used by the time formulas.
    #[serde(rename = "P")]
    pub p: f64,
    /// Cluster size; need not be an integer.
    pub n: f64,
    pub epsilon: f64,
    #[serde(rename = "N_nodes")]
    pub n_nodes: f64,
    pub t_detect: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            p_e: 1.0,
            p_c: 1.0,
            p_t: 1.0,
            eta_det: 1.0,
            p_b: 0.5,
            tau_rep: 1e-6,
            p: 0.1,
            n: 1000.0,
            epsilon: 0.1,
            n_nodes: 2.0,
            t_detect: 1e-5,
        }
    }
}

fn check_open_probability(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::range(name, value, "must be in (0, 1]"))
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_e", self.p_e),
            ("p_c", self.p_c),
            ("p_t", self.p_t),
            ("eta_det", self.eta_det),
            ("p_B", self.p_b),
            ("P", self.p),
        ] {
            check_open_probability(name, v)?;
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::range("epsilon", self.epsilon, "must be in (0, 1)"));
        }
        if !(self.n.is_finite() && self.n >= 2.0) {
            return Err(Error::range("n", self.n, "must be at least 2"));
        }
        if !(self.n_nodes.is_finite() && self.n_nodes >= 2.0) {
            return Err(Error::range("N_nodes", self.n_nodes, "must be at least 2"));
        }
        check_positive("tau_rep", self.tau_rep)?;
        check_positive("t_detect", self.t_detect)?;
        Ok(())
    }
}

/// `P_ap = p_e·p_c·p_t`.
pub fn atom_photon_success(p_e: f64, p_c: f64, p_t: f64) -> Result<f64> {
    check_probability("p_e", p_e)?;
    check_probability("p_c", p_c)?;
    check_probability("p_t", p_t)?;
    Ok(p_e * p_c * p_t)
}

/// Mean time `τ_rep/P` until the first heralded success; `1/P` is the mean of
/// the geometric number of attempts.
pub fn deterministic_gate_time(tau_rep: f64, p: f64) -> Result<f64> {
    check_positive("tau_rep", tau_rep)?;
    check_open_probability("P", p)?;
    Ok(tau_rep / p)
}

/// `t_N = (τ_rep/P)·log₂N` for a chain of `N` nodes.
pub fn repeater_time(n_nodes: f64, tau_rep: f64, p: f64) -> Result<f64> {
    if !(n_nodes.is_finite() && n_nodes >= 2.0) {
        return Err(Error::range("N_nodes", n_nodes, "must be at least 2"));
    }
    Ok(deterministic_gate_time(tau_rep, p)? * n_nodes.log2())
}

/// Time to grow an `n`-qubit cluster with failure probability `ε`:
///
/// `τ[(1/P)^{log₂(4/P−3)} + (1/P)log₂(4(ln(2n/ε)−1)/P) + (1/P)ln(2n/ε)]`.
pub fn cluster_time(n: f64, p: f64, epsilon: f64, tau_rep: f64) -> Result<f64> {
    check_positive("tau_rep", tau_rep)?;
    if !(p.is_finite() && p > 0.0 && p < 1.0) {
        return Err(Error::range("P", p, "must be in (0, 1)"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::range("epsilon", epsilon, "must be in (0, 1)"));
    }
    if !(n.is_finite() && n >= 2.0) {
        return Err(Error::range("n", n, "must be at least 2"));
    }
    let inv = 1.0 / p;
    let branch = 4.0 * inv - 3.0;
    if branch <= 1.0 {
        return Err(Error::range("P", p, "requires 4/P - 3 > 1"));
    }
    let l = (2.0 * n / epsilon).ln();
    let arg = 4.0 * (l - 1.0) * inv;
    if arg <= 0.0 {
        return Err(Error::range("n", n, "requires ln(2n/epsilon) > 1"));
    }
    Ok(tau_rep * (inv.powf(branch.log2()) + inv * arg.log2() + inv * l))
}

/// Distance light covers during `t_detect`.
pub fn bell_separation(t_detect: f64) -> Result<f64> {
    check_positive("t_detect", t_detect)?;
    Ok(SPEED_OF_LIGHT * t_detect)
}

pub fn seconds_to_years(s: f64) -> f64 {
    s / SECONDS_PER_YEAR
}

pub fn years_to_seconds(y: f64) -> f64 {
    y * SECONDS_PER_YEAR
}

/// Duration in the largest unit that keeps the number ≥ 1, four significant digits.
pub fn human_duration(seconds: f64) -> String {
    const UNITS: [(f64, &str); 5] = [
        (SECONDS_PER_YEAR, "years"),
        (86_400.0, "days"),
        (3_600.0, "hours"),
        (60.0, "minutes"),
        (1.0, "s"),
    ];
    for (scale, unit) in UNITS {
        if seconds >= scale {
            return format!("{} {unit}", significant(seconds / scale, 4));
        }
    }
    if seconds >= 1e-3 {
        format!("{} ms", significant(seconds * 1e3, 4))
    } else {
        format!("{} us", significant(seconds * 1e6, 4))
    }
}

fn significant(x: f64, digits: i32) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub inputs: NetworkParams,
    #[serde(rename = "P_ap")]
    pub p_ap: f64,
    #[serde(rename = "P_I")]
    pub p_i: f64,
    #[serde(rename = "P_II")]
    pub p_ii: f64,
    pub t_gate: f64,
    pub t_repeater: f64,
    #[serde(rename = "T_cluster_seconds")]
    pub t_cluster_seconds: f64,
    #[serde(rename = "T_cluster_human")]
    pub t_cluster_human: String,
    pub bell_distance_m: f64,
}

/// Evaluates every estimate. `P_I` and `P_II` are reported alongside; the
/// time formulas use the supplied `P`.
pub fn network_report(params: &NetworkParams) -> Result<NetworkReport> {
    params.validate()?;
    let p_ap = atom_photon_success(params.p_e, params.p_c, params.p_t)?;
    let t_cluster = cluster_time(params.n, params.p, params.epsilon, params.tau_rep)?;
    Ok(NetworkReport {
        inputs: *params,
        p_ap,
        p_i: type1_success(p_ap, params.eta_det)?,
        p_ii: type2_success(p_ap, params.eta_det, params.p_b)?,
        t_gate: deterministic_gate_time(params.tau_rep, params.p)?,
        t_repeater: repeater_time(params.n_nodes, params.tau_rep, params.p)?,
        t_cluster_seconds: t_cluster,
        t_cluster_human: human_duration(t_cluster),
        bell_distance_m: bell_separation(params.t_detect)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Direct transcription with its own constants, for cross-checking.
    fn cluster_oracle(n: f64, p: f64, eps: f64, tau: f64) -> f64 {
        let a = (1.0 / p).powf((4.0 / p - 3.0).ln() / 2f64.ln());
        let ln = (2.0 * n / eps).ln();
        let b = (4.0 * (ln - 1.0) / p).ln() / (p * 2f64.ln());
        tau * (a + b + ln / p)
    }

    #[test]
    fn atom_photon_examples() {
        assert_eq!(atom_photon_success(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert!((atom_photon_success(0.5, 0.02, 0.2).unwrap() - 0.002).abs() < 1e-18);
        assert_eq!(atom_photon_success(0.0, 0.5, 0.5).unwrap(), 0.0);
        assert!(atom_photon_success(1.1, 0.5, 0.5).is_err());
    }

    #[test]
    fn gate_and_repeater() {
        assert!((deterministic_gate_time(1e-6, 0.1).unwrap() - 1e-5).abs() < 1e-18);
        assert_eq!(deterministic_gate_time(1e-6, 1.0).unwrap(), 1e-6);
        assert!(deterministic_gate_time(1e-6, 0.0).is_err());
        assert_eq!(
            repeater_time(2.0, 1e-6, 0.1).unwrap(),
            deterministic_gate_time(1e-6, 0.1).unwrap()
        );
        assert!((repeater_time(16.0, 1e-6, 0.1).unwrap() - 4e-5).abs() < 1e-18);
        let r = repeater_time(1e6, 1.0, 0.5).unwrap() / repeater_time(1e3, 1.0, 0.5).unwrap();
        assert!((r - 2.0).abs() < 1e-14);
        assert!(repeater_time(1.0, 1e-6, 0.1).is_err());
    }

    #[test]
    fn cluster_matches_oracle() {
        for &(n, p) in &[(1e3, 0.1), (1e3, 0.01), (50.5, 0.3), (1e6, 0.05)] {
            let got = cluster_time(n, p, 0.1, 1e-6).unwrap();
            let want = cluster_oracle(n, p, 0.1, 1e-6);
            assert!(((got - want) / want).abs() < 1e-12);
        }
    }

    #[test]
    fn cluster_headline_values() {
        let t = cluster_time(1e3, 0.1, 0.1, 1e-6).unwrap();
        assert!((t - 0.16).abs() / 0.16 < 0.05);
        let years = seconds_to_years(cluster_time(1e3, 0.01, 0.1, 1e-6).unwrap());
        assert!((years - 5900.0).abs() / 5900.0 < 0.1);
        let t6 = cluster_time(1e6, 0.1, 0.1, 1e-6).unwrap();
        let rel = (t6 - t) / t * 100.0;
        assert!((rel - 0.05).abs() < 0.02);
    }

    #[test]
    fn cluster_domain() {
        assert!(cluster_time(1e3, 1.0, 0.1, 1e-6).is_err());
        assert!(cluster_time(1e3, 0.0, 0.1, 1e-6).is_err());
        assert!(cluster_time(1e3, 0.1, 1.0, 1e-6).is_err());
        assert!(cluster_time(1.0, 0.1, 0.1, 1e-6).is_err());
        assert!(cluster_time(1e3, 0.1, 0.1, 0.0).is_err());
    }

    #[test]
    fn cluster_decreasing_in_p() {
        let grid: Vec<f64> = (0..400).map(|k| 0.001 + 0.499 * k as f64 / 399.0).collect();
        let t: Vec<f64> = grid
            .iter()
            .map(|&p| cluster_time(1e3, p, 0.1, 1e-6).unwrap())
            .collect();
        assert!(t.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bell_examples() {
        let d = bell_separation(10e-6).unwrap();
        assert!((d - 2997.92458).abs() < 1e-9);
        assert_eq!(bell_separation(1.0).unwrap(), SPEED_OF_LIGHT);
        assert!(bell_separation(0.0).is_err());
    }

    #[test]
    fn human_units() {
        assert_eq!(human_duration(0.16216), "162.2 ms");
        assert_eq!(human_duration(3.0), "3.000 s");
        assert_eq!(human_duration(years_to_seconds(5846.2)), "5846 years");
        assert_eq!(human_duration(1e-5), "10.00 us");
        assert_eq!(human_duration(120.0), "2.000 minutes");
    }

    #[test]
    fn report_keys_and_order() {
        let r = network_report(&NetworkParams::default()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let keys = [
            "\"inputs\"",
            "\"P_ap\"",
            "\"P_I\"",
            "\"P_II\"",
            "\"t_gate\"",
            "\"t_repeater\"",
            "\"T_cluster_seconds\"",
            "\"T_cluster_human\"",
            "\"bell_distance_m\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.p_i, 2.0);
        assert_eq!(r.p_ii, 0.5);
    }

    #[test]
    fn report_rejects_bad_inputs() {
        let bad = NetworkParams {
            p: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            network_report(&bad),
            Err(Error::OutOfRange { name: "P", .. })
        ));
        let bad = NetworkParams {
            epsilon: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            network_report(&bad),
            Err(Error::OutOfRange {
                name: "epsilon",
                ..
            })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn outputs_positive_and_year_round_trip(
            p in 0.001f64..0.999,
            n in 2.0f64..1e7,
            eps in 1e-6f64..0.999,
            tau in 1e-9f64..1.0,
        ) {
            let t = cluster_time(n, p, eps, tau).unwrap();
            prop_assert!(t > 0.0 && t.is_finite());
            let back = years_to_seconds(seconds_to_years(t));
            prop_assert!(((back - t) / t).abs() < 1e-9);
        }

        #[test]
        fn weak_dependence_on_n(eps in 0.01f64..0.5) {
            let a = cluster_time(1e3, 0.1, eps, 1e-6).unwrap();
            let b = cluster_time(1e6, 0.1, eps, 1e-6).unwrap();
            prop_assert!((b - a) / a < 1e-3);
        }
    }
}
