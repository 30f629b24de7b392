//! Command runners. Each returns the rendered output text.

use std::fmt::Write as _;

use ionnet_core::heralding::{
    type1_herald, type2_herald, DetectionPattern, DetectorId, HeraldOutcome, PathGeometry, Qubit,
    Treatment,
};
use ionnet_core::ion_crystal::monte_carlo::radiation_pattern_mc;
use ionnet_core::ion_crystal::{
    pattern_csv, radiation_pattern, DopplerParams, IonCrystal, YB_RECOIL_OVER_LINEWIDTH,
};
use ionnet_core::light_collection::{
    cavity_collection, coupling_csv, coupling_curve, coupling_vs_radius, optimize_focus,
    CavityParams, FiberMode, Jones,
};
use ionnet_core::network::{network_report, NetworkParams};
use ionnet_core::photon_source::preset;
use ionnet_core::{Amplitude, Error, QubitKind};
use serde::Serialize;

use crate::config::{Command, Format, RunConfig};

#[derive(Debug)]
pub enum RunError {
    /// Bad input; exit status 1.
    Validation(Vec<String>),
    /// A calculation failed to converge or produced no answer; exit status 2.
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(v) => {
                for (i, line) in v.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "invalid configuration: {line}")?;
                }
                Ok(())
            }
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange {
                name,
                value,
                reason,
            } => RunError::Validation(vec![format!(
                "`{name}` = {value} is out of range: {reason}"
            )]),
            Error::ZigZag { .. } => RunError::Validation(vec![format!(
                "`anisotropy` is too weak for a linear chain: {e}"
            )]),
            Error::InvalidProtocol(_)
            | Error::UnknownPreset { .. }
            | Error::Config(_)
            | Error::UnsupportedState(_)
            | Error::BasisMismatch(_)
            | Error::OverlappingModes(_)
            | Error::OccupationTooHigh { .. } => RunError::Validation(vec![e.to_string()]),
            Error::ZeroNorm
            | Error::NonConvergence { .. }
            | Error::Quadrature { .. }
            | Error::NoInteriorMaximum { .. } => RunError::Numerical(e.to_string()),
        }
    }
}

type Out = Result<String, RunError>;

fn json<T: Serialize>(value: &T) -> Out {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| RunError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn run(config: &RunConfig) -> Out {
    match config.command {
        Command::Herald => herald(config),
        Command::Pattern => pattern(config),
        Command::Collect => collect(config),
        Command::Cavity => cavity(config),
        Command::Estimate => estimate(config),
    }
}

#[derive(Debug, Serialize)]
struct AmplitudeEntry {
    label: String,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct HeraldReport {
    protocol: String,
    kind: String,
    pattern: String,
    probability: f64,
    purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    treatment: Option<String>,
    atomic_state: Vec<AmplitudeEntry>,
}

fn herald_report(
    protocol: &str,
    kind: QubitKind,
    out: &HeraldOutcome,
    fidelity: Option<f64>,
    treatment: Option<&str>,
) -> HeraldReport {
    let rec = out.to_record(protocol);
    HeraldReport {
        protocol: rec.protocol,
        kind: kind.to_string(),
        pattern: rec.pattern,
        probability: rec.probability,
        purity: out.purity,
        fidelity,
        treatment: treatment.map(str::to_string),
        atomic_state: rec
            .atomic_state
            .into_iter()
            .map(|(label, re, im)| AmplitudeEntry {
                label,
                // drop negative zeros so equal states print identically
                re: re + 0.0,
                im: im + 0.0,
            })
            .collect(),
    }
}

fn qubit(config: &RunConfig, a: &str, b: &str) -> Qubit {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (x, y) = (config.f64_or(a, h), config.f64_or(b, h));
    let n = x.hypot(y);
    Qubit::new(Amplitude::new(x / n, 0.0), Amplitude::new(y / n, 0.0))
}

fn herald(config: &RunConfig) -> Out {
    let geom = PathGeometry {
        delta_k: config.f64_or("delta_k", 0.0),
        delta_x: config.f64_or("delta_x", 0.0),
        delta_omega: config.f64_or("delta_omega", 0.0),
    };
    if config.get("protocol") == Some("type1") {
        let mut p_e = config.f64_or("p_e", 0.0);
        if let Some(name) = config.get("preset") {
            p_e = preset(name)?.effective_with(p_e)?;
        }
        let which: DetectorId = config.str_or("detector", "D1").parse()?;
        let (treatment, tname) = match config.str_or("treatment", "truncated") {
            "exact" => (Treatment::Exact, "exact"),
            _ => (Treatment::Truncated, "truncated"),
        };
        let eta = config.f64_or("eta_det", 1.0);
        let out = type1_herald(p_e, &geom, eta, which, treatment)?;
        return json(&herald_report(
            "type1",
            QubitKind::Number,
            &out.outcome,
            Some(out.fidelity),
            Some(tname),
        ));
    }
    let kind: QubitKind = config.str_or("kind", "frequency").parse()?;
    let default_pattern = if kind == QubitKind::Timebin {
        "D1@t1+D2@t2"
    } else {
        "D1+D2"
    };
    let pattern: DetectionPattern = config.str_or("pattern", default_pattern).parse()?;
    let (a, b) = (
        qubit(config, "alpha_a", "beta_a"),
        qubit(config, "alpha_b", "beta_b"),
    );
    let g = (geom != PathGeometry::default()).then_some(&geom);
    let out = type2_herald(a, b, kind, &pattern, g)?;
    json(&herald_report("type2", kind, &out, None, None))
}

#[derive(Debug, Serialize)]
struct PatternRow {
    theta_out_rad: f64,
    normalized_intensity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_std_error: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PatternReport {
    n: u64,
    eta_lambda: f64,
    anisotropy: f64,
    theta_in: f64,
    grid: u64,
    mc_samples: u64,
    seed: u64,
    samples: Vec<PatternRow>,
}

fn pattern(config: &RunConfig) -> Out {
    let n = config.u64_or("n", 1);
    let eta_lambda = config.f64_or("eta_lambda", 1.0);
    let anisotropy = config.f64_or("anisotropy", 1.0);
    let grid = config.u64_or("grid", 2048);
    let theta_in = config.f64_or("theta_in", 0.0);
    let mc_samples = config.u64_or("mc_samples", 0);
    let doppler = DopplerParams {
        recoil_scale: config.f64_or("recoil_scale", 1.0),
        recoil_over_linewidth: config.f64_or("recoil_over_linewidth", YB_RECOIL_OVER_LINEWIDTH),
    };
    let crystal = IonCrystal::doppler_limited(n as usize, anisotropy, eta_lambda, doppler)?;
    let exact = radiation_pattern(&crystal, theta_in, grid as usize);
    let mc = (mc_samples > 0).then(|| {
        radiation_pattern_mc(
            &crystal,
            theta_in,
            grid as usize,
            mc_samples as usize,
            config.seed(),
        )
    });
    match config.format() {
        Format::Csv => match mc {
            None => Ok(pattern_csv(&exact)),
            Some(mc) => {
                let mut s =
                    String::from("theta_out_rad,normalized_intensity,mc_mean,mc_std_error\n");
                for ((t, v), (_, e)) in exact.iter().zip(&mc) {
                    let _ = writeln!(s, "{t},{v},{},{}", e.mean, e.std_error);
                }
                Ok(s)
            }
        },
        Format::Json => {
            let samples = exact
                .iter()
                .enumerate()
                .map(|(i, &(t, v))| PatternRow {
                    theta_out_rad: t,
                    normalized_intensity: v,
                    mc_mean: mc.as_ref().map(|m| m[i].1.mean),
                    mc_std_error: mc.as_ref().map(|m| m[i].1.std_error),
                })
                .collect();
            json(&PatternReport {
                n,
                eta_lambda,
                anisotropy,
                theta_in,
                grid,
                mc_samples,
                seed: config.seed(),
                samples,
            })
        }
    }
}

fn scan_points(lo: f64, hi: f64, points: usize, log: bool) -> Vec<f64> {
    (0..points)
        .map(|k| {
            let t = k as f64 / (points - 1) as f64;
            if log {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct CurvePoint {
    f_over_w: f64,
    #[serde(rename = "P_sigma")]
    p_sigma: f64,
}

#[derive(Debug, Serialize)]
struct RadiusPoint {
    rho_max_over_w: f64,
    f_star_over_w: f64,
    #[serde(rename = "P_star")]
    p_star: f64,
}

#[derive(Debug, Serialize)]
struct CollectReport<T> {
    scan: String,
    m: i32,
    polarization: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_max_over_w: Option<f64>,
    /// Focus optimum for the f-over-w scan; absent when the coupling has no interior peak.
    #[serde(skip_serializing_if = "Option::is_none")]
    optimum: Option<CurvePoint>,
    points: Vec<T>,
}

fn collect(config: &RunConfig) -> Out {
    let radius = config.get("scan") == Some("radius");
    let lo = config.f64_or("min", if radius { 0.5 } else { 0.05 });
    let hi = config.f64_or("max", 5.0);
    if lo >= hi {
        return Err(RunError::Validation(vec![format!(
            "`min` = {lo} must be below `max` = {hi}"
        )]));
    }
    let points = config.u64_or("points", 200) as usize;
    let xs = scan_points(lo, hi, points, config.get("spacing") == Some("log"));
    let m: i32 = if config.get("m") == Some("-1") { -1 } else { 1 };
    let pol = config.str_or("polarization", "left");
    let jones = match pol {
        "right" => Jones::right_circular(),
        "horizontal" => Jones::horizontal(),
        _ => Jones::left_circular(),
    };
    let fiber = FiberMode::new(1.0, jones)?;
    if radius {
        let rows = coupling_vs_radius(m, &fiber, &xs)?;
        return match config.format() {
            Format::Csv => {
                let mut s = String::from("rho_max_over_w,f_star_over_w,P_star\n");
                for (r, f, p) in &rows {
                    let _ = writeln!(s, "{r},{f},{p}");
                }
                Ok(s)
            }
            Format::Json => json(&CollectReport {
                scan: "radius".into(),
                m,
                polarization: pol.into(),
                rho_max_over_w: None,
                optimum: None,
                points: rows
                    .into_iter()
                    .map(|(r, f, p)| RadiusPoint {
                        rho_max_over_w: r,
                        f_star_over_w: f,
                        p_star: p,
                    })
                    .collect(),
            }),
        };
    }
    let rho_max = config.f64_opt("rho_max");
    let curve = coupling_curve(m, &fiber, rho_max, &xs)?;
    match config.format() {
        Format::Csv => Ok(coupling_csv(&curve)),
        Format::Json => {
            let optimum = match optimize_focus(m, &fiber, rho_max) {
                Ok(o) => Some(CurvePoint {
                    f_over_w: o.f_star,
                    p_sigma: o.p_star,
                }),
                Err(Error::NoInteriorMaximum { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            json(&CollectReport {
                scan: "f-over-w".into(),
                m,
                polarization: pol.into(),
                rho_max_over_w: rho_max,
                optimum,
                points: curve
                    .into_iter()
                    .map(|(f_over_w, p_sigma)| CurvePoint { f_over_w, p_sigma })
                    .collect(),
            })
        }
    }
}

fn cavity(config: &RunConfig) -> Out {
    let params = CavityParams {
        g: config.f64_or("g", 0.0),
        kappa: config.f64_or("kappa", 0.0),
        gamma: config.f64_or("gamma", 0.0),
        t_l: config.f64_or("t_l", 0.0),
        loss_total: config.f64_or("loss_total", 0.0),
    };
    json(&cavity_collection(&params)?)
}

fn estimate(config: &RunConfig) -> Out {
    let d = NetworkParams::default();
    let params = NetworkParams {
        p_e: config.f64_or("p_e", d.p_e),
        p_c: config.f64_or("p_c", d.p_c),
        p_t: config.f64_or("p_t", d.p_t),
        eta_det: config.f64_or("eta_det", d.eta_det),
        p_b: config.f64_or("p_b", d.p_b),
        tau_rep: config
            .f64_opt("tau_rep_us")
            .map_or(d.tau_rep, |us| us / 1e6),
        p: config.f64_or("p", d.p),
        n: config.f64_or("n", d.n),
        epsilon: config.f64_or("epsilon", d.epsilon),
        n_nodes: config.f64_or("n_nodes", d.n_nodes),
        t_detect: config
            .f64_opt("t_detect_us")
            .map_or(d.t_detect, |us| us / 1e6),
    };
    json(&network_report(&params)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(cmd: Command, pairs: &[(&str, &str)]) -> RunConfig {
        RunConfig {
            command: cmd,
            params: pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    #[test]
    fn scan_endpoints_exact() {
        let lin = scan_points(0.05, 5.0, 200, false);
        assert_eq!((lin[0], lin[199]), (0.05, 5.0));
        let log = scan_points(0.05, 5.0, 3, true);
        assert!((log[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn error_mapping() {
        let e: RunError = Error::OutOfRange {
            name: "p",
            value: 2.0,
            reason: "must be in (0, 1)",
        }
        .into();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("`p`"));
        let e: RunError = Error::NonConvergence {
            method: "newton",
            iterations: 3,
            residual: 1.0,
        }
        .into();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn radius_scan_with_blocked_polarization_is_numerical() {
        let c = cfg(
            Command::Collect,
            &[
                ("scan", "radius"),
                ("polarization", "right"),
                ("points", "3"),
            ],
        );
        assert_eq!(run(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn zigzag_names_anisotropy() {
        let c = cfg(
            Command::Pattern,
            &[
                ("n", "10"),
                ("eta_lambda", "600"),
                ("anisotropy", "2"),
                ("grid", "8"),
            ],
        );
        let e = run(&c).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("`anisotropy`"));
    }
}
