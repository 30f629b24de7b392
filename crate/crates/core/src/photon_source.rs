//! Atom–photon pair states for the four photonic qubit encodings, plus
//! Yb-171 level presets.
//!
//! Each constructor places the photon in the spatial port given by the caller,
//! so two sources can be combined with [`crate::hilbert::tensor`] and sent to
//! the two beamsplitter inputs.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_probability, Error, Result};
use crate::hilbert::{Amplitude, Channel, Level, Mode, Port, PureState};

/// Tolerance on normalization of user-supplied amplitudes and probabilities.
pub const INPUT_NORM_TOL: f64 = 1e-9;

/// Default cutoff for [`resolvable`] quality values.
pub const DEFAULT_RESOLVABILITY_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitKind {
    Number,
    Polarization,
    Frequency,
    Timebin,
}

impl QubitKind {
    /// Photon channels used by this encoding, in mode order.
    pub fn channels(self) -> &'static [Channel] {
        match self {
            QubitKind::Number => &[Channel::None],
            QubitKind::Polarization => &[Channel::H, Channel::V],
            QubitKind::Frequency => &[Channel::Red, Channel::Blue],
            QubitKind::Timebin => &[Channel::T1, Channel::T2],
        }
    }

    pub fn modes(self, port: Port) -> Vec<Mode> {
        self.channels()
            .iter()
            .map(|&c| Mode::new(port, c))
            .collect()
    }
}

impl fmt::Display for QubitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QubitKind::Number => "number",
            QubitKind::Polarization => "polarization",
            QubitKind::Frequency => "frequency",
            QubitKind::Timebin => "timebin",
        })
    }
}

impl FromStr for QubitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "number" => Ok(QubitKind::Number),
            "polarization" => Ok(QubitKind::Polarization),
            "frequency" => Ok(QubitKind::Frequency),
            "timebin" => Ok(QubitKind::Timebin),
            other => Err(Error::InvalidProtocol(format!(
                "unknown qubit kind `{other}` (expected number, polarization, frequency or timebin)"
            ))),
        }
    }
}

fn check_amplitudes(alpha: Amplitude, beta: Amplitude) -> Result<()> {
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if !n.is_finite() || (n - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::range(
            "|alpha|^2 + |beta|^2",
            n,
            "qubit amplitudes must be normalized",
        ));
    }
    Ok(())
}

fn real(x: f64) -> Amplitude {
    Amplitude::new(x, 0.0)
}

/// `√(1−p_e)|↑⟩|0⟩ + √p_e|↓⟩|1⟩`.
pub fn make_number_pair(p_e: f64, port: Port) -> Result<PureState> {
    check_probability("p_e", p_e)?;
    let mut s = PureState::empty(1, QubitKind::Number.modes(port));
    s.add_term(&[Level::Up], &[0], real((1.0 - p_e).sqrt()));
    s.add_term(&[Level::Down], &[1], real(p_e.sqrt()));
    Ok(s)
}

/// `√p_up|↑⟩|1_H 0_V⟩ + √p_down|↓⟩|0_H 1_V⟩`.
pub fn make_polarization_pair(p_up: f64, p_down: f64, port: Port) -> Result<PureState> {
    check_probability("p_up", p_up)?;
    check_probability("p_down", p_down)?;
    if (p_up + p_down - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::range(
            "p_up + p_down",
            p_up + p_down,
            "branch probabilities must sum to 1",
        ));
    }
    let mut s = PureState::empty(1, QubitKind::Polarization.modes(port));
    s.add_term(&[Level::Up], &[1, 0], real(p_up.sqrt()));
    s.add_term(&[Level::Down], &[0, 1], real(p_down.sqrt()));
    Ok(s)
}

/// `α|↑⟩|1_r 0_b⟩ + β|↓⟩|0_r 1_b⟩`.
pub fn make_frequency_pair(alpha: Amplitude, beta: Amplitude, port: Port) -> Result<PureState> {
    check_amplitudes(alpha, beta)?;
    let mut s = PureState::empty(1, QubitKind::Frequency.modes(port));
    s.add_term(&[Level::Up], &[1, 0], alpha);
    s.add_term(&[Level::Down], &[0, 1], beta);
    Ok(s)
}

/// `β|↑⟩|0_{t1} 1_{t2}⟩ − α|↓⟩|1_{t1} 0_{t2}⟩`.
pub fn make_timebin_pair(alpha: Amplitude, beta: Amplitude, port: Port) -> Result<PureState> {
    check_amplitudes(alpha, beta)?;
    let mut s = PureState::empty(1, QubitKind::Timebin.modes(port));
    s.add_term(&[Level::Up], &[0, 1], beta);
    s.add_term(&[Level::Down], &[1, 0], -alpha);
    Ok(s)
}

/// Separation of the two photonic qubit components against the linewidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvabilityCheck {
    /// Frequency splitting Δω (rad/s) or time-bin separation |t2 − t1| (s).
    pub delta: f64,
    /// Natural linewidth Γ (rad/s).
    pub gamma: f64,
}

/// Overlap quality of the two qubit components; small means well resolved.
///
/// Frequency qubits return Γ/Δω, time-bin qubits `e^{−Γ|Δt|}`.
pub fn resolvable(check: ResolvabilityCheck, kind: QubitKind) -> Result<f64> {
    check_positive("gamma", check.gamma)?;
    if !check.delta.is_finite() {
        return Err(Error::range("delta", check.delta, "must be finite"));
    }
    match kind {
        QubitKind::Frequency => {
            if check.delta == 0.0 {
                return Err(Error::range(
                    "delta",
                    0.0,
                    "frequency splitting must be non-zero",
                ));
            }
            Ok(check.gamma / check.delta.abs())
        }
        QubitKind::Timebin => Ok((-check.gamma * check.delta.abs()).exp()),
        other => Err(Error::InvalidProtocol(format!(
            "no resolvability notion for {other} qubits"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPreset {
    pub name: String,
    pub wavelength_nm: f64,
    /// Excitation probability, if known. Built-in presets leave it unset.
    #[serde(default)]
    pub p_e: Option<f64>,
    pub branch_divisor: f64,
    #[serde(default)]
    pub notes: String,
}

impl LevelPreset {
    /// `p_e / branch_divisor`, or an error if the preset carries no p_e.
    pub fn effective_p_e(&self) -> Result<f64> {
        match self.p_e {
            Some(p) => Ok(p / self.branch_divisor),
            None => Err(Error::Config(format!(
                "preset `{}` has no p_e; supply one explicitly",
                self.name
            ))),
        }
    }

    /// Same as [`effective_p_e`](Self::effective_p_e) with a caller-supplied p_e.
    pub fn effective_with(&self, p_e: f64) -> Result<f64> {
        check_probability("p_e", p_e)?;
        Ok(p_e / self.branch_divisor)
    }

    fn validate(&self) -> Result<()> {
        if let Some(p) = self.p_e {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::range("p_e", p, "preset p_e must lie in (0, 1]"));
            }
        }
        if !(self.branch_divisor.is_finite() && self.branch_divisor >= 1.0) {
            return Err(Error::range(
                "branch_divisor",
                self.branch_divisor,
                "must be at least 1",
            ));
        }
        check_positive("wavelength_nm", self.wavelength_nm)
    }
}

const UV_NM: f64 = 369.5;
const IR935_NM: f64 = 935.2;
const IR1300_NM: f64 = 1300.0;

// (name, wavelength, branch divisor, notes)
const BUILTIN: &[(&str, f64, f64, &str)] = &[
    (
        "uv_number",
        UV_NM,
        1.0,
        "S1/2 -> P1/2 excitation, single UV photon or vacuum",
    ),
    (
        "uv_polarization",
        UV_NM,
        1.0,
        "P1/2 decay, sigma/pi photon polarization",
    ),
    (
        "uv_frequency",
        UV_NM,
        1.0,
        "P1/2 decay, hyperfine-split photon colors",
    ),
    (
        "uv_timebin",
        UV_NM,
        1.0,
        "P1/2 decay, two sequential excitation windows",
    ),
    (
        "ir935_polarization",
        IR935_NM,
        56.0,
        "P1/2 -> D3/2 branch (about 1 in 56), then 935 nm",
    ),
    (
        "ir935_frequency",
        IR935_NM,
        56.0,
        "P1/2 -> D3/2 branch (about 1 in 56), then 935 nm",
    ),
    (
        "ir1300_frequency",
        IR1300_NM,
        476.0,
        "P3/2 -> D5/2 route (about 1 in 476), then 1.3 um",
    ),
];

pub fn preset_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|p| p.0).collect()
}

pub fn builtin_presets() -> Vec<LevelPreset> {
    BUILTIN
        .iter()
        .map(|&(name, wl, div, notes)| LevelPreset {
            name: name.to_string(),
            wavelength_nm: wl,
            p_e: None,
            branch_divisor: div,
            notes: notes.to_string(),
        })
        .collect()
}

pub fn preset(name: &str) -> Result<LevelPreset> {
    find_preset(&builtin_presets(), name)
}

/// Looks up `name` in a preset table.
pub fn find_preset(table: &[LevelPreset], name: &str) -> Result<LevelPreset> {
    table
        .iter()
        .find(|p| p.name == name)
        .cloned()
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            valid: table
                .iter()
                .map(|p| p.name.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        })
}

#[derive(Deserialize)]
struct PresetFile {
    #[serde(default)]
    preset: Vec<LevelPreset>,
}

/// Parses a preset table from TOML:
///
/// ```toml
/// [[preset]]
/// name = "ir935_frequency"
/// wavelength_nm = 935.2
/// p_e = 0.5
/// branch_divisor = 56
/// ```
///
/// Entries override built-ins of the same name; new names are appended.
pub fn parse_preset_table(text: &str) -> Result<Vec<LevelPreset>> {
    let file: PresetFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut table = builtin_presets();
    for p in file.preset {
        p.validate()?;
        match table.iter_mut().find(|q| q.name == p.name) {
            Some(slot) => *slot = p,
            None => table.push(p),
        }
    }
    Ok(table)
}

pub fn load_preset_table(path: &Path) -> Result<Vec<LevelPreset>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_preset_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fidelity, AMPLITUDE_TOL};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    #[test]
    fn number_pair_extremes() {
        let s = make_number_pair(0.0, Port::A).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude_of(&[Level::Up], &[0]), c(1.0, 0.0));
        let s = make_number_pair(1.0, Port::A).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude_of(&[Level::Down], &[1]), c(1.0, 0.0));
    }

    #[test]
    fn number_pair_small_p() {
        let s = make_number_pair(0.04, Port::B).unwrap();
        assert!((s.amplitude_of(&[Level::Up], &[0]).re - 0.96f64.sqrt()).abs() < 1e-15);
        assert!((s.amplitude_of(&[Level::Down], &[1]).re - 0.2).abs() < 1e-15);
        assert!(make_number_pair(1.2, Port::A).is_err());
        assert!(make_number_pair(-0.1, Port::A).is_err());
    }

    #[test]
    fn polarization_pair_amplitudes() {
        let s = make_polarization_pair(0.36, 0.64, Port::A).unwrap();
        assert!((s.amplitude_of(&[Level::Up], &[1, 0]).re - 0.6).abs() < 1e-15);
        assert!((s.amplitude_of(&[Level::Down], &[0, 1]).re - 0.8).abs() < 1e-15);
        let one = make_polarization_pair(1.0, 0.0, Port::A).unwrap();
        assert_eq!(one.len(), 1);
        assert!(make_polarization_pair(0.5, 0.4, Port::A).is_err());
    }

    #[test]
    fn frequency_pair_carries_phase() {
        let s = make_frequency_pair(c(0.6, 0.0), c(0.0, 0.8), Port::A).unwrap();
        assert_eq!(s.amplitude_of(&[Level::Down], &[0, 1]), c(0.0, 0.8));
        assert!(make_frequency_pair(c(1.0, 0.0), c(1.0, 0.0), Port::A).is_err());
    }

    #[test]
    fn timebin_sign_convention() {
        let s = make_timebin_pair(c(1.0, 0.0), c(0.0, 0.0), Port::A).unwrap();
        assert_eq!(s.amplitude_of(&[Level::Down], &[1, 0]), c(-1.0, 0.0));
        let s = make_timebin_pair(c(0.0, 0.0), c(1.0, 0.0), Port::A).unwrap();
        assert_eq!(s.amplitude_of(&[Level::Up], &[0, 1]), c(1.0, 0.0));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let built = make_timebin_pair(c(h, 0.0), c(h, 0.0), Port::A).unwrap();
        let modes = QubitKind::Timebin.modes(Port::A);
        let mut cited = PureState::empty(1, modes);
        cited.add_term(&[Level::Up], &[0, 1], c(h, 0.0));
        cited.add_term(&[Level::Down], &[1, 0], c(-h, 0.0));
        assert!((fidelity(&built, &cited).unwrap() - 1.0).abs() < AMPLITUDE_TOL);
    }

    #[test]
    fn resolvability_values() {
        let f = resolvable(
            ResolvabilityCheck {
                delta: 100.0,
                gamma: 1.0,
            },
            QubitKind::Frequency,
        )
        .unwrap();
        assert!((f - 0.01).abs() < 1e-15);
        let f = resolvable(
            ResolvabilityCheck {
                delta: 1.0,
                gamma: 1.0,
            },
            QubitKind::Frequency,
        )
        .unwrap();
        assert_eq!(f, 1.0);
        let t = resolvable(
            ResolvabilityCheck {
                delta: 5.0,
                gamma: 1.0,
            },
            QubitKind::Timebin,
        )
        .unwrap();
        assert!((t - (-5.0f64).exp()).abs() < 1e-15);
        assert!(resolvable(
            ResolvabilityCheck {
                delta: 5.0,
                gamma: 1.0
            },
            QubitKind::Number
        )
        .is_err());
        assert!(resolvable(
            ResolvabilityCheck {
                delta: 5.0,
                gamma: 0.0
            },
            QubitKind::Timebin
        )
        .is_err());
    }

    #[test]
    fn presets() {
        let uv = preset("uv_frequency").unwrap();
        assert!((uv.wavelength_nm - 370.0).abs() < 1.0);
        assert_eq!(uv.branch_divisor, 1.0);
        assert_eq!(preset("ir935_frequency").unwrap().branch_divisor, 56.0);
        assert_eq!(preset("ir1300_frequency").unwrap().branch_divisor, 476.0);
        assert!((preset("ir1300_frequency").unwrap().wavelength_nm - 1300.0).abs() < 1e-9);
        assert!(uv.effective_p_e().is_err());
        match preset("ir2000") {
            Err(Error::UnknownPreset { valid, .. }) => assert!(valid.contains("uv_timebin")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_file_overrides_and_appends() {
        let text = r#"
            [[preset]]
            name = "ir935_frequency"
            wavelength_nm = 935.2
            p_e = 0.5
            branch_divisor = 56

            [[preset]]
            name = "custom"
            wavelength_nm = 411.0
            branch_divisor = 2.0
        "#;
        let table = parse_preset_table(text).unwrap();
        let ir = find_preset(&table, "ir935_frequency").unwrap();
        assert!((ir.effective_p_e().unwrap() - 0.5 / 56.0).abs() < 1e-15);
        assert_eq!(find_preset(&table, "custom").unwrap().branch_divisor, 2.0);
        assert_eq!(table.len(), 8);

        let bad = "[[preset]]\nname = \"x\"\nwavelength_nm = 1.0\nbranch_divisor = 0.5\n";
        assert!(parse_preset_table(bad).is_err());
    }

    fn arb_qubit() -> impl Strategy<Value = (Amplitude, Amplitude)> {
        (
            0.0f64..std::f64::consts::FRAC_PI_2,
            0.0f64..6.3,
            0.0f64..6.3,
        )
            .prop_map(|(t, pa, pb)| {
                (
                    Amplitude::from_polar(t.cos(), pa),
                    Amplitude::from_polar(t.sin(), pb),
                )
            })
    }

    proptest! {
        #[test]
        fn constructors_are_normalized(p in 0.0f64..=1.0, (a, b) in arb_qubit()) {
            prop_assert!((make_number_pair(p, Port::A).unwrap().norm() - 1.0).abs() < 1e-12);
            prop_assert!((make_polarization_pair(p, 1.0 - p, Port::A).unwrap().norm() - 1.0).abs() < 1e-12);
            prop_assert!((make_frequency_pair(a, b, Port::A).unwrap().norm() - 1.0).abs() < 1e-12);
            prop_assert!((make_timebin_pair(a, b, Port::A).unwrap().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn qubit_encodings_are_isometries((a1, b1) in arb_qubit(), (a2, b2) in arb_qubit()) {
            // ⟨out1|out2⟩ must equal ⟨in1|in2⟩ for both encodings
            let want = a1.conj() * a2 + b1.conj() * b2;
            for make in [make_frequency_pair, make_timebin_pair] {
                let s1 = make(a1, b1, Port::A).unwrap();
                let s2 = make(a2, b2, Port::A).unwrap();
                prop_assert!((s1.inner(&s2).unwrap() - want).norm() < 1e-12);
            }
        }
    }
}
