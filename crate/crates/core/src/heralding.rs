//! Beamsplitter interference, threshold detection, and heralded entanglement.
//!
//! Output port A feeds detector D1 and port B feeds D2. Detectors are
//! threshold (click / no click), frequency-blind, and optionally resolve the
//! two time bins. Type I heralding uses number qubits and one click; type II
//! uses two-channel qubits and a two-photon pattern.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::hilbert::{tensor, Amplitude, BasisLabel, Channel, Level, Mode, Port, PureState};
use crate::photon_source::{
    make_frequency_pair, make_number_pair, make_polarization_pair, make_timebin_pair, QubitKind,
};

/// Largest per-channel occupation the beamsplitter accepts.
pub const MAX_CHANNEL_OCCUPATION: u8 = 2;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const PURE_TOL: f64 = 1e-12;

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u8) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Output amplitudes `(j, k, c)` for `|n_a⟩_A|n_b⟩_B` in one channel, using
/// `a† → (a† − b†)/√2`, `b† → (a† + b†)/√2`.
fn split_pair(na: u8, nb: u8) -> Vec<(u8, u8, f64)> {
    let n = na + nb;
    let mut poly = vec![0.0; n as usize + 1];
    for i in 0..=na {
        let sign = if (na - i) % 2 == 1 { -1.0 } else { 1.0 };
        for l in 0..=nb {
            poly[(i + l) as usize] += sign * binomial(na, i) * binomial(nb, l);
        }
    }
    let norm = 1.0 / (2f64.powi(n as i32).sqrt() * (factorial(na) * factorial(nb)).sqrt());
    poly.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(j, &c)| {
            let j = j as u8;
            (
                j,
                n - j,
                c * norm * (factorial(j) * factorial(n - j)).sqrt(),
            )
        })
        .collect()
}

/// 50:50 beamsplitter acting channel by channel on ports A and B.
///
/// Missing partner modes are added with zero occupation. Reproduces
/// `|0⟩_A|1⟩_B → (|0,1⟩ + |1,0⟩)/√2` and
/// `|1⟩_A|1⟩_B → (|2,0⟩ − |0,2⟩)/√2`.
pub fn beamsplitter(s: &PureState) -> Result<PureState> {
    let mut modes = s.modes().to_vec();
    for m in s.modes() {
        let partner = Mode::new(m.port.other(), m.channel);
        if !modes.contains(&partner) {
            modes.push(partner);
        }
    }
    let mut cur = s.extend_modes(&modes)?;
    for (label, _) in cur.terms() {
        for (i, &n) in label.photons.iter().enumerate() {
            if n > MAX_CHANNEL_OCCUPATION {
                return Err(Error::OccupationTooHigh {
                    mode: modes[i].to_string(),
                    occupation: n,
                    max: MAX_CHANNEL_OCCUPATION,
                });
            }
        }
    }
    let channels: BTreeSet<Channel> = modes.iter().map(|m| m.channel).collect();
    for c in channels {
        let ia = modes
            .iter()
            .position(|&m| m == Mode::new(Port::A, c))
            .unwrap();
        let ib = modes
            .iter()
            .position(|&m| m == Mode::new(Port::B, c))
            .unwrap();
        let mut next = PureState::empty(cur.atom_count(), modes.clone());
        for (label, amp) in cur.terms() {
            for (j, k, coef) in split_pair(label.photons[ia], label.photons[ib]) {
                let mut photons = label.photons.clone();
                photons[ia] = j;
                photons[ib] = k;
                next.add_term(&label.atoms, &photons, amp * coef);
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DetectorId {
    D1,
    D2,
}

impl DetectorId {
    pub fn port(self) -> Port {
        match self {
            DetectorId::D1 => Port::A,
            DetectorId::D2 => Port::B,
        }
    }

    pub fn from_port(port: Port) -> Self {
        match port {
            Port::A => DetectorId::D1,
            Port::B => DetectorId::D2,
        }
    }
}

impl FromStr for DetectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D1" | "d1" => Ok(DetectorId::D1),
            "D2" | "d2" => Ok(DetectorId::D2),
            other => Err(Error::InvalidProtocol(format!(
                "unknown detector `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TimeBin {
    T1,
    T2,
}

/// A photomultiplier. Never resolves frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    pub id: DetectorId,
    pub efficiency: f64,
    pub resolves_time: bool,
}

impl Detector {
    pub fn ideal(id: DetectorId, resolves_time: bool) -> Self {
        Detector {
            id,
            efficiency: 1.0,
            resolves_time,
        }
    }
}

/// A single click: which detector fired and, if resolved, in which time bin.
pub type Event = (DetectorId, Option<TimeBin>);

fn event_string(e: &Event) -> String {
    match e.1 {
        None => format!("{:?}", e.0),
        Some(TimeBin::T1) => format!("{:?}@t1", e.0),
        Some(TimeBin::T2) => format!("{:?}@t2", e.0),
    }
}

/// Herald condition: one or two distinct detector events.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DetectionPattern {
    events: Vec<Event>,
}

impl DetectionPattern {
    pub fn new(mut events: Vec<Event>) -> Result<Self> {
        events.sort();
        events.dedup();
        if events.is_empty() || events.len() > 2 {
            return Err(Error::InvalidProtocol(format!(
                "a detection pattern has 1 or 2 distinct events, got {}",
                events.len()
            )));
        }
        Ok(DetectionPattern { events })
    }

    pub fn single(id: DetectorId) -> Self {
        DetectionPattern {
            events: vec![(id, None)],
        }
    }

    /// D1 and D2 both click, no time information.
    pub fn coincidence() -> Self {
        DetectionPattern {
            events: vec![(DetectorId::D1, None), (DetectorId::D2, None)],
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn has_time_labels(&self) -> bool {
        self.events.iter().any(|e| e.1.is_some())
    }

    /// Every pattern with one or two events over the given time labels.
    pub fn all(time_resolved: bool) -> Vec<DetectionPattern> {
        let labels: Vec<Option<TimeBin>> = if time_resolved {
            vec![Some(TimeBin::T1), Some(TimeBin::T2)]
        } else {
            vec![None]
        };
        let mut events = Vec::new();
        for d in [DetectorId::D1, DetectorId::D2] {
            for &t in &labels {
                events.push((d, t));
            }
        }
        let mut out = Vec::new();
        for i in 0..events.len() {
            out.push(DetectionPattern {
                events: vec![events[i]],
            });
            for j in i + 1..events.len() {
                out.push(DetectionPattern {
                    events: vec![events[i], events[j]],
                });
            }
        }
        out
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.events.iter().map(event_string).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for DetectionPattern {
    type Err = Error;

    /// Parses `D1`, `D1+D2`, `D1@t1+D2@t2`, ...
    fn from_str(s: &str) -> Result<Self> {
        let mut events = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (det, time) = match part.split_once('@') {
                Some((d, t)) => {
                    let bin = match t {
                        "t1" | "T1" => TimeBin::T1,
                        "t2" | "T2" => TimeBin::T2,
                        other => {
                            return Err(Error::InvalidProtocol(format!(
                                "unknown time bin `{other}`"
                            )))
                        }
                    };
                    (d, Some(bin))
                }
                None => (part, None),
            };
            events.push((det.parse()?, time));
        }
        DetectionPattern::new(events)
    }
}

/// Set of events that fired in one trial (possibly none).
pub type ClickRecord = BTreeSet<Event>;

fn time_label(channel: Channel, resolves: bool) -> Option<TimeBin> {
    match (resolves, channel) {
        (true, Channel::T1) => Some(TimeBin::T1),
        (true, Channel::T2) => Some(TimeBin::T2),
        _ => None,
    }
}

/// Distribution of click records for one photon configuration.
fn record_probabilities(
    modes: &[Mode],
    photons: &[u8],
    detectors: &[Detector; 2],
) -> Vec<(ClickRecord, f64)> {
    let mut groups: BTreeMap<Event, (u32, f64)> = BTreeMap::new();
    for (m, &n) in modes.iter().zip(photons) {
        if n == 0 {
            continue;
        }
        let det = detectors[match m.port {
            Port::A => 0,
            Port::B => 1,
        }];
        let key = (det.id, time_label(m.channel, det.resolves_time));
        let slot = groups.entry(key).or_insert((0, det.efficiency));
        slot.0 += n as u32;
    }
    let groups: Vec<(Event, f64)> = groups
        .into_iter()
        .map(|(e, (n, eta))| (e, 1.0 - (1.0 - eta).powi(n as i32)))
        .collect();
    let mut out = Vec::with_capacity(1 << groups.len());
    for mask in 0u32..(1 << groups.len()) {
        let mut p = 1.0;
        let mut record = ClickRecord::new();
        for (i, (e, click)) in groups.iter().enumerate() {
            if mask & (1 << i) != 0 {
                p *= click;
                record.insert(*e);
            } else {
                p *= 1.0 - click;
            }
        }
        if p > 0.0 {
            out.push((record, p));
        }
    }
    out
}

/// Probability of every click record for a post-beamsplitter state.
pub fn click_distribution(s: &PureState, detectors: &[Detector; 2]) -> BTreeMap<ClickRecord, f64> {
    let mut out = BTreeMap::new();
    let total = s.norm_sqr();
    for (photons, costate) in s.atomic_costates() {
        let w = costate.norm_sqr() / total;
        for (record, p) in record_probabilities(s.modes(), &photons, detectors) {
            *out.entry(record).or_insert(0.0) += w * p;
        }
    }
    out
}

/// Unnormalized atomic co-states compatible with `pattern`, each with the
/// probability that its photon configuration produces exactly that pattern.
fn heralded_components(
    s: &PureState,
    detectors: &[Detector; 2],
    pattern: &DetectionPattern,
) -> Vec<(f64, PureState)> {
    let want: ClickRecord = pattern.events.iter().copied().collect();
    let mut out = Vec::new();
    for (photons, costate) in s.atomic_costates() {
        let p: f64 = record_probabilities(s.modes(), &photons, detectors)
            .into_iter()
            .filter(|(r, _)| *r == want)
            .map(|(_, p)| p)
            .sum();
        if p > 0.0 {
            out.push((p, costate));
        }
    }
    out
}

/// Result of conditioning on a detection pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldOutcome {
    /// Normalized heralded state. For a mixed outcome, the principal
    /// eigenvector of the heralded density matrix. Global phase is arbitrary.
    pub atomic_state: PureState,
    pub probability: f64,
    pub pattern: DetectionPattern,
    /// `Tr ρ²` of the heralded atomic state (1 when pure).
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeraldRecord {
    pub protocol: String,
    pub pattern: String,
    pub probability: f64,
    pub atomic_state: Vec<(String, f64, f64)>,
}

impl HeraldOutcome {
    pub fn to_record(&self, protocol: &str) -> HeraldRecord {
        HeraldRecord {
            protocol: protocol.to_string(),
            pattern: self.pattern.to_string(),
            probability: self.probability,
            atomic_state: self
                .atomic_state
                .terms()
                .map(|(l, a)| (self.atomic_state.label_string(l), a.re, a.im))
                .collect(),
        }
    }
}

/// Collapses heralded components into a single outcome.
fn summarize(
    components: &[(f64, PureState)],
    atom_count: usize,
    pattern: &DetectionPattern,
) -> Result<HeraldOutcome> {
    let probability: f64 = components.iter().map(|(p, v)| p * v.norm_sqr()).sum();
    if probability == 0.0 {
        return Ok(HeraldOutcome {
            atomic_state: PureState::empty(atom_count, Vec::new()),
            probability: 0.0,
            pattern: pattern.clone(),
            purity: 0.0,
        });
    }
    // density matrix over the atomic labels that occur
    let labels: Vec<BasisLabel> = components
        .iter()
        .flat_map(|(_, v)| v.terms().map(|(l, _)| l.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let d = labels.len();
    let mut rho = DMatrix::<Amplitude>::zeros(d, d);
    for (p, v) in components {
        let col: Vec<Amplitude> = labels.iter().map(|l| v.amplitude(l)).collect();
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] += col[i] * col[j].conj() * (*p / probability);
            }
        }
    }
    let purity = (&rho * &rho).trace().re;
    let dominant = components
        .iter()
        .max_by(|x, y| (x.0 * x.1.norm_sqr()).total_cmp(&(y.0 * y.1.norm_sqr())))
        .map(|(_, v)| v.clone())
        .unwrap();
    let atomic_state = if (1.0 - purity).abs() < PURE_TOL * 1e3 {
        dominant.normalized()?
    } else {
        let eig = SymmetricEigen::new(rho);
        let k = eig.eigenvalues.imax();
        let vec = eig.eigenvectors.column(k);
        PureState::from_terms(
            atom_count,
            Vec::new(),
            labels.iter().cloned().zip(vec.iter().copied()),
        )?
        .normalized()?
    };
    Ok(HeraldOutcome {
        atomic_state,
        probability,
        pattern: pattern.clone(),
        purity: purity.min(1.0),
    })
}

/// Distances and splittings that set interferometric phases.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PathGeometry {
    /// Wavevector mismatch Δk (1/m).
    pub delta_k: f64,
    /// Path-length difference Δx (m).
    pub delta_x: f64,
    /// Qubit frequency splitting Δω (rad/s).
    pub delta_omega: f64,
}

impl PathGeometry {
    /// Type I interferometer phase `Δk·Δx`.
    pub fn type1_phase(&self) -> f64 {
        self.delta_k * self.delta_x
    }
}

/// `e^{iΔω·Δx/c}`.
pub fn path_offset_phase(geom: &PathGeometry) -> Amplitude {
    Amplitude::from_polar(1.0, geom.delta_omega * geom.delta_x / SPEED_OF_LIGHT)
}

/// How the two-emitter terms of a type I herald are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Treatment {
    /// Drop every term with two emitted photons (first order in p_e).
    #[default]
    Truncated,
    /// Keep all terms and model threshold detectors with efficiency η_det.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Type1Outcome {
    pub outcome: HeraldOutcome,
    /// Fidelity with the ideal Bell state for this detector.
    pub fidelity: f64,
    pub treatment: Treatment,
}

/// Ideal type I target `(|↑↓⟩ ± e^{iφ}|↓↑⟩)/√2`, + for D1 and − for D2.
pub fn type1_target(phi: f64, which: DetectorId) -> PureState {
    let sign = match which {
        DetectorId::D1 => 1.0,
        DetectorId::D2 => -1.0,
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = PureState::empty(2, Vec::new());
    s.add_term(&[Level::Up, Level::Down], &[], Amplitude::new(h, 0.0));
    s.add_term(
        &[Level::Down, Level::Up],
        &[],
        Amplitude::from_polar(sign * h, phi),
    );
    s
}

/// Both number-qubit pairs, with the type I phase on the port-A photon.
fn type1_input(p_e: f64, phi: f64) -> Result<PureState> {
    let a = make_number_pair(p_e, Port::A)?;
    let b = make_number_pair(p_e, Port::B)?;
    let joint = tensor(&a, &b)?;
    let ia = joint.mode_index(Mode::new(Port::A, Channel::None)).unwrap();
    Ok(joint.map_amplitudes(|l| Amplitude::from_polar(1.0, phi * l.photons[ia] as f64)))
}

/// Type I heralded entanglement from one detector click.
///
/// The truncated treatment reports probability `p_e·η_det` per detector (so
/// both detectors together give `2·p_e·η_det`) and fidelity `1 − p_e`. The
/// exact treatment computes both from threshold detection of the full state.
pub fn type1_herald(
    p_e: f64,
    geom: &PathGeometry,
    eta_det: f64,
    which: DetectorId,
    treatment: Treatment,
) -> Result<Type1Outcome> {
    check_probability("p_e", p_e)?;
    check_probability("eta_det", eta_det)?;
    if p_e > 0.2 {
        log::warn!("p_e = {p_e} is outside the weak-excitation regime");
    }
    let phi = geom.type1_phase();
    let pattern = DetectionPattern::single(which);
    let target = type1_target(phi, which);
    let mut input = type1_input(p_e, phi)?;
    if treatment == Treatment::Truncated {
        input = input.filtered(|l| l.photon_total() < 2);
    }
    let out = beamsplitter(&input)?;
    let detectors = [
        Detector {
            id: DetectorId::D1,
            efficiency: eta_det,
            resolves_time: false,
        },
        Detector {
            id: DetectorId::D2,
            efficiency: eta_det,
            resolves_time: false,
        },
    ];
    let components = heralded_components(&out, &detectors, &pattern);
    let mut outcome = summarize(&components, 2, &pattern)?;
    if outcome.probability == 0.0 {
        return Ok(Type1Outcome {
            outcome,
            fidelity: 0.0,
            treatment,
        });
    }
    let fidelity = match treatment {
        Treatment::Truncated => {
            outcome.probability = p_e * eta_det;
            1.0 - p_e
        }
        Treatment::Exact => {
            let mut num = 0.0;
            for (p, v) in &components {
                num += p * v.inner(&target)?.norm_sqr();
            }
            num / outcome.probability
        }
    };
    Ok(Type1Outcome {
        outcome,
        fidelity,
        treatment,
    })
}

/// Type I success probability `P_I = 2·P_ap·η_det`.
pub fn type1_success(p_ap: f64, eta_det: f64) -> Result<f64> {
    check_probability("P_ap", p_ap)?;
    check_probability("eta_det", eta_det)?;
    Ok(2.0 * p_ap * eta_det)
}

/// Recoil-limited type I fidelity `1 − 4η²(n̄ + ½)`, clamped to [0, 1].
pub fn type1_recoil_fidelity(eta: f64, nbar: f64) -> Result<f64> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::range("eta", eta, "must be non-negative"));
    }
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::range("nbar", nbar, "must be non-negative"));
    }
    if eta * eta * nbar > 0.1 {
        log::warn!(
            "eta^2 nbar = {} is outside the Lamb-Dicke regime",
            eta * eta * nbar
        );
    }
    Ok((1.0 - 4.0 * eta * eta * (nbar + 0.5)).clamp(0.0, 1.0))
}

/// One atomic qubit `α|↑⟩ + β|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    pub alpha: Amplitude,
    pub beta: Amplitude,
}

impl Qubit {
    pub fn new(alpha: Amplitude, beta: Amplitude) -> Self {
        Qubit { alpha, beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];
}

/// One term of the Bell-basis expansion of a two-pair state.
#[derive(Debug, Clone, PartialEq)]
pub struct BellComponent {
    pub bell: BellState,
    /// Normalized photonic Bell state (no atoms).
    pub photonic: PureState,
    /// Attached atomic co-state, unnormalized.
    pub costate: PureState,
}

/// Photonic logical states `(|P_↑⟩, |P_↓⟩)` as occupations of the kind's two channels.
fn logical_photons(kind: QubitKind) -> Result<([u8; 2], [u8; 2])> {
    match kind {
        QubitKind::Polarization | QubitKind::Frequency => Ok(([1, 0], [0, 1])),
        QubitKind::Timebin => Ok(([0, 1], [1, 0])),
        QubitKind::Number => Err(Error::InvalidProtocol(
            "number qubits have no two-photon Bell basis".into(),
        )),
    }
}

fn two_pair_modes(kind: QubitKind) -> Vec<Mode> {
    let mut modes = kind.modes(Port::A);
    modes.extend(kind.modes(Port::B));
    modes
}

/// Photonic Bell state on ports A and B for the given encoding.
pub fn photonic_bell(kind: QubitKind, bell: BellState) -> Result<PureState> {
    let (up, down) = logical_photons(kind)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cat = |a: [u8; 2], b: [u8; 2]| [a[0], a[1], b[0], b[1]];
    let (first, second, sign) = match bell {
        BellState::PhiPlus => (cat(up, up), cat(down, down), 1.0),
        BellState::PhiMinus => (cat(up, up), cat(down, down), -1.0),
        BellState::PsiPlus => (cat(up, down), cat(down, up), 1.0),
        BellState::PsiMinus => (cat(up, down), cat(down, up), -1.0),
    };
    let mut s = PureState::empty(0, two_pair_modes(kind));
    s.add_term(&[], &first, Amplitude::new(h, 0.0));
    s.add_term(&[], &second, Amplitude::new(sign * h, 0.0));
    Ok(s)
}

/// Expands a two-atom, two-photon state in the photonic Bell basis.
///
/// The input must have two atoms and the kind's four modes (A then B), with
/// exactly one photon per port in every term.
pub fn bell_decompose(s: &PureState, kind: QubitKind) -> Result<Vec<BellComponent>> {
    let modes = two_pair_modes(kind);
    if s.atom_count() != 2 || s.modes() != modes.as_slice() {
        return Err(Error::UnsupportedState(format!(
            "expected 2 atoms on modes {:?}, got {} atoms on {:?}",
            modes,
            s.atom_count(),
            s.modes()
        )));
    }
    for (label, _) in s.terms() {
        let p = &label.photons;
        if p[0] + p[1] != 1 || p[2] + p[3] != 1 {
            return Err(Error::UnsupportedState(format!(
                "term {} is not one photon per port",
                s.label_string(label)
            )));
        }
    }
    let mut out = Vec::with_capacity(4);
    for bell in BellState::ALL {
        let photonic = photonic_bell(kind, bell)?;
        let mut costate = PureState::empty(2, Vec::new());
        for (label, amp) in s.terms() {
            let b = photonic.amplitude_of(&[], &label.photons);
            costate.add_term(&label.atoms, &[], b.conj() * amp);
        }
        out.push(BellComponent {
            bell,
            photonic,
            costate,
        });
    }
    Ok(out)
}

/// Joint pre-beamsplitter state of two atom–photon pairs, atom A emitting
/// into port A. `offset` multiplies every term with atom B in `|↓⟩`.
pub fn two_pair_state(a: Qubit, b: Qubit, kind: QubitKind, offset: Amplitude) -> Result<PureState> {
    let make = |q: Qubit, port: Port| match kind {
        QubitKind::Frequency => make_frequency_pair(q.alpha, q.beta, port),
        QubitKind::Timebin => make_timebin_pair(q.alpha, q.beta, port),
        QubitKind::Polarization => {
            // phases are not representable through branch probabilities
            let s = make_polarization_pair(q.alpha.norm_sqr(), q.beta.norm_sqr(), port)?;
            Ok(s.map_amplitudes(|l| {
                let x = if l.atoms[0] == Level::Up {
                    q.alpha
                } else {
                    q.beta
                };
                if x.norm() == 0.0 {
                    Amplitude::new(1.0, 0.0)
                } else {
                    x / x.norm()
                }
            }))
        }
        QubitKind::Number => Err(Error::InvalidProtocol(
            "type II heralding needs two-channel qubits".into(),
        )),
    };
    let joint = tensor(&make(a, Port::A)?, &make(b, Port::B)?)?;
    Ok(joint.map_amplitudes(|l| {
        if l.atoms[1] == Level::Down {
            offset
        } else {
            Amplitude::new(1.0, 0.0)
        }
    }))
}

fn check_pattern_for(kind: QubitKind, pattern: &DetectionPattern) -> Result<()> {
    match kind {
        QubitKind::Timebin => {
            if pattern.events().iter().any(|e| e.1.is_none()) {
                return Err(Error::InvalidProtocol(
                    "time-bin heralds need a time label on every event".into(),
                ));
            }
        }
        QubitKind::Frequency | QubitKind::Polarization => {
            if pattern.has_time_labels() {
                return Err(Error::InvalidProtocol(format!(
                    "{kind} heralds carry no time labels (pattern {pattern})"
                )));
            }
        }
        QubitKind::Number => {
            return Err(Error::InvalidProtocol(
                "type II heralding needs two-channel qubits".into(),
            ))
        }
    }
    Ok(())
}

/// Sends a pre-beamsplitter two-pair state through the beamsplitter and
/// conditions on `pattern` with ideal detectors.
pub fn herald_two_photon(
    s: &PureState,
    kind: QubitKind,
    pattern: &DetectionPattern,
) -> Result<HeraldOutcome> {
    check_pattern_for(kind, pattern)?;
    let resolves = kind == QubitKind::Timebin;
    let detectors = [
        Detector::ideal(DetectorId::D1, resolves),
        Detector::ideal(DetectorId::D2, resolves),
    ];
    let out = beamsplitter(&s.normalized()?)?;
    let components = heralded_components(&out, &detectors, pattern);
    summarize(&components, s.atom_count(), pattern)
}

/// Type II heralded gate on two atomic qubits.
///
/// Frequency (or polarization) qubits with a D1·D2 coincidence herald
/// `(α_Aβ_B|↑↓⟩ − β_Aα_B|↓↑⟩)/N`. Time-bin qubits herald the photonic ψ⁻
/// co-state for clicks on different detectors at t1 and t2, and the ψ⁺
/// co-state for the same detector at both times.
pub fn type2_herald(
    a: Qubit,
    b: Qubit,
    kind: QubitKind,
    pattern: &DetectionPattern,
    geom: Option<&PathGeometry>,
) -> Result<HeraldOutcome> {
    check_pattern_for(kind, pattern)?;
    let offset = geom.map_or(Amplitude::new(1.0, 0.0), path_offset_phase);
    let s = two_pair_state(a, b, kind, offset)?;
    herald_two_photon(&s, kind, pattern)
}

/// `½ Z_A (I − Z_A Z_B)` in the basis ↑↑, ↑↓, ↓↑, ↓↓.
pub fn heralded_gate_matrix() -> [[f64; 4]; 4] {
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ]
}

/// Bell-measurement success fraction with no default for polarization.
pub fn default_p_b(kind: QubitKind) -> Option<f64> {
    match kind {
        QubitKind::Frequency => Some(0.25),
        QubitKind::Timebin => Some(0.5),
        QubitKind::Polarization | QubitKind::Number => None,
    }
}

/// Type II success probability `p_B·(P_ap·η_det)²`.
pub fn type2_success(p_ap: f64, eta_det: f64, p_b: f64) -> Result<f64> {
    check_probability("P_ap", p_ap)?;
    check_probability("eta_det", eta_det)?;
    check_probability("p_B", p_b)?;
    Ok(p_b * (p_ap * eta_det).powi(2))
}
