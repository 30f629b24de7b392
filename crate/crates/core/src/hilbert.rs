//! Sparse complex-amplitude states over hybrid atom ⊗ photon-mode bases.
//!
//! A [`PureState`] owns an ordered list of photon [`Mode`]s and a fixed number
//! of two-level atoms. Every [`BasisLabel`] stores one level per atom and one
//! occupation number per mode, in the state's mode order. Labels absent from
//! the map have amplitude zero. Global phase is kept as-is.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Absolute tolerance used when comparing amplitudes and norms.
pub const AMPLITUDE_TOL: f64 = 1e-12;

/// Spatial mode, i.e. which side of the beamsplitter a photon travels in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Port {
    A,
    B,
}

impl Port {
    pub fn other(self) -> Port {
        match self {
            Port::A => Port::B,
            Port::B => Port::A,
        }
    }
}

/// Internal photon degree of freedom carried alongside the spatial port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Number qubits: a single unlabeled mode.
    None,
    H,
    V,
    Red,
    Blue,
    T1,
    T2,
}

impl Channel {
    fn tag(self) -> &'static str {
        match self {
            Channel::None => "",
            Channel::H => "H",
            Channel::V => "V",
            Channel::Red => "r",
            Channel::Blue => "b",
            Channel::T1 => "t1",
            Channel::T2 => "t2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub port: Port,
    pub channel: Channel,
}

impl Mode {
    pub const fn new(port: Port, channel: Channel) -> Self {
        Mode { port, channel }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.channel {
            Channel::None => write!(f, "{:?}", self.port),
            c => write!(f, "{:?}.{}", self.port, c.tag()),
        }
    }
}

/// Atomic qubit level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Up,
    Down,
}

impl Level {
    fn symbol(self) -> char {
        match self {
            Level::Up => 'u',
            Level::Down => 'd',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    pub atoms: Vec<Level>,
    pub photons: Vec<u8>,
}

impl BasisLabel {
    pub fn new(atoms: Vec<Level>, photons: Vec<u8>) -> Self {
        BasisLabel { atoms, photons }
    }

    pub fn photon_total(&self) -> u32 {
        self.photons.iter().map(|&n| n as u32).sum()
    }
}

/// Read-only view of one label's photon occupations.
#[derive(Debug, Clone, Copy)]
pub struct Photons<'a> {
    modes: &'a [Mode],
    counts: &'a [u8],
}

impl<'a> Photons<'a> {
    pub fn count(&self, mode: Mode) -> u8 {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .map_or(0, |i| self.counts[i])
    }

    pub fn port_total(&self, port: Port) -> u32 {
        self.modes
            .iter()
            .zip(self.counts)
            .filter(|(m, _)| m.port == port)
            .map(|(_, &n)| n as u32)
            .sum()
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().map(|&n| n as u32).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Mode, u8)> + 'a {
        self.modes.iter().copied().zip(self.counts.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    atom_count: usize,
    modes: Vec<Mode>,
    terms: BTreeMap<BasisLabel, Amplitude>,
}

impl PureState {
    /// The zero vector on the given basis.
    pub fn empty(atom_count: usize, modes: Vec<Mode>) -> Self {
        PureState {
            atom_count,
            modes,
            terms: BTreeMap::new(),
        }
    }

    /// Unit-amplitude basis ket.
    pub fn ket(atoms: &[Level], modes: Vec<Mode>, photons: &[u8]) -> Self {
        assert_eq!(modes.len(), photons.len(), "one occupation per mode");
        let mut s = PureState::empty(atoms.len(), modes);
        s.add_term(atoms, photons, Amplitude::new(1.0, 0.0));
        s
    }

    /// Builds a state from explicit terms; duplicate labels are summed.
    pub fn from_terms<I>(atom_count: usize, modes: Vec<Mode>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisLabel, Amplitude)>,
    {
        let mut s = PureState::empty(atom_count, modes);
        for (label, amp) in terms {
            if label.atoms.len() != atom_count || label.photons.len() != s.modes.len() {
                return Err(Error::BasisMismatch(format!(
                    "label has {} atoms / {} modes, state has {} / {}",
                    label.atoms.len(),
                    label.photons.len(),
                    atom_count,
                    s.modes.len()
                )));
            }
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(Error::UnsupportedState("non-finite amplitude".into()));
            }
            s.accumulate(label, amp);
        }
        Ok(s)
    }

    /// Adds `amp` to the amplitude of the given label.
    pub fn add_term(&mut self, atoms: &[Level], photons: &[u8], amp: Amplitude) {
        assert_eq!(atoms.len(), self.atom_count, "atom count mismatch");
        assert_eq!(photons.len(), self.modes.len(), "mode count mismatch");
        self.accumulate(BasisLabel::new(atoms.to_vec(), photons.to_vec()), amp);
    }

    fn accumulate(&mut self, label: BasisLabel, amp: Amplitude) {
        match self.terms.entry(label) {
            Entry::Vacant(v) => {
                if amp.norm_sqr() != 0.0 {
                    v.insert(amp);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += amp;
                // exact cancellation: keep the map sparse
                if o.get().norm_sqr() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode_index(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Amplitude)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Amplitude {
        self.terms
            .get(label)
            .copied()
            .unwrap_or(Amplitude::new(0.0, 0.0))
    }

    /// Amplitude of the label given as levels and occupations.
    pub fn amplitude_of(&self, atoms: &[Level], photons: &[u8]) -> Amplitude {
        self.amplitude(&BasisLabel::new(atoms.to_vec(), photons.to_vec()))
    }

    pub fn photons<'a>(&'a self, label: &'a BasisLabel) -> Photons<'a> {
        Photons {
            modes: &self.modes,
            counts: &label.photons,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Amplitude::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Amplitude) -> Self {
        let mut s = PureState::empty(self.atom_count, self.modes.clone());
        for (label, amp) in &self.terms {
            s.accumulate(label.clone(), amp * c);
        }
        s
    }

    /// Multiplies each amplitude by `phase(label)`.
    pub fn map_amplitudes<F>(&self, phase: F) -> Self
    where
        F: Fn(&BasisLabel) -> Amplitude,
    {
        let mut s = PureState::empty(self.atom_count, self.modes.clone());
        for (label, amp) in &self.terms {
            s.accumulate(label.clone(), amp * phase(label));
        }
        s
    }

    pub fn same_basis(&self, other: &PureState) -> bool {
        self.atom_count == other.atom_count && self.modes == other.modes
    }

    fn require_same_basis(&self, other: &PureState) -> Result<()> {
        if self.same_basis(other) {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "{} atoms {:?} vs {} atoms {:?}",
                self.atom_count, self.modes, other.atom_count, other.modes
            )))
        }
    }

    /// Vector sum on a shared basis.
    pub fn plus(&self, other: &PureState) -> Result<Self> {
        self.require_same_basis(other)?;
        let mut s = self.clone();
        for (label, amp) in &other.terms {
            s.accumulate(label.clone(), *amp);
        }
        Ok(s)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Amplitude> {
        self.require_same_basis(other)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(label, a)| other.terms.get(label).map(|b| a.conj() * b))
            .sum())
    }

    /// Re-expresses the state on `modes`, a superset of the current mode list.
    /// Added modes carry zero photons.
    pub fn extend_modes(&self, modes: &[Mode]) -> Result<Self> {
        let index: Vec<Option<usize>> = modes.iter().map(|&m| self.mode_index(m)).collect();
        for &m in &self.modes {
            if !modes.contains(&m) {
                return Err(Error::BasisMismatch(format!(
                    "mode {m} missing from target list"
                )));
            }
        }
        let mut s = PureState::empty(self.atom_count, modes.to_vec());
        for (label, amp) in &self.terms {
            let photons = index
                .iter()
                .map(|i| i.map_or(0, |i| label.photons[i]))
                .collect();
            s.accumulate(BasisLabel::new(label.atoms.clone(), photons), *amp);
        }
        Ok(s)
    }

    /// Keeps only labels for which `keep` holds (no renormalization).
    pub fn filtered<F>(&self, keep: F) -> Self
    where
        F: Fn(&BasisLabel) -> bool,
    {
        PureState {
            atom_count: self.atom_count,
            modes: self.modes.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(l, _)| keep(l))
                .map(|(l, a)| (l.clone(), *a))
                .collect(),
        }
    }

    /// Groups the state by photon configuration. Each value is the
    /// (unnormalized) atomic co-state attached to that configuration.
    pub fn atomic_costates(&self) -> BTreeMap<Vec<u8>, PureState> {
        let mut out: BTreeMap<Vec<u8>, PureState> = BTreeMap::new();
        for (label, amp) in &self.terms {
            out.entry(label.photons.clone())
                .or_insert_with(|| PureState::empty(self.atom_count, Vec::new()))
                .accumulate(BasisLabel::new(label.atoms.clone(), Vec::new()), *amp);
        }
        out
    }

    /// Human-readable label, e.g. `ud` or `ud|A=0,B=1`.
    pub fn label_string(&self, label: &BasisLabel) -> String {
        let mut s: String = label.atoms.iter().map(|l| l.symbol()).collect();
        if !self.modes.is_empty() {
            s.push('|');
            let parts: Vec<String> = self
                .modes
                .iter()
                .zip(&label.photons)
                .map(|(m, n)| format!("{m}={n}"))
                .collect();
            s.push_str(&parts.join(","));
        }
        s
    }
}

/// Tensor product `a ⊗ b`: atoms of `b` follow those of `a`, same for modes.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    if let Some(m) = a.modes.iter().find(|m| b.modes.contains(m)) {
        return Err(Error::OverlappingModes(m.to_string()));
    }
    let mut modes = a.modes.clone();
    modes.extend_from_slice(&b.modes);
    let mut out = PureState::empty(a.atom_count + b.atom_count, modes);
    for (la, xa) in &a.terms {
        for (lb, xb) in &b.terms {
            let mut atoms = la.atoms.clone();
            atoms.extend_from_slice(&lb.atoms);
            let mut photons = la.photons.clone();
            photons.extend_from_slice(&lb.photons);
            out.accumulate(BasisLabel::new(atoms, photons), xa * xb);
        }
    }
    Ok(out)
}

/// Projective measurement on photon occupations.
///
/// Returns the renormalized post-measurement state and the probability of the
/// outcome. A zero-probability outcome yields an empty state and 0.
pub fn project<F>(s: &PureState, predicate: F) -> (PureState, f64)
where
    F: Fn(&Photons) -> bool,
{
    let total = s.norm_sqr();
    let kept = s.filtered(|label| predicate(&s.photons(label)));
    let p = kept.norm_sqr();
    if p == 0.0 || total == 0.0 {
        return (PureState::empty(s.atom_count, s.modes.clone()), 0.0);
    }
    let state = kept.scaled(Amplitude::new(1.0 / p.sqrt(), 0.0));
    (state, p / total)
}

/// `|⟨a|b⟩|²` for normalized states on the same basis.
///
/// The overlap is divided by both norms, so nearly-normalized inputs still
/// land in [0, 1].
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = a.inner(b)?;
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((overlap.norm_sqr() / (na * nb)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A0: Mode = Mode::new(Port::A, Channel::None);
    const B0: Mode = Mode::new(Port::B, Channel::None);

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    fn atom_ket(levels: &[Level]) -> PureState {
        PureState::ket(levels, vec![], &[])
    }

    #[test]
    fn tensor_of_unit_kets() {
        let up = atom_ket(&[Level::Up]);
        let one = PureState::ket(&[], vec![A0], &[1]);
        let t = tensor(&up, &one).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.amplitude_of(&[Level::Up], &[1]), c(1.0));
    }

    #[test]
    fn tensor_of_number_pairs_keeps_order_p_term() {
        let p: f64 = 0.03;
        let pair = |mode| {
            let mut s = PureState::empty(1, vec![mode]);
            s.add_term(&[Level::Up], &[0], c((1.0 - p).sqrt()));
            s.add_term(&[Level::Down], &[1], c(p.sqrt()));
            s
        };
        let t = tensor(&pair(A0), &pair(B0)).unwrap();
        assert_eq!(t.len(), 4);
        let dd = t.amplitude_of(&[Level::Down, Level::Down], &[1, 1]);
        assert!((dd - c(p)).norm() < AMPLITUDE_TOL);
    }

    #[test]
    fn tensor_with_zero_state_is_zero() {
        let zero = PureState::empty(1, vec![A0]);
        let other = PureState::ket(&[Level::Up], vec![B0], &[0]);
        assert!(tensor(&zero, &other).unwrap().is_empty());
    }

    #[test]
    fn tensor_rejects_shared_mode() {
        let a = PureState::ket(&[], vec![A0], &[1]);
        assert!(matches!(tensor(&a, &a), Err(Error::OverlappingModes(_))));
    }

    #[test]
    fn project_single_photon_in_a() {
        let mut s = PureState::empty(0, vec![A0, B0]);
        s.add_term(&[], &[0, 1], c(1.0 / 2f64.sqrt()));
        s.add_term(&[], &[1, 0], c(1.0 / 2f64.sqrt()));
        let (post, p) = project(&s, |ph| ph.count(A0) == 1);
        assert!((p - 0.5).abs() < AMPLITUDE_TOL);
        assert!((post.amplitude_of(&[], &[1, 0]) - c(1.0)).norm() < AMPLITUDE_TOL);
        let (same, p_all) = project(&s, |_| true);
        assert!((p_all - 1.0).abs() < AMPLITUDE_TOL);
        assert!((fidelity(&same, &s).unwrap() - 1.0).abs() < AMPLITUDE_TOL);
    }

    #[test]
    fn project_onto_impossible_outcome() {
        // two-photon bunching output: no label with one photon per port
        let mut s = PureState::empty(0, vec![A0, B0]);
        s.add_term(&[], &[0, 2], c(-1.0 / 2f64.sqrt()));
        s.add_term(&[], &[2, 0], c(1.0 / 2f64.sqrt()));
        let (post, p) = project(&s, |ph| ph.count(A0) == 1 && ph.count(B0) == 1);
        assert_eq!(p, 0.0);
        assert!(post.is_empty());
    }

    #[test]
    fn fidelity_examples() {
        let ud = atom_ket(&[Level::Up, Level::Down]);
        let du = atom_ket(&[Level::Down, Level::Up]);
        assert!((fidelity(&ud, &ud).unwrap() - 1.0).abs() < AMPLITUDE_TOL);
        assert!(fidelity(&ud, &du).unwrap().abs() < AMPLITUDE_TOL);
        let singlet = ud.plus(&du.scaled(c(-1.0))).unwrap().normalized().unwrap();
        assert!((fidelity(&singlet, &ud).unwrap() - 0.5).abs() < AMPLITUDE_TOL);
    }

    #[test]
    fn fidelity_rejects_mismatched_basis() {
        let a = atom_ket(&[Level::Up]);
        let b = atom_ket(&[Level::Up, Level::Up]);
        assert!(matches!(fidelity(&a, &b), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn normalize_zero_state_fails() {
        assert_eq!(
            PureState::empty(1, vec![]).normalized(),
            Err(Error::ZeroNorm)
        );
    }

    #[test]
    fn exact_cancellation_removes_label() {
        let mut s = PureState::empty(0, vec![A0]);
        s.add_term(&[], &[1], c(0.5));
        s.add_term(&[], &[1], c(-0.5));
        assert!(s.is_empty());
    }

    #[test]
    fn label_formatting() {
        let s = PureState::ket(
            &[Level::Up, Level::Down],
            vec![A0, Mode::new(Port::B, Channel::Red)],
            &[0, 1],
        );
        let (label, _) = s.terms().next().unwrap();
        assert_eq!(s.label_string(label), "ud|A=0,B.r=1");
    }

    fn arb_state(atoms: usize, modes: Vec<Mode>) -> impl Strategy<Value = PureState> {
        let nm = modes.len();
        prop::collection::vec(
            (
                prop::collection::vec(any::<bool>(), atoms),
                prop::collection::vec(0u8..3, nm),
                -1.0f64..1.0,
                -1.0f64..1.0,
            ),
            1..8,
        )
        .prop_map(move |raw| {
            let mut s = PureState::empty(atoms, modes.clone());
            for (lv, ph, re, im) in raw {
                let levels: Vec<Level> = lv
                    .into_iter()
                    .map(|b| if b { Level::Up } else { Level::Down })
                    .collect();
                s.add_term(&levels, &ph, Amplitude::new(re, im));
            }
            s
        })
        .prop_filter("non-zero", |s| s.norm() > 1e-3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn normalize_is_idempotent(s in arb_state(2, vec![A0, B0])) {
            let once = s.normalized().unwrap();
            let twice = once.normalized().unwrap();
            prop_assert!((once.norm() - 1.0).abs() < AMPLITUDE_TOL);
            for (l, a) in once.terms() {
                prop_assert!((twice.amplitude(l) - a).norm() < AMPLITUDE_TOL);
            }
        }

        #[test]
        fn tensor_norm_is_multiplicative(a in arb_state(1, vec![A0]), b in arb_state(1, vec![B0])) {
            let t = tensor(&a, &b).unwrap();
            prop_assert!((t.norm() - a.norm() * b.norm()).abs() < 1e-12 * (1.0 + t.norm()));
        }

        #[test]
        fn complete_projections_sum_to_one(s in arb_state(1, vec![A0, B0])) {
            let s = s.normalized().unwrap();
            // disjoint family: total photon number 0..=4
            let total: f64 = (0..=4u32)
                .map(|n| project(&s, |ph| ph.total() == n).1)
                .sum();
            prop_assert!((total - 1.0).abs() < AMPLITUDE_TOL);
        }
    }
}
