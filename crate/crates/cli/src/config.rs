//! Run configuration: flat `key = value` files merged with command-line flags,
//! plus per-command key tables and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Herald,
    Pattern,
    Collect,
    Cavity,
    Estimate,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Herald,
        Command::Pattern,
        Command::Collect,
        Command::Cavity,
        Command::Estimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Herald => "herald",
            Command::Pattern => "pattern",
            Command::Collect => "collect",
            Command::Cavity => "cavity",
            Command::Estimate => "estimate",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Herald => "Heralded atomic state for a type I or type II protocol (JSON)",
            Command::Pattern => "Ion-crystal radiation pattern over a full turn (CSV)",
            Command::Collect => "Parabolic-mirror fiber coupling scan (CSV)",
            Command::Cavity => "Cavity collection efficiency (JSON)",
            Command::Estimate => "Network time-resource estimates (JSON)",
        }
    }

    pub fn keys(self) -> &'static [KeySpec] {
        match self {
            Command::Herald => HERALD_KEYS,
            Command::Pattern => PATTERN_KEYS,
            Command::Collect => COLLECT_KEYS,
            Command::Cavity => CAVITY_KEYS,
            Command::Estimate => ESTIMATE_KEYS,
        }
    }

    /// Output formats in order of preference.
    pub fn formats(self) -> &'static [Format] {
        match self {
            Command::Pattern | Command::Collect => &[Format::Csv, Format::Json],
            Command::Herald | Command::Cavity | Command::Estimate => &[Format::Json],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Domain of a parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Finite real number.
    Real,
    /// Real in `[0, 1]`.
    Probability,
    /// Real in `(0, 1]`.
    OpenProbability,
    /// Real in `(0, 1)`.
    Fraction,
    /// Real `> 0`.
    Positive,
    /// Real `≥ 0`.
    NonNegative,
    /// Integer in `[min, max]`.
    Integer { min: u64, max: u64 },
    /// Real `≥ min`.
    AtLeast(f64),
    /// One of a fixed set of words.
    Choice(&'static [&'static str]),
    /// Free text, checked by the command.
    Text,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    pub required: bool,
    pub help: &'static str,
}

const fn key(key: &'static str, kind: Kind, required: bool, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        kind,
        required,
        help,
    }
}

const HERALD_KEYS: &[KeySpec] = &[
    key(
        "protocol",
        Kind::Choice(&["type1", "type2"]),
        true,
        "Herald scheme",
    ),
    key(
        "kind",
        Kind::Choice(&["frequency", "timebin", "polarization"]),
        false,
        "Photonic qubit for type2 [default: frequency]",
    ),
    key(
        "pattern",
        Kind::Text,
        false,
        "Detection pattern for type2, e.g. D1+D2 or D1@t1+D2@t2",
    ),
    key(
        "alpha_a",
        Kind::Real,
        false,
        "Atom A amplitude on |up> [default: 1/sqrt2]",
    ),
    key(
        "beta_a",
        Kind::Real,
        false,
        "Atom A amplitude on |down> [default: 1/sqrt2]",
    ),
    key(
        "alpha_b",
        Kind::Real,
        false,
        "Atom B amplitude on |up> [default: 1/sqrt2]",
    ),
    key(
        "beta_b",
        Kind::Real,
        false,
        "Atom B amplitude on |down> [default: 1/sqrt2]",
    ),
    key(
        "p_e",
        Kind::Probability,
        false,
        "Excitation probability (type1, required there)",
    ),
    key(
        "preset",
        Kind::Text,
        false,
        "Level preset; divides p_e by its branching divisor",
    ),
    key(
        "eta_det",
        Kind::Probability,
        false,
        "Detector efficiency [default: 1]",
    ),
    key(
        "detector",
        Kind::Choice(&["D1", "D2"]),
        false,
        "Clicking detector for type1 [default: D1]",
    ),
    key(
        "treatment",
        Kind::Choice(&["truncated", "exact"]),
        false,
        "Type1 two-photon terms [default: truncated]",
    ),
    key(
        "delta_k",
        Kind::Real,
        false,
        "Wavevector mismatch in 1/m [default: 0]",
    ),
    key(
        "delta_x",
        Kind::Real,
        false,
        "Path-length difference in m [default: 0]",
    ),
    key(
        "delta_omega",
        Kind::Real,
        false,
        "Qubit splitting in rad/s [default: 0]",
    ),
];

const PATTERN_KEYS: &[KeySpec] = &[
    key(
        "n",
        Kind::Integer { min: 1, max: 100 },
        true,
        "Number of ions",
    ),
    key(
        "eta_lambda",
        Kind::Positive,
        true,
        "Length scale in units of the reduced wavelength",
    ),
    key(
        "anisotropy",
        Kind::Positive,
        true,
        "Transverse over axial trap frequency",
    ),
    key(
        "grid",
        Kind::Integer {
            min: 2,
            max: 1 << 20,
        },
        false,
        "Angular samples [default: 2048]",
    ),
    key(
        "theta_in",
        Kind::Real,
        false,
        "Incident angle from the chain axis in rad [default: 0]",
    ),
    key(
        "recoil_scale",
        Kind::Positive,
        false,
        "Doppler-limit recoil scale [default: 1]",
    ),
    key(
        "recoil_over_linewidth",
        Kind::Positive,
        false,
        "Recoil frequency over linewidth",
    ),
    key(
        "mc_samples",
        Kind::Integer {
            min: 0,
            max: 100_000_000,
        },
        false,
        "Monte-Carlo samples per angle; 0 disables [default: 0]",
    ),
];

const COLLECT_KEYS: &[KeySpec] = &[
    key(
        "scan",
        Kind::Choice(&["f-over-w", "radius"]),
        false,
        "Scan variable [default: f-over-w]",
    ),
    key(
        "min",
        Kind::Positive,
        false,
        "Scan start, in units of w [default: 0.05, or 0.5 for radius]",
    ),
    key(
        "max",
        Kind::Positive,
        false,
        "Scan end, in units of w [default: 5]",
    ),
    key(
        "points",
        Kind::Integer {
            min: 2,
            max: 1_000_000,
        },
        false,
        "Scan points [default: 200]",
    ),
    key(
        "spacing",
        Kind::Choice(&["linear", "log"]),
        false,
        "Scan spacing [default: linear]",
    ),
    key(
        "rho_max",
        Kind::Positive,
        false,
        "Mirror radius over w for an f-over-w scan [default: unbounded]",
    ),
    key(
        "polarization",
        Kind::Choice(&["left", "right", "horizontal"]),
        false,
        "Fiber polarization [default: left]",
    ),
    key(
        "m",
        Kind::Choice(&["1", "+1", "-1"]),
        false,
        "Transition, +1 or -1 [default: +1]",
    ),
];

const CAVITY_KEYS: &[KeySpec] = &[
    key("g", Kind::NonNegative, true, "Atom-cavity coupling"),
    key("kappa", Kind::Positive, true, "Cavity field decay rate"),
    key("gamma", Kind::Positive, true, "Free-space emission rate"),
    key("t_l", Kind::Probability, true, "Outcoupling transmission"),
    key(
        "loss_total",
        Kind::Probability,
        true,
        "Total round-trip loss",
    ),
];

const ESTIMATE_KEYS: &[KeySpec] = &[
    key("p", Kind::Fraction, true, "Herald success probability"),
    key(
        "tau_rep_us",
        Kind::Positive,
        false,
        "Attempt period in microseconds [default: 1]",
    ),
    key(
        "epsilon",
        Kind::Fraction,
        false,
        "Cluster failure probability [default: 0.1]",
    ),
    key(
        "n",
        Kind::AtLeast(2.0),
        false,
        "Cluster size [default: 1000]",
    ),
    key(
        "p_e",
        Kind::OpenProbability,
        false,
        "Excitation probability [default: 1]",
    ),
    key(
        "p_c",
        Kind::OpenProbability,
        false,
        "Collection probability [default: 1]",
    ),
    key(
        "p_t",
        Kind::OpenProbability,
        false,
        "Transmission probability [default: 1]",
    ),
    key(
        "eta_det",
        Kind::OpenProbability,
        false,
        "Detector efficiency [default: 1]",
    ),
    key(
        "p_b",
        Kind::OpenProbability,
        false,
        "Bell-measurement fraction [default: 0.5]",
    ),
    key(
        "n_nodes",
        Kind::AtLeast(2.0),
        false,
        "Repeater node count [default: 2]",
    ),
    key(
        "t_detect_us",
        Kind::Positive,
        false,
        "Detection time in microseconds [default: 10]",
    ),
];

/// Keys accepted by every command.
pub const COMMON_KEYS: &[KeySpec] = &[
    key(
        "output",
        Kind::Text,
        false,
        "Output file; defaults to $IONNET_OUTPUT_DIR/<command>.<ext> or stdout",
    ),
    key(
        "format",
        Kind::Choice(&["csv", "json"]),
        false,
        "Output format",
    ),
    key(
        "seed",
        Kind::Integer {
            min: 0,
            max: u64::MAX,
        },
        false,
        "Monte-Carlo seed [default: 0]",
    ),
];

pub const OUTPUT_DIR_ENV: &str = "IONNET_OUTPUT_DIR";

/// `tau-rep-us`, `tau_rep_us` and `--tau-rep-us` all name the same key.
pub fn canonical_key(raw: &str) -> String {
    raw.trim().trim_start_matches("--").replace('-', "_")
}

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        let k = canonical_key(k);
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        let v = v.trim().trim_matches('"').to_string();
        out.insert(k, v);
    }
    Ok(out)
}

pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse_config_text(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    /// File values first, then flags on top.
    pub fn merged(
        command: Command,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
    ) -> Self {
        let mut params = file;
        params.extend(flags);
        RunConfig { command, params }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> f64 {
        self.get(key)
            .and_then(|v| v.parse().ok())
            .unwrap_or(default)
    }

    pub fn f64_opt(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(|v| v.parse().ok())
    }

    pub fn u64_or(&self, key: &str, default: u64) -> u64 {
        self.get(key)
            .and_then(|v| v.parse().ok())
            .unwrap_or(default)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn seed(&self) -> u64 {
        self.u64_or("seed", 0)
    }

    pub fn format(&self) -> Format {
        match self.get("format") {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            _ => self.command.formats()[0],
        }
    }

    /// Explicit `output`, else `<dir>/<command>.<ext>` under the output-dir
    /// variable, else `None` for stdout.
    pub fn output_path(&self, env_dir: Option<&str>) -> Option<PathBuf> {
        if let Some(p) = self.get("output") {
            return Some(PathBuf::from(p));
        }
        env_dir
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(d).join(format!("{}.{}", self.command, self.format().extension())))
    }
}

fn spec_for(command: Command, key: &str) -> Option<&'static KeySpec> {
    command
        .keys()
        .iter()
        .chain(COMMON_KEYS)
        .find(|s| s.key == key)
}

fn check_value(entry: &KeySpec, value: &str) -> Option<String> {
    let k = entry.key;
    let number = || value.trim().parse::<f64>().ok().filter(|x| x.is_finite());
    let range = |reason: &str| Some(format!("`{k}` = {value} is out of range: {reason}"));
    match entry.kind {
        Kind::Text => None,
        Kind::Choice(options) => {
            if options.contains(&value) {
                None
            } else {
                Some(format!(
                    "`{k}` = {value} is not one of: {}",
                    options.join(", ")
                ))
            }
        }
        Kind::Integer { min, max } => match value.trim().parse::<u64>() {
            Err(_) => Some(format!("`{k}` = {value} is not a non-negative integer")),
            Ok(x) if x < min || x > max => range(&format!("must be in [{min}, {max}]")),
            Ok(_) => None,
        },
        _ => {
            let Some(x) = number() else {
                return Some(format!("`{k}` = {value} is not a finite number"));
            };
            match entry.kind {
                Kind::Probability if !(0.0..=1.0).contains(&x) => range("must be in [0, 1]"),
                Kind::OpenProbability if !(x > 0.0 && x <= 1.0) => range("must be in (0, 1]"),
                Kind::Fraction if !(x > 0.0 && x < 1.0) => range("must be in (0, 1)"),
                Kind::Positive if x <= 0.0 => range("must be positive"),
                Kind::NonNegative if x < 0.0 => range("must be non-negative"),
                Kind::AtLeast(m) if x < m => range(&format!("must be at least {m}")),
                _ => None,
            }
        }
    }
}

/// Every violation, in a stable order. Empty iff the run passes its
/// precondition checks.
pub fn validate(config: &RunConfig) -> Vec<String> {
    let cmd = config.command;
    let mut out = Vec::new();
    for (k, v) in &config.params {
        match spec_for(cmd, k) {
            None => out.push(format!("unknown key `{k}` for command `{cmd}`")),
            Some(entry) => out.extend(check_value(entry, v)),
        }
    }
    for entry in cmd.keys() {
        if entry.required && !config.params.contains_key(entry.key) {
            out.push(format!("missing required key `{}`", entry.key));
        }
    }
    if let Some(f) = config.get("format") {
        let allowed = cmd.formats();
        if matches!(f, "csv" | "json") && !allowed.contains(&config.format()) {
            out.push(format!("`format` = {f} is not supported by `{cmd}`"));
        }
    }
    out.extend(cross_checks(config));
    out
}

/// Constraints that involve more than one key.
fn cross_checks(config: &RunConfig) -> Vec<String> {
    let mut out = Vec::new();
    match config.command {
        Command::Herald => {
            let type1 = config.get("protocol") == Some("type1");
            if type1 && !config.params.contains_key("p_e") {
                out.push("missing required key `p_e`".to_string());
            }
            for (a, b) in [("alpha_a", "beta_a"), ("alpha_b", "beta_b")] {
                let (x, y) = (config.f64_or(a, 1.0), config.f64_or(b, 1.0));
                if x == 0.0 && y == 0.0 {
                    out.push(format!("`{a}` and `{b}` are both zero"));
                }
            }
            if let Some(p) = config.get("pattern") {
                if p.parse::<ionnet_core::heralding::DetectionPattern>()
                    .is_err()
                {
                    out.push(format!(
                        "`pattern` = {p} is not a detection pattern like D1+D2 or D1@t1+D2@t2"
                    ));
                }
            }
            if let Some(name) = config.get("preset") {
                if ionnet_core::photon_source::preset(name).is_err() {
                    let valid = ionnet_core::photon_source::preset_names().join(", ");
                    out.push(format!("`preset` = {name} is not one of: {valid}"));
                }
            }
        }
        Command::Collect => {
            let (lo, hi) = (config.f64_opt("min"), config.f64_opt("max"));
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo >= hi {
                    out.push(format!("`min` = {lo} must be below `max` = {hi}"));
                }
            }
            if config.get("scan") == Some("radius") && config.params.contains_key("rho_max") {
                out.push("`rho_max` is the scan variable for `scan = radius`".to_string());
            }
        }
        Command::Cavity => {
            if let (Some(t), Some(l)) = (config.f64_opt("t_l"), config.f64_opt("loss_total")) {
                if t > l {
                    out.push(format!(
                        "`t_l` = {t} is out of range: cannot exceed `loss_total` = {l}"
                    ));
                }
                if l == 0.0 {
                    out.push("`loss_total` = 0 is out of range: must be positive".to_string());
                }
                if t == 0.0 {
                    out.push("`t_l` = 0 is out of range: must be positive".to_string());
                }
            }
        }
        Command::Pattern => {
            if config.get("mc_samples") == Some("1") {
                out.push(
                    "`mc_samples` = 1 is out of range: use 0 to disable or at least 2".to_string(),
                );
            }
        }
        Command::Estimate => {}
    }
    out
}
