//! Experiment configuration, validation, execution and report persistence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::attacks::{majority_vote_sweep, map_attack_sweep, symbols_per_period, unicity_distance, UnicityOutcome};
use crate::bounds::{
    ab_break_condition, ab_equivocation_approx, cta_bound_and_unicity, hbb_lower_bound, shannon_random_cipher_nk,
    theorem2_lower_bound, BoundInputs, DEFAULT_BREAK_FACTOR,
};
use crate::channel::{NoiseKind, PlaintextSource, SystemParams};
use crate::error::{Error, Result};
use crate::inference::{
    check_joint_budget, equivocation_identity_check, per_symbol_info, sweep, Cipher, Scenario, MAX_JOINT_BITS,
    MAX_TABLE_ENTRIES,
};
use crate::keystream::{dependency_distance, hex_to_bits, segment_bits, LfsrSpec, MAX_REGISTER_LENGTH};
use crate::montecarlo::MonteCarlo;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CipherKind {
    AlphaEta,
    Asc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Equivocation,
    Spurious,
    Pi,
    #[serde(rename = "U")]
    U,
    Seqinfo,
    BoundsOverlay,
    MapAttack,
    Unicity,
    MajorityVote,
    IdentityCheck,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Equivocation => "equivocation",
            Quantity::Spurious => "spurious",
            Quantity::Pi => "pi",
            Quantity::U => "U",
            Quantity::Seqinfo => "seqinfo",
            Quantity::BoundsOverlay => "bounds_overlay",
            Quantity::MapAttack => "map_attack",
            Quantity::Unicity => "unicity",
            Quantity::MajorityVote => "majority_vote",
            Quantity::IdentityCheck => "identity_check",
        }
    }

    fn needs_sweep(self) -> bool {
        !matches!(self, Quantity::U | Quantity::Unicity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Known,
    Uniform,
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub kind: SourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Known plaintext bits, MSB-first hex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits_hex: Option<String>,
}

/// Lengths (or period counts) to evaluate: a range or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SweepConfig {
    Values {
        values: Vec<usize>,
    },
    Range {
        from: usize,
        to: usize,
        #[serde(default = "one")]
        step: usize,
    },
}

fn one() -> usize {
    1
}

impl SweepConfig {
    pub fn points(&self) -> Vec<usize> {
        match self {
            SweepConfig::Values { values } => values.clone(),
            SweepConfig::Range { from, to, step } if *step > 0 && from <= to => (*from..=*to).step_by(*step).collect(),
            SweepConfig::Range { .. } => Vec::new(),
        }
    }
}

fn default_trials() -> usize {
    1000
}

fn default_output() -> String {
    "results".into()
}

/// One experiment, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_cipher")]
    pub cipher: CipherKind,
    #[serde(rename = "L")]
    pub l: u32,
    /// Feedback taps; the built-in primitive polynomial when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taps: Option<Vec<u32>>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "photon_N", default, skip_serializing_if = "Option::is_none")]
    pub photon_n: Option<f64>,
    /// Alternative to `photon_N`: `sigma = M / (2 sqrt(N))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_noise")]
    pub noise: NoiseConfig,
    #[serde(default = "default_source")]
    pub source: SourceConfig,
    pub quantity: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub break_factor: Option<f64>,
}

fn default_cipher() -> CipherKind {
    CipherKind::AlphaEta
}

fn default_noise() -> NoiseConfig {
    NoiseConfig {
        kind: NoiseKind::FullGaussian,
    }
}

fn default_source() -> SourceConfig {
    SourceConfig {
        kind: SourceKind::Uniform,
        p: None,
        bits_hex: None,
    }
}

/// Sets `value` at a dot-separated path, creating objects on the way.
/// The value is parsed as JSON when possible, else taken as a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("bad override path {path:?}")));
    }
    let mut node = root;
    for key in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("cannot descend into {key:?} of a non-object")))?;
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    node.as_object_mut()
        .ok_or_else(|| Error::Config(format!("cannot set {path:?} inside a non-object")))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Reads a config file (or starts empty) and applies overrides in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut root = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Map::new()),
    };
    for o in overrides {
        apply_override(&mut root, o)?;
    }
    serde_json::from_value(root).map_err(|e| Error::Config(e.to_string()))
}

impl ExperimentConfig {
    /// Hash of everything that determines the results: all keys except the
    /// output location, canonically serialized (sorted keys).
    pub fn params_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output");
        }
        let digest = Sha256::digest(v.to_string().as_bytes());
        hex::encode(&digest[..8])
    }

    fn lfsr(&self) -> Result<LfsrSpec> {
        match &self.taps {
            Some(t) => LfsrSpec::new(self.l, t.clone()),
            None => LfsrSpec::primitive(self.l),
        }
    }

    fn params(&self) -> Result<SystemParams> {
        let m = self.m.ok_or_else(|| Error::Config("alpha_eta needs M".into()))?;
        let lfsr = self.lfsr()?;
        match (self.photon_n, self.sigma) {
            (Some(n), None) => SystemParams::new(lfsr, m, n, self.noise.kind),
            (None, Some(s)) => SystemParams::with_sigma(lfsr, m, s, self.noise.kind),
            _ => Err(Error::Config("give exactly one of photon_N and sigma".into())),
        }
    }

    fn cipher(&self) -> Result<Cipher> {
        match self.cipher {
            CipherKind::AlphaEta => Ok(Cipher::AlphaEta(self.params()?)),
            CipherKind::Asc => Ok(Cipher::Asc(self.lfsr()?)),
        }
    }

    fn source(&self) -> Result<PlaintextSource> {
        let s = &self.source;
        match s.kind {
            SourceKind::Uniform => Ok(PlaintextSource::Uniform),
            SourceKind::Bernoulli => {
                PlaintextSource::bernoulli(s.p.ok_or_else(|| Error::Config("bernoulli source needs p".into()))?)
            }
            SourceKind::Known => PlaintextSource::known(hex_to_bits(
                s.bits_hex
                    .as_deref()
                    .ok_or_else(|| Error::Config("known source needs bits_hex".into()))?,
                None,
            )?),
        }
    }

    fn points(&self) -> Result<Vec<usize>> {
        let points = self.sweep.as_ref().map(SweepConfig::points).unwrap_or_default();
        if points.is_empty() {
            return Err(Error::invalid("sweep is empty"));
        }
        Ok(points)
    }

    fn mc(&self) -> MonteCarlo {
        MonteCarlo::new(self.trials, self.master_seed)
    }

    /// Longest symbol sequence the run will enumerate.
    fn longest(&self, cipher: &Cipher) -> Result<usize> {
        Ok(match self.quantity {
            Quantity::U => 1,
            Quantity::Unicity => self.n_max.ok_or_else(|| Error::Config("unicity needs n_max".into()))?,
            Quantity::MajorityVote => {
                let Cipher::AlphaEta(p) = cipher else {
                    return Err(Error::invalid("majority_vote needs the alpha_eta cipher"));
                };
                let reg = p.lfsr.period().length as usize;
                let per = symbols_per_period(p);
                let t = *self.points()?.iter().max().unwrap();
                (per * t).min(reg)
            }
            _ => *self.points()?.iter().max().unwrap(),
        })
    }

    /// Every check a run performs before doing work.
    pub fn validate(&self) -> Result<()> {
        let cipher = self.cipher()?;
        let source = self.source()?;
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.quantity.needs_sweep() {
            self.points()?;
        }
        if self.quantity == Quantity::MajorityVote && self.points()?.contains(&0) {
            return Err(Error::invalid("period counts must be at least 1"));
        }
        let longest = self.longest(&cipher)?;
        if self.quantity != Quantity::MajorityVote {
            source.check_len(longest)?;
        }
        let entries = cipher.key_count().saturating_mul(longest.max(1) as u64);
        if entries > MAX_TABLE_ENTRIES {
            return Err(Error::cap(
                "running-key table (keys x symbols)",
                entries,
                MAX_TABLE_ENTRIES,
            ));
        }
        match (self.quantity, &cipher) {
            (Quantity::U | Quantity::Seqinfo | Quantity::MajorityVote, Cipher::Asc(_)) => {
                return Err(Error::invalid(format!(
                    "{} needs the alpha_eta cipher",
                    self.quantity.name()
                )))
            }
            (Quantity::Seqinfo | Quantity::BoundsOverlay, Cipher::AlphaEta(p)) => {
                check_joint_budget(p, longest)?;
            }
            _ => {}
        }
        if self.quantity == Quantity::MajorityVote && source != PlaintextSource::Uniform {
            return Err(Error::invalid(
                "majority_vote is a ciphertext-only attack; use a uniform source",
            ));
        }
        if self.quantity == Quantity::Unicity {
            let p = self
                .target_p
                .ok_or_else(|| Error::Config("unicity needs target_p".into()))?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::invalid(format!("target_p {p} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Dry-run description of a config: derived quantities, budgets, problems.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub quantity: Option<&'static str>,
    pub params_hash: Option<String>,
    pub derived: Map<String, Value>,
    pub caps: Map<String, Value>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        self.violations.iter().map(|v| v.exit_code).max().unwrap_or(0)
    }
}

pub fn verify(config: &ExperimentConfig) -> VerifyReport {
    let mut derived = Map::new();
    let mut caps = Map::new();
    derived.insert("L".into(), json!(config.l));
    let key_count = if config.l <= 63 {
        (1u64 << config.l) - 1
    } else {
        u64::MAX
    };
    derived.insert("key_count".into(), json!(key_count));
    derived.insert("H_K".into(), json!((key_count as f64).log2()));
    if let Ok(lfsr) = config.lfsr() {
        derived.insert("taps".into(), json!(lfsr.taps()));
    }
    if config.cipher == CipherKind::AlphaEta {
        if let Some(m) = config.m {
            derived.insert("M".into(), json!(m));
            if let Ok(seg) = segment_bits(m) {
                derived.insert("seg_bits".into(), json!(seg));
            }
            if let Ok(d) = dependency_distance(config.l, m) {
                derived.insert("n_dep".into(), json!(d.value()));
                derived.insert(
                    "n_dep_exact".into(),
                    json!(format!("{}/{}", d.numerator, d.denominator)),
                );
                derived.insert("n_dep_floor".into(), json!(d.floor));
            }
        }
        if let Ok(p) = config.params() {
            derived.insert("photon_N".into(), json!(p.photon_n));
            derived.insert("sigma".into(), json!(p.sigma()));
            derived.insert("sigma_index_units".into(), json!(p.sigma_index()));
        }
    }
    caps.insert("max_L".into(), json!(MAX_REGISTER_LENGTH));
    caps.insert("max_table_entries".into(), json!(MAX_TABLE_ENTRIES));
    caps.insert("max_joint_bits".into(), json!(MAX_JOINT_BITS));
    if let Ok(cipher) = config.cipher() {
        if let Ok(n) = config.longest(&cipher) {
            caps.insert("longest_sequence".into(), json!(n));
            caps.insert(
                "table_entries".into(),
                json!(cipher.key_count().saturating_mul(n.max(1) as u64)),
            );
            if let Cipher::AlphaEta(p) = &cipher {
                caps.insert(
                    "joint_bits".into(),
                    json!(p.lfsr.length() as u64 + n as u64 * p.seg_bits() as u64),
                );
            }
        }
    }
    let mut violations = Vec::new();
    if let Err(e) = config.validate() {
        violations.push(Violation {
            kind: e.kind(),
            message: e.to_string(),
            exit_code: e.exit_code(),
        });
    }
    VerifyReport {
        quantity: Some(config.quantity.name()),
        params_hash: Some(config.params_hash()),
        derived,
        caps,
        violations,
    }
}

/// Tabular result of a run plus its JSON records.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub quantity: Quantity,
    pub params_hash: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub records: Vec<Value>,
}

impl Report {
    /// CSV text without the timestamp comment line.
    pub fn csv_body(&self) -> String {
        let mut out = self.header.join(",");
        out.push_str(",params_hash\n");
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push(',');
            out.push_str(&self.params_hash);
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records serialize") + "\n"
    }
}

fn f(v: f64) -> String {
    format!("{v}")
}

struct Records<'a> {
    config: &'a ExperimentConfig,
    hash: &'a str,
    out: Vec<Value>,
}

impl Records<'_> {
    fn push(&mut self, n: Option<usize>, value: f64, std_error: f64, trials: usize, extra: Value) {
        let mut rec = json!({
            "quantity": self.config.quantity.name(),
            "params_hash": self.hash,
            "n": n,
            "value": value,
            "std_error": std_error,
            "trials": trials,
            "seed": self.config.master_seed,
        });
        if let (Some(obj), Value::Object(more)) = (rec.as_object_mut(), extra) {
            obj.extend(more);
        }
        self.out.push(rec);
    }
}

/// Validates and executes `config` with `workers` threads (ambient pool when
/// `None`). Results depend only on the config, never on the worker count.
pub fn run(config: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    config.validate()?;
    let hash = config.params_hash();
    let cipher = config.cipher()?;
    let source = config.source()?;
    let mut mc = config.mc();
    if let Some(w) = workers {
        mc = mc.with_workers(w);
    }
    let scenario = Scenario::new(cipher.clone(), source.clone());
    let mut rec = Records {
        config,
        hash: &hash,
        out: Vec::new(),
    };
    let mut rows = Vec::new();
    let header: Vec<&'static str>;

    match config.quantity {
        q @ (Quantity::Equivocation | Quantity::Spurious | Quantity::Pi | Quantity::Seqinfo) => {
            header = vec!["n", "value", "std_error", "trials"];
            for pt in sweep(&scenario, &config.points()?, &mc)? {
                let e = match q {
                    Quantity::Equivocation => pt.equivocation,
                    Quantity::Spurious => pt.spurious,
                    Quantity::Pi => pt.pi,
                    _ => pt.information,
                };
                rows.push(vec![pt.n.to_string(), f(e.value), f(e.std_error), e.trials.to_string()]);
                rec.push(Some(pt.n), e.value, e.std_error, e.trials, Value::Null);
            }
        }
        Quantity::U => {
            let Cipher::AlphaEta(p) = &cipher else {
                unreachable!("validated")
            };
            let u = per_symbol_info(p)?;
            header = vec!["value", "std_error"];
            rows.push(vec![f(u), f(0.0)]);
            rec.push(
                None,
                u,
                0.0,
                0,
                json!({"method": "midpoint quadrature with Richardson extrapolation", "tolerance": 1e-6}),
            );
        }
        Quantity::MapAttack => {
            header = vec!["n", "success", "std_error", "trials"];
            for r in map_attack_sweep(&scenario, &config.points()?, &mc)? {
                let e = r.success;
                rows.push(vec![r.n.to_string(), f(e.value), f(e.std_error), e.trials.to_string()]);
                rec.push(Some(r.n), e.value, e.std_error, e.trials, Value::Null);
            }
        }
        Quantity::Unicity => {
            let target = config.target_p.expect("validated");
            let n_max = config.n_max.expect("validated");
            let outcome = unicity_distance(&scenario, target, n_max, &mc)?;
            header = vec!["target_p", "n_max", "reached", "n", "success", "std_error", "trials"];
            let (reached, n, e) = match outcome {
                UnicityOutcome::Reached { n, success } => (true, Some(n), success),
                UnicityOutcome::NotReached { success_at_n_max, .. } => (false, None, success_at_n_max),
            };
            rows.push(vec![
                f(target),
                n_max.to_string(),
                reached.to_string(),
                n.map(|n| n.to_string()).unwrap_or_default(),
                f(e.value),
                f(e.std_error),
                e.trials.to_string(),
            ]);
            rec.push(
                n,
                e.value,
                e.std_error,
                e.trials,
                json!({"reached": reached, "target_p": target, "n_max": n_max}),
            );
        }
        Quantity::MajorityVote => {
            let Cipher::AlphaEta(p) = &cipher else {
                unreachable!("validated")
            };
            header = vec![
                "periods",
                "n",
                "success",
                "std_error",
                "joint_success",
                "joint_std_error",
                "trials",
            ];
            for v in majority_vote_sweep(p, &config.points()?, &mc)? {
                let (s, j) = (v.vote.success, v.joint.success);
                rows.push(vec![
                    v.periods.to_string(),
                    v.vote.n.to_string(),
                    f(s.value),
                    f(s.std_error),
                    f(j.value),
                    f(j.std_error),
                    s.trials.to_string(),
                ]);
                rec.push(
                    Some(v.vote.n),
                    s.value,
                    s.std_error,
                    s.trials,
                    json!({"periods": v.periods, "joint_success": j.value, "joint_std_error": j.std_error}),
                );
            }
        }
        Quantity::IdentityCheck => {
            header = vec!["n", "lhs", "lhs_std_error", "rhs", "rhs_std_error", "gap", "trials"];
            for n in config.points()? {
                let c = equivocation_identity_check(&scenario, n, &mc)?;
                rows.push(vec![
                    n.to_string(),
                    f(c.lhs.value),
                    f(c.lhs.std_error),
                    f(c.rhs.value),
                    f(c.rhs.std_error),
                    f(c.gap),
                    c.lhs.trials.to_string(),
                ]);
                rec.push(
                    Some(n),
                    c.gap,
                    (c.lhs.std_error.powi(2) + c.rhs.std_error.powi(2)).sqrt(),
                    c.lhs.trials,
                    json!({"lhs": c.lhs, "rhs": c.rhs}),
                );
            }
        }
        Quantity::BoundsOverlay => {
            header = vec![
                "n",
                "measured_Nk",
                "measured_se",
                "bound_theorem2",
                "bound_hbb",
                "bound_shannon",
                "bound_cta",
                "ab_approx_HE",
                "measured_HE",
                "measured_HE_se",
                "info",
                "info_se",
                "ab_break",
            ];
            let points = config.points()?;
            let measured = sweep(&scenario, &points, &mc)?;
            let info = sweep(&scenario, &points, &mc.reseeded(1))?;
            let u = match &cipher {
                Cipher::AlphaEta(p) => per_symbol_info(p)?,
                Cipher::Asc(_) => 1.0,
            };
            let h_k = cipher.key_entropy();
            let d = source.redundancy();
            let l = cipher.lfsr().length() as f64;
            let factor = config.break_factor.unwrap_or(DEFAULT_BREAK_FACTOR);
            for (m, i) in measured.iter().zip(&info) {
                let n = m.n as f64;
                let inputs = BoundInputs {
                    key_entropy: h_k,
                    n,
                    log2_alphabet: 1.0,
                    redundancy: d,
                    info: i.information.value.max(0.0),
                    per_symbol_info: u,
                    key_bits: l,
                };
                let t2 = theorem2_lower_bound(&inputs);
                let hbb = hbb_lower_bound(h_k, n, d);
                let sh = shannon_random_cipher_nk(h_k, n, d).spurious;
                let cta = cta_bound_and_unicity(h_k, n, u).bound;
                let ab = ab_equivocation_approx(l, n, u);
                let brk = ab_break_condition(n, u, l, m.equivocation.value, factor);
                rows.push(vec![
                    m.n.to_string(),
                    f(m.spurious.value),
                    f(m.spurious.std_error),
                    f(t2),
                    f(hbb),
                    f(sh),
                    f(cta),
                    f(ab),
                    f(m.equivocation.value),
                    f(m.equivocation.std_error),
                    f(i.information.value),
                    f(i.information.std_error),
                    brk.to_string(),
                ]);
                rec.push(
                    Some(m.n),
                    m.spurious.value,
                    m.spurious.std_error,
                    m.spurious.trials,
                    json!({
                        "bound_theorem2": t2, "bound_hbb": hbb, "bound_shannon": sh,
                        "bound_cta": cta, "ab_approx_HE": ab, "measured_HE": m.equivocation.value,
                        "info": i.information.value, "ab_break": brk,
                    }),
                );
            }
        }
    }
    let records = rec.out;
    Ok(Report {
        quantity: config.quantity,
        params_hash: hash,
        header,
        rows,
        records,
    })
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes `<quantity>.csv` and/or `<quantity>.json` into `dir`.
pub fn write_report(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let name = report.quantity.name();
    if matches!(format, Format::Csv | Format::Both) {
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let text = format!(
            "# aeta-lab {name} params_hash={} generated_unix={stamp}\n{}",
            report.params_hash,
            report.csv_body()
        );
        let path = dir.join(format!("{name}.csv"));
        write_atomic(&path, &text)?;
        written.push(path);
    }
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join(format!("{name}.json"));
        write_atomic(&path, &report.json())?;
        written.push(path);
    }
    Ok(written)
}
