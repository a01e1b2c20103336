//! Experiment orchestration behind the command-line tool.
//!
//! A run is described by an [`ExperimentConfig`], assembled from an optional
//! `key = value` file with command-line overrides on top. Every run writes
//! its tables into the output directory and finishes with `manifest.json`,
//! which echoes the resolved configuration and lists each written file with
//! its SHA-256 checksum.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::codes::{
    double_trace_code, gold_code, hamming_code, read_generator_file, repetition_code, simplex_code, LinearCode,
};
use crate::combinatorics::catalan;
use crate::ensemble::{gram, sample_matrix};
use crate::error::{bail, Error, Result};
use crate::moments::{monte_carlo_moments, trial_seeds, MomentReport};
use crate::paths::{count_gamma, enumerate_path_classes, exact_expected_moment, verify_class, ClassReport};
use crate::spectra::{eigenvalues, esd_table, sup_distance, theorem_bound, MpLaw, SpectralSample};

pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_SEED: u64 = 0;
const ESD_POINTS: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CodeSpec {
    Builtin { name: String, m: u32 },
    File { path: PathBuf },
}

impl CodeSpec {
    pub fn build(&self) -> Result<LinearCode> {
        match self {
            CodeSpec::File { path } => read_generator_file(path),
            CodeSpec::Builtin { name, m } => match name.as_str() {
                "gold" => gold_code(*m),
                "simplex" => simplex_code(*m),
                "hamming" => hamming_code(*m),
                "repetition" => repetition_code(*m as usize),
                "double-trace" => double_trace_code(*m, 3),
                other => bail!(
                    Usage,
                    "unknown code '{other}' (expected gold, simplex, hamming, repetition or double-trace)"
                ),
            },
        }
    }
}

/// Raw settings before validation; later layers override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

const KEYS: [&str; 12] = [
    "code",
    "m",
    "matrix-file",
    "p",
    "y",
    "trials",
    "lmax",
    "seed",
    "out",
    "format",
    "workers",
    "exact",
];

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!(Parse, "config line {}: expected key = value", i + 1);
            };
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = key.replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!(Usage, "unknown config key '{key}'");
        }
        self.values.insert(key, value.into());
        Ok(())
    }

    /// Applies every entry of `other` on top of `self`.
    pub fn overlay(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Usage(format!("invalid value '{v}' for {key}"))),
        }
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let code = match (self.values.get("code"), self.values.get("matrix-file")) {
            (Some(_), Some(_)) => bail!(Usage, "give either code or matrix-file, not both"),
            (Some(name), None) => {
                let Some(m) = self.get::<u32>("m")? else {
                    bail!(Usage, "code '{name}' needs m");
                };
                Some(CodeSpec::Builtin { name: name.clone(), m })
            }
            (None, Some(path)) => Some(CodeSpec::File {
                path: PathBuf::from(path),
            }),
            (None, None) => None,
        };
        let trials = self.get::<usize>("trials")?.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            bail!(Usage, "trials must be at least 1");
        }
        let formats = match self.values.get("format") {
            None => vec![Format::Csv, Format::Json],
            Some(list) => list
                .split(',')
                .map(|f| match f.trim() {
                    "csv" => Ok(Format::Csv),
                    "json" => Ok(Format::Json),
                    other => Err(Error::Usage(format!("unknown format '{other}'"))),
                })
                .collect::<Result<_>>()?,
        };
        let workers = self.get::<usize>("workers")?;
        if workers == Some(0) {
            bail!(Usage, "workers must be at least 1");
        }
        Ok(ExperimentConfig {
            code,
            p: self.get("p")?,
            y: self.get("y")?,
            trials,
            l_max: self.get("lmax")?,
            seed: self.get::<u64>("seed")?.unwrap_or(DEFAULT_SEED),
            out: PathBuf::from(self.values.get("out").map_or("out", String::as_str)),
            formats,
            workers,
            exact: self.get::<bool>("exact")?.unwrap_or(false),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub code: Option<CodeSpec>,
    pub p: Option<usize>,
    pub y: Option<f64>,
    pub trials: usize,
    pub l_max: Option<u32>,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub workers: Option<usize>,
    pub exact: bool,
}

impl ExperimentConfig {
    pub fn build_code(&self) -> Result<LinearCode> {
        match &self.code {
            Some(spec) => spec.build(),
            None => bail!(Usage, "no code given (use --code with --m, or --matrix-file)"),
        }
    }

    /// Row count: p directly, or round(y n); must satisfy 1 <= p < n.
    pub fn resolve_p(&self, n: usize) -> Result<usize> {
        let p = match (self.p, self.y) {
            (Some(_), Some(_)) => bail!(Usage, "give exactly one of p and y"),
            (None, None) => bail!(Usage, "one of p and y is required"),
            (Some(p), None) => p,
            (None, Some(y)) => {
                if !(y > 0.0 && y < 1.0) {
                    bail!(Usage, "y must lie in (0, 1), got {y}");
                }
                (y * n as f64).round() as usize
            }
        };
        if p == 0 || p >= n {
            bail!(Usage, "p = {p} must satisfy 1 <= p < n = {n}");
        }
        Ok(p)
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Runs `f` on a pool of `workers` threads, or the global pool.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(f()),
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| Error::Usage(format!("cannot start {w} workers: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
    /// Absolute tolerance within which float columns reproduce.
    pub float_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub code: Option<Value>,
    pub seeds: Vec<u64>,
    pub warnings: Vec<String>,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileEntry>,
}

/// Collects output files, written in order, for the manifest.
struct Writer {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str, float_tolerance: Option<f64>) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents.as_bytes()),
            float_tolerance,
        });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T, float_tolerance: Option<f64>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
        text.push('\n');
        self.write(name, &text, float_tolerance)
    }

    fn finish(self, mut manifest: RunManifest, started: Instant) -> Result<RunManifest> {
        manifest.files = self.files;
        manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
        text.push('\n');
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(manifest)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn big_json(values: &[num_bigint::BigUint]) -> Value {
    use num_traits::ToPrimitive;
    Value::Array(
        values
            .iter()
            .map(|v| v.to_u64().map_or_else(|| json!(v.to_string()), |x| json!(x)))
            .collect(),
    )
}

/// Parameters and, when enumerable, weight data of a code as JSON.
pub fn code_info(code: &LinearCode) -> Value {
    let mut info = json!({
        "name": code.name(),
        "q": code.field_size(),
        "n": code.len(),
        "k": code.dimension(),
    });
    match code.weight_data() {
        Ok(w) => {
            info["d"] = json!(w.d);
            info["d_dual"] = json!(w.d_dual);
            info["dual_weight4"] = json!(w.dual_weight4.to_string().parse::<u64>().ok());
            info["weight_distribution"] = big_json(&w.weights);
            info["dual_weight_distribution"] = big_json(&w.dual_weights);
        }
        Err(e) => {
            info["weight_data"] = json!(format!("unavailable: {e}"));
            if code.field_size() == 2 {
                if let Ok(ok) = code.binary_dual_distance_at_least_5() {
                    info["d_dual_at_least_5"] = json!(ok);
                }
            }
        }
    }
    info
}

fn manifest(command: &str, cfg: &ExperimentConfig, code: Option<&LinearCode>, seeds: Vec<u64>) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        code: code.map(code_info),
        seeds,
        warnings: Vec::new(),
        wall_clock_seconds: 0.0,
        files: Vec::new(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Samples `trials` Gram matrices and compares their spectra with MP(y).
pub fn run_spectra(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let started = Instant::now();
    let code = cfg.build_code()?;
    let n = code.len();
    let p = cfg.resolve_p(n)?;
    let seeds = trial_seeds(cfg.seed, cfg.trials);
    let samples: Vec<SpectralSample> = cfg.install(|| {
        seeds
            .par_iter()
            .map(|&s| eigenvalues(&gram(&sample_matrix(&code, p, s)?), Some(s)))
            .collect::<Result<Vec<_>>>()
    })??;
    let y = p as f64 / n as f64;
    let law = MpLaw::new(y)?;
    let distances = samples
        .iter()
        .map(|s| sup_distance(s, &law))
        .collect::<Result<Vec<_>>>()?;
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;

    let mut out = Writer::new(&cfg.out)?;
    let mut m = manifest("spectra run", cfg, Some(&code), seeds.clone());
    let mut csv = String::from("trial,index,lambda\n");
    for (t, s) in samples.iter().enumerate() {
        for (i, v) in s.eigenvalues().iter().enumerate() {
            let _ = writeln!(csv, "{t},{i},{v}");
        }
    }
    out.write("eigenvalues.csv", &csv, Some(1e-10))?;
    let pooled = SpectralSample::new(
        samples.iter().flat_map(|s| s.eigenvalues().iter().copied()).collect(),
        n,
        None,
    )?;
    out.write("esd_vs_mp.csv", &esd_table(&pooled, &law, ESD_POINTS)?, Some(1e-10))?;
    let bound = match theorem_bound(n as u64, y) {
        Ok(b) => Some(b),
        Err(e) => {
            m.warnings.push(format!("theorem bound unavailable: {e}"));
            None
        }
    };
    let clamped: usize = samples.iter().map(SpectralSample::clamped).sum();
    if clamped > 0 {
        m.warnings
            .push(format!("{clamped} slightly negative eigenvalues clamped to 0"));
    }
    let summary = json!({
        "code": code.name(),
        "n": n,
        "p": p,
        "y": y,
        "trials": cfg.trials,
        "seeds": seeds,
        "sup_distance": distances,
        "mean_sup_distance": mean,
        "theorem_bound": bound,
        "clamped_eigenvalues": clamped,
    });
    out.write_json("summary.json", &summary, Some(1e-10))?;
    out.finish(m, started)
}

fn moments_csv(reports: &[MomentReport]) -> String {
    let mut csv = String::from("l,empirical,stderr,main_term,bound,exact\n");
    for r in reports {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.l,
            r.empirical_mean,
            opt(r.std_error),
            r.main_term,
            r.error_bound,
            opt(r.exact_expectation)
        );
    }
    csv
}

/// Monte Carlo moments with main term, error bound and, optionally, the
/// exact expectation.
pub fn run_moments(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let started = Instant::now();
    let code = cfg.build_code()?;
    let p = cfg.resolve_p(code.len())?;
    let l_max = cfg.l_max.unwrap_or(4);
    let mut reports = cfg.install(|| monte_carlo_moments(&code, p, l_max, cfg.trials, cfg.seed))??;
    let mut m = manifest("moments run", cfg, Some(&code), trial_seeds(cfg.seed, cfg.trials));
    if (l_max as f64) >= (p as f64).sqrt() {
        m.warnings.push(format!(
            "l_max = {l_max} is not below sqrt(p) = {:.3}; the moment theorem does not cover those orders",
            (p as f64).sqrt()
        ));
    }
    if code.count_weight4_dual().is_err() {
        m.warnings
            .push("weight-4 dual count unavailable; error bound left as NaN".to_string());
    }
    if cfg.exact {
        for r in reports.iter_mut() {
            match cfg.install(|| exact_expected_moment(&code, p, r.l as usize))? {
                Ok(v) => r.exact_expectation = Some(v),
                Err(Error::Resource(e)) => m.warnings.push(format!("exact E A_{} skipped: {e}", r.l)),
                Err(e) => return Err(e),
            }
        }
    }
    let mut out = Writer::new(&cfg.out)?;
    if cfg.wants(Format::Csv) {
        out.write("moments.csv", &moments_csv(&reports), Some(1e-10))?;
    }
    if cfg.wants(Format::Json) {
        out.write_json("moments.json", &reports, Some(1e-10))?;
    }
    out.finish(m, started)
}

#[derive(Debug, Clone, Serialize)]
pub struct PathsSummary {
    pub l: usize,
    pub classes: usize,
    pub in_gamma: usize,
    pub passed: usize,
    pub failed: usize,
    pub unchecked: usize,
}

/// Checks every path class up to l_max against the Gamma dichotomy.
/// Returns the manifest and whether no class failed.
pub fn run_paths_verify(cfg: &ExperimentConfig) -> Result<(RunManifest, bool)> {
    let started = Instant::now();
    let code = cfg.build_code()?;
    let l_max = cfg.l_max.unwrap_or(5) as usize;
    // fail on the budget before any work
    enumerate_path_classes(l_max)?;
    let mut m = manifest("paths verify", cfg, Some(&code), Vec::new());
    let a = match code.count_weight4_dual() {
        Ok(a) => a,
        Err(e) => bail!(Resource, "weight-4 dual count needed for the bound: {e}"),
    };
    if !code.rows_distinct_nonzero() {
        m.warnings
            .push("generator rows are not distinct and nonzero; the dichotomy is not expected to hold".into());
    }
    let mut reports: Vec<ClassReport> = Vec::new();
    let mut summary = Vec::new();
    for l in 1..=l_max {
        let classes: Vec<_> = enumerate_path_classes(l)?.collect();
        let batch = cfg.install(|| {
            classes
                .par_iter()
                .map(|c| verify_class(c, &code, a))
                .collect::<Result<Vec<_>>>()
        })??;
        summary.push(PathsSummary {
            l,
            classes: batch.len(),
            in_gamma: batch.iter().filter(|r| r.in_gamma).count(),
            passed: batch.iter().filter(|r| r.pass == Some(true)).count(),
            failed: batch.iter().filter(|r| r.pass == Some(false)).count(),
            unchecked: batch.iter().filter(|r| r.pass.is_none()).count(),
        });
        reports.extend(batch);
    }
    let ok = summary.iter().all(|s| s.failed == 0);
    let mut out = Writer::new(&cfg.out)?;
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("l,classes,in_gamma,passed,failed,unchecked\n");
        for s in &summary {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                s.l, s.classes, s.in_gamma, s.passed, s.failed, s.unchecked
            );
        }
        out.write("paths_summary.csv", &csv, None)?;
    }
    if cfg.wants(Format::Json) {
        out.write_json("paths.json", &reports, None)?;
    }
    Ok((out.finish(m, started)?, ok))
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaCount {
    pub l: usize,
    pub v: usize,
    pub enumerated: u128,
    pub narayana: u128,
}

/// Counts of Gamma classes by (l, v) against Narayana numbers, with the
/// row sums against Catalan numbers. Returns whether all agree.
pub fn gamma_counts(l_max: usize) -> Result<(Vec<GammaCount>, bool)> {
    enumerate_path_classes(l_max)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for l in 1..=l_max {
        let mut counts = vec![0u128; l + 1];
        for c in enumerate_path_classes(l)?.filter(|c| c.in_gamma()) {
            counts[c.vertex_count()] += 1;
        }
        let mut total = 0u128;
        for (v, &enumerated) in counts.iter().enumerate().skip(1) {
            let narayana = count_gamma(l as u64, v as u64)?;
            ok &= enumerated == narayana;
            total += enumerated;
            rows.push(GammaCount {
                l,
                v,
                enumerated,
                narayana,
            });
        }
        ok &= num_bigint::BigUint::from(total) == catalan(l as u64);
    }
    Ok((rows, ok))
}

pub fn run_paths_count(cfg: &ExperimentConfig) -> Result<(RunManifest, bool)> {
    let started = Instant::now();
    let l_max = cfg.l_max.unwrap_or(8) as usize;
    let (rows, ok) = cfg.install(|| gamma_counts(l_max))??;
    let m = manifest("paths count", cfg, None, Vec::new());
    let mut out = Writer::new(&cfg.out)?;
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("l,v,enumerated,narayana\n");
        for r in &rows {
            let _ = writeln!(csv, "{},{},{},{}", r.l, r.v, r.enumerated, r.narayana);
        }
        out.write("gamma_counts.csv", &csv, None)?;
    }
    if cfg.wants(Format::Json) {
        out.write_json("gamma_counts.json", &rows, None)?;
    }
    Ok((out.finish(m, started)?, ok))
}
