//! Shared plumbing for the subcommands: parameter merging, the parameter
//! digest, the prime-table cache, and artifact emission.
//!
//! Every artifact embeds `params_digest` (first 16 hex chars of the SHA-256 of
//! the canonical config text) and `artifact_version`, so outputs produced by
//! different runs can be checked for parameter consistency by `report`.

pub mod arcs;
pub mod report;
pub mod scan;
pub mod solve;
pub mod sums;
pub mod verify;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use dioph::model::RunConfig;
use dioph::{primes, Error, PrimeTable, RatioSpec, Result};
use sha2::{Digest, Sha256};

/// Bumped whenever the schema of any emitted file changes.
pub const ARTIFACT_VERSION: &str = "dioph-artifact/1";

/// Environment variable naming the prime-table cache directory.
pub const CACHE_DIR_ENV: &str = "DIOPH_CACHE_DIR";

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "DIOPH_THREADS";

/// 17 significant digits — round-trips every finite f64 (the same format the
/// canonical config text uses).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Problem-parameter flags shared by every computing subcommand. Typed flags
/// are applied last, after the params file and any `--set` overrides.
#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    /// Coefficients of the four prime-power slots.
    #[arg(long, value_name = "L1,L2,L3,L4", allow_hyphen_values = true)]
    pub lambda: Option<String>,

    /// Target value the form should approximate.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,

    /// Exponent of the fourth slot (the theory wants 1 < k < 14/5; other
    /// values are accepted with a warning).
    #[arg(long)]
    pub k: Option<f64>,

    /// Lower box cutoff: slot values range over [delta·X, X].
    #[arg(long)]
    pub delta: Option<f64>,

    /// Exponent slack in the major-arc cutoff.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Exact description of lambda1/lambda2: `sqrt2`, `golden`,
    /// `quad:d:p:q`, `rat:p:q`, `dec:digits:bits`, or a bare decimal.
    /// When `--lambda` is given without `--ratio`, a decimal description is
    /// derived from the coefficients.
    #[arg(long)]
    pub ratio: Option<String>,

    /// Fixed acceptance window.
    #[arg(long, conflicts_with_all = ["eta_theta", "eta_scale"])]
    pub eta: Option<f64>,

    /// Shrinking window eta(X) = scale · X^(-theta).
    #[arg(long)]
    pub eta_theta: Option<f64>,

    /// Scale factor for the shrinking window (default 1).
    #[arg(long, requires = "eta_theta")]
    pub eta_scale: Option<f64>,
}

/// Global options every subcommand sees.
#[derive(Debug, Clone)]
pub struct Global {
    pub params_file: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

/// Resolved context handed to each subcommand.
pub struct Ctx {
    pub config: RunConfig,
    pub digest: String,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

/// Merge order: built-in defaults → params file → `--set` overrides (in
/// order, later wins) → typed flags.
pub fn build_ctx(global: &Global, pa: &ParamArgs) -> Result<Ctx> {
    let mut cfg = match &global.params_file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read params file {}: {e}", path.display()))
            })?;
            RunConfig::from_config_str(&text)?
        }
        None => RunConfig::default(),
    };
    for ov in &global.overrides {
        cfg.apply_override(ov)?;
    }
    apply_typed_flags(&mut cfg, pa)?;

    let digest = params_digest(&cfg);
    warn_on_violations(&cfg);
    Ok(Ctx {
        config: cfg,
        digest,
        output_dir: global.output_dir.clone(),
        seed: global.seed,
    })
}

fn apply_typed_flags(cfg: &mut RunConfig, pa: &ParamArgs) -> Result<()> {
    if let Some(text) = &pa.lambda {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "--lambda needs 4 comma-separated values, got {text:?}"
            )));
        }
        for (i, part) in parts.iter().enumerate() {
            cfg.params.lambda[i] = part
                .parse()
                .map_err(|_| Error::Config(format!("bad number {part:?} in --lambda")))?;
        }
        if pa.ratio.is_none() {
            // Keep the ratio description consistent with the coefficients.
            // A decimal is honest here: from flag input we only know the
            // quotient to f64 precision, so irrationality stays "unknown".
            let q = cfg.params.lambda[0] / cfg.params.lambda[1];
            if q.is_finite() {
                cfg.params.ratio = RatioSpec::Decimal {
                    digits: fmt17(q),
                    bits: 48,
                };
            }
        }
    }
    if let Some(text) = &pa.ratio {
        cfg.params.ratio = RatioSpec::parse(text)?;
    }
    if let Some(v) = pa.omega {
        cfg.params.omega = v;
    }
    if let Some(v) = pa.k {
        cfg.params.k = v;
    }
    if let Some(v) = pa.delta {
        cfg.params.delta = v;
    }
    if let Some(v) = pa.epsilon {
        cfg.params.epsilon = v;
    }
    match (pa.eta, pa.eta_theta) {
        (Some(e), None) => cfg.eta = dioph::EtaPolicy::Fixed(e),
        (None, Some(theta)) => {
            cfg.eta = dioph::EtaPolicy::Power {
                theta,
                scale: pa.eta_scale.unwrap_or(1.0),
            }
        }
        (None, None) => {}
        // clap's conflicts_with already rejects this; keep a guard anyway.
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "both --eta and --eta-theta given; pick one window policy".into(),
            ))
        }
    }
    Ok(())
}

/// First 16 hex characters of the SHA-256 of the canonical config text.
pub fn params_digest(cfg: &RunConfig) -> String {
    let mut h = Sha256::new();
    h.update(cfg.to_config_string().as_bytes());
    let full = h.finalize();
    let mut s = String::with_capacity(16);
    for b in &full[..8] {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Hypothesis violations never fail a run — the engine is also a tool for
/// exploring what happens outside the proven region — but they are surfaced
/// on stderr as structured warnings.
fn warn_on_violations(cfg: &RunConfig) {
    let report = cfg.params.validate();
    for v in report.violations() {
        let line = serde_json::json!({
            "warning": {
                "kind": "hypothesis",
                "name": v.name,
                "detail": v.detail,
            }
        });
        eprintln!("{line}");
    }
}

/// Load a prime table covering `limit`, consulting the cache directory named
/// by `DIOPH_CACHE_DIR` when set. Cache misses and unreadable cache files
/// fall back to sieving (and refresh the cache).
pub fn load_table(limit: u64) -> Result<PrimeTable> {
    let dir = match std::env::var_os(CACHE_DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => return primes::sieve(limit),
    };
    let path = dir.join(format!("primes-{limit}.dpt"));
    if let Ok(mut f) = fs::File::open(&path) {
        if let Ok(table) = primes::read_cache(&mut f) {
            if table.limit == limit {
                return Ok(table);
            }
        }
        // Corrupt or mismatched cache: fall through and rebuild it.
    }
    let table = primes::sieve(limit)?;
    if fs::create_dir_all(&dir).is_ok() {
        let tmp = dir.join(format!("primes-{limit}.dpt.tmp"));
        if let Ok(mut f) = fs::File::create(&tmp) {
            if primes::write_cache(&table, &mut f).is_ok() && f.flush().is_ok() {
                drop(f);
                let _ = fs::rename(&tmp, &path);
            } else {
                let _ = fs::remove_file(&tmp);
            }
        }
    }
    Ok(table)
}

/// Write the artifact to stdout and, when `--output-dir` is set, to
/// `<dir>/<name>` with identical bytes.
pub fn emit(ctx: &Ctx, name: &str, bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    if let Some(dir) = &ctx.output_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// RFC-4180 CSV writer into memory: CRLF row endings, `.` decimal point
/// (guaranteed by Rust float formatting), no locale dependence.
pub fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new())
}

pub fn csv_into_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv buffer error: {e}")))
}

/// `csv::Error` → crate error adapter for `?` at row-writing sites.
pub fn write_record<I, T>(w: &mut csv::Writer<Vec<u8>>, rec: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(rec)
        .map_err(|e| Error::Config(format!("csv write error: {e}")))
}

/// Pretty JSON plus a trailing newline. Field order follows the struct
/// declaration, so the bytes are deterministic.
pub fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Config(format!("serialize error: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Parse an evaluation-grid description: `log:A:B:N` (N points 10^t with t
/// equally spaced in [A, B]), `lin:A:B:N`, or `list:v1,v2,...`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::Parameter(format!("bad grid {text:?}: {msg}"));
    let mut parts = text.splitn(2, ':');
    let kind = parts.next().unwrap_or("");
    let rest = parts.next().ok_or_else(|| bad("expected kind:spec"))?;
    match kind {
        "list" => {
            let mut vals = Vec::new();
            for piece in rest.split(',') {
                let v: f64 = piece
                    .trim()
                    .parse()
                    .map_err(|_| bad("list entries must be numbers"))?;
                if !v.is_finite() {
                    return Err(bad("list entries must be finite"));
                }
                vals.push(v);
            }
            Ok(vals)
        }
        "log" | "lin" => {
            let fields: Vec<&str> = rest.split(':').collect();
            if fields.len() != 3 {
                return Err(bad("expected kind:A:B:N"));
            }
            let a: f64 = fields[0].parse().map_err(|_| bad("A must be a number"))?;
            let b: f64 = fields[1].parse().map_err(|_| bad("B must be a number"))?;
            let n: usize = fields[2].parse().map_err(|_| bad("N must be an integer"))?;
            if n == 0 {
                return Err(bad("N must be at least 1"));
            }
            if !(a.is_finite() && b.is_finite()) {
                return Err(bad("endpoints must be finite"));
            }
            let mut vals = Vec::with_capacity(n);
            for i in 0..n {
                let t = if n == 1 {
                    a
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                };
                vals.push(if kind == "log" { 10f64.powf(t) } else { t });
            }
            Ok(vals)
        }
        other => Err(bad(&format!("unknown grid kind {other:?}"))),
    }
}

/// Parse a comma-separated list of scales.
pub fn parse_scales(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for piece in text.split(',') {
        let v: f64 = piece.trim().parse().map_err(|_| {
            Error::Parameter(format!("bad scale {piece:?} in --scales"))
        })?;
        if !(v.is_finite() && v >= 2.0) {
            return Err(Error::Parameter(format!("scales must be ≥ 2, got {v}")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parameter("--scales must name at least one scale".into()));
    }
    Ok(out)
}

/// Check that a directory exists or can be created early, so a doomed run
/// fails before hours of computation.
pub fn check_output_dir(dir: &Option<PathBuf>) -> Result<()> {
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| {
            Error::Config(format!("cannot create output dir {}: {e}", d.display()))
        })?;
        // Probe writability.
        let probe = d.join(".dioph-write-probe");
        fs::write(&probe, b"")
            .map_err(|e| Error::Config(format!("output dir {} not writable: {e}", d.display())))?;
        let _ = fs::remove_file(&probe);
    }
    Ok(())
}

/// Exit code policy: 1 = the run never started (bad configuration or
/// arguments), 2 = a resource limit (table, memory, I/O), 3 = results were
/// produced but a tolerance or stability target was missed.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parameter(_) | Error::Domain(_) | Error::Precision(_) => 1,
        Error::TableTooSmall { .. } | Error::Resource(_) | Error::Io(_) | Error::Cache(_) => 2,
        Error::Tolerance { .. } => 3,
    }
}

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain(_) => "domain",
        Error::Parameter(_) => "parameter",
        Error::TableTooSmall { .. } => "table_too_small",
        Error::Resource(_) => "resource",
        Error::Tolerance { .. } => "tolerance",
        Error::Precision(_) => "precision",
        Error::Config(_) => "config",
        Error::Cache(_) => "cache",
        Error::Io(_) => "io",
    }
}

/// One structured error line on stderr; the human-readable form goes first.
pub fn report_error(err: &Error) {
    eprintln!("error: {err}");
    let line = serde_json::json!({
        "error": {
            "kind": error_kind(err),
            "message": err.to_string(),
            "exit_code": exit_code_for(err),
        }
    });
    eprintln!("{line}");
}

/// Helper used by filename construction.
pub fn artifact_name(command: &str, digest: &str, ext: &str) -> String {
    format!("{command}-{digest}.{ext}")
}

pub fn path_display(p: &Path) -> String {
    p.display().to_string()
}
