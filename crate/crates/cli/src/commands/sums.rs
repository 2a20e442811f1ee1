//! `dioph sums` — evaluate one exponential sum (or its smooth companion
//! integral) on a grid of frequencies and emit one CSV row per point.
//!
//! The exponent is the configured `k`; the sum ranges over p with
//! p^k ∈ (delta·X, X]. Kind `S` is weighted by ln p, `U` is unweighted, and
//! `T` is the oscillatory integral over the same interval (whose reported
//! `quad_error` column is an honest bound, 0 for the exact sums).

use clap::ValueEnum;
use dioph::{expsums, Error, PrimeTable, Result};

use super::{artifact_name, csv_into_bytes, csv_writer, emit, fmt17, load_table, write_record, Ctx, ARTIFACT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum SumKind {
    S,
    U,
    T,
}

impl SumKind {
    fn name(self) -> &'static str {
        match self {
            SumKind::S => "S",
            SumKind::U => "U",
            SumKind::T => "T",
        }
    }
}

pub const HEADER: [&str; 11] = [
    "kind",
    "k",
    "x",
    "delta",
    "alpha",
    "re",
    "im",
    "abs",
    "quad_error",
    "params_digest",
    "artifact_version",
];

pub fn run(ctx: &Ctx, kind: SumKind, x: f64, grid: &str) -> Result<()> {
    let params = &ctx.config.params;
    let k = params.k;
    let delta = params.delta;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("sums needs k > 0, got {k}")));
    }
    let alphas = super::parse_grid(grid)?;

    let table: Option<PrimeTable> = match kind {
        SumKind::T => None,
        SumKind::S | SumKind::U => {
            let limit = x.powf(1.0 / k).ceil() as u64 + 1;
            Some(load_table(limit)?)
        }
    };

    let mut w = csv_writer();
    write_record(&mut w, HEADER)?;
    for &alpha in &alphas {
        let (z, err) = match kind {
            SumKind::S => (expsums::exp_sum(table.as_ref().unwrap(), k, delta, x, alpha)?, 0.0),
            SumKind::U => (
                expsums::exp_sum_unweighted(table.as_ref().unwrap(), k, delta, x, alpha)?,
                0.0,
            ),
            SumKind::T => expsums::exp_integral(k, delta, x, alpha)?,
        };
        write_record(&mut w, [
            kind.name().to_string(),
            fmt17(k),
            fmt17(x),
            fmt17(delta),
            fmt17(alpha),
            fmt17(z.re),
            fmt17(z.im),
            fmt17(z.norm()),
            fmt17(err),
            ctx.digest.clone(),
            ARTIFACT_VERSION.to_string(),
        ])?;
    }
    let bytes = csv_into_bytes(w)?;
    emit(ctx, &artifact_name("sums", &ctx.digest, "csv"), &bytes)?;

    let summary = serde_json::json!({
        "info": { "command": "sums", "kind": kind.name(), "points": alphas.len() }
    });
    eprintln!("{summary}");
    Ok(())
}
