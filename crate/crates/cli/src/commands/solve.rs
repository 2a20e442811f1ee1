//! `dioph solve` — enumerate every prime solution at one scale and emit them
//! as CSV, one row per quadruple.

use dioph::{solver, Result};

use super::{artifact_name, csv_into_bytes, csv_writer, emit, fmt17, load_table, write_record, Ctx, ARTIFACT_VERSION};

pub const HEADER: [&str; 10] = [
    "p1",
    "p2",
    "p3",
    "p4",
    "form_value",
    "weight",
    "x",
    "eta",
    "params_digest",
    "artifact_version",
];

pub fn run(ctx: &Ctx, x: f64) -> Result<()> {
    let params = &ctx.config.params;
    let eta = ctx.config.eta.eta_at(x);
    let table = load_table(solver::required_prime_limit(x))?;
    let outcome = solver::find_solutions(&table, params, x, eta)?;

    let mut w = csv_writer();
    write_record(&mut w, HEADER)?;
    for sol in &outcome.solutions {
        let residual = solver::residual(&params.lambda, params.omega, params.k, sol.p);
        let weight: f64 = sol.p.iter().map(|&p| (p as f64).ln()).product();
        write_record(&mut w, [
            sol.p[0].to_string(),
            sol.p[1].to_string(),
            sol.p[2].to_string(),
            sol.p[3].to_string(),
            fmt17(residual.to_f64()),
            fmt17(weight),
            fmt17(x),
            fmt17(eta),
            ctx.digest.clone(),
            ARTIFACT_VERSION.to_string(),
        ])?;
    }
    let bytes = csv_into_bytes(w)?;
    emit(ctx, &artifact_name("solve", &ctx.digest, "csv"), &bytes)?;

    let summary = serde_json::json!({
        "info": {
            "command": "solve",
            "x": x,
            "eta": eta,
            "solutions": outcome.solutions.len(),
            "triangle_mass": outcome.triangle_mass,
            "candidates": outcome.stats.candidates,
        }
    });
    eprintln!("{summary}");
    Ok(())
}
