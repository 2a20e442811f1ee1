//! `dioph scan` — run the solver along the scale sequence X_n = q_n^(7/3)
//! derived from the continued-fraction convergents p_n/q_n of the coefficient
//! ratio, and emit one summary row per convergent.

use dioph::{contfrac, solver, Result};

use super::{artifact_name, csv_into_bytes, csv_writer, emit, fmt17, load_table, write_record, Ctx, ARTIFACT_VERSION};

pub const HEADER: [&str; 10] = [
    "n",
    "p",
    "q",
    "x",
    "eta",
    "solutions",
    "triangle_mass",
    "normalized_mass",
    "params_digest",
    "artifact_version",
];

pub fn run(ctx: &Ctx, n_convergents: usize, x_cap: f64) -> Result<()> {
    let params = &ctx.config.params;
    let policy = &ctx.config.eta;
    let exp = contfrac::expand(&params.ratio, n_convergents)?;
    let xs = contfrac::x_sequence(&exp, contfrac::SCALE_EXPONENT, x_cap)?;
    // x_sequence truncates at the cap; a terminating (rational) expansion can
    // also yield fewer convergents than requested.
    let rows = xs.len().min(n_convergents);

    // The solver needs X ≥ 2 (below that the box [δX, X] holds no prime
    // power); early convergents with q = 1 produce such scales and get an
    // explicit empty row instead of a search.
    let first_searchable = xs.iter().position(|&x| x >= 2.0).unwrap_or(rows);
    let searched = if first_searchable < rows {
        let table = load_table(solver::required_prime_limit(xs[rows - 1]))?;
        solver::scan_sequence(&table, params, policy, &xs[first_searchable..rows])?
    } else {
        Vec::new()
    };

    let mut w = csv_writer();
    write_record(&mut w, HEADER)?;
    for (i, &x) in xs.iter().take(rows).enumerate() {
        let (pnum, qden) = &exp.convergents[i];
        let (eta, solutions, mass, norm) = if i < first_searchable {
            (policy.eta_at(x), 0usize, 0.0, 0.0)
        } else {
            let pt = &searched[i - first_searchable];
            (pt.eta, pt.solutions, pt.triangle_mass, pt.normalized_mass)
        };
        write_record(&mut w, [
            i.to_string(),
            pnum.to_string(),
            qden.to_string(),
            fmt17(x),
            fmt17(eta),
            solutions.to_string(),
            fmt17(mass),
            fmt17(norm),
            ctx.digest.clone(),
            ARTIFACT_VERSION.to_string(),
        ])?;
    }
    let bytes = csv_into_bytes(w)?;
    emit(ctx, &artifact_name("scan", &ctx.digest, "csv"), &bytes)?;

    let summary = serde_json::json!({
        "info": {
            "command": "scan",
            "convergents": rows,
            "searched": rows - first_searchable,
            "terminated": exp.terminated,
        }
    });
    eprintln!("{summary}");
    Ok(())
}
