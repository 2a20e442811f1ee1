//! Problem parameters, hypothesis validation, and the standard parameter
//! formulas.
//!
//! An instance of the search is the data (λ₁, λ₂, λ₃, λ₄, ω, k, δ, ε)
//! together with an exact description of the ratio λ₁/λ₂ (the search theory
//! requires it irrational; the continued-fraction machinery requires it
//! *exactly specified*, not as a bare `f64`). The acceptance window η is a
//! policy — either a fixed width or a power law η(X) = c·X^(−θ) — because
//! scans shrink it with the scale.

use crate::dd::Dd;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exact description of the ratio λ₁/λ₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RatioSpec {
    /// (p + √d)/q with d > 0 and d not a perfect square.
    QuadSurd { d: i64, p: i64, q: i64 },
    /// p/q — accepted as input, but flagged by validation: the theory
    /// requires an irrational ratio.
    Rational { p: i64, q: i64 },
    /// A decimal literal known only to ±2^(−bits); irrationality cannot be
    /// certified from finite data.
    Decimal { digits: String, bits: u32 },
}

impl RatioSpec {
    /// Numeric value, accurate to f64 rounding.
    pub fn value(&self) -> f64 {
        match self {
            RatioSpec::QuadSurd { d, p, q } => {
                let s = Dd::from_u64(d.unsigned_abs()).sqrt();
                s.add_f64(*p as f64).div_f64(*q as f64).to_f64()
            }
            RatioSpec::Rational { p, q } => *p as f64 / *q as f64,
            RatioSpec::Decimal { digits, .. } => digits.parse().unwrap_or(f64::NAN),
        }
    }

    /// Parse the textual forms used by config files and the CLI:
    /// `quad:D:P:Q`, `rat:P:Q`, `dec:DIGITS:BITS`, the shorthands `sqrtN`
    /// and `golden`, or a bare decimal literal (treated as `dec` with 48
    /// certified bits).
    pub fn parse(s: &str) -> Result<RatioSpec> {
        let s = s.trim();
        if let Some(n) = s.strip_prefix("sqrt") {
            let d: i64 = n
                .parse()
                .map_err(|_| Error::Parameter(format!("bad sqrt shorthand {s:?}")))?;
            return RatioSpec::QuadSurd { d, p: 0, q: 1 }.checked();
        }
        if s == "golden" {
            return Ok(RatioSpec::QuadSurd { d: 5, p: 1, q: 2 });
        }
        if let Some(rest) = s.strip_prefix("quad:") {
            let v: Vec<&str> = rest.split(':').collect();
            if v.len() != 3 {
                return Err(Error::Parameter(format!("quad ratio needs d:p:q, got {s:?}")));
            }
            let parse = |t: &str| -> Result<i64> {
                t.parse()
                    .map_err(|_| Error::Parameter(format!("bad integer {t:?} in ratio {s:?}")))
            };
            return RatioSpec::QuadSurd {
                d: parse(v[0])?,
                p: parse(v[1])?,
                q: parse(v[2])?,
            }
            .checked();
        }
        if let Some(rest) = s.strip_prefix("rat:") {
            let v: Vec<&str> = rest.split(':').collect();
            if v.len() != 2 {
                return Err(Error::Parameter(format!("rational ratio needs p:q, got {s:?}")));
            }
            let p: i64 = v[0]
                .parse()
                .map_err(|_| Error::Parameter(format!("bad numerator in {s:?}")))?;
            let q: i64 = v[1]
                .parse()
                .map_err(|_| Error::Parameter(format!("bad denominator in {s:?}")))?;
            if q == 0 {
                return Err(Error::Parameter("rational ratio with zero denominator".into()));
            }
            return Ok(RatioSpec::Rational { p, q });
        }
        if let Some(rest) = s.strip_prefix("dec:") {
            let (digits, bits) = match rest.rsplit_once(':') {
                Some((d, b)) => {
                    let bits: u32 = b
                        .parse()
                        .map_err(|_| Error::Parameter(format!("bad bit count in {s:?}")))?;
                    (d.to_string(), bits)
                }
                None => (rest.to_string(), 48),
            };
            if digits.parse::<f64>().is_err() {
                return Err(Error::Parameter(format!("bad decimal literal {digits:?}")));
            }
            return Ok(RatioSpec::Decimal { digits, bits });
        }
        // Bare decimal literal.
        if s.parse::<f64>().is_ok() {
            return Ok(RatioSpec::Decimal {
                digits: s.to_string(),
                bits: 48,
            });
        }
        Err(Error::Parameter(format!("unrecognized ratio {s:?}")))
    }

    fn checked(self) -> Result<RatioSpec> {
        if let RatioSpec::QuadSurd { d, q, .. } = &self {
            if *d <= 0 {
                return Err(Error::Parameter(format!("surd discriminant must be positive, got {d}")));
            }
            if *q == 0 {
                return Err(Error::Parameter("surd with zero denominator".into()));
            }
            let r = (*d as f64).sqrt() as i64;
            for c in [r.saturating_sub(1), r, r + 1] {
                if c >= 0 && c * c == *d {
                    return Err(Error::Parameter(format!(
                        "discriminant {d} is a perfect square; use rat: for rational ratios"
                    )));
                }
            }
        }
        Ok(self)
    }

    /// Canonical textual form (inverse of [`RatioSpec::parse`]).
    pub fn to_text(&self) -> String {
        match self {
            RatioSpec::QuadSurd { d, p, q } => format!("quad:{d}:{p}:{q}"),
            RatioSpec::Rational { p, q } => format!("rat:{p}:{q}"),
            RatioSpec::Decimal { digits, bits } => format!("dec:{digits}:{bits}"),
        }
    }
}

/// Acceptance window policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EtaPolicy {
    Fixed(f64),
    /// η(X) = scale · X^(−theta).
    Power { theta: f64, scale: f64 },
}

impl EtaPolicy {
    pub fn eta_at(&self, x: f64) -> f64 {
        match *self {
            EtaPolicy::Fixed(e) => e,
            EtaPolicy::Power { theta, scale } => scale * x.powf(-theta),
        }
    }
}

/// Full description of one problem instance (without the scale X, which is a
/// per-run argument).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub lambda: [f64; 4],
    pub omega: f64,
    /// Exponent of the fourth prime power; the theory needs 1 < k < 14/5.
    pub k: f64,
    /// Lower box cutoff: components range over p_i^{k_i} ∈ [δX, X].
    pub delta: f64,
    /// Exponent slack used in the major-arc cutoff.
    pub epsilon: f64,
    pub ratio: RatioSpec,
}

impl Default for Params {
    /// The canonical demonstration instance √2·p₁ + p₂² − p₃² − p₄².
    fn default() -> Self {
        Params {
            lambda: [std::f64::consts::SQRT_2, 1.0, -1.0, -1.0],
            omega: 0.0,
            k: 2.0,
            delta: 1e-3,
            epsilon: 1e-2,
            ratio: RatioSpec::QuadSurd { d: 2, p: 0, q: 1 },
        }
    }
}

/// Largest admissible window exponent: η may shrink like X^(−θ) for any
/// θ < (14 − 5k)/(28k) while the expected solution count still grows.
/// Defined for 1 < k < 14/5.
pub fn eta_exponent(k: f64) -> Result<f64> {
    if !(k > 1.0 && k < 14.0 / 5.0) {
        return Err(Error::Domain(format!(
            "eta exponent defined for 1 < k < 14/5, got k = {k}"
        )));
    }
    Ok((14.0 - 5.0 * k) / (28.0 * k))
}

/// Major-arc cutoff P: the major arc is |α| ≤ P/X with
/// P = min(X^(2/5 − ε), X^(5/(6k) − ε)); the first branch is active for
/// k ≤ 25/12.
pub fn major_arc_p(x: f64, k: f64, epsilon: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("major-arc cutoff needs X ≥ 2, got {x}")));
    }
    if !(k > 0.0) || !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "major-arc cutoff needs k > 0 and ε > 0, got k = {k}, ε = {epsilon}"
        )));
    }
    let e1 = 0.4 - epsilon;
    let e2 = 5.0 / (6.0 * k) - epsilon;
    if e1 <= 0.0 || e2 <= 0.0 {
        return Err(Error::Domain(format!(
            "ε = {epsilon} too large: major-arc exponent would be non-positive"
        )));
    }
    Ok(x.powf(e1.min(e2)))
}

/// Trivial-arc cutoff R = (ln X)²/η²; the region |α| > R contributes only to
/// the rigorously bounded tail.
pub fn trivial_arc_r(x: f64, eta: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("trivial-arc cutoff needs X ≥ 2, got {x}")));
    }
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("trivial-arc cutoff needs η > 0, got {eta}")));
    }
    let l = x.ln();
    Ok(l * l / (eta * eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisStatus {
    Satisfied,
    Violated,
    /// Cannot be decided from the given data (e.g. irrationality of a
    /// finite-precision decimal ratio).
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    /// True when no hypothesis is outright violated (Unknown is allowed).
    pub fn ok(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.status != HypothesisStatus::Violated)
    }

    pub fn violations(&self) -> Vec<&HypothesisCheck> {
        self.checks
            .iter()
            .filter(|c| c.status == HypothesisStatus::Violated)
            .collect()
    }
}

impl Params {
    /// Check every structural hypothesis the analysis relies on, each
    /// independently, and report all of them; nothing is asserted.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let mut push = |name: &str, status: HypothesisStatus, detail: String| {
            checks.push(HypothesisCheck {
                name: name.to_string(),
                status,
                detail,
            });
        };

        let finite = self.lambda.iter().all(|l| l.is_finite())
            && self.omega.is_finite()
            && self.k.is_finite();
        push(
            "coefficients finite",
            if finite {
                HypothesisStatus::Satisfied
            } else {
                HypothesisStatus::Violated
            },
            format!("λ = {:?}, ω = {}, k = {}", self.lambda, self.omega, self.k),
        );

        let nonzero = self.lambda.iter().all(|l| *l != 0.0);
        push(
            "coefficients nonzero",
            if nonzero {
                HypothesisStatus::Satisfied
            } else {
                HypothesisStatus::Violated
            },
            format!("λ = {:?}", self.lambda),
        );

        let pos = self.lambda.iter().filter(|l| **l > 0.0).count();
        let mixed = pos > 0 && pos < 4;
        push(
            "mixed signs",
            if mixed {
                HypothesisStatus::Satisfied
            } else {
                HypothesisStatus::Violated
            },
            format!("{pos} positive of 4 (need both signs present)"),
        );

        let k_ok = self.k > 1.0 && self.k < 14.0 / 5.0;
        push(
            "exponent range",
            if k_ok {
                HypothesisStatus::Satisfied
            } else {
                HypothesisStatus::Violated
            },
            format!("need 1 < k < 14/5 = 2.8, got k = {}", self.k),
        );

        let (irr_status, irr_detail) = match &self.ratio {
            RatioSpec::QuadSurd { d, p, q } => (
                HypothesisStatus::Satisfied,
                format!("λ₁/λ₂ = ({p} + √{d})/{q} is a quadratic irrational"),
            ),
            RatioSpec::Rational { p, q } => (
                HypothesisStatus::Violated,
                format!("λ₁/λ₂ = {p}/{q} is rational"),
            ),
            RatioSpec::Decimal { digits, bits } => (
                HypothesisStatus::Unknown,
                format!("λ₁/λ₂ given as decimal {digits} ± 2^(−{bits}); irrationality undecidable"),
            ),
        };
        push("ratio irrational", irr_status, irr_detail);

        // Consistency between the float coefficients and the exact ratio.
        let rv = self.ratio.value();
        let actual = self.lambda[0] / self.lambda[1];
        let consistent = rv.is_finite()
            && actual.is_finite()
            && (rv - actual).abs() <= 1e-9 * rv.abs().max(actual.abs()).max(1.0);
        push(
            "ratio consistent with λ₁/λ₂",
            if consistent {
                HypothesisStatus::Satisfied
            } else {
                HypothesisStatus::Violated
            },
            format!("ratio value {rv:.17}, λ₁/λ₂ = {actual:.17}"),
        );

        let delta_ok = self.delta > 0.0 && self.delta < 1.0;
        push(
            "box cutoff",
            if delta_ok {
                HypothesisStatus::Satisfied
            } else {
                HypothesisStatus::Violated
            },
            format!("need 0 < δ < 1, got δ = {}", self.delta),
        );

        let eps_ok = self.epsilon > 0.0
            && self.epsilon < 0.4
            && (self.k <= 0.0 || self.epsilon < 5.0 / (6.0 * self.k));
        push(
            "exponent slack",
            if eps_ok {
                HypothesisStatus::Satisfied
            } else {
                HypothesisStatus::Violated
            },
            format!("need 0 < ε < min(2/5, 5/(6k)), got ε = {}", self.epsilon),
        );

        ValidationReport { checks }
    }
}

/// A problem instance plus its window policy — exactly the contents of a
/// config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: Params,
    pub eta: EtaPolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: Params::default(),
            eta: EtaPolicy::Fixed(1.0),
        }
    }
}

fn fmt_f64(x: f64) -> String {
    // 17 significant digits: round-trips every finite f64.
    format!("{x:.16e}")
}

impl RunConfig {
    /// Parse the flat `key = value` config format (UTF-8, `#` comments,
    /// blank lines ignored, later keys win). Unknown keys are errors.
    pub fn from_config_str(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut eta_theta: Option<f64> = None;
        let mut eta_scale: Option<f64> = None;
        let mut eta_fixed: Option<f64> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |v: &str| -> Result<f64> {
                v.parse()
                    .map_err(|_| Error::Config(format!("line {}: bad number {v:?} for {key}", lineno + 1)))
            };
            match key {
                "lambda" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 4 {
                        return Err(Error::Config(format!(
                            "line {}: lambda needs 4 comma-separated values",
                            lineno + 1
                        )));
                    }
                    for (i, p) in parts.iter().enumerate() {
                        cfg.params.lambda[i] = parse_f64(p)?;
                    }
                }
                "ratio" => cfg.params.ratio = RatioSpec::parse(value)?,
                "omega" => cfg.params.omega = parse_f64(value)?,
                "k" => cfg.params.k = parse_f64(value)?,
                "delta" => cfg.params.delta = parse_f64(value)?,
                "epsilon" => cfg.params.epsilon = parse_f64(value)?,
                "eta" => eta_fixed = Some(parse_f64(value)?),
                "eta_theta" => eta_theta = Some(parse_f64(value)?),
                "eta_scale" => eta_scale = Some(parse_f64(value)?),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.eta = match (eta_fixed, eta_theta) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "both eta and eta_theta given; pick one window policy".into(),
                ))
            }
            (Some(e), None) => EtaPolicy::Fixed(e),
            (None, Some(t)) => EtaPolicy::Power {
                theta: t,
                scale: eta_scale.unwrap_or(1.0),
            },
            (None, None) => cfg.eta,
        };
        Ok(cfg)
    }

    /// Canonical config text: fixed key order, 17 significant digits. Feeding
    /// this back through [`RunConfig::from_config_str`] reproduces the value
    /// exactly, and the CLI hashes this string as the parameter digest.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        s.push_str(&format!(
            "lambda = {}, {}, {}, {}\n",
            fmt_f64(p.lambda[0]),
            fmt_f64(p.lambda[1]),
            fmt_f64(p.lambda[2]),
            fmt_f64(p.lambda[3])
        ));
        s.push_str(&format!("ratio = {}\n", p.ratio.to_text()));
        s.push_str(&format!("omega = {}\n", fmt_f64(p.omega)));
        s.push_str(&format!("k = {}\n", fmt_f64(p.k)));
        s.push_str(&format!("delta = {}\n", fmt_f64(p.delta)));
        s.push_str(&format!("epsilon = {}\n", fmt_f64(p.epsilon)));
        match self.eta {
            EtaPolicy::Fixed(e) => s.push_str(&format!("eta = {}\n", fmt_f64(e))),
            EtaPolicy::Power { theta, scale } => {
                s.push_str(&format!("eta_theta = {}\n", fmt_f64(theta)));
                s.push_str(&format!("eta_scale = {}\n", fmt_f64(scale)));
            }
        }
        s
    }

    /// Apply one `key=value` override (CLI `--set`); same keys as the file.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!("override must be key=value, got {assignment:?}"))
        })?;
        let merged = format!("{} = {}", k.trim(), v.trim());
        let mut text = self.to_config_string();
        text.push_str(&merged);
        text.push('\n');
        *self = RunConfig::from_config_str(&text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_exponent_pinned_values() {
        // k = 2 → 4/56 = 1/14; k = 1.4 → 7/39.2 = 25/140.
        assert!((eta_exponent(2.0).unwrap() - 1.0 / 14.0).abs() < 1e-15);
        assert!((eta_exponent(1.4).unwrap() - 0.17857142857142858).abs() < 1e-15);
        // Limit k → 14/5 gives 0.
        assert!(eta_exponent(2.799_999_9).unwrap() < 1e-6);
    }

    #[test]
    fn eta_exponent_domain() {
        assert!(eta_exponent(1.0).is_err());
        assert!(eta_exponent(14.0 / 5.0).is_err());
        assert!(eta_exponent(3.0).is_err());
        assert!(eta_exponent(0.5).is_err());
    }

    #[test]
    fn eta_exponent_decreasing_in_k() {
        let mut prev = f64::INFINITY;
        let mut k = 1.01;
        while k < 2.79 {
            let e = eta_exponent(k).unwrap();
            assert!(e < prev, "not decreasing at k={k}");
            assert!(e > 0.0);
            prev = e;
            k += 0.01;
        }
    }

    #[test]
    fn major_arc_crossover_at_25_12() {
        let x = 1e6;
        let eps = 1e-2;
        // Below the crossover the X^(2/5−ε) branch is smaller.
        let p = major_arc_p(x, 2.0, eps).unwrap();
        assert!((p - x.powf(0.4 - eps)).abs() < 1e-9 * p);
        // Above it the X^(5/(6k)−ε) branch takes over.
        let k = 2.5;
        let p = major_arc_p(x, k, eps).unwrap();
        assert!((p - x.powf(5.0 / (6.0 * k) - eps)).abs() < 1e-9 * p);
        // At the crossover k = 25/12 both branches agree.
        let k = 25.0 / 12.0;
        let p = major_arc_p(x, k, eps).unwrap();
        assert!((p - x.powf(0.4 - eps)).abs() < 1e-9 * p);
    }

    #[test]
    fn trivial_arc_r_pinned_value() {
        // X = 1e4, η = 0.1: (ln 1e4)²/0.01.
        let r = trivial_arc_r(1e4, 0.1).unwrap();
        let l = (1e4f64).ln();
        assert!((r - l * l * 100.0).abs() < 1e-9 * r);
        assert!((r - 8483.0).abs() < 1.0);
    }

    #[test]
    fn default_instance_validates() {
        let report = Params::default().validate();
        assert!(report.ok(), "violations: {:?}", report.violations());
    }

    #[test]
    fn all_same_sign_is_rejected() {
        let mut p = Params::default();
        p.lambda = [1.0, 1.0, 1.0, 1.0];
        p.ratio = RatioSpec::Decimal {
            digits: "1".into(),
            bits: 48,
        };
        let report = p.validate();
        assert!(!report.ok());
        assert!(report.violations().iter().any(|c| c.name == "mixed signs"));
    }

    #[test]
    fn rational_ratio_is_flagged() {
        let mut p = Params::default();
        p.lambda = [1.5, 1.0, -1.0, -1.0];
        p.ratio = RatioSpec::Rational { p: 3, q: 2 };
        let report = p.validate();
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "ratio irrational" && c.status == HypothesisStatus::Violated));
    }

    #[test]
    fn decimal_ratio_is_unknown_not_violated() {
        let mut p = Params::default();
        p.lambda = [2.718281828459045, 1.0, -1.0, -1.0];
        p.ratio = RatioSpec::Decimal {
            digits: "2.718281828459045".into(),
            bits: 48,
        };
        let report = p.validate();
        assert!(report.ok());
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "ratio irrational" && c.status == HypothesisStatus::Unknown));
    }

    #[test]
    fn exponent_out_of_range_is_flagged() {
        for k in [1.0, 2.8, 3.5, 0.9] {
            let mut p = Params::default();
            p.k = k;
            assert!(!p.validate().ok(), "k = {k} should be rejected");
        }
        for k in [1.01, 2.0, 2.5, 2.79] {
            let mut p = Params::default();
            p.k = k;
            assert!(p.validate().ok(), "k = {k} should pass");
        }
    }

    #[test]
    fn ratio_parse_forms() {
        assert_eq!(
            RatioSpec::parse("sqrt2").unwrap(),
            RatioSpec::QuadSurd { d: 2, p: 0, q: 1 }
        );
        assert_eq!(
            RatioSpec::parse("golden").unwrap(),
            RatioSpec::QuadSurd { d: 5, p: 1, q: 2 }
        );
        assert_eq!(
            RatioSpec::parse("quad:61:3:7").unwrap(),
            RatioSpec::QuadSurd { d: 61, p: 3, q: 7 }
        );
        assert_eq!(
            RatioSpec::parse("rat:22:7").unwrap(),
            RatioSpec::Rational { p: 22, q: 7 }
        );
        assert!(matches!(
            RatioSpec::parse("dec:3.14159:40").unwrap(),
            RatioSpec::Decimal { bits: 40, .. }
        ));
        assert!(matches!(
            RatioSpec::parse("1.61803").unwrap(),
            RatioSpec::Decimal { .. }
        ));
        // Perfect-square discriminants are rejected.
        assert!(RatioSpec::parse("sqrt9").is_err());
        assert!(RatioSpec::parse("quad:16:0:1").is_err());
        assert!(RatioSpec::parse("nonsense").is_err());
    }

    #[test]
    fn sqrt2_value_is_accurate() {
        let r = RatioSpec::QuadSurd { d: 2, p: 0, q: 1 };
        assert_eq!(r.value(), std::f64::consts::SQRT_2);
        let g = RatioSpec::QuadSurd { d: 5, p: 1, q: 2 };
        assert!((g.value() - 1.618033988749894).abs() < 1e-15);
    }

    #[test]
    fn config_roundtrip_is_exact() {
        let mut cfg = RunConfig::default();
        cfg.params.lambda = [std::f64::consts::SQRT_2, 1.0, -1.0, -std::f64::consts::E];
        cfg.params.omega = 0.3333333333333333;
        cfg.params.k = 2.5;
        cfg.eta = EtaPolicy::Power {
            theta: 0.0714,
            scale: 2.0,
        };
        let text = cfg.to_config_string();
        let back = RunConfig::from_config_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn config_parses_comments_and_defaults() {
        let text = "# demo\nk = 2.5   # exponent\nomega = 1.5\n";
        let cfg = RunConfig::from_config_str(text).unwrap();
        assert_eq!(cfg.params.k, 2.5);
        assert_eq!(cfg.params.omega, 1.5);
        // Untouched keys keep their defaults.
        assert_eq!(cfg.params.delta, 1e-3);
        assert_eq!(cfg.eta, EtaPolicy::Fixed(1.0));
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_lines() {
        assert!(RunConfig::from_config_str("nonsense = 3\n").is_err());
        assert!(RunConfig::from_config_str("k 2.5\n").is_err());
        assert!(RunConfig::from_config_str("lambda = 1, 2, 3\n").is_err());
        assert!(RunConfig::from_config_str("eta = 1\neta_theta = 0.05\n").is_err());
    }

    #[test]
    fn overrides_apply_last_wins() {
        let mut cfg = RunConfig::default();
        cfg.apply_override("k=2.5").unwrap();
        assert_eq!(cfg.params.k, 2.5);
        cfg.apply_override("eta=0.25").unwrap();
        assert_eq!(cfg.eta, EtaPolicy::Fixed(0.25));
        assert!(cfg.apply_override("bogus=1").is_err());
    }

    #[test]
    fn eta_policy_evaluation() {
        let f = EtaPolicy::Fixed(0.5);
        assert_eq!(f.eta_at(10.0), 0.5);
        assert_eq!(f.eta_at(1e8), 0.5);
        let p = EtaPolicy::Power {
            theta: 1.0 / 14.0,
            scale: 2.0,
        };
        let x: f64 = 1e6;
        assert!((p.eta_at(x) - 2.0 * x.powf(-1.0 / 14.0)).abs() < 1e-15);
    }
}
