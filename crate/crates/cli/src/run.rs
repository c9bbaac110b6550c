//! Executes parsed jobs and formats their reports.

use serde_json::{json, Map, Value};

use stieltjes_core::partition::random_partition;
use stieltjes_core::regulated::Regulated;
use stieltjes_core::sums::estimate_rhs;
use stieltjes_core::{
    boundary_term, check_sum_bounds, integrate_limit, oracle_gauge, oracle_refinement, IntegralKind, TagMode,
};

use crate::dsl::{Command, JobSpec};

pub const EXIT_OK: i32 = 0;
/// Computation failed or a certificate was not met.
pub const EXIT_FAILED: i32 = 1;
/// The job could not be parsed or the invocation was malformed.
pub const EXIT_USAGE: i32 = 2;

/// Cells of the random partition sampled by `verify-bounds`, before the
/// jump points are added.
pub const BOUNDS_PARTITION_CELLS: usize = 16;

/// Relative floor added to every residual allowance.
pub const RESIDUAL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub value: f64,
    pub error_bound: f64,
    pub kind: Option<IntegralKind>,
    /// Named residuals; a residual above its allowance fails the job.
    /// `None` marks a check skipped for lack of a variation bound.
    pub residuals: Vec<(&'static str, Option<f64>)>,
    pub converged: Option<bool>,
    pub levels: Option<u32>,
    pub ok: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub command: Option<Command>,
    pub message: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub result: Result<Report, Failure>,
}

impl Outcome {
    pub fn usage_error(command: Option<Command>, message: impl Into<String>) -> Self {
        Outcome { exit_code: EXIT_USAGE, result: Err(Failure { command, message: message.into(), seed: None }) }
    }

    pub fn to_json(&self) -> Value {
        match &self.result {
            Ok(r) => r.to_json(),
            Err(e) => json!({
                "command": e.command.map(|c| c.as_str()),
                "error": e.message,
                "seed": e.seed,
            }),
        }
    }

    pub fn to_human(&self) -> String {
        match &self.result {
            Ok(r) => r.to_human(),
            Err(e) => match e.command {
                Some(c) => format!("{c}: error: {}\n", e.message),
                None => format!("error: {}\n", e.message),
            },
        }
    }
}

impl Report {
    /// JSON object whose key set depends only on the command.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command.as_str()));
        m.insert("value".into(), json!(self.value));
        m.insert("error_bound".into(), json!(self.error_bound));
        m.insert("kind".into(), json!(self.kind.map(|k| k.to_string())));
        if matches!(self.command, Command::VerifyMain | Command::VerifyBounds) {
            let residuals: Map<String, Value> = self.residuals.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            m.insert("residuals".into(), Value::Object(residuals));
        }
        if self.command == Command::Oracle {
            m.insert("converged".into(), json!(self.converged));
            m.insert("levels".into(), json!(self.levels));
        }
        m.insert("ok".into(), json!(self.ok));
        m.insert("seed".into(), json!(self.seed));
        Value::Object(m)
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("{}", self.command);
        if let Some(k) = self.kind {
            out += &format!(" ({k})");
        }
        out += &format!(": {}\n", if self.ok { "ok" } else { "FAILED" });
        out += &format!("  value        {}\n", sig(self.value, 6));
        out += &format!("  error_bound  {}\n", sig(self.error_bound, 6));
        for (name, v) in &self.residuals {
            out += &format!("  {name:<12} {}\n", v.map_or("skipped".into(), |v| sig(v, 6)));
        }
        if let (Some(c), Some(l)) = (self.converged, self.levels) {
            out += &format!("  converged    {c} after {l} levels\n");
        }
        out += &format!("  seed         {}\n", self.seed);
        out
    }
}

/// `x` with `digits` significant digits, fixed or scientific like `%g`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa))
    } else {
        trim(&format!("{:.*}", (digits as i32 - 1 - exp) as usize, x))
    }
}

pub fn run(job: &JobSpec) -> Outcome {
    let failed = |message: String| Outcome {
        exit_code: EXIT_FAILED,
        result: Err(Failure { command: Some(job.command), message, seed: Some(job.seed) }),
    };
    let (f, g) = match (job.f.build(), job.g.build()) {
        (Ok(f), Ok(g)) => (f, g),
        (Err(e), _) | (_, Err(e)) => return failed(e.to_string()),
    };
    let report = match job.command {
        Command::Integrate => integrate(job, f.as_ref(), g.as_ref()),
        Command::VerifyMain => verify_main(job, f.as_ref(), g.as_ref()),
        Command::VerifyBounds => verify_bounds(job, f.as_ref(), g.as_ref()),
        Command::Oracle => oracle(job, f.as_ref(), g.as_ref()),
    };
    match report {
        Ok(r) => Outcome { exit_code: if r.ok { EXIT_OK } else { EXIT_FAILED }, result: Ok(r) },
        Err(e) => failed(e.to_string()),
    }
}

fn base_report(job: &JobSpec) -> Report {
    Report {
        command: job.command,
        value: f64::NAN,
        error_bound: 0.0,
        kind: job.kind,
        residuals: Vec::new(),
        converged: None,
        levels: None,
        ok: true,
        seed: job.seed,
    }
}

fn integrate(job: &JobSpec, f: &dyn Regulated, g: &dyn Regulated) -> stieltjes_core::Result<Report> {
    let kind = job.kind.unwrap_or(IntegralKind::K);
    let r = integrate_limit(f, g, kind, job.tol)?;
    Ok(Report { value: r.value, error_bound: r.error_bound, kind: Some(kind), ..base_report(job) })
}

fn verify_main(job: &JobSpec, f: &dyn Regulated, g: &dyn Regulated) -> stieltjes_core::Result<Report> {
    use IntegralKind::*;
    let k = integrate_limit(f, g, K, job.tol)?;
    let y = integrate_limit(f, g, Y, job.tol)?;
    let d = integrate_limit(f, g, D, job.tol)?;
    let k_rev = integrate_limit(g, f, K, job.tol)?;
    let d_rev = integrate_limit(g, f, D, job.tol)?;
    let boundary = boundary_term(f, g)?;
    let scale = [k.value, y.value, d.value, k_rev.value, d_rev.value, boundary]
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let floor = RESIDUAL_SLACK * scale;
    let checks = [
        ("k_y", (k.value - y.value).abs(), k.error_bound + y.error_bound),
        ("k_by_parts", (k.value - (boundary - d_rev.value)).abs(), k.error_bound + d_rev.error_bound),
        ("d_by_parts", (d.value - (boundary - k_rev.value)).abs(), d.error_bound + k_rev.error_bound),
    ];
    let ok = checks.iter().all(|&(_, r, allowance)| r <= allowance + floor);
    Ok(Report {
        value: k.value,
        error_bound: k.error_bound,
        kind: Some(K),
        residuals: checks.iter().map(|&(name, r, _)| (name, Some(r))).collect(),
        ok,
        ..base_report(job)
    })
}

fn verify_bounds(job: &JobSpec, f: &dyn Regulated, g: &dyn Regulated) -> stieltjes_core::Result<Report> {
    let iv = f.interval();
    let mut jumps = f.jump_points();
    jumps.extend(g.jump_points());
    let partition = random_partition(iv, BOUNDS_PARTITION_CELLS, &jumps, TagMode::Free, job.seed)?;
    let sums = check_sum_bounds(f, g, &partition)?;
    let mut residuals: Vec<(&'static str, Option<f64>)> = Vec::new();
    let mut ok = true;
    let mut push = |name, lhs: f64, rhs: Option<f64>| {
        let r = rhs.map(|rhs| lhs - rhs);
        if let Some(r) = r {
            ok &= r <= RESIDUAL_SLACK * lhs.abs().max(1.0);
        }
        residuals.push((name, r));
    };
    for (name, check) in sums.checks() {
        push(name, check.lhs.abs(), check.rhs);
    }
    let (by_g, by_f) = estimate_rhs(f, g)?;
    const EST1: [&str; 3] = ["est1_k", "est1_y", "est1_d"];
    const EST2: [&str; 3] = ["est2_k", "est2_y", "est2_d"];
    for (i, kind) in IntegralKind::ALL.into_iter().enumerate() {
        let r = integrate_limit(f, g, kind, job.tol)?;
        let lhs = (r.value.abs() - r.error_bound).max(0.0);
        push(EST1[i], lhs, by_g);
        push(EST2[i], lhs, by_f);
    }
    Ok(Report { value: sums.s.value, error_bound: 0.0, kind: None, residuals, ok, ..base_report(job) })
}

fn oracle(job: &JobSpec, f: &dyn Regulated, g: &dyn Regulated) -> stieltjes_core::Result<Report> {
    let kind = job.kind.unwrap_or(IntegralKind::K);
    let r = match kind {
        IntegralKind::K => oracle_gauge(f, g, job.tol, job.seed)?,
        _ => oracle_refinement(f, g, kind, job.tol, job.seed)?,
    };
    Ok(Report {
        value: r.value,
        error_bound: r.achieved_spread,
        kind: Some(kind),
        converged: Some(r.converged),
        levels: Some(r.levels),
        ok: r.converged,
        ..base_report(job)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_spec;

    fn run_text(text: &str) -> Outcome {
        run(&parse_spec(text).unwrap())
    }

    const CHI: &str = "step[0,1]{nodes:0,0.5,1; at:0,1,1; on:0,1}";
    const ID: &str = "affine[0,1]{slope:1}";

    #[test]
    fn verify_main_on_indicator_and_identity() {
        let o = run_text(&format!("verify-main f={CHI} g={ID}"));
        assert_eq!(o.exit_code, EXIT_OK);
        let r = o.result.unwrap();
        assert_eq!(r.value, 0.5);
        assert!(r.residuals.iter().all(|(_, v)| *v == Some(0.0)), "{r:?}");
    }

    #[test]
    fn dushnik_against_open_indicator() {
        let o = run_text(&format!("integrate kind=D f={ID} g=step[0,1]{{nodes:0,0.5,1; at:0,0,1; on:0,1}}"));
        assert_eq!(o.exit_code, EXIT_OK);
        assert_eq!(o.result.unwrap().value, 0.5);
    }

    #[test]
    fn unreachable_oracle_tolerance_fails() {
        let o = run_text(&format!("oracle kind=D tol=1e-30 f={ID} g={ID}"));
        assert_eq!(o.exit_code, EXIT_FAILED);
        let r = o.result.unwrap();
        assert_eq!(r.converged, Some(false));
        assert_eq!(o_json_keys(&r), ["command", "converged", "error_bound", "kind", "levels", "ok", "seed", "value"]);
    }

    fn o_json_keys(r: &Report) -> Vec<String> {
        let mut keys: Vec<String> = r.to_json().as_object().unwrap().keys().cloned().collect();
        keys.sort();
        keys
    }

    #[test]
    fn verify_bounds_skips_unknown_variation() {
        let o = run_text(&format!("verify-bounds seed=4 f=sin[0,1]{{freq:7; var:unknown}} g={CHI}"));
        assert_eq!(o.exit_code, EXIT_OK, "{o:?}");
        let r = o.result.unwrap();
        let skipped: Vec<_> = r.residuals.iter().filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
        assert_eq!(skipped, ["sum2_s", "sum2_sy", "est2_k", "est2_y", "est2_d"]);
    }

    #[test]
    fn computation_errors_exit_one() {
        let o = run_text(
            "integrate f=sin[0,1]{freq:3; var:unknown} g=sin[0,1]{freq:5; var:unknown}",
        );
        assert_eq!(o.exit_code, EXIT_FAILED);
        let j = o.to_json();
        assert_eq!(j["command"], "integrate");
        assert!(j["error"].as_str().unwrap().contains("variation"), "{j}");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.5, 6), "0.5");
        assert_eq!(sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(sig(123456789.0, 6), "1.23457e8");
        assert_eq!(sig(-2.5e-7, 6), "-2.5e-7");
        assert_eq!(sig(999999.6, 6), "1e6");
        assert_eq!(sig(0.0, 6), "0");
    }
}
