//! `bound` and `certify`.

use std::time::Instant;

use growthbound::asymptotics::{theorem1_bound, wilkinson_bound_closed_form};
use growthbound::lp::{
    build_geomean_lp_with, build_improved_lp_with, build_wilkinson_lp_with, certify,
    solve_float, verify_certificate, Certificate, CertifiedBound, LpInstance, PrimalDualSolution,
    Selector, Status,
};
use growthbound::matrix::fmt_rational;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProgramKind {
    Wilkinson,
    Geomean,
    Improved,
}

impl ProgramKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProgramKind::Wilkinson => "wilkinson",
            ProgramKind::Geomean => "geomean",
            ProgramKind::Improved => "improved",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundOptions {
    pub n: usize,
    pub program: ProgramKind,
    pub selector: Selector,
    pub certify: bool,
    pub precision_bits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub status: Status,
    pub rows: usize,
    pub iterations: usize,
    pub bland_switches: usize,
}

/// Wall-clock timings in milliseconds. Kept out of the JSON report so that
/// repeated runs produce identical files.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Timings {
    pub build_ms: f64,
    pub solve_ms: f64,
    pub certify_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub program: ProgramKind,
    pub selector: String,
    pub float_objective: f64,
    /// Exact rational bound `p/q`, when certified.
    pub certified_bound: Option<String>,
    pub certified_bound_f64: Option<f64>,
    pub certificate_method: Option<String>,
    pub verified: Option<bool>,
    pub wilkinson_closed_form: f64,
    pub theorem1_value: f64,
    pub solver: SolverStats,
    #[serde(skip)]
    pub timings: Timings,
}

impl BoundReport {
    /// Best available bound: certified when present, the float objective
    /// otherwise.
    pub fn bound(&self) -> f64 {
        self.certified_bound_f64.unwrap_or(self.float_objective)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "n = {}, program = {}, selector = {}\n",
            self.n,
            self.program.as_str(),
            self.selector
        ));
        s.push_str(&format!(
            "float objective        ln g <= {:.10}   (g <= {:.6e})\n",
            self.float_objective,
            self.float_objective.exp()
        ));
        if let (Some(b), Some(bf)) = (&self.certified_bound, self.certified_bound_f64) {
            let digits = if b.len() > 60 { format!("{}...", &b[..57]) } else { b.clone() };
            s.push_str(&format!(
                "certified bound        ln g <= {:.10}   (g <= {:.6e})  [{}{}]\n",
                bf,
                bf.exp(),
                self.certificate_method.as_deref().unwrap_or("?"),
                if self.verified == Some(true) { ", verified" } else { ", NOT verified" }
            ));
            s.push_str(&format!("certified rational     {digits}\n"));
        }
        s.push_str(&format!(
            "wilkinson closed form  ln g <= {:.10}\n",
            self.wilkinson_closed_form
        ));
        s.push_str(&format!(
            "theorem 1 curve        ln g <= {:.10}\n",
            self.theorem1_value
        ));
        s.push_str(&format!(
            "solver: {:?}, {} rows, {} iterations\n",
            self.solver.status, self.solver.rows, self.solver.iterations
        ));
        s
    }
}

pub fn build_instance(
    n: usize,
    program: ProgramKind,
    selector: Selector,
    bits: u32,
) -> CliResult<LpInstance> {
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    Ok(match program {
        ProgramKind::Wilkinson => build_wilkinson_lp_with(n, bits)?,
        ProgramKind::Geomean => build_geomean_lp_with(n, None, bits)?,
        ProgramKind::Improved => build_improved_lp_with(n, selector, bits)?,
    })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Float solve of an instance; any status but optimal is a solver failure.
pub fn solve(lp: &LpInstance) -> CliResult<PrimalDualSolution> {
    let sol = solve_float(lp)?;
    if sol.status != Status::Optimal {
        return Err(CliError::Solver(format!(
            "simplex ended with status {:?} after {} iterations",
            sol.status, sol.iterations
        )));
    }
    Ok(sol)
}

/// Build, solve and optionally certify. The certificate is returned when
/// certification was requested, verified or not.
pub fn run_bound(opts: &BoundOptions) -> CliResult<(BoundReport, Option<Certificate>)> {
    let t = Instant::now();
    let lp = build_instance(opts.n, opts.program, opts.selector, opts.precision_bits)?;
    let build_ms = ms(t);
    let t = Instant::now();
    let sol = solve(&lp)?;
    let solve_ms = ms(t);
    let mut certified: Option<CertifiedBound> = None;
    let mut certify_ms = 0.0;
    if opts.certify {
        let t = Instant::now();
        certified = Some(certify(&lp, &sol)?);
        certify_ms = ms(t);
    }
    let report = BoundReport {
        n: opts.n,
        program: opts.program,
        selector: lp.selector.to_string(),
        float_objective: sol.objective,
        certified_bound: certified.as_ref().map(|c| fmt_rational(&c.bound)),
        certified_bound_f64: certified.as_ref().map(|c| c.bound_f64()),
        certificate_method: certified.as_ref().map(|c| c.method.as_str().to_string()),
        verified: certified.as_ref().map(|c| c.verified),
        wilkinson_closed_form: wilkinson_bound_closed_form(opts.n).exact_sum,
        theorem1_value: theorem1_bound(opts.n),
        solver: SolverStats {
            status: sol.status,
            rows: lp.num_rows(),
            iterations: sol.iterations,
            bland_switches: sol.bland_switches,
        },
        timings: Timings {
            build_ms,
            solve_ms,
            certify_ms,
        },
    };
    let cert = certified.map(|c| Certificate::new(&lp, &c));
    Ok((report, cert))
}

/// Outcome of re-verifying a certificate file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub n: usize,
    pub selector: String,
    pub multipliers: usize,
    pub bound: String,
    pub bound_f64: f64,
    pub passed: bool,
    pub message: String,
}

pub fn check_certificate(text: &str) -> CliResult<CheckReport> {
    let cert = Certificate::from_json(text)?;
    let (passed, message) = match verify_certificate(&cert) {
        Ok(_) if cert.verified => (true, "multipliers and bound re-verified".to_string()),
        Ok(_) => (false, "certificate is marked unverified".to_string()),
        Err(e) => (false, e.to_string()),
    };
    Ok(CheckReport {
        n: cert.n,
        selector: cert.selector.clone(),
        multipliers: cert.multipliers.len(),
        bound: cert.bound.clone(),
        bound_f64: cert.bound_f64,
        passed,
        message,
    })
}
