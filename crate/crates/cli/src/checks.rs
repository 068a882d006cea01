//! `constants` and `selftest`.

use std::fmt::Write;

use growthbound::asymptotics::{
    check_base_case, check_g_tail, constant_expression, ConstantsTable, GridCheck, BETA,
};
use growthbound::det_bounds::relaxation::{case_split_factor, entropy_factor, maximize_unit_interval};
use growthbound::ge::{eliminate, wilkinson_matrix, PivotStrategy};
use growthbound::lp::{
    build_improved_lp, build_wilkinson_lp, certify, exact_simplex, wilkinson_closed_form_dual,
    ClosedFormObjective, Selector,
};
use num_rational::BigRational;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::report::solve;
use crate::CliResult;

/// A named pass/fail record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Grid metadata for "for all x" claims.
    pub grid: Option<GridCheck>,
}

impl CheckRecord {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckRecord {
            name: name.into(),
            passed,
            detail,
            grid: None,
        }
    }

    fn grid(g: GridCheck) -> Self {
        CheckRecord {
            name: g.name.clone(),
            passed: g.passed,
            detail: format!(
                "min {:.6} at {:.1} over {} points on ({}, {}], {}",
                g.min_margin, g.argmin, g.points, g.lo, g.hi, g.method
            ),
            grid: Some(g),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub constants: ConstantsTable,
    pub checks: Vec<CheckRecord>,
}

impl ConstantsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.constants.entries {
            let _ = writeln!(s, "{:<24} {:<22.15} {}", e.name, e.value, e.formula);
        }
        s.push('\n');
        s.push_str(&render_checks(&self.checks));
        s
    }
}

pub fn render_checks(checks: &[CheckRecord]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(
            s,
            "[{}] {:<28} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    s
}

pub fn constants_report() -> CliResult<ConstantsReport> {
    let table = ConstantsTable::compute();
    let mut checks = Vec::new();
    checks.push(CheckRecord::new(
        "alpha-minus-gamma-star",
        table.alpha - table.gamma_star < 0.00024 && table.alpha >= table.gamma_star,
        format!("{:.3e} < 2.4e-4", table.alpha - table.gamma_star),
    ));
    let (_, ent) = maximize_unit_interval(entropy_factor, 10_000);
    checks.push(CheckRecord::new(
        "entropy-factor-max",
        (ent - std::f64::consts::SQRT_2).abs() < 1e-9,
        format!("max {ent:.12} vs sqrt2"),
    ));
    let (_, cs) = maximize_unit_interval(case_split_factor, 10_000);
    checks.push(CheckRecord::new(
        "case-split-factor-max",
        (1.167..=1.169).contains(&cs) && cs < (11.0f64 / 8.0).sqrt(),
        format!("max {cs:.6} in [1.167, 1.169], below sqrt(11/8)"),
    ));
    checks.push(CheckRecord::grid(check_base_case(BETA, 0.1)?));
    checks.push(CheckRecord::grid(check_g_tail(BETA, 1700.0, 1e7, 20_000, -0.08)?));
    let c = constant_expression(BETA);
    checks.push(CheckRecord::new(
        "constant-term",
        c > 0.086,
        format!("{c:.6} > 0.086"),
    ));
    Ok(ConstantsReport {
        constants: table,
        checks,
    })
}

/// Quick end-to-end checks of every component.
pub fn selftest() -> CliResult<Vec<CheckRecord>> {
    let mut out = Vec::new();

    let n = 20;
    let w: growthbound::Matrix<BigRational> = wilkinson_matrix(n);
    let g = eliminate(&w, PivotStrategy::Partial)?.growth_factor_exact();
    let expect = BigRational::from_integer(num_bigint::BigInt::from(2).pow(n as u32 - 1));
    out.push(CheckRecord::new(
        "partial-pivoting-growth",
        g == expect,
        format!("growth of the {n} x {n} Wilkinson matrix is 2^{}", n - 1),
    ));

    let lp = build_wilkinson_lp(50)?;
    let sol = solve(&lp)?;
    let closed = growthbound::asymptotics::wilkinson_bound_closed_form(50).exact_sum;
    out.push(CheckRecord::new(
        "wilkinson-lp",
        (sol.objective - closed).abs() < 1e-7,
        format!("{:.10} vs closed form {:.10}", sol.objective, closed),
    ));

    let lp = build_wilkinson_lp(12)?;
    let exact = exact_simplex(&lp)?;
    let closed = wilkinson_closed_form_dual(12, ClosedFormObjective::HeadTail)?;
    out.push(CheckRecord::new(
        "exact-simplex-closed-form",
        exact.verified && closed.verified && exact.bound == closed.bound,
        "exact simplex equals the closed-form dual at n = 12".into(),
    ));

    let lp = build_improved_lp(200, Selector::band())?;
    let sol = solve(&lp)?;
    let cert = certify(&lp, &sol)?;
    let wilk = growthbound::asymptotics::wilkinson_bound_closed_form(200).exact_sum;
    out.push(CheckRecord::new(
        "improved-lp-certified",
        cert.verified && cert.bound_f64() < wilk && cert.bound_f64() >= sol.objective - 1e-6,
        format!("certified {:.8} below Wilkinson {:.8} at n = 200", cert.bound_f64(), wilk),
    ));

    let consts = constants_report()?;
    out.extend(consts.checks);
    Ok(out)
}
