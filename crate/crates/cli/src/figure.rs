//! Figure data: Wilkinson versus improved bounds over `n`, and the active
//! constraints of one solved instance.

use std::fmt::Write;

use growthbound::lp::{
    build_improved_lp_with, certify, exact_simplex_with_vertex, ceil_sqrt2_times, LpInstance,
    Selector,
};
use growthbound::asymptotics::{theorem1_bound, wilkinson_bound_closed_form};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::solve;
use crate::svg::{Plot, Series};
use crate::{CliError, CliResult};

/// Default number of geometric sample points.
pub const DEFAULT_POINTS: usize = 40;

/// Half-width of the ratio window `(k + l)/k` around `sqrt 2` counted as
/// near the band.
pub const NEAR_BAND: f64 = 0.1;

/// Relative slack below which a row counts as active in a float solve.
pub const ACTIVITY_TOLERANCE: f64 = 1e-7;

/// Distinct integers `round(nmax^(i/(points-1)))`, always containing 1 and
/// `nmax`.
pub fn geometric_samples(nmax: usize, points: usize) -> Vec<usize> {
    if nmax <= 1 || points <= 1 {
        return vec![nmax.max(1)];
    }
    let l = (nmax as f64).ln();
    let mut out: Vec<usize> = (0..points)
        .map(|i| (l * i as f64 / (points - 1) as f64).exp().round() as usize)
        .map(|v| v.clamp(1, nmax))
        .collect();
    out.push(nmax);
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub wilkinson: f64,
    pub improved: f64,
    pub theorem1: f64,
    pub certified: bool,
}

impl GrowthRow {
    pub fn gap(&self) -> f64 {
        self.wilkinson - self.improved
    }
}

/// One row of the growth figure. With `certify`, the improved column is the
/// certified rational bound and the row is flagged only when verification
/// succeeded.
pub fn growth_row(n: usize, selector: Selector, do_certify: bool, bits: u32) -> CliResult<GrowthRow> {
    let lp = build_improved_lp_with(n, selector, bits)?;
    let sol = solve(&lp)?;
    let (improved, certified) = if do_certify {
        let c = certify(&lp, &sol)?;
        if !c.verified {
            return Err(CliError::Verification(format!(
                "certificate for n = {n} failed: {}",
                c.diagnostics.join("; ")
            )));
        }
        (c.bound_f64(), true)
    } else {
        (sol.objective, false)
    };
    Ok(GrowthRow {
        n,
        wilkinson: wilkinson_bound_closed_form(n).exact_sum,
        improved,
        theorem1: theorem1_bound(n),
        certified,
    })
}

/// Rows for every sampled `n`, solved in parallel and returned in order.
pub fn growth_rows(
    nmax: usize,
    points: usize,
    selector: Selector,
    do_certify: bool,
    bits: u32,
) -> CliResult<Vec<GrowthRow>> {
    if nmax < 2 {
        return Err(CliError::Usage("nmax must be at least 2".into()));
    }
    // Largest instances first so that the pool stays busy.
    let mut ns = geometric_samples(nmax, points);
    ns.reverse();
    let mut rows = ns
        .par_iter()
        .map(|&n| growth_row(n, selector, do_certify, bits))
        .collect::<CliResult<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut s = String::from("n,wilkinson_log_bound,improved_log_bound,theorem1_log_bound,certified\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.12},{:.12},{:.12},{}",
            r.n, r.wilkinson, r.improved, r.theorem1, r.certified
        );
    }
    s
}

pub fn growth_svg(rows: &[GrowthRow]) -> String {
    let pick = |f: fn(&GrowthRow) -> f64| rows.iter().map(|r| (r.n as f64, f(r))).collect();
    Plot {
        title: "Bounds on the log growth factor".into(),
        x_label: "n".into(),
        y_label: "ln g(n)".into(),
        series: vec![
            Series {
                label: "Wilkinson".into(),
                color: "#d62728".into(),
                points: pick(|r| r.wilkinson),
                scatter: false,
            },
            Series {
                label: "improved LP".into(),
                color: "#1f77b4".into(),
                points: pick(|r| r.improved),
                scatter: false,
            },
            Series {
                label: "alpha ln^2 n + 0.91 ln n".into(),
                color: "#7f7f7f".into(),
                points: pick(|r| r.theorem1),
                scatter: false,
            },
        ],
    }
    .render()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveRow {
    pub k: usize,
    pub ell: usize,
    pub slack: f64,
    pub multiplier: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveConstraintRecord {
    pub n: usize,
    pub selector: String,
    pub exact: bool,
    pub tolerance: f64,
    pub rows: usize,
    pub active: Vec<ActiveRow>,
    /// Active rows with `l = 0`, over all active rows.
    pub wilkinson_fraction: f64,
    /// Active long-range rows off the diagonal with `|(k + l)/k - sqrt2| <= 0.1`.
    pub near_band: usize,
    /// Active rows with `k + l = n`.
    pub on_diagonal: usize,
}

impl ActiveConstraintRecord {
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.active.iter().map(|r| (r.k, r.ell)).collect()
    }
}

fn summarize(lp: &LpInstance, exact: bool, tolerance: f64, active: Vec<ActiveRow>) -> ActiveConstraintRecord {
    let n = lp.n;
    let wilk = active.iter().filter(|r| r.ell == 0).count();
    let near_band = active
        .iter()
        .filter(|r| r.ell > 0 && r.k + r.ell != n)
        .filter(|r| ((r.k + r.ell) as f64 / r.k as f64 - std::f64::consts::SQRT_2).abs() <= NEAR_BAND)
        .count();
    let on_diagonal = active.iter().filter(|r| r.ell > 0 && r.k + r.ell == n).count();
    ActiveConstraintRecord {
        n,
        selector: lp.selector.to_string(),
        exact,
        tolerance,
        rows: lp.num_rows(),
        wilkinson_fraction: if active.is_empty() { 0.0 } else { wilk as f64 / active.len() as f64 },
        near_band,
        on_diagonal,
        active,
    }
}

/// Rows with slack at most `tolerance (1 + |rhs|)` at the float optimum.
/// The empty row `k = 1` is never reported.
pub fn active_constraints(n: usize, selector: Selector, bits: u32, tolerance: f64) -> CliResult<ActiveConstraintRecord> {
    let lp = build_improved_lp_with(n, selector, bits)?;
    let sol = solve(&lp)?;
    let slacks = lp.slacks_q(&sol.primal);
    let active = lp
        .rows
        .iter()
        .enumerate()
        .filter(|(r, row)| row.k > 1 && slacks[*r] <= tolerance * (1.0 + row.rhs_float.abs()))
        .map(|(r, row)| ActiveRow {
            k: row.k,
            ell: row.ell,
            slack: slacks[r],
            multiplier: sol.dual[r],
        })
        .collect();
    Ok(summarize(&lp, false, tolerance, active))
}

/// Active set at the exact optimal vertex: rows with zero slack.
pub fn active_constraints_exact(n: usize, selector: Selector, bits: u32) -> CliResult<ActiveConstraintRecord> {
    let lp = build_improved_lp_with(n, selector, bits)?;
    let (cert, q) = exact_simplex_with_vertex(&lp)?;
    let slacks = lp.slacks_exact(&q);
    let mut mult = vec![0.0; lp.num_rows()];
    for (r, y) in &cert.multipliers {
        mult[*r] = growthbound::scalar::rational_to_f64(y);
    }
    let active = lp
        .rows
        .iter()
        .enumerate()
        .filter(|(r, row)| row.k > 1 && slacks[*r].is_zero())
        .map(|(r, row)| ActiveRow {
            k: row.k,
            ell: row.ell,
            slack: 0.0,
            multiplier: mult[r],
        })
        .collect();
    Ok(summarize(&lp, true, 0.0, active))
}

/// Active rows followed by the two reference curves `k + l = ceil(sqrt2 k)`
/// and `k + l = n`.
pub fn active_csv(rec: &ActiveConstraintRecord) -> String {
    let mut s = String::from("kind,k,ell,slack,multiplier\n");
    for r in &rec.active {
        let _ = writeln!(s, "active,{},{},{:e},{:e}", r.k, r.ell, r.slack, r.multiplier);
    }
    for (kind, k, ell) in reference_lines(rec.n) {
        let _ = writeln!(s, "{kind},{k},{ell},,");
    }
    s
}

fn reference_lines(n: usize) -> Vec<(&'static str, usize, usize)> {
    let mut out = Vec::new();
    for k in 2..n {
        let j = ceil_sqrt2_times(k);
        if j <= n && j > k {
            out.push(("ref-sqrt2", k, j - k));
        }
    }
    for k in (n + 1) / 2..n {
        if k >= 1 && n - k >= 1 && n - k < k {
            out.push(("ref-diagonal", k, n - k));
        }
    }
    out
}

pub fn active_svg(rec: &ActiveConstraintRecord) -> String {
    let refs = reference_lines(rec.n);
    let line = |kind: &str| {
        refs.iter()
            .filter(|r| r.0 == kind)
            .map(|r| (r.1 as f64, r.2 as f64))
            .collect::<Vec<_>>()
    };
    Plot {
        title: format!("Active constraints at n = {}", rec.n),
        x_label: "k".into(),
        y_label: "l".into(),
        series: vec![
            Series {
                label: "active (k, l)".into(),
                color: "#1f77b4".into(),
                points: rec.active.iter().map(|r| (r.k as f64, r.ell as f64)).collect(),
                scatter: true,
            },
            Series {
                label: "k + l = sqrt2 k".into(),
                color: "#2ca02c".into(),
                points: line("ref-sqrt2"),
                scatter: false,
            },
            Series {
                label: "k + l = n".into(),
                color: "#d62728".into(),
                points: line("ref-diagonal"),
                scatter: false,
            },
        ],
    }
    .render()
}
