//! The Wilkinson, geometric-mean and improved linear programs over the
//! log-pivots `q_k = ln |p_k|`.
//!
//! Rows are stored structurally by their provenance `(k, l)`; coefficient
//! vectors are generated on demand in either variable form. In q-form row
//! `(k, 0)` reads `sum_{i<k} q_i + (1-k) q_k <= (k/2) ln k` and row `(k, l)`,
//! `l >= 1`, reads
//! `sum_{i<k} q_i + (1-l) q_k - (k-l) q_{k+l} <= (k/2) ln(11k/4)`.
//! In cumulative form the variables are `Q(k) = sum_{i<=k} q_i` and every row
//! has at most four nonzeros.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::{dyadic_ceil, ln_interval, Interval};
use crate::error::{Error, Result};
use crate::matrix::{fmt_rational, parse_rational};
use crate::scalar::rational_to_f64;

pub const DEFAULT_PRECISION_BITS: u32 = 60;
pub const DEFAULT_BAND_WIDTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    /// Variables `q_1..q_n`.
    Q,
    /// Variables `Q(1)..Q(n)`, `Q(k) = q_1 + ... + q_k`.
    Cumulative,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Q => "q",
            Form::Cumulative => "cumulative",
        }
    }
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(Form::Q),
            "cumulative" => Ok(Form::Cumulative),
            _ => Err(Error::invalid(format!("unknown form '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Program {
    Wilkinson,
    Geomean,
    Improved,
}

impl Program {
    pub fn as_str(self) -> &'static str {
        match self {
            Program::Wilkinson => "wilkinson",
            Program::Geomean => "geomean",
            Program::Improved => "improved",
        }
    }
}

impl FromStr for Program {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wilkinson" => Ok(Program::Wilkinson),
            "geomean" => Ok(Program::Geomean),
            "improved" => Ok(Program::Improved),
            _ => Err(Error::invalid(format!("unknown program '{s}'"))),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which long-range rows `(k, l)` enter the improved program. Wilkinson rows
/// are always present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selector {
    Full,
    WilkinsonOnly,
    /// `k + l` in `[sqrt(2) k - 1, sqrt(2) k + width]`.
    Band { width: usize },
    /// `k + l = n`.
    Diagonal,
    BandDiagonal { width: usize },
    /// Only `k + l = ceil(sqrt(2) k)`.
    Theorem1,
}

impl Selector {
    pub fn band() -> Self {
        Selector::Band {
            width: DEFAULT_BAND_WIDTH,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Selector::Full => "full",
            Selector::WilkinsonOnly => "wilkinson-only",
            Selector::Band { .. } => "band",
            Selector::Diagonal => "diagonal",
            Selector::BandDiagonal { .. } => "band+diagonal",
            Selector::Theorem1 => "theorem1",
        }
    }

    pub fn band_width(&self) -> Option<usize> {
        match self {
            Selector::Band { width } | Selector::BandDiagonal { width } => Some(*width),
            _ => None,
        }
    }

    /// Parse a selector name, attaching `width` to the band variants.
    pub fn parse(name: &str, width: usize) -> Result<Self> {
        Ok(match name {
            "full" => Selector::Full,
            "wilkinson-only" => Selector::WilkinsonOnly,
            "band" => Selector::Band { width },
            "diagonal" => Selector::Diagonal,
            "band+diagonal" => Selector::BandDiagonal { width },
            "theorem1" => Selector::Theorem1,
            _ => return Err(Error::invalid(format!("unknown selector '{name}'"))),
        })
    }

    /// Whether the long-range row `(k, l)` of an `n`-dimensional program is
    /// selected. The caller guarantees `1 <= l <= min(k-1, n-k)`.
    pub fn includes(&self, n: usize, k: usize, ell: usize) -> bool {
        let j = k + ell;
        match self {
            Selector::Full => true,
            Selector::WilkinsonOnly => false,
            Selector::Band { width } => in_band(k, j, *width),
            Selector::Diagonal => j == n,
            Selector::BandDiagonal { width } => j == n || in_band(k, j, *width),
            Selector::Theorem1 => j == ceil_sqrt2_times(k),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.band_width() {
            Some(w) => write!(f, "{}:{}", self.name(), w),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for Selector {
    type Err = Error;
    /// Accepts `name` or `name:width`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((name, w)) => {
                let width = w
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad band width '{w}'")))?;
                Selector::parse(name, width)
            }
            None => Selector::parse(s, DEFAULT_BAND_WIDTH),
        }
    }
}

/// `sqrt(2) k - 1 <= j <= sqrt(2) k + width`, decided in integers.
fn in_band(k: usize, j: usize, width: usize) -> bool {
    let two_k2 = 2 * (k as u128) * (k as u128);
    let lower_ok = (j as u128 + 1).pow(2) >= two_k2;
    let upper_ok = j <= width || ((j - width) as u128).pow(2) <= two_k2;
    lower_ok && upper_ok
}

/// `ceil(sqrt(2) k)`.
pub fn ceil_sqrt2_times(k: usize) -> usize {
    let two_k2 = 2 * (k as u128) * (k as u128);
    let mut j = ((2f64.sqrt() * k as f64).floor() as u128).saturating_sub(1);
    while j * j < two_k2 {
        j += 1;
    }
    j as usize
}

/// The transcendental right-hand side of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RhsExpr {
    /// `(k/2) ln k`.
    Hadamard { k: usize },
    /// `(k/2) ln(11k/4)`.
    LongRange { k: usize },
}

impl RhsExpr {
    pub fn k(&self) -> usize {
        match *self {
            RhsExpr::Hadamard { k } | RhsExpr::LongRange { k } => k,
        }
    }

    fn argument(&self) -> BigRational {
        match *self {
            RhsExpr::Hadamard { k } => BigRational::from_integer(BigInt::from(k)),
            RhsExpr::LongRange { k } => BigRational::new(BigInt::from(11 * k), BigInt::from(4)),
        }
    }

    /// Rigorous enclosure with width about `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> Interval {
        let k = self.k();
        let half_k = BigRational::new(BigInt::from(k), BigInt::from(2));
        let extra = usize::BITS - k.leading_zeros();
        ln_interval(&self.argument(), bits + extra).scale(&half_k)
    }

    pub fn value_f64(&self) -> f64 {
        let k = self.k() as f64;
        match self {
            RhsExpr::Hadamard { .. } => 0.5 * k * k.ln(),
            RhsExpr::LongRange { .. } => 0.5 * k * (2.75 * k).ln(),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            RhsExpr::Hadamard { k } => format!("({k}/2) ln {k}"),
            RhsExpr::LongRange { k } => format!("({k}/2) ln(11*{k}/4)"),
        }
    }
}

/// Smallest multiple of `2^-bits` that is `>=` the expression.
pub fn rhs_enclosure(expr: RhsExpr, bits: u32) -> BigRational {
    if let RhsExpr::Hadamard { k: 1 } = expr {
        return BigRational::zero();
    }
    dyadic_ceil(|p| expr.enclosure(p), bits)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub k: usize,
    /// `0` for Wilkinson rows.
    pub ell: usize,
    pub rhs: RhsExpr,
    pub rhs_upper: BigRational,
    pub rhs_float: f64,
}

impl ConstraintRow {
    pub fn is_wilkinson(&self) -> bool {
        self.ell == 0
    }

    /// Coefficients over `q_1..q_n` (0-based indices), ascending.
    pub fn coeffs_q(&self) -> Vec<(usize, i64)> {
        let k = self.k;
        let ell = self.ell;
        let mut out: Vec<(usize, i64)> = (0..k - 1).map(|i| (i, 1)).collect();
        if ell == 0 {
            if k > 1 {
                out.push((k - 1, 1 - k as i64));
            }
        } else {
            if ell != 1 {
                out.push((k - 1, 1 - ell as i64));
            }
            out.push((k + ell - 1, -((k - ell) as i64)));
        }
        out
    }

    /// Coefficients over `Q(1)..Q(n)` (0-based indices), ascending, at most
    /// four nonzeros.
    pub fn coeffs_cumulative(&self) -> Vec<(usize, i64)> {
        let k = self.k as i64;
        let ell = self.ell as i64;
        // Variables are 1-based here and shifted at the end.
        let mut terms: Vec<(i64, i64)> = Vec::with_capacity(4);
        if ell == 0 {
            // Q(k) - k (Q(k) - Q(k-1))
            terms.push((k, 1 - k));
            terms.push((k - 1, k));
        } else {
            // Q(k) - l (Q(k) - Q(k-1)) - (k-l) (Q(k+l) - Q(k+l-1))
            terms.push((k, 1 - ell));
            terms.push((k - 1, ell));
            terms.push((k + ell, -(k - ell)));
            terms.push((k + ell - 1, k - ell));
        }
        collect_terms(terms)
    }

    pub fn coeffs(&self, form: Form) -> Vec<(usize, i64)> {
        match form {
            Form::Q => self.coeffs_q(),
            Form::Cumulative => self.coeffs_cumulative(),
        }
    }
}

fn collect_terms(mut terms: Vec<(i64, i64)>) -> Vec<(usize, i64)> {
    terms.sort_by_key(|t| t.0);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(terms.len());
    for (var, c) in terms {
        if var < 1 {
            // Q(0) = 0
            continue;
        }
        let idx = (var - 1) as usize;
        match out.last_mut() {
            Some(last) if last.0 == idx => last.1 += c,
            _ => out.push((idx, c)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

/// Objective `sum_k c_k q_k` (to be maximized). Coefficients sum to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub label: String,
    /// Dense over `q_1..q_n`.
    pub q: Vec<BigRational>,
}

impl Objective {
    /// `q_1 - q_n`.
    pub fn head_tail(n: usize) -> Self {
        let mut q = vec![BigRational::zero(); n];
        if n > 1 {
            q[0] = BigRational::one();
            q[n - 1] = -BigRational::one();
        }
        Objective {
            label: "head-tail".into(),
            q,
        }
    }

    /// `(sum w) q_1 - sum_k w_k q_k`, normalized by `sum w`.
    pub fn weighted(weights: &[BigRational], label: &str) -> Result<Self> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        let total: BigRational = weights.iter().cloned().sum();
        let n = weights.len();
        let mut q = vec![BigRational::zero(); n];
        if n > 0 && !total.is_zero() {
            for (k, w) in weights.iter().enumerate() {
                q[k] -= w / &total;
            }
            q[0] += BigRational::one();
        }
        Ok(Objective {
            label: label.into(),
            q,
        })
    }

    /// `(1/n) sum_k (q_1 - q_k)`.
    pub fn geomean(n: usize) -> Self {
        let w = vec![BigRational::new(BigInt::one(), BigInt::from(n.max(1))); n];
        Objective::weighted(&w, "geomean").expect("uniform weights are nonnegative")
    }

    /// Coefficients in cumulative form: `c_k - c_{k+1}` on `Q(k)`.
    pub fn cumulative(&self) -> Vec<BigRational> {
        let n = self.q.len();
        (0..n)
            .map(|k| {
                let next = if k + 1 < n {
                    self.q[k + 1].clone()
                } else {
                    BigRational::zero()
                };
                &self.q[k] - next
            })
            .collect()
    }

    pub fn in_form(&self, form: Form) -> Vec<BigRational> {
        match form {
            Form::Q => self.q.clone(),
            Form::Cumulative => self.cumulative(),
        }
    }

    pub fn eval_q(&self, q: &[f64]) -> f64 {
        self.q
            .iter()
            .zip(q)
            .map(|(c, x)| rational_to_f64(c) * x)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpInstance {
    pub n: usize,
    pub program: Program,
    pub selector: Selector,
    pub objective: Objective,
    pub form: Form,
    pub precision_bits: u32,
    /// Wilkinson rows `k = 1..n` first, then long-range rows ordered by
    /// `(k, l)`.
    pub rows: Vec<ConstraintRow>,
}

impl LpInstance {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row_coeffs(&self, r: usize) -> Vec<(usize, i64)> {
        self.rows[r].coeffs(self.form)
    }

    pub fn objective_coeffs(&self) -> Vec<BigRational> {
        self.objective.in_form(self.form)
    }

    /// Index of row `(k, l)`, if present.
    pub fn find_row(&self, k: usize, ell: usize) -> Option<usize> {
        if ell == 0 {
            return (k >= 1 && k <= self.n).then(|| k - 1);
        }
        self.rows[self.n..]
            .binary_search_by(|row| (row.k, row.ell).cmp(&(k, ell)))
            .ok()
            .map(|i| i + self.n)
    }

    /// Slacks `rhs_float - a_r q` of every row at a q-form point.
    pub fn slacks_q(&self, q: &[f64]) -> Vec<f64> {
        let prefix = prefix_sums(q);
        self.rows
            .iter()
            .map(|row| row.rhs_float - row_lhs_q(row, q, &prefix))
            .collect()
    }

    /// Exact slacks `rhs_upper - a_r q` at a rational q-form point.
    pub fn slacks_exact(&self, q: &[BigRational]) -> Vec<BigRational> {
        self.rows
            .iter()
            .map(|row| {
                row.coeffs_q().into_iter().fold(row.rhs_upper.clone(), |s, (i, c)| {
                    s - &q[i] * BigRational::from_integer(c.into())
                })
            })
            .collect()
    }

    /// Largest violation `max(0, a_r q - rhs_float)` over all rows.
    pub fn max_violation_q(&self, q: &[f64]) -> f64 {
        self.slacks_q(q)
            .into_iter()
            .fold(0.0, |m, s| if -s > m { -s } else { m })
    }
}

fn prefix_sums(q: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(q.len() + 1);
    p.push(0.0);
    for v in q {
        p.push(p.last().unwrap() + v);
    }
    p
}

/// `a_r q` using prefix sums (`prefix[k] = q_1 + ... + q_k`).
fn row_lhs_q(row: &ConstraintRow, q: &[f64], prefix: &[f64]) -> f64 {
    let k = row.k;
    let ell = row.ell;
    if ell == 0 {
        prefix[k] - k as f64 * q[k - 1]
    } else {
        prefix[k] - ell as f64 * q[k - 1] - (k - ell) as f64 * q[k + ell - 1]
    }
}

/// Caches right-hand side enclosures per expression while building.
struct RhsCache {
    bits: u32,
    map: HashMap<RhsExpr, BigRational>,
}

impl RhsCache {
    fn new(bits: u32) -> Self {
        RhsCache {
            bits,
            map: HashMap::new(),
        }
    }

    fn row(&mut self, k: usize, ell: usize) -> ConstraintRow {
        let rhs = if ell == 0 {
            RhsExpr::Hadamard { k }
        } else {
            RhsExpr::LongRange { k }
        };
        let bits = self.bits;
        let upper = self
            .map
            .entry(rhs)
            .or_insert_with(|| rhs_enclosure(rhs, bits))
            .clone();
        ConstraintRow {
            k,
            ell,
            rhs,
            rhs_float: rational_to_f64(&upper),
            rhs_upper: upper,
        }
    }
}

fn check_precision(bits: u32) -> Result<()> {
    if !(8..=4096).contains(&bits) {
        return Err(Error::invalid(format!(
            "precision bits must lie in [8, 4096], got {bits}"
        )));
    }
    Ok(())
}

fn build(
    n: usize,
    program: Program,
    selector: Selector,
    objective: Objective,
    bits: u32,
) -> Result<LpInstance> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    check_precision(bits)?;
    let mut cache = RhsCache::new(bits);
    let mut rows: Vec<ConstraintRow> = (1..=n).map(|k| cache.row(k, 0)).collect();
    if program == Program::Improved && selector != Selector::WilkinsonOnly {
        for k in 2..n {
            for ell in 1..=(k - 1).min(n - k) {
                if selector.includes(n, k, ell) {
                    rows.push(cache.row(k, ell));
                }
            }
        }
    }
    Ok(LpInstance {
        n,
        program,
        selector,
        objective,
        form: Form::Q,
        precision_bits: bits,
        rows,
    })
}

/// Wilkinson's program: maximize `q_1 - q_n` subject to the Hadamard rows.
pub fn build_wilkinson_lp(n: usize) -> Result<LpInstance> {
    build_wilkinson_lp_with(n, DEFAULT_PRECISION_BITS)
}

pub fn build_wilkinson_lp_with(n: usize, bits: u32) -> Result<LpInstance> {
    build(
        n,
        Program::Wilkinson,
        Selector::WilkinsonOnly,
        Objective::head_tail(n),
        bits,
    )
}

/// The Wilkinson rows with a (weighted) geometric-mean objective; uniform
/// weights `1/n` when `weights` is `None`.
pub fn build_geomean_lp(n: usize, weights: Option<&[BigRational]>) -> Result<LpInstance> {
    build_geomean_lp_with(n, weights, DEFAULT_PRECISION_BITS)
}

pub fn build_geomean_lp_with(
    n: usize,
    weights: Option<&[BigRational]>,
    bits: u32,
) -> Result<LpInstance> {
    let objective = match weights {
        None => Objective::geomean(n),
        Some(w) => {
            if w.len() != n {
                return Err(Error::invalid(format!(
                    "expected {n} weights, got {}",
                    w.len()
                )));
            }
            Objective::weighted(w, "weighted-geomean")?
        }
    };
    build(n, Program::Geomean, Selector::WilkinsonOnly, objective, bits)
}

/// The improved program restricted to the rows chosen by `selector`.
pub fn build_improved_lp(n: usize, selector: Selector) -> Result<LpInstance> {
    build_improved_lp_with(n, selector, DEFAULT_PRECISION_BITS)
}

pub fn build_improved_lp_with(n: usize, selector: Selector, bits: u32) -> Result<LpInstance> {
    build(n, Program::Improved, selector, Objective::head_tail(n), bits)
}

/// Switch to the cumulative variables `Q(k)`.
pub fn cumulative_transform(lp: &LpInstance) -> Result<LpInstance> {
    if lp.form == Form::Cumulative {
        return Err(Error::invalid("instance is already in cumulative form"));
    }
    let mut out = lp.clone();
    out.form = Form::Cumulative;
    Ok(out)
}

/// Map a cumulative-form point back to q-form.
pub fn q_from_cumulative(big_q: &[f64]) -> Vec<f64> {
    (0..big_q.len())
        .map(|k| big_q[k] - if k > 0 { big_q[k - 1] } else { 0.0 })
        .collect()
}

pub fn cumulative_from_q(q: &[f64]) -> Vec<f64> {
    prefix_sums(q)[1..].to_vec()
}

/// Which constraint system [`check_pivot_feasibility`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityProgram {
    /// `prod_{i<=k} p_i <= k^(k/2) p_k^k`.
    WilkinsonOpt,
    /// The Wilkinson products plus
    /// `prod_{i<=k} p_i <= k^k p_{k+l}^(k-l) (p_k + p_{k+l})^l / ((k-l)^((k-l)/2) l^(l/2))`.
    ImprovedOpt,
    /// The linear rows of the full improved program at `q_k = ln p_k`.
    ImprovedLp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub k: usize,
    pub ell: usize,
    /// Log of the left-hand side.
    pub lhs: f64,
    /// Log of the right-hand side.
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub checked: usize,
    pub min_slack: f64,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Relative tolerance applied to log-scale slacks.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Evaluate every constraint of `program` at positive pivots
/// `p_1..p_n` (index `k - 1` holds `p_k`).
pub fn check_pivot_feasibility(pivots: &[f64], program: FeasibilityProgram) -> Result<FeasibilityReport> {
    if pivots.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::invalid("pivots must be positive and finite"));
    }
    let q: Vec<f64> = pivots.iter().map(|p| p.ln()).collect();
    Ok(check_log_pivot_feasibility(&q, program))
}

/// As [`check_pivot_feasibility`], from log-pivots `q_k = ln p_k`.
pub fn check_log_pivot_feasibility(q: &[f64], program: FeasibilityProgram) -> FeasibilityReport {
    let n = q.len();
    let prefix = prefix_sums(q);
    let xlnx = |m: usize| if m == 0 { 0.0 } else { m as f64 * (m as f64).ln() };
    let mut report = FeasibilityReport {
        checked: 0,
        min_slack: f64::INFINITY,
        violations: Vec::new(),
    };
    let mut record = |k: usize, ell: usize, lhs: f64, rhs: f64| {
        let slack = rhs - lhs;
        report.checked += 1;
        report.min_slack = report.min_slack.min(slack);
        if slack < -FEASIBILITY_TOL * (1.0 + rhs.abs().max(lhs.abs())) {
            report.violations.push(Violation {
                k,
                ell,
                lhs,
                rhs,
                slack,
            });
        }
    };
    for k in 1..=n {
        let lhs = prefix[k];
        let rhs = 0.5 * xlnx(k) + k as f64 * q[k - 1];
        record(k, 0, lhs, rhs);
    }
    if program == FeasibilityProgram::WilkinsonOpt {
        return report;
    }
    for k in 2..n {
        for ell in 1..=(k - 1).min(n - k) {
            let (qk, qj) = (q[k - 1], q[k + ell - 1]);
            let lhs = prefix[k];
            let rhs = match program {
                FeasibilityProgram::ImprovedOpt => {
                    let ln_sum = qk.max(qj) + (-(qk - qj).abs()).exp().ln_1p();
                    xlnx(k) + (k - ell) as f64 * qj + ell as f64 * ln_sum
                        - 0.5 * xlnx(k - ell)
                        - 0.5 * xlnx(ell)
                }
                _ => {
                    0.5 * k as f64 * (2.75 * k as f64).ln()
                        + (k - ell) as f64 * qj
                        + ell as f64 * qk
                }
            };
            record(k, ell, lhs, rhs);
        }
    }
    report
}

/// Map LP log-pivots to the pivots `p_k = k^(3/2) e^(q_k)` of the sandwich
/// argument.
pub fn sandwich_pivots(q: &[f64]) -> Vec<f64> {
    q.iter()
        .enumerate()
        .map(|(i, qk)| ((i + 1) as f64).powf(1.5) * qk.exp())
        .collect()
}

/// Log version of [`sandwich_pivots`], safe against overflow.
pub fn sandwich_log_pivots(q: &[f64]) -> Vec<f64> {
    q.iter()
        .enumerate()
        .map(|(i, qk)| 1.5 * ((i + 1) as f64).ln() + qk)
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ExportHeader {
    n: usize,
    program: Program,
    selector: String,
    objective: String,
    objective_q: Vec<String>,
    form: Form,
    precision_bits: u32,
}

/// Plain-text export: a JSON header line followed by one line per row,
/// `k l : c*var ... <= p/q`.
pub fn export_lp(lp: &LpInstance) -> String {
    let header = ExportHeader {
        n: lp.n,
        program: lp.program,
        selector: lp.selector.to_string(),
        objective: lp.objective.label.clone(),
        objective_q: lp.objective.q.iter().map(fmt_rational).collect(),
        form: lp.form,
        precision_bits: lp.precision_bits,
    };
    let var = match lp.form {
        Form::Q => "q",
        Form::Cumulative => "Q",
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (r, row) in lp.rows.iter().enumerate() {
        out.push_str(&format!("{} {} :", row.k, row.ell));
        for (i, c) in lp.row_coeffs(r) {
            out.push_str(&format!(" {}*{}{}", c, var, i + 1));
        }
        out.push_str(&format!(" <= {}\n", fmt_rational(&row.rhs_upper)));
    }
    out
}

/// Inverse of [`export_lp`]. Every row is checked against the structural
/// pattern its provenance implies.
pub fn import_lp(text: &str) -> Result<LpInstance> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
    let header: ExportHeader = serde_json::from_str(first).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    let selector: Selector = header.selector.parse()?;
    let objective_q = header
        .objective_q
        .iter()
        .map(|s| parse_rational(s).map_err(|msg| Error::Parse { line: 1, msg }))
        .collect::<Result<Vec<_>>>()?;
    if objective_q.len() != header.n {
        return Err(Error::Parse {
            line: 1,
            msg: "objective length does not match n".into(),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: &str| Error::Parse {
            line: lineno,
            msg: msg.to_string(),
        };
        let (head, rest) = line.split_once(':').ok_or_else(|| perr("missing ':'"))?;
        let mut hk = head.split_whitespace();
        let k: usize = hk
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr("bad k"))?;
        let ell: usize = hk
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr("bad l"))?;
        let (lhs, rhs) = rest.split_once("<=").ok_or_else(|| perr("missing '<='"))?;
        let mut coeffs = Vec::new();
        for term in lhs.split_whitespace() {
            let (c, v) = term.split_once('*').ok_or_else(|| perr("bad term"))?;
            let c: i64 = c.parse().map_err(|_| perr("bad coefficient"))?;
            let idx: usize = v
                .trim_start_matches(['q', 'Q'])
                .parse()
                .map_err(|_| perr("bad variable"))?;
            if idx == 0 {
                return Err(perr("variables are 1-based"));
            }
            coeffs.push((idx - 1, c));
        }
        let rhs_upper = parse_rational(rhs.trim()).map_err(|m| perr(&m))?;
        if k == 0 || k > header.n || (ell > 0 && (ell >= k || k + ell > header.n)) {
            return Err(perr("row index out of range"));
        }
        let rhs_expr = if ell == 0 {
            RhsExpr::Hadamard { k }
        } else {
            RhsExpr::LongRange { k }
        };
        let row = ConstraintRow {
            k,
            ell,
            rhs: rhs_expr,
            rhs_float: rational_to_f64(&rhs_upper),
            rhs_upper,
        };
        if row.coeffs(header.form) != coeffs {
            return Err(perr("coefficients do not match the row provenance"));
        }
        rows.push(row);
    }
    Ok(LpInstance {
        n: header.n,
        program: header.program,
        selector,
        objective: Objective {
            label: header.objective,
            q: objective_q,
        },
        form: header.form,
        precision_bits: header.precision_bits,
        rows,
    })
}
