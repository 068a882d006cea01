//! `demo appendix-a` and `ge run`.

use std::fmt::Write;

use growthbound::ge::{
    eliminate, growth_factor, log_pivots, solve_linear_system, solve_linear_system_f64,
    wilkinson_matrix, FloatConfig, PivotStrategy,
};
use growthbound::matrix::{fmt_rational, AnyMatrix, Matrix};
use growthbound::scalar::{rational_to_f64, Scalar};
use growthbound::svd::condition_number;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiddleEntry {
    pub index: usize,
    pub exact: f64,
    pub partial: f64,
    pub complete: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub n: usize,
    pub seed: u64,
    pub growth_partial: f64,
    pub growth_complete: f64,
    pub relative_error_partial: f64,
    pub relative_error_complete: f64,
    pub condition_estimate: f64,
    pub middle: Vec<MiddleEntry>,
}

fn relative_error(x: &[f64], exact: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(exact).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = exact.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

/// Solves `W x = b` for Wilkinson's matrix `W` with `b = W x0`, `x0` standard
/// normal from `seed`. Errors are measured against the exact rational
/// solution of the system actually stored in binary64.
pub fn appendix_a(n: usize, seed: u64) -> CliResult<DemoReport> {
    if n < 2 {
        return Err(CliError::Usage("the demo needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let a: Matrix<f64> = wilkinson_matrix(n);
    let b = a.matvec(&x0)?;

    let a_exact: Matrix<BigRational> = wilkinson_matrix(n);
    let b_exact: Vec<BigRational> = b
        .iter()
        .map(|v| BigRational::from_float(*v).expect("finite right-hand side"))
        .collect();
    let exact: Vec<f64> = solve_linear_system(&a_exact, &b_exact, PivotStrategy::Partial)?
        .iter()
        .map(rational_to_f64)
        .collect();

    let cfg = FloatConfig::BINARY64;
    let partial = solve_linear_system_f64(&a, &b, PivotStrategy::Partial, cfg)?;
    let complete = solve_linear_system_f64(&a, &b, PivotStrategy::Complete, cfg)?;
    let growth_partial = growth_factor(&eliminate(&a, PivotStrategy::Partial)?);
    let growth_complete = growth_factor(&eliminate(&a, PivotStrategy::Complete)?);

    let mid = n / 2;
    let lo = mid.saturating_sub(3);
    let hi = (mid + 3).min(n - 1);
    let middle = (lo..=hi)
        .map(|i| MiddleEntry {
            index: i + 1,
            exact: exact[i],
            partial: partial[i],
            complete: complete[i],
        })
        .collect();
    Ok(DemoReport {
        n,
        seed,
        growth_partial,
        growth_complete,
        relative_error_partial: relative_error(&partial, &exact),
        relative_error_complete: relative_error(&complete, &exact),
        condition_estimate: condition_number(&a)?,
        middle,
    })
}

impl DemoReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Wilkinson matrix, n = {}, seed = {}", self.n, self.seed);
        let _ = writeln!(s, "{:>6}  {:>22}  {:>22}  {:>22}", "i", "exact", "partial", "complete");
        for m in &self.middle {
            let _ = writeln!(
                s,
                "{:>6}  {:>22.15e}  {:>22.15e}  {:>22.15e}",
                m.index, m.exact, m.partial, m.complete
            );
        }
        let _ = writeln!(s, "relative error, partial pivoting   {:.3e}", self.relative_error_partial);
        let _ = writeln!(s, "relative error, complete pivoting  {:.3e}", self.relative_error_complete);
        let _ = writeln!(s, "growth factor, partial pivoting    {:.6e}", self.growth_partial);
        let _ = writeln!(s, "growth factor, complete pivoting   {:.6e}", self.growth_complete);
        let _ = writeln!(s, "2-norm condition number            {:.4}", self.condition_estimate);
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeReport {
    pub n: usize,
    pub mode: String,
    pub strategy: PivotStrategy,
    /// `p_1..p_n`, exact for rational input.
    pub pivots: Vec<String>,
    pub log_pivots: Vec<f64>,
    pub growth_factor: f64,
    /// Exact growth factor for real rational input.
    pub growth_factor_exact: Option<String>,
    pub ln_abs_det: f64,
}

fn ge_report<T: Scalar>(
    a: &Matrix<T>,
    mode: &str,
    strategy: PivotStrategy,
    fmt: impl Fn(&T) -> String,
) -> CliResult<(GeReport, growthbound::ge::EliminationTrace<T>)> {
    let trace = eliminate(a, strategy)?;
    let n = trace.n();
    let q = log_pivots(&trace);
    let report = GeReport {
        n,
        mode: mode.to_string(),
        strategy,
        pivots: (1..=n).map(|k| fmt(trace.pivot(k))).collect(),
        ln_abs_det: q.iter().sum(),
        log_pivots: q,
        growth_factor: growth_factor(&trace),
        growth_factor_exact: None,
    };
    Ok((report, trace))
}

pub fn ge_run(text: &str, strategy: PivotStrategy) -> CliResult<GeReport> {
    let m = AnyMatrix::parse(text)?;
    let mode = m.mode().as_str();
    Ok(match &m {
        AnyMatrix::RationalReal(a) => {
            let (mut r, trace) = ge_report(a, mode, strategy, fmt_rational)?;
            r.growth_factor_exact = Some(fmt_rational(&trace.growth_factor_exact()));
            r
        }
        AnyMatrix::RationalComplex(a) => {
            ge_report(a, mode, strategy, |z| format!("{},{}", fmt_rational(&z.re), fmt_rational(&z.im)))?.0
        }
        AnyMatrix::Binary64Real(a) => ge_report(a, mode, strategy, |x| format!("{x:?}"))?.0,
        AnyMatrix::Binary64Complex(a) => {
            ge_report(a, mode, strategy, |z| format!("{:?},{:?}", z.re, z.im))?.0
        }
    })
}

impl GeReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}, mode = {}, pivoting = {:?}", self.n, self.mode, self.strategy);
        for (k, (p, q)) in self.pivots.iter().zip(&self.log_pivots).enumerate() {
            let _ = writeln!(s, "p_{:<4} = {:<30} ln|p| = {:.12}", k + 1, p, q);
        }
        let _ = writeln!(s, "growth factor = {:.12e}", self.growth_factor);
        if let Some(g) = &self.growth_factor_exact {
            let _ = writeln!(s, "growth factor (exact) = {g}");
        }
        let _ = writeln!(s, "ln |det| = {:.12}", self.ln_abs_det);
        s
    }
}
