//! Correlation, bootstrap intervals, ANOVA, and chi-square. p-values come
//! from the t, F, and chi-square CDFs, which statrs evaluates through its
//! continued-fraction regularized incomplete beta/gamma functions.

use super::AnalysisError;
use crate::mat::Matrix;
use crate::rng::substream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
}

fn moments(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    (mean, ss)
}

/// Sample Pearson correlation with a two-sided p-value from the t
/// distribution with n - 2 degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(AnalysisError::TooFewObservations { need: 3, got: n });
    }
    let (mx, ssx) = moments(x);
    let (my, ssy) = moments(y);
    if ssx <= 0.0 {
        return Err(AnalysisError::ZeroVariance("x"));
    }
    if ssy <= 0.0 {
        return Err(AnalysisError::ZeroVariance("y"));
    }
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let r = (cov / (ssx.sqrt() * ssy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if 1.0 - r * r <= 0.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok(Correlation { r, p })
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Percentile bootstrap interval for the Pearson correlation over paired
/// resamples; degenerate (zero-variance) resamples are redrawn. Deterministic
/// per seed.
pub fn bootstrap_ci(
    x: &[f64],
    y: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64), AnalysisError> {
    pearson(x, y)?;
    if resamples < 100 {
        return Err(AnalysisError::TooFewResamples(resamples));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(AnalysisError::BadLevel(level));
    }
    let n = x.len();
    let mut rng = substream(seed, "bootstrap");
    let mut rs = Vec::with_capacity(resamples);
    let mut attempts = 0usize;
    let max_attempts = resamples.saturating_mul(1000);
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    while rs.len() < resamples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(AnalysisError::DegenerateResamples);
        }
        for i in 0..n {
            let j = rng.random_range(0..n);
            bx[i] = x[j];
            by[i] = y[j];
        }
        match pearson(&bx, &by) {
            Ok(c) => rs.push(c.r),
            Err(AnalysisError::ZeroVariance(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    rs.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((percentile(&rs, tail), percentile(&rs, 1.0 - tail)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anova {
    pub f: f64,
    pub p: f64,
    pub eta2: f64,
}

/// One-way ANOVA: F = MS_between / MS_within, p from F(df_b, df_w), and
/// eta^2 = SS_between / SS_total. Zero within-group variance with separated
/// means yields an infinite F (flagged by `f.is_infinite()`).
pub fn anova_oneway(groups: &[Vec<f64>]) -> Result<Anova, AnalysisError> {
    if groups.len() < 2 {
        return Err(AnalysisError::DegenerateGroups("need at least 2 groups".into()));
    }
    if let Some(g) = groups.iter().find(|g| g.len() < 2) {
        return Err(AnalysisError::DegenerateGroups(format!(
            "every group needs n >= 2, got {}",
            g.len()
        )));
    }
    let n_total: usize = groups.iter().map(Vec::len).sum();
    let grand_mean = groups.iter().flatten().sum::<f64>() / n_total as f64;
    let ss_total: f64 = groups.iter().flatten().map(|v| (v - grand_mean).powi(2)).sum();
    if ss_total <= 0.0 {
        return Err(AnalysisError::ZeroVariance("all observations"));
    }
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let (mean, ss) = moments(g);
        ss_between += g.len() as f64 * (mean - grand_mean).powi(2);
        ss_within += ss;
    }
    let df_b = (groups.len() - 1) as f64;
    let df_w = (n_total - groups.len()) as f64;
    let eta2 = ss_between / ss_total;
    if ss_within <= 0.0 {
        let f = if ss_between > 0.0 { f64::INFINITY } else { 0.0 };
        let p = if f.is_infinite() { 0.0 } else { 1.0 };
        return Ok(Anova { f, p, eta2 });
    }
    let f = (ss_between / df_b) / (ss_within / df_w);
    let dist = FisherSnedecor::new(df_b, df_w).expect("valid degrees of freedom");
    let p = (1.0 - dist.cdf(f)).clamp(0.0, 1.0);
    Ok(Anova { f, p, eta2 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub chi2: f64,
    pub df: usize,
    pub p: f64,
    /// Haberman's adjusted standardized residual per cell.
    pub std_residuals: Matrix,
}

/// Pearson chi-square over an R x C count table with expected counts from the
/// margins.
pub fn chi_square_residuals(table: &Matrix) -> Result<ChiSquare, AnalysisError> {
    let (rows, cols) = (table.rows(), table.cols());
    if rows < 2 || cols < 2 {
        return Err(AnalysisError::TableTooSmall);
    }
    let mut row_totals = vec![0.0; rows];
    let mut col_totals = vec![0.0; cols];
    let mut total = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let o = table[(i, j)];
            row_totals[i] += o;
            col_totals[j] += o;
            total += o;
        }
    }
    if row_totals.iter().chain(&col_totals).any(|&t| t <= 0.0) {
        return Err(AnalysisError::ZeroMargin);
    }
    let mut chi2 = 0.0;
    let mut residuals = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let e = row_totals[i] * col_totals[j] / total;
            let o = table[(i, j)];
            chi2 += (o - e).powi(2) / e;
            let adj = e * (1.0 - row_totals[i] / total) * (1.0 - col_totals[j] / total);
            residuals[(i, j)] = (o - e) / adj.sqrt();
        }
    }
    let df = (rows - 1) * (cols - 1);
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    let p = (1.0 - dist.cdf(chi2)).clamp(0.0, 1.0);
    Ok(ChiSquare {
        chi2,
        df,
        p,
        std_residuals: residuals,
    })
}
