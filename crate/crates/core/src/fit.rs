//! Least-squares power-law fits in log-log space.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 8 samples, got {0}")]
    TooFew(usize),
    #[error("sample {0} is not strictly positive")]
    NonPositive(usize),
    #[error("all abscissae coincide")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Fits `y = A x^p` to positive samples.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerFit, FitError> {
    if samples.len() < 8 {
        return Err(FitError::TooFew(samples.len()));
    }
    let mut pts = Vec::with_capacity(samples.len());
    for (i, &(x, y)) in samples.iter().enumerate() {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(FitError::NonPositive(i));
        }
        pts.push((x.ln(), y.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(FitError::Degenerate);
    }
    let p = sxy / sxx;
    let ss_res: f64 = pts.iter().map(|q| (q.1 - my - p * (q.0 - mx)).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(PowerFit { exponent: p, prefactor: (my - p * mx).exp(), r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn exact_square() {
        let s: Vec<_> = grid(0.1, 10.0, 20).into_iter().map(|t| (t, 3.0 * t * t)).collect();
        let f = fit_power_law(&s).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-11);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_seven_quarters() {
        let s: Vec<_> = grid(1e-6, 1e-4, 50).into_iter().map(|t: f64| (t, t.powf(1.75) * (1.0 + 0.01 * t))).collect();
        assert!((fit_power_law(&s).unwrap().exponent - 1.75).abs() < 1e-3);
    }

    #[test]
    fn constant_and_errors() {
        let s: Vec<_> = grid(1.0, 5.0, 10).into_iter().map(|t| (t, 4.0)).collect();
        let f = fit_power_law(&s).unwrap();
        assert!(f.exponent.abs() < 1e-14);
        assert_eq!(fit_power_law(&s[..5]), Err(FitError::TooFew(5)));
        let mut bad = s.clone();
        bad[3].1 = -1.0;
        assert_eq!(fit_power_law(&bad), Err(FitError::NonPositive(3)));
        let same = vec![(2.0, 1.0); 9];
        assert_eq!(fit_power_law(&same), Err(FitError::Degenerate));
    }
}
