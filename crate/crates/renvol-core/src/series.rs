//! Divergent-expansion bookkeeping: geometric ε-ladders, least-squares
//! extraction of expansion coefficients and finite parts, and Richardson
//! extrapolation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compensated (Neumaier) summation; deterministic for a fixed input order.
pub fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for &x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// A ladder of truncation parameters with sampled values `I(ε_k)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsilonLadder {
    pub rungs: Vec<(f64, f64)>,
}

/// Geometric ladder `ε_k = ε₀ ρ^k`, `k = 0..n`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct LadderSpec {
    pub eps0: f64,
    pub ratio: f64,
    pub rungs: usize,
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec { eps0: 0.2, ratio: 0.8, rungs: 10 }
    }
}

impl LadderSpec {
    pub fn epsilons(&self) -> Vec<f64> {
        (0..self.rungs).map(|k| self.eps0 * self.ratio.powi(k as i32)).collect()
    }
}

impl EpsilonLadder {
    pub fn new(rungs: Vec<(f64, f64)>) -> Result<EpsilonLadder> {
        if rungs.len() < 6 {
            return Err(Error::FitFailure { detail: format!("{} rungs < 6", rungs.len()) });
        }
        for w in rungs.windows(2) {
            if !(w[1].0 < w[0].0 && w[1].0 > 0.0) {
                return Err(Error::FitFailure { detail: "ladder not strictly decreasing".into() });
            }
        }
        if rungs.iter().any(|r| !r.1.is_finite()) {
            return Err(Error::FitFailure { detail: "non-finite ladder value".into() });
        }
        Ok(EpsilonLadder { rungs })
    }
}

/// Which divergence profile to fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitKind {
    /// `c₀ε⁻³ + c₂ε⁻¹ + [c_log·log ε] + V`, plus nuisance `ε, ε², ε³`
    /// absorbing the smooth Taylor tail.
    Volume { with_log: bool },
    /// `c₂ε⁻¹ + [c_log·log ε] + V`, plus nuisance `ε, ε·log ε`.
    Surface { with_log: bool },
}

/// Fitted coefficients of a divergent ε-expansion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesFit {
    /// coefficient of ε⁻³ (zero for surface fits)
    pub c0: f64,
    /// coefficient of ε⁻¹
    pub c2: f64,
    pub c_log: Option<f64>,
    /// the ε⁰ coefficient
    pub finite_part: f64,
    pub residual_norm: f64,
    pub condition: f64,
    /// finite part moves by < 1e−3 relative when the largest rung is dropped
    pub stable: bool,
}

fn basis(kind: FitKind, eps: f64) -> Vec<f64> {
    match kind {
        FitKind::Volume { with_log } => {
            let mut b = vec![eps.powi(-3), eps.powi(-1)];
            if with_log {
                b.push(eps.ln());
            }
            b.extend_from_slice(&[1.0, eps, eps * eps, eps * eps * eps]);
            b
        }
        FitKind::Surface { with_log } => {
            let mut b = vec![eps.powi(-1)];
            if with_log {
                b.push(eps.ln());
            }
            b.extend_from_slice(&[1.0, eps, eps * eps.ln()]);
            b
        }
    }
}

fn solve_ls(kind: FitKind, rungs: &[(f64, f64)]) -> Result<(Vec<f64>, f64, f64)> {
    let ncols = basis(kind, 1.0).len();
    if rungs.len() < ncols {
        return Err(Error::FitFailure {
            detail: format!("{} rungs for {} coefficients", rungs.len(), ncols),
        });
    }
    let mut a = DMatrix::zeros(rungs.len(), ncols);
    let mut y = DVector::zeros(rungs.len());
    for (i, &(eps, v)) in rungs.iter().enumerate() {
        for (j, b) in basis(kind, eps).into_iter().enumerate() {
            a[(i, j)] = b;
        }
        y[i] = v;
    }
    // column scaling for conditioning
    let scales: Vec<f64> = (0..ncols).map(|j| a.column(j).norm().max(1e-300)).collect();
    for (j, s) in scales.iter().enumerate() {
        let mut col = a.column_mut(j);
        col /= *s;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin.max(1e-300);
    if condition > 1e10 {
        return Err(Error::FitFailure { detail: format!("condition number {condition:.3e}") });
    }
    let mut sol = svd
        .solve(&y, 1e-14)
        .map_err(|e| Error::FitFailure { detail: e.to_string() })?;
    // iterative refinement recovers digits lost to conditioning
    for _ in 0..3 {
        let r = &y - &a * &sol;
        match svd.solve(&r, 1e-14) {
            Ok(corr) => sol += corr,
            Err(_) => break,
        }
    }
    let coeffs: Vec<f64> = sol.iter().zip(scales.iter()).map(|(c, s)| c / s).collect();
    let resid = (&a * &sol - &y).norm();
    Ok((coeffs, resid, condition))
}

/// Least-squares fit of a divergent expansion over a ladder.
pub fn fit_expansion(ladder: &EpsilonLadder, kind: FitKind) -> Result<SeriesFit> {
    let (coeffs, resid, condition) = solve_ls(kind, &ladder.rungs)?;
    let (c0, c2, c_log, fp) = match kind {
        FitKind::Volume { with_log } => {
            let lg = if with_log { Some(coeffs[2]) } else { None };
            let fp_idx = if with_log { 3 } else { 2 };
            (coeffs[0], coeffs[1], lg, coeffs[fp_idx])
        }
        FitKind::Surface { with_log } => {
            let lg = if with_log { Some(coeffs[1]) } else { None };
            let fp_idx = if with_log { 2 } else { 1 };
            (0.0, coeffs[0], lg, coeffs[fp_idx])
        }
    };
    // stability: refit without the largest rung
    let stable = if ladder.rungs.len() > 7 {
        match solve_ls(kind, &ladder.rungs[1..]) {
            Ok((c2s, _, _)) => {
                let fp2 = match kind {
                    FitKind::Volume { with_log } => c2s[if with_log { 3 } else { 2 }],
                    FitKind::Surface { with_log } => c2s[if with_log { 2 } else { 1 }],
                };
                (fp2 - fp).abs() <= 1e-3 * (1.0 + fp.abs())
            }
            Err(_) => false,
        }
    } else {
        true
    };
    Ok(SeriesFit { c0, c2, c_log, finite_part: fp, residual_norm: resid, condition, stable })
}

/// Finite part of a divergent surface-integral family: the ε⁰ coefficient
/// of a ladder whose divergence profile is spanned by
/// `{ε⁻¹, [log ε], 1}` (nuisance columns absorb the `ε, ε log ε` tail).
pub fn finite_part(ladder: &EpsilonLadder, with_log: bool) -> Result<f64> {
    Ok(fit_expansion(ladder, FitKind::Surface { with_log })?.finite_part)
}

/// Richardson extrapolation of samples `(h_k, f(h_k))` assuming an error
/// expansion in powers `h^order, h^{2·order}, …` (Neville in `x = h^order`).
pub fn richardson_limit(samples: &[(f64, f64)], order: u32) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::ExtrapolationDivergence { detail: "need at least 2 samples".into() });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.powi(order as i32)).collect();
    let mut t: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mut last_corr = f64::INFINITY;
    let mut best = t[n - 1];
    for level in 1..n {
        for i in (level..n).rev() {
            let x_hi = xs[i - level];
            let x_lo = xs[i];
            t[i] = t[i] + (t[i] - t[i - 1]) * x_lo / (x_hi - x_lo);
        }
        let corr = (t[n - 1] - best).abs();
        if level >= 2 && corr > 4.0 * last_corr && corr > 1e-12 * best.abs().max(1.0) {
            return Err(Error::ExtrapolationDivergence {
                detail: format!("corrections grew from {last_corr:.3e} to {corr:.3e}"),
            });
        }
        best = t[n - 1];
        last_corr = corr;
    }
    Ok((best, last_corr))
}

/// Fourth-order central derivative via Richardson over steps `δ` and `δ/2`.
pub fn central_derivative(mut f: impl FnMut(f64) -> f64, t0: f64, delta: f64) -> f64 {
    let d1 = (f(t0 + delta) - f(t0 - delta)) / (2.0 * delta);
    let d2 = (f(t0 + 0.5 * delta) - f(t0 - 0.5 * delta)) / delta;
    (4.0 * d2 - d1) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_basis_recovery() {
        let spec = LadderSpec::default();
        let rungs: Vec<(f64, f64)> = spec
            .epsilons()
            .iter()
            .map(|&e| (e, 5.0 * e.powi(-3) + 2.0 * e.powi(-1) + 7.0))
            .collect();
        let ladder = EpsilonLadder::new(rungs).unwrap();
        let fit = fit_expansion(&ladder, FitKind::Volume { with_log: false }).unwrap();
        assert!((fit.c0 - 5.0).abs() < 1e-9);
        assert!((fit.c2 - 2.0).abs() < 1e-9);
        assert!((fit.finite_part - 7.0).abs() < 1e-9);
        assert!(fit.stable);
    }

    #[test]
    fn surface_fit_with_log_nuisance() {
        let spec = LadderSpec::default();
        let rungs: Vec<(f64, f64)> = spec
            .epsilons()
            .iter()
            .map(|&e| (e, -1.5 * e.powi(-1) + 4.25 + 0.7 * e * e.ln()))
            .collect();
        let ladder = EpsilonLadder::new(rungs).unwrap();
        let fit = fit_expansion(&ladder, FitKind::Surface { with_log: true }).unwrap();
        assert!((fit.c2 + 1.5).abs() < 1e-8);
        assert!((fit.finite_part - 4.25).abs() < 1e-6, "fp = {}", fit.finite_part);
        assert!(fit.c_log.unwrap().abs() < 1e-6);
    }

    #[test]
    fn richardson_quadratic() {
        let f = |h: f64| 3.25 + 0.8 * h * h;
        let samples: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, f(h))).collect();
        let (lim, _) = richardson_limit(&samples, 2).unwrap();
        assert!((lim - 3.25).abs() < 1e-10);
    }

    #[test]
    fn central_derivative_exact_on_cubic() {
        let d = central_derivative(|t| 1.0 + 2.0 * t - t.powi(3), 0.3, 0.05);
        assert!((d - (2.0 - 3.0 * 0.09)).abs() < 1e-10);
    }

    #[test]
    fn ladder_validation() {
        assert!(EpsilonLadder::new(vec![(0.1, 1.0); 3]).is_err());
        let bad = vec![(0.1, 1.0), (0.2, 1.0), (0.05, 1.0), (0.04, 1.0), (0.03, 1.0), (0.02, 1.0)];
        assert!(EpsilonLadder::new(bad).is_err());
    }
}
