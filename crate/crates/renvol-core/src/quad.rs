//! Tensor-product Gauss–Legendre quadrature over products of intervals,
//! with per-axis composite panels and an a-posteriori error estimate by
//! order refinement.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::series::neumaier_sum;

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&n) {
        return v.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev initial guess, Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let v = Arc::new((nodes, weights));
    cache.write().unwrap().insert(n, v.clone());
    v
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One coordinate axis of a product domain: an interval with `panels`
/// composite subintervals and a Gauss–Legendre order per panel.
#[derive(Clone, Debug)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub order: usize,
    pub panels: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, order: usize, panels: usize) -> Axis {
        assert!(hi > lo && order >= 1 && panels >= 1);
        Axis { lo, hi, order, panels }
    }

    fn points(&self, extra_order: usize) -> (Vec<f64>, Vec<f64>) {
        let gl = gauss_legendre(self.order + extra_order);
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        let h = (self.hi - self.lo) / self.panels as f64;
        for p in 0..self.panels {
            let a = self.lo + p as f64 * h;
            for (x, w) in gl.0.iter().zip(gl.1.iter()) {
                xs.push(a + 0.5 * h * (x + 1.0));
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }
}

#[derive(Clone, Debug)]
pub struct ProductDomain {
    pub axes: Vec<Axis>,
}

pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

fn tensor_sum(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    axes: &[Axis],
    extra: usize,
    mode: ExecMode,
) -> f64 {
    let pts: Vec<(Vec<f64>, Vec<f64>)> = axes.iter().map(|a| a.points(extra)).collect();
    let sizes: Vec<usize> = pts.iter().map(|p| p.0.len()).collect();
    let outer = sizes[0];
    let partials = map_indexed(mode, outer, |i0| {
        let mut x = vec![0.0; axes.len()];
        x[0] = pts[0].0[i0];
        let w0 = pts[0].1[i0];
        let mut acc = 0.0;
        let mut idx = vec![0usize; axes.len()];
        loop {
            let mut w = w0;
            for d in 1..axes.len() {
                x[d] = pts[d].0[idx[d]];
                w *= pts[d].1[idx[d]];
            }
            acc += w * f(&x);
            // advance inner counters
            let mut d = axes.len();
            loop {
                if d == 1 {
                    return acc;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < sizes[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
    });
    neumaier_sum(&partials)
}

/// Integrate `f` over the product domain with an error estimate from order
/// refinement (`order` vs `order + 4`).
pub fn integrate(
    f: impl Fn(&[f64]) -> f64 + Sync,
    domain: &ProductDomain,
    mode: ExecMode,
) -> Result<QuadResult> {
    let i0 = tensor_sum(&f, &domain.axes, 0, mode);
    let i1 = tensor_sum(&f, &domain.axes, 4, mode);
    let err1 = (i1 - i0).abs();
    let scale = i1.abs().max(1.0);
    if err1 > 1e-8 * scale {
        let i2 = tensor_sum(&f, &domain.axes, 8, mode);
        let err2 = (i2 - i1).abs();
        if err2 > err1 && err2 > 1e-8 * scale {
            return Err(Error::QuadratureDivergence { coarse: err1, fine: err2 });
        }
        return Ok(QuadResult { value: i2, error_estimate: err2 });
    }
    Ok(QuadResult { value: i1, error_estimate: err1 })
}

/// Single-pass integration without refinement (for ladder inner loops whose
/// accuracy is validated once against closed forms).
pub fn integrate_raw(
    f: impl Fn(&[f64]) -> f64 + Sync,
    domain: &ProductDomain,
    mode: ExecMode,
) -> f64 {
    tensor_sum(&f, &domain.axes, 0, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // GL of order n integrates monomials up to degree 2n−1 exactly
        let dom = ProductDomain { axes: vec![Axis::new(-1.0, 1.0, 8, 1), Axis::new(-1.0, 1.0, 8, 1)] };
        let f = |x: &[f64]| x[0].powi(15) * x[1].powi(14) + 3.0 * x[0].powi(2) - x[1].powi(15);
        let got = integrate_raw(f, &dom, ExecMode::Sequential);
        // ∫x^15 = 0, ∫x^14 over [-1,1] = 2/15; ∫3x² dx dy = 3·(2/3)·2 = 4
        assert!((got - 4.0).abs() < 1e-12);
    }

    #[test]
    fn volume_of_round_s3() {
        // chart (β₁, β₂, φ): dv = sin²β₁ sin β₂, total 2π²
        let pi = std::f64::consts::PI;
        let dom = ProductDomain {
            axes: vec![
                Axis::new(0.0, pi, 16, 2),
                Axis::new(0.0, pi, 16, 2),
                Axis::new(0.0, 2.0 * pi, 8, 2),
            ],
        };
        let f = |x: &[f64]| x[0].sin().powi(2) * x[1].sin();
        let r = integrate(f, &dom, ExecMode::default()).unwrap();
        assert!((r.value - 2.0 * pi * pi).abs() < 1e-8, "vol = {}", r.value);
        assert!(r.error_estimate < 1e-8);
    }

    #[test]
    fn zero_integrand() {
        let dom = ProductDomain { axes: vec![Axis::new(0.0, 1.0, 4, 1)] };
        let r = integrate(|_| 0.0, &dom, ExecMode::Sequential).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
