//! Chart-based tensor calculus on a metric field: connection, curvature,
//! conformal objects. The sign conventions are listed in
//! `docs/conventions.md` and enforced by constant-curvature oracle tests.

use crate::curv::{curvature_jets, Rank4};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::jet::Jet;
use crate::linalg::SqMat;
use crate::metric::MetricField;

/// Curvature data of a metric at one chart point.
pub struct CurvatureBundle {
    pub dim: usize,
    /// `Γ^k_ij`, indexed `[k][i][j]`
    pub christoffel: Vec<f64>,
    /// lowered `R_ijkl`
    pub riemann: Rank4<f64>,
    pub ricci: SqMat<f64>,
    pub scalar: f64,
    /// lowered Weyl tensor; exactly zero when `dim = 3`
    pub weyl: Rank4<f64>,
}

/// Levi-Civita connection coefficients `Γ^k_ij` at `p`, indexed `[k][i][j]`
/// flattened.
pub fn christoffel(metric: &MetricField, p: &[f64]) -> Result<Vec<f64>> {
    let g = metric.eval_jets(p, 1)?;
    let gamma = crate::curv::christoffel_jets(&g)?;
    Ok(gamma.into_iter().map(|j| j.value()).collect())
}

/// Lowered Riemann tensor at `p`.
pub fn riemann(metric: &MetricField, p: &[f64]) -> Result<Rank4<f64>> {
    let g = metric.eval_jets(p, 2)?;
    let c = curvature_jets(&g)?;
    let n = c.n;
    let mut out = Rank4::zeros(n, &0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out.set(i, j, k, l, c.riem.at(i, j, k, l).value());
                }
            }
        }
    }
    Ok(out)
}

/// Ricci tensor and scalar curvature at `p`.
pub fn ricci_scalar(metric: &MetricField, p: &[f64]) -> Result<(SqMat<f64>, f64)> {
    let g = metric.eval_jets(p, 2)?;
    let c = curvature_jets(&g)?;
    let ric = SqMat::from_fn(c.n, |i, j| c.ricci.at(i, j).value());
    Ok((ric, c.scalar.value()))
}

/// Full curvature bundle at `p`.
pub fn curvature_bundle(metric: &MetricField, p: &[f64]) -> Result<CurvatureBundle> {
    let g = metric.eval_jets(p, 2)?;
    let c = curvature_jets(&g)?;
    let n = c.n;
    let mut riem = Rank4::zeros(n, &0.0);
    let wj = if n >= 3 { c.weyl() } else { Rank4::zeros(n, &c.g.a[0]) };
    let mut weyl = Rank4::zeros(n, &0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    riem.set(i, j, k, l, c.riem.at(i, j, k, l).value());
                    weyl.set(i, j, k, l, wj.at(i, j, k, l).value());
                }
            }
        }
    }
    Ok(CurvatureBundle {
        dim: n,
        christoffel: c.gamma.iter().map(|x| x.value()).collect(),
        riemann: riem,
        ricci: SqMat::from_fn(n, |i, j| c.ricci.at(i, j).value()),
        scalar: c.scalar.value(),
        weyl,
    })
}

/// Lowered Weyl tensor at `p`. Exact zero in dimension 3.
pub fn weyl(metric: &MetricField, p: &[f64]) -> Result<Rank4<f64>> {
    match metric.dim {
        3 => Ok(Rank4::zeros(3, &0.0)),
        4 => {
            let g = metric.eval_jets(p, 2)?;
            let c = curvature_jets(&g)?;
            let w = c.weyl();
            let mut out = Rank4::zeros(4, &0.0);
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            out.set(i, j, k, l, w.at(i, j, k, l).value());
                        }
                    }
                }
            }
            Ok(out)
        }
        d => Err(Error::UnsupportedDimension { required: "3 or 4".into(), actual: d }),
    }
}

/// `|W|² = W_ijkl W^ijkl` at `p` (dimension 4 only).
pub fn weyl_norm_sq(metric: &MetricField, p: &[f64]) -> Result<f64> {
    if metric.dim != 4 {
        return Err(Error::UnsupportedDimension { required: "4".into(), actual: metric.dim });
    }
    let g = metric.eval_jets(p, 2)?;
    let c = curvature_jets(&g)?;
    Ok(c.weyl_norm_sq().value())
}

/// 3D Schouten tensor `P = Ric − ¼ R h`.
///
/// Note: this is the normalization used by the boundary expansion here, not
/// the common `(Ric − R h/4)/(n−2)` convention.
pub fn schouten_3d(metric: &MetricField, p: &[f64]) -> Result<SqMat<f64>> {
    if metric.dim != 3 {
        return Err(Error::UnsupportedDimension { required: "3".into(), actual: metric.dim });
    }
    let (ric, r) = ricci_scalar(metric, p)?;
    Ok(SqMat::from_fn(3, |i, j| {
        ric.at(i, j) - 0.25 * r * metric.eval(p).at(i, j)
    }))
}

/// Q-curvature `Q = −ΔR/6 + R²/6 − |Ric|²/2` (dimension 4; needs fourth
/// metric derivatives).
pub fn q_curvature_4d(metric: &MetricField, p: &[f64]) -> Result<f64> {
    if metric.dim != 4 {
        return Err(Error::UnsupportedDimension { required: "4".into(), actual: metric.dim });
    }
    let g = metric.eval_jets(p, 4)?;
    let c = curvature_jets(&g)?;
    let r = c.scalar.clone(); // order-2 jet of R
    let lap_r = c.laplacian(&r).value();
    let rv = r.value();
    let ric_up = crate::curv::raise(&c.ginv, &c.ricci);
    let mut ric2 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            ric2 += ric_up.at(i, j).value() * ric_up.at(j, i).value();
        }
    }
    Ok(-lap_r / 6.0 + rv * rv / 6.0 - 0.5 * ric2)
}

/// Laplace–Beltrami `Δf = g^{ij}(∂_i∂_j f − Γ^k_ij ∂_k f)` at `p`.
pub fn laplace_beltrami(metric: &MetricField, f: &ScalarField, p: &[f64]) -> Result<f64> {
    let g = metric.eval_jets(p, 2)?;
    let c = curvature_jets(&g)?;
    let xs = crate::jet::variables(p, 2);
    let fj: Jet<f64> = f.eval(&xs);
    Ok(c.laplacian(&fj).value())
}

/// `e^{2ω}·metric` as a new metric field.
pub fn conformal_rescale(metric: &MetricField, omega: ScalarField) -> MetricField {
    metric.conformal_rescale(omega)
}
