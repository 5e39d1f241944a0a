//! Metric fields on coordinate charts.
//!
//! A metric is a closed-form component map evaluated generically over any
//! [`Scalar`], so the same definition yields point values, Taylor jets of any
//! order, and nested jets along embedded surfaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::jet::{variables, Jet, Scalar};
use crate::linalg::{value_eigen_bounds, SqMat};
use crate::surface::HypersurfaceChart;

/// Smallest admissible metric eigenvalue before a point is declared singular.
pub const SPD_FLOOR: f64 = 1e-12;

/// A boundary-metric family `h̄_r` for geodesic normal forms
/// `g = (dr² + h̄_r)/r²` on charts `(r, y¹, y², y³)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum BoundaryFamily {
    /// `h̄_r = (a − r²/(4a))² h_{S³}` in colatitude coordinates
    /// `(β, θ, φ)`; the exact normal form of the hyperbolic 4-ball with
    /// round boundary representative of radius `a`.
    RoundSphere { radius: f64 },
    /// `h̄_r ≡ δ` on a flat 3-torus chart; an exact hyperbolic quotient.
    FlatTorus,
    /// Flat torus with a prescribed constant trace-free cubic term:
    /// `h̄_r = δ + r³ G`. Einstein only to expansion order (a formal model).
    FlatTorusCubic { g3: [[f64; 3]; 3] },
    /// Collar profile `h̄ = k̄_w ⊕ dw²` on `(x¹, x², w)` with
    /// `k̄_w = δ − 2 w S` for a prescribed constant symmetric `S`;
    /// `h̄_r ≡ h̄`. Formal (not Einstein unless `S = 0`).
    Collar { s: [[f64; 2]; 2] },
    /// Synthetic family `h̄_r = h̄ − r² P^{h̄}` over an arbitrary boundary
    /// metric; `P` is supplied numerically per point by the caller through
    /// `NormalFormModel`, so here only the base metric is stored.
    Perturbed { terms: Vec<TrigTerm>, amplitude: f64 },
}

/// One term of a trigonometric perturbation: `A_ij · trig(k·x + φ)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrigTerm {
    pub sym: Vec<f64>,  // upper-triangular packed symmetric matrix
    pub wave: Vec<f64>, // wave vector
    pub phase: f64,
    pub use_sin: bool,
}

impl TrigTerm {
    pub fn eval_profile<S: Scalar>(&self, x: &[S]) -> S {
        let mut arg = x[0].lift(self.phase);
        for (xi, ki) in x.iter().zip(self.wave.iter()) {
            arg = arg + xi.scl(*ki);
        }
        if self.use_sin {
            arg.sin()
        } else {
            arg.cos()
        }
    }

    pub fn sym_at(&self, n: usize, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        // packed upper triangle index
        let idx = a * n - a * (a + 1) / 2 + b;
        self.sym[idx]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum MetricKind {
    /// Flat `R^n`.
    Euclidean { dim: usize },
    /// Poincaré ball `4|dx|²/(1−|x|²)²`, constant curvature −1.
    HyperbolicBall { dim: usize },
    /// Round sphere of radius `a` in nested colatitude coordinates.
    RoundSphere { dim: usize, radius: f64 },
    /// Geodesic normal form `(dr² + h̄_r)/r²`.
    NormalForm { family: BoundaryFamily },
    /// Compactification `dr² + h̄_r` of a normal form (`ḡ = r² g₊`).
    Compactified { family: BoundaryFamily },
    /// The boundary metric `h̄ = h̄_0` alone, on the 3-chart.
    Boundary { family: BoundaryFamily },
    /// `e^{2ω}` times another metric.
    Rescaled { base: Box<MetricKind>, omega: ScalarField },
    /// Flat metric plus a small smooth trigonometric perturbation.
    Perturbed { dim: usize, terms: Vec<TrigTerm>, amplitude: f64 },
    /// Metric induced on the parameter chart of an embedded surface.
    Induced { ambient: Box<MetricField>, surface: Box<HypersurfaceChart> },
}

/// A smooth metric on a coordinate chart with derivative access of any order
/// (evaluation is exact algorithmic differentiation; `deriv_order` is the
/// cap enforced by the jet tables).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricField {
    pub kind: MetricKind,
    pub dim: usize,
    pub deriv_order: usize,
}

impl MetricField {
    pub fn new(kind: MetricKind) -> MetricField {
        let dim = match &kind {
            MetricKind::Euclidean { dim } => *dim,
            MetricKind::HyperbolicBall { dim } => *dim,
            MetricKind::RoundSphere { dim, .. } => *dim,
            MetricKind::NormalForm { .. } | MetricKind::Compactified { .. } => 4,
            MetricKind::Boundary { .. } => 3,
            MetricKind::Rescaled { base, .. } => MetricField::new((**base).clone()).dim,
            MetricKind::Perturbed { dim, .. } => *dim,
            MetricKind::Induced { surface, .. } => surface.param_dim,
        };
        MetricField { kind, dim, deriv_order: crate::jet::MAX_ORDER }
    }

    pub fn euclidean(dim: usize) -> MetricField {
        MetricField::new(MetricKind::Euclidean { dim })
    }

    pub fn hyperbolic_ball(dim: usize) -> MetricField {
        MetricField::new(MetricKind::HyperbolicBall { dim })
    }

    pub fn round_sphere(dim: usize, radius: f64) -> MetricField {
        MetricField::new(MetricKind::RoundSphere { dim, radius })
    }

    /// `e^{2ω} g`; composes with further rescalings.
    pub fn conformal_rescale(&self, omega: ScalarField) -> MetricField {
        MetricField::new(MetricKind::Rescaled { base: Box::new(self.kind.clone()), omega })
    }

    pub fn induced(ambient: &MetricField, surface: &HypersurfaceChart) -> MetricField {
        MetricField::new(MetricKind::Induced {
            ambient: Box::new(ambient.clone()),
            surface: Box::new(surface.clone()),
        })
    }

    /// Chart-domain check (with a small interior margin).
    pub fn contains(&self, p: &[f64]) -> bool {
        if p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match &self.kind {
            MetricKind::HyperbolicBall { .. } => {
                p.iter().map(|x| x * x).sum::<f64>() < 1.0 - 1e-10
            }
            MetricKind::RoundSphere { dim, .. } => {
                // all colatitudes strictly inside (0, π)
                p.iter().take(dim - 1).all(|&b| b > 0.0 && b < std::f64::consts::PI)
            }
            MetricKind::NormalForm { family } | MetricKind::Compactified { family } => {
                let r_ok = p[0] > 0.0 || matches!(self.kind, MetricKind::Compactified { .. });
                let r_ok = r_ok && p[0] >= 0.0;
                match family {
                    BoundaryFamily::RoundSphere { radius } => r_ok && p[0] < 2.0 * radius,
                    _ => r_ok,
                }
            }
            MetricKind::Rescaled { base, .. } => {
                MetricField::new((**base).clone()).contains(p)
            }
            MetricKind::Induced { .. } => true,
            _ => true,
        }
    }

    /// Metric components at a point of the chart, generic over the scalar
    /// algebra.
    pub fn eval<S: Scalar>(&self, x: &[S]) -> SqMat<S> {
        let like = &x[0];
        match &self.kind {
            MetricKind::Euclidean { dim } => {
                SqMat::from_fn(*dim, |i, j| like.lift(if i == j { 1.0 } else { 0.0 }))
            }
            MetricKind::HyperbolicBall { dim } => {
                let mut rho2 = like.lift(0.0);
                for xi in x.iter().take(*dim) {
                    rho2 = rho2 + xi.clone() * xi.clone();
                }
                let conf = Scalar::recip(&(-rho2).addc(1.0)).scl(2.0);
                let c2 = conf.clone() * conf;
                SqMat::from_fn(*dim, |i, j| {
                    if i == j {
                        c2.clone()
                    } else {
                        like.lift(0.0)
                    }
                })
            }
            MetricKind::RoundSphere { dim, radius } => {
                // nested colatitudes: g = a²(dβ₁² + sin²β₁ dβ₂² + sin²β₁ sin²β₂ dβ₃² + ...)
                let n = *dim;
                let mut g = SqMat::zeros(n, like);
                let mut factor = like.lift(radius * radius);
                for i in 0..n {
                    g.set(i, i, factor.clone());
                    if i + 1 < n {
                        let s = x[i].sin();
                        factor = factor * s.clone() * s;
                    }
                }
                g
            }
            MetricKind::NormalForm { family } => {
                let hbar = family_hr(family, x);
                let r = &x[0];
                let w = Scalar::recip(&(r.clone() * r.clone()));
                let mut g = SqMat::zeros(4, like);
                g.set(0, 0, w.clone());
                for i in 0..3 {
                    for j in 0..3 {
                        g.set(i + 1, j + 1, hbar.at(i, j).clone() * w.clone());
                    }
                }
                g
            }
            MetricKind::Compactified { family } => {
                let hbar = family_hr(family, x);
                let mut g = SqMat::zeros(4, like);
                g.set(0, 0, like.lift(1.0));
                for i in 0..3 {
                    for j in 0..3 {
                        g.set(i + 1, j + 1, hbar.at(i, j).clone());
                    }
                }
                g
            }
            MetricKind::Boundary { family } => {
                // boundary slice: prepend r = 0
                let mut coords: Vec<S> = Vec::with_capacity(4);
                coords.push(like.lift(0.0));
                coords.extend_from_slice(x);
                family_hr(family, &coords)
            }
            MetricKind::Rescaled { base, omega } => {
                let g = MetricField::new((**base).clone()).eval(x);
                let w = omega.eval(x);
                let f = (w.scl(2.0)).exp();
                SqMat::from_fn(g.n, |i, j| g.at(i, j).clone() * f.clone())
            }
            MetricKind::Perturbed { dim, terms, amplitude } => {
                trig_perturbed_matrix(*dim, x, terms, *amplitude)
            }
            MetricKind::Induced { ambient, surface } => {
                let emb = surface.eval(x);
                let m = surface.param_dim;
                // tangent vectors need one derivative: lift params to jets of
                // order 1 over the current scalar
                let coords: Vec<Jet<S>> = crate::jet::nested_variables(x, 1);
                let emb_j: Vec<Jet<S>> = surface.eval(&coords);
                let g_amb = ambient.eval(&emb);
                let mut tangents: Vec<Vec<S>> = Vec::with_capacity(m);
                for a in 0..m {
                    let mut idx = vec![0usize; m];
                    idx[a] = 1;
                    tangents.push(emb_j.iter().map(|e| e.partial(&idx)).collect());
                }
                SqMat::from_fn(m, |a, b| {
                    let mut acc = like.lift(0.0);
                    for i in 0..ambient.dim {
                        for j in 0..ambient.dim {
                            acc = acc
                                + g_amb.at(i, j).clone()
                                    * tangents[a][i].clone()
                                    * tangents[b][j].clone();
                        }
                    }
                    acc
                })
            }
        }
    }

    /// Components as order-`k` jets around `p`.
    pub fn eval_jets(&self, p: &[f64], k: usize) -> Result<SqMat<Jet<f64>>> {
        if k > self.deriv_order {
            return Err(Error::DifferentiationFailure { requested: k, supported: self.deriv_order });
        }
        if !self.contains(p) {
            return Err(Error::OutOfDomain { detail: format!("{p:?}") });
        }
        let xs = variables(p, k);
        Ok(self.eval(&xs))
    }

    /// Eigenvalue-positivity check of `g(p)`.
    pub fn validate_spd(&self, p: &[f64]) -> Result<()> {
        let g = self.eval(p);
        let (lo, hi) = value_eigen_bounds(&g);
        if !(lo > SPD_FLOOR * hi.max(1.0)) {
            return Err(Error::SingularMetric {
                detail: format!("eigenvalue range [{lo:.3e}, {hi:.3e}] at {p:?}"),
            });
        }
        Ok(())
    }
}

/// Identity plus a symmetric trigonometric perturbation.
pub fn trig_perturbed_matrix<S: Scalar>(
    dim: usize,
    x: &[S],
    terms: &[TrigTerm],
    amplitude: f64,
) -> SqMat<S> {
    let like = &x[0];
    let mut g = SqMat::from_fn(dim, |i, j| like.lift(if i == j { 1.0 } else { 0.0 }));
    for t in terms {
        let profile = t.eval_profile(x).scl(amplitude);
        for i in 0..dim {
            for j in 0..dim {
                let a = t.sym_at(dim, i, j);
                if a != 0.0 {
                    let cur = g.at(i, j).clone();
                    g.set(i, j, cur + profile.scl(a));
                }
            }
        }
    }
    g
}

/// `h̄_r` components (3×3) for a boundary family, given the full chart point
/// `(r, y¹, y², y³)`.
pub fn family_hr<S: Scalar>(family: &BoundaryFamily, x: &[S]) -> SqMat<S> {
    let like = &x[0];
    match family {
        BoundaryFamily::RoundSphere { radius } => {
            let a = *radius;
            let r = &x[0];
            // (a - r²/(4a))² · h_{S³}(β, θ)
            let q = (-(r.clone() * r.clone()).scl(1.0 / (4.0 * a))).addc(a);
            let q2 = q.clone() * q;
            let beta = &x[1];
            let theta = &x[2];
            let sb = beta.sin();
            let st = theta.sin();
            let mut h = SqMat::zeros(3, like);
            h.set(0, 0, q2.clone());
            h.set(1, 1, q2.clone() * sb.clone() * sb.clone());
            h.set(2, 2, q2 * sb.clone() * sb * st.clone() * st);
            h
        }
        BoundaryFamily::FlatTorus => {
            SqMat::from_fn(3, |i, j| like.lift(if i == j { 1.0 } else { 0.0 }))
        }
        BoundaryFamily::FlatTorusCubic { g3 } => {
            let r = &x[0];
            let r3 = r.clone() * r.clone() * r.clone();
            SqMat::from_fn(3, |i, j| {
                let base = if i == j { 1.0 } else { 0.0 };
                r3.scl(g3[i][j]).addc(base)
            })
        }
        BoundaryFamily::Collar { s } => {
            // chart (x¹, x², w): k̄_w = δ − 2wS on the first two coordinates
            let w = &x[3];
            let mut h = SqMat::zeros(3, like);
            for i in 0..2 {
                for j in 0..2 {
                    let base = if i == j { 1.0 } else { 0.0 };
                    h.set(i, j, w.scl(-2.0 * s[i][j]).addc(base));
                }
            }
            h.set(2, 2, like.lift(1.0));
            h
        }
        BoundaryFamily::Perturbed { terms, amplitude } => {
            // synthetic Schouten family h̄_r = h̄ − r² P^{h̄}(y), with the
            // boundary metric a trig perturbation of flat space and P its
            // (3D-normalized) Schouten tensor computed on the fly
            let y = &x[1..4];
            let h = trig_perturbed_matrix(3, y, terms, *amplitude);
            let ys = crate::jet::nested_variables(y, 2);
            let hj = trig_perturbed_matrix(3, &ys, terms, *amplitude);
            let cj = crate::curv::curvature_jets(&hj)
                .expect("perturbed boundary metric is near flat");
            let r = &x[0];
            let r2 = r.clone() * r.clone();
            SqMat::from_fn(3, |i, j| {
                let p = cj.ricci.at(i, j).value()
                    - cj.scalar.value().scl(0.25) * h.at(i, j).clone();
                h.at(i, j).clone() - r2.clone() * p
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_rescale_componentwise() {
        let g = MetricField::hyperbolic_ball(4);
        let om = ScalarField::constant(0.3);
        let gr = g.conformal_rescale(om);
        let p = [0.1, -0.2, 0.05, 0.3];
        let a = g.eval(&p);
        let b = gr.eval(&p);
        let f = (2.0_f64 * 0.3).exp();
        for i in 0..4 {
            for j in 0..4 {
                assert!((b.at(i, j) - f * a.at(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn spd_validation_and_domain() {
        let g = MetricField::hyperbolic_ball(4);
        assert!(g.validate_spd(&[0.2, 0.0, 0.0, 0.1]).is_ok());
        assert!(!g.contains(&[0.9, 0.5, 0.0, 0.0]));
        assert!(g.eval_jets(&[0.99, 0.2, 0.0, 0.0], 2).is_err());
    }
}
