//! Closed-form scalar fields on charts, evaluable over any [`Scalar`].

use serde::{Deserialize, Serialize};

use crate::jet::Scalar;
use crate::metric::TrigTerm;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ScalarField {
    Constant(f64),
    /// One chart coordinate.
    Coordinate(usize),
    /// `−log x⁰`; the conformal exponent relating `g₊` and `ḡ = r²g₊`.
    MinusLogCoord0,
    /// `c + Σ a_s · trig(k_s·x + φ_s)`.
    Trig { offset: f64, terms: Vec<(f64, TrigTerm)> },
    /// `(1 + |x|²)/(1 − |x|²)` on ball charts: cosh of the hyperbolic
    /// distance to the origin.
    CoshBallDistance,
    /// `log r(x) = log 2 + log(1−|x|) − log(1+|x|)` on the ball chart: the
    /// logarithm of the geodesic defining function of the round
    /// representative.
    BallLogR,
    /// Product of two fields.
    Product(Box<ScalarField>, Box<ScalarField>),
    /// Sum of two fields.
    Sum(Box<ScalarField>, Box<ScalarField>),
    /// Scaled field.
    Scaled(f64, Box<ScalarField>),
    /// `x⁰^p · base`, for prescribed boundary-weighted data like `r^{-1}f̃`.
    CoordPow0(i32, Box<ScalarField>),
}

impl ScalarField {
    pub fn constant(c: f64) -> ScalarField {
        ScalarField::Constant(c)
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let like = &x[0];
        match self {
            ScalarField::Constant(c) => like.lift(*c),
            ScalarField::Coordinate(i) => x[*i].clone(),
            ScalarField::MinusLogCoord0 => -x[0].ln(),
            ScalarField::Trig { offset, terms } => {
                let mut acc = like.lift(*offset);
                for (a, t) in terms {
                    acc = acc + t.eval_profile(x).scl(*a);
                }
                acc
            }
            ScalarField::CoshBallDistance => {
                let mut rho2 = like.lift(0.0);
                for xi in x.iter() {
                    rho2 = rho2 + xi.clone() * xi.clone();
                }
                (rho2.clone().addc(1.0)) * Scalar::recip(&(-rho2).addc(1.0))
            }
            ScalarField::BallLogR => {
                let mut rho2 = like.lift(0.0);
                for xi in x.iter() {
                    rho2 = rho2 + xi.clone() * xi.clone();
                }
                let rho = rho2.sqrt();
                ((-rho.clone()).addc(1.0)).ln() - rho.addc(1.0).ln() + like.lift(2.0_f64.ln())
            }
            ScalarField::Product(a, b) => a.eval(x) * b.eval(x),
            ScalarField::Sum(a, b) => a.eval(x) + b.eval(x),
            ScalarField::Scaled(c, f) => f.eval(x).scl(*c),
            ScalarField::CoordPow0(p, f) => x[0].powi(*p) * f.eval(x),
        }
    }
}
