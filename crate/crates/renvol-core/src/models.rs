//! Closed-form model geometries: the hyperbolic 4-ball and its geodesic
//! normal form, totally geodesic cap families with their boundary data,
//! collar (eikonal) coordinates, formal normal-form models with prescribed
//! cubic terms, and minimal-surface germs used by the identity suite.
//!
//! Ball-model conventions: `g₊ = 4|dx|²/(1−|x|²)²` on the unit 4-ball with
//! geodesic defining function `r = 2(1−|x|)/(1+|x|)`; the boundary
//! representative is the round unit `S³`. The region `X⁺` attached to the
//! cap at boundary latitude `x₄ = sin t` is the side containing the south
//! pole; `w = β − β_t` (colatitude offset) is the eikonal collar function of
//! `Σ_t`, so `w ≥ 0` on `M⁺`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{variables, Scalar};
use crate::metric::{family_hr, BoundaryFamily, MetricField, MetricKind};
use crate::quad::{gauss_legendre, Axis};
use crate::series::{fit_expansion, EpsilonLadder, FitKind, LadderSpec, SeriesFit};
use crate::shape::{shape_ctx, shape_data};
use crate::surface::{HypersurfaceChart, SurfaceKind};

/// The hyperbolic ball model `(B⁴, 4|dx|²/(1−|x|²)²)`.
pub struct HyperbolicBallModel;

impl HyperbolicBallModel {
    pub fn metric() -> MetricField {
        MetricField::hyperbolic_ball(4)
    }

    /// Geodesic defining function of the round boundary representative.
    pub fn r_of(x: &[f64]) -> f64 {
        let rho = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        2.0 * (1.0 - rho) / (1.0 + rho)
    }

    /// Euclidean radius of the sphere `{r = const}`.
    pub fn rho_of_r(r: f64) -> f64 {
        (2.0 - r) / (2.0 + r)
    }
}

/// Exact geodesic normal form of the hyperbolic ball: the metric
/// `(dr² + (a − r²/4a)² h_{S³})/r²` on the chart `(r, β, θ, φ)`.
pub fn hyperbolic_normal_form(round_radius: f64) -> Result<NormalFormModel> {
    if !(round_radius > 0.0) {
        return Err(Error::Config { detail: "round_radius must be positive".into() });
    }
    Ok(NormalFormModel {
        family: BoundaryFamily::RoundSphere { radius: round_radius },
        einstein: true,
        formal: false,
    })
}

/// A geodesic-normal-form model `(dr² + h̄_r)/r²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalFormModel {
    pub family: BoundaryFamily,
    /// exactly Einstein (as opposed to Einstein only to expansion order)
    pub einstein: bool,
    /// formal models are excluded from Einstein-residual gates
    pub formal: bool,
}

impl NormalFormModel {
    pub fn torus_hyperbolic() -> NormalFormModel {
        NormalFormModel { family: BoundaryFamily::FlatTorus, einstein: true, formal: false }
    }

    /// Flat torus boundary with a prescribed constant trace-free `g⁽³⁾`.
    pub fn formal_g3(g3: [[f64; 3]; 3]) -> Result<NormalFormModel> {
        let tr: f64 = (0..3).map(|i| g3[i][i]).sum();
        if tr.abs() > 1e-12 {
            return Err(Error::Config { detail: format!("g3 must be trace-free, tr = {tr}") });
        }
        Ok(NormalFormModel {
            family: BoundaryFamily::FlatTorusCubic { g3 },
            einstein: false,
            formal: true,
        })
    }

    /// Collar-profile boundary `h̄ = (δ − 2wS) ⊕ dw²` with `h̄_r ≡ h̄`.
    pub fn collar_profile(s: [[f64; 2]; 2]) -> NormalFormModel {
        NormalFormModel { family: BoundaryFamily::Collar { s }, einstein: false, formal: true }
    }

    /// Synthetic Schouten family over a perturbed boundary metric.
    pub fn synthetic_schouten(terms: Vec<crate::metric::TrigTerm>, amplitude: f64) -> NormalFormModel {
        NormalFormModel {
            family: BoundaryFamily::Perturbed { terms, amplitude },
            einstein: false,
            formal: true,
        }
    }

    pub fn metric(&self) -> MetricField {
        MetricField::new(MetricKind::NormalForm { family: self.family.clone() })
    }

    pub fn compactified(&self) -> MetricField {
        MetricField::new(MetricKind::Compactified { family: self.family.clone() })
    }

    pub fn boundary_metric(&self) -> MetricField {
        MetricField::new(MetricKind::Boundary { family: self.family.clone() })
    }

    /// `√(det h̄_r / det h̄)` at one boundary point, as a function of `r`.
    pub fn volume_ratio(&self, y: &[f64], r: f64) -> f64 {
        let x = [r, y[0], y[1], y[2]];
        let hr = family_hr(&self.family, &x);
        let x0 = [1e-300, y[0], y[1], y[2]];
        let h0 = family_hr(&self.family, &x0);
        (hr.det() / h0.det()).sqrt()
    }
}

/// Renormalized volume coefficient `v⁽²⁾` extracted from an `r`-ladder fit of
/// the volume ratio; equals `−R_h̄/8`.
pub fn volume_coefficient_v2(model: &NormalFormModel, y: &[f64]) -> Result<SeriesFit> {
    let spec = LadderSpec { eps0: 0.1, ratio: 0.8, rungs: 10 };
    // even expansion 1 + v²r² + v⁴r⁴ + O(r⁵): fit in the variable ε = r²
    let rungs: Vec<(f64, f64)> = spec
        .epsilons()
        .iter()
        .map(|&r| (r * r, (model.volume_ratio(y, r) - 1.0) / (r * r)))
        .collect();
    // now v(ε) = v² + v⁴ε + ...: reuse the surface fit with ε-basis only
    let ladder = EpsilonLadder::new(rungs)?;
    let fit = fit_expansion(&ladder, FitKind::Surface { with_log: false })?;
    if fit.c2.abs() > 1e-6 {
        return Err(Error::FitFailure {
            detail: format!("spurious ε⁻¹ component {:.3e} in v² fit", fit.c2),
        });
    }
    Ok(SeriesFit { c0: 0.0, c2: 0.0, c_log: None, finite_part: fit.finite_part, ..fit })
}

/// Closed-form data of the totally geodesic cap family in the ball model.
#[derive(Clone, Debug)]
pub struct CapConfig {
    /// boundary latitude parameter; `Σ_t = {x₄ = sin t} ⊂ S³`
    pub t: f64,
    /// colatitude of `Σ_t` from the north pole
    pub beta_t: f64,
    /// the dividing hypersurface (equatorial slice or spherical cap)
    pub surface: HypersurfaceChart,
    /// mean curvature of `Σ_t` in the round boundary w.r.t. the
    /// `M⁺`-inward normal (`−2 tan t`)
    pub eta_bar: f64,
    /// boundary normal-variation speed of the unit-latitude-speed family
    pub f_tilde: f64,
}

/// Member of the geodesic cap family.
pub fn cap_family(t: f64) -> CapConfig {
    let beta_t = std::f64::consts::FRAC_PI_2 - t;
    let surface = if t.abs() < 1e-14 {
        HypersurfaceChart::new(SurfaceKind::Slice { ambient_dim: 4, axis: 3, level: 0.0 }, 4, 3)
    } else {
        HypersurfaceChart::new(SurfaceKind::Cap { lat: t }, 4, 3)
    };
    CapConfig { t, beta_t, surface, eta_bar: -2.0 * t.tan(), f_tilde: -1.0 }
}

impl CapConfig {
    /// The family as a graph over the equatorial ball chart, smooth in `t`;
    /// used for variation derivatives.
    pub fn graph_at(t: f64) -> HypersurfaceChart {
        HypersurfaceChart::new(SurfaceKind::CapGraph { t }, 4, 3)
    }

    /// `cos β` of the cap point lying on `{r = const}`.
    pub fn cos_beta_on_sphere(&self, r: f64) -> f64 {
        self.t.sin() * (4.0 + r * r) / (4.0 - r * r)
    }

    /// Graph height `u(r) = β_cap(r) − β_t` of the cap over the collar
    /// chart of `Σ_t` (`w = β − β_t`).
    pub fn graph_u(&self, r: f64) -> f64 {
        self.cos_beta_on_sphere(r).clamp(-1.0, 1.0).acos() - self.beta_t
    }

    /// Colatitude span of `M⁺ = {β > β_t}`, volume w.r.t. the round `h̄`.
    pub fn vol_m_plus(&self) -> f64 {
        2.0 * std::f64::consts::PI
            * (std::f64::consts::PI - self.beta_t + self.beta_t.sin() * self.beta_t.cos())
    }

    /// Area of `Σ_t` w.r.t. `k̄`.
    pub fn area_sigma(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.t.cos().powi(2)
    }

    /// Largest cap parameter: the cap subtends the angle `|t|` from its
    /// center, so `σ ∈ [0, |t|]`.
    pub fn sigma_max(&self) -> f64 {
        self.t.abs()
    }

    /// Radius where the cap sphere exits the chart (`cos β_* = ±1`); the
    /// colatitude limit `β_*(r)` has a kink there.
    pub fn r_kink(&self) -> f64 {
        let s = self.t.sin();
        if s.abs() < 1e-14 {
            2.0
        } else if s > 0.0 {
            2.0 * ((1.0 - s) / (1.0 + s)).sqrt()
        } else {
            2.0 * ((1.0 + s) / (1.0 - s)).sqrt()
        }
    }

    /// Lower colatitude limit of `X⁺` on the sphere `{r = const}`.
    pub fn beta_star(&self, r: f64) -> f64 {
        self.cos_beta_on_sphere(r).clamp(-1.0, 1.0).acos()
    }
}

/// Eikonal collar coordinates `(r, ζ, w)` near a corner surface.
#[derive(Clone, Debug)]
pub enum CollarCoordinates {
    /// `w = β − β₀` on the round `S³`; caustics at the poles.
    SphereLatitude { beta0: f64 },
    /// `w = x_axis − level` on a flat boundary chart.
    FlatPlane { axis: usize, level: f64 },
}

/// Construct collar coordinates for a supported (model, Σ) pair and verify
/// the requested collar width stays inside the caustic-free region.
pub fn collar_coordinates(model: &NormalFormModel, cap: &CapConfig, width: f64) -> Result<CollarCoordinates> {
    match &model.family {
        BoundaryFamily::RoundSphere { .. } => {
            let beta0 = cap.beta_t;
            let caustic = beta0.min(std::f64::consts::PI - beta0);
            if width >= caustic {
                return Err(Error::CausticReached { width });
            }
            Ok(CollarCoordinates::SphereLatitude { beta0 })
        }
        BoundaryFamily::FlatTorus | BoundaryFamily::FlatTorusCubic { .. } | BoundaryFamily::Collar { .. } => {
            Ok(CollarCoordinates::FlatPlane { axis: 2, level: 0.0 })
        }
        _ => Err(Error::Unsupported { detail: "no collar construction for this family".into() }),
    }
}

impl CollarCoordinates {
    /// `w` at a boundary-chart point.
    pub fn w(&self, y: &[f64]) -> f64 {
        match self {
            CollarCoordinates::SphereLatitude { beta0 } => y[0] - beta0,
            CollarCoordinates::FlatPlane { axis, level } => y[*axis] - level,
        }
    }

    /// `|dw|²_h̄ − 1` at a boundary point of the given model.
    pub fn eikonal_residual(&self, model: &NormalFormModel, y: &[f64]) -> Result<f64> {
        let h = model.boundary_metric();
        let ys = variables(y, 1);
        let grad: Vec<f64> = match self {
            CollarCoordinates::SphereLatitude { beta0 } => {
                let w = ys[0].addc(-beta0);
                (0..3).map(|i| w.d(i).value()).collect()
            }
            CollarCoordinates::FlatPlane { axis, level } => {
                let w = ys[*axis].addc(-level);
                (0..3).map(|i| w.d(i).value()).collect()
            }
        };
        let hm = h.eval(y);
        let hinv = hm.inverse()?;
        let mut n2 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                n2 += hinv.at(i, j) * grad[i] * grad[j];
            }
        }
        Ok(n2 - 1.0)
    }
}

/// Fit of the graph expansion `u(r) = ¼η̄_M r² + v r⁴ log r + O(r⁴)`.
pub struct GraphExpansion {
    pub quadratic: f64,
    pub log_coeff: f64,
    pub log_coeff_uncertainty: f64,
    pub residual: f64,
}

/// Extract the leading coefficients of `u(r)` by least squares on a ladder.
///
/// The `r⁴ log r` and `r⁴` columns are nearly collinear on practical rung
/// ranges, so the log coefficient's uncertainty is estimated from the spread
/// between the full fit and a refit with the three largest rungs dropped.
pub fn minimal_graph_expansion(u: impl Fn(f64) -> f64, spec: &LadderSpec) -> Result<GraphExpansion> {
    use nalgebra::{DMatrix, DVector};
    let eps = spec.epsilons();
    let solve = |eps: &[f64]| -> Result<(f64, f64, f64)> {
        let mut a = DMatrix::zeros(eps.len(), 3);
        let mut y = DVector::zeros(eps.len());
        for (i, &r) in eps.iter().enumerate() {
            a[(i, 0)] = r * r;
            a[(i, 1)] = r.powi(4) * r.ln();
            a[(i, 2)] = r.powi(4);
            y[i] = u(r);
        }
        let scales: Vec<f64> = (0..3).map(|j| a.column(j).norm().max(1e-300)).collect();
        for (j, s) in scales.iter().enumerate() {
            let mut c = a.column_mut(j);
            c /= *s;
        }
        let svd = a.clone().svd(true, true);
        let sol = svd.solve(&y, 1e-14).map_err(|e| Error::FitFailure { detail: e.to_string() })?;
        let resid = (&a * &sol - &y).norm();
        Ok((sol[0] / scales[0], sol[1] / scales[1], resid))
    };
    if eps.len() < 9 {
        return Err(Error::FitFailure { detail: "graph fit needs at least 9 rungs".into() });
    }
    let (quad, log_coeff, resid) = solve(&eps)?;
    let (_, log_dropped, _) = solve(&eps[3..])?;
    Ok(GraphExpansion {
        quadratic: quad,
        log_coeff,
        log_coeff_uncertainty: (log_coeff - log_dropped).abs() + resid,
        residual: resid,
    })
}

/// Solve the axisymmetric minimal-graph ODE `B''(r) = F(r, B, B')` in the
/// ball model by driving the machine-computed mean curvature of a local
/// quadratic patch to zero (H is affine in the second derivative).
pub fn axisym_minimal_ode_rhs(metric: &MetricField, r: f64, b: f64, bp: f64) -> Result<f64> {
    let h_of = |b2: f64| -> Result<f64> {
        let surf = HypersurfaceChart::new(
            SurfaceKind::AxisymBallGraph { r0: r, coef: [b, bp, b2] },
            4,
            3,
        );
        let sd = shape_data(metric, &surf, &[r, 0.9, 1.1])?;
        Ok(sd.h_mean)
    };
    let h0 = h_of(0.0)?;
    let h1 = h_of(1.0)?;
    let slope = h1 - h0;
    if slope.abs() < 1e-14 {
        return Err(Error::OdeSolveFailure { detail: "mean curvature insensitive to B''".into() });
    }
    Ok(-h0 / slope * 2.0) // patch stores B''/2 as the quadratic coefficient
}

/// Integrate the minimal-graph ODE from `(r_start, B, B')` through the
/// given sample radii (classic RK4, monotone samples in either direction).
pub fn integrate_minimal_graph(
    metric: &MetricField,
    r_start: f64,
    b_start: f64,
    bp_start: f64,
    samples: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(samples.len());
    let mut r = r_start;
    let mut y = [b_start, bp_start];
    let rhs = |r: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let bpp = axisym_minimal_ode_rhs(metric, r, y[0], y[1])?;
        Ok([y[1], bpp])
    };
    for &target in samples {
        let dir = (target - r).signum();
        while (target - r) * dir > 1e-12 {
            let h = dir * 5e-3_f64.min((target - r).abs());
            let k1 = rhs(r, &y)?;
            let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
            let k2 = rhs(r + 0.5 * h, &y2)?;
            let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
            let k3 = rhs(r + 0.5 * h, &y3)?;
            let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
            let k4 = rhs(r + h, &y4)?;
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            r += h;
        }
        out.push(y[0]);
    }
    Ok(out)
}

/// A polynomial graph in the hyperbolic ball that is minimal to second
/// order at its base point (H, ∇H and the raw Hessian of H all vanish),
/// with generically nonvanishing trace-free second fundamental form.
pub fn minimal_germ_surface(seed_coeffs: &[f64]) -> Result<HypersurfaceChart> {
    let metric = HyperbolicBallModel::metric();
    // multi-indices of orders 2..4 in three parameters
    let mut alphas: Vec<Vec<usize>> = Vec::new();
    for total in 2..=4 {
        for i in 0..=total {
            for j in 0..=(total - i) {
                alphas.push(vec![i, j, total - i - j]);
            }
        }
    }
    let base = vec![0.15, -0.1, 0.05];
    let tilt = [0.08, -0.06, 0.04];
    let mut coeffs: Vec<(Vec<usize>, f64)> = vec![
        (vec![0, 0, 0], 0.1),
        (vec![1, 0, 0], tilt[0]),
        (vec![0, 1, 0], tilt[1]),
        (vec![0, 0, 1], tilt[2]),
    ];
    for (k, a) in alphas.iter().enumerate() {
        let c = 0.15 * seed_coeffs.get(k).copied().unwrap_or(0.0);
        coeffs.push((a.clone(), c));
    }
    let n_free = alphas.len();
    let residual = |cs: &[(Vec<usize>, f64)]| -> Result<Vec<f64>> {
        let surf = HypersurfaceChart::new(
            SurfaceKind::PolyGraph { ambient_dim: 4, base: base.clone(), coeffs: cs.to_vec() },
            4,
            3,
        );
        let ctx = shape_ctx(&metric, &surf, &base, 4)?;
        let h = &ctx.h_mean;
        let mut res = vec![h.value()];
        for a in 0..3 {
            res.push(h.d(a).value());
        }
        for a in 0..3 {
            for b in a..3 {
                res.push(h.d(a).d(b).value());
            }
        }
        Ok(res)
    };
    // Gauss-Newton with finite-difference Jacobian over the free coefficients
    for _iter in 0..8 {
        let r0 = residual(&coeffs)?;
        let norm: f64 = r0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-11 {
            break;
        }
        let m_eq = r0.len();
        let mut jac = nalgebra::DMatrix::zeros(m_eq, n_free);
        let dstep = 1e-6;
        for c in 0..n_free {
            let mut pert = coeffs.clone();
            pert[4 + c].1 += dstep;
            let rp = residual(&pert)?;
            for i in 0..m_eq {
                jac[(i, c)] = (rp[i] - r0[i]) / dstep;
            }
        }
        let rhs = nalgebra::DVector::from_iterator(m_eq, r0.iter().map(|x| -x));
        let svd = jac.svd(true, true);
        let delta = svd
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::SolveFailure { detail: e.to_string() })?;
        for c in 0..n_free {
            coeffs[4 + c].1 += delta[c];
        }
    }
    let r_final = residual(&coeffs)?;
    let norm: f64 = r_final.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1e-9 {
        return Err(Error::SolveFailure { detail: format!("germ Newton stalled at {norm:.3e}") });
    }
    Ok(HypersurfaceChart::new(
        SurfaceKind::PolyGraph { ambient_dim: 4, base, coeffs },
        4,
        3,
    ))
}

/// `∫ f dv` over the boundary torus `[0,2π)²` of a collar/formal model
/// (periodic trapezoid at Gauss accuracy for trig data).
pub fn torus_sigma_integral(f: impl Fn(&[f64]) -> f64, n: usize) -> f64 {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += f(&[i as f64 * h, j as f64 * h]);
        }
    }
    acc * h * h
}

/// 1D Gauss–Legendre helper on `[a, b]`.
pub fn gl_interval(a: f64, b: f64, order: usize, panels: usize) -> Vec<(f64, f64)> {
    let axis = Axis::new(a, b, order, panels);
    let gl = gauss_legendre(order);
    let mut out = Vec::new();
    let h = (axis.hi - axis.lo) / panels as f64;
    for p in 0..panels {
        let lo = axis.lo + p as f64 * h;
        for (x, w) in gl.0.iter().zip(gl.1.iter()) {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}
