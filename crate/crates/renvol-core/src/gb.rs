//! Assembly of the corner Gauss-Bonnet identity and the renormalized volume
//! of the half region cut out of the hyperbolic ball by a totally geodesic
//! cap: truncated-volume ladders with series fits, the five-term breakdown
//! at fixed ε, and the renormalized-volume identity residual.
//!
//! Geometry: `X⁺` is the south side of the cap at boundary latitude
//! `x₄ = sin t`. On the sphere `{r = const}` the region is
//! `{β ≥ β_*(r)}` with `cos β_*(r) = sin t·(4+r²)/(4−r²)` clamped to
//! `[−1, 1]`; the clamp produces a kink in the colatitude span at
//! `r_kink`, resolved by splitting and a square-root substitution.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::ExecMode;
use crate::kernel;
use crate::metric::MetricField;
use crate::models::{cap_family, gl_interval, CapConfig, HyperbolicBallModel};
use crate::quad::gauss_legendre;
use crate::series::{fit_expansion, neumaier_sum, EpsilonLadder, FitKind, LadderSpec, SeriesFit};
use crate::shape::{orient_toward, shape_ctx};
use crate::surface::{HypersurfaceChart, SurfaceKind};

const PI: f64 = std::f64::consts::PI;

/// `∫_{β_*}^{π} sin²β dβ = (π − β_* + sin β_* cos β_*)/2`.
fn angular_span(beta_star: f64) -> f64 {
    0.5 * (PI - beta_star + beta_star.sin() * beta_star.cos())
}

fn q_of(r: f64) -> f64 {
    1.0 - 0.25 * r * r
}

/// Radial nodes for `∫_ε^{r_end} φ(r) dr` with a log substitution away from
/// the kink and a square-root substitution absorbing the `(r_c − r)^{3/2}`
/// behavior of the angular span at the kink.
fn radial_nodes(cap: &CapConfig, eps: f64, order: usize) -> Vec<(f64, f64)> {
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    let s = cap.t.sin();
    let r_end = if s < -1e-14 { cap.r_kink() } else { 2.0 };
    let r_c = if s.abs() < 1e-14 { r_end } else { cap.r_kink() };
    let split = (r_c - 0.15).max(eps);
    // log panels on [ε, split]
    if split > eps + 1e-13 {
        let (lo, hi) = (eps.ln(), split.ln());
        let panels = 3 + ((hi - lo) / 1.2) as usize;
        for (sv, w) in gl_interval(lo, hi, order, panels) {
            let r = sv.exp();
            nodes.push((r, w * r));
        }
    }
    // sqrt panels on [split, r_c]: r = r_c − v²
    if r_c > split + 1e-13 {
        let vmax = (r_c - split).sqrt();
        for (v, w) in gl_interval(0.0, vmax, order, 2) {
            nodes.push((r_c - v * v, w * 2.0 * v));
        }
    }
    // plain panels beyond the kink (full S³ span, t > 0)
    if r_end > r_c + 1e-13 {
        for (r, w) in gl_interval(r_c, r_end, order, 3) {
            nodes.push((r, w));
        }
    }
    nodes
}

/// Truncated volume `vol_{g₊}(X⁺ ∩ {r > ε})`.
pub fn vol_half(cap: &CapConfig, eps: f64) -> f64 {
    let vals: Vec<f64> = radial_nodes(cap, eps, 16)
        .into_iter()
        .map(|(r, w)| {
            let a = angular_span(cap.beta_star(r));
            w * r.powi(-4) * q_of(r).powi(3) * a
        })
        .collect();
    4.0 * PI * neumaier_sum(&vals)
}

/// Volume ladder over a geometric ε-spec.
pub fn vol_half_ladder(cap: &CapConfig, spec: &LadderSpec, mode: ExecMode) -> Result<EpsilonLadder> {
    let eps = spec.epsilons();
    let vals = crate::exec::map_indexed(mode, eps.len(), |k| vol_half(cap, eps[k]));
    EpsilonLadder::new(eps.into_iter().zip(vals).collect())
}

/// Renormalized volume of the half region: ladder plus series fit
/// (`c₀ε⁻³ + c₂ε⁻¹ + V₊⁺ + …`).
pub fn renormalized_volume_half(
    cap: &CapConfig,
    spec: &LadderSpec,
    mode: ExecMode,
) -> Result<(EpsilonLadder, SeriesFit)> {
    let ladder = vol_half_ladder(cap, spec, mode)?;
    let fit = fit_expansion(&ladder, FitKind::Volume { with_log: false })?;
    Ok((ladder, fit))
}

fn ball_point(r: f64, beta: f64, theta: f64, phi: f64) -> [f64; 4] {
    let rho = HyperbolicBallModel::rho_of_r(r);
    [
        rho * beta.sin() * theta.sin() * phi.cos(),
        rho * beta.sin() * theta.sin() * phi.sin(),
        rho * beta.sin() * theta.cos(),
        rho * beta.cos(),
    ]
}

/// Interior Gauss-Bonnet integrand over the truncated half region:
/// returns `(∫ |W|²/8 dv, ∫ Q/2 dv)` computed from the curvature machinery.
pub fn interior_wq(cap: &CapConfig, eps: f64, mode: ExecMode) -> Result<(f64, f64)> {
    let metric = HyperbolicBallModel::metric();
    let gl_u = gauss_legendre(12);
    let nodes_r = radial_nodes(cap, eps, 10);
    let vals = crate::exec::map_indexed(mode, nodes_r.len(), |k| {
        let (r, wr) = nodes_r[k];
        let beta_star = cap.beta_star(r);
        let span = PI - beta_star;
        let mut acc_w = 0.0;
        let mut acc_q = 0.0;
        for (xu, wu) in gl_u.0.iter().zip(gl_u.1.iter()) {
            let beta = beta_star + span * 0.5 * (xu + 1.0);
            let wb = 0.5 * span * wu;
            let p = ball_point(r, beta, 1.1, 0.7);
            let wsq = kernel::weyl_norm_sq(&metric, &p).expect("interior point");
            let q = kernel::q_curvature_4d(&metric, &p).expect("interior point");
            let dv = r.powi(-4) * q_of(r).powi(3) * beta.sin().powi(2);
            acc_w += wb * dv * wsq / 8.0;
            acc_q += wb * dv * q / 2.0;
        }
        (wr * acc_w, wr * acc_q)
    });
    let w: Vec<f64> = vals.iter().map(|v| v.0).collect();
    let q: Vec<f64> = vals.iter().map(|v| v.1).collect();
    Ok((4.0 * PI * neumaier_sum(&w), 4.0 * PI * neumaier_sum(&q)))
}

/// Colatitude of the corner `Σ_ε` on the sphere `{r = ε}`.
pub fn corner_beta(cap: &CapConfig, eps: f64) -> f64 {
    cap.beta_star(eps)
}

/// Generic axisymmetric integral over the face `M_ε⁺ = {r = ε, β ≥ β_ε}`
/// with respect to a metric: `∫ f dv` with `f` evaluated through a
/// surface-chart closure at sampled colatitudes.
pub fn face_m_integral(
    metric: &MetricField,
    rho_eps: f64,
    beta_lo: f64,
    order: usize,
    mode: ExecMode,
    f: impl Fn(&HypersurfaceChart, &[f64; 3]) -> f64 + Sync + Send,
) -> f64 {
    let surf =
        HypersurfaceChart::new(SurfaceKind::SphereInBall { ambient_dim: 4, radius: rho_eps }, 4, 3);
    let surf = orient_toward(metric, &surf, &[1.3, 1.1, 0.7], &[0.0; 4]).expect("sphere face");
    let nodes = gl_interval(beta_lo, PI, order, 3);
    let vals = crate::exec::map_indexed(mode, nodes.len(), |k| {
        let (beta, w) = nodes[k];
        let q = [beta, 1.1, 0.7];
        let ctx = shape_ctx(metric, &surf, &q, 2).expect("face chart");
        let density = induced_det3(&ctx).sqrt() / (1.1_f64).sin();
        w * f(&surf, &q) * density
    });
    4.0 * PI * neumaier_sum(&vals)
}

/// determinant of the 3×3 induced metric at the context point
fn induced_det3(ctx: &crate::shape::ShapeCtx) -> f64 {
    crate::linalg::SqMat::from_fn(3, |a, b| ctx.h.at(a, b).value()).det()
}

/// `∫_{Y_ε} f dv_h̃` over the truncated cap (axisymmetric integrand).
pub fn face_y_integral(
    metric: &MetricField,
    cap: &CapConfig,
    eps: f64,
    order: usize,
    mode: ExecMode,
    f: impl Fn(&HypersurfaceChart, &[f64; 3]) -> f64 + Sync + Send,
) -> f64 {
    if cap.t.abs() < 1e-14 {
        // equatorial slice: polar integration over the disk radius
        let surf = cap.surface.clone();
        let rho_eps = HyperbolicBallModel::rho_of_r(eps);
        let nodes = gl_interval(0.0, rho_eps, order, 6);
        let vals = crate::exec::map_indexed(mode, nodes.len(), |k| {
            let (zeta, w) = nodes[k];
            let (theta, phi): (f64, f64) = (1.1, 0.7);
            let q = [
                zeta * theta.sin() * phi.cos(),
                zeta * theta.sin() * phi.sin(),
                zeta * theta.cos(),
            ];
            let conf = 2.0 / (1.0 - zeta * zeta);
            w * f(&surf, &q) * conf.powi(3) * zeta * zeta
        });
        return 4.0 * PI * neumaier_sum(&vals);
    }
    let surf = cap.surface.clone();
    let sigma_eps = cap_sigma_at_r(cap, eps);
    let nodes = gl_interval(1e-8, sigma_eps, order, 4);
    let vals = crate::exec::map_indexed(mode, nodes.len(), |k| {
        let (sigma, w) = nodes[k];
        let q = [sigma, 1.1, 0.7];
        let ctx = shape_ctx(metric, &surf, &q, 2).expect("cap chart");
        w * f(&surf, &q) * induced_det3(&ctx).sqrt() / (1.1_f64).sin()
    });
    4.0 * PI * neumaier_sum(&vals)
}

/// Cap parameter σ at which the cap meets `{r = eps}`.
pub fn cap_sigma_at_r(cap: &CapConfig, eps: f64) -> f64 {
    let (c, rad) = crate::surface::cap_center_radius(cap.t);
    let rho = HyperbolicBallModel::rho_of_r(eps);
    let cosv = (c * c + rad * rad - rho * rho) / (2.0 * c.abs() * rad);
    cosv.clamp(-1.0, 1.0).acos()
}

/// The two adapted corner faces at `Σ_ε` with region-inward orientations.
pub fn corner_faces_at(cap: &CapConfig, eps: f64) -> Result<crate::corner::CornerFaces> {
    let metric = HyperbolicBallModel::metric();
    let rho_eps = HyperbolicBallModel::rho_of_r(eps);
    let beta_eps = corner_beta(cap, eps);
    let face_m = HypersurfaceChart::new(
        SurfaceKind::BallSphereFace { rho: rho_eps, beta0: beta_eps },
        4,
        3,
    );
    let face_y = if cap.t.abs() < 1e-14 {
        HypersurfaceChart::new(SurfaceKind::DiskFace { rho: rho_eps }, 4, 3)
    } else {
        HypersurfaceChart::new(
            SurfaceKind::CapFace { lat: cap.t, sigma0: cap_sigma_at_r(cap, eps) },
            4,
            3,
        )
    };
    let q3 = [1.1, 0.7, 0.0];
    // μ_M points into {r > ε} (toward the center); μ_Y into X⁺ (south)
    let face_m = orient_toward(&metric, &face_m, &q3, &[0.0; 4])?;
    let corner_pt = {
        let ctx = shape_ctx(&metric, &face_m, &q3, 2)?;
        ctx.point.clone()
    };
    let south = [corner_pt[0] * 0.9, corner_pt[1] * 0.9, corner_pt[2] * 0.9, corner_pt[3] - 0.05];
    let face_y = orient_toward(&metric, &face_y, &q3, &south)?;
    Ok(crate::corner::CornerFaces::new(metric, face_y, face_m))
}

/// Per-term values of the corner Gauss-Bonnet identity on `X_ε⁺`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussBonnetBreakdown {
    pub epsilon: f64,
    pub interior_w: f64,
    pub interior_q: f64,
    pub face_y: f64,
    pub face_m: f64,
    pub corner: f64,
    pub chi_target: f64,
    pub residual: f64,
}

/// Five-term breakdown of the Gauss-Bonnet identity with corners on the
/// truncated half region.
pub fn gauss_bonnet_breakdown(
    cap: &CapConfig,
    eps: f64,
    mode: ExecMode,
) -> Result<GaussBonnetBreakdown> {
    let metric = HyperbolicBallModel::metric();
    let (interior_w, interior_q) = interior_wq(cap, eps, mode)?;
    // face Y: ∫ (𝓛 + T) dv_h̃ over the truncated cap
    let face_y = face_y_integral(&metric, cap, eps, 12, mode, |surf, q| {
        let surf = orient_south(&metric, surf, q);
        crate::shape::chang_qing_l(&metric, &surf, q).expect("L on Y")
            + crate::shape::t_curvature(&metric, &surf, q).expect("T on Y")
    });
    // face M: ∫ (𝓛 + T) dv_h over the spherical face
    let rho_eps = HyperbolicBallModel::rho_of_r(eps);
    let beta_eps = corner_beta(cap, eps);
    let face_m = face_m_integral(&metric, rho_eps, beta_eps, 14, mode, |surf, q| {
        crate::shape::chang_qing_l(&metric, surf, q).expect("L on M")
            + crate::shape::t_curvature(&metric, surf, q).expect("T on M")
    });
    // corner: ∮ (U + G) dv_k over Σ_ε (the integrand is axisymmetric)
    let faces = corner_faces_at(cap, eps)?;
    let corner = corner_integral(&faces, &|cfg, q| {
        let cd = crate::corner::corner_data(cfg, q)?;
        let ex = crate::corner::corner_extra(cfg, q)?;
        Ok(crate::corner::u_curvature(&cd, &ex) + crate::corner::g_curvature(&cd))
    })?;
    let chi_target = 4.0 * PI * PI;
    let total = interior_w + interior_q + face_y + face_m + corner;
    Ok(GaussBonnetBreakdown {
        epsilon: eps,
        interior_w,
        interior_q,
        face_y,
        face_m,
        corner,
        chi_target,
        residual: total - chi_target,
    })
}

fn orient_south(
    metric: &MetricField,
    surf: &HypersurfaceChart,
    q: &[f64; 3],
) -> HypersurfaceChart {
    let ctx = shape_ctx(metric, surf, q, 2).expect("orientation probe");
    let p = ctx.point.clone();
    let south = [p[0] * 0.98, p[1] * 0.98, p[2] * 0.98, p[3] - 1e-2];
    orient_toward(metric, surf, q, &south).expect("orientation probe")
}

/// `∮ f dv_{k_ε}` over the corner sphere, using axisymmetry.
pub fn corner_integral(
    faces: &crate::corner::CornerFaces,
    f: &dyn Fn(&crate::corner::CornerFaces, &[f64]) -> Result<f64>,
) -> Result<f64> {
    let q = [1.1, 0.7];
    let value = f(faces, &q)?;
    let cd = crate::corner::corner_data(faces, &q)?;
    let area = 4.0 * PI * cd.k.det().sqrt() / q[0].sin();
    Ok(value * area)
}

/// Full-manifold (no corner) variant: interior plus the full boundary
/// sphere; closes against `4π²χ(B⁴)`.
pub fn anderson_breakdown(eps: f64, mode: ExecMode) -> Result<GaussBonnetBreakdown> {
    let metric = HyperbolicBallModel::metric();
    let cap = cap_family(0.0);
    let (mut interior_w, mut interior_q) = interior_wq(&cap, eps, mode)?;
    interior_w *= 2.0;
    interior_q *= 2.0;
    let rho_eps = HyperbolicBallModel::rho_of_r(eps);
    let face_m = face_m_integral(&metric, rho_eps, 1e-9, 14, mode, |surf, q| {
        crate::shape::chang_qing_l(&metric, surf, q).expect("L on M")
            + crate::shape::t_curvature(&metric, surf, q).expect("T on M")
    });
    let chi_target = 4.0 * PI * PI;
    let total = interior_w + interior_q + face_m;
    Ok(GaussBonnetBreakdown {
        epsilon: eps,
        interior_w,
        interior_q,
        face_y: 0.0,
        face_m,
        corner: 0.0,
        chi_target,
        residual: total - chi_target,
    })
}

/// Residual report of the renormalized-volume identity
/// `π²(4χ(X⁺) − χ(Σ)) = 3V₊⁺ + ⅛∫|W|² + ∫𝒞`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GbrvReport {
    pub t: f64,
    pub v_plus: f64,
    pub w_term: f64,
    pub c_term: f64,
    pub chi_term: f64,
    pub residual: f64,
    pub fit: SeriesFit,
}

/// Evaluate the identity for a cap configuration; `χ(X⁺) = 1` and
/// `χ(Σ) = 2` are model metadata.
pub fn gbrv_residual(cap: &CapConfig, spec: &LadderSpec, mode: ExecMode) -> Result<GbrvReport> {
    let metric = HyperbolicBallModel::metric();
    let (_, fit) = renormalized_volume_half(cap, spec, mode)?;
    let (w_half, _) = interior_wq(cap, 0.05, mode)?;
    let w_term = w_half; // already contains the 1/8
    let c_term = face_y_integral(&metric, cap, 0.05, 10, mode, |surf, q| {
        let surf = orient_south(&metric, surf, q);
        crate::shape::c_invariant(&metric, &surf, q).expect("C on Y")
    });
    let chi_term = PI * PI * (4.0 - 2.0);
    let residual = chi_term - 3.0 * fit.finite_part - w_term - c_term;
    Ok(GbrvReport { t: cap.t, v_plus: fit.finite_part, w_term, c_term, chi_term, residual, fit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_truncated_volume() {
        // equatorial half at ε = 0.1 against the exact antiderivative
        let cap = cap_family(0.0);
        let eps = 0.1;
        let anti = |r: f64| -r.powi(-3) / 3.0 + 0.75 / r + 3.0 * r / 16.0 - r.powi(3) / 192.0;
        let exact = PI * PI * (anti(2.0) - anti(eps));
        let got = vol_half(&cap, eps);
        assert!((got - exact).abs() / exact < 1e-10, "{got} vs {exact}");
    }

    #[test]
    fn equatorial_renormalized_volume() {
        let cap = cap_family(0.0);
        let (ladder, fit) =
            renormalized_volume_half(&cap, &LadderSpec::default(), ExecMode::default()).unwrap();
        assert_eq!(ladder.rungs.len(), 10);
        let target = 2.0 * PI * PI / 3.0;
        assert!(
            (fit.finite_part - target).abs() / target < 1e-3,
            "V = {}, expect {target}",
            fit.finite_part
        );
        // divergent coefficients: 3c₀ = vol(M⁺) = π², c₂ = −¾π²
        assert!((3.0 * fit.c0 - PI * PI).abs() / (PI * PI) < 1e-4, "c0 = {}", fit.c0);
        assert!((fit.c2 + 0.75 * PI * PI).abs() / (PI * PI) < 1e-4, "c2 = {}", fit.c2);
        assert!(fit.stable);
    }

    #[test]
    fn latitude_volume_constant_in_t() {
        let target = 2.0 * PI * PI / 3.0;
        for t in [0.2, -0.35] {
            let cap = cap_family(t);
            let (_, fit) =
                renormalized_volume_half(&cap, &LadderSpec::default(), ExecMode::default())
                    .unwrap();
            assert!(
                (fit.finite_part - target).abs() / target < 2e-3,
                "t = {t}: V = {}",
                fit.finite_part
            );
            // (Xint) divergent coefficients in closed form
            let c0_expect = cap.vol_m_plus() / 3.0;
            let c2_expect =
                (-2.25 * cap.vol_m_plus() + 6.0 * PI * t.sin() * t.cos()) / 3.0;
            assert!((fit.c0 - c0_expect).abs() / c0_expect.abs() < 1e-4);
            assert!(
                (fit.c2 - c2_expect).abs() / c2_expect.abs() < 1e-3,
                "t = {t}: c2 = {} vs {c2_expect}",
                fit.c2
            );
        }
    }
}
