//! First-variation machinery: the appendix formulas for normal variations
//! (ḣ, ḣ⁻¹, L̇, Ḣ, dv̇), the Ricci-variation cross-check, and both sides of
//! the renormalized-volume variation formula.

use serde::{Deserialize, Serialize};

use crate::curv::{curvature_jets, gidx};
use crate::error::Result;
use crate::exec::ExecMode;
use crate::fields::ScalarField;
use crate::gb;
use crate::jet::{Jet, Scalar};
use crate::linalg::SqMat;
use crate::metric::{BoundaryFamily, MetricField, TrigTerm};
use crate::models::{cap_family, gl_interval, torus_sigma_integral, NormalFormModel};
use crate::series::{central_derivative, fit_expansion, EpsilonLadder, FitKind, LadderSpec};
use crate::shape::{cov_deriv_sym2, shape_ctx, surface_hessian, tensor_laplacian_sym2, ShapeCtx};
use crate::surface::{HypersurfaceChart, SurfaceKind};

/// A one-parameter family of embedded hypersurfaces with a closed-form
/// variation field at `t = 0`.
#[derive(Clone, Debug)]
pub enum VariationFamily {
    /// Spheres in flat R³ shrinking with angular speed profile.
    SphereFlat { rho0: f64, speed0: f64, speed_terms: Vec<(f64, TrigTerm)> },
    /// The totally geodesic cap family of the hyperbolic ball, as graphs
    /// over the equatorial slice.
    CapGraph,
    /// Translating hyperplane `{x₃ = t}` in flat R⁴.
    PlaneTranslate,
}

impl VariationFamily {
    pub fn metric(&self) -> MetricField {
        match self {
            VariationFamily::SphereFlat { .. } => MetricField::euclidean(3),
            VariationFamily::CapGraph => MetricField::hyperbolic_ball(4),
            VariationFamily::PlaneTranslate => MetricField::euclidean(4),
        }
    }

    pub fn surface_at(&self, t: f64) -> HypersurfaceChart {
        match self {
            VariationFamily::SphereFlat { rho0, speed0, speed_terms } => HypersurfaceChart::new(
                SurfaceKind::SphereFamily {
                    rho0: *rho0,
                    t,
                    speed0: *speed0,
                    speed_terms: speed_terms.clone(),
                },
                3,
                2,
            ),
            VariationFamily::CapGraph => HypersurfaceChart::new(SurfaceKind::CapGraph { t }, 4, 3),
            VariationFamily::PlaneTranslate => {
                HypersurfaceChart::new(SurfaceKind::Slice { ambient_dim: 4, axis: 2, level: t }, 4, 3)
            }
        }
    }

    /// Ambient components of `∂_t F|_{t=0}` at a parameter point.
    pub fn velocity<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        let like = &q[0];
        match self {
            VariationFamily::SphereFlat { speed0, speed_terms, .. } => {
                let mut speed = like.lift(*speed0);
                for (a, tt) in speed_terms {
                    speed = speed + tt.eval_profile(q).scl(*a);
                }
                let n = crate::surface::unit3(&q[0], &q[1]);
                n.into_iter().map(|ni| -(speed.clone() * ni)).collect()
            }
            VariationFamily::CapGraph => {
                let mut z2 = like.lift(0.0);
                for v in q.iter().take(3) {
                    z2 = z2 + v.clone() * v.clone();
                }
                vec![
                    like.lift(0.0),
                    like.lift(0.0),
                    like.lift(0.0),
                    z2.addc(1.0).scl(0.5),
                ]
            }
            VariationFamily::PlaneTranslate => {
                vec![like.lift(0.0), like.lift(0.0), like.lift(1.0), like.lift(0.0)]
            }
        }
    }

    /// Orientation anchor for the unit normal (a point on the `μ` side).
    fn orient_target(&self, point: &[f64]) -> Vec<f64> {
        match self {
            VariationFamily::SphereFlat { .. } => vec![0.0, 0.0, 0.0],
            VariationFamily::CapGraph => {
                vec![point[0] * 0.98, point[1] * 0.98, point[2] * 0.98, point[3] - 1e-2]
            }
            VariationFamily::PlaneTranslate => {
                vec![point[0], point[1], point[2] + 1.0, point[3]]
            }
        }
    }
}

/// Residuals of the appendix first-variation formulas at one point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AppendixReport {
    pub hdot: f64,
    pub hinvdot: f64,
    pub ldot: f64,
    pub hdot_mean: f64,
    pub dvdot: f64,
    pub ricci_dot: f64,
}

fn oriented_ctx(
    fam: &VariationFamily,
    t: f64,
    q: &[f64],
    k: usize,
) -> Result<(ShapeCtx, HypersurfaceChart)> {
    let metric = fam.metric();
    let surf = fam.surface_at(t);
    let probe = shape_ctx(&metric, &surf, q, 2)?;
    let target = fam.orient_target(&probe.point);
    let surf = crate::shape::orient_toward(&metric, &surf, q, &target)?;
    Ok((shape_ctx(&metric, &surf, q, k)?, surf))
}

/// Finite-difference `d/dt` of shape quantities against the closed
/// first-variation formulas, Richardson-confirmed.
pub fn appendix_variations(fam: &VariationFamily, q: &[f64], delta: f64) -> Result<AppendixReport> {
    let metric = fam.metric();
    let (ctx0, _surf0) = oriented_ctx(fam, 0.0, q, 4)?;
    let m = ctx0.m;
    let n = ctx0.n;

    // normal speed f = ⟨∂_t F, μ⟩ as a surface jet
    let qs = crate::jet::variables(q, 4);
    let vel: Vec<Jet<f64>> = fam.velocity(&qs);
    let g_at = &ctx0.g_at;
    let mut f_jet = ctx0.h_mean.lift(0.0);
    for i in 0..n {
        for j in 0..n {
            f_jet = f_jet + g_at.at(i, j).clone() * vel[i].clone() * ctx0.mu_vec[j].clone();
        }
    }
    let f0 = f_jet.value();

    // closed-form ingredients at t = 0
    let hc = ctx0.induced_curvature()?;
    let hess_f = surface_hessian(&hc, &f_jet);
    let lap_f = hc.laplacian(&f_jet).value();
    let l_sq = ctx0.l_norm_sq().value();
    // ambient curvature pulled back: R(μ, ∂_a, μ, ∂_b) and Ric(μ, μ)
    let gj = metric.eval_jets(&ctx0.point, 2)?;
    let cj = curvature_jets(&gj)?;
    let mut ric_nn = 0.0;
    for i in 0..n {
        for j in 0..n {
            ric_nn += cj.ricci.at(i, j).value() * ctx0.mu_vec[i].value() * ctx0.mu_vec[j].value();
        }
    }
    let mut riem_pull = SqMat::zeros(m, &0.0);
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            acc += cj.riem.at(i, j, k, l).value()
                                * ctx0.mu_vec[i].value()
                                * ctx0.tangents[a][j].value()
                                * ctx0.mu_vec[k].value()
                                * ctx0.tangents[b][l].value();
                        }
                    }
                }
            }
            riem_pull.set(a, b, acc);
        }
    }

    // finite-difference t-derivatives of h, h^{-1}, L, H, √det h, Ric(h)
    let sample = |t: f64| -> Result<(SqMat<f64>, SqMat<f64>, SqMat<f64>, f64, f64, SqMat<f64>)> {
        let (ctx, _) = oriented_ctx(fam, t, q, 3)?;
        let h = SqMat::from_fn(m, |a, b| ctx.h.at(a, b).value());
        let hinv = h.inverse()?;
        let l = SqMat::from_fn(m, |a, b| ctx.l.at(a, b).value());
        let hcur = ctx.induced_curvature()?;
        let ric = SqMat::from_fn(m, |a, b| hcur.ricci.at(a, b).value());
        let sd = h.det().sqrt();
        Ok((h, hinv, l, ctx.h_mean.value(), sd, ric))
    };
    let snaps: Vec<_> = {
        let mut v = Vec::new();
        for tt in [delta, -delta, 0.5 * delta, -0.5 * delta] {
            v.push(sample(tt)?);
        }
        v
    };
    let fd = |pick: &dyn Fn(&(SqMat<f64>, SqMat<f64>, SqMat<f64>, f64, f64, SqMat<f64>)) -> f64|
     -> Result<f64> {
        let v: Vec<f64> = snaps.iter().map(pick).collect();
        let d1 = (v[0] - v[1]) / (2.0 * delta);
        let d2 = (v[2] - v[3]) / delta;
        Ok((4.0 * d2 - d1) / 3.0)
    };

    let h0 = SqMat::from_fn(m, |a, b| ctx0.h.at(a, b).value());
    let hinv0 = h0.inverse()?;
    let l0v = SqMat::from_fn(m, |a, b| ctx0.l.at(a, b).value());
    let sqrt_det0 = h0.det().sqrt();
    let h_mean0 = ctx0.h_mean.value();

    let mut res_h: f64 = 0.0;
    let mut res_hinv: f64 = 0.0;
    let mut res_l: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let dh = fd(&|s| *s.0.at(a, b))?;
            res_h = res_h.max((dh - (-2.0 * f0 * l0v.at(a, b))).abs());
            let dhi = fd(&|s| *s.1.at(a, b))?;
            // (h^{αβ})' = 2 f L^{αβ}: differentiating h·h⁻¹ = id with
            // h' = −2fL (the finite-difference oracle pins this form)
            let mut expect = 0.0;
            for c in 0..m {
                for d in 0..m {
                    expect += 2.0 * f0 * hinv0.at(a, c) * l0v.at(c, d) * hinv0.at(d, b);
                }
            }
            res_hinv = res_hinv.max((dhi - expect).abs());
            let dl = fd(&|s| *s.2.at(a, b))?;
            let mut l2 = 0.0;
            for c in 0..m {
                for d in 0..m {
                    l2 += l0v.at(a, c) * hinv0.at(c, d) * l0v.at(d, b);
                }
            }
            let expect_l = hess_f.at(a, b).value() - f0 * l2 + f0 * riem_pull.at(a, b);
            res_l = res_l.max((dl - expect_l).abs());
        }
    }
    let dh_mean = fd(&|s| s.3)?;
    let res_hmean = (dh_mean - (lap_f + (l_sq + ric_nn) * f0)).abs();
    let d_dv = fd(&|s| s.4)?;
    let res_dv = (d_dv - (-f0 * h_mean0 * sqrt_det0)).abs();

    // Ricci variation (Vp17) with h' = −2 f L
    let hprime = SqMat::from_fn(m, |a, b| f_jet.clone() * ctx0.l.at(a, b).clone().scl(-2.0));
    let ric_dot_formula = ricci_variation_formula(&hc, &ctx0.hinv, &hprime)?;
    let mut res_ric: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let dr = fd(&|s| *s.5.at(a, b))?;
            res_ric = res_ric.max((dr - ric_dot_formula.at(a, b)).abs());
        }
    }

    Ok(AppendixReport {
        hdot: res_h,
        hinvdot: res_hinv,
        ldot: res_l,
        hdot_mean: res_hmean,
        dvdot: res_dv,
        ricci_dot: res_ric,
    })
}

/// The standard Ricci-variation formula evaluated on a metric perturbation
/// given as surface jets:
/// `(R_ab)' = −½[Δh'_ab − ∇_a(δh')_b − ∇_b(δh')_a + ∇_a∇_b tr h']
///  − R_a{}^c{}_b{}^d h'_cd + ½R_a^c h'_bc + ½R_b^c h'_ac`.
pub fn ricci_variation_formula(
    hc: &crate::curv::CurvJets<f64>,
    hinv_full: &SqMat<Jet<f64>>,
    hprime: &SqMat<Jet<f64>>,
) -> Result<SqMat<f64>> {
    let m = hc.n;
    let lap = tensor_laplacian_sym2(hc, hprime);
    // divergence (δh')_b = ∇^a h'_ab as a jet one order down
    let grad = cov_deriv_sym2(hc, hprime);
    let div: Vec<Jet<f64>> = (0..m)
        .map(|b| {
            let mut acc = hprime.at(0, 0).lift(0.0);
            for a in 0..m {
                for c in 0..m {
                    acc = acc + hc.ginv.at(a, c).clone() * grad[gidx(m, a, c, b)].clone();
                }
            }
            acc
        })
        .collect();
    // ∇_a (δh')_b
    let mut nabla_div = SqMat::zeros(m, &0.0);
    for a in 0..m {
        for b in 0..m {
            let mut v = div[b].d(a).value();
            for c in 0..m {
                v -= hc.gamma[gidx(m, c, a, b)].value() * div[c].value();
            }
            nabla_div.set(a, b, v);
        }
    }
    // tr h' and its covariant Hessian (needs the full-order inverse)
    let mut tr = hprime.at(0, 0).lift(0.0);
    for a in 0..m {
        for b in 0..m {
            tr = tr + hinv_full.at(a, b).clone() * hprime.at(a, b).clone();
        }
    }
    let hess_tr = surface_hessian(hc, &tr);
    let mut out = SqMat::zeros(m, &0.0);
    for a in 0..m {
        for b in 0..m {
            let mut riem_term = 0.0;
            for c in 0..m {
                for d in 0..m {
                    for e in 0..m {
                        for f in 0..m {
                            riem_term += hc.ginv.at(c, e).value()
                                * hc.ginv.at(d, f).value()
                                * hc.riem.at(a, c, b, d).value()
                                * hprime.at(e, f).value();
                        }
                    }
                }
            }
            let mut ric_terms = 0.0;
            for c in 0..m {
                for d in 0..m {
                    ric_terms += 0.5
                        * hc.ginv.at(c, d).value()
                        * (hc.ricci.at(a, c).value() * hprime.at(b, d).value()
                            + hc.ricci.at(b, c).value() * hprime.at(a, d).value());
                }
            }
            let v = -0.5
                * (lap.at(a, b) - nabla_div.at(a, b) - nabla_div.at(b, a)
                    + hess_tr.at(a, b).value())
                - riem_term
                + ric_terms;
            out.set(a, b, v);
        }
    }
    Ok(out)
}

/// Both sides of the renormalized-volume variation formula.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationReport {
    /// `dV₊⁺/dt` by Richardson central differences; absent on formal runs
    pub lhs: Option<f64>,
    /// `½ ∮ f̃ g⁽³⁾(ν̄, ν̄) dv_k̄`
    pub rhs_boundary: f64,
    /// `−⅓ f.p. ∫ f |L̊|² dv`
    pub rhs_bulk: f64,
    pub residual: Option<f64>,
    pub formal: bool,
    /// boundary term reconstructed from the Weyl asymptotics, when run on a
    /// formal model with `g⁽³⁾ ≠ 0`
    pub weyl_route_boundary: Option<f64>,
}

/// Variation of `V₊⁺` through the cap family: the derivative vanishes and
/// both right-hand terms are zero (`g⁽³⁾ = 0`, `L̊ = 0`).
pub fn variation_caps(delta: f64, spec: &LadderSpec, mode: ExecMode) -> Result<VariationReport> {
    let v_of = |t: f64| -> f64 {
        let cap = cap_family(t);
        let (_, fit) = gb::renormalized_volume_half(&cap, spec, mode).expect("volume fit");
        fit.finite_part
    };
    let lhs = central_derivative(v_of, 0.0, delta);
    // bulk finite part: the integrand f·|L̊|² vanishes identically on caps;
    // assemble its ladder anyway and take the finite part
    let metric = MetricField::hyperbolic_ball(4);
    let cap = cap_family(0.0);
    let eps: Vec<f64> = spec.epsilons();
    let mut rungs = Vec::new();
    for &e in &eps {
        let v = gb::face_y_integral(&metric, &cap, e, 6, mode, |surf, q| {
            let ctx = shape_ctx(&metric, surf, q, 2).expect("cap ctx");
            let p = &ctx.point;
            let rho2: f64 = p.iter().map(|x| x * x).sum();
            let f = -(1.0 + rho2) / (1.0 - rho2);
            f * ctx.l0_norm_sq().value()
        });
        rungs.push((e, v));
    }
    let ladder = EpsilonLadder::new(rungs)?;
    let rhs_bulk = -crate::series::finite_part(&ladder, true)? / 3.0;
    Ok(VariationReport {
        lhs: Some(lhs),
        rhs_boundary: 0.0,
        rhs_bulk,
        residual: Some(lhs - 0.0 - rhs_bulk),
        formal: false,
        weyl_route_boundary: None,
    })
}

/// Formal-model boundary term: direct `½∮ f̃ g⁽³⁾(ν̄,ν̄)` against the
/// reconstruction of `g⁽³⁾(ν̄,ν̄)` from the Weyl asymptotics
/// `W^ḡ_{0ν0ν} = −(3/2) r g⁽³⁾_νν + O(r²)`.
pub fn variation_formal_boundary(
    model: &NormalFormModel,
    f_tilde: &ScalarField,
) -> Result<VariationReport> {
    let g3 = match &model.family {
        BoundaryFamily::FlatTorusCubic { g3 } => *g3,
        _ => {
            return Err(crate::error::Error::Unsupported {
                detail: "formal boundary term needs a prescribed g3".into(),
            })
        }
    };
    // ν̄_M = ∂_w is the third boundary coordinate; dv_k̄ is the flat torus
    let direct = 0.5
        * g3[2][2]
        * torus_sigma_integral(|x| f_tilde.eval(&[0.0, x[0], x[1], 0.0]), 16);
    // Weyl route: fit W^ḡ_{0303}(r) / r → −(3/2) ĝ³_ww on an r-ladder
    let gbar = model.compactified();
    let mut samples = Vec::new();
    for k in 0..6 {
        let r = 0.1 * 0.7_f64.powi(k);
        let p = [r, 0.4, 1.1, 0.0];
        let w = crate::kernel::weyl(&gbar, &p)?;
        samples.push((r, w.at(0, 3, 0, 3) / r));
    }
    let (slope, _) = crate::series::richardson_limit(&samples, 1)?;
    let g3_ww_est = -slope * 2.0 / 3.0;
    let weyl_route = 0.5
        * g3_ww_est
        * torus_sigma_integral(|x| f_tilde.eval(&[0.0, x[0], x[1], 0.0]), 16);
    Ok(VariationReport {
        lhs: None,
        rhs_boundary: direct,
        rhs_bulk: 0.0,
        residual: None,
        formal: true,
        weyl_route_boundary: Some(weyl_route),
    })
}

/// Finite part of `∫_{Y_ε} |L|² f dv` on the collar-profile formal model
/// with `Y = {w = ¼ η̄ r²}` and `f = r^{−1} f̃`; returns the fitted
/// divergent coefficient and the closed-form prediction
/// `∮ |II̊_M|² f̃ dv_k̄`.
pub fn collar_claim_check(
    s_matrix: [[f64; 2]; 2],
    f_tilde_terms: &[(f64, TrigTerm)],
    mode: ExecMode,
) -> Result<(f64, f64, f64)> {
    let model = NormalFormModel::collar_profile(s_matrix);
    let metric = model.metric();
    let eta = s_matrix[0][0] + s_matrix[1][1];
    let surf = HypersurfaceChart::new(
        SurfaceKind::AsymptoticGraph { eta0: eta, eta_terms: vec![] },
        4,
        3,
    );
    let f_tilde = ScalarField::Trig { offset: 1.0, terms: f_tilde_terms.to_vec() };
    let spec = LadderSpec { eps0: 0.1, ratio: 0.8, rungs: 8 };
    let eps = spec.epsilons();
    let torus_n = 8;
    let rungs: Vec<(f64, f64)> = crate::exec::map_indexed(mode, eps.len(), |k| {
        let e = eps[k];
        // ∫_{r > ε}: radial log nodes times periodic torus nodes
        let rnodes = gl_interval(e.ln(), 0.4_f64.ln(), 12, 4);
        let h = 2.0 * std::f64::consts::PI / torus_n as f64;
        let mut acc = 0.0;
        for &(s, w) in &rnodes {
            let r = s.exp();
            for i in 0..torus_n {
                for j in 0..torus_n {
                    let q = [r, i as f64 * h, j as f64 * h];
                    let ctx = shape_ctx(&metric, &surf, &q, 2).expect("graph ctx");
                    let lsq = ctx.l_norm_sq().value();
                    let f = f_tilde.eval(&[r, q[1], q[2], 0.0]) / r;
                    let det = SqMat::from_fn(3, |a, b| ctx.h.at(a, b).value()).det();
                    acc += w * r * h * h * lsq * f * det.sqrt();
                }
            }
        }
        (e, acc)
    });
    let ladder = EpsilonLadder::new(rungs)?;
    let fit = fit_expansion(&ladder, FitKind::Surface { with_log: true })?;
    // |II̊_M|² for the constant profile S
    let s0 = [
        [s_matrix[0][0] - 0.5 * eta, s_matrix[0][1]],
        [s_matrix[1][0], s_matrix[1][1] - 0.5 * eta],
    ];
    let ii0_sq = s0.iter().flatten().map(|x| x * x).sum::<f64>();
    let predicted =
        ii0_sq * torus_sigma_integral(|x| f_tilde.eval(&[0.0, x[0], x[1], 0.0]), 16);
    Ok((fit.c2, predicted, fit.finite_part))
}
