//! Codimension-two corner geometry: the angle `θ₀`, in-face normals, corner
//! second fundamental forms, the corner curvatures `G` and `U`, and the
//! conformally covariant corner operator `P₂`.
//!
//! A corner is described by two adapted face charts `(a, b, s)` whose
//! `s = 0` slices coincide (the corner surface Σ), with `s > 0` going into
//! each face. The ambient unit normals `μ_N, μ_S` point into the region
//! (set via the faces' flip flags) and `cos θ₀ = −⟨μ_N, μ_S⟩`.

use crate::curv::curvature_jets;
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::jet::Jet;
use crate::linalg::SqMat;
use crate::metric::MetricField;
use crate::shape::{shape_ctx, ShapeCtx};
use crate::surface::{HypersurfaceChart, SurfaceKind};

/// Default margin (radians) keeping `θ₀` away from `{0, π}`.
pub const DEFAULT_ANGLE_MARGIN: f64 = 1e-3;

/// A corner configuration: ambient metric and the two adapted faces.
#[derive(Clone, Debug)]
pub struct CornerFaces {
    pub metric: MetricField,
    pub face_n: HypersurfaceChart,
    pub face_s: HypersurfaceChart,
    pub angle_margin: f64,
}

impl CornerFaces {
    pub fn new(
        metric: MetricField,
        face_n: HypersurfaceChart,
        face_s: HypersurfaceChart,
    ) -> CornerFaces {
        CornerFaces { metric, face_n, face_s, angle_margin: DEFAULT_ANGLE_MARGIN }
    }
}

/// Pointwise corner data at a parameter point of Σ.
pub struct CornerData {
    pub theta0: f64,
    /// in-face unit normals of Σ, ambient components
    pub nu_n: Vec<f64>,
    pub nu_s: Vec<f64>,
    /// induced metric on Σ in the shared `(a, b)` parameters
    pub k: SqMat<f64>,
    pub k_inv: SqMat<f64>,
    /// second fundamental forms of Σ inside each face, w.r.t. `ν`
    pub ii_n: SqMat<f64>,
    pub ii_s: SqMat<f64>,
    pub eta_n: f64,
    pub eta_s: f64,
    /// Gaussian curvature of (Σ, k)
    pub k_gauss: f64,
}

/// Normal derivatives of the face mean curvatures at the corner point,
/// the extra input of the `U`-curvature.
pub struct CornerExtra {
    pub h_n: f64,
    pub h_s: f64,
    pub nu_h_n: f64,
    pub nu_h_s: f64,
}

struct FaceCtx {
    /// face as a hypersurface of the ambient space
    amb: ShapeCtx,
    /// Σ as a hypersurface of the face (parameter-chart metric)
    inner: ShapeCtx,
    /// in-face normal of Σ, face-chart components
    nu_param: Vec<f64>,
    /// in-face normal of Σ, ambient components
    nu_ambient: Vec<f64>,
}

fn face_ctx(metric: &MetricField, face: &HypersurfaceChart, q: &[f64], k_emb: usize) -> Result<FaceCtx> {
    let q3 = [q[0], q[1], 0.0];
    let amb = shape_ctx(metric, face, &q3, k_emb)?;
    let face_metric = MetricField::induced(metric, face);
    let slice = HypersurfaceChart::new(SurfaceKind::Slice { ambient_dim: 3, axis: 2, level: 0.0 }, 3, 2);
    let mut inner = shape_ctx(&face_metric, &slice, q, k_emb)?;
    // ν must point into the face (s > 0)
    if inner.mu_vec[2].value() < 0.0 {
        let flipped = inner.surface.clone().flipped();
        inner = shape_ctx(&face_metric, &flipped, q, k_emb)?;
    }
    let nu_param: Vec<f64> = inner.mu_vec.iter().map(|x| x.value()).collect();
    let nu_ambient: Vec<f64> = (0..face.ambient_dim)
        .map(|i| {
            let mut acc = 0.0;
            for (a, na) in nu_param.iter().enumerate() {
                acc += na * amb.tangents[a][i].value();
            }
            acc
        })
        .collect();
    Ok(FaceCtx { amb, inner, nu_param, nu_ambient })
}

fn cos_angle(metric: &MetricField, n: &ShapeCtx, s: &ShapeCtx) -> f64 {
    let g = metric.eval(&n.point);
    let mut dot = 0.0;
    for i in 0..n.n {
        for j in 0..n.n {
            dot += g.at(i, j) * n.mu_vec[i].value() * s.mu_vec[j].value();
        }
    }
    -dot
}

/// Corner data at `q = (a, b)` (spec operation).
pub fn corner_data(cfg: &CornerFaces, q: &[f64]) -> Result<CornerData> {
    let fn_ = face_ctx(&cfg.metric, &cfg.face_n, q, 3)?;
    let fs_ = face_ctx(&cfg.metric, &cfg.face_s, q, 3)?;
    for i in 0..cfg.face_n.ambient_dim {
        let (pn, ps) = (fn_.amb.point[i], fs_.amb.point[i]);
        if (pn - ps).abs() > 1e-9 * (1.0 + pn.abs()) {
            return Err(Error::Unsupported {
                detail: format!("face corner slices disagree at {q:?}: {pn} vs {ps}"),
            });
        }
    }
    let ct = cos_angle(&cfg.metric, &fn_.amb, &fs_.amb);
    let theta0 = ct.clamp(-1.0, 1.0).acos();
    if theta0 < cfg.angle_margin || theta0 > std::f64::consts::PI - cfg.angle_margin {
        return Err(Error::TangentialFaces { cos_theta: ct });
    }
    // intrinsic geometry of Σ
    let sigma = cfg.face_n.corner_slice();
    let sctx = shape_ctx(&cfg.metric, &sigma, q, 3)?;
    let k = SqMat::from_fn(2, |a, b| sctx.h.at(a, b).value());
    let k_inv = k.inverse()?;
    let kc = curvature_jets(&sctx.h)?;
    let k_gauss = 0.5 * kc.scalar.value();

    let data = |f: &FaceCtx| -> (SqMat<f64>, f64) {
        let ii = SqMat::from_fn(2, |a, b| f.inner.l.at(a, b).value());
        (ii, f.inner.h_mean.value())
    };
    let (ii_n, eta_n) = data(&fn_);
    let (ii_s, eta_s) = data(&fs_);
    Ok(CornerData {
        theta0,
        nu_n: fn_.nu_ambient.clone(),
        nu_s: fs_.nu_ambient.clone(),
        k,
        k_inv,
        ii_n,
        ii_s,
        eta_n,
        eta_s,
        k_gauss,
    })
}

/// ν-derivatives of the face mean curvatures (inputs to `U`).
pub fn corner_extra(cfg: &CornerFaces, q: &[f64]) -> Result<CornerExtra> {
    let fn_ = face_ctx(&cfg.metric, &cfg.face_n, q, 3)?;
    let fs_ = face_ctx(&cfg.metric, &cfg.face_s, q, 3)?;
    let d = |f: &FaceCtx| f.amb.directional(&f.amb.h_mean, &f.nu_param);
    Ok(CornerExtra {
        h_n: fn_.amb.h_mean.value(),
        h_s: fs_.amb.h_mean.value(),
        nu_h_n: d(&fn_),
        nu_h_s: d(&fs_),
    })
}

fn trace_free_ii(cd: &CornerData, ii: &SqMat<f64>, eta: f64) -> SqMat<f64> {
    SqMat::from_fn(2, |a, b| ii.at(a, b) - 0.5 * eta * cd.k.at(a, b))
}

fn pair(cd: &CornerData, s: &SqMat<f64>, t: &SqMat<f64>) -> f64 {
    let mut acc = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    acc += cd.k_inv.at(a, c) * cd.k_inv.at(b, d) * s.at(a, b) * t.at(c, d);
                }
            }
        }
    }
    acc
}

/// `G = ½cot θ₀ (|II̊_N|² + |II̊_S|²) − csc θ₀ ⟨II̊_N, II̊_S⟩`.
pub fn g_curvature(cd: &CornerData) -> f64 {
    let iin = trace_free_ii(cd, &cd.ii_n, cd.eta_n);
    let iis = trace_free_ii(cd, &cd.ii_s, cd.eta_s);
    let (st, ct) = cd.theta0.sin_cos();
    0.5 * (ct / st) * (pair(cd, &iin, &iin) + pair(cd, &iis, &iis)) - pair(cd, &iin, &iis) / st
}

/// `U = (π−θ₀)K − ¼cot θ₀ (η_N² + η_S²) + ½csc θ₀ η_N η_S − ⅓(ν_N H_N + ν_S H_S)`.
pub fn u_curvature(cd: &CornerData, extra: &CornerExtra) -> f64 {
    let (st, ct) = cd.theta0.sin_cos();
    (std::f64::consts::PI - cd.theta0) * cd.k_gauss
        - 0.25 * (ct / st) * (cd.eta_n * cd.eta_n + cd.eta_s * cd.eta_s)
        + 0.5 * cd.eta_n * cd.eta_s / st
        - (extra.nu_h_n + extra.nu_h_s) / 3.0
}

/// The conformally covariant corner operator `P₂` applied to an ambient
/// scalar field at a corner point.
pub fn p2_apply(cfg: &CornerFaces, f: &ScalarField, q: &[f64]) -> Result<f64> {
    let cd = corner_data(cfg, q)?;
    let fn_ = face_ctx(&cfg.metric, &cfg.face_n, q, 3)?;
    let fs_ = face_ctx(&cfg.metric, &cfg.face_s, q, 3)?;
    let extra = corner_extra(cfg, q)?;

    // Δ_k of f restricted to Σ
    let sigma = cfg.face_n.corner_slice();
    let sctx = shape_ctx(&cfg.metric, &sigma, q, 3)?;
    let kc = curvature_jets(&sctx.h)?;
    let f_sigma = sctx.field_on_surface(f);
    let lap_k = kc.laplacian(&f_sigma).value();

    // ν(μ(f)) per face: μ(f) is a face function, differentiated along ν
    let nd = |fc: &FaceCtx| -> (f64, f64) {
        let mu_f: Jet<f64> = fc.amb.normal_derivative(f);
        let nu_mu_f = fc.amb.directional(&mu_f, &fc.nu_param);
        let f_face = fc.amb.field_on_surface(f);
        let nu_f = fc.amb.directional(&f_face, &fc.nu_param);
        (nu_mu_f, nu_f)
    };
    let (nu_mu_f_n, nu_f_n) = nd(&fn_);
    let (nu_mu_f_s, nu_f_s) = nd(&fs_);

    let (st, ct) = cd.theta0.sin_cos();
    Ok((cd.theta0 - std::f64::consts::PI) * lap_k
        + nu_mu_f_n
        + nu_mu_f_s
        + (ct / st) * (cd.eta_n * nu_f_n + cd.eta_s * nu_f_s)
        - (cd.eta_s * nu_f_n + cd.eta_n * nu_f_s) / st
        + (extra.h_n * nu_f_n + extra.h_s * nu_f_s) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Corner of `B²(r1)×B²(r2)` in flat R⁴: θ₀ = π/2, η_N = 1/r2,
    /// η_S = 1/r1, K = 0, G = 1/(2 r1 r2), U = 1/(2 r1 r2).
    fn polydisk(r1: f64, r2: f64) -> CornerFaces {
        let flat = MetricField::euclidean(4);
        let face_n =
            HypersurfaceChart::new(SurfaceKind::PolydiskFace { r1, r2, first: true }, 4, 3);
        let face_s =
            HypersurfaceChart::new(SurfaceKind::PolydiskFace { r1, r2, first: false }, 4, 3);
        // ambient inward normals point toward the axis of each bounding circle
        let q3 = [0.4, 1.0, 0.0];
        let face_n = crate::shape::orient_toward(&flat, &face_n, &q3, &[0.0; 4]).unwrap();
        let face_s = crate::shape::orient_toward(&flat, &face_s, &q3, &[0.0; 4]).unwrap();
        CornerFaces::new(flat, face_n, face_s)
    }

    #[test]
    fn polydisk_corner_values() {
        let (r1, r2) = (1.3, 0.7);
        let cfg = polydisk(r1, r2);
        let q = [0.4, 1.0];
        let cd = corner_data(&cfg, &q).unwrap();
        assert!((cd.theta0 - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((cd.eta_n - 1.0 / r2).abs() < 1e-10, "eta_n = {}", cd.eta_n);
        assert!((cd.eta_s - 1.0 / r1).abs() < 1e-10);
        assert!(cd.k_gauss.abs() < 1e-10);
        let g = g_curvature(&cd);
        assert!((g - 0.5 / (r1 * r2)).abs() < 1e-10, "G = {g}");
        let ex = corner_extra(&cfg, &q).unwrap();
        assert!(ex.nu_h_n.abs() < 1e-10 && ex.nu_h_s.abs() < 1e-10);
        let u = u_curvature(&cd, &ex);
        assert!((u - 0.5 / (r1 * r2)).abs() < 1e-10, "U = {u}");
        // ∮(U+G) over the corner torus closes Gauss-Bonnet for B²×B²:
        // (U+G)·area(T²) = (1/(r1 r2))·(2πr1)(2πr2) = 4π²·χ
        let total = (u + g) * (2.0 * std::f64::consts::PI * r1) * (2.0 * std::f64::consts::PI * r2);
        assert!((total - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-8);
    }

    #[test]
    fn p2_constant_vanishes_and_swap_symmetry() {
        let cfg = polydisk(1.1, 0.9);
        let q = [2.0, 0.3];
        let v = p2_apply(&cfg, &ScalarField::Constant(3.0), &q).unwrap();
        assert!(v.abs() < 1e-12);
        let swapped = CornerFaces::new(cfg.metric.clone(), cfg.face_s.clone(), cfg.face_n.clone());
        let cd = corner_data(&cfg, &q).unwrap();
        let cd2 = corner_data(&swapped, &q).unwrap();
        assert!((g_curvature(&cd) - g_curvature(&cd2)).abs() < 1e-11);
        let (e1, e2) = (corner_extra(&cfg, &q).unwrap(), corner_extra(&swapped, &q).unwrap());
        assert!((u_curvature(&cd, &e1) - u_curvature(&cd2, &e2)).abs() < 1e-11);
    }

    #[test]
    fn orthogonal_flat_planes_p2_closed_form() {
        // region {x₃>0, x₄>0}: faces are coordinate half-hyperplanes, and
        // P₂f = −(π/2)Δ_k f + 2 ∂₃∂₄ f by direct computation
        let flat = MetricField::euclidean(4);
        let face_n = HypersurfaceChart::new(
            SurfaceKind::RuledFace {
                corner: crate::surface::TrigCorner {
                    origin: vec![0.0; 4],
                    span: vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]],
                    bump: vec![],
                },
                dir: crate::surface::RuledDir {
                    v: vec![0.0, 0.0, 1.0, 0.0],
                    v_terms: vec![],
                    w2: vec![0.0; 4],
                },
            },
            4,
            3,
        );
        let face_s = HypersurfaceChart::new(
            SurfaceKind::RuledFace {
                corner: crate::surface::TrigCorner {
                    origin: vec![0.0; 4],
                    span: vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]],
                    bump: vec![],
                },
                dir: crate::surface::RuledDir {
                    v: vec![0.0, 0.0, 0.0, 1.0],
                    v_terms: vec![],
                    w2: vec![0.0; 4],
                },
            },
            4,
            3,
        );
        let q3 = [0.2, -0.1, 0.0];
        let inside = [0.2, -0.1, 1.0, 1.0];
        let face_n = crate::shape::orient_toward(&flat, &face_n, &q3, &inside).unwrap();
        let face_s = crate::shape::orient_toward(&flat, &face_s, &q3, &inside).unwrap();
        let cfg = CornerFaces::new(flat, face_n, face_s);
        // f = sin(x₁ + 2x₃ − x₄) + x₃x₄
        let f = ScalarField::Sum(
            Box::new(ScalarField::Trig {
                offset: 0.0,
                terms: vec![(
                    1.0,
                    crate::metric::TrigTerm {
                        sym: vec![],
                        wave: vec![1.0, 0.0, 2.0, -1.0],
                        phase: 0.0,
                        use_sin: true,
                    },
                )],
            }),
            Box::new(ScalarField::Product(
                Box::new(ScalarField::Coordinate(2)),
                Box::new(ScalarField::Coordinate(3)),
            )),
        );
        let q = [0.2, -0.1];
        let p2 = p2_apply(&cfg, &f, &q).unwrap();
        // closed form at (0.2, −0.1, 0, 0): Δ_k f = −sin(x₁),
        // ∂₃∂₄f = −(−2)·... = 2·(−sin·(2)(−1)) wait: ∂₃∂₄ sin(u) = 2·(−1)·(−sin u) = 2 sin u? plus 1 from x₃x₄
        let u = 0.2;
        let expect = -(std::f64::consts::FRAC_PI_2) * (-(f64::sin(u))) + 2.0 * (2.0 * f64::sin(u) + 1.0);
        assert!((p2 - expect).abs() < 1e-10, "P2 = {p2}, expect {expect}");
    }
}
