//! Extrinsic geometry of embedded hypersurfaces: second fundamental form,
//! the third-order boundary curvatures `𝓛` and `T`, the hypersurface
//! invariant `𝒞`, and the conformally covariant boundary operator `P₃`.
//!
//! All quantities are carried as Taylor jets in the surface parameters so
//! that tangential derivatives (`Δ_h H`, `∇L`, `Δ_h μ(f)`, …) come out of
//! the same pipeline. Sign conventions: the unit normal `μ` is selected by
//! chart orientation and an explicit flip, and
//! `L(A, B) = −⟨∇_A μ, B⟩ = ⟨μ, ∇_A B⟩` so that a round sphere in flat
//! space has `H = +2/ρ` with respect to the inward normal.

use crate::curv::{curvature_jets, gidx, raise, CurvJets};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::jet::{nested_variables, variables, Jet, Scalar};
use crate::linalg::{permutations_with_sign, SqMat};
use crate::metric::MetricField;
use crate::surface::HypersurfaceChart;

/// Pointwise extrinsic data of a hypersurface (values at one parameter
/// point).
pub struct ShapeData {
    pub induced_metric: SqMat<f64>,
    /// ambient components of the unit normal (vector)
    pub normal: Vec<f64>,
    pub l: SqMat<f64>,
    pub l0: SqMat<f64>,
    pub h_mean: f64,
}

/// Jet-level shape pipeline around one parameter point.
pub struct ShapeCtx {
    pub m: usize,
    pub n: usize,
    pub k_emb: usize,
    /// embedding components, order `k_emb`
    pub emb: Vec<Jet<f64>>,
    /// ambient point values
    pub point: Vec<f64>,
    /// tangent components `∂_a E^i`, order `k_emb − 1`
    pub tangents: Vec<Vec<Jet<f64>>>,
    /// induced metric, order `k_emb − 1`
    pub h: SqMat<Jet<f64>>,
    pub hinv: SqMat<Jet<f64>>,
    /// unit normal covector `μ_i` and vector `μ^i`, order `k_emb − 1`
    pub mu_cov: Vec<Jet<f64>>,
    pub mu_vec: Vec<Jet<f64>>,
    /// second fundamental form (lowered), order `k_emb − 2`
    pub l: SqMat<Jet<f64>>,
    pub l0: SqMat<Jet<f64>>,
    pub h_mean: Jet<f64>,
    /// ambient metric composed along the surface, order `k_emb`
    pub g_at: SqMat<Jet<f64>>,
    pub ginv_at: SqMat<Jet<f64>>,
    /// ambient Christoffel symbols composed along the surface
    pub gamma_at: Vec<Jet<f64>>,
    pub metric: MetricField,
    pub surface: HypersurfaceChart,
    pub q: Vec<f64>,
}

/// Choose the normal orientation so that it points toward `target`
/// (measured with the ambient metric at the surface point).
pub fn orient_toward(
    metric: &MetricField,
    surf: &HypersurfaceChart,
    q: &[f64],
    target: &[f64],
) -> Result<HypersurfaceChart> {
    let ctx = shape_ctx(metric, surf, q, 2)?;
    let g = metric.eval(&ctx.point);
    let mut pairing = 0.0;
    for i in 0..ctx.n {
        for j in 0..ctx.n {
            pairing += g.at(i, j) * ctx.mu_vec[i].value() * (target[j] - ctx.point[j]);
        }
    }
    let mut out = surf.clone();
    if pairing < 0.0 {
        out.flip = !out.flip;
    }
    Ok(out)
}

/// Build the jet-level shape context with embedding jets of order `k_emb`.
pub fn shape_ctx(
    metric: &MetricField,
    surf: &HypersurfaceChart,
    q: &[f64],
    k_emb: usize,
) -> Result<ShapeCtx> {
    assert!(k_emb >= 2);
    let m = surf.param_dim;
    let n = surf.ambient_dim;
    if metric.dim != n {
        return Err(Error::UnsupportedDimension { required: format!("{n}"), actual: metric.dim });
    }
    let qs = variables(q, k_emb);
    let emb: Vec<Jet<f64>> = surf.eval(&qs);
    let point: Vec<f64> = emb.iter().map(|e| e.value()).collect();
    if !metric.contains(&point) {
        return Err(Error::OutOfDomain { detail: format!("embedded point {point:?}") });
    }
    let tangents: Vec<Vec<Jet<f64>>> = (0..m)
        .map(|a| emb.iter().map(|e| e.d(a)).collect())
        .collect();

    let g_at = metric.eval(&emb);
    let ginv_at = g_at.inverse()?;

    // induced metric
    let h = SqMat::from_fn(m, |a, b| {
        let mut acc = tangents[0][0].lift(0.0);
        for i in 0..n {
            for j in 0..n {
                acc = acc + g_at.at(i, j).clone() * tangents[a][i].clone() * tangents[b][j].clone();
            }
        }
        acc
    });
    let hinv = h.inverse().map_err(|_| Error::DegenerateImmersion {
        detail: format!("induced metric singular at {q:?}"),
    })?;

    // normal covector by the Levi-Civita complement of the tangents
    let like = tangents[0][0].clone();
    let mut n_cov: Vec<Jet<f64>> = vec![like.lift(0.0); n];
    for (perm, sign) in permutations_with_sign(n) {
        let i = perm[0];
        let mut prod = like.lift(sign);
        for a in 0..m {
            prod = prod * tangents[a][perm[a + 1]].clone();
        }
        n_cov[i] = n_cov[i].clone() + prod;
    }
    let mut norm2 = like.lift(0.0);
    for i in 0..n {
        for j in 0..n {
            norm2 = norm2 + ginv_at.at(i, j).clone() * n_cov[i].clone() * n_cov[j].clone();
        }
    }
    let tangent_scale: f64 = tangents
        .iter()
        .flat_map(|t| t.iter().map(|x| x.value().abs()))
        .fold(0.0, f64::max)
        .max(1e-30);
    if norm2.value() <= 1e-20 * tangent_scale.powi(2 * m as i32) {
        return Err(Error::DegenerateImmersion {
            detail: format!("normal has zero length at {q:?}"),
        });
    }
    let inv_norm = Scalar::recip(&norm2.sqrt());
    let orient = if surf.flip { -1.0 } else { 1.0 };
    let mu_cov: Vec<Jet<f64>> =
        n_cov.iter().map(|c| (c.clone() * inv_norm.clone()).scl(orient)).collect();
    let mu_vec: Vec<Jet<f64>> = (0..n)
        .map(|i| {
            let mut acc = like.lift(0.0);
            for j in 0..n {
                acc = acc + ginv_at.at(i, j).clone() * mu_cov[j].clone();
            }
            acc
        })
        .collect();

    // ambient Christoffel symbols along the surface: needs ∂_k g_ij ∘ E,
    // obtained by seeding ambient offsets on top of the embedding jets
    let nested = nested_variables(&emb, 1);
    let g_nested = metric.eval(&nested);
    let mut dg_at: Vec<Jet<f64>> = Vec::with_capacity(n * n * n);
    for l in 0..n {
        let mut e = vec![0usize; n];
        e[l] = 1;
        for i in 0..n {
            for j in 0..n {
                dg_at.push(g_nested.at(i, j).partial(&e));
            }
        }
    }
    let mut gamma_at = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = like.lift(0.0);
                for l in 0..n {
                    let term = dg_at[gidx(n, i, j, l)].clone() + dg_at[gidx(n, j, i, l)].clone()
                        - dg_at[gidx(n, l, i, j)].clone();
                    acc = acc + ginv_at.at(k, l).clone() * term;
                }
                gamma_at.push(acc.scl(0.5));
            }
        }
    }

    // second fundamental form L_ab = μ_i (∂_a ∂_b E^i + Γ^i_jk ∂_a E^j ∂_b E^k)
    let l_mat = SqMat::from_fn(m, |a, b| {
        let mut acc = like.lift(0.0);
        for i in 0..n {
            let mut cov = emb[i].d(a).d(b);
            for jj in 0..n {
                for kk in 0..n {
                    cov = cov
                        + gamma_at[gidx(n, i, jj, kk)].clone()
                            * tangents[a][jj].clone()
                            * tangents[b][kk].clone();
                }
            }
            acc = acc + mu_cov[i].clone() * cov;
        }
        acc
    });
    let mut h_mean = like.lift(0.0);
    for a in 0..m {
        for b in 0..m {
            h_mean = h_mean + hinv.at(a, b).clone() * l_mat.at(a, b).clone();
        }
    }
    let l0 = SqMat::from_fn(m, |a, b| {
        l_mat.at(a, b).clone() - h_mean.clone() * h.at(a, b).clone().scl(1.0 / m as f64)
    });

    Ok(ShapeCtx {
        m,
        n,
        k_emb,
        emb,
        point,
        tangents,
        h,
        hinv,
        mu_cov,
        mu_vec,
        l: l_mat,
        l0,
        h_mean,
        g_at,
        ginv_at,
        gamma_at,
        metric: metric.clone(),
        surface: surf.clone(),
        q: q.to_vec(),
    })
}

impl ShapeCtx {
    pub fn data(&self) -> ShapeData {
        ShapeData {
            induced_metric: SqMat::from_fn(self.m, |a, b| self.h.at(a, b).value()),
            normal: self.mu_vec.iter().map(|x| x.value()).collect(),
            l: SqMat::from_fn(self.m, |a, b| self.l.at(a, b).value()),
            l0: SqMat::from_fn(self.m, |a, b| self.l0.at(a, b).value()),
            h_mean: self.h_mean.value(),
        }
    }

    /// Curvature stack of the induced metric (needs `k_emb ≥ 3`).
    pub fn induced_curvature(&self) -> Result<CurvJets<f64>> {
        curvature_jets(&self.h)
    }

    /// `|L̊|²` as a jet.
    pub fn l0_norm_sq(&self) -> Jet<f64> {
        let l0_up = raise(&self.hinv, &transpose(&raise(&self.hinv, &self.l0)));
        let mut acc = self.h_mean.lift(0.0);
        for a in 0..self.m {
            for b in 0..self.m {
                acc = acc + l0_up.at(a, b).clone() * self.l0.at(a, b).clone();
            }
        }
        acc
    }

    /// `|L|²` as a jet.
    pub fn l_norm_sq(&self) -> Jet<f64> {
        let l_up = raise(&self.hinv, &transpose(&raise(&self.hinv, &self.l)));
        let mut acc = self.h_mean.lift(0.0);
        for a in 0..self.m {
            for b in 0..self.m {
                acc = acc + l_up.at(a, b).clone() * self.l.at(a, b).clone();
            }
        }
        acc
    }

    /// `tr L̊³` as a jet.
    pub fn l0_cubed_trace(&self) -> Jet<f64> {
        let mixed = raise(&self.hinv, &self.l0); // L̊^a_b
        let mut acc = self.h_mean.lift(0.0);
        for a in 0..self.m {
            for b in 0..self.m {
                for c in 0..self.m {
                    acc = acc
                        + mixed.at(a, b).clone() * mixed.at(b, c).clone() * mixed.at(c, a).clone();
                }
            }
        }
        acc
    }

    /// Pullback of the ambient Ricci tensor, `Ric^g(∂_a E, ∂_b E)`, values.
    pub fn ambient_ricci_pullback(&self) -> Result<SqMat<f64>> {
        let g = self.metric.eval_jets(&self.point, 2)?;
        let c = curvature_jets(&g)?;
        Ok(SqMat::from_fn(self.m, |a, b| {
            let mut acc = 0.0;
            for i in 0..self.n {
                for j in 0..self.n {
                    acc += c.ricci.at(i, j).value()
                        * self.tangents[a][i].value()
                        * self.tangents[b][j].value();
                }
            }
            acc
        }))
    }

    /// `L̊^{ab} S_ab` for a symmetric values-matrix `S` in parameter indices.
    pub fn l0_contract(&self, s: &SqMat<f64>) -> f64 {
        let l0_up = raise(&self.hinv, &transpose(&raise(&self.hinv, &self.l0)));
        let mut acc = 0.0;
        for a in 0..self.m {
            for b in 0..self.m {
                acc += l0_up.at(a, b).value() * s.at(a, b);
            }
        }
        acc
    }

    /// Scalar field composed along the surface, order `k_emb`.
    pub fn field_on_surface(&self, f: &ScalarField) -> Jet<f64> {
        f.eval(&self.emb)
    }

    /// The ambient gradient components `(∂_i f)(E(q))` as surface jets.
    pub fn ambient_grad_on_surface(&self, f: &ScalarField) -> Vec<Jet<f64>> {
        let nested = nested_variables(&self.emb, 1);
        let fj = f.eval(&nested);
        (0..self.n)
            .map(|i| {
                let mut e = vec![0usize; self.n];
                e[i] = 1;
                fj.partial(&e)
            })
            .collect()
    }

    /// `μ(f)` as a surface jet.
    pub fn normal_derivative(&self, f: &ScalarField) -> Jet<f64> {
        let grad = self.ambient_grad_on_surface(f);
        let mut acc = self.h_mean.lift(0.0);
        for i in 0..self.n {
            acc = acc + self.mu_vec[i].clone() * grad[i].clone();
        }
        acc
    }

    /// Directional derivative of a surface-jet function along a parameter
    /// vector (components in the parameter chart).
    pub fn directional(&self, f: &Jet<f64>, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (a, &va) in v.iter().enumerate() {
            acc += f.d(a).value() * va;
        }
        acc
    }
}

fn transpose<S: Scalar>(t: &SqMat<S>) -> SqMat<S> {
    SqMat::from_fn(t.n, |i, j| t.at(j, i).clone())
}

/// Pointwise shape data (spec operation).
pub fn shape_data(metric: &MetricField, surf: &HypersurfaceChart, q: &[f64]) -> Result<ShapeData> {
    Ok(shape_ctx(metric, surf, q, 2)?.data())
}

/// The weight −3 hypersurface conformal invariant `𝒞 = ½𝓛 + ⅙tr L̊³`,
/// equivalently `½L̊^{ab}R^g_ab − L̊^{ab}R^h_ab + ⅓H|L̊|² − ⅓tr L̊³`.
///
/// On an Einstein ambient the tangential trace-free Ricci contraction
/// vanishes and this agrees with the variant carrying a full `L̊^{ab}R^g_ab`
/// term; only this combination is conformally invariant in general.
pub fn c_invariant(metric: &MetricField, surf: &HypersurfaceChart, q: &[f64]) -> Result<f64> {
    if surf.ambient_dim != 4 {
        return Err(Error::UnsupportedDimension { required: "4".into(), actual: surf.ambient_dim });
    }
    let ctx = shape_ctx(metric, surf, q, 3)?;
    let ric_g = ctx.ambient_ricci_pullback()?;
    let hc = ctx.induced_curvature()?;
    let ric_h = SqMat::from_fn(ctx.m, |a, b| hc.ricci.at(a, b).value());
    let h = ctx.h_mean.value();
    let l0sq = ctx.l0_norm_sq().value();
    let tr3 = ctx.l0_cubed_trace().value();
    Ok(0.5 * ctx.l0_contract(&ric_g) - ctx.l0_contract(&ric_h) + h * l0sq / 3.0 - tr3 / 3.0)
}

/// `𝓛 = L̊^{ab}R^g_ab − 2L̊^{ab}R^h_ab + ⅔H|L̊|² − tr L̊³`.
pub fn chang_qing_l(metric: &MetricField, surf: &HypersurfaceChart, q: &[f64]) -> Result<f64> {
    if surf.ambient_dim != 4 {
        return Err(Error::UnsupportedDimension { required: "4".into(), actual: surf.ambient_dim });
    }
    let ctx = shape_ctx(metric, surf, q, 3)?;
    let ric_g = ctx.ambient_ricci_pullback()?;
    let hc = ctx.induced_curvature()?;
    let ric_h = SqMat::from_fn(ctx.m, |a, b| hc.ricci.at(a, b).value());
    let h = ctx.h_mean.value();
    let l0sq = ctx.l0_norm_sq().value();
    let tr3 = ctx.l0_cubed_trace().value();
    Ok(ctx.l0_contract(&ric_g) - 2.0 * ctx.l0_contract(&ric_h) + 2.0 * h * l0sq / 3.0 - tr3)
}

/// The eight-term `T`-curvature of a boundary hypersurface.
pub fn t_curvature(metric: &MetricField, surf: &HypersurfaceChart, q: &[f64]) -> Result<f64> {
    if surf.ambient_dim != 4 {
        return Err(Error::UnsupportedDimension { required: "4".into(), actual: surf.ambient_dim });
    }
    let ctx = shape_ctx(metric, surf, q, 4)?;
    let ric_g = ctx.ambient_ricci_pullback()?;
    let hc = ctx.induced_curvature()?;
    let ric_h = SqMat::from_fn(ctx.m, |a, b| hc.ricci.at(a, b).value());
    let r_h = hc.scalar.value();
    let h = ctx.h_mean.value();
    let l0sq = ctx.l0_norm_sq().value();
    let tr3 = ctx.l0_cubed_trace().value();
    // μ(R_g): first derivative of the ambient scalar curvature
    let g3 = ctx.metric.eval_jets(&ctx.point, 3)?;
    let c3 = curvature_jets(&g3)?;
    let mut mu_r = 0.0;
    for i in 0..4 {
        mu_r += ctx.mu_vec[i].value() * c3.scalar.d(i).value();
    }
    let lap_h = hc.laplacian(&ctx.h_mean).value();
    Ok(-mu_r / 12.0 - ctx.l0_contract(&ric_g) + ctx.l0_contract(&ric_h) - 0.5 * h * l0sq
        + 2.0 * tr3 / 3.0
        + r_h * h / 6.0
        - h * h * h / 27.0
        - lap_h / 3.0)
}

/// The conformally covariant boundary operator `P₃` applied to an ambient
/// scalar field, evaluated at a surface point.
pub fn p3_apply(
    metric: &MetricField,
    surf: &HypersurfaceChart,
    f: &ScalarField,
    q: &[f64],
) -> Result<f64> {
    if surf.ambient_dim != 4 {
        return Err(Error::UnsupportedDimension { required: "4".into(), actual: surf.ambient_dim });
    }
    let ctx = shape_ctx(metric, surf, q, 4)?;
    let hc = ctx.induced_curvature()?;
    let r_h = hc.scalar.value();
    let h = ctx.h_mean.value();
    let l0sq = ctx.l0_norm_sq().value();

    // ½ μ(Δ_g f): ambient jets at the surface point
    let g3 = ctx.metric.eval_jets(&ctx.point, 3)?;
    let c3 = curvature_jets(&g3)?;
    let fj_amb: Jet<f64> = {
        let xs = variables(&ctx.point, 3);
        f.eval(&xs)
    };
    let lap_f = c3.laplacian(&fj_amb);
    let mut mu_lap = 0.0;
    for i in 0..4 {
        mu_lap += ctx.mu_vec[i].value() * lap_f.d(i).value();
    }
    let r_g = c3.scalar.value();

    // Δ_h μ(f)
    let mu_f = ctx.normal_derivative(f);
    let lap_mu_f = hc.laplacian(&mu_f).value();

    // Δ_h (f restricted)
    let f_surf = ctx.field_on_surface(f);
    let lap_f_surf = hc.laplacian(&f_surf).value();

    // L̊^{ab} ∇_a ∇_b f (surface Hessian)
    let hess = surface_hessian(&hc, &f_surf);
    let l0_hess = ctx.l0_contract(&SqMat::from_fn(ctx.m, |a, b| hess.at(a, b).value()));

    // ⅓ H^a f_a (gradients paired with h^{-1})
    let mut grad_pair = 0.0;
    for a in 0..ctx.m {
        for b in 0..ctx.m {
            grad_pair += ctx.hinv.at(a, b).value() * ctx.h_mean.d(a).value() * f_surf.d(b).value();
        }
    }

    let mu_f_val = mu_f.value();
    // Tangential-term signs are fixed by exactness of the transformation law
    // e^{3ω} T̃ = T + P₃ω for the T-curvature above, which is the internal
    // consistency oracle for this operator pair.
    Ok(0.5 * mu_lap + lap_mu_f - h * lap_f_surf / 3.0 + l0_hess + grad_pair / 3.0
        + (r_g / 6.0 - 0.5 * r_h - 0.5 * l0sq + h * h / 3.0) * mu_f_val)
}

/// Covariant Hessian `∇_a ∇_b f` of a surface-jet scalar.
pub fn surface_hessian(hc: &CurvJets<f64>, f: &Jet<f64>) -> SqMat<Jet<f64>> {
    let m = hc.n;
    SqMat::from_fn(m, |a, b| {
        let mut acc = f.d(a).d(b);
        for c in 0..m {
            acc = acc - hc.gamma[gidx(m, c, a, b)].clone() * f.d(c);
        }
        acc
    })
}

/// Covariant derivative `∇_c t_ab` of a symmetric surface 2-tensor given as
/// jets; returns components indexed `[gidx(m, c, a, b)]`, one order lower.
pub fn cov_deriv_sym2(hc: &CurvJets<f64>, t: &SqMat<Jet<f64>>) -> Vec<Jet<f64>> {
    let m = hc.n;
    let mut out = Vec::with_capacity(m * m * m);
    for c in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut acc = t.at(a, b).d(c);
                for e in 0..m {
                    acc = acc
                        - hc.gamma[gidx(m, e, c, a)].clone() * t.at(e, b).clone()
                        - hc.gamma[gidx(m, e, c, b)].clone() * t.at(a, e).clone();
                }
                out.push(acc);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceKind;

    #[test]
    fn sphere_inward_shape() {
        let flat = MetricField::euclidean(3);
        let rho = 1.7;
        let surf = HypersurfaceChart::new(
            SurfaceKind::SphereInBall { ambient_dim: 3, radius: rho },
            3,
            2,
        );
        let q = [0.8, 1.3];
        let surf = orient_toward(&flat, &surf, &q, &[0.0, 0.0, 0.0]).unwrap();
        let sd = shape_data(&flat, &surf, &q).unwrap();
        assert!((sd.h_mean - 2.0 / rho).abs() < 1e-10);
        for a in 0..2 {
            for b in 0..2 {
                assert!((sd.l.at(a, b) - sd.induced_metric.at(a, b) / rho).abs() < 1e-10);
                assert!(sd.l0.at(a, b).abs() < 1e-10);
            }
        }
        // normal orthogonal to tangents and unit
        let ctx = shape_ctx(&flat, &surf, &q, 2).unwrap();
        let g = flat.eval(&ctx.point);
        let mut nn = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                nn += g.at(i, j) * ctx.mu_vec[i].value() * ctx.mu_vec[j].value();
            }
        }
        assert!((nn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equatorial_slice_is_totally_geodesic() {
        let hyp = MetricField::hyperbolic_ball(4);
        let surf =
            HypersurfaceChart::new(SurfaceKind::Slice { ambient_dim: 4, axis: 3, level: 0.0 }, 4, 3);
        let sd = shape_data(&hyp, &surf, &[0.2, -0.3, 0.4]).unwrap();
        assert!(sd.h_mean.abs() < 1e-12);
        for a in 0..3 {
            for b in 0..3 {
                assert!(sd.l.at(a, b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cylinder_face_l_and_t() {
        // face {|z₁| = r1} of B²(r1)×B²(r2) in flat R⁴, inward normal:
        // 𝓛 = 2/(9 r1³), T = −2/(9 r1³)
        let flat = MetricField::euclidean(4);
        let (r1, r2) = (1.3, 0.9);
        let surf = HypersurfaceChart::new(
            SurfaceKind::PolydiskFace { r1, r2, first: true },
            4,
            3,
        );
        let q = [0.7, 2.1, 0.3];
        let surf = orient_toward(&flat, &surf, &q, &[0.0, 0.0, 0.0, 0.0]).unwrap();
        let sd = shape_data(&flat, &surf, &q).unwrap();
        assert!((sd.h_mean - 1.0 / r1).abs() < 1e-10, "H = {}", sd.h_mean);
        let lv = chang_qing_l(&flat, &surf, &q).unwrap();
        let tv = t_curvature(&flat, &surf, &q).unwrap();
        assert!((lv - 2.0 / (9.0 * r1.powi(3))).abs() < 1e-10, "L = {lv}");
        assert!((tv + 2.0 / (9.0 * r1.powi(3))).abs() < 1e-10, "T = {tv}");
    }

    #[test]
    fn t_transformation_law() {
        // e^{3ω} T̃ = T + P₃ω for a bumpy metric, surface, and ω
        use crate::metric::{MetricKind, TrigTerm};
        let terms = vec![
            TrigTerm {
                sym: vec![0.3, -0.2, 0.5, 0.1, 0.4, -0.6, 0.2, 0.1, -0.3, 0.25],
                wave: vec![1.0, -1.0, 2.0, 0.5],
                phase: 0.3,
                use_sin: true,
            },
            TrigTerm {
                sym: vec![-0.1, 0.4, 0.2, -0.5, 0.3, 0.1, -0.2, 0.6, 0.15, -0.35],
                wave: vec![-0.5, 1.5, 1.0, -1.0],
                phase: 1.1,
                use_sin: false,
            },
        ];
        let g = MetricField::new(MetricKind::Perturbed { dim: 4, terms, amplitude: 0.08 });
        let omega = ScalarField::Trig {
            offset: 0.1,
            terms: vec![(
                0.3,
                TrigTerm {
                    sym: vec![],
                    wave: vec![0.7, -1.2, 0.4, 0.9],
                    phase: 0.5,
                    use_sin: true,
                },
            )],
        };
        let surf = HypersurfaceChart::new(
            SurfaceKind::TrigGraph {
                ambient_dim: 4,
                offset: 0.2,
                terms: vec![(
                    0.15,
                    TrigTerm {
                        sym: vec![],
                        wave: vec![1.0, 0.8, -1.3, 0.0],
                        phase: 0.2,
                        use_sin: true,
                    },
                )],
            },
            4,
            3,
        );
        let q = [0.3, -0.4, 0.6];
        let g_tilde = g.conformal_rescale(omega.clone());
        let t = t_curvature(&g, &surf, &q).unwrap();
        let t_tilde = t_curvature(&g_tilde, &surf, &q).unwrap();
        let p3 = p3_apply(&g, &surf, &omega, &q).unwrap();
        let ctx = shape_ctx(&g, &surf, &q, 2).unwrap();
        let w = omega.eval(&ctx.point);
        let resid = (3.0 * w).exp() * t_tilde - t - p3;
        let scale = 1.0 + t.abs() + p3.abs();
        assert!(resid.abs() / scale < 1e-10, "residual {resid:.3e}, T={t}, P3={p3}");
    }

    #[test]
    fn l_and_c_conformal_weights() {
        use crate::metric::{MetricKind, TrigTerm};
        let terms = vec![TrigTerm {
            sym: vec![0.3, -0.2, 0.5, 0.1, 0.4, -0.6, 0.2, 0.1, -0.3, 0.25],
            wave: vec![1.0, -1.0, 2.0, 0.5],
            phase: 0.3,
            use_sin: true,
        }];
        let g = MetricField::new(MetricKind::Perturbed { dim: 4, terms, amplitude: 0.1 });
        let omega = ScalarField::Trig {
            offset: -0.2,
            terms: vec![(
                0.4,
                TrigTerm { sym: vec![], wave: vec![0.5, 1.0, -0.7, 0.3], phase: 1.0, use_sin: false },
            )],
        };
        let surf = HypersurfaceChart::new(
            SurfaceKind::TrigGraph {
                ambient_dim: 4,
                offset: -0.1,
                terms: vec![(
                    0.2,
                    TrigTerm { sym: vec![], wave: vec![0.9, -0.6, 1.1, 0.0], phase: 0.7, use_sin: true },
                )],
            },
            4,
            3,
        );
        let q = [-0.2, 0.5, 0.1];
        let g_tilde = g.conformal_rescale(omega.clone());
        let ctx = shape_ctx(&g, &surf, &q, 2).unwrap();
        let w = omega.eval(&ctx.point);
        let e3 = (3.0 * w).exp();
        let lv = chang_qing_l(&g, &surf, &q).unwrap();
        let lt = chang_qing_l(&g_tilde, &surf, &q).unwrap();
        assert!((e3 * lt - lv).abs() / (1.0 + lv.abs()) < 1e-10, "L: {lv} vs {}", e3 * lt);
        let cv = c_invariant(&g, &surf, &q).unwrap();
        let ct = c_invariant(&g_tilde, &surf, &q).unwrap();
        assert!((e3 * ct - cv).abs() / (1.0 + cv.abs()) < 1e-10, "C: {cv} vs {}", e3 * ct);
    }

    #[test]
    fn level_set_sphere_matches_parametric() {
        // |x|² = ρ² as a level set: shape data agrees with the parametric
        // sphere and the normal is the normalized gradient
        let flat = MetricField::euclidean(3);
        let rho = 1.25;
        let f = ScalarField::Sum(
            Box::new(ScalarField::Product(
                Box::new(ScalarField::Coordinate(0)),
                Box::new(ScalarField::Coordinate(0)),
            )),
            Box::new(ScalarField::Sum(
                Box::new(ScalarField::Product(
                    Box::new(ScalarField::Coordinate(1)),
                    Box::new(ScalarField::Coordinate(1)),
                )),
                Box::new(ScalarField::Product(
                    Box::new(ScalarField::Coordinate(2)),
                    Box::new(ScalarField::Coordinate(2)),
                )),
            )),
        );
        let p = [rho * 0.48, rho * 0.36, rho * (1.0 - 0.48_f64.powi(2) - 0.36_f64.powi(2)).sqrt()];
        let (chart, params) = crate::surface::level_set_chart(&f, 3, &p);
        let chart = orient_toward(&flat, &chart, &params, &[0.0; 3]).unwrap();
        let sd = shape_data(&flat, &chart, &params).unwrap();
        assert!((sd.h_mean - 2.0 / rho).abs() < 1e-9, "H = {}", sd.h_mean);
        // normal is ∓∇F/|∇F| = −p/ρ for the inward choice
        for i in 0..3 {
            assert!((sd.normal[i] + p[i] / rho).abs() < 1e-10);
        }
        // t_curvature path works through the implicit chart as well
        let hyp = MetricField::hyperbolic_ball(4);
        let f4 = ScalarField::Coordinate(3);
        let p4 = [0.2, -0.1, 0.3, 0.0];
        let (chart4, params4) = crate::surface::level_set_chart(&f4, 4, &p4);
        let sd4 = shape_data(&hyp, &chart4, &params4).unwrap();
        assert!(sd4.h_mean.abs() < 1e-10);
    }

    #[test]
    fn p3_of_constant_vanishes() {
        let hyp = MetricField::hyperbolic_ball(4);
        let surf =
            HypersurfaceChart::new(SurfaceKind::Slice { ambient_dim: 4, axis: 3, level: 0.0 }, 4, 3);
        let v = p3_apply(&hyp, &surf, &ScalarField::Constant(2.5), &[0.1, 0.2, -0.3]).unwrap();
        assert!(v.abs() < 1e-12);
    }
}

/// Rough tensor Laplacian `Δ t_ab = h^{cd} ∇_c ∇_d t_ab`, values.
pub fn tensor_laplacian_sym2(hc: &CurvJets<f64>, t: &SqMat<Jet<f64>>) -> SqMat<f64> {
    let m = hc.n;
    let grad = cov_deriv_sym2(hc, t); // order k−1 jets
    // second covariant derivative: ∇_d (∇_c t_ab)
    let mut out = SqMat::zeros(m, &0.0);
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            for c in 0..m {
                for d in 0..m {
                    let mut v = grad[gidx(m, c, a, b)].d(d).value();
                    for e in 0..m {
                        v -= hc.gamma[gidx(m, e, d, c)].value() * grad[gidx(m, e, a, b)].value();
                        v -= hc.gamma[gidx(m, e, d, a)].value() * grad[gidx(m, c, e, b)].value();
                        v -= hc.gamma[gidx(m, e, d, b)].value() * grad[gidx(m, c, a, e)].value();
                    }
                    acc += hc.ginv.at(c, d).value() * v;
                }
            }
            out.set(a, b, acc);
        }
    }
    out
}
