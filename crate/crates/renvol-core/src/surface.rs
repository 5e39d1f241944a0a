//! Parameterized embedded hypersurfaces and lower-dimensional charts.
//!
//! Every surface is a closed-form map from an `m`-dimensional parameter chart
//! into an `n`-dimensional ambient chart, evaluable over any [`Scalar`].
//! Corner faces follow an adapted convention: a face is a 3-parameter chart
//! `(a, b, s)` whose `s = 0` slice is the corner surface, with `s > 0` going
//! into the face.

use serde::{Deserialize, Serialize};

use crate::fields::ScalarField;
use crate::jet::Scalar;
use crate::metric::TrigTerm;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SurfaceKind {
    /// Graph over the first `n−1` chart coordinates: last coordinate equals
    /// `offset + Σ a_s trig_s + quadratic-free polynomial terms`.
    TrigGraph { ambient_dim: usize, offset: f64, terms: Vec<(f64, TrigTerm)> },
    /// Polynomial graph `x^n = Σ c_α (u − u₀)^α` around a base parameter
    /// point; used for minimal-to-second-order germs.
    PolyGraph { ambient_dim: usize, base: Vec<f64>, coeffs: Vec<(Vec<usize>, f64)> },
    /// Coordinate hyperplane `x_axis = level` in an `n`-dim chart; parameters
    /// are the remaining coordinates in order.
    Slice { ambient_dim: usize, axis: usize, level: f64 },
    /// Round sphere `|x| = radius` in a Euclidean-style chart, nested
    /// colatitude parameterization.
    SphereInBall { ambient_dim: usize, radius: f64 },
    /// Totally geodesic spherical cap of the hyperbolic 4-ball through the
    /// boundary latitude sphere `x₄ = sin(lat)`; parameters `(σ, θ, φ)` with
    /// `σ` the angle from the deepest point. `lat = 0` degenerates to the
    /// equatorial slice and is handled by `Slice`.
    Cap { lat: f64 },
    /// The cap family as a graph over the equatorial ball chart
    /// `(x¹,x²,x³) ↦ (x¹,x²,x³, x₄(t, |x⃗|))`; smooth through `t = 0`.
    CapGraph { t: f64 },
    /// Cylinder face of `B²(r1) × B²(r2) ⊂ R⁴`: `(φ₁, φ₂, s)` with the first
    /// disk boundary fixed when `first = true`.
    PolydiskFace { r1: f64, r2: f64, first: bool },
    /// Corner torus of the same region: `(φ₁, φ₂)`.
    PolydiskCorner { r1: f64, r2: f64 },
    /// Geodesic sphere `{r = eps} ∩ {colatitude ≥ ...}` face chart of the
    /// hyperbolic ball in ball coordinates: `(a, b, s) ↦ ρ_ε·n(β₀ + s, a, b)`
    /// where `n` is the unit vector of colatitude `β₀+s` and S²-direction
    /// `(a, b)`.
    BallSphereFace { rho: f64, beta0: f64 },
    /// Cap face chart `(a, b, s)`: cap points at angle `σ₀ − s` from the
    /// deepest point, S²-direction `(a, b)`.
    CapFace { lat: f64, sigma0: f64 },
    /// Corner 2-sphere `{|x| = rho, x₄ = height·…}`: points of colatitude
    /// `beta0` on the `rho`-sphere, parameters `(a, b)` on S².
    BallSphereCorner { rho: f64, beta0: f64 },
    /// Ruled face through a trigonometric corner surface in R⁴:
    /// `Ξ(a,b) + s·V(a,b) + s²·W(a,b)`.
    RuledFace { corner: TrigCorner, dir: RuledDir },
    /// The trigonometric corner surface itself, parameters `(a, b)`.
    TrigCornerSurface { corner: TrigCorner },
    /// Graph of `w = ¼ r² η̄(ζ)` in normal-form chart `(r, x¹, x², w)`:
    /// parameters `(r, x¹, x²)`. `eta` is a trig profile on `(x¹, x²)`.
    AsymptoticGraph { eta0: f64, eta_terms: Vec<(f64, TrigTerm)> },
    /// `{r = eps}` face of a normal-form chart, parameters `(x¹, x², w)`.
    NormalFormSlice { eps: f64 },
    /// Shrinking/deforming round sphere in flat R³:
    /// `(θ, φ) ↦ (ρ0 − t·speed(θ,φ))·n(θ,φ)`; the appendix variation family.
    SphereFamily { rho0: f64, t: f64, speed0: f64, speed_terms: Vec<(f64, TrigTerm)> },
    /// The `s = 0` slice of an adapted corner face: `(a, b) ↦ face(a, b, 0)`.
    FaceSlice { face: Box<HypersurfaceChart> },
    /// Equatorial-disk face `(a, b, s) ↦ ((ρ−s)·n(a,b), 0)` of the ball
    /// model, with the corner sphere at `s = 0`.
    DiskFace { rho: f64 },
    /// Implicit hypersurface `{F = level}` presented as a local graph over
    /// the coordinates other than `axis`; the graph value is obtained by
    /// Newton iteration carried out in the evaluation algebra itself, so
    /// jets of the embedding are exact implicit derivatives.
    LevelSet { field: ScalarField, axis: usize, level: f64, start: f64 },
    /// Local axisymmetric graph patch in the ball model: parameters
    /// `(σ, a, b)` map to the ball point of defining-function value `σ` and
    /// colatitude `β = c₀ + c₁(σ−r₀) + c₂(σ−r₀)²`; drives the minimal-graph
    /// ODE solver.
    AxisymBallGraph { r0: f64, coef: [f64; 3] },
}

/// Shared data of a constructed corner in R⁴: a wiggly 2-surface and two
/// transversal ruled directions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrigCorner {
    /// base point of the corner patch
    pub origin: Vec<f64>,
    /// two in-surface direction vectors (columns)
    pub span: Vec<Vec<f64>>,
    /// graph perturbations of the two remaining coordinates
    pub bump: Vec<(usize, f64, TrigTerm)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuledDir {
    pub v: Vec<f64>,
    pub v_terms: Vec<(usize, f64, TrigTerm)>,
    pub w2: Vec<f64>,
}

impl TrigCorner {
    pub fn eval<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        let like = &q[0];
        let mut x: Vec<S> = (0..4).map(|i| like.lift(self.origin[i])).collect();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clone() + q[0].scl(self.span[0][i]) + q[1].scl(self.span[1][i]);
        }
        for (axis, amp, t) in &self.bump {
            let p = t.eval_profile(&q[..2]).scl(*amp);
            x[*axis] = x[*axis].clone() + p;
        }
        x
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypersurfaceChart {
    pub kind: SurfaceKind,
    pub ambient_dim: usize,
    pub param_dim: usize,
    /// Flip the canonical orientation of the unit normal.
    pub flip: bool,
}

impl HypersurfaceChart {
    pub fn new(kind: SurfaceKind, ambient_dim: usize, param_dim: usize) -> Self {
        HypersurfaceChart { kind, ambient_dim, param_dim, flip: false }
    }

    pub fn flipped(mut self) -> Self {
        self.flip = !self.flip;
        self
    }

    /// Ambient coordinates of the embedded point.
    pub fn eval<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        let like = &q[0];
        match &self.kind {
            SurfaceKind::TrigGraph { ambient_dim, offset, terms } => {
                let mut x: Vec<S> = q.to_vec();
                let mut last = like.lift(*offset);
                for (a, t) in terms {
                    last = last + t.eval_profile(q).scl(*a);
                }
                x.push(last);
                debug_assert_eq!(x.len(), *ambient_dim);
                x
            }
            SurfaceKind::PolyGraph { ambient_dim, base, coeffs } => {
                let m = base.len();
                let du: Vec<S> = (0..m).map(|i| q[i].addc(-base[i])).collect();
                let mut last = like.lift(0.0);
                for (alpha, c) in coeffs {
                    let mut term = like.lift(*c);
                    for (i, &p) in alpha.iter().enumerate() {
                        if p > 0 {
                            term = term * du[i].powi(p as i32);
                        }
                    }
                    last = last + term;
                }
                let mut x: Vec<S> = q.to_vec();
                x.push(last);
                debug_assert_eq!(x.len(), *ambient_dim);
                x
            }
            SurfaceKind::Slice { ambient_dim, axis, level } => {
                let mut x = Vec::with_capacity(*ambient_dim);
                let mut qi = q.iter();
                for i in 0..*ambient_dim {
                    if i == *axis {
                        x.push(like.lift(*level));
                    } else {
                        x.push(qi.next().expect("parameter count").clone());
                    }
                }
                x
            }
            SurfaceKind::SphereInBall { ambient_dim, radius } => {
                // nested colatitudes (β₁, …, β_{n−2}, φ):
                // x_i = R cos β_i · Π_{j<i} sin β_j, x_n = R Π sin
                let n = *ambient_dim;
                let mut x = Vec::with_capacity(n);
                let mut sines = like.lift(*radius);
                for qi in q.iter().take(n - 1) {
                    x.push(sines.clone() * qi.cos());
                    sines = sines * qi.sin();
                }
                x.push(sines);
                x
            }
            SurfaceKind::Cap { lat } => {
                let (c, r) = cap_center_radius(*lat);
                let sgn = c.signum();
                let sigma = &q[0];
                let n = unit3(&q[1], &q[2]);
                let ss = sigma.sin();
                let mut x: Vec<S> = n.iter().map(|ni| ss.clone() * ni.clone() * like.lift(r)).collect();
                x.push((-sigma.cos()).scl(sgn * r).addc(c));
                x
            }
            SurfaceKind::CapGraph { t } => {
                let s = t.sin();
                let mut z2 = like.lift(0.0);
                for v in q.iter().take(3) {
                    z2 = z2 + v.clone() * v.clone();
                }
                // sin t (1 + |x⃗|² + x₄²) = 2x₄, branch smooth through t = 0:
                // x₄ = (1 − sqrt(1 − s²(1+|x⃗|²))) / s  for s ≠ 0, else 0.
                let mut x: Vec<S> = q.to_vec();
                if s.abs() < 1e-14 {
                    x.push(like.lift(0.0));
                } else {
                    let disc = (z2.addc(1.0).scl(-s * s)).addc(1.0).sqrt();
                    x.push(((-disc).addc(1.0)).scl(1.0 / s));
                }
                x
            }
            SurfaceKind::PolydiskFace { r1, r2, first } => {
                let (p1, p2, s) = (&q[0], &q[1], &q[2]);
                let (rad1, rad2) = if *first {
                    (like.lift(*r1), s.scl(-1.0).addc(*r2))
                } else {
                    (s.scl(-1.0).addc(*r1), like.lift(*r2))
                };
                vec![
                    rad1.clone() * p1.cos(),
                    rad1 * p1.sin(),
                    rad2.clone() * p2.cos(),
                    rad2 * p2.sin(),
                ]
            }
            SurfaceKind::PolydiskCorner { r1, r2 } => {
                let (p1, p2) = (&q[0], &q[1]);
                vec![
                    p1.cos().scl(*r1),
                    p1.sin().scl(*r1),
                    p2.cos().scl(*r2),
                    p2.sin().scl(*r2),
                ]
            }
            SurfaceKind::BallSphereFace { rho, beta0 } => {
                let beta = q[2].addc(*beta0);
                let n = unit3(&q[0], &q[1]);
                let sb = beta.sin();
                let mut x: Vec<S> = n.iter().map(|ni| sb.clone() * ni.clone() * like.lift(*rho)).collect();
                x.push(beta.cos().scl(*rho));
                x
            }
            SurfaceKind::CapFace { lat, sigma0 } => {
                let (c, r) = cap_center_radius(*lat);
                let sgn = c.signum();
                let sigma = (-q[2].clone()).addc(*sigma0);
                let n = unit3(&q[0], &q[1]);
                let ss = sigma.sin();
                let mut x: Vec<S> = n.iter().map(|ni| ss.clone() * ni.clone() * like.lift(r)).collect();
                x.push((-sigma.cos()).scl(sgn * r).addc(c));
                x
            }
            SurfaceKind::BallSphereCorner { rho, beta0 } => {
                let n = unit3(&q[0], &q[1]);
                let sb = beta0.sin();
                let mut x: Vec<S> =
                    n.iter().map(|ni| ni.scl(rho * sb)).collect();
                x.push(like.lift(rho * beta0.cos()));
                x
            }
            SurfaceKind::RuledFace { corner, dir } => {
                let base = corner.eval(&q[..2]);
                let s = &q[2];
                let mut v: Vec<S> = (0..4).map(|i| like.lift(dir.v[i])).collect();
                for (axis, amp, t) in &dir.v_terms {
                    let p = t.eval_profile(&q[..2]).scl(*amp);
                    v[*axis] = v[*axis].clone() + p;
                }
                (0..4)
                    .map(|i| {
                        base[i].clone()
                            + s.clone() * v[i].clone()
                            + s.clone() * s.clone() * like.lift(0.5 * dir.w2[i])
                    })
                    .collect()
            }
            SurfaceKind::TrigCornerSurface { corner } => corner.eval(q),
            SurfaceKind::AsymptoticGraph { eta0, eta_terms } => {
                let r = &q[0];
                let mut eta = like.lift(*eta0);
                for (a, t) in eta_terms {
                    eta = eta + t.eval_profile(&q[1..3]).scl(*a);
                }
                let w = r.clone() * r.clone() * eta.scl(0.25);
                vec![q[0].clone(), q[1].clone(), q[2].clone(), w]
            }
            SurfaceKind::NormalFormSlice { eps } => {
                vec![like.lift(*eps), q[0].clone(), q[1].clone(), q[2].clone()]
            }
            SurfaceKind::SphereFamily { rho0, t, speed0, speed_terms } => {
                let mut speed = like.lift(*speed0);
                for (a, tt) in speed_terms {
                    speed = speed + tt.eval_profile(q).scl(*a);
                }
                let rad = speed.scl(-t).addc(*rho0);
                let n = unit3(&q[0], &q[1]);
                n.into_iter().map(|ni| rad.clone() * ni).collect()
            }
            SurfaceKind::FaceSlice { face } => {
                let ext = [q[0].clone(), q[1].clone(), like.lift(0.0)];
                face.eval(&ext)
            }
            SurfaceKind::DiskFace { rho } => {
                let rad = (-q[2].clone()).addc(*rho);
                let n = unit3(&q[0], &q[1]);
                let mut x: Vec<S> = n.iter().map(|ni| rad.clone() * ni.clone()).collect();
                x.push(like.lift(0.0));
                x
            }
            SurfaceKind::LevelSet { field, axis, level, start } => {
                let n = self.ambient_dim;
                let assemble = |u: &S| -> Vec<S> {
                    let mut x = Vec::with_capacity(n);
                    let mut qi = q.iter();
                    for i in 0..n {
                        if i == *axis {
                            x.push(u.clone());
                        } else {
                            x.push(qi.next().expect("parameter count").clone());
                        }
                    }
                    x
                };
                // value-level Newton from the stored seed, then the same
                // iteration in the ambient algebra (nilpotent parts converge
                // quadratically)
                let mut u = like.lift(*start);
                let mut polish = 0;
                for _ in 0..60 {
                    let coords = assemble(&u);
                    let nested = crate::jet::nested_variables(&coords, 1);
                    let fj = field.eval(&nested);
                    let mut e = vec![0usize; n];
                    e[*axis] = 1;
                    let f_val = fj.value().addc(-level);
                    let f_prime = fj.partial(&e);
                    u = u - f_val.clone() * Scalar::recip(&f_prime);
                    // after the value converges, the jet parts gain one
                    // nilpotent grade per squaring; a few extra steps finish
                    if f_val.val().abs() < 1e-13 {
                        polish += 1;
                        if polish >= 4 {
                            break;
                        }
                    }
                }
                assemble(&u)
            }
            SurfaceKind::AxisymBallGraph { r0, coef } => {
                let dr = q[0].addc(-r0);
                let beta = dr.clone() * dr.clone() * like.lift(coef[2])
                    + dr.scl(coef[1]).addc(coef[0]);
                // ρ(σ) = (2−σ)/(2+σ)
                let rho = (-q[0].clone()).addc(2.0) * Scalar::recip(&q[0].addc(2.0));
                let n = unit3(&q[1], &q[2]);
                let sb = beta.sin();
                let mut x: Vec<S> =
                    n.iter().map(|ni| rho.clone() * sb.clone() * ni.clone()).collect();
                x.push(rho * beta.cos());
                x
            }
        }
    }

    /// The corner surface of an adapted face chart.
    pub fn corner_slice(&self) -> HypersurfaceChart {
        assert_eq!(self.param_dim, 3, "adapted faces have three parameters");
        HypersurfaceChart::new(
            SurfaceKind::FaceSlice { face: Box::new(self.clone()) },
            self.ambient_dim,
            2,
        )
    }
}

/// Present `{F = F(p)}` as a graph chart near `p`, solving along the
/// coordinate with the largest gradient component; returns the chart and
/// the parameter values of `p`.
pub fn level_set_chart(
    field: &ScalarField,
    ambient_dim: usize,
    p: &[f64],
) -> (HypersurfaceChart, Vec<f64>) {
    let jets = crate::jet::variables(p, 1);
    let fj = field.eval(&jets);
    let mut axis = 0;
    let mut best = 0.0;
    for i in 0..ambient_dim {
        let mut e = vec![0usize; ambient_dim];
        e[i] = 1;
        let d = fj.partial(&e).abs();
        if d > best {
            best = d;
            axis = i;
        }
    }
    let level = fj.value();
    let params: Vec<f64> =
        p.iter().enumerate().filter(|(i, _)| *i != axis).map(|(_, v)| *v).collect();
    let chart = HypersurfaceChart::new(
        SurfaceKind::LevelSet { field: field.clone(), axis, level, start: p[axis] },
        ambient_dim,
        ambient_dim - 1,
    );
    (chart, params)
}

/// Unit vector of S² in colatitude/longitude parameters.
pub fn unit3<S: Scalar>(a: &S, b: &S) -> [S; 3] {
    let sa = a.sin();
    [sa.clone() * b.cos(), sa * b.sin(), a.cos()]
}

/// Center height and radius of the geodesic cap sphere through the boundary
/// latitude `x₄ = sin(lat)` of the unit 4-ball (orthogonal intersection).
pub fn cap_center_radius(lat: f64) -> (f64, f64) {
    let s = lat.sin();
    assert!(s.abs() > 1e-12, "equatorial cap is the slice {{x₄ = 0}}");
    let c = 1.0 / s;
    (c, (c * c - 1.0).sqrt())
}
