//! Curvature assembly from jets of metric components.
//!
//! Everything here is chart-agnostic: the input is the matrix of metric
//! components as order-`k` Taylor jets in the chart variables (ambient chart
//! or the parameter chart of an embedded surface), and outputs are jets of
//! correspondingly lower order.
//!
//! Index conventions (pinned by the constant-curvature oracles in the test
//! suite):
//!   Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
//!   R^ρ_σμν = ∂_μ Γ^ρ_νσ − ∂_ν Γ^ρ_μσ + Γ^ρ_μλ Γ^λ_νσ − Γ^ρ_νλ Γ^λ_μσ
//!   R_ρσμν  = g_ρλ R^λ_σμν          (round sphere: R_ijkl = +(g_ik g_jl − g_il g_jk))
//!   Ric_σν  = R^μ_σμν               (contraction on the 1st and 3rd slots)
//!   Δf      = g^{ij} (∂_i∂_j f − Γ^k_ij ∂_k f)

use crate::error::Result;
use crate::jet::{Jet, Scalar};
use crate::linalg::SqMat;

/// Rank-4 component store, row-major in all four indices.
#[derive(Clone, Debug)]
pub struct Rank4<S: Scalar> {
    pub n: usize,
    pub a: Vec<S>,
}

impl<S: Scalar> Rank4<S> {
    pub fn zeros(n: usize, like: &S) -> Self {
        Rank4 { n, a: vec![like.lift(0.0); n * n * n * n] }
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        &self.a[((i * self.n + j) * self.n + k) * self.n + l]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: S) {
        self.a[((i * self.n + j) * self.n + k) * self.n + l] = v;
    }
}

#[inline]
pub fn gidx(n: usize, k: usize, i: usize, j: usize) -> usize {
    (k * n + i) * n + j
}

/// Christoffel symbols `Γ^k_ij` (indexed by [`gidx`]) as jets one order below
/// the metric jets.
pub fn christoffel_jets<C: Scalar>(g: &SqMat<Jet<C>>) -> Result<Vec<Jet<C>>> {
    let n = g.n;
    let k_in = g.a[0].order();
    assert!(k_in >= 1, "christoffel needs metric jets of order >= 1");
    let ginv = g.inverse()?;
    let mut dg = Vec::with_capacity(n * n * n); // dg[gidx(l,i,j)] = ∂_l g_ij
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg.push(g.at(i, j).d(l));
            }
        }
    }
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = dg[0].lift(0.0);
                for l in 0..n {
                    let term = dg[gidx(n, i, j, l)].clone() + dg[gidx(n, j, i, l)].clone()
                        - dg[gidx(n, l, i, j)].clone();
                    acc = acc + ginv.at(k, l).clone() * term;
                }
                gamma.push(acc.scl(0.5));
            }
        }
    }
    Ok(gamma)
}

pub struct CurvJets<C: Scalar> {
    pub n: usize,
    /// metric truncated to the order of the Riemann tensor
    pub g: SqMat<Jet<C>>,
    pub ginv: SqMat<Jet<C>>,
    /// `Γ^k_ij` at one order below the metric input
    pub gamma: Vec<Jet<C>>,
    /// lowered Riemann `R_ijkl`
    pub riem: Rank4<Jet<C>>,
    pub ricci: SqMat<Jet<C>>,
    pub scalar: Jet<C>,
}

/// Full curvature stack from metric jets of order `k ≥ 2`.
pub fn curvature_jets<C: Scalar>(g: &SqMat<Jet<C>>) -> Result<CurvJets<C>> {
    let n = g.n;
    let k_in = g.a[0].order();
    assert!(k_in >= 2, "curvature needs metric jets of order >= 2");
    let kr = k_in - 2;
    let gamma = christoffel_jets(g)?;
    let gamma_t: Vec<Jet<C>> = gamma.iter().map(|x| x.truncated(kr)).collect();
    // R^ρ_σμν, antisymmetric in (μ, ν)
    let like = g.a[0].truncated(kr);
    let mut riem_up = Rank4::zeros(n, &like);
    for rho in 0..n {
        for sig in 0..n {
            for mu in 0..n {
                for nu in 0..mu {
                    let mut acc =
                        gamma[gidx(n, rho, nu, sig)].d(mu) - gamma[gidx(n, rho, mu, sig)].d(nu);
                    for lam in 0..n {
                        acc = acc
                            + gamma_t[gidx(n, rho, mu, lam)].clone()
                                * gamma_t[gidx(n, lam, nu, sig)].clone()
                            - gamma_t[gidx(n, rho, nu, lam)].clone()
                                * gamma_t[gidx(n, lam, mu, sig)].clone();
                    }
                    let acc = acc.truncated(kr);
                    riem_up.set(rho, sig, mu, nu, acc.clone());
                    riem_up.set(rho, sig, nu, mu, -acc);
                }
            }
        }
    }
    let gk = SqMat::from_fn(n, |i, j| g.at(i, j).truncated(kr));
    let ginv_k = gk.inverse()?;
    let mut riem = Rank4::zeros(n, &like);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..k {
                    let mut acc = like.lift(0.0);
                    for lam in 0..n {
                        acc = acc + gk.at(i, lam).clone() * riem_up.at(lam, j, k, l).clone();
                    }
                    riem.set(i, j, k, l, acc.clone());
                    riem.set(i, j, l, k, -acc);
                }
            }
        }
    }
    let mut ricci = SqMat::zeros(n, &like);
    for sig in 0..n {
        for nu in 0..n {
            let mut acc = like.lift(0.0);
            for mu in 0..n {
                acc = acc + riem_up.at(mu, sig, mu, nu).clone();
            }
            ricci.set(sig, nu, acc);
        }
    }
    let mut scalar = like.lift(0.0);
    for i in 0..n {
        for j in 0..n {
            scalar = scalar + ginv_k.at(i, j).clone() * ricci.at(i, j).clone();
        }
    }
    Ok(CurvJets { n, g: gk, ginv: ginv_k, gamma, riem, ricci, scalar })
}

impl<C: Scalar> CurvJets<C> {
    /// Weyl tensor (lowered). Structurally zero in dimension 3.
    pub fn weyl(&self) -> Rank4<Jet<C>> {
        let n = self.n;
        let like = &self.g.a[0];
        let mut w = Rank4::zeros(n, like);
        if n == 3 {
            return w;
        }
        assert!(n == 4, "Weyl implemented for n in {{3, 4}}");
        let nn = n as f64;
        // Weyl-decomposition Schouten: S_ij = (R_ij − R g_ij / (2(n−1))) / (n−2)
        let s = SqMat::from_fn(n, |i, j| {
            (self.ricci.at(i, j).clone()
                - self.scalar.clone() * self.g.at(i, j).clone().scl(1.0 / (2.0 * (nn - 1.0))))
            .scl(1.0 / (nn - 2.0))
        });
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let kulkarni = self.g.at(i, k).clone() * s.at(j, l).clone()
                            - self.g.at(i, l).clone() * s.at(j, k).clone()
                            + self.g.at(j, l).clone() * s.at(i, k).clone()
                            - self.g.at(j, k).clone() * s.at(i, l).clone();
                        w.set(i, j, k, l, self.riem.at(i, j, k, l).clone() - kulkarni);
                    }
                }
            }
        }
        w
    }

    /// All four indices raised with this metric.
    pub fn raise_rank4(&self, t: &Rank4<Jet<C>>) -> Rank4<Jet<C>> {
        let n = self.n;
        let like = &self.g.a[0];
        let mut cur = t.clone();
        for slot in 0..4 {
            let mut next = Rank4::zeros(n, like);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut acc = like.lift(0.0);
                            for a in 0..n {
                                let src = match slot {
                                    0 => cur.at(a, j, k, l),
                                    1 => cur.at(i, a, k, l),
                                    2 => cur.at(i, j, a, l),
                                    _ => cur.at(i, j, k, a),
                                };
                                let gi = match slot {
                                    0 => self.ginv.at(i, a),
                                    1 => self.ginv.at(j, a),
                                    2 => self.ginv.at(k, a),
                                    _ => self.ginv.at(l, a),
                                };
                                acc = acc + gi.clone() * src.clone();
                            }
                            next.set(i, j, k, l, acc);
                        }
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// Full contraction `T_ijkl T^ijkl` with this metric.
    pub fn rank4_norm_sq(&self, t: &Rank4<Jet<C>>) -> Jet<C> {
        let up = self.raise_rank4(t);
        let n = self.n;
        let mut acc = self.g.a[0].lift(0.0);
        for i in 0..n * n * n * n {
            acc = acc + up.a[i].clone() * t.a[i].clone();
        }
        acc
    }

    pub fn weyl_norm_sq(&self) -> Jet<C> {
        let w = self.weyl();
        self.rank4_norm_sq(&w)
    }

    /// Laplace–Beltrami of a scalar jet of order ≥ 2 in the same chart.
    pub fn laplacian(&self, f: &Jet<C>) -> Jet<C> {
        let n = self.n;
        let mut acc = self.g.a[0].lift(0.0);
        for i in 0..n {
            for j in 0..n {
                let mut hess = f.d(i).d(j);
                for k in 0..n {
                    hess = hess - self.gamma[gidx(n, k, i, j)].clone() * f.d(k);
                }
                acc = acc + self.ginv.at(i, j).clone() * hess;
            }
        }
        acc
    }

    /// Gradient with the index raised: `(∇f)^i = g^{ij} ∂_j f`.
    pub fn grad_up(&self, f: &Jet<C>) -> Vec<Jet<C>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = self.g.a[0].lift(0.0);
                for j in 0..n {
                    acc = acc + self.ginv.at(i, j).clone() * f.d(j);
                }
                acc
            })
            .collect()
    }
}

/// Raise one index of a symmetric 2-tensor.
pub fn raise<C: Scalar>(ginv: &SqMat<Jet<C>>, t: &SqMat<Jet<C>>) -> SqMat<Jet<C>> {
    let n = t.n;
    SqMat::from_fn(n, |i, j| {
        let mut acc = t.a[0].lift(0.0);
        for k in 0..n {
            acc = acc + ginv.at(i, k).clone() * t.at(k, j).clone();
        }
        acc
    })
}
