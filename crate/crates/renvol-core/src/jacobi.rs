//! Solver for the Jacobi equation `Δ_h̃ f = (3 − |L|²) f` on the equatorial
//! totally geodesic H³ of the ball model, with prescribed boundary data
//! `f̃` on Σ = S² in the sense `r·f → f̃`.
//!
//! The surface is totally geodesic (`|L|² = 0`), so after separating real
//! spherical harmonics the problem reduces to radial ODEs in the hyperbolic
//! distance ρ (with `r = 2e^{−ρ}` exactly on the equatorial slice):
//! `f'' + 2 coth ρ f' − (3 + l(l+1)/sinh²ρ) f = 0`.
//! The regular solution is integrated outward from the center (the stable
//! direction) and normalized by its `r^{−1}` coefficient at large ρ.

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::metric::MetricField;
use crate::models::CapConfig;
use crate::quad::gauss_legendre;
use crate::shape::shape_data;

/// Real spherical harmonic `Y_{l m}` (orthonormal on the unit sphere),
/// `m ∈ [−l, l]` with sine conventions for negative `m`.
pub fn real_sph(l: usize, m: i32, theta: f64, phi: f64) -> f64 {
    let am = m.unsigned_abs() as usize;
    let p = assoc_legendre(l, am, theta.cos());
    let norm = {
        let mut f = 1.0;
        for k in (l - am + 1)..=(l + am) {
            f *= k as f64;
        }
        ((2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI) / f).sqrt()
    };
    if m == 0 {
        norm * p
    } else if m > 0 {
        std::f64::consts::SQRT_2 * norm * p * (m as f64 * phi).cos()
    } else {
        std::f64::consts::SQRT_2 * norm * p * (am as f64 * phi).sin()
    }
}

fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    // P_m^m, then upward recurrence in l
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        pll = (x * (2.0 * llf - 1.0) * pmmp1 - (llf + m as f64 - 1.0) * pmm) / (llf - m as f64);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

struct RadialMode {
    /// sampled (ρ, value, derivative) of the regular solution
    grid: Vec<(f64, f64, f64)>,
    /// `lim r · R_l` used for normalization
    r_coeff: f64,
}

/// Solution of the Jacobi problem as a harmonic-mode expansion.
pub struct JacobiSolution {
    /// `(l, m, amplitude)` with amplitude already normalized so that the
    /// mode contributes `amp · R_l(ρ)/r_coeff_l · Y_lm`
    modes: Vec<(usize, i32, f64)>,
    radial: Vec<RadialMode>,
    pub rho_max: f64,
}

fn lambda(l: usize, rho: f64) -> f64 {
    3.0 + (l * (l + 1)) as f64 / rho.sinh().powi(2)
}

fn integrate_mode_l(l: usize, rho0: f64, h: f64, rho_max: f64) -> RadialMode {
    // regular seed: l = 0: f = 1 + ρ²/2; l ≥ 1: f = ρ^l
    let (mut f, mut fp) = if l == 0 {
        (1.0 + 0.5 * rho0 * rho0, rho0)
    } else {
        (rho0.powi(l as i32), (l as f64) * rho0.powi(l as i32 - 1))
    };
    let mut rho = rho0;
    let mut grid = vec![(rho, f, fp)];
    let rhs = |rho: f64, f: f64, fp: f64| -> (f64, f64) {
        (fp, lambda(l, rho) * f - 2.0 / rho.tanh() * fp)
    };
    // renormalize along the way to avoid overflow; only ratios matter
    let mut scale_log = 0.0;
    while rho < rho_max - 1e-12 {
        let hh = h.min(rho_max - rho);
        let (k1, l1) = rhs(rho, f, fp);
        let (k2, l2) = rhs(rho + 0.5 * hh, f + 0.5 * hh * k1, fp + 0.5 * hh * l1);
        let (k3, l3) = rhs(rho + 0.5 * hh, f + 0.5 * hh * k2, fp + 0.5 * hh * l2);
        let (k4, l4) = rhs(rho + hh, f + hh * k3, fp + hh * l3);
        f += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        fp += hh / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        rho += hh;
        if f.abs() > 1e100 {
            f *= 1e-100;
            fp *= 1e-100;
            scale_log += 100.0 * std::f64::consts::LN_10;
            for g in grid.iter_mut() {
                g.1 *= 1e-100;
                g.2 *= 1e-100;
            }
        }
        grid.push((rho, f, fp));
    }
    let _ = scale_log;
    // r·R at ρ and ρ−1, Richardson in e^{−2ρ}
    let r_of = |rho: f64| 2.0 * (-rho).exp();
    let n = grid.len();
    let (rho1, f1, _) = grid[n - 1];
    let back = grid
        .iter()
        .rev()
        .find(|g| g.0 <= rho1 - 1.0)
        .copied()
        .unwrap_or(grid[0]);
    let a1 = r_of(rho1) * f1;
    let a0 = r_of(back.0) * back.1;
    let w = (-2.0 * rho1).exp() / (-2.0 * back.0).exp();
    let r_coeff = (a1 - w * a0) / (1.0 - w);
    RadialMode { grid, r_coeff }
}

impl RadialMode {
    /// Cubic Hermite evaluation of `(f, f')` at ρ.
    fn eval(&self, rho: f64) -> (f64, f64) {
        let grid = &self.grid;
        let n = grid.len();
        let rho = rho.clamp(grid[0].0, grid[n - 1].0);
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if grid[mid].0 <= rho {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (x0, f0, d0) = grid[lo];
        let (x1, f1, d1) = grid[hi];
        let h = x1 - x0;
        let t = ((rho - x0) / h).clamp(0.0, 1.0);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let f = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
        let dh00 = 6.0 * t * (t - 1.0) / h;
        let dh10 = 1.0 - 4.0 * t + 3.0 * t * t;
        let dh01 = -6.0 * t * (t - 1.0) / h;
        let dh11 = 3.0 * t * t - 2.0 * t;
        let fp = dh00 * f0 + dh10 * d0 + dh01 * f1 + dh11 * d1;
        (f, fp)
    }
}

pub struct JacobiOptions {
    pub l_max: usize,
    pub rho0: f64,
    pub step: f64,
    pub rho_max: f64,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions { l_max: 6, rho0: 1e-4, step: 2e-3, rho_max: 9.0 }
    }
}

/// Solve the Jacobi problem on a totally geodesic cap with boundary data
/// given as a field on the `(θ, φ)` chart of Σ.
///
/// Supported on the equatorial cap (`t = 0`), where the ambient geodesic
/// defining function restricts to `r = 2e^{−ρ}` exactly.
pub fn jacobi_solve(
    metric: &MetricField,
    cap: &CapConfig,
    f_tilde: &ScalarField,
    opts: &JacobiOptions,
) -> Result<JacobiSolution> {
    if cap.t.abs() > 1e-14 {
        return Err(Error::Unsupported {
            detail: "Jacobi solver is implemented on the equatorial cap".into(),
        });
    }
    // uniqueness hypothesis |L̊|² ≤ 3, sampled
    for q in [[0.05, 0.0, 0.02], [0.3, -0.2, 0.1], [-0.4, 0.3, 0.35]] {
        let sd = shape_data(metric, &cap.surface, &q)?;
        let mut l0sq = 0.0;
        let hinv = sd.induced_metric.inverse()?;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        l0sq += hinv.at(a, c) * hinv.at(b, d) * sd.l0.at(a, b) * sd.l0.at(c, d);
                    }
                }
            }
        }
        if l0sq > 3.0 {
            return Err(Error::HypothesisViolated { value: l0sq });
        }
    }
    // project boundary data onto real harmonics by product quadrature
    let n_theta = 2 * opts.l_max + 6;
    let n_phi = 2 * opts.l_max + 8;
    let gl = gauss_legendre(n_theta);
    let mut modes = Vec::new();
    let mut radial = Vec::new();
    for l in 0..=opts.l_max {
        let mut any = false;
        for m in -(l as i32)..=(l as i32) {
            let mut amp = 0.0;
            for (x, w) in gl.0.iter().zip(gl.1.iter()) {
                let theta = 0.5 * std::f64::consts::PI * (x + 1.0);
                let wt = w * 0.5 * std::f64::consts::PI;
                for k in 0..n_phi {
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
                    let wp = 2.0 * std::f64::consts::PI / n_phi as f64;
                    let v = f_tilde.eval(&[theta, phi]);
                    amp += wt * wp * theta.sin() * v * real_sph(l, m, theta, phi);
                }
            }
            if amp.abs() > 1e-12 {
                modes.push((l, m, amp));
                any = true;
            }
        }
        if any {
            radial.push(integrate_mode_l(l, opts.rho0, opts.step, opts.rho_max));
        } else {
            radial.push(RadialMode { grid: vec![(opts.rho0, 0.0, 0.0)], r_coeff: 1.0 });
        }
    }
    Ok(JacobiSolution { modes, radial, rho_max: opts.rho_max })
}

impl JacobiSolution {
    /// `f(ρ, θ, φ)` on the cap.
    pub fn eval(&self, rho: f64, theta: f64, phi: f64) -> f64 {
        let mut acc = 0.0;
        for &(l, m, amp) in &self.modes {
            let rm = &self.radial[l];
            let (f, _) = rm.eval(rho);
            acc += amp * f / rm.r_coeff * real_sph(l, m, theta, phi);
        }
        acc
    }

    /// Maximum interior ODE residual measured by fourth-order finite
    /// differences on the stored grid values (independent of the RK
    /// right-hand side), relative to the local solution scale.
    pub fn pde_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for &(l, _, amp) in &self.modes {
            if amp == 0.0 {
                continue;
            }
            let rm = &self.radial[l];
            let g = &rm.grid;
            let n = g.len();
            let h = g[1].0 - g[0].0;
            let mut k = n / 10;
            while k + 2 < n * 9 / 10 {
                let (rho, f0, _) = g[k];
                let fm2 = g[k - 2].1;
                let fm1 = g[k - 1].1;
                let fp1 = g[k + 1].1;
                let fp2 = g[k + 2].1;
                let d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
                let d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
                let res = d2 + 2.0 / rho.tanh() * d1 - lambda(l, rho) * f0;
                let scale = f0.abs() + d2.abs() + 1.0;
                worst = worst.max(res.abs() / scale);
                k += n / 10;
            }
        }
        worst
    }

    /// `r·f − f̃` sampled at the boundary sphere over a ladder of `r`.
    pub fn boundary_recovery(&self, f_tilde: &ScalarField, eps: &[f64]) -> Vec<f64> {
        let probes = [(0.7, 1.1), (1.9, 4.0), (2.4, 2.7)];
        eps.iter()
            .map(|&r| {
                let rho = (2.0 / r).ln();
                let mut worst: f64 = 0.0;
                for &(theta, phi) in &probes {
                    let f = self.eval(rho, theta, phi);
                    let target = f_tilde.eval(&[theta, phi]);
                    worst = worst.max((r * f - target).abs());
                }
                worst
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::cap_family;

    #[test]
    fn constant_data_matches_cosh() {
        let g = MetricField::hyperbolic_ball(4);
        let cap = cap_family(0.0);
        let c = 1.7;
        let sol =
            jacobi_solve(&g, &cap, &ScalarField::Constant(c), &JacobiOptions::default()).unwrap();
        for rho in [0.3, 1.0, 2.5, 5.0] {
            let got = sol.eval(rho, 1.0, 2.0);
            let expect = c * rho.cosh();
            assert!(
                (got - expect).abs() / expect.abs() < 1e-5,
                "rho {rho}: {got} vs {expect}"
            );
        }
        assert!(sol.pde_residual() < 1e-6, "residual {}", sol.pde_residual());
        let rec = sol.boundary_recovery(&ScalarField::Constant(c), &[0.2, 0.1, 0.02]);
        assert!(rec.last().unwrap() < &1e-3);
        assert!(rec[2] < rec[0]);
    }

    #[test]
    fn zero_data_gives_zero() {
        let g = MetricField::hyperbolic_ball(4);
        let cap = cap_family(0.0);
        let sol =
            jacobi_solve(&g, &cap, &ScalarField::Constant(0.0), &JacobiOptions::default()).unwrap();
        for rho in [0.5, 2.0, 6.0] {
            assert!(sol.eval(rho, 0.3, 0.9).abs() < 1e-10);
        }
    }

    #[test]
    fn solver_initialization_independence() {
        let g = MetricField::hyperbolic_ball(4);
        let cap = cap_family(0.0);
        let f = ScalarField::Constant(0.8);
        let a = jacobi_solve(&g, &cap, &f, &JacobiOptions::default()).unwrap();
        let b = jacobi_solve(
            &g,
            &cap,
            &f,
            &JacobiOptions { rho0: 5e-4, step: 1e-3, ..Default::default() },
        )
        .unwrap();
        for rho in [0.7, 2.2, 4.4] {
            let (va, vb) = (a.eval(rho, 1.1, 0.3), b.eval(rho, 1.1, 0.3));
            assert!((va - vb).abs() / va.abs().max(1.0) < 1e-8, "{va} vs {vb}");
        }
    }

    #[test]
    fn nonconstant_data_residuals() {
        let g = MetricField::hyperbolic_ball(4);
        let cap = cap_family(0.0);
        // f̃(θ, φ) = 1 + 0.5 cos θ − 0.3 sin θ sin φ (a mix of l = 0, 1)
        let f = ScalarField::Trig {
            offset: 1.0,
            terms: vec![
                (
                    0.5,
                    crate::metric::TrigTerm {
                        sym: vec![],
                        wave: vec![1.0, 0.0],
                        phase: std::f64::consts::FRAC_PI_2,
                        use_sin: true,
                    },
                ),
            ],
        };
        let sol = jacobi_solve(&g, &cap, &f, &JacobiOptions::default()).unwrap();
        assert!(sol.pde_residual() < 1e-6);
        let rec = sol.boundary_recovery(&f, &[0.1, 0.05, 0.025]);
        assert!(rec.last().unwrap() < &1e-3, "recovery {:?}", rec);
    }

    #[test]
    fn latitude_cap_unsupported() {
        let g = MetricField::hyperbolic_ball(4);
        let cap = cap_family(0.3);
        assert!(matches!(
            jacobi_solve(&g, &cap, &ScalarField::Constant(1.0), &JacobiOptions::default()),
            Err(Error::Unsupported { .. })
        ));
    }
}
