//! Dense matrix helpers over any [`Scalar`], for dimensions up to four.
//!
//! Curvature formulas need metric inverses and determinants whose entries are
//! jets; nalgebra stays on the plain-`f64` side (eigenvalues, least squares).

use crate::error::{Error, Result};
use crate::jet::Scalar;

/// Row-major square matrix with entries in a scalar algebra.
#[derive(Clone, Debug)]
pub struct SqMat<S: Scalar> {
    pub n: usize,
    pub a: Vec<S>,
}

impl<S: Scalar> SqMat<S> {
    pub fn zeros(n: usize, like: &S) -> Self {
        SqMat { n, a: vec![like.lift(0.0); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(f(i, j));
            }
        }
        SqMat { n, a }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.a[i * self.n + j] = v;
    }

    pub fn values(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.at(i, j).val())
    }

    /// Gauss-Jordan inverse with value-level partial pivoting. Fails when the
    /// pivot magnitude drops below `1e-12` of scale.
    pub fn inverse(&self) -> Result<SqMat<S>> {
        let n = self.n;
        let like = &self.a[0];
        let mut m: Vec<S> = self.a.clone();
        let mut inv: Vec<S> = vec![like.lift(0.0); n * n];
        for i in 0..n {
            inv[i * n + i] = like.lift(1.0);
        }
        let scale: f64 = self.a.iter().map(|x| x.val().abs()).fold(0.0, f64::max).max(1.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = m[col * n + col].val().abs();
            for r in (col + 1)..n {
                let v = m[r * n + col].val().abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-12 * scale {
                return Err(Error::SingularMetric {
                    detail: format!("pivot {best:.3e} below threshold"),
                });
            }
            if piv != col {
                for j in 0..n {
                    m.swap(col * n + j, piv * n + j);
                    inv.swap(col * n + j, piv * n + j);
                }
            }
            let d = Scalar::recip(&m[col * n + col]);
            for j in 0..n {
                m[col * n + j] = m[col * n + j].clone() * d.clone();
                inv[col * n + j] = inv[col * n + j].clone() * d.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m[r * n + col].clone();
                for j in 0..n {
                    m[r * n + j] = m[r * n + j].clone() - f.clone() * m[col * n + j].clone();
                    inv[r * n + j] = inv[r * n + j].clone() - f.clone() * inv[col * n + j].clone();
                }
            }
        }
        Ok(SqMat { n, a: inv })
    }

    /// Determinant by LU with value-level pivoting.
    pub fn det(&self) -> S {
        let n = self.n;
        let mut m: Vec<S> = self.a.clone();
        let like = &self.a[0];
        let mut det = like.lift(1.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = m[col * n + col].val().abs();
            for r in (col + 1)..n {
                let v = m[r * n + col].val().abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return like.lift(0.0);
            }
            if piv != col {
                for j in 0..n {
                    m.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            det = det * m[col * n + col].clone();
            let d = Scalar::recip(&m[col * n + col]);
            for r in (col + 1)..n {
                let f = m[r * n + col].clone() * d.clone();
                for j in col..n {
                    m[r * n + j] = m[r * n + j].clone() - f.clone() * m[col * n + j].clone();
                }
            }
        }
        det
    }
}

/// Symmetric eigenvalue range of the value part; used for SPD validation.
pub fn value_eigen_bounds<S: Scalar>(m: &SqMat<S>) -> (f64, f64) {
    let vm = m.values();
    let sym = (vm.clone() + vm.transpose()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &e in eig.eigenvalues.iter() {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    (lo, hi)
}

/// Totally antisymmetric symbol in `n` dimensions, as (permutation, sign).
pub fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn build(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            build(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut perms = Vec::new();
    build(&mut Vec::new(), &mut (0..n).collect(), &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
            (p, sign)
        })
        .collect()
}
