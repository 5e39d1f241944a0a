//! Truncated multivariate Taylor arithmetic (forward-mode algorithmic
//! differentiation to arbitrary order).
//!
//! A [`Jet`] stores the Taylor coefficients of a smooth function at a base
//! point, truncated at a fixed total order, in up to four variables. All
//! elementary operations propagate coefficients exactly, so extracted
//! partial derivatives are accurate to machine precision.
//!
//! Jets nest: the coefficient type is any [`Scalar`], so a `Jet<Jet<f64>>`
//! carries, say, derivatives in ambient directions whose coefficients are
//! themselves Taylor expansions along a surface. That is how mixed
//! surface/ambient derivatives (`Δ_h μ(f)`, `ν(H)`, …) are obtained without
//! any finite differencing.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

pub const MAX_VARS: usize = 4;
pub const MAX_ORDER: usize = 6;

/// Elementary arithmetic shared by `f64` and jets, so geometric formulas can
/// be written once and evaluated at points, at Taylor expansions, or at
/// nested expansions.
pub trait Scalar:
    Clone
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Sized
    + Send
    + Sync
    + 'static
{
    /// Underlying value at the base point.
    fn val(&self) -> f64;
    /// A constant with the same jet shape as `self`.
    fn lift(&self, c: f64) -> Self;
    fn scl(&self, c: f64) -> Self;
    fn addc(&self, c: f64) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn val(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn scl(&self, c: f64) -> Self {
        self * c
    }
    fn addc(&self, c: f64) -> Self {
        self + c
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

type MultiIndex = [u8; MAX_VARS];

/// Precomputed index bookkeeping for the algebra `R[x_1..x_n] / (deg > k)`.
pub struct JetTable {
    pub nvars: usize,
    pub order: usize,
    /// Multi-indices in graded lexicographic order; slot 0 is the constant.
    pub midx: Vec<MultiIndex>,
    slot_of: HashMap<MultiIndex, usize>,
    /// `prod[k]` lists the pairs `(i, j)` with `midx[i] + midx[j] = midx[k]`.
    prod: Vec<Vec<(u32, u32)>>,
}

impl JetTable {
    fn build(nvars: usize, order: usize) -> JetTable {
        assert!(nvars >= 1 && nvars <= MAX_VARS, "jet variables out of range");
        assert!(order <= MAX_ORDER, "jet order out of range");
        let mut midx: Vec<MultiIndex> = Vec::new();
        // enumerate by total degree
        fn rec(nvars: usize, pos: usize, left: usize, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
            if pos == nvars {
                if left == 0 {
                    out.push(*cur);
                }
                return;
            }
            for v in (0..=left).rev() {
                cur[pos] = v as u8;
                rec(nvars, pos + 1, left - v, cur, out);
            }
            cur[pos] = 0;
        }
        for deg in 0..=order {
            let mut cur = [0u8; MAX_VARS];
            rec(nvars, 0, deg, &mut cur, &mut midx);
        }
        let slot_of: HashMap<MultiIndex, usize> =
            midx.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let deg = |m: &MultiIndex| -> usize { m.iter().map(|&x| x as usize).sum() };
        let mut prod = vec![Vec::new(); midx.len()];
        for (i, a) in midx.iter().enumerate() {
            for (j, b) in midx.iter().enumerate() {
                if deg(a) + deg(b) > order {
                    continue;
                }
                let mut s = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    s[v] = a[v] + b[v];
                }
                let k = slot_of[&s];
                prod[k].push((i as u32, j as u32));
            }
        }
        JetTable { nvars, order, midx, slot_of, prod }
    }

    pub fn len(&self) -> usize {
        self.midx.len()
    }

    pub fn slot(&self, m: &MultiIndex) -> Option<usize> {
        self.slot_of.get(m).copied()
    }
}

#[allow(clippy::declare_interior_mutable_const)]
const TABLE_SLOT: OnceLock<Arc<JetTable>> = OnceLock::new();
#[allow(clippy::declare_interior_mutable_const)]
const TABLE_ROW: [OnceLock<Arc<JetTable>>; MAX_ORDER + 1] = [TABLE_SLOT; MAX_ORDER + 1];
static TABLES: [[OnceLock<Arc<JetTable>>; MAX_ORDER + 1]; MAX_VARS + 1] =
    [TABLE_ROW; MAX_VARS + 1];

pub fn table(nvars: usize, order: usize) -> Arc<JetTable> {
    TABLES[nvars][order]
        .get_or_init(|| Arc::new(JetTable::build(nvars, order)))
        .clone()
}

/// Truncated Taylor expansion with coefficients of type `C`.
#[derive(Clone)]
pub struct Jet<C: Scalar = f64> {
    pub table: Arc<JetTable>,
    /// Taylor coefficients `c_α = ∂^α f / α!` indexed by `table.midx`.
    pub c: Vec<C>,
}

impl<C: Scalar> std::fmt::Debug for Jet<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Jet(n={},k={},val={:?})", self.table.nvars, self.table.order, self.c[0])
    }
}

impl<C: Scalar> Jet<C> {
    pub fn constant(table: Arc<JetTable>, zero_like: &C, v: f64) -> Jet<C> {
        let mut c = vec![zero_like.lift(0.0); table.len()];
        c[0] = zero_like.lift(v);
        Jet { table, c }
    }

    /// The coordinate `x_v` expanded at base value `base`.
    pub fn variable(table: Arc<JetTable>, base: C, v: usize) -> Jet<C> {
        assert!(v < table.nvars);
        let zero = base.lift(0.0);
        let mut c = vec![zero; table.len()];
        let one = base.lift(1.0);
        c[0] = base;
        if table.order >= 1 {
            let mut e = [0u8; MAX_VARS];
            e[v] = 1;
            let s = table.slot(&e).unwrap();
            c[s] = one;
        }
        Jet { table, c }
    }

    /// A jet whose base value is the given coefficient (used when the base
    /// point itself carries derivative information).
    pub fn from_coeff(table: Arc<JetTable>, base: C) -> Jet<C> {
        let zero = base.lift(0.0);
        let mut c = vec![zero; table.len()];
        c[0] = base;
        Jet { table, c }
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    pub fn nvars(&self) -> usize {
        self.table.nvars
    }

    pub fn value(&self) -> C {
        self.c[0].clone()
    }

    /// Taylor coefficient of the multi-index `m` (zero outside the table).
    pub fn coeff(&self, m: &[usize]) -> C {
        let mut key = [0u8; MAX_VARS];
        for (i, &v) in m.iter().enumerate() {
            key[i] = v as u8;
        }
        match self.table.slot(&key) {
            Some(s) => self.c[s].clone(),
            None => self.c[0].lift(0.0),
        }
    }

    /// Raw partial derivative `∂^m f` (coefficient times `m!`).
    pub fn partial(&self, m: &[usize]) -> C {
        let mut fact = 1.0;
        for &v in m {
            for q in 1..=v {
                fact *= q as f64;
            }
        }
        self.coeff(m).scl(fact)
    }

    pub fn truncated(&self, order: usize) -> Jet<C> {
        if order >= self.table.order {
            return self.clone();
        }
        let t = table(self.table.nvars, order);
        let mut c = Vec::with_capacity(t.len());
        for m in &t.midx {
            c.push(self.c[self.table.slot(m).unwrap()].clone());
        }
        Jet { table: t, c }
    }

    /// Partial derivative as a jet of one lower order.
    pub fn d(&self, v: usize) -> Jet<C> {
        assert!(self.table.order >= 1, "cannot differentiate an order-0 jet");
        let t = table(self.table.nvars, self.table.order - 1);
        let mut c = Vec::with_capacity(t.len());
        for m in &t.midx {
            let mut up = *m;
            up[v] += 1;
            let s = self.table.slot(&up).unwrap();
            c.push(self.c[s].scl((up[v]) as f64));
        }
        Jet { table: t, c }
    }

    fn align(a: &Jet<C>, b: &Jet<C>) -> (Jet<C>, Jet<C>) {
        assert_eq!(a.table.nvars, b.table.nvars, "jet variable mismatch");
        if a.table.order == b.table.order {
            (a.clone(), b.clone())
        } else if a.table.order < b.table.order {
            (a.clone(), b.truncated(a.table.order))
        } else {
            (a.truncated(b.table.order), b.clone())
        }
    }

    /// Composition with a univariate function given its derivatives at the
    /// base value: `derivs[m] = f^(m)(self.value())`.
    pub fn compose(&self, derivs: &[C]) -> Jet<C> {
        let k = self.table.order;
        assert!(derivs.len() >= k + 1);
        // nilpotent part
        let mut nil = self.clone();
        nil.c[0] = nil.c[0].lift(0.0);
        // Horner evaluation of sum_m derivs[m]/m! * nil^m
        let mut acc = Jet::constant(self.table.clone(), &self.c[0], 0.0);
        let mut fact = 1.0;
        for q in 1..=k {
            fact *= q as f64;
        }
        for m in (0..=k).rev() {
            acc = acc * nil.clone();
            let coeff = derivs[m].scl(1.0 / fact);
            acc.c[0] = acc.c[0].clone() + coeff;
            if m > 0 {
                fact /= m as f64;
            }
        }
        acc
    }
}

impl<C: Scalar> Add for Jet<C> {
    type Output = Jet<C>;
    fn add(self, rhs: Jet<C>) -> Jet<C> {
        let (mut a, b) = Jet::align(&self, &rhs);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x = x.clone() + y.clone();
        }
        a
    }
}

impl<C: Scalar> Sub for Jet<C> {
    type Output = Jet<C>;
    fn sub(self, rhs: Jet<C>) -> Jet<C> {
        let (mut a, b) = Jet::align(&self, &rhs);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x = x.clone() - y.clone();
        }
        a
    }
}

impl<C: Scalar> Neg for Jet<C> {
    type Output = Jet<C>;
    fn neg(mut self) -> Jet<C> {
        for x in self.c.iter_mut() {
            *x = -x.clone();
        }
        self
    }
}

impl<C: Scalar> Mul for Jet<C> {
    type Output = Jet<C>;
    fn mul(self, rhs: Jet<C>) -> Jet<C> {
        let (a, b) = Jet::align(&self, &rhs);
        let t = a.table.clone();
        let zero = a.c[0].lift(0.0);
        let mut c = vec![zero; t.len()];
        for (k, pairs) in t.prod.iter().enumerate() {
            let mut acc = a.c[0].lift(0.0);
            for &(i, j) in pairs {
                acc = acc + a.c[i as usize].clone() * b.c[j as usize].clone();
            }
            c[k] = acc;
        }
        Jet { table: t, c }
    }
}

impl<C: Scalar> Div for Jet<C> {
    type Output = Jet<C>;
    fn div(self, rhs: Jet<C>) -> Jet<C> {
        let (a, b) = Jet::align(&self, &rhs);
        a * Scalar::recip(&b)
    }
}

impl<C: Scalar> Scalar for Jet<C> {
    fn val(&self) -> f64 {
        self.c[0].val()
    }

    fn lift(&self, c: f64) -> Self {
        Jet::constant(self.table.clone(), &self.c[0], c)
    }

    fn scl(&self, s: f64) -> Self {
        let mut out = self.clone();
        for x in out.c.iter_mut() {
            *x = x.scl(s);
        }
        out
    }

    fn addc(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0].addc(s);
        out
    }

    fn recip(&self) -> Self {
        let k = self.table.order;
        let v = self.c[0].clone();
        // f(x) = 1/x, f^(m)(v) = (-1)^m m! v^{-(m+1)}
        let vinv = v.recip();
        let mut derivs = Vec::with_capacity(k + 1);
        let mut cur = vinv.clone();
        let mut fact = 1.0;
        for m in 0..=k {
            if m > 0 {
                fact *= m as f64;
                cur = cur * vinv.clone();
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            derivs.push(cur.scl(sign * fact));
        }
        self.compose(&derivs)
    }

    fn sqrt(&self) -> Self {
        let k = self.table.order;
        let v = self.c[0].clone();
        let root = v.sqrt();
        let vinv = v.recip();
        // f = x^{1/2}, f^(m) = (1/2)(1/2 - 1)...(1/2 - m + 1) x^{1/2 - m}
        let mut derivs = Vec::with_capacity(k + 1);
        let mut cur = root;
        let mut coef = 1.0;
        for m in 0..=k {
            if m > 0 {
                coef *= 0.5 - (m as f64 - 1.0);
                cur = cur * vinv.clone();
            }
            derivs.push(cur.scl(coef));
        }
        self.compose(&derivs)
    }

    fn exp(&self) -> Self {
        let k = self.table.order;
        let e = self.c[0].exp();
        let derivs = vec![e; k + 1];
        self.compose(&derivs)
    }

    fn ln(&self) -> Self {
        let k = self.table.order;
        let v = self.c[0].clone();
        let vinv = v.recip();
        let mut derivs = Vec::with_capacity(k + 1);
        derivs.push(v.ln());
        let mut cur = vinv.clone();
        let mut fact = 1.0;
        for m in 1..=k {
            if m > 1 {
                fact *= (m - 1) as f64;
                cur = cur * vinv.clone();
            }
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            derivs.push(cur.scl(sign * fact));
        }
        self.compose(&derivs)
    }

    fn sin(&self) -> Self {
        let k = self.table.order;
        let s = self.c[0].sin();
        let c = self.c[0].cos();
        let cycle = [s.clone(), c.clone(), -s, -c];
        let derivs: Vec<C> = (0..=k).map(|m| cycle[m % 4].clone()).collect();
        self.compose(&derivs)
    }

    fn cos(&self) -> Self {
        let k = self.table.order;
        let s = self.c[0].sin();
        let c = self.c[0].cos();
        let cycle = [c.clone(), -s.clone(), -c, s];
        let derivs: Vec<C> = (0..=k).map(|m| cycle[m % 4].clone()).collect();
        self.compose(&derivs)
    }

    fn sinh(&self) -> Self {
        let k = self.table.order;
        let s = self.c[0].sinh();
        let c = self.c[0].cosh();
        let derivs: Vec<C> = (0..=k).map(|m| if m % 2 == 0 { s.clone() } else { c.clone() }).collect();
        self.compose(&derivs)
    }

    fn cosh(&self) -> Self {
        let k = self.table.order;
        let s = self.c[0].sinh();
        let c = self.c[0].cosh();
        let derivs: Vec<C> = (0..=k).map(|m| if m % 2 == 0 { c.clone() } else { s.clone() }).collect();
        self.compose(&derivs)
    }

    fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return self.lift(1.0);
        }
        let inv = n < 0;
        let mut e = n.unsigned_abs();
        let mut base = self.clone();
        let mut acc = self.lift(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        if inv {
            Scalar::recip(&acc)
        } else {
            acc
        }
    }
}

/// Jets of the coordinates of a point, for expanding functions around it.
pub fn variables(point: &[f64], order: usize) -> Vec<Jet<f64>> {
    let t = table(point.len(), order);
    point
        .iter()
        .enumerate()
        .map(|(v, &p)| Jet::variable(t.clone(), p, v))
        .collect()
}

/// Outer jets in `offsets.len()` ambient directions seeded on top of inner
/// coefficients (typically surface-parameter jets). Coordinate `i` becomes
/// `inner_i + ξ_i`.
pub fn nested_variables<C: Scalar>(inner: &[C], order: usize) -> Vec<Jet<C>> {
    let t = table(inner.len(), order);
    inner
        .iter()
        .enumerate()
        .map(|(v, p)| Jet::variable(t.clone(), p.clone(), v))
        .collect()
}
