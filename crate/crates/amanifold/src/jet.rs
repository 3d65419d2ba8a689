//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the value of a smooth function together with all of its
//! partial derivatives up to a chosen total order, stored as the coefficients
//! of the truncated Taylor polynomial around the evaluation point. Arithmetic
//! on jets propagates derivatives exactly (to rounding), which is what the
//! curvature tolerances in this crate require: third derivatives of metric
//! entries enter the covariant derivative of the Ricci tensor, and finite
//! differences cannot reach 1e-9 there.
//!
//! Coefficients are polynomial coefficients, i.e. `c_α = ∂^α f / α!`. The
//! monomial basis is graded (all monomials of degree 0, then 1, …), so the
//! basis of an order-`k` space is a prefix of the basis of any higher-order
//! space with the same dimension. Truncation is a prefix copy and the formal
//! partial derivative of an order-`k` jet is an order-`k−1` jet.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, Mutex};

/// Shared index tables for one (dimension, order) pair.
///
/// Built once per pair and cached globally; jets hold an `Arc` to their space.
pub struct JetSpace {
    dim: usize,
    order: usize,
    monomials: Vec<Box<[u8]>>,
    /// Start offset of each degree block; `degree_start[k]` is also the number
    /// of monomials of degree < k, so `degree_start[k + 1]` is the coefficient
    /// length of an order-`k` jet.
    degree_start: Vec<usize>,
    /// All products `(a, b) -> out` with `deg a + deg b <= order`.
    mul_table: Vec<(u32, u32, u32)>,
    /// Per variable: `(source, target, exponent)` entries of the formal
    /// derivative map into the order-`order−1` prefix.
    partial_tables: Vec<Vec<(u32, u32, f64)>>,
    /// `α!` per monomial.
    factorials: Vec<f64>,
}

static SPACES: LazyLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> =
    LazyLock::new(Default::default);

fn gen_degree(dim: usize, deg: usize, prefix: &mut Vec<u8>, out: &mut Vec<Box<[u8]>>) {
    if dim == 1 {
        prefix.push(deg as u8);
        out.push(prefix.clone().into_boxed_slice());
        prefix.pop();
        return;
    }
    for e in (0..=deg).rev() {
        prefix.push(e as u8);
        gen_degree(dim - 1, deg - e, prefix, out);
        prefix.pop();
    }
}

impl JetSpace {
    fn build(dim: usize, order: usize) -> Self {
        assert!(dim >= 1, "jet dimension must be at least 1");
        let mut monomials = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for deg in 0..=order {
            degree_start.push(monomials.len());
            gen_degree(dim, deg, &mut Vec::new(), &mut monomials);
        }
        degree_start.push(monomials.len());

        let index: HashMap<&[u8], u32> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.as_ref(), i as u32))
            .collect();

        let degree = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();

        let mut mul_table = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            let da = degree(a);
            for (j, b) in monomials.iter().enumerate() {
                if da + degree(b) > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
                mul_table.push((i as u32, j as u32, index[sum.as_slice()]));
            }
        }

        let mut partial_tables = vec![Vec::new(); dim];
        if order >= 1 {
            for (i, m) in monomials.iter().enumerate() {
                for v in 0..dim {
                    if m[v] == 0 {
                        continue;
                    }
                    let mut t = m.to_vec();
                    t[v] -= 1;
                    // Targets have degree <= order−1, so their index in this
                    // space equals their index in the lower-order space.
                    partial_tables[v].push((i as u32, index[t.as_slice()], m[v] as f64));
                }
            }
        }

        let factorials = monomials
            .iter()
            .map(|m| m.iter().map(|&e| (1..=e as u64).product::<u64>() as f64).product())
            .collect();

        JetSpace { dim, order, monomials, degree_start, mul_table, partial_tables, factorials }
    }

    fn get(dim: usize, order: usize) -> Arc<JetSpace> {
        let mut cache = SPACES.lock().expect("jet space cache poisoned");
        cache
            .entry((dim, order))
            .or_insert_with(|| Arc::new(JetSpace::build(dim, order)))
            .clone()
    }

    fn len(&self) -> usize {
        self.monomials.len()
    }

    fn index_of(&self, alpha: &[usize]) -> Option<usize> {
        if alpha.len() != self.dim {
            return None;
        }
        let key: Vec<u8> = alpha.iter().map(|&e| e as u8).collect();
        self.monomials.iter().position(|m| m.as_ref() == key.as_slice())
    }
}

/// Value plus exact partial derivatives up to a total order.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<f64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.space.dim)
            .field("order", &self.space.order)
            .field("value", &self.coeffs[0])
            .finish()
    }
}

impl Jet {
    /// A constant: value with all derivatives zero.
    pub fn constant(dim: usize, order: usize, value: f64) -> Jet {
        let space = JetSpace::get(dim, order);
        let mut coeffs = vec![0.0; space.len()];
        coeffs[0] = value;
        Jet { space, coeffs }
    }

    /// The coordinate function `u_index` seeded at `value`.
    pub fn variable(dim: usize, order: usize, value: f64, index: usize) -> Jet {
        assert!(index < dim, "variable index {index} out of range for dimension {dim}");
        let mut jet = Jet::constant(dim, order, value);
        if order >= 1 {
            // Degree-1 monomials start at offset 1 and e_index sits at
            // position `index` among them (first-exponent-descending order).
            jet.coeffs[1 + index] = 1.0;
        }
        jet
    }

    /// Seed one variable jet per coordinate.
    pub fn variables(dim: usize, order: usize, values: &[f64]) -> Vec<Jet> {
        assert_eq!(values.len(), dim);
        values.iter().enumerate().map(|(i, &v)| Jet::variable(dim, order, v, i)).collect()
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// First partial `∂f/∂u_v`.
    pub fn first_partial(&self, v: usize) -> f64 {
        assert!(self.order() >= 1, "derivative order unavailable");
        self.coeffs[1 + v]
    }

    /// The derivative `∂^α f` for a multi-index given as exponent counts.
    pub fn deriv(&self, alpha: &[usize]) -> f64 {
        let idx = self
            .space
            .index_of(alpha)
            .unwrap_or_else(|| panic!("derivative order unavailable for multi-index {alpha:?}"));
        self.coeffs[idx] * self.space.factorials[idx]
    }

    /// Formal partial derivative; drops one order.
    pub fn partial(&self, v: usize) -> Jet {
        assert!(self.order() >= 1, "derivative order unavailable");
        let space = JetSpace::get(self.dim(), self.order() - 1);
        let mut coeffs = vec![0.0; space.len()];
        for &(src, dst, e) in &self.space.partial_tables[v] {
            coeffs[dst as usize] = self.coeffs[src as usize] * e;
        }
        Jet { space, coeffs }
    }

    /// Prefix-truncate to a lower (or equal) order.
    pub fn truncated(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let space = JetSpace::get(self.dim(), order);
        Jet { space: space.clone(), coeffs: self.coeffs[..space.len()].to_vec() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    fn check_dim(&self, rhs: &Jet) {
        assert_eq!(self.dim(), rhs.dim(), "jet dimension mismatch");
    }

    fn zip_with(&self, rhs: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        self.check_dim(rhs);
        let order = self.order().min(rhs.order());
        let space = JetSpace::get(self.dim(), order);
        let n = space.len();
        let coeffs = (0..n).map(|i| f(self.coeffs[i], rhs.coeffs[i])).collect();
        Jet { space, coeffs }
    }

    fn mul_jets(&self, rhs: &Jet) -> Jet {
        self.check_dim(rhs);
        let order = self.order().min(rhs.order());
        let space = JetSpace::get(self.dim(), order);
        let mut coeffs = vec![0.0; space.len()];
        for &(a, b, out) in &space.mul_table {
            coeffs[out as usize] += self.coeffs[a as usize] * rhs.coeffs[b as usize];
        }
        Jet { space, coeffs }
    }

    /// Evaluate `Σ_k c_k (self − self.value())^k` by Horner's scheme.
    ///
    /// `series` must supply `order + 1` coefficients. This is exact truncated
    /// composition: the deviation term has no constant part, so its k-th power
    /// contributes only from degree k upward.
    pub fn compose_series(&self, series: &[f64]) -> Jet {
        let order = self.order();
        assert!(series.len() >= order + 1, "series too short for jet order");
        let mut dev = self.clone();
        dev.coeffs[0] = 0.0;
        let mut acc = Jet::constant(self.dim(), order, series[order]);
        for k in (0..order).rev() {
            acc = acc.mul_jets(&dev);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let v = self.value();
        let series: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / v.powi(k as i32 + 1))
            .collect();
        self.compose_series(&series)
    }

    pub fn ln(&self) -> Jet {
        let v = self.value();
        let mut series = vec![v.ln()];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(sign / (k as f64 * v.powi(k as i32)));
        }
        self.compose_series(&series)
    }

    pub fn exp(&self) -> Jet {
        let ev = self.value().exp();
        let mut series = vec![ev];
        let mut fact = 1.0;
        for k in 1..=self.order() {
            fact *= k as f64;
            series.push(ev / fact);
        }
        self.compose_series(&series)
    }

    pub fn sqrt(&self) -> Jet {
        let v = self.value();
        let root = v.sqrt();
        // √(v + t) = √v · Σ binom(1/2, k) (t/v)^k
        let mut series = vec![root];
        let mut binom = 1.0;
        for k in 1..=self.order() {
            binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
            series.push(root * binom / v.powi(k as i32));
        }
        self.compose_series(&series)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let mut fact = 1.0;
        let series: Vec<f64> = (0..=self.order())
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                cycle[k % 4] / fact
            })
            .collect();
        self.compose_series(&series)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let mut fact = 1.0;
        let series: Vec<f64> = (0..=self.order())
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                cycle[k % 4] / fact
            })
            .collect();
        self.compose_series(&series)
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $imp:expr) => {
        impl $trait for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $imp;
                f(self, rhs)
            }
        }
        impl $trait for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $trait::$method(self, &rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.mul_jets(b));
jet_binop!(Div, div, |a, b| a.mul_jets(&b.recip()));

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        // f = 2 + 3u0 − u1 + 0.5 u0²u1 − u0u1u2 + u2³ at (0.3, −0.7, 1.1)
        let (a, b, c) = (0.3, -0.7, 1.1);
        let u = Jet::variables(3, 3, &[a, b, c]);
        let f = &(&(&(&u[0].scale(3.0) + 2.0) - &u[1])
            + &(&u[0] * &u[0]).scale(0.5).mul_jets(&u[1]))
            - &(&(&u[0] * &u[1]) * &u[2])
            + (&(&u[2] * &u[2]) * &u[2]);

        assert!(close(f.value(), 2.0 + 3.0 * a - b + 0.5 * a * a * b - a * b * c + c * c * c, 1e-14));
        assert!(close(f.deriv(&[1, 0, 0]), 3.0 + a * b - b * c, 1e-14));
        assert!(close(f.deriv(&[0, 1, 0]), -1.0 + 0.5 * a * a - a * c, 1e-14));
        assert!(close(f.deriv(&[0, 0, 1]), -a * b + 3.0 * c * c, 1e-14));
        assert!(close(f.deriv(&[1, 1, 0]), a - c, 1e-14));
        assert!(close(f.deriv(&[2, 0, 0]), b, 1e-14));
        assert!(close(f.deriv(&[0, 0, 2]), 6.0 * c, 1e-14));
        assert!(close(f.deriv(&[2, 1, 0]), 1.0, 1e-14));
        assert!(close(f.deriv(&[1, 1, 1]), -1.0, 1e-14));
        assert!(close(f.deriv(&[0, 0, 3]), 6.0, 1e-14));
    }

    #[test]
    fn chain_rule_identities_hold_in_truncated_arithmetic() {
        let u = Jet::variables(2, 3, &[0.4, -0.2]);
        let f = &(&(&u[0] * &u[0]) + &(&u[1] * &u[1])) + 1.0; // 1 + |u|², positive

        // ∂(ln f) = ∂f / f and ∂(exp f) = exp f · ∂f, as order-2 jets.
        for v in 0..2 {
            let lhs = f.ln().partial(v);
            let rhs = &f.partial(v) / &f.truncated(2);
            for (x, y) in lhs.coeffs.iter().zip(rhs.coeffs.iter()) {
                assert!(close(*x, *y, 1e-13));
            }
            let lhs = f.exp().partial(v);
            let rhs = &f.exp().truncated(2) * &f.partial(v);
            for (x, y) in lhs.coeffs.iter().zip(rhs.coeffs.iter()) {
                assert!(close(*x, *y, 1e-13));
            }
        }

        // exp(ln f) = f, sin² + cos² = 1, √f·√f = f.
        let back = f.ln().exp();
        for (x, y) in back.coeffs.iter().zip(f.coeffs.iter()) {
            assert!(close(*x, *y, 1e-13));
        }
        let one = &(&f.sin() * &f.sin()) + &(&f.cos() * &f.cos());
        assert!(close(one.value(), 1.0, 1e-14));
        for c in &one.coeffs[1..] {
            assert!(c.abs() < 1e-13);
        }
        let sq = &f.sqrt() * &f.sqrt();
        for (x, y) in sq.coeffs.iter().zip(f.coeffs.iter()) {
            assert!(close(*x, *y, 1e-13));
        }
    }

    #[test]
    fn truncation_commutes_with_multiplication() {
        let u = Jet::variables(2, 4, &[1.2, 0.7]);
        let f = &(&u[0] * &u[1]) + &u[0];
        let g = &(&u[1] * &u[1]) + 2.0;
        let ab_then_trunc = (&f * &g).truncated(2);
        let trunc_then_ab = &f.truncated(2) * &g.truncated(2);
        for (x, y) in ab_then_trunc.coeffs.iter().zip(trunc_then_ab.coeffs.iter()) {
            assert!(close(*x, *y, 1e-14));
        }
    }

    fn arb_poly_jet() -> impl Strategy<Value = Jet> {
        // Random order-3 jet in 2 variables with small coefficients.
        proptest::collection::vec(-2.0f64..2.0, 10).prop_map(|cs| {
            let mut j = Jet::constant(2, 3, 0.0);
            j.coeffs.copy_from_slice(&cs);
            j
        })
    }

    proptest! {
        #[test]
        fn product_is_commutative_and_leibniz(a in arb_poly_jet(), b in arb_poly_jet()) {
            let ab = &a * &b;
            let ba = &b * &a;
            for (x, y) in ab.coeffs.iter().zip(ba.coeffs.iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            for v in 0..2 {
                let lhs = ab.partial(v);
                let rhs = &(&a.partial(v) * &b.truncated(2)) + &(&a.truncated(2) * &b.partial(v));
                for (x, y) in lhs.coeffs.iter().zip(rhs.coeffs.iter()) {
                    prop_assert!((x - y).abs() < 1e-11);
                }
            }
        }
    }
}
