//! Truncated Taylor series ("jets") for forward-mode derivatives of any order.
//!
//! A [`Jet`] of order `n` stores the coefficients `c_0..=c_n` of
//! `f(t + δ) = Σ c_k δ^k`, so the k-th derivative is `k!·c_k`. Arithmetic on
//! jets propagates exact derivatives up to rounding, which is how closed-form
//! curves and operator chains expose analytic derivatives without symbolic
//! algebra. [`VJet`] is the same thing for points in ℝ³.

use nalgebra::Vector3;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Number of stored coefficients; the highest supported order is `MAX_ORDER`.
pub const CAPACITY: usize = 16;
pub const MAX_ORDER: usize = CAPACITY - 1;

/// Scalar truncated Taylor series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    len: usize,
    c: [f64; CAPACITY],
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; CAPACITY];
        c[0] = value;
        Jet { len: order + 1, c }
    }

    /// The identity map expanded at `t`: coefficients `[t, 1, 0, ...]`.
    pub fn variable(t: f64, order: usize) -> Self {
        let mut j = Jet::constant(t, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= CAPACITY);
        let mut c = [0.0; CAPACITY];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Jet { len: coeffs.len(), c }
    }

    /// Builds a jet from plain derivatives `[f, f', f'', ...]`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        let coeffs: Vec<f64> = d.iter().enumerate().map(|(k, v)| v / factorial(k)).collect();
        Jet::from_coeffs(&coeffs)
    }

    pub fn order(&self) -> usize {
        self.len - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.len]
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k < self.len {
            self.c[k]
        } else {
            0.0
        }
    }

    /// k-th derivative at the expansion point.
    pub fn derivative_value(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = *self;
        out.len = self.len.min(order + 1);
        for v in &mut out.c[out.len..] {
            *v = 0.0;
        }
        out
    }

    /// d/dt, losing one order.
    pub fn derivative(&self) -> Self {
        if self.len == 1 {
            return Jet::constant(0.0, 0);
        }
        let mut c = [0.0; CAPACITY];
        for k in 0..self.len - 1 {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Jet { len: self.len - 1, c }
    }

    /// Antiderivative with the given value at the expansion point, gaining one order.
    pub fn integral(&self, value: f64) -> Self {
        let len = (self.len + 1).min(CAPACITY);
        let mut c = [0.0; CAPACITY];
        c[0] = value;
        for k in 1..len {
            c[k] = self.c[k - 1] / k as f64;
        }
        Jet { len, c }
    }

    /// Evaluates the truncated series at offset `delta` from the expansion point.
    pub fn eval_at(&self, delta: f64) -> f64 {
        self.c[..self.len].iter().rev().fold(0.0, |acc, &v| acc * delta + v)
    }

    pub fn recip(&self) -> Self {
        let mut r = [0.0; CAPACITY];
        r[0] = 1.0 / self.c[0];
        for k in 1..self.len {
            let s: f64 = (1..=k).map(|i| self.c[i] * r[k - i]).sum();
            r[k] = -s * r[0];
        }
        Jet { len: self.len, c: r }
    }

    pub fn sqrt(&self) -> Self {
        let mut s = [0.0; CAPACITY];
        s[0] = self.c[0].sqrt();
        for k in 1..self.len {
            let cross: f64 = (1..k).map(|i| s[i] * s[k - i]).sum();
            s[k] = (self.c[k] - cross) / (2.0 * s[0]);
        }
        Jet { len: self.len, c: s }
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let mut s = [0.0; CAPACITY];
        let mut c = [0.0; CAPACITY];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..self.len {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for i in 1..=k {
                let w = i as f64 * self.c[i];
                ds += w * c[k - i];
                dc += w * s[k - i];
            }
            s[k] = ds / k as f64;
            c[k] = -dc / k as f64;
        }
        (Jet { len: self.len, c: s }, Jet { len: self.len, c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn exp(&self) -> Self {
        let mut e = [0.0; CAPACITY];
        e[0] = self.c[0].exp();
        for k in 1..self.len {
            let s: f64 = (1..=k).map(|i| i as f64 * self.c[i] * e[k - i]).sum();
            e[k] = s / k as f64;
        }
        Jet { len: self.len, c: e }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    /// `self ∘ inner`, where `self` is expanded at `inner.value()`.
    pub fn compose(&self, inner: &Jet) -> Self {
        let order = self.order().min(inner.order());
        let mut shift = inner.truncate(order);
        shift.c[0] = 0.0;
        let mut out = Jet::constant(self.c[self.len - 1], order);
        for k in (0..self.len - 1).rev() {
            out = out * shift;
            out.c[0] += self.c[k];
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c[..self.len].iter().all(|v| v.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut c = [0.0; CAPACITY];
        for k in 0..len {
            c[k] = self.c[k] + rhs.c[k];
        }
        Jet { len, c }
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in &mut self.c[..self.len] {
            *v = -*v;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut c = [0.0; CAPACITY];
        for k in 0..len {
            c[k] = (0..=k).map(|i| self.c[i] * rhs.c[k - i]).sum();
        }
        Jet { len, c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for v in &mut self.c[..self.len] {
            *v *= rhs;
        }
        self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

/// Truncated Taylor series of a point in ℝ³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VJet {
    len: usize,
    c: [Vector3<f64>; CAPACITY],
}

impl VJet {
    pub fn new(x: Jet, y: Jet, z: Jet) -> Self {
        let len = x.len.min(y.len).min(z.len);
        let mut c = [Vector3::zeros(); CAPACITY];
        for k in 0..len {
            c[k] = Vector3::new(x.c[k], y.c[k], z.c[k]);
        }
        VJet { len, c }
    }

    pub fn constant(v: Vector3<f64>, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [Vector3::zeros(); CAPACITY];
        c[0] = v;
        VJet { len: order + 1, c }
    }

    pub fn from_coeffs(coeffs: &[Vector3<f64>]) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= CAPACITY);
        let mut c = [Vector3::zeros(); CAPACITY];
        c[..coeffs.len()].copy_from_slice(coeffs);
        VJet { len: coeffs.len(), c }
    }

    /// Builds a jet from plain derivatives `[γ, γ', γ'', ...]`.
    pub fn from_derivatives(d: &[Vector3<f64>]) -> Self {
        let coeffs: Vec<Vector3<f64>> =
            d.iter().enumerate().map(|(k, v)| v / factorial(k)).collect();
        VJet::from_coeffs(&coeffs)
    }

    pub fn order(&self) -> usize {
        self.len - 1
    }

    pub fn value(&self) -> Vector3<f64> {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[Vector3<f64>] {
        &self.c[..self.len]
    }

    pub fn coeff(&self, k: usize) -> Vector3<f64> {
        if k < self.len {
            self.c[k]
        } else {
            Vector3::zeros()
        }
    }

    /// `[γ, γ', ..., γ^(order)]` at the expansion point.
    pub fn derivatives(&self) -> Vec<Vector3<f64>> {
        (0..self.len).map(|k| self.c[k] * factorial(k)).collect()
    }

    pub fn component(&self, i: usize) -> Jet {
        let mut c = [0.0; CAPACITY];
        for k in 0..self.len {
            c[k] = self.c[k][i];
        }
        Jet { len: self.len, c }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = *self;
        out.len = self.len.min(order + 1);
        for v in &mut out.c[out.len..] {
            *v = Vector3::zeros();
        }
        out
    }

    pub fn derivative(&self) -> Self {
        if self.len == 1 {
            return VJet::constant(Vector3::zeros(), 0);
        }
        let mut c = [Vector3::zeros(); CAPACITY];
        for k in 0..self.len - 1 {
            c[k] = self.c[k + 1] * (k + 1) as f64;
        }
        VJet { len: self.len - 1, c }
    }

    pub fn integral(&self, value: Vector3<f64>) -> Self {
        let len = (self.len + 1).min(CAPACITY);
        let mut c = [Vector3::zeros(); CAPACITY];
        c[0] = value;
        for k in 1..len {
            c[k] = self.c[k - 1] / k as f64;
        }
        VJet { len, c }
    }

    pub fn eval_at(&self, delta: f64) -> Vector3<f64> {
        self.c[..self.len]
            .iter()
            .rev()
            .fold(Vector3::zeros(), |acc, v| acc * delta + v)
    }

    pub fn dot(&self, rhs: &VJet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut c = [0.0; CAPACITY];
        for k in 0..len {
            c[k] = (0..=k).map(|i| self.c[i].dot(&rhs.c[k - i])).sum();
        }
        Jet { len, c }
    }

    pub fn cross(&self, rhs: &VJet) -> VJet {
        let len = self.len.min(rhs.len);
        let mut c = [Vector3::zeros(); CAPACITY];
        for k in 0..len {
            let mut acc = Vector3::zeros();
            for i in 0..=k {
                acc += self.c[i].cross(&rhs.c[k - i]);
            }
            c[k] = acc;
        }
        VJet { len, c }
    }

    pub fn norm(&self) -> Jet {
        self.dot(self).sqrt()
    }

    pub fn normalize(&self) -> VJet {
        *self * self.norm().recip()
    }

    /// `self ∘ inner` for a reparametrization `inner` expanded at the same point.
    pub fn compose(&self, inner: &Jet) -> VJet {
        VJet::new(
            self.component(0).compose(inner),
            self.component(1).compose(inner),
            self.component(2).compose(inner),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.c[..self.len].iter().all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// det(a, b, c) = a · (b × c), as a jet.
pub fn det3(a: &VJet, b: &VJet, c: &VJet) -> Jet {
    a.dot(&b.cross(c))
}

impl Add for VJet {
    type Output = VJet;
    fn add(self, rhs: VJet) -> VJet {
        let len = self.len.min(rhs.len);
        let mut c = [Vector3::zeros(); CAPACITY];
        for k in 0..len {
            c[k] = self.c[k] + rhs.c[k];
        }
        VJet { len, c }
    }
}

impl Sub for VJet {
    type Output = VJet;
    fn sub(self, rhs: VJet) -> VJet {
        self + (-rhs)
    }
}

impl Neg for VJet {
    type Output = VJet;
    fn neg(mut self) -> VJet {
        for v in &mut self.c[..self.len] {
            *v = -*v;
        }
        self
    }
}

impl Mul<Jet> for VJet {
    type Output = VJet;
    fn mul(self, rhs: Jet) -> VJet {
        let len = self.len.min(rhs.len);
        let mut c = [Vector3::zeros(); CAPACITY];
        for k in 0..len {
            let mut acc = Vector3::zeros();
            for i in 0..=k {
                acc += self.c[i] * rhs.c[k - i];
            }
            c[k] = acc;
        }
        VJet { len, c }
    }
}

impl Mul<VJet> for Jet {
    type Output = VJet;
    fn mul(self, rhs: VJet) -> VJet {
        rhs * self
    }
}

impl Mul<f64> for VJet {
    type Output = VJet;
    fn mul(mut self, rhs: f64) -> VJet {
        for v in &mut self.c[..self.len] {
            *v *= rhs;
        }
        self
    }
}

impl Add<Vector3<f64>> for VJet {
    type Output = VJet;
    fn add(mut self, rhs: Vector3<f64>) -> VJet {
        self.c[0] += rhs;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sin_of_variable_matches_derivatives() {
        let t = 0.7;
        let s = Jet::variable(t, 6).sin();
        let expected = [t.sin(), t.cos(), -t.sin(), -t.cos(), t.sin(), t.cos(), -t.sin()];
        for (k, e) in expected.iter().enumerate() {
            assert_relative_eq!(s.derivative_value(k), e, epsilon = 1e-13);
        }
    }

    #[test]
    fn recip_and_sqrt_are_inverse_operations() {
        let x = Jet::variable(1.3, 8) * 2.0 + 0.5;
        let one = x * x.recip();
        assert_relative_eq!(one.value(), 1.0, epsilon = 1e-15);
        for k in 1..=8 {
            assert!(one.coeff(k).abs() < 1e-13);
        }
        let sq = x.sqrt() * x.sqrt() - x;
        assert!(sq.coeffs().iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn exp_matches_closed_form() {
        let e = (Jet::variable(0.4, 10) * 3.0).exp();
        for k in 0..=10 {
            let expect = 3f64.powi(k as i32) * (1.2f64).exp();
            assert_relative_eq!(e.derivative_value(k), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn composition_chains_derivatives() {
        // sin(t^2) at t = 0.9 via composition of sin (expanded at 0.81) with t^2.
        let t = 0.9;
        let inner = Jet::variable(t, 5).powi(2);
        let outer = Jet::variable(inner.value(), 5).sin();
        let direct = inner.sin();
        let composed = outer.compose(&inner);
        for k in 0..=5 {
            assert_relative_eq!(composed.coeff(k), direct.coeff(k), epsilon = 1e-13);
        }
    }

    #[test]
    fn cross_product_rule() {
        let t = Jet::variable(0.3, 4);
        let (s, c) = t.sin_cos();
        let a = VJet::new(c, s, t);
        let b = VJet::new(t, Jet::constant(1.0, 4), s);
        let lhs = a.cross(&b).derivative();
        let rhs = a.derivative().cross(&b.truncate(3)) + a.truncate(3).cross(&b.derivative());
        for k in 0..=3 {
            assert!((lhs.coeff(k) - rhs.coeff(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn eval_at_reproduces_polynomial() {
        let p = Jet::from_coeffs(&[1.0, -2.0, 0.5, 3.0]);
        let d = 0.25;
        assert_relative_eq!(p.eval_at(d), 1.0 - 2.0 * d + 0.5 * d * d + 3.0 * d * d * d);
        assert_relative_eq!(p.integral(2.0).derivative().eval_at(d), p.eval_at(d));
    }
}
