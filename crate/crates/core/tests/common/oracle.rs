//! Reference implementations used only by tests.
//!
//! Arithmetic is a separate double-double built on Dekker splitting (no fused
//! multiply-add), so it shares no code with the library. Theta is evaluated
//! by the Jacobi triple product, which has no cancellation for negative
//! nomes, and by a plain series as a cross-check.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn split(a: f64) -> (f64, f64) {
    let c = 134217729.0 * a; // 2^27 + 1
    let hi = c - (c - a);
    (hi, a - hi)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn norm(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    pub fn f(self) -> f64 {
        self.hi + self.lo
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(0.0);
        }
        let r = self.hi.sqrt();
        let (p, e) = two_prod(r, r);
        let resid = ((self.hi - p) - e) + self.lo;
        Dd::norm(r, resid / (2.0 * r))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::norm(s, e + self.lo + o.lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::norm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        Dd::norm(q1, q2) + Dd::new(q3)
    }
}

/// Gauss iteration carried in double-double until the gap is below 1e-30.
pub fn agm(x: f64, y: f64) -> f64 {
    // exact power-of-two scaling keeps a*g in range
    let k = (x.log2().round() as i32).clamp(-1000, 1000);
    let s = 2f64.powi(-k);
    let (mut a, mut g) = (Dd::new(x * s), Dd::new(y * s));
    for _ in 0..200 {
        if (a - g).abs().hi <= 1e-30 * a.hi.abs() {
            break;
        }
        let a1 = (a + g) * Dd::new(0.5);
        g = (a * g).sqrt();
        a = a1;
    }
    a.f() / s
}

/// `θ(q) = Π (1 - q^{2n}) (1 + q^{2n-1})^2`.
pub fn theta_product_dd(q: f64) -> Dd {
    let q = Dd::new(q);
    let q2 = q * q;
    let mut odd = q;
    let mut even = q2;
    let mut acc = Dd::new(1.0);
    for _ in 0..100_000 {
        if odd.hi.abs() < 1e-36 {
            break;
        }
        let f = Dd::new(1.0) + odd;
        acc = acc * (Dd::new(1.0) - even) * f * f;
        odd = odd * q2;
        even = even * q2;
    }
    acc
}

pub fn theta_product(q: f64) -> f64 {
    theta_product_dd(q).f()
}

/// `1 + 2 Σ q^{n²}` summed until the terms drop below 1e-36.
pub fn theta_series(q: f64) -> f64 {
    let q = Dd::new(q);
    let mut sum = Dd::new(1.0);
    let mut n: u64 = 1;
    loop {
        let mut t = Dd::new(1.0);
        for _ in 0..n * n {
            t = t * q;
            if t.hi.abs() < 1e-300 {
                break;
            }
        }
        if t.hi.abs() < 1e-36 {
            return sum.f();
        }
        sum = sum + Dd::new(2.0) * t;
        n += 1;
    }
}

/// Nome with `θ²(q) = 1/a`, by bisection to adjacent doubles.
pub fn inverse_nome(a: f64) -> f64 {
    let target = Dd::new(1.0) / Dd::new(a);
    let (mut lo, mut hi) = (-0.999f64, 0.999f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let t = theta_product_dd(mid);
        if (t * t - target).hi < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `x ⋆ y = θ²(-q) / θ²(q)` with `θ²(q) = 1/agm(x,y)`.
pub fn star(x: f64, y: f64) -> f64 {
    let q = inverse_nome(agm(x, y));
    let num = theta_product_dd(-q);
    let den = theta_product_dd(q);
    ((num * num) / (den * den)).f()
}
