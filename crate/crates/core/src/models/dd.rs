//! Double-double arithmetic (an unevaluated sum `hi + lo` of two f64), enough
//! of it to run the network forward pass with ~32 significant digits.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    /// Exact `a + b` of two doubles.
    pub fn sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    /// Multiplication by a power of two (exact).
    fn scale(self, f: f64) -> Self {
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        // |r| <= ln2/2, scaled by 2^-10 before the series
        let r = (self - LN2 * Dd::from_f64(k)).scale(1.0 / 1024.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=14 {
            term = term * r / Dd::from_f64(n as f64);
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum.scale(2f64.powi(k as i32))
    }

    pub fn tanh(self) -> Self {
        if self.hi.abs() > 40.0 {
            return Dd::from_f64(self.hi.signum());
        }
        let e = self.scale(2.0).exp();
        (e - Dd::ONE) / (e + Dd::ONE)
    }

    pub fn sigmoid(self) -> Self {
        Dd::ONE / (Dd::ONE + (-self).exp())
    }

    pub fn relu(self) -> Self {
        if self.hi > 0.0 {
            self
        } else {
            Dd::ZERO
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::renorm(s, e + f)
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
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        Dd::renorm(p, e + (self.hi * y.lo + self.lo * y.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from_f64(q2);
        let q3 = r.hi / y.hi;
        Dd::renorm(q1, q2) + Dd::from_f64(q3)
    }
}

/// Scalar operations needed by the reference forward pass.
pub(crate) trait Real:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn of(v: f64) -> Self;
    fn tanh(self) -> Self;
    fn sigmoid(self) -> Self;
    fn relu(self) -> Self;
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sigmoid(self) -> Self {
        1.0 / (1.0 + (-self).exp())
    }
    fn relu(self) -> Self {
        self.max(0.0)
    }
}

impl Real for Dd {
    fn of(v: f64) -> Self {
        Dd::from_f64(v)
    }
    fn tanh(self) -> Self {
        Dd::tanh(self)
    }
    fn sigmoid(self) -> Self {
        Dd::sigmoid(self)
    }
    fn relu(self) -> Self {
        Dd::relu(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // hi + lo of each value, rounded from a 50-digit evaluation at the
    // exact binary argument; the ten squarings in exp cost about three digits
    #[test]
    fn transcendental_values() {
        let cases = [
            (
                Dd::from_f64(0.3).exp(),
                1.3498588075760032,
                -9.447314673432387e-17,
            ),
            (
                Dd::from_f64(-5.0).exp(),
                0.006737946999085467,
                9.579094181215286e-20,
            ),
            (
                Dd::from_f64(0.3).tanh(),
                0.2913126124515909,
                -6.4602656586469586e-18,
            ),
            (
                Dd::from_f64(-2.5).tanh(),
                -0.9866142981514303,
                2.4529238788172874e-17,
            ),
            (
                Dd::from_f64(1.7).sigmoid(),
                0.8455347349164652,
                4.2798323079227154e-17,
            ),
        ];
        for (i, (got, hi, lo)) in cases.into_iter().enumerate() {
            let err = got - Dd { hi, lo };
            assert!(err.hi.abs() < 1e-27, "case {i}: {err:?}");
        }
    }

    #[test]
    fn arithmetic_identities() {
        let a = Dd::sum(1.0, 1e-20);
        let b = Dd::from_f64(3.0);
        let q = a / b;
        let back = q * b - a;
        assert!(back.hi.abs() < 1e-31);
        assert_eq!((a - a).hi, 0.0);
        assert_eq!(Dd::from_f64(-2.0).relu(), Dd::ZERO);
        assert!((Dd::ZERO.sigmoid().hi - 0.5).abs() == 0.0);
    }
}
