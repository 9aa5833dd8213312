//! Double-double arithmetic (~106-bit significand).
//!
//! Used where f64 working precision is not enough: polishing Hecke eigenvalue
//! roots, solving for eigenvectors in the echelonized basis (whose components
//! grow like d^{(k-1)/2} and cancel against each other), and as the
//! twice-working-precision reference summation for the Bessel series.
//!
//! Error-free transforms follow Dekker/Knuth; products use FMA.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Top ~106 bits of a big integer.
    pub fn from_bigint(x: &BigInt) -> Dd {
        let hi = x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let rem = x - BigInt::from_f64(hi).expect("finite");
        Dd::renorm(hi, rem.to_f64().unwrap_or(0.0))
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        Dd::renorm(s1, s2 + self.lo + rhs.lo)
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        Dd::renorm(p1, p2 + self.hi * rhs.lo + self.lo * rhs.hi)
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul(Dd::from_f64(q1)));
        let q2 = r.hi / rhs.hi;
        let r2 = r.sub(rhs.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::renorm(s, e + q3)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // One dd Newton step from the f64 seed.
        let s = Dd::from_f64(self.hi.sqrt());
        let t = self.div(s).add(s);
        t.mul(Dd::from_f64(0.5))
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn powi(self, mut n: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }
}

/// Exact n! as a big integer (for dd-precision series prefactors).
pub fn factorial_bigint(n: u32) -> BigInt {
    let mut acc = BigInt::from(1u32);
    for i in 2..=u64::from(n) {
        acc *= i;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use std::str::FromStr;

    #[test]
    fn add_carries_low_part() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-30);
        let c = a.add(b).sub(a);
        assert_eq!(c.to_f64(), 1e-30);
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = Dd::from_f64(std::f64::consts::PI);
        let b = Dd::from_f64(std::f64::consts::E);
        let c = a.mul(b).div(b);
        assert!((c.sub(a)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn sqrt_two() {
        let s = Dd::from_f64(2.0).sqrt();
        let err = s.mul(s).sub(Dd::from_f64(2.0)).abs().to_f64();
        assert!(err < 1e-31, "err = {err:e}");
    }

    #[test]
    fn bigint_split_preserves_106_bits() {
        let x = BigInt::from_str("123456789012345678901234567890123456789").unwrap();
        let d = Dd::from_bigint(&x);
        // Residual after removing hi+lo must be below one ulp of lo.
        let back = BigInt::from_f64(d.hi).unwrap() + BigInt::from_f64(d.lo).unwrap();
        let resid = (&x - &back).to_f64().unwrap().abs();
        assert!(resid <= 16.0, "resid = {resid}");
    }
}
