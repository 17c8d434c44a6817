use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// A float with an extended exponent, `mant * 2^(512 chunk)` with `|mant|`
/// in `[2^-256, 2^256)`, or zero. Power iteration over tens of thousands of
/// steps leaves the `f64` exponent range, so vertex-local vectors are held in
/// this form. The representation of every value is unique.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtFloat {
    mant: f64,
    chunk: i32,
}

const EXP_MASK: u64 = 0x7ff << 52;
const CHUNK: i32 = 512;

#[inline]
fn pow2(e: i32) -> f64 {
    f64::from_bits(((e + 1023) as u64) << 52)
}

#[inline]
fn biased_exponent(x: f64) -> i32 {
    ((x.to_bits() & EXP_MASK) >> 52) as i32
}

/// Splits a finite `x` into `(m, e)` with `x = m * 2^e`, `|m|` in `[0.5, 1)`.
#[inline]
pub(crate) fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let field = biased_exponent(x);
    if field == 0 {
        return frexp_subnormal(x);
    }
    let m = f64::from_bits((x.to_bits() & !EXP_MASK) | (1022u64 << 52));
    (m, field - 1022)
}

#[cold]
fn frexp_subnormal(x: f64) -> (f64, i32) {
    let y = x * pow2(64);
    let m = f64::from_bits((y.to_bits() & !EXP_MASK) | (1022u64 << 52));
    (m, biased_exponent(y) - 1022 - 64)
}

/// `x * 2^e`, saturating to zero or infinity.
#[inline]
pub(crate) fn ldexp(x: f64, e: i32) -> f64 {
    if (-1000..=1000).contains(&e) {
        return x * pow2(e);
    }
    ldexp_far(x, e)
}

#[cold]
fn ldexp_far(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= pow2(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= pow2(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(e)
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { mant: 0.0, chunk: 0 };
    pub const ONE: ExtFloat = ExtFloat { mant: 1.0, chunk: 0 };

    /// Brings a finite, normal-range `m` back into the canonical window.
    #[inline]
    fn canon(m: f64, chunk: i32) -> ExtFloat {
        if m == 0.0 {
            return ExtFloat::ZERO;
        }
        let e = biased_exponent(m) - 1023;
        if (-256..256).contains(&e) {
            ExtFloat { mant: m, chunk }
        } else if e >= 256 {
            ExtFloat { mant: m * pow2(-CHUNK), chunk: chunk + 1 }
        } else {
            ExtFloat { mant: m * pow2(CHUNK), chunk: chunk - 1 }
        }
    }

    #[inline]
    pub fn new(x: f64) -> ExtFloat {
        assert!(x.is_finite(), "ExtFloat from non-finite value");
        ExtFloat::from_parts(x, 0)
    }

    /// `m * 2^e` for arbitrary finite `m`.
    #[inline]
    pub fn from_parts(m: f64, e: i32) -> ExtFloat {
        let (mant, de) = frexp(m);
        if mant == 0.0 {
            return ExtFloat::ZERO;
        }
        let e = e + de;
        let chunk = (e + CHUNK / 2).div_euclid(CHUNK);
        ExtFloat::canon(mant * pow2(e - chunk * CHUNK), chunk)
    }

    /// `(mantissa, exponent)` with mantissa in `±[0.5, 1)` or zero.
    #[inline]
    pub fn parts(self) -> (f64, i32) {
        if self.is_zero() {
            return (0.0, 0);
        }
        let (m, e) = frexp(self.mant);
        (m, e + self.chunk * CHUNK)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        match self.chunk {
            0 => self.mant,
            c if c > 2 => self.mant.signum() * f64::INFINITY,
            c if c < -2 => self.mant.signum() * 0.0,
            c => ldexp(self.mant, c * CHUNK),
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.mant == 0.0
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.mant < 0.0
    }

    #[inline]
    pub fn abs(self) -> ExtFloat {
        ExtFloat { mant: self.mant.abs(), chunk: self.chunk }
    }

    pub fn mul_f64(self, w: f64) -> ExtFloat {
        self * ExtFloat::new(w)
    }

    pub fn sqrt(self) -> ExtFloat {
        assert!(self.mant >= 0.0, "sqrt of negative ExtFloat");
        if self.is_zero() {
            return self;
        }
        if self.chunk % 2 == 0 {
            ExtFloat::canon(self.mant.sqrt(), self.chunk / 2)
        } else {
            ExtFloat::canon((self.mant * pow2(CHUNK)).sqrt(), (self.chunk - 1) / 2)
        }
    }

    pub fn powi(self, k: u32) -> ExtFloat {
        let mut acc = ExtFloat::ONE;
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }

    /// Ratio of two values as `f64`, without overflow in either operand.
    pub fn ratio(self, other: ExtFloat) -> f64 {
        (self / other).to_f64()
    }
}

impl Default for ExtFloat {
    fn default() -> Self {
        ExtFloat::ZERO
    }
}

impl From<f64> for ExtFloat {
    fn from(x: f64) -> Self {
        ExtFloat::new(x)
    }
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, e) = self.parts();
        write!(f, "{m}*2^{e}")
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v != 0.0 && v.is_finite() || self.is_zero() {
            write!(f, "{v}")
        } else {
            write!(f, "{self:?}")
        }
    }
}

impl Add for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn add(self, rhs: ExtFloat) -> ExtFloat {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        match self.chunk - rhs.chunk {
            0 => ExtFloat::canon(self.mant + rhs.mant, self.chunk),
            1 => ExtFloat::canon(self.mant + rhs.mant * pow2(-CHUNK), self.chunk),
            -1 => ExtFloat::canon(self.mant * pow2(-CHUNK) + rhs.mant, rhs.chunk),
            d if d > 0 => self,
            _ => rhs,
        }
    }
}

impl AddAssign for ExtFloat {
    #[inline]
    fn add_assign(&mut self, rhs: ExtFloat) {
        *self = *self + rhs;
    }
}

impl Neg for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn neg(self) -> ExtFloat {
        ExtFloat { mant: -self.mant, chunk: self.chunk }
    }
}

impl Sub for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn sub(self, rhs: ExtFloat) -> ExtFloat {
        self + (-rhs)
    }
}

impl Mul for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn mul(self, rhs: ExtFloat) -> ExtFloat {
        if self.is_zero() || rhs.is_zero() {
            return ExtFloat::ZERO;
        }
        ExtFloat::canon(self.mant * rhs.mant, self.chunk + rhs.chunk)
    }
}

impl Div for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn div(self, rhs: ExtFloat) -> ExtFloat {
        assert!(!rhs.is_zero(), "ExtFloat division by zero");
        if self.is_zero() {
            return ExtFloat::ZERO;
        }
        ExtFloat::canon(self.mant / rhs.mant, self.chunk - rhs.chunk)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &ExtFloat) -> Option<Ordering> {
        let d = *self - *other;
        if d.is_zero() {
            Some(Ordering::Equal)
        } else if d.is_sign_negative() {
            Some(Ordering::Less)
        } else {
            Some(Ordering::Greater)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frexp_ldexp_basics() {
        assert_eq!(frexp(8.0), (0.5, 4));
        assert_eq!(frexp(-0.75), (-0.75, 0));
        let tiny = f64::MIN_POSITIVE / 8.0;
        let (m, e) = frexp(tiny);
        assert_eq!(ldexp(m, e), tiny);
        assert_eq!(ldexp(0.5, 2000), f64::INFINITY);
        assert_eq!(ldexp(0.5, -2000), 0.0);
        assert_eq!(ldexp(0.5, -1073), f64::from_bits(1));
    }

    #[test]
    fn survives_f64_range() {
        let mut x = ExtFloat::new(3.0);
        for _ in 0..2000 {
            x = x * ExtFloat::new(3.0);
        }
        assert!(x.to_f64().is_infinite());
        let mut y = x;
        for _ in 0..2000 {
            y = y / ExtFloat::new(3.0);
        }
        assert!((y.to_f64() - 3.0).abs() < 1e-9);
        assert!((x.ratio(x * ExtFloat::new(2.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sqrt_and_order() {
        assert_eq!(ExtFloat::new(16.0).sqrt().to_f64(), 4.0);
        assert!((ExtFloat::new(2.0).sqrt().to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!(ExtFloat::new(-1.0) < ExtFloat::new(0.5));
        assert!(ExtFloat::new(1e300).powi(3) > ExtFloat::new(1e300));
        assert_eq!(ExtFloat::new(0.0), ExtFloat::ZERO);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let (x, y) = (ExtFloat::new(a), ExtFloat::new(b));
            let tol = 1e-12 * (a.abs() + b.abs()).max(1e-300);
            prop_assert!(((x + y).to_f64() - (a + b)).abs() <= tol);
            prop_assert!(((x - y).to_f64() - (a - b)).abs() <= tol);
            prop_assert!(((x * y).to_f64() - a * b).abs() <= 1e-15 * (a * b).abs());
            prop_assert_eq!(x < y, a < b);
        }
    }
}
