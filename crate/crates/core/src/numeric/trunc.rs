use thiserror::Error;

use super::ext::ExtFloat;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TruncError {
    #[error("mantissa width {0} outside 2..=53")]
    MantissaWidth(u32),
    #[error("exponent width {0} outside 2..=63")]
    ExponentWidth(u32),
    #[error("exponent {exponent} overflows a {bits}-bit field")]
    Overflow { exponent: i32, bits: u32 },
    #[error("exponent {exponent} underflows a {bits}-bit field")]
    Underflow { exponent: i32, bits: u32 },
    #[error("cannot encode a non-finite value")]
    NonFinite,
    #[error("bit string of width {0} does not match the format")]
    BadBits(u32),
}

/// Mantissa and exponent widths of a wire number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WireFormat {
    mantissa_bits: u32,
    exponent_bits: u32,
}

impl WireFormat {
    pub fn new(mantissa_bits: u32, exponent_bits: u32) -> Result<WireFormat, TruncError> {
        if !(2..=53).contains(&mantissa_bits) {
            return Err(TruncError::MantissaWidth(mantissa_bits));
        }
        if !(2..=63).contains(&exponent_bits) {
            return Err(TruncError::ExponentWidth(exponent_bits));
        }
        Ok(WireFormat { mantissa_bits, exponent_bits })
    }

    /// Exponent field sized for runs of up to `t_max` iterations:
    /// `ceil(log2(2 t_max)) + 2` bits.
    pub fn for_iterations(mantissa_bits: u32, t_max: u64) -> Result<WireFormat, TruncError> {
        WireFormat::new(mantissa_bits, exponent_bits_for(t_max))
    }

    pub fn mantissa_bits(self) -> u32 {
        self.mantissa_bits
    }

    pub fn exponent_bits(self) -> u32 {
        self.exponent_bits
    }

    /// Worst-case relative loss of one truncation, `2^(1-b)`.
    pub fn relative_error(self) -> f64 {
        (2.0f64).powi(1 - self.mantissa_bits as i32)
    }

    /// Width of any nonzero value in this format.
    pub fn value_bits(self) -> u32 {
        self.mantissa_bits + self.exponent_bits + 1
    }

    fn exponent_range(self) -> (i64, i64) {
        let half = 1i64 << (self.exponent_bits - 1);
        (-half, half - 1)
    }
}

pub fn exponent_bits_for(t_max: u64) -> u32 {
    let two_t = 2 * t_max.max(1);
    let ceil_log2 = 64 - (two_t - 1).leading_zeros();
    ceil_log2 + 2
}

/// `±(mantissa / 2^b) * 2^exponent`, with the mantissa's top bit set, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncatedReal {
    negative: bool,
    mantissa: u64,
    exponent: i32,
    format: WireFormat,
}

impl TruncatedReal {
    pub fn zero(format: WireFormat) -> TruncatedReal {
        TruncatedReal { negative: false, mantissa: 0, exponent: 0, format }
    }

    pub fn encode(x: f64, format: WireFormat) -> Result<TruncatedReal, TruncError> {
        if !x.is_finite() {
            return Err(TruncError::NonFinite);
        }
        TruncatedReal::encode_ext(ExtFloat::new(x), format)
    }

    /// Truncates toward zero after `b` significant bits.
    #[inline]
    pub fn encode_ext(x: ExtFloat, format: WireFormat) -> Result<TruncatedReal, TruncError> {
        if x.is_zero() {
            return Ok(TruncatedReal::zero(format));
        }
        let (m, e) = x.parts();
        let (lo, hi) = format.exponent_range();
        if (e as i64) > hi {
            return Err(TruncError::Overflow { exponent: e, bits: format.exponent_bits });
        }
        if (e as i64) < lo {
            return Err(TruncError::Underflow { exponent: e, bits: format.exponent_bits });
        }
        let significand = (m.to_bits() & ((1u64 << 52) - 1)) | (1u64 << 52);
        let mantissa = significand >> (53 - format.mantissa_bits);
        Ok(TruncatedReal { negative: m < 0.0, mantissa, exponent: e, format })
    }

    /// Like [`encode_ext`](Self::encode_ext) but maps exponent underflow to zero.
    #[inline]
    pub fn encode_flushing(x: ExtFloat, format: WireFormat) -> Result<TruncatedReal, TruncError> {
        match TruncatedReal::encode_ext(x, format) {
            Err(TruncError::Underflow { .. }) => Ok(TruncatedReal::zero(format)),
            other => other,
        }
    }

    /// Encodes `x * 2^scale`, flushing underflow to zero. Also returns the
    /// truncated value in the same scale, `x` with its low bits cleared.
    #[inline]
    pub fn encode_scaled(x: f64, scale: i32, format: WireFormat) -> Result<(TruncatedReal, f64), TruncError> {
        let bits = x.to_bits();
        let field = ((bits >> 52) & 0x7ff) as i32;
        if x == 0.0 {
            return Ok((TruncatedReal::zero(format), 0.0));
        }
        if field == 0 || field == 0x7ff {
            return Self::encode_scaled_slow(x, scale, format);
        }
        let e = field - 1022 + scale;
        let (lo, hi) = format.exponent_range();
        if (e as i64) > hi {
            return Err(TruncError::Overflow { exponent: e, bits: format.exponent_bits });
        }
        if (e as i64) < lo {
            return Ok((TruncatedReal::zero(format), 0.0));
        }
        let drop = 53 - format.mantissa_bits;
        let significand = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
        let t = TruncatedReal { negative: x < 0.0, mantissa: significand >> drop, exponent: e, format };
        Ok((t, f64::from_bits(bits & !((1u64 << drop) - 1))))
    }

    #[cold]
    fn encode_scaled_slow(x: f64, scale: i32, format: WireFormat) -> Result<(TruncatedReal, f64), TruncError> {
        if !x.is_finite() {
            return Err(TruncError::NonFinite);
        }
        let t = TruncatedReal::encode_flushing(ExtFloat::from_parts(x, scale), format)?;
        let (m, e) = t.raw();
        Ok((t, super::ext::ldexp(m, e - scale)))
    }

    pub fn decode(&self) -> f64 {
        self.decode_ext().to_f64()
    }

    #[inline]
    pub fn decode_ext(&self) -> ExtFloat {
        if self.mantissa == 0 {
            return ExtFloat::ZERO;
        }
        let m = self.mantissa as i64 as f64;
        let signed = if self.negative { -m } else { m };
        ExtFloat::from_parts(signed, self.exponent - self.format.mantissa_bits as i32)
    }

    /// `(m, e)` with value `m * 2^e` and `m` an integer-valued float.
    #[inline]
    pub(crate) fn raw(&self) -> (f64, i32) {
        let m = self.mantissa as i64 as f64;
        (if self.negative { -m } else { m }, self.exponent - self.format.mantissa_bits as i32)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn format(&self) -> WireFormat {
        self.format
    }

    #[inline]
    pub fn bit_width(&self) -> u32 {
        if self.is_zero() {
            1
        } else {
            self.format.value_bits()
        }
    }

    /// Serializes as zero flag, then sign, exponent (two's complement) and the
    /// mantissa without its implicit leading bit. Returns `(bits, width)` with
    /// the first field in the most significant position.
    pub fn to_bits(&self) -> (u128, u32) {
        if self.is_zero() {
            return (1, 1);
        }
        let eb = self.format.exponent_bits;
        let mb = self.format.mantissa_bits - 1;
        let exp_field = (self.exponent as i64 as u128) & ((1u128 << eb) - 1);
        let mant_field = (self.mantissa as u128) & ((1u128 << mb) - 1);
        let mut bits: u128 = 0;
        bits = (bits << 1) | self.negative as u128;
        bits = (bits << eb) | exp_field;
        bits = (bits << mb) | mant_field;
        (bits, self.bit_width())
    }

    pub fn from_bits(bits: u128, width: u32, format: WireFormat) -> Result<TruncatedReal, TruncError> {
        if width == 1 {
            return if bits == 1 { Ok(TruncatedReal::zero(format)) } else { Err(TruncError::BadBits(width)) };
        }
        if width != format.value_bits() || bits >> width != 0 {
            return Err(TruncError::BadBits(width));
        }
        let eb = format.exponent_bits;
        let mb = format.mantissa_bits - 1;
        let mant_field = (bits & ((1u128 << mb) - 1)) as u64;
        let exp_raw = ((bits >> mb) & ((1u128 << eb) - 1)) as i128;
        let exponent = if exp_raw >> (eb - 1) == 1 { exp_raw - (1i128 << eb) } else { exp_raw };
        let exponent = i32::try_from(exponent).map_err(|_| TruncError::BadBits(width))?;
        let negative = (bits >> (mb + eb)) & 1 == 1;
        Ok(TruncatedReal { negative, mantissa: mant_field | 1u64 << mb, exponent, format })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fmt(b: u32) -> WireFormat {
        WireFormat::new(b, 12).unwrap()
    }

    #[test]
    fn thirteen_at_three_bits() {
        assert_eq!(TruncatedReal::encode(13.0, fmt(3)).unwrap().decode(), 12.0);
        assert_eq!(TruncatedReal::encode(-13.0, fmt(3)).unwrap().decode(), -12.0);
    }

    #[test]
    fn zero_is_canonical() {
        for b in [2, 8, 53] {
            let z = TruncatedReal::encode(0.0, fmt(b)).unwrap();
            assert_eq!(z, TruncatedReal::zero(fmt(b)));
            assert_eq!(z.decode(), 0.0);
            assert_eq!(z.bit_width(), 1);
            assert_eq!(z.to_bits(), (1, 1));
        }
        assert_eq!(TruncatedReal::encode(-0.0, fmt(8)).unwrap(), TruncatedReal::zero(fmt(8)));
    }

    #[test]
    fn forty_bit_point_three() {
        let d = TruncatedReal::encode(0.3, fmt(40)).unwrap().decode();
        assert!(d <= 0.3);
        assert!(0.3 - d <= 2f64.powi(-39) * 0.3);
        // 0.3 = 0.0100110011...b; 40 significant bits of the exact expansion
        let exact = 5_404_319_552_844_595u64 as f64 / 2f64.powi(54);
        let reference = (exact * 2f64.powi(41)).floor() / 2f64.powi(41);
        assert_eq!(d, reference);
    }

    #[test]
    fn widths() {
        let f = WireFormat::for_iterations(16, 512).unwrap();
        assert_eq!(f.exponent_bits(), 12);
        assert_eq!(TruncatedReal::encode(1.5, f).unwrap().bit_width(), 29);
        assert_eq!(exponent_bits_for(1), 3);
        assert_eq!(exponent_bits_for(0), 3);
        assert_eq!(exponent_bits_for(3), 5);
    }

    #[test]
    fn default_width_fits_default_budget() {
        for log_n in 2u32..=20 {
            let b = 2 * log_n;
            let t_max = 1u64 << (3 * log_n);
            let f = WireFormat::for_iterations(b, t_max).unwrap();
            assert!(f.value_bits() <= 32 * log_n, "log n = {log_n}");
        }
    }

    #[test]
    fn range_errors() {
        let f = WireFormat::new(8, 4).unwrap();
        assert!(TruncatedReal::encode(127.0, f).is_ok());
        assert!(matches!(TruncatedReal::encode(256.0, f), Err(TruncError::Overflow { .. })));
        assert!(matches!(TruncatedReal::encode(2f64.powi(-10), f), Err(TruncError::Underflow { .. })));
        assert!(TruncatedReal::encode(2f64.powi(-9), f).is_ok());
        let flushed = TruncatedReal::encode_flushing(ExtFloat::new(1e-9), f).unwrap();
        assert!(flushed.is_zero());
        assert!(matches!(TruncatedReal::encode(f64::NAN, f), Err(TruncError::NonFinite)));
        assert!(WireFormat::new(1, 8).is_err());
        assert!(WireFormat::new(54, 8).is_err());
        assert!(WireFormat::new(8, 1).is_err());
        assert!(WireFormat::new(8, 64).is_err());
    }

    #[test]
    fn huge_exponents_via_ext() {
        let f = WireFormat::new(20, 16).unwrap();
        let big = ExtFloat::from_parts(0.75, 5000);
        let t = TruncatedReal::encode_ext(big, f).unwrap();
        assert_eq!(t.decode_ext(), big);
    }

    #[test]
    fn bits_reject_garbage() {
        let f = fmt(8);
        assert!(TruncatedReal::from_bits(0, 1, f).is_err());
        assert!(TruncatedReal::from_bits(0, 7, f).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20_000))]
        #[test]
        fn relative_error_bound(x in -1e12f64..1e12, b in 2u32..=53) {
            let f = WireFormat::new(b, 12).unwrap();
            let d = TruncatedReal::encode(x, f).unwrap().decode();
            prop_assert!((d - x).abs() <= f.relative_error() * x.abs());
            prop_assert!(d.abs() <= x.abs());
        }
    }

    proptest! {
        #[test]
        fn monotone(x in -1e6f64..1e6, y in -1e6f64..1e6, b in 2u32..=30) {
            let f = WireFormat::new(b, 12).unwrap();
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let a = TruncatedReal::encode(lo, f).unwrap().decode();
            let c = TruncatedReal::encode(hi, f).unwrap().decode();
            prop_assert!(a <= c);
        }

        #[test]
        fn idempotent(x in -1e6f64..1e6, b in 2u32..=53) {
            let f = WireFormat::new(b, 12).unwrap();
            let t = TruncatedReal::encode(x, f).unwrap();
            prop_assert_eq!(TruncatedReal::encode(t.decode(), f).unwrap(), t);
        }

        #[test]
        fn bits_round_trip(x in -1e6f64..1e6, b in 2u32..=53, e in 12u32..=63) {
            let f = WireFormat::new(b, e).unwrap();
            let t = TruncatedReal::encode(x, f).unwrap();
            let (bits, width) = t.to_bits();
            prop_assert_eq!(width, t.bit_width());
            prop_assert_eq!(TruncatedReal::from_bits(bits, width, f).unwrap(), t);
        }
    }
}
