//! Bounded-precision numbers: an extended-range float for vertex-local state
//! and the truncated wire format that bounds message width.

mod ext;
mod trunc;

pub use ext::ExtFloat;
pub use trunc::{exponent_bits_for, TruncError, TruncatedReal, WireFormat};

/// Default mantissa width `2 ceil(log2 n) + 8`, capped at 53.
pub fn default_mantissa_bits(n: usize) -> u32 {
    (2 * ceil_log2(n) + 8).min(53)
}

/// `ceil(log2 n)`, with `ceil_log2(1) = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(default_mantissa_bits(16), 16);
        assert_eq!(default_mantissa_bits(1 << 30), 53);
    }
}
