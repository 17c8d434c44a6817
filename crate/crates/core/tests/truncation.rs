use congest_spectral::numeric::{TruncatedReal, WireFormat};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_value(rng: &mut ChaCha8Rng, max_exp: i32) -> f64 {
    let mant = 1.0 + (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let exp = (rng.next_u32() % (2 * max_exp as u32 + 1)) as i32 - max_exp;
    let sign = if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 };
    sign * mant * 2f64.powi(exp)
}

#[test]
fn million_values_respect_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (i, b) in [2u32, 8, 12, 20, 32, 53].into_iter().enumerate() {
        let f = WireFormat::for_iterations(b, 1 << 12).unwrap();
        let bound = 2f64.powi(1 - b as i32);
        let count = if i == 2 { 1_000_000 } else { 100_000 };
        for _ in 0..count {
            let x = random_value(&mut rng, 300);
            let t = TruncatedReal::encode(x, f).unwrap();
            let y = t.decode();
            assert!(((y - x) / x).abs() <= bound, "b = {b}, x = {x}, y = {y}");
            assert!(y.abs() <= x.abs() && y.signum() == x.signum());
            assert_eq!(TruncatedReal::encode(y, f).unwrap(), t);
            assert!(t.bit_width() <= f.value_bits());
        }
    }
}

#[test]
fn truncation_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = WireFormat::for_iterations(12, 1 << 10).unwrap();
    let mut xs: Vec<f64> = (0..200_000).map(|_| random_value(&mut rng, 40)).collect();
    xs.push(0.0);
    xs.sort_by(f64::total_cmp);
    let ys: Vec<f64> = xs.iter().map(|&x| TruncatedReal::encode(x, f).unwrap().decode()).collect();
    assert!(ys.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn bits_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let f = WireFormat::for_iterations(16, 1 << 8).unwrap();
    for _ in 0..100_000 {
        let t = TruncatedReal::encode(random_value(&mut rng, 200), f).unwrap();
        let (bits, width) = t.to_bits();
        assert_eq!(width, t.bit_width());
        assert_eq!(TruncatedReal::from_bits(bits, width, f).unwrap(), t);
    }
}
