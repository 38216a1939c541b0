//! Floating-point views of large path counts.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Splits `x` into `(m, e)` with `x ≈ m · 2^e` and `m < 2^64`.
pub fn split(x: &BigUint) -> (f64, i64) {
    let bits = x.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (x >> shift as u64).to_u64().expect("top word fits in u64");
    (top as f64, shift)
}

/// `a / b` as a float, exact to a few ulps, without overflow.
pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    if b.is_zero() {
        return if a.is_zero() { f64::NAN } else { f64::INFINITY };
    }
    if a.is_zero() {
        return 0.0;
    }
    let (ma, ea) = split(a);
    let (mb, eb) = split(b);
    let e = (ea - eb).clamp(-2000, 2000) as i32;
    (ma / mb) * 2f64.powi(e)
}

/// Natural logarithm of a positive integer.
pub fn ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = split(x);
    m.ln() + e as f64 * std::f64::consts::LN_2
}

/// `x / λⁿ` computed in log space.
pub fn scaled(x: &BigUint, ln_lambda: f64, n: usize) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    (ln(x) - n as f64 * ln_lambda).exp()
}

pub fn to_f64(x: &BigUint) -> f64 {
    let (m, e) = split(x);
    m * 2f64.powi(e.min(2000) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn ratio_of_huge_numbers() {
        let a = BigUint::from(3u32).pow(1000);
        let b = BigUint::from(3u32).pow(999);
        assert!((ratio(&a, &b) - 3.0).abs() < 1e-14);
        assert!((ratio(&b, &a) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_scaling() {
        let a = BigUint::from(3u32).pow(500) * 7u32;
        assert!((scaled(&a, 3f64.ln(), 500) - 7.0).abs() < 1e-10);
        assert_eq!(ratio(&BigUint::zero(), &BigUint::one()), 0.0);
    }
}
