//! Slow, independent reference implementations for the integration tests.
//!
//! Everything here works in exact integer arithmetic (fixed point with
//! `FRAC_BITS` fractional bits, or exact rationals) and shares no code with
//! the library.

#![allow(dead_code)]

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const FRAC_BITS: u64 = 320;

fn one() -> BigInt {
    BigInt::one() << FRAC_BITS
}

/// `1/k` to fixed-point `atan` by its alternating Taylor series.
fn atan_inv(k: u64) -> BigInt {
    let k2 = BigInt::from(k * k);
    let mut power = one() / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * n + 1);
        if n.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    sum
}

/// Machin: pi = 16 atan(1/5) - 4 atan(1/239).
pub fn pi_fixed() -> BigInt {
    BigInt::from(16) * atan_inv(5) - BigInt::from(4) * atan_inv(239)
}

fn sqrt_2pi_fixed() -> &'static BigInt {
    static CELL: OnceLock<BigInt> = OnceLock::new();
    CELL.get_or_init(|| {
        let two_pi_scaled = (BigInt::from(2) * pi_fixed()) << FRAC_BITS;
        BigInt::from_biguint(Sign::Plus, two_pi_scaled.magnitude().sqrt())
    })
}

/// Exact fixed-point image of an f64 (truncated below 2^-FRAC_BITS).
pub fn to_fixed(x: f64) -> BigInt {
    assert!(x.is_finite());
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let mut m = BigInt::from(mantissa);
    let shift = exp + FRAC_BITS as i64;
    m = if shift >= 0 {
        m << shift as u64
    } else {
        m >> (-shift) as u64
    };
    if x < 0.0 {
        -m
    } else {
        m
    }
}

pub fn from_fixed(v: &BigInt) -> f64 {
    // split so huge and tiny magnitudes both convert exactly enough
    let int_part = v.abs() >> FRAC_BITS;
    let frac_part = v.abs() - (&int_part << FRAC_BITS);
    let f = int_part.to_f64().unwrap() + frac_part.to_f64().unwrap() / 2f64.powi(FRAC_BITS as i32);
    if v.is_negative() {
        -f
    } else {
        f
    }
}

/// Phi(x) in fixed point from the alternating power series
/// `1/2 + (1/sqrt(2 pi)) sum (-1)^n x^(2n+1) / (2^n n! (2n+1))`.
pub fn normal_cdf_fixed(x: f64) -> BigInt {
    let s = one();
    let xf = to_fixed(x);
    let x2 = (&xf * &xf) >> FRAC_BITS;
    let mut a = xf; // x^(2n+1) / (2^n n!)
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    loop {
        let term = &a / BigInt::from(2 * n + 1);
        if n.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        n += 1;
        a = (&a * &x2) >> FRAC_BITS;
        a /= BigInt::from(2 * n);
        if a.is_zero() {
            break;
        }
    }
    (&s >> 1u32) + ((sum << FRAC_BITS) / sqrt_2pi_fixed())
}

pub fn normal_cdf(x: f64) -> f64 {
    from_fixed(&normal_cdf_fixed(x))
}

/// Exact `P(X >= k)` for `X ~ Binomial(n, p0)`, with `p0` taken as the exact
/// dyadic rational of its f64 value.
pub fn binomial_upper_tail(n: u64, k: u64, p0: f64) -> f64 {
    assert!(p0 > 0.0 && p0 < 1.0);
    let (num, den_bits) = dyadic(p0);
    let q = (BigUint::one() << den_bits) - &num;
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    for j in 0..=n {
        if j >= k {
            total += &binom * num.pow(j as u32) * q.pow((n - j) as u32);
        }
        binom = binom * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    ratio_to_f64(&total, den_bits * n)
}

/// `x = num / 2^bits` exactly, with `bits` minimal.
fn dyadic(x: f64) -> (BigUint, u64) {
    let b = x.to_bits();
    let exp_bits = ((b >> 52) & 0x7ff) as i64;
    let frac = b & ((1u64 << 52) - 1);
    let (mut mantissa, mut exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    while mantissa % 2 == 0 && exp < 0 {
        mantissa /= 2;
        exp += 1;
    }
    assert!(exp < 0, "x < 1 has a negative binary exponent");
    (BigUint::from(mantissa), (-exp) as u64)
}

/// `num / 2^shift` rounded to f64 via the top 64 significant bits.
fn ratio_to_f64(num: &BigUint, shift: u64) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let len = num.bits();
    let keep = 64.min(len);
    let top = (num >> (len - keep)).to_u64().unwrap() as f64;
    let exp = len as i64 - keep as i64 - shift as i64;
    top * 2f64.powi(exp as i32)
}
