//! Standard normal density, distribution and quantile functions, plus exact
//! binomial tails.
//!
//! The upper tail `Q(x) = 1 - Φ(x)` is the primitive everything else is built
//! on:
//!
//! * `0 <= x <= 2.5`: `Q(x) = 1/2 - φ(x)·S(x)` with the all-positive series
//!   `S(x) = x + x³/3 + x⁵/(3·5) + …` (Marsaglia 2004). No cancellation occurs
//!   inside the series; the final subtraction loses at most two digits, and
//!   the absolute error stays below 1e-15.
//! * `x > 2.5`: `Q(x) = φ(x)·R(x)` where `R` is the Mills ratio evaluated by
//!   the Laplace continued fraction `1/(x+1/(x+2/(x+3/(x+…))))` with the
//!   modified Lentz algorithm. Relative error stays near machine epsilon,
//!   which keeps far-tail quantiles accurate.
//! * `x < 0`: `Q(x) = 1 - Q(-x)`.
//!
//! Measured against a 256-bit fixed-point series in the test suite, the
//! absolute error of `std_normal_cdf` on [-8, 8] is below 1e-15, an order of
//! magnitude inside the 1e-12 contract.

use crate::error::{Error, Result};
use crate::types::{Probability, ZScore};

/// 1/sqrt(2π).
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

const SERIES_LIMIT: f64 = 2.5;
const LENTZ_MAX_ITER: usize = 500;
const TINY: f64 = 1e-300;

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Upper tail probability `1 - Φ(x)`. Accepts ±∞.
pub fn upper_tail(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 1.0 - upper_tail(-x);
    }
    if x <= SERIES_LIMIT {
        0.5 - pdf(x) * positive_series(x)
    } else if x < 40.0 {
        pdf(x) * mills_ratio_cf(x)
    } else {
        0.0
    }
}

/// Standard normal CDF on raw floats. Accepts ±∞.
pub fn cdf(x: f64) -> f64 {
    upper_tail(-x)
}

// x + x^3/3 + x^5/(3*5) + ...
fn positive_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        k += 2.0;
        term *= x2 / k;
        sum += term;
    }
    sum
}

// Q(x)/φ(x) for x > 0 via modified Lentz.
fn mills_ratio_cf(x: f64) -> f64 {
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..LENTZ_MAX_ITER {
        let a = n as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Inverse CDF on raw floats for `p` in (0, 1); NaN outside.
///
/// Starts from Acklam's rational approximation (relative error 1.15e-9)
/// and applies two Newton steps against [`cdf`]. The lower half is solved
/// directly so that tail probabilities keep full relative precision; the
/// upper half uses `1 - p`, which is exact for `p >= 0.5`.
pub fn quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        return -lower_quantile(1.0 - p);
    }
    lower_quantile(p)
}

fn lower_quantile(p: f64) -> f64 {
    let mut x = acklam(p);
    for _ in 0..2 {
        let density = pdf(x);
        if density == 0.0 {
            break;
        }
        x -= (cdf(x) - p) / density;
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Standard normal density at `x`.
pub fn std_normal_pdf(x: ZScore) -> f64 {
    pdf(x.value())
}

/// Φ(x). The result lies in the closed unit interval; it reaches 0 or 1
/// only where the true value underflows double precision.
pub fn std_normal_cdf(x: ZScore) -> Probability {
    Probability::clamp_closed(cdf(x.value()))
}

/// Φ⁻¹(p).
pub fn std_normal_quantile(p: Probability) -> Result<ZScore> {
    if !p.is_interior() {
        return Err(Error::OutOfDomain {
            what: "quantile probability",
            value: p.value(),
            domain: "(0, 1)",
        });
    }
    ZScore::new(quantile(p.value()))
}

/// `P(X >= k)` for `X ~ Binomial(n, p0)`.
///
/// Terms are generated in log space outward from the mode with the ratio
/// `pmf(j+1)/pmf(j) = (n-j)/(j+1) · p0/(1-p0)`, so the largest term is
/// `exp(0)` and nothing overflows. Both the tail and the total are summed
/// against that reference and divided, which removes the need for the
/// normalising binomial coefficient.
pub fn binomial_tail(n: u64, k: u64, p0: Probability) -> Result<Probability> {
    if n == 0 {
        return Err(Error::InvalidCounts("n must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidCounts(format!("k = {k} exceeds n = {n}")));
    }
    if !p0.is_interior() {
        return Err(Error::OutOfDomain {
            what: "p0",
            value: p0.value(),
            domain: "(0, 1)",
        });
    }
    if k == 0 {
        return Probability::closed(1.0);
    }

    let p = p0.value();
    let log_odds = p.ln() - (-p).ln_1p();
    let nf = n as f64;
    let mode = (((n + 1) as f64 * p).floor() as u64).min(n);
    // exp() underflows well before this
    const CUTOFF: f64 = -760.0;

    let mut total = 1.0;
    let mut tail = if mode >= k { 1.0 } else { 0.0 };

    let mut log_term = 0.0;
    let mut j = mode;
    while j < n {
        let jf = j as f64;
        log_term += ((nf - jf) / (jf + 1.0)).ln() + log_odds;
        j += 1;
        if log_term < CUTOFF {
            break;
        }
        let term = log_term.exp();
        total += term;
        if j >= k {
            tail += term;
        }
    }

    log_term = 0.0;
    j = mode;
    while j > 0 {
        let jf = j as f64;
        log_term -= ((nf - jf + 1.0) / jf).ln() + log_odds;
        j -= 1;
        if log_term < CUTOFF {
            break;
        }
        let term = log_term.exp();
        total += term;
        if j >= k {
            tail += term;
        }
    }

    Probability::closed((tail / total).min(1.0))
}
