//! Exponential integral and harmonic numbers.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument `E1` is summed as a power series, above it the
/// continued fraction converges quickly.
const SERIES_CUTOFF: f64 = 1.0;

/// `Ei(x) = ∫_{-∞}^{x} e^t / t dt` for `x < 0`.
///
/// Only negative arguments are accepted, where `Ei(x) = -E1(-x)`.
pub fn exponential_integral(x: f64) -> Result<f64> {
    if !(x < 0.0) {
        return Err(Error::DomainError(x));
    }
    let z = -x;
    if z > 740.0 {
        // e^{-z} underflows; the value is a negative subnormal or zero.
        return Ok(-0.0);
    }
    Ok(-e1(z))
}

/// `E1(z)` for `z > 0`.
fn e1(z: f64) -> f64 {
    if z <= SERIES_CUTOFF {
        e1_series(z)
    } else {
        (-z).exp() * e1_continued_fraction(z)
    }
}

/// `e^z E1(z)` for `z > 0`, without overflow for large `z`.
pub fn scaled_e1(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z <= SERIES_CUTOFF {
        z.exp() * e1_series(z)
    } else {
        e1_continued_fraction(z)
    }
}

fn e1_series(z: f64) -> f64 {
    // E1(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k k!)
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= -z / k;
        let contrib = term / k;
        sum += contrib;
        if contrib.abs() < f64::EPSILON * sum.abs() * 0.1 {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Modified Lentz evaluation of
/// `e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...)))`.
fn e1_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `H_n = Σ_{i=1}^{n} 1/i`, with `H_0 = 0`.
pub fn harmonic_number(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}
