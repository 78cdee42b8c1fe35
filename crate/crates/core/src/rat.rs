//! Arbitrary-precision rationals and small helpers shared across the crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational number in canonical reduced form, denominator >= 1.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Largest integer <= x.
pub fn rat_floor(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Smallest integer >= x.
pub fn rat_ceil(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// 2^e for a rational e, exact when e is an integer. Returns `(value, exact)`;
/// for fractional e the value is the smallest integer-exponent upper bound
/// 2^ceil(e), still a valid upper bound in every inequality we evaluate.
pub fn two_pow_bound(e: &Rat) -> (Rat, bool) {
    if e.is_integer() {
        (pow2_int(&e.to_integer()), true)
    } else {
        (pow2_int(&rat_ceil(e)), false)
    }
}

fn pow2_int(e: &BigInt) -> Rat {
    let two = Rat::from_integer(BigInt::from(2));
    let mut acc = Rat::one();
    let mut k = e.abs().to_string().parse::<u64>().expect("small exponent");
    let mut base = if e.is_negative() { two.recip() } else { two };
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

/// Floating-point approximation for report output; exact values stay rational.
pub fn rat_to_f64(x: &Rat) -> f64 {
    let num = x.numer();
    let den = x.denom();
    let nf = bigint_to_f64(num);
    let df = bigint_to_f64(den);
    nf / df
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// lcm of denominators of a slice of rationals (1 for the empty slice).
pub fn denominator_lcm(xs: &[Rat]) -> BigInt {
    let mut acc = BigInt::one();
    for x in xs {
        acc = num_integer::lcm(acc, x.denom().clone());
    }
    acc
}

pub fn is_zero_rat(x: &Rat) -> bool {
    x.is_zero()
}
