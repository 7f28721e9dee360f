//! Decimal rendering for exact rationals and floats.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Renders `x` in plain decimal notation rounded (half away from zero) to
/// `sig` significant digits, with trailing zeros removed.
pub fn decimal_sig(x: &BigRational, sig: usize) -> String {
    assert!(sig > 0, "need at least one significant digit");
    if x.is_zero() {
        return "0".to_string();
    }
    let negative = x.is_negative();
    let a = x.abs();
    let ten = BigInt::from(10);

    // exponent e with 10^e ≤ a < 10^(e+1)
    let mut e: i64 = (a.numer().to_string().len() as i64) - (a.denom().to_string().len() as i64);
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(ten.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), ten.pow((-k) as u32))
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }

    let shift = sig as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut digits = if BigInt::from(2) * r >= *scaled.denom() { q + 1 } else { q };
    let mut shift = shift;
    if digits == ten.pow(sig as u32) {
        digits /= 10;
        shift -= 1;
    }

    let mut s = digits.to_string();
    let body = if shift <= 0 {
        s.push_str(&"0".repeat((-shift) as usize));
        s
    } else {
        let shift = shift as usize;
        if s.len() <= shift {
            let pad = "0".repeat(shift - s.len());
            format!("0.{pad}{s}")
        } else {
            let split = s.len() - shift;
            format!("{}.{}", &s[..split], &s[split..])
        }
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Float counterpart of [`decimal_sig`]; the float is converted exactly first.
pub fn decimal_sig_f64(x: f64, sig: usize) -> String {
    match BigRational::from_float(x) {
        Some(r) => decimal_sig(&r, sig),
        None => x.to_string(),
    }
}
