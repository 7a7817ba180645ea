//! Exact rational arithmetic helpers shared by the parameter formulas and
//! the table emitters. All scheme rates, loads and fractions are kept as
//! `BigRational`; decimal rendering happens only at the output edge.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_u64(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Binomial coefficient as an unbounded integer.
pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Binomial coefficient fitting in u64, with an explicit overflow error.
pub fn binom_u64(n: u64, k: u64) -> crate::Result<u64> {
    binom_big(n, k)
        .to_u64()
        .ok_or(crate::Error::Overflow("binomial coefficient"))
}

pub fn binom_rat(n: u64, k: u64) -> Rat {
    Rat::from_integer(BigInt::from(binom_big(n, k)))
}

/// Render with `sig` significant digits, using fixed notation in a readable
/// range and scientific notation outside it. Display only; comparisons stay
/// exact.
pub fn to_sig_string(r: &Rat, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    if r.is_integer() && r.numer().abs() < BigInt::from(1_000_000) {
        return r.numer().to_string();
    }
    let x = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    if !x.is_finite() {
        // fall back through a quotient of leading digits
        return format!("{:.*e}", sig - 1, big_ratio_f64(r));
    }
    let ax = x.abs();
    if !(1e-4..1e6).contains(&ax) {
        format!("{:.*e}", sig - 1, x)
    } else {
        let digits_before = ax.log10().floor() as i32 + 1;
        let decimals = (sig as i32 - digits_before).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

fn big_ratio_f64(r: &Rat) -> f64 {
    // reduce magnitude by the denominator's bit length before converting
    let shift = r.denom().bits().saturating_sub(52);
    let n = r.numer() >> shift;
    let d = r.denom() >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Parse a printed decimal (optionally scientific, e.g. "7.36e5") to an
/// exact rational.
pub fn parse_decimal(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let neg = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let num: BigInt = digits.parse().ok()?;
    let num = if neg { -num } else { num };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rat::from_integer(num * ten.pow(scale as u32))
    } else {
        Rat::new(num, ten.pow((-scale) as u32))
    };
    Some(r)
}

/// One unit in the last place of a printed decimal, e.g. "0.0364" -> 10^-4.
pub fn printed_ulp(s: &str) -> Rat {
    let s = s.trim();
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (s, 0),
    };
    let decimals = mantissa
        .split_once('.')
        .map(|(_, f)| f.len() as i32)
        .unwrap_or(0);
    let scale = exp - decimals;
    let ten = BigInt::from(10);
    if scale >= 0 {
        Rat::from_integer(ten.pow(scale as u32))
    } else {
        Rat::new(BigInt::one(), ten.pow((-scale) as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom_u64(31, 25).unwrap(), 736_281);
        assert_eq!(binom_u64(25, 20).unwrap(), 53_130);
        assert_eq!(binom_u64(5, 0).unwrap(), 1);
        assert_eq!(binom_u64(5, 6).unwrap(), 0);
        // C(1225, 21) overflows u64 but not BigUint
        assert!(binom_u64(1225, 21).is_err());
        assert_eq!(binom_big(1225, 21).to_string().len(), 46);
    }

    #[test]
    fn sig_rendering() {
        assert_eq!(to_sig_string(&rat(1, 1), 3), "1");
        assert_eq!(to_sig_string(&rat(2, 31), 3), "0.0645");
        assert_eq!(to_sig_string(&rat(5, 6), 3), "0.833");
        assert_eq!(to_sig_string(&rat(736_281, 1), 3), "736281");
        assert_eq!(to_sig_string(&rat(264_385_836, 1), 3), "2.64e8");
    }

    #[test]
    fn printed_roundtrip() {
        assert_eq!(parse_decimal("0.324").unwrap(), rat(324, 1000));
        assert_eq!(parse_decimal("7.36e5").unwrap(), rat(736_000, 1));
        assert_eq!(printed_ulp("0.0364"), rat(1, 10_000));
        assert_eq!(printed_ulp("0.13"), rat(1, 100));
        assert_eq!(printed_ulp("1.17e45"), parse_decimal("1e43").unwrap());
    }
}
