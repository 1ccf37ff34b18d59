//! Exact rationals and the distance values shared by all metric carriers.
//!
//! All counting metrics (Hamming, rank, the wreath metric over a rational
//! base) are exact. Only the unitary carrier produces floating distances.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::ops::{Add, Mul};

use crate::Error;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_from_str(s: &str) -> crate::Result<Rational> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Config(format!("bad rational component {t:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Config(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

/// Serde adapter keeping rationals as `"p/q"` strings in every JSON document.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rat_from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// A measured distance: exact when the carrier metric is rational,
/// floating for the unitary carrier. Sums stay exact as long as every
/// summand is exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Dist {
    Exact(Rational),
    Approx(f64),
}

impl Dist {
    pub fn zero() -> Self {
        Dist::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Dist::Exact(Rational::one())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Dist::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Dist::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Dist::Exact(r) => Some(r),
            Dist::Approx(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Dist::Exact(r) => r.is_zero(),
            Dist::Approx(x) => *x == 0.0,
        }
    }

    pub fn scale(&self, factor: &Rational) -> Dist {
        match self {
            Dist::Exact(r) => Dist::Exact(r * factor),
            Dist::Approx(x) => Dist::Approx(x * factor.to_f64().unwrap()),
        }
    }

    pub fn abs_diff(&self, other: &Dist) -> f64 {
        (self.to_f64() - other.to_f64()).abs()
    }
}

impl Add for Dist {
    type Output = Dist;
    fn add(self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Exact(a), Dist::Exact(b)) => Dist::Exact(a + b),
            (a, b) => Dist::Approx(a.to_f64() + b.to_f64()),
        }
    }
}

impl Mul for Dist {
    type Output = Dist;
    fn mul(self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Exact(a), Dist::Exact(b)) => Dist::Exact(a * b),
            (a, b) => Dist::Approx(a.to_f64() * b.to_f64()),
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Dist) -> Option<Ordering> {
        match (self, other) {
            (Dist::Exact(a), Dist::Exact(b)) => a.partial_cmp(b),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Dist::Exact(r) => s.serialize_str(&rat_to_string(r)),
            Dist::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Dist, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            F(f64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => rat_from_str(&s).map(Dist::Exact).map_err(serde::de::Error::custom),
            Raw::F(x) => Ok(Dist::Approx(x)),
        }
    }
}

/// Normalizes a signed rational into lowest terms with a positive denominator;
/// `BigRational::new` already does this, the helper exists for doc clarity.
pub fn normalized(num: BigInt, den: BigInt) -> crate::Result<Rational> {
    if den.is_zero() {
        return Err(Error::Config("zero denominator".into()));
    }
    let r = BigRational::new(num, den);
    debug_assert!(r.denom().is_positive());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let r = rat_from_str("3/6").unwrap();
        assert_eq!(r, rat(1, 2));
        assert_eq!(rat_to_string(&r), "1/2");
        assert_eq!(rat_from_str("-4/2").unwrap(), rat(-2, 1));
        assert_eq!(rat_from_str("7").unwrap(), rat(7, 1));
        assert!(rat_from_str("1/0").is_err());
    }

    #[test]
    fn dist_arithmetic_stays_exact() {
        let d = Dist::Exact(rat(1, 3)) + Dist::Exact(rat(1, 6));
        assert_eq!(d, Dist::Exact(rat(1, 2)));
        let mixed = Dist::Exact(rat(1, 2)) + Dist::Approx(0.25);
        assert!(matches!(mixed, Dist::Approx(x) if (x - 0.75).abs() < 1e-15));
    }

    #[test]
    fn dist_ordering() {
        assert!(Dist::Exact(rat(1, 3)) < Dist::Exact(rat(1, 2)));
        assert!(Dist::Approx(0.4) > Dist::Exact(rat(1, 3)));
    }
}
