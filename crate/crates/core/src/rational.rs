//! Exact rationals and their `"p/q"` string form.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact rational used for discriminants and thresholds.
pub type Rational = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Formats as `"p/q"`, always with an explicit denominator.
pub fn to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => s.parse::<i64>().map(int).map_err(|_| bad()),
    }
}

pub fn floor(r: &Rational) -> i64 {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> i64 {
    r.ceil().to_integer()
}

/// Serde adapter: `Rational` as a `"p/q"` string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a closed interval `[lo, hi]` of rationals.
pub mod serde_interval {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
        [super::to_string(&r.0), super::to_string(&r.1)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rational, Rational), D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = super::parse(&lo).map_err(serde::de::Error::custom)?;
        let hi = super::parse(&hi).map_err(serde::de::Error::custom)?;
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse("3").unwrap(), int(3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn display_keeps_denominator() {
        assert_eq!(to_string(&int(2)), "2/1");
        assert_eq!(to_string(&rat(-1, 4)), "-1/4");
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(floor(&rat(-1, 2)), -1);
        assert_eq!(ceil(&rat(-1, 2)), 0);
        assert_eq!(ceil(&rat(3, 2)), 2);
    }
}
