//! Exact rational scalars.
//!
//! [`Rational`] is GMP's `mpq_t` (always canonical: lowest terms, positive
//! denominator). This module adds the textual `"a/b"` form used by every file
//! format, plus a few conversions shared by the exact modules.

use rug::{Float, Integer};

use crate::error::{Error, Result};

pub use rug::Rational;

/// Formats as `numerator/denominator`, always with the slash (`"3/1"`, `"0/1"`).
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"`, a bare integer, or a finite decimal such as `"0.8"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let err = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    if let Some((num, den)) = t.split_once('/') {
        let num: Integer = num.trim().parse().map_err(|_| err())?;
        let den: Integer = den.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        return Ok(Rational::from((num, den)));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let int_val: Integer = if int_digits.is_empty() {
            Integer::new()
        } else {
            int_digits.parse().map_err(|_| err())?
        };
        let frac_val: Integer = frac_part.parse().map_err(|_| err())?;
        let scale = Integer::from(Integer::u_pow_u(10, frac_part.len() as u32));
        let mut r = Rational::from((int_val * &scale + frac_val, scale));
        if negative {
            r = -r;
        }
        return Ok(r);
    }
    let i: Integer = t.parse().map_err(|_| err())?;
    Ok(Rational::from(i))
}

/// Decimal rendering with `digits` significant digits, for plotting columns.
pub fn to_decimal_string(r: &Rational, digits: usize) -> String {
    let prec = ((digits as f64) * 3.33).ceil() as u32 + 16;
    let f = Float::with_val(prec, r);
    if f.is_zero() {
        return "0".to_string();
    }
    f.to_string_radix(10, Some(digits.max(1)))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64()
}

/// Checks `0 <= p <= 1`.
pub fn check_probability(name: &'static str, p: &Rational) -> Result<()> {
    if *p < 0 || *p > 1 {
        return Err(Error::param(
            name,
            format!("{} is outside [0, 1]", to_fraction_string(p)),
        ));
    }
    Ok(())
}

pub(crate) mod serde_fraction {
    use super::{parse_rational, to_fraction_string, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

pub(crate) mod serde_fraction_opt {
    use super::{parse_rational, to_fraction_string, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&to_fraction_string(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(D::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_string_always_has_slash() {
        assert_eq!(to_fraction_string(&Rational::from(3)), "3/1");
        assert_eq!(to_fraction_string(&Rational::new()), "0/1");
        assert_eq!(to_fraction_string(&Rational::from((-6, 8))), "-3/4");
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("4/5").unwrap(), Rational::from((4, 5)));
        assert_eq!(parse_rational(" 2 / 4 ").unwrap(), Rational::from((1, 2)));
        assert_eq!(parse_rational("0.8").unwrap(), Rational::from((4, 5)));
        assert_eq!(parse_rational("-.25").unwrap(), Rational::from((-1, 4)));
        assert_eq!(parse_rational("7").unwrap(), Rational::from(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal_string(&Rational::from((1, 2)), 3), "5.00e-1");
        assert_eq!(to_decimal_string(&Rational::new(), 5), "0");
    }
}
