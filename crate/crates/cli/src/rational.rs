//! Flag values written as rationals (`2/3`) or decimals, kept alongside the
//! double they round to.

use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub text: String,
    pub value: f64,
}

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let value = match t.split_once('/') {
            Some((num, den)) => {
                let n: i64 = num
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad numerator in '{t}'"))?;
                let d: i64 = den
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad denominator in '{t}'"))?;
                if d == 0 {
                    return Err(format!("zero denominator in '{t}'"));
                }
                // both operands are exact below 2^53, so the quotient is the nearest double
                if n.unsigned_abs() > 1 << 53 || d.unsigned_abs() > 1 << 53 {
                    return Err(format!("'{t}' exceeds exact integer range"));
                }
                n as f64 / d as f64
            }
            None => t
                .parse::<f64>()
                .map_err(|_| format!("'{t}' is not a number"))?,
        };
        if !value.is_finite() {
            return Err(format!("'{t}' is not finite"));
        }
        Ok(Self {
            text: t.to_string(),
            value,
        })
    }
}

/// Comma-separated list of rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalList(pub Vec<Rational>);

impl FromStr for RationalList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self(items))
    }
}

impl RationalList {
    pub fn texts(&self) -> Vec<&str> {
        self.0.iter().map(|r| r.text.as_str()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|r| r.value).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let r: Rational = "2/3".parse().unwrap();
        assert_eq!(r.value, 2.0 / 3.0);
        assert_eq!(r.text, "2/3");
        assert_eq!("0.25".parse::<Rational>().unwrap().value, 0.25);
        assert_eq!("-1/4".parse::<Rational>().unwrap().value, -0.25);
        for bad in ["1/0", "a/2", "x", "inf", "1/2/3"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_lists() {
        let l: RationalList = "2/3,1/3,0".parse().unwrap();
        assert_eq!(l.texts(), ["2/3", "1/3", "0"]);
        assert_eq!(l.values(), [2.0 / 3.0, 1.0 / 3.0, 0.0]);
        assert!("1/2,,1/2".parse::<RationalList>().is_err());
    }
}
