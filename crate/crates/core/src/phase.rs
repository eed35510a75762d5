//! Phase and range literals: `3pi/2`, `-pi/4`, `2*pi`, `0.5`, `0:20:0.5`.

use std::f64::consts::PI;

use crate::{Error, Result};

fn number(field: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::invalid(field, format!("cannot parse `{s}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(field, format!("`{s}` is not finite")))
    }
}

/// Parses a real number or a rational multiple of π. The π form is
/// evaluated as `(sign·coefficient)·π / denominator` so that `pi`,
/// `pi/2` and `3pi/2` give the nearest doubles to the exact values.
pub fn parse_phase(field: &str, s: &str) -> Result<f64> {
    let t: String = s.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let Some(pos) = t.find("pi").or_else(|| t.find('π')) else {
        return number(field, &t);
    };
    let marker_len = if t[pos..].starts_with("pi") { 2 } else { 'π'.len_utf8() };
    let head = &t[..pos];
    let tail = &t[pos + marker_len..];
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => number(field, h)?,
    };
    let den = match tail {
        "" => 1.0,
        d => {
            let d = d
                .strip_prefix('/')
                .ok_or_else(|| Error::invalid(field, format!("cannot parse `{s}`")))?;
            let v = number(field, d)?;
            if v == 0.0 {
                return Err(Error::invalid(field, "division by zero"));
            }
            v
        }
    };
    Ok(coef * PI / den)
}

/// Serde helper accepting either a JSON number or a π literal string.
pub fn deserialize_angle<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Lit {
        Num(f64),
        Str(String),
    }
    match <Lit as serde::Deserialize>::deserialize(d)? {
        Lit::Num(v) => Ok(v),
        Lit::Str(s) => parse_phase("value", &s).map_err(serde::de::Error::custom),
    }
}

/// Parses `a:b:step` (inclusive of `b` up to rounding), a comma-separated
/// list, or a single value. Every element may be a π literal.
pub fn parse_range(field: &str, s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(field, format!("expected a:b:step, got `{s}`")));
        }
        let a = parse_phase(field, parts[0])?;
        let b = parse_phase(field, parts[1])?;
        let step = parse_phase(field, parts[2])?;
        if !(step > 0.0) || b < a {
            return Err(Error::invalid(field, format!("empty or reversed range `{s}`")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize + 1;
        if n > 10_000_000 {
            return Err(Error::invalid(field, format!("range `{s}` has too many points")));
        }
        return Ok((0..n).map(|i| a + i as f64 * step).collect());
    }
    t.split(',').map(|p| parse_phase(field, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_literals() {
        assert_eq!(parse_phase("p", "pi").unwrap(), PI);
        assert_eq!(parse_phase("p", "3pi/2").unwrap(), 3.0 * PI / 2.0);
        assert_eq!(parse_phase("p", "-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_phase("p", "2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_phase("p", "π/2").unwrap(), PI / 2.0);
        assert_eq!(parse_phase("p", " 0.25 ").unwrap(), 0.25);
        assert_eq!(parse_phase("p", "PI").unwrap(), PI);
    }

    #[test]
    fn bad_literals() {
        for s in ["", "pix", "pi/0", "abc", "2pi3", "inf"] {
            assert!(parse_phase("p", s).is_err(), "{s}");
        }
    }

    #[test]
    fn ranges() {
        let r = parse_range("db", "0:20:0.5").unwrap();
        assert_eq!(r.len(), 41);
        assert_eq!(r[30], 15.0);
        assert_eq!(parse_range("db", "15").unwrap(), vec![15.0]);
        assert_eq!(parse_range("phase", "0,pi").unwrap(), vec![0.0, PI]);
        assert_eq!(parse_range("phase", "0:2pi:pi/2").unwrap().len(), 5);
        assert!(parse_range("db", "5:0:1").is_err());
        assert!(parse_range("db", "0:5:0").is_err());
    }
}
