//! `min:max:count` range syntax. Numeric tokens may carry a `pi` suffix;
//! angle-valued quantities are always interpreted in units of pi (the suffix
//! is optional documentation), dimensionless quantities reject it.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum Unit {
    /// Values are multiples of pi; returned in radians.
    AngleInPi,
    /// Plain numbers; `pi` suffix is an error.
    Dimensionless,
}

fn parse_token(token: &str, unit: Unit) -> Result<f64, String> {
    let trimmed = token.trim();
    let (body, has_pi) = match trimmed.strip_suffix("pi") {
        Some(rest) => (rest.trim(), true),
        None => (trimmed, false),
    };
    let value: f64 = if body.is_empty() && has_pi {
        1.0
    } else {
        body.parse()
            .map_err(|_| format!("`{trimmed}` is not a number"))?
    };
    match unit {
        Unit::AngleInPi => Ok(value * PI),
        Unit::Dimensionless => {
            if has_pi {
                Err(format!("`{trimmed}`: pi suffix not allowed for a dimensionless value"))
            } else {
                Ok(value)
            }
        }
    }
}

/// Parse `min:max:count`.
pub fn parse_range(text: &str, unit: Unit) -> Result<RangeSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range `{text}` must be min:max:count"));
    }
    let min = parse_token(parts[0], unit)?;
    let max = parse_token(parts[1], unit)?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a count", parts[2]))?;
    if count < 2 {
        return Err(format!("range `{text}` needs at least 2 points"));
    }
    if !(min < max) {
        return Err(format!("range `{text}` needs min < max"));
    }
    Ok(RangeSpec { min, max, count })
}

/// Comma-separated list of angle values in units of pi; returns radians.
pub fn parse_phase_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| parse_token(t, Unit::AngleInPi))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_ranges_are_in_pi_units() {
        let r = parse_range("0:4pi:2000", Unit::AngleInPi).unwrap();
        assert_eq!(r.min, 0.0);
        assert!((r.max - 4.0 * PI).abs() < 1e-15);
        assert_eq!(r.count, 2000);
        // The suffix is optional for angles.
        let r2 = parse_range("0:4:2000", Unit::AngleInPi).unwrap();
        assert_eq!(r2.max, r.max);
    }

    #[test]
    fn dimensionless_rejects_pi() {
        assert!(parse_range("0.7:1.3:150", Unit::Dimensionless).is_ok());
        assert!(parse_range("0.7:1.3pi:150", Unit::Dimensionless).is_err());
    }

    #[test]
    fn bad_ranges_are_rejected() {
        assert!(parse_range("1:2", Unit::Dimensionless).is_err());
        assert!(parse_range("2:1:10", Unit::Dimensionless).is_err());
        assert!(parse_range("1:2:1", Unit::Dimensionless).is_err());
        assert!(parse_range("a:2:10", Unit::Dimensionless).is_err());
    }

    #[test]
    fn phase_lists() {
        let v = parse_phase_list("1.16,0.58").unwrap();
        assert!((v[0] - 1.16 * PI).abs() < 1e-15);
        assert!((v[1] - 0.58 * PI).abs() < 1e-15);
        assert!(parse_phase_list("1.16,x").is_err());
        // Bare `pi` counts as 1 pi.
        let v = parse_phase_list("pi").unwrap();
        assert!((v[0] - PI).abs() < 1e-15);
    }
}
