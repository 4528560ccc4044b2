//! Parsing of numbers with unit suffixes and of `a:step:b` ranges.

use crate::error::CliError;

const PRESSURE: &[(&str, f64)] = &[("gpa", 1e9), ("mpa", 1e6), ("kpa", 1e3), ("pa", 1.0)];
const LENGTH: &[(&str, f64)] = &[("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("m", 1.0)];
const FORCE: &[(&str, f64)] = &[("mn", 1e-3), ("kn", 1e3), ("n", 1.0)];

fn parse_scaled(field: &str, raw: &str, units: &[(&str, f64)]) -> Result<f64, CliError> {
    let lower = raw.trim().to_ascii_lowercase();
    for (suffix, factor) in units {
        if let Some(number) = lower.strip_suffix(suffix) {
            // "1e-3m" must not be read as "1e-3" + "m" when the unit list has "mm"
            if let Ok(v) = number.trim().parse::<f64>() {
                return Ok(v * factor);
            }
        }
    }
    lower
        .parse::<f64>()
        .map_err(|_| CliError::usage(field, format!("cannot parse '{raw}' as a number")))
}

pub fn pressure(field: &str, raw: &str) -> Result<f64, CliError> {
    parse_scaled(field, raw, PRESSURE)
}

pub fn length(field: &str, raw: &str) -> Result<f64, CliError> {
    parse_scaled(field, raw, LENGTH)
}

pub fn force(field: &str, raw: &str) -> Result<f64, CliError> {
    parse_scaled(field, raw, FORCE)
}

pub fn plain(field: &str, raw: &str) -> Result<f64, CliError> {
    parse_scaled(field, raw, &[])
}

/// `a:step:b` (inclusive), a comma-separated list, or a single value.
pub fn range(field: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = raw.split(':').collect();
    let values = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|v| plain(field, v))
            .collect::<Result<Vec<_>, _>>()?,
        [a, step, b] => {
            let (a, step, b) = (plain(field, a)?, plain(field, step)?, plain(field, b)?);
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(CliError::usage(
                    field,
                    format!("range '{raw}' needs a positive step and start <= end"),
                ));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            if n > 1_000_000 {
                return Err(CliError::usage(field, format!("range '{raw}' has {n} points")));
            }
            (0..n).map(|i| a + step * i as f64).collect()
        }
        _ => {
            return Err(CliError::usage(
                field,
                format!("expected 'start:step:end', a list or a number, got '{raw}'"),
            ))
        }
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::usage(field, format!("'{raw}' contains non-finite values")));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::usage(field, format!("values in '{raw}' must be increasing")));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(pressure("mu", "0.25MPa").unwrap(), 0.25e6);
        assert_eq!(pressure("mu", "250 kpa").unwrap(), 250e3);
        assert_eq!(pressure("mu", "12").unwrap(), 12.0);
        assert_eq!(length("radius", "3mm").unwrap(), 3e-3);
        assert_eq!(length("radius", "1e-3m").unwrap(), 1e-3);
        assert_eq!(length("radius", "2e-3").unwrap(), 2e-3);
        assert_eq!(force("f0", "5N").unwrap(), 5.0);
        assert!(length("radius", "3 inches").is_err());
    }

    #[test]
    fn ranges() {
        let r = range("t", "0:0.01:2").unwrap();
        assert_eq!(r.len(), 201);
        assert_eq!(r[0], 0.0);
        assert!((r[200] - 2.0).abs() < 1e-12);
        assert_eq!(range("t", "1,2,5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert_eq!(range("t", "0.5").unwrap(), vec![0.5]);
        assert!(range("t", "1:0:2").is_err());
        assert!(range("t", "2,1").is_err());
        assert!(range("t", "1:2").is_err());
    }
}
