//! Parameter values, `k=v` overrides and sweep ranges.

use std::f64::consts::PI;

/// Parses a number or a simple multiple of pi: `0.3`, `pi`, `pi/20`,
/// `2*pi/3`, `-pi/4`.
pub fn parse_value(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty value".into());
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) if rest.contains("pi") => (-1.0, rest),
        _ => (1.0, s.as_str()),
    };
    let mut parts = body.splitn(2, '/');
    let num = parts.next().unwrap_or_default();
    let mut value = 1.0;
    for factor in num.split('*') {
        value *= factor_value(factor).ok_or_else(|| format!("cannot parse `{text}`"))?;
    }
    if let Some(den) = parts.next() {
        let d = factor_value(den).ok_or_else(|| format!("cannot parse `{text}`"))?;
        if d == 0.0 {
            return Err(format!("division by zero in `{text}`"));
        }
        value /= d;
    }
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(sign * value)
}

fn factor_value(f: &str) -> Option<f64> {
    if f.eq_ignore_ascii_case("pi") {
        return Some(PI);
    }
    f.parse::<f64>().ok()
}

/// Splits `name=value` and parses the value.
pub fn parse_override(text: &str) -> Result<(String, f64), String> {
    let (k, v) = text.split_once('=').ok_or_else(|| format!("expected key=value, got `{text}`"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("missing parameter name in `{text}`"));
    }
    Ok((k.to_string(), parse_value(v)?))
}

/// Parses overrides, rejecting a parameter given twice.
pub fn parse_overrides(items: &[String]) -> Result<Vec<(String, f64)>, String> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for item in items {
        let (k, v) = parse_override(item)?;
        if out.iter().any(|(n, _)| *n == k) {
            return Err(format!("parameter `{k}` given twice"));
        }
        out.push((k, v));
    }
    Ok(out)
}

/// Sweep points from `start:stop:steps` (evenly spaced, both ends included)
/// or from a comma-separated list.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    if text.contains(',') {
        return text.split(',').map(parse_value).collect();
    }
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, steps] = parts[..] else {
        return Err(format!("expected start:stop:steps, got `{text}`"));
    };
    let (a, b) = (parse_value(start)?, parse_value(stop)?);
    let n: usize = steps.trim().parse().map_err(|_| format!("step count `{steps}` is not a non-negative integer"))?;
    match n {
        0 => Err("empty range (0 steps)".into()),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}
