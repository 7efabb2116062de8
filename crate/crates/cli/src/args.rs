use std::fs;

use pfk_core::{Domain, PfkError};

/// Accepts a JSON record, `@path` to a file holding one, or a shorthand:
/// `ball(n,r)`, `disk(r)`, `rectangle(a,b)`, `square(a)`, `annulus(n,inner,outer)`.
pub fn parse_domain(text: &str) -> Result<Domain, PfkError> {
    let text = text.trim();
    if let Some(path) = text.strip_prefix('@') {
        let body = fs::read_to_string(path)
            .map_err(|e| PfkError::InvalidInput(format!("cannot read domain file {path}: {e}")))?;
        return from_json(&body);
    }
    if text.starts_with('{') {
        return from_json(text);
    }
    shorthand(text)
}

fn from_json(text: &str) -> Result<Domain, PfkError> {
    serde_json::from_str(text).map_err(|e| PfkError::InvalidDomain(e.to_string()))
}

fn shorthand(text: &str) -> Result<Domain, PfkError> {
    let bad = || PfkError::InvalidDomain(format!("cannot parse domain {text:?}"));
    let (name, rest) = text.split_once('(').ok_or_else(bad)?;
    let inner = rest.strip_suffix(')').ok_or_else(bad)?;
    let nums: Vec<f64> = inner
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let dim = |x: f64| -> Result<usize, PfkError> {
        if x.fract() == 0.0 && x >= 1.0 {
            Ok(x as usize)
        } else {
            Err(PfkError::InvalidDimension(x as i64))
        }
    };
    match (name.trim(), nums.as_slice()) {
        ("ball", [n, r]) => Domain::ball(dim(*n)?, *r),
        ("disk", [r]) => Domain::ball(2, *r),
        ("rectangle", [a, b]) => Domain::rectangle(*a, *b),
        ("square", [a]) => Domain::rectangle(*a, *a),
        ("annulus", [n, a, b]) => Domain::annulus(dim(*n)?, *a, *b),
        _ => Err(bad()),
    }
}

pub fn parse_p_list(text: &str) -> Result<Vec<f64>, PfkError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let p: f64 = s
                .trim()
                .parse()
                .map_err(|_| PfkError::InvalidInput(format!("cannot parse exponent {s:?}")))?;
            if p.is_finite() && p > 1.0 {
                Ok(p)
            } else {
                Err(PfkError::InvalidExponent {
                    p,
                    reason: "p must exceed 1",
                })
            }
        })
        .collect()
}

pub fn parse_tolerance(text: &str) -> Result<(String, f64), PfkError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| PfkError::InvalidInput(format!("tolerance override must be key=value, got {text:?}")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| PfkError::InvalidInput(format!("cannot parse tolerance value {v:?}")))?;
    Ok((k.trim().to_string(), v))
}
