//! Plain-text fixed point data: one point per line, `+ 3 2 1`.
//!
//! Blank lines and lines starting with `#` are ignored. Repeated lines add
//! multiplicity.

use num_bigint::BigInt;
use s1data::fpdata::{FixedPoint, FixedPointData, Sign};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn parse_sign(tok: &str) -> Result<Sign, String> {
    match tok {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(format!("expected sign `+` or `-`, found `{tok}`")),
    }
}

fn parse_weight(tok: &str) -> Result<BigInt, String> {
    let digits = tok.strip_prefix('-').unwrap_or(tok);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a decimal weight, found `{tok}`"));
    }
    Ok(tok.parse().expect("checked digits"))
}

/// Parses one point from its tokens. The sign may stand alone or be glued to
/// the first weight, as in `+3 2 1`.
pub fn parse_point(text: &str) -> Result<FixedPoint, String> {
    let text = text.trim();
    let (sign_tok, rest) = text.split_at(text.chars().next().map_or(0, char::len_utf8));
    let sign = parse_sign(sign_tok)?;
    let toks: Vec<&str> = rest.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(format!("expected three weights, found {}", toks.len()));
    }
    let w: Vec<BigInt> = toks.iter().map(|t| parse_weight(t)).collect::<Result<_, _>>()?;
    FixedPoint::new(sign, w[0].clone(), w[1].clone(), w[2].clone()).map_err(|e| e.to_string())
}

pub fn parse_data(text: &str) -> Result<FixedPointData, ParseError> {
    let mut data = FixedPointData::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ParseError {
            line: i + 1,
            message,
        };
        let mut toks = line.split_whitespace();
        let sign = parse_sign(toks.next().expect("line is not blank")).map_err(err)?;
        let rest: Vec<&str> = toks.collect();
        if rest.len() != 3 {
            return Err(err(format!("expected three weights, found {}", rest.len())));
        }
        let mut w = Vec::with_capacity(3);
        for t in rest {
            w.push(parse_weight(t).map_err(err)?);
        }
        let p = FixedPoint::new(sign, w[0].clone(), w[1].clone(), w[2].clone())
            .map_err(|e| err(e.to_string()))?;
        data.insert(p);
    }
    Ok(data)
}

pub fn format_point(p: &FixedPoint) -> String {
    let [a, b, c] = p.weights();
    format!("{} {a} {b} {c}", p.sign().symbol())
}

pub fn print_data(data: &FixedPointData) -> String {
    let mut out = String::new();
    for p in data.iter() {
        out.push_str(&format_point(p));
        out.push('\n');
    }
    out
}
