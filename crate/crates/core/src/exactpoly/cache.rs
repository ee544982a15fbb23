//! On-disk text format for exact-period polynomials.
//!
//! ```text
//! PHIN n=2 degv=2
//! 0 0 1
//! 0 2 1
//! 1 1 1
//! 2 0 -2
//! ```
//!
//! One line per term `i j coefficient`, sorted by `(i, j)`.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;

use super::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};

pub const CACHE_HEADER: &str = "PHIN";

pub fn format_cache_file(n: u32, p: &BivariatePolynomial) -> String {
    let mut out = format!("{CACHE_HEADER} n={n} degv={}\n", p.degree_v());
    for (i, j, c) in p.terms() {
        writeln!(out, "{i} {j} {c}").unwrap();
    }
    out
}

pub fn write_cache_file(path: &Path, n: u32, p: &BivariatePolynomial) -> Result<()> {
    std::fs::write(path, format_cache_file(n, p))?;
    Ok(())
}

pub fn read_cache_file(path: &Path) -> Result<(u32, BivariatePolynomial)> {
    parse_cache_file(&std::fs::read_to_string(path)?)
}

fn parse_field<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .ok_or_else(|| Error::Parse(format!("expected `{key}<value>` in cache header")))
}

pub fn parse_cache_file(text: &str) -> Result<(u32, BivariatePolynomial)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty cache file".into()))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(CACHE_HEADER) {
        return Err(Error::Parse(format!("cache header must start with {CACHE_HEADER}")));
    }
    let n: u32 = parse_field(tokens.next(), "n=")?
        .parse()
        .map_err(|_| Error::Parse("bad n in cache header".into()))?;
    let degv: u32 = parse_field(tokens.next(), "degv=")?
        .parse()
        .map_err(|_| Error::Parse("bad degv in cache header".into()))?;

    let mut terms = Vec::new();
    let mut last: Option<(u32, u32)> = None;
    for (lineno, line) in lines.enumerate() {
        let bad = || Error::Parse(format!("malformed term on line {}", lineno + 2));
        let mut parts = line.split_whitespace();
        let i: u32 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let j: u32 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let c: BigInt = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        if last.is_some_and(|prev| prev >= (i, j)) {
            return Err(Error::Parse(format!("terms out of order on line {}", lineno + 2)));
        }
        last = Some((i, j));
        terms.push((i, j, c));
    }
    let p = BivariatePolynomial::from_terms(terms);
    if p.degree_v() != degv {
        return Err(Error::Parse(format!(
            "header degv={degv} disagrees with the terms (degree {})",
            p.degree_v()
        )));
    }
    Ok((n, p))
}
