//! Text formats: `.cop` instance files and single-line solution files.
//!
//! Instance layout (variables 1-based, values 0-based):
//!
//! ```text
//! COP 1
//! n 2
//! d 2 2
//! u 1 0.20000000000000001 0.80000000000000004
//! u 2 0.5 0.10000000000000001
//! e 1 2 0 0.29999999999999999 0.40000000000000002 0.20000000000000001
//! end
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Assignment, CopInstance, Edge};

/// Formats `x` with 17 significant digits, in positional notation for
/// moderate magnitudes and scientific notation otherwise. Parsing the result
/// recovers `x` exactly.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..=16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

pub fn write_instance(inst: &CopInstance) -> String {
    let mut out = String::new();
    out.push_str("COP 1\n");
    writeln!(out, "n {}", inst.num_vars()).unwrap();
    out.push('d');
    for d in inst.domain_sizes() {
        write!(out, " {d}").unwrap();
    }
    out.push('\n');
    for var in 0..inst.num_vars() {
        write!(out, "u {}", var + 1).unwrap();
        for &c in inst.unary(var) {
            write!(out, " {}", fmt_sig17(c)).unwrap();
        }
        out.push('\n');
    }
    for e in inst.edges() {
        write!(out, "e {} {}", e.i + 1, e.j + 1).unwrap();
        for &c in &e.costs {
            write!(out, " {}", fmt_sig17(c)).unwrap();
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-comment, non-blank line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (idx, line) in self.inner.by_ref() {
            self.last = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            return Some((idx + 1, line));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next()
            .ok_or_else(|| Error::parse(self.last + 1, format!("unexpected end of input, expected {what}")))
    }
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected a non-negative integer, got {tok:?}")))
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a number, got {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite cost {tok:?}")));
    }
    Ok(v)
}

fn parse_var(line: usize, tok: &str, n: usize) -> Result<usize> {
    let v = parse_usize(line, tok)?;
    if v == 0 || v > n {
        return Err(Error::parse(line, format!("variable index {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

pub fn parse_instance(text: &str) -> Result<CopInstance> {
    let mut lines = Lines::new(text);

    let (ln, header) = lines.expect("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["COP", "1"] {
        return Err(Error::parse(ln, format!("bad header {header:?}, expected \"COP 1\"")));
    }

    let (ln, line) = lines.expect("variable count")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "n" {
        return Err(Error::parse(ln, "expected \"n <count>\""));
    }
    let n = parse_usize(ln, toks[1])?;
    if n == 0 {
        return Err(Error::parse(ln, "instance must have at least one variable"));
    }

    let (ln, line) = lines.expect("domain sizes")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.first() != Some(&"d") {
        return Err(Error::parse(ln, "expected \"d <d_1> ... <d_n>\""));
    }
    if toks.len() != n + 1 {
        return Err(Error::parse(ln, format!("dimension mismatch: {} domain sizes for {n} variables", toks.len() - 1)));
    }
    let domain_sizes = toks[1..]
        .iter()
        .map(|t| {
            let d = parse_usize(ln, t)?;
            if d == 0 {
                Err(Error::parse(ln, "domain size must be at least 1"))
            } else {
                Ok(d)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut unary = Vec::with_capacity(n);
    for var in 0..n {
        let (ln, line) = lines.expect("unary line")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() != Some(&"u") || toks.len() < 2 {
            return Err(Error::parse(ln, format!("expected unary line for variable {}", var + 1)));
        }
        if parse_var(ln, toks[1], n)? != var {
            return Err(Error::parse(ln, format!("unary lines out of order, expected variable {}", var + 1)));
        }
        if toks.len() - 2 != domain_sizes[var] {
            return Err(Error::parse(
                ln,
                format!("dimension mismatch: {} unary values, expected {}", toks.len() - 2, domain_sizes[var]),
            ));
        }
        unary.push(toks[2..].iter().map(|t| parse_f64(ln, t)).collect::<Result<Vec<_>>>()?);
    }

    let mut edges: Vec<Edge> = Vec::new();
    loop {
        let (ln, line) = lines.expect("edge line or \"end\"")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first().copied() {
            Some("end") if toks.len() == 1 => break,
            Some("e") if toks.len() >= 3 => {
                let i = parse_var(ln, toks[1], n)?;
                let j = parse_var(ln, toks[2], n)?;
                if i >= j {
                    return Err(Error::parse(ln, "edge endpoints must satisfy i < j"));
                }
                if let Some(prev) = edges.last() {
                    if (prev.i, prev.j) == (i, j) {
                        return Err(Error::parse(ln, format!("duplicate edge ({}, {})", i + 1, j + 1)));
                    }
                    if (prev.i, prev.j) > (i, j) {
                        return Err(Error::parse(ln, "edges not sorted by (i, j)"));
                    }
                }
                let expected = domain_sizes[i] * domain_sizes[j];
                if toks.len() - 3 != expected {
                    return Err(Error::parse(
                        ln,
                        format!("dimension mismatch: {} binary values, expected {expected}", toks.len() - 3),
                    ));
                }
                let costs = toks[3..].iter().map(|t| parse_f64(ln, t)).collect::<Result<Vec<_>>>()?;
                edges.push(Edge::new(i, j, costs));
            }
            _ => return Err(Error::parse(ln, format!("malformed line {line:?}"))),
        }
    }
    if let Some((ln, line)) = lines.next() {
        return Err(Error::parse(ln, format!("content after \"end\": {line:?}")));
    }

    CopInstance::new(domain_sizes, unary, edges)
}

/// `SOL <cost> <v_1> ... <v_n>` with a trailing newline.
pub fn write_solution(cost: f64, a: &Assignment) -> String {
    let mut out = format!("SOL {}", fmt_sig17(cost));
    for v in &a.values {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
    out
}

pub fn parse_solution(text: &str) -> Result<(f64, Assignment)> {
    let mut lines = Lines::new(text);
    let (ln, line) = lines.expect("solution line")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.first() != Some(&"SOL") || toks.len() < 2 {
        return Err(Error::parse(ln, "expected \"SOL <cost> <values...>\""));
    }
    let cost = parse_f64(ln, toks[1])?;
    let values = toks[2..].iter().map(|t| parse_usize(ln, t)).collect::<Result<Vec<_>>>()?;
    Ok((cost, Assignment::new(values)))
}
