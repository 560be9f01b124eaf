//! Line-oriented LP text format.
//!
//! ```text
//! # comments and blank lines are ignored
//! format 1
//! vars 3
//! min 0 0 1/2
//! 1 1 1 = 1
//! -1 0 0 <= 0
//! ```
//!
//! Numbers are exact rationals written `p` or `p/q`. Every constraint line
//! holds `n` coefficients, a relation (`=` or `<=`) and a right-hand side.

use lpsym::exactla::{Rat, RatMatrix};
use lpsym::lpsolve::LinearProgram;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

fn rats(line: usize, toks: &[&str]) -> Result<Vec<Rat>, ParseError> {
    toks.iter().map(|t| t.parse::<Rat>().or_else(|_| err(line, format!("bad number {t:?}")))).collect()
}

pub fn parse_lp(text: &str) -> Result<LinearProgram, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let Some((ln, header)) = lines.next() else {
        return err(0, "empty input");
    };
    if header.split_whitespace().collect::<Vec<_>>() != ["format", "1"] {
        return err(ln, "expected `format 1`");
    }
    let n = match lines.next() {
        Some((ln, l)) => match l.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["vars", v] => v.parse::<usize>().or_else(|_| err(ln, format!("bad variable count {v:?}")))?,
            _ => return err(ln, "expected `vars n`"),
        },
        None => return err(ln, "missing `vars n`"),
    };
    let c = match lines.next() {
        Some((ln, l)) => {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.first() != Some(&"min") {
                return err(ln, "expected `min c_1 ... c_n`");
            }
            if toks.len() != n + 1 {
                return err(ln, format!("objective has {} entries, expected {n}", toks.len() - 1));
            }
            rats(ln, &toks[1..])?
        }
        None => return err(ln, "missing objective line"),
    };
    let (mut eq, mut eq_rhs) = (RatMatrix::zeros(0, n), Vec::new());
    let (mut ineq, mut ineq_rhs) = (RatMatrix::zeros(0, n), Vec::new());
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != n + 2 {
            return err(ln, format!("constraint has {} fields, expected {}", toks.len(), n + 2));
        }
        let row = rats(ln, &toks[..n])?;
        let rhs = rats(ln, &toks[n + 1..])?.remove(0);
        match toks[n] {
            "=" => {
                eq.push_row(row);
                eq_rhs.push(rhs);
            }
            "<=" => {
                ineq.push_row(row);
                ineq_rhs.push(rhs);
            }
            r => return err(ln, format!("unknown relation {r:?}")),
        }
    }
    Ok(LinearProgram::new(eq, eq_rhs, ineq, ineq_rhs, c).expect("shapes checked while parsing"))
}

fn join(v: &[Rat]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Equalities first, then inequalities.
pub fn serialize_lp(lp: &LinearProgram) -> String {
    let mut s = format!("format 1\nvars {}\nmin {}\n", lp.n(), join(&lp.c));
    for i in 0..lp.eq.rows() {
        s += &format!("{} = {}\n", join(lp.eq.row(i)), lp.eq_rhs[i]);
    }
    for i in 0..lp.ineq.rows() {
        s += &format!("{} <= {}\n", join(lp.ineq.row(i)), lp.ineq_rhs[i]);
    }
    s
}

/// Whitespace-separated symbol matrix, one run per line.
pub fn parse_array(text: &str) -> Result<Vec<Vec<i64>>, ParseError> {
    let mut rows = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let row = l
            .split_whitespace()
            .map(|t| t.parse::<i64>().or_else(|_| err(i + 1, format!("bad symbol {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if rows.first().is_some_and(|r: &Vec<i64>| r.len() != row.len()) {
            return err(i + 1, "rows have different lengths");
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return err(0, "empty array");
    }
    Ok(rows)
}
