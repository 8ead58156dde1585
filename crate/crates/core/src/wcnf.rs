//! Reading and writing DIMACS WCNF in both MaxSAT Evaluation dialects.
//!
//! - Classic (pre-2022): `p wcnf <vars> <clauses> <top>` header, every clause
//!   line starts with its weight, weights `>= top` mark hard clauses.
//! - New (2022 onwards): no header, hard clauses start with `h`, soft clauses
//!   with their positive weight.
//!
//! The dialect is detected from the presence of a `p wcnf` line before the
//! first clause line. Input may use LF or CRLF; output always uses LF.

use std::io::{self, BufRead, Write};

use crate::formula::{Clause, ClauseKind, Formula, FormulaBuilder, FormulaError, Lit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WcnfDialect {
    Classic2019,
    New2022,
}

#[derive(Debug, thiserror::Error)]
pub enum WcnfError {
    #[error("line {line}: malformed header: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("line {line}: literal {lit} out of range (declared {num_vars} variables)")]
    LiteralOutOfRange {
        line: usize,
        lit: i64,
        num_vars: usize,
    },
    #[error("line {line}: clause is not terminated by 0")]
    MissingTerminatingZero { line: usize },
    #[error("line {line}: soft clause weight must be positive")]
    NonPositiveSoftWeight { line: usize },
    #[error("line {line}: weight does not fit into 63 bits")]
    WeightOverflow { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// A parsed instance together with the dialect it was written in.
#[derive(Debug, Clone)]
pub struct ParsedWcnf {
    pub formula: Formula,
    pub dialect: WcnfDialect,
}

struct Header {
    num_vars: usize,
    /// `None` for headers without a top value (no hard clauses).
    top: Option<u64>,
}

pub fn parse_wcnf_str(text: &str) -> Result<ParsedWcnf, WcnfError> {
    parse_wcnf(text.as_bytes())
}

pub fn parse_wcnf<R: BufRead>(mut reader: R) -> Result<ParsedWcnf, WcnfError> {
    let mut header: Option<Header> = None;
    let mut seen_clause = false;
    let mut builder = FormulaBuilder::new();
    let mut total: u64 = 0;
    let mut lits: Vec<Lit> = Vec::new();
    let mut buf = String::new();
    let mut line_no = 0;

    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tokens = line.split_ascii_whitespace();
        let first = tokens.next().unwrap_or_default();

        if first == "p" {
            if seen_clause || header.is_some() {
                return Err(malformed(line_no, "unexpected p line"));
            }
            let h = parse_header(line_no, tokens)?;
            builder = FormulaBuilder::with_num_vars(h.num_vars);
            header = Some(h);
            continue;
        }
        seen_clause = true;

        let kind_weight = match (&header, first) {
            (None, "h") => (ClauseKind::Hard, 0),
            (Some(_), "h") => {
                return Err(WcnfError::InvalidToken {
                    line: line_no,
                    token: first.to_owned(),
                })
            }
            (h, tok) => {
                let w = parse_weight(line_no, tok)?;
                match h.as_ref().and_then(|h| h.top) {
                    Some(top) if w >= top => (ClauseKind::Hard, 0),
                    _ => {
                        if w == 0 {
                            return Err(WcnfError::NonPositiveSoftWeight { line: line_no });
                        }
                        total = total
                            .checked_add(w)
                            .filter(|&t| t <= i64::MAX as u64)
                            .ok_or(WcnfError::WeightOverflow { line: line_no })?;
                        (ClauseKind::Soft, w)
                    }
                }
            }
        };

        lits.clear();
        let mut terminated = false;
        for tok in tokens {
            if terminated {
                // Anything after the terminating zero.
                return Err(WcnfError::InvalidToken {
                    line: line_no,
                    token: tok.to_owned(),
                });
            }
            let l: i64 = tok.parse().map_err(|_| WcnfError::InvalidToken {
                line: line_no,
                token: tok.to_owned(),
            })?;
            if l == 0 {
                terminated = true;
                continue;
            }
            if l.unsigned_abs() > u32::MAX as u64 / 2 {
                return Err(WcnfError::InvalidToken {
                    line: line_no,
                    token: tok.to_owned(),
                });
            }
            if let Some(h) = &header {
                if l.unsigned_abs() as usize > h.num_vars {
                    return Err(WcnfError::LiteralOutOfRange {
                        line: line_no,
                        lit: l,
                        num_vars: h.num_vars,
                    });
                }
            }
            lits.push(Lit::from_dimacs(l));
        }
        if !terminated {
            return Err(WcnfError::MissingTerminatingZero { line: line_no });
        }
        let (kind, weight) = kind_weight;
        builder
            .add(Clause {
                lits: lits.clone(),
                kind,
                weight,
            })
            .map_err(|e| from_formula_error(e, line_no))?;
    }

    let dialect = if header.is_some() {
        WcnfDialect::Classic2019
    } else {
        WcnfDialect::New2022
    };
    let formula = builder
        .build()
        .map_err(|e| from_formula_error(e, line_no))?;
    Ok(ParsedWcnf { formula, dialect })
}

fn parse_header<'a>(
    line: usize,
    mut tokens: impl Iterator<Item = &'a str>,
) -> Result<Header, WcnfError> {
    match tokens.next() {
        Some("wcnf") => {}
        Some(other) => return Err(malformed(line, &format!("unsupported format `{other}`"))),
        None => return Err(malformed(line, "missing format")),
    }
    let mut num = |what: &str| -> Result<Option<u64>, WcnfError> {
        tokens
            .next()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| malformed(line, &format!("invalid {what} `{t}`")))
            })
            .transpose()
    };
    let num_vars =
        num("variable count")?.ok_or_else(|| malformed(line, "missing variable count"))?;
    num("clause count")?.ok_or_else(|| malformed(line, "missing clause count"))?;
    let top = num("top weight")?;
    if tokens.next().is_some() {
        return Err(malformed(line, "trailing tokens"));
    }
    if num_vars > (u32::MAX / 2) as u64 {
        return Err(malformed(line, "too many variables"));
    }
    Ok(Header {
        num_vars: num_vars as usize,
        top,
    })
}

fn parse_weight(line: usize, tok: &str) -> Result<u64, WcnfError> {
    if tok.starts_with('-') {
        return Err(WcnfError::NonPositiveSoftWeight { line });
    }
    match tok.parse::<u64>() {
        Ok(w) => Ok(w),
        Err(e) if matches!(e.kind(), std::num::IntErrorKind::PosOverflow) => {
            Err(WcnfError::WeightOverflow { line })
        }
        Err(_) => Err(WcnfError::InvalidToken {
            line,
            token: tok.to_owned(),
        }),
    }
}

fn malformed(line: usize, msg: &str) -> WcnfError {
    WcnfError::MalformedHeader {
        line,
        msg: msg.to_owned(),
    }
}

fn from_formula_error(e: FormulaError, line: usize) -> WcnfError {
    match e {
        FormulaError::NonPositiveSoftWeight => WcnfError::NonPositiveSoftWeight { line },
        FormulaError::WeightOverflow => WcnfError::WeightOverflow { line },
        FormulaError::LiteralOutOfRange { lit, num_vars } => WcnfError::LiteralOutOfRange {
            line,
            lit,
            num_vars,
        },
    }
}

/// Writes `f` in the given dialect. Classic output uses
/// `top = total soft weight + 1`. Empty soft clauses (and an empty hard
/// clause, if the formula has one) are written after the regular clauses.
pub fn write_wcnf<W: Write>(f: &Formula, dialect: WcnfDialect, mut out: W) -> io::Result<()> {
    let top = f.total_soft_weight() + f.empty_soft_weight() + 1;
    let n_clauses = f.num_clauses() + f.empty_soft_clauses().len() + f.has_empty_hard() as usize;
    let hard_tag = match dialect {
        WcnfDialect::Classic2019 => {
            writeln!(out, "p wcnf {} {} {}", f.num_vars(), n_clauses, top)?;
            top.to_string()
        }
        WcnfDialect::New2022 => "h".to_owned(),
    };
    for c in f.clauses() {
        if c.is_hard() {
            out.write_all(hard_tag.as_bytes())?;
        } else {
            write!(out, "{}", c.weight)?;
        }
        for &l in c.lits {
            write!(out, " {}", l.to_dimacs())?;
        }
        out.write_all(b" 0\n")?;
    }
    for &w in f.empty_soft_clauses() {
        writeln!(out, "{w} 0")?;
    }
    if f.has_empty_hard() {
        writeln!(out, "{hard_tag} 0")?;
    }
    Ok(())
}

pub fn write_wcnf_string(f: &Formula, dialect: WcnfDialect) -> String {
    let mut buf = Vec::new();
    write_wcnf(f, dialect, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("WCNF output is ASCII")
}
