//! Plain-text polynomial files.
//!
//! ```text
//! basis=ZO nvars=3
//! 1	1,2
//! -1/3
//! ```
//!
//! One term per line: coefficient, a tab, then 1-based variable indices.

#![allow(clippy::tabs_in_doc_comments)]

use std::fmt::Write as _;

use super::{Basis, MultilinearPoly};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

impl MultilinearPoly {
    pub fn to_text(&self) -> String {
        let mut out = format!("basis={} nvars={}\n", self.basis(), self.nvars());
        for (&m, c) in self.terms() {
            let vars: Vec<String> = super::bits(m).map(|i| (i + 1).to_string()).collect();
            writeln!(out, "{}\t{}", format_rational(c), vars.join(",")).expect("string write");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse("line 1", "missing header"))?;
        let mut basis = None;
        let mut nvars = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("basis", "ZO")) => basis = Some(Basis::ZO),
                Some(("basis", "PM")) => basis = Some(Basis::PM),
                Some(("nvars", v)) => {
                    nvars = Some(v.parse::<usize>().map_err(|_| Error::parse("line 1", "bad nvars"))?)
                }
                _ => return Err(Error::parse("line 1", format!("unexpected header field {field:?}"))),
            }
        }
        let basis = basis.ok_or_else(|| Error::parse("line 1", "missing basis"))?;
        let nvars = nvars.ok_or_else(|| Error::parse("line 1", "missing nvars"))?;
        let mut terms = Vec::new();
        for (idx, line) in lines {
            let loc = format!("line {}", idx + 1);
            let (coeff, vars) = line.split_once('\t').unwrap_or((line, ""));
            let c = parse_rational(coeff).map_err(|e| Error::parse(loc.clone(), e.to_string()))?;
            let mut mask = 0u64;
            for v in vars.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                let i: usize = v.parse().map_err(|_| Error::parse(loc.clone(), format!("bad index {v:?}")))?;
                if i == 0 || i > nvars {
                    return Err(Error::parse(loc, format!("index {i} outside 1..={nvars}")));
                }
                mask |= 1 << (i - 1);
            }
            terms.push((mask, c));
        }
        MultilinearPoly::from_terms(nvars, basis, terms)
    }
}
