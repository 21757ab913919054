//! Plain-text operator exchange format.
//!
//! ```text
//! FD_UPWIND order=4 n=16 boundary_degree=1 interior_degree=4 closure_rows=4
//! <nodes: one line of n values>
//! <h: one line of n values>
//! <D+: n lines of n values>
//! <D-: n lines of n values>
//! ```
//!
//! Values are written with 17 significant digits so a round trip is exact.

use std::fmt::Write as _;

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::operators::{Family, OperatorPair};

fn push_row(out: &mut String, row: &[f64]) {
    let mut first = true;
    for v in row {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

/// Matrix in the same row-major text layout, preceded by a caller header.
pub fn write_matrix(header: &str, m: &Dense) -> String {
    let mut out = format!("{header} rows={} cols={}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        push_row(&mut out, m.row(i));
    }
    out
}

pub fn write_operator(p: &OperatorPair) -> String {
    let mut out = format!(
        "{} order={} n={} boundary_degree={} interior_degree={} closure_rows={}\n",
        p.family.as_str(),
        p.interior_order,
        p.n(),
        p.boundary_degree,
        p.interior_degree,
        p.closure_rows
    );
    push_row(&mut out, &p.nodes);
    push_row(&mut out, &p.h);
    for m in [&p.dplus, &p.dminus] {
        for i in 0..p.n() {
            push_row(&mut out, m.row(i));
        }
    }
    out
}

fn parse_row(line: Option<&str>, n: usize) -> Result<Vec<f64>> {
    let line = line.ok_or_else(|| Error::Parse("unexpected end of operator file".into()))?;
    let row: Vec<f64> = line
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
        .collect::<Result<_>>()?;
    if row.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: row.len() });
    }
    Ok(row)
}

pub fn read_operator(text: &str) -> Result<OperatorPair> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty operator file".into()))?;
    let mut tokens = header.split_whitespace();
    let family = tokens
        .next()
        .and_then(Family::parse)
        .ok_or_else(|| Error::Parse(format!("bad family in header: {header}")))?;
    let mut field = |name: &str| -> Result<usize> {
        let tok = tokens.next().ok_or_else(|| Error::Parse(format!("missing {name}")))?;
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad field {tok}")))?;
        if k != name {
            return Err(Error::Parse(format!("expected {name}, found {k}")));
        }
        v.parse().map_err(|e| Error::Parse(format!("{name}: {e}")))
    };
    let order = field("order")?;
    let n = field("n")?;
    let boundary_degree = field("boundary_degree")?;
    let interior_degree = field("interior_degree")?;
    let closure_rows = field("closure_rows")?;
    let nodes = parse_row(lines.next(), n)?;
    let h = parse_row(lines.next(), n)?;
    let mut mats = Vec::with_capacity(2);
    for _ in 0..2 {
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n {
            data.extend(parse_row(lines.next(), n)?);
        }
        mats.push(Dense::from_row_major(n, n, data));
    }
    let dminus = mats.pop().unwrap();
    let dplus = mats.pop().unwrap();
    Ok(OperatorPair { family, interior_order: order, nodes, h, dplus, dminus, boundary_degree, interior_degree, closure_rows })
}
