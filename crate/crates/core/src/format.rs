//! Line-oriented text formats for instances (`FCT v1`) and solutions
//! (`SOL v1`).
//!
//! ```text
//! FCT v1
//! n m
//! a_1 .. a_n
//! b_1 .. b_m
//! <n rows of m fixed costs>
//! <n rows of m linear costs, `inf` allowed>
//! ```
//!
//! Solutions list one support edge per line as `i j p/q` with 1-based
//! indices. Bicriteria solutions carry an extra `relaxed p/q` line directly
//! after the header.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{validate_instance, FlowSolution, Instance};
use crate::rational::{format_rational, parse_rational, Cost, Rational};

pub const INSTANCE_HEADER: &str = "FCT v1";
pub const SOLUTION_HEADER: &str = "SOL v1";

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((idx, line)) => {
                self.last = idx + 1;
                Ok((idx + 1, line.trim_end_matches('\r')))
            }
            None => Err(Error::parse(self.last + 1, format!("missing {what}"))),
        }
    }

    fn ensure_done(&mut self) -> Result<()> {
        for (idx, line) in self.inner.by_ref() {
            if !line.trim().is_empty() {
                return Err(Error::parse(idx + 1, "unexpected trailing content"));
            }
        }
        Ok(())
    }
}

fn parse_counts(line_no: usize, line: &str, want: usize, what: &str) -> Result<Vec<u64>> {
    let vals: Vec<&str> = line.split_whitespace().collect();
    if vals.len() != want {
        return Err(Error::parse(
            line_no,
            format!("malformed line: expected {want} {what}, found {}", vals.len()),
        ));
    }
    vals.iter()
        .map(|v| {
            v.parse::<u64>()
                .map_err(|_| Error::parse(line_no, format!("non-integer {what} '{v}'")))
        })
        .collect()
}

fn parse_cost_row(line_no: usize, line: &str, m: usize, allow_inf: bool) -> Result<Vec<Cost>> {
    let cells: Vec<&str> = line.split_whitespace().collect();
    if cells.len() != m {
        return Err(Error::parse(
            line_no,
            format!("malformed line: expected {m} costs, found {}", cells.len()),
        ));
    }
    cells
        .iter()
        .map(|cell| {
            if cell.eq_ignore_ascii_case("inf") {
                if allow_inf {
                    Ok(Cost::Infinite)
                } else {
                    Err(Error::parse(line_no, "Infinity not allowed in f"))
                }
            } else {
                let r = parse_rational(cell)
                    .ok_or_else(|| Error::parse(line_no, format!("malformed cost '{cell}'")))?;
                if r.is_negative() {
                    return Err(Error::parse(line_no, format!("negative cost '{cell}'")));
                }
                Ok(Cost::Finite(r))
            }
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next_line("header")?;
    if header.trim() != INSTANCE_HEADER {
        return Err(Error::parse(ln, format!("expected '{INSTANCE_HEADER}'")));
    }
    let (ln, dims) = lines.next_line("dimensions")?;
    let dims = parse_counts(ln, dims, 2, "dimension")?;
    let (n, m) = (dims[0] as usize, dims[1] as usize);
    let (ln, a) = lines.next_line("supplies")?;
    let supplies = parse_counts(ln, a, n, "supply")?;
    let (ln, b) = lines.next_line("demands")?;
    let demands = parse_counts(ln, b, m, "demand")?;

    let mut fixed = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, row) = lines.next_line("fixed cost row")?;
        let row = parse_cost_row(ln, row, m, false)?;
        fixed.push(
            row.into_iter()
                .map(|c| match c {
                    Cost::Finite(r) => r,
                    Cost::Infinite => unreachable!("rejected above"),
                })
                .collect(),
        );
    }
    let mut linear = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, row) = lines.next_line("linear cost row")?;
        linear.push(parse_cost_row(ln, row, m, true)?);
    }
    lines.ensure_done()?;

    let inst = Instance {
        supplies,
        demands,
        fixed,
        linear,
    };
    validate_instance(&inst).map_err(Error::InvalidInstance)?;
    Ok(inst)
}

fn join<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    items.into_iter().map(f).collect::<Vec<_>>().join(" ")
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(INSTANCE_HEADER);
    out.push('\n');
    out.push_str(&format!("{} {}\n", inst.n(), inst.m()));
    out.push_str(&join(&inst.supplies, |a| a.to_string()));
    out.push('\n');
    out.push_str(&join(&inst.demands, |b| b.to_string()));
    out.push('\n');
    for row in &inst.fixed {
        out.push_str(&join(row, format_rational));
        out.push('\n');
    }
    for row in &inst.linear {
        out.push_str(&join(row, |c| c.to_string()));
        out.push('\n');
    }
    out
}

pub fn parse_solution(text: &str) -> Result<FlowSolution> {
    let mut lines = text.lines().enumerate().peekable();
    match lines.next() {
        Some((_, h)) if h.trim() == SOLUTION_HEADER => {}
        Some((idx, _)) => return Err(Error::parse(idx + 1, format!("expected '{SOLUTION_HEADER}'"))),
        None => return Err(Error::parse(1, "missing header")),
    }
    let mut x = FlowSolution::new();
    for (idx, line) in lines {
        let ln = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            ["relaxed", eps] if idx == 1 => {
                let eps = parse_rational(eps)
                    .filter(|e| e.is_positive())
                    .ok_or_else(|| Error::parse(ln, format!("malformed relaxation '{eps}'")))?;
                x.relaxation = Some(eps);
            }
            [i, j, v] => {
                let i: usize = i
                    .parse()
                    .ok()
                    .filter(|&i| i > 0)
                    .ok_or_else(|| Error::parse(ln, format!("malformed source index '{i}'")))?;
                let j: usize = j
                    .parse()
                    .ok()
                    .filter(|&j| j > 0)
                    .ok_or_else(|| Error::parse(ln, format!("malformed sink index '{j}'")))?;
                let v: Rational = parse_rational(v)
                    .ok_or_else(|| Error::parse(ln, format!("malformed flow '{v}'")))?;
                if !v.is_positive() {
                    return Err(Error::parse(ln, "flow must be positive"));
                }
                if !x.get(i - 1, j - 1).is_zero() {
                    return Err(Error::parse(ln, format!("duplicate edge ({i}, {j})")));
                }
                x.set((i - 1, j - 1), v);
            }
            _ => return Err(Error::parse(ln, "malformed line")),
        }
    }
    Ok(x)
}

pub fn serialize_solution(x: &FlowSolution) -> String {
    let mut out = String::from(SOLUTION_HEADER);
    out.push('\n');
    if let Some(eps) = &x.relaxation {
        out.push_str(&format!("relaxed {}\n", format_rational(eps)));
    }
    for (&(i, j), v) in x.iter() {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, format_rational(v)));
    }
    out
}
