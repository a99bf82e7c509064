//! The CAPKC instance text format.
//!
//! ```text
//! CAPKC 1
//! MODE MATRIX|GRAPH
//! N <n>
//! K <k>
//! CAP <c_0> ... <c_{n-1}>
//! [COST <w_0> ... <w_{n-1}>]
//! [BUDGET <B>]
//! [FACILITY <f_0> ... <f_{n-1}>]
//! MATRIX            (MATRIX mode: n rows of n rationals)
//! EDGES <m>         (GRAPH mode: m lines "u v"; the metric is the hop distance)
//! ```
//!
//! `#` starts a comment. Rationals are `p/q` or integers.

use std::fmt::Write;

use capkc_core::graph::hop_metric;
use capkc_core::instance::InstanceData;
use capkc_core::rational::{format as fmt_q, parse as parse_q};
use capkc_core::{InstanceError, MetricInstance, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("{0}")]
    Syntax(String),
    #[error("matrix is not symmetric: c({u},{v}) = {a} but c({v},{u}) = {b}")]
    Asymmetric { u: usize, v: usize, a: String, b: String },
    #[error("triangle inequality fails: c({u},{w}) > c({u},{v}) + c({v},{w})")]
    Triangle { u: usize, v: usize, w: usize },
    #[error("capacity overflow: {0}")]
    CapacityOverflow(String),
    #[error("{0}")]
    Instance(InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Matrix,
    Graph,
}

#[derive(Default)]
struct Lines {
    header: usize,
    mode: usize,
    n: usize,
    k: usize,
    cap: usize,
    cost: usize,
    budget: usize,
    facility: usize,
    body: usize,
    rows: Vec<usize>,
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

fn parse_usize(line: usize, what: &str, s: &str) -> Result<usize, ParseError> {
    s.parse()
        .or_else(|_| syntax(line, format!("{what}: expected a nonnegative integer, found {s:?}")))
}

fn parse_rational(line: usize, s: &str) -> Result<Rational, ParseError> {
    parse_q(s).map_or_else(|| syntax(line, format!("expected a rational, found {s:?}")), Ok)
}

fn expect_len<T>(line: usize, what: &str, items: Vec<T>, n: usize) -> Result<Vec<T>, ParseError> {
    if items.len() != n {
        return syntax(line, format!("{what}: expected {n} entries, found {}", items.len()));
    }
    Ok(items)
}

/// Parses CAPKC text into a validated instance.
pub fn parse_instance(text: &str) -> Result<MetricInstance, ParseError> {
    let mut content = text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    });
    let mut at = Lines::default();
    match content.next() {
        Some((no, "CAPKC 1")) => at.header = no,
        Some((no, other)) => {
            return err(no, ParseErrorKind::Header(format!("expected \"CAPKC 1\", found {other:?}")))
        }
        None => return err(1, ParseErrorKind::Header("empty input".into())),
    }
    let mut mode = None;
    let mut n: Option<usize> = None;
    let mut k = None;
    let mut cap: Option<Vec<u64>> = None;
    let mut cost: Option<Vec<Rational>> = None;
    let mut budget = None;
    let mut facility: Option<Vec<bool>> = None;
    let mut dist: Option<Vec<Rational>> = None;
    let mut edges: Option<Vec<(usize, usize)>> = None;
    while let Some((no, line)) = content.next() {
        let mut words = line.split_whitespace();
        let key = words.next().expect("nonempty line");
        let rest: Vec<&str> = words.collect();
        let single = |what: &str| -> Result<&str, ParseError> {
            match rest.as_slice() {
                [v] => Ok(v),
                _ => syntax(no, format!("{what} takes exactly one value")),
            }
        };
        let once = |seen: bool| if seen { syntax(no, format!("duplicate {key} line")) } else { Ok(()) };
        match key {
            "MODE" => {
                once(mode.is_some())?;
                at.mode = no;
                mode = Some(match single("MODE")? {
                    "MATRIX" => Mode::Matrix,
                    "GRAPH" => Mode::Graph,
                    m => return syntax(no, format!("unknown mode {m:?}")),
                });
            }
            "N" => {
                once(n.is_some())?;
                at.n = no;
                n = Some(parse_usize(no, "N", single("N")?)?);
            }
            "K" => {
                once(k.is_some())?;
                at.k = no;
                k = Some(parse_usize(no, "K", single("K")?)?);
            }
            "CAP" => {
                once(cap.is_some())?;
                at.cap = no;
                let mut values = Vec::with_capacity(rest.len());
                for w in &rest {
                    let v: u64 = match w.parse() {
                        Ok(v) => v,
                        Err(_) if !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit()) => {
                            return err(no, ParseErrorKind::CapacityOverflow(format!("{w} exceeds 64 bits")))
                        }
                        Err(_) => return syntax(no, format!("CAP: expected a nonnegative integer, found {w:?}")),
                    };
                    values.push(v);
                }
                cap = Some(values);
            }
            "COST" => {
                once(cost.is_some())?;
                at.cost = no;
                cost = Some(rest.iter().map(|w| parse_rational(no, w)).collect::<Result<_, _>>()?);
            }
            "BUDGET" => {
                once(budget.is_some())?;
                at.budget = no;
                budget = Some(parse_rational(no, single("BUDGET")?)?);
            }
            "FACILITY" => {
                once(facility.is_some())?;
                at.facility = no;
                if mode.is_none() {
                    return syntax(no, "FACILITY requires a preceding MODE line");
                }
                facility = Some(
                    rest.iter()
                        .map(|w| match *w {
                            "0" => Ok(false),
                            "1" => Ok(true),
                            _ => syntax(no, format!("FACILITY flags are 0 or 1, found {w:?}")),
                        })
                        .collect::<Result<_, _>>()?,
                );
            }
            "MATRIX" | "EDGES" => {
                if dist.is_some() || edges.is_some() {
                    return syntax(no, "a second MATRIX or EDGES section");
                }
                let Some(n) = n else {
                    return syntax(no, format!("{key} before N"));
                };
                let Some(m) = mode else {
                    return syntax(no, format!("{key} before MODE"));
                };
                at.body = no;
                if key == "MATRIX" {
                    if m != Mode::Matrix || !rest.is_empty() {
                        return syntax(no, "MATRIX section requires MODE MATRIX and no arguments");
                    }
                    let mut values = Vec::with_capacity(n * n);
                    for row in 0..n {
                        let Some((rno, rline)) = content.next() else {
                            return syntax(no, format!("matrix has {row} rows, expected {n}"));
                        };
                        at.rows.push(rno);
                        let entries = rline
                            .split_whitespace()
                            .map(|w| parse_rational(rno, w))
                            .collect::<Result<Vec<_>, _>>()?;
                        values.extend(expect_len(rno, &format!("matrix row {row}"), entries, n)?);
                    }
                    dist = Some(values);
                } else {
                    if m != Mode::Graph {
                        return syntax(no, "EDGES section requires MODE GRAPH");
                    }
                    let count = parse_usize(no, "EDGES", single("EDGES")?)?;
                    let mut list = Vec::with_capacity(count);
                    for i in 0..count {
                        let Some((eno, eline)) = content.next() else {
                            return syntax(no, format!("found {i} edges, expected {count}"));
                        };
                        let ends: Vec<&str> = eline.split_whitespace().collect();
                        let [a, b] = ends.as_slice() else {
                            return syntax(eno, "an edge line is \"u v\"");
                        };
                        let (u, v) = (parse_usize(eno, "edge", a)?, parse_usize(eno, "edge", b)?);
                        if u >= n || v >= n || u == v {
                            return syntax(eno, format!("edge ({u},{v}) is a loop or out of range"));
                        }
                        list.push((u, v));
                    }
                    edges = Some(list);
                }
            }
            other => return syntax(no, format!("unknown keyword {other:?}")),
        }
    }
    let end = text.lines().count().max(1);
    let mode = mode.map_or_else(|| syntax(end, "missing MODE line"), Ok)?;
    let n = n.map_or_else(|| syntax(end, "missing N line"), Ok)?;
    let k = k.map_or_else(|| syntax(end, "missing K line"), Ok)?;
    let capacity = expect_len(at.cap, "CAP", cap.map_or_else(|| syntax(end, "missing CAP line"), Ok)?, n)?;
    let cost = cost.map(|c| expect_len(at.cost, "COST", c, n)).transpose()?;
    let facility = facility.map(|f| expect_len(at.facility, "FACILITY", f, n)).transpose()?;
    let dist = match mode {
        Mode::Matrix => dist.map_or_else(|| syntax(end, "missing MATRIX section"), Ok)?,
        Mode::Graph => {
            let list = edges.map_or_else(|| syntax(end, "missing EDGES section"), Ok)?;
            hop_metric(n, &list).map_err(|e| ParseError {
                line: at.body,
                kind: ParseErrorKind::Instance(e),
            })?
        }
    };
    if mode == Mode::Matrix {
        check_matrix(n, &dist, &at.rows)?;
    }
    let mut total: u64 = 0;
    for &c in &capacity {
        total = total.checked_add(c).map_or_else(
            || err(at.cap, ParseErrorKind::CapacityOverflow("total capacity exceeds 64 bits".into())),
            Ok,
        )?;
    }
    let data = InstanceData {
        dist,
        capacity,
        k,
        cost,
        budget,
        facility,
    };
    MetricInstance::new(data).map_err(|e| {
        let line = match &e {
            InstanceError::Empty => at.n,
            InstanceError::NegativeDistance { u, .. } | InstanceError::NonZeroDiagonal { u } => {
                at.rows.get(*u).copied().unwrap_or(at.body)
            }
            InstanceError::ZeroK => at.k,
            InstanceError::InsufficientCapacity { .. } | InstanceError::CapacityOverflow => at.cap,
            InstanceError::NegativeCost { .. } => at.cost,
            InstanceError::NegativeBudget => at.budget,
            InstanceError::CostWithoutBudget => at.cost.max(at.budget),
            InstanceError::ClientCapacity { .. } => at.facility,
            _ => at.body,
        };
        ParseError {
            line: line.max(at.header),
            kind: ParseErrorKind::Instance(e),
        }
    })
}

/// Symmetry and triangle checks reported at the offending matrix row.
fn check_matrix(n: usize, dist: &[Rational], rows: &[usize]) -> Result<(), ParseError> {
    let c = |u: usize, v: usize| &dist[u * n + v];
    for v in 0..n {
        for u in 0..v {
            if c(u, v) != c(v, u) {
                return err(
                    rows[v],
                    ParseErrorKind::Asymmetric {
                        u,
                        v,
                        a: fmt_q(c(u, v)),
                        b: fmt_q(c(v, u)),
                    },
                );
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                if c(u, w) > &(c(u, v) + c(v, w)) {
                    return err(rows[u], ParseErrorKind::Triangle { u, v, w });
                }
            }
        }
    }
    Ok(())
}

/// Serializes in MATRIX mode; `parse_instance` inverts it exactly.
pub fn serialize_instance(inst: &MetricInstance) -> String {
    let n = inst.n();
    let join = |items: Vec<String>| items.join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "CAPKC 1");
    let _ = writeln!(out, "MODE MATRIX");
    let _ = writeln!(out, "N {n}");
    let _ = writeln!(out, "K {}", inst.k());
    let _ = writeln!(out, "CAP {}", join(inst.capacities().iter().map(u64::to_string).collect()));
    if let (Some(cost), Some(budget)) = (inst.costs(), inst.budget()) {
        let _ = writeln!(out, "COST {}", join(cost.iter().map(fmt_q).collect()));
        let _ = writeln!(out, "BUDGET {}", fmt_q(budget));
    }
    if let Some(flags) = inst.facility_flags() {
        let _ = writeln!(out, "FACILITY {}", join(flags.iter().map(|&f| u8::from(f).to_string()).collect()));
    }
    let _ = writeln!(out, "MATRIX");
    for u in 0..n {
        let _ = writeln!(out, "{}", join((0..n).map(|v| fmt_q(inst.dist(u, v))).collect()));
    }
    out
}
