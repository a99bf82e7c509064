//! Text form of tree instances:
//!
//! ```text
//! TREE 1
//! PARENT - 0 0       (parent of each node, "-" for the root)
//! CAP 2 2 2
//! Y 1 1/2 1/2
//! ```

use std::fmt::Write;

use capkc_core::rational::{format as fmt_q, parse as parse_q};
use capkc_core::TreeInstance;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TreeParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_tree(text: &str) -> Result<TreeInstance, TreeParseError> {
    let fail = |line: usize, m: String| Err(TreeParseError { line, message: m });
    let mut content = text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    });
    match content.next() {
        Some((_, "TREE 1")) => {}
        Some((no, other)) => return fail(no, format!("expected \"TREE 1\", found {other:?}")),
        None => return fail(1, "empty input".into()),
    }
    let (mut parent, mut cap, mut y) = (None, None, None);
    let mut last = 1;
    for (no, line) in content {
        last = no;
        let mut words = line.split_whitespace();
        let key = words.next().expect("nonempty");
        let rest: Vec<&str> = words.collect();
        match key {
            "PARENT" => {
                let mut p = Vec::new();
                for w in rest {
                    p.push(match w {
                        "-" => None,
                        _ => match w.parse() {
                            Ok(v) => Some(v),
                            Err(_) => return fail(no, format!("bad parent {w:?}")),
                        },
                    });
                }
                parent = Some(p);
            }
            "CAP" => {
                let mut c = Vec::new();
                for w in rest {
                    match w.parse::<u64>() {
                        Ok(v) => c.push(v),
                        Err(_) => return fail(no, format!("bad capacity {w:?}")),
                    }
                }
                cap = Some(c);
            }
            "Y" => {
                let mut v = Vec::new();
                for w in rest {
                    match parse_q(w) {
                        Some(q) => v.push(q),
                        None => return fail(no, format!("bad opening {w:?}")),
                    }
                }
                y = Some(v);
            }
            other => return fail(no, format!("unknown keyword {other:?}")),
        }
    }
    let (Some(parent), Some(cap), Some(y)) = (parent, cap, y) else {
        return fail(last, "PARENT, CAP and Y are all required".into());
    };
    TreeInstance::new(parent, cap, y).map_err(|e| TreeParseError {
        line: last,
        message: e.to_string(),
    })
}

pub fn serialize_tree(t: &TreeInstance) -> String {
    let parents: Vec<String> = t
        .parent()
        .iter()
        .map(|p| p.map_or_else(|| "-".to_string(), |p| p.to_string()))
        .collect();
    let caps: Vec<String> = t.capacities().iter().map(u64::to_string).collect();
    let ys: Vec<String> = t.y().iter().map(fmt_q).collect();
    let mut out = String::from("TREE 1\n");
    let _ = writeln!(out, "PARENT {}", parents.join(" "));
    let _ = writeln!(out, "CAP {}", caps.join(" "));
    let _ = writeln!(out, "Y {}", ys.join(" "));
    out
}
