//! CPLEX LP text export for inspecting a model with external tools.

use std::fmt::Write;

use crate::problem::{ConstraintSense, MilpProblem, ObjectiveSense, VarKind};

fn term(out: &mut String, first: &mut bool, c: f64, name: &str) {
    let sign = if c < 0.0 { '-' } else { '+' };
    if *first {
        if c < 0.0 {
            let _ = write!(out, " - {} {}", c.abs(), name);
        } else {
            let _ = write!(out, " {} {}", c, name);
        }
        *first = false;
    } else {
        let _ = write!(out, " {} {} {}", sign, c.abs(), name);
    }
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Render `p` in CPLEX LP format. Variables are named `x{id}` and rows
/// `c{index}` so the output is accepted regardless of user-supplied names.
pub fn write_lp(p: &MilpProblem) -> String {
    let mut out = String::new();
    out.push_str(match p.sense {
        ObjectiveSense::Maximize => "Maximize\n",
        ObjectiveSense::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    let mut first = true;
    for &(j, c) in &p.objective {
        term(&mut out, &mut first, c, &format!("x{j}"));
    }
    if first {
        out.push_str(" 0 x0");
    }
    out.push_str("\nSubject To\n");
    for (i, c) in p.constraints.iter().enumerate() {
        let _ = write!(out, " c{i}:");
        let mut first = true;
        for &(j, a) in &c.coeffs {
            term(&mut out, &mut first, a, &format!("x{j}"));
        }
        if first {
            out.push_str(" 0 x0");
        }
        let op = match c.sense {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
            ConstraintSense::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for v in &p.variables {
        if v.kind == VarKind::Binary {
            continue;
        }
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " x{} free", v.id);
        } else {
            let _ = writeln!(
                out,
                " {} <= x{} <= {}",
                fmt_bound(v.lower),
                v.id,
                fmt_bound(v.upper)
            );
        }
    }
    let bins = p.binary_ids();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for j in bins {
            let _ = writeln!(out, " x{j}");
        }
    }
    out.push_str("End\n");
    out
}
