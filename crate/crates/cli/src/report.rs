// SPDX-License-Identifier: Apache-2.0

//! CSV rendering. Every number is written with 17 significant digits.

use std::fmt::Write;

use dapt_core::experiment::{CheckResult, InfidelityTable};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn infidelity_csv(table: &InfidelityTable) -> String {
    let orders = table.infidelity.len();
    let mut out = String::from("s");
    for k in 0..orders {
        write!(out, ",I{k}").unwrap();
    }
    out.push_str(",epsilon,norm_exact\n");
    for (row, s) in table.s.iter().enumerate() {
        out.push_str(&num(*s));
        for curve in &table.infidelity {
            write!(out, ",{}", num(curve[row])).unwrap();
        }
        writeln!(
            out,
            ",{},{}",
            num(table.epsilon[row]),
            num(table.norm_exact[row])
        )
        .unwrap();
    }
    out
}

pub fn check_csv(result: &CheckResult) -> String {
    let r = &result.rows;
    let mut out =
        String::from("t,nec_strong,nec_weak,suf_a_lhs,suf_a_rhs,suf_b_lhs_max,suf_b_rhs\n");
    for i in 0..r.t.len() {
        let cells = [
            r.t[i],
            r.nec_strong[i],
            r.nec_weak[i],
            r.suf_a_lhs[i],
            r.suf_a_rhs[i],
            r.suf_b_lhs_max[i],
            r.suf_b_rhs[i],
        ];
        out.push_str(&cells.map(num).join(","));
        out.push('\n');
    }
    writeln!(
        out,
        "verdict necessary={} sufficient={} margin={}",
        result.necessary,
        result.sufficient,
        num(r.margin)
    )
    .unwrap();
    out
}

pub fn summary_csv(rows: &[(f64, &InfidelityTable)]) -> String {
    let orders = rows.first().map_or(0, |(_, t)| t.infidelity.len());
    let mut out = String::from("value");
    for k in 0..orders {
        write!(out, ",max_I{k}").unwrap();
    }
    out.push_str(",epsilon_min_gap\n");
    for (value, table) in rows {
        out.push_str(&num(*value));
        for k in 0..orders {
            write!(out, ",{}", num(table.max_infidelity(k))).unwrap();
        }
        writeln!(out, ",{}", num(table.epsilon_min_gap)).unwrap();
    }
    out
}
