//! Plain-text rendering of reports.

use std::fmt::Write;

use critmul::Rat;

use crate::analyze::{Num, Report};

fn vec_str(v: &[Rat]) -> String {
    format!("[{}]", v.iter().map(Rat::to_string).collect::<Vec<_>>().join(", "))
}

fn nums_str(v: &[Num]) -> String {
    format!("[{}]", v.iter().map(Num::to_string).collect::<Vec<_>>().join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "== {} ({}, n = {}, m = {})", r.name, r.kind, r.n, r.m);
    for v in &r.verdicts {
        let _ = writeln!(s, "point {}: x = {}, lambda = {}", v.point, vec_str(&v.x), vec_str(&v.lambda));
        let _ = writeln!(s, "  solution: {}", yes(v.solution));
        let ms = &v.multipliers;
        match (&ms.dimension, &ms.representative) {
            (Some(d), Some(rep)) => {
                let _ = writeln!(
                    s,
                    "  multipliers: dimension {d}, singleton {}, least-norm element {}",
                    yes(ms.singleton),
                    vec_str(rep)
                );
            }
            _ => {
                let _ = writeln!(s, "  multipliers: empty");
            }
        }
        for (row, a) in ms.set.rows().iter().zip(ms.set.alpha()) {
            let _ = writeln!(s, "    {} . lambda <= {a}", vec_str(row));
        }
        if let Some(c) = v.criticality {
            let _ = writeln!(s, "  criticality: {c}");
        }
        for w in r.witnesses.iter().filter(|w| w.point == v.point) {
            let _ = writeln!(s, "    witness xi = {}, eta = {}, face {}", vec_str(&w.xi), vec_str(&w.eta), w.face);
        }
        if let Some(u) = &v.uniqueness {
            let _ = writeln!(
                s,
                "  uniqueness: singleton {}, dual qualification {}, consistent {}",
                yes(u.singleton),
                yes(u.dqc),
                yes(u.consistent)
            );
        }
        if let Some(st) = &v.stability {
            let _ = writeln!(
                s,
                "  stability: bcq {}, sosc {}, sonc {:?}, unique {}, noncritical {}, isolated calm {}, lipschitz-like {}, robust isolated calm {:?}",
                yes(st.bcq),
                yes(st.sosc),
                st.sonc,
                yes(st.unique),
                yes(st.noncritical),
                yes(st.isolated_calm),
                yes(st.lipschitz_like),
                st.robust_ic
            );
            for note in &st.consistency_notes {
                let _ = writeln!(s, "    inconsistency: {note}");
            }
        }
        for t in r.residuals.iter().filter(|t| t.point == v.point) {
            let _ = writeln!(s, "  residuals: t lhs rhs_iii rhs_iv");
            for row in &t.rows {
                let _ = writeln!(s, "    {} {} {} {}", row.t, row.lhs, row.rhs_iii, row.rhs_iv);
            }
        }
        for p in r.probes.iter().filter(|p| p.point == v.point) {
            let _ = write!(s, "  probe {}: {} records, {} failures", p.kind, p.records.len(), p.failures);
            if let Some(d) = p.diverges {
                let _ = write!(s, ", diverges {}", yes(d));
            }
            if let Some(m) = p.modulus {
                let _ = write!(s, ", modulus {m}");
            }
            let _ = writeln!(s);
            for rec in &p.records {
                let _ = writeln!(
                    s,
                    "    t {} p1 {} p2 {} lhs {} rhs {} ratio {}",
                    rec.t,
                    nums_str(&rec.p1),
                    nums_str(&rec.p2),
                    rec.lhs,
                    rec.rhs,
                    rec.ratio
                );
            }
        }
    }
    let _ = writeln!(s, "consistent: {}", yes(r.consistent));
    s
}
