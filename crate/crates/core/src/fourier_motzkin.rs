//! Projection of polyhedra by Fourier–Motzkin elimination.

use std::collections::BTreeSet;

use crate::lp::{lp_solve, LpOutcome, LpProblem};
use crate::matrix::{is_zero_vec, Vector};
use crate::polyhedron::Polyhedron;
use crate::rational::{primitive, Rat};

type Row = (Vector, Rat);

/// Projects onto the coordinates in `keep` (in that order). Equalities are
/// substituted first; redundant rows are removed by LP after each step.
pub fn fm_project(p: &Polyhedron, keep: &[usize]) -> Polyhedron {
    let d = p.dim();
    let mut rows: Vec<Row> = p.rows().iter().cloned().zip(p.alpha().iter().cloned()).collect();
    let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
    for j in (0..d).filter(|j| !keep_set.contains(j)) {
        rows = prune(eliminate(rows, j), d);
        if rows.iter().any(|(a, b)| is_zero_vec(a) && b.is_negative()) {
            return Polyhedron::empty(keep.len());
        }
    }
    let (r, a): (Vec<Vector>, Vec<Rat>) =
        rows.into_iter().map(|(row, b)| (keep.iter().map(|&k| row[k].clone()).collect(), b)).unzip();
    Polyhedron::new(r, a, keep.len()).expect("projected rows")
}

fn eliminate(rows: Vec<Row>, j: usize) -> Vec<Row> {
    // Look for an equality pair with a nonzero coefficient on x_j.
    let mut pair = None;
    'outer: for (r, (a, b)) in rows.iter().enumerate() {
        if a[j].is_zero() {
            continue;
        }
        for (s, (c, e)) in rows.iter().enumerate().skip(r + 1) {
            if *e == -b && c.iter().zip(a).all(|(x, y)| *x == -y) {
                pair = Some((r, s));
                break 'outer;
            }
        }
    }
    if let Some((r, s)) = pair {
        let (piv, pb) = rows[r].clone();
        let out = rows
            .into_iter()
            .enumerate()
            .filter(|(t, _)| *t != r && *t != s)
            .map(|(_, (a, b))| {
                if a[j].is_zero() {
                    return (a, b);
                }
                let f = &a[j] / &piv[j];
                let row = a.iter().zip(&piv).map(|(x, y)| x - &(&f * y)).collect();
                (row, &b - &(&f * &pb))
            })
            .collect();
        return out;
    }
    let mut out = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (a, b) in rows {
        match a[j].signum() {
            1 => pos.push((a, b)),
            -1 => neg.push((a, b)),
            _ => out.push((a, b)),
        }
    }
    for (ap, bp) in &pos {
        for (an, bn) in &neg {
            let cp = ap[j].recip();
            let cn = (-&an[j]).recip();
            let row = ap.iter().zip(an).map(|(x, y)| &(x * &cp) + &(y * &cn)).collect();
            out.push((row, &(bp * &cp) + &(bn * &cn)));
        }
    }
    out
}

fn prune(rows: Vec<Row>, d: usize) -> Vec<Row> {
    let mut seen = BTreeSet::new();
    let mut uniq = Vec::new();
    for (a, b) in rows {
        if is_zero_vec(&a) {
            if b.is_negative() {
                return vec![(a, b)];
            }
            continue;
        }
        let mut full = a.clone();
        full.push(b);
        let mut s = primitive(&full);
        let nb = s.pop().expect("nonempty");
        if seen.insert((s.clone(), nb.clone())) {
            uniq.push((s, nb));
        }
    }
    let mut feas = LpProblem::new(d);
    for (a, b) in &uniq {
        feas.le(a.clone(), b.clone());
    }
    if !lp_solve(&feas).is_feasible() {
        return vec![(vec![Rat::zero(); d], Rat::from_int(-1))];
    }
    let mut keep = vec![true; uniq.len()];
    for i in 0..uniq.len() {
        let mut lp = LpProblem::new(d).with_objective(uniq[i].0.clone());
        for (k, (a, b)) in uniq.iter().enumerate() {
            if k != i && keep[k] {
                lp.le(a.clone(), b.clone());
            }
        }
        if let LpOutcome::Optimal(s) = lp_solve(&lp) {
            if s.value <= uniq[i].1 {
                keep[i] = false;
            }
        }
    }
    uniq.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ints;

    #[test]
    fn drops_a_coordinate() {
        let p = Polyhedron::new(vec![ints(&[1, 1]), ints(&[0, -1])], ints(&[1, 0]), 2).unwrap();
        let q = fm_project(&p, &[0]);
        assert_eq!(q.rows(), &[ints(&[1])]);
        assert_eq!(q.alpha(), &ints(&[1]));
    }

    #[test]
    fn product_set_projects_to_factor() {
        let p = Polyhedron::new(
            vec![ints(&[1, 0]), ints(&[-1, 0]), ints(&[0, 1]), ints(&[0, -1])],
            ints(&[2, 0, 5, 5]),
            2,
        )
        .unwrap();
        let q = fm_project(&p, &[0]);
        assert!(q.contains(&ints(&[0])) && q.contains(&ints(&[2])));
        assert!(!q.contains(&ints(&[3])) && !q.contains(&ints(&[-1])));
    }

    #[test]
    fn eliminates_lifted_multiplier() {
        // {(z, λ, β) : z − λ − β = 0, β ≥ 0} onto (z, λ) is {z − λ ≥ 0}.
        let p = Polyhedron::new(
            vec![ints(&[1, -1, -1]), ints(&[-1, 1, 1]), ints(&[0, 0, -1])],
            ints(&[0, 0, 0]),
            3,
        )
        .unwrap();
        let q = fm_project(&p, &[0, 1]);
        assert_eq!(q.rows(), &[ints(&[-1, 1])]);
        assert_eq!(q.alpha(), &ints(&[0]));
    }

    #[test]
    fn empty_stays_empty() {
        let p = Polyhedron::new(vec![ints(&[1, 1]), ints(&[-1, -1])], ints(&[-1, -1]), 2).unwrap();
        assert!(fm_project(&p, &[0]).is_empty());
    }
}
