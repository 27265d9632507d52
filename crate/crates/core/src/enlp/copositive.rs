//! Copositivity of quadratic forms on polyhedral cones.

use crate::cone::PolyCone;
use crate::lp::{lp_solve, LpProblem};
use crate::matrix::{ldl, RatMatrix, Vector};
use crate::rational::Rat;

/// Candidate values of `min γᵀAγ` over the standard simplex: stationary values
/// on the relative interior of every face. The minimum is among them.
fn simplex_candidates(a: &RatMatrix) -> Vec<Rat> {
    let r = a.nrows();
    assert!(r < 25, "too many generators for face enumeration");
    let mut out = Vec::new();
    for mask in 1u32..(1 << r) {
        let s: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
        let k = s.len();
        // [A_S  −1; 1ᵀ 0] [γ; ν] = [0; 1]
        let mut rows = Vec::with_capacity(k + 1);
        for &i in &s {
            let mut row: Vec<Rat> = s.iter().map(|&j| a[(i, j)].clone()).collect();
            row.push(Rat::from_int(-1));
            rows.push(row);
        }
        let mut last = vec![Rat::one(); k];
        last.push(Rat::zero());
        rows.push(last);
        let m = RatMatrix::from_rows(rows, k + 1).expect("square system");
        let mut rhs = vec![Rat::zero(); k];
        rhs.push(Rat::one());
        let Some(sol) = m.solve(&rhs) else {
            continue;
        };
        if m.rank() == k + 1 {
            if sol[..k].iter().all(|g| !g.is_negative()) {
                out.push(sol[k].clone());
            }
            continue;
        }
        // ν is constant on the solution set; keep it if some solution has γ ≥ 0.
        let mut lp = LpProblem::new(k + 1);
        for (i, row) in m.rows_vec().into_iter().enumerate() {
            lp.equal(row, rhs[i].clone());
        }
        for j in 0..k {
            lp.nonneg(j);
        }
        if let Some(p) = lp_solve(&lp).feasible_point() {
            out.push(p[k].clone());
        }
    }
    out
}

/// `γᵀAγ > 0` for all nonzero `γ ≥ 0`.
pub fn strictly_copositive(a: &RatMatrix) -> bool {
    if (0..a.nrows()).any(|i| !a[(i, i)].is_positive()) {
        return false;
    }
    simplex_candidates(a).iter().all(Rat::is_positive)
}

/// `γᵀAγ ≥ 0` for all `γ ≥ 0`.
pub fn copositive(a: &RatMatrix) -> bool {
    if (0..a.nrows()).any(|i| a[(i, i)].is_negative()) {
        return false;
    }
    simplex_candidates(a).iter().all(|v| !v.is_negative())
}

fn columns(v: &[Vector], n: usize) -> RatMatrix {
    RatMatrix::from_columns(v, n)
}

/// `wᵀQw > 0` for every nonzero `w ∈ C`.
pub fn strictly_copositive_on(q: &RatMatrix, c: &PolyCone) -> bool {
    let n = c.dim();
    let g = c.generators();
    let nn = columns(&g.lineality, n);
    let rr = columns(&g.rays, n);
    if g.lineality.is_empty() {
        return g.rays.is_empty() || strictly_copositive(&rr.transpose().mul(q).mul(&rr));
    }
    let qn = q.mul(&nn);
    let l = nn.transpose().mul(&qn);
    let f = ldl(&l).expect("symmetric restriction");
    if !f.psd || l.rank() < l.nrows() {
        return false;
    }
    if g.rays.is_empty() {
        return true;
    }
    let li = l.inverse().expect("positive definite");
    let cross = rr.transpose().mul(&qn);
    let schur = rr.transpose().mul(q).mul(&rr).add(&cross.mul(&li).mul(&cross.transpose()).neg());
    strictly_copositive(&schur)
}

/// `wᵀQw ≥ 0` for every `w ∈ C`.
pub fn copositive_on(q: &RatMatrix, c: &PolyCone) -> bool {
    let n = c.dim();
    let all = c.generators().all();
    if all.is_empty() {
        return true;
    }
    let g = columns(&all, n);
    copositive(&g.transpose().mul(q).mul(&g))
}
