//! Exact convex quadratic programming by active-set enumeration.
//!
//! Minimizes `½ yᵀQy + cᵀy` subject to `Gy ≤ h`. Working sets are tried in
//! increasing size, so the cost is at most `2^p` small linear solves for `p`
//! constraint rows; intended for `p ≤ 12`.

use crate::error::{dim_check, Error, Result};
use crate::lp::{lp_solve, LpOutcome, LpProblem};
use crate::matrix::{dot, ldl, RatMatrix, Vector};
use crate::polyhedron::Polyhedron;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub point: Vector,
    pub value: Rat,
    /// KKT multipliers `μ ≥ 0`, one per constraint row.
    pub multipliers: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QpOutcome {
    Infeasible,
    /// Feasible point and a direction of unbounded decrease.
    Unbounded { point: Vector, ray: Vector },
    Optimal(QpSolution),
}

impl QpOutcome {
    pub fn optimal(&self) -> Option<&QpSolution> {
        match self {
            QpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Minimizes `½ yᵀQy + cᵀy` over a polyhedron. Rejects a non-PSD `Q`.
pub fn qp_solve(q: &RatMatrix, c: &[Rat], p: &Polyhedron) -> Result<QpOutcome> {
    let n = p.dim();
    dim_check("quadratic term", n, q.nrows())?;
    dim_check("linear term", n, c.len())?;
    let f = ldl(q)?;
    if !f.psd {
        return Err(Error::NotPsd);
    }
    let rows = p.rows();
    let rhs = p.alpha();

    let mut feas = LpProblem::new(n);
    for (a, b) in rows.iter().zip(rhs) {
        feas.le(a.clone(), b.clone());
    }
    let Some(start) = lp_solve(&feas).feasible_point().cloned() else {
        return Ok(QpOutcome::Infeasible);
    };

    if f.pivots.len() < n {
        // Unbounded iff some recession direction in ker Q decreases cᵀy.
        let mut dir = LpProblem::new(n).with_objective(c.iter().map(|v| -v).collect());
        for a in rows {
            dir.le(a.clone(), Rat::zero());
        }
        for i in 0..n {
            dir.equal(q.row(i).to_vec(), Rat::zero());
            dir.bound(i, Rat::from_int(-1), Rat::one());
        }
        if let LpOutcome::Optimal(s) = lp_solve(&dir) {
            if s.value.is_positive() {
                return Ok(QpOutcome::Unbounded { point: start, ray: s.point });
            }
        }
    }

    let nrows = rows.len();
    let max_k = nrows.min(n);
    for k in 0..=max_k {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            if let Some(sol) = try_working_set(q, c, rows, rhs, &subset) {
                verify(q, c, rows, rhs, &sol);
                return Ok(QpOutcome::Optimal(sol));
            }
            if !next_combination(&mut subset, nrows) {
                break;
            }
        }
    }
    unreachable!("a bounded feasible convex QP has a KKT point with independent active rows")
}

/// Convenience form taking raw rows `G y ≤ h`.
pub fn qp_solve_rows(q: &RatMatrix, c: &[Rat], rows: Vec<Vector>, rhs: Vector) -> Result<QpOutcome> {
    let p = Polyhedron::new(rows, rhs, c.len())?;
    qp_solve(q, c, &p)
}

fn try_working_set(q: &RatMatrix, c: &[Rat], rows: &[Vector], rhs: &[Rat], w: &[usize]) -> Option<QpSolution> {
    let n = c.len();
    let k = w.len();
    if k > 0 {
        let g = RatMatrix::from_rows(w.iter().map(|&i| rows[i].clone()).collect(), n).ok()?;
        if g.rank() < k {
            return None;
        }
    }
    // [Q Gᵀ; G 0] [y; μ] = [-c; h]
    let size = n + k;
    let mut kkt = RatMatrix::zeros(size, size);
    let mut b = vec![Rat::zero(); size];
    for i in 0..n {
        for j in 0..n {
            kkt[(i, j)] = q[(i, j)].clone();
        }
        b[i] = -&c[i];
    }
    for (t, &r) in w.iter().enumerate() {
        for j in 0..n {
            kkt[(n + t, j)] = rows[r][j].clone();
            kkt[(j, n + t)] = rows[r][j].clone();
        }
        b[n + t] = rhs[r].clone();
    }
    let candidate = if kkt.rank() == size {
        let sol = kkt.solve(&b)?;
        let ok = sol[n..].iter().all(|m| !m.is_negative())
            && rows.iter().zip(rhs).all(|(a, h)| dot(a, &sol[..n]) <= *h);
        if !ok {
            return None;
        }
        sol
    } else {
        kkt.solve(&b)?;
        let mut lp = LpProblem::new(size);
        for i in 0..size {
            lp.equal(kkt.row(i).to_vec(), b[i].clone());
        }
        for t in 0..k {
            lp.nonneg(n + t);
        }
        for (a, h) in rows.iter().zip(rhs) {
            let mut row = a.clone();
            row.resize(size, Rat::zero());
            lp.le(row, h.clone());
        }
        lp_solve(&lp).feasible_point()?.clone()
    };
    let point = candidate[..n].to_vec();
    let mut multipliers = vec![Rat::zero(); rows.len()];
    for (t, &r) in w.iter().enumerate() {
        multipliers[r] = candidate[n + t].clone();
    }
    let value = objective(q, c, &point);
    Some(QpSolution { point, value, multipliers })
}

pub(crate) fn objective(q: &RatMatrix, c: &[Rat], y: &[Rat]) -> Rat {
    &(&q.quad_form(y) / &Rat::from_int(2)) + &dot(c, y)
}

fn verify(q: &RatMatrix, c: &[Rat], rows: &[Vector], rhs: &[Rat], s: &QpSolution) {
    let mut grad: Vector = q.mul_vec(&s.point).iter().zip(c).map(|(a, b)| a + b).collect();
    for ((a, h), m) in rows.iter().zip(rhs).zip(&s.multipliers) {
        let slack = h - &dot(a, &s.point);
        assert!(!slack.is_negative(), "QP point infeasible");
        assert!(!m.is_negative(), "QP multiplier negative");
        assert!(m.is_zero() || slack.is_zero(), "QP complementarity violated");
        for (g, v) in grad.iter_mut().zip(a) {
            *g += &(v * m);
        }
    }
    assert!(grad.iter().all(Rat::is_zero), "QP stationarity violated");
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ints;

    #[test]
    fn one_dimensional_minimum() {
        let q = RatMatrix::identity(1);
        let out = qp_solve_rows(&q, &ints(&[-2]), vec![ints(&[-1])], ints(&[0])).unwrap();
        let s = out.optimal().unwrap();
        assert_eq!(s.point, ints(&[2]));
        assert_eq!(s.value, Rat::from_int(-2));
    }

    #[test]
    fn empty_feasible_set() {
        let q = RatMatrix::zeros(1, 1);
        let out = qp_solve_rows(&q, &ints(&[0]), vec![ints(&[1]), ints(&[-1])], ints(&[-1, -1])).unwrap();
        assert_eq!(out, QpOutcome::Infeasible);
    }

    #[test]
    fn linear_descent_ray() {
        let q = RatMatrix::zeros(1, 1);
        let out = qp_solve_rows(&q, &ints(&[-1]), vec![ints(&[-1])], ints(&[0])).unwrap();
        match out {
            QpOutcome::Unbounded { ray, .. } => assert!(ray[0].is_positive()),
            o => panic!("expected unbounded, got {o:?}"),
        }
    }

    #[test]
    fn rejects_indefinite() {
        let q = RatMatrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(qp_solve_rows(&q, &ints(&[0, 0]), vec![], vec![]), Err(Error::NotPsd));
    }

    #[test]
    fn degenerate_solution_set() {
        // min ½(y1 + y2)² - (y1 + y2) over 0 ≤ y ≤ 1: optimal value -1/2 on a segment.
        let q = RatMatrix::from_int_rows(&[&[1, 1], &[1, 1]]);
        let rows = vec![ints(&[-1, 0]), ints(&[0, -1]), ints(&[1, 0]), ints(&[0, 1])];
        let out = qp_solve_rows(&q, &ints(&[-1, -1]), rows, ints(&[0, 0, 1, 1])).unwrap();
        assert_eq!(out.optimal().unwrap().value, Rat::new(-1, 2));
    }
}
