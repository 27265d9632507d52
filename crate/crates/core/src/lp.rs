//! Exact two-phase tableau simplex with Bland's rule.
//!
//! Variables are free; sign restrictions are ordinary inequality rows. Every
//! outcome carries a certificate that is re-verified before it is returned.

use crate::matrix::{dot, Vector};
use crate::rational::Rat;

/// `maximize objective·x` subject to `a·x ≤ b` rows and `c·x = d` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub n: usize,
    pub objective: Vector,
    pub ineq: Vec<(Vector, Rat)>,
    pub eq: Vec<(Vector, Rat)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub point: Vector,
    pub value: Rat,
    /// Multipliers `y ≥ 0` of the inequality rows.
    pub dual_ineq: Vector,
    /// Multipliers of the equality rows.
    pub dual_eq: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    /// A feasible point and a direction along which the objective grows.
    Unbounded { point: Vector, ray: Vector },
    Optimal(LpSolution),
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn feasible_point(&self) -> Option<&Vector> {
        match self {
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Optimal(s) => Some(&s.point),
        }
    }
}

impl LpProblem {
    pub fn new(n: usize) -> LpProblem {
        LpProblem { n, objective: vec![Rat::zero(); n], ineq: Vec::new(), eq: Vec::new() }
    }

    pub fn with_objective(mut self, c: Vector) -> LpProblem {
        assert_eq!(c.len(), self.n, "objective length");
        self.objective = c;
        self
    }

    pub fn le(&mut self, a: Vector, b: Rat) -> &mut LpProblem {
        assert_eq!(a.len(), self.n, "row length");
        self.ineq.push((a, b));
        self
    }

    pub fn ge(&mut self, a: Vector, b: Rat) -> &mut LpProblem {
        let a = a.iter().map(|v| -v).collect();
        self.le(a, -b)
    }

    pub fn equal(&mut self, a: Vector, b: Rat) -> &mut LpProblem {
        assert_eq!(a.len(), self.n, "row length");
        self.eq.push((a, b));
        self
    }

    /// `lo ≤ x_j ≤ hi`.
    pub fn bound(&mut self, j: usize, lo: Rat, hi: Rat) -> &mut LpProblem {
        let mut e = vec![Rat::zero(); self.n];
        e[j] = Rat::one();
        self.le(e.clone(), hi);
        self.ge(e, lo)
    }

    pub fn nonneg(&mut self, j: usize) -> &mut LpProblem {
        let mut e = vec![Rat::zero(); self.n];
        e[j] = Rat::from_int(-1);
        self.le(e, Rat::zero())
    }

    pub fn is_feasible_point(&self, x: &[Rat]) -> bool {
        x.len() == self.n
            && self.ineq.iter().all(|(a, b)| dot(a, x) <= *b)
            && self.eq.iter().all(|(a, b)| dot(a, x) == *b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Free,
    NonNeg,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    obj: Vec<Rat>,
    basis: Vec<usize>,
    kinds: Vec<Kind>,
    sign: Vec<Rat>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rat {
        &self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.rows[r][j].recip();
        let width = self.ncols + 1;
        for k in 0..width {
            if !self.rows[r][k].is_zero() {
                self.rows[r][k] *= &inv;
            }
        }
        let nz: Vec<usize> = (0..width).filter(|&k| !self.rows[r][k].is_zero()).collect();
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for &k in &nz {
                row[k] -= &(&f * &prow[k]);
            }
        }
        if !self.obj[j].is_zero() {
            let f = self.obj[j].clone();
            for &k in &nz {
                self.obj[k] -= &(&f * &prow[k]);
            }
        }
        self.basis[r] = j;
    }

    fn flip(&mut self, j: usize) {
        for row in &mut self.rows {
            if !row[j].is_zero() {
                row[j] = -&row[j];
            }
        }
        self.obj[j] = -&self.obj[j];
        self.sign[j] = -&self.sign[j];
    }

    /// Runs simplex iterations; returns the entering column if unbounded.
    fn run(&mut self, allow_artificial: bool) -> Option<usize> {
        let mut is_basic = vec![false; self.ncols];
        for &b in &self.basis {
            is_basic[b] = true;
        }
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if is_basic[j] || (!allow_artificial && self.kinds[j] == Kind::Artificial) {
                    continue;
                }
                let d = &self.obj[j];
                match self.kinds[j] {
                    Kind::Free if !d.is_zero() => {
                        if d.is_negative() {
                            self.flip(j);
                        }
                        entering = Some(j);
                    }
                    Kind::NonNeg | Kind::Artificial if d.is_positive() => entering = Some(j),
                    _ => {}
                }
                if entering.is_some() {
                    break;
                }
            }
            let Some(j) = entering else {
                return None;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                if !a.is_positive() || self.kinds[self.basis[r]] == Kind::Free {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Some(j);
            };
            is_basic[self.basis[r]] = false;
            is_basic[j] = true;
            self.pivot(r, j);
        }
    }

    fn set_objective(&mut self, costs: &[Rat]) {
        let width = self.ncols + 1;
        let mut obj: Vec<Rat> = (0..width).map(|k| if k < self.ncols { costs[k].clone() } else { Rat::zero() }).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for k in 0..width {
                if !self.rows[r][k].is_zero() {
                    obj[k] -= &(cb * &self.rows[r][k]);
                }
            }
        }
        self.obj = obj;
    }

    fn values(&self) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            v[b] = self.rhs(r).clone();
        }
        v
    }
}

/// Solves an LP exactly. Panics only if an internal certificate fails to verify.
pub fn lp_solve(p: &LpProblem) -> LpOutcome {
    let n = p.n;
    let ni = p.ineq.len();
    let ne = p.eq.len();
    let nrows = ni + ne;
    let needs_art: Vec<bool> = p
        .ineq
        .iter()
        .map(|(_, b)| b.is_negative())
        .chain(std::iter::repeat(true).take(ne))
        .collect();
    let nart = needs_art.iter().filter(|&&x| x).count();
    let ncols = n + ni + nart;
    let mut kinds = vec![Kind::Free; n];
    kinds.extend(std::iter::repeat(Kind::NonNeg).take(ni));
    kinds.extend(std::iter::repeat(Kind::Artificial).take(nart));

    let mut rows = Vec::with_capacity(nrows);
    let mut basis = Vec::with_capacity(nrows);
    let mut row_sign = Vec::with_capacity(nrows);
    let mut art_col = vec![usize::MAX; nrows];
    let mut next_art = n + ni;
    for r in 0..nrows {
        let (a, b) = if r < ni { &p.ineq[r] } else { &p.eq[r - ni] };
        let neg = b.is_negative();
        let s = if neg { Rat::from_int(-1) } else { Rat::one() };
        let mut row = vec![Rat::zero(); ncols + 1];
        for (k, v) in a.iter().enumerate() {
            row[k] = v * &s;
        }
        if r < ni {
            row[n + r] = s.clone();
        }
        row[ncols] = b * &s;
        if needs_art[r] {
            row[next_art] = Rat::one();
            art_col[r] = next_art;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + r);
        }
        rows.push(row);
        row_sign.push(s);
    }
    let mut t = Tableau { rows, obj: Vec::new(), basis, kinds, sign: vec![Rat::one(); ncols], ncols };

    if nart > 0 {
        let costs: Vec<Rat> =
            (0..ncols).map(|k| if t.kinds[k] == Kind::Artificial { Rat::from_int(-1) } else { Rat::zero() }).collect();
        t.set_objective(&costs);
        let unbounded = t.run(true);
        debug_assert!(unbounded.is_none(), "phase one is bounded");
        if t.obj[ncols].is_positive() {
            return LpOutcome::Infeasible;
        }
        for r in 0..nrows {
            if t.kinds[t.basis[r]] != Kind::Artificial {
                continue;
            }
            if let Some(j) = (0..ncols).find(|&j| t.kinds[j] != Kind::Artificial && !t.rows[r][j].is_zero()) {
                t.pivot(r, j);
            }
        }
    }

    let costs: Vec<Rat> =
        (0..ncols).map(|k| if k < n { &p.objective[k] * &t.sign[k] } else { Rat::zero() }).collect();
    t.set_objective(&costs);
    let unbounded = t.run(false);
    let vals = t.values();
    let point: Vector = (0..n).map(|k| &vals[k] * &t.sign[k]).collect();

    let out = if let Some(j) = unbounded {
        let mut ray = vec![Rat::zero(); n];
        if j < n {
            ray[j] = t.sign[j].clone();
        }
        for (r, &b) in t.basis.iter().enumerate() {
            if b < n {
                ray[b] = -(&t.rows[r][j] * &t.sign[b]);
            }
        }
        LpOutcome::Unbounded { point, ray }
    } else {
        let dual_ineq = (0..ni).map(|i| -&t.obj[n + i]).collect();
        let dual_eq = (0..ne).map(|i| -(&t.obj[art_col[ni + i]] * &row_sign[ni + i])).collect();
        let value = dot(&p.objective, &point);
        LpOutcome::Optimal(LpSolution { point, value, dual_ineq, dual_eq })
    };
    verify(p, &out);
    out
}

fn verify(p: &LpProblem, out: &LpOutcome) {
    match out {
        LpOutcome::Infeasible => {}
        LpOutcome::Unbounded { point, ray } => {
            assert!(p.is_feasible_point(point), "unbounded LP: point infeasible");
            assert!(p.ineq.iter().all(|(a, _)| !dot(a, ray).is_positive()), "unbounded LP: ray leaves the set");
            assert!(p.eq.iter().all(|(a, _)| dot(a, ray).is_zero()), "unbounded LP: ray breaks equalities");
            assert!(dot(&p.objective, ray).is_positive(), "unbounded LP: ray does not improve");
        }
        LpOutcome::Optimal(s) => {
            assert!(p.is_feasible_point(&s.point), "optimal LP: point infeasible");
            assert!(s.dual_ineq.iter().all(|y| !y.is_negative()), "optimal LP: negative multiplier");
            let mut grad = vec![Rat::zero(); p.n];
            let mut dual_value = Rat::zero();
            for ((a, b), y) in p.ineq.iter().zip(&s.dual_ineq) {
                if y.is_zero() {
                    continue;
                }
                for (g, v) in grad.iter_mut().zip(a) {
                    *g += &(v * y);
                }
                dual_value += &(b * y);
            }
            for ((a, b), z) in p.eq.iter().zip(&s.dual_eq) {
                if z.is_zero() {
                    continue;
                }
                for (g, v) in grad.iter_mut().zip(a) {
                    *g += &(v * z);
                }
                dual_value += &(b * z);
            }
            assert_eq!(grad, p.objective, "optimal LP: dual infeasible");
            assert_eq!(dual_value, s.value, "optimal LP: duality gap");
        }
    }
}
