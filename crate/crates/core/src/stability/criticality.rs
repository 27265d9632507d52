//! Criticality of multipliers and the dual qualification condition.

use serde::Serialize;

use crate::cone::PolyCone;
use crate::error::{Error, Result};
use crate::lp::{lp_solve, LpOutcome, LpProblem};
use crate::matrix::{dot, is_zero_vec, vadd, vsub, RatMatrix, Vector};
use crate::polyhedron::Face;
use crate::rational::Rat;
use crate::system::VarSystem;

/// Outcome of the criticality test at a solution `(x̄, λ̄)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum CriticalityVerdict {
    /// Every face of the critical cone admits only `ξ = 0`.
    Noncritical { faces_checked: usize },
    Critical { xi: Vector, eta: Vector, face: usize },
}

impl CriticalityVerdict {
    pub fn is_critical(&self) -> bool {
        matches!(self, CriticalityVerdict::Critical { .. })
    }

    pub fn witness(&self) -> Option<(&Vector, &Vector)> {
        match self {
            CriticalityVerdict::Critical { xi, eta, .. } => Some((xi, eta)),
            CriticalityVerdict::Noncritical { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub singleton: bool,
    pub dqc: bool,
    pub consistent: bool,
}

/// First-order data of a variational system at a solution.
#[derive(Debug, Clone)]
pub struct Linearization {
    /// `∇ₓΨ(x̄,λ̄)`, `n × n`.
    pub h: RatMatrix,
    /// `∇Φ(x̄)`, `m × n`.
    pub j: RatMatrix,
    pub b: RatMatrix,
    /// `Φ(x̄)`.
    pub z: Vector,
    /// Critical cone of `Y` at `λ̄` for `Φ(x̄) − Bλ̄`.
    pub k: PolyCone,
    pub faces: Vec<Face>,
}

impl Linearization {
    pub fn at(s: &VarSystem, x: &[Rat], lambda: &[Rat]) -> Result<Linearization> {
        if !s.is_solution(x, lambda)? {
            return Err(Error::NotSolution);
        }
        let z = s.phi().eval(x);
        let k = s.penalty().critical_cone_at(&z, lambda)?;
        let faces = k.faces();
        Ok(Linearization {
            h: s.psi_jacobian_x(x, lambda)?,
            j: s.phi().jacobian(x),
            b: s.penalty().b().clone(),
            z,
            k,
            faces,
        })
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.nrows()
    }

    /// `η ∈ K`, `v ∈ K°`, `⟨v, η⟩ = 0`: the linearized inclusion `η ∈ ∂θ_{K,B}(v + Bη)`.
    pub fn complementary(&self, eta: &[Rat], v: &[Rat]) -> bool {
        self.k.contains(eta) && dot(v, eta).is_zero() && self.k.polar().contains(v)
    }

    /// All relations of the linearized system for `(ξ, η)`.
    pub fn is_witness(&self, xi: &[Rat], eta: &[Rat]) -> bool {
        let first = vadd(&self.h.mul_vec(xi), &self.j.tr_mul_vec(eta));
        let v = vsub(&self.j.mul_vec(xi), &self.b.mul_vec(eta));
        is_zero_vec(&first) && self.complementary(eta, &v)
    }

    /// LP over `(ξ, η, β)` describing the linearized system restricted to face
    /// `f`; `β` carries `Jξ − Bη` as a combination of the rows tight on the face.
    pub fn face_lp(&self, f: usize) -> LpProblem {
        let (n, m) = (self.n(), self.m());
        let tight = &self.faces[f].tight;
        let width = n + m + tight.len();
        let rows = self.k.rows();
        let mut lp = LpProblem::new(width);
        for r in 0..n {
            let mut a = vec![Rat::zero(); width];
            for c in 0..n {
                a[c] = self.h[(r, c)].clone();
            }
            for i in 0..m {
                a[n + i] = self.j[(i, r)].clone();
            }
            lp.equal(a, Rat::zero());
        }
        for (i, row) in rows.iter().enumerate() {
            let mut a = vec![Rat::zero(); width];
            a[n..n + m].clone_from_slice(row);
            if tight.contains(&i) {
                lp.equal(a, Rat::zero());
            } else {
                lp.le(a, Rat::zero());
            }
        }
        for i in 0..m {
            let mut a = vec![Rat::zero(); width];
            for c in 0..n {
                a[c] = self.j[(i, c)].clone();
            }
            for l in 0..m {
                a[n + l] = -&self.b[(i, l)];
            }
            for (q, &t) in tight.iter().enumerate() {
                a[n + m + q] = -&rows[t][i];
            }
            lp.equal(a, Rat::zero());
        }
        for q in 0..tight.len() {
            lp.nonneg(n + m + q);
        }
        lp
    }

    /// A face solution with some nonzero coordinate among `coords`, or `None`.
    fn nontrivial_on_face(&self, f: usize, coords: std::ops::Range<usize>) -> Option<(Vector, Vector)> {
        let (n, m) = (self.n(), self.m());
        let mut lp = self.face_lp(f);
        for j in coords.clone() {
            lp.bound(j, Rat::from_int(-1), Rat::one());
        }
        nontrivial(&lp, coords).map(|p| (p[..n].to_vec(), p[n..n + m].to_vec()))
    }

    /// First face admitting `ξ ≠ 0`.
    pub fn critical_witness(&self) -> Option<(Vector, Vector, usize)> {
        let n = self.n();
        (0..self.faces.len()).find_map(|f| self.nontrivial_on_face(f, 0..n).map(|(x, e)| (x, e, f)))
    }

    /// First face admitting `(ξ, η) ≠ 0`.
    pub fn nonzero_solution(&self) -> Option<(Vector, Vector, usize)> {
        let w = self.n() + self.m();
        (0..self.faces.len()).find_map(|f| self.nontrivial_on_face(f, 0..w).map(|(x, e)| (x, e, f)))
    }

    /// Nonzero `η ∈ K` with `−Bη ∈ K° ∩ η^⊥` and `∇Φ(x̄)ᵀη = 0`.
    pub fn dqc_violation(&self) -> Option<Vector> {
        let (n, m) = (self.n(), self.m());
        let rows = self.k.rows();
        for face in &self.faces {
            let tight = &face.tight;
            let width = m + tight.len();
            let mut lp = LpProblem::new(width);
            for (i, row) in rows.iter().enumerate() {
                let mut a = vec![Rat::zero(); width];
                a[..m].clone_from_slice(row);
                if tight.contains(&i) {
                    lp.equal(a, Rat::zero());
                } else {
                    lp.le(a, Rat::zero());
                }
            }
            for i in 0..m {
                let mut a = vec![Rat::zero(); width];
                for l in 0..m {
                    a[l] = -&self.b[(i, l)];
                }
                for (q, &t) in tight.iter().enumerate() {
                    a[m + q] = -&rows[t][i];
                }
                lp.equal(a, Rat::zero());
            }
            for c in 0..n {
                let a = (0..width).map(|l| if l < m { self.j[(l, c)].clone() } else { Rat::zero() }).collect();
                lp.equal(a, Rat::zero());
            }
            for q in 0..tight.len() {
                lp.nonneg(m + q);
            }
            for l in 0..m {
                lp.bound(l, Rat::from_int(-1), Rat::one());
            }
            if let Some(p) = nontrivial(&lp, 0..m) {
                let eta = p[..m].to_vec();
                let v: Vector = self.b.mul_vec(&eta).iter().map(|x| -x).collect();
                assert!(self.complementary(&eta, &v) && is_zero_vec(&self.j.tr_mul_vec(&eta)));
                return Some(eta);
            }
        }
        None
    }
}

/// Maximizes `±x_j` for each `j` in `coords`; returns a point with a nonzero
/// coordinate there if one exists.
pub(crate) fn nontrivial(lp: &LpProblem, coords: std::ops::Range<usize>) -> Option<Vector> {
    if !lp_solve(lp).is_feasible() {
        return None;
    }
    for j in coords {
        for sign in [1, -1] {
            let mut c = vec![Rat::zero(); lp.n];
            c[j] = Rat::from_int(sign);
            let p = lp.clone().with_objective(c);
            match lp_solve(&p) {
                LpOutcome::Optimal(s) if s.value.is_positive() => return Some(s.point),
                LpOutcome::Unbounded { point, ray } => {
                    let step = if ray[j].is_zero() { Rat::zero() } else { (&point[j].abs() + &Rat::one()) / ray[j].abs() };
                    return Some(point.iter().zip(&ray).map(|(a, r)| a + &(r * &step)).collect());
                }
                _ => {}
            }
        }
    }
    None
}

/// Decides whether `λ̄` is a critical multiplier at `x̄`.
pub fn classify_multiplier(s: &VarSystem, x: &[Rat], lambda: &[Rat]) -> Result<CriticalityVerdict> {
    let lin = Linearization::at(s, x, lambda)?;
    Ok(match lin.critical_witness() {
        Some((xi, eta, face)) => {
            assert!(lin.is_witness(&xi, &eta), "criticality witness fails the linearized system");
            CriticalityVerdict::Critical { xi, eta, face }
        }
        None => CriticalityVerdict::Noncritical { faces_checked: lin.faces.len() },
    })
}

pub fn dqc_holds(s: &VarSystem, x: &[Rat], lambda: &[Rat]) -> Result<bool> {
    Ok(Linearization::at(s, x, lambda)?.dqc_violation().is_none())
}

pub fn uniqueness_report(s: &VarSystem, x: &[Rat], lambda: &[Rat]) -> Result<UniquenessReport> {
    let dqc = dqc_holds(s, x, lambda)?;
    let singleton = s.multiplier_set(x)?.singleton;
    Ok(UniquenessReport { singleton, dqc, consistent: singleton == dqc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ints;
    use crate::system::fixtures::*;

    #[test]
    fn orthant_cases() {
        for n in 2..=4 {
            let a = orthant_system(n, false);
            let z = ints(&vec![0; n]);
            assert!(!classify_multiplier(&a, &z, &z).unwrap().is_critical());
            assert!(dqc_holds(&a, &z, &z).unwrap());
            let b = orthant_system(n, true);
            let v = classify_multiplier(&b, &z, &z).unwrap();
            let (xi, _) = v.witness().unwrap();
            assert!(xi[..n - 1].iter().all(Rat::is_zero) && !xi[n - 1].is_zero());
            assert_eq!(xi[n - 1].abs(), Rat::one());
        }
    }

    #[test]
    fn scalar_family() {
        let s = scalar_critical();
        for (p, q) in [(0, 1), (1, 4), (1, 1), (10, 1), (1, 2)] {
            let l = [Rat::zero(), Rat::new(p, q)];
            let v = classify_multiplier(&s, &ints(&[0]), &l).unwrap();
            assert_eq!(v.is_critical(), p * 2 == q, "t = {p}/{q}");
        }
        let r = uniqueness_report(&s, &ints(&[0]), &ints(&[0, 1])).unwrap();
        assert_eq!(r, UniquenessReport { singleton: false, dqc: false, consistent: true });
    }

    #[test]
    fn degenerate_pair_fails_dqc() {
        let s = degenerate_pair();
        let z = ints(&[0, 0]);
        let r = uniqueness_report(&s, &z, &z).unwrap();
        assert!(!r.singleton && !r.dqc && r.consistent);
        let v = classify_multiplier(&s, &z, &z).unwrap();
        let (xi, _) = v.witness().unwrap();
        assert!(xi[0].is_zero() && !xi[1].is_zero());
    }

    #[test]
    fn non_solution_is_rejected() {
        let s = scalar_critical();
        assert_eq!(classify_multiplier(&s, &ints(&[0]), &ints(&[1, 0])), Err(Error::NotSolution));
    }
}
