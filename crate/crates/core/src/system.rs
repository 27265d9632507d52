//! Variational systems `0 = Ψ(x,λ)`, `λ ∈ ∂θ(Φ(x))` and their multiplier sets.

use crate::error::{dim_check, Result};
use crate::matrix::{is_zero_vec, vadd, vneg, RatMatrix, Vector};
use crate::penalty::PlqPenalty;
use crate::poly::PolyMap;
use crate::polyhedron::Polyhedron;
use crate::qp::{qp_solve, QpOutcome};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq)]
pub struct VarSystem {
    f: PolyMap,
    phi: PolyMap,
    penalty: PlqPenalty,
}

/// `Λ(x̄)` with its structural flags.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSet {
    pub set: Polyhedron,
    pub empty: bool,
    pub singleton: bool,
    /// Affine dimension; `None` when empty.
    pub dimension: Option<usize>,
    /// Least-norm element.
    pub representative: Option<Vector>,
}

impl MultiplierSet {
    pub fn contains(&self, lambda: &[Rat]) -> bool {
        self.set.contains(lambda)
    }
}

impl VarSystem {
    pub fn new(f: PolyMap, phi: PolyMap, penalty: PlqPenalty) -> Result<VarSystem> {
        let n = f.input_dim();
        dim_check("output dimension of f", n, f.output_dim())?;
        dim_check("input dimension of Phi", n, phi.input_dim())?;
        dim_check("output dimension of Phi vs penalty", penalty.dim(), phi.output_dim())?;
        Ok(VarSystem { f, phi, penalty })
    }

    pub fn n(&self) -> usize {
        self.f.input_dim()
    }

    pub fn m(&self) -> usize {
        self.penalty.dim()
    }

    pub fn f(&self) -> &PolyMap {
        &self.f
    }

    pub fn phi(&self) -> &PolyMap {
        &self.phi
    }

    pub fn penalty(&self) -> &PlqPenalty {
        &self.penalty
    }

    fn check_point(&self, x: &[Rat], lambda: Option<&[Rat]>) -> Result<()> {
        dim_check("x dimension", self.n(), x.len())?;
        if let Some(l) = lambda {
            dim_check("multiplier dimension", self.m(), l.len())?;
        }
        Ok(())
    }

    /// `Ψ(x,λ) = f(x) + ∇Φ(x)ᵀλ`.
    pub fn psi_eval(&self, x: &[Rat], lambda: &[Rat]) -> Result<Vector> {
        self.check_point(x, Some(lambda))?;
        Ok(vadd(&self.f.eval(x), &self.phi.jacobian(x).tr_mul_vec(lambda)))
    }

    pub fn psi_eval_f64(&self, x: &[f64], lambda: &[f64]) -> Vec<f64> {
        let fx = self.f.eval_f64(x);
        let j = self.phi.jacobian_f64(x);
        let l = nalgebra::DVector::from_column_slice(lambda);
        let jt = j.transpose() * l;
        fx.iter().zip(jt.iter()).map(|(a, b)| a + b).collect()
    }

    /// `∇ₓΨ(x,λ) = ∇f(x) + Σ λ_i ∇²Φ_i(x)`.
    pub fn psi_jacobian_x(&self, x: &[Rat], lambda: &[Rat]) -> Result<RatMatrix> {
        self.check_point(x, Some(lambda))?;
        Ok(self.f.jacobian(x).add(&self.phi.weighted_hessian(lambda, x)))
    }

    pub fn psi_jacobian_x_f64(&self, x: &[f64], lambda: &[f64]) -> nalgebra::DMatrix<f64> {
        self.f.jacobian_f64(x) + self.phi.weighted_hessian_f64(lambda, x)
    }

    /// `Λ(x̄) = {λ : ∇Φ(x̄)ᵀλ = −f(x̄)} ∩ ∂θ(Φ(x̄))`.
    pub fn multiplier_set(&self, x: &[Rat]) -> Result<MultiplierSet> {
        self.check_point(x, None)?;
        let sub = self.penalty.subdiff_set(&self.phi.eval(x))?;
        let jt = self.phi.jacobian(x).transpose();
        let target = vneg(&self.f.eval(x));
        let mut rows = Vec::new();
        let mut alpha = Vec::new();
        for j in 0..self.n() {
            rows.push(jt.row(j).to_vec());
            alpha.push(target[j].clone());
            rows.push(vneg(jt.row(j)));
            alpha.push(-&target[j]);
        }
        let full = sub.with_rows(rows, alpha)?;
        let mut kept: Vec<(Vector, Rat)> = Vec::new();
        for (r, a) in full.rows().iter().zip(full.alpha()) {
            let vacuous = is_zero_vec(r) && !a.is_negative();
            if !vacuous && !kept.iter().any(|(kr, ka)| kr == r && ka == a) {
                kept.push((r.clone(), a.clone()));
            }
        }
        let (rows, alpha) = kept.into_iter().unzip();
        let set = Polyhedron::new(rows, alpha, self.m())?;
        let dimension = set.affine_dimension();
        let representative = match dimension {
            None => None,
            Some(_) => match qp_solve(&RatMatrix::identity(self.m()), &vec![Rat::zero(); self.m()], &set)? {
                QpOutcome::Optimal(s) => Some(s.point),
                _ => unreachable!("least-norm problem over a nonempty set"),
            },
        };
        Ok(MultiplierSet { empty: dimension.is_none(), singleton: dimension == Some(0), dimension, representative, set })
    }

    pub fn is_solution(&self, x: &[Rat], lambda: &[Rat]) -> Result<bool> {
        if !is_zero_vec(&self.psi_eval(x, lambda)?) {
            return Ok(false);
        }
        self.penalty.subdiff_contains(&self.phi.eval(x), lambda)
    }

    pub fn is_stationary(&self, x: &[Rat]) -> Result<bool> {
        Ok(!self.multiplier_set(x)?.empty)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::poly::Polynomial;

    fn x(i: usize, n: usize) -> Polynomial {
        Polynomial::var(i, n)
    }

    /// `Y = R²₊`, `B = diag(1,0)`.
    pub fn corner_penalty() -> PlqPenalty {
        PlqPenalty::new(Polyhedron::orthant(2), RatMatrix::from_int_rows(&[&[1, 0], &[0, 0]])).unwrap()
    }

    /// `f = −x`, `Φ = (0, x²)`.
    pub fn scalar_critical() -> VarSystem {
        let f = PolyMap::new(vec![x(0, 1).neg()], 1).unwrap();
        let phi = PolyMap::new(vec![Polynomial::zero(1), x(0, 1).pow(2)], 1).unwrap();
        VarSystem::new(f, phi, corner_penalty()).unwrap()
    }

    /// `f = x` or `f = (x₁,…,x_{n−1},0)`, `Φ = (x₁,0,…)`, `Y = R^n₊`, `B = I`.
    pub fn orthant_system(n: usize, drop_last: bool) -> VarSystem {
        let comps = (0..n).map(|i| if drop_last && i == n - 1 { Polynomial::zero(n) } else { x(i, n) }).collect();
        let f = PolyMap::new(comps, n).unwrap();
        let phi =
            PolyMap::new((0..n).map(|i| if i == 0 { x(0, n) } else { Polynomial::zero(n) }).collect(), n).unwrap();
        let pen = PlqPenalty::new(Polyhedron::orthant(n), RatMatrix::identity(n)).unwrap();
        VarSystem::new(f, phi, pen).unwrap()
    }

    /// `f = 0`, `Φ = (x₁, 0)` on `R²`.
    pub fn degenerate_pair() -> VarSystem {
        let f = PolyMap::new(vec![Polynomial::zero(2), Polynomial::zero(2)], 2).unwrap();
        let phi = PolyMap::new(vec![x(0, 2), Polynomial::zero(2)], 2).unwrap();
        VarSystem::new(f, phi, corner_penalty()).unwrap()
    }
}
