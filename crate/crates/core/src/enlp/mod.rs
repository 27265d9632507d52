//! Extended nonlinear programs `min φ₀(x) + θ(Φ(x))`.

pub mod coderivative;
pub mod copositive;
pub mod second_order;

use serde::Serialize;

use crate::error::{dim_check, Error, Result};
use crate::lp::LpProblem;
use crate::matrix::{dot, is_zero_vec, RatMatrix, Vector};
use crate::penalty::PlqPenalty;
use crate::poly::{PolyMap, Polynomial};
use crate::rational::Rat;
use crate::stability::criticality::{classify_multiplier, nontrivial, uniqueness_report};
use crate::system::VarSystem;

pub use coderivative::{
    coderivative_contains_subdiff, graph_normal_cones, isolated_calmness_skkt, lipschitz_like_skkt, subdiff_graph,
};
pub use copositive::{copositive, copositive_on, strictly_copositive, strictly_copositive_on};
pub use second_order::{quadratic_pieces, sonc_holds, sosc_holds, QuadraticPiece, SoncVerdict};

#[derive(Debug, Clone, PartialEq)]
pub struct EnlpProblem {
    phi0: Polynomial,
    system: VarSystem,
}

impl EnlpProblem {
    /// The induced variational system has `f = ∇φ₀`.
    pub fn new(phi0: Polynomial, phi: PolyMap, penalty: PlqPenalty) -> Result<EnlpProblem> {
        let f = PolyMap::gradient_of(&phi0);
        Ok(EnlpProblem { phi0, system: VarSystem::new(f, phi, penalty)? })
    }

    pub fn phi0(&self) -> &Polynomial {
        &self.phi0
    }

    pub fn system(&self) -> &VarSystem {
        &self.system
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    /// `φ₀(x) + θ(Φ(x))` in floating point; `+∞` off the domain.
    pub fn objective_f64(&self, x: &[f64]) -> Result<f64> {
        let phi = crate::stability::probes::to_rat(&self.system.phi().eval_f64(x))?;
        Ok(self.phi0.eval_f64(x) + self.system.penalty().theta_eval(&phi)?.to_f64())
    }

    /// `L(x,λ) = φ₀(x) + ⟨Φ(x),λ⟩ − ½⟨λ,Bλ⟩`.
    pub fn lagrangian(&self, x: &[Rat], lambda: &[Rat]) -> Result<Rat> {
        dim_check("x dimension", self.n(), x.len())?;
        dim_check("multiplier dimension", self.m(), lambda.len())?;
        let b = self.system.penalty().b();
        Ok(&(&self.phi0.eval(x) + &dot(&self.system.phi().eval(x), lambda)) - &(&b.quad_form(lambda) / &Rat::from_int(2)))
    }

    pub fn lagrangian_gradient_x(&self, x: &[Rat], lambda: &[Rat]) -> Result<Vector> {
        self.system.psi_eval(x, lambda)
    }

    pub fn lagrangian_hessian_xx(&self, x: &[Rat], lambda: &[Rat]) -> Result<RatMatrix> {
        self.system.psi_jacobian_x(x, lambda)
    }

    /// KKT conditions and the residual `∇ₓL(x,λ)`.
    pub fn kkt_check(&self, x: &[Rat], lambda: &[Rat]) -> Result<(bool, Vector)> {
        let g = self.lagrangian_gradient_x(x, lambda)?;
        let ok = is_zero_vec(&g) && self.system.penalty().subdiff_contains(&self.system.phi().eval(x), lambda)?;
        Ok((ok, g))
    }

    /// `N_{dom θ}(Φ(x̄)) ∩ ker ∇Φ(x̄)ᵀ = {0}`.
    pub fn bcq_holds(&self, x: &[Rat]) -> Result<bool> {
        dim_check("x dimension", self.n(), x.len())?;
        let z = self.system.phi().eval(x);
        let dom = self.system.penalty().domain_cone();
        if !dom.contains(&z) {
            return Err(Error::OutsideSet);
        }
        let normal = dom.to_polyhedron().normal_cone(&z)?;
        let j = self.system.phi().jacobian(x);
        let m = self.m();
        let mut lp = LpProblem::new(m);
        for r in normal.rows() {
            lp.le(r.clone(), Rat::zero());
        }
        for c in 0..self.n() {
            lp.equal(j.column(c), Rat::zero());
        }
        for i in 0..m {
            lp.bound(i, Rat::from_int(-1), Rat::one());
        }
        Ok(nontrivial(&lp, 0..m).is_none())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustIc {
    Holds,
    Fails,
    /// Would need local optimality without a second-order certificate.
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub bcq: bool,
    pub sosc: bool,
    pub sonc: SoncVerdict,
    pub unique: bool,
    pub noncritical: bool,
    pub isolated_calm: bool,
    pub lipschitz_like: bool,
    pub robust_ic: RobustIc,
    pub consistency_notes: Vec<String>,
    pub consistent: bool,
}

/// Evaluates every decidable stability property at a KKT pair and checks the
/// implications that must hold between them.
pub fn robust_ic_report(p: &EnlpProblem, x: &[Rat], lambda: &[Rat]) -> Result<StabilityReport> {
    if !p.kkt_check(x, lambda)?.0 {
        return Err(Error::NotSolution);
    }
    let sys = p.system();
    let bcq = match p.bcq_holds(x) {
        Ok(b) => b,
        Err(Error::OutsideSet) => false,
        Err(e) => return Err(e),
    };
    let sosc = sosc_holds(p, x, lambda)?;
    let sonc = match sonc_holds(p, x) {
        Ok(v) => v,
        Err(Error::BcqFailure) => SoncVerdict::NotApplicable,
        Err(e) => return Err(e),
    };
    let uniq = uniqueness_report(sys, x, lambda)?;
    let unique = uniq.singleton;
    let noncritical = !classify_multiplier(sys, x, lambda)?.is_critical();
    let isolated_calm = isolated_calmness_skkt(p, x, lambda)?;
    let lipschitz_like = lipschitz_like_skkt(p, x, lambda)?;
    let robust_ic = if sosc && unique {
        RobustIc::Holds
    } else if !unique || !noncritical || !isolated_calm {
        RobustIc::Fails
    } else {
        RobustIc::NotCertified
    };
    let mut notes = Vec::new();
    if sosc && !noncritical {
        notes.push("second-order sufficiency holds at a critical multiplier".to_string());
    }
    if lipschitz_like && !isolated_calm {
        notes.push("Lipschitz-like without isolated calmness".to_string());
    }
    if isolated_calm != (noncritical && unique) {
        notes.push("isolated calmness disagrees with noncriticality plus uniqueness".to_string());
    }
    if !uniq.consistent {
        notes.push("multiplier uniqueness disagrees with the dual qualification condition".to_string());
    }
    if sosc && sonc == SoncVerdict::Fails {
        notes.push("second-order sufficiency holds while the necessary condition fails".to_string());
    }
    if !sys.psi_jacobian_x(x, lambda)?.is_symmetric() {
        notes.push("Hessian of the Lagrangian is not symmetric".to_string());
    }
    Ok(StabilityReport {
        bcq,
        sosc,
        sonc,
        unique,
        noncritical,
        isolated_calm,
        lipschitz_like,
        robust_ic,
        consistent: notes.is_empty(),
        consistency_notes: notes,
    })
}
