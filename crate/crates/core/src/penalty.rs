//! The piecewise linear-quadratic penalty `θ(u) = sup_{y∈Y} ⟨y,u⟩ − ½⟨y,By⟩`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cone::PolyCone;
use crate::error::{dim_check, Error, Result};
use crate::matrix::{dot, ldl, vadd, vneg, vsub, RatMatrix, Vector};
use crate::polyhedron::{in_generated_cone, Polyhedron};
use crate::qp::{qp_solve, QpOutcome};
use crate::rational::Rat;

/// A value in `(−∞, +∞]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtReal {
    Finite(Rat),
    PlusInfinity,
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PlusInfinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.to_f64(),
            ExtReal::PlusInfinity => f64::INFINITY,
        }
    }

    /// Sum with `+∞` absorbing.
    pub fn add(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PlusInfinity,
        }
    }

    /// Product with a nonnegative scalar; `0 · ∞ = ∞`.
    pub fn scale(&self, s: &Rat) -> ExtReal {
        assert!(!s.is_negative(), "scaling an extended real by a negative number");
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(a * s),
            ExtReal::PlusInfinity => ExtReal::PlusInfinity,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &ExtReal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &ExtReal) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
            (ExtReal::Finite(_), ExtReal::PlusInfinity) => Ordering::Less,
            (ExtReal::PlusInfinity, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::PlusInfinity, ExtReal::PlusInfinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PlusInfinity => f.write_str("+inf"),
        }
    }
}

impl From<Rat> for ExtReal {
    fn from(v: Rat) -> ExtReal {
        ExtReal::Finite(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PenaltyData", into = "PenaltyData")]
pub struct PlqPenalty {
    y: Polyhedron,
    b: RatMatrix,
}

#[derive(Serialize, Deserialize)]
struct PenaltyData {
    #[serde(rename = "Y")]
    y: Polyhedron,
    #[serde(rename = "B")]
    b: RatMatrix,
}

impl TryFrom<PenaltyData> for PlqPenalty {
    type Error = Error;
    fn try_from(d: PenaltyData) -> Result<PlqPenalty> {
        PlqPenalty::new(d.y, d.b)
    }
}

impl From<PlqPenalty> for PenaltyData {
    fn from(p: PlqPenalty) -> PenaltyData {
        PenaltyData { y: p.y, b: p.b }
    }
}

/// Result of evaluating the proximal mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxResult {
    pub prox: Vector,
    /// `x − prox(x)`, the maximizer of the conjugate problem.
    pub dual: Vector,
    /// Rows of `Y` with a positive multiplier in that problem.
    pub active: Vec<usize>,
}

impl PlqPenalty {
    /// Verifies that `B` is symmetric PSD, dimensions agree and `Y` is nonempty.
    pub fn new(y: Polyhedron, b: RatMatrix) -> Result<PlqPenalty> {
        if !b.is_square() {
            return Err(Error::Dimension("B must be square".into()));
        }
        dim_check("B size vs Y dimension", y.dim(), b.nrows())?;
        if !ldl(&b)?.psd {
            return Err(Error::NotPsd);
        }
        if y.is_empty() {
            return Err(Error::EmptySet("Y".into()));
        }
        Ok(PlqPenalty { y, b })
    }

    pub fn dim(&self) -> usize {
        self.y.dim()
    }

    pub fn y(&self) -> &Polyhedron {
        &self.y
    }

    pub fn b(&self) -> &RatMatrix {
        &self.b
    }

    /// Maximizer of `⟨y,u⟩ − ½⟨y,By⟩` over `Y`, or `None` when the sup is `+∞`.
    pub fn argmax(&self, u: &[Rat]) -> Result<Option<Vector>> {
        dim_check("argument dimension", self.dim(), u.len())?;
        match qp_solve(&self.b, &vneg(u), &self.y)? {
            QpOutcome::Optimal(s) => Ok(Some(s.point)),
            QpOutcome::Unbounded { .. } => Ok(None),
            QpOutcome::Infeasible => unreachable!("Y is nonempty"),
        }
    }

    pub fn theta_eval(&self, u: &[Rat]) -> Result<ExtReal> {
        Ok(match self.argmax(u)? {
            Some(y) => ExtReal::Finite(self.fenchel_value(u, &y)),
            None => ExtReal::PlusInfinity,
        })
    }

    /// `⟨y,u⟩ − ½⟨y,By⟩`.
    pub fn fenchel_value(&self, u: &[Rat], y: &[Rat]) -> Rat {
        &dot(y, u) - &(&self.b.quad_form(y) / &Rat::from_int(2))
    }

    /// `dom θ = (Y^∞ ∩ ker B)°`.
    pub fn domain_cone(&self) -> PolyCone {
        let mut rows = self.y.rows().to_vec();
        for i in 0..self.dim() {
            rows.push(self.b.row(i).to_vec());
            rows.push(vneg(self.b.row(i)));
        }
        PolyCone::new(rows, self.dim()).expect("consistent rows").dual_cone()
    }

    pub fn domain_contains(&self, u: &[Rat]) -> bool {
        self.domain_cone().contains(u)
    }

    /// `∂θ(u)` as the solution set of the defining QP; empty off the domain.
    pub fn subdiff_set(&self, u: &[Rat]) -> Result<Polyhedron> {
        let m = self.dim();
        let Some(ys) = self.argmax(u)? else {
            return Ok(Polyhedron::empty(m));
        };
        let bys = self.b.mul_vec(&ys);
        let mut rows = Vec::new();
        let mut alpha = Vec::new();
        for i in 0..m {
            rows.push(self.b.row(i).to_vec());
            alpha.push(bys[i].clone());
            rows.push(vneg(self.b.row(i)));
            alpha.push(-&bys[i]);
        }
        let g = vsub(u, &bys);
        let gy = dot(&g, &ys);
        rows.push(g.clone());
        alpha.push(gy.clone());
        rows.push(vneg(&g));
        alpha.push(-gy);
        self.y.with_rows(rows, alpha)
    }

    /// `λ ∈ ∂θ(u)  ⟺  λ ∈ Y and u − Bλ ∈ N_Y(λ)`.
    pub fn subdiff_contains(&self, u: &[Rat], lambda: &[Rat]) -> Result<bool> {
        dim_check("argument dimension", self.dim(), u.len())?;
        dim_check("multiplier dimension", self.dim(), lambda.len())?;
        if !self.y.contains(lambda) {
            return Ok(false);
        }
        let v = vsub(u, &self.b.mul_vec(lambda));
        self.y.is_normal(lambda, &v)
    }

    /// `(∂θ)^{-1}(λ) = Bλ + N_Y(λ)`; empty when `λ ∉ Y`.
    pub fn inverse_subdiff_set(&self, lambda: &[Rat]) -> Result<Polyhedron> {
        let m = self.dim();
        dim_check("multiplier dimension", m, lambda.len())?;
        if !self.y.contains(lambda) {
            return Ok(Polyhedron::empty(m));
        }
        let n = self.y.normal_cone(lambda)?;
        let shift = self.b.mul_vec(lambda);
        let rows = n.rows().to_vec();
        let alpha = rows.iter().map(|r| dot(r, &shift)).collect();
        Polyhedron::new(rows, alpha, m)
    }

    /// Proximal mapping through the conjugate problem
    /// `min_{y∈Y} ½⟨y,By⟩ + ½‖x − y‖²`; the identity `x − prox(x) ∈ ∂θ(prox(x))`
    /// is checked on every call.
    pub fn prox_full(&self, x: &[Rat]) -> Result<ProxResult> {
        let r = self.prox_unchecked(x)?;
        assert!(self.subdiff_contains(&r.prox, &r.dual)?, "proximal identity violated");
        Ok(r)
    }

    pub(crate) fn prox_unchecked(&self, x: &[Rat]) -> Result<ProxResult> {
        let m = self.dim();
        dim_check("argument dimension", m, x.len())?;
        let q = self.b.add(&RatMatrix::identity(m));
        let s = match qp_solve(&q, &vneg(x), &self.y)? {
            QpOutcome::Optimal(s) => s,
            _ => unreachable!("strongly convex problem over a nonempty set"),
        };
        let prox = vsub(x, &s.point);
        let active = (0..s.multipliers.len()).filter(|&i| s.multipliers[i].is_positive()).collect();
        Ok(ProxResult { prox, dual: s.point, active })
    }

    pub fn prox(&self, x: &[Rat]) -> Result<Vector> {
        Ok(self.prox_full(x)?.prox)
    }

    /// Critical cone `K = T_Y(λ̄) ∩ {z̄ − Bλ̄}^⊥` at a graph point.
    pub fn critical_cone_at(&self, z: &[Rat], lambda: &[Rat]) -> Result<PolyCone> {
        if !self.subdiff_contains(z, lambda)? {
            return Err(Error::NotInGraph);
        }
        let v = vsub(z, &self.b.mul_vec(lambda));
        self.y.critical_cone(lambda, &v)
    }

    /// The penalty with `Y` replaced by the critical cone at `(z̄, λ̄)`.
    pub fn critical_penalty(&self, z: &[Rat], lambda: &[Rat]) -> Result<PlqPenalty> {
        let k = self.critical_cone_at(z, lambda)?;
        Ok(PlqPenalty { y: k.to_polyhedron(), b: self.b.clone() })
    }

    /// `d²θ(z̄,λ̄)(u) = 2 θ_{K,B}(u)`.
    pub fn second_subderivative(&self, z: &[Rat], lambda: &[Rat], u: &[Rat]) -> Result<ExtReal> {
        let pk = self.critical_penalty(z, lambda)?;
        Ok(pk.theta_eval(u)?.scale(&Rat::from_int(2)))
    }

    /// `η ∈ D∂θ(z̄,λ̄)(u)  ⟺  η ∈ K, u − Bη ∈ K°, ⟨u − Bη, η⟩ = 0`.
    pub fn graph_derivative_contains(&self, z: &[Rat], lambda: &[Rat], u: &[Rat], eta: &[Rat]) -> Result<bool> {
        let k = self.critical_cone_at(z, lambda)?;
        dim_check("direction dimension", self.dim(), u.len())?;
        dim_check("direction dimension", self.dim(), eta.len())?;
        if !k.contains(eta) {
            return Ok(false);
        }
        let v = vsub(u, &self.b.mul_vec(eta));
        if !dot(&v, eta).is_zero() {
            return Ok(false);
        }
        Ok(k.dual_cone().contains(&v))
    }

    /// `(θ(x̄+tw) − θ(x̄) − t⟨ȳ,w⟩) / (½t²)`.
    pub fn difference_quotient(&self, x: &[Rat], y: &[Rat], w: &[Rat], t: &Rat) -> Result<ExtReal> {
        if !t.is_positive() {
            return Err(Error::InvalidArgument("difference quotient needs t > 0".into()));
        }
        dim_check("direction dimension", self.dim(), w.len())?;
        let base = match self.theta_eval(x)? {
            ExtReal::Finite(v) => v,
            ExtReal::PlusInfinity => {
                return Err(Error::InvalidArgument("base point outside the domain".into()))
            }
        };
        let moved: Vector = vadd(x, &w.iter().map(|v| v * t).collect::<Vec<_>>());
        Ok(match self.theta_eval(&moved)? {
            ExtReal::Finite(v) => {
                let num = &(&v - &base) - &(t * &dot(y, w));
                ExtReal::Finite(&num / &(&(t * t) / &Rat::from_int(2)))
            }
            ExtReal::PlusInfinity => ExtReal::PlusInfinity,
        })
    }

    /// Normal cone generators of `Y` at `λ` (the tight rows).
    pub fn normal_generators(&self, lambda: &[Rat]) -> Result<Vec<Vector>> {
        Ok(self.y.active_indices(lambda)?.into_iter().map(|i| self.y.rows()[i].clone()).collect())
    }

    /// Fenchel equality `θ(u) = ⟨λ,u⟩ − ½⟨λ,Bλ⟩` with `λ ∈ Y`.
    pub fn fenchel_equality(&self, u: &[Rat], lambda: &[Rat]) -> Result<bool> {
        if !self.y.contains(lambda) {
            return Ok(false);
        }
        Ok(self.theta_eval(u)? == ExtReal::Finite(self.fenchel_value(u, lambda)))
    }
}

/// Is `v` a nonnegative combination of the tight rows of `Y` at `λ`?
pub fn in_normal_cone(y: &Polyhedron, lambda: &[Rat], v: &[Rat]) -> Result<bool> {
    let gens: Vec<Vector> = y.active_indices(lambda)?.into_iter().map(|i| y.rows()[i].clone()).collect();
    Ok(in_generated_cone(&gens, v))
}
