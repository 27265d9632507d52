//! Graph of `∂θ`, its limiting normals, and the calmness and Aubin criteria
//! for the KKT solution map.

use crate::enlp::second_order::kkt_linearization;
use crate::enlp::EnlpProblem;
use crate::error::{Error, Result};
use crate::fourier_motzkin::fm_project;
use crate::lp::LpProblem;
use crate::matrix::{vneg, Vector};
use crate::penalty::PlqPenalty;
use crate::polyhedron::Polyhedron;
use crate::rational::Rat;
use crate::stability::criticality::nontrivial;
use crate::union::{limiting_normal_cone_union, ConeUnion, PolyUnion};

/// `gph ∂θ` in `(z, λ)` coordinates, one piece per face of `Y`.
pub fn subdiff_graph(pen: &PlqPenalty) -> Result<PolyUnion> {
    let m = pen.dim();
    let y = pen.y();
    let mut pieces = Vec::new();
    for face in y.faces() {
        let tight = &face.tight;
        let width = 2 * m + tight.len();
        let mut rows = Vec::new();
        let mut alpha = Vec::new();
        for (i, b) in y.rows().iter().enumerate() {
            let mut r = vec![Rat::zero(); width];
            r[m..2 * m].clone_from_slice(b);
            if tight.contains(&i) {
                rows.push(vneg(&r));
                alpha.push(-&y.alpha()[i]);
            }
            rows.push(r);
            alpha.push(y.alpha()[i].clone());
        }
        for i in 0..m {
            let mut r = vec![Rat::zero(); width];
            r[i] = Rat::one();
            for l in 0..m {
                r[m + l] = -&pen.b()[(i, l)];
            }
            for (q, &t) in tight.iter().enumerate() {
                r[2 * m + q] = -&y.rows()[t][i];
            }
            rows.push(vneg(&r));
            alpha.push(Rat::zero());
            rows.push(r);
            alpha.push(Rat::zero());
        }
        for q in 0..tight.len() {
            let mut r = vec![Rat::zero(); width];
            r[2 * m + q] = Rat::from_int(-1);
            rows.push(r);
            alpha.push(Rat::zero());
        }
        let lifted = Polyhedron::new(rows, alpha, width)?;
        let keep: Vec<usize> = (0..2 * m).collect();
        pieces.push(fm_project(&lifted, &keep));
    }
    PolyUnion::new(pieces, 2 * m)
}

/// Limiting normal cone to `gph ∂θ` at `(z̄, λ̄)` as a union of cones.
pub fn graph_normal_cones(pen: &PlqPenalty, z: &[Rat], lambda: &[Rat]) -> Result<ConeUnion> {
    if !pen.subdiff_contains(z, lambda)? {
        return Err(Error::NotInGraph);
    }
    let mut p = z.to_vec();
    p.extend_from_slice(lambda);
    limiting_normal_cone_union(&subdiff_graph(pen)?, &p)
}

/// `u ∈ D*∂θ(z̄,λ̄)(w)`, i.e. `(u, −w)` is a limiting normal to the graph.
pub fn coderivative_contains_subdiff(pen: &PlqPenalty, z: &[Rat], lambda: &[Rat], w: &[Rat], u: &[Rat]) -> Result<bool> {
    let cones = graph_normal_cones(pen, z, lambda)?;
    let mut v: Vector = u.to_vec();
    v.extend(vneg(w));
    Ok(cones.contains(&v))
}

/// Only `(ξ, η) = 0` solves the linearized KKT system at `(x̄, λ̄)`.
pub fn isolated_calmness_skkt(p: &EnlpProblem, x: &[Rat], lambda: &[Rat]) -> Result<bool> {
    Ok(kkt_linearization(p, x, lambda)?.nonzero_solution().is_none())
}

/// Coderivative criterion: only `(ξ, η) = 0` satisfies `∇²L ξ + ∇Φᵀη = 0`
/// with `η ∈ D*∂θ(Φ(x̄),λ̄)(∇Φ(x̄)ξ)`.
pub fn lipschitz_like_skkt(p: &EnlpProblem, x: &[Rat], lambda: &[Rat]) -> Result<bool> {
    let lin = kkt_linearization(p, x, lambda)?;
    let (n, m) = (lin.n(), lin.m());
    let cones = graph_normal_cones(p.system().penalty(), &lin.z, lambda)?;
    let width = n + m;
    for cone in &cones.cones {
        let mut lp = LpProblem::new(width);
        for r in 0..n {
            let mut a = vec![Rat::zero(); width];
            for c in 0..n {
                a[c] = lin.h[(r, c)].clone();
            }
            for i in 0..m {
                a[n + i] = lin.j[(i, r)].clone();
            }
            lp.equal(a, Rat::zero());
        }
        // c_z·η − c_λ·(Jξ) ≤ 0
        for row in cone.rows() {
            let mut a = vec![Rat::zero(); width];
            let cj = lin.j.tr_mul_vec(&row[m..]);
            for c in 0..n {
                a[c] = -&cj[c];
            }
            a[n..].clone_from_slice(&row[..m]);
            lp.le(a, Rat::zero());
        }
        for j in 0..width {
            lp.bound(j, Rat::from_int(-1), Rat::one());
        }
        if nontrivial(&lp, 0..width).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}
