//! Second-order conditions through face regions of the critical cone.

use serde::Serialize;

use crate::cone::PolyCone;
use crate::enlp::copositive::{copositive_on, strictly_copositive_on};
use crate::enlp::EnlpProblem;
use crate::error::{Error, Result};
use crate::fourier_motzkin::fm_project;
use crate::matrix::{dot, psd_pseudo_inverse, vadd, vscale, RatMatrix, Vector};
use crate::polyhedron::Polyhedron;
use crate::rational::Rat;
use crate::stability::Linearization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SoncVerdict {
    Holds,
    Fails,
    Inconclusive,
    /// The constraint qualification needed for the condition fails.
    NotApplicable,
}

/// On `region` the form `⟨Hw,w⟩ + 2θ_{K,B}(Jw)` equals `wᵀ form w`.
#[derive(Debug, Clone)]
pub struct QuadraticPiece {
    pub face: usize,
    pub form: RatMatrix,
    pub region: PolyCone,
}

/// Splits the domain of `w ↦ ⟨Hw,w⟩ + 2θ_{K,B}(Jw)` by the face of `K`
/// carrying the maximizer.
pub fn quadratic_pieces(lin: &Linearization) -> Result<Vec<QuadraticPiece>> {
    let (n, m) = (lin.n(), lin.m());
    let rows = lin.k.rows();
    let kmat = RatMatrix::from_rows(rows.to_vec(), m)?;
    let mut out = Vec::new();
    for (fi, face) in lin.faces.iter().enumerate() {
        let tight = &face.tight;
        let basis = kmat.select_rows(tight).nullspace();
        let k = basis.len();
        let form = if k == 0 {
            lin.h.clone()
        } else {
            let z = RatMatrix::from_columns(&basis, m);
            let g = psd_pseudo_inverse(&z.transpose().mul(&lin.b).mul(&z))?;
            let zj = z.transpose().mul(&lin.j);
            lin.h.add(&zj.transpose().mul(&g).mul(&zj))
        };
        // Variables (w, c, β); the maximizer is Zc.
        let width = n + k + tight.len();
        let mut prow = Vec::new();
        let mut palpha = Vec::new();
        for (i, a) in rows.iter().enumerate() {
            if tight.contains(&i) {
                continue;
            }
            let mut r = vec![Rat::zero(); width];
            for (q, col) in basis.iter().enumerate() {
                r[n + q] = dot(a, col);
            }
            prow.push(r);
            palpha.push(Rat::zero());
        }
        let bz: Vec<Vector> = basis.iter().map(|col| lin.b.mul_vec(col)).collect();
        for i in 0..m {
            let mut r = vec![Rat::zero(); width];
            for c in 0..n {
                r[c] = lin.j[(i, c)].clone();
            }
            for (q, v) in bz.iter().enumerate() {
                r[n + q] = -&v[i];
            }
            for (q, &t) in tight.iter().enumerate() {
                r[n + k + q] = -&rows[t][i];
            }
            prow.push(r.iter().map(|x| -x).collect());
            palpha.push(Rat::zero());
            prow.push(r);
            palpha.push(Rat::zero());
        }
        for q in 0..tight.len() {
            let mut r = vec![Rat::zero(); width];
            r[n + k + q] = Rat::from_int(-1);
            prow.push(r);
            palpha.push(Rat::zero());
        }
        let lifted = Polyhedron::new(prow, palpha, width)?;
        let keep: Vec<usize> = (0..n).collect();
        let region = fm_project(&lifted, &keep).to_cone()?;
        out.push(QuadraticPiece { face: fi, form, region });
    }
    Ok(out)
}

pub(crate) fn kkt_linearization(p: &EnlpProblem, x: &[Rat], lambda: &[Rat]) -> Result<Linearization> {
    if !p.kkt_check(x, lambda)?.0 {
        return Err(Error::NotSolution);
    }
    Linearization::at(p.system(), x, lambda)
}

/// Strict positivity of `⟨∇²L w,w⟩ + 2θ_{K,B}(∇Φ(x̄)w)` for `w ≠ 0`.
pub fn sosc_holds(p: &EnlpProblem, x: &[Rat], lambda: &[Rat]) -> Result<bool> {
    let lin = kkt_linearization(p, x, lambda)?;
    Ok(quadratic_pieces(&lin)?.iter().all(|q| strictly_copositive_on(&q.form, &q.region)))
}

fn nonnegative_at(lin: &Linearization) -> Result<bool> {
    Ok(quadratic_pieces(lin)?.iter().all(|q| copositive_on(&q.form, &q.region)))
}

/// Second-order necessary condition at a stationary point. Exact for a
/// unique multiplier; with several multipliers it holds when the critical
/// cones agree at the sampled multipliers and one vertex of `Λ(x̄)` already
/// certifies nonnegativity, and is inconclusive otherwise.
pub fn sonc_holds(p: &EnlpProblem, x: &[Rat]) -> Result<SoncVerdict> {
    if !p.bcq_holds(x)? {
        return Err(Error::BcqFailure);
    }
    let ms = p.system().multiplier_set(x)?;
    if ms.empty {
        return Err(Error::NotSolution);
    }
    if ms.singleton {
        let l = ms.representative.expect("nonempty set");
        let lin = kkt_linearization(p, x, &l)?;
        return Ok(if nonnegative_at(&lin)? { SoncVerdict::Holds } else { SoncVerdict::Fails });
    }
    let gens = ms.set.generators().expect("nonempty set");
    let count = Rat::from_int(gens.points.len() as i64);
    let mut inner = vec![Rat::zero(); p.m()];
    for v in &gens.points {
        inner = vadd(&inner, &vscale(v, &count.recip()));
    }
    for r in &gens.rays {
        inner = vadd(&inner, r);
    }
    let reference = kkt_linearization(p, x, &inner)?;
    let mut certified = false;
    for v in &gens.points {
        let lin = kkt_linearization(p, x, v)?;
        if lin.k != reference.k {
            return Ok(SoncVerdict::Inconclusive);
        }
        certified = certified || nonnegative_at(&lin)?;
    }
    Ok(if certified { SoncVerdict::Holds } else { SoncVerdict::Inconclusive })
}
