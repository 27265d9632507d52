//! Finite unions of polyhedra and their limiting normal cones.

use std::collections::{BTreeMap, BTreeSet};

use crate::cone::PolyCone;
use crate::error::{dim_check, Error, Result};
use crate::lp::{lp_solve, LpProblem};
use crate::matrix::{dot, Vector};
use crate::polyhedron::Polyhedron;
use crate::rational::{primitive, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyUnion {
    pieces: Vec<Polyhedron>,
    dim: usize,
}

impl PolyUnion {
    pub fn new(pieces: Vec<Polyhedron>, dim: usize) -> Result<PolyUnion> {
        for p in &pieces {
            dim_check("union piece dimension", dim, p.dim())?;
        }
        Ok(PolyUnion { pieces, dim })
    }

    pub fn pieces(&self) -> &[Polyhedron] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, y: &[Rat]) -> bool {
        self.pieces.iter().any(|p| p.contains(y))
    }
}

/// A finite union of polyhedral cones.
#[derive(Debug, Clone)]
pub struct ConeUnion {
    pub cones: Vec<PolyCone>,
    pub dim: usize,
}

impl ConeUnion {
    pub fn contains(&self, w: &[Rat]) -> bool {
        self.cones.iter().any(|c| c.contains(w))
    }
}

/// Limiting normal cone of a finite union of polyhedra at `p`.
///
/// Near `p` the union agrees with `p` plus the union of the tangent cones of the
/// pieces containing `p`. The cells of the hyperplane arrangement of all their
/// constraints partition that union; on a cell the regular normal cone is the
/// intersection of the pieces' normal cones at a relative-interior point. The
/// result lists the maximal such cones.
pub fn limiting_normal_cone_union(u: &PolyUnion, p: &[Rat]) -> Result<ConeUnion> {
    dim_check("point dimension", u.dim, p.len())?;
    let d = u.dim;
    let tangents: Vec<PolyCone> =
        u.pieces.iter().filter(|q| q.contains(p)).map(|q| q.tangent_cone(p)).collect::<Result<_>>()?;
    if tangents.is_empty() {
        return Err(Error::OutsideSet);
    }
    let mut hyper: Vec<Vector> = Vec::new();
    let mut seen = BTreeSet::new();
    for t in &tangents {
        for r in t.rows() {
            let mut h = primitive(r);
            if h.iter().find(|x| !x.is_zero()).is_some_and(Rat::is_negative) {
                h = h.iter().map(|x| -x).collect();
            }
            if seen.insert(h.clone()) {
                hyper.push(h);
            }
        }
    }

    let mut cells: BTreeMap<Vec<i8>, Vector> = BTreeMap::new();
    for t in &tangents {
        let mut signs = Vec::with_capacity(hyper.len());
        enumerate_cells(t, &hyper, &mut signs, d, &mut cells);
    }

    let mut normal_cache: BTreeMap<(usize, Vec<usize>), PolyCone> = BTreeMap::new();
    let mut cones: Vec<PolyCone> = Vec::new();
    for w in cells.values() {
        let mut rows: Vec<Vector> = Vec::new();
        for (k, t) in tangents.iter().enumerate() {
            if !t.contains(w) {
                continue;
            }
            let active: Vec<usize> = (0..t.rows().len()).filter(|&i| dot(&t.rows()[i], w).is_zero()).collect();
            let n = normal_cache.entry((k, active.clone())).or_insert_with(|| {
                let gens: Vec<Vector> = active.iter().map(|&i| t.rows()[i].clone()).collect();
                PolyCone::from_generators(&gens, &[], d)
            });
            rows.extend(n.rows().iter().cloned());
        }
        let c = PolyCone::new(rows, d)?;
        if cones.iter().any(|e| c.is_subset(e)) {
            continue;
        }
        cones.retain(|e| !e.is_subset(&c));
        cones.push(c);
    }
    Ok(ConeUnion { cones, dim: d })
}

fn enumerate_cells(
    base: &PolyCone,
    hyper: &[Vector],
    signs: &mut Vec<i8>,
    d: usize,
    out: &mut BTreeMap<Vec<i8>, Vector>,
) {
    let Some(point) = cell_point(base, hyper, signs, d) else {
        return;
    };
    if signs.len() == hyper.len() {
        out.entry(signs.clone()).or_insert(point);
        return;
    }
    for s in [-1i8, 0, 1] {
        signs.push(s);
        enumerate_cells(base, hyper, signs, d, out);
        signs.pop();
    }
}

fn cell_point(base: &PolyCone, hyper: &[Vector], signs: &[i8], d: usize) -> Option<Vector> {
    let mut lp = LpProblem::new(d);
    for r in base.rows() {
        lp.le(r.clone(), Rat::zero());
    }
    for (h, &s) in hyper.iter().zip(signs) {
        match s {
            -1 => {
                lp.le(h.clone(), Rat::from_int(-1));
            }
            0 => {
                lp.equal(h.clone(), Rat::zero());
            }
            _ => {
                lp.ge(h.clone(), Rat::one());
            }
        }
    }
    lp_solve(&lp).feasible_point().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ints;

    fn poly(rows: &[&[i64]], alpha: &[i64]) -> Polyhedron {
        Polyhedron::new(rows.iter().map(|r| ints(r)).collect(), ints(alpha), rows[0].len()).unwrap()
    }

    #[test]
    fn convex_case_is_normal_cone() {
        let q = Polyhedron::orthant(2);
        let u = PolyUnion::new(vec![q.clone()], 2).unwrap();
        let n = limiting_normal_cone_union(&u, &ints(&[0, 0])).unwrap();
        assert_eq!(n.cones.len(), 1);
        assert_eq!(n.cones[0], q.normal_cone(&ints(&[0, 0])).unwrap());
    }

    #[test]
    fn cross_of_half_axes() {
        let a = poly(&[&[0, 1], &[0, -1], &[-1, 0]], &[0, 0, 0]);
        let b = poly(&[&[1, 0], &[-1, 0], &[0, -1]], &[0, 0, 0]);
        let u = PolyUnion::new(vec![a, b], 2).unwrap();
        let n = limiting_normal_cone_union(&u, &ints(&[0, 0])).unwrap();
        assert!(n.contains(&ints(&[0, 5])) && n.contains(&ints(&[0, -5])));
        assert!(n.contains(&ints(&[5, 0])) && n.contains(&ints(&[-5, 0])));
        assert!(n.contains(&ints(&[-1, -3])));
        assert!(!n.contains(&ints(&[1, 1])));
        assert!(!n.contains(&ints(&[1, -1])));
        assert!(!n.contains(&ints(&[-1, 1])));
    }

    #[test]
    fn whole_space_has_trivial_normals() {
        let u = PolyUnion::new(vec![Polyhedron::whole_space(2)], 2).unwrap();
        let n = limiting_normal_cone_union(&u, &ints(&[1, 1])).unwrap();
        assert!(n.cones.iter().all(PolyCone::is_zero));
    }

    #[test]
    fn outside_point_is_rejected() {
        let u = PolyUnion::new(vec![Polyhedron::orthant(1)], 1).unwrap();
        assert!(limiting_normal_cone_union(&u, &ints(&[-1])).is_err());
    }
}
