//! Polyhedral cones `{w : ⟨aᵢ,w⟩ ≤ 0}` with a lazily computed generator form.
//!
//! Generators come from the incremental double description method with the
//! combinatorial adjacency test. The work grows with the number of
//! intermediate rays; this is meant for dimensions up to about 8.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{dim_check, Result};
use crate::matrix::{dot, is_zero_vec, RatMatrix, Vector};
use crate::polyhedron::{Face, Polyhedron};
use crate::rational::{primitive, Rat};

/// Whether `dual_cone` returns the polar `{v : ⟨v,w⟩ ≤ 0 ∀w}` (true) or the
/// positive dual `{v : ⟨v,w⟩ ≥ 0 ∀w}` (false). The criticality system uses
/// `dual_cone`, so this is the single place fixing that sign.
pub const DUAL_IS_POLAR: bool = true;

/// Extreme rays (modulo lineality) plus a lineality basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConeGenerators {
    pub rays: Vec<Vector>,
    pub lineality: Vec<Vector>,
}

impl ConeGenerators {
    /// Rays together with both signs of each lineality vector.
    pub fn all(&self) -> Vec<Vector> {
        let mut v = self.rays.clone();
        for l in &self.lineality {
            v.push(l.clone());
            v.push(l.iter().map(|x| -x).collect());
        }
        v
    }
}

pub struct PolyCone {
    rows: Vec<Vector>,
    dim: usize,
    gens: OnceLock<ConeGenerators>,
}

impl Clone for PolyCone {
    fn clone(&self) -> PolyCone {
        let gens = OnceLock::new();
        if let Some(g) = self.gens.get() {
            let _ = gens.set(g.clone());
        }
        PolyCone { rows: self.rows.clone(), dim: self.dim, gens }
    }
}

impl fmt::Debug for PolyCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyCone").field("rows", &self.rows).field("dim", &self.dim).finish()
    }
}

impl PartialEq for PolyCone {
    /// Set equality.
    fn eq(&self, other: &PolyCone) -> bool {
        self.dim == other.dim && self.is_subset(other) && other.is_subset(self)
    }
}

impl PolyCone {
    /// Zero rows are dropped; other rows are scaled to primitive integers and deduplicated.
    pub fn new(rows: Vec<Vector>, dim: usize) -> Result<PolyCone> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for r in rows {
            dim_check("cone row length", dim, r.len())?;
            if is_zero_vec(&r) {
                continue;
            }
            let p = primitive(&r);
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
        Ok(PolyCone { rows: out, dim, gens: OnceLock::new() })
    }

    pub fn whole_space(dim: usize) -> PolyCone {
        PolyCone { rows: Vec::new(), dim, gens: OnceLock::new() }
    }

    pub fn zero(dim: usize) -> PolyCone {
        let mut rows = Vec::new();
        for i in 0..dim {
            let mut e = vec![Rat::zero(); dim];
            e[i] = Rat::one();
            rows.push(e.clone());
            e[i] = Rat::from_int(-1);
            rows.push(e);
        }
        PolyCone::new(rows, dim).expect("unit rows")
    }

    pub fn orthant(dim: usize) -> PolyCone {
        Polyhedron::orthant(dim).to_cone().expect("orthant is a cone")
    }

    /// H-representation of `cone(rays) + span(lineality)` through the polar.
    pub fn from_generators(rays: &[Vector], lineality: &[Vector], dim: usize) -> PolyCone {
        let mut polar_rows: Vec<Vector> = rays.to_vec();
        for l in lineality {
            polar_rows.push(l.clone());
            polar_rows.push(l.iter().map(|x| -x).collect());
        }
        let polar = PolyCone::new(polar_rows, dim).expect("generator lengths");
        let g = polar.generators();
        PolyCone::new(g.all(), dim).expect("generator lengths")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn to_polyhedron(&self) -> Polyhedron {
        Polyhedron::new(self.rows.clone(), vec![Rat::zero(); self.rows.len()], self.dim).expect("cone rows")
    }

    pub fn contains(&self, w: &[Rat]) -> bool {
        w.len() == self.dim && self.rows.iter().all(|a| !dot(a, w).is_positive())
    }

    pub fn generators(&self) -> &ConeGenerators {
        self.gens.get_or_init(|| double_description(&self.rows, self.dim))
    }

    pub fn is_zero(&self) -> bool {
        let g = self.generators();
        g.rays.is_empty() && g.lineality.is_empty()
    }

    pub fn is_pointed(&self) -> bool {
        self.generators().lineality.is_empty()
    }

    pub fn polar(&self) -> PolyCone {
        PolyCone::from_generators(&self.rows, &[], self.dim)
    }

    pub fn positive_dual(&self) -> PolyCone {
        let neg: Vec<Vector> = self.rows.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        PolyCone::from_generators(&neg, &[], self.dim)
    }

    pub fn dual_cone(&self) -> PolyCone {
        if DUAL_IS_POLAR {
            self.polar()
        } else {
            self.positive_dual()
        }
    }

    pub fn negate(&self) -> PolyCone {
        let rows = self.rows.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        PolyCone::new(rows, self.dim).expect("same lengths")
    }

    pub fn intersect(&self, other: &PolyCone) -> Result<PolyCone> {
        dim_check("cone intersection dimension", self.dim, other.dim)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        PolyCone::new(rows, self.dim)
    }

    /// Minkowski sum, via generators.
    pub fn sum(&self, other: &PolyCone) -> Result<PolyCone> {
        dim_check("cone sum dimension", self.dim, other.dim)?;
        let a = self.generators();
        let b = other.generators();
        let rays: Vec<Vector> = a.rays.iter().chain(&b.rays).cloned().collect();
        let lin: Vec<Vector> = a.lineality.iter().chain(&b.lineality).cloned().collect();
        Ok(PolyCone::from_generators(&rays, &lin, self.dim))
    }

    pub fn is_subset(&self, other: &PolyCone) -> bool {
        self.generators().all().iter().all(|g| other.contains(g))
    }

    /// Nonempty faces, each with its tight row set and the face as a cone.
    pub fn faces(&self) -> Vec<Face> {
        self.to_polyhedron().faces()
    }
}

/// Small fixed-width bitset for ray incidence sets.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn superset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

fn double_description(rows: &[Vector], dim: usize) -> ConeGenerators {
    let a = RatMatrix::from_rows(rows.to_vec(), dim).expect("cone rows");
    let lineality = a.nullspace().into_iter().map(|v| primitive(&v)).collect::<Vec<_>>();
    if rows.is_empty() {
        return ConeGenerators { rays: Vec::new(), lineality };
    }
    // Parametrize the row space: w = Uᵀz with U the independent rows.
    let basis_idx = a.independent_rows();
    let r = basis_idx.len();
    if r == 0 {
        return ConeGenerators { rays: Vec::new(), lineality };
    }
    let u = a.select_rows(&basis_idx);
    let ar = a.mul(&u.transpose());
    let p = rows.len();

    let start = ar.independent_rows();
    debug_assert_eq!(start.len(), r);
    let inv = ar.select_rows(&start).inverse().expect("independent rows");
    let mut rays: Vec<(Vector, Bits)> = Vec::new();
    for k in 0..r {
        let ray: Vector = (0..r).map(|i| -&inv[(i, k)]).collect();
        let mut z = Bits::new(p);
        for (t, &s) in start.iter().enumerate() {
            if t != k {
                z.set(s);
            }
        }
        rays.push((primitive(&ray), z));
    }
    let mut processed = vec![false; p];
    for &s in &start {
        processed[s] = true;
    }
    for i in 0..p {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let row = ar.row(i);
        let vals: Vec<Rat> = rays.iter().map(|(v, _)| dot(row, v)).collect();
        let mut next = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (k, (v, z)) in rays.iter().enumerate() {
            match vals[k].signum() {
                1 => pos.push(k),
                -1 => {
                    neg.push(k);
                    next.push((v.clone(), z.clone()));
                }
                _ => {
                    let mut z = z.clone();
                    z.set(i);
                    next.push((v.clone(), z));
                }
            }
        }
        for &ip in &pos {
            for &in_ in &neg {
                let common = rays[ip].1.and(&rays[in_].1);
                if common.count() + 2 < r {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, (_, z))| k != ip && k != in_ && z.superset_of(&common));
                if blocked {
                    continue;
                }
                let vp = &vals[ip];
                let vn = &vals[in_];
                let combo: Vector =
                    rays[in_].0.iter().zip(&rays[ip].0).map(|(xn, xp)| &(vp * xn) - &(vn * xp)).collect();
                let mut z = common;
                z.set(i);
                next.push((primitive(&combo), z));
            }
        }
        rays = next;
    }
    let ut = u.transpose();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (z, _) in rays {
        let w = primitive(&ut.mul_vec(&z));
        if !is_zero_vec(&w) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    ConeGenerators { rays: out, lineality }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ints;

    fn cone(rows: &[&[i64]]) -> PolyCone {
        let d = rows[0].len();
        PolyCone::new(rows.iter().map(|r| ints(r)).collect(), d).unwrap()
    }

    #[test]
    fn orthant_generators() {
        let g = PolyCone::orthant(3).generators().clone();
        assert_eq!(g.rays.len(), 3);
        assert!(g.lineality.is_empty());
    }

    #[test]
    fn halfplane_has_lineality() {
        let g = cone(&[&[-1, 0]]).generators().clone();
        assert_eq!(g.rays, vec![ints(&[1, 0])]);
        assert_eq!(g.lineality.len(), 1);
    }

    #[test]
    fn square_pyramid_needs_adjacency() {
        // Four facets through the origin: rays are (±1,±1,1).
        let c = cone(&[&[1, 0, -1], &[-1, 0, -1], &[0, 1, -1], &[0, -1, -1]]);
        let mut rays = c.generators().rays.clone();
        rays.sort();
        assert_eq!(rays, vec![ints(&[-1, -1, 1]), ints(&[-1, 1, 1]), ints(&[1, -1, 1]), ints(&[1, 1, 1])]);
    }

    #[test]
    fn polar_of_orthant_is_negative_orthant() {
        let p = PolyCone::orthant(2).polar();
        assert!(p.contains(&ints(&[-1, -2])));
        assert!(!p.contains(&ints(&[1, 0])));
        assert_eq!(PolyCone::orthant(2).positive_dual(), PolyCone::orthant(2));
    }

    #[test]
    fn polar_of_half_line_product() {
        // R₊ × R: polar is R₋ × {0}
        let c = cone(&[&[-1, 0]]);
        let p = c.dual_cone();
        assert!(p.contains(&ints(&[-1, 0])));
        assert!(!p.contains(&ints(&[-1, 1])));
        assert!(!p.contains(&ints(&[1, 0])));
        assert_eq!(c.positive_dual(), cone(&[&[-1, 0], &[0, 1], &[0, -1]]));
    }

    #[test]
    fn zero_and_whole_space_are_mutual_duals() {
        assert_eq!(PolyCone::zero(2).polar(), PolyCone::whole_space(2));
        assert!(PolyCone::whole_space(2).polar().is_zero());
    }

    #[test]
    fn face_counts() {
        assert_eq!(PolyCone::orthant(2).faces().len(), 4);
        assert_eq!(cone(&[&[1, -1], &[-1, 1]]).faces().len(), 1);
        assert_eq!(cone(&[&[-1, 0], &[-1, 1]]).faces().len(), 4);
    }
}
