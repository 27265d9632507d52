//! Polyhedra in H-representation `{y : ⟨bᵢ,y⟩ ≤ αᵢ}`.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cone::PolyCone;
use crate::error::{dim_check, Error, Result};
use crate::lp::{lp_solve, LpOutcome, LpProblem};
use crate::matrix::{dot, is_zero_vec, norm2_sq, vsub, RatMatrix, Vector};
use crate::qp::{qp_solve, QpOutcome};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolyhedronData", into = "PolyhedronData")]
pub struct Polyhedron {
    rows: Vec<Vector>,
    alpha: Vector,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct PolyhedronData {
    b: Vec<Vector>,
    alpha: Vector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

impl TryFrom<PolyhedronData> for Polyhedron {
    type Error = Error;
    fn try_from(d: PolyhedronData) -> Result<Polyhedron> {
        let dim = match (d.dim, d.b.first()) {
            (Some(k), _) => k,
            (None, Some(r)) => r.len(),
            (None, None) => return Err(Error::Dimension("polyhedron without rows needs \"dim\"".into())),
        };
        Polyhedron::new(d.b, d.alpha, dim)
    }
}

impl From<Polyhedron> for PolyhedronData {
    fn from(p: Polyhedron) -> PolyhedronData {
        PolyhedronData { b: p.rows, alpha: p.alpha, dim: Some(p.dim) }
    }
}

/// A nonempty face, identified by the rows that are tight on all of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub tight: Vec<usize>,
    pub piece: Polyhedron,
}

/// Generator form `conv(points) + cone(rays) + span(lineality)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyGenerators {
    pub points: Vec<Vector>,
    pub rays: Vec<Vector>,
    pub lineality: Vec<Vector>,
}

impl Polyhedron {
    /// Identical rows are merged; the first occurrence keeps its index.
    pub fn new(rows: Vec<Vector>, alpha: Vector, dim: usize) -> Result<Polyhedron> {
        dim_check("right-hand side count", rows.len(), alpha.len())?;
        let mut seen = BTreeSet::new();
        let mut out_rows = Vec::with_capacity(rows.len());
        let mut out_alpha = Vec::with_capacity(rows.len());
        for (r, a) in rows.into_iter().zip(alpha) {
            dim_check("constraint row length", dim, r.len())?;
            if seen.insert((r.clone(), a.clone())) {
                out_rows.push(r);
                out_alpha.push(a);
            }
        }
        Ok(Polyhedron { rows: out_rows, alpha: out_alpha, dim })
    }

    pub fn whole_space(dim: usize) -> Polyhedron {
        Polyhedron { rows: Vec::new(), alpha: Vec::new(), dim }
    }

    pub fn empty(dim: usize) -> Polyhedron {
        Polyhedron { rows: vec![vec![Rat::zero(); dim]], alpha: vec![Rat::from_int(-1)], dim }
    }

    /// The nonnegative orthant `{y ≥ 0}`.
    pub fn orthant(dim: usize) -> Polyhedron {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Rat::from_int(-1) } else { Rat::zero() }).collect())
            .collect();
        Polyhedron { rows, alpha: vec![Rat::zero(); dim], dim }
    }

    /// `{y : y = p}`.
    pub fn point(p: &[Rat]) -> Polyhedron {
        let d = p.len();
        let mut rows = Vec::new();
        let mut alpha = Vec::new();
        for i in 0..d {
            let mut e = vec![Rat::zero(); d];
            e[i] = Rat::one();
            rows.push(e.clone());
            alpha.push(p[i].clone());
            rows.push(e.iter().map(|v| -v).collect());
            alpha.push(-&p[i]);
        }
        Polyhedron { rows, alpha, dim: d }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn alpha(&self) -> &[Rat] {
        &self.alpha
    }

    pub fn row_matrix(&self) -> RatMatrix {
        RatMatrix::from_rows(self.rows.clone(), self.dim).expect("consistent rows")
    }

    pub fn is_cone(&self) -> bool {
        self.alpha.iter().all(Rat::is_zero)
    }

    pub fn to_cone(&self) -> Result<PolyCone> {
        if !self.is_cone() {
            return Err(Error::InvalidArgument("polyhedron has nonzero right-hand sides".into()));
        }
        PolyCone::new(self.rows.clone(), self.dim)
    }

    pub fn contains(&self, y: &[Rat]) -> bool {
        y.len() == self.dim && self.rows.iter().zip(&self.alpha).all(|(b, a)| dot(b, y) <= *a)
    }

    fn check_len(&self, y: &[Rat]) -> Result<()> {
        dim_check("point dimension", self.dim, y.len())
    }

    /// Indices of the rows tight at `y`; errors if `y` is outside.
    pub fn active_indices(&self, y: &[Rat]) -> Result<Vec<usize>> {
        self.check_len(y)?;
        let mut tight = Vec::new();
        for (i, (b, a)) in self.rows.iter().zip(&self.alpha).enumerate() {
            let v = dot(b, y);
            if v > *a {
                return Err(Error::OutsideSet);
            }
            if v == *a {
                tight.push(i);
            }
        }
        Ok(tight)
    }

    pub fn active_set(&self, y: &[Rat]) -> Result<Face> {
        let tight = self.active_indices(y)?;
        let piece = self.with_equalities(&tight);
        Ok(Face { tight, piece })
    }

    /// Adds the reversed inequalities of the listed rows. Original row indices are kept.
    pub fn with_equalities(&self, idx: &[usize]) -> Polyhedron {
        let mut rows = self.rows.clone();
        let mut alpha = self.alpha.clone();
        for &i in idx {
            rows.push(self.rows[i].iter().map(|v| -v).collect());
            alpha.push(-&self.alpha[i]);
        }
        Polyhedron { rows, alpha, dim: self.dim }
    }

    pub fn with_rows(&self, extra: Vec<Vector>, extra_alpha: Vector) -> Result<Polyhedron> {
        let mut rows = self.rows.clone();
        let mut alpha = self.alpha.clone();
        rows.extend(extra);
        alpha.extend(extra_alpha);
        Polyhedron::new(rows, alpha, self.dim)
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        dim_check("intersection dimension", self.dim, other.dim)?;
        self.with_rows(other.rows.clone(), other.alpha.clone())
    }

    pub fn lp(&self, objective: Vector) -> LpOutcome {
        let mut p = LpProblem::new(self.dim).with_objective(objective);
        for (b, a) in self.rows.iter().zip(&self.alpha) {
            p.le(b.clone(), a.clone());
        }
        lp_solve(&p)
    }

    pub fn feasible_point(&self) -> Option<Vector> {
        self.lp(vec![Rat::zero(); self.dim]).feasible_point().cloned()
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    /// Rows that hold with equality on the whole set; `None` if the set is empty.
    pub fn implicit_equalities(&self) -> Option<Vec<usize>> {
        let d = self.dim;
        let p = self.rows.len();
        // variables: y (d), τ, s (p); maximize Σ s
        let nv = d + 1 + p;
        let mut obj = vec![Rat::zero(); nv];
        for o in obj.iter_mut().skip(d + 1) {
            *o = Rat::one();
        }
        let mut lp = LpProblem::new(nv).with_objective(obj);
        for (i, (b, a)) in self.rows.iter().zip(&self.alpha).enumerate() {
            let mut row = b.clone();
            row.push(-a);
            row.extend((0..p).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
            lp.le(row, Rat::zero());
            lp.bound(d + 1 + i, Rat::zero(), Rat::one());
        }
        let mut tau = vec![Rat::zero(); nv];
        tau[d] = Rat::one();
        lp.ge(tau, Rat::one());
        let out = lp_solve(&lp);
        let s = out.optimal()?;
        Some((0..p).filter(|&i| s.point[d + 1 + i] < Rat::one()).collect())
    }

    /// Dimension of the affine hull; `None` if empty.
    pub fn affine_dimension(&self) -> Option<usize> {
        let eq = self.implicit_equalities()?;
        if eq.is_empty() {
            return Some(self.dim);
        }
        Some(self.dim - self.row_matrix().select_rows(&eq).rank())
    }

    /// Smallest face containing the given tight rows, as its full tight set.
    pub fn face_closure(&self, idx: &[usize]) -> Option<Vec<usize>> {
        let p = self.rows.len();
        let eq = self.with_equalities(idx).implicit_equalities()?;
        let mut set: BTreeSet<usize> = eq.into_iter().filter(|&i| i < p).collect();
        set.extend(idx.iter().copied());
        Some(set.into_iter().collect())
    }

    /// All nonempty faces, ordered by number of tight rows then lexicographically.
    pub fn faces(&self) -> Vec<Face> {
        let Some(root) = self.face_closure(&[]) else {
            return Vec::new();
        };
        let p = self.rows.len();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(root.clone());
        queue.push_back(root);
        while let Some(f) = queue.pop_front() {
            for j in 0..p {
                if f.contains(&j) {
                    continue;
                }
                let mut idx = f.clone();
                idx.push(j);
                if let Some(g) = self.face_closure(&idx) {
                    if seen.insert(g.clone()) {
                        queue.push_back(g);
                    }
                }
            }
        }
        let mut faces: Vec<Vec<usize>> = seen.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        faces.into_iter().map(|tight| Face { piece: self.with_equalities(&tight), tight }).collect()
    }

    pub fn horizon_cone(&self) -> Result<PolyCone> {
        if self.is_empty() {
            return Err(Error::EmptySet("horizon cone of an empty set".into()));
        }
        PolyCone::new(self.rows.clone(), self.dim)
    }

    pub fn tangent_cone(&self, y: &[Rat]) -> Result<PolyCone> {
        let tight = self.active_indices(y)?;
        PolyCone::new(tight.iter().map(|&i| self.rows[i].clone()).collect(), self.dim)
    }

    pub fn normal_cone(&self, y: &[Rat]) -> Result<PolyCone> {
        Ok(self.tangent_cone(y)?.polar())
    }

    /// Is `v` in the cone generated by the rows tight at `y`? (`y` must lie in the set.)
    pub fn is_normal(&self, y: &[Rat], v: &[Rat]) -> Result<bool> {
        let tight = self.active_indices(y)?;
        dim_check("normal vector dimension", self.dim, v.len())?;
        Ok(in_generated_cone(&tight.iter().map(|&i| self.rows[i].clone()).collect::<Vec<_>>(), v))
    }

    /// `T(ȳ) ∩ {v̄}^⊥`, requiring `v̄ ∈ N(ȳ)`.
    pub fn critical_cone(&self, y: &[Rat], v: &[Rat]) -> Result<PolyCone> {
        if !self.is_normal(y, v)? {
            return Err(Error::NotNormal);
        }
        let tight = self.active_indices(y)?;
        let mut rows: Vec<Vector> = tight.iter().map(|&i| self.rows[i].clone()).collect();
        if !is_zero_vec(v) {
            rows.push(v.iter().map(|x| -x).collect());
        }
        PolyCone::new(rows, self.dim)
    }

    /// Euclidean projection and squared distance.
    pub fn project_point(&self, x: &[Rat]) -> Result<(Vector, Rat)> {
        self.check_len(x)?;
        let q = RatMatrix::identity(self.dim);
        let c: Vector = x.iter().map(|v| -v).collect();
        match qp_solve(&q, &c, self)? {
            QpOutcome::Optimal(s) => {
                let d2 = norm2_sq(&vsub(x, &s.point));
                Ok((s.point, d2))
            }
            QpOutcome::Infeasible => Err(Error::EmptySet("projection onto an empty set".into())),
            QpOutcome::Unbounded { .. } => unreachable!("projection objective is coercive"),
        }
    }

    /// Generators via the homogenized cone `{(y,τ) : ⟨bᵢ,y⟩ ≤ αᵢτ, τ ≥ 0}`.
    pub fn generators(&self) -> Option<PolyGenerators> {
        if self.is_empty() {
            return None;
        }
        let d = self.dim;
        let mut rows: Vec<Vector> = self
            .rows
            .iter()
            .zip(&self.alpha)
            .map(|(b, a)| {
                let mut r = b.clone();
                r.push(-a);
                r
            })
            .collect();
        let mut t = vec![Rat::zero(); d + 1];
        t[d] = Rat::from_int(-1);
        rows.push(t);
        let cone = PolyCone::new(rows, d + 1).expect("homogenized rows");
        let g = cone.generators();
        let mut points = Vec::new();
        let mut rays = Vec::new();
        for r in &g.rays {
            if r[d].is_zero() {
                rays.push(r[..d].to_vec());
            } else {
                let tau = &r[d];
                points.push(r[..d].iter().map(|v| v / tau).collect());
            }
        }
        let lineality = g.lineality.iter().map(|l| l[..d].to_vec()).collect();
        Some(PolyGenerators { points, rays, lineality })
    }
}

/// Is `v` a nonnegative combination of `gens`?
pub fn in_generated_cone(gens: &[Vector], v: &[Rat]) -> bool {
    if is_zero_vec(v) {
        return true;
    }
    let k = gens.len();
    if k == 0 {
        return false;
    }
    let mut lp = LpProblem::new(k);
    for i in 0..v.len() {
        lp.equal(gens.iter().map(|g| g[i].clone()).collect(), v[i].clone());
    }
    for j in 0..k {
        lp.nonneg(j);
    }
    lp_solve(&lp).is_feasible()
}
