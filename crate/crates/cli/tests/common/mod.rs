//! Seeded random instances shared by the integration targets.
#![allow(dead_code)]

use critmul::matrix::{ints, vadd};
use critmul::{EnlpProblem, PlqPenalty, PolyMap, Polyhedron, Polynomial, Rat, RatMatrix, VarSystem, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn int_vec(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Vector {
    ints(&(0..n).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<_>>())
}

/// Rational in `[−r, r]` with denominator up to `d`.
pub fn small_rat(rng: &mut ChaCha8Rng, r: i64, d: i64) -> Rat {
    let q = rng.gen_range(1..=d);
    Rat::new(rng.gen_range(-r * q..=r * q), q)
}

/// A pointed polyhedron together with a point inside it.
pub struct RandomSet {
    pub y: Polyhedron,
    pub inside: Vector,
}

pub fn pointed_set(rng: &mut ChaCha8Rng, m: usize, extra: usize) -> RandomSet {
    let inside = int_vec(rng, m, -2, 2);
    loop {
        let rows: Vec<Vector> = (0..m + extra).map(|_| int_vec(rng, m, -2, 2)).collect();
        if RatMatrix::from_rows(rows.clone(), m).unwrap().rank() < m {
            continue;
        }
        let alpha = rows
            .iter()
            .map(|r| {
                let slack = [0, 0, 1, 2][rng.gen_range(0..4)];
                &critmul::matrix::dot(r, &inside) + &Rat::from_int(slack)
            })
            .collect();
        let y = Polyhedron::new(rows, alpha, m).unwrap();
        return RandomSet { y, inside };
    }
}

/// `CᵀC` with `C` of `rank ≤ r` rows.
pub fn psd(rng: &mut ChaCha8Rng, m: usize, r: usize) -> RatMatrix {
    let c = RatMatrix::from_rows((0..r).map(|_| int_vec(rng, m, -2, 2)).collect(), m).unwrap();
    c.transpose().mul(&c)
}

pub fn penalty(rng: &mut ChaCha8Rng, m: usize) -> (PlqPenalty, Vector) {
    let extra = rng.gen_range(0..=1);
    let set = pointed_set(rng, m, extra);
    let r = rng.gen_range(m.saturating_sub(1)..=m);
    (PlqPenalty::new(set.y, psd(rng, m, r)).unwrap(), set.inside)
}

/// A point of `gph ∂θ`: `λ ∈ Y`, `z = Bλ + v` with `v` normal to `Y` at `λ`.
pub fn graph_point(rng: &mut ChaCha8Rng, pen: &PlqPenalty, lambda: &[Rat]) -> Vector {
    let mut v = vec![Rat::zero(); pen.dim()];
    for g in pen.normal_generators(lambda).unwrap() {
        let c = Rat::from_int(rng.gen_range(0..=2));
        v = vadd(&v, &g.iter().map(|x| x * &c).collect::<Vec<_>>());
    }
    vadd(&pen.b().mul_vec(lambda), &v)
}

/// Linear-plus-diagonal-quadratic `Φ` through `z̄` at `x = 0`.
fn random_phi(rng: &mut ChaCha8Rng, n: usize, z: &[Rat]) -> (PolyMap, RatMatrix) {
    let jrows: Vec<Vector> = (0..z.len())
        .map(|_| if rng.gen_bool(0.25) { vec![Rat::zero(); n] } else { int_vec(rng, n, -1, 1) })
        .collect();
    let j = RatMatrix::from_rows(jrows, n).unwrap();
    let comps = (0..z.len())
        .map(|i| {
            let mut p = Polynomial::affine(j.row(i), z[i].clone());
            if rng.gen_bool(0.3) {
                let k = rng.gen_range(0..n);
                p = p.add(&Polynomial::var(k, n).pow(2).scale(&Rat::from_int(rng.gen_range(-1..=1))));
            }
            p
        })
        .collect();
    (PolyMap::new(comps, n).unwrap(), j)
}

/// A system solved by `(0, λ̄)`.
pub struct Instance {
    pub sys: VarSystem,
    pub x: Vector,
    pub lambda: Vector,
}

pub fn varsys_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let (pen, lambda) = penalty(rng, m);
    let z = graph_point(rng, &pen, &lambda);
    let (phi, j) = random_phi(rng, n, &z);
    let g = j.tr_mul_vec(&lambda);
    let h = RatMatrix::from_rows((0..n).map(|_| int_vec(rng, n, -2, 2)).collect(), n).unwrap();
    let f = (0..n).map(|r| Polynomial::affine(h.row(r), -&g[r])).collect();
    let sys = VarSystem::new(PolyMap::new(f, n).unwrap(), phi, pen).unwrap();
    Instance { sys, x: vec![Rat::zero(); n], lambda }
}

pub struct EnlpInstance {
    pub problem: EnlpProblem,
    pub x: Vector,
    pub lambda: Vector,
}

pub fn enlp_instance(rng: &mut ChaCha8Rng) -> EnlpInstance {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let (pen, lambda) = penalty(rng, m);
    let z = graph_point(rng, &pen, &lambda);
    let (phi, j) = random_phi(rng, n, &z);
    let g = j.tr_mul_vec(&lambda);
    let mut phi0 = Polynomial::affine(&g.iter().map(|v| -v).collect::<Vec<_>>(), Rat::zero());
    for a in 0..n {
        for b in a..n {
            let c = Rat::from_int(rng.gen_range(-1..=2));
            phi0 = phi0.add(&Polynomial::var(a, n).mul(&Polynomial::var(b, n)).scale(&c));
        }
    }
    let problem = EnlpProblem::new(phi0, phi, pen).unwrap();
    EnlpInstance { problem, x: vec![Rat::zero(); n], lambda }
}
