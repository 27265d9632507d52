use critmul::enlp::{lipschitz_like_skkt, robust_ic_report, sonc_holds};
use critmul::matrix::ints;
use critmul::stability::{classify_multiplier, uniqueness_report};
use critmul::{
    EnlpProblem, ExtReal, PlqPenalty, PolyMap, Polyhedron, Polynomial, Rat, RatMatrix, RobustIc, SoncVerdict, VarSystem,
};

fn x(i: usize, n: usize) -> Polynomial {
    Polynomial::var(i, n)
}

fn corner() -> PlqPenalty {
    PlqPenalty::new(Polyhedron::orthant(2), RatMatrix::from_int_rows(&[&[1, 0], &[0, 0]])).unwrap()
}

fn orthant(n: usize) -> PlqPenalty {
    PlqPenalty::new(Polyhedron::orthant(n), RatMatrix::identity(n)).unwrap()
}

#[test]
fn penalty_values() {
    assert_eq!(orthant(2).theta_eval(&ints(&[1, -2])).unwrap(), ExtReal::Finite(Rat::new(1, 2)));
    assert_eq!(corner().theta_eval(&ints(&[0, 1])).unwrap(), ExtReal::PlusInfinity);
    assert_eq!(corner().theta_eval(&ints(&[2, -3])).unwrap(), ExtReal::Finite(Rat::from_int(2)));
    assert!(corner().domain_contains(&ints(&[-5, 0])) && !corner().domain_contains(&ints(&[0, 1])));
    let sub = corner().subdiff_set(&ints(&[0, 0])).unwrap();
    assert!(sub.contains(&ints(&[0, 7])) && !sub.contains(&ints(&[1, 0])));
    let z = ints(&[0, 0]);
    let l = ints(&[0, 1]);
    assert_eq!(corner().second_subderivative(&z, &l, &ints(&[1, 0])).unwrap(), ExtReal::Finite(Rat::one()));
}

#[test]
fn corner_system_multipliers() {
    let f = PolyMap::new(vec![x(0, 1).neg()], 1).unwrap();
    let phi = PolyMap::new(vec![Polynomial::zero(1), x(0, 1).pow(2)], 1).unwrap();
    let sys = VarSystem::new(f, phi, corner()).unwrap();
    let zero = ints(&[0]);
    let ms = sys.multiplier_set(&zero).unwrap();
    assert_eq!(ms.dimension, Some(1));
    for (num, den, critical) in [(0, 1, false), (1, 4, false), (1, 2, true), (1, 1, false), (10, 1, false)] {
        let l = vec![Rat::zero(), Rat::new(num, den)];
        assert!(ms.contains(&l));
        assert_eq!(classify_multiplier(&sys, &zero, &l).unwrap().is_critical(), critical);
    }
}

#[test]
fn degenerate_pair_fails_uniqueness_and_dual_qualification() {
    let f = PolyMap::new(vec![Polynomial::zero(2), Polynomial::zero(2)], 2).unwrap();
    let phi = PolyMap::new(vec![x(0, 2), Polynomial::zero(2)], 2).unwrap();
    let sys = VarSystem::new(f, phi, corner()).unwrap();
    let u = uniqueness_report(&sys, &ints(&[0, 0]), &ints(&[0, 0])).unwrap();
    assert!(!u.singleton && !u.dqc && u.consistent);
}

#[test]
fn squared_norm_program_is_robustly_stable() {
    let n = 3;
    let phi0 = (0..n).fold(Polynomial::zero(n), |acc, i| acc.add(&x(i, n).pow(2)));
    let phi = PolyMap::new((0..n).map(|i| x(i, n)).collect(), n).unwrap();
    let p = EnlpProblem::new(phi0, phi, orthant(n)).unwrap();
    let z = ints(&[0, 0, 0]);
    let st = robust_ic_report(&p, &z, &z).unwrap();
    assert!(st.sosc && st.unique && st.noncritical && st.isolated_calm && st.lipschitz_like && st.consistent);
    assert_eq!(st.robust_ic, RobustIc::Holds);
    assert_eq!(sonc_holds(&p, &z).unwrap(), SoncVerdict::Holds);
}

#[test]
fn corner_program_at_the_critical_multiplier() {
    let phi0 = x(0, 1).pow(2).scale(&Rat::new(-1, 2));
    let phi = PolyMap::new(vec![Polynomial::zero(1), x(0, 1).pow(2)], 1).unwrap();
    let p = EnlpProblem::new(phi0, phi, corner()).unwrap();
    let z = ints(&[0]);
    let l = vec![Rat::zero(), Rat::new(1, 2)];
    let st = robust_ic_report(&p, &z, &l).unwrap();
    assert!(!st.noncritical && !st.isolated_calm && !st.lipschitz_like && st.consistent);
    assert_eq!(st.robust_ic, RobustIc::Fails);
    assert!(!lipschitz_like_skkt(&p, &z, &l).unwrap());
}
