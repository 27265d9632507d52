//! Multivariate polynomials with rational coefficients and polynomial maps.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{dim_check, Result};
use crate::matrix::{RatMatrix, Vector};
use crate::rational::Rat;

/// A polynomial in `nvars` variables; exponent vectors map to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Polynomial {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat, nvars: usize) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `x_{i+1}`.
    pub fn var(i: usize, nvars: usize) -> Polynomial {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Polynomial::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    pub fn monomial(exponents: Vec<u32>, c: Rat) -> Polynomial {
        let mut p = Polynomial::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// Linear form `Σ c_j x_j + c0`.
    pub fn affine(coeffs: &[Rat], c0: Rat) -> Polynomial {
        let n = coeffs.len();
        let mut p = Polynomial::constant(c0, n);
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "polynomials in different variables");
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&Rat::from_int(-1))
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rat) -> Polynomial {
        let mut p = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c * s);
        }
        p
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "polynomials in different variables");
        let mut p = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut r = Polynomial::constant(Rat::one(), self.nvars);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self, j: usize) -> Polynomial {
        let mut p = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[j] -= 1;
            p.add_term(d, c * &Rat::from_int(e[j] as i64));
        }
        p
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension");
        let mut s = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= &xi.pow(k);
                }
            }
            s += &t;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension");
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64() * x.iter().zip(e).map(|(xi, &k)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Terms in print order: higher total degree first, then lexicographically
    /// larger exponent vectors first.
    fn ordered_terms(&self) -> Vec<(&Vec<u32>, &Rat)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.ordered_terms().into_iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, p) })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Polynomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Polynomial {
    fn cmp(&self, other: &Polynomial) -> Ordering {
        (self.nvars, &self.terms).cmp(&(other.nvars, &other.terms))
    }
}

/// A map `R^n → R^k` given by one polynomial per output, with derivative
/// polynomials computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    n: usize,
    comps: Vec<Polynomial>,
    jac: Vec<Vec<Polynomial>>,
    hess: Vec<Vec<Vec<Polynomial>>>,
}

impl PolyMap {
    pub fn new(comps: Vec<Polynomial>, n: usize) -> Result<PolyMap> {
        for p in &comps {
            dim_check("polynomial variable count", n, p.nvars())?;
        }
        let jac: Vec<Vec<Polynomial>> = comps.iter().map(|p| (0..n).map(|j| p.derivative(j)).collect()).collect();
        let hess = jac.iter().map(|row| row.iter().map(|d| (0..n).map(|l| d.derivative(l)).collect()).collect()).collect();
        Ok(PolyMap { n, comps, jac, hess })
    }

    /// The gradient map of a scalar polynomial.
    pub fn gradient_of(p: &Polynomial) -> PolyMap {
        let n = p.nvars();
        PolyMap::new((0..n).map(|j| p.derivative(j)).collect(), n).expect("consistent variables")
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.comps
    }

    /// `∂F_i/∂x_j` as a polynomial.
    pub fn partial(&self, i: usize, j: usize) -> &Polynomial {
        &self.jac[i][j]
    }

    pub fn eval(&self, x: &[Rat]) -> Vector {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval_f64(x)).collect()
    }

    /// `k × n` Jacobian.
    pub fn jacobian(&self, x: &[Rat]) -> RatMatrix {
        let rows = self.jac.iter().map(|r| r.iter().map(|d| d.eval(x)).collect()).collect();
        RatMatrix::from_rows(rows, self.n).expect("jacobian shape")
    }

    pub fn jacobian_f64(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.comps.len(), self.n, |i, j| self.jac[i][j].eval_f64(x))
    }

    /// Hessian of component `i`.
    pub fn hessian(&self, i: usize, x: &[Rat]) -> RatMatrix {
        let rows = self.hess[i].iter().map(|r| r.iter().map(|d| d.eval(x)).collect()).collect();
        RatMatrix::from_rows(rows, self.n).expect("hessian shape")
    }

    /// `Σ_i w_i ∇²F_i(x)`.
    pub fn weighted_hessian(&self, w: &[Rat], x: &[Rat]) -> RatMatrix {
        assert_eq!(w.len(), self.comps.len(), "weight dimension");
        let mut h = RatMatrix::zeros(self.n, self.n);
        for (i, wi) in w.iter().enumerate() {
            if !wi.is_zero() {
                h = h.add(&self.hessian(i, x).scale(wi));
            }
        }
        h
    }

    pub fn weighted_hessian_f64(&self, w: &[f64], x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |j, l| {
            w.iter().zip(&self.hess).map(|(wi, h)| wi * h[j][l].eval_f64(x)).sum()
        })
    }
}
