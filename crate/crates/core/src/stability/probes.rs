//! Floating-point probes of error bounds and calmness around a solution.

use std::io;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{dim_check, Error, Result};
use crate::matrix::{norm2_sq, to_f64_vec, vadd, vscale, vsub, RatMatrix, Vector};
use crate::polyhedron::Polyhedron;
use crate::rational::Rat;
use crate::stability::criticality::CriticalityVerdict;
use crate::system::VarSystem;

/// Euclidean norm of an exact vector, rounded.
fn norm(v: &[Rat]) -> f64 {
    norm2_sq(v).to_f64().sqrt()
}

fn fnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn to_rat(v: &[f64]) -> Result<Vector> {
    v.iter()
        .map(|&x| Rat::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}"))))
        .collect()
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub lhs: f64,
    pub rhs_iii: f64,
    pub rhs_iv: f64,
}

/// Residual evaluation around a fixed solution; `Λ(x̄)` is computed once.
#[derive(Debug, Clone)]
pub struct ResidualContext<'a> {
    sys: &'a VarSystem,
    xbar: Vector,
    multipliers: Polyhedron,
}

impl<'a> ResidualContext<'a> {
    pub fn new(sys: &'a VarSystem, xbar: &[Rat], lambda_bar: &[Rat]) -> Result<ResidualContext<'a>> {
        if !sys.is_solution(xbar, lambda_bar)? {
            return Err(Error::NotSolution);
        }
        Ok(ResidualContext { sys, xbar: xbar.to_vec(), multipliers: sys.multiplier_set(xbar)?.set })
    }

    pub fn dist_to_multipliers(&self, lambda: &[Rat]) -> Result<f64> {
        Ok(self.multipliers.project_point(lambda)?.1.to_f64().sqrt())
    }

    /// `(lhs, rhs_iii, rhs_iv)` at an exact point.
    pub fn residuals(&self, x: &[Rat], lambda: &[Rat]) -> Result<Residuals> {
        let pen = self.sys.penalty();
        let lhs = norm(&vsub(x, &self.xbar)) + self.dist_to_multipliers(lambda)?;
        let psi = norm(&self.sys.psi_eval(x, lambda)?);
        let phi = self.sys.phi().eval(x);
        let inv = pen.inverse_subdiff_set(lambda)?;
        let rhs_iii = if inv.is_empty() { f64::INFINITY } else { psi + inv.project_point(&phi)?.1.to_f64().sqrt() };
        let prox = pen.prox_unchecked(&vadd(lambda, &phi))?.prox;
        let rhs_iv = psi + norm(&vsub(&phi, &prox));
        Ok(Residuals { lhs, rhs_iii, rhs_iv })
    }

    pub fn residuals_f64(&self, x: &[f64], lambda: &[f64]) -> Result<Residuals> {
        self.residuals(&to_rat(x)?, &to_rat(lambda)?)
    }
}

/// One-shot form of [`ResidualContext::residuals`].
pub fn error_bound_residuals(
    sys: &VarSystem,
    xbar: &[Rat],
    lambda_bar: &[Rat],
    x: &[Rat],
    lambda: &[Rat],
) -> Result<Residuals> {
    ResidualContext::new(sys, xbar, lambda_bar)?.residuals(x, lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub t: f64,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// The recorded point solves the perturbed system.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ProbeTrace {
    pub records: Vec<ProbeRecord>,
    /// Perturbations for which Newton failed.
    pub failures: usize,
}

impl ProbeTrace {
    pub fn ratios(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ratio).collect()
    }

    /// Largest finite-or-infinite ratio over the records.
    pub fn modulus(&self) -> Option<f64> {
        self.records.iter().map(|r| r.ratio).fold(None, |m, r| Some(m.map_or(r, |m: f64| m.max(r))))
    }

    /// The last `window` ratios either are all `+∞` or increase strictly and end above `threshold`.
    pub fn diverges(&self, window: usize, threshold: f64) -> bool {
        if window == 0 || self.records.len() < window.max(2) {
            return false;
        }
        let tail = &self.records[self.records.len() - window..];
        if tail.iter().all(|r| r.ratio == f64::INFINITY) {
            return true;
        }
        tail.windows(2).all(|w| w[0].ratio < w[1].ratio)
            && tail.last().is_some_and(|r| r.ratio.is_finite() && r.ratio > threshold)
    }

    /// Columns `t,p1,p2,x,lambda,lhs,rhs,ratio`; vectors are `;`-separated.
    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";");
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "p1", "p2", "x", "lambda", "lhs", "rhs", "ratio"])?;
        for r in &self.records {
            out.write_record([
                format!("{:e}", r.t),
                join(&r.p1),
                join(&r.p2),
                join(&r.x),
                join(&r.lambda),
                format!("{:e}", r.lhs),
                format!("{:e}", r.rhs),
                format!("{:e}", r.ratio),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `t = 2⁻¹, …, 2⁻ᵏ`.
pub fn dyadic_grid(k: u32) -> Vec<f64> {
    (1..=k).map(|i| 0.5f64.powi(i as i32)).collect()
}

/// Follows `(x̄+tξ, λ̄+tη)` along a criticality witness and records
/// `‖x_t − x̄‖ / (‖p₁‖ + ‖p₂‖)` for the perturbations that make it a solution.
pub fn critical_ray_probe(
    sys: &VarSystem,
    xbar: &[Rat],
    lambda_bar: &[Rat],
    verdict: &CriticalityVerdict,
    grid: &[f64],
) -> Result<ProbeTrace> {
    let Some((xi, eta)) = verdict.witness() else {
        return Err(Error::Noncritical);
    };
    if !sys.is_solution(xbar, lambda_bar)? {
        return Err(Error::NotSolution);
    }
    let zbar = sys.phi().eval(xbar);
    let jxi = sys.phi().jacobian(xbar).mul_vec(xi);
    let mut trace = ProbeTrace::default();
    for &tf in grid {
        let t = Rat::from_f64(tf)
            .filter(Rat::is_positive)
            .ok_or_else(|| Error::InvalidArgument(format!("grid value {tf} must be positive")))?;
        let x = vadd(xbar, &vscale(xi, &t));
        let lambda = vadd(lambda_bar, &vscale(eta, &t));
        let p1 = sys.psi_eval(&x, &lambda)?;
        let z = vadd(&zbar, &vscale(&jxi, &t));
        let p2 = vsub(&z, &sys.phi().eval(&x));
        let verified = sys.penalty().subdiff_contains(&z, &lambda)?;
        let lhs = norm(&vsub(&x, xbar));
        let rhs = norm(&p1) + norm(&p2);
        trace.records.push(ProbeRecord {
            t: tf,
            p1: to_f64_vec(&p1),
            p2: to_f64_vec(&p2),
            x: to_f64_vec(&x),
            lambda: to_f64_vec(&lambda),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            verified,
        });
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> NewtonOptions {
        NewtonOptions { tol: 1e-10, max_iter: 200 }
    }
}

const MIN_STEP: f64 = 1.0 / 1048576.0;
/// Consecutive iterations with under 0.1% residual reduction before giving up.
const STALL_ITERS: usize = 10;

/// Residual of the perturbed system in prox form and the pieces needed for
/// a generalized Jacobian.
struct NewtonState {
    r: DVector<f64>,
    /// Derivative of `u ↦ u − prox(u)` on the active piece.
    m: DMatrix<f64>,
}

fn newton_state(sys: &VarSystem, p1: &[f64], p2: &[f64], x: &[f64], lambda: &[f64]) -> Result<NewtonState> {
    let (n, mm) = (sys.n(), sys.m());
    let psi = sys.psi_eval_f64(x, lambda);
    let phi = sys.phi().eval_f64(x);
    let u: Vec<f64> = (0..mm).map(|i| lambda[i] + phi[i] + p2[i]).collect();
    let pr = sys.penalty().prox_unchecked(&to_rat(&u)?)?;
    let prox = to_f64_vec(&pr.prox);
    let mut r = DVector::zeros(n + mm);
    for i in 0..n {
        r[i] = psi[i] - p1[i];
    }
    for i in 0..mm {
        r[n + i] = phi[i] + p2[i] - prox[i];
    }
    let pen = sys.penalty();
    let basis = pen.y().row_matrix().select_rows(&pr.active).nullspace();
    let m = if basis.is_empty() {
        DMatrix::zeros(mm, mm)
    } else {
        let z = RatMatrix::from_columns(&basis, mm);
        let q = z.transpose().mul(&pen.b().add(&RatMatrix::identity(mm))).mul(&z);
        let qi = q.inverse().expect("positive definite reduced Hessian");
        z.mul(&qi).mul(&z.transpose()).to_f64()
    };
    Ok(NewtonState { r, m })
}

/// Damped semismooth Newton for `Ψ(x,λ) = p₁`, `λ ∈ ∂θ(Φ(x) + p₂)` written as
/// `Φ(x) + p₂ = prox(λ + Φ(x) + p₂)`.
pub fn solve_perturbed(
    sys: &VarSystem,
    p1: &[f64],
    p2: &[f64],
    start: (&[f64], &[f64]),
    opts: NewtonOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, mm) = (sys.n(), sys.m());
    dim_check("p1 dimension", n, p1.len())?;
    dim_check("p2 dimension", mm, p2.len())?;
    dim_check("start x dimension", n, start.0.len())?;
    dim_check("start multiplier dimension", mm, start.1.len())?;
    let mut x = start.0.to_vec();
    let mut lambda = start.1.to_vec();
    let mut st = newton_state(sys, p1, p2, &x, &lambda)?;
    let mut slow = 0;
    for _ in 0..opts.max_iter {
        let res = st.r.norm();
        if res <= opts.tol {
            return Ok((x, lambda));
        }
        if slow >= STALL_ITERS {
            return Err(Error::NoConvergence(opts.max_iter));
        }
        let h = sys.psi_jacobian_x_f64(&x, &lambda);
        let j = sys.phi().jacobian_f64(&x);
        let mut g = DMatrix::zeros(n + mm, n + mm);
        g.view_mut((0, 0), (n, n)).copy_from(&h);
        g.view_mut((0, n), (n, mm)).copy_from(&j.transpose());
        g.view_mut((n, 0), (mm, n)).copy_from(&(&st.m * &j));
        g.view_mut((n, n), (mm, mm)).copy_from(&(&st.m - DMatrix::identity(mm, mm)));
        let rhs = -&st.r;
        let d = match g.clone().lu().solve(&rhs) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => g.svd(true, true).solve(&rhs, 1e-14).map_err(|_| Error::NoConvergence(opts.max_iter))?,
        };
        let mut step = 1.0;
        loop {
            let xn: Vec<f64> = (0..n).map(|i| x[i] + step * d[i]).collect();
            let ln: Vec<f64> = (0..mm).map(|i| lambda[i] + step * d[n + i]).collect();
            let sn = newton_state(sys, p1, p2, &xn, &ln)?;
            if sn.r.norm() <= (1.0 - 1e-4 * step) * res {
                slow = if sn.r.norm() > 0.999 * res { slow + 1 } else { 0 };
                x = xn;
                lambda = ln;
                st = sn;
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                // No descent along the Newton direction.
                return Err(Error::NoConvergence(opts.max_iter));
            }
        }
    }
    if st.r.norm() <= opts.tol {
        Ok((x, lambda))
    } else {
        Err(Error::NoConvergence(opts.max_iter))
    }
}

/// Perturbations of size `2⁻ᵏ` along a few fixed directions of `R^{n+m}`.
pub fn perturbation_grid(n: usize, m: usize, k: u32) -> Vec<(Vec<f64>, Vec<f64>)> {
    let w = n + m;
    let mut dirs: Vec<Vec<f64>> = vec![vec![1.0; w], (0..w).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()];
    dirs.extend((0..w).map(|i| (0..w).map(|j| if i == j { -1.0 } else { 0.0 }).collect()));
    let mut out = Vec::new();
    for &t in &dyadic_grid(k) {
        for d in &dirs {
            let s = t / fnorm(d);
            out.push((d[..n].iter().map(|v| v * s).collect(), d[n..].iter().map(|v| v * s).collect()));
        }
    }
    out
}

/// Solves the perturbed system for each `(p₁, p₂)` starting at `(x̄, λ̄)` and
/// records `(‖x − x̄‖ + dist(λ, Λ(x̄))) / (‖p₁‖ + ‖p₂‖)`.
pub fn semi_isolated_probe(
    sys: &VarSystem,
    xbar: &[Rat],
    lambda_bar: &[Rat],
    grid: &[(Vec<f64>, Vec<f64>)],
    opts: NewtonOptions,
) -> Result<ProbeTrace> {
    let ctx = ResidualContext::new(sys, xbar, lambda_bar)?;
    let (xb, lb) = (to_f64_vec(xbar), to_f64_vec(lambda_bar));
    let mut trace = ProbeTrace::default();
    for (p1, p2) in grid {
        match solve_perturbed(sys, p1, p2, (&xb, &lb), opts) {
            Ok((x, lambda)) => {
                let dx: Vec<f64> = x.iter().zip(&xb).map(|(a, b)| a - b).collect();
                let lhs = fnorm(&dx) + ctx.dist_to_multipliers(&to_rat(&lambda)?)?;
                let rhs = fnorm(p1) + fnorm(p2);
                let check = newton_state(sys, p1, p2, &x, &lambda)?.r.norm();
                trace.records.push(ProbeRecord {
                    t: rhs,
                    p1: p1.clone(),
                    p2: p2.clone(),
                    x,
                    lambda,
                    lhs,
                    rhs,
                    ratio: ratio(lhs, rhs),
                    verified: check <= opts.tol,
                });
            }
            Err(Error::NoConvergence(_)) => trace.failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(trace)
}
