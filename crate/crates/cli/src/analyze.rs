//! Per-point analysis of a problem file.

use critmul::enlp::robust_ic_report;
use critmul::matrix::{ints, vadd, vscale};
use critmul::stability::{
    classify_multiplier, critical_ray_probe, dyadic_grid, perturbation_grid, semi_isolated_probe, uniqueness_report,
    NewtonOptions, ResidualContext,
};
use critmul::{CriticalityVerdict, Polyhedron, ProbeTrace, Rat, StabilityReport, UniquenessReport, Vector};
use serde::{Serialize, Serializer};

use crate::problem::{Kind, Model, Problem};

/// A float that renders non-finite values as strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_finite() {
            write!(f, "{:.6e}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Command-line settings; unset values fall back to the file, then to defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyzeOptions {
    pub probe: bool,
    pub grid: Option<u32>,
    pub tol: Option<f64>,
}

pub const DEFAULT_GRID: u32 = 10;

#[derive(Debug, Clone, Serialize)]
pub struct MultiplierInfo {
    pub empty: bool,
    pub singleton: bool,
    pub dimension: Option<usize>,
    pub representative: Option<Vector>,
    pub set: Polyhedron,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointVerdict {
    pub point: usize,
    pub x: Vector,
    pub lambda: Vector,
    pub solution: bool,
    pub multipliers: MultiplierInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criticality: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniqueness: Option<UniquenessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub point: usize,
    pub xi: Vector,
    pub eta: Vector,
    pub face: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub t: Num,
    pub lhs: Num,
    pub rhs_iii: Num,
    pub rhs_iv: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualTable {
    pub point: usize,
    pub rows: Vec<ResidualRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub t: Num,
    pub p1: Vec<Num>,
    pub p2: Vec<Num>,
    pub x: Vec<Num>,
    pub lambda: Vec<Num>,
    pub lhs: Num,
    pub rhs: Num,
    pub ratio: Num,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeEntry {
    pub point: usize,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diverges: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Num>,
    pub failures: usize,
    pub records: Vec<ProbeRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub kind: &'static str,
    pub n: usize,
    pub m: usize,
    pub verdicts: Vec<PointVerdict>,
    pub witnesses: Vec<Witness>,
    pub residuals: Vec<ResidualTable>,
    pub probes: Vec<ProbeEntry>,
    /// All cross-checks between independently computed properties agree.
    pub consistent: bool,
}

fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

fn probe_entry(point: usize, kind: &'static str, tr: &ProbeTrace) -> ProbeEntry {
    let records = tr
        .records
        .iter()
        .map(|r| ProbeRow {
            t: Num(r.t),
            p1: nums(&r.p1),
            p2: nums(&r.p2),
            x: nums(&r.x),
            lambda: nums(&r.lambda),
            lhs: Num(r.lhs),
            rhs: Num(r.rhs),
            ratio: Num(r.ratio),
            verified: r.verified,
        })
        .collect();
    ProbeEntry { point, kind, diverges: None, modulus: None, failures: tr.failures, records }
}

/// Residuals along `(x̄ + t·1, λ̄ + t·1)` for `t = 2⁻¹..2⁻ᴷ`.
fn residual_table(ctx: &ResidualContext, x: &[Rat], l: &[Rat], point: usize, k: u32) -> critmul::Result<ResidualTable> {
    let ones_x = ints(&vec![1; x.len()]);
    let ones_l = ints(&vec![1; l.len()]);
    let mut rows = Vec::new();
    for i in 1..=k {
        let t = Rat::new(1, 1i64 << i.min(62));
        let r = ctx.residuals(&vadd(x, &vscale(&ones_x, &t)), &vadd(l, &vscale(&ones_l, &t)))?;
        rows.push(ResidualRow { t: Num(t.to_f64()), lhs: Num(r.lhs), rhs_iii: Num(r.rhs_iii), rhs_iv: Num(r.rhs_iv) });
    }
    Ok(ResidualTable { point, rows })
}

pub fn analyze(problem: &Problem, opts: &AnalyzeOptions) -> critmul::Result<Report> {
    let f = &problem.file;
    let sys = problem.model.system();
    let mut report = Report {
        name: f.name.clone(),
        kind: match f.kind {
            Kind::Enlp => "enlp",
            Kind::Varsys => "varsys",
        },
        n: f.n,
        m: f.m,
        verdicts: Vec::new(),
        witnesses: Vec::new(),
        residuals: Vec::new(),
        probes: Vec::new(),
        consistent: true,
    };
    let grid = opts.grid.or(f.probe.grid).unwrap_or(DEFAULT_GRID);
    let tol = opts.tol.or(f.probe.tol).unwrap_or(NewtonOptions::default().tol);
    for (i, pt) in f.points.iter().enumerate() {
        let ms = sys.multiplier_set(&pt.x)?;
        let multipliers = MultiplierInfo {
            empty: ms.empty,
            singleton: ms.singleton,
            dimension: ms.dimension,
            representative: ms.representative.clone(),
            set: ms.set.clone(),
        };
        let solution = sys.is_solution(&pt.x, &pt.lambda)?;
        let mut v = PointVerdict {
            point: i,
            x: pt.x.clone(),
            lambda: pt.lambda.clone(),
            solution,
            multipliers,
            criticality: None,
            uniqueness: None,
            stability: None,
        };
        if !solution {
            report.verdicts.push(v);
            continue;
        }
        let verdict = classify_multiplier(sys, &pt.x, &pt.lambda)?;
        v.criticality = Some(if verdict.is_critical() { "critical" } else { "noncritical" });
        if let CriticalityVerdict::Critical { xi, eta, face } = &verdict {
            report.witnesses.push(Witness { point: i, xi: xi.clone(), eta: eta.clone(), face: *face });
        }
        let uniq = uniqueness_report(sys, &pt.x, &pt.lambda)?;
        report.consistent &= uniq.consistent;
        v.uniqueness = Some(uniq);
        if let Model::Enlp(p) = &problem.model {
            let st = robust_ic_report(p, &pt.x, &pt.lambda)?;
            report.consistent &= st.consistent && st.noncritical == !verdict.is_critical();
            v.stability = Some(st);
        }
        let ctx = ResidualContext::new(sys, &pt.x, &pt.lambda)?;
        report.residuals.push(residual_table(&ctx, &pt.x, &pt.lambda, i, grid)?);
        if opts.probe {
            let newton = NewtonOptions { tol, ..NewtonOptions::default() };
            let entry = if verdict.is_critical() {
                let tr = critical_ray_probe(sys, &pt.x, &pt.lambda, &verdict, &dyadic_grid(grid))?;
                ProbeEntry { diverges: Some(tr.diverges(5, 1e3)), ..probe_entry(i, "critical-ray", &tr) }
            } else {
                let g = perturbation_grid(f.n, f.m, grid);
                let tr = semi_isolated_probe(sys, &pt.x, &pt.lambda, &g, newton)?;
                ProbeEntry { modulus: tr.modulus().map(Num), ..probe_entry(i, "semi-isolated", &tr) }
            };
            report.probes.push(entry);
        }
        report.verdicts.push(v);
    }
    Ok(report)
}
