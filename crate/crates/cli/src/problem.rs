//! JSON problem files.

use std::path::Path;

use critmul::{EnlpProblem, PlqPenalty, PolyMap, Polyhedron, Rat, RatMatrix, VarSystem};
use serde::Deserialize;
use thiserror::Error;

use crate::expr::{parse_polynomial, ExprError};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("expression {field}: {source}")]
    Expr { field: String, source: ExprError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] critmul::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Enlp,
    Varsys,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintData {
    pub b: Vec<Vec<Rat>>,
    pub alpha: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointData {
    pub x: Vec<Rat>,
    pub lambda: Vec<Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ProbeOptions {
    /// Number of dyadic scales `2⁻¹..2⁻ᴷ`.
    pub grid: Option<u32>,
    /// Newton stopping tolerance.
    pub tol: Option<f64>,
}

/// The document as written.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub kind: Kind,
    pub n: usize,
    pub m: usize,
    pub phi0: Option<String>,
    pub f: Option<Vec<String>>,
    #[serde(rename = "Phi")]
    pub phi: Vec<String>,
    #[serde(rename = "Y")]
    pub y: ConstraintData,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Rat>>,
    pub points: Vec<PointData>,
    #[serde(default)]
    pub probe: ProbeOptions,
}

#[derive(Debug, Clone)]
pub enum Model {
    Enlp(EnlpProblem),
    Varsys(VarSystem),
}

impl Model {
    pub fn system(&self) -> &VarSystem {
        match self {
            Model::Enlp(p) => p.system(),
            Model::Varsys(s) => s,
        }
    }
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub model: Model,
}

fn polys(texts: &[String], n: usize, field: &str) -> Result<PolyMap, ProblemError> {
    let comps = texts
        .iter()
        .enumerate()
        .map(|(i, t)| parse_polynomial(t, n).map_err(|e| ProblemError::Expr { field: format!("{field}[{i}]"), source: e }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolyMap::new(comps, n)?)
}

fn check_len(what: &str, expected: usize, got: usize) -> Result<(), ProblemError> {
    if expected == got {
        Ok(())
    } else {
        Err(ProblemError::Invalid(format!("{what}: expected length {expected}, got {got}")))
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile, ProblemError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ProblemError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn validate(self) -> Result<Problem, ProblemError> {
        let (n, m) = (self.n, self.m);
        if n == 0 {
            return Err(ProblemError::Invalid("n must be positive".into()));
        }
        check_len("Phi", m, self.phi.len())?;
        check_len("Y.alpha", self.y.b.len(), self.y.alpha.len())?;
        for (i, r) in self.y.b.iter().enumerate() {
            check_len(&format!("Y.b[{i}]"), m, r.len())?;
        }
        check_len("B", m, self.b.len())?;
        for (i, r) in self.b.iter().enumerate() {
            check_len(&format!("B[{i}]"), m, r.len())?;
        }
        if self.points.is_empty() {
            return Err(ProblemError::Invalid("no points to analyze".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            check_len(&format!("points[{i}].x"), n, p.x.len())?;
            check_len(&format!("points[{i}].lambda"), m, p.lambda.len())?;
        }
        let y = Polyhedron::new(self.y.b.clone(), self.y.alpha.clone(), m)?;
        let b = RatMatrix::from_rows(self.b.clone(), m)?;
        if !b.is_symmetric() {
            return Err(ProblemError::Invalid("B is not symmetric".into()));
        }
        let penalty = PlqPenalty::new(y, b)?;
        let phi = polys(&self.phi, n, "Phi")?;
        let model = match (self.kind, &self.phi0, &self.f) {
            (Kind::Enlp, Some(p0), None) => {
                let p0 = parse_polynomial(p0, n).map_err(|e| ProblemError::Expr { field: "phi0".into(), source: e })?;
                Model::Enlp(EnlpProblem::new(p0, phi, penalty)?)
            }
            (Kind::Varsys, None, Some(f)) => {
                check_len("f", n, f.len())?;
                Model::Varsys(VarSystem::new(polys(f, n, "f")?, phi, penalty)?)
            }
            (Kind::Enlp, _, _) => return Err(ProblemError::Invalid("kind \"enlp\" needs phi0 and no f".into())),
            (Kind::Varsys, _, _) => return Err(ProblemError::Invalid("kind \"varsys\" needs f and no phi0".into())),
        };
        Ok(Problem { file: self, model })
    }
}

pub fn parse_problem_str(text: &str) -> Result<Problem, ProblemError> {
    ProblemFile::from_json(text)?.validate()
}

pub fn parse_problem_file(path: &Path) -> Result<Problem, ProblemError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProblemError::Io { path: path.display().to_string(), source: e })?;
    parse_problem_str(&text)
}
