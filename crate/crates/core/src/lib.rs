//! Exact analysis of Lagrange multipliers for variational systems and
//! extended nonlinear programs whose penalty is piecewise linear-quadratic.

pub mod cone;
pub mod enlp;
pub mod error;
pub mod fourier_motzkin;
pub mod lp;
pub mod matrix;
pub mod penalty;
pub mod poly;
pub mod polyhedron;
pub mod qp;
pub mod rational;
pub mod stability;
pub mod system;
pub mod union;

pub use cone::{ConeGenerators, PolyCone};
pub use enlp::{robust_ic_report, EnlpProblem, RobustIc, SoncVerdict, StabilityReport};
pub use error::{Error, Result};
pub use fourier_motzkin::fm_project;
pub use lp::{lp_solve, LpOutcome, LpProblem, LpSolution};
pub use matrix::{psd_check, RatMatrix, Vector};
pub use penalty::{ExtReal, PlqPenalty, ProxResult};
pub use poly::{PolyMap, Polynomial};
pub use polyhedron::{Face, PolyGenerators, Polyhedron};
pub use qp::{qp_solve, QpOutcome, QpSolution};
pub use rational::Rat;
pub use stability::{CriticalityVerdict, ProbeTrace, UniquenessReport};
pub use system::{MultiplierSet, VarSystem};
pub use union::{limiting_normal_cone_union, ConeUnion, PolyUnion};
