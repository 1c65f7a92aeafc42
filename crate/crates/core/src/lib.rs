//! Gauss diagram formulas for long virtual and classical knots: arrow
//! diagrams, relator systems, exact nullspaces and move-based verification.

pub mod analysis;
pub mod corpus;
pub mod enumeration;
pub mod gauss;
pub mod linalg;
pub mod moves;
pub mod pairing;
pub mod planarity;
pub mod relators;

pub use enumeration::{degree3_basis, enumerate_diagrams, Connectivity, DiagramBasis};
pub use gauss::{CanonicalDiagram, FormalSum, GaussError, GaussWord, Kind, Role, Sign, Token};
pub use pairing::{count_occurrences, evaluate_formula, tilde_eval, tilde_eval_sum, BasisCounter, GaussFormula};
