//! Multilevel Flow Models in first-order logic.
//!
//! Plant models are parsed from a small text format ([`dsl`]), translated
//! into ground facts and Horn clauses ([`translate`]), propagated forward
//! to a fixpoint ([`propagate`]) and searched backwards for operation
//! plans ([`plan`]).

pub mod dsl;
pub mod fol;
pub mod model;
pub mod plan;
pub mod propagate;
pub mod translate;

pub use fol::{unify, Atom, Formula, HornRule, Substitution, Term};
pub use model::{Edge, MfmModel, Taxonomy, Vertex};
pub use plan::{abduce_plan, validate_plan, PlanError, PlanGraph, PlanProblem};
pub use propagate::{entails, forward_propagate, PropagationResult};
pub use translate::{translate_model, ClauseSet, FactBase};
