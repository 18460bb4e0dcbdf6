//! Description-logic features over planning states.
//!
//! Concepts denote sets of objects and roles denote binary relations over
//! objects. Concepts and roles are built from predicate projections such as
//! `primitive(at, 0, 1)` with the usual set and relational operators. Any
//! subexpression may be wrapped in `goal(..)` to read the goal atoms instead
//! of the state.

mod bits;
mod eval;
mod expr;

pub use bits::{ObjSet, Relation};
pub use eval::{CompileError, Evaluator, Extension, Num, Value};
pub use expr::{concept, feature_expr, parse_term, role, set_expr, Concept, ExprError, FeatureExpr, Macros, Role, SetExpr, Term};
