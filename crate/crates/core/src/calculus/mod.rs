//! Function representation, expression parsing, differentiation and quadrature.

pub mod diff;
pub mod dual;
pub mod expr;
pub mod function;
pub mod grid;
pub mod quad;

pub use diff::{finite_diff_1, finite_diff_2};
pub use dual::{Dual2, Real};
pub use expr::{eval_dual, parse_expression, Bindings, Expr, Var};
pub use function::{AnyFunction, Axis, BivariateFunction, Channel, Curve, ScalarFunction, Surface};
pub use grid::GridSpec;
pub use quad::integrate_1d;
