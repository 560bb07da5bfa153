//! q-terms, special q-terms and the exact Laurent polynomial arithmetic behind them.

mod forms;
pub mod json;
mod laurent;
mod term;

pub use forms::{LinForm, QuadForm, Sign};
pub use json::AnyTerm;
pub use laurent::{dense_product, div_by_q_factorial, q_binomial, q_factorial, LaurentPoly};
pub use term::{pochhammer, Factor, QRational, QTerm, QuadFactor, SpecialQTerm};
pub(crate) use term::pow_i64;
