//! Big-step cost semantics over closures and environments.

mod cost;
mod literal;
mod machine;
mod value;

pub use cost::{Const, CostModel, CostModelError, Ledger, Rule};
pub use literal::{parse_value, LiteralError};
pub use machine::{check_nsi, eval, eval_with_fuel, EvalError, EvalResult, DEFAULT_FUEL};
pub use value::{env_has_types, size_env, Env, Value};

#[cfg(test)]
mod tests;
