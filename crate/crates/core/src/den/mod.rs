//! Reference denotational semantics, with the diamond type inhabited.

mod semantics;
mod value;

pub use semantics::{
    coherence_check, compare_den, den_closed, den_eval, den_of_env, den_of_value, random_den,
};
pub use value::{den_to_value, DenEnv, DenValue, HostFn};
