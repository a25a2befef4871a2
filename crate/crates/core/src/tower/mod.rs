mod report;
mod spec;
mod step;

pub use report::{classify, log_bound_check, theorem1_certify, Certificate, Convention, RamificationReport, Verdict};
pub use spec::{build_phi_iterate, is_power_of, validate_step, StepSource, StepTemplate, TowerSpec, TowerStep};
pub use step::{accumulate, breaks_from_levels, shifted_profile, step_transition, strictness_minimum, StepResult};

#[cfg(test)]
mod tests;
