//! Seeded instance generation, theorem checks on single instances, the
//! hyperplane slicing experiment and the fuzz driver.

mod fuzz;
mod generate;
mod report;
mod slice;
mod verify;

use thiserror::Error;

use crate::forms::FormError;
use crate::geometry::GeometryError;
use crate::ideals::IdealError;
use crate::poly::PolyError;

pub use fuzz::{fuzz_theorems, fuzz_theorems_with, Execution, FuzzOptions, FuzzSummary, InstanceOutcome, Reproducer, Tally};
pub use generate::{
    instance_rng, random_finite_map, random_singular_foliation, random_singular_hypersurface, GeneratorConfig,
    MAX_ATTEMPTS,
};
pub use report::{Check, Instance, JacobianRegime, VerificationReport};
pub use slice::{slice_experiment, slice_samples, Hyperplane, SAMPLE_OFFSETS};
pub use verify::{verify_theorem_a, verify_theorem_b};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("no admissible instance after {attempts} attempts")]
    GenerationExhausted { attempts: usize },
    #[error("map germ is not finite")]
    NotFinite,
    #[error("input is not singular at the origin")]
    InputNotSingular,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("stored instance does not parse: {0}")]
    Replay(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
