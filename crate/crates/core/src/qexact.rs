//! Exact rebuild of the periodic-point free homeomorphism of Q that is not a
//! shift, over the field Q(sqrt 2, sqrt 7).

mod example;
mod interval;
mod quad;

pub use example::{
    build_example, core_interval, epsilon, level_interval, radius, Evaluation, ExampleMap, LevelReport, PeriodicScan,
    QexactError, StarWitness, DEPTH_CAP,
};
pub use interval::{AffinePiece, IntervalError, QClopenInterval};
pub use quad::{DivisionByZero, QuadNum};
