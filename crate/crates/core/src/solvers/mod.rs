//! Solution representations built on the expansion kernel.

mod burgers;
mod cauchy;
mod ibvp;
mod spec;

pub use burgers::{burgers_curl, burgers_demo, burgers_heat_coefficients};
pub use cauchy::{solve_cauchy, QuadConfig};
pub use ibvp::{solve_ibvp2, BoundaryConfig};
pub use spec::{
    BoundaryDensity, FunctionSpec, GaussianBump, Grid, GridSolution, OutputSpec, ProblemKind, ProblemSpec,
    SeparableTerm, SolveMeta, SpaceTimeFn,
};
