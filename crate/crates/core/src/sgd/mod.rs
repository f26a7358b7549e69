//! Stochastic-gradient optimizers over a bi-fidelity gradient oracle.

mod bfsvrg;
mod design;
mod oracle;
mod penalty;
mod plain;
mod rate;
mod sag;
mod svrg;
mod table;
mod trace;

pub use bfsvrg::{bfsvrg_run, controlled_direction, AlphaMode, AnchorMode, BfSvrgConfig, ControlledDirection};
pub use design::{clamp_box, DesignVector};
pub use oracle::{draw_realizations, mean_vector, BiFidelityOracle, Fidelity, RandomRealization};
pub use penalty::{penalty_gradient, Constraint, PenalizedOracle, PenaltySpec};
pub use plain::{sgd_run, SgdConfig};
pub use rate::measure_linear_rate;
pub use sag::{bfsag_run, realization_pool, sag_run, table_indices, BfSagConfig, SagConfig};
pub use svrg::{svrg_run, SvrgConfig};
pub use table::SagGradientTable;
pub use trace::{Monitor, Observation, OptimizerTrace, Record, RunContext, Status, SNAPSHOT_LIMIT};
