//! Simulation of power-budgeted wireless topologies under agent churn.
//!
//! Agents sit at fixed uniform positions in the unit square. A link between
//! two agents costs each of them `|r_i - r_j|^delta`. Every step one agent
//! leaves and a newcomer arrives; agents below `p_min` attach to partners
//! (closest feasible or uniformly random feasible) as long as neither side
//! exceeds `p_max`.
//!
//! The parameter `q` is the weight of *random* attachment throughout: the
//! per-attempt probability of a random pick under [`ModelKind::A`] and the
//! fraction of random-attaching agents under [`ModelKind::B`].

pub mod churn;
pub mod csr;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod network;
pub mod params;
pub mod seed;
pub mod spatial;
pub mod spectral;

pub use churn::{SimState, StepReport};
pub use geometry::{analytic_degree_q0, pair_power, Position};
pub use metrics::{MetricSet, MetricsSample};
pub use network::{Agent, AgentId, Attachment, Network, NetworkError};
pub use params::{ModelKind, Params, ParamsError};
pub use spatial::GridIndex;
pub use spectral::{spectral_gap, SpectralResult};
