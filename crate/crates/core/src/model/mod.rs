//! Closed-form Hotelling pricing and the reset-constrained equilibrium.

pub mod equilibrium;
pub mod isotonic;
pub mod params;
pub mod pricing;

pub use equilibrium::{
    block_prices, solve_constrained_path, solve_within_cycle, solve_within_cycle_price_space, Block,
    BlockPartition, EquilibriumPath,
};
pub use params::{LambdaProfile, ModelParams, WeightProfile};
pub use pricing::{
    block_price, check_interiority, day_weighted_share, flat_lower_bound, unrestricted_path,
    unrestricted_price, weighted_average_price, InteriorityReport,
};
