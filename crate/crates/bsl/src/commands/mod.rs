//! One module per CLI command.

mod admit;
mod coupled;
mod eigen;
mod exponents;
mod mode;
mod scaling;
mod simulate;
mod threshold;

use crate::config::Params;
use crate::{CommandOutput, Context, Result};

pub use coupled::random_columns;

pub fn dispatch(params: &Params, ctx: &Context<'_>) -> Result<CommandOutput> {
    match params {
        Params::Eigen(p) => eigen::run(p, ctx),
        Params::Exponents(p) => exponents::run(p, ctx),
        Params::Mode(p) => mode::run(p, ctx),
        Params::Coupled(p) => coupled::run(p, ctx),
        Params::Admit(p) => admit::run(p, ctx),
        Params::Simulate(p) => simulate::run(p, ctx),
        Params::Threshold(p) => threshold::run(p, ctx),
        Params::Scaling(p) => scaling::run(p, ctx),
    }
}
