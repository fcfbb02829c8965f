//! Grids, quadratures, kinetic states, parity transforms and moments shared
//! by every solver.

pub mod grid;
pub mod init;
pub mod moments;
pub mod quadrature;
pub mod state;

pub use grid::{PolarGrid2D, SpatialGrid1D, VelocityGrid1D, VelocityRule};
pub use init::{init_peaks, init_radial, initial_density, initial_radial_density, radial_equilibrium, Peak};
pub use state::{
    density_1d, density_2d, make_uniform_equilibrium, mass_1d, mass_2d, parity_merge, parity_split,
    KineticState1D, RadialState2D,
};
