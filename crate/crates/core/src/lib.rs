//! Reservoir computers whose outputs are widened by banks of FIR filters.
//!
//! The crate is `no_std` (with `alloc`) and purely computational:
//!
//! * [`signals`] generates the drive and target series (Lorenz, the Sprott
//!   catalog, uniform noise);
//! * [`reservoir`] runs a leaky-tanh network or a delay-line laser map and
//!   records node states;
//! * [`filterbank`] holds the Bessel FIR bank and builds the filtered state
//!   matrix;
//! * [`readout`] fits ridge readouts and measures error, covariance rank and
//!   memory capacity.
//!
//! IO, configuration and experiment orchestration live in the `filtres`
//! companion crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod error;
pub mod filterbank;
pub mod linalg;
pub mod readout;
pub mod reservoir;
pub mod rng;
pub mod signals;
pub mod state;

pub use error::{Error, Result};
pub use filterbank::{apply_filter, assemble_filter_matrix, bessel_bank, update_time_model, FilterBank, UpdateTime};
pub use readout::{
    assemble_state_matrix, covariance_rank, evaluate_error, gram_schmidt_basis, memory_capacity, train_ridge,
    CapacityFormula, FitSource, GramSchmidt, MemoryOptions, MemoryReport, RankReport, ReadoutModel, Ridge,
};
pub use reservoir::{
    build_adjacency, build_input_weights, run_laser, run_leaky_tanh, Adjacency, InputScaling, LaserReservoirSpec,
    Reservoir, TanhReservoirSpec,
};
pub use signals::{generate_sprott, integrate_lorenz, uniform_noise, LorenzParams, MultivariateSeries};
pub use state::{ColumnLabel, StateMatrix};
