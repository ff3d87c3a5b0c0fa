//! PCNN, SPCNN and RCNN lattices.
//!
//! All three share the same skeleton: a lattice of neurons, one per pixel,
//! each with an internal activity `U`, a dynamic threshold `θ` and a binary
//! output `Y`. The RCNN replaces the SPCNN's fixed 3×3 link matrix with a
//! large Gaussian kernel whose channels are randomly closed every iteration.

mod kernel;
mod link;
mod network;
mod params;

pub use kernel::{
    effective_weights, sample_inactivation_mask, InactivationMask, InactivationMode,
    InactivationProfile, Kernel, MAX_RADIUS,
};
pub use link::link_field;
pub use network::{
    pcnn_step, rcnn_step, run_pcnn, run_rcnn, run_rcnn_sequence, run_rcnn_with, run_spcnn,
    spcnn_step, NeuronState, RunResult, SpikeRaster,
};
pub use params::{PcnnParams, RcnnParams, SpcnnParams};
