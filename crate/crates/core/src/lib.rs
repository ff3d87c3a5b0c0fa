//! Random-coupled neural network (RCNN) and its ancestors, the PCNN and the
//! simplified PCNN, plus the pipelines built on their ignition maps:
//! binary segmentation, multiscale image fusion and neutron/gamma pulse
//! shape discrimination.

pub mod dynamics;
pub mod error;
pub mod fusion;
pub mod grid;
pub mod psd;
pub mod rng;
pub mod segmentation;
pub mod spikes;

pub use error::{Error, Result};
pub use grid::{Grid, Image, StimulusField, STIMULUS_FLOOR};
