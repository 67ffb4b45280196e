//! Discrete-time simulator and optimization library for power-minimizing
//! computation offloading over RIS-aided frequency-selective wireless links.
//!
//! A single device splits each periodic task into a local compute share, an
//! uplink payload, and a remote compute share executed by an edge host. Every
//! slot, a drift-plus-penalty controller picks the device CPU frequency, the
//! per-subcarrier transmit powers, and the configuration of a reconfigurable
//! intelligent surface (RIS) whose elements follow a frequency-dispersive
//! Lorentzian response. Two virtual queues track average-delay and outage
//! constraint debt; minimizing the per-slot drift-plus-penalty bound trades
//! transmit/compute power against delay guarantees through the weight `V`.
//!
//! Module map:
//! - [`model`]: domain types and closed-form delay/power evaluation.
//! - [`channel`]: frequency-selective Rayleigh realizations and the cascaded
//!   channel-to-noise ratio.
//! - [`ris`]: Lorentzian element response, greedy configuration search, and
//!   the frequency-flat / random benchmark configurators.
//! - [`allocator`]: closed-form local CPU solution and water-filling uplink
//!   power allocation with a KKT residual certificate.
//! - [`controller`]: virtual queues and the per-slot decision.
//! - [`sim`]: scenario runner, V-sweeps, and summary statistics.

pub mod allocator;
pub mod channel;
pub mod controller;
pub mod model;
pub mod ris;
pub mod sim;
