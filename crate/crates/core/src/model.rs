//! Domain types and closed-form evaluation of per-slot delays and powers.
//!
//! All arithmetic is in SI units: watts, hertz, seconds, bits, CPU cycles.
//! Human-facing units (GHz, mW, dBm, ms) exist only at config parsing.
//!
//! The per-slot pipeline is: local compute (`d_l = w_l / f_l`, cubic CPU
//! power `p_l = gamma * f_l^3`), uplink transfer at the multi-carrier Shannon
//! rate (`d_u = a_bits / rate`), and remote compute on the edge host's
//! granted CPU share (`d_r = w_r / (sigma * f_max)`). All types are immutable
//! value records and every operation is a pure function.

use thiserror::Error;

use crate::ris::RisConfig;

/// Multiple of the outage threshold used as the uplink delay when the rate
/// is exactly zero. Any finite value above the threshold keeps the virtual
/// queue arithmetic finite while still counting the slot as an outage.
pub const RATE_ZERO_DELAY_CAP: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// 2D position, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Pathloss exponents for the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossExponents {
    /// Device → RIS segment.
    pub device_ris: f64,
    /// RIS → AP segment.
    pub ris_ap: f64,
    /// Direct device → AP link.
    pub direct: f64,
}

/// Physical and algorithmic constants shared by every module.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Effective switched capacitance of the device CPU, W·s³/cycles³.
    pub gamma: f64,
    /// Total transmit power bounds, W.
    pub p_min: f64,
    pub p_max: f64,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Subcarrier spacing, Hz.
    pub subcarrier_spacing_hz: f64,
    /// Number of subcarriers.
    pub subcarriers: usize,
    /// Noise power spectral density, W/Hz.
    pub noise_psd: f64,
    /// Edge-host maximum CPU frequency, cycles/s.
    pub edge_f_max: f64,
    /// Device CPU frequency bounds, cycles/s.
    pub f_local_min: f64,
    pub f_local_max: f64,
    /// Scenario geometry, meters.
    pub device_pos: Point,
    pub ris_pos: Point,
    pub ap_pos: Point,
    /// RIS element count.
    pub n_elements: usize,
    /// Channel tap count per link.
    pub taps: usize,
    pub pathloss_exp: PathlossExponents,
}

impl SystemConfig {
    /// Bundled reference scenario: a 3.5 GHz, 16-subcarrier uplink with a
    /// 100-element RIS between a device at (10, 30) and an AP at the origin.
    pub fn reference() -> Self {
        Self {
            gamma: 1e-27,
            p_min: 1e-4,
            p_max: 0.1,
            carrier_hz: 3.5e9,
            subcarrier_spacing_hz: 1e6,
            subcarriers: 16,
            noise_psd: 10f64.powf(-17.4) * 1e-3,
            edge_f_max: 1e10,
            f_local_min: 1e7,
            f_local_max: 1e9,
            device_pos: Point::new(10.0, 30.0),
            ris_pos: Point::new(-5.0, 2.5),
            ap_pos: Point::new(0.0, 0.0),
            n_elements: 100,
            taps: 4,
            pathloss_exp: PathlossExponents {
                device_ris: 2.0,
                ris_ap: 2.0,
                direct: 4.0,
            },
        }
    }

    /// Noise power per subcarrier, W.
    pub fn noise_per_bin(&self) -> f64 {
        self.noise_psd * self.subcarrier_spacing_hz
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::InvalidConfig(msg.to_string()))
            }
        };
        check(
            0.0 < self.p_min && self.p_min < self.p_max,
            "require 0 < p_min < p_max",
        )?;
        check(
            0.0 < self.f_local_min && self.f_local_min < self.f_local_max,
            "require 0 < f_local_min < f_local_max",
        )?;
        check(self.subcarriers >= 1, "require at least one subcarrier")?;
        check(self.taps >= 1, "require at least one channel tap")?;
        check(self.noise_psd > 0.0, "require noise_psd > 0")?;
        check(self.gamma > 0.0, "require gamma > 0")?;
        check(self.carrier_hz > 0.0, "require carrier_hz > 0")?;
        check(
            self.subcarrier_spacing_hz > 0.0,
            "require subcarrier_spacing_hz > 0",
        )?;
        check(self.edge_f_max > 0.0, "require edge_f_max > 0")?;
        Ok(())
    }
}

/// One slot's task: local cycles, offload payload, remote cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskArrival {
    /// Local computing demand, CPU cycles.
    pub w_local: f64,
    /// Offload payload, bits.
    pub a_bits: f64,
    /// Remote computing demand, CPU cycles.
    pub w_remote: f64,
}

impl TaskArrival {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("w_local", self.w_local),
            ("a_bits", self.a_bits),
            ("w_remote", self.w_remote),
        ] {
            if value <= 0.0 {
                return Err(ModelError::NonPositive { name, value });
            }
        }
        Ok(())
    }
}

/// Edge host CPU share granted this slot, a fraction in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    pub sigma: f64,
}

impl EdgeState {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.sigma > 0.0 && self.sigma <= 1.0 {
            Ok(())
        } else {
            Err(ModelError::InvalidConfig(format!(
                "sigma must lie in (0, 1], got {}",
                self.sigma
            )))
        }
    }
}

/// Per-slot controls: device CPU frequency, per-bin powers, RIS configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDecision {
    /// Device CPU frequency, cycles/s.
    pub f_local: f64,
    /// Per-subcarrier transmit powers, W.
    pub p_bins: Vec<f64>,
    pub ris: RisConfig,
}

impl SlotDecision {
    pub fn validate(&self, cfg: &SystemConfig) -> Result<(), ModelError> {
        if self.f_local < cfg.f_local_min || self.f_local > cfg.f_local_max {
            return Err(ModelError::InvalidConfig(format!(
                "f_local {} outside [{}, {}]",
                self.f_local, cfg.f_local_min, cfg.f_local_max
            )));
        }
        if self.p_bins.len() != cfg.subcarriers {
            return Err(ModelError::InvalidConfig(format!(
                "expected {} power bins, got {}",
                cfg.subcarriers,
                self.p_bins.len()
            )));
        }
        if self.p_bins.iter().any(|&p| p < 0.0) {
            return Err(ModelError::InvalidConfig(
                "negative per-bin power".to_string(),
            ));
        }
        let total: f64 = self.p_bins.iter().sum();
        if total < cfg.p_min || total > cfg.p_max {
            return Err(ModelError::InvalidConfig(format!(
                "total power {} outside [{}, {}]",
                total, cfg.p_min, cfg.p_max
            )));
        }
        Ok(())
    }

    /// Total transmit power, W.
    pub fn total_power(&self) -> f64 {
        self.p_bins.iter().sum()
    }
}

/// Realized delays, powers, rate, and the outage indicator for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotMetrics {
    pub d_local: f64,
    pub d_uplink: f64,
    pub d_remote: f64,
    pub d_total: f64,
    pub p_local: f64,
    pub p_uplink: f64,
    pub p_total: f64,
    /// Uplink rate, bits/s.
    pub rate: f64,
    /// True when `d_total` exceeds the outage threshold.
    pub outage: bool,
}

/// Local compute delay and cubic CPU power: `(w_l / f_l, gamma * f_l^3)`.
pub fn eval_local(w_local: f64, f_local: f64, gamma: f64) -> Result<(f64, f64), ModelError> {
    for (name, value) in [("w_local", w_local), ("f_local", f_local), ("gamma", gamma)] {
        if value <= 0.0 {
            return Err(ModelError::NonPositive { name, value });
        }
    }
    Ok((w_local / f_local, gamma * f_local.powi(3)))
}

/// Multi-carrier Shannon rate, bits/s: `W * sum_b log2(1 + cnr_b * p_b)`.
///
/// Zero when every product is zero.
pub fn eval_rate(p_bins: &[f64], cnr: &[f64], spacing_hz: f64) -> f64 {
    debug_assert_eq!(p_bins.len(), cnr.len());
    spacing_hz
        * p_bins
            .iter()
            .zip(cnr)
            .map(|(&p, &a)| (1.0 + a * p).log2())
            .sum::<f64>()
}

/// Evaluate the realized end-to-end metrics of one slot.
///
/// Expects a decision satisfying [`SlotDecision`] invariants and a strictly
/// positive arrival. When the rate is exactly zero the uplink delay is capped
/// at [`RATE_ZERO_DELAY_CAP`]` * d_max` so queue updates stay finite; the cap
/// exceeds the threshold, so such a slot always counts as an outage.
pub fn eval_slot(
    decision: &SlotDecision,
    arrival: &TaskArrival,
    edge: &EdgeState,
    cnr: &[f64],
    cfg: &SystemConfig,
    d_max: f64,
) -> SlotMetrics {
    let (d_local, p_local) = eval_local(arrival.w_local, decision.f_local, cfg.gamma)
        .expect("slot inputs satisfy positivity invariants");
    let rate = eval_rate(&decision.p_bins, cnr, cfg.subcarrier_spacing_hz);
    let d_uplink = if rate > 0.0 {
        arrival.a_bits / rate
    } else {
        log::debug!(
            "zero uplink rate: capping d_uplink at {} s (uncapped value is infinite)",
            RATE_ZERO_DELAY_CAP * d_max
        );
        RATE_ZERO_DELAY_CAP * d_max
    };
    let d_remote = arrival.w_remote / (edge.sigma * cfg.edge_f_max);
    let p_uplink = decision.total_power();
    let d_total = d_local + d_uplink + d_remote;
    SlotMetrics {
        d_local,
        d_uplink,
        d_remote,
        d_total,
        p_local,
        p_uplink,
        p_total: p_local + p_uplink,
        rate,
        outage: d_total > d_max,
    }
}
