//! Per-slot frequency-selective Rayleigh channel generation and the cascaded
//! channel-to-noise ratio of the direct plus RIS-reflected link.
//!
//! Each of the three links (device→AP, device→RIS per element, RIS→AP per
//! element) is drawn as `L` i.i.d. complex Gaussian taps with equal variance;
//! the per-bin response is the L-point DFT of the tap vector zero-padded to
//! the `B` subcarriers, scaled so the expected power on bin `b` equals the
//! free-space pathloss kernel `(c / (4 pi f_b))^2 * d^(-exp)` evaluated at the
//! actual bin frequency. Block fading: one realization per slot.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;
use thiserror::Error;

use crate::model::SystemConfig;
use crate::ris::RisConfig;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("RIS config has {config} elements but realization has {realization}")]
    DimensionMismatch { config: usize, realization: usize },
}

/// One slot's frequency responses for all three links.
///
/// Per-element matrices are stored element-major: entry `(b, n)` lives at
/// `n * bins + b`, so each element's response across bins is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Direct device→AP response per bin, length `B`.
    pub h_los: Vec<Complex64>,
    /// Device→RIS response, `B x N` element-major.
    pub device_to_ris: Vec<Complex64>,
    /// RIS→AP response, `B x N` element-major.
    pub ris_to_ap: Vec<Complex64>,
    /// Bin center frequencies, Hz, strictly increasing with the subcarrier
    /// spacing.
    pub freqs: Vec<f64>,
    pub n_elements: usize,
}

impl ChannelRealization {
    pub fn bins(&self) -> usize {
        self.h_los.len()
    }

    #[inline]
    pub fn device_to_ris_at(&self, bin: usize, element: usize) -> Complex64 {
        self.device_to_ris[element * self.bins() + bin]
    }

    #[inline]
    pub fn ris_to_ap_at(&self, bin: usize, element: usize) -> Complex64 {
        self.ris_to_ap[element * self.bins() + bin]
    }
}

/// Independent seeded streams, one per link, so realizations stay paired
/// across schemes and element counts that consume different amounts of
/// randomness.
#[derive(Debug, Clone)]
pub struct ChannelRng {
    los: ChaCha12Rng,
    device_ris: ChaCha12Rng,
    ris_ap: ChaCha12Rng,
}

impl ChannelRng {
    pub fn from_seed(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        Self {
            los: stream(0),
            device_ris: stream(1),
            ris_ap: stream(2),
        }
    }
}

/// Bin center frequencies placed symmetrically around the carrier:
/// `f_b = f_c + (b - (B - 1) / 2) * W`.
pub fn bin_frequencies(cfg: &SystemConfig) -> Vec<f64> {
    let b = cfg.subcarriers;
    let offset = (b as f64 - 1.0) / 2.0;
    (0..b)
        .map(|i| cfg.carrier_hz + (i as f64 - offset) * cfg.subcarrier_spacing_hz)
        .collect()
}

/// Free-space pathloss kernel with a distance exponent:
/// `(c / (4 pi f))^2 * d^(-exp)`.
pub fn pathloss(distance_m: f64, freq_hz: f64, exponent: f64) -> f64 {
    (SPEED_OF_LIGHT / (4.0 * PI * freq_hz)).powi(2) * distance_m.powf(-exponent)
}

/// Draw one block-fading realization for all links.
pub fn draw_channel(rng: &mut ChannelRng, cfg: &SystemConfig) -> ChannelRealization {
    let bins = cfg.subcarriers;
    let taps = cfg.taps;
    let n = cfg.n_elements;
    let freqs = bin_frequencies(cfg);

    // Shared DFT kernel: twiddle[l * bins + b] = exp(-j 2 pi b l / B).
    let mut twiddle = Vec::with_capacity(taps * bins);
    for l in 0..taps {
        for b in 0..bins {
            let angle = -2.0 * PI * (b as f64) * (l as f64) / bins as f64;
            twiddle.push(Complex64::from_polar(1.0, angle));
        }
    }

    let d_direct = cfg.device_pos.distance(&cfg.ap_pos);
    let d_device_ris = cfg.device_pos.distance(&cfg.ris_pos);
    let d_ris_ap = cfg.ris_pos.distance(&cfg.ap_pos);
    let amp = |d: f64, exp: f64| -> Vec<f64> {
        freqs.iter().map(|&f| pathloss(d, f, exp).sqrt()).collect()
    };
    let amp_direct = amp(d_direct, cfg.pathloss_exp.direct);
    let amp_device_ris = amp(d_device_ris, cfg.pathloss_exp.device_ris);
    let amp_ris_ap = amp(d_ris_ap, cfg.pathloss_exp.ris_ap);

    // One scalar link: unit-total-power taps, DFT to bins, per-bin amplitude.
    let mut draw_link = |rng: &mut ChaCha12Rng, amp: &[f64], out: &mut Vec<Complex64>| {
        let tap_scale = (0.5 / taps as f64).sqrt();
        let taps_vec: Vec<Complex64> = (0..taps)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re * tap_scale, im * tap_scale)
            })
            .collect();
        for b in 0..bins {
            let mut h = Complex64::new(0.0, 0.0);
            for (l, tap) in taps_vec.iter().enumerate() {
                h += tap * twiddle[l * bins + b];
            }
            out.push(h * amp[b]);
        }
    };

    let mut h_los = Vec::with_capacity(bins);
    draw_link(&mut rng.los, &amp_direct, &mut h_los);

    let mut device_to_ris = Vec::with_capacity(bins * n);
    let mut ris_to_ap = Vec::with_capacity(bins * n);
    for _ in 0..n {
        draw_link(&mut rng.device_ris, &amp_device_ris, &mut device_to_ris);
        draw_link(&mut rng.ris_ap, &amp_ris_ap, &mut ris_to_ap);
    }

    ChannelRealization {
        h_los,
        device_to_ris,
        ris_to_ap,
        freqs,
        n_elements: n,
    }
}

/// Cascaded channel-to-noise ratio per bin:
/// `|h_los(f_b) + sum_n g_(b,n) phi_n(f_b) h_(n,b)|^2 / (N0 W)`.
pub fn cascaded_cnr(
    ch: &ChannelRealization,
    ris: &RisConfig,
    cfg: &SystemConfig,
) -> Result<Vec<f64>, ChannelError> {
    if ris.n_elements() != ch.n_elements {
        return Err(ChannelError::DimensionMismatch {
            config: ris.n_elements(),
            realization: ch.n_elements,
        });
    }
    let n0w = cfg.noise_per_bin();
    let bins = ch.bins();
    let mut alpha = Vec::with_capacity(bins);
    for b in 0..bins {
        let mut field = ch.h_los[b];
        for n in 0..ch.n_elements {
            let phi = ris.response(n, ch.freqs[b]);
            if phi != Complex64::new(0.0, 0.0) {
                field += ch.ris_to_ap_at(b, n) * phi * ch.device_to_ris_at(b, n);
            }
        }
        alpha.push(field.norm_sqr() / n0w);
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ris::{RisConfig, RisElementConfig};

    fn small_cfg() -> SystemConfig {
        let mut cfg = SystemConfig::reference();
        cfg.subcarriers = 16;
        cfg.n_elements = 4;
        cfg
    }

    #[test]
    fn bin_frequencies_symmetric_grid() {
        let mut cfg = SystemConfig::reference();
        cfg.carrier_hz = 3.5e9;
        cfg.subcarrier_spacing_hz = 1e6;
        cfg.subcarriers = 16;
        let freqs = bin_frequencies(&cfg);
        assert_eq!(freqs.len(), 16);
        // First bin sits (B-1)/2 spacings below the carrier.
        assert!((freqs[0] - (3.5e9 - 7.5e6)).abs() < 1e-6);
        // Arithmetic progression spans (B-1)*W.
        let span = freqs[15] - freqs[0];
        assert!((span - 15e6).abs() < 1e-6);
        for w in freqs.windows(2) {
            assert!((w[1] - w[0] - 1e6).abs() < 1e-6);
        }

        cfg.subcarriers = 1;
        let single = bin_frequencies(&cfg);
        assert_eq!(single, vec![3.5e9]);
    }

    #[test]
    fn single_tap_gives_flat_response() {
        let mut cfg = small_cfg();
        cfg.taps = 1;
        let mut rng = ChannelRng::from_seed(11);
        let ch = draw_channel(&mut rng, &cfg);
        // With one tap the DFT is constant; only the per-bin pathloss varies.
        // Remove the pathloss amplitude and the magnitude must be flat.
        let d = cfg.device_pos.distance(&cfg.ap_pos);
        let mags: Vec<f64> = ch
            .h_los
            .iter()
            .zip(&ch.freqs)
            .map(|(h, &f)| h.norm() / pathloss(d, f, cfg.pathloss_exp.direct).sqrt())
            .collect();
        for &m in &mags[1..] {
            assert!((m - mags[0]).abs() < 1e-9 * mags[0].abs().max(1e-30));
        }
    }

    #[test]
    fn direct_link_power_matches_pathloss() {
        // Monte Carlo check of the normalization: the draw-averaged bin-mean
        // power of the direct link equals the bin-mean pathloss within 5%.
        let mut cfg = small_cfg();
        cfg.n_elements = 0;
        let d = cfg.device_pos.distance(&cfg.ap_pos);
        let freqs = bin_frequencies(&cfg);
        let target: f64 = freqs
            .iter()
            .map(|&f| pathloss(d, f, cfg.pathloss_exp.direct))
            .sum::<f64>()
            / freqs.len() as f64;

        let mut rng = ChannelRng::from_seed(42);
        let draws = 10_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let ch = draw_channel(&mut rng, &cfg);
            acc += ch.h_los.iter().map(|h| h.norm_sqr()).sum::<f64>() / cfg.subcarriers as f64;
        }
        let mean = acc / draws as f64;
        let rel = (mean - target).abs() / target;
        assert!(rel < 0.05, "normalization off by {:.2}%", rel * 100.0);
    }

    #[test]
    fn equal_seeds_reproduce_bit_identical_realizations() {
        let cfg = small_cfg();
        let mut a = ChannelRng::from_seed(9);
        let mut b = ChannelRng::from_seed(9);
        for _ in 0..3 {
            assert_eq!(draw_channel(&mut a, &cfg), draw_channel(&mut b, &cfg));
        }
    }

    #[test]
    fn los_stream_independent_of_element_count() {
        // Per-link sub-streams keep the direct link identical whether or not
        // the RIS links consume randomness.
        let mut with_ris = small_cfg();
        with_ris.n_elements = 4;
        let mut without = small_cfg();
        without.n_elements = 0;
        let a = draw_channel(&mut ChannelRng::from_seed(5), &with_ris);
        let b = draw_channel(&mut ChannelRng::from_seed(5), &without);
        assert_eq!(a.h_los, b.h_los);
    }

    #[test]
    fn zero_strength_equals_direct_only() {
        let cfg = small_cfg();
        let ch = draw_channel(&mut ChannelRng::from_seed(3), &cfg);
        let freqs = ch.freqs.clone();
        let off = RisConfig::no_reflection(cfg.n_elements);
        let zeroed = RisConfig::Lorentzian(
            (0..cfg.n_elements)
                .map(|_| RisElementConfig {
                    strength: 0.0,
                    f_res: freqs[0],
                    chi: 10.0,
                })
                .collect(),
        );
        let direct = cascaded_cnr(&ch, &off, &cfg).unwrap();
        let zero_s = cascaded_cnr(&ch, &zeroed, &cfg).unwrap();
        assert_eq!(direct, zero_s);
        let n0w = cfg.noise_per_bin();
        for (a, h) in direct.iter().zip(&ch.h_los) {
            assert_eq!(*a, h.norm_sqr() / n0w);
            assert!(*a >= 0.0);
        }
    }

    #[test]
    fn no_elements_equals_direct_only() {
        let mut cfg = small_cfg();
        cfg.n_elements = 0;
        let ch = draw_channel(&mut ChannelRng::from_seed(4), &cfg);
        let alpha = cascaded_cnr(&ch, &RisConfig::no_reflection(0), &cfg).unwrap();
        let n0w = cfg.noise_per_bin();
        for (a, h) in alpha.iter().zip(&ch.h_los) {
            assert_eq!(*a, h.norm_sqr() / n0w);
        }
    }

    #[test]
    fn hand_built_single_element_resonance() {
        // Unit channels, one element, one bin, element at resonance:
        // alpha = |1 - 2j chi S|^2 / (N0 W).
        let mut cfg = small_cfg();
        cfg.subcarriers = 1;
        cfg.n_elements = 1;
        let f = cfg.carrier_hz;
        let chi = 25.0;
        let s = 0.01;
        let ch = ChannelRealization {
            h_los: vec![Complex64::new(1.0, 0.0)],
            device_to_ris: vec![Complex64::new(1.0, 0.0)],
            ris_to_ap: vec![Complex64::new(1.0, 0.0)],
            freqs: vec![f],
            n_elements: 1,
        };
        let ris = RisConfig::Lorentzian(vec![RisElementConfig {
            strength: s,
            f_res: f,
            chi,
        }]);
        let alpha = cascaded_cnr(&ch, &ris, &cfg).unwrap();
        let expected = Complex64::new(1.0, -2.0 * chi * s).norm_sqr() / cfg.noise_per_bin();
        let rel = (alpha[0] - expected).abs() / expected;
        assert!(rel < 1e-12, "rel err {rel}");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let cfg = small_cfg();
        let ch = draw_channel(&mut ChannelRng::from_seed(1), &cfg);
        let ris = RisConfig::no_reflection(cfg.n_elements + 1);
        assert!(matches!(
            cascaded_cnr(&ch, &ris, &cfg),
            Err(ChannelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cnr_nonnegative_and_reflection_linear_in_strength() {
        let cfg = small_cfg();
        let mut rng = ChannelRng::from_seed(21);
        for _ in 0..50 {
            let ch = draw_channel(&mut rng, &cfg);
            let f_res = ch.freqs[3];
            let element = |s: f64| {
                let mut elems = vec![
                    RisElementConfig {
                        strength: 0.0,
                        f_res,
                        chi: 10.0
                    };
                    cfg.n_elements
                ];
                elems[0].strength = s;
                RisConfig::Lorentzian(elems)
            };
            let alpha = cascaded_cnr(&ch, &element(0.02), &cfg).unwrap();
            assert!(alpha.iter().all(|&a| a >= 0.0));

            // The single-element reflected term g * phi * h scales
            // proportionally to the strength.
            for b in 0..cfg.subcarriers {
                let reflected = |s: f64| {
                    let phi = element(s).response(0, ch.freqs[b]);
                    ch.ris_to_ap_at(b, 0) * phi * ch.device_to_ris_at(b, 0)
                };
                let r1 = reflected(0.02);
                let r2 = reflected(0.04);
                assert!((r2 - r1 * 2.0).norm() <= 1e-12 * r2.norm().max(1e-300));
            }
        }
    }
}
