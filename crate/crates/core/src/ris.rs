//! RIS element response model and per-slot configuration search.
//!
//! Each element behaves as a polarizable dipole with a Lorentzian frequency
//! response parameterized by an oscillator strength `S in [0, 1]`, a resonance
//! frequency drawn from a discrete set `Omega`, and a quality factor drawn
//! from a discrete set `X`. The damping factor is derived as `f_res / (2 chi)`
//! and never stored. The amplitude constraint `|phi_n(f_b)| <= 1` must hold on
//! every subcarrier; strengths are chosen as `min(1, 1 / max_b |phi(S=1)|)`,
//! which is exact by linearity of the response in `S`.
//!
//! Three configurators are provided: a greedy per-element search over the
//! `Omega x X` grid maximizing the sum of channel power gains over all
//! subcarriers, an idealized frequency-flat greedy benchmark with unit-modulus
//! phases, and a uniform random draw from the feasible set.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChannelRealization;
use crate::model::SystemConfig;

/// Phase grid size of the frequency-flat benchmark configurator.
pub const DEFAULT_FLAT_PHASE_GRID: usize = 16;

/// Default quality-factor candidate set.
pub const DEFAULT_CHI_SET: [f64; 4] = [10.0, 25.0, 50.0, 100.0];

/// One Lorentzian element: oscillator strength, resonance frequency, quality
/// factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisElementConfig {
    /// Oscillator strength in [0, 1].
    pub strength: f64,
    /// Resonance frequency, Hz.
    pub f_res: f64,
    /// Quality factor (dimensionless); damping is `f_res / (2 chi)`.
    pub chi: f64,
}

/// Full surface configuration. The variant is the response model: Lorentzian
/// elements, idealized frequency-flat unit-modulus phases, or no reflection
/// at all (direct link only).
#[derive(Debug, Clone, PartialEq)]
pub enum RisConfig {
    Lorentzian(Vec<RisElementConfig>),
    /// Per-element phases theta_n; the response `e^{j theta_n}` is identical
    /// on every bin.
    Flat(Vec<f64>),
    /// No reflection; carries the element count for dimension checks.
    Off(usize),
}

impl RisConfig {
    pub fn no_reflection(n_elements: usize) -> Self {
        RisConfig::Off(n_elements)
    }

    pub fn n_elements(&self) -> usize {
        match self {
            RisConfig::Lorentzian(e) => e.len(),
            RisConfig::Flat(t) => t.len(),
            RisConfig::Off(n) => *n,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            RisConfig::Lorentzian(_) => "lorentzian",
            RisConfig::Flat(_) => "flat",
            RisConfig::Off(_) => "none",
        }
    }

    /// Complex response of element `n` at frequency `f`.
    pub fn response(&self, n: usize, f: f64) -> Complex64 {
        match self {
            RisConfig::Lorentzian(e) => lorentzian_response(&e[n], f),
            RisConfig::Flat(theta) => Complex64::from_polar(1.0, theta[n]),
            RisConfig::Off(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Per-element triples for the run log: `strength:f_res:chi` for
    /// Lorentzian elements, `1:theta:-` for flat phases, empty when off.
    pub fn log_triples(&self) -> String {
        match self {
            RisConfig::Lorentzian(e) => e
                .iter()
                .map(|el| format!("{}:{}:{}", el.strength, el.f_res, el.chi))
                .collect::<Vec<_>>()
                .join(";"),
            RisConfig::Flat(t) => t
                .iter()
                .map(|th| format!("1:{th}:-"))
                .collect::<Vec<_>>()
                .join(";"),
            RisConfig::Off(_) => String::new(),
        }
    }
}

/// Discrete candidate sets for resonance frequency and quality factor.
#[derive(Debug, Clone, PartialEq)]
pub struct RisSearchSpace {
    pub omega: Vec<f64>,
    pub chi_set: Vec<f64>,
}

impl RisSearchSpace {
    /// Resonances on the subcarrier grid, default quality factors.
    pub fn over_bins(freqs: &[f64]) -> Self {
        Self {
            omega: freqs.to_vec(),
            chi_set: DEFAULT_CHI_SET.to_vec(),
        }
    }
}

/// Lorentzian element response at frequency `f`:
/// `S f^2 / (f_res^2 - f^2 + j (f_res / (2 chi)) f)`.
///
/// At resonance the real denominator part cancels and the value is exactly
/// `-2 j chi S`.
pub fn lorentzian_response(elem: &RisElementConfig, f: f64) -> Complex64 {
    let num = Complex64::new(elem.strength * f * f, 0.0);
    let den = Complex64::new(
        elem.f_res * elem.f_res - f * f,
        elem.f_res / (2.0 * elem.chi) * f,
    );
    num / den
}

/// Largest strength keeping the amplitude response within 1 on every bin:
/// `min(1, 1 / max_b |phi(f_b; S=1)|)`.
pub fn feasible_strength(f_res: f64, chi: f64, freqs: &[f64]) -> f64 {
    let unit = RisElementConfig {
        strength: 1.0,
        f_res,
        chi,
    };
    let max_amp = freqs
        .iter()
        .map(|&f| lorentzian_response(&unit, f).norm())
        .fold(0.0f64, f64::max);
    if max_amp > 1.0 {
        1.0 / max_amp
    } else {
        1.0
    }
}

/// Result of a greedy configuration pass: the chosen configuration and the
/// sum-channel-gain trace, one entry before any element visit plus one after
/// each of the `N` visits. The trace is non-decreasing by construction.
#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    pub config: RisConfig,
    pub delta_trace: Vec<f64>,
}

impl GreedyOutcome {
    /// Final sum of per-bin channel-to-noise ratios.
    pub fn delta(&self) -> f64 {
        *self.delta_trace.last().expect("trace never empty")
    }
}

/// Candidate responses precomputed on the bin grid: one `(f_res, chi)` pair
/// per entry with the feasible strength folded in. Enumeration order is
/// `omega` outer, `chi_set` inner; greedy tie-breaks keep the first seen.
#[derive(Debug, Clone)]
pub struct GreedyOptimizer {
    bins: usize,
    params: Vec<RisElementConfig>,
    // Flattened per candidate: response real/imag and squared magnitude.
    phi_re: Vec<f64>,
    phi_im: Vec<f64>,
    phi_norm: Vec<f64>,
    default_element: RisElementConfig,
}

impl GreedyOptimizer {
    pub fn new(space: &RisSearchSpace, freqs: &[f64]) -> Self {
        assert!(
            !space.omega.is_empty() && !space.chi_set.is_empty(),
            "search space must be non-empty"
        );
        let bins = freqs.len();
        let n_cand = space.omega.len() * space.chi_set.len();
        let mut params = Vec::with_capacity(n_cand);
        let mut phi_re = Vec::with_capacity(n_cand * bins);
        let mut phi_im = Vec::with_capacity(n_cand * bins);
        let mut phi_norm = Vec::with_capacity(n_cand * bins);
        for &f_res in &space.omega {
            for &chi in &space.chi_set {
                let strength = feasible_strength(f_res, chi, freqs);
                let elem = RisElementConfig {
                    strength,
                    f_res,
                    chi,
                };
                params.push(elem);
                for &f in freqs {
                    let phi = lorentzian_response(&elem, f);
                    phi_re.push(phi.re);
                    phi_im.push(phi.im);
                    phi_norm.push(phi.norm_sqr());
                }
            }
        }
        Self {
            bins,
            params,
            phi_re,
            phi_im,
            phi_norm,
            default_element: RisElementConfig {
                strength: 0.0,
                f_res: space.omega[0],
                chi: space.chi_set[0],
            },
        }
    }

    /// Single greedy pass: start from `S_n = 0` for all elements, visit
    /// elements in order, and for each keep the candidate maximizing the sum
    /// of channel gains over all bins, the incumbent included. Ties keep the
    /// first candidate seen.
    pub fn optimize(&self, ch: &ChannelRealization, cfg: &SystemConfig) -> GreedyOutcome {
        let bins = ch.bins();
        assert_eq!(bins, self.bins, "realization bins differ from search grid");
        let n = ch.n_elements;
        let n0w = cfg.noise_per_bin();
        let n_cand = self.params.len();

        // Composite field E_b, starting from the direct link.
        let mut e_re: Vec<f64> = ch.h_los.iter().map(|h| h.re).collect();
        let mut e_im: Vec<f64> = ch.h_los.iter().map(|h| h.im).collect();
        let delta_of = |re: &[f64], im: &[f64]| -> f64 {
            re.iter()
                .zip(im)
                .map(|(&r, &i)| r * r + i * i)
                .sum::<f64>()
                / n0w
        };

        let mut trace = Vec::with_capacity(n + 1);
        trace.push(delta_of(&e_re, &e_im));
        let mut elements = vec![self.default_element; n];

        // Scratch buffers reused across elements.
        let mut w2_re = vec![0.0; bins];
        let mut w2_im = vec![0.0; bins];
        let mut u = vec![0.0; bins];
        let mut v_re = vec![0.0; bins];
        let mut v_im = vec![0.0; bins];

        for elem_idx in 0..n {
            // Coupling v_b = g_(b,n) * h_(n,b); candidate gain relative to the
            // incumbent (S = 0) is
            //   dt = sum_b 2 Re(conj(E_b) v_b phi_b) + |v_b|^2 |phi_b|^2.
            for b in 0..bins {
                let g = ch.ris_to_ap_at(b, elem_idx);
                let h = ch.device_to_ris_at(b, elem_idx);
                let v = g * h;
                v_re[b] = v.re;
                v_im[b] = v.im;
                let w_re = e_re[b] * v.re + e_im[b] * v.im;
                let w_im = e_re[b] * v.im - e_im[b] * v.re;
                w2_re[b] = 2.0 * w_re;
                w2_im[b] = 2.0 * w_im;
                u[b] = v.norm_sqr();
            }

            let mut best_gain = 0.0;
            let mut best: Option<usize> = None;
            for c in 0..n_cand {
                let base = c * bins;
                let mut dt = 0.0;
                for b in 0..bins {
                    dt += w2_re[b] * self.phi_re[base + b] - w2_im[b] * self.phi_im[base + b]
                        + u[b] * self.phi_norm[base + b];
                }
                if dt > best_gain {
                    best_gain = dt;
                    best = Some(c);
                }
            }

            if let Some(c) = best {
                elements[elem_idx] = self.params[c];
                let base = c * bins;
                for b in 0..bins {
                    let pr = self.phi_re[base + b];
                    let pi = self.phi_im[base + b];
                    e_re[b] += v_re[b] * pr - v_im[b] * pi;
                    e_im[b] += v_re[b] * pi + v_im[b] * pr;
                }
            }
            trace.push(delta_of(&e_re, &e_im));
        }

        GreedyOutcome {
            config: RisConfig::Lorentzian(elements),
            delta_trace: trace,
        }
    }
}

/// Greedy Lorentzian configuration for one realization. Builds the candidate
/// grid on the fly; reuse [`GreedyOptimizer`] across slots when the grid is
/// fixed.
pub fn greedy_optimize(
    ch: &ChannelRealization,
    space: &RisSearchSpace,
    cfg: &SystemConfig,
) -> GreedyOutcome {
    GreedyOptimizer::new(space, &ch.freqs).optimize(ch, cfg)
}

/// Frequency-flat benchmark: each element carries a unit-modulus phase chosen
/// greedily from a uniform grid of `phase_grid_size` phases, elements visited
/// in order starting from all-zero phases.
pub fn flat_optimize(
    ch: &ChannelRealization,
    phase_grid_size: usize,
    cfg: &SystemConfig,
) -> GreedyOutcome {
    assert!(phase_grid_size >= 2, "need at least two candidate phases");
    let bins = ch.bins();
    let n = ch.n_elements;
    let n0w = cfg.noise_per_bin();
    let grid: Vec<Complex64> = (0..phase_grid_size)
        .map(|k| {
            Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * k as f64 / phase_grid_size as f64,
            )
        })
        .collect();

    let mut thetas = vec![0.0; n];
    // Composite field with every element at theta = 0.
    let mut field: Vec<Complex64> = (0..bins)
        .map(|b| {
            let mut e = ch.h_los[b];
            for elem in 0..n {
                e += ch.ris_to_ap_at(b, elem) * ch.device_to_ris_at(b, elem);
            }
            e
        })
        .collect();
    let delta_of =
        |field: &[Complex64]| -> f64 { field.iter().map(|e| e.norm_sqr()).sum::<f64>() / n0w };

    let mut trace = Vec::with_capacity(n + 1);
    trace.push(delta_of(&field));

    let mut v = vec![Complex64::new(0.0, 0.0); bins];
    for elem in 0..n {
        let cur = Complex64::from_polar(1.0, thetas[elem]);
        for b in 0..bins {
            v[b] = ch.ris_to_ap_at(b, elem) * ch.device_to_ris_at(b, elem);
        }
        // Gain of phase candidate relative to the element's current phase.
        let gain = |phi: Complex64| -> f64 {
            (0..bins)
                .map(|b| {
                    let e_minus = field[b] - v[b] * cur;
                    (e_minus + v[b] * phi).norm_sqr() - field[b].norm_sqr()
                })
                .sum()
        };
        let mut best_gain = 0.0;
        let mut best: Option<usize> = None;
        for (k, &phi) in grid.iter().enumerate() {
            let dt = gain(phi);
            if dt > best_gain {
                best_gain = dt;
                best = Some(k);
            }
        }
        if let Some(k) = best {
            for b in 0..bins {
                field[b] += v[b] * (grid[k] - cur);
            }
            thetas[elem] = 2.0 * std::f64::consts::PI * k as f64 / phase_grid_size as f64;
        }
        trace.push(delta_of(&field));
    }

    GreedyOutcome {
        config: RisConfig::Flat(thetas),
        delta_trace: trace,
    }
}

/// Uniform random configuration from the feasible set: resonance uniform over
/// `Omega`, quality factor uniform over `X`, strength uniform on
/// `[0, feasible_strength]` so the amplitude constraint holds by construction.
pub fn random_config<R: Rng>(
    rng: &mut R,
    space: &RisSearchSpace,
    freqs: &[f64],
    n_elements: usize,
) -> RisConfig {
    let elements = (0..n_elements)
        .map(|_| {
            let f_res = space.omega[rng.random_range(0..space.omega.len())];
            let chi = space.chi_set[rng.random_range(0..space.chi_set.len())];
            let strength = rng.random::<f64>() * feasible_strength(f_res, chi, freqs);
            RisElementConfig {
                strength,
                f_res,
                chi,
            }
        })
        .collect();
    RisConfig::Lorentzian(elements)
}
