use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use super::waveform::{CMatrix, SymbolFrame, WaveformConfig, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// One reflection path seen by the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoPath {
    /// One-way range, m.
    pub range: f64,
    /// Range rate, m/s (positive when receding).
    pub velocity: f64,
    pub amplitude: Complex64,
    /// Angle from the array axis, radians; broadside is π/2.
    pub theta: f64,
}

impl EchoPath {
    pub fn unit(range: f64, theta: f64) -> Self {
        Self {
            range,
            velocity: 0.0,
            amplitude: Complex64::new(1.0, 0.0),
            theta,
        }
    }
}

/// Additive receiver noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    Disabled,
    /// Noise variance per complex sample is `Σ|A_l|² / 10^(snr/10)`, i.e.
    /// total expected echo power over noise power equals the SNR.
    SnrDb(f64),
    /// Explicit noise variance per complex sample.
    Power(f64),
}

impl Noise {
    pub fn from_config(cfg: &WaveformConfig) -> Self {
        Noise::SnrDb(cfg.snr_db)
    }

    /// Per-sample noise variance for the given path set.
    pub fn variance(&self, paths: &[EchoPath]) -> f64 {
        match *self {
            Noise::Disabled => 0.0,
            Noise::SnrDb(db) => echo_power(paths) / 10f64.powf(db / 10.0),
            Noise::Power(p) => p,
        }
    }
}

/// Expected received echo power per sample for incoherent paths.
pub fn echo_power(paths: &[EchoPath]) -> f64 {
    paths.iter().map(|p| p.amplitude.norm_sqr()).sum()
}

fn check_paths(cfg: &WaveformConfig, paths: &[EchoPath]) -> Result<()> {
    let r_max = cfg.max_unambiguous_range();
    let v_half = 0.5 * cfg.unambiguous_velocity_window();
    for (i, p) in paths.iter().enumerate() {
        if !(p.range >= 0.0 && p.range < r_max) {
            return Err(Error::argument(format!(
                "path {i} range {} m is outside [0, {r_max}) m",
                p.range
            )));
        }
        if !(p.velocity >= -v_half && p.velocity < v_half) {
            return Err(Error::argument(format!(
                "path {i} velocity {} m/s is outside [-{v_half}, {v_half}) m/s",
                p.velocity
            )));
        }
        if !(p.amplitude.norm() > 0.0) || !p.theta.is_finite() {
            return Err(Error::argument(format!(
                "path {i} needs non-zero amplitude and finite angle"
            )));
        }
    }
    Ok(())
}

/// Received symbols on every receive element, one `M x N` matrix each.
///
/// Each path contributes `A · X(m,n) · e^{-j2π nΔf 2r/c} · e^{j2π mT 2v f_c/c}`,
/// scaled on element `k` by the steering phase `e^{jkΩ}` with
/// `Ω = (2πd/λ) cos θ`. Complex white noise is then added per [`Noise`].
pub fn synthesize_echo<R: Rng + ?Sized>(
    cfg: &WaveformConfig,
    frame: &SymbolFrame,
    paths: &[EchoPath],
    noise: Noise,
    rng: &mut R,
) -> Result<Vec<CMatrix>> {
    check_paths(cfg, paths)?;
    let (m_count, n_count) = frame.grid.shape();
    let k_count = cfg.array_len();
    let two_pi = 2.0 * std::f64::consts::PI;

    // Per-path subcarrier phasors, computed directly to avoid drift.
    let range_phasors: Vec<Vec<Complex64>> = paths
        .iter()
        .map(|p| {
            let step = two_pi * cfg.subcarrier_spacing_hz * 2.0 * p.range / SPEED_OF_LIGHT;
            (0..n_count)
                .map(|n| Complex64::from_polar(1.0, -step * n as f64))
                .collect()
        })
        .collect();
    let omega: Vec<f64> = paths
        .iter()
        .map(|p| two_pi * cfg.element_spacing / cfg.wavelength() * p.theta.cos())
        .collect();
    let doppler_step: Vec<f64> = paths
        .iter()
        .map(|p| two_pi * cfg.total_symbol_time * 2.0 * p.velocity * cfg.carrier_hz / SPEED_OF_LIGHT)
        .collect();

    let sigma = (noise.variance(paths) / 2.0).sqrt();
    let mut out = Vec::with_capacity(k_count);
    let mut weights = vec![Complex64::new(0.0, 0.0); paths.len()];
    let mut channel = vec![Complex64::new(0.0, 0.0); n_count];
    for k in 0..k_count {
        let mut y = CMatrix::zeros(m_count, n_count);
        for m in 0..m_count {
            for (l, p) in paths.iter().enumerate() {
                let phase = k as f64 * omega[l] + m as f64 * doppler_step[l];
                weights[l] = p.amplitude * Complex64::from_polar(1.0, phase);
            }
            channel.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            for (w, phasors) in weights.iter().zip(&range_phasors) {
                for (c, r) in channel.iter_mut().zip(phasors) {
                    *c += w * r;
                }
            }
            for ((out, x), h) in y.row_mut(m).iter_mut().zip(frame.grid.row(m)).zip(&channel) {
                *out = x * h;
            }
        }
        if sigma > 0.0 {
            for m in 0..m_count {
                for v in y.row_mut(m) {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    *v += Complex64::new(sigma * re, sigma * im);
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Element-wise division removing the transmitted symbols.
pub fn equalize(received: &CMatrix, frame: &SymbolFrame) -> Result<CMatrix> {
    if received.shape() != frame.grid.shape() {
        return Err(Error::argument(format!(
            "received shape {:?} does not match frame shape {:?}",
            received.shape(),
            frame.grid.shape()
        )));
    }
    let data = received
        .iter()
        .zip(frame.grid.iter())
        .map(|(y, x)| y / x)
        .collect();
    CMatrix::from_vec(received.rows(), received.cols(), data)
}
