use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::waveform::{CMatrix, WaveformConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinKind {
    Range,
    Velocity,
    Angle,
}

/// Magnitude spectrum with its bin semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpectrum {
    pub magnitudes: Vec<f64>,
    pub kind: BinKind,
}

impl ProfileSpectrum {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Index of the largest magnitude; ties resolve to the lowest index.
    pub fn argmax(&self) -> Option<usize> {
        let max = self.magnitudes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let key_max = tie_key(max, max);
        self.magnitudes
            .iter()
            .position(|&m| tie_key(m, max) == key_max)
    }
}

/// Magnitudes closer than 1e-9 of the spectrum maximum compare equal.
fn tie_key(value: f64, max: f64) -> i64 {
    if max > 0.0 {
        (value / max * 1e9).round() as i64
    } else {
        0
    }
}

/// Planned transforms for one waveform configuration.
#[derive(Clone)]
pub struct Transforms {
    range_inverse: Arc<dyn Fft<f64>>,
    range_forward: Arc<dyn Fft<f64>>,
    /// `e^{jπn/N}`: evaluates the inverse DFT on the half-bin grid.
    half_bin: Vec<Complex64>,
    angle_forward: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transforms {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transforms")
            .field("subcarriers", &self.half_bin.len())
            .finish()
    }
}

impl Transforms {
    pub fn new(subcarriers: usize, array_len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let n = subcarriers as f64;
        Self {
            range_inverse: planner.plan_fft_inverse(subcarriers),
            range_forward: planner.plan_fft_forward(subcarriers),
            half_bin: (0..subcarriers)
                .map(|i| Complex64::from_polar(1.0, std::f64::consts::PI * i as f64 / n))
                .collect(),
            angle_forward: planner.plan_fft_forward(array_len),
        }
    }

    pub fn for_config(cfg: &WaveformConfig) -> Self {
        Self::new(cfg.subcarriers, cfg.array_len())
    }

    /// Complex range response of one symbol's subcarrier samples.
    ///
    /// `out[i] = (1/N) Σ_n s[n] e^{j2π n (i + 1/2) / N}`: the inverse DFT on
    /// a grid offset by half a bin, so a delay whose fractional bin position
    /// lies in `[i, i+1)` peaks at index `i`.
    pub fn range_response(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.half_bin.len();
        if samples.len() != n {
            return Err(Error::argument(format!(
                "range response expects {n} samples, got {}",
                samples.len()
            )));
        }
        let scale = 1.0 / n as f64;
        let mut buf: Vec<Complex64> = samples
            .iter()
            .zip(&self.half_bin)
            .map(|(s, w)| s * w * scale)
            .collect();
        self.range_inverse.process(&mut buf);
        Ok(buf)
    }

    /// Exact inverse of [`Self::range_response`].
    pub fn range_response_inverse(&self, response: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.half_bin.len();
        if response.len() != n {
            return Err(Error::argument(format!(
                "range response has {} bins, expected {n}",
                response.len()
            )));
        }
        let mut buf = response.to_vec();
        self.range_forward.process(&mut buf);
        Ok(buf
            .iter()
            .zip(&self.half_bin)
            .map(|(v, w)| v * w.conj())
            .collect())
    }

    /// `(1/N_r) Σ_k a[k] e^{-j2π k i / N_r}`.
    pub fn angle_response(&self, snapshot: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.angle_forward.len();
        if snapshot.len() != n {
            return Err(Error::argument(format!(
                "angle snapshot has {} elements, array has {n}",
                snapshot.len()
            )));
        }
        let scale = 1.0 / n as f64;
        let mut buf: Vec<Complex64> = snapshot.iter().map(|a| a * scale).collect();
        self.angle_forward.process(&mut buf);
        Ok(buf)
    }
}

fn magnitudes(v: &[Complex64], kind: BinKind) -> ProfileSpectrum {
    ProfileSpectrum {
        magnitudes: v.iter().map(|z| z.norm()).collect(),
        kind,
    }
}

/// Range profile of OFDM symbol `symbol` of the equalized grid.
pub fn range_profile(equalized: &CMatrix, symbol: usize) -> Result<ProfileSpectrum> {
    if symbol >= equalized.rows() {
        return Err(Error::argument(format!(
            "symbol index {symbol} out of range 0..{}",
            equalized.rows()
        )));
    }
    let t = Transforms::new(equalized.cols(), 1);
    Ok(magnitudes(&t.range_response(equalized.row(symbol))?, BinKind::Range))
}

/// Doppler profile across symbols on subcarrier `subcarrier`:
/// `(1/M) |Σ_m S(m,n) e^{-j2π m i / M}|`.
pub fn velocity_profile(equalized: &CMatrix, subcarrier: usize) -> Result<ProfileSpectrum> {
    if subcarrier >= equalized.cols() {
        return Err(Error::argument(format!(
            "subcarrier index {subcarrier} out of range 0..{}",
            equalized.cols()
        )));
    }
    let m = equalized.rows();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let scale = 1.0 / m as f64;
    let mut buf: Vec<Complex64> = equalized
        .column(subcarrier)
        .into_iter()
        .map(|z| z * scale)
        .collect();
    fft.process(&mut buf);
    Ok(magnitudes(&buf, BinKind::Velocity))
}

/// Angle spectrum of one array snapshot.
pub fn angle_spectrum(snapshot: &[Complex64], cfg: &WaveformConfig) -> Result<ProfileSpectrum> {
    if snapshot.len() != cfg.array_len() {
        return Err(Error::argument(format!(
            "angle snapshot has {} elements, array has {}",
            snapshot.len(),
            cfg.array_len()
        )));
    }
    let t = Transforms::new(1, cfg.array_len());
    Ok(magnitudes(&t.angle_response(snapshot)?, BinKind::Angle))
}

/// Range interval `[I·w, (I+1)·w)` covered by bin `index`, `w = c/(2NΔf)`.
pub fn bin_to_range(index: usize, cfg: &WaveformConfig) -> (f64, f64) {
    let w = cfg.range_bin_width();
    (index as f64 * w, (index + 1) as f64 * w)
}

/// Angle-from-axis interval `θ ∈ [arccos(λ(I'+1)/(dN)), arccos(λI'/(dN))]`
/// for angle bin `index`, with `I'` the wrapped (signed) index.
pub fn bin_to_angle(index: usize, cfg: &WaveformConfig) -> Result<(f64, f64)> {
    let n = cfg.array_len();
    if index >= n {
        return Err(Error::argument(format!("angle bin {index} out of range 0..{n}")));
    }
    let signed = if index < n.div_ceil(2) {
        index as f64
    } else {
        index as f64 - n as f64
    };
    let scale = cfg.wavelength() / (cfg.element_spacing * n as f64);
    let acos = |arg: f64| -> Result<f64> {
        if arg.abs() > 1.0 + 1e-12 {
            return Err(Error::InvisibleRegion {
                index,
                argument: arg,
            });
        }
        Ok(arg.clamp(-1.0, 1.0).acos())
    };
    let a = acos(scale * signed)?;
    let b = acos(scale * (signed + 1.0))?;
    Ok((a.min(b), a.max(b)))
}

/// Median-relative local-maximum detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakPolicy {
    /// Power ratio over the median magnitude, dB.
    pub threshold_db: f64,
    /// Peaks below `min_relative · max` are ignored (numerical floor).
    pub min_relative: f64,
    pub max_peaks: Option<usize>,
    /// Treat the first and last bins as neighbours (DFT wrap).
    pub circular: bool,
}

impl Default for PeakPolicy {
    fn default() -> Self {
        Self {
            threshold_db: 12.0,
            min_relative: 1e-6,
            max_peaks: None,
            circular: false,
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Local maxima above `median · 10^(threshold_db/20)`, strongest first.
///
/// A bin is a local maximum when it is `>=` its left neighbour and `>` its
/// right neighbour, so plateaus report their first bin and reported peaks
/// are never adjacent. Equal magnitudes are ordered by index.
pub fn detect_peaks(spectrum: &ProfileSpectrum, policy: &PeakPolicy) -> Vec<usize> {
    let mags = &spectrum.magnitudes;
    let n = mags.len();
    if n == 0 {
        return Vec::new();
    }
    let max = mags.iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Vec::new();
    }
    let threshold = (median(mags) * 10f64.powf(policy.threshold_db / 20.0))
        .max(policy.min_relative * max);
    let neighbour = |i: usize, offset: isize| -> Option<f64> {
        let j = i as isize + offset;
        if (0..n as isize).contains(&j) {
            Some(mags[j as usize])
        } else if policy.circular && n > 1 {
            Some(mags[j.rem_euclid(n as isize) as usize])
        } else {
            None
        }
    };
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = mags[i];
            v > threshold
                && neighbour(i, -1).map_or(true, |l| v >= l)
                && neighbour(i, 1).map_or(true, |r| v > r)
        })
        .collect();
    peaks.sort_by_key(|&i| (std::cmp::Reverse(tie_key(mags[i], max)), i));
    if let Some(cap) = policy.max_peaks {
        peaks.truncate(cap);
    }
    peaks
}
