use rand::Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Propagation speed used for all range/velocity conversions, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// OFDM numerology and array geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformConfig {
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Subcarrier spacing, Hz.
    pub subcarrier_spacing_hz: f64,
    /// OFDM symbols per frame (M).
    pub symbols: usize,
    /// Subcarriers per symbol (N).
    pub subcarriers: usize,
    /// Elementary symbol duration, s.
    pub symbol_time: f64,
    /// Cyclic prefix duration, s.
    pub guard_time: f64,
    /// Total symbol duration, s.
    pub total_symbol_time: f64,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Element spacing, m.
    pub element_spacing: f64,
    /// Received-signal SNR, dB.
    pub snr_db: f64,
}

impl WaveformConfig {
    /// 28 GHz numerology with 120 kHz spacing and 10240 subcarriers.
    ///
    /// The elementary symbol is exactly `1/Δf`; the 10.38 µs total symbol is
    /// kept and the guard interval is the remainder.
    pub fn full_scale() -> Self {
        let delta_f = 120e3;
        let symbol_time = 1.0 / delta_f;
        let total = 10.38e-6;
        Self::with_half_wavelength(28e9, delta_f, 256, 10240, symbol_time, total - symbol_time, 32, 32, 10.0)
    }

    /// Desk-scale profile: 1024 subcarriers at 1.2 MHz keep the full
    /// 1.2288 GHz bandwidth (and so the range resolution) of [`Self::full_scale`].
    pub fn desk_scale() -> Self {
        let delta_f = 1.2e6;
        let symbol_time = 1.0 / delta_f;
        let total = symbol_time * 10.38e-6 * 120e3;
        Self::with_half_wavelength(28e9, delta_f, 64, 1024, symbol_time, total - symbol_time, 32, 32, 10.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn with_half_wavelength(
        carrier_hz: f64,
        subcarrier_spacing_hz: f64,
        symbols: usize,
        subcarriers: usize,
        symbol_time: f64,
        guard_time: f64,
        tx_antennas: usize,
        rx_antennas: usize,
        snr_db: f64,
    ) -> Self {
        Self {
            carrier_hz,
            subcarrier_spacing_hz,
            symbols,
            subcarriers,
            symbol_time,
            guard_time,
            total_symbol_time: symbol_time + guard_time,
            tx_antennas,
            rx_antennas,
            element_spacing: 0.5 * SPEED_OF_LIGHT / carrier_hz,
            snr_db,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fc", self.carrier_hz),
            ("delta_f", self.subcarrier_spacing_hz),
            ("Tp", self.symbol_time),
            ("T", self.total_symbol_time),
            ("d", self.element_spacing),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(format!("waveform {name} must be > 0, got {v}")));
            }
        }
        if !(self.guard_time >= 0.0) {
            return Err(Error::validation("waveform Tc must be >= 0"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::validation("waveform snr_db must be finite"));
        }
        for (name, v) in [
            ("M", self.symbols),
            ("N", self.subcarriers),
            ("Nt", self.tx_antennas),
            ("Nr", self.rx_antennas),
        ] {
            if v < 1 {
                return Err(Error::validation(format!("waveform {name} must be >= 1")));
            }
        }
        if (self.symbol_time + self.guard_time - self.total_symbol_time).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "T = {} s differs from Tp + Tc = {} s",
                self.total_symbol_time,
                self.symbol_time + self.guard_time
            )));
        }
        if (self.symbol_time * self.subcarrier_spacing_hz - 1.0).abs() > 1e-6 {
            return Err(Error::validation(format!(
                "Tp * delta_f must be 1, got {}",
                self.symbol_time * self.subcarrier_spacing_hz
            )));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn bandwidth(&self) -> f64 {
        self.subcarriers as f64 * self.subcarrier_spacing_hz
    }

    /// Width of one range bin, m.
    pub fn range_bin_width(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.subcarriers as f64 * self.subcarrier_spacing_hz)
    }

    /// Largest range representable without wrap-around, m.
    pub fn max_unambiguous_range(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.subcarrier_spacing_hz)
    }

    /// Width of one Doppler bin, m/s.
    pub fn velocity_bin_width(&self) -> f64 {
        SPEED_OF_LIGHT
            / (2.0 * self.carrier_hz * self.symbols as f64 * self.total_symbol_time)
    }

    /// Total width of the unambiguous velocity window, m/s (centred on 0).
    pub fn unambiguous_velocity_window(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.carrier_hz * self.total_symbol_time)
    }

    /// Receive array length used for angle processing.
    pub fn array_len(&self) -> usize {
        self.rx_antennas
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::argument(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.data.iter()
    }

    /// Mean of `|x|^2` over all entries.
    pub fn mean_power(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.data.len() as f64
    }
}

/// Transmitted modulation symbols: M rows (symbols) by N columns (subcarriers).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub grid: CMatrix,
}

/// Uniformly random QPSK symbols of unit magnitude.
pub fn generate_frame<R: Rng + ?Sized>(cfg: &WaveformConfig, rng: &mut R) -> SymbolFrame {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let n = cfg.symbols * cfg.subcarriers;
    let data = (0..n)
        .map(|_| {
            let bits: u8 = rng.gen_range(0..4);
            let re = if bits & 1 == 0 { s } else { -s };
            let im = if bits & 2 == 0 { s } else { -s };
            Complex64::new(re, im)
        })
        .collect();
    SymbolFrame {
        grid: CMatrix {
            rows: cfg.symbols,
            cols: cfg.subcarriers,
            data,
        },
    }
}
