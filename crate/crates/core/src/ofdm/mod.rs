//! OFDM sensing chain: frame generation, echo synthesis, equalization,
//! range/Doppler/angle transforms, peak picking and bin-to-physical mapping.

mod channel;
mod sense;
mod spectrum;
mod waveform;

pub use channel::{echo_power, equalize, synthesize_echo, EchoPath, Noise};
pub use sense::OfdmSensor;
pub use spectrum::{
    angle_spectrum, bin_to_angle, bin_to_range, detect_peaks, range_profile, velocity_profile,
    BinKind, PeakPolicy, ProfileSpectrum, Transforms,
};
pub use waveform::{generate_frame, CMatrix, SymbolFrame, WaveformConfig, SPEED_OF_LIGHT};
