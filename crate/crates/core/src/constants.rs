//! SI constants and the frequency-unit boundary.
//!
//! Every rate stored by this crate is an angular frequency in rad/s. Values
//! quoted in Hz are converted once, at the configuration boundary.

use std::f64::consts::TAU;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Converts a frequency in Hz to an angular frequency in rad/s.
#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    TAU * f
}

/// Converts an angular frequency in rad/s to Hz.
#[inline]
pub fn rad_to_hz(w: f64) -> f64 {
    w / TAU
}

/// Angular optical frequency `2πc/λ` for a vacuum wavelength in metres.
#[inline]
pub fn angular_frequency(wavelength: f64) -> f64 {
    TAU * SPEED_OF_LIGHT / wavelength
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hz_round_trip() {
        let f = 1.234e9;
        assert!((rad_to_hz(hz_to_rad(f)) - f).abs() < 1e-6);
        assert!((hz_to_rad(1.0) - TAU).abs() < 1e-15);
    }

    #[test]
    fn optical_frequency_at_one_micron() {
        // 2π · 299792458 / 1e-6
        assert!((angular_frequency(1e-6) / 1.883_651_567_308_853_5e15 - 1.0).abs() < 1e-12);
    }
}
