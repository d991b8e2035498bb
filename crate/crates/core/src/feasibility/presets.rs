//! Named material parameter sets.

use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::material::MaterialSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialPreset {
    pub key: &'static str,
    pub provenance: &'static str,
    pub material: MaterialSpec,
}

pub const PRESET_NAMES: [&str; 4] =
    ["rare-earth-crystal-typical", "rare-earth-optimistic", "nv-diamond-indicative", "doped-fiber-indicative"];

fn spec(name: &str, w12: f64, w13: f64, gamma12: f64, gamma13: f64, gamma3: f64, d13: f64, density: f64, wavelength: f64) -> MaterialSpec {
    MaterialSpec {
        name: name.into(),
        w12,
        w13,
        gamma1: 0.0,
        gamma2: 0.0,
        gamma3,
        gamma12,
        gamma13,
        gamma23: gamma13,
        d13,
        density,
        wavelength,
    }
}

pub fn presets() -> Vec<MaterialPreset> {
    let w13_typ = TAU * 1e9;
    vec![
        MaterialPreset {
            key: "rare-earth-crystal-typical",
            provenance: "typical range: W13 at the GHz scale, W12 chosen so that W12·W13 = 1e15 (rad/s)² \
                         (W12 ≈ 2π·25 kHz), dopant density 1e18 cm⁻³, d13 = 1e-30 C·m at 1000 nm, \
                         γ13 = 1e7 rad/s as in the ramp-time estimate; γ12 and γ3 indicative",
            material: spec("rare-earth-crystal-typical", 1e15 / w13_typ, w13_typ, 1e3, 1e7, 1e3, 1e-30, 1e24, 1e-6),
        },
        MaterialPreset {
            key: "rare-earth-optimistic",
            provenance: "favourable end of the typical range: W13 = 2π·1 GHz, W12 = 2π·100 Hz, density 1e19 cm⁻³, \
                         d13 = 1e-29 C·m; γ12 = 10 rad/s indicative",
            material: spec("rare-earth-optimistic", TAU * 100.0, w13_typ, 10.0, 1e6, 1e3, 1e-29, 1e25, 1e-6),
        },
        MaterialPreset {
            key: "nv-diamond-indicative",
            provenance: "indicative order-of-magnitude values (W13 = 2π·10 GHz, W12 = 2π·1 MHz, \
                         density 1e17 cm⁻³, d13 = 1e-29 C·m at 637 nm)",
            material: spec("nv-diamond-indicative", TAU * 1e6, TAU * 1e10, 1e4, 1e8, 1e8, 1e-29, 1e23, 637e-9),
        },
        MaterialPreset {
            key: "doped-fiber-indicative",
            provenance: "indicative values for a medium long enough for a naive stopping distance (W13 = 2π·100 GHz, W12 = 2π·10 MHz, \
                         density 1e19 cm⁻³, d13 = 1e-30 C·m at 1550 nm)",
            material: spec("doped-fiber-indicative", TAU * 1e7, TAU * 1e11, 1e5, 1e9, 1e3, 1e-30, 1e25, 1550e-9),
        },
    ]
}

pub fn preset(name: &str) -> Result<MaterialPreset> {
    presets()
        .into_iter()
        .find(|p| p.key == name)
        .ok_or_else(|| Error::invalid("material.preset", format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_documented() {
        for p in presets() {
            assert!(!p.provenance.is_empty());
            p.material.validate_for_reduced_model().unwrap();
            assert_eq!(p.key, p.material.name);
        }
        assert_eq!(presets().len(), PRESET_NAMES.len());
        assert!(preset("no-such").is_err());
        let typical = preset("rare-earth-crystal-typical").unwrap().material;
        assert!((typical.width_product() / 1e15 - 1.0).abs() < 1e-12);
    }
}
