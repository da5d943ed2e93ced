//! Doubly resonant vertical cavity and photonic-crystal geometry.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units;

/// Signal and idler cavity resonances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    /// rad/s
    pub omega_s: f64,
    /// rad/s
    pub omega_i: f64,
    pub q_s: f64,
    pub q_i: f64,
}

impl CavitySpec {
    pub fn new(omega_s: f64, omega_i: f64, q_s: f64, q_i: f64) -> Result<Self> {
        let spec = Self {
            omega_s,
            omega_i,
            q_s,
            q_i,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, w) in [("omega_s", self.omega_s), ("omega_i", self.omega_i)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("cavity", field, format!("must be > 0, got {w:e}")));
            }
        }
        for (field, q) in [("q_s", self.q_s), ("q_i", self.q_i)] {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(invalid("cavity", field, format!("must be >= 1, got {q}")));
            }
        }
        Ok(())
    }

    /// Half width at half maximum of the signal line, rad/s.
    pub fn half_width_s(&self) -> f64 {
        self.omega_s / (2.0 * self.q_s)
    }

    pub fn half_width_i(&self) -> f64 {
        self.omega_i / (2.0 * self.q_i)
    }

    /// The two-Lorentzian form assumes the lines are far apart compared with
    /// their widths: `|w_s - w_i| > 10 (w_s/2Q_s + w_i/2Q_i)`.
    pub fn is_well_separated(&self) -> bool {
        (self.omega_s - self.omega_i).abs() > 10.0 * (self.half_width_s() + self.half_width_i())
    }

    /// Warning text when the lines overlap, `None` otherwise.
    pub fn separation_warning(&self) -> Option<String> {
        (!self.is_well_separated()).then(|| {
            format!(
                "cavity lines are not well separated: |w_s - w_i| = {:.4e} rad/s, 10 x summed half widths = {:.4e} rad/s",
                (self.omega_s - self.omega_i).abs(),
                10.0 * (self.half_width_s() + self.half_width_i())
            )
        })
    }

    /// Same Q factors, resonances moved to a new signal/idler pair.
    pub fn retuned(&self, omega_s: f64, omega_i: f64) -> Result<Self> {
        Self::new(omega_s, omega_i, self.q_s, self.q_i)
    }
}

fn lorentzian(omega: f64, centre: f64, half_width: f64) -> f64 {
    let d = omega - centre;
    half_width / (d * d + half_width * half_width)
}

/// Cavity density of radiation modes, two Lorentzians, in s.
///
/// `F(w) = 1/(2 pi) [ g_s/((w-w_s)^2+g_s^2) + g_i/((w-w_i)^2+g_i^2) ]` with
/// `g = w/(2Q)`. Integrates to one over the real line.
pub fn density_of_states(omega: f64, spec: &CavitySpec) -> f64 {
    (lorentzian(omega, spec.omega_s, spec.half_width_s())
        + lorentzian(omega, spec.omega_i, spec.half_width_i()))
        / (2.0 * PI)
}

/// `int_a^b F(w) dw` from the arctangent antiderivative. Infinite limits are
/// allowed.
pub fn density_of_states_integral(spec: &CavitySpec, a: f64, b: f64) -> f64 {
    let cumulative = |w: f64| {
        ((w - spec.omega_s) / spec.half_width_s()).atan()
            + ((w - spec.omega_i) / spec.half_width_i()).atan()
    };
    (cumulative(b) - cumulative(a)) / (2.0 * PI)
}

/// Device layout. Lengths in nm, area in mm^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceGeometry {
    pub cavity_height_nm: f64,
    pub grating_period_nm: f64,
    /// Grating fill factor. Recorded only; grating electromagnetics are not
    /// modelled.
    pub fill_factor: f64,
    pub device_area_mm2: f64,
    pub refractive_index: f64,
    pub extraction_efficiency: f64,
}

impl DeviceGeometry {
    pub fn validate(&self) -> Result<()> {
        const R: &str = "geometry";
        for (field, v) in [
            ("cavity_height_nm", self.cavity_height_nm),
            ("grating_period_nm", self.grating_period_nm),
            ("device_area_mm2", self.device_area_mm2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(R, field, format!("must be > 0, got {v}")));
            }
        }
        if !(1.0..).contains(&self.refractive_index) || !self.refractive_index.is_finite() {
            return Err(invalid(
                R,
                "refractive_index",
                format!("must be >= 1, got {}", self.refractive_index),
            ));
        }
        for (field, v) in [
            ("fill_factor", self.fill_factor),
            ("extraction_efficiency", self.extraction_efficiency),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(R, field, format!("must lie in [0, 1], got {v}")));
            }
        }
        if self.unit_cell_count() < 1.0 {
            return Err(invalid(
                R,
                "device_area_mm2",
                "device smaller than one grating unit cell",
            ));
        }
        Ok(())
    }

    /// Field quantization volume, m^3: cavity height times one grating cell.
    pub fn quantization_volume(&self) -> f64 {
        let a = units::nm_to_m(self.grating_period_nm);
        units::nm_to_m(self.cavity_height_nm) * a * a
    }

    /// Number of photonic-crystal unit cells on the device.
    pub fn unit_cell_count(&self) -> f64 {
        let a = units::nm_to_m(self.grating_period_nm);
        self.device_area_mm2 * 1e-6 / (a * a)
    }
}

pub fn quantization_volume(geom: &DeviceGeometry) -> f64 {
    geom.quantization_volume()
}

pub fn unit_cell_count(geom: &DeviceGeometry) -> f64 {
    geom.unit_cell_count()
}

/// Half-wave cavity height inside a medium of index `n`: `lambda / (2 n)`.
pub fn half_wave_height(lambda_free_nm: f64, n: f64) -> Result<f64> {
    if !(lambda_free_nm > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength must be > 0, got {lambda_free_nm}"
        )));
    }
    if !(n >= 1.0) {
        return Err(Error::Domain(format!(
            "refractive index must be >= 1, got {n}"
        )));
    }
    Ok(lambda_free_nm / (2.0 * n))
}

/// Photon lifetime `tau = Q / w` (energy decay).
pub fn cavity_lifetime(omega: f64, q: f64) -> Result<f64> {
    if !(omega > 0.0) || !(q >= 1.0) {
        return Err(Error::Domain(format!(
            "need omega > 0 and Q >= 1, got omega = {omega:e}, Q = {q}"
        )));
    }
    Ok(q / omega)
}

/// Pair rate surviving extraction.
pub fn detected_rate(rate: f64, geom: &DeviceGeometry) -> f64 {
    rate * geom.extraction_efficiency
}
