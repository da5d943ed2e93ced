//! Physical constants and the handful of unit conversions the model needs.
//!
//! Everything inside the crate is SI. Energies cross the public API in eV and
//! lengths in nm, and are converted once on entry.
//!
//! The rate expressions are quoted in Gaussian units in the literature, where
//! the coupling appears as `e^2`. The only place that translation happens is
//! [`Constants::gaussian_charge_sq`], which returns `e^2 / (4 pi eps0)` in
//! J*m. Every formula that needs a Gaussian `e^2` calls it.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// CODATA 2018 values, SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Reduced Planck constant, J*s.
    pub hbar: f64,
    /// Elementary charge, C. Also the number of joules per eV.
    pub e: f64,
    /// Free-electron mass, kg.
    pub m0: f64,
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
}

pub const CODATA: Constants = Constants {
    hbar: 1.054_571_817e-34,
    e: 1.602_176_634e-19,
    m0: 9.109_383_701_5e-31,
    c: 299_792_458.0,
    eps0: 8.854_187_812_8e-12,
};

impl Default for Constants {
    fn default() -> Self {
        CODATA
    }
}

impl Constants {
    /// Joules per electron-volt.
    pub fn joule_per_ev(&self) -> f64 {
        self.e
    }

    /// Gaussian `e^2` expressed in SI: `e^2 / (4 pi eps0)`, J*m.
    pub fn gaussian_charge_sq(&self) -> f64 {
        self.e * self.e / (4.0 * PI * self.eps0)
    }

    /// `hbar^2 / m0` in eV*nm^2. Converts Kane-style momentum matrix
    /// elements (eV*nm) into the dimensionless second-order amplitude.
    pub fn hbar_sq_over_m0_ev_nm2(&self) -> f64 {
        self.hbar * self.hbar / self.m0 / self.e * 1e18
    }
}

/// `omega = 2 pi c / lambda`, with `lambda` in metres.
pub fn wavelength_to_angular_frequency(lambda_m: f64) -> Result<f64> {
    if !(lambda_m > 0.0) || !lambda_m.is_finite() {
        return Err(Error::Domain(format!(
            "wavelength must be positive and finite, got {lambda_m:e} m"
        )));
    }
    Ok(2.0 * PI * CODATA.c / lambda_m)
}

/// Inverse of [`wavelength_to_angular_frequency`].
pub fn angular_frequency_to_wavelength(omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "angular frequency must be positive and finite, got {omega:e} rad/s"
        )));
    }
    Ok(2.0 * PI * CODATA.c / omega)
}

/// `omega = E / hbar` for `E` in eV. Negative energies map to negative
/// frequencies (detunings).
pub fn energy_to_angular_frequency(energy_ev: f64) -> f64 {
    energy_ev * CODATA.joule_per_ev() / CODATA.hbar
}

/// `E = hbar omega`, in eV.
pub fn angular_frequency_to_energy(omega: f64) -> f64 {
    omega * CODATA.hbar / CODATA.joule_per_ev()
}

pub fn nm_to_m(nm: f64) -> f64 {
    nm * 1e-9
}

pub fn m_to_nm(m: f64) -> f64 {
    m * 1e9
}
