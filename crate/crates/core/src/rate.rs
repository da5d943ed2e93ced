//! Absolute pair-generation rate.
//!
//! Two routes are provided and never reconciled with each other:
//!
//! * [`closed_form_rate`] evaluates the cavity-controlled vertical emission
//!   rate `R = pi^3 e^4 N_c n_e sum|M'|^2 / (m0^2 V w0 w_i w_s)`. It contains
//!   no quality factor. This is the headline number.
//! * [`quadrature_rate`] integrates the golden-rule expression
//!   `(2 pi / hbar^2) N_e int F(w1) F(w0 - w1) sum|M|^2 dw1` with the
//!   two-Lorentzian `F` and the dimensional amplitude `M` of
//!   [`dimensional_prefactor`]. Inserting the cavity density of states this
//!   way makes the result grow with Q, so it is reported as a diagnostic only.
//!
//! `e^2` is Gaussian throughout and comes from
//! [`Constants::gaussian_charge_sq`](crate::units::Constants::gaussian_charge_sq).
//! The sum over atomic states runs over the two degenerate spin channels.
//!
//! Symbols: `w_p` in the literature form of the rate is the idler `w_i`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band::{self, MaterialParams, PolarizationGeometry};
use crate::cavity::{self, CavitySpec, DeviceGeometry};
use crate::error::{invalid, Error, Result};
use crate::units::{self, CODATA};

/// Relative tolerance on `w_s + w_i = w0`.
pub const ENERGY_CONSERVATION_TOL: f64 = 1e-9;

/// Agreement required between successive quadrature refinements.
pub const QUADRATURE_REL_TOL: f64 = 1e-3;

/// Half extent of each resonance window, in half widths.
pub const QUADRATURE_WINDOW_HALF_WIDTHS: f64 = 50.0;

const MIN_QUADRATURE_GRID: usize = 64;
const MAX_QUADRATURE_GRID: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    pub material: MaterialParams,
    pub geometry: DeviceGeometry,
    pub cavity: CavitySpec,
    /// Carrier density, cm^-3.
    pub carrier_density_cm3: f64,
}

impl RateInputs {
    pub fn new(
        material: MaterialParams,
        geometry: DeviceGeometry,
        cavity: CavitySpec,
        carrier_density_cm3: f64,
    ) -> Result<Self> {
        let inputs = Self {
            material,
            geometry,
            cavity,
            carrier_density_cm3,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.geometry.validate()?;
        self.cavity.validate()?;
        if !(self.carrier_density_cm3 > 0.0 && self.carrier_density_cm3.is_finite()) {
            return Err(invalid(
                "run",
                "carrier_density_cm3",
                format!("must be > 0, got {}", self.carrier_density_cm3),
            ));
        }
        let w0 = self.omega0();
        let sum = self.cavity.omega_s + self.cavity.omega_i;
        if ((sum - w0) / w0).abs() > ENERGY_CONSERVATION_TOL {
            return Err(invalid(
                "cavity",
                "omega_i",
                format!("signal + idler = {sum:.10e} rad/s but the transition is {w0:.10e} rad/s"),
            ));
        }
        if !self.carrier_count().is_finite() {
            return Err(invalid(
                "run",
                "carrier_density_cm3",
                "carrier number overflows",
            ));
        }
        Ok(())
    }

    /// Total transition frequency `E_gap / hbar`.
    pub fn omega0(&self) -> f64 {
        units::energy_to_angular_frequency(self.material.e_gap_ev)
    }

    /// Carrier density, m^-3.
    pub fn carrier_density_m3(&self) -> f64 {
        self.carrier_density_cm3 * 1e6
    }

    /// Carriers in one quantization volume, `N_e = n_e V`.
    pub fn carrier_count(&self) -> f64 {
        self.carrier_density_m3() * self.geometry.quantization_volume()
    }

    /// Copy with a different carrier density, cm^-3.
    pub fn with_carrier_density(&self, carrier_density_cm3: f64) -> Self {
        Self {
            carrier_density_cm3,
            ..self.clone()
        }
    }

    /// Copy with the cavity moved to signal frequency `omega_s`, idler
    /// following from energy conservation.
    pub fn retuned(&self, omega_s: f64) -> Result<Self> {
        let omega_i = self.omega0() - omega_s;
        if !(omega_s > 0.0 && omega_i > 0.0) {
            return Err(Error::Domain(format!(
                "signal {omega_s:e} rad/s leaves no room for an idler below w0 = {:e} rad/s",
                self.omega0()
            )));
        }
        Ok(Self {
            cavity: self.cavity.retuned(omega_s, omega_i)?,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRateResult {
    /// Pairs per second.
    pub rate: f64,
    /// Mean interval between pair emissions, s.
    pub tau_2ph: f64,
    /// Rate after extraction, 1/s.
    pub detected_rate: f64,
    pub geometry: PolarizationGeometry,
}

/// Closed-form, Q-independent vertical emission rate.
pub fn closed_form_rate(inputs: &RateInputs, geom: PolarizationGeometry) -> Result<PairRateResult> {
    let (ws, wi) = (inputs.cavity.omega_s, inputs.cavity.omega_i);
    let hw_s = units::angular_frequency_to_energy(ws);
    let hw_i = units::angular_frequency_to_energy(wi);
    let m_sq = band::summed_mprime_sq(hw_s, hw_i, &inputs.material, geom)?;
    let e2 = CODATA.gaussian_charge_sq();
    let v = inputs.geometry.quantization_volume();
    let n_c = inputs.geometry.unit_cell_count();
    let rate = PI.powi(3) * e2 * e2 * n_c / (CODATA.m0 * CODATA.m0 * v)
        * inputs.carrier_density_m3()
        * m_sq
        / (inputs.omega0() * wi * ws);
    Ok(PairRateResult {
        rate,
        tau_2ph: if rate > 0.0 {
            1.0 / rate
        } else {
            f64::INFINITY
        },
        detected_rate: cavity::detected_rate(rate, &inputs.geometry),
        geometry: geom,
    })
}

/// Everything multiplying `M'` in the dimensional amplitude, J:
/// `(N_c e^2 / 2 m0 c^2) (2 pi hbar c^2 / V) / sqrt(w1 w2)`.
pub fn dimensional_prefactor(omega1: f64, omega2: f64, inputs: &RateInputs) -> f64 {
    let c2 = CODATA.c * CODATA.c;
    inputs.geometry.unit_cell_count() * CODATA.gaussian_charge_sq() / (2.0 * CODATA.m0 * c2)
        * (2.0 * PI * CODATA.hbar * c2 / inputs.geometry.quantization_volume())
        / (omega1 * omega2).sqrt()
}

/// `F(w1) F(w0 - w1) sum|M(w1, w0 - w1)|^2` for the vertical pair, J^2 s^2.
pub fn golden_rule_integrand(inputs: &RateInputs, omega1: f64) -> Result<f64> {
    let omega2 = inputs.omega0() - omega1;
    let dos = cavity::density_of_states(omega1, &inputs.cavity)
        * cavity::density_of_states(omega2, &inputs.cavity);
    if dos == 0.0 {
        return Ok(0.0);
    }
    let m_sq = band::summed_mprime_sq(
        units::angular_frequency_to_energy(omega1),
        units::angular_frequency_to_energy(omega2),
        &inputs.material,
        PolarizationGeometry::VerticalCircularPair,
    )?;
    let pre = dimensional_prefactor(omega1, omega2, inputs);
    Ok(dos * pre * pre * m_sq)
}

/// Integration segments `(lo, hi, centre, half_width)`: resonance windows of
/// +-50 half widths around each line and the stretch between them, which
/// contains the degenerate point `w0 / 2`.
fn quadrature_segments(inputs: &RateInputs) -> Vec<(f64, f64, f64, f64)> {
    let w0 = inputs.omega0();
    let cav = &inputs.cavity;
    let lines = [
        (cav.omega_s, cav.half_width_s()),
        (cav.omega_i, cav.half_width_i()),
    ];
    let mut cuts: Vec<f64> = lines
        .iter()
        .flat_map(|&(c, g)| {
            [
                c - QUADRATURE_WINDOW_HALF_WIDTHS * g,
                c,
                c + QUADRATURE_WINDOW_HALF_WIDTHS * g,
            ]
        })
        .chain(std::iter::once(0.5 * w0))
        .map(|w| w.clamp(0.0, w0))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .filter(|p| p[1] > p[0])
        .map(|p| {
            let mid = 0.5 * (p[0] + p[1]);
            let &(c, g) = lines
                .iter()
                .min_by(|a, b| (a.0 - mid).abs().total_cmp(&(b.0 - mid).abs()))
                .expect("two lines");
            (p[0], p[1], c, g)
        })
        .collect()
}

fn quadrature_estimate(inputs: &RateInputs, panels: usize) -> Result<f64> {
    let mut total = 0.0;
    for (lo, hi, c, g) in quadrature_segments(inputs) {
        // w = c + g tan(t) flattens the Lorentzian peaks.
        let (t0, t1) = (((lo - c) / g).atan(), ((hi - c) / g).atan());
        let mut failure = None;
        let part = crate::quadrature::gauss_legendre(
            |t| {
                let cos = t.cos();
                let w = c + g * t.tan();
                match golden_rule_integrand(inputs, w) {
                    Ok(v) => v * g / (cos * cos),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            t0,
            t1,
            panels,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        total += part;
    }
    Ok(2.0 * PI / (CODATA.hbar * CODATA.hbar) * inputs.carrier_count() * total)
}

/// Golden-rule rate with the cavity density of states, 1/s.
///
/// `grid` is the starting number of panels per segment; it is doubled until
/// two successive estimates agree to [`QUADRATURE_REL_TOL`].
pub fn quadrature_rate(inputs: &RateInputs, grid: usize) -> Result<f64> {
    if grid < MIN_QUADRATURE_GRID {
        return Err(Error::Domain(format!(
            "quadrature grid must be >= {MIN_QUADRATURE_GRID}, got {grid}"
        )));
    }
    let mut panels = grid;
    let mut previous = quadrature_estimate(inputs, panels)?;
    loop {
        panels *= 2;
        let current = quadrature_estimate(inputs, panels)?;
        let change = if current == 0.0 {
            (current - previous).abs()
        } else {
            ((current - previous) / current).abs()
        };
        if change <= QUADRATURE_REL_TOL {
            return Ok(current);
        }
        if panels >= MAX_QUADRATURE_GRID {
            return Err(Error::Convergence {
                relative_change: change,
                grid: panels,
            });
        }
        previous = current;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub lambda_s_nm: f64,
    pub lambda_i_nm: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    pub samples: Vec<SpectralSample>,
    pub omega0: f64,
}

impl SpectralCurve {
    pub fn peak(&self) -> Option<&SpectralSample> {
        self.samples.iter().max_by(|a, b| a.rate.total_cmp(&b.rate))
    }
}

/// Pair rate versus signal wavelength on a uniform grid of `steps` points
/// from `lambda_min_nm` to `lambda_max_nm`. The cavity follows the signal and
/// the idler takes the rest of the transition energy.
pub fn spectral_sweep(
    inputs: &RateInputs,
    lambda_min_nm: f64,
    lambda_max_nm: f64,
    steps: usize,
) -> Result<SpectralCurve> {
    if steps < 2 {
        return Err(Error::Domain(format!(
            "sweep needs >= 2 steps, got {steps}"
        )));
    }
    if !(lambda_min_nm < lambda_max_nm) {
        return Err(Error::Domain(format!(
            "sweep range [{lambda_min_nm}, {lambda_max_nm}] nm is empty"
        )));
    }
    let w0 = inputs.omega0();
    let shortest = units::m_to_nm(units::angular_frequency_to_wavelength(w0)?);
    if !(lambda_min_nm > shortest) {
        return Err(Error::Domain(format!(
            "signal wavelength {lambda_min_nm} nm is at or above the transition energy (needs > {shortest:.3} nm)"
        )));
    }
    let samples = (0..steps)
        .into_par_iter()
        .map(|k| {
            let lambda_s_nm =
                lambda_min_nm + (lambda_max_nm - lambda_min_nm) * k as f64 / (steps - 1) as f64;
            let omega_s = units::wavelength_to_angular_frequency(units::nm_to_m(lambda_s_nm))?;
            let tuned = inputs.retuned(omega_s)?;
            let rate = closed_form_rate(&tuned, PolarizationGeometry::VerticalCircularPair)?.rate;
            let lambda_i_nm = units::m_to_nm(units::angular_frequency_to_wavelength(
                tuned.cavity.omega_i,
            )?);
            Ok(SpectralSample {
                lambda_s_nm,
                lambda_i_nm,
                rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralCurve {
        samples,
        omega0: w0,
    })
}

/// Orders of magnitude between the pair rate and a PDC baseline.
pub fn pdc_comparison(rate: f64, pdc_baseline: f64) -> Result<f64> {
    if !(rate > 0.0 && pdc_baseline > 0.0) {
        return Err(Error::Domain(format!(
            "rates must be positive, got {rate:e} and {pdc_baseline:e}"
        )));
    }
    Ok((rate / pdc_baseline).log10())
}

/// Probability that a further pair is emitted within one cavity lifetime,
/// `1 - exp(-R tau)`.
pub fn pair_overlap_probability(rate: f64, tau_cav: f64) -> Result<f64> {
    if !(rate >= 0.0 && tau_cav >= 0.0) {
        return Err(Error::Domain(format!(
            "rate and lifetime must be non-negative, got {rate:e} and {tau_cav:e}"
        )));
    }
    Ok(-(-rate * tau_cav).exp_m1())
}
