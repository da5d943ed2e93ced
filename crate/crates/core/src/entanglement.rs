//! Energy-entangled, polarization-tagged photon pair and its Bell statistics.
//!
//! Each arm (R = sigma+, L = sigma-) carries a frequency qubit with
//! `|0> = |w_i>` and `|1> = |w_s>`. The emitted state is
//! `(|w_i>_R |w_s>_L + |w_s>_R |w_i>_L) / sqrt(2)`. Accidental coincidences
//! are modelled as white noise, giving a Werner state
//! `p |psi><psi| + (1 - p) I / 4`.
//!
//! Analyzers are projective measurements on the Bloch equator of the
//! frequency qubit, `|+-(phi)> = (|0> +- e^{i phi} |1>) / sqrt(2)`. This is a
//! stand-in measurement model; for the state above it gives
//! `E(a, b) = p cos(a - b)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::EventTrace;

/// Numerical tolerance for density-operator checks.
pub const DENSITY_TOL: f64 = 1e-12;

/// Minimum number of events [`mc_chsh`] accepts.
pub const MIN_MC_EVENTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    /// `(w_i, w_s)`, rad/s.
    pub basis: (f64, f64),
    /// Joint density operator, R qubit (outer) by L qubit (inner).
    pub rho: Matrix4<Complex64>,
    /// Werner weight of the entangled component, when the state has that form.
    pub mixing: Option<f64>,
}

fn psi_plus() -> Vector4<Complex64> {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    // |0>_R|1>_L and |1>_R|0>_L
    Vector4::new(z, a, a, z)
}

fn check_frequencies(omega_i: f64, omega_s: f64) -> Result<()> {
    if !(omega_i > 0.0 && omega_s > 0.0) {
        return Err(Error::Domain(format!(
            "frequencies must be positive, got {omega_i:e} and {omega_s:e}"
        )));
    }
    if omega_i == omega_s {
        return Err(Error::Domain(
            "signal and idler are degenerate; frequency tagging is impossible".into(),
        ));
    }
    Ok(())
}

impl TwoPhotonState {
    /// Werner state with entangled weight `p`.
    pub fn werner(omega_i: f64, omega_s: f64, p: f64) -> Result<Self> {
        check_frequencies(omega_i, omega_s)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "Werner weight must lie in [0, 1], got {p}"
            )));
        }
        let psi = psi_plus();
        let pure = psi * psi.adjoint();
        let rho = pure.scale(p) + Matrix4::identity().scale((1.0 - p) / 4.0);
        Ok(Self {
            basis: (omega_i, omega_s),
            rho,
            mixing: Some(p),
        })
    }

    /// Arbitrary two-qubit state; checked for Hermiticity, unit trace and
    /// positivity.
    pub fn from_density(omega_i: f64, omega_s: f64, rho: Matrix4<Complex64>) -> Result<Self> {
        check_frequencies(omega_i, omega_s)?;
        let state = Self {
            basis: (omega_i, omega_s),
            rho,
            mixing: None,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (self.rho - self.rho.adjoint()).norm();
        if herm > DENSITY_TOL {
            return Err(Error::Domain(format!(
                "density operator not Hermitian ({herm:e})"
            )));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::Domain(format!("density operator trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -DENSITY_TOL {
            return Err(Error::Domain(format!(
                "density operator not PSD (eigenvalue {min:e})"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// Probabilities of finding the R arm at `(w_i, w_s)`.
    pub fn right_arm_frequency_marginal(&self) -> (f64, f64) {
        (
            self.rho[(0, 0)].re + self.rho[(1, 1)].re,
            self.rho[(2, 2)].re + self.rho[(3, 3)].re,
        )
    }

    /// Probability that both arms carry the same frequency.
    pub fn same_frequency_probability(&self) -> f64 {
        self.rho[(0, 0)].re + self.rho[(3, 3)].re
    }
}

/// The pure emitted state.
pub fn ideal_state(omega_i: f64, omega_s: f64) -> Result<TwoPhotonState> {
    TwoPhotonState::werner(omega_i, omega_s, 1.0)
}

/// Werner state with the accidental fraction as white noise, `p = 1 - overlap`.
pub fn accidental_degraded_state(
    omega_i: f64,
    omega_s: f64,
    overlap_prob: f64,
) -> Result<TwoPhotonState> {
    if !(0.0..=1.0).contains(&overlap_prob) {
        return Err(Error::Domain(format!(
            "overlap probability must lie in [0, 1], got {overlap_prob}"
        )));
    }
    TwoPhotonState::werner(omega_i, omega_s, 1.0 - overlap_prob)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    /// sigma+
    R,
    /// sigma-
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerSetting {
    pub arm: Arm,
    /// Equatorial phase, radians in `[0, 2 pi)`.
    pub angle: f64,
}

impl AnalyzerSetting {
    pub fn new(arm: Arm, angle: f64) -> Self {
        Self {
            arm,
            angle: angle.rem_euclid(2.0 * PI),
        }
    }

    /// Projector for outcome `+1` (`plus = true`) or `-1`.
    fn projector(&self, plus: bool) -> Matrix2<Complex64> {
        let sign = if plus { 1.0 } else { -1.0 };
        let v = Vector2::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(sign * FRAC_1_SQRT_2, self.angle),
        );
        v * v.adjoint()
    }
}

/// Joint outcome probabilities `[[P(+,+), P(+,-)], [P(-,+), P(-,-)]]`.
pub fn joint_distribution(
    state: &TwoPhotonState,
    a: AnalyzerSetting,
    b: AnalyzerSetting,
) -> Result<[[f64; 2]; 2]> {
    if a.arm != Arm::R || b.arm != Arm::L {
        return Err(Error::Domain(format!(
            "need one R-arm and one L-arm setting, got {:?} and {:?}",
            a.arm, b.arm
        )));
    }
    let mut out = [[0.0; 2]; 2];
    for (i, pa) in [true, false].into_iter().enumerate() {
        for (j, pb) in [true, false].into_iter().enumerate() {
            let proj = a.projector(pa).kronecker(&b.projector(pb));
            out[i][j] = (state.rho * proj).trace().re;
        }
    }
    Ok(out)
}

/// Born-rule probability of a joint `(+, +)` result.
pub fn coincidence_probability(
    state: &TwoPhotonState,
    a: AnalyzerSetting,
    b: AnalyzerSetting,
) -> Result<f64> {
    Ok(joint_distribution(state, a, b)?[0][0])
}

/// `E(a, b) = sum xy P(x, y)`.
pub fn correlation(state: &TwoPhotonState, a: AnalyzerSetting, b: AnalyzerSetting) -> Result<f64> {
    let p = joint_distribution(state, a, b)?;
    Ok(p[0][0] - p[0][1] - p[1][0] + p[1][1])
}

/// Settings for one CHSH run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a1: AnalyzerSetting,
    pub a2: AnalyzerSetting,
    pub b1: AnalyzerSetting,
    pub b2: AnalyzerSetting,
}

impl ChshSettings {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        Self {
            a1: AnalyzerSetting::new(Arm::R, a1),
            a2: AnalyzerSetting::new(Arm::R, a2),
            b1: AnalyzerSetting::new(Arm::L, b1),
            b2: AnalyzerSetting::new(Arm::L, b2),
        }
    }

    /// Maximal violation for `E = cos(a - b)`: `a = 0, pi/2`, `b = +-pi/4`.
    pub fn optimal() -> Self {
        Self::new(0.0, PI / 2.0, PI / 4.0, -PI / 4.0)
    }

    /// The four setting pairs with the sign each enters S with.
    fn terms(&self) -> [(AnalyzerSetting, AnalyzerSetting, f64); 4] {
        [
            (self.a1, self.b1, 1.0),
            (self.a1, self.b2, 1.0),
            (self.a2, self.b1, 1.0),
            (self.a2, self.b2, -1.0),
        ]
    }
}

/// `S = |E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)|`.
pub fn chsh_value(state: &TwoPhotonState, settings: &ChshSettings) -> Result<f64> {
    let mut s = 0.0;
    for (a, b, sign) in settings.terms() {
        s += sign * correlation(state, a, b)?;
    }
    Ok(s.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub s: f64,
    pub std_error: f64,
    pub events: usize,
}

/// Monte Carlo CHSH estimate. Events of the trace cycle through the four
/// setting pairs; each yields one joint outcome sampled from the Born
/// probabilities.
pub fn mc_chsh(
    trace: &EventTrace,
    state: &TwoPhotonState,
    settings: &ChshSettings,
    seed: u64,
) -> Result<McEstimate> {
    if trace.len() < MIN_MC_EVENTS {
        return Err(Error::InsufficientStatistics {
            have: trace.len(),
            need: MIN_MC_EVENTS,
        });
    }
    let terms = settings.terms();
    let mut dists = [[[0.0; 2]; 2]; 4];
    for (k, (a, b, _)) in terms.iter().enumerate() {
        dists[k] = joint_distribution(state, *a, *b)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = [0i64; 4];
    let mut counts = [0usize; 4];
    for k in 0..trace.len() {
        let slot = k % 4;
        let d = &dists[slot];
        let u: f64 = rng.random();
        // outcomes (+,+), (+,-), (-,+), (-,-) in order of the cumulative sum
        let unlike = u >= d[0][0] && u < d[0][0] + d[0][1] + d[1][0];
        let product = if unlike { -1 } else { 1 };
        sums[slot] += product;
        counts[slot] += 1;
    }
    let mut s = 0.0;
    let mut var = 0.0;
    for k in 0..4 {
        let n = counts[k] as f64;
        let e = sums[k] as f64 / n;
        s += terms[k].2 * e;
        var += (1.0 - e * e) / n;
    }
    Ok(McEstimate {
        s: s.abs(),
        std_error: var.sqrt(),
        events: trace.len(),
    })
}
