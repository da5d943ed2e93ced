//! Band-edge states and the second-order two-photon amplitude.
//!
//! The initial state is the conduction-band subband edge, the final state the
//! light-hole subband edge, both at zero in-plane momentum. Only the higher
//! conduction bands `p~(Gamma7)` and `p~(Gamma8)` act as intermediate states;
//! the lower-band routes are k-dependent and vanish at k = 0. Envelope
//! overlaps are taken as unity.
//!
//! `P1` and `Q` are given as Kane-style momentum matrix elements in eV*nm,
//! i.e. `P = (hbar / m0) <s|p|x>`. With that convention
//! `P1 * Q / m0` (momenta) becomes `m0 * P1 * Q / hbar^2` (energies), which is
//! what [`mprime`] uses. The mass in the prefactor is the free-electron mass.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::CODATA;

/// Energy denominators smaller than this (eV) are treated as resonant.
pub const RESONANCE_TOLERANCE_EV: f64 = 1e-6;

/// Band energies and interband couplings of the 14-band basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub label: String,
    /// QW transition energy `hbar omega0`, eV.
    pub e_gap_ev: f64,
    /// s to p~ conduction-band separation, eV.
    pub e_c_ev: f64,
    /// Spin-orbit splitting of the higher conduction bands, eV.
    pub delta_c_ev: f64,
    /// Gamma6c to p~ momentum matrix element, eV*nm.
    pub p1_ev_nm: f64,
    /// Gamma8v to p~ momentum matrix element, eV*nm.
    pub q_ev_nm: f64,
}

impl MaterialParams {
    pub fn new(
        label: impl Into<String>,
        e_gap_ev: f64,
        e_c_ev: f64,
        delta_c_ev: f64,
        p1_ev_nm: f64,
        q_ev_nm: f64,
    ) -> Result<Self> {
        let params = Self {
            label: label.into(),
            e_gap_ev,
            e_c_ev,
            delta_c_ev,
            p1_ev_nm,
            q_ev_nm,
        };
        params.validate()?;
        Ok(params)
    }

    /// GaAs extended-Kane parameter set.
    ///
    /// `P1` and `Q` follow the 14-band GaAs fits (P' = 4.78 eV*A,
    /// Q = 8.165 eV*A), `E_c` and `Delta_c` sit at the 3 eV / 0.2 eV scale of
    /// the `p~` bands. `E_gap` is the GaAs/AlGaAs QW transition that puts the
    /// degenerate pair at 1.6 um.
    pub fn gaas_14band() -> Self {
        Self {
            label: "GaAs-14band".to_string(),
            e_gap_ev: 1.55,
            e_c_ev: 3.0,
            delta_c_ev: 0.2,
            p1_ev_nm: 0.478,
            q_ev_nm: 0.8165,
        }
    }

    pub fn validate(&self) -> Result<()> {
        const R: &str = "material";
        let positive = |field: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(R, field, format!("must be > 0, got {v}")))
            }
        };
        let non_negative = |field: &'static str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(R, field, format!("must be >= 0, got {v}")))
            }
        };
        positive("e_gap_ev", self.e_gap_ev)?;
        positive("e_c_ev", self.e_c_ev)?;
        non_negative("delta_c_ev", self.delta_c_ev)?;
        non_negative("p1_ev_nm", self.p1_ev_nm)?;
        non_negative("q_ev_nm", self.q_ev_nm)?;
        if self.e_c_ev <= self.delta_c_ev {
            return Err(invalid(
                R,
                "delta_c_ev",
                format!(
                    "E_c ({}) must exceed Delta_c ({})",
                    self.e_c_ev, self.delta_c_ev
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    Conduction,
    LightHole,
    /// `p~(Gamma7)`, split off by `Delta_c` below Gamma8.
    HigherCbGamma7,
    /// `p~(Gamma8)`.
    HigherCbGamma8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Periodic part of a Bloch function: valence p-like `X, Y, Z`, the s-like
/// conduction orbital, and the higher conduction p~-like `Xc, Yc, Zc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orbital {
    S,
    X,
    Y,
    Z,
    Xc,
    Yc,
    Zc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlochLabel {
    pub orbital: Orbital,
    pub spin: Spin,
}

impl fmt::Display for BlochLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.spin {
            Spin::Up => "up",
            Spin::Down => "dn",
        };
        write!(f, "{:?}{}", self.orbital, arrow)
    }
}

/// Angular-momentum projection stored as twice its value, so that half
/// integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i8);

impl HalfInt {
    pub const PLUS_HALF: HalfInt = HalfInt(1);
    pub const MINUS_HALF: HalfInt = HalfInt(-1);
    pub const PLUS_THREE_HALVES: HalfInt = HalfInt(3);
    pub const MINUS_THREE_HALVES: HalfInt = HalfInt(-3);

    pub fn from_twice(twice: i8) -> Self {
        HalfInt(twice)
    }

    /// Accepts exactly representable half integers.
    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = value * 2.0;
        if twice.fract() != 0.0 || twice.abs() > 127.0 {
            return Err(Error::Domain(format!("{value} is not a half integer")));
        }
        Ok(HalfInt(twice as i8))
    }

    pub fn twice(self) -> i8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// A band-edge state written as a superposition of Bloch labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEdgeState {
    pub band: Band,
    pub j: HalfInt,
    pub j_z: HalfInt,
    pub spinor: Vec<(Complex64, BlochLabel)>,
}

impl BandEdgeState {
    pub fn new(
        band: Band,
        j: HalfInt,
        j_z: HalfInt,
        spinor: Vec<(Complex64, BlochLabel)>,
    ) -> Result<Self> {
        let norm: f64 = spinor.iter().map(|(c, _)| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(
                "band_edge_state",
                "spinor",
                format!("norm {norm} != 1"),
            ));
        }
        match band {
            Band::Conduction if j != HalfInt::PLUS_HALF || j_z.twice().abs() != 1 => {
                return Err(invalid(
                    "band_edge_state",
                    "j_z",
                    "CB edge must be (1/2, +-1/2)",
                ));
            }
            Band::LightHole if j.twice() != 3 || j_z.twice().abs() != 1 => {
                return Err(invalid(
                    "band_edge_state",
                    "j_z",
                    "LH edge must be (3/2, +-1/2)",
                ));
            }
            _ => {}
        }
        Ok(Self {
            band,
            j,
            j_z,
            spinor,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.spinor.iter().map(|(c, _)| c.norm_sqr()).sum()
    }
}

/// The two degenerate CB -> LH channels. Both give the same amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinChannel {
    /// `|1/2, +1/2> -> |3/2, +1/2>`
    Up,
    /// `|1/2, -1/2> -> |3/2, -1/2>`
    Down,
}

impl SpinChannel {
    pub const ALL: [SpinChannel; 2] = [SpinChannel::Up, SpinChannel::Down];
}

fn lbl(orbital: Orbital, spin: Spin) -> BlochLabel {
    BlochLabel { orbital, spin }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Initial, final and the two intermediate states of one channel, in the
/// order `(initial, final, n1 (Gamma8), n2 (Gamma7))`.
pub fn channel_states(channel: SpinChannel) -> [BandEdgeState; 4] {
    use Orbital::*;
    use Spin::*;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = (1.0_f64 / 3.0).sqrt();
    let s = (1.0_f64 / 6.0).sqrt();
    let tt = (2.0_f64 / 3.0).sqrt();
    let j12 = HalfInt::PLUS_HALF;
    let j32 = HalfInt::PLUS_THREE_HALVES;
    let raw = match channel {
        SpinChannel::Up => [
            (
                Band::Conduction,
                j12,
                HalfInt::PLUS_HALF,
                vec![(c(1.0, 0.0), lbl(S, Up))],
            ),
            (
                Band::LightHole,
                j32,
                HalfInt::PLUS_HALF,
                vec![
                    (c(tt, 0.0), lbl(Z, Up)),
                    (c(-s, 0.0), lbl(X, Down)),
                    (c(0.0, -s), lbl(Y, Down)),
                ],
            ),
            (
                Band::HigherCbGamma8,
                j32,
                HalfInt::PLUS_THREE_HALVES,
                vec![(c(h, 0.0), lbl(Xc, Up)), (c(0.0, h), lbl(Yc, Up))],
            ),
            (
                Band::HigherCbGamma7,
                j12,
                HalfInt::MINUS_HALF,
                vec![
                    (c(t, 0.0), lbl(Zc, Down)),
                    (c(-t, 0.0), lbl(Xc, Up)),
                    (c(0.0, t), lbl(Yc, Up)),
                ],
            ),
        ],
        // Time-reversed partners of the Up channel.
        SpinChannel::Down => [
            (
                Band::Conduction,
                j12,
                HalfInt::MINUS_HALF,
                vec![(c(1.0, 0.0), lbl(S, Down))],
            ),
            (
                Band::LightHole,
                j32,
                HalfInt::MINUS_HALF,
                vec![
                    (c(tt, 0.0), lbl(Z, Down)),
                    (c(s, 0.0), lbl(X, Up)),
                    (c(0.0, -s), lbl(Y, Up)),
                ],
            ),
            (
                Band::HigherCbGamma8,
                j32,
                HalfInt::MINUS_THREE_HALVES,
                vec![(c(h, 0.0), lbl(Xc, Down)), (c(0.0, -h), lbl(Yc, Down))],
            ),
            (
                Band::HigherCbGamma7,
                j12,
                HalfInt::PLUS_HALF,
                vec![
                    (c(t, 0.0), lbl(Zc, Up)),
                    (c(t, 0.0), lbl(Xc, Down)),
                    (c(0.0, t), lbl(Yc, Down)),
                ],
            ),
        ],
    };
    raw.map(|(band, j, jz, spinor)| {
        BandEdgeState::new(band, j, jz, spinor).expect("tabulated states are normalized")
    })
}

/// Photon polarization configurations of the emitted pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarizationGeometry {
    /// Collinear emission along z with opposite circular polarizations.
    VerticalCircularPair,
    /// In-plane propagation, both photons z-polarized.
    InPlaneZz,
    /// One in-plane and one vertical polarization.
    MixedInPlaneVertical,
}

impl PolarizationGeometry {
    /// Amplitude multiplier relative to the vertical circular pair.
    pub fn amplitude_factor(self) -> f64 {
        match self {
            PolarizationGeometry::VerticalCircularPair => 1.0,
            PolarizationGeometry::InPlaneZz => 4.0,
            PolarizationGeometry::MixedInPlaneVertical => 0.0,
        }
    }
}

/// Circular polarization of one photon; carries `+1` or `-1` units of
/// angular momentum along z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Circular {
    SigmaPlus,
    SigmaMinus,
}

impl Circular {
    pub fn helicity(self) -> i8 {
        match self {
            Circular::SigmaPlus => 1,
            Circular::SigmaMinus => -1,
        }
    }
}

/// Delta j_z selection rule for a collinear z-emitted pair: the photons must
/// carry away exactly `j_z(initial) - j_z(final)`.
pub fn allowed_two_photon(
    initial_jz: HalfInt,
    final_jz: HalfInt,
    pol_pair: (Circular, Circular),
) -> Result<bool> {
    for jz in [initial_jz, final_jz] {
        if !matches!(jz.twice(), -3 | -1 | 1 | 3) {
            return Err(Error::Domain(format!("j_z = {jz} not in {{+-1/2, +-3/2}}")));
        }
    }
    let photon_twice = 2 * (pol_pair.0.helicity() + pol_pair.1.helicity());
    Ok(photon_twice == initial_jz.twice() - final_jz.twice())
}

/// One surviving second-order route through an intermediate state.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPath {
    pub intermediate: BandEdgeState,
    /// `E_n - E_i`, eV.
    pub intermediate_offset_ev: f64,
    /// Sign with which the route enters the closed-form bracket.
    pub sign: f64,
}

impl TransitionPath {
    /// `(E_i - E_n - hbar w1, E_i - E_n - hbar w2)`, eV.
    pub fn denominators(&self, hw1_ev: f64, hw2_ev: f64) -> (f64, f64) {
        (
            -self.intermediate_offset_ev - hw1_ev,
            -self.intermediate_offset_ev - hw2_ev,
        )
    }

    /// This route's contribution to the bracket, `-sign * (1/d1 + 1/d2)`.
    pub fn contribution(&self, hw1_ev: f64, hw2_ev: f64) -> Result<f64> {
        let (d1, d2) = self.denominators(hw1_ev, hw2_ev);
        check_denominator(d1)?;
        check_denominator(d2)?;
        Ok(-self.sign * (1.0 / d1 + 1.0 / d2))
    }
}

/// The two routes that survive at k = 0: through `p~(Gamma8)` at `E_c` and
/// through `p~(Gamma7)` at `E_c - Delta_c`.
pub fn surviving_paths(params: &MaterialParams) -> Vec<TransitionPath> {
    let [_, _, gamma8, gamma7] = channel_states(SpinChannel::Up);
    vec![
        TransitionPath {
            intermediate: gamma8,
            intermediate_offset_ev: params.e_c_ev,
            sign: 1.0,
        },
        TransitionPath {
            intermediate: gamma7,
            intermediate_offset_ev: params.e_c_ev - params.delta_c_ev,
            sign: -1.0,
        },
    ]
}

fn check_denominator(d: f64) -> Result<()> {
    if !d.is_finite() || d.abs() < RESONANCE_TOLERANCE_EV {
        return Err(Error::Resonance {
            denominator_ev: d,
            tolerance_ev: RESONANCE_TOLERANCE_EV,
        });
    }
    Ok(())
}

/// Energy bracket of the closed-form amplitude, 1/eV:
///
/// `1/(E_c+hw_s) + 1/(E_c+hw_i) - 1/(E_c+hw_s-D_c) - 1/(E_c+hw_i-D_c)`
///
/// The terms are paired per photon so that `D_c = 0` cancels exactly.
pub fn mprime_bracket(hw_s_ev: f64, hw_i_ev: f64, params: &MaterialParams) -> Result<f64> {
    bracket_raw(hw_s_ev, hw_i_ev, params.e_c_ev, params.delta_c_ev)
}

pub(crate) fn bracket_raw(hw_s: f64, hw_i: f64, e_c: f64, delta_c: f64) -> Result<f64> {
    let ds = e_c + hw_s;
    let di = e_c + hw_i;
    let ds_split = ds - delta_c;
    let di_split = di - delta_c;
    for d in [ds, di, ds_split, di_split] {
        check_denominator(d)?;
    }
    Ok((1.0 / ds - 1.0 / ds_split) + (1.0 / di - 1.0 / di_split))
}

/// `sqrt(3/2) * m0 * P1 * Q / hbar^2` in eV; times the bracket (1/eV) gives
/// the dimensionless amplitude.
pub fn mprime_prefactor_ev(params: &MaterialParams) -> f64 {
    1.5_f64.sqrt() * params.p1_ev_nm * params.q_ev_nm / CODATA.hbar_sq_over_m0_ev_nm2()
}

/// Dimensionless two-photon matrix element, purely imaginary.
pub fn mprime(
    hw_s_ev: f64,
    hw_i_ev: f64,
    params: &MaterialParams,
    geom: PolarizationGeometry,
) -> Result<Complex64> {
    if geom == PolarizationGeometry::MixedInPlaneVertical {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let bracket = mprime_bracket(hw_s_ev, hw_i_ev, params)?;
    Ok(Complex64::new(
        0.0,
        mprime_prefactor_ev(params) * bracket * geom.amplitude_factor(),
    ))
}

/// Amplitude for one spin channel. The channel's photon pair is checked
/// against the selection rule first; the energetics are channel independent.
pub fn mprime_channel(
    channel: SpinChannel,
    hw_s_ev: f64,
    hw_i_ev: f64,
    params: &MaterialParams,
    geom: PolarizationGeometry,
) -> Result<Complex64> {
    let [initial, fin, _, _] = channel_states(channel);
    let pair = (Circular::SigmaPlus, Circular::SigmaMinus);
    if geom == PolarizationGeometry::VerticalCircularPair
        && !allowed_two_photon(initial.j_z, fin.j_z, pair)?
    {
        return Ok(Complex64::new(0.0, 0.0));
    }
    mprime(hw_s_ev, hw_i_ev, params, geom)
}

/// `sum over degenerate channels |M'|^2`.
pub fn summed_mprime_sq(
    hw_s_ev: f64,
    hw_i_ev: f64,
    params: &MaterialParams,
    geom: PolarizationGeometry,
) -> Result<f64> {
    SpinChannel::ALL.iter().try_fold(0.0, |acc, &ch| {
        Ok(acc + mprime_channel(ch, hw_s_ev, hw_i_ev, params, geom)?.norm_sqr())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(e_c: f64, delta_c: f64) -> MaterialParams {
        MaterialParams::new("test", 1.5, e_c, delta_c, 0.5, 0.8).unwrap()
    }

    #[test]
    fn bracket_worked_example() {
        // 2/3.75 - 2/3.55
        let oracle = 2.0 / 3.75 - 2.0 / 3.55;
        assert!((oracle - (-0.030_047_0_f64)).abs() < 1e-7);
        let b = mprime_bracket(0.75, 0.75, &params(3.0, 0.2)).unwrap();
        assert!((b - oracle).abs() < 1e-15);
    }

    #[test]
    fn bracket_vanishes_without_splitting() {
        for &(s, i) in &[(0.75, 0.75), (0.5, 1.0), (0.1, 1.4)] {
            assert_eq!(mprime_bracket(s, i, &params(3.0, 0.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn bracket_matches_path_sum() {
        let p = params(2.9, 0.17);
        let paths = surviving_paths(&p);
        let via_paths: f64 = paths
            .iter()
            .map(|path| path.contribution(0.7, 0.85).unwrap())
            .sum();
        let direct = mprime_bracket(0.7, 0.85, &p).unwrap();
        assert!((via_paths - direct).abs() < 1e-15);
    }

    #[test]
    fn resonance_is_an_error() {
        let p = params(3.0, 0.2);
        let err = mprime_bracket(-2.8, 0.75, &p).unwrap_err();
        assert!(matches!(err, Error::Resonance { .. }));
        let err = mprime(0.75, -3.0 + 5e-7, &p, PolarizationGeometry::InPlaneZz).unwrap_err();
        assert!(matches!(err, Error::Resonance { .. }));
    }

    #[test]
    fn material_validation() {
        assert!(MaterialParams::new("x", 1.5, 0.2, 0.2, 0.5, 0.8).is_err());
        assert!(MaterialParams::new("x", 0.0, 3.0, 0.2, 0.5, 0.8).is_err());
        assert!(MaterialParams::new("x", 1.5, 3.0, -0.1, 0.5, 0.8).is_err());
        assert!(MaterialParams::new("x", 1.5, 3.0, 0.1, -0.5, 0.8).is_err());
        assert!(MaterialParams::new("x", 1.5, 3.0, 0.1, 0.5, f64::NAN).is_err());
        MaterialParams::gaas_14band().validate().unwrap();
    }

    #[test]
    fn geometry_factors() {
        let p = params(3.0, 0.2);
        let v = mprime(0.75, 0.75, &p, PolarizationGeometry::VerticalCircularPair).unwrap();
        let z = mprime(0.75, 0.75, &p, PolarizationGeometry::InPlaneZz).unwrap();
        let m = mprime(0.75, 0.75, &p, PolarizationGeometry::MixedInPlaneVertical).unwrap();
        assert_eq!(v.re, 0.0);
        assert!(v.im != 0.0);
        assert_eq!(z.norm() / v.norm(), 4.0);
        assert_eq!(m.norm(), 0.0);
        // forbidden regardless of inputs, including resonant ones
        let m = mprime(-3.0, 0.75, &p, PolarizationGeometry::MixedInPlaneVertical).unwrap();
        assert_eq!(m.norm(), 0.0);
    }

    #[test]
    fn mprime_magnitude() {
        let p = params(3.0, 0.2);
        let v = mprime(0.75, 0.75, &p, PolarizationGeometry::VerticalCircularPair).unwrap();
        let expected = 1.5_f64.sqrt() * 0.5 * 0.8 / CODATA.hbar_sq_over_m0_ev_nm2()
            * (2.0 / 3.75 - 2.0 / 3.55);
        assert!((v.im - expected).abs() < 1e-14);
    }

    #[test]
    fn selection_rules() {
        use Circular::*;
        let h = HalfInt::PLUS_HALF;
        let mh = HalfInt::MINUS_HALF;
        assert!(allowed_two_photon(h, h, (SigmaPlus, SigmaMinus)).unwrap());
        assert!(!allowed_two_photon(h, h, (SigmaPlus, SigmaPlus)).unwrap());
        assert!(!allowed_two_photon(h, h, (SigmaMinus, SigmaMinus)).unwrap());
        assert!(allowed_two_photon(mh, mh, (SigmaMinus, SigmaPlus)).unwrap());
        // net +2 units carried away: 3/2 -> -1/2
        assert!(
            allowed_two_photon(HalfInt::PLUS_THREE_HALVES, mh, (SigmaPlus, SigmaPlus)).unwrap()
        );
        assert!(allowed_two_photon(HalfInt::from_twice(5), h, (SigmaPlus, SigmaMinus)).is_err());
        assert!(allowed_two_photon(HalfInt::from_twice(0), h, (SigmaPlus, SigmaMinus)).is_err());
    }

    #[test]
    fn half_int_parsing() {
        assert_eq!(HalfInt::from_f64(0.5).unwrap(), HalfInt::PLUS_HALF);
        assert_eq!(
            HalfInt::from_f64(-1.5).unwrap(),
            HalfInt::MINUS_THREE_HALVES
        );
        assert!(HalfInt::from_f64(0.25).is_err());
        assert_eq!(HalfInt::MINUS_HALF.to_string(), "-1/2");
        assert_eq!(HalfInt::MINUS_HALF.value(), -0.5);
    }

    #[test]
    fn tabulated_states() {
        for ch in SpinChannel::ALL {
            let [i, f, n1, n2] = channel_states(ch);
            for st in [&i, &f, &n1, &n2] {
                assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
            }
            assert_eq!(i.band, Band::Conduction);
            assert_eq!(f.band, Band::LightHole);
            assert_eq!(f.j, HalfInt::PLUS_THREE_HALVES);
            assert_eq!(i.j_z, f.j_z);
            assert_eq!(n1.band, Band::HigherCbGamma8);
            assert_eq!(n2.band, Band::HigherCbGamma7);
            // one photon away from the initial state on either route
            assert_eq!((n1.j_z.twice() - i.j_z.twice()).abs(), 2);
            assert_eq!((n2.j_z.twice() - i.j_z.twice()).abs(), 2);
        }
    }

    #[test]
    fn state_constructor_rejects_bad_input() {
        let up = BlochLabel {
            orbital: Orbital::S,
            spin: Spin::Up,
        };
        assert!(BandEdgeState::new(
            Band::Conduction,
            HalfInt::PLUS_HALF,
            HalfInt::PLUS_HALF,
            vec![(c(0.9, 0.0), up)]
        )
        .is_err());
        assert!(BandEdgeState::new(
            Band::Conduction,
            HalfInt::PLUS_HALF,
            HalfInt::PLUS_THREE_HALVES,
            vec![(c(1.0, 0.0), up)]
        )
        .is_err());
    }

    #[test]
    fn two_paths_through_higher_bands() {
        let p = MaterialParams::gaas_14band();
        let paths = surviving_paths(&p);
        assert_eq!(paths.len(), 2);
        for path in &paths {
            assert!(matches!(
                path.intermediate.band,
                Band::HigherCbGamma7 | Band::HigherCbGamma8
            ));
        }
        let (a, _) = paths[0].denominators(0.775, 0.775);
        let (b, _) = paths[1].denominators(0.775, 0.775);
        assert!(((b - a) - p.delta_c_ev).abs() < 1e-15);
    }

    #[test]
    fn spin_channels_agree() {
        let p = MaterialParams::gaas_14band();
        for geom in [
            PolarizationGeometry::VerticalCircularPair,
            PolarizationGeometry::InPlaneZz,
        ] {
            let up = mprime_channel(SpinChannel::Up, 0.7, 0.85, &p, geom).unwrap();
            let dn = mprime_channel(SpinChannel::Down, 0.7, 0.85, &p, geom).unwrap();
            assert_eq!(up.norm(), dn.norm());
            let total = summed_mprime_sq(0.7, 0.85, &p, geom).unwrap();
            assert!((total - 2.0 * up.norm_sqr()).abs() <= 1e-15 * total);
        }
    }

    #[test]
    fn degeneracy_slope() {
        // d(bracket)/d(Delta_c) at 0 is -sum 1/(E_c + hw)^2
        let (e_c, hs, hi) = (3.0_f64, 0.7, 0.85);
        let analytic = -(1.0 / (e_c + hs).powi(2) + 1.0 / (e_c + hi).powi(2));
        let h = 1e-6;
        let fd =
            (bracket_raw(hs, hi, e_c, h).unwrap() - bracket_raw(hs, hi, e_c, 0.0).unwrap()) / h;
        assert!(((fd - analytic) / analytic).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn exchange_symmetry(
            hs in 0.05f64..1.5,
            hi in 0.05f64..1.5,
            e_c in 1.6f64..5.0,
            frac in 0.0f64..0.9,
        ) {
            let p = MaterialParams::new("p", 1.5, e_c, frac * e_c, 0.5, 0.8).unwrap();
            for geom in [
                PolarizationGeometry::VerticalCircularPair,
                PolarizationGeometry::InPlaneZz,
                PolarizationGeometry::MixedInPlaneVertical,
            ] {
                let a = mprime(hs, hi, &p, geom).unwrap();
                let b = mprime(hi, hs, &p, geom).unwrap();
                prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
            }
        }

        #[test]
        fn geometry_ladder(hs in 0.1f64..1.4, hi in 0.1f64..1.4) {
            let p = MaterialParams::gaas_14band();
            let v = summed_mprime_sq(hs, hi, &p, PolarizationGeometry::VerticalCircularPair).unwrap();
            let z = summed_mprime_sq(hs, hi, &p, PolarizationGeometry::InPlaneZz).unwrap();
            let m = summed_mprime_sq(hs, hi, &p, PolarizationGeometry::MixedInPlaneVertical).unwrap();
            prop_assert_eq!(z / v, 16.0);
            prop_assert_eq!(m, 0.0);
        }
    }
}
