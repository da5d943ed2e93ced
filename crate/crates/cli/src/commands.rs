//! The four commands. Each is a pure function of the loaded configuration:
//! it returns the result document and any CSV artifact, and leaves writing
//! files to the caller.

use std::fmt::Write as _;

use tpeqw::entanglement::{self, ChshSettings};
use tpeqw::{events, rate, units};

use crate::config::{ConfigError, LoadedConfig, Resolved};
use crate::report::{Artifact, ResultDocument};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const EVENTS_CSV: &str = "events.csv";
pub const SWEEP_HEADER: &str = "lambda_s_nm,lambda_i_nm,rate_per_s";
pub const EVENTS_HEADER: &str = "t_s,arm_tag";

/// Stream offset separating the Bell outcome draws from the emission trace.
const OUTCOME_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rate,
    Sweep,
    Bell,
    Events,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rate => "rate",
            Command::Sweep => "sweep",
            Command::Bell => "bell",
            Command::Events => "events",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] tpeqw::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: ResultDocument,
    pub artifact: Option<Artifact>,
}

pub fn run(command: Command, loaded: &LoadedConfig) -> Result<Outcome, CliError> {
    let resolved = loaded.resolve()?;
    let mut doc = ResultDocument::new(
        command.name(),
        loaded.config.clone(),
        resolved.warnings.clone(),
    );
    let artifact = match command {
        Command::Rate => {
            cmd_rate(&resolved, &mut doc)?;
            None
        }
        Command::Sweep => Some(cmd_sweep(loaded, &resolved, &mut doc)?),
        Command::Bell => {
            cmd_bell(&resolved, &mut doc)?;
            None
        }
        Command::Events => Some(cmd_events(&resolved, &mut doc)?),
    };
    Ok(Outcome {
        document: doc,
        artifact,
    })
}

/// Rate used for the accidental-coincidence analysis.
fn operating_rate(resolved: &Resolved) -> Result<f64, CliError> {
    match resolved.operating_rate_per_s {
        Some(r) => Ok(r),
        None => Ok(rate::closed_form_rate(&resolved.inputs, resolved.polarization)?.rate),
    }
}

fn cmd_rate(resolved: &Resolved, doc: &mut ResultDocument) -> Result<(), CliError> {
    let inputs = &resolved.inputs;
    let result = rate::closed_form_rate(inputs, resolved.polarization)?;
    let orders = rate::pdc_comparison(result.rate, resolved.pdc_baseline_per_s)?;
    let op_rate = operating_rate(resolved)?;
    let overlap = rate::pair_overlap_probability(op_rate, resolved.cavity_lifetime_s)?;
    let lambda_s = units::m_to_nm(units::angular_frequency_to_wavelength(
        inputs.cavity.omega_s,
    )?);
    let lambda_i = units::m_to_nm(units::angular_frequency_to_wavelength(
        inputs.cavity.omega_i,
    )?);

    doc.number("rate_per_s", result.rate)
        .number("detected_rate_per_s", result.detected_rate)
        .number("tau_2ph_s", result.tau_2ph)
        .number("pdc_baseline_per_s", resolved.pdc_baseline_per_s)
        .number("pdc_orders", orders)
        .number("operating_rate_per_s", op_rate)
        .number("cavity_lifetime_s", resolved.cavity_lifetime_s)
        .number("pair_overlap_probability", overlap)
        .number("omega0_rad_per_s", inputs.omega0())
        .number("lambda_s_nm", lambda_s)
        .number("lambda_i_nm", lambda_i)
        .number("cavity_height_nm", inputs.geometry.cavity_height_nm)
        .number(
            "quantization_volume_m3",
            inputs.geometry.quantization_volume(),
        )
        .number("unit_cell_count", inputs.geometry.unit_cell_count())
        .text("polarization", polarization_name(resolved));

    // The golden-rule integral applies to the vertical pair geometry only.
    // Its normalization against the closed form is not fixed, so the ratio
    // is reported as observed.
    if resolved.polarization == tpeqw::PolarizationGeometry::VerticalCircularPair {
        match rate::quadrature_rate(inputs, doc.inputs.run.quadrature_grid) {
            Ok(q) => {
                doc.number("quadrature_rate_per_s", q)
                    .number("quadrature_to_closed_form", q / result.rate);
            }
            Err(e) => doc
                .warnings
                .push(format!("quadrature cross-check skipped: {e}")),
        }
    }
    Ok(())
}

fn polarization_name(resolved: &Resolved) -> &'static str {
    match resolved.polarization {
        tpeqw::PolarizationGeometry::VerticalCircularPair => "vertical-circular-pair",
        tpeqw::PolarizationGeometry::InPlaneZz => "in-plane-zz",
        tpeqw::PolarizationGeometry::MixedInPlaneVertical => "mixed-in-plane-vertical",
    }
}

/// Sweep CSV: shortest round-trip scientific notation, LF line endings.
pub fn sweep_csv(curve: &tpeqw::SpectralCurve) -> String {
    let mut s = String::with_capacity(64 * (curve.samples.len() + 1));
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for p in &curve.samples {
        writeln!(s, "{:e},{:e},{:e}", p.lambda_s_nm, p.lambda_i_nm, p.rate).unwrap();
    }
    s
}

fn cmd_sweep(
    loaded: &LoadedConfig,
    resolved: &Resolved,
    doc: &mut ResultDocument,
) -> Result<Artifact, CliError> {
    let r = &loaded.config.run;
    let curve = rate::spectral_sweep(
        &resolved.inputs,
        r.sweep_min_nm,
        r.sweep_max_nm,
        r.sweep_steps,
    )?;
    doc.integer("samples", curve.samples.len() as u64)
        .number("omega0_rad_per_s", curve.omega0)
        .text("csv", SWEEP_CSV);
    if let Some(peak) = curve.peak() {
        doc.number("peak_rate_per_s", peak.rate)
            .number("peak_lambda_s_nm", peak.lambda_s_nm);
    }
    Ok(Artifact {
        file_name: SWEEP_CSV.into(),
        contents: sweep_csv(&curve),
    })
}

fn cmd_bell(resolved: &Resolved, doc: &mut ResultDocument) -> Result<(), CliError> {
    let cavity = &resolved.inputs.cavity;
    let op_rate = operating_rate(resolved)?;
    let overlap = rate::pair_overlap_probability(op_rate, resolved.cavity_lifetime_s)?;
    let state = entanglement::accidental_degraded_state(cavity.omega_i, cavity.omega_s, overlap)?;
    let settings = ChshSettings::optimal();
    let s = entanglement::chsh_value(&state, &settings)?;
    let trace = events::simulate_events(op_rate, resolved.duration_s, resolved.seed)?;
    let mc = entanglement::mc_chsh(&trace, &state, &settings, resolved.seed ^ OUTCOME_STREAM)?;

    doc.number("chsh_analytic", s)
        .number("chsh_mc", mc.s)
        .number("chsh_mc_std_error", mc.std_error)
        .integer("events", mc.events as u64)
        .number("werner_p", 1.0 - overlap)
        .number("pair_overlap_probability", overlap)
        .number("operating_rate_per_s", op_rate)
        .number("cavity_lifetime_s", resolved.cavity_lifetime_s)
        .flag("violates_classical_bound", s > 2.0)
        .text("measurement_model", "equatorial projective analyzers");
    Ok(())
}

/// Event CSV: one row per emission.
pub fn events_csv(trace: &tpeqw::EventTrace) -> String {
    let mut s = String::with_capacity(40 * (trace.len() + 1));
    s.push_str(EVENTS_HEADER);
    s.push('\n');
    for (t, tag) in trace.timestamps.iter().zip(&trace.tags) {
        writeln!(s, "{t:e},{tag}").unwrap();
    }
    s
}

fn cmd_events(resolved: &Resolved, doc: &mut ResultDocument) -> Result<Artifact, CliError> {
    let op_rate = operating_rate(resolved)?;
    let tau = resolved.cavity_lifetime_s;
    let trace = events::simulate_events(op_rate, resolved.duration_s, resolved.seed)?;
    let analytic = rate::pair_overlap_probability(op_rate, tau)?;

    doc.integer("events", trace.len() as u64)
        .number("expected_events", op_rate * resolved.duration_s)
        .number("operating_rate_per_s", op_rate)
        .number("duration_s", resolved.duration_s)
        .number("cavity_lifetime_s", tau)
        .number("overlap_analytic", analytic)
        .integer("seed", resolved.seed)
        .text("csv", EVENTS_CSV);
    if let Some((p, se)) = trace.overlap_fraction(tau) {
        doc.number("overlap_fraction", p)
            .number("overlap_std_error", se);
    }
    Ok(Artifact {
        file_name: EVENTS_CSV.into(),
        contents: events_csv(&trace),
    })
}
