//! Poisson emission-event simulator.
//!
//! Pairs are emitted as a homogeneous Poisson process. Each pair sends one
//! photon into the sigma+ (R) arm and one into the sigma- (L) arm; which
//! frequency lands in R is drawn with the equal weights of the entangled
//! state. The generator is ChaCha8 seeded from a `u64`, so a seed fully
//! determines the trace.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest expected event count a single trace may hold.
pub const MAX_EXPECTED_EVENTS: f64 = 1e9;

/// Frequency carried by the sigma+ (R) arm. The L arm always holds the
/// other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArmTag {
    /// `|w_i>_R |w_s>_L`
    IdlerRight,
    /// `|w_s>_R |w_i>_L`
    SignalRight,
}

impl ArmTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ArmTag::IdlerRight => "R:idler/L:signal",
            ArmTag::SignalRight => "R:signal/L:idler",
        }
    }
}

impl fmt::Display for ArmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTrace {
    /// Emission times, s, strictly increasing within `[0, duration]`.
    pub timestamps: Vec<f64>,
    pub tags: Vec<ArmTag>,
    pub duration: f64,
    pub seed: u64,
}

impl EventTrace {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Fraction of consecutive emissions closer than `window`, with its
    /// binomial standard error. `None` for fewer than two events.
    pub fn overlap_fraction(&self, window: f64) -> Option<(f64, f64)> {
        if self.timestamps.len() < 2 {
            return None;
        }
        let gaps = self.timestamps.len() - 1;
        let close = self
            .timestamps
            .windows(2)
            .filter(|w| w[1] - w[0] < window)
            .count();
        let p = close as f64 / gaps as f64;
        Some((p, (p * (1.0 - p) / gaps as f64).sqrt()))
    }
}

/// Homogeneous Poisson trace at `rate` (1/s) over `duration` (s).
pub fn simulate_events(rate: f64, duration: f64, seed: u64) -> Result<EventTrace> {
    if !(rate > 0.0 && rate.is_finite()) || !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Domain(format!(
            "rate and duration must be positive, got {rate:e} and {duration:e}"
        )));
    }
    let expected = rate * duration;
    if expected > MAX_EXPECTED_EVENTS {
        return Err(Error::Resource(format!(
            "expected {expected:.3e} events exceeds the limit of {MAX_EXPECTED_EVENTS:e}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaps = Exp::new(rate).map_err(|e| Error::Domain(e.to_string()))?;
    let capacity = (expected + 6.0 * expected.sqrt() + 16.0) as usize;
    let mut timestamps = Vec::with_capacity(capacity);
    let mut tags = Vec::with_capacity(capacity);
    let mut t = 0.0_f64;
    loop {
        let mut next = t + gaps.sample(&mut rng);
        if next <= t {
            next = t.next_up();
        }
        if next > duration {
            break;
        }
        t = next;
        timestamps.push(t);
        tags.push(if rng.random_bool(0.5) {
            ArmTag::SignalRight
        } else {
            ArmTag::IdlerRight
        });
    }
    Ok(EventTrace {
        timestamps,
        tags,
        duration,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = simulate_events(1e6, 1e-2, 42).unwrap();
        let b = simulate_events(1e6, 1e-2, 42).unwrap();
        let c = simulate_events(1e6, 1e-2, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.timestamps, c.timestamps);
    }

    #[test]
    fn strictly_increasing_within_duration() {
        let tr = simulate_events(7.5e10, 1e-7, 7).unwrap();
        assert!(!tr.is_empty());
        assert!(tr.timestamps.windows(2).all(|w| w[1] > w[0]));
        assert!(tr.timestamps[0] >= 0.0 && *tr.timestamps.last().unwrap() <= tr.duration);
        assert_eq!(tr.tags.len(), tr.len());
    }

    #[test]
    fn mean_count() {
        // 200 runs with mean 500 each; sum is Poisson(1e5)
        let total: usize = (0..200)
            .map(|s| simulate_events(5e3, 0.1, s).unwrap().len())
            .sum();
        let expected = 200.0 * 500.0;
        assert!((total as f64 - expected).abs() < 3.0 * expected.sqrt());
    }

    #[test]
    fn tags_are_balanced() {
        let tr = simulate_events(1e5, 1.0, 3).unwrap();
        let n = tr.len() as f64;
        let right = tr
            .tags
            .iter()
            .filter(|t| **t == ArmTag::SignalRight)
            .count() as f64;
        assert!((right - 0.5 * n).abs() < 3.0 * (0.25 * n).sqrt());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            simulate_events(0.0, 1.0, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            simulate_events(1.0, -1.0, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            simulate_events(1e10, 1.0, 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn overlap_fraction_edge_cases() {
        let tr = EventTrace {
            timestamps: vec![0.1],
            tags: vec![ArmTag::IdlerRight],
            duration: 1.0,
            seed: 0,
        };
        assert!(tr.overlap_fraction(1.0).is_none());
        let tr = EventTrace {
            timestamps: vec![0.1, 0.2, 0.7],
            tags: vec![ArmTag::IdlerRight; 3],
            duration: 1.0,
            seed: 0,
        };
        assert_eq!(tr.overlap_fraction(0.15).unwrap().0, 0.5);
    }
}
