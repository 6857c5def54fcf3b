//! Commanded wheel-torque profiles.
//!
//! Each profile is built from a unit-scale shape per axis and then normalized so the peak
//! magnitude on every axis equals the actuator torque limit exactly.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfileKind {
    OneStep,
    MultiStep,
    Sawtooth,
    Sine,
    MultiSine,
    Chirp,
    Prbs,
    Sine3Axis,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 8] = [
        ProfileKind::OneStep,
        ProfileKind::MultiStep,
        ProfileKind::Sawtooth,
        ProfileKind::Sine,
        ProfileKind::MultiSine,
        ProfileKind::Chirp,
        ProfileKind::Prbs,
        ProfileKind::Sine3Axis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::OneStep => "one-step",
            ProfileKind::MultiStep => "multi-step",
            ProfileKind::Sawtooth => "sawtooth",
            ProfileKind::Sine => "sine",
            ProfileKind::MultiSine => "multi-sine",
            ProfileKind::Chirp => "chirp",
            ProfileKind::Prbs => "prbs",
            ProfileKind::Sine3Axis => "sine-3axis",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "onestep" => Ok(ProfileKind::OneStep),
            "multistep" => Ok(ProfileKind::MultiStep),
            "sawtooth" => Ok(ProfileKind::Sawtooth),
            "sine" => Ok(ProfileKind::Sine),
            "multisine" => Ok(ProfileKind::MultiSine),
            "chirp" => Ok(ProfileKind::Chirp),
            "prbs" => Ok(ProfileKind::Prbs),
            "sine3axis" => Ok(ProfileKind::Sine3Axis),
            _ => Err(Error::Config(format!("unknown profile kind '{s}'"))),
        }
    }
}

// Shape parameters, s and Hz.
const ONE_STEP_ONSETS: [f64; 3] = [10.0, 30.0, 50.0];
const ONE_STEP_WIDTH: f64 = 5.0;
const STAGGER: [f64; 3] = [0.0, 13.0, 27.0];
const MULTI_STEP_PERIOD: f64 = 40.0;
const SAWTOOTH_PERIOD: f64 = 30.0;
const SINE_FREQ: f64 = 0.05;
const MULTI_SINE_FREQS: [f64; 4] = [0.02, 0.05, 0.11, 0.23];
const CHIRP_BAND: (f64, f64) = (0.01, 0.5);
const SINE_3AXIS_FREQS: [f64; 3] = [0.03, 0.05, 0.07];
const PRBS_ORDER: u32 = 9;
const PRBS_CHIP: f64 = 1.0;

/// Per-axis commanded wheel torque sampled at the control period.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationProfile<T: Scalar> {
    /// `None` for hand-built profiles.
    pub kind: Option<ProfileKind>,
    /// N·m, one entry per control period starting at t = 0.
    pub samples: Vec<Vector3<T>>,
    pub dt: T,
    pub duration: T,
    pub seed: u64,
}

impl<T: Scalar> ExcitationProfile<T> {
    /// All-zero command over `duration`.
    pub fn zeros(duration: T, dt: T) -> Result<Self> {
        let n = sample_count(duration, dt)?;
        Ok(Self {
            kind: None,
            samples: vec![Vector3::zeros(); n],
            dt,
            duration,
            seed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> T {
        T::from_usize(k).expect("index fits scalar") * self.dt
    }

    /// Peak magnitude per axis.
    pub fn peak(&self) -> Vector3<T> {
        self.samples
            .iter()
            .fold(Vector3::zeros(), |acc: Vector3<T>, s| {
                acc.zip_map(s, |a, b| a.max(b.abs()))
            })
    }

    /// Writes `t,tau_x,tau_y,tau_z` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,tau_x,tau_y,tau_z")?;
        for (k, s) in self.samples.iter().enumerate() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.time(k).as_f64(),
                s.x.as_f64(),
                s.y.as_f64(),
                s.z.as_f64()
            )?;
        }
        Ok(())
    }
}

fn sample_count<T: Scalar>(duration: T, dt: T) -> Result<usize> {
    if !(duration > T::zero()) || !(dt > T::zero()) {
        return Err(Error::Input("duration and dt must be positive".into()));
    }
    let n = (duration / dt).round().as_f64();
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::Input(
            "profile must contain at least one sample".into(),
        ));
    }
    Ok(n as usize)
}

/// Builds the profile of `kind` with every axis normalized to peak `tau_max`.
pub fn generate<T: Scalar>(
    kind: ProfileKind,
    duration: T,
    dt: T,
    tau_max: T,
    seed: u64,
) -> Result<ExcitationProfile<T>> {
    if !(tau_max > T::zero()) {
        return Err(Error::Input("tau_max must be positive".into()));
    }
    let n = sample_count(duration, dt)?;
    let dt64 = dt.as_f64();
    let total = duration.as_f64();
    let two_pi = std::f64::consts::TAU;
    let phase3 = |axis: usize| two_pi * axis as f64 / 3.0;

    let mut shape: Vec<[f64; 3]> = vec![[0.0; 3]; n];
    match kind {
        ProfileKind::OneStep => {
            // integer sample indices keep the pulse edges exact
            let width = (ONE_STEP_WIDTH / dt64).round() as usize;
            for axis in 0..3 {
                let start = (ONE_STEP_ONSETS[axis] / dt64).round() as usize;
                for row in shape.iter_mut().skip(start).take(width) {
                    row[axis] = 1.0;
                }
            }
        }
        ProfileKind::MultiStep => fill(&mut shape, dt64, |t, axis| {
            let u = (t + STAGGER[axis]).rem_euclid(MULTI_STEP_PERIOD);
            if u < 0.5 * MULTI_STEP_PERIOD {
                1.0
            } else {
                -1.0
            }
        }),
        ProfileKind::Sawtooth => fill(&mut shape, dt64, |t, axis| {
            let u = (t + STAGGER[axis]).rem_euclid(SAWTOOTH_PERIOD) / SAWTOOTH_PERIOD;
            2.0 * u - 1.0
        }),
        ProfileKind::Sine => fill(&mut shape, dt64, |t, axis| {
            (two_pi * SINE_FREQ * t + phase3(axis)).sin()
        }),
        ProfileKind::MultiSine => fill(&mut shape, dt64, |t, axis| {
            MULTI_SINE_FREQS
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    // Schroeder-style phases lower the crest factor of the sum
                    let j = j as f64;
                    let phase = std::f64::consts::PI * j * (j + 1.0) / 4.0 + phase3(axis);
                    (two_pi * f * t + phase).sin()
                })
                .sum()
        }),
        ProfileKind::Chirp => {
            let (f0, f1) = CHIRP_BAND;
            let rate = (f1 - f0) / total;
            fill(&mut shape, dt64, |t, axis| {
                (two_pi * (f0 * t + 0.5 * rate * t * t) + phase3(axis)).sin()
            })
        }
        ProfileKind::Prbs => {
            let per_chip = ((PRBS_CHIP / dt64).round() as usize).max(1);
            let chips = n.div_ceil(per_chip);
            for axis in 0..3 {
                let seq = mls_sequence(PRBS_ORDER, prbs_register(seed, axis), chips);
                for (k, row) in shape.iter_mut().enumerate() {
                    row[axis] = if seq[k / per_chip] { 1.0 } else { -1.0 };
                }
            }
        }
        ProfileKind::Sine3Axis => fill(&mut shape, dt64, |t, axis| {
            (two_pi * SINE_3AXIS_FREQS[axis] * t).sin()
        }),
    }

    let mut samples: Vec<Vector3<T>> = shape
        .iter()
        .map(|r| Vector3::new(T::lit(r[0]), T::lit(r[1]), T::lit(r[2])))
        .collect();
    normalize(&mut samples, tau_max);
    Ok(ExcitationProfile {
        kind: Some(kind),
        samples,
        dt,
        duration,
        seed,
    })
}

fn fill(shape: &mut [[f64; 3]], dt: f64, f: impl Fn(f64, usize) -> f64) {
    for (k, row) in shape.iter_mut().enumerate() {
        let t = k as f64 * dt;
        for (axis, v) in row.iter_mut().enumerate() {
            *v = f(t, axis);
        }
    }
}

/// Scales each axis so that its largest magnitude equals `tau_max`.
///
/// `(s / peak) * tau_max` is exactly `±tau_max` at the peak sample and never exceeds it
/// elsewhere. An all-zero axis is left at zero.
fn normalize<T: Scalar>(samples: &mut [Vector3<T>], tau_max: T) {
    for axis in 0..3 {
        let peak = samples.iter().fold(T::zero(), |m, s| m.max(s[axis].abs()));
        if peak > T::zero() {
            for s in samples.iter_mut() {
                s[axis] = s[axis] / peak * tau_max;
            }
        }
    }
}

/// Non-zero initial register for one axis, derived from the run seed.
fn prbs_register(seed: u64, axis: usize) -> u32 {
    let mut z = seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(axis as u64 + 1));
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    let period = (1u64 << PRBS_ORDER) - 1;
    (z % period + 1) as u32
}

/// Maximal-length sequence from a Fibonacci shift register (x⁹ + x⁵ + 1 for order 9).
pub fn mls_sequence(order: u32, init: u32, len: usize) -> Vec<bool> {
    assert_eq!(order, 9, "only the order-9 register is tabulated");
    let mask = (1u32 << order) - 1;
    let mut reg = init & mask;
    assert!(reg != 0, "register must be non-zero");
    (0..len)
        .map(|_| {
            let out = reg & 1 == 1;
            let fb = (reg ^ (reg >> 4)) & 1;
            reg = (reg >> 1) | (fb << (order - 1));
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(kind: ProfileKind, tau: f64) -> ExcitationProfile<f64> {
        generate(kind, 300.0, 0.1, tau, 7).unwrap()
    }

    #[test]
    fn every_kind_hits_peak_exactly() {
        for kind in ProfileKind::ALL {
            for tau in [0.01, 0.1] {
                let p = gen(kind, tau);
                assert_eq!(p.len(), 3000);
                assert_eq!(p.peak(), Vector3::new(tau, tau, tau), "{kind}");
            }
        }
    }

    #[test]
    fn one_step_pulses() {
        let p = gen(ProfileKind::OneStep, 0.1);
        for axis in 0..3 {
            let on: Vec<usize> = (0..p.len())
                .filter(|&k| p.samples[k][axis] != 0.0)
                .collect();
            let start = 100 + 200 * axis;
            assert_eq!(on, (start..start + 50).collect::<Vec<_>>());
            let energy: f64 = p.samples.iter().map(|s| s[axis] * p.dt).sum();
            assert!((energy - 0.1 * 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prbs_is_binary_and_chip_aligned() {
        let p = gen(ProfileKind::Prbs, 0.1);
        for axis in 0..3 {
            for chip in p.samples.chunks(10) {
                let v = chip[0][axis];
                assert!(v == 0.1 || v == -0.1);
                assert!(chip.iter().all(|s| s[axis] == v));
            }
        }
    }

    #[test]
    fn prbs_seed_determinism() {
        let a = generate::<f64>(ProfileKind::Prbs, 300.0, 0.1, 0.1, 1).unwrap();
        let b = generate::<f64>(ProfileKind::Prbs, 300.0, 0.1, 0.1, 1).unwrap();
        let c = generate::<f64>(ProfileKind::Prbs, 300.0, 0.1, 0.1, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn mls_has_full_period() {
        let seq = mls_sequence(9, 1, 511 * 2);
        assert_eq!(seq[..511], seq[511..]);
        for p in 1..511 {
            assert_ne!(
                seq[..511].to_vec(),
                [&seq[p..511], &seq[..p]].concat(),
                "period {p}"
            );
        }
        assert_eq!(seq[..511].iter().filter(|&&b| b).count(), 256);
    }

    #[test]
    fn chirp_frequency_increases() {
        let p = gen(ProfileKind::Chirp, 1.0);
        let crossings: Vec<f64> = p
            .samples
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].x < 0.0 && w[1].x >= 0.0)
            .map(|(k, _)| k as f64 * 0.1)
            .collect();
        let gaps: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
        for g in gaps.windows(2) {
            assert!(
                g[1] <= g[0] + 0.2 + 1e-9,
                "instantaneous period grew: {g:?}"
            );
        }
        assert!(gaps.first().unwrap() > &(gaps.last().unwrap() * 5.0));
    }

    #[test]
    fn unknown_kind_is_config_error() {
        assert!(matches!(
            "square".parse::<ProfileKind>(),
            Err(Error::Config(_))
        ));
        for k in ProfileKind::ALL {
            assert_eq!(k.name().parse::<ProfileKind>().unwrap(), k);
        }
        assert_eq!(
            "Sine 3-Axis".parse::<ProfileKind>().unwrap(),
            ProfileKind::Sine3Axis
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(generate::<f64>(ProfileKind::Sine, 0.0, 0.1, 0.1, 0).is_err());
        assert!(generate::<f64>(ProfileKind::Sine, 10.0, -0.1, 0.1, 0).is_err());
        assert!(generate::<f64>(ProfileKind::Sine, 10.0, 0.1, 0.0, 0).is_err());
    }

    #[test]
    fn csv_export_header_and_rows() {
        let p = generate::<f64>(ProfileKind::Sine, 1.0, 0.1, 0.1, 0).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,tau_x,tau_y,tau_z");
        assert_eq!(lines.len(), 11);
        assert!(!text.contains('\r'));
    }
}
