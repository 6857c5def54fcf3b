//! Discrete Fourier summary of excitation profiles.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::excitation::ExcitationProfile;
use crate::scalar::Scalar;

/// Peaks below this fraction of the strongest bin are not reported as dominant.
const PEAK_FLOOR: f64 = 0.1;
const MAX_PEAKS: usize = 8;
/// Fraction of the total power the reported band must contain.
const BAND_POWER: f64 = 0.9;

#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpectrum {
    /// Hz, strongest first.
    pub dominant: Vec<f64>,
    /// Width of the central band holding 90% of the signal power, Hz.
    pub bandwidth: f64,
    /// Edges of that band, Hz.
    pub band: (f64, f64),
    /// Frequency resolution, Hz.
    pub resolution: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary {
    pub axes: [AxisSpectrum; 3],
}

/// One-sided power spectrum of `signal` sampled every `dt` seconds; returns `(freq, power)`.
pub fn power_spectrum(signal: &[f64], dt: f64) -> Vec<(f64, f64)> {
    let n = signal.len();
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * dt);
    (0..=n / 2)
        .map(|k| {
            // fold the negative-frequency half onto the positive one
            let mirrored = k != 0 && 2 * k != n;
            let p = buf[k].norm_sqr() * if mirrored { 2.0 } else { 1.0 };
            (k as f64 * df, p)
        })
        .collect()
}

pub fn spectral_summary<T: Scalar>(profile: &ExcitationProfile<T>) -> Result<SpectralSummary> {
    if profile.is_empty() {
        return Err(Error::Input("empty profile".into()));
    }
    let dt = profile.dt.as_f64();
    let axis = |a: usize| {
        let x: Vec<f64> = profile.samples.iter().map(|s| s[a].as_f64()).collect();
        summarize_axis(&x, dt)
    };
    Ok(SpectralSummary {
        axes: [axis(0), axis(1), axis(2)],
    })
}

fn summarize_axis(x: &[f64], dt: f64) -> AxisSpectrum {
    let spec = power_spectrum(x, dt);
    let resolution = 1.0 / (x.len() as f64 * dt);
    let total: f64 = spec.iter().map(|(_, p)| p).sum();
    if total <= 0.0 {
        return AxisSpectrum {
            dominant: Vec::new(),
            bandwidth: 0.0,
            band: (0.0, 0.0),
            resolution,
        };
    }

    let strongest = spec.iter().map(|(_, p)| *p).fold(0.0, f64::max);
    let mut peaks: Vec<(f64, f64)> = (0..spec.len())
        .filter(|&k| {
            let p = spec[k].1;
            let left = if k > 0 { spec[k - 1].1 } else { 0.0 };
            let right = spec.get(k + 1).map_or(0.0, |s| s.1);
            p >= PEAK_FLOOR * strongest && p >= left && p > right
        })
        .map(|k| spec[k])
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    let dominant = peaks.iter().take(MAX_PEAKS).map(|(f, _)| *f).collect();

    let tail = 0.5 * (1.0 - BAND_POWER) * total;
    let mut acc = 0.0;
    let mut lo = spec[0].0;
    for (f, p) in &spec {
        acc += p;
        if acc > tail {
            lo = *f;
            break;
        }
    }
    acc = 0.0;
    let mut hi = spec[spec.len() - 1].0;
    for (f, p) in spec.iter().rev() {
        acc += p;
        if acc > tail {
            hi = *f;
            break;
        }
    }
    AxisSpectrum {
        dominant,
        bandwidth: (hi - lo).max(0.0),
        band: (lo, hi),
        resolution,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excitation::{generate, ProfileKind};

    #[test]
    fn sine_dominant_frequency() {
        let p = generate::<f64>(ProfileKind::Sine, 300.0, 0.1, 0.1, 0).unwrap();
        let s = spectral_summary(&p).unwrap();
        for a in &s.axes {
            assert!(
                (a.dominant[0] - 0.05).abs() <= a.resolution,
                "{:?}",
                a.dominant
            );
            assert!(a.bandwidth <= 2.0 * a.resolution);
        }
    }

    #[test]
    fn zero_signal_has_empty_summary() {
        let p = ExcitationProfile::<f64>::zeros(30.0, 0.1).unwrap();
        let s = spectral_summary(&p).unwrap();
        for a in &s.axes {
            assert!(a.dominant.is_empty());
            assert_eq!(a.bandwidth, 0.0);
        }
    }

    #[test]
    fn chirp_is_broadband() {
        let p = generate::<f64>(ProfileKind::Chirp, 300.0, 0.1, 0.1, 0).unwrap();
        for a in &spectral_summary(&p).unwrap().axes {
            assert!(a.bandwidth >= 0.4, "bandwidth {}", a.bandwidth);
        }
    }

    #[test]
    fn multisine_and_sine3axis_harmonics() {
        let p = generate::<f64>(ProfileKind::MultiSine, 300.0, 0.1, 0.1, 0).unwrap();
        for a in &spectral_summary(&p).unwrap().axes {
            let mut f = a.dominant.clone();
            f.sort_by(f64::total_cmp);
            f.dedup_by(|x, y| (*x - *y).abs() < 2.0 * a.resolution);
            assert!(f.len() >= 3, "{f:?}");
        }
        let p = generate::<f64>(ProfileKind::Sine3Axis, 300.0, 0.1, 0.1, 0).unwrap();
        let s = spectral_summary(&p).unwrap();
        let f: Vec<f64> = s.axes.iter().map(|a| a.dominant[0]).collect();
        assert!(
            (f[0] - f[1]).abs() > 0.01 && (f[1] - f[2]).abs() > 0.01 && (f[0] - f[2]).abs() > 0.01
        );
    }

    #[test]
    fn empty_profile_rejected() {
        let p = ExcitationProfile::<f64> {
            kind: None,
            samples: vec![],
            dt: 0.1,
            duration: 0.0,
            seed: 0,
        };
        assert!(spectral_summary(&p).is_err());
    }
}
