//! Moments, histograms, spectra and relaxation fits.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub mean: f64,
    /// Population (1/n) standard deviation.
    pub std: f64,
    /// Third central moment over std³; `None` when std = 0.
    pub skewness: Option<f64>,
    pub n_samples: usize,
}

pub fn moments(samples: &[f64]) -> Result<MomentSet> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &x in samples {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= nf;
    m3 /= nf;
    let std = m2.sqrt();
    let skewness = (n >= 3 && std > 0.0).then(|| m3 / (std * std * std));
    Ok(MomentSet {
        mean,
        std,
        skewness,
        n_samples: n,
    })
}

/// Unit-mass histogram over `[lo, hi)` with equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Samples outside the range.
    pub outside: u64,
}

impl Histogram {
    pub fn empty(bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidInput(
                "histogram needs at least one bin".into(),
            ));
        }
        if !(hi > lo) {
            return Err(Error::EmptyRange(lo, hi));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0; bins],
            outside: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / self.bins() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edge(i) + self.edge(i + 1))
    }

    pub fn add(&mut self, x: f64) {
        if x >= self.lo && x < self.hi {
            let last = self.bins() - 1;
            let i = ((x - self.lo) / self.width()) as usize;
            self.counts[i.min(last)] += 1;
        } else {
            self.outside += 1;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Probability mass per bin.
    pub fn masses(&self) -> Vec<f64> {
        let t = self.total() as f64;
        if t == 0.0 {
            return vec![0.0; self.bins()];
        }
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    /// Density per unit of the binned variable.
    pub fn density(&self) -> Vec<f64> {
        let w = self.width();
        self.masses().into_iter().map(|m| m / w).collect()
    }
}

pub fn histogram(samples: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    let mut h = Histogram::empty(bins, lo, hi)?;
    for &x in samples {
        h.add(x);
    }
    Ok(h)
}

/// Half the L¹ distance between two probability mass vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Periodogram {
    /// Angular frequencies (rad/s), ascending, excluding zero.
    pub omega: Vec<f64>,
    /// One-sided power per unit angular frequency; Σ P Δω ≈ variance.
    pub power: Vec<f64>,
    pub band: (f64, f64),
    pub slope: f64,
    pub slope_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchOptions {
    pub segments: usize,
    pub overlap: f64,
}

impl Default for WelchOptions {
    fn default() -> Self {
        Self {
            segments: 8,
            overlap: 0.5,
        }
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Welch spectral estimate, one-sided in ω.
pub fn welch(path: &[f64], sample_dt: f64, opts: WelchOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    if path.len() < 1024 {
        return Err(Error::InsufficientSamples {
            needed: 1024,
            got: path.len(),
        });
    }
    if opts.segments == 0 || !(0.0..1.0).contains(&opts.overlap) {
        return Err(Error::InvalidInput("invalid Welch options".into()));
    }
    let k = opts.segments as f64;
    // n + (K−1)(1−overlap)n = len
    let seg = (path.len() as f64 / (1.0 + (k - 1.0) * (1.0 - opts.overlap))).floor() as usize;
    let hop = if opts.segments > 1 {
        ((seg as f64) * (1.0 - opts.overlap)).round() as usize
    } else {
        seg
    };
    let win = hann(seg);
    let wss: f64 = win.iter().map(|w| w * w).sum();
    let mut planner = FftPlanner::<f64>::new();
    let fft: Arc<dyn Fft<f64>> = planner.plan_fft_forward(seg);
    let half = seg / 2;
    let mut acc = vec![0.0; half + 1];
    let mut buf = vec![rustfft::num_complex::Complex64::new(0.0, 0.0); seg];
    let mut used = 0usize;
    let mut start = 0;
    while used < opts.segments && start + seg <= path.len() {
        let s = &path[start..start + seg];
        let mean = s.iter().sum::<f64>() / seg as f64;
        for (b, (x, w)) in buf.iter_mut().zip(s.iter().zip(&win)) {
            *b = rustfft::num_complex::Complex64::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        used += 1;
        start += hop;
    }
    let dw = 2.0 * PI / (seg as f64 * sample_dt);
    // Two-sided periodogram per unit ω: |X|² dt / (2π Σw²); fold negative ω.
    let scale = sample_dt / (2.0 * PI * wss * used as f64);
    let mut omega = Vec::with_capacity(half);
    let mut power = Vec::with_capacity(half);
    for (i, a) in acc.iter().enumerate().skip(1) {
        let fold = if 2 * i == seg { 1.0 } else { 2.0 };
        omega.push(i as f64 * dw);
        power.push(a * scale * fold);
    }
    Ok((omega, power))
}

/// Least-squares slope of log P against log ω over `band`, with its
/// standard error.
pub fn loglog_slope(omega: &[f64], power: &[f64], band: (f64, f64)) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = omega
        .iter()
        .zip(power)
        .filter(|(w, p)| **w >= band.0 && **w <= band.1 && **p > 0.0)
        .map(|(w, p)| (w.ln(), p.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::UnresolvableBand {
            lo: band.0,
            hi: band.1,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    Ok((slope, (rss / (n - 2.0) / sxx).sqrt()))
}

/// Welch periodogram with the log-log slope fitted over `band` (rad/s).
pub fn periodogram(
    path: &[f64],
    sample_dt: f64,
    band: (f64, f64),
    opts: WelchOptions,
) -> Result<Periodogram> {
    let (omega, power) = welch(path, sample_dt, opts)?;
    let lo = omega[0];
    let hi = *omega.last().expect("non-empty");
    if !(band.0 < band.1 && band.0 >= lo * (1.0 - 1e-12) && band.1 <= hi * (1.0 + 1e-12)) {
        return Err(Error::UnresolvableBand {
            lo: band.0,
            hi: band.1,
        });
    }
    let (slope, slope_stderr) = loglog_slope(&omega, &power, band)?;
    Ok(Periodogram {
        omega,
        power,
        band,
        slope,
        slope_stderr,
    })
}

/// Default fit band `[3/τ, Nyquist/4]` for a relaxation-time estimate τ.
pub fn default_band(tau: f64, sample_dt: f64) -> (f64, f64) {
    (3.0 / tau, PI / sample_dt / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationFit {
    pub alpha: f64,
    pub t_s: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Fits m(t) = T_S + (m(t₀) − T_S) e^{−α(t−t₀)} on `[t0, t1]`.
///
/// For fixed α the model is linear in T_S, so the fit reduces to a
/// one-dimensional search over log α.
pub fn fit_relaxation(times: &[f64], mean: &[f64], t0: f64, t1: f64) -> Result<RelaxationFit> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(mean)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(t, m)| (*t, *m))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientSamples {
            needed: 4,
            got: pts.len(),
        });
    }
    let (ta, ma) = pts[0];
    let span = pts.last().expect("non-empty").0 - ta;
    // Model: m = T_S (1 − e) + m0 e with e = e^{−α(t−ta)}.
    let solve = |alpha: f64| -> (f64, f64) {
        let (mut num, mut den) = (0.0, 0.0);
        for &(t, m) in &pts {
            let e = (-alpha * (t - ta)).exp();
            let f = 1.0 - e;
            num += f * (m - ma * e);
            den += f * f;
        }
        let ts = if den > 0.0 { num / den } else { ma };
        let rss = pts
            .iter()
            .map(|&(t, m)| {
                let e = (-alpha * (t - ta)).exp();
                (m - ts * (1.0 - e) - ma * e).powi(2)
            })
            .sum();
        (ts, rss)
    };
    let dt_min = pts
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);
    let (mut a, mut b) = ((0.01 / span).ln(), (10.0 / dt_min).ln());
    // Coarse scan to bracket the global minimum, then golden section.
    let scan = 200;
    let mut best = (f64::INFINITY, 0);
    for i in 0..=scan {
        let la = a + (b - a) * i as f64 / scan as f64;
        let r = solve(la.exp()).1;
        if r < best.0 {
            best = (r, i);
        }
    }
    let step = (b - a) / scan as f64;
    let centre = a + step * best.1 as f64;
    a = centre - step;
    b = centre + step;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (solve(c.exp()).1, solve(d.exp()).1);
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = solve(c.exp()).1;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = solve(d.exp()).1;
        }
    }
    let alpha = (0.5 * (a + b)).exp();
    let (t_s, rss) = solve(alpha);
    if !(alpha.is_finite() && t_s.is_finite()) {
        return Err(Error::FitFailed("non-finite estimate".into()));
    }
    if best.1 == 0 || best.1 == scan {
        return Err(Error::FitFailed(format!(
            "rate at the edge of the search range ({alpha:e} 1/s)"
        )));
    }
    Ok(RelaxationFit {
        alpha,
        t_s,
        residual: (rss / pts.len() as f64).sqrt(),
    })
}
