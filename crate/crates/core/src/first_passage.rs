//! First detection on a tight-binding chain under stroboscopic measurement.
//!
//! `H = -J sum_j (|j><j+1| + h.c.)` with hard walls. The chain's eigenvectors
//! are known in closed form, so the unitary step `exp(-iH tau)` is applied as
//! a phase in the eigenbasis.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub hopping: f64,
    pub initial_site: usize,
    pub detector_sites: Vec<usize>,
    /// Interval between measurements.
    pub tau: f64,
    pub n_steps: usize,
}

impl LatticeSpec {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n_sites < 3 {
            problems.push(format!("n_sites = {} < 3", self.n_sites));
        }
        if !(self.hopping > 0.0 && self.hopping.is_finite()) {
            problems.push(format!("hopping = {} must be positive", self.hopping));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            problems.push(format!("tau = {} must be positive", self.tau));
        }
        if self.n_steps == 0 {
            problems.push("n_steps must be at least 1".into());
        }
        if self.initial_site >= self.n_sites {
            problems.push(format!("initial_site {} out of range", self.initial_site));
        }
        if self.detector_sites.is_empty() {
            problems.push("detector_sites is empty".into());
        }
        for &d in &self.detector_sites {
            if d >= self.n_sites {
                problems.push(format!("detector site {d} out of range"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems.join("; ")))
        }
    }

    /// Same chain with initial and detector sites reflected about the centre.
    pub fn mirrored(&self) -> Self {
        let m = |j: usize| self.n_sites - 1 - j;
        Self {
            initial_site: m(self.initial_site),
            detector_sites: self.detector_sites.iter().map(|&d| m(d)).collect(),
            ..self.clone()
        }
    }
}

/// Outcome of a stroboscopic run; index `i` is measurement `n = i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    /// First-detection probability at each measurement.
    pub detection: Vec<f64>,
    /// Probability of no detection through each measurement.
    pub survival: Vec<f64>,
    /// `sum_{m <= n} p(m) + S(n)`.
    pub bookkeeping: Vec<f64>,
}

impl DetectionRecord {
    pub fn len(&self) -> usize {
        self.survival.len()
    }

    pub fn is_empty(&self) -> bool {
        self.survival.is_empty()
    }
}

/// Nearest-neighbour hopping matrix with hard walls.
pub fn hopping_matrix(n_sites: usize, hopping: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n_sites, n_sites, |i, j| if i.abs_diff(j) == 1 { -hopping } else { 0.0 })
}

/// Orthonormal eigenvectors (columns) and eigenvalues of [`hopping_matrix`].
pub fn chain_eigensystem(n_sites: usize, hopping: f64) -> (DMatrix<f64>, Vec<f64>) {
    let np1 = (n_sites + 1) as f64;
    let norm = (2.0 / np1).sqrt();
    let v = DMatrix::from_fn(n_sites, n_sites, |j, m| {
        norm * (PI * ((j + 1) * (m + 1)) as f64 / np1).sin()
    });
    let e = (1..=n_sites)
        .map(|m| -2.0 * hopping * (PI * m as f64 / np1).cos())
        .collect();
    (v, e)
}

/// Unitary propagation by a fixed interval in the chain eigenbasis.
pub struct ChainPropagator {
    basis: DMatrix<f64>,
    phases: Vec<C64>,
}

impl ChainPropagator {
    pub fn new(n_sites: usize, hopping: f64, tau: f64) -> Self {
        let (basis, e) = chain_eigensystem(n_sites, hopping);
        let phases = e.iter().map(|&ev| C64::from_polar(1.0, -ev * tau)).collect();
        Self { basis, phases }
    }

    /// `psi <- exp(-iH tau) psi`, with `psi` split into real and imaginary parts.
    pub fn apply(&self, re: &mut DVector<f64>, im: &mut DVector<f64>) {
        let cr = self.basis.tr_mul(re);
        let ci = self.basis.tr_mul(im);
        let (mut rr, mut ri) = (cr.clone(), ci.clone());
        for (m, p) in self.phases.iter().enumerate() {
            let z = C64::new(cr[m], ci[m]) * p;
            rr[m] = z.re;
            ri[m] = z.im;
        }
        *re = &self.basis * rr;
        *im = &self.basis * ri;
    }
}

/// Alternate unitary steps and projective detection.
pub fn evolve_project(spec: &LatticeSpec) -> Result<DetectionRecord> {
    spec.validate()?;
    let n = spec.n_sites;
    let prop = ChainPropagator::new(n, spec.hopping, spec.tau);
    let mut re = DVector::zeros(n);
    let mut im = DVector::zeros(n);
    re[spec.initial_site] = 1.0;
    let mut rec = DetectionRecord {
        detection: Vec::with_capacity(spec.n_steps),
        survival: Vec::with_capacity(spec.n_steps),
        bookkeeping: Vec::with_capacity(spec.n_steps),
    };
    let mut detected = 0.0;
    for _ in 0..spec.n_steps {
        prop.apply(&mut re, &mut im);
        let mut p = 0.0;
        for &d in &spec.detector_sites {
            p += re[d] * re[d] + im[d] * im[d];
            re[d] = 0.0;
            im[d] = 0.0;
        }
        let s = re.norm_squared() + im.norm_squared();
        detected += p;
        rec.detection.push(p);
        rec.survival.push(s);
        rec.bookkeeping.push(detected + s);
    }
    Ok(rec)
}

/// Survival `||psi(n tau)||^2` under `H - i gamma sum_d |d><d|`, for `n = 1..=n_steps`.
pub fn evolve_nonhermitian(spec: &LatticeSpec, gamma: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Validation(format!("gamma = {gamma} must be positive")));
    }
    let n = spec.n_sites;
    let mut h: DMatrix<C64> = hopping_matrix(n, spec.hopping).map(|x| C64::new(x, 0.0));
    for &d in &spec.detector_sites {
        h[(d, d)] -= C64::new(0.0, gamma);
    }
    let u = (h * C64::new(0.0, -spec.tau)).exp();
    let mut psi = DVector::from_element(n, C64::new(0.0, 0.0));
    psi[spec.initial_site] = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(spec.n_steps);
    for _ in 0..spec.n_steps {
        psi = &u * psi;
        out.push(psi.norm_squared());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual of `ln S` about the fitted line.
    pub residual: f64,
}

/// Least-squares slope of `ln S(n)` against `ln n`. `window` indexes the
/// series, whose element `i` belongs to step `n = i + 1`.
pub fn fit_power_law(series: &[f64], window: Range<usize>) -> Result<PowerLawFit> {
    if window.len() < 2 || window.end > series.len() {
        return Err(Error::Validation(format!(
            "window {window:?} needs at least 2 points inside a series of {}",
            series.len()
        )));
    }
    if let Some(i) = window.clone().find(|&i| !(series[i] > 0.0)) {
        return Err(Error::Validation(format!(
            "series[{i}] = {} is not positive",
            series[i]
        )));
    }
    let pts: Vec<(f64, f64)> = window.map(|i| (((i + 1) as f64).ln(), series[i].ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(PowerLawFit {
        exponent,
        intercept,
        residual,
    })
}

/// Last step before the front launched away from a detector (speed `2J`)
/// can bounce off the far wall and come back to it.
pub fn recurrence_step(spec: &LatticeSpec) -> usize {
    let n = spec.n_sites as f64;
    let x0 = spec.initial_site as f64;
    let via_right = |d: f64| (n - x0) + (n - d);
    let via_left = |d: f64| (x0 + 1.0) + (d + 1.0);
    let shortest = spec
        .detector_sites
        .iter()
        .map(|&d| {
            let df = d as f64;
            match d.cmp(&spec.initial_site) {
                std::cmp::Ordering::Less => via_right(df),
                std::cmp::Ordering::Greater => via_left(df),
                std::cmp::Ordering::Equal => via_right(df).min(via_left(df)),
            }
        })
        .fold(f64::INFINITY, f64::min);
    ((shortest / (2.0 * spec.hopping * spec.tau)).floor() as usize).min(spec.n_steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZenoPoint {
    pub tau: f64,
    pub steps: usize,
    pub survival: f64,
}

/// Survival at `t_fixed` for each measurement interval, `n = round(t_fixed / tau)`.
pub fn zeno_scan(spec: &LatticeSpec, taus: &[f64], t_fixed: f64) -> Result<Vec<ZenoPoint>> {
    if let Some(t) = taus.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::Validation(format!("tau = {t} must be positive")));
    }
    taus.iter()
        .map(|&tau| {
            let steps = ((t_fixed / tau).round() as usize).max(1);
            let rec = evolve_project(&LatticeSpec {
                tau,
                n_steps: steps,
                ..spec.clone()
            })?;
            Ok(ZenoPoint {
                tau,
                steps,
                survival: *rec.survival.last().unwrap(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaMatch {
    pub gamma: f64,
    /// Largest relative survival difference over the window.
    pub max_relative_difference: f64,
}

/// The absorbing strength from `gammas` whose survival best tracks the
/// projective run over `window`, with every candidate's mismatch.
pub fn calibrate_gamma(
    spec: &LatticeSpec,
    gammas: &[f64],
    window: Range<usize>,
) -> Result<(GammaMatch, Vec<GammaMatch>)> {
    let proj = evolve_project(spec)?;
    if window.is_empty() || window.end > proj.len() {
        return Err(Error::Validation(format!(
            "window {window:?} outside 0..{}",
            proj.len()
        )));
    }
    let scan: Vec<GammaMatch> = gammas
        .iter()
        .map(|&g| {
            let s = evolve_nonhermitian(spec, g)?;
            let worst = window
                .clone()
                .map(|i| (s[i] - proj.survival[i]).abs() / proj.survival[i])
                .fold(0.0, f64::max);
            Ok(GammaMatch {
                gamma: g,
                max_relative_difference: worst,
            })
        })
        .collect::<Result<_>>()?;
    let best = *scan
        .iter()
        .min_by(|a, b| a.max_relative_difference.total_cmp(&b.max_relative_difference))
        .ok_or_else(|| Error::Validation("no gamma candidates".into()))?;
    Ok((best, scan))
}
