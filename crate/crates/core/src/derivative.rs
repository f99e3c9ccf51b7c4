//! Central differences with Richardson extrapolation.
//!
//! Every `lim_{x -> 0} d/dx` in the timing code goes through [`central`]. The
//! probe steps come from a [`DerivativeSpec`] scaled by a problem-specific
//! scale; when the extrapolation table has not settled the steps are shrunk
//! and the table rebuilt.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probe schedule for a derivative at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DerivativeSpec {
    /// Relative probe steps, strictly decreasing.
    pub steps: Vec<f64>,
    /// Order of the base central difference: 2 or 4.
    pub order: u32,
    pub richardson_levels: usize,
    /// Accepted relative error of the extrapolated value.
    pub tolerance: f64,
    /// How many times the whole schedule may be shrunk by `REFINE_FACTOR`.
    pub max_refinements: u32,
}

const REFINE_FACTOR: f64 = 8.0;

impl Default for DerivativeSpec {
    fn default() -> Self {
        Self {
            steps: vec![1e-2, 5e-3, 2.5e-3],
            order: 2,
            richardson_levels: 2,
            tolerance: 1e-7,
            max_refinements: 4,
        }
    }
}

impl DerivativeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps.len() < 2 {
            return Err(Error::Validation("derivative spec needs at least 2 steps".into()));
        }
        if self.steps.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::Validation("derivative steps must be positive and finite".into()));
        }
        if self.steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Validation("derivative steps must be strictly decreasing".into()));
        }
        if self.order != 2 && self.order != 4 {
            return Err(Error::Validation(format!(
                "unsupported difference order {}",
                self.order
            )));
        }
        if self.richardson_levels >= self.steps.len() {
            return Err(Error::Validation(format!(
                "{} Richardson levels need at least {} steps",
                self.richardson_levels,
                self.richardson_levels + 1
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation("derivative tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Same schedule with every step halved.
    pub fn halved(&self) -> Self {
        Self {
            steps: self.steps.iter().map(|h| h / 2.0).collect(),
            ..self.clone()
        }
    }
}

/// An extrapolated derivative with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
    /// Smallest absolute probe step used.
    pub step: f64,
    pub refinements: u32,
}

fn base_difference<F>(f: &mut F, h: f64, order: u32, fmax: &mut f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("probe value at {x}")));
        }
        *fmax = fmax.max(v.abs());
        Ok(v)
    };
    match order {
        2 => Ok((eval(h)? - eval(-h)?) / (2.0 * h)),
        _ => {
            let (p1, m1, p2, m2) = (eval(h)?, eval(-h)?, eval(2.0 * h)?, eval(-2.0 * h)?);
            Ok((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h))
        }
    }
}

fn richardson<F>(f: &mut F, scale: f64, spec: &DerivativeSpec) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let hs: Vec<f64> = spec.steps.iter().map(|s| s * scale).collect();
    let mut fmax: f64 = 0.0;
    let mut table: Vec<Vec<f64>> = vec![Vec::with_capacity(hs.len())];
    for &h in &hs {
        table[0].push(base_difference(f, h, spec.order, &mut fmax)?);
    }
    for level in 1..=spec.richardson_levels {
        let p = (spec.order + 2 * (level as u32 - 1)) as i32;
        let prev = &table[level - 1];
        let row: Vec<f64> = (0..prev.len() - 1)
            .map(|i| {
                let ratio = (hs[i] / hs[i + level]).powi(p);
                prev[i + 1] + (prev[i + 1] - prev[i]) / (ratio - 1.0)
            })
            .collect();
        table.push(row);
    }
    let top = *table[spec.richardson_levels].last().unwrap();
    let below = *table[spec.richardson_levels - 1].last().unwrap();
    let h_min = *hs.last().unwrap();
    let roundoff = 16.0 * f64::EPSILON * fmax.max(f64::MIN_POSITIVE) / h_min;
    let error = (top - below).abs().max(roundoff);
    Ok((top, error, h_min))
}

/// `f'(0)` from probes `f(+-h)`. `scale` converts the relative steps of `spec`
/// into absolute ones.
pub fn central<F>(mut f: F, scale: f64, spec: &DerivativeSpec) -> Result<Derivative>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Validation(format!(
            "derivative scale must be positive, got {scale}"
        )));
    }
    let mut scale = scale;
    let mut last: Option<(f64, f64, f64)> = None;
    let mut last_err: Option<Error> = None;
    for refinements in 0..=spec.max_refinements {
        match richardson(&mut f, scale, spec) {
            Ok((value, error, step)) => {
                if error <= spec.tolerance * value.abs() || error <= 64.0 * f64::EPSILON * value.abs().max(1.0) {
                    return Ok(Derivative {
                        value,
                        error,
                        step,
                        refinements,
                    });
                }
                last = Some((value, error, step));
            }
            // a phase jump can disappear at smaller steps; anything else is final
            Err(e @ Error::PhaseJump { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        scale /= REFINE_FACTOR;
    }
    match (last, last_err) {
        (Some((value, error, step)), _) => Err(Error::DerivativeFailure { value, error, step }),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one attempt is made"),
    }
}
