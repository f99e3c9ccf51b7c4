//! Traversal, dwell and sojourn timescales.
//!
//! All times are in natural units (hbar = 1, 2m = 1): a free particle of
//! energy `E` moves at speed `2 sqrt(E)`. Limits of vanishing clock strength
//! are realised with [`crate::derivative::central`].
//!
//! Sign conventions: an absorbing potential (`v_imag > 0`) lowers `ln|T|^2`, so
//! the imaginary-potential clock uses `tau = -(1/2) d ln|T|^2 / dV_I`, which is
//! positive for free propagation. Larmor precession follows
//! `<S_y> = -(1/2) omega_L tau_y` and rotation `<S_z> = (1/2) omega_L tau_z`.

mod registry;

use std::ops::Range;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::derivative::{central, Derivative, DerivativeSpec};
use crate::error::{Error, Result};
use crate::potentials::{ensure_valid, ClockKind, PotentialProfile};
use crate::quadrature::adaptive_simpson;
use crate::scatter::{dressed_scattering, partial_waves, solve, solve_spinor, Dressing, ScatteringSolution, Zeeman};

pub use registry::{
    full_report, BlMethod, DwellMethod, Estimate, ImagClockMethod, LarmorPythagoreanMethod, LarmorYMethod,
    LarmorZMethod, MethodRegistry, Query, SojournMethod, TimeMethod, WignerMethod,
};

/// Amplitudes below this magnitude make logarithmic derivatives singular.
pub const SINGULAR_AMPLITUDE: f64 = 1e-8;

/// Largest phase change accepted between a probe and the centre point.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Transmission,
    Reflection,
    Unconditional,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Transmission => "transmission",
            Channel::Reflection => "reflection",
            Channel::Unconditional => "unconditional",
        }
    }
}

/// A time together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeValue {
    pub value: f64,
    pub error: f64,
    /// Smallest probe step of the derivative, if one was taken.
    pub step: Option<f64>,
}

impl From<Derivative> for TimeValue {
    fn from(d: Derivative) -> Self {
        Self {
            value: d.value,
            error: d.error,
            step: Some(d.step),
        }
    }
}

impl TimeValue {
    fn scaled(d: Derivative, factor: f64) -> Self {
        Self {
            value: d.value * factor,
            error: d.error * factor.abs(),
            step: Some(d.step),
        }
    }
}

/// Segments the timing methods act on: the clock region, or the whole
/// profile when no clock region is set.
pub fn timing_region(profile: &PotentialProfile) -> Range<usize> {
    if profile.clock_region.is_empty() {
        0..profile.segments.len()
    } else {
        profile.clock_region.clone()
    }
}

/// `max(E, |V - E|)` over the timing region; sets the probe step scale.
pub fn energy_scale(profile: &PotentialProfile, energy: f64) -> f64 {
    profile.segments[timing_region(profile)]
        .iter()
        .map(|s| (s.v_real - energy).abs())
        .fold(energy.abs(), f64::max)
        .max(f64::MIN_POSITIVE)
}

fn channel_amplitude(sol: &ScatteringSolution, channel: Channel, method: &'static str) -> Result<C64> {
    match channel {
        Channel::Transmission => Ok(sol.t),
        Channel::Reflection => Ok(sol.r),
        Channel::Unconditional => Err(Error::UnsupportedChannel {
            method,
            channel: channel.as_str(),
        }),
    }
}

fn nonsingular(z: C64, name: &'static str) -> Result<C64> {
    if z.norm() < SINGULAR_AMPLITUDE {
        Err(Error::LogSingularity {
            amplitude: name,
            magnitude: z.norm(),
        })
    } else {
        Ok(z)
    }
}

/// Continuous phase of `z` relative to `reference`, rejecting large jumps.
fn phase_from(z: C64, reference: C64, step: f64) -> Result<f64> {
    let jump = (z / reference).arg();
    if jump.abs() > MAX_PHASE_STEP {
        return Err(Error::PhaseJump { jump, step });
    }
    Ok(jump)
}

fn amp_name(channel: Channel) -> &'static str {
    match channel {
        Channel::Transmission => "T",
        _ => "R",
    }
}

/// Wigner delay `d Arg(t or r) / dE`.
pub fn wigner_delay(
    profile: &PotentialProfile,
    energy: f64,
    channel: Channel,
    spec: &DerivativeSpec,
) -> Result<TimeValue> {
    ensure_valid(profile)?;
    let name = amp_name(channel);
    let centre = nonsingular(channel_amplitude(&solve(profile, energy)?, channel, "wigner")?, name)?;
    // keep every probe energy above both leads
    let lead = profile.left.v_real.max(profile.right.v_real);
    let headroom = (energy - lead) / (4.0 * spec.steps[0]);
    let scale = energy_scale(profile, energy).min(headroom);
    let d = central(
        |h| {
            let z = channel_amplitude(&solve(profile, energy + h)?, channel, "wigner")?;
            phase_from(nonsingular(z, name)?, centre, h)
        },
        scale,
        spec,
    )?;
    Ok(d.into())
}

/// Smith dwell time `(1/J) int |psi|^2 dx` over `region` for unit incidence.
pub fn dwell_time(profile: &PotentialProfile, energy: f64, region: Range<usize>) -> Result<TimeValue> {
    ensure_valid(profile)?;
    if region.is_empty() || region.end > profile.segments.len() {
        return Err(Error::Precondition {
            method: "dwell",
            reason: format!("region {region:?} is empty or out of range"),
        });
    }
    if let Some((i, _)) = profile.segments[region.clone()]
        .iter()
        .enumerate()
        .find(|(_, s)| !s.is_real())
    {
        return Err(Error::Precondition {
            method: "dwell",
            reason: format!(
                "segment {} is not real; dwell time needs a Hermitian region",
                region.start + i
            ),
        });
    }
    let sol = solve(profile, energy)?;
    let flux = sol.incident_flux();
    if flux == 0.0 {
        return Err(Error::ZeroFlux);
    }
    let xs = profile.boundaries();
    let (mut total, mut err) = (0.0, 0.0);
    for j in region {
        let (a, b) = (xs[j], xs[j + 1]);
        let scale = sol
            .field_at(a)?
            .0
            .norm_sqr()
            .max(sol.field_at_side(b, false)?.0.norm_sqr());
        let (v, e) = adaptive_simpson(
            |x| {
                sol.field_at_side(x, false)
                    .map(|(p, _)| p.norm_sqr())
                    .unwrap_or(f64::NAN)
            },
            a,
            b,
            1e-14 * scale.max(1e-300) * (b - a).max(1.0),
            50,
        );
        total += v;
        err += e;
    }
    Ok(TimeValue {
        value: total / flux,
        error: err / flux,
        step: None,
    })
}

/// Buttiker-Landauer traversal time summed segment by segment: `d / (2 kappa)`
/// below the local barrier top and the classical crossing time `d / (2 k)` above it.
pub fn bl_time(profile: &PotentialProfile, energy: f64, region: Range<usize>) -> Result<TimeValue> {
    ensure_valid(profile)?;
    if region.is_empty() || region.end > profile.segments.len() {
        return Err(Error::Precondition {
            method: "bl",
            reason: format!("region {region:?} is empty or out of range"),
        });
    }
    let mut total = 0.0;
    for j in region {
        let s = &profile.segments[j];
        let gap = (s.v_real - energy).abs();
        if gap == 0.0 {
            return Err(Error::DivergentIntegrand { segment: j });
        }
        total += s.length / (2.0 * gap.sqrt());
    }
    Ok(TimeValue {
        value: total,
        error: 0.0,
        step: None,
    })
}

/// Larmor precession and rotation times for one scattering channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LarmorPair {
    /// `|2 d<S_y>/d omega_L|`.
    pub tau_y: TimeValue,
    /// Sign of `-2 d<S_y>/d omega_L` before taking the magnitude.
    pub tau_y_sign: f64,
    /// `2 d<S_z>/d omega_L`.
    pub tau_z: TimeValue,
}

impl LarmorPair {
    pub fn pythagorean(&self) -> TimeValue {
        let (y, z) = (self.tau_y.value, self.tau_z.value);
        let v = y.hypot(z);
        let error = if v > 0.0 {
            (y.abs() * self.tau_y.error + z.abs() * self.tau_z.error) / v
        } else {
            self.tau_y.error + self.tau_z.error
        };
        TimeValue {
            value: v,
            error,
            step: self.tau_y.step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LarmorTimes {
    pub transmission: LarmorPair,
    pub reflection: Option<LarmorPair>,
}

/// `<S_y>` and `<S_z>` (hbar = 1) of the spinor `(a, b)/sqrt(2)` produced by
/// an x-polarised incident particle.
pub fn spin_expectations(a: C64, b: C64) -> (f64, f64) {
    let n = a.norm_sqr() + b.norm_sqr();
    ((a.conj() * b).im / n, 0.5 * (a.norm_sqr() - b.norm_sqr()) / n)
}

fn larmor_pair(profile: &PotentialProfile, energy: f64, spec: &DerivativeSpec, channel: Channel) -> Result<LarmorPair> {
    let scale = energy_scale(profile, energy);
    let name = amp_name(channel);
    let spins = |omega: f64| -> Result<(f64, f64)> {
        let a = solve_spinor(&profile.with_signed_clock(ClockKind::Larmor, omega), energy)?;
        let (p, m) = match channel {
            Channel::Transmission => (a.t_plus, a.t_minus),
            _ => (a.r_plus, a.r_minus),
        };
        Ok(spin_expectations(nonsingular(p, name)?, nonsingular(m, name)?))
    };
    let dy = central(|w| spins(w).map(|s| s.0), scale, spec)?;
    let dz = central(|w| spins(w).map(|s| s.1), scale, spec)?;
    let raw_y = TimeValue::scaled(dy, -2.0);
    Ok(LarmorPair {
        tau_y: TimeValue {
            value: raw_y.value.abs(),
            ..raw_y
        },
        tau_y_sign: if raw_y.value < 0.0 { -1.0 } else { 1.0 },
        tau_z: TimeValue::scaled(dz, 2.0),
    })
}

/// Larmor times with the field confined to the clock region.
pub fn larmor_times(profile: &PotentialProfile, energy: f64, spec: &DerivativeSpec) -> Result<LarmorTimes> {
    ensure_valid(profile)?;
    if profile.clock_region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    let transmission = larmor_pair(profile, energy, spec, Channel::Transmission)?;
    let reflection = larmor_pair(profile, energy, spec, Channel::Reflection).ok();
    Ok(LarmorTimes {
        transmission,
        reflection,
    })
}

/// Larmor times for a single channel.
pub fn larmor_channel(
    profile: &PotentialProfile,
    energy: f64,
    spec: &DerivativeSpec,
    channel: Channel,
) -> Result<LarmorPair> {
    ensure_valid(profile)?;
    if profile.clock_region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    if channel == Channel::Unconditional {
        return Err(Error::UnsupportedChannel {
            method: "larmor",
            channel: channel.as_str(),
        });
    }
    larmor_pair(profile, energy, spec, channel)
}

/// Imaginary-potential clock `-(1/2) d ln|T|^2 / dV_I` (or `|R|^2`) with the
/// absorber spread uniformly over the clock region.
pub fn imag_clock_time(
    profile: &PotentialProfile,
    energy: f64,
    spec: &DerivativeSpec,
    channel: Channel,
) -> Result<TimeValue> {
    ensure_valid(profile)?;
    if profile.clock_region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    let name = amp_name(channel);
    let scale = energy_scale(profile, energy);
    let d = central(
        |v| {
            let sol = solve(&profile.with_signed_clock(ClockKind::ImaginaryPotential, v), energy)?;
            let z = nonsingular(channel_amplitude(&sol, channel, "imag_clock")?, name)?;
            Ok(z.norm_sqr().ln())
        },
        scale,
        spec,
    )?;
    Ok(TimeValue::scaled(d, -0.5))
}

/// Whether a clocked segment carries a propagating or an evanescent wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Propagating,
    Evanescent,
}

/// Regime of segment `j`, keyed on the sign of `V0 - E`.
pub fn regime(profile: &PotentialProfile, energy: f64, j: usize) -> Result<Regime> {
    let v = profile.segments[j].v_real;
    if (v - energy).abs() <= 1e-12 * energy.abs().max(1.0) {
        return Err(Error::RegimeAmbiguity {
            energy,
            segment: j,
            potential: v,
        });
    }
    Ok(if energy > v {
        Regime::Propagating
    } else {
        Regime::Evanescent
    })
}

/// Transmission (or full reflection) amplitude with the clock region's
/// interfaces pinned at zero clock strength and the propagation factors
/// carrying the paired variable `xi = V_I L`.
pub fn dressed_transmission(profile: &PotentialProfile, energy: f64, xi: f64, channel: Channel) -> Result<C64> {
    if profile.clock_region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    let segs: Vec<usize> = profile.clock_region.clone().collect();
    let d = dressed_scattering(
        profile,
        energy,
        &segs,
        Dressing::Absorption,
        xi / profile.clock_length(),
    )?;
    channel_amplitude_dressed(d.t, d.r, channel)
}

fn channel_amplitude_dressed(t: C64, r: C64, channel: Channel) -> Result<C64> {
    match channel {
        Channel::Transmission => Ok(t),
        Channel::Reflection => Ok(r),
        Channel::Unconditional => Err(Error::UnsupportedChannel {
            method: "dressed_transmission",
            channel: channel.as_str(),
        }),
    }
}

/// Reflection off the stack left of the clock region, the partial wave that
/// never enters it.
pub fn prompt_reflection(profile: &PotentialProfile, energy: f64) -> Result<C64> {
    if profile.clock_region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    let segs: Vec<usize> = profile.clock_region.clone().collect();
    Ok(dressed_scattering(profile, energy, &segs, Dressing::Absorption, 0.0)?.r_prompt)
}

/// Sojourn time with flags describing how far the configuration strays from
/// a single uniform clock segment between real flanks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sojourn {
    pub time: TimeValue,
    pub evanescent: bool,
    pub extrapolated: bool,
}

/// Which clock realises the paired-variable limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SojournClock {
    ImaginaryPotential,
    Larmor,
}

/// Sojourn time of an arbitrary set of segments.
///
/// Segments are grouped by regime. Each group of total length `L_G` receives
/// `xi` spread in proportion to segment length; propagating groups contribute
/// `-(L_G/2) d ln|A|^2/dxi`, evanescent groups `L_G d Arg(A)/dxi`, where `A`
/// is `T` or the prompt-subtracted `R' = R - r12`. The Larmor variant uses the
/// precession (propagating) and rotation (evanescent) spin signals instead.
pub fn sojourn_over(
    profile: &PotentialProfile,
    energy: f64,
    segments: &[usize],
    channel: Channel,
    clock: SojournClock,
    spec: &DerivativeSpec,
) -> Result<Sojourn> {
    ensure_valid(profile)?;
    if segments.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    if channel == Channel::Unconditional {
        return Err(Error::UnsupportedChannel {
            method: "sojourn",
            channel: channel.as_str(),
        });
    }
    let mut sorted = segments.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if *sorted.last().unwrap() >= profile.segments.len() {
        return Err(Error::Validation(format!(
            "clock segment {} out of range",
            sorted.last().unwrap()
        )));
    }

    let mut groups: [(Regime, Vec<usize>); 2] = [(Regime::Propagating, vec![]), (Regime::Evanescent, vec![])];
    for &j in &sorted {
        match regime(profile, energy, j)? {
            Regime::Propagating => groups[0].1.push(j),
            Regime::Evanescent => groups[1].1.push(j),
        }
    }

    let scale = sorted
        .iter()
        .map(|&j| (profile.segments[j].v_real - energy).abs())
        .fold(energy.abs(), f64::max);
    let r_prompt = dressed_scattering(profile, energy, &sorted, Dressing::Absorption, 0.0)?.r_prompt;
    let name = amp_name(channel);

    let mut total = TimeValue {
        value: 0.0,
        error: 0.0,
        step: None,
    };
    for (reg, group) in groups.iter().filter(|(_, g)| !g.is_empty()) {
        let length: f64 = group.iter().map(|&j| profile.segments[j].length).sum();
        let amp = |dressing: Dressing, xi: f64| -> Result<C64> {
            let d = dressed_scattering(profile, energy, group, dressing, xi / length)?;
            let a = match channel {
                Channel::Transmission => d.t,
                _ => d.r - r_prompt,
            };
            nonsingular(a, name)
        };
        let tv = match clock {
            SojournClock::ImaginaryPotential => {
                let centre = amp(Dressing::Absorption, 0.0)?;
                match reg {
                    Regime::Propagating => {
                        let d = central(
                            |xi| Ok(amp(Dressing::Absorption, xi)?.norm_sqr().ln()),
                            scale * length,
                            spec,
                        )?;
                        TimeValue::scaled(d, -0.5 * length)
                    }
                    Regime::Evanescent => {
                        let d = central(
                            |xi| phase_from(amp(Dressing::Absorption, xi)?, centre, xi),
                            scale * length,
                            spec,
                        )?;
                        TimeValue::scaled(d, length)
                    }
                }
            }
            SojournClock::Larmor => {
                let spins = |xi: f64| -> Result<(f64, f64)> {
                    let p = amp(Dressing::Zeeman(Zeeman::Plus), xi)?;
                    let m = amp(Dressing::Zeeman(Zeeman::Minus), xi)?;
                    Ok(spin_expectations(p, m))
                };
                match reg {
                    Regime::Propagating => {
                        let d = central(|xi| spins(xi).map(|s| s.0), scale * length, spec)?;
                        TimeValue::scaled(d, -2.0 * length)
                    }
                    Regime::Evanescent => {
                        let d = central(|xi| spins(xi).map(|s| s.1), scale * length, spec)?;
                        TimeValue::scaled(d, 2.0 * length)
                    }
                }
            }
        };
        total.value += tv.value;
        total.error += tv.error;
        total.step = match (total.step, tv.step) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }

    let first = sorted[0];
    let contiguous = sorted.windows(2).all(|w| w[1] == w[0] + 1);
    let extrapolated = sorted.len() > 1
        || !contiguous
        || profile.segments[..first].iter().any(|s| !s.is_real())
        || sorted.iter().any(|&j| !profile.segments[j].is_real());
    Ok(Sojourn {
        time: total,
        evanescent: !groups[1].1.is_empty(),
        extrapolated,
    })
}

fn clock_indices(profile: &PotentialProfile) -> Result<Vec<usize>> {
    if profile.clock_region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    Ok(profile.clock_region.clone().collect())
}

/// Sojourn time for transmission through the clock region.
pub fn sojourn_transmission(profile: &PotentialProfile, energy: f64, spec: &DerivativeSpec) -> Result<Sojourn> {
    let segs = clock_indices(profile)?;
    sojourn_over(
        profile,
        energy,
        &segs,
        Channel::Transmission,
        SojournClock::ImaginaryPotential,
        spec,
    )
}

/// Sojourn time for reflection, timed on `R' = R - r12`.
pub fn sojourn_reflection(profile: &PotentialProfile, energy: f64, spec: &DerivativeSpec) -> Result<Sojourn> {
    let segs = clock_indices(profile)?;
    sojourn_over(
        profile,
        energy,
        &segs,
        Channel::Reflection,
        SojournClock::ImaginaryPotential,
        spec,
    )
}

/// Closed-form transmission sojourn time for a single uniform clock segment:
///
/// * above the barrier: `tau_BL (1 - |r21 r23|^2) / (1 + |r21 r23|^2 - 2 Re(r21 r23 e^{2 i k L}))`
/// * below the barrier: `tau_BL (1 - |r21 r23|^2 e^{-4 kappa L}) / (1 + |r21 r23|^2 e^{-4 kappa L} - 2 Re(r21 r23 e^{-2 kappa L}))`
pub fn sojourn_transmission_closed_form(profile: &PotentialProfile, energy: f64) -> Result<f64> {
    let pw = partial_waves(profile, energy)?;
    let c = profile.clock_region.start;
    let tau_bl = bl_time(profile, energy, c..c + 1)?.value;
    let rr = pw.r21 * pw.r23;
    let l = pw.length;
    let ratio = match regime(profile, energy, c)? {
        Regime::Propagating => {
            let k = pw.k_inner.re;
            let phase = C64::new(0.0, 2.0 * k * l).exp();
            (1.0 - rr.norm_sqr()) / (1.0 + rr.norm_sqr() - 2.0 * (rr * phase).re)
        }
        Regime::Evanescent => {
            let kappa = pw.k_inner.im;
            let d2 = (-2.0 * kappa * l).exp();
            let d4 = (-4.0 * kappa * l).exp();
            (1.0 - rr.norm_sqr() * d4) / (1.0 + rr.norm_sqr() * d4 - 2.0 * (rr * d2).re)
        }
    };
    Ok(ratio * tau_bl)
}

/// Closed-form reflection sojourn time `tau_s^(T) + tau_BL`.
pub fn sojourn_reflection_closed_form(profile: &PotentialProfile, energy: f64) -> Result<f64> {
    let c = profile.clock_region.start;
    Ok(sojourn_transmission_closed_form(profile, energy)? + bl_time(profile, energy, c..c + 1)?.value)
}

/// One timing method's outcome inside a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: Option<f64>,
    pub error: Option<f64>,
    pub step: Option<f64>,
    /// Why the value is absent.
    pub reason: Option<String>,
    pub note: Option<String>,
}

impl Entry {
    pub fn present(e: &Estimate) -> Self {
        Self {
            value: Some(e.time.value),
            error: Some(e.time.error),
            step: e.time.step,
            reason: None,
            note: e.note.clone(),
        }
    }

    pub fn absent(reason: impl Into<String>) -> Self {
        Self {
            value: None,
            error: None,
            step: None,
            reason: Some(reason.into()),
            note: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportFlags {
    pub evanescent_regime: bool,
    pub extrapolated_beyond_paper: bool,
}

/// Every registered timescale at one energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimescaleReport {
    pub energy: f64,
    pub channel: Channel,
    /// `(label, entry)` in registry order.
    pub entries: Vec<(String, Entry)>,
    pub flags: ReportFlags,
}

impl TimescaleReport {
    pub fn get(&self, label: &str) -> Option<&Entry> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, e)| e)
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        self.get(label).and_then(|e| e.value)
    }
}

/// Regime flags of the clock region at `energy`.
pub fn report_flags(profile: &PotentialProfile, energy: f64) -> ReportFlags {
    let region = timing_region(profile);
    let clock = &profile.segments[region.clone()];
    ReportFlags {
        evanescent_regime: clock.iter().any(|s| s.v_real > energy),
        extrapolated_beyond_paper: region.len() > 1
            || clock.iter().any(|s| !s.is_real())
            || profile.segments[..region.start].iter().any(|s| !s.is_real()),
    }
}

#[cfg(test)]
mod tests;
