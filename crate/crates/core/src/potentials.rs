//! Piecewise-constant complex potential landscapes.
//!
//! Units are natural throughout: hbar = 1 and 2m = 1, so a segment of height
//! `V` carries the wavevector `k = sqrt(E - V)`. A positive `v_imag` is an
//! absorbing potential: the effective potential is `v_real - i v_imag`, which
//! makes the flux of a wave decay while it crosses the segment under the
//! `exp(-iEt)` time convention.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One constant slab of the scattering landscape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub length: f64,
    pub v_real: f64,
    #[serde(default)]
    pub v_imag: f64,
    /// Larmor angular frequency applied in this segment.
    #[serde(default)]
    pub omega_larmor: f64,
}

impl Segment {
    pub fn new(length: f64, v_real: f64) -> Self {
        Self {
            length,
            v_real,
            v_imag: 0.0,
            omega_larmor: 0.0,
        }
    }

    pub fn is_real(&self) -> bool {
        self.v_imag == 0.0 && self.omega_larmor == 0.0
    }
}

/// Asymptotic region on one side of the profile. Incoming and outgoing plane
/// waves are only defined when it is real and unclocked.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lead {
    #[serde(default)]
    pub v_real: f64,
    #[serde(default)]
    pub v_imag: f64,
    #[serde(default)]
    pub omega_larmor: f64,
}

impl Lead {
    pub fn real(v: f64) -> Self {
        Self {
            v_real: v,
            ..Self::default()
        }
    }
}

/// Ordered segments on `[0, total_length]` with asymptotic leads on either side.
///
/// `clock_region` is a half-open index range into `segments`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub segments: Vec<Segment>,
    pub clock_region: Range<usize>,
    pub left: Lead,
    pub right: Lead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockKind {
    ImaginaryPotential,
    Larmor,
}

/// A clock attached to the clock region. `strength` is V_I or omega_L and
/// `paired_xi` is strength times the clock length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockSettings {
    pub kind: ClockKind,
    pub strength: f64,
    pub paired_xi: f64,
}

impl ClockSettings {
    /// Settings for `strength` applied over a clock region of length `clock_length`.
    pub fn new(kind: ClockKind, strength: f64, clock_length: f64) -> Self {
        Self {
            kind,
            strength,
            paired_xi: strength * clock_length,
        }
    }
}

/// A broken invariant reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Offending field, e.g. `segments[2].length`.
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl PotentialProfile {
    /// Profile from segments with zero asymptotic potentials and no clock region.
    pub fn new(segments: Vec<Segment>) -> Self {
        Self {
            segments,
            clock_region: 0..0,
            left: Lead::default(),
            right: Lead::default(),
        }
    }

    pub fn with_clock_region(mut self, region: Range<usize>) -> Self {
        self.clock_region = region;
        self
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Left edge coordinate of every segment plus the right edge of the last.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut xs = Vec::with_capacity(self.segments.len() + 1);
        let mut x = 0.0;
        xs.push(x);
        for s in &self.segments {
            x += s.length;
            xs.push(x);
        }
        xs
    }

    pub fn clock_segments(&self) -> &[Segment] {
        &self.segments[self.clock_region.clone()]
    }

    pub fn clock_length(&self) -> f64 {
        self.clock_segments().iter().map(|s| s.length).sum()
    }

    /// Concatenate `other` to the right of `self`. The clock region of `self` is kept.
    pub fn concat(&self, other: &PotentialProfile) -> PotentialProfile {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        PotentialProfile {
            segments,
            clock_region: self.clock_region.clone(),
            left: self.left,
            right: other.right,
        }
    }

    /// Set the clock field on the clock region with a signed strength. Probe
    /// evaluations use negative strengths for central differences.
    pub(crate) fn with_signed_clock(&self, kind: ClockKind, strength: f64) -> PotentialProfile {
        let mut out = self.clone();
        for seg in &mut out.segments[self.clock_region.clone()] {
            match kind {
                ClockKind::ImaginaryPotential => seg.v_imag = strength,
                ClockKind::Larmor => seg.omega_larmor = strength,
            }
        }
        out
    }
}

/// Single-segment barrier of height `v0` whose clock region is the barrier.
pub fn make_rectangular_barrier(v0: f64, width: f64) -> Result<PotentialProfile> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::Validation(format!(
            "barrier width must be positive and finite, got {width}"
        )));
    }
    if !v0.is_finite() {
        return Err(Error::Validation(format!("barrier height must be finite, got {v0}")));
    }
    Ok(PotentialProfile::new(vec![Segment::new(width, v0)]).with_clock_region(0..1))
}

/// Every broken invariant of `profile`. Never fails.
pub fn validate(profile: &PotentialProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, s) in profile.segments.iter().enumerate() {
        if !s.length.is_finite() || s.length <= 0.0 {
            out.push(Violation::new(
                format!("segments[{i}].length"),
                format!("must be positive and finite, got {}", s.length),
            ));
        }
        for (name, v) in [
            ("v_real", s.v_real),
            ("v_imag", s.v_imag),
            ("omega_larmor", s.omega_larmor),
        ] {
            if !v.is_finite() {
                out.push(Violation::new(
                    format!("segments[{i}].{name}"),
                    format!("must be finite, got {v}"),
                ));
            }
        }
    }
    let r = &profile.clock_region;
    if r.start > r.end || r.end > profile.segments.len() {
        out.push(Violation::new(
            "clock_region",
            format!(
                "range {}..{} is not a valid range into {} segments",
                r.start,
                r.end,
                profile.segments.len()
            ),
        ));
    }
    for (side, lead) in [("left", &profile.left), ("right", &profile.right)] {
        if !lead.v_real.is_finite() {
            out.push(Violation::new(
                format!("{side}.v_real"),
                format!("must be finite, got {}", lead.v_real),
            ));
        }
        if lead.v_imag != 0.0 {
            out.push(Violation::new(
                format!("{side}.v_imag"),
                "asymptotic regions must have zero imaginary potential",
            ));
        }
        if lead.omega_larmor != 0.0 {
            out.push(Violation::new(
                format!("{side}.omega_larmor"),
                "asymptotic regions must carry no Larmor field",
            ));
        }
    }
    out
}

/// Like [`validate`] but collapses violations into an error.
pub fn ensure_valid(profile: &PotentialProfile) -> Result<()> {
    let v = validate(profile);
    if v.is_empty() {
        Ok(())
    } else {
        let msg: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        Err(Error::Validation(msg.join("; ")))
    }
}

/// Attach a clock to the clock region; all other segments are untouched.
pub fn with_clock(profile: &PotentialProfile, settings: &ClockSettings) -> Result<PotentialProfile> {
    if profile.clock_region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    if !(settings.strength >= 0.0) || !(settings.paired_xi >= 0.0) {
        return Err(Error::Validation(format!(
            "clock strength and paired xi are stored non-negative, got {} and {}",
            settings.strength, settings.paired_xi
        )));
    }
    ensure_valid(profile)?;
    Ok(profile.with_signed_clock(settings.kind, settings.strength))
}
