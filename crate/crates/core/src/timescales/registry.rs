//! Named timing methods behind a common trait.

use std::sync::Arc;

use crate::derivative::DerivativeSpec;
use crate::error::{Error, Result};
use crate::potentials::PotentialProfile;

use super::{
    bl_time, dwell_time, imag_clock_time, larmor_channel, report_flags, sojourn_over, timing_region, wigner_delay,
    Channel, Entry, SojournClock, TimeValue, TimescaleReport,
};

/// Inputs shared by every method.
#[derive(Debug, Clone, Copy)]
pub struct Query<'a> {
    pub profile: &'a PotentialProfile,
    pub energy: f64,
    pub channel: Channel,
    pub spec: &'a DerivativeSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub time: TimeValue,
    pub note: Option<String>,
}

impl From<TimeValue> for Estimate {
    fn from(time: TimeValue) -> Self {
        Self { time, note: None }
    }
}

pub trait TimeMethod: Send + Sync {
    fn label(&self) -> &'static str;
    fn evaluate(&self, q: &Query) -> Result<Estimate>;
}

fn directed(q: &Query, method: &'static str) -> Result<()> {
    if q.channel == Channel::Unconditional {
        return Err(Error::UnsupportedChannel {
            method,
            channel: q.channel.as_str(),
        });
    }
    Ok(())
}

pub struct WignerMethod;

impl TimeMethod for WignerMethod {
    fn label(&self) -> &'static str {
        "wigner"
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        directed(q, self.label())?;
        wigner_delay(q.profile, q.energy, q.channel, q.spec).map(Into::into)
    }
}

pub struct DwellMethod;

impl TimeMethod for DwellMethod {
    fn label(&self) -> &'static str {
        "dwell"
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        let time = dwell_time(q.profile, q.energy, timing_region(q.profile))?;
        let note = (q.channel != Channel::Unconditional).then(|| "dwell time is not channel resolved".to_string());
        Ok(Estimate { time, note })
    }
}

pub struct BlMethod;

impl TimeMethod for BlMethod {
    fn label(&self) -> &'static str {
        "bl"
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        bl_time(q.profile, q.energy, timing_region(q.profile)).map(Into::into)
    }
}

pub struct LarmorYMethod;

impl TimeMethod for LarmorYMethod {
    fn label(&self) -> &'static str {
        "larmor_y"
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        let pair = larmor_channel(q.profile, q.energy, q.spec, q.channel)?;
        Ok(Estimate {
            time: pair.tau_y,
            note: (pair.tau_y_sign < 0.0).then(|| "precession derivative was negative".to_string()),
        })
    }
}

pub struct LarmorZMethod;

impl TimeMethod for LarmorZMethod {
    fn label(&self) -> &'static str {
        "larmor_z"
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        Ok(larmor_channel(q.profile, q.energy, q.spec, q.channel)?.tau_z.into())
    }
}

pub struct LarmorPythagoreanMethod;

impl TimeMethod for LarmorPythagoreanMethod {
    fn label(&self) -> &'static str {
        "larmor_pythagorean"
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        Ok(larmor_channel(q.profile, q.energy, q.spec, q.channel)?
            .pythagorean()
            .into())
    }
}

pub struct ImagClockMethod;

impl TimeMethod for ImagClockMethod {
    fn label(&self) -> &'static str {
        "imag_clock"
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        directed(q, self.label())?;
        imag_clock_time(q.profile, q.energy, q.spec, q.channel).map(Into::into)
    }
}

/// Paired-variable sojourn time realised with either clock.
pub struct SojournMethod {
    pub clock: SojournClock,
}

impl TimeMethod for SojournMethod {
    fn label(&self) -> &'static str {
        match self.clock {
            SojournClock::ImaginaryPotential => "sojourn",
            SojournClock::Larmor => "sojourn_larmor",
        }
    }

    fn evaluate(&self, q: &Query) -> Result<Estimate> {
        directed(q, self.label())?;
        let segs: Vec<usize> = q.profile.clock_region.clone().collect();
        let s = sojourn_over(q.profile, q.energy, &segs, q.channel, self.clock, q.spec)?;
        Ok(Estimate {
            time: s.time,
            note: s
                .extrapolated
                .then(|| "clock region beyond a single uniform segment".to_string()),
        })
    }
}

/// Ordered set of timing methods, looked up by label.
#[derive(Default)]
pub struct MethodRegistry {
    methods: Vec<Arc<dyn TimeMethod>>,
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The eight report methods in report order.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(WignerMethod));
        r.register(Arc::new(DwellMethod));
        r.register(Arc::new(BlMethod));
        r.register(Arc::new(LarmorYMethod));
        r.register(Arc::new(LarmorZMethod));
        r.register(Arc::new(LarmorPythagoreanMethod));
        r.register(Arc::new(ImagClockMethod));
        r.register(Arc::new(SojournMethod {
            clock: SojournClock::ImaginaryPotential,
        }));
        r
    }

    /// Standard methods plus the Larmor-clock sojourn variant.
    pub fn extended() -> Self {
        let mut r = Self::standard();
        r.register(Arc::new(SojournMethod {
            clock: SojournClock::Larmor,
        }));
        r
    }

    /// Adds a method, replacing any existing one with the same label.
    pub fn register(&mut self, method: Arc<dyn TimeMethod>) {
        match self.methods.iter().position(|m| m.label() == method.label()) {
            Some(i) => self.methods[i] = method,
            None => self.methods.push(method),
        }
    }

    pub fn get(&self, label: &str) -> Option<&dyn TimeMethod> {
        self.methods.iter().find(|m| m.label() == label).map(|m| m.as_ref())
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.methods.iter().map(|m| m.label()).collect()
    }

    /// Registry restricted to `labels`, in the given order.
    pub fn select(&self, labels: &[String]) -> Result<MethodRegistry> {
        let mut out = MethodRegistry::new();
        for l in labels {
            let m = self.methods.iter().find(|m| m.label() == l).ok_or_else(|| {
                Error::Validation(format!("unknown method {l:?}; known: {}", self.labels().join(", ")))
            })?;
            out.register(Arc::clone(m));
        }
        Ok(out)
    }

    /// Runs every method; failures become absent entries with their reason.
    pub fn report(
        &self,
        profile: &PotentialProfile,
        energy: f64,
        channel: Channel,
        spec: &DerivativeSpec,
    ) -> TimescaleReport {
        let clocked;
        let profile = if profile.clock_region.is_empty() {
            clocked = profile.clone().with_clock_region(0..profile.segments.len());
            &clocked
        } else {
            profile
        };
        let q = Query {
            profile,
            energy,
            channel,
            spec,
        };
        let entries = self
            .methods
            .iter()
            .map(|m| {
                let entry = match m.evaluate(&q) {
                    Ok(e) => Entry::present(&e),
                    Err(e) => Entry::absent(e.to_string()),
                };
                (m.label().to_string(), entry)
            })
            .collect();
        TimescaleReport {
            energy,
            channel,
            entries,
            flags: report_flags(profile, energy),
        }
    }
}

/// Report with every standard method. A profile without a clock region is
/// timed over all of its segments.
pub fn full_report(
    profile: &PotentialProfile,
    energy: f64,
    channel: Channel,
    spec: &DerivativeSpec,
) -> TimescaleReport {
    MethodRegistry::standard().report(profile, energy, channel, spec)
}
