//! Exact stationary scattering off piecewise-constant complex potentials.
//!
//! The profile is decomposed into a chain of two-port scattering matrices
//! (interfaces between plane-wave bases, propagation through a segment, or a
//! thin slab handled through its `(psi, psi')` transfer matrix) and combined
//! with the Redheffer star product. Propagation factors are `exp(ikL)` with
//! `Im k >= 0`, so opaque segments never produce growing exponentials.
//!
//! Amplitude conventions (unit incident wave from the left):
//!
//! * `x < 0`: `psi = exp(i k_L x) + r exp(-i k_L x)`
//! * `x > X`: `psi = t exp(i k_R (x - X))`, `X` the profile length
//!
//! Referencing `t` to the exit plane makes a free segment of length `L`
//! transmit with `t = exp(ikL)`, so its Wigner delay is the crossing time.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{ensure_valid, PotentialProfile, Segment};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Segments with `|k| L` below this are handled as `(psi, psi')` slabs, which
/// stay exact down to `k = 0`.
const SLAB_THRESHOLD: f64 = 1e-2;

/// Zeeman component of the spinor. `Plus` sees the potential lowered by
/// `omega_L / 2`, `Minus` sees it raised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zeeman {
    Plus,
    Minus,
}

impl Zeeman {
    fn sign(self) -> f64 {
        match self {
            Zeeman::Plus => 1.0,
            Zeeman::Minus => -1.0,
        }
    }
}

/// Square root on the branch `Im >= 0`, with `Re >= 0` on the real axis.
pub fn decaying_sqrt(z: C64) -> C64 {
    let mut k = z.sqrt();
    if k.im < 0.0 || (k.im == 0.0 && k.re < 0.0) {
        k = -k;
    }
    k
}

/// Effective complex potential of a segment for one Zeeman channel.
pub fn effective_potential(segment: &Segment, channel: Option<Zeeman>) -> C64 {
    let zeeman = channel.map_or(0.0, |c| c.sign() * 0.5 * segment.omega_larmor);
    C64::new(segment.v_real - zeeman, -segment.v_imag)
}

/// `k = sqrt(E - V_eff)` on the decaying branch.
pub fn wavevector(energy: f64, segment: &Segment, channel: Option<Zeeman>) -> C64 {
    decaying_sqrt(C64::new(energy, 0.0) - effective_potential(segment, channel))
}

/// Two-port scattering matrix. `t`, `r` for incidence from the left,
/// `tp`, `rp` for incidence from the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub t: C64,
    pub r: C64,
    pub tp: C64,
    pub rp: C64,
}

impl SMatrix {
    pub const IDENTITY: SMatrix = SMatrix {
        t: C64 { re: 1.0, im: 0.0 },
        r: C64 { re: 0.0, im: 0.0 },
        tp: C64 { re: 1.0, im: 0.0 },
        rp: C64 { re: 0.0, im: 0.0 },
    };

    /// Step from basis `ka` (left) to basis `kb` (right).
    pub fn interface(ka: C64, kb: C64) -> SMatrix {
        let s = ka + kb;
        SMatrix {
            t: 2.0 * ka / s,
            r: (ka - kb) / s,
            tp: 2.0 * kb / s,
            rp: (kb - ka) / s,
        }
    }

    pub fn propagation(k: C64, length: f64) -> SMatrix {
        let p = (I * k * length).exp();
        SMatrix {
            t: p,
            r: C64::new(0.0, 0.0),
            tp: p,
            rp: C64::new(0.0, 0.0),
        }
    }

    /// Slab with `(psi, psi')` transfer matrix `m`, embedded in basis `q` on both sides.
    pub fn slab(q: C64, m: &Mat2) -> SMatrix {
        let [[m11, m12], [m21, m22]] = *m;
        let denom = I * q * (m11 + m22) + q * q * m12 - m21;
        // det m = 1 for a uniform segment, so t = t'
        let t = 2.0 * I * q / denom;
        SMatrix {
            t,
            r: (m21 + q * q * m12 + I * q * (m22 - m11)) / denom,
            tp: t,
            rp: (m21 + q * q * m12 + I * q * (m11 - m22)) / denom,
        }
    }

    /// Redheffer star product: `self` on the left, `other` on the right.
    pub fn star(&self, other: &SMatrix) -> SMatrix {
        let d = 1.0 - self.rp * other.r;
        SMatrix {
            t: other.t * self.t / d,
            r: self.r + self.tp * other.r * self.t / d,
            tp: self.tp * other.tp / d,
            rp: other.rp + other.t * self.rp * other.tp / d,
        }
    }

    /// Magnitude of the round-trip factor `self.rp * other.r` at the junction.
    pub fn loop_gain(&self, other: &SMatrix) -> f64 {
        (self.rp * other.r).norm()
    }
}

/// 2x2 complex matrix acting on `(psi, psi')`.
pub type Mat2 = [[C64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `sin(k s) / k`, continuous through `k = 0`.
fn sin_over_k(k: C64, s: f64) -> C64 {
    let z = k * s;
    if z.norm() < 1e-4 {
        let z2 = z * z;
        s * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        z.sin() / k
    }
}

/// Transfer matrix mapping `(psi, psi')` across a uniform slab of length `s`.
pub fn segment_transfer(k: C64, s: f64) -> Mat2 {
    let c = (k * s).cos();
    [[c, sin_over_k(k, s)], [-k * k * sin_over_k(k, s), c]]
}

/// Product of segment transfer matrices for one channel. Only use this for
/// moderately transparent profiles: opaque segments overflow it.
pub fn transfer_matrix(profile: &PotentialProfile, energy: f64, channel: Option<Zeeman>) -> Mat2 {
    let mut m = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ];
    for seg in &profile.segments {
        let k = wavevector(energy, seg, channel);
        m = mat_mul(&segment_transfer(k, seg.length), &m);
    }
    m
}

/// Interior field representation of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentField {
    /// `a exp(ik(x - x_l)) + b exp(-ik(x - x_r))` with `x_l`, `x_r` the segment edges.
    PlaneWave { k: C64, a: C64, b: C64 },
    /// `psi0 cos(k s) + dpsi0 sin(k s)/k` with `s = x - x_l`.
    Slab { k: C64, psi0: C64, dpsi0: C64 },
}

impl SegmentField {
    /// Right- and left-moving amplitudes `(A_j, B_j)`, or the edge values
    /// `(psi, psi')` for slab segments.
    pub fn coefficients(&self) -> (C64, C64) {
        match *self {
            SegmentField::PlaneWave { a, b, .. } => (a, b),
            SegmentField::Slab { psi0, dpsi0, .. } => (psi0, dpsi0),
        }
    }

    fn eval(&self, s: f64, length: f64) -> (C64, C64) {
        match *self {
            SegmentField::PlaneWave { k, a, b } => {
                let f = a * (I * k * s).exp();
                let g = b * (-I * k * (s - length)).exp();
                (f + g, I * k * (f - g))
            }
            SegmentField::Slab { k, psi0, dpsi0 } => {
                let c = (k * s).cos();
                let sk = sin_over_k(k, s);
                (psi0 * c + dpsi0 * sk, -psi0 * k * k * sk + dpsi0 * c)
            }
        }
    }
}

/// Stationary scattering state at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub energy: f64,
    pub t: C64,
    pub r: C64,
    pub t_rev: C64,
    pub r_rev: C64,
    pub k_left: f64,
    pub k_right: f64,
    pub segment_coefficients: Vec<SegmentField>,
    boundaries: Vec<f64>,
}

impl ScatteringSolution {
    /// Transmitted flux over incident flux.
    pub fn transmission(&self) -> f64 {
        self.k_right / self.k_left * self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    /// Incident probability flux `2 k_L` of the unit wave (hbar = 1, 2m = 1).
    pub fn incident_flux(&self) -> f64 {
        2.0 * self.k_left
    }

    pub fn extent(&self) -> f64 {
        *self.boundaries.last().unwrap_or(&0.0)
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    fn locate(&self, x: f64, prefer_right: bool) -> Result<usize> {
        let extent = self.extent();
        if !(0.0..=extent).contains(&x) || self.segment_coefficients.is_empty() {
            return Err(Error::OutOfRange { x, extent });
        }
        let n = self.segment_coefficients.len();
        // partition_point gives the first boundary strictly greater than x
        let upper = self.boundaries.partition_point(|&b| b <= x);
        let mut j = upper.saturating_sub(1).min(n - 1);
        if !prefer_right && j > 0 && x == self.boundaries[j] {
            j -= 1;
        }
        Ok(j)
    }

    /// `(psi(x), psi'(x))` evaluated from the segment on the requested side of
    /// an interface.
    pub fn field_at_side(&self, x: f64, from_right: bool) -> Result<(C64, C64)> {
        let j = self.locate(x, from_right)?;
        let xl = self.boundaries[j];
        let len = self.boundaries[j + 1] - xl;
        Ok(self.segment_coefficients[j].eval(x - xl, len))
    }

    pub fn field_at(&self, x: f64) -> Result<(C64, C64)> {
        self.field_at_side(x, true)
    }
}

/// `psi(x)` for `x` inside the profile.
pub fn wavefunction_at(solution: &ScatteringSolution, x: f64) -> Result<C64> {
    Ok(solution.field_at(x)?.0)
}

/// How a segment of the chain is represented.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChainSegment {
    /// Wavevector that defines the plane-wave basis and the interfaces.
    pub basis_k: C64,
    /// Wavevector used in the propagation factor (differs when dressed).
    pub prop_k: C64,
    pub length: f64,
    /// Keep the plane-wave form even for tiny `|k| L`.
    pub force_plane: bool,
}

#[derive(Debug, Clone, Copy)]
enum SegPorts {
    Plane { port_a: usize, port_b: usize, k: C64 },
    Slab { port: usize, q: C64, k: C64 },
}

/// Element chain with cumulative products for port amplitudes.
pub(crate) struct Chain {
    elems: Vec<SMatrix>,
    segs: Vec<SegPorts>,
    prefix: Vec<SMatrix>,
    suffix: Vec<SMatrix>,
}

impl Chain {
    pub fn build(k_left: C64, segments: &[ChainSegment], k_right: C64) -> Chain {
        let mut elems = Vec::with_capacity(2 * segments.len() + 1);
        let mut segs = Vec::with_capacity(segments.len());
        let mut q = k_left;
        for s in segments {
            let plane = s.force_plane || (s.basis_k.norm() * s.length >= SLAB_THRESHOLD);
            if plane {
                elems.push(SMatrix::interface(q, s.basis_k));
                let port_a = elems.len();
                elems.push(SMatrix::propagation(s.prop_k, s.length));
                let port_b = elems.len();
                segs.push(SegPorts::Plane {
                    port_a,
                    port_b,
                    k: s.prop_k,
                });
                q = s.basis_k;
            } else {
                let port = elems.len();
                elems.push(SMatrix::slab(q, &segment_transfer(s.prop_k, s.length)));
                segs.push(SegPorts::Slab { port, q, k: s.prop_k });
            }
        }
        if q != k_right {
            elems.push(SMatrix::interface(q, k_right));
        }
        let n = elems.len();
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(SMatrix::IDENTITY);
        for e in &elems {
            let last = *prefix.last().unwrap();
            prefix.push(last.star(e));
        }
        let mut suffix = vec![SMatrix::IDENTITY; n + 1];
        for p in (0..n).rev() {
            suffix[p] = elems[p].star(&suffix[p + 1]);
        }
        Chain {
            elems,
            segs,
            prefix,
            suffix,
        }
    }

    pub fn total(&self) -> SMatrix {
        self.prefix[self.elems.len()]
    }

    /// Right- and left-moving amplitudes at a port for unit left incidence.
    fn port_amplitudes(&self, port: usize) -> (C64, C64) {
        let pre = &self.prefix[port];
        let suf = &self.suffix[port];
        let a = pre.t / (1.0 - pre.rp * suf.r);
        (a, suf.r * a)
    }

    /// Round-trip gain across the right edge of segment `seg`.
    pub fn exit_loop_gain(&self, seg: usize) -> f64 {
        let port = match self.segs[seg] {
            SegPorts::Plane { port_b, .. } => port_b,
            SegPorts::Slab { port, .. } => port + 1,
        };
        self.prefix[port].loop_gain(&self.suffix[port])
    }

    /// Reflection off everything left of segment `seg`, seen from the left lead
    /// with an outgoing boundary inside that segment's medium.
    pub fn reflection_before(&self, seg: usize) -> C64 {
        match self.segs[seg] {
            SegPorts::Plane { port_a, .. } => self.prefix[port_a].r,
            SegPorts::Slab { port, .. } => self.prefix[port].r,
        }
    }

    fn fields(&self) -> Vec<SegmentField> {
        self.segs
            .iter()
            .map(|s| match *s {
                SegPorts::Plane { port_a, port_b, k } => {
                    let (a, _) = self.port_amplitudes(port_a);
                    let (_, b) = self.port_amplitudes(port_b);
                    SegmentField::PlaneWave { k, a, b }
                }
                SegPorts::Slab { port, q, k } => {
                    let (a, b) = self.port_amplitudes(port);
                    SegmentField::Slab {
                        k,
                        psi0: a + b,
                        dpsi0: I * q * (a - b),
                    }
                }
            })
            .collect()
    }
}

pub(crate) fn lead_wavevectors(profile: &PotentialProfile, energy: f64) -> Result<(f64, f64)> {
    for lead in [&profile.left, &profile.right] {
        if !(energy > lead.v_real) {
            return Err(Error::NoOpenChannel {
                energy,
                potential: lead.v_real,
            });
        }
    }
    Ok((
        (energy - profile.left.v_real).sqrt(),
        (energy - profile.right.v_real).sqrt(),
    ))
}

fn plain_chain(profile: &PotentialProfile, energy: f64, channel: Option<Zeeman>) -> Result<(Chain, f64, f64)> {
    ensure_valid(profile)?;
    if !energy.is_finite() {
        return Err(Error::Validation(format!("energy must be finite, got {energy}")));
    }
    let (kl, kr) = lead_wavevectors(profile, energy)?;
    let segs: Vec<ChainSegment> = profile
        .segments
        .iter()
        .map(|s| {
            let k = wavevector(energy, s, channel);
            ChainSegment {
                basis_k: k,
                prop_k: k,
                length: s.length,
                force_plane: false,
            }
        })
        .collect();
    Ok((Chain::build(C64::new(kl, 0.0), &segs, C64::new(kr, 0.0)), kl, kr))
}

fn solve_channel(profile: &PotentialProfile, energy: f64, channel: Option<Zeeman>) -> Result<ScatteringSolution> {
    let (chain, kl, kr) = plain_chain(profile, energy, channel)?;
    let s = chain.total();
    for (name, v) in [("t", s.t), ("r", s.r), ("t_rev", s.tp), ("r_rev", s.rp)] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(format!("{name} at E = {energy}")));
        }
    }
    Ok(ScatteringSolution {
        energy,
        t: s.t,
        r: s.r,
        t_rev: s.tp,
        r_rev: s.rp,
        k_left: kl,
        k_right: kr,
        segment_coefficients: chain.fields(),
        boundaries: profile.boundaries(),
    })
}

/// Solve the scalar problem. Larmor fields in the profile are ignored; use
/// [`solve_spinor`] for the Zeeman channels.
pub fn solve(profile: &PotentialProfile, energy: f64) -> Result<ScatteringSolution> {
    solve_channel(profile, energy, None)
}

/// Solve for one Zeeman component.
pub fn solve_zeeman(profile: &PotentialProfile, energy: f64, channel: Zeeman) -> Result<ScatteringSolution> {
    solve_channel(profile, energy, Some(channel))
}

/// Transmission and reflection amplitudes of the two Zeeman components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorAmplitudes {
    pub t_plus: C64,
    pub t_minus: C64,
    pub r_plus: C64,
    pub r_minus: C64,
}

/// `sigma_z` is diagonal, so the spinor problem is two independent scalar solves.
pub fn solve_spinor(profile: &PotentialProfile, energy: f64) -> Result<SpinorAmplitudes> {
    let p = solve_zeeman(profile, energy, Zeeman::Plus)?;
    let m = solve_zeeman(profile, energy, Zeeman::Minus)?;
    Ok(SpinorAmplitudes {
        t_plus: p.t,
        t_minus: m.t,
        r_plus: p.r,
        r_minus: m.r,
    })
}

/// Interface-stack amplitudes around a single-segment clock region. Region 1
/// is everything to its left, 2 the clock segment, 3 everything to its right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialWaveSet {
    pub t12: C64,
    pub t21: C64,
    pub t23: C64,
    pub r12: C64,
    pub r21: C64,
    pub r23: C64,
    pub k_inner: C64,
    pub length: f64,
}

impl PartialWaveSet {
    /// Round trip factor `r21 r23 exp(2ik'L)`.
    pub fn round_trip(&self) -> C64 {
        self.r21 * self.r23 * (2.0 * I * self.k_inner * self.length).exp()
    }

    /// Resummed transmission `t12 t23 e^{ik'L} / (1 - r21 r23 e^{2ik'L})`.
    pub fn transmission(&self) -> Result<C64> {
        let rt = self.round_trip();
        if rt.norm() >= 1.0 {
            return Err(Error::ResummationDivergence { loop_gain: rt.norm() });
        }
        Ok(self.t12 * self.t23 * (I * self.k_inner * self.length).exp() / (1.0 - rt))
    }

    /// Resummed reflection `r12 + t12 r23 t21 e^{2ik'L} / (1 - r21 r23 e^{2ik'L})`.
    pub fn reflection(&self) -> Result<C64> {
        let rt = self.round_trip();
        if rt.norm() >= 1.0 {
            return Err(Error::ResummationDivergence { loop_gain: rt.norm() });
        }
        let p2 = (2.0 * I * self.k_inner * self.length).exp();
        Ok(self.r12 + self.t12 * self.r23 * self.t21 * p2 / (1.0 - rt))
    }
}

fn stack(k_left: C64, segs: &[Segment], energy: f64, k_right: C64) -> SMatrix {
    let chain: Vec<ChainSegment> = segs
        .iter()
        .map(|s| {
            let k = wavevector(energy, s, None);
            ChainSegment {
                basis_k: k,
                prop_k: k,
                length: s.length,
                force_plane: false,
            }
        })
        .collect();
    Chain::build(k_left, &chain, k_right).total()
}

pub(crate) fn require_basis(energy: f64, index: usize, seg: &Segment, k: C64) -> Result<()> {
    if k.norm() * seg.length < 1e-12 || k.norm() == 0.0 {
        return Err(Error::RegimeAmbiguity {
            energy,
            segment: index,
            potential: seg.v_real,
        });
    }
    Ok(())
}

/// Left and right stacks of a single-segment clock region, solved separately
/// with outgoing boundaries inside the clock segment's medium.
pub fn partial_waves(profile: &PotentialProfile, energy: f64) -> Result<PartialWaveSet> {
    ensure_valid(profile)?;
    let region = profile.clock_region.clone();
    if region.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    if region.len() != 1 {
        return Err(Error::Precondition {
            method: "partial_waves",
            reason: format!(
                "geometric resummation needs a single uniform clock segment, region has {}",
                region.len()
            ),
        });
    }
    let c = region.start;
    let (kl, kr) = lead_wavevectors(profile, energy)?;
    let seg = &profile.segments[c];
    let k = wavevector(energy, seg, None);
    require_basis(energy, c, seg, k)?;
    let left = stack(C64::new(kl, 0.0), &profile.segments[..c], energy, k);
    let right = stack(k, &profile.segments[c + 1..], energy, C64::new(kr, 0.0));
    let pw = PartialWaveSet {
        t12: left.t,
        t21: left.tp,
        r12: left.r,
        r21: left.rp,
        t23: right.t,
        r23: right.r,
        k_inner: k,
        length: seg.length,
    };
    let gain = pw.round_trip().norm();
    if gain >= 1.0 {
        return Err(Error::ResummationDivergence { loop_gain: gain });
    }
    Ok(pw)
}

/// How the clock dresses the propagation factor of a clocked segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dressing {
    /// Absorbing potential: `k' = k + i V_I / (2k)`.
    Absorption,
    /// Zeeman shift: `k' = k +/- omega_L / (4k)`.
    Zeeman(Zeeman),
}

impl Dressing {
    fn dress(self, k: C64, strength: f64) -> C64 {
        match self {
            Dressing::Absorption => k + I * strength / (2.0 * k),
            Dressing::Zeeman(z) => k + z.sign() * strength / (4.0 * k),
        }
    }
}

/// Amplitudes with interfaces pinned at zero clock strength and the paired
/// clock dependence carried only by the propagation factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedAmplitudes {
    pub t: C64,
    pub r: C64,
    /// Prompt reflection off the stack left of the first clocked segment.
    pub r_prompt: C64,
    /// Largest round-trip gain across a clocked segment's exit.
    pub max_loop_gain: f64,
}

/// Evaluate the profile with the clocked segments' propagation factors dressed
/// at per-length strength `strength` (`xi / L`). Every interface, including
/// those between clocked segments, uses the undressed wavevectors.
pub fn dressed_scattering(
    profile: &PotentialProfile,
    energy: f64,
    clocked: &[usize],
    dressing: Dressing,
    strength: f64,
) -> Result<DressedAmplitudes> {
    ensure_valid(profile)?;
    if clocked.is_empty() {
        return Err(Error::EmptyClockRegion);
    }
    let (kl, kr) = lead_wavevectors(profile, energy)?;
    let mut segs = Vec::with_capacity(profile.segments.len());
    for (j, s) in profile.segments.iter().enumerate() {
        let k = wavevector(energy, s, None);
        let is_clock = clocked.contains(&j);
        if is_clock {
            require_basis(energy, j, s, k)?;
        }
        segs.push(ChainSegment {
            basis_k: k,
            prop_k: if is_clock { dressing.dress(k, strength) } else { k },
            length: s.length,
            force_plane: is_clock,
        });
    }
    let chain = Chain::build(C64::new(kl, 0.0), &segs, C64::new(kr, 0.0));
    let max_loop_gain = clocked.iter().map(|&j| chain.exit_loop_gain(j)).fold(0.0, f64::max);
    if max_loop_gain >= 1.0 {
        return Err(Error::ResummationDivergence {
            loop_gain: max_loop_gain,
        });
    }
    let first = *clocked.iter().min().unwrap();
    let s = chain.total();
    Ok(DressedAmplitudes {
        t: s.t,
        r: s.r,
        r_prompt: chain.reflection_before(first),
        max_loop_gain,
    })
}
