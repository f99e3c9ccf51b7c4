#![allow(dead_code)]

use proptest::prelude::*;
use sojourn_core::potentials::{Lead, PotentialProfile, Segment};

pub fn segment() -> impl Strategy<Value = Segment> {
    (0.1..1.5f64, -1.0..3.0f64).prop_map(|(l, v)| Segment::new(l, v))
}

/// Real profile with real leads and an energy above both leads.
pub fn real_case() -> impl Strategy<Value = (PotentialProfile, f64)> {
    (
        prop::collection::vec(segment(), 1..6),
        -0.5..0.3f64,
        -0.5..0.3f64,
        0.05..5.0f64,
    )
        .prop_map(|(segs, vl, vr, above)| {
            let mut p = PotentialProfile::new(segs);
            p.left = Lead::real(vl);
            p.right = Lead::real(vr);
            (p, vl.max(vr) + above)
        })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}
