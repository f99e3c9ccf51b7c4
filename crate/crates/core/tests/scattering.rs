mod common;

use common::real_case;
use proptest::prelude::*;
use sojourn_core::potentials::{PotentialProfile, Segment};
use sojourn_core::scatter::solve;

proptest! {
    #[test]
    fn flux_is_conserved((p, e) in real_case()) {
        let s = solve(&p, e).unwrap();
        prop_assert!((s.transmission() + s.reflection() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transmission_is_reciprocal((p, e) in real_case()) {
        let mut rev = PotentialProfile::new(p.segments.iter().rev().copied().collect());
        rev.left = p.right;
        rev.right = p.left;
        let a = solve(&p, e).unwrap().transmission();
        let b = solve(&rev, e).unwrap().transmission();
        prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn splitting_a_segment_changes_nothing((p, e) in real_case(), pick in 0usize..6, frac in 0.1..0.9f64) {
        let j = pick % p.segments.len();
        let s = p.segments[j];
        let mut segs = p.segments.clone();
        segs[j] = Segment { length: s.length * frac, ..s };
        segs.insert(j + 1, Segment { length: s.length * (1.0 - frac), ..s });
        let split = PotentialProfile { segments: segs, ..p.clone() };
        let (a, b) = (solve(&p, e).unwrap(), solve(&split, e).unwrap());
        prop_assert!((a.t - b.t).norm() < 1e-9 * (1.0 + a.t.norm()));
        prop_assert!((a.r - b.r).norm() < 1e-9);
    }

    #[test]
    fn field_is_continuous_at_interfaces((p, e) in real_case()) {
        let s = solve(&p, e).unwrap();
        let b = s.boundaries().to_vec();
        for &x in &b[1..b.len() - 1] {
            let (lv, ld) = s.field_at_side(x, false).unwrap();
            let (rv, rd) = s.field_at_side(x, true).unwrap();
            let scale = 1.0 + lv.norm() + ld.norm();
            prop_assert!((lv - rv).norm() < 1e-9 * scale, "psi jump at {}", x);
            prop_assert!((ld - rd).norm() < 1e-9 * scale, "psi' jump at {}", x);
        }
    }
}

#[test]
fn absorbing_segment_loses_flux() {
    let mut p = PotentialProfile::new(vec![Segment::new(1.0, 0.5)]);
    p.segments[0].v_imag = 0.05;
    let s = solve(&p, 1.5).unwrap();
    let loss = 1.0 - s.transmission() - s.reflection();
    assert!(loss > 0.0 && loss < 0.2, "{loss}");
}
