mod common;

use common::{real_case, rel};
use proptest::prelude::*;
use sojourn_core::derivative::DerivativeSpec;
use sojourn_core::potentials::PotentialProfile;
use sojourn_core::scatter::solve;
use sojourn_core::timescales::{
    dwell_time, imag_clock_time, sojourn_over, sojourn_transmission, Channel, SojournClock,
};
use sojourn_core::Error;

fn with_region((p, e): (PotentialProfile, f64), a: usize, b: usize) -> (PotentialProfile, f64) {
    let n = p.segments.len();
    let (a, b) = (a % n, b % n);
    let (lo, hi) = (a.min(b), a.max(b) + 1);
    (p.with_clock_region(lo..hi), e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sojourn_is_nonnegative(case in real_case(), a in 0usize..6, b in 0usize..6) {
        let (p, e) = with_region(case, a, b);
        match sojourn_transmission(&p, e, &DerivativeSpec::default()) {
            Ok(s) => prop_assert!(s.time.value >= -1e-8, "{:?}", s),
            // deep tunnelling can push |T| below the logarithm's floor
            Err(Error::LogSingularity { .. } | Error::ResummationDivergence { .. }) => {}
            Err(other) => prop_assert!(false, "{}", other),
        }
    }

    #[test]
    fn sojourn_is_additive((p, e) in real_case(), split in 0usize..6) {
        let n = p.segments.len();
        prop_assume!(n >= 2);
        let k = 1 + split % (n - 1);
        let spec = DerivativeSpec::default();
        let all: Vec<usize> = (0..n).collect();
        let t = |s: &[usize]| sojourn_over(&p, e, s, Channel::Transmission, SojournClock::ImaginaryPotential, &spec);
        let (Ok(whole), Ok(a), Ok(b)) = (t(&all), t(&all[..k]), t(&all[k..])) else {
            return Ok(());
        };
        let sum = a.time.value + b.time.value;
        prop_assert!(rel(whole.time.value, sum) < 1e-4, "{} vs {}", whole.time.value, sum);
    }

    #[test]
    fn larmor_and_absorbing_clocks_agree(case in real_case(), a in 0usize..6, b in 0usize..6) {
        let (p, e) = with_region(case, a, b);
        let spec = DerivativeSpec::default();
        let segs: Vec<usize> = p.clock_region.clone().collect();
        let abs = sojourn_over(&p, e, &segs, Channel::Transmission, SojournClock::ImaginaryPotential, &spec);
        let lar = sojourn_over(&p, e, &segs, Channel::Transmission, SojournClock::Larmor, &spec);
        if let (Ok(x), Ok(y)) = (abs, lar) {
            let tol = 1e-4 * x.time.value.abs().max(1e-3);
            prop_assert!((x.time.value - y.time.value).abs() < tol, "{:?} vs {:?}", x, y);
        }
    }

    #[test]
    fn derivative_schedule_does_not_matter(case in real_case(), a in 0usize..6, b in 0usize..6) {
        let (p, e) = with_region(case, a, b);
        let base = DerivativeSpec::default();
        let fine = DerivativeSpec { order: 4, ..base.halved() };
        if let (Ok(x), Ok(y)) = (sojourn_transmission(&p, e, &base), sojourn_transmission(&p, e, &fine)) {
            let tol = 1e-6 * x.time.value.abs().max(1e-3);
            prop_assert!((x.time.value - y.time.value).abs() < tol, "{:?} vs {:?}", x, y);
        }
    }

    #[test]
    fn dwell_splits_into_channels(case in real_case(), a in 0usize..6, b in 0usize..6) {
        let (p, e) = with_region(case, a, b);
        let spec = DerivativeSpec::default();
        let s = solve(&p, e).unwrap();
        let d = dwell_time(&p, e, p.clock_region.clone()).unwrap().value;
        let (Ok(tt), Ok(tr)) = (
            imag_clock_time(&p, e, &spec, Channel::Transmission),
            imag_clock_time(&p, e, &spec, Channel::Reflection),
        ) else {
            return Ok(());
        };
        let combo = s.transmission() * tt.value + s.reflection() * tr.value;
        prop_assert!((d - combo).abs() < 1e-6 * d.max(1.0), "{} vs {}", d, combo);
    }
}
