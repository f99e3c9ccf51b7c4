use super::*;
use crate::potentials::{make_rectangular_barrier, Lead, Segment};

fn spec() -> DerivativeSpec {
    DerivativeSpec::default()
}

fn free(l: f64) -> PotentialProfile {
    PotentialProfile::new(vec![Segment::new(l, 0.0)]).with_clock_region(0..1)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Barrier `v0` between flanking steps so that every partial wave is nontrivial.
fn flanked(v0: f64, width: f64) -> PotentialProfile {
    PotentialProfile::new(vec![
        Segment::new(0.7, 0.3),
        Segment::new(width, v0),
        Segment::new(0.4, -0.5),
    ])
    .with_clock_region(1..2)
}

#[test]
fn free_segment_times() {
    let p = free(1.0);
    let w = wigner_delay(&p, 1.0, Channel::Transmission, &spec()).unwrap();
    assert!((w.value - 0.5).abs() < 1e-8, "{w:?}");
    let d = dwell_time(&p, 1.0, 0..1).unwrap();
    assert!((d.value - 0.5).abs() < 1e-10, "{d:?}");
    let c = imag_clock_time(&p, 1.0, &spec(), Channel::Transmission).unwrap();
    assert!((c.value - 0.5).abs() < 1e-8, "{c:?}");
    let s = sojourn_transmission(&p, 1.0, &spec()).unwrap();
    assert!((s.time.value - 0.5).abs() < 1e-8, "{s:?}");
}

#[test]
fn bl_examples() {
    let p = make_rectangular_barrier(2.0, 1.0).unwrap();
    assert!((bl_time(&p, 1.0, 0..1).unwrap().value - 0.5).abs() < 1e-15);
    assert!((bl_time(&free(1.0), 1.0, 0..1).unwrap().value - 0.5).abs() < 1e-15);
    let two = PotentialProfile::new(vec![Segment::new(1.0, 2.0), Segment::new(0.5, 5.0)]);
    let sum = 0.5 + 0.5 / (2.0 * 2.0);
    assert!((bl_time(&two, 1.0, 0..2).unwrap().value - sum).abs() < 1e-15);
    assert!(matches!(
        bl_time(&p, 2.0, 0..1),
        Err(Error::DivergentIntegrand { segment: 0 })
    ));
}

#[test]
fn dwell_identity_on_barrier() {
    for e in [0.4, 1.3, 3.0] {
        let p = make_rectangular_barrier(1.0, 1.5).unwrap();
        let sol = solve(&p, e).unwrap();
        let d = dwell_time(&p, e, 0..1).unwrap().value;
        let tt = imag_clock_time(&p, e, &spec(), Channel::Transmission).unwrap().value;
        let tr = imag_clock_time(&p, e, &spec(), Channel::Reflection).unwrap().value;
        let combo = sol.transmission() * tt + sol.reflection() * tr;
        assert!((d - combo).abs() < 1e-6, "E={e}: {d} vs {combo}");
    }
}

#[test]
fn dwell_rejects_complex_region() {
    let mut p = free(1.0);
    p.segments[0].v_imag = 0.1;
    assert!(matches!(dwell_time(&p, 1.0, 0..1), Err(Error::Precondition { .. })));
}

#[test]
fn sojourn_matches_closed_forms() {
    for (v0, e) in [(1.0, 0.3), (1.0, 0.8), (1.0, 1.7), (1.0, 4.0), (2.5, 1.2)] {
        for p in [make_rectangular_barrier(v0, 1.2).unwrap(), flanked(v0, 1.2)] {
            let num = sojourn_transmission(&p, e, &spec()).unwrap().time.value;
            let cf = sojourn_transmission_closed_form(&p, e).unwrap();
            assert!(rel(num, cf) < 1e-6, "T V0={v0} E={e}: {num} vs {cf}");
            let num_r = sojourn_reflection(&p, e, &spec()).unwrap().time.value;
            let cf_r = sojourn_reflection_closed_form(&p, e).unwrap();
            assert!(rel(num_r, cf_r) < 1e-6, "R V0={v0} E={e}: {num_r} vs {cf_r}");
            let c = p.clock_region.start;
            let bl = bl_time(&p, e, c..c + 1).unwrap().value;
            assert!((num_r - num - bl).abs() < 1e-4);
            assert!(num >= 0.0 && num_r >= 0.0);
        }
    }
}

#[test]
fn larmor_sojourn_agrees_with_absorbing() {
    for e in [0.5, 2.0] {
        let p = flanked(1.0, 1.0);
        let a = sojourn_over(
            &p,
            e,
            &[1],
            Channel::Transmission,
            SojournClock::ImaginaryPotential,
            &spec(),
        )
        .unwrap();
        let l = sojourn_over(&p, e, &[1], Channel::Transmission, SojournClock::Larmor, &spec()).unwrap();
        assert!(rel(l.time.value, a.time.value) < 1e-4, "{l:?} {a:?}");
    }
}

#[test]
fn free_clock_reflection_is_singular() {
    let p = PotentialProfile::new(vec![Segment::new(1.0, 0.0), Segment::new(1.0, 0.0)]).with_clock_region(1..2);
    assert!(matches!(
        sojourn_reflection(&p, 1.0, &spec()),
        Err(Error::LogSingularity { .. })
    ));
}

#[test]
fn regime_ambiguity_at_barrier_top() {
    let p = make_rectangular_barrier(1.0, 1.0).unwrap();
    assert!(matches!(
        sojourn_transmission(&p, 1.0, &spec()),
        Err(Error::RegimeAmbiguity { .. })
    ));
}

#[test]
fn dressed_transmission_at_zero_is_plain() {
    for e in [0.5, 1.5] {
        let p = flanked(1.0, 0.8);
        let d = dressed_transmission(&p, e, 0.0, Channel::Transmission).unwrap();
        let s = solve(&p, e).unwrap().t;
        assert!((d - s).norm() < 1e-12);
    }
}

#[test]
fn dressed_propagating_matches_resummation() {
    let p = make_rectangular_barrier(1.0, 1.3).unwrap();
    let e = 1.8;
    let xi = 0.05;
    let mut pw = partial_waves(&p, e).unwrap();
    pw.k_inner += C64::i() * (xi / pw.length) / (2.0 * pw.k_inner);
    let direct = dressed_transmission(&p, e, xi, Channel::Transmission).unwrap();
    assert!((direct.norm_sqr() - pw.transmission().unwrap().norm_sqr()).abs() < 1e-10);
}

#[test]
fn dressed_evanescent_moves_phase_only() {
    let p = make_rectangular_barrier(2.0, 3.0).unwrap();
    let e = 1.0;
    let t0 = dressed_transmission(&p, e, 0.0, Channel::Transmission).unwrap();
    let h = 1e-4;
    let tp = dressed_transmission(&p, e, h, Channel::Transmission).unwrap();
    let tm = dressed_transmission(&p, e, -h, Channel::Transmission).unwrap();
    let dlnabs = (tp.norm().ln() - tm.norm().ln()) / (2.0 * h);
    let darg = ((tp / t0).arg() - (tm / t0).arg()) / (2.0 * h);
    assert!(dlnabs.abs() < 1e-2 * darg.abs(), "{dlnabs} {darg}");
}

#[test]
fn prompt_reflection_examples() {
    let p = make_rectangular_barrier(0.5, 1.0).unwrap();
    let e = 1.0;
    let (k, kp) = (1.0, 0.5f64.sqrt());
    let r12 = prompt_reflection(&p, e).unwrap();
    assert!((r12 - C64::new((k - kp) / (k + kp), 0.0)).norm() < 1e-14);
    let matched = PotentialProfile::new(vec![Segment::new(1.0, 0.0)]).with_clock_region(0..1);
    assert!(prompt_reflection(&matched, e).unwrap().norm() < 1e-15);
    assert!(prompt_reflection(&flanked(1.0, 1.0), 0.9).unwrap().norm() <= 1.0);
}

#[test]
fn wigner_limits() {
    // Hartmann saturation
    let e = 0.5;
    let w8 = wigner_delay(
        &make_rectangular_barrier(1.0, 8.0 / 0.5f64.sqrt()).unwrap(),
        e,
        Channel::Transmission,
        &spec(),
    )
    .unwrap();
    let w16 = wigner_delay(
        &make_rectangular_barrier(1.0, 16.0 / 0.5f64.sqrt()).unwrap(),
        e,
        Channel::Transmission,
        &spec(),
    )
    .unwrap();
    assert!(rel(w16.value, w8.value) < 0.01, "{w8:?} {w16:?}");
    // classical limit
    let p = make_rectangular_barrier(1.0, 1.0).unwrap();
    let e = 400.0;
    let w = wigner_delay(&p, e, Channel::Transmission, &spec()).unwrap().value;
    assert!(rel(w, 1.0 / (2.0 * (e - 1.0f64).sqrt())) < 0.01);
}

#[test]
fn larmor_limits() {
    let p = make_rectangular_barrier(1.0, 1.0).unwrap();
    let e = 400.0;
    let lt = larmor_times(&p, e, &spec()).unwrap();
    let w = wigner_delay(&p, e, Channel::Transmission, &spec()).unwrap().value;
    assert!(rel(lt.transmission.tau_y.value, w) < 0.01);
    // opaque: kappa L = 8 at E = V0/2
    let e = 0.5;
    let p = make_rectangular_barrier(1.0, 8.0 / 0.5f64.sqrt()).unwrap();
    let lt = larmor_times(&p, e, &spec()).unwrap();
    let bl = bl_time(&p, e, 0..1).unwrap().value;
    assert!(rel(lt.transmission.tau_z.value, bl) < 0.01, "{lt:?} {bl}");
}

#[test]
fn spin_z_small_field() {
    let p = make_rectangular_barrier(1.0, 2.0).unwrap();
    let e = 0.6;
    let tz = larmor_times(&p, e, &spec()).unwrap().transmission.tau_z.value;
    let w = 1e-5;
    let a = solve_spinor(&p.with_signed_clock(ClockKind::Larmor, w), e).unwrap();
    let (_, sz) = spin_expectations(a.t_plus, a.t_minus);
    assert!(rel(sz, 0.5 * w * tz) < 1e-4);
}

#[test]
fn report_shapes() {
    let p = make_rectangular_barrier(1.0, 1.0).unwrap();
    let above = full_report(&p, 2.0, Channel::Transmission, &spec());
    assert!(above.entries.iter().all(|(_, e)| e.value.is_some()), "{above:?}");
    assert!(!above.flags.evanescent_regime);
    let labels: Vec<_> = above.entries.iter().map(|(l, _)| l.as_str()).collect();
    assert_eq!(
        labels,
        [
            "wigner",
            "dwell",
            "bl",
            "larmor_y",
            "larmor_z",
            "larmor_pythagorean",
            "imag_clock",
            "sojourn"
        ]
    );
    let below = full_report(&p, 0.5, Channel::Transmission, &spec());
    assert!(below.flags.evanescent_regime);
    assert!(below.value("sojourn").unwrap() > 0.0);
    let top = full_report(&p, 1.0, Channel::Transmission, &spec());
    let s = top.get("sojourn").unwrap();
    assert!(s.value.is_none() && s.reason.as_deref().unwrap().contains("offset"));
}

#[test]
fn multi_segment_flagged() {
    let p = PotentialProfile {
        segments: vec![Segment::new(1.0, 0.5), Segment::new(1.0, 2.0)],
        clock_region: 0..2,
        left: Lead::default(),
        right: Lead::default(),
    };
    let r = full_report(&p, 1.0, Channel::Transmission, &spec());
    assert!(r.flags.extrapolated_beyond_paper);
}

#[test]
fn registry_select_and_replace() {
    let reg = MethodRegistry::extended();
    assert_eq!(reg.labels().len(), 9);
    let sel = reg.select(&["bl".into(), "wigner".into()]).unwrap();
    assert_eq!(sel.labels(), ["bl", "wigner"]);
    assert!(reg.select(&["nope".into()]).is_err());
}
