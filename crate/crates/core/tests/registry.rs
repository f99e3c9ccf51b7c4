use std::sync::Arc;

use sojourn_core::derivative::DerivativeSpec;
use sojourn_core::potentials::make_rectangular_barrier;
use sojourn_core::timescales::{Channel, Estimate, MethodRegistry, Query, TimeMethod, TimeValue, WignerMethod};

struct HalfWigner;

impl TimeMethod for HalfWigner {
    fn label(&self) -> &'static str {
        "half_wigner"
    }
    fn evaluate(&self, q: &Query) -> sojourn_core::Result<Estimate> {
        let w = WignerMethod.evaluate(q)?;
        Ok(Estimate {
            time: TimeValue {
                value: w.time.value / 2.0,
                ..w.time
            },
            note: None,
        })
    }
}

#[test]
fn custom_method_joins_the_report() {
    let mut registry = MethodRegistry::standard();
    registry.register(Arc::new(HalfWigner));
    assert_eq!(registry.labels().last(), Some(&"half_wigner"));
    let p = make_rectangular_barrier(2.0, 1.0).unwrap();
    let report = registry.report(&p, 3.0, Channel::Transmission, &DerivativeSpec::default());
    let (w, h) = (report.value("wigner").unwrap(), report.value("half_wigner").unwrap());
    assert!((w - 2.0 * h).abs() < 1e-12);
}

#[test]
fn registering_an_existing_label_replaces_it() {
    let mut registry = MethodRegistry::standard();
    let n = registry.labels().len();
    registry.register(Arc::new(WignerMethod));
    assert_eq!(registry.labels().len(), n);
}
