use proptest::prelude::*;
use sojourn_cli::table::{compare, Metadata, ResultTable, Row, Tolerances};

fn table(rows: &[Vec<Option<f64>>]) -> ResultTable {
    let mut t = ResultTable::new(
        vec!["x".into(), "y".into(), "z".into()],
        Metadata {
            units: "none".into(),
            tool_version: "test".into(),
            scenario_digest: "0".into(),
        },
    );
    for values in rows {
        let reason = values
            .iter()
            .any(Option::is_none)
            .then(|| "missing, with a comma".to_string());
        t.push(Row {
            values: values.clone(),
            reason,
            diagnostics: None,
        })
        .unwrap();
    }
    t
}

fn cell() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![
        4 => prop::num::f64::NORMAL.prop_map(Some),
        1 => prop::num::f64::SUBNORMAL.prop_map(Some),
        1 => Just(None),
    ]
}

proptest! {
    #[test]
    fn csv_round_trip_is_bit_exact(rows in prop::collection::vec(prop::collection::vec(cell(), 3), 1..20)) {
        let t = table(&rows);
        let bytes = t.to_csv().unwrap();
        let back = ResultTable::from_csv(bytes.as_slice()).unwrap();
        prop_assert_eq!(&back.columns, &t.columns);
        for (a, b) in back.rows.iter().zip(&t.rows) {
            let bits = |r: &Row| r.values.iter().map(|v| v.map(f64::to_bits)).collect::<Vec<_>>();
            prop_assert_eq!(bits(a), bits(b));
            prop_assert_eq!(&a.reason, &b.reason);
        }
        let report = compare(&back, &t, &Tolerances::parse("0").unwrap(), &[]).unwrap();
        prop_assert!(report.passed());
    }
}
