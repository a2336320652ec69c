mod common;

use proptest::prelude::*;
use quaderint::format::{
    parse_contraction_doc, parse_family_doc, parse_halfspaces_doc, parse_matrix_doc,
    parse_measure_doc, parse_oracle_doc, parse_set_doc, parse_step_doc, parse_weight_doc,
    step_to_toml,
};
use quaderint::rational::parse_rational;
use quaderint::text::{parse_interval, parse_point, parse_quader, parse_value};
use quaderint::{random, Error};

use common::{config, rng};

fn text_alphabet() -> impl Strategy<Value = String> {
    prop_oneof![
        any::<String>(),
        "[\\[\\]()0-9/,.+\\-xi× infemptyα^ ]{0,40}",
    ]
}

fn doc_alphabet() -> impl Strategy<Value = String> {
    prop_oneof![
        any::<String>(),
        "[a-z_=\\[\\]{}\"',.0-9/+\\- \n]{0,120}",
        Just("kind = \"volume\"\ndim = 99999\n".to_string()),
        Just("kind = \"discrete\"\npoints = [{ at = \"(0\", mass = \"1\" }]\n".to_string()),
        Just("carrier = \"vec\"\nelements = [[\"1\"], [\"1\", \"2\"]]\n".to_string()),
        Just("rows = [[1.0, 2.0], [3.0]]\n".to_string()),
    ]
}

fn parse_errors_have_positions(e: &Error) -> bool {
    match e {
        Error::Parse(p) => p.column >= 1,
        _ => true,
    }
}

proptest! {
    #![proptest_config(config(512))]

    #[test]
    fn text_parsers_never_panic(s in text_alphabet()) {
        if let Err(e) = parse_rational(&s) { prop_assert!(e.column >= 1); }
        if let Err(e) = parse_interval(&s) { prop_assert!(e.column >= 1); }
        if let Err(e) = parse_quader(&s) { prop_assert!(e.column >= 1); }
        if let Err(e) = parse_point(&s) { prop_assert!(e.column >= 1); }
        if let Err(e) = parse_value(&s) { prop_assert!(e.column >= 1); }
    }

    #[test]
    fn document_parsers_never_panic(s in doc_alphabet()) {
        for r in [
            parse_measure_doc(&s).err(),
            parse_weight_doc(&s).err(),
            parse_step_doc(&s).err(),
            parse_oracle_doc(&s).err(),
            parse_set_doc(&s).err(),
            parse_family_doc(&s).err(),
            parse_matrix_doc(&s).err(),
            parse_halfspaces_doc(&s).err(),
            parse_contraction_doc(&s).err(),
        ]
        .into_iter()
        .flatten()
        {
            prop_assert!(parse_errors_have_positions(&r), "{r}");
        }
    }

    #[test]
    fn display_round_trips(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let q = random::quader(&mut r, dim);
        prop_assert_eq!(parse_quader(&q.to_string()).unwrap(), q);
        let i = random::interval(&mut r);
        prop_assert_eq!(parse_interval(&i.to_string()).unwrap(), i);
        let v = random::value(&mut r, false);
        prop_assert_eq!(parse_value(&v.to_string()).unwrap(), v);
        let t = random::step_function(&mut r, dim, 4, false).unwrap();
        let (back, m) = parse_step_doc(&step_to_toml(&t)).unwrap();
        prop_assert!(m.is_none());
        prop_assert_eq!(back, t);
    }
}

#[test]
fn parse_errors_point_at_the_offending_column() {
    let e = parse_quader("[0,1]x[2,1/0]").unwrap_err();
    assert_eq!(e.column, 12);
    let e = parse_interval("[0,1").unwrap_err();
    assert!(e.column >= 4);
}
