//! Text and JSON renderings round-trip.

use proptest::prelude::*;
use qtype_core::fuzz;
use qtype_core::infer::infer;
use qtype_core::program::{Arg, GateDef, Program, Span, Stmt};
use qtype_core::report::{type_from_json, type_json};
use qtype_core::syntax::{parse_program, parse_type, parse_type_with, ParseOptions, SourceFile};
use qtype_core::types::{separable_subset, QType};
use qtype_core::Error;

/// Random types: stabilizer and one-T branches, optionally annotated with a
/// separability partition, optionally measured into a union.
fn random_type(seed: u64, n: usize, additive: bool, split: bool, measure: bool) -> QType {
    let mut rng = fuzz::rng(seed);
    let p = if additive {
        fuzz::one_t_branch(&mut rng, n, 3 * n).unwrap().1
    } else {
        fuzz::clifford_program(&mut rng, n, 3 * n)
    };
    // Some additive shapes have no closed-form measurement rule; those are
    // typed unmeasured.
    let t = match infer(&p.clone().meas(1), &fuzz::all_zero_type(n)) {
        Ok(t) if measure => t,
        _ => infer(&p, &fuzz::all_zero_type(n)).unwrap(),
    };
    if !split || t.branches().len() != 1 || !t.is_gottesman() {
        return t;
    }
    let k: Vec<usize> = (0..n / 2).collect();
    match separable_subset(&t.branches()[0], &k) {
        Ok(s) if s.separable => QType::single(s.branch),
        _ => t,
    }
}

fn random_source(seed: u64, n: usize) -> SourceFile {
    let mut rng = fuzz::rng(seed);
    let mut p = fuzz::clifford_t_program(&mut rng, n, 6, 1);
    if n >= 2 {
        p = p.define(GateDef {
            name: "BELL".into(),
            params: vec!["a".into(), "b".into()],
            body: vec![
                Stmt::Gate { name: "H".into(), args: vec![Arg::Param("a".into())], span: Span::default() },
                Stmt::Gate {
                    name: "CNOT".into(),
                    args: vec![Arg::Param("a".into()), Arg::Param("b".into())],
                    span: Span::default(),
                },
            ],
        });
        p.push_gate("BELL", &[2, 1]);
    }
    let p = p.meas(n);
    let init = fuzz::all_zero_type(n);
    let expect = infer(&p, &init).ok();
    SourceFile { program: p, init: Some(init), expect }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn type_print_parse_fixed_point(seed in any::<u64>(), n in 1usize..=4, additive in any::<bool>(), split in any::<bool>(), measure in any::<bool>()) {
        let t = random_type(seed, n, additive, split, measure);
        let text = t.to_string();
        let back = parse_type_with(&text, Some(n), ParseOptions::default()).unwrap();
        prop_assert_eq!(&back, &t, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn type_json_round_trip(seed in any::<u64>(), n in 1usize..=4, additive in any::<bool>(), split in any::<bool>(), measure in any::<bool>()) {
        let t = random_type(seed, n, additive, split, measure);
        let v = type_json(&t);
        let wire = serde_json::to_string(&v).unwrap();
        let back = type_from_json(&serde_json::from_str(&wire).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn program_print_parse_fixed_point(seed in any::<u64>(), n in 1usize..=4) {
        let f = random_source(seed, n);
        let text = f.to_string();
        let back = parse_program(&text).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        prop_assert_eq!(back.init, f.init);
        prop_assert_eq!(back.expect, f.expect);
        let names = |p: &Program| p.expand().unwrap().iter().map(|o| o.name().to_string()).collect::<Vec<_>>();
        prop_assert_eq!(names(&back.program), names(&f.program));
    }
}

#[test]
fn errors_carry_positions() {
    match parse_program("QUBITS 2\nH 1\nCNOT 1 2 @\n") {
        Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (3, 10)),
        other => panic!("unexpected {other:?}"),
    }
    match parse_type("XX & ZZ & Q") {
        Err(Error::Syntax { line: 1, col: 11, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_program("QUBITS 1\nGATE G a { G a }\nG 1"), Err(Error::CyclicDefinition(_))));
    assert!(matches!(parse_program("QUBITS 2\nCNOT 1 1"), Err(Error::RepeatedQubit(1))));
    assert!(matches!(parse_type("ZZ & Z"), Err(Error::Syntax { .. })));
}

#[test]
fn readable_forms_are_accepted() {
    let a = parse_type("I(-X) & (-Z)I").unwrap();
    let b = parse_type("-IX & -ZI").unwrap();
    assert_eq!(a, b);
    let c = parse_type("Z@{1} & (XX & ZZ)@{2,3}").unwrap();
    assert_eq!(c.to_string(), "Z@{1} & (XX & ZZ)@{2,3}");
    let d = parse_type("(1/rt2)(XX + YX) & ZZ").unwrap();
    assert_eq!(d.to_string(), "(rt2/2)(XX + YX) & ZZ");
}
