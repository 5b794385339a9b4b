mod common;

use common::{dsl, m};
use padic_forge::certify::{CertifyOptions, Limits};
use padic_forge::genlib::{emit_bytes, full_period_census, GeneratorSpec, OutputFn};
use padic_forge::{CompositeModulus, CompositeModulus64, Error};

fn single(p: u64, k: u32) -> CompositeModulus64 {
    CompositeModulus::new(vec![m(p, k)]).unwrap()
}

fn certified(text: &str, out: Option<(&str, Vec<u32>)>, modulus: CompositeModulus64, seed: u64) -> GeneratorSpec<u64> {
    let out_fn = out.map(|(e, exponents)| OutputFn { expr: dsl(e), exponents });
    GeneratorSpec::certified(dsl(text), out_fn, modulus, seed, &CertifyOptions::default()).unwrap()
}

#[test]
fn linear_map_has_full_period() {
    let spec = certified("1 + 5*x", None, single(2, 4), 0);
    let census = full_period_census(&spec, &Limits::default()).unwrap();
    assert_eq!(census.period, 16);
    assert!(census.uniform);
    assert_eq!(census.counts, vec![1; 16]);
}

#[test]
fn generic_map_visits_each_residue_once() {
    let spec = certified("1 + x + 2*delta(xor(x, 2*x + 1))", None, single(2, 8), 3);
    let values: Vec<u64> = spec.generator().take(256).map(Result::unwrap).collect();
    let mut sorted = values.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..256).collect::<Vec<_>>());
    assert_eq!(values[255], 3);
    let census = full_period_census(&spec, &Limits::default()).unwrap();
    assert_eq!((census.period, census.min_count, census.max_count), (256, 1, 1));
}

#[test]
fn truncated_output_is_uniform_over_the_period() {
    let spec = certified("1 - x + 2*x^2", Some(("x and 15", vec![4])), single(2, 8), 0);
    assert_eq!(spec.output_modulus(), 16);
    let census = full_period_census(&spec, &Limits::default()).unwrap();
    assert_eq!(census.period, 256);
    assert_eq!(census.counts, vec![16; 16]);
}

#[test]
fn bijective_output_preserves_counts() {
    let spec = certified("1 + x + 4*x^2 + 8*x^3", Some(("3 + 5*x + 2*x^2", vec![6])), single(2, 6), 5);
    let census = full_period_census(&spec, &Limits::default()).unwrap();
    assert!(census.uniform);
    assert_eq!(census.counts, vec![1; 64]);
}

#[test]
fn output_functions_are_checked() {
    let opts = CertifyOptions::default();
    let not_bijective = OutputFn { expr: dsl("2*x"), exponents: vec![4] };
    let err = GeneratorSpec::certified(dsl("1 + x"), Some(not_bijective), single(2, 8), 0, &opts).unwrap_err();
    assert!(matches!(err, Error::Uncertified { .. }), "{err}");
    let too_wide = OutputFn { expr: dsl("x"), exponents: vec![9] };
    assert!(GeneratorSpec::certified(dsl("1 + x"), Some(too_wide), single(2, 8), 0, &opts).is_err());
}

#[test]
fn byte_emission() {
    let spec = certified("1 + x", None, single(2, 8), 0);
    assert_eq!(emit_bytes(&spec, 4).unwrap(), vec![1, 2, 3, 4]);

    let spec = certified("1 + x", None, single(2, 16), 0xfffe);
    assert_eq!(emit_bytes(&spec, 3).unwrap(), vec![0xff, 0xff, 0, 0, 1, 0]);

    let spec = certified("1 + x", None, single(2, 12), 0xffe);
    assert_eq!(emit_bytes(&spec, 2).unwrap(), vec![0xff, 0]);

    let spec = certified("1 + x", Some(("x", vec![9])), single(2, 12), 0);
    assert_eq!(emit_bytes(&spec, 2).unwrap(), vec![1, 2]);

    for (modulus, out) in [(single(2, 7), None), (single(3, 8), None), (single(2, 12), Some(("x", vec![7])))] {
        let spec = certified("1 + x", out, modulus, 0);
        assert!(matches!(emit_bytes(&spec, 1), Err(Error::NotBinaryModulus)));
    }
}

#[test]
fn identity_map_is_stuck() {
    let spec = GeneratorSpec::unchecked(dsl("x"), None, single(2, 6), 9).unwrap();
    let census = full_period_census(&spec, &Limits::default()).unwrap();
    assert_eq!(census.period, 1);
    assert_eq!(census.counts[9], 64);
    let err = GeneratorSpec::certified(dsl("x"), None, single(2, 6), 9, &CertifyOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Uncertified { .. }));
}

#[test]
fn composite_modulus_runs_components_in_lockstep() {
    let modulus = CompositeModulus::new(vec![m(2, 3), m(3, 2), m(5, 1)]).unwrap();
    let spec = certified("1 + x", None, modulus, 0);
    assert_eq!(spec.certificates().len(), 3);
    let values: Vec<u64> = spec.generator().take(5).map(Result::unwrap).collect();
    assert_eq!(values, vec![1, 2, 3, 4, 5]);
    let census = full_period_census(&spec, &Limits::default()).unwrap();
    assert_eq!(census.period, 360);
    assert!(census.uniform);

    let modulus = CompositeModulus::new(vec![m(2, 4), m(3, 3)]).unwrap();
    let spec = certified("1 + x + 6*x*(x - 1)", None, modulus.clone(), 7);
    let census = full_period_census(&spec, &Limits::default()).unwrap();
    assert_eq!(census.period, 16 * 27);
    let mut generator = spec.generator();
    for _ in 0..40 {
        let combined = generator.next_value().unwrap();
        let parts = modulus.split(&combined);
        assert_eq!(modulus.combine(&parts), combined);
    }
}

#[test]
fn streams_are_deterministic_and_resumable() {
    let spec = certified("1 + x + (2/3)*x*(x - 1)", None, single(2, 20), 12345);
    let first: Vec<u64> = spec.generator().take(100).map(Result::unwrap).collect();
    let again: Vec<u64> = spec.generator().take(100).map(Result::unwrap).collect();
    assert_eq!(first, again);

    let file = spec.to_file().unwrap();
    let json = serde_json::to_string(&file).unwrap();
    let restored =
        GeneratorSpec::<u64>::from_file(serde_json::from_str(&json).unwrap(), false, &CertifyOptions::default())
            .unwrap();
    let replay: Vec<u64> = restored.generator().take(100).map(Result::unwrap).collect();
    assert_eq!(first, replay);

    let mut generator = spec.generator();
    for _ in 0..10 {
        generator.next_value().unwrap();
    }
    let state = generator.state();
    assert_eq!((state.current, state.steps_taken), (first[9], 10));
}
