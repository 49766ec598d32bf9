use qarith::synth::{AdderSpec, ModExpSpec, NetworkSpec, SynthOptions};
use qarith::verify::{verify_random, Sampling};

#[test]
fn wide_adder_random_cases() {
    let spec = NetworkSpec::Adder(AdderSpec::new(16).unwrap());
    let r = verify_random(&spec, SynthOptions::default(), 10_000, 1).unwrap();
    assert_eq!(r.cases_run, 10_000);
    assert!(r.passed(), "{r}");
}

#[test]
fn modexp_33_random_cases() {
    let spec =
        NetworkSpec::ModularExponentiation(ModExpSpec::with_default_exponent(6, 5, 33).unwrap());
    let r = verify_random(&spec, SynthOptions::default(), 2_000, 3).unwrap();
    assert_eq!(
        r.sampling,
        Sampling::Random {
            samples: 2_000,
            seed: 3
        }
    );
    assert!(r.passed(), "{r}");
    assert_eq!(r.cleanliness_violations, 0);
}

#[test]
fn seeded_runs_repeat() {
    let spec =
        NetworkSpec::ModularExponentiation(ModExpSpec::with_default_exponent(5, 2, 21).unwrap());
    let a = verify_random(&spec, SynthOptions::default(), 300, 42).unwrap();
    let b = verify_random(&spec, SynthOptions::default(), 300, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_key_values().lines().last(), Some("verdict: pass"));
}
