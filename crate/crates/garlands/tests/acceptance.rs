//! Acceptance suite: one test per criterion, each printing a PASS line on
//! success (run with `cargo test --test acceptance -- --nocapture` to see
//! them). Seeds are fixed; every run is reproducible.
//!
//! Criterion 7 asserts that all 64 Gerstenhaber-derivation verdicts are
//! "member". The
//! engine's faithful transcription of the printed signs makes the Jacobi
//! (5.3) and Leibniz (5.5) identities fail at every even-n parity
//! assignment (residuals divisible by 2, so the mod-2 statements survive);
//! that sub-assertion is therefore expected red, with the analysis in the
//! failure message. Every other sub-requirement of criterion 7 is verified
//! before it.

use std::time::Instant;

use garlands::bv::{verify_prop51, verify_prop51_with, GerstenhaberIdentity, Prop51Options};
use garlands::calculus::{Algebra, AlgebraParams, Ring, SignRuleId};
use garlands::lab::{
    check, sample_trial_generators, Bounds, IdentityName, IdentitySpec, InputFamily,
};
use garlands::signsearch;
use garlands::textio;

fn params(ring: Ring, boundary: bool) -> AlgebraParams {
    AlgebraParams::new(2, 1, boundary, ring, SignRuleId::Zero).unwrap()
}

#[test]
fn criterion_01_prop42_exact_1000_pairs() {
    let start = Instant::now();
    let bounds = Bounds::default();
    for ring in [Ring::Z2, Ring::Z] {
        let alg = Algebra::new(params(ring, false));
        for trial in 0..1000 {
            // Bracket-domain sampling: factors have at least one copy.
            let gens = sample_trial_generators(4201, trial, &bounds, InputFamily::General, 2, 1);
            let a = alg.generator(&gens[0]);
            let b = alg.generator(&gens[1]);
            let lhs = alg.proj(&alg.product(&alg.lift(&a), &alg.lift(&b)).unwrap());
            let rhs = alg.bracket(&a, &b).unwrap();
            assert_eq!(lhs, rhs, "ring {ring:?} trial {trial}: {gens:?}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!("criterion 1: PASS (prop42 exact on 1000 pairs x 2 rings in {elapsed:?})");
}

#[test]
fn criterion_02_jacobi_mod2_500_triples() {
    let start = Instant::now();
    let bounds = Bounds::default();
    let report = check(
        IdentitySpec {
            name: IdentityName::JacobiMod2,
            family: InputFamily::General,
        },
        500,
        4202,
        params(Ring::Z2, false),
        &bounds,
    );
    assert_eq!(report.failures, 0, "{:?}", report.first_counterexample);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!("criterion 2: PASS (jacobi mod 2 on 500 triples in {elapsed:?})");
}

#[test]
fn criterion_03_boundary_vanishing() {
    let bounds = Bounds::default();
    let with = Algebra::new(params(Ring::Z, true));
    let without = Algebra::new(params(Ring::Z, false));
    let mut nonzero_without_flag = 0usize;
    for trial in 0..1000 {
        let gens = sample_trial_generators(4203, trial, &bounds, InputFamily::General, 1, 0);
        let e = with.generator(&gens[0]);
        assert!(with.proj(&with.lift(&e)).is_zero(), "trial {trial}");
        assert!(with.delta(&with.delta(&e)).is_zero(), "trial {trial}");
        let e_free = without.generator(&gens[0]);
        if !without.delta(&without.delta(&e_free)).is_zero() {
            nonzero_without_flag += 1;
        }
    }
    assert!(
        nonzero_without_flag > 0,
        "the boundary hypothesis must matter"
    );
    println!(
        "criterion 3: PASS (1000 elements vanish under the flag; {nonzero_without_flag} have nonzero delta^2 without it)"
    );
}

#[test]
fn criterion_04_commutativity_and_bilinearity_mod2() {
    let bounds = Bounds::default();
    let p = params(Ring::Z2, false);
    for name in [
        IdentityName::Comm,
        IdentityName::Distrib,
        IdentityName::AntisymMod2,
        IdentityName::Bilinear,
    ] {
        let report = check(
            IdentitySpec {
                name,
                family: InputFamily::General,
            },
            500,
            4204,
            p,
            &bounds,
        );
        assert_eq!(
            report.failures, 0,
            "{name}: {:?}",
            report.first_counterexample
        );
    }
    println!("criterion 4: PASS (comm/distrib/antisym/bilinear, 500 trials each)");
}

#[test]
fn criterion_05_unit_and_associativity() {
    let bounds = Bounds::default();
    let z = params(Ring::Z, false);
    // Exact laws on the restricted family.
    for name in [IdentityName::UnitLaw, IdentityName::Assoc] {
        let report = check(
            IdentitySpec {
                name,
                family: InputFamily::OneGradingOneMark,
            },
            500,
            4205,
            z,
            &bounds,
        );
        assert_eq!(report.failures, 0, "{name} restricted family");
    }
    // General family: deterministic divergence verdicts with minimized
    // counterexamples whose outer factor has exactly two grading-1 marks.
    for name in [IdentityName::Assoc, IdentityName::UnitLaw] {
        let spec = IdentitySpec {
            name,
            family: InputFamily::General,
        };
        let r1 = check(spec, 200, 4205, z, &bounds);
        let r2 = check(spec, 200, 4205, z, &bounds);
        assert_eq!(r1, r2, "{name}: verdict must be deterministic");
        assert!(r1.failures > 0, "{name} diverges on the general family");
        assert!(r1.diverges());
        let min = r1.minimized.expect("minimized counterexample");
        let outer_indices: &[usize] = if name == IdentityName::Assoc {
            &[0, 2]
        } else {
            &[0]
        };
        let g1_counts: Vec<usize> = outer_indices
            .iter()
            .map(|&i| {
                min.generators[i]
                    .shape()
                    .marks()
                    .iter()
                    .filter(|m| m.grading() == 1)
                    .count()
            })
            .collect();
        assert!(
            g1_counts.contains(&2),
            "{name}: minimized outer factor has exactly two grading-1 marks, got {g1_counts:?}"
        );
    }
    println!(
        "criterion 5: PASS (exact laws restricted; deterministic minimized divergence general)"
    );
}

#[test]
fn criterion_06_expansion_counts() {
    let bounds = Bounds::default();
    let alg = Algebra::new(params(Ring::Z, false));
    for trial in 0..1000 {
        let gens = sample_trial_generators(4206, trial, &bounds, InputFamily::General, 2, 0);
        let a = alg.generator(&gens[0]);
        let b = alg.generator(&gens[1]);
        let t1 = &a.terms()[0];
        let t2 = &b.terms()[0];
        // Independent counts by direct scanning.
        let g1 = |t: &garlands::DecoratedTerm| {
            t.shape.marks().iter().filter(|m| m.grading() == 1).count()
        };
        assert_eq!(
            alg.expand_product(t1, t2).len(),
            g1(t1) * g1(t2),
            "product count, trial {trial}"
        );
        assert_eq!(
            alg.expand_bracket(t1, t2).len(),
            t1.shape.copies() * t2.shape.copies(),
            "bracket count, trial {trial}"
        );
        let expected_lift = if t1.shape.copies() == 0 {
            1
        } else {
            t1.shape.copies()
        };
        assert_eq!(
            alg.expand_lift(t1).len(),
            expected_lift,
            "lift count, trial {trial}"
        );
    }
    println!("criterion 6: PASS (raw expansion counts on 1000 random term pairs)");
}

#[test]
fn criterion_07_prop51_mechanized() {
    let start = Instant::now();
    let report = verify_prop51(4).expect("default bound holds all expansion words");
    assert_eq!(report.entries.len(), 64);

    // Sub-requirement: replayable certificates. Reproduced independently per
    // assignment (certificate indices resolve against freshly built
    // relations inside the bv module's own replay test; here we check the
    // reported form is complete and the member set is internally consistent).
    for entry in &report.entries {
        if entry.member {
            assert!(entry.residual.is_none());
        } else {
            assert!(entry.residual.is_some());
        }
    }
    // Sub-requirement: (5.2) needs the empty certificate.
    for entry in &report.entries {
        if entry.identity == GerstenhaberIdentity::Symmetry52 {
            assert!(entry.member && entry.certificate.is_empty());
        }
    }
    // Sub-requirement: ablations each produce at least one non-member.
    let no_seven = verify_prop51_with(
        4,
        Prop51Options {
            include_seven_term: false,
            include_delta_squared: true,
        },
    )
    .unwrap();
    assert!(
        no_seven.entries.iter().any(|e| !e.member),
        "dropping the seven-term instances must break something"
    );
    let no_dd = verify_prop51_with(
        4,
        Prop51Options {
            include_seven_term: true,
            include_delta_squared: false,
        },
    )
    .unwrap();
    assert!(
        no_dd
            .entries
            .iter()
            .any(|e| !e.member && e.identity == GerstenhaberIdentity::Leibniz55),
        "dropping delta-squared must break 5.5"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");

    // Sub-requirement: member for all 16 assignments x 4 identities.
    //
    // KNOWN RED: with the source's printed signs this is mathematically
    // unattainable. (5.3) and (5.5) are member exactly at the 8 odd-n
    // assignments; at even n the residuals (all divisible by 2, e.g.
    // -2*D(a*D(b)) for 5.5) show the bracket of an even-degree Delta is not
    // a Gerstenhaber bracket integrally, only mod 2. Expanding
    // Delta^2(ab) = 0 by hand through the bracket definition reproduces the
    // residual exactly, so this is a property of the stated signs, not of
    // the solver. See the bv module tests for the pinned verdict pattern.
    let non_members: Vec<String> = report
        .entries
        .iter()
        .filter(|e| !e.member)
        .map(|e| {
            format!(
                "{} at |a|={} |b|={} |c|={} n={} residual={}",
                e.identity.name(),
                u8::from(e.bits[0]),
                u8::from(e.bits[1]),
                u8::from(e.bits[2]),
                u8::from(e.bits[3]),
                e.residual.as_deref().unwrap_or("")
            )
        })
        .collect();
    if non_members.is_empty() {
        println!("criterion 7: PASS (64/64 member, certificates replayable, ablations break)");
    } else {
        println!(
            "criterion 7: FAIL on the all-member sub-assertion ({}/64 member); other sub-requirements PASS",
            report.member_count()
        );
    }
    assert!(
        non_members.is_empty(),
        "verify_prop51 must return member for all 64 verdicts; the printed signs fail at even n:\n{}",
        non_members.join("\n")
    );
}

#[test]
fn criterion_08_sign_search_degree_one() {
    let start = Instant::now();
    let bounds = Bounds::default();
    let p = params(Ring::Z, false);
    let report = signsearch::search(1, 200, 4208, p, &bounds).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}");
    assert_eq!(report.rules_enumerated, 65536);
    assert!(!report.truncated);
    // Reproducibility from the seed.
    let again = signsearch::search(1, 200, 4208, p, &bounds).unwrap();
    assert_eq!(report, again);
    // The all-zero rule's mod-2 shadow is the plain Jacobi sum; criterion 2
    // checks it at scale, and a direct 100-trial run confirms here.
    let shadow = check(
        IdentitySpec {
            name: IdentityName::JacobiMod2,
            family: InputFamily::General,
        },
        100,
        4208,
        params(Ring::Z2, false),
        &bounds,
    );
    assert_eq!(shadow.failures, 0);
    println!(
        "criterion 8: PASS (degree-1 search over 65536 rules in {elapsed:?}; {} survivors; reproducible)",
        report.survivor_count
    );
}

#[test]
fn criterion_09_bv_probe_stable_verdict() {
    let bounds = Bounds::default();
    let spec = IdentitySpec {
        name: IdentityName::BvProbe,
        family: InputFamily::General,
    };
    let p = params(Ring::Z2, false);
    let r1 = check(spec, 200, 4209, p, &bounds);
    let r2 = check(spec, 200, 4209, p, &bounds);
    assert_eq!(r1, r2, "verdict must be stable across reruns");
    assert!(!r1.diverges(), "the probe asserts no expectation");
    println!(
        "criterion 9: PASS (bv-probe verdict stable: {}/{} trials satisfy the seven-term relation mod 2)",
        r1.passes, r1.trials
    );
}

#[test]
fn criterion_10_cli_contract() {
    let bin = env!("CARGO_BIN_EXE_garlands");
    let corpus_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let p = params(Ring::Z, false);
    // Parser round trip over the checked-in corpus.
    let mut files: Vec<_> = std::fs::read_dir(&corpus_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(files.len() >= 30, "corpus has {} files", files.len());
    for file in &files {
        let text = std::fs::read_to_string(file).unwrap();
        let parsed =
            textio::parse_element(&text, &p).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
        let printed = textio::print_element(&parsed);
        let reparsed = textio::parse_element(&printed, &p).unwrap();
        assert_eq!(reparsed, parsed, "{}", file.display());
        assert_eq!(
            textio::print_element(&reparsed),
            printed,
            "printing is stable: {}",
            file.display()
        );
    }
    // Golden double runs: byte-identical reports.
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .env_remove("GARLANDS_SEED")
            .output()
            .expect("spawn garlands");
        (out.status.code().unwrap_or(-1), out.stdout)
    };
    for args in [
        vec!["check", "prop42", "--trials", "60", "--seed", "9"],
        vec![
            "check", "assoc", "--family", "general", "--trials", "120", "--seed", "5", "--ring",
            "z",
        ],
        vec!["bv", "verify", "--bound", "4"],
        vec![
            "signs", "search", "--degree", "1", "--trials", "12", "--seed", "3",
        ],
        vec!["selftest"],
    ] {
        let (c1, o1) = run(&args);
        let (c2, o2) = run(&args);
        assert_eq!(c1, c2, "{args:?}");
        assert_eq!(o1, o2, "byte-identical reruns for {args:?}");
    }
    // Exit-code matrix.
    let unit_file = corpus_dir.join("c00_unit.txt");
    let unit = unit_file.to_str().unwrap();
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["selftest"], 0),
        (
            vec![
                "check", "prop42", "--trials", "40", "--seed", "7", "--ring", "z2", "--n", "1",
                "--m", "2",
            ],
            0,
        ),
        (
            vec!["check", "jacobi-mod2", "--trials", "40", "--seed", "7"],
            0,
        ),
        (
            vec![
                "check",
                "assoc",
                "--family",
                "one-grading-1-mark",
                "--trials",
                "60",
                "--seed",
                "7",
                "--ring",
                "z",
            ],
            0,
        ),
        (
            vec![
                "check", "assoc", "--family", "general", "--trials", "120", "--seed", "5",
                "--ring", "z",
            ],
            10,
        ),
        (
            vec!["check", "bv-probe", "--trials", "30", "--seed", "7"],
            0,
        ),
        (vec!["check", "frobnicate"], 2),
        (vec!["frobnicate"], 2),
        (vec![], 2),
        (vec!["eval", "/nonexistent/file.txt", "--op", "lift"], 2),
        (vec!["eval", unit, "--op", "lift"], 0),
        (vec!["eval", unit, "--op", "product"], 2),
        (vec!["eval", unit, unit, "--op", "product"], 0),
        (vec!["eval", unit, "--op", "frobnicate"], 2),
        (vec!["export-dot", unit], 0),
        (vec!["export-dot", "/nonexistent/file.txt"], 2),
        (vec!["bv", "verify", "--bound", "2"], 2),
        (vec!["bv", "frobnicate"], 2),
        (vec!["signs", "search", "--degree", "9"], 2),
        (vec!["check", "prop42", "--trials", "nope"], 2),
    ];
    for (args, expected) in &cases {
        let (code, out) = run(args);
        assert_eq!(
            code,
            *expected,
            "args {args:?}: {}",
            String::from_utf8_lossy(&out)
        );
    }
    // bv verify at the default bound reports the divergence exit.
    let (code, _) = run(&["bv", "verify", "--bound", "4"]);
    assert_eq!(code, 10, "even-n non-members surface as divergence");
    println!(
        "criterion 10: PASS (corpus round-trip on {} files; golden reruns; exit-code matrix)",
        files.len()
    );
}
