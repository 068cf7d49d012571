//! Command-line surface: argument parsing, command dispatch and report
//! assembly.
//!
//! Exit codes: 0 when every expectation for the command was met, 10 when a
//! computation diverges from an asserted identity (the report explains how),
//! and 2 for usage or input errors. Codes are a function of the report
//! content only.

use std::collections::{BTreeMap, BTreeSet};

use crate::bv::{self, Prop51Report};
use crate::calculus::{Algebra, AlgebraParams, Ring, SignRuleId};
use crate::dot;
use crate::lab::{self, Bounds, IdentityName, IdentitySpec, InputFamily};
use crate::report::Report;
use crate::signsearch;
use crate::textio;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGES: i32 = 10;

/// Environment variable providing the default seed; `--seed` wins.
pub const SEED_ENV: &str = "GARLANDS_SEED";

const USAGE: &str = "\
usage: garlands <command> [options]

commands:
  selftest
      run the built-in sanity battery
  check <identity> [--trials T] [--seed S] [--ring z2|z] [--n N] [--m M]
                   [--boundary] [--family F] [--sign-rule R]
      identities: comm assoc distrib unit-law antisym-mod2 jacobi-mod2
                  bilinear prop42 prop43 delta-sq bv-probe
      families:   general one-grading-1-mark lift-image
  eval <file> --op product|bracket|lift|proj|delta [<file2>]
              [--ring z2|z] [--n N] [--m M] [--boundary] [--sign-rule R]
      apply an operation to parsed element files and print the result
  bv verify [--bound B]
      derive the Gerstenhaber relations from the seven-term relation
  signs search [--degree D] [--trials T] [--seed S] [--n N] [--m M]
      enumerate Jacobi sign conventions and test them over Z
  export-dot <file>
      render each term of an element file as a DOT graph

exit codes: 0 ok, 2 usage or input error, 10 diverges from asserted identity
";

struct Parsed {
    positionals: Vec<String>,
    values: BTreeMap<String, String>,
    switches: BTreeSet<String>,
}

fn usage_error(message: impl Into<String>) -> (i32, String) {
    (EXIT_USAGE, format!("error: {}\n{USAGE}", message.into()))
}

fn parse_args(
    args: &[String],
    value_flags: &[&str],
    switch_flags: &[&str],
) -> Result<Parsed, String> {
    let mut parsed = Parsed {
        positionals: Vec::new(),
        values: BTreeMap::new(),
        switches: BTreeSet::new(),
    };
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if let Some(name) = arg.strip_prefix("--") {
            if switch_flags.contains(&name) {
                parsed.switches.insert(name.to_string());
            } else if value_flags.contains(&name) {
                let value = iter
                    .next()
                    .ok_or_else(|| format!("flag --{name} needs a value"))?;
                parsed.values.insert(name.to_string(), value.clone());
            } else {
                return Err(format!("unknown flag --{name}"));
            }
        } else {
            parsed.positionals.push(arg.clone());
        }
    }
    Ok(parsed)
}

fn get_u64(parsed: &Parsed, name: &str, default: u64) -> Result<u64, String> {
    match parsed.values.get(name) {
        Some(v) => v
            .parse()
            .map_err(|_| format!("--{name} expects an integer, got `{v}`")),
        None => Ok(default),
    }
}

fn get_i64(parsed: &Parsed, name: &str, default: i64) -> Result<i64, String> {
    match parsed.values.get(name) {
        Some(v) => v
            .parse()
            .map_err(|_| format!("--{name} expects an integer, got `{v}`")),
        None => Ok(default),
    }
}

fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn get_params(parsed: &Parsed) -> Result<AlgebraParams, String> {
    let ring = match parsed.values.get("ring").map(String::as_str) {
        None | Some("z2") => Ring::Z2,
        Some("z") => Ring::Z,
        Some(other) => return Err(format!("--ring expects z2 or z, got `{other}`")),
    };
    let sign_rule = match parsed.values.get("sign-rule") {
        None => SignRuleId::Zero,
        Some(v) => SignRuleId::parse(v)
            .ok_or_else(|| format!("--sign-rule expects zero or koszul, got `{v}`"))?,
    };
    let n = get_i64(parsed, "n", 1)?;
    let m = get_i64(parsed, "m", 2)?;
    AlgebraParams::new(m, n, parsed.switches.contains("boundary"), ring, sign_rule)
        .map_err(|e| e.to_string())
}

fn push_params(report: &mut Report, params: &AlgebraParams) {
    report.push("m", params.m);
    report.push("n", params.n);
    report.push("boundary", params.p_is_boundary);
    report.push("ring", params.ring);
    report.push("sign-rule", params.sign_rule);
}

/// Dispatch a full argument vector; returns (exit code, report text).
pub fn run(args: &[String]) -> (i32, String) {
    match args.first().map(String::as_str) {
        Some("selftest") => cmd_selftest(&args[1..]),
        Some("check") => cmd_check(&args[1..]),
        Some("eval") => cmd_eval(&args[1..]),
        Some("bv") => match args.get(1).map(String::as_str) {
            Some("verify") => cmd_bv_verify(&args[2..]),
            _ => usage_error("expected `bv verify`"),
        },
        Some("signs") => match args.get(1).map(String::as_str) {
            Some("search") => cmd_signs_search(&args[2..]),
            _ => usage_error("expected `signs search`"),
        },
        Some("export-dot") => cmd_export_dot(&args[1..]),
        Some(other) => usage_error(format!("unknown command `{other}`")),
        None => usage_error("no command given"),
    }
}

fn cmd_check(args: &[String]) -> (i32, String) {
    let parsed = match parse_args(
        args,
        &["trials", "seed", "ring", "n", "m", "family", "sign-rule"],
        &["boundary"],
    ) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let identity_name = match parsed.positionals.as_slice() {
        [name] => name.clone(),
        _ => return usage_error("check expects exactly one identity name"),
    };
    let identity = match IdentityName::parse(&identity_name) {
        Ok(i) => i,
        Err(e) => return usage_error(e.to_string()),
    };
    let family = match parsed.values.get("family") {
        None => InputFamily::General,
        Some(v) => match InputFamily::parse(v) {
            Ok(f) => f,
            Err(e) => return usage_error(e.to_string()),
        },
    };
    let params = match get_params(&parsed) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let trials = match get_u64(&parsed, "trials", 200) {
        Ok(t) => t as usize,
        Err(e) => return usage_error(e),
    };
    let seed = match get_u64(&parsed, "seed", default_seed()) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let bounds = Bounds::default();
    let spec = IdentitySpec {
        name: identity,
        family,
    };
    let result = lab::check(spec, trials, seed, params, &bounds);
    let mut report = Report::new("check");
    report.push("identity", result.identity);
    report.push("family", result.family.name());
    push_params(&mut report, &result.params);
    report.push("ring-coerced", result.ring_coerced);
    report.push("seed", result.seed);
    report.push("trials", result.trials);
    report.push("passes", result.passes);
    report.push("failures", result.failures);
    report.push("bracket-zero-copy-inputs", result.bracket_zero_copy_inputs);
    let must_hold = lab::expectation_must_hold(result.identity, result.family, &result.params);
    let verdict = match (must_hold, result.failures == 0) {
        (true, true) => "PASS",
        (true, false) => "DIVERGES-FROM-THEORY",
        (false, true) => "HOLDS-ON-SAMPLE",
        (false, false) => "FAILS-ON-SAMPLE",
    };
    report.push("verdict", verdict);
    if let Some(cex) = &result.first_counterexample {
        let alg = Algebra::new(result.params);
        report.push("counterexample-trial", cex.trial);
        for g in &cex.generators {
            report.push(
                format!("counterexample-{}", g.name),
                textio::print_element(&alg.generator(g)),
            );
        }
        if let Some(diff) = &result.diff {
            report.push("counterexample-diff", textio::print_element(diff));
        }
        if let Some(min) = &result.minimized {
            for g in &min.generators {
                report.push(
                    format!("minimized-{}", g.name),
                    textio::print_element(&alg.generator(g)),
                );
            }
        }
        if let Some(diff) = &result.minimized_diff {
            report.push("minimized-diff", textio::print_element(diff));
        }
    }
    let code = if verdict == "DIVERGES-FROM-THEORY" {
        EXIT_DIVERGES
    } else {
        EXIT_OK
    };
    (code, report.render())
}

fn cmd_eval(args: &[String]) -> (i32, String) {
    let parsed = match parse_args(args, &["op", "ring", "n", "m", "sign-rule"], &["boundary"]) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let op = match parsed.values.get("op") {
        Some(op) => op.clone(),
        None => return usage_error("eval requires --op"),
    };
    let params = match get_params(&parsed) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let binary = matches!(op.as_str(), "product" | "bracket");
    let (file1, file2) = match (binary, parsed.positionals.as_slice()) {
        (true, [a, b]) => (a.clone(), Some(b.clone())),
        (false, [a]) => (a.clone(), None),
        (true, _) => return usage_error(format!("--op {op} expects two element files")),
        (false, _) => return usage_error(format!("--op {op} expects one element file")),
    };
    let read = |path: &str| -> Result<crate::calculus::Element, String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))?;
        textio::parse_element(&text, &params).map_err(|e| format!("parse error in `{path}`: {e}"))
    };
    let e1 = match read(&file1) {
        Ok(e) => e,
        Err(e) => return usage_error(e),
    };
    let e2 = match &file2 {
        Some(f) => match read(f) {
            Ok(e) => Some(e),
            Err(e) => return usage_error(e),
        },
        None => None,
    };
    let alg = Algebra::new(params);
    let result = match op.as_str() {
        "product" => alg.product(&e1, e2.as_ref().unwrap()),
        "bracket" => alg.bracket(&e1, e2.as_ref().unwrap()),
        "lift" => Ok(alg.lift(&e1)),
        "proj" => Ok(alg.proj(&e1)),
        "delta" => Ok(alg.delta(&e1)),
        other => return usage_error(format!("unknown operation `{other}`")),
    };
    let result = match result {
        Ok(r) => r,
        Err(e) => return usage_error(e.to_string()),
    };
    let mut report = Report::new("eval");
    report.push("op", &op);
    report.push("file", &file1);
    if let Some(f) = &file2 {
        report.push("file2", f);
    }
    push_params(&mut report, &params);
    report.push("terms", result.terms().len());
    report.push("result", textio::print_element(&result));
    if textio::has_freshness(&result) {
        report.push(
            "note",
            "result carries freshness tags, which are session-internal and not serialized",
        );
    }
    (EXIT_OK, report.render())
}

fn assignment_key(bits: [bool; 4]) -> String {
    format!(
        "a{}b{}c{}n{}",
        u8::from(bits[0]),
        u8::from(bits[1]),
        u8::from(bits[2]),
        u8::from(bits[3])
    )
}

fn push_prop51(report: &mut Report, result: &Prop51Report) {
    report.push("bound", result.bound);
    report.push("universe-size", result.universe_size);
    report.push("relations", result.relation_count);
    for entry in &result.entries {
        let key = format!("{}/{}", assignment_key(entry.bits), entry.identity.name());
        report.push(
            format!("verdict/{key}"),
            if entry.member { "member" } else { "NON-MEMBER" },
        );
        if entry.member {
            let cert = if entry.certificate.is_empty() {
                "(empty)".to_string()
            } else {
                entry
                    .certificate
                    .iter()
                    .map(|(desc, coeff)| format!("{coeff} * {desc}"))
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            report.push(format!("certificate/{key}"), cert);
        } else if let Some(residual) = &entry.residual {
            report.push(format!("residual/{key}"), residual);
        }
    }
    report.push(
        "summary",
        format!("{}/{} member", result.member_count(), result.entries.len()),
    );
}

fn cmd_bv_verify(args: &[String]) -> (i32, String) {
    let parsed = match parse_args(args, &["bound"], &[]) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    if !parsed.positionals.is_empty() {
        return usage_error("bv verify takes no positional arguments");
    }
    let bound = match get_u64(&parsed, "bound", 4) {
        Ok(b) => b as usize,
        Err(e) => return usage_error(e),
    };
    let result = match bv::verify_prop51(bound) {
        Ok(r) => r,
        Err(e) => return usage_error(e.to_string()),
    };
    let mut report = Report::new("bv-verify");
    push_prop51(&mut report, &result);
    let verdict = if result.all_member() {
        "PASS"
    } else {
        "DIVERGES-FROM-THEORY"
    };
    report.push("verdict", verdict);
    let code = if result.all_member() {
        EXIT_OK
    } else {
        EXIT_DIVERGES
    };
    (code, report.render())
}

fn cmd_signs_search(args: &[String]) -> (i32, String) {
    let parsed = match parse_args(args, &["degree", "trials", "seed", "n", "m"], &[]) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    if !parsed.positionals.is_empty() {
        return usage_error("signs search takes no positional arguments");
    }
    let degree = match get_u64(&parsed, "degree", 1) {
        Ok(d) => d as u32,
        Err(e) => return usage_error(e),
    };
    let trials = match get_u64(&parsed, "trials", 200) {
        Ok(t) => t as usize,
        Err(e) => return usage_error(e),
    };
    let seed = match get_u64(&parsed, "seed", default_seed()) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let n = match get_i64(&parsed, "n", 1) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    let m = match get_i64(&parsed, "m", 2) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    let params = match AlgebraParams::new(m, n, false, Ring::Z, SignRuleId::Zero) {
        Ok(p) => p,
        Err(e) => return usage_error(e.to_string()),
    };
    let bounds = Bounds::default();
    let result = match signsearch::search(degree, trials, seed, params, &bounds) {
        Ok(r) => r,
        Err(e) => return usage_error(e.to_string()),
    };
    let mut report = Report::new("signs-search");
    report.push("degree", result.degree_bound);
    report.push("trials", result.trials);
    report.push("seed", result.seed);
    report.push("m", result.params.m);
    report.push("n", result.params.n);
    report.push("ring", result.params.ring);
    report.push(
        "selectors",
        SignRuleId::ALL
            .iter()
            .map(|s| s.name())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.push("rules-enumerated", result.rules_enumerated);
    report.push("untested", result.untested);
    report.push("survivors", result.survivor_count);
    report.push("eliminated", result.eliminated_count);
    report.push("truncated", result.truncated);
    for (encoding, passes) in &result.survivors {
        report.push(format!("survivor/{encoding}"), format!("passes={passes}"));
    }
    for ((trial, pattern, selector), element) in &result.residuals {
        report.push(
            format!(
                "residual/t{trial}/{}/{}",
                selector.name(),
                signsearch::pattern_string(*pattern)
            ),
            textio::print_element(element),
        );
    }
    for rule in &result.eliminated {
        report.push(
            format!("rule/{}", rule.encoding),
            format!(
                "passes={} first-fail={} pattern={}",
                rule.passes,
                rule.first_fail_trial,
                signsearch::pattern_string(rule.pattern)
            ),
        );
    }
    (EXIT_OK, report.render())
}

fn cmd_export_dot(args: &[String]) -> (i32, String) {
    let parsed = match parse_args(args, &[], &[]) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let file = match parsed.positionals.as_slice() {
        [f] => f.clone(),
        _ => return usage_error("export-dot expects exactly one element file"),
    };
    // Shapes do not depend on the ring; Z keeps even multiplicities alive.
    let params = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => return usage_error(format!("cannot read `{file}`: {e}")),
    };
    let element = match textio::parse_element(&text, &params) {
        Ok(e) => e,
        Err(e) => return usage_error(format!("parse error in `{file}`: {e}")),
    };
    (EXIT_OK, dot::export_dot_element(&element))
}

fn cmd_selftest(args: &[String]) -> (i32, String) {
    if !args.is_empty() {
        return usage_error("selftest takes no arguments");
    }
    let mut report = Report::new("selftest");
    let mut all_ok = true;
    let mut record = |report: &mut Report, name: &str, ok: bool| {
        report.push(format!("selftest/{name}"), if ok { "ok" } else { "FAIL" });
        all_ok &= ok;
    };

    // Canonical forms are invariant under scrambling.
    let bounds = Bounds::default();
    let mut canon_ok = true;
    {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for seed in 0..20u64 {
            let g = lab::random_generator(seed, &bounds, "s");
            let canon = g.shape().canonicalize();
            for _ in 0..5 {
                canon_ok &= g.shape().scrambled(&mut rng).canonicalize() == canon;
            }
        }
    }
    record(&mut report, "canonical-form-invariance", canon_ok);

    let z2 = AlgebraParams::new(2, 1, false, Ring::Z2, SignRuleId::Zero).unwrap();
    let z2_boundary = AlgebraParams::new(2, 1, true, Ring::Z2, SignRuleId::Zero).unwrap();
    let z = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();
    let quick = |name: IdentityName, family: InputFamily, params: AlgebraParams, trials: usize| {
        lab::check(
            IdentitySpec { name, family },
            trials,
            12345,
            params,
            &bounds,
        )
        .failures
            == 0
    };
    record(
        &mut report,
        "prop42",
        quick(IdentityName::Prop42, InputFamily::General, z2, 40),
    );
    record(
        &mut report,
        "jacobi-mod2",
        quick(IdentityName::JacobiMod2, InputFamily::General, z2, 25),
    );
    record(
        &mut report,
        "delta-sq-boundary",
        quick(IdentityName::DeltaSq, InputFamily::General, z2_boundary, 40),
    );
    record(
        &mut report,
        "assoc-restricted",
        quick(IdentityName::Assoc, InputFamily::OneGradingOneMark, z, 40),
    );

    // Grammar round trip.
    let sample = "2*gen(a, deg=-1, copies=2, marks=[{g=1;(0,0),(1,0)}{g=2;}]) + gen(b.c, deg=3, copies=1, marks=[{g=1;(0,0)}])";
    let round_trip_ok = match textio::parse_element(sample, &z) {
        Ok(e) => {
            let printed = textio::print_element(&e);
            textio::parse_element(&printed, &z)
                .map(|e2| e2 == e)
                .unwrap_or(false)
        }
        Err(_) => false,
    };
    record(&mut report, "grammar-round-trip", round_trip_ok);

    // The 5.2 symmetry collapses by canonicalization at every assignment.
    let mut sym_ok = true;
    for i in 0..16u32 {
        let bits = [
            i & 1 == 1,
            i >> 1 & 1 == 1,
            i >> 2 & 1 == 1,
            i >> 3 & 1 == 1,
        ];
        let ctx = bv::BvContext::new(bits, bv::DeltaMode::Keep);
        sym_ok &= bv::identity_target(&ctx, bv::GerstenhaberIdentity::Symmetry52).is_zero();
    }
    record(&mut report, "bv-52-symmetry", sym_ok);

    report.push(
        "verdict",
        if all_ok {
            "PASS"
        } else {
            "DIVERGES-FROM-THEORY"
        },
    );
    (
        if all_ok { EXIT_OK } else { EXIT_DIVERGES },
        report.render(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_strs(args: &[&str]) -> (i32, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        run(&args)
    }

    #[test]
    fn unknown_command_is_usage_error() {
        let (code, out) = run_strs(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.contains("usage:"));
    }

    #[test]
    fn check_prop42_passes() {
        let (code, out) = run_strs(&[
            "check", "prop42", "--trials", "50", "--seed", "7", "--ring", "z2", "--n", "1", "--m",
            "2",
        ]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("verdict: PASS"));
        assert!(out.contains("failures: 0"));
    }

    #[test]
    fn check_assoc_general_diverges() {
        let (code, out) = run_strs(&[
            "check", "assoc", "--family", "general", "--trials", "150", "--seed", "5", "--ring",
            "z",
        ]);
        assert_eq!(code, EXIT_DIVERGES, "{out}");
        assert!(out.contains("verdict: DIVERGES-FROM-THEORY"));
        assert!(out.contains("minimized-diff: "));
    }

    #[test]
    fn check_unknown_identity_is_usage_error() {
        let (code, _) = run_strs(&["check", "nonsense"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn reports_are_reproducible() {
        let args = ["check", "jacobi-mod2", "--trials", "30", "--seed", "11"];
        let (c1, o1) = run_strs(&args);
        let (c2, o2) = run_strs(&args);
        assert_eq!(c1, c2);
        assert_eq!(o1, o2);
    }

    #[test]
    fn koszul_sign_rule_keeps_prop42_exact() {
        let (code, out) = run_strs(&[
            "check",
            "prop42",
            "--trials",
            "60",
            "--seed",
            "9",
            "--ring",
            "z",
            "--sign-rule",
            "koszul",
        ]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("sign-rule: koszul"));
        assert!(out.contains("verdict: PASS"));
    }

    #[test]
    fn delta_sq_exit_codes_depend_on_hypothesis() {
        let (code, out) = run_strs(&[
            "check",
            "delta-sq",
            "--boundary",
            "--trials",
            "50",
            "--seed",
            "2",
            "--ring",
            "z",
        ]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("verdict: PASS"));
        let (code, out) = run_strs(&[
            "check", "delta-sq", "--trials", "50", "--seed", "2", "--ring", "z",
        ]);
        // No claim without the hypothesis: failures are an open outcome.
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("verdict: FAILS-ON-SAMPLE"));
    }

    #[test]
    fn selftest_passes() {
        let (code, out) = run_strs(&["selftest"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("verdict: PASS"));
    }

    #[test]
    fn bv_verify_reports_and_diverges_with_even_n_nonmembers() {
        let (code, out) = run_strs(&["bv", "verify", "--bound", "4"]);
        // The even-n non-memberships (5.3/5.5) make the overall verdict a
        // divergence; the report carries certificates and residuals.
        assert_eq!(code, EXIT_DIVERGES);
        assert!(out.contains("summary: 48/64 member"), "{out}");
        assert!(out.contains("certificate/a0b0c0n1/5.3: "));
        assert!(out.contains("residual/a0b0c0n0/5.5: "));
        assert!(out.contains("verdict: DIVERGES-FROM-THEORY"));
    }

    #[test]
    fn signs_search_small_run() {
        let (code, out) = run_strs(&[
            "signs", "search", "--degree", "1", "--trials", "16", "--seed", "3",
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("rules-enumerated: 65536"));
        assert!(
            out.contains("rule/zero/00/00/00: "),
            "all-zero rule eliminated on generic trials"
        );
        assert!(out.contains("residual/t"));
    }
}
