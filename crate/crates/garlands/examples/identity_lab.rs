//! Seeded randomized identity checking with counterexample shrinking.
//!
//! The lab evaluates both sides of an identity on fresh random generators,
//! compares canonical forms, and greedily shrinks the first failing input.
//! General-family associativity is the interesting case: it diverges at
//! shape level, and the minimized counterexample pins the mechanism (an
//! outer factor with two grading-1 marks).
//!
//! ```bash
//! cargo run -p garlands --example identity_lab
//! ```

use garlands::calculus::SignRuleId;
use garlands::lab::{check, Bounds, IdentityName, IdentitySpec, InputFamily};
use garlands::textio::print_element;
use garlands::{Algebra, AlgebraParams, Ring};

fn main() {
    let bounds = Bounds::default();
    let z2 = AlgebraParams::new(2, 1, false, Ring::Z2, SignRuleId::Zero).unwrap();
    let z = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();

    for (name, family, params) in [
        (IdentityName::Comm, InputFamily::General, z2),
        (IdentityName::Prop42, InputFamily::General, z2),
        (IdentityName::JacobiMod2, InputFamily::General, z2),
        (IdentityName::Assoc, InputFamily::OneGradingOneMark, z),
    ] {
        let report = check(IdentitySpec { name, family }, 100, 7, params, &bounds);
        println!(
            "{:>12} on {:<18} {}/{} passed",
            name.name(),
            family.name(),
            report.passes,
            report.trials
        );
    }

    // The divergent case, with its shrunk witness.
    let report = check(
        IdentitySpec {
            name: IdentityName::Assoc,
            family: InputFamily::General,
        },
        200,
        7,
        z,
        &bounds,
    );
    println!(
        "{:>12} on {:<18} {}/{} passed",
        "assoc", "general", report.passes, report.trials
    );
    if let (Some(min), Some(diff)) = (&report.minimized, &report.minimized_diff) {
        let alg = Algebra::new(report.params);
        println!("minimized counterexample (found at trial {}):", min.trial);
        for g in &min.generators {
            println!("  {} = {}", g.name, print_element(&alg.generator(g)));
        }
        println!("  (a•b)•c − a•(b•c) = {}", print_element(diff));
    }
}
