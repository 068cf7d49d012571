//! Searching for Jacobi sign conventions over Z.
//!
//! Each candidate assigns the three Jacobi summands prefactors (−1)^{εᵢ}
//! with εᵢ multilinear in the parities, on top of a construction-sign
//! selector. The search eliminates a rule the first time its signed sum has
//! a nonzero residual. On generic trials the three pairwise cancellation
//! classes impose contradictory constraints, so no rule of this
//! multiplicative form survives — the report documents each elimination with
//! the residual it hit.
//!
//! ```bash
//! cargo run -p garlands --example sign_search
//! ```

use garlands::calculus::SignRuleId;
use garlands::lab::Bounds;
use garlands::signsearch::{pattern_string, rule_count, search};
use garlands::textio::print_element;
use garlands::{AlgebraParams, Ring};

fn main() {
    let params = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();
    let report = search(1, 40, 9, params, &Bounds::default()).unwrap();
    println!(
        "degree 1: {} rules enumerated ({} per slot over 5 basis monomials, 2 selectors)",
        rule_count(1).unwrap(),
        32
    );
    println!(
        "trials: {}  survivors: {}",
        report.trials, report.survivor_count
    );

    // Where the all-zero rule dies, and what it leaves behind.
    let zero_rule = report
        .eliminated
        .iter()
        .find(|e| e.encoding == "zero/00/00/00")
        .expect("the all-zero rule is eliminated on generic trials");
    println!(
        "all-zero rule: passes={} first-fail=trial {} pattern={}",
        zero_rule.passes,
        zero_rule.first_fail_trial,
        pattern_string(zero_rule.pattern)
    );
    let residual = &report.residuals[&(
        zero_rule.first_fail_trial,
        zero_rule.pattern,
        SignRuleId::Zero,
    )];
    println!("its first residual has {} terms:", residual.terms().len());
    println!("  {}", print_element(residual));
    println!(
        "note: the mod-2 shadow of every rule is the plain Jacobi sum, which cancels; \
         the obstruction is integral only"
    );
}
