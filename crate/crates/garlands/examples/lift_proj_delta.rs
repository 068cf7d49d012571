//! lift, proj and Δ = lift ∘ proj.
//!
//! lift adds a fresh singleton grading-1 mark on each copy (one summand per
//! copy) and bumps every other mark's grading; proj rewrites gradings the
//! other way and erases singleton grading-1 marks. Their interplay gives the
//! bracket factorization and, when the base manifold bounds, Δ² = 0.
//!
//! ```bash
//! cargo run -p garlands --example lift_proj_delta
//! ```

use garlands::calculus::SignRuleId;
use garlands::textio::{parse_element, print_element};
use garlands::{Algebra, AlgebraParams, Ring};

fn main() {
    let free = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();
    let bounding = AlgebraParams::new(2, 1, true, Ring::Z, SignRuleId::Zero).unwrap();

    let alg = Algebra::new(free);
    let a = parse_element("gen(a, deg=1, copies=2, marks=[{g=1;(0,p),(1,p)}])", &free).unwrap();
    let b = parse_element("gen(b, deg=2, copies=1, marks=[{g=2;(0,u)}])", &free).unwrap();

    println!("a            = {}", print_element(&a));
    println!("lift a       = {}", print_element(&alg.lift(&a)));
    println!("proj a       = {}", print_element(&alg.proj(&a)));
    println!("delta a      = {}", print_element(&alg.delta(&a)));

    // The bracket factorization: proj(lift a • lift b) = [a, b], exactly,
    // term for term, over either ring.
    let lhs = alg.proj(&alg.product(&alg.lift(&a), &alg.lift(&b)).unwrap());
    let rhs = alg.bracket(&a, &b).unwrap();
    assert_eq!(lhs, rhs);
    println!(
        "proj(lift a • lift b) = [a,b] holds with {} terms",
        rhs.terms().len()
    );

    // With the boundary hypothesis, proj kills lift images outright.
    let balg = Algebra::new(bounding);
    let a_b = parse_element(
        "gen(a, deg=1, copies=2, marks=[{g=1;(0,p),(1,p)}])",
        &bounding,
    )
    .unwrap();
    println!(
        "boundary: proj(lift a) = {}",
        print_element(&balg.proj(&balg.lift(&a_b)))
    );
    println!(
        "boundary: delta(delta a) = {}",
        print_element(&balg.delta(&balg.delta(&a_b)))
    );
    assert!(balg.proj(&balg.lift(&a_b)).is_zero());
    assert!(balg.delta(&balg.delta(&a_b)).is_zero());

    // Without it, delta squared generally survives.
    let dd = alg.delta(&alg.delta(&a));
    println!("no boundary: delta(delta a) has {} terms", dd.terms().len());
    assert!(!dd.is_zero());
}
