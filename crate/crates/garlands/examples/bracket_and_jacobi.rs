//! The string bracket and its Jacobi identity mod 2.
//!
//! The bracket of two elements adds, for every pair of copies, a fresh
//! two-point grading-2 mark joining them. Over Z/2 the threefold bracket sum
//! cancels exactly: terms of the three double brackets pair up by shape.
//!
//! ```bash
//! cargo run -p garlands --example bracket_and_jacobi
//! ```

use garlands::calculus::SignRuleId;
use garlands::lab::{random_generator, Bounds};
use garlands::textio::print_element;
use garlands::{Algebra, AlgebraParams, Ring};

fn main() {
    let params = AlgebraParams::new(2, 1, false, Ring::Z2, SignRuleId::Zero).unwrap();
    let alg = Algebra::new(params);
    let bounds = Bounds::default();

    let a = alg.generator(&random_generator(1, &bounds, "a"));
    let b = alg.generator(&random_generator(7, &bounds, "b"));
    let c = alg.generator(&random_generator(6, &bounds, "c"));
    println!("a = {}", print_element(&a));
    println!("b = {}", print_element(&b));
    println!("c = {}", print_element(&c));

    let ab = alg.bracket(&a, &b).unwrap();
    println!("[a,b] has {} terms", ab.terms().len());
    if let Some(t) = ab.terms().first() {
        println!(
            "first term: {}",
            print_element(&alg.from_raw(vec![t.clone()]))
        );
    }

    // Degree bookkeeping: |[a,b]| = |a| + |b| + 2n.
    for t in ab.terms() {
        let da = a.terms()[0].degree;
        let db = b.terms()[0].degree;
        assert_eq!(t.degree, da + db + 2 * params.n);
    }

    // Jacobi mod 2: the cyclic double-bracket sum collapses to zero.
    let j1 = alg.bracket(&ab, &c).unwrap();
    let j2 = alg.bracket(&alg.bracket(&b, &c).unwrap(), &a).unwrap();
    let j3 = alg.bracket(&alg.bracket(&c, &a).unwrap(), &b).unwrap();
    let sum = alg.add(&alg.add(&j1, &j2).unwrap(), &j3).unwrap();
    println!(
        "[[a,b],c] + [[b,c],a] + [[c,a],b] = {}",
        print_element(&sum)
    );
    assert!(sum.is_zero());
    println!("jacobi-mod2: cancels termwise, as expected");
}
