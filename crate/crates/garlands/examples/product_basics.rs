//! The string product on garland shapes.
//!
//! Elements are formal sums of decorated terms. The product picks one
//! grading-1 mark from each factor and merges them into a single grading-1
//! mark on the disjoint union; everything else survives unchanged.
//!
//! ```bash
//! cargo run -p garlands --example product_basics
//! ```

use garlands::calculus::SignRuleId;
use garlands::textio::{parse_element, print_element};
use garlands::{Algebra, AlgebraParams, Ring};

fn main() {
    let params = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();
    let alg = Algebra::new(params);

    // Two generators given in the element grammar.
    let a = parse_element(
        "gen(a, deg=2, copies=1, marks=[{g=1;(0,p),(0,q)}])",
        &params,
    )
    .unwrap();
    let b = parse_element("gen(b, deg=1, copies=1, marks=[{g=1;(0,r)}])", &params).unwrap();

    let ab = alg.product(&a, &b).unwrap();
    println!("a        = {}", print_element(&a));
    println!("b        = {}", print_element(&b));
    println!("a • b    = {}", print_element(&ab));
    println!("degree    : 2 + 1 = {}", ab.terms()[0].degree);
    println!(
        "mark size : |m1| + |m2| = {}",
        ab.terms()[0].shape.marks()[0].size()
    );

    // The unit is the empty-marked zero-copy class; on elements whose terms
    // have exactly one grading-1 mark it is a strict unit.
    let unit = alg.unit();
    println!("unit     = {}", print_element(&unit));
    println!(
        "unit • a = {}",
        print_element(&alg.product(&unit, &a).unwrap())
    );
    assert_eq!(alg.product(&unit, &a).unwrap(), a);

    // A factor without grading-1 marks kills the product: the sum over mark
    // pairs is empty.
    let no_g1 = parse_element("gen(c, deg=0, copies=1, marks=[{g=2;(0,x)}])", &params).unwrap();
    println!("c        = {}", print_element(&no_g1));
    println!(
        "a • c    = {}",
        print_element(&alg.product(&a, &no_g1).unwrap())
    );
}
