//! The element grammar: parsing, canonical printing, errors.
//!
//! ```bash
//! cargo run -p garlands --example element_grammar
//! ```

use garlands::calculus::SignRuleId;
use garlands::textio::{parse_element, print_element};
use garlands::{AlgebraParams, Ring};

fn main() {
    let params = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();

    // Whitespace-insensitive input; printing is canonical (labels renamed,
    // terms sorted, duplicate terms collected).
    let text = "3*gen(beta, deg=-1, copies=2, marks=[{g=2;(1,x),(0,y)}{g=1;(1,x)}])
              + gen(alpha, deg=4, copies=1, marks=[{g=1;}])
              + 3*gen(beta, deg=-1, copies=2, marks=[{g=2;(1,q),(0,r)}{g=1;(1,q)}])";
    let element = parse_element(text, &params).unwrap();
    println!("parsed {} distinct terms", element.terms().len());
    println!("canonical: {}", print_element(&element));

    // Round trip: printing then parsing is the identity on canonical elements.
    let again = parse_element(&print_element(&element), &params).unwrap();
    assert_eq!(again, element);

    // Errors carry positions.
    for bad in [
        "gen(a, deg=2, copies=1, marks=[{g=0;(0,p)}])",
        "gen(a, deg=2, copies=1, marks=[{g=1;(3,p)}])",
        "gen(a deg=2)",
    ] {
        let err = parse_element(bad, &params).unwrap_err();
        println!("rejected: {bad}\n  -> {err}");
    }
}
