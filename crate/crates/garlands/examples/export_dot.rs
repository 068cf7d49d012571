//! Rendering garlands as DOT graphs.
//!
//! Copies are round nodes, marks are square nodes labeled with their grading,
//! and each point contributes one edge from its mark to its host copy.
//! Isomorphic shapes render byte-identically (canonicalize first).
//!
//! ```bash
//! cargo run -p garlands --example export_dot | dot -Tsvg > garland.svg
//! ```

use garlands::calculus::SignRuleId;
use garlands::dot::export_dot_element;
use garlands::textio::parse_element;
use garlands::{AlgebraParams, Ring};

fn main() {
    let params = AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap();
    let element = parse_element(
        "gen(chain, deg=0, copies=3, marks=[{g=1;(0,p),(1,p)}{g=2;(1,q),(2,q)}{g=1;(2,r)}])",
        &params,
    )
    .unwrap();
    print!("{}", export_dot_element(&element));
}
