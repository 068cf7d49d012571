//! DOT rendering of garland shapes: copies as round nodes, marks as square
//! nodes labeled with their grading, and one edge from a mark to the host
//! copy of each of its points (so multiplicity shows as parallel edges).
//! Shapes are canonicalized first, which makes the output deterministic up to
//! isomorphism of the input.

use crate::calculus::Element;
use crate::shape::GarlandShape;

pub fn export_dot(shape: &GarlandShape, graph_name: &str) -> String {
    let shape = shape.canonicalize();
    let mut out = String::new();
    out.push_str(&format!("digraph {graph_name} {{\n"));
    for c in 0..shape.copies() {
        out.push_str(&format!("  c{c} [shape=circle, label=\"P{c}\"];\n"));
    }
    for (i, mark) in shape.marks().iter().enumerate() {
        out.push_str(&format!(
            "  m{i} [shape=square, label=\"g={}\"];\n",
            mark.grading()
        ));
    }
    for (i, mark) in shape.marks().iter().enumerate() {
        for p in mark.points() {
            out.push_str(&format!("  m{i} -> c{};\n", p.copy));
        }
    }
    out.push_str("}\n");
    out
}

/// One digraph per term, in canonical term order.
pub fn export_dot_element(element: &Element) -> String {
    element
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| export_dot(&t.shape, &format!("g{i}")))
        .collect::<Vec<_>>()
        .join("")
}
