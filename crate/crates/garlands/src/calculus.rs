//! The operation layer: canonical formal sums of decorated terms and the
//! graded operations on them.
//!
//! Elements are finite sums of [`DecoratedTerm`]s. Every operation is a pure
//! rewrite on shapes and gradings:
//!
//! - `product` (•): one summand per pair of grading-1 marks of the factors;
//!   the chosen pair is replaced by its union as a single grading-1 mark on
//!   the disjoint union, everything else survives unchanged. Degrees add.
//! - `bracket` ([-,-]): one summand per pair of copies; the disjoint union
//!   gains a fresh two-point grading-2 mark joining the chosen copies.
//!   Degrees add plus 2n.
//! - `lift`: one summand per copy; a fresh singleton grading-1 mark appears
//!   on the chosen copy and every pre-existing mark's grading goes up by one.
//!   Degree goes up by n.
//! - `proj`: grading ≠ 1 goes down by one; grading 1 with two or more points
//!   goes up to 2; grading 1 with at most one point is erased. Degree fixed.
//! - `delta`: `lift ∘ proj`.
//!
//! Fresh singleton marks minted by `lift` carry a freshness tag. When the
//! base manifold bounds (`p_is_boundary`), `proj` kills any term in which it
//! erases a still-fresh mark — that is exactly the vanishing of `proj ∘ lift`
//! and hence of Δ². The tag is cleared by every other operation that touches
//! the mark.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::shape::{GarlandShape, Mark, PointRef, ShapeError};
use crate::sign::Coefficient;
pub use crate::sign::Ring;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CalculusError {
    #[error("operands built with different algebra parameters: {left} vs {right}")]
    ParamsMismatch {
        left: AlgebraParams,
        right: AlgebraParams,
    },
    #[error("dimension must be >= 1, got {0}")]
    BadDimension(i64),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Registered sign conventions for integer-coefficient summands.
///
/// `Zero` assigns every product/bracket summand the sign +1, reproducing the
/// Z/2 calculus with integer multiplicities. `Koszul` weights a product
/// summand by (−1)^{|t1||t2|} and a bracket summand by (−1)^{(|t1|+n)(|t2|+n)};
/// since `lift` shifts degree by n, proj(lift α • lift β) = [α, β] stays exact
/// under either convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum SignRuleId {
    #[default]
    Zero,
    Koszul,
}

impl SignRuleId {
    pub const ALL: [SignRuleId; 2] = [SignRuleId::Zero, SignRuleId::Koszul];

    pub fn name(&self) -> &'static str {
        match self {
            SignRuleId::Zero => "zero",
            SignRuleId::Koszul => "koszul",
        }
    }

    pub fn parse(s: &str) -> Option<SignRuleId> {
        match s {
            "zero" => Some(SignRuleId::Zero),
            "koszul" => Some(SignRuleId::Koszul),
            _ => None,
        }
    }

    fn product_sign(&self, d1: i64, d2: i64, _n: i64) -> bool {
        match self {
            SignRuleId::Zero => false,
            SignRuleId::Koszul => odd(d1) && odd(d2),
        }
    }

    fn bracket_sign(&self, d1: i64, d2: i64, n: i64) -> bool {
        match self {
            SignRuleId::Zero => false,
            SignRuleId::Koszul => (odd(d1) ^ odd(n)) && (odd(d2) ^ odd(n)),
        }
    }
}

impl fmt::Display for SignRuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

/// Session parameters, fixed for the lifetime of an [`Algebra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlgebraParams {
    /// Dimension of the ambient manifold M; bookkeeping only.
    pub m: i64,
    /// Dimension of the base manifold P; enters bracket/lift/delta degrees.
    pub n: i64,
    /// Whether P bounds; enables the proj ∘ lift vanishing.
    pub p_is_boundary: bool,
    pub ring: Ring,
    /// Sign convention for integer-mode summands; ignored over Z/2.
    pub sign_rule: SignRuleId,
}

impl AlgebraParams {
    pub fn new(
        m: i64,
        n: i64,
        p_is_boundary: bool,
        ring: Ring,
        sign_rule: SignRuleId,
    ) -> Result<Self, CalculusError> {
        if m < 1 {
            return Err(CalculusError::BadDimension(m));
        }
        if n < 1 {
            return Err(CalculusError::BadDimension(n));
        }
        Ok(AlgebraParams {
            m,
            n,
            p_is_boundary,
            ring,
            sign_rule,
        })
    }
}

impl fmt::Display for AlgebraParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m={} n={} boundary={} ring={} sign-rule={}",
            self.m, self.n, self.p_is_boundary, self.ring, self.sign_rule
        )
    }
}

/// A named formal bordism class: a degree in the shifted grading plus a
/// canonical shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseGenerator {
    pub name: String,
    pub degree: i64,
    shape: GarlandShape,
}

impl BaseGenerator {
    pub fn new(name: impl Into<String>, degree: i64, shape: GarlandShape) -> Self {
        BaseGenerator {
            name: name.into(),
            degree,
            shape: shape.canonicalize(),
        }
    }

    pub fn shape(&self) -> &GarlandShape {
        &self.shape
    }
}

/// One summand of an element: coefficient, degree, canonical shape, the
/// multiset of generator names it came from, and the set of still-fresh mark
/// indices (into the canonical mark list).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedTerm {
    pub coefficient: Coefficient,
    pub degree: i64,
    pub shape: GarlandShape,
    pub provenance: Vec<String>,
    pub fresh: BTreeSet<usize>,
}

impl DecoratedTerm {
    /// Collection key: everything but the coefficient.
    fn key(&self) -> (i64, &GarlandShape, &Vec<String>, &BTreeSet<usize>) {
        (self.degree, &self.shape, &self.provenance, &self.fresh)
    }

    fn tags(&self) -> Vec<u8> {
        (0..self.shape.marks().len())
            .map(|i| u8::from(self.fresh.contains(&i)))
            .collect()
    }
}

/// A canonical formal sum of decorated terms. Terms are sorted, keys are
/// unique and no coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    params: AlgebraParams,
    terms: Vec<DecoratedTerm>,
}

impl Element {
    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    pub fn terms(&self) -> &[DecoratedTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn collect(params: AlgebraParams, raw: Vec<DecoratedTerm>) -> Element {
        let mut sorted = raw;
        sorted.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut terms: Vec<DecoratedTerm> = Vec::with_capacity(sorted.len());
        for term in sorted {
            match terms.last_mut() {
                Some(last) if last.key() == term.key() => {
                    last.coefficient = last.coefficient.add(&term.coefficient);
                }
                _ => terms.push(term),
            }
        }
        terms.retain(|t| !t.coefficient.is_zero());
        Element { params, terms }
    }
}

/// The operation context. All operands of a binary operation must have been
/// built with the same parameters.
#[derive(Debug, Clone, Copy)]
pub struct Algebra {
    params: AlgebraParams,
}

impl Algebra {
    pub fn new(params: AlgebraParams) -> Self {
        Algebra { params }
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    pub fn zero(&self) -> Element {
        Element {
            params: self.params,
            terms: Vec::new(),
        }
    }

    /// The unit of •: the degree-0 class of the ambient manifold component,
    /// carried by zero copies with a single empty grading-1 mark.
    pub fn unit(&self) -> Element {
        let shape = GarlandShape::new(0, vec![Mark::new(1, vec![]).unwrap()]).unwrap();
        self.from_raw(vec![DecoratedTerm {
            coefficient: Coefficient::one(self.params.ring),
            degree: 0,
            shape: shape.canonicalize(),
            provenance: Vec::new(),
            fresh: BTreeSet::new(),
        }])
    }

    pub fn generator(&self, gen: &BaseGenerator) -> Element {
        self.from_raw(vec![DecoratedTerm {
            coefficient: Coefficient::one(self.params.ring),
            degree: gen.degree,
            shape: gen.shape().clone(),
            provenance: vec![gen.name.clone()],
            fresh: BTreeSet::new(),
        }])
    }

    /// Build an element from raw (already canonically-shaped) terms,
    /// collecting duplicates.
    pub fn from_raw(&self, raw: Vec<DecoratedTerm>) -> Element {
        Element::collect(self.params, raw)
    }

    pub fn term(
        &self,
        coefficient: i64,
        degree: i64,
        shape: &GarlandShape,
        provenance: Vec<String>,
    ) -> Element {
        let mut provenance = provenance;
        provenance.sort();
        self.from_raw(vec![DecoratedTerm {
            coefficient: Coefficient::new(self.params.ring, coefficient),
            degree,
            shape: shape.canonicalize(),
            provenance,
            fresh: BTreeSet::new(),
        }])
    }

    fn check_params(&self, e1: &Element, e2: &Element) -> Result<(), CalculusError> {
        if e1.params != e2.params || e1.params != self.params {
            return Err(CalculusError::ParamsMismatch {
                left: e1.params,
                right: e2.params,
            });
        }
        Ok(())
    }

    pub fn add(&self, e1: &Element, e2: &Element) -> Result<Element, CalculusError> {
        self.check_params(e1, e2)?;
        let mut raw = e1.terms.clone();
        raw.extend(e2.terms.iter().cloned());
        Ok(Element::collect(self.params, raw))
    }

    pub fn negate(&self, e: &Element) -> Element {
        debug_assert_eq!(e.params, self.params);
        Element {
            params: e.params,
            terms: e
                .terms
                .iter()
                .map(|t| DecoratedTerm {
                    coefficient: t.coefficient.negate(),
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// e1 − e2 (over Z/2 this is the same as addition).
    pub fn sub(&self, e1: &Element, e2: &Element) -> Result<Element, CalculusError> {
        self.add(e1, &self.negate(e2))
    }

    /// Raw product expansion of a term pair: one summand per (grading-1 mark
    /// of `t1`, grading-1 mark of `t2`), counted with multiplicity, before
    /// any collection.
    pub fn expand_product(&self, t1: &DecoratedTerm, t2: &DecoratedTerm) -> Vec<DecoratedTerm> {
        let (union, emb1, emb2) = t1.shape.disjoint_union(&t2.shape);
        let mut tags = vec![0u8; union.marks().len()];
        for &i in &t1.fresh {
            tags[emb1.mark_position(i)] = 1;
        }
        for &j in &t2.fresh {
            tags[emb2.mark_position(j)] = 1;
        }
        let g1_left = t1.shape.grading_one_marks();
        let g1_right = t2.shape.grading_one_marks();
        let sign = self
            .params
            .sign_rule
            .product_sign(t1.degree, t2.degree, self.params.n);
        let coefficient = t1.coefficient.mul(&t2.coefficient).signed(sign);
        let mut provenance = t1.provenance.clone();
        provenance.extend(t2.provenance.iter().cloned());
        provenance.sort();
        let mut out = Vec::with_capacity(g1_left.len() * g1_right.len());
        for &i in &g1_left {
            for &j in &g1_right {
                let pos1 = emb1.mark_position(i);
                let pos2 = emb2.mark_position(j);
                let mut points: Vec<PointRef> = union.marks()[pos1].points().to_vec();
                points.extend_from_slice(union.marks()[pos2].points());
                let merged = Mark::new(1, points).unwrap();
                let mut marks: Vec<Mark> = Vec::with_capacity(union.marks().len() - 1);
                let mut mark_tags: Vec<u8> = Vec::with_capacity(union.marks().len() - 1);
                for (pos, mark) in union.marks().iter().enumerate() {
                    if pos == pos1 || pos == pos2 {
                        continue;
                    }
                    marks.push(mark.clone());
                    mark_tags.push(tags[pos]);
                }
                marks.push(merged);
                mark_tags.push(0);
                let shape = GarlandShape::new(union.copies(), marks.clone()).unwrap();
                // GarlandShape::new sorts marks; realign tags.
                let mut pairs: Vec<(Mark, u8)> = marks.into_iter().zip(mark_tags).collect();
                pairs.sort_by(|a, b| a.0.cmp(&b.0));
                let sorted_tags: Vec<u8> = pairs.into_iter().map(|(_, t)| t).collect();
                let (canonical, canon_tags) = shape.canonicalize_with_tags(&sorted_tags);
                out.push(DecoratedTerm {
                    coefficient,
                    degree: t1.degree + t2.degree,
                    shape: canonical,
                    provenance: provenance.clone(),
                    fresh: fresh_from_tags(&canon_tags),
                });
            }
        }
        out
    }

    /// Raw bracket expansion of a term pair: one summand per ordered pair of
    /// copies, each adding a fresh two-point grading-2 mark. Freshness tags of
    /// both factors are cleared.
    pub fn expand_bracket(&self, t1: &DecoratedTerm, t2: &DecoratedTerm) -> Vec<DecoratedTerm> {
        let (union, _, _) = t1.shape.disjoint_union(&t2.shape);
        let k1 = t1.shape.copies();
        let k2 = t2.shape.copies();
        let sign = self
            .params
            .sign_rule
            .bracket_sign(t1.degree, t2.degree, self.params.n);
        let coefficient = t1.coefficient.mul(&t2.coefficient).signed(sign);
        let mut provenance = t1.provenance.clone();
        provenance.extend(t2.provenance.iter().cloned());
        provenance.sort();
        let mut out = Vec::with_capacity(k1 * k2);
        for c1 in 0..k1 {
            for c2 in 0..k2 {
                let c2 = k1 + c2;
                let p1 = PointRef::new(c1, union.fresh_label(c1));
                let p2 = PointRef::new(c2, union.fresh_label(c2));
                let mut marks = union.marks().to_vec();
                marks.push(Mark::new(2, vec![p1, p2]).unwrap());
                let shape = GarlandShape::new(union.copies(), marks).unwrap();
                out.push(DecoratedTerm {
                    coefficient,
                    degree: t1.degree + t2.degree + 2 * self.params.n,
                    shape: shape.canonicalize(),
                    provenance: provenance.clone(),
                    fresh: BTreeSet::new(),
                });
            }
        }
        out
    }

    /// Raw lift expansion of a term: one summand per copy (or a single
    /// summand minting the first copy when there are none). The new singleton
    /// mark is freshness-tagged; pre-existing marks are bumped and lose any
    /// tags of their own.
    pub fn expand_lift(&self, t: &DecoratedTerm) -> Vec<DecoratedTerm> {
        let bump = |shape: &GarlandShape| -> Vec<Mark> {
            shape
                .marks()
                .iter()
                .map(|m| m.with_grading(m.grading() + 1))
                .collect()
        };
        let mut out = Vec::new();
        if t.shape.copies() == 0 {
            let mut marks = bump(&t.shape);
            marks.push(Mark::new(1, vec![PointRef::new(0, 0)]).unwrap());
            let shape = GarlandShape::new(1, marks.clone()).unwrap();
            let tags = lift_tags(&shape);
            let (canonical, canon_tags) = shape.canonicalize_with_tags(&tags);
            out.push(DecoratedTerm {
                coefficient: t.coefficient,
                degree: t.degree + self.params.n,
                shape: canonical,
                provenance: t.provenance.clone(),
                fresh: fresh_from_tags(&canon_tags),
            });
            return out;
        }
        for c in 0..t.shape.copies() {
            let mut marks = bump(&t.shape);
            marks.push(Mark::new(1, vec![PointRef::new(c, t.shape.fresh_label(c))]).unwrap());
            let shape = GarlandShape::new(t.shape.copies(), marks).unwrap();
            let tags = lift_tags(&shape);
            let (canonical, canon_tags) = shape.canonicalize_with_tags(&tags);
            out.push(DecoratedTerm {
                coefficient: t.coefficient,
                degree: t.degree + self.params.n,
                shape: canonical,
                provenance: t.provenance.clone(),
                fresh: fresh_from_tags(&canon_tags),
            });
        }
        out
    }

    /// proj on a single term; `None` when the boundary hypothesis kills it
    /// (a still-fresh mark got erased).
    pub fn apply_proj(&self, t: &DecoratedTerm) -> Option<DecoratedTerm> {
        let tags = t.tags();
        let mut marks = Vec::with_capacity(t.shape.marks().len());
        for (i, mark) in t.shape.marks().iter().enumerate() {
            if mark.grading() != 1 {
                marks.push(mark.with_grading(mark.grading() - 1));
            } else if mark.size() > 1 {
                marks.push(mark.with_grading(2));
            } else {
                // Erased. Grading-1 marks with zero or one point impose no
                // constraint; an erased fresh mark triggers the vanishing.
                if self.params.p_is_boundary && tags[i] == 1 {
                    return None;
                }
            }
        }
        let shape = GarlandShape::new(t.shape.copies(), marks).unwrap();
        Some(DecoratedTerm {
            coefficient: t.coefficient,
            degree: t.degree,
            shape: shape.canonicalize(),
            provenance: t.provenance.clone(),
            fresh: BTreeSet::new(),
        })
    }

    pub fn product(&self, e1: &Element, e2: &Element) -> Result<Element, CalculusError> {
        self.check_params(e1, e2)?;
        let mut raw = Vec::new();
        for t1 in &e1.terms {
            for t2 in &e2.terms {
                raw.extend(self.expand_product(t1, t2));
            }
        }
        Ok(Element::collect(self.params, raw))
    }

    pub fn bracket(&self, e1: &Element, e2: &Element) -> Result<Element, CalculusError> {
        self.check_params(e1, e2)?;
        let mut raw = Vec::new();
        for t1 in &e1.terms {
            for t2 in &e2.terms {
                raw.extend(self.expand_bracket(t1, t2));
            }
        }
        Ok(Element::collect(self.params, raw))
    }

    pub fn lift(&self, e: &Element) -> Element {
        debug_assert_eq!(e.params, self.params);
        let mut raw = Vec::new();
        for t in &e.terms {
            raw.extend(self.expand_lift(t));
        }
        Element::collect(self.params, raw)
    }

    pub fn proj(&self, e: &Element) -> Element {
        debug_assert_eq!(e.params, self.params);
        let raw = e.terms.iter().filter_map(|t| self.apply_proj(t)).collect();
        Element::collect(self.params, raw)
    }

    pub fn delta(&self, e: &Element) -> Element {
        self.lift(&self.proj(e))
    }
}

fn fresh_from_tags(tags: &[u8]) -> BTreeSet<usize> {
    tags.iter()
        .enumerate()
        .filter(|(_, &t)| t == 1)
        .map(|(i, _)| i)
        .collect()
}

/// Tags for a just-lifted shape: exactly the grading-1 marks are fresh (the
/// bump made every pre-existing mark grading >= 2).
fn lift_tags(shape: &GarlandShape) -> Vec<u8> {
    shape
        .marks()
        .iter()
        .map(|m| u8::from(m.grading() == 1))
        .collect()
}
