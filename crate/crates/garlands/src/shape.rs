//! Garland shapes: copies of a base manifold plus graded marks.
//!
//! A shape records the pure combinatorics of a multimarked manifold: how many
//! copies there are, and for each mark its grading and the multiset of points
//! it pins (a point is a copy index plus an opaque label). Two shapes are the
//! same garland when one maps onto the other by permuting copies and renaming
//! points; [`GarlandShape::canonicalize`] picks a unique representative of
//! that class so equality is plain structural equality on canonical forms.

use std::fmt;

use thiserror::Error;

use crate::canon;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("point references copy {copy} but the shape has {copies} copies")]
    CopyOutOfRange { copy: usize, copies: usize },
    #[error("grading must be >= 1")]
    ZeroGrading,
}

/// A point on a specific copy. Labels are opaque: they matter only up to
/// per-copy renaming, and two `PointRef`s denote the same geometric point
/// exactly when copy and label both coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointRef {
    pub copy: usize,
    pub label: u32,
}

impl PointRef {
    pub fn new(copy: usize, label: u32) -> Self {
        PointRef { copy, label }
    }
}

/// A graded mark: a finite multiset of points (possibly empty, possibly with
/// repeats) together with a grading >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mark {
    grading: u32,
    points: Vec<PointRef>,
}

impl Mark {
    pub fn new(grading: u32, mut points: Vec<PointRef>) -> Result<Self, ShapeError> {
        if grading == 0 {
            return Err(ShapeError::ZeroGrading);
        }
        points.sort_unstable();
        Ok(Mark { grading, points })
    }

    pub fn grading(&self) -> u32 {
        self.grading
    }

    /// Multiset cardinality |m|, repeats counted.
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[PointRef] {
        &self.points
    }

    pub(crate) fn with_grading(&self, grading: u32) -> Mark {
        Mark {
            grading,
            points: self.points.clone(),
        }
    }

    pub(crate) fn map_points(&self, f: impl Fn(PointRef) -> PointRef) -> Mark {
        let mut points: Vec<PointRef> = self.points.iter().map(|&p| f(p)).collect();
        points.sort_unstable();
        Mark {
            grading: self.grading,
            points,
        }
    }
}

/// Copy/point embedding produced by [`GarlandShape::disjoint_union`]; applies
/// to marks and points of one argument to locate them inside the union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    copy_offset: usize,
    /// Index of this argument's mark `i` inside the union's mark list.
    mark_positions: Vec<usize>,
}

impl Embedding {
    pub fn apply_copy(&self, copy: usize) -> usize {
        copy + self.copy_offset
    }

    pub fn apply_point(&self, p: PointRef) -> PointRef {
        PointRef::new(p.copy + self.copy_offset, p.label)
    }

    pub fn mark_position(&self, mark_index: usize) -> usize {
        self.mark_positions[mark_index]
    }
}

/// Isomorphism invariant of a shape: copy count plus the sorted grading list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentSignature {
    pub copies: usize,
    pub gradings: Vec<u32>,
}

impl fmt::Display for ComponentSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gs: Vec<String> = self.gradings.iter().map(|g| g.to_string()).collect();
        write!(f, "({}; [{}])", self.copies, gs.join(","))
    }
}

/// A garland shape: `copies` copies of the base manifold and a multiset of
/// marks. Construction sorts the mark list so structural equality is multiset
/// equality; label-level canonicity is a separate step ([`Self::canonicalize`]).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GarlandShape {
    copies: usize,
    marks: Vec<Mark>,
}

impl GarlandShape {
    pub fn new(copies: usize, mut marks: Vec<Mark>) -> Result<Self, ShapeError> {
        for mark in &marks {
            for p in mark.points() {
                if p.copy >= copies {
                    return Err(ShapeError::CopyOutOfRange {
                        copy: p.copy,
                        copies,
                    });
                }
            }
        }
        marks.sort();
        Ok(GarlandShape { copies, marks })
    }

    /// The empty shape: zero copies, no marks.
    pub fn empty() -> Self {
        GarlandShape {
            copies: 0,
            marks: Vec::new(),
        }
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    /// Indices of grading-1 marks (the index set of the string product sum).
    pub fn grading_one_marks(&self) -> Vec<usize> {
        self.marks
            .iter()
            .enumerate()
            .filter(|(_, m)| m.grading() == 1)
            .map(|(i, _)| i)
            .collect()
    }

    /// Smallest label not in use on `copy` (for minting fresh points).
    pub fn fresh_label(&self, copy: usize) -> u32 {
        self.marks
            .iter()
            .flat_map(|m| m.points())
            .filter(|p| p.copy == copy)
            .map(|p| p.label + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn signature(&self) -> ComponentSignature {
        let mut gradings: Vec<u32> = self.marks.iter().map(|m| m.grading()).collect();
        gradings.sort_unstable();
        ComponentSignature {
            copies: self.copies,
            gradings,
        }
    }

    /// Unique representative of this shape's isomorphism class (copy
    /// permutation + per-copy point relabeling). Idempotent.
    pub fn canonicalize(&self) -> GarlandShape {
        let tags = vec![0u8; self.marks.len()];
        self.canonicalize_with_tags(&tags).0
    }

    /// Canonicalize while carrying one opaque tag per mark (aligned with
    /// `self.marks()`); tags take part in the labeling so that tagged marks
    /// keep a well-defined identity inside the canonical multiset. Returns
    /// the canonical shape and the tag vector aligned with its mark list.
    pub fn canonicalize_with_tags(&self, tags: &[u8]) -> (GarlandShape, Vec<u8>) {
        assert_eq!(tags.len(), self.marks.len(), "one tag per mark");
        canon::canonical_form(self, tags)
    }

    /// Canonical-form comparison: true iff the shapes are isomorphic.
    pub fn is_isomorphic_to(&self, other: &GarlandShape) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    /// Apply a random copy permutation and per-copy point relabeling; the
    /// result is isomorphic to `self` by construction (the sampling side of
    /// canonicalization checks).
    pub fn scrambled(&self, rng: &mut impl rand::Rng) -> GarlandShape {
        let mut perm: Vec<usize> = (0..self.copies).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let offset: u32 = rng.gen_range(0..50);
        let stride: u32 = rng.gen_range(1..7);
        let marks: Vec<Mark> = self
            .marks
            .iter()
            .map(|m| m.map_points(|p| PointRef::new(perm[p.copy], p.label * stride + offset)))
            .collect();
        GarlandShape::new(self.copies, marks).expect("relabeling preserves validity")
    }

    /// Disjoint union. Marks of both arguments survive unchanged; copies of
    /// `other` are shifted past `self`'s. Returns the union plus the two
    /// embeddings. The result is *not* canonicalized.
    pub fn disjoint_union(&self, other: &GarlandShape) -> (GarlandShape, Embedding, Embedding) {
        let offset = self.copies;
        // Build the mark list with provenance so the embeddings can report
        // where each argument's marks landed after sorting.
        let mut tagged: Vec<(Mark, bool, usize)> = Vec::new();
        for (i, m) in self.marks.iter().enumerate() {
            tagged.push((m.clone(), false, i));
        }
        for (i, m) in other.marks.iter().enumerate() {
            tagged.push((
                m.map_points(|p| PointRef::new(p.copy + offset, p.label)),
                true,
                i,
            ));
        }
        tagged.sort_by(|a, b| (&a.0, a.1, a.2).cmp(&(&b.0, b.1, b.2)));
        let mut left_positions = vec![0usize; self.marks.len()];
        let mut right_positions = vec![0usize; other.marks.len()];
        let mut marks = Vec::with_capacity(tagged.len());
        for (pos, (mark, from_right, idx)) in tagged.into_iter().enumerate() {
            if from_right {
                right_positions[idx] = pos;
            } else {
                left_positions[idx] = pos;
            }
            marks.push(mark);
        }
        let shape = GarlandShape {
            copies: self.copies + other.copies,
            marks,
        };
        (
            shape,
            Embedding {
                copy_offset: 0,
                mark_positions: left_positions,
            },
            Embedding {
                copy_offset: self.copies,
                mark_positions: right_positions,
            },
        )
    }
}

/// Convenience equality up to isomorphism.
pub fn shapes_equal(s1: &GarlandShape, s2: &GarlandShape) -> bool {
    s1.is_isomorphic_to(s2)
}
