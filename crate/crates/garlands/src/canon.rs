//! Canonical labeling of garland shapes.
//!
//! A shape is viewed as a tripartite incidence structure: copy nodes, point
//! nodes (deduplicated `(copy, label)` pairs) and mark nodes, with point-copy
//! edges and mark-point edges carrying multiplicities. Canonicalization is
//! individualization-refinement over that structure: iterated color
//! refinement, branching on the first ambiguous copy/point cell, taking the
//! minimum leaf encoding. The minimum over leaves is an isomorphism invariant
//! because refinement, cell choice and branching commute with isomorphism;
//! candidates with identical exact adjacency generate automorphic subtrees
//! and are branched only once.
//!
//! Marks may carry an opaque tag; tags take part in refinement and in the
//! encoding (as the last sort component within otherwise-equal marks), so the
//! returned tag vector is canonical alongside the shape.

use std::collections::BTreeMap;

use crate::shape::{GarlandShape, Mark, PointRef};

type Color = u32;
/// Refinement signature: own color plus the sorted (multiplicity, color)
/// multiset of the neighborhood.
type Signature = (Color, Vec<(u32, Color)>);
/// (neighbor node, edge multiplicity).
type AdjEntry = (usize, u32);
/// A mark as seen by the labeler: grading, tag, canonical point incidences.
type EncodedMark = (u32, Vec<(usize, u32)>, u8);

struct Graph {
    copies: usize,
    points: usize,
    /// Sorted adjacency per node: (neighbor, multiplicity).
    adj: Vec<Vec<AdjEntry>>,
    /// Initial color per node (kind plus mark attributes).
    init: Vec<Color>,
    /// For each original mark index: (grading, tag, point node ids with multiplicity).
    marks: Vec<(u32, u8, Vec<AdjEntry>)>,
    /// Point node id -> original copy index.
    point_copy: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Encoding {
    copies: usize,
    marks: Vec<EncodedMark>,
}

pub(crate) fn canonical_form(shape: &GarlandShape, tags: &[u8]) -> (GarlandShape, Vec<u8>) {
    let graph = build_graph(shape, tags);
    let mut colors = graph.init.clone();
    refine(&graph, &mut colors);
    let mut best: Option<Encoding> = None;
    search(&graph, &colors, &mut best);
    let encoding = best.expect("individualization-refinement always reaches a leaf");
    decode(encoding)
}

fn build_graph(shape: &GarlandShape, tags: &[u8]) -> Graph {
    let copies = shape.copies();
    let mut point_ids: BTreeMap<PointRef, usize> = BTreeMap::new();
    for mark in shape.marks() {
        for &p in mark.points() {
            let next = copies + point_ids.len();
            point_ids.entry(p).or_insert(next);
        }
    }
    let points = point_ids.len();
    let mark_base = copies + points;
    let total = mark_base + shape.marks().len();
    let mut adj: Vec<Vec<AdjEntry>> = vec![Vec::new(); total];
    let mut point_copy = vec![0usize; points];
    for (&p, &id) in &point_ids {
        adj[id].push((p.copy, 1));
        adj[p.copy].push((id, 1));
        point_copy[id - copies] = p.copy;
    }
    let mut marks = Vec::with_capacity(shape.marks().len());
    for (i, mark) in shape.marks().iter().enumerate() {
        let node = mark_base + i;
        let mut mult: BTreeMap<usize, u32> = BTreeMap::new();
        for p in mark.points() {
            *mult.entry(point_ids[p]).or_insert(0) += 1;
        }
        for (&pid, &m) in &mult {
            adj[node].push((pid, m));
            adj[pid].push((node, m));
        }
        marks.push((mark.grading(), tags[i], mult.into_iter().collect()));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    // Initial colors: copies < points < mark kinds ranked by (grading, tag, size).
    let mut mark_kinds: BTreeMap<(u32, u8, usize), Color> = BTreeMap::new();
    for (i, mark) in shape.marks().iter().enumerate() {
        mark_kinds
            .entry((mark.grading(), tags[i], mark.size()))
            .or_insert(0);
    }
    for (rank, (_, v)) in mark_kinds.iter_mut().enumerate() {
        *v = 2 + rank as Color;
    }
    let mut init = vec![0 as Color; total];
    for item in init.iter_mut().take(copies + points).skip(copies) {
        *item = 1;
    }
    for (i, mark) in shape.marks().iter().enumerate() {
        init[mark_base + i] = mark_kinds[&(mark.grading(), tags[i], mark.size())];
    }
    Graph {
        copies,
        points,
        adj,
        init,
        marks,
        point_copy,
    }
}

/// Weisfeiler-Leman color refinement to a fixpoint. Colors are re-ranked by
/// signature order each round, so the final coloring is a canonical total
/// preorder on nodes.
fn refine(graph: &Graph, colors: &mut [Color]) {
    loop {
        let mut sigs: Vec<Signature> = Vec::with_capacity(colors.len());
        for v in 0..colors.len() {
            let mut nbr: Vec<(u32, Color)> =
                graph.adj[v].iter().map(|&(u, m)| (m, colors[u])).collect();
            nbr.sort_unstable();
            sigs.push((colors[v], nbr));
        }
        let mut ranking: BTreeMap<&Signature, Color> = BTreeMap::new();
        for sig in &sigs {
            ranking.entry(sig).or_insert(0);
        }
        for (rank, (_, v)) in ranking.iter_mut().enumerate() {
            *v = rank as Color;
        }
        let before = count_colors(colors);
        for v in 0..colors.len() {
            colors[v] = ranking[&sigs[v]];
        }
        if count_colors(colors) == before {
            return;
        }
    }
}

fn count_colors(colors: &[Color]) -> usize {
    let mut seen: Vec<Color> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// First ambiguous cell among copy/point nodes: smallest color whose class
/// has two or more members.
fn target_cell(graph: &Graph, colors: &[Color]) -> Option<Vec<usize>> {
    let individualizable = graph.copies + graph.points;
    let mut by_color: BTreeMap<Color, Vec<usize>> = BTreeMap::new();
    for (v, &color) in colors.iter().enumerate().take(individualizable) {
        by_color.entry(color).or_default().push(v);
    }
    by_color.into_values().find(|cell| cell.len() >= 2)
}

fn search(graph: &Graph, colors: &[Color], best: &mut Option<Encoding>) {
    match target_cell(graph, colors) {
        None => {
            let enc = encode(graph, colors);
            if best.as_ref().is_none_or(|b| enc < *b) {
                *best = Some(enc);
            }
        }
        Some(cell) => {
            // Candidates with identical exact adjacency are related by a
            // transposition automorphism; branching on one suffices.
            let mut seen_adj: Vec<&Vec<(usize, u32)>> = Vec::new();
            for &v in &cell {
                if seen_adj.iter().any(|a| **a == graph.adj[v]) {
                    continue;
                }
                seen_adj.push(&graph.adj[v]);
                let mut child: Vec<Color> = colors.iter().map(|&c| c * 2 + 1).collect();
                child[v] -= 1;
                refine(graph, &mut child);
                search(graph, &child, best);
            }
        }
    }
}

fn encode(graph: &Graph, colors: &[Color]) -> Encoding {
    // Copies ordered by color.
    let mut copy_order: Vec<(Color, usize)> = (0..graph.copies).map(|c| (colors[c], c)).collect();
    copy_order.sort_unstable();
    let mut copy_rank = vec![0usize; graph.copies];
    for (new, &(_, old)) in copy_order.iter().enumerate() {
        copy_rank[old] = new;
    }
    // Points get per-copy labels in color order.
    let mut point_order: Vec<(usize, Color, usize)> = (0..graph.points)
        .map(|i| {
            let node = graph.copies + i;
            (copy_rank[graph.point_copy[i]], colors[node], node)
        })
        .collect();
    point_order.sort_unstable();
    let mut point_label: BTreeMap<usize, (usize, u32)> = BTreeMap::new();
    let mut counter_per_copy: BTreeMap<usize, u32> = BTreeMap::new();
    for (new_copy, _, node) in point_order {
        let label = counter_per_copy.entry(new_copy).or_insert(0);
        point_label.insert(node, (new_copy, *label));
        *label += 1;
    }
    let mut marks: Vec<EncodedMark> = graph
        .marks
        .iter()
        .map(|(g, tag, pts)| {
            let mut mapped: Vec<(usize, u32)> = Vec::new();
            for &(pid, mult) in pts {
                let &(c, l) = &point_label[&pid];
                for _ in 0..mult {
                    mapped.push((c, l));
                }
            }
            mapped.sort_unstable();
            (*g, mapped, *tag)
        })
        .collect();
    marks.sort();
    Encoding {
        copies: graph.copies,
        marks,
    }
}

fn decode(encoding: Encoding) -> (GarlandShape, Vec<u8>) {
    let mut tags = Vec::with_capacity(encoding.marks.len());
    let mut marks = Vec::with_capacity(encoding.marks.len());
    for (g, pts, tag) in encoding.marks {
        let points = pts.into_iter().map(|(c, l)| PointRef::new(c, l)).collect();
        marks.push(Mark::new(g, points).expect("canonical marks preserve validity"));
        tags.push(tag);
    }
    let shape = GarlandShape::new(encoding.copies, marks.clone())
        .expect("canonical shapes preserve validity");
    // `GarlandShape::new` re-sorts; the encoding is already sorted by
    // (grading, points, tag) whose first two components are the mark order,
    // so mark positions are unchanged and `tags` stays aligned.
    debug_assert_eq!(shape.marks(), marks.as_slice());
    (shape, tags)
}
