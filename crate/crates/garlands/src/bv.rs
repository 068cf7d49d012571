//! Abstract Batalin–Vilkovisky ⇒ Gerstenhaber verification.
//!
//! Works in the free graded-commutative algebra on three generators a, b, c
//! with an operator Δ of degree n. Words are canonically ordered products of
//! atoms (generators and Δ-applications); reordering picks up Koszul signs,
//! which stay symbolic ([`crate::sign::ParityPoly`]) until a concrete parity
//! assignment is fixed. The bracket is defined by the deviation formula
//!
//! ```text
//! {x, y} = (−1)^{|x|n} Δ(x•y) − (−1)^{|x|n} Δ(x)•y − x•Δ(y)
//! ```
//!
//! and the four Gerstenhaber/Leibniz identities are checked per parity
//! assignment by exact rational linear algebra: each target must lie in the
//! linear span of (a) seven-term relation instances, (b) Δ applied to those
//! instances, and (c) "any word containing a ΔΔ atom is zero" relations (the
//! linear closure of Δ² = 0). Membership comes with a replayable certificate;
//! non-membership comes with the exact residual.
//!
//! Since every sign is a function of the four parities (|a|, |b|, |c|, n),
//! checking all 16 assignments decides the symbolic statement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::sign::{ParityAssignment, ParityPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BvError {
    #[error("word `{0}` exceeds the word-universe bound of {1} top-level atoms")]
    BoundExceeded(String, usize),
}

pub const GEN_NAMES: [&str; 3] = ["a", "b", "c"];
pub const PARITY_VARS: [&str; 4] = ["|a|", "|b|", "|c|", "n"];

/// A generator symbol or Δ applied to a word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Gen(u8),
    Delta(Word),
}

impl Atom {
    /// Δ applied to a word, with the public rewrite Δ(Δ(·)) → 0: returns
    /// `None` for a literally nested ΔΔ.
    pub fn delta(word: Word) -> Option<Atom> {
        if word.is_single_delta() {
            return None;
        }
        Some(Atom::Delta(word))
    }

    fn support(&self) -> u8 {
        match self {
            Atom::Gen(i) => 1 << i,
            Atom::Delta(w) => w.support(),
        }
    }

    /// Parity as a polynomial: Δ raises parity by n.
    pub fn parity(&self) -> ParityPoly {
        match self {
            Atom::Gen(i) => ParityPoly::var(PARITY_VARS[*i as usize]),
            Atom::Delta(w) => w.parity().add(&ParityPoly::var("n")),
        }
    }

    fn contains_delta_delta(&self) -> bool {
        match self {
            Atom::Gen(_) => false,
            Atom::Delta(w) => {
                w.is_single_delta() || w.atoms.iter().any(|a| a.contains_delta_delta())
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Gen(i) => write!(f, "{}", GEN_NAMES[*i as usize]),
            Atom::Delta(w) => write!(f, "D({w})"),
        }
    }
}

/// A canonically ordered product of atoms. The empty word is the scalar 1
/// (it never occurs in this crate's universes but keeps the algebra total).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    atoms: Vec<Atom>,
}

impl Word {
    pub fn gen(i: u8) -> Word {
        Word {
            atoms: vec![Atom::Gen(i)],
        }
    }

    pub fn from_atom(atom: Atom) -> Word {
        Word { atoms: vec![atom] }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn is_single_delta(&self) -> bool {
        self.atoms.len() == 1 && matches!(self.atoms[0], Atom::Delta(_))
    }

    fn support(&self) -> u8 {
        self.atoms.iter().fold(0, |acc, a| acc | a.support())
    }

    pub fn parity(&self) -> ParityPoly {
        self.atoms
            .iter()
            .fold(ParityPoly::zero(), |acc, a| acc.add(&a.parity()))
    }

    pub fn contains_delta_delta(&self) -> bool {
        self.atoms.iter().any(|a| a.contains_delta_delta())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sort an atom list into canonical order, accumulating the symbolic Koszul
/// exponent. Returns `None` (the zero word) when two equal atoms of odd
/// parity meet — at the symbolic level equality of parity polynomials with
/// an odd-forcing square never happens, so zero detection is deferred to
/// evaluation; here `None` only flags literal ΔΔ atoms built with
/// [`Atom::delta`] upstream.
pub fn canonicalize_word(atoms: Vec<Atom>) -> (ParityPoly, Word) {
    let mut atoms = atoms;
    let mut exponent = ParityPoly::zero();
    // Bubble sort; adjacent transposition of x, y adds p(x)p(y).
    loop {
        let mut swapped = false;
        for i in 0..atoms.len().saturating_sub(1) {
            if atoms[i] > atoms[i + 1] {
                exponent = exponent.add(&atoms[i].parity().mul(&atoms[i + 1].parity()));
                atoms.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    (exponent, Word { atoms })
}

/// A finite sum of rational multiples of canonical words at a fixed parity
/// assignment. Collected: no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExprSum {
    terms: BTreeMap<Word, BigRational>,
}

impl ExprSum {
    pub fn zero() -> ExprSum {
        ExprSum::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, word: Word, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(word).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &ExprSum) -> ExprSum {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> ExprSum {
        if factor.is_zero() {
            return ExprSum::zero();
        }
        ExprSum {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c * factor))
                .collect(),
        }
    }

    pub fn negate(&self) -> ExprSum {
        self.scale(&-BigRational::one())
    }

    fn first(&self) -> Option<(&Word, &BigRational)> {
        self.terms.iter().next()
    }

    fn remove(&mut self, word: &Word) -> Option<BigRational> {
        self.terms.remove(word)
    }
}

impl fmt::Display for ExprSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                if c == &BigRational::one() {
                    format!("{w}")
                } else {
                    format!("{c}*{w}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Whether literal ΔΔ atoms are representable. The public word API rewrites
/// them to zero; the Gerstenhaber prover keeps them inert so that Δ² = 0 is an
/// explicit, droppable relation with visible certificate usage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    Rewrite,
    Keep,
}

/// Evaluation context: a concrete 0/1 assignment of (|a|, |b|, |c|, n).
#[derive(Debug, Clone)]
pub struct BvContext {
    pub bits: [bool; 4],
    pub mode: DeltaMode,
    assignment: ParityAssignment,
}

impl BvContext {
    pub fn new(bits: [bool; 4], mode: DeltaMode) -> BvContext {
        let assignment: ParityAssignment = PARITY_VARS
            .iter()
            .zip(bits)
            .map(|(v, b)| (v.to_string(), b))
            .collect();
        BvContext {
            bits,
            mode,
            assignment,
        }
    }

    fn n_bit(&self) -> bool {
        self.bits[3]
    }

    /// Evaluate a symbolic exponent at this assignment.
    pub fn eval_poly(&self, poly: &ParityPoly) -> bool {
        poly.eval(&self.assignment)
            .expect("closed parity variables")
    }

    fn atom_parity(&self, atom: &Atom) -> bool {
        match atom {
            Atom::Gen(i) => self.bits[*i as usize],
            Atom::Delta(w) => self.word_parity(w) ^ self.n_bit(),
        }
    }

    fn word_parity(&self, word: &Word) -> bool {
        word.atoms
            .iter()
            .fold(false, |acc, a| acc ^ self.atom_parity(a))
    }

    /// Canonicalize an atom list at this assignment: concrete Koszul sign,
    /// and zero when an odd-parity atom repeats.
    fn scaled_word(&self, atoms: Vec<Atom>) -> Option<(Word, BigRational)> {
        let mut atoms = atoms;
        let mut negative = false;
        loop {
            let mut swapped = false;
            for i in 0..atoms.len().saturating_sub(1) {
                if atoms[i] > atoms[i + 1] {
                    negative ^= self.atom_parity(&atoms[i]) & self.atom_parity(&atoms[i + 1]);
                    atoms.swap(i, i + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        for pair in atoms.windows(2) {
            if pair[0] == pair[1] && self.atom_parity(&pair[0]) {
                return None;
            }
        }
        let sign = if negative {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        Some((Word { atoms }, sign))
    }

    /// Δ of a word, as a single-atom word; `None` when the rewrite mode kills
    /// a literal ΔΔ.
    fn delta_word(&self, word: &Word) -> Option<Word> {
        if self.mode == DeltaMode::Rewrite && word.is_single_delta() {
            return None;
        }
        Some(Word::from_atom(Atom::Delta(word.clone())))
    }

    pub fn product_words(&self, x: &Word, y: &Word) -> Option<(Word, BigRational)> {
        let mut atoms = x.atoms.clone();
        atoms.extend(y.atoms.iter().cloned());
        self.scaled_word(atoms)
    }

    pub fn mul_exprs(&self, xs: &ExprSum, ys: &ExprSum) -> ExprSum {
        let mut out = ExprSum::zero();
        for (wx, cx) in xs.terms() {
            for (wy, cy) in ys.terms() {
                if let Some((w, s)) = self.product_words(wx, wy) {
                    out.insert(w, cx * cy * s);
                }
            }
        }
        out
    }

    pub fn delta_expr(&self, e: &ExprSum) -> ExprSum {
        let mut out = ExprSum::zero();
        for (w, c) in e.terms() {
            if let Some(dw) = self.delta_word(w) {
                out.insert(dw, c.clone());
            }
        }
        out
    }

    pub fn word_expr(&self, word: Word) -> ExprSum {
        let mut out = ExprSum::zero();
        out.insert(word, BigRational::one());
        out
    }

    fn sign(&self, bit: bool) -> BigRational {
        if bit {
            -BigRational::one()
        } else {
            BigRational::one()
        }
    }

    /// {x, y} = (−1)^{|x|n} Δ(x•y) − (−1)^{|x|n} Δ(x)•y − x•Δ(y) on words.
    pub fn bracket_words(&self, x: &Word, y: &Word) -> ExprSum {
        let s = self.sign(self.word_parity(x) & self.n_bit());
        let mut out = ExprSum::zero();
        if let Some((xy, k)) = self.product_words(x, y) {
            if let Some(dxy) = self.delta_word(&xy) {
                out.insert(dxy, &s * k);
            }
        }
        if let Some(dx) = self.delta_word(x) {
            if let Some((w, k)) = self.product_words(&dx, y) {
                out.insert(w, -&s * k);
            }
        }
        if let Some(dy) = self.delta_word(y) {
            if let Some((w, k)) = self.product_words(x, &dy) {
                out.insert(w, -k);
            }
        }
        out
    }

    /// Bilinear extension of the bracket to sums.
    pub fn bracket_exprs(&self, xs: &ExprSum, ys: &ExprSum) -> ExprSum {
        let mut out = ExprSum::zero();
        for (wx, cx) in xs.terms() {
            for (wy, cy) in ys.terms() {
                out = out.add(&self.bracket_words(wx, wy).scale(&(cx * cy)));
            }
        }
        out
    }

    /// The seven-term relation instance at (x, y, z), as LHS − RHS:
    ///
    /// ```text
    /// Δ(x•y•z) − Δ(x•y)•z − (−1)^{|x|n} x•Δ(y•z) − (−1)^{(|x|+n)|y|} y•Δ(x•z)
    ///          + Δ(x)•y•z + (−1)^{|x|n} x•Δ(y)•z + (−1)^{n(|x|+|y|)} x•y•Δ(z)
    /// ```
    pub fn instantiate_bv(&self, x: &Word, y: &Word, z: &Word) -> ExprSum {
        let px = self.word_parity(x);
        let py = self.word_parity(y);
        let n = self.n_bit();
        let s_xn = self.sign(px & n);
        let s_xny = self.sign((px ^ n) & py);
        let s_nxy = self.sign(n & (px ^ py));
        let mut out = ExprSum::zero();
        let push = |sum: &mut ExprSum, atoms: Option<(Word, BigRational)>, scale: &BigRational| {
            if let Some((w, k)) = atoms {
                sum.insert(w, scale * k);
            }
        };
        // Δ(x•y•z)
        if let Some((xy, k1)) = self.product_words(x, y) {
            if let Some((xyz, k2)) = self.product_words(&xy, z) {
                if let Some(d) = self.delta_word(&xyz) {
                    out.insert(d, &k1 * k2);
                }
            }
            // − Δ(x•y)•z
            if let Some(dxy) = self.delta_word(&xy) {
                push(&mut out, self.product_words(&dxy, z), &(-k1));
            }
        }
        // − (−1)^{|x|n} x•Δ(y•z)
        if let Some((yz, k)) = self.product_words(y, z) {
            if let Some(dyz) = self.delta_word(&yz) {
                push(&mut out, self.product_words(x, &dyz), &(-&s_xn * k));
            }
        }
        // − (−1)^{(|x|+n)|y|} y•Δ(x•z)
        if let Some((xz, k)) = self.product_words(x, z) {
            if let Some(dxz) = self.delta_word(&xz) {
                push(&mut out, self.product_words(y, &dxz), &(-&s_xny * k));
            }
        }
        // + Δ(x)•y•z
        if let Some(dx) = self.delta_word(x) {
            if let Some((dxy, k1)) = self.product_words(&dx, y) {
                push(&mut out, self.product_words(&dxy, z), &k1);
            }
        }
        // + (−1)^{|x|n} x•Δ(y)•z
        if let Some(dy) = self.delta_word(y) {
            if let Some((xdy, k1)) = self.product_words(x, &dy) {
                push(&mut out, self.product_words(&xdy, z), &(&s_xn * k1));
            }
        }
        // + (−1)^{n(|x|+|y|)} x•y•Δ(z)
        if let Some(dz) = self.delta_word(z) {
            if let Some((xy, k1)) = self.product_words(x, y) {
                push(&mut out, self.product_words(&xy, &dz), &(&s_nxy * k1));
            }
        }
        out
    }

    /// Gerstenhaber bracket of two words (alias used by report code).
    pub fn gerstenhaber_bracket(&self, x: &Word, y: &Word) -> ExprSum {
        self.bracket_words(x, y)
    }
}

/// Identity targets of the Gerstenhaber derivation, as LHS − RHS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GerstenhaberIdentity {
    /// {a,b} = (−1)^n (−1)^{(|a|+n)(|b|+n)} {b,a}
    Symmetry52,
    /// {a,{b,c}} = {{a,b},c} + (−1)^{(|a|+n)(|b|+n)} {b,{a,c}}
    Jacobi53,
    /// {a, b•c} = {a,b}•c + (−1)^{(|a|+n)|b|} b•{a,c}
    Poisson54,
    /// Δ{a,b} = (−1)^{n+1} ({Δa,b} + (−1)^{|a|n+1} {a,Δb})
    Leibniz55,
}

impl GerstenhaberIdentity {
    pub const ALL: [GerstenhaberIdentity; 4] = [
        GerstenhaberIdentity::Symmetry52,
        GerstenhaberIdentity::Jacobi53,
        GerstenhaberIdentity::Poisson54,
        GerstenhaberIdentity::Leibniz55,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GerstenhaberIdentity::Symmetry52 => "5.2",
            GerstenhaberIdentity::Jacobi53 => "5.3",
            GerstenhaberIdentity::Poisson54 => "5.4",
            GerstenhaberIdentity::Leibniz55 => "5.5",
        }
    }
}

/// Build the target difference for an identity at the context's assignment.
pub fn identity_target(ctx: &BvContext, id: GerstenhaberIdentity) -> ExprSum {
    let a = Word::gen(0);
    let b = Word::gen(1);
    let c = Word::gen(2);
    let pa = ctx.bits[0];
    let pb = ctx.bits[1];
    let n = ctx.n_bit();
    match id {
        GerstenhaberIdentity::Symmetry52 => {
            let lhs = ctx.bracket_words(&a, &b);
            let sign = ctx.sign(n ^ ((pa ^ n) & (pb ^ n)));
            let rhs = ctx.bracket_words(&b, &a).scale(&sign);
            lhs.add(&rhs.negate())
        }
        GerstenhaberIdentity::Jacobi53 => {
            let bc = ctx.bracket_words(&b, &c);
            let lhs = ctx.bracket_exprs(&ctx.word_expr(a.clone()), &bc);
            let ab = ctx.bracket_words(&a, &b);
            let rhs1 = ctx.bracket_exprs(&ab, &ctx.word_expr(c.clone()));
            let ac = ctx.bracket_words(&a, &c);
            let sign = ctx.sign((pa ^ n) & (pb ^ n));
            let rhs2 = ctx
                .bracket_exprs(&ctx.word_expr(b.clone()), &ac)
                .scale(&sign);
            lhs.add(&rhs1.negate()).add(&rhs2.negate())
        }
        GerstenhaberIdentity::Poisson54 => {
            let (bc, k) = ctx.product_words(&b, &c).expect("distinct generators");
            let lhs = ctx.bracket_words(&a, &bc).scale(&k);
            let ab = ctx.bracket_words(&a, &b);
            let rhs1 = ctx.mul_exprs(&ab, &ctx.word_expr(c.clone()));
            let ac = ctx.bracket_words(&a, &c);
            let sign = ctx.sign((pa ^ n) & pb);
            let rhs2 = ctx.mul_exprs(&ctx.word_expr(b.clone()), &ac).scale(&sign);
            lhs.add(&rhs1.negate()).add(&rhs2.negate())
        }
        GerstenhaberIdentity::Leibniz55 => {
            let lhs = ctx.delta_expr(&ctx.bracket_words(&a, &b));
            let da = ctx.delta_word(&a).expect("Δ of a generator always exists");
            let db = ctx.delta_word(&b).expect("Δ of a generator always exists");
            let t1 = ctx.bracket_words(&da, &b);
            let t2 = ctx.bracket_words(&a, &db).scale(&ctx.sign(!(pa & n)));
            let rhs = t1.add(&t2).scale(&ctx.sign(!n));
            lhs.add(&rhs.negate())
        }
    }
}

/// How a relation row was produced; printed in certificates so a human can
/// replay the derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationKind {
    SevenTerm { x: Word, y: Word, z: Word },
    DeltaOfSevenTerm { x: Word, y: Word, z: Word },
    DeltaSquaredWord { word: Word },
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationKind::SevenTerm { x, y, z } => write!(f, "bv({x}; {y}; {z})"),
            RelationKind::DeltaOfSevenTerm { x, y, z } => write!(f, "D.bv({x}; {y}; {z})"),
            RelationKind::DeltaSquaredWord { word } => write!(f, "dd-zero({word})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub kind: RelationKind,
    pub sum: ExprSum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    pub relations: Vec<Relation>,
    pub bound: usize,
}

/// All multilinear canonical words over {a, b, c} with nesting depth ≤ 2 and
/// at most `bound` top-level atoms. In `Keep` mode this includes words with
/// literal ΔΔ atoms.
pub fn enumerate_universe(ctx: &BvContext, bound: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for support in 1u8..8 {
        for w in words_for_support(ctx, support, 2, bound) {
            out.insert(w);
        }
    }
    out
}

fn atoms_for_support(ctx: &BvContext, support: u8, max_nesting: u32) -> Vec<Atom> {
    let mut out = Vec::new();
    if support.count_ones() == 1 {
        out.push(Atom::Gen(support.trailing_zeros() as u8));
    }
    if max_nesting >= 1 {
        for w in words_for_support(ctx, support, max_nesting - 1, 3) {
            if ctx.mode == DeltaMode::Rewrite && w.is_single_delta() {
                continue;
            }
            out.push(Atom::Delta(w));
        }
    }
    out.sort();
    out
}

fn words_for_support(
    ctx: &BvContext,
    support: u8,
    max_nesting: u32,
    max_atoms: usize,
) -> Vec<Word> {
    let mut out = Vec::new();
    for partition in set_partitions(support) {
        if partition.len() > max_atoms {
            continue;
        }
        let choices: Vec<Vec<Atom>> = partition
            .iter()
            .map(|&part| atoms_for_support(ctx, part, max_nesting))
            .collect();
        let mut stack: Vec<Vec<Atom>> = vec![Vec::new()];
        for options in &choices {
            let mut next = Vec::new();
            for prefix in &stack {
                for atom in options {
                    let mut w = prefix.clone();
                    w.push(atom.clone());
                    next.push(w);
                }
            }
            stack = next;
        }
        for atoms in stack {
            let (_, word) = canonicalize_word(atoms);
            out.push(word);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All partitions of the bit set `support` into nonempty blocks.
fn set_partitions(support: u8) -> Vec<Vec<u8>> {
    let bits: Vec<u8> = (0..3).filter(|i| support >> i & 1 == 1).collect();
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    for &bit in &bits {
        let mut next = Vec::new();
        for partition in &out {
            for i in 0..partition.len() {
                let mut p = partition.clone();
                p[i] |= 1 << bit;
                next.push(p);
            }
            let mut p = partition.clone();
            p.push(1 << bit);
            next.push(p);
        }
        out = next;
    }
    out
}

/// Which relation families to include (the ablation switches).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prop51Options {
    pub include_seven_term: bool,
    pub include_delta_squared: bool,
}

impl Default for Prop51Options {
    fn default() -> Self {
        Prop51Options {
            include_seven_term: true,
            include_delta_squared: true,
        }
    }
}

/// Build the relation rows over `universe`.
pub fn build_relations(
    ctx: &BvContext,
    universe: &BTreeSet<Word>,
    bound: usize,
    options: Prop51Options,
) -> RelationSet {
    let mut relations = Vec::new();
    let mut seen: BTreeSet<Vec<(Word, BigRational)>> = BTreeSet::new();
    let mut push = |kind: RelationKind, sum: ExprSum| {
        if sum.is_zero() {
            return;
        }
        if sum.terms().any(|(w, _)| !universe.contains(w)) {
            return;
        }
        // Dedupe up to scalar: normalize so the leading coefficient is 1.
        let lead = sum.first().map(|(_, c)| c.clone()).unwrap();
        let normalized: Vec<(Word, BigRational)> =
            sum.terms().map(|(w, c)| (w.clone(), c / &lead)).collect();
        if seen.insert(normalized) {
            relations.push(Relation { kind, sum });
        }
    };
    if options.include_seven_term {
        let singles: Vec<Vec<Word>> = (0..3u8)
            .map(|i| {
                universe
                    .iter()
                    .filter(|w| w.support() == 1 << i)
                    .cloned()
                    .collect()
            })
            .collect();
        let slots: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for order in &slots {
            for x in &singles[order[0]] {
                for y in &singles[order[1]] {
                    for z in &singles[order[2]] {
                        let sum = ctx.instantiate_bv(x, y, z);
                        push(
                            RelationKind::SevenTerm {
                                x: x.clone(),
                                y: y.clone(),
                                z: z.clone(),
                            },
                            sum.clone(),
                        );
                        push(
                            RelationKind::DeltaOfSevenTerm {
                                x: x.clone(),
                                y: y.clone(),
                                z: z.clone(),
                            },
                            ctx.delta_expr(&sum),
                        );
                    }
                }
            }
        }
    }
    if options.include_delta_squared {
        for w in universe {
            if w.contains_delta_delta() {
                let mut sum = ExprSum::zero();
                sum.insert(w.clone(), BigRational::one());
                push(RelationKind::DeltaSquaredWord { word: w.clone() }, sum);
            }
        }
    }
    RelationSet { relations, bound }
}

/// Outcome of a span-membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Member {
        /// (relation index, coefficient): target = Σ cᵢ · relationᵢ.
        certificate: Vec<(usize, BigRational)>,
    },
    NonMember {
        residual: ExprSum,
    },
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member { .. })
    }
}

/// Exact rational span membership with certificate. Gaussian elimination on
/// sparse rows keyed by their smallest word.
pub fn check_membership(target: &ExprSum, relations: &RelationSet) -> Verdict {
    struct Row {
        sum: ExprSum,
        combo: BTreeMap<usize, BigRational>,
    }
    let mut basis: BTreeMap<Word, Row> = BTreeMap::new();
    for (idx, relation) in relations.relations.iter().enumerate() {
        let mut sum = relation.sum.clone();
        let mut combo: BTreeMap<usize, BigRational> = BTreeMap::new();
        combo.insert(idx, BigRational::one());
        // Reduce against the current basis.
        let mut reduced = ExprSum::zero();
        while let Some((w, _)) = sum.first() {
            let w = w.clone();
            let c = sum.remove(&w).unwrap();
            match basis.get(&w) {
                Some(row) => {
                    // sum -= c * row.sum (pivot cancels; the rest folds in).
                    for (rw, rc) in row.sum.terms() {
                        if rw != &w {
                            sum.insert(rw.clone(), -(&c) * rc);
                        }
                    }
                    for (ri, rc) in &row.combo {
                        let entry = combo.entry(*ri).or_insert_with(BigRational::zero);
                        *entry -= &c * rc;
                        if entry.is_zero() {
                            combo.remove(ri);
                        }
                    }
                }
                None => {
                    reduced.insert(w, c);
                }
            }
        }
        if let Some((pivot, lead)) = reduced.first().map(|(w, c)| (w.clone(), c.clone())) {
            let inv = BigRational::one() / lead;
            let sum = reduced.scale(&inv);
            let combo = combo.into_iter().map(|(i, c)| (i, c * &inv)).collect();
            basis.insert(pivot, Row { sum, combo });
        }
    }
    // Fully reduce the basis so certificate extraction is exact: eliminate
    // higher pivots from each row.
    let pivots: Vec<Word> = basis.keys().cloned().collect();
    for i in (0..pivots.len()).rev() {
        let lower = pivots[i].clone();
        let (lower_sum, lower_combo) = {
            let r = basis.get(&lower).unwrap();
            (r.sum.clone(), r.combo.clone())
        };
        for p in pivots.iter().take(i) {
            let row = basis.get_mut(p).unwrap();
            let coeff = row
                .sum
                .terms()
                .find(|(w, _)| **w == lower)
                .map(|(_, c)| c.clone());
            if let Some(c) = coeff {
                let updated = row.sum.add(&lower_sum.scale(&-c.clone()));
                row.sum = updated;
                for (ri, rc) in &lower_combo {
                    let entry = row.combo.entry(*ri).or_insert_with(BigRational::zero);
                    *entry -= &c * rc;
                    if entry.is_zero() {
                        row.combo.remove(ri);
                    }
                }
            }
        }
    }
    // Reduce the target, collecting the certificate.
    let mut sum = target.clone();
    let mut certificate: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut residual = ExprSum::zero();
    while let Some((w, _)) = sum.first() {
        let w = w.clone();
        let c = sum.remove(&w).unwrap();
        match basis.get(&w) {
            Some(row) => {
                for (rw, rc) in row.sum.terms() {
                    if rw != &w {
                        sum.insert(rw.clone(), -(&c) * rc);
                    }
                }
                for (ri, rc) in &row.combo {
                    let entry = certificate.entry(*ri).or_insert_with(BigRational::zero);
                    *entry += &c * rc;
                    if entry.is_zero() {
                        certificate.remove(ri);
                    }
                }
            }
            None => {
                residual.insert(w, c);
            }
        }
    }
    if residual.is_zero() {
        Verdict::Member {
            certificate: certificate.into_iter().collect(),
        }
    } else {
        Verdict::NonMember { residual }
    }
}

/// One verdict of the derivation report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop51Entry {
    /// (|a|, |b|, |c|, n) bits.
    pub bits: [bool; 4],
    pub identity: GerstenhaberIdentity,
    pub member: bool,
    /// (relation description, coefficient) pairs; empty when the identity
    /// collapses under canonicalization alone.
    pub certificate: Vec<(String, BigRational)>,
    pub residual: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop51Report {
    pub bound: usize,
    pub options: Prop51Options,
    pub universe_size: usize,
    pub relation_count: usize,
    pub entries: Vec<Prop51Entry>,
}

impl Prop51Report {
    pub fn all_member(&self) -> bool {
        self.entries.iter().all(|e| e.member)
    }

    pub fn member_count(&self) -> usize {
        self.entries.iter().filter(|e| e.member).count()
    }
}

pub fn verify_prop51(bound: usize) -> Result<Prop51Report, BvError> {
    verify_prop51_with(bound, Prop51Options::default())
}

/// Run the 16-assignment × 4-identity verification at `bound` top-level
/// atoms per word. The prover always keeps ΔΔ words inert so the Δ² = 0
/// relations are visible (and droppable) rows.
pub fn verify_prop51_with(bound: usize, options: Prop51Options) -> Result<Prop51Report, BvError> {
    let mut entries = Vec::new();
    let mut universe_size = 0;
    let mut relation_count = 0;
    for bits_index in 0..16u32 {
        let bits = [
            bits_index & 1 == 1,
            bits_index >> 1 & 1 == 1,
            bits_index >> 2 & 1 == 1,
            bits_index >> 3 & 1 == 1,
        ];
        let ctx = BvContext::new(bits, DeltaMode::Keep);
        let universe = enumerate_universe(&ctx, bound);
        let relations = build_relations(&ctx, &universe, bound, options);
        universe_size = universe.len();
        relation_count = relations.relations.len();
        for id in GerstenhaberIdentity::ALL {
            let target = identity_target(&ctx, id);
            for (w, _) in target.terms() {
                if w.len() > bound {
                    return Err(BvError::BoundExceeded(w.to_string(), bound));
                }
                if !universe.contains(w) {
                    return Err(BvError::BoundExceeded(w.to_string(), bound));
                }
            }
            let verdict = check_membership(&target, &relations);
            let entry = match verdict {
                Verdict::Member { certificate } => Prop51Entry {
                    bits,
                    identity: id,
                    member: true,
                    certificate: certificate
                        .into_iter()
                        .map(|(i, c)| (relations.relations[i].kind.to_string(), c))
                        .collect(),
                    residual: None,
                },
                Verdict::NonMember { residual } => Prop51Entry {
                    bits,
                    identity: id,
                    member: false,
                    certificate: Vec::new(),
                    residual: Some(residual.to_string()),
                },
            };
            entries.push(entry);
        }
    }
    Ok(Prop51Report {
        bound,
        options,
        universe_size,
        relation_count,
        entries,
    })
}
