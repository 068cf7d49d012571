//! Exact sign arithmetic.
//!
//! Every sign in the calculus is of the form (−1)^e where the exponent e is a
//! multilinear polynomial over GF(2) in *parity variables* (degrees mod 2 of
//! the operands and the copy dimension n). [`ParityPoly`] is the unique normal
//! form for such exponents: a set of square-free monomials, each a sorted set
//! of variable names. [`koszul_sign`] computes the exponent picked up when a
//! list of graded factors is permuted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A monomial is a square-free product of parity variables; the empty
/// monomial is the constant 1.
pub type ParityMonomial = BTreeSet<String>;

/// Assignment of 0/1 values to parity variables by name.
pub type ParityAssignment = BTreeMap<String, bool>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignError {
    #[error("unknown parity variable `{0}`")]
    UnknownVariable(String),
    #[error(
        "permutation/parity length mismatch: {perm} factors permuted, {parities} parities given"
    )]
    LengthMismatch { perm: usize, parities: usize },
    #[error("invalid permutation: {0:?} is not a bijection on 0..len")]
    InvalidPermutation(Vec<usize>),
}

/// A multilinear polynomial over GF(2) in named parity variables.
///
/// Since the variables only ever take the values 0 and 1, `x·x = x` as a
/// function; monomials are therefore kept square-free and the normal form
/// (a sorted set of sorted monomials) is unique per function.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ParityPoly {
    monomials: BTreeSet<ParityMonomial>,
}

impl ParityPoly {
    pub fn zero() -> Self {
        ParityPoly::default()
    }

    pub fn one() -> Self {
        let mut monomials = BTreeSet::new();
        monomials.insert(ParityMonomial::new());
        ParityPoly { monomials }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut m = ParityMonomial::new();
        m.insert(name.into());
        let mut monomials = BTreeSet::new();
        monomials.insert(m);
        ParityPoly { monomials }
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &ParityMonomial> {
        self.monomials.iter()
    }

    /// Addition over GF(2): symmetric difference of monomial sets.
    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &ParityPoly) -> ParityPoly {
        let mut monomials = self.monomials.clone();
        for m in &other.monomials {
            if !monomials.remove(m) {
                monomials.insert(m.clone());
            }
        }
        ParityPoly { monomials }
    }

    /// Multiplication with square-free absorption (x·x = x).
    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &ParityPoly) -> ParityPoly {
        let mut acc = ParityPoly::zero();
        for a in &self.monomials {
            for b in &other.monomials {
                let m: ParityMonomial = a.union(b).cloned().collect();
                let single = ParityPoly {
                    monomials: std::iter::once(m).collect(),
                };
                acc = acc.add(&single);
            }
        }
        acc
    }

    /// Evaluate at a 0/1 assignment. Missing variables are an error.
    pub fn eval(&self, assignment: &ParityAssignment) -> Result<bool, SignError> {
        let mut acc = false;
        for m in &self.monomials {
            let mut term = true;
            for v in m {
                match assignment.get(v) {
                    Some(b) => term &= *b,
                    None => return Err(SignError::UnknownVariable(v.clone())),
                }
            }
            acc ^= term;
        }
        Ok(acc)
    }

    /// Substitute polynomials for variables.
    pub fn substitute(&self, map: &BTreeMap<String, ParityPoly>) -> ParityPoly {
        let mut acc = ParityPoly::zero();
        for m in &self.monomials {
            let mut term = ParityPoly::one();
            for v in m {
                let factor = map
                    .get(v)
                    .cloned()
                    .unwrap_or_else(|| ParityPoly::var(v.clone()));
                term = term.mul(&factor);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Names of all variables occurring in the normal form.
    pub fn variables(&self) -> BTreeSet<String> {
        self.monomials.iter().flatten().cloned().collect()
    }
}

impl fmt::Display for ParityPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .monomials
            .iter()
            .map(|m| {
                if m.is_empty() {
                    "1".to_string()
                } else {
                    m.iter().cloned().collect::<Vec<_>>().join("*")
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// Expression tree over parity variables, for [`parity_normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParityExpr {
    Zero,
    One,
    Var(String),
    Add(Box<ParityExpr>, Box<ParityExpr>),
    Mul(Box<ParityExpr>, Box<ParityExpr>),
}

impl ParityExpr {
    pub fn var(name: impl Into<String>) -> Self {
        ParityExpr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: ParityExpr) -> Self {
        ParityExpr::Add(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: ParityExpr) -> Self {
        ParityExpr::Mul(Box::new(self), Box::new(other))
    }

    /// Evaluate the tree directly, without normalizing first.
    pub fn eval(&self, assignment: &ParityAssignment) -> Result<bool, SignError> {
        Ok(match self {
            ParityExpr::Zero => false,
            ParityExpr::One => true,
            ParityExpr::Var(v) => *assignment
                .get(v)
                .ok_or_else(|| SignError::UnknownVariable(v.clone()))?,
            ParityExpr::Add(a, b) => a.eval(assignment)? ^ b.eval(assignment)?,
            ParityExpr::Mul(a, b) => a.eval(assignment)? & b.eval(assignment)?,
        })
    }
}

/// Normalize an expression tree to the unique [`ParityPoly`] normal form.
///
/// Variable names are validated against `allowed`; an unknown name is an
/// error rather than a silently fresh variable.
pub fn parity_normalize(
    expr: &ParityExpr,
    allowed: &BTreeSet<String>,
) -> Result<ParityPoly, SignError> {
    Ok(match expr {
        ParityExpr::Zero => ParityPoly::zero(),
        ParityExpr::One => ParityPoly::one(),
        ParityExpr::Var(v) => {
            if !allowed.contains(v) {
                return Err(SignError::UnknownVariable(v.clone()));
            }
            ParityPoly::var(v.clone())
        }
        ParityExpr::Add(a, b) => parity_normalize(a, allowed)?.add(&parity_normalize(b, allowed)?),
        ParityExpr::Mul(a, b) => parity_normalize(a, allowed)?.mul(&parity_normalize(b, allowed)?),
    })
}

/// Koszul sign exponent for permuting an ordered list of graded factors.
///
/// `perm` describes the output order: output slot `t` holds input factor
/// `perm[t]`. The exponent is the sum of `p(x)·p(y)` over all pairs that get
/// transposed, i.e. pairs `s < t` in the output with `perm[s] > perm[t]`.
pub fn koszul_sign(perm: &[usize], parities: &[ParityPoly]) -> Result<ParityPoly, SignError> {
    if perm.len() != parities.len() {
        return Err(SignError::LengthMismatch {
            perm: perm.len(),
            parities: parities.len(),
        });
    }
    let mut seen = vec![false; perm.len()];
    for &i in perm {
        if i >= perm.len() || seen[i] {
            return Err(SignError::InvalidPermutation(perm.to_vec()));
        }
        seen[i] = true;
    }
    let mut exponent = ParityPoly::zero();
    for s in 0..perm.len() {
        for t in (s + 1)..perm.len() {
            if perm[s] > perm[t] {
                exponent = exponent.add(&parities[perm[s]].mul(&parities[perm[t]]));
            }
        }
    }
    Ok(exponent)
}

/// The coefficient ring of the calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ring {
    /// Oriented bordism setting: integer coefficients.
    Z,
    /// Z/2 coefficients; all signs collapse.
    Z2,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "z"),
            Ring::Z2 => write!(f, "z2"),
        }
    }
}

/// A term coefficient: a signed integer with its ring tag.
///
/// Parities in the shape calculus are always concrete, so sign exponents are
/// evaluated at construction time and folded into the integer; the symbolic
/// (coefficient, exponent) pairs needed for symbolic n live in [`crate::bv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coefficient {
    ring: Ring,
    value: i64,
}

impl Coefficient {
    pub fn new(ring: Ring, value: i64) -> Self {
        let value = match ring {
            Ring::Z => value,
            Ring::Z2 => value.rem_euclid(2),
        };
        Coefficient { ring, value }
    }

    pub fn one(ring: Ring) -> Self {
        Coefficient::new(ring, 1)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        debug_assert_eq!(self.ring, other.ring);
        Coefficient::new(self.ring, self.value + other.value)
    }

    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        debug_assert_eq!(self.ring, other.ring);
        Coefficient::new(self.ring, self.value * other.value)
    }

    pub fn negate(&self) -> Coefficient {
        Coefficient::new(self.ring, -self.value)
    }

    /// Multiply by (−1)^exponent. In Z/2 mode the sign is irrelevant.
    pub fn signed(&self, exponent: bool) -> Coefficient {
        if exponent && self.ring == Ring::Z {
            self.negate()
        } else {
            *self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn vars(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn characteristic_two() {
        let x = ParityExpr::var("x");
        let allowed = vars(&["x"]);
        let sum = parity_normalize(&x.clone().add(x.clone()), &allowed).unwrap();
        assert!(sum.is_zero());
        let square = parity_normalize(&x.clone().mul(x), &allowed).unwrap();
        assert_eq!(square, ParityPoly::var("x"));
    }

    #[test]
    fn theorem_31_exponent_expansion() {
        // (|a|+n)(|b|+n) = |a||b| + |a|n + |b|n + n
        let allowed = vars(&["|a|", "|b|", "n"]);
        let a = ParityExpr::var("|a|");
        let b = ParityExpr::var("|b|");
        let n = ParityExpr::var("n");
        let expr = a.clone().add(n.clone()).mul(b.clone().add(n.clone()));
        let got = parity_normalize(&expr, &allowed).unwrap();
        let expected = ParityPoly::var("|a|")
            .mul(&ParityPoly::var("|b|"))
            .add(&ParityPoly::var("|a|").mul(&ParityPoly::var("n")))
            .add(&ParityPoly::var("|b|").mul(&ParityPoly::var("n")))
            .add(&ParityPoly::var("n"));
        assert_eq!(got, expected);
    }

    #[test]
    fn unknown_variable_rejected() {
        let allowed = vars(&["x"]);
        let err = parity_normalize(&ParityExpr::var("y"), &allowed).unwrap_err();
        assert_eq!(err, SignError::UnknownVariable("y".into()));
    }

    #[test]
    fn koszul_swap_and_identity() {
        let pa = ParityPoly::var("|a|");
        let pb = ParityPoly::var("|b|");
        let swapped = koszul_sign(&[1, 0], &[pa.clone(), pb.clone()]).unwrap();
        assert_eq!(swapped, pa.mul(&pb));
        let id = koszul_sign(&[0, 1], &[pa.clone(), pb.clone()]).unwrap();
        assert!(id.is_zero());
    }

    #[test]
    fn koszul_rotation() {
        // (a, b, c) -> (b, c, a): a moves past b and past c.
        let p: Vec<ParityPoly> = ["|a|", "|b|", "|c|"].map(ParityPoly::var).to_vec();
        let got = koszul_sign(&[1, 2, 0], &p).unwrap();
        let expected = p[0].mul(&p[1]).add(&p[0].mul(&p[2]));
        assert_eq!(got, expected);
    }

    #[test]
    fn koszul_length_mismatch() {
        let err = koszul_sign(&[0, 1], &[ParityPoly::var("x")]).unwrap_err();
        assert!(matches!(err, SignError::LengthMismatch { .. }));
    }

    fn compose(first: &[usize], second: &[usize]) -> Vec<usize> {
        // Apply `first`, then `second` to the result.
        second.iter().map(|&t| first[t]).collect()
    }

    #[test]
    fn koszul_cocycle_exhaustive() {
        // koszul(sigma after tau) = koszul(tau, p) + koszul(sigma, p permuted by tau),
        // exhaustively over all permutation pairs of <= 4 factors (and a spot
        // check at 5) with seeded random parities.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for len in 1..=4usize {
            let perms = permutations(len);
            for tau in &perms {
                for sigma in &perms {
                    check_cocycle(tau, sigma, &mut rng);
                }
            }
        }
        let mut perm5a: Vec<usize> = (0..5).collect();
        let mut perm5b: Vec<usize> = (0..5).collect();
        for _ in 0..20 {
            perm5a.shuffle(&mut rng);
            perm5b.shuffle(&mut rng);
            check_cocycle(&perm5a, &perm5b, &mut rng);
        }
    }

    fn check_cocycle(tau: &[usize], sigma: &[usize], rng: &mut rand_chacha::ChaCha8Rng) {
        use rand::Rng;
        let len = tau.len();
        let names = ["u", "v", "w", "x", "y"];
        let parities: Vec<ParityPoly> = (0..len)
            .map(|i| {
                if rng.gen_bool(0.5) {
                    ParityPoly::var(names[i])
                } else {
                    ParityPoly::var(names[i]).add(&ParityPoly::var("n"))
                }
            })
            .collect();
        let composed = compose(tau, sigma);
        let lhs = koszul_sign(&composed, &parities).unwrap();
        let permuted: Vec<ParityPoly> = tau.iter().map(|&i| parities[i].clone()).collect();
        let rhs = koszul_sign(tau, &parities)
            .unwrap()
            .add(&koszul_sign(sigma, &permuted).unwrap());
        assert_eq!(lhs, rhs, "tau={tau:?} sigma={sigma:?}");
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in permutations(n - 1) {
            for pos in 0..=rest.len() {
                let mut p = rest.clone();
                p.insert(pos, n - 1);
                out.push(p);
            }
        }
        out
    }

    fn arb_expr(depth: u32) -> BoxedStrategy<ParityExpr> {
        let leaf = prop_oneof![
            Just(ParityExpr::Zero),
            Just(ParityExpr::One),
            prop_oneof![
                Just("a"),
                Just("b"),
                Just("c"),
                Just("d"),
                Just("e"),
                Just("f")
            ]
            .prop_map(ParityExpr::var),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.mul(b)),
            ]
        })
        .boxed()
    }

    proptest! {
        #[test]
        fn normalize_is_ring_homomorphism(a in arb_expr(4), b in arb_expr(4)) {
            let allowed = vars(&["a", "b", "c", "d", "e", "f"]);
            let na = parity_normalize(&a, &allowed).unwrap();
            let nb = parity_normalize(&b, &allowed).unwrap();
            let sum = parity_normalize(&a.clone().add(b.clone()), &allowed).unwrap();
            let prod = parity_normalize(&a.mul(b), &allowed).unwrap();
            prop_assert_eq!(sum, na.add(&nb));
            prop_assert_eq!(prod, na.mul(&nb));
        }

        #[test]
        fn normal_form_agrees_with_tree_on_all_assignments(expr in arb_expr(4)) {
            // Exhaustive over the <= 6 variables the generator can use.
            let allowed = vars(&["a", "b", "c", "d", "e", "f"]);
            let poly = parity_normalize(&expr, &allowed).unwrap();
            let names: Vec<String> = allowed.iter().cloned().collect();
            for bits in 0..(1u32 << names.len()) {
                let assignment: ParityAssignment = names
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), bits >> i & 1 == 1))
                    .collect();
                prop_assert_eq!(poly.eval(&assignment).unwrap(), expr.eval(&assignment).unwrap());
            }
        }
    }
}
