//! Search for integer-coefficient sign conventions of the graded Jacobi
//! identity.
//!
//! A candidate rule assigns each of the three Jacobi summands
//! [[α₁,α₂],α₃], [[α₂,α₃],α₁], [[α₃,α₁],α₂] a prefactor (−1)^{εᵢ} with εᵢ a
//! multilinear GF(2) polynomial in {|α₁|, |α₂|, |α₃|, n}, on top of a
//! registered construction-sign selector for the •/bracket summands
//! themselves. A rule survives when the signed sum has zero residual on every
//! sampled triple.
//!
//! Because a rule only enters through the three bits (ε₁, ε₂, ε₃) evaluated
//! at a trial's parities, trials are aggregated per parity assignment and per
//! sign pattern once; each rule is then judged by table lookup, which keeps
//! the degree-1 search (2·32³ rules) well under the time budget.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::calculus::{Algebra, AlgebraParams, DecoratedTerm, Element, Ring, SignRuleId};
use crate::lab::{sample_trial_generators, Bounds, InputFamily};
use crate::sign::{ParityAssignment, ParityPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("unsupported degree bound {0}; expected 1 or 2")]
    UnsupportedBound(u32),
}

pub const SLOT_VARS: [&str; 4] = ["|a1|", "|a2|", "|a3|", "n"];

/// Basis monomials (as variable-index sets) for the multilinear polynomials
/// up to `degree_bound`, in stream order.
pub fn monomial_basis(degree_bound: u32) -> Result<Vec<Vec<usize>>, SearchError> {
    if degree_bound != 1 && degree_bound != 2 {
        return Err(SearchError::UnsupportedBound(degree_bound));
    }
    let mut basis = vec![vec![]];
    for i in 0..4 {
        basis.push(vec![i]);
    }
    if degree_bound == 2 {
        for i in 0..4 {
            for j in (i + 1)..4 {
                basis.push(vec![i, j]);
            }
        }
    }
    Ok(basis)
}

fn poly_from_mask(basis: &[Vec<usize>], mask: u32) -> ParityPoly {
    let mut poly = ParityPoly::zero();
    for (bit, monomial) in basis.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            let term = monomial.iter().fold(ParityPoly::one(), |acc, &v| {
                acc.mul(&ParityPoly::var(SLOT_VARS[v]))
            });
            poly = poly.add(&term);
        }
    }
    poly
}

/// A candidate convention: three slot exponents plus a construction-sign
/// selector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignRule {
    pub selector: SignRuleId,
    pub masks: [u32; 3],
    pub degree_bound: u32,
}

impl SignRule {
    pub fn exponents(&self) -> [ParityPoly; 3] {
        let basis = monomial_basis(self.degree_bound).expect("validated bound");
        [
            poly_from_mask(&basis, self.masks[0]),
            poly_from_mask(&basis, self.masks[1]),
            poly_from_mask(&basis, self.masks[2]),
        ]
    }

    pub fn is_all_zero(&self) -> bool {
        self.masks == [0, 0, 0] && self.selector == SignRuleId::Zero
    }

    /// Stable textual id: selector plus hex masks over the monomial basis.
    pub fn encoding(&self) -> String {
        let width = if self.degree_bound == 1 { 2 } else { 3 };
        format!(
            "{}/{:0w$x}/{:0w$x}/{:0w$x}",
            self.selector.name(),
            self.masks[0],
            self.masks[1],
            self.masks[2],
            w = width
        )
    }

    /// The (ε₁, ε₂, ε₃) bits at a 4-bit parity assignment, packed low-to-high.
    fn pattern_at(&self, basis: &[Vec<usize>], parity_bits: u8) -> u8 {
        let mut pattern = 0u8;
        for (slot, mask) in self.masks.iter().enumerate() {
            let mut bit = false;
            for (bi, monomial) in basis.iter().enumerate() {
                if mask >> bi & 1 == 1 {
                    let value = monomial.iter().all(|&v| parity_bits >> v & 1 == 1);
                    bit ^= value;
                }
            }
            if bit {
                pattern |= 1 << slot;
            }
        }
        pattern
    }
}

/// Deterministic, duplicate-free stream of every rule at the bound: selectors
/// in registry order, then the three masks in ascending lexicographic order.
pub fn enumerate_rules(degree_bound: u32) -> Result<impl Iterator<Item = SignRule>, SearchError> {
    let basis = monomial_basis(degree_bound)?;
    let per_slot = 1u64 << basis.len();
    Ok(SignRuleId::ALL.into_iter().flat_map(move |selector| {
        (0..per_slot.pow(3)).map(move |i| {
            let m3 = (i % per_slot) as u32;
            let m2 = (i / per_slot % per_slot) as u32;
            let m1 = (i / per_slot / per_slot) as u32;
            SignRule {
                selector,
                masks: [m1, m2, m3],
                degree_bound,
            }
        })
    }))
}

pub fn rule_count(degree_bound: u32) -> Result<u64, SearchError> {
    let basis = monomial_basis(degree_bound)?;
    let per_slot = 1u64 << basis.len();
    Ok(per_slot.pow(3) * SignRuleId::ALL.len() as u64)
}

/// The three Jacobi summands of a sampled triple, over Z with the given
/// construction selector.
pub fn jacobi_components(
    params: AlgebraParams,
    gens: &[crate::calculus::BaseGenerator],
) -> [Element; 3] {
    let alg = Algebra::new(params);
    let a = alg.generator(&gens[0]);
    let b = alg.generator(&gens[1]);
    let c = alg.generator(&gens[2]);
    let j1 = alg.bracket(&alg.bracket(&a, &b).unwrap(), &c).unwrap();
    let j2 = alg.bracket(&alg.bracket(&b, &c).unwrap(), &a).unwrap();
    let j3 = alg.bracket(&alg.bracket(&c, &a).unwrap(), &b).unwrap();
    [j1, j2, j3]
}

type TermKey = (i64, crate::shape::GarlandShape, Vec<String>);

fn component_table(components: &[Element; 3]) -> BTreeMap<TermKey, [i64; 3]> {
    let mut table: BTreeMap<TermKey, [i64; 3]> = BTreeMap::new();
    for (i, element) in components.iter().enumerate() {
        for term in element.terms() {
            let key = (term.degree, term.shape.clone(), term.provenance.clone());
            table.entry(key).or_insert([0; 3])[i] += term.coefficient.value();
        }
    }
    table
}

/// Which of the 8 sign patterns zero out a trial's table.
fn pass_mask(table: &BTreeMap<TermKey, [i64; 3]>) -> u8 {
    let mut mask = 0u8;
    'pattern: for pattern in 0..8u8 {
        for coeffs in table.values() {
            let mut sum = 0i64;
            for (i, &c) in coeffs.iter().enumerate() {
                sum += if pattern >> i & 1 == 1 { -c } else { c };
            }
            if sum != 0 {
                continue 'pattern;
            }
        }
        mask |= 1 << pattern;
    }
    mask
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminatedRule {
    pub encoding: String,
    pub passes: usize,
    pub first_fail_trial: usize,
    /// Sign pattern the rule evaluated to at the failing trial's parities.
    pub pattern: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub degree_bound: u32,
    pub trials: usize,
    pub seed: u64,
    pub params: AlgebraParams,
    pub rules_enumerated: u64,
    pub untested: bool,
    pub survivor_count: u64,
    pub eliminated_count: u64,
    /// (encoding, passes). Capped at [`REPORT_RULE_CAP`] entries.
    pub survivors: Vec<(String, usize)>,
    pub eliminated: Vec<EliminatedRule>,
    pub truncated: bool,
    /// First-failure residuals, keyed by (trial, pattern, selector); every
    /// eliminated rule's (first_fail_trial, pattern, selector) resolves here.
    pub residuals: BTreeMap<(usize, u8, SignRuleId), Element>,
    /// Parity assignment index (4 bits) of each trial.
    pub trial_parities: Vec<u8>,
}

/// Reports list at most this many rules per section; the counts are always
/// exact. The degree-1 space (65536 rules) fits untruncated.
pub const REPORT_RULE_CAP: usize = 100_000;

pub fn pattern_string(pattern: u8) -> String {
    (0..3)
        .map(|i| if pattern >> i & 1 == 1 { '-' } else { '+' })
        .collect()
}

/// Run the search. Sampling matches the identity lab's Jacobi trials; the
/// ring is forced to Z (the mod-2 shadow of every rule is the plain Jacobi
/// sum, which the jacobi-mod2 suite covers).
pub fn search(
    degree_bound: u32,
    trials: usize,
    seed: u64,
    params: AlgebraParams,
    bounds: &Bounds,
) -> Result<SearchReport, SearchError> {
    let basis = monomial_basis(degree_bound)?;
    let selectors = SignRuleId::ALL;
    let mut z_params = params;
    z_params.ring = Ring::Z;

    // Per selector, per parity assignment (16), per pattern (8): how many
    // trials passed, and the earliest failing trial.
    let mut passes = vec![[[0usize; 8]; 16]; selectors.len()];
    let mut first_fail = vec![[[usize::MAX; 8]; 16]; selectors.len()];
    let mut trial_parities = Vec::with_capacity(trials);
    let mut tables_by_trial: Vec<Vec<BTreeMap<TermKey, [i64; 3]>>> = Vec::with_capacity(trials);

    for trial in 0..trials {
        let gens = sample_trial_generators(seed, trial, bounds, InputFamily::General, 3, 0);
        let parity_bits = {
            let mut bits = 0u8;
            for (i, g) in gens.iter().enumerate() {
                if g.degree.rem_euclid(2) == 1 {
                    bits |= 1 << i;
                }
            }
            if z_params.n.rem_euclid(2) == 1 {
                bits |= 1 << 3;
            }
            bits
        };
        trial_parities.push(parity_bits);
        let mut trial_tables = Vec::with_capacity(selectors.len());
        for (si, selector) in selectors.iter().enumerate() {
            let mut p = z_params;
            p.sign_rule = *selector;
            let components = jacobi_components(p, &gens);
            let table = component_table(&components);
            let mask = pass_mask(&table);
            for pattern in 0..8usize {
                if mask >> pattern & 1 == 1 {
                    passes[si][parity_bits as usize][pattern] += 1;
                } else if first_fail[si][parity_bits as usize][pattern] == usize::MAX {
                    first_fail[si][parity_bits as usize][pattern] = trial;
                }
            }
            trial_tables.push(table);
        }
        tables_by_trial.push(trial_tables);
    }

    let rules_enumerated = rule_count(degree_bound)?;
    let mut survivors = Vec::new();
    let mut eliminated = Vec::new();
    let mut survivor_count = 0u64;
    let mut eliminated_count = 0u64;
    let mut truncated = false;
    let mut residual_requests: BTreeMap<(usize, u8, usize), ()> = BTreeMap::new();

    for rule in enumerate_rules(degree_bound)? {
        let si = selectors
            .iter()
            .position(|s| *s == rule.selector)
            .expect("registered selector");
        // Pattern per parity assignment, computed once per rule.
        let mut pattern_at = [0u8; 16];
        for (p, slot) in pattern_at.iter_mut().enumerate() {
            *slot = rule.pattern_at(&basis, p as u8);
        }
        let mut pass_total = 0usize;
        let mut fail_at = usize::MAX;
        let mut fail_pattern = 0u8;
        for p in 0..16usize {
            let pattern = pattern_at[p] as usize;
            pass_total += passes[si][p][pattern];
            let ff = first_fail[si][p][pattern];
            if ff < fail_at {
                fail_at = ff;
                fail_pattern = pattern as u8;
            }
        }
        if fail_at == usize::MAX {
            survivor_count += 1;
            if survivors.len() < REPORT_RULE_CAP {
                survivors.push((rule.encoding(), pass_total));
            } else {
                truncated = true;
            }
        } else {
            eliminated_count += 1;
            if eliminated.len() < REPORT_RULE_CAP {
                residual_requests.insert((fail_at, fail_pattern, si), ());
                eliminated.push(EliminatedRule {
                    encoding: rule.encoding(),
                    passes: pass_total,
                    first_fail_trial: fail_at,
                    pattern: fail_pattern,
                });
            } else {
                truncated = true;
            }
        }
    }

    // Materialize the referenced residuals.
    let mut residuals = BTreeMap::new();
    for ((trial, pattern, si), ()) in residual_requests {
        let mut p = z_params;
        p.sign_rule = selectors[si];
        let alg = Algebra::new(p);
        let table = &tables_by_trial[trial][si];
        let mut raw: Vec<DecoratedTerm> = Vec::new();
        for ((degree, shape, provenance), coeffs) in table {
            let mut sum = 0i64;
            for (i, &c) in coeffs.iter().enumerate() {
                sum += if pattern >> i & 1 == 1 { -c } else { c };
            }
            if sum != 0 {
                raw.push(DecoratedTerm {
                    coefficient: crate::sign::Coefficient::new(Ring::Z, sum),
                    degree: *degree,
                    shape: shape.clone(),
                    provenance: provenance.clone(),
                    fresh: Default::default(),
                });
            }
        }
        residuals.insert((trial, pattern, selectors[si]), alg.from_raw(raw));
    }

    Ok(SearchReport {
        degree_bound,
        trials,
        seed,
        params: z_params,
        rules_enumerated,
        untested: trials == 0,
        survivor_count,
        eliminated_count,
        survivors,
        eliminated,
        truncated,
        residuals,
        trial_parities,
    })
}

/// Evaluate one rule's signed Jacobi sum on one trial (the slow path; used
/// by tests as an independent oracle for the table-driven fast path).
pub fn evaluate_rule_on_trial(
    rule: &SignRule,
    params: AlgebraParams,
    seed: u64,
    trial: usize,
    bounds: &Bounds,
) -> Element {
    let mut p = params;
    p.ring = Ring::Z;
    p.sign_rule = rule.selector;
    let gens = sample_trial_generators(seed, trial, bounds, InputFamily::General, 3, 0);
    let assignment: ParityAssignment = SLOT_VARS
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let bit = if i < 3 {
                gens[i].degree.rem_euclid(2) == 1
            } else {
                p.n.rem_euclid(2) == 1
            };
            (v.to_string(), bit)
        })
        .collect();
    let exponents = rule.exponents();
    let components = jacobi_components(p, &gens);
    let alg = Algebra::new(p);
    let mut acc = alg.zero();
    for (i, component) in components.iter().enumerate() {
        let flip = exponents[i].eval(&assignment).unwrap();
        let signed = if flip {
            alg.negate(component)
        } else {
            component.clone()
        };
        acc = alg.add(&acc, &signed).unwrap();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::SignRuleId;

    fn z_params(n: i64) -> AlgebraParams {
        AlgebraParams::new(2, n, false, Ring::Z, SignRuleId::Zero).unwrap()
    }

    #[test]
    fn basis_counts() {
        assert_eq!(monomial_basis(1).unwrap().len(), 5);
        assert_eq!(monomial_basis(2).unwrap().len(), 11);
        assert_eq!(monomial_basis(3), Err(SearchError::UnsupportedBound(3)));
        // 2^5 = 32 polynomials per slot, 32^3 triples per selector.
        assert_eq!(rule_count(1).unwrap(), 32u64.pow(3) * 2);
    }

    #[test]
    fn stream_deterministic_and_contains_all_zero() {
        let first: Vec<SignRule> = enumerate_rules(1).unwrap().take(100).collect();
        let second: Vec<SignRule> = enumerate_rules(1).unwrap().take(100).collect();
        assert_eq!(first, second);
        assert!(first[0].is_all_zero());
        let mut seen = std::collections::BTreeSet::new();
        for rule in enumerate_rules(1).unwrap() {
            assert!(
                seen.insert(rule.encoding()),
                "duplicate {:?}",
                rule.encoding()
            );
        }
        assert_eq!(seen.len(), rule_count(1).unwrap() as usize);
    }

    #[test]
    fn zero_trials_all_survive_untested() {
        let report = search(1, 0, 7, z_params(1), &Bounds::default()).unwrap();
        assert!(report.untested);
        assert_eq!(report.survivor_count, report.rules_enumerated);
        assert_eq!(report.eliminated_count, 0);
    }

    #[test]
    fn table_path_agrees_with_direct_evaluation() {
        // The aggregated fast path must agree with the slow per-rule
        // evaluation on whether each (rule, trial) residual vanishes.
        let bounds = Bounds::default();
        let params = z_params(1);
        let trials = 6;
        let report = search(1, trials, 101, params, &bounds).unwrap();
        let sample_rules: Vec<SignRule> =
            enumerate_rules(1).unwrap().step_by(4099).take(12).collect();
        for rule in &sample_rules {
            let mut fail_at = None;
            let mut passes = 0usize;
            for trial in 0..trials {
                let residual = evaluate_rule_on_trial(rule, params, 101, trial, &bounds);
                if residual.is_zero() {
                    passes += 1;
                } else if fail_at.is_none() {
                    fail_at = Some(trial);
                }
            }
            let enc = rule.encoding();
            let in_survivors = report.survivors.iter().any(|(e, _)| e == &enc);
            match fail_at {
                None => assert!(in_survivors, "{enc} should survive"),
                Some(t) => {
                    let entry = report
                        .eliminated
                        .iter()
                        .find(|e| e.encoding == enc)
                        .unwrap_or_else(|| panic!("{enc} should be eliminated"));
                    assert_eq!(entry.first_fail_trial, t, "{enc}");
                    assert_eq!(entry.passes, passes, "{enc}");
                    // The catalogued residual matches direct evaluation up to
                    // an overall sign convention of the pattern encoding.
                    let catalogued = report
                        .residuals
                        .get(&(entry.first_fail_trial, entry.pattern, rule.selector))
                        .expect("referenced residual is catalogued");
                    let direct = evaluate_rule_on_trial(rule, params, 101, t, &bounds);
                    assert_eq!(catalogued, &direct, "{enc}");
                    assert!(!catalogued.is_zero());
                }
            }
        }
    }

    #[test]
    fn elimination_is_monotone_in_trials() {
        let bounds = Bounds::default();
        let params = z_params(2);
        let small = search(1, 4, 55, params, &bounds).unwrap();
        let large = search(1, 9, 55, params, &bounds).unwrap();
        let small_elim: BTreeMap<String, usize> = small
            .eliminated
            .iter()
            .map(|e| (e.encoding.clone(), e.first_fail_trial))
            .collect();
        let large_elim: BTreeMap<String, usize> = large
            .eliminated
            .iter()
            .map(|e| (e.encoding.clone(), e.first_fail_trial))
            .collect();
        for (enc, trial) in &small_elim {
            assert_eq!(large_elim.get(enc), Some(trial), "{enc}");
        }
        assert!(large_elim.len() >= small_elim.len());
    }

    #[test]
    fn reports_reproducible() {
        let bounds = Bounds::default();
        let a = search(1, 5, 99, z_params(1), &bounds).unwrap();
        let b = search(1, 5, 99, z_params(1), &bounds).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relabeling_symmetry_of_pass_masks() {
        // Swapping the first two sampled generators turns (J1, J2, J3) into
        // (J1, J3, J2) under the symmetric construction selectors, so the
        // pass mask transforms by swapping pattern bits 1 and 2. This is the
        // symmetry that maps the survivor set onto itself under the matching
        // slot swap.
        let bounds = Bounds::default();
        let params = z_params(1);
        for trial in 0..6 {
            let gens = sample_trial_generators(31, trial, &bounds, InputFamily::General, 3, 0);
            let mut swapped = gens.clone();
            swapped.swap(0, 1);
            for selector in SignRuleId::ALL {
                let mut p = params;
                p.sign_rule = selector;
                let base = component_table(&jacobi_components(p, &gens));
                let swap = component_table(&jacobi_components(p, &swapped));
                let base_mask = pass_mask(&base);
                let swap_mask = pass_mask(&swap);
                for pattern in 0..8u8 {
                    let transformed =
                        (pattern & 0b001) | ((pattern & 0b010) << 1) | ((pattern & 0b100) >> 1);
                    assert_eq!(
                        base_mask >> pattern & 1,
                        swap_mask >> transformed & 1,
                        "trial {trial} selector {selector:?} pattern {pattern}"
                    );
                }
            }
        }
    }

    #[test]
    fn no_survivors_on_generic_trials() {
        // The three cancellation classes force epsilon constraints whose sum
        // is odd, so no multiplicative parity rule can survive a trial where
        // all three classes appear; a handful of trials kills everything.
        let report = search(1, 12, 2024, z_params(1), &Bounds::default()).unwrap();
        assert_eq!(
            report.survivor_count, 0,
            "survivors: {:?}",
            report.survivors
        );
        assert!(!report.truncated);
    }
}
