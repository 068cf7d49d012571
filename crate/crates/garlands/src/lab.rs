//! Seeded randomized verification of the calculus identities.
//!
//! Every identity is evaluated by full expansion of both sides and canonical
//! comparison — the expansion is the definition, so the comparison doubles as
//! a specification oracle. Failures are recorded (never aborted on), the
//! first counterexample is greedily shrunk, and the whole report is a pure
//! function of (identity, family, seed, trials, params).

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::calculus::{Algebra, AlgebraParams, BaseGenerator, Element, Ring};
use crate::shape::{GarlandShape, Mark, PointRef};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabError {
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("unknown input family `{0}`")]
    UnknownFamily(String),
    #[error("minimize called on an input that does not fail its identity")]
    NotFailing,
}

/// The identities the lab knows how to state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityName {
    Comm,
    Assoc,
    Distrib,
    UnitLaw,
    AntisymMod2,
    JacobiMod2,
    Bilinear,
    Prop42,
    Prop43,
    DeltaSq,
    BvProbe,
}

impl IdentityName {
    pub const ALL: [IdentityName; 11] = [
        IdentityName::Comm,
        IdentityName::Assoc,
        IdentityName::Distrib,
        IdentityName::UnitLaw,
        IdentityName::AntisymMod2,
        IdentityName::JacobiMod2,
        IdentityName::Bilinear,
        IdentityName::Prop42,
        IdentityName::Prop43,
        IdentityName::DeltaSq,
        IdentityName::BvProbe,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityName::Comm => "comm",
            IdentityName::Assoc => "assoc",
            IdentityName::Distrib => "distrib",
            IdentityName::UnitLaw => "unit-law",
            IdentityName::AntisymMod2 => "antisym-mod2",
            IdentityName::JacobiMod2 => "jacobi-mod2",
            IdentityName::Bilinear => "bilinear",
            IdentityName::Prop42 => "prop42",
            IdentityName::Prop43 => "prop43",
            IdentityName::DeltaSq => "delta-sq",
            IdentityName::BvProbe => "bv-probe",
        }
    }

    pub fn parse(s: &str) -> Result<Self, LabError> {
        Self::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| LabError::UnknownIdentity(s.to_string()))
    }

    /// Number of fresh generators a trial draws.
    pub fn arity(&self) -> usize {
        match self {
            IdentityName::UnitLaw | IdentityName::Prop43 | IdentityName::DeltaSq => 1,
            IdentityName::Comm | IdentityName::AntisymMod2 | IdentityName::Prop42 => 2,
            _ => 3,
        }
    }

    /// These identities are stated mod 2 only; the lab runs them over Z/2
    /// regardless of the requested ring.
    pub fn forces_mod2(&self) -> bool {
        matches!(
            self,
            IdentityName::AntisymMod2 | IdentityName::JacobiMod2 | IdentityName::BvProbe
        )
    }

    /// Minimum copy count for sampled generators. The bracket construction
    /// lives on factors with at least one copy; since the zero-copy bracket
    /// is conventionally 0 here, prop42 is stated (and sampled) on the
    /// construction's domain. All other bracket identities are trivially
    /// true at zero copies, so they sample the full range.
    pub fn min_copies(&self) -> usize {
        match self {
            IdentityName::Prop42 => 1,
            _ => 0,
        }
    }

    fn uses_bracket(&self) -> bool {
        matches!(
            self,
            IdentityName::AntisymMod2
                | IdentityName::JacobiMod2
                | IdentityName::Bilinear
                | IdentityName::Prop42
        )
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Which shapes the trial inputs are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InputFamily {
    #[default]
    General,
    /// Every term has exactly one grading-1 mark (the family on which unit
    /// and associativity laws hold exactly).
    OneGradingOneMark,
    /// Inputs are lifts of sampled generators.
    LiftImage,
}

impl InputFamily {
    pub fn name(&self) -> &'static str {
        match self {
            InputFamily::General => "general",
            InputFamily::OneGradingOneMark => "one-grading-1-mark",
            InputFamily::LiftImage => "lift-image",
        }
    }

    pub fn parse(s: &str) -> Result<Self, LabError> {
        match s {
            "general" => Ok(InputFamily::General),
            "one-grading-1-mark" => Ok(InputFamily::OneGradingOneMark),
            "lift-image" => Ok(InputFamily::LiftImage),
            _ => Err(LabError::UnknownFamily(s.to_string())),
        }
    }
}

/// An identity plus the family its inputs are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentitySpec {
    pub name: IdentityName,
    pub family: InputFamily,
}

/// Sampling bounds for random generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_copies: usize,
    pub max_marks: usize,
    pub max_grading: u32,
    pub max_points_per_mark: usize,
    pub degree_min: i64,
    pub degree_max: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_copies: 3,
            max_marks: 3,
            max_grading: 3,
            max_points_per_mark: 3,
            degree_min: -2,
            degree_max: 6,
        }
    }
}

/// Deterministic generator sampling: same seed, same generator.
pub fn random_generator(seed: u64, bounds: &Bounds, name: &str) -> BaseGenerator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_generator(&mut rng, bounds, InputFamily::General, name)
}

/// Sample one generator from a family. Zero-copy draws produce the
/// M-component generator (one empty grading-1 mark).
pub fn sample_generator(
    rng: &mut ChaCha8Rng,
    bounds: &Bounds,
    family: InputFamily,
    name: &str,
) -> BaseGenerator {
    sample_generator_min_copies(rng, bounds, family, name, 0)
}

pub fn sample_generator_min_copies(
    rng: &mut ChaCha8Rng,
    bounds: &Bounds,
    family: InputFamily,
    name: &str,
    min_copies: usize,
) -> BaseGenerator {
    let degree = rng.gen_range(bounds.degree_min..=bounds.degree_max);
    let copies = rng.gen_range(min_copies..=bounds.max_copies.max(min_copies));
    if copies == 0 {
        let shape = GarlandShape::new(0, vec![Mark::new(1, vec![]).unwrap()]).unwrap();
        return BaseGenerator::new(name, degree, shape);
    }
    let mut marks = Vec::new();
    match family {
        InputFamily::OneGradingOneMark => {
            marks.push(sample_mark(rng, bounds, copies, Some(1)));
            let extra = rng.gen_range(0..=bounds.max_marks.saturating_sub(1));
            for _ in 0..extra {
                marks.push(sample_mark(rng, bounds, copies, None));
            }
        }
        _ => {
            let count = rng.gen_range(0..=bounds.max_marks);
            for _ in 0..count {
                let g = rng.gen_range(1..=bounds.max_grading);
                marks.push(sample_mark(rng, bounds, copies, Some(g)));
            }
        }
    }
    let shape = GarlandShape::new(copies, marks).unwrap();
    BaseGenerator::new(name, degree, shape)
}

/// `forced_grading = None` means "grading at least 2" (for the restricted family).
fn sample_mark(
    rng: &mut ChaCha8Rng,
    bounds: &Bounds,
    copies: usize,
    forced_grading: Option<u32>,
) -> Mark {
    let grading = match forced_grading {
        Some(g) => g,
        None => rng.gen_range(2..=bounds.max_grading.max(2)),
    };
    let npoints = rng.gen_range(0..=bounds.max_points_per_mark);
    let points = (0..npoints)
        .map(|_| {
            // Small label pool so shared and repeated points arise naturally.
            PointRef::new(rng.gen_range(0..copies), rng.gen_range(0..3))
        })
        .collect();
    Mark::new(grading, points).unwrap()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    // splitmix-style mixing keeps per-trial streams independent of ordering.
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(trial as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

const GENERATOR_NAMES: [&str; 3] = ["g1", "g2", "g3"];

pub fn sample_trial_generators(
    seed: u64,
    trial: usize,
    bounds: &Bounds,
    family: InputFamily,
    arity: usize,
    min_copies: usize,
) -> Vec<BaseGenerator> {
    let mut rng = trial_rng(seed, trial);
    (0..arity)
        .map(|i| {
            sample_generator_min_copies(&mut rng, bounds, family, GENERATOR_NAMES[i], min_copies)
        })
        .collect()
}

/// Build the trial inputs for an identity from its sampled generators.
fn inputs_for(alg: &Algebra, family: InputFamily, gens: &[BaseGenerator]) -> Vec<Element> {
    gens.iter()
        .map(|g| {
            let e = alg.generator(g);
            match family {
                InputFamily::LiftImage => alg.lift(&e),
                _ => e,
            }
        })
        .collect()
}

/// Evaluate both sides of an identity on concrete inputs.
pub fn evaluate_identity(
    alg: &Algebra,
    name: IdentityName,
    inputs: &[Element],
) -> (Element, Element) {
    let p = |x: &Element, y: &Element| alg.product(x, y).unwrap();
    let b = |x: &Element, y: &Element| alg.bracket(x, y).unwrap();
    let s = |x: &Element, y: &Element| alg.add(x, y).unwrap();
    match name {
        IdentityName::Comm => (p(&inputs[0], &inputs[1]), p(&inputs[1], &inputs[0])),
        IdentityName::Assoc => (
            p(&p(&inputs[0], &inputs[1]), &inputs[2]),
            p(&inputs[0], &p(&inputs[1], &inputs[2])),
        ),
        IdentityName::Distrib => (
            p(&inputs[0], &s(&inputs[1], &inputs[2])),
            s(&p(&inputs[0], &inputs[1]), &p(&inputs[0], &inputs[2])),
        ),
        IdentityName::UnitLaw => (p(&alg.unit(), &inputs[0]), inputs[0].clone()),
        IdentityName::AntisymMod2 => (b(&inputs[0], &inputs[1]), b(&inputs[1], &inputs[0])),
        IdentityName::JacobiMod2 => {
            let j1 = b(&b(&inputs[0], &inputs[1]), &inputs[2]);
            let j2 = b(&b(&inputs[1], &inputs[2]), &inputs[0]);
            let j3 = b(&b(&inputs[2], &inputs[0]), &inputs[1]);
            (s(&s(&j1, &j2), &j3), alg.zero())
        }
        IdentityName::Bilinear => (
            b(&inputs[0], &s(&inputs[1], &inputs[2])),
            s(&b(&inputs[0], &inputs[1]), &b(&inputs[0], &inputs[2])),
        ),
        IdentityName::Prop42 => (
            b(&inputs[0], &inputs[1]),
            alg.proj(&p(&alg.lift(&inputs[0]), &alg.lift(&inputs[1]))),
        ),
        IdentityName::Prop43 => (alg.proj(&alg.lift(&inputs[0])), alg.zero()),
        IdentityName::DeltaSq => (alg.delta(&alg.delta(&inputs[0])), alg.zero()),
        IdentityName::BvProbe => {
            // The seven-term relation for the shape Delta over Z/2; triple
            // products are associated to the left.
            let a = &inputs[0];
            let bb = &inputs[1];
            let c = &inputs[2];
            let total = [
                alg.delta(&p(&p(a, bb), c)),
                p(&alg.delta(&p(a, bb)), c),
                p(a, &alg.delta(&p(bb, c))),
                p(bb, &alg.delta(&p(a, c))),
                p(&p(&alg.delta(a), bb), c),
                p(&p(a, &alg.delta(bb)), c),
                p(&p(a, bb), &alg.delta(c)),
            ]
            .into_iter()
            .reduce(|acc, e| s(&acc, &e))
            .unwrap();
            (total, alg.zero())
        }
    }
}

/// A failing trial: its index and the generators that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub generators: Vec<BaseGenerator>,
}

/// Report of one `check` run; bit-reproducible from its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialReport {
    pub identity: IdentityName,
    pub family: InputFamily,
    /// Effective parameters (ring may be coerced to Z/2 for mod-2 identities).
    pub params: AlgebraParams,
    pub ring_coerced: bool,
    pub seed: u64,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    /// Trials whose bracket saw a zero-copy factor (the case the bracket
    /// leaves undefined and this engine maps to 0).
    pub bracket_zero_copy_inputs: usize,
    pub first_counterexample: Option<Counterexample>,
    /// LHS − RHS for the first counterexample.
    pub diff: Option<Element>,
    pub minimized: Option<Counterexample>,
    pub minimized_diff: Option<Element>,
}

impl TrialReport {
    /// Whether the observed outcome contradicts an asserted identity (as
    /// opposed to identities the theory leaves open at this configuration).
    pub fn diverges(&self) -> bool {
        self.failures > 0 && expectation_must_hold(self.identity, self.family, &self.params)
    }
}

/// True when the theory asserts the identity on this family/parameters, so a
/// failure is a divergence rather than an open outcome.
pub fn expectation_must_hold(
    identity: IdentityName,
    family: InputFamily,
    params: &AlgebraParams,
) -> bool {
    let _ = family;
    match identity {
        IdentityName::Comm
        | IdentityName::Distrib
        | IdentityName::Bilinear
        | IdentityName::AntisymMod2
        | IdentityName::JacobiMod2
        | IdentityName::Prop42 => true,
        IdentityName::Prop43 | IdentityName::DeltaSq => params.p_is_boundary,
        // The source theory asserts unit and associativity laws outright, so
        // shape-level failures on the general family are divergences.
        IdentityName::UnitLaw | IdentityName::Assoc => true,
        IdentityName::BvProbe => false,
    }
}

/// Run `trials` seeded trials of an identity. Never aborts on failure.
pub fn check(
    spec: IdentitySpec,
    trials: usize,
    seed: u64,
    params: AlgebraParams,
    bounds: &Bounds,
) -> TrialReport {
    let mut effective = params;
    let ring_coerced = spec.name.forces_mod2() && params.ring != Ring::Z2;
    if spec.name.forces_mod2() {
        effective.ring = Ring::Z2;
    }
    let alg = Algebra::new(effective);
    let arity = spec.name.arity();
    let mut passes = 0;
    let mut failures = 0;
    let mut bracket_zero_copy_inputs = 0;
    let mut first_counterexample = None;
    let mut diff = None;
    for trial in 0..trials {
        let gens = sample_trial_generators(
            seed,
            trial,
            bounds,
            spec.family,
            arity,
            spec.name.min_copies(),
        );
        if spec.name.uses_bracket() && gens.iter().any(|g| g.shape().copies() == 0) {
            bracket_zero_copy_inputs += 1;
        }
        let inputs = inputs_for(&alg, spec.family, &gens);
        let (lhs, rhs) = evaluate_identity(&alg, spec.name, &inputs);
        if lhs == rhs {
            passes += 1;
        } else {
            failures += 1;
            if first_counterexample.is_none() {
                diff = Some(alg.sub(&lhs, &rhs).unwrap());
                first_counterexample = Some(Counterexample {
                    trial,
                    generators: gens,
                });
            }
        }
    }
    let (minimized, minimized_diff) = match &first_counterexample {
        Some(cex) => {
            let min = minimize(spec, effective, cex).expect("counterexample fails");
            let inputs = inputs_for(&alg, spec.family, &min.generators);
            let (lhs, rhs) = evaluate_identity(&alg, spec.name, &inputs);
            let d = alg.sub(&lhs, &rhs).unwrap();
            (Some(min), Some(d))
        }
        None => (None, None),
    };
    TrialReport {
        identity: spec.name,
        family: spec.family,
        params: effective,
        ring_coerced,
        seed,
        trials,
        passes,
        failures,
        bracket_zero_copy_inputs,
        first_counterexample,
        diff,
        minimized,
        minimized_diff,
    }
}

fn fails(spec: IdentitySpec, params: AlgebraParams, gens: &[BaseGenerator]) -> bool {
    let alg = Algebra::new(params);
    let inputs = inputs_for(&alg, spec.family, gens);
    let (lhs, rhs) = evaluate_identity(&alg, spec.name, &inputs);
    lhs != rhs
}

/// Greedy shrink: repeatedly drop marks, drop single point occurrences and
/// drop unreferenced copies from the counterexample's generators, keeping
/// every step that still fails, until no single removal fails. The result is
/// locally minimal by construction.
pub fn minimize(
    spec: IdentitySpec,
    params: AlgebraParams,
    cex: &Counterexample,
) -> Result<Counterexample, LabError> {
    if !fails(spec, params, &cex.generators) {
        return Err(LabError::NotFailing);
    }
    let mut gens = cex.generators.clone();
    loop {
        let mut improved = false;
        'outer: for gi in 0..gens.len() {
            for candidate in shrink_candidates(&gens[gi]) {
                let mut trial = gens.clone();
                trial[gi] = candidate;
                if fails(spec, params, &trial) {
                    gens = trial;
                    improved = true;
                    break 'outer;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(Counterexample {
        trial: cex.trial,
        generators: gens,
    })
}

/// Single-step structural reductions of a generator, in deterministic order.
fn shrink_candidates(gen: &BaseGenerator) -> Vec<BaseGenerator> {
    let shape = gen.shape();
    let mut out = Vec::new();
    // Drop one mark.
    for i in 0..shape.marks().len() {
        let mut marks = shape.marks().to_vec();
        marks.remove(i);
        if let Ok(s) = GarlandShape::new(shape.copies(), marks) {
            out.push(BaseGenerator::new(gen.name.clone(), gen.degree, s));
        }
    }
    // Drop one point occurrence.
    for i in 0..shape.marks().len() {
        for j in 0..shape.marks()[i].size() {
            let mut marks = shape.marks().to_vec();
            let mut points = marks[i].points().to_vec();
            points.remove(j);
            marks[i] = Mark::new(marks[i].grading(), points).unwrap();
            if let Ok(s) = GarlandShape::new(shape.copies(), marks) {
                out.push(BaseGenerator::new(gen.name.clone(), gen.degree, s));
            }
        }
    }
    // Drop one unreferenced copy (reindexing those above it).
    let referenced: BTreeSet<usize> = shape
        .marks()
        .iter()
        .flat_map(|m| m.points())
        .map(|p| p.copy)
        .collect();
    for c in 0..shape.copies() {
        if referenced.contains(&c) {
            continue;
        }
        let marks = shape
            .marks()
            .iter()
            .map(|m| {
                m.map_points(|p| {
                    PointRef::new(if p.copy > c { p.copy - 1 } else { p.copy }, p.label)
                })
            })
            .collect();
        if let Ok(s) = GarlandShape::new(shape.copies() - 1, marks) {
            out.push(BaseGenerator::new(gen.name.clone(), gen.degree, s));
        }
    }
    out
}
