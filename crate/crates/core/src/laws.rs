//! Executable registry of the residual-calculus laws.
//!
//! Each law quantifies over tuples of elements of a finite instance (optionally
//! paired with a family `H`) or over seeded samples, and either passes,
//! fails with a replayable witness, or is skipped because its hypothesis does
//! not hold on the instance.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::order::{ElementSet, FiniteLattice};
use crate::residual::{
    self, compute_profile, delta_plus, EffectiveLattice, Family, RankValue, ResidualProfile,
    Residues,
};

macro_rules! law_ids {
    ($($id:ident => $name:literal, $gate:ident, $domain:expr, $desc:literal;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum LawId {
            $($id,)*
        }

        impl LawId {
            pub const ALL: &'static [LawId] = &[$(LawId::$id,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(LawId::$id => $name,)*
                }
            }

            pub fn gate(self) -> Gate {
                match self {
                    $(LawId::$id => Gate::$gate,)*
                }
            }

            pub fn domain(self) -> Domain {
                match self {
                    $(LawId::$id => $domain,)*
                }
            }

            pub fn description(self) -> &'static str {
                match self {
                    $(LawId::$id => $desc,)*
                }
            }
        }
    };
}

law_ids! {
    LatticeAxioms => "LATTICE_AXIOMS", Always, Domain::Tuples(3),
        "meet and join are the greatest lower and least upper bounds of the order";
    ProfileInvariants => "PROFILE_INVARIANTS", Always, Domain::Tuples(1),
        "μ(x) ≤ x, μ(c(x)) = c(x), c(x) ≤ μ(x) at positive rank, strata partition δ(x) with ρ";
    MaximalsDuallyCompact => "MAXIMALS_DUALLY_COMPACT", Always, Domain::Tuples(1),
        "every m ∈ M(x) of a dually compact x is dually compact";
    DownsetUpperComplete => "DOWNSET_UPPER_COMPLETE", Always, Domain::Tuples(1),
        "every subset of ↓x has a least upper bound inside ↓x";
    MaximalsPairwiseJoin => "MAXIMALS_PAIRWISE_JOIN", Always, Domain::FamilyTuples(1),
        "y ∨ z = x for distinct y, z ∈ M_H(x)";
    KLowerSemilattice => "K_LOWER_SEMILATTICE", Coframe, Domain::Tuples(2),
        "the meet of two dually compact elements is dually compact";
    MaximalsPairwiseMeet => "MAXIMALS_PAIRWISE_MEET", Coframe, Domain::Tuples(1),
        "y ∧ z ∈ M(y) ∩ M(z) for distinct y, z ∈ M(x)";
    CoheytingJoin => "COHEYTING_JOIN", Coframe, Domain::Tuples(2),
        "z ∨ (x − z) = x for z ≤ x";
    CoheytingMinimal => "COHEYTING_MINIMAL", Coframe, Domain::Tuples(3),
        "x − z ≤ y for every y ≤ x with z ∨ y = x";
    MuResidueDecomp => "MU_RESIDUE_DECOMP", Coframe, Domain::FamilyTuples(1),
        "x = μ_H(x) ∨ ⋁_{m ∈ M_H(x)} (x − m)";
    CoreResidueDecomp => "CORE_RESIDUE_DECOMP", Coframe, Domain::Tuples(1),
        "x = c(x) ∨ ⋁_{m ∈ M(x)} (x − m)";
    ResidueSingleMaximal => "RESIDUE_SINGLE_MAXIMAL", Coframe, Domain::FamilyTuples(1),
        "M_H(x − m) has exactly one element for m ∈ M_H(x)";
    ResidueMuBelow => "RESIDUE_MU_BELOW", Coframe, Domain::FamilyTuples(1),
        "μ_H(x − m) ≤ m for m ∈ M_H(x)";
    ResidueNoOutcast => "RESIDUE_NO_OUTCAST", Coframe, Domain::FamilyTuples(1),
        "x − m has no H-outcast for m ∈ M_H(x)";
    MaximalReconstruct => "MAXIMAL_RECONSTRUCT", Coframe, Domain::Tuples(1),
        "m = μ(x) ∨ ⋁_{n ∈ M(x), n ≠ m} (x − n) for m ∈ M(x)";
    MuResidueBound => "MU_RESIDUE_BOUND", Coframe, Domain::Tuples(1),
        "μ(x) − m ≤ ⋁_{n ∈ M(x)} (x − n) for m ∈ M(μ(x))";
    OutcastTrichotomy => "OUTCAST_TRICHOTOMY", Coframe, Domain::Tuples(1),
        "x has an outcast iff c(x) ≰ ∂x iff ∂x < x, and then the outcasts are ↑∂x ∩ ↓x minus x";
    RankedPoset => "RANKED_POSET", Coframe, Domain::Tuples(1),
        "s < t in δ(x) implies ρ(s) > ρ(t)";
    StratumAntichain => "STRATUM_ANTICHAIN", Coframe, Domain::Tuples(1),
        "distinct members of one stratum are incomparable";
    DeltaEqDeltaPlus => "DELTA_EQ_DELTA_PLUS", Coframe, Domain::Tuples(1),
        "δ(x) = {s ∈ I(L) : s ≤ x, s ≰ c(x)}";
    S0Characterization => "S0_CHARACTERIZATION", Coframe, Domain::Tuples(1),
        "s_0(x) = {s ∈ δ⁺(x) : s ≰ ⋁(δ⁺(x) ∖ {s})} and c(x) ∨ ⋁(δ⁺(x) ∖ {s}) is the unique m ∈ M(x) with s ∨ m = x";
    MJoinSubadditive => "M_JOIN_SUBADDITIVE", Coframe, Domain::Tuples(2),
        "|M(x ∨ z)| ≤ |M(x)| + |M(z)|";
    SubelementDecomp => "SUBELEMENT_DECOMP", Coframe, Domain::Tuples(2),
        "z = (z ∧ c(x)) ∨ ⋁{s ∈ δ(x) : s ≤ z} for z ≤ x";
    MuMonotone => "MU_MONOTONE", Coframe, Domain::Tuples(2),
        "z ≤ x implies μ(z) ≤ μ(x)";
    MuJoinHom => "MU_JOIN_HOM", Coframe, Domain::Tuples(2),
        "μ(x ∨ z) = μ(x) ∨ μ(z)";
    MinmaxBound => "MINMAX_BOUND", Coframe, Domain::Sampled,
        "z ≤ x_s ∨ x'_s for all s implies z ≤ (⋁ x_s) ∨ (⋀ x'_s), x non-decreasing, x' non-increasing";
    FiniteRemovalDescent => "FINITE_REMOVAL_DESCENT", Coframe, Domain::Tuples(1),
        "c(x) ∨ ⋁(δ(x) ∖ P) is reached from x by a finite maximal-subelement descent, and is dually compact with x";
    CoreUnion => "CORE_UNION", Coframe, Domain::Tuples(1),
        "c(x) = ⋁(T_0 ∩ ↓x)";
    CoreDecomp => "CORE_DECOMP", Coframe, Domain::Tuples(3),
        "y = c(x ∧ y) ∨ c(z ∧ y) for y ∈ T_0 with y ≤ x ∨ z";
    CoreJoinHom => "CORE_JOIN_HOM", Coframe, Domain::Tuples(2),
        "c(x ∨ z) = c(x) ∨ c(z)";
    T0UpperSemilattice => "T0_UPPER_SEMILATTICE", Coframe, Domain::Tuples(2),
        "T_0 contains ε and is closed under binary joins";
    XMinusBoundaryT0 => "X_MINUS_BOUNDARY_T0", Coframe, Domain::Tuples(1),
        "x − ∂x ∈ T_0 and x − ∂x ≤ c(x)";
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawId {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        LawId::ALL
            .iter()
            .copied()
            .find(|l| l.name() == wanted)
            .ok_or_else(|| LawError::UnknownLaw(s.to_string()))
    }
}

impl Serialize for LawId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Parses `all` or a comma-separated list of law names.
pub fn parse_selection(text: &str) -> Result<Vec<LawId>, LawError> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(LawId::ALL.to_vec());
    }
    text.split(',').map(str::parse).collect()
}

/// Hypothesis a law needs from the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Always,
    Coframe,
}

/// What a law quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// All tuples of the given arity.
    Tuples(usize),
    /// All tuples of the given arity, for each admissible family `H`.
    FamilyTuples(usize),
    /// Seeded random tuples.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Most tuples any single law may check before reporting partial coverage.
    pub max_checks: u64,
    /// Subsets of sets up to this size are enumerated exhaustively.
    pub subset_exhaustive: usize,
    /// Number of seeded samples where enumeration is not exhaustive.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_checks: 20_000_000,
            subset_exhaustive: 12,
            samples: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub family: String,
    pub elements: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
    Skipped { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    Exhaustive,
    Sampled,
    Partial { total: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: LawId,
    pub instance: String,
    pub verdict: Verdict,
    pub checked: u64,
    pub coverage: Coverage,
    pub elapsed_us: u64,
}

impl LawReport {
    pub fn is_fail(&self) -> bool {
        matches!(self.verdict, Verdict::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self.verdict, Verdict::Pass)
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.verdict, Verdict::Skipped { .. })
    }

    /// JSON form; the elapsed time is left out unless `timing` is set so that
    /// reports are byte-identical across runs.
    pub fn to_json(&self, timing: bool) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !timing {
            v.as_object_mut().expect("object").remove("elapsed_us");
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("instance does not enumerate its elements")]
    NotEnumerable,
    #[error("budget exceeded after {} checks", .0.checked)]
    BudgetExceeded(Box<LawReport>),
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
}

type Check = Result<(), String>;

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

/// Precomputed data shared by all laws on one instance.
pub struct LawContext<'a, L: EffectiveLattice> {
    l: &'a L,
    universe: Vec<L::Elem>,
    index: HashMap<L::Elem, usize>,
    profiles: Vec<Result<ResidualProfile<L::Elem>, String>>,
    t0: BTreeSet<L::Elem>,
    coirreducible: BTreeSet<L::Elem>,
    families: Vec<(String, Family<L::Elem>)>,
    budget: Budget,
}

impl<'a, L: EffectiveLattice> LawContext<'a, L> {
    pub fn new(l: &'a L, budget: &Budget) -> Result<Self, LawError> {
        let mut universe = l.elements().ok_or(LawError::NotEnumerable)?;
        universe.sort();
        let index = universe.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let profiles = universe
            .par_iter()
            .map(|&x| compute_profile(l, x, &Family::All).map_err(|e| e.to_string()))
            .collect();
        let t0 = universe
            .iter()
            .copied()
            .filter(|&x| l.maximal_subelements(x).is_empty())
            .collect();
        let coirreducible = universe
            .iter()
            .copied()
            .filter(|&s| residual::is_completely_coirreducible(l, s))
            .collect();
        let mut ctx = LawContext {
            l,
            universe,
            index,
            profiles,
            t0,
            coirreducible,
            families: vec![("all".to_string(), Family::All)],
            budget: budget.clone(),
        };
        if let Some(h) = ctx.sampled_join_closed_family() {
            ctx.families
                .push((format!("join-closed sample {}", budget.seed), h));
        }
        Ok(ctx)
    }

    pub fn lattice(&self) -> &L {
        self.l
    }

    pub fn universe(&self) -> &[L::Elem] {
        &self.universe
    }

    fn sampled_join_closed_family(&self) -> Option<Family<L::Elem>> {
        if self.universe.len() < 3 {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.budget.seed ^ 0x4a0f_5eed);
        let mut set: BTreeSet<L::Elem> = self
            .universe
            .iter()
            .copied()
            .filter(|_| rng.random_ratio(1, 3))
            .collect();
        set.insert(self.l.bottom());
        loop {
            let items: Vec<L::Elem> = set.iter().copied().collect();
            let before = set.len();
            for &a in &items {
                for &b in &items {
                    set.insert(self.l.join(a, b));
                }
            }
            if set.len() == before {
                break;
            }
        }
        Some(Family::Members(set))
    }

    fn label(&self, e: L::Elem) -> String {
        self.l.label(e)
    }

    fn labels(&self, items: &[L::Elem]) -> String {
        let parts: Vec<String> = items.iter().map(|&e| self.label(e)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn profile(&self, x: L::Elem) -> Result<&ResidualProfile<L::Elem>, String> {
        let i = *self
            .index
            .get(&x)
            .ok_or_else(|| format!("{} is not an element of the instance", self.label(x)))?;
        self.profiles[i]
            .as_ref()
            .map_err(|e| format!("profile of {}: {e}", self.label(x)))
    }

    fn mu(&self, x: L::Elem) -> Result<L::Elem, String> {
        Ok(self.profile(x)?.mu)
    }

    fn core(&self, x: L::Elem) -> Result<L::Elem, String> {
        Ok(self.profile(x)?.core)
    }

    fn sub(&self, x: L::Elem, z: L::Elem) -> Result<L::Elem, String> {
        self.l.co_heyting_sub(x, z).map_err(|e| e.to_string())
    }

    fn leq(&self, a: L::Elem, b: L::Elem) -> bool {
        self.l.leq(a, b)
    }

    fn lt(&self, a: L::Elem, b: L::Elem) -> bool {
        self.l.lt(a, b)
    }

    fn join_all(&self, items: &[L::Elem]) -> L::Elem {
        self.l.join_all(items)
    }

    fn down(&self, x: L::Elem) -> Vec<L::Elem> {
        self.universe
            .iter()
            .copied()
            .filter(|&e| self.leq(e, x))
            .collect()
    }

    /// Subsets of `items`: all of them when small, otherwise seeded samples.
    fn subsets(&self, items: &[L::Elem], salt: u64, probe: &mut Probe) -> Vec<Vec<L::Elem>> {
        let n = items.len();
        if n <= self.budget.subset_exhaustive {
            return (0u64..1 << n)
                .map(|mask| {
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| items[i])
                        .collect()
                })
                .collect();
        }
        probe.sampled = true;
        let mut rng =
            ChaCha8Rng::seed_from_u64(self.budget.seed.wrapping_mul(31).wrapping_add(salt));
        (0..self.budget.samples)
            .map(|_| {
                items
                    .iter()
                    .copied()
                    .filter(|_| rng.random_bool(0.5))
                    .collect()
            })
            .collect()
    }

    fn family_violation(&self, h: &Family<L::Elem>) -> Option<String> {
        let Family::Members(set) = h else {
            return None;
        };
        if !set.contains(&self.l.bottom()) {
            return Some("family does not contain ε".to_string());
        }
        for &a in set {
            for &b in set {
                if !set.contains(&self.l.join(a, b)) {
                    return Some(format!(
                        "family is not join-closed at ({}, {})",
                        self.label(a),
                        self.label(b)
                    ));
                }
            }
        }
        None
    }
}

#[derive(Debug, Default)]
struct Probe {
    sampled: bool,
}

fn check_tuple<L: EffectiveLattice>(
    law: LawId,
    ctx: &LawContext<'_, L>,
    h: &Family<L::Elem>,
    t: &[L::Elem],
    probe: &mut Probe,
) -> Check {
    match law {
        LawId::LatticeAxioms => lattice_axioms(ctx, t[0], t[1], t[2]),
        LawId::ProfileInvariants => profile_invariants(ctx, t[0]),
        LawId::MaximalsDuallyCompact => maximals_dually_compact(ctx, t[0]),
        LawId::DownsetUpperComplete => downset_upper_complete(ctx, t[0], probe),
        LawId::MaximalsPairwiseJoin => maximals_pairwise_join(ctx, h, t[0]),
        LawId::KLowerSemilattice => k_lower_semilattice(ctx, t[0], t[1]),
        LawId::MaximalsPairwiseMeet => maximals_pairwise_meet(ctx, t[0]),
        LawId::CoheytingJoin => coheyting_join(ctx, t[0], t[1]),
        LawId::CoheytingMinimal => coheyting_minimal(ctx, t[0], t[1], t[2]),
        LawId::MuResidueDecomp => mu_residue_decomp(ctx, h, t[0]),
        LawId::CoreResidueDecomp => core_residue_decomp(ctx, t[0]),
        LawId::ResidueSingleMaximal => residue_single_maximal(ctx, h, t[0]),
        LawId::ResidueMuBelow => residue_mu_below(ctx, h, t[0]),
        LawId::ResidueNoOutcast => residue_no_outcast(ctx, h, t[0]),
        LawId::MaximalReconstruct => maximal_reconstruct(ctx, t[0]),
        LawId::MuResidueBound => mu_residue_bound(ctx, t[0]),
        LawId::OutcastTrichotomy => outcast_trichotomy(ctx, t[0]),
        LawId::RankedPoset => ranked_poset(ctx, t[0]),
        LawId::StratumAntichain => stratum_antichain(ctx, t[0]),
        LawId::DeltaEqDeltaPlus => delta_eq_delta_plus(ctx, t[0]),
        LawId::S0Characterization => s0_characterization(ctx, t[0]),
        LawId::MJoinSubadditive => m_join_subadditive(ctx, t[0], t[1]),
        LawId::SubelementDecomp => subelement_decomp(ctx, t[0], t[1]),
        LawId::MuMonotone => mu_monotone(ctx, t[0], t[1]),
        LawId::MuJoinHom => mu_join_hom(ctx, t[0], t[1]),
        LawId::MinmaxBound => minmax_bound(ctx, t),
        LawId::FiniteRemovalDescent => finite_removal_descent(ctx, t[0], probe),
        LawId::CoreUnion => core_union(ctx, t[0]),
        LawId::CoreDecomp => core_decomp(ctx, t[0], t[1], t[2]),
        LawId::CoreJoinHom => core_join_hom(ctx, t[0], t[1]),
        LawId::T0UpperSemilattice => t0_upper_semilattice(ctx, t[0], t[1]),
        LawId::XMinusBoundaryT0 => x_minus_boundary_t0(ctx, t[0]),
    }
}

fn lattice_axioms<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    a: L::Elem,
    b: L::Elem,
    c: L::Elem,
) -> Check {
    let l = ctx.l;
    let (m, j) = (l.meet(a, b), l.join(a, b));
    let name = |e| ctx.label(e);
    ensure(l.meet(b, a) == m && l.join(b, a) == j, || {
        format!(
            "meet or join of ({}, {}) is not symmetric",
            name(a),
            name(b)
        )
    })?;
    ensure(ctx.leq(m, a) && ctx.leq(m, b), || {
        format!(
            "{} ∧ {} = {} is not a lower bound",
            name(a),
            name(b),
            name(m)
        )
    })?;
    ensure(ctx.leq(a, j) && ctx.leq(b, j), || {
        format!(
            "{} ∨ {} = {} is not an upper bound",
            name(a),
            name(b),
            name(j)
        )
    })?;
    if ctx.leq(c, a) && ctx.leq(c, b) {
        ensure(ctx.leq(c, m), || {
            format!(
                "{} is a lower bound of ({}, {}) above neither the meet {}",
                name(c),
                name(a),
                name(b),
                name(m)
            )
        })?;
    }
    if ctx.leq(a, c) && ctx.leq(b, c) {
        ensure(ctx.leq(j, c), || {
            format!(
                "{} is an upper bound of ({}, {}) below neither the join {}",
                name(c),
                name(a),
                name(b),
                name(j)
            )
        })?;
    }
    let bottom = l.bottom();
    ensure(
        l.meet(bottom, a) == bottom && l.join(bottom, a) == a,
        || format!("ε is not neutral for {}", name(a)),
    )
}

fn profile_invariants<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    ensure(ctx.leq(p.mu, x), || {
        format!("μ({}) is not below it", ctx.label(x))
    })?;
    let mu_core = residual::residual_derivative(ctx.l, p.core, &Family::All);
    ensure(mu_core == p.core, || {
        format!("core of {} is not a fixpoint", ctx.label(x))
    })?;
    if p.rank != RankValue::Finite(0) {
        ensure(ctx.leq(p.core, p.mu), || {
            format!("core of {} is not below μ", ctx.label(x))
        })?;
    }
    if let RankValue::Finite(k) = p.rank {
        ensure(k < ctx.down(x).len(), || {
            format!("rank {k} of {} exceeds its height", ctx.label(x))
        })?;
    }
    let mut seen = BTreeSet::new();
    for (alpha, stratum) in p.strata.iter().enumerate() {
        for &s in stratum {
            ensure(seen.insert(s), || {
                format!("{} appears in two strata of {}", ctx.label(s), ctx.label(x))
            })?;
            ensure(p.rho.get(&s) == Some(&alpha), || {
                format!("ρ({}) disagrees with its stratum {alpha}", ctx.label(s))
            })?;
        }
    }
    let delta: BTreeSet<L::Elem> = p.boundary_poset.iter().copied().collect();
    ensure(seen == delta, || {
        format!("strata of {} do not cover δ", ctx.label(x))
    })
}

fn maximals_dually_compact<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    if !ctx.l.is_dually_compact(x) {
        return Ok(());
    }
    for &m in &ctx.profile(x)?.maximal {
        ensure(ctx.l.is_dually_compact(m), || {
            format!(
                "{} ∈ M({}) is not dually compact",
                ctx.label(m),
                ctx.label(x)
            )
        })?;
    }
    Ok(())
}

fn downset_upper_complete<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
    probe: &mut Probe,
) -> Check {
    let down = ctx.down(x);
    let salt = ctx.index[&x] as u64;
    for s in ctx.subsets(&down, salt, probe) {
        let j = ctx.join_all(&s);
        ensure(ctx.leq(j, x), || {
            format!("⋁{} leaves ↓{}", ctx.labels(&s), ctx.label(x))
        })?;
        for &u in &down {
            if s.iter().all(|&e| ctx.leq(e, u)) {
                ensure(ctx.leq(j, u), || {
                    format!(
                        "⋁{} = {} is not below the upper bound {}",
                        ctx.labels(&s),
                        ctx.label(j),
                        ctx.label(u)
                    )
                })?;
            }
        }
        for &e in &s {
            ensure(ctx.leq(e, j), || {
                format!("⋁{} is not an upper bound", ctx.labels(&s))
            })?;
        }
    }
    Ok(())
}

fn maximals_pairwise_join<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    h: &Family<L::Elem>,
    x: L::Elem,
) -> Check {
    let m = residual::maximal_subelements(ctx.l, x, h);
    for (i, &y) in m.iter().enumerate() {
        for &z in &m[i + 1..] {
            ensure(ctx.l.join(y, z) == x, || {
                format!("{} ∨ {} ≠ {}", ctx.label(y), ctx.label(z), ctx.label(x))
            })?;
        }
    }
    Ok(())
}

fn k_lower_semilattice<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
    y: L::Elem,
) -> Check {
    if ctx.l.is_dually_compact(x) && ctx.l.is_dually_compact(y) {
        let m = ctx.l.meet(x, y);
        ensure(ctx.l.is_dually_compact(m), || {
            format!("{} ∧ {} is not dually compact", ctx.label(x), ctx.label(y))
        })?;
    }
    Ok(())
}

fn maximals_pairwise_meet<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let m = &ctx.profile(x)?.maximal;
    for (i, &y) in m.iter().enumerate() {
        for &z in &m[i + 1..] {
            let w = ctx.l.meet(y, z);
            let in_both =
                ctx.profile(y)?.maximal.contains(&w) && ctx.profile(z)?.maximal.contains(&w);
            ensure(in_both, || {
                format!(
                    "{} ∧ {} = {} is not in M of both",
                    ctx.label(y),
                    ctx.label(z),
                    ctx.label(w)
                )
            })?;
        }
    }
    Ok(())
}

fn coheyting_join<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem, z: L::Elem) -> Check {
    if !ctx.leq(z, x) {
        return Ok(());
    }
    let r = ctx.sub(x, z)?;
    ensure(ctx.leq(r, x) && ctx.l.join(z, r) == x, || {
        format!(
            "{} ∨ ({} − {}) = {} ≠ {}",
            ctx.label(z),
            ctx.label(x),
            ctx.label(z),
            ctx.label(ctx.l.join(z, r)),
            ctx.label(x)
        )
    })
}

fn coheyting_minimal<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
    z: L::Elem,
    y: L::Elem,
) -> Check {
    if !(ctx.leq(z, x) && ctx.leq(y, x) && ctx.l.join(z, y) == x) {
        return Ok(());
    }
    let r = ctx.sub(x, z)?;
    ensure(ctx.leq(r, y), || {
        format!(
            "{} − {} = {} is not below the solution {}",
            ctx.label(x),
            ctx.label(z),
            ctx.label(r),
            ctx.label(y)
        )
    })
}

fn residues_h<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    h: &Family<L::Elem>,
    x: L::Elem,
) -> Result<Residues<L::Elem>, String> {
    residual::maximal_subelements(ctx.l, x, h)
        .into_iter()
        .map(|m| Ok((m, ctx.sub(x, m)?)))
        .collect()
}

fn mu_residue_decomp<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    h: &Family<L::Elem>,
    x: L::Elem,
) -> Check {
    let mu = residual::residual_derivative(ctx.l, x, h);
    let rs: Vec<L::Elem> = residues_h(ctx, h, x)?.into_iter().map(|r| r.1).collect();
    let rebuilt = ctx.l.join(mu, ctx.join_all(&rs));
    ensure(rebuilt == x, || {
        format!(
            "μ_H({0}) ∨ ⋁ residues = {1} ≠ {0}",
            ctx.label(x),
            ctx.label(rebuilt)
        )
    })
}

fn core_residue_decomp<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    let rs: Vec<L::Elem> = p
        .maximal
        .iter()
        .map(|&m| ctx.sub(x, m))
        .collect::<Result<_, _>>()?;
    let rebuilt = ctx.l.join(p.core, ctx.join_all(&rs));
    ensure(rebuilt == x, || {
        format!(
            "c({0}) ∨ ⋁ residues = {1} ≠ {0}",
            ctx.label(x),
            ctx.label(rebuilt)
        )
    })
}

fn residue_single_maximal<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    h: &Family<L::Elem>,
    x: L::Elem,
) -> Check {
    for (m, r) in residues_h(ctx, h, x)? {
        let mr = residual::maximal_subelements(ctx.l, r, h);
        ensure(mr.len() == 1, || {
            format!(
                "M_H({} − {}) = {}",
                ctx.label(x),
                ctx.label(m),
                ctx.labels(&mr)
            )
        })?;
    }
    Ok(())
}

fn residue_mu_below<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    h: &Family<L::Elem>,
    x: L::Elem,
) -> Check {
    for (m, r) in residues_h(ctx, h, x)? {
        let mu = residual::residual_derivative(ctx.l, r, h);
        ensure(ctx.leq(mu, m), || {
            format!(
                "μ_H({} − {}) = {} is not below {}",
                ctx.label(x),
                ctx.label(m),
                ctx.label(mu),
                ctx.label(m)
            )
        })?;
    }
    Ok(())
}

fn residue_no_outcast<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    h: &Family<L::Elem>,
    x: L::Elem,
) -> Check {
    for (m, r) in residues_h(ctx, h, x)? {
        let o = residual::outcasts(ctx.l, r, h);
        ensure(o.is_empty(), || {
            format!(
                "{} − {} has outcasts {}",
                ctx.label(x),
                ctx.label(m),
                ctx.labels(&o)
            )
        })?;
    }
    Ok(())
}

fn maximal_reconstruct<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    for &m in &p.maximal {
        let others: Vec<L::Elem> = p
            .residues
            .iter()
            .filter(|(n, _)| *n != m)
            .map(|r| r.1)
            .collect();
        let rebuilt = ctx.l.join(p.mu, ctx.join_all(&others));
        ensure(rebuilt == m, || {
            format!(
                "μ({}) ∨ other residues = {} ≠ {}",
                ctx.label(x),
                ctx.label(rebuilt),
                ctx.label(m)
            )
        })?;
    }
    Ok(())
}

fn mu_residue_bound<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    let boundary = p.boundary;
    for &m in &ctx.profile(p.mu)?.maximal {
        let r = ctx.sub(p.mu, m)?;
        ensure(ctx.leq(r, boundary), || {
            format!(
                "μ({}) − {} = {} is not below ∂{}",
                ctx.label(x),
                ctx.label(m),
                ctx.label(r),
                ctx.label(x)
            )
        })?;
    }
    Ok(())
}

fn outcast_trichotomy<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    let o = residual::outcasts(ctx.l, x, &Family::All);
    let a = !o.is_empty();
    let b = !ctx.leq(p.core, p.boundary);
    let c = ctx.lt(p.boundary, x);
    ensure(a == b && b == c, || {
        format!("for {}: outcast {a}, c ≰ ∂ {b}, ∂ < x {c}", ctx.label(x))
    })?;
    if a {
        let expected: Vec<L::Elem> = ctx
            .universe
            .iter()
            .copied()
            .filter(|&z| ctx.leq(p.boundary, z) && ctx.lt(z, x))
            .collect();
        ensure(o == expected, || {
            format!(
                "outcasts of {} are {}, expected {}",
                ctx.label(x),
                ctx.labels(&o),
                ctx.labels(&expected)
            )
        })?;
    }
    Ok(())
}

fn ranked_poset<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    for (&s, &rs) in &p.rho {
        for (&t, &rt) in &p.rho {
            if ctx.lt(s, t) {
                ensure(rs > rt, || {
                    format!(
                        "{} < {} in δ({}) but ρ = {rs}, {rt}",
                        ctx.label(s),
                        ctx.label(t),
                        ctx.label(x)
                    )
                })?;
            }
        }
    }
    Ok(())
}

fn stratum_antichain<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    for stratum in &ctx.profile(x)?.strata {
        for &s in stratum {
            for &t in stratum {
                ensure(s == t || !ctx.leq(s, t), || {
                    format!(
                        "{} ≤ {} inside one stratum of {}",
                        ctx.label(s),
                        ctx.label(t),
                        ctx.label(x)
                    )
                })?;
            }
        }
    }
    Ok(())
}

fn delta_plus_of<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
) -> Result<Vec<L::Elem>, String> {
    let core = ctx.core(x)?;
    Ok(ctx
        .universe
        .iter()
        .copied()
        .filter(|&s| ctx.leq(s, x) && !ctx.leq(s, core) && ctx.coirreducible.contains(&s))
        .collect())
}

fn delta_eq_delta_plus<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    let dp = delta_plus_of(ctx, x)?;
    debug_assert_eq!(dp, delta_plus(ctx.l, x, p.core));
    let mut delta = p.boundary_poset.clone();
    delta.sort();
    ensure(delta == dp, || {
        format!(
            "δ({}) = {} but δ⁺ = {}",
            ctx.label(x),
            ctx.labels(&delta),
            ctx.labels(&dp)
        )
    })
}

fn s0_characterization<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    let dp = delta_plus_of(ctx, x)?;
    let rest = |s: L::Elem| -> Vec<L::Elem> { dp.iter().copied().filter(|&t| t != s).collect() };
    let expected: Vec<L::Elem> = dp
        .iter()
        .copied()
        .filter(|&s| !ctx.leq(s, ctx.join_all(&rest(s))))
        .collect();
    let mut s0 = p.strata.first().cloned().unwrap_or_default();
    s0.sort();
    s0.dedup();
    ensure(s0 == expected, || {
        format!(
            "s_0({}) = {} but the criterion gives {}",
            ctx.label(x),
            ctx.labels(&s0),
            ctx.labels(&expected)
        )
    })?;
    for &s in &s0 {
        let candidate = ctx.l.join(p.core, ctx.join_all(&rest(s)));
        let matching: Vec<L::Elem> = p
            .maximal
            .iter()
            .copied()
            .filter(|&m| ctx.l.join(s, m) == x)
            .collect();
        ensure(matching == [candidate], || {
            format!(
                "for s = {}: maximals completing x are {}, formula gives {}",
                ctx.label(s),
                ctx.labels(&matching),
                ctx.label(candidate)
            )
        })?;
    }
    Ok(())
}

fn m_join_subadditive<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
    z: L::Elem,
) -> Check {
    let j = ctx.l.join(x, z);
    let (a, b, c) = (
        ctx.profile(x)?.maximal.len(),
        ctx.profile(z)?.maximal.len(),
        ctx.profile(j)?.maximal.len(),
    );
    ensure(c <= a + b, || {
        format!("|M({} ∨ {})| = {c} > {a} + {b}", ctx.label(x), ctx.label(z))
    })
}

fn subelement_decomp<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
    z: L::Elem,
) -> Check {
    if !ctx.leq(z, x) {
        return Ok(());
    }
    let p = ctx.profile(x)?;
    let below: Vec<L::Elem> = p
        .boundary_poset
        .iter()
        .copied()
        .filter(|&s| ctx.leq(s, z))
        .collect();
    let rebuilt = ctx.l.join(ctx.l.meet(z, p.core), ctx.join_all(&below));
    ensure(rebuilt == z, || {
        format!(
            "decomposition of {} under {} gives {}",
            ctx.label(z),
            ctx.label(x),
            ctx.label(rebuilt)
        )
    })
}

fn mu_monotone<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem, z: L::Elem) -> Check {
    if !ctx.leq(z, x) {
        return Ok(());
    }
    let (mz, mx) = (ctx.mu(z)?, ctx.mu(x)?);
    ensure(ctx.leq(mz, mx), || {
        format!(
            "{} ≤ {} but μ = {}, {}",
            ctx.label(z),
            ctx.label(x),
            ctx.label(mz),
            ctx.label(mx)
        )
    })
}

fn mu_join_hom<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem, z: L::Elem) -> Check {
    let lhs = ctx.mu(ctx.l.join(x, z))?;
    let rhs = ctx.l.join(ctx.mu(x)?, ctx.mu(z)?);
    ensure(lhs == rhs, || {
        format!(
            "μ({0} ∨ {1}) = {2} but μ({0}) ∨ μ({1}) = {3}",
            ctx.label(x),
            ctx.label(z),
            ctx.label(lhs),
            ctx.label(rhs)
        )
    })
}

/// Tuple layout: `x_0, …, x_{k−1}, x'_0, …, x'_{k−1}`.
fn minmax_bound<L: EffectiveLattice>(ctx: &LawContext<'_, L>, t: &[L::Elem]) -> Check {
    let k = t.len() / 2;
    let (xs, xps) = t.split_at(k);
    let monotone =
        xs.windows(2).all(|w| ctx.leq(w[0], w[1])) && xps.windows(2).all(|w| ctx.leq(w[1], w[0]));
    if k == 0 || !monotone {
        return Ok(());
    }
    let z = xs
        .iter()
        .zip(xps)
        .map(|(&a, &b)| ctx.l.join(a, b))
        .reduce(|acc, e| ctx.l.meet(acc, e))
        .expect("nonempty");
    let meet_xp = xps
        .iter()
        .copied()
        .reduce(|acc, e| ctx.l.meet(acc, e))
        .expect("nonempty");
    let bound = ctx.l.join(ctx.join_all(xs), meet_xp);
    ensure(ctx.leq(z, bound), || {
        format!(
            "{} is not below (⋁x) ∨ (⋀x') = {}",
            ctx.label(z),
            ctx.label(bound)
        )
    })
}

fn sample_minmax<L: EffectiveLattice>(ctx: &LawContext<'_, L>) -> Vec<Vec<L::Elem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.budget.seed ^ 0x6d1d_3a7c);
    let n = ctx.universe.len();
    (0..ctx.budget.samples)
        .map(|_| {
            let k = rng.random_range(1..=4usize);
            let mut xs: Vec<L::Elem> = (0..k)
                .map(|_| ctx.universe[rng.random_range(0..n)])
                .collect();
            let mut xps: Vec<L::Elem> = (0..k)
                .map(|_| ctx.universe[rng.random_range(0..n)])
                .collect();
            for i in 1..k {
                xs[i] = ctx.l.join(xs[i - 1], xs[i]);
                xps[i] = ctx.l.meet(xps[i - 1], xps[i]);
            }
            xs.extend(xps);
            xs
        })
        .collect()
}

fn finite_removal_descent<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
    probe: &mut Probe,
) -> Check {
    let p = ctx.profile(x)?;
    let salt = ctx.index[&x] as u64;
    for removed in ctx.subsets(&p.boundary_poset, salt, probe) {
        let kept: Vec<L::Elem> = p
            .boundary_poset
            .iter()
            .copied()
            .filter(|s| !removed.contains(s))
            .collect();
        let kept_join = ctx.join_all(&kept);
        let target = ctx.l.join(p.core, kept_join);
        ensure(descends_to(ctx, x, target), || {
            format!(
                "no maximal-subelement descent from {} to {} (removing {})",
                ctx.label(x),
                ctx.label(target),
                ctx.labels(&removed)
            )
        })?;
        if ctx.l.is_dually_compact(x) {
            ensure(ctx.l.is_dually_compact(kept_join), || {
                format!(
                    "⋁(δ({}) ∖ {}) is not dually compact",
                    ctx.label(x),
                    ctx.labels(&removed)
                )
            })?;
        }
    }
    Ok(())
}

fn descends_to<L: EffectiveLattice>(ctx: &LawContext<'_, L>, from: L::Elem, to: L::Elem) -> bool {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(y) = queue.pop_front() {
        if y == to {
            return true;
        }
        let Ok(p) = ctx.profile(y) else {
            continue;
        };
        for &m in &p.maximal {
            if ctx.leq(to, m) && seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    false
}

fn core_union<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let members: Vec<L::Elem> = ctx.t0.iter().copied().filter(|&z| ctx.leq(z, x)).collect();
    let j = ctx.join_all(&members);
    let core = ctx.core(x)?;
    ensure(j == core, || {
        format!(
            "c({}) = {} but ⋁(T_0 ∩ ↓x) = {}",
            ctx.label(x),
            ctx.label(core),
            ctx.label(j)
        )
    })
}

fn core_decomp<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    x: L::Elem,
    y: L::Elem,
    z: L::Elem,
) -> Check {
    if !(ctx.t0.contains(&y) && ctx.leq(y, ctx.l.join(x, z))) {
        return Ok(());
    }
    let rebuilt = ctx
        .l
        .join(ctx.core(ctx.l.meet(x, y))?, ctx.core(ctx.l.meet(z, y))?);
    ensure(rebuilt == y, || {
        format!(
            "c({0} ∧ {1}) ∨ c({2} ∧ {1}) = {3}",
            ctx.label(x),
            ctx.label(y),
            ctx.label(z),
            ctx.label(rebuilt)
        )
    })
}

fn core_join_hom<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem, z: L::Elem) -> Check {
    let lhs = ctx.core(ctx.l.join(x, z))?;
    let rhs = ctx.l.join(ctx.core(x)?, ctx.core(z)?);
    ensure(lhs == rhs, || {
        format!(
            "c({0} ∨ {1}) = {2} but c({0}) ∨ c({1}) = {3}",
            ctx.label(x),
            ctx.label(z),
            ctx.label(lhs),
            ctx.label(rhs)
        )
    })
}

fn t0_upper_semilattice<L: EffectiveLattice>(
    ctx: &LawContext<'_, L>,
    a: L::Elem,
    b: L::Elem,
) -> Check {
    ensure(ctx.t0.contains(&ctx.l.bottom()), || {
        "ε is not in T_0".to_string()
    })?;
    if ctx.t0.contains(&a) && ctx.t0.contains(&b) {
        let j = ctx.l.join(a, b);
        ensure(ctx.t0.contains(&j), || {
            format!(
                "{} ∨ {} = {} is not in T_0",
                ctx.label(a),
                ctx.label(b),
                ctx.label(j)
            )
        })?;
    }
    Ok(())
}

fn x_minus_boundary_t0<L: EffectiveLattice>(ctx: &LawContext<'_, L>, x: L::Elem) -> Check {
    let p = ctx.profile(x)?;
    let r = ctx.sub(x, p.boundary)?;
    ensure(ctx.t0.contains(&r), || {
        format!(
            "{} − ∂{} = {} is not in T_0",
            ctx.label(x),
            ctx.label(x),
            ctx.label(r)
        )
    })?;
    ensure(ctx.leq(r, p.core), || {
        format!("{} − ∂{} is not below the core", ctx.label(x), ctx.label(x))
    })
}

fn odometer(n: usize, arity: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; arity];
    loop {
        if !f(&idx) {
            return;
        }
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn gate_reason<L: EffectiveLattice>(law: LawId, l: &L) -> Option<String> {
    match law.gate() {
        Gate::Always => None,
        Gate::Coframe if l.is_coframe() => None,
        Gate::Coframe => Some("instance is not a coframe".to_string()),
    }
}

/// Runs one law against a prepared context.
pub fn run_in_context<L: EffectiveLattice>(ctx: &LawContext<'_, L>, law: LawId) -> LawReport {
    let start = Instant::now();
    let mut report = LawReport {
        law,
        instance: format!("lattice with {} elements", ctx.universe.len()),
        verdict: Verdict::Pass,
        checked: 0,
        coverage: Coverage::Exhaustive,
        elapsed_us: 0,
    };
    if let Some(reason) = gate_reason(law, ctx.l) {
        report.verdict = Verdict::Skipped { reason };
        return report;
    }
    let mut probe = Probe::default();
    let mut failure: Option<Witness> = None;
    let n = ctx.universe.len();
    match law.domain() {
        Domain::Tuples(arity) | Domain::FamilyTuples(arity) => {
            let families: Vec<&(String, Family<L::Elem>)> = match law.domain() {
                Domain::FamilyTuples(_) => ctx
                    .families
                    .iter()
                    .filter(|(_, h)| ctx.family_violation(h).is_none())
                    .collect(),
                _ => ctx.families.iter().take(1).collect(),
            };
            let per_family = (n as u64).saturating_pow(arity as u32);
            let total = per_family.saturating_mul(families.len() as u64);
            'families: for (name, h) in families {
                let mut tuple = vec![ctx.l.bottom(); arity];
                let mut stop = false;
                odometer(n, arity, |idx| {
                    if report.checked >= ctx.budget.max_checks {
                        stop = true;
                        return false;
                    }
                    for (slot, &i) in tuple.iter_mut().zip(idx) {
                        *slot = ctx.universe[i];
                    }
                    report.checked += 1;
                    match check_tuple(law, ctx, h, &tuple, &mut probe) {
                        Ok(()) => true,
                        Err(detail) => {
                            failure = Some(Witness {
                                family: name.clone(),
                                elements: tuple.iter().map(|&e| ctx.label(e)).collect(),
                                detail,
                            });
                            false
                        }
                    }
                });
                if failure.is_some() {
                    break 'families;
                }
                if stop {
                    report.coverage = Coverage::Partial { total };
                    break 'families;
                }
            }
        }
        Domain::Sampled => {
            probe.sampled = true;
            for tuple in sample_minmax(ctx) {
                report.checked += 1;
                if let Err(detail) = check_tuple(law, ctx, &Family::All, &tuple, &mut probe) {
                    failure = Some(Witness {
                        family: "all".to_string(),
                        elements: tuple.iter().map(|&e| ctx.label(e)).collect(),
                        detail,
                    });
                    break;
                }
            }
        }
    }
    if probe.sampled && report.coverage == Coverage::Exhaustive {
        report.coverage = Coverage::Sampled;
    }
    if let Some(witness) = failure {
        report.verdict = Verdict::Fail { witness };
    }
    report.elapsed_us = start.elapsed().as_micros() as u64;
    report
}

/// Runs one law. Exceeding the budget is an error carrying the partial report.
pub fn run_law<L: EffectiveLattice>(
    l: &L,
    law: LawId,
    budget: &Budget,
) -> Result<LawReport, LawError> {
    let ctx = LawContext::new(l, budget)?;
    let report = run_in_context(&ctx, law);
    if matches!(report.coverage, Coverage::Partial { .. }) && !report.is_fail() {
        return Err(LawError::BudgetExceeded(Box::new(report)));
    }
    Ok(report)
}

/// Runs the given laws in parallel; reports come back in the order given.
/// Partial coverage is visible in each report's `coverage` field.
pub fn run_selected<L: EffectiveLattice>(
    l: &L,
    laws: &[LawId],
    budget: &Budget,
) -> Result<Vec<LawReport>, LawError> {
    let ctx = LawContext::new(l, budget)?;
    Ok(laws
        .par_iter()
        .map(|&law| run_in_context(&ctx, law))
        .collect())
}

pub fn run_all<L: EffectiveLattice>(l: &L, budget: &Budget) -> Result<Vec<LawReport>, LawError> {
    run_selected(l, LawId::ALL, budget)
}

/// Re-evaluates a law on one tuple, with `family` as reported in a witness.
pub fn replay<L: EffectiveLattice>(
    l: &L,
    law: LawId,
    family: &str,
    tuple: &[L::Elem],
    budget: &Budget,
) -> Result<Result<(), String>, LawError> {
    let ctx = LawContext::new(l, budget)?;
    let h = ctx
        .families
        .iter()
        .find(|(name, _)| name == family)
        .map(|(_, h)| h.clone())
        .unwrap_or(Family::All);
    let mut probe = Probe::default();
    Ok(check_tuple(law, &ctx, &h, tuple, &mut probe))
}

/// Outcome of [`shrink`]: the smallest failing sublattice found and its report.
#[derive(Debug, Clone)]
pub struct Shrunk {
    pub lattice: FiniteLattice,
    pub report: LawReport,
    pub steps: usize,
}

/// Greedy shrinking of a failing instance through sublattices `↓e`, `↑e` and
/// `L ∖ {e}`. A passing law returns the instance unchanged.
pub fn shrink(l: &FiniteLattice, law: LawId, budget: &Budget) -> Shrunk {
    shrink_with(l, law, budget, |sub| sub.clone())
}

/// As [`shrink`], evaluating each candidate through `view` (for example a
/// wrapper that injects a fault into one operation).
pub fn shrink_with<V, F>(l: &FiniteLattice, law: LawId, budget: &Budget, view: F) -> Shrunk
where
    V: EffectiveLattice<Elem = usize>,
    F: Fn(&FiniteLattice) -> V,
{
    let evaluate = |lat: &FiniteLattice| -> Option<LawReport> {
        let v = view(lat);
        let ctx = LawContext::new(&v, budget).ok()?;
        let report = run_in_context(&ctx, law);
        report.is_fail().then_some(report)
    };
    let Some(mut report) = evaluate(l) else {
        let v = view(l);
        let report = LawContext::new(&v, budget)
            .map(|ctx| run_in_context(&ctx, law))
            .unwrap_or_else(|_| LawReport {
                law,
                instance: String::new(),
                verdict: Verdict::Pass,
                checked: 0,
                coverage: Coverage::Exhaustive,
                elapsed_us: 0,
            });
        return Shrunk {
            lattice: l.clone(),
            report,
            steps: 0,
        };
    };
    let mut current = l.clone();
    let mut steps = 0;
    loop {
        let mut candidates: Vec<FiniteLattice> = shrink_candidates(&current);
        candidates.sort_by_key(FiniteLattice::len);
        let next = candidates
            .into_iter()
            .find_map(|cand| evaluate(&cand).map(|r| (cand, r)));
        match next {
            Some((cand, r)) => {
                current = cand;
                report = r;
                steps += 1;
            }
            None => break,
        }
    }
    Shrunk {
        lattice: current,
        report,
        steps,
    }
}

fn shrink_candidates(l: &FiniteLattice) -> Vec<FiniteLattice> {
    let n = l.len();
    let mut out = Vec::new();
    for e in 0..n {
        if e != l.top() {
            out.extend(l.sublattice(&l.down_set(e)));
        }
        if e != l.bottom() {
            out.extend(l.sublattice(&l.up_set(e)));
        }
        let mut rest = ElementSet::full(n);
        rest.remove(e);
        out.extend(l.sublattice(&rest));
    }
    out.retain(|c| c.len() < n && c.len() > 1);
    out
}

/// Which table a fault is injected into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableOp {
    Meet,
    Join,
}

/// A copy of `l` whose `op` table entry at `(a, b)` is replaced by `value`.
/// Only that single cell changes; the symmetric cell keeps its value.
pub fn inject_table_fault(
    l: &FiniteLattice,
    op: TableOp,
    a: usize,
    b: usize,
    value: usize,
) -> FiniteLattice {
    let n = l.len();
    let mut parts = l.clone().into_parts();
    let table = match op {
        TableOp::Meet => &mut parts.meet,
        TableOp::Join => &mut parts.join,
    };
    table[a * n + b] = value as u32;
    FiniteLattice::from_parts_unchecked(parts)
}
