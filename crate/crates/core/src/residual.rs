//! Residual calculus over any lattice that can answer a handful of effective
//! queries: maximal subelements, residual derivatives and ranks, residues,
//! boundaries, strata and boundary posets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::order::FiniteLattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidualError {
    #[error("`{subtrahend}` is not below `{minuend}`")]
    NotBelow { minuend: String, subtrahend: String },
    #[error("empty meet requested in a lattice without top")]
    NoTop,
    #[error("derivative did not stabilize within {0} iterations")]
    IterationBound(usize),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

/// Ordinal-valued residual rank, capped at ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankValue {
    Finite(usize),
    Omega,
}

impl RankValue {
    pub fn to_json(self) -> Value {
        serde_json::to_value(self).expect("rank values always serialize")
    }
}

impl std::fmt::Display for RankValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RankValue::Finite(k) => write!(f, "{k}"),
            RankValue::Omega => write!(f, "omega"),
        }
    }
}

/// Cardinality of `M(x)`: the `n` such that `x ∈ T_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TClass {
    Finite(usize),
    Infinite,
}

/// The family `H` of admissible subelements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family<E> {
    All,
    Members(BTreeSet<E>),
}

impl<E: Ord> Family<E> {
    pub fn contains(&self, e: &E) -> bool {
        match self {
            Family::All => true,
            Family::Members(s) => s.contains(e),
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, Family::All)
    }
}

/// The queries the residual calculus needs from a lattice.
///
/// `strictly_below` must be exact for instances that report
/// [`elements`](EffectiveLattice::elements); infinite instances may return a
/// bounded fragment and must then override the symbolic operations.
pub trait EffectiveLattice: Sync {
    type Elem: Copy + Ord + Hash + Debug + Send + Sync;

    fn leq(&self, a: Self::Elem, b: Self::Elem) -> bool;
    fn meet(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn join(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn bottom(&self) -> Self::Elem;
    fn top(&self) -> Option<Self::Elem>;
    fn strictly_below(&self, x: Self::Elem) -> Vec<Self::Elem>;
    fn is_coframe(&self) -> bool;
    fn is_dually_compact(&self, x: Self::Elem) -> bool;
    fn label(&self, x: Self::Elem) -> String;

    /// Every element, when the instance is finite.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// Upper bound on the number of strict derivative steps from any element.
    fn iteration_limit(&self) -> usize {
        4096
    }

    fn lt(&self, a: Self::Elem, b: Self::Elem) -> bool {
        a != b && self.leq(a, b)
    }

    fn meet_all(&self, items: &[Self::Elem]) -> Result<Self::Elem, ResidualError> {
        match items.split_first() {
            None => self.top().ok_or(ResidualError::NoTop),
            Some((&first, rest)) => Ok(rest.iter().fold(first, |acc, &e| self.meet(acc, e))),
        }
    }

    fn join_all(&self, items: &[Self::Elem]) -> Self::Elem {
        items
            .iter()
            .fold(self.bottom(), |acc, &e| self.join(acc, e))
    }

    /// `M(x)`: the maximal elements strictly below `x`, in ascending order.
    fn maximal_subelements(&self, x: Self::Elem) -> Vec<Self::Elem> {
        maximal_among(self, &self.strictly_below(x))
    }

    /// `x − z = ⋀{y ≤ x : z ∨ y = x}` for `z ≤ x`.
    fn co_heyting_sub(&self, x: Self::Elem, z: Self::Elem) -> Result<Self::Elem, ResidualError> {
        if !self.leq(z, x) {
            return Err(not_below(self, x, z));
        }
        let mut solutions: Vec<Self::Elem> = self
            .strictly_below(x)
            .into_iter()
            .filter(|&y| self.join(z, y) == x)
            .collect();
        solutions.push(x);
        self.meet_all(&solutions)
    }
}

fn not_below<L: EffectiveLattice + ?Sized>(l: &L, x: L::Elem, z: L::Elem) -> ResidualError {
    ResidualError::NotBelow {
        minuend: l.label(x),
        subtrahend: l.label(z),
    }
}

/// Maximal members of `items` under the lattice order, ascending.
pub fn maximal_among<L: EffectiveLattice + ?Sized>(l: &L, items: &[L::Elem]) -> Vec<L::Elem> {
    let mut out: Vec<L::Elem> = items
        .iter()
        .copied()
        .filter(|&z| !items.iter().any(|&w| l.lt(z, w)))
        .collect();
    out.sort();
    out.dedup();
    out
}

impl EffectiveLattice for FiniteLattice {
    type Elem = usize;

    fn leq(&self, a: usize, b: usize) -> bool {
        FiniteLattice::leq(self, a, b)
    }

    fn meet(&self, a: usize, b: usize) -> usize {
        FiniteLattice::meet(self, a, b)
    }

    fn join(&self, a: usize, b: usize) -> usize {
        FiniteLattice::join(self, a, b)
    }

    fn bottom(&self) -> usize {
        FiniteLattice::bottom(self)
    }

    fn top(&self) -> Option<usize> {
        Some(FiniteLattice::top(self))
    }

    fn strictly_below(&self, x: usize) -> Vec<usize> {
        self.poset()
            .down_bits(x)
            .ones()
            .filter(|&z| z != x)
            .collect()
    }

    fn is_coframe(&self) -> bool {
        FiniteLattice::is_coframe(self)
    }

    fn is_dually_compact(&self, x: usize) -> bool {
        self.dually_compact_finite(x)
    }

    fn label(&self, x: usize) -> String {
        self.name(x).to_string()
    }

    fn elements(&self) -> Option<Vec<usize>> {
        Some((0..self.len()).collect())
    }

    fn iteration_limit(&self) -> usize {
        self.len() + 1
    }

    fn maximal_subelements(&self, x: usize) -> Vec<usize> {
        let down = self.poset().down_bits(x);
        down.ones()
            .filter(|&z| z != x)
            .filter(|&z| {
                // z is a lower cover of x iff [z, x] has exactly two elements.
                let up = self.poset().up_bits(z);
                up.intersection(down).count() == 2
            })
            .collect()
    }

    fn co_heyting_sub(&self, x: usize, z: usize) -> Result<usize, ResidualError> {
        if !FiniteLattice::leq(self, z, x) {
            return Err(not_below(self, x, z));
        }
        Ok(self
            .poset()
            .down_bits(x)
            .ones()
            .filter(|&y| FiniteLattice::join(self, z, y) == x)
            .fold(FiniteLattice::top(self), |acc, y| {
                FiniteLattice::meet(self, acc, y)
            }))
    }
}

/// `M_H(x)`: maximal elements of `H ∩ (↓x ∖ {x})`, ascending.
pub fn maximal_subelements<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
) -> Vec<L::Elem> {
    match h {
        Family::All => {
            let mut m = l.maximal_subelements(x);
            m.sort();
            m
        }
        Family::Members(set) => {
            let candidates: Vec<L::Elem> = l
                .strictly_below(x)
                .into_iter()
                .filter(|z| set.contains(z))
                .collect();
            maximal_among(l, &candidates)
        }
    }
}

/// `x − z`, the co-Heyting subtraction.
pub fn co_heyting_sub<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    z: L::Elem,
) -> Result<L::Elem, ResidualError> {
    l.co_heyting_sub(x, z)
}

/// `μ_H(x)`: `⋀M_H(x)`, or `x` when `M_H(x)` is empty.
pub fn residual_derivative<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
) -> L::Elem {
    let m = maximal_subelements(l, x, h);
    if m.is_empty() {
        x
    } else {
        l.meet_all(&m).expect("nonempty meet")
    }
}

/// The iterates `x, μ(x), μ²(x), …` up to and including the first fixpoint,
/// or the first `max_steps + 1` iterates if no fixpoint is reached. The flag
/// reports whether a fixpoint was reached.
pub fn iterate_derivative<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
    max_steps: usize,
) -> (Vec<L::Elem>, bool) {
    let mut iterates = vec![x];
    let mut current = x;
    for _ in 0..max_steps {
        let next = residual_derivative(l, current, h);
        if next == current {
            return (iterates, true);
        }
        iterates.push(next);
        current = next;
    }
    let stable = residual_derivative(l, current, h) == current;
    (iterates, stable)
}

/// Per-element record of the residual calculus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualProfile<E> {
    pub element: E,
    pub maximal: Vec<E>,
    pub mu: E,
    pub rank: RankValue,
    pub core: E,
    /// `x^(α)` for `α = 0..=rank` when the rank is finite.
    pub iterates: Vec<E>,
    /// `(m, x − m)` for `m ∈ M_H(x)`, ascending in `m`.
    pub residues: Vec<(E, E)>,
    pub boundary: E,
    pub strata: Vec<Vec<E>>,
    pub boundary_poset: Vec<E>,
    pub rho: BTreeMap<E, usize>,
    pub t_class: TClass,
}

impl<E: Copy + Ord> ResidualProfile<E> {
    pub fn rank_finite(&self) -> Option<usize> {
        match self.rank {
            RankValue::Finite(k) => Some(k),
            RankValue::Omega => None,
        }
    }

    pub fn in_boundary_poset(&self, s: E) -> bool {
        self.rho.contains_key(&s)
    }

    /// JSON document with labels in place of element handles.
    pub fn to_json(&self, label: impl Fn(E) -> String) -> Value {
        let residues: BTreeMap<String, String> = self
            .residues
            .iter()
            .map(|&(m, r)| (label(m), label(r)))
            .collect();
        let rho: BTreeMap<String, usize> = self.rho.iter().map(|(&s, &k)| (label(s), k)).collect();
        let strata: Vec<Vec<String>> = self
            .strata
            .iter()
            .map(|s| s.iter().map(|&e| label(e)).collect())
            .collect();
        json!({
            "element": label(self.element),
            "mu": label(self.mu),
            "rank": self.rank.to_json(),
            "core": label(self.core),
            "residues": residues,
            "boundary": label(self.boundary),
            "strata": strata,
            "rho": rho,
        })
    }
}

/// Pairs `(m, x − m)`.
pub type Residues<E> = Vec<(E, E)>;

/// Residues `{(m, x − m) : m ∈ M_H(x)}` of `x`.
pub fn residues<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
) -> Result<Residues<L::Elem>, ResidualError> {
    maximal_subelements(l, x, h)
        .into_iter()
        .map(|m| Ok((m, l.co_heyting_sub(x, m)?)))
        .collect()
}

/// `∂x = ⋁_{m ∈ M(x)} (x − m)`.
pub fn boundary<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
) -> Result<L::Elem, ResidualError> {
    let res: Vec<L::Elem> = residues(l, x, h)?.into_iter().map(|(_, r)| r).collect();
    Ok(l.join_all(&res))
}

/// Computes a profile without checking any of the structural identities.
pub fn compute_profile<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
) -> Result<ResidualProfile<L::Elem>, ResidualError> {
    let limit = l.iteration_limit();
    let (iterates, stable) = iterate_derivative(l, x, h, limit);
    if !stable {
        return Err(ResidualError::IterationBound(limit));
    }
    let rank = iterates.len() - 1;
    let core = *iterates.last().expect("at least x itself");
    let maximal = maximal_subelements(l, x, h);
    let mu = if maximal.is_empty() {
        x
    } else {
        l.meet_all(&maximal)?
    };
    let own_residues = residues(l, x, h)?;
    let boundary = l.join_all(&own_residues.iter().map(|&(_, r)| r).collect::<Vec<_>>());
    let mut strata = Vec::with_capacity(rank);
    let mut rho = BTreeMap::new();
    for (alpha, &y) in iterates[..rank].iter().enumerate() {
        let mut stratum: Vec<L::Elem> = if alpha == 0 {
            own_residues.iter().map(|&(_, r)| r).collect()
        } else {
            residues(l, y, h)?.into_iter().map(|(_, r)| r).collect()
        };
        stratum.sort();
        stratum.dedup();
        for &s in &stratum {
            rho.entry(s).or_insert(alpha);
        }
        strata.push(stratum);
    }
    let boundary_poset: Vec<L::Elem> = rho.keys().copied().collect();
    Ok(ResidualProfile {
        element: x,
        t_class: TClass::Finite(maximal.len()),
        maximal,
        mu,
        rank: RankValue::Finite(rank),
        core,
        iterates,
        residues: own_residues,
        boundary,
        strata,
        boundary_poset,
        rho,
    })
}

/// Computes the profile of `x` and checks, on coframes with `H` = all, the
/// core-residue identity `x = c(x) ∨ ∂x`, `z ∨ (x − z) = x` for each residue,
/// and that the strata partition the boundary poset.
pub fn residual_profile<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
) -> Result<ResidualProfile<L::Elem>, ResidualError> {
    let p = compute_profile(l, x, h)?;
    if residual_derivative(l, p.core, h) != p.core {
        return Err(ResidualError::InvariantViolated(format!(
            "core {} of {} is not a fixpoint",
            l.label(p.core),
            l.label(x)
        )));
    }
    if l.is_coframe() && h.is_all() {
        if l.join(p.core, p.boundary) != x {
            return Err(ResidualError::InvariantViolated(format!(
                "{} differs from core ∨ boundary",
                l.label(x)
            )));
        }
        for &(m, r) in &p.residues {
            if l.join(m, r) != x {
                return Err(ResidualError::InvariantViolated(format!(
                    "{} ∨ ({} − {}) differs from {}",
                    l.label(m),
                    l.label(x),
                    l.label(m),
                    l.label(x)
                )));
            }
        }
        let total: usize = p.strata.iter().map(Vec::len).sum();
        if total != p.boundary_poset.len() {
            return Err(ResidualError::InvariantViolated(format!(
                "strata of {} overlap",
                l.label(x)
            )));
        }
    }
    Ok(p)
}

/// `H`-outcasts of `x`: members `z ∈ H` with `z < x` lying below no `m ∈ M_H(x)`.
pub fn outcasts<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    h: &Family<L::Elem>,
) -> Vec<L::Elem> {
    let maximal = maximal_subelements(l, x, h);
    let mut out: Vec<L::Elem> = l
        .strictly_below(x)
        .into_iter()
        .filter(|z| h.contains(z))
        .filter(|&z| !maximal.iter().any(|&m| l.leq(z, m)))
        .collect();
    out.sort();
    out
}

/// `|M(x)|`.
pub fn classify_t<L: EffectiveLattice + ?Sized>(l: &L, x: L::Elem) -> TClass {
    TClass::Finite(l.maximal_subelements(x).len())
}

/// `s ∈ I(L)`: `M(s)` is a singleton `{m}` and every `z < s` lies below `m`.
pub fn is_completely_coirreducible<L: EffectiveLattice + ?Sized>(l: &L, s: L::Elem) -> bool {
    let m = l.maximal_subelements(s);
    if m.len() != 1 {
        return false;
    }
    l.strictly_below(s).into_iter().all(|z| l.leq(z, m[0]))
}

/// `I(L)` for a finite instance.
pub fn completely_coirreducibles<L: EffectiveLattice + ?Sized>(l: &L) -> Option<Vec<L::Elem>> {
    let mut out: Vec<L::Elem> = l
        .elements()?
        .into_iter()
        .filter(|&s| is_completely_coirreducible(l, s))
        .collect();
    out.sort();
    Some(out)
}

/// `δ⁺(x) = {s ∈ I(L) : s ≤ x, s ≰ c(x)}`.
pub fn delta_plus<L: EffectiveLattice + ?Sized>(l: &L, x: L::Elem, core: L::Elem) -> Vec<L::Elem> {
    let mut below = l.strictly_below(x);
    below.push(x);
    let mut out: Vec<L::Elem> = below
        .into_iter()
        .filter(|&s| !l.leq(s, core))
        .filter(|&s| is_completely_coirreducible(l, s))
        .collect();
    out.sort();
    out
}

/// Relative strata of `x` in `δ(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeStrata<E> {
    pub strata: Vec<Vec<E>>,
    pub rank: RankValue,
    pub delta: Vec<E>,
}

/// `s_α(x, z) = {s ∈ s_α(z) : s ≰ x}`, `r(x, z)` and `δ(x, z)`.
pub fn relative_strata<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    z: L::Elem,
) -> Result<RelativeStrata<L::Elem>, ResidualError> {
    if !l.leq(x, z) {
        return Err(not_below(l, z, x));
    }
    let profile = compute_profile(l, z, &Family::All)?;
    Ok(relative_from_strata(l, x, &profile.strata, profile.rank))
}

/// Relative strata computed from an already known list of strata of `z`.
pub fn relative_from_strata<L: EffectiveLattice + ?Sized>(
    l: &L,
    x: L::Elem,
    strata_of_z: &[Vec<L::Elem>],
    rank_of_z: RankValue,
) -> RelativeStrata<L::Elem> {
    let strata: Vec<Vec<L::Elem>> = strata_of_z
        .iter()
        .map(|s| s.iter().copied().filter(|&e| !l.leq(e, x)).collect())
        .collect();
    let rank = strata
        .iter()
        .position(Vec::is_empty)
        .map(RankValue::Finite)
        .unwrap_or(rank_of_z);
    let delta: BTreeSet<L::Elem> = strata.iter().flatten().copied().collect();
    RelativeStrata {
        strata,
        rank,
        delta: delta.into_iter().collect(),
    }
}

/// Elements with no maximal subelement, `T_0`.
pub fn t0_members<L: EffectiveLattice + ?Sized>(l: &L) -> Option<BTreeSet<L::Elem>> {
    Some(
        l.elements()?
            .into_iter()
            .filter(|&x| l.maximal_subelements(x).is_empty())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{as_lattice, build_poset, RelationMode};

    fn lattice(names: &[&str], covers: &[(&str, &str)]) -> FiniteLattice {
        as_lattice(build_poset(names, covers, RelationMode::Covers).unwrap()).unwrap()
    }

    fn chain3() -> FiniteLattice {
        lattice(&["0", "1", "2"], &[("0", "1"), ("1", "2")])
    }

    fn b2() -> FiniteLattice {
        lattice(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
    }

    /// Brute-force co-Heyting subtraction straight from the definition.
    fn sub_oracle(l: &FiniteLattice, x: usize, z: usize) -> usize {
        let ys: Vec<usize> = (0..l.len())
            .filter(|&y| l.leq(y, x) && l.join(z, y) == x)
            .collect();
        // The least solution must itself be a solution in a distributive lattice.
        let least = ys
            .iter()
            .copied()
            .find(|&y| ys.iter().all(|&w| l.leq(y, w)));
        least.expect("least solution exists")
    }

    #[test]
    fn maximal_subelements_examples() {
        let l = b2();
        assert_eq!(maximal_subelements(&l, 3, &Family::All), vec![1, 2]);
        assert_eq!(maximal_subelements(&chain3(), 2, &Family::All), vec![1]);
        let h = Family::Members([0usize, 3].into_iter().collect());
        assert_eq!(maximal_subelements(&l, 3, &h), vec![0]);
        assert!(maximal_subelements(&l, 0, &Family::All).is_empty());
    }

    #[test]
    fn co_heyting_examples() {
        let l = b2();
        assert_eq!(co_heyting_sub(&l, 3, 1).unwrap(), 2);
        assert_eq!(co_heyting_sub(&chain3(), 2, 1).unwrap(), 2);
        for x in 0..4 {
            assert_eq!(co_heyting_sub(&l, x, x).unwrap(), l.bottom());
            for z in 0..4 {
                if l.leq(z, x) {
                    assert_eq!(co_heyting_sub(&l, x, z).unwrap(), sub_oracle(&l, x, z));
                }
            }
        }
        assert!(matches!(
            co_heyting_sub(&l, 1, 2),
            Err(ResidualError::NotBelow { .. })
        ));
    }

    #[test]
    fn trait_default_matches_specialized_impl() {
        struct Plain<'a>(&'a FiniteLattice);
        impl EffectiveLattice for Plain<'_> {
            type Elem = usize;
            fn leq(&self, a: usize, b: usize) -> bool {
                self.0.leq(a, b)
            }
            fn meet(&self, a: usize, b: usize) -> usize {
                self.0.meet(a, b)
            }
            fn join(&self, a: usize, b: usize) -> usize {
                self.0.join(a, b)
            }
            fn bottom(&self) -> usize {
                self.0.bottom()
            }
            fn top(&self) -> Option<usize> {
                Some(self.0.top())
            }
            fn strictly_below(&self, x: usize) -> Vec<usize> {
                (0..self.0.len()).filter(|&z| self.0.lt(z, x)).collect()
            }
            fn is_coframe(&self) -> bool {
                self.0.is_coframe()
            }
            fn is_dually_compact(&self, _: usize) -> bool {
                true
            }
            fn label(&self, x: usize) -> String {
                x.to_string()
            }
            fn elements(&self) -> Option<Vec<usize>> {
                Some((0..self.0.len()).collect())
            }
        }
        let l = b2();
        let plain = Plain(&l);
        for x in 0..4 {
            assert_eq!(
                EffectiveLattice::maximal_subelements(&plain, x),
                EffectiveLattice::maximal_subelements(&l, x)
            );
            for z in l.down_set(x).iter() {
                assert_eq!(
                    plain.co_heyting_sub(x, z),
                    EffectiveLattice::co_heyting_sub(&l, x, z)
                );
            }
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(residual_derivative(&b2(), 3, &Family::All), 0);
        assert_eq!(residual_derivative(&b2(), 0, &Family::All), 0);
    }

    #[test]
    fn chain_profile() {
        let l = chain3();
        let p = residual_profile(&l, 2, &Family::All).unwrap();
        assert_eq!(p.rank, RankValue::Finite(2));
        assert_eq!(p.core, 0);
        assert_eq!(p.strata, vec![vec![2], vec![1]]);
        assert_eq!(p.boundary_poset, vec![1, 2]);
        assert_eq!(p.rho[&2], 0);
        assert_eq!(p.rho[&1], 1);
    }

    #[test]
    fn diamond_profile() {
        let l = b2();
        let p = residual_profile(&l, 3, &Family::All).unwrap();
        assert_eq!(p.rank, RankValue::Finite(1));
        assert_eq!(p.core, 0);
        assert_eq!(p.residues, vec![(1, 2), (2, 1)]);
        assert_eq!(p.boundary, 3);
        assert_eq!(p.strata, vec![vec![1, 2]]);
        assert!(outcasts(&l, 3, &Family::All).is_empty());
        assert_eq!(p.t_class, TClass::Finite(2));
    }

    #[test]
    fn bottom_profile_is_degenerate() {
        let l = b2();
        let p = residual_profile(&l, 0, &Family::All).unwrap();
        assert_eq!(p.rank, RankValue::Finite(0));
        assert_eq!((p.mu, p.core, p.boundary), (0, 0, 0));
        assert!(p.boundary_poset.is_empty() && p.strata.is_empty());
        assert_eq!(classify_t(&l, 0), TClass::Finite(0));
    }

    #[test]
    fn profile_json_shape() {
        let l = chain3();
        let p = residual_profile(&l, 2, &Family::All).unwrap();
        let v = p.to_json(|e| l.label(e));
        assert_eq!(v["rank"], json!({"finite": 2}));
        assert_eq!(v["strata"], json!([["2"], ["1"]]));
        assert_eq!(v["rho"], json!({"1": 1, "2": 0}));
        assert_eq!(RankValue::Omega.to_json(), json!("omega"));
    }

    #[test]
    fn outcasts_relative_to_family() {
        let l = chain3();
        let h = Family::Members([0usize, 2].into_iter().collect());
        assert_eq!(maximal_subelements(&l, 2, &h), vec![0]);
        assert!(outcasts(&l, 2, &h).is_empty());
    }

    #[test]
    fn coirreducibles_and_delta_plus() {
        let c = chain3();
        assert_eq!(completely_coirreducibles(&c).unwrap(), vec![1, 2]);
        assert_eq!(delta_plus(&c, 2, 0), vec![1, 2]);
        let l = b2();
        assert_eq!(completely_coirreducibles(&l).unwrap(), vec![1, 2]);
        assert_eq!(delta_plus(&l, 3, 0), vec![1, 2]);
    }

    #[test]
    fn relative_strata_examples() {
        let c = chain3();
        let same = relative_strata(&c, 2, 2).unwrap();
        assert_eq!(same.rank, RankValue::Finite(0));
        assert!(same.delta.is_empty());
        let rel = relative_strata(&c, 0, 2).unwrap();
        assert_eq!(rel.delta, vec![1, 2]);
        assert_eq!(rel.rank, RankValue::Finite(2));
        assert!(relative_strata(&c, 2, 1).is_err());
    }

    #[test]
    fn pentagon_profile_skips_coframe_checks() {
        let n5 = lattice(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        );
        assert!(residual_profile(&n5, 4, &Family::All).is_ok());
    }
}
