//! Finite topological spaces presented by a subbase, Cantor–Bendixson
//! derivatives, the dual Lawson topology of a finite lattice and the
//! order-compatibility conditions.
//!
//! A finite topology is determined by the minimal open neighbourhood `U_x` of
//! every point (the intersection of all subbase members containing `x`). A set
//! is open iff it contains `U_x` for each of its points, so the full open
//! family is only materialized on request.

use std::collections::BTreeSet;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{ElementSet, FiniteLattice};
use crate::residual::{self, EffectiveLattice, Family};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("space is not T1: point {0} lies in every open set around point {1}")]
    NotT1(usize, usize),
    #[error("subbase member refers to point {0} outside 0..{1}")]
    PointOutOfRange(usize, usize),
    #[error("too many open sets to enumerate (more than {0})")]
    TooManyOpens(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("topology has {0} points but the lattice has {1} elements")]
    SizeMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    n: usize,
    subbase: Vec<ElementSet>,
    neighbourhood: Vec<ElementSet>,
}

/// On-disk form: `{"points": n, "subbase": [[indices], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDocument {
    pub points: usize,
    pub subbase: Vec<Vec<usize>>,
}

/// Levels `S_0 ⊇ S_1 ⊇ … ⊇ S_rank` of the Cantor–Bendixson process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbSequence {
    pub levels: Vec<ElementSet>,
    pub rank: usize,
}

impl CbSequence {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "levels": self.levels.iter().map(ElementSet::to_vec).collect::<Vec<_>>(),
            "rank": self.rank,
        })
    }

    /// `S_α`; levels past the rank repeat the final one.
    pub fn level(&self, alpha: usize) -> &ElementSet {
        &self.levels[alpha.min(self.rank)]
    }

    /// Greatest `α` with `x ∈ S_α`; `None` for points of the perfect kernel.
    pub fn level_of(&self, x: usize) -> Option<usize> {
        if self.levels[self.rank].contains(x) {
            return None;
        }
        self.levels.iter().rposition(|level| level.contains(x))
    }

    /// The points never removed by the derivative.
    pub fn perfect_kernel(&self) -> ElementSet {
        self.levels[self.rank].clone()
    }
}

pub fn from_subbase(n: usize, subbase: Vec<ElementSet>) -> Result<FiniteTopology, TopologyError> {
    FiniteTopology::from_subbase(n, subbase)
}

impl FiniteTopology {
    pub fn from_subbase(n: usize, subbase: Vec<ElementSet>) -> Result<Self, TopologyError> {
        let mut normalized = Vec::with_capacity(subbase.len());
        for s in subbase {
            if let Some(bad) = s.iter().find(|&i| i >= n) {
                return Err(TopologyError::PointOutOfRange(bad, n));
            }
            let mut fitted = ElementSet::empty(n);
            for i in s.iter() {
                fitted.insert(i);
            }
            normalized.push(fitted);
        }
        let neighbourhood = (0..n)
            .map(|x| {
                let mut u = ElementSet::full(n);
                for s in normalized.iter().filter(|s| s.contains(x)) {
                    u.intersect_with(s);
                }
                u
            })
            .collect();
        Ok(FiniteTopology {
            n,
            subbase: normalized,
            neighbourhood,
        })
    }

    pub fn from_document(doc: &TopologyDocument) -> Result<Self, TopologyError> {
        let subbase = doc
            .subbase
            .iter()
            .map(|s| {
                if let Some(&bad) = s.iter().find(|&&i| i >= doc.points) {
                    return Err(TopologyError::PointOutOfRange(bad, doc.points));
                }
                Ok(ElementSet::from_indices(doc.points, s.iter().copied()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_subbase(doc.points, subbase)
    }

    pub fn discrete(n: usize) -> Self {
        let subbase = (0..n).map(|i| ElementSet::from_indices(n, [i])).collect();
        Self::from_subbase(n, subbase).expect("singletons are in range")
    }

    pub fn indiscrete(n: usize) -> Self {
        Self::from_subbase(n, Vec::new()).expect("empty subbase")
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn subbase(&self) -> &[ElementSet] {
        &self.subbase
    }

    /// The least open set containing `x`.
    pub fn neighbourhood(&self, x: usize) -> &ElementSet {
        &self.neighbourhood[x]
    }

    pub fn is_open(&self, s: &ElementSet) -> bool {
        s.iter().all(|x| self.neighbourhood[x].is_subset(s))
    }

    pub fn is_closed(&self, s: &ElementSet) -> bool {
        self.is_open(&s.complement())
    }

    /// All open sets in ascending bit order, refusing beyond `cap`.
    pub fn opens(&self, cap: usize) -> Result<Vec<ElementSet>, TopologyError> {
        // Opens are the unions of minimal neighbourhoods; grow the family by
        // adding one neighbourhood at a time.
        let mut family: BTreeSet<ElementSet> = BTreeSet::new();
        family.insert(ElementSet::empty(self.n));
        let mut distinct: Vec<&ElementSet> = self.neighbourhood.iter().collect();
        distinct.sort();
        distinct.dedup();
        for u in distinct {
            let additions: Vec<ElementSet> = family.iter().map(|o| o.union(u)).collect();
            family.extend(additions);
            if family.len() > cap {
                return Err(TopologyError::TooManyOpens(cap));
            }
        }
        Ok(family.into_iter().collect())
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.n).all(|x| self.neighbourhood[x].len() == 1)
    }

    /// Every point has an open set avoiding any other given point.
    pub fn t1_violation(&self) -> Option<(usize, usize)> {
        for x in 0..self.n {
            if let Some(y) = self.neighbourhood[x].iter().find(|&y| y != x) {
                return Some((y, x));
            }
        }
        None
    }

    pub fn is_t1(&self) -> bool {
        self.t1_violation().is_none()
    }

    /// Points of `s` isolated in the subspace topology on `s`.
    pub fn isolated_points(&self, s: &ElementSet) -> ElementSet {
        let mut out = ElementSet::empty(self.n);
        for x in s.iter() {
            if self.neighbourhood[x].intersection(s).len() == 1 {
                out.insert(x);
            }
        }
        out
    }

    /// `S'`: the non-isolated points of `s`.
    pub fn derived_set(&self, s: &ElementSet) -> ElementSet {
        s.difference(&self.isolated_points(s))
    }

    pub fn cb_sequence(&self, start: &ElementSet) -> CbSequence {
        let mut levels = vec![start.clone()];
        loop {
            let next = self.derived_set(levels.last().expect("nonempty"));
            if &next == levels.last().expect("nonempty") {
                break;
            }
            levels.push(next);
        }
        let rank = levels.len() - 1;
        CbSequence { levels, rank }
    }

    pub fn to_document(&self) -> TopologyDocument {
        TopologyDocument {
            points: self.n,
            subbase: self.subbase.iter().map(ElementSet::to_vec).collect(),
        }
    }
}

/// The topology generated by `↓k` and `L ∖ ↓k` for every element `k` (all
/// elements of a finite lattice are dually compact).
pub fn dual_lawson(l: &FiniteLattice) -> FiniteTopology {
    let n = l.len();
    let mut subbase = Vec::with_capacity(2 * n);
    for k in 0..n {
        let down = l.down_set(k);
        subbase.push(down.complement());
        subbase.push(down);
    }
    FiniteTopology::from_subbase(n, subbase).expect("down-sets are in range")
}

/// Verdicts for the three order-compatibility conditions, with the first
/// failing witness of each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCompatibility {
    pub monotone_limits: Result<(), String>,
    pub join_continuous: Result<(), String>,
    pub order_closed: Result<(), String>,
}

impl OrderCompatibility {
    pub fn all_pass(&self) -> bool {
        self.monotone_limits.is_ok() && self.join_continuous.is_ok() && self.order_closed.is_ok()
    }
}

/// Checks the three order-compatibility conditions on a finite lattice.
///
/// A monotone sequence in a finite poset is eventually constant at its meet
/// (or join), so condition (i) reduces to every open neighbourhood of a chain
/// limit containing the tail of each monotone sequence along the chain. The
/// product topology on `L × L` has minimal neighbourhoods `U_a × U_b`.
pub fn check_order_compatible(
    l: &FiniteLattice,
    t: &FiniteTopology,
) -> Result<OrderCompatibility, TopologyError> {
    let n = l.len();
    if t.points() != n {
        return Err(TopologyError::SizeMismatch(t.points(), n));
    }
    let mut monotone_limits = Ok(());
    'chains: for a in 0..n {
        for b in l.up_set(a).iter() {
            // The sequence b, a, a, … descends to a = a ∧ b; the sequence
            // a, b, b, … ascends to b = a ∨ b. Each tail is the limit alone.
            for (tail, limit) in [(l.meet(a, b), l.meet(a, b)), (l.join(a, b), l.join(a, b))] {
                if !t.neighbourhood(limit).contains(tail) {
                    monotone_limits = Err(format!(
                        "monotone sequence through {} and {} does not converge to {}",
                        l.name(a),
                        l.name(b),
                        l.name(limit)
                    ));
                    break 'chains;
                }
            }
        }
    }
    let mut join_continuous = Ok(());
    'join: for a in 0..n {
        for b in 0..n {
            let target = t.neighbourhood(l.join(a, b));
            for a2 in t.neighbourhood(a).iter() {
                for b2 in t.neighbourhood(b).iter() {
                    if !target.contains(l.join(a2, b2)) {
                        join_continuous = Err(format!(
                            "join is not continuous at ({}, {}): ({}, {}) escapes",
                            l.name(a),
                            l.name(b),
                            l.name(a2),
                            l.name(b2)
                        ));
                        break 'join;
                    }
                }
            }
        }
    }
    let mut order_closed = Ok(());
    'order: for a in 0..n {
        for b in 0..n {
            if l.leq(a, b) {
                continue;
            }
            for a2 in t.neighbourhood(a).iter() {
                for b2 in t.neighbourhood(b).iter() {
                    if l.leq(a2, b2) {
                        order_closed = Err(format!(
                            "order is not closed: every neighbourhood of ({}, {}) meets it at ({}, {})",
                            l.name(a),
                            l.name(b),
                            l.name(a2),
                            l.name(b2)
                        ));
                        break 'order;
                    }
                }
            }
        }
    }
    Ok(OrderCompatibility {
        monotone_limits,
        join_continuous,
        order_closed,
    })
}

/// The lattice of closed subsets of `t` under inclusion, with the closed
/// sets in lattice index order.
pub fn closed_set_lattice(
    t: &FiniteTopology,
    cap: usize,
) -> Result<(FiniteLattice, Vec<ElementSet>), TopologyError> {
    let closed: Vec<ElementSet> = t.opens(cap)?.into_iter().map(|o| o.complement()).collect();
    let mut closed = closed;
    closed.sort_by_key(|c| (c.len(), c.to_vec()));
    let index: std::collections::HashMap<ElementSet, usize> = closed
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let names = closed.iter().map(set_label).collect();
    let lattice = FiniteLattice::from_operations(
        names,
        |a, b| closed[a].is_subset(&closed[b]),
        |a, b| index[&closed[a].intersection(&closed[b])],
        |a, b| index[&closed[a].union(&closed[b])],
    )
    .expect("closed sets form a lattice");
    Ok((lattice, closed))
}

pub(crate) fn set_label(s: &ElementSet) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// One closed set's comparison between `μ` and the derived set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedSetComparison {
    pub set: ElementSet,
    pub mu: ElementSet,
    pub derived: ElementSet,
}

impl ClosedSetComparison {
    pub fn agrees(&self) -> bool {
        self.mu == self.derived
    }
}

/// For every closed set `S` of a T1 space, compares `μ(S)` in the lattice of
/// closed sets with the Cantor–Bendixson derivative `S'`.
pub fn residual_equals_cb_closedsets(
    t: &FiniteTopology,
) -> Result<Vec<ClosedSetComparison>, TopologyError> {
    if let Some((y, x)) = t.t1_violation() {
        return Err(TopologyError::NotT1(y, x));
    }
    let (lattice, closed) = closed_set_lattice(t, 1 << 16)?;
    Ok((0..lattice.len())
        .map(|i| {
            let mu = residual::residual_derivative(&lattice, i, &Family::All);
            ClosedSetComparison {
                set: closed[i].clone(),
                mu: closed[mu].clone(),
                derived: t.derived_set(&closed[i]),
            }
        })
        .collect())
}

/// `a, c ∈ S` and `a ≤ b ≤ c` imply `b ∈ S`.
pub fn is_convex(l: &FiniteLattice, s: &ElementSet) -> bool {
    s.iter().all(|a| {
        s.iter()
            .all(|c| !l.leq(a, c) || l.up_set(a).intersection(&l.down_set(c)).is_subset(s))
    })
}

/// Picks, for each point of `s`, the first member of `cover` containing it.
/// Returns the chosen indices, or `None` when `cover` does not cover `s`.
pub fn finite_subcover(s: &ElementSet, cover: &[ElementSet]) -> Option<Vec<usize>> {
    let mut chosen = BTreeSet::new();
    for x in s.iter() {
        chosen.insert(cover.iter().position(|o| o.contains(x))?);
    }
    Some(chosen.into_iter().collect())
}

/// Checks that `s` is compact against the cover by minimal neighbourhoods of
/// its points, the hardest cover to reduce.
pub fn is_compact(t: &FiniteTopology, s: &ElementSet) -> bool {
    let cover: Vec<ElementSet> = s.iter().map(|x| t.neighbourhood(x).clone()).collect();
    finite_subcover(s, &cover).is_some()
}

/// Searches for an open neighbourhood `o` of `x` with `c(z) = c(x)` for all
/// `z ∈ o ∖ ↓x`. Returns the witness neighbourhood.
pub fn check_locally_constant_core(
    l: &FiniteLattice,
    t: &FiniteTopology,
    x: usize,
) -> Option<ElementSet> {
    let core = |e: usize| {
        residual::compute_profile(l, e, &Family::All)
            .expect("finite lattices stabilize")
            .core
    };
    let cx = core(x);
    let o = t.neighbourhood(x).clone();
    let outside = o.difference(&l.down_set(x));
    let constant = outside.iter().all(|z| core(z) == cx);
    constant.then_some(o)
}

/// One clause of the isolation-from-below conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseVerdict {
    pub clause: String,
    pub holds: bool,
    pub note: String,
}

impl ClauseVerdict {
    fn new(clause: &str, holds: bool, note: impl Into<String>) -> Self {
        ClauseVerdict {
            clause: clause.to_string(),
            holds,
            note: note.into(),
        }
    }
}

/// Evaluates the isolation-from-below clauses for `x` in a finite lattice
/// carrying the topology `t`.
///
/// `x` must lie in `S_1 ∖ S_2`. When `x ∈ T_0` the net is `h_P = ⋁P` over
/// finite `P ⊆ δx = ↓x ∩ I(L) ∖ ↓μ_{T_0}(x)`; otherwise `x` must have an
/// outcast and the net is `h_P = ⋁P ∨ ∂x` over
/// `δx = ↓x ∩ I(L) ∖ ↓(μ_{T_0}(x − ∂x) ∨ ∂x)`. Subsets of `δx` are enumerated
/// exhaustively up to 12 members and sampled (`samples`, seeded) beyond.
pub fn check_isolated_below_conditions(
    l: &FiniteLattice,
    t: &FiniteTopology,
    x: usize,
    p_star: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<ClauseVerdict>, TopologyError> {
    let n = l.len();
    if t.points() != n {
        return Err(TopologyError::SizeMismatch(t.points(), n));
    }
    let cb = t.cb_sequence(&ElementSet::full(n));
    let in_s1 = cb.level(1).contains(x);
    let in_s2 = cb.level(2).contains(x);
    if !in_s1 || in_s2 {
        return Err(TopologyError::PreconditionFailed(format!(
            "{} is not in S_1 ∖ S_2",
            l.name(x)
        )));
    }
    let t0: BTreeSet<usize> = residual::t0_members(l)
        .expect("finite")
        .into_iter()
        .collect();
    let t0_family = Family::Members(t0.clone());
    let is_t0 = t0.contains(&x);
    let profile = residual::compute_profile(l, x, &Family::All).expect("finite");
    let boundary = profile.boundary;
    let mut verdicts = Vec::new();

    let (anchor, base, extra) = if is_t0 {
        let m = residual::maximal_subelements(l, x, &t0_family);
        verdicts.push(ClauseVerdict::new(
            "unique T0-maximal",
            m.len() == 1,
            format!("|M_T0(x)| = {}", m.len()),
        ));
        let outcasts = residual::outcasts(l, x, &t0_family);
        verdicts.push(ClauseVerdict::new(
            "no T0-outcast",
            outcasts.is_empty(),
            format!("{} T0-outcasts", outcasts.len()),
        ));
        let mu = residual::residual_derivative(l, x, &t0_family);
        (x, mu, None)
    } else {
        let outcasts = residual::outcasts(l, x, &Family::All);
        if outcasts.is_empty() {
            return Err(TopologyError::PreconditionFailed(format!(
                "{} is neither in T0 nor has an outcast",
                l.name(x)
            )));
        }
        let rest = l.co_heyting_sub(x, boundary).expect("boundary is below x");
        let m = residual::maximal_subelements(l, rest, &t0_family);
        verdicts.push(ClauseVerdict::new(
            "unique T0-maximal of x − ∂x",
            m.len() == 1,
            format!("|M_T0(x − ∂x)| = {}", m.len()),
        ));
        let t0_outcasts = residual::outcasts(l, x, &t0_family);
        verdicts.push(ClauseVerdict::new(
            "no T0-outcast",
            t0_outcasts.is_empty(),
            format!("{} T0-outcasts", t0_outcasts.len()),
        ));
        let mu = residual::residual_derivative(l, rest, &t0_family);
        verdicts.push(ClauseVerdict::new(
            "μ_T0(x − ∂x) ∨ ∂x < x",
            l.lt(l.join(mu, boundary), x),
            "",
        ));
        verdicts.push(ClauseVerdict::new(
            "μ_T0(x − ∂x) ≰ ∂x",
            !l.leq(mu, boundary),
            "",
        ));
        (rest, mu, Some(boundary))
    };
    let floor = match extra {
        Some(b) => l.join(base, b),
        None => base,
    };
    let irreducible: BTreeSet<usize> = residual::completely_coirreducibles(l)
        .expect("finite")
        .into_iter()
        .collect();
    let delta: Vec<usize> = l
        .down_set(x)
        .iter()
        .filter(|s| irreducible.contains(s) && !l.leq(*s, floor))
        .collect();
    if let Some(&bad) = p_star.iter().find(|p| !delta.contains(p)) {
        return Err(TopologyError::PreconditionFailed(format!(
            "{} is not in δx",
            l.name(bad)
        )));
    }
    let h = |p: &[usize]| {
        let joined = l.join_all(p.iter().copied());
        match extra {
            Some(b) => l.join(joined, b),
            None => joined,
        }
    };
    let subsets = subsets_of(&delta, p_star, samples, seed);
    let star: BTreeSet<usize> = p_star.iter().copied().collect();
    let h_star = h(p_star);
    let supersets: Vec<&Vec<usize>> = subsets
        .iter()
        .filter(|p| star.iter().all(|s| p.contains(s)))
        .collect();

    let all_below = subsets.iter().all(|p| l.lt(h(p), x));
    let sup = l.join_all(subsets.iter().map(|p| h(p)));
    verdicts.push(ClauseVerdict::new(
        "(i)",
        all_below && sup == x,
        format!("every h_P < x: {all_below}; sup of h_P = {}", l.name(sup)),
    ));
    let uncovered = l
        .down_set(x)
        .iter()
        .filter(|&z| z != x)
        .find(|&z| !subsets.iter().any(|p| l.leq(z, h(p))));
    verdicts.push(ClauseVerdict::new(
        "(ii)",
        uncovered.is_none(),
        uncovered.map_or(String::new(), |z| {
            format!("{} lies below no h_P", l.name(z))
        }),
    ));
    let isolated = t.isolated_points(&ElementSet::full(n));
    let core_star = residual::compute_profile(l, h_star, &Family::All)
        .expect("finite")
        .core;
    let expected_core = match extra {
        Some(b) => {
            let cb = residual::compute_profile(l, b, &Family::All)
                .expect("finite")
                .core;
            l.join(base, cb)
        }
        None => base,
    };
    verdicts.push(ClauseVerdict::new(
        "(iii)",
        isolated.contains(h_star) && core_star == expected_core,
        format!(
            "h_P* = {} isolated: {}; c(h_P*) = {}",
            l.name(h_star),
            isolated.contains(h_star),
            l.name(core_star)
        ),
    ));
    verdicts.push(ClauseVerdict::new(
        "(iv)",
        supersets.iter().all(|p| l.dually_compact_finite(h(p))),
        "finite lattice",
    ));
    verdicts.push(ClauseVerdict::new(
        "(v)",
        true,
        format!(
            "{} supersets of P*, all relative strata finite",
            supersets.len()
        ),
    ));
    let o = t.neighbourhood(anchor);
    let reaches = supersets
        .iter()
        .any(|p| delta.iter().all(|s| p.contains(s) || o.contains(*s)));
    verdicts.push(ClauseVerdict::new(
        "(vi)",
        reaches,
        "checked on the least open around the anchor",
    ));
    let vii = delta
        .iter()
        .filter(|s| !star.contains(s))
        .all(|&s| match extra {
            Some(b) => l.leq(base, l.join(s, b)),
            None => l.leq(base, s),
        });
    verdicts.push(ClauseVerdict::new(
        "(vii)",
        vii,
        "finiteness parts hold in finite lattices",
    ));
    Ok(verdicts)
}

fn subsets_of(delta: &[usize], p_star: &[usize], samples: usize, seed: u64) -> Vec<Vec<usize>> {
    let k = delta.len();
    if k <= 12 {
        return (0u32..(1 << k))
            .map(|mask| {
                (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| delta[i])
                    .collect()
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    out.insert(Vec::new());
    out.insert(delta.to_vec());
    let mut star = p_star.to_vec();
    star.sort();
    out.insert(star);
    for _ in 0..samples {
        let size = (0..=k).choose(&mut rng).unwrap_or(0);
        let mut pick: Vec<usize> = delta.iter().copied().choose_multiple(&mut rng, size);
        pick.sort();
        out.insert(pick);
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{as_lattice, build_poset, RelationMode};

    fn set(n: usize, items: &[usize]) -> ElementSet {
        ElementSet::from_indices(n, items.iter().copied())
    }

    fn chain(k: usize) -> FiniteLattice {
        let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        let covers: Vec<(String, String)> = (1..k)
            .map(|i| ((i - 1).to_string(), i.to_string()))
            .collect();
        as_lattice(build_poset(&names, &covers, RelationMode::Covers).unwrap()).unwrap()
    }

    fn b2() -> FiniteLattice {
        as_lattice(
            build_poset(
                &["0", "a", "b", "1"],
                &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
                RelationMode::Covers,
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sierpinski_space() {
        let t = from_subbase(2, vec![set(2, &[0])]).unwrap();
        let opens = t.opens(100).unwrap();
        assert_eq!(opens, vec![set(2, &[]), set(2, &[0]), set(2, &[0, 1])]);
        assert_eq!(t.isolated_points(&ElementSet::full(2)), set(2, &[0]));
    }

    #[test]
    fn indiscrete_and_discrete() {
        let t = FiniteTopology::indiscrete(3);
        assert_eq!(t.opens(100).unwrap().len(), 2);
        assert!(t.isolated_points(&ElementSet::full(3)).is_empty());
        let cb = t.cb_sequence(&ElementSet::full(3));
        assert_eq!((cb.rank, cb.levels.len()), (0, 1));
        let d = FiniteTopology::discrete(4);
        assert_eq!(d.opens(100).unwrap().len(), 16);
        assert!(d.is_discrete() && d.is_t1());
        let cb = FiniteTopology::discrete(5).cb_sequence(&ElementSet::full(5));
        assert_eq!(cb.levels, vec![ElementSet::full(5), ElementSet::empty(5)]);
        assert_eq!(cb.rank, 1);
    }

    #[test]
    fn chain_of_limits_peels_from_the_top() {
        let k = 3;
        let n = k + 1;
        let subbase = (0..=k)
            .map(|i| set(n, &(i..=k).collect::<Vec<_>>()))
            .collect();
        let t = from_subbase(n, subbase).unwrap();
        let cb = t.cb_sequence(&ElementSet::full(n));
        assert_eq!(cb.rank, k + 1);
        assert_eq!(cb.levels[1], set(n, &[0, 1, 2]));
    }

    #[test]
    fn open_family_is_closed_under_operations() {
        let t = from_subbase(4, vec![set(4, &[0, 1]), set(4, &[1, 2]), set(4, &[3])]).unwrap();
        let opens = t.opens(1000).unwrap();
        for a in &opens {
            assert!(t.is_open(a));
            for b in &opens {
                assert!(opens.contains(&a.union(b)));
                assert!(opens.contains(&a.intersection(b)));
            }
        }
    }

    #[test]
    fn dual_lawson_small_cases() {
        assert_eq!(dual_lawson(&chain(3)).opens(100).unwrap().len(), 8);
        let t = dual_lawson(&b2());
        assert_eq!(t.opens(100).unwrap().len(), 16);
        assert!(check_order_compatible(&b2(), &t).unwrap().all_pass());
    }

    #[test]
    fn indiscrete_order_is_not_closed() {
        let report = check_order_compatible(&b2(), &FiniteTopology::indiscrete(4)).unwrap();
        assert!(report.order_closed.is_err());
        let c2 = chain(2);
        assert!(check_order_compatible(&c2, &FiniteTopology::discrete(2))
            .unwrap()
            .all_pass());
    }

    #[test]
    fn closed_sets_of_discrete_space() {
        let t = FiniteTopology::discrete(3);
        let report = residual_equals_cb_closedsets(&t).unwrap();
        assert_eq!(report.len(), 8);
        for row in &report {
            assert!(row.agrees());
            assert!(row.mu.is_empty());
        }
        assert!(matches!(
            residual_equals_cb_closedsets(&FiniteTopology::indiscrete(2)),
            Err(TopologyError::NotT1(..))
        ));
    }

    #[test]
    fn convexity_and_compactness() {
        let l = chain(4);
        assert!(is_convex(&l, &set(4, &[1, 2, 3])));
        assert!(!is_convex(&l, &set(4, &[0, 2])));
        let t = dual_lawson(&l);
        for x in 0..4 {
            assert!(is_compact(&t, &l.down_set(x)));
        }
        assert_eq!(finite_subcover(&set(4, &[0, 1]), &[set(4, &[0])]), None);
    }

    #[test]
    fn locally_constant_core_on_discrete() {
        let l = chain(3);
        let t = dual_lawson(&l);
        assert_eq!(check_locally_constant_core(&l, &t, 2), Some(set(3, &[2])));
    }

    #[test]
    fn isolation_from_below_rejects_isolated_points() {
        let l = chain(3);
        let t = dual_lawson(&l);
        assert!(matches!(
            check_isolated_below_conditions(&l, &t, 2, &[], 16, 0),
            Err(TopologyError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn isolation_from_below_on_a_pretend_topology() {
        // Chain 0 < 1 < 2 where every open around 0 also contains 1, so the
        // bottom is a limit point and the remaining points are isolated.
        let l = chain(3);
        let t = from_subbase(3, vec![set(3, &[0, 1]), set(3, &[1]), set(3, &[2])]).unwrap();
        let verdicts = check_isolated_below_conditions(&l, &t, 0, &[], 16, 0).unwrap();
        let unique = verdicts
            .iter()
            .find(|v| v.clause == "unique T0-maximal")
            .unwrap();
        assert!(!unique.holds);
        assert!(verdicts.iter().any(|v| v.clause == "(i)"));
        assert!(verdicts.iter().any(|v| v.clause == "(vii)"));
    }
}
