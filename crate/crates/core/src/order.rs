//! Explicit finite posets and lattices.
//!
//! The order is stored as a full reflexive-transitive closure in bit-packed
//! rows (both the up-set and the down-set of every element), so `leq` is a
//! single bit probe. Lattices additionally carry dense meet and join tables.
//! Element identity is the index; labels are for display only.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("cycle detected: `{0}` and `{1}` are mutually below each other")]
    CycleDetected(String, String),
    #[error("not a lattice: `{0}` and `{1}` have no {2}")]
    NotALattice(String, String, &'static str),
    #[error("poset has no bottom element")]
    NoBottom,
    #[error("empty meet requested in a lattice without top")]
    NoTop,
    #[error("invalid relation mode `{0}` (expected `covers` or `leq`)")]
    InvalidMode(String),
    #[error("malformed poset document: {0}")]
    Malformed(String),
}

/// A subset of element indices `0..n`, bit-packed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(FixedBitSet);

impl ElementSet {
    pub fn empty(n: usize) -> Self {
        ElementSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        ElementSet(bits)
    }

    pub fn from_indices(n: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(n);
        for i in items {
            set.insert(i);
        }
        set
    }

    /// Size of the ambient index range.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &ElementSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &ElementSet) {
        self.0.difference_with(&other.0);
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn complement(&self) -> ElementSet {
        let mut out = self.clone();
        out.0.toggle_range(..);
        out
    }

    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// How the pairs given to [`build_poset`] are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationMode {
    /// Pairs are Hasse edges `(lower, upper)`.
    Covers,
    /// Pairs are arbitrary instances of `lower <= upper`.
    Leq,
}

impl std::str::FromStr for RelationMode {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "covers" => Ok(RelationMode::Covers),
            "leq" => Ok(RelationMode::Leq),
            other => Err(OrderError::InvalidMode(other.to_string())),
        }
    }
}

/// A finite partial order with its closure matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    /// `up[i]` holds every `j` with `i <= j`.
    up: Vec<FixedBitSet>,
    /// `down[i]` holds every `j` with `j <= i`.
    down: Vec<FixedBitSet>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinitePoset")
            .field("names", &self.names)
            .field("covers", &self.covers())
            .finish()
    }
}

/// Builds a poset from labelled pairs, closing the relation reflexively and
/// transitively.
pub fn build_poset<S: AsRef<str>>(
    names: &[S],
    pairs: &[(S, S)],
    mode: RelationMode,
) -> Result<FinitePoset, OrderError> {
    let mut index = HashMap::with_capacity(names.len());
    let mut owned = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let name = name.as_ref();
        if index.insert(name.to_string(), i).is_some() {
            return Err(OrderError::DuplicateElement(name.to_string()));
        }
        owned.push(name.to_string());
    }
    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| OrderError::UnknownElement(s.to_string()))
    };
    let mut edges = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        edges.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
    }
    // Hasse edges and order pairs generate the same closure.
    let _ = mode;
    FinitePoset::from_edges(owned, &edges)
}

impl FinitePoset {
    /// Closes `edges` (pairs `(lower, upper)` of indices) into a partial order.
    pub fn from_edges(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = names.len();
        let mut up: Vec<FixedBitSet> = (0..n)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert(i);
                row
            })
            .collect();
        for &(a, b) in edges {
            up[a].insert(b);
        }
        // Warshall over bit rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Self::from_up_rows(names, up)
    }

    /// Builds a poset from a relation predicate, verifying all three axioms.
    pub fn from_leq_fn(
        names: Vec<String>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, OrderError> {
        let n = names.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            for j in 0..n {
                if leq(i, j) {
                    row.insert(j);
                }
            }
        }
        let poset = Self::from_up_rows(names, up)?;
        if let Some((i, k)) = poset.transitivity_violation() {
            return Err(OrderError::Malformed(format!(
                "relation is not transitive at ({}, {})",
                poset.names[i], poset.names[k]
            )));
        }
        if let Some(i) = (0..n).find(|&i| !poset.up[i].contains(i)) {
            return Err(OrderError::Malformed(format!(
                "relation is not reflexive at {}",
                poset.names[i]
            )));
        }
        Ok(poset)
    }

    fn from_up_rows(names: Vec<String>, up: Vec<FixedBitSet>) -> Result<Self, OrderError> {
        let n = names.len();
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter().enumerate() {
            for j in row.ones() {
                down[j].insert(i);
            }
        }
        for i in 0..n {
            for j in up[i].ones() {
                if j != i && up[j].contains(i) {
                    return Err(OrderError::CycleDetected(
                        names[i].clone(),
                        names[j].clone(),
                    ));
                }
            }
        }
        Ok(FinitePoset { names, up, down })
    }

    fn transitivity_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in self.up[i].ones() {
                if !self.up[j].is_subset(&self.up[i]) {
                    let k = self.up[j].difference(&self.up[i]).next().unwrap_or(j);
                    return Some((i, k));
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// `{z : z <= x}`.
    pub fn down_set(&self, x: usize) -> ElementSet {
        ElementSet(self.down[x].clone())
    }

    /// `{z : x <= z}`.
    pub fn up_set(&self, x: usize) -> ElementSet {
        ElementSet(self.up[x].clone())
    }

    pub(crate) fn down_bits(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    pub(crate) fn up_bits(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    /// Hasse edges `(lower, upper)` in lexicographic index order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in self.up[a].ones() {
                if b == a {
                    continue;
                }
                // a < b is a cover iff no c with a < c < b.
                let mut between = self.up[a].clone();
                between.intersect_with(&self.down[b]);
                if between.count_ones(..) == 2 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Elements strictly below `x` that are maximal among those.
    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        self.down[x]
            .ones()
            .filter(|&z| z != x)
            .filter(|&z| {
                self.down[x]
                    .ones()
                    .all(|w| w == x || w == z || !self.lt(z, w))
            })
            .collect()
    }

    /// Length (number of edges) of the longest chain.
    pub fn height(&self) -> usize {
        let order = self.linear_extension();
        let mut depth = vec![0usize; self.len()];
        for &b in &order {
            for a in self.down[b].ones() {
                if a != b {
                    depth[b] = depth[b].max(depth[a] + 1);
                }
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Indices sorted so that every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| (self.down[i].count_ones(..), i));
        idx
    }

    /// The sub-poset induced on `keep`, with indices renumbered in ascending
    /// order of the original indices.
    pub fn restrict(&self, keep: &ElementSet) -> FinitePoset {
        let members = keep.to_vec();
        let names = members.iter().map(|&i| self.names[i].clone()).collect();
        FinitePoset::from_leq_fn(names, |a, b| self.leq(members[a], members[b]))
            .expect("restriction of a partial order is a partial order")
    }

    /// The set of order relations as a canonical document (Hasse edges).
    pub fn to_document(&self) -> PosetDocument {
        PosetDocument {
            elements: self.names.clone(),
            relation: self
                .covers()
                .into_iter()
                .map(|(a, b)| [self.names[a].clone(), self.names[b].clone()])
                .collect(),
            mode: RelationMode::Covers,
        }
    }
}

/// On-disk form of a poset: `{"elements":[...], "relation":[["a","b"],...], "mode":"covers"|"leq"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDocument {
    pub elements: Vec<String>,
    pub relation: Vec<[String; 2]>,
    pub mode: RelationMode,
}

impl PosetDocument {
    pub fn from_json(text: &str) -> Result<Self, OrderError> {
        serde_json::from_str(text).map_err(|e| OrderError::Malformed(e.to_string()))
    }

    /// Canonical JSON: sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("poset documents always serialize");
        let mut text = serde_json::to_string_pretty(&value).expect("values always serialize");
        text.push('\n');
        text
    }

    pub fn build(&self) -> Result<FinitePoset, OrderError> {
        let pairs: Vec<(&str, &str)> = self
            .relation
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let names: Vec<&str> = self.elements.iter().map(String::as_str).collect();
        build_poset(&names, &pairs, self.mode)
    }
}

/// A finite lattice: a poset with total meet and join tables and a bottom.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    poset: FinitePoset,
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: usize,
    top: usize,
    distributive: bool,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("names", &self.poset.names)
            .field("bottom", &self.bottom)
            .field("top", &self.top)
            .field("distributive", &self.distributive)
            .finish()
    }
}

/// Raw constituents of a [`FiniteLattice`], as returned by
/// [`FiniteLattice::into_parts`].
#[derive(Debug, Clone)]
pub struct LatticeParts {
    pub poset: FinitePoset,
    pub meet: Vec<u32>,
    pub join: Vec<u32>,
    pub bottom: usize,
    pub top: usize,
    pub distributive: bool,
}

/// Turns a poset into a lattice, computing meet/join tables and the
/// distributivity flag.
pub fn as_lattice(poset: FinitePoset) -> Result<FiniteLattice, OrderError> {
    let n = poset.len();
    if n == 0 {
        return Err(OrderError::NoBottom);
    }
    // An element is identified by its down-set (resp. up-set); the meet of a
    // and b exists iff down(a) & down(b) is itself the down-set of something.
    let by_down: HashMap<&FixedBitSet, usize> = (0..n).map(|i| (&poset.down[i], i)).collect();
    let by_up: HashMap<&FixedBitSet, usize> = (0..n).map(|i| (&poset.up[i], i)).collect();
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    let mut scratch = FixedBitSet::with_capacity(n);
    for a in 0..n {
        for b in a..n {
            scratch.clone_from(&poset.down[a]);
            scratch.intersect_with(&poset.down[b]);
            let m = *by_down.get(&scratch).ok_or_else(|| {
                OrderError::NotALattice(poset.names[a].clone(), poset.names[b].clone(), "meet")
            })?;
            scratch.clone_from(&poset.up[a]);
            scratch.intersect_with(&poset.up[b]);
            let j = *by_up.get(&scratch).ok_or_else(|| {
                OrderError::NotALattice(poset.names[a].clone(), poset.names[b].clone(), "join")
            })?;
            meet[a * n + b] = m as u32;
            meet[b * n + a] = m as u32;
            join[a * n + b] = j as u32;
            join[b * n + a] = j as u32;
        }
    }
    let bottom = (0..n)
        .find(|&i| poset.up[i].count_ones(..) == n)
        .ok_or(OrderError::NoBottom)?;
    let top = (0..n)
        .find(|&i| poset.down[i].count_ones(..) == n)
        .ok_or(OrderError::NoTop)?;
    let mut lattice = FiniteLattice {
        poset,
        meet,
        join,
        bottom,
        top,
        distributive: false,
    };
    lattice.distributive = lattice.compute_distributive();
    Ok(lattice)
}

impl FiniteLattice {
    /// Builds a lattice from an order predicate and candidate meet/join
    /// operations, verifying that the operations really are the infimum and
    /// supremum of every pair.
    pub fn from_operations(
        names: Vec<String>,
        leq: impl Fn(usize, usize) -> bool,
        meet: impl Fn(usize, usize) -> usize,
        join: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, OrderError> {
        let poset = FinitePoset::from_leq_fn(names, leq)?;
        let n = poset.len();
        if n == 0 {
            return Err(OrderError::NoBottom);
        }
        let mut meet_table = vec![0u32; n * n];
        let mut join_table = vec![0u32; n * n];
        let mut scratch = FixedBitSet::with_capacity(n);
        for a in 0..n {
            for b in 0..n {
                let (m, j) = (meet(a, b), join(a, b));
                scratch.clone_from(&poset.down[a]);
                scratch.intersect_with(&poset.down[b]);
                if m >= n || scratch != poset.down[m] {
                    return Err(OrderError::NotALattice(
                        poset.names[a].clone(),
                        poset.names[b].clone(),
                        "meet",
                    ));
                }
                scratch.clone_from(&poset.up[a]);
                scratch.intersect_with(&poset.up[b]);
                if j >= n || scratch != poset.up[j] {
                    return Err(OrderError::NotALattice(
                        poset.names[a].clone(),
                        poset.names[b].clone(),
                        "join",
                    ));
                }
                meet_table[a * n + b] = m as u32;
                join_table[a * n + b] = j as u32;
            }
        }
        let bottom = (0..n)
            .find(|&i| poset.up[i].count_ones(..) == n)
            .ok_or(OrderError::NoBottom)?;
        let top = (0..n)
            .find(|&i| poset.down[i].count_ones(..) == n)
            .ok_or(OrderError::NoTop)?;
        let mut lattice = FiniteLattice {
            poset,
            meet: meet_table,
            join: join_table,
            bottom,
            top,
            distributive: false,
        };
        lattice.distributive = lattice.compute_distributive();
        Ok(lattice)
    }

    pub fn from_poset(poset: FinitePoset) -> Result<Self, OrderError> {
        as_lattice(poset)
    }

    pub fn into_parts(self) -> LatticeParts {
        LatticeParts {
            poset: self.poset,
            meet: self.meet,
            join: self.join,
            bottom: self.bottom,
            top: self.top,
            distributive: self.distributive,
        }
    }

    /// Reassembles a lattice without re-validating the tables. Used by fault
    /// injection fixtures; everything else should go through [`as_lattice`].
    pub fn from_parts_unchecked(parts: LatticeParts) -> Self {
        FiniteLattice {
            poset: parts.poset,
            meet: parts.meet,
            join: parts.join,
            bottom: parts.bottom,
            top: parts.top,
            distributive: parts.distributive,
        }
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        self.poset.name(i)
    }

    pub fn names(&self) -> &[String] {
        self.poset.names()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.poset.index_of(name)
    }

    /// Index of the least element, `ε`.
    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn is_distributive(&self) -> bool {
        self.distributive
    }

    /// Finite lattices are lower complete, so the dual infinite distributive
    /// law reduces to binary distributivity.
    pub fn is_coframe(&self) -> bool {
        self.distributive
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.poset.leq(a, b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.poset.lt(a, b)
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b] as usize
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b] as usize
    }

    pub fn down_set(&self, x: usize) -> ElementSet {
        self.poset.down_set(x)
    }

    pub fn up_set(&self, x: usize) -> ElementSet {
        self.poset.up_set(x)
    }

    /// `⋀S`; the empty meet is the top.
    pub fn meet_of_set(&self, s: &ElementSet) -> usize {
        s.iter().fold(self.top, |acc, i| self.meet(acc, i))
    }

    /// `⋁S`; the empty join is `ε`.
    pub fn join_of_set(&self, s: &ElementSet) -> usize {
        s.iter().fold(self.bottom, |acc, i| self.join(acc, i))
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.top, |acc, i| self.meet(acc, i))
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items
            .into_iter()
            .fold(self.bottom, |acc, i| self.join(acc, i))
    }

    /// Every element of a finite lattice is dually compact: a filtered subset
    /// of a finite poset has a least element, which is its meet.
    pub fn dually_compact_finite(&self, _x: usize) -> bool {
        true
    }

    /// Definitional check of dual compactness: every filtered subset `F` with
    /// `⋀F <= x` has a member below `x`. Returns `None` above `cap` elements.
    pub fn audit_dually_compact(&self, x: usize, cap: usize) -> Option<bool> {
        let n = self.len();
        if n > cap || n >= 24 {
            return None;
        }
        for mask in 1u32..(1u32 << n) {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let filtered = members.iter().all(|&f| {
                members
                    .iter()
                    .all(|&g| members.iter().any(|&h| self.leq(h, f) && self.leq(h, g)))
            });
            if !filtered {
                continue;
            }
            let inf = self.meet_all(members.iter().copied());
            if self.leq(inf, x) && !members.iter().any(|&f| self.leq(f, x)) {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Join-irreducible elements: exactly one lower cover.
    pub fn join_irreducibles(&self) -> ElementSet {
        let n = self.len();
        ElementSet::from_indices(n, (0..n).filter(|&x| self.poset.lower_covers(x).len() == 1))
    }

    fn compute_distributive(&self) -> bool {
        // A finite lattice is distributive iff x -> {join-irreducibles below x}
        // turns joins into unions (meets always become intersections).
        let n = self.len();
        let irreducible = self.join_irreducibles();
        let below: Vec<ElementSet> = (0..n)
            .map(|x| self.down_set(x).intersection(&irreducible))
            .collect();
        for a in 0..n {
            for b in (a + 1)..n {
                let j = self.join(a, b);
                if below[j] != below[a].union(&below[b]) {
                    return false;
                }
            }
        }
        true
    }

    /// The sublattice on `keep`, which must contain `ε` and be closed under the
    /// meet and join tables. Returns `None` otherwise. Indices are renumbered
    /// in ascending order of the original indices.
    pub fn sublattice(&self, keep: &ElementSet) -> Option<FiniteLattice> {
        let members = keep.to_vec();
        if members.is_empty() {
            return None;
        }
        for &a in &members {
            for &b in &members {
                if !keep.contains(self.meet(a, b)) || !keep.contains(self.join(a, b)) {
                    return None;
                }
            }
        }
        let mut position = vec![usize::MAX; self.len()];
        for (k, &i) in members.iter().enumerate() {
            position[i] = k;
        }
        let poset = self.poset.restrict(keep);
        let m = members.len();
        let mut meet = vec![0u32; m * m];
        let mut join = vec![0u32; m * m];
        for (ka, &a) in members.iter().enumerate() {
            for (kb, &b) in members.iter().enumerate() {
                meet[ka * m + kb] = position[self.meet(a, b)] as u32;
                join[ka * m + kb] = position[self.join(a, b)] as u32;
            }
        }
        let bottom = members.iter().copied().reduce(|acc, i| self.meet(acc, i))?;
        let top = members.iter().copied().reduce(|acc, i| self.join(acc, i))?;
        let mut lattice = FiniteLattice {
            poset,
            meet,
            join,
            bottom: position[bottom],
            top: position[top],
            distributive: false,
        };
        lattice.distributive = lattice.compute_distributive();
        Some(lattice)
    }

    /// The interval `[a, b]` as a lattice.
    pub fn interval(&self, a: usize, b: usize) -> Option<FiniteLattice> {
        if !self.leq(a, b) {
            return None;
        }
        let keep = self.up_set(a).intersection(&self.down_set(b));
        self.sublattice(&keep)
    }

    /// First violation of the lattice axioms by the stored tables, if any.
    /// Checks idempotence, commutativity, absorption, consistency with the
    /// order, and associativity (all triples up to `triple_cap` elements).
    pub fn table_violation(&self, triple_cap: usize) -> Option<String> {
        let n = self.len();
        for a in 0..n {
            if self.meet(a, a) != a || self.join(a, a) != a {
                return Some(format!("idempotence fails at {}", self.name(a)));
            }
            for b in 0..n {
                let (m, j) = (self.meet(a, b), self.join(a, b));
                if m != self.meet(b, a) || j != self.join(b, a) {
                    return Some(format!(
                        "commutativity fails at ({}, {})",
                        self.name(a),
                        self.name(b)
                    ));
                }
                if self.join(a, m) != a || self.meet(a, j) != a {
                    return Some(format!(
                        "absorption fails at ({}, {})",
                        self.name(a),
                        self.name(b)
                    ));
                }
                if !self.leq(m, a) || !self.leq(m, b) || !self.leq(a, j) || !self.leq(b, j) {
                    return Some(format!(
                        "tables disagree with the order at ({}, {})",
                        self.name(a),
                        self.name(b)
                    ));
                }
            }
        }
        if n <= triple_cap {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if self.meet(self.meet(a, b), c) != self.meet(a, self.meet(b, c))
                            || self.join(self.join(a, b), c) != self.join(a, self.join(b, c))
                        {
                            return Some(format!(
                                "associativity fails at ({}, {}, {})",
                                self.name(a),
                                self.name(b),
                                self.name(c)
                            ));
                        }
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> FinitePoset {
        build_poset(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
            RelationMode::Covers,
        )
        .unwrap()
    }

    fn pentagon() -> FinitePoset {
        build_poset(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
            RelationMode::Covers,
        )
        .unwrap()
    }

    #[test]
    fn chain_closure_has_six_relations() {
        let p = build_poset(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "c")],
            RelationMode::Covers,
        )
        .unwrap();
        let count = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| p.leq(i, j))
            .count();
        assert_eq!(count, 6);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = build_poset(&["a", "b"], &[("a", "b"), ("b", "a")], RelationMode::Leq);
        assert!(matches!(err, Err(OrderError::CycleDetected(_, _))));
    }

    #[test]
    fn unknown_and_duplicate_names() {
        assert!(matches!(
            build_poset(&["a"], &[("a", "z")], RelationMode::Covers),
            Err(OrderError::UnknownElement(_))
        ));
        assert!(matches!(
            build_poset::<&str>(&["a", "a"], &[], RelationMode::Covers),
            Err(OrderError::DuplicateElement(_))
        ));
    }

    #[test]
    fn diamond_has_incomparable_middle() {
        let p = diamond();
        assert!(!p.leq(1, 2) && !p.leq(2, 1));
        assert!(p.leq(0, 3));
        assert_eq!(p.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn diamond_is_distributive_pentagon_is_not() {
        let m2 = as_lattice(diamond()).unwrap();
        assert!(m2.is_distributive() && m2.is_coframe());
        let n5 = as_lattice(pentagon()).unwrap();
        assert!(!n5.is_distributive());
    }

    #[test]
    fn antichain_is_not_a_lattice() {
        let p = build_poset::<&str>(&["a", "b"], &[], RelationMode::Covers).unwrap();
        assert!(matches!(as_lattice(p), Err(OrderError::NotALattice(..))));
        let empty = build_poset::<&str>(&[], &[], RelationMode::Covers).unwrap();
        assert_eq!(as_lattice(empty).unwrap_err(), OrderError::NoBottom);
    }

    #[test]
    fn down_and_up_sets() {
        let chain = as_lattice(
            build_poset(
                &["0", "1", "2"],
                &[("0", "1"), ("1", "2")],
                RelationMode::Covers,
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(chain.down_set(1).to_vec(), vec![0, 1]);
        assert_eq!(
            chain.down_set(chain.bottom()).to_vec(),
            vec![chain.bottom()]
        );
        let b2 = as_lattice(diamond()).unwrap();
        assert_eq!(b2.up_set(1).to_vec(), vec![1, 3]);
    }

    #[test]
    fn set_meets_and_joins() {
        let b2 = as_lattice(diamond()).unwrap();
        assert_eq!(b2.meet_of_set(&ElementSet::from_indices(4, [1, 2])), 0);
        assert_eq!(b2.join_of_set(&ElementSet::empty(4)), b2.bottom());
        assert_eq!(b2.meet_of_set(&ElementSet::empty(4)), b2.top());
    }

    #[test]
    fn dual_compactness_audit_agrees_with_shortcut() {
        let b2 = as_lattice(diamond()).unwrap();
        for x in 0..4 {
            assert_eq!(b2.audit_dually_compact(x, 10), Some(true));
            assert!(b2.dually_compact_finite(x));
        }
        let single =
            as_lattice(build_poset::<&str>(&["e"], &[], RelationMode::Covers).unwrap()).unwrap();
        assert_eq!(single.audit_dually_compact(0, 10), Some(true));
    }

    #[test]
    fn document_round_trip_is_stable() {
        let doc = diamond().to_document();
        let text = doc.to_canonical_json();
        let again = PosetDocument::from_json(&text)
            .unwrap()
            .build()
            .unwrap()
            .to_document();
        assert_eq!(again.to_canonical_json(), text);
        assert!(text.find("\"elements\"").unwrap() < text.find("\"mode\"").unwrap());
    }

    #[test]
    fn intervals_and_sublattices() {
        let n5 = as_lattice(pentagon()).unwrap();
        let chain = n5.interval(0, 2).unwrap();
        assert_eq!(chain.len(), 3);
        assert!(chain.is_distributive());
        // {0, a, c, 1} is closed: a ∨ c = 1, a ∧ c = 0.
        let sub = n5
            .sublattice(&ElementSet::from_indices(5, [0, 1, 3, 4]))
            .unwrap();
        assert_eq!(sub.len(), 4);
        // {0, b, c} lacks b ∨ c.
        assert!(n5
            .sublattice(&ElementSet::from_indices(5, [0, 2, 3]))
            .is_none());
    }

    #[test]
    fn table_check_catches_corruption() {
        let b2 = as_lattice(diamond()).unwrap();
        assert_eq!(b2.table_violation(64), None);
        let mut parts = b2.into_parts();
        parts.meet[4 + 2] = 1;
        let broken = FiniteLattice::from_parts_unchecked(parts);
        assert!(broken.table_violation(64).is_some());
    }
}
