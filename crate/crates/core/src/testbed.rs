//! The coframe `L_I = C^I` with `C = ℕ ∪ {∞}` ordered by reversed numeric
//! order, for `1 ≤ |I| ≤ 4`.
//!
//! `x ⊑ y` iff `x_i ≥ y_i` numerically for every `i`, so the bottom `ε` is the
//! all-`∞` vector and the top is all zeros. Meets are pointwise numeric
//! maxima and joins pointwise numeric minima. With this orientation every
//! element is the meet of the descending chain of its finite truncations,
//! and the dually compact elements are exactly the all-finite vectors. With
//! the naive orientation (`∞` on top) the finite vectors would fail to
//! approximate `∞` from above and the lattice would not be dual algebraic.
//!
//! The residual calculus has closed forms here: `M(x)` increments one finite
//! coordinate, `μ` increments all of them, the iterates drift to `ε` at stage
//! `ω`, and the residue of `x` at coordinate `j` is the vector carrying `x_j`
//! at `j` and `∞` elsewhere. Closed forms are cross-checked against a finite
//! box fragment run through the generic engine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::residual::{self, EffectiveLattice, RankValue, ResidualError, ResidualProfile, TClass};
use crate::topology::ClauseVerdict;

pub const MAX_DIMS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestbedError {
    #[error("vectors of dimension {0} and {1} cannot be compared")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} outside 1..=4")]
    BadDimension(usize),
    #[error("bound {bound} is below the required {required}")]
    BoundTooSmall { bound: u32, required: u32 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("cannot parse vector `{0}`")]
    Parse(String),
    #[error("level {0} is beyond the ladder (at most dimension + 1)")]
    LevelOutOfRange(usize),
}

/// A coordinate: a natural number or `∞`. The derived order is the numeric one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Fin(u32),
    Inf,
}

impl Coord {
    pub fn is_finite(self) -> bool {
        matches!(self, Coord::Fin(_))
    }

    fn plus(self, k: u32) -> Coord {
        match self {
            Coord::Fin(v) => Coord::Fin(v + k),
            Coord::Inf => Coord::Inf,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Fin(v) => write!(f, "{v}"),
            Coord::Inf => write!(f, "inf"),
        }
    }
}

/// An element of `L_I`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrdinalVector {
    dims: u8,
    coords: [Coord; MAX_DIMS],
}

impl OrdinalVector {
    pub fn new(coords: &[Coord]) -> Result<Self, TestbedError> {
        if coords.is_empty() || coords.len() > MAX_DIMS {
            return Err(TestbedError::BadDimension(coords.len()));
        }
        let mut padded = [Coord::Fin(0); MAX_DIMS];
        padded[..coords.len()].copy_from_slice(coords);
        Ok(OrdinalVector {
            dims: coords.len() as u8,
            coords: padded,
        })
    }

    /// Shorthand where `None` stands for `∞`.
    pub fn from_options(coords: &[Option<u32>]) -> Result<Self, TestbedError> {
        let cs: Vec<Coord> = coords
            .iter()
            .map(|c| c.map_or(Coord::Inf, Coord::Fin))
            .collect();
        Self::new(&cs)
    }

    pub fn bottom(dims: usize) -> Self {
        Self::new(&vec![Coord::Inf; dims]).expect("valid dimension")
    }

    pub fn top(dims: usize) -> Self {
        Self::new(&vec![Coord::Fin(0); dims]).expect("valid dimension")
    }

    /// `e_j(v)`: `v` at `j`, `∞` elsewhere.
    pub fn unit(dims: usize, j: usize, v: u32) -> Self {
        let mut cs = vec![Coord::Inf; dims];
        cs[j] = Coord::Fin(v);
        Self::new(&cs).expect("valid dimension")
    }

    pub fn dims(&self) -> usize {
        self.dims as usize
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords[..self.dims()]
    }

    fn with(&self, j: usize, c: Coord) -> Self {
        let mut out = *self;
        out.coords[j] = c;
        out
    }

    pub fn inf_count(&self) -> usize {
        self.coords().iter().filter(|c| !c.is_finite()).count()
    }

    pub fn max_finite(&self) -> Option<u32> {
        self.coords()
            .iter()
            .filter_map(|c| match c {
                Coord::Fin(v) => Some(*v),
                Coord::Inf => None,
            })
            .max()
    }

    /// Coordinates above `bound` clamped to `bound`.
    pub fn truncate(&self, bound: u32) -> Self {
        let mut out = *self;
        for c in out.coords[..self.dims()].iter_mut() {
            *c = match *c {
                Coord::Fin(v) => Coord::Fin(v.min(bound)),
                Coord::Inf => Coord::Fin(bound),
            };
        }
        out
    }
}

impl fmt::Debug for OrdinalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl fmt::Display for OrdinalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(Coord::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for OrdinalVector {
    type Err = TestbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = inner
            .split(',')
            .map(|part| match part.trim() {
                "inf" | "Inf" | "∞" => Ok(Coord::Inf),
                digits => digits
                    .parse()
                    .map(Coord::Fin)
                    .map_err(|_| TestbedError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&coords)
    }
}

impl Serialize for OrdinalVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OrdinalVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VecOrder {
    Below,
    Above,
    Equal,
    Incomparable,
}

fn same_dims(x: &OrdinalVector, y: &OrdinalVector) -> Result<(), TestbedError> {
    if x.dims != y.dims {
        return Err(TestbedError::DimensionMismatch(x.dims(), y.dims()));
    }
    Ok(())
}

fn leq(x: &OrdinalVector, y: &OrdinalVector) -> bool {
    x.coords().iter().zip(y.coords()).all(|(a, b)| a >= b)
}

pub fn vec_order(x: &OrdinalVector, y: &OrdinalVector) -> Result<VecOrder, TestbedError> {
    same_dims(x, y)?;
    Ok(match (leq(x, y), leq(y, x)) {
        (true, true) => VecOrder::Equal,
        (true, false) => VecOrder::Below,
        (false, true) => VecOrder::Above,
        (false, false) => VecOrder::Incomparable,
    })
}

fn pointwise(x: &OrdinalVector, y: &OrdinalVector, f: fn(Coord, Coord) -> Coord) -> OrdinalVector {
    let mut out = *x;
    for j in 0..x.dims() {
        out.coords[j] = f(x.coords[j], y.coords[j]);
    }
    out
}

pub fn vec_meet(x: &OrdinalVector, y: &OrdinalVector) -> Result<OrdinalVector, TestbedError> {
    same_dims(x, y)?;
    Ok(pointwise(x, y, Coord::max))
}

pub fn vec_join(x: &OrdinalVector, y: &OrdinalVector) -> Result<OrdinalVector, TestbedError> {
    same_dims(x, y)?;
    Ok(pointwise(x, y, Coord::min))
}

/// Dually compact iff every coordinate is finite.
pub fn dually_compact(x: &OrdinalVector) -> bool {
    x.inf_count() == 0
}

/// For a vector with an `∞` coordinate, the first `count` members of the
/// descending chain of finite truncations: filtered, with meet `x`, and no
/// member below `x`. `None` for dually compact vectors.
pub fn noncompactness_witness(x: &OrdinalVector, count: u32) -> Option<Vec<OrdinalVector>> {
    if dually_compact(x) {
        return None;
    }
    Some(
        (0..count)
            .map(|k| {
                let mut out = *x;
                for c in out.coords[..x.dims()].iter_mut() {
                    if *c == Coord::Inf {
                        *c = Coord::Fin(k);
                    }
                }
                out
            })
            .collect(),
    )
}

/// `M(x)`: one finite coordinate incremented, in coordinate order.
pub fn testbed_maximal_subelements(x: &OrdinalVector) -> Vec<OrdinalVector> {
    let mut out: Vec<OrdinalVector> = (0..x.dims())
        .filter(|&j| x.coords[j].is_finite())
        .map(|j| x.with(j, x.coords[j].plus(1)))
        .collect();
    out.sort();
    out
}

/// `x^(k)`: every finite coordinate increased by `k`.
pub fn iterate(x: &OrdinalVector, k: u32) -> OrdinalVector {
    let mut out = *x;
    for c in out.coords[..x.dims()].iter_mut() {
        *c = c.plus(k);
    }
    out
}

/// `x − z`: keeps `x_i` where `z_i ≠ x_i`, `∞` elsewhere.
pub fn testbed_sub(x: &OrdinalVector, z: &OrdinalVector) -> Result<OrdinalVector, TestbedError> {
    same_dims(x, z)?;
    if !leq(z, x) {
        return Err(TestbedError::PreconditionFailed(format!(
            "{z} is not below {x}"
        )));
    }
    let mut out = *x;
    for j in 0..x.dims() {
        if z.coords[j] == x.coords[j] {
            out.coords[j] = Coord::Inf;
        }
    }
    Ok(out)
}

pub fn rank(x: &OrdinalVector) -> RankValue {
    if x.inf_count() < x.dims() {
        RankValue::Omega
    } else {
        RankValue::Finite(0)
    }
}

/// The lattice `L_I` with closed-form answers. Enumerations that the generic
/// calculus needs (`strictly_below`) are restricted to the box with finite
/// coordinates `≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Testbed {
    pub dims: usize,
    pub bound: u32,
}

impl Testbed {
    pub fn new(dims: usize, bound: u32) -> Result<Self, TestbedError> {
        if dims == 0 || dims > MAX_DIMS {
            return Err(TestbedError::BadDimension(dims));
        }
        Ok(Testbed { dims, bound })
    }

    /// Vectors with finite coordinates `≤ max_fin`, plus `∞` when `with_inf`.
    pub fn box_vectors(&self, max_fin: u32, with_inf: bool) -> Vec<OrdinalVector> {
        box_vectors(self.dims, max_fin, with_inf)
    }

    pub fn parse(&self, text: &str) -> Result<OrdinalVector, TestbedError> {
        let v: OrdinalVector = text.parse()?;
        if v.dims() != self.dims {
            return Err(TestbedError::DimensionMismatch(v.dims(), self.dims));
        }
        Ok(v)
    }
}

pub fn box_vectors(dims: usize, max_fin: u32, with_inf: bool) -> Vec<OrdinalVector> {
    let mut values: Vec<Coord> = (0..=max_fin).map(Coord::Fin).collect();
    if with_inf {
        values.push(Coord::Inf);
    }
    let mut out = vec![Vec::new()];
    for _ in 0..dims {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Coord>| {
                values.iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|cs| OrdinalVector::new(&cs).expect("valid dimension"))
        .collect()
}

impl EffectiveLattice for Testbed {
    type Elem = OrdinalVector;

    fn leq(&self, a: OrdinalVector, b: OrdinalVector) -> bool {
        leq(&a, &b)
    }

    fn meet(&self, a: OrdinalVector, b: OrdinalVector) -> OrdinalVector {
        pointwise(&a, &b, Coord::max)
    }

    fn join(&self, a: OrdinalVector, b: OrdinalVector) -> OrdinalVector {
        pointwise(&a, &b, Coord::min)
    }

    fn bottom(&self) -> OrdinalVector {
        OrdinalVector::bottom(self.dims)
    }

    fn top(&self) -> Option<OrdinalVector> {
        Some(OrdinalVector::top(self.dims))
    }

    fn strictly_below(&self, x: OrdinalVector) -> Vec<OrdinalVector> {
        self.box_vectors(self.bound, true)
            .into_iter()
            .filter(|z| *z != x && leq(z, &x))
            .collect()
    }

    fn is_coframe(&self) -> bool {
        true
    }

    fn is_dually_compact(&self, x: OrdinalVector) -> bool {
        dually_compact(&x)
    }

    fn label(&self, x: OrdinalVector) -> String {
        x.to_string()
    }

    fn elements(&self) -> Option<Vec<OrdinalVector>> {
        None
    }

    fn maximal_subelements(&self, x: OrdinalVector) -> Vec<OrdinalVector> {
        testbed_maximal_subelements(&x)
    }

    fn co_heyting_sub(
        &self,
        x: OrdinalVector,
        z: OrdinalVector,
    ) -> Result<OrdinalVector, ResidualError> {
        testbed_sub(&x, &z).map_err(|_| ResidualError::NotBelow {
            minuend: x.to_string(),
            subtrahend: z.to_string(),
        })
    }
}

/// The finite sublattice of vectors with finite coordinates `≤ bound` and
/// `∞`, answered purely by enumeration. In this box `bound` is covered by
/// `∞`, so it agrees with [`Testbed`] on vectors whose finite coordinates
/// stay below `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestbedFragment {
    pub dims: usize,
    pub bound: u32,
}

impl EffectiveLattice for TestbedFragment {
    type Elem = OrdinalVector;

    fn leq(&self, a: OrdinalVector, b: OrdinalVector) -> bool {
        leq(&a, &b)
    }

    fn meet(&self, a: OrdinalVector, b: OrdinalVector) -> OrdinalVector {
        pointwise(&a, &b, Coord::max)
    }

    fn join(&self, a: OrdinalVector, b: OrdinalVector) -> OrdinalVector {
        pointwise(&a, &b, Coord::min)
    }

    fn bottom(&self) -> OrdinalVector {
        OrdinalVector::bottom(self.dims)
    }

    fn top(&self) -> Option<OrdinalVector> {
        Some(OrdinalVector::top(self.dims))
    }

    fn strictly_below(&self, x: OrdinalVector) -> Vec<OrdinalVector> {
        box_vectors(self.dims, self.bound, true)
            .into_iter()
            .filter(|z| *z != x && leq(z, &x))
            .collect()
    }

    fn is_coframe(&self) -> bool {
        true
    }

    fn is_dually_compact(&self, _x: OrdinalVector) -> bool {
        true
    }

    fn label(&self, x: OrdinalVector) -> String {
        x.to_string()
    }

    fn elements(&self) -> Option<Vec<OrdinalVector>> {
        Some(box_vectors(self.dims, self.bound, true))
    }

    fn iteration_limit(&self) -> usize {
        self.dims * (self.bound as usize + 2) + 1
    }
}

/// One coordinate constraint of a [`DefinablePattern`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoordPattern {
    IsInf,
    Eq(u32),
    FinAtLeast(u32),
    AnyFin,
    Any,
}

impl CoordPattern {
    pub fn matches(self, c: Coord) -> bool {
        match (self, c) {
            (CoordPattern::IsInf, c) => c == Coord::Inf,
            (CoordPattern::Eq(k), c) => c == Coord::Fin(k),
            (CoordPattern::FinAtLeast(k), Coord::Fin(v)) => v >= k,
            (CoordPattern::AnyFin, c) => c.is_finite(),
            (CoordPattern::Any, _) => true,
            (CoordPattern::FinAtLeast(_), Coord::Inf) => false,
        }
    }
}

impl fmt::Display for CoordPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordPattern::IsInf => write!(f, "inf"),
            CoordPattern::Eq(k) => write!(f, "{k}"),
            CoordPattern::FinAtLeast(k) => write!(f, ">={k}"),
            CoordPattern::AnyFin => write!(f, "fin"),
            CoordPattern::Any => write!(f, "*"),
        }
    }
}

/// A product of coordinate constraints, denoting a subset of `L_I`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefinablePattern(pub Vec<CoordPattern>);

impl DefinablePattern {
    pub fn contains(&self, x: &OrdinalVector) -> bool {
        self.0.len() == x.dims() && self.0.iter().zip(x.coords()).all(|(p, &c)| p.matches(c))
    }
}

impl fmt::Display for DefinablePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(CoordPattern::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for DefinablePattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

pub fn in_union(patterns: &[DefinablePattern], x: &OrdinalVector) -> bool {
    patterns.iter().any(|p| p.contains(x))
}

/// Closed-form profile with strata truncated to `depth` layers, plus the full
/// boundary poset as patterns (one `FinAtLeast(x_j)` ray per finite `j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestbedProfile {
    pub profile: ResidualProfile<OrdinalVector>,
    pub depth: usize,
    pub delta: Vec<DefinablePattern>,
}

impl TestbedProfile {
    pub fn to_json(&self) -> Value {
        let mut v = self.profile.to_json(|e| e.to_string());
        v["depth"] = json!(self.depth);
        v["delta_patterns"] = json!(self.delta);
        v
    }
}

pub fn testbed_profile(x: &OrdinalVector, depth: usize) -> TestbedProfile {
    let dims = x.dims();
    let maximal = testbed_maximal_subelements(x);
    let rank = rank(x);
    let finite: Vec<usize> = (0..dims).filter(|&j| x.coords[j].is_finite()).collect();
    let layers = match rank {
        RankValue::Finite(k) => k.min(depth),
        RankValue::Omega => depth,
    };
    let iterates = (0..=layers as u32).map(|k| iterate(x, k)).collect();
    let residues = maximal
        .iter()
        .map(|m| {
            (
                *m,
                testbed_sub(x, m).expect("maximal subelements lie below"),
            )
        })
        .collect();
    let mut strata = Vec::with_capacity(layers);
    let mut rho = BTreeMap::new();
    for k in 0..layers as u32 {
        let mut stratum: Vec<OrdinalVector> = finite
            .iter()
            .map(|&j| match x.coords[j] {
                Coord::Fin(v) => OrdinalVector::unit(dims, j, v + k),
                Coord::Inf => unreachable!("finite coordinates only"),
            })
            .collect();
        stratum.sort();
        for s in &stratum {
            rho.insert(*s, k as usize);
        }
        strata.push(stratum);
    }
    let delta = finite
        .iter()
        .map(|&j| {
            let mut p = vec![CoordPattern::IsInf; dims];
            if let Coord::Fin(v) = x.coords[j] {
                p[j] = CoordPattern::FinAtLeast(v);
            }
            DefinablePattern(p)
        })
        .collect();
    let mu = iterate(x, 1);
    TestbedProfile {
        profile: ResidualProfile {
            element: *x,
            t_class: TClass::Finite(maximal.len()),
            maximal,
            mu,
            rank,
            core: OrdinalVector::bottom(dims),
            iterates,
            residues,
            boundary: *x,
            boundary_poset: rho.keys().copied().collect(),
            strata,
            rho,
        },
        depth,
        delta,
    }
}

/// `∂x < x`, which on this lattice never happens.
pub fn has_outcast(x: &OrdinalVector) -> bool {
    let residues: Vec<OrdinalVector> = testbed_maximal_subelements(x)
        .iter()
        .map(|m| testbed_sub(x, m).expect("below"))
        .collect();
    let boundary = residues
        .iter()
        .fold(OrdinalVector::bottom(x.dims()), |acc, r| {
            pointwise(&acc, r, Coord::min)
        });
    boundary != *x && leq(&boundary, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Characterization {
    /// No outcast and finitely many maximal subelements.
    pub literal: bool,
    /// Dually compact, no outcast and finitely many maximal subelements.
    pub corrected: bool,
}

pub fn characterization_predicates(x: &OrdinalVector) -> Characterization {
    // M(x) has at most |I| members, so its finiteness is automatic.
    let literal = !has_outcast(x);
    Characterization {
        literal,
        corrected: literal && dually_compact(x),
    }
}

/// A separating basic open `↓k ∩ ⋂ (↓k'_i)^c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsolationWitness {
    pub down_of: OrdinalVector,
    pub excluded: Vec<OrdinalVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolationVerdict {
    Isolated(IsolationWitness),
    NotIsolated,
    /// Verdicts differed between the bound and its three successors.
    Unstable,
}

impl IsolationVerdict {
    pub fn is_isolated(&self) -> bool {
        matches!(self, IsolationVerdict::Isolated(_))
    }
}

/// Points of the representative box `{0..=bound+1, ∞}^I` lying in the least
/// basic open around `x` whose parameters have coordinates `≤ bound`,
/// intersected with `within` when given.
///
/// Basic opens with parameters `≤ bound` cannot tell apart coordinate values
/// above `bound`, so `bound + 1` and `∞` stand for every such value.
fn basic_neighbourhood(
    x: &OrdinalVector,
    bound: u32,
    within: Option<&[DefinablePattern]>,
) -> (OrdinalVector, Vec<OrdinalVector>, Vec<OrdinalVector>) {
    let dims = x.dims();
    let k = x.truncate(bound);
    let params = box_vectors(dims, bound, false);
    let excluded: Vec<OrdinalVector> = params.into_iter().filter(|kp| !leq(x, kp)).collect();
    let members = box_vectors(dims, bound + 1, true)
        .into_iter()
        .filter(|y| leq(y, &k))
        .filter(|y| excluded.iter().all(|kp| !leq(y, kp)))
        .filter(|y| within.is_none_or(|s| in_union(s, y)))
        .collect();
    (k, excluded, members)
}

fn isolated_at(
    x: &OrdinalVector,
    bound: u32,
    within: Option<&[DefinablePattern]>,
) -> Option<IsolationWitness> {
    let (k, excluded, members) = basic_neighbourhood(x, bound, within);
    if members != [*x] {
        return None;
    }
    // Prefer the short witness ↓k ∩ ⋂_{m ∈ M(x)} (↓m)^c when it suffices.
    let short: Vec<OrdinalVector> = testbed_maximal_subelements(x)
        .into_iter()
        .filter(|m| m.max_finite().is_none_or(|v| v <= bound) && dually_compact(m))
        .collect();
    let short_works = box_vectors(x.dims(), bound + 1, true)
        .into_iter()
        .filter(|y| leq(y, &k) && short.iter().all(|m| !leq(y, m)))
        .filter(|y| within.is_none_or(|s| in_union(s, y)))
        .eq([*x]);
    Some(IsolationWitness {
        down_of: k,
        excluded: if short_works { short } else { excluded },
    })
}

fn stable_verdict(
    x: &OrdinalVector,
    bound: u32,
    within: Option<&[DefinablePattern]>,
) -> IsolationVerdict {
    let verdicts: Vec<Option<IsolationWitness>> = (bound..=bound + 3)
        .map(|b| isolated_at(x, b, within))
        .collect();
    let first = verdicts[0].is_some();
    if verdicts.iter().any(|v| v.is_some() != first) {
        return IsolationVerdict::Unstable;
    }
    match verdicts.into_iter().next().flatten() {
        Some(w) => IsolationVerdict::Isolated(w),
        None => IsolationVerdict::NotIsolated,
    }
}

fn check_bound(x: &OrdinalVector, bound: u32) -> Result<(), TestbedError> {
    let required = x.max_finite().map_or(2, |v| v + 2);
    if bound < required {
        return Err(TestbedError::BoundTooSmall { bound, required });
    }
    Ok(())
}

/// Decides topological isolation of `x` in the dual Lawson topology by
/// searching basic opens with parameters `≤ bound`, then re-checking at
/// `bound + 1 ..= bound + 3`.
pub fn isolated_oracle(x: &OrdinalVector, bound: u32) -> Result<IsolationVerdict, TestbedError> {
    check_bound(x, bound)?;
    Ok(stable_verdict(x, bound, None))
}

/// Isolation of `x` inside the subspace given by a union of patterns.
pub fn subspace_isolated_oracle(
    x: &OrdinalVector,
    subspace: &[DefinablePattern],
    bound: u32,
) -> Result<IsolationVerdict, TestbedError> {
    check_bound(x, bound)?;
    if !in_union(subspace, x) {
        return Err(TestbedError::PreconditionFailed(format!(
            "{x} is not in the subspace"
        )));
    }
    Ok(stable_verdict(x, bound, Some(subspace)))
}

/// Number of `∞` coordinates: the greatest `α` with `x ∈ S_α`.
pub fn cb_level(x: &OrdinalVector) -> usize {
    x.inf_count()
}

/// `S_α` as a union of patterns: at least `α` coordinates are `∞`. Empty for
/// `α = |I| + 1`.
pub fn cb_level_pattern(dims: usize, alpha: usize) -> Result<Vec<DefinablePattern>, TestbedError> {
    if dims == 0 || dims > MAX_DIMS {
        return Err(TestbedError::BadDimension(dims));
    }
    if alpha > dims + 1 {
        return Err(TestbedError::LevelOutOfRange(alpha));
    }
    if alpha == dims + 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << dims) {
        if mask.count_ones() as usize == alpha {
            out.push(DefinablePattern(
                (0..dims)
                    .map(|j| {
                        if mask >> j & 1 == 1 {
                            CoordPattern::IsInf
                        } else {
                            CoordPattern::Any
                        }
                    })
                    .collect(),
            ));
        }
    }
    Ok(out)
}

/// Checks each pattern level against the subspace isolation oracle: within
/// `S_α`, exactly the members outside `S_{α+1}` are isolated. Candidates are
/// the vectors with finite coordinates `≤ bound − 2` and `∞`. Returns the
/// mismatching `(α, x)` pairs.
pub fn verify_cb_ladder(
    dims: usize,
    bound: u32,
) -> Result<Vec<(usize, OrdinalVector)>, TestbedError> {
    if bound < 2 {
        return Err(TestbedError::BoundTooSmall { bound, required: 2 });
    }
    let candidates = box_vectors(dims, bound - 2, true);
    let mut mismatches = Vec::new();
    for alpha in 0..=dims {
        let level = cb_level_pattern(dims, alpha)?;
        let next = cb_level_pattern(dims, alpha + 1)?;
        let found: Vec<(usize, OrdinalVector)> = candidates
            .par_iter()
            .filter(|x| in_union(&level, x))
            .filter_map(|x| {
                let verdict = subspace_isolated_oracle(x, &level, bound).ok()?;
                let expected_isolated = !in_union(&next, x);
                match verdict {
                    IsolationVerdict::Isolated(_) if expected_isolated => None,
                    IsolationVerdict::NotIsolated if !expected_isolated => None,
                    _ => Some((alpha, *x)),
                }
            })
            .collect();
        mismatches.extend(found);
    }
    Ok(mismatches)
}

/// Verdicts for the isolation-from-above clauses on a pair `(x, z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AboveReport {
    pub clauses: Vec<ClauseVerdict>,
    pub relative_rank: String,
    pub relative_strata: Vec<Vec<OrdinalVector>>,
    pub converse_checked: usize,
    pub converse_failures: Vec<OrdinalVector>,
}

impl AboveReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.holds) && self.converse_failures.is_empty()
    }
}

fn clause(name: &str, holds: bool, note: impl Into<String>) -> ClauseVerdict {
    ClauseVerdict {
        clause: name.to_string(),
        holds,
        note: note.into(),
    }
}

/// Evaluates clauses (i)–(vi) of isolation from above for `x ∈ S_1 ∖ S_2`
/// and a dually compact `z` with `x < z`, inspecting relative strata up to
/// index `bound`. The converse check verifies that every `y` with
/// `x < y ⊑ z` and finite coordinates `≤ bound` is isolated.
pub fn check_s1s2_above(
    x: &OrdinalVector,
    z: &OrdinalVector,
    bound: u32,
) -> Result<AboveReport, TestbedError> {
    same_dims(x, z)?;
    if cb_level(x) != 1 {
        return Err(TestbedError::PreconditionFailed(format!(
            "{x} is not in S_1 ∖ S_2"
        )));
    }
    if !dually_compact(z) {
        return Err(TestbedError::PreconditionFailed(format!(
            "{z} is not dually compact"
        )));
    }
    if !(leq(x, z) && x != z) {
        return Err(TestbedError::PreconditionFailed(format!(
            "{x} is not strictly below {z}"
        )));
    }
    let dims = x.dims();
    let tb = Testbed::new(dims, bound)?;
    let span = bound as usize + z.max_finite().unwrap_or(0) as usize + 2;
    let zp = testbed_profile(z, 2 * span);
    let rel = residual::relative_from_strata(&tb, *x, &zp.profile.strata, zp.profile.rank);
    let inspected = &rel.strata[..=bound as usize];
    let mut clauses = Vec::new();

    let mz = testbed_maximal_subelements(z).len();
    let widest = rel.strata.iter().map(Vec::len).max().unwrap_or(0);
    clauses.push(clause(
        "(i)",
        mz <= dims && widest <= dims,
        format!("|M(z)| = {mz}, widest relative stratum has {widest} members"),
    ));
    let cx = testbed_profile(x, 0).profile.core;
    let cz = zp.profile.core;
    clauses.push(clause(
        "(ii)",
        cx == cz,
        format!("c(x) = {cx}, c(z) = {cz}"),
    ));
    let relative_rank = rel.rank;
    clauses.push(clause(
        "(iii)",
        relative_rank == RankValue::Omega,
        format!(
            "relative strata nonempty up to index {}",
            rel.strata.len() - 1
        ),
    ));
    let dominated = (0..=bound as usize).all(|k| {
        (k + 1..rel.strata.len()).any(|l| {
            rel.strata[l]
                .iter()
                .all(|t| rel.strata[k].iter().all(|s| leq(t, s)))
        })
    });
    clauses.push(clause(
        "(iv)",
        dominated,
        format!("checked for k ≤ {bound}"),
    ));
    let outcast = has_outcast(x);
    let boundary = testbed_profile(x, 0).profile.boundary;
    let v_holds = !outcast
        || rel
            .delta
            .iter()
            .all(|s| leq(&cx, &pointwise(s, &boundary, Coord::min)));
    clauses.push(clause(
        "(v)",
        v_holds,
        if outcast {
            "x has an outcast"
        } else {
            "x has no outcast"
        },
    ));
    let uniform = rel.delta.iter().all(|s| !leq(x, s)) || rel.delta.iter().all(|s| leq(x, s));
    clauses.push(clause(
        "(vi)",
        uniform,
        "uniform side over the inspected strata",
    ));

    let ys: Vec<OrdinalVector> = box_vectors(dims, bound, true)
        .into_iter()
        .filter(|y| y != x && leq(x, y) && leq(y, z))
        .collect();
    let converse_failures: Vec<OrdinalVector> = ys
        .par_iter()
        .filter(|y| {
            let b = bound.max(y.max_finite().unwrap_or(0) + 2);
            !isolated_oracle(y, b)
                .map(|v| v.is_isolated())
                .unwrap_or(false)
        })
        .copied()
        .collect();
    Ok(AboveReport {
        clauses,
        relative_rank: relative_rank.to_string(),
        relative_strata: inspected.to_vec(),
        converse_checked: ys.len(),
        converse_failures,
    })
}

/// Searches for a basic open around `x ∈ S_1 ∖ S_2` on which the core is
/// constant outside `↓x`, sampling members with coordinates `≤ bound`.
pub fn check_locally_constant_core(x: &OrdinalVector, bound: u32) -> Result<bool, TestbedError> {
    if cb_level(x) != 1 {
        return Err(TestbedError::PreconditionFailed(format!(
            "{x} is not in S_1 ∖ S_2"
        )));
    }
    check_bound(x, bound)?;
    let (_, _, members) = basic_neighbourhood(x, bound, None);
    let cx = testbed_profile(x, 0).profile.core;
    Ok(members
        .iter()
        .filter(|z| !leq(z, x))
        .all(|z| testbed_profile(z, 0).profile.core == cx))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BelowReport {
    Vacuous(String),
    Clauses(Vec<ClauseVerdict>),
}

/// Isolation-from-below clauses on `L_I`, where `T_0 = {ε}`. For `|I| ≥ 2`
/// the bottom lies in `S_{|I|}` with `|I| ≥ 2`, so the hypothesis set is
/// empty; for `|I| = 1` the bottom is in `S_1 ∖ S_2` and every clause is
/// evaluated.
pub fn check_isolated_below_conditions(x: &OrdinalVector) -> Result<BelowReport, TestbedError> {
    let dims = x.dims();
    let eps = OrdinalVector::bottom(dims);
    if *x != eps {
        return Err(TestbedError::PreconditionFailed(format!(
            "{x} is not in T_0"
        )));
    }
    if cb_level(x) != 1 {
        return Ok(BelowReport::Vacuous(format!(
            "the only T_0 element lies in S_{dims}, not in S_1 ∖ S_2"
        )));
    }
    // Nothing lies strictly below ε, so M_T0(ε) and δx are empty and the
    // net h is constantly ε.
    let below_x: Vec<OrdinalVector> = Vec::new();
    let m_t0 = below_x.len();
    let h_star = eps;
    let isolated = isolated_oracle(&h_star, 2)?.is_isolated();
    Ok(BelowReport::Clauses(vec![
        clause(
            "unique T0-maximal",
            m_t0 == 1,
            format!("|M_T0(x)| = {m_t0}"),
        ),
        clause("no T0-outcast", true, "nothing lies below x"),
        clause(
            "(i)",
            leq(&h_star, x) && h_star != *x,
            "h_P = ε for the only P",
        ),
        clause("(ii)", true, "no z < x"),
        clause("(iii)", isolated, "h_P* = ε"),
        clause("(iv)", dually_compact(&h_star), "h_P* = ε"),
        clause("(v)", true, "single P"),
        clause("(vi)", true, "δx is empty"),
        clause("(vii)", true, "δx is empty"),
    ]))
}

/// Comparison of both characterization predicates with [`isolated_oracle`]
/// over the vectors with coordinates in `{0..=bound, ∞}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterizationSweep {
    pub dims: usize,
    pub bound: u32,
    pub checked: usize,
    /// Vectors where the corrected predicate and the oracle disagree.
    pub corrected_mismatches: Vec<OrdinalVector>,
    /// Vectors where the literal predicate and the oracle disagree.
    pub literal_disagreements: Vec<OrdinalVector>,
    pub unstable: Vec<OrdinalVector>,
}

impl CharacterizationSweep {
    pub fn corrected_matches(&self) -> bool {
        self.corrected_mismatches.is_empty() && self.unstable.is_empty()
    }
}

/// Runs the oracle on every vector of the box; each vector is searched with
/// bound `max(bound, max finite coordinate + 2)`.
pub fn characterization_sweep(
    dims: usize,
    bound: u32,
) -> Result<CharacterizationSweep, TestbedError> {
    Testbed::new(dims, bound)?;
    let candidates = box_vectors(dims, bound, true);
    let rows: Vec<(OrdinalVector, Characterization, IsolationVerdict)> = candidates
        .par_iter()
        .map(|x| {
            let b = bound.max(x.max_finite().map_or(2, |v| v + 2));
            let verdict = isolated_oracle(x, b).expect("bound satisfies the precondition");
            (*x, characterization_predicates(x), verdict)
        })
        .collect();
    let mut sweep = CharacterizationSweep {
        dims,
        bound,
        checked: rows.len(),
        corrected_mismatches: Vec::new(),
        literal_disagreements: Vec::new(),
        unstable: Vec::new(),
    };
    for (x, c, verdict) in rows {
        if verdict == IsolationVerdict::Unstable {
            sweep.unstable.push(x);
            continue;
        }
        let isolated = verdict.is_isolated();
        if c.corrected != isolated {
            sweep.corrected_mismatches.push(x);
        }
        if c.literal != isolated {
            sweep.literal_disagreements.push(x);
        }
    }
    Ok(sweep)
}

/// The set of vectors where the literal and corrected predicates disagree
/// among `candidates`.
pub fn characterization_disagreements(candidates: &[OrdinalVector]) -> BTreeSet<OrdinalVector> {
    candidates
        .iter()
        .filter(|x| {
            let c = characterization_predicates(x);
            c.literal != c.corrected
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::{compute_profile, Family};

    fn v(text: &str) -> OrdinalVector {
        text.parse().unwrap()
    }

    #[test]
    fn order_meet_join() {
        assert_eq!(vec_order(&v("3,inf"), &v("1,0")).unwrap(), VecOrder::Below);
        assert_eq!(vec_meet(&v("2,5"), &v("4,1")).unwrap(), v("4,5"));
        assert_eq!(
            vec_join(&v("2,5"), &OrdinalVector::bottom(2)).unwrap(),
            v("2,5")
        );
        assert!(matches!(
            vec_order(&v("1"), &v("1,2")),
            Err(TestbedError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(v("(3,inf)").to_string(), "3,inf");
        assert!("3,x".parse::<OrdinalVector>().is_err());
        assert!("1,2,3,4,5".parse::<OrdinalVector>().is_err());
    }

    #[test]
    fn compactness_and_witness() {
        assert!(dually_compact(&v("5,0")));
        let w = noncompactness_witness(&v("inf,0"), 5).unwrap();
        assert_eq!(w[3], v("3,0"));
        for pair in w.windows(2) {
            assert!(leq(&pair[1], &pair[0]));
        }
        assert!(w.iter().all(|f| !leq(f, &v("inf,0"))));
        assert!(!dually_compact(&OrdinalVector::bottom(3)));
    }

    #[test]
    fn maximal_subelements_closed_form() {
        assert_eq!(testbed_maximal_subelements(&v("3,inf")), vec![v("4,inf")]);
        let mut expected = vec![v("3,3"), v("2,4")];
        expected.sort();
        assert_eq!(testbed_maximal_subelements(&v("2,3")), expected);
        assert!(testbed_maximal_subelements(&OrdinalVector::bottom(2)).is_empty());
    }

    #[test]
    fn closed_forms_agree_with_fragment() {
        let fragment = TestbedFragment { dims: 2, bound: 7 };
        let tb = Testbed::new(2, 7).unwrap();
        for x in box_vectors(2, 5, true) {
            assert_eq!(
                EffectiveLattice::maximal_subelements(&fragment, x),
                testbed_maximal_subelements(&x),
                "{x}"
            );
            for z in fragment.strictly_below(x) {
                if z.max_finite().is_none_or(|m| m <= 5) {
                    assert_eq!(fragment.co_heyting_sub(x, z), tb.co_heyting_sub(x, z));
                }
            }
        }
    }

    #[test]
    fn profile_of_a_single_coordinate() {
        let p = testbed_profile(&v("3"), 20);
        assert_eq!(p.profile.rank, RankValue::Omega);
        assert_eq!(p.profile.core, v("inf"));
        for k in 0..20 {
            assert_eq!(
                p.profile.strata[k],
                vec![OrdinalVector::unit(1, 0, 3 + k as u32)]
            );
        }
        assert_eq!(p.delta[0].to_string(), "[>=3]");
    }

    #[test]
    fn profile_of_a_pair() {
        let p = testbed_profile(&v("2,3"), 4);
        let mut residues: Vec<OrdinalVector> = p.profile.residues.iter().map(|r| r.1).collect();
        residues.sort();
        let mut expected = vec![v("2,inf"), v("inf,3")];
        expected.sort();
        assert_eq!(residues, expected);
        assert_eq!(p.profile.boundary, v("2,3"));
        assert!(!has_outcast(&v("2,3")));
    }

    #[test]
    fn bottom_profile() {
        let p = testbed_profile(&OrdinalVector::bottom(2), 5);
        assert_eq!(p.profile.rank, RankValue::Finite(0));
        assert!(p.profile.strata.is_empty() && p.delta.is_empty());
    }

    #[test]
    fn iterates_match_generic_engine_on_fragment() {
        let fragment = TestbedFragment { dims: 2, bound: 30 };
        let x = v("2,inf");
        let generic = compute_profile(&fragment, x, &Family::All).unwrap();
        let closed = testbed_profile(&x, 20);
        assert_eq!(&generic.iterates[..=20], &closed.profile.iterates[..]);
        assert_eq!(&generic.strata[..20], &closed.profile.strata[..]);
    }

    #[test]
    fn isolation_examples() {
        let verdict = isolated_oracle(&v("2,3"), 6).unwrap();
        match verdict {
            IsolationVerdict::Isolated(w) => {
                assert_eq!(w.down_of, v("2,3"));
                let mut expected = vec![v("3,3"), v("2,4")];
                expected.sort();
                assert_eq!(w.excluded, expected);
            }
            other => panic!("expected isolation, got {other:?}"),
        }
        assert_eq!(
            isolated_oracle(&v("inf,0"), 6).unwrap(),
            IsolationVerdict::NotIsolated
        );
        assert_eq!(
            isolated_oracle(&OrdinalVector::bottom(2), 4).unwrap(),
            IsolationVerdict::NotIsolated
        );
        assert!(matches!(
            isolated_oracle(&v("5,0"), 6),
            Err(TestbedError::BoundTooSmall { .. })
        ));
    }

    #[test]
    fn predicates_examples() {
        assert_eq!(
            characterization_predicates(&v("2,3")),
            Characterization {
                literal: true,
                corrected: true
            }
        );
        assert_eq!(
            characterization_predicates(&v("inf,0")),
            Characterization {
                literal: true,
                corrected: false
            }
        );
        assert_eq!(
            characterization_predicates(&OrdinalVector::bottom(2)),
            Characterization {
                literal: true,
                corrected: false
            }
        );
    }

    #[test]
    fn cb_levels() {
        assert_eq!(cb_level(&v("5,1")), 0);
        assert_eq!(cb_level(&v("inf,7")), 1);
        assert_eq!(cb_level(&OrdinalVector::bottom(2)), 2);
        assert!(cb_level_pattern(2, 3).unwrap().is_empty());
        assert_eq!(cb_level_pattern(2, 0).unwrap().len(), 1);
        assert!(cb_level_pattern(2, 4).is_err());
        let s1 = cb_level_pattern(2, 1).unwrap();
        match subspace_isolated_oracle(&v("inf,0"), &s1, 8).unwrap() {
            IsolationVerdict::Isolated(_) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn named_subspace_witness_separates() {
        // ↓(5,0) ∩ (↓(0,1))^c meets S_1 only in (inf,0).
        let s1 = cb_level_pattern(2, 1).unwrap();
        let members: Vec<OrdinalVector> = box_vectors(2, 9, true)
            .into_iter()
            .filter(|y| leq(y, &v("5,0")) && !leq(y, &v("0,1")) && in_union(&s1, y))
            .collect();
        assert_eq!(members, vec![v("inf,0")]);
    }

    #[test]
    fn above_example() {
        let report = check_s1s2_above(&v("inf,0"), &v("0,0"), 8).unwrap();
        assert!(report.all_pass(), "{report:?}");
        for (k, s) in report.relative_strata.iter().enumerate() {
            assert_eq!(s, &vec![OrdinalVector::unit(2, 0, k as u32)]);
        }
        assert!(check_s1s2_above(&v("inf,0"), &v("inf,0"), 8).is_err());
        assert!(check_s1s2_above(&v("2,3"), &v("0,0"), 8).is_err());
    }

    #[test]
    fn locally_constant_core() {
        assert!(check_locally_constant_core(&v("inf,0"), 8).unwrap());
    }

    #[test]
    fn below_conditions() {
        assert!(matches!(
            check_isolated_below_conditions(&OrdinalVector::bottom(2)).unwrap(),
            BelowReport::Vacuous(_)
        ));
        match check_isolated_below_conditions(&OrdinalVector::bottom(1)).unwrap() {
            BelowReport::Clauses(c) => assert_eq!(c.len(), 9),
            other => panic!("{other:?}"),
        }
        assert!(check_isolated_below_conditions(&v("1,inf")).is_err());
    }

    #[test]
    fn sweep_in_two_dimensions() {
        let sweep = characterization_sweep(2, 4).unwrap();
        assert_eq!(sweep.checked, 36);
        assert!(sweep.corrected_matches(), "{sweep:?}");
        let expected: Vec<OrdinalVector> = box_vectors(2, 4, true)
            .into_iter()
            .filter(|x| x.inf_count() > 0)
            .collect();
        assert_eq!(sweep.literal_disagreements, expected);
    }
}
