//! Example lattices: chains, Boolean algebras, divisor lattices, products,
//! down-set lattices of posets, seeded random distributive lattices, subgroup
//! lattices of finite groups, ideal lattices of `ℤ/n`, and closed-set
//! lattices of finite spaces.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{FiniteLattice, FinitePoset, OrderError};
use crate::residual::{self, Family};
use crate::topology::{self, FiniteTopology, TopologyError};

/// Largest lattice any generator will build.
pub const MAX_ELEMENTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("lattice would have {size} elements (cap {cap})")]
    TooLarge { size: usize, cap: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid generator spec `{0}`")]
    InvalidSpec(String),
    #[error("two computations disagree: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

fn too_large(size: usize) -> GenError {
    GenError::TooLarge {
        size,
        cap: MAX_ELEMENTS,
    }
}

fn set_name(items: impl IntoIterator<Item = String>) -> String {
    format!("{{{}}}", items.into_iter().collect::<Vec<_>>().join(","))
}

pub fn chain(k: usize) -> Result<FiniteLattice, GenError> {
    if k == 0 {
        return Err(GenError::InvalidSpec("chain:0".into()));
    }
    if k > MAX_ELEMENTS {
        return Err(too_large(k));
    }
    let names = (0..k).map(|i| i.to_string()).collect();
    Ok(FiniteLattice::from_operations(
        names,
        |a, b| a <= b,
        usize::min,
        usize::max,
    )?)
}

/// Subsets of `{0, …, k−1}` under inclusion; element `i` is the subset with
/// bit mask `i`.
pub fn boolean(k: usize) -> Result<FiniteLattice, GenError> {
    if k > 12 {
        return Err(too_large(
            1usize.checked_shl(k as u32).unwrap_or(usize::MAX),
        ));
    }
    let n = 1usize << k;
    let names = (0..n)
        .map(|m| set_name((0..k).filter(|b| m >> b & 1 == 1).map(|b| b.to_string())))
        .collect();
    Ok(FiniteLattice::from_operations(
        names,
        |a, b| a & b == a,
        |a, b| a & b,
        |a, b| a | b,
    )?)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Product of the distinct primes dividing `n`.
pub fn radical(mut n: u64) -> u64 {
    let mut rad = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            rad *= p;
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        rad *= n;
    }
    rad
}

/// Divisors of `n` ordered by divisibility.
pub fn divisor(n: u64) -> Result<FiniteLattice, GenError> {
    if n == 0 {
        return Err(GenError::InvalidSpec("divisor:0".into()));
    }
    let ds = divisors(n);
    if ds.len() > MAX_ELEMENTS {
        return Err(too_large(ds.len()));
    }
    let index: HashMap<u64, usize> = ds.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let names = ds.iter().map(u64::to_string).collect();
    Ok(FiniteLattice::from_operations(
        names,
        |a, b| ds[b].is_multiple_of(ds[a]),
        |a, b| index[&gcd(ds[a], ds[b])],
        |a, b| index[&(ds[a] / gcd(ds[a], ds[b]) * ds[b])],
    )?)
}

/// Componentwise order on pairs; element `i * |b| + j` is `(a_i, b_j)`.
pub fn product(a: &FiniteLattice, b: &FiniteLattice) -> Result<FiniteLattice, GenError> {
    let (na, nb) = (a.len(), b.len());
    let size = na.saturating_mul(nb);
    if size > MAX_ELEMENTS {
        return Err(too_large(size));
    }
    let names = (0..size)
        .map(|i| format!("({},{})", a.name(i / nb), b.name(i % nb)))
        .collect();
    Ok(FiniteLattice::from_operations(
        names,
        |x, y| a.leq(x / nb, y / nb) && b.leq(x % nb, y % nb),
        |x, y| a.meet(x / nb, y / nb) * nb + b.meet(x % nb, y % nb),
        |x, y| a.join(x / nb, y / nb) * nb + b.join(x % nb, y % nb),
    )?)
}

/// All down-sets of `p` (at most 64 elements) as bit masks, ordered by size
/// and then mask. Fails once more than `cap` are found.
pub fn downsets(p: &FinitePoset, cap: usize) -> Result<Vec<u64>, GenError> {
    let m = p.len();
    if m > 64 {
        return Err(GenError::InvalidSpec(format!("poset with {m} elements")));
    }
    let below: Vec<u64> = (0..m)
        .map(|x| p.down_set(x).iter().fold(0u64, |acc, i| acc | 1 << i))
        .collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::from([0u64]);
    seen.insert(0);
    while let Some(d) = queue.pop_front() {
        for (x, &bx) in below.iter().enumerate() {
            let bit = 1u64 << x;
            if d & bit == 0 && bx & !bit & !d == 0 {
                let next = d | bit;
                if seen.insert(next) {
                    if seen.len() > cap {
                        return Err(too_large(seen.len()));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    let mut out: Vec<u64> = seen.into_iter().collect();
    out.sort_by_key(|&d| (d.count_ones(), d));
    Ok(out)
}

/// The lattice of down-sets of `p` under inclusion.
pub fn downset_lattice(p: &FinitePoset) -> Result<FiniteLattice, GenError> {
    let ds = downsets(p, MAX_ELEMENTS)?;
    let index: HashMap<u64, usize> = ds.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let names = ds
        .iter()
        .map(|&d| {
            set_name(
                (0..p.len())
                    .filter(|&i| d >> i & 1 == 1)
                    .map(|i| p.name(i).to_string()),
            )
        })
        .collect();
    Ok(FiniteLattice::from_operations(
        names,
        |a, b| ds[a] & ds[b] == ds[a],
        |a, b| index[&(ds[a] & ds[b])],
        |a, b| index[&(ds[a] | ds[b])],
    )?)
}

/// A seeded random poset on `elements` points `p0, p1, …`: each new point is
/// placed above every earlier point independently with probability 1/3.
pub fn random_poset(seed: u64, elements: usize) -> FinitePoset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for j in 0..elements {
        for i in 0..j {
            if rng.random_ratio(1, 3) {
                edges.push((i, j));
            }
        }
    }
    let names = (0..elements).map(|i| format!("p{i}")).collect();
    FinitePoset::from_edges(names, &edges).expect("edges go from lower to higher index")
}

/// A seeded random distributive lattice with at most `target_size` elements:
/// the down-set lattice of a random poset grown point by point while the
/// lattice stays within the target.
pub fn random_distributive(seed: u64, target_size: usize) -> Result<FiniteLattice, GenError> {
    if target_size > MAX_ELEMENTS {
        return Err(too_large(target_size));
    }
    if target_size == 0 {
        return Err(GenError::InvalidSpec("random:size=0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut count = 0usize;
    let mut failures = 0;
    while failures < 8 && count < 64 {
        let mut trial = edges.clone();
        for i in 0..count {
            if rng.random_ratio(1, 3) {
                trial.push((i, count));
            }
        }
        let names: Vec<String> = (0..=count).map(|i| format!("p{i}")).collect();
        let poset = FinitePoset::from_edges(names, &trial)?;
        match downsets(&poset, target_size) {
            Ok(_) => {
                edges = trial;
                count += 1;
                failures = 0;
            }
            Err(GenError::TooLarge { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    let names = (0..count).map(|i| format!("p{i}")).collect();
    downset_lattice(&FinitePoset::from_edges(names, &edges)?)
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyTable {
    #[serde(skip)]
    pub name: String,
    pub order: usize,
    pub identity: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub names: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

/// Names of the groups shipped with the library.
pub const CATALOG: [&str; 6] = ["S3", "D4", "Q8", "A4", "Z2xZ4", "Z2^3"];

impl CayleyTable {
    /// Parses `{"order": n, "identity": e, "table": [[...]]}` and verifies the
    /// group axioms.
    pub fn from_json(name: &str, text: &str) -> Result<Self, GenError> {
        let mut table: CayleyTable =
            serde_json::from_str(text).map_err(|e| GenError::InvalidGroup(e.to_string()))?;
        table.name = name.to_string();
        if table.names.is_empty() {
            table.names = (0..table.order).map(|i| i.to_string()).collect();
        }
        table.verify()?;
        Ok(table)
    }

    /// `ℤ/n` under addition, elements named by residue.
    pub fn cyclic(n: usize) -> Result<Self, GenError> {
        if n == 0 {
            return Err(GenError::InvalidGroup("cyclic group of order 0".into()));
        }
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let group = CayleyTable {
            name: format!("Z{n}"),
            order: n,
            identity: 0,
            names: (0..n).map(|i| i.to_string()).collect(),
            table,
        };
        group.verify()?;
        Ok(group)
    }

    /// A catalog group (`S3`, `D4`, `Q8`, `A4`, `Z2xZ4`, `Z2^3`) or `Z<n>`.
    pub fn catalog(name: &str) -> Result<Self, GenError> {
        let text = match name {
            "S3" => include_str!("../data/groups/S3.json"),
            "D4" => include_str!("../data/groups/D4.json"),
            "Q8" => include_str!("../data/groups/Q8.json"),
            "A4" => include_str!("../data/groups/A4.json"),
            "Z2xZ4" => include_str!("../data/groups/Z2xZ4.json"),
            "Z2^3" | "Z2xZ2xZ2" => include_str!("../data/groups/Z2xZ2xZ2.json"),
            other => {
                let n = other
                    .strip_prefix('Z')
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| GenError::InvalidGroup(format!("unknown group `{other}`")))?;
                return Self::cyclic(n);
            }
        };
        Self::from_json(name, text)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    fn verify(&self) -> Result<(), GenError> {
        let n = self.order;
        let bad = |msg: String| Err(GenError::InvalidGroup(msg));
        if n == 0 || n > 64 {
            return bad(format!("order {n} outside 1..=64"));
        }
        if self.table.len() != n || self.table.iter().any(|row| row.len() != n) {
            return bad("table is not order × order".into());
        }
        if self.names.len() != n {
            return bad("names do not match the order".into());
        }
        if self.table.iter().flatten().any(|&v| v >= n) {
            return bad("entry out of range".into());
        }
        let e = self.identity;
        if e >= n || (0..n).any(|a| self.mul(e, a) != a || self.mul(a, e) != a) {
            return bad("identity is not neutral".into());
        }
        for a in 0..n {
            if !(0..n).any(|b| self.mul(a, b) == e && self.mul(b, a) == e) {
                return bad(format!("element {a} has no inverse"));
            }
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return bad(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The subgroup generated by the elements of `mask`.
    pub fn closure(&self, mask: u64) -> u64 {
        let mut current = mask | 1 << self.identity;
        loop {
            let mut next = current;
            for a in bits(current) {
                for b in bits(current) {
                    next |= 1 << self.mul(a, b);
                }
            }
            if next == current {
                return current;
            }
            current = next;
        }
    }

    /// Every subgroup as a bit mask, ordered by size and then mask.
    pub fn subgroups(&self) -> Result<Vec<u64>, GenError> {
        let trivial = self.closure(0);
        let mut seen: HashSet<u64> = HashSet::from([trivial]);
        let mut queue = VecDeque::from([trivial]);
        while let Some(h) = queue.pop_front() {
            for g in 0..self.order {
                if h >> g & 1 == 0 {
                    let k = self.closure(h | 1 << g);
                    if seen.insert(k) {
                        if seen.len() > MAX_ELEMENTS {
                            return Err(too_large(seen.len()));
                        }
                        queue.push_back(k);
                    }
                }
            }
        }
        let mut out: Vec<u64> = seen.into_iter().collect();
        out.sort_by_key(|&h| (h.count_ones(), h));
        Ok(out)
    }

    pub fn full_mask(&self) -> u64 {
        if self.order == 64 {
            u64::MAX
        } else {
            (1u64 << self.order) - 1
        }
    }

    pub fn subgroup_name(&self, mask: u64) -> String {
        set_name(bits(mask).map(|i| self.names[i].clone()))
    }
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

/// The subgroups of `c` under inclusion, together with the subgroup masks in
/// lattice index order.
pub fn subgroup_lattice(c: &CayleyTable) -> Result<(FiniteLattice, Vec<u64>), GenError> {
    let subs = c.subgroups()?;
    let index: HashMap<u64, usize> = subs.iter().enumerate().map(|(i, &h)| (h, i)).collect();
    let names = subs.iter().map(|&h| c.subgroup_name(h)).collect();
    let lattice = FiniteLattice::from_operations(
        names,
        |a, b| subs[a] & subs[b] == subs[a],
        |a, b| index[&(subs[a] & subs[b])],
        |a, b| index[&c.closure(subs[a] | subs[b])],
    )?;
    Ok((lattice, subs))
}

/// The Frattini subgroup, computed as the intersection of the maximal
/// subgroups and as the residual derivative of the whole group in the
/// subgroup lattice; fails if the two differ.
pub fn frattini(c: &CayleyTable) -> Result<u64, GenError> {
    let (lattice, subs) = subgroup_lattice(c)?;
    let full = c.full_mask();
    let proper: Vec<u64> = subs.iter().copied().filter(|&h| h != full).collect();
    let maximal = proper
        .iter()
        .copied()
        .filter(|&h| !proper.iter().any(|&k| k != h && k & h == h));
    let direct = maximal.fold(full, |acc, h| acc & h);
    let top = subs
        .iter()
        .position(|&h| h == full)
        .expect("whole group is a subgroup");
    let derivative = subs[residual::residual_derivative(&lattice, top, &Family::All)];
    if direct != derivative {
        return Err(GenError::Mismatch(format!(
            "maximal-subgroup intersection {} differs from derivative {}",
            c.subgroup_name(direct),
            c.subgroup_name(derivative)
        )));
    }
    Ok(direct)
}

/// Ideals `dℤ/n` for `d | n` under inclusion, named `(d)`; the returned
/// vector holds the generator `d` of each lattice element.
pub fn ideal_lattice_zn(n: u64) -> Result<(FiniteLattice, Vec<u64>), GenError> {
    if n < 2 {
        return Err(GenError::InvalidSpec(format!("ideals:{n}")));
    }
    let mut ds = divisors(n);
    ds.reverse();
    if ds.len() > MAX_ELEMENTS {
        return Err(too_large(ds.len()));
    }
    let index: HashMap<u64, usize> = ds.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let names = ds.iter().map(|d| format!("({d})")).collect();
    let lattice = FiniteLattice::from_operations(
        names,
        |a, b| ds[a].is_multiple_of(ds[b]),
        |a, b| index[&(ds[a] / gcd(ds[a], ds[b]) * ds[b])],
        |a, b| index[&gcd(ds[a], ds[b])],
    )?;
    Ok((lattice, ds))
}

/// The generator of the Jacobson radical of `ℤ/n`, computed as the residual
/// derivative of the whole ring and as `rad(n)`; fails if the two differ.
pub fn jacobson_zn(n: u64) -> Result<u64, GenError> {
    let (lattice, ds) = ideal_lattice_zn(n)?;
    let whole = ds.iter().position(|&d| d == 1).expect("1 divides n");
    let mu = ds[residual::residual_derivative(&lattice, whole, &Family::All)];
    let rad = radical(n);
    if mu != rad {
        return Err(GenError::Mismatch(format!(
            "derivative ({mu}) differs from radical ({rad}) for n = {n}"
        )));
    }
    Ok(mu)
}

/// Closed subsets of `t` under inclusion.
pub fn closed_sets(t: &FiniteTopology) -> Result<FiniteLattice, GenError> {
    Ok(topology::closed_set_lattice(t, MAX_ELEMENTS)?.0)
}

/// What to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Chain(usize),
    Boolean(usize),
    Divisor(u64),
    Product(Box<GeneratorSpec>, Box<GeneratorSpec>),
    Downset {
        label: String,
        poset: FinitePoset,
    },
    RandomDistributive {
        seed: u64,
        size: usize,
    },
    SubgroupLattice(CayleyTable),
    IdealLatticeZn(u64),
    ClosedSets {
        label: String,
        topology: FiniteTopology,
    },
}

pub fn generate(spec: &GeneratorSpec) -> Result<FiniteLattice, GenError> {
    match spec {
        GeneratorSpec::Chain(k) => chain(*k),
        GeneratorSpec::Boolean(k) => boolean(*k),
        GeneratorSpec::Divisor(n) => divisor(*n),
        GeneratorSpec::Product(a, b) => product(&generate(a)?, &generate(b)?),
        GeneratorSpec::Downset { poset, .. } => downset_lattice(poset),
        GeneratorSpec::RandomDistributive { seed, size } => random_distributive(*seed, *size),
        GeneratorSpec::SubgroupLattice(c) => Ok(subgroup_lattice(c)?.0),
        GeneratorSpec::IdealLatticeZn(n) => Ok(ideal_lattice_zn(*n)?.0),
        GeneratorSpec::ClosedSets { topology, .. } => closed_sets(topology),
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Chain(k) => write!(f, "chain:{k}"),
            GeneratorSpec::Boolean(k) => write!(f, "boolean:{k}"),
            GeneratorSpec::Divisor(n) => write!(f, "divisor:{n}"),
            GeneratorSpec::Product(a, b) => write!(f, "product:{a}*{b}"),
            GeneratorSpec::Downset { label, .. } => write!(f, "downset:{label}"),
            GeneratorSpec::RandomDistributive { seed, size } => {
                write!(f, "random:seed={seed},size={size}")
            }
            GeneratorSpec::SubgroupLattice(c) => write!(f, "group:{}", c.name),
            GeneratorSpec::IdealLatticeZn(n) => write!(f, "ideals:{n}"),
            GeneratorSpec::ClosedSets { label, .. } => write!(f, "closed:{label}"),
        }
    }
}

fn parse_number<T: FromStr>(spec: &str, text: &str) -> Result<T, GenError> {
    text.trim()
        .parse()
        .map_err(|_| GenError::InvalidSpec(spec.to_string()))
}

/// Parses a poset description such as `a<b,c<d,e`, `antichain:3` or `chain:4`.
pub fn parse_poset(text: &str) -> Result<FinitePoset, GenError> {
    let numbered = |k: usize, prefix: &str| -> Vec<String> {
        (0..k).map(|i| format!("{prefix}{i}")).collect()
    };
    if let Some(k) = text.strip_prefix("antichain:") {
        let k: usize = parse_number(text, k)?;
        return Ok(FinitePoset::from_edges(numbered(k, "a"), &[])?);
    }
    if let Some(k) = text.strip_prefix("chain:") {
        let k: usize = parse_number(text, k)?;
        let edges: Vec<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
        return Ok(FinitePoset::from_edges(numbered(k, "c"), &edges)?);
    }
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |name: &str| -> Result<usize, GenError> {
        let name = name.trim();
        if name.is_empty() {
            return Err(GenError::InvalidSpec(text.to_string()));
        }
        Ok(match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        })
    };
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let parts: Vec<&str> = item.split('<').collect();
        let ids = parts
            .iter()
            .map(|p| intern(p))
            .collect::<Result<Vec<_>, _>>()?;
        for w in ids.windows(2) {
            edges.push((w[0], w[1]));
        }
    }
    Ok(FinitePoset::from_edges(names, &edges)?)
}

impl FromStr for GeneratorSpec {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || GenError::InvalidSpec(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(invalid)?;
        Ok(match kind.trim() {
            "chain" => GeneratorSpec::Chain(parse_number(s, rest)?),
            "boolean" => GeneratorSpec::Boolean(parse_number(s, rest)?),
            "divisor" => GeneratorSpec::Divisor(parse_number(s, rest)?),
            "ideals" => GeneratorSpec::IdealLatticeZn(parse_number(s, rest)?),
            "group" => GeneratorSpec::SubgroupLattice(CayleyTable::catalog(rest.trim())?),
            "product" => {
                let (a, b) = rest.split_once('*').ok_or_else(invalid)?;
                GeneratorSpec::Product(Box::new(a.parse()?), Box::new(b.parse()?))
            }
            "downset" => GeneratorSpec::Downset {
                label: rest.to_string(),
                poset: parse_poset(rest)?,
            },
            "random" => {
                let mut seed = None;
                let mut size = None;
                for pair in rest.split(',') {
                    let (key, value) = pair.split_once('=').ok_or_else(invalid)?;
                    match key.trim() {
                        "seed" => seed = Some(parse_number(s, value)?),
                        "size" => size = Some(parse_number(s, value)?),
                        _ => return Err(invalid()),
                    }
                }
                GeneratorSpec::RandomDistributive {
                    seed: seed.ok_or_else(invalid)?,
                    size: size.ok_or_else(invalid)?,
                }
            }
            "closed" => {
                let (shape, n) = rest.split_once(':').ok_or_else(invalid)?;
                let n: usize = parse_number(s, n)?;
                if n > 12 {
                    return Err(invalid());
                }
                let topology = match shape {
                    "discrete" => FiniteTopology::discrete(n),
                    "indiscrete" => FiniteTopology::indiscrete(n),
                    _ => return Err(invalid()),
                };
                GeneratorSpec::ClosedSets {
                    label: rest.to_string(),
                    topology,
                }
            }
            _ => return Err(invalid()),
        })
    }
}
