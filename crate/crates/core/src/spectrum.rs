//! Volume spectra: every `(d+1)`-subset of an arrangement, grouped by the
//! volume of the simplex it forms.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::combinatorics::{self, binomial, Combinations};
use crate::error::{Error, Result};
use crate::geometry::{simplex_of_hyperplanes, simplex_of_subset, Arrangement};
use crate::scalar::{Scalar, DEFAULT_EPS_VOL};

/// Subsets per parallel work item. Fixed so partial results never depend on
/// the thread count.
const CHUNK: u64 = 512;

pub const DEFAULT_WITNESS_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub eps_vol: f64,
    /// Witnesses kept per entry; `None` keeps all of them.
    pub witness_cap: Option<usize>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            eps_vol: DEFAULT_EPS_VOL,
            witness_cap: Some(DEFAULT_WITNESS_CAP),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry<S> {
    pub volume: S,
    pub multiplicity: u64,
    /// Defining label subsets, lexicographically smallest first.
    pub witnesses: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSpectrum<S> {
    pub dim: usize,
    pub n: usize,
    pub entries: Vec<SpectrumEntry<S>>,
    pub degenerate_count: u64,
    pub total_subsets: u64,
    pub eps_vol: f64,
}

/// Visits every `(d+1)`-subset in lexicographic order of storage position,
/// yielding its sorted labels and its volume (`None` when degenerate).
pub fn enumerate_simplices<S: Scalar>(
    a: &Arrangement<S>,
) -> impl Iterator<Item = (Vec<u32>, Option<S>)> + '_ {
    Combinations::new(a.len(), a.dim() + 1).map(move |idx| evaluate(a, &idx))
}

fn evaluate<S: Scalar>(a: &Arrangement<S>, idx: &[usize]) -> (Vec<u32>, Option<S>) {
    let hs: Vec<_> = idx.iter().map(|&i| &a.hyperplanes()[i]).collect();
    let mut labels: Vec<u32> = idx.iter().map(|&i| a.label_at(i)).collect();
    labels.sort_unstable();
    (labels, simplex_of_hyperplanes(&hs).map(|(_, v)| v))
}

#[derive(Debug, Clone)]
struct Partial<S> {
    groups: Vec<SpectrumEntry<S>>,
    degenerate: u64,
}

impl<S: Scalar> Partial<S> {
    fn empty() -> Self {
        Self {
            groups: Vec::new(),
            degenerate: 0,
        }
    }

    /// Merges two partials whose groups are sorted by volume with exactly
    /// equal volumes already combined.
    fn merge(self, other: Self, cap: Option<usize>) -> Self {
        let mut groups = Vec::with_capacity(self.groups.len() + other.groups.len());
        let mut left = self.groups.into_iter().peekable();
        let mut right = other.groups.into_iter().peekable();
        loop {
            let ord = match (left.peek(), right.peek()) {
                (Some(l), Some(r)) => l.volume.cmp_total(&r.volume),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => break,
            };
            let next = match ord {
                Ordering::Less => left.next().unwrap(),
                Ordering::Greater => right.next().unwrap(),
                Ordering::Equal => {
                    let l = left.next().unwrap();
                    let r = right.next().unwrap();
                    combine(l, r, cap)
                }
            };
            groups.push(next);
        }
        Self {
            groups,
            degenerate: self.degenerate + other.degenerate,
        }
    }
}

fn combine<S: Scalar>(mut a: SpectrumEntry<S>, b: SpectrumEntry<S>, cap: Option<usize>) -> SpectrumEntry<S> {
    a.multiplicity += b.multiplicity;
    a.witnesses.extend(b.witnesses);
    a.witnesses.sort();
    if let Some(cap) = cap {
        a.witnesses.truncate(cap);
    }
    a
}

fn chunk_partial<S: Scalar>(a: &Arrangement<S>, start: u64, len: u64, cap: Option<usize>) -> Partial<S> {
    let n = a.len();
    let k = a.dim() + 1;
    let first = combinatorics::unrank(start, n, k);
    let mut records = Vec::new();
    let mut degenerate = 0;
    for idx in Combinations::starting_at(n, first).take(len as usize) {
        match evaluate(a, &idx) {
            (labels, Some(v)) => records.push((v, labels)),
            (_, None) => degenerate += 1,
        }
    }
    records.sort_by(|x, y| x.0.cmp_total(&y.0).then_with(|| x.1.cmp(&y.1)));
    let mut groups: Vec<SpectrumEntry<S>> = Vec::new();
    for (v, labels) in records {
        match groups.last_mut() {
            Some(g) if g.volume == v => {
                g.multiplicity += 1;
                if cap.map_or(true, |c| g.witnesses.len() < c) {
                    g.witnesses.push(labels);
                }
            }
            _ => groups.push(SpectrumEntry {
                volume: v,
                multiplicity: 1,
                witnesses: if cap == Some(0) { vec![] } else { vec![labels] },
            }),
        }
    }
    Partial { groups, degenerate }
}

/// Computes the full spectrum. Work is split into fixed rank ranges and
/// merged; float volumes are then clustered by relative gaps larger than
/// `eps_vol`, each cluster reported at its smallest member.
pub fn volume_spectrum<S: Scalar>(a: &Arrangement<S>, cfg: &SpectrumConfig) -> VolumeSpectrum<S> {
    let n = a.len();
    let k = a.dim() + 1;
    let total = binomial(n as u64, k as u64);
    let chunks = total.div_ceil(CHUNK);
    let partial = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            chunk_partial(a, start, CHUNK.min(total - start), cfg.witness_cap)
        })
        .reduce(Partial::empty, |x, y| x.merge(y, cfg.witness_cap));

    let mut entries: Vec<SpectrumEntry<S>> = Vec::new();
    for g in partial.groups {
        match entries.last_mut() {
            Some(last) if last.volume.approx_eq(&g.volume, cfg.eps_vol) && last.volume != g.volume => {
                let merged = combine(last.clone(), g, cfg.witness_cap);
                *last = merged;
            }
            _ => entries.push(g),
        }
    }
    VolumeSpectrum {
        dim: a.dim(),
        n,
        entries,
        degenerate_count: partial.degenerate,
        total_subsets: total,
        eps_vol: cfg.eps_vol,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VolumeQuery<S> {
    Min,
    Max,
    Value(S),
}

/// Multiplicity of the smallest, largest, or matching volume. Float
/// matching uses the spectrum's `eps_vol`.
pub fn count_at_volume<S: Scalar>(sp: &VolumeSpectrum<S>, which: &VolumeQuery<S>) -> Result<u64> {
    match which {
        VolumeQuery::Min => sp.entries.first().map(|e| e.multiplicity).ok_or(Error::EmptySpectrum),
        VolumeQuery::Max => sp.entries.last().map(|e| e.multiplicity).ok_or(Error::EmptySpectrum),
        VolumeQuery::Value(v) => Ok(sp
            .entries
            .iter()
            .filter(|e| e.volume.approx_eq(v, sp.eps_vol))
            .map(|e| e.multiplicity)
            .sum()),
    }
}

impl<S: Scalar> VolumeSpectrum<S> {
    pub fn simplex_count(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn min_volume(&self) -> Option<&S> {
        self.entries.first().map(|e| &e.volume)
    }

    pub fn max_volume(&self) -> Option<&S> {
        self.entries.last().map(|e| &e.volume)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "n": self.n,
            "field": S::MODE.as_str(),
            "eps_vol": self.eps_vol,
            "total_subsets": self.total_subsets,
            "degenerate_count": self.degenerate_count,
            "entries": self.entries.iter().map(|e| json!({
                "volume": e.volume.to_json(),
                "multiplicity": e.multiplicity,
                "witnesses": e.witnesses,
            })).collect::<Vec<_>>(),
        })
    }

    /// `volume,multiplicity,witness_sample`, one row per entry. The sample is
    /// the first witness with labels separated by spaces.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("volume,multiplicity,witness_sample\n");
        for e in &self.entries {
            let sample = e
                .witnesses
                .first()
                .map(|w| w.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", e.volume.render(), e.multiplicity, sample));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistinctSubsetResult {
    pub subset: Vec<u32>,
    pub size: usize,
    /// True when the search was exhaustive.
    pub exact: bool,
    pub nodes: u64,
}

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Sorted volume list with tolerance-aware collision lookups.
struct CollisionIndex<S> {
    volumes: Vec<S>,
    eps: f64,
}

impl<S: Scalar> CollisionIndex<S> {
    fn new(eps: f64) -> Self {
        Self {
            volumes: Vec::new(),
            eps,
        }
    }

    fn slot(&self, v: &S) -> usize {
        self.volumes.partition_point(|x| x.cmp_total(v) == Ordering::Less)
    }

    fn collides(&self, v: &S) -> bool {
        let pos = self.slot(v);
        self.volumes[pos..]
            .iter()
            .take_while(|x| x.approx_eq(v, self.eps))
            .next()
            .is_some()
            || self.volumes[..pos]
                .iter()
                .rev()
                .take_while(|x| x.approx_eq(v, self.eps))
                .next()
                .is_some()
    }

    fn insert(&mut self, v: S) {
        let pos = self.slot(&v);
        self.volumes.insert(pos, v);
    }

    fn remove(&mut self, v: &S) {
        let pos = self.slot(v);
        let at = self.volumes[pos..]
            .iter()
            .position(|x| x == v)
            .map(|p| p + pos)
            .expect("removing a volume that was inserted");
        self.volumes.remove(at);
    }
}

/// Volumes of every `(d+1)`-subset, indexed by lexicographic rank over
/// storage positions.
struct VolumeTable<S> {
    n: usize,
    volumes: Vec<Option<S>>,
}

impl<S: Scalar> VolumeTable<S> {
    fn build(a: &Arrangement<S>) -> Self {
        let n = a.len();
        let k = a.dim() + 1;
        let total = binomial(n as u64, k as u64);
        let volumes = (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .flat_map_iter(|c| {
                let start = c * CHUNK;
                let first = combinatorics::unrank(start, n, k);
                Combinations::starting_at(n, first)
                    .take(CHUNK.min(total - start) as usize)
                    .map(|idx| evaluate(a, &idx).1)
                    .collect::<Vec<_>>()
            })
            .collect();
        Self { n, volumes }
    }

    fn get(&self, sorted_positions: &[usize]) -> Option<&S> {
        self.volumes[combinatorics::rank(sorted_positions, self.n) as usize].as_ref()
    }
}

struct Family<'a, S> {
    table: &'a VolumeTable<S>,
    d: usize,
    members: Vec<usize>,
    index: CollisionIndex<S>,
    added: Vec<Vec<S>>,
}

impl<'a, S: Scalar> Family<'a, S> {
    fn new(table: &'a VolumeTable<S>, d: usize, eps: f64) -> Self {
        Self {
            table,
            d,
            members: Vec::new(),
            index: CollisionIndex::new(eps),
            added: Vec::new(),
        }
    }

    /// Adds `p` if every new simplex is nondegenerate and collision-free.
    fn try_push(&mut self, p: usize) -> bool {
        let mut fresh: Vec<S> = Vec::new();
        let mut ok = true;
        if self.members.len() >= self.d {
            for combo in Combinations::new(self.members.len(), self.d) {
                let mut positions: Vec<usize> = combo.iter().map(|&i| self.members[i]).collect();
                positions.push(p);
                positions.sort_unstable();
                match self.table.get(&positions) {
                    Some(v) if !self.index.collides(v) => {
                        self.index.insert(v.clone());
                        fresh.push(v.clone());
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if !ok {
            for v in &fresh {
                self.index.remove(v);
            }
            return false;
        }
        self.members.push(p);
        self.added.push(fresh);
        true
    }

    fn pop(&mut self) {
        self.members.pop();
        for v in self.added.pop().unwrap_or_default() {
            self.index.remove(&v);
        }
    }
}

fn positions_by_label<S: Scalar>(a: &Arrangement<S>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by_key(|&i| a.label_at(i));
    order
}

fn labels_of<S: Scalar>(a: &Arrangement<S>, positions: &[usize]) -> Vec<u32> {
    let mut labels: Vec<u32> = positions.iter().map(|&i| a.label_at(i)).collect();
    labels.sort_unstable();
    labels
}

/// Largest subfamily whose induced simplices are all nondegenerate with
/// pairwise distinct volumes, by branch and bound over candidates in label
/// order. Stops after `budget` nodes and reports the best family found with
/// `exact = false`.
pub fn distinct_subset_exact<S: Scalar>(a: &Arrangement<S>, eps_vol: f64, budget: u64) -> DistinctSubsetResult {
    let table = VolumeTable::build(a);
    let order = positions_by_label(a);
    let seed = greedy_family(&table, a.dim(), &order, eps_vol);

    struct Search<'a, S> {
        family: Family<'a, S>,
        order: Vec<usize>,
        best: Vec<usize>,
        nodes: u64,
        budget: u64,
        aborted: bool,
    }

    fn dfs<S: Scalar>(s: &mut Search<'_, S>, i: usize) {
        if s.aborted {
            return;
        }
        s.nodes += 1;
        if s.nodes > s.budget {
            s.aborted = true;
            return;
        }
        let size = s.family.members.len();
        if size + (s.order.len() - i) <= s.best.len() {
            return;
        }
        if i == s.order.len() {
            s.best = s.family.members.clone();
            return;
        }
        let p = s.order[i];
        if s.family.try_push(p) {
            dfs(s, i + 1);
            s.family.pop();
        }
        dfs(s, i + 1);
    }

    let mut search = Search {
        family: Family::new(&table, a.dim(), eps_vol),
        order,
        best: seed,
        nodes: 0,
        budget,
        aborted: false,
    };
    dfs(&mut search, 0);
    let subset = labels_of(a, &search.best);
    DistinctSubsetResult {
        size: subset.len(),
        subset,
        exact: !search.aborted,
        nodes: search.nodes,
    }
}

fn greedy_family<S: Scalar>(table: &VolumeTable<S>, d: usize, order: &[usize], eps: f64) -> Vec<usize> {
    let mut family = Family::new(table, d, eps);
    for &p in order {
        family.try_push(p);
    }
    family.members
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyOrder {
    Label,
    Random(u64),
}

/// Grows a family one hyperplane at a time, keeping a candidate only when it
/// introduces no degenerate simplex and no volume collision.
pub fn distinct_subset_greedy<S: Scalar>(a: &Arrangement<S>, order: GreedyOrder, eps_vol: f64) -> DistinctSubsetResult {
    let table = VolumeTable::build(a);
    let mut positions = positions_by_label(a);
    if let GreedyOrder::Random(seed) = order {
        positions.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let members = greedy_family(&table, a.dim(), &positions, eps_vol);
    let subset = labels_of(a, &members);
    DistinctSubsetResult {
        size: subset.len(),
        subset,
        exact: false,
        nodes: positions.len() as u64,
    }
}

/// Re-derives every simplex of the subfamily from scratch and checks that
/// all are nondegenerate with pairwise distinct volumes.
pub fn verify_distinct_certificate<S: Scalar>(a: &Arrangement<S>, subset: &[u32], eps_vol: f64) -> Result<bool> {
    let d = a.dim();
    let mut volumes = Vec::new();
    for combo in Combinations::new(subset.len(), d + 1) {
        let labels: Vec<u32> = combo.iter().map(|&i| subset[i]).collect();
        match simplex_of_subset(a, &labels) {
            Ok(s) => volumes.push(s.volume),
            Err(Error::Degenerate) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    for i in 0..volumes.len() {
        for j in i + 1..volumes.len() {
            if volumes[i].approx_eq(&volumes[j], eps_vol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
