//! Closed-form Kobon bounds, exact progression-free set sizes `r_k(n)`, and
//! the check that distinct-volume subfamilies of the shift-covariant
//! constructions stay below `r_{d+2}(n)`.

use serde::Serialize;

use crate::combinatorics::Combinations;
use crate::error::{Error, Result};
use crate::geometry::{simplex_of_subset, Arrangement};
use crate::spectrum::{distinct_subset_exact, DistinctSubsetResult};

pub const DEFAULT_RK_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RkResult {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    /// Sorted elements of `1..=n` with no `k`-term progression.
    pub witness: Vec<u32>,
    pub exact: bool,
    pub nodes: u64,
}

/// First `k`-term progression inside `set`, if any.
pub fn find_progression(set: &[u32], k: usize) -> Option<Vec<u32>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let present = |x: u32| sorted.binary_search(&x).is_ok();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            let step = b - a;
            let terms: Vec<u32> = (0..k as u32).map(|t| a + t * step).collect();
            if terms.iter().all(|&x| present(x)) {
                return Some(terms);
            }
        }
    }
    None
}

struct RkSearch {
    k: usize,
    target: usize,
    /// `best[len]` for every smaller interval length already solved.
    best: Vec<usize>,
    member: Vec<bool>,
    chosen: usize,
    nodes: u64,
    budget: u64,
    found: Option<Vec<u32>>,
}

impl RkSearch {
    /// Whether adding `x` closes a progression with current members.
    fn closes_progression(&self, x: usize) -> bool {
        let m = self.member.len() - 1;
        let k = self.k;
        for step in 1..=m {
            for pos in 0..k {
                let Some(start) = x.checked_sub(pos * step) else { break };
                if start == 0 {
                    break;
                }
                let last = start + (k - 1) * step;
                if last > m {
                    continue;
                }
                if (0..k).all(|t| {
                    let y = start + t * step;
                    y == x || self.member[y]
                }) {
                    return true;
                }
            }
        }
        false
    }

    /// Decides `x..m` (exclusive of `m`, already placed) in increasing order.
    fn dfs(&mut self, x: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if self.chosen == self.target {
            self.found = Some((1..self.member.len()).filter(|&y| self.member[y]).map(|y| y as u32).collect());
            return true;
        }
        let m = self.member.len() - 1;
        if x >= m || self.chosen + self.best[m - x] < self.target {
            return false;
        }
        if !self.closes_progression(x) {
            self.member[x] = true;
            self.chosen += 1;
            if self.dfs(x + 1) {
                return true;
            }
            self.member[x] = false;
            self.chosen -= 1;
        }
        self.dfs(x + 1)
    }
}

/// Largest subset of `1..=n` without a `k`-term progression. Sizes are
/// built up one `m` at a time: `r(m)` is `r(m-1)` or `r(m-1)+1`, and a set
/// achieving the larger value must contain both `1` and `m`. Each step is a
/// branch and bound pruned by the already known `r` of shorter intervals.
pub fn r_k_exact(n: usize, k: usize, budget: u64) -> Result<RkResult> {
    if n < 1 || k < 3 {
        return Err(Error::BadParams(format!("r_k needs n >= 1 and k >= 3, got n={n}, k={k}")));
    }
    let mut best = vec![0usize, 1];
    let mut witness = vec![1u32];
    let mut nodes = 0u64;
    for m in 2..=n {
        let prev = best[m - 1];
        let target = prev + 1;
        let mut s = RkSearch {
            k,
            target,
            best: best.clone(),
            member: vec![false; m + 1],
            chosen: 2,
            nodes: 0,
            budget: budget.saturating_sub(nodes),
            found: None,
        };
        s.member[1] = true;
        s.member[m] = true;
        let hit = if m < k || target <= 2 {
            s.found = Some((1..m as u32).take(target - 1).chain([m as u32]).collect());
            true
        } else {
            s.dfs(2)
        };
        nodes += s.nodes;
        if s.nodes > s.budget {
            return Ok(RkResult {
                n,
                k,
                size: prev,
                witness,
                exact: false,
                nodes,
            });
        }
        if hit {
            best.push(target);
            witness = s.found.expect("found set recorded");
        } else {
            best.push(prev);
        }
    }
    Ok(RkResult {
        n,
        k,
        size: best[n],
        witness,
        exact: true,
        nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    pub name: String,
    pub value: u64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub values: Vec<BoundValue>,
}

impl BoundsReport {
    pub fn get(&self, name: &str) -> Option<u64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }

    /// `name,value,note` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,note\n");
        for v in &self.values {
            out.push_str(&format!("{},{},{}\n", v.name, v.value, v.note));
        }
        out
    }
}

pub fn tamura(n: u64) -> u64 {
    n * n.saturating_sub(2) / 3
}

pub fn clement_bader(n: u64) -> u64 {
    let t = tamura(n);
    if matches!(n % 6, 0 | 2) {
        t.saturating_sub(1)
    } else {
        t
    }
}

/// `floor((n/3)(n - 7/3))`, stated for even `n` only.
pub fn bartholdi(n: u64) -> Option<u64> {
    (n % 2 == 0).then(|| (n * (3 * n).saturating_sub(7)) / 9)
}

pub fn kobon_planar_bounds(n: usize) -> Result<BoundsReport> {
    if n < 3 {
        return Err(Error::BadParams(format!("planar bounds need n >= 3, got {n}")));
    }
    let m = n as u64;
    let mut values = vec![
        BoundValue {
            name: "tamura".into(),
            value: tamura(m),
            note: "floor(n(n-2)/3)".into(),
        },
        BoundValue {
            name: "clement_bader".into(),
            value: clement_bader(m),
            note: "tamura minus one when n = 0 or 2 mod 6".into(),
        },
    ];
    if let Some(b) = bartholdi(m) {
        values.push(BoundValue {
            name: "bartholdi".into(),
            value: b,
            note: "floor((n/3)(n-7/3)), even n".into(),
        });
    }
    Ok(BoundsReport {
        n,
        d: Some(2),
        k: None,
        values,
    })
}

/// Tightest planar bound: Clement-Bader, or Bartholdi when smaller.
pub fn best_planar_bound(n: usize) -> u64 {
    let m = n as u64;
    bartholdi(m).map_or(clement_bader(m), |b| b.min(clement_bader(m)))
}

/// `K_d(n) <= floor(n K_{d-1}(n-1) / (d+1))`, grounded at the best planar
/// bound and floored at every level.
pub fn kobon_recursive_bound(d: usize, n: usize) -> Result<u64> {
    if d < 2 || n < d + 1 {
        return Err(Error::BadParams(format!("recursive bound needs d >= 2, n >= d+1, got d={d}, n={n}")));
    }
    let mut value = best_planar_bound(n - (d - 2));
    for level in 3..=d {
        let m = (n - (d - level)) as u64;
        value = m * value / (level as u64 + 1);
    }
    Ok(value)
}

pub fn kobon_report(d: usize, n: usize) -> Result<BoundsReport> {
    let mut report = if d == 2 {
        kobon_planar_bounds(n)?
    } else {
        BoundsReport {
            n,
            d: Some(d),
            k: None,
            values: Vec::new(),
        }
    };
    report.values.push(BoundValue {
        name: "kobon_recursive".into(),
        value: kobon_recursive_bound(d, n)?,
        note: "floor(n K_{d-1}(n-1)/(d+1)) from the best planar bound".into(),
    });
    Ok(report)
}

/// A `(d+2)`-term progression inside the extended `r_k` witness and the
/// volumes of its two simplices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApCollision {
    pub extended: Vec<u32>,
    pub progression: Vec<u32>,
    pub first_volume: Option<f64>,
    pub second_volume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DdReport {
    pub d: usize,
    pub n: usize,
    pub distinct: DistinctSubsetResult,
    pub r: RkResult,
    /// `distinct.size <= r.size`.
    pub holds: bool,
    /// Both sides were computed exhaustively.
    pub conclusive: bool,
    pub collision: Option<ApCollision>,
}

/// Compares the largest distinct-volume subfamily of a shift-covariant
/// arrangement (labels `1..=n`) with `r_{d+2}(n)`, and exhibits the
/// progression that any larger label set must contain.
pub fn dd_ap_relation_check(a: &Arrangement<f64>, eps_vol: f64, budget: u64) -> Result<DdReport> {
    let d = a.dim();
    let n = a.len();
    let labels = a.labels();
    if (1..=n as u32).any(|l| !labels.contains(&l)) {
        return Err(Error::ParamMismatch(format!("expected labels 1..={n}")));
    }
    let distinct = distinct_subset_exact(a, eps_vol, budget);
    let r = r_k_exact(n, d + 2, DEFAULT_RK_BUDGET)?;
    let collision = (1..=n as u32).find(|x| !r.witness.contains(x)).and_then(|x| {
        let mut extended = r.witness.clone();
        extended.push(x);
        extended.sort_unstable();
        let progression = find_progression(&extended, d + 2)?;
        let volume = |s: &[u32]| simplex_of_subset(a, s).ok().map(|s| s.volume);
        Some(ApCollision {
            first_volume: volume(&progression[..d + 1]),
            second_volume: volume(&progression[1..]),
            extended,
            progression,
        })
    });
    Ok(DdReport {
        d,
        n,
        holds: distinct.size <= r.size,
        conclusive: distinct.exact && r.exact,
        distinct,
        r,
        collision,
    })
}

/// Every `k`-subset of `1..=n` checked by brute force; used only to
/// cross-check witnesses in tests and verification.
pub fn is_progression_free(set: &[u32], k: usize) -> bool {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    Combinations::new(sorted.len(), k).all(|c| {
        let step = sorted[c[1]] - sorted[c[0]];
        !c.windows(2).all(|w| sorted[w[1]] - sorted[w[0]] == step)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gen_ngon_edges;
    use crate::scalar::DEFAULT_EPS_VOL;
    use crate::spectrum::DEFAULT_NODE_BUDGET;

    #[test]
    fn small_rk_values() {
        let r = r_k_exact(1, 3, DEFAULT_RK_BUDGET).unwrap();
        assert_eq!((r.size, r.witness.clone()), (1, vec![1]));
        let r = r_k_exact(5, 3, DEFAULT_RK_BUDGET).unwrap();
        assert_eq!(r.size, 4);
        assert_eq!(r.witness, vec![1, 2, 4, 5]);
        let r = r_k_exact(5, 4, DEFAULT_RK_BUDGET).unwrap();
        assert_eq!(r.size, 4);
        assert!(is_progression_free(&r.witness, 4));
        assert!(r_k_exact(5, 2, 10).is_err());
    }

    #[test]
    fn budget_marks_inexact() {
        let r = r_k_exact(30, 3, 50).unwrap();
        assert!(!r.exact);
        assert!(is_progression_free(&r.witness, 3));
    }

    #[test]
    fn progression_finder() {
        assert_eq!(find_progression(&[1, 2, 4, 5], 3), None);
        assert_eq!(find_progression(&[1, 2, 3, 5], 3), Some(vec![1, 2, 3]));
        assert_eq!(find_progression(&[1, 4, 7, 10, 2], 4), Some(vec![1, 4, 7, 10]));
    }

    #[test]
    fn planar_bound_values() {
        let r6 = kobon_planar_bounds(6).unwrap();
        assert_eq!((r6.get("tamura"), r6.get("clement_bader"), r6.get("bartholdi")), (Some(8), Some(7), Some(7)));
        let r7 = kobon_planar_bounds(7).unwrap();
        assert_eq!((r7.get("tamura"), r7.get("clement_bader"), r7.get("bartholdi")), (Some(11), Some(11), None));
        assert_eq!(kobon_planar_bounds(10).unwrap().get("bartholdi"), Some(25));
        assert!(kobon_planar_bounds(2).is_err());
        for n in 3..200u64 {
            assert!(clement_bader(n) <= tamura(n));
            assert_eq!(clement_bader(n) == tamura(n), !matches!(n % 6, 0 | 2));
        }
    }

    #[test]
    fn recursive_bound_values() {
        assert_eq!(kobon_recursive_bound(3, 9).unwrap(), 33);
        assert_eq!(kobon_recursive_bound(2, 8).unwrap(), 15);
        assert_eq!(kobon_recursive_bound(2, 7).unwrap(), 11);
        assert!(kobon_recursive_bound(3, 3).is_err());
    }

    #[test]
    fn dd_check_on_small_ngon() {
        let f = gen_ngon_edges(5, 20).unwrap();
        let rep = dd_ap_relation_check(&f.arrangement, DEFAULT_EPS_VOL, DEFAULT_NODE_BUDGET).unwrap();
        assert!(rep.conclusive);
        assert!(rep.holds);
        assert_eq!(rep.r.size, 4);
        let c = rep.collision.unwrap();
        assert_eq!(c.progression.len(), 4);
        let (x, y) = (c.first_volume.unwrap(), c.second_volume.unwrap());
        assert!((x - y).abs() <= 1e-9 * x.max(y));
    }
}
