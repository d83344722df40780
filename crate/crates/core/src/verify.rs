//! Desk-scale reproduction checks, one per acceptance criterion. Shared by
//! the acceptance test suite and the `verify-paper` command.

use std::time::{Duration, Instant};

use num::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::{corner_frame, AffineMap};
use crate::bounds::{
    bartholdi, clement_bader, dd_ap_relation_check, is_progression_free, kobon_recursive_bound, r_k_exact,
    tamura, DEFAULT_RK_BUDGET,
};
use crate::cells::count_simplicial_cells;
use crate::combinatorics::binomial;
use crate::constructions::{
    ap_count, ap_equal_volume_witnesses, corner_branches, default_ngon_sides, default_thetas,
    gen_cfk, gen_even_rotation, gen_ngon_edges, gen_odd_helix, random_general_position, shift_covariance_residual,
    shift_map, CornerSurface, ShiftFamily,
};
use crate::error::Result;
use crate::geometry::{is_general_position, Arrangement, Hyperplane};
use crate::io;
use crate::linalg::factorial;
use crate::scalar::{Rational, Scalar};
use crate::search::{glue_arrangements, search_max_ties, verify_search_json, SearchConfig, SearchResult};
use crate::spectrum::{
    count_at_volume, distinct_subset_exact, volume_spectrum, SpectrumConfig, VolumeQuery, VolumeSpectrum,
    DEFAULT_NODE_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Stretch criteria report but never fail a run.
    pub blocking: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub search: SearchConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            search: SearchConfig::default(),
        }
    }
}

pub const CRITERIA: [(u32, &str); 13] = [
    (1, "cfk size identity"),
    (2, "cfk minimum-volume census"),
    (3, "unit-volume lower bound"),
    (4, "tangent constancy"),
    (5, "minimum-volume ceiling"),
    (6, "progression certificates"),
    (7, "distinct-volume reduction"),
    (8, "r_k oracle equivalence"),
    (9, "simplicial cells"),
    (10, "kobon recursion ratio"),
    (11, "star badge search"),
    (12, "gluing"),
    (13, "determinism and conservation"),
];

const LIMITS: [u64; 13] = [1, 60, 10, 10, 60, 30, 300, 60, 120, 1, 600, 600, 120];

/// Running tally of sub-checks; the first few failures are kept verbatim.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn error(&mut self, context: &str, e: crate::Error) {
        self.check(false, || format!("{context}: {e}"));
    }

    fn finish(self) -> (bool, String) {
        let mut detail = format!("{} checks", self.checks);
        if !self.failures.is_empty() {
            detail.push_str(&format!(", {} failed: ", self.failures.len()));
            detail.push_str(&self.failures.iter().take(4).cloned().collect::<Vec<_>>().join("; "));
        }
        if !self.notes.is_empty() {
            detail.push_str(" | ");
            detail.push_str(&self.notes.join("; "));
        }
        (self.failures.is_empty(), detail)
    }
}

pub fn run_criterion(id: u32, opts: &VerifyOptions) -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::default();
    match id {
        1 => cfk_sizes(&mut t),
        2 => cfk_minimum(&mut t),
        3 => unit_volume(&mut t),
        4 => tangent_constancy(&mut t),
        5 => minimum_ceiling(&mut t, opts.seed),
        6 => progression_certificates(&mut t),
        7 => distinct_reduction(&mut t),
        8 => rk_oracle(&mut t),
        9 => simplicial_cells(&mut t, opts.seed),
        10 => recursion_ratio(&mut t),
        11 => badge(&mut t, opts),
        12 => gluing(&mut t, opts),
        13 => determinism(&mut t, opts.seed),
        _ => t.check(false, || format!("unknown criterion {id}")),
    }
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(LIMITS.get(id as usize - 1).copied().unwrap_or(0));
    t.check(elapsed <= limit, || format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()));
    let (passed, detail) = t.finish();
    let blocking = id != 12;
    CriterionOutcome {
        id,
        name: CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1),
        passed: passed || !blocking,
        blocking,
        detail,
        seconds: elapsed.as_secs_f64(),
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id, opts)).collect()
}

fn cfk_sizes(t: &mut Tally) {
    let cases = [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2), (3, 3)];
    for (d, n) in cases {
        let expected = (d * d * n) as i64 + (d as i64 * (3 - d as i64)) / 2;
        match gen_cfk(d, n) {
            Ok(a) => t.check(a.len() as i64 == expected, || format!("cfk({d},{n}) has {} planes, want {expected}", a.len())),
            Err(e) => t.error("gen_cfk", e),
        }
    }
}

fn conservation<S: Scalar>(t: &mut Tally, sp: &VolumeSpectrum<S>, what: &str) {
    let total = sp.simplex_count() + sp.degenerate_count;
    let n = binomial(sp.n as u64, sp.dim as u64 + 1);
    t.check(total == n && sp.total_subsets == n, || format!("{what}: {total} of {n} subsets accounted for"));
}

fn cfk_minimum(t: &mut Tally) {
    for (d, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let a = match gen_cfk(d, n) {
            Ok(a) => a,
            Err(e) => return t.error("gen_cfk", e),
        };
        let sp = volume_spectrum(&a, &SpectrumConfig::default());
        conservation(t, &sp, &format!("cfk({d},{n})"));
        let want = Rational::from_ratio(1, factorial(d) as i64);
        let floor = factorial(d) * (n as u64).pow(d as u32);
        match sp.entries.first() {
            Some(e) => {
                t.check(e.volume == want, || format!("cfk({d},{n}) minimum {}", e.volume.render()));
                t.check(e.multiplicity >= floor, || format!("cfk({d},{n}) multiplicity {} < {floor}", e.multiplicity));
                t.note(format!("cfk({d},{n}) min {} x{}", e.volume.render(), e.multiplicity));
                if (d, n) == (2, 1) {
                    t.check(e.multiplicity == 2 && sp.degenerate_count == 8, || {
                        format!("cfk(2,1) gives x{} with {} degenerate", e.multiplicity, sp.degenerate_count)
                    });
                }
            }
            None => t.check(false, || format!("cfk({d},{n}) has an empty spectrum")),
        }
    }
}

fn unit_volume(t: &mut Tally) {
    let scaled = gen_cfk(3, 2).and_then(|a| a.to_float()).and_then(|a| a.scaled(6f64.cbrt()));
    match scaled {
        Ok(a) => {
            let sp = volume_spectrum(&a, &SpectrumConfig::default());
            conservation(t, &sp, "scaled cfk(3,2)");
            match count_at_volume(&sp, &VolumeQuery::Value(1.0)) {
                Ok(c) => {
                    t.check(c >= 48, || format!("{c} unit-volume tetrahedra < 48"));
                    t.note(format!("{c} unit-volume tetrahedra"));
                }
                Err(e) => t.error("count_at_volume", e),
            }
        }
        Err(e) => t.error("scaling", e),
    }
}

/// A fixed nontrivial frame: the corner of `x_i + 2 x_{i+1} = i` (cyclic),
/// whose determinant `1 - (-2)^d` never vanishes.
fn sample_frame(d: usize) -> Result<AffineMap<Rational>> {
    let hs = (0..d)
        .map(|i| {
            let mut normal = vec![0i64; d];
            normal[i] = 1;
            normal[(i + 1) % d] += 2;
            Hyperplane::from_ints(&normal, i as i64)
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Hyperplane<Rational>> = hs.iter().collect();
    corner_frame(&refs)
}

fn tangent_constancy(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let constants = [Rational::from_i64(1), Rational::from_ratio(2, 9), Rational::from_i64(-1)];
    for d in 2..=4 {
        for c in &constants {
            let frames = match sample_frame(d) {
                Ok(f) => [AffineMap::identity(d), f],
                Err(e) => return t.error("frame", e),
            };
            for frame in frames {
                for signs in corner_branches(d, c.sign()) {
                    let cs = match CornerSurface::new(frame.clone(), c.clone(), signs) {
                        Ok(cs) => cs,
                        Err(e) => return t.error("corner surface", e),
                    };
                    let det = frame.det().clone();
                    let scale = Rational::from_i64((d as i64).pow(d as u32)) / Rational::from_i64(factorial(d) as i64);
                    let want = c.clone().abs() * scale / det.abs();
                    let mut bad = 0;
                    for _ in 0..100 {
                        let p = cs.sample_point(&mut rng);
                        if cs.corner_simplex_volume(&p).ok() != Some(want.clone()) {
                            bad += 1;
                        }
                    }
                    t.check(bad == 0, || format!("d={d}, c={}: {bad} of 100 points off", c.render()));
                }
            }
        }
    }
}

fn minimum_ceiling(t: &mut Tally, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (d, n) in [(2usize, 8usize), (3, 7)] {
        let ceiling = (1u64 << d) * binomial(n as u64, d as u64);
        let mut worst = 0;
        for _ in 0..50 {
            match random_general_position(d, n, 6, &mut rng) {
                Ok(a) => {
                    let sp = volume_spectrum(&a, &SpectrumConfig::default());
                    conservation(t, &sp, "random arrangement");
                    let c = count_at_volume(&sp, &VolumeQuery::Min).unwrap_or(0);
                    worst = worst.max(c);
                    t.check(c <= ceiling, || format!("d={d}, n={n}: {c} minimum simplices > {ceiling}"));
                }
                Err(e) => return t.error("random arrangement", e),
            }
        }
        t.note(format!("d={d} n={n}: max {worst} <= {ceiling}"));
    }
}

fn ap_families(d: usize, n: usize) -> Result<Vec<(String, ShiftFamily)>> {
    let thetas = default_thetas(d, n);
    Ok(match d {
        2 => vec![
            (format!("ngon n={n}"), gen_ngon_edges(n, default_ngon_sides(n))?),
            (format!("rotation d=2 n={n}"), gen_even_rotation(2, n, thetas, 0)?),
        ],
        d if d % 2 == 0 => vec![(format!("rotation d={d} n={n}"), gen_even_rotation(d, n, thetas, 0)?)],
        _ => vec![(format!("helix d={d} n={n}"), gen_odd_helix(d, n, thetas, 0)?)],
    })
}

fn progression_certificates(t: &mut Tally) {
    let mut worst_cov: f64 = 0.0;
    let mut worst_vol: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    let mut pairs = 0;
    for d in 2..=4 {
        for n in d + 2..=8 {
            let families = match ap_families(d, n) {
                Ok(f) => f,
                Err(e) => {
                    t.error(&format!("d={d} n={n}"), e);
                    continue;
                }
            };
            for (name, f) in families {
                let a = &f.arrangement;
                t.check(is_general_position(a).holds, || format!("{name}: not in general position"));
                for step in 1..n as i64 {
                    let p = f.params.with_step(step);
                    match (shift_covariance_residual(a, &p), shift_map(&p)) {
                        (Ok(r), Ok(m)) => {
                            worst_cov = worst_cov.max(r);
                            worst_det = worst_det.max((m.det() - 1.0).abs());
                            t.check(r <= 1e-9, || format!("{name}: shift {step} residual {r:e}"));
                            t.check((m.det() - 1.0).abs() <= 1e-12, || format!("{name}: det {}", m.det()));
                        }
                        (Err(e), _) | (_, Err(e)) => t.error(&name, e),
                    }
                }
                match ap_equal_volume_witnesses(a, &f.params, 1e-9) {
                    Ok(w) => {
                        t.check(w.len() == ap_count(n, d + 2), || format!("{name}: {} pairs", w.len()));
                        for x in &w {
                            let rel = (x.first_volume - x.second_volume).abs() / x.first_volume.max(x.second_volume);
                            worst_vol = worst_vol.max(rel);
                            t.check(rel <= 1e-9, || format!("{name}: {:?} differs by {rel:e}", x.progression));
                        }
                        pairs += w.len();
                    }
                    Err(e) => t.error(&name, e),
                }
            }
        }
    }
    t.note(format!(
        "{pairs} equal-volume pairs, worst residual {worst_cov:.1e}, worst volume gap {worst_vol:.1e}, worst |det-1| {worst_det:.1e}"
    ));
}

fn distinct_reduction(t: &mut Tally) {
    for n in 5..=9 {
        let f = match gen_ngon_edges(n, default_ngon_sides(n)) {
            Ok(f) => f,
            Err(e) => return t.error("ngon", e),
        };
        match dd_ap_relation_check(&f.arrangement, crate::DEFAULT_EPS_VOL, DEFAULT_NODE_BUDGET) {
            Ok(r) => {
                t.check(r.conclusive, || format!("n={n}: search hit its budget"));
                t.check(r.holds, || format!("n={n}: distinct {} > r_4 {}", r.distinct.size, r.r.size));
                t.note(format!("n={n}: {}<={}", r.distinct.size, r.r.size));
            }
            Err(e) => t.error("dd check", e),
        }
    }
}

/// Largest progression-free subset of `1..=n` for every `n <= max_n`,
/// by enumerating all bitmasks of `[max_n]` once.
pub fn bitmask_rk_table(max_n: usize, k: usize) -> Vec<usize> {
    let mut best = vec![0usize; max_n + 1];
    for mask in 0u32..1 << max_n {
        let mut has_ap = false;
        for step in 1..max_n {
            let mut acc = mask;
            for t in 1..k {
                acc &= mask.checked_shr((t * step) as u32).unwrap_or(0);
            }
            if acc != 0 {
                has_ap = true;
                break;
            }
        }
        if !has_ap {
            let top = 32 - mask.leading_zeros() as usize;
            let size = mask.count_ones() as usize;
            for n in top..=max_n {
                best[n] = best[n].max(size);
            }
        }
    }
    best
}

fn rk_oracle(t: &mut Tally) {
    for k in 3..=5 {
        let table = bitmask_rk_table(20, k);
        for (n, &want) in table.iter().enumerate().skip(1) {
            match r_k_exact(n, k, DEFAULT_RK_BUDGET) {
                Ok(r) => {
                    t.check(r.exact && r.size == want, || format!("r_{k}({n}) = {} vs oracle {want}", r.size));
                    t.check(
                        r.witness.len() == r.size && is_progression_free(&r.witness, k),
                        || format!("r_{k}({n}) witness {:?}", r.witness),
                    );
                }
                Err(e) => t.error("r_k", e),
            }
        }
        t.note(format!("r_{k}(20) = {}", table[20]));
    }
}

fn simplicial_cells(t: &mut Tally, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for d in [2usize, 3] {
        let mut least = usize::MAX;
        for _ in 0..200 {
            match random_general_position(d, d + 2, 9, &mut rng) {
                Ok(a) => {
                    let c = count_simplicial_cells(&a).count;
                    least = least.min(c);
                    t.check(c >= 2, || format!("d={d}: only {c} cells"));
                }
                Err(e) => return t.error("random arrangement", e),
            }
        }
        t.note(format!("d={d}: at least {least} cells"));
    }
    match gen_cfk(2, 1) {
        Ok(a) => {
            let c = count_simplicial_cells(&a).count;
            t.check(c == 2, || format!("cfk(2,1) has {c} cells"));
        }
        Err(e) => t.error("gen_cfk", e),
    }
    for n in 3..=8usize {
        let m = n as u64;
        let mut bound = clement_bader(m).min(tamura(m));
        if let Some(b) = bartholdi(m) {
            bound = bound.min(b);
        }
        let mut most = 0;
        for _ in 0..20 {
            match random_general_position(2, n, 9, &mut rng) {
                Ok(a) => {
                    let c = count_simplicial_cells(&a).count as u64;
                    most = most.max(c);
                    t.check(c <= bound, || format!("n={n}: {c} cells > {bound}"));
                }
                Err(e) => return t.error("random arrangement", e),
            }
        }
        t.note(format!("n={n}: max {most} <= {bound}"));
    }
    for n in 4..=7usize {
        let bound = kobon_recursive_bound(3, n).unwrap_or(0);
        for _ in 0..5 {
            match random_general_position(3, n, 9, &mut rng) {
                Ok(a) => {
                    let c = count_simplicial_cells(&a).count as u64;
                    t.check(c <= bound, || format!("d=3 n={n}: {c} cells > {bound}"));
                }
                Err(e) => return t.error("random arrangement", e),
            }
        }
    }
}

fn recursion_ratio(t: &mut Tally) {
    for d in [3usize, 4] {
        let lead = 2.0 / factorial(d + 1) as f64;
        for n in [50usize, 100, 200] {
            match kobon_recursive_bound(d, n) {
                Ok(k) => {
                    let ratio = k as f64 / (n as f64).powi(d as i32) / lead;
                    t.check((ratio - 1.0).abs() <= 0.1, || format!("d={d} n={n}: ratio {ratio:.4}"));
                    t.note(format!("d={d} n={n}: {k} ratio {ratio:.4}"));
                }
                Err(e) => t.error("recursive bound", e),
            }
        }
    }
}

fn run_badge(opts: &VerifyOptions, seed: u64) -> Result<SearchResult> {
    let cfg = SearchConfig { seed, ..opts.search.clone() };
    search_max_ties(3, 6, 5, &cfg)
}

fn badge(t: &mut Tally, opts: &VerifyOptions) {
    match run_badge(opts, opts.seed) {
        Ok(r) => {
            t.check(r.success, || format!("no success in {} restarts, best {:?}", opts.search.restarts, r.score));
            let text = r.to_json().to_string();
            match verify_search_json(&text, opts.search.rel_tol) {
                Ok(s) => t.check(s == r.score, || format!("reloaded score {s:?} differs from {:?}", r.score)),
                Err(e) => t.error("reload", e),
            }
            t.note(format!(
                "{} of {} restarts succeed, ties {} gap {:.4}",
                r.successes, opts.search.restarts, r.score.ties, r.score.gap
            ));
        }
        Err(e) => t.error("search", e),
    }
}

fn gluing(t: &mut Tally, opts: &VerifyOptions) {
    let first = run_badge(opts, opts.seed);
    let second = run_badge(opts, opts.seed.wrapping_add(1));
    let (a, b) = match (first, second) {
        (Ok(a), Ok(b)) if a.success && b.success => (a, b),
        _ => {
            t.note("documented failure: no pair of badge successes to glue");
            return;
        }
    };
    let cfg = SearchConfig {
        restarts: 8,
        max_evals: 5_000,
        ..opts.search.clone()
    };
    match glue_arrangements(&a.arrangement, &b.arrangement, &cfg) {
        Ok(g) if g.success => t.note(format!("ties {} (target {}), gap {:.4}", g.score.ties, g.target, g.score.gap)),
        Ok(g) => t.note(format!(
            "documented failure: ties {} below target {}, gap {:.4}",
            g.score.ties, g.target, g.score.gap
        )),
        Err(e) => t.note(format!("documented failure: {e}")),
    }
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Option<T> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok().map(|p| p.install(f))
}

fn determinism(t: &mut Tally, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rational: Vec<Arrangement<Rational>> = vec![];
    for (d, n) in [(2, 3), (3, 2)] {
        if let Ok(a) = gen_cfk(d, n) {
            rational.push(a);
        }
    }
    if let Ok(a) = random_general_position(3, 9, 6, &mut rng) {
        rational.push(a);
    }
    let float: Vec<Arrangement<f64>> = (5..=9).filter_map(|n| gen_ngon_edges(n, 4 * n).ok()).map(|f| f.arrangement).collect();
    let cfg = SpectrumConfig::default();
    let report = |threads: usize| {
        with_threads(threads, || {
            let mut out = String::new();
            for a in &rational {
                out += &volume_spectrum(a, &cfg).to_json().to_string();
                out += &serde_json::to_string(&count_simplicial_cells(a)).unwrap_or_default();
            }
            for a in &float {
                out += &volume_spectrum(a, &cfg).to_json().to_string();
                out += &serde_json::to_string(&distinct_subset_exact(a, cfg.eps_vol, DEFAULT_NODE_BUDGET)).unwrap_or_default();
            }
            let small = SearchConfig { restarts: 4, max_evals: 2_000, seed, ..Default::default() };
            if let Ok(r) = search_max_ties(3, 5, 2, &small) {
                out += &r.to_json().to_string();
            }
            out
        })
    };
    let one = report(1);
    let many = report(4);
    t.check(one.is_some() && one == many, || "reports differ between 1 and 4 threads".into());
    for a in &rational {
        conservation(t, &volume_spectrum(a, &cfg), "rational");
    }
    for a in &float {
        conservation(t, &volume_spectrum(a, &cfg), "float");
    }
    let text = rational.first().map(|a| io::arrangement_to_json(a, None));
    if let (Some(text), Some(a)) = (text, rational.first()) {
        match io::typed_arrangement_from_json::<Rational>(&text) {
            Ok(b) => t.check(
                volume_spectrum(&b, &cfg).to_csv() == volume_spectrum(a, &cfg).to_csv(),
                || "spectrum changed across serialization".into(),
            ),
            Err(e) => t.error("reload", e),
        }
    }
    t.note(format!("{} bytes compared", one.map_or(0, |s| s.len())));
}
