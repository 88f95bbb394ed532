//! Shared fixtures, generators and independent oracles for the integration
//! tests and the acceptance harness.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;

use etopaq::belief::{BeliefGraph, BeliefLabel, Beliefs};
use etopaq::format::parse_ta;
use etopaq::region::{RegionSpace, TickTag};
use etopaq::strategy::{MetaStrategy, UnitPlan};
use etopaq::ta::{Action, ActionSet, Atom, Edge, Location, Rel, Ta, TimedRun, Q};

pub const FIXTURES: [&str; 7] = [
    "ta1.ta",
    "ta_opaque.ta",
    "ta_opaque2.ta",
    "ta_counterex.ta",
    "ta_nfv.ta",
    "robust_t2.ta",
    "robust_t3.ta",
];

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn user_ta(name: &str) -> Ta {
    parse_ta(&fixture(name)).unwrap()
}

pub fn space(name: &str) -> RegionSpace {
    RegionSpace::new(&user_ta(name)).unwrap()
}

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn set(ta: &Ta, names: &[&str]) -> ActionSet {
    names
        .iter()
        .fold(ActionSet::EMPTY, |s, n| s.with(ta.action_id(n).unwrap()))
}

pub fn label(ta: &Ta, tick: TickTag, names: &[&str]) -> BeliefLabel {
    BeliefLabel::new(tick, set(ta, names))
}

/// A run of the user automaton given as `(delay, edge)` pairs.
pub fn run(steps: &[(Q, usize)]) -> TimedRun {
    TimedRun::new(steps.to_vec())
}

// ---------------------------------------------------------------------------
// random automata and meta-strategies

const RELS: [Rel; 5] = [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt];

/// A random well-formed automaton: at most 4 locations, at most 2 user
/// clocks plus the urgency clock of the final location, constants at most 2.
pub fn random_ta<R: Rng>(rng: &mut R) -> Ta {
    let nclocks = rng.gen_range(1..=2);
    let mut clocks: Vec<String> = ["x", "y"][..nclocks]
        .iter()
        .map(|s| s.to_string())
        .collect();
    clocks.push("w".into());
    let w = nclocks;
    let mut actions = vec![Action {
        name: "u".into(),
        controllable: false,
    }];
    for name in ["a", "b"].iter().take(rng.gen_range(1..=2)) {
        actions.push(Action {
            name: name.to_string(),
            controllable: true,
        });
    }
    let extra = rng.gen_bool(0.5);
    let mut names = vec!["l0", "lpriv", "lf"];
    if extra {
        names.push("l1");
    }
    let lf = 2;
    let locations: Vec<Location> = names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let invariant = if i == lf {
                vec![Atom::new(w, Rel::Eq, 0)]
            } else if rng.gen_bool(0.4) {
                vec![Atom::new(
                    rng.gen_range(0..nclocks),
                    Rel::Le,
                    rng.gen_range(1..=2),
                )]
            } else {
                Vec::new()
            };
            Location {
                name: n.to_string(),
                invariant,
            }
        })
        .collect();
    let sources: Vec<usize> = (0..locations.len()).filter(|&l| l != lf).collect();
    let mut edges = Vec::new();
    // make the private and final locations reachable in principle
    let mut wanted = vec![(0, 1), (1, lf), (0, lf)];
    for _ in 0..rng.gen_range(0..=3) {
        let s = sources[rng.gen_range(0..sources.len())];
        let t = rng.gen_range(0..locations.len());
        wanted.push((s, t));
    }
    for (s, t) in wanted {
        let mut guard = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let c = rng.gen_range(0..nclocks);
            guard.push(Atom::new(
                c,
                RELS[rng.gen_range(0..5)],
                rng.gen_range(0..=2),
            ));
        }
        let mut resets: Vec<usize> = (0..nclocks).filter(|_| rng.gen_bool(0.3)).collect();
        if t == lf {
            resets.push(w);
        }
        let action = match rng.gen_range(0..5) {
            0 => None,
            k => Some(k % actions.len()),
        };
        edges.push(Edge {
            source: s,
            guard,
            action,
            resets,
            target: t,
        });
    }
    Ta {
        clocks,
        actions,
        locations,
        edges,
        init: 0,
        private: 1,
        finals: vec![lf],
        tick: None,
        dup: None,
    }
}

fn random_set<R: Rng>(rng: &mut R, ta: &Ta) -> ActionSet {
    ta.controllable_actions()
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .fold(ActionSet::EMPTY, |s, a| s.with(a))
}

fn random_plan<R: Rng>(rng: &mut R, ta: &Ta) -> UnitPlan {
    let m = rng.gen_range(1..=2);
    UnitPlan::new(
        random_set(rng, ta),
        (0..m).map(|_| random_set(rng, ta)).collect(),
    )
}

/// A random lasso with stem and loop of at most two units, each interval
/// split into at most two choices.
pub fn random_phi<R: Rng>(rng: &mut R, ta: &Ta) -> MetaStrategy {
    let stem = (0..rng.gen_range(0..=2))
        .map(|_| random_plan(rng, ta))
        .collect();
    let cycle = (0..rng.gen_range(1..=2))
        .map(|_| random_plan(rng, ta))
        .collect();
    MetaStrategy::new(stem, cycle).unwrap()
}

// ---------------------------------------------------------------------------
// region equivalence, straight from the three conditions

fn frac(v: Q) -> Q {
    v - v.floor()
}

/// Same location, same integer parts or both above the maximal constant,
/// same zero fractional parts and the same ordering of fractional parts
/// among bounded clocks.
pub fn region_equivalent(cmax: &[u32], a: (usize, &[Q]), b: (usize, &[Q])) -> bool {
    if a.0 != b.0 {
        return false;
    }
    let (va, vb) = (a.1, b.1);
    let bounded = |v: &[Q], c: usize| v[c] <= Q::from_integer(cmax[c] as i64);
    let n = cmax.len();
    for c in 0..n {
        let (ba, bb) = (bounded(va, c), bounded(vb, c));
        if ba != bb {
            return false;
        }
        if !ba {
            continue;
        }
        if va[c].floor() != vb[c].floor() {
            return false;
        }
        if frac(va[c]).is_zero() != frac(vb[c]).is_zero() {
            return false;
        }
    }
    for c in 0..n {
        for d in 0..n {
            if bounded(va, c) && bounded(va, d) {
                let fa = frac(va[c]) <= frac(va[d]);
                let fb = frac(vb[c]) <= frac(vb[d]);
                if fa != fb {
                    return false;
                }
            }
        }
    }
    true
}

/// A random valuation on a grid of quarters, biased towards small values so
/// that equivalent pairs are common.
pub fn random_valuation<R: Rng>(rng: &mut R, cmax: &[u32]) -> Vec<Q> {
    cmax.iter()
        .map(|&c| q(rng.gen_range(0..=4 * (c as i64 + 2)), 4))
        .collect()
}

// ---------------------------------------------------------------------------
// admission, transcribed case by case from the definition

fn allowed(ta: &Ta, e: ActionSet, a: Option<usize>) -> bool {
    a.is_none_or(|a| !ta.actions[a].controllable || e.contains(a))
}

/// `prefix(n) ⊢ v` where `prefix(n)` is the first `n` steps of `run`, a run
/// of the analysis automaton. Plain recursion, no memoization.
pub fn admits_direct(sp: &RegionSpace, run: &TimedRun, n: usize, v: &[BeliefLabel]) -> bool {
    let ta = sp.ta();
    if n == 0 {
        return v.len() == 1 && v[0].tick == TickTag::Zero;
    }
    let Some(last) = v.last() else { return false };
    let states = ta.replay(&run.prefix(n)).unwrap();
    let z = sp.tick_clock();
    let (d, e) = run.steps[n - 1];
    let action = ta.edges[e].action;
    let ok_action = |set: ActionSet| allowed(ta, set, action);
    let before = states[n - 1].val[z];
    let after = before + d;
    let zero = Q::zero();

    // condition 1: no delay
    if d == zero {
        return ok_action(last.enabled) && admits_direct(sp, run, n - 1, v);
    }
    // split points p with v = v'[..p] . (1,E0) . (†1,E1) ... (†m,Em),
    // †k = 0+ for 1 <= k < m
    let len = v.len();
    let splits: Vec<usize> = (0..len)
        .filter(|&p| {
            v[p].tick == TickTag::One
                && (p + 1..len.saturating_sub(1)).all(|k| v[k].tick == TickTag::ZeroPlus)
        })
        .collect();
    if d == Q::one() {
        // condition 3: v' . (1,E0) . (0+,E1) ... (0+,Em) . (1,E)
        if last.tick != TickTag::One || !ok_action(last.enabled) || len < 2 {
            return false;
        }
        return (0..len - 1).any(|p| {
            v[p].tick == TickTag::One
                && (p + 1..len - 1).all(|k| v[k].tick == TickTag::ZeroPlus)
                && admits_direct(sp, run, n - 1, &v[..p])
        });
    }
    if d >= Q::one() {
        return false;
    }
    // condition 2
    if !ok_action(last.enabled) {
        return false;
    }
    let prefix_admitted = |p: usize, upto: std::ops::RangeInclusive<usize>| {
        upto.into_iter()
            .any(|i| admits_direct(sp, run, n - 1, &v[..p + 1 + i]))
    };
    splits.into_iter().any(|p| {
        let m = len - 1 - p;
        let a = !frac(before).is_zero()
            && !frac(after).is_zero()
            && (m == 0 || last.tick == TickTag::ZeroPlus)
            && prefix_admitted(p, 0..=m);
        let b = frac(before).is_zero()
            && (m == 0 || last.tick == TickTag::ZeroPlus)
            && admits_direct(sp, run, n - 1, &v[..p]);
        let c = frac(after).is_zero()
            && last.tick == TickTag::One
            && m >= 1
            && prefix_admitted(p, 0..=m - 1);
        a || b || c
    })
}

/// Every label sequence of length at most `max_len`.
pub fn all_sequences(ta: &Ta, max_len: usize) -> Vec<Vec<BeliefLabel>> {
    let sets = ta.controllable_set().subsets();
    let mut labels = Vec::new();
    for t in [TickTag::Zero, TickTag::ZeroPlus, TickTag::One] {
        for &e in &sets {
            labels.push(BeliefLabel::new(t, e));
        }
    }
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for v in &layer {
            for &l in &labels {
                let mut w: Vec<BeliefLabel> = v.clone();
                w.push(l);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

// ---------------------------------------------------------------------------
// reference belief automata

pub struct ReferenceGraph {
    pub nodes: Vec<&'static str>,
    /// `(source, tick, enabled action names, target)`
    pub edges: Vec<(&'static str, TickTag, &'static [&'static str], &'static str)>,
}

const A: &[&str] = &["a"];
const E: &[&str] = &[];

/// The seven-state belief automaton of the one-clock opaque example.
pub fn opaque_reference() -> ReferenceGraph {
    use TickTag::{One, Zero, ZeroPlus};
    ReferenceGraph {
        nodes: vec!["bot", "b0", "b0'", "b(0,1)", "b(0,1)'", "b1", "b1'"],
        edges: vec![
            ("bot", Zero, E, "b0'"),
            ("bot", Zero, A, "b0"),
            ("b0", One, A, "b(0,1)"),
            ("b0", One, E, "b(0,1)'"),
            ("b0'", One, A, "b(0,1)"),
            ("b0'", One, E, "b(0,1)'"),
            ("b(0,1)", One, A, "b1"),
            ("b(0,1)", One, E, "b1'"),
            ("b(0,1)", ZeroPlus, E, "b(0,1)'"),
            ("b1", One, A, "b(0,1)"),
            ("b1", One, E, "b(0,1)'"),
            ("b(0,1)'", One, A, "b1"),
            ("b(0,1)'", One, E, "b1'"),
            ("b(0,1)'", ZeroPlus, A, "b(0,1)"),
            ("b1'", One, A, "b(0,1)"),
            ("b1'", One, E, "b(0,1)'"),
            ("b(0,1)", ZeroPlus, A, "b(0,1)"),
            ("b(0,1)'", ZeroPlus, E, "b(0,1)'"),
        ],
    }
}

/// Region contents of the one-clock reference automaton, as (location, value of x).
pub fn opaque_reference_contents() -> BTreeMap<&'static str, BTreeSet<(&'static str, &'static str)>>
{
    let b0s = vec![("l0", "0"), ("lpriv", "0"), ("lf'", "0")];
    let mut b0 = b0s.clone();
    b0.push(("lf", "0"));
    let b01s = vec![("l0", "(0,1)"), ("lpriv", "(0,1)")];
    let mut b01 = b01s.clone();
    b01.push(("lf", "(0,1)"));
    let b1s = vec![
        ("l0", "1"),
        ("l0", "0"),
        ("lpriv", "1"),
        ("lpriv", "0"),
        ("lf'", "0"),
    ];
    let mut b1 = b1s.clone();
    b1.extend([("lf", "0"), ("lf", "1")]);
    [
        ("b0'", b0s),
        ("b0", b0),
        ("b(0,1)'", b01s),
        ("b(0,1)", b01),
        ("b1'", b1s),
        ("b1", b1),
    ]
    .into_iter()
    .map(|(k, v)| (k, v.into_iter().collect()))
    .collect()
}

/// The fifteen-state belief automaton of the two-clock opaque example.
pub fn opaque2_reference() -> ReferenceGraph {
    use TickTag::{One, Zero, ZeroPlus};
    let nodes = vec![
        "bot", "b0", "b0'", "b(0,1)", "b(0,1)'", "b1", "b1'", "b(1,2)", "b(1,2)'", "b2", "b2'",
        "b(2,3)", "b(2,3)'", "b3", "b3'",
    ];
    let mut edges = vec![("bot", Zero, E, "b0'"), ("bot", Zero, A, "b0")];
    // point to interval, and interval to point, for each unit
    let layers = [
        ("b0", "b0'", "b(0,1)", "b(0,1)'", "b1", "b1'"),
        ("b1", "b1'", "b(1,2)", "b(1,2)'", "b2", "b2'"),
        ("b2", "b2'", "b(2,3)", "b(2,3)'", "b3", "b3'"),
    ];
    for (p, ps, i, is, n, ns) in layers {
        for src in [p, ps] {
            edges.push((src, One, A, i));
            edges.push((src, One, E, is));
        }
        for src in [i, is] {
            edges.push((src, One, A, n));
            edges.push((src, One, E, ns));
        }
        edges.push((i, ZeroPlus, E, is));
        edges.push((is, ZeroPlus, A, i));
        edges.push((i, ZeroPlus, A, i));
        edges.push((is, ZeroPlus, E, is));
    }
    for src in ["b3", "b3'"] {
        edges.push((src, One, A, "b(2,3)"));
        edges.push((src, One, E, "b(2,3)'"));
    }
    ReferenceGraph { nodes, edges }
}

type LabelKey = (TickTag, ActionSet);

/// Searches for a bijection between the reference nodes and the explored
/// graph's nodes that maps the labelled edge set exactly, starting from
/// `bot`. Returns the reference-name to node-index mapping.
pub fn isomorphism(
    ta: &Ta,
    fig: &ReferenceGraph,
    g: &BeliefGraph,
) -> Option<BTreeMap<&'static str, usize>> {
    if fig.nodes.len() != g.nodes.len() {
        return None;
    }
    let fidx: BTreeMap<&str, usize> = fig.nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let fedges: BTreeSet<(usize, LabelKey, usize)> = fig
        .edges
        .iter()
        .map(|(s, t, e, d)| (fidx[s], (*t, set(ta, e)), fidx[d]))
        .collect();
    if fedges.len() != fig.edges.len() {
        return None;
    }
    let gedges: BTreeSet<(usize, LabelKey, usize)> = g
        .edges
        .iter()
        .map(|&(s, l, d)| (s, (l.tick, l.enabled), d))
        .collect();
    if fedges.len() != gedges.len() {
        return None;
    }
    let n = fig.nodes.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn consistent(
        map: &[usize],
        fedges: &BTreeSet<(usize, LabelKey, usize)>,
        gedges: &BTreeSet<(usize, LabelKey, usize)>,
    ) -> bool {
        fedges.iter().all(|&(s, l, d)| {
            map[s] == usize::MAX || map[d] == usize::MAX || gedges.contains(&(map[s], l, map[d]))
        })
    }
    fn search(
        k: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        fedges: &BTreeSet<(usize, LabelKey, usize)>,
        gedges: &BTreeSet<(usize, LabelKey, usize)>,
    ) -> bool {
        if k == map.len() {
            return true;
        }
        for c in 0..map.len() {
            if used[c] || (k == 0) != (c == 0) {
                continue;
            }
            map[k] = c;
            used[c] = true;
            if consistent(map, fedges, gedges) && search(k + 1, map, used, fedges, gedges) {
                return true;
            }
            used[c] = false;
            map[k] = usize::MAX;
        }
        false
    }
    // node 0 is bot in both graphs
    let bot = fidx["bot"];
    let mut order: Vec<usize> = vec![bot];
    order.extend((0..n).filter(|&i| i != bot));
    let perm_fedges: BTreeSet<(usize, LabelKey, usize)> = {
        let pos: Vec<usize> = {
            let mut p = vec![0; n];
            for (k, &i) in order.iter().enumerate() {
                p[i] = k;
            }
            p
        };
        fedges
            .iter()
            .map(|&(s, l, d)| (pos[s], l, pos[d]))
            .collect()
    };
    if !search(0, &mut map, &mut used, &perm_fedges, &gedges) {
        return None;
    }
    Some(
        order
            .iter()
            .enumerate()
            .map(|(k, &i)| (fig.nodes[i], map[k]))
            .collect(),
    )
}

/// Regions of a belief in the one-clock notation: location and value of `x`.
pub fn x_projection(sp: &RegionSpace, b: &etopaq::belief::Belief) -> BTreeSet<(String, String)> {
    let x = sp.ta().clock_id("x").unwrap();
    b.regions()
        .iter()
        .map(|r| {
            (
                sp.ta().locations[r.loc].name.clone(),
                sp.clock_interval(r, x),
            )
        })
        .collect()
}

pub fn beliefs_of(sp: &RegionSpace) -> Beliefs<'_> {
    Beliefs::new(sp)
}

// ---------------------------------------------------------------------------
// bucket flags from the belief side and from the region oracle

use etopaq::oracle::{oracle_buckets, OracleTable};
use etopaq::strategy::{encountered_beliefs, Bucket, Encounters};

/// Flags of any bucket from the encountered beliefs, following the
/// periodic tail.
pub fn encounter_flags(beliefs: &Beliefs<'_>, enc: &Encounters, b: Bucket) -> (bool, bool) {
    let (k, off) = match b {
        Bucket::Point(k) => (k as usize, 0),
        Bucket::Interval(k) => (k as usize, 1),
    };
    let k = if k < enc.units {
        k
    } else {
        let p = enc.units - enc.repeat_unit;
        enc.repeat_unit + (k - enc.repeat_unit) % p
    };
    let belief = &enc.buckets[2 * k + off].1;
    (
        beliefs.has_private_final(belief),
        beliefs.has_public_final(belief),
    )
}

/// Compares both tables on every bucket up to a horizon covering both
/// stems and a common period; returns the first disagreement.
pub fn flags_agree(sp: &RegionSpace, phi: &MetaStrategy) -> Result<(), String> {
    let beliefs = Beliefs::new(sp);
    let enc = encountered_beliefs(&beliefs, phi);
    let table = oracle_buckets(sp, phi);
    let period = (enc.units - enc.repeat_unit) * (table.units - table.repeat_unit);
    let horizon = enc.units.max(table.units) + period;
    for k in 0..horizon as u64 {
        for b in [Bucket::Point(k), Bucket::Interval(k)] {
            let (e, o) = (encounter_flags(&beliefs, &enc, b), table.flags(b));
            if e != o {
                return Err(format!("bucket {b}: beliefs {e:?}, oracle {o:?}"));
            }
        }
    }
    Ok(())
}

/// Buckets of the first `units` units flagged private and public.
pub fn flagged(table: &OracleTable, units: u64) -> (Vec<Bucket>, Vec<Bucket>) {
    let all = (0..units).flat_map(|k| [Bucket::Point(k), Bucket::Interval(k)]);
    let mut priv_ = Vec::new();
    let mut pub_ = Vec::new();
    for b in all {
        let (p, q) = table.flags(b);
        if p {
            priv_.push(b);
        }
        if q {
            pub_.push(b);
        }
    }
    (priv_, pub_)
}

/// `(seed, automaton, meta-strategy)` for the seeded random population.
pub fn random_pairs(n: u64) -> impl Iterator<Item = (u64, Ta, MetaStrategy)> {
    use rand::SeedableRng;
    (0..n).map(|seed| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let ta = random_ta(&mut rng);
        let phi = random_phi(&mut rng, &ta);
        (seed, ta, phi)
    })
}

// ---------------------------------------------------------------------------
// region canonicity and belief monotonicity

use etopaq::region::region_of;

/// Number of region_of / direct-oracle disagreements over `pairs` random
/// valuation pairs, plus how many pairs were equivalent.
pub fn canonicity_disagreements(sp: &RegionSpace, pairs: usize, seed: u64) -> (usize, usize) {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let cmax = sp.cmax();
    let nloc = sp.ta().locations.len();
    let (mut bad, mut equiv) = (0, 0);
    for _ in 0..pairs {
        let l1 = rng.gen_range(0..nloc);
        let l2 = if rng.gen_bool(0.8) {
            l1
        } else {
            rng.gen_range(0..nloc)
        };
        let a = random_valuation(&mut rng, cmax);
        let b = random_valuation(&mut rng, cmax);
        let direct = region_equivalent(cmax, (l1, &a), (l2, &b));
        equiv += usize::from(direct);
        if (region_of(l1, &a, cmax) == region_of(l2, &b, cmax)) != direct {
            bad += 1;
        }
    }
    (bad, equiv)
}

/// Violations of subset-monotonicity in the enabled set, and of
/// weak leak implying full leak, over all explored beliefs.
pub fn monotonicity_violations(sp: &RegionSpace) -> Vec<String> {
    let beliefs = Beliefs::new(sp);
    let g = beliefs.explore(100_000);
    assert!(g.complete);
    let sets = sp.ta().controllable_set().subsets();
    let mut out = Vec::new();
    for b in &g.nodes {
        if beliefs.leaking_weak(b) && !beliefs.leaking_full(b) {
            out.push(format!("weak leak without full leak: {b:?}"));
        }
        let ticks: &[TickTag] = if b.is_bottom() {
            &[TickTag::Zero]
        } else {
            &[TickTag::ZeroPlus, TickTag::One]
        };
        for &t in ticks {
            for &small in &sets {
                for &big in &sets {
                    if !small.is_subset(big) {
                        continue;
                    }
                    let lo = beliefs.post(b, BeliefLabel::new(t, small));
                    let hi = beliefs.post(b, BeliefLabel::new(t, big));
                    if !lo.is_subset(&hi) {
                        out.push(format!("{b:?} {t:?} {small:?} {big:?}"));
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// hand-built runs for the admission checks

/// The runs (1,e1)(0,e2)(0,e3) and (1,e1)(0,e4) of the one-clock opaque
/// example, 0-based.
pub fn opaque_runs() -> Vec<TimedRun> {
    vec![
        run(&[(q(1, 1), 0), (q(0, 1), 1), (q(0, 1), 2)]),
        run(&[(q(1, 1), 0), (q(0, 1), 3)]),
    ]
}

/// Five short user runs used for the exhaustive check.
pub fn hand_built_runs() -> Vec<(&'static str, TimedRun)> {
    let mut out: Vec<(&str, TimedRun)> = opaque_runs()
        .into_iter()
        .map(|r| ("ta_opaque.ta", r))
        .collect();
    // a at one half
    out.push(("ta_opaque.ta", run(&[(q(1, 2), 3)])));
    // a at three halves, across a tick
    out.push(("ta_opaque.ta", run(&[(q(1, 1), 0), (q(1, 2), 3)])));
    // the counterexample's private run of duration 2.2
    out.push((
        "ta_counterex.ta",
        run(&[(q(1, 5), 3), (q(1, 1), 4), (q(1, 1), 5)]),
    ));
    out
}
