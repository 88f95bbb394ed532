//! The one-player Büchi game over pairs of beliefs whose winning lassos are
//! exactly the meta-strategies keeping every bucket non-leaking.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::belief::{Belief, BeliefLabel, Beliefs};
use crate::region::TickTag;
use crate::strategy::{
    encountered_beliefs, Bucket, Encounters, MetaStrategy, StrategyError, UnitPlan,
};

/// Which opacity notion the game enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Full,
    Weak,
    /// Only interval buckets may not leak.
    Almost,
    /// Interval buckets may not leak; a leaking point is tolerated next to an
    /// interval bucket that contains final regions.
    Closed,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Full, Mode::Weak, Mode::Almost, Mode::Closed];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Weak => "weak",
            Mode::Almost => "almost",
            Mode::Closed => "closed",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown mode `{0}`")]
pub struct UnknownMode(pub String);

impl FromStr for Mode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Mode::Full),
            "weak" => Ok(Mode::Weak),
            "almost" => Ok(Mode::Almost),
            "closed" => Ok(Mode::Closed),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

/// A game position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameState {
    /// Belief after the last label.
    pub current: Belief,
    /// Union of beliefs since the last tick-1 label: the belief of the
    /// bucket being traversed.
    pub accumulated: Belief,
    /// Whether the last tick-1 label reached an integer instant.
    pub at_integer: bool,
    /// Closed mode: the last point leaked, so the current interval must
    /// contain a final region.
    pub obligation: bool,
    /// Closed mode: the previous interval bucket contained a final region.
    pub prev_finals: bool,
}

impl GameState {
    pub fn initial() -> Self {
        GameState {
            current: Belief::Bottom,
            accumulated: Belief::empty(),
            at_integer: true,
            obligation: false,
            prev_finals: false,
        }
    }
}

/// Labels a player may choose from `s`: `(0, E)` from `⊥`, a tick-1 label
/// at an integer instant, and `0+` or tick-1 labels inside an interval.
fn labels_for(beliefs: &Beliefs<'_>, s: &GameState) -> Vec<BeliefLabel> {
    let sets = beliefs.space().ta().controllable_set().subsets();
    let ticks: &[TickTag] = if s.current.is_bottom() {
        &[TickTag::Zero]
    } else if s.at_integer {
        &[TickTag::One]
    } else {
        &[TickTag::ZeroPlus, TickTag::One]
    };
    ticks
        .iter()
        .flat_map(|&t| sets.iter().map(move |&e| BeliefLabel::new(t, e)))
        .collect()
}

/// Legal moves from `s`, sorted by label. Tick-1 labels are pruned when the
/// bucket being left leaks for `mode`.
pub fn game_successors(
    beliefs: &Beliefs<'_>,
    s: &GameState,
    mode: Mode,
) -> Vec<(BeliefLabel, GameState)> {
    let mut out = Vec::new();
    for label in labels_for(beliefs, s) {
        let next = beliefs.post(&s.current, label);
        let mut t = GameState {
            current: next.clone(),
            accumulated: s.accumulated.union(&next),
            at_integer: s.at_integer,
            obligation: false,
            prev_finals: false,
        };
        match label.tick {
            TickTag::Zero => {
                t.accumulated = next;
            }
            TickTag::ZeroPlus => {
                if mode == Mode::Closed {
                    t.obligation = s.obligation;
                    t.prev_finals = s.prev_finals;
                }
            }
            TickTag::One => {
                let b = &s.accumulated;
                let leaving_point = s.at_integer;
                let ok = match mode {
                    Mode::Full => !beliefs.leaking_full(b),
                    Mode::Weak => !beliefs.leaking_weak(b),
                    Mode::Almost => leaving_point || !beliefs.leaking_full(b),
                    Mode::Closed if leaving_point => {
                        if beliefs.leaking_full(b) && !s.prev_finals {
                            t.obligation = true;
                        }
                        t.prev_finals = s.prev_finals;
                        true
                    }
                    Mode::Closed => {
                        let finals = beliefs.finals_present(b);
                        t.prev_finals = finals;
                        !beliefs.leaking_full(b) && (!s.obligation || finals)
                    }
                };
                if !ok {
                    continue;
                }
                t.accumulated = next;
                t.at_integer = !s.at_integer;
            }
        }
        out.push((label, t));
    }
    out
}

/// Limits on exploration.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub state_cap: usize,
    pub time_limit: Option<Duration>,
    pub workers: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            state_cap: 1_000_000,
            time_limit: Some(Duration::from_secs(300)),
            workers: 1,
        }
    }
}

impl SolveOptions {
    /// Defaults, with the state cap taken from `ETOPAQ_STATE_CAP` if set.
    pub fn from_env() -> Self {
        let mut o = SolveOptions::default();
        if let Some(cap) = std::env::var("ETOPAQ_STATE_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            o.state_cap = cap;
        }
        o
    }
}

/// The explored game arena; state 0 is the initial state and states are
/// numbered in breadth-first order.
#[derive(Clone, Debug)]
pub struct GameGraph {
    pub states: Vec<GameState>,
    pub edges: Vec<Vec<(BeliefLabel, usize)>>,
    /// Breadth-first tree: predecessor and label of every non-initial state.
    pub parent: Vec<Option<(usize, BeliefLabel)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exploration {
    Complete,
    CapReached { states: usize },
    TimedOut { states: usize, elapsed: Duration },
}

/// Explores the game breadth-first. Successors of a whole layer are
/// computed in parallel and merged in order, so numbering does not depend
/// on the number of workers.
pub fn explore_game(
    beliefs: &Beliefs<'_>,
    mode: Mode,
    opts: &SolveOptions,
) -> (GameGraph, Exploration) {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    let start = Instant::now();
    let mut index: HashMap<GameState, usize> = HashMap::new();
    let mut g = GameGraph {
        states: vec![GameState::initial()],
        edges: vec![Vec::new()],
        parent: vec![None],
    };
    index.insert(GameState::initial(), 0);
    let mut layer = vec![0usize];
    while !layer.is_empty() {
        if let Some(limit) = opts.time_limit {
            if start.elapsed() > limit {
                let states = g.states.len();
                return (
                    g,
                    Exploration::TimedOut {
                        states,
                        elapsed: start.elapsed(),
                    },
                );
            }
        }
        let succs: Vec<Vec<(BeliefLabel, GameState)>> = pool.install(|| {
            layer
                .par_iter()
                .map(|&i| game_successors(beliefs, &g.states[i], mode))
                .collect()
        });
        let mut next_layer = Vec::new();
        for (&i, moves) in layer.iter().zip(succs) {
            for (label, t) in moves {
                let j = match index.get(&t) {
                    Some(&j) => j,
                    None => {
                        if g.states.len() >= opts.state_cap {
                            let states = g.states.len();
                            return (g, Exploration::CapReached { states });
                        }
                        let j = g.states.len();
                        index.insert(t.clone(), j);
                        g.states.push(t);
                        g.edges.push(Vec::new());
                        g.parent.push(Some((i, label)));
                        next_layer.push(j);
                        j
                    }
                };
                g.edges[i].push((label, j));
            }
        }
        layer = next_layer;
    }
    (g, Exploration::Complete)
}

/// A winning play: `stem` then `cycle` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningWitness {
    pub stem: Vec<BeliefLabel>,
    pub cycle: Vec<BeliefLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(WinningWitness),
    Unsat { explored: usize },
    Indeterminate { explored: usize, reason: String },
}

/// Strongly connected components (iterative Tarjan); returns a component id
/// per state.
fn components(edges: &[Vec<(BeliefLabel, usize)>]) -> Vec<usize> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < edges[v].len() {
                let w = edges[v][*k].1;
                *k += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// A reachable cycle through a tick-1 edge, with the shortest stem to the
/// earliest such component and the shortest such cycle from its entry.
pub fn find_lasso(g: &GameGraph) -> Option<WinningWitness> {
    let comp = components(&g.edges);
    let good = |u: usize, l: &BeliefLabel, w: usize| l.tick == TickTag::One && comp[u] == comp[w];
    let mut good_comp = vec![false; g.states.len()];
    for (u, es) in g.edges.iter().enumerate() {
        if es.iter().any(|(l, w)| good(u, l, *w)) {
            good_comp[comp[u]] = true;
        }
    }
    let entry = (0..g.states.len()).find(|&u| good_comp[comp[u]])?;
    let c = comp[entry];

    let mut stem = Vec::new();
    let mut cur = entry;
    while let Some((p, l)) = g.parent[cur] {
        stem.push(l);
        cur = p;
    }
    stem.reverse();

    // forward distances from the entry, and backward distances to it, inside c
    let bfs = |from: usize, forward: bool| {
        let mut dist = vec![usize::MAX; g.states.len()];
        let mut via: Vec<Option<(usize, BeliefLabel)>> = vec![None; g.states.len()];
        dist[from] = 0;
        let mut q = VecDeque::from([from]);
        let mut rev: Vec<Vec<(BeliefLabel, usize)>> = Vec::new();
        if !forward {
            rev = vec![Vec::new(); g.states.len()];
            for (u, es) in g.edges.iter().enumerate() {
                for &(l, w) in es {
                    if comp[u] == c && comp[w] == c {
                        rev[w].push((l, u));
                    }
                }
            }
        }
        while let Some(u) = q.pop_front() {
            let es = if forward { &g.edges[u] } else { &rev[u] };
            for &(l, w) in es {
                if comp[w] == c && dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    via[w] = Some((u, l));
                    q.push_back(w);
                }
            }
        }
        (dist, via)
    };
    let (fwd, fvia) = bfs(entry, true);
    let (bwd, bvia) = bfs(entry, false);
    let mut best: Option<(usize, usize, BeliefLabel, usize)> = None;
    for u in 0..g.states.len() {
        if comp[u] != c || fwd[u] == usize::MAX {
            continue;
        }
        for &(l, w) in &g.edges[u] {
            if !good(u, &l, w) || bwd[w] == usize::MAX {
                continue;
            }
            let len = fwd[u] + 1 + bwd[w];
            if best.as_ref().is_none_or(|b| len < b.0) {
                best = Some((len, u, l, w));
            }
        }
    }
    let (_, u, l, w) = best?;
    let mut cycle = Vec::new();
    let mut cur = u;
    while cur != entry {
        let (p, pl) = fvia[cur].unwrap();
        cycle.push(pl);
        cur = p;
    }
    cycle.reverse();
    cycle.push(l);
    let mut cur = w;
    while cur != entry {
        let (n, nl) = bvia[cur].unwrap();
        cycle.push(nl);
        cur = n;
    }
    Some(WinningWitness { stem, cycle })
}

/// Decides whether some meta-strategy keeps every bucket non-leaking.
pub fn solve(beliefs: &Beliefs<'_>, mode: Mode, opts: &SolveOptions) -> Verdict {
    let (g, status) = explore_game(beliefs, mode, opts);
    match status {
        Exploration::Complete => match find_lasso(&g) {
            Some(w) => Verdict::Sat(w),
            None => Verdict::Unsat {
                explored: g.states.len(),
            },
        },
        Exploration::CapReached { states } => Verdict::Indeterminate {
            explored: states,
            reason: format!("state cap of {} reached", opts.state_cap),
        },
        Exploration::TimedOut { states, elapsed } => Verdict::Indeterminate {
            explored: states,
            reason: format!("time limit reached after {:.1}s", elapsed.as_secs_f64()),
        },
    }
}

fn parse_units(labels: &[BeliefLabel], offset: usize) -> Result<Vec<UnitPlan>, StrategyError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        let at_point = labels[i].enabled;
        i += 1;
        match labels.get(i) {
            Some(l) if l.tick == TickTag::One => {}
            _ => return Err(StrategyError::BadWitness(offset + i)),
        }
        let mut in_interval = vec![labels[i].enabled];
        i += 1;
        while i < labels.len() && labels[i].tick == TickTag::ZeroPlus {
            in_interval.push(labels[i].enabled);
            i += 1;
        }
        out.push(UnitPlan::new(at_point, in_interval));
    }
    Ok(out)
}

/// Reads a meta-strategy off a winning lasso: the labels between two
/// tick-1 labels reaching integer instants form one unit. The loop is
/// rotated to start on such a label.
pub fn witness_to_metastrategy(w: &WinningWitness) -> Result<MetaStrategy, StrategyError> {
    let ones_in_cycle = w.cycle.iter().filter(|l| l.tick == TickTag::One).count();
    if ones_in_cycle == 0 {
        return Err(StrategyError::LoopWithoutTick);
    }
    if ones_in_cycle % 2 == 1 || w.stem.first().map(|l| l.tick) != Some(TickTag::Zero) {
        return Err(StrategyError::BadWitness(0));
    }
    let at = |i: usize| {
        if i < w.stem.len() {
            w.stem[i]
        } else {
            w.cycle[(i - w.stem.len()) % w.cycle.len()]
        }
    };
    let mut ones = w.stem.iter().filter(|l| l.tick == TickTag::One).count();
    let mut p = w.stem.len();
    loop {
        let l = at(p);
        if l.tick == TickTag::One {
            ones += 1;
            if ones % 2 == 0 {
                break;
            }
        }
        p += 1;
    }
    let stem: Vec<BeliefLabel> = (0..p).map(at).collect();
    let cycle: Vec<BeliefLabel> = (p..p + w.cycle.len()).map(at).collect();
    let stem_units = parse_units(&stem, 0)?;
    let cycle_units = parse_units(&cycle, p)?;
    MetaStrategy::new(stem_units, cycle_units)
}

/// Outcome of checking one meta-strategy.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub offending: Option<Bucket>,
    pub encounters: Encounters,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.offending.is_none()
    }
}

/// First bucket (in time order) that violates `mode`, given per-bucket
/// flags `(private final, public final)` of a table that repeats from
/// unit `repeat_unit` after `units` units.
pub fn first_violation(
    flags: &[(Bucket, bool, bool)],
    repeat_unit: usize,
    units: usize,
    mode: Mode,
) -> Option<Bucket> {
    let leak = |p: bool, q: bool| p != q;
    let finals = |i: usize| flags[i].1 || flags[i].2;
    for (i, &(b, p, q)) in flags.iter().enumerate() {
        let bad = match (mode, b) {
            (Mode::Full, _) => leak(p, q),
            (Mode::Weak, _) => p && !q,
            (Mode::Almost, Bucket::Point(_)) => false,
            (Mode::Almost, Bucket::Interval(_)) => leak(p, q),
            (Mode::Closed, Bucket::Interval(_)) => leak(p, q),
            (Mode::Closed, Bucket::Point(k)) => {
                let left = k > 0 && finals(i - 1);
                leak(p, q) && !left && !finals(i + 1)
            }
        };
        if bad {
            return Some(b);
        }
    }
    if mode == Mode::Closed {
        // the point closing the last listed unit behaves like the point of
        // `repeat_unit`, but its left neighbour is the last listed interval
        let (_, p, q) = flags[2 * repeat_unit];
        if leak(p, q) && !finals(2 * units - 1) && !finals(2 * repeat_unit + 1) {
            return Some(Bucket::Point(units as u64));
        }
    }
    None
}

/// Checks `phi` by replaying the controlled belief automaton.
pub fn check_metastrategy(beliefs: &Beliefs<'_>, phi: &MetaStrategy, mode: Mode) -> CheckReport {
    let enc = encountered_beliefs(beliefs, phi);
    let flags: Vec<(Bucket, bool, bool)> = enc
        .buckets
        .iter()
        .map(|(b, bel)| {
            (
                *b,
                beliefs.has_private_final(bel),
                beliefs.has_public_final(bel),
            )
        })
        .collect();
    let offending = first_violation(&flags, enc.repeat_unit, enc.units, mode);
    CheckReport {
        offending,
        encounters: enc,
    }
}

/// Existential opacity under the all-enabled meta-strategy: every bucket
/// of the (periodic) bucket table holding both a private and a public final
/// region. Nonempty iff the automaton is existentially opaque.
pub fn check_exists(beliefs: &Beliefs<'_>) -> Vec<Bucket> {
    let phi = MetaStrategy::all_enabled(beliefs.space().ta());
    let enc = encountered_beliefs(beliefs, &phi);
    enc.buckets
        .iter()
        .filter(|(_, b)| beliefs.has_private_final(b) && beliefs.has_public_final(b))
        .map(|(k, _)| *k)
        .collect()
}
