//! Concrete strategies, meta-strategies, the next-choice function, the
//! controlled belief automaton, run admission and feasibility.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::belief::{Belief, BeliefLabel, Beliefs};
use crate::region::{floor_int, RegionSpace, TickTag};
use crate::ta::{ActionSet, RunClass, State, StepError, Ta, TimedRun, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("meta-strategy loop is empty")]
    EmptyLoop,
    #[error("unit {0} has an empty interval plan")]
    EmptyInterval(usize),
    #[error("choice sequence deviates from the meta-strategy at position {0}")]
    MalformedPrefix(usize),
    #[error("strategy pieces do not partition [0, horizon): {0}")]
    BadPieces(String),
    #[error("witness loop contains no tick-1 label")]
    LoopWithoutTick,
    #[error("witness labels are out of phase at position {0}")]
    BadWitness(usize),
}

/// Choices for one unit `[k, k+1)`: the set enabled at the instant `k` and
/// the ordered list of sets used inside `(k, k+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitPlan {
    pub at_point: ActionSet,
    pub in_interval: Vec<ActionSet>,
}

impl UnitPlan {
    pub fn new(at_point: ActionSet, in_interval: Vec<ActionSet>) -> Self {
        UnitPlan {
            at_point,
            in_interval,
        }
    }
}

/// Eventually periodic meta-strategy: the units of `stem`, then `cycle`
/// repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MetaStrategy {
    pub stem: Vec<UnitPlan>,
    pub cycle: Vec<UnitPlan>,
}

impl MetaStrategy {
    pub fn new(stem: Vec<UnitPlan>, cycle: Vec<UnitPlan>) -> Result<Self, StrategyError> {
        if cycle.is_empty() {
            return Err(StrategyError::EmptyLoop);
        }
        for (i, u) in stem.iter().chain(&cycle).enumerate() {
            if u.in_interval.is_empty() {
                return Err(StrategyError::EmptyInterval(i));
            }
        }
        Ok(MetaStrategy { stem, cycle })
    }

    /// Every controllable action enabled at all times.
    pub fn all_enabled(ta: &Ta) -> Self {
        let all = ta.controllable_set();
        MetaStrategy {
            stem: Vec::new(),
            cycle: vec![UnitPlan::new(all, vec![all])],
        }
    }

    /// Position of unit `k` within `stem ++ cycle`.
    pub fn unit_index(&self, k: usize) -> usize {
        if k < self.stem.len() {
            k
        } else {
            self.stem.len() + (k - self.stem.len()) % self.cycle.len()
        }
    }

    pub fn unit(&self, k: usize) -> &UnitPlan {
        let i = self.unit_index(k);
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[i - self.stem.len()]
        }
    }

    /// `φ_{k,i}`: `i = 0` is the point choice, `1..=m_k` the interval ones.
    pub fn choice(&self, k: usize, i: usize) -> ActionSet {
        let u = self.unit(k);
        if i == 0 {
            u.at_point
        } else {
            u.in_interval[i - 1]
        }
    }

    /// The unique infinite choice sequence the meta-strategy produces.
    pub fn choices(&self) -> Choices<'_> {
        Choices {
            phi: self,
            unit: 0,
            pos: None,
        }
    }

    /// The first `n` elements of [`MetaStrategy::choices`].
    pub fn choice_prefix(&self, n: usize) -> Vec<BeliefLabel> {
        self.choices().take(n).collect()
    }
}

/// Iterator over `next_φ(ε), next_φ(v_1), ...`.
pub struct Choices<'a> {
    phi: &'a MetaStrategy,
    unit: usize,
    /// `None` before the first element, otherwise the index (0 = point) of
    /// the last emitted choice within `unit`.
    pos: Option<usize>,
}

impl Iterator for Choices<'_> {
    type Item = BeliefLabel;

    fn next(&mut self) -> Option<BeliefLabel> {
        let (tick, k, i) = match self.pos {
            None => (TickTag::Zero, 0, 0),
            Some(0) => (TickTag::One, self.unit, 1),
            Some(i) if i < self.phi.unit(self.unit).in_interval.len() => {
                (TickTag::ZeroPlus, self.unit, i + 1)
            }
            Some(_) => (TickTag::One, self.unit + 1, 0),
        };
        self.unit = k;
        self.pos = Some(i);
        Some(BeliefLabel::new(tick, self.phi.choice(k, i)))
    }
}

/// `next_φ(v)`, by the four-case definition: with `2k + k'` tick-1 elements
/// in `v` and `i` the position reached inside the current interval plan.
pub fn next_choice(phi: &MetaStrategy, v: &[BeliefLabel]) -> Result<BeliefLabel, StrategyError> {
    for (n, (a, b)) in v.iter().zip(phi.choices()).enumerate() {
        if *a != b {
            return Err(StrategyError::MalformedPrefix(n));
        }
    }
    if v.is_empty() {
        return Ok(BeliefLabel::new(TickTag::Zero, phi.choice(0, 0)));
    }
    let ones = v.iter().filter(|l| l.tick == TickTag::One).count();
    let (k, odd) = (ones / 2, ones % 2 == 1);
    if !odd {
        return Ok(BeliefLabel::new(TickTag::One, phi.choice(k, 1)));
    }
    let trailing = v
        .iter()
        .rev()
        .take_while(|l| l.tick == TickTag::ZeroPlus)
        .count();
    let i = 1 + trailing;
    if i < phi.unit(k).in_interval.len() {
        Ok(BeliefLabel::new(TickTag::ZeroPlus, phi.choice(k, i + 1)))
    } else {
        Ok(BeliefLabel::new(TickTag::One, phi.choice(k + 1, 0)))
    }
}

/// A state `(v, b)` of the controlled belief automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlledState {
    pub v: Vec<BeliefLabel>,
    pub belief: Belief,
}

impl ControlledState {
    pub fn initial() -> Self {
        ControlledState {
            v: Vec::new(),
            belief: Belief::Bottom,
        }
    }
}

/// The unique successor of `st` in the controlled belief automaton.
pub fn controlled_successor(
    beliefs: &Beliefs<'_>,
    phi: &MetaStrategy,
    st: &ControlledState,
) -> Result<ControlledState, StrategyError> {
    let label = next_choice(phi, &st.v)?;
    let belief = beliefs.post(&st.belief, label);
    let mut v = st.v.clone();
    v.push(label);
    Ok(ControlledState { v, belief })
}

/// A time bucket: the instant `k` or the open interval `(k, k+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bucket {
    Point(u64),
    Interval(u64),
}

impl Bucket {
    /// Bucket after `ones` tick-1 labels.
    pub fn from_ticks(ones: usize) -> Bucket {
        let k = (ones / 2) as u64;
        if ones.is_multiple_of(2) {
            Bucket::Point(k)
        } else {
            Bucket::Interval(k)
        }
    }

    pub fn of_time(t: Q) -> Bucket {
        let k = floor_int(t) as u64;
        if t.is_integer() {
            Bucket::Point(k)
        } else {
            Bucket::Interval(k)
        }
    }

    pub fn contains(self, t: Q) -> bool {
        Bucket::of_time(t) == self
    }

    /// Position in the sequence `[0,0], (0,1), [1,1], ...`.
    pub fn ordinal(self) -> u64 {
        match self {
            Bucket::Point(k) => 2 * k,
            Bucket::Interval(k) => 2 * k + 1,
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bucket::Point(k) => write!(f, "[{k},{k}]"),
            Bucket::Interval(k) => write!(f, "({k},{})", k + 1),
        }
    }
}

/// Beliefs encountered under a meta-strategy, bucket by bucket.
#[derive(Clone, Debug)]
pub struct Encounters {
    /// `[0,0], (0,1), [1,1], ...` up to the last interval before the repeat.
    pub buckets: Vec<(Bucket, Belief)>,
    /// Unit `units` (the one after the last listed) behaves exactly like
    /// unit `repeat_unit`, so the table repeats from there on.
    pub repeat_unit: usize,
    pub units: usize,
}

impl Encounters {
    pub fn point(&self, k: usize) -> &Belief {
        &self.buckets[2 * k].1
    }

    pub fn interval(&self, k: usize) -> &Belief {
        &self.buckets[2 * k + 1].1
    }
}

/// Runs the controlled belief automaton unit by unit, collecting the point
/// belief and the union of interval beliefs, until the pair (lasso position,
/// point belief) repeats.
pub fn encountered_beliefs(beliefs: &Beliefs<'_>, phi: &MetaStrategy) -> Encounters {
    let mut buckets = Vec::new();
    let mut seen: HashMap<(usize, Belief), usize> = HashMap::new();
    let mut point = beliefs.post(
        &Belief::Bottom,
        BeliefLabel::new(TickTag::Zero, phi.choice(0, 0)),
    );
    let mut k = 0;
    loop {
        if let Some(&j) = seen.get(&(phi.unit_index(k), point.clone())) {
            return Encounters {
                buckets,
                repeat_unit: j,
                units: k,
            };
        }
        seen.insert((phi.unit_index(k), point.clone()), k);
        buckets.push((Bucket::Point(k as u64), point.clone()));
        let plan = phi.unit(k);
        let mut cur = beliefs.post(&point, BeliefLabel::new(TickTag::One, plan.in_interval[0]));
        let mut acc = cur.clone();
        for &e in &plan.in_interval[1..] {
            cur = beliefs.post(&cur, BeliefLabel::new(TickTag::ZeroPlus, e));
            acc = acc.union(&cur);
        }
        buckets.push((Bucket::Interval(k as u64), acc));
        point = beliefs.post(&cur, BeliefLabel::new(TickTag::One, phi.choice(k + 1, 0)));
        k += 1;
    }
}

fn allowed(ta: &Ta, e: ActionSet, a: Option<usize>) -> bool {
    match a {
        None => true,
        Some(a) => !ta.actions[a].controllable || e.contains(a),
    }
}

/// `adm[l]` tells whether `run ⊢ v[..l]`, for every `l` in `0..=v.len()`.
///
/// Dynamic programming over run prefixes following the case analysis of
/// admission: zero delays keep the sequence, delays of exactly one unit
/// span a whole interval, and fractional delays are split by whether the
/// tick clock is integer before and after the step.
pub fn admitted_prefixes(
    sp: &RegionSpace,
    run: &TimedRun,
    v: &[BeliefLabel],
) -> Result<Vec<bool>, StepError> {
    let ta = sp.ta();
    let z = sp.tick_clock();
    let states = ta.replay(run)?;
    let n = v.len();
    let mut adm = vec![false; n + 1];
    if n >= 1 && v[0].tick == TickTag::Zero {
        adm[1] = true;
    }
    // prev_one[l]: index of the last tick-1 among v[..l]
    let mut prev_one = vec![None; n + 1];
    for l in 0..n {
        prev_one[l + 1] = if v[l].tick == TickTag::One {
            Some(l)
        } else {
            prev_one[l]
        };
    }
    // plus_run[l]: v[i] is 0+ for every i in (last tick-1 before l, l)
    let zero_plus_since =
        |p: usize, end: usize| (p + 1..end).all(|i| v[i].tick == TickTag::ZeroPlus);
    for (j, &(d, e)) in run.steps.iter().enumerate() {
        let action = ta.edges[e].action;
        let zb = !states[j].val[z].is_integer();
        let delayed = states[j].val[z] + d;
        let za = !delayed.is_integer();
        let mut next = vec![false; n + 1];
        for l in 1..=n {
            let last = l - 1;
            if !allowed(ta, v[last].enabled, action) {
                continue;
            }
            next[l] = if d.is_zero() {
                adm[l]
            } else if d == Q::one() {
                v[last].tick == TickTag::One
                    && matches!(prev_one[last], Some(p) if zero_plus_since(p, last) && adm[p])
            } else if zb && za {
                // the 0+ extension may be empty, in which case the run's
                // prefix already admits v
                (v[last].tick == TickTag::One && adm[l])
                    || (v[last].tick == TickTag::ZeroPlus
                        && matches!(prev_one[last], Some(p) if zero_plus_since(p, last)
                            && (p + 1..=l).any(|m| adm[m])))
            } else if !zb {
                let p = match v[last].tick {
                    TickTag::One => Some(last),
                    TickTag::ZeroPlus => prev_one[last].filter(|&p| zero_plus_since(p, last)),
                    TickTag::Zero => None,
                };
                matches!(p, Some(p) if adm[p])
            } else {
                v[last].tick == TickTag::One
                    && matches!(prev_one[last], Some(p) if zero_plus_since(p, last)
                        && (p + 1..l).any(|m| adm[m]))
            };
        }
        adm = next;
    }
    Ok(adm)
}

/// `run ⊢ v`.
pub fn run_admits(sp: &RegionSpace, run: &TimedRun, v: &[BeliefLabel]) -> Result<bool, StepError> {
    Ok(*admitted_prefixes(sp, run, v)?.last().unwrap())
}

fn tick_count(run: &TimedRun) -> usize {
    let t = run.duration();
    let c = t.ceil().to_integer().max(0) as usize;
    2 * c + 2
}

/// Whether `run` (of the analysis automaton) is feasible under `phi`: some
/// prefix of the controlled choice sequence is admitted by the run and its
/// belief contains the region of the run's last state.
pub fn is_feasible(
    beliefs: &Beliefs<'_>,
    run: &TimedRun,
    phi: &MetaStrategy,
) -> Result<bool, StepError> {
    let sp = beliefs.space();
    let states = sp.ta().replay(run)?;
    let r = sp.region_of(states.last().unwrap());
    let max_ones = tick_count(run);
    let mut v = Vec::new();
    let mut ones = 0;
    for label in phi.choices() {
        if label.tick == TickTag::One {
            ones += 1;
            if ones > max_ones {
                break;
            }
        }
        v.push(label);
    }
    let adm = admitted_prefixes(sp, run, &v)?;
    let mut b = Belief::Bottom;
    for l in 1..=v.len() {
        b = beliefs.post(&b, v[l - 1]);
        if adm[l] && b.contains(&r) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A constant piece of a concrete strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: Q,
    pub lo_closed: bool,
    pub hi: Q,
    pub hi_closed: bool,
    pub enabled: ActionSet,
}

impl Piece {
    pub fn contains(&self, t: Q) -> bool {
        (t > self.lo || (self.lo_closed && t == self.lo))
            && (t < self.hi || (self.hi_closed && t == self.hi))
    }

    fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    fn shifted(&self, by: Q) -> Piece {
        Piece {
            lo: self.lo + by,
            hi: self.hi + by,
            ..self.clone()
        }
    }
}

/// A finitely-varying strategy: pieces partitioning `[0, horizon)`, where
/// the part from `repeat_from` on repeats forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteStrategy {
    pieces: Vec<Piece>,
    repeat_from: Q,
}

impl ConcreteStrategy {
    pub fn new(pieces: Vec<Piece>, repeat_from: Q) -> Result<Self, StrategyError> {
        let bad = |m: &str| Err(StrategyError::BadPieces(m.to_string()));
        let Some(first) = pieces.first() else {
            return bad("no pieces");
        };
        if !first.lo.is_zero() || !first.lo_closed {
            return bad("first piece must start with [0");
        }
        for p in &pieces {
            if p.lo > p.hi || (p.lo == p.hi && !(p.lo_closed && p.hi_closed)) {
                return bad("empty piece");
            }
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo || w[0].hi_closed == w[1].lo_closed {
                return bad("pieces are not adjacent");
            }
        }
        let last = pieces.last().unwrap();
        if last.hi_closed {
            return bad("last piece must be right-open");
        }
        let horizon = last.hi;
        let starts_piece = pieces.iter().any(|p| p.lo == repeat_from && p.lo_closed);
        if repeat_from >= horizon || !starts_piece {
            return bad("repeat point must be the closed start of a piece");
        }
        Ok(ConcreteStrategy {
            pieces,
            repeat_from,
        })
    }

    /// The same set at every instant.
    pub fn constant(enabled: ActionSet) -> Self {
        ConcreteStrategy {
            pieces: vec![Piece {
                lo: Q::zero(),
                lo_closed: true,
                hi: Q::one(),
                hi_closed: false,
                enabled,
            }],
            repeat_from: Q::zero(),
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn horizon(&self) -> Q {
        self.pieces.last().unwrap().hi
    }

    pub fn repeat_from(&self) -> Q {
        self.repeat_from
    }

    pub fn period(&self) -> Q {
        self.horizon() - self.repeat_from
    }

    /// `σ(t)`.
    pub fn at(&self, t: Q) -> ActionSet {
        let mut t = t;
        if t >= self.horizon() {
            let p = self.period();
            let n = ((t - self.repeat_from) / p).floor();
            t -= n * p;
        }
        self.pieces
            .iter()
            .find(|p| p.contains(t))
            .map_or(ActionSet::EMPTY, |p| p.enabled)
    }

    /// Pieces covering `[0, until)`, unrolling the periodic part.
    pub fn unrolled(&self, until: Q) -> Vec<Piece> {
        let mut out: Vec<Piece> = self.pieces.clone();
        let periodic: Vec<Piece> = self
            .pieces
            .iter()
            .filter(|p| p.lo >= self.repeat_from)
            .cloned()
            .collect();
        let mut shift = self.period();
        while out.last().unwrap().hi < until {
            out.extend(periodic.iter().map(|p| p.shifted(shift)));
            shift += self.period();
        }
        out
    }

    /// Pieces restricted to `(k, k+1)`, with adjacent equal sets merged.
    fn interval_runs(&self, k: i64) -> Vec<Piece> {
        let lo = Q::from_integer(k);
        let hi = lo + Q::one();
        let mut out: Vec<Piece> = Vec::new();
        for p in self.unrolled(hi + Q::one()) {
            if p.hi < lo || p.lo > hi || (p.hi == lo) || p.lo == hi {
                continue;
            }
            let mut q = p.clone();
            if q.lo <= lo {
                q.lo = lo;
                q.lo_closed = false;
            }
            if q.hi >= hi {
                q.hi = hi;
                q.hi_closed = false;
            }
            if q.lo == q.hi && !(q.lo_closed && q.hi_closed) {
                continue;
            }
            match out.last_mut() {
                Some(prev) if prev.enabled == q.enabled => {
                    prev.hi = q.hi;
                    prev.hi_closed = q.hi_closed;
                }
                _ => out.push(q),
            }
        }
        out
    }

    /// Number of units after which this strategy and any meta-strategy with
    /// `stem` and `cycle` units are both periodic, and a common period.
    fn joint_bound(&self, stem: usize, cycle: usize) -> (usize, usize) {
        let start = self.repeat_from.ceil().to_integer() as usize;
        let p = self.period();
        let units = (*p.denom() as usize).max(1);
        // smallest n with n * p integral is denom(p) / gcd(denom, numer)
        let n = units / (units.gcd(&(*p.numer() as usize)));
        let integral = (p * Q::from_integer(n as i64)).to_integer() as usize;
        (start.max(stem), integral.lcm(&cycle))
    }

    /// The unit plan this strategy follows on `[k, k+1)`.
    fn unit_plan(&self, k: usize) -> UnitPlan {
        let at_point = self.at(Q::from_integer(k as i64));
        let in_interval = self
            .interval_runs(k as i64)
            .into_iter()
            .map(|p| p.enabled)
            .collect();
        UnitPlan::new(at_point, in_interval)
    }
}

/// The uniformly sampled strategy of `phi`: point choices at integers and
/// the `m_k` interval choices on `(k, k+1/m)`, `[k+1/m, k+2/m)`, ...
pub fn sample_strategy(phi: &MetaStrategy) -> ConcreteStrategy {
    let units = phi.stem.len() + phi.cycle.len();
    let mut pieces = Vec::new();
    for k in 0..units {
        let plan = phi.unit(k);
        let base = Q::from_integer(k as i64);
        pieces.push(Piece {
            lo: base,
            lo_closed: true,
            hi: base,
            hi_closed: true,
            enabled: plan.at_point,
        });
        let m = plan.in_interval.len() as i64;
        for (j, &e) in plan.in_interval.iter().enumerate() {
            let j = j as i64;
            pieces.push(Piece {
                lo: base + Q::new(j, m),
                lo_closed: j > 0,
                hi: base + Q::new(j + 1, m),
                hi_closed: false,
                enabled: e,
            });
        }
    }
    ConcreteStrategy {
        pieces,
        repeat_from: Q::from_integer(phi.stem.len() as i64),
    }
}

/// `σ ⊨ φ`: equal point choices, and every `(k, k+1)` splits into `m_k`
/// consecutive intervals on which `σ` is constantly `φ_{k,1}, ..., φ_{k,m_k}`.
pub fn satisfies(sigma: &ConcreteStrategy, phi: &MetaStrategy) -> bool {
    let (start, period) = sigma.joint_bound(phi.stem.len(), phi.cycle.len());
    (0..start + period).all(|k| {
        let plan = phi.unit(k);
        if sigma.at(Q::from_integer(k as i64)) != plan.at_point {
            return false;
        }
        let runs = sigma.interval_runs(k as i64);
        let mut want: Vec<(ActionSet, usize)> = Vec::new();
        for &e in &plan.in_interval {
            match want.last_mut() {
                Some((w, n)) if *w == e => *n += 1,
                _ => want.push((e, 1)),
            }
        }
        runs.len() == want.len()
            && runs
                .iter()
                .zip(&want)
                .all(|(p, &(e, n))| p.enabled == e && (n == 1 || !p.is_point()))
    })
}

/// The meta-strategy a concrete strategy follows, with adjacent equal
/// interval choices merged.
pub fn meta_of(sigma: &ConcreteStrategy) -> MetaStrategy {
    let (start, period) = sigma.joint_bound(0, 1);
    MetaStrategy {
        stem: (0..start).map(|k| sigma.unit_plan(k)).collect(),
        cycle: (start..start + period)
            .map(|k| sigma.unit_plan(k))
            .collect(),
    }
}

/// Every discrete step's action is silent, uncontrollable, or enabled by
/// `sigma` at the absolute time of the step.
pub fn sigma_compatible(ta: &Ta, run: &TimedRun, sigma: &ConcreteStrategy) -> bool {
    run.step_times()
        .into_iter()
        .zip(&run.steps)
        .all(|(t, &(_, e))| allowed(ta, sigma.at(t), ta.edges[e].action))
}

/// Searches for a run of the analysis automaton that follows `phi`, ends in
/// `bucket` in a final location of the requested class, and is feasible.
///
/// Delays are restricted to a fixed grid, so the search is complete only up
/// to that discretisation; `None` means no such run was found within `cap`
/// explored configurations.
pub fn find_witness_run(
    beliefs: &Beliefs<'_>,
    phi: &MetaStrategy,
    bucket: Bucket,
    class: RunClass,
    cap: usize,
) -> Option<TimedRun> {
    let sp = beliefs.space();
    let ta = sp.ta();
    let z = sp.tick_clock();
    let needed = bucket.ordinal() as usize + 2;
    let mut v = Vec::new();
    let mut ones = 0;
    for l in phi.choices() {
        if l.tick == TickTag::One {
            ones += 1;
            if ones > needed {
                break;
            }
        }
        v.push(l);
    }
    let mut ticks_before = vec![0usize; v.len()];
    let mut c = 0;
    for (j, l) in v.iter().enumerate() {
        if l.tick == TickTag::One {
            c += 1;
        }
        ticks_before[j] = c;
    }
    let bucket_of = |j: usize| Bucket::from_ticks(ticks_before[j]);

    type Node = (State, usize);
    let start: Node = (ta.initial_state(), 0);
    let mut parent: HashMap<Node, (Node, Q, Option<usize>)> = HashMap::new();
    let mut seen: HashSet<Node> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if seen.len() > cap {
            return None;
        }
        let (s, j) = &node;
        let mut succ: Vec<(Node, Q, Option<usize>)> = Vec::new();
        for (e, edge) in ta.edges.iter().enumerate() {
            if !allowed(ta, v[*j].enabled, edge.action) {
                continue;
            }
            if let Ok(t) = ta.step_discrete(s, e) {
                succ.push(((t, *j), Q::zero(), Some(e)));
            }
        }
        for (d, tag) in delay_candidates(s, z) {
            let Ok(t) = ta.step_delay(s, d) else { continue };
            if tag == TickTag::ZeroPlus && *j >= 1 && ticks_before[*j] % 2 == 1 {
                succ.push(((t.clone(), *j), d, None));
            }
            if j + 1 < v.len() && v[j + 1].tick == tag {
                succ.push(((t, j + 1), d, None));
            }
        }
        for (next, d, e) in succ {
            if !seen.insert(next.clone()) {
                continue;
            }
            parent.insert(next.clone(), (node.clone(), d, e));
            let (t, jn) = &next;
            let hit = e.is_some()
                && bucket_of(*jn) == bucket
                && ta.is_final(t.loc)
                && (ta.is_secret(t.loc) == (class == RunClass::Private));
            if hit {
                let run = rebuild(&parent, next);
                if is_feasible(beliefs, &run, phi).unwrap_or(false) {
                    return Some(run);
                }
                continue;
            }
            queue.push_back(next);
        }
    }
    None
}

type WitnessNode = (State, usize);

fn rebuild(
    parent: &HashMap<WitnessNode, (WitnessNode, Q, Option<usize>)>,
    end: WitnessNode,
) -> TimedRun {
    let mut rev: Vec<(Q, Option<usize>)> = Vec::new();
    let mut cur = end;
    while let Some((p, d, e)) = parent.get(&cur) {
        rev.push((*d, *e));
        cur = p.clone();
    }
    let mut steps = Vec::new();
    let mut acc = Q::zero();
    for (d, e) in rev.into_iter().rev() {
        acc += d;
        if let Some(e) = e {
            steps.push((acc, e));
            acc = Q::zero();
        }
    }
    TimedRun::new(steps)
}

/// The single grid delay `1/N`, `N = 2 * clocks`, tagged by how it moves
/// the tick clock. Fractional parts stay on the grid, so the search space is
/// finite, and the grid is fine enough to separate the clocks' fractional
/// parts.
fn delay_candidates(s: &State, z: usize) -> Vec<(Q, TickTag)> {
    let d = Q::new(1, 2 * s.val.len().max(1) as i64);
    let before = s.val[z].is_integer();
    let after = (s.val[z] + d).is_integer();
    let tag = if before || after {
        TickTag::One
    } else {
        TickTag::ZeroPlus
    };
    vec![(d, tag)]
}
