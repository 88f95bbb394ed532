//! Timed automata: syntax, well-formedness, structural transforms and the
//! concrete (valuation-level) semantics.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational time value.
pub type Q = Ratio<i64>;

pub type ClockId = usize;
pub type LocId = usize;
pub type ActionId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn holds(self, v: Q, bound: u32) -> bool {
        let c = Q::from_integer(bound as i64);
        match self {
            Rel::Lt => v < c,
            Rel::Le => v <= c,
            Rel::Eq => v == c,
            Rel::Ge => v >= c,
            Rel::Gt => v > c,
        }
    }
}

/// `clock rel bound`, with a nonnegative integer bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub clock: ClockId,
    pub rel: Rel,
    pub bound: u32,
}

impl Atom {
    pub fn new(clock: ClockId, rel: Rel, bound: u32) -> Self {
        Atom { clock, rel, bound }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub controllable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub invariant: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: LocId,
    pub guard: Vec<Atom>,
    /// `None` is the silent action.
    pub action: Option<ActionId>,
    /// Sorted, without duplicates.
    pub resets: Vec<ClockId>,
    pub target: LocId,
}

/// The extra clock reset every time unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tick {
    pub clock: ClockId,
    /// `loops[l]` is the `z = 1` self-loop of location `l`.
    pub loops: Vec<EdgeId>,
}

/// Bookkeeping left by [`Ta::duplicate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Duplication {
    /// Number of locations of the original automaton; location `l + n` is the
    /// primed copy of `l`.
    pub original_locations: usize,
    /// Locations whose regions reveal a visit to the private location.
    pub secret: Vec<bool>,
    /// Original edge id of each edge of the duplicated automaton.
    pub origin: Vec<EdgeId>,
    /// Unprimed copy of an original edge (absent for edges leaving the private location).
    pub plain: Vec<Option<EdgeId>>,
    /// Primed copy of an original edge.
    pub primed: Vec<EdgeId>,
    /// Edge from the private location into the primed part.
    pub escape: Vec<Option<EdgeId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ta {
    pub clocks: Vec<String>,
    pub actions: Vec<Action>,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
    pub init: LocId,
    pub private: LocId,
    /// Sorted.
    pub finals: Vec<LocId>,
    pub tick: Option<Tick>,
    pub dup: Option<Duplication>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("automaton already has a tick clock")]
    AlreadyTicked,
    #[error("automaton is already duplicated")]
    AlreadyDuplicated,
    #[error("operation needs a duplicated automaton")]
    NotDuplicated,
    #[error("automaton is not well formed: {0}")]
    Invalid(String),
    #[error("too many actions ({0}); at most 64 are supported")]
    TooManyActions(usize),
}

/// One broken well-formedness rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.rule, self.subject, self.detail)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("edge {edge} leaves {expected}, not the current location {actual}")]
    WrongSource {
        edge: EdgeId,
        expected: String,
        actual: String,
    },
    #[error("guard atom {atom} of edge {edge} is false")]
    Guard { edge: EdgeId, atom: String },
    #[error("invariant atom {atom} of {location} is violated")]
    Invariant { location: String, atom: String },
    #[error("negative delay {0}")]
    NegativeDelay(Q),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A concrete configuration: location plus clock valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub loc: LocId,
    pub val: Vec<Q>,
}

/// A run from the initial state: each step is a delay followed by an edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimedRun {
    pub steps: Vec<(Q, EdgeId)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunClass {
    Private,
    Public,
    Neither,
}

impl TimedRun {
    pub fn new(steps: Vec<(Q, EdgeId)>) -> Self {
        TimedRun { steps }
    }

    pub fn duration(&self) -> Q {
        self.steps.iter().fold(Q::zero(), |acc, (d, _)| acc + *d)
    }

    /// Absolute time of every discrete step.
    pub fn step_times(&self) -> Vec<Q> {
        let mut t = Q::zero();
        self.steps
            .iter()
            .map(|(d, _)| {
                t += *d;
                t
            })
            .collect()
    }

    pub fn prefix(&self, n: usize) -> TimedRun {
        TimedRun {
            steps: self.steps[..n].to_vec(),
        }
    }
}

impl Ta {
    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name)
    }

    pub fn loc_id(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn is_final(&self, l: LocId) -> bool {
        self.finals.binary_search(&l).is_ok()
    }

    pub fn is_controllable(&self, a: Option<ActionId>) -> bool {
        a.is_some_and(|a| self.actions[a].controllable)
    }

    pub fn controllable_actions(&self) -> Vec<ActionId> {
        (0..self.actions.len())
            .filter(|&a| self.actions[a].controllable)
            .collect()
    }

    pub fn action_name(&self, a: Option<ActionId>) -> &str {
        a.map_or("~", |a| self.actions[a].name.as_str())
    }

    pub fn atom_string(&self, atom: &Atom) -> String {
        format!(
            "{} {} {}",
            self.clocks[atom.clock],
            atom.rel.symbol(),
            atom.bound
        )
    }

    /// Secret locations (primed copies and the private location); requires duplication.
    pub fn is_secret(&self, l: LocId) -> bool {
        match &self.dup {
            Some(d) => d.secret[l],
            None => l == self.private,
        }
    }

    /// Largest constant each clock is compared to, over guards and invariants.
    pub fn max_constants(&self) -> Vec<u32> {
        let mut cmax = vec![0u32; self.clocks.len()];
        let atoms = self
            .locations
            .iter()
            .flat_map(|l| l.invariant.iter())
            .chain(self.edges.iter().flat_map(|e| e.guard.iter()));
        for a in atoms {
            cmax[a.clock] = cmax[a.clock].max(a.bound);
        }
        cmax
    }

    /// Well-formedness plus the urgent-final assumption.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nl = self.locations.len();
        let nc = self.clocks.len();
        let v = |rule, subject: String, detail: String| Violation {
            rule,
            subject,
            detail,
        };
        let mut seen = BTreeSet::new();
        for (i, c) in self.clocks.iter().enumerate() {
            if !seen.insert(c.as_str()) {
                out.push(v("duplicate-name", format!("clock {i}"), c.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, a) in self.actions.iter().enumerate() {
            if !seen.insert(a.name.as_str()) {
                out.push(v("duplicate-name", format!("action {i}"), a.name.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, l) in self.locations.iter().enumerate() {
            if !seen.insert(l.name.as_str()) {
                out.push(v("duplicate-name", format!("location {i}"), l.name.clone()));
            }
            for a in &l.invariant {
                if a.clock >= nc {
                    out.push(v(
                        "dangling-reference",
                        format!("location {}", l.name),
                        format!("clock {}", a.clock),
                    ));
                }
            }
        }
        if nl == 0 {
            out.push(v("no-locations", "automaton".into(), "no location".into()));
            return out;
        }
        for (what, l) in [("init", self.init), ("private", self.private)] {
            if l >= nl {
                out.push(v(
                    "dangling-reference",
                    what.to_string(),
                    format!("location {l}"),
                ));
            }
        }
        for &f in &self.finals {
            if f >= nl {
                out.push(v(
                    "dangling-reference",
                    "finals".into(),
                    format!("location {f}"),
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (i, e) in self.edges.iter().enumerate() {
            let subject = format!("edge {i}");
            if e.source >= nl || e.target >= nl {
                out.push(v("dangling-reference", subject.clone(), "location".into()));
                continue;
            }
            if e.guard.iter().any(|a| a.clock >= nc) || e.resets.iter().any(|&c| c >= nc) {
                out.push(v("dangling-reference", subject.clone(), "clock".into()));
            }
            if let Some(a) = e.action {
                if a >= self.actions.len() {
                    out.push(v("dangling-reference", subject.clone(), "action".into()));
                }
            }
        }
        if self.is_final(self.private) {
            out.push(v(
                "private-is-final",
                self.locations[self.private].name.clone(),
                "the private location must not be final".into(),
            ));
        }
        if self.finals.is_empty() {
            out.push(v(
                "no-final",
                "automaton".into(),
                "no final location".into(),
            ));
        }
        for &f in &self.finals {
            let name = &self.locations[f].name;
            let is_tick_loop = |i: usize| self.tick.as_ref().is_some_and(|t| t.loops[f] == i);
            for (i, e) in self.edges.iter().enumerate() {
                if e.source == f && !is_tick_loop(i) {
                    out.push(v(
                        "final-has-outgoing",
                        format!("edge {i}"),
                        format!("final location {name} has an outgoing edge"),
                    ));
                }
            }
            let zero: Vec<ClockId> = self.locations[f]
                .invariant
                .iter()
                .filter(|a| a.rel == Rel::Eq && a.bound == 0)
                .map(|a| a.clock)
                .collect();
            if zero.is_empty() {
                out.push(v(
                    "final-not-urgent",
                    name.clone(),
                    "final location lacks an invariant `x = 0`".into(),
                ));
                continue;
            }
            for (i, e) in self.edges.iter().enumerate() {
                if e.target == f && e.source != f && !e.resets.iter().any(|c| zero.contains(c)) {
                    out.push(v(
                        "final-not-urgent",
                        format!("edge {i}"),
                        format!("edge into {name} resets no clock of its `= 0` invariant"),
                    ));
                }
            }
        }
        if self.actions.len() > 64 {
            out.push(v(
                "too-many-actions",
                "automaton".into(),
                format!("{} actions", self.actions.len()),
            ));
        }
        out
    }

    fn fresh_clock_name(&self, base: &str) -> String {
        if self.clock_id(base).is_none() {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| self.clock_id(n).is_none())
            .unwrap()
    }

    /// Adds a fresh clock reset on every edge into a final location and an
    /// `= 0` invariant on every final location.
    pub fn make_finals_urgent(&self) -> Ta {
        let mut ta = self.clone();
        let c = ta.clocks.len();
        ta.clocks.push(self.fresh_clock_name("urg"));
        for &f in &self.finals {
            ta.locations[f].invariant.push(Atom::new(c, Rel::Eq, 0));
        }
        for e in ta.edges.iter_mut() {
            if self.is_final(e.target) {
                e.resets.push(c);
            }
        }
        ta
    }

    /// Adds the tick clock `z`: `z <= 1` everywhere and a `z = 1` silent
    /// self-loop resetting `z` on every location.
    pub fn add_tick_clock(&self) -> Result<Ta, ModelError> {
        if self.tick.is_some() {
            return Err(ModelError::AlreadyTicked);
        }
        let mut ta = self.clone();
        let z = ta.clocks.len();
        ta.clocks.push(self.fresh_clock_name("z"));
        let mut loops = Vec::with_capacity(ta.locations.len());
        for (l, loc) in ta.locations.iter_mut().enumerate() {
            loc.invariant.push(Atom::new(z, Rel::Le, 1));
            loops.push(ta.edges.len());
            ta.edges.push(Edge {
                source: l,
                guard: vec![Atom::new(z, Rel::Eq, 1)],
                action: None,
                resets: vec![z],
                target: l,
            });
        }
        ta.tick = Some(Tick { clock: z, loops });
        Ok(ta)
    }

    /// Duplicated automaton remembering whether the private location was visited.
    pub fn duplicate(&self) -> Result<Ta, ModelError> {
        if self.dup.is_some() {
            return Err(ModelError::AlreadyDuplicated);
        }
        if self.tick.is_some() {
            return Err(ModelError::Invalid(
                "duplicate before adding the tick clock".into(),
            ));
        }
        let n = self.locations.len();
        let p = self.private;
        let mut locations = self.locations.clone();
        for l in &self.locations {
            locations.push(Location {
                name: format!("{}'", l.name),
                invariant: l.invariant.clone(),
            });
        }
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        let mut plain = vec![None; self.edges.len()];
        let mut escape = vec![None; self.edges.len()];
        let mut primed = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if e.source != p {
                plain[i] = Some(edges.len());
                edges.push(e.clone());
                origin.push(i);
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            primed.push(edges.len());
            edges.push(Edge {
                source: e.source + n,
                target: e.target + n,
                ..e.clone()
            });
            origin.push(i);
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.source == p {
                escape[i] = Some(edges.len());
                edges.push(Edge {
                    target: e.target + n,
                    ..e.clone()
                });
                origin.push(i);
            }
        }
        let mut finals = self.finals.clone();
        finals.extend(self.finals.iter().map(|f| f + n));
        finals.sort_unstable();
        let mut secret = vec![false; 2 * n];
        secret[p] = true;
        for s in secret.iter_mut().skip(n) {
            *s = true;
        }
        Ok(Ta {
            clocks: self.clocks.clone(),
            actions: self.actions.clone(),
            locations,
            edges,
            init: self.init,
            private: p,
            finals,
            tick: None,
            dup: Some(Duplication {
                original_locations: n,
                secret,
                origin,
                plain,
                primed,
                escape,
            }),
        })
    }

    pub fn initial_state(&self) -> State {
        State {
            loc: self.init,
            val: vec![Q::zero(); self.clocks.len()],
        }
    }

    fn check_invariant(&self, loc: LocId, val: &[Q]) -> Result<(), StepError> {
        for a in &self.locations[loc].invariant {
            if !a.rel.holds(val[a.clock], a.bound) {
                return Err(StepError::Invariant {
                    location: self.locations[loc].name.clone(),
                    atom: self.atom_string(a),
                });
            }
        }
        Ok(())
    }

    /// Lets `d` time units elapse. Invariants are conjunctions of atoms, hence
    /// convex along a delay, so checking both ends suffices.
    pub fn step_delay(&self, s: &State, d: Q) -> Result<State, StepError> {
        if d < Q::zero() {
            return Err(StepError::NegativeDelay(d));
        }
        self.check_invariant(s.loc, &s.val)?;
        let val: Vec<Q> = s.val.iter().map(|v| v + d).collect();
        self.check_invariant(s.loc, &val)?;
        Ok(State { loc: s.loc, val })
    }

    pub fn step_discrete(&self, s: &State, edge: EdgeId) -> Result<State, StepError> {
        let e = self.edges.get(edge).ok_or(StepError::UnknownEdge(edge))?;
        if e.source != s.loc {
            return Err(StepError::WrongSource {
                edge,
                expected: self.locations[e.source].name.clone(),
                actual: self.locations[s.loc].name.clone(),
            });
        }
        for a in &e.guard {
            if !a.rel.holds(s.val[a.clock], a.bound) {
                return Err(StepError::Guard {
                    edge,
                    atom: self.atom_string(a),
                });
            }
        }
        let mut val = s.val.clone();
        for &c in &e.resets {
            val[c] = Q::zero();
        }
        self.check_invariant(e.target, &val)?;
        Ok(State { loc: e.target, val })
    }

    /// States visited by `run`: `states[i]` is the state before step `i`.
    pub fn replay(&self, run: &TimedRun) -> Result<Vec<State>, StepError> {
        let mut s = self.initial_state();
        self.check_invariant(s.loc, &s.val)?;
        let mut out = vec![s.clone()];
        for &(d, e) in &run.steps {
            s = self.step_delay(&s, d)?;
            s = self.step_discrete(&s, e)?;
            out.push(s.clone());
        }
        Ok(out)
    }

    /// Private / public / neither, and the duration, of a run of a duplicated automaton.
    pub fn classify_run(&self, run: &TimedRun) -> Result<(RunClass, Q), StepError> {
        if self.dup.is_none() {
            return Err(ModelError::NotDuplicated.into());
        }
        let states = self.replay(run)?;
        let last = states.last().unwrap().loc;
        let class = if !self.is_final(last) {
            RunClass::Neither
        } else if self.is_secret(last) {
            RunClass::Private
        } else {
            RunClass::Public
        };
        Ok((class, run.duration()))
    }

    /// Translates a run of the original automaton into this analysis
    /// automaton: edges are mapped into the duplicated part and, when a tick
    /// clock is present, delays are split at integer instants where the
    /// `z = 1` self-loop is inserted.
    pub fn lift_run(&self, run: &TimedRun) -> Result<TimedRun, StepError> {
        let mut out = Vec::new();
        let mut loc = self.init;
        let mut z = Q::zero();
        for &(d, e) in &run.steps {
            let mut acc = d;
            if let Some(t) = &self.tick {
                acc = Q::zero();
                let mut rest = d;
                while rest > Q::zero() {
                    if z == Q::one() {
                        out.push((acc, t.loops[loc]));
                        acc = Q::zero();
                        z = Q::zero();
                    }
                    let step = rest.min(Q::one() - z);
                    acc += step;
                    z += step;
                    rest -= step;
                }
            }
            let mapped = match &self.dup {
                None => e,
                Some(dup) => {
                    let n = dup.original_locations;
                    if e >= dup.primed.len() {
                        return Err(StepError::UnknownEdge(e));
                    }
                    let copy = if loc == self.private {
                        dup.escape[e]
                    } else if loc >= n {
                        Some(dup.primed[e])
                    } else {
                        dup.plain[e]
                    };
                    match copy {
                        Some(c) if self.edges[c].source == loc => c,
                        _ => {
                            return Err(StepError::WrongSource {
                                edge: e,
                                expected: self.locations[self.edges[dup.primed[e]].source - n]
                                    .name
                                    .clone(),
                                actual: self.locations[loc].name.clone(),
                            })
                        }
                    }
                }
            };
            out.push((acc, mapped));
            loc = self.edges[mapped].target;
        }
        Ok(TimedRun { steps: out })
    }

    /// Inverse of [`Ta::lift_run`]: drops tick self-loops and maps edges back
    /// to the original automaton.
    pub fn project_run(&self, run: &TimedRun) -> TimedRun {
        let mut out = Vec::new();
        let mut acc = Q::zero();
        for &(d, e) in &run.steps {
            acc += d;
            if self.tick.as_ref().is_some_and(|t| t.loops.contains(&e)) {
                continue;
            }
            let orig = self.dup.as_ref().map_or(e, |dup| dup.origin[e]);
            out.push((acc, orig));
            acc = Q::zero();
        }
        TimedRun { steps: out }
    }
}

/// A set of actions, as a bitmask over action ids (at most 64 actions).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSet(pub u64);

impl ActionSet {
    pub const EMPTY: ActionSet = ActionSet(0);

    pub fn contains(self, a: ActionId) -> bool {
        self.0 >> a & 1 == 1
    }

    pub fn with(self, a: ActionId) -> ActionSet {
        ActionSet(self.0 | 1 << a)
    }

    pub fn is_subset(self, other: ActionSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ActionSet) -> ActionSet {
        ActionSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ActionId> {
        (0..64).filter(move |&a| self.contains(a))
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> Vec<ActionSet> {
        let mut out = vec![ActionSet(0)];
        let mut s = self.0;
        // standard submask enumeration, collected then sorted
        while s != 0 {
            out.push(ActionSet(s));
            s = (s - 1) & self.0;
        }
        out.sort();
        out
    }
}

impl FromIterator<ActionId> for ActionSet {
    fn from_iter<I: IntoIterator<Item = ActionId>>(iter: I) -> Self {
        iter.into_iter().fold(ActionSet::EMPTY, |s, a| s.with(a))
    }
}

impl Ta {
    /// Controllable actions as a set.
    pub fn controllable_set(&self) -> ActionSet {
        self.controllable_actions().into_iter().collect()
    }

    /// `{a,b}` style rendering of an action set.
    pub fn set_string(&self, s: ActionSet) -> String {
        let names: Vec<&str> = s.iter().map(|a| self.actions[a].name.as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}
