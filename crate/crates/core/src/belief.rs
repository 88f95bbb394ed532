//! Beliefs (sets of regions the attacker cannot tell apart) and the belief
//! automaton over labels `{0, 0+, 1} x 2^Σc`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;

use crate::region::{Region, RegionSpace, TickTag};
use crate::ta::{ActionId, ActionSet};

/// The pre-initial state `⊥`, or a sorted set of regions. An empty set is
/// the dead belief: no run is compatible any more.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Belief {
    Bottom,
    Set(Arc<[Region]>),
}

impl Belief {
    pub fn from_regions(regions: impl IntoIterator<Item = Region>) -> Belief {
        let set: BTreeSet<Region> = regions.into_iter().collect();
        Belief::Set(set.into_iter().collect::<Vec<_>>().into())
    }

    pub fn empty() -> Belief {
        Belief::Set(Arc::from(Vec::new()))
    }

    pub fn regions(&self) -> &[Region] {
        match self {
            Belief::Bottom => &[],
            Belief::Set(r) => r,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Belief::Bottom)
    }

    pub fn is_dead(&self) -> bool {
        matches!(self, Belief::Set(r) if r.is_empty())
    }

    pub fn len(&self) -> usize {
        self.regions().len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions().is_empty()
    }

    pub fn contains(&self, r: &Region) -> bool {
        self.regions().binary_search(r).is_ok()
    }

    pub fn is_subset(&self, other: &Belief) -> bool {
        self.regions().iter().all(|r| other.contains(r))
    }

    pub fn union(&self, other: &Belief) -> Belief {
        if other.is_empty() {
            return match self {
                Belief::Bottom => Belief::empty(),
                b => b.clone(),
            };
        }
        Belief::from_regions(self.regions().iter().chain(other.regions()).cloned())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefLabel {
    pub tick: TickTag,
    pub enabled: ActionSet,
}

impl BeliefLabel {
    pub fn new(tick: TickTag, enabled: ActionSet) -> Self {
        BeliefLabel { tick, enabled }
    }
}

impl fmt::Display for BeliefLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:#x})", self.tick.as_str(), self.enabled.0)
    }
}

/// Belief operations over a region space, with memoized zero-time closures.
pub struct Beliefs<'a> {
    sp: &'a RegionSpace,
    strict_initial: bool,
    closures: DashMap<(Region, ActionSet), Arc<[Region]>>,
}

impl<'a> Beliefs<'a> {
    pub fn new(sp: &'a RegionSpace) -> Self {
        Beliefs {
            sp,
            strict_initial: false,
            closures: DashMap::new(),
        }
    }

    /// Excludes silent edges from the closure of the initial region.
    pub fn strict_initial(mut self, strict: bool) -> Self {
        self.strict_initial = strict;
        self
    }

    pub fn space(&self) -> &'a RegionSpace {
        self.sp
    }

    fn allowed(&self, enabled: ActionSet, a: Option<ActionId>, silent: bool) -> bool {
        match a {
            None => silent,
            Some(a) => !self.sp.ta().actions[a].controllable || enabled.contains(a),
        }
    }

    /// Regions reachable from `r` by `(0, a)` steps with `a ∈ E ∪ Σu ∪ {ε}`
    /// and `(0+, ε)` delays.
    pub fn closure_of(&self, r: &Region, enabled: ActionSet) -> Arc<[Region]> {
        let key = (r.clone(), enabled);
        if let Some(c) = self.closures.get(&key) {
            return c.clone();
        }
        let c: Arc<[Region]> = self
            .closure(std::iter::once(r.clone()), enabled, true, true)
            .into_iter()
            .collect::<Vec<_>>()
            .into();
        self.closures.insert(key, c.clone());
        c
    }

    fn closure(
        &self,
        seeds: impl IntoIterator<Item = Region>,
        enabled: ActionSet,
        silent: bool,
        delays: bool,
    ) -> BTreeSet<Region> {
        let mut seen: BTreeSet<Region> = BTreeSet::new();
        let mut stack: Vec<Region> = Vec::new();
        for s in seeds {
            if seen.insert(s.clone()) {
                stack.push(s);
            }
        }
        while let Some(r) = stack.pop() {
            for (_, _, s) in self
                .sp
                .discrete_moves(&r, |a| self.allowed(enabled, a, silent))
            {
                if seen.insert(s.clone()) {
                    stack.push(s);
                }
            }
            if delays {
                for (tag, s) in self.sp.delay_moves(&r) {
                    if tag == TickTag::ZeroPlus && seen.insert(s.clone()) {
                        stack.push(s);
                    }
                }
            }
        }
        seen
    }

    /// Zero-time closure of the initial region.
    pub fn initial_belief(&self, enabled: ActionSet) -> Belief {
        let r0 = self.sp.initial();
        if self.strict_initial {
            Belief::from_regions(self.closure([r0], enabled, false, true))
        } else {
            Belief::from_regions(self.closure_of(&r0, enabled).iter().cloned())
        }
    }

    /// One delay step tagged `tick` from every region, then the closure.
    pub fn belief_successor(&self, b: &Belief, tick: TickTag, enabled: ActionSet) -> Belief {
        let mut out: BTreeSet<Region> = BTreeSet::new();
        for r in b.regions() {
            for (tag, s) in self.sp.delay_moves(r) {
                if tag == tick {
                    out.extend(self.closure_of(&s, enabled).iter().cloned());
                }
            }
        }
        Belief::Set(out.into_iter().collect::<Vec<_>>().into())
    }

    /// Successor along any label; `(0, E)` is only meaningful from `⊥`.
    pub fn post(&self, b: &Belief, label: BeliefLabel) -> Belief {
        match (b, label.tick) {
            (Belief::Bottom, TickTag::Zero) => self.initial_belief(label.enabled),
            (Belief::Bottom, _) | (_, TickTag::Zero) => Belief::empty(),
            (b, t) => self.belief_successor(b, t, label.enabled),
        }
    }

    pub fn has_private_final(&self, b: &Belief) -> bool {
        b.regions()
            .iter()
            .any(|r| self.sp.is_final(r) && self.sp.is_secret(r))
    }

    pub fn has_public_final(&self, b: &Belief) -> bool {
        b.regions()
            .iter()
            .any(|r| self.sp.is_final(r) && self.sp.is_public(r))
    }

    pub fn finals_present(&self, b: &Belief) -> bool {
        b.regions().iter().any(|r| self.sp.is_final(r))
    }

    /// Exactly one of "some private final region", "some public final region".
    pub fn leaking_full(&self, b: &Belief) -> bool {
        self.has_private_final(b) != self.has_public_final(b)
    }

    /// A private final region but no public one.
    pub fn leaking_weak(&self, b: &Belief) -> bool {
        self.has_private_final(b) && !self.has_public_final(b)
    }

    /// Every label that may leave `b` in the belief automaton.
    pub fn labels_from(&self, b: &Belief) -> Vec<BeliefLabel> {
        let sets = self.sp.ta().controllable_set().subsets();
        let ticks: &[TickTag] = if b.is_bottom() {
            &[TickTag::Zero]
        } else {
            &[TickTag::ZeroPlus, TickTag::One]
        };
        let mut out = Vec::new();
        for &t in ticks {
            for &e in &sets {
                out.push(BeliefLabel::new(t, e));
            }
        }
        out
    }

    /// Explores the belief automaton from `⊥`, dropping empty successors.
    /// Stops after `cap` beliefs.
    pub fn explore(&self, cap: usize) -> BeliefGraph {
        let mut index: BTreeMap<Belief, usize> = BTreeMap::new();
        let mut nodes = vec![Belief::Bottom];
        index.insert(Belief::Bottom, 0);
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        let mut complete = true;
        while let Some(i) = queue.pop_front() {
            let b = nodes[i].clone();
            for label in self.labels_from(&b) {
                let s = self.post(&b, label);
                if s.is_empty() {
                    continue;
                }
                let j = match index.get(&s) {
                    Some(&j) => j,
                    None => {
                        if nodes.len() >= cap {
                            complete = false;
                            continue;
                        }
                        let j = nodes.len();
                        index.insert(s.clone(), j);
                        nodes.push(s);
                        queue.push_back(j);
                        j
                    }
                };
                edges.push((i, label, j));
            }
        }
        BeliefGraph {
            nodes,
            edges,
            complete,
        }
    }
}

/// Explored part of the belief automaton; node 0 is `⊥`.
#[derive(Clone, Debug)]
pub struct BeliefGraph {
    pub nodes: Vec<Belief>,
    pub edges: Vec<(usize, BeliefLabel, usize)>,
    pub complete: bool,
}

impl BeliefGraph {
    /// Minimal number of tick-1 labels needed to reach every node.
    pub fn tick_depths(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.nodes.len()];
        let mut dq = VecDeque::from([0usize]);
        dist[0] = 0;
        while let Some(i) = dq.pop_front() {
            for &(s, l, t) in self.edges.iter().filter(|e| e.0 == i) {
                let w = usize::from(l.tick == TickTag::One);
                if dist[s] + w < dist[t] {
                    dist[t] = dist[s] + w;
                    if w == 0 {
                        dq.push_front(t);
                    } else {
                        dq.push_back(t);
                    }
                }
            }
        }
        dist
    }

    /// Names in the style `b0`, `b0'`, `b(0,1)`: the time bucket of the first
    /// visit, primed by decreasing size among beliefs sharing a bucket.
    pub fn pretty_names(&self) -> Vec<String> {
        let depth = self.tick_depths();
        let mut names = vec![String::new(); self.nodes.len()];
        names[0] = "bot".to_string();
        let mut by_bucket: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &d) in depth.iter().enumerate().skip(1) {
            by_bucket.entry(d).or_default().push(i);
        }
        for (d, mut ids) in by_bucket {
            ids.sort_by(|&a, &b| {
                self.nodes[b]
                    .len()
                    .cmp(&self.nodes[a].len())
                    .then_with(|| self.nodes[a].cmp(&self.nodes[b]))
            });
            let base = if d == usize::MAX {
                "b?".to_string()
            } else if d % 2 == 0 {
                format!("b{}", d / 2)
            } else {
                format!("b({},{})", d / 2, d / 2 + 1)
            };
            for (n, id) in ids.into_iter().enumerate() {
                names[id] = format!("{base}{}", "'".repeat(n));
            }
        }
        names
    }
}
