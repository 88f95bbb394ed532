//! Region abstraction and the labelled region automaton.
//!
//! A region stores, per clock, its integer part (or `ABOVE` once the clock
//! exceeds its largest constant) and a rank in the fractional order: rank 0
//! means a zero fractional part, ranks `1..=g` are the nonzero groups in
//! increasing order. `ABOVE` clocks carry rank 0 and take no part in the
//! ordering. Ranks are kept dense, which makes the encoding canonical.

use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::Zero;

use crate::ta::{ActionId, Atom, ClockId, EdgeId, LocId, ModelError, Rel, State, Ta, Q};

pub const ABOVE: u16 = u16::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub loc: LocId,
    ints: Vec<u16>,
    ranks: Vec<u8>,
}

/// How a single clock sits in a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClockPart {
    /// `x = k`
    Exact(u32),
    /// `k < x < k + 1`
    Between(u32),
    /// `x > c_max`
    Above(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TickTag {
    /// Zero-time discrete step.
    Zero,
    /// Delay staying inside an open unit interval of absolute time.
    ZeroPlus,
    /// Delay reaching or leaving an integer instant.
    One,
}

impl TickTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TickTag::Zero => "0",
            TickTag::ZeroPlus => "0+",
            TickTag::One => "1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionLabel {
    pub tick: TickTag,
    pub action: Option<ActionId>,
}

/// Canonical region of a concrete state.
pub fn region_of(loc: LocId, val: &[Q], cmax: &[u32]) -> Region {
    let mut ints = Vec::with_capacity(val.len());
    let mut fracs: Vec<Option<Q>> = Vec::with_capacity(val.len());
    for (v, &c) in val.iter().zip(cmax) {
        if *v > Q::from_integer(c as i64) {
            ints.push(ABOVE);
            fracs.push(None);
        } else {
            let fl = v.floor();
            ints.push(*fl.numer() as u16);
            fracs.push(Some(v - fl));
        }
    }
    let mut distinct: Vec<Q> = fracs
        .iter()
        .flatten()
        .filter(|f| !f.is_zero())
        .cloned()
        .collect();
    distinct.sort();
    distinct.dedup();
    let ranks = fracs
        .iter()
        .map(|f| match f {
            Some(f) if !f.is_zero() => distinct.binary_search(f).unwrap() as u8 + 1,
            _ => 0,
        })
        .collect();
    Region { loc, ints, ranks }
}

impl Region {
    pub fn clocks(&self) -> usize {
        self.ints.len()
    }

    pub fn rank(&self, c: ClockId) -> u8 {
        self.ranks[c]
    }

    pub fn is_above(&self, c: ClockId) -> bool {
        self.ints[c] == ABOVE
    }

    fn normalize(&mut self) {
        let mut used: Vec<u8> = self.ranks.iter().copied().filter(|&r| r > 0).collect();
        used.sort_unstable();
        used.dedup();
        for r in self.ranks.iter_mut() {
            if *r > 0 {
                *r = used.binary_search(r).unwrap() as u8 + 1;
            }
        }
    }

    fn max_rank(&self) -> u8 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// True when some bounded clock sits on an integer.
    fn has_integer_clock(&self) -> bool {
        (0..self.ints.len()).any(|c| self.ints[c] != ABOVE && self.ranks[c] == 0)
    }

    pub fn reset(&self, clocks: &[ClockId], loc: LocId) -> Region {
        let mut r = self.clone();
        r.loc = loc;
        for &c in clocks {
            r.ints[c] = 0;
            r.ranks[c] = 0;
        }
        r.normalize();
        r
    }
}

/// The duplicated, tick-augmented automaton together with its clock ceilings.
#[derive(Clone, Debug)]
pub struct RegionSpace {
    ta: Ta,
    cmax: Vec<u32>,
    z: ClockId,
}

impl RegionSpace {
    /// Validates a user automaton, duplicates it and adds the tick clock.
    pub fn new(user: &Ta) -> Result<RegionSpace, ModelError> {
        let violations = user.validate();
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(ModelError::Invalid(msgs.join("; ")));
        }
        RegionSpace::from_prepared(user.duplicate()?.add_tick_clock()?)
    }

    /// Wraps an automaton that is already duplicated and tick-augmented.
    pub fn from_prepared(ta: Ta) -> Result<RegionSpace, ModelError> {
        if ta.dup.is_none() {
            return Err(ModelError::NotDuplicated);
        }
        let z = ta
            .tick
            .as_ref()
            .ok_or_else(|| ModelError::Invalid("missing tick clock".into()))?
            .clock;
        if ta.actions.len() > 64 {
            return Err(ModelError::TooManyActions(ta.actions.len()));
        }
        let cmax = ta.max_constants();
        Ok(RegionSpace { ta, cmax, z })
    }

    pub fn ta(&self) -> &Ta {
        &self.ta
    }

    pub fn cmax(&self) -> &[u32] {
        &self.cmax
    }

    pub fn tick_clock(&self) -> ClockId {
        self.z
    }

    pub fn region_of(&self, s: &State) -> Region {
        region_of(s.loc, &s.val, &self.cmax)
    }

    pub fn initial(&self) -> Region {
        let n = self.ta.clocks.len();
        Region {
            loc: self.ta.init,
            ints: vec![0; n],
            ranks: vec![0; n],
        }
    }

    pub fn part(&self, r: &Region, c: ClockId) -> ClockPart {
        if r.ints[c] == ABOVE {
            ClockPart::Above(self.cmax[c])
        } else if r.ranks[c] == 0 {
            ClockPart::Exact(r.ints[c] as u32)
        } else {
            ClockPart::Between(r.ints[c] as u32)
        }
    }

    /// Whether the fractional part of the tick clock is zero.
    pub fn z_integer(&self, r: &Region) -> bool {
        matches!(self.part(r, self.z), ClockPart::Exact(_))
    }

    pub fn satisfies(&self, r: &Region, a: &Atom) -> bool {
        let c = a.bound;
        match self.part(r, a.clock) {
            ClockPart::Above(_) => matches!(a.rel, Rel::Gt | Rel::Ge),
            ClockPart::Exact(k) => match a.rel {
                Rel::Lt => k < c,
                Rel::Le => k <= c,
                Rel::Eq => k == c,
                Rel::Ge => k >= c,
                Rel::Gt => k > c,
            },
            ClockPart::Between(k) => match a.rel {
                Rel::Lt | Rel::Le => k < c,
                Rel::Eq => false,
                Rel::Ge | Rel::Gt => k >= c,
            },
        }
    }

    pub fn satisfies_all(&self, r: &Region, atoms: &[Atom]) -> bool {
        atoms.iter().all(|a| self.satisfies(r, a))
    }

    pub fn invariant_holds(&self, r: &Region) -> bool {
        self.satisfies_all(r, &self.ta.locations[r.loc].invariant)
    }

    /// Immediate time successor, or `None` when every clock is above its
    /// ceiling (time then never leaves the region).
    pub fn time_successor(&self, r: &Region) -> Option<(TickTag, Region)> {
        let mut s = r.clone();
        if r.has_integer_clock() {
            for c in 0..s.ints.len() {
                if s.ints[c] == ABOVE {
                    continue;
                }
                if s.ranks[c] > 0 {
                    s.ranks[c] += 1;
                } else if s.ints[c] as u32 >= self.cmax[c] {
                    s.ints[c] = ABOVE;
                } else {
                    s.ranks[c] = 1;
                }
            }
        } else {
            let top = r.max_rank();
            if top == 0 {
                return None;
            }
            for c in 0..s.ints.len() {
                if s.ints[c] != ABOVE && s.ranks[c] == top {
                    s.ints[c] += 1;
                    s.ranks[c] = 0;
                }
            }
        }
        s.normalize();
        let tag = if self.z_integer(r) || self.z_integer(&s) {
            TickTag::One
        } else {
            TickTag::ZeroPlus
        };
        Some((tag, s))
    }

    /// Delay moves allowed by the invariant: the immediate successor, plus a
    /// `0+` self-loop when time can pass without leaving `r`.
    pub fn delay_moves(&self, r: &Region) -> Vec<(TickTag, Region)> {
        let mut out = Vec::new();
        if !r.has_integer_clock() && !self.z_integer(r) {
            out.push((TickTag::ZeroPlus, r.clone()));
        }
        if let Some((tag, s)) = self.time_successor(r) {
            if s != *r && self.invariant_holds(&s) {
                out.push((tag, s));
            }
        }
        out
    }

    /// Zero-time discrete moves whose action passes `allowed`.
    pub fn discrete_moves(
        &self,
        r: &Region,
        mut allowed: impl FnMut(Option<ActionId>) -> bool,
    ) -> Vec<(Option<ActionId>, EdgeId, Region)> {
        let mut out = Vec::new();
        for (i, e) in self.ta.edges.iter().enumerate() {
            if e.source != r.loc || !allowed(e.action) || !self.satisfies_all(r, &e.guard) {
                continue;
            }
            let s = r.reset(&e.resets, e.target);
            if self.invariant_holds(&s) {
                out.push((e.action, i, s));
            }
        }
        out
    }

    /// Every labelled move of the region automaton from `r`, sorted.
    pub fn successors(&self, r: &Region) -> Vec<(RegionLabel, Region)> {
        let mut out: Vec<(RegionLabel, Region)> = self
            .discrete_moves(r, |_| true)
            .into_iter()
            .map(|(a, _, s)| {
                (
                    RegionLabel {
                        tick: TickTag::Zero,
                        action: a,
                    },
                    s,
                )
            })
            .collect();
        out.extend(self.delay_moves(r).into_iter().map(|(t, s)| {
            (
                RegionLabel {
                    tick: t,
                    action: None,
                },
                s,
            )
        }));
        out.sort();
        out.dedup();
        out
    }

    pub fn is_final(&self, r: &Region) -> bool {
        self.ta.is_final(r.loc)
    }

    pub fn is_secret(&self, r: &Region) -> bool {
        self.ta.is_secret(r.loc)
    }

    pub fn is_public(&self, r: &Region) -> bool {
        !self.ta.is_secret(r.loc)
    }

    /// A concrete valuation inside `r`: group `j` of `g` nonzero groups gets
    /// fractional part `j / (g + 1)`.
    pub fn representative(&self, r: &Region) -> Vec<Q> {
        let g = r.max_rank() as i64;
        (0..r.ints.len())
            .map(|c| match self.part(r, c) {
                ClockPart::Above(m) => Q::from_integer(m as i64 + 1),
                ClockPart::Exact(k) => Q::from_integer(k as i64),
                ClockPart::Between(k) => {
                    Q::from_integer(k as i64) + Q::new(r.ranks[c] as i64, g + 1)
                }
            })
            .collect()
    }

    /// Human readable canonical rendering, e.g. `l0 x=0 0<z<1 w>0 [z<x]`.
    pub fn render(&self, r: &Region) -> String {
        let ta = &self.ta;
        let mut s = ta.locations[r.loc].name.clone();
        for c in 0..r.ints.len() {
            let name = &ta.clocks[c];
            let _ = match self.part(r, c) {
                ClockPart::Exact(k) => write!(s, " {name}={k}"),
                ClockPart::Between(k) => write!(s, " {k}<{name}<{}", k + 1),
                ClockPart::Above(m) => write!(s, " {name}>{m}"),
            };
        }
        let top = r.max_rank();
        let fractional = r.ranks.iter().filter(|&&x| x > 0).count();
        if fractional > 1 {
            let groups: Vec<String> = (1..=top)
                .map(|g| {
                    let names: Vec<&str> = (0..r.ints.len())
                        .filter(|&c| r.ints[c] != ABOVE && r.ranks[c] == g)
                        .map(|c| ta.clocks[c].as_str())
                        .collect();
                    names.join("=")
                })
                .collect();
            let _ = write!(s, " [{}]", groups.join("<"));
        }
        s
    }

    /// Interval notation for one clock: `0`, `(0,1)`, `>1`.
    pub fn clock_interval(&self, r: &Region, c: ClockId) -> String {
        match self.part(r, c) {
            ClockPart::Exact(k) => k.to_string(),
            ClockPart::Between(k) => format!("({},{})", k, k + 1),
            ClockPart::Above(m) => format!(">{m}"),
        }
    }
}

/// Floor of a nonnegative rational as an integer.
pub fn floor_int(q: Q) -> i64 {
    q.numer().div_floor(q.denom())
}
