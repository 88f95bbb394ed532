//! Belief-free cross-check: a search over pairs (region, position in the
//! current unit's choice list) computes, per time bucket, whether a private
//! or public final region is reachable under a fixed meta-strategy.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::game::Mode;
use crate::region::{Region, RegionSpace, TickTag};
use crate::strategy::{Bucket, MetaStrategy};
use crate::ta::ActionSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleRow {
    pub bucket: Bucket,
    pub private: bool,
    pub public: bool,
}

/// Bucket flags `[0,0], (0,1), ..., (units-1, units)`; unit `units` behaves
/// like unit `repeat_unit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTable {
    pub rows: Vec<OracleRow>,
    pub repeat_unit: usize,
    pub units: usize,
}

impl OracleTable {
    /// Flags of any bucket, following the periodic tail.
    pub fn flags(&self, b: Bucket) -> (bool, bool) {
        let (k, off) = match b {
            Bucket::Point(k) => (k as usize, 0),
            Bucket::Interval(k) => (k as usize, 1),
        };
        let k = if k < self.units {
            k
        } else {
            let p = self.units - self.repeat_unit;
            self.repeat_unit + (k - self.repeat_unit) % p
        };
        let r = self.rows[2 * k + off];
        (r.private, r.public)
    }
}

impl fmt::Display for OracleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let name = match r.bucket {
                Bucket::Point(k) => k.to_string(),
                Bucket::Interval(k) => format!("({k},{})", k + 1),
            };
            writeln!(f, "{name} | priv={} pub={}", r.private, r.public)?;
        }
        writeln!(
            f,
            "repeats from unit {} with period {}",
            self.repeat_unit,
            self.units - self.repeat_unit
        )
    }
}

/// Walks the labelled region graph under `phi`, one unit at a time.
pub fn oracle_buckets(sp: &RegionSpace, phi: &MetaStrategy) -> OracleTable {
    let ta = sp.ta();
    let permits = |e: ActionSet, a: Option<usize>| match a {
        None => true,
        Some(a) => !ta.actions[a].controllable || e.contains(a),
    };
    let mut rows = Vec::new();
    let mut seen: HashMap<(usize, Vec<Region>), usize> = HashMap::new();
    let mut seeds: BTreeSet<Region> = BTreeSet::from([sp.initial()]);
    let mut k = 0usize;
    loop {
        let plan = phi.unit(k);
        let m = plan.in_interval.len();
        // choice enabled at position j: 0 = point, 1..=m interval, m+1 next point
        let choice = |j: usize| {
            if j == 0 {
                plan.at_point
            } else if j <= m {
                plan.in_interval[j - 1]
            } else {
                phi.unit(k + 1).at_point
            }
        };
        let tag_into = |j: usize| {
            if j == 1 || j == m + 1 {
                TickTag::One
            } else {
                TickTag::ZeroPlus
            }
        };

        let mut visited: BTreeSet<(usize, Region)> = BTreeSet::new();
        let mut stack: Vec<(usize, Region)> = Vec::new();
        for r in &seeds {
            if visited.insert((0, r.clone())) {
                stack.push((0, r.clone()));
            }
        }
        while let Some((j, r)) = stack.pop() {
            if j == m + 1 {
                continue;
            }
            for (label, s) in sp.successors(&r) {
                let next = match label.tick {
                    TickTag::Zero if permits(choice(j), label.action) => Some(j),
                    TickTag::ZeroPlus if (1..=m).contains(&j) => Some(j),
                    _ => None,
                };
                let advance =
                    (label.tick != TickTag::Zero && label.tick == tag_into(j + 1)).then_some(j + 1);
                for n in next.into_iter().chain(advance) {
                    if visited.insert((n, s.clone())) {
                        stack.push((n, s.clone()));
                    }
                }
            }
        }

        let point: Vec<Region> = visited
            .iter()
            .filter(|(j, _)| *j == 0)
            .map(|(_, r)| r.clone())
            .collect();
        if let Some(&first) = seen.get(&(phi.unit_index(k), point.clone())) {
            return OracleTable {
                rows,
                repeat_unit: first,
                units: k,
            };
        }
        seen.insert((phi.unit_index(k), point), k);

        let flag = |pred: &dyn Fn(usize) -> bool, secret: bool| {
            visited
                .iter()
                .any(|(j, r)| pred(*j) && sp.is_final(r) && sp.is_secret(r) == secret)
        };
        let at_point = |j: usize| j == 0;
        let inside = |j: usize| (1..=m).contains(&j);
        rows.push(OracleRow {
            bucket: Bucket::Point(k as u64),
            private: flag(&at_point, true),
            public: flag(&at_point, false),
        });
        rows.push(OracleRow {
            bucket: Bucket::Interval(k as u64),
            private: flag(&inside, true),
            public: flag(&inside, false),
        });
        seeds = visited
            .into_iter()
            .filter(|(j, _)| *j == m + 1)
            .map(|(_, r)| r)
            .collect();
        k += 1;
    }
}

/// Decides a mode directly on the duration sets the table describes:
/// `DPriv` and `DPub` are unions of the flagged buckets.
pub fn oracle_verdict(table: &OracleTable, mode: Mode) -> bool {
    // one full period past the last listed unit covers every neighbourhood
    let horizon = table.units + (table.units - table.repeat_unit);
    let buckets = (0..horizon as u64).flat_map(|k| [Bucket::Point(k), Bucket::Interval(k)]);
    let priv_ = |b: Bucket| table.flags(b).0;
    let pub_ = |b: Bucket| table.flags(b).1;
    match mode {
        Mode::Full => buckets.into_iter().all(|b| priv_(b) == pub_(b)),
        Mode::Weak => buckets.into_iter().all(|b| !priv_(b) || pub_(b)),
        // interior of the symmetric difference: only open intervals count
        Mode::Almost => buckets
            .into_iter()
            .filter(|b| matches!(b, Bucket::Interval(_)))
            .all(|b| priv_(b) == pub_(b)),
        // closures: an interval adds both endpoints
        Mode::Closed => {
            let closure = |set: &dyn Fn(Bucket) -> bool, b: Bucket| match b {
                Bucket::Interval(_) => set(b),
                Bucket::Point(k) => {
                    set(b) || set(Bucket::Interval(k)) || (k > 0 && set(Bucket::Interval(k - 1)))
                }
            };
            buckets
                .into_iter()
                .all(|b| closure(&priv_, b) == closure(&pub_, b))
        }
    }
}

/// Existential opacity on the table: some bucket has both flags.
pub fn oracle_exists(table: &OracleTable) -> bool {
    table.rows.iter().any(|r| r.private && r.public)
}
