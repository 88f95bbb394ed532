//! Two-counter Minsky machines and their compilation into opacity-control
//! gadgets: a strategy keeps the result opaque only by emulating the machine.
//!
//! Machine text format, one command per line (`#` starts a comment):
//!
//! ```text
//! INC C1
//! DEC C2
//! IFZ C1 3 0
//! HALT
//! ```
//!
//! `IFZ C k j` jumps to command `k` when the counter is zero and to `j`
//! otherwise; commands are numbered from 0 and the last one must be `HALT`.
//!
//! Every command takes three time units. Counter `C1` acts inside `(0,1)` of
//! each three-unit block, `C2` inside `(1,2)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ta::{Action, Atom, Edge, LocId, Location, Rel, Ta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Counter {
    C1,
    C2,
}

impl Counter {
    pub fn as_str(self) -> &'static str {
        match self {
            Counter::C1 => "C1",
            Counter::C2 => "C2",
        }
    }

    /// Offset of the unit interval this counter acts in.
    fn window(self) -> u32 {
        match self {
            Counter::C1 => 0,
            Counter::C2 => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Inc(Counter),
    Dec(Counter),
    /// Counter, target when zero, target otherwise.
    IfZero(Counter, usize, usize),
    Halt,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Inc(c) => write!(f, "INC {}", c.as_str()),
            Command::Dec(c) => write!(f, "DEC {}", c.as_str()),
            Command::IfZero(c, k, j) => write!(f, "IFZ {} {k} {j}", c.as_str()),
            Command::Halt => write!(f, "HALT"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinskyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("machine has no commands")]
    Empty,
    #[error("last command must be HALT")]
    NoHalt,
    #[error("command {command}: jump target {target} out of range")]
    BadTarget { command: usize, target: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinskyMachine {
    pub commands: Vec<Command>,
}

impl MinskyMachine {
    pub fn new(commands: Vec<Command>) -> Result<Self, MinskyError> {
        match commands.last() {
            None => return Err(MinskyError::Empty),
            Some(Command::Halt) => {}
            Some(_) => return Err(MinskyError::NoHalt),
        }
        for (i, c) in commands.iter().enumerate() {
            if let Command::IfZero(_, k, j) = *c {
                for target in [k, j] {
                    if target >= commands.len() {
                        return Err(MinskyError::BadTarget { command: i, target });
                    }
                }
            }
        }
        Ok(MinskyMachine { commands })
    }
}

impl FromStr for MinskyMachine {
    type Err = MinskyError;

    fn from_str(src: &str) -> Result<Self, MinskyError> {
        let mut commands = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let err = |message: String| MinskyError::Parse { line, message };
            let toks: Vec<&str> = text.split_whitespace().collect();
            let counter = |s: &str| match s {
                "C1" => Ok(Counter::C1),
                "C2" => Ok(Counter::C2),
                _ => Err(err(format!("unknown counter `{s}`"))),
            };
            let index = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(format!("bad command index `{s}`")))
            };
            let cmd = match toks.as_slice() {
                ["INC", c] => Command::Inc(counter(c)?),
                ["DEC", c] => Command::Dec(counter(c)?),
                ["IFZ", c, k, j] => Command::IfZero(counter(c)?, index(k)?, index(j)?),
                ["HALT"] => Command::Halt,
                _ => return Err(err(format!("cannot parse command `{text}`"))),
            };
            commands.push(cmd);
        }
        MinskyMachine::new(commands)
    }
}

impl fmt::Display for MinskyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.commands {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The alphabet, in output order; only `u` is uncontrollable.
pub const ACTIONS: [&str; 9] = [
    "u", "a_C1", "a_C2", "inc_C1", "inc_C2", "dec_C1", "dec_C2", "is_zero", "not_zero",
];

const X: usize = 0;

fn eq(c: u32) -> Vec<Atom> {
    vec![Atom::new(X, Rel::Eq, c)]
}

fn open(lo: u32) -> Vec<Atom> {
    vec![Atom::new(X, Rel::Gt, lo), Atom::new(X, Rel::Lt, lo + 1)]
}

struct Builder {
    ta: Ta,
    index: BTreeMap<String, LocId>,
}

impl Builder {
    fn loc(&mut self, name: &str) -> LocId {
        if let Some(&l) = self.index.get(name) {
            return l;
        }
        let l = self.ta.locations.len();
        self.ta.locations.push(Location {
            name: name.to_string(),
            invariant: Vec::new(),
        });
        self.index.insert(name.to_string(), l);
        l
    }

    fn edge(&mut self, from: &str, guard: Vec<Atom>, action: &str, reset: bool, to: &str) {
        let e = Edge {
            source: self.loc(from),
            guard,
            action: self.ta.action_id(action),
            resets: if reset { vec![X] } else { Vec::new() },
            target: self.loc(to),
        };
        // shared locations make some gadget edges coincide
        if !self.ta.edges.contains(&e) {
            self.ta.edges.push(e);
        }
    }
}

const PRIV: &str = "lpriv";
const FIN: &str = "lf";

fn cmd_init(i: usize) -> String {
    format!("c{i}.init")
}

/// Compiles `m` into a single automaton. Unless `raw`, the final location
/// is made urgent so the result satisfies the model's validity rules.
pub fn encode(m: &MinskyMachine, raw: bool) -> Ta {
    let mut b = Builder {
        ta: Ta {
            clocks: vec!["x".to_string()],
            actions: ACTIONS
                .iter()
                .map(|&name| Action {
                    name: name.to_string(),
                    controllable: name != "u",
                })
                .collect(),
            locations: Vec::new(),
            edges: Vec::new(),
            init: 0,
            private: 0,
            finals: Vec::new(),
            tick: None,
            dup: None,
        },
        index: BTreeMap::new(),
    };
    b.loc("init");
    let private = b.loc(PRIV);
    let fin = b.loc(FIN);
    b.ta.private = private;
    b.ta.finals = vec![fin];

    let c0 = cmd_init(0);
    for target in ["act.init", "g1.init", "g2.init", c0.as_str()] {
        b.edge("init", eq(0), "u", false, target);
    }

    // at most one action allowed at any instant
    for v in ACTIONS {
        b.edge("act.init", Vec::new(), v, true, &format!("act.{v}"));
    }
    for v in ACTIONS {
        for w in ACTIONS.iter().filter(|&&w| w != v) {
            b.edge(&format!("act.{v}"), eq(0), w, false, "act.e");
        }
    }
    b.edge("act.e", Vec::new(), "u", false, FIN);

    // counter values repeat every three units
    for (g, c) in [("g1", Counter::C1), ("g2", Counter::C2)] {
        let init = format!("{g}.init");
        let l = format!("{g}.{}", c.as_str());
        let a = format!("a_{}", c.as_str());
        b.edge(&init, eq(3), "u", true, &init);
        b.edge(&init, open(c.window()), &a, true, &l);
        b.edge(&l, eq(0), "u", false, PRIV);
        b.edge(PRIV, eq(0), "u", false, FIN);
        b.edge(&l, eq(3), "u", false, FIN);
    }

    for (i, cmd) in m.commands.iter().enumerate() {
        let init = cmd_init(i);
        let p = |s: &str| format!("c{i}.{s}");
        match *cmd {
            Command::Inc(c) | Command::Dec(c) => {
                let w = c.window();
                let act = match cmd {
                    Command::Inc(_) => format!("inc_{}", c.as_str()),
                    _ => format!("dec_{}", c.as_str()),
                };
                b.edge(&init, eq(3), "u", true, &cmd_init(i + 1));
                b.edge(&init, open(w), &act, false, &p("l1"));
                b.edge(&init, open(w), &act, true, &p("l2"));
                b.edge(&init, eq(w + 1), "u", false, FIN);
                b.edge(&p("l1"), eq(w + 1), "u", true, PRIV);
                b.edge(PRIV, eq(0), "u", false, FIN);
                match cmd {
                    Command::Inc(_) => b.edge(&p("l2"), eq(3), "u", false, FIN),
                    _ => b.edge(&p("l2"), eq(0), "u", false, PRIV),
                }
                // relative to the reset on the first action
                b.edge(&p("l2"), open(0), &act, false, &p("l3"));
                b.edge(&p("l3"), Vec::new(), "u", false, FIN);
            }
            Command::IfZero(c, k, j) => {
                let w = c.window();
                let a = format!("a_{}", c.as_str());
                b.edge(&init, eq(0), "is_zero", false, &p("eq"));
                b.edge(&init, eq(0), "not_zero", false, &p("neq"));
                b.edge(&init, eq(w + 1), "u", false, FIN);
                b.edge(&p("eq"), eq(3), "u", true, &cmd_init(k));
                b.edge(&p("eq"), eq(w + 1), "u", true, PRIV);
                b.edge(&p("eq"), open(w), &a, false, &p("eq2"));
                b.edge(PRIV, eq(0), "u", false, FIN);
                b.edge(&p("eq2"), Vec::new(), "u", false, FIN);
                b.edge(&p("neq"), eq(3), "u", true, &cmd_init(j));
                b.edge(&p("neq"), open(w), &a, false, &p("neq2"));
                b.edge(&p("neq2"), eq(w + 1), "u", true, FIN);
            }
            Command::Halt => b.edge(&init, Vec::new(), "u", false, FIN),
        }
    }

    if raw {
        b.ta
    } else {
        b.ta.make_finals_urgent()
    }
}

/// Expected and observed size of one gadget family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub gadget: String,
    pub family: &'static str,
    pub expected: usize,
    pub found: usize,
}

impl CountRow {
    pub fn ok(&self) -> bool {
        self.expected == self.found
    }
}

impl fmt::Display for CountRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: expected {}, found {}",
            self.gadget, self.family, self.expected, self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralReport {
    pub rows: Vec<CountRow>,
    pub constants: BTreeSet<u32>,
}

impl StructuralReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(CountRow::ok) && self.constants == BTreeSet::from([0, 1, 2, 3])
    }

    pub fn mismatches(&self) -> Vec<&CountRow> {
        self.rows.iter().filter(|r| !r.ok()).collect()
    }
}

impl fmt::Display for StructuralReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let status = if r.ok() { "ok" } else { "MISMATCH" };
            writeln!(f, "{status:8} {r}")?;
        }
        writeln!(f, "guard constants: {:?}", self.constants)
    }
}

#[derive(Debug, Error)]
#[error("structural mismatch:\n{0}")]
pub struct StructuralMismatch(pub StructuralReport);

/// Gadget a location belongs to: the prefix before the first `.`, or
/// `shared` for the global initial, private and final locations.
fn gadget_of(name: &str) -> &str {
    name.split_once('.').map_or("shared", |(g, _)| g)
}

/// Closed-form counts from the gadget definitions. Locations are owned by
/// the gadget named in their prefix; an edge belongs to the gadget of its
/// source. The merged `lpriv -> lf` edge and the four initial branches are
/// the `shared` gadget.
fn expected_counts(m: &MinskyMachine) -> BTreeMap<String, (usize, usize)> {
    let s = ACTIONS.len();
    let mut out = BTreeMap::new();
    out.insert("shared".to_string(), (3, 5));
    // init, e and one location per action; lf is shared
    out.insert("act".to_string(), (s + 2, s + s * (s - 1) + 1));
    // init and the counter location; lpriv, lf and lpriv -> lf are shared
    out.insert("g1".to_string(), (2, 4));
    out.insert("g2".to_string(), (2, 4));
    for (i, c) in m.commands.iter().enumerate() {
        let counts = match c {
            // init, l1, l2, l3 (next init is owned by the next command)
            Command::Inc(_) | Command::Dec(_) => (4, 8),
            // init, eq, eq2, neq, neq2
            Command::IfZero(..) => (5, 10),
            Command::Halt => (1, 1),
        };
        out.insert(format!("c{i}"), counts);
    }
    out
}

/// Checks per-gadget location and edge counts and the guard constants of
/// an encoded machine.
pub fn structural_check(
    ta: &Ta,
    m: &MinskyMachine,
) -> Result<StructuralReport, StructuralMismatch> {
    let mut found: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for l in &ta.locations {
        found.entry(gadget_of(&l.name)).or_default().0 += 1;
    }
    for e in &ta.edges {
        found
            .entry(gadget_of(&ta.locations[e.source].name))
            .or_default()
            .1 += 1;
    }
    let expected = expected_counts(m);
    let mut rows = Vec::new();
    let gadgets: BTreeSet<&str> = expected
        .keys()
        .map(String::as_str)
        .chain(found.keys().copied())
        .collect();
    for g in gadgets {
        let (el, ee) = expected.get(g).copied().unwrap_or_default();
        let (fl, fe) = found.get(g).copied().unwrap_or_default();
        rows.push(CountRow {
            gadget: g.to_string(),
            family: "locations",
            expected: el,
            found: fl,
        });
        rows.push(CountRow {
            gadget: g.to_string(),
            family: "edges",
            expected: ee,
            found: fe,
        });
    }
    let x = ta.clock_id("x");
    let constants = ta
        .edges
        .iter()
        .flat_map(|e| &e.guard)
        .filter(|a| Some(a.clock) == x)
        .map(|a| a.bound)
        .collect();
    let report = StructuralReport { rows, constants };
    if report.ok() {
        Ok(report)
    } else {
        Err(StructuralMismatch(report))
    }
}
