//! Line-oriented text format for timed automata.
//!
//! ```text
//! # comment
//! clock x
//! action u uncontrollable
//! action a controllable
//! location l0 init | x <= 1
//! location lpriv private
//! location lf final | w = 0
//! edge l0 -> lf | x = 1 | a | w
//! edge l0 -> l0 | true | ~ | -
//! ```
//!
//! Edge fields are guard (`true` or atoms joined by `&&`), action (`~` for
//! the silent action) and resets (`-` or a comma separated clock list).
//! [`print_ta`] emits exactly this canonical form, so canonical files round
//! trip byte for byte.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ta::{Action, Atom, Edge, Location, Rel, Ta};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '-'))
        && s != "-"
        && s != "~"
}

fn parse_atom(ta: &Ta, line: usize, text: &str) -> Result<Atom, ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != 3 {
        return err(line, format!("malformed constraint `{text}`"));
    }
    let clock = match ta.clock_id(toks[0]) {
        Some(c) => c,
        None => return err(line, format!("unknown clock `{}`", toks[0])),
    };
    let rel = match toks[1] {
        "<" => Rel::Lt,
        "<=" => Rel::Le,
        "=" | "==" => Rel::Eq,
        ">=" => Rel::Ge,
        ">" => Rel::Gt,
        r => return err(line, format!("unknown relation `{r}`")),
    };
    let bound: i64 = match toks[2].parse() {
        Ok(b) => b,
        Err(_) => return err(line, format!("bound `{}` is not an integer", toks[2])),
    };
    if bound < 0 {
        return err(line, format!("negative bound {bound}"));
    }
    if bound > u16::MAX as i64 / 2 {
        return err(line, format!("bound {bound} is too large"));
    }
    Ok(Atom::new(clock, rel, bound as u32))
}

fn parse_atoms(ta: &Ta, line: usize, text: &str) -> Result<Vec<Atom>, ParseError> {
    let text = text.trim();
    if text == "true" || text.is_empty() {
        return Ok(Vec::new());
    }
    text.split("&&")
        .map(|a| parse_atom(ta, line, a.trim()))
        .collect()
}

/// Parses the text format. Structural checks (names, references) are done
/// here; the opacity assumptions are left to [`Ta::validate`].
pub fn parse_ta(src: &str) -> Result<Ta, ParseError> {
    let mut ta = Ta {
        clocks: Vec::new(),
        actions: Vec::new(),
        locations: Vec::new(),
        edges: Vec::new(),
        init: usize::MAX,
        private: usize::MAX,
        finals: Vec::new(),
        tick: None,
        dup: None,
    };
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap().trim();
        if text.is_empty() {
            continue;
        }
        let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        match kw {
            "clock" => {
                if !is_ident(rest) || ta.clock_id(rest).is_some() {
                    return err(line, format!("bad or duplicate clock name `{rest}`"));
                }
                ta.clocks.push(rest.to_string());
            }
            "action" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 2 || !is_ident(toks[0]) {
                    return err(line, "expected `action NAME controllable|uncontrollable`");
                }
                if ta.action_id(toks[0]).is_some() {
                    return err(line, format!("duplicate action `{}`", toks[0]));
                }
                let controllable = match toks[1] {
                    "controllable" => true,
                    "uncontrollable" => false,
                    k => return err(line, format!("unknown action kind `{k}`")),
                };
                ta.actions.push(Action {
                    name: toks[0].to_string(),
                    controllable,
                });
            }
            "location" => {
                let (head, inv) = rest.split_once('|').unwrap_or((rest, ""));
                let toks: Vec<&str> = head.split_whitespace().collect();
                if toks.is_empty() || !is_ident(toks[0]) {
                    return err(line, "expected `location NAME [init] [private] [final]`");
                }
                if ta.loc_id(toks[0]).is_some() {
                    return err(line, format!("duplicate location `{}`", toks[0]));
                }
                let id = ta.locations.len();
                for flag in &toks[1..] {
                    match *flag {
                        "init" if ta.init == usize::MAX => ta.init = id,
                        "private" if ta.private == usize::MAX => ta.private = id,
                        "final" => ta.finals.push(id),
                        "init" | "private" => {
                            return err(line, format!("second `{flag}` location"))
                        }
                        f => return err(line, format!("unknown location flag `{f}`")),
                    }
                }
                let invariant = parse_atoms(&ta, line, inv)?;
                ta.locations.push(Location {
                    name: toks[0].to_string(),
                    invariant,
                });
            }
            "edge" => {
                let fields: Vec<&str> = rest.split('|').map(str::trim).collect();
                if fields.len() != 4 {
                    return err(line, "expected `edge SRC -> TGT | GUARD | ACTION | RESETS`");
                }
                let ends: Vec<&str> = fields[0].split("->").map(str::trim).collect();
                if ends.len() != 2 {
                    return err(line, "expected `SRC -> TGT`");
                }
                let loc = |n: &str| ta.loc_id(n);
                let (source, target) = match (loc(ends[0]), loc(ends[1])) {
                    (Some(s), Some(t)) => (s, t),
                    _ => return err(line, format!("unknown location in `{}`", fields[0])),
                };
                let guard = parse_atoms(&ta, line, fields[1])?;
                let action = match fields[2] {
                    "~" => None,
                    a => match ta.action_id(a) {
                        Some(a) => Some(a),
                        None => return err(line, format!("unknown action `{a}`")),
                    },
                };
                let mut resets = Vec::new();
                if fields[3] != "-" {
                    for c in fields[3].split(',') {
                        match ta.clock_id(c.trim()) {
                            Some(c) => resets.push(c),
                            None => return err(line, format!("unknown clock `{}`", c.trim())),
                        }
                    }
                }
                resets.sort_unstable();
                resets.dedup();
                ta.edges.push(Edge {
                    source,
                    guard,
                    action,
                    resets,
                    target,
                });
            }
            k => return err(line, format!("unknown keyword `{k}`")),
        }
    }
    let last = src.lines().count();
    if ta.locations.is_empty() {
        return err(last, "no locations");
    }
    if ta.init == usize::MAX {
        return err(last, "no `init` location");
    }
    if ta.private == usize::MAX {
        return err(last, "no `private` location");
    }
    ta.finals.sort_unstable();
    Ok(ta)
}

fn atoms_string(ta: &Ta, atoms: &[Atom]) -> String {
    let parts: Vec<String> = atoms.iter().map(|a| ta.atom_string(a)).collect();
    parts.join(" && ")
}

/// Canonical text form of `ta`. Tick and duplication bookkeeping is not
/// represented; printing an analysis automaton yields a plain automaton.
pub fn print_ta(ta: &Ta) -> String {
    let mut s = String::new();
    for c in &ta.clocks {
        let _ = writeln!(s, "clock {c}");
    }
    for a in &ta.actions {
        let kind = if a.controllable {
            "controllable"
        } else {
            "uncontrollable"
        };
        let _ = writeln!(s, "action {} {kind}", a.name);
    }
    for (i, l) in ta.locations.iter().enumerate() {
        let _ = write!(s, "location {}", l.name);
        if ta.init == i {
            s.push_str(" init");
        }
        if ta.private == i {
            s.push_str(" private");
        }
        if ta.is_final(i) {
            s.push_str(" final");
        }
        if !l.invariant.is_empty() {
            let _ = write!(s, " | {}", atoms_string(ta, &l.invariant));
        }
        s.push('\n');
    }
    for e in &ta.edges {
        let guard = if e.guard.is_empty() {
            "true".to_string()
        } else {
            atoms_string(ta, &e.guard)
        };
        let resets = if e.resets.is_empty() {
            "-".to_string()
        } else {
            let names: Vec<&str> = e.resets.iter().map(|&c| ta.clocks[c].as_str()).collect();
            names.join(",")
        };
        let _ = writeln!(
            s,
            "edge {} -> {} | {} | {} | {}",
            ta.locations[e.source].name,
            ta.locations[e.target].name,
            guard,
            ta.action_name(e.action),
            resets
        );
    }
    s
}
