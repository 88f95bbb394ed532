//! Graphviz exports of the region graph, the belief automaton and the game.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::belief::{Belief, BeliefGraph, BeliefLabel, Beliefs};
use crate::game::GameGraph;
use crate::region::{Region, RegionSpace};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn label_string(sp: &RegionSpace, l: BeliefLabel) -> String {
    format!("{} {}", l.tick.as_str(), sp.ta().set_string(l.enabled))
}

fn belief_string(sp: &RegionSpace, b: &Belief) -> String {
    match b {
        Belief::Bottom => "⊥".to_string(),
        b if b.is_dead() => "∅".to_string(),
        b => b
            .regions()
            .iter()
            .map(|r| sp.render(r))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

/// Reachable part of the labelled region graph, at most `cap` regions.
pub fn regions_dot(sp: &RegionSpace, cap: usize) -> String {
    let mut index: BTreeMap<Region, usize> = BTreeMap::new();
    let mut nodes = vec![sp.initial()];
    index.insert(sp.initial(), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (label, s) in sp.successors(&nodes[i]) {
            let j = match index.get(&s) {
                Some(&j) => j,
                None if nodes.len() >= cap => continue,
                None => {
                    let j = nodes.len();
                    index.insert(s.clone(), j);
                    nodes.push(s);
                    queue.push_back(j);
                    j
                }
            };
            let text = format!(
                "{} {}",
                label.tick.as_str(),
                sp.ta().action_name(label.action)
            );
            edges.push((i, text, j));
        }
    }

    let mut out = String::from("digraph regions {\n  node [shape=box];\n");
    for (i, r) in nodes.iter().enumerate() {
        let mut attrs = format!("label={}", quote(&sp.render(r)));
        if sp.is_final(r) {
            attrs.push_str(if sp.is_secret(r) {
                ", peripheries=2, color=red"
            } else {
                ", peripheries=2"
            });
        }
        let _ = writeln!(out, "  r{i} [{attrs}];");
    }
    for (i, text, j) in edges {
        let _ = writeln!(out, "  r{i} -> r{j} [label={}];", quote(&text));
    }
    out.push_str("}\n");
    out
}

/// The belief automaton. Nodes show their regions, or short
/// names (`b0`, `b(0,1)'`, ...) when `pretty`.
pub fn beliefs_dot(beliefs: &Beliefs<'_>, g: &BeliefGraph, pretty: bool) -> String {
    let sp = beliefs.space();
    let names = pretty.then(|| g.pretty_names());
    let mut out = String::from("digraph beliefs {\n  node [shape=box];\n");
    for (i, b) in g.nodes.iter().enumerate() {
        let text = match &names {
            Some(n) => n[i].clone(),
            None => belief_string(sp, b),
        };
        let mut attrs = format!("label={}", quote(&text));
        if pretty {
            let _ = write!(attrs, ", tooltip={}", quote(&belief_string(sp, b)));
        }
        if beliefs.leaking_full(b) {
            attrs.push_str(", color=red");
        }
        let _ = writeln!(out, "  b{i} [{attrs}];");
    }
    for &(i, l, j) in &g.edges {
        let _ = writeln!(
            out,
            "  b{i} -> b{j} [label={}];",
            quote(&label_string(sp, l))
        );
    }
    out.push_str("}\n");
    out
}

/// The explored game graph. Beliefs are numbered in order of first
/// appearance and listed in a legend node.
pub fn game_dot(beliefs: &Beliefs<'_>, g: &GameGraph) -> String {
    let sp = beliefs.space();
    let mut ids: BTreeMap<&Belief, usize> = BTreeMap::new();
    let mut order: Vec<&Belief> = Vec::new();
    for s in &g.states {
        for b in [&s.current, &s.accumulated] {
            if !ids.contains_key(b) {
                ids.insert(b, order.len());
                order.push(b);
            }
        }
    }
    let mut out = String::from("digraph game {\n  node [shape=box];\n");
    for (i, s) in g.states.iter().enumerate() {
        let phase = if s.current.is_bottom() {
            "start"
        } else if s.at_integer {
            "point"
        } else {
            "interval"
        };
        let mut text = format!("B{} / B{}\n{phase}", ids[&s.current], ids[&s.accumulated]);
        if s.obligation {
            text.push_str(" obl");
        }
        let _ = writeln!(out, "  g{i} [label={}];", quote(&text));
    }
    for (i, succ) in g.edges.iter().enumerate() {
        for &(l, j) in succ {
            let _ = writeln!(
                out,
                "  g{i} -> g{j} [label={}];",
                quote(&label_string(sp, l))
            );
        }
    }
    let legend: Vec<String> = order
        .iter()
        .enumerate()
        .map(|(k, b)| format!("B{k}: {}", belief_string(sp, b).replace('\n', ", ")))
        .collect();
    let _ = writeln!(
        out,
        "  legend [shape=note, label={}];",
        quote(&legend.join("\n"))
    );
    out.push_str("}\n");
    out
}
