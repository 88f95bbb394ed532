//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if
//! any criterion fails. Time limits are pinned below.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;

use etopaq::belief::Beliefs;
use etopaq::game::{
    check_exists, check_metastrategy, solve, witness_to_metastrategy, Mode, SolveOptions, Verdict,
};
use etopaq::minsky::{encode, structural_check, MinskyMachine};
use etopaq::msf::parse_msf;
use etopaq::oracle::{oracle_buckets, oracle_verdict};
use etopaq::region::{RegionSpace, TickTag};
use etopaq::strategy::{
    admitted_prefixes, find_witness_run, is_feasible, run_admits, Bucket, MetaStrategy,
};
use etopaq::ta::RunClass;

const VERDICT_LIMIT: Duration = Duration::from_secs(5);
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const MINSKY_LIMIT: Duration = Duration::from_secs(1);
const CANONICITY_PAIRS: usize = 10_000;
const RANDOM_PAIRS: u64 = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    ensure(took < limit, || {
        format!("{what} took {took:?}, limit {limit:?}")
    })?;
    Ok(out)
}

fn verdict(sp: &RegionSpace, mode: Mode) -> Verdict {
    solve(&Beliefs::new(sp), mode, &SolveOptions::default())
}

fn example_verdicts() -> Outcome {
    let opaque = space("ta_opaque.ta");
    let beliefs = Beliefs::new(&opaque);
    let v = timed(VERDICT_LIMIT, "TA_opaque full", || {
        verdict(&opaque, Mode::Full)
    })?;
    let Verdict::Sat(w) = v else {
        return Err(format!("TA_opaque full: {v:?}"));
    };
    let phi = witness_to_metastrategy(&w).map_err(|e| e.to_string())?;
    ensure(check_metastrategy(&beliefs, &phi, Mode::Full).ok(), || {
        "synthesized strategy for TA_opaque fails its check".into()
    })?;
    let star =
        parse_msf(opaque.ta(), &fixture("ta_opaque_phi_star.msf")).map_err(|e| e.to_string())?;
    ensure(check_metastrategy(&beliefs, &star, Mode::Full).ok(), || {
        "canonical strategy for TA_opaque is not OK".into()
    })?;

    let ta1 = space("ta1.ta");
    let full = timed(VERDICT_LIMIT, "TA1 full", || verdict(&ta1, Mode::Full))?;
    ensure(matches!(full, Verdict::Unsat { .. }), || {
        format!("TA1 full: {full:?}")
    })?;
    let weak = timed(VERDICT_LIMIT, "TA1 weak", || verdict(&ta1, Mode::Weak))?;
    ensure(matches!(weak, Verdict::Sat(_)), || {
        format!("TA1 weak: {weak:?}")
    })?;
    let hits = timed(VERDICT_LIMIT, "TA1 exists", || {
        check_exists(&Beliefs::new(&ta1))
    })?;
    ensure(hits.contains(&Bucket::Point(1)), || {
        format!("TA1 exists: {hits:?}")
    })?;

    let cx = space("ta_counterex.ta");
    let beliefs = Beliefs::new(&cx);
    let phi = parse_msf(cx.ta(), &fixture("ta_counterex_phi.msf")).map_err(|e| e.to_string())?;
    let report = timed(VERDICT_LIMIT, "TA_counterex check", || {
        check_metastrategy(&beliefs, &phi, Mode::Full)
    })?;
    ensure(report.offending == Some(Bucket::Interval(2)), || {
        format!("TA_counterex offending bucket {:?}", report.offending)
    })?;
    let w = timed(VERDICT_LIMIT, "TA_counterex witness", || {
        find_witness_run(
            &beliefs,
            &phi,
            Bucket::Interval(2),
            RunClass::Private,
            100_000,
        )
    })?
    .ok_or("no witness run in (2,3)")?;
    let (class, dur) = cx.ta().classify_run(&w).map_err(|e| e.to_string())?;
    ensure(
        class == RunClass::Private
            && Bucket::Interval(2).contains(dur)
            && is_feasible(&beliefs, &w, &phi).unwrap_or(false),
        || format!("witness {w:?} is {class:?} with duration {dur}"),
    )?;
    Ok(format!(
        "TA_opaque SAT, TA1 full UNSAT / weak SAT / exists {}, TA_counterex NOT-OK at (2,3), witness duration {dur}",
        hits.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ")
    ))
}

fn reference_automata() -> Outcome {
    let sp = space("ta_opaque.ta");
    let g = Beliefs::new(&sp).explore(1000);
    let map = isomorphism(sp.ta(), &opaque_reference(), &g).ok_or("TA_opaque: not isomorphic")?;
    let names = g.pretty_names();
    let contents = opaque_reference_contents();
    for (name, &i) in &map {
        ensure(names[i] == *name, || {
            format!("TA_opaque: {name} is named {}", names[i])
        })?;
        if let Some(want) = contents.get(name) {
            let want: BTreeSet<(String, String)> = want
                .iter()
                .map(|(l, x)| (l.to_string(), x.to_string()))
                .collect();
            ensure(x_projection(&sp, &g.nodes[i]) == want, || {
                format!("TA_opaque: contents of {name} differ")
            })?;
        }
    }
    let sp2 = space("ta_opaque2.ta");
    let g2 = Beliefs::new(&sp2).explore(1000);
    let map2 =
        isomorphism(sp2.ta(), &opaque2_reference(), &g2).ok_or("TA'_opaque: not isomorphic")?;
    let names2 = g2.pretty_names();
    for (name, &i) in &map2 {
        ensure(names2[i] == *name, || {
            format!("TA'_opaque: {name} is named {}", names2[i])
        })?;
    }
    Ok(format!(
        "TA_opaque {} states / {} edges, TA'_opaque {} states / {} edges",
        g.nodes.len(),
        g.edges.len(),
        g2.nodes.len(),
        g2.edges.len()
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for name in FIXTURES {
        let sp = space(name);
        flags_agree(&sp, &MetaStrategy::all_enabled(sp.ta()))
            .map_err(|e| format!("{name}: {e}"))?;
        checked += 1;
    }
    for (ta, msf) in [
        ("ta_opaque.ta", "ta_opaque_phi_star.msf"),
        ("ta1.ta", "ta1_all.msf"),
        ("ta_counterex.ta", "ta_counterex_phi.msf"),
    ] {
        let sp = space(ta);
        let phi = parse_msf(sp.ta(), &fixture(msf)).map_err(|e| e.to_string())?;
        flags_agree(&sp, &phi).map_err(|e| format!("{ta} {msf}: {e}"))?;
        checked += 1;
    }
    for (seed, ta, phi) in random_pairs(RANDOM_PAIRS) {
        let sp = RegionSpace::new(&ta).map_err(|e| e.to_string())?;
        flags_agree(&sp, &phi).map_err(|e| format!("random seed {seed}: {e}"))?;
        checked += 1;
    }
    let took = start.elapsed();
    ensure(took < ORACLE_LIMIT, || format!("took {took:?}"))?;
    Ok(format!(
        "{checked} (automaton, strategy) pairs in {took:.2?}"
    ))
}

fn robust_table() -> Outcome {
    use Bucket::{Interval as I, Point as P};
    let mut out = Vec::new();
    for (name, dpriv, dpub, want) in [
        (
            "robust_t2.ta",
            vec![P(0), I(0), P(1), I(1), P(2)],
            vec![I(0), I(1)],
            [
                (Mode::Full, false),
                (Mode::Almost, true),
                (Mode::Closed, true),
            ],
        ),
        (
            "robust_t3.ta",
            vec![I(0), P(2)],
            vec![I(0)],
            [
                (Mode::Full, false),
                (Mode::Almost, true),
                (Mode::Closed, false),
            ],
        ),
    ] {
        let sp = space(name);
        let all = MetaStrategy::all_enabled(sp.ta());
        let table = oracle_buckets(&sp, &all);
        ensure(flagged(&table, 4) == (dpriv, dpub), || {
            format!("{name}: oracle duration sets {:?}", flagged(&table, 4))
        })?;
        for (mode, sat) in want {
            let v = verdict(&sp, mode);
            let got = match v {
                Verdict::Sat(_) => true,
                Verdict::Unsat { .. } => false,
                v => return Err(format!("{name} {mode}: {v:?}")),
            };
            ensure(got == sat, || format!("{name} {mode}: got {got}"))?;
            ensure(oracle_verdict(&table, mode) == sat, || {
                format!("{name} {mode}: oracle verdict differs")
            })?;
            out.push(format!("{name} {mode}={}", if got { "yes" } else { "no" }));
        }
    }
    Ok(out.join(", "))
}

fn region_canonicity() -> Outcome {
    let mut equivalent = 0;
    for name in FIXTURES {
        let (bad, equiv) = canonicity_disagreements(&space(name), CANONICITY_PAIRS, 1);
        ensure(bad == 0, || format!("{name}: {bad} disagreements"))?;
        equivalent += equiv;
    }
    Ok(format!(
        "{} pairs per fixture, {equivalent} equivalent in total, 0 disagreements",
        CANONICITY_PAIRS
    ))
}

fn monotonicity() -> Outcome {
    let mut beliefs = 0;
    for name in FIXTURES {
        let sp = space(name);
        let v = monotonicity_violations(&sp);
        ensure(v.is_empty(), || format!("{name}: {}", v[0]))?;
        beliefs += Beliefs::new(&sp).explore(100_000).nodes.len();
    }
    Ok(format!("{beliefs} explored beliefs, 0 violations"))
}

fn closed_loop() -> Outcome {
    let mut sat = 0;
    for name in FIXTURES {
        let sp = space(name);
        let beliefs = Beliefs::new(&sp);
        for mode in Mode::ALL {
            let Verdict::Sat(w) = verdict(&sp, mode) else {
                continue;
            };
            let phi = witness_to_metastrategy(&w).map_err(|e| format!("{name} {mode}: {e}"))?;
            let report = check_metastrategy(&beliefs, &phi, mode);
            ensure(report.ok(), || {
                format!("{name} {mode}: check fails at {:?}", report.offending)
            })?;
            ensure(oracle_verdict(&oracle_buckets(&sp, &phi), mode), || {
                format!("{name} {mode}: oracle rejects")
            })?;
            sat += 1;
        }
    }
    Ok(format!("{sat} SAT (fixture, mode) pairs re-checked"))
}

fn minsky_counts() -> Outcome {
    let mut out = Vec::new();
    for name in ["halt.mm", "inc_halt.mm", "ifz_loop.mm"] {
        let m: MinskyMachine = fixture(name).parse().map_err(|e| format!("{name}: {e}"))?;
        let ta = timed(MINSKY_LIMIT, name, || encode(&m, false))?;
        structural_check(&ta, &m).map_err(|e| format!("{name}: {e}"))?;
        out.push(format!("{name} {}/{}", ta.locations.len(), ta.edges.len()));
    }
    Ok(out.join(", "))
}

fn admission() -> Outcome {
    let sp = space("ta_opaque.ta");
    let ta = sp.ta();
    let v = vec![
        label(ta, TickTag::Zero, &["a"]),
        label(ta, TickTag::One, &[]),
        label(ta, TickTag::One, &["a"]),
    ];
    for (i, r) in opaque_runs().iter().enumerate() {
        let lifted = ta.lift_run(r).map_err(|e| e.to_string())?;
        ensure(run_admits(&sp, &lifted, &v).unwrap_or(false), || {
            format!("rho{} does not admit v", i + 1)
        })?;
    }
    let mut compared = 0;
    for (name, r) in hand_built_runs() {
        let sp = space(name);
        let lifted = sp.ta().lift_run(&r).map_err(|e| e.to_string())?;
        for v in all_sequences(sp.ta(), 4) {
            let dp = *admitted_prefixes(&sp, &lifted, &v)
                .map_err(|e| e.to_string())?
                .last()
                .unwrap();
            let direct = admits_direct(&sp, &lifted, lifted.steps.len(), &v);
            ensure(dp == direct, || {
                format!("{name} {r:?} {v:?}: dp {dp}, direct {direct}")
            })?;
            compared += 1;
        }
    }
    Ok(format!(
        "rho1, rho2 admit v; {compared} sequences agree on 5 runs"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("example verdicts", example_verdicts),
        ("reference belief automata", reference_automata),
        ("oracle equivalence", oracle_equivalence),
        ("robust-mode table", robust_table),
        ("region canonicity", region_canonicity),
        ("belief monotonicity", monotonicity),
        ("synthesis closed loop", closed_loop),
        ("Minsky structural counts", minsky_counts),
        ("admission and feasibility", admission),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
