//! One line per acceptance criterion. Exits nonzero when any criterion fails.
//! Lines marked `info` report the split-aware classical system beside the
//! literal one and do not affect the exit status.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use gdf_core::analysis::SystemName;
use gdf_core::{tilde_eval_sum, CanonicalDiagram, GaussWord, Role, Sign, Token};
use gdf_verify::{run, Check, Context, Options, Report};

/// Every oriented signed chord pattern with `n` arrows, canonicalized.
fn all_diagrams(n: usize, signed: bool) -> BTreeSet<CanonicalDiagram> {
    fn fill(slots: &mut Vec<Option<(u32, Role)>>, letter: u32, out: &mut Vec<Vec<(u32, Role)>>) {
        let Some(first) = slots.iter().position(|s| s.is_none()) else {
            out.push(slots.iter().map(|s| s.unwrap()).collect());
            return;
        };
        for second in first + 1..slots.len() {
            if slots[second].is_some() {
                continue;
            }
            for (a, b) in [(Role::Tail, Role::Head), (Role::Head, Role::Tail)] {
                slots[first] = Some((letter, a));
                slots[second] = Some((letter, b));
                fill(slots, letter + 1, out);
                slots[second] = None;
            }
            slots[first] = None;
        }
    }
    let mut shapes = Vec::new();
    fill(&mut vec![None; 2 * n], 1, &mut shapes);
    let mut out = BTreeSet::new();
    for shape in shapes {
        for signs in 0u32..(1 << n) {
            let tokens = shape
                .iter()
                .map(|&(l, r)| Token::new(l, r, if signs >> (l - 1) & 1 == 1 { Sign::Minus } else { Sign::Plus }))
                .collect();
            out.insert(GaussWord::new(tokens, true).unwrap().canonical(signed));
        }
    }
    out
}

/// Connected 2-arrow signed and 3-arrow unsigned classes, counted from scratch.
fn independent_basis_counts() -> (usize, usize) {
    let two = all_diagrams(2, true).into_iter().filter(|d| d.interlacement_connected()).count();
    let three = all_diagrams(3, false).into_iter().filter(|d| d.interlacement_connected()).count();
    (two, three)
}

/// Every nullspace formula pairs to zero with every relator, relator by relator.
fn annihilates_relators(ctx: &Context) -> bool {
    [(SystemName::Virtual, false), (SystemName::Classical, true)].iter().all(|&(name, classical)| {
        let rs = gdf_core::analysis::relator_system(name, gdf_core::analysis::Source::Generated).unwrap();
        let formulas = if classical { ctx.classical.formulas() } else { ctx.virt.formulas() };
        formulas.iter().all(|f| rs.relators().iter().all(|r| tilde_eval_sum(f, r.sum()).unwrap() == 0))
    })
}

struct Line {
    criterion: usize,
    passed: bool,
    text: String,
}

fn line(criterion: usize, title: &str, reports: &[Report], extra: Option<(bool, String)>) -> Line {
    let mut passed = reports.iter().all(|r| r.passed);
    let mut parts: Vec<String> = reports.iter().map(|r| r.summary.clone()).collect();
    if let Some((ok, text)) = extra {
        passed &= ok;
        parts.push(text);
    }
    Line { criterion, passed, text: format!("{}: {}", title, parts.join("; ")) }
}

fn emit(l: Line, info: &[Report], started: Instant, lines: &mut Vec<Line>) {
    println!(
        "criterion {:>2} {} {} [{:.1}s]",
        l.criterion,
        if l.passed { "PASS" } else { "FAIL" },
        l.text,
        started.elapsed().as_secs_f64()
    );
    for rep in info {
        println!("          info {}", rep);
    }
    lines.push(l);
}

fn main() -> ExitCode {
    let ctx = Context::new();
    let opts = Options::default();
    let split = Options { classical: SystemName::ClassicalSplit, ..opts };
    let r = |c: Check| run(c, &ctx, &opts);
    let mut lines = Vec::new();

    let t = Instant::now();
    let (two, three) = independent_basis_counts();
    let extra = Some((two == 16 && three == 32, format!("independent enumeration {} + {}", two, three)));
    emit(line(1, "basis counts", &[r(Check::Basis)], extra), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(2, "relator counts", &[r(Check::Relators)], None), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(3, "system equivalence", &[r(Check::Equivalence)], None), &[], t, &mut lines);
    let t = Instant::now();
    let exact = annihilates_relators(&ctx);
    let extra = Some((exact, format!("relator-by-relator pairing vanishes: {}", exact)));
    emit(line(4, "dimensions", &[r(Check::Dims), r(Check::Containment)], extra), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(5, "Polyak-Viro formula", &[r(Check::Pv)], None), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(6, "degree-2 invariants", &[r(Check::V2)], None), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(7, "restriction classification", &[r(Check::Restriction)], None), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(8, "factorization", &[r(Check::Thm3)], None), &[], t, &mut lines);
    let t = Instant::now();
    let fuzz = line(9, "invariance fuzzing", &[r(Check::Fuzz)], None);
    emit(fuzz, &[run(Check::Fuzz, &ctx, &split)], t, &mut lines);
    let t = Instant::now();
    emit(line(10, "non-invariance demonstration", &[r(Check::NoninvarianceDemo)], None), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(11, "additivity", &[r(Check::Additivity)], None), &[], t, &mut lines);
    let t = Instant::now();
    emit(line(12, "pairing oracle", &[r(Check::Oracle)], None), &[], t, &mut lines);
    let t = Instant::now();
    let rotation = line(13, "rotation property", &[r(Check::Rotation)], None);
    emit(rotation, &[run(Check::Rotation, &ctx, &split)], t, &mut lines);

    let failed: Vec<usize> = lines.iter().filter(|l| !l.passed).map(|l| l.criterion).collect();
    println!("{} of {} criteria pass", lines.len() - failed.len(), lines.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {:?}", failed);
        ExitCode::FAILURE
    }
}
