//! Named checks over the solved systems. Each check returns a report whose
//! status is the check's predicate evaluated on the attached witness.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use gdf_core::analysis::{
    degree2_shape_sums, degree_split, factor_through, polyak_viro_candidates, restriction_kernel_vector,
    restriction_rank, restrictions, solve_named, Located, Solution, SystemName, Source, formula,
};
use gdf_core::corpus::{builtin, classical_entries, classify_restriction, random_word, NAMES};
use gdf_core::linalg::contains_subspace;
use gdf_core::moves::{fuzz_invariance, random_walk, trial_rng, FuzzConfig, FuzzReport};
use gdf_core::relators::{transcribed_relators, Flavor, Move, RelatorSystem};
use gdf_core::{count_occurrences, degree3_basis, CanonicalDiagram, GaussFormula, GaussWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Basis,
    Relators,
    Equivalence,
    Dims,
    Containment,
    Pv,
    V2,
    Restriction,
    Thm3,
    Fuzz,
    NoninvarianceDemo,
    Additivity,
    Oracle,
    Rotation,
}

impl Check {
    pub const ALL: [Check; 14] = [
        Check::Basis,
        Check::Relators,
        Check::Equivalence,
        Check::Dims,
        Check::Containment,
        Check::Pv,
        Check::V2,
        Check::Restriction,
        Check::Thm3,
        Check::Fuzz,
        Check::NoninvarianceDemo,
        Check::Additivity,
        Check::Oracle,
        Check::Rotation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Basis => "basis",
            Check::Relators => "relators",
            Check::Equivalence => "equivalence",
            Check::Dims => "dims",
            Check::Containment => "containment",
            Check::Pv => "pv",
            Check::V2 => "v2",
            Check::Restriction => "restriction",
            Check::Thm3 => "thm3",
            Check::Fuzz => "fuzz",
            Check::NoninvarianceDemo => "noninvariance-demo",
            Check::Additivity => "additivity",
            Check::Oracle => "oracle",
            Check::Rotation => "rotation",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Check, String> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
            format!("unknown check {:?} (one of {})", s, names.join(", "))
        })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub check: Check,
    pub passed: bool,
    pub summary: String,
    pub witness: Value,
    pub elapsed: Duration,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check.name(),
            "status": if self.passed { "pass" } else { "fail" },
            "summary": self.summary,
            "witness": self.witness,
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.check, self.summary)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub seed: u64,
    pub trials: usize,
    pub steps: usize,
    /// Classical system used by the fuzz and rotation checks.
    pub classical: SystemName,
}

impl Default for Options {
    fn default() -> Options {
        Options { seed: 1, trials: 1000, steps: 30, classical: SystemName::Classical }
    }
}

/// Fuzzing budget; both flavors together must finish within it.
pub const FUZZ_BUDGET: Duration = Duration::from_secs(60);

/// Largest number of walks searched for a value change of the Polyak-Viro formula.
pub const DEMO_TRACES: usize = 10_000;

pub struct Context {
    pub virt: Solution,
    pub classical: Solution,
    pub split: Solution,
    pub virt_transcribed: Solution,
    pub classical_transcribed: Solution,
    generated: [RelatorSystem; 2],
    transcribed: [RelatorSystem; 2],
}

impl Context {
    pub fn new() -> Context {
        let solve = |n, s| solve_named(n, s).expect("systems build");
        let t = transcribed_relators();
        Context {
            virt: solve(SystemName::Virtual, Source::Generated),
            classical: solve(SystemName::Classical, Source::Generated),
            split: solve(SystemName::ClassicalSplit, Source::Generated),
            virt_transcribed: solve(SystemName::Virtual, Source::Transcribed),
            classical_transcribed: solve(SystemName::Classical, Source::Transcribed),
            generated: [
                gdf_core::relators::generate_virtual_relators(),
                gdf_core::relators::generate_classical_relators(),
            ],
            transcribed: [t.system.clone(), t.classical().expect("transcribed list pairs up")],
        }
    }

    pub fn solution(&self, name: SystemName) -> &Solution {
        match name {
            SystemName::Virtual => &self.virt,
            SystemName::Classical => &self.classical,
            SystemName::ClassicalSplit => &self.split,
        }
    }
}

impl Default for Context {
    fn default() -> Context {
        Context::new()
    }
}

pub fn run(check: Check, ctx: &Context, opts: &Options) -> Report {
    let start = Instant::now();
    let (passed, summary, witness) = match check {
        Check::Basis => basis(),
        Check::Relators => relators(ctx),
        Check::Equivalence => equivalence(ctx),
        Check::Dims => dims(ctx),
        Check::Containment => containment(ctx),
        Check::Pv => pv(ctx),
        Check::V2 => v2(ctx),
        Check::Restriction => restriction(ctx),
        Check::Thm3 => thm3(ctx),
        Check::Fuzz => fuzz(ctx, opts),
        Check::NoninvarianceDemo => noninvariance_demo(ctx, opts),
        Check::Additivity => additivity(ctx, opts),
        Check::Oracle => oracle(opts),
        Check::Rotation => rotation(ctx, opts),
    };
    Report { check, passed, summary, witness, elapsed: start.elapsed() }
}

type Outcome = (bool, String, Value);

fn basis() -> Outcome {
    let b = degree3_basis();
    let two = b.indices_with_arrows(2);
    let three = b.indices_with_arrows(3);
    let two_ok = two.iter().all(|&i| b.get(i).is_signed() && b.get(i).interlacement_connected());
    let three_ok = three.iter().all(|&i| !b.get(i).is_signed() && b.get(i).interlacement_connected());
    let first_two = two.iter().copied().eq(0..two.len());
    let passed = b.len() == 48 && two.len() == 16 && three.len() == 32 && two_ok && three_ok && first_two;
    let entries: Vec<String> = b.entries().iter().map(|d| d.text()).collect();
    (
        passed,
        format!("{} entries: {} signed 2-arrow, {} unsigned 3-arrow, all connected", b.len(), two.len(), three.len()),
        json!({ "entries": entries }),
    )
}

fn move_counts(rs: &RelatorSystem) -> (usize, usize, usize) {
    (rs.len(), rs.count_by_move(Move::WII), rs.count_by_move(Move::SIII))
}

fn relators(ctx: &Context) -> Outcome {
    let rows = [
        ("generated virtual", move_counts(&ctx.generated[0]), (84, 18, 66)),
        ("transcribed virtual", move_counts(&ctx.transcribed[0]), (84, 18, 66)),
        ("generated classical", move_counts(&ctx.generated[1]), (54, 18, 36)),
        ("transcribed classical", move_counts(&ctx.transcribed[1]), (54, 18, 36)),
    ];
    let passed = rows.iter().all(|(_, got, want)| got == want);
    let text: Vec<String> =
        rows.iter().map(|(name, (n, w, s), _)| format!("{} {} = {} WII + {} SIII", name, n, w, s)).collect();
    let witness: Vec<Value> = rows
        .iter()
        .map(|(name, (n, w, s), _)| json!({ "system": name, "total": n, "WII": w, "SIII": s }))
        .collect();
    (passed, text.join("; "), Value::Array(witness))
}

fn same_space(a: &Solution, b: &Solution) -> bool {
    contains_subspace(&a.nullspace, &b.nullspace).unwrap_or(false) && contains_subspace(&b.nullspace, &a.nullspace).unwrap_or(false)
}

fn equivalence(ctx: &Context) -> Outcome {
    let v = same_space(&ctx.virt, &ctx.virt_transcribed);
    let c = same_space(&ctx.classical, &ctx.classical_transcribed);
    let flagged = transcribed_relators().flagged_indices();
    (
        v && c,
        format!(
            "generated and corrected transcribed nullspaces equal: virtual {}, classical {} ({} transcribed entries corrected)",
            v,
            c,
            flagged.len()
        ),
        json!({ "virtual_equal": v, "classical_equal": c, "corrected_entries": flagged }),
    )
}

fn dims(ctx: &Context) -> Outcome {
    let (c, v, s) = (ctx.classical.dim(), ctx.virt.dim(), ctx.split.dim());
    let exact = ctx.classical.annihilates() && ctx.virt.annihilates();
    (
        c == 21 && v >= 7 && exact,
        format!("classical {}, virtual {}, split-aware classical {}; every vector annihilates its matrix: {}", c, v, s, exact),
        json!({ "classical": c, "virtual": v, "classical_split": s, "annihilated": exact }),
    )
}

fn containment(ctx: &Context) -> Outcome {
    let vc = contains_subspace(&ctx.classical.nullspace, &ctx.virt.nullspace).unwrap_or(false);
    let cv = contains_subspace(&ctx.virt.nullspace, &ctx.classical.nullspace).unwrap_or(true);
    let sv = contains_subspace(&ctx.split.nullspace, &ctx.virt.nullspace).unwrap_or(false);
    let cs = contains_subspace(&ctx.classical.nullspace, &ctx.split.nullspace).unwrap_or(false);
    (
        vc && !cv,
        format!("virtual in classical {}, classical in virtual {}; virtual in split {}, split in classical {}", vc, cv, sv, cs),
        json!({ "virtual_in_classical": vc, "classical_in_virtual": cv, "virtual_in_split": sv, "split_in_classical": cs }),
    )
}

fn located_json(l: &Located) -> Value {
    json!({
        "support": l.support.iter().map(|(d, c)| json!({ "diagram": d.text(), "coeff": c })).collect::<Vec<_>>(),
        "values": l.values,
        "vector": l.vector,
    })
}

/// The Polyak-Viro candidates of the classical space with values (0, 2, -2).
pub fn polyak_viro(ctx: &Context) -> Vec<Located> {
    polyak_viro_candidates(&ctx.classical.nullspace, &ctx.classical.basis)
        .expect("based formulas on based words")
        .into_iter()
        .filter(|l| l.values == [0, 2, -2])
        .collect()
}

fn is_primitive(v: &[i64]) -> bool {
    let g = v.iter().fold(0i64, |g, &x| gcd(g, x));
    g == 1 && v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn pv(ctx: &Context) -> Outcome {
    let all = polyak_viro_candidates(&ctx.classical.nullspace, &ctx.classical.basis).expect("based formulas");
    let based = all.iter().filter(|l| l.support.iter().all(|(d, _)| d.is_based())).count();
    let found = polyak_viro(ctx);
    let passed = found.iter().any(|l| is_primitive(&l.vector));
    let summary = match found.first() {
        Some(l) => format!(
            "{} + 2·{} (unbased, summed over base placements) has values {:?}; {} based two-term candidates",
            l.support[0].0, l.support[1].0, l.values, based
        ),
        None => format!("no candidate with values (0, 2, -2); {} candidates in total", all.len()),
    };
    (passed, summary, json!({ "found": found.iter().map(located_json).collect::<Vec<_>>(), "based_candidates": based }))
}

fn v2(ctx: &Context) -> Outcome {
    let sums = degree2_shape_sums(&ctx.classical.nullspace, &ctx.virt.nullspace, &ctx.classical.basis).expect("based formulas");
    let inside: Vec<_> = sums.iter().filter(|s| s.in_classical).collect();
    let passed = sums.len() == 4 && inside.len() == 2 && inside.iter().all(|s| s.in_virtual && s.values == [0, 1, 1]);
    let names: Vec<String> = inside.iter().map(|s| format!("{} {:?}", s.shape, s.values)).collect();
    let witness: Vec<Value> = sums
        .iter()
        .map(|s| json!({ "shape": s.shape.text(), "in_classical": s.in_classical, "in_virtual": s.in_virtual, "values": s.values }))
        .collect();
    (passed, format!("{} of {} shape sums in the classical space: {}", inside.len(), sums.len(), names.join(", ")), Value::Array(witness))
}

fn restriction(ctx: &Context) -> Outcome {
    let classical = restrictions(&ctx.classical.formulas());
    let virt = restrictions(&ctx.virt.formulas());
    let kernel = restriction_kernel_vector(&ctx.virt.nullspace, &ctx.virt.basis);
    let (Ok(classical), Ok(virt), Ok(kernel)) = (classical, virt, kernel) else {
        return (false, "classification failed on some basis vector".into(), Value::Null);
    };
    let rank = restriction_rank(&virt);
    let kernel_ok = kernel.as_ref().is_some_and(|v| {
        v.iter().any(|&x| x != 0)
            && classify_restriction(&formula("kernel", &ctx.virt.basis, v)).map(|(l, m)| *l.numer() == 0 && *m.numer() == 0).unwrap_or(false)
    });
    (
        rank == 2 && kernel_ok,
        format!(
            "{} classical vectors classified; virtual (λ, μ) rank {}; nonzero virtual vector restricting to (0, 0): {}",
            classical.len(),
            rank,
            kernel_ok
        ),
        json!({ "classical": show(&classical), "virtual": show(&virt), "rank": rank, "kernel_vector": kernel }),
    )
}

fn show<T: fmt::Display>(pairs: &[(T, T)]) -> Vec<String> {
    pairs.iter().map(|(l, m)| format!("({}, {})", l, m)).collect()
}

fn thm3(ctx: &Context) -> Outcome {
    let (w, _) = degree_split(&ctx.virt.nullspace, &ctx.virt.basis);
    let v = &ctx.classical.nullspace;
    match factor_through(v, &w) {
        Ok(f) => {
            let product_ok = f.a.mul(&v.as_matrix()).map(|p| p == w.as_matrix()).unwrap_or(false);
            let shape = (f.a.rows(), f.a.cols());
            (
                shape == (5, 21) && product_ok && f.right_inverse,
                format!("A is {}x{}, A·v = w exactly: {}, v·v+ = I: {}", shape.0, shape.1, product_ok, f.right_inverse),
                json!({ "rows": shape.0, "cols": shape.1, "a": f.a.to_csv(), "exact": product_ok, "right_inverse": f.right_inverse }),
            )
        }
        Err(e) => (false, format!("factorization failed: {}", e), Value::Null),
    }
}

/// Random words with up to four arrows, most of them not realizable, plus the corpus.
pub fn virtual_seeds(seed: u64) -> Vec<GaussWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds: Vec<GaussWord> = NAMES.iter().map(|n| builtin(n).expect("builtin").word).collect();
    seeds.extend((0..24).map(|i| random_word(1 + i % 4, &mut rng)));
    seeds
}

fn fuzz_json(r: &FuzzReport) -> Value {
    json!({
        "flavor": r.flavor,
        "trials": r.trials,
        "steps": r.steps,
        "formulas": r.formulas,
        "violations": r.violations.len(),
        "violating_trials": r.violating_trials(),
        "first": r.violations.first().map(|v| json!({
            "trial": v.trial, "seed": v.seed_word, "formula": v.formula, "before": v.before, "after": v.after, "trace": v.trace,
        })),
    })
}

fn fuzz(ctx: &Context, opts: &Options) -> Outcome {
    let start = Instant::now();
    let classical_seeds: Vec<GaussWord> = classical_entries().into_iter().map(|e| e.word).collect();
    let config = |flavor| FuzzConfig { flavor, trials: opts.trials, steps: opts.steps, seed: opts.seed };
    let c = fuzz_invariance(&ctx.solution(opts.classical).formulas(), &classical_seeds, config(Flavor::Classical))
        .expect("corpus seeds are realizable");
    let v = fuzz_invariance(&ctx.virt.formulas(), &virtual_seeds(opts.seed), config(Flavor::Virtual)).expect("virtual walks");
    let elapsed = start.elapsed();
    let passed = c.passed() && v.passed() && elapsed < FUZZ_BUDGET;
    (
        passed,
        format!(
            "{} ({} formulas): {} violations in {} trials; virtual ({} formulas): {} violations in {} trials; within {} s: {}",
            opts.classical,
            c.formulas,
            c.violations.len(),
            c.violating_trials(),
            v.formulas,
            v.violations.len(),
            v.violating_trials(),
            FUZZ_BUDGET.as_secs(),
            elapsed < FUZZ_BUDGET
        ),
        json!({ "classical": fuzz_json(&c), "virtual": fuzz_json(&v), "within_budget": elapsed < FUZZ_BUDGET }),
    )
}

fn noninvariance_demo(ctx: &Context, opts: &Options) -> Outcome {
    let Some(pv) = polyak_viro(ctx).into_iter().next() else {
        return (false, "no Polyak-Viro vector to test".into(), Value::Null);
    };
    let f = formula("polyak-viro", &ctx.classical.basis, &pv.vector);
    let seeds = [builtin("virtual_trefoil").expect("builtin").word];
    let batch = 500;
    let mut searched = 0;
    while searched < DEMO_TRACES {
        let trials = batch.min(DEMO_TRACES - searched);
        let config = FuzzConfig { flavor: Flavor::Virtual, trials, steps: opts.steps, seed: opts.seed.wrapping_add(searched as u64) };
        let report = fuzz_invariance(std::slice::from_ref(&f), &seeds, config).expect("virtual walks");
        if let Some(v) = report.violations.first() {
            return (
                true,
                format!("value {} -> {} after {} moves, within {} traces", v.before, v.after, v.trace.len(), searched + v.trial + 1),
                json!({ "traces": searched + v.trial + 1, "trace": v.trace, "before": v.before, "after": v.after }),
            );
        }
        searched += trials;
    }
    (false, format!("no value change in {} traces", searched), json!({ "traces": searched }))
}

/// Corpus knots and words reached from them by short virtual walks.
fn corpus_words(seed: u64, count: usize) -> Vec<GaussWord> {
    let mut out: Vec<GaussWord> = NAMES.iter().map(|n| builtin(n).expect("builtin").word).collect();
    let mut t = 0;
    while out.len() < count {
        let start = out[t % NAMES.len()].clone();
        let walk = random_walk(&start, 6, &mut trial_rng(seed, t as u64), Flavor::Virtual).expect("virtual walks");
        out.push(walk.last().clone());
        t += 1;
    }
    out
}

fn additivity(ctx: &Context, opts: &Options) -> Outcome {
    let formulas: Vec<GaussFormula> =
        ctx.virt.formulas().into_iter().chain(ctx.classical.formulas()).filter(|f| f.has_connected_support()).collect();
    let words = corpus_words(opts.seed, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let a = &words[rng.gen_range(0..words.len())];
        let b = &words[rng.gen_range(0..words.len())];
        let sum = a.connected_sum(b).expect("based words");
        for f in &formulas {
            let (x, y, z) = (f.evaluate(a).unwrap(), f.evaluate(b).unwrap(), f.evaluate(&sum).unwrap());
            if x + y != z {
                failures.push(json!({ "formula": f.label(), "a": a.to_text(), "b": b.to_text(), "a_plus_b": [x, y], "sum": z }));
            }
        }
    }
    (
        failures.is_empty(),
        format!("{} connected formulas on 50 pairs: {} failures", formulas.len(), failures.len()),
        json!({ "formulas": formulas.len(), "failures": failures }),
    )
}

/// Signed count by enumerating every arrow subset and comparing canonical forms.
fn brute_force_count(pattern: &CanonicalDiagram, target: &GaussWord) -> i64 {
    let letters: Vec<u32> = target.letters().into_iter().collect();
    let mut total = 0;
    for mask in 0u32..(1 << letters.len()) {
        if mask.count_ones() as usize != pattern.arrow_count() {
            continue;
        }
        let keep: BTreeSet<u32> = (0..letters.len()).filter(|i| mask >> i & 1 == 1).map(|i| letters[i]).collect();
        let sub = target.restrict(&keep);
        if sub.canonical(pattern.is_signed()) == *pattern {
            total += sub.sign_product();
        }
    }
    total
}

fn oracle(opts: &Options) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let patterns: Vec<CanonicalDiagram> = (0..50)
        .map(|_| {
            let k = rng.gen_range(0..=3);
            let signed = rng.gen::<bool>();
            random_word(k, &mut rng).canonical(signed)
        })
        .collect();
    let words: Vec<GaussWord> = (0..200).map(|_| random_word(rng.gen_range(0..=6), &mut rng)).collect();
    let mut mismatches = Vec::new();
    for w in &words {
        for p in &patterns {
            let (fast, slow) = (count_occurrences(p, w).expect("based pair"), brute_force_count(p, w));
            if fast != slow {
                mismatches.push(json!({ "pattern": p.text(), "word": w.to_text(), "count": fast, "brute_force": slow }));
            }
        }
    }
    (
        mismatches.is_empty(),
        format!("{} words x {} patterns: {} mismatches", words.len(), patterns.len(), mismatches.len()),
        json!({ "mismatches": mismatches }),
    )
}

fn rotation(ctx: &Context, opts: &Options) -> Outcome {
    let formulas = ctx.solution(opts.classical).formulas();
    let seeds: Vec<GaussWord> = classical_entries().into_iter().map(|e| e.word).collect();
    let mut failures = Vec::new();
    let mut words = 0;
    for t in 0..100u64 {
        let start = &seeds[t as usize % seeds.len()];
        let walk = random_walk(start, 20, &mut trial_rng(opts.seed, t), Flavor::Classical).expect("realizable seeds");
        let w = walk.last();
        words += 1;
        if w.is_empty() {
            continue;
        }
        for f in &formulas {
            let x = f.evaluate(w).unwrap();
            if let Some(k) = (1..w.len() as i64).find(|&k| f.evaluate(&w.rotate_base(k).unwrap()).unwrap() != x) {
                failures.push(json!({ "formula": f.label(), "word": w.to_text(), "shift": k }));
            }
        }
    }
    let bad_words: BTreeSet<String> = failures.iter().map(|f| f["word"].to_string()).collect();
    (
        failures.is_empty(),
        format!(
            "{} ({} formulas) on {} realizable words: {} formula-word failures on {} words",
            opts.classical,
            formulas.len(),
            words,
            failures.len(),
            bad_words.len()
        ),
        json!({ "failures": failures.into_iter().take(20).collect::<Vec<_>>() }),
    )
}
