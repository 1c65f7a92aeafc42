//! Reidemeister rewrites of based Gauss words from the minimal generating
//! set, seeded random walks and invariance fuzzing.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gauss::{GaussError, GaussWord, Role, Sign, Token};
use crate::pairing::{BasisCounter, GaussFormula};
use crate::relators::{Block, Flavor, Template};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("site {0} does not apply to this word")]
    StaleSite(String),
    #[error("classical walks need a realizable word, got {0}")]
    NotRealizable(String),
    #[error("no applicable move")]
    NoApplicableMove,
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    RiInsert { sign: Sign, tail_first: bool },
    RiDelete { sign: Sign, tail_first: bool },
    WiiInsert,
    WiiDelete,
    SiiiForward,
    SiiiBackward,
}

impl MoveKind {
    pub fn is_insertion(self) -> bool {
        matches!(self, MoveKind::RiInsert { .. } | MoveKind::WiiInsert)
    }

    /// Index of the move type: RI-insert, RI-delete, WII-insert, WII-delete,
    /// SIII-forward, SIII-backward.
    pub fn family(self) -> usize {
        match self {
            MoveKind::RiInsert { .. } => 0,
            MoveKind::RiDelete { .. } => 1,
            MoveKind::WiiInsert => 2,
            MoveKind::WiiDelete => 3,
            MoveKind::SiiiForward => 4,
            MoveKind::SiiiBackward => 5,
        }
    }

    pub fn inverse(self) -> MoveKind {
        match self {
            MoveKind::RiInsert { sign, tail_first } => MoveKind::RiDelete { sign, tail_first },
            MoveKind::RiDelete { sign, tail_first } => MoveKind::RiInsert { sign, tail_first },
            MoveKind::WiiInsert => MoveKind::WiiDelete,
            MoveKind::WiiDelete => MoveKind::WiiInsert,
            MoveKind::SiiiForward => MoveKind::SiiiBackward,
            MoveKind::SiiiBackward => MoveKind::SiiiForward,
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ri = |f: &mut fmt::Formatter<'_>, what: &str, sign: &Sign, tail_first: &bool| {
            let s = if *sign == Sign::Plus { '+' } else { '-' };
            write!(f, "RI-{}{}{}", what, s, if *tail_first { " tail-first" } else { " head-first" })
        };
        match self {
            MoveKind::RiInsert { sign, tail_first } => ri(f, "insert", sign, tail_first),
            MoveKind::RiDelete { sign, tail_first } => ri(f, "delete", sign, tail_first),
            MoveKind::WiiInsert => f.write_str("WII-insert"),
            MoveKind::WiiDelete => f.write_str("WII-delete"),
            MoveKind::SiiiForward => f.write_str("SIII-forward"),
            MoveKind::SiiiBackward => f.write_str("SIII-backward"),
        }
    }
}

/// One applicable rewrite. `positions[t]` is the start of the `t`-th block of
/// the matched side in reading order; for insertions it is the gap (a token
/// index in `0..=len`) receiving that block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoveSite {
    pub kind: MoveKind,
    pub rotation: usize,
    pub reversed: bool,
    pub positions: Vec<usize>,
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rot={}", self.kind, self.rotation)?;
        if self.reversed {
            f.write_str(" reversed")?;
        }
        write!(f, " at {:?}", self.positions)
    }
}

/// A block rewrite: each block of `from`, read in order, becomes the block of
/// `to` with the same index. Template letters index `signs`.
struct Rewrite {
    kind: MoveKind,
    signs: Vec<Sign>,
    from: Vec<Block>,
    to: Vec<Block>,
    rotations: usize,
    reversals: bool,
}

impl Rewrite {
    /// Blocks in reading order for one rotation and orientation.
    fn linear(blocks: &[Block], rotation: usize, reversed: bool) -> Vec<Block> {
        let m = blocks.len();
        let mut out: Vec<Block> = (0..m).map(|t| blocks[(rotation + t) % m].clone()).collect();
        if reversed {
            out.reverse();
            for b in &mut out {
                b.reverse();
            }
        }
        out
    }
}

fn rewrites() -> Vec<Rewrite> {
    let mut out = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        for tail_first in [true, false] {
            let block: Block = if tail_first {
                vec![(0, Role::Tail), (0, Role::Head)]
            } else {
                vec![(0, Role::Head), (0, Role::Tail)]
            };
            for insert in [true, false] {
                let (from, to) = if insert { (vec![vec![]], vec![block.clone()]) } else { (vec![block.clone()], vec![vec![]]) };
                let kind =
                    if insert { MoveKind::RiInsert { sign, tail_first } } else { MoveKind::RiDelete { sign, tail_first } };
                out.push(Rewrite { kind, signs: vec![sign], from, to, rotations: 1, reversals: false });
            }
        }
    }
    let wii = Template::wii();
    let full = wii.full_blocks(1).expect("weak RII has a full term").to_vec();
    let empty = vec![Vec::new(); full.len()];
    let rotations = full.len();
    out.push(Rewrite {
        kind: MoveKind::WiiInsert,
        signs: wii.signs().to_vec(),
        from: empty.clone(),
        to: full.clone(),
        rotations,
        reversals: false,
    });
    out.push(Rewrite {
        kind: MoveKind::WiiDelete,
        signs: wii.signs().to_vec(),
        from: full,
        to: empty,
        rotations,
        reversals: false,
    });
    let siii = Template::siii();
    let plus = siii.full_blocks(1).expect("strong RIII has a positive full term").to_vec();
    let minus = siii.full_blocks(-1).expect("strong RIII has a negative full term").to_vec();
    for (kind, from, to) in
        [(MoveKind::SiiiForward, plus.clone(), minus.clone()), (MoveKind::SiiiBackward, minus, plus)]
    {
        let rotations = from.len();
        out.push(Rewrite { kind, signs: siii.signs().to_vec(), from, to, rotations, reversals: true });
    }
    out
}

/// Letter assignment for a matched side, indexed by template letter.
fn match_at(word: &[Token], signs: &[Sign], blocks: &[Block], start0: usize) -> Option<Vec<usize>> {
    let n = signs.len();
    let mut letter: Vec<Option<u32>> = vec![None; n];
    let mut starts: Vec<Option<usize>> = vec![None; blocks.len()];
    let place = |t: usize, start: usize, letter: &mut Vec<Option<u32>>| -> bool {
        let block = &blocks[t];
        if start + block.len() > word.len() {
            return false;
        }
        for (off, &(idx, role)) in block.iter().enumerate() {
            let tok = word[start + off];
            if tok.role != role || tok.sign != signs[idx] {
                return false;
            }
            match letter[idx] {
                Some(l) if l != tok.letter => return false,
                Some(_) => {}
                None => {
                    if letter.contains(&Some(tok.letter)) {
                        return false;
                    }
                    letter[idx] = Some(tok.letter);
                }
            }
        }
        true
    };
    if !place(0, start0, &mut letter) {
        return None;
    }
    starts[0] = Some(start0);
    loop {
        let mut progressed = false;
        for t in 0..blocks.len() {
            if starts[t].is_some() {
                continue;
            }
            let anchor = blocks[t].iter().enumerate().find_map(|(off, &(idx, role))| {
                let l = letter[idx]?;
                let pos = word.iter().position(|tok| tok.letter == l && tok.role == role)?;
                pos.checked_sub(off)
            });
            if let Some(start) = anchor {
                if !place(t, start, &mut letter) {
                    return None;
                }
                starts[t] = Some(start);
                progressed = true;
            }
        }
        if starts.iter().all(|s| s.is_some()) {
            break;
        }
        if !progressed {
            return None;
        }
    }
    let starts: Vec<usize> = starts.into_iter().map(|s| s.unwrap()).collect();
    for t in 1..blocks.len() {
        if starts[t] < starts[t - 1] + blocks[t - 1].len() {
            return None;
        }
    }
    letter.iter().all(|l| l.is_some()).then_some(starts)
}

fn matched_sites(word: &GaussWord, rw: &Rewrite, out: &mut Vec<MoveSite>) {
    let tokens = word.tokens();
    for reversed in [false, true] {
        if reversed && !rw.reversals {
            continue;
        }
        for rotation in 0..rw.rotations {
            let from = Rewrite::linear(&rw.from, rotation, reversed);
            for start in 0..tokens.len() {
                if let Some(positions) = match_at(tokens, &rw.signs, &from, start) {
                    out.push(MoveSite { kind: rw.kind, rotation, reversed, positions });
                }
            }
        }
    }
}

/// Number of nondecreasing gap sequences of length `m` over `0..=len`.
fn insertion_count(len: usize, m: usize) -> usize {
    // C(len + m, m)
    let mut c = 1usize;
    for i in 0..m {
        c = c * (len + 1 + i) / (i + 1);
    }
    c
}

/// The `index`-th nondecreasing gap sequence in lexicographic order.
fn nth_gaps(len: usize, m: usize, mut index: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    let mut low = 0;
    for t in 0..m {
        let mut g = low;
        loop {
            let rest = insertion_count(len - g, m - t - 1);
            if index < rest {
                break;
            }
            index -= rest;
            g += 1;
        }
        out.push(g);
        low = g;
    }
    out
}

/// All sites ignoring realizability: insertion families are counted, matched
/// sites are listed.
struct SiteSpace {
    rules: Vec<Rewrite>,
    /// (rule, rotation, count) per insertion family.
    families: Vec<(usize, usize, usize)>,
    matched: Vec<MoveSite>,
}

impl SiteSpace {
    fn new(rules: Vec<Rewrite>, word: &GaussWord) -> SiteSpace {
        let mut families = Vec::new();
        let mut matched = Vec::new();
        for (r, rw) in rules.iter().enumerate() {
            if rw.kind.is_insertion() {
                for rotation in 0..rw.rotations {
                    families.push((r, rotation, insertion_count(word.len(), rw.from.len())));
                }
            } else {
                matched_sites(word, rw, &mut matched);
            }
        }
        SiteSpace { rules, families, matched }
    }

    fn len(&self) -> usize {
        self.families.iter().map(|f| f.2).sum::<usize>() + self.matched.len()
    }

    fn get(&self, word: &GaussWord, mut index: usize) -> MoveSite {
        for &(r, rotation, count) in &self.families {
            if index < count {
                let rw = &self.rules[r];
                return MoveSite {
                    kind: rw.kind,
                    rotation,
                    reversed: false,
                    positions: nth_gaps(word.len(), rw.from.len(), index),
                };
            }
            index -= count;
        }
        self.matched[index].clone()
    }

    /// Per move type, the (offset, count) runs of its indices.
    fn runs(&self) -> [Vec<(usize, usize)>; FAMILIES] {
        let mut runs: [Vec<(usize, usize)>; FAMILIES] = Default::default();
        let mut offset = 0;
        for &(r, _, count) in &self.families {
            runs[self.rules[r].kind.family()].push((offset, count));
            offset += count;
        }
        for site in &self.matched {
            runs[site.kind.family()].push((offset, 1));
            offset += 1;
        }
        runs
    }

    fn all(&self, word: &GaussWord) -> Vec<MoveSite> {
        (0..self.len()).map(|i| self.get(word, i)).collect()
    }
}

fn rule_for(kind: MoveKind, rules: &[Rewrite]) -> &Rewrite {
    rules.iter().find(|r| r.kind == kind).expect("every kind has a rule")
}

fn rewrite(word: &GaussWord, rw: &Rewrite, site: &MoveSite) -> Result<GaussWord, MoveError> {
    let stale = || MoveError::StaleSite(site.to_string());
    if site.rotation >= rw.rotations || (site.reversed && !rw.reversals) || site.positions.len() != rw.from.len() {
        return Err(stale());
    }
    let tokens = word.tokens();
    let from = Rewrite::linear(&rw.from, site.rotation, site.reversed);
    let to = Rewrite::linear(&rw.to, site.rotation, site.reversed);
    let mut letter: Vec<Option<u32>> = vec![None; rw.signs.len()];
    if rw.kind.is_insertion() {
        if site.positions.windows(2).any(|w| w[0] > w[1]) || site.positions.iter().any(|&g| g > tokens.len()) {
            return Err(stale());
        }
    } else {
        let starts = match_at(tokens, &rw.signs, &from, site.positions[0]).ok_or_else(stale)?;
        if starts != site.positions {
            return Err(stale());
        }
        for (t, block) in from.iter().enumerate() {
            for (off, &(idx, _)) in block.iter().enumerate() {
                letter[idx] = Some(tokens[site.positions[t] + off].letter);
            }
        }
    }
    let mut fresh = word.max_letter();
    for l in letter.iter_mut().filter(|l| l.is_none()) {
        fresh += 1;
        *l = Some(fresh);
    }
    let emit = |block: &Block, out: &mut Vec<Token>| {
        for &(idx, role) in block {
            out.push(Token::new(letter[idx].unwrap(), role, rw.signs[idx]));
        }
    };
    let mut out = Vec::with_capacity(tokens.len() + 6);
    let mut t = 0;
    let mut p = 0;
    while p <= tokens.len() {
        if t < from.len() && site.positions[t] == p {
            emit(&to[t], &mut out);
            p += from[t].len();
            t += 1;
            continue;
        }
        if p < tokens.len() {
            out.push(tokens[p]);
        }
        p += 1;
    }
    Ok(GaussWord::new(out, true)?.relabeled())
}

/// Every site for the flavor; classical sites must keep the word realizable.
pub fn applicable_moves(word: &GaussWord, flavor: Flavor) -> Vec<MoveSite> {
    let space = SiteSpace::new(rewrites(), word);
    let all = space.all(word);
    match flavor {
        Flavor::Virtual => all,
        Flavor::Classical => all
            .into_iter()
            .filter(|s| rewrite(word, rule_for(s.kind, &space.rules), s).is_ok_and(|w| w.is_realizable()))
            .collect(),
    }
}

/// The rewritten word, letters renumbered by first occurrence.
pub fn apply_move(word: &GaussWord, site: &MoveSite) -> Result<GaussWord, MoveError> {
    if !word.is_based() {
        return Err(GaussError::Kind("moves act on based words".into()).into());
    }
    let rules = rewrites();
    rewrite(word, rule_for(site.kind, &rules), site)
}

/// Rejection rounds before a classical step falls back to listing every site.
const REJECTION_LIMIT: usize = 256;

const FAMILIES: usize = 6;

/// Uniform over the move types with a site, then uniform within the type.
/// Insertion sites grow quadratically with the word and would otherwise
/// crowd out the few matched SIII sites.
fn pick(runs: &[Vec<(usize, usize)>], rng: &mut ChaCha8Rng) -> Option<usize> {
    let live: Vec<&Vec<(usize, usize)>> = runs.iter().filter(|r| r.iter().any(|&(_, c)| c > 0)).collect();
    if live.is_empty() {
        return None;
    }
    let run = live[rng.gen_range(0..live.len())];
    let mut k = rng.gen_range(0..run.iter().map(|&(_, c)| c).sum::<usize>());
    for &(offset, count) in run {
        if k < count {
            return Some(offset + k);
        }
        k -= count;
    }
    unreachable!("k is below the run total")
}

fn step(word: &GaussWord, flavor: Flavor, rng: &mut ChaCha8Rng) -> Result<(GaussWord, MoveSite), MoveError> {
    let space = SiteSpace::new(rewrites(), word);
    let runs = space.runs();
    // Classical steps reject unrealizable results, so types are weighted
    // equally before the filter.
    for _ in 0..REJECTION_LIMIT {
        let index = pick(&runs, rng).ok_or(MoveError::NoApplicableMove)?;
        let site = space.get(word, index);
        let next = rewrite(word, rule_for(site.kind, &space.rules), &site)?;
        if flavor == Flavor::Virtual || next.is_realizable() {
            return Ok((next, site));
        }
    }
    let valid = applicable_moves(word, flavor);
    let mut runs: [Vec<(usize, usize)>; FAMILIES] = Default::default();
    for (i, site) in valid.iter().enumerate() {
        runs[site.kind.family()].push((i, 1));
    }
    let index = pick(&runs, rng).ok_or(MoveError::NoApplicableMove)?;
    let site = valid[index].clone();
    let next = apply_move(word, &site)?;
    Ok((next, site))
}

/// A walk of `steps` moves sampled as in `pick`; records every intermediate word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub words: Vec<GaussWord>,
    pub trace: Vec<MoveSite>,
}

impl Walk {
    pub fn last(&self) -> &GaussWord {
        self.words.last().expect("a walk holds its start word")
    }
}

pub fn random_walk(word: &GaussWord, steps: usize, rng: &mut ChaCha8Rng, flavor: Flavor) -> Result<Walk, MoveError> {
    if flavor == Flavor::Classical && !word.is_realizable() {
        return Err(MoveError::NotRealizable(word.to_text()));
    }
    let mut words = vec![word.relabeled()];
    let mut trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, site) = step(words.last().unwrap(), flavor, rng)?;
        words.push(next);
        trace.push(site);
    }
    Ok(Walk { words, trace })
}

/// Generator for trial `trial` under a root seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub seed_word: String,
    pub trace: Vec<String>,
    pub formula: String,
    pub before: i64,
    pub after: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub flavor: String,
    pub trials: usize,
    pub steps: usize,
    pub formulas: usize,
    /// First change of each formula along each trial.
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Number of trials with at least one violation.
    pub fn violating_trials(&self) -> usize {
        let mut t: Vec<usize> = self.violations.iter().map(|v| v.trial).collect();
        t.dedup();
        t.len()
    }
}

/// Evaluates many formulas from one pass of subset counting per word.
pub struct FormulaBank {
    counter: BasisCounter,
    /// Per formula: (counter index, coefficient).
    terms: Vec<Vec<(usize, i64)>>,
    labels: Vec<String>,
}

impl FormulaBank {
    pub fn new(formulas: &[GaussFormula]) -> Result<FormulaBank, GaussError> {
        let mut entries = Vec::new();
        let mut terms = Vec::new();
        for f in formulas {
            let mut t = Vec::new();
            for (d, c) in f.terms() {
                if c == 0 {
                    continue;
                }
                let i = match entries.iter().position(|e| e == d) {
                    Some(i) => i,
                    None => {
                        entries.push(d.clone());
                        entries.len() - 1
                    }
                };
                t.push((i, c));
            }
            terms.push(t);
        }
        Ok(FormulaBank { counter: BasisCounter::new(&entries)?, terms, labels: formulas.iter().map(|f| f.label().to_string()).collect() })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn values(&self, word: &GaussWord) -> Vec<i64> {
        let counts = self.counter.counts(word);
        self.terms.iter().map(|t| t.iter().map(|&(i, c)| c * counts[i]).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub flavor: Flavor,
    pub trials: usize,
    pub steps: usize,
    pub seed: u64,
}

/// Walks from `seeds[trial % seeds.len()]` and checks every formula at every step.
pub fn fuzz_invariance(
    formulas: &[GaussFormula],
    seeds: &[GaussWord],
    config: FuzzConfig,
) -> Result<FuzzReport, MoveError> {
    let bank = FormulaBank::new(formulas)?;
    let mut report = FuzzReport {
        flavor: config.flavor.to_string(),
        trials: config.trials,
        steps: config.steps,
        formulas: formulas.len(),
        violations: Vec::new(),
    };
    if seeds.is_empty() || config.trials == 0 {
        return Ok(report);
    }
    let per_trial: Vec<Result<Vec<Violation>, MoveError>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed_word = &seeds[trial % seeds.len()];
            let mut rng = trial_rng(config.seed, trial as u64);
            let walk = random_walk(seed_word, config.steps, &mut rng, config.flavor)?;
            let start = bank.values(&walk.words[0]);
            let mut open: Vec<bool> = vec![true; bank.len()];
            let mut found = Vec::new();
            for (s, w) in walk.words.iter().enumerate().skip(1) {
                let now = bank.values(w);
                for f in 0..bank.len() {
                    if open[f] && now[f] != start[f] {
                        open[f] = false;
                        found.push(Violation {
                            trial,
                            seed_word: seed_word.to_text(),
                            trace: walk.trace[..s].iter().map(|m| m.to_string()).collect(),
                            formula: bank.label(f).to_string(),
                            before: start[f],
                            after: now[f],
                        });
                    }
                }
            }
            Ok(found)
        })
        .collect();
    for r in per_trial {
        report.violations.extend(r?);
    }
    Ok(report)
}
