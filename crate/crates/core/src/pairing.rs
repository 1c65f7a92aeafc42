//! Signed subdiagram counts, Gauss diagram formulas and the dual evaluation on
//! formal sums.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{CanonicalDiagram, FormalSum, GaussError, GaussWord, Role, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error("basis has {basis} entries but {coefficients} coefficients")]
    LengthMismatch { basis: usize, coefficients: usize },
    #[error("basis entry {0} appears twice")]
    DuplicateEntry(String),
    #[error("invalid formula JSON: {0}")]
    Json(String),
}

/// Calls `f` with every increasing `k`-subset of `0..n`.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Largest arrow count handled by the packed subset keys.
const MAX_KEY_ARROWS: usize = 8;

/// Packed shape of a based diagram: per token, 3 bits of first-occurrence
/// letter index and 1 bit of role; plus the sign bits in letter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SubsetKey {
    arrows: u8,
    shape: u64,
    signs: u16,
}

fn diagram_key(d: &CanonicalDiagram) -> Option<SubsetKey> {
    let k = d.arrow_count();
    if k > MAX_KEY_ARROWS {
        return None;
    }
    let mut shape = 0u64;
    let mut signs = 0u16;
    for t in d.tokens() {
        let letter = (t.letter - 1) as u64;
        shape = (shape << 4) | (letter << 1) | (t.role == Role::Head) as u64;
        if t.role == Role::Tail && t.sign == Sign::Minus {
            signs |= 1 << (t.letter - 1);
        }
    }
    Some(SubsetKey { arrows: k as u8, shape, signs })
}

/// Per-word chord table used for fast subset keys.
struct ChordTable {
    /// (position, chord index, is head) for both endpoints of every chord.
    ends: Vec<[(usize, bool); 2]>,
    minus: Vec<bool>,
}

impl ChordTable {
    fn new(word: &GaussWord) -> ChordTable {
        let chords = word.chords();
        ChordTable {
            ends: chords.iter().map(|c| [(c.tail, false), (c.head, true)]).collect(),
            minus: chords.iter().map(|c| c.sign == Sign::Minus).collect(),
        }
    }

    fn len(&self) -> usize {
        self.ends.len()
    }

    fn interlaces(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = {
            let (p, q) = (self.ends[a][0].0, self.ends[a][1].0);
            (p.min(q), p.max(q))
        };
        let inside = |p: usize| lo < p && p < hi;
        inside(self.ends[b][0].0) != inside(self.ends[b][1].0)
    }

    /// Calls `f` on every subset of size `k` whose interlacement graph is
    /// connected; sizes above 3 fall back to every subset.
    fn for_each_connected(&self, k: usize, mut f: impl FnMut(&[usize])) {
        let n = self.len();
        if k <= 1 || k > 3 {
            return for_each_combination(n, k, f);
        }
        let adj: Vec<Vec<usize>> =
            (0..n).map(|a| (0..n).filter(|&b| b != a && self.interlaces(a, b)).collect()).collect();
        if k == 2 {
            for (a, nb) in adj.iter().enumerate() {
                for &b in nb.iter().filter(|&&b| b > a) {
                    f(&[a, b]);
                }
            }
            return;
        }
        // A connected triple is a path with a unique middle, or a triangle
        // taken once from its least member.
        for (c, nb) in adj.iter().enumerate() {
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !adj[a].contains(&b) || (c < a && c < b) {
                        f(&[c, a, b]);
                    }
                }
            }
        }
    }

    /// Key of the sub-word on `subset` plus the product of its signs.
    fn key(&self, subset: &[usize]) -> (SubsetKey, i64) {
        let mut buf = [(0usize, 0usize, false); 2 * MAX_KEY_ARROWS];
        let mut m = 0;
        for (ci, &c) in subset.iter().enumerate() {
            for &(pos, head) in &self.ends[c] {
                buf[m] = (pos, ci, head);
                m += 1;
            }
        }
        let ends = &mut buf[..m];
        ends.sort_unstable_by_key(|e| e.0);
        let mut label = [u8::MAX; MAX_KEY_ARROWS];
        let mut next = 0u8;
        let mut shape = 0u64;
        let mut signs = 0u16;
        let mut product = 1i64;
        for &(_, ci, head) in ends.iter() {
            if label[ci] == u8::MAX {
                label[ci] = next;
                if self.minus[subset[ci]] {
                    signs |= 1 << next;
                    product = -product;
                }
                next += 1;
            }
            shape = (shape << 4) | ((label[ci] as u64) << 1) | head as u64;
        }
        (SubsetKey { arrows: subset.len() as u8, shape, signs }, product)
    }
}

/// Kind check shared by count and pairing.
fn check_kinds(pattern: &CanonicalDiagram, target: &GaussWord) -> Result<(), GaussError> {
    if pattern.is_based() != target.is_based() {
        return Err(GaussError::Kind(format!(
            "pattern {} is {} but target is {}",
            pattern,
            if pattern.is_based() { "based" } else { "cyclic" },
            if target.is_based() { "based" } else { "cyclic" }
        )));
    }
    Ok(())
}

/// Signed number of arrow subsets of `target` whose induced diagram is `pattern`.
pub fn count_occurrences(pattern: &CanonicalDiagram, target: &GaussWord) -> Result<i64, GaussError> {
    check_kinds(pattern, target)?;
    let k = pattern.arrow_count();
    let table = ChordTable::new(target);
    if k > table.len() {
        return Ok(0);
    }
    let mut total = 0i64;
    match diagram_key(pattern).filter(|_| pattern.is_based()) {
        Some(want) => {
            for_each_combination(table.len(), k, |subset| {
                let (key, product) = table.key(subset);
                if key.shape == want.shape && (!pattern.is_signed() || key.signs == want.signs) {
                    total += product;
                }
            });
        }
        None => {
            let chords = target.chords();
            for_each_combination(chords.len(), k, |subset| {
                let letters: BTreeSet<u32> = subset.iter().map(|&i| chords[i].letter).collect();
                let sub = target.restrict(&letters);
                if sub.canonical(pattern.is_signed()) == *pattern {
                    total += sub.sign_product();
                }
            });
        }
    }
    Ok(total)
}

/// Dual evaluation of a single basis element on a signed diagram.
pub fn tilde_eval(basis_elem: &CanonicalDiagram, z: &CanonicalDiagram) -> Result<i64, GaussError> {
    if !z.is_signed() {
        return Err(GaussError::Kind(format!("{} must be signed", z)));
    }
    if basis_elem.kind() != z.kind() {
        return Err(GaussError::Kind(format!("{} and {} differ in kind", basis_elem, z)));
    }
    let matches = if basis_elem.is_signed() { basis_elem == z } else { *basis_elem == z.unsigned() };
    Ok(if matches { z.sign_product() } else { 0 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussFormula {
    label: String,
    basis: Vec<CanonicalDiagram>,
    coefficients: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct FormulaJson {
    basis: Vec<String>,
    coefficients: Vec<i64>,
    label: String,
}

impl GaussFormula {
    pub fn new(label: impl Into<String>, basis: Vec<CanonicalDiagram>, coefficients: Vec<i64>) -> Result<GaussFormula, FormulaError> {
        if basis.len() != coefficients.len() {
            return Err(FormulaError::LengthMismatch { basis: basis.len(), coefficients: coefficients.len() });
        }
        let mut seen = BTreeSet::new();
        for d in &basis {
            if !seen.insert(d.clone()) {
                return Err(FormulaError::DuplicateEntry(d.text()));
            }
        }
        Ok(GaussFormula { label: label.into(), basis, coefficients })
    }

    /// Keeps only the nonzero coefficients.
    pub fn sparse(label: impl Into<String>, basis: &[CanonicalDiagram], coefficients: &[i64]) -> GaussFormula {
        let (b, c): (Vec<_>, Vec<_>) = basis.iter().cloned().zip(coefficients.iter().copied()).filter(|(_, c)| *c != 0).unzip();
        GaussFormula::new(label, b, c).expect("entries of a basis are distinct")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn basis(&self) -> &[CanonicalDiagram] {
        &self.basis
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn with_label(mut self, label: impl Into<String>) -> GaussFormula {
        self.label = label.into();
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalDiagram, i64)> {
        self.basis.iter().zip(self.coefficients.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }

    /// Every diagram with a nonzero coefficient is interlacement-connected.
    pub fn has_connected_support(&self) -> bool {
        self.terms().filter(|(_, c)| *c != 0).all(|(d, _)| d.interlacement_connected())
    }

    /// Coefficient vector over `basis`; `None` when some support entry is missing.
    pub fn coordinates(&self, basis: &[CanonicalDiagram]) -> Option<Vec<i64>> {
        let index: HashMap<&CanonicalDiagram, usize> = basis.iter().enumerate().map(|(i, d)| (d, i)).collect();
        let mut out = vec![0i64; basis.len()];
        for (d, c) in self.terms() {
            if c == 0 {
                continue;
            }
            out[*index.get(d)?] += c;
        }
        Some(out)
    }

    /// Replaces each cyclic entry by the sum of its distinct based placements.
    pub fn sum_base_placements(&self) -> GaussFormula {
        let mut acc: Vec<(CanonicalDiagram, i64)> = Vec::new();
        let mut push = |d: CanonicalDiagram, c: i64| match acc.iter_mut().find(|(e, _)| *e == d) {
            Some(slot) => slot.1 += c,
            None => acc.push((d, c)),
        };
        for (d, c) in self.terms() {
            if d.is_based() {
                push(d.clone(), c);
            } else {
                for b in d.base_placements() {
                    push(b, c);
                }
            }
        }
        let (basis, coefficients) = acc.into_iter().unzip();
        GaussFormula { label: self.label.clone(), basis, coefficients }
    }

    pub fn evaluate(&self, target: &GaussWord) -> Result<i64, GaussError> {
        evaluate_formula(self, target)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = FormulaJson {
            basis: self.basis.iter().map(|d| d.text()).collect(),
            coefficients: self.coefficients.clone(),
            label: self.label.clone(),
        };
        serde_json::to_value(j).expect("formula serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<GaussFormula, FormulaError> {
        let j: FormulaJson = serde_json::from_value(value.clone()).map_err(|e| FormulaError::Json(e.to_string()))?;
        let basis = j.basis.iter().map(|t| CanonicalDiagram::parse(t)).collect::<Result<Vec<_>, _>>()?;
        GaussFormula::new(j.label, basis, j.coefficients)
    }
}

pub fn evaluate_formula(f: &GaussFormula, target: &GaussWord) -> Result<i64, GaussError> {
    let mut total = 0;
    for (d, c) in f.terms() {
        if c != 0 {
            total += c * count_occurrences(d, target)?;
        } else {
            check_kinds(d, target)?;
        }
    }
    Ok(total)
}

pub fn tilde_eval_sum(f: &GaussFormula, s: &FormalSum) -> Result<i64, GaussError> {
    let mut total = 0;
    for (z, zc) in s.iter() {
        for (x, c) in f.terms() {
            total += zc * c * tilde_eval(x, z)?;
        }
    }
    Ok(total)
}

/// Counts every entry of a fixed list of based diagrams in one pass over the
/// arrow subsets of a word.
#[derive(Debug, Clone)]
pub struct BasisCounter {
    len: usize,
    arrow_counts: Vec<usize>,
    /// Every entry is interlacement connected, so other subsets never match.
    connected: bool,
    signed: HashMap<(u8, u64, u16), Vec<usize>>,
    unsigned: HashMap<(u8, u64), Vec<usize>>,
}

impl BasisCounter {
    pub fn new(entries: &[CanonicalDiagram]) -> Result<BasisCounter, GaussError> {
        let mut signed: HashMap<(u8, u64, u16), Vec<usize>> = HashMap::new();
        let mut unsigned: HashMap<(u8, u64), Vec<usize>> = HashMap::new();
        let mut arrow_counts = BTreeSet::new();
        for (i, d) in entries.iter().enumerate() {
            if !d.is_based() {
                return Err(GaussError::Kind(format!("counter entries must be based, got {}", d)));
            }
            let key = diagram_key(d).ok_or_else(|| GaussError::Kind(format!("{} has too many arrows", d)))?;
            arrow_counts.insert(d.arrow_count());
            if d.is_signed() {
                signed.entry((key.arrows, key.shape, key.signs)).or_default().push(i);
            } else {
                unsigned.entry((key.arrows, key.shape)).or_default().push(i);
            }
        }
        Ok(BasisCounter {
            len: entries.len(),
            arrow_counts: arrow_counts.into_iter().collect(),
            connected: entries.iter().all(|d| d.interlacement_connected()),
            signed,
            unsigned,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `count_occurrences` of every entry on a based word.
    pub fn counts(&self, word: &GaussWord) -> Vec<i64> {
        let table = ChordTable::new(word);
        let mut out = vec![0i64; self.len];
        for &k in &self.arrow_counts {
            if k == 0 {
                for idx in self.signed.get(&(0, 0, 0)).into_iter().chain(self.unsigned.get(&(0, 0))) {
                    for &i in idx {
                        out[i] += 1;
                    }
                }
                continue;
            }
            let visit = |subset: &[usize]| {
                let (key, product) = table.key(subset);
                if let Some(idx) = self.signed.get(&(key.arrows, key.shape, key.signs)) {
                    for &i in idx {
                        out[i] += product;
                    }
                }
                if let Some(idx) = self.unsigned.get(&(key.arrows, key.shape)) {
                    for &i in idx {
                        out[i] += product;
                    }
                }
            };
            if self.connected {
                table.for_each_connected(k, visit);
            } else {
                for_each_combination(table.len(), k, visit);
            }
        }
        out
    }

    /// Vector of `tilde_eval(entry_i, ·)` extended linearly over a signed based sum.
    pub fn tilde_vector(&self, s: &FormalSum) -> Vec<i64> {
        let mut out = vec![0i64; self.len];
        for (z, c) in s.iter() {
            let Some(key) = diagram_key(z) else { continue };
            let product = z.sign_product();
            if let Some(idx) = self.signed.get(&(key.arrows, key.shape, key.signs)) {
                for &i in idx {
                    out[i] += c * product;
                }
            }
            if let Some(idx) = self.unsigned.get(&(key.arrows, key.shape)) {
                for &i in idx {
                    out[i] += c * product;
                }
            }
        }
        out
    }
}

pub fn dot(coefficients: &[i64], counts: &[i64]) -> i64 {
    coefficients.iter().zip(counts).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> CanonicalDiagram {
        CanonicalDiagram::parse(s).unwrap()
    }

    fn w(s: &str) -> GaussWord {
        GaussWord::parse(s).unwrap()
    }

    const RIGHT: &str = "O1+ U2+ O3+ U1+ O2+ U3+";
    const LEFT: &str = "O1- U2- O3- U1- O2- U3-";

    #[test]
    fn combinations_cover_binomials() {
        for n in 0..7 {
            for k in 0..=n + 1 {
                let mut count = 0;
                let mut last: Option<Vec<usize>> = None;
                for_each_combination(n, k, |s| {
                    assert!(s.windows(2).all(|p| p[0] < p[1]));
                    if let Some(prev) = &last {
                        assert!(prev.as_slice() < s);
                    }
                    last = Some(s.to_vec());
                    count += 1;
                });
                let expected = if k > n { 0 } else { (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1)) };
                assert_eq!(count, expected, "n={} k={}", n, k);
            }
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_occurrences(&d("O1+ O2+ U1+ U2+"), &w(RIGHT)).unwrap(), 1);
        assert_eq!(count_occurrences(&d("O1- O2- U1- U2-"), &w(LEFT)).unwrap(), 1);
        assert_eq!(count_occurrences(&d("O1+ O2+ U2+ U1+"), &w(RIGHT)).unwrap(), 0);
        assert_eq!(count_occurrences(&d(""), &w(RIGHT)).unwrap(), 1);
        assert!(count_occurrences(&d("O1+ U1+"), &w("cyclic:O1+ U1+")).is_err());
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde_eval(&d("O1+ O2+ U1+ U2+"), &d("O1+ O2+ U1+ U2+")).unwrap(), 1);
        assert_eq!(tilde_eval(&d("O1+ O2+ U1+ U2+"), &d("O1+ O2- U1+ U2-")).unwrap(), 0);
        assert_eq!(tilde_eval(&d("O1 O2 U1 U2"), &d("O1+ O2- U1+ U2-")).unwrap(), -1);
        let f = GaussFormula::new("f", vec![d("O1+ O2- U1+ U2-")], vec![2]).unwrap();
        assert_eq!(tilde_eval_sum(&f, &FormalSum::new()).unwrap(), 0);
        assert_eq!(tilde_eval_sum(&f, &FormalSum::single(d("O1+ O2- U1+ U2-"), 3)).unwrap(), -6);
    }

    #[test]
    fn formula_json_round_trip() {
        let f = GaussFormula::new("x", vec![d("O1 O2 U1 U2"), d("O1+ U2- U1+ O2-")], vec![1, -3]).unwrap();
        let j = f.to_json();
        assert_eq!(j.to_string(), r#"{"basis":["O1 O2 U1 U2","O1+ U2- U1+ O2-"],"coefficients":[1,-3],"label":"x"}"#);
        assert_eq!(GaussFormula::from_json(&j).unwrap(), f);
        assert!(GaussFormula::new("y", vec![d("O1 U1"), d("O1 U1")], vec![1, 1]).is_err());
        assert!(GaussFormula::new("y", vec![d("O1 U1")], vec![1, 1]).is_err());
    }

    #[test]
    fn counter_agrees_with_single_counts() {
        let entries = vec![d("O1+ O2+ U1+ U2+"), d("O1 U2 O3 U1 O2 U3"), d("O1 O2 U1 U2"), d("")];
        let counter = BasisCounter::new(&entries).unwrap();
        for text in [RIGHT, LEFT, "O1+ O2- U1+ U2- O3+ U3+", ""] {
            let word = w(text);
            let counts = counter.counts(&word);
            for (e, c) in entries.iter().zip(&counts) {
                assert_eq!(*c, count_occurrences(e, &word).unwrap(), "{} on {}", e, text);
            }
        }
    }

    #[test]
    fn connected_fast_path_matches_full_enumeration() {
        use rand::SeedableRng;
        let basis = crate::enumeration::degree3_basis();
        let fast = BasisCounter::new(basis.entries()).unwrap();
        let mut with_split = basis.entries().to_vec();
        with_split.push(d("O1+ U1+ O2+ U2+"));
        let full = BasisCounter::new(&with_split).unwrap();
        assert!(fast.connected && !full.connected);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 0..9 {
            let word = crate::corpus::random_word(n, &mut rng);
            let a = fast.counts(&word);
            let b = full.counts(&word);
            assert_eq!(a[..], b[..a.len()], "{}", word);
            for (e, c) in basis.entries().iter().zip(&a).step_by(5) {
                assert_eq!(*c, count_occurrences(e, &word).unwrap(), "{} on {}", e, word);
            }
        }
    }
}
