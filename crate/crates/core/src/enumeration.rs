//! Arrow diagrams up to isomorphism and the fixed degree-3 basis.

use std::collections::{BTreeSet, HashMap};

use crate::gauss::{CanonicalDiagram, GaussWord, Kind, Role, Sign, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    All,
    Connected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramBasis {
    entries: Vec<CanonicalDiagram>,
    index: HashMap<CanonicalDiagram, usize>,
}

impl DiagramBasis {
    /// Sorts and deduplicates.
    pub fn from_entries(entries: impl IntoIterator<Item = CanonicalDiagram>) -> DiagramBasis {
        let set: BTreeSet<CanonicalDiagram> = entries.into_iter().collect();
        DiagramBasis::ordered(set.into_iter().collect())
    }

    /// Keeps the given order; entries must be distinct.
    pub fn ordered(entries: Vec<CanonicalDiagram>) -> DiagramBasis {
        let index: HashMap<CanonicalDiagram, usize> = entries.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        assert_eq!(index.len(), entries.len(), "basis entries must be distinct");
        DiagramBasis { entries, index }
    }

    pub fn entries(&self) -> &[CanonicalDiagram] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, d: &CanonicalDiagram) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn get(&self, i: usize) -> &CanonicalDiagram {
        &self.entries[i]
    }

    /// Indices of entries with the given arrow count.
    pub fn indices_with_arrows(&self, arrows: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.entries[i].arrow_count() == arrows).collect()
    }

    pub fn concat(&self, other: &DiagramBasis) -> DiagramBasis {
        DiagramBasis::ordered(self.entries.iter().chain(other.entries.iter()).cloned().collect())
    }
}

/// All perfect matchings of `0..2n` with an orientation, written as unsigned
/// based token sequences (letters by first occurrence).
fn oriented_matchings(n: usize) -> Vec<Vec<Token>> {
    fn rec(slots: &mut Vec<Option<(u32, Role)>>, next_letter: u32, out: &mut Vec<Vec<Token>>) {
        let Some(first) = slots.iter().position(|s| s.is_none()) else {
            out.push(slots.iter().map(|s| {
                let (letter, role) = s.unwrap();
                Token::new(letter, role, Sign::Plus)
            }).collect());
            return;
        };
        for second in first + 1..slots.len() {
            if slots[second].is_some() {
                continue;
            }
            for (a, b) in [(Role::Tail, Role::Head), (Role::Head, Role::Tail)] {
                slots[first] = Some((next_letter, a));
                slots[second] = Some((next_letter, b));
                rec(slots, next_letter + 1, out);
            }
            slots[second] = None;
            slots[first] = None;
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![None; 2 * n], 1, &mut out);
    out
}

fn with_signs(tokens: &[Token], mask: u32) -> Vec<Token> {
    tokens
        .iter()
        .map(|t| Token { sign: if mask >> (t.letter - 1) & 1 == 1 { Sign::Minus } else { Sign::Plus }, ..*t })
        .collect()
}

/// All isomorphism classes with exactly `n` arrows meeting the filters, in canonical order.
pub fn enumerate_diagrams(n: usize, connectivity: Connectivity, signed: bool, kind: Kind) -> DiagramBasis {
    let mut found: BTreeSet<CanonicalDiagram> = BTreeSet::new();
    let based = kind == Kind::Based;
    // Unsigned classes first; signed classes refine them.
    let mut shapes: BTreeSet<CanonicalDiagram> = BTreeSet::new();
    for tokens in oriented_matchings(n) {
        let word = GaussWord::from_valid(tokens, based);
        if connectivity == Connectivity::Connected && !word.interlacement_connected() {
            continue;
        }
        shapes.insert(word.canonical(false));
    }
    for shape in shapes {
        if !signed {
            found.insert(shape);
            continue;
        }
        for mask in 0..(1u32 << n) {
            let word = GaussWord::from_valid(with_signs(shape.tokens(), mask), based);
            found.insert(word.canonical(true));
        }
    }
    DiagramBasis::from_entries(found)
}

/// The 16 signed connected 2-arrow based diagrams followed by the 32 unsigned
/// connected 3-arrow based diagrams.
pub fn degree3_basis() -> DiagramBasis {
    let two = enumerate_diagrams(2, Connectivity::Connected, true, Kind::Based);
    let three = enumerate_diagrams(3, Connectivity::Connected, false, Kind::Based);
    two.concat(&three)
}

/// Sign-free chord pattern: the perfect matching of positions, orientation forgotten.
pub fn chord_pattern(d: &CanonicalDiagram) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = d.word().chords().iter().map(|c| (c.low(), c.high())).collect();
    out.sort();
    out
}
