//! Realizability of signed Gauss words as planar knot diagrams.
//!
//! The word determines a 4-valent graph (crossings, strand segments) and, through
//! each crossing's sign and over/under data, the cyclic order of the four
//! half-edges at that crossing. The diagram is planar exactly when this ribbon
//! graph has genus zero: with n crossings and 2n edges it must have n + 2 faces.

use crate::gauss::{GaussWord, Role, Sign};

/// Each chord interlaces an even number of chords.
pub fn satisfies_parity(word: &GaussWord) -> bool {
    let chords = word.chords();
    chords.iter().all(|a| chords.iter().filter(|b| a.interlaces(b)).count() % 2 == 0)
}

/// Number of faces of the ribbon graph of a nonempty word.
pub fn face_count(word: &GaussWord) -> usize {
    let len = word.len();
    if len == 0 {
        return 1;
    }
    // Darts: 2p = outgoing half-edge at passage p, 2p + 1 = incoming half-edge at passage p.
    let out = |p: usize| 2 * p;
    let inc = |p: usize| 2 * p + 1;
    let mut rotation = vec![usize::MAX; 2 * len];
    for c in word.chords() {
        let (o, u) = (c.tail, c.head);
        // Counterclockwise order around the crossing. A positive crossing has the
        // under-strand passing from right to left of the over-strand.
        let cycle = match c.sign {
            Sign::Plus => [out(o), out(u), inc(o), inc(u)],
            Sign::Minus => [out(o), inc(u), inc(o), out(u)],
        };
        for i in 0..4 {
            rotation[cycle[i]] = cycle[(i + 1) % 4];
        }
    }
    // Edge from passage p to passage p + 1 joins out(p) and inc(p + 1).
    let opposite = |d: usize| -> usize {
        let p = d / 2;
        if d.is_multiple_of(2) {
            inc((p + 1) % len)
        } else {
            out((p + len - 1) % len)
        }
    };
    let mut seen = vec![false; 2 * len];
    let mut faces = 0;
    for start in 0..2 * len {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = rotation[opposite(d)];
        }
    }
    faces
}

pub fn genus(word: &GaussWord) -> usize {
    let n = word.arrow_count();
    if n == 0 {
        return 0;
    }
    // V - E + F = 2 - 2g with V = n, E = 2n.
    (n + 2 - face_count(word)) / 2
}

pub fn is_realizable(word: &GaussWord) -> bool {
    if word.is_empty() {
        return true;
    }
    debug_assert!(word.tokens().iter().filter(|t| t.role == Role::Tail).count() == word.arrow_count());
    satisfies_parity(word) && face_count(word) == word.arrow_count() + 2
}
