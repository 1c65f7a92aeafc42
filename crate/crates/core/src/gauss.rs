//! Oriented Gauss words, canonical forms of arrow diagrams, and formal sums.
//!
//! A token `O<n>±` is the tail (over-passage) of arrow `n`, `U<n>±` its head
//! (under-passage). Both endpoints of an arrow carry the arrow's sign.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("letter {0} must occur exactly twice, once as tail and once as head")]
    LetterCount(u32),
    #[error("the two occurrences of letter {0} carry different signs")]
    SignMismatch(u32),
    #[error("kind mismatch: {0}")]
    Kind(String),
    #[error("operation needs a nonempty word")]
    EmptyWord,
    #[error("letter {0} does not occur in the word")]
    UnknownLetter(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Tail,
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub letter: u32,
    pub role: Role,
    pub sign: Sign,
}

impl Token {
    pub fn new(letter: u32, role: Role, sign: Sign) -> Token {
        Token { letter, role, sign }
    }

    pub fn tail(letter: u32, sign: Sign) -> Token {
        Token::new(letter, Role::Tail, sign)
    }

    pub fn head(letter: u32, sign: Sign) -> Token {
        Token::new(letter, Role::Head, sign)
    }

    fn write(&self, with_sign: bool, out: &mut String) {
        out.push(if self.role == Role::Tail { 'O' } else { 'U' });
        out.push_str(&self.letter.to_string());
        if with_sign {
            out.push(self.sign.symbol());
        }
    }
}

/// Order: role (tail first), then letter, then sign (`+` first).
impl Ord for Token {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.role, self.letter, self.sign).cmp(&(other.role, other.letter, other.sign))
    }
}

impl PartialOrd for Token {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One arrow of a word: its letter, sign and the positions of both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chord {
    pub letter: u32,
    pub sign: Sign,
    pub tail: usize,
    pub head: usize,
}

impl Chord {
    pub fn low(&self) -> usize {
        self.tail.min(self.head)
    }

    pub fn high(&self) -> usize {
        self.tail.max(self.head)
    }

    /// Exactly one endpoint of `other` lies strictly between the endpoints of `self`.
    pub fn interlaces(&self, other: &Chord) -> bool {
        let (a, b) = (self.low(), self.high());
        let inside = |p: usize| a < p && p < b;
        inside(other.tail) != inside(other.head)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussWord {
    tokens: Vec<Token>,
    based: bool,
}

impl GaussWord {
    pub fn new(tokens: Vec<Token>, based: bool) -> Result<GaussWord, GaussError> {
        let mut seen: HashMap<u32, (Option<Sign>, Option<Sign>)> = HashMap::new();
        for t in &tokens {
            if t.letter == 0 {
                return Err(GaussError::MalformedToken(format!("letter 0 in {:?}", t)));
            }
            let slot = seen.entry(t.letter).or_insert((None, None));
            let place = if t.role == Role::Tail { &mut slot.0 } else { &mut slot.1 };
            if place.is_some() {
                return Err(GaussError::LetterCount(t.letter));
            }
            *place = Some(t.sign);
        }
        let mut letters: Vec<_> = seen.into_iter().collect();
        letters.sort_by_key(|(l, _)| *l);
        for (letter, (tail, head)) in letters {
            match (tail, head) {
                (Some(a), Some(b)) if a == b => {}
                (Some(_), Some(_)) => return Err(GaussError::SignMismatch(letter)),
                _ => return Err(GaussError::LetterCount(letter)),
            }
        }
        Ok(GaussWord { tokens, based })
    }

    pub fn empty() -> GaussWord {
        GaussWord { tokens: Vec::new(), based: true }
    }

    /// Callers guarantee the word invariants.
    pub(crate) fn from_valid(tokens: Vec<Token>, based: bool) -> GaussWord {
        debug_assert!(GaussWord::new(tokens.clone(), based).is_ok());
        GaussWord { tokens, based }
    }

    pub fn parse(text: &str) -> Result<GaussWord, GaussError> {
        let (body, based) = split_kind(text);
        let tokens = parse_tokens(body, true)?;
        GaussWord::new(tokens, based)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn is_based(&self) -> bool {
        self.based
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn arrow_count(&self) -> usize {
        self.tokens.len() / 2
    }

    pub fn with_based(&self, based: bool) -> GaussWord {
        GaussWord { tokens: self.tokens.clone(), based }
    }

    pub fn letters(&self) -> BTreeSet<u32> {
        self.tokens.iter().map(|t| t.letter).collect()
    }

    pub fn max_letter(&self) -> u32 {
        self.tokens.iter().map(|t| t.letter).max().unwrap_or(0)
    }

    /// Chords in order of their first endpoint.
    pub fn chords(&self) -> Vec<Chord> {
        let mut index: HashMap<u32, usize> = HashMap::new();
        let mut chords: Vec<Chord> = Vec::with_capacity(self.arrow_count());
        for (p, t) in self.tokens.iter().enumerate() {
            match index.get(&t.letter) {
                Some(&i) => {
                    let c = &mut chords[i];
                    if t.role == Role::Tail {
                        c.tail = p;
                    } else {
                        c.head = p;
                    }
                }
                None => {
                    index.insert(t.letter, chords.len());
                    chords.push(Chord { letter: t.letter, sign: t.sign, tail: p, head: p });
                }
            }
        }
        chords
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.based {
            out.push_str("cyclic:");
        }
        write_tokens(&self.tokens, true, &mut out);
        out
    }

    pub fn reverse(&self) -> GaussWord {
        let mut tokens = self.tokens.clone();
        tokens.reverse();
        GaussWord { tokens, based: self.based }
    }

    /// Token `p` of the result is token `p + k` (mod 2n) of `self`.
    pub fn rotate_base(&self, k: i64) -> Result<GaussWord, GaussError> {
        if self.tokens.is_empty() {
            return Err(GaussError::EmptyWord);
        }
        let len = self.tokens.len() as i64;
        let shift = k.rem_euclid(len) as usize;
        let mut tokens = self.tokens.clone();
        tokens.rotate_left(shift);
        Ok(GaussWord { tokens, based: self.based })
    }

    pub fn delete_arrows(&self, letters: &BTreeSet<u32>) -> Result<GaussWord, GaussError> {
        let present = self.letters();
        if let Some(&missing) = letters.iter().find(|l| !present.contains(l)) {
            return Err(GaussError::UnknownLetter(missing));
        }
        let tokens = self.tokens.iter().filter(|t| !letters.contains(&t.letter)).copied().collect();
        Ok(GaussWord { tokens, based: self.based })
    }

    /// Keeps only the named letters, preserving order.
    pub fn restrict(&self, letters: &BTreeSet<u32>) -> GaussWord {
        let tokens = self.tokens.iter().filter(|t| letters.contains(&t.letter)).copied().collect();
        GaussWord { tokens, based: self.based }
    }

    pub fn connected_sum(&self, other: &GaussWord) -> Result<GaussWord, GaussError> {
        if !self.based || !other.based {
            return Err(GaussError::Kind("connected sum needs two based words".into()));
        }
        let offset = self.max_letter();
        let mut tokens = self.tokens.clone();
        tokens.extend(other.tokens.iter().map(|t| Token { letter: t.letter + offset, ..*t }));
        Ok(GaussWord { tokens, based: true })
    }

    /// A single chord (or none) counts as connected.
    pub fn interlacement_connected(&self) -> bool {
        let chords = self.chords();
        if chords.len() <= 1 {
            return true;
        }
        let mut seen = vec![false; chords.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..chords.len() {
                if !seen[b] && chords[a].interlaces(&chords[b]) {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// True when the word has at least two arrows and one of them interlaces nothing.
    pub fn has_isolated_arrow(&self) -> bool {
        let chords = self.chords();
        if chords.len() < 2 {
            return false;
        }
        chords.iter().enumerate().any(|(a, ca)| {
            chords.iter().enumerate().all(|(b, cb)| a == b || !ca.interlaces(cb))
        })
    }

    pub fn is_realizable(&self) -> bool {
        crate::planarity::is_realizable(self)
    }

    pub fn sign_product(&self) -> i64 {
        self.chords().iter().map(|c| c.sign.value()).product()
    }

    /// Relabels letters 1..n by first occurrence.
    pub fn relabeled(&self) -> GaussWord {
        GaussWord { tokens: relabel(&self.tokens), based: self.based }
    }

    pub fn canonical_based(&self) -> Result<CanonicalDiagram, GaussError> {
        if !self.based {
            return Err(GaussError::Kind("canonical_based needs a based word".into()));
        }
        Ok(CanonicalDiagram::based_of(self, true))
    }

    pub fn canonical_cyclic(&self) -> CanonicalDiagram {
        CanonicalDiagram::cyclic_of(self, true)
    }

    /// Canonical form matching the word's own kind.
    pub fn canonical(&self, signed: bool) -> CanonicalDiagram {
        if self.based {
            CanonicalDiagram::based_of(self, signed)
        } else {
            CanonicalDiagram::cyclic_of(self, signed)
        }
    }
}

impl fmt::Display for GaussWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn split_kind(text: &str) -> (&str, bool) {
    let trimmed = text.trim();
    match trimmed.strip_prefix("cyclic:") {
        Some(rest) => (rest, false),
        None => (trimmed, true),
    }
}

/// `signed = false` accepts tokens without a sign mark; those get `+`.
fn parse_tokens(body: &str, signed: bool) -> Result<Vec<Token>, GaussError> {
    body.split_whitespace().map(|raw| parse_token(raw, signed)).collect()
}

fn parse_token(raw: &str, signed: bool) -> Result<Token, GaussError> {
    let bad = || GaussError::MalformedToken(raw.to_string());
    let mut chars = raw.chars();
    let role = match chars.next() {
        Some('O') => Role::Tail,
        Some('U') => Role::Head,
        _ => return Err(bad()),
    };
    let rest = chars.as_str();
    let (digits, sign) = match rest.chars().last() {
        Some('+') => (&rest[..rest.len() - 1], Some(Sign::Plus)),
        Some('-') => (&rest[..rest.len() - 1], Some(Sign::Minus)),
        _ => (rest, None),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let letter: u32 = digits.parse().map_err(|_| bad())?;
    if letter == 0 {
        return Err(bad());
    }
    let sign = match (sign, signed) {
        (Some(s), _) => s,
        (None, false) => Sign::Plus,
        (None, true) => return Err(bad()),
    };
    Ok(Token { letter, role, sign })
}

fn write_tokens(tokens: &[Token], with_sign: bool, out: &mut String) {
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        t.write(with_sign, out);
    }
}

fn relabel(tokens: &[Token]) -> Vec<Token> {
    let mut map: HashMap<u32, u32> = HashMap::new();
    tokens
        .iter()
        .map(|t| {
            let next = map.len() as u32 + 1;
            let letter = *map.entry(t.letter).or_insert(next);
            Token { letter, ..*t }
        })
        .collect()
}

fn strip_signs(tokens: &mut [Token]) {
    for t in tokens {
        t.sign = Sign::Plus;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Based,
    Cyclic,
}

/// Canonical representative of an arrow diagram. Unsigned diagrams store `+`
/// on every token and print without sign marks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalDiagram {
    kind: Kind,
    signed: bool,
    tokens: Vec<Token>,
}

impl CanonicalDiagram {
    fn based_of(word: &GaussWord, signed: bool) -> CanonicalDiagram {
        let mut tokens = relabel(&word.tokens);
        if !signed {
            strip_signs(&mut tokens);
        }
        CanonicalDiagram { kind: Kind::Based, signed, tokens }
    }

    fn cyclic_of(word: &GaussWord, signed: bool) -> CanonicalDiagram {
        let mut source = word.tokens.clone();
        if !signed {
            strip_signs(&mut source);
        }
        let mut best: Option<Vec<Token>> = None;
        for shift in 0..source.len().max(1) {
            let mut rotated = source.clone();
            if !rotated.is_empty() {
                rotated.rotate_left(shift);
            }
            let candidate = relabel(&rotated);
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        }
        CanonicalDiagram { kind: Kind::Cyclic, signed, tokens: best.unwrap_or_default() }
    }

    /// Parses diagram text: signed when every token carries a sign, unsigned
    /// when none does. The result is canonicalized.
    pub fn parse(text: &str) -> Result<CanonicalDiagram, GaussError> {
        let (body, based) = split_kind(text);
        let raw: Vec<&str> = body.split_whitespace().collect();
        let with_sign = raw.iter().filter(|r| r.ends_with('+') || r.ends_with('-')).count();
        let signed = with_sign == raw.len();
        if !signed && with_sign != 0 {
            return Err(GaussError::MalformedToken(format!("mixed signed and unsigned tokens in `{}`", text.trim())));
        }
        let tokens = parse_tokens(body, signed)?;
        let word = GaussWord::new(tokens, based)?;
        Ok(word.canonical(signed))
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_based(&self) -> bool {
        self.kind == Kind::Based
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn arrow_count(&self) -> usize {
        self.tokens.len() / 2
    }

    /// The diagram as a word (unsigned diagrams carry `+` everywhere).
    pub fn word(&self) -> GaussWord {
        GaussWord::from_valid(self.tokens.clone(), self.kind == Kind::Based)
    }

    pub fn sign_product(&self) -> i64 {
        self.tokens.iter().filter(|t| t.role == Role::Tail).map(|t| t.sign.value()).product()
    }

    pub fn unsigned(&self) -> CanonicalDiagram {
        if !self.signed {
            return self.clone();
        }
        let mut tokens = self.tokens.clone();
        strip_signs(&mut tokens);
        match self.kind {
            Kind::Based => CanonicalDiagram { kind: Kind::Based, signed: false, tokens },
            Kind::Cyclic => CanonicalDiagram::cyclic_of(&GaussWord::from_valid(tokens, false), false),
        }
    }

    /// Signs in order of letters 1..n.
    pub fn signs(&self) -> Vec<Sign> {
        let mut signs = vec![Sign::Plus; self.arrow_count()];
        for t in &self.tokens {
            if t.role == Role::Tail {
                signs[t.letter as usize - 1] = t.sign;
            }
        }
        signs
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        if self.kind == Kind::Cyclic {
            out.push_str("cyclic:");
        }
        write_tokens(&self.tokens, self.signed, &mut out);
        out
    }

    pub fn interlacement_connected(&self) -> bool {
        self.word().interlacement_connected()
    }

    pub fn has_isolated_arrow(&self) -> bool {
        self.word().has_isolated_arrow()
    }

    /// Distinct based diagrams obtained by cutting this cyclic diagram at each gap.
    pub fn base_placements(&self) -> Vec<CanonicalDiagram> {
        let word = GaussWord::from_valid(self.tokens.clone(), true);
        let mut out: Vec<CanonicalDiagram> = Vec::new();
        for k in 0..self.tokens.len().max(1) {
            let rotated = if self.tokens.is_empty() { word.clone() } else { word.rotate_base(k as i64).unwrap() };
            let c = CanonicalDiagram::based_of(&rotated, self.signed);
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out.sort();
        out
    }
}

/// Order: arrow count, then the sign-free token sequence, then the signs.
impl Ord for CanonicalDiagram {
    fn cmp(&self, other: &Self) -> Ordering {
        let shape = |c: &CanonicalDiagram| -> Vec<(Role, u32)> { c.tokens.iter().map(|t| (t.role, t.letter)).collect() };
        (self.kind, self.signed)
            .cmp(&(other.kind, other.signed))
            .then(self.arrow_count().cmp(&other.arrow_count()))
            .then_with(|| shape(self).cmp(&shape(other)))
            .then_with(|| self.signs().cmp(&other.signs()))
    }
}

impl PartialOrd for CanonicalDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Integer combination of canonical diagrams sharing one kind and signedness.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FormalSum {
    terms: BTreeMap<CanonicalDiagram, i64>,
}

impl FormalSum {
    pub fn new() -> FormalSum {
        FormalSum::default()
    }

    pub fn single(d: CanonicalDiagram, coeff: i64) -> FormalSum {
        let mut s = FormalSum::new();
        s.add_term(d, coeff).expect("single term is always compatible");
        s
    }

    pub fn add_term(&mut self, d: CanonicalDiagram, coeff: i64) -> Result<(), GaussError> {
        if let Some(first) = self.terms.keys().next() {
            if first.kind != d.kind || first.signed != d.signed {
                return Err(GaussError::Kind(format!("cannot mix {} with {}", first, d)));
            }
        }
        if coeff == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(d.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&d);
        }
        Ok(())
    }

    pub fn add(&mut self, other: &FormalSum) -> Result<(), GaussError> {
        for (d, &c) in &other.terms {
            self.add_term(d.clone(), c)?;
        }
        Ok(())
    }

    pub fn scaled(&self, k: i64) -> FormalSum {
        if k == 0 {
            return FormalSum::new();
        }
        FormalSum { terms: self.terms.iter().map(|(d, &c)| (d.clone(), c * k)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalDiagram, i64)> {
        self.terms.iter().map(|(d, &c)| (d, c))
    }

    pub fn coefficient(&self, d: &CanonicalDiagram) -> i64 {
        self.terms.get(d).copied().unwrap_or(0)
    }

    pub fn filter(&self, keep: impl Fn(&CanonicalDiagram) -> bool) -> FormalSum {
        FormalSum { terms: self.terms.iter().filter(|(d, _)| keep(d)).map(|(d, &c)| (d.clone(), c)).collect() }
    }

    /// Applies a word map to every term, recanonicalizing.
    pub fn map_words(&self, f: impl Fn(&GaussWord) -> GaussWord) -> FormalSum {
        let mut out = FormalSum::new();
        for (d, c) in self.iter() {
            let w = f(&d.word());
            out.add_term(w.canonical(d.signed), c).expect("map preserves kind");
        }
        out
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (d, c)) in self.iter().enumerate() {
            let sep = match (i, c < 0) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{}[[{}]]", sep, d)?;
            } else {
                write!(f, "{}{}[[{}]]", sep, mag, d)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GaussWord {
        GaussWord::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let t = w("O1+ U2+ O3+ U1+ O2+ U3+");
        assert_eq!(t.len(), 6);
        assert_eq!(t.letters().into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(t.tokens().iter().all(|t| t.sign == Sign::Plus));
        assert!(GaussWord::parse("O1+ U1+").is_ok());
        assert_eq!(GaussWord::parse("O1+ O1+"), Err(GaussError::LetterCount(1)));
        assert_eq!(GaussWord::parse("O1+ U1-"), Err(GaussError::SignMismatch(1)));
        assert!(matches!(GaussWord::parse("X1+ U1+"), Err(GaussError::MalformedToken(_))));
        assert!(matches!(GaussWord::parse("O1 U1"), Err(GaussError::MalformedToken(_))));
        assert!(matches!(GaussWord::parse("O0+ U0+"), Err(GaussError::MalformedToken(_))));
        assert_eq!(GaussWord::parse("O1+"), Err(GaussError::LetterCount(1)));
    }

    #[test]
    fn serialize_round_trip() {
        assert_eq!(GaussWord::empty().to_text(), "");
        assert_eq!(w("O1+ U2- U1+ O2-").to_text(), "O1+ U2- U1+ O2-");
        let c = w("cyclic:O1+ U1+");
        assert!(!c.is_based());
        assert_eq!(c.to_text(), "cyclic:O1+ U1+");
        assert_eq!(GaussWord::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(w("O5- O2+ U5- U2+").canonical_based().unwrap().text(), "O1- O2+ U1- U2+");
        assert_eq!(w("O1+ U1+").canonical_based().unwrap().text(), "O1+ U1+");
        assert_eq!(w("U1+ O2+ O1+ U2+").canonical_cyclic().text(), "cyclic:O1+ O2+ U1+ U2+");
        assert_eq!(w("O1+ U1+").canonical_cyclic(), w("U1+ O1+").canonical_cyclic());
        assert!(w("cyclic:O1+ U1+").canonical_based().is_err());
    }

    #[test]
    fn surgery_examples() {
        assert_eq!(w("O1+ U2+ U1+ O2+").reverse().to_text(), "O2+ U1+ U2+ O1+");
        assert_eq!(GaussWord::empty().reverse(), GaussWord::empty());
        assert_eq!(w("O1+ U1+").rotate_base(1).unwrap().to_text(), "U1+ O1+");
        assert_eq!(GaussWord::empty().rotate_base(1), Err(GaussError::EmptyWord));
        let t = w("O1+ U2+ O3+ U1+ O2+ U3+");
        assert_eq!(t.rotate_base(6).unwrap(), t);
        assert_eq!(t.rotate_base(2).unwrap().rotate_base(3).unwrap(), t.rotate_base(5).unwrap());
        assert_eq!(t.rotate_base(-1).unwrap(), t.rotate_base(5).unwrap());
        let del = t.delete_arrows(&[2].into_iter().collect()).unwrap();
        assert_eq!(del.to_text(), "O1+ O3+ U1+ U3+");
        assert!(t.delete_arrows(&t.letters()).unwrap().is_empty());
        assert_eq!(t.delete_arrows(&BTreeSet::new()).unwrap(), t);
        assert_eq!(t.delete_arrows(&[7].into_iter().collect()), Err(GaussError::UnknownLetter(7)));
        let g = t.connected_sum(&t).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g.letters().len(), 6);
        assert_eq!(t.connected_sum(&GaussWord::empty()).unwrap(), t);
        assert!(t.connected_sum(&t.with_based(false)).is_err());
    }

    #[test]
    fn interlacement_examples() {
        let a = w("O1+ O2+ U1+ U2+");
        assert!(a.interlacement_connected() && !a.has_isolated_arrow());
        let b = w("O1+ U1+ O2+ U2+");
        assert!(!b.interlacement_connected() && b.has_isolated_arrow());
        let c = w("O1+ O2+ U2+ U1+");
        assert!(!c.interlacement_connected() && c.has_isolated_arrow());
        assert!(w("O1+ U1+").interlacement_connected());
    }

    #[test]
    fn unsigned_parse_and_text() {
        let d = CanonicalDiagram::parse("O1 O2 U1 U2").unwrap();
        assert!(!d.is_signed());
        assert_eq!(d.text(), "O1 O2 U1 U2");
        assert!(CanonicalDiagram::parse("O1+ O2 U1 U2").is_err());
        let s = CanonicalDiagram::parse("O3- O1+ U3- U1+").unwrap();
        assert_eq!(s.text(), "O1- O2+ U1- U2+");
        assert_eq!(s.unsigned(), d);
    }

    #[test]
    fn base_placements_of_triangles() {
        let both = CanonicalDiagram::parse("cyclic:O1 U2 O3 U1 O2 U3").unwrap();
        assert_eq!(both.base_placements().len(), 2);
        let six = CanonicalDiagram::parse("cyclic:O1 O2 O3 U1 U2 U3").unwrap();
        assert_eq!(six.base_placements().len(), 6);
    }

    #[test]
    fn formal_sum_cancels_and_rejects_mixing() {
        let d = CanonicalDiagram::parse("O1+ U1+").unwrap();
        let mut s = FormalSum::single(d.clone(), 2);
        s.add_term(d.clone(), -2).unwrap();
        assert!(s.is_zero());
        let u = CanonicalDiagram::parse("O1 U1").unwrap();
        s.add_term(d, 1).unwrap();
        assert!(s.add_term(u, 1).is_err());
    }
}
