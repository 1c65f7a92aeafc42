//! Built-in knot diagrams and the restriction of formulas to classical knots.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::gauss::{GaussError, GaussWord, Sign, Token};
use crate::pairing::GaussFormula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown knot {0:?}")]
    UnknownName(String),
    #[error("formula {label} does not restrict to a combination of v3 and v2: {reason}")]
    NotClassifiable { label: String, reason: String },
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotEntry {
    pub name: &'static str,
    pub word: GaussWord,
    /// (v3, v2), when known.
    pub expected: Option<(i64, i64)>,
}

pub const NAMES: [&str; 6] = ["unknot", "right_trefoil", "left_trefoil", "granny", "square", "virtual_trefoil"];

/// The realizable entries.
pub const CLASSICAL: [&str; 5] = ["unknot", "right_trefoil", "left_trefoil", "granny", "square"];

const RIGHT_TREFOIL: &str = "O1+ U2+ O3+ U1+ O2+ U3+";
const LEFT_TREFOIL: &str = "O1- U2- O3- U1- O2- U3-";

fn parse(text: &str) -> GaussWord {
    GaussWord::parse(text).expect("corpus words are well formed")
}

pub fn builtin(name: &str) -> Result<KnotEntry, CorpusError> {
    let right = parse(RIGHT_TREFOIL);
    let left = parse(LEFT_TREFOIL);
    let (name, word, expected) = match name {
        "unknot" => ("unknot", GaussWord::empty(), Some((0, 0))),
        "right_trefoil" => ("right_trefoil", right, Some((1, 1))),
        "left_trefoil" => ("left_trefoil", left, Some((-1, 1))),
        "granny" => ("granny", right.connected_sum(&right)?, Some((2, 2))),
        "square" => ("square", right.connected_sum(&left)?, Some((0, 2))),
        "virtual_trefoil" => ("virtual_trefoil", parse("O1+ O2+ U1+ U2+"), None),
        other => return Err(CorpusError::UnknownName(other.to_string())),
    };
    Ok(KnotEntry { name, word, expected })
}

pub fn classical_entries() -> Vec<KnotEntry> {
    CLASSICAL.iter().map(|n| builtin(n).expect("builtin name")).collect()
}

/// A builtin name or a Gauss code.
pub fn resolve(name_or_code: &str) -> Result<GaussWord, CorpusError> {
    match builtin(name_or_code) {
        Ok(e) => Ok(e.word),
        Err(CorpusError::UnknownName(_)) => Ok(GaussWord::parse(name_or_code)?),
        Err(e) => Err(e),
    }
}

/// (λ, μ) with f = λ·v3 + μ·v2 on the corpus knots.
pub fn classify_restriction(f: &GaussFormula) -> Result<(Rational64, Rational64), CorpusError> {
    let value = |name: &str| -> Result<i64, CorpusError> { Ok(f.evaluate(&builtin(name)?.word)?) };
    let fail = |reason: String| CorpusError::NotClassifiable { label: f.label().to_string(), reason };
    let unknot = value("unknot")?;
    if unknot != 0 {
        return Err(fail(format!("unknot value {}", unknot)));
    }
    let (r, l) = (value("right_trefoil")?, value("left_trefoil")?);
    let lambda = Rational64::new(r - l, 2);
    let mu = Rational64::new(r + l, 2);
    let (granny, square) = (value("granny")?, value("square")?);
    if Rational64::from(granny) != (lambda + mu) * 2 {
        return Err(fail(format!("granny value {} but right trefoil {}", granny, r)));
    }
    if Rational64::from(square) != mu * 2 {
        return Err(fail(format!("square value {} but trefoils {} and {}", square, r, l)));
    }
    Ok((lambda, mu))
}

/// A uniformly random signed based word with `n` arrows, usually not realizable.
pub fn random_word(n: usize, rng: &mut impl Rng) -> GaussWord {
    let mut slots: Vec<usize> = (0..2 * n).collect();
    slots.shuffle(rng);
    let mut tokens: Vec<Option<Token>> = vec![None; 2 * n];
    for (k, pair) in slots.chunks(2).enumerate() {
        let sign = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
        let (t, h) = if rng.gen::<bool>() { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
        tokens[t] = Some(Token::tail(k as u32 + 1, sign));
        tokens[h] = Some(Token::head(k as u32 + 1, sign));
    }
    let word = GaussWord::new(tokens.into_iter().map(|t| t.expect("every slot filled")).collect(), true)
        .expect("each letter placed once as tail and once as head");
    word.relabeled()
}
