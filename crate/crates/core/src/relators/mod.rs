//! Relator templates, their placements with one spectator arrow, projections,
//! and the virtual and classical relator systems over the degree-3 basis.

mod transcribed;

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::enumeration::{degree3_basis, DiagramBasis};
use crate::gauss::{FormalSum, GaussError, GaussWord, Role, Sign, Token};
use crate::pairing::BasisCounter;

pub use transcribed::{transcribed_relators, TranscribedSystem, TranscriptionRecord, TranscriptionStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelatorError {
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),
    #[error("relator has no mirror partner: {0}")]
    NotMirrorable(String),
    #[error("cannot parse relator text `{0}`")]
    Parse(String),
    #[error("no transcribed list for the {0} system")]
    NoTranscription(String),
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Move {
    I,
    SII,
    WII,
    SIII,
    WIII,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Move::I => "I",
            Move::SII => "SII",
            Move::WII => "WII",
            Move::SIII => "SIII",
            Move::WIII => "WIII",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Virtual,
    Classical,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Virtual => "virtual",
            Flavor::Classical => "classical",
        })
    }
}

pub(crate) type Block = Vec<(usize, Role)>;

/// A relator shape: signed terms, each a list of blocks of template letters.
/// Blocks are separated by linear regions `0..=blocks`; region 0 precedes the
/// first block and the last region follows the last block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    name: &'static str,
    mv: Move,
    signs: Vec<Sign>,
    terms: Vec<(i64, Vec<Block>)>,
    blocks: usize,
}

impl Template {
    /// `text`: space-separated terms, each `+` or `-` followed by `|`-separated
    /// blocks. Letters `i`, `j`, `k` are template arrows in that order (lower
    /// case tail, upper case head).
    fn parse(name: &'static str, mv: Move, signs: &[Sign], text: &str) -> Template {
        let mut terms = Vec::new();
        let mut blocks = None;
        for raw in text.split_whitespace() {
            let (coeff, body) = match raw.as_bytes()[0] {
                b'+' => (1, &raw[1..]),
                b'-' => (-1, &raw[1..]),
                _ => panic!("template term `{}` lacks a sign", raw),
            };
            let parsed: Vec<Block> = body
                .split('|')
                .map(|b| {
                    b.chars()
                        .map(|c| {
                            let idx = "ijk".find(c.to_ascii_lowercase()).expect("template letter");
                            (idx, if c.is_ascii_lowercase() { Role::Tail } else { Role::Head })
                        })
                        .collect()
                })
                .collect();
            assert_eq!(*blocks.get_or_insert(parsed.len()), parsed.len(), "block count differs in {}", name);
            terms.push((coeff, parsed));
        }
        Template { name, mv, signs: signs.to_vec(), terms, blocks: blocks.unwrap_or(0) }
    }

    /// Weak RII with signs (+, -).
    pub fn wii() -> Template {
        Template::parse("WII", Move::WII, &[Sign::Plus, Sign::Minus], "+ij|IJ +i|I +j|J")
    }

    /// Strong RII; the two signs must differ.
    pub fn sii(sign_i: Sign) -> Template {
        Template::parse("SII", Move::SII, &[sign_i, sign_i.flip()], "+ij|JI +i|I +j|J")
    }

    /// Strong RIII, the form with signs (+, -, +).
    pub fn siii() -> Template {
        Template::parse(
            "SIII",
            Move::SIII,
            &[Sign::Plus, Sign::Minus, Sign::Plus],
            "+kj|iK|JI +j|i|JI +k|iK|I +kj|K|J -jk|Ki|IJ -j|i|IJ -k|Ki|I -jk|K|J",
        )
    }

    /// Strong RIII, the form with signs (-, +, +).
    pub fn siii_alternate() -> Template {
        Template::parse(
            "SIII-alt",
            Move::SIII,
            &[Sign::Minus, Sign::Plus, Sign::Plus],
            "+ij|KI|Jk +ij|I|J +i|KI|k +j|K|Jk -ji|IK|kJ -ji|I|J -i|IK|k -j|K|kJ",
        )
    }

    /// Weak RIII with all signs positive.
    pub fn wiii() -> Template {
        Template::parse(
            "WIII",
            Move::WIII,
            &[Sign::Plus, Sign::Plus, Sign::Plus],
            "+ij|Ik|JK +ij|I|J +i|Ik|K +j|k|JK -ji|kI|KJ -ji|I|J -i|kI|K -j|k|KJ",
        )
    }

    /// Weak RIII with all signs positive, head-first form.
    pub fn wiii_alternate() -> Template {
        Template::parse(
            "WIII-alt",
            Move::WIII,
            &[Sign::Plus, Sign::Plus, Sign::Plus],
            "+KJ|kI|ji +J|I|ji +K|kI|i +KJ|k|j -JK|Ik|ij -J|I|ij -K|Ik|i -JK|k|j",
        )
    }

    /// RI: a kink with tail first (`tail_first`) or head first.
    pub fn type_i(sign: Sign, tail_first: bool) -> Template {
        Template::parse("I", Move::I, &[sign], if tail_first { "+iI" } else { "+Ii" })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn move_type(&self) -> Move {
        self.mv
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn letter_count(&self) -> usize {
        self.signs.len()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// Blocks of the first term with the given coefficient that uses every letter.
    pub(crate) fn full_blocks(&self, coeff: i64) -> Option<&[Block]> {
        self.terms
            .iter()
            .find(|(c, blocks)| *c == coeff && blocks.iter().map(|b| b.len()).sum::<usize>() == 2 * self.signs.len())
            .map(|(_, blocks)| blocks.as_slice())
    }

    /// Every placement with at most one spectator arrow, in a fixed order.
    pub fn placements(&self, spectators: bool, reversals: bool) -> Vec<Placement> {
        let mut out = Vec::new();
        for reversed in [false, true] {
            if reversed && !reversals {
                continue;
            }
            for rotation in 0..self.blocks.max(1) {
                out.push(Placement { rotation, spectator: None, reversed });
                if !spectators {
                    continue;
                }
                for sign in [Sign::Plus, Sign::Minus] {
                    for tail_region in 0..=self.blocks {
                        for head_region in 0..=self.blocks {
                            if tail_region != head_region {
                                out.push(Placement {
                                    rotation,
                                    spectator: Some(Spectator { sign, tail_region, head_region }),
                                    reversed,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The full signed relator for one placement, before any projection.
    pub fn instantiate(&self, placement: &Placement) -> Result<Relator, RelatorError> {
        let m = self.blocks;
        if placement.rotation >= m.max(1) {
            return Err(RelatorError::InvalidPlacement(format!("rotation {} with {} blocks", placement.rotation, m)));
        }
        if let Some(s) = placement.spectator {
            if s.tail_region > m || s.head_region > m {
                return Err(RelatorError::InvalidPlacement(format!("region out of range 0..={}", m)));
            }
            if s.tail_region == s.head_region {
                return Err(RelatorError::InvalidPlacement("spectator endpoints share one region".into()));
            }
        }
        let spectator_letter = self.signs.len() as u32 + 1;
        let mut sum = FormalSum::new();
        for (coeff, blocks) in &self.terms {
            let mut regions: Vec<Vec<Token>> = vec![Vec::new(); m + 1];
            if let Some(s) = placement.spectator {
                regions[s.tail_region].push(Token::tail(spectator_letter, s.sign));
                regions[s.head_region].push(Token::head(spectator_letter, s.sign));
            }
            let mut tokens = Vec::new();
            for t in 0..m {
                tokens.extend(regions[t].iter().copied());
                for &(idx, role) in &blocks[(placement.rotation + t) % m] {
                    tokens.push(Token::new(idx as u32 + 1, role, self.signs[idx]));
                }
            }
            tokens.extend(regions[m].iter().copied());
            if placement.reversed {
                tokens.reverse();
            }
            let word = GaussWord::new(tokens, true)?;
            sum.add_term(word.canonical(true), *coeff)?;
        }
        Ok(Relator {
            sum,
            mv: self.mv,
            provenance: Provenance::Template { template: self.name, placement: *placement },
            window: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spectator {
    pub sign: Sign,
    pub tail_region: usize,
    pub head_region: usize,
}

/// Where a template sits inside a based word: which block is read first,
/// the optional spectator arrow, and whether every term is reversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub rotation: usize,
    pub spectator: Option<Spectator>,
    pub reversed: bool,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rot={}", self.rotation)?;
        if let Some(s) = self.spectator {
            let sign = if s.sign == Sign::Plus { '+' } else { '-' };
            write!(f, " spectator{} tail@{} head@{}", sign, s.tail_region, s.head_region)?;
        }
        if self.reversed {
            f.write_str(" reversed")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Template { template: &'static str, placement: Placement },
    /// Sum of a placement and its mirror partner.
    MirrorPair { template: &'static str, placement: Placement },
    /// Sum of a placement with a spectator endpoint beside the base and its split partner.
    SplitPair { template: &'static str, placement: Placement },
    Transcribed { index: usize, note: Option<String> },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Template { template, placement } => write!(f, "{} {}", template, placement),
            Provenance::MirrorPair { template, placement } => write!(f, "{} {} + mirror", template, placement),
            Provenance::SplitPair { template, placement } => write!(f, "{} {} + split", template, placement),
            Provenance::Transcribed { index, note: None } => write!(f, "r{}", index),
            Provenance::Transcribed { index, note: Some(n) } => write!(f, "r{} ({})", index, n),
        }
    }
}

/// Arrow-count window of a projection, and whether reducible terms are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub min_arrows: usize,
    pub max_arrows: usize,
    pub drop_reducible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    sum: FormalSum,
    mv: Move,
    provenance: Provenance,
    window: Option<Window>,
}

impl Relator {
    pub fn new(sum: FormalSum, mv: Move, provenance: Provenance) -> Relator {
        Relator { sum, mv, provenance, window: None }
    }

    pub fn sum(&self) -> &FormalSum {
        &self.sum
    }

    pub fn move_type(&self) -> Move {
        self.mv
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn window(&self) -> Option<Window> {
        self.window
    }

    pub fn placement(&self) -> Option<Placement> {
        match &self.provenance {
            Provenance::Template { placement, .. }
            | Provenance::MirrorPair { placement, .. }
            | Provenance::SplitPair { placement, .. } => Some(*placement),
            Provenance::Transcribed { .. } => None,
        }
    }

    fn with_provenance(mut self, provenance: Provenance) -> Relator {
        self.provenance = provenance;
        self
    }

    /// Every term reversed.
    pub fn reversed(&self) -> Relator {
        Relator { sum: self.sum.map_words(|w| w.reverse()), ..self.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .sum
            .iter()
            .map(|(d, c)| serde_json::json!({ "coeff": c, "word": d.text() }))
            .collect();
        serde_json::json!({
            "move": self.mv.to_string(),
            "provenance": self.provenance.to_string(),
            "terms": terms,
        })
    }
}

/// Keeps the terms with `b..=d` arrows, and when `drop_reducible` only those
/// without an isolated arrow.
pub fn project(r: &Relator, b: usize, d: usize, drop_reducible: bool) -> Relator {
    let sum = r.sum.filter(|t| {
        let n = t.arrow_count();
        n >= b && n <= d && !(drop_reducible && t.has_isolated_arrow())
    });
    Relator { sum, window: Some(Window { min_arrows: b, max_arrows: d, drop_reducible }), ..r.clone() }
}

fn template_by_name(name: &str) -> Option<Template> {
    match name {
        "WII" => Some(Template::wii()),
        "SIII" => Some(Template::siii()),
        "SIII-alt" => Some(Template::siii_alternate()),
        "WIII" => Some(Template::wiii()),
        "WIII-alt" => Some(Template::wiii_alternate()),
        _ => None,
    }
}

/// Same template, rotation and reversal, with the spectator's tail and head
/// regions exchanged.
pub fn mirror_partner(r: &Relator) -> Result<Relator, RelatorError> {
    let (template, placement) = match &r.provenance {
        Provenance::Template { template, placement } => (*template, *placement),
        other => return Err(RelatorError::NotMirrorable(other.to_string())),
    };
    let t = template_by_name(template)
        .filter(|t| t.mv == Move::SIII)
        .ok_or_else(|| RelatorError::NotMirrorable(format!("{} is not a strong RIII template", template)))?;
    let s = placement.spectator.ok_or_else(|| RelatorError::NotMirrorable("no spectator".into()))?;
    if !mirrorable(&t, &s) {
        return Err(RelatorError::NotMirrorable("spectator endpoints lie in one region".into()));
    }
    let swapped = Placement {
        spectator: Some(Spectator { tail_region: s.head_region, head_region: s.tail_region, ..s }),
        ..placement
    };
    let partner = t.instantiate(&swapped)?;
    Ok(match r.window {
        Some(w) => project(&partner, w.min_arrows, w.max_arrows, w.drop_reducible),
        None => partner,
    })
}

/// Split partner of a spectator running between the base region and an inner
/// region: `(0, y)` pairs with `(y, m)` and `(m, y)` with `(y, 0)`, same sign.
pub fn split_partner(r: &Relator) -> Result<Relator, RelatorError> {
    let (template, placement) = match &r.provenance {
        Provenance::Template { template, placement } => (*template, *placement),
        other => return Err(RelatorError::NotMirrorable(other.to_string())),
    };
    let t = template_by_name(template)
        .filter(|t| t.mv == Move::SIII)
        .ok_or_else(|| RelatorError::NotMirrorable(format!("{} is not a strong RIII template", template)))?;
    let s = placement.spectator.ok_or_else(|| RelatorError::NotMirrorable("no spectator".into()))?;
    let m = t.blocks;
    let inner = |x: usize| x > 0 && x < m;
    if !(s.tail_region == 0 || s.tail_region == m) || !inner(s.head_region) {
        return Err(RelatorError::NotMirrorable("spectator tail is not beside the base".into()));
    }
    let swapped = Placement {
        spectator: Some(Spectator { tail_region: s.head_region, head_region: m - s.tail_region, ..s }),
        ..placement
    };
    let partner = t.instantiate(&swapped)?;
    Ok(match r.window {
        Some(w) => project(&partner, w.min_arrows, w.max_arrows, w.drop_reducible),
        None => partner,
    })
}

/// `r + split_partner(r)`, both projected.
pub fn split_sum(r: &Relator) -> Result<Relator, RelatorError> {
    let partner = split_partner(r)?;
    let mut sum = r.sum.clone();
    sum.add(partner.sum())?;
    let provenance = match &r.provenance {
        Provenance::Template { template, placement } => Provenance::SplitPair { template, placement: *placement },
        other => other.clone(),
    };
    Ok(Relator { sum, ..r.clone() }.with_provenance(provenance))
}

/// Regions 0 and `blocks` together form the single cyclic region holding the base.
fn mirrorable(t: &Template, s: &Spectator) -> bool {
    let (a, b) = (s.tail_region.min(s.head_region), s.tail_region.max(s.head_region));
    a != b && !(a == 0 && b == t.blocks)
}

fn irr(r: Relator) -> Relator {
    project(&r, 2, 3, true)
}

/// Column sums of the relators over the basis, in the unsigned-rule pairing.
pub fn columns(basis: &DiagramBasis, relators: &[Relator]) -> Vec<Vec<i64>> {
    let counter = BasisCounter::new(basis.entries()).expect("basis entries are based");
    relators.iter().map(|r| counter.tilde_vector(r.sum())).collect()
}

fn normalized(col: &[i64]) -> Vec<i64> {
    match col.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => col.iter().map(|v| -v).collect(),
        _ => col.to_vec(),
    }
}

/// Counts along the generation pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GenerationStats {
    pub instances: usize,
    pub nonzero: usize,
    pub distinct_up_to_sign: usize,
    /// Relators kept after merging spectator-sign twins.
    pub kept: usize,
    /// Distinct nonzero columns up to sign among the kept relators.
    pub distinct_columns: usize,
}

#[derive(Debug, Clone)]
pub struct RelatorSystem {
    relators: Vec<Relator>,
    basis: DiagramBasis,
    flavor: Flavor,
    stats: GenerationStats,
}

type TwinKey = (Move, &'static str, usize, Option<(usize, usize)>, bool, bool);

/// Placement with the spectator sign forgotten.
fn sign_free_key(r: &Relator) -> Option<TwinKey> {
    let (template, placement, merged) = match &r.provenance {
        Provenance::Template { template, placement } => (*template, *placement, false),
        Provenance::MirrorPair { template, placement } | Provenance::SplitPair { template, placement } => {
            (*template, *placement, true)
        }
        Provenance::Transcribed { .. } => return None,
    };
    let regions = placement.spectator.map(|s| (s.tail_region, s.head_region));
    Some((r.mv, template, placement.rotation, regions, placement.reversed, merged))
}

impl RelatorSystem {
    /// Drops zero relators and exact duplicates up to sign, then merges each
    /// relator into its spectator-sign twin when their columns agree up to sign.
    pub fn from_candidates(candidates: Vec<Relator>, basis: DiagramBasis, flavor: Flavor) -> RelatorSystem {
        let instances = candidates.len();
        let nonzero: Vec<Relator> = candidates.into_iter().filter(|r| !r.sum.is_zero()).collect();
        let mut sums: HashSet<FormalSum> = HashSet::new();
        let mut distinct = Vec::new();
        for r in &nonzero {
            if sums.contains(&r.sum) || sums.contains(&r.sum.scaled(-1)) {
                continue;
            }
            sums.insert(r.sum.clone());
            distinct.push(r.clone());
        }
        let cols = columns(&basis, &distinct);
        let mut twins: HashSet<(TwinKey, Vec<i64>)> = HashSet::new();
        let mut relators = Vec::new();
        let mut kept_cols: HashSet<Vec<i64>> = HashSet::new();
        for (r, col) in distinct.iter().zip(cols) {
            if col.iter().all(|&x| x == 0) {
                continue;
            }
            if let Some(key) = sign_free_key(r) {
                if !twins.insert((key, normalized(&col))) {
                    continue;
                }
            }
            kept_cols.insert(normalized(&col));
            relators.push(r.clone());
        }
        let stats = GenerationStats {
            instances,
            nonzero: nonzero.len(),
            distinct_up_to_sign: distinct.len(),
            kept: relators.len(),
            distinct_columns: kept_cols.len(),
        };
        RelatorSystem { relators, basis, flavor, stats }
    }

    /// Keeps the given relators as they are.
    pub fn verbatim(relators: Vec<Relator>, basis: DiagramBasis, flavor: Flavor) -> RelatorSystem {
        let n = relators.len();
        let stats = GenerationStats { instances: n, nonzero: n, distinct_up_to_sign: n, kept: n, distinct_columns: n };
        RelatorSystem { relators, basis, flavor, stats }
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    pub fn basis(&self) -> &DiagramBasis {
        &self.basis
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn stats(&self) -> GenerationStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn count_by_move(&self, mv: Move) -> usize {
        self.relators.iter().filter(|r| r.mv == mv).count()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        columns(&self.basis, &self.relators)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.relators.iter().map(|r| r.to_json()).collect())
    }
}

/// Projected instances of a template over its placements.
fn projected(t: &Template, placements: &[Placement]) -> Vec<Relator> {
    placements.iter().map(|p| irr(t.instantiate(p).expect("enumerated placements are valid"))).collect()
}

/// Weak RII instances with signs (+, -), at most one spectator of either sign.
pub fn wii_relators() -> Vec<Relator> {
    let t = Template::wii();
    projected(&t, &t.placements(true, false))
}

/// Strong RIII instances with signs (+, -, +) and their reversals.
pub fn siii_relators() -> Vec<Relator> {
    let t = Template::siii();
    projected(&t, &t.placements(true, true))
}

pub fn generate_virtual_relators() -> RelatorSystem {
    let mut candidates = wii_relators();
    candidates.extend(siii_relators());
    RelatorSystem::from_candidates(candidates, degree3_basis(), Flavor::Virtual)
}

/// `r + mirror_partner(r)` for one mirrorable placement, both projected.
pub fn mirror_sum(r: &Relator) -> Result<Relator, RelatorError> {
    let partner = mirror_partner(r)?;
    let mut sum = r.sum.clone();
    sum.add(partner.sum())?;
    let provenance = match &r.provenance {
        Provenance::Template { template, placement } => Provenance::MirrorPair { template, placement: *placement },
        other => other.clone(),
    };
    Ok(Relator { sum, ..r.clone() }.with_provenance(provenance))
}

/// The mirror sum additionally summed over both spectator signs.
pub fn mirror_sum_over_spectator_signs(r: &Relator) -> Result<Relator, RelatorError> {
    let placement = r.placement().ok_or_else(|| RelatorError::NotMirrorable(r.provenance.to_string()))?;
    let s = placement.spectator.ok_or_else(|| RelatorError::NotMirrorable("no spectator".into()))?;
    let flipped = Placement { spectator: Some(Spectator { sign: s.sign.flip(), ..s }), ..placement };
    let t = Template::siii();
    let other = irr(t.instantiate(&flipped)?);
    let mut total = mirror_sum(r)?;
    total.sum.add(mirror_sum(&other)?.sum())?;
    Ok(total)
}

/// Weak RII relators unchanged, strong RIII relators without a spectator kept,
/// and each mirrorable strong RIII relator merged with its partner.
pub fn generate_classical_relators() -> RelatorSystem {
    let t = Template::siii();
    let mut candidates = wii_relators();
    for p in t.placements(true, true) {
        let r = irr(t.instantiate(&p).expect("enumerated placements are valid"));
        match p.spectator {
            None => candidates.push(r),
            Some(s) if mirrorable(&t, &s) && s.tail_region < s.head_region => {
                candidates.push(mirror_sum(&r).expect("mirrorable placement"));
            }
            Some(_) => {}
        }
    }
    RelatorSystem::from_candidates(candidates, degree3_basis(), Flavor::Classical)
}

/// The classical system plus the split sums, which balance arrow counts
/// across the base point as well as across the cyclic regions.
pub fn generate_split_classical_relators() -> RelatorSystem {
    let t = Template::siii();
    let mut candidates = generate_classical_relators().relators;
    for p in t.placements(true, true) {
        let r = irr(t.instantiate(&p).expect("enumerated placements are valid"));
        if r.placement().and_then(|p| p.spectator).is_some() {
            if let Ok(sum) = split_sum(&r) {
                candidates.push(sum);
            }
        }
    }
    RelatorSystem::from_candidates(candidates, degree3_basis(), Flavor::Classical)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::gauss::CanonicalDiagram;

    fn d(s: &str) -> CanonicalDiagram {
        CanonicalDiagram::parse(s).unwrap()
    }

    #[test]
    fn templates_build_valid_words() {
        for t in [
            Template::wii(),
            Template::sii(Sign::Plus),
            Template::siii(),
            Template::siii_alternate(),
            Template::wiii(),
            Template::wiii_alternate(),
            Template::type_i(Sign::Minus, false),
        ] {
            for p in t.placements(true, true) {
                assert!(t.instantiate(&p).is_ok(), "{} {}", t.name(), p);
            }
        }
    }

    #[test]
    fn wii_without_spectator() {
        let t = Template::wii();
        let r0 = irr(t.instantiate(&Placement { rotation: 0, spectator: None, reversed: false }).unwrap());
        assert_eq!(r0.sum(), &FormalSum::single(d("O1+ O2- U1+ U2-"), 1));
        let r1 = irr(t.instantiate(&Placement { rotation: 1, spectator: None, reversed: false }).unwrap());
        assert_eq!(r1.sum(), &FormalSum::single(d("U1+ U2- O1+ O2-"), 1));
        let full = t.instantiate(&Placement { rotation: 0, spectator: None, reversed: false }).unwrap();
        assert_eq!(full.sum().len(), 3);
        assert_eq!(full.sum().coefficient(&d("O1+ U1+")), 1);
        assert_eq!(full.sum().coefficient(&d("O1- U1-")), 1);
    }

    #[test]
    fn siii_without_spectator_projects_to_four_positive_terms() {
        let t = Template::siii();
        let r = irr(t.instantiate(&Placement { rotation: 0, spectator: None, reversed: false }).unwrap());
        let mut expected = FormalSum::new();
        for (text, c) in [
            ("O1+ O2- O3+ U1+ U2- U3+", 1),
            ("O1- O2+ U1- U2+", 1),
            ("O1+ O2- U1+ U2-", 1),
            ("O1+ O2+ U1+ U2+", 1),
        ] {
            expected.add_term(d(text), c).unwrap();
        }
        assert_eq!(r.sum(), &expected);
    }

    #[test]
    fn every_siii_term_drops_one_letter_from_the_full_term() {
        let t = Template::siii();
        for (_, blocks) in &t.terms {
            let letters: BTreeSet<usize> = blocks.iter().flatten().map(|(i, _)| *i).collect();
            assert!(letters.len() == 3 || letters.len() == 2);
        }
        assert_eq!(t.terms.iter().filter(|(c, _)| *c > 0).count(), 4);
        assert_eq!(t.terms.iter().filter(|(c, _)| *c < 0).count(), 4);
    }

    #[test]
    fn reversal_flag_matches_reversing_terms() {
        let t = Template::siii();
        for rotation in 0..3 {
            let forward = t.instantiate(&Placement { rotation, spectator: None, reversed: false }).unwrap();
            let back = t.instantiate(&Placement { rotation, spectator: None, reversed: true }).unwrap();
            assert_eq!(forward.reversed().sum(), back.sum());
            assert_eq!(back.reversed().sum(), forward.sum());
        }
    }

    #[test]
    fn projection_drops_out_of_window_and_reducible_terms() {
        let r = Relator::new(FormalSum::single(d("O1+ U1+"), 1), Move::I, Provenance::Transcribed { index: 0, note: None });
        assert!(project(&r, 2, 3, false).sum().is_zero());
        let r = Relator::new(FormalSum::single(d("O1+ U1+ O2- U2-"), 1), Move::WII, Provenance::Transcribed { index: 0, note: None });
        assert!(!project(&r, 2, 3, false).sum().is_zero());
        assert!(project(&r, 2, 3, true).sum().is_zero());
        let r = Relator::new(FormalSum::single(d("O1+ O2+ O3+ O4+ U1+ U2+ U3+ U4+"), 1), Move::SIII, Provenance::Transcribed { index: 0, note: None });
        assert!(project(&r, 2, 3, true).sum().is_zero());
    }

    #[test]
    fn mirror_partner_is_an_involution() {
        let t = Template::siii();
        let mut mirrorable_count = 0;
        for p in t.placements(true, true) {
            let r = irr(t.instantiate(&p).unwrap());
            match mirror_partner(&r) {
                Ok(m) => {
                    mirrorable_count += 1;
                    let back = mirror_partner(&m).unwrap();
                    assert_eq!(back.placement(), Some(p));
                    assert_eq!(back.sum(), r.sum());
                    assert_ne!(m.placement(), Some(p));
                }
                Err(RelatorError::NotMirrorable(_)) => {
                    assert!(p.spectator.is_none_or(|s| !mirrorable(&t, &s)));
                }
                Err(e) => panic!("{}", e),
            }
        }
        // 3 rotations, 2 reversal states, 2 signs, 10 ordered region pairs.
        assert_eq!(mirrorable_count, 120);
    }

    #[test]
    fn mirror_partner_swaps_regions() {
        let t = Template::siii();
        let p = Placement { rotation: 0, spectator: Some(Spectator { sign: Sign::Plus, tail_region: 1, head_region: 2 }), reversed: false };
        let m = mirror_partner(&t.instantiate(&p).unwrap()).unwrap();
        let s = m.placement().unwrap().spectator.unwrap();
        assert_eq!((s.tail_region, s.head_region), (2, 1));
        let none = t.instantiate(&Placement { rotation: 0, spectator: None, reversed: false }).unwrap();
        assert!(matches!(mirror_partner(&none), Err(RelatorError::NotMirrorable(_))));
    }

    #[test]
    fn virtual_system_counts() {
        let sys = generate_virtual_relators();
        assert_eq!(sys.count_by_move(Move::WII), 18);
        assert_eq!(sys.count_by_move(Move::SIII), 66);
        assert_eq!(sys.len(), 84);
    }

    #[test]
    fn classical_system_counts() {
        let sys = generate_classical_relators();
        assert_eq!(sys.count_by_move(Move::WII), 18);
        assert_eq!(sys.count_by_move(Move::SIII), 36);
    }

    #[test]
    fn summing_mirror_pairs_over_spectator_signs_cancels() {
        let t = Template::siii();
        let basis = degree3_basis();
        for p in t.placements(true, true) {
            let Some(s) = p.spectator else { continue };
            if !mirrorable(&t, &s) || s.sign == Sign::Minus {
                continue;
            }
            let r = irr(t.instantiate(&p).unwrap());
            let both = mirror_sum_over_spectator_signs(&r).unwrap();
            assert!(columns(&basis, &[both])[0].iter().all(|&x| x == 0), "{}", p);
        }
    }

    #[test]
    fn two_spectator_weak_rii_relators_vanish() {
        // The i-term and the j-term share an unsigned shape and have opposite sign products.
        let t = Template::wii();
        let basis = degree3_basis();
        let counter = BasisCounter::new(basis.entries()).unwrap();
        for signs in [[Sign::Plus, Sign::Plus], [Sign::Plus, Sign::Minus], [Sign::Minus, Sign::Minus]] {
            for rotation in 0..2 {
                let mut sum = FormalSum::new();
                for (coeff, blocks) in &t.terms {
                    let mut tokens = vec![Token::tail(3, signs[0]), Token::tail(4, signs[1])];
                    for b in 0..2 {
                        for &(idx, role) in &blocks[(rotation + b) % 2] {
                            tokens.push(Token::new(idx as u32 + 1, role, t.signs[idx]));
                        }
                        if b == 0 {
                            tokens.push(Token::head(3, signs[0]));
                            tokens.push(Token::head(4, signs[1]));
                        }
                    }
                    sum.add_term(GaussWord::new(tokens, true).unwrap().canonical(true), *coeff).unwrap();
                }
                let r = irr(Relator::new(sum, Move::WII, Provenance::Transcribed { index: 0, note: None }));
                assert!(counter.tilde_vector(r.sum()).iter().all(|&x| x == 0));
            }
        }
    }
}
