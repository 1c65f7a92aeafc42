//! The published 84-relator list, transcribed as written and checked against
//! the template engine.
//!
//! Letters: `i` (+), `j` (-), `k` (+) and the spectator `s`; lower case is a
//! tail, upper case a head. Entries 3..=18 come in pairs sharing one text, the
//! first with a positive spectator and the second with a negative one; the
//! strong RIII entries are read with a positive spectator.

use std::collections::HashSet;

use crate::enumeration::degree3_basis;
use crate::gauss::{FormalSum, GaussWord, Sign, Token};

use super::{
    irr, siii_relators, wii_relators, Flavor, Move, Placement, Provenance, Relator, RelatorError, RelatorSystem,
    Spectator,
};

/// Weak RII entries as (first index, text); spectator-bearing texts cover two indices.
const WII_ENTRIES: &[(usize, &str)] = &[
    (1, "IJij+iI+jJ"),
    (2, "ijIJ+iI+jJ"),
    (3, "SIJsij+SIsi+SJsj"),
    (5, "IJsijS+IsiS+JsjS"),
    (7, "sijSIJ+siSI+sjSJ"),
    (9, "ijSIJs+iSIs+jSJs"),
    (11, "sIJSij+sISi+sJSj"),
    (13, "IJSijS+ISiS+JSjS"),
    (15, "sijsIJ+sisI+sjsJ"),
    (17, "ijsIJS+isIS+jsJS"),
];

/// Strong RIII entries 19..=51; the first has two printed readings.
const SIII_ENTRIES: &[&[&str]] = &[
    &["kjiKJI+jiJI+kjKJ+kiKI", "ijKIJk+ijIJ+iKIk+jKJk"],
    &["JIkjiK+JIji+JkjK+IkiK"],
    &["iKJIkj+iJIj+KJkj+iKIk"],
    &["jisJIS+kjKsJS+kiKsIS-jisIJS"],
    &["SjisJI+SkjKsJ+SkiKsI-SjisIJ"],
    &["JISjis+JSkjKs+ISkiKs-IJSjis"],
    &["sJISji+sJSkjK+sISkiK-sIJSji"],
    &["isJISj+KsJSkj+iKsISk-isIJSj"],
    &["jiSJIs+kjKSJs+kiKSIs-jiSIJIs"],
    &["sjiSJI+skjKSJ+skiKSI-sjiSJI"],
    &["JIsjiS+JskjKS+IskiKS-JIsjiS"],
    &["SJIji+SIskiK+SIskiK-SJIsji"],
    &["iSJIsj+KSJskj+iKSIsk-iSJIsj"],
    &["isJIjS+KsJkjS+iKsIkS-iKsIkS"],
    &["jSisJI+kjSKsJ+kSiKsI-kSiKsI"],
    &["JIjSiKs+JkjSKs+IkSiKs-IkSiKs"],
    &["sJIjSi+sJkjSK+sIkSiK-sIkSiK"],
    &["SisJIj+SKsJkj+SiKsIk-SiKsIk"],
    &["iSJIjs+KSJkjs+iKSIks-iKSIks"],
    &["jsiSJI+kjsKSJ+ksiKSI-ksiKSI"],
    &["JIjsiS+JkjsKS+IksiKS-IksiKS"],
    &["SJIjsi+SJkjsK+SIksiK-SIksiK"],
    &["siSJIj+sKSJkj+siKSIk-siKSIk"],
    &["siJISj+sKJSkj+siKISk-sKJSjk"],
    &["jsiJIS+kjsKJS+ksiKIS-jksKJS"],
    &["SjsiJI+SkjsKJ+SksiKI-SjksKJ"],
    &["JISjsi+JSkjsK+ISksiK-JSjksK"],
    &["iJISjs+KJSkjs+iKISks-KJSjks"],
    &["SiJIsj+SKJskj+SiKIsk-SKJsjk"],
    &["jSiJIsSKJskj+SiKIsk-SKJsjk"],
    &["sjSiJI+skjSKJ+skSiKI-sjkSKJ"],
    &["JIsjSi+JskjSK+IskSiK-JsjkSK"],
    &["iJIsjS+KJskjS+iKIskS-KJsjkS"],
];

const FIRST_SIII: usize = 19;
const FIRST_REVERSED: usize = 52;

/// A single term's text parsed to a based signed word.
fn parse_term(text: &str, sigma: Sign) -> Result<GaussWord, RelatorError> {
    let tokens = text
        .chars()
        .map(|c| {
            let (letter, sign) = match c.to_ascii_lowercase() {
                'i' => (1, Sign::Plus),
                'j' => (2, Sign::Minus),
                'k' => (3, Sign::Plus),
                's' => (4, sigma),
                _ => return Err(RelatorError::Parse(text.to_string())),
            };
            Ok(if c.is_ascii_lowercase() { Token::tail(letter, sign) } else { Token::head(letter, sign) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GaussWord::new(tokens, true)?)
}

/// Splits `a+b-c` into signed term texts.
fn split_terms(text: &str) -> Vec<(i64, String)> {
    let mut out = Vec::new();
    let mut coeff = 1;
    let mut current = String::new();
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        if c == '+' || c == '-' {
            if !current.is_empty() {
                out.push((coeff, std::mem::take(&mut current)));
            }
            coeff = if c == '+' { 1 } else { -1 };
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        out.push((coeff, current));
    }
    out
}

/// Parsed terms of a relator text; the error lists the terms that failed.
fn parse_relator(text: &str, sigma: Sign) -> (FormalSum, Vec<String>) {
    let mut sum = FormalSum::new();
    let mut failures = Vec::new();
    for (coeff, term) in split_terms(text) {
        match parse_term(&term, sigma) {
            Ok(w) => sum.add_term(w.canonical(true), coeff).expect("signed based terms"),
            Err(_) => failures.push(term),
        }
    }
    (sum, failures)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscriptionStatus {
    /// The printed text is a template instance after projection.
    Exact,
    /// One printed reading is a template instance; the others are not.
    ExactWithRejectedReadings(Vec<String>),
    /// Not a template instance; replaced by the best-matching instance.
    Replaced { reason: String, shared_terms: usize, printed_terms: usize },
    /// Defined as the reversal of an earlier entry.
    Reversal { of: usize },
}

impl TranscriptionStatus {
    pub fn is_flagged(&self) -> bool {
        matches!(self, TranscriptionStatus::Replaced { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptionRecord {
    pub index: usize,
    pub text: String,
    pub sigma: Option<Sign>,
    pub status: TranscriptionStatus,
    /// Placement of the template instance used for this entry.
    pub placement: Placement,
}

#[derive(Debug, Clone)]
pub struct TranscribedSystem {
    pub system: RelatorSystem,
    pub records: Vec<TranscriptionRecord>,
}

impl TranscribedSystem {
    pub fn flagged(&self) -> Vec<&TranscriptionRecord> {
        self.records.iter().filter(|r| r.status.is_flagged()).collect()
    }

    /// Indices of flagged entries.
    pub fn flagged_indices(&self) -> Vec<usize> {
        self.flagged().iter().map(|r| r.index).collect()
    }

    /// The classical reduction of the corrected list: weak RII entries, strong
    /// RIII entries without a spectator, and the sum of each mirroring pair of
    /// entries.
    pub fn classical(&self) -> Result<RelatorSystem, RelatorError> {
        let relators = self.system.relators();
        let mut out = Vec::new();
        for (rec, r) in self.records.iter().zip(relators) {
            let Some(s) = rec.placement.spectator else {
                out.push(r.clone());
                continue;
            };
            if r.move_type() == Move::WII {
                out.push(r.clone());
                continue;
            }
            if s.tail_region > s.head_region {
                continue;
            }
            let partner_placement = Placement {
                spectator: Some(Spectator { tail_region: s.head_region, head_region: s.tail_region, ..s }),
                ..rec.placement
            };
            let partner = self
                .records
                .iter()
                .zip(relators)
                .find(|(p, q)| q.move_type() == Move::SIII && p.placement == partner_placement)
                .map(|(_, r)| r)
                .ok_or_else(|| RelatorError::NotMirrorable(format!("entry r{} has no partner in the list", rec.index)))?;
            let mut sum = r.sum().clone();
            sum.add(partner.sum())?;
            out.push(Relator::new(
                sum,
                Move::SIII,
                Provenance::Transcribed { index: rec.index, note: Some("mirror pair".into()) },
            ));
        }
        Ok(RelatorSystem::verbatim(out, self.system.basis().clone(), Flavor::Classical))
    }
}

/// Terms of `a` found in `b`, under the better of the two overall signs.
fn shared_terms(a: &FormalSum, b: &FormalSum, repaired: &[Vec<Vec<(i64, GaussWord)>>]) -> usize {
    let score = |orientation: i64| {
        let direct = a.iter().filter(|(d, c)| b.coefficient(d) == orientation * *c).count();
        let fixed: usize = repaired
            .iter()
            .map(|variants| {
                variants
                    .iter()
                    .map(|pieces| {
                        pieces
                            .iter()
                            .filter(|(c, w)| b.coefficient(&w.canonical(true)) == orientation * *c)
                            .count()
                    })
                    .max()
                    .unwrap_or(0)
            })
            .sum();
        direct + fixed
    };
    score(1).max(score(-1))
}

/// Single-edit variants of an unparseable term that do parse: one character
/// toggled in case, deleted or inserted, or the term split in two.
fn repairs(coeff: i64, text: &str, sigma: Sign) -> Vec<Vec<(i64, GaussWord)>> {
    const ALPHABET: &str = "ijksIJKS";
    let chars: Vec<char> = text.chars().collect();
    let mut texts: Vec<Vec<(i64, String)>> = Vec::new();
    for p in 0..chars.len() {
        let mut toggled = chars.clone();
        toggled[p] =
            if chars[p].is_ascii_lowercase() { chars[p].to_ascii_uppercase() } else { chars[p].to_ascii_lowercase() };
        texts.push(vec![(coeff, toggled.iter().collect())]);
        let mut deleted = chars.clone();
        deleted.remove(p);
        texts.push(vec![(coeff, deleted.iter().collect())]);
        if p > 0 {
            texts.push(vec![(coeff, chars[..p].iter().collect()), (1, chars[p..].iter().collect())]);
        }
    }
    for p in 0..=chars.len() {
        for c in ALPHABET.chars() {
            let mut inserted = chars.clone();
            inserted.insert(p, c);
            texts.push(vec![(coeff, inserted.iter().collect())]);
        }
    }
    texts
        .into_iter()
        .filter_map(|pieces| {
            pieces
                .into_iter()
                .map(|(c, t)| parse_term(&t, sigma).ok().map(|w| (c, w)))
                .collect::<Option<Vec<_>>>()
        })
        .map(|pieces| {
            pieces.into_iter().filter(|(_, w)| (2..=3).contains(&w.arrow_count()) && !w.has_isolated_arrow()).collect()
        })
        .collect()
}

struct Candidates {
    relators: Vec<Relator>,
    used: HashSet<usize>,
}

impl Candidates {
    fn exact(&self, sum: &FormalSum) -> Option<usize> {
        let neg = sum.scaled(-1);
        (0..self.relators.len())
            .find(|i| !self.used.contains(i) && (self.relators[*i].sum() == sum || self.relators[*i].sum() == &neg))
    }

    fn best(
        &self,
        sum: &FormalSum,
        repaired: &[Vec<Vec<(i64, GaussWord)>>],
        mv: Move,
        spectator_sign: Option<Sign>,
    ) -> (usize, usize) {
        (0..self.relators.len())
            .filter(|i| !self.used.contains(i))
            .filter(|&i| {
                let r = &self.relators[i];
                r.move_type() == mv
                    && r.placement().map(|p| p.spectator.map(|s| s.sign)) == Some(spectator_sign)
            })
            .map(|i| (i, shared_terms(sum, self.relators[i].sum(), repaired)))
            .max_by_key(|&(i, score)| (score, std::cmp::Reverse(i)))
            .expect("a candidate remains for every entry")
    }
}

struct Entry {
    index: usize,
    readings: Vec<&'static str>,
    sigma: Option<Sign>,
    mv: Move,
}

fn has_spectator(text: &str) -> bool {
    text.contains(['s', 'S'])
}

fn entries() -> Vec<Entry> {
    let mut out = Vec::new();
    for &(index, text) in WII_ENTRIES {
        if has_spectator(text) {
            for (offset, sigma) in [(0, Sign::Plus), (1, Sign::Minus)] {
                out.push(Entry { index: index + offset, readings: vec![text], sigma: Some(sigma), mv: Move::WII });
            }
        } else {
            out.push(Entry { index, readings: vec![text], sigma: None, mv: Move::WII });
        }
    }
    for (u, readings) in SIII_ENTRIES.iter().enumerate() {
        let sigma = has_spectator(readings[0]).then_some(Sign::Plus);
        out.push(Entry { index: FIRST_SIII + u, readings: readings.to_vec(), sigma, mv: Move::SIII });
    }
    out
}

/// The 84 relators as printed, each validated against the template engine.
/// Entries that are not template instances are replaced by the generated
/// instance sharing the most terms, chosen injectively in list order after
/// all exact matches are assigned.
pub fn transcribed_relators() -> TranscribedSystem {
    let mut generated = wii_relators();
    generated.extend(siii_relators().into_iter().filter(|r| r.placement().is_some_and(|p| !p.reversed)));
    generated.retain(|r| !r.sum().is_zero());
    let mut cands = Candidates { relators: generated, used: HashSet::new() };
    let entries = entries();

    struct Parsed {
        sum: FormalSum,
        failures: Vec<String>,
    }
    let parsed: Vec<Vec<Parsed>> = entries
        .iter()
        .map(|e| {
            e.readings
                .iter()
                .map(|text| {
                    let (sum, failures) = parse_relator(text, e.sigma.unwrap_or(Sign::Plus));
                    let projected = irr(Relator::new(sum, e.mv, Provenance::Transcribed { index: e.index, note: None }));
                    Parsed { sum: projected.sum().clone(), failures }
                })
                .collect()
        })
        .collect();

    let mut assigned: Vec<Option<(usize, TranscriptionStatus, usize)>> = vec![None; entries.len()];
    for (n, e) in entries.iter().enumerate() {
        for (ri, p) in parsed[n].iter().enumerate() {
            if !p.failures.is_empty() {
                continue;
            }
            if let Some(i) = cands.exact(&p.sum) {
                cands.used.insert(i);
                let rejected: Vec<String> =
                    e.readings.iter().enumerate().filter(|(k, _)| *k != ri).map(|(_, t)| t.to_string()).collect();
                let status = if rejected.is_empty() {
                    TranscriptionStatus::Exact
                } else {
                    TranscriptionStatus::ExactWithRejectedReadings(rejected)
                };
                assigned[n] = Some((i, status, ri));
                break;
            }
        }
    }
    for (n, e) in entries.iter().enumerate() {
        if assigned[n].is_some() {
            continue;
        }
        let p = &parsed[n][0];
        let sigma = e.sigma.unwrap_or(Sign::Plus);
        let repaired: Vec<_> = split_terms(e.readings[0])
            .into_iter()
            .filter(|(_, t)| p.failures.contains(t))
            .map(|(c, t)| repairs(c, &t, sigma))
            .collect();
        let (i, score) = cands.best(&p.sum, &repaired, e.mv, e.sigma);
        cands.used.insert(i);
        let reason = if p.failures.is_empty() {
            "not a template instance".to_string()
        } else {
            format!("unparseable terms {}", p.failures.join(", "))
        };
        let printed_terms = p.sum.len() + p.failures.len();
        assigned[n] = Some((i, TranscriptionStatus::Replaced { reason, shared_terms: score, printed_terms }, 0));
    }

    let mut relators = Vec::new();
    let mut records = Vec::new();
    for (n, e) in entries.iter().enumerate() {
        let (i, status, reading) = assigned[n].clone().expect("every entry is assigned");
        let source = &cands.relators[i];
        let placement = source.placement().expect("generated relators carry placements");
        let note = match &status {
            TranscriptionStatus::Replaced { .. } => Some(format!("replaced by {}", source.provenance())),
            _ => None,
        };
        relators.push(Relator::new(source.sum().clone(), e.mv, Provenance::Transcribed { index: e.index, note }));
        records.push(TranscriptionRecord {
            index: e.index,
            text: e.readings[reading].to_string(),
            sigma: e.sigma,
            status,
            placement,
        });
    }
    let siii_count = SIII_ENTRIES.len();
    let first_siii = records.iter().position(|r| r.index == FIRST_SIII).expect("strong RIII entries present");
    for u in 0..siii_count {
        let src = first_siii + u;
        let reversed = relators[src].reversed();
        let index = FIRST_REVERSED + u;
        relators.push(Relator::new(
            reversed.sum().clone(),
            Move::SIII,
            Provenance::Transcribed { index, note: Some(format!("reversal of r{}", records[src].index)) },
        ));
        records.push(TranscriptionRecord {
            index,
            text: String::new(),
            sigma: records[src].sigma,
            status: TranscriptionStatus::Reversal { of: records[src].index },
            placement: Placement { reversed: true, ..records[src].placement },
        });
    }
    TranscribedSystem { system: RelatorSystem::verbatim(relators, degree3_basis(), Flavor::Virtual), records }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::CanonicalDiagram;
    use crate::relators::Template;

    #[test]
    fn splits_terms_with_signs() {
        assert_eq!(
            split_terms("ab+cd - ef"),
            vec![(1, "ab".to_string()), (1, "cd".to_string()), (-1, "ef".to_string())]
        );
    }

    #[test]
    fn first_weak_rii_entry() {
        let (sum, failures) = parse_relator("IJij+iI+jJ", Sign::Plus);
        assert!(failures.is_empty());
        assert_eq!(sum.coefficient(&CanonicalDiagram::parse("U1+ U2- O1+ O2-").unwrap()), 1);
        assert_eq!(sum.coefficient(&CanonicalDiagram::parse("O1+ U1+").unwrap()), 1);
        assert_eq!(sum.coefficient(&CanonicalDiagram::parse("O1- U1-").unwrap()), 1);
    }

    #[test]
    fn list_has_84_entries() {
        let t = transcribed_relators();
        assert_eq!(t.system.len(), 84);
        assert_eq!(t.system.count_by_move(Move::WII), 18);
        assert_eq!(t.system.count_by_move(Move::SIII), 66);
        let indices: Vec<usize> = t.records.iter().map(|r| r.index).collect();
        assert_eq!(indices, (1..=84).collect::<Vec<_>>());
    }

    #[test]
    fn known_defects_are_flagged() {
        let t = transcribed_relators();
        let flagged = t.flagged_indices();
        for i in [13, 15, 27, 48] {
            assert!(flagged.contains(&i), "r{} should be flagged, got {:?}", i, flagged);
        }
        let r19 = &t.records[18];
        assert!(matches!(r19.status, TranscriptionStatus::ExactWithRejectedReadings(_)));
    }

    #[test]
    fn reversal_entries_match_reversed_placements() {
        let t = transcribed_relators();
        let tmpl = Template::siii();
        for (rec, r) in t.records.iter().zip(t.system.relators()).skip(FIRST_REVERSED - 1) {
            let expected = irr(tmpl.instantiate(&rec.placement).unwrap());
            assert_eq!(r.sum(), expected.sum(), "r{}", rec.index);
        }
    }

    #[test]
    fn every_entry_uses_a_distinct_placement() {
        let t = transcribed_relators();
        let placements: HashSet<(Move, Placement)> =
            t.records.iter().zip(t.system.relators()).map(|(rec, r)| (r.move_type(), rec.placement)).collect();
        assert_eq!(placements.len(), 84);
    }

    #[test]
    fn classical_reduction_of_the_list() {
        let t = transcribed_relators();
        let c = t.classical().unwrap();
        assert_eq!(c.len(), 54);
    }
}
