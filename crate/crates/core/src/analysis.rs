//! Solving relator systems and locating the named formulas inside the
//! solution spaces.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use crate::corpus::{builtin, classify_restriction, CorpusError};
use crate::enumeration::DiagramBasis;
use crate::gauss::{CanonicalDiagram, GaussError};
use crate::linalg::{build_system, left_nullspace, pseudo_inverse, solve_factorization, IntegerVectorBasis, LinalgError, RationalMatrix};
use crate::pairing::GaussFormula;
use crate::relators::{
    generate_classical_relators, generate_split_classical_relators, generate_virtual_relators, transcribed_relators,
    RelatorError, RelatorSystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemName {
    Virtual,
    Classical,
    /// Classical with the split pairs across the base point.
    ClassicalSplit,
}

impl fmt::Display for SystemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemName::Virtual => "virtual",
            SystemName::Classical => "classical",
            SystemName::ClassicalSplit => "classical-split",
        })
    }
}

impl FromStr for SystemName {
    type Err = String;

    fn from_str(s: &str) -> Result<SystemName, String> {
        match s {
            "virtual" => Ok(SystemName::Virtual),
            "classical" => Ok(SystemName::Classical),
            "classical-split" => Ok(SystemName::ClassicalSplit),
            other => Err(format!("unknown system {:?} (virtual, classical, classical-split)", other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Generated,
    Transcribed,
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Source, String> {
        match s {
            "generated" => Ok(Source::Generated),
            "transcribed" => Ok(Source::Transcribed),
            other => Err(format!("unknown source {:?} (generated, transcribed)", other)),
        }
    }
}

/// The split system has no transcribed counterpart.
pub fn relator_system(name: SystemName, source: Source) -> Result<RelatorSystem, RelatorError> {
    match (name, source) {
        (SystemName::Virtual, Source::Generated) => Ok(generate_virtual_relators()),
        (SystemName::Classical, Source::Generated) => Ok(generate_classical_relators()),
        (SystemName::ClassicalSplit, Source::Generated) => Ok(generate_split_classical_relators()),
        (SystemName::Virtual, Source::Transcribed) => Ok(transcribed_relators().system),
        (SystemName::Classical, Source::Transcribed) => transcribed_relators().classical(),
        (SystemName::ClassicalSplit, Source::Transcribed) => Err(RelatorError::NoTranscription(name.to_string())),
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub name: String,
    pub basis: DiagramBasis,
    pub matrix: RationalMatrix,
    pub nullspace: IntegerVectorBasis,
}

impl Solution {
    pub fn dim(&self) -> usize {
        self.nullspace.len()
    }

    /// `a^T M` vanishes for every emitted `a`.
    pub fn annihilates(&self) -> bool {
        self.nullspace.is_empty() || self.nullspace.as_matrix().mul(&self.matrix).map(|p| p.is_zero()).unwrap_or(false)
    }

    pub fn formulas(&self) -> Vec<GaussFormula> {
        self.nullspace
            .vectors()
            .iter()
            .enumerate()
            .map(|(i, v)| formula(format!("{}-{:02}", self.name, i + 1), &self.basis, v))
            .collect()
    }
}

pub fn solve(name: impl Into<String>, rs: &RelatorSystem) -> Solution {
    let matrix = build_system(rs.basis(), rs);
    let nullspace = left_nullspace(&matrix);
    Solution { name: name.into(), basis: rs.basis().clone(), matrix, nullspace }
}

pub fn solve_named(name: SystemName, source: Source) -> Result<Solution, RelatorError> {
    Ok(solve(name.to_string(), &relator_system(name, source)?))
}

pub fn formula(label: impl Into<String>, basis: &DiagramBasis, v: &[i64]) -> GaussFormula {
    GaussFormula::new(label, basis.entries().to_vec(), v.to_vec()).expect("basis entries are distinct")
}

/// Values on the unknot and the right and left trefoils.
pub fn trefoil_values(f: &GaussFormula) -> Result<[i64; 3], GaussError> {
    let mut out = [0; 3];
    for (slot, name) in out.iter_mut().zip(["unknot", "right_trefoil", "left_trefoil"]) {
        *slot = f.evaluate(&builtin(name).expect("builtin").word)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    /// Over the basis; unbased support entries are expanded over their base placements.
    pub vector: Vec<i64>,
    pub support: Vec<(CanonicalDiagram, i64)>,
    pub values: [i64; 3],
}

fn placement_vector(d: &CanonicalDiagram, basis: &DiagramBasis) -> Option<Vec<i64>> {
    let mut v = vec![0i64; basis.len()];
    if d.is_based() {
        v[basis.position(d)?] = 1;
    } else {
        for p in d.base_placements() {
            v[basis.position(&p)?] += 1;
        }
    }
    Some(v)
}

/// Unsigned 3-arrow diagrams of the basis, based ones first, then their unbased classes.
fn three_arrow_supports(basis: &DiagramBasis) -> (Vec<CanonicalDiagram>, Vec<CanonicalDiagram>) {
    let based: Vec<CanonicalDiagram> = basis.indices_with_arrows(3).into_iter().map(|i| basis.get(i).clone()).collect();
    let mut unbased: Vec<CanonicalDiagram> = based.iter().map(|d| d.word().with_based(false).canonical(false)).collect();
    unbased.sort();
    unbased.dedup();
    (based, unbased)
}

/// Vectors of `ns` of the form `x + 2y` for two unsigned 3-arrow diagrams,
/// either both based or both unbased.
pub fn polyak_viro_candidates(ns: &IntegerVectorBasis, basis: &DiagramBasis) -> Result<Vec<Located>, GaussError> {
    let (based, unbased) = three_arrow_supports(basis);
    let mut out = Vec::new();
    for family in [based, unbased] {
        let vectors: Vec<Vec<i64>> =
            family.iter().map(|d| placement_vector(d, basis).expect("basis holds every connected placement")).collect();
        for i in 0..family.len() {
            for j in 0..family.len() {
                if i == j {
                    continue;
                }
                let v: Vec<i64> = vectors[i].iter().zip(&vectors[j]).map(|(x, y)| x + 2 * y).collect();
                if ns.contains_vector(&v).expect("vector over the basis") {
                    let values = trefoil_values(&formula("pv", basis, &v))?;
                    out.push(Located { vector: v, support: vec![(family[i].clone(), 1), (family[j].clone(), 2)], values });
                }
            }
        }
    }
    Ok(out)
}

/// For each unsigned 2-arrow shape, the unit vector on its four sign refinements.
pub fn crossing_shape_sums(basis: &DiagramBasis) -> Vec<(CanonicalDiagram, Vec<i64>)> {
    let mut shapes: Vec<(CanonicalDiagram, Vec<i64>)> = Vec::new();
    for i in basis.indices_with_arrows(2) {
        let shape = basis.get(i).unsigned();
        match shapes.iter_mut().find(|(s, _)| *s == shape) {
            Some((_, v)) => v[i] = 1,
            None => {
                let mut v = vec![0i64; basis.len()];
                v[i] = 1;
                shapes.push((shape, v));
            }
        }
    }
    shapes
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeSum {
    pub shape: CanonicalDiagram,
    pub vector: Vec<i64>,
    pub in_classical: bool,
    pub in_virtual: bool,
    pub values: [i64; 3],
}

pub fn degree2_shape_sums(
    classical: &IntegerVectorBasis,
    virt: &IntegerVectorBasis,
    basis: &DiagramBasis,
) -> Result<Vec<ShapeSum>, GaussError> {
    crossing_shape_sums(basis)
        .into_iter()
        .map(|(shape, vector)| {
            let values = trefoil_values(&formula(shape.text(), basis, &vector))?;
            Ok(ShapeSum {
                in_classical: classical.contains_vector(&vector).expect("vector over the basis"),
                in_virtual: virt.contains_vector(&vector).expect("vector over the basis"),
                shape,
                vector,
                values,
            })
        })
        .collect()
}

/// Splits `ns` into vectors led by a 3-arrow entry and the part supported on 2-arrow entries.
pub fn degree_split(ns: &IntegerVectorBasis, basis: &DiagramBasis) -> (IntegerVectorBasis, IntegerVectorBasis) {
    ns.split_by_columns(&basis.indices_with_arrows(3))
}

#[derive(Debug, Clone)]
pub struct Factorization {
    pub a: RationalMatrix,
    /// `v v^+` is the identity.
    pub right_inverse: bool,
}

/// The unique `a` with `a v = w`, checked exactly.
pub fn factor_through(v: &IntegerVectorBasis, w: &IntegerVectorBasis) -> Result<Factorization, LinalgError> {
    let (vm, wm) = (v.as_matrix(), w.as_matrix());
    let a = solve_factorization(&vm, &wm)?;
    let right_inverse = vm.mul(&pseudo_inverse(&vm)?)? == RationalMatrix::identity(vm.rows());
    Ok(Factorization { a, right_inverse })
}

pub fn restrictions(formulas: &[GaussFormula]) -> Result<Vec<(Rational64, Rational64)>, CorpusError> {
    formulas.iter().map(classify_restriction).collect()
}

fn doubled(pairs: &[(Rational64, Rational64)]) -> Vec<Vec<i64>> {
    pairs.iter().map(|(l, m)| vec![(l * 2).to_integer(), (m * 2).to_integer()]).collect()
}

/// Rank of the (λ, μ) pairs as vectors in the plane.
pub fn restriction_rank(pairs: &[(Rational64, Rational64)]) -> usize {
    if pairs.is_empty() {
        return 0;
    }
    RationalMatrix::from_integer_rows(&doubled(pairs), 2).expect("pairs have two entries").rank()
}

/// A nonzero vector of `ns` restricting to (0, 0), if any.
pub fn restriction_kernel_vector(ns: &IntegerVectorBasis, basis: &DiagramBasis) -> Result<Option<Vec<i64>>, CorpusError> {
    let formulas: Vec<GaussFormula> = ns.vectors().iter().map(|v| formula("v", basis, v)).collect();
    let pairs = restrictions(&formulas)?;
    if pairs.is_empty() {
        return Ok(None);
    }
    let m = RationalMatrix::from_integer_rows(&doubled(&pairs), 2).expect("pairs have two entries");
    let kernel = left_nullspace(&m);
    Ok(kernel.vectors().first().map(|c| {
        let mut v = vec![0i64; basis.len()];
        for (ci, row) in c.iter().zip(ns.vectors()) {
            for (x, r) in v.iter_mut().zip(row) {
                *x += ci * r;
            }
        }
        let g = v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        v.iter().map(|x| x / g.max(1)).collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::degree3_basis;

    #[test]
    fn four_crossing_shapes() {
        let b = degree3_basis();
        let shapes = crossing_shape_sums(&b);
        assert_eq!(shapes.len(), 4);
        for (_, v) in &shapes {
            assert_eq!(v.iter().sum::<i64>(), 4);
        }
    }

    #[test]
    fn solutions_annihilate_their_matrices() {
        for name in [SystemName::Virtual, SystemName::Classical] {
            let s = solve_named(name, Source::Generated).unwrap();
            assert!(s.annihilates());
            assert_eq!(s.formulas().len(), s.dim());
        }
    }

    #[test]
    fn restriction_rank_of_two_independent_pairs() {
        let r = |a: i64, b: i64| (Rational64::from(a), Rational64::from(b));
        assert_eq!(restriction_rank(&[r(1, 0), r(2, 0)]), 1);
        assert_eq!(restriction_rank(&[r(1, 0), r(0, 1), r(3, 3)]), 2);
        assert_eq!(restriction_rank(&[]), 0);
    }

    #[test]
    fn system_names_parse() {
        assert_eq!("classical-split".parse::<SystemName>().unwrap(), SystemName::ClassicalSplit);
        assert!("split".parse::<SystemName>().is_err());
        assert!(relator_system(SystemName::ClassicalSplit, Source::Transcribed).is_err());
    }
}
