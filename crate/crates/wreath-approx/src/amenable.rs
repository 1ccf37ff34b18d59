//! Amenable acting groups, Følner sets, and the permutation
//! approximation `σ: H → Sym(B)`.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::sync::Arc;

use crate::perm::Permutation;
use crate::rational::{rat, rational_string, Rational};
use crate::table::GroupTable;
use crate::{Error, Result};
use num::{Signed, ToPrimitive, Zero};

/// The built-in amenable backends: the integers, integer lattices, and
/// finite groups given by tables.
#[derive(Debug, Clone)]
pub enum AmenableGroup {
    IntegerLine,
    IntegerLattice { d: usize },
    Finite(Arc<GroupTable>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HElement {
    Int(i64),
    Vector(Vec<i64>),
    Index(usize),
}

impl AmenableGroup {
    pub fn identity(&self) -> HElement {
        match self {
            Self::IntegerLine => HElement::Int(0),
            Self::IntegerLattice { d } => HElement::Vector(vec![0; *d]),
            Self::Finite(t) => HElement::Index(t.identity()),
        }
    }

    pub fn validate(&self, h: &HElement) -> Result<()> {
        match (self, h) {
            (Self::IntegerLine, HElement::Int(_)) => Ok(()),
            (Self::IntegerLattice { d }, HElement::Vector(v)) if v.len() == *d => Ok(()),
            (Self::Finite(t), HElement::Index(i)) if *i < t.order => Ok(()),
            _ => Err(Error::InvalidElement(format!("{h:?} is outside the backend domain"))),
        }
    }

    pub fn mul(&self, a: &HElement, b: &HElement) -> Result<HElement> {
        self.validate(a)?;
        self.validate(b)?;
        match (self, a, b) {
            (Self::IntegerLine, HElement::Int(x), HElement::Int(y)) => Ok(HElement::Int(x + y)),
            (Self::IntegerLattice { .. }, HElement::Vector(x), HElement::Vector(y)) => Ok(
                HElement::Vector(x.iter().zip(y).map(|(a, b)| a + b).collect()),
            ),
            (Self::Finite(t), HElement::Index(x), HElement::Index(y)) => Ok(HElement::Index(t.mul(*x, *y))),
            _ => unreachable!("validated above"),
        }
    }

    pub fn inv(&self, a: &HElement) -> Result<HElement> {
        self.validate(a)?;
        match (self, a) {
            (Self::IntegerLine, HElement::Int(x)) => Ok(HElement::Int(-x)),
            (Self::IntegerLattice { .. }, HElement::Vector(x)) => {
                Ok(HElement::Vector(x.iter().map(|a| -a).collect()))
            }
            (Self::Finite(t), HElement::Index(x)) => Ok(HElement::Index(t.inv(*x))),
            _ => unreachable!("validated above"),
        }
    }

    pub fn is_identity(&self, a: &HElement) -> bool {
        a == &self.identity()
    }
}

/// An ordered Følner set together with the targets it was built for and
/// the verified boundary bound.
#[derive(Debug, Clone)]
pub struct FolnerSet {
    pub elements: Vec<HElement>,
    pub for_set: Vec<HElement>,
    pub bound: Rational,
}

impl FolnerSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, h: &HElement) -> Option<usize> {
        self.elements.iter().position(|e| e == h)
    }
}

/// Exact symmetric-difference ratio `|hB △ B| / |B|`.
pub fn boundary_ratio(group: &AmenableGroup, b: &[HElement], h: &HElement) -> Result<Rational> {
    if b.is_empty() {
        return Err(Error::InvalidElement("empty candidate Folner set".into()));
    }
    group.validate(h)?;
    let set: HashSet<&HElement> = b.iter().collect();
    if set.len() != b.len() {
        return Err(Error::InvalidElement("candidate Folner set has duplicates".into()));
    }
    let translated: Vec<HElement> = b
        .iter()
        .map(|e| group.mul(h, e))
        .collect::<Result<Vec<_>>>()?;
    let tset: HashSet<&HElement> = translated.iter().collect();
    let only_translated = translated.iter().filter(|e| !set.contains(e)).count();
    let only_original = b.iter().filter(|e| !tset.contains(e)).count();
    Ok(rat((only_translated + only_original) as i64, b.len() as i64))
}

/// Builds a Følner set whose boundary ratio is at most `bound` for every
/// target, using the per-backend families: intervals for Z, cubes for
/// Z^d, the whole group for finite backends. Ratios are re-verified with
/// `boundary_ratio` before returning.
pub fn folner_for(group: &AmenableGroup, targets: &[HElement], bound: &Rational) -> Result<FolnerSet> {
    if bound <= &Rational::zero() {
        return Err(Error::NoFolnerSet("bound must be positive".into()));
    }
    for t in targets {
        group.validate(t)?;
    }
    let elements: Vec<HElement> = match group {
        AmenableGroup::IntegerLine => {
            // interval {0..N-1}: ratio for shift h is 2|h|/N (once N ≥ |h|),
            // so the smallest N is ceil(2·max|h| / bound)
            let max_abs = targets
                .iter()
                .map(|t| match t {
                    HElement::Int(x) => x.abs(),
                    _ => unreachable!("validated above"),
                })
                .max()
                .unwrap_or(0);
            let needed = (rat(2 * max_abs, 1) / bound).ceil();
            let n = needed.to_integer().to_i64().unwrap().max(1);
            (0..n).map(HElement::Int).collect()
        }
        AmenableGroup::IntegerLattice { d } => {
            // cube {0..L-1}^d, smallest side found by scan
            let mut side = 1usize;
            loop {
                let cube = lattice_cube(*d, side);
                let ok = targets
                    .iter()
                    .map(|t| boundary_ratio(group, &cube, t))
                    .collect::<Result<Vec<_>>>()?
                    .iter()
                    .all(|r| r <= bound);
                if ok {
                    break cube;
                }
                side += 1;
                if side > 10_000 {
                    return Err(Error::NoFolnerSet("lattice cube scan exceeded limit".into()));
                }
            }
        }
        AmenableGroup::Finite(t) => (0..t.order).map(HElement::Index).collect(),
    };
    let folner = FolnerSet {
        elements,
        for_set: targets.to_vec(),
        bound: bound.clone(),
    };
    // re-verify the construction
    for t in targets {
        let r = boundary_ratio(group, &folner.elements, t)?;
        if &r > bound {
            return Err(Error::NoFolnerSet(format!(
                "constructed set has ratio {r} > {bound} for target {t:?}"
            )));
        }
    }
    Ok(folner)
}

fn lattice_cube(d: usize, side: usize) -> Vec<HElement> {
    let mut points = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &points {
            for c in 0..side as i64 {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        points = next;
    }
    points.into_iter().map(HElement::Vector).collect()
}

/// `σ(h)`: positions whose left translate stays in `B` map to the
/// translate's position; the remainder are matched in order by the
/// canonical bijection `γ_h` from `hB \ B` onto `B \ hB`, both sorted by
/// the backend's total order.
pub fn build_sigma(group: &AmenableGroup, b: &FolnerSet, h: &HElement) -> Result<Permutation> {
    group.validate(h)?;
    let n = b.len();
    let translated: Vec<HElement> = b
        .elements
        .iter()
        .map(|e| group.mul(h, e))
        .collect::<Result<Vec<_>>>()?;
    let mut images = vec![usize::MAX; n];
    let mut covered = vec![false; n];
    let mut escaped: Vec<usize> = Vec::new();
    for (i, t) in translated.iter().enumerate() {
        match b.position(t) {
            Some(j) => {
                images[i] = j;
                covered[j] = true;
            }
            None => escaped.push(i),
        }
    }
    // γ_h: sort hB \ B by the translated element, B \ hB by the element
    escaped.sort_by(|&i, &j| translated[i].cmp(&translated[j]));
    let mut vacated: Vec<usize> = (0..n).filter(|&j| !covered[j]).collect();
    vacated.sort_by(|&i, &j| b.elements[i].cmp(&b.elements[j]));
    for (&i, &j) in escaped.iter().zip(&vacated) {
        images[i] = j;
    }
    Permutation::from_images(images)
}

/// Boundary-ratio oracle used by the cross-check suites: recomputes the
/// symmetric difference from scratch with owned hash sets.
pub fn boundary_ratio_oracle(group: &AmenableGroup, b: &[HElement], h: &HElement) -> Result<Rational> {
    let set: HashSet<HElement> = b.iter().cloned().collect();
    let mut tset: HashSet<HElement> = HashSet::new();
    for e in b {
        tset.insert(group.mul(h, e)?);
    }
    let sym = set.symmetric_difference(&tset).count();
    Ok(rat(sym as i64, b.len() as i64))
}

/// Serializable backend descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AmenableGroupDesc {
    #[serde(rename = "Z")]
    IntegerLine,
    #[serde(rename = "Zd")]
    IntegerLattice { d: usize },
    #[serde(rename = "finite")]
    Finite { order: usize, mul_table: Vec<usize> },
}

impl AmenableGroupDesc {
    pub fn build(&self) -> Result<AmenableGroup> {
        match self {
            Self::IntegerLine => Ok(AmenableGroup::IntegerLine),
            Self::IntegerLattice { d } => {
                if *d < 1 {
                    return Err(Error::Config("lattice dimension must be at least 1".into()));
                }
                Ok(AmenableGroup::IntegerLattice { d: *d })
            }
            Self::Finite { order, mul_table } => Ok(AmenableGroup::Finite(Arc::new(GroupTable::new(
                *order,
                mul_table.clone(),
            )?))),
        }
    }
}

/// Per-target ratio report used by the CLI.
#[derive(Debug, Serialize)]
pub struct FolnerReport {
    pub elements: Vec<HElement>,
    pub targets: Vec<TargetRatio>,
    #[serde(with = "rational_string")]
    pub bound: Rational,
}

#[derive(Debug, Serialize)]
pub struct TargetRatio {
    pub target: HElement,
    #[serde(with = "rational_string")]
    pub ratio: Rational,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn boundary_ratio_examples() {
        let z = AmenableGroup::IntegerLine;
        let b: Vec<HElement> = (0..10).map(HElement::Int).collect();
        assert_eq!(boundary_ratio(&z, &b, &HElement::Int(0)).unwrap(), rat(0, 1));
        assert_eq!(boundary_ratio(&z, &b, &HElement::Int(2)).unwrap(), rat(4, 10));
        let fin = AmenableGroup::Finite(Arc::new(GroupTable::cyclic(5)));
        let whole: Vec<HElement> = (0..5).map(HElement::Index).collect();
        for h in 0..5 {
            assert_eq!(boundary_ratio(&fin, &whole, &HElement::Index(h)).unwrap(), rat(0, 1));
        }
    }

    #[test]
    fn folner_interval_for_z() {
        let z = AmenableGroup::IntegerLine;
        let targets: Vec<HElement> = (-2..=2).map(HElement::Int).collect();
        let f = folner_for(&z, &targets, &rat(1, 60)).unwrap();
        assert_eq!(f.len(), 240);
        assert_eq!(f.elements[0], HElement::Int(0));
        assert_eq!(f.elements[239], HElement::Int(239));
    }

    #[test]
    fn folner_whole_group_for_finite() {
        let fin = AmenableGroup::Finite(Arc::new(GroupTable::cyclic(7)));
        let targets: Vec<HElement> = (0..7).map(HElement::Index).collect();
        let f = folner_for(&fin, &targets, &rat(1, 1_000_000)).unwrap();
        assert_eq!(f.len(), 7);
    }

    #[test]
    fn folner_cube_for_z2() {
        let z2 = AmenableGroup::IntegerLattice { d: 2 };
        let mut targets = Vec::new();
        for a in -1..=1i64 {
            for b in -1..=1i64 {
                targets.push(HElement::Vector(vec![a, b]));
            }
        }
        let f = folner_for(&z2, &targets, &rat(1, 10)).unwrap();
        // smallest L with max ratio ≤ 1/10; verify minimality by brute force
        let side = (f.len() as f64).sqrt().round() as usize;
        assert_eq!(side * side, f.len());
        for t in &targets {
            assert!(boundary_ratio(&z2, &f.elements, t).unwrap() <= rat(1, 10));
        }
        if side > 1 {
            let smaller = lattice_cube(2, side - 1);
            let all_ok = targets
                .iter()
                .all(|t| boundary_ratio(&z2, &smaller, t).unwrap() <= rat(1, 10));
            assert!(!all_ok, "cube side should be minimal");
        }
    }

    #[test]
    fn sigma_identity_and_cycle() {
        let z = AmenableGroup::IntegerLine;
        let targets = vec![HElement::Int(1), HElement::Int(-1)];
        let f = FolnerSet {
            elements: (0..5).map(HElement::Int).collect(),
            for_set: targets,
            bound: rat(1, 1),
        };
        assert!(build_sigma(&z, &f, &HElement::Int(0)).unwrap().is_identity());
        let s = build_sigma(&z, &f, &HElement::Int(1)).unwrap();
        assert_eq!(s.images(), &[1, 2, 3, 4, 0]);
    }

    #[test]
    fn sigma_is_a_bijection_for_random_shifts() {
        let z = AmenableGroup::IntegerLine;
        let f = FolnerSet {
            elements: (0..30).map(HElement::Int).collect(),
            for_set: vec![],
            bound: rat(1, 1),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let h = HElement::Int(rng.gen_range(-50..50));
            // from_images validates bijectivity
            build_sigma(&z, &f, &h).unwrap();
        }
    }

    #[test]
    fn boundary_ratio_agrees_with_oracle() {
        let z2 = AmenableGroup::IntegerLattice { d: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let side = rng.gen_range(1..6);
            let b = lattice_cube(2, side);
            let h = HElement::Vector(vec![rng.gen_range(-3..3), rng.gen_range(-3..3)]);
            assert_eq!(
                boundary_ratio(&z2, &b, &h).unwrap(),
                boundary_ratio_oracle(&z2, &b, &h).unwrap()
            );
        }
    }
}
