//! The coset-section construction: for a subgroup `H ≤ G` whose left
//! coset action is amenable, an approximation `φ` of `H` lifts to
//! `Φ(g) = ((φ(b⁻¹ g τπ(g⁻¹b)))_{b∈B}, σ(g))` over a Følner set `B̄` of
//! cosets, with `τ` the minimal-representative section and `σ` the same
//! wrap-around permutation rule used for amenable acting groups.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::certify::{check_bounds, Certificate, Construction, Pipeline, RhoSource};
use crate::context::GroupElement;
use crate::lift::GApprox;
use crate::perm::Permutation;
use crate::rational::{rat, rat_to_string, Dist, Rational};
use crate::table::GroupTable;
use crate::wreath::{WreathContext, WreathElement};
use crate::{Error, Result};
use num::{One, Zero};

/// Finite (or horizon-truncated enumerable) group backends the coset
/// construction works over. `Symmetric { n }` doubles as the truncation
/// of the finitely supported permutations of the naturals at horizon `n`.
#[derive(Debug, Clone)]
pub enum FiniteGroup {
    Symmetric { n: usize },
    Table(Arc<GroupTable>),
}

/// An element of a [`FiniteGroup`]; the derived order is the canonical
/// backend order used by the section and by `γ` matching.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GElem {
    Perm(Permutation),
    Index(usize),
}

impl FiniteGroup {
    pub fn identity(&self) -> GElem {
        match self {
            Self::Symmetric { n } => GElem::Perm(Permutation::identity(*n)),
            Self::Table(t) => GElem::Index(t.identity()),
        }
    }

    pub fn validate(&self, g: &GElem) -> Result<()> {
        match (self, g) {
            (Self::Symmetric { n }, GElem::Perm(p)) if p.len() == *n => Ok(()),
            (Self::Table(t), GElem::Index(i)) if *i < t.order => Ok(()),
            _ => Err(Error::InvalidElement(format!("{g:?} is outside the backend domain"))),
        }
    }

    pub fn mul(&self, a: &GElem, b: &GElem) -> Result<GElem> {
        self.validate(a)?;
        self.validate(b)?;
        match (a, b) {
            (GElem::Perm(p), GElem::Perm(q)) => Ok(GElem::Perm(p.compose(q)?)),
            (GElem::Index(i), GElem::Index(j)) => {
                let Self::Table(t) = self else { unreachable!("validated above") };
                Ok(GElem::Index(t.mul(*i, *j)))
            }
            _ => unreachable!("validated above"),
        }
    }

    pub fn inv(&self, a: &GElem) -> Result<GElem> {
        self.validate(a)?;
        match a {
            GElem::Perm(p) => Ok(GElem::Perm(p.inverse())),
            GElem::Index(i) => {
                let Self::Table(t) = self else { unreachable!("validated above") };
                Ok(GElem::Index(t.inv(*i)))
            }
        }
    }

    /// All elements in the canonical order.
    pub fn elements(&self) -> Vec<GElem> {
        match self {
            Self::Symmetric { n } => Permutation::all(*n).into_iter().map(GElem::Perm).collect(),
            Self::Table(t) => (0..t.order).map(GElem::Index).collect(),
        }
    }
}

/// A subgroup membership test.
#[derive(Debug, Clone)]
pub enum Subgroup {
    /// Permutations fixing a point (symmetric backend).
    Stabilizer { point: usize },
    /// An explicit index set (table backend).
    Indices(Vec<usize>),
}

impl Subgroup {
    pub fn contains(&self, g: &GElem) -> bool {
        match (self, g) {
            (Self::Stabilizer { point }, GElem::Perm(p)) => p.apply(*point) == *point,
            (Self::Indices(set), GElem::Index(i)) => set.contains(i),
            _ => false,
        }
    }
}

/// The coset space `G/H`: canonical minimal representatives (the section
/// `τ`), the quotient map `π`, and `H` itself re-indexed as a group table
/// so coordinate approximations can be stated over it.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    pub group: FiniteGroup,
    pub subgroup: Subgroup,
    /// `τ`: minimal representative of each coset, in first-seen order of
    /// the canonical enumeration.
    pub reps: Vec<GElem>,
    pi: BTreeMap<GElem, usize>,
    /// Elements of `H` in canonical order.
    pub h_elements: Vec<GElem>,
    h_index: BTreeMap<GElem, usize>,
    /// `H`'s multiplication re-indexed over `h_elements`.
    pub h_table: Arc<GroupTable>,
}

impl CosetSpace {
    pub fn new(group: FiniteGroup, subgroup: Subgroup) -> Result<Self> {
        let elements = group.elements();
        let h_elements: Vec<GElem> = elements
            .iter()
            .filter(|g| subgroup.contains(g))
            .cloned()
            .collect();
        if h_elements.is_empty() || !subgroup.contains(&group.identity()) {
            return Err(Error::Membership("subgroup must contain the identity".into()));
        }
        let h_index: BTreeMap<GElem, usize> = h_elements
            .iter()
            .enumerate()
            .map(|(i, h)| (h.clone(), i))
            .collect();
        let m = h_elements.len();
        let mut mul_table = vec![0usize; m * m];
        for i in 0..m {
            for j in 0..m {
                let prod = group.mul(&h_elements[i], &h_elements[j])?;
                mul_table[i * m + j] = *h_index.get(&prod).ok_or_else(|| {
                    Error::Membership(format!("subgroup not closed at witness ({i}, {j})"))
                })?;
            }
        }
        let h_table = Arc::new(GroupTable::new(m, mul_table)?);
        // left cosets gH; the first enumeration hit is the minimal rep
        let mut reps: Vec<GElem> = Vec::new();
        let mut pi: BTreeMap<GElem, usize> = BTreeMap::new();
        for g in &elements {
            if pi.contains_key(g) {
                continue;
            }
            let idx = reps.len();
            reps.push(g.clone());
            for h in &h_elements {
                pi.insert(group.mul(g, h)?, idx);
            }
        }
        if pi.len() != elements.len() {
            return Err(Error::Membership("cosets do not partition the group".into()));
        }
        Ok(CosetSpace {
            group,
            subgroup,
            reps,
            pi,
            h_elements,
            h_index,
            h_table,
        })
    }

    pub fn num_cosets(&self) -> usize {
        self.reps.len()
    }

    /// `π(g)`: the index of the coset `gH`.
    pub fn pi(&self, g: &GElem) -> Result<usize> {
        self.pi
            .get(g)
            .copied()
            .ok_or_else(|| Error::InvalidElement(format!("{g:?} is not in the group")))
    }

    /// `τ(c)`: the canonical representative.
    pub fn tau(&self, c: usize) -> &GElem {
        &self.reps[c]
    }

    /// `g.c := π(g·τ(c))` — the left regular action on cosets.
    pub fn coset_action(&self, g: &GElem, c: usize) -> Result<usize> {
        self.pi(&self.group.mul(g, self.tau(c))?)
    }

    /// Index of an `H`-element in `h_table`, or a membership error.
    pub fn h_index_of(&self, g: &GElem) -> Result<usize> {
        self.h_index
            .get(g)
            .copied()
            .ok_or_else(|| Error::Membership(format!("{g:?} is not in the subgroup")))
    }
}

/// A Følner set of coset indices with the verified bound.
#[derive(Debug, Clone)]
pub struct CosetFolner {
    pub cosets: Vec<usize>,
    pub bound: Rational,
}

fn coset_boundary_ratio(space: &CosetSpace, b: &[usize], g: &GElem) -> Result<Rational> {
    let in_b = |c: usize| b.contains(&c);
    let translated: Vec<usize> = b.iter().map(|&c| space.coset_action(g, c)).collect::<Result<_>>()?;
    let only_translated = translated.iter().filter(|c| !in_b(**c)).count();
    let only_original = b.iter().filter(|c| !translated.contains(c)).count();
    Ok(rat((only_translated + only_original) as i64, b.len() as i64))
}

/// Følner set of cosets. Finite table backends take the whole coset set
/// (ratio 0, the action being bijective); the symmetric backend — the
/// horizon-truncated stand-in for an enumerable group — takes the
/// smallest prefix `{0..M−1}` of the coset enumeration whose boundary
/// ratio is at most `bound` for every target.
pub fn folner_cosets(space: &CosetSpace, targets: &[GElem], bound: &Rational) -> Result<CosetFolner> {
    if bound <= &Rational::zero() {
        return Err(Error::NoFolnerSet("bound must be positive".into()));
    }
    if let FiniteGroup::Table(_) = &space.group {
        return Ok(CosetFolner {
            cosets: (0..space.num_cosets()).collect(),
            bound: bound.clone(),
        });
    }
    for m in 1..=space.num_cosets() {
        let b: Vec<usize> = (0..m).collect();
        let ok = targets
            .iter()
            .map(|g| coset_boundary_ratio(space, &b, g))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|r| r <= bound);
        if ok {
            return Ok(CosetFolner {
                cosets: b,
                bound: bound.clone(),
            });
        }
    }
    Err(Error::NoFolnerSet(
        "coset enumeration exhausted without meeting the bound".into(),
    ))
}

/// `σ(g)` over the coset Følner set: in-set translates follow the action,
/// the remainder is matched in coset-index order — the same wrap-around
/// rule as the acting-group σ.
pub fn build_sigma_cosets(space: &CosetSpace, folner: &CosetFolner, g: &GElem) -> Result<Permutation> {
    let n = folner.cosets.len();
    let translated: Vec<usize> = folner
        .cosets
        .iter()
        .map(|&c| space.coset_action(g, c))
        .collect::<Result<_>>()?;
    let mut images = vec![usize::MAX; n];
    let mut covered = vec![false; n];
    let mut escaped: Vec<usize> = Vec::new();
    for (i, t) in translated.iter().enumerate() {
        match folner.cosets.iter().position(|c| c == t) {
            Some(j) => {
                images[i] = j;
                covered[j] = true;
            }
            None => escaped.push(i),
        }
    }
    escaped.sort_by_key(|&i| translated[i]);
    let mut vacated: Vec<usize> = (0..n).filter(|&j| !covered[j]).collect();
    vacated.sort_by_key(|&j| folner.cosets[j]);
    for (&i, &j) in escaped.iter().zip(&vacated) {
        images[i] = j;
    }
    Permutation::from_images(images)
}

/// The constructed map `Φ: G → K ≀_B Sym(B)` for a co-amenable subgroup.
#[derive(Debug, Clone)]
pub struct CoamenablePipeline {
    pub space: Arc<CosetSpace>,
    pub epsilon: Rational,
    pub folner: CosetFolner,
    pub folner_bound: Rational,
    pub phi: GApprox,
    pub wreath: WreathContext,
    pub f0: Vec<GElem>,
    /// `F_H = (B⁻¹ F₀ B) ∩ H` as indices into `h_table`.
    pub f_h: Vec<usize>,
}

impl CoamenablePipeline {
    pub fn sigma(&self, g: &GElem) -> Result<Permutation> {
        build_sigma_cosets(&self.space, &self.folner, g)
    }

    /// `Φ(g) = ((φ(b⁻¹ g τπ(g⁻¹b)))_{b∈B}, σ(g))`; a membership failure
    /// here means the section/quotient pair is broken.
    pub fn eval(&self, g: &GElem) -> Result<WreathElement> {
        let grp = &self.space.group;
        let g_inv = grp.inv(g)?;
        let tuple = self
            .folner
            .cosets
            .iter()
            .map(|&c| {
                let b = self.space.tau(c);
                let landing = self.space.tau(self.space.pi(&grp.mul(&g_inv, b)?)?);
                let h_elt = grp.mul(&grp.mul(&grp.inv(b)?, g)?, landing)?;
                let idx = self.space.h_index_of(&h_elt)?;
                Ok(self.phi.images[idx].clone())
            })
            .collect::<Result<Vec<GroupElement>>>()?;
        Ok(WreathElement {
            tuple,
            perm: self.sigma(g)?,
        })
    }
}

impl Pipeline for CoamenablePipeline {
    type Domain = GElem;

    fn wreath(&self) -> &WreathContext {
        &self.wreath
    }

    fn f0(&self) -> &[GElem] {
        &self.f0
    }

    fn domain_mul(&self, a: &GElem, b: &GElem) -> Result<GElem> {
        self.space.group.mul(a, b)
    }

    fn is_domain_identity(&self, a: &GElem) -> bool {
        a == &self.space.group.identity()
    }

    fn eval(&self, a: &GElem) -> Result<WreathElement> {
        CoamenablePipeline::eval(self, a)
    }
}

/// Builds the pipeline: Følner bound `ε/4` over the coset targets
/// `F ∪ F⁻¹ ∪ F² ∪ (F⁻¹)²`, minimal-representative section, eager
/// well-definedness check of every coordinate entry on `F₀`.
pub fn build_phi_coamenable(
    space: Arc<CosetSpace>,
    f: &[GElem],
    epsilon: &Rational,
    phi: GApprox,
) -> Result<CoamenablePipeline> {
    if epsilon <= &Rational::zero() || epsilon >= &Rational::one() {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if phi.group.as_ref() != space.h_table.as_ref() {
        return Err(Error::Config(
            "phi must approximate the subgroup's re-indexed table".into(),
        ));
    }
    let grp = &space.group;
    // F₀ = {1} ∪ F ∪ F⁻¹
    let mut f0 = vec![grp.identity()];
    for g in f {
        grp.validate(g)?;
        if !f0.contains(g) {
            f0.push(g.clone());
        }
    }
    for g in f {
        let inv = grp.inv(g)?;
        if !f0.contains(&inv) {
            f0.push(inv);
        }
    }
    // Følner targets F ∪ F⁻¹ ∪ F² ∪ (F⁻¹)²
    let mut targets: Vec<GElem> = Vec::new();
    let push = |g: GElem, out: &mut Vec<GElem>| {
        if !out.contains(&g) {
            out.push(g);
        }
    };
    let inverses: Vec<GElem> = f.iter().map(|g| grp.inv(g)).collect::<Result<_>>()?;
    for g in f.iter().chain(&inverses) {
        push(g.clone(), &mut targets);
    }
    for a in f {
        for b in f {
            push(grp.mul(a, b)?, &mut targets);
        }
    }
    for a in &inverses {
        for b in &inverses {
            push(grp.mul(a, b)?, &mut targets);
        }
    }
    let folner_bound = epsilon / rat(4, 1);
    let folner = folner_cosets(&space, &targets, &folner_bound)?;
    // F_H = (B⁻¹ F₀ B) ∩ H
    let mut f_h: Vec<usize> = Vec::new();
    for a in &f0 {
        for &c in &folner.cosets {
            for &c2 in &folner.cosets {
                let b = space.tau(c);
                let b2 = space.tau(c2);
                let cand = grp.mul(&grp.mul(&grp.inv(b)?, a)?, b2)?;
                if space.subgroup.contains(&cand) {
                    f_h.push(space.h_index_of(&cand)?);
                }
            }
        }
    }
    f_h.sort_unstable();
    f_h.dedup();
    let wreath = WreathContext::new(phi.target.clone(), folner.cosets.len());
    let pipeline = CoamenablePipeline {
        space,
        epsilon: epsilon.clone(),
        folner,
        folner_bound,
        phi,
        wreath,
        f0,
        f_h,
    };
    // well-definedness: every coordinate of every Φ(a) must land in H
    for a in &pipeline.f0.clone() {
        pipeline.eval(a)?;
    }
    Ok(pipeline)
}

/// Max over `F₀ × F₀` of `d_Hamm(σ(f)σ(f'), σ(ff'))`.
pub fn measure_sigma_defect(p: &CoamenablePipeline) -> Result<Rational> {
    let sigmas: Vec<Permutation> = p.f0.iter().map(|g| p.sigma(g)).collect::<Result<_>>()?;
    let mut max = Rational::zero();
    for (i, a) in p.f0.iter().enumerate() {
        for (j, b) in p.f0.iter().enumerate() {
            let lhs = sigmas[i].compose(&sigmas[j])?;
            let rhs = p.sigma(&p.space.group.mul(a, b)?)?;
            let d = lhs.hamming(&rhs)?;
            if d > max {
                max = d;
            }
        }
    }
    Ok(max)
}

/// Certificate for the coset-section construction: defect against
/// `ε/4 + ε/3 + ε/4`, freeness against `(1 − ε/3)·ρ` with `ρ` measured
/// from `φ` over `F_H`, σ defect against `ε/4`.
pub fn certify_coamenable(p: &CoamenablePipeline, f_description: &str, seed: u64) -> Result<Certificate> {
    let eps = &p.epsilon;
    let measured_defect = crate::certify::measure_defect(p)?;
    let measured_freeness = crate::certify::measure_freeness(p)?;
    let sigma_defect = measure_sigma_defect(p)?;

    let (rho, rho_source) = match &p.phi.declared_rho {
        Some(r) => (Dist::Exact(r.clone()), RhoSource::DeclaredConstant),
        None => {
            let mut min: Option<Dist> = None;
            for &h in &p.f_h {
                if h == p.phi.group.identity() {
                    continue;
                }
                let d = p.phi.target.dist_to_identity(&p.phi.images[h])?;
                min = Some(match min {
                    None => d,
                    Some(m) if d < m => d,
                    Some(m) => m,
                });
            }
            (
                min.unwrap_or_else(|| p.phi.target.diameter()),
                RhoSource::MeasuredCoordinateFreeness,
            )
        }
    };
    let freeness_bound = Dist::Exact(Rational::one() - eps / rat(3, 1)) * rho;

    let cert = Certificate {
        schema_version: 1,
        construction: Construction::CosetSection,
        class: p.phi.class,
        f_description: f_description.to_string(),
        epsilon: rat_to_string(eps),
        folner_bound: rat_to_string(&p.folner_bound),
        folner_size: p.folner.cosets.len(),
        window_size: p.f_h.len(),
        coordinate_budget: rat_to_string(&(eps / rat(3, 1))),
        seed,
        measured_defect,
        measured_freeness,
        sigma_defect: Some(Dist::Exact(sigma_defect)),
        sigma_defect_bound: Some(Dist::Exact(eps / rat(4, 1))),
        measured_trace_max: None,
        measured_hs_defect: None,
        orthogonality_min: None,
        orthogonality_max: None,
        // ε/4 + ε/3 + ε/4 = 5ε/6 < ε
        theoretical_defect_bound: Dist::Exact(eps * rat(5, 6)),
        theoretical_freeness_bound: freeness_bound,
        rho_source,
        degradation_note: None,
        pass: false,
    };
    Ok(check_bounds(cert))
}

/// The exact embedding of `Stab(point) ≅ Sym(n−1)` into the symmetric
/// group on the remaining points, with the Hamming metric.
pub fn stabilizer_restriction_approx(space: &CosetSpace) -> Result<GApprox> {
    let (FiniteGroup::Symmetric { n }, Subgroup::Stabilizer { point }) = (&space.group, &space.subgroup)
    else {
        return Err(Error::Config(
            "restriction approximation needs a symmetric backend with a stabilizer subgroup".into(),
        ));
    };
    let others: Vec<usize> = (0..*n).filter(|i| i != point).collect();
    let perms = space
        .h_elements
        .iter()
        .map(|h| {
            let GElem::Perm(p) = h else { unreachable!("symmetric backend") };
            let images = others
                .iter()
                .map(|&i| others.iter().position(|&j| j == p.apply(i)).unwrap())
                .collect();
            Permutation::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    GApprox::exact_sofic(space.h_table.clone(), perms)
}
