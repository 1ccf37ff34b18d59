//! Elements of `G ≀≀ H` with finitely supported coordinate functions, the
//! shift action, the coordinate window, class-specific approximations of
//! `∏_H G`, and the lift `Φ` into `K ≀_B Sym(B)`.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

use crate::amenable::{build_sigma, folner_for, AmenableGroup, FolnerSet, HElement};
use crate::context::{GroupElement, MetricGroupContext};
use crate::matrix::{ComplexMatrix, PrimeFieldMatrix};
use crate::perm::Permutation;
use crate::rational::{rat, Dist, Rational};
use crate::table::{GroupTable, TableGroup};
use crate::wreath::{WreathContext, WreathElement};
use crate::{Error, Result};
use num::complex::Complex64;
use num::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxClass {
    WeaklySofic,
    Sofic,
    LinearSofic,
    Hyperlinear,
}

/// An element `(f, h)` of `G ≀≀ H` with `f` finitely supported; support
/// entries are sorted, distinct, and never map to the identity of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UWPElement {
    pub support: Vec<(HElement, usize)>,
    pub h: HElement,
}

/// The pair `(G, H)` an unrestricted wreath product is built from;
/// `G` is a finite table group, `H` one of the amenable backends.
#[derive(Debug, Clone)]
pub struct UwpGroup {
    pub g: Arc<GroupTable>,
    pub h: AmenableGroup,
}

impl UwpGroup {
    pub fn identity(&self) -> UWPElement {
        UWPElement {
            support: vec![],
            h: self.h.identity(),
        }
    }

    pub fn element(&self, support: Vec<(HElement, usize)>, h: HElement) -> Result<UWPElement> {
        self.h.validate(&h)?;
        let mut support: Vec<(HElement, usize)> = support
            .into_iter()
            .filter(|(_, g)| *g != self.g.identity())
            .collect();
        for (pos, g) in &support {
            self.h.validate(pos)?;
            if *g >= self.g.order {
                return Err(Error::InvalidElement(format!("G index {g} out of range")));
            }
        }
        support.sort_by(|a, b| a.0.cmp(&b.0));
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidElement("duplicate support entries".into()));
        }
        Ok(UWPElement { support, h })
    }

    /// `(θ_h f)(h̃) = f(h·h̃)`: the support moves to `h⁻¹·supp(f)`.
    pub fn shift_theta(&self, h: &HElement, support: &[(HElement, usize)]) -> Result<Vec<(HElement, usize)>> {
        let h_inv = self.h.inv(h)?;
        let mut out = support
            .iter()
            .map(|(pos, g)| Ok((self.h.mul(&h_inv, pos)?, *g)))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// `(x, h)(x', h') = (x·θ_h(x'), hh')`, identity-valued entries pruned.
    pub fn mul(&self, a: &UWPElement, b: &UWPElement) -> Result<UWPElement> {
        let shifted = self.shift_theta(&a.h, &b.support)?;
        let mut merged: Vec<(HElement, usize)> = Vec::with_capacity(a.support.len() + shifted.len());
        let (mut i, mut j) = (0, 0);
        while i < a.support.len() || j < shifted.len() {
            let take_a = j >= shifted.len()
                || (i < a.support.len() && a.support[i].0 <= shifted[j].0);
            let take_b = i >= a.support.len()
                || (j < shifted.len() && shifted[j].0 <= a.support[i].0);
            if take_a && take_b {
                let g = self.g.mul(a.support[i].1, shifted[j].1);
                if g != self.g.identity() {
                    merged.push((a.support[i].0.clone(), g));
                }
                i += 1;
                j += 1;
            } else if take_a {
                merged.push(a.support[i].clone());
                i += 1;
            } else {
                merged.push(shifted[j].clone());
                j += 1;
            }
        }
        Ok(UWPElement {
            support: merged,
            h: self.h.mul(&a.h, &b.h)?,
        })
    }

    pub fn inv(&self, a: &UWPElement) -> Result<UWPElement> {
        let inverted: Vec<(HElement, usize)> = a
            .support
            .iter()
            .map(|(pos, g)| (pos.clone(), self.g.inv(*g)))
            .collect();
        Ok(UWPElement {
            support: self.shift_theta(&self.h.inv(&a.h)?, &inverted)?,
            h: self.h.inv(&a.h)?,
        })
    }

    /// `F₀ := F ∪ {1} ∪ F⁻¹`, deduplicated, identity first.
    pub fn closure_f0(&self, f: &[UWPElement]) -> Result<Vec<UWPElement>> {
        let mut out = vec![self.identity()];
        let push = |e: UWPElement, out: &mut Vec<UWPElement>| {
            if !out.contains(&e) {
                out.push(e);
            }
        };
        for e in f {
            push(e.clone(), &mut out);
        }
        for e in f {
            push(self.inv(e)?, &mut out);
        }
        Ok(out)
    }
}

/// A metric approximation of the coordinate group `G`: evaluation into a
/// concrete carrier plus the class metadata the combiners need.
#[derive(Debug, Clone)]
pub struct GApprox {
    pub group: Arc<GroupTable>,
    pub target: MetricGroupContext,
    pub images: Vec<GroupElement>,
    pub class: ApproxClass,
    /// True when the map is an exact embedding (defect 0).
    pub exact_homomorphism: bool,
    /// True for regular-representation embeddings, which unlock the exact
    /// linear sofic combiner.
    pub regular_representation: bool,
    /// Optional theoretical freeness constant; certificates fall back to
    /// the measured coordinate freeness when absent.
    pub declared_rho: Option<Rational>,
}

impl GApprox {
    fn validate(self) -> Result<Self> {
        if self.images.len() != self.group.order {
            return Err(Error::Mismatch("one image per group element required".into()));
        }
        let id_img = &self.images[self.group.identity()];
        if !self
            .target
            .dist(id_img, &self.target.identity())?
            .is_zero()
        {
            return Err(Error::InvalidElement("approximation must map 1 to 1".into()));
        }
        Ok(self)
    }

    /// Left-regular permutation action of a finite group: the exact sofic
    /// embedding with freeness 1.
    pub fn cayley(group: Arc<GroupTable>) -> Result<Self> {
        let n = group.order;
        let images = (0..n)
            .map(|g| {
                let images = (0..n).map(|x| group.mul(g, x)).collect();
                Ok(GroupElement::Perm(Permutation::from_images(images)?))
            })
            .collect::<Result<Vec<_>>>()?;
        GApprox {
            group,
            target: MetricGroupContext::Symmetric { n },
            images,
            class: ApproxClass::Sofic,
            exact_homomorphism: true,
            regular_representation: true,
            declared_rho: None,
        }
        .validate()
    }

    /// Identity embedding of a metric table group into itself.
    pub fn table_identity(tg: Arc<TableGroup>) -> Result<Self> {
        let group = Arc::new(tg.group.clone());
        let images = (0..group.order).map(GroupElement::Table).collect();
        GApprox {
            group,
            target: MetricGroupContext::Table(tg),
            images,
            class: ApproxClass::WeaklySofic,
            exact_homomorphism: true,
            regular_representation: false,
            declared_rho: None,
        }
        .validate()
    }

    /// An arbitrary exact embedding into a symmetric group, verified to be
    /// a homomorphism over all of `G × G`.
    pub fn exact_sofic(group: Arc<GroupTable>, perms: Vec<Permutation>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::Mismatch("no images provided".into()));
        }
        let n = perms[0].len();
        if perms.iter().any(|p| p.len() != n) {
            return Err(Error::Mismatch("images must act on a common set".into()));
        }
        if perms.len() != group.order {
            return Err(Error::Mismatch("one image per group element required".into()));
        }
        for a in 0..group.order {
            for b in 0..group.order {
                if perms[a].compose(&perms[b])? != perms[group.mul(a, b)] {
                    return Err(Error::InvalidElement(format!(
                        "images do not form a homomorphism at witness ({a}, {b})"
                    )));
                }
            }
        }
        GApprox {
            group,
            target: MetricGroupContext::Symmetric { n },
            images: perms.into_iter().map(GroupElement::Perm).collect(),
            class: ApproxClass::Sofic,
            exact_homomorphism: true,
            regular_representation: false,
            declared_rho: None,
        }
        .validate()
    }

    /// Left-regular representation by permutation matrices over `F_p`.
    pub fn regular_linear(group: Arc<GroupTable>, p: u64) -> Result<Self> {
        let n = group.order;
        let images = (0..n)
            .map(|g| {
                let images = (0..n).map(|x| group.mul(g, x)).collect();
                Ok(GroupElement::Mat(PrimeFieldMatrix::from_permutation(
                    &Permutation::from_images(images)?,
                    p,
                )))
            })
            .collect::<Result<Vec<_>>>()?;
        GApprox {
            group,
            target: MetricGroupContext::GeneralLinearPrime { n, p },
            images,
            class: ApproxClass::LinearSofic,
            exact_homomorphism: true,
            regular_representation: true,
            declared_rho: None,
        }
        .validate()
    }

    /// Diagonalized regular representation of `Z/n`: `k ↦ diag(ω^{jk})`.
    /// Exact and trace-preserving: every nontrivial image has trace 0.
    pub fn unitary_diag_cyclic(n: usize) -> Result<Self> {
        let group = Arc::new(GroupTable::cyclic(n));
        let images = (0..n)
            .map(|k| {
                let diag: Vec<Complex64> = (0..n)
                    .map(|j| {
                        let angle = 2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64;
                        Complex64::new(angle.cos(), angle.sin())
                    })
                    .collect();
                GroupElement::Uni(ComplexMatrix::diagonal(&diag))
            })
            .collect();
        GApprox {
            group,
            target: MetricGroupContext::Unitary { n },
            images,
            class: ApproxClass::Hyperlinear,
            exact_homomorphism: true,
            regular_representation: true,
            declared_rho: None,
        }
        .validate()
    }

    /// Measured coordinate freeness: min over `g ≠ 1` of the distance from
    /// `φ(g)` to the identity, in the metric the combiner will use.
    pub fn measured_freeness(&self, for_regular_combiner: bool) -> Result<Dist> {
        let mut min: Option<Dist> = None;
        for g in 0..self.group.order {
            if g == self.group.identity() {
                continue;
            }
            let d = if for_regular_combiner {
                Dist::Exact(Rational::one() - rat(1, self.group.element_order(g) as i64))
            } else {
                self.target.dist_to_identity(&self.images[g])?
            };
            min = Some(match min {
                None => d,
                Some(m) if d < m => d,
                Some(m) => m,
            });
        }
        Ok(min.unwrap_or_else(|| self.target.diameter()))
    }

    /// Measured multiplicativity defect over all of `G × G`.
    pub fn measured_defect(&self) -> Result<Dist> {
        let mut max = Dist::zero();
        for a in 0..self.group.order {
            for b in 0..self.group.order {
                let lhs = self.target.mul(&self.images[a], &self.images[b])?;
                let rhs = &self.images[self.group.mul(a, b)];
                let d = self.target.dist(&lhs, rhs)?;
                if d > max {
                    max = d;
                }
            }
        }
        Ok(max)
    }
}

/// How the coordinate approximation is combined over the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinerKind {
    DiagonalAction,
    MaxMetricProduct,
    RegularRepresentation,
    BlockDiagonal,
    TensorProduct,
}

/// The approximation of `∏_H G` restricted to a finite window `W`:
/// evaluation lands in a single product carrier.
#[derive(Debug, Clone)]
pub struct ProductApprox {
    pub window: Vec<HElement>,
    pub coord: GApprox,
    pub target: MetricGroupContext,
    pub combiner: CombinerKind,
    /// Per-coordinate multiplicativity budget `ε'_coord` documented in
    /// certificates.
    pub budget: Rational,
}

impl ProductApprox {
    /// Evaluates a finitely supported map: coordinates are read off on the
    /// window (identity outside the support) and sent through the
    /// coordinate approximation. Restriction to `W` is itself a group
    /// homomorphism `∏_H G → G^W`.
    pub fn eval_support(&self, support: &[(HElement, usize)]) -> Result<GroupElement> {
        let lookup: HashMap<&HElement, usize> = support.iter().map(|(p, g)| (p, *g)).collect();
        let coords = self
            .window
            .iter()
            .map(|w| {
                let g = lookup.get(w).copied().unwrap_or(self.coord.group.identity());
                Ok(match self.combiner {
                    CombinerKind::RegularRepresentation => GroupElement::Table(g),
                    _ => self.coord.images[g].clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupElement::Tuple(coords))
    }

    /// Freeness floor of the combined map: the coordinate freeness, divided
    /// by `|W|` for the block-diagonal combiner (only one block needs to be
    /// nontrivial there).
    pub fn freeness_floor(&self) -> Result<Dist> {
        let coord = self
            .coord
            .measured_freeness(self.combiner == CombinerKind::RegularRepresentation)?;
        if self.combiner == CombinerKind::BlockDiagonal && !self.window.is_empty() {
            Ok(coord.scale(&rat(1, self.window.len() as i64)))
        } else {
            Ok(coord)
        }
    }
}

/// `W = ∪_{b∈B, (x,h)∈F₀} supp(θ_{b⁻¹}(x))`, deduplicated and ordered:
/// the coordinates the product approximation must see.
pub fn support_window(uwp: &UwpGroup, f0: &[UWPElement], b: &FolnerSet) -> Result<Vec<HElement>> {
    let mut window: Vec<HElement> = Vec::new();
    for e in f0 {
        for pos in &b.elements {
            let shifted = uwp.shift_theta(&uwp.h.inv(pos)?, &e.support)?;
            for (w, _) in shifted {
                window.push(w);
            }
        }
    }
    window.sort();
    window.dedup();
    Ok(window)
}

/// Builds the class-appropriate combined approximation of `∏_H G` on a
/// window.
pub fn combine_product_approx(
    class: ApproxClass,
    coord: GApprox,
    window: Vec<HElement>,
    budget: Rational,
) -> Result<ProductApprox> {
    if coord.class != class {
        return Err(Error::Config(format!(
            "coordinate approximation class {:?} does not match pipeline class {class:?}",
            coord.class
        )));
    }
    let arity = window.len();
    let (target, combiner) = match (class, &coord.target) {
        (ApproxClass::Sofic, MetricGroupContext::Symmetric { n }) => (
            MetricGroupContext::SymDiagonalProduct { n: *n, arity },
            CombinerKind::DiagonalAction,
        ),
        (ApproxClass::WeaklySofic, MetricGroupContext::Table(tg)) => (
            MetricGroupContext::MaxMetricProduct {
                base: tg.clone(),
                arity,
            },
            CombinerKind::MaxMetricProduct,
        ),
        (ApproxClass::LinearSofic, MetricGroupContext::GeneralLinearPrime { n, p }) => {
            if coord.regular_representation && coord.exact_homomorphism {
                (
                    MetricGroupContext::RegularProduct {
                        base: coord.group.clone(),
                        arity,
                    },
                    CombinerKind::RegularRepresentation,
                )
            } else {
                (
                    MetricGroupContext::BlockDiagProduct { n: *n, p: *p, arity },
                    CombinerKind::BlockDiagonal,
                )
            }
        }
        (ApproxClass::Hyperlinear, MetricGroupContext::Unitary { n }) => (
            MetricGroupContext::TensorProduct { n: *n, arity },
            CombinerKind::TensorProduct,
        ),
        _ => {
            return Err(Error::Config(format!(
                "coordinate target {:?} incompatible with class {class:?}",
                coord.target
            )))
        }
    };
    Ok(ProductApprox {
        window,
        coord,
        target,
        combiner,
        budget,
    })
}

/// The constructed lift `Φ: G ≀≀ H → K ≀_B Sym(B)` together with every
/// ingredient a certificate reports.
#[derive(Debug, Clone)]
pub struct LiftedApprox {
    pub uwp: UwpGroup,
    pub class: ApproxClass,
    pub epsilon: Rational,
    pub folner_bound: Rational,
    pub folner: FolnerSet,
    pub product: ProductApprox,
    pub wreath: WreathContext,
    pub f0: Vec<UWPElement>,
}

impl LiftedApprox {
    pub fn sigma(&self, h: &HElement) -> Result<Permutation> {
        build_sigma(&self.uwp.h, &self.folner, h)
    }

    /// `Φ(x, h) = ((φ θ_{b⁻¹}(x))_{b∈B}, σ(h))`.
    pub fn eval(&self, e: &UWPElement) -> Result<WreathElement> {
        let tuple = self
            .folner
            .elements
            .iter()
            .map(|b| {
                let shifted = self.uwp.shift_theta(&self.uwp.h.inv(b)?, &e.support)?;
                self.product.eval_support(&shifted)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WreathElement {
            tuple,
            perm: self.sigma(&e.h)?,
        })
    }
}

fn check_epsilon(epsilon: &Rational, inclusive_one: bool) -> Result<()> {
    let too_big = if inclusive_one {
        epsilon > &Rational::one()
    } else {
        epsilon >= &Rational::one()
    };
    if epsilon <= &Rational::zero() || too_big {
        let range = if inclusive_one { "(0, 1]" } else { "(0, 1)" };
        return Err(Error::Config(format!(
            "epsilon must lie in {range}, got {epsilon}"
        )));
    }
    Ok(())
}

fn build_phi_inner(
    uwp: &UwpGroup,
    f: &[UWPElement],
    epsilon: &Rational,
    coord: GApprox,
    folner_bound: Rational,
    coordinate_budget: Rational,
) -> Result<LiftedApprox> {
    let class = coord.class;
    let f0 = uwp.closure_f0(f)?;
    // F_H = proj_H(F₀), then F_H² for the Følner condition
    let mut f_h: Vec<HElement> = f0.iter().map(|e| e.h.clone()).collect();
    f_h.sort();
    f_h.dedup();
    let mut f_h2: Vec<HElement> = Vec::new();
    for a in &f_h {
        for b in &f_h {
            f_h2.push(uwp.h.mul(a, b)?);
        }
    }
    f_h2.sort();
    f_h2.dedup();
    let folner = folner_for(&uwp.h, &f_h2, &folner_bound)?;
    let window = support_window(uwp, &f0, &folner)?;
    let product = combine_product_approx(class, coord, window, coordinate_budget)?;
    let wreath = WreathContext::new(product.target.clone(), folner.len());
    Ok(LiftedApprox {
        uwp: uwp.clone(),
        class,
        epsilon: epsilon.clone(),
        folner_bound,
        folner,
        product,
        wreath,
        f0,
    })
}

/// The lift for the weakly sofic, sofic, and linear sofic pipelines (ε ∈ (0, 1]):
/// Følner bound `ε/6`, coordinate budget `ε/3`.
pub fn build_phi(uwp: &UwpGroup, f: &[UWPElement], epsilon: &Rational, coord: GApprox) -> Result<LiftedApprox> {
    check_epsilon(epsilon, true)?;
    if coord.class == ApproxClass::Hyperlinear {
        return Err(Error::Config(
            "hyperlinear pipelines must use build_phi_hyperlinear".into(),
        ));
    }
    build_phi_inner(
        uwp,
        f,
        epsilon,
        coord,
        epsilon / rat(6, 1),
        epsilon / rat(3, 1),
    )
}

/// The hyperlinear variant: Følner bound `ε²/24`, coordinate budget
/// `ε²/12`, target wreath metric scaled by 1/2.
pub fn build_phi_hyperlinear(
    uwp: &UwpGroup,
    f: &[UWPElement],
    epsilon: &Rational,
    coord: GApprox,
) -> Result<LiftedApprox> {
    check_epsilon(epsilon, false)?;
    if coord.class != ApproxClass::Hyperlinear {
        return Err(Error::Config("coordinate approximation must be hyperlinear".into()));
    }
    let eps_sq = epsilon * epsilon;
    build_phi_inner(
        uwp,
        f,
        epsilon,
        coord,
        &eps_sq / rat(24, 1),
        &eps_sq / rat(12, 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lamplighter() -> UwpGroup {
        UwpGroup {
            g: Arc::new(GroupTable::cyclic(2)),
            h: AmenableGroup::IntegerLine,
        }
    }

    fn delta0(uwp: &UwpGroup, h: i64) -> UWPElement {
        uwp.element(vec![(HElement::Int(0), 1)], HElement::Int(h)).unwrap()
    }

    #[test]
    fn shift_examples() {
        let uwp = lamplighter();
        let f = vec![(HElement::Int(0), 1)];
        assert_eq!(uwp.shift_theta(&HElement::Int(0), &f).unwrap(), f);
        assert_eq!(
            uwp.shift_theta(&HElement::Int(1), &f).unwrap(),
            vec![(HElement::Int(-1), 1)]
        );
    }

    #[test]
    fn shift_is_an_action() {
        let uwp = lamplighter();
        let f = vec![(HElement::Int(-2), 1), (HElement::Int(3), 1)];
        for a in -5..5i64 {
            for b in -5..5i64 {
                let two_step = uwp
                    .shift_theta(&HElement::Int(a), &uwp.shift_theta(&HElement::Int(b), &f).unwrap())
                    .unwrap();
                let one_step = uwp.shift_theta(&HElement::Int(a + b), &f).unwrap();
                assert_eq!(two_step, one_step);
            }
        }
    }

    #[test]
    fn lamp_toggles_off() {
        let uwp = lamplighter();
        let a = delta0(&uwp, 0);
        let prod = uwp.mul(&a, &a).unwrap();
        assert_eq!(prod, uwp.identity());
    }

    #[test]
    fn walking_lamplighter_leaves_a_trail() {
        // (δ₀, 1)·(δ₀, 1) = (δ₀ + δ₁, 2): θ₁(δ₀) is supported at −1... the
        // product support works out to {0, 1} after the shift by h = 1
        let uwp = lamplighter();
        let a = delta0(&uwp, 1);
        let prod = uwp.mul(&a, &a).unwrap();
        assert_eq!(prod.h, HElement::Int(2));
        assert_eq!(
            prod.support,
            vec![(HElement::Int(-1), 1), (HElement::Int(0), 1)]
        );
    }

    #[test]
    fn identity_laws_and_inverses() {
        let uwp = lamplighter();
        let a = delta0(&uwp, 1);
        assert_eq!(uwp.mul(&uwp.identity(), &a).unwrap(), a);
        assert_eq!(uwp.mul(&a, &uwp.identity()).unwrap(), a);
        assert_eq!(uwp.mul(&a, &uwp.inv(&a).unwrap()).unwrap(), uwp.identity());
        assert_eq!(uwp.mul(&uwp.inv(&a).unwrap(), &a).unwrap(), uwp.identity());
    }

    #[test]
    fn exhaustive_semidirect_law_small_supports() {
        // all lamplighter elements with support in {-2..2} and h in {-2..2}
        let uwp = lamplighter();
        let mut elems = Vec::new();
        for mask in 0u32..32 {
            for h in -2..=2i64 {
                let support: Vec<(HElement, usize)> = (0..5)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| (HElement::Int(i as i64 - 2), 1))
                    .collect();
                elems.push(uwp.element(support, HElement::Int(h)).unwrap());
            }
        }
        // associativity on a deterministic sample of triples
        for (i, a) in elems.iter().enumerate().step_by(13) {
            for (j, b) in elems.iter().enumerate().step_by(17) {
                for c in elems.iter().skip((i + j) % 7).step_by(29) {
                    let ab_c = uwp.mul(&uwp.mul(a, b).unwrap(), c).unwrap();
                    let a_bc = uwp.mul(a, &uwp.mul(b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc);
                }
            }
        }
        for a in &elems {
            let inv = uwp.inv(a).unwrap();
            assert_eq!(uwp.mul(a, &inv).unwrap(), uwp.identity());
        }
    }

    #[test]
    fn f0_contains_identity_and_inverses() {
        let uwp = lamplighter();
        let f = vec![delta0(&uwp, 0), delta0(&uwp, 1)];
        let f0 = uwp.closure_f0(&f).unwrap();
        assert_eq!(f0[0], uwp.identity());
        for e in &f {
            assert!(f0.contains(e));
            assert!(f0.contains(&uwp.inv(e).unwrap()));
        }
        // (δ₀, 0) is self-inverse, so F₀ has 1 + 2 + 1 elements
        assert_eq!(f0.len(), 4);
    }

    #[test]
    fn window_covers_all_shifted_supports() {
        let uwp = lamplighter();
        let f0 = vec![uwp.identity(), delta0(&uwp, 0)];
        let folner = FolnerSet {
            elements: (0..5).map(HElement::Int).collect(),
            for_set: vec![],
            bound: rat(1, 1),
        };
        let w = support_window(&uwp, &f0, &folner).unwrap();
        // supp(θ_{b⁻¹}(δ₀)) = {b}
        assert_eq!(w, (0..5).map(HElement::Int).collect::<Vec<_>>());
        // symmetric F gives the same window as F ∪ F⁻¹
        let with_inv = uwp.closure_f0(&[delta0(&uwp, 0)]).unwrap();
        assert_eq!(support_window(&uwp, &with_inv, &folner).unwrap(), w);
    }

    #[test]
    fn empty_support_gives_empty_window() {
        let uwp = lamplighter();
        let f0 = vec![uwp.element(vec![], HElement::Int(3)).unwrap()];
        let folner = FolnerSet {
            elements: (0..4).map(HElement::Int).collect(),
            for_set: vec![],
            bound: rat(1, 1),
        };
        assert!(support_window(&uwp, &f0, &folner).unwrap().is_empty());
    }

    #[test]
    fn phi_maps_identity_to_identity() {
        let uwp = lamplighter();
        let f = vec![delta0(&uwp, 0), uwp.element(vec![], HElement::Int(1)).unwrap()];
        let coord = GApprox::cayley(uwp.g.clone()).unwrap();
        let lifted = build_phi(&uwp, &f, &rat(1, 2), coord).unwrap();
        let img = lifted.eval(&uwp.identity()).unwrap();
        assert_eq!(img, lifted.wreath.identity());
    }

    #[test]
    fn phi_top_permutation_is_sigma() {
        let uwp = lamplighter();
        let f = vec![delta0(&uwp, 1)];
        let coord = GApprox::cayley(uwp.g.clone()).unwrap();
        let lifted = build_phi(&uwp, &f, &rat(1, 2), coord).unwrap();
        for e in &lifted.f0.clone() {
            let img = lifted.eval(e).unwrap();
            assert_eq!(img.perm, lifted.sigma(&e.h).unwrap());
        }
    }

    #[test]
    fn tensor_trace_of_combined_coordinates() {
        // coordinate traces (0, 1, 1) → tensor trace 0
        let coord = GApprox::unitary_diag_cyclic(2).unwrap();
        let product = combine_product_approx(
            ApproxClass::Hyperlinear,
            coord,
            vec![HElement::Int(0), HElement::Int(1), HElement::Int(2)],
            rat(1, 12),
        )
        .unwrap();
        let v = product.eval_support(&[(HElement::Int(0), 1)]).unwrap();
        let t = product.target.normalized_trace(&v).unwrap();
        assert!(t.norm() < 1e-12);
    }

    #[test]
    fn hyperlinear_constants_and_scale() {
        let uwp = lamplighter();
        let f = vec![delta0(&uwp, 1)];
        let coord = GApprox::unitary_diag_cyclic(2).unwrap();
        let lifted = build_phi_hyperlinear(&uwp, &f, &rat(1, 2), coord).unwrap();
        assert_eq!(lifted.folner_bound, rat(1, 96));
        assert_eq!(lifted.product.budget, rat(1, 48));
        assert_eq!(lifted.wreath.scale, rat(1, 2));
    }

    #[test]
    fn epsilon_must_be_in_unit_interval() {
        let uwp = lamplighter();
        let coord = GApprox::cayley(uwp.g.clone()).unwrap();
        assert!(build_phi(&uwp, &[], &rat(0, 1), coord.clone()).is_err());
        assert!(build_phi(&uwp, &[], &rat(3, 2), coord).is_err());
    }
}
