//! The generic metric-group interface every pipeline consumes.
//!
//! Besides the four concrete carriers (symmetric, general linear over a
//! prime field, unitary, finite table group) this module provides the
//! product carriers the lift combiners target. Product carriers keep
//! elements as coordinate tuples and evaluate distances through exact
//! closed formulas for the corresponding big group (diagonal action on
//! `A^W`, regular representation of `G^W`, block-diagonal sums, tensor
//! products), since those groups are far too large to materialize.

use num::complex::Complex64;
use num::{One, Zero};
use rand::Rng;
use std::sync::Arc;

use crate::matrix::{hs_distance, rank_distance, ComplexMatrix, PrimeFieldMatrix};
use crate::perm::Permutation;
use crate::rational::{rat, Dist, Rational};
use crate::table::{GroupTable, TableGroup};
use crate::wreath::{WreathContext, WreathElement};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum MetricGroupContext {
    /// `Sym(n)` with the normalized Hamming distance.
    Symmetric { n: usize },
    /// `GL_n(F_p)` with the normalized rank distance.
    GeneralLinearPrime { n: usize, p: u64 },
    /// `U(n)` with the normalized Hilbert-Schmidt distance (diameter 2).
    Unitary { n: usize },
    /// A finite group with a validated bi-invariant metric.
    Table(Arc<TableGroup>),
    /// `Sym(n)^arity` acting diagonally on the product set `[n]^arity`,
    /// carrying the Hamming distance of that action.
    SymDiagonalProduct { n: usize, arity: usize },
    /// `K^arity` with the max-of-coordinates metric.
    MaxMetricProduct { base: Arc<TableGroup>, arity: usize },
    /// `G^arity` through its regular permutation representation, carrying
    /// the rank distance `1 - 1/ord(u v^{-1})`.
    RegularProduct { base: Arc<GroupTable>, arity: usize },
    /// `GL_n(F_p)^arity` as block-diagonal matrices, carrying the mean of
    /// the coordinate rank distances.
    BlockDiagProduct { n: usize, p: u64, arity: usize },
    /// `U(n)^arity` through tensor products, carrying the Hilbert-Schmidt
    /// distance computed from the product of coordinate traces.
    TensorProduct { n: usize, arity: usize },
    /// A permutational wreath product used as a carrier of its own right
    /// (the weakly sofic pipeline stops here).
    Wreath(Box<WreathContext>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Perm(Permutation),
    Mat(PrimeFieldMatrix),
    Uni(ComplexMatrix),
    Table(usize),
    Tuple(Vec<GroupElement>),
    Wreath(Box<WreathElement>),
}

impl MetricGroupContext {
    pub fn identity(&self) -> GroupElement {
        match self {
            Self::Symmetric { n } => GroupElement::Perm(Permutation::identity(*n)),
            Self::GeneralLinearPrime { n, p } => GroupElement::Mat(PrimeFieldMatrix::identity(*p, *n)),
            Self::Unitary { n } => GroupElement::Uni(ComplexMatrix::identity(*n)),
            Self::Table(tg) => GroupElement::Table(tg.group.identity()),
            Self::SymDiagonalProduct { n, arity } => {
                GroupElement::Tuple(vec![GroupElement::Perm(Permutation::identity(*n)); *arity])
            }
            Self::MaxMetricProduct { base, arity } => {
                GroupElement::Tuple(vec![GroupElement::Table(base.group.identity()); *arity])
            }
            Self::RegularProduct { base, arity } => {
                GroupElement::Tuple(vec![GroupElement::Table(base.identity()); *arity])
            }
            Self::BlockDiagProduct { n, p, arity } => {
                GroupElement::Tuple(vec![GroupElement::Mat(PrimeFieldMatrix::identity(*p, *n)); *arity])
            }
            Self::TensorProduct { n, arity } => {
                GroupElement::Tuple(vec![GroupElement::Uni(ComplexMatrix::identity(*n)); *arity])
            }
            Self::Wreath(ctx) => GroupElement::Wreath(Box::new(ctx.identity())),
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        match (self, a, b) {
            (Self::Symmetric { .. }, GroupElement::Perm(x), GroupElement::Perm(y)) => {
                Ok(GroupElement::Perm(x.compose(y)?))
            }
            (Self::GeneralLinearPrime { .. }, GroupElement::Mat(x), GroupElement::Mat(y)) => {
                Ok(GroupElement::Mat(x.mul(y)?))
            }
            (Self::Unitary { .. }, GroupElement::Uni(x), GroupElement::Uni(y)) => {
                Ok(GroupElement::Uni(x.mul(y)?))
            }
            (Self::Table(tg), GroupElement::Table(x), GroupElement::Table(y)) => {
                Ok(GroupElement::Table(tg.group.mul(*x, *y)))
            }
            (Self::Wreath(ctx), GroupElement::Wreath(x), GroupElement::Wreath(y)) => {
                Ok(GroupElement::Wreath(Box::new(ctx.mul(x, y)?)))
            }
            (Self::RegularProduct { base, .. }, GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                if xs.len() != ys.len() {
                    return Err(Error::Mismatch(format!(
                        "tuples of arities {} and {}",
                        xs.len(),
                        ys.len()
                    )));
                }
                let prod = xs
                    .iter()
                    .zip(ys)
                    .map(|(x, y)| match (x, y) {
                        (GroupElement::Table(a), GroupElement::Table(b)) => {
                            Ok(GroupElement::Table(base.mul(*a, *b)))
                        }
                        _ => Err(Error::InvalidElement("expected table coordinates".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Tuple(prod))
            }
            (_, GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                let coord = self.coordinate_context()?;
                if xs.len() != ys.len() {
                    return Err(Error::Mismatch(format!(
                        "tuples of arities {} and {}",
                        xs.len(),
                        ys.len()
                    )));
                }
                let prod = xs
                    .iter()
                    .zip(ys)
                    .map(|(x, y)| coord.mul(x, y))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Tuple(prod))
            }
            _ => Err(Error::InvalidElement(format!(
                "element kind does not match context {self:?}"
            ))),
        }
    }

    pub fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        match (self, a) {
            (Self::Symmetric { .. }, GroupElement::Perm(x)) => Ok(GroupElement::Perm(x.inverse())),
            (Self::GeneralLinearPrime { .. }, GroupElement::Mat(x)) => Ok(GroupElement::Mat(x.inverse()?)),
            (Self::Unitary { .. }, GroupElement::Uni(x)) => Ok(GroupElement::Uni(x.conj_transpose())),
            (Self::Table(tg), GroupElement::Table(x)) => Ok(GroupElement::Table(tg.group.inv(*x))),
            (Self::Wreath(ctx), GroupElement::Wreath(x)) => Ok(GroupElement::Wreath(Box::new(ctx.inv(x)?))),
            (Self::RegularProduct { base, .. }, GroupElement::Tuple(xs)) => {
                let inv = xs
                    .iter()
                    .map(|x| match x {
                        GroupElement::Table(a) => Ok(GroupElement::Table(base.inv(*a))),
                        _ => Err(Error::InvalidElement("expected table coordinates".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Tuple(inv))
            }
            (_, GroupElement::Tuple(xs)) => {
                let coord = self.coordinate_context()?;
                Ok(GroupElement::Tuple(
                    xs.iter().map(|x| coord.inv(x)).collect::<Result<Vec<_>>>()?,
                ))
            }
            _ => Err(Error::InvalidElement(format!(
                "element kind does not match context {self:?}"
            ))),
        }
    }

    /// The context governing a single coordinate of a product carrier.
    pub fn coordinate_context(&self) -> Result<MetricGroupContext> {
        match self {
            Self::SymDiagonalProduct { n, .. } => Ok(Self::Symmetric { n: *n }),
            Self::MaxMetricProduct { base, .. } => Ok(Self::Table(base.clone())),
            Self::RegularProduct { base, .. } => {
                // coordinate ops only need the bare group law; reuse Table
                // with a discrete metric view through dist() being unused here
                Ok(Self::RegularProduct {
                    base: base.clone(),
                    arity: 1,
                })
            }
            Self::BlockDiagProduct { n, p, .. } => Ok(Self::GeneralLinearPrime { n: *n, p: *p }),
            Self::TensorProduct { n, .. } => Ok(Self::Unitary { n: *n }),
            _ => Err(Error::InvalidElement(format!("{self:?} is not a product carrier"))),
        }
    }

    pub fn dist(&self, a: &GroupElement, b: &GroupElement) -> Result<Dist> {
        match (self, a, b) {
            (Self::Symmetric { .. }, GroupElement::Perm(x), GroupElement::Perm(y)) => {
                Ok(Dist::Exact(x.hamming(y)?))
            }
            (Self::GeneralLinearPrime { .. }, GroupElement::Mat(x), GroupElement::Mat(y)) => {
                Ok(Dist::Exact(rank_distance(x, y)?))
            }
            (Self::Unitary { .. }, GroupElement::Uni(x), GroupElement::Uni(y)) => {
                Ok(Dist::Approx(hs_distance(x, y)?))
            }
            (Self::Table(tg), GroupElement::Table(x), GroupElement::Table(y)) => {
                Ok(Dist::Exact(tg.dist(*x, *y).clone()))
            }
            (Self::Wreath(ctx), GroupElement::Wreath(x), GroupElement::Wreath(y)) => {
                ctx.tilde_distance(x, y)
            }
            (Self::SymDiagonalProduct { .. }, GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                // fraction of points of [n]^W fixed by the coordinatewise
                // comparison is the product of the per-coordinate fractions
                let mut agree = Rational::one();
                for (x, y) in xs.iter().zip(ys) {
                    let (GroupElement::Perm(px), GroupElement::Perm(py)) = (x, y) else {
                        return Err(Error::InvalidElement("expected permutation coordinates".into()));
                    };
                    agree *= Rational::one() - px.hamming(py)?;
                }
                Ok(Dist::Exact(Rational::one() - agree))
            }
            (Self::MaxMetricProduct { base, .. }, GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                let mut max = Rational::zero();
                for (x, y) in xs.iter().zip(ys) {
                    let (GroupElement::Table(tx), GroupElement::Table(ty)) = (x, y) else {
                        return Err(Error::InvalidElement("expected table coordinates".into()));
                    };
                    let d = base.dist(*tx, *ty);
                    if d > &max {
                        max = d.clone();
                    }
                }
                Ok(Dist::Exact(max))
            }
            (Self::RegularProduct { base, .. }, GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                // rank distance of the regular representation of G^W:
                // 1 - 1/ord(u v^{-1}); the translation by t decomposes the
                // group into |G^W|/ord(t) cycles of length ord(t)
                let mut ord: usize = 1;
                for (x, y) in xs.iter().zip(ys) {
                    let (GroupElement::Table(tx), GroupElement::Table(ty)) = (x, y) else {
                        return Err(Error::InvalidElement("expected table coordinates".into()));
                    };
                    let t = base.mul(*tx, base.inv(*ty));
                    ord = lcm(ord, base.element_order(t));
                }
                Ok(Dist::Exact(Rational::one() - rat(1, ord as i64)))
            }
            (Self::BlockDiagProduct { .. }, GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                if xs.is_empty() {
                    return Ok(Dist::zero());
                }
                let mut sum = Rational::zero();
                for (x, y) in xs.iter().zip(ys) {
                    let (GroupElement::Mat(mx), GroupElement::Mat(my)) = (x, y) else {
                        return Err(Error::InvalidElement("expected matrix coordinates".into()));
                    };
                    sum += rank_distance(mx, my)?;
                }
                Ok(Dist::Exact(sum / rat(xs.len() as i64, 1)))
            }
            (Self::TensorProduct { .. }, GroupElement::Tuple(xs), GroupElement::Tuple(ys)) => {
                // ‖⊗U − ⊗V‖₂² = 2 − 2·Re ∏ tr(U_w* V_w) for unitaries
                let t = tensor_inner_trace(xs, ys)?;
                Ok(Dist::Approx((2.0 - 2.0 * t.re).max(0.0).sqrt()))
            }
            _ => Err(Error::InvalidElement(format!(
                "element kinds do not match context {self:?}"
            ))),
        }
    }

    pub fn dist_to_identity(&self, a: &GroupElement) -> Result<Dist> {
        self.dist(a, &self.identity())
    }

    /// Diameter bound of the carrier class: 2 for unitary-valued carriers,
    /// 1 otherwise.
    pub fn diameter(&self) -> Dist {
        match self {
            Self::Unitary { .. } | Self::TensorProduct { .. } => Dist::Approx(2.0),
            Self::Wreath(ctx) => ctx.diameter(),
            _ => Dist::one(),
        }
    }

    /// Normalized trace, defined for unitary-valued carriers. For the
    /// tensor carrier the trace of the tensor product is the product of
    /// the coordinate traces.
    pub fn normalized_trace(&self, a: &GroupElement) -> Result<Complex64> {
        match (self, a) {
            (Self::Unitary { .. }, GroupElement::Uni(u)) => Ok(u.normalized_trace()),
            (Self::TensorProduct { .. }, GroupElement::Tuple(xs)) => {
                let mut t = Complex64::new(1.0, 0.0);
                for x in xs {
                    let GroupElement::Uni(u) = x else {
                        return Err(Error::InvalidElement("expected unitary coordinates".into()));
                    };
                    t *= u.normalized_trace();
                }
                Ok(t)
            }
            _ => Err(Error::InvalidElement(
                "normalized trace requires a unitary-valued carrier".into(),
            )),
        }
    }

    pub fn validate_element(&self, a: &GroupElement) -> Result<()> {
        match (self, a) {
            (Self::Symmetric { n }, GroupElement::Perm(x)) if x.len() == *n => Ok(()),
            (Self::GeneralLinearPrime { n, p }, GroupElement::Mat(m))
                if m.n == *n && m.p == *p && m.is_invertible() =>
            {
                Ok(())
            }
            (Self::Unitary { n }, GroupElement::Uni(u)) if u.n == *n => u.check_unitary(),
            (Self::Table(tg), GroupElement::Table(x)) if *x < tg.group.order => Ok(()),
            (Self::Wreath(ctx), GroupElement::Wreath(w)) => ctx.validate_element(w),
            (_, GroupElement::Tuple(xs)) => {
                let arity = match self {
                    Self::SymDiagonalProduct { arity, .. }
                    | Self::MaxMetricProduct { arity, .. }
                    | Self::RegularProduct { arity, .. }
                    | Self::BlockDiagProduct { arity, .. }
                    | Self::TensorProduct { arity, .. } => *arity,
                    _ => return Err(Error::InvalidElement("tuple in non-product context".into())),
                };
                if xs.len() != arity {
                    return Err(Error::InvalidElement(format!(
                        "tuple arity {} does not match context arity {arity}",
                        xs.len()
                    )));
                }
                let coord = self.coordinate_context()?;
                match &coord {
                    Self::RegularProduct { base, .. } => {
                        for x in xs {
                            let GroupElement::Table(t) = x else {
                                return Err(Error::InvalidElement("expected table coordinate".into()));
                            };
                            if *t >= base.order {
                                return Err(Error::InvalidElement("table index out of range".into()));
                            }
                        }
                        Ok(())
                    }
                    _ => xs.iter().try_for_each(|x| coord.validate_element(x)),
                }
            }
            _ => Err(Error::InvalidElement(format!(
                "element does not belong to context {self:?}"
            ))),
        }
    }

    /// Draws a random element, available for the concrete carriers and
    /// products over them.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Result<GroupElement> {
        match self {
            Self::Symmetric { n } => Ok(GroupElement::Perm(Permutation::random(*n, rng))),
            Self::GeneralLinearPrime { n, p } => {
                Ok(GroupElement::Mat(PrimeFieldMatrix::random_invertible(*p, *n, rng)))
            }
            Self::Unitary { n } => Ok(GroupElement::Uni(ComplexMatrix::random_unitary(*n, rng))),
            Self::Table(tg) => Ok(GroupElement::Table(rng.gen_range(0..tg.group.order))),
            Self::Wreath(ctx) => Ok(GroupElement::Wreath(Box::new(ctx.random_element(rng)?))),
            Self::RegularProduct { base, arity } => Ok(GroupElement::Tuple(
                (0..*arity)
                    .map(|_| GroupElement::Table(rng.gen_range(0..base.order)))
                    .collect(),
            )),
            _ => {
                let arity = match self {
                    Self::SymDiagonalProduct { arity, .. }
                    | Self::MaxMetricProduct { arity, .. }
                    | Self::BlockDiagProduct { arity, .. }
                    | Self::TensorProduct { arity, .. } => *arity,
                    _ => unreachable!(),
                };
                let coord = self.coordinate_context()?;
                Ok(GroupElement::Tuple(
                    (0..arity)
                        .map(|_| coord.random_element(rng))
                        .collect::<Result<Vec<_>>>()?,
                ))
            }
        }
    }

    /// Randomized bi-invariance assertion: `d(gx, gy) = d(x, y) = d(xg, yg)`,
    /// exact for rational carriers, within 1e-9 for unitary ones.
    pub fn spot_check_bi_invariance<R: Rng>(&self, rng: &mut R, trials: usize) -> Result<()> {
        for _ in 0..trials {
            let g = self.random_element(rng)?;
            let x = self.random_element(rng)?;
            let y = self.random_element(rng)?;
            let d = self.dist(&x, &y)?;
            let left = self.dist(&self.mul(&g, &x)?, &self.mul(&g, &y)?)?;
            let right = self.dist(&self.mul(&x, &g)?, &self.mul(&y, &g)?)?;
            let ok = match &d {
                Dist::Exact(_) => left == d && right == d,
                Dist::Approx(_) => left.abs_diff(&d) < 1e-9 && right.abs_diff(&d) < 1e-9,
            };
            if !ok {
                return Err(Error::InvalidMetric(format!(
                    "bi-invariance fails: d={:?} left={:?} right={:?}",
                    d, left, right
                )));
            }
        }
        Ok(())
    }
}

fn tensor_inner_trace(xs: &[GroupElement], ys: &[GroupElement]) -> Result<Complex64> {
    let mut t = Complex64::new(1.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (GroupElement::Uni(ux), GroupElement::Uni(uy)) = (x, y) else {
            return Err(Error::InvalidElement("expected unitary coordinates".into()));
        };
        t *= ux.conj_transpose().mul(uy)?.normalized_trace();
    }
    Ok(t)
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::cyclic_discrete;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_axioms_in_each_concrete_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let contexts = vec![
            MetricGroupContext::Symmetric { n: 4 },
            MetricGroupContext::GeneralLinearPrime { n: 2, p: 5 },
            MetricGroupContext::Unitary { n: 2 },
            MetricGroupContext::Table(Arc::new(cyclic_discrete(6))),
        ];
        for ctx in contexts {
            for _ in 0..10 {
                let a = ctx.random_element(&mut rng).unwrap();
                let prod = ctx.mul(&a, &ctx.inv(&a).unwrap()).unwrap();
                let d = ctx.dist(&prod, &ctx.identity()).unwrap();
                assert!(d.to_f64() < 1e-9, "a·a⁻¹ far from identity in {ctx:?}");
            }
        }
    }

    #[test]
    fn bi_invariance_spot_checks_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let contexts = vec![
            MetricGroupContext::Symmetric { n: 5 },
            MetricGroupContext::GeneralLinearPrime { n: 2, p: 5 },
            MetricGroupContext::Unitary { n: 3 },
            MetricGroupContext::Table(Arc::new(cyclic_discrete(5))),
            MetricGroupContext::SymDiagonalProduct { n: 3, arity: 3 },
            MetricGroupContext::MaxMetricProduct {
                base: Arc::new(cyclic_discrete(3)),
                arity: 2,
            },
            MetricGroupContext::RegularProduct {
                base: Arc::new(GroupTable::cyclic(4)),
                arity: 2,
            },
            MetricGroupContext::BlockDiagProduct { n: 2, p: 5, arity: 2 },
            MetricGroupContext::TensorProduct { n: 2, arity: 2 },
        ];
        for ctx in contexts {
            ctx.spot_check_bi_invariance(&mut rng, 30).unwrap();
        }
    }

    #[test]
    fn sym_diagonal_product_matches_materialized_action() {
        // oracle: build the actual permutation of [n]^arity and compare
        let ctx = MetricGroupContext::SymDiagonalProduct { n: 2, arity: 3 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: usize = 8;
        let materialize = |xs: &[GroupElement]| {
            let mut images = vec![0usize; points];
            for (pt, img) in images.iter_mut().enumerate() {
                let mut out = 0;
                for (w, x) in xs.iter().enumerate() {
                    let GroupElement::Perm(p) = x else { unreachable!() };
                    let digit = (pt >> w) & 1;
                    out |= p.apply(digit) << w;
                }
                *img = out;
            }
            Permutation::from_images(images).unwrap()
        };
        for _ in 0..50 {
            let (a, b) = (ctx.random_element(&mut rng).unwrap(), ctx.random_element(&mut rng).unwrap());
            let (GroupElement::Tuple(xs), GroupElement::Tuple(ys)) = (&a, &b) else {
                unreachable!()
            };
            let expected = materialize(xs).hamming(&materialize(ys)).unwrap();
            assert_eq!(ctx.dist(&a, &b).unwrap(), Dist::Exact(expected));
        }
    }

    #[test]
    fn regular_product_matches_rank_oracle() {
        // oracle: materialize the regular permutation representation of
        // Z/4 x Z/4 as F_2 permutation matrices and take the true rank
        let base = Arc::new(GroupTable::cyclic(4));
        let ctx = MetricGroupContext::RegularProduct {
            base: base.clone(),
            arity: 2,
        };
        let order = 16usize;
        let idx = |a: usize, b: usize| a * 4 + b;
        let translation = |a: usize, b: usize| {
            let images = (0..order)
                .map(|e| idx(base.mul(a, e / 4), base.mul(b, e % 4)))
                .collect();
            Permutation::from_images(images).unwrap()
        };
        for a in 0..4 {
            for b in 0..4 {
                let t = GroupElement::Tuple(vec![GroupElement::Table(a), GroupElement::Table(b)]);
                let d = ctx.dist(&t, &ctx.identity()).unwrap();
                let pm = PrimeFieldMatrix::from_permutation(&translation(a, b), 2);
                let expected = rank_distance(&pm, &PrimeFieldMatrix::identity(2, order)).unwrap();
                assert_eq!(d, Dist::Exact(expected));
            }
        }
    }

    #[test]
    fn tensor_product_matches_materialized_kronecker() {
        let ctx = MetricGroupContext::TensorProduct { n: 2, arity: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let kron = |a: &ComplexMatrix, b: &ComplexMatrix| {
            let n = a.n * b.n;
            let mut m = ComplexMatrix::zero(n);
            for i in 0..a.n {
                for j in 0..a.n {
                    for k in 0..b.n {
                        for l in 0..b.n {
                            m.set(i * b.n + k, j * b.n + l, a.get(i, j) * b.get(k, l));
                        }
                    }
                }
            }
            m
        };
        for _ in 0..30 {
            let a = ctx.random_element(&mut rng).unwrap();
            let b = ctx.random_element(&mut rng).unwrap();
            let (GroupElement::Tuple(xs), GroupElement::Tuple(ys)) = (&a, &b) else {
                unreachable!()
            };
            let (GroupElement::Uni(x0), GroupElement::Uni(x1)) = (&xs[0], &xs[1]) else {
                unreachable!()
            };
            let (GroupElement::Uni(y0), GroupElement::Uni(y1)) = (&ys[0], &ys[1]) else {
                unreachable!()
            };
            let expected = hs_distance(&kron(x0, x1), &kron(y0, y1)).unwrap();
            assert!(ctx.dist(&a, &b).unwrap().abs_diff(&Dist::Approx(expected)) < 1e-9);
        }
    }

    #[test]
    fn empty_product_is_the_trivial_group() {
        let ctx = MetricGroupContext::SymDiagonalProduct { n: 2, arity: 0 };
        let e = ctx.identity();
        assert!(ctx.dist(&e, &e).unwrap().is_zero());
    }
}
