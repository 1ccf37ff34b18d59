//! The permutational wreath product `K ≀_B Sym(B)` with its bi-invariant
//! metric: the Hamming term of the top permutation plus the averaged base
//! distances over agreeing indices. The unitary-valued variant scales the
//! second summand by 1/2 so the diameter stays 1.

use rand::Rng;

use crate::context::{GroupElement, MetricGroupContext};
use crate::perm::Permutation;
use crate::rational::{rat, Dist, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct WreathContext {
    pub base: MetricGroupContext,
    pub b_size: usize,
    /// 1 for diameter-1 bases, 1/2 for unitary-valued bases (diameter 2).
    pub scale: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WreathElement {
    /// Base entries indexed by the positions of `B`.
    pub tuple: Vec<GroupElement>,
    /// Permutation of the positions of `B`.
    pub perm: Permutation,
}

impl WreathContext {
    pub fn new(base: MetricGroupContext, b_size: usize) -> Self {
        let scale = match &base {
            MetricGroupContext::Unitary { .. } | MetricGroupContext::TensorProduct { .. } => rat(1, 2),
            _ => rat(1, 1),
        };
        WreathContext { base, b_size, scale }
    }

    pub fn identity(&self) -> WreathElement {
        WreathElement {
            tuple: vec![self.base.identity(); self.b_size],
            perm: Permutation::identity(self.b_size),
        }
    }

    pub fn element(&self, tuple: Vec<GroupElement>, perm: Permutation) -> Result<WreathElement> {
        let e = WreathElement { tuple, perm };
        self.validate_element(&e)?;
        Ok(e)
    }

    pub fn validate_element(&self, e: &WreathElement) -> Result<()> {
        if e.tuple.len() != self.b_size || e.perm.len() != self.b_size {
            return Err(Error::Mismatch(format!(
                "wreath element over |B|={} in context with |B|={}",
                e.tuple.len(),
                self.b_size
            )));
        }
        e.tuple.iter().try_for_each(|x| self.base.validate_element(x))
    }

    /// `(x, τ)(y, ρ) = (x · (τ·y), τ∘ρ)` with `(τ·y)_b = y_{τ⁻¹(b)}`.
    pub fn mul(&self, a: &WreathElement, b: &WreathElement) -> Result<WreathElement> {
        if a.tuple.len() != self.b_size || b.tuple.len() != self.b_size {
            return Err(Error::Mismatch("wreath element size".into()));
        }
        let tau_inv = a.perm.inverse();
        let tuple = (0..self.b_size)
            .map(|i| self.base.mul(&a.tuple[i], &b.tuple[tau_inv.apply(i)]))
            .collect::<Result<Vec<_>>>()?;
        Ok(WreathElement {
            tuple,
            perm: a.perm.compose(&b.perm)?,
        })
    }

    pub fn inv(&self, a: &WreathElement) -> Result<WreathElement> {
        // (x, τ)⁻¹ = (τ⁻¹·x⁻¹, τ⁻¹): entry at b is x_{τ(b)}⁻¹
        let tuple = (0..self.b_size)
            .map(|i| self.base.inv(&a.tuple[a.perm.apply(i)]))
            .collect::<Result<Vec<_>>>()?;
        Ok(WreathElement {
            tuple,
            perm: a.perm.inverse(),
        })
    }

    /// `d̃((x,τ),(y,ρ)) = d_Hamm(τ,ρ) + scale·(1/|B|)·Σ_{τ(b)=ρ(b)} d(x_{τ(b)}, y_{τ(b)})`.
    pub fn tilde_distance(&self, a: &WreathElement, b: &WreathElement) -> Result<Dist> {
        if a.tuple.len() != self.b_size || b.tuple.len() != self.b_size {
            return Err(Error::Mismatch("wreath element size".into()));
        }
        let hamm = Dist::Exact(a.perm.hamming(&b.perm)?);
        let mut base_sum = Dist::zero();
        for i in 0..self.b_size {
            let ti = a.perm.apply(i);
            if ti == b.perm.apply(i) {
                base_sum = base_sum + self.base.dist(&a.tuple[ti], &b.tuple[ti])?;
            }
        }
        let factor = &self.scale / rat(self.b_size as i64, 1);
        Ok(hamm + base_sum.scale(&factor))
    }

    pub fn dist_to_identity(&self, a: &WreathElement) -> Result<Dist> {
        self.tilde_distance(a, &self.identity())
    }

    pub fn diameter(&self) -> Dist {
        Dist::one()
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Result<WreathElement> {
        let tuple = (0..self.b_size)
            .map(|_| self.base.random_element(rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(WreathElement {
            tuple,
            perm: Permutation::random(self.b_size, rng),
        })
    }

    /// All elements, for exhaustive small-case checks. Requires an
    /// enumerable base.
    pub fn all_elements(&self) -> Result<Vec<WreathElement>> {
        let base_elems = enumerate_base(&self.base)?;
        let mut tuples: Vec<Vec<GroupElement>> = vec![vec![]];
        for _ in 0..self.b_size {
            let mut next = Vec::new();
            for t in &tuples {
                for e in &base_elems {
                    let mut t2 = t.clone();
                    t2.push(e.clone());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        let perms = Permutation::all(self.b_size);
        let mut out = Vec::with_capacity(tuples.len() * perms.len());
        for t in &tuples {
            for p in &perms {
                out.push(WreathElement {
                    tuple: t.clone(),
                    perm: p.clone(),
                });
            }
        }
        Ok(out)
    }
}

fn enumerate_base(base: &MetricGroupContext) -> Result<Vec<GroupElement>> {
    match base {
        MetricGroupContext::Symmetric { n } => {
            Ok(Permutation::all(*n).into_iter().map(GroupElement::Perm).collect())
        }
        MetricGroupContext::Table(tg) => Ok((0..tg.group.order).map(GroupElement::Table).collect()),
        MetricGroupContext::GeneralLinearPrime { n, p } => {
            // only sensible for tiny parameters
            let total = (p.pow((*n * *n) as u32)) as usize;
            let mut out = Vec::new();
            for code in 0..total {
                let mut entries = Vec::with_capacity(n * n);
                let mut c = code as u64;
                for _ in 0..n * n {
                    entries.push(c % p);
                    c /= p;
                }
                let m = crate::matrix::PrimeFieldMatrix::new(*p, *n, entries)?;
                if m.is_invertible() {
                    out.push(GroupElement::Mat(m));
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidElement(format!("cannot enumerate base {base:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym2_wreath2() -> WreathContext {
        WreathContext::new(MetricGroupContext::Symmetric { n: 2 }, 2)
    }

    #[test]
    fn identity_is_neutral() {
        let ctx = sym2_wreath2();
        let e = ctx.identity();
        assert_eq!(ctx.mul(&e, &e).unwrap(), e);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            let x = ctx.random_element(&mut rng).unwrap();
            assert_eq!(ctx.mul(&e, &x).unwrap(), x);
            assert_eq!(ctx.mul(&x, &e).unwrap(), x);
        }
    }

    #[test]
    fn action_shifts_base_entries() {
        // ((id,id), swap)·((s,id), id): the nontrivial entry moves to slot 1
        let ctx = sym2_wreath2();
        let s = GroupElement::Perm(Permutation::from_images(vec![1, 0]).unwrap());
        let id2 = GroupElement::Perm(Permutation::identity(2));
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        let a = ctx.element(vec![id2.clone(), id2.clone()], swap.clone()).unwrap();
        let b = ctx
            .element(vec![s.clone(), id2.clone()], Permutation::identity(2))
            .unwrap();
        let prod = ctx.mul(&a, &b).unwrap();
        assert_eq!(prod.perm, swap);
        assert_eq!(prod.tuple, vec![id2, s]);
    }

    #[test]
    fn associativity_on_random_triples() {
        let ctx = WreathContext::new(MetricGroupContext::Symmetric { n: 3 }, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let a = ctx.random_element(&mut rng).unwrap();
            let b = ctx.random_element(&mut rng).unwrap();
            let c = ctx.random_element(&mut rng).unwrap();
            let ab_c = ctx.mul(&ctx.mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = ctx.mul(&a, &ctx.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
        }
    }

    #[test]
    fn inverse_on_random_elements() {
        let ctx = WreathContext::new(MetricGroupContext::Symmetric { n: 3 }, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a = ctx.random_element(&mut rng).unwrap();
            let prod = ctx.mul(&a, &ctx.inv(&a).unwrap()).unwrap();
            assert_eq!(prod, ctx.identity());
        }
    }

    #[test]
    fn tilde_distance_examples() {
        let ctx = sym2_wreath2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = ctx.random_element(&mut rng).unwrap();
        assert!(ctx.tilde_distance(&x, &x).unwrap().is_zero());

        // τ=swap vs ρ=id: pure Hamming term 1, no agreeing indices
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        let a = WreathElement {
            tuple: x.tuple.clone(),
            perm: swap,
        };
        let b = WreathElement {
            tuple: ctx.random_element(&mut rng).unwrap().tuple,
            perm: Permutation::identity(2),
        };
        assert_eq!(ctx.tilde_distance(&a, &b).unwrap(), Dist::one());

        // τ=ρ=id: averaged base distances
        let s = GroupElement::Perm(Permutation::from_images(vec![1, 0]).unwrap());
        let id2 = GroupElement::Perm(Permutation::identity(2));
        let c = ctx.element(vec![s, id2.clone()], Permutation::identity(2)).unwrap();
        let e = ctx.identity();
        // d₀ = 1, d₁ = 0 → (1+0)/2
        assert_eq!(ctx.tilde_distance(&c, &e).unwrap(), Dist::Exact(rat(1, 2)));
    }

    #[test]
    fn exhaustive_metric_axioms_and_bi_invariance() {
        // Sym(2)-base, |B|=2: all axioms and both invariances, exactly
        let ctx = sym2_wreath2();
        let all = ctx.all_elements().unwrap();
        assert_eq!(all.len(), 8);
        let mut max = Dist::zero();
        for x in &all {
            for y in &all {
                let d = ctx.tilde_distance(x, y).unwrap();
                assert_eq!(d, ctx.tilde_distance(y, x).unwrap());
                assert_eq!(d.is_zero(), x == y);
                if d > max {
                    max = d.clone();
                }
                for g in &all {
                    let left = ctx
                        .tilde_distance(&ctx.mul(g, x).unwrap(), &ctx.mul(g, y).unwrap())
                        .unwrap();
                    let right = ctx
                        .tilde_distance(&ctx.mul(x, g).unwrap(), &ctx.mul(y, g).unwrap())
                        .unwrap();
                    assert_eq!(left, d);
                    assert_eq!(right, d);
                    // triangle through g
                    let through = ctx.tilde_distance(x, g).unwrap() + ctx.tilde_distance(g, y).unwrap();
                    assert!(d <= through);
                }
            }
        }
        // diam(K ≀_B Sym(B)) = 1 exactly
        assert_eq!(max, Dist::one());
    }
}
