//! The metric-controlling homomorphisms `ψ` from `K ≀_B Sym(B)` into a
//! single group of the target class: permutations of a product set for
//! the sofic case, block matrices for the linear sofic and hyperlinear
//! cases, plus the closed block-trace formula.

use num::complex::Complex64;

use crate::context::{GroupElement, MetricGroupContext};
use crate::matrix::{ComplexMatrix, PrimeFieldMatrix};
use crate::perm::Permutation;
use crate::wreath::{WreathContext, WreathElement};
use crate::{Error, Result};

/// `ψ(α, β)(a, b) = (α_{β(b)}(a), β(b))` as a permutation of `A×B`,
/// row-major indexed `(a, b) ↦ a·|B| + b`.
pub fn psi_sym(ctx: &WreathContext, e: &WreathElement) -> Result<Permutation> {
    let MetricGroupContext::Symmetric { n: a_size } = ctx.base else {
        return Err(Error::Mismatch("psi_sym requires a symmetric base".into()));
    };
    ctx.validate_element(e)?;
    let b_size = ctx.b_size;
    let mut images = vec![0usize; a_size * b_size];
    for b in 0..b_size {
        let bb = e.perm.apply(b);
        let GroupElement::Perm(alpha) = &e.tuple[bb] else {
            return Err(Error::InvalidElement("expected permutation entries".into()));
        };
        for a in 0..a_size {
            images[a * b_size + b] = alpha.apply(a) * b_size + bb;
        }
    }
    Permutation::from_images(images)
}

/// Block matrix with `U_{τ(b)}` at block `(τ(b), b)` and 0 elsewhere,
/// blocks laid out row-major.
pub fn psi_lin(ctx: &WreathContext, e: &WreathElement) -> Result<PrimeFieldMatrix> {
    let MetricGroupContext::GeneralLinearPrime { n, p } = ctx.base else {
        return Err(Error::Mismatch("psi_lin requires a general linear base".into()));
    };
    ctx.validate_element(e)?;
    let b_size = ctx.b_size;
    let total = b_size * n;
    let mut out = PrimeFieldMatrix::zero(p, total);
    for b in 0..b_size {
        let tb = e.perm.apply(b);
        let GroupElement::Mat(u) = &e.tuple[tb] else {
            return Err(Error::InvalidElement("expected matrix entries".into()));
        };
        for i in 0..n {
            for j in 0..n {
                out.set(tb * n + i, b * n + j, u.get(i, j));
            }
        }
    }
    Ok(out)
}

/// Same block formula over unitaries; the result is verified unitary.
pub fn psi_uni(ctx: &WreathContext, e: &WreathElement) -> Result<ComplexMatrix> {
    let MetricGroupContext::Unitary { n } = ctx.base else {
        return Err(Error::Mismatch("psi_uni requires a unitary base".into()));
    };
    ctx.validate_element(e)?;
    let b_size = ctx.b_size;
    let total = b_size * n;
    let mut out = ComplexMatrix::zero(total);
    for b in 0..b_size {
        let tb = e.perm.apply(b);
        let GroupElement::Uni(u) = &e.tuple[tb] else {
            return Err(Error::InvalidElement("expected unitary entries".into()));
        };
        for i in 0..n {
            for j in 0..n {
                out.set(tb * n + i, b * n + j, u.get(i, j));
            }
        }
    }
    out.check_unitary()?;
    Ok(out)
}

/// `tr ψ((U_b), τ) = (1/|B|) Σ_{τ(b)=b} tr(U_b)`: only the blocks at
/// fixed points of `τ` land on the diagonal. Works for any base with a
/// normalized trace (unitary or tensor-product), so the hyperlinear
/// pipeline can evaluate traces without materializing `ψ`.
pub fn psi_block_trace(ctx: &WreathContext, e: &WreathElement) -> Result<Complex64> {
    ctx.validate_element(e)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for b in 0..ctx.b_size {
        if e.perm.apply(b) == b {
            sum += ctx.base.normalized_trace(&e.tuple[b])?;
        }
    }
    Ok(sum / ctx.b_size as f64)
}

/// Hilbert-Schmidt distance between `ψ`-images computed without
/// materializing them: `ψ` is a homomorphism, so
/// `‖ψ(x) − ψ(y)‖₂² = 2 − 2·Re tr(ψ(x⁻¹ y))`.
pub fn psi_hs_distance(ctx: &WreathContext, x: &WreathElement, y: &WreathElement) -> Result<f64> {
    let rel = ctx.mul(&ctx.inv(x)?, y)?;
    let t = psi_block_trace(ctx, &rel)?;
    Ok((2.0 - 2.0 * t.re).max(0.0).sqrt())
}

/// `‖ψ(U, τ)‖₂² = (1/|B|) Σ ‖U_b‖₂²`, evaluated from the base entries.
pub fn psi_hs_norm_sq(ctx: &WreathContext, e: &WreathElement) -> Result<f64> {
    let mut sum = 0.0;
    for x in &e.tuple {
        let GroupElement::Uni(u) = x else {
            return Err(Error::InvalidElement("expected unitary entries".into()));
        };
        let n = u.hs_norm();
        sum += n * n;
    }
    Ok(sum / ctx.b_size as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{hs_distance, rank_distance};
    use crate::rational::{rat, Dist};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psi_sym_reduces_to_base_for_singleton_b() {
        let ctx = WreathContext::new(MetricGroupContext::Symmetric { n: 3 }, 1);
        let alpha = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let e = ctx
            .element(vec![GroupElement::Perm(alpha.clone())], Permutation::identity(1))
            .unwrap();
        assert_eq!(psi_sym(&ctx, &e).unwrap(), alpha);
        assert!(psi_sym(&ctx, &ctx.identity()).unwrap().is_identity());
    }

    #[test]
    fn psi_sym_exhaustive_isometry_and_homomorphism() {
        let ctx = WreathContext::new(MetricGroupContext::Symmetric { n: 2 }, 2);
        let all = ctx.all_elements().unwrap();
        assert_eq!(all.len(), 8);
        for x in &all {
            for y in &all {
                let dh = psi_sym(&ctx, x)
                    .unwrap()
                    .hamming(&psi_sym(&ctx, y).unwrap())
                    .unwrap();
                assert_eq!(Dist::Exact(dh), ctx.tilde_distance(x, y).unwrap());
                let lhs = psi_sym(&ctx, &ctx.mul(x, y).unwrap()).unwrap();
                let rhs = psi_sym(&ctx, x).unwrap().compose(&psi_sym(&ctx, y).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn psi_lin_rank_bounds_attained() {
        // lower bound: n=1, p=5, U=(1,1) with swap vs identity top perm
        let ctx = WreathContext::new(MetricGroupContext::GeneralLinearPrime { n: 1, p: 5 }, 2);
        let one = GroupElement::Mat(PrimeFieldMatrix::identity(5, 1));
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        let a = ctx.element(vec![one.clone(), one.clone()], swap).unwrap();
        let b = ctx.identity();
        assert_eq!(ctx.tilde_distance(&a, &b).unwrap(), Dist::Exact(rat(1, 1)));
        let dr = rank_distance(&psi_lin(&ctx, &a).unwrap(), &psi_lin(&ctx, &b).unwrap()).unwrap();
        assert_eq!(dr, rat(1, 2));

        // upper bound: diagonal tuples (2,2) vs (1,1)
        let two = GroupElement::Mat(PrimeFieldMatrix::new(5, 1, vec![2]).unwrap());
        let a = ctx
            .element(vec![two.clone(), two.clone()], Permutation::identity(2))
            .unwrap();
        assert_eq!(ctx.tilde_distance(&a, &b).unwrap(), Dist::Exact(rat(1, 1)));
        let dr = rank_distance(&psi_lin(&ctx, &a).unwrap(), &psi_lin(&ctx, &b).unwrap()).unwrap();
        assert_eq!(dr, rat(1, 1));
    }

    #[test]
    fn psi_lin_homomorphism_and_sandwich_random() {
        let ctx = WreathContext::new(MetricGroupContext::GeneralLinearPrime { n: 2, p: 5 }, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let x = ctx.random_element(&mut rng).unwrap();
            let y = ctx.random_element(&mut rng).unwrap();
            let lhs = psi_lin(&ctx, &ctx.mul(&x, &y).unwrap()).unwrap();
            let rhs = psi_lin(&ctx, &x).unwrap().mul(&psi_lin(&ctx, &y).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let dt = ctx.tilde_distance(&x, &y).unwrap();
            let Dist::Exact(dt) = dt else { unreachable!() };
            let dr = rank_distance(&psi_lin(&ctx, &x).unwrap(), &psi_lin(&ctx, &y).unwrap()).unwrap();
            assert!(&dt / rat(2, 1) <= dr && dr <= dt);
        }
    }

    #[test]
    fn psi_uni_norm_identity_and_sandwich() {
        let ctx = WreathContext::new(MetricGroupContext::Unitary { n: 2 }, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = ctx.random_element(&mut rng).unwrap();
            let y = ctx.random_element(&mut rng).unwrap();
            let px = psi_uni(&ctx, &x).unwrap();
            let py = psi_uni(&ctx, &y).unwrap();
            // ‖ψ(U,τ)‖₂² = (1/|B|)Σ‖U_b‖₂²
            let direct = px.hs_norm();
            assert!((direct * direct - psi_hs_norm_sq(&ctx, &x).unwrap()).abs() < 1e-9);
            let dt = ctx.tilde_distance(&x, &y).unwrap().to_f64();
            let dhs = hs_distance(&px, &py).unwrap();
            assert!(dt <= dhs + 1e-9);
            assert!(dhs <= 2.0 * dt.sqrt() + 1e-9);
        }
    }

    #[test]
    fn block_trace_matches_direct_trace() {
        let ctx = WreathContext::new(MetricGroupContext::Unitary { n: 2 }, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let x = ctx.random_element(&mut rng).unwrap();
            let direct = psi_uni(&ctx, &x).unwrap().normalized_trace();
            let formula = psi_block_trace(&ctx, &x).unwrap();
            assert!((direct - formula).norm() < 1e-9);
        }
    }

    #[test]
    fn psi_hs_distance_matches_materialized() {
        let ctx = WreathContext::new(MetricGroupContext::Unitary { n: 2 }, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let x = ctx.random_element(&mut rng).unwrap();
            let y = ctx.random_element(&mut rng).unwrap();
            let direct = hs_distance(&psi_uni(&ctx, &x).unwrap(), &psi_uni(&ctx, &y).unwrap()).unwrap();
            let virt = psi_hs_distance(&ctx, &x, &y).unwrap();
            assert!((direct - virt).abs() < 1e-9);
        }
    }

    #[test]
    fn fixed_point_free_top_permutation_has_zero_trace() {
        let ctx = WreathContext::new(MetricGroupContext::Unitary { n: 2 }, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut x = ctx.random_element(&mut rng).unwrap();
        x.perm = Permutation::from_images(vec![1, 2, 0]).unwrap();
        assert!(psi_block_trace(&ctx, &x).unwrap().norm() < 1e-12);
    }
}
