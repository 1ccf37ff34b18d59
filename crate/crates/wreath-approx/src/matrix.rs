//! Matrix carriers: `GL_n(F_p)` with the exact rank metric and unitary
//! matrices with the normalized Hilbert-Schmidt metric.

use num::complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::perm::Permutation;
use crate::rational::{rat, Rational};
use crate::{Error, Result};

/// Max-entry deviation allowed for `U·U*` from the identity.
pub const UNITARY_TOL: f64 = 1e-9;

/// A square matrix over the prime field `F_p`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeFieldMatrix {
    pub p: u64,
    pub n: usize,
    pub entries: Vec<u64>,
}

impl PrimeFieldMatrix {
    pub fn new(p: u64, n: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Mismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e >= p) {
            return Err(Error::InvalidElement(format!("entry not reduced mod {p}")));
        }
        Ok(PrimeFieldMatrix { p, n, entries })
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        PrimeFieldMatrix { p, n, entries }
    }

    pub fn zero(p: u64, n: usize) -> Self {
        PrimeFieldMatrix {
            p,
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.n + j] = v % self.p;
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.n != other.n {
            return Err(Error::Mismatch(format!(
                "matrices over F_{}^{} and F_{}^{}",
                self.p, self.n, other.p, other.n
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (n, p) = (self.n, self.p);
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] = (entries[i * n + j] + a * other.get(k, j)) % p;
                }
            }
        }
        Ok(PrimeFieldMatrix { p, n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let p = self.p;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        Ok(PrimeFieldMatrix { p, n: self.n, entries })
    }

    /// Rank by forward Gaussian elimination.
    pub fn rank(&self) -> usize {
        let (n, p) = (self.n, self.p);
        let mut m = self.entries.clone();
        let mut rank = 0;
        for col in 0..n {
            let pivot = (rank..n).find(|&r| m[r * n + col] != 0);
            let Some(pr) = pivot else { continue };
            for j in 0..n {
                m.swap(rank * n + j, pr * n + j);
            }
            let inv = mod_inverse(m[rank * n + col], p);
            for j in 0..n {
                m[rank * n + j] = m[rank * n + j] * inv % p;
            }
            for r in 0..n {
                if r != rank && m[r * n + col] != 0 {
                    let f = m[r * n + col];
                    for j in 0..n {
                        m[r * n + j] = (m[r * n + j] + (p - f) * m[rank * n + j]) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn inverse(&self) -> Result<Self> {
        let (n, p) = (self.n, self.p);
        // Gauss-Jordan on [A | I]
        let w = 2 * n;
        let mut m = vec![0u64; n * w];
        for i in 0..n {
            for j in 0..n {
                m[i * w + j] = self.get(i, j);
            }
            m[i * w + n + i] = 1;
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| m[r * w + col] != 0).ok_or(Error::Singular(p))?;
            for j in 0..w {
                m.swap(col * w + j, pivot * w + j);
            }
            let inv = mod_inverse(m[col * w + col], p);
            for j in 0..w {
                m[col * w + j] = m[col * w + j] * inv % p;
            }
            for r in 0..n {
                if r != col && m[r * w + col] != 0 {
                    let f = m[r * w + col];
                    for j in 0..w {
                        m[r * w + j] = (m[r * w + j] + (p - f) * m[col * w + j]) % p;
                    }
                }
            }
        }
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = m[i * w + n + j];
            }
        }
        Ok(PrimeFieldMatrix { p, n, entries })
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn from_permutation(perm: &Permutation, p: u64) -> Self {
        let n = perm.len();
        let mut m = Self::zero(p, n);
        for i in 0..n {
            // column i carries e_{perm(i)}
            m.set(perm.apply(i), i, 1);
        }
        m
    }

    pub fn random_invertible<R: Rng>(p: u64, n: usize, rng: &mut R) -> Self {
        loop {
            let entries = (0..n * n).map(|_| rng.gen_range(0..p)).collect();
            let m = PrimeFieldMatrix { p, n, entries };
            if m.is_invertible() {
                return m;
            }
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid; p prime, a != 0 mod p
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_s.rem_euclid(p as i128)) as u64
}

/// `rank(A - B) / n`, exact.
pub fn rank_distance(a: &PrimeFieldMatrix, b: &PrimeFieldMatrix) -> Result<Rational> {
    let diff = a.sub(b)?;
    Ok(rat(diff.rank() as i64, a.n as i64))
}

/// A square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub n: usize,
    pub entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Mismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(ComplexMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        ComplexMatrix {
            n,
            entries: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n + j] = v;
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Mismatch(format!(
                "complex matrices of sizes {} and {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(ComplexMatrix { n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix { n: self.n, entries })
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j).conj();
            }
        }
        ComplexMatrix { n, entries }
    }

    /// Normalized Hilbert-Schmidt norm `sqrt((1/n) Σ |a_ij|^2)`.
    pub fn hs_norm(&self) -> f64 {
        let sum: f64 = self.entries.iter().map(|e| e.norm_sqr()).sum();
        (sum / self.n as f64).sqrt()
    }

    /// `(1/n) Σ a_ii`.
    pub fn normalized_trace(&self) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t / self.n as f64
    }

    /// Max-entry deviation of `U·U*` from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        let prod = self.mul(&self.conj_transpose()).expect("same size");
        let id = ComplexMatrix::identity(self.n);
        prod.entries
            .iter()
            .zip(&id.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_deviation() <= UNITARY_TOL
    }

    pub fn check_unitary(&self) -> Result<()> {
        let dev = self.unitary_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(())
    }

    pub fn from_permutation(perm: &Permutation) -> Self {
        let n = perm.len();
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(perm.apply(i), i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Haar-ish random unitary: orthonormalize a complex Gaussian matrix.
    pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> Self {
        loop {
            let cols: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let re: f64 = rng.sample(StandardNormal);
                            let im: f64 = rng.sample(StandardNormal);
                            Complex64::new(re, im)
                        })
                        .collect()
                })
                .collect();
            if let Some(q) = gram_schmidt(&cols) {
                let mut m = Self::zero(n);
                for (j, col) in q.iter().enumerate() {
                    for (i, &v) in col.iter().enumerate() {
                        m.set(i, j, v);
                    }
                }
                debug_assert!(m.is_unitary());
                return m;
            }
        }
    }
}

fn gram_schmidt(cols: &[Vec<Complex64>]) -> Option<Vec<Vec<Complex64>>> {
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
    for col in cols {
        let mut v = col.clone();
        // two passes of classical Gram-Schmidt for numerical stability
        for _ in 0..2 {
            for u in &q {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm: f64 = v.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        q.push(v);
    }
    Some(q)
}

/// `‖U - V‖_2` in the normalized Hilbert-Schmidt norm.
pub fn hs_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    Ok(u.sub(v)?.hs_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modular_product_example() {
        let p = 5;
        let a = PrimeFieldMatrix::new(p, 2, vec![2, 0, 0, 1]).unwrap();
        let b = PrimeFieldMatrix::new(p, 2, vec![3, 0, 0, 1]).unwrap();
        assert_eq!(a.mul(&b).unwrap(), PrimeFieldMatrix::identity(p, 2));
    }

    #[test]
    fn modular_inverse_example() {
        let a = PrimeFieldMatrix::new(5, 2, vec![2, 0, 0, 1]).unwrap();
        assert_eq!(
            a.inverse().unwrap(),
            PrimeFieldMatrix::new(5, 2, vec![3, 0, 0, 1]).unwrap()
        );
        assert!(PrimeFieldMatrix::zero(5, 2).inverse().is_err());
    }

    #[test]
    fn rank_distance_examples() {
        let id = PrimeFieldMatrix::identity(5, 2);
        assert_eq!(rank_distance(&id, &id).unwrap(), rat(0, 1));
        // antidiagonal permutation matrix vs identity: rank([[−1,1],[1,−1]]) = 1
        let anti = PrimeFieldMatrix::new(5, 2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(rank_distance(&anti, &id).unwrap(), rat(1, 2));
        let two = PrimeFieldMatrix::new(5, 2, vec![2, 0, 0, 2]).unwrap();
        assert_eq!(rank_distance(&two, &id).unwrap(), rat(1, 1));
    }

    #[test]
    fn hs_distance_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(hs_distance(&id, &id).unwrap(), 0.0);
        let neg = ComplexMatrix::diagonal(&[Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!((hs_distance(&id, &neg).unwrap() - 2.0).abs() < 1e-12);
        let mixed = ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!((hs_distance(&id, &mixed).unwrap() - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trace_examples() {
        assert!((ComplexMatrix::identity(4).normalized_trace() - 1.0).norm() < 1e-12);
        let mixed = ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!(mixed.normalized_trace().norm() < 1e-12);
        let swap = ComplexMatrix::from_permutation(&Permutation::from_images(vec![1, 0]).unwrap());
        assert!(swap.normalized_trace().norm() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let u = ComplexMatrix::random_unitary(3, &mut rng);
            assert!(u.unitary_deviation() < UNITARY_TOL);
        }
    }

    #[test]
    fn norm_trace_identity_for_unitaries() {
        // ‖U − 1‖₂² = 2 − 2·Re tr(U)
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u = ComplexMatrix::random_unitary(4, &mut rng);
            let d = hs_distance(&u, &ComplexMatrix::identity(4)).unwrap();
            let t = u.normalized_trace();
            assert!((d * d - (2.0 - 2.0 * t.re)).abs() < 1e-9);
        }
    }

    #[test]
    fn permutation_matrix_rank_matches_moved_points() {
        // supports the linear-sofic combiner: d_rk(P,Q) ≥ d_Hamm(σ,τ)/2
        for p in Permutation::all(4) {
            for q in Permutation::all(4) {
                let pm = PrimeFieldMatrix::from_permutation(&p, 5);
                let qm = PrimeFieldMatrix::from_permutation(&q, 5);
                let dr = rank_distance(&pm, &qm).unwrap();
                let dh = p.hamming(&q).unwrap();
                assert!(dr >= dh / rat(2, 1));
            }
        }
    }
}
