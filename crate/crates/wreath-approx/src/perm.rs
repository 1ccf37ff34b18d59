//! Permutations of `{0, .., n-1}` with the normalized Hamming distance.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rational::{rat, Rational};
use crate::{Error, Result};

/// A permutation stored as its image vector: `i ↦ images[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!(
                    "image vector {images:?} is not a bijection on [0, {n})"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::Mismatch(format!(
                "composing permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|&(i, &j)| i == j).count()
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut cycles = 0;
        for start in 0..self.len() {
            if !seen[start] {
                cycles += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = self.images[i];
                }
            }
        }
        cycles
    }

    /// Normalized Hamming distance `|{i : σ(i) ≠ τ(i)}| / n`, exact.
    pub fn hamming(&self, other: &Permutation) -> Result<Rational> {
        if self.len() != other.len() {
            return Err(Error::Mismatch(format!(
                "hamming distance between sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        let moved = self
            .images
            .iter()
            .zip(&other.images)
            .filter(|(a, b)| a != b)
            .count();
        Ok(rat(moved as i64, self.len() as i64))
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Permutation {
        let mut images: Vec<usize> = (0..n).collect();
        // Fisher-Yates
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            images.swap(i, j);
        }
        Permutation { images }
    }

    /// All n! permutations in lexicographic order of the image vectors.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
            if current.len() == n {
                out.push(Permutation {
                    images: current.clone(),
                });
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    current.push(i);
                    rec(n, current, used, out);
                    current.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn involution_squares_to_identity() {
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        assert_eq!(swap.compose(&swap).unwrap(), Permutation::identity(2));
    }

    #[test]
    fn inverse_of_three_cycle() {
        let c = Permutation::from_images(vec![2, 0, 1]).unwrap();
        assert_eq!(c.inverse(), Permutation::from_images(vec![1, 2, 0]).unwrap());
        assert_eq!(c.compose(&c.inverse()).unwrap(), Permutation::identity(3));
    }

    #[test]
    fn hamming_examples() {
        let id = Permutation::identity(3);
        assert_eq!(id.hamming(&id).unwrap(), rat(0, 1));
        let t = Permutation::from_images(vec![1, 0, 2]).unwrap();
        assert_eq!(t.hamming(&id).unwrap(), rat(2, 3));
        let c = Permutation::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(c.hamming(&id).unwrap(), rat(1, 1));
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
    }

    #[test]
    fn enumeration_count_and_order() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], Permutation::identity(3));
        for w in all.windows(2) {
            assert!(w[0].images() < w[1].images());
        }
    }

    #[test]
    fn cycle_count_matches_structure() {
        let c = Permutation::from_images(vec![1, 2, 0, 4, 3]).unwrap();
        assert_eq!(c.cycle_count(), 2);
        assert_eq!(Permutation::identity(4).cycle_count(), 4);
    }
}
