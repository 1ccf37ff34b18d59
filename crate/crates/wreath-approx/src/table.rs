//! Finite groups given by multiplication tables, with and without a
//! bi-invariant metric.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::rational::{rat, rational_string, Rational};
use crate::{Error, Result};
use num::Zero;

/// Orders up to this bound get exhaustive validation; above it the axioms
/// are spot-checked on a fixed number of random triples.
pub const EXHAUSTIVE_ORDER_LIMIT: usize = 256;
const RANDOM_TRIPLE_SAMPLES: usize = 10_000;

/// A finite group law: multiplication table, inverse table, identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub order: usize,
    pub mul_table: Vec<usize>,
    pub inv_table: Vec<usize>,
    pub identity_index: usize,
}

impl GroupTable {
    /// Validates the group axioms and derives the inverse table.
    pub fn new(order: usize, mul_table: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidTable("empty group".into()));
        }
        if mul_table.len() != order * order {
            return Err(Error::InvalidTable(format!(
                "mul_table has {} entries, expected {}",
                mul_table.len(),
                order * order
            )));
        }
        if mul_table.iter().any(|&e| e >= order) {
            return Err(Error::InvalidTable("mul_table entry out of range".into()));
        }
        // locate the identity
        let identity_index = (0..order)
            .find(|&e| (0..order).all(|x| mul_table[e * order + x] == x && mul_table[x * order + e] == x))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        // inverses
        let mut inv_table = vec![usize::MAX; order];
        for x in 0..order {
            let inv = (0..order)
                .find(|&y| mul_table[x * order + y] == identity_index && mul_table[y * order + x] == identity_index)
                .ok_or_else(|| Error::InvalidTable(format!("element {x} has no inverse")))?;
            inv_table[x] = inv;
        }
        let g = GroupTable {
            order,
            mul_table,
            inv_table,
            identity_index,
        };
        g.validate_associativity()?;
        Ok(g)
    }

    fn validate_associativity(&self) -> Result<()> {
        let m = self.order;
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(Error::InvalidTable(format!(
                    "associativity fails at witness ({a}, {b}, {c})"
                )));
            }
            Ok(())
        };
        if m <= EXHAUSTIVE_ORDER_LIMIT {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..RANDOM_TRIPLE_SAMPLES {
                check(rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m))?;
            }
        }
        Ok(())
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv_table[a]
    }

    pub fn identity(&self) -> usize {
        self.identity_index
    }

    /// Order of the element `a`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity_index {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn cyclic(n: usize) -> Self {
        let mul_table = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a + b) % n))
            .collect();
        GroupTable::new(n, mul_table).expect("cyclic group law")
    }
}

/// A finite group with a bi-invariant metric of diameter at most 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableGroup {
    #[serde(flatten)]
    pub group: GroupTable,
    pub metric_table: Vec<MetricEntry>,
}

/// Wrapper so metric entries serialize as `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetricEntry(#[serde(with = "rational_string")] pub Rational);

impl TableGroup {
    pub fn dist(&self, a: usize, b: usize) -> &Rational {
        &self.metric_table[a * self.group.order + b].0
    }
}

/// Validates the group law, the metric axioms, bi-invariance, and the
/// diameter normalization; each failed axiom is reported with a witness.
pub fn validate_table_group(order: usize, mul_table: Vec<usize>, metric: Vec<Rational>) -> Result<TableGroup> {
    let group = GroupTable::new(order, mul_table)?;
    let m = order;
    if metric.len() != m * m {
        return Err(Error::InvalidMetric(format!(
            "metric_table has {} entries, expected {}",
            metric.len(),
            m * m
        )));
    }
    let d = |a: usize, b: usize| &metric[a * m + b];
    let check_triple = |a: usize, b: usize, c: usize| -> Result<()> {
        if d(a, c) > &(d(a, b) + d(b, c)) {
            return Err(Error::InvalidMetric(format!(
                "triangle inequality fails at witness ({a}, {b}, {c})"
            )));
        }
        // bi-invariance: d(ga, gb) = d(a, b) = d(ag, bg) with g = c
        let g = c;
        if d(group.mul(g, a), group.mul(g, b)) != d(a, b) {
            return Err(Error::InvalidMetric(format!(
                "left invariance fails at witness (g={g}, {a}, {b})"
            )));
        }
        if d(group.mul(a, g), group.mul(b, g)) != d(a, b) {
            return Err(Error::InvalidMetric(format!(
                "right invariance fails at witness (g={g}, {a}, {b})"
            )));
        }
        Ok(())
    };
    let one = rat(1, 1);
    for a in 0..m {
        for b in 0..m {
            let dab = d(a, b);
            if (a == b) != dab.is_zero() {
                return Err(Error::InvalidMetric(format!(
                    "identity of indiscernibles fails at witness ({a}, {b})"
                )));
            }
            if dab < &Rational::zero() {
                return Err(Error::InvalidMetric(format!("negative distance at ({a}, {b})")));
            }
            if dab != d(b, a) {
                return Err(Error::InvalidMetric(format!("symmetry fails at witness ({a}, {b})")));
            }
            if dab > &one {
                return Err(Error::InvalidMetric(format!(
                    "diameter violation at witness ({a}, {b}): {dab} > 1"
                )));
            }
        }
    }
    if m <= EXHAUSTIVE_ORDER_LIMIT {
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    check_triple(a, b, c)?;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..RANDOM_TRIPLE_SAMPLES {
            check_triple(rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m))?;
        }
    }
    Ok(TableGroup {
        group,
        metric_table: metric.into_iter().map(MetricEntry).collect(),
    })
}

/// `Z/n` with the discrete metric: distance 1 between distinct elements.
pub fn cyclic_discrete(n: usize) -> TableGroup {
    let group = GroupTable::cyclic(n);
    let metric = (0..n)
        .flat_map(|a| (0..n).map(move |b| if a == b { rat(0, 1) } else { rat(1, 1) }))
        .collect();
    validate_table_group(n, group.mul_table, metric).expect("discrete metric is bi-invariant")
}
