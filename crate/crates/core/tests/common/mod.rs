//! Hand-written reference complements and configurations.
//! Vectors are given with doubled integer coordinates, index 0 = e_1.

#![allow(dead_code)]

use std::collections::BTreeSet;

use resonance_lab::exactlin::RationalVector;

pub fn half(doubled: &[i64]) -> RationalVector {
    RationalVector::from_scaled_ints(doubled, 2)
}

/// `sign * e_i` with doubled coordinates, `i` 1-based.
fn e(dim: usize, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; dim];
    for &(i, s) in terms {
        v[i - 1] += 2 * s;
    }
    v
}

/// All sign vectors of length `k` with an even number of minus signs
/// (`parity = 0`) or odd (`parity = 1`), or all of them (`None`).
fn signs(k: usize, parity: Option<usize>) -> Vec<Vec<i64>> {
    (0..1u32 << k)
        .filter(|m| parity.is_none_or(|p| m.count_ones() as usize % 2 == p))
        .map(|m| (0..k).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

pub fn set(vs: Vec<Vec<i64>>) -> BTreeSet<RationalVector> {
    vs.iter().map(|v| half(v)).collect()
}

/// F4, j0 = 4: `-e1 +- e_i`, `-e1`, `(-e1 +- e2 +- e3 +- e4) / 2`.
pub fn f4_j4_complement() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 2..=4 {
        for s in [1, -1] {
            out.push(e(4, &[(1, -1), (i, s)]));
        }
    }
    out.push(e(4, &[(1, -1)]));
    for s in signs(3, None) {
        out.push(vec![-1, s[0], s[1], s[2]]);
    }
    out
}

/// F4, j0 = 1.
pub fn f4_j1_complement() -> Vec<Vec<i64>> {
    let mut out = vec![e(4, &[(1, -1)]), e(4, &[(2, -1)]), e(4, &[(1, -1), (2, -1)])];
    for a in [1, 2] {
        for b in [3, 4] {
            for s in [1, -1] {
                out.push(e(4, &[(a, -1), (b, s)]));
            }
        }
    }
    for s in signs(2, None) {
        out.push(vec![-1, -1, s[0], s[1]]);
    }
    out
}

/// E8, j0 = 1.
pub fn e8_j1_complement() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for s in signs(6, Some(0)) {
        let mut v: Vec<i64> = s.clone();
        v.extend([-1, -1]);
        out.push(v);
    }
    out.push(e(8, &[(8, -1), (7, -1)]));
    for lead in [8, 7] {
        for i in 1..=6 {
            for s in [1, -1] {
                out.push(e(8, &[(lead, -1), (i, s)]));
            }
        }
    }
    out
}

/// E7 inside R^8, j0 = 1.
pub fn e7_j1_complement() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for s in signs(5, Some(0)) {
        let mut v: Vec<i64> = s.clone();
        v.extend([-1, 1, -1]);
        out.push(v);
    }
    out.push(e(8, &[(8, -1), (7, 1)]));
    for i in 1..=5 {
        for s in [1, -1] {
            out.push(e(8, &[(6, -1), (i, s)]));
        }
    }
    out
}

/// A configuration as its center and unordered pairs.
pub struct PaperConfiguration {
    pub center: RationalVector,
    pub pairs: BTreeSet<BTreeSet<RationalVector>>,
    pub direction: RationalVector,
}

fn pair(a: Vec<i64>, b: Vec<i64>) -> BTreeSet<RationalVector> {
    [half(&a), half(&b)].into_iter().collect()
}

/// F4, j0 = 4, with the partner of `-e1 + e2 - e3 + e4` taken as
/// `-e1 - e2 + e3 - e4` (the only complement root not otherwise paired).
pub fn f4_j4_configuration() -> PaperConfiguration {
    let mut pairs = BTreeSet::new();
    for i in 2..=4 {
        pairs.insert(pair(e(4, &[(1, -1), (i, 1)]), e(4, &[(1, -1), (i, -1)])));
    }
    for (a, b) in [
        ([-2, 2, 2, 2], [-2, -2, -2, -2]),
        ([-2, 2, 2, -2], [-2, -2, -2, 2]),
        ([-2, 2, -2, 2], [-2, -2, 2, -2]),
        ([-2, 2, -2, -2], [-2, -2, 2, 2]),
    ] {
        pairs.insert(pair(a.to_vec(), b.to_vec()));
    }
    PaperConfiguration {
        center: half(&e(4, &[(1, -1)])),
        pairs,
        direction: half(&e(4, &[(1, 1)])),
    }
}

pub fn f4_j1_configuration() -> PaperConfiguration {
    let mut pairs = BTreeSet::new();
    pairs.insert(pair(e(4, &[(1, -1)]), e(4, &[(2, -1)])));
    for k in [3, 4] {
        for s in [1, -1] {
            pairs.insert(pair(e(4, &[(1, -1), (k, s)]), e(4, &[(2, -1), (k, -s)])));
        }
    }
    pairs.insert(pair(vec![-1, -1, 1, 1], vec![-1, -1, -1, -1]));
    pairs.insert(pair(vec![-1, -1, 1, -1], vec![-1, -1, -1, 1]));
    PaperConfiguration {
        center: half(&[-1, -1, 0, 0]),
        pairs,
        direction: half(&e(4, &[(1, 1), (2, 1)])),
    }
}

pub fn e8_j1_configuration() -> PaperConfiguration {
    let mut pairs = BTreeSet::new();
    for i in 1..=6 {
        pairs.insert(pair(e(8, &[(8, -1), (i, 1)]), e(8, &[(7, -1), (i, -1)])));
        pairs.insert(pair(e(8, &[(8, -1), (i, -1)]), e(8, &[(7, -1), (i, 1)])));
    }
    for s in signs(6, Some(0)) {
        let mut a: Vec<i64> = s.clone();
        a.extend([-1, -1]);
        let mut b: Vec<i64> = s.iter().map(|x| -x).collect();
        b.extend([-1, -1]);
        pairs.insert(pair(a, b));
    }
    PaperConfiguration {
        center: half(&[0, 0, 0, 0, 0, 0, -1, -1]),
        pairs,
        direction: half(&e(8, &[(8, 1), (7, 1)])),
    }
}
