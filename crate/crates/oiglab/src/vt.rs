//! Varshamov-Tenengolts codes: membership, residue-class counting, the
//! coverage relation, and the ordered residue classes used by the coded
//! orientation rule.
//!
//! `VT_a(m)` is the set of length-`m` binary vectors whose position-weighted
//! sum (positions 1..m) is congruent to `a` modulo `m+1`. Distinct residues
//! partition `{0,1}^m`, and within a fixed ones-count each vector covers at
//! most one codeword per residue class.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Code length and residue parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VtParams {
    m: usize,
    a: usize,
}

impl VtParams {
    pub fn new(m: usize, a: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("code length must be at least 1".into()));
        }
        if a > m {
            return Err(Error::Input(format!(
                "residue parameter {a} out of range 0..={m}"
            )));
        }
        Ok(VtParams { m, a })
    }

    pub fn length(&self) -> usize {
        self.m
    }

    pub fn residue_param(&self) -> usize {
        self.a
    }

    pub fn modulus(&self) -> usize {
        self.m + 1
    }
}

/// Position-weighted sum of `v` modulo `len+1`, with positions counted from 1.
pub fn residue(v: &BitVector) -> usize {
    let modulus = v.len() + 1;
    let mut acc = 0usize;
    for pos in v.iter_ones() {
        acc = (acc + pos + 1) % modulus;
    }
    acc
}

/// Whether `v` belongs to `VT_a(m)`.
pub fn is_member(v: &BitVector, p: VtParams) -> Result<bool> {
    if v.len() != p.m {
        return Err(Error::Input(format!(
            "vector length {} does not match code length {}",
            v.len(),
            p.m
        )));
    }
    Ok(residue(v) == p.a)
}

/// Exact sizes of `VT_a(m)` intersected with the weight-`k` slice, for every
/// residue `a`, plus the residues re-ordered by descending size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueProfile {
    m: usize,
    k: usize,
    counts: Vec<BigUint>,
    order: Vec<usize>,
}

impl ResidueProfile {
    pub fn length(&self) -> usize {
        self.m
    }

    pub fn ones_count(&self) -> usize {
        self.k
    }

    /// `counts()[a]` is `|VT_a(m) ∩ S_k|`.
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Residues sorted by descending count, ties broken by smaller residue.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// Counts weight-`k` vectors per residue class by dynamic programming over
/// positions with state (ones used, running residue). Cost O(m·k·(m+1)).
pub fn count_by_residue(m: usize, k: usize) -> Result<ResidueProfile> {
    if m == 0 {
        return Err(Error::Input("code length must be at least 1".into()));
    }
    if k > m {
        return Err(Error::Input(format!("ones count {k} exceeds length {m}")));
    }
    let modulus = m + 1;
    // dp[ones][residue] after processing a prefix of positions
    let mut dp = vec![vec![BigUint::zero(); modulus]; k + 1];
    dp[0][0] = BigUint::one();
    for pos in 1..=m {
        // take positions in decreasing ones to reuse the table in place
        let top = k.min(pos);
        for ones in (1..=top).rev() {
            for r in 0..modulus {
                let prev = (r + modulus - pos % modulus) % modulus;
                let add = dp[ones - 1][prev].clone();
                if !add.is_zero() {
                    dp[ones][r] += add;
                }
            }
        }
    }
    let counts = dp.swap_remove(k);
    let mut order: Vec<usize> = (0..modulus).collect();
    order.sort_by(|&x, &y| counts[y].cmp(&counts[x]).then(x.cmp(&y)));
    Ok(ResidueProfile {
        m,
        k,
        counts,
        order,
    })
}

/// Coverage: `s_prime ≺ s` when `s_prime` arises from `s` by flipping a
/// single 1 to 0 and all other coordinates agree.
pub fn covers(s_prime: &BitVector, s: &BitVector) -> Result<bool> {
    let dist = s_prime.hamming_distance(s)?;
    Ok(dist == 1 && s_prime.ones_count() + 1 == s.ones_count())
}

/// All codewords of `VT_a` covered by `s`. By the unique-neighborhood
/// property the result has at most one element; finding more is reported as
/// an internal invariant violation.
pub fn covered_codewords(s: &BitVector, p: VtParams) -> Result<Vec<BitVector>> {
    if s.len() != p.m {
        return Err(Error::Input(format!(
            "vector length {} does not match code length {}",
            s.len(),
            p.m
        )));
    }
    let modulus = p.modulus();
    let r = residue(s);
    let mut found = Vec::new();
    for pos in s.iter_ones() {
        let dropped = (r + modulus - (pos + 1) % modulus) % modulus;
        if dropped == p.a {
            found.push(s.with_bit(pos, false));
        }
    }
    if found.len() > 1 {
        return Err(Error::Internal(format!(
            "vector {s} covers {} codewords of residue {}; unique-neighborhood violated",
            found.len(),
            p.a
        )));
    }
    Ok(found)
}

/// The first `l` residues of the profile's descending-count order.
pub fn top_residues(profile: &ResidueProfile, l: usize) -> Result<Vec<usize>> {
    if l == 0 || l > profile.m + 1 {
        return Err(Error::Input(format!(
            "residue budget {l} out of range 1..={}",
            profile.m + 1
        )));
    }
    Ok(profile.order[..l].to_vec())
}

/// Checks the prefix-mass inequality of the ordered residue classes:
/// `sum_{i<=ell} |T_(i)| >= ((ell+1)/(3n)) * C(m,k)` with `n = m/2`.
pub fn check_prefix_mass(profile: &ResidueProfile, ell: usize) -> Result<bool> {
    if !profile.m.is_multiple_of(2) {
        return Err(Error::Input(format!(
            "prefix-mass check requires an even length, got {}",
            profile.m
        )));
    }
    if ell > profile.m {
        return Err(Error::Input(format!(
            "prefix index {ell} out of range 0..={}",
            profile.m
        )));
    }
    let n = profile.m / 2;
    let prefix: BigUint = profile.order[..=ell]
        .iter()
        .map(|&a| profile.counts[a].clone())
        .sum();
    let total = profile.total();
    // 3n * prefix >= (ell + 1) * C(m, k), compared exactly
    Ok(prefix * (3 * n) >= total * (ell + 1))
}
