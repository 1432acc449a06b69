//! Two-sample tests on score lists.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::erf::erfc;

use crate::entropy::{ensure_all_comparable, DiversityScore};
use crate::error::{DiversityError, Result};

/// Thresholds reported in `significant_at`.
pub const SIGNIFICANCE_LEVELS: [f64; 2] = [0.05, 0.01];

/// Largest group size for which the exact U distribution is enumerated
/// (tie-free samples only).
pub const EXACT_MAX_GROUP: usize = 30;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignificanceTest {
    #[default]
    MannWhitneyU,
    WelchT,
}

impl fmt::Display for SignificanceTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignificanceTest::MannWhitneyU => "mann-whitney-u",
            SignificanceTest::WelchT => "welch-t",
        })
    }
}

impl FromStr for SignificanceTest {
    type Err = DiversityError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mann-whitney-u" | "mann_whitney_u" => Ok(SignificanceTest::MannWhitneyU),
            "welch-t" | "welch_t" => Ok(SignificanceTest::WelchT),
            other => Err(DiversityError::InvalidParameter(format!(
                "unknown test '{other}' (expected mann-whitney-u or welch-t)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    /// Whether the p-value comes from an exact null distribution.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub statistic: f64,
    pub p_value: f64,
    pub significant_at: Vec<f64>,
}

impl From<TestOutcome> for PairwiseResult {
    fn from(t: TestOutcome) -> Self {
        PairwiseResult {
            statistic: t.statistic,
            p_value: t.p_value,
            significant_at: SIGNIFICANCE_LEVELS
                .iter()
                .copied()
                .filter(|&alpha| t.p_value < alpha)
                .collect(),
        }
    }
}

/// Compares two score distributions of the same kind, space and K.
pub fn compare_sets(
    scores_a: &[DiversityScore],
    scores_b: &[DiversityScore],
    test: SignificanceTest,
) -> Result<PairwiseResult> {
    if scores_a.is_empty() || scores_b.is_empty() {
        return Err(DiversityError::InsufficientSamples { needed: 1, got: 0 });
    }
    ensure_all_comparable(scores_a.iter().chain(scores_b))?;
    let a: Vec<f64> = scores_a.iter().map(|s| s.value).collect();
    let b: Vec<f64> = scores_b.iter().map(|s| s.value).collect();
    let outcome = match test {
        SignificanceTest::MannWhitneyU => mann_whitney_u(&a, &b)?,
        SignificanceTest::WelchT => welch_t(&a, &b)?,
    };
    Ok(outcome.into())
}

/// Two-sided Mann-Whitney U test. The statistic is `U` of the first sample.
///
/// Tie-free samples with both groups of at most [`EXACT_MAX_GROUP`] use the
/// exact permutation distribution of U. Otherwise the normal approximation
/// with tie-corrected variance and a 0.5 continuity correction is used.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestOutcome> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Err(DiversityError::InsufficientSamples { needed: 1, got: 0 });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(DiversityError::InvalidParameter("non-finite score".into()));
    }

    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let total = n + m;
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < total {
        let mut j = i + 1;
        while j < total && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i) as f64;
        // average of 1-based ranks i+1 ..= j
        let rank = (i + j + 1) as f64 / 2.0;
        rank_sum_a += rank * pooled[i..j].iter().filter(|p| p.1).count() as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let u = rank_sum_a - (n * (n + 1)) as f64 / 2.0;

    if tie_term == 0.0 && n <= EXACT_MAX_GROUP && m <= EXACT_MAX_GROUP {
        let u_int = u.round() as usize;
        let counts = u_counts(n, m);
        let lower: u128 = counts[..=u_int].iter().sum();
        let upper: u128 = counts[u_int..].iter().sum();
        let all: u128 = counts.iter().sum();
        let p = (2.0 * lower.min(upper) as f64 / all as f64).min(1.0);
        return Ok(TestOutcome {
            statistic: u,
            p_value: p,
            exact: true,
        });
    }

    let (nf, mf, nt) = (n as f64, m as f64, total as f64);
    let mean = nf * mf / 2.0;
    let variance = nf * mf / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    let p = if variance <= 0.0 {
        1.0
    } else {
        let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(TestOutcome {
        statistic: u,
        p_value: p,
        exact: false,
    })
}

/// Number of arrangements giving each value of U, for groups of size n, m.
///
/// `f(n, m, u) = f(n-1, m, u-m) + f(n, m-1, u)`: the largest pooled value
/// belongs either to the first group (adding m to U) or the second.
fn u_counts(n: usize, m: usize) -> Vec<u128> {
    let max_u = n * m;
    // prev[j] = counts for (i-1, j); cur[j] = counts for (i, j)
    let mut prev: Vec<Vec<u128>> = (0..=m).map(|_| unit(max_u)).collect();
    for _ in 0..n {
        let mut cur: Vec<Vec<u128>> = Vec::with_capacity(m + 1);
        cur.push(unit(max_u));
        for j in 1..=m {
            let mut row = cur[j - 1].clone();
            for (u, c) in prev[j].iter().enumerate() {
                if *c != 0 && u + j <= max_u {
                    row[u + j] += c;
                }
            }
            cur.push(row);
        }
        prev = cur;
    }
    prev.swap_remove(m)
}

fn unit(len: usize) -> Vec<u128> {
    let mut v = vec![0u128; len + 1];
    v[0] = 1;
    v
}

/// Exact null CDF `P(U ≤ u)` for tie-free groups of size n and m.
pub fn mann_whitney_exact_cdf(n: usize, m: usize, u: usize) -> f64 {
    let counts = u_counts(n, m);
    let all: u128 = counts.iter().sum();
    let below: u128 = counts.iter().take(u + 1).sum();
    below as f64 / all as f64
}

/// Two-sided Welch t-test. The statistic is `t` for `mean(a) - mean(b)`.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TestOutcome> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(DiversityError::InsufficientSamples {
                needed: 2,
                got: s.len(),
            });
        }
    }
    let moments = |s: &[f64]| {
        let n = s.len() as f64;
        let mean = s.iter().sum::<f64>() / n;
        let var = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var / n)
    };
    let (mean_a, se2_a) = moments(a);
    let (mean_b, se2_b) = moments(b);
    let se2 = se2_a + se2_b;
    if se2 <= 0.0 {
        return Err(DiversityError::DegenerateVariance);
    }
    let t = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2
        / (se2_a * se2_a / (a.len() as f64 - 1.0) + se2_b * se2_b / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| DiversityError::NumericalFailure(format!("Student t with df = {df}: {e}")))?;
    // sf(|t|) evaluated on the lower tail for accuracy far out
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(TestOutcome {
        statistic: t,
        p_value: p,
        exact: false,
    })
}

#[cfg(test)]
mod unit {
    use super::*;
    use crate::embedding::SpaceTag;
    use crate::entropy::ScoreKind;
    use proptest::prelude::*;

    /// Brute-force oracle: enumerate every split of ranks 1..=n+m into
    /// groups of n and m and count the U values.
    fn enumerate_u(n: usize, m: usize) -> Vec<u64> {
        let total = n + m;
        let mut counts = vec![0u64; n * m + 1];
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let rank_sum: usize = (0..total)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| b + 1)
                .sum();
            counts[rank_sum - n * (n + 1) / 2] += 1;
        }
        counts
    }

    #[test]
    fn dp_counts_match_enumeration() {
        for (n, m) in [(1, 1), (2, 3), (4, 4), (5, 7), (10, 10)] {
            let dp: Vec<u64> = u_counts(n, m).into_iter().map(|c| c as u64).collect();
            assert_eq!(dp, enumerate_u(n, m), "n={n} m={m}");
        }
    }

    #[test]
    fn fully_separated_ten_by_ten() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let b: Vec<f64> = (11..=20).map(f64::from).collect();
        let t = mann_whitney_u(&a, &b).unwrap();
        assert!(t.exact);
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 2.0 / 184_756.0).abs() < 1e-12);
    }

    #[test]
    fn identical_lists_are_not_separated() {
        let a = [3.1, 2.0, 5.5, 4.4, 1.0, 0.3, 7.7, 6.1, 9.0, 8.2];
        let t = mann_whitney_u(&a, &a).unwrap();
        assert!(!t.exact);
        assert!(t.p_value >= 0.99);
        let flat = [1.0; 6];
        assert_eq!(mann_whitney_u(&flat, &flat).unwrap().p_value, 1.0);
    }

    #[test]
    fn normal_branch_for_large_groups() {
        let a: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| i as f64 + 0.5).collect();
        let t = mann_whitney_u(&a, &b).unwrap();
        assert!(!t.exact);
        assert!(t.p_value > 0.5);
    }

    #[test]
    fn welch_zero_variance_is_degenerate() {
        let a = [0.0; 10];
        let b = [1.0; 10];
        assert!(matches!(
            welch_t(&a, &b),
            Err(DiversityError::DegenerateVariance)
        ));
    }

    #[test]
    fn welch_against_hand_computation() {
        // equal variances and sizes give df = 2(n-1) = 8; reference p from scipy
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let t = welch_t(&a, &b).unwrap();
        // var = 2.5, se² = 2·2.5/5 = 1, t = -1
        assert!((t.statistic + 1.0).abs() < 1e-12);
        // two-sided p for |t| = 1 with 8 df
        assert!(
            (t.p_value - 0.346_593_507_087_334_16).abs() < 1e-9,
            "{}",
            t.p_value
        );
    }

    #[test]
    fn compare_sets_rejects_mixed_kinds() {
        let s = |value, kind, space| DiversityScore {
            value,
            k_used: 20,
            space_tag: space,
            n_samples: 30,
            kind,
        };
        let a = vec![s(1.0, ScoreKind::Tie, SpaceTag::Inception2048)];
        let b = vec![s(2.0, ScoreKind::Tce, SpaceTag::Clip512)];
        assert!(matches!(
            compare_sets(&a, &b, SignificanceTest::MannWhitneyU),
            Err(DiversityError::SpaceMismatch(_))
        ));
        let b = vec![s(2.0, ScoreKind::Tie, SpaceTag::Inception2048)];
        let r = compare_sets(&a, &b, SignificanceTest::MannWhitneyU).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(r.significant_at.is_empty());
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, 2..16)
    }

    proptest! {
        #[test]
        fn mann_whitney_is_symmetric(a in sample(), b in sample()) {
            let ab = mann_whitney_u(&a, &b).unwrap().p_value;
            let ba = mann_whitney_u(&b, &a).unwrap().p_value;
            prop_assert!((ab - ba).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn shifting_b_up_never_raises_p(a in sample(), b in sample(), shift in 0.0f64..50.0) {
            // two-sided: only meaningful once b already ranks at or above a
            let before = mann_whitney_u(&a, &b).unwrap();
            prop_assume!(before.statistic <= (a.len() * b.len()) as f64 / 2.0);
            let shifted: Vec<f64> = b.iter().map(|v| v + shift).collect();
            let after = mann_whitney_u(&a, &shifted).unwrap();
            prop_assert!(after.p_value <= before.p_value + 1e-12,
                "p rose from {} to {}", before.p_value, after.p_value);
        }

        #[test]
        fn welch_is_symmetric(a in sample(), b in sample()) {
            let ab = welch_t(&a, &b).unwrap().p_value;
            let ba = welch_t(&b, &a).unwrap().p_value;
            prop_assert!((ab - ba).abs() <= 1e-12);
        }
    }
}
