//! Per-transition weights `Φ_{α,β}(i, j)` and `ψ^l_M(i, j)`.

/// `C(n, k)` in floating point by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// `Φ_{α,β}(i, j) = 1{i≥α, j≥β} Π_{l<α}(i-l) Π_{l<β}(j-l) / Π_{l<α+β}(i+j-l)`.
///
/// Evaluated as a product of ratios, each at most 1, so it never overflows
/// however large `i` and `j` are.
pub fn phi(alpha: u32, beta: u32, i: u64, j: u64) -> f64 {
    let (a, b) = (alpha as u64, beta as u64);
    if i < a || j < b {
        return 0.0;
    }
    let total = i + j;
    let mut value = 1.0;
    for t in 0..a + b {
        let num = if t < a { i - t } else { j - (t - a) };
        value *= num as f64 / (total - t) as f64;
    }
    value
}

/// Hypergeometric law of the number of "left" items among `m` draws from
/// `i` left and `j` right items, written into `out[0..=m]`.
///
/// The weights are built outward from the mode with the ratio recursion and
/// normalized at the end, so huge `i` and `j` cost `O(m)` and never
/// underflow at the peak. Requires `i + j >= m`.
pub fn hypergeometric_pmf(m: usize, i: u64, j: u64, out: &mut [f64]) {
    debug_assert!(out.len() > m);
    debug_assert!(i + j >= m as u64);
    out[..=m].fill(0.0);
    let mu = m as u64;
    let k_lo = mu.saturating_sub(j) as usize;
    let k_hi = mu.min(i) as usize;
    let (fi, fj, fm) = (i as f64, j as f64, m as f64);
    let mode = (((fm + 1.0) * (fi + 1.0)) / (fi + fj + 2.0)).floor() as usize;
    let mode = mode.clamp(k_lo, k_hi);

    out[mode] = 1.0;
    let mut total = 1.0;
    let mut w = 1.0;
    for k in mode..k_hi {
        let fk = k as f64;
        w *= (fi - fk) * (fm - fk) / ((fk + 1.0) * (fj - fm + fk + 1.0));
        if w < 1e-300 {
            break;
        }
        out[k + 1] = w;
        total += w;
    }
    w = 1.0;
    for k in (k_lo + 1..=mode).rev() {
        let fk = k as f64;
        w *= fk * (fj - fm + fk) / ((fi - fk + 1.0) * (fm - fk + 1.0));
        if w < 1e-300 {
            break;
        }
        out[k - 1] = w;
        total += w;
    }
    for v in &mut out[k_lo..=k_hi] {
        *v /= total;
    }
}

/// `ψ^l_M(i, j) = 1{i≥M} Σ_{k<l} C(i,k) C(j,M-k) / C(i+j,M)`: the lower
/// hypergeometric c.d.f. at `l - 1`.
pub fn psi(l: usize, m: usize, i: u64, j: u64) -> f64 {
    assert!(l <= m + 1, "l must lie in [0, M+1]");
    if l == 0 || i < m as u64 {
        return 0.0;
    }
    if l == m + 1 {
        return 1.0;
    }
    let mut pmf = vec![0.0; m + 1];
    hypergeometric_pmf(m, i, j, &mut pmf);
    pmf[..l].iter().sum::<f64>().clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1, 1, 1, 1), 0.5);
        assert_eq!(phi(2, 3, 1, 7), 0.0);
        assert_eq!(phi(0, 1, 3, 1), 0.25);
        assert_eq!(phi(0, 0, 0, 0), 1.0);
        assert_eq!(phi(0, 1, 0, 0), 0.0);
        for (i, j) in [(1u64, 1u64), (4, 9), (10, 0), (0, 10)] {
            if i + j > 0 {
                assert!((phi(0, 1, i, j) - j as f64 / (i + j) as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn phi_matches_binomial_ratio() {
        // Φ_{α,β}(i,j) = C(i+j-α-β, i-α) / C(i+j, i)
        for a in 0..4u32 {
            for b in 0..4u32 {
                for i in a as u64..15 {
                    for j in b as u64..15 {
                        let lit = binomial(i + j - (a + b) as u64, i - a as u64) / binomial(i + j, i);
                        assert!((phi(a, b, i, j) - lit).abs() < 1e-13 * lit.max(1e-300), "{a} {b} {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn phi_handles_huge_counts() {
        let v = phi(3, 2, 10_000_000_000, 20_000_000_000);
        // ≈ (1/3)^3 (2/3)^2
        assert!((v - (1.0f64 / 3.0).powi(3) * (2.0f64 / 3.0).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn psi_examples() {
        assert!((psi(1, 2, 2, 2) - 1.0 / 6.0).abs() < 1e-15);
        for m in 1..6 {
            assert_eq!(psi(m + 1, m, m as u64 + 3, 4), 1.0);
            assert_eq!(psi(m, m, m as u64 - 1, 40), 0.0);
            assert_eq!(psi(0, m, 50, 50), 0.0);
        }
        // M = 1: ψ^1_1(i, j) = j / (i + j)
        assert!((psi(1, 1, 3, 5) - 5.0 / 8.0).abs() < 1e-15);
        // j = 0 forces all M draws from the left side
        assert_eq!(psi(3, 3, 7, 0), 0.0);
    }

    #[test]
    fn psi_matches_literal_binomial_sum() {
        for m in 1..=10usize {
            for i in m as u64..=60 {
                for j in 0..=(60 - i) {
                    for l in 0..=m + 1 {
                        let lit: f64 = (0..l as u64)
                            .map(|k| binomial(i, k) * binomial(j, m as u64 - k))
                            .sum::<f64>()
                            / binomial(i + j, m as u64);
                        let v = psi(l, m, i, j);
                        assert!((v - lit).abs() < 1e-10, "l={l} M={m} i={i} j={j}: {v} vs {lit}");
                    }
                }
            }
        }
    }

    #[test]
    fn psi_survives_extreme_proportions() {
        // i >> j: almost all mass at k = M, the forward recursion from k = 0
        // would underflow.
        let v = psi(400, 400, 10_000_000_000, 3);
        assert!((0.0..1e-6).contains(&v));
        let mut pmf = vec![0.0; 401];
        hypergeometric_pmf(400, 10_000_000_000, 3, &mut pmf);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn phi_bounded_by_inverse_binomial(a in 0u32..=8, b in 0u32..=8, i in 0u64..1_000_000, j in 0u64..1_000_000) {
            prop_assume!(a + b <= 8);
            let v = phi(a, b, i, j);
            let cap = 1.0 / binomial((a + b) as u64, a as u64);
            prop_assert!(v >= 0.0);
            prop_assert!(v <= cap * (1.0 + 1e-12));
        }

        #[test]
        fn psi_is_a_cdf_in_l(m in 1usize..40, i in 0u64..100_000, j in 0u64..100_000) {
            prop_assume!(i >= m as u64);
            let mut prev = 0.0;
            for l in 0..=m + 1 {
                let v = psi(l, m, i, j);
                prop_assert!(v >= prev - 1e-15);
                prop_assert!((0.0..=1.0).contains(&v));
                prev = v;
            }
            prop_assert_eq!(prev, 1.0);
        }
    }
}
