//! Exact integer arithmetic and multiplicative-function primitives.
//!
//! Everything here is exact: sieves, factorizations, the Kronecker symbol,
//! divisor counts. Reals appear only in final products such as
//! [`euler_local_product`]. Tables are immutable once built and safe to share
//! across workers.

use crate::error::{Error, Result};
use crate::sum::KahanSum;

/// Hard cap on sieve sizes (entries), protecting against runaway allocations.
pub const SIEVE_LIMIT_MAX: u64 = 1 << 32;

/// A positive integer together with its prime factorization,
/// primes strictly increasing, exponents >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { n: 1, factors: Vec::new() }
    }

    /// Factor by trial division. Fine for isolated small inputs; bulk
    /// factorization should go through [`FactorSieve`].
    pub fn factor(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("factor(0)".into()));
        }
        let mut m = n;
        let mut factors = Vec::new();
        let mut p = 2u64;
        while p * p <= m {
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((m, 1));
        }
        Ok(FactoredInteger { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_square(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e % 2 == 0)
    }
}

/// Smallest-prime-factor sieve. Inputs above the limit are an error rather
/// than a slow fallback, keeping bulk factorization costs predictable.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 1 {
            return Err(Error::Domain("FactorSieve limit must be >= 1".into()));
        }
        if limit > SIEVE_LIMIT_MAX {
            return Err(Error::Resource(format!(
                "FactorSieve limit {limit} exceeds cap {SIEVE_LIMIT_MAX}"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut i = 2usize;
        while i * i <= n {
            if spf[i] == 0 {
                let mut j = i * i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
            i += 1;
        }
        Ok(FactorSieve { spf })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn factor(&self, n: u64) -> Result<FactoredInteger> {
        if n == 0 {
            return Err(Error::Domain("factor(0)".into()));
        }
        if n > self.limit() {
            return Err(Error::Resource(format!(
                "factor({n}) above sieve limit {}",
                self.limit()
            )));
        }
        let mut m = n as usize;
        let mut factors: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = if self.spf[m] == 0 { m as u64 } else { self.spf[m] as u64 };
            let mut e = 0;
            while m as u64 % p == 0 {
                m /= p as usize;
                e += 1;
            }
            factors.push((p, e));
        }
        Ok(FactoredInteger { n, factors })
    }
}

/// Packed-bit table of `mu^2(m)` for `m <= limit`.
#[derive(Debug, Clone)]
pub struct SquarefreeTable {
    limit: u64,
    words: Vec<u64>,
}

/// Sieve squarefree flags up to `limit`.
pub fn build_squarefree_table(limit: u64) -> Result<SquarefreeTable> {
    if limit < 1 {
        return Err(Error::Domain("squarefree table limit must be >= 1".into()));
    }
    if limit > SIEVE_LIMIT_MAX {
        return Err(Error::Resource(format!(
            "squarefree table limit {limit} exceeds cap {SIEVE_LIMIT_MAX}"
        )));
    }
    let n = limit as usize;
    let mut words = vec![u64::MAX; n / 64 + 1];
    let mut p = 2usize;
    while p * p <= n {
        // Clearing multiples of every p^2 (p not necessarily prime) is
        // redundant but harmless; restrict to primes via a quick check.
        if is_prime_small(p as u64) {
            let pp = p * p;
            let mut j = pp;
            while j <= n {
                words[j / 64] &= !(1u64 << (j % 64));
                j += pp;
            }
        }
        p += 1;
    }
    // Index 0 unused.
    words[0] &= !1u64;
    Ok(SquarefreeTable { limit, words })
}

impl SquarefreeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `mu^2(m)`; panics if `m` exceeds the table limit.
    #[inline]
    pub fn is_squarefree(&self, m: u64) -> bool {
        assert!(m >= 1 && m <= self.limit, "squarefree table lookup {m} out of range");
        let m = m as usize;
        self.words[m / 64] >> (m % 64) & 1 == 1
    }
}

fn is_prime_small(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Kronecker symbol (m/n) for n >= 1, completely multiplicative in n,
/// zero iff gcd(m, n) > 1.
pub fn kronecker(m: i64, n: u64) -> i32 {
    assert!(n >= 1, "kronecker requires n >= 1");
    let mut acc = 1i32;
    let mut n = n;
    // Split off the even part of n: (m/2) depends on m mod 8.
    let twos = n.trailing_zeros();
    if twos > 0 {
        if m % 2 == 0 {
            return 0;
        }
        let m8 = m.rem_euclid(8);
        let sym2 = if m8 == 1 || m8 == 7 { 1 } else { -1 };
        if twos % 2 == 1 {
            acc *= sym2;
        }
        n >>= twos;
    }
    if n == 1 {
        return acc;
    }
    // Jacobi symbol for odd n; periodic in m with period n.
    let mut a = m.rem_euclid(n as i64) as u64;
    loop {
        a %= n;
        if a == 0 {
            return 0;
        }
        let twos = a.trailing_zeros();
        if twos % 2 == 1 {
            let n8 = n % 8;
            if n8 == 3 || n8 == 5 {
                acc = -acc;
            }
        }
        a >>= twos;
        if a == 1 {
            return acc;
        }
        // Quadratic reciprocity for odd coprime a, n.
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut n);
    }
}

/// d_k(n): the number of ordered k-tuples of positive integers with product n.
/// Multiplicative with d_k(p^a) = C(a+k-1, k-1).
pub fn divisor_count(k: u32, n: &FactoredInteger) -> u64 {
    assert!(k >= 1, "divisor_count requires k >= 1");
    n.factors()
        .iter()
        .map(|&(_, a)| binomial(u64::from(a) + u64::from(k) - 1, u64::from(k) - 1))
        .product()
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc.try_into().expect("binomial overflow")
}

/// prod_{p | 2n} p/(p+1); the prime 2 always contributes 2/3.
pub fn euler_local_product(n: &FactoredInteger) -> f64 {
    let mut acc = 2.0 / 3.0;
    for &(p, _) in n.factors() {
        if p != 2 {
            acc *= p as f64 / (p as f64 + 1.0);
        }
    }
    acc
}

/// Odd squarefree d with X/16 < d <= X/8, increasing. Each 8d is a
/// fundamental discriminant.
pub fn enumerate_family(x_scale: f64, table: &SquarefreeTable) -> Result<Vec<u64>> {
    if !(x_scale >= 32.0) {
        return Err(Error::Domain(format!("enumerate_family requires X >= 32, got {x_scale}")));
    }
    let hi = (x_scale / 8.0).floor() as u64;
    if hi > table.limit() {
        return Err(Error::Resource(format!(
            "enumerate_family needs squarefree table up to {hi}, have {}",
            table.limit()
        )));
    }
    let lo = x_scale / 16.0;
    let start = (lo.floor() as u64 + 1).max(1);
    let mut out = Vec::new();
    for d in start..=hi {
        if d as f64 > lo && d % 2 == 1 && table.is_squarefree(d) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Kahan-compensated sum of `f(m, factors(m))` over odd m <= z, factoring in
/// blocks so the memory footprint stays O(block) regardless of z.
///
/// Deterministic: blocks are processed in order and combined pairwise.
pub fn sum_over_odd_factored<F>(z: u64, f: F) -> f64
where
    F: Fn(u64, &[(u64, u32)]) -> f64 + Sync,
{
    use rayon::prelude::*;
    const BLOCK: u64 = 1 << 17;
    if z == 0 {
        return 0.0;
    }
    let primes = small_primes(integer_sqrt(z).max(2));
    let blocks: Vec<(u64, u64)> = (0..)
        .map(|i| (i * BLOCK + 1, ((i + 1) * BLOCK).min(z)))
        .take_while(|&(lo, _)| lo <= z)
        .collect();
    let partials: Vec<f64> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = KahanSum::<f64>::new();
            let len = (hi - lo + 1) as usize;
            let mut rest: Vec<u64> = (lo..=hi).collect();
            let mut factors: Vec<Vec<(u64, u32)>> = vec![Vec::new(); len];
            for &p in &primes {
                let first = lo.next_multiple_of(p);
                let mut m = first;
                while m <= hi {
                    let idx = (m - lo) as usize;
                    let mut e = 0u32;
                    while rest[idx] % p == 0 {
                        rest[idx] /= p;
                        e += 1;
                    }
                    factors[idx].push((p, e));
                    m += p;
                }
            }
            let mut buf: Vec<(u64, u32)> = Vec::new();
            for m in lo..=hi {
                if m % 2 == 0 {
                    continue;
                }
                let idx = (m - lo) as usize;
                buf.clear();
                buf.extend_from_slice(&factors[idx]);
                if rest[idx] > 1 {
                    buf.push((rest[idx], 1));
                }
                acc.add(f(m, &buf));
            }
            acc.value()
        })
        .collect();
    crate::sum::pairwise_sum(&partials)
}

/// Primes up to `limit` by a plain sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut j = p * p;
            while j <= n {
                composite[j] = true;
                j += p;
            }
        }
    }
    out
}

pub fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(8, 1), 1);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(24, 5), 1);
        assert_eq!(kronecker(24, 3), 0);
    }

    #[test]
    fn kronecker_matches_euler_criterion_on_odd_primes() {
        // For odd prime q and gcd(m, q) = 1: (m/q) = 1 iff m is a square mod q.
        for &q in small_primes(200).iter().filter(|&&p| p > 2) {
            let squares: std::collections::HashSet<u64> =
                (1..q).map(|x| x * x % q).collect();
            for m in 1..q {
                let expect = if squares.contains(&(m % q)) { 1 } else { -1 };
                assert_eq!(kronecker(m as i64, q), expect, "m={m} q={q}");
            }
        }
    }

    #[test]
    fn kronecker_completely_multiplicative_in_n() {
        for m in [-7i64, -1, 2, 8, 15, 24] {
            for n1 in 1..=60u64 {
                for n2 in 1..=60u64 {
                    assert_eq!(
                        kronecker(m, n1 * n2),
                        kronecker(m, n1) * kronecker(m, n2),
                        "m={m} n1={n1} n2={n2}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_periodic_mod_8d() {
        for d in [1u64, 3, 5, 7, 11, 15] {
            let q = 8 * d;
            for n in 1..=200u64 {
                assert_eq!(kronecker(q as i64, n), kronecker(q as i64, n + q));
            }
        }
    }

    #[test]
    fn squarefree_table_small() {
        let t = build_squarefree_table(12).unwrap();
        let expect_true = [1u64, 2, 3, 5, 6, 7, 10, 11];
        let expect_false = [4u64, 8, 9, 12];
        for m in expect_true {
            assert!(t.is_squarefree(m), "{m}");
        }
        for m in expect_false {
            assert!(!t.is_squarefree(m), "{m}");
        }
    }

    #[test]
    fn squarefree_table_prime_squares() {
        let t = build_squarefree_table(10_000).unwrap();
        for p in small_primes(100) {
            assert!(!t.is_squarefree(p * p));
        }
        // Cross-check against direct divisibility.
        for m in 1..=10_000u64 {
            let direct = (2..).take_while(|q| q * q <= m).all(|q| m % (q * q) != 0);
            assert_eq!(t.is_squarefree(m), direct, "m={m}");
        }
    }

    #[test]
    fn squarefree_table_rejects_oversize() {
        assert!(matches!(
            build_squarefree_table(SIEVE_LIMIT_MAX + 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn divisor_count_examples() {
        let sieve = FactorSieve::new(1000).unwrap();
        assert_eq!(divisor_count(2, &sieve.factor(6).unwrap()), 4);
        assert_eq!(divisor_count(3, &sieve.factor(4).unwrap()), 6);
        for k in 2..=8 {
            for p in [2u64, 3, 5] {
                assert_eq!(
                    divisor_count(k, &sieve.factor(p * p).unwrap()),
                    u64::from(k) * u64::from(k + 1) / 2
                );
            }
        }
    }

    #[test]
    fn divisor_count_matches_tuple_enumeration() {
        // Brute force: count ordered k-tuples with product n.
        fn tuples(k: u32, n: u64) -> u64 {
            if k == 1 {
                return 1;
            }
            (1..=n).filter(|d| n % d == 0).map(|d| tuples(k - 1, n / d)).sum()
        }
        let sieve = FactorSieve::new(200).unwrap();
        for k in 1..=4 {
            for n in 1..=200u64 {
                assert_eq!(
                    divisor_count(k, &sieve.factor(n).unwrap()),
                    tuples(k, n),
                    "k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn euler_local_product_examples() {
        let one = FactoredInteger::one();
        assert!((euler_local_product(&one) - 2.0 / 3.0).abs() < 1e-15);
        let nine = FactoredInteger::factor(9).unwrap();
        assert!((euler_local_product(&nine) - 0.5).abs() < 1e-15);
        let fifteen = FactoredInteger::factor(15).unwrap();
        assert!((euler_local_product(&fifteen) - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn family_enumeration_examples() {
        let t = build_squarefree_table(100).unwrap();
        assert_eq!(enumerate_family(160.0, &t).unwrap(), vec![11, 13, 15, 17, 19]);
        assert_eq!(enumerate_family(32.0, &t).unwrap(), vec![3]);
    }

    #[test]
    fn family_density_matches_four_over_pi_squared() {
        let x = 2.0e5;
        let t = build_squarefree_table((x / 8.0) as u64).unwrap();
        let count = enumerate_family(x, &t).unwrap().len() as f64;
        let predicted = (x / 16.0) * 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!(
            (count - predicted).abs() / predicted < 0.05,
            "count={count} predicted={predicted}"
        );
    }

    #[test]
    fn family_members_are_fundamental_discriminants() {
        // 8d with d odd squarefree: check d odd and squarefree directly.
        let t = build_squarefree_table(1000).unwrap();
        for d in enumerate_family(6000.0, &t).unwrap() {
            assert_eq!(d % 2, 1);
            assert!(t.is_squarefree(d));
        }
    }

    #[test]
    fn factor_sieve_matches_trial_division() {
        let sieve = FactorSieve::new(5000).unwrap();
        for n in 1..=5000u64 {
            assert_eq!(sieve.factor(n).unwrap(), FactoredInteger::factor(n).unwrap());
        }
        assert!(matches!(sieve.factor(5001), Err(Error::Resource(_))));
    }

    #[test]
    fn segmented_factoring_agrees_with_sieve() {
        let sieve = FactorSieve::new(300_000).unwrap();
        let direct: f64 = {
            let mut acc = KahanSum::<f64>::new();
            for m in (1..=300_000u64).step_by(2) {
                let f = sieve.factor(m).unwrap();
                acc.add(divisor_count(2, &f) as f64 / m as f64);
            }
            acc.value()
        };
        let segmented = sum_over_odd_factored(300_000, |m, factors| {
            let fi = FactoredInteger { n: m, factors: factors.to_vec() };
            divisor_count(2, &fi) as f64 / m as f64
        });
        assert!((direct - segmented).abs() < 1e-9, "{direct} vs {segmented}");
    }
}
