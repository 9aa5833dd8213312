//! Exact algebra in the abstract Hecke ring.
//!
//! The ring is generated over the integers by symbols x(n) with
//! x(m)x(n) = sum_{d | (m,n)} x(mn/d^2). Products expand as
//! x(n_1)...x(n_r) = sum_t b_t(n_1,...,n_r) x(t); the coefficient of x(1)
//! drives the diagonal main terms, and B_r(n) = sum_{n_1...n_r = n} b_1 is
//! multiplicative, supported on squares, with B_r(p^2) = r(r-1)/2.
//!
//! Everything is exact integer arithmetic; floating point enters only in the
//! final 1/sqrt(n) weightings.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;

use crate::arith::{FactorSieve, FactoredInteger};
use crate::error::{Error, Result};
use crate::sum::{pairwise_sum, KahanSum};

/// Default work budget (elementary enumeration steps) for tuple sweeps.
pub const DEFAULT_WORK_BUDGET: u64 = 1_000_000_000;

/// Integer combination of Hecke symbols x(n), canonical form
/// (no zero coefficients stored). x(1) is the multiplicative identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeElement {
    terms: BTreeMap<u64, i64>,
}

impl HeckeElement {
    /// The identity x(1).
    pub fn one() -> Self {
        Self::symbol(1)
    }

    /// The generator x(n).
    pub fn symbol(n: u64) -> Self {
        assert!(n >= 1, "Hecke symbol index must be positive");
        let mut terms = BTreeMap::new();
        terms.insert(n, 1);
        HeckeElement { terms }
    }

    pub fn coefficient(&self, t: u64) -> i64 {
        self.terms.get(&t).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.terms.iter().map(|(&t, &c)| (t, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Bilinear extension of x(m)x(n) = sum_{d|(m,n)} x(mn/d^2).
    pub fn multiply(&self, other: &HeckeElement) -> Result<HeckeElement> {
        let mut out: BTreeMap<u64, i64> = BTreeMap::new();
        for (&m, &cm) in &self.terms {
            for (&n, &cn) in &other.terms {
                let c = cm.checked_mul(cn).ok_or(Error::Overflow("hecke_multiply"))?;
                let g = m.gcd(&n);
                for d in divisors(g) {
                    let idx = (m / d)
                        .checked_mul(n / d)
                        .ok_or(Error::Overflow("hecke_multiply"))?;
                    let slot = out.entry(idx).or_insert(0);
                    *slot = slot.checked_add(c).ok_or(Error::Overflow("hecke_multiply"))?;
                }
            }
        }
        out.retain(|_, c| *c != 0);
        Ok(HeckeElement { terms: out })
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Local expansion at a generic prime: coefficients of x(p^e) in
/// prod_i x(p^{a_i}), as a vector indexed by e. Independent of p.
fn local_expand(exponents: &[u32]) -> Vec<u64> {
    let mut acc = vec![1u64];
    for &a in exponents {
        acc = local_mul(&acc, a);
    }
    acc
}

/// Multiply a local expansion vector by x(p^a):
/// x(p^e) x(p^a) = sum_{j=0..min(e,a)} x(p^{e+a-2j}).
fn local_mul(vec: &[u64], a: u32) -> Vec<u64> {
    let a = a as usize;
    let mut out = vec![0u64; vec.len() + a];
    for (e, &c) in vec.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for j in 0..=e.min(a) {
            out[e + a - 2 * j] += c;
        }
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

/// b_1(p^{a_1},...,p^{a_r}): the coefficient of x(1) in prod_i x(p^{a_i}).
/// Zero whenever the exponent sum is odd; at most prod (1+a_i).
pub fn b1_local(exponents: &[u32]) -> u64 {
    local_expand(exponents)[0]
}

/// Full expansion map t -> b_t(n_1,...,n_r), computed multiplicatively:
/// the structure constants factor over primes, so each prime's exponent
/// tuple is expanded locally and the results are tensored together.
/// (The iterated [`HeckeElement::multiply`] route is the independent oracle.)
pub fn expand_product(ns: &[u64], sieve: &FactorSieve) -> Result<BTreeMap<u64, i64>> {
    if ns.is_empty() {
        return Err(Error::Domain("expand_product requires r >= 1".into()));
    }
    // prime -> exponent tuple across the inputs (zeros omitted; they expand
    // to the identity).
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &n in ns {
        for &(p, e) in sieve.factor(n)?.factors() {
            per_prime.entry(p).or_default().push(e);
        }
    }
    let mut out: BTreeMap<u64, i64> = BTreeMap::new();
    out.insert(1, 1);
    for (p, exps) in per_prime {
        let local = local_expand(&exps);
        let mut next: BTreeMap<u64, i64> = BTreeMap::new();
        for (&t, &c) in &out {
            let mut pe = 1u64;
            for (e, &ce) in local.iter().enumerate() {
                if e > 0 {
                    pe = pe.checked_mul(p).ok_or(Error::Overflow("expand_product"))?;
                }
                if ce == 0 {
                    continue;
                }
                let ce_i = i64::try_from(ce).map_err(|_| Error::Overflow("expand_product"))?;
                let idx = t.checked_mul(pe).ok_or(Error::Overflow("expand_product"))?;
                let coeff = c.checked_mul(ce_i).ok_or(Error::Overflow("expand_product"))?;
                let slot = next.entry(idx).or_insert(0);
                *slot = slot.checked_add(coeff).ok_or(Error::Overflow("expand_product"))?;
            }
        }
        out = next;
    }
    Ok(out)
}

/// B_r(p^a) = sum over ordered r-tuples of nonnegative exponents summing to a
/// of b_1 at those exponents. Computed by dynamic programming over the local
/// expansion vectors; independent of p.
pub fn local_big_b(r: u32, a: u32) -> u64 {
    let a = a as usize;
    // dp[s] = sum of local expansion vectors over j-tuples with exponent sum s
    let mut dp: Vec<Vec<u64>> = vec![Vec::new(); a + 1];
    dp[0] = vec![1];
    for _ in 0..r {
        let mut next: Vec<Vec<u64>> = vec![Vec::new(); a + 1];
        for s in 0..=a {
            if dp[s].is_empty() {
                continue;
            }
            for ai in 0..=(a - s) {
                let conv = local_mul(&dp[s], ai as u32);
                let slot = &mut next[s + ai];
                if slot.len() < conv.len() {
                    slot.resize(conv.len(), 0);
                }
                for (e, &c) in conv.iter().enumerate() {
                    slot[e] += c;
                }
            }
        }
        dp = next;
    }
    dp[a].first().copied().unwrap_or(0)
}

/// B_r(n) = sum_{n_1...n_r = n} b_1(n_1,...,n_r); multiplicative in n and
/// zero unless n is a perfect square.
pub fn big_b(r: u32, n: &FactoredInteger) -> u64 {
    assert!(r >= 1, "big_b requires r >= 1");
    n.factors().iter().map(|&(_, a)| local_big_b(r, a)).product()
}

/// sum_{n_1,...,n_{r-1} <= x, n_r <= cap} b_1(n_1,...,n_r) / sqrt(n_1...n_r),
/// with `cap` defaulting to x. Exact integer numerators, weighted in f64.
///
/// Enumeration is budget-guarded and parallelized over the first variable;
/// per-branch sums are compensated and combined pairwise, so the result does
/// not depend on the worker count.
pub fn b_sum_weighted(r: u32, x: f64, cap: Option<f64>, max_steps: u64) -> Result<f64> {
    use rayon::prelude::*;
    if r < 1 {
        return Err(Error::Domain("b_sum_weighted requires r >= 1".into()));
    }
    if !(x >= 1.0) {
        return Err(Error::Domain(format!("b_sum_weighted requires x >= 1, got {x}")));
    }
    let cap = cap.unwrap_or(x);
    if !(cap >= 1.0) {
        return Err(Error::Domain(format!("b_sum_weighted cap must be >= 1, got {cap}")));
    }
    let nx = x.floor() as u64;
    let ncap = cap.floor() as u64;
    // Budget check: the tuple tree has at most nx^{r-1} * ncap leaves.
    let mut work = ncap as f64;
    for _ in 0..r - 1 {
        work *= nx as f64;
    }
    if work > max_steps as f64 {
        return Err(Error::Budget { stage: "b_sum_weighted" });
    }
    let sieve = FactorSieve::new(nx.max(ncap))?;
    let table: Vec<FactoredInteger> =
        (0..=nx.max(ncap)).map(|n| if n == 0 { FactoredInteger::one() } else { sieve.factor(n).unwrap() }).collect();

    let first_range: Vec<u64> = if r == 1 { vec![0] } else { (1..=nx).collect() };
    let partials: Vec<f64> = first_range
        .par_iter()
        .map(|&n1| {
            let mut memo: HashMap<u64, u64> = HashMap::new();
            let mut acc = KahanSum::<f64>::new();
            let mut stack: Vec<u64> = Vec::with_capacity(r as usize);
            if n1 > 0 {
                stack.push(n1);
            }
            descend(&mut stack, r, nx, ncap, &table, &mut memo, &mut acc);
            acc.value()
        })
        .collect();
    Ok(pairwise_sum(&partials))
}

fn descend(
    stack: &mut Vec<u64>,
    r: u32,
    nx: u64,
    ncap: u64,
    table: &[FactoredInteger],
    memo: &mut HashMap<u64, u64>,
    acc: &mut KahanSum<f64>,
) {
    if stack.len() == r as usize {
        let b1 = tuple_b1(stack, table, memo);
        if b1 > 0 {
            let prod: f64 = stack.iter().map(|&n| n as f64).product();
            acc.add(b1 as f64 / prod.sqrt());
        }
        return;
    }
    let bound = if stack.len() == (r - 1) as usize { ncap } else { nx };
    for n in 1..=bound {
        stack.push(n);
        descend(stack, r, nx, ncap, table, memo, acc);
        stack.pop();
    }
}

fn tuple_b1(tuple: &[u64], table: &[FactoredInteger], memo: &mut HashMap<u64, u64>) -> u64 {
    // Merge exponents per prime across the tuple.
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &n in tuple {
        for &(p, e) in table[n as usize].factors() {
            per_prime.entry(p).or_default().push(e);
        }
    }
    let mut b1 = 1u64;
    for (_, mut exps) in per_prime {
        exps.sort_unstable();
        let key = pack_exponents(&exps);
        let local = match key {
            Some(k) => *memo.entry(k).or_insert_with(|| b1_local(&exps)),
            None => b1_local(&exps),
        };
        if local == 0 {
            return 0;
        }
        b1 *= local;
    }
    b1
}

/// Pack a sorted exponent tuple into a u64 memo key (4 bits per entry).
fn pack_exponents(exps: &[u32]) -> Option<u64> {
    if exps.len() > 15 || exps.iter().any(|&e| e > 15) {
        return None;
    }
    let mut key = exps.len() as u64;
    for &e in exps {
        key = key << 4 | u64::from(e);
    }
    Some(key)
}

/// sum_{n <= z} B_r(n)/sqrt(n), evaluated over squares n = m^2 only
/// (B_r vanishes off squares), so the weight is exactly 1/m.
pub fn b_partial_sum(r: u32, z: f64) -> f64 {
    assert!(z >= 1.0, "b_partial_sum requires z >= 1");
    let mmax = crate::arith::integer_sqrt(z.floor() as u64);
    let sieve = FactorSieve::new(mmax.max(1)).expect("sieve");
    let mut acc = KahanSum::<f64>::new();
    for m in 1..=mmax {
        let f = sieve.factor(m).expect("within limit");
        // B_r(m^2) from doubled exponents, prime by prime.
        let b: u64 = f.factors().iter().map(|&(_, a)| local_big_b(r, 2 * a)).product();
        if b > 0 {
            acc.add(b as f64 / m as f64);
        }
    }
    acc.value()
}
