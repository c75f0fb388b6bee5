//! Exact arithmetic functions: sieve tables, Ramanujan sums, divisor log
//! sums, the Euler product `h(a, r, s)` and `g(q)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `n_max` accepted by [`ArithTables::build`] (about 17 bytes per entry).
pub const ARITH_CAP: usize = 20_000_000;

/// Sieved τ, φ, μ and smallest prime factor on `1..=n_max`; index 0 is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithTables {
    pub n_max: usize,
    pub tau: Vec<u32>,
    pub phi: Vec<u64>,
    pub mu: Vec<i8>,
    pub spf: Vec<u32>,
}

impl ArithTables {
    /// Linear sieve up to `n_max`.
    pub fn build(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        if n_max > ARITH_CAP {
            return Err(Error::Capacity { requested: n_max as u64, cap: ARITH_CAP as u64 });
        }
        let len = n_max + 1;
        let mut tau = vec![0u32; len];
        let mut phi = vec![0u64; len];
        let mut mu = vec![0i8; len];
        let mut spf = vec![0u32; len];
        // exponent of spf(n) in n
        let mut exp = vec![0u8; len];
        let mut primes: Vec<usize> = Vec::new();
        tau[1] = 1;
        phi[1] = 1;
        mu[1] = 1;
        spf[1] = 1;
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i);
                tau[i] = 2;
                phi[i] = (i - 1) as u64;
                mu[i] = -1;
                exp[i] = 1;
            }
            for &p in &primes {
                let m = i * p;
                if m >= len || p > spf[i] as usize {
                    break;
                }
                spf[m] = p as u32;
                if p == spf[i] as usize {
                    let e = exp[i] as u32;
                    exp[m] = exp[i] + 1;
                    tau[m] = tau[i] / (e + 1) * (e + 2);
                    phi[m] = phi[i] * p as u64;
                    mu[m] = 0;
                } else {
                    exp[m] = 1;
                    tau[m] = tau[i] * 2;
                    phi[m] = phi[i] * (p as u64 - 1);
                    mu[m] = -mu[i];
                }
            }
        }
        Ok(Self { n_max, tau, phi, mu, spf })
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n as usize > self.n_max {
            return Err(Error::OutOfRange(format!("n = {n} outside 1..={}", self.n_max)));
        }
        Ok(n as usize)
    }

    /// Prime factorization `[(p, e)]` read off the spf array.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut m = self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// Divisors of `n` in increasing order.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        Ok(divisors_from_factors(&self.factorize(n)?))
    }

    /// `c_k(h)` via von Sterneck's formula `μ(k/g)φ(k)/φ(k/g)`, `g = gcd(k, h)`.
    pub fn ramanujan_sum(&self, k: u64, h: i64) -> Result<i64> {
        let ki = self.check(k)?;
        if h == 0 {
            return Ok(self.phi[ki] as i64);
        }
        let g = gcd(k, h.unsigned_abs());
        let kg = (k / g) as usize;
        let m = self.mu[kg] as i64;
        if m == 0 {
            return Ok(0);
        }
        Ok(m * (self.phi[ki] / self.phi[kg]) as i64)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `h` modulo `q` in `[0, q)`; `q = 1` gives 0.
pub fn mod_inverse(h: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let hm = h.rem_euclid(q as i64) as i128;
    let (mut r0, mut r1) = (q as i128, hm);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    if r0 != 1 {
        return Err(Error::InvalidArgument(format!("gcd({h}, {q}) != 1")));
    }
    Ok(t0.rem_euclid(q as i128) as u64)
}

/// Prime factorization by trial division (for arguments outside any table).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors_from_factors(f: &[(u64, u32)]) -> Vec<u64> {
    let mut d = vec![1u64];
    for &(p, e) in f {
        let len = d.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                d.push(d[i] * pk);
            }
        }
    }
    d.sort_unstable();
    d
}

/// Divisors of `n` by trial division, increasing.
pub fn divisors_of(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    divisors_from_factors(&factorize(n))
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn totient(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn num_divisors(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// `c_k(h) = Σ_{d | (k,|h|)} μ(k/d) d`, with `c_k(0) = φ(k)`.
pub fn ramanujan_sum(k: u64, h: i64) -> i64 {
    assert!(k >= 1, "ramanujan_sum needs k >= 1");
    let g = if h == 0 { k } else { gcd(k, h.unsigned_abs()) };
    divisors_of(g).into_iter().map(|d| moebius(k / d) * d as i64).sum()
}

/// `Σ_{d|n} d^a (log d)^k` for `k ∈ {0, 1, 2}`.
pub fn sigma_log(n: u64, a: f64, k: u32) -> Result<f64> {
    if k > 2 {
        return Err(Error::InvalidArgument(format!("k = {k} not in {{0,1,2}}")));
    }
    if n == 0 {
        return Err(Error::OutOfRange("n must be positive".into()));
    }
    let mut terms: Vec<f64> = divisors_of(n)
        .into_iter()
        .map(|d| {
            let l = (d as f64).ln();
            (d as f64).powf(a) * l.powi(k as i32)
        })
        .collect();
    // ascending magnitude keeps the rounding error at a few ulps
    terms.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(terms.iter().sum())
}

/// Euler product `h(a, r, s)` with
/// `Σ_n σ_a(nr) n^{-s} = ζ(s) ζ(s-a) h(a, r, s)`.
pub fn h_complex(a: Complex64, r: u64, s: Complex64) -> Result<Complex64> {
    if a == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("a = 0 makes (1 - p^a) vanish".into()));
    }
    if r == 0 {
        return Err(Error::OutOfRange("r must be positive".into()));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (p, e) in factorize(r) {
        let lp = (p as f64).ln();
        let pa = (a * lp).exp();
        let top = a * (e as f64 + 1.0) * lp;
        let num = Complex64::new(1.0, 0.0) - (-(s - a) * lp).exp() - top.exp() + (top - s * lp).exp();
        acc *= num / (Complex64::new(1.0, 0.0) - pa);
    }
    Ok(acc)
}

/// `Π_{p | n} (1 + 1/(p - 1)) = n / φ(n)`.
pub fn h_factor(n: u64) -> f64 {
    factorize(n).iter().map(|&(p, _)| 1.0 + 1.0 / (p as f64 - 1.0)).product()
}

/// `g(q) = Σ_{r | q} φ(r) / r`.
pub fn g_of(q: u64) -> f64 {
    assert!(q >= 1, "g_of needs q >= 1");
    divisors_of(q).into_iter().map(|r| totient(r) as f64 / r as f64).sum()
}

/// `σ_a(n) = Σ_{d|n} d^a`.
pub fn sigma_real(n: u64, a: f64) -> f64 {
    divisors_of(n).into_iter().map(|d| (d as f64).powf(a)).sum()
}
