//! Exact arithmetic-function tables built by a linear (Euler) sieve.
//!
//! A [`FactorSieve`] stores, for every `n <= limit`, the smallest prime
//! factor, the Möbius value, Euler's totient and the prime base of `n` when
//! `n` is a prime power. The von Mangoldt value is derived from the stored
//! base at read time, so no rounding is baked into the tables.
//!
//! # Cache file format
//!
//! [`FactorSieve::write_cache`] emits a little-endian binary image:
//!
//! | offset | size            | content                          |
//! |--------|-----------------|----------------------------------|
//! | 0      | 8               | magic `b"BVFSIEVE"`              |
//! | 8      | 4               | format version (`u32`, = 1)      |
//! | 12     | 8               | `limit` (`u64`)                  |
//! | 20     | 4·(limit+1)     | `lpf` table, `u32` each          |
//! | ...    | 1·(limit+1)     | `mu` table, `i8` each            |
//! | ...    | 4·(limit+1)     | `phi` table, `u32` each          |
//! | ...    | 4·(limit+1)     | `mangoldt_base` table, `u32` each|
//!
//! Entries 0 and 1 are stored as `lpf = 0/1`, `mu = 0/1`, `phi = 0/1`,
//! `mangoldt_base = 0`.

use std::io::{self, Read, Write};

use crate::error::{invalid, range, Error, Result};
use crate::sum::Accumulator;

/// Default memory budget for the sieve tables, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

const BYTES_PER_ENTRY: u64 = 4 + 1 + 4 + 4;
const CACHE_MAGIC: &[u8; 8] = b"BVFSIEVE";
const CACHE_VERSION: u32 = 1;

/// Immutable tables of lpf, μ, φ and the von Mangoldt base up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSieve {
    limit: u32,
    lpf: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u32>,
    mangoldt_base: Vec<u32>,
}

/// Point values of the arithmetic functions at a single `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArithmeticValues {
    pub lambda: f64,
    pub mu: i8,
    pub phi: u32,
    pub lpf: u32,
}

/// Builds the sieve with the default memory budget.
pub fn build_factor_sieve(limit: u64) -> Result<FactorSieve> {
    FactorSieve::with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

impl FactorSieve {
    pub fn new(limit: u64) -> Result<Self> {
        build_factor_sieve(limit)
    }

    pub fn with_budget(limit: u64, budget_bytes: u64) -> Result<Self> {
        if limit < 2 {
            return invalid(format!("sieve limit must be at least 2, got {limit}"));
        }
        if limit >= u32::MAX as u64 {
            return Err(Error::Resource(format!("sieve limit {limit} exceeds u32 range")));
        }
        let needed = (limit + 1).saturating_mul(BYTES_PER_ENTRY);
        if needed > budget_bytes {
            return Err(Error::Resource(format!(
                "sieve up to {limit} needs {needed} bytes, budget is {budget_bytes}"
            )));
        }
        Ok(Self::linear_sieve(limit as u32))
    }

    fn linear_sieve(limit: u32) -> Self {
        let len = limit as usize + 1;
        let mut lpf = vec![0u32; len];
        let mut mu = vec![0i8; len];
        let mut phi = vec![0u32; len];
        let mut base = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        lpf[1] = 1;
        mu[1] = 1;
        phi[1] = 1;

        for i in 2..len {
            if lpf[i] == 0 {
                lpf[i] = i as u32;
                mu[i] = -1;
                phi[i] = i as u32 - 1;
                base[i] = i as u32;
                primes.push(i as u32);
            }
            let lpf_i = lpf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > lpf_i || m >= len {
                    break;
                }
                lpf[m] = p;
                if p == lpf_i {
                    mu[m] = 0;
                    phi[m] = phi[i] * p;
                    base[m] = if base[i] == p { p } else { 0 };
                } else {
                    mu[m] = -mu[i];
                    phi[m] = phi[i] * (p - 1);
                    base[m] = 0;
                }
            }
        }

        Self { limit, lpf, mu, phi, mangoldt_base: base }
    }

    pub fn limit(&self) -> u64 {
        self.limit as u64
    }

    fn check_index(&self, n: u64) -> Result<usize> {
        if n < 2 || n > self.limit as u64 {
            return range(format!("n = {n} outside [2, {}]", self.limit));
        }
        Ok(n as usize)
    }

    /// Largest integer `<= y`, checked against `[0, limit]`.
    pub(crate) fn floor_index(&self, y: f64) -> Result<usize> {
        if !(y >= 0.0) || y > self.limit as f64 {
            return range(format!("y = {y} outside [0, {}]", self.limit));
        }
        Ok(y.floor() as usize)
    }

    pub fn arithmetic_values(&self, n: u64) -> Result<ArithmeticValues> {
        let i = self.check_index(n)?;
        Ok(ArithmeticValues {
            lambda: self.lambda_unchecked(i),
            mu: self.mu[i],
            phi: self.phi[i],
            lpf: self.lpf[i],
        })
    }

    /// Λ(n) for `n <= limit`; 0 for n < 2.
    #[inline]
    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda_unchecked(n)
    }

    #[inline]
    fn lambda_unchecked(&self, n: usize) -> f64 {
        match self.mangoldt_base[n] {
            0 => 0.0,
            p => (p as f64).ln(),
        }
    }

    /// The prime `p` if `n = p^k`, otherwise 0.
    #[inline]
    pub fn mangoldt_base(&self, n: usize) -> u32 {
        self.mangoldt_base[n]
    }

    #[inline]
    pub fn mu(&self, n: usize) -> i8 {
        self.mu[n]
    }

    #[inline]
    pub fn phi(&self, n: usize) -> u32 {
        self.phi[n]
    }

    #[inline]
    pub fn lpf(&self, n: usize) -> u32 {
        self.lpf[n]
    }

    #[inline]
    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.lpf[n] as usize == n
    }

    /// ψ(y) = Σ_{n ≤ y} Λ(n).
    pub fn chebyshev_psi(&self, y: f64) -> Result<f64> {
        let top = self.floor_index(y)?;
        let mut acc = Accumulator::new();
        for n in 2..=top {
            if self.mangoldt_base[n] != 0 {
                acc.add(self.lambda_unchecked(n));
            }
        }
        Ok(acc.value())
    }

    /// Prime powers `n` with `2 <= n <= top`, in increasing order.
    pub fn prime_powers(&self, top: usize) -> impl Iterator<Item = usize> + '_ {
        let top = top.min(self.limit as usize);
        (2..=top).filter(move |&n| self.mangoldt_base[n] != 0)
    }

    /// Prime factorization of `1 <= n <= limit` as `(p, e)` pairs, ascending in `p`.
    pub fn factorize(&self, n: usize) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.lpf[m];
            let mut e = 0;
            while m % p as usize == 0 {
                m /= p as usize;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// All divisors of `n`, unsorted.
    pub fn divisors(&self, n: usize) -> Vec<usize> {
        let mut divs = vec![1usize];
        for (p, e) in self.factorize(n) {
            let count = divs.len();
            let mut pk = 1usize;
            for _ in 0..e {
                pk *= p as usize;
                for i in 0..count {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs
    }

    pub fn write_cache<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.limit as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.lpf.len() * 4);
        for v in &self.lpf {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        buf.clear();
        buf.extend(self.mu.iter().map(|&m| m as u8));
        w.write_all(&buf)?;
        for table in [&self.phi, &self.mangoldt_base] {
            buf.clear();
            for v in table.iter() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    /// Reads a cache written by [`FactorSieve::write_cache`], re-checking
    /// the header and the consistency of the tables it can check cheaply.
    pub fn read_cache<R: Read>(mut r: R, budget_bytes: u64) -> Result<Self> {
        let io_err = |e: io::Error| Error::Cache(e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io_err)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word).map_err(io_err)?;
        let version = u32::from_le_bytes(word);
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let mut dword = [0u8; 8];
        r.read_exact(&mut dword).map_err(io_err)?;
        let limit = u64::from_le_bytes(dword);
        if limit < 2 || limit >= u32::MAX as u64 {
            return Err(Error::Cache(format!("invalid limit {limit}")));
        }
        let needed = (limit + 1) * BYTES_PER_ENTRY;
        if needed > budget_bytes {
            return Err(Error::Resource(format!(
                "cached sieve needs {needed} bytes, budget is {budget_bytes}"
            )));
        }
        let len = limit as usize + 1;

        let read_u32s = |r: &mut R| -> Result<Vec<u32>> {
            let mut raw = vec![0u8; len * 4];
            r.read_exact(&mut raw).map_err(io_err)?;
            Ok(raw
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect())
        };
        let lpf = read_u32s(&mut r)?;
        let mut raw_mu = vec![0u8; len];
        r.read_exact(&mut raw_mu).map_err(io_err)?;
        let mu: Vec<i8> = raw_mu.into_iter().map(|b| b as i8).collect();
        let phi = read_u32s(&mut r)?;
        let mangoldt_base = read_u32s(&mut r)?;
        if r.read(&mut [0u8; 1]).map_err(io_err)? != 0 {
            return Err(Error::Cache("trailing bytes after tables".into()));
        }

        let sieve = Self { limit: limit as u32, lpf, mu, phi, mangoldt_base };
        for n in 2..len {
            let p = sieve.lpf[n] as usize;
            if p < 2 || n % p != 0 || !(-1..=1).contains(&sieve.mu[n]) {
                return Err(Error::Cache(format!("inconsistent entry at n = {n}")));
            }
        }
        Ok(sieve)
    }
}
