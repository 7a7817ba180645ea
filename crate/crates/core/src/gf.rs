//! Exact arithmetic over GF(p^m) for prime p and p^m up to 2^16.
//!
//! Elements are integers in `[0, q)` packing polynomial coefficients base-p
//! (digit i is the coefficient of x^i); 0 and 1 are the additive and
//! multiplicative identities. The reduction modulus is the lexicographically
//! smallest monic irreducible of degree m, so every enumeration downstream is
//! reproducible run to run. Multiplication goes through discrete log/antilog
//! tables built from the smallest generator.

use crate::{Error, Result};

const SIZE_CAP: u64 = 1 << 16;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns (p, m) with n = p^m when n is a prime power, n >= 2.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = 0;
            let mut rest = n;
            while rest.is_multiple_of(p) {
                rest /= p;
                m += 1;
            }
            return if rest == 1 { Some((p, m)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}

#[derive(Debug, Clone)]
pub struct FieldTable {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficient of x^i at index i, length m+1.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl FieldTable {
    pub fn new(p: u64, m: u32) -> Result<FieldTable> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::BadParams("extension degree must be positive".into()));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= SIZE_CAP)
            .ok_or(Error::FieldTooLarge(p.saturating_pow(m), SIZE_CAP))?;
        let p = p as u32;
        let q = q as u32;
        let modulus = smallest_irreducible(p, m);
        let mut table = FieldTable {
            p,
            m,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        table.build_log_tables();
        Ok(table)
    }

    /// Field order q = p^m.
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    fn check(&self, a: u32) -> Result<u32> {
        if a < self.q {
            Ok(a)
        } else {
            Err(Error::ElementRange(a, self.q))
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if self.p == 2 {
            return a ^ b;
        }
        let mut out = 0;
        let mut mult = 1;
        let (mut a, mut b) = (a, b);
        while a > 0 || b > 0 {
            out += ((a + b) % self.p) * mult;
            mult *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(a < self.q);
        if self.p == 2 {
            return a;
        }
        let mut out = 0;
        let mut mult = 1;
        let mut a = a;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * mult;
            mult *= self.p;
            a /= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if a == 0 || b == 0 {
            return 0;
        }
        let idx = (self.log[a as usize] as u64 + self.log[b as usize] as u64)
            % (self.q as u64 - 1);
        self.exp[idx as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let idx = (self.q - 1 - self.log[a as usize]) % (self.q - 1);
        Ok(self.exp[idx as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let idx = (self.log[a as usize] as u64 * (e % (self.q as u64 - 1)))
            % (self.q as u64 - 1);
        self.exp[idx as usize]
    }

    /// Slow multiplication through the polynomial representation; used to
    /// seed the log tables and as an independent route in tests.
    pub fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let pa = unpack(a, self.p, self.m);
        let pb = unpack(b, self.p, self.m);
        let p = self.p as u64;
        let mut prod = vec![0u64; (2 * self.m) as usize];
        for (i, &ca) in pa.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in pb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ca as u64 * cb as u64) % p;
            }
        }
        poly_rem(&mut prod, &self.modulus, self.p);
        pack_u64(&prod, self.p)
    }

    fn build_log_tables(&mut self) {
        let q = self.q as usize;
        if q == 2 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return;
        }
        let group_order = (q - 1) as u64;
        let factors = distinct_prime_factors(group_order);
        let generator = (2..self.q)
            .find(|&c| {
                factors
                    .iter()
                    .all(|&f| self.poly_pow(c, group_order / f) != 1)
            })
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(q - 1);
        let mut log = vec![0u32; q];
        let mut acc = 1u32;
        for i in 0..q - 1 {
            exp.push(acc);
            log[acc as usize] = i as u32;
            acc = self.poly_mul(acc, generator);
        }
        debug_assert_eq!(acc, 1);
        self.exp = exp;
        self.log = log;
    }

    fn poly_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul(acc, base);
            }
            base = self.poly_mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn unpack(mut a: u32, p: u32, m: u32) -> Vec<u32> {
    let mut out = vec![0; m as usize];
    for digit in out.iter_mut() {
        *digit = a % p;
        a /= p;
    }
    out
}

fn pack_u64(coeffs: &[u64], p: u32) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| acc * p as u64 + c) as u32
}

/// In-place remainder of `a` modulo the monic polynomial `m` over GF(p).
fn poly_rem(a: &mut [u64], m: &[u32], p: u32) {
    let p = p as u64;
    let dm = m.len() - 1;
    for i in (dm..a.len()).rev() {
        let c = a[i];
        if c == 0 {
            continue;
        }
        a[i] = 0;
        for (j, &mc) in m.iter().enumerate().take(dm) {
            let idx = i - dm + j;
            a[idx] = (a[idx] + c * ((p - mc as u64) % p)) % p;
        }
    }
}

fn poly_is_zero_u32(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Lexicographically smallest monic irreducible of degree m over GF(p):
/// candidates are scanned in increasing order of their packed low
/// coefficients, and checked by trial division against every monic
/// polynomial of degree up to m/2.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    if m == 1 {
        return vec![0, 1]; // x
    }
    let mut low = vec![0u32; m as usize];
    loop {
        let mut candidate = low.clone();
        candidate.push(1);
        if is_irreducible(&candidate, p) {
            return candidate;
        }
        // increment the low part as a base-p counter
        for digit in low.iter_mut() {
            *digit += 1;
            if *digit < p {
                break;
            }
            *digit = 0;
        }
        assert!(
            !poly_is_zero_u32(&low),
            "an irreducible of degree {m} over GF({p}) must exist"
        );
    }
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    // constant term zero means x divides f
    if f[0] == 0 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        // all monic divisors of degree d, low coefficients as base-p counter
        let mut low = vec![0u32; d];
        loop {
            let mut g = low.clone();
            g.push(1);
            let mut rem: Vec<u64> = f.iter().map(|&c| c as u64).collect();
            poly_rem(&mut rem, &g, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
            let mut done = true;
            for digit in low.iter_mut() {
                *digit += 1;
                if *digit < p {
                    done = false;
                    break;
                }
                *digit = 0;
            }
            if done {
                break;
            }
        }
    }
    true
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
