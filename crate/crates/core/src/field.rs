//! Table-driven arithmetic in GF(p^m).
//!
//! Elements are packed as base-p integers: the coefficient of `x^i` in the
//! polynomial representative is digit `i`. Multiplication and inversion go
//! through discrete-logarithm tables relative to a fixed primitive element
//! `β = x`, the root of the lexicographically least primitive polynomial.

use thiserror::Error;

/// Default ceiling on `p^m` for table construction.
pub const DEFAULT_TABLE_LIMIT: u64 = 1 << 24;

/// Packed field element.
pub type Element = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {order} exceeds table limit {limit}")]
    TooLarge { order: u128, limit: u64 },
    #[error("no primitive polynomial of degree {m} over GF({p}) found")]
    NoPrimitivePolynomial { p: u32, m: u32 },
    #[error("{0} is undefined for the zero element")]
    Domain(&'static str),
    #[error("{value} is not an element of GF({order})")]
    NotAnElement { value: u32, order: u32 },
}

/// GF(p^m) with log/antilog tables.
#[derive(Debug, Clone)]
pub struct FieldTable {
    p: u32,
    m: u32,
    order: u32,
    /// Monic modulus, coefficients low-to-high (length `m + 1`).
    modulus: Vec<u32>,
    antilog: Vec<Element>,
    log: Vec<u32>,
}

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

/// Distinct prime factors, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
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

/// Splits a prime power `q = p^m`, or returns `None`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut m = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        m += 1;
    }
    Some((p as u32, m))
}

/// Polynomials over GF(p), coefficients low-to-high, used only while
/// searching for the modulus.
struct PolyRing<'a> {
    p: u64,
    modulus: &'a [u64],
}

impl PolyRing<'_> {
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn mul_mod(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.degree();
        let mut prod = vec![0u64; 2 * m];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % self.p;
            }
        }
        // modulus is monic, so x^m = -(lower terms)
        for top in (m..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &mi) in self.modulus[..m].iter().enumerate() {
                let idx = top - m + i;
                prod[idx] = (prod[idx] + (self.p - c) * mi) % self.p;
            }
        }
        prod.truncate(m);
        prod
    }

    fn pow_x(&self, mut e: u64) -> Vec<u64> {
        let m = self.degree();
        let mut result = vec![0u64; m];
        result[0] = 1;
        let mut base = vec![0u64; m];
        if m == 1 {
            // x reduces to -c0
            base[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            base[1] = 1;
        }
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_mod(&result, &base);
            }
            base = self.mul_mod(&base, &base);
            e >>= 1;
        }
        result
    }

    fn is_one(v: &[u64]) -> bool {
        v[0] == 1 && v[1..].iter().all(|&c| c == 0)
    }

    /// `x` generates the unit group of GF(p)[x]/(f) of order p^m - 1, which
    /// forces f irreducible and primitive.
    fn x_is_primitive(&self, group_order: u64, factors: &[u64]) -> bool {
        if self.modulus[0] == 0 {
            return false;
        }
        if !Self::is_one(&self.pow_x(group_order)) {
            return false;
        }
        factors
            .iter()
            .all(|&r| !Self::is_one(&self.pow_x(group_order / r)))
    }
}

impl FieldTable {
    pub fn new(p: u32, m: u32) -> Result<Self, FieldError> {
        Self::with_limit(p, m, DEFAULT_TABLE_LIMIT)
    }

    pub fn with_limit(p: u32, m: u32, limit: u64) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if order > limit as u128 || order > u32::MAX as u128 {
            return Err(FieldError::TooLarge { order, limit });
        }
        let order = order as u32;
        let modulus = least_primitive_polynomial(p, m)?;
        let (antilog, log) = build_tables(p, m, order, &modulus);
        Ok(Self {
            p,
            m,
            order,
            modulus: modulus.iter().map(|&c| c as u32).collect(),
            antilog,
            log,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements, `p^m`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Order of the multiplicative group, `p^m - 1`.
    pub fn group_order(&self) -> u32 {
        self.order - 1
    }

    /// Modulus coefficients low-to-high, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn one(&self) -> Element {
        1
    }

    /// The primitive element β.
    pub fn primitive(&self) -> Element {
        self.antilog[1 % self.antilog.len()]
    }

    pub fn contains(&self, a: Element) -> bool {
        a < self.order
    }

    pub fn check(&self, a: Element) -> Result<Element, FieldError> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(FieldError::NotAnElement {
                value: a,
                order: self.order,
            })
        }
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: Element) -> Element {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        if a == 0 || b == 0 {
            return 0;
        }
        let g = self.group_order() as u64;
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % g;
        self.antilog[e as usize]
    }

    pub fn inv(&self, a: Element) -> Result<Element, FieldError> {
        if a == 0 {
            return Err(FieldError::Domain("inverse"));
        }
        let g = self.group_order();
        let e = (g - self.log[a as usize]) % g;
        Ok(self.antilog[e as usize])
    }

    /// Discrete log base β, in `[0, p^m - 2]`.
    pub fn log(&self, a: Element) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::Domain("logarithm"));
        }
        Ok(self.log[a as usize])
    }

    /// β^e for any integer exponent (reduced mod `p^m - 1`).
    pub fn exp(&self, e: i64) -> Element {
        let g = self.group_order() as i64;
        self.antilog[e.rem_euclid(g) as usize]
    }

    pub fn pow(&self, a: Element, e: u64) -> Element {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let g = self.group_order() as u64;
        let l = self.log[a as usize] as u64;
        self.antilog[((l * (e % g)) % g) as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Element) -> Result<u32, FieldError> {
        let l = self.log(a)? as u64;
        let g = self.group_order() as u64;
        Ok((g / num_integer::gcd(l, g)) as u32)
    }

    pub fn antilog_table(&self) -> &[Element] {
        &self.antilog
    }
}

fn least_primitive_polynomial(p: u32, m: u32) -> Result<Vec<u64>, FieldError> {
    let p64 = p as u64;
    let order = p64.pow(m);
    let group_order = order - 1;
    let factors = prime_factors(group_order);
    let mut coeffs = vec![0u64; m as usize + 1];
    coeffs[m as usize] = 1;
    // Lower coefficients read high-to-low form a base-p counter, so counting
    // upward visits monic polynomials in lexicographic order.
    for idx in 0..order {
        let mut r = idx;
        for c in coeffs.iter_mut().take(m as usize) {
            *c = r % p64;
            r /= p64;
        }
        let ring = PolyRing {
            p: p64,
            modulus: &coeffs,
        };
        if ring.x_is_primitive(group_order, &factors) {
            return Ok(coeffs);
        }
    }
    Err(FieldError::NoPrimitivePolynomial { p, m })
}

fn build_tables(p: u32, m: u32, order: u32, modulus: &[u64]) -> (Vec<Element>, Vec<u32>) {
    let g = (order - 1) as usize;
    let mut antilog = Vec::with_capacity(g);
    let mut log = vec![u32::MAX; order as usize];
    let mut digits = vec![0u32; m as usize];
    digits[0] = 1;
    for e in 0..g {
        let packed = digits.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        antilog.push(packed);
        log[packed as usize] = e as u32;
        // multiply by x
        let carry = digits[m as usize - 1];
        for i in (1..m as usize).rev() {
            digits[i] = digits[i - 1];
        }
        digits[0] = 0;
        if carry != 0 {
            for (d, &c) in digits.iter_mut().zip(modulus.iter()) {
                *d = (*d + (p - carry) * c as u32) % p;
            }
        }
    }
    debug_assert!(antilog.first() == Some(&1));
    (antilog, log)
}
