use std::fmt;
use std::sync::Arc;

use super::poly::FieldPolynomial;
use super::GfError;

/// A field element, encoded as an integer in `[0, p^k)`.
///
/// For prime fields this is the residue itself. For extensions the base-`p`
/// digits of the code are the coefficients of the reduced residue polynomial,
/// lowest degree first.
pub type Elem = u32;

/// Largest field order accepted for proper extensions (log/exp tables).
pub const MAX_EXTENSION_ORDER: u32 = 1 << 16;

#[derive(Debug)]
struct ExtTables {
    exp: Vec<Elem>,
    log: Vec<u32>,
}

/// A finite field GF(p^k).
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    k: u32,
    order: u32,
    modulus: Option<FieldPolynomial>,
    tables: Option<Arc<ExtTables>>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.modulus {
            None => write!(f, "GF({})", self.p),
            Some(m) => write!(f, "GF({}^{}) mod {:?}", self.p, self.k, m.coeffs()),
        }
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.k)
        }
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteField {
    /// Builds GF(p^k).
    ///
    /// For `k > 1` the modulus is either checked (monic, degree `k`,
    /// irreducible over GF(p)) or, when absent, the least irreducible monic
    /// polynomial of degree `k` in coefficient-code order is used.
    pub fn new(p: u32, k: u32, modulus: Option<FieldPolynomial>) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if k == 0 {
            return Err(GfError::DegreeMismatch { expected: 1, found: 0 });
        }
        let prime = FiniteField::prime(p)?;
        if k == 1 {
            if let Some(m) = &modulus {
                if m.degree() != Some(1) {
                    return Err(GfError::DegreeMismatch {
                        expected: 1,
                        found: m.degree().unwrap_or(0),
                    });
                }
            }
            return Ok(prime);
        }
        let order = (p as u64).checked_pow(k).filter(|&q| q <= MAX_EXTENSION_ORDER as u64);
        let order = order.ok_or(GfError::FieldTooLarge { p, k })? as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.coeffs().iter().any(|&c| c >= p) {
                    return Err(GfError::ElementOutOfRange { value: p, order: p });
                }
                if m.degree() != Some(k as usize) {
                    return Err(GfError::DegreeMismatch {
                        expected: k as usize,
                        found: m.degree().unwrap_or(0),
                    });
                }
                if !m.is_monic() {
                    return Err(GfError::NotMonic);
                }
                if !m.is_irreducible(&prime)? {
                    return Err(GfError::ReducibleModulus);
                }
                m
            }
            None => FieldPolynomial::monic_of_degree(&prime, k as usize)
                .find(|f| f.is_irreducible(&prime).unwrap_or(false))
                .expect("an irreducible polynomial of every degree exists"),
        };
        let tables = build_tables(p, k, order, &modulus);
        Ok(FiniteField {
            p,
            k,
            order,
            modulus: Some(modulus),
            tables: Some(Arc::new(tables)),
        })
    }

    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        Ok(FiniteField { p, k: 1, order: p, modulus: None, tables: None })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Number of elements, `p^k`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> Option<&FieldPolynomial> {
        self.modulus.as_ref()
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        1
    }

    /// Checks an integer code and returns it as an element.
    pub fn elem(&self, code: u64) -> Result<Elem, GfError> {
        if code >= self.order as u64 {
            return Err(GfError::ElementOutOfRange { value: code.min(u32::MAX as u64) as u32, order: self.order });
        }
        Ok(code as Elem)
    }

    /// Image of an integer under the ring map Z -> GF(p^k).
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    /// Every element in code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.k == 1 {
            let s = a as u64 + b as u64;
            let p = self.p as u64;
            (if s >= p { s - p } else { s }) as Elem
        } else if self.p == 2 {
            a ^ b
        } else {
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
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.k == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else if self.p == 2 {
            a
        } else {
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
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            None => ((a as u64 * b as u64) % self.p as u64) as Elem,
            Some(t) => {
                let n = self.order as usize - 1;
                let s = t.log[a as usize] as usize + t.log[b as usize] as usize;
                t.exp[if s >= n { s - n } else { s }]
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        match &self.tables {
            None => Some(self.pow(a, (self.p - 2) as u64)),
            Some(t) => {
                let n = self.order as usize - 1;
                let l = t.log[a as usize] as usize;
                Some(t.exp[(n - l) % n])
            }
        }
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a * b + c`, the inner step of every elimination.
    #[inline]
    pub fn mul_add(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.add(self.mul(a, b), c)
    }
}

/// Multiplication of residues mod `modulus` over GF(p), used only to seed
/// the log/exp tables.
fn slow_mul(p: u32, k: u32, modulus: &FieldPolynomial, a: Elem, b: Elem) -> Elem {
    let digits = |mut x: u32| {
        let mut v = vec![0u64; k as usize];
        for d in v.iter_mut() {
            *d = (x % p) as u64;
            x /= p;
        }
        v
    };
    let (da, db) = (digits(a), digits(b));
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * k as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p64;
        }
    }
    let m: Vec<u64> = modulus.coeffs().iter().map(|&c| c as u64).collect();
    for deg in (k as usize..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        // x^k = -(m_0 + ... + m_{k-1} x^{k-1})
        for (i, &mi) in m.iter().enumerate().take(k as usize) {
            let idx = deg - k as usize + i;
            prod[idx] = (prod[idx] + (p64 - (c * mi) % p64)) % p64;
        }
        prod[deg] = 0;
    }
    let mut out = 0u64;
    for &d in prod[..k as usize].iter().rev() {
        out = out * p64 + d;
    }
    out as Elem
}

fn build_tables(p: u32, k: u32, order: u32, modulus: &FieldPolynomial) -> ExtTables {
    let n = order as usize - 1;
    for g in 2..order.max(3) {
        let mut exp = Vec::with_capacity(n);
        let mut x: Elem = 1;
        let mut ok = true;
        for i in 0..n {
            if i > 0 && x == 1 {
                ok = false;
                break;
            }
            exp.push(x);
            x = slow_mul(p, k, modulus, x, g);
        }
        if ok && x == 1 {
            let mut log = vec![0u32; order as usize];
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            return ExtTables { exp, log };
        }
    }
    // GF(2^1) never reaches here: k > 1 implies order >= 4.
    unreachable!("multiplicative group of a finite field is cyclic")
}
