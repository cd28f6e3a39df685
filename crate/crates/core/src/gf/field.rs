//! Arithmetic in GF(q) for q = p^m.
//!
//! Elements are encoded as integers `0..q`. For extension fields the integer
//! is read as the base-`p` digit vector of the polynomial coefficients (least
//! significant digit = constant term). Multiplication goes through log/antilog
//! tables generated by `x` modulo a fixed primitive polynomial.

use std::fmt;

use thiserror::Error;

/// Element of a finite field in the integer encoding described above.
pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unsupported field GF({p}^{m})")]
    Unsupported { p: u64, m: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field self-check failed for GF({q}): {what}")]
    SelfCheck { q: u64, what: &'static str },
}

/// Primitive polynomials shipped with the crate, as `(p, m, coefficients)`
/// with coefficients listed from the constant term up, leading 1 omitted.
const PRIMITIVE_POLYS: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (2, 5, &[1, 0, 1, 0, 0]),
    (2, 6, &[1, 1, 0, 0, 0, 0]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0]),
    (3, 2, &[2, 2]),
    (3, 3, &[1, 2, 0]),
    (3, 4, &[2, 0, 0, 2]),
    (3, 5, &[1, 2, 0, 0, 0]),
    (5, 2, &[2, 4]),
    (5, 3, &[3, 3, 0]),
    (7, 2, &[3, 6]),
    (11, 2, &[2, 7]),
    (13, 2, &[2, 12]),
];

#[derive(Clone)]
enum Kind {
    Prime,
    Extension {
        /// Monic modulus, constant term first, leading coefficient included.
        modulus: Vec<u32>,
        /// `log[a]` for nonzero `a`; `log[0]` unused.
        log: Vec<u32>,
        /// `exp[i] = x^i`, doubled so that `exp[log a + log b]` needs no reduction.
        exp: Vec<u32>,
    },
}

/// A finite field GF(p^m).
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    kind: Kind,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}", self.p)?;
        if self.m > 1 {
            write!(f, "^{}", self.m)?;
        }
        write!(f, ")")
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}

impl Eq for FieldSpec {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    /// Builds GF(p^m). Prime fields accept any prime `p < 2^31`; extension
    /// fields require `p^m <= 2^16`.
    pub fn new(p: u64, m: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::Unsupported { p, m });
        }
        if m == 1 {
            if p >= 1 << 31 {
                return Err(FieldError::Unsupported { p, m });
            }
            return Ok(FieldSpec {
                p: p as u32,
                m: 1,
                q: p as u32,
                kind: Kind::Prime,
            });
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= 1 << 16)
            .ok_or(FieldError::Unsupported { p, m })?;
        let (p, q) = (p as u32, q as u32);

        let embedded = PRIMITIVE_POLYS
            .iter()
            .find(|(pp, mm, _)| *pp == p && *mm == m)
            .map(|(_, _, c)| c.to_vec());
        let tables = match embedded {
            Some(low) => {
                let mut modulus = low;
                modulus.push(1);
                build_tables(p, m, q, &modulus).map(|(log, exp)| (modulus, log, exp))
            }
            None => search_primitive(p, m, q),
        };
        let (modulus, log, exp) = tables.ok_or(FieldError::SelfCheck {
            q: q as u64,
            what: "modulus is not primitive",
        })?;
        let field = FieldSpec {
            p,
            m,
            q,
            kind: Kind::Extension { modulus, log, exp },
        };
        if q <= 256 {
            field.self_check()?;
        }
        Ok(field)
    }

    /// Builds GF(q) from the field order.
    pub fn from_order(q: u64) -> Result<Self, FieldError> {
        let (p, m) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        FieldSpec::new(p, m)
    }

    pub fn gf2() -> Self {
        FieldSpec::new(2, 1).expect("GF(2)")
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.kind {
            Kind::Prime => {
                let s = a as u64 + b as u64;
                (s % self.p as u64) as Elem
            }
            Kind::Extension { .. } if self.p == 2 => a ^ b,
            Kind::Extension { .. } => self.digitwise(a, b, |x, y| (x + y) % self.p),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.kind {
            Kind::Prime => {
                if a == 0 {
                    0
                } else {
                    self.p - a
                }
            }
            Kind::Extension { .. } if self.p == 2 => a,
            Kind::Extension { .. } => self.digitwise(0, a, |_, y| (self.p - y) % self.p),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.kind {
            Kind::Prime => ((a as u64 * b as u64) % self.p as u64) as Elem,
            Kind::Extension { log, exp, .. } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        match &self.kind {
            Kind::Prime => Some(pow_mod(a as u64, self.p as u64 - 2, self.p as u64) as Elem),
            Kind::Extension { log, exp, .. } => {
                let order = self.q - 1;
                let l = log[a as usize];
                Some(exp[((order - l) % order) as usize])
            }
        }
    }

    /// The modulus polynomial (constant term first) of an extension field.
    pub fn modulus(&self) -> Option<&[u32]> {
        match &self.kind {
            Kind::Prime => None,
            Kind::Extension { modulus, .. } => Some(modulus),
        }
    }

    fn digitwise(&self, a: Elem, b: Elem, f: impl Fn(u32, u32) -> u32) -> Elem {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            out += f(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    /// Compares the table multiplication against schoolbook polynomial
    /// multiplication modulo the modulus for every pair, and checks inverses.
    fn self_check(&self) -> Result<(), FieldError> {
        let fail = |what| FieldError::SelfCheck {
            q: self.q as u64,
            what,
        };
        let modulus = self.modulus().unwrap_or(&[]);
        for a in 0..self.q {
            if a != 0 {
                let inv = self.inv(a).ok_or(fail("missing inverse"))?;
                if self.mul(a, inv) != 1 {
                    return Err(fail("inverse"));
                }
            }
            if self.add(a, self.neg(a)) != 0 {
                return Err(fail("additive inverse"));
            }
            for b in 0..self.q {
                if self.mul(a, b) != self.mul(b, a) || self.add(a, b) != self.add(b, a) {
                    return Err(fail("commutativity"));
                }
                if self.m > 1 && self.mul(a, b) != poly_mulmod(self.p, self.m, modulus, a, b) {
                    return Err(fail("table product disagrees with polynomial product"));
                }
            }
        }
        Ok(())
    }
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// Returns `(p, m)` with `q = p^m`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn to_digits(p: u32, m: u32, mut a: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn from_digits(p: u32, digits: &[u32]) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn poly_mulmod(p: u32, m: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let (da, db) = (to_digits(p, m, a), to_digits(p, m, b));
    let m = m as usize;
    let mut prod = vec![0u32; 2 * m - 1];
    for i in 0..m {
        for j in 0..m {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    for k in (m..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (i, &mc) in modulus.iter().enumerate().take(m) {
            let t = prod[k - m + i] + (p - c) * mc % p;
            prod[k - m + i] = t % p;
        }
        prod[k] = 0;
    }
    from_digits(p, &prod[..m])
}

/// Walks the powers of `x`; returns tables iff `x` generates the full
/// multiplicative group (i.e. the modulus is primitive).
fn build_tables(p: u32, m: u32, q: u32, modulus: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
    let order = (q - 1) as usize;
    let mut log = vec![u32::MAX; q as usize];
    let mut exp = vec![0u32; 2 * order];
    let mut cur = vec![0u32; m as usize];
    cur[0] = 1;
    for i in 0..order {
        let enc = from_digits(p, &cur);
        if log[enc as usize] != u32::MAX {
            return None;
        }
        log[enc as usize] = i as u32;
        exp[i] = enc;
        // multiply by x
        let top = cur[m as usize - 1];
        for k in (1..m as usize).rev() {
            cur[k] = cur[k - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for k in 0..m as usize {
                cur[k] = (cur[k] + (p - top) * modulus[k] % p) % p;
            }
        }
    }
    if from_digits(p, &cur) != 1 {
        return None;
    }
    for i in 0..order {
        exp[order + i] = exp[i];
    }
    Some((log, exp))
}

type Tables = (Vec<u32>, Vec<u32>, Vec<u32>);

fn search_primitive(p: u32, m: u32, q: u32) -> Option<Tables> {
    // lexicographically smallest (by encoded lower coefficients) primitive modulus
    (1..q).find_map(|low| {
        let mut modulus = to_digits(p, m, low);
        if modulus[0] == 0 {
            return None;
        }
        modulus.push(1);
        build_tables(p, m, q, &modulus).map(|(log, exp)| (modulus, log, exp))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_one_plus_one() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
    }

    #[test]
    fn gf3_inverse_of_two() {
        let f = FieldSpec::new(3, 1).unwrap();
        assert_eq!(f.inv(2), Some(2));
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn gf4_x_squared() {
        let f = FieldSpec::new(2, 2).unwrap();
        // x = 2, x + 1 = 3
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.modulus(), Some(&[1, 1, 1][..]));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(
            FieldSpec::new(2, 17),
            Err(FieldError::Unsupported { .. })
        ));
        assert!(matches!(
            FieldSpec::new(2, 0),
            Err(FieldError::Unsupported { .. })
        ));
        assert!(FieldSpec::from_order(6).is_err());
    }

    #[test]
    fn all_small_fields_pass_self_check() {
        for q in 2..=256u64 {
            if let Some((p, m)) = prime_power(q) {
                let f = FieldSpec::new(p, m).unwrap();
                assert_eq!(f.order() as u64, q);
            }
        }
    }

    #[test]
    fn searched_extension_field() {
        // GF(2^9) and GF(3^6) are not in the embedded list.
        for (p, m) in [(2u64, 9u32), (3, 6), (17, 2)] {
            let f = FieldSpec::new(p, m).unwrap();
            for a in 1..f.order() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            let modulus = f.modulus().unwrap().to_vec();
            for a in (0..f.order()).step_by(7) {
                for b in (0..f.order()).step_by(11) {
                    assert_eq!(f.mul(a, b), poly_mulmod(p as u32, m, &modulus, a, b));
                }
            }
        }
    }

    #[test]
    fn large_prime_field() {
        let p = 2_147_483_647u64;
        let f = FieldSpec::new(p, 1).unwrap();
        let a = 123_456_789;
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        assert_eq!(f.add(p as u32 - 1, 1), 0);
    }

    #[test]
    fn prime_power_factoring() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(1024), Some((2, 10)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
