//! Table-backed arithmetic in GF(ℓ^z).
//!
//! An element is stored as the base-ℓ packing of the coefficient vector of its
//! residue polynomial: `rep = c0 + c1·ℓ + ... + c_{z-1}·ℓ^{z-1}`. Addition,
//! multiplication, negation and inversion are looked up in tables built once
//! when the field is constructed, so a [`Field`] is cheap to clone and share.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order for which the |F|² operation tables are built.
pub const MAX_ORDER: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("modulus {modulus:?} is reducible over Z_{characteristic}; factor {factor:?}")]
    NotIrreducible {
        characteristic: u32,
        modulus: Vec<u32>,
        /// A monic factor of degree `1..=z/2`, coefficients from degree 0 upward.
        factor: Vec<u32>,
    },
    #[error("modulus {modulus:?} is not a monic polynomial of degree {degree}")]
    DegreeMismatch { degree: u32, modulus: Vec<u32> },
    #[error("field order {characteristic}^{degree} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge { characteristic: u32, degree: u32 },
    #[error("element {rep} is outside a field of order {order}")]
    InvalidElement { rep: u32, order: usize },
    #[error("the additive identity has no multiplicative inverse")]
    ZeroInverse,
}

/// An element of a finite field, identified by its integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Element(u16);

impl Element {
    pub const ZERO: Element = Element(0);
    pub const ONE: Element = Element(1);

    #[inline]
    pub fn rep(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }

    /// Callers must index into a table sized by a field order.
    #[inline]
    pub(crate) fn from_index(i: usize) -> Element {
        debug_assert!(i < MAX_ORDER);
        Element(i as u16)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    characteristic: u32,
    degree: u32,
    modulus: Vec<u32>,
    order: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

/// The finite field GF(ℓ^z) with precomputed operation tables.
///
/// Cloning shares the tables.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("characteristic", &self.t.characteristic)
            .field("degree", &self.t.degree)
            .field("modulus", &self.t.modulus)
            .finish()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.degree == 1 {
            write!(f, "GF({})", self.t.characteristic)
        } else {
            write!(f, "GF({}^{})", self.t.characteristic, self.t.degree)
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.characteristic == other.t.characteristic && self.t.modulus == other.t.modulus)
    }
}

impl Eq for Field {}

impl Field {
    /// Builds GF(ℓ^z). Without an explicit modulus the smallest monic
    /// irreducible polynomial of degree `z` is used, where polynomials are
    /// ordered by their coefficients from the highest degree down (equivalently
    /// by the integer value of the polynomial evaluated at ℓ).
    ///
    /// `modulus` lists coefficients from degree 0 upward and must have `z + 1`
    /// entries with a leading 1.
    pub fn new(characteristic: u32, degree: u32, modulus: Option<&[u32]>) -> Result<Self, FieldError> {
        if !is_prime(characteristic) {
            return Err(FieldError::NotPrime(characteristic));
        }
        if degree == 0 {
            return Err(FieldError::DegreeMismatch {
                degree,
                modulus: modulus.map(<[u32]>::to_vec).unwrap_or_default(),
            });
        }
        let order = (characteristic as u64)
            .checked_pow(degree)
            .filter(|&o| o <= MAX_ORDER as u64)
            .ok_or(FieldError::TooLarge { characteristic, degree })? as usize;

        let modulus = match modulus {
            Some(m) => {
                let monic =
                    m.len() == degree as usize + 1 && m.last() == Some(&1) && m.iter().all(|&c| c < characteristic);
                if !monic {
                    return Err(FieldError::DegreeMismatch { degree, modulus: m.to_vec() });
                }
                if let Some(factor) = find_factor(m, characteristic) {
                    return Err(FieldError::NotIrreducible { characteristic, modulus: m.to_vec(), factor });
                }
                m.to_vec()
            }
            None => default_modulus(characteristic, degree),
        };

        Ok(Field { t: Arc::new(build_tables(characteristic, degree, modulus, order)) })
    }

    /// The prime field Z_p.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Field::new(p, 1, None)
    }

    /// GF(2).
    pub fn binary() -> Self {
        Field::prime(2).expect("2 is prime")
    }

    pub fn characteristic(&self) -> u32 {
        self.t.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.t.degree
    }

    /// Modulus coefficients from degree 0 upward.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    pub fn order(&self) -> usize {
        self.t.order
    }

    /// log₂|F|.
    pub fn log2_order(&self) -> f64 {
        (self.t.order as f64).log2()
    }

    pub fn is_binary(&self) -> bool {
        self.t.order == 2
    }

    pub fn element(&self, rep: u32) -> Result<Element, FieldError> {
        if (rep as usize) < self.t.order {
            Ok(Element(rep as u16))
        } else {
            Err(FieldError::InvalidElement { rep, order: self.t.order })
        }
    }

    /// The element `x`, i.e. the class of the indeterminate. In a prime
    /// field this is just the integer ℓ mod ℓ = 0, so it is only meaningful
    /// for extension fields.
    pub fn generator_x(&self) -> Element {
        Element((self.t.characteristic as usize % self.t.order) as u16)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + Clone {
        (0..self.t.order as u16).map(Element)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Element> + Clone {
        (1..self.t.order as u16).map(Element)
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        Element(self.t.add[a.idx() * self.t.order + b.idx()])
    }

    #[inline]
    pub fn neg(&self, a: Element) -> Element {
        Element(self.t.neg[a.idx()])
    }

    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        Element(self.t.mul[a.idx() * self.t.order + b.idx()])
    }

    pub fn inv(&self, a: Element) -> Result<Element, FieldError> {
        if a.is_zero() {
            Err(FieldError::ZeroInverse)
        } else {
            Ok(Element(self.t.inv[a.idx()]))
        }
    }

    pub fn div(&self, a: Element, b: Element) -> Result<Element, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Element, mut e: u64) -> Element {
        let mut base = a;
        let mut acc = Element::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Base-ℓ coefficient digits of an element, degree 0 first.
    pub fn coefficients(&self, a: Element) -> Vec<u32> {
        digits(a.0 as u32, self.t.characteristic, self.t.degree as usize)
    }

    /// Element-wise `a ⊕ b` over vectors.
    pub fn add_vec(&self, a: &[Element], b: &[Element]) -> Vec<Element> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(&self, a: &[Element], b: &[Element]) -> Vec<Element> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    /// `c ⊙ v`.
    pub fn scale_vec(&self, c: Element, v: &[Element]) -> Vec<Element> {
        v.iter().map(|&x| self.mul(c, x)).collect()
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn digits(mut v: u32, base: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v % base);
        v /= base;
    }
    out
}

fn pack(coeffs: &[u32], base: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * base + c)
}

/// Remainder of `num` divided by the monic polynomial `den` over Z_p.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Smallest monic factor of degree `1..=deg/2`, if any.
fn find_factor(modulus: &[u32], p: u32) -> Option<Vec<u32>> {
    let z = modulus.len() - 1;
    for d in 1..=z / 2 {
        for low in 0..p.pow(d as u32) {
            let mut cand = digits(low, p, d);
            cand.push(1);
            if poly_rem(modulus, &cand, p).iter().all(|&c| c == 0) {
                return Some(cand);
            }
        }
    }
    None
}

fn default_modulus(p: u32, z: u32) -> Vec<u32> {
    if z == 1 {
        return vec![0, 1];
    }
    // Enumerating the low coefficients as a base-p counter visits the
    // candidates in increasing order of their value at p.
    (0..p.pow(z))
        .map(|low| {
            let mut cand = digits(low, p, z as usize);
            cand.push(1);
            cand
        })
        .find(|cand| find_factor(cand, p).is_none())
        .expect("an irreducible polynomial exists in every degree")
}

fn build_tables(p: u32, z: u32, modulus: Vec<u32>, order: usize) -> Tables {
    let zu = z as usize;
    let coeffs: Vec<Vec<u32>> = (0..order as u32).map(|v| digits(v, p, zu)).collect();

    let mut add = vec![0u16; order * order];
    let mut mul = vec![0u16; order * order];
    for a in 0..order {
        for b in 0..order {
            let s: Vec<u32> = coeffs[a].iter().zip(&coeffs[b]).map(|(x, y)| (x + y) % p).collect();
            add[a * order + b] = pack(&s, p) as u16;

            let mut prod = vec![0u32; 2 * zu - 1];
            for (i, &x) in coeffs[a].iter().enumerate() {
                for (j, &y) in coeffs[b].iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&prod, &modulus, p);
            r.resize(zu, 0);
            mul[a * order + b] = pack(&r, p) as u16;
        }
    }

    let mut neg = vec![0u16; order];
    let mut inv = vec![0u16; order];
    for a in 0..order {
        neg[a] = (0..order).find(|&b| add[a * order + b] == 0).unwrap() as u16;
        if a != 0 {
            inv[a] = (1..order).find(|&b| mul[a * order + b] == 1).unwrap() as u16;
        }
    }

    Tables { characteristic: p, degree: z, modulus, order, add, mul, neg, inv }
}
