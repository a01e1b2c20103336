//! Arithmetic in GF(q), q = l^m, in a polynomial basis.
//!
//! An element is encoded as the integer `c_0 + c_1 l + ... + c_{m-1} l^{m-1}`
//! where `c_i` are the coefficients of its residue polynomial modulo the
//! field's monic irreducible modulus. Multiplication and inversion go through
//! log/antilog tables built from a primitive element, so the whole field is
//! tabulated at construction. The supported range is q <= 2^20.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{bail, Error, Result};

/// Largest field size the tables are built for.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Primitive polynomials over GF(2) for m = 1..=16, as bit masks including
/// the leading term.
const BINARY_PRIMITIVE: [u32; 16] = [
    0x3,     // x + 1
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x83,    // x^7 + x + 1
    0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4443,  // x^14 + x^10 + x^6 + x + 1
    0x8003,  // x^15 + x + 1
    0x1100B, // x^16 + x^12 + x^3 + x + 1
];

/// Field context: characteristic, degree, modulus and lookup tables.
///
/// Immutable after construction; share it behind an [`Arc`].
pub struct FieldCtx {
    l: u32,
    m: u32,
    q: u32,
    /// Coefficients of the monic modulus, lowest degree first, length m + 1.
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
    roots: Vec<Complex64>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("l", &self.l)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.l == other.l && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(x: u32) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= x as u64 {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over GF(l); coefficient vectors lowest degree first.

fn trim(p: &mut Vec<u32>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], l: u32) -> Vec<u32> {
    // b monic
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + l - (lead as u64 * bc as u64 % l as u64) as u32) % l;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u32], l: u32) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (l as u64).pow(d as u32);
        for idx in 0..count {
            let mut div = vec![0u32; d + 1];
            let mut rest = idx;
            for c in div.iter_mut().take(d) {
                *c = (rest % l as u64) as u32;
                rest /= l as u64;
            }
            div[d] = 1;
            let r = poly_rem(poly, &div, l);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn digits(mut value: u32, l: u32, m: u32) -> Vec<u32> {
    let mut out = vec![0u32; m as usize];
    for c in out.iter_mut() {
        *c = value % l;
        value /= l;
    }
    out
}

fn undigits(coeffs: &[u32], l: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * l + c)
}

fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], l: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % l as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, modulus, l);
    r.resize(modulus.len() - 1, 0);
    r
}

impl FieldCtx {
    /// Builds GF(l^m) using the built-in modulus: the pinned primitive
    /// polynomial for l = 2, m <= 16, otherwise the lexicographically first
    /// monic irreducible polynomial whose root is primitive.
    pub fn new(l: u32, m: u32) -> Result<Arc<FieldCtx>> {
        Self::check_params(l, m)?;
        let modulus = if l == 2 && m <= 16 {
            let mask = BINARY_PRIMITIVE[m as usize - 1];
            (0..=m).map(|i| (mask >> i) & 1).collect()
        } else {
            Self::search_primitive_modulus(l, m)?
        };
        Self::with_modulus(l, m, &modulus)
    }

    /// Builds GF(l^m) with a caller-supplied monic modulus (coefficients
    /// lowest degree first, length m + 1).
    pub fn with_modulus(l: u32, m: u32, modulus: &[u32]) -> Result<Arc<FieldCtx>> {
        Self::check_params(l, m)?;
        if modulus.len() != m as usize + 1 {
            bail!(
                Construction,
                "modulus must have degree {m}, got {} coefficients",
                modulus.len()
            );
        }
        if modulus.iter().any(|&c| c >= l) {
            bail!(Construction, "modulus coefficients must lie in [0, {l})");
        }
        if modulus[m as usize] != 1 {
            bail!(Construction, "modulus is not monic");
        }
        if !is_irreducible(modulus, l) {
            bail!(Construction, "modulus {modulus:?} is reducible over GF({l})");
        }
        let q = l.pow(m);
        let modulus = modulus.to_vec();

        // x is the preferred generator; fall back to a search when the
        // modulus is irreducible but not primitive.
        let candidates = std::iter::once(if m == 1 { u32::MAX } else { l })
            .chain(1..q)
            .filter(|&g| g < q && g != 0);
        let mut tables = None;
        for g in candidates {
            if let Some(exp) = Self::power_table(g, q, l, m, &modulus) {
                tables = Some((g, exp));
                break;
            }
        }
        let (generator, exp) = tables.ok_or_else(|| Error::Construction("no primitive element found".into()))?;
        let mut log = vec![0u32; q as usize];
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u32;
        }

        let roots = (0..l)
            .map(|r| {
                if r == 0 {
                    Complex64::new(1.0, 0.0)
                } else if 2 * r > l {
                    // exact conjugate symmetry: root(l - r) = conj(root(r))
                    let t = 2.0 * PI * (l - r) as f64 / l as f64;
                    Complex64::new(t.cos(), -t.sin())
                } else if 2 * r == l {
                    Complex64::new(-1.0, 0.0)
                } else {
                    let t = 2.0 * PI * r as f64 / l as f64;
                    Complex64::new(t.cos(), t.sin())
                }
            })
            .collect();

        let mut ctx = FieldCtx {
            l,
            m,
            q,
            modulus,
            generator,
            exp,
            log,
            trace: Vec::new(),
            roots,
        };
        ctx.trace = (0..q).map(|x| ctx.trace_slow(x)).collect::<Result<_>>()?;
        Ok(Arc::new(ctx))
    }

    fn check_params(l: u32, m: u32) -> Result<()> {
        if !is_prime(l) {
            bail!(Construction, "characteristic {l} is not prime");
        }
        if m == 0 {
            bail!(Construction, "extension degree must be positive");
        }
        if (l as u64).checked_pow(m).is_none_or(|q| q > MAX_FIELD_SIZE) {
            bail!(Resource, "GF({l}^{m}) exceeds the supported size 2^20");
        }
        Ok(())
    }

    fn search_primitive_modulus(l: u32, m: u32) -> Result<Vec<u32>> {
        let q = l.pow(m);
        for idx in 0..q {
            let mut poly = digits(idx, l, m);
            poly.push(1);
            if poly[0] == 0 || !is_irreducible(&poly, l) {
                continue;
            }
            let root = if m == 1 {
                // x + c has root -c
                (l - poly[0]) % l
            } else {
                l
            };
            if root != 0 && Self::power_table(root, q, l, m, &poly).is_some() {
                return Ok(poly);
            }
        }
        bail!(Construction, "no primitive polynomial of degree {m} over GF({l})")
    }

    /// Successive powers of `g`; `None` when g is not of order q - 1.
    fn power_table(g: u32, q: u32, l: u32, m: u32, modulus: &[u32]) -> Option<Vec<u32>> {
        let gd = digits(g, l, m);
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut cur = digits(1, l, m);
        for i in 0..(q - 1) {
            let v = undigits(&cur, l);
            if i > 0 && v == 1 {
                return None;
            }
            exp.push(v);
            cur = mul_mod(&cur, &gd, modulus, l);
        }
        (undigits(&cur, l) == 1).then_some(exp)
    }

    fn trace_slow(&self, x: u32) -> Result<u32> {
        let mut acc = 0u32;
        let mut pow = x;
        for _ in 0..self.m {
            acc = self.add(acc, pow);
            pow = self.pow(pow, self.l as u64);
        }
        if acc >= self.l {
            bail!(Construction, "trace of {x} left the prime field");
        }
        Ok(acc)
    }

    pub fn characteristic(&self) -> u32 {
        self.l
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The primitive element the log tables are built on (x when possible).
    pub fn primitive_element(&self) -> u32 {
        self.generator
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.l == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            out += ((a % self.l + b % self.l) % self.l) * place;
            a /= self.l;
            b /= self.l;
            place = place.wrapping_mul(self.l);
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.l == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            out += ((self.l - a % self.l) % self.l) * place;
            a /= self.l;
            place = place.wrapping_mul(self.l);
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.q as u64 - 1;
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % order;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            bail!(Domain, "inverse of zero in GF({})", self.q);
        }
        let order = self.q - 1;
        Ok(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = self.q as u64 - 1;
        let k = (self.log[a as usize] as u64 % order) * (e % order) % order;
        self.exp[k as usize]
    }

    /// g^k for the tabulated primitive element g.
    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % (self.q as u64 - 1)) as usize]
    }

    /// Absolute trace to GF(l), returned as a residue in [0, l).
    pub fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize]
    }

    /// exp(2 pi i r / l) for a residue r.
    pub fn root_of_unity(&self, r: u32) -> Complex64 {
        self.roots[(r % self.l) as usize]
    }

    /// Standard additive character psi(a) = exp(2 pi i tr(a) / l).
    pub fn character(&self, a: u32) -> Complex64 {
        self.roots[self.trace[a as usize] as usize]
    }

    /// Polynomial-basis coefficients of an encoded element.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        digits(a, self.l, self.m)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<u32> {
        if coeffs.len() != self.m as usize || coeffs.iter().any(|&c| c >= self.l) {
            bail!(
                Usage,
                "coefficient vector {coeffs:?} is not an element of GF({})",
                self.q
            );
        }
        Ok(undigits(coeffs, self.l))
    }
}

/// Arithmetic operation selector for [`FieldElement::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
}

/// An element bound to its field context.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.ctx.coefficients(self.value))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.ctx == *other.ctx
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(ctx: &Arc<FieldCtx>, value: u32) -> Result<Self> {
        if !ctx.contains(value) {
            bail!(Usage, "{value} is not an element of GF({})", ctx.q);
        }
        Ok(FieldElement {
            ctx: Arc::clone(ctx),
            value,
        })
    }

    pub fn from_coefficients(ctx: &Arc<FieldCtx>, coeffs: &[u32]) -> Result<Self> {
        let value = ctx.from_coefficients(coeffs)?;
        Self::new(ctx, value)
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        FieldElement {
            ctx: Arc::clone(ctx),
            value: 0,
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        FieldElement {
            ctx: Arc::clone(ctx),
            value: 1,
        }
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coefficients(&self) -> Vec<u32> {
        self.ctx.coefficients(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Applies a field operation. `Inv` ignores `other`.
    pub fn apply(&self, other: &FieldElement, op: FieldOp) -> Result<FieldElement> {
        if op != FieldOp::Inv && !(Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx) {
            bail!(Usage, "operands belong to different fields");
        }
        let value = match op {
            FieldOp::Add => self.ctx.add(self.value, other.value),
            FieldOp::Sub => self.ctx.sub(self.value, other.value),
            FieldOp::Mul => self.ctx.mul(self.value, other.value),
            FieldOp::Inv => self.ctx.inv(self.value)?,
        };
        Ok(FieldElement {
            ctx: Arc::clone(&self.ctx),
            value,
        })
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.apply(other, FieldOp::Add)
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.apply(other, FieldOp::Sub)
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.apply(other, FieldOp::Mul)
    }

    pub fn inv(&self) -> Result<FieldElement> {
        self.apply(self, FieldOp::Inv)
    }

    pub fn trace(&self) -> u32 {
        self.ctx.trace(self.value)
    }

    pub fn character(&self) -> Complex64 {
        self.ctx.character(self.value)
    }
}
