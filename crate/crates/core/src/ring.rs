//! Exact arithmetic for small commutative rings with nominal identity.
//!
//! Rings come in two regimes: finite rings on canonical residue coordinates
//! (tables built once at construction) and number fields on vectors of exact
//! rationals. A ring is identified nominally by its presentation id; two
//! presentations with different ids are different rings even when their
//! constructor trees coincide.
//!
//! Localizations of finite rings are realized inside the parent: inverting f
//! amounts to cutting down to eA for the unique idempotent power e of f, with
//! the canonical map a ↦ ea. Presentations produced by [`localize`] are keyed
//! by the root ancestor and that idempotent, so localizing twice, or at two
//! elements with the same idempotent, yields the nominally identical ring,
//! and localizing at a unit yields the ring itself.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{HomError, RingError};

/// Representable cap for finite rings.
pub const SIZE_CAP: usize = 256;
/// Cap for exhaustive searches (ideal enumeration, isomorphism search).
pub const SEARCH_CAP: usize = 64;

/// Nominal ring identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingId(pub String);

impl RingId {
    pub fn new(s: impl Into<String>) -> Self {
        RingId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Residue coordinates of a finite-ring element, reduced to canonical form.
pub type Coords = Vec<u64>;

/// Constructor tree of a ring presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingCtor {
    /// The ring of integers mod n, n ≥ 2.
    Zmod { n: u64 },
    /// F_p[x]/(f) for a monic irreducible f over the prime field F_p.
    GaloisQuotient { p: u64, modulus: Vec<u64> },
    /// Finite product of finite rings.
    Product { parts: Vec<RingPresentation> },
    /// ℚ[x]/(f) for a monic f over ℚ, expected irreducible.
    NumberField {
        min_poly: Vec<BigRational>,
        irreducibility_asserted: bool,
    },
    /// The subring eA of the parent cut out by the idempotent power e of the
    /// inverted element; always keyed by the root (non-localization) ancestor.
    LocalizationOf { parent: RingId, element: Coords },
}

/// A nominally identified presentation of a commutative ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPresentation {
    pub id: RingId,
    pub ctor: RingCtor,
}

impl RingPresentation {
    pub fn zmod(id: impl Into<String>, n: u64) -> Self {
        RingPresentation {
            id: RingId::new(id),
            ctor: RingCtor::Zmod { n },
        }
    }

    pub fn galois(id: impl Into<String>, p: u64, modulus: Vec<u64>) -> Self {
        RingPresentation {
            id: RingId::new(id),
            ctor: RingCtor::GaloisQuotient { p, modulus },
        }
    }

    pub fn product(id: impl Into<String>, parts: Vec<RingPresentation>) -> Self {
        RingPresentation {
            id: RingId::new(id),
            ctor: RingCtor::Product { parts },
        }
    }

    pub fn number_field(
        id: impl Into<String>,
        min_poly: Vec<BigRational>,
        irreducibility_asserted: bool,
    ) -> Self {
        RingPresentation {
            id: RingId::new(id),
            ctor: RingCtor::NumberField {
                min_poly,
                irreducibility_asserted,
            },
        }
    }
}

/// Element value in either arithmetic regime.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElemValue {
    Fin(Coords),
    Nf(Vec<BigRational>),
}

/// An element of a nominally identified ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    pub ring: RingId,
    pub value: ElemValue,
}

impl RingElement {
    pub fn finite(ring: RingId, coords: Coords) -> Self {
        RingElement {
            ring,
            value: ElemValue::Fin(coords),
        }
    }

    pub fn coords(&self) -> Option<&Coords> {
        match &self.value {
            ElemValue::Fin(c) => Some(c),
            ElemValue::Nf(_) => None,
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            ElemValue::Fin(c) => write!(f, "{}", fmt_coords(c)),
            ElemValue::Nf(v) => {
                let parts: Vec<String> = v.iter().map(fmt_rational).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

pub fn fmt_coords(c: &Coords) -> String {
    if c.len() == 1 {
        c[0].to_string()
    } else {
        let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// Table-backed finite ring.
#[derive(Debug)]
pub struct FiniteRing {
    pub elems: Vec<Coords>,
    index: HashMap<Coords, u16>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    pub zero: u16,
    pub one: u16,
}

impl FiniteRing {
    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn idx(&self, coords: &Coords) -> Option<u16> {
        self.index.get(coords).copied()
    }

    pub fn add_idx(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.size() + b as usize]
    }

    pub fn mul_idx(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.size() + b as usize]
    }

    pub fn neg_idx(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    pub(crate) fn from_ops(
        elems: Vec<Coords>,
        add_op: impl Fn(&Coords, &Coords) -> Coords,
        mul_op: impl Fn(&Coords, &Coords) -> Coords,
        zero: Coords,
        one: Coords,
    ) -> Self {
        let mut elems = elems;
        elems.sort();
        elems.dedup();
        let n = elems.len();
        let index: HashMap<Coords, u16> = elems
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u16))
            .collect();
        let mut add = vec![0u16; n * n];
        let mut mul = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = index[&add_op(&elems[i], &elems[j])];
                mul[i * n + j] = index[&mul_op(&elems[i], &elems[j])];
            }
        }
        let zero = index[&zero];
        let one = index[&one];
        // neg: the additive inverse exists and is unique in a finite abelian group
        let mut neg = vec![0u16; n];
        for i in 0..n {
            let mut found = None;
            for j in 0..n {
                if add[i * n + j] == zero {
                    found = Some(j as u16);
                    break;
                }
            }
            neg[i] = found.expect("finite additive group has inverses");
        }
        FiniteRing {
            elems,
            index,
            add,
            mul,
            neg,
            zero,
            one,
        }
    }
}

/// Number field ℚ[x]/(f).
#[derive(Debug)]
pub struct NumberFieldRing {
    /// Monic minimal polynomial, coefficients low to high, length degree + 1.
    pub min_poly: Vec<BigRational>,
    pub degree: usize,
    /// Whether irreducibility was taken on trust (degree ≥ 4) rather than
    /// verified by the rational-root screen.
    pub irreducibility_trusted: bool,
}

impl NumberFieldRing {
    pub fn zero(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.degree]
    }

    pub fn one(&self) -> Vec<BigRational> {
        let mut v = self.zero();
        v[0] = BigRational::one();
        v
    }

    /// The class of x, the distinguished generator.
    pub fn generator(&self) -> Vec<BigRational> {
        let mut v = self.zero();
        if self.degree == 1 {
            // x ≡ -c0 mod (x + c0)
            v[0] = -self.min_poly[0].clone();
        } else {
            v[1] = BigRational::one();
        }
        v
    }

    pub fn add(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn neg(&self, a: &[BigRational]) -> Vec<BigRational> {
        a.iter().map(|x| -x).collect()
    }

    pub fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let d = self.degree;
        let mut prod = vec![BigRational::zero(); 2 * d.max(1)];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        // reduce mod the monic min_poly
        for k in (d..prod.len()).rev() {
            if prod[k].is_zero() {
                continue;
            }
            let c = prod[k].clone();
            prod[k] = BigRational::zero();
            for (i, m) in self.min_poly.iter().enumerate().take(d) {
                prod[k - d + i] -= &c * m;
            }
        }
        prod.truncate(d);
        prod
    }

    pub fn scale(&self, a: &[BigRational], c: &BigRational) -> Vec<BigRational> {
        a.iter().map(|x| x * c).collect()
    }

    /// Multiplicative inverse of a nonzero element via the extended Euclidean
    /// algorithm in ℚ[x].
    pub fn inv(&self, a: &[BigRational]) -> Option<Vec<BigRational>> {
        if a.iter().all(|x| x.is_zero()) {
            return None;
        }
        // Work with polynomials (low→high). gcd(a, min_poly) = 1 since the
        // modulus is irreducible and deg a < deg f.
        let (g, s, _) = poly_ext_gcd(a, &self.min_poly);
        if poly_deg(&g) != Some(0) {
            return None;
        }
        let c = g[0].clone();
        let mut out: Vec<BigRational> = s.iter().map(|x| x / &c).collect();
        out.resize(self.degree, BigRational::zero());
        // reduce (deg s < deg f already by the algorithm)
        Some(out)
    }

    /// Evaluate an element, given as a polynomial in the generator, at an
    /// image of the generator inside another number field.
    pub fn eval_at<'a>(
        &self,
        elem: &[BigRational],
        target: &NumberFieldRing,
        gen_image: &'a [BigRational],
    ) -> Vec<BigRational> {
        let mut acc = target.zero();
        for c in elem.iter().rev() {
            acc = target.mul(&acc, gen_image);
            acc[0] += c;
        }
        acc
    }

    /// Evaluate the minimal polynomial at a candidate element of a target field.
    pub fn min_poly_at(&self, target: &NumberFieldRing, x: &[BigRational]) -> Vec<BigRational> {
        let mut acc = target.zero();
        for c in self.min_poly.iter().rev() {
            acc = target.mul(&acc, x);
            acc[0] += c;
        }
        acc
    }
}

fn poly_deg(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn poly_trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = poly_deg(b).expect("division by zero polynomial");
    let mut rem: Vec<BigRational> = a.to_vec();
    let mut quo = vec![BigRational::zero(); a.len().max(1)];
    while let Some(dr) = poly_deg(&rem) {
        if dr < db {
            break;
        }
        let c = &rem[dr] / &b[db];
        quo[dr - db] = c.clone();
        for i in 0..=db {
            let t = &c * &b[i];
            rem[dr - db + i] -= t;
        }
    }
    (poly_trim(quo), poly_trim(rem))
}

/// Extended gcd over ℚ[x]: returns (g, s, t) with s·a + t·b = g.
fn poly_ext_gcd(
    a: &[BigRational],
    b: &[BigRational],
) -> (Vec<BigRational>, Vec<BigRational>, Vec<BigRational>) {
    let zero = || vec![BigRational::zero()];
    let one = || vec![BigRational::one()];
    let mut r0 = poly_trim(a.to_vec());
    let mut r1 = poly_trim(b.to_vec());
    let (mut s0, mut s1) = (one(), zero());
    let (mut t0, mut t1) = (zero(), one());
    while poly_deg(&r1).is_some() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        let t = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    (r0, s0, t0)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    poly_trim(out)
}

/// Arithmetic backend of a ring.
#[derive(Debug)]
pub enum RingData {
    Finite(FiniteRing),
    NumberField(NumberFieldRing),
}

/// A constructed ring: presentation plus arithmetic.
#[derive(Debug)]
pub struct Ring {
    pub presentation: RingPresentation,
    pub data: RingData,
    /// Root non-localization ancestor; equals the own id for root rings.
    pub root: RingId,
}

impl Ring {
    pub fn id(&self) -> &RingId {
        &self.presentation.id
    }

    /// Nominal equality.
    pub fn same_ring(&self, other: &Ring) -> bool {
        self.id() == other.id()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.data, RingData::Finite(_))
    }

    pub fn finite(&self) -> Option<&FiniteRing> {
        match &self.data {
            RingData::Finite(f) => Some(f),
            _ => None,
        }
    }

    pub fn number_field(&self) -> Option<&NumberFieldRing> {
        match &self.data {
            RingData::NumberField(n) => Some(n),
            _ => None,
        }
    }

    pub fn size(&self) -> Option<usize> {
        self.finite().map(|f| f.size())
    }

    pub fn zero(&self) -> RingElement {
        match &self.data {
            RingData::Finite(f) => {
                RingElement::finite(self.id().clone(), f.elems[f.zero as usize].clone())
            }
            RingData::NumberField(n) => RingElement {
                ring: self.id().clone(),
                value: ElemValue::Nf(n.zero()),
            },
        }
    }

    pub fn one(&self) -> RingElement {
        match &self.data {
            RingData::Finite(f) => {
                RingElement::finite(self.id().clone(), f.elems[f.one as usize].clone())
            }
            RingData::NumberField(n) => RingElement {
                ring: self.id().clone(),
                value: ElemValue::Nf(n.one()),
            },
        }
    }

    /// All elements of a finite ring, in canonical order.
    pub fn elements(&self) -> Vec<RingElement> {
        match &self.data {
            RingData::Finite(f) => f
                .elems
                .iter()
                .map(|c| RingElement::finite(self.id().clone(), c.clone()))
                .collect(),
            RingData::NumberField(_) => vec![],
        }
    }

    pub fn element(&self, coords: Coords) -> Result<RingElement, RingError> {
        match &self.data {
            RingData::Finite(f) => {
                if f.idx(&coords).is_none() {
                    return Err(RingError::ForeignElement {
                        ring: self.id().to_string(),
                        coords: fmt_coords(&coords),
                    });
                }
                Ok(RingElement::finite(self.id().clone(), coords))
            }
            RingData::NumberField(_) => Err(RingError::ForeignElement {
                ring: self.id().to_string(),
                coords: fmt_coords(&coords),
            }),
        }
    }

    pub fn nf_element(&self, v: Vec<BigRational>) -> Result<RingElement, RingError> {
        match &self.data {
            RingData::NumberField(n) => {
                if v.len() != n.degree {
                    return Err(RingError::ForeignElement {
                        ring: self.id().to_string(),
                        coords: format!("vector of length {}", v.len()),
                    });
                }
                Ok(RingElement {
                    ring: self.id().clone(),
                    value: ElemValue::Nf(v),
                })
            }
            RingData::Finite(_) => Err(RingError::ForeignElement {
                ring: self.id().to_string(),
                coords: "rational vector in a finite ring".into(),
            }),
        }
    }

    fn check_member(&self, e: &RingElement) -> Result<(), RingError> {
        if &e.ring != self.id() {
            return Err(RingError::ForeignElement {
                ring: self.id().to_string(),
                coords: format!("element of `{}`", e.ring),
            });
        }
        match (&self.data, &e.value) {
            (RingData::Finite(f), ElemValue::Fin(c)) => {
                if f.idx(c).is_none() {
                    return Err(RingError::ForeignElement {
                        ring: self.id().to_string(),
                        coords: fmt_coords(c),
                    });
                }
                Ok(())
            }
            (RingData::NumberField(n), ElemValue::Nf(v)) if v.len() == n.degree => Ok(()),
            _ => Err(RingError::ForeignElement {
                ring: self.id().to_string(),
                coords: "regime mismatch".into(),
            }),
        }
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
        self.check_member(a)?;
        self.check_member(b)?;
        match (&self.data, &a.value, &b.value) {
            (RingData::Finite(f), ElemValue::Fin(x), ElemValue::Fin(y)) => {
                let i = f.idx(x).unwrap();
                let j = f.idx(y).unwrap();
                let k = f.add_idx(i, j);
                Ok(RingElement::finite(
                    self.id().clone(),
                    f.elems[k as usize].clone(),
                ))
            }
            (RingData::NumberField(n), ElemValue::Nf(x), ElemValue::Nf(y)) => Ok(RingElement {
                ring: self.id().clone(),
                value: ElemValue::Nf(n.add(x, y)),
            }),
            _ => unreachable!("membership checked"),
        }
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
        self.check_member(a)?;
        self.check_member(b)?;
        match (&self.data, &a.value, &b.value) {
            (RingData::Finite(f), ElemValue::Fin(x), ElemValue::Fin(y)) => {
                let i = f.idx(x).unwrap();
                let j = f.idx(y).unwrap();
                let k = f.mul_idx(i, j);
                Ok(RingElement::finite(
                    self.id().clone(),
                    f.elems[k as usize].clone(),
                ))
            }
            (RingData::NumberField(n), ElemValue::Nf(x), ElemValue::Nf(y)) => Ok(RingElement {
                ring: self.id().clone(),
                value: ElemValue::Nf(n.mul(x, y)),
            }),
            _ => unreachable!("membership checked"),
        }
    }

    pub fn neg(&self, a: &RingElement) -> Result<RingElement, RingError> {
        self.check_member(a)?;
        match (&self.data, &a.value) {
            (RingData::Finite(f), ElemValue::Fin(x)) => {
                let i = f.idx(x).unwrap();
                let k = f.neg_idx(i);
                Ok(RingElement::finite(
                    self.id().clone(),
                    f.elems[k as usize].clone(),
                ))
            }
            (RingData::NumberField(n), ElemValue::Nf(x)) => Ok(RingElement {
                ring: self.id().clone(),
                value: ElemValue::Nf(n.neg(x)),
            }),
            _ => unreachable!("membership checked"),
        }
    }

    pub fn is_zero(&self, a: &RingElement) -> bool {
        a == &self.zero()
    }

    /// True when a has a multiplicative inverse.
    pub fn is_unit(&self, a: &RingElement) -> bool {
        match (&self.data, &a.value) {
            (RingData::Finite(f), ElemValue::Fin(x)) => {
                let Some(i) = f.idx(x) else { return false };
                (0..f.size() as u16).any(|j| f.mul_idx(i, j) == f.one)
            }
            (RingData::NumberField(_), ElemValue::Nf(v)) => !v.iter().all(|c| c.is_zero()),
            _ => false,
        }
    }
}

fn check_id_nonempty(p: &RingPresentation) -> Result<(), RingError> {
    if p.id.as_str().is_empty() {
        return Err(RingError::MalformedPresentation {
            id: String::new(),
            reason: "empty ring id".into(),
        });
    }
    Ok(())
}

/// Build a ring from a presentation. `LocalizationOf` presentations need the
/// parent ring in scope; see [`make_localization`] and [`localize`].
pub fn make_ring(p: &RingPresentation) -> Result<Arc<Ring>, RingError> {
    check_id_nonempty(p)?;
    match &p.ctor {
        RingCtor::Zmod { n } => {
            let n = *n;
            if n < 2 {
                return Err(RingError::MalformedPresentation {
                    id: p.id.to_string(),
                    reason: format!("Zmod modulus must be at least 2, got {n}"),
                });
            }
            if n as usize > SIZE_CAP {
                return Err(RingError::SizeLimitExceeded {
                    id: p.id.to_string(),
                    size: n as usize,
                    cap: SIZE_CAP,
                });
            }
            let elems: Vec<Coords> = (0..n).map(|r| vec![r]).collect();
            let fin = FiniteRing::from_ops(
                elems,
                |a, b| vec![(a[0] + b[0]) % n],
                |a, b| vec![(a[0] * b[0]) % n],
                vec![0],
                vec![1],
            );
            Ok(Arc::new(Ring {
                presentation: p.clone(),
                data: RingData::Finite(fin),
                root: p.id.clone(),
            }))
        }
        RingCtor::GaloisQuotient { p: ch, modulus } => {
            build_galois(p, *ch, modulus)
        }
        RingCtor::Product { parts } => build_product(p, parts),
        RingCtor::NumberField {
            min_poly,
            irreducibility_asserted,
        } => build_number_field(p, min_poly, *irreducibility_asserted),
        RingCtor::LocalizationOf { parent, .. } => Err(RingError::MalformedPresentation {
            id: p.id.to_string(),
            reason: format!(
                "localization presentations need their parent `{parent}` in scope; use localize or make_localization"
            ),
        }),
    }
}

fn is_prime(n: u64) -> bool {
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

fn fp_poly_mod(poly: &[u64], p: u64) -> Vec<u64> {
    poly.iter().map(|c| c % p).collect()
}

/// Remainder of a by b over F_p, b monic.
fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let mut rem: Vec<u64> = a.to_vec();
    while rem.len() > db {
        let lead = *rem.last().unwrap() % p;
        if lead != 0 {
            let shift = rem.len() - 1 - db;
            for i in 0..=db {
                let sub = (lead * b[i]) % p;
                let idx = shift + i;
                rem[idx] = (rem[idx] + p * p - sub) % p;
            }
        }
        rem.pop();
    }
    while rem.len() > 1 && *rem.last().unwrap() == 0 {
        rem.pop();
    }
    rem
}

fn fp_poly_is_irreducible(f: &[u64], p: u64) -> Result<(), Vec<u64>> {
    let d = f.len() - 1;
    if d == 1 {
        return Ok(());
    }
    // exhaustive trial division by monic polynomials of degree 1..=d/2
    for deg in 1..=d / 2 {
        let mut cand = vec![0u64; deg + 1];
        cand[deg] = 1;
        loop {
            let rem = fp_poly_rem(f, &cand, p);
            if rem.iter().all(|c| *c == 0) {
                return Err(cand);
            }
            // advance the non-leading coefficients like a base-p counter
            let mut i = 0;
            loop {
                if i == deg {
                    break;
                }
                cand[i] += 1;
                if cand[i] < p {
                    break;
                }
                cand[i] = 0;
                i += 1;
            }
            if i == deg {
                break;
            }
        }
    }
    Ok(())
}

fn build_galois(pres: &RingPresentation, p: u64, modulus: &[u64]) -> Result<Arc<Ring>, RingError> {
    if !is_prime(p) {
        return Err(RingError::MalformedPresentation {
            id: pres.id.to_string(),
            reason: format!("{p} is not prime"),
        });
    }
    let f = fp_poly_mod(modulus, p);
    let d = f.len().saturating_sub(1);
    if d == 0 || *f.last().unwrap() != 1 {
        return Err(RingError::MalformedPresentation {
            id: pres.id.to_string(),
            reason: "modulus must be monic of degree at least 1".into(),
        });
    }
    let size = (p as u128).pow(d as u32);
    if size > SIZE_CAP as u128 {
        return Err(RingError::SizeLimitExceeded {
            id: pres.id.to_string(),
            size: size as usize,
            cap: SIZE_CAP,
        });
    }
    if let Err(factor) = fp_poly_is_irreducible(&f, p) {
        return Err(RingError::ReducibleModulus {
            id: pres.id.to_string(),
            p,
            witness: format!("divisible by {factor:?}"),
        });
    }
    // elements: coefficient vectors of length d
    let mut elems: Vec<Coords> = Vec::with_capacity(size as usize);
    let mut cur = vec![0u64; d];
    loop {
        elems.push(cur.clone());
        let mut i = 0;
        loop {
            if i == d {
                break;
            }
            cur[i] += 1;
            if cur[i] < p {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    let fmod = f.clone();
    let mul_op = move |a: &Coords, b: &Coords| -> Coords {
        let mut prod = vec![0u64; 2 * d - 1];
        for i in 0..d {
            for j in 0..d {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        let mut r = fp_poly_rem(&prod, &fmod, p);
        r.resize(d, 0);
        r
    };
    let add_op = move |a: &Coords, b: &Coords| -> Coords {
        a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
    };
    let zero = vec![0u64; d];
    let mut one = vec![0u64; d];
    one[0] = 1;
    let fin = FiniteRing::from_ops(elems, add_op, mul_op, zero, one);
    Ok(Arc::new(Ring {
        presentation: pres.clone(),
        data: RingData::Finite(fin),
        root: pres.id.clone(),
    }))
}

fn build_product(pres: &RingPresentation, parts: &[RingPresentation]) -> Result<Arc<Ring>, RingError> {
    if parts.is_empty() {
        return Err(RingError::MalformedPresentation {
            id: pres.id.to_string(),
            reason: "product of zero rings".into(),
        });
    }
    let mut built = Vec::new();
    for part in parts {
        if matches!(part.ctor, RingCtor::LocalizationOf { .. } | RingCtor::NumberField { .. }) {
            return Err(RingError::MalformedPresentation {
                id: pres.id.to_string(),
                reason: format!("product part `{}` must denote a finite root ring", part.id),
            });
        }
        built.push(make_ring(part)?);
    }
    let fins: Vec<&FiniteRing> = built.iter().map(|r| r.finite().unwrap()).collect();
    let total: usize = fins.iter().map(|f| f.size()).product();
    if total > SIZE_CAP {
        return Err(RingError::SizeLimitExceeded {
            id: pres.id.to_string(),
            size: total,
            cap: SIZE_CAP,
        });
    }
    let arities: Vec<usize> = fins.iter().map(|f| f.elems[0].len()).collect();
    // enumerate the product elements as concatenated coordinates
    let mut elems: Vec<Coords> = vec![vec![]];
    for f in &fins {
        let mut next = Vec::with_capacity(elems.len() * f.size());
        for prefix in &elems {
            for e in &f.elems {
                let mut c = prefix.clone();
                c.extend_from_slice(e);
                next.push(c);
            }
        }
        elems = next;
    }
    let split = move |c: &Coords| -> Vec<Coords> {
        let mut out = Vec::with_capacity(arities.len());
        let mut pos = 0;
        for &a in &arities {
            out.push(c[pos..pos + a].to_vec());
            pos += a;
        }
        out
    };
    let fins2: Vec<FiniteRing> = built
        .iter()
        .map(|r| match &r.data {
            RingData::Finite(f) => FiniteRing {
                elems: f.elems.clone(),
                index: f
                    .elems
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.clone(), i as u16))
                    .collect(),
                add: f.add.clone(),
                mul: f.mul.clone(),
                neg: f.neg.clone(),
                zero: f.zero,
                one: f.one,
            },
            _ => unreachable!(),
        })
        .collect();
    let split_a = split.clone();
    let fins_a = fins2.clone_tables();
    let add_op = move |a: &Coords, b: &Coords| -> Coords {
        let (xa, xb) = (split_a(a), split_a(b));
        let mut out = Vec::new();
        for (k, f) in fins_a.iter().enumerate() {
            let i = f.idx(&xa[k]).unwrap();
            let j = f.idx(&xb[k]).unwrap();
            out.extend_from_slice(&f.elems[f.add_idx(i, j) as usize]);
        }
        out
    };
    let split_m = split;
    let fins_m = fins2.clone_tables();
    let mul_op = move |a: &Coords, b: &Coords| -> Coords {
        let (xa, xb) = (split_m(a), split_m(b));
        let mut out = Vec::new();
        for (k, f) in fins_m.iter().enumerate() {
            let i = f.idx(&xa[k]).unwrap();
            let j = f.idx(&xb[k]).unwrap();
            out.extend_from_slice(&f.elems[f.mul_idx(i, j) as usize]);
        }
        out
    };
    let zero: Coords = fins2
        .iter()
        .flat_map(|f| f.elems[f.zero as usize].clone())
        .collect();
    let one: Coords = fins2
        .iter()
        .flat_map(|f| f.elems[f.one as usize].clone())
        .collect();
    let fin = FiniteRing::from_ops(elems, add_op, mul_op, zero, one);
    Ok(Arc::new(Ring {
        presentation: pres.clone(),
        data: RingData::Finite(fin),
        root: pres.id.clone(),
    }))
}

trait CloneTables {
    fn clone_tables(&self) -> Vec<FiniteRing>;
}

impl CloneTables for Vec<FiniteRing> {
    fn clone_tables(&self) -> Vec<FiniteRing> {
        self.iter()
            .map(|f| FiniteRing {
                elems: f.elems.clone(),
                index: f
                    .elems
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.clone(), i as u16))
                    .collect(),
                add: f.add.clone(),
                mul: f.mul.clone(),
                neg: f.neg.clone(),
                zero: f.zero,
                one: f.one,
            })
            .collect()
    }
}

/// Rational-root screen: a monic rational polynomial of degree 2 or 3 is
/// irreducible over ℚ exactly when it has no rational root.
fn rational_root_exists(poly: &[BigRational]) -> Option<BigRational> {
    // substitute x = y/c with c = lcm of denominators to land in monic integers
    let mut c = BigInt::one();
    for coef in poly {
        c = num::integer::lcm(c, coef.denom().clone());
    }
    let d = poly.len() - 1;
    // g(y) = c^d f(y/c): integer coefficients, monic up to scaling by c^d over the lead 1
    let mut g: Vec<BigInt> = Vec::with_capacity(poly.len());
    for (i, coef) in poly.iter().enumerate() {
        // coefficient of y^i is c^(d-i) * coef, an integer
        let scaled = coef * BigRational::from_integer(c.pow((d - i) as u32));
        debug_assert!(scaled.denom().is_one());
        g.push(scaled.numer().clone());
    }
    let eval = |x: &BigInt| -> BigInt {
        let mut acc = BigInt::zero();
        for coef in g.iter().rev() {
            acc = acc * x + coef;
        }
        acc
    };
    if g[0].is_zero() {
        return Some(BigRational::zero());
    }
    let c0 = g[0].abs();
    let mut d1 = BigInt::one();
    while &d1 * &d1 <= c0 {
        if (&c0 % &d1).is_zero() {
            for cand in [d1.clone(), &c0 / &d1] {
                for sign in [BigInt::one(), -BigInt::one()] {
                    let root = &cand * &sign;
                    if eval(&root).is_zero() {
                        return Some(BigRational::new(root, c.clone()));
                    }
                }
            }
        }
        d1 += 1;
    }
    None
}

fn build_number_field(
    pres: &RingPresentation,
    min_poly: &[BigRational],
    asserted: bool,
) -> Result<Arc<Ring>, RingError> {
    let mp = min_poly.to_vec();
    let d = mp.len().saturating_sub(1);
    if d == 0 || !mp.last().unwrap().is_one() {
        return Err(RingError::MalformedPresentation {
            id: pres.id.to_string(),
            reason: "minimal polynomial must be monic of degree at least 1".into(),
        });
    }
    let trusted = if d <= 1 {
        false
    } else if d <= 3 {
        if let Some(root) = rational_root_exists(&mp) {
            return Err(RingError::MalformedPresentation {
                id: pres.id.to_string(),
                reason: format!("minimal polynomial has the rational root {}", fmt_rational(&root)),
            });
        }
        false
    } else {
        if !asserted {
            return Err(RingError::MalformedPresentation {
                id: pres.id.to_string(),
                reason: "degree ≥ 4 needs irreducibility_asserted".into(),
            });
        }
        true
    };
    Ok(Arc::new(Ring {
        presentation: pres.clone(),
        data: RingData::NumberField(NumberFieldRing {
            min_poly: mp,
            degree: d,
            irreducibility_trusted: trusted,
        }),
        root: pres.id.clone(),
    }))
}

/// Build a localization ring under a caller-chosen nominal id. Used by the
/// scenario loader for user-declared `LocalizationOf` presentations;
/// [`localize`] derives the canonical id instead.
pub fn make_localization(
    id: RingId,
    parent: &Arc<Ring>,
    element: &RingElement,
) -> Result<(Arc<Ring>, RingHom), RingError> {
    localize_with_id(parent, element, Some(id))
}

/// Canonical derived id for the localization of `root` at idempotent `e`.
pub fn localization_id(root: &RingId, e: &Coords) -> RingId {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    RingId::new(format!("loc({};{})", root, parts.join(",")))
}

/// Localize a ring at an element.
///
/// Finite case: returns the subring eA for the unique idempotent power e of
/// f, with identity e and the map a ↦ ea; when e = 1 the ring itself is
/// returned with the identity map. A field localizes to itself. The derived
/// presentation is keyed by the root ancestor and e, so equal arguments give
/// the nominally identical ring.
pub fn localize(ring: &Arc<Ring>, f: &RingElement) -> Result<(Arc<Ring>, RingHom), RingError> {
    localize_with_id(ring, f, None)
}

fn localize_with_id(
    ring: &Arc<Ring>,
    f: &RingElement,
    forced_id: Option<RingId>,
) -> Result<(Arc<Ring>, RingHom), RingError> {
    ring.check_member(f)?;
    if ring.is_zero(f) {
        return Err(RingError::ZeroElement {
            ring: ring.id().to_string(),
        });
    }
    match &ring.data {
        RingData::NumberField(_) => {
            // a nonzero element of a field is a unit
            Ok((ring.clone(), RingHom::identity(ring)))
        }
        RingData::Finite(fin) => {
            let fi = fin.idx(f.coords().unwrap()).unwrap();
            // walk powers of f until the unique idempotent appears
            let mut x = fi;
            let mut e = None;
            for _ in 0..2 * fin.size() + 2 {
                if fin.mul_idx(x, x) == x {
                    e = Some(x);
                    break;
                }
                x = fin.mul_idx(x, fi);
            }
            let e = e.expect("the multiplicative semigroup of a finite ring has an idempotent power");
            if e == fin.one && forced_id.is_none() {
                return Ok((ring.clone(), RingHom::identity(ring)));
            }
            let e_coords = fin.elems[e as usize].clone();
            let id = forced_id.unwrap_or_else(|| localization_id(&ring.root, &e_coords));
            // elements of eA
            let mut elems: Vec<Coords> = (0..fin.size() as u16)
                .map(|i| fin.elems[fin.mul_idx(e, i) as usize].clone())
                .collect();
            elems.sort();
            elems.dedup();
            if elems.len() > SIZE_CAP {
                return Err(RingError::SizeLimitExceeded {
                    id: id.to_string(),
                    size: elems.len(),
                    cap: SIZE_CAP,
                });
            }
            let parent_fin = fin;
            let add_op = |a: &Coords, b: &Coords| -> Coords {
                let i = parent_fin.idx(a).unwrap();
                let j = parent_fin.idx(b).unwrap();
                parent_fin.elems[parent_fin.add_idx(i, j) as usize].clone()
            };
            let mul_op = |a: &Coords, b: &Coords| -> Coords {
                let i = parent_fin.idx(a).unwrap();
                let j = parent_fin.idx(b).unwrap();
                parent_fin.elems[parent_fin.mul_idx(i, j) as usize].clone()
            };
            let zero = parent_fin.elems[parent_fin.zero as usize].clone();
            let new_fin = FiniteRing::from_ops(elems, add_op, mul_op, zero, e_coords.clone());
            let pres = RingPresentation {
                id: id.clone(),
                ctor: RingCtor::LocalizationOf {
                    parent: ring.root.clone(),
                    element: e_coords.clone(),
                },
            };
            let new_ring = Arc::new(Ring {
                presentation: pres,
                data: RingData::Finite(new_fin),
                root: ring.root.clone(),
            });
            // canonical map a ↦ ea
            let nf = new_ring.finite().unwrap();
            let table: Vec<u16> = (0..fin.size() as u16)
                .map(|i| {
                    let img = &fin.elems[fin.mul_idx(e, i) as usize];
                    nf.idx(img).unwrap()
                })
                .collect();
            let hom = RingHom {
                domain: ring.id().clone(),
                codomain: new_ring.id().clone(),
                map: HomMap::FiniteTable(table),
            };
            Ok((new_ring, hom))
        }
    }
}

/// An explicit ideal of a finite ring.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ideal {
    pub ring: RingId,
    pub elements: BTreeSet<Coords>,
}

impl Ideal {
    pub fn contains(&self, coords: &Coords) -> bool {
        self.elements.contains(coords)
    }

    /// Stable textual identity used as a spectrum point id.
    pub fn point_label(&self) -> String {
        let parts: Vec<String> = self.elements.iter().map(|c| fmt_coords(c)).collect();
        format!("p{{{}}}", parts.join(","))
    }
}

/// All ideals of a finite ring with at most [`SEARCH_CAP`] elements, by
/// exhaustive additive-subgroup search filtered by multiplicative absorption.
pub fn enumerate_ideals(ring: &Ring) -> Result<Vec<Ideal>, RingError> {
    let fin = ring.finite().ok_or_else(|| RingError::TooLarge {
        id: ring.id().to_string(),
        size: usize::MAX,
        cap: SEARCH_CAP,
    })?;
    let n = fin.size();
    if n > SEARCH_CAP {
        return Err(RingError::TooLarge {
            id: ring.id().to_string(),
            size: n,
            cap: SEARCH_CAP,
        });
    }
    // subgroups as u64 bitmasks over element indices
    let close = |mask: u64| -> u64 {
        let mut m = mask | (1u64 << fin.zero);
        loop {
            let mut next = m;
            for i in 0..n as u16 {
                if m >> i & 1 == 0 {
                    continue;
                }
                for j in 0..n as u16 {
                    if m >> j & 1 == 0 {
                        continue;
                    }
                    next |= 1u64 << fin.add_idx(i, j);
                }
                next |= 1u64 << fin.neg_idx(i);
            }
            if next == m {
                return m;
            }
            m = next;
        }
    };
    let mut subgroups: HashSet<u64> = HashSet::new();
    let mut frontier = vec![close(0)];
    subgroups.insert(frontier[0]);
    while let Some(s) = frontier.pop() {
        for x in 0..n as u16 {
            if s >> x & 1 == 1 {
                continue;
            }
            let t = close(s | (1u64 << x));
            if subgroups.insert(t) {
                frontier.push(t);
            }
        }
    }
    let absorbs = |mask: u64| -> bool {
        for i in 0..n as u16 {
            if mask >> i & 1 == 0 {
                continue;
            }
            for r in 0..n as u16 {
                if mask >> fin.mul_idx(i, r) & 1 == 0 {
                    return false;
                }
            }
        }
        true
    };
    let mut out: Vec<Ideal> = subgroups
        .into_iter()
        .filter(|m| absorbs(*m))
        .map(|m| {
            let elements: BTreeSet<Coords> = (0..n as u16)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| fin.elems[i as usize].clone())
                .collect();
            Ideal {
                ring: ring.id().clone(),
                elements,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.elements.len(), &a.elements).cmp(&(b.elements.len(), &b.elements))
    });
    Ok(out)
}

/// Is the ideal prime: proper, and ab ∈ P forces a ∈ P or b ∈ P.
pub fn is_prime_ideal(ring: &Ring, ideal: &Ideal) -> bool {
    let fin = ring.finite().expect("prime ideals only for finite rings");
    let n = fin.size();
    if ideal.elements.len() == n {
        return false;
    }
    let mask: Vec<bool> = fin.elems.iter().map(|c| ideal.contains(c)).collect();
    for a in 0..n as u16 {
        for b in 0..n as u16 {
            if mask[fin.mul_idx(a, b) as usize] && !mask[a as usize] && !mask[b as usize] {
                return false;
            }
        }
    }
    true
}

/// Map data of a homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomMap {
    /// Full element table: domain element index → codomain element index.
    FiniteTable(Vec<u16>),
    /// Number-field map determined by the image of the distinguished generator.
    NumberFieldGen { forward: Vec<BigRational> },
}

/// A verified ring homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingHom {
    pub domain: RingId,
    pub codomain: RingId,
    pub map: HomMap,
}

impl RingHom {
    pub fn identity(ring: &Ring) -> RingHom {
        match &ring.data {
            RingData::Finite(f) => RingHom {
                domain: ring.id().clone(),
                codomain: ring.id().clone(),
                map: HomMap::FiniteTable((0..f.size() as u16).collect()),
            },
            RingData::NumberField(n) => RingHom {
                domain: ring.id().clone(),
                codomain: ring.id().clone(),
                map: HomMap::NumberFieldGen {
                    forward: n.generator(),
                },
            },
        }
    }

    pub fn apply(
        &self,
        dom: &Ring,
        cod: &Ring,
        elem: &RingElement,
    ) -> Result<RingElement, RingError> {
        dom.check_member(elem)?;
        match (&self.map, &elem.value) {
            (HomMap::FiniteTable(t), ElemValue::Fin(c)) => {
                let fin = dom.finite().unwrap();
                let cf = cod.finite().ok_or_else(|| RingError::ForeignElement {
                    ring: cod.id().to_string(),
                    coords: "finite table into a number field".into(),
                })?;
                let i = fin.idx(c).unwrap();
                let j = t[i as usize];
                Ok(RingElement::finite(
                    cod.id().clone(),
                    cf.elems[j as usize].clone(),
                ))
            }
            (HomMap::NumberFieldGen { forward }, ElemValue::Nf(v)) => {
                let dn = dom.number_field().unwrap();
                let cn = cod.number_field().ok_or_else(|| RingError::ForeignElement {
                    ring: cod.id().to_string(),
                    coords: "number-field map into a finite ring".into(),
                })?;
                Ok(RingElement {
                    ring: cod.id().clone(),
                    value: ElemValue::Nf(dn.eval_at(v, cn, forward)),
                })
            }
            _ => Err(RingError::ForeignElement {
                ring: dom.id().to_string(),
                coords: "map regime mismatch".into(),
            }),
        }
    }

    /// Compose: other ∘ self (self: A → B, other: B → C).
    pub fn compose(
        &self,
        other: &RingHom,
        dom: &Ring,
        mid: &Ring,
        cod: &Ring,
    ) -> Result<RingHom, RingError> {
        debug_assert_eq!(&self.codomain, &other.domain);
        match (&self.map, &other.map) {
            (HomMap::FiniteTable(t1), HomMap::FiniteTable(t2)) => {
                let table = t1.iter().map(|&i| t2[i as usize]).collect();
                Ok(RingHom {
                    domain: self.domain.clone(),
                    codomain: other.codomain.clone(),
                    map: HomMap::FiniteTable(table),
                })
            }
            (HomMap::NumberFieldGen { .. }, HomMap::NumberFieldGen { .. }) => {
                let dn = dom.number_field().unwrap();
                let gen = dn.generator();
                let gen_elem = RingElement {
                    ring: dom.id().clone(),
                    value: ElemValue::Nf(gen),
                };
                let mid_img = self.apply(dom, mid, &gen_elem)?;
                let cod_img = other.apply(mid, cod, &mid_img)?;
                match cod_img.value {
                    ElemValue::Nf(v) => Ok(RingHom {
                        domain: self.domain.clone(),
                        codomain: other.codomain.clone(),
                        map: HomMap::NumberFieldGen { forward: v },
                    }),
                    _ => unreachable!(),
                }
            }
            _ => Err(RingError::ForeignElement {
                ring: self.domain.to_string(),
                coords: "composition regime mismatch".into(),
            }),
        }
    }
}

/// A verified ring isomorphism with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingIso {
    pub forward: RingHom,
    pub inverse: RingHom,
}

impl RingIso {
    pub fn identity(ring: &Ring) -> RingIso {
        let h = RingHom::identity(ring);
        RingIso {
            forward: h.clone(),
            inverse: h,
        }
    }

    pub fn domain(&self) -> &RingId {
        &self.forward.domain
    }

    pub fn range(&self) -> &RingId {
        &self.forward.codomain
    }

    pub fn inverted(&self) -> RingIso {
        RingIso {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// Semantic identity: domain, range, and the element-level map.
    pub fn key(&self) -> (RingId, RingId, HomMapKey) {
        (
            self.domain().clone(),
            self.range().clone(),
            HomMapKey::of(&self.forward.map),
        )
    }
}

/// Hashable canonical form of a hom map, for semantic iso dedup.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HomMapKey {
    Fin(Vec<u16>),
    Nf(Vec<String>),
}

impl HomMapKey {
    pub fn of(map: &HomMap) -> HomMapKey {
        match map {
            HomMap::FiniteTable(t) => HomMapKey::Fin(t.clone()),
            HomMap::NumberFieldGen { forward } => {
                HomMapKey::Nf(forward.iter().map(fmt_rational).collect())
            }
        }
    }
}

/// Check a candidate map given on generators and expand it to a verified
/// homomorphism, or report the violated law with witnesses.
pub fn check_hom(
    dom: &Ring,
    cod: &Ring,
    generator_images: &[(RingElement, RingElement)],
) -> Result<RingHom, HomError> {
    match (&dom.data, &cod.data) {
        (RingData::Finite(df), RingData::Finite(cf)) => {
            check_hom_finite(dom, df, cod, cf, generator_images)
        }
        (RingData::NumberField(dn), RingData::NumberField(cn)) => {
            let img = generator_images
                .iter()
                .find(|(g, _)| match &g.value {
                    ElemValue::Nf(v) => *v == dn.generator(),
                    _ => false,
                })
                .map(|(_, i)| i.clone())
                .ok_or_else(|| HomError::MissingGeneratorImage {
                    generator: "class of x".into(),
                })?;
            let v = match img.value {
                ElemValue::Nf(v) if v.len() == cn.degree => v,
                _ => {
                    return Err(HomError::RegimeMismatch {
                        domain: dom.id().to_string(),
                        codomain: cod.id().to_string(),
                    })
                }
            };
            let residue = dn.min_poly_at(cn, &v);
            if !residue.iter().all(|c| c.is_zero()) {
                let parts: Vec<String> = residue.iter().map(fmt_rational).collect();
                return Err(HomError::MinPolyNotAnnihilated {
                    value: format!("[{}]", parts.join(",")),
                });
            }
            Ok(RingHom {
                domain: dom.id().clone(),
                codomain: cod.id().clone(),
                map: HomMap::NumberFieldGen { forward: v },
            })
        }
        _ => Err(HomError::RegimeMismatch {
            domain: dom.id().to_string(),
            codomain: cod.id().to_string(),
        }),
    }
}

fn check_hom_finite(
    dom: &Ring,
    df: &FiniteRing,
    cod: &Ring,
    cf: &FiniteRing,
    generator_images: &[(RingElement, RingElement)],
) -> Result<RingHom, HomError> {
    let n = df.size();
    let mut table: Vec<Option<u16>> = vec![None; n];
    let show_dom = |i: u16| fmt_coords(&df.elems[i as usize]);
    let show_cod = |j: u16| fmt_coords(&cf.elems[j as usize]);
    let assign = |table: &mut Vec<Option<u16>>, i: u16, j: u16| -> Result<bool, (u16, u16, u16)> {
        match table[i as usize] {
            None => {
                table[i as usize] = Some(j);
                Ok(true)
            }
            Some(prev) if prev == j => Ok(false),
            Some(prev) => Err((i, prev, j)),
        }
    };
    // laws pin 0 and 1
    assign(&mut table, df.zero, cf.zero).expect("fresh");
    if let Err((_, prev, got)) = assign(&mut table, df.one, cf.one) {
        let _ = (prev, got);
    }
    if table[df.one as usize] != Some(cf.one) {
        return Err(HomError::UnitNotPreserved {
            got: show_cod(table[df.one as usize].unwrap()),
        });
    }
    for (g, img) in generator_images {
        let gi = g
            .coords()
            .and_then(|c| df.idx(c))
            .ok_or_else(|| HomError::MissingGeneratorImage {
                generator: format!("{g}"),
            })?;
        let ii = img
            .coords()
            .and_then(|c| cf.idx(c))
            .ok_or_else(|| HomError::MissingGeneratorImage {
                generator: format!("image {img}"),
            })?;
        if let Err((i, prev, got)) = assign(&mut table, gi, ii) {
            if i == df.one {
                return Err(HomError::UnitNotPreserved {
                    got: show_cod(got),
                });
            }
            return Err(HomError::NotAdditive {
                a: show_dom(i),
                b: "0".into(),
                expected: show_cod(prev),
                got: show_cod(got),
            });
        }
    }
    // close under + and ×, checking consistency as derived values land
    loop {
        let mut changed = false;
        let defined: Vec<u16> = (0..n as u16).filter(|i| table[*i as usize].is_some()).collect();
        for &a in &defined {
            for &b in &defined {
                let (fa, fb) = (table[a as usize].unwrap(), table[b as usize].unwrap());
                let s = df.add_idx(a, b);
                let fs = cf.add_idx(fa, fb);
                match assign(&mut table, s, fs) {
                    Ok(true) => changed = true,
                    Ok(false) => {}
                    Err((_, prev, got)) => {
                        return Err(HomError::NotAdditive {
                            a: show_dom(a),
                            b: show_dom(b),
                            expected: show_cod(prev),
                            got: show_cod(got),
                        })
                    }
                }
                let p = df.mul_idx(a, b);
                let fp = cf.mul_idx(fa, fb);
                match assign(&mut table, p, fp) {
                    Ok(true) => changed = true,
                    Ok(false) => {}
                    Err((_, prev, got)) => {
                        return Err(HomError::NotMultiplicative {
                            a: show_dom(a),
                            b: show_dom(b),
                            expected: show_cod(prev),
                            got: show_cod(got),
                        })
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(missing) = table.iter().position(|t| t.is_none()) {
        return Err(HomError::MissingGeneratorImage {
            generator: format!(
                "supplied images do not generate; {} unreachable",
                show_dom(missing as u16)
            ),
        });
    }
    let final_table: Vec<u16> = table.into_iter().map(|t| t.unwrap()).collect();
    // full law audit over all pairs
    for a in 0..n as u16 {
        for b in 0..n as u16 {
            let fs = cf.add_idx(final_table[a as usize], final_table[b as usize]);
            if final_table[df.add_idx(a, b) as usize] != fs {
                return Err(HomError::NotAdditive {
                    a: show_dom(a),
                    b: show_dom(b),
                    expected: show_cod(final_table[df.add_idx(a, b) as usize]),
                    got: show_cod(fs),
                });
            }
            let fp = cf.mul_idx(final_table[a as usize], final_table[b as usize]);
            if final_table[df.mul_idx(a, b) as usize] != fp {
                return Err(HomError::NotMultiplicative {
                    a: show_dom(a),
                    b: show_dom(b),
                    expected: show_cod(final_table[df.mul_idx(a, b) as usize]),
                    got: show_cod(fp),
                });
            }
        }
    }
    Ok(RingHom {
        domain: dom.id().clone(),
        codomain: cod.id().clone(),
        map: HomMap::FiniteTable(final_table),
    })
}

/// Promote a verified bijective hom to an iso by inverting the table.
pub fn hom_to_iso(dom: &Ring, cod: &Ring, hom: RingHom) -> Result<RingIso, HomError> {
    match &hom.map {
        HomMap::FiniteTable(t) => {
            let df = dom.finite().unwrap();
            let cf = cod.finite().unwrap();
            if df.size() != cf.size() {
                return Err(HomError::NotSurjective {
                    missing: "size mismatch".into(),
                });
            }
            let mut inv: Vec<Option<u16>> = vec![None; cf.size()];
            for (i, &j) in t.iter().enumerate() {
                if let Some(prev) = inv[j as usize] {
                    return Err(HomError::NotInjective {
                        a: fmt_coords(&df.elems[prev as usize]),
                        b: fmt_coords(&df.elems[i]),
                        image: fmt_coords(&cf.elems[j as usize]),
                    });
                }
                inv[j as usize] = Some(i as u16);
            }
            let inv_table: Vec<u16> = inv
                .into_iter()
                .enumerate()
                .map(|(j, o)| {
                    o.ok_or_else(|| HomError::NotSurjective {
                        missing: fmt_coords(&cf.elems[j]),
                    })
                })
                .collect::<Result<_, _>>()?;
            Ok(RingIso {
                inverse: RingHom {
                    domain: hom.codomain.clone(),
                    codomain: hom.domain.clone(),
                    map: HomMap::FiniteTable(inv_table),
                },
                forward: hom,
            })
        }
        HomMap::NumberFieldGen { .. } => Err(HomError::MissingGeneratorImage {
            generator: "number-field isos need an explicit inverse witness".into(),
        }),
    }
}

/// Assemble and verify a number-field isomorphism from explicit forward and
/// inverse generator images.
pub fn nf_iso_from_witness(
    dom: &Ring,
    cod: &Ring,
    forward_gen: Vec<BigRational>,
    inverse_gen: Vec<BigRational>,
) -> Result<RingIso, HomError> {
    let dn = dom.number_field().ok_or(HomError::RegimeMismatch {
        domain: dom.id().to_string(),
        codomain: cod.id().to_string(),
    })?;
    let cn = cod.number_field().ok_or(HomError::RegimeMismatch {
        domain: dom.id().to_string(),
        codomain: cod.id().to_string(),
    })?;
    if dn.degree != cn.degree {
        return Err(HomError::RegimeMismatch {
            domain: format!("{} (degree {})", dom.id(), dn.degree),
            codomain: format!("{} (degree {})", cod.id(), cn.degree),
        });
    }
    let fwd = RingHom {
        domain: dom.id().clone(),
        codomain: cod.id().clone(),
        map: HomMap::NumberFieldGen {
            forward: forward_gen.clone(),
        },
    };
    let residue = dn.min_poly_at(cn, &forward_gen);
    if !residue.iter().all(|c| c.is_zero()) {
        let parts: Vec<String> = residue.iter().map(fmt_rational).collect();
        return Err(HomError::MinPolyNotAnnihilated {
            value: format!("[{}]", parts.join(",")),
        });
    }
    let residue_inv = cn.min_poly_at(dn, &inverse_gen);
    if !residue_inv.iter().all(|c| c.is_zero()) {
        let parts: Vec<String> = residue_inv.iter().map(fmt_rational).collect();
        return Err(HomError::MinPolyNotAnnihilated {
            value: format!("inverse: [{}]", parts.join(",")),
        });
    }
    let inv = RingHom {
        domain: cod.id().clone(),
        codomain: dom.id().clone(),
        map: HomMap::NumberFieldGen {
            forward: inverse_gen.clone(),
        },
    };
    // both composites must fix the generators
    let round = cn.eval_at(&cn.generator(), cn, &cn.generator());
    debug_assert_eq!(round, cn.generator());
    let fwd_then_inv = cn.eval_at(&forward_gen, dn, &inverse_gen);
    if fwd_then_inv != dn.generator() {
        let parts: Vec<String> = fwd_then_inv.iter().map(fmt_rational).collect();
        return Err(HomError::InverseMismatch {
            witness: format!("inverse(forward(x)) = [{}]", parts.join(",")),
        });
    }
    let inv_then_fwd = dn.eval_at(&inverse_gen, cn, &forward_gen);
    if inv_then_fwd != cn.generator() {
        let parts: Vec<String> = inv_then_fwd.iter().map(fmt_rational).collect();
        return Err(HomError::InverseMismatch {
            witness: format!("forward(inverse(x)) = [{}]", parts.join(",")),
        });
    }
    Ok(RingIso {
        forward: fwd,
        inverse: inv,
    })
}

/// A small generating set for a finite ring, with a replayable construction
/// plan that reaches every element from 1 and the generators via + and ×.
#[derive(Debug, Clone)]
pub struct GenPlan {
    pub generators: Vec<u16>,
    /// In order: (element index, recipe). Every index appears exactly once.
    steps: Vec<(u16, Step)>,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    One,
    Gen(usize),
    Add(u16, u16),
    Mul(u16, u16),
    Neg(u16),
}

pub fn generator_plan(fin: &FiniteRing) -> GenPlan {
    let n = fin.size();
    let mut reached: Vec<bool> = vec![false; n];
    let mut steps: Vec<(u16, Step)> = Vec::new();
    let mut generators: Vec<u16> = Vec::new();
    let push = |reached: &mut Vec<bool>, steps: &mut Vec<(u16, Step)>, i: u16, s: Step| {
        if !reached[i as usize] {
            reached[i as usize] = true;
            steps.push((i, s));
        }
    };
    push(&mut reached, &mut steps, fin.one, Step::One);
    loop {
        // close under +, ×, and negation
        loop {
            let mut changed = false;
            let present: Vec<u16> = (0..n as u16).filter(|i| reached[*i as usize]).collect();
            for &a in &present {
                let na = fin.neg_idx(a);
                if !reached[na as usize] {
                    push(&mut reached, &mut steps, na, Step::Neg(a));
                    changed = true;
                }
                for &b in &present {
                    let s = fin.add_idx(a, b);
                    if !reached[s as usize] {
                        push(&mut reached, &mut steps, s, Step::Add(a, b));
                        changed = true;
                    }
                    let p = fin.mul_idx(a, b);
                    if !reached[p as usize] {
                        push(&mut reached, &mut steps, p, Step::Mul(a, b));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        match (0..n as u16).find(|i| !reached[*i as usize]) {
            None => break,
            Some(next) => {
                generators.push(next);
                let g = generators.len() - 1;
                push(&mut reached, &mut steps, next, Step::Gen(g));
            }
        }
    }
    GenPlan { generators, steps }
}

impl GenPlan {
    /// Replay the plan in a codomain given images for the generators,
    /// producing a candidate full table.
    fn evaluate(&self, cod: &FiniteRing, gen_images: &[u16], dom_size: usize) -> Vec<u16> {
        let mut table: Vec<u16> = vec![0; dom_size];
        for (target, step) in &self.steps {
            let v = match step {
                Step::One => cod.one,
                Step::Gen(g) => gen_images[*g],
                Step::Add(a, b) => cod.add_idx(table[*a as usize], table[*b as usize]),
                Step::Mul(a, b) => cod.mul_idx(table[*a as usize], table[*b as usize]),
                Step::Neg(a) => cod.neg_idx(table[*a as usize]),
            };
            table[*target as usize] = v;
        }
        table
    }
}

fn table_is_hom(df: &FiniteRing, cf: &FiniteRing, t: &[u16]) -> bool {
    if t[df.one as usize] != cf.one || t[df.zero as usize] != cf.zero {
        return false;
    }
    let n = df.size();
    for a in 0..n as u16 {
        for b in 0..n as u16 {
            if t[df.add_idx(a, b) as usize] != cf.add_idx(t[a as usize], t[b as usize]) {
                return false;
            }
            if t[df.mul_idx(a, b) as usize] != cf.mul_idx(t[a as usize], t[b as usize]) {
                return false;
            }
        }
    }
    true
}

fn table_is_bijective(t: &[u16], cod_size: usize) -> bool {
    if t.len() != cod_size {
        return false;
    }
    let mut seen = vec![false; cod_size];
    for &j in t {
        if seen[j as usize] {
            return false;
        }
        seen[j as usize] = true;
    }
    true
}

/// A number-field isomorphism witness: generator images both ways.
#[derive(Debug, Clone)]
pub struct NfWitness {
    pub forward_gen: Vec<BigRational>,
    pub inverse_gen: Vec<BigRational>,
}

/// All isomorphisms between two rings.
///
/// Finite case: exhaustive generator-image search, both rings at most
/// [`SEARCH_CAP`] elements. Number fields: the ℚ-dimension screen plus
/// verification of the supplied witnesses only. Mismatched sizes or
/// dimensions yield an empty list (trivially no iso).
pub fn iso_search(
    dom: &Ring,
    cod: &Ring,
    witnesses: &[NfWitness],
) -> Result<Vec<RingIso>, RingError> {
    match (&dom.data, &cod.data) {
        (RingData::Finite(df), RingData::Finite(cf)) => {
            if df.size() != cf.size() {
                return Ok(vec![]);
            }
            if df.size() > SEARCH_CAP {
                return Err(RingError::TooLarge {
                    id: dom.id().to_string(),
                    size: df.size(),
                    cap: SEARCH_CAP,
                });
            }
            let plan = generator_plan(df);
            let g = plan.generators.len();
            let n = cf.size();
            let mut found = Vec::new();
            let mut images = vec![0u16; g];
            let total = (n as u128).pow(g as u32);
            for k in 0..total {
                let mut rem = k;
                for slot in images.iter_mut() {
                    *slot = (rem % n as u128) as u16;
                    rem /= n as u128;
                }
                let table = plan.evaluate(cf, &images, df.size());
                if table_is_bijective(&table, n) && table_is_hom(df, cf, &table) {
                    let hom = RingHom {
                        domain: dom.id().clone(),
                        codomain: cod.id().clone(),
                        map: HomMap::FiniteTable(table),
                    };
                    let iso = hom_to_iso(dom, cod, hom).expect("bijective hom inverts");
                    found.push(iso);
                }
            }
            found.sort_by_key(|i| HomMapKey::of(&i.forward.map));
            found.dedup_by_key(|i| HomMapKey::of(&i.forward.map));
            Ok(found)
        }
        (RingData::NumberField(dn), RingData::NumberField(cn)) => {
            if dn.degree != cn.degree {
                return Ok(vec![]);
            }
            if dom.id() == cod.id() {
                // the identity is always available on the nominally same field
                let mut out = vec![RingIso::identity(dom)];
                for w in witnesses {
                    if let Ok(iso) =
                        nf_iso_from_witness(dom, cod, w.forward_gen.clone(), w.inverse_gen.clone())
                    {
                        out.push(iso);
                    }
                }
                out.sort_by_key(|i| HomMapKey::of(&i.forward.map));
                out.dedup_by_key(|i| HomMapKey::of(&i.forward.map));
                return Ok(out);
            }
            let mut out = Vec::new();
            for w in witnesses {
                if let Ok(iso) =
                    nf_iso_from_witness(dom, cod, w.forward_gen.clone(), w.inverse_gen.clone())
                {
                    out.push(iso);
                }
            }
            out.sort_by_key(|i| HomMapKey::of(&i.forward.map));
            out.dedup_by_key(|i| HomMapKey::of(&i.forward.map));
            Ok(out)
        }
        // different regimes: finite vs number field, trivially no iso
        _ => Ok(vec![]),
    }
}

/// Verify that composing an iso with its inverse gives the identity, on every
/// element (finite) or on the generator (number field).
pub fn verify_iso(dom: &Ring, cod: &Ring, iso: &RingIso) -> Result<(), HomError> {
    match (&iso.forward.map, &iso.inverse.map) {
        (HomMap::FiniteTable(f), HomMap::FiniteTable(g)) => {
            let df = dom.finite().unwrap();
            let cf = cod.finite().unwrap();
            for i in 0..df.size() {
                if g[f[i] as usize] != i as u16 {
                    return Err(HomError::InverseMismatch {
                        witness: fmt_coords(&df.elems[i]),
                    });
                }
            }
            for j in 0..cf.size() {
                if f[g[j] as usize] != j as u16 {
                    return Err(HomError::InverseMismatch {
                        witness: fmt_coords(&cf.elems[j]),
                    });
                }
            }
            if !table_is_hom(df, cf, f) {
                return Err(HomError::NotMultiplicative {
                    a: "?".into(),
                    b: "?".into(),
                    expected: "hom law".into(),
                    got: "violation".into(),
                });
            }
            Ok(())
        }
        (HomMap::NumberFieldGen { forward }, HomMap::NumberFieldGen { forward: backward }) => {
            let dn = dom.number_field().unwrap();
            let cn = cod.number_field().unwrap();
            let round = cn.eval_at(forward, dn, backward);
            if round != dn.generator() {
                return Err(HomError::InverseMismatch {
                    witness: "generator round trip".into(),
                });
            }
            Ok(())
        }
        _ => Err(HomError::RegimeMismatch {
            domain: dom.id().to_string(),
            codomain: cod.id().to_string(),
        }),
    }
}

/// A pool of built rings keyed by nominal id.
#[derive(Debug, Clone, Default)]
pub struct RingPool {
    map: BTreeMap<RingId, Arc<Ring>>,
}

impl RingPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a ring. Re-inserting the identical presentation is a no-op;
    /// a different presentation under the same id is rejected.
    pub fn insert(&mut self, ring: Arc<Ring>) -> Result<(), RingError> {
        if let Some(existing) = self.map.get(ring.id()) {
            if existing.presentation == ring.presentation {
                return Ok(());
            }
            return Err(RingError::MalformedPresentation {
                id: ring.id().to_string(),
                reason: "duplicate id with a different presentation".into(),
            });
        }
        self.map.insert(ring.id().clone(), ring);
        Ok(())
    }

    pub fn get(&self, id: &RingId) -> Result<&Arc<Ring>, RingError> {
        self.map.get(id).ok_or_else(|| RingError::UnknownRing {
            id: id.to_string(),
        })
    }

    pub fn contains(&self, id: &RingId) -> bool {
        self.map.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &RingId> {
        self.map.keys()
    }

    pub fn rings(&self) -> impl Iterator<Item = &Arc<Ring>> {
        self.map.values()
    }

    /// Localize and record the result, returning the localized ring and map.
    pub fn localize(
        &mut self,
        id: &RingId,
        f: &RingElement,
    ) -> Result<(Arc<Ring>, RingHom), RingError> {
        let ring = self.get(id)?.clone();
        let (loc, hom) = localize(&ring, f)?;
        self.insert(loc.clone())?;
        Ok((loc, hom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Arc<Ring> {
        make_ring(&RingPresentation::zmod(format!("Z{n}"), n)).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn zmod6_has_six_elements_and_distinct_unit() {
        let r = z(6);
        assert_eq!(r.size(), Some(6));
        assert_ne!(r.zero(), r.one());
    }

    #[test]
    fn galois_quotient_f4_is_a_field() {
        // x^2 + x + 1 over F_2
        let p = RingPresentation::galois("F4", 2, vec![1, 1, 1]);
        let r = make_ring(&p).unwrap();
        assert_eq!(r.size(), Some(4));
        // brute force: every nonzero element has an inverse
        for e in r.elements() {
            if r.is_zero(&e) {
                continue;
            }
            assert!(r.is_unit(&e), "{e} must be a unit in F4");
        }
    }

    #[test]
    fn galois_quotient_rejects_reducible_modulus() {
        // x^2 + 1 = (x+1)^2 over F_2
        let p = RingPresentation::galois("bad", 2, vec![1, 0, 1]);
        match make_ring(&p) {
            Err(RingError::ReducibleModulus { .. }) => {}
            other => panic!("expected ReducibleModulus, got {other:?}"),
        }
    }

    #[test]
    fn number_field_cbrt2_has_dimension_3() {
        // x^3 - 2
        let p = RingPresentation::number_field("k", vec![rat(-2), rat(0), rat(0), rat(1)], false);
        let r = make_ring(&p).unwrap();
        assert_eq!(r.number_field().unwrap().degree, 3);
        // field: the generator is invertible, and g * g^{-1} = 1
        let nf = r.number_field().unwrap();
        let g = nf.generator();
        let gi = nf.inv(&g).unwrap();
        assert_eq!(nf.mul(&g, &gi), nf.one());
    }

    #[test]
    fn number_field_rejects_rational_root() {
        // x^2 - 4 has the root 2
        let p = RingPresentation::number_field("bad", vec![rat(-4), rat(0), rat(1)], false);
        assert!(matches!(
            make_ring(&p),
            Err(RingError::MalformedPresentation { .. })
        ));
    }

    #[test]
    fn size_cap_enforced() {
        let p = RingPresentation::zmod("big", 257);
        assert!(matches!(
            make_ring(&p),
            Err(RingError::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn localize_z6_at_2_gives_size_3_with_canonical_map() {
        // oracle: powers of 2 in Z/6 are 2, 4, 2, ...; e = 4; 4·Z6 = {0, 2, 4}
        let r = z(6);
        let f = r.element(vec![2]).unwrap();
        let (loc, hom) = localize(&r, &f).unwrap();
        assert_eq!(loc.size(), Some(3));
        let one_img = hom.apply(&r, &loc, &r.one()).unwrap();
        assert_eq!(one_img.coords().unwrap(), &vec![4]);
        // repeated calls return the nominally identical ring
        let (loc2, _) = localize(&r, &f).unwrap();
        assert!(loc.same_ring(&loc2));
        // same idempotent, same ring: localizing at 4 gives the same nominal ring
        let f4 = r.element(vec![4]).unwrap();
        let (loc3, _) = localize(&r, &f4).unwrap();
        assert!(loc.same_ring(&loc3));
    }

    #[test]
    fn localize_at_unit_returns_the_ring_itself() {
        let r = z(6);
        let one = r.one();
        let (loc, hom) = localize(&r, &one).unwrap();
        assert!(loc.same_ring(&r));
        assert_eq!(hom, RingHom::identity(&r));
        // 5 is a unit in Z/6 too
        let five = r.element(vec![5]).unwrap();
        let (loc5, _) = localize(&r, &five).unwrap();
        assert!(loc5.same_ring(&r));
    }

    #[test]
    fn localize_field_is_identity() {
        let p = RingPresentation::number_field("k", vec![rat(-2), rat(0), rat(0), rat(1)], false);
        let k = make_ring(&p).unwrap();
        let nf = k.number_field().unwrap();
        let g = k.nf_element(nf.generator()).unwrap();
        let (loc, hom) = localize(&k, &g).unwrap();
        assert!(loc.same_ring(&k));
        assert_eq!(hom, RingHom::identity(&k));
    }

    #[test]
    fn localize_at_nilpotent_gives_zero_ring() {
        let r = z(4);
        let two = r.element(vec![2]).unwrap();
        let (loc, _) = localize(&r, &two).unwrap();
        assert_eq!(loc.size(), Some(1));
        assert_eq!(loc.zero(), loc.one());
    }

    #[test]
    fn localization_flattens_to_root() {
        // (Z12 at 2) localized again stays keyed by Z12
        let r = z(12);
        let two = r.element(vec![2]).unwrap();
        let (loc, _) = localize(&r, &two).unwrap();
        assert_eq!(loc.root, r.presentation.id);
        // localizing eA at an element of eA references the same root
        let g = loc.element(vec![8]).unwrap();
        let (loc2, _) = localize(&loc, &g).unwrap();
        assert_eq!(loc2.root, r.presentation.id);
        // 8 is a unit of {0,4,8} with identity 4 (8*8 = 64 = 4), so this is eA itself
        assert!(loc2.same_ring(&loc));
    }

    #[test]
    fn ideals_of_z6() {
        // oracle: brute-force subgroup enumeration gives {0}, {0,2,4}, {0,3}, Z6
        let r = z(6);
        let ideals = enumerate_ideals(&r).unwrap();
        let sets: Vec<Vec<u64>> = ideals
            .iter()
            .map(|i| i.elements.iter().map(|c| c[0]).collect())
            .collect();
        assert_eq!(
            sets,
            vec![vec![0], vec![0, 3], vec![0, 2, 4], vec![0, 1, 2, 3, 4, 5]]
        );
    }

    #[test]
    fn ideals_of_z4() {
        let r = z(4);
        let ideals = enumerate_ideals(&r).unwrap();
        let sets: Vec<Vec<u64>> = ideals
            .iter()
            .map(|i| i.elements.iter().map(|c| c[0]).collect())
            .collect();
        assert_eq!(sets, vec![vec![0], vec![0, 2], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn ideals_of_a_field_are_trivial() {
        let p = RingPresentation::galois("F4", 2, vec![1, 1, 1]);
        let r = make_ring(&p).unwrap();
        let ideals = enumerate_ideals(&r).unwrap();
        assert_eq!(ideals.len(), 2);
    }

    #[test]
    fn ideal_lattice_closed_under_sum_and_intersection() {
        for n in [4u64, 6, 8, 9, 12] {
            let r = z(n);
            let fin = r.finite().unwrap();
            let ideals = enumerate_ideals(&r).unwrap();
            let as_sets: Vec<BTreeSet<Coords>> =
                ideals.iter().map(|i| i.elements.clone()).collect();
            for a in &as_sets {
                for b in &as_sets {
                    let inter: BTreeSet<Coords> = a.intersection(b).cloned().collect();
                    assert!(as_sets.contains(&inter), "intersection closed in Z{n}");
                    // sum: closure of the union under addition
                    let mut sum: BTreeSet<Coords> = a.union(b).cloned().collect();
                    loop {
                        let mut next = sum.clone();
                        for x in &sum {
                            for y in &sum {
                                let i = fin.idx(x).unwrap();
                                let j = fin.idx(y).unwrap();
                                next.insert(fin.elems[fin.add_idx(i, j) as usize].clone());
                            }
                        }
                        if next == sum {
                            break;
                        }
                        sum = next;
                    }
                    assert!(as_sets.contains(&sum), "sum closed in Z{n}");
                }
            }
        }
    }

    #[test]
    fn check_hom_identity_on_z6() {
        let r = z(6);
        let pairs: Vec<(RingElement, RingElement)> = r
            .elements()
            .into_iter()
            .map(|e| (e.clone(), e))
            .collect();
        assert!(check_hom(&r, &r, &pairs).is_ok());
    }

    #[test]
    fn check_hom_z6_to_z3() {
        // exhaustive law check over 36 pairs
        let a = z(6);
        let b = z(3);
        let pairs = vec![(a.element(vec![1]).unwrap(), b.element(vec![1]).unwrap())];
        let hom = check_hom(&a, &b, &pairs).unwrap();
        let img = hom
            .apply(&a, &b, &a.element(vec![4]).unwrap())
            .unwrap();
        assert_eq!(img.coords().unwrap(), &vec![1]);
    }

    #[test]
    fn check_hom_z4_to_z2_ok_but_not_back() {
        let a = z(4);
        let b = z(2);
        let ok = check_hom(
            &a,
            &b,
            &[(a.element(vec![1]).unwrap(), b.element(vec![1]).unwrap())],
        );
        assert!(ok.is_ok());
        // 2·1 = 0 in Z/2 must map to 0, but 2·1 = 2 in Z/4
        let bad = check_hom(
            &b,
            &a,
            &[(b.element(vec![1]).unwrap(), a.element(vec![1]).unwrap())],
        );
        match bad {
            Err(HomError::NotAdditive { .. }) | Err(HomError::UnitNotPreserved { .. }) => {}
            other => panic!("expected additive/unit failure, got {other:?}"),
        }
    }

    #[test]
    fn iso_search_z6_z6_finds_exactly_identity() {
        let a = z(6);
        let isos = iso_search(&a, &a, &[]).unwrap();
        assert_eq!(isos.len(), 1);
        assert_eq!(isos[0].forward, RingHom::identity(&a).clone());
    }

    #[test]
    fn iso_search_dimension_screen() {
        let q = make_ring(&RingPresentation::number_field("Q", vec![rat(0), rat(1)], false))
            .unwrap();
        let q2 = make_ring(&RingPresentation::number_field(
            "Qsqrt2",
            vec![rat(-2), rat(0), rat(1)],
            false,
        ))
        .unwrap();
        assert!(iso_search(&q, &q2, &[]).unwrap().is_empty());
    }

    #[test]
    fn iso_search_f4_finds_frobenius() {
        let p = RingPresentation::galois("F4", 2, vec![1, 1, 1]);
        let r = make_ring(&p).unwrap();
        let isos = iso_search(&r, &r, &[]).unwrap();
        // identity and Frobenius
        assert_eq!(isos.len(), 2);
    }

    #[test]
    fn iso_search_contains_identity_for_every_stock_ring() {
        for n in [2u64, 3, 4, 6, 9, 12] {
            let r = z(n);
            let isos = iso_search(&r, &r, &[]).unwrap();
            assert!(isos
                .iter()
                .any(|i| i.forward == RingHom::identity(&r)));
        }
    }

    #[test]
    fn iso_search_z6_vs_product_z2_z3() {
        let a = z(6);
        let p = RingPresentation::product(
            "Z2xZ3",
            vec![
                RingPresentation::zmod("Z2", 2),
                RingPresentation::zmod("Z3", 3),
            ],
        );
        let b = make_ring(&p).unwrap();
        let isos = iso_search(&a, &b, &[]).unwrap();
        assert_eq!(isos.len(), 1, "CRT iso is unique");
        verify_iso(&a, &b, &isos[0]).unwrap();
    }

    #[test]
    fn nf_iso_witness_between_conjugate_presentations() {
        // two nominally distinct copies of Q[x]/(x^3 - 2)
        let mp = vec![rat(-2), rat(0), rat(0), rat(1)];
        let k = make_ring(&RingPresentation::number_field("k", mp.clone(), false)).unwrap();
        let kp = make_ring(&RingPresentation::number_field("kprime", mp, false)).unwrap();
        let gen = k.number_field().unwrap().generator();
        let iso = nf_iso_from_witness(&k, &kp, gen.clone(), gen).unwrap();
        verify_iso(&k, &kp, &iso).unwrap();
    }

    #[test]
    fn localize_idempotence_up_to_iso() {
        // localize(A, f) twice at the image of f is isomorphic to the first
        for n in [4u64, 6, 8, 9, 12] {
            let r = z(n);
            for f in r.elements() {
                if r.is_zero(&f) {
                    continue;
                }
                let (l1, h1) = localize(&r, &f).unwrap();
                let f_img = h1.apply(&r, &l1, &f).unwrap();
                if l1.is_zero(&f_img) {
                    continue; // nilpotent collapsed to the zero ring
                }
                let (l2, _) = localize(&l1, &f_img).unwrap();
                let isos = iso_search(&l1, &l2, &[]).unwrap();
                assert!(!isos.is_empty(), "Z{n} at {f}: repeat localization isomorphic");
            }
        }
    }

    #[test]
    fn nominal_identity_semantics() {
        let a1 = z(6);
        let a2 = z(6);
        assert!(a1.same_ring(&a2));
        let b = make_ring(&RingPresentation::zmod("Z6other", 6)).unwrap();
        assert!(!a1.same_ring(&b));
    }

    #[test]
    fn iso_composed_with_inverse_is_identity() {
        let a = z(6);
        let b = make_ring(&RingPresentation::zmod("Z6ren", 6)).unwrap();
        for iso in iso_search(&a, &b, &[]).unwrap() {
            let round = iso
                .forward
                .compose(&iso.inverse, &a, &b, &a)
                .unwrap();
            assert_eq!(round, RingHom::identity(&a));
        }
    }
}
