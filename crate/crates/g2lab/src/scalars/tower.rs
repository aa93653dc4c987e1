//! Cyclotomic fields extended by square roots.
//!
//! An element of the tower ℚ(ζ_m)(√d₁,…,√d_s) is stored as an integer
//! numerator vector over a common positive denominator. Coordinates are in
//! the basis ζ^a·∏√d_i^{ε_i}, flattened as `a + φ(m)·Σ ε_i 2^(i-1)`, so an
//! element of a lower level is a prefix of the flat vector.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ScalarError;

/// Maximum number of adjoined square roots.
pub const MAX_DEPTH: usize = 8;

#[derive(Debug)]
struct TowerData {
    m: u64,
    phi: usize,
    cyclo: Vec<BigInt>,
    // reduce[j] = t^(phi+j) mod Φ_m, for j < phi - 1
    reduce: Vec<Vec<BigInt>>,
    // integral radicands, radicand i lives at level i (length phi·2^i)
    sqrts: Vec<Vec<BigInt>>,
}

/// A tower ℚ(ζ_m)(√d₁,…,√d_s); cheap to clone.
#[derive(Clone)]
pub struct FieldTower(Arc<TowerData>);

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.0.m)?;
        for d in &self.0.sqrts {
            write!(f, "(sqrt{:?})", d.iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.m == other.0.m && self.0.sqrts == other.0.sqrts)
    }
}
impl Eq for FieldTower {}

/// Coefficients (low to high) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    // t^n - 1 divided by Φ_d for all proper divisors d
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phid = cyclotomic_poly(d);
            num = int_poly_exact_div(&num, &phid);
        }
    }
    num
}

fn int_poly_exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    // b monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            r[i + j] -= &c * &b[j];
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

pub fn euler_phi(n: u64) -> u64 {
    let mut n0 = n;
    let mut res = n;
    let mut p = 2;
    while p * p <= n0 {
        if n0.is_multiple_of(p) {
            while n0.is_multiple_of(p) {
                n0 /= p;
            }
            res -= res / p;
        }
        p += 1;
    }
    if n0 > 1 {
        res -= res / n0;
    }
    res
}

impl FieldTower {
    /// The cyclotomic field ℚ(ζ_m); `m = 1` gives ℚ.
    pub fn cyclotomic(m: u64) -> FieldTower {
        assert!(m >= 1, "conductor must be positive");
        let cyclo = cyclotomic_poly(m);
        let phi = cyclo.len() - 1;
        let mut reduce = Vec::new();
        // t^phi = -(cyclo[0..phi])
        let mut cur: Vec<BigInt> = cyclo[..phi].iter().map(|c| -c).collect();
        for _ in 0..phi.saturating_sub(1) {
            reduce.push(cur.clone());
            // multiply by t
            let top = cur[phi - 1].clone();
            let mut next = vec![BigInt::zero(); phi];
            for i in (1..phi).rev() {
                next[i] = cur[i - 1].clone();
            }
            for i in 0..phi {
                next[i] -= &top * &cyclo[i];
            }
            cur = next;
        }
        FieldTower(Arc::new(TowerData { m, phi, cyclo, reduce, sqrts: Vec::new() }))
    }

    pub fn rationals() -> FieldTower {
        FieldTower::cyclotomic(1)
    }

    pub fn conductor(&self) -> u64 {
        self.0.m
    }

    pub fn phi(&self) -> usize {
        self.0.phi
    }

    pub fn depth(&self) -> usize {
        self.0.sqrts.len()
    }

    /// Degree over ℚ: φ(m)·2^s.
    pub fn degree(&self) -> usize {
        self.0.phi << self.0.sqrts.len()
    }

    pub fn cyclotomic_modulus(&self) -> &[BigInt] {
        &self.0.cyclo
    }

    /// The radicands adjoined so far, as elements of their own level.
    pub fn radicands(&self) -> Vec<Scalar> {
        (0..self.depth())
            .map(|i| {
                let t = self.prefix(i);
                Scalar::from_parts(t, self.0.sqrts[i].clone(), BigInt::one())
            })
            .collect()
    }

    pub(crate) fn radicand_raw(&self, i: usize) -> &[BigInt] {
        &self.0.sqrts[i]
    }

    /// The sub-tower made of the first `k` square roots.
    pub fn prefix(&self, k: usize) -> FieldTower {
        assert!(k <= self.depth());
        if k == self.depth() {
            return self.clone();
        }
        FieldTower(Arc::new(TowerData {
            m: self.0.m,
            phi: self.0.phi,
            cyclo: self.0.cyclo.clone(),
            reduce: self.0.reduce.clone(),
            sqrts: self.0.sqrts[..k].to_vec(),
        }))
    }

    /// True when `self` is `other` with possibly fewer square roots.
    pub fn is_prefix_of(&self, other: &FieldTower) -> bool {
        self.0.m == other.0.m
            && self.depth() <= other.depth()
            && self.0.sqrts[..] == other.0.sqrts[..self.depth()]
    }

    /// True when every generator of `self` lifts into `other`.
    pub fn embeds_in(&self, other: &FieldTower) -> bool {
        self == other
            || (self.zeta().lift_to(other).is_ok()
                && (0..self.depth()).all(|i| self.sqrt_generator(i).lift_to(other).is_ok()))
    }

    /// Whichever of the two towers contains the other.
    pub fn join(&self, other: &FieldTower) -> Option<FieldTower> {
        if self.embeds_in(other) {
            Some(other.clone())
        } else if other.embeds_in(self) {
            Some(self.clone())
        } else {
            None
        }
    }

    /// Appends √d without any squareness test. `d` must be a nonzero element
    /// of this tower; it is rescaled to have integer coordinates.
    pub(crate) fn push_sqrt_unchecked(&self, d: &Scalar) -> Result<(FieldTower, Scalar), ScalarError> {
        if self.depth() >= MAX_DEPTH {
            return Err(ScalarError::TowerDepthExceeded(MAX_DEPTH));
        }
        let d = d.lift_to(self)?;
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        // √(n/e) = √(n·e)/e
        let rad: Vec<BigInt> = d.num.iter().map(|x| x * &d.den).collect();
        let mut sqrts = self.0.sqrts.clone();
        sqrts.push(rad);
        let t = FieldTower(Arc::new(TowerData {
            m: self.0.m,
            phi: self.0.phi,
            cyclo: self.0.cyclo.clone(),
            reduce: self.0.reduce.clone(),
            sqrts,
        }));
        let gen = t.sqrt_generator(t.depth() - 1);
        let root = gen.div_int(&d.den);
        Ok((t, root))
    }

    pub fn zero(&self) -> Scalar {
        Scalar::from_parts(self.clone(), vec![BigInt::zero(); self.degree()], BigInt::one())
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int<T: Into<BigInt>>(&self, n: T) -> Scalar {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = n.into();
        Scalar::from_parts(self.clone(), v, BigInt::one())
    }

    pub fn from_ratio<A: Into<BigInt>, B: Into<BigInt>>(&self, n: A, d: B) -> Scalar {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = n.into();
        Scalar::new_normalized(self.clone(), v, d.into())
    }

    pub fn from_rational(&self, q: &BigRational) -> Scalar {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = q.numer().clone();
        Scalar::new_normalized(self.clone(), v, q.denom().clone())
    }

    /// Builds an element from rational coordinates in the documented basis.
    pub fn from_coords(&self, coords: &[BigRational]) -> Result<Scalar, ScalarError> {
        if coords.len() != self.degree() {
            return Err(ScalarError::BadLength { expected: self.degree(), got: coords.len() });
        }
        let mut den = BigInt::one();
        for c in coords {
            den = den.lcm(c.denom());
        }
        let num = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(Scalar::new_normalized(self.clone(), num, den))
    }

    /// ζ_m^k.
    pub fn zeta_pow(&self, k: i64) -> Scalar {
        let m = self.0.m as i64;
        let e = k.rem_euclid(m) as usize;
        let phi = self.0.phi;
        let mut v = vec![BigInt::zero(); self.degree()];
        if e < phi {
            v[e] = BigInt::one();
        } else {
            // repeated reduction
            let mut cur = vec![BigInt::zero(); phi];
            cur[phi - 1] = BigInt::one();
            for _ in phi - 1..e {
                cur = self.base_mul_t(&cur);
            }
            v[..phi].clone_from_slice(&cur);
        }
        Scalar::from_parts(self.clone(), v, BigInt::one())
    }

    pub fn zeta(&self) -> Scalar {
        self.zeta_pow(1)
    }

    /// A primitive n-th root of unity ζ_m^(m/n), when n divides m.
    /// For n = 2 and 1 this is always available.
    pub fn root_of_unity(&self, n: u64, k: i64) -> Result<Scalar, ScalarError> {
        if n == 1 {
            return Ok(self.one());
        }
        if n == 2 {
            return Ok(if k.rem_euclid(2) == 0 { self.one() } else { -self.one() });
        }
        if !self.0.m.is_multiple_of(n) {
            return Err(ScalarError::ConductorTooSmall { needed: n, have: self.0.m });
        }
        Ok(self.zeta_pow(k * (self.0.m / n) as i64))
    }

    /// The generator √d_{i+1} of level i+1 (0-based index `i`).
    pub fn sqrt_generator(&self, i: usize) -> Scalar {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[self.0.phi << i] = BigInt::one();
        Scalar::from_parts(self.clone(), v, BigInt::one())
    }

    fn base_mul_t(&self, a: &[BigInt]) -> Vec<BigInt> {
        let phi = self.0.phi;
        let top = a[phi - 1].clone();
        let mut next = vec![BigInt::zero(); phi];
        for i in (1..phi).rev() {
            next[i] = a[i - 1].clone();
        }
        if !top.is_zero() {
            for i in 0..phi {
                next[i] -= &top * &self.0.cyclo[i];
            }
        }
        next
    }

    fn base_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let phi = self.0.phi;
        if phi == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut conv = vec![BigInt::zero(); 2 * phi - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                conv[i + j] += x * y;
            }
        }
        let (lo, hi) = conv.split_at_mut(phi);
        for (j, c) in hi.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, r) in self.0.reduce[j].iter().enumerate() {
                if !r.is_zero() {
                    lo[k] += c * r;
                }
            }
        }
        conv.truncate(phi);
        conv
    }

    /// Product of two integral coordinate vectors at level `s`.
    pub(crate) fn raw_mul(&self, s: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        if s == 0 {
            return self.base_mul(a, b);
        }
        let h = a.len() / 2;
        let (a0, a1) = a.split_at(h);
        let (b0, b1) = b.split_at(h);
        let a1z = a1.iter().all(|x| x.is_zero());
        let b1z = b1.iter().all(|x| x.is_zero());
        let p00 = self.raw_mul(s - 1, a0, b0);
        let mut out = Vec::with_capacity(2 * h);
        if a1z && b1z {
            out.extend(p00);
            out.extend(std::iter::repeat_n(BigInt::zero(), h));
            return out;
        }
        let mut lo = p00;
        let mut hi = vec![BigInt::zero(); h];
        if !a1z && !b1z {
            let p11 = self.raw_mul(s - 1, a1, b1);
            let t = self.raw_mul(s - 1, &p11, &self.0.sqrts[s - 1]);
            for (x, y) in lo.iter_mut().zip(t) {
                *x += y;
            }
        }
        if !b1z {
            for (x, y) in hi.iter_mut().zip(self.raw_mul(s - 1, a0, b1)) {
                *x += y;
            }
        }
        if !a1z {
            for (x, y) in hi.iter_mut().zip(self.raw_mul(s - 1, a1, b0)) {
                *x += y;
            }
        }
        out.extend(lo);
        out.extend(hi);
        out
    }

    /// Inverse of an integral vector at level `s`, as (numerators, denominator).
    pub(crate) fn raw_inv(&self, s: usize, a: &[BigInt]) -> Result<(Vec<BigInt>, BigInt), ScalarError> {
        if a.iter().all(|x| x.is_zero()) {
            return Err(ScalarError::DivisionByZero);
        }
        if s == 0 {
            return self.base_inv(a);
        }
        let h = a.len() / 2;
        let (a0, a1) = a.split_at(h);
        let p00 = self.raw_mul(s - 1, a0, a0);
        let p11 = self.raw_mul(s - 1, a1, a1);
        let t = self.raw_mul(s - 1, &p11, &self.0.sqrts[s - 1]);
        let norm: Vec<BigInt> = p00.iter().zip(t).map(|(x, y)| x - y).collect();
        if norm.iter().all(|x| x.is_zero()) {
            return Err(ScalarError::ZeroDivisorDetected { level: s });
        }
        let (ni, nd) = self.raw_inv(s - 1, &norm)?;
        let lo = self.raw_mul(s - 1, a0, &ni);
        let hi: Vec<BigInt> = self.raw_mul(s - 1, a1, &ni).into_iter().map(|x| -x).collect();
        let mut out = lo;
        out.extend(hi);
        Ok((out, nd))
    }

    fn base_inv(&self, a: &[BigInt]) -> Result<(Vec<BigInt>, BigInt), ScalarError> {
        let phi = self.0.phi;
        if phi == 1 {
            if a[0].is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            let (n, d) = if a[0].is_negative() { (-BigInt::one(), -a[0].clone()) } else { (BigInt::one(), a[0].clone()) };
            return Ok((vec![n], d));
        }
        // extended Euclid in Q[t]: find u with u·a ≡ 1 mod Φ
        let to_q = |v: &[BigInt]| -> Vec<BigRational> { v.iter().map(|x| BigRational::from_integer(x.clone())).collect() };
        let mut r0 = to_q(&self.0.cyclo);
        let mut r1 = to_q(a);
        trim_q(&mut r1);
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !(r1.len() == 1) {
            if r1.is_empty() {
                return Err(ScalarError::DivisionByZero);
            }
            let (q, r) = divrem_q(&r0, &r1);
            let qs = mul_q(&q, &s1);
            let s2 = sub_q(&s0, &qs);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant c; inverse = s1 / c
        let c = r1[0].clone();
        let mut u: Vec<BigRational> = s1.iter().map(|x| x / &c).collect();
        u.resize(phi, BigRational::zero());
        let mut den = BigInt::one();
        for x in &u {
            den = den.lcm(x.denom());
        }
        let num = u.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        Ok((num, den))
    }
}

fn trim_q(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
}

fn mul_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_q(&mut out);
    out
}

fn sub_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim_q(&mut out);
    out
}

fn divrem_q(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim_q(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            let t = &c * &b[j];
            r[i + j] -= t;
        }
        q[i] = c;
    }
    trim_q(&mut r);
    trim_q(&mut q);
    (q, r)
}

/// An exact element of a [`FieldTower`].
#[derive(Clone)]
pub struct Scalar {
    tower: FieldTower,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Scalar {
    pub(crate) fn from_parts(tower: FieldTower, num: Vec<BigInt>, den: BigInt) -> Scalar {
        Scalar { tower, num, den }
    }

    pub(crate) fn new_normalized(tower: FieldTower, num: Vec<BigInt>, den: BigInt) -> Scalar {
        let mut s = Scalar { tower, num, den };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        assert!(!self.den.is_zero());
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for x in self.num.iter_mut() {
                *x = -x.clone();
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for x in &self.num {
            if g.is_one() {
                break;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if self.num.iter().all(|x| x.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if !g.is_one() {
            for x in self.num.iter_mut() {
                *x = &*x / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Rational coordinates in the documented basis.
    pub fn coords(&self) -> Vec<BigRational> {
        self.num.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|x| x.is_zero())
    }

    /// Some(q) when the element is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|x| x.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(|x| x.is_zero())
    }

    /// Lowest tower level containing the element.
    pub fn level(&self) -> usize {
        let phi = self.tower.phi();
        let mut s = self.tower.depth();
        while s > 0 {
            let half = phi << (s - 1);
            if self.num[half..(phi << s)].iter().any(|x| !x.is_zero()) {
                break;
            }
            s -= 1;
        }
        s
    }

    /// Canonical image in `target`, which must contain this tower.
    pub fn lift_to(&self, target: &FieldTower) -> Result<Scalar, ScalarError> {
        if &self.tower == target {
            return Ok(self.clone());
        }
        if self.is_rational() {
            let mut v = vec![BigInt::zero(); target.degree()];
            v[0] = self.num[0].clone();
            return Ok(Scalar::from_parts(target.clone(), v, self.den.clone()));
        }
        if self.tower.is_prefix_of(target) {
            let mut v = self.num.clone();
            v.resize(target.degree(), BigInt::zero());
            return Ok(Scalar::from_parts(target.clone(), v, self.den.clone()));
        }
        // cyclotomic inclusion Q(ζ_a) ⊂ Q(ζ_b)
        let a = self.tower.conductor();
        let b = target.conductor();
        if self.level() == 0 && b.is_multiple_of(a) {
            let step = (b / a) as i64;
            let mut acc = target.zero();
            for (k, c) in self.num[..self.tower.phi()].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                acc += &target.zeta_pow(step * k as i64).mul_int(c);
            }
            return Ok(acc.div_int(&self.den));
        }
        Err(ScalarError::TowerMismatch)
    }

    fn align(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        if a.tower == b.tower {
            return (a.clone(), b.clone());
        }
        if let Ok(x) = a.lift_to(&b.tower) {
            return (x, b.clone());
        }
        if let Ok(y) = b.lift_to(&a.tower) {
            return (a.clone(), y);
        }
        panic!("tower mismatch: {:?} vs {:?}", a.tower, b.tower);
    }

    pub fn mul_int(&self, k: &BigInt) -> Scalar {
        let num = self.num.iter().map(|x| x * k).collect();
        Scalar::new_normalized(self.tower.clone(), num, self.den.clone())
    }

    pub fn div_int(&self, k: &BigInt) -> Scalar {
        assert!(!k.is_zero());
        Scalar::new_normalized(self.tower.clone(), self.num.clone(), &self.den * k)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Scalar {
        let num = self.num.iter().map(|x| x * q.numer()).collect();
        Scalar::new_normalized(self.tower.clone(), num, &self.den * q.denom())
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let s = self.tower.depth();
        let (n, d) = self.tower.raw_inv(s, &self.num)?;
        let num = n.into_iter().map(|x| x * &self.den).collect();
        Ok(Scalar::new_normalized(self.tower.clone(), num, d))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.tower.one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn powi(&self, e: i64) -> Result<Scalar, ScalarError> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Multiplicative order if it is a root of unity of order dividing `bound`.
    pub fn root_of_unity_order(&self, bound: u64) -> Option<u64> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_one() {
                return Some(k);
            }
            p = &p * self;
        }
        None
    }

    /// Coordinates as "num/den" strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords()
            .iter()
            .map(|q| format!("{}/{}", q.numer(), q.denom()))
            .collect()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.tower == other.tower {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = match (self.lift_to(&other.tower), other.lift_to(&self.tower)) {
            (Ok(a), _) => (a, other.clone()),
            (_, Ok(b)) => (self.clone(), b),
            _ => return false,
        };
        a.den == b.den && a.num == b.num
    }
}
impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.den.hash(state);
        self.num.hash(state);
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phi = self.tower.phi();
        let mut first = true;
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c.clone(), self.den.clone());
            let mut basis = String::new();
            let a = i % phi;
            if a > 0 {
                basis.push_str(&format!("z^{}", a));
            }
            let mask = i / phi;
            for b in 0..self.tower.depth() {
                if mask >> b & 1 == 1 {
                    if !basis.is_empty() {
                        basis.push('*');
                    }
                    basis.push_str(&format!("r{}", b + 1));
                }
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if basis.is_empty() {
                write!(f, "{}", q)?;
            } else if q.is_one() {
                write!(f, "{}", basis)?;
            } else {
                write!(f, "({})*{}", q, basis)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'b> Add<&'b Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'b Scalar) -> Scalar {
        if self.tower != rhs.tower {
            let (a, b) = Scalar::align(self, rhs);
            return &a + &b;
        }
        if self.den == rhs.den {
            let num = self.num.iter().zip(&rhs.num).map(|(x, y)| x + y).collect();
            return Scalar::new_normalized(self.tower.clone(), num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(x, y)| x * &rhs.den + y * &self.den)
            .collect();
        Scalar::new_normalized(self.tower.clone(), num, &self.den * &rhs.den)
    }
}

impl<'b> Sub<&'b Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'b Scalar) -> Scalar {
        let n = -rhs;
        self + &n
    }
}

impl<'b> Mul<&'b Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'b Scalar) -> Scalar {
        if self.tower != rhs.tower {
            let (a, b) = Scalar::align(self, rhs);
            return &a * &b;
        }
        if self.is_rational() {
            let q = &self.num[0];
            let num = rhs.num.iter().map(|x| x * q).collect();
            return Scalar::new_normalized(self.tower.clone(), num, &self.den * &rhs.den);
        }
        if rhs.is_rational() {
            let q = &rhs.num[0];
            let num = self.num.iter().map(|x| x * q).collect();
            return Scalar::new_normalized(self.tower.clone(), num, &self.den * &rhs.den);
        }
        let num = self.tower.raw_mul(self.tower.depth(), &self.num, &rhs.num);
        Scalar::new_normalized(self.tower.clone(), num, &self.den * &rhs.den)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::from_parts(self.tower.clone(), self.num.iter().map(|x| -x).collect(), self.den.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: &'a Scalar) -> Scalar {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                self.$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<'a> AddAssign<&'a Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &'a Scalar) {
        *self = &*self + rhs;
    }
}
impl<'a> SubAssign<&'a Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &'a Scalar) {
        *self = &*self - rhs;
    }
}
impl<'a> MulAssign<&'a Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &'a Scalar) {
        *self = &*self * rhs;
    }
}
