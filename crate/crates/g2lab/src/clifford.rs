//! Clifford algebras C(V) for dim V ≤ 8 over an orthogonal basis obtained by
//! congruence, so b_i b_j = −b_j b_i for i ≠ j and b_i² = d_i.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadspace::{QuadSpace, Vector};
use crate::scalars::{adjoin_sqrt, try_sqrt, FieldTower, Matrix, Scalar};

pub const MAX_DIM: usize = 8;

struct AlgebraData {
    space: QuadSpace,
    basis: Matrix,
    basis_inv: Matrix,
    diag: Vec<Scalar>,
    // dprod[S] = ∏_{i ∈ S} d_i
    dprod: Vec<Scalar>,
}

#[derive(Clone)]
pub struct CliffordAlgebra(Arc<AlgebraData>);

impl fmt::Debug for CliffordAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C(V) dim {} over {:?}, d = {:?}", self.dim(), self.tower(), self.0.diag)
    }
}

impl PartialEq for CliffordAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.space == other.0.space && self.0.basis == other.0.basis)
    }
}
impl Eq for CliffordAlgebra {}

/// Sign of b_S · b_T after sorting into b_{S△T} (before the d_i factors).
pub fn monomial_sign(s: u32, t: u32) -> bool {
    let mut swaps = 0u32;
    let mut rest = t;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (s >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    swaps % 2 == 1
}

impl CliffordAlgebra {
    pub fn new(space: &QuadSpace) -> Result<CliffordAlgebra> {
        let basis = space.orthogonal_basis()?;
        CliffordAlgebra::from_orthogonal_basis(space, basis)
    }

    /// Uses the columns of `basis` as b₁..bₙ; they must be pairwise orthogonal.
    pub fn from_orthogonal_basis(space: &QuadSpace, basis: Matrix) -> Result<CliffordAlgebra> {
        let n = space.dim();
        if n > MAX_DIM {
            return Err(Error::DimensionMismatch { expected: MAX_DIM, got: n });
        }
        if basis.rows() != n || basis.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: basis.cols() });
        }
        let d = basis.transpose().mul(space.gram()).mul(&basis);
        let t = space.tower().clone();
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && !d.get(i, j).is_zero() {
                    return Err(Error::Degenerate);
                }
            }
            let di = d.get(i, i).div_int(&2.into());
            if di.is_zero() {
                return Err(Error::Degenerate);
            }
            diag.push(di);
        }
        let basis_inv = basis.inverse()?;
        let mut dprod = vec![t.one(); 1 << n];
        for s in 1..(1usize << n) {
            let i = s.trailing_zeros() as usize;
            dprod[s] = &dprod[s & (s - 1)] * &diag[i];
        }
        Ok(CliffordAlgebra(Arc::new(AlgebraData { space: space.clone(), basis, basis_inv, diag, dprod })))
    }

    pub fn dim(&self) -> usize {
        self.0.diag.len()
    }

    pub fn space(&self) -> &QuadSpace {
        &self.0.space
    }

    pub fn tower(&self) -> &FieldTower {
        self.0.space.tower()
    }

    /// Columns are the orthogonal basis vectors in V coordinates.
    pub fn basis(&self) -> &Matrix {
        &self.0.basis
    }

    pub fn diag(&self) -> &[Scalar] {
        &self.0.diag
    }

    pub fn lift_to(&self, tower: &FieldTower) -> Result<CliffordAlgebra> {
        if tower == self.tower() {
            return Ok(self.clone());
        }
        CliffordAlgebra::from_orthogonal_basis(&self.0.space.lift_to(tower)?, self.0.basis.lift_to(tower)?)
    }

    pub fn zero(&self) -> CliffordElement {
        CliffordElement { alg: self.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(&self, c: &Scalar) -> CliffordElement {
        self.monomial(0, c)
    }

    pub fn one(&self) -> CliffordElement {
        self.scalar(&self.tower().one())
    }

    /// c · b_S.
    pub fn monomial(&self, mask: u32, c: &Scalar) -> CliffordElement {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mask, c.lift_to(self.tower()).expect("coefficient outside tower"));
        }
        CliffordElement { alg: self.clone(), terms }
    }

    pub fn generator(&self, i: usize) -> CliffordElement {
        self.monomial(1 << i, &self.tower().one())
    }

    /// Coordinates of v ∈ V (standard basis) in the orthogonal basis.
    pub fn to_orthogonal_coords(&self, v: &[Scalar]) -> Vector {
        self.0.basis_inv.mul_vec(v)
    }

    pub fn from_orthogonal_coords(&self, c: &[Scalar]) -> Vector {
        self.0.basis.mul_vec(c)
    }

    /// The image of v ∈ V (standard coordinates).
    pub fn vector(&self, v: &[Scalar]) -> CliffordElement {
        self.vector_orthogonal(&self.to_orthogonal_coords(v))
    }

    /// The element Σ c_i b_i.
    pub fn vector_orthogonal(&self, c: &[Scalar]) -> CliffordElement {
        let mut terms = BTreeMap::new();
        for (i, x) in c.iter().enumerate() {
            if !x.is_zero() {
                terms.insert(1u32 << i, x.lift_to(self.tower()).expect("coefficient outside tower"));
            }
        }
        CliffordElement { alg: self.clone(), terms }
    }

    /// q in orthogonal coordinates: Σ d_i c_i².
    pub fn q_orthogonal(&self, c: &[Scalar]) -> Scalar {
        let mut acc = self.tower().zero();
        for (x, d) in c.iter().zip(&self.0.diag) {
            if !x.is_zero() {
                acc += &(&(x * x) * d);
            }
        }
        acc
    }

    fn beta_orthogonal(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let mut acc = self.tower().zero();
        for ((a, b), d) in x.iter().zip(y).zip(&self.0.diag) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(&(a * b) * d);
            }
        }
        acc.mul_int(&2.into())
    }

    /// b_S · b_T = coefficient · b_{S△T}.
    pub fn monomial_product(&self, s: u32, t: u32) -> Scalar {
        let c = self.0.dprod[(s & t) as usize].clone();
        if monomial_sign(s, t) {
            -c
        } else {
            c
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    alg: CliffordAlgebra,
    terms: BTreeMap<u32, Scalar>,
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({})e{:b}", c, m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl CliffordElement {
    pub fn algebra(&self) -> &CliffordAlgebra {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<u32, Scalar> {
        &self.terms
    }

    pub fn from_terms(alg: &CliffordAlgebra, terms: impl IntoIterator<Item = (u32, Scalar)>) -> CliffordElement {
        let mut out = alg.zero();
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    fn add_term(&mut self, mask: u32, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let c = c.lift_to(self.alg.tower()).expect("coefficient outside tower");
        match self.terms.get_mut(&mask) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&mask);
                }
            }
            None => {
                self.terms.insert(mask, c);
            }
        }
    }

    pub fn coeff(&self, mask: u32) -> Scalar {
        self.terms.get(&mask).cloned().unwrap_or_else(|| self.alg.tower().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(c) iff the element is c·1.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(self.alg.tower().zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// 0 or 1 for homogeneous elements (zero counts as even).
    pub fn parity(&self) -> Option<u32> {
        let mut p = None;
        for m in self.terms.keys() {
            let q = m.count_ones() % 2;
            match p {
                None => p = Some(q),
                Some(x) if x != q => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(0))
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(0)
    }

    /// Standard coordinates if the element lies in V.
    pub fn as_vector(&self) -> Option<Vector> {
        let c = self.as_orthogonal_vector()?;
        Some(self.alg.from_orthogonal_coords(&c))
    }

    pub fn as_orthogonal_vector(&self) -> Option<Vector> {
        if self.terms.keys().any(|m| m.count_ones() != 1) {
            return None;
        }
        Some((0..self.alg.dim()).map(|i| self.coeff(1 << i)).collect())
    }

    pub fn lift_to(&self, alg: &CliffordAlgebra) -> Result<CliffordElement> {
        if alg.dim() != self.alg.dim() {
            return Err(Error::AlgebraMismatch);
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(*m, c.lift_to(alg.tower())?);
        }
        Ok(CliffordElement { alg: alg.clone(), terms })
    }

    pub fn try_mul(&self, other: &CliffordElement) -> Result<CliffordElement> {
        if self.alg != other.alg {
            return Err(Error::AlgebraMismatch);
        }
        let mut acc: BTreeMap<u32, Scalar> = BTreeMap::new();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                let c = &(a * b) * &self.alg.0.dprod[(s & t) as usize];
                let c = if monomial_sign(*s, *t) { -c } else { c };
                match acc.get_mut(&(s ^ t)) {
                    Some(x) => *x += &c,
                    None => {
                        acc.insert(s ^ t, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(CliffordElement { alg: self.alg.clone(), terms: acc })
    }

    pub fn try_add(&self, other: &CliffordElement) -> Result<CliffordElement> {
        if self.alg != other.alg {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> CliffordElement {
        let terms = self.terms.iter().map(|(m, x)| (*m, x * c)).filter(|(_, x)| !x.is_zero()).collect();
        CliffordElement { alg: self.alg.clone(), terms }
    }

    /// The anti-involution reversing monomials.
    pub fn transpose(&self) -> CliffordElement {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, if (m.count_ones() / 2) % 2 == 1 { -c } else { c.clone() }))
            .collect();
        CliffordElement { alg: self.alg.clone(), terms }
    }

    /// Grade involution: (−1)^{|S|} on b_S.
    pub fn grade_involution(&self) -> CliffordElement {
        let terms = self.terms.iter().map(|(m, c)| (*m, if m.count_ones() % 2 == 1 { -c } else { c.clone() })).collect();
        CliffordElement { alg: self.alg.clone(), terms }
    }

    /// ν(γ) = γγᵗ, which must be a scalar.
    pub fn nu(&self) -> Result<Scalar> {
        self.try_mul(&self.transpose())?.as_scalar().ok_or(Error::NotScalar)
    }

    /// Inverse γᵗ/ν for elements with γγᵗ = γᵗγ = ν ∈ k^×.
    pub fn clifford_inverse(&self) -> Result<CliffordElement> {
        let tr = self.transpose();
        let left = self.try_mul(&tr)?.as_scalar();
        let right = tr.try_mul(self)?.as_scalar();
        match (left, right) {
            (Some(a), Some(b)) if a == b => {
                if a.is_zero() {
                    return Err(Error::NotInvertible);
                }
                Ok(tr.scale(&a.inv()?))
            }
            _ => Err(Error::DoesNotNormalizeV),
        }
    }

    /// Matrix of v ↦ (−1)^p γvγ⁻¹ on V (standard coordinates).
    pub fn pi_action(&self) -> Result<Matrix> {
        let p = self.parity().ok_or(Error::NotHomogeneous)?;
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv = self.clifford_inverse()?;
        let n = self.alg.dim();
        let t = self.alg.tower().clone();
        let mut cols = Vec::with_capacity(n);
        for i in 0..n {
            let y = self.try_mul(&self.alg.generator(i))?.try_mul(&inv)?;
            let y = if p == 1 { y.scale(&t.from_int(-1)) } else { y };
            cols.push(y.as_orthogonal_vector().ok_or(Error::DoesNotNormalizeV)?);
        }
        let mb = Matrix::from_columns(&t, &cols);
        Ok(self.alg.0.basis.mul(&mb).mul(&self.alg.0.basis_inv))
    }

    pub fn is_spin(&self) -> bool {
        self.is_even() && self.pi_action().is_ok() && matches!(self.nu(), Ok(x) if x.is_one())
    }
}

impl std::ops::Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_mul(rhs).expect("Clifford elements from different algebras")
    }
}

impl std::ops::Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_add(rhs).expect("Clifford elements from different algebras")
    }
}

impl std::ops::Neg for &CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        let terms = self.terms.iter().map(|(m, c)| (*m, -c)).collect();
        CliffordElement { alg: self.alg.clone(), terms }
    }
}

/// A spin lift together with the square root adjoined for normalization.
#[derive(Clone, Debug)]
pub struct SpinLift {
    pub gamma: CliffordElement,
    /// Reflection vectors v₁..v_k (orthogonal coordinates) with g = r_{v₁}⋯r_{v_k}.
    pub reflections: Vec<Vector>,
    /// ∏ q(v_i), whose square root normalizes the product.
    pub norm: Scalar,
    /// The radicand adjoined to the tower, if any.
    pub extension: Option<Scalar>,
}

/// Writes g ∈ O(V) as r_{v₁}⋯r_{v_k}, fixing one orthogonal basis vector at
/// a time (k ≤ 2 dim V).
pub fn reflection_factorization(alg: &CliffordAlgebra, g: &Matrix) -> Result<Vec<Vector>> {
    let n = alg.dim();
    let t = alg.tower().clone();
    let mut h = alg.0.basis_inv.mul(g).mul(&alg.0.basis);
    let mut out: Vec<Vector> = Vec::new();
    let reflect = |h: &mut Matrix, w: &Vector| -> Result<()> {
        let qw = alg.q_orthogonal(w);
        let inv = qw.inv()?;
        for c in 0..n {
            let col = h.column(c);
            let k = &alg.beta_orthogonal(&col, w) * &inv;
            if k.is_zero() {
                continue;
            }
            for r in 0..n {
                let x = h.get(r, c) - &(&k * &w[r]);
                h.set(r, c, x);
            }
        }
        Ok(())
    };
    for i in 0..n {
        let x: Vector = (0..n).map(|j| if i == j { t.one() } else { t.zero() }).collect();
        let y = h.column(i);
        if y == x {
            continue;
        }
        let w: Vector = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        if !alg.q_orthogonal(&w).is_zero() {
            reflect(&mut h, &w)?;
            out.push(w);
        } else {
            // r_u sends y to −x, then r_x sends −x to x
            let u: Vector = y.iter().zip(&x).map(|(a, b)| a + b).collect();
            reflect(&mut h, &u)?;
            reflect(&mut h, &x)?;
            out.push(u);
            out.push(x);
        }
    }
    if !h.is_identity() {
        return Err(Error::NotSimilitude);
    }
    Ok(out)
}

impl SpinLift {
    /// The lift after normalization lives over this algebra.
    pub fn algebra(&self) -> &CliffordAlgebra {
        self.gamma.algebra()
    }
}

/// An element γ ∈ Spin(V) with π(γ) = g, for g ∈ SO(V).
pub fn spin_lift(alg: &CliffordAlgebra, g: &Matrix) -> Result<SpinLift> {
    match alg.space().isometry_class(g) {
        Ok(s) if s.factor.is_one() && s.proper => {}
        _ => return Err(Error::NotProperIsometry),
    }
    let g = g.lift_to(alg.tower())?;
    let refl = reflection_factorization(alg, &g)?;
    let mut gamma0 = alg.one();
    let mut norm = alg.tower().one();
    for v in &refl {
        gamma0 = &gamma0 * &alg.vector_orthogonal(v);
        norm = &norm * &alg.q_orthogonal(v);
    }
    let (gamma, extension) = match try_sqrt(&norm) {
        Some(s) => (gamma0.scale(&s.inv()?), None),
        None => {
            let (t2, s) = adjoin_sqrt(alg.tower(), &norm)?;
            let a2 = alg.lift_to(&t2)?;
            (gamma0.lift_to(&a2)?.scale(&s.inv()?), Some(norm.clone()))
        }
    };
    Ok(SpinLift { gamma, reflections: refl, norm, extension })
}
