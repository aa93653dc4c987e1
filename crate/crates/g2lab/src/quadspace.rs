//! Nondegenerate quadratic spaces given by the Gram matrix of the polar form
//! β(x,y) = q(x+y) − q(x) − q(y), so that q(x) = β(x,x)/2.

use crate::error::{Error, Result};
use crate::scalars::{kernel_basis, FieldTower, Matrix, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSpace {
    gram: Matrix,
}

/// Outcome of [`QuadSpace::isometry_class`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Similitude {
    pub factor: Scalar,
    pub det: Scalar,
    /// det g = μ^{⌊n/2⌋}; for isometries this is membership in SO(V).
    pub proper: bool,
}

impl QuadSpace {
    pub fn new(gram: Matrix) -> Result<QuadSpace> {
        if !gram.is_square() {
            return Err(Error::NotSymmetric);
        }
        if gram.transpose() != gram {
            return Err(Error::NotSymmetric);
        }
        if gram.rows() > 0 && gram.det()?.is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(QuadSpace { gram })
    }

    /// H(k^r): r blocks [[0,1],[1,0]], so q(x + φ) = φ(x).
    pub fn hyperbolic(tower: &FieldTower, r: usize) -> QuadSpace {
        let mut g = Matrix::zeros(tower, 2 * r, 2 * r);
        for i in 0..r {
            g.set(2 * i, 2 * i + 1, tower.one());
            g.set(2 * i + 1, 2 * i, tower.one());
        }
        QuadSpace { gram: g }
    }

    /// The line with q(x) = c·x².
    pub fn line(c: &Scalar) -> Result<QuadSpace> {
        let t = c.tower().clone();
        QuadSpace::new(Matrix::diagonal(&t, &[c.mul_int(&2.into())]))
    }

    /// E₇ = H(k³) ⊥ ⟨1⟩ in the order e₁,f₁,e₂,f₂,e₃,f₃,ℓ.
    pub fn e7(tower: &FieldTower) -> QuadSpace {
        QuadSpace::hyperbolic(tower, 3).orth_sum(&QuadSpace::line(&tower.one()).unwrap()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn tower(&self) -> &FieldTower {
        self.gram.tower()
    }

    pub fn lift_to(&self, tower: &FieldTower) -> Result<QuadSpace> {
        Ok(QuadSpace { gram: self.gram.lift_to(tower)? })
    }

    /// Same Gram matrix up to the scalar factor c.
    pub fn scaled(&self, c: &Scalar) -> Result<QuadSpace> {
        QuadSpace::new(self.gram.scale(c))
    }

    pub fn orth_sum(&self, other: &QuadSpace) -> Result<QuadSpace> {
        if self.tower() != other.tower() {
            return Err(Error::TowerMismatch);
        }
        Ok(QuadSpace { gram: self.gram.direct_sum(&other.gram) })
    }

    pub fn beta(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let gy = self.gram.mul_vec(y);
        dot(x, &gy, self.tower())
    }

    pub fn q(&self, x: &[Scalar]) -> Scalar {
        self.beta(x, x).div_int(&2.into())
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let t = self.tower();
        (0..self.dim()).map(|j| if i == j { t.one() } else { t.zero() }).collect()
    }

    /// Factor μ with β(gx,gy) = μβ(x,y), plus the properness flag.
    pub fn isometry_class(&self, g: &Matrix) -> Result<Similitude> {
        let n = self.dim();
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.rows() });
        }
        let t = self.tower();
        if n == 0 {
            return Ok(Similitude { factor: t.one(), det: t.one(), proper: true });
        }
        let pulled = g.transpose().mul(&self.gram).mul(g);
        let (r, c) = (0..n * n)
            .map(|k| (k / n, k % n))
            .find(|&(r, c)| !self.gram.get(r, c).is_zero())
            .unwrap();
        let mu = pulled.get(r, c).try_div(self.gram.get(r, c))?;
        if mu.is_zero() || pulled != self.gram.scale(&mu) {
            return Err(Error::NotSimilitude);
        }
        let det = g.det()?;
        let proper = det == mu.pow((n / 2) as u64);
        Ok(Similitude { factor: mu, det, proper })
    }

    /// True iff g ∈ SO(V).
    pub fn is_special_isometry(&self, g: &Matrix) -> bool {
        matches!(self.isometry_class(g), Ok(s) if s.factor.is_one() && s.proper)
    }

    /// r_v : x ↦ x − β(x,v)/q(v) · v.
    pub fn reflection(&self, v: &[Scalar]) -> Result<Matrix> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        let qv = self.q(v);
        if qv.is_zero() {
            return Err(Error::IsotropicVector);
        }
        let gv = self.gram.mul_vec(v);
        let inv = qv.inv()?;
        let t = self.tower();
        let mut r = Matrix::identity(t, n);
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            let vi = &v[i] * &inv;
            for j in 0..n {
                let x = r.get(i, j) - &(&vi * &gv[j]);
                r.set(i, j, x);
            }
        }
        Ok(r)
    }

    /// Columns b₁..bₙ with β(b_i,b_j) = 0 for i ≠ j, found by congruence
    /// without square roots.
    pub fn orthogonal_basis(&self) -> Result<Matrix> {
        let n = self.dim();
        let t = self.tower().clone();
        let mut rest: Vec<Vector> = (0..n).map(|i| self.basis_vector(i)).collect();
        let mut out: Vec<Vector> = Vec::with_capacity(n);
        while !rest.is_empty() {
            let pick = rest.iter().position(|v| !self.q(v).is_zero());
            let v = match pick {
                Some(k) => rest.remove(k),
                None => {
                    let mut found = None;
                    'outer: for a in 0..rest.len() {
                        for b in a + 1..rest.len() {
                            if !self.beta(&rest[a], &rest[b]).is_zero() {
                                found = Some((a, b));
                                break 'outer;
                            }
                        }
                    }
                    let (a, b) = found.ok_or(Error::Degenerate)?;
                    let s = add(&rest[a], &rest[b]);
                    rest.remove(a);
                    s
                }
            };
            let bvv = self.beta(&v, &v);
            let inv = bvv.inv()?;
            for w in rest.iter_mut() {
                let c = &self.beta(w, &v) * &inv;
                if !c.is_zero() {
                    *w = sub(w, &scale(&v, &c));
                }
            }
            out.push(v);
        }
        Ok(Matrix::from_columns(&t, &out))
    }
}

/// A subspace given by a basis, with cached isotropy data.
#[derive(Clone, Debug)]
pub struct SubspaceFlag {
    pub basis: Vec<Vector>,
    pub totally_isotropic: bool,
    pub nondegenerate: bool,
}

impl SubspaceFlag {
    pub fn new(space: &QuadSpace, basis: Vec<Vector>) -> Result<SubspaceFlag> {
        let t = space.tower();
        let k = basis.len();
        if k > 0 && Matrix::from_columns(t, &basis).rank()? != k {
            return Err(Error::Degenerate);
        }
        let mut g = Matrix::zeros(t, k, k);
        for i in 0..k {
            for j in 0..k {
                g.set(i, j, space.beta(&basis[i], &basis[j]));
            }
        }
        let totally_isotropic = g.is_zero();
        let nondegenerate = k == 0 || !g.det()?.is_zero();
        Ok(SubspaceFlag { basis, totally_isotropic, nondegenerate })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis of the orthogonal {x : β(x, b) = 0 for every basis vector b}.
    pub fn orthogonal(&self, space: &QuadSpace) -> Result<Vec<Vector>> {
        let t = space.tower();
        if self.basis.is_empty() {
            return Ok((0..space.dim()).map(|i| space.basis_vector(i)).collect());
        }
        let rows: Vec<Vector> = self.basis.iter().map(|b| space.gram().mul_vec(b)).collect();
        Ok(kernel_basis(&Matrix::from_rows(t, rows))?)
    }

    /// A totally isotropic subspace equal to its own orthogonal is maximal.
    pub fn is_lagrangian(&self, space: &QuadSpace) -> Result<bool> {
        Ok(self.totally_isotropic && self.orthogonal(space)?.len() == self.dim())
    }
}

pub fn dot(x: &[Scalar], y: &[Scalar], t: &FieldTower) -> Scalar {
    let mut acc = t.zero();
    for (a, b) in x.iter().zip(y) {
        if !a.is_zero() && !b.is_zero() {
            acc += &(a * b);
        }
    }
    acc
}

pub fn add(x: &[Scalar], y: &[Scalar]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub(x: &[Scalar], y: &[Scalar]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale(x: &[Scalar], c: &Scalar) -> Vector {
    x.iter().map(|a| a * c).collect()
}

pub fn is_zero_vector(x: &[Scalar]) -> bool {
    x.iter().all(|a| a.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldTower {
        FieldTower::rationals()
    }

    fn ints(t: &FieldTower, v: &[i64]) -> Vector {
        v.iter().map(|&x| t.from_int(x)).collect()
    }

    #[test]
    fn hyperbolic_values() {
        let t = q();
        assert_eq!(QuadSpace::hyperbolic(&t, 0).dim(), 0);
        let h = QuadSpace::hyperbolic(&t, 1);
        assert!(h.q(&ints(&t, &[1, 0])).is_zero());
        assert!(h.beta(&ints(&t, &[1, 0]), &ints(&t, &[0, 1])).is_one());
        assert_eq!(h.q(&ints(&t, &[3, 5])), t.from_int(15));
        let e7 = QuadSpace::e7(&t);
        assert_eq!(e7.dim(), 7);
        assert!(e7.q(&e7.basis_vector(6)).is_one());
    }

    #[test]
    fn orth_sum_dims() {
        let t = q();
        let a = QuadSpace::hyperbolic(&t, 1).orth_sum(&QuadSpace::line(&t.one()).unwrap()).unwrap();
        let b = QuadSpace::hyperbolic(&t, 2);
        let s = a.orth_sum(&b).unwrap();
        assert_eq!(s.dim(), 7);
        assert_eq!(a.orth_sum(&QuadSpace::hyperbolic(&t, 0)).unwrap(), a);
        let x = ints(&t, &[1, 2, 3]);
        let mut y = x.clone();
        y.extend(ints(&t, &[0, 0, 0, 0]));
        assert_eq!(s.q(&y), a.q(&x));
    }

    #[test]
    fn isometry_examples() {
        let t = q();
        let h = QuadSpace::hyperbolic(&t, 1);
        let id = Matrix::identity(&t, 2);
        let s = h.isometry_class(&id).unwrap();
        assert!(s.factor.is_one() && s.proper);
        let s = h.isometry_class(&id.neg()).unwrap();
        assert!(s.factor.is_one() && s.det.is_one() && s.proper);
        let d = Matrix::diagonal(&t, &[t.from_int(2), t.from_ratio(1, 2)]);
        assert!(h.is_special_isometry(&d));
        let bad = Matrix::diagonal(&t, &[t.from_int(2), t.one()]);
        assert!(h.isometry_class(&bad).is_ok());
        let worse = Matrix::from_int_rows(&t, &[&[1, 1], &[0, 1]]);
        assert!(matches!(h.isometry_class(&worse), Err(Error::NotSimilitude)));
    }

    #[test]
    fn reflection_examples() {
        let t = q();
        let e7 = QuadSpace::e7(&t);
        let v = ints(&t, &[1, 1, 0, 0, 0, 0, 0]);
        let r = e7.reflection(&v).unwrap();
        assert_eq!(r.mul_vec(&v), scale(&v, &t.from_int(-1)));
        let w = ints(&t, &[1, -1, 0, 0, 2, 0, 0]);
        assert!(e7.beta(&v, &w).is_zero());
        assert_eq!(r.mul_vec(&w), w);
        let s = e7.isometry_class(&r).unwrap();
        assert!(s.factor.is_one() && !s.proper);
        assert!(matches!(e7.reflection(&e7.basis_vector(0)), Err(Error::IsotropicVector)));
    }

    #[test]
    fn hyperbolic_lagrangians() {
        let t = q();
        for r in 0..=3 {
            let h = QuadSpace::hyperbolic(&t, r);
            let basis: Vec<Vector> = (0..r).map(|i| h.basis_vector(2 * i)).collect();
            let f = SubspaceFlag::new(&h, basis).unwrap();
            assert!(f.totally_isotropic);
            assert_eq!(f.dim(), r);
            assert!(f.is_lagrangian(&h).unwrap());
        }
        let h = QuadSpace::hyperbolic(&t, 2);
        let f = SubspaceFlag::new(&h, vec![h.basis_vector(0)]).unwrap();
        assert!(!f.is_lagrangian(&h).unwrap());
        let g = SubspaceFlag::new(&h, vec![h.basis_vector(0), h.basis_vector(1)]).unwrap();
        assert!(g.nondegenerate && !g.totally_isotropic);
    }

    #[test]
    fn orthogonal_basis_diagonalizes() {
        let t = q();
        let e7 = QuadSpace::e7(&t);
        let b = e7.orthogonal_basis().unwrap();
        let d = b.transpose().mul(e7.gram()).mul(&b);
        for i in 0..7 {
            assert!(!d.get(i, i).is_zero());
            for j in 0..7 {
                if i != j {
                    assert!(d.get(i, j).is_zero());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn products_of_two_reflections_are_special(
            v in prop::collection::vec(-3i64..=3, 7),
            w in prop::collection::vec(-3i64..=3, 7),
        ) {
            let t = q();
            let e7 = QuadSpace::e7(&t);
            let v = ints(&t, &v);
            let w = ints(&t, &w);
            prop_assume!(!e7.q(&v).is_zero() && !e7.q(&w).is_zero());
            let g = e7.reflection(&v).unwrap().mul(&e7.reflection(&w).unwrap());
            prop_assert!(e7.is_special_isometry(&g));
            let r = e7.reflection(&v).unwrap();
            prop_assert!(r.mul(&r).is_identity());
            prop_assert_eq!(r.det().unwrap(), t.from_int(-1));
        }

        #[test]
        fn polar_form_identity(
            x in prop::collection::vec(-5i64..=5, 7),
            y in prop::collection::vec(-5i64..=5, 7),
            l in -4i64..=4,
        ) {
            let t = q();
            let e7 = QuadSpace::e7(&t);
            let x = ints(&t, &x);
            let y = ints(&t, &y);
            let s = add(&x, &y);
            prop_assert_eq!(e7.beta(&x, &y), &(&e7.q(&s) - &e7.q(&x)) - &e7.q(&y));
            let lam = t.from_int(l);
            prop_assert_eq!(e7.q(&scale(&x, &lam)), &(&lam * &lam) * &e7.q(&x));
        }
    }
}
