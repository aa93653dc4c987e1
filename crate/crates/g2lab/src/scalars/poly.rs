//! Dense univariate polynomials over a tower.

use std::fmt;

use super::{FieldTower, Scalar, ScalarError};

/// Coefficients low to high; never has a zero leading coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    tower: FieldTower,
    coeffs: Vec<Scalar>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({})t^{}", c, i))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly {
    pub fn new(tower: &FieldTower, coeffs: Vec<Scalar>) -> Poly {
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.lift_to(tower).expect("coefficient outside tower"))
            .collect();
        let mut p = Poly { tower: tower.clone(), coeffs };
        p.trim();
        p
    }

    pub fn zero(tower: &FieldTower) -> Poly {
        Poly { tower: tower.clone(), coeffs: vec![] }
    }

    pub fn one(tower: &FieldTower) -> Poly {
        Poly::constant(tower.one())
    }

    pub fn constant(c: Scalar) -> Poly {
        let t = c.tower().clone();
        Poly::new(&t, vec![c])
    }

    /// The polynomial t.
    pub fn t(tower: &FieldTower) -> Poly {
        Poly::new(tower, vec![tower.zero(), tower.one()])
    }

    /// t − r.
    pub fn linear(r: &Scalar) -> Poly {
        let t = r.tower().clone();
        Poly::new(&t, vec![-r, t.one()])
    }

    pub fn from_ints(tower: &FieldTower, c: &[i64]) -> Poly {
        Poly::new(tower, c.iter().map(|&x| tower.from_int(x)).collect())
    }

    /// ∏ (t − r_i).
    pub fn from_roots(tower: &FieldTower, roots: &[Scalar]) -> Poly {
        roots.iter().fold(Poly::one(tower), |acc, r| acc.mul(&Poly::linear(r)))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of t^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.tower.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn lift_to(&self, tower: &FieldTower) -> Result<Poly, ScalarError> {
        let coeffs = self.coeffs.iter().map(|c| c.lift_to(tower)).collect::<Result<_, _>>()?;
        Ok(Poly { tower: tower.clone(), coeffs })
    }

    pub fn monic(&self) -> Result<Poly, ScalarError> {
        let l = self.leading().ok_or(ScalarError::ZeroPolynomial)?.inv()?;
        Ok(self.scale(&l))
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(&self.tower, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(&self.tower, (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(&self.tower, (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.tower);
        }
        let mut out = vec![self.tower.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += &(a * b);
            }
        }
        Poly::new(&self.tower, out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(&self.tower), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.tower.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.tower);
        }
        Poly::new(
            &self.tower,
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.mul_int(&(i as i64).into())).collect(),
        )
    }

    /// Euclidean division.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly), ScalarError> {
        let dd = d.degree().ok_or(ScalarError::ZeroPolynomial)?;
        let inv_lead = d.leading().unwrap().inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(&self.tower), self.clone()));
        }
        let mut q = vec![self.tower.zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &inv_lead;
            if c.is_zero() {
                continue;
            }
            for j in 0..=dd {
                let t = &c * &d.coeffs[j];
                r[i + j] -= &t;
            }
            q[i] = c;
        }
        Ok((Poly::new(&self.tower, q), Poly::new(&self.tower, r)))
    }

    /// Quotient, failing unless the division is exact.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d).ok()?;
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Result<Poly, ScalarError> {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        a.monic()
    }

    /// Squarefree factorization (Yun): pairs (f_i, i) with self = c·∏ f_i^i.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Poly, usize)>, ScalarError> {
        let f = self.monic()?;
        let mut out = Vec::new();
        if f.degree() == Some(0) {
            return Ok(out);
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp)?;
        let mut b = f.exact_div(&a0).unwrap();
        let mut c = fp.exact_div(&a0).unwrap();
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d)?;
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).unwrap();
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.exact_div(&a).unwrap();
            d = c.sub(&b.derivative());
            i += 1;
        }
        Ok(out)
    }

    /// t^n · p(1/t) for n = deg p.
    pub fn reversed(&self) -> Poly {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(&self.tower, c)
    }
}

/// Resultant by the Euclidean algorithm over the tower field.
pub fn resultant(a: &Poly, b: &Poly) -> Result<Scalar, ScalarError> {
    let t = a.tower().clone();
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut acc = t.one();
    loop {
        let (da, db) = match (a.degree(), b.degree()) {
            (None, _) | (_, None) => return Ok(t.zero()),
            (Some(x), Some(y)) => (x, y),
        };
        if db == 0 {
            return Ok(&acc * &b.leading().unwrap().pow(da as u64));
        }
        let (_, r) = a.divrem(&b)?;
        let dr = match r.degree() {
            None => return Ok(t.zero()),
            Some(d) => d,
        };
        // res(a,b) = (-1)^(da·db) · lc(b)^(da - dr) · res(b, r)
        if da % 2 == 1 && db % 2 == 1 {
            acc = -acc;
        }
        acc = &acc * &b.leading().unwrap().pow((da - dr) as u64);
        a = b;
        b = r;
    }
}
