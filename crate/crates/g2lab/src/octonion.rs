//! Split octonions in the Zorn vector-matrix model, the isomorphism
//! ℓ_C : C(C) → End(C ⊕ C), the spin representation of GSpin(P) on C, and
//! G₂ automorphism tests.
//!
//! Coordinates of (a, u, v, b) are `[a, u₁, u₂, u₃, v₁, v₂, v₃, b]` and
//! q(a,u,v,b) = ab − u·v. The pure octonions P = e^⊥ carry the basis
//! u₁, v₁, u₂, v₂, u₃, v₃, (1,0,0,−1), whose Gram matrix is −1 times the one
//! of E₇, so O(P) and O(E₇) are the same matrix group.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::clifford::{CliffordAlgebra, CliffordElement};
use crate::error::{Error, Result};
use crate::quadspace::{is_zero_vector, QuadSpace, Vector};
use crate::scalars::{fp, kernel_basis, FieldTower, Matrix, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Octonion {
    coords: Vec<Scalar>,
}

impl Octonion {
    pub fn new(a: Scalar, u: [Scalar; 3], v: [Scalar; 3], b: Scalar) -> Octonion {
        let mut c = vec![a];
        c.extend(u);
        c.extend(v);
        c.push(b);
        Octonion::from_coords(c)
    }

    pub fn from_coords(coords: Vec<Scalar>) -> Octonion {
        assert_eq!(coords.len(), 8, "an octonion has 8 coordinates");
        Octonion { coords }
    }

    pub fn unit(t: &FieldTower) -> Octonion {
        let mut c = vec![t.zero(); 8];
        c[0] = t.one();
        c[7] = t.one();
        Octonion { coords: c }
    }

    pub fn basis(t: &FieldTower, i: usize) -> Octonion {
        Octonion { coords: (0..8).map(|j| if i == j { t.one() } else { t.zero() }).collect() }
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.coords
    }

    pub fn a(&self) -> &Scalar {
        &self.coords[0]
    }

    pub fn u(&self) -> &[Scalar] {
        &self.coords[1..4]
    }

    pub fn v(&self) -> &[Scalar] {
        &self.coords[4..7]
    }

    pub fn b(&self) -> &Scalar {
        &self.coords[7]
    }
}

fn dot3(x: &[Scalar], y: &[Scalar]) -> Scalar {
    &(&(&x[0] * &y[0]) + &(&x[1] * &y[1])) + &(&x[2] * &y[2])
}

fn cross3(x: &[Scalar], y: &[Scalar]) -> [Scalar; 3] {
    [
        &(&x[1] * &y[2]) - &(&x[2] * &y[1]),
        &(&x[2] * &y[0]) - &(&x[0] * &y[2]),
        &(&x[0] * &y[1]) - &(&x[1] * &y[0]),
    ]
}

type Sparse = Vec<(usize, usize, BigRational)>;

struct OctData {
    flipped: bool,
    c_space: QuadSpace,
    p_space: QuadSpace,
    pure_basis: Matrix,
    pe_basis: Matrix,
    pe_basis_inv: Matrix,
    cp: CliffordAlgebra,
    cc: CliffordAlgebra,
    monomials: Vec<Matrix>,
    sparse: Vec<Sparse>,
    // b_S · b_S as a rational, for the trace inversion of ℓ_C
    squares: Vec<BigRational>,
}

/// The split octonion algebra over ℚ together with its Clifford data.
/// Elements may have coordinates in any tower.
#[derive(Clone)]
pub struct OctonionAlgebra(Arc<OctData>);

/// Evidence returned by [`OctonionAlgebra::ell_iso_check`].
#[derive(Clone, Debug)]
pub struct IsoReport {
    pub rank: usize,
    pub relations_hold: bool,
    pub grading_ok: bool,
    pub dependent_monomial: Option<u32>,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.rank == 256 && self.relations_hold && self.grading_ok
    }
}

/// The spin lift of a G₂ automorphism, as an element of C(P).
#[derive(Clone, Debug)]
pub struct G2Lift {
    pub gamma: CliffordElement,
    /// π_P(γ) in the pure basis.
    pub pure_action: Matrix,
}

fn rat(x: &Scalar) -> BigRational {
    x.as_rational().expect("structure constants are rational")
}

impl OctonionAlgebra {
    pub fn new() -> OctonionAlgebra {
        OctonionAlgebra::build(false)
    }

    /// Shared instance; construction precomputes 256 monomial matrices.
    pub fn standard() -> &'static OctonionAlgebra {
        static ALG: OnceLock<OctonionAlgebra> = OnceLock::new();
        ALG.get_or_init(OctonionAlgebra::new)
    }

    /// Same model with the sign of one cross-product term flipped, used as
    /// a mutation for the verification suite. Not a composition algebra.
    pub fn with_sign_error() -> OctonionAlgebra {
        OctonionAlgebra::build(true)
    }

    fn build(flipped: bool) -> OctonionAlgebra {
        let q = FieldTower::rationals();
        let mut g = Matrix::zeros(&q, 8, 8);
        g.set(0, 7, q.one());
        g.set(7, 0, q.one());
        for i in 0..3 {
            g.set(1 + i, 4 + i, q.from_int(-1));
            g.set(4 + i, 1 + i, q.from_int(-1));
        }
        let c_space = QuadSpace::new(g).unwrap();
        let mut cols: Vec<Vector> = Vec::new();
        for i in 0..3 {
            cols.push(Octonion::basis(&q, 1 + i).into_coords());
            cols.push(Octonion::basis(&q, 4 + i).into_coords());
        }
        let mut l = vec![q.zero(); 8];
        l[0] = q.one();
        l[7] = q.from_int(-1);
        cols.push(l);
        let pure_basis = Matrix::from_columns(&q, &cols);
        let p_space = QuadSpace::new(pure_basis.transpose().mul(c_space.gram()).mul(&pure_basis)).unwrap();
        let cp = CliffordAlgebra::new(&p_space).unwrap();
        let mut ccols: Vec<Vector> = (0..7).map(|i| pure_basis.mul_vec(&cp.basis().column(i))).collect();
        ccols.push(Octonion::unit(&q).into_coords());
        let cc = CliffordAlgebra::from_orthogonal_basis(&c_space, Matrix::from_columns(&q, &ccols)).unwrap();
        let mut pe = cols.clone();
        pe.push(Octonion::unit(&q).into_coords());
        let pe_basis = Matrix::from_columns(&q, &pe);
        let pe_basis_inv = pe_basis.inverse().unwrap();
        let mut alg = OctData {
            flipped,
            c_space,
            p_space,
            pure_basis,
            pe_basis,
            pe_basis_inv,
            cp,
            cc,
            monomials: Vec::new(),
            sparse: Vec::new(),
            squares: Vec::new(),
        };
        let gens: Vec<Matrix> = (0..8)
            .map(|i| {
                let x = Octonion::from_coords(alg.cc.basis().column(i));
                ell_matrix(&alg, &x)
            })
            .collect();
        let mut monomials = vec![Matrix::identity(&q, 16); 256];
        for s in 1..256usize {
            let i = s.trailing_zeros() as usize;
            // b_S = b_i · b_{S − i} with i the smallest element
            monomials[s] = gens[i].mul(&monomials[s & (s - 1)]);
        }
        alg.sparse = monomials
            .iter()
            .map(|m| {
                let mut v = Vec::new();
                for r in 0..16 {
                    for c in 0..16 {
                        let x = m.get(r, c);
                        if !x.is_zero() {
                            v.push((r, c, rat(x)));
                        }
                    }
                }
                v
            })
            .collect();
        alg.squares = (0..256u32).map(|s| rat(&alg.cc.monomial_product(s, s))).collect();
        alg.monomials = monomials;
        OctonionAlgebra(Arc::new(alg))
    }

    pub fn mul(&self, x: &Octonion, y: &Octonion) -> Octonion {
        oct_mul(self.0.flipped, x, y)
    }

    /// x̄ = β(x,e)e − x = (b, −u, −v, a).
    pub fn conj(&self, x: &Octonion) -> Octonion {
        let c = &x.coords;
        let mut out = vec![c[7].clone()];
        out.extend(c[1..7].iter().map(|s| -s));
        out.push(c[0].clone());
        Octonion { coords: out }
    }

    pub fn q(&self, x: &Octonion) -> Scalar {
        &(x.a() * x.b()) - &dot3(x.u(), x.v())
    }

    pub fn beta(&self, x: &Octonion, y: &Octonion) -> Scalar {
        &(&(x.a() * y.b()) + &(x.b() * y.a())) - &(&dot3(x.u(), y.v()) + &dot3(x.v(), y.u()))
    }

    /// (C, q) as a quadratic space over ℚ in Zorn coordinates.
    pub fn c_space(&self) -> &QuadSpace {
        &self.0.c_space
    }

    /// P in the pure basis; its Gram matrix is −Gram(E₇).
    pub fn p_space(&self) -> &QuadSpace {
        &self.0.p_space
    }

    /// 8×7 matrix whose columns are the pure basis in Zorn coordinates.
    pub fn pure_basis(&self) -> &Matrix {
        &self.0.pure_basis
    }

    /// C(P), with the orthogonal basis that C(C) extends by e.
    pub fn clifford_p(&self) -> &CliffordAlgebra {
        &self.0.cp
    }

    pub fn clifford_c(&self) -> &CliffordAlgebra {
        &self.0.cc
    }

    pub fn pure_to_octonion(&self, p: &[Scalar]) -> Octonion {
        Octonion::from_coords(self.0.pure_basis.mul_vec(p))
    }

    /// Pure-basis coordinates when β(x,e) = 0.
    pub fn octonion_to_pure(&self, x: &Octonion) -> Option<Vector> {
        let c = &x.coords;
        if !(&c[0] + &c[7]).is_zero() {
            return None;
        }
        Some(vec![
            c[1].clone(),
            c[4].clone(),
            c[2].clone(),
            c[5].clone(),
            c[3].clone(),
            c[6].clone(),
            c[0].clone(),
        ])
    }

    /// Matrix of a ↦ x·a.
    pub fn left_matrix(&self, x: &Octonion) -> Matrix {
        let t = x.coords[0].tower().clone();
        let cols: Vec<Vector> = (0..8).map(|j| self.mul(x, &Octonion::basis(&t, j)).into_coords()).collect();
        Matrix::from_columns(&t, &cols)
    }

    /// ℓ(x) : (a,b) ↦ (xb, x̄a) on C ⊕ C.
    pub fn ell_generator(&self, x: &Octonion) -> Matrix {
        ell_matrix(&self.0, x)
    }

    /// ℓ_C(b_S) for the orthogonal basis b₁..b₇, e of C.
    pub fn monomial_matrix(&self, mask: u32) -> &Matrix {
        &self.0.monomials[mask as usize]
    }

    /// Checks that ℓ satisfies the Clifford relations, respects the grading
    /// and maps the 256 monomials to linearly independent endomorphisms.
    pub fn ell_iso_check(&self) -> IsoReport {
        let q = FieldTower::rationals();
        let d = self.0.cc.diag();
        let mut relations_hold = true;
        for i in 0..8 {
            for j in i..8 {
                let a = &self.0.monomials[1 << i];
                let b = &self.0.monomials[1 << j];
                let s = a.mul(b).add(&b.mul(a));
                let expected = if i == j {
                    Matrix::scalar_matrix(&d[i].mul_int(&2.into()), 16)
                } else {
                    Matrix::zeros(&q, 16, 16)
                };
                if s != expected {
                    relations_hold = false;
                }
            }
        }
        let mut grading_ok = true;
        for (s, sp) in self.0.sparse.iter().enumerate() {
            let even = s.count_ones() % 2 == 0;
            if sp.iter().any(|(r, c, _)| ((r < &8) == (c < &8)) != even) {
                grading_ok = false;
            }
        }
        let (rank, dependent_monomial) = self.monomial_rank();
        IsoReport { rank, relations_hold, grading_ok, dependent_monomial }
    }

    fn monomial_rank(&self) -> (usize, Option<u32>) {
        // full rank mod p certifies full rank over ℚ
        let p: u64 = 2_147_483_647;
        let pb = BigInt::from(p);
        let mut mat: Vec<Vec<u64>> = Vec::with_capacity(256);
        let mut usable = true;
        for sp in &self.0.sparse {
            let mut row = vec![0u64; 256];
            for (r, c, x) in sp {
                let den = (x.denom() % &pb + &pb) % &pb;
                let num = (x.numer() % &pb + &pb) % &pb;
                let den: u64 = den.try_into().unwrap();
                let num: u64 = num.try_into().unwrap();
                if den == 0 {
                    usable = false;
                }
                row[r * 16 + c] = fp::mul(num, if den == 0 { 0 } else { fp::inv(den, p) }, p);
            }
            mat.push(row);
        }
        if usable && rank_mod_p(mat, p) == 256 {
            return (256, None);
        }
        let q = FieldTower::rationals();
        let cols: Vec<Vector> = self.0.monomials.iter().map(|m| m.entries().to_vec()).collect();
        let a = Matrix::from_columns(&q, &cols);
        let (_, piv) = a.rref().unwrap();
        let dep = (0..256u32).find(|s| !piv.contains(&(*s as usize)));
        (piv.len(), dep)
    }

    fn check_cp(&self, g: &CliffordElement) -> Result<()> {
        let a = g.algebra();
        if a.dim() != 7 || a.basis().entries().iter().zip(self.0.cp.basis().entries()).any(|(x, y)| x != y) {
            return Err(Error::AlgebraMismatch);
        }
        if a.space().gram().entries().iter().zip(self.0.p_space.gram().entries()).any(|(x, y)| x != y) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    fn block_sum(&self, g: &CliffordElement, block: usize) -> Matrix {
        let t = g.algebra().tower().clone();
        let mut out = Matrix::zeros(&t, 8, 8);
        let off = 8 * block;
        for (m, c) in g.terms() {
            for (r, col, x) in &self.0.sparse[*m as usize] {
                if *r >= off && *r < off + 8 && *col >= off && *col < off + 8 {
                    let v = out.get(r - off, col - off) + &c.mul_rational(x);
                    out.set(r - off, col - off, v);
                }
            }
        }
        out
    }

    /// ρ_C(γ) on W₀ = C: the upper-left block of ℓ_C(γ) for γ ∈ C(P)₀.
    pub fn spin_rep(&self, g: &CliffordElement) -> Result<Matrix> {
        self.check_cp(g)?;
        if !g.is_even() {
            return Err(Error::NotEvenOrNotCliffordGroup);
        }
        match g.nu() {
            Ok(n) if !n.is_zero() => {}
            _ => return Err(Error::NotEvenOrNotCliffordGroup),
        }
        Ok(self.block_sum(g, 0))
    }

    /// ρ_{C;1}(γ): the lower-right block of ℓ_C(γ).
    pub fn spin_rep_odd(&self, g: &CliffordElement) -> Result<Matrix> {
        self.check_cp(g)?;
        if !g.is_even() {
            return Err(Error::NotEvenOrNotCliffordGroup);
        }
        Ok(self.block_sum(g, 1))
    }

    /// Matrix of x ↦ x̄.
    pub fn conj_matrix(&self, t: &FieldTower) -> Matrix {
        let cols: Vec<Vec<Scalar>> = (0..8).map(|i| self.conj(&Octonion::basis(t, i)).into_coords()).collect();
        Matrix::from_columns(t, &cols)
    }

    /// The related triple (π_C(γ), ρ_{C;0}(γ), ν(γ)⁻¹·κρ_{C;1}(γ)κ) with κ the
    /// conjugation, which identifies the odd summand of C ⊕ C with C.
    pub fn triality_triple(&self, g: &CliffordElement) -> Result<(Matrix, Matrix, Matrix)> {
        let nu = g.nu()?;
        let pi = self.pi_on_c(g)?;
        let r0 = self.spin_rep(g)?;
        let k = self.conj_matrix(g.algebra().tower());
        let r1 = k.mul(&self.spin_rep_odd(g)?).mul(&k).scale(&nu.inv()?);
        Ok((pi, r0, r1))
    }

    /// ρ_C(v₁⋯v₂ₖ) computed as a ↦ v₁(v̄₂(v₃(v̄₄ ⋯ a))), for pure vectors
    /// in pure-basis coordinates.
    pub fn spin_rep_from_vectors(&self, vs: &[Vector]) -> Result<Matrix> {
        if vs.len() % 2 == 1 || vs.is_empty() {
            return Err(Error::NotEvenOrNotCliffordGroup);
        }
        let t = vs[0][0].tower().clone();
        let mut acc = Matrix::identity(&t, 8);
        for (k, v) in vs.iter().enumerate() {
            let x = self.pure_to_octonion(v);
            let x = if k % 2 == 1 { self.conj(&x) } else { x };
            acc = acc.mul(&self.left_matrix(&x));
        }
        Ok(acc)
    }

    /// Inverts ℓ_C by the trace form: tr ℓ_C(b_U) = 0 for U ≠ ∅.
    pub fn ell_inverse(&self, x: &Matrix) -> CliffordElement {
        let t = x.tower().clone();
        let cc = self.0.cc.lift_to(&t).unwrap();
        let mut terms = Vec::new();
        for s in 0..256usize {
            let mut tr = t.zero();
            for (r, c, v) in &self.0.sparse[s] {
                let e = x.get(*c, *r);
                if !e.is_zero() {
                    tr += &e.mul_rational(v);
                }
            }
            if tr.is_zero() {
                continue;
            }
            let den = &self.0.squares[s] * BigRational::from_integer(16.into());
            terms.push((s as u32, tr.mul_rational(&(BigRational::one() / den))));
        }
        CliffordElement::from_terms(&cc, terms)
    }

    /// The even element γ of C(P)₀ with ρ_C(γ) = w, by the trace form on W₀.
    pub fn spin_rep_inverse(&self, w: &Matrix) -> CliffordElement {
        let t = w.tower().clone();
        let cp = self.0.cp.lift_to(&t).unwrap();
        let mut terms = Vec::new();
        for s in (0..128usize).filter(|s| s.count_ones() % 2 == 0) {
            let mut tr = t.zero();
            for (r, c, v) in &self.0.sparse[s] {
                if *r < 8 && *c < 8 {
                    let e = w.get(*c, *r);
                    if !e.is_zero() {
                        tr += &e.mul_rational(v);
                    }
                }
            }
            if tr.is_zero() {
                continue;
            }
            let den = &self.0.squares[s] * BigRational::from_integer(8.into());
            terms.push((s as u32, tr.mul_rational(&(BigRational::one() / den))));
        }
        CliffordElement::from_terms(&cp, terms)
    }

    /// π_C(b(γ)) = π_P(γ) ⊕ 1 in Zorn coordinates.
    pub fn pi_on_c(&self, g: &CliffordElement) -> Result<Matrix> {
        self.check_cp(g)?;
        let p = g.pi_action()?;
        Ok(self.extend_pure_action(&p))
    }

    /// The matrix on C of an action on P (pure basis) fixing e.
    pub fn extend_pure_action(&self, p: &Matrix) -> Matrix {
        let t = p.tower().clone();
        let one = Matrix::identity(&t, 1);
        self.0.pe_basis.mul(&p.direct_sum(&one)).mul(&self.0.pe_basis_inv)
    }

    /// The pure-basis matrix of t restricted to P, if t fixes e and preserves P.
    pub fn restrict_to_pure(&self, t: &Matrix) -> Option<Matrix> {
        let m = self.0.pe_basis_inv.mul(t).mul(&self.0.pe_basis);
        for i in 0..7 {
            if !m.get(7, i).is_zero() || !m.get(i, 7).is_zero() {
                return None;
            }
        }
        if !m.get(7, 7).is_one() {
            return None;
        }
        Some(m.submatrix(0, 0, 7, 7))
    }

    fn basis_products(&self, t: &FieldTower) -> Vec<Vec<Octonion>> {
        (0..8)
            .map(|i| (0..8).map(|j| self.mul(&Octonion::basis(t, i), &Octonion::basis(t, j))).collect())
            .collect()
    }

    /// t₁(xy) = t₂(x)t₃(y) on all basis pairs, after checking t₁ ∈ SO(C)
    /// and t₂, t₃ ∈ GSO(C).
    pub fn is_related_triple(&self, t1: &Matrix, t2: &Matrix, t3: &Matrix) -> Result<bool> {
        let tw = t1.tower().clone();
        let c = self.0.c_space.lift_to(&tw)?;
        match c.isometry_class(t1) {
            Ok(s) if s.factor.is_one() && s.proper => {}
            _ => return Err(Error::NotSimilitude),
        }
        for t in [t2, t3] {
            match c.isometry_class(t) {
                Ok(s) if s.proper => {}
                _ => return Err(Error::NotSimilitude),
            }
        }
        let prods = self.basis_products(&tw);
        for i in 0..8 {
            let x = Octonion::from_coords(t2.column(i));
            for j in 0..8 {
                let y = Octonion::from_coords(t3.column(j));
                let lhs = t1.mul_vec(prods[i][j].coords());
                if lhs != self.mul(&x, &y).into_coords() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// True iff t is invertible, fixes e and is multiplicative on basis pairs.
    pub fn is_g2_automorphism(&self, t: &Matrix) -> bool {
        if t.rows() != 8 || t.cols() != 8 {
            return false;
        }
        let tw = t.tower().clone();
        if !matches!(t.det(), Ok(d) if !d.is_zero()) {
            return false;
        }
        if t.mul_vec(Octonion::unit(&tw).coords()) != Octonion::unit(&tw).into_coords() {
            return false;
        }
        let prods = self.basis_products(&tw);
        let imgs: Vec<Octonion> = (0..8).map(|i| Octonion::from_coords(t.column(i))).collect();
        for i in 0..8 {
            for j in 0..8 {
                if t.mul_vec(prods[i][j].coords()) != self.mul(&imgs[i], &imgs[j]).into_coords() {
                    return false;
                }
            }
        }
        true
    }

    /// The element γ ∈ Spin(P) with ℓ_C(γ) = diag(φ, φ).
    pub fn g2_spin_lift(&self, phi: &Matrix) -> Result<G2Lift> {
        if !self.is_g2_automorphism(phi) {
            return Err(Error::NotAutomorphism);
        }
        let t = phi.tower().clone();
        let x = phi.direct_sum(phi);
        let gc = self.ell_inverse(&x);
        if gc.terms().keys().any(|m| m & 0x80 != 0 || m.count_ones() % 2 == 1) {
            return Err(Error::NotAutomorphism);
        }
        let cp = self.0.cp.lift_to(&t)?;
        let gamma = CliffordElement::from_terms(&cp, gc.terms().iter().map(|(m, c)| (*m, c.clone())));
        if !gamma.nu()?.is_one() {
            return Err(Error::NotAutomorphism);
        }
        let pure_action = gamma.pi_action()?;
        let expected = self.restrict_to_pure(phi).ok_or(Error::NotAutomorphism)?;
        if pure_action != expected || self.block_sum(&gamma, 0) != *phi {
            return Err(Error::NotAutomorphism);
        }
        Ok(G2Lift { gamma, pure_action })
    }

    /// An anisotropic vector of C fixed by every matrix in Δ, if one exists.
    pub fn fixed_anisotropic_spinor(&self, delta: &[Matrix]) -> Option<Vector> {
        let t = delta.first().map_or(FieldTower::rationals(), |m| m.tower().clone());
        let c = self.0.c_space.lift_to(&t).ok()?;
        let id = Matrix::identity(&t, 8);
        let mut rows: Vec<Vector> = Vec::new();
        for m in delta {
            let d = m.sub(&id);
            for r in 0..8 {
                let row = d.row(r);
                if !is_zero_vector(&row) {
                    rows.push(row);
                }
            }
        }
        let fixed = if rows.is_empty() {
            (0..8).map(|i| c.basis_vector(i)).collect()
        } else {
            kernel_basis(&Matrix::from_rows(&t, rows)).ok()?
        };
        for f in &fixed {
            if !c.q(f).is_zero() {
                return Some(f.clone());
            }
        }
        // all basis vectors isotropic: q(f + g) = β(f, g)
        for i in 0..fixed.len() {
            for j in i + 1..fixed.len() {
                if !c.beta(&fixed[i], &fixed[j]).is_zero() {
                    return Some(fixed[i].iter().zip(&fixed[j]).map(|(a, b)| a + b).collect());
                }
            }
        }
        None
    }
}

impl Default for OctonionAlgebra {
    fn default() -> Self {
        OctonionAlgebra::new()
    }
}

fn oct_mul(flipped: bool, x: &Octonion, y: &Octonion) -> Octonion {
    let (a, u, v, b) = (x.a(), x.u(), x.v(), x.b());
    let (c, xx, yy, d) = (y.a(), y.u(), y.v(), y.b());
    let vy = cross3(v, yy);
    let ux = cross3(u, xx);
    let mut out = Vec::with_capacity(8);
    out.push(&(a * c) + &dot3(u, yy));
    for i in 0..3 {
        let s = &(a * &xx[i]) + &(d * &u[i]);
        out.push(if flipped { &s + &vy[i] } else { &s - &vy[i] });
    }
    for i in 0..3 {
        out.push(&(&(c * &v[i]) + &(b * &yy[i])) + &ux[i]);
    }
    out.push(&(b * d) + &dot3(v, xx));
    Octonion { coords: out }
}

fn ell_matrix(alg: &OctData, x: &Octonion) -> Matrix {
    let t = x.coords[0].tower().clone();
    let xb = {
        let c = &x.coords;
        let mut out = vec![c[7].clone()];
        out.extend(c[1..7].iter().map(|s| -s));
        out.push(c[0].clone());
        Octonion { coords: out }
    };
    let mut m = Matrix::zeros(&t, 16, 16);
    for j in 0..8 {
        let e = Octonion::basis(&t, j);
        let top = oct_mul(alg.flipped, x, &e);
        let bot = oct_mul(alg.flipped, &xb, &e);
        for i in 0..8 {
            // column 8+j: b = e_j goes to x·e_j on top
            m.set(i, 8 + j, top.coords[i].clone());
            // column j: a = e_j goes to x̄·e_j below
            m.set(8 + i, j, bot.coords[i].clone());
        }
    }
    m
}

fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = fp::inv(m[rank][c], p);
        for x in m[rank].iter_mut() {
            *x = fp::mul(*x, inv, p);
        }
        let prow = m[rank].clone();
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for (x, y) in m[r].iter_mut().zip(&prow) {
                    *x = (*x + p - fp::mul(f, *y, p)) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldTower {
        FieldTower::rationals()
    }

    fn oct(c: &[i64]) -> Octonion {
        let t = q();
        Octonion::from_coords(c.iter().map(|&x| t.from_int(x)).collect())
    }

    fn pure(c: &[i64]) -> Vector {
        let t = q();
        c.iter().map(|&x| t.from_int(x)).collect()
    }

    #[test]
    fn unit_and_conjugation() {
        let alg = OctonionAlgebra::standard();
        let t = q();
        let e = Octonion::unit(&t);
        let x = oct(&[1, 2, -1, 0, 3, 1, 1, 5]);
        assert_eq!(alg.mul(&e, &x), x);
        assert_eq!(alg.mul(&x, &e), x);
        assert_eq!(alg.conj(&e), e);
        let xx = alg.mul(&x, &alg.conj(&x));
        assert_eq!(xx.into_coords(), e.coords().iter().map(|c| c * &alg.q(&x)).collect::<Vec<_>>());
    }

    #[test]
    fn pure_space_matches_e7_up_to_sign() {
        let alg = OctonionAlgebra::standard();
        let t = q();
        let e7 = QuadSpace::e7(&t);
        assert_eq!(alg.p_space().gram(), &e7.gram().neg());
        let e = Octonion::unit(&t);
        for i in 0..7 {
            let p = alg.pure_to_octonion(&e7.basis_vector(i));
            assert!(alg.beta(&p, &e).is_zero());
            assert_eq!(alg.conj(&p), Octonion::from_coords(p.coords().iter().map(|c| -c).collect()));
            assert_eq!(alg.octonion_to_pure(&p).unwrap(), e7.basis_vector(i));
        }
    }

    #[test]
    fn ell_examples() {
        let alg = OctonionAlgebra::standard();
        let t = q();
        let le = alg.ell_generator(&Octonion::unit(&t));
        let swap = Matrix::identity(&t, 8).direct_sum(&Matrix::identity(&t, 8));
        let mut s = Matrix::zeros(&t, 16, 16);
        for i in 0..8 {
            s.set(i, 8 + i, t.one());
            s.set(8 + i, i, t.one());
        }
        assert_eq!(le, s);
        let x = oct(&[2, 1, 0, -1, 1, 3, 0, 1]);
        let l = alg.ell_generator(&x);
        assert_eq!(l.mul(&l), swap.scale(&alg.q(&x)));
    }

    #[test]
    fn ell_is_an_isomorphism() {
        let r = OctonionAlgebra::standard().ell_iso_check();
        assert_eq!(r.rank, 256);
        assert!(r.relations_hold && r.grading_ok && r.passed());
    }

    #[test]
    fn sign_error_is_detected() {
        let bad = OctonionAlgebra::with_sign_error();
        assert!(!bad.ell_iso_check().passed());
    }

    #[test]
    fn automorphism_examples() {
        let alg = OctonionAlgebra::standard();
        let t = q();
        let id = Matrix::identity(&t, 8);
        assert!(alg.is_g2_automorphism(&id));
        assert!(!alg.is_g2_automorphism(&id.neg()));
        let conj = Matrix::from_columns(&t, &(0..8).map(|i| alg.conj(&Octonion::basis(&t, i)).into_coords()).collect::<Vec<_>>());
        assert!(!alg.is_g2_automorphism(&conj));
        // the SL₃-type automorphism u ↦ Au, v ↦ A^{-t}v
        let a = Matrix::from_int_rows(&t, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let ait = a.inverse().unwrap().transpose();
        let phi = Matrix::identity(&t, 1).direct_sum(&a).direct_sum(&ait).direct_sum(&Matrix::identity(&t, 1));
        assert!(alg.is_g2_automorphism(&phi));
        let lift = alg.g2_spin_lift(&phi).unwrap();
        assert!(lift.gamma.nu().unwrap().is_one());
        assert_eq!(alg.spin_rep(&lift.gamma).unwrap(), phi);
        let one = alg.g2_spin_lift(&id).unwrap();
        assert!(one.gamma.as_scalar().unwrap().is_one());
        assert!(matches!(alg.g2_spin_lift(&id.neg()), Err(Error::NotAutomorphism)));
    }

    #[test]
    fn related_triple_examples() {
        let alg = OctonionAlgebra::standard();
        let t = q();
        let id = Matrix::identity(&t, 8);
        assert!(alg.is_related_triple(&id, &id, &id).unwrap());
        let l = t.from_int(3);
        let m = id.scale(&l);
        let mi = id.scale(&l.inv().unwrap());
        assert!(alg.is_related_triple(&id, &m, &mi).unwrap());
        assert!(!alg.is_related_triple(&id, &m, &m).unwrap());
    }

    #[test]
    fn fixed_spinor_examples() {
        let alg = OctonionAlgebra::standard();
        let t = q();
        let id = Matrix::identity(&t, 8);
        let s = alg.fixed_anisotropic_spinor(std::slice::from_ref(&id)).unwrap();
        assert!(!alg.c_space().q(&s).is_zero());
        assert!(alg.fixed_anisotropic_spinor(&[id.neg()]).is_none());
    }

    #[test]
    fn spin_rep_of_identity_and_squares() {
        let alg = OctonionAlgebra::standard();
        let cp = alg.clifford_p();
        assert!(alg.spin_rep(&cp.one()).unwrap().is_identity());
        let v = pure(&[1, 2, 0, 0, 1, 0, 1]);
        let gv = cp.vector(&v);
        let q_v = cp.space().q(&v);
        assert_eq!(alg.spin_rep(&(&gv * &gv)).unwrap(), Matrix::scalar_matrix(&q_v, 8));
    }

    fn anisotropic(c: &[i64]) -> Option<Vector> {
        let v = pure(c);
        let alg = OctonionAlgebra::standard();
        if alg.clifford_p().space().q(&v).is_zero() {
            None
        } else {
            Some(v)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn composition_and_alternativity(x in prop::collection::vec(-6i64..=6, 8), y in prop::collection::vec(-6i64..=6, 8)) {
            let alg = OctonionAlgebra::standard();
            let (x, y) = (oct(&x), oct(&y));
            let xy = alg.mul(&x, &y);
            prop_assert_eq!(alg.q(&xy), &alg.q(&x) * &alg.q(&y));
            prop_assert_eq!(alg.mul(&x, &xy), alg.mul(&alg.mul(&x, &x), &y));
            prop_assert_eq!(alg.mul(&alg.mul(&y, &x), &x), alg.mul(&y, &alg.mul(&x, &x)));
        }

        #[test]
        fn two_routes_and_triality(
            vs in prop::collection::vec(prop::collection::vec(-2i64..=2, 7), 2..=4),
        ) {
            let alg = OctonionAlgebra::standard();
            let cp = alg.clifford_p();
            let vecs: Vec<Vector> = vs.iter().filter_map(|c| anisotropic(c)).collect();
            let k = vecs.len() - vecs.len() % 2;
            prop_assume!(k >= 2);
            let vecs = &vecs[..k];
            let mut g = cp.one();
            for v in vecs {
                g = &g * &cp.vector(v);
            }
            let r1 = alg.spin_rep(&g).unwrap();
            let r2 = alg.spin_rep_from_vectors(vecs).unwrap();
            prop_assert_eq!(&r1, &r2);
            let nu = g.nu().unwrap();
            let s = alg.c_space().isometry_class(&r1).unwrap();
            prop_assert_eq!(&s.factor, &nu);
            let (pi, r0, r_odd) = alg.triality_triple(&g).unwrap();
            prop_assert_eq!(&r0, &r1);
            prop_assert!(alg.is_related_triple(&pi, &r0, &r_odd).unwrap());
            prop_assert_eq!(alg.spin_rep_inverse(&r1), g.clone());
            // ρ(v w) e = v w̄
            let v = alg.pure_to_octonion(&vecs[0]);
            let w = alg.pure_to_octonion(&vecs[1]);
            let vw = &cp.vector(&vecs[0]) * &cp.vector(&vecs[1]);
            let img = alg.spin_rep(&vw).unwrap().mul_vec(Octonion::unit(&FieldTower::rationals()).coords());
            prop_assert_eq!(img, alg.mul(&v, &alg.conj(&w)).into_coords());
        }

        #[test]
        fn spin_rep_is_multiplicative(
            a in prop::collection::vec(-2i64..=2, 7), b in prop::collection::vec(-2i64..=2, 7),
            c in prop::collection::vec(-2i64..=2, 7), d in prop::collection::vec(-2i64..=2, 7),
        ) {
            let alg = OctonionAlgebra::standard();
            let cp = alg.clifford_p();
            let vs: Option<Vec<Vector>> = [a, b, c, d].iter().map(|x| anisotropic(x)).collect();
            prop_assume!(vs.is_some());
            let vs = vs.unwrap();
            let g = &cp.vector(&vs[0]) * &cp.vector(&vs[1]);
            let h = &cp.vector(&vs[2]) * &cp.vector(&vs[3]);
            let lhs = alg.spin_rep(&(&g * &h)).unwrap();
            prop_assert_eq!(lhs, alg.spin_rep(&g).unwrap().mul(&alg.spin_rep(&h).unwrap()));
        }
    }
}
