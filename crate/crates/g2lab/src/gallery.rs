//! Builders for the named groups: the torus, the Z/4 × Z/2 group acting by
//! its seven nontrivial characters, GL₂(𝔽₃) and SL₂(𝔽₃) in SO(E₇),
//! subgroups of O₂^± and finite subgroups of G₂, plus seeded fuzzing.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decide::Case;
use crate::grouprep::{isotypic_split, solve_columns, GroupTable, IsotypicDatum, MatrixGroup, Representation};
use crate::octonion::{Octonion, OctonionAlgebra};
use crate::quadspace::{QuadSpace, Vector};
use crate::scalars::{adjoin_sqrt, FieldTower, Matrix, Scalar, ScalarError};
use crate::{Error, Result};

/// ℚ(ζ₂₄): contains ζ₃, ζ₄, ζ₈, √2, √−2 and √−3.
pub fn default_tower() -> FieldTower {
    FieldTower::cyclotomic(24)
}

fn check_special(g: &Matrix) -> Result<()> {
    let e = QuadSpace::e7(g.tower());
    match e.isometry_class(g) {
        Ok(s) if s.factor.is_one() && s.proper => Ok(()),
        _ => Err(Error::ConstructionVerificationFailed("generator is not in SO(E₇)".into())),
    }
}

fn group_from(t: &FieldTower, gens: Vec<Matrix>) -> Result<MatrixGroup> {
    let gens: Vec<Matrix> = gens.into_iter().filter(|g| !g.is_identity()).collect();
    let gens = if gens.is_empty() { vec![Matrix::identity(t, 7)] } else { gens };
    for g in &gens {
        check_special(g)?;
    }
    MatrixGroup::new(t, 7, gens)
}

/// Columns e1, f1, e2, f2, u, w, ℓ with u = e3 + f3 and w = s(e3 − f3).
fn adapted_basis(t: &FieldTower, s: &Scalar) -> Matrix {
    let mut b = Matrix::identity(t, 7);
    b.set(4, 4, t.one());
    b.set(5, 4, t.one());
    b.set(4, 5, s.clone());
    b.set(5, 5, -s);
    b
}

/// P on (e1, e2), P^{-T} on (f1, f2) and `tail` on (u, w, ℓ), written in
/// E₇ coordinates.
fn assemble(t: &FieldTower, p: &Matrix, tail: &Matrix, w_scale: &Scalar) -> Result<Matrix> {
    let pd = p.inverse()?.transpose();
    let mut m = Matrix::zeros(t, 7, 7);
    for (r, rr) in [0usize, 2].iter().enumerate() {
        for (c, cc) in [0usize, 2].iter().enumerate() {
            m.set(*rr, *cc, p.get(r, c).clone());
            m.set(rr + 1, cc + 1, pd.get(r, c).clone());
        }
    }
    for r in 0..3 {
        for c in 0..3 {
            m.set(4 + r, 4 + c, tail.get(r, c).clone());
        }
    }
    let b = adapted_basis(t, w_scale);
    Ok(b.mul(&m).mul(&b.inverse()?))
}

/// Diagonal generators with eigenvalues (x, x⁻¹, y, y⁻¹, xy, (xy)⁻¹, 1) for
/// x = ζ_{n₁}, y = ζ_{n₂}, split into one generator per factor.
pub fn build_torus_subgroup(t: &FieldTower, n1: u64, n2: u64) -> Result<MatrixGroup> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Parse("torus orders must be positive".into()));
    }
    let need = num_integer::lcm(n1, n2);
    if !t.conductor().is_multiple_of(need) {
        return Err(ScalarError::ConductorTooSmall { needed: need, have: t.conductor() }.into());
    }
    let x = t.root_of_unity(n1, 1)?;
    let y = t.root_of_unity(n2, 1)?;
    let one = t.one();
    let diag = |a: &Scalar, b: &Scalar| -> Result<Matrix> {
        let ab = a * b;
        Ok(Matrix::diagonal(t, &[a.clone(), a.inv()?, b.clone(), b.inv()?, ab.clone(), ab.inv()?, t.one()]))
    };
    group_from(t, vec![diag(&x, &one)?, diag(&one, &y)?])
}

/// Z/4 × Z/2 acting on E₇ by its seven nontrivial characters.
pub fn build_alpha(t: &FieldTower) -> Result<MatrixGroup> {
    let i = t.root_of_unity(4, 1)?;
    let (one, m1) = (t.one(), t.from_int(-1));
    let p_a = Matrix::diagonal(t, &[i.clone(), i.clone()]);
    let p_b = Matrix::diagonal(t, &[one.clone(), m1.clone()]);
    let tail_a = Matrix::diagonal(t, &[m1.clone(), one.clone(), m1.clone()]);
    let tail_b = Matrix::diagonal(t, &[one.clone(), m1.clone(), m1.clone()]);
    let a = assemble(t, &p_a, &tail_a, &one)?;
    let b = assemble(t, &p_b, &tail_b, &one)?;
    let g = group_from(t, vec![a, b])?;
    let tab = g.table()?;
    if tab.len() != 8 || !tab.is_abelian() || tab.exponent() != 4 {
        return Err(Error::ConstructionVerificationFailed("alpha is not Z/4 × Z/2".into()));
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaVariant {
    Gl,
    Sl,
}

type F3 = [u8; 4];

fn f3_mul(a: &F3, b: &F3) -> F3 {
    [
        (a[0] * b[0] + a[1] * b[2]) % 3,
        (a[0] * b[1] + a[1] * b[3]) % 3,
        (a[2] * b[0] + a[3] * b[2]) % 3,
        (a[2] * b[1] + a[3] * b[3]) % 3,
    ]
}

fn f3_det(a: &F3) -> u8 {
    (a[0] * a[3] + 2 * a[1] * a[2]) % 3
}

fn f3_apply(a: &F3, v: [u8; 2]) -> [u8; 2] {
    [(a[0] * v[0] + a[1] * v[1]) % 3, (a[2] * v[0] + a[3] * v[1]) % 3]
}

fn f3_line(v: [u8; 2]) -> [u8; 2] {
    if v[0] != 0 {
        let inv = v[0]; // 1 and 2 are self-inverse mod 3
        [1, (v[1] * inv) % 3]
    } else {
        [0, 1]
    }
}

pub const GL_GENERATORS: [F3; 3] = [[1, 1, 0, 1], [1, 0, 1, 1], [2, 0, 0, 1]];

struct AbstractGl {
    elements: Vec<F3>,
}

impl AbstractGl {
    fn new() -> AbstractGl {
        let id = [1, 0, 0, 1];
        let mut elements = vec![id];
        let mut seen = std::collections::HashSet::from([id]);
        let mut q = 0;
        while q < elements.len() {
            for g in &GL_GENERATORS {
                let p = f3_mul(&elements[q], g);
                if seen.insert(p) {
                    elements.push(p);
                }
            }
            q += 1;
        }
        AbstractGl { elements }
    }

    fn order(&self, g: &F3) -> usize {
        let mut p = *g;
        let mut k = 1;
        while p != [1, 0, 0, 1] {
            p = f3_mul(&p, g);
            k += 1;
        }
        k
    }
}

/// The permutation action on the three ways to pair up the four lines of 𝔽₃².
fn pairing_matrix(t: &FieldTower, g: &F3) -> Matrix {
    let lines = [[1u8, 0], [1, 1], [1, 2], [0, 1]];
    let pairings = [[(0usize, 1usize), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let img = |l: usize| -> usize {
        let v = f3_line(f3_apply(g, lines[l]));
        lines.iter().position(|x| *x == v).expect("line")
    };
    let norm = |p: (usize, usize)| if p.0 < p.1 { p } else { (p.1, p.0) };
    let mut m = Matrix::zeros(t, 3, 3);
    for (j, pr) in pairings.iter().enumerate() {
        let a = norm((img(pr[0].0), img(pr[0].1)));
        let i = pairings.iter().position(|q| q[0] == a || q[1] == a).expect("pairing");
        m.set(i, j, t.one());
    }
    m
}

/// Ind from a cyclic subgroup of order 8 of a faithful character.
fn induced_matrices(t: &FieldTower, gl: &AbstractGl) -> Result<Vec<Matrix>> {
    let x = *gl.elements.iter().find(|g| gl.order(g) == 8).expect("GL₂(𝔽₃) has elements of order 8");
    let mut pw = vec![[1u8, 0, 0, 1]];
    for _ in 1..8 {
        pw.push(f3_mul(pw.last().unwrap(), &x));
    }
    let mut reps: Vec<F3> = Vec::new();
    let mut coset: HashMap<F3, (usize, usize)> = HashMap::new();
    for g in &gl.elements {
        if coset.contains_key(g) {
            continue;
        }
        let j = reps.len();
        reps.push(*g);
        for (k, c) in pw.iter().enumerate() {
            coset.insert(f3_mul(g, c), (j, k));
        }
    }
    let z8 = t.root_of_unity(8, 1)?;
    Ok(GL_GENERATORS
        .iter()
        .map(|g| {
            let mut m = Matrix::zeros(t, reps.len(), reps.len());
            for (j, r) in reps.iter().enumerate() {
                let (jj, k) = coset[&f3_mul(g, r)];
                m.set(jj, j, z8.pow(k as u64));
            }
            m
        })
        .collect())
}

fn restrict(b: &Matrix, g: &Matrix) -> Result<Matrix> {
    let cols: Vec<Vector> = (0..b.cols()).map(|j| g.mul_vec(&b.column(j))).collect();
    solve_columns(b, &cols)
}

fn pattern(split: &[IsotypicDatum]) -> Vec<(usize, usize, bool)> {
    let mut p: Vec<(usize, usize, bool)> = split.iter().map(|c| (c.dim, c.multiplicity, c.selfdual)).collect();
    p.sort();
    p
}

/// GL₂(𝔽₃) (or SL₂(𝔽₃)) in SO(E₇) with E ≅ P ⊕ P* ⊕ c ⊕ H: P a faithful
/// 2-dimensional constituent of an induced module, c = det and H the
/// 2-dimensional constituent of the permutation action on pairings of lines.
pub fn build_beta(t: &FieldTower, variant: BetaVariant) -> Result<MatrixGroup> {
    if !t.conductor().is_multiple_of(24) {
        return Err(ScalarError::ConductorTooSmall { needed: 24, have: t.conductor() }.into());
    }
    let fail = |s: &str| Error::ConstructionVerificationFailed(s.to_string());
    let gl = AbstractGl::new();
    if gl.elements.len() != 48 {
        return Err(fail("GL₂(𝔽₃) enumeration"));
    }
    let ind = MatrixGroup::new(t, 6, induced_matrices(t, &gl)?)?;
    let tab = ind.table()?;
    if tab.len() != 48 {
        return Err(fail("induced module is not faithful"));
    }
    let split = isotypic_split(tab, &Representation::natural(tab))?;
    let pc = split
        .iter()
        .find(|c| c.dim == 2 && c.multiplicity == 1 && !c.selfdual)
        .ok_or_else(|| fail("no nonselfdual 2-dimensional constituent"))?;
    let (_, piv) = pc.projector.rref()?;
    let pb = Matrix::from_columns(t, &piv.iter().map(|&j| pc.projector.column(j)).collect::<Vec<_>>());
    let pgens: Vec<Matrix> = ind.generators().iter().map(|g| restrict(&pb, g)).collect::<Result<_>>()?;

    let perm: Vec<Matrix> = GL_GENERATORS.iter().map(|g| pairing_matrix(t, g)).collect();
    let perm_rep = Representation::from_generator_images(tab, &perm)?;
    let hsplit = isotypic_split(tab, &perm_rep)?;
    let hc = hsplit.iter().find(|c| c.dim == 2).ok_or_else(|| fail("pairing module has no 2-dim part"))?;
    let (t2, r2) = adjoin_sqrt(t, &t.from_int(2))?;
    let (t2, r6) = adjoin_sqrt(&t2, &t2.from_int(6))?;
    let h1: Vector = [1, -1, 0].iter().map(|&x| t2.from_int(x)).collect::<Vec<_>>();
    let h2: Vector = [1, 1, -2].iter().map(|&x| t2.from_int(x)).collect::<Vec<_>>();
    let hproj = hc.projector.lift_to(&t2)?;
    if hproj.mul_vec(&h1) != h1 || hproj.mul_vec(&h2) != h2 {
        return Err(fail("pairing module H is not the sum-zero plane"));
    }
    let hb = Matrix::from_columns(
        &t2,
        &[h1.iter().map(|x| x * &r2.inv().unwrap()).collect(), h2.iter().map(|x| x * &r6.inv().unwrap()).collect()],
    );
    let i = t2.root_of_unity(4, 1)?;
    let mut gens = Vec::new();
    let used: &[usize] = match variant {
        BetaVariant::Gl => &[0, 1, 2],
        BetaVariant::Sl => &[0, 1],
    };
    for &s in used {
        let h = restrict(&hb, &perm[s].lift_to(&t2)?)?;
        let c = if f3_det(&GL_GENERATORS[s]) == 1 { t2.one() } else { t2.from_int(-1) };
        let mut tail = Matrix::zeros(&t2, 3, 3);
        tail.set(0, 0, c);
        for r in 0..2 {
            for cc in 0..2 {
                tail.set(1 + r, 1 + cc, h.get(r, cc).clone());
            }
        }
        gens.push(assemble(&t2, &pgens[s].lift_to(&t2)?, &tail, &i)?);
    }
    let g = group_from(&t2, gens)?;
    let gt = g.table()?;
    let split = isotypic_split(gt, &Representation::natural(gt))?;
    let got = pattern(&split);
    let (order, expected) = match variant {
        BetaVariant::Gl => (48, vec![(1, 1, true), (2, 1, false), (2, 1, false), (2, 1, true)]),
        BetaVariant::Sl => (24, vec![(1, 1, false), (1, 1, false), (1, 1, true), (2, 2, true)]),
    };
    if gt.len() != order || got != expected {
        return Err(fail(&format!("pattern {got:?} for a group of order {}", gt.len())));
    }
    Ok(g)
}

/// Generators of a finite subgroup of O₂^±, each with its declared
/// similitude factor for the form xy on k².
#[derive(Clone, Debug, PartialEq)]
pub struct O2pmSubgroupSpec {
    pub generators: Vec<(Matrix, i8)>,
}

#[derive(Clone, Debug)]
pub struct GammaBuild {
    pub group: MatrixGroup,
    /// The source subgroup S ⊂ O₂^± acting on k².
    pub source: MatrixGroup,
    pub predicted: Case,
    /// "abelian", "D8" or "other".
    pub shape: &'static str,
    /// μ on each generator of S.
    pub mu: Vec<i8>,
    pub epsilon: Vec<i8>,
}

fn sign_of(x: &Scalar) -> Option<i8> {
    if x.is_one() {
        Some(1)
    } else if (-x).is_one() {
        Some(-1)
    } else {
        None
    }
}

fn is_d8(tab: &GroupTable) -> bool {
    let st = tab.order_statistics();
    tab.len() == 8 && st.get(&2) == Some(&5) && st.get(&4) == Some(&2)
}

/// Embeds S ⊂ O₂^± into SO(E₇) as P ⊕ P* ⊕ ε ⊕ μ ⊕ εμ with ε = det.
pub fn build_gamma(spec: &O2pmSubgroupSpec) -> Result<GammaBuild> {
    let first = spec.generators.first().ok_or_else(|| Error::Parse("no generators".into()))?;
    let t = first.0.tower().clone();
    let plane = QuadSpace::hyperbolic(&t, 1);
    let mut gens = Vec::new();
    let mut srcs = Vec::new();
    let (mut mus, mut eps) = (Vec::new(), Vec::new());
    for (m, declared) in &spec.generators {
        let m = m.lift_to(&t)?;
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: m.rows() });
        }
        let sim = plane.isometry_class(&m)?;
        let mu = sign_of(&sim.factor).ok_or(Error::SimilitudeFactorNotPlusMinusOne)?;
        if mu != *declared {
            return Err(Error::ConstructionVerificationFailed(format!("declared μ = {declared}, computed {mu}")));
        }
        let e = sign_of(&sim.det).ok_or(Error::SimilitudeFactorNotPlusMinusOne)?;
        let (es, ms) = (t.from_int(e), t.from_int(mu));
        let tail = Matrix::diagonal(&t, &[es.clone(), ms.clone(), &es * &ms]);
        gens.push(assemble(&t, &m, &tail, &t.one())?);
        srcs.push(m);
        mus.push(mu);
        eps.push(e);
    }
    let source = MatrixGroup::new(&t, 2, srcs)?;
    let st = source.table()?;
    let shape = if st.is_abelian() {
        "abelian"
    } else if is_d8(st) {
        "D8"
    } else {
        "other"
    };
    let mu_onto = mus.iter().any(|&m| m < 0);
    let eps_mu_distinct = eps.iter().zip(&mus).any(|(e, m)| e != m);
    let eps_onto = eps.iter().any(|&e| e < 0);
    let z4z2 = st.len() == 8 && st.exponent() == 4 && shape == "abelian";
    let predicted = if !mu_onto {
        Case::AContained
    } else if shape == "other" {
        Case::DO2pm
    } else if z4z2 && eps_onto && eps_mu_distinct {
        Case::CZ4xZ2
    } else {
        Case::AContained
    };
    let group = group_from(&t, gens)?;
    Ok(GammaBuild { group, source, predicted, shape, mu: mus, epsilon: eps })
}

fn m2(t: &FieldTower, a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar) -> Matrix {
    Matrix::from_rows(t, vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]])
}

/// Named O₂^± subgroups.
pub fn gamma_preset(t: &FieldTower, name: &str) -> Result<O2pmSubgroupSpec> {
    let (z, o, m) = (t.zero(), t.one(), t.from_int(-1));
    let z8 = t.root_of_unity(8, 1)?;
    let z8i = z8.inv()?;
    let i = t.root_of_unity(4, 1)?;
    let rot = |x: &Scalar| -> Result<Matrix> { Ok(m2(t, x, &z, &z, &x.inv()?)) };
    let refl = m2(t, &z, &o, &o, &z);
    let gens = match name {
        // rotation of order 4 and a reflection
        "d8" => vec![(rot(&i)?, 1), (refl.clone(), 1)],
        // the same group with μ nontrivial on the rotation
        "d8-twisted" => vec![(m2(t, &z, &o, &m, &z), -1), (refl.clone(), 1)],
        // dihedral of order 16 inside O₂
        "d16-orthogonal" => vec![(rot(&z8)?, 1), (refl.clone(), 1)],
        // order 16 with ε trivial and μ onto {±1}
        "dic16" => vec![(rot(&z8)?, 1), (m2(t, &z, &o, &m, &z), -1)],
        // order 16 with ε, μ and εμ all nontrivial
        "sd16" => vec![(m2(t, &z8, &z, &z, &-&z8i), -1), (refl.clone(), 1)],
        // rotation of order 4 and ζ₄ times a reflection
        "q8" => vec![(rot(&i)?, 1), (refl.scale(&i), -1)],
        // the centralizer of diag(1, −1)·(reflection)-type involution: Z/4 × Z/2
        "z4z2" => vec![(m2(t, &i, &z, &z, &i), -1), (refl.clone(), 1)],
        _ => return Err(Error::Parse(format!("unknown O₂^± preset {name}"))),
    };
    Ok(O2pmSubgroupSpec { generators: gens })
}

pub const GAMMA_PRESETS: [&str; 7] = ["d8", "d8-twisted", "d16-orthogonal", "dic16", "sd16", "q8", "z4z2"];

fn zorn_sl3(t: &FieldTower, a: &Matrix) -> Result<Matrix> {
    let ai = a.inverse()?.transpose();
    let mut m = Matrix::zeros(t, 8, 8);
    m.set(0, 0, t.one());
    m.set(7, 7, t.one());
    for r in 0..3 {
        for c in 0..3 {
            m.set(1 + r, 1 + c, a.get(r, c).clone());
            m.set(4 + r, 4 + c, ai.get(r, c).clone());
        }
    }
    Ok(m)
}

/// (a, u, v, b) ↦ (b, −v, −u, a).
fn zorn_swap(t: &FieldTower) -> Matrix {
    let mut m = Matrix::zeros(t, 8, 8);
    m.set(7, 0, t.one());
    m.set(0, 7, t.one());
    for i in 0..3 {
        m.set(4 + i, 1 + i, t.from_int(-1));
        m.set(1 + i, 4 + i, t.from_int(-1));
    }
    m
}

/// Rational octonion automorphisms of finite order: the swap and signed
/// permutations of determinant 1 acting through SL₃.
pub fn g2_base_automorphisms(t: &FieldTower) -> Result<Vec<Matrix>> {
    let mut out = vec![zorn_swap(t)];
    let perms = [[0usize, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];
    for p in perms {
        for s in 0..8u32 {
            let mut a = Matrix::zeros(t, 3, 3);
            for (c, &r) in p.iter().enumerate() {
                a.set(r, c, if s >> c & 1 == 1 { t.from_int(-1) } else { t.one() });
            }
            if a.det()?.is_one() && !a.is_identity() {
                out.push(zorn_sl3(t, &a)?);
            }
        }
    }
    Ok(out)
}

/// A finite subgroup of an octonionic G₂: random words in the base
/// automorphisms, lifted to Spin(P) and projected to SO(E₇).
pub fn build_g2_finite_sample(t: &FieldTower, seed: u64) -> Result<MatrixGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oct = OctonionAlgebra::standard();
    let base = g2_base_automorphisms(t)?;
    for _ in 0..32 {
        let k = rng.gen_range(1..=3);
        let mut gens = Vec::new();
        for _ in 0..k {
            let len = rng.gen_range(1..=3);
            let mut w = Matrix::identity(t, 8);
            for _ in 0..len {
                w = w.mul(base.choose(&mut rng).expect("nonempty"));
            }
            if w.is_identity() {
                continue;
            }
            let lift = oct.g2_spin_lift(&w)?;
            if oct.spin_rep(&lift.gamma)?.mul_vec(&crate::octonion::Octonion::unit(t).into_coords())
                != crate::octonion::Octonion::unit(t).into_coords()
            {
                return Err(Error::ConstructionVerificationFailed("lift does not fix e".into()));
            }
            gens.push(lift.pure_action.lift_to(t)?);
        }
        if !gens.is_empty() {
            return group_from(t, gens);
        }
    }
    Err(Error::SearchExhausted(format!("no nontrivial word for seed {seed}")))
}

/// A signed permutation of e₁..e₇: entry i is ±(k+1) when eᵢ ↦ ±e_k.
pub type SignedPerm = [i8; 7];

/// The integral Cayley octonions over `t`: a basis e, x₁..x₇ of the split
/// model with xᵢ² = −1, x₃ = x₁x₂, x₅ = x₁x₄, x₆ = x₂x₄, x₇ = x₃x₄, and
/// the multiplication table xᵢxⱼ = s·x_k.
#[derive(Clone, Debug)]
pub struct CayleyFrame {
    /// Columns e, x₁..x₇ in the coordinates of C.
    pub basis: Matrix,
    pub table: [[(i8, usize); 7]; 7],
}

fn unit_pure(oct: &OctonionAlgebra, t: &FieldTower, rng: &mut ChaCha8Rng, prev: &[Vector]) -> Result<Vector> {
    for _ in 0..500 {
        let p: Vector = (0..7).map(|_| t.from_int(rng.gen_range(-2i64..=2))).collect();
        let mut w = oct.pure_to_octonion(&p).into_coords();
        for x in prev {
            let xo = Octonion::from_coords(x.clone());
            let c = oct.beta(&Octonion::from_coords(w.clone()), &xo).div_int(&2.into());
            w = w.iter().zip(x).map(|(a, b)| a - &(&c * b)).collect();
        }
        let q = oct.q(&Octonion::from_coords(w.clone()));
        if q.is_zero() {
            continue;
        }
        if let Some(r) = crate::scalars::try_sqrt(&q) {
            let ri = r.inv()?;
            return Ok(w.iter().map(|a| a * &ri).collect());
        }
    }
    Err(Error::SearchExhausted("no unit pure octonion in this field".into()))
}

pub fn cayley_frame(t: &FieldTower) -> Result<CayleyFrame> {
    let oct = OctonionAlgebra::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mul = |a: &Vector, b: &Vector| oct.mul(&Octonion::from_coords(a.clone()), &Octonion::from_coords(b.clone())).into_coords();
    let x1 = unit_pure(oct, t, &mut rng, &[])?;
    let x2 = unit_pure(oct, t, &mut rng, std::slice::from_ref(&x1))?;
    let x3 = mul(&x1, &x2);
    let x4 = unit_pure(oct, t, &mut rng, &[x1.clone(), x2.clone(), x3.clone()])?;
    let xs = [x1.clone(), x2.clone(), x3.clone(), x4.clone(), mul(&x1, &x4), mul(&x2, &x4), mul(&x3, &x4)];
    let mut cols = vec![Octonion::unit(t).into_coords()];
    cols.extend(xs.iter().cloned());
    let basis = Matrix::from_columns(t, &cols);
    let inv = basis.inverse()?;
    let mut table = [[(0i8, 0usize); 7]; 7];
    for i in 0..7 {
        for j in 0..7 {
            let c = inv.mul_vec(&mul(&xs[i], &xs[j]));
            let nz: Vec<usize> = (0..8).filter(|&k| !c[k].is_zero()).collect();
            let ok = nz.len() == 1 && (c[nz[0]].is_one() || (-&c[nz[0]]).is_one());
            if !ok || (i == j) != (nz[0] == 0) {
                return Err(Error::ConstructionVerificationFailed("not a Cayley frame".into()));
            }
            let s = if c[nz[0]].is_one() { 1 } else { -1 };
            table[i][j] = (s, nz[0].wrapping_sub(1));
        }
    }
    Ok(CayleyFrame { basis, table })
}

impl CayleyFrame {
    /// ±xᵢ · ±xⱼ as a signed index, for i ≠ j.
    fn times(&self, a: i8, b: i8) -> i8 {
        let (i, j) = (a.unsigned_abs() as usize - 1, b.unsigned_abs() as usize - 1);
        let (s, k) = self.table[i][j];
        s * a.signum() * b.signum() * (k as i8 + 1)
    }

    /// All 1344 automorphisms permuting ±x₁..±x₇: free choices of the
    /// images of x₁, x₂ and x₄.
    pub fn automorphisms(&self) -> Vec<SignedPerm> {
        let mut out = Vec::new();
        let signed = |k: usize, s: bool| if s { -(k as i8 + 1) } else { k as i8 + 1 };
        for a in 0..7 {
            for b in (0..7).filter(|&b| b != a) {
                for c in 0..7 {
                    for signs in 0..8u32 {
                        let f1 = signed(a, signs & 1 == 1);
                        let f2 = signed(b, signs & 2 == 2);
                        let f3 = self.times(f1, f2);
                        if c == a || c == b || c == f3.unsigned_abs() as usize - 1 {
                            continue;
                        }
                        let f4 = signed(c, signs & 4 == 4);
                        let f = [f1, f2, f3, f4, self.times(f1, f4), self.times(f2, f4), self.times(f3, f4)];
                        if self.is_automorphism(&f) {
                            out.push(f);
                        }
                    }
                }
            }
        }
        out
    }

    fn is_automorphism(&self, f: &SignedPerm) -> bool {
        (0..7).all(|i| {
            (0..7).all(|j| {
                if i == j {
                    return true;
                }
                let (s, k) = self.table[i][j];
                let lhs = s * f[k];
                lhs == self.times(f[i], f[j])
            })
        })
    }

    /// The action on P in the pure basis, which lies in SO(E₇).
    pub fn pure_matrix(&self, f: &SignedPerm) -> Result<Matrix> {
        let t = self.basis.tower().clone();
        let mut s = Matrix::zeros(&t, 8, 8);
        s.set(0, 0, t.one());
        for (i, &fi) in f.iter().enumerate() {
            let k = fi.unsigned_abs() as usize;
            s.set(k, i + 1, t.from_int(fi.signum() as i64));
        }
        let m = self.basis.mul(&s).mul(&self.basis.inverse()?);
        OctonionAlgebra::standard()
            .restrict_to_pure(&m)
            .ok_or_else(|| Error::ConstructionVerificationFailed("Cayley automorphism moves e".into()))
    }
}

pub fn compose(f: &SignedPerm, g: &SignedPerm) -> SignedPerm {
    let mut h = [0i8; 7];
    for i in 0..7 {
        let gi = g[i];
        let fi = f[gi.unsigned_abs() as usize - 1];
        h[i] = fi * gi.signum();
    }
    h
}

fn perm_closure(gens: &[SignedPerm], cap: usize) -> Option<usize> {
    let id: SignedPerm = [1, 2, 3, 4, 5, 6, 7];
    let mut seen = std::collections::HashSet::from([id]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose(g, &x);
            if seen.insert(y) {
                if seen.len() > cap {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    Some(seen.len())
}

/// Seeded subgroups of the automorphism group 2³·GL₃(𝔽₂) of the integral
/// Cayley octonions, kept when their exponent divides the conductor of `t`.
pub fn fuzz_cayley_subgroups(t: &FieldTower, seed: u64, count: usize) -> Result<Vec<MatrixGroup>> {
    let frame = cayley_frame(t)?;
    let auts = frame.automorphisms();
    if auts.len() != 1344 {
        return Err(Error::ConstructionVerificationFailed(format!("found {} Cayley automorphisms", auts.len())));
    }
    let id: SignedPerm = [1, 2, 3, 4, 5, 6, 7];
    let involutions: Vec<SignedPerm> = auts.iter().copied().filter(|f| *f != id && compose(f, f) == id).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = t.conductor() as usize;
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 100 * (count + 1) {
            return Err(Error::SearchExhausted("Cayley subgroups".into()));
        }
        let k = rng.gen_range(1..=3);
        let pool = if rng.gen_bool(0.5) { &involutions } else { &auts };
        let gens: Vec<SignedPerm> = (0..k).map(|_| *pool.choose(&mut rng).expect("nonempty")).collect();
        match perm_closure(&gens, 1344) {
            Some(n) if n > 1 && (n % 7 != 0 || m.is_multiple_of(7)) => {}
            _ => continue,
        }
        let mats = gens.iter().map(|f| frame.pure_matrix(f)).collect::<Result<Vec<_>>>()?;
        out.push(group_from(t, mats)?);
    }
    Ok(out)
}

/// Every named group with the case the classifier must report.
pub fn gallery(t: &FieldTower) -> Result<Vec<(String, MatrixGroup, Case)>> {
    let mut out = Vec::new();
    out.push(("alpha".to_string(), build_alpha(t)?, Case::CZ4xZ2));
    out.push(("beta-gl".to_string(), build_beta(t, BetaVariant::Gl)?, Case::BGl2OrSl2));
    out.push(("beta-sl".to_string(), build_beta(t, BetaVariant::Sl)?, Case::BGl2OrSl2));
    for name in GAMMA_PRESETS {
        let b = build_gamma(&gamma_preset(t, name)?)?;
        out.push((format!("gamma-{name}"), b.group, b.predicted));
    }
    for (n1, n2) in [(2, 2), (3, 1), (4, 2), (5, 3)] {
        let tt = torus_tower(t, n1, n2);
        out.push((format!("torus-{n1}-{n2}"), build_torus_subgroup(&tt, n1, n2)?, Case::AContained));
    }
    for seed in 0..3 {
        out.push((format!("g2sample-{seed}"), build_g2_finite_sample(t, seed)?, Case::AContained));
    }
    Ok(out)
}

/// `t` if its conductor already covers the torus orders, else the
/// smallest cyclotomic field that does.
pub fn torus_tower(t: &FieldTower, n1: u64, n2: u64) -> FieldTower {
    let need = num_integer::lcm(n1, n2);
    if t.conductor().is_multiple_of(need) {
        t.clone()
    } else {
        FieldTower::cyclotomic(num_integer::lcm(need, 4))
    }
}

/// A proper rational isometry of E₇: the product of two reflections in
/// random anisotropic integer vectors.
pub fn random_rational_rotation(t: &FieldTower, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let e = QuadSpace::e7(t);
    let mut refl = Vec::new();
    while refl.len() < 2 {
        let v: Vector = (0..7).map(|_| t.from_int(rng.gen_range(-2i64..=2))).collect();
        if e.q(&v).is_zero() {
            continue;
        }
        refl.push(e.reflection(&v)?);
    }
    Ok(refl[0].mul(&refl[1]))
}

/// A subgroup generated by one or two random elements of `g`, optionally
/// conjugated by a rational rotation.
pub fn random_subgroup(g: &MatrixGroup, rng: &mut ChaCha8Rng, conjugate: bool) -> Result<MatrixGroup> {
    let tab = g.table()?;
    let k = rng.gen_range(1..=2);
    let mut gens: Vec<Matrix> = (0..k).map(|_| tab.element(rng.gen_range(0..tab.len())).clone()).collect();
    if conjugate {
        let h = random_rational_rotation(g.tower(), rng)?;
        let hi = h.inverse()?;
        gens = gens.iter().map(|x| h.mul(x).mul(&hi)).collect();
    }
    group_from(g.tower(), gens)
}

/// Seeded subgroups of gallery groups (all element-wise of type G₂).
pub fn fuzz_g2_subgroups(t: &FieldTower, seed: u64, count: usize) -> Result<Vec<MatrixGroup>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<MatrixGroup> = gallery(t)?.into_iter().map(|(_, g, _)| g).collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = pool.choose(&mut rng).expect("nonempty gallery");
        let conj = rng.gen_bool(0.3);
        out.push(random_subgroup(g, &mut rng, conj)?);
    }
    Ok(out)
}

/// Seeded diagonal groups in the standard torus of SO(E₇) whose eigenvalue
/// pattern need not be of type G₂.
pub fn fuzz_diagonal_groups(t: &FieldTower, seed: u64, count: usize) -> Result<Vec<MatrixGroup>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = t.conductor() as i64;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(1..=2);
        let mut gens = Vec::new();
        for _ in 0..k {
            let mut d = Vec::with_capacity(7);
            for _ in 0..3 {
                let e = [0, m / 2, m / 4, m / 3, m / 6, m / 8].choose(&mut rng).copied().unwrap_or(0);
                let x = t.zeta_pow(e);
                d.push(x.clone());
                d.push(x.inv()?);
            }
            d.push(t.one());
            gens.push(Matrix::diagonal(t, &d));
        }
        out.push(group_from(t, gens)?);
    }
    Ok(out)
}
