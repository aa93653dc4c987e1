//! Decision procedures: the type-G₂ polynomial test, the element-wise test,
//! G₂-containment at the Spin and SO levels, and the classifier for finite
//! subgroups of SO(E₇) with characteristic polynomials of type G₂.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::clifford::{spin_lift, CliffordElement};
use crate::grouprep::{
    dual_component, isotypic_split, multiplicity, order2_linear_characters, sign_character,
    witt_index, GroupTable, IsotypicDatum, MatrixGroup, PowerCharacters, Representation,
};
use crate::octonion::OctonionAlgebra;
use crate::quadspace::Vector;
use crate::scalars::{resultant, roots_in_tower, try_sqrt, FieldTower, Matrix, Poly, Scalar, ScalarError};
use crate::{Error, Result};

/// Outcome of the type-G₂ polynomial test.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeG2Verdict {
    pub is_type_g2: bool,
    /// (a, b, c) with t⁻³P(t) = (t−1)(s³ − a s² + b s − c), s = t + t⁻¹.
    pub abc: Option<(Scalar, Scalar, Scalar)>,
    pub reason: Option<String>,
}

/// Decides whether a monic degree-7 polynomial has roots
/// {1, x, y, xy, x⁻¹, y⁻¹, (xy)⁻¹} for some x, y.
pub fn poly_is_type_g2(p: &Poly) -> Result<TypeG2Verdict> {
    if p.degree() != Some(7) || !p.is_monic() {
        return Err(Error::NotMonicDegree7);
    }
    for i in 0..=7 {
        if p.coeff(7 - i) != -p.coeff(i) {
            return Ok(TypeG2Verdict {
                is_type_g2: false,
                abc: None,
                reason: Some(format!("not antipalindromic at degree {i}")),
            });
        }
    }
    let t = p.tower().clone();
    let (r, rem) = p.divrem(&Poly::linear(&t.one()))?;
    debug_assert!(rem.is_zero());
    let (r5, r4, r3) = (r.coeff(5), r.coeff(4), r.coeff(3));
    let a = -&r5;
    let b = &r4 - &t.from_int(3);
    let c = &r5.mul_int(&2.into()) - &r3;
    let lhs = &a * &a;
    let rhs = &(&b.mul_int(&2.into()) + &c) + &t.from_int(4);
    let ok = lhs == rhs;
    Ok(TypeG2Verdict {
        is_type_g2: ok,
        reason: (!ok).then(|| "a² ≠ 2b + c + 4".to_string()),
        abc: Some((a, b, c)),
    })
}

pub fn is_type_g2(p: &Poly) -> Result<bool> {
    Ok(poly_is_type_g2(p)?.is_type_g2)
}

/// Laurent polynomials in two variables over ℚ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent2(BTreeMap<(i64, i64), BigRational>);

impl Laurent2 {
    pub fn constant(c: i64) -> Laurent2 {
        Laurent2::monomial(0, 0, c)
    }

    pub fn monomial(i: i64, j: i64, c: i64) -> Laurent2 {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert((i, j), BigRational::from_integer(c.into()));
        }
        Laurent2(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Laurent2) -> Laurent2 {
        let mut m = self.0.clone();
        for (k, v) in &o.0 {
            let e = m.entry(*k).or_insert_with(BigRational::zero);
            *e += v;
            if e.is_zero() {
                m.remove(k);
            }
        }
        Laurent2(m)
    }

    pub fn scale(&self, c: i64) -> Laurent2 {
        if c == 0 {
            return Laurent2::default();
        }
        let c = BigRational::from_integer(c.into());
        Laurent2(self.0.iter().map(|(k, v)| (*k, v * &c)).collect())
    }

    pub fn sub(&self, o: &Laurent2) -> Laurent2 {
        self.add(&o.scale(-1))
    }

    pub fn mul(&self, o: &Laurent2) -> Laurent2 {
        let mut out = Laurent2::default();
        for ((i, j), v) in &self.0 {
            for ((k, l), w) in &o.0 {
                let mut m = BTreeMap::new();
                m.insert((i + k, j + l), v * w);
                out = out.add(&Laurent2(m));
            }
        }
        out
    }
}

/// Builds ∏(t − r) over the seven generic roots, extracts (a, b, c) and
/// checks a² − 2b − c − 4 = 0 as a Laurent polynomial identity.
pub fn type_g2_symbolic_equivalence_check() -> bool {
    let roots = [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)];
    let mut p = vec![Laurent2::constant(1)];
    for (i, j) in roots {
        let r = Laurent2::monomial(i, j, 1);
        let mut next = vec![Laurent2::default(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&c.mul(&r));
        }
        p = next;
    }
    let anti = (0..=7).all(|i| p[7 - i].add(&p[i]).is_zero());
    // divide by t − 1
    let mut r = vec![Laurent2::default(); 7];
    r[6] = p[7].clone();
    for k in (1..7).rev() {
        r[k - 1] = p[k].add(&r[k]);
    }
    let a = r[5].scale(-1);
    let b = r[4].sub(&Laurent2::constant(3));
    let c = r[5].scale(2).sub(&r[3]);
    let d = a.mul(&a).sub(&b.scale(2)).sub(&c).sub(&Laurent2::constant(4));
    anti && d.is_zero()
}

/// Charpoly test on every element, once per conjugacy class.
pub fn elementwise_type_g2(table: &GroupTable) -> Result<(bool, Option<usize>)> {
    for class in table.conjugacy_classes() {
        let g = class[0];
        let cp = table.element(g).charpoly()?;
        if !is_type_g2(&cp)? {
            return Ok((false, Some(g)));
        }
    }
    Ok((true, None))
}

/// The preimage of G in Spin(P), acting on W₀.
#[derive(Clone, Debug)]
pub struct SpinPreimage {
    pub group: MatrixGroup,
    /// Spin lifts of the generators of G, in the final tower.
    pub lifts: Vec<CliffordElement>,
    /// π, indexed like the table of `group`.
    pub pi: Representation,
    pub extensions: Vec<Scalar>,
}

impl SpinPreimage {
    pub fn tower(&self) -> &FieldTower {
        self.group.tower()
    }
}

pub fn spin_preimage(g: &MatrixGroup) -> Result<SpinPreimage> {
    let oct = OctonionAlgebra::standard();
    let mut alg = oct.clifford_p().lift_to(g.tower())?;
    let mut lifts: Vec<CliffordElement> = Vec::new();
    let mut extensions = Vec::new();
    for m in g.generators() {
        let m = m.lift_to(alg.tower())?;
        let l = spin_lift(&alg, &m)?;
        if let Some(e) = l.extension.clone() {
            extensions.push(e);
            alg = l.algebra().clone();
            lifts = lifts.iter().map(|x| x.lift_to(&alg)).collect::<Result<_>>()?;
        }
        lifts.push(l.gamma);
    }
    let t = alg.tower().clone();
    let mut gens = Vec::with_capacity(lifts.len() + 1);
    for l in &lifts {
        gens.push(oct.spin_rep(l)?);
    }
    gens.push(Matrix::identity(&t, 8).neg());
    let group = MatrixGroup::new(&t, 8, gens)?.with_cap(2 * g.cap());
    let table = group.table()?;
    let mut pi_gens: Vec<Matrix> = g.generators().iter().map(|x| x.lift_to(&t)).collect::<std::result::Result<_, _>>()?;
    pi_gens.push(Matrix::identity(&t, g.dim()));
    let pi = Representation::from_generator_images(table, &pi_gens)?;
    let gt = g.table()?;
    if table.len() != 2 * gt.len() {
        return Err(Error::EquivalenceViolation(format!(
            "preimage has order {} for a group of order {}",
            table.len(),
            gt.len()
        )));
    }
    let targets: HashSet<Matrix> = gt.elements().iter().map(|x| x.lift_to(&t)).collect::<std::result::Result<_, _>>()?;
    let images: HashSet<&Matrix> = pi.images().iter().collect();
    if images.len() != targets.len() || pi.images().iter().any(|x| !targets.contains(x)) {
        return Err(Error::EquivalenceViolation("π does not map the preimage onto G".into()));
    }
    Ok(SpinPreimage { group, lifts, pi, extensions })
}

/// Both routes for Δ ⊂ Spin(P) given by its matrices on W₀.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinContainment {
    pub contained: bool,
    /// A common anisotropic fixed spinor.
    pub witness: Option<Vector>,
    /// Index into the eigenvalue-tested elements of one without eigenvalue 1.
    pub failing: Option<usize>,
}

/// Route 1: every element has eigenvalue 1 on W₀. Route 2: a common
/// anisotropic fixed spinor. The two must agree.
pub fn contained_in_g2_spin(delta: &[Matrix]) -> Result<SpinContainment> {
    contained_in_g2_spin_split(delta, delta)
}

/// Same two routes, with the eigenvalue test run on `class_reps` (one
/// element per conjugacy class) and the fixed spinor sought for `generators`.
pub fn contained_in_g2_spin_split(class_reps: &[Matrix], generators: &[Matrix]) -> Result<SpinContainment> {
    let mut failing = None;
    for (i, m) in class_reps.iter().enumerate() {
        let id = Matrix::identity(m.tower(), m.rows());
        if !m.sub(&id).det()?.is_zero() {
            failing = Some(i);
            break;
        }
    }
    let witness = OctonionAlgebra::standard().fixed_anisotropic_spinor(generators);
    let route1 = failing.is_none();
    if route1 != witness.is_some() {
        return Err(Error::EquivalenceViolation(format!(
            "eigenvalue route says {route1}, fixed spinor route says {}",
            witness.is_some()
        )));
    }
    Ok(SpinContainment { contained: route1, witness, failing })
}

#[derive(Clone, Debug)]
pub struct SoContainment {
    pub contained: bool,
    /// β: Γ̃ → {±1} occurring in W₀, indexed like the preimage table.
    pub beta: Option<Vec<i8>>,
    pub spinor: Option<Vector>,
    pub preimage: SpinPreimage,
}

pub fn contained_in_g2_so(g: &MatrixGroup) -> Result<SoContainment> {
    let pre = spin_preimage(g)?;
    let table = pre.group.table()?;
    let t = pre.tower().clone();
    let chi_w = Representation::natural(table).character();
    for beta in order2_linear_characters(table) {
        let b = sign_character(&t, &beta);
        if multiplicity(table, &b, &chi_w)? == 0 {
            continue;
        }
        let twist = |i: usize| if beta[i] < 0 { table.element(i).neg() } else { table.element(i).clone() };
        let reps: Vec<Matrix> = table.conjugacy_classes().iter().map(|c| twist(c[0])).collect();
        let gens: Vec<Matrix> = (0..table.num_generators()).map(|k| twist(table.generator_index(k))).collect();
        let sc = contained_in_g2_spin_split(&reps, &gens)?;
        if !sc.contained {
            return Err(Error::EquivalenceViolation("β occurs in W but the twisted group has no fixed spinor".into()));
        }
        return Ok(SoContainment { contained: true, beta: Some(beta), spinor: sc.witness, preimage: pre });
    }
    Ok(SoContainment { contained: false, beta: None, spinor: None, preimage: pre })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    AContained,
    BGl2OrSl2,
    CZ4xZ2,
    DO2pm,
}

impl Case {
    pub fn as_str(&self) -> &'static str {
        match self {
            Case::AContained => "A_contained",
            Case::BGl2OrSl2 => "B_gl2_or_sl2",
            Case::CZ4xZ2 => "C_z4xz2",
            Case::DO2pm => "D_o2pm",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Component indices into the isotypic split of E.
#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    None,
    Contained { beta: Vec<i8>, spinor: Option<Vector> },
    SlPattern { order: usize, j: usize, trivial: usize, cubic: (usize, usize) },
    GlPattern { order: usize, p: usize, p_dual: usize, h: usize, c: usize },
    Z4xZ2 { order_statistics: BTreeMap<u64, usize>, characters: Vec<usize> },
    JPattern { j: usize, c: usize, trivial: usize, c_in_sym2: u64, side: SideConditions },
    PPattern { assignments: Vec<(usize, usize, usize, usize)>, side: SideConditions },
}

/// The O₂^± side conditions: nonabelian, not dihedral of order 8, and the
/// similitude character c is nontrivial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideConditions {
    pub nonabelian: bool,
    pub not_d8: bool,
    pub similitude_nontrivial: bool,
}

impl SideConditions {
    pub fn hold(&self) -> bool {
        self.nonabelian && self.not_d8 && self.similitude_nontrivial
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub order: usize,
    pub elementwise_g2: bool,
    pub failing_element: Option<usize>,
    pub witt_index: Option<usize>,
    pub case: Option<Case>,
    pub evidence: Evidence,
    /// Isotypic data of E, when it was computed.
    pub components: Vec<IsotypicDatum>,
    pub tower_extensions: Vec<String>,
}

/// Lifts G to a cyclotomic tower containing its exponent's roots of unity.
pub fn split_tower_group(g: &MatrixGroup, log: &mut Vec<String>) -> Result<MatrixGroup> {
    let e = g.table()?.exponent();
    let m = g.tower().conductor();
    if m.is_multiple_of(e) {
        return Ok(g.clone());
    }
    if g.tower().depth() > 0 {
        return Err(Error::ExponentNotDividingConductor { exponent: e, conductor: m });
    }
    let m2 = num_integer::lcm(m, e);
    log.push(format!("cyclotomic conductor {m} raised to {m2}"));
    g.lift_to(&FieldTower::cyclotomic(m2))
}

/// Runs the full decision: element-wise test, containment, then the
/// exceptional patterns by Witt index.
pub fn classify(g: &MatrixGroup) -> Result<ClassificationReport> {
    let table = g.table()?;
    let mut report = ClassificationReport {
        order: table.len(),
        elementwise_g2: false,
        failing_element: None,
        witt_index: None,
        case: None,
        evidence: Evidence::None,
        components: Vec::new(),
        tower_extensions: Vec::new(),
    };
    let (ok, fail) = elementwise_type_g2(table)?;
    report.elementwise_g2 = ok;
    report.failing_element = fail;
    if !ok {
        return Ok(report);
    }
    let g = split_tower_group(g, &mut report.tower_extensions)?;
    let table = g.table()?;
    let rep = Representation::natural(table);
    let split = isotypic_split(table, &rep)?;
    let w = witt_index(&split);
    report.witt_index = Some(w);
    let so = contained_in_g2_so(&g)?;
    for e in &so.preimage.extensions {
        report.tower_extensions.push(format!("adjoined sqrt({e}) for spin lifts"));
    }
    report.components = split.clone();
    if so.contained {
        report.case = Some(Case::AContained);
        report.evidence = Evidence::Contained { beta: so.beta.unwrap_or_default(), spinor: so.spinor };
        return Ok(report);
    }
    let found = match w {
        3 => witt3_patterns(table, &split)?,
        2 => witt2_patterns(table, &split)?,
        _ => None,
    };
    match found {
        Some((case, ev)) => {
            report.case = Some(case);
            report.evidence = ev;
            Ok(report)
        }
        None => Err(Error::TheoremViolation(format!(
            "group of order {} with Witt index {w} is not contained in G₂ and matches no exceptional pattern",
            table.len()
        ))),
    }
}

fn is_trivial(chi: &[Scalar]) -> bool {
    chi.iter().all(|x| x.is_one())
}

fn is_order2_linear(chi: &[Scalar]) -> bool {
    let t = chi[0].tower();
    let m1 = t.from_int(-1);
    chi.iter().all(|x| x.is_one() || *x == m1) && chi.contains(&m1)
}

fn det2(table: &GroupTable, chi: &[Scalar]) -> Vec<Scalar> {
    (0..table.len())
        .map(|i| (&(&chi[i] * &chi[i]) - &chi[table.power(i, 2)]).div_int(&2.into()))
        .collect()
}

fn twist_invariant(chi: &[Scalar], lin: &[Scalar]) -> bool {
    chi.iter().zip(lin).all(|(a, b)| &(a * b) == a)
}

fn is_d8(table: &GroupTable) -> bool {
    let st = table.order_statistics();
    table.len() == 8 && st.get(&2) == Some(&5) && st.get(&4) == Some(&2)
}

fn side_conditions(table: &GroupTable, c: &[Scalar]) -> SideConditions {
    SideConditions {
        nonabelian: !table.is_abelian(),
        not_d8: !is_d8(table),
        similitude_nontrivial: is_order2_linear(c),
    }
}

fn stats(pairs: &[(u64, usize)]) -> BTreeMap<u64, usize> {
    pairs.iter().copied().collect()
}

fn witt3_patterns(
    table: &GroupTable,
    split: &[IsotypicDatum],
) -> Result<Option<(Case, Evidence)>> {
    let irr: Vec<Vec<Scalar>> = split.iter().map(|c| c.irreducible_character()).collect();
    let shape: Vec<(usize, usize, bool)> = split.iter().map(|c| (c.dim, c.multiplicity, c.selfdual)).collect();
    let find = |d: usize, m: usize, sd: bool, skip: &[usize]| {
        (0..split.len()).find(|&i| !skip.contains(&i) && shape[i] == (d, m, sd))
    };
    // 1 + 2c + 2J
    if split.len() == 3 {
        if let (Some(j), Some(c)) = (find(2, 2, true, &[]), find(1, 2, true, &[])) {
            let trivial = (0..3).find(|&i| i != j && i != c).expect("three components");
            let t_ok = shape[trivial] == (1, 1, true) && is_trivial(&irr[trivial]);
            let cj = &irr[c];
            let jj = &irr[j];
            let det_ok = det2(table, jj).iter().all(|x| x.is_one());
            if t_ok && is_order2_linear(cj) && twist_invariant(jj, cj) && det_ok {
                let jpc = PowerCharacters {
                    chi: jj.clone(),
                    chi2: (0..table.len()).map(|i| jj[table.power(i, 2)].clone()).collect(),
                    chi3: (0..table.len()).map(|i| jj[table.power(i, 3)].clone()).collect(),
                };
                let c_in_sym2 = multiplicity(table, cj, &jpc.sym2())?;
                let side = side_conditions(table, cj);
                if c_in_sym2 > 0 && side.hold() {
                    return Ok(Some((Case::DO2pm, Evidence::JPattern { j, c, trivial, c_in_sym2, side })));
                }
            }
        }
    }
    // 2J + 1 + c + c⁻¹ for SL₂(𝔽₃)
    let sl_stats = stats(&[(1, 1), (2, 1), (3, 8), (4, 6), (6, 8)]);
    if split.len() == 4 && table.len() == 24 && table.order_statistics() == sl_stats {
        if let Some(j) = find(2, 2, true, &[]) {
            let trivial = (0..4).find(|&i| shape[i] == (1, 1, true) && is_trivial(&irr[i]));
            let cubic: Vec<usize> = (0..4).filter(|&i| shape[i] == (1, 1, false)).collect();
            let det_ok = det2(table, &irr[j]).iter().all(|x| x.is_one());
            if let (Some(trivial), [c1, c2]) = (trivial, cubic.as_slice()) {
                let order3 = irr[*c1].iter().all(|x| x.pow(3).is_one());
                if det_ok && order3 && dual_component(table, split, *c1) == Some(*c2) {
                    return Ok(Some((
                        Case::BGl2OrSl2,
                        Evidence::SlPattern { order: 24, j, trivial, cubic: (*c1, *c2) },
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn witt2_patterns(table: &GroupTable, split: &[IsotypicDatum]) -> Result<Option<(Case, Evidence)>> {
    let irr: Vec<Vec<Scalar>> = split.iter().map(|c| c.irreducible_character()).collect();
    let shape: Vec<(usize, usize, bool)> = split.iter().map(|c| (c.dim, c.multiplicity, c.selfdual)).collect();
    // seven nontrivial characters of Z/4 × Z/2
    let z4z2 = stats(&[(1, 1), (2, 3), (4, 4)]);
    if table.len() == 8
        && table.is_abelian()
        && table.order_statistics() == z4z2
        && split.len() == 7
        && shape.iter().all(|s| s.0 == 1 && s.1 == 1)
        && irr.iter().all(|c| !is_trivial(c))
    {
        return Ok(Some((
            Case::CZ4xZ2,
            Evidence::Z4xZ2 { order_statistics: table.order_statistics(), characters: (0..7).collect() },
        )));
    }
    let twos: Vec<usize> = (0..split.len()).filter(|&i| shape[i] == (2, 1, false)).collect();
    // P + P* + c + ε + cε
    if split.len() == 5 && twos.len() == 2 {
        let lin: Vec<usize> = (0..5).filter(|&i| shape[i] == (1, 1, true) && is_order2_linear(&irr[i])).collect();
        if lin.len() == 3 {
            let mut assignments = Vec::new();
            for &p in &twos {
                let pd = *twos.iter().find(|&&x| x != p).expect("two");
                let det = det2(table, &irr[p]);
                for &c in &lin {
                    if det != irr[c] {
                        continue;
                    }
                    for &e in &lin {
                        if e == c || !twist_invariant(&irr[p], &irr[e]) {
                            continue;
                        }
                        let ce = *lin.iter().find(|&&x| x != c && x != e).expect("three");
                        let prod: Vec<Scalar> = irr[c].iter().zip(&irr[e]).map(|(a, b)| a * b).collect();
                        if prod == irr[ce] && dual_component(table, split, p) == Some(pd) {
                            assignments.push((p, pd, c, e));
                        }
                    }
                }
            }
            if let Some(&(_, _, c, _)) = assignments.first() {
                let side = side_conditions(table, &irr[c]);
                if side.hold() {
                    return Ok(Some((Case::DO2pm, Evidence::PPattern { assignments, side })));
                }
            }
        }
    }
    // P + P* + c + H for GL₂(𝔽₃)
    let gl_stats = stats(&[(1, 1), (2, 13), (3, 8), (4, 6), (6, 8), (8, 12)]);
    if split.len() == 4 && table.len() == 48 && table.order_statistics() == gl_stats && twos.len() == 2 {
        let h = (0..4).find(|&i| shape[i] == (2, 1, true));
        let c = (0..4).find(|&i| shape[i] == (1, 1, true) && is_order2_linear(&irr[i]));
        if let (Some(h), Some(c)) = (h, c) {
            if dual_component(table, split, twos[0]) == Some(twos[1]) {
                return Ok(Some((
                    Case::BGl2OrSl2,
                    Evidence::GlPattern { order: 48, p: twos[0], p_dual: twos[1], h, c },
                )));
            }
        }
    }
    Ok(None)
}

/// The spinor eigenvalue criterion for γ ∈ GSpin(P): π(γ) is of type G₂ iff
/// ρ(γ) has an eigenvalue λ with λ² = ν(γ), and then
/// det(t − λ⁻¹ρ(γ)) = (t − 1)·det(t − π(γ)).
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorEigenCheck {
    pub pi_type_g2: bool,
    pub has_root_of_nu: bool,
    pub lambda: Option<Scalar>,
    /// Whether the factorization holds, when λ was found in the tower.
    pub factorization: Option<bool>,
}

pub fn spinor_eigen_check(gamma: &CliffordElement) -> Result<SpinorEigenCheck> {
    let oct = OctonionAlgebra::standard();
    let rho = oct.spin_rep(gamma)?;
    let nu = gamma.nu()?;
    let pi = gamma.pi_action()?;
    let cp_pi = pi.charpoly()?;
    let pi_type_g2 = is_type_g2(&cp_pi)?;
    let cp = rho.charpoly()?;
    let direct = try_sqrt(&nu).and_then(|r| [-&r, r].into_iter().find(|l| cp.eval(l).is_zero()));
    let (roots, complete) = match direct {
        Some(l) => (vec![(l, 1)], true),
        None => match roots_in_tower(&cp) {
            Ok(r) => (r, true),
            Err(ScalarError::IncompleteSplit { roots, .. }) => (roots, false),
            Err(e) => return Err(e.into()),
        },
    };
    let lambda = roots.into_iter().map(|(r, _)| r).find(|r| (r * r) == nu);
    let has_root_of_nu = match (&lambda, complete) {
        (Some(_), _) => true,
        (None, true) => false,
        (None, false) => {
            let t = cp.tower().clone();
            let q = Poly::new(&t, vec![-&nu, t.zero(), t.one()]);
            resultant(&cp, &q)?.is_zero()
        }
    };
    let factorization = match &lambda {
        Some(l) => {
            let scaled = rho.scale(&l.inv()?);
            let lhs = scaled.charpoly()?;
            let rhs = Poly::linear(&l.tower().one()).mul(&cp_pi.lift_to(l.tower())?);
            Some(lhs == rhs)
        }
        None => None,
    };
    Ok(SpinorEigenCheck { pi_type_g2, has_root_of_nu, lambda, factorization })
}

/// χ_{Sym²W}(γ)ν⁻¹ = 1 + χ_{Λ³E}(π(γ)) and χ_{Λ²W}(γ)ν⁻¹ = χ_{Λ²(1⊕E)}(π(γ)).
pub fn spinor_square_identities(gamma: &CliffordElement) -> Result<(bool, bool)> {
    let oct = OctonionAlgebra::standard();
    let rho = oct.spin_rep(gamma)?;
    let nu_inv = gamma.nu()?.inv()?;
    let pi = gamma.pi_action()?;
    let (w1, w2) = (rho.trace(), rho.mul(&rho).trace());
    let pi2 = pi.mul(&pi);
    let (e1, e2, e3) = (pi.trace(), pi2.trace(), pi2.mul(&pi).trace());
    let pcw = PowerCharacters { chi: vec![w1], chi2: vec![w2], chi3: vec![gamma.algebra().tower().zero()] };
    let pce = PowerCharacters { chi: vec![e1.clone()], chi2: vec![e2.clone()], chi3: vec![e3] };
    let one = e1.tower().one();
    let pc1e = PowerCharacters { chi: vec![&e1 + &one], chi2: vec![&e2 + &one], chi3: vec![one.clone()] };
    let sym = &pcw.sym2()[0] * &nu_inv == &one + &pce.lambda3()[0];
    let alt = &pcw.lambda2()[0] * &nu_inv == pc1e.lambda2()[0];
    Ok((sym, alt))
}

/// Element of the standard torus of Spin(P):
/// x₀ ∏ (x_i u_i(−v_i) + x_i⁻¹ (−v_i)u_i), with u_i, v_i the hyperbolic pairs.
pub fn torus_element(t: &FieldTower, x: [&Scalar; 4]) -> Result<CliffordElement> {
    let oct = OctonionAlgebra::standard();
    let alg = oct.clifford_p().lift_to(t)?;
    let mut g = alg.scalar(x[0]);
    for i in 0..3 {
        let mut e = vec![t.zero(); 7];
        e[2 * i] = t.one();
        let mut f = vec![t.zero(); 7];
        f[2 * i + 1] = t.from_int(-1);
        let (ev, fv) = (alg.vector(&e), alg.vector(&f));
        let xi = x[i + 1];
        let term = (&ev * &fv).scale(xi).try_add(&(&fv * &ev).scale(&xi.inv()?))?;
        g = &g * &term;
    }
    Ok(g)
}

/// ∏_{ε ∈ {±1}³} (t − x₀ x₁^{ε₁} x₂^{ε₂} x₃^{ε₃}).
pub fn torus_spinor_charpoly(t: &FieldTower, x: [&Scalar; 4]) -> Result<Poly> {
    let mut roots = Vec::with_capacity(8);
    for s in 0..8u32 {
        let mut r = x[0].clone();
        for i in 0..3 {
            let xi = if s >> i & 1 == 1 { x[i + 1].inv()? } else { x[i + 1].clone() };
            r = &r * &xi;
        }
        roots.push(r);
    }
    Ok(Poly::from_roots(t, &roots))
}
