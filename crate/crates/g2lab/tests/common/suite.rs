//! Acceptance batteries shared by the `acceptance` test and `g2lab verify-suite`.
//! Oracles here are computed independently of the library routes they check.

use std::time::Instant;

use g2lab::clifford::{spin_lift, CliffordAlgebra, CliffordElement};
use g2lab::decide::{
    classify, contained_in_g2_spin, elementwise_type_g2, poly_is_type_g2, spin_preimage, spinor_eigen_check,
    spinor_square_identities, split_tower_group, torus_element, type_g2_symbolic_equivalence_check, Case,
    ClassificationReport,
};
use g2lab::gallery::{
    build_alpha, build_beta, default_tower, fuzz_cayley_subgroups, fuzz_diagonal_groups, fuzz_g2_subgroups, gallery, BetaVariant,
};
use g2lab::grouprep::{
    isotypic_split, order2_linear_characters, repring_identity_check, witt_witness, GroupTable, MatrixGroup,
    Representation,
};
use g2lab::octonion::OctonionAlgebra;
use g2lab::quadspace::{QuadSpace, Vector};
use g2lab::scalars::{FieldTower, Matrix, Poly, Scalar};
use g2lab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    fn count(self, full: usize) -> usize {
        match self {
            Level::Full => full,
            Level::Fast => (full / 10).max(5),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    /// One PASS/FAIL line; deterministic given the seed.
    pub fn line(&self) -> String {
        format!("{} [{}] {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

type Outcome = Result<(bool, String), String>;

fn run(id: &str, name: &str, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let (pass, detail) = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => (false, format!("error: {e}")),
        Err(_) => (false, "panicked".to_string()),
    };
    Check { id: id.into(), name: name.into(), pass, detail, seconds: start.elapsed().as_secs_f64() }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(salt))
}

fn nonzero_rational(t: &FieldTower, r: &mut ChaCha8Rng) -> Scalar {
    let n: i64 = loop {
        let n = r.gen_range(-9i64..=9);
        if n != 0 {
            break n;
        }
    };
    t.from_ratio(n, r.gen_range(1i64..=7))
}

/// Coefficients, low to high, of ∏ (t − r).
fn expand_roots(t: &FieldTower, roots: &[Scalar]) -> Vec<Scalar> {
    let mut c = vec![t.one()];
    for r in roots {
        let mut next = vec![t.zero(); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] = &next[i + 1] + a;
            next[i] = &next[i] - &(a * r);
        }
        c = next;
    }
    c
}

fn poly_mul(a: &[Scalar], b: &[Scalar], t: &FieldTower) -> Vec<Scalar> {
    let mut c = vec![t.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] = &c[i + j] + &(x * y);
        }
    }
    c
}

fn same_coeffs(p: &Poly, c: &[Scalar]) -> bool {
    (0..c.len().max(p.coeffs().len())).all(|i| {
        let a = p.coeff(i);
        let b = c.get(i).cloned().unwrap_or_else(|| a.tower().zero());
        a == b
    })
}

fn same_multiset(a: &[Scalar], b: &[Scalar]) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|x| match (0..b.len()).find(|&j| !used[j] && b[j] == *x) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        })
}

fn g2_pattern(x: &Scalar, y: &Scalar) -> Vec<Scalar> {
    let xy = x * y;
    let one = x.tower().one();
    vec![one, x.clone(), y.clone(), xy.clone(), x.inv().unwrap(), y.inv().unwrap(), xy.inv().unwrap()]
}

/// Tries every (x, y) drawn from the roots themselves.
fn brute_force_type_g2(roots: &[Scalar]) -> bool {
    roots.iter().any(|x| roots.iter().any(|y| same_multiset(&g2_pattern(x, y), roots)))
}

fn random_root(t: &FieldTower, r: &mut ChaCha8Rng, cyclotomic: bool) -> Scalar {
    if cyclotomic {
        t.zeta_pow(r.gen_range(0..t.conductor() as i64))
    } else {
        nonzero_rational(t, r)
    }
}

pub fn criterion1(level: Level, seed: u64) -> Check {
    run("1", "type-G2 polynomial criterion", || {
        if !type_g2_symbolic_equivalence_check() {
            return Ok((false, "symbolic identity failed".into()));
        }
        let n = level.count(1000);
        let t = default_tower();
        let mut r = rng(seed, 1);
        let mut accepted = 0;
        for i in 0..n {
            let cyc = i % 3 == 0;
            let (x, y) = (random_root(&t, &mut r, cyc), random_root(&t, &mut r, cyc));
            let p = Poly::new(&t, expand_roots(&t, &g2_pattern(&x, &y)));
            let v = poly_is_type_g2(&p).map_err(err)?;
            let identity = match &v.abc {
                Some((a, b, c)) => (&(&(a * a) - &b.mul_int(&2.into())) - c) == t.from_int(4),
                None => false,
            };
            if v.is_type_g2 && identity {
                accepted += 1;
            }
        }
        let mut rejected = 0;
        let mut made = 0;
        while made < n {
            let cyc = made % 3 == 0;
            let rs: Vec<Scalar> = (0..3).map(|_| random_root(&t, &mut r, cyc)).collect();
            let mut roots = vec![t.one()];
            for x in &rs {
                roots.push(x.clone());
                roots.push(x.inv().unwrap());
            }
            if brute_force_type_g2(&roots) {
                continue;
            }
            made += 1;
            let p = Poly::new(&t, expand_roots(&t, &roots));
            if !poly_is_type_g2(&p).map_err(err)?.is_type_g2 {
                rejected += 1;
            }
        }
        Ok((accepted == n && rejected == n, format!("symbolic ok; accepted {accepted}/{n}; rejected {rejected}/{n}")))
    })
}

/// Rank over 𝔽_p of rational matrices flattened to rows; a lower bound for
/// the rational rank.
fn rank_mod_p(rows: &[Vec<Scalar>]) -> usize {
    const P: u64 = 2_147_483_647;
    let red = |x: &Scalar| -> u64 {
        let q = x.as_rational().expect("rational entry");
        let m = |v: String| -> u64 { v.parse::<i128>().expect("small entry").rem_euclid(P as i128) as u64 };
        let (n, d) = (m(q.numer().to_string()), m(q.denom().to_string()));
        n * pow_mod(d, P - 2, P) % P
    };
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(red).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], P - 2, P);
        let pr: Vec<u64> = a[rank].iter().map(|x| x * inv % P).collect();
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x = (*x + P - f * y % P) % P;
                }
            }
        }
        a[rank] = pr;
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn criterion2(_level: Level, _seed: u64) -> Check {
    run("2", "octonion Clifford isomorphism", || {
        let start = Instant::now();
        let oct = OctonionAlgebra::new();
        let rep = oct.ell_iso_check();
        let rows: Vec<Vec<Scalar>> = (0..256u32).map(|m| oct.monomial_matrix(m).entries().to_vec()).collect();
        let rank_p = rank_mod_p(&rows);
        let grading = (0..256u32).all(|m| {
            let x = oct.monomial_matrix(m);
            let odd = m.count_ones() % 2 == 1;
            (0..16).all(|i| (0..16).all(|j| x.get(i, j).is_zero() || ((i < 8) != (j < 8)) == odd))
        });
        let secs = start.elapsed().as_secs_f64();
        let pass = rep.passed() && rank_p == 256 && grading && secs < 30.0;
        Ok((pass, format!("rank {} (mod p {rank_p}), grading {grading}, under 30 s {}", rep.rank, secs < 30.0)))
    })
}

/// β(x, v) = xᵀGv and r_v(x) = x − β(x,v)/q(v)·v, built column by column.
fn reflection_oracle(gram: &Matrix, v: &[Scalar]) -> Matrix {
    let t = gram.tower().clone();
    let n = v.len();
    let bxv = |x: &[Scalar]| -> Scalar {
        let mut s = t.zero();
        for i in 0..n {
            for j in 0..n {
                s = &s + &(&(&x[i] * gram.get(i, j)) * &v[j]);
            }
        }
        s
    };
    let qv = bxv(v).div_int(&2.into());
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = vec![t.zero(); n];
        e[k] = t.one();
        let f = bxv(&e).try_div(&qv).unwrap();
        cols.push((0..n).map(|i| &e[i] - &(&f * &v[i])).collect::<Vector>());
    }
    Matrix::from_columns(&t, &cols)
}

fn random_anisotropic(space: &QuadSpace, r: &mut ChaCha8Rng) -> Vector {
    let t = space.tower().clone();
    loop {
        let v: Vector = (0..space.dim()).map(|_| t.from_int(r.gen_range(-3i64..=3))).collect();
        if !space.q(&v).is_zero() {
            return v;
        }
    }
}

pub fn criterion3(level: Level, seed: u64) -> Check {
    run("3", "spin kernel and lifts", || {
        let n = level.count(100);
        let q = FieldTower::rationals();
        let space = QuadSpace::e7(&q);
        let alg = CliffordAlgebra::new(&space).map_err(err)?;
        let mut r = rng(seed, 3);
        let mut good = 0;
        for _ in 0..n {
            let k = 2 * r.gen_range(1..=3);
            let mut g = Matrix::identity(&q, 7);
            for _ in 0..k {
                g = g.mul(&reflection_oracle(space.gram(), &random_anisotropic(&space, &mut r)));
            }
            let l = spin_lift(&alg, &g).map_err(err)?;
            let neg = -&l.gamma;
            let ok = l.gamma.pi_action().map_err(err)? == g
                && neg.pi_action().map_err(err)? == g
                && l.gamma.nu().map_err(err)?.is_one()
                && neg.nu().map_err(err)?.is_one();
            if ok {
                good += 1;
            }
        }
        Ok((good == n, format!("{good}/{n} lifts with π(±γ) = g and ν = 1")))
    })
}

fn torus_params(t: &FieldTower, r: &mut ChaCha8Rng) -> [Scalar; 4] {
    let m = t.conductor() as i64;
    [
        nonzero_rational(t, r),
        &nonzero_rational(t, r) * &t.zeta_pow(r.gen_range(0..m)),
        &nonzero_rational(t, r) * &t.zeta_pow(r.gen_range(0..m)),
        &nonzero_rational(t, r) * &t.zeta_pow(r.gen_range(0..m)),
    ]
}

pub fn criterion4(level: Level, seed: u64) -> Check {
    run("4", "spinor charpoly on the torus", || {
        let n = level.count(50);
        let t = default_tower();
        let oct = OctonionAlgebra::standard();
        let mut r = rng(seed, 4);
        let mut good = 0;
        for _ in 0..n {
            let x = torus_params(&t, &mut r);
            let g = torus_element(&t, [&x[0], &x[1], &x[2], &x[3]]).map_err(err)?;
            let mut roots = Vec::with_capacity(8);
            for s in 0..8u32 {
                let mut v = x[0].clone();
                for i in 0..3 {
                    v = if s >> i & 1 == 1 { v.try_div(&x[i + 1]).unwrap() } else { &v * &x[i + 1] };
                }
                roots.push(v);
            }
            let cp = oct.spin_rep(&g).map_err(err)?.charpoly().map_err(err)?;
            if same_coeffs(&cp, &expand_roots(&t, &roots)) && g.nu().map_err(err)? == &x[0] * &x[0] {
                good += 1;
            }
        }
        Ok((good == n, format!("{good}/{n} torus elements")))
    })
}

fn random_even_versor(alg: &CliffordAlgebra, r: &mut ChaCha8Rng, pairs: usize) -> CliffordElement {
    let mut s = alg.one();
    for _ in 0..2 * pairs {
        let v = random_anisotropic(alg.space(), r);
        s = &s * &alg.vector(&v);
    }
    s
}

pub fn criterion5(level: Level, seed: u64) -> Check {
    run("5", "spinor eigenvalue factorization", || {
        let n = level.count(100);
        let t = default_tower();
        let oct = OctonionAlgebra::standard();
        let alg = oct.clifford_p().lift_to(&t).map_err(err)?;
        let mut r = rng(seed, 5);
        let mut good = 0;
        for _ in 0..n {
            let mut x = torus_params(&t, &mut r);
            x[3] = &x[1] * &x[2];
            let tau = torus_element(&t, [&x[0], &x[1], &x[2], &x[3]]).map_err(err)?;
            let pairs = r.gen_range(1..=2);
            let s = random_even_versor(&alg, &mut r, pairs);
            let g = &(&s * &tau) * &s.clifford_inverse().map_err(err)?;
            let lambda = &x[0];
            let rho = oct.spin_rep(&g).map_err(err)?;
            let cp = rho.charpoly().map_err(err)?;
            let lhs = rho.scale(&lambda.inv().map_err(|e| e.to_string())?).charpoly().map_err(err)?;
            let t_minus_1 = [t.from_int(-1), t.one()];
            let cpi = g.pi_action().map_err(err)?.charpoly().map_err(err)?;
            let rhs = poly_mul(&t_minus_1, cpi.coeffs(), &t);
            let lib = spinor_eigen_check(&g).map_err(err)?;
            let ok = cp.eval(lambda).is_zero()
                && (lambda * lambda) == g.nu().map_err(err)?
                && same_coeffs(&lhs, &rhs)
                && lib.pi_type_g2
                && lib.has_root_of_nu
                && lib.factorization == Some(true);
            if ok {
                good += 1;
            }
        }
        Ok((good == n, format!("{good}/{n} GSpin elements")))
    })
}

pub fn criterion6(level: Level, seed: u64) -> Check {
    run("6", "spinor square character identities", || {
        let n = level.count(100);
        let q = FieldTower::rationals();
        let oct = OctonionAlgebra::standard();
        let alg = oct.clifford_p();
        let mut r = rng(seed, 6);
        let mut good = 0;
        let mut identity_detail = String::new();
        for i in 0..n {
            let g = if i == 0 {
                alg.one()
            } else {
                let pairs = r.gen_range(1..=3);
                random_even_versor(alg, &mut r, pairs).scale(&nonzero_rational(&q, &mut r))
            };
            let rho = oct.spin_rep(&g).map_err(err)?;
            let pi = g.pi_action().map_err(err)?;
            let nu_inv = g.nu().map_err(err)?.inv().map_err(|e| e.to_string())?;
            let half = |x: Scalar| x.div_int(&2.into());
            let (w1, w2) = (rho.trace(), rho.mul(&rho).trace());
            let pi2 = pi.mul(&pi);
            let (e1, e2, e3) = (pi.trace(), pi2.trace(), pi2.mul(&pi).trace());
            let sym2_w = half(&(&w1 * &w1) + &w2);
            let alt2_w = half(&(&w1 * &w1) - &w2);
            let l3_e = (&(&(&(&e1 * &e1) * &e1) - &(&e1 * &e2).mul_int(&3.into())) + &e3.mul_int(&2.into()))
                .div_int(&6.into());
            let f1 = &e1 + &q.one();
            let f2 = &e2 + &q.one();
            let alt2_1e = half(&(&f1 * &f1) - &f2);
            let one_plus = &q.one() + &l3_e;
            let sym = &sym2_w * &nu_inv == one_plus;
            let alt = &alt2_w * &nu_inv == alt2_1e;
            let lib = spinor_square_identities(&g).map_err(err)?;
            if i == 0 {
                identity_detail = format!("identity: {} = 1+{}, {} = {}", sym2_w, l3_e, alt2_w, alt2_1e);
            }
            if sym && alt && lib == (true, true) {
                good += 1;
            }
        }
        Ok((good == n, format!("{good}/{n} elements; {identity_detail}")))
    })
}

/// Seeded fuzz pool: subgroups of gallery groups, subgroups of the Cayley
/// octonion automorphism group and, when asked, diagonal groups that need
/// not be of type G2.
fn fuzzed_groups(level: Level, seed: u64, n: usize, with_diagonal: bool) -> Result<Vec<MatrixGroup>, String> {
    let t = default_tower();
    let n = level.count(n);
    let cayley = n * 3 / 10;
    let diagonal = if with_diagonal { n * 3 / 10 } else { 0 };
    let mut v = fuzz_g2_subgroups(&t, seed, n - cayley - diagonal).map_err(err)?;
    v.extend(fuzz_cayley_subgroups(&t, seed, cayley).map_err(err)?);
    v.extend(fuzz_diagonal_groups(&t, seed, diagonal).map_err(err)?);
    Ok(v)
}

pub fn criterion7(level: Level, seed: u64) -> Check {
    run("7", "element-wise test vs representation-ring identity", || {
        let mut groups: Vec<MatrixGroup> = gallery(&default_tower()).map_err(err)?.into_iter().map(|x| x.1).collect();
        groups.extend(fuzzed_groups(level, seed.wrapping_add(7), 200, true)?);
        let (mut agree, mut non_g2) = (0, 0);
        for g in &groups {
            let table = g.table().map_err(err)?;
            let (ew, _) = elementwise_type_g2(table).map_err(err)?;
            let (rr, _) = repring_identity_check(table, &Representation::natural(table));
            if ew == rr {
                agree += 1;
            }
            if !ew {
                non_g2 += 1;
            }
        }
        Ok((agree == groups.len(), format!("{agree}/{} agree ({non_g2} not of type G2)", groups.len())))
    })
}

fn twisted(table: &GroupTable, beta: &[i8]) -> Vec<Matrix> {
    table.elements().iter().zip(beta).map(|(m, &s)| if s < 0 { m.neg() } else { m.clone() }).collect()
}

pub fn criterion8(level: Level, seed: u64) -> Check {
    run("8", "spin containment routes agree", || {
        let mut groups: Vec<MatrixGroup> = gallery(&default_tower()).map_err(err)?.into_iter().map(|x| x.1).collect();
        groups.extend(fuzzed_groups(level, seed.wrapping_add(8), 100, false)?);
        let (mut tested, mut violations, mut contained) = (0, 0, 0);
        for g in &groups {
            let g = split_tower_group(g, &mut Vec::new()).map_err(err)?;
            let pre = match spin_preimage(&g) {
                Ok(p) => p,
                Err(Error::EquivalenceViolation(_)) => {
                    violations += 1;
                    continue;
                }
                Err(e) => return Err(err(e)),
            };
            let table = pre.group.table().map_err(err)?;
            for beta in order2_linear_characters(table) {
                tested += 1;
                match contained_in_g2_spin(&twisted(table, &beta)) {
                    Ok(c) => contained += c.contained as usize,
                    Err(Error::EquivalenceViolation(_)) => violations += 1,
                    Err(e) => return Err(err(e)),
                }
            }
        }
        Ok((violations == 0, format!("{tested} subgroups Δ tested, {contained} contained, {violations} violations")))
    })
}

/// Expected case and, where it is part of the statement, Witt index.
fn expected_case(name: &str) -> Option<(Case, Option<usize>)> {
    Some(match name {
        "alpha" => (Case::CZ4xZ2, Some(2)),
        "beta-gl" => (Case::BGl2OrSl2, Some(2)),
        "beta-sl" => (Case::BGl2OrSl2, Some(3)),
        "gamma-dic16" => (Case::DO2pm, Some(3)),
        "gamma-sd16" => (Case::DO2pm, Some(2)),
        "gamma-d8" => (Case::AContained, None),
        n if n.starts_with("torus-") || n.starts_with("g2sample-") => (Case::AContained, None),
        _ => return None,
    })
}

pub fn criterion9_and_12(level: Level, seed: u64) -> Vec<Check> {
    let start = Instant::now();
    let t = default_tower();
    let mut c9 = run("9", "classification of the gallery", || {
        let mut wrong = Vec::new();
        let items = gallery(&t).map_err(err)?;
        let mut named = 0;
        for (name, g, _) in &items {
            let Some((case, witt)) = expected_case(name) else { continue };
            named += 1;
            let rep = classify(g).map_err(err)?;
            if rep.case != Some(case) || witt.is_some_and(|w| rep.witt_index != Some(w)) {
                wrong.push(format!("{name}: {:?} (Witt {:?})", rep.case, rep.witt_index));
            }
        }
        Ok((wrong.is_empty() && named == 13, format!("{named} named gallery groups, mismatches {:?}", wrong)))
    });
    let mut fuzz: Result<Vec<Result<ClassificationReport, Error>>, String> =
        fuzzed_groups(level, seed.wrapping_add(9), 500, false).map(|gs| gs.iter().map(classify).collect());
    let fuzz_secs = start.elapsed().as_secs_f64() - c9.seconds;
    match &mut fuzz {
        Ok(results) => {
            let violations = results.iter().filter(|r| matches!(r, Err(Error::TheoremViolation(_)))).count();
            let other: Vec<String> = results.iter().filter_map(|r| r.as_ref().err()).filter(|e| !matches!(e, Error::TheoremViolation(_))).map(|e| e.to_string()).collect();
            c9.pass &= violations == 0 && other.is_empty();
            c9.detail = format!("{}; {} fuzzed: {violations} theorem violations, {} other errors {:?}", c9.detail, results.len(), other.len(), other.first());
        }
        Err(e) => {
            c9.pass = false;
            c9.detail = format!("{}; fuzz error {e}", c9.detail);
        }
    }
    c9.seconds += fuzz_secs;
    let c12 = run("12", "no Witt-index-1 escape", || {
        let results = fuzz.as_ref().map_err(|e| e.clone())?;
        let ok: Vec<&ClassificationReport> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
        let mut hist = std::collections::BTreeMap::new();
        for r in &ok {
            *hist.entry(r.witt_index.map_or(-1, |w| w as i64)).or_insert(0usize) += 1;
        }
        let escapes = ok.iter().filter(|r| r.witt_index == Some(1) && r.case != Some(Case::AContained)).count();
        let errors = results.len() - ok.len();
        Ok((escapes == 0 && errors == 0, format!("Witt index histogram {hist:?} over {} fuzzed, {escapes} escapes", results.len())))
    });
    vec![c9, c12]
}

/// Checks that the witness is totally isotropic, stable and of the claimed size.
fn witt_witness_ok(g: &MatrixGroup) -> Result<(usize, bool), String> {
    let g = split_tower_group(g, &mut Vec::new()).map_err(err)?;
    let table = g.table().map_err(err)?;
    let rep = Representation::natural(table);
    let split = isotypic_split(table, &rep).map_err(err)?;
    let space = QuadSpace::e7(g.tower());
    let w = witt_witness(table, &rep, &space, &split).map_err(err)?;
    let b = &w.subspace.basis;
    let t = b.first().map_or_else(|| g.tower().clone(), |v| v[0].tower().clone());
    let space = space.lift_to(&t).map_err(err)?;
    let iso = b.iter().all(|x| space.q(x).is_zero() && b.iter().all(|y| space.beta(x, y).is_zero()));
    let basis = Matrix::from_columns(&t, b);
    let rank = basis.rank().map_err(err)?;
    let mut stable = true;
    for h in g.generators() {
        let h = h.lift_to(&t).map_err(err)?;
        let mut cols = b.clone();
        cols.extend(b.iter().map(|x| h.mul_vec(x)));
        stable &= Matrix::from_columns(&t, &cols).rank().map_err(err)? == rank;
    }
    Ok((w.index, iso && stable && rank == w.index && rank == b.len()))
}

pub fn criterion10(_level: Level, _seed: u64) -> Check {
    run("10", "Witt indices of alpha, beta-SL, beta-GL", || {
        let t = default_tower();
        let cases = [
            ("alpha", build_alpha(&t).map_err(err)?, 2),
            ("beta-sl", build_beta(&t, BetaVariant::Sl).map_err(err)?, 3),
            ("beta-gl", build_beta(&t, BetaVariant::Gl).map_err(err)?, 2),
        ];
        let mut pass = true;
        let mut parts = Vec::new();
        for (name, g, expected) in &cases {
            let rep = classify(g).map_err(err)?;
            let (wi, witness_ok) = witt_witness_ok(g)?;
            pass &= rep.witt_index == Some(*expected) && wi == *expected && witness_ok;
            parts.push(format!("{name} {:?} (witness {wi}, ok {witness_ok})", rep.witt_index));
        }
        Ok((pass, parts.join(", ")))
    })
}

fn inner(table: &GroupTable, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let t = a[0].tower().clone();
    let mut s = t.zero();
    for i in 0..table.len() {
        s = &s + &(&a[i] * &b[table.inverse(i)]);
    }
    s.div_int(&(table.len() as i64).into())
}

pub fn criterion11(_level: Level, _seed: u64) -> Check {
    run("11", "GL2(F3) exterior cube decomposition", || {
        let t = default_tower();
        let g = split_tower_group(&build_beta(&t, BetaVariant::Gl).map_err(err)?, &mut Vec::new()).map_err(err)?;
        let table = g.table().map_err(err)?;
        let rep = Representation::natural(table);
        let chi = rep.character();
        let split = isotypic_split(table, &rep).map_err(err)?;
        let tt = chi[0].tower().clone();
        let n = table.len();
        let irr: Vec<Vec<Scalar>> = split.iter().map(|c| c.irreducible_character()).collect();
        let find = |dim: usize, selfdual: bool| -> Vec<usize> {
            (0..split.len()).filter(|&i| split[i].dim == dim && split[i].selfdual == selfdual).collect()
        };
        let (ones, twos, ps) = (find(1, true), find(2, true), find(2, false));
        if ones.len() != 1 || twos.len() != 1 || ps.len() != 2 || split.iter().any(|c| c.multiplicity != 1) {
            return Ok((false, format!("unexpected constituents of E: {:?}", split.iter().map(|c| (c.dim, c.multiplicity, c.selfdual)).collect::<Vec<_>>())));
        }
        let trivial = vec![tt.one(); n];
        let c = irr[ones[0]].clone();
        let h = irr[twos[0]].clone();
        let (p, pd) = (irr[ps[0]].clone(), irr[ps[1]].clone());
        let times = |a: &[Scalar], b: &[Scalar]| -> Vec<Scalar> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
        let v: Vec<Scalar> = times(&p, &pd).iter().map(|x| x - &tt.one()).collect();
        let vc = times(&v, &c);
        let hp = times(&h, &p);
        let basis = [trivial, c, h, p, pd, v, vc, hp];
        let irreducible = basis.iter().all(|b| inner(table, b, b).is_one());
        let at = |k: i64, i: usize| chi[table.power(i, k)].clone();
        let l3: Vec<Scalar> = (0..n)
            .map(|i| {
                let (a, b, c) = (at(1, i), at(2, i), at(3, i));
                (&(&(&(&a * &a) * &a) - &(&a * &b).mul_int(&3.into())) + &c.mul_int(&2.into())).div_int(&6.into())
            })
            .collect();
        let sym2: Vec<Scalar> = (0..n).map(|i| (&(&at(1, i) * &at(1, i)) + &at(2, i)).div_int(&2.into())).collect();
        let e_plus_sym2: Vec<Scalar> = (0..n).map(|i| &chi[i] + &sym2[i]).collect();
        let mult = |x: &[Scalar]| -> Vec<String> { basis.iter().map(|b| inner(table, x, b).to_string()).collect() };
        let m3 = mult(&l3);
        let ms = mult(&e_plus_sym2);
        let expected: Vec<String> = [3, 1, 3, 2, 2, 1, 2, 2].iter().map(|k: &i32| k.to_string()).collect();
        let dims: Vec<i64> = basis.iter().map(|b| b[0].as_rational().unwrap().to_integer().try_into().unwrap()).collect();
        let dim_sum: i64 = dims.iter().zip(&expected).map(|(d, m)| d * m.parse::<i64>().unwrap()).sum();
        let pass = irreducible && m3 == expected && ms == expected && dim_sum == 35;
        Ok((pass, format!("|G| = {n}, Λ³E = ({}), E + Sym²E = ({})", m3.join(","), ms.join(","))))
    })
}

/// The twelve acceptance criteria, run in parallel; results in criterion order.
pub fn acceptance(level: Level, seed: u64) -> Vec<Check> {
    type Job = fn(Level, u64) -> Vec<Check>;
    let jobs: Vec<Job> = vec![
        |l, s| vec![criterion1(l, s)],
        |l, s| vec![criterion2(l, s)],
        |l, s| vec![criterion3(l, s)],
        |l, s| vec![criterion4(l, s)],
        |l, s| vec![criterion5(l, s)],
        |l, s| vec![criterion6(l, s)],
        |l, s| vec![criterion7(l, s)],
        |l, s| vec![criterion8(l, s)],
        criterion9_and_12,
        |l, s| vec![criterion10(l, s)],
        |l, s| vec![criterion11(l, s)],
    ];
    let mut out: Vec<Check> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.into_iter().map(|j| scope.spawn(move || j(level, seed))).collect();
        handles.into_iter().flat_map(|h| h.join().unwrap_or_default()).collect()
    });
    out.sort_by_key(|c| c.id.parse::<u32>().unwrap_or(u32::MAX));
    out
}

/// Batteries beyond the numbered criteria: the sign-error mutation, JSON
/// round trips and reproducibility of the fuzz pools.
pub fn invariants(level: Level, seed: u64) -> Vec<Check> {
    let mutation = run("M1", "sign-error mutation turns the octonion Clifford check red", || {
        let good = OctonionAlgebra::new().ell_iso_check();
        let bad = OctonionAlgebra::with_sign_error().ell_iso_check();
        Ok((good.passed() && !bad.passed(), format!("correct passed {}, mutated passed {}", good.passed(), bad.passed())))
    });
    let json = run("J1", "JSON round trip of gallery groups and reports", || {
        let mut n = 0;
        for (name, g, _) in gallery(&default_tower()).map_err(err)? {
            let v = g2lab::json::group_to_json(&g);
            let text = serde_json::to_string(&v).map_err(err)?;
            let back = g2lab::json::group_from_json(&g2lab::json::parse_document(&text).map_err(err)?).map_err(err)?;
            if back != g || g2lab::json::group_to_json(&back) != v {
                return Ok((false, format!("{name} does not round-trip")));
            }
            if n < 4 || level == Level::Full {
                let r = classify(&g).map_err(err)?;
                let rv = g2lab::json::report_to_json(&r).map_err(err)?;
                if g2lab::json::report_from_json(&rv).map_err(err)? != r {
                    return Ok((false, format!("report of {name} does not round-trip")));
                }
            }
            n += 1;
        }
        Ok((true, format!("{n} groups")))
    });
    let determinism = run("D1", "seeded fuzz pools repeat identically", || {
        let a = fuzzed_groups(Level::Fast, seed, 50, true)?;
        let b = fuzzed_groups(Level::Fast, seed, 50, true)?;
        Ok((a == b, format!("{} groups", a.len())))
    });
    vec![mutation, json, determinism]
}
