//! Finite matrix groups: enumeration by closure, characters, isotypic
//! decomposition, Witt indices and order-2 linear characters.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use crate::quadspace::{is_zero_vector, QuadSpace, SubspaceFlag, Vector};
use crate::scalars::{adjoin_sqrt, kernel_basis, roots_in_tower, try_sqrt, FieldTower, Matrix, Poly, Scalar};
use crate::{Error, Result};

pub const DEFAULT_ORDER_CAP: usize = 20_000;

/// A finite group of invertible matrices given by generators. The element
/// table is computed on first use and shared between clones.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    tower: FieldTower,
    dim: usize,
    generators: Vec<Matrix>,
    cap: usize,
    table: Arc<OnceLock<Arc<GroupTable>>>,
}

impl PartialEq for MatrixGroup {
    fn eq(&self, other: &Self) -> bool {
        self.tower == other.tower && self.dim == other.dim && self.generators == other.generators
    }
}

impl MatrixGroup {
    pub fn new(tower: &FieldTower, dim: usize, generators: Vec<Matrix>) -> Result<MatrixGroup> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: g.rows() });
            }
            gens.push(g.lift_to(tower)?);
        }
        Ok(MatrixGroup { tower: tower.clone(), dim, generators: gens, cap: DEFAULT_ORDER_CAP, table: Arc::default() })
    }

    /// Group generated by nonempty `generators`, in their common tower.
    pub fn from_generators(generators: Vec<Matrix>) -> Result<MatrixGroup> {
        let first = generators.first().ok_or_else(|| Error::Parse("no generators".into()))?;
        let (t, n) = (first.tower().clone(), first.rows());
        MatrixGroup::new(&t, n, generators)
    }

    pub fn with_cap(mut self, cap: usize) -> MatrixGroup {
        self.cap = cap;
        self.table = Arc::default();
        self
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn table(&self) -> Result<&GroupTable> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let t = GroupTable::build(&self.tower, self.dim, &self.generators, self.cap)?;
        let _ = self.table.set(Arc::new(t));
        Ok(self.table.get().expect("just set"))
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.table()?.len())
    }

    pub fn lift_to(&self, tower: &FieldTower) -> Result<MatrixGroup> {
        Ok(MatrixGroup::new(tower, self.dim, self.generators.clone())?.with_cap(self.cap))
    }
}

/// Breadth-first closure of the generators; the identity has index 0.
pub fn enumerate(g: &MatrixGroup, cap: usize) -> Result<Vec<Matrix>> {
    if cap == 0 {
        return Err(Error::OrderCapExceeded(0));
    }
    Ok(GroupTable::build(&g.tower, g.dim, &g.generators, cap)?.elements)
}

/// Element list of a finite matrix group with right multiplication by the
/// generators tabulated.
#[derive(Debug)]
pub struct GroupTable {
    elements: Vec<Matrix>,
    index: HashMap<Matrix, usize>,
    right: Vec<Vec<usize>>,
    parent: Vec<Option<(usize, usize)>>,
    powers: OnceLock<Vec<Vec<usize>>>,
    classes: OnceLock<Vec<Vec<usize>>>,
}

impl GroupTable {
    fn build(tower: &FieldTower, dim: usize, gens: &[Matrix], cap: usize) -> Result<GroupTable> {
        let id = Matrix::identity(tower, dim);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0usize);
        let mut parent = vec![None];
        let mut right = Vec::new();
        let mut i = 0;
        while i < elements.len() {
            let mut row = Vec::with_capacity(gens.len());
            for (s, g) in gens.iter().enumerate() {
                let p = elements[i].mul(g);
                let j = match index.get(&p) {
                    Some(&j) => j,
                    None => {
                        if elements.len() >= cap {
                            return Err(Error::OrderCapExceeded(cap));
                        }
                        let j = elements.len();
                        index.insert(p.clone(), j);
                        elements.push(p);
                        parent.push(Some((i, s)));
                        j
                    }
                };
                row.push(j);
            }
            right.push(row);
            i += 1;
        }
        Ok(GroupTable { elements, index, right, parent, powers: OnceLock::new(), classes: OnceLock::new() })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Matrix {
        &self.elements[i]
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn num_generators(&self) -> usize {
        self.right.first().map_or(0, |r| r.len())
    }

    /// Index of the s-th generator.
    pub fn generator_index(&self, s: usize) -> usize {
        self.right[0][s]
    }

    /// Index of g_i · s_k.
    pub fn times_generator(&self, i: usize, k: usize) -> usize {
        self.right[i][k]
    }

    /// The breadth-first tree: element i = parent · generator.
    pub fn parent(&self, i: usize) -> Option<(usize, usize)> {
        self.parent[i]
    }

    /// Generator indices s₁…s_r with element j = s₁⋯s_r.
    fn word(&self, j: usize) -> Vec<usize> {
        let mut w = Vec::new();
        let mut i = j;
        while let Some((p, s)) = self.parent[i] {
            w.push(s);
            i = p;
        }
        w.reverse();
        w
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.word(j).into_iter().fold(i, |r, s| self.right[r][s])
    }

    /// [1, g, g², …, g^{ord−1}] as indices.
    pub fn powers(&self, i: usize) -> &[usize] {
        &self.all_powers()[i]
    }

    fn all_powers(&self) -> &Vec<Vec<usize>> {
        self.powers.get_or_init(|| {
            self.elements
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    let w = self.word(i);
                    let mut out = vec![0usize];
                    let mut p = i;
                    while p != 0 {
                        out.push(p);
                        p = w.iter().fold(p, |r, &s| self.right[r][s]);
                    }
                    out
                })
                .collect()
        })
    }

    pub fn element_order(&self, i: usize) -> u64 {
        self.powers(i).len() as u64
    }

    pub fn power(&self, i: usize, k: i64) -> usize {
        let p = self.powers(i);
        p[k.rem_euclid(p.len() as i64) as usize]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.power(i, -1)
    }

    pub fn exponent(&self) -> u64 {
        (0..self.len()).fold(1u64, |acc, i| num_integer::lcm(acc, self.element_order(i)))
    }

    /// Number of elements of each order.
    pub fn order_statistics(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for i in 0..self.len() {
            *out.entry(self.element_order(i)).or_insert(0) += 1;
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        let gens: Vec<&Matrix> = (0..self.num_generators()).map(|s| &self.elements[self.generator_index(s)]).collect();
        gens.iter().enumerate().all(|(a, x)| gens[a + 1..].iter().all(|y| x.mul(y) == y.mul(x)))
    }

    /// Conjugacy classes, as sorted index lists ordered by first element.
    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        self.classes.get_or_init(|| {
            let k = self.num_generators();
            let invs: Vec<usize> = (0..k).map(|s| self.inverse(self.generator_index(s))).collect();
            let mut seen = vec![false; self.len()];
            let mut out = Vec::new();
            for i in 0..self.len() {
                if seen[i] {
                    continue;
                }
                seen[i] = true;
                let mut class = vec![i];
                let mut q = 0;
                while q < class.len() {
                    let x = class[q];
                    for s in 0..k {
                        let j = self.right[self.product(invs[s], x)][s];
                        if !seen[j] {
                            seen[j] = true;
                            class.push(j);
                        }
                    }
                    q += 1;
                }
                class.sort_unstable();
                out.push(class);
            }
            out
        })
    }

    /// Indices of the subgroup generated by the given elements.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen: HashSet<usize> = HashSet::from([0]);
        let mut out = vec![0usize];
        let mut q = 0;
        while q < out.len() {
            for &g in gens {
                let j = self.product(out[q], g);
                if seen.insert(j) {
                    out.push(j);
                }
            }
            q += 1;
        }
        out
    }
}

/// Images of every group element under a representation, indexed like the
/// group table.
#[derive(Clone, Debug)]
pub struct Representation {
    images: Vec<Matrix>,
}

impl Representation {
    pub fn natural(table: &GroupTable) -> Representation {
        Representation { images: table.elements.clone() }
    }

    /// Extends generator images along the breadth-first tree and checks every
    /// remaining edge, so the result is a homomorphism or an error.
    pub fn from_generator_images(table: &GroupTable, gens: &[Matrix]) -> Result<Representation> {
        if gens.len() != table.num_generators() || gens.is_empty() {
            return Err(Error::NotAHomomorphism);
        }
        let t = gens[0].tower().clone();
        let n = gens[0].rows();
        let mut images = vec![Matrix::identity(&t, n)];
        for i in 1..table.len() {
            let (p, s) = table.parent(i).expect("non-identity has a parent");
            images.push(images[p].mul(&gens[s]));
        }
        for i in 0..table.len() {
            for (s, g) in gens.iter().enumerate() {
                let j = table.times_generator(i, s);
                if table.parent(j) == Some((i, s)) {
                    continue;
                }
                if images[i].mul(g) != images[j] {
                    return Err(Error::NotAHomomorphism);
                }
            }
        }
        Ok(Representation { images })
    }

    pub fn dim(&self) -> usize {
        self.images[0].rows()
    }

    pub fn tower(&self) -> &FieldTower {
        self.images[0].tower()
    }

    pub fn image(&self, i: usize) -> &Matrix {
        &self.images[i]
    }

    pub fn images(&self) -> &[Matrix] {
        &self.images
    }

    pub fn character(&self) -> Vec<Scalar> {
        self.images.iter().map(|m| m.trace()).collect()
    }
}

/// ⟨a, b⟩ = (1/|G|) Σ a(g) b(g⁻¹).
pub fn inner_product(table: &GroupTable, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = a[0].tower().zero();
    for i in 0..table.len() {
        acc += &(&a[i] * &b[table.inverse(i)]);
    }
    acc.div_int(&(table.len() as i64).into())
}

/// The multiplicity of the character β in χ, asserted to be a nonnegative
/// integer.
pub fn multiplicity(table: &GroupTable, beta: &[Scalar], chi: &[Scalar]) -> Result<u64> {
    let v = inner_product(table, chi, beta);
    let q = v.as_rational().ok_or_else(|| Error::NonIntegerMultiplicity(v.to_string()))?;
    if !q.is_integer() || q < num_rational::BigRational::from_integer(0.into()) {
        return Err(Error::NonIntegerMultiplicity(v.to_string()));
    }
    use num_traits::ToPrimitive;
    q.to_integer().to_u64().ok_or_else(|| Error::NonIntegerMultiplicity(v.to_string()))
}

/// Per-element χ(g), χ(g²), χ(g³).
#[derive(Clone, Debug)]
pub struct PowerCharacters {
    pub chi: Vec<Scalar>,
    pub chi2: Vec<Scalar>,
    pub chi3: Vec<Scalar>,
}

impl PowerCharacters {
    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    pub fn sym2(&self) -> Vec<Scalar> {
        self.chi.iter().zip(&self.chi2).map(|(a, b)| (&(a * a) + b).div_int(&2.into())).collect()
    }

    pub fn lambda2(&self) -> Vec<Scalar> {
        self.chi.iter().zip(&self.chi2).map(|(a, b)| (&(a * a) - b).div_int(&2.into())).collect()
    }

    pub fn lambda3(&self) -> Vec<Scalar> {
        (0..self.len())
            .map(|i| {
                let (a, b, c) = (&self.chi[i], &self.chi2[i], &self.chi3[i]);
                let s = &(&(&(a * a) * a) - &(a * b).mul_int(&3.into())) + &c.mul_int(&2.into());
                s.div_int(&6.into())
            })
            .collect()
    }
}

pub fn power_characters(table: &GroupTable, rep: &Representation) -> PowerCharacters {
    let chi = rep.character();
    let chi2 = (0..table.len()).map(|i| chi[table.power(i, 2)].clone()).collect();
    let chi3 = (0..table.len()).map(|i| chi[table.power(i, 3)].clone()).collect();
    PowerCharacters { chi, chi2, chi3 }
}

/// Checks χ_{Λ³E} = χ_E + χ_{Sym²E} pointwise; on failure returns the first
/// offending element.
pub fn repring_identity_check(table: &GroupTable, rep: &Representation) -> (bool, Option<usize>) {
    let pc = power_characters(table, rep);
    let l3 = pc.lambda3();
    let s2 = pc.sym2();
    for i in 0..table.len() {
        if l3[i] != &pc.chi[i] + &s2[i] {
            return (false, Some(i));
        }
    }
    (true, None)
}

/// The subgroup generated by all squares. It contains every commutator, so
/// the quotient is elementary abelian of exponent 2.
pub fn square_subgroup(table: &GroupTable) -> Vec<usize> {
    let mut squares: Vec<usize> = (0..table.len()).map(|i| table.power(i, 2)).collect();
    squares.sort_unstable();
    squares.dedup();
    let mut sub: HashSet<usize> = HashSet::from([0]);
    let mut gens = Vec::new();
    for s in squares {
        if !sub.contains(&s) {
            gens.push(s);
            sub = table.subgroup_closure(&gens).into_iter().collect();
        }
    }
    let mut out: Vec<usize> = sub.into_iter().collect();
    out.sort_unstable();
    out
}

/// Every homomorphism G → {±1}, as ±1 values indexed by element; the
/// trivial character comes first.
pub fn order2_linear_characters(table: &GroupTable) -> Vec<Vec<i8>> {
    let k = table.num_generators();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << k) {
        let eps: Vec<i8> = (0..k).map(|s| if mask >> s & 1 == 1 { -1 } else { 1 }).collect();
        let mut val = vec![0i8; table.len()];
        val[0] = 1;
        for i in 1..table.len() {
            let (p, s) = table.parent(i).expect("parent");
            val[i] = val[p] * eps[s];
        }
        let ok = (0..table.len()).all(|i| (0..k).all(|s| val[table.times_generator(i, s)] == val[i] * eps[s]));
        if ok {
            out.push(val);
        }
    }
    debug_assert_eq!(out.len() * square_subgroup(table).len(), table.len());
    out
}

pub fn sign_character(tower: &FieldTower, values: &[i8]) -> Vec<Scalar> {
    values.iter().map(|&v| tower.from_int(v)).collect()
}

/// One isotypic component of a representation.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotypicDatum {
    pub projector: Matrix,
    /// Dimension of the irreducible constituent.
    pub dim: usize,
    pub multiplicity: usize,
    pub selfdual: bool,
    /// Character of the whole component, i.e. multiplicity times the
    /// irreducible character.
    pub character: Vec<Scalar>,
}

impl IsotypicDatum {
    pub fn irreducible_character(&self) -> Vec<Scalar> {
        let m: num_bigint::BigInt = (self.multiplicity as i64).into();
        self.character.iter().map(|x| x.div_int(&m)).collect()
    }
}

fn vec_of(m: &Matrix) -> Vector {
    m.entries().to_vec()
}

/// Monic minimal polynomial of a square matrix by Krylov dependence in
/// matrix space.
pub fn minimal_polynomial(z: &Matrix) -> Result<Poly> {
    let t = z.tower().clone();
    let n = z.rows();
    let mut powers = vec![Matrix::identity(&t, n)];
    loop {
        let r = powers.len();
        let cur = powers[r - 1].mul(z);
        let mut cols: Vec<Vector> = powers.iter().map(vec_of).collect();
        cols.push(vec_of(&cur));
        let m = Matrix::from_columns(&t, &cols);
        let ker = kernel_basis(&m)?;
        if let Some(k) = ker.first() {
            let lead = k[r].clone();
            let lead_inv = lead.inv()?;
            let coeffs: Vec<Scalar> = k.iter().map(|c| c * &lead_inv).collect();
            return Ok(Poly::new(&t, coeffs));
        }
        powers.push(cur);
    }
}

/// Isotypic decomposition via a generic central element of span ρ(G).
pub fn isotypic_split(table: &GroupTable, rep: &Representation) -> Result<Vec<IsotypicDatum>> {
    let t = rep.tower().clone();
    let n = rep.dim();
    let exp = table.exponent();
    let m = t.conductor();
    if !m.is_multiple_of(exp) {
        return Err(Error::ExponentNotDividingConductor { exponent: exp, conductor: m });
    }
    let classes = table.conjugacy_classes();
    let sums: Vec<Matrix> = classes
        .iter()
        .map(|c| c.iter().fold(Matrix::zeros(&t, n, n), |acc, &i| acc.add(rep.image(i))))
        .collect();
    let cols: Vec<Vector> = sums.iter().map(vec_of).collect();
    let (_, piv) = Matrix::from_columns(&t, &cols).rref()?;
    let basis: Vec<&Matrix> = piv.iter().map(|&j| &sums[j]).collect();
    let zdim = basis.len();
    let id = Matrix::identity(&t, n);
    for attempt in 0..64u64 {
        let mut z = Matrix::zeros(&t, n, n);
        for (j, b) in basis.iter().enumerate() {
            let c = ((j as u64 + 1) * (attempt + 3) * 7 + (j as u64) * (j as u64) + attempt) % 23 + 1;
            z = z.add(&b.scale(&t.from_int(c as i64)));
        }
        let mp = minimal_polynomial(&z)?;
        if mp.degree() != Some(zdim) {
            continue;
        }
        let roots = match roots_in_tower(&mp) {
            Ok(r) => r,
            Err(e) => return Err(Error::SplitFailed(e.to_string())),
        };
        if roots.len() != zdim {
            return Err(Error::SplitFailed(format!("{} distinct roots for degree {}", roots.len(), zdim)));
        }
        let lambdas: Vec<Scalar> = roots.into_iter().map(|(r, _)| r).collect();
        let mut out = Vec::with_capacity(zdim);
        for (i, li) in lambdas.iter().enumerate() {
            let mut e = id.clone();
            for (j, lj) in lambdas.iter().enumerate() {
                if i != j {
                    let f = (li - lj).inv()?;
                    e = e.mul(&z.sub(&Matrix::scalar_matrix(lj, n))).scale(&f);
                }
            }
            out.push(component(table, rep, e)?);
        }
        return Ok(out);
    }
    Err(Error::SplitFailed("no generic central element found".into()))
}

fn trace_of_product(a: &Matrix, b: &Matrix) -> Scalar {
    let n = a.rows();
    let mut acc = a.tower().zero();
    for i in 0..n {
        for j in 0..n {
            let x = a.get(i, j);
            if !x.is_zero() {
                acc += &(x * b.get(j, i));
            }
        }
    }
    acc
}

fn component(table: &GroupTable, rep: &Representation, e: Matrix) -> Result<IsotypicDatum> {
    let character: Vec<Scalar> = rep.images().iter().map(|g| trace_of_product(&e, g)).collect();
    let norm = inner_product(table, &character, &character);
    let msq = int_value(&norm)?;
    let m = (msq as f64).sqrt().round() as u64;
    if m * m != msq || m == 0 {
        return Err(Error::NonIntegerMultiplicity(norm.to_string()));
    }
    let dm = int_value(&e.trace())?;
    if dm % m != 0 {
        return Err(Error::NonIntegerMultiplicity(format!("trace {dm} over multiplicity {m}")));
    }
    let selfdual = (0..table.len()).all(|i| character[i] == character[table.inverse(i)]);
    Ok(IsotypicDatum { projector: e, dim: (dm / m) as usize, multiplicity: m as usize, selfdual, character })
}

fn int_value(x: &Scalar) -> Result<u64> {
    use num_traits::ToPrimitive;
    let q = x.as_rational().ok_or_else(|| Error::NonIntegerMultiplicity(x.to_string()))?;
    if !q.is_integer() {
        return Err(Error::NonIntegerMultiplicity(x.to_string()));
    }
    q.to_integer().to_u64().ok_or_else(|| Error::NonIntegerMultiplicity(x.to_string()))
}

/// (dim E − Σ d over selfdual components of odd multiplicity) / 2.
pub fn witt_index(split: &[IsotypicDatum]) -> usize {
    let n: usize = split.iter().map(|c| c.dim * c.multiplicity).sum();
    let core: usize = split.iter().filter(|c| c.selfdual && c.multiplicity % 2 == 1).map(|c| c.dim).sum();
    (n - core) / 2
}

/// Index j of the component dual to component i.
pub fn dual_component(table: &GroupTable, split: &[IsotypicDatum], i: usize) -> Option<usize> {
    let chi = &split[i].character;
    split.iter().position(|c| (0..table.len()).all(|g| c.character[g] == chi[table.inverse(g)]))
}

/// A stable totally isotropic subspace of maximal dimension.
#[derive(Clone, Debug)]
pub struct WittWitness {
    pub index: usize,
    pub subspace: SubspaceFlag,
    /// Square roots adjoined while pairing anisotropic multiplicity vectors.
    pub extensions: Vec<Scalar>,
}

/// Column space basis (pivot columns).
fn column_basis(m: &Matrix) -> Result<Vec<Vector>> {
    let (_, piv) = m.rref()?;
    Ok(piv.iter().map(|&j| m.column(j)).collect())
}

fn span_basis(t: &FieldTower, vs: &[Vector]) -> Result<Vec<Vector>> {
    if vs.is_empty() {
        return Ok(Vec::new());
    }
    column_basis(&Matrix::from_columns(t, vs))
}

/// Smallest subspace containing `start` and stable under the generator images.
fn stable_span(t: &FieldTower, gens: &[&Matrix], start: Vec<Vector>) -> Result<Vec<Vector>> {
    let mut basis = span_basis(t, &start)?;
    loop {
        let mut all = basis.clone();
        for g in gens {
            for b in &basis {
                all.push(g.mul_vec(b));
            }
        }
        let next = span_basis(t, &all)?;
        if next.len() == basis.len() {
            return Ok(basis);
        }
        basis = next;
    }
}

/// Builds a maximal stable totally isotropic subspace of (E, space) for a
/// group acting by isometries. Dual pairs of non-selfdual components
/// contribute the first member in component order; a selfdual component of
/// multiplicity m contributes S ⊗ N for N maximal isotropic in the
/// multiplicity space.
pub fn witt_witness(
    table: &GroupTable,
    rep: &Representation,
    space: &QuadSpace,
    split: &[IsotypicDatum],
) -> Result<WittWitness> {
    let mut t = rep.tower().clone();
    let mut vectors: Vec<Vector> = Vec::new();
    let mut extensions = Vec::new();
    let mut used = vec![false; split.len()];
    for i in 0..split.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let c = &split[i];
        if !c.selfdual {
            let j = dual_component(table, split, i).ok_or(Error::NotSimilitude)?;
            used[j] = true;
            vectors.extend(column_basis(&c.projector)?);
            continue;
        }
        if c.multiplicity < 2 {
            continue;
        }
        let (vs, ext) = selfdual_isotropic(table, rep, space, c, &mut t)?;
        extensions.extend(ext);
        vectors.extend(vs);
    }
    let vectors: Vec<Vector> =
        vectors.iter().map(|v| v.iter().map(|x| x.lift_to(&t)).collect::<std::result::Result<_, _>>()).collect::<std::result::Result<_, _>>()?;
    let space = space.lift_to(&t)?;
    let basis = span_basis(&t, &vectors)?;
    let subspace = SubspaceFlag::new(&space, basis)?;
    Ok(WittWitness { index: subspace.dim(), subspace, extensions })
}

fn selfdual_isotropic(
    table: &GroupTable,
    rep: &Representation,
    space: &QuadSpace,
    c: &IsotypicDatum,
    t: &mut FieldTower,
) -> Result<(Vec<Vector>, Vec<Scalar>)> {
    let base = rep.tower().clone();
    let comp = column_basis(&c.projector)?;
    let bmat = Matrix::from_columns(&base, &comp);
    // an element with an eigenvalue of multiplicity exactly m on the component
    let mut line: Option<Vec<Vector>> = None;
    for g in rep.images() {
        let img: Vec<Vector> = comp.iter().map(|v| g.mul_vec(v)).collect();
        let restricted = solve_columns(&bmat, &img)?;
        let cp = restricted.charpoly()?;
        let Ok(roots) = roots_in_tower(&cp) else { continue };
        if let Some((lam, _)) = roots.iter().find(|(_, k)| *k == c.multiplicity) {
            let shifted = restricted.sub(&Matrix::scalar_matrix(lam, restricted.rows()));
            let ker = kernel_basis(&shifted)?;
            if ker.len() == c.multiplicity {
                line = Some(ker.iter().map(|k| bmat.mul_vec(k)).collect());
                break;
            }
        }
    }
    let w = line.ok_or_else(|| Error::SplitFailed("no element with a simple eigenvalue on the constituent".into()))?;
    let m = w.len();
    let mut form = None;
    for g in rep.images() {
        let mut f = Matrix::zeros(&base, m, m);
        for a in 0..m {
            let gw = g.mul_vec(&w[a]);
            for b in 0..m {
                f.set(b, a, space.beta(&w[b], &gw));
            }
        }
        if !f.is_zero() {
            form = Some(f);
            break;
        }
    }
    let f = form.ok_or(Error::Degenerate)?;
    let symmetric = f == f.transpose();
    let mut n_vectors: Vec<Vector> = Vec::new();
    let mut exts = Vec::new();
    if symmetric {
        let qs = QuadSpace::new(f.clone())?;
        let ob = qs.orthogonal_basis()?;
        let cols: Vec<Vector> = (0..m).map(|i| ob.column(i)).collect();
        for pair in cols.chunks(2) {
            if pair.len() < 2 {
                break;
            }
            let (x, y) = (&pair[0], &pair[1]);
            let ratio = -(&qs.q(x) * &qs.q(y).inv()?);
            let mu = match try_sqrt(&ratio.lift_to(t)?) {
                Some(r) => r,
                None => {
                    let (nt, r) = adjoin_sqrt(t, &ratio)?;
                    *t = nt;
                    exts.push(ratio);
                    r
                }
            };
            n_vectors.push(x.iter().zip(y).map(|(a, b)| a + &(&mu * b)).collect());
        }
    } else {
        // alternating: greedy symplectic basis
        let mut rest: Vec<Vector> = (0..m).map(|i| (0..m).map(|j| if i == j { base.one() } else { base.zero() }).collect()).collect();
        let bil = |x: &[Scalar], y: &[Scalar]| -> Scalar {
            let fy = f.mul_vec(y);
            x.iter().zip(&fy).fold(base.zero(), |acc, (a, b)| &acc + &(a * b))
        };
        while let Some(x) = rest.pop() {
            let Some(k) = rest.iter().position(|y| !bil(&x, y).is_zero()) else { continue };
            let y = rest.remove(k);
            let bxy = bil(&x, &y).inv()?;
            for z in rest.iter_mut() {
                let a = &bil(z, &y) * &bxy;
                let b = &bil(&x, z) * &bxy;
                *z = z.iter().zip(&x).zip(&y).map(|((zi, xi), yi)| &(zi - &(&a * xi)) + &(&b * yi)).collect();
            }
            n_vectors.push(x);
        }
    }
    let start: Vec<Vector> = n_vectors
        .iter()
        .map(|coef| {
            let mut v = vec![t.zero(); space.dim()];
            for (c, wv) in coef.iter().zip(&w) {
                for (vi, wi) in v.iter_mut().zip(wv) {
                    *vi += &(c * wi);
                }
            }
            v
        })
        .collect();
    let gens: Vec<Matrix> = (0..table.num_generators())
        .map(|s| rep.image(table.generator_index(s)).lift_to(t))
        .collect::<std::result::Result<_, _>>()?;
    let grefs: Vec<&Matrix> = gens.iter().collect();
    let out = stable_span(t, &grefs, start)?;
    Ok((out, exts))
}

/// X with B·X = Y for B of full column rank and Y inside its column space.
pub fn solve_columns(b: &Matrix, y: &[Vector]) -> Result<Matrix> {
    let t = b.tower().clone();
    let mut cols = Vec::with_capacity(y.len());
    for v in y {
        cols.push(b.solve(v)?.ok_or(Error::DimensionMismatch { expected: b.cols(), got: 0 })?);
    }
    Ok(Matrix::from_columns(&t, &cols))
}

/// Dimension of {X : Xρ(s) = ρ(s)X for all generators s}.
pub fn centralizer_dimension(table: &GroupTable, rep: &Representation) -> Result<usize> {
    let n = rep.dim();
    let t = rep.tower().clone();
    let mut rows: Vec<Vector> = Vec::new();
    for s in 0..table.num_generators() {
        let g = rep.image(table.generator_index(s));
        for i in 0..n {
            for j in 0..n {
                // (Xg − gX)_{ij} = Σ_k X_{ik} g_{kj} − g_{ik} X_{kj}
                let mut row = vec![t.zero(); n * n];
                for k in 0..n {
                    row[i * n + k] += g.get(k, j);
                    row[k * n + j] -= g.get(i, k);
                }
                if !is_zero_vector(&row) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return Ok(n * n);
    }
    Ok(kernel_basis(&Matrix::from_rows(&t, rows))?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(t: &FieldTower, d: &[Scalar]) -> Matrix {
        Matrix::diagonal(t, d)
    }

    fn z4z2(t: &FieldTower) -> MatrixGroup {
        let i = t.zeta_pow(t.conductor() as i64 / 4);
        let a = diag(t, &[i.clone(), t.one()]);
        let b = diag(t, &[t.one(), t.from_int(-1)]);
        MatrixGroup::from_generators(vec![a, b]).unwrap()
    }

    fn q8(t: &FieldTower) -> MatrixGroup {
        let i = t.zeta_pow(t.conductor() as i64 / 4);
        let a = diag(t, &[i.clone(), -i.clone()]);
        let b = Matrix::from_int_rows(t, &[&[0, -1], &[1, 0]]);
        MatrixGroup::from_generators(vec![a, b]).unwrap()
    }

    fn s3_perm(t: &FieldTower) -> MatrixGroup {
        let c = Matrix::from_int_rows(t, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let s = Matrix::from_int_rows(t, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        MatrixGroup::from_generators(vec![c, s]).unwrap()
    }

    #[test]
    fn enumerate_small_groups() {
        let t = FieldTower::cyclotomic(4);
        let g = MatrixGroup::from_generators(vec![diag(&t, &[t.zeta(), t.one()])]).unwrap();
        assert_eq!(g.order().unwrap(), 4);
        assert_eq!(z4z2(&t).order().unwrap(), 8);
        assert_eq!(q8(&t).order().unwrap(), 8);
        let big = g.clone().with_cap(3);
        assert!(matches!(big.order(), Err(Error::OrderCapExceeded(3))));
        assert!(matches!(enumerate(&g, 2), Err(Error::OrderCapExceeded(2))));
    }

    #[test]
    fn order_two_characters() {
        let t = FieldTower::cyclotomic(4);
        assert_eq!(order2_linear_characters(z4z2(&t).table().unwrap()).len(), 4);
        let q = q8(&t);
        let tab = q.table().unwrap();
        assert_eq!(order2_linear_characters(tab).len(), 4);
        assert_eq!(square_subgroup(tab).len(), 2);
        let s = s3_perm(&t);
        assert_eq!(order2_linear_characters(s.table().unwrap()).len(), 2);
    }

    #[test]
    fn power_character_identities() {
        let t = FieldTower::rationals();
        let g = MatrixGroup::from_generators(vec![Matrix::identity(&t, 7)]).unwrap();
        let tab = g.table().unwrap();
        let pc = power_characters(tab, &Representation::natural(tab));
        assert_eq!(pc.lambda3()[0], t.from_int(35));
        assert_eq!(pc.sym2()[0], t.from_int(28));
        assert_eq!(repring_identity_check(tab, &Representation::natural(tab)), (true, None));
        let d = diag(&t, &[-1, -1, 1, 1, 1, 1, 1].map(|x| t.from_int(x)));
        let h = MatrixGroup::from_generators(vec![d]).unwrap();
        let ht = h.table().unwrap();
        let (ok, w) = repring_identity_check(ht, &Representation::natural(ht));
        assert!(!ok);
        assert_eq!(w, Some(1));
        let s = s3_perm(&FieldTower::cyclotomic(3));
        let st = s.table().unwrap();
        let pc = power_characters(st, &Representation::natural(st));
        for i in 0..st.len() {
            assert_eq!(&pc.lambda2()[i] + &pc.sym2()[i], &pc.chi[i] * &pc.chi[i]);
        }
    }

    #[test]
    fn split_examples() {
        let t = FieldTower::cyclotomic(12);
        let s = s3_perm(&t);
        let st = s.table().unwrap();
        let rep = Representation::natural(st);
        let split = isotypic_split(st, &rep).unwrap();
        let mut dims: Vec<(usize, usize)> = split.iter().map(|c| (c.dim, c.multiplicity)).collect();
        dims.sort();
        assert_eq!(dims, vec![(1, 1), (2, 1)]);
        assert!(split.iter().all(|c| c.selfdual));
        let trivial = MatrixGroup::from_generators(vec![Matrix::identity(&t, 7)]).unwrap();
        let tt = trivial.table().unwrap();
        let split = isotypic_split(tt, &Representation::natural(tt)).unwrap();
        assert_eq!(split.len(), 1);
        assert_eq!((split[0].dim, split[0].multiplicity, split[0].selfdual), (1, 7, true));
        assert!(matches!(
            isotypic_split(z4z2(&FieldTower::cyclotomic(4)).table().unwrap(), &rep_of(&z4z2(&FieldTower::cyclotomic(4))))
                .map(|s| s.len()),
            Ok(2)
        ));
        let q = FieldTower::rationals();
        let c3 = MatrixGroup::from_generators(vec![Matrix::from_int_rows(&q, &[&[0, -1], &[1, -1]])]).unwrap();
        assert!(matches!(
            isotypic_split(c3.table().unwrap(), &rep_of(&c3)),
            Err(Error::ExponentNotDividingConductor { exponent: 3, conductor: 1 })
        ));
    }

    fn rep_of(g: &MatrixGroup) -> Representation {
        Representation::natural(g.table().unwrap())
    }

    #[test]
    fn multiplicities() {
        let t = FieldTower::cyclotomic(4);
        let g = z4z2(&t);
        let tab = g.table().unwrap();
        let triv = vec![t.one(); tab.len()];
        let id3 = MatrixGroup::from_generators(vec![Matrix::identity(&t, 3)]).unwrap();
        let it = id3.table().unwrap();
        assert_eq!(multiplicity(it, &[t.one()], &Representation::natural(it).character()).unwrap(), 3);
        let chars = order2_linear_characters(tab);
        let nontriv = sign_character(&t, &chars[1]);
        let trivial_module = vec![t.from_int(3); tab.len()];
        assert_eq!(multiplicity(tab, &nontriv, &trivial_module).unwrap(), 0);
        assert_eq!(multiplicity(tab, &triv, &trivial_module).unwrap(), 3);
        let half = vec![t.from_ratio(1, 2); tab.len()];
        assert!(matches!(multiplicity(tab, &triv, &half), Err(Error::NonIntegerMultiplicity(_))));
    }

    #[test]
    fn witt_witness_on_hyperbolic_blocks() {
        let t = FieldTower::cyclotomic(4);
        let e = QuadSpace::e7(&t);
        let i = t.zeta();
        let mi = -i.clone();
        // characters i, −i on the first pair, trivial elsewhere
        let g = diag(&t, &[i.clone(), mi.clone(), t.one(), t.one(), t.one(), t.one(), t.one()]);
        let grp = MatrixGroup::from_generators(vec![g]).unwrap();
        let tab = grp.table().unwrap();
        let rep = Representation::natural(tab);
        let split = isotypic_split(tab, &rep).unwrap();
        assert_eq!(witt_index(&split), 3);
        let w = witt_witness(tab, &rep, &e, &split).unwrap();
        assert_eq!(w.index, 3);
        assert!(w.subspace.totally_isotropic);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn projectors_are_central_idempotents(k in 0usize..3) {
            let t = FieldTower::cyclotomic(12);
            let g = match k { 0 => s3_perm(&t), 1 => q8(&t), _ => z4z2(&t) };
            let tab = g.table().unwrap();
            let rep = Representation::natural(tab);
            let split = isotypic_split(tab, &rep).unwrap();
            let n = rep.dim();
            let mut sum = Matrix::zeros(&t, n, n);
            for (a, c) in split.iter().enumerate() {
                prop_assert_eq!(&c.projector.mul(&c.projector), &c.projector);
                for x in rep.images() {
                    prop_assert_eq!(&c.projector.mul(x), &x.mul(&c.projector));
                }
                for d in &split[a + 1..] {
                    prop_assert!(c.projector.mul(&d.projector).is_zero());
                }
                sum = sum.add(&c.projector);
            }
            prop_assert!(sum.is_identity());
            let dm: usize = split.iter().map(|c| c.dim * c.multiplicity).sum();
            prop_assert_eq!(dm, n);
            let msq: usize = split.iter().map(|c| c.multiplicity * c.multiplicity).sum();
            prop_assert_eq!(msq, centralizer_dimension(tab, &rep).unwrap());
        }

        #[test]
        fn random_diagonal_groups_split_consistently(e in prop::collection::vec(0i64..12, 7), f in prop::collection::vec(0i64..12, 7)) {
            let t = FieldTower::cyclotomic(12);
            let a = diag(&t, &e.iter().map(|&k| t.zeta_pow(k)).collect::<Vec<_>>());
            let b = diag(&t, &f.iter().map(|&k| t.zeta_pow(k)).collect::<Vec<_>>());
            let g = MatrixGroup::from_generators(vec![a, b]).unwrap();
            let tab = g.table().unwrap();
            let rep = Representation::natural(tab);
            let split = isotypic_split(tab, &rep).unwrap();
            let msq: usize = split.iter().map(|c| c.multiplicity * c.multiplicity).sum();
            prop_assert_eq!(msq, centralizer_dimension(tab, &rep).unwrap());
            for c in &split {
                prop_assert_eq!(c.dim, 1);
                for beta in order2_linear_characters(tab) {
                    let b = sign_character(&t, &beta);
                    prop_assert!(multiplicity(tab, &b, &c.character).is_ok());
                }
            }
        }
    }
}
