//! Dense matrices over a tower.

use std::fmt;
use std::hash::{Hash, Hasher};

use super::{FieldTower, Poly, Scalar, ScalarError};

#[derive(Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    tower: FieldTower,
    data: Vec<Scalar>,
}

impl PartialEq for Matrix {
    fn eq(&self, o: &Matrix) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data == o.data
    }
}

impl Eq for Matrix {}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        for x in &self.data {
            x.hash(state);
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(tower: &FieldTower, rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, tower: tower.clone(), data: vec![tower.zero(); rows * cols] }
    }

    pub fn identity(tower: &FieldTower, n: usize) -> Matrix {
        let mut m = Matrix::zeros(tower, n, n);
        for i in 0..n {
            m.set(i, i, tower.one());
        }
        m
    }

    pub fn scalar_matrix(c: &Scalar, n: usize) -> Matrix {
        let t = c.tower().clone();
        let mut m = Matrix::zeros(&t, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn diagonal(tower: &FieldTower, d: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(tower, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.lift_to(tower).expect("entry outside tower"));
        }
        m
    }

    pub fn from_rows(tower: &FieldTower, rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for x in row {
                data.push(x.lift_to(tower).expect("entry outside tower"));
            }
        }
        Matrix { rows: r, cols: c, tower: tower.clone(), data }
    }

    pub fn from_int_rows(tower: &FieldTower, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(tower, rows.iter().map(|r| r.iter().map(|&x| tower.from_int(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(tower: &FieldTower, cols: &[Vec<Scalar>]) -> Matrix {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(tower, r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.lift_to(tower).expect("entry outside tower"));
            }
        }
        m
    }

    /// Companion matrix of a monic polynomial (last column carries −p_i).
    pub fn companion(p: &Poly) -> Matrix {
        let n = p.degree().expect("nonzero polynomial");
        let t = p.tower().clone();
        let mut m = Matrix::zeros(&t, n, n);
        for i in 1..n {
            m.set(i, i - 1, t.one());
        }
        for i in 0..n {
            m.set(i, n - 1, -p.coeff(i));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn lift_to(&self, tower: &FieldTower) -> Result<Matrix, ScalarError> {
        let data = self.data.iter().map(|x| x.lift_to(tower)).collect::<Result<_, _>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, tower: tower.clone(), data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| if r == c { self.get(r, c).is_one() } else { self.get(r, c).is_zero() }))
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(&self.tower, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let tower = self.tower.join(&o.tower).unwrap_or_else(|| self.tower.clone());
        let mut m = Matrix::zeros(&tower, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    m.data[idx] = &m.data[idx] + &(a * b);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.tower.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data: Vec<Scalar> = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        let tower = data.first().map_or(self.tower.clone(), |x: &Scalar| x.tower().clone());
        Matrix { rows: self.rows, cols: self.cols, tower, data }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data: Vec<Scalar> = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        let tower = data.first().map_or(self.tower.clone(), |x: &Scalar| x.tower().clone());
        Matrix { rows: self.rows, cols: self.cols, tower, data }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data: Vec<Scalar> = self.data.iter().map(|a| a * c).collect();
        let tower = data.first().map_or(self.tower.clone(), |x: &Scalar| x.tower().clone());
        Matrix { rows: self.rows, cols: self.cols, tower, data }
    }

    pub fn neg(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, tower: self.tower.clone(), data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = self.tower.zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    pub fn pow(&self, e: u64) -> Matrix {
        let mut acc = Matrix::identity(&self.tower, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Matrix) -> Matrix {
        let tower = self.tower.join(&o.tower).unwrap_or_else(|| self.tower.clone());
        let mut m = Matrix::zeros(&tower, self.rows + o.rows, self.cols + o.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).lift_to(&tower).expect("tower"));
            }
        }
        for r in 0..o.rows {
            for c in 0..o.cols {
                m.set(self.rows + r, self.cols + c, o.get(r, c).lift_to(&tower).expect("tower"));
            }
        }
        m
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        let mut m = Matrix::zeros(&self.tower, nr, nc);
        for r in 0..nr {
            for c in 0..nc {
                m.set(r, c, self.get(r0 + r, c0 + c).clone());
            }
        }
        m
    }

    /// Characteristic polynomial det(t·I − M), by Berkowitz's division-free recursion.
    pub fn charpoly(&self) -> Result<Poly, ScalarError> {
        if !self.is_square() {
            return Err(ScalarError::NonSquareMatrix);
        }
        let n = self.rows;
        let t = &self.tower;
        // v holds coefficients high to low of the charpoly of the leading k×k block
        let mut v: Vec<Scalar> = vec![t.one()];
        for k in 0..n {
            // block A_{k+1}: M = A_k, R = row k (cols < k), C = column k (rows < k), a = A[k][k]
            let a = self.get(k, k).clone();
            let r: Vec<Scalar> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let mut col: Vec<Scalar> = (0..k).map(|i| self.get(i, k).clone()).collect();
            // Toeplitz first column: 1, -a, -R C, -R M C, ...
            let mut tcol = vec![t.one(), -&a];
            for _ in 0..k {
                let mut dot = t.zero();
                for j in 0..k {
                    if !r[j].is_zero() && !col[j].is_zero() {
                        dot += &(&r[j] * &col[j]);
                    }
                }
                tcol.push(-dot);
                // col <- M col
                let mut next = vec![t.zero(); k];
                for i in 0..k {
                    let mut acc = t.zero();
                    for j in 0..k {
                        let m = self.get(i, j);
                        if !m.is_zero() && !col[j].is_zero() {
                            acc += &(m * &col[j]);
                        }
                    }
                    next[i] = acc;
                }
                col = next;
            }
            // new v = T v, T is (k+2)×(k+1) lower-triangular Toeplitz
            let mut nv = vec![t.zero(); k + 2];
            for i in 0..k + 2 {
                let mut acc = t.zero();
                for j in 0..=k.min(i) {
                    if i - j < tcol.len() && !v[j].is_zero() {
                        acc += &(&tcol[i - j] * &v[j]);
                    }
                }
                nv[i] = acc;
            }
            v = nv;
        }
        v.reverse();
        Ok(Poly::new(t, v))
    }

    pub fn det(&self) -> Result<Scalar, ScalarError> {
        if !self.is_square() {
            return Err(ScalarError::NonSquareMatrix);
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = self.tower.one();
        for c in 0..n {
            let p = match (c..n).find(|&r| !m.get(r, c).is_zero()) {
                Some(p) => p,
                None => return Ok(self.tower.zero()),
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv()?;
            for r in c + 1..n {
                let f = m.get(r, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = m.get(r, k) - &(&f * m.get(c, k));
                    m.set(r, k, v);
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> Result<(Matrix, Vec<usize>), ScalarError> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..self.cols {
            if row == self.rows {
                break;
            }
            let p = match (row..self.rows).find(|&r| !m.get(r, c).is_zero()) {
                Some(p) => p,
                None => continue,
            };
            m.swap_rows(p, row);
            let inv = m.get(row, c).inv()?;
            for k in c..self.cols {
                let v = m.get(row, k) * &inv;
                m.set(row, k, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for k in c..self.cols {
                    let pk = m.get(row, k);
                    if pk.is_zero() {
                        continue;
                    }
                    let v = m.get(r, k) - &(&f * pk);
                    m.set(r, k, v);
                }
            }
            pivots.push(c);
            row += 1;
        }
        Ok((m, pivots))
    }

    pub fn rank(&self) -> Result<usize, ScalarError> {
        Ok(self.rref()?.1.len())
    }

    pub fn inverse(&self) -> Result<Matrix, ScalarError> {
        if !self.is_square() {
            return Err(ScalarError::NonSquareMatrix);
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.tower, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, self.tower.one());
        }
        let (red, piv) = aug.rref()?;
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(ScalarError::Singular);
        }
        Ok(red.submatrix(0, n, n, n))
    }

    /// Solves M x = b for one solution, if any.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, ScalarError> {
        let n = self.cols;
        let mut aug = Matrix::zeros(&self.tower, self.rows, n + 1);
        for r in 0..self.rows {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n, b[r].lift_to(&self.tower)?);
        }
        let (red, piv) = aug.rref()?;
        if piv.last() == Some(&n) {
            return Ok(None);
        }
        let mut x = vec![self.tower.zero(); n];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = red.get(i, n).clone();
        }
        Ok(Some(x))
    }
}

/// Basis of the right kernel {x : M x = 0}.
pub fn kernel_basis(m: &Matrix) -> Result<Vec<Vec<Scalar>>, ScalarError> {
    let (red, piv) = m.rref()?;
    let t = m.tower();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !piv.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v = vec![t.zero(); m.cols()];
        v[f] = t.one();
        for (i, &p) in piv.iter().enumerate() {
            v[p] = -red.get(i, f);
        }
        out.push(v);
    }
    Ok(out)
}
