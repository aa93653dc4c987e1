//! Root finding in a tower through a degree-one prime.
//!
//! A prime p ≡ 1 (mod m) gives an embedding ζ ↦ ω of the cyclotomic base
//! into ℤ_p; each square-root level is followed when its radicand is a
//! nonzero square mod p. Roots mod p are Hensel lifted and the tower
//! coordinates are recovered by reducing the lattice of integer vectors
//! (c, d) with Σ c_b·ι(b) ≡ d·r (mod p^k). In degree one this is ordinary
//! rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FieldTower, Poly, Scalar, ScalarError};

/// Tuning knobs for [`roots_in_tower_with`].
#[derive(Clone, Debug)]
pub struct RootOptions {
    pub seed: u64,
    /// Number of accepted primes tried before giving up.
    pub prime_budget: usize,
    /// Number of precision doublings per prime.
    pub precision_doublings: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { seed: 0, prime_budget: 8, precision_doublings: 5 }
    }
}

/// All roots of `p` in its tower, with multiplicities.
pub fn roots_in_tower(p: &Poly) -> Result<Vec<(Scalar, usize)>, ScalarError> {
    roots_in_tower_with(p, &RootOptions::default())
}

/// [`roots_in_tower`] with explicit options.
///
/// `Ok` means every root in the tower was found (the count is certified by
/// the number of roots mod some prime). Otherwise the roots found so far are
/// returned inside `IncompleteSplit` together with the remaining cofactor.
pub fn roots_in_tower_with(p: &Poly, opts: &RootOptions) -> Result<Vec<(Scalar, usize)>, ScalarError> {
    let deg = p.degree().ok_or(ScalarError::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut certified = true;
    for (f, mult) in p.squarefree_decomposition()? {
        let (roots, ok) = squarefree_roots(&f, opts)?;
        certified &= ok;
        out.extend(roots.into_iter().map(|r| (r, mult)));
    }
    if certified {
        return Ok(out);
    }
    let mut cof = p.monic()?;
    for (r, m) in &out {
        for _ in 0..*m {
            cof = cof.exact_div(&Poly::linear(r)).expect("verified root");
        }
    }
    Err(ScalarError::IncompleteSplit { roots: out, cofactor: cof })
}

fn squarefree_roots(f: &Poly, opts: &RootOptions) -> Result<(Vec<Scalar>, bool), ScalarError> {
    let f = f.monic()?;
    let tower = f.tower().clone();
    let n = f.degree().unwrap();
    if n == 1 {
        return Ok((vec![-f.coeff(0)], true));
    }
    let mut found: Vec<Scalar> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut primes = PrimeStream::new(&tower, opts.seed);
    let mut bound = n;
    let mut accepted = 0;
    while accepted < opts.prime_budget {
        let p = match primes.next() {
            Some(p) => p,
            None => break,
        };
        let emb = match Embedding::new(&tower, p, 1) {
            Some(e) => e,
            None => continue,
        };
        let fp = match emb.poly_mod_p(&f) {
            Some(v) => v,
            None => continue,
        };
        if !fp::is_squarefree(&fp, p) {
            continue;
        }
        accepted += 1;
        let roots = fp::roots(&fp, p, &mut rng);
        bound = bound.min(roots.len());
        if found.len() >= bound {
            return Ok((found, true));
        }
        let known: Vec<u64> = found.iter().filter_map(|r| emb.scalar_mod_p(r)).collect();
        let pending: Vec<u64> = roots.into_iter().filter(|r| !known.contains(r)).collect();
        if pending.is_empty() {
            continue;
        }
        // start low and double: reconstructions are verified by evaluation
        let cap = initial_bits(&f) << opts.precision_doublings;
        let mut bits = (32 * tower.degree() as u64 + 64).min(cap);
        let mut pending = pending;
        loop {
            let k = (bits / 63 + 1) as u32;
            let Some(lifted) = Embedding::new(&tower, p, k) else { break };
            let fk = lifted.poly_images(&f).expect("denominators checked mod p");
            let mut rest = Vec::new();
            for &r0 in &pending {
                let r = hensel_lift(&fk, r0, &lifted.modulus, k);
                match reconstruct(&lifted, &r).filter(|a| f.eval(a).is_zero()) {
                    Some(a) => found.push(a),
                    None => rest.push(r0),
                }
            }
            pending = rest;
            if pending.is_empty() || found.len() >= bound || bits >= cap {
                break;
            }
            bits = (bits * 2).min(cap);
        }
        if found.len() >= bound {
            return Ok((found, true));
        }
    }
    let ok = found.len() >= bound;
    Ok((found, ok))
}

fn initial_bits(f: &Poly) -> u64 {
    // Fujiwara-type estimate of root size from coefficient sizes
    let n = f.degree().unwrap() as u64;
    let t = f.tower();
    let d = t.degree() as u64;
    let mut root_bits = 1u64;
    let mut den_bits = 1u64;
    for (i, c) in f.coeffs().iter().enumerate() {
        let j = n - i as u64;
        if j == 0 {
            continue;
        }
        let s: BigInt = c.numerators().iter().map(|x| x.abs()).sum();
        let b = s.bits().saturating_sub(c.denominator().bits()) + 1;
        root_bits = root_bits.max(b / j + 2);
        den_bits += c.denominator().bits();
    }
    let rad_bits: u64 = (0..t.depth())
        .map(|i| t.radicand_raw(i).iter().map(|x| x.bits()).max().unwrap_or(0) / 2 + 2)
        .sum();
    let norm_bits = root_bits + den_bits + rad_bits + d + 8;
    d * (2 * norm_bits + d + 8) + 64
}

struct PrimeStream {
    step: u64,
    cur: u64,
    scanned: usize,
}

impl PrimeStream {
    fn new(t: &FieldTower, seed: u64) -> PrimeStream {
        let m = t.conductor();
        let step = if m.is_multiple_of(2) { m } else { 2 * m };
        let base = (1u64 << 40) / step + (seed % 100_000) * 7919;
        PrimeStream { step, cur: base, scanned: 0 }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.scanned < 2_000_000 {
            self.scanned += 1;
            self.cur += 1;
            let p = 1 + self.cur * self.step;
            if fp::is_prime(p) {
                return Some(p);
            }
        }
        None
    }
}

/// An embedding of the tower into ℤ/p^k.
struct Embedding {
    tower: FieldTower,
    p: u64,
    modulus: BigInt,
    // image of each flat basis element
    images: Vec<BigInt>,
}

impl Embedding {
    /// None when p is unsuitable (some radicand is not a nonzero square mod p).
    fn new(t: &FieldTower, p: u64, k: u32) -> Option<Embedding> {
        let m = t.conductor();
        let phi = t.phi();
        let modulus = BigInt::from(p).pow(k);
        let w0 = fp::primitive_root_of_unity(m, p)?;
        let cyclo: Vec<BigInt> = t.cyclotomic_modulus().to_vec();
        let w = newton_lift(&cyclo, BigInt::from(w0), &modulus, k);
        let mut images = Vec::with_capacity(t.degree());
        let mut acc = BigInt::one();
        for _ in 0..phi {
            images.push(acc.clone());
            acc = (&acc * &w).mod_floor(&modulus);
        }
        for i in 0..t.depth() {
            let rad = t.radicand_raw(i);
            let mut r = BigInt::zero();
            for (b, c) in rad.iter().enumerate() {
                r += c * &images[b];
            }
            let r = r.mod_floor(&modulus);
            let rp = (&r % BigInt::from(p)).to_u64().unwrap();
            let s0 = fp::sqrt_mod(rp, p)?;
            if s0 == 0 {
                return None;
            }
            let sq = vec![-r.clone(), BigInt::zero(), BigInt::one()];
            let s = newton_lift(&sq, BigInt::from(s0), &modulus, k);
            let upper: Vec<BigInt> = images.iter().map(|x| (x * &s).mod_floor(&modulus)).collect();
            images.extend(upper);
        }
        Some(Embedding { tower: t.clone(), p, modulus, images })
    }

    fn scalar_image(&self, x: &Scalar) -> Option<BigInt> {
        let den = x.denominator().mod_floor(&self.modulus);
        let inv = mod_inverse(&den, &self.modulus)?;
        let mut acc = BigInt::zero();
        for (c, im) in x.numerators().iter().zip(&self.images) {
            if !c.is_zero() {
                acc += c * im;
            }
        }
        Some((acc * inv).mod_floor(&self.modulus))
    }

    fn scalar_mod_p(&self, x: &Scalar) -> Option<u64> {
        self.scalar_image(x).map(|v| (v % BigInt::from(self.p)).to_u64().unwrap())
    }

    fn poly_images(&self, f: &Poly) -> Option<Vec<BigInt>> {
        f.coeffs().iter().map(|c| self.scalar_image(c)).collect()
    }

    fn poly_mod_p(&self, f: &Poly) -> Option<Vec<u64>> {
        let pb = BigInt::from(self.p);
        self.poly_images(f).map(|v| v.iter().map(|x| (x % &pb).to_u64().unwrap()).collect())
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

fn eval_mod(f: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in f.iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

fn deriv(f: &[BigInt]) -> Vec<BigInt> {
    f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

/// Newton iteration for a simple root mod p^k starting from a root mod p.
fn newton_lift(f: &[BigInt], r0: BigInt, m: &BigInt, k: u32) -> BigInt {
    let df = deriv(f);
    let mut r = r0;
    let mut prec = 1u32;
    while prec < k {
        let num = eval_mod(f, &r, m);
        let den = eval_mod(&df, &r, m);
        let inv = mod_inverse(&den, m).expect("simple root");
        r = (r - num * inv).mod_floor(m);
        prec *= 2;
    }
    r
}

fn hensel_lift(f: &[BigInt], r0: u64, m: &BigInt, k: u32) -> BigInt {
    newton_lift(f, BigInt::from(r0), m, k)
}

/// Recovers a tower element from its image r mod p^k.
fn reconstruct(e: &Embedding, r: &BigInt) -> Option<Scalar> {
    let d = e.images.len();
    let n = d + 1;
    let half = &e.modulus >> 1;
    let sym = |x: BigInt| if x > half { x - &e.modulus } else { x };
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    let mut row = vec![BigInt::zero(); n];
    row[0] = e.modulus.clone();
    basis.push(row);
    for b in 1..d {
        let mut row = vec![BigInt::zero(); n];
        row[0] = sym((-&e.images[b]).mod_floor(&e.modulus));
        row[b] = BigInt::one();
        basis.push(row);
    }
    let mut row = vec![BigInt::zero(); n];
    row[0] = sym(r.clone());
    row[d] = BigInt::one();
    basis.push(row);
    lll::reduce(&mut basis);
    basis.iter().find_map(|v| {
        if v[d].is_zero() {
            return None;
        }
        Some(Scalar::new_normalized(e.tower.clone(), v[..d].to_vec(), v[d].clone()))
    })
}

mod lll {
    //! Integral LLL reduction (exact, δ = 99/100).

    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{Signed, Zero};

    fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
        // nearest integer to a/b, b > 0
        let two = BigInt::from(2);
        (a * &two + b).div_floor(&(b * &two))
    }

    /// Reduces the rows of `b` in place; rows must be linearly independent.
    pub fn reduce(b: &mut Vec<Vec<BigInt>>) {
        let n = b.len();
        if n < 2 {
            return;
        }
        // 1-based bookkeeping: d[0] = 1, d[i] for vector i-1
        let mut d = vec![BigInt::zero(); n + 1];
        let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
        d[0] = BigInt::from(1);
        d[1] = dot(&b[0], &b[0]);
        let mut k = 2usize;
        let mut kmax = 1usize;
        while k <= n {
            if k > kmax {
                kmax = k;
                for j in 1..=k {
                    let mut u = dot(&b[k - 1], &b[j - 1]);
                    for i in 1..j {
                        u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                    }
                    if j < k {
                        lam[k][j] = u;
                    } else {
                        assert!(!u.is_zero(), "dependent lattice basis");
                        d[k] = u;
                    }
                }
            }
            loop {
                red(b, &mut lam, &d, k, k - 1);
                let l2 = &lam[k][k - 1] * &lam[k][k - 1];
                let lhs = BigInt::from(100) * &d[k] * &d[k - 2];
                let rhs = BigInt::from(99) * &d[k - 1] * &d[k - 1] - BigInt::from(100) * l2;
                if lhs < rhs {
                    swap(b, &mut lam, &mut d, k, kmax);
                    if k > 2 {
                        k -= 1;
                    }
                } else {
                    break;
                }
            }
            for l in (1..k - 1).rev() {
                red(b, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }

    fn red(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
        let two_l = &lam[k][l] * BigInt::from(2);
        if two_l.abs() <= d[l] {
            return;
        }
        let q = round_div(&lam[k][l], &d[l]);
        let bl = b[l - 1].clone();
        for (x, y) in b[k - 1].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        lam[k][l] = &lam[k][l] - &q * &d[l];
        for i in 1..l {
            let t = &q * &lam[l][i];
            lam[k][i] -= t;
        }
    }

    fn swap(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
        b.swap(k - 1, k - 2);
        for j in 1..k - 1 {
            let t = lam[k][j].clone();
            lam[k][j] = lam[k - 1][j].clone();
            lam[k - 1][j] = t;
        }
        let l = lam[k][k - 1].clone();
        let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
        for i in k + 1..=kmax {
            let t = lam[i][k].clone();
            lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
            lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
        }
        d[k - 1] = bb;
    }

}

pub(crate) mod fp {
    //! Small prime field helpers on u64.

    use rand::Rng;

    pub fn mul(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a, p);
            }
            a = mul(a, a, p);
            e >>= 1;
        }
        r
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        pow(a, p - 2, p)
    }

    pub fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n.is_multiple_of(q) {
                return n == q;
            }
        }
        let mut d = n - 1;
        let mut s = 0;
        while d.is_multiple_of(2) {
            d /= 2;
            s += 1;
        }
        'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = pow(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 1..s {
                x = mul(x, x, n);
                if x == n - 1 {
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    fn prime_factors(mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut q = 2;
        while q * q <= n {
            if n.is_multiple_of(q) {
                out.push(q);
                while n.is_multiple_of(q) {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// A primitive m-th root of unity mod p, for m | p − 1.
    pub fn primitive_root_of_unity(m: u64, p: u64) -> Option<u64> {
        if !(p - 1).is_multiple_of(m) {
            return None;
        }
        let qs = prime_factors(m);
        for g in 2..p.min(10_000) {
            let w = pow(g, (p - 1) / m, p);
            if qs.iter().all(|&q| pow(w, m / q, p) != 1) {
                return Some(w);
            }
        }
        None
    }

    /// Some square root of a mod p (Tonelli–Shanks), None for non-residues.
    pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
        let a = a % p;
        if a == 0 {
            return Some(0);
        }
        if pow(a, (p - 1) / 2, p) != 1 {
            return None;
        }
        let mut q = p - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while pow(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow(z, q, p);
        let mut t = pow(a, q, p);
        let mut r = pow(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul(t2, t2, p);
                i += 1;
            }
            let b = pow(c, 1 << (m - i - 1), p);
            m = i;
            c = mul(b, b, p);
            t = mul(t, c, p);
            r = mul(r, b, p);
        }
        Some(r)
    }

    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut v: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut v);
        v
    }

    fn mulp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut v = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                v[i + j] = (v[i + j] + mul(x, y, p)) % p;
            }
        }
        trim(&mut v);
        v
    }

    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        divrem(a, b, p).1
    }

    fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        if r.len() < b.len() {
            return (vec![], r);
        }
        let il = inv(b[db], p);
        let mut q = vec![0u64; r.len() - db];
        for i in (0..q.len()).rev() {
            let c = mul(r[i + db], il, p);
            if c == 0 {
                continue;
            }
            for j in 0..=db {
                r[i + j] = (r[i + j] + p - mul(c, b[j], p)) % p;
            }
            q[i] = c;
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let il = inv(l, p);
            for x in a.iter_mut() {
                *x = mul(*x, il, p);
            }
        }
        a
    }

    fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem(&mulp(&r, &b, p), m, p);
            }
            b = rem(&mulp(&b, &b, p), m, p);
            e >>= 1;
        }
        r
    }

    fn derivative(f: &[u64], p: u64) -> Vec<u64> {
        let mut v: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, &c)| mul(c, i as u64 % p, p)).collect();
        trim(&mut v);
        v
    }

    pub fn is_squarefree(f: &[u64], p: u64) -> bool {
        let mut f = f.to_vec();
        trim(&mut f);
        if f.len() <= 1 {
            return !f.is_empty();
        }
        gcd(&f, &derivative(&f, p), p).len() == 1
    }

    /// Distinct roots in F_p of a squarefree polynomial.
    pub fn roots<R: Rng>(f: &[u64], p: u64, rng: &mut R) -> Vec<u64> {
        let mut f = f.to_vec();
        trim(&mut f);
        if f.len() <= 1 {
            return vec![];
        }
        let xp = powmod(&[0, 1], p, &f, p);
        let g = gcd(&f, &sub(&xp, &[0, 1], p), p);
        let mut out = Vec::new();
        split(&g, p, rng, &mut out);
        out.sort_unstable();
        out
    }

    fn split<R: Rng>(g: &[u64], p: u64, rng: &mut R, out: &mut Vec<u64>) {
        match g.len() {
            0 | 1 => {}
            2 => out.push(mul(p - g[0], inv(g[1], p), p)),
            _ => loop {
                let a = rng.gen_range(0..p);
                let h = powmod(&[a, 1], (p - 1) / 2, g, p);
                let d = gcd(g, &sub(&h, &[1], p), p);
                if d.len() > 1 && d.len() < g.len() {
                    let q = divrem(g, &d, p).0;
                    split(&d, p, rng, out);
                    split(&q, p, rng, out);
                    return;
                }
            },
        }
    }

}

/// Square root inside the tower by descent through the square-root levels.
pub(crate) fn sqrt_in_tower(x: &Scalar) -> Option<Scalar> {
    if x.is_zero() {
        return Some(x.clone());
    }
    let s = x.tower().depth();
    sqrt_at_level(x, s).map(|r| r.lift_to(x.tower()).expect("prefix tower"))
}

fn restrict(x: &Scalar, s: usize) -> Scalar {
    let t = x.tower().prefix(s);
    let n = t.degree();
    debug_assert!(x.numerators()[n..].iter().all(|c| c.is_zero()));
    Scalar::new_normalized(t, x.numerators()[..n].to_vec(), x.denominator().clone())
}

fn halves(x: &Scalar, s: usize) -> (Scalar, Scalar) {
    let t = x.tower().prefix(s - 1);
    let h = t.degree();
    let num = x.numerators();
    (
        Scalar::new_normalized(t.clone(), num[..h].to_vec(), x.denominator().clone()),
        Scalar::new_normalized(t, num[h..2 * h].to_vec(), x.denominator().clone()),
    )
}

fn sqrt_at_level(x: &Scalar, s: usize) -> Option<Scalar> {
    let x = restrict(x, s);
    if x.is_zero() {
        return Some(x);
    }
    if s == 0 {
        return sqrt_base(&x);
    }
    let t = x.tower().clone();
    let (a, b) = halves(&x, s);
    let d = t.radicands()[s - 1].clone();
    let g = t.sqrt_generator(s - 1);
    if b.is_zero() {
        if let Some(r) = sqrt_at_level(&a, s - 1) {
            return Some(r.lift_to(&t).unwrap());
        }
        let u = sqrt_at_level(&a.try_div(&d).ok()?, s - 1)?;
        return Some(&u.lift_to(&t).unwrap() * &g);
    }
    let norm = &(&a * &a) - &(&(&b * &b) * &d);
    let n = sqrt_at_level(&norm, s - 1)?;
    let half = a.tower().from_ratio(1, 2);
    for sign in [1i64, -1] {
        let c2 = &(&a + &n.mul_int(&sign.into())) * &half;
        if c2.is_zero() {
            continue;
        }
        if let Some(c) = sqrt_at_level(&c2, s - 1) {
            let e = b.try_div(&c.mul_int(&2.into())).ok()?;
            let y = &c.lift_to(&t).unwrap() + &(&e.lift_to(&t).unwrap() * &g);
            if &y * &y == x {
                return Some(y);
            }
        }
    }
    None
}

fn sqrt_base(x: &Scalar) -> Option<Scalar> {
    let t = x.tower().clone();
    if let Some(q) = x.as_rational() {
        if q.is_negative() {
            if t.phi() == 1 {
                return None;
            }
        } else {
            let nd = q.numer() * q.denom();
            let r = nd.sqrt();
            if &r * &r == nd {
                return Some(t.from_ratio(r, q.denom().clone()));
            }
            if t.phi() == 1 {
                return None;
            }
        }
    }
    let f = Poly::new(&t, vec![-x, t.zero(), t.one()]);
    let roots = match roots_in_tower(&f) {
        Ok(r) => r,
        Err(ScalarError::IncompleteSplit { roots, .. }) => roots,
        Err(_) => return None,
    };
    roots.into_iter().map(|(r, _)| r).next()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_roots(p: &Poly, expected: usize) -> Vec<(Scalar, usize)> {
        let r = roots_in_tower(p).unwrap();
        assert_eq!(r.iter().map(|x| x.1).sum::<usize>(), expected);
        for (x, _) in &r {
            assert!(p.eval(x).is_zero());
        }
        r
    }

    #[test]
    fn rational_roots() {
        let q = FieldTower::rationals();
        let p = Poly::from_ints(&q, &[2, -3, 1]);
        let r = check_roots(&p, 2);
        assert!(r.contains(&(q.from_int(1), 1)) && r.contains(&(q.from_int(2), 1)));
        let p = Poly::from_ints(&q, &[-1, 0, 9]).mul(&Poly::from_ints(&q, &[-1, 1]).pow(2));
        let r = check_roots(&p, 4);
        assert!(r.contains(&(q.from_ratio(1, 3), 1)) && r.contains(&(q.from_int(1), 2)));
        assert!(roots_in_tower(&Poly::from_ints(&q, &[-2, 0, 1])).unwrap().is_empty());
    }

    #[test]
    fn cyclotomic_roots() {
        let t4 = FieldTower::cyclotomic(4);
        let r = check_roots(&Poly::from_ints(&t4, &[1, 0, 1]), 2);
        assert!(r.iter().any(|(x, _)| *x == t4.zeta()));
        let t8 = FieldTower::cyclotomic(8);
        let r = check_roots(&Poly::from_ints(&t8, &[-2, 0, 1]), 2);
        let z = t8.zeta();
        let s = &z + &z.inv().unwrap();
        assert!(r.iter().any(|(x, _)| *x == s) && r.iter().any(|(x, _)| *x == -s.clone()));
        let t24 = FieldTower::cyclotomic(24);
        let roots: Vec<Scalar> = (0..6).map(|k| &t24.zeta_pow(k) * &t24.from_ratio(k + 2, 3)).collect();
        let p = Poly::from_roots(&t24, &roots);
        check_roots(&p, 6);
    }

    #[test]
    fn sqrt_levels() {
        let q = FieldTower::rationals();
        let (t, r2) = q.push_sqrt_unchecked(&q.from_int(2)).unwrap();
        let (t, r3) = t.push_sqrt_unchecked(&t.from_int(3)).unwrap();
        let y = &(&r2 + &r3) + &t.from_ratio(1, 5);
        let x = &y * &y;
        let s = sqrt_in_tower(&x).unwrap();
        assert_eq!(&s * &s, x);
        let p = Poly::from_roots(&t, &[r2.clone(), r3.clone(), &r2 * &r3]);
        check_roots(&p, 3);
        assert!(sqrt_in_tower(&t.from_int(6)).is_some());
        assert!(sqrt_in_tower(&t.from_int(5)).is_none());
    }
}
