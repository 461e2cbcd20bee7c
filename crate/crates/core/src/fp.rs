//! Dense linear algebra over the prime field `F_p`.
//!
//! Vectors are row vectors; a matrix `A` acts on the right, `v ↦ v·A`.
//! A [`Functional`] `λ` evaluates as `λ(v) = Σ v_i λ_i` and stands for the
//! hyperplane `ker λ`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus accepted; entries and products then fit in `u64`.
pub const MAX_PRIME: u64 = 1 << 16;

/// Validates `p` as a prime not exceeding [`MAX_PRIME`].
pub fn check_prime(p: u64) -> Result<u32> {
    if !(2..=MAX_PRIME).contains(&p) {
        return Err(Error::InvalidPrime(p));
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return Err(Error::InvalidPrime(p));
        }
        d += 1;
    }
    Ok(p as u32)
}

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (s % p as u64) as u32
}

#[inline]
fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// Multiplicative inverse by Fermat; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    let mut base = a as u64 % p as u64;
    let mut exp = p as u64 - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// Reduces a signed integer into `[0, p)`.
pub fn residue(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix(p={}, {}x{})", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = FpMatrix::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Builds a matrix from signed rows, reducing every entry mod `p`.
    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&x| residue(x, p)));
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from rows already reduced into `[0, p)`.
    pub fn from_residue_rows(p: u32, cols: usize, rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.into_iter().map(|x| x % p));
        }
        FpMatrix { p, rows: n, cols, data }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows || self.p != other.p {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p as u64;
        let mut out = FpMatrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(k, j) as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let p = self.p as u64;
        let mut out = vec![0u64; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = (*o + a as u64 * self.get(k, j) as u64) % p;
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    /// Matrix times column vector.
    pub fn apply_col(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        (0..self.rows)
            .map(|r| {
                let s = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    /// Reduced row echelon form with pivots chosen as the first nonzero
    /// entry scanning columns left to right. Returns the reduced matrix
    /// (zero rows at the bottom) and the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let inv = inv_mod(m.get(r, c), p);
            for j in c..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = mul_mod(m.data[idx], inv, p);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                let nf = neg_mod(f, p);
                for j in c..m.cols {
                    let v = mul_mod(nf, m.data[r * m.cols + j], p);
                    let idx = i * m.cols + j;
                    m.data[idx] = add_mod(m.data[idx], v, p);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace `{x : M x = 0}`, one vector per free
    /// column in increasing order.
    pub fn nullspace(&self) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f].is_some() {
                continue;
            }
            let mut x = vec![0u32; self.cols];
            x[f] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                x[c] = neg_mod(r.get(i, f), self.p);
            }
            basis.push(x);
        }
        basis
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Determinant by elimination.
    pub fn det(&self) -> Result<u32> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let p = self.p;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1 % p;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return Ok(0);
            };
            if piv != c {
                for j in 0..n {
                    m.data.swap(piv * n + j, c * n + j);
                }
                det = neg_mod(det, p);
            }
            let d = m.get(c, c);
            det = mul_mod(det, d, p);
            let inv = inv_mod(d, p);
            for i in c + 1..n {
                let f = mul_mod(m.get(i, c), inv, p);
                if f == 0 {
                    continue;
                }
                let nf = neg_mod(f, p);
                for j in c..n {
                    let v = mul_mod(nf, m.data[c * n + j], p);
                    m.data[i * n + j] = add_mod(m.data[i * n + j], v, p);
                }
            }
        }
        Ok(det)
    }

    /// Characteristic polynomial `det(xI - A)`, coefficients from the
    /// constant term up (monic, length `n + 1`), via Hessenberg reduction.
    pub fn charpoly(&self) -> Result<Vec<u32>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("charpoly of a non-square matrix".into()));
        }
        let p = self.p;
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| h.get(i, m - 1) != 0) else {
                continue;
            };
            if i != m {
                for j in 0..n {
                    h.data.swap(i * n + j, m * n + j);
                }
                for j in 0..n {
                    h.data.swap(j * n + i, j * n + m);
                }
            }
            let inv = inv_mod(h.get(m, m - 1), p);
            for i in m + 1..n {
                let u = mul_mod(h.get(i, m - 1), inv, p);
                if u == 0 {
                    continue;
                }
                let nu = neg_mod(u, p);
                for j in 0..n {
                    let v = mul_mod(nu, h.data[m * n + j], p);
                    h.data[i * n + j] = add_mod(h.data[i * n + j], v, p);
                }
                for j in 0..n {
                    let v = mul_mod(u, h.data[j * n + i], p);
                    h.data[j * n + m] = add_mod(h.data[j * n + m], v, p);
                }
            }
        }
        // polys[k] = charpoly of the leading k×k block
        let mut polys: Vec<Vec<u32>> = vec![vec![1 % p]];
        for m in 1..=n {
            let prev = &polys[m - 1];
            let mut next = vec![0u32; m + 1];
            let hmm = h.get(m - 1, m - 1);
            for (k, &c) in prev.iter().enumerate() {
                next[k + 1] = add_mod(next[k + 1], c, p);
                next[k] = add_mod(next[k], mul_mod(neg_mod(hmm, p), c, p), p);
            }
            let mut t = 1 % p;
            for i in 1..m {
                t = mul_mod(t, h.get(m - i, m - i - 1), p);
                let coef = mul_mod(h.get(m - i - 1, m - 1), t, p);
                if coef == 0 {
                    continue;
                }
                let ncoef = neg_mod(coef, p);
                for (k, &c) in polys[m - i - 1].iter().enumerate() {
                    next[k] = add_mod(next[k], mul_mod(ncoef, c, p), p);
                }
            }
            polys.push(next);
        }
        Ok(polys.pop().unwrap_or_default())
    }
}

/// Evaluates a polynomial (constant term first) at `x`.
pub fn eval_poly(coeffs: &[u32], x: u32, p: u32) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0u32, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
}

/// A nonzero linear functional up to scalar, stored with its first nonzero
/// coefficient equal to one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Functional {
    p: u32,
    coeffs: Vec<u32>,
}

impl Functional {
    /// Canonicalizes `coeffs` (reduced mod `p`); fails on the zero vector.
    pub fn new(p: u32, coeffs: Vec<u32>) -> Result<Self> {
        let coeffs: Vec<u32> = coeffs.into_iter().map(|c| c % p).collect();
        let Some(&lead) = coeffs.iter().find(|&&c| c != 0) else {
            return Err(Error::InvalidArgument("zero functional".into()));
        };
        let inv = inv_mod(lead, p);
        Ok(Functional {
            p,
            coeffs: coeffs.into_iter().map(|c| mul_mod(c, inv, p)).collect(),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn eval(&self, v: &[u32]) -> u32 {
        assert_eq!(v.len(), self.coeffs.len());
        let p = self.p as u64;
        let s = v
            .iter()
            .zip(&self.coeffs)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
        s as u32
    }

    /// Basis of `ker λ`.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        FpMatrix::from_residue_rows(self.p, self.dim(), vec![self.coeffs.clone()]).nullspace()
    }

    /// Direct check that `ker λ` is mapped into itself by `v ↦ v·A`.
    pub fn kernel_stable_under(&self, a: &FpMatrix) -> bool {
        self.kernel_basis().iter().all(|b| self.eval(&a.apply_row(b)) == 0)
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Number of points of the projective space of an `f`-dimensional space,
/// `(p^f - 1)/(p - 1)`, or `None` on overflow.
pub fn projective_count(p: u32, f: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..f {
        total = total.checked_add(pow)?;
        pow = pow.checked_mul(p as u64)?;
    }
    Some(total)
}

/// All canonical vectors of `F_p^dim` (first nonzero entry 1), i.e. the
/// hyperplanes of the space, sorted lexicographically.
pub fn hyperplanes(dim: usize, p: u32) -> Vec<Functional> {
    let identity: Vec<Vec<u32>> = (0..dim)
        .map(|i| {
            let mut v = vec![0; dim];
            v[i] = 1;
            v
        })
        .collect();
    projective_points(p, dim, &identity)
}

/// Canonical representatives of the nonzero vectors of `span(basis)` up to
/// scalars, sorted. `basis` must be linearly independent.
pub fn projective_points(p: u32, dim: usize, basis: &[Vec<u32>]) -> Vec<Functional> {
    let f = basis.len();
    let mut out = Vec::new();
    for lead in 0..f {
        let mut tail = vec![0u32; f - lead - 1];
        loop {
            let mut v = basis[lead].clone();
            for (k, &c) in tail.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (x, &b) in v.iter_mut().zip(&basis[lead + 1 + k]) {
                    *x = add_mod(*x, mul_mod(c, b, p), p);
                }
            }
            debug_assert_eq!(v.len(), dim);
            out.push(Functional::new(p, v).expect("independent basis"));
            // odometer over the coordinates after `lead`
            let mut i = 0;
            while i < tail.len() {
                tail[i] += 1;
                if tail[i] < p {
                    break;
                }
                tail[i] = 0;
                i += 1;
            }
            if i == tail.len() {
                break;
            }
        }
    }
    out.sort();
    out
}

/// Subspaces of the dual whose nonzero vectors are exactly the functionals
/// with `A`-stable kernels, one subspace per joint eigenvalue pattern.
/// Each entry is a basis of column vectors `x` with `A_g x = μ_g x`.
pub fn invariant_dual_subspaces(dim: usize, p: u32, action: &[FpMatrix]) -> Result<Vec<Vec<Vec<u32>>>> {
    for (i, a) in action.iter().enumerate() {
        if a.rows() != dim || a.cols() != dim || a.p() != p || !a.is_invertible() {
            return Err(Error::SingularAction(i));
        }
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let whole: Vec<Vec<u32>> = (0..dim)
        .map(|i| {
            let mut v = vec![0; dim];
            v[i] = 1;
            v
        })
        .collect();
    let mut out = Vec::new();
    refine(p, dim, action, whole, &mut out)?;
    Ok(out)
}

fn refine(p: u32, dim: usize, action: &[FpMatrix], basis: Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) -> Result<()> {
    let Some((a, rest)) = action.split_first() else {
        out.push(basis);
        return Ok(());
    };
    let candidates: Vec<u32> = if (p as usize) <= dim + 1 {
        (1..p).collect()
    } else {
        let cp = a.charpoly()?;
        (1..p).filter(|&mu| eval_poly(&cp, mu, p) == 0).collect()
    };
    for mu in candidates {
        // (A - μI)·B, restricted to span(B)
        let f = basis.len();
        let mut m = FpMatrix::zeros(p, dim, f);
        for (k, b) in basis.iter().enumerate() {
            let ab = a.apply_col(b);
            for r in 0..dim {
                m.set(r, k, add_mod(ab[r], neg_mod(mul_mod(mu, b[r], p), p), p));
            }
        }
        let ys = m.nullspace();
        if ys.is_empty() {
            continue;
        }
        let sub: Vec<Vec<u32>> = ys
            .iter()
            .map(|y| {
                let mut v = vec![0u32; dim];
                for (k, &c) in y.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    for (x, &b) in v.iter_mut().zip(&basis[k]) {
                        *x = add_mod(*x, mul_mod(c, b, p), p);
                    }
                }
                v
            })
            .collect();
        refine(p, dim, rest, sub, out)?;
    }
    Ok(())
}

/// Functionals whose kernels are stable under every action matrix, sorted.
///
/// `ker λ` is stable under `v ↦ v·A` exactly when `λ` (as a column) is an
/// eigenvector of `A`, so the set is a union of joint eigenspaces and is
/// enumerated from those instead of by testing every hyperplane.
pub fn invariant_hyperplanes(dim: usize, p: u32, action: &[FpMatrix]) -> Result<Vec<Functional>> {
    let spaces = invariant_dual_subspaces(dim, p, action)?;
    let mut out: Vec<Functional> = spaces.iter().flat_map(|b| projective_points(p, dim, b)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Number of invariant hyperplanes without enumerating them.
pub fn count_invariant_hyperplanes(dim: usize, p: u32, action: &[FpMatrix]) -> Result<Option<u64>> {
    let spaces = invariant_dual_subspaces(dim, p, action)?;
    let mut total: u64 = 0;
    for s in spaces {
        match projective_count(p, s.len()).and_then(|c| total.checked_add(c)) {
            Some(t) => total = t,
            None => return Ok(None),
        }
    }
    Ok(Some(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: u32, rows: &[&[i64]]) -> FpMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        FpMatrix::from_rows(p, cols, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn functional(p: u32, c: &[u32]) -> Functional {
        Functional::new(p, c.to_vec()).unwrap()
    }

    /// Exhaustive oracle: every hyperplane tested by direct matrix action.
    fn brute_invariant(dim: usize, p: u32, action: &[FpMatrix]) -> Vec<Functional> {
        hyperplanes(dim, p)
            .into_iter()
            .filter(|l| action.iter().all(|a| l.kernel_stable_under(a)))
            .collect()
    }

    #[test]
    fn primes() {
        assert!(check_prime(2).is_ok());
        assert!(check_prime(65521).is_ok());
        assert!(check_prime(1).is_err());
        assert!(check_prime(9).is_err());
        assert!(check_prime(65537).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FpMatrix::zeros(2, 3, 3).rank(), 0);
        assert_eq!(FpMatrix::identity(5, 3).rank(), 3);
        assert_eq!(m(2, &[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(m(3, &[&[1, 2], &[2, 1]]).rank(), 1);
        assert_eq!(m(5, &[&[1, 2], &[2, 1]]).rank(), 2);
        assert_eq!(m(2, &[&[2, 4, 6]]).rank(), 0);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = m(3, &[&[1, 2, 0, 1], &[0, 1, 1, 2], &[1, 0, 1, 0]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 4 - a.rank());
        for x in ns {
            assert!(a.apply_col(&x).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn hyperplane_examples() {
        let h = hyperplanes(2, 2);
        assert_eq!(
            h,
            vec![functional(2, &[0, 1]), functional(2, &[1, 0]), functional(2, &[1, 1])]
        );
        assert_eq!(hyperplanes(1, 3), vec![functional(3, &[1])]);
        assert!(hyperplanes(0, 7).is_empty());
    }

    #[test]
    fn invariant_examples() {
        let id = FpMatrix::identity(2, 2);
        assert_eq!(
            invariant_hyperplanes(2, 2, &[id.clone(), id]).unwrap(),
            hyperplanes(2, 2)
        );

        let swap = m(2, &[&[0, 1], &[1, 0]]);
        let inv = invariant_hyperplanes(2, 2, std::slice::from_ref(&swap)).unwrap();
        assert_eq!(inv, vec![functional(2, &[1, 1])]);
        assert_eq!(inv, brute_invariant(2, 2, &[swap]));

        for p in [2u32, 3, 5] {
            for a in 1..p {
                let act = m(p, &[&[a as i64]]);
                assert_eq!(invariant_hyperplanes(1, p, &[act]).unwrap().len(), 1);
            }
        }
    }

    #[test]
    fn invariant_rejects_bad_action() {
        let sing = m(2, &[&[1, 1], &[1, 1]]);
        assert_eq!(invariant_hyperplanes(2, 2, &[sing]), Err(Error::SingularAction(0)));
        let rect = m(2, &[&[1, 0, 0], &[0, 1, 0]]);
        assert!(invariant_hyperplanes(2, 2, &[rect]).is_err());
    }

    #[test]
    fn large_prime_uses_charpoly_path() {
        let p = 65521;
        // diag(2, 3) has two invariant lines
        let a = m(p, &[&[2, 0], &[0, 3]]);
        let inv = invariant_hyperplanes(2, p, &[a]).unwrap();
        assert_eq!(inv, vec![functional(p, &[0, 1]), functional(p, &[1, 0])]);
        // rotation by 90 degrees has no eigenvalue when -1 is a non-square (p ≡ 3 mod 4)
        let p = 65519;
        let r = m(p, &[&[0, 1], &[-1, 0]]);
        assert!(invariant_hyperplanes(2, p, &[r]).unwrap().is_empty());
    }

    #[test]
    fn charpoly_matches_determinants() {
        let a = m(7, &[&[1, 2, 3, 0], &[4, 5, 6, 1], &[0, 2, 1, 3], &[5, 5, 0, 2]]);
        let cp = a.charpoly().unwrap();
        assert_eq!(cp.len(), 5);
        assert_eq!(cp[4], 1);
        for x in 0..7u32 {
            let mut xi_minus_a = FpMatrix::identity(7, 4);
            for r in 0..4 {
                for c in 0..4 {
                    let v = (if r == c { x } else { 0 } + 7 - a.get(r, c)) % 7;
                    xi_minus_a.set(r, c, v);
                }
            }
            assert_eq!(eval_poly(&cp, x, 7), xi_minus_a.det().unwrap());
        }
    }

    fn small_matrix(p: u32, rows: usize, cols: usize) -> impl Strategy<Value = FpMatrix> {
        prop::collection::vec(0..p, rows * cols).prop_map(move |data| {
            FpMatrix::from_residue_rows(p, cols, data.chunks(cols.max(1)).map(|c| c.to_vec()).collect())
        })
    }

    fn invertible(p: u32, n: usize) -> impl Strategy<Value = FpMatrix> {
        small_matrix(p, n, n).prop_filter("invertible", |a| a.is_invertible())
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(a in (prop::sample::select(vec![2u32, 3, 5]), 1usize..5, 1usize..5)
            .prop_flat_map(|(p, r, c)| small_matrix(p, r, c))) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
            prop_assert!(a.rank() <= a.rows().min(a.cols()));
        }

        #[test]
        fn hyperplane_count_formula(p in prop::sample::select(vec![2u32, 3, 5]), d in 0usize..=6) {
            prop_assume!(p.pow(d as u32) < 20_000);
            let h = hyperplanes(d, p);
            prop_assert_eq!(h.len() as u64, (p.pow(d as u32) as u64 - 1) / (p as u64 - 1));
            let mut s = h.clone();
            s.dedup();
            prop_assert_eq!(s.len(), h.len());
        }

        #[test]
        fn invariant_matches_brute_force(
            (p, acts) in (prop::sample::select(vec![2u32, 3, 5]), 1usize..=3)
                .prop_flat_map(|(p, d)| (Just(p), prop::collection::vec(invertible(p, d), 1..=2)))
        ) {
            let d = acts[0].rows();
            let fast = invariant_hyperplanes(d, p, &acts).unwrap();
            prop_assert_eq!(&fast, &brute_invariant(d, p, &acts));
            prop_assert_eq!(count_invariant_hyperplanes(d, p, &acts).unwrap(), Some(fast.len() as u64));
            // the invariant set is closed under the action
            for l in &fast {
                for a in &acts {
                    let img = Functional::new(p, a.apply_col(l.coeffs())).unwrap();
                    prop_assert!(fast.contains(&img));
                }
            }
        }

        #[test]
        fn trivial_action_keeps_everything(p in prop::sample::select(vec![2u32, 3]), d in 0usize..=4) {
            let id = FpMatrix::identity(p, d);
            prop_assert_eq!(invariant_hyperplanes(d, p, &[id]).unwrap(), hyperplanes(d, p));
        }
    }
}
