//! Dense matrices over a prime field `F_p` and the elimination routines built on them.

use std::fmt;

use crate::error::{Error, Result};

/// Largest admissible modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// Checks that `p` is a prime in `[2, 2^31)`.
pub fn check_modulus(p: u64) -> Result<u32> {
    if !(2..MAX_MODULUS).contains(&p) || !is_prime(p) {
        return Err(Error::BadModulus(p));
    }
    Ok(p as u32)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p as u64 { s - p as u64 } else { s }) as u32
}

#[inline]
pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

#[inline]
pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    assert!(!a.is_multiple_of(p), "inverse of zero");
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i64) as u32
}

/// Reduces an arbitrary integer into `[0, p)`.
pub fn reduce(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

/// Dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[{}x{} mod {}]", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form together with the transform that produced it.
#[derive(Clone, Debug)]
pub struct Rref {
    pub r: Mat,
    pub pivots: Vec<usize>,
    /// Invertible with `t * m = r`.
    pub t: Mat,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Kernel basis, cokernel projection and a section of that projection.
#[derive(Clone, Debug)]
pub struct KerCoker {
    pub kernel: Mat,
    pub coker: Mat,
    pub section: Mat,
}

/// Pullback of a cospan `A -f-> C <-g- B`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub dim: usize,
    pub to_a: Mat,
    pub to_b: Mat,
}

/// Pushout of a span `A <-f- C -g-> B`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub dim: usize,
    pub from_a: Mat,
    pub from_b: Mat,
}

impl Mat {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Mat {
        Mat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Mat {
        let mut m = Mat::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows; entries are reduced mod `p`.
    pub fn from_rows(p: u32, rows: usize, cols: usize, entries: &[Vec<i64>]) -> Result<Mat> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape(format!(
                "matrix literal does not have shape {rows}x{cols}"
            )));
        }
        let data = entries.iter().flatten().map(|&v| reduce(v, p)).collect();
        Ok(Mat { p, rows, cols, data })
    }

    /// Builds a matrix from residues already in `[0, p)`, row-major.
    pub fn from_vec(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Mat {
        assert_eq!(data.len(), rows * cols, "entry count");
        debug_assert!(data.iter().all(|&v| v < p));
        Mat { p, rows, cols, data }
    }

    /// Shorthand for small literals in tests and built-in examples.
    pub fn lit(p: u32, entries: &[&[i64]]) -> Mat {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let v: Vec<Vec<i64>> = entries.iter().map(|r| r.to_vec()).collect();
        Mat::from_rows(p, rows, cols, &v).expect("ragged literal")
    }

    /// Column vector with a single 1 at position `i`.
    pub fn unit(p: u32, n: usize, i: usize) -> Mat {
        let mut m = Mat::zeros(p, n, 1);
        m.data[i] = 1;
        m
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!(
            self.cols, other.rows,
            "product shape {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let p = self.p as u64;
        let mut out = Mat::zeros(self.p, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                for (c, &b) in orow.iter().enumerate() {
                    acc[c] = (acc[c] + a * b as u64) % p;
                }
            }
            for (c, &a) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = a as u32;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.shape(), other.shape(), "sum shape");
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| add_mod(a, b, p)).collect();
        Mat { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!(self.shape(), other.shape(), "difference shape");
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| sub_mod(a, b, p)).collect();
        Mat { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Mat {
        let p = self.p;
        Mat { p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| neg_mod(a, p)).collect() }
    }

    pub fn scale(&self, s: u32) -> Mat {
        let p = self.p;
        let s = s % p;
        Mat { p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| mul_mod(a, s, p)).collect() }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack rows");
        let mut out = Mat::zeros(self.p, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[r * out.cols + c] = self.get(r, c);
            }
            for c in 0..other.cols {
                out.data[r * out.cols + self.cols + c] = other.get(r, c);
            }
        }
        out
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { p: self.p, rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn hcat(p: u32, rows: usize, blocks: &[Mat]) -> Mat {
        blocks.iter().fold(Mat::zeros(p, rows, 0), |acc, b| acc.hstack(b))
    }

    pub fn vcat(p: u32, cols: usize, blocks: &[Mat]) -> Mat {
        blocks.iter().fold(Mat::zeros(p, 0, cols), |acc, b| acc.vstack(b))
    }

    pub fn block_diag(p: u32, blocks: &[Mat]) -> Mat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(p, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.data[(r0 + r) * self.cols + c0 + c] = b.get(r, c);
            }
        }
    }

    pub fn block(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Mat {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = Mat::zeros(self.p, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.data[r * cols + c] = self.get(r0 + r, c0 + c);
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.p, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Mat { p: self.p, rows: rows.len(), cols: self.cols, data }
    }

    /// Gauss-Jordan elimination with leftmost pivots.
    pub fn rref(&self) -> Rref {
        let p = self.p;
        let (m, n) = self.shape();
        let mut a = self.clone();
        let mut t = Mat::identity(p, m);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let Some(piv) = (row..m).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(row, piv);
            t.swap_rows(row, piv);
            let inv = inv_mod(a.get(row, col), p);
            a.scale_row(row, inv);
            t.scale_row(row, inv);
            for r in 0..m {
                if r != row {
                    let f = a.get(r, col);
                    if f != 0 {
                        a.axpy_row(r, row, neg_mod(f, p));
                        t.axpy_row(r, row, neg_mod(f, p));
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { r: a, pivots, t }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, s: u32) {
        let p = self.p;
        for c in 0..self.cols {
            let v = &mut self.data[i * self.cols + c];
            *v = mul_mod(*v, s, p);
        }
    }

    /// `row_i += s * row_j`.
    fn axpy_row(&mut self, i: usize, j: usize, s: u32) {
        let p = self.p;
        for c in 0..self.cols {
            let add = mul_mod(self.data[j * self.cols + c], s, p);
            let v = &mut self.data[i * self.cols + c];
            *v = add_mod(*v, add, p);
        }
    }

    /// Rank only, without tracking the transform.
    pub fn rank(&self) -> usize {
        let p = self.p;
        let (m, n) = self.shape();
        let mut a = self.clone();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let Some(piv) = (row..m).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(row, piv);
            let inv = inv_mod(a.get(row, col), p);
            a.scale_row(row, inv);
            for r in row + 1..m {
                let f = a.get(r, col);
                if f != 0 {
                    a.axpy_row(r, row, neg_mod(f, p));
                }
            }
            row += 1;
        }
        row
    }

    /// Basis of the null space, one column per free variable.
    pub fn kernel(&self) -> Mat {
        let rr = self.rref();
        kernel_from_rref(&rr, self.cols)
    }

    /// Kernel basis, cokernel projection and the canonical section of the projection.
    pub fn kernel_and_cokernel(&self) -> KerCoker {
        let rr = self.rref();
        let m = self.rows;
        let k = rr.rank();
        let kernel = kernel_from_rref(&rr, self.cols);
        let coker = rr.t.block(k, m - k, 0, m);
        let t_inv = rr.t.inverse().expect("elimination transform is invertible");
        let section = t_inv.block(0, m, k, m - k);
        KerCoker { kernel, coker, section }
    }

    /// Columns of `self` at the pivot positions: a basis of the column space.
    pub fn image(&self) -> Mat {
        let rr = self.rref();
        self.select_cols(&rr.pivots)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let rr = self.rref();
        (rr.rank() == self.rows).then_some(rr.t)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    /// Canonical solution of `self * x = b`: free variables are set to zero.
    pub fn solve(&self, b: &Mat) -> Result<Mat> {
        assert_eq!(self.p, b.p, "field mismatch");
        assert_eq!(self.rows, b.rows, "solve shape");
        let rr = self.rref();
        let tb = rr.t.mul(b);
        let k = rr.rank();
        for r in k..self.rows {
            if tb.row(r).iter().any(|&v| v != 0) {
                return Err(Error::NoSolution);
            }
        }
        let mut x = Mat::zeros(self.p, self.cols, b.cols);
        for (i, &pc) in rr.pivots.iter().enumerate() {
            for c in 0..b.cols {
                x.data[pc * b.cols + c] = tb.get(i, c);
            }
        }
        Ok(x)
    }

    /// Whether every column of `b` lies in the column span of `self`.
    pub fn spans(&self, b: &Mat) -> bool {
        self.solve(b).is_ok()
    }

    /// Pullback of `self: A -> C` and `g: B -> C` as `ker [f | -g]`.
    pub fn pullback(&self, g: &Mat) -> Pullback {
        assert_eq!(self.rows, g.rows, "pullback cospan");
        let k = self.hstack(&g.neg()).kernel();
        let dim = k.cols;
        Pullback { dim, to_a: k.block(0, self.cols, 0, dim), to_b: k.block(self.cols, g.cols, 0, dim) }
    }

    /// Pushout of `self: C -> A` and `g: C -> B` as `coker [f; -g]`.
    pub fn pushout(&self, g: &Mat) -> Pushout {
        assert_eq!(self.cols, g.cols, "pushout span");
        let kc = self.vstack(&g.neg()).kernel_and_cokernel();
        let dim = kc.coker.rows;
        Pushout {
            dim,
            from_a: kc.coker.block(0, dim, 0, self.rows),
            from_b: kc.coker.block(0, dim, self.rows, g.rows),
        }
    }

    /// `self^k` for a square matrix.
    pub fn pow(&self, mut k: u64) -> Mat {
        assert!(self.is_square(), "power of non-square matrix");
        let mut base = self.clone();
        let mut acc = Mat::identity(self.p, self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

fn kernel_from_rref(rr: &Rref, n: usize) -> Mat {
    let p = rr.r.p;
    let free: Vec<usize> = (0..n).filter(|c| !rr.pivots.contains(c)).collect();
    let mut k = Mat::zeros(p, n, free.len());
    for (j, &f) in free.iter().enumerate() {
        k.data[f * free.len() + j] = 1;
        for (i, &pc) in rr.pivots.iter().enumerate() {
            k.data[pc * free.len() + j] = neg_mod(rr.r.get(i, f), p);
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_vectors(p: u32, n: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..p).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn rref_of_zero_and_identity() {
        let z = Mat::zeros(3, 2, 3);
        let rr = z.rref();
        assert!(rr.r.is_zero());
        assert!(rr.pivots.is_empty());
        let i = Mat::identity(3, 4);
        let rr = i.rref();
        assert!(rr.r.is_identity());
        assert_eq!(rr.pivots, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rref_rank_one_over_f2() {
        let m = Mat::lit(2, &[&[1, 1], &[1, 1]]);
        let rr = m.rref();
        assert_eq!(rr.pivots, vec![0]);
        assert_eq!(rr.t.mul(&m), rr.r);
        assert_eq!(rr.r, Mat::lit(2, &[&[1, 1], &[0, 0]]));
    }

    #[test]
    fn kernel_cokernel_examples() {
        let kc = Mat::identity(5, 3).kernel_and_cokernel();
        assert_eq!(kc.kernel.cols(), 0);
        assert_eq!(kc.coker.rows(), 0);
        let kc = Mat::zeros(5, 2, 3).kernel_and_cokernel();
        assert!(kc.kernel.is_identity());
        assert!(kc.coker.is_identity());
        let m = Mat::lit(5, &[&[1, 2], &[2, 4]]);
        let kc = m.kernel_and_cokernel();
        assert_eq!(kc.kernel.cols(), 1);
        assert_eq!(kc.coker.rows(), 1);
        assert!(m.mul(&kc.kernel).is_zero());
        assert!(kc.coker.mul(&m).is_zero());
        assert!(kc.coker.mul(&kc.section).is_identity());
    }

    #[test]
    fn solve_examples() {
        let b = Mat::lit(7, &[&[3, 1], &[4, 0]]);
        assert_eq!(Mat::identity(7, 2).solve(&b).unwrap(), b);
        assert!(matches!(Mat::zeros(7, 2, 2).solve(&b), Err(Error::NoSolution)));
        // Oracle: enumerate all candidates and pick the canonical one by hand.
        let a = Mat::lit(2, &[&[1, 1]]);
        let rhs = Mat::lit(2, &[&[1]]);
        let sols: Vec<Vec<u32>> = all_vectors(2, 2)
            .into_iter()
            .filter(|v| (v[0] + v[1]) % 2 == 1)
            .collect();
        assert_eq!(sols.len(), 2);
        let x = a.solve(&rhs).unwrap();
        assert_eq!(x, Mat::lit(2, &[&[1], &[0]]));
        assert!(sols.contains(&vec![x.get(0, 0), x.get(1, 0)]));
    }

    #[test]
    fn pullback_examples() {
        let f = Mat::lit(3, &[&[1, 2], &[0, 1]]);
        let pb = f.pullback(&Mat::identity(3, 2));
        assert_eq!(pb.dim, 2);
        assert!(pb.to_a.is_invertible());
        let pb = Mat::zeros(3, 2, 1).pullback(&Mat::zeros(3, 2, 2));
        assert_eq!(pb.dim, 3);
        let pb = Mat::lit(2, &[&[1, 0]]).pullback(&Mat::lit(2, &[&[1]]));
        assert_eq!(pb.dim, 2);
        assert_eq!(Mat::lit(2, &[&[1, 0]]).mul(&pb.to_a), Mat::lit(2, &[&[1]]).mul(&pb.to_b));
    }

    #[test]
    fn pushout_examples() {
        let g = Mat::lit(5, &[&[1, 3], &[2, 2], &[0, 1]]);
        let po = Mat::identity(5, 2).pushout(&g);
        assert_eq!(po.dim, 3);
        let po = Mat::zeros(5, 2, 0).pushout(&Mat::zeros(5, 3, 0));
        assert_eq!(po.dim, 5);
        assert!(po.from_a.vstack(&Mat::zeros(5, 0, 2)).rank() == 2);
        let po = Mat::identity(2, 1).pushout(&Mat::identity(2, 1));
        assert_eq!(po.dim, 1);
        assert_eq!(po.from_a, po.from_b);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::lit(7, &[&[2, 5, 1], &[0, 3, 4], &[1, 0, 6]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(Mat::lit(7, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn inverse_mod_table() {
        for p in [2u32, 3, 5, 7, 11, 2147483647] {
            for a in [1u32, 2, 3, p - 1] {
                if a % p != 0 {
                    assert_eq!(mul_mod(a % p, inv_mod(a % p, p), p), 1);
                }
            }
        }
    }

    #[test]
    fn modulus_check() {
        assert!(check_modulus(2).is_ok());
        assert!(check_modulus(2147483647).is_ok());
        assert!(check_modulus(4).is_err());
        assert!(check_modulus(1).is_err());
        assert!(check_modulus(1 << 31).is_err());
    }
}
