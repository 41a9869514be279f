//! Exact linear algebra over small finite fields F_q, q = pᵉ.
//!
//! Field elements are indices `0..q` into precomputed operation tables; for
//! e = 1 the index is the residue itself, for e > 1 it encodes the polynomial
//! digits base p with respect to the lexicographically least monic irreducible
//! modulus of degree e.  Matrices are dense `u8` arrays with exact rref,
//! kernel, and solving.  The module also provides polynomial utilities over
//! F_q: irreducible enumeration, (block) companion matrices, invariant
//! factors, and the Jordan-completion count used by the regular Hall algebra.

use crate::scalar::PrimePower;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct FqFieldInner {
    pp: PrimePower,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    /// Modulus coefficients, low degree first, length e+1, monic.  For e = 1
    /// this is x itself (the identity modulus: elements are residues).
    modulus: Vec<u8>,
}

/// A handle to a (cached) finite field F_q.
#[derive(Clone, Debug)]
pub struct FqField(Arc<FqFieldInner>);

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.0.pp == other.0.pp
    }
}

impl Eq for FqField {}

static FIELD_CACHE: Lazy<Mutex<HashMap<PrimePower, FqField>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Polynomial arithmetic over F_p with coefficients as u64 residues; used only
/// during field construction.
fn fp_poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // Reduce mod the monic modulus.
    let d = modulus.len() - 1;
    while prod.len() > d {
        let lead = *prod.last().unwrap();
        let deg = prod.len() - 1;
        if lead != 0 {
            for (i, &m) in modulus.iter().enumerate().take(d) {
                let idx = deg - d + i;
                prod[idx] = (prod[idx] + p * p - (lead * m) % p) % p;
            }
        }
        prod.pop();
    }
    prod
}

/// Is the monic polynomial (low-first, over F_p) irreducible?  Brute trial
/// division by all monic polynomials of degree 1..=deg/2.
fn fp_poly_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    for ddeg in 1..=deg / 2 {
        // Enumerate monic divisor candidates of degree ddeg.
        let count = p.pow(ddeg as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(ddeg + 1);
            let mut c = code;
            for _ in 0..ddeg {
                div.push(c % p);
                c /= p;
            }
            div.push(1);
            let mut rem: Vec<u64> = poly.to_vec();
            while rem.len() >= div.len() {
                let lead = *rem.last().unwrap();
                let deg_diff = rem.len() - div.len();
                if lead != 0 {
                    for (i, &m) in div.iter().enumerate() {
                        let idx = deg_diff + i;
                        rem[idx] = (rem[idx] + p * p - (lead * m) % p) % p;
                    }
                }
                rem.pop();
            }
            if rem.iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl FqField {
    pub fn new(pp: PrimePower) -> FqField {
        let mut cache = FIELD_CACHE.lock().unwrap();
        if let Some(f) = cache.get(&pp) {
            return f.clone();
        }
        let f = FqField(Arc::new(FqFieldInner::build(pp)));
        cache.insert(pp, f.clone());
        f
    }

    /// Convenience: the prime field F_p.
    pub fn prime(p: u64) -> FqField {
        FqField::new(PrimePower::new(p, 1))
    }

    pub fn ctx(&self) -> PrimePower {
        self.0.pp
    }

    pub fn q(&self) -> usize {
        self.0.q
    }

    pub fn modulus(&self) -> &[u8] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.0.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.0.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero in F_q");
        self.0.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    /// All field elements, 0 first.
    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.0.q as u8
    }

    /// The image of an integer under ℤ → F_q (prime-subfield embedding).
    pub fn from_int(&self, n: i64) -> u8 {
        let p = self.0.pp.p() as i64;
        n.rem_euclid(p) as u8
    }
}

impl FqFieldInner {
    fn build(pp: PrimePower) -> FqFieldInner {
        let p = pp.p();
        let e = pp.e() as usize;
        let q = pp.q() as usize;
        assert!(q <= 256, "field too large for u8 element encoding");

        // Find the lexicographically least monic irreducible modulus of
        // degree e over F_p: coefficient tuples (c_{e-1}, …, c_1, c_0)
        // compared lexicographically.  For e = 1 use x (identity encoding).
        let modulus_u64: Vec<u64> = if e == 1 {
            vec![0, 1]
        } else {
            let mut found = None;
            'outer: for code in 0..p.pow(e as u32) {
                // code digits give (c_{e-1}, …, c_0) with c_{e-1} most significant
                let mut digits = Vec::with_capacity(e);
                let mut c = code;
                for _ in 0..e {
                    digits.push(c % p);
                    c /= p;
                }
                // digits[0] = c_0 (least significant of code) — we want lex
                // order on (c_{e-1}, …, c_0), which is numeric order of code
                // when digits are packed with c_{e-1} most significant:
                let mut poly: Vec<u64> = digits.clone(); // low-first: c_0 … c_{e-1}
                poly.push(1);
                if fp_poly_irreducible(&poly, p) {
                    found = Some(poly);
                    break 'outer;
                }
            }
            found.expect("an irreducible polynomial of every degree exists")
        };

        // Element index = Σ digit_i · p^i where digit_i is the coefficient of xⁱ.
        let decode = |idx: usize| -> Vec<u64> {
            let mut digits = Vec::with_capacity(e);
            let mut c = idx as u64;
            for _ in 0..e {
                digits.push(c % p);
                c /= p;
            }
            digits
        };
        let encode = |poly: &[u64]| -> usize {
            let mut idx = 0u64;
            for i in (0..e).rev() {
                idx = idx * p + poly.get(i).copied().unwrap_or(0);
            }
            idx as usize
        };

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            let pa = decode(a);
            let na: Vec<u64> = pa.iter().map(|&x| (p - x) % p).collect();
            neg[a] = encode(&na) as u8;
            for b in 0..q {
                let pb = decode(b);
                let sum: Vec<u64> = (0..e).map(|i| (pa[i] + pb[i]) % p).collect();
                add[a * q + b] = encode(&sum) as u8;
                let prod = fp_poly_mul_mod(&pa, &pb, &modulus_u64, p);
                mul[a * q + b] = encode(&prod) as u8;
            }
        }
        for a in 1..q {
            let b = (1..q).find(|&b| mul[a * q + b] == 1).expect("field element invertible");
            inv[a] = b as u8;
        }
        FqFieldInner {
            pp,
            q,
            add,
            mul,
            neg,
            inv,
            modulus: modulus_u64.iter().map(|&x| x as u8).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Dense matrix over F_q, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    a: Vec<u8>,
    field: FqField,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over F_{}", self.rows, self.cols, self.field.q())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.a[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zero(field: &FqField, rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            a: vec![0; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FqField, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &FqField, rows: &[Vec<u8>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Mat::zero(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn from_fn(field: &FqField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u8) -> Mat {
        let mut m = Mat::zero(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.a[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.a[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let f = &self.field;
        let mut out = self.clone();
        for i in 0..self.a.len() {
            out.a[i] = f.add(self.a[i], other.a[i]);
        }
        out
    }

    pub fn neg(&self) -> Mat {
        let f = &self.field;
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x = f.neg(*x);
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: u8) -> Mat {
        let f = &self.field;
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x = f.mul(*x, s);
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let f = &self.field;
        let mut out = Mat::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let y = other.get(k, j);
                    if y != 0 {
                        let cur = out.get(i, j);
                        out.set(i, j, f.add(cur, f.mul(x, y)));
                    }
                }
            }
        }
        out
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        })
    }

    /// Vertical concatenation [self ; other].
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        Mat::from_fn(&self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j)
            } else {
                other.get(i - self.rows, j)
            }
        })
    }

    /// Block diagonal [self 0; 0 other].
    pub fn block_diag(&self, other: &Mat) -> Mat {
        Mat::from_fn(
            &self.field,
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| {
                if i < self.rows && j < self.cols {
                    self.get(i, j)
                } else if i >= self.rows && j >= self.cols {
                    other.get(i - self.rows, j - self.cols)
                } else {
                    0
                }
            },
        )
    }

    /// Reduced row echelon form; returns (rref, pivot column indices).
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..cols {
            if row >= rows {
                break;
            }
            let Some(pr) = (row..rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..cols {
                    let t = self.get(pr, c);
                    self.set(pr, c, self.get(row, c));
                    self.set(row, c, t);
                }
            }
            let inv = f.inv(self.get(row, col));
            if inv != 1 {
                for c in col..cols {
                    let v = self.get(row, c);
                    self.set(row, c, f.mul(v, inv));
                }
            }
            for r in 0..rows {
                if r != row {
                    let factor = self.get(r, col);
                    if factor != 0 {
                        for c in col..cols {
                            let v = self.get(row, c);
                            if v != 0 {
                                let cur = self.get(r, c);
                                self.set(r, c, f.sub(cur, f.mul(factor, v)));
                            }
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.field.q() == 2 {
            return self.rank_f2();
        }
        self.clone().rref_in_place().len()
    }

    /// Fast rank over F_2 via packed words.
    fn rank_f2(&self) -> usize {
        let words = (self.cols + 63) / 64;
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| {
                let mut w = vec![0u64; words];
                for c in 0..self.cols {
                    if self.get(r, c) != 0 {
                        w[c / 64] |= 1u64 << (c % 64);
                    }
                }
                w
            })
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (wi, bi) = (col / 64, col % 64);
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][wi] >> bi & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[wi] >> bi & 1 == 1 {
                    for (w, pw) in row.iter_mut().zip(&pivot_row) {
                        *w ^= pw;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// A matrix whose COLUMNS form a basis of the right kernel {x : Ax = 0}.
    pub fn kernel_basis(&self) -> Mat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = &self.field;
        let mut out = Mat::zero(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, 1);
            for (prow, &pc) in pivots.iter().enumerate() {
                let v = r.get(prow, fc);
                if v != 0 {
                    out.set(pc, k, f.neg(v));
                }
            }
        }
        out
    }

    /// Solve self · X = B columnwise; None if inconsistent.
    pub fn solve(&self, b: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        // Inconsistency: a pivot in the B-part.
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let f = &self.field;
        let mut x = Mat::zero(f, self.cols, b.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(prow, self.cols + j));
            }
        }
        Some(x)
    }

    /// Is the column vector v in the column span of self?
    pub fn col_space_contains(&self, v: &Mat) -> bool {
        self.solve(v).is_some()
    }

    /// Column-space basis as a matrix whose columns span im(self); the pivot
    /// columns of rref(self) index an independent spanning subset.
    pub fn col_space_basis(&self) -> Mat {
        let (_r, piv) = self.rref();
        Mat::from_fn(&self.field, self.rows, piv.len(), |i, j| self.get(i, piv[j]))
    }
}

// ---------------------------------------------------------------------------
// Subspace enumeration
// ---------------------------------------------------------------------------

/// All k-dimensional subspaces of F_qⁿ, each given by a k×n RREF basis matrix.
pub fn enumerate_subspaces(field: &FqField, n: usize, k: usize) -> Vec<Mat> {
    assert!(k <= n);
    let mut out = Vec::new();
    // Choose pivot columns c_1 < … < c_k; entry (i, j) is free iff j > c_i and
    // j is not a pivot column.
    let mut pivots = (0..k).collect::<Vec<usize>>();
    loop {
        // Collect free positions.
        let mut free = Vec::new();
        for (i, &ci) in pivots.iter().enumerate() {
            for j in ci + 1..n {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let q = field.q();
        let total = q.checked_pow(free.len() as u32).expect("subspace enumeration overflow");
        for code in 0..total {
            let mut m = Mat::zero(field, k, n);
            for (i, &ci) in pivots.iter().enumerate() {
                m.set(i, ci, 1);
            }
            let mut c = code;
            for &(i, j) in &free {
                m.set(i, j, (c % q) as u8);
                c /= q;
            }
            out.push(m);
        }
        // Next pivot pattern (combinations in lexicographic order).
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < n - (k - i) {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomials over F_q (coefficients are field-element indices, low first)
// ---------------------------------------------------------------------------

/// Monic polynomials over F_q are Vec<u8>, low degree first, including the
/// leading 1; the zero polynomial (the label of the regular-nilpotent class)
/// is the empty vector.
pub type PolyFq = Vec<u8>;

pub fn poly_deg(p: &PolyFq) -> usize {
    // By our convention the zero polynomial has "degree" 1 (it labels the
    // degree-1 point [0:1] of P¹).
    if p.is_empty() {
        1
    } else {
        p.len() - 1
    }
}

pub fn poly_is_zero_label(p: &PolyFq) -> bool {
    p.is_empty()
}

fn polyfq_mul(field: &FqField, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    out
}

fn polyfq_rem(field: &FqField, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut rem: Vec<u8> = a.to_vec();
    while rem.len() >= b.len() && !rem.is_empty() {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - b.len();
            let factor = field.div(lead, *b.last().unwrap());
            for (i, &c) in b.iter().enumerate() {
                let v = field.sub(rem[shift + i], field.mul(factor, c));
                rem[shift + i] = v;
            }
        }
        while rem.last() == Some(&0) {
            rem.pop();
        }
        if rem.len() < b.len() {
            break;
        }
    }
    rem
}

/// Is the monic polynomial irreducible over F_q?
pub fn polyfq_irreducible(field: &FqField, poly: &[u8]) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    let q = field.q();
    for ddeg in 1..=deg / 2 {
        let count = q.pow(ddeg as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(ddeg + 1);
            let mut c = code;
            for _ in 0..ddeg {
                div.push((c % q) as u8);
                c /= q;
            }
            div.push(1);
            if polyfq_rem(field, poly, &div).is_empty() {
                return false;
            }
        }
    }
    true
}

/// All monic irreducible polynomials of degree exactly d over F_q, in
/// lexicographic order of (c_{d-1}, …, c_0).
pub fn irreducible_polys(field: &FqField, d: usize) -> Vec<PolyFq> {
    assert!(d >= 1);
    let q = field.q();
    let mut out = Vec::new();
    for code in 0..q.pow(d as u32) {
        // code digits: least significant = c_0 … so numeric order of code is
        // lex order on (c_{d-1}, …, c_0) if we put the most significant digit
        // at c_{d-1}.  Decode accordingly.
        let mut coeffs = vec![0u8; d];
        let mut c = code;
        for i in (0..d).rev() {
            coeffs[i] = (c % q) as u8;
            c /= q;
        }
        // coeffs currently holds (c_{d-1} least-significant-last); rebuild low-first:
        let mut poly: Vec<u8> = coeffs;
        poly.reverse(); // now low degree first: c_0 … c_{d-1}
        poly.push(1);
        if polyfq_irreducible(field, &poly) {
            out.push(poly);
        }
    }
    out
}

/// The point set Σ_d: monic irreducibles of degree d, plus the zero
/// polynomial when d = 1 (the extra point of P¹).
pub fn sigma_set(field: &FqField, d: usize) -> Vec<PolyFq> {
    let mut out = Vec::new();
    if d == 1 {
        out.push(vec![]); // the zero-polynomial label
    }
    out.extend(irreducible_polys(field, d));
    out
}

/// Companion matrix of a monic polynomial φ = x^d + Σ cᵢxⁱ (column convention:
/// the matrix of multiplication by x on F_q[x]/(φ) in the basis 1, x, …).
pub fn companion(field: &FqField, phi: &[u8]) -> Mat {
    assert!(phi.len() >= 2, "companion needs positive degree");
    let d = phi.len() - 1;
    assert_eq!(phi[d], 1, "companion needs a monic polynomial");
    Mat::from_fn(field, d, d, |i, j| {
        if j + 1 == d {
            field.neg(phi[i])
        } else if i == j + 1 {
            1
        } else {
            0
        }
    })
}

/// The dn×dn block upper-bidiagonal matrix M_φ(n): companion blocks of φ on
/// the diagonal and identity blocks on the superdiagonal.
pub fn block_companion(field: &FqField, phi: &[u8], n: usize) -> Mat {
    assert!(!phi.is_empty(), "zero polynomial passed; use jordan_nilpotent");
    let d = phi.len() - 1;
    let c = companion(field, phi);
    Mat::from_fn(field, d * n, d * n, |i, j| {
        let (bi, ii) = (i / d, i % d);
        let (bj, jj) = (j / d, j % d);
        if bi == bj {
            c.get(ii, jj)
        } else if bj == bi + 1 && ii == jj {
            1
        } else {
            0
        }
    })
}

/// The regular nilpotent n×n Jordan block (1's on the superdiagonal).
pub fn jordan_nilpotent(field: &FqField, n: usize) -> Mat {
    Mat::from_fn(field, n, n, |i, j| u8::from(j == i + 1))
}

// ---------------------------------------------------------------------------
// Invariant factors and similarity
// ---------------------------------------------------------------------------

/// Polynomial matrices over F_q[x]: entries are low-first coefficient vectors.
fn pm_trim(p: &mut Vec<u8>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn pm_add(field: &FqField, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] = c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] = field.add(out[i], c);
    }
    pm_trim(&mut out);
    out
}

fn pm_scale(field: &FqField, a: &[u8], s: u8) -> Vec<u8> {
    let mut out: Vec<u8> = a.iter().map(|&c| field.mul(c, s)).collect();
    pm_trim(&mut out);
    out
}

fn pm_mul(field: &FqField, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = polyfq_mul(field, a, b);
    pm_trim(&mut out);
    out
}

fn pm_neg(field: &FqField, a: &[u8]) -> Vec<u8> {
    a.iter().map(|&c| field.neg(c)).collect()
}

/// Divide a by monic-normalizable b: returns (quotient, remainder).
fn pm_divmod(field: &FqField, a: &[u8], b: &[u8]) -> (Vec<u8>, Vec<u8>) {
    assert!(!b.is_empty());
    let mut rem: Vec<u8> = a.to_vec();
    pm_trim(&mut rem);
    let mut quot = vec![0u8; a.len().saturating_sub(b.len()) + 1];
    let blead = *b.last().unwrap();
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let factor = field.div(*rem.last().unwrap(), blead);
        quot[shift] = field.add(quot[shift], factor);
        for (i, &c) in b.iter().enumerate() {
            rem[shift + i] = field.sub(rem[shift + i], field.mul(factor, c));
        }
        pm_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    pm_trim(&mut quot);
    (quot, rem)
}

/// Invariant factors of xI − A (Smith normal form over F_q[x]), monic,
/// in divisibility order, omitting unit factors.
pub fn invariant_factors(a: &Mat) -> Vec<PolyFq> {
    assert_eq!(a.rows, a.cols);
    let field = a.field().clone();
    let n = a.rows;
    // Build xI − A as a polynomial matrix.
    let mut m: Vec<Vec<Vec<u8>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut p = vec![field.neg(a.get(i, j))];
                    if i == j {
                        p.push(1);
                    }
                    pm_trim(&mut p);
                    p
                })
                .collect()
        })
        .collect();

    let deg = |p: &Vec<u8>| -> Option<usize> {
        if p.is_empty() {
            None
        } else {
            Some(p.len() - 1)
        }
    };

    let mut factors = Vec::new();
    let mut top = 0usize;
    while top < n {
        // Find the nonzero entry of minimal degree in the submatrix.
        let mut best: Option<(usize, usize, usize)> = None;
        for i in top..n {
            for j in top..n {
                if let Some(d) = deg(&m[i][j]) {
                    if best.map_or(true, |(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else {
            break; // submatrix is zero
        };
        m.swap(top, bi);
        for row in m.iter_mut() {
            row.swap(top, bj);
        }
        // Reduce row and column by the pivot until everything is divisible.
        loop {
            let mut dirty = false;
            for i in top + 1..n {
                if !m[i][top].is_empty() {
                    let (q, _r) = pm_divmod(&field, &m[i][top], &m[top][top]);
                    // row_i -= q · row_top
                    for j in top..n {
                        let t = pm_mul(&field, &q, &m[top][j]);
                        m[i][j] = pm_add(&field, &m[i][j], &pm_neg(&field, &t));
                    }
                    if !m[i][top].is_empty() {
                        // Remainder has smaller degree: swap up and restart.
                        m.swap(top, i);
                        dirty = true;
                    }
                }
            }
            for j in top + 1..n {
                if !m[top][j].is_empty() {
                    let (q, _r) = pm_divmod(&field, &m[top][j], &m[top][top]);
                    for i in top..n {
                        let t = pm_mul(&field, &q, &m[i][top]);
                        m[i][j] = pm_add(&field, &m[i][j], &pm_neg(&field, &t));
                    }
                    if !m[top][j].is_empty() {
                        for row in m.iter_mut() {
                            row.swap(top, j);
                        }
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        // Ensure the pivot divides every remaining entry; if not, fold that
        // row in and repeat.
        let mut changed = true;
        while changed {
            changed = false;
            'scan: for i in top + 1..n {
                for j in top + 1..n {
                    if m[i][j].is_empty() {
                        continue;
                    }
                    let (_q, r) = pm_divmod(&field, &m[i][j], &m[top][top]);
                    if !r.is_empty() {
                        // row_top += row_i, then re-reduce.
                        for jj in top..n {
                            let other = m[i][jj].clone();
                            m[top][jj] = pm_add(&field, &m[top][jj], &other);
                        }
                        changed = true;
                        break 'scan;
                    }
                }
            }
            if changed {
                // Redo the row/column elimination for the modified pivot row.
                loop {
                    let mut dirty = false;
                    for i in top + 1..n {
                        if !m[i][top].is_empty() {
                            let (q, _r) = pm_divmod(&field, &m[i][top], &m[top][top]);
                            for j in top..n {
                                let t = pm_mul(&field, &q, &m[top][j]);
                                m[i][j] = pm_add(&field, &m[i][j], &pm_neg(&field, &t));
                            }
                            if !m[i][top].is_empty() {
                                m.swap(top, i);
                                dirty = true;
                            }
                        }
                    }
                    for j in top + 1..n {
                        if !m[top][j].is_empty() {
                            let (q, _r) = pm_divmod(&field, &m[top][j], &m[top][top]);
                            for i in top..n {
                                let t = pm_mul(&field, &q, &m[i][top]);
                                m[i][j] = pm_add(&field, &m[i][j], &pm_neg(&field, &t));
                            }
                            if !m[top][j].is_empty() {
                                for row in m.iter_mut() {
                                    row.swap(top, j);
                                }
                                dirty = true;
                            }
                        }
                    }
                    if !dirty {
                        break;
                    }
                }
            }
        }
        // Normalize pivot to monic and record.
        let lead = *m[top][top].last().unwrap();
        let pivot = pm_scale(&field, &m[top][top], field.inv(lead));
        if pivot.len() > 1 {
            factors.push(pivot);
        }
        top += 1;
    }
    factors
}

/// Are A and B conjugate over F_q?  Decided by invariant factors of xI − A.
pub fn similar(a: &Mat, b: &Mat) -> bool {
    assert_eq!(a.rows, a.cols);
    assert_eq!(b.rows, b.cols);
    if a.rows != b.rows {
        return false;
    }
    invariant_factors(a) == invariant_factors(b)
}

/// Count completions M̄ such that the block matrix [[M_π(a), M̄], [0, M_π(b)]]
/// is similar to M_π(a+b), where M_π(m) = block_companion(π, m).
pub fn count_jordan_completions(field: &FqField, pi: &[u8], a: usize, b: usize) -> u64 {
    let d = pi.len() - 1;
    let top = block_companion(field, pi, a);
    let bot = block_companion(field, pi, b);
    let target = block_companion(field, pi, a + b);
    let (ra, rb) = (d * a, d * b);
    let q = field.q();
    let cells = ra * rb;
    let total = (q as u64).checked_pow(cells as u32).expect("completion count overflow");
    let mut count = 0u64;
    for code in 0..total {
        let mut m = Mat::zero(field, ra + rb, ra + rb);
        for i in 0..ra {
            for j in 0..ra {
                m.set(i, j, top.get(i, j));
            }
        }
        for i in 0..rb {
            for j in 0..rb {
                m.set(ra + i, ra + j, bot.get(i, j));
            }
        }
        let mut c = code;
        for i in 0..ra {
            for j in 0..rb {
                m.set(i, ra + j, (c % q as u64) as u8);
                c /= q as u64;
            }
        }
        if similar(&m, &target) {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FqField {
        FqField::prime(2)
    }

    fn f3() -> FqField {
        FqField::prime(3)
    }

    #[test]
    fn field_f4_tables() {
        let f = FqField::new(PrimePower::new(2, 2));
        assert_eq!(f.q(), 4);
        // Modulus must be x² + x + 1, the only irreducible quadratic over F_2.
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x · x = x + 1 in F_4: index of x is 2, of x+1 is 3.
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1); // x(x+1) = x²+x = 1
        for a in 1..4u8 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn field_f9() {
        let f = FqField::new(PrimePower::new(3, 2));
        assert_eq!(f.q(), 9);
        for a in 1..9u8 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        // Characteristic 3: 1+1+1 = 0.
        assert_eq!(f.add(1, f.add(1, 1)), 0);
    }

    #[test]
    fn kernel_of_zero() {
        let f = f2();
        let z = Mat::zero(&f, 1, 1);
        let k = z.kernel_basis();
        assert_eq!((k.rows, k.cols), (1, 1));
        assert_eq!(k.get(0, 0), 1);
    }

    #[test]
    fn rank_identity() {
        let f = f3();
        assert_eq!(Mat::identity(&f, 3).rank(), 3);
    }

    #[test]
    fn solve_example() {
        // x·[[1,1],[0,1]] = I over F_2 → x = [[1,1],[0,1]].
        let f = f2();
        let a = Mat::from_rows(&f, &[vec![1, 1], vec![0, 1]]);
        // Solve Aᵀ Xᵀ = Iᵀ i.e. via our column solver on the transpose:
        let x = a.transpose().solve(&Mat::identity(&f, 2)).unwrap().transpose();
        assert_eq!(x.matmul(&a), Mat::identity(&f, 2));
        assert_eq!(x, Mat::from_rows(&f, &[vec![1, 1], vec![0, 1]]));
    }

    #[test]
    fn subspace_counts() {
        let f = f2();
        // Gaussian binomials over F_2: [4 choose 2]_2 = 35, [3 choose 1]_2 = 7.
        assert_eq!(enumerate_subspaces(&f, 4, 2).len(), 35);
        assert_eq!(enumerate_subspaces(&f, 3, 1).len(), 7);
        assert_eq!(enumerate_subspaces(&f, 3, 0).len(), 1);
        assert_eq!(enumerate_subspaces(&f, 3, 3).len(), 1);
        let f3 = f3();
        assert_eq!(enumerate_subspaces(&f3, 2, 1).len(), 4);
        // Every basis is in RREF with the right shape.
        for m in enumerate_subspaces(&f, 4, 2) {
            assert_eq!(m.rank(), 2);
        }
    }

    #[test]
    fn irreducible_enumeration() {
        let f = f2();
        assert_eq!(irreducible_polys(&f, 1), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(irreducible_polys(&f, 2), vec![vec![1, 1, 1]]);
        assert_eq!(irreducible_polys(&f, 3).len(), 2);
        assert_eq!(irreducible_polys(&f, 4).len(), 3);
        // Σ₁ has q+1 points.
        assert_eq!(sigma_set(&f, 1).len(), 3);
        let f3 = f3();
        assert_eq!(sigma_set(&f3, 1).len(), 4);
        assert_eq!(irreducible_polys(&f3, 2).len(), 3);
        // Number of monic irreducibles of degree 2 over F_4 is (16−4)/2 = 6.
        let f4 = FqField::new(PrimePower::new(2, 2));
        assert_eq!(irreducible_polys(&f4, 2).len(), 6);
    }

    #[test]
    fn companion_examples() {
        let f = f2();
        // φ = x, n = 2 → [[0,1],[0,0]].
        let m = block_companion(&f, &[0, 1], 2);
        assert_eq!(m, Mat::from_rows(&f, &[vec![0, 1], vec![0, 0]]));
        // φ = x²+x+1 over F_2 → [[0,1],[1,1]].
        let c = companion(&f, &[1, 1, 1]);
        assert_eq!(c, Mat::from_rows(&f, &[vec![0, 1], vec![1, 1]]));
        // φ = x−1 over F_3, n = 3: 1's on diagonal and superdiagonal.
        let f3 = f3();
        let m3 = block_companion(&f3, &[2, 1], 3);
        assert_eq!(
            m3,
            Mat::from_rows(&f3, &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]])
        );
    }

    #[test]
    fn invariant_factor_examples() {
        let f = f2();
        let id = Mat::identity(&f, 2);
        // xI − I has invariant factors (x+1, x+1).
        assert_eq!(invariant_factors(&id), vec![vec![1, 1], vec![1, 1]]);
        let nilp = jordan_nilpotent(&f, 2);
        // Single block: one invariant factor x².
        assert_eq!(invariant_factors(&nilp), vec![vec![0, 0, 1]]);
        assert!(similar(&id, &id));
        assert!(!similar(&nilp, &Mat::zero(&f, 2, 2)));
        // [[1,1],[0,1]] ~ block_companion(x−1, 2) over F_2.
        let a = Mat::from_rows(&f, &[vec![1, 1], vec![0, 1]]);
        let b = block_companion(&f, &[1, 1], 2);
        assert!(similar(&a, &b));
    }

    #[test]
    fn similarity_brute_oracle() {
        // Compare `similar` with brute-force GL₂ conjugation on all 2×2 pairs
        // over F_2 (GL₂(F_2) has 6 elements).
        let f = f2();
        let mats: Vec<Mat> = (0..16u32)
            .map(|c| {
                Mat::from_rows(
                    &f,
                    &[
                        vec![(c & 1) as u8, ((c >> 1) & 1) as u8],
                        vec![((c >> 2) & 1) as u8, ((c >> 3) & 1) as u8],
                    ],
                )
            })
            .collect();
        let gl: Vec<Mat> = mats.iter().filter(|m| m.rank() == 2).cloned().collect();
        assert_eq!(gl.len(), 6);
        for a in &mats {
            for b in &mats {
                let brute = gl.iter().any(|g| {
                    let gi = g.transpose().solve(&Mat::identity(&f, 2)).unwrap().transpose();
                    // g a g⁻¹: need actual inverse; gi solves gᵀxᵀ=I i.e. x g = I
                    gi.matmul(a).matmul(g) == *b
                });
                assert_eq!(similar(a, b), brute, "mismatch:\n{a:?}\n{b:?}");
            }
        }
    }

    #[test]
    fn jordan_completion_small() {
        // d=1, π = x−1 over F_2, a = b = 1: completions [[1, m],[0, 1]] similar
        // to the 2×2 unipotent Jordan block: m ≠ 0 → exactly q−1 = 1.
        let f = f2();
        assert_eq!(count_jordan_completions(&f, &[1, 1], 1, 1), 1);
        let f3 = f3();
        assert_eq!(count_jordan_completions(&f3, &[2, 1], 1, 1), 2);
    }
}
