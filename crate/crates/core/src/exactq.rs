//! Exact rational linear algebra.
//!
//! Every rank in this crate comes out of [`rref`]. Matrices are stored row-major with one
//! ordered map per row; no zero entry is ever stored. Forward elimination runs over integer
//! rows (each row scaled by the lcm of its denominators and divided by its content after
//! every update), and rationals only reappear in the final back-substitution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Dense column vector.
pub type Vector = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vector(len: usize) -> Vector {
    vec![Rational::zero(); len]
}

#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    /// Convenience constructor for tests and small literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| row.iter().map(|&v| rat(v)).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[row]
            .get(&col)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        if value.is_zero() {
            self.data[row].remove(&col);
        } else {
            self.data[row].insert(col, value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: &Rational) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        if value.is_zero() {
            return;
        }
        let entry = self.data[row].entry(col).or_insert_with(Rational::zero);
        *entry += value;
        if entry.is_zero() {
            self.data[row].remove(&col);
        }
    }

    pub fn row(&self, row: usize) -> &BTreeMap<usize, Rational> {
        &self.data[row]
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn column(&self, col: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        let mut m = Self::zeros(self.rows, self.cols);
        if s.is_zero() {
            return m;
        }
        for (r, c, v) in self.entries() {
            m.set(r, c, v * s);
        }
        m
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[r] = acc;
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(
            self.cols,
            v.len(),
            "dimension mismatch in matrix-vector product"
        );
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Rational::zero(), |acc, (c, a)| acc + a * &v[*c])
            })
            .collect()
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: SparseMatrix,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

type IntRow = Vec<(usize, BigInt)>;

fn integer_row(row: &BTreeMap<usize, Rational>) -> IntRow {
    let lcm = row
        .values()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut out: IntRow = row
        .iter()
        .map(|(&c, v)| (c, v.numer() * (&lcm / v.denom())))
        .collect();
    remove_content(&mut out);
    out
}

fn remove_content(row: &mut IntRow) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// `ka * a - kb * b`, merged by column, zeros dropped.
fn combine(ka: &BigInt, a: &IntRow, kb: &BigInt, b: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push((a[i].0, ka * &a[i].1));
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(kb * &b[j].1)));
            j += 1;
        } else {
            let v = ka * &a[i].1 - kb * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Reduced row-echelon form.
///
/// Pivots are taken on the smallest available column, and within a column on the
/// smallest row index that still has a nonzero entry there.
pub fn rref(m: &SparseMatrix) -> Rref {
    let mut rows: Vec<Option<IntRow>> = m
        .data
        .iter()
        .map(|r| {
            let ir = integer_row(r);
            (!ir.is_empty()).then_some(ir)
        })
        .collect();

    // leading column -> rows whose first nonzero entry sits there
    let mut buckets: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        if let Some(row) = row {
            buckets.entry(row[0].0).or_default().insert(i);
        }
    }

    let mut pivot_rows: Vec<IntRow> = Vec::new();
    while let Some((col, members)) = buckets.pop_first() {
        let mut members = members.into_iter();
        let pivot_idx = members.next().expect("bucket is never empty");
        let pivot = rows[pivot_idx].take().expect("pivot row present");
        let p = pivot[0].1.clone();
        for idx in members {
            let row = rows[idx].take().expect("member row present");
            let e = row[0].1.clone();
            debug_assert_eq!(row[0].0, col);
            let g = p.gcd(&e);
            let mut reduced = combine(&(&p / &g), &row, &(&e / &g), &pivot);
            if reduced.is_empty() {
                continue;
            }
            remove_content(&mut reduced);
            buckets.entry(reduced[0].0).or_default().insert(idx);
            rows[idx] = Some(reduced);
        }
        pivot_rows.push(pivot);
    }

    let pivot_cols: Vec<usize> = pivot_rows.iter().map(|r| r[0].0).collect();
    let mut reduced_rows: Vec<BTreeMap<usize, Rational>> = pivot_rows
        .into_iter()
        .map(|r| {
            let lead = Rational::from_integer(r[0].1.clone());
            r.into_iter()
                .map(|(c, v)| (c, Rational::from_integer(v) / &lead))
                .collect()
        })
        .collect();

    for i in (0..reduced_rows.len()).rev() {
        let pc = pivot_cols[i];
        let (above, rest) = reduced_rows.split_at_mut(i);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            if let Some(e) = row.get(&pc).cloned() {
                for (c, v) in pivot_row {
                    let entry = row.entry(*c).or_insert_with(Rational::zero);
                    *entry -= &e * v;
                    if entry.is_zero() {
                        row.remove(c);
                    }
                }
            }
        }
    }

    let rank = pivot_cols.len();
    let mut reduced = SparseMatrix::zeros(m.rows, m.cols);
    for (i, row) in reduced_rows.into_iter().enumerate() {
        reduced.data[i] = row;
    }
    Rref {
        reduced,
        pivot_cols,
        rank,
    }
}

pub fn rank(m: &SparseMatrix) -> usize {
    rref(m).rank
}

/// Basis of the null space, one vector per non-pivot column in increasing order.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vector> {
    let Rref {
        reduced,
        pivot_cols,
        ..
    } = rref(m);
    let pivots: BTreeSet<usize> = pivot_cols.iter().copied().collect();
    (0..m.cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = zero_vector(m.cols);
            v[free] = Rational::one();
            for (i, &pc) in pivot_cols.iter().enumerate() {
                if let Some(e) = reduced.data[i].get(&free) {
                    v[pc] = -e.clone();
                }
            }
            v
        })
        .collect()
}

/// `dim ker(d_out) - rank(d_in)` for `C^{n-1} --d_in--> C^n --d_out--> C^{n+1}`.
pub fn cohomology_dim(d_out: &SparseMatrix, d_in: &SparseMatrix) -> Result<usize> {
    check_composable(d_out, d_in)?;
    let kernel = d_out.cols() - rank(d_out);
    let image = rank(d_in);
    Ok(kernel - image)
}

fn check_composable(d_out: &SparseMatrix, d_in: &SparseMatrix) -> Result<()> {
    if d_out.cols() != d_in.rows() {
        return Err(Error::Internal(format!(
            "differentials do not compose: {}x{} after {}x{}",
            d_out.rows(),
            d_out.cols(),
            d_in.rows(),
            d_in.cols()
        )));
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::CompositionNotZero {
            context: format!(
                "{}x{} after {}x{}",
                d_out.rows(),
                d_out.cols(),
                d_in.rows(),
                d_in.cols()
            ),
        });
    }
    Ok(())
}

/// `rank(base ∪ extra) - rank(base)`: how many dimensions `extra` adds modulo `base`.
pub fn relative_rank(dim: usize, base: &[Vector], extra: &[Vector]) -> usize {
    let b = rank(&SparseMatrix::from_columns(dim, base));
    let mut all = base.to_vec();
    all.extend_from_slice(extra);
    rank(&SparseMatrix::from_columns(dim, &all)) - b
}

/// Cocycles whose classes form a basis of `ker d_out / im d_in`.
///
/// Candidates are the kernel basis vectors in order; each is kept when it is independent of
/// the image together with the ones already kept.
pub fn cohomology_representatives(
    d_out: &SparseMatrix,
    d_in: &SparseMatrix,
) -> Result<Vec<Vector>> {
    check_composable(d_out, d_in)?;
    let dim = d_out.cols();
    let boundaries: Vec<Vector> = (0..d_in.cols()).map(|c| d_in.column(c)).collect();
    let mut span = boundaries;
    let mut current = rank(&SparseMatrix::from_columns(dim, &span));
    let mut reps = Vec::new();
    for z in kernel_basis(d_out) {
        span.push(z.clone());
        let r = rank(&SparseMatrix::from_columns(dim, &span));
        if r > current {
            current = r;
            reps.push(z);
        } else {
            span.pop();
        }
    }
    Ok(reps)
}

/// Some `x` with `m x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &SparseMatrix, b: &[Rational]) -> Option<Vector> {
    assert_eq!(m.rows(), b.len(), "right-hand side length mismatch");
    let mut aug = SparseMatrix::zeros(m.rows(), m.cols() + 1);
    for (r, c, v) in m.entries() {
        aug.set(r, c, v.clone());
    }
    for (r, v) in b.iter().enumerate() {
        aug.set(r, m.cols(), v.clone());
    }
    let Rref {
        reduced,
        pivot_cols,
        ..
    } = rref(&aug);
    if pivot_cols.last() == Some(&m.cols()) {
        return None;
    }
    let mut x = zero_vector(m.cols());
    for (i, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = reduced.get(i, m.cols());
    }
    Some(x)
}

pub fn inverse(m: &SparseMatrix) -> Option<SparseMatrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let n = m.rows();
    let mut aug = SparseMatrix::zeros(n, 2 * n);
    for (r, c, v) in m.entries() {
        aug.set(r, c, v.clone());
    }
    for i in 0..n {
        aug.set(i, n + i, Rational::one());
    }
    let Rref {
        reduced,
        pivot_cols,
        ..
    } = rref(&aug);
    if pivot_cols.len() < n || pivot_cols[..n].iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    let mut inv = SparseMatrix::zeros(n, n);
    for r in 0..n {
        for (&c, v) in reduced.row(r).range(n..) {
            inv.set(r, c - n, v.clone());
        }
    }
    Some(inv)
}

pub fn is_nonnegative_integer(q: &Rational) -> bool {
    q.is_integer() && !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rref_identity() {
        let id = SparseMatrix::identity(2);
        let r = rref(&id);
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn rref_proportional_rows() {
        let r = rref(&SparseMatrix::from_i64(&[&[2, 4], &[1, 2]]));
        assert_eq!(r.reduced, SparseMatrix::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.pivot_cols, vec![0]);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn rref_scalar_normalization() {
        let r = rref(&SparseMatrix::from_dense(&[vec![ratio(1, 3)]]));
        assert_eq!(r.reduced, SparseMatrix::identity(1));
        assert_eq!(r.pivot_cols, vec![0]);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn rref_with_fractions_and_back_substitution() {
        let m = SparseMatrix::from_dense(&[
            vec![ratio(1, 2), rat(1), rat(0)],
            vec![rat(0), ratio(2, 3), rat(1)],
        ]);
        let r = rref(&m);
        let expected = SparseMatrix::from_dense(&[
            vec![rat(1), rat(0), rat(-3)],
            vec![rat(0), rat(1), ratio(3, 2)],
        ]);
        assert_eq!(r.reduced, expected);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(kernel_basis(&SparseMatrix::identity(2)).is_empty());
    }

    #[test]
    fn kernel_of_one_relation() {
        let k = kernel_basis(&SparseMatrix::from_i64(&[&[1, 2]]));
        assert_eq!(k, vec![vec![rat(-2), rat(1)]]);
    }

    #[test]
    fn kernel_of_zero_map_is_standard_basis() {
        let k = kernel_basis(&SparseMatrix::zeros(3, 3));
        assert_eq!(
            k,
            vec![
                vec![rat(1), rat(0), rat(0)],
                vec![rat(0), rat(1), rat(0)],
                vec![rat(0), rat(0), rat(1)],
            ]
        );
    }

    #[test]
    fn trivial_complex_has_one_class() {
        let z = SparseMatrix::zeros(1, 1);
        assert_eq!(cohomology_dim(&z, &z).unwrap(), 1);
    }

    #[test]
    fn nonzero_composite_is_rejected() {
        let id = SparseMatrix::identity(1);
        assert!(matches!(
            cohomology_dim(&id, &id),
            Err(Error::CompositionNotZero { .. })
        ));
    }

    #[test]
    fn solve_and_inverse() {
        let m = SparseMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let x = solve(&m, &[rat(3), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), SparseMatrix::identity(2));
        assert!(solve(
            &SparseMatrix::from_i64(&[&[1, 1], &[1, 1]]),
            &[rat(1), rat(2)]
        )
        .is_none());
        assert!(inverse(&SparseMatrix::from_i64(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn representatives_skip_boundaries() {
        // C^0 = Q --(1,0)^T--> C^1 = Q^2 --0--> 0
        let d_in = SparseMatrix::from_i64(&[&[1], &[0]]);
        let d_out = SparseMatrix::zeros(0, 2);
        let reps = cohomology_representatives(&d_out, &d_in).unwrap();
        assert_eq!(reps, vec![vec![rat(0), rat(1)]]);
    }

    fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..6, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -4i64..5], r * c).prop_map(
                move |vals| {
                    let mut m = SparseMatrix::zeros(r, c);
                    for (i, v) in vals.into_iter().enumerate() {
                        m.set(i / c, i % c, rat(v));
                    }
                    m
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let r = rref(&m);
            let k = kernel_basis(&m);
            prop_assert_eq!(r.rank + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn rref_is_idempotent(m in small_matrix()) {
            let r = rref(&m);
            let again = rref(&r.reduced);
            prop_assert_eq!(&again.reduced, &r.reduced);
            prop_assert_eq!(again.pivot_cols, r.pivot_cols.clone());
            prop_assert!(r.pivot_cols.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn rref_is_invariant_under_row_operations(m in small_matrix(), k in -3i64..4) {
            // Adding a multiple of row 0 to the last row does not change the row space.
            let mut n = m.clone();
            let last = m.rows() - 1;
            if last > 0 {
                for (&c, v) in m.row(0).clone().iter() {
                    n.add_to(last, c, &(v * rat(k)));
                }
            }
            prop_assert_eq!(rref(&n).reduced, rref(&m).reduced);
        }
    }
}
