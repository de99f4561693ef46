//! Smith normal form over the integers with unimodular transforms.
//!
//! All arithmetic is checked `i64`; any overflow aborts with
//! [`SnfError::Overflow`] rather than wrapping.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnfError {
    #[error("integer overflow during Smith normal form reduction")]
    Overflow,
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds from rows; `cols` fixes the width so that zero-row matrices keep
    /// their column count.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self, SnfError> {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(SnfError::Ragged { row: i, found: r.len(), expected: cols });
            }
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix, SnfError> {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let p = self[(i, k)].checked_mul(other[(k, j)]).ok_or(SnfError::Overflow)?;
                    acc = acc.checked_add(p).ok_or(SnfError::Overflow)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square only.
    pub fn determinant(&self) -> Result<i64, SnfError> {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                        .ok_or(SnfError::Overflow)?;
                    a[i][j] = v / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| SnfError::Overflow)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`smith_normal_form`]: `left * m * right` is diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// One entry per column of the input; entries past the row count are 0.
    /// Nonzero entries form a divisibility chain and precede the zeros.
    pub diagonal: Vec<i64>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

fn add_row_multiple(m: &mut IntMatrix, dst: usize, src: usize, k: i64) -> Result<(), SnfError> {
    if k == 0 {
        return Ok(());
    }
    for j in 0..m.cols {
        let v = m[(src, j)].checked_mul(k).ok_or(SnfError::Overflow)?;
        m[(dst, j)] = m[(dst, j)].checked_add(v).ok_or(SnfError::Overflow)?;
    }
    Ok(())
}

fn add_col_multiple(m: &mut IntMatrix, dst: usize, src: usize, k: i64) -> Result<(), SnfError> {
    if k == 0 {
        return Ok(());
    }
    for i in 0..m.rows {
        let v = m[(i, src)].checked_mul(k).ok_or(SnfError::Overflow)?;
        m[(i, dst)] = m[(i, dst)].checked_add(v).ok_or(SnfError::Overflow)?;
    }
    Ok(())
}

fn swap_rows(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for j in 0..m.cols {
            m.data.swap(a * m.cols + j, b * m.cols + j);
        }
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + a, i * m.cols + b);
        }
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) -> Result<(), SnfError> {
    for j in 0..m.cols {
        m[(r, j)] = m[(r, j)].checked_neg().ok_or(SnfError::Overflow)?;
    }
    Ok(())
}

/// Computes the Smith normal form of `m` exactly.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm, SnfError> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);

    // row ops act on `a` and `left`; column ops on `a` and `right`
    macro_rules! row_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            add_row_multiple(&mut a, $dst, $src, $k)?;
            add_row_multiple(&mut left, $dst, $src, $k)?;
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            add_col_multiple(&mut a, $dst, $src, $k)?;
            add_col_multiple(&mut right, $dst, $src, $k)?;
        }};
    }

    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = a[(i, j)];
                if v != 0 && best.is_none_or(|(bi, bj)| v.abs() < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut a, t, pi);
        swap_rows(&mut left, t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut right, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[(i, t)].div_euclid(a[(t, t)]);
                row_add!(i, t, q.checked_neg().ok_or(SnfError::Overflow)?);
                if a[(i, t)] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[(t, j)].div_euclid(a[(t, t)]);
                col_add!(j, t, q.checked_neg().ok_or(SnfError::Overflow)?);
                if a[(t, j)] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder is smaller than the pivot: move it into place
                let mut best = (t, t);
                for i in t..rows {
                    if a[(i, t)] != 0 && a[(i, t)].abs() < a[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if a[(t, j)] != 0 && a[(t, j)].abs() < a[best].abs() {
                        best = (t, j);
                    }
                }
                swap_rows(&mut a, t, best.0);
                swap_rows(&mut left, t, best.0);
                swap_cols(&mut a, t, best.1);
                swap_cols(&mut right, t, best.1);
                continue;
            }
            // row and column cleared; enforce divisibility on the block
            let p = a[(t, t)];
            let offender =
                (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a[(i, j)] % p != 0);
            match offender {
                Some((i, _)) => row_add!(t, i, 1),
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            negate_row(&mut a, t)?;
            negate_row(&mut left, t)?;
        }
        t += 1;
    }

    let diagonal = (0..cols).map(|j| if j < rows { a[(j, j)] } else { 0 }).collect();
    Ok(SmithForm { diagonal, left, right })
}
