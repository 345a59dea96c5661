//! Wire format shared by every JSON surface: complex scalars are
//! `[re, im]`, vectors are arrays of those, matrices are arrays of rows.

use crate::cmatrix::{CMat, C64};
use crate::error::{dim_err, Error, Result};

pub type WireComplex = [f64; 2];
pub type WireVector = Vec<WireComplex>;
pub type WireMatrix = Vec<Vec<WireComplex>>;

pub fn complex_out(z: C64) -> WireComplex {
    [z.re, z.im]
}

pub fn complex_in(w: WireComplex) -> Result<C64> {
    if !w[0].is_finite() || !w[1].is_finite() {
        return Err(Error::InvalidParameter("non-finite complex scalar".into()));
    }
    Ok(C64::new(w[0], w[1]))
}

pub fn vector_out(v: &[C64]) -> WireVector {
    v.iter().copied().map(complex_out).collect()
}

pub fn vector_in(w: &[WireComplex]) -> Result<Vec<C64>> {
    w.iter().copied().map(complex_in).collect()
}

pub fn matrix_out(m: &CMat) -> WireMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| complex_out(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_in(w: &WireMatrix, rows: usize, cols: usize, what: &'static str) -> Result<CMat> {
    // A p x 0 block may be written as [] or as p empty rows.
    if cols == 0 {
        return Ok(CMat::zeros(rows, 0));
    }
    if w.len() != rows {
        return Err(dim_err(what, format!("{rows} rows"), format!("{} rows", w.len())));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for row in w {
        if row.len() != cols {
            return Err(dim_err(what, format!("{cols} columns"), format!("{} columns", row.len())));
        }
        for &z in row {
            entries.push(complex_in(z)?);
        }
    }
    CMat::from_row_major(rows, cols, &entries)
}

pub fn matrix_in_square(w: &WireMatrix, what: &'static str) -> Result<CMat> {
    let n = w.len();
    matrix_in(w, n, n, what)
}
