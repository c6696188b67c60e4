use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Copy the given rows of `x` into a new matrix, in the order given.
pub(crate) fn select_rows(x: ArrayView2<'_, f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), x.ncols()));
    for (i, &r) in rows.iter().enumerate() {
        out.row_mut(i).assign(&x.row(r));
    }
    out
}

/// Copy the given entries of `y` into a new vector, in the order given.
pub(crate) fn select_entries(y: ArrayView1<'_, f64>, rows: &[usize]) -> Array1<f64> {
    Array1::from_shape_fn(rows.len(), |i| y[rows[i]])
}
