//! Row-major dense matrices, blocked products and singular values.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RMatrix = Matrix<f64>;
pub type CMatrix = Matrix<Complex64>;

impl<T: Copy + Default + Send + Sync> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::default(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> T + Sync + Send,
    {
        let mut data = vec![T::default(); rows * cols];
        if cols > 0 {
            par::for_each_chunk(&mut data, cols, |i, row| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(i, j);
                }
            });
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[T] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

impl RMatrix {
    pub fn to_complex(&self) -> CMatrix {
        Matrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }
}

impl CMatrix {
    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        Matrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v.conj()).collect(),
        )
    }

    pub fn real_part(&self) -> RMatrix {
        Matrix::from_vec(self.rows, self.cols, self.data.iter().map(|v| v.re).collect())
    }
}

const ROW_BLOCK: usize = 64;

/// Strided view of a matrix operand: base slice plus row and column strides.
#[derive(Clone, Copy)]
pub(crate) struct View<'a, T> {
    pub data: &'a [T],
    pub rs: isize,
    pub cs: isize,
}

impl<'a, T> View<'a, T> {
    pub fn of(m: &'a Matrix<T>, transposed: bool) -> Self {
        if transposed {
            View { data: &m.data, rs: 1, cs: m.cols as isize }
        } else {
            View { data: &m.data, rs: m.cols as isize, cs: 1 }
        }
    }
}

pub(crate) trait Gemm: Copy + Default + Send + Sync {
    /// `c = a * b` with `c` row-major of width `n`, sequential.
    fn gemm_seq(m: usize, k: usize, n: usize, a: View<Self>, b: View<Self>, c: &mut [Self]);
}

fn check_extent<T>(rows: usize, cols: usize, v: &View<T>) {
    if rows == 0 || cols == 0 {
        return;
    }
    let last = (rows - 1) as isize * v.rs + (cols - 1) as isize * v.cs;
    assert!(v.rs >= 0 && v.cs >= 0 && (last as usize) < v.data.len(), "operand out of bounds");
}

impl Gemm for f64 {
    fn gemm_seq(m: usize, k: usize, n: usize, a: View<f64>, b: View<f64>, c: &mut [f64]) {
        check_extent(m, k, &a);
        check_extent(k, n, &b);
        assert!(c.len() >= m * n);
        if m == 0 || n == 0 {
            return;
        }
        if k == 0 {
            c[..m * n].fill(0.0);
            return;
        }
        // SAFETY: extents checked above; `c` holds m rows of width n.
        unsafe {
            matrixmultiply::dgemm(
                m, k, n, 1.0, a.data.as_ptr(), a.rs, a.cs, b.data.as_ptr(), b.rs, b.cs, 0.0,
                c.as_mut_ptr(), n as isize, 1,
            );
        }
    }
}

impl Gemm for Complex64 {
    fn gemm_seq(m: usize, k: usize, n: usize, a: View<Complex64>, b: View<Complex64>, c: &mut [Complex64]) {
        check_extent(m, k, &a);
        check_extent(k, n, &b);
        assert!(c.len() >= m * n);
        if m == 0 || n == 0 {
            return;
        }
        if k == 0 {
            c[..m * n].fill(Complex64::new(0.0, 0.0));
            return;
        }
        // SAFETY: extents checked above; Complex64 is repr(C) (re, im), the layout
        // matrixmultiply expects for its complex kernels.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m,
                k,
                n,
                [1.0, 0.0],
                a.data.as_ptr() as *const [f64; 2],
                a.rs,
                a.cs,
                b.data.as_ptr() as *const [f64; 2],
                b.rs,
                b.cs,
                [0.0, 0.0],
                c.as_mut_ptr() as *mut [f64; 2],
                n as isize,
                1,
            );
        }
    }
}

/// `c = a * b`, split into fixed blocks of output rows so the arithmetic does not
/// depend on the thread count.
pub(crate) fn gemm_into<T: Gemm>(m: usize, k: usize, n: usize, a: View<T>, b: View<T>, c: &mut [T]) {
    if m == 0 || n == 0 {
        return;
    }
    let c = &mut c[..m * n];
    par::for_each_chunk(c, ROW_BLOCK * n, |blk, chunk| {
        let r0 = blk * ROW_BLOCK;
        let rows = chunk.len() / n;
        let off = r0 as isize * a.rs;
        let sub = View { data: &a.data[off as usize..], rs: a.rs, cs: a.cs };
        T::gemm_seq(rows, k, n, sub, b, chunk);
    });
}

fn matmul<T: Gemm>(a: &Matrix<T>, ta: bool, b: &Matrix<T>, tb: bool) -> Matrix<T> {
    let (m, k) = if ta { (a.cols, a.rows) } else { (a.rows, a.cols) };
    let (kb, n) = if tb { (b.cols, b.rows) } else { (b.rows, b.cols) };
    assert_eq!(k, kb, "inner dimensions differ");
    let mut out = Matrix::<T>::zeros(m, n);
    gemm_into(m, k, n, View::of(a, ta), View::of(b, tb), &mut out.data);
    out
}

/// `op(a) * op(b)` where `op` transposes when the flag is set.
pub fn matmul_real(a: &RMatrix, ta: bool, b: &RMatrix, tb: bool) -> RMatrix {
    matmul(a, ta, b, tb)
}

/// `op(a) * op(b)` where `op` transposes (without conjugating) when the flag is set.
pub fn matmul_complex(a: &CMatrix, ta: bool, b: &CMatrix, tb: bool) -> CMatrix {
    matmul(a, ta, b, tb)
}

/// Multiply a row-major tensor with dimensions `shape` along `axis` by `mat`
/// (`mat.rows() x shape[axis]`); the result has `shape[axis]` replaced by `mat.rows()`.
pub(crate) fn apply_axis<T: Gemm>(data: &[T], shape: &[usize], axis: usize, mat: &Matrix<T>) -> Vec<T> {
    let len = shape[axis];
    assert_eq!(mat.cols, len, "axis length differs from matrix width");
    assert_eq!(data.len(), shape.iter().product::<usize>(), "tensor size");
    let pre: usize = shape[..axis].iter().product();
    let post: usize = shape[axis + 1..].iter().product();
    let out_len = mat.rows;
    let mut out = vec![T::default(); pre * out_len * post];
    if post == 1 {
        // (pre x len) * mat^T
        let x = View { data, rs: len as isize, cs: 1 };
        gemm_into(pre, len, out_len, x, View::of(mat, true), &mut out);
    } else if pre == 1 {
        let x = View { data, rs: post as isize, cs: 1 };
        gemm_into(out_len, len, post, View::of(mat, false), x, &mut out);
    } else {
        par::for_each_chunk(&mut out, out_len * post, |p, block| {
            let x = View { data: &data[p * len * post..(p + 1) * len * post], rs: post as isize, cs: 1 };
            T::gemm_seq(out_len, len, post, View::of(mat, false), x, block);
        });
    }
    out
}

/// `a * x` for a complex matrix.
pub fn matvec(a: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.cols, x.len());
    par::map_collect(a.rows, |i| {
        let row = a.row(i);
        let mut s = Complex64::new(0.0, 0.0);
        for (r, v) in row.iter().zip(x) {
            s += r * v;
        }
        s
    })
}

/// `a * x` for a real matrix and complex vector.
pub fn matvec_real(a: &RMatrix, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.cols, x.len());
    par::map_collect(a.rows, |i| {
        let row = a.row(i);
        let mut s = Complex64::new(0.0, 0.0);
        for (r, v) in row.iter().zip(x) {
            s += v * *r;
        }
        s
    })
}

/// Singular values in decreasing order.
pub fn singular_values_real(a: &RMatrix) -> Vec<f64> {
    let m = DMatrix::from_row_slice(a.rows, a.cols, &a.data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Singular values in decreasing order.
pub fn singular_values_complex(a: &CMatrix) -> Vec<f64> {
    let m = DMatrix::from_row_slice(a.rows, a.cols, &a.data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &CMatrix, b: &CMatrix) -> CMatrix {
        Matrix::from_fn(a.rows, b.cols, |i, j| {
            (0..a.cols).map(|k| a.get(i, k) * b.get(k, j)).sum()
        })
    }

    #[test]
    fn complex_products_with_transposes() {
        let a = Matrix::from_fn(130, 70, |i, j| Complex64::new((i + 2 * j) as f64 * 0.01, (i as f64 - j as f64).sin()));
        let b = Matrix::from_fn(70, 90, |i, j| Complex64::new((i * j) as f64 * 1e-3, (i + j) as f64 * 0.02));
        let c = matmul_complex(&a, false, &b, false);
        let r = naive(&a, &b);
        let err = c.data().iter().zip(r.data()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-11);
        let at = a.transpose();
        let bt = b.transpose();
        let c2 = matmul_complex(&at, true, &bt, true);
        let err = c2.data().iter().zip(r.data()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-11);
    }

    #[test]
    fn real_product_matches_complex() {
        let a = Matrix::from_fn(67, 65, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let b = Matrix::from_fn(67, 80, |i, j| ((i * 5 + j) % 13) as f64 * 0.5);
        let c = matmul_real(&a, true, &b, false);
        let r = matmul_complex(&a.to_complex(), true, &b.to_complex(), false);
        assert!(c.data().iter().zip(r.data()).all(|(x, y)| (x - y.re).abs() < 1e-10));
    }

    #[test]
    fn axis_products_match_naive() {
        let shape = [3usize, 5, 4];
        let data: Vec<Complex64> = (0..60).map(|i| Complex64::new(i as f64 * 0.1, (i as f64).cos())).collect();
        for axis in 0..3 {
            let len = shape[axis];
            let mat = Matrix::from_fn(2, len, |i, j| Complex64::new(1.0 + i as f64, j as f64 * 0.5));
            let out = apply_axis(&data, &shape, axis, &mat);
            let mut oshape = shape;
            oshape[axis] = 2;
            for i0 in 0..oshape[0] {
                for i1 in 0..oshape[1] {
                    for i2 in 0..oshape[2] {
                        let idx = [i0, i1, i2];
                        let mut s = Complex64::new(0.0, 0.0);
                        for j in 0..len {
                            let mut src = idx;
                            src[axis] = j;
                            s += mat.get(idx[axis], j) * data[(src[0] * 5 + src[1]) * 4 + src[2]];
                        }
                        let got = out[(i0 * oshape[1] + i1) * oshape[2] + i2];
                        assert!((got - s).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = Matrix::from_fn(4, 4, |i, j| if i == j { [3.0, -5.0, 1.0, 0.5][i] } else { 0.0 });
        let s = singular_values_real(&a);
        assert_eq!(s.len(), 4);
        let expect = [5.0, 3.0, 1.0, 0.5];
        assert!(s.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
