use crate::error::{Error, Result};

/// Dense row-major tensor of 64-bit reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::dim("tensor", format!("zero dimension in shape {shape:?}")));
        }
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::dim(
                "tensor",
                format!("shape {shape:?} needs {n} values, got {}", data.len()),
            ));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; n],
        }
    }

    pub fn filled(shape: &[usize], value: f64) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; n],
        }
    }

    /// Stacks equal-length rows into an `[N, D]` matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::dim("from_rows", "no rows"))?
            .as_ref()
            .len();
        let mut data = Vec::with_capacity(rows.len() * first);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != first {
                return Err(Error::dim(
                    "from_rows",
                    format!("row {i} has length {}, expected {first}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Tensor::new(vec![rows.len(), first], data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    /// Width of a matrix (product of trailing dims for higher ranks).
    pub fn cols(&self) -> usize {
        self.shape[1..].iter().product()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols();
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn select_rows(&self, idx: &[usize]) -> Tensor {
        let c = self.cols();
        let mut data = Vec::with_capacity(idx.len() * c);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        let mut shape = self.shape.clone();
        shape[0] = idx.len();
        Tensor { shape, data }
    }

    pub fn require_matrix(&self, op: &'static str, cols: usize) -> Result<()> {
        if self.shape.len() != 2 || self.shape[1] != cols {
            return Err(Error::dim(op, format!("expected [N, {cols}], got {:?}", self.shape)));
        }
        Ok(())
    }

    pub fn same_shape(&self, other: &Tensor, op: &'static str) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::dim(op, format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(())
    }

    /// `[N, K] x [K, M] -> [N, M]`.
    pub fn matmul(&self, rhs: &Tensor) -> Result<Tensor> {
        if self.shape.len() != 2 || rhs.shape.len() != 2 || self.shape[1] != rhs.shape[0] {
            return Err(Error::dim("matmul", format!("{:?} x {:?}", self.shape, rhs.shape)));
        }
        let (n, k, m) = (self.shape[0], self.shape[1], rhs.shape[1]);
        let mut out = vec![0.0; n * m];
        for i in 0..n {
            let a = &self.data[i * k..(i + 1) * k];
            let o = &mut out[i * m..(i + 1) * m];
            for (p, &av) in a.iter().enumerate() {
                if av == 0.0 {
                    continue;
                }
                let b = &rhs.data[p * m..(p + 1) * m];
                for (ov, &bv) in o.iter_mut().zip(b) {
                    *ov += av * bv;
                }
            }
        }
        Ok(Tensor {
            shape: vec![n, m],
            data: out,
        })
    }

    /// `self^T x rhs` for `[N, K]`, `[N, M]` -> `[K, M]`.
    pub fn t_matmul(&self, rhs: &Tensor) -> Result<Tensor> {
        if self.shape.len() != 2 || rhs.shape.len() != 2 || self.shape[0] != rhs.shape[0] {
            return Err(Error::dim("t_matmul", format!("{:?}^T x {:?}", self.shape, rhs.shape)));
        }
        let (n, k, m) = (self.shape[0], self.shape[1], rhs.shape[1]);
        let mut out = vec![0.0; k * m];
        for r in 0..n {
            let a = &self.data[r * k..(r + 1) * k];
            let b = &rhs.data[r * m..(r + 1) * m];
            for (p, &av) in a.iter().enumerate() {
                if av == 0.0 {
                    continue;
                }
                let o = &mut out[p * m..(p + 1) * m];
                for (ov, &bv) in o.iter_mut().zip(b) {
                    *ov += av * bv;
                }
            }
        }
        Ok(Tensor {
            shape: vec![k, m],
            data: out,
        })
    }

    /// `self x rhs^T` for `[N, M]`, `[K, M]` -> `[N, K]`.
    pub fn matmul_t(&self, rhs: &Tensor) -> Result<Tensor> {
        if self.shape.len() != 2 || rhs.shape.len() != 2 || self.shape[1] != rhs.shape[1] {
            return Err(Error::dim("matmul_t", format!("{:?} x {:?}^T", self.shape, rhs.shape)));
        }
        let (n, m, k) = (self.shape[0], self.shape[1], rhs.shape[0]);
        let mut out = vec![0.0; n * k];
        for i in 0..n {
            let a = &self.data[i * m..(i + 1) * m];
            for j in 0..k {
                let b = &rhs.data[j * m..(j + 1) * m];
                out[i * k + j] = a.iter().zip(b).map(|(x, y)| x * y).sum();
            }
        }
        Ok(Tensor {
            shape: vec![n, k],
            data: out,
        })
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_assign(&mut self, other: &Tensor) -> Result<()> {
        self.same_shape(other, "add")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn check_finite(&self, op: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Numeric { op })
        }
    }

    /// Row-wise argmax; ties resolve to the lowest index.
    pub fn argmax_rows(&self) -> Vec<usize> {
        (0..self.rows())
            .map(|i| {
                let r = self.row(i);
                let mut best = 0;
                for (j, &v) in r.iter().enumerate() {
                    if v > r[best] {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }
}
