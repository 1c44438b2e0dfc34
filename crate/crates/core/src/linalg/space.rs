use serde::{Deserialize, Serialize};

use super::LinalgError;

/// Ordered list of named registers. The tensor order is the declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterSpace {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl RegisterSpace {
    /// The one-dimensional space with no registers.
    pub fn empty() -> Self {
        RegisterSpace { labels: Vec::new(), dims: Vec::new() }
    }

    pub fn new<S: AsRef<str>>(regs: &[(S, usize)]) -> Result<Self, LinalgError> {
        let mut space = Self::empty();
        for (label, dim) in regs {
            space.push(label.as_ref(), *dim)?;
        }
        Ok(space)
    }

    /// Single register.
    pub fn single(label: &str, dim: usize) -> Result<Self, LinalgError> {
        Self::new(&[(label, dim)])
    }

    fn push(&mut self, label: &str, dim: usize) -> Result<(), LinalgError> {
        if dim == 0 {
            return Err(LinalgError::InvalidDimension { label: label.to_string(), dim });
        }
        if self.contains(label) {
            return Err(LinalgError::LabelCollision(label.to_string()));
        }
        self.labels.push(label.to_string());
        self.dims.push(dim);
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize, LinalgError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| LinalgError::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize, LinalgError> {
        Ok(self.dims[self.position(label)?])
    }

    /// Product of the dimensions of the given registers.
    pub fn dim_of_all<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize, LinalgError> {
        labels.iter().try_fold(1usize, |acc, l| Ok(acc * self.dim_of(l.as_ref())?))
    }

    /// `self` followed by `other`.
    pub fn merge(&self, other: &RegisterSpace) -> Result<Self, LinalgError> {
        let mut out = self.clone();
        for (l, &d) in other.labels.iter().zip(&other.dims) {
            out.push(l, d)?;
        }
        Ok(out)
    }

    /// Registers in the given order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self, LinalgError> {
        let mut out = Self::empty();
        for l in labels {
            let l = l.as_ref();
            out.push(l, self.dim_of(l)?)?;
        }
        Ok(out)
    }

    /// Registers not in `labels`, in canonical order. Unknown labels are an error.
    pub fn without<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self, LinalgError> {
        for l in labels {
            self.position(l.as_ref())?;
        }
        let mut out = Self::empty();
        for (l, &d) in self.labels.iter().zip(&self.dims) {
            if !labels.iter().any(|x| x.as_ref() == l) {
                out.push(l, d)?;
            }
        }
        Ok(out)
    }

    /// Row-major digits of a flat index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&d, &n)| acc * n + d)
    }

    /// For each flat index of `self`, its index within the `rows` registers (in the
    /// given order) and within the remaining registers (in canonical order).
    pub fn split<S: AsRef<str>>(&self, rows: &[S]) -> Result<Split, LinalgError> {
        let row_space = self.select(rows)?;
        let col_space = self.without(rows)?;
        let row_pos: Vec<usize> = rows.iter().map(|l| self.position(l.as_ref())).collect::<Result<_, _>>()?;
        let col_pos: Vec<usize> =
            col_space.labels.iter().map(|l| self.position(l)).collect::<Result<_, _>>()?;
        let n = self.total_dim();
        let mut row_of = Vec::with_capacity(n);
        let mut col_of = Vec::with_capacity(n);
        for f in 0..n {
            let d = self.digits(f);
            row_of.push(row_pos.iter().fold(0, |acc, &p| acc * self.dims[p] + d[p]));
            col_of.push(col_pos.iter().fold(0, |acc, &p| acc * self.dims[p] + d[p]));
        }
        Ok(Split { row_dim: row_space.total_dim(), col_dim: col_space.total_dim(), row_of, col_of, col_space })
    }
}

/// Index bookkeeping for viewing a flat space as (selected registers) × (rest).
#[derive(Debug, Clone)]
pub struct Split {
    pub row_dim: usize,
    pub col_dim: usize,
    pub row_of: Vec<usize>,
    pub col_of: Vec<usize>,
    /// The remaining registers in canonical order.
    pub col_space: RegisterSpace,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let s = RegisterSpace::new(&[("a", 2), ("b", 3), ("c", 2)]).unwrap();
        for i in 0..s.total_dim() {
            assert_eq!(s.index(&s.digits(i)), i);
        }
        assert_eq!(s.digits(7), vec![1, 0, 1]);
    }

    #[test]
    fn collisions_and_unknowns_rejected() {
        assert!(matches!(
            RegisterSpace::new(&[("a", 2), ("a", 2)]),
            Err(LinalgError::LabelCollision(_))
        ));
        let s = RegisterSpace::single("a", 2).unwrap();
        assert!(matches!(s.without(&["z"]), Err(LinalgError::UnknownLabel(_))));
    }

    #[test]
    fn split_reorders_rows() {
        let s = RegisterSpace::new(&[("a", 2), ("b", 3)]).unwrap();
        let sp = s.split(&["b"]).unwrap();
        // flat index of (a=1, b=2) is 5
        assert_eq!(sp.row_of[5], 2);
        assert_eq!(sp.col_of[5], 1);
    }
}
