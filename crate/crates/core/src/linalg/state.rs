//! Operators, density operators and pure states on labeled register spaces.

use super::eigen::{eig_hermitian, eig_hermitian_part};
use super::matrix::norm;
use super::space::RegisterSpace;
use super::{CMatrix, LinalgError};
use crate::policy::policy;
use crate::scalar::{cr, czero, Real, C};

/// Square matrix acting on a register space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    space: RegisterSpace,
    matrix: CMatrix<T>,
}

impl<T: Real> Operator<T> {
    pub fn new(space: RegisterSpace, matrix: CMatrix<T>) -> Result<Self, LinalgError> {
        let d = space.total_dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(LinalgError::Shape { expected: (d, d), found: (matrix.rows(), matrix.cols()) });
        }
        Ok(Operator { space, matrix })
    }

    pub fn identity(space: RegisterSpace) -> Self {
        let d = space.total_dim();
        Operator { space, matrix: CMatrix::identity(d) }
    }

    pub fn space(&self) -> &RegisterSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn tensor(&self, other: &Operator<T>) -> Result<Operator<T>, LinalgError> {
        let space = self.space.merge(&other.space)?;
        Ok(Operator { space, matrix: self.matrix.kron(&other.matrix) })
    }

    pub fn partial_trace<S: AsRef<str>>(&self, discard: &[S]) -> Result<Operator<T>, LinalgError> {
        let (space, matrix) = partial_trace_matrix(&self.space, &self.matrix, discard)?;
        Ok(Operator { space, matrix })
    }

    /// Reorders the registers; `order` must be a permutation of the labels.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Operator<T>, LinalgError> {
        let (space, matrix) = permute_matrix(&self.space, &self.matrix, order)?;
        Ok(Operator { space, matrix })
    }

    /// `U ρ U†` with `U` acting on the listed registers (in that order).
    pub fn conjugate_local<S: AsRef<str>>(&self, u: &CMatrix<T>, on: &[S]) -> Result<Operator<T>, LinalgError> {
        let e = embed_local(&self.space, u, on)?;
        let matrix = e.matmul(&self.matrix).matmul(&e.adjoint());
        Ok(Operator { space: self.space.clone(), matrix })
    }
}

/// Positive semi-definite operator with `0 < tr ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    op: Operator<T>,
}

impl<T: Real> DensityOperator<T> {
    /// Validates Hermiticity, positivity, trace and the dimension cap. The stored
    /// matrix is the Hermitian part of the input.
    pub fn new(space: RegisterSpace, matrix: CMatrix<T>) -> Result<Self, LinalgError> {
        let pol = policy::<T>();
        let d = space.total_dim();
        if d > pol.dim_cap {
            return Err(LinalgError::DimensionCap { dim: d, cap: pol.dim_cap });
        }
        let op = Operator::new(space, matrix)?;
        let tol = T::lit(pol.validity);
        let defect = op.matrix.hermiticity_defect();
        if defect > tol {
            return Err(LinalgError::NotHermitian { deviation: defect.to_f64_lossy() });
        }
        let matrix = op.matrix.hermitian_part();
        let tr = matrix.trace().re;
        if !(tr > T::zero()) || tr > T::one() + tol {
            return Err(LinalgError::BadTrace { trace: tr.to_f64_lossy() });
        }
        let min = eig_hermitian_part(&matrix).min();
        if min < -tol {
            return Err(LinalgError::NotPositive { min_eigenvalue: min.to_f64_lossy() });
        }
        Ok(DensityOperator { op: Operator { space: op.space, matrix } })
    }

    /// Skips validation; for operators that are PSD by construction.
    pub(crate) fn from_trusted(space: RegisterSpace, matrix: CMatrix<T>) -> Self {
        DensityOperator { op: Operator { space, matrix } }
    }

    pub fn from_pure(psi: &PureState<T>) -> Result<Self, LinalgError> {
        cap_check::<T>(psi.space.total_dim())?;
        Ok(Self::from_trusted(psi.space.clone(), CMatrix::outer(&psi.amps, &psi.amps)))
    }

    /// Diagonal state with the given probabilities.
    pub fn classical(space: RegisterSpace, probs: &[T]) -> Result<Self, LinalgError> {
        if probs.len() != space.total_dim() {
            return Err(LinalgError::Shape { expected: (space.total_dim(), 1), found: (probs.len(), 1) });
        }
        Self::new(space, CMatrix::from_real_diag(probs))
    }

    pub fn maximally_mixed(space: RegisterSpace) -> Result<Self, LinalgError> {
        let d = space.total_dim();
        let p = T::one() / T::from_usize_lossy(d);
        Self::classical(space, &vec![p; d])
    }

    /// `|k⟩⟨k|` in the computational basis.
    pub fn basis(space: RegisterSpace, k: usize) -> Result<Self, LinalgError> {
        let mut probs = vec![T::zero(); space.total_dim()];
        probs[k] = T::one();
        Self::classical(space, &probs)
    }

    pub fn space(&self) -> &RegisterSpace {
        self.op.space()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.op.matrix()
    }

    pub fn operator(&self) -> &Operator<T> {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.space.total_dim()
    }

    pub fn trace(&self) -> T {
        self.op.matrix.trace().re
    }

    /// Rescaled to unit trace.
    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        Self::from_trusted(self.space().clone(), self.matrix().scale_real(T::one() / tr))
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - T::one()).abs() <= T::lit(policy::<T>().validity)
    }

    pub fn require_normalized(&self) -> Result<(), LinalgError> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(LinalgError::BadTrace { trace: self.trace().to_f64_lossy() })
        }
    }

    /// Eigenvalues in descending order.
    pub fn spectrum(&self) -> Vec<T> {
        eig_hermitian_part(self.matrix()).values
    }

    pub fn tensor(&self, other: &DensityOperator<T>) -> Result<Self, LinalgError> {
        let op = self.op.tensor(&other.op)?;
        cap_check::<T>(op.space.total_dim())?;
        Ok(DensityOperator { op })
    }

    pub fn partial_trace<S: AsRef<str>>(&self, discard: &[S]) -> Result<Self, LinalgError> {
        Ok(DensityOperator { op: self.op.partial_trace(discard)? })
    }

    /// Marginal on `keep` (in canonical order).
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self, LinalgError> {
        let discard: Vec<String> = self.space().without(keep)?.labels().to_vec();
        self.partial_trace(&discard)
    }

    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self, LinalgError> {
        Ok(DensityOperator { op: self.op.permute(order)? })
    }

    /// `U ρ U†` for a unitary on the listed registers.
    pub fn conjugate_local<S: AsRef<str>>(&self, u: &CMatrix<T>, on: &[S]) -> Result<Self, LinalgError> {
        check_isometry(u)?;
        if u.rows() != u.cols() {
            return Err(LinalgError::Shape { expected: (u.cols(), u.cols()), found: (u.rows(), u.cols()) });
        }
        Ok(DensityOperator { op: self.op.conjugate_local(u, on)? })
    }

    /// Purification `Σ_k √λ_k |v_k⟩|k⟩` with an ancilla of the same dimension as the state.
    /// Eigenvalues are taken in descending order, so a pure input is paired with `|0⟩`.
    pub fn purify(&self, ancilla: &str) -> Result<PureState<T>, LinalgError> {
        self.require_normalized()?;
        let d = self.dim();
        let space = self.space().merge(&RegisterSpace::single(ancilla, d)?)?;
        let eig = eig_hermitian(self.matrix())?;
        let mut amps = vec![czero(); d * d];
        for k in 0..d {
            let lam = eig.values[k].max(T::zero());
            if lam == T::zero() {
                continue;
            }
            let s = lam.sqrt();
            for i in 0..d {
                amps[i * d + k] = eig.vectors[(i, k)] * s;
            }
        }
        let mut psi = PureState { space, amps };
        psi.renormalize();
        Ok(psi)
    }
}

/// Unit vector on a register space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    space: RegisterSpace,
    amps: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(space: RegisterSpace, amps: Vec<C<T>>) -> Result<Self, LinalgError> {
        let pol = policy::<T>();
        let d = space.total_dim();
        if d > pol.pure_dim_cap {
            return Err(LinalgError::DimensionCap { dim: d, cap: pol.pure_dim_cap });
        }
        if amps.len() != d {
            return Err(LinalgError::Shape { expected: (d, 1), found: (amps.len(), 1) });
        }
        let n = norm(&amps);
        if (n - T::one()).abs() > T::lit(pol.validity) {
            return Err(LinalgError::NotNormalized { norm: n.to_f64_lossy() });
        }
        Ok(PureState { space, amps })
    }

    /// Normalizes a nonzero vector.
    pub fn from_unnormalized(space: RegisterSpace, amps: Vec<C<T>>) -> Result<Self, LinalgError> {
        let n = norm(&amps);
        if !(n > T::zero()) {
            return Err(LinalgError::ZeroNorm);
        }
        let inv = T::one() / n;
        Self::new(space, amps.into_iter().map(|z| z * inv).collect())
    }

    pub fn basis(space: RegisterSpace, k: usize) -> Result<Self, LinalgError> {
        let mut amps = vec![czero(); space.total_dim()];
        amps[k] = cr(T::one());
        Self::new(space, amps)
    }

    fn renormalize(&mut self) {
        let n = norm(&self.amps);
        if n > T::zero() {
            let inv = T::one() / n;
            for z in &mut self.amps {
                *z = *z * inv;
            }
        }
    }

    pub fn space(&self) -> &RegisterSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        norm(&self.amps)
    }

    pub fn density(&self) -> Result<DensityOperator<T>, LinalgError> {
        DensityOperator::from_pure(self)
    }

    pub fn tensor(&self, other: &PureState<T>) -> Result<Self, LinalgError> {
        let space = self.space.merge(&other.space)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        Self::new(space, amps)
    }

    /// The amplitudes reshaped as a matrix with rows indexed by `rows` (in the given
    /// order) and columns by the remaining registers (canonical order).
    pub fn bipartite_matrix<S: AsRef<str>>(&self, rows: &[S]) -> Result<CMatrix<T>, LinalgError> {
        let sp = self.space.split(rows)?;
        let mut m = CMatrix::zeros(sp.row_dim, sp.col_dim);
        for (f, a) in self.amps.iter().enumerate() {
            m[(sp.row_of[f], sp.col_of[f])] = *a;
        }
        Ok(m)
    }

    /// Reduced state on `keep` (in the given order), computed from the vector.
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator<T>, LinalgError> {
        let space = self.space.select(keep)?;
        cap_check::<T>(space.total_dim())?;
        let m = self.bipartite_matrix(keep)?;
        let rho = m.matmul(&m.adjoint());
        Ok(DensityOperator::from_trusted(space, rho.hermitian_part()))
    }

    /// Applies `iso` to the registers `on`; its output factors as `on` followed by the
    /// fresh registers `append`, which are added at the end of the space.
    pub fn apply_isometry<S: AsRef<str>>(
        &self,
        iso: &CMatrix<T>,
        on: &[S],
        append: &[(&str, usize)],
    ) -> Result<Self, LinalgError> {
        check_isometry(iso)?;
        let d_in = self.space.dim_of_all(on)?;
        let extra = RegisterSpace::new(append)?;
        let d_out = d_in * extra.total_dim();
        if iso.cols() != d_in || iso.rows() != d_out {
            return Err(LinalgError::Shape { expected: (d_out, d_in), found: (iso.rows(), iso.cols()) });
        }
        let m_in = self.bipartite_matrix(on)?;
        let m_out = iso.matmul(&m_in);
        let out_space = self.space.merge(&extra)?;
        if out_space.total_dim() > policy::<T>().pure_dim_cap {
            return Err(LinalgError::DimensionCap { dim: out_space.total_dim(), cap: policy::<T>().pure_dim_cap });
        }
        let mut rows: Vec<String> = on.iter().map(|s| s.as_ref().to_string()).collect();
        rows.extend(extra.labels().iter().cloned());
        let sp = out_space.split(&rows)?;
        let amps = (0..out_space.total_dim()).map(|f| m_out[(sp.row_of[f], sp.col_of[f])]).collect();
        let mut psi = PureState { space: out_space, amps };
        psi.renormalize();
        Ok(psi)
    }

    /// Reorders the registers.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self, LinalgError> {
        let target = self.space.select(order)?;
        if target.len() != self.space.len() {
            return Err(LinalgError::UnknownLabel(format!("permutation of {:?}", self.space.labels())));
        }
        let sp = self.space.split(order)?;
        let mut amps = vec![czero(); self.amps.len()];
        for (f, a) in self.amps.iter().enumerate() {
            amps[sp.row_of[f]] = *a;
        }
        Ok(PureState { space: target, amps })
    }

    /// `⟨self|other⟩`
    pub fn overlap(&self, other: &PureState<T>) -> Result<C<T>, LinalgError> {
        if self.space != other.space {
            return Err(LinalgError::SpaceMismatch);
        }
        Ok(super::matrix::inner(&self.amps, &other.amps))
    }
}

fn cap_check<T: Real>(d: usize) -> Result<(), LinalgError> {
    let cap = policy::<T>().dim_cap;
    if d > cap {
        Err(LinalgError::DimensionCap { dim: d, cap })
    } else {
        Ok(())
    }
}

fn check_isometry<T: Real>(iso: &CMatrix<T>) -> Result<(), LinalgError> {
    let defect = iso.isometry_defect();
    if defect > T::lit(policy::<T>().reconstruction) {
        return Err(LinalgError::NotIsometry { defect: defect.to_f64_lossy() });
    }
    Ok(())
}

/// `tr_discard(m)` on a flat space.
pub fn partial_trace_matrix<T: Real, S: AsRef<str>>(
    space: &RegisterSpace,
    m: &CMatrix<T>,
    discard: &[S],
) -> Result<(RegisterSpace, CMatrix<T>), LinalgError> {
    let sp = space.split(discard)?;
    // group flat indices by discarded-part index
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sp.row_dim];
    for f in 0..space.total_dim() {
        groups[sp.row_of[f]].push((f, sp.col_of[f]));
    }
    let mut out = CMatrix::zeros(sp.col_dim, sp.col_dim);
    for g in &groups {
        for &(f1, k1) in g {
            for &(f2, k2) in g {
                out[(k1, k2)] = out[(k1, k2)] + m[(f1, f2)];
            }
        }
    }
    Ok((sp.col_space, out))
}

pub fn permute_matrix<T: Real, S: AsRef<str>>(
    space: &RegisterSpace,
    m: &CMatrix<T>,
    order: &[S],
) -> Result<(RegisterSpace, CMatrix<T>), LinalgError> {
    let target = space.select(order)?;
    if target.len() != space.len() {
        return Err(LinalgError::UnknownLabel(format!("permutation of {:?}", space.labels())));
    }
    let sp = space.split(order)?;
    let d = space.total_dim();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(sp.row_of[i], sp.row_of[j])] = m[(i, j)];
        }
    }
    Ok((target, out))
}

/// Full-space matrix of `u` acting on the registers `on` (in that order).
pub fn embed_local<T: Real, S: AsRef<str>>(
    space: &RegisterSpace,
    u: &CMatrix<T>,
    on: &[S],
) -> Result<CMatrix<T>, LinalgError> {
    let sp = space.split(on)?;
    if u.rows() != sp.row_dim || u.cols() != sp.row_dim {
        return Err(LinalgError::Shape { expected: (sp.row_dim, sp.row_dim), found: (u.rows(), u.cols()) });
    }
    let d = space.total_dim();
    Ok(CMatrix::from_fn(d, d, |i, j| {
        if sp.col_of[i] == sp.col_of[j] {
            u[(sp.row_of[i], sp.row_of[j])]
        } else {
            czero()
        }
    }))
}
