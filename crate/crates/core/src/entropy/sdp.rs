//! Interior-point solver for `min tr σ  s.t.  1_{A_k} ⊗ σ ⪰ ρ_k` for every k.
//!
//! The variable σ is expanded in an orthonormal Hermitian basis and the log-barrier
//! `t·tr σ − Σ_k log det(1 ⊗ σ − ρ_k)` is minimized by damped Newton steps for an
//! increasing sequence of `t`. Every iterate is strictly feasible, so `tr σ` is an upper
//! bound on the optimum; the scaled barrier duals `Z_k = S_k⁻¹ / t` give a lower bound.

use crate::linalg::{cholesky, eig_hermitian_part, inverse_from_cholesky, solve_spd, CMatrix};
use crate::policy::policy;
use crate::scalar::{c, cr, czero, Real, C};

/// One constraint `1_{A} ⊗ σ ⪰ rho` with `rho` indexed as `(a, b)` row-major.
pub(crate) struct Constraint<T: Real> {
    pub rho: CMatrix<T>,
    pub da: usize,
}

pub(crate) struct Solution<T: Real> {
    pub sigma: CMatrix<T>,
    /// `tr σ` of the returned (strictly feasible) iterate.
    pub upper: T,
    /// Certified lower bound on the optimum.
    pub lower: T,
    pub iterations: usize,
}

struct Basis<T: Real> {
    elems: Vec<Vec<(usize, usize, C<T>)>>,
    trace: Vec<T>,
}

fn hermitian_basis<T: Real>(d: usize) -> Basis<T> {
    let r = T::one() / T::lit(2.0).sqrt();
    let mut elems = Vec::with_capacity(d * d);
    let mut trace = Vec::with_capacity(d * d);
    for i in 0..d {
        elems.push(vec![(i, i, cr(T::one()))]);
        trace.push(T::one());
    }
    for i in 0..d {
        for j in (i + 1)..d {
            elems.push(vec![(i, j, cr(r)), (j, i, cr(r))]);
            trace.push(T::zero());
            elems.push(vec![(i, j, c(T::zero(), r)), (j, i, c(T::zero(), -r))]);
            trace.push(T::zero());
        }
    }
    Basis { elems, trace }
}

fn kron_identity<T: Real>(da: usize, sigma: &CMatrix<T>) -> CMatrix<T> {
    CMatrix::identity(da).kron(sigma)
}

/// `tr_A(M)` for `M` on `A ⊗ B`.
fn trace_out_a<T: Real>(m: &CMatrix<T>, da: usize, db: usize) -> CMatrix<T> {
    CMatrix::from_fn(db, db, |i, j| (0..da).fold(czero(), |acc, a| acc + m[(a * db + i, a * db + j)]))
}

struct Factored<T: Real> {
    inv: Vec<CMatrix<T>>,
    logdet: T,
}

fn factor<T: Real>(cons: &[Constraint<T>], sigma: &CMatrix<T>) -> Option<Factored<T>> {
    let mut inv = Vec::with_capacity(cons.len());
    let mut logdet = T::zero();
    for k in cons {
        let s = &kron_identity(k.da, sigma) - &k.rho;
        let l = cholesky(&s)?;
        for i in 0..l.rows() {
            logdet = logdet + T::lit(2.0) * l[(i, i)].re.ln();
        }
        inv.push(inverse_from_cholesky(&l));
    }
    Some(Factored { inv, logdet })
}

fn barrier<T: Real>(t: T, sigma: &CMatrix<T>, f: &Factored<T>) -> T {
    t * sigma.trace().re - f.logdet
}

fn gradient_and_hessian<T: Real>(
    cons: &[Constraint<T>],
    db: usize,
    basis: &Basis<T>,
    t: T,
    f: &Factored<T>,
) -> (Vec<T>, Vec<T>) {
    let p = basis.elems.len();
    let mut g: Vec<T> = basis.trace.iter().map(|&tr| t * tr).collect();
    let mut h = vec![T::zero(); p * p];
    let n4 = db * db;
    for (k, tinv) in cons.iter().zip(&f.inv) {
        let da = k.da;
        let gk = trace_out_a(tinv, da, db);
        for (q, e) in basis.elems.iter().enumerate() {
            let v = e.iter().fold(czero(), |acc, &(r, cc, coef)| acc + coef * gk[(cc, r)]);
            g[q] = g[q] - v.re;
        }
        // M[(i,j),(k,l)] = Σ_{a,b} T[(a,l),(b,i)] T[(b,j),(a,k)]
        let mut m = vec![czero(); n4 * n4];
        for a in 0..da {
            for b in 0..da {
                for i in 0..db {
                    for l in 0..db {
                        let x = tinv[(a * db + l, b * db + i)];
                        if x.re == T::zero() && x.im == T::zero() {
                            continue;
                        }
                        for j in 0..db {
                            let row = (i * db + j) * n4;
                            for kk in 0..db {
                                let y = tinv[(b * db + j, a * db + kk)];
                                let idx = row + kk * db + l;
                                m[idx] = m[idx] + x * y;
                            }
                        }
                    }
                }
            }
        }
        for (pi, ep) in basis.elems.iter().enumerate() {
            for (qi, eq) in basis.elems.iter().enumerate().skip(pi) {
                let mut acc = czero();
                for &(i, j, a) in ep {
                    for &(kk, l, bcoef) in eq {
                        acc = acc + a * bcoef * m[(i * db + j) * n4 + kk * db + l];
                    }
                }
                h[pi * p + qi] = h[pi * p + qi] + acc.re;
                if qi != pi {
                    h[qi * p + pi] = h[qi * p + pi] + acc.re;
                }
            }
        }
    }
    (g, h)
}

fn dual_lower_bound<T: Real>(cons: &[Constraint<T>], db: usize, f: &Factored<T>) -> T {
    // Z_k ∝ S_k⁻¹, whitened so that Σ_k tr_A Z_k = 1 holds exactly:
    // Z_k' = (1 ⊗ W^{-1/2}) Z_k (1 ⊗ W^{-1/2}) with W = Σ_k tr_A Z_k.
    let mut w = CMatrix::zeros(db, db);
    for (k, tinv) in cons.iter().zip(&f.inv) {
        w = &w + &trace_out_a(tinv, k.da, db);
    }
    let eig = eig_hermitian_part(&w);
    if !(eig.min() > T::zero()) {
        return T::zero();
    }
    let w_isqrt = eig.map_spectrum(|l| T::one() / l.sqrt());
    let mut obj = T::zero();
    for (k, tinv) in cons.iter().zip(&f.inv) {
        let e = kron_identity(k.da, &w_isqrt);
        let z = e.matmul(tinv).matmul(&e);
        obj = obj + k.rho.matmul(&z).trace().re;
    }
    obj.max(T::zero())
}

pub(crate) fn solve<T: Real>(cons: &[Constraint<T>], db: usize) -> Solution<T> {
    let pol = policy::<T>();
    let basis = hermitian_basis::<T>(db);
    let p = basis.elems.len();
    let m_param: usize = cons.iter().map(|k| k.da * db).sum();
    let m_param = T::from_usize_lossy(m_param);

    let top = cons.iter().map(|k| eig_hermitian_part(&k.rho).max()).fold(T::zero(), T::max);
    let mut sigma = CMatrix::identity(db).scale_real(top + T::one());
    let mut fac = factor(cons, &sigma).expect("scaled identity is strictly feasible");
    let mut t = m_param / sigma.trace().re;
    let mu = T::lit(8.0);
    let alpha = T::lit(0.25);
    let beta = T::lit(0.5);
    let gap_target = T::lit(pol.sdp_gap);
    let newton_tol = T::lit(1e-9);
    let mut iterations = 0;
    let mut best_sigma = sigma.clone();
    let mut best_lower = dual_lower_bound(cons, db, &fac);

    'outer: loop {
        // centering
        loop {
            if iterations >= pol.sdp_max_newton {
                break 'outer;
            }
            iterations += 1;
            let (g, mut h) = gradient_and_hessian(cons, db, &basis, t, &fac);
            let neg: Vec<T> = g.iter().map(|&x| -x).collect();
            let mut step = solve_spd(&h, p, &neg);
            let mut reg = T::lit(1e-14);
            while step.is_none() && reg < T::one() {
                let scale = (0..p).map(|i| h[i * p + i].abs()).fold(T::zero(), T::max).max(T::one());
                for i in 0..p {
                    h[i * p + i] = h[i * p + i] + reg * scale;
                }
                step = solve_spd(&h, p, &neg);
                reg = reg * T::lit(100.0);
            }
            let Some(dy) = step else { break 'outer };
            let decrement: T = dy.iter().zip(&g).map(|(a, b)| -*a * *b).sum();
            if decrement * T::lit(0.5) <= newton_tol {
                break;
            }
            let mut dsig = CMatrix::zeros(db, db);
            for (q, e) in basis.elems.iter().enumerate() {
                for &(r, cc, coef) in e {
                    dsig[(r, cc)] = dsig[(r, cc)] + coef * dy[q];
                }
            }
            let f0 = barrier(t, &sigma, &fac);
            let mut s = T::one();
            let mut accepted = None;
            while s > T::lit(1e-14) {
                let trial = &sigma + &dsig.scale_real(s);
                if let Some(ft) = factor(cons, &trial) {
                    if barrier(t, &trial, &ft) <= f0 - alpha * s * decrement {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
                s = s * beta;
            }
            match accepted {
                Some((ns, nf)) => {
                    let f1 = barrier(t, &ns, &nf);
                    sigma = ns;
                    fac = nf;
                    // progress below the rounding level of the barrier value: as centered as it gets
                    if f0 - f1 <= T::epsilon() * T::lit(16.0) * f0.abs().max(T::one()) {
                        break;
                    }
                }
                None => break 'outer,
            }
        }
        let lower = dual_lower_bound(cons, db, &fac);
        if lower > best_lower {
            best_lower = lower;
        }
        if sigma.trace().re < best_sigma.trace().re {
            best_sigma = sigma.clone();
        }
        let upper = best_sigma.trace().re;
        if upper - best_lower <= gap_target * upper || m_param / t <= gap_target * T::lit(1e-3) * upper {
            break;
        }
        t = t * mu;
    }

    let upper = best_sigma.trace().re;
    Solution { sigma: best_sigma.hermitian_part(), upper, lower: best_lower.min(upper), iterations }
}
