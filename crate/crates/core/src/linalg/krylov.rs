use super::precond::Preconditioner;
use super::SparseOperator;
use crate::error::{Error, Result};
use crate::scalar::{dot, lit, norm2, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Relative tolerance on `||r|| / ||b||`.
    pub tol: T,
    pub max_iter: usize,
    /// Residuals below this are converged regardless of `||b||`.
    pub abs_floor: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self { tol: lit(1e-8), max_iter: 2000, abs_floor: lit(1e-14) }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }

    fn target(&self, bnorm: T) -> T {
        (self.tol * bnorm).max(self.abs_floor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport<T> {
    pub iterations: usize,
    pub initial_residual: T,
    pub final_residual: T,
    pub converged: bool,
    /// Residual 2-norm after each iteration, starting with the initial one.
    pub history: Vec<T>,
}

fn check_dims<T: Real>(op: &SparseOperator<T>, b: &[T], x: &[T]) -> Result<()> {
    if b.len() != op.n() || x.len() != op.n() {
        return Err(Error::Contract(format!(
            "system of size {} given rhs of length {} and guess of length {}",
            op.n(),
            b.len(),
            x.len()
        )));
    }
    Ok(())
}

fn not_converged<T: Real>(name: &'static str, rep: &SolverReport<T>) -> Error {
    Error::solver(
        name,
        format!(
            "no convergence after {} iterations (residual {:e} from {:e})",
            rep.iterations,
            rep.final_residual.as_f64(),
            rep.initial_residual.as_f64()
        ),
    )
}

/// Preconditioned conjugate gradients. `op` must be symmetric positive
/// definite; `x` holds the initial guess on entry and the solution on exit.
pub fn cg_solve<T: Real, P: Preconditioner<T>>(
    op: &SparseOperator<T>,
    b: &[T],
    x: &mut [T],
    m: &P,
    cfg: &SolverConfig<T>,
) -> Result<SolverReport<T>> {
    check_dims(op, b, x)?;
    let n = op.n();
    let target = cfg.target(norm2(b));
    let mut r = op.residual(x, b);
    let r0 = norm2(&r);
    let mut rep = SolverReport {
        iterations: 0,
        initial_residual: r0,
        final_residual: r0,
        converged: r0 <= target,
        history: vec![r0],
    };
    if rep.converged {
        return Ok(rep);
    }
    let mut z = vec![T::zero(); n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut q = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    while rep.iterations < cfg.max_iter {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > T::zero()) {
            return Err(Error::solver("cg", format!("non-positive curvature {pq} at iteration {}", rep.iterations)));
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * q[i];
        }
        rep.iterations += 1;
        let rn = norm2(&r);
        rep.final_residual = rn;
        rep.history.push(rn);
        if !rn.is_finite() {
            return Err(Error::solver("cg", "residual is not finite"));
        }
        if rn <= target {
            rep.converged = true;
            return Ok(rep);
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(not_converged("cg", &rep))
}

/// Right-preconditioned BiCGStab for general nonsingular operators. On a
/// breakdown the iteration restarts once from the current iterate.
pub fn bicgstab_solve<T: Real, P: Preconditioner<T>>(
    op: &SparseOperator<T>,
    b: &[T],
    x: &mut [T],
    m: &P,
    cfg: &SolverConfig<T>,
) -> Result<SolverReport<T>> {
    check_dims(op, b, x)?;
    let n = op.n();
    let target = cfg.target(norm2(b));
    let mut r = op.residual(x, b);
    let r0 = norm2(&r);
    let mut rep = SolverReport {
        iterations: 0,
        initial_residual: r0,
        final_residual: r0,
        converged: r0 <= target,
        history: vec![r0],
    };
    if rep.converged {
        return Ok(rep);
    }
    let tiny = T::min_positive_value().sqrt();
    let mut restarted = false;
    let (mut p, mut v, mut s, mut t) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    let (mut ph, mut sh) = (vec![T::zero(); n], vec![T::zero(); n]);
    'outer: loop {
        let rhat = r.clone();
        let (mut rho, mut alpha, mut omega) = (T::one(), T::one(), T::one());
        p.iter_mut().for_each(|e| *e = T::zero());
        v.iter_mut().for_each(|e| *e = T::zero());
        while rep.iterations < cfg.max_iter {
            let rho_new = dot(&rhat, &r);
            let breakdown = rho_new.abs() <= tiny * norm2(&rhat) * norm2(&r) || omega == T::zero();
            if breakdown {
                if restarted {
                    return Err(Error::solver("bicgstab", format!("breakdown at iteration {}", rep.iterations)));
                }
                restarted = true;
                continue 'outer;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            m.apply(&p, &mut ph);
            op.apply(&ph, &mut v);
            let rv = dot(&rhat, &v);
            if rv == T::zero() {
                if restarted {
                    return Err(Error::solver("bicgstab", "breakdown: (r0, v) = 0"));
                }
                restarted = true;
                continue 'outer;
            }
            alpha = rho / rv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            rep.iterations += 1;
            let sn = norm2(&s);
            if sn <= target {
                for i in 0..n {
                    x[i] = x[i] + alpha * ph[i];
                }
                r.copy_from_slice(&s);
                rep.final_residual = sn;
                rep.history.push(sn);
                rep.converged = true;
                return Ok(rep);
            }
            m.apply(&s, &mut sh);
            op.apply(&sh, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > T::zero() { dot(&t, &s) / tt } else { T::zero() };
            for i in 0..n {
                x[i] = x[i] + alpha * ph[i] + omega * sh[i];
                r[i] = s[i] - omega * t[i];
            }
            let rn = norm2(&r);
            rep.final_residual = rn;
            rep.history.push(rn);
            if !rn.is_finite() {
                return Err(Error::solver("bicgstab", "residual is not finite"));
            }
            if rn <= target {
                rep.converged = true;
                return Ok(rep);
            }
        }
        break;
    }
    Err(not_converged("bicgstab", &rep))
}
