//! Dense complex linear algebra helpers: matrix exponential, Schur
//! decomposition, Sylvester solves, Kronecker products and small fits.
//!
//! Eigen and SVD go through `ndarray-linalg`; the Schur decomposition and the
//! triangular Sylvester solve call LAPACK (`zgees`/`ztrsyl`) directly since no
//! maintained crate exposes them for complex matrices.

use crate::{C64, Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Factorize, OperationNorm, Solve, SVD};

// LAPACK is linked through the openblas backend of ndarray-linalg.
extern "C" {
    fn zgees_(
        jobvs: *const u8,
        sort: *const u8,
        select: *const std::ffi::c_void,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        sdim: *mut i32,
        w: *mut C64,
        vs: *mut C64,
        ldvs: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        bwork: *mut i32,
        info: *mut i32,
    );
    fn ztrsyl_(
        trana: *const u8,
        tranb: *const u8,
        isgn: *const i32,
        m: *const i32,
        n: *const i32,
        a: *const C64,
        lda: *const i32,
        b: *const C64,
        ldb: *const i32,
        c: *mut C64,
        ldc: *const i32,
        scale: *mut f64,
        info: *mut i32,
    );
}

fn to_col_major(a: &Array2<C64>) -> Vec<C64> {
    let (n, m) = a.dim();
    let mut v = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            v.push(a[[i, j]]);
        }
    }
    v
}

fn from_col_major(v: &[C64], n: usize, m: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, m), |(i, j)| v[j * n + i])
}

/// Complex Schur decomposition A = Q T Q^H.
///
/// Returns (Q, T, eigenvalues).
pub fn schur(a: &Array2<C64>) -> Result<(Array2<C64>, Array2<C64>, Vec<C64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "schur requires a square matrix");
    let ni = n as i32;
    let mut t = to_col_major(a);
    let mut q = vec![C64::new(0.0, 0.0); n * n];
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut rwork = vec![0.0f64; n];
    let mut sdim = 0i32;
    let mut info = 0i32;
    // Workspace query.
    let mut work_query = [C64::new(0.0, 0.0)];
    let lwork_query = -1i32;
    unsafe {
        zgees_(
            b"V".as_ptr(),
            b"N".as_ptr(),
            std::ptr::null(),
            &ni,
            t.as_mut_ptr(),
            &ni,
            &mut sdim,
            w.as_mut_ptr(),
            q.as_mut_ptr(),
            &ni,
            work_query.as_mut_ptr(),
            &lwork_query,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgees (workspace query)",
            info,
        });
    }
    let lwork = work_query[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        zgees_(
            b"V".as_ptr(),
            b"N".as_ptr(),
            std::ptr::null(),
            &ni,
            t.as_mut_ptr(),
            &ni,
            &mut sdim,
            w.as_mut_ptr(),
            q.as_mut_ptr(),
            &ni,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgees",
            info,
        });
    }
    Ok((from_col_major(&q, n, n), from_col_major(&t, n, n), w))
}

/// Solve the continuous Sylvester equation H X - X H^H = C by Bartels-Stewart.
///
/// A single Schur decomposition H = Q T Q^H reduces the problem to triangular
/// form; `ztrsyl` solves T Y - Y T^H = Q^H C Q. Also returns the eigenvalues
/// of H (free by-product of the Schur step).
pub fn sylvester_h_hdag(h: &Array2<C64>, c: &Array2<C64>) -> Result<(Array2<C64>, Vec<C64>)> {
    let (q, t, eigs) = schur(h)?;
    let qh = conj_transpose(&q);
    let rhs = qh.dot(c).dot(&q);

    let n = h.nrows() as i32;
    let t_col = to_col_major(&t);
    let mut c_col = to_col_major(&rhs);
    let isgn = -1i32;
    let mut scale = 1.0f64;
    let mut info = 0i32;
    unsafe {
        ztrsyl_(
            b"N".as_ptr(),
            b"C".as_ptr(),
            &isgn,
            &n,
            &n,
            t_col.as_ptr(),
            &n,
            t_col.as_ptr(),
            &n,
            c_col.as_mut_ptr(),
            &n,
            &mut scale,
            &mut info,
        );
    }
    if info < 0 {
        return Err(Error::Lapack {
            routine: "ztrsyl",
            info,
        });
    }
    if info == 1 || scale == 0.0 {
        // Perturbed solve or zero scale: common eigenvalues, treat as singular.
        return Err(Error::SingularDynamics);
    }
    let y = from_col_major(&c_col, h.nrows(), h.nrows());
    let x = q.dot(&y).dot(&qh).mapv(|z| z / scale);
    Ok((x, eigs))
}

pub fn conj_transpose(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Column-stacked vectorization: vec(A)[i + n*j] = A[i, j].
pub fn vec_col(a: &Array2<C64>) -> Array1<C64> {
    let (n, m) = a.dim();
    Array1::from_shape_fn(n * m, |idx| a[[idx % n, idx / n]])
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: &Array1<C64>, n: usize, m: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, m), |(i, j)| v[j * n + i])
}

const PADE13_THETA: f64 = 5.371920351148152;
const PADE13_B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by scaling-and-squaring with a degree-13 Pade
/// approximant. Robust at defective matrices, unlike the eigendecomposition
/// route.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = a.opnorm_one().unwrap_or_else(|_| one_norm(a));
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(s));
    let b = &PADE13_B;
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let eye = identity(n);

    let u_inner = a6.mapv(|z| z * b[13]) + a4.mapv(|z| z * b[11]) + a2.mapv(|z| z * b[9]);
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|z| z * b[7])
        + a4.mapv(|z| z * b[5])
        + a2.mapv(|z| z * b[3])
        + eye.mapv(|z| z * b[1]);
    let u = scaled.dot(&u_poly);

    let v_inner = a6.mapv(|z| z * b[12]) + a4.mapv(|z| z * b[10]) + a2.mapv(|z| z * b[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * b[6])
        + a4.mapv(|z| z * b[4])
        + a2.mapv(|z| z * b[2])
        + eye.mapv(|z| z * b[0]);

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut result = solve_matrix(&lhs, &rhs)?;
    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}

/// Solve A X = B column by column.
pub fn solve_matrix(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let lu = a
        .factorize()
        .map_err(|_| Error::Lapack {
            routine: "zgetrf",
            info: -1,
        })?;
    let (n, m) = b.dim();
    let mut out = Array2::zeros((n, m));
    for j in 0..m {
        let col = b.column(j).to_owned();
        let x = lu.solve(&col).map_err(|_| Error::Lapack {
            routine: "zgetrs",
            info: -1,
        })?;
        out.column_mut(j).assign(&x);
    }
    Ok(out)
}

pub fn one_norm(a: &Array2<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn fro_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a general complex matrix.
pub fn eig(a: &Array2<C64>) -> Result<(Vec<C64>, Array2<C64>)> {
    let (vals, vecs) = a.eig().map_err(|_| Error::Lapack {
        routine: "zgeev",
        info: -1,
    })?;
    Ok((vals.to_vec(), vecs))
}

/// Eigenvalues only.
pub fn eigvals(a: &Array2<C64>) -> Result<Vec<C64>> {
    eig(a).map(|(vals, _)| vals)
}

/// 2-norm condition number via singular values.
pub fn cond2(a: &Array2<C64>) -> Result<f64> {
    let (_, s, _) = a.svd(false, false).map_err(|_| Error::Lapack {
        routine: "zgesvd",
        info: -1,
    })?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if smin > 0.0 { smax / smin } else { f64::INFINITY })
}

/// Ordinary least squares y = slope x + intercept; returns (slope, intercept, r^2).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData {
            need: 2,
            got: xs.len().min(ys.len()),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            need: 2,
            got: 1,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((slope, intercept, r2))
}
