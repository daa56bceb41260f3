//! Eigenvalues of small dense real matrices.
//!
//! Pipeline: diagonal balancing by powers of two, Householder reduction to
//! upper Hessenberg form, then the implicit double-shift QR iteration on the
//! Hessenberg matrix (eigenvalues only). Follows the classic EISPACK
//! `balanc`/`orthes`/`hqr` sequence.

#![allow(clippy::needless_range_loop)]

use std::cmp::Ordering;

use serde::Serialize;

use super::SpectralError;
use crate::matrix::Matrix;

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Imaginary part within `tol · (1 + |λ|)` of zero.
    pub fn is_real(&self, tol: f64) -> bool {
        self.im.abs() <= tol * (1.0 + self.modulus())
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.re.total_cmp(&other.re).then(self.im.total_cmp(&other.im))
    }
}

/// All eigenvalues of a matrix, sorted by real part then imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<Eigenvalue>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[Eigenvalue] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.eigenvalues.iter().map(Eigenvalue::modulus).fold(0.0, f64::max)
    }

    pub fn abscissa(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest real part.
    pub fn min_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.re).fold(f64::INFINITY, f64::min)
    }

    pub fn real_eigenvalues(&self, tol: f64) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().filter(move |e| e.is_real(tol)).map(|e| e.re)
    }
}

pub fn eigenvalues(m: &Matrix) -> Result<Spectrum, SpectralError> {
    check_square_finite(m)?;
    let n = m.rows();
    let mut a = OneBased::from_matrix(m);
    balance(&mut a);
    hessenberg(&mut a);
    let mut eigenvalues = hqr(&mut a)?;
    debug_assert_eq!(eigenvalues.len(), n);
    eigenvalues.sort_by(Eigenvalue::total_cmp);
    Ok(Spectrum { eigenvalues })
}

pub fn spectral_radius(m: &Matrix) -> Result<f64, SpectralError> {
    Ok(eigenvalues(m)?.radius())
}

pub fn spectral_abscissa(m: &Matrix) -> Result<f64, SpectralError> {
    Ok(eigenvalues(m)?.abscissa())
}

pub(crate) fn check_square_finite(m: &Matrix) -> Result<(), SpectralError> {
    if !m.is_square() {
        return Err(SpectralError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() == 0 {
        return Err(SpectralError::Empty);
    }
    if !m.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    Ok(())
}

/// Square work array addressed with 1-based indices, matching the
/// reference formulation of the algorithms below.
struct OneBased {
    n: usize,
    data: Vec<f64>,
}

impl OneBased {
    fn from_matrix(m: &Matrix) -> Self {
        let n = m.rows();
        let mut data = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                data[(i + 1) * (n + 1) + j + 1] = m[(i, j)];
            }
        }
        Self { n, data }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.n + 1) + j]
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * (self.n + 1) + j]
    }
}

fn balance(a: &mut OneBased) {
    const RADIX: f64 = 2.0;
    let n = a.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 1..=n {
                    *a.at(i, j) *= g;
                }
                for j in 1..=n {
                    *a.at(j, i) *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form; entries below the
/// subdiagonal are zeroed.
fn hessenberg(a: &mut OneBased) {
    let n = a.n;
    let mut ort = vec![0.0; n + 1];
    for m in 2..n {
        let scale: f64 = (m..=n).map(|i| a.get(i, m - 1).abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..=n).rev() {
            ort[i] = a.get(i, m - 1) / scale;
            h += ort[i] * ort[i];
        }
        let g = if ort[m] > 0.0 { -h.sqrt() } else { h.sqrt() };
        h -= ort[m] * g;
        ort[m] -= g;
        for j in m..=n {
            let f = (m..=n).rev().map(|i| ort[i] * a.get(i, j)).sum::<f64>() / h;
            for i in m..=n {
                *a.at(i, j) -= f * ort[i];
            }
        }
        for i in 1..=n {
            let f = (m..=n).rev().map(|j| ort[j] * a.get(i, j)).sum::<f64>() / h;
            for j in m..=n {
                *a.at(i, j) -= f * ort[j];
            }
        }
        *a.at(m, m - 1) = scale * g;
        for i in (m + 1)..=n {
            *a.at(i, m - 1) = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift
/// QR iteration. Destroys `a`.
fn hqr(a: &mut OneBased) -> Result<Vec<Eigenvalue>, SpectralError> {
    let n = a.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a.get(i, j).abs();
        }
    }

    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        let mut l;
        loop {
            // look for a single small subdiagonal element
            l = nn;
            while l >= 2 {
                let mut s = a.get(l - 1, l - 1).abs() + a.get(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a.get(l, l - 1).abs() <= f64::EPSILON * s {
                    *a.at(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a.get(nn, nn);
            if l == nn {
                // one root found
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a.get(nn - 1, nn - 1);
            let mut w = a.get(nn, nn - 1) * a.get(nn - 1, nn);
            if l == nn - 1 {
                // two roots found
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }

            if its == MAX_ITERATIONS_PER_EIGENVALUE {
                return Err(SpectralError::NoConvergence {
                    remaining: nn,
                    iterations: its,
                });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    *a.at(i, i) -= x;
                }
                let s = a.get(nn, nn - 1).abs() + a.get(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // form shift and look for two consecutive small subdiagonal elements
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a.get(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a.get(m + 1, m) + a.get(m, m + 1);
                q = a.get(m + 1, m + 1) - z - rr - ss;
                r = a.get(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a.get(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (a.get(m - 1, m - 1).abs() + z.abs() + a.get(m + 1, m + 1).abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                *a.at(i, i - 2) = 0.0;
                if i != m + 2 {
                    *a.at(i, i - 3) = 0.0;
                }
            }

            // double QR step on rows l..nn and columns m..nn
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a.get(k, k - 1);
                    q = a.get(k + 1, k - 1);
                    r = if k != nn - 1 { a.get(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            *a.at(k, k - 1) = -a.get(k, k - 1);
                        }
                    } else {
                        *a.at(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = a.get(k, j) + q * a.get(k + 1, j);
                        if k != nn - 1 {
                            pp += r * a.get(k + 2, j);
                            *a.at(k + 2, j) -= pp * z;
                        }
                        *a.at(k + 1, j) -= pp * y;
                        *a.at(k, j) -= pp * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * a.get(i, k) + y * a.get(i, k + 1);
                        if k != nn - 1 {
                            pp += z * a.get(i, k + 2);
                            *a.at(i, k + 2) -= pp * r;
                        }
                        *a.at(i, k + 1) -= pp * q;
                        *a.at(i, k) -= pp;
                    }
                }
                k += 1;
            }
        }
    }

    Ok((1..=n).map(|i| Eigenvalue { re: wr[i], im: wi[i] }).collect())
}
