//! Dense real eigendecomposition for general (nonsymmetric) matrices:
//! Householder reduction to Hessenberg form followed by the implicit
//! double-shift QR iteration, with eigenvector back-substitution. This is
//! the classic EISPACK hqr2 lineage, transcribed for row-major `Mat`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::dense::Mat;
use crate::float::{abs, sqrt};
use crate::{Error, Result};

/// Eigenvalues and eigenvectors of a real square matrix.
///
/// Eigenvalues are `re[j] + i·im[j]`, sorted by (re, im). For a real
/// eigenvalue, column j of `vectors` is its eigenvector. A complex
/// conjugate pair occupies adjacent slots (j, j+1) with `im[j] > 0 >
/// im[j+1]`; columns j and j+1 hold the real and imaginary parts of the
/// eigenvector for `re[j] + i·im[j]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub vectors: Mat,
}

impl Eigen {
    pub fn n(&self) -> usize {
        self.re.len()
    }

    pub fn is_real(&self, j: usize) -> bool {
        self.im[j] == 0.0
    }

    /// Real eigenvector for a real eigenvalue slot.
    pub fn real_vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j)
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if abs(yr) > abs(yi) {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Full eigendecomposition of a general real matrix.
pub fn eigen(a: &Mat) -> Result<Eigen> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "eigen needs a square matrix");
    assert!(n > 0);

    let mut h = a.clone();
    let mut v = Mat::identity(n);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    orthes(&mut h, &mut v);
    hqr2(&mut h, &mut v, &mut d, &mut e)?;
    normalize_columns(&mut v, &e);
    Ok(sort_blocks(Eigen { re: d, im: e, vectors: v }))
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// orthogonal similarity in `v`.
fn orthes(h: &mut Mat, v: &mut Mat) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let low = 0usize;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in low + 1..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += abs(h.get(i, m - 1));
        }
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h.get(i, m - 1) / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h.get(i, j);
            }
            f /= hh;
            for i in m..=high {
                h.add_to(i, j, -f * ort[i]);
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h.get(i, j);
            }
            f /= hh;
            for j in m..=high {
                h.add_to(i, j, -f * ort[j]);
            }
        }
        ort[m] *= scale;
        h.set(m, m - 1, scale * g);
    }

    for m in (low + 1..high).rev() {
        if h.get(m, m - 1) == 0.0 {
            continue;
        }
        for i in m + 1..=high {
            ort[i] = h.get(i, m - 1);
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * v.get(i, j);
            }
            // Double division guards against underflow.
            g = (g / ort[m]) / h.get(m, m - 1);
            for i in m..=high {
                v.add_to(i, j, g * ort[i]);
            }
        }
    }
}

/// Francis double-shift QR on a Hessenberg matrix with Schur-vector
/// accumulation and eigenvector back-substitution.
#[allow(clippy::too_many_lines)]
fn hqr2(h: &mut Mat, v: &mut Mat, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.rows() as i64;
    let mut n = nn - 1;
    let low: i64 = 0;
    let high: i64 = nn - 1;
    let eps = f64::EPSILON; // 2^-52
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut t, mut w, mut x, mut y): (f64, f64, f64, f64);

    let hg = |h: &Mat, i: i64, j: i64| h.get(i as usize, j as usize);
    macro_rules! hset {
        ($m:expr, $i:expr, $j:expr, $v:expr) => {
            $m.set($i as usize, $j as usize, $v)
        };
    }

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += abs(hg(h, i, j));
        }
    }

    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let iter_budget = 60 * (nn as usize) + 200;

    // Deflate eigenvalues from the bottom-right corner.
    while n >= low {
        let mut l = n;
        while l > low {
            s = abs(hg(h, l - 1, l - 1)) + abs(hg(h, l, l));
            if s == 0.0 {
                s = norm;
            }
            if abs(hg(h, l, l - 1)) < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One real root.
            hset!(h, n, n, hg(h, n, n) + exshift);
            d[n as usize] = hg(h, n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // A 2x2 block: real pair or complex pair.
            w = hg(h, n, n - 1) * hg(h, n - 1, n);
            p = (hg(h, n - 1, n - 1) - hg(h, n, n)) / 2.0;
            q = p * p + w;
            z = sqrt(abs(q));
            hset!(h, n, n, hg(h, n, n) + exshift);
            hset!(h, n - 1, n - 1, hg(h, n - 1, n - 1) + exshift);
            x = hg(h, n, n);

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = hg(h, n, n - 1);
                s = abs(x) + abs(z);
                p = x / s;
                q = z / s;
                r = sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for j in n - 1..nn {
                    z = hg(h, n - 1, j);
                    hset!(h, n - 1, j, q * z + p * hg(h, n, j));
                    hset!(h, n, j, q * hg(h, n, j) - p * z);
                }
                for i in 0..=n {
                    z = hg(h, i, n - 1);
                    hset!(h, i, n - 1, q * z + p * hg(h, i, n));
                    hset!(h, i, n, q * hg(h, i, n) - p * z);
                }
                for i in low..=high {
                    z = v.get(i as usize, (n - 1) as usize);
                    hset!(v, i, n - 1, q * z + p * v.get(i as usize, n as usize));
                    hset!(v, i, n, q * v.get(i as usize, n as usize) - p * z);
                }
            } else {
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // Form an implicit double shift.
            x = hg(h, n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = hg(h, n - 1, n - 1);
                w = hg(h, n, n - 1) * hg(h, n - 1, n);
            }

            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    hset!(h, i, i, hg(h, i, i) - x);
                }
                s = abs(hg(h, n, n - 1)) + abs(hg(h, n - 1, n - 2));
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        hset!(h, i, i, hg(h, i, i) - s);
                    }
                    exshift += s;
                    x = 0.964;
                    y = 0.964;
                    w = 0.964;
                }
            }

            iter += 1;
            total_iter += 1;
            if iter > 50 || total_iter > iter_budget {
                return Err(Error::Numerical(format!(
                    "QR iteration failed to converge (size {nn}, {total_iter} sweeps)"
                )));
            }

            // Two consecutive small sub-diagonals let the bulge start higher.
            let mut m = n - 2;
            while m >= l {
                z = hg(h, m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / hg(h, m + 1, m) + hg(h, m, m + 1);
                q = hg(h, m + 1, m + 1) - z - r - s;
                r = hg(h, m + 2, m + 1);
                s = abs(p) + abs(q) + abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if abs(hg(h, m, m - 1)) * (abs(q) + abs(r))
                    < eps
                        * (abs(p)
                            * (abs(hg(h, m - 1, m - 1)) + abs(z) + abs(hg(h, m + 1, m + 1))))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=n {
                hset!(h, i, i - 2, 0.0);
                if i > m + 2 {
                    hset!(h, i, i - 3, 0.0);
                }
            }

            // Double QR sweep on rows l..=n, columns m..=n.
            for k in m..n {
                let notlast = k != n - 1;
                if k != m {
                    p = hg(h, k, k - 1);
                    q = hg(h, k + 1, k - 1);
                    r = if notlast { hg(h, k + 2, k - 1) } else { 0.0 };
                    x = abs(p) + abs(q) + abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                if x == 0.0 {
                    break;
                }
                s = sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        hset!(h, k, k - 1, -s * x);
                    } else if l != m {
                        hset!(h, k, k - 1, -hg(h, k, k - 1));
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = hg(h, k, j) + q * hg(h, k + 1, j);
                        if notlast {
                            p += r * hg(h, k + 2, j);
                            hset!(h, k + 2, j, hg(h, k + 2, j) - p * z);
                        }
                        hset!(h, k, j, hg(h, k, j) - p * x);
                        hset!(h, k + 1, j, hg(h, k + 1, j) - p * y);
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * hg(h, i, k) + y * hg(h, i, k + 1);
                        if notlast {
                            p += z * hg(h, i, k + 2);
                            hset!(h, i, k + 2, hg(h, i, k + 2) - p * r);
                        }
                        hset!(h, i, k, hg(h, i, k) - p);
                        hset!(h, i, k + 1, hg(h, i, k + 1) - p * q);
                    }
                    for i in low..=high {
                        p = x * v.get(i as usize, k as usize)
                            + y * v.get(i as usize, (k + 1) as usize);
                        if notlast {
                            p += z * v.get(i as usize, (k + 2) as usize);
                            hset!(v, i, k + 2, v.get(i as usize, (k + 2) as usize) - p * r);
                        }
                        hset!(v, i, k, v.get(i as usize, k as usize) - p);
                        hset!(v, i, k + 1, v.get(i as usize, (k + 1) as usize) - p * q);
                    }
                }
            }
        }
    }

    // Back-substitution: eigenvectors of the quasi-triangular form.
    if norm == 0.0 {
        return Ok(());
    }

    for nb in (0..nn).rev() {
        p = d[nb as usize];
        q = e[nb as usize];

        if q == 0.0 {
            // Real eigenvector.
            let mut l = nb;
            hset!(h, nb, nb, 1.0);
            for i in (0..nb).rev() {
                w = hg(h, i, i) - p;
                r = 0.0;
                for j in l..=nb {
                    r += hg(h, i, j) * hg(h, j, nb);
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        if w != 0.0 {
                            hset!(h, i, nb, -r / w);
                        } else {
                            hset!(h, i, nb, -r / (eps * norm));
                        }
                    } else {
                        x = hg(h, i, i + 1);
                        y = hg(h, i + 1, i);
                        q = (d[i as usize] - p) * (d[i as usize] - p)
                            + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        hset!(h, i, nb, t);
                        if abs(x) > abs(z) {
                            hset!(h, i + 1, nb, (-r - w * t) / x);
                        } else {
                            hset!(h, i + 1, nb, (-s - y * t) / z);
                        }
                    }
                    t = abs(hg(h, i, nb));
                    if (eps * t) * t > 1.0 {
                        for j in i..=nb {
                            hset!(h, j, nb, hg(h, j, nb) / t);
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // Complex eigenvector, written into columns nb-1 (real part)
            // and nb (imaginary part).
            let mut l = nb - 1;

            if abs(hg(h, nb, nb - 1)) > abs(hg(h, nb - 1, nb)) {
                hset!(h, nb - 1, nb - 1, q / hg(h, nb, nb - 1));
                hset!(h, nb - 1, nb, -(hg(h, nb, nb) - p) / hg(h, nb, nb - 1));
            } else {
                let (cr, ci) = cdiv(0.0, -hg(h, nb - 1, nb), hg(h, nb - 1, nb - 1) - p, q);
                hset!(h, nb - 1, nb - 1, cr);
                hset!(h, nb - 1, nb, ci);
            }
            hset!(h, nb, nb - 1, 0.0);
            hset!(h, nb, nb, 1.0);
            for i in (0..nb - 1).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=nb {
                    ra += hg(h, i, j) * hg(h, j, nb - 1);
                    sa += hg(h, i, j) * hg(h, j, nb);
                }
                w = hg(h, i, i) - p;

                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        hset!(h, i, nb - 1, cr);
                        hset!(h, i, nb, ci);
                    } else {
                        x = hg(h, i, i + 1);
                        y = hg(h, i + 1, i);
                        let mut vr = (d[i as usize] - p) * (d[i as usize] - p)
                            + e[i as usize] * e[i as usize]
                            - q * q;
                        let vi = (d[i as usize] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (abs(w) + abs(q) + abs(x) + abs(y) + abs(z));
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        hset!(h, i, nb - 1, cr);
                        hset!(h, i, nb, ci);
                        if abs(x) > abs(z) + abs(q) {
                            hset!(
                                h,
                                i + 1,
                                nb - 1,
                                (-ra - w * hg(h, i, nb - 1) + q * hg(h, i, nb)) / x
                            );
                            hset!(
                                h,
                                i + 1,
                                nb,
                                (-sa - w * hg(h, i, nb) - q * hg(h, i, nb - 1)) / x
                            );
                        } else {
                            let (cr, ci) =
                                cdiv(-r - y * hg(h, i, nb - 1), -s - y * hg(h, i, nb), z, q);
                            hset!(h, i + 1, nb - 1, cr);
                            hset!(h, i + 1, nb, ci);
                        }
                    }
                    t = abs(hg(h, i, nb - 1)).max(abs(hg(h, i, nb)));
                    if (eps * t) * t > 1.0 {
                        for j in i..=nb {
                            hset!(h, j, nb - 1, hg(h, j, nb - 1) / t);
                            hset!(h, j, nb, hg(h, j, nb) / t);
                        }
                    }
                }
            }
        }
    }

    // Transform back to the original basis.
    for j in (low..nn).rev() {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += v.get(i as usize, k as usize) * hg(h, k, j);
            }
            hset!(v, i, j, z);
        }
    }

    Ok(())
}

/// Normalize eigenvector columns: unit 2-norm for real eigenvalues, joint
/// norm for the (re, im) columns of a complex pair.
fn normalize_columns(v: &mut Mat, e: &[f64]) {
    let n = v.rows();
    let mut j = 0;
    while j < n {
        if e[j] == 0.0 {
            let mut s = 0.0;
            for i in 0..n {
                s += v.get(i, j) * v.get(i, j);
            }
            let s = sqrt(s);
            if s > 0.0 {
                for i in 0..n {
                    let val = v.get(i, j) / s;
                    v.set(i, j, val);
                }
            }
            j += 1;
        } else {
            let mut s = 0.0;
            for i in 0..n {
                s += v.get(i, j) * v.get(i, j) + v.get(i, j + 1) * v.get(i, j + 1);
            }
            let s = sqrt(s);
            if s > 0.0 {
                for i in 0..n {
                    let a = v.get(i, j) / s;
                    let b = v.get(i, j + 1) / s;
                    v.set(i, j, a);
                    v.set(i, j + 1, b);
                }
            }
            j += 2;
        }
    }
}

/// Stable sort of eigen-blocks by (re, im), keeping complex pairs adjacent.
fn sort_blocks(eig: Eigen) -> Eigen {
    let n = eig.n();
    let mut blocks: Vec<(f64, f64, Vec<usize>)> = Vec::new();
    let mut j = 0;
    while j < n {
        if eig.im[j] == 0.0 {
            blocks.push((eig.re[j], 0.0, vec![j]));
            j += 1;
        } else {
            blocks.push((eig.re[j], -abs(eig.im[j]), vec![j, j + 1]));
            j += 2;
        }
    }
    blocks.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal))
    });

    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    let mut vectors = Mat::zeros(n, n);
    let mut col = 0;
    for (_, _, idx) in blocks {
        for &src in &idx {
            re.push(eig.re[src]);
            im.push(eig.im[src]);
            for i in 0..n {
                vectors.set(i, col, eig.vectors.get(i, src));
            }
            col += 1;
        }
    }
    Eigen { re, im, vectors }
}
