//! Small fixed-size linear algebra over complex 4x4 matrices: recursion
//! operators as mixed tensors, characteristic polynomials via the
//! Faddeev-LeVerrier recurrence, quartic eigenvalue estimates, and null
//! spaces of antisymmetric matrices via full-pivot Gaussian elimination.

use crate::calculus::{c4_zero, mat_vec, CVec4};
use crate::charts::PhasePoint;
use crate::complex::{Complex, ONE, ZERO};

pub type CMat4 = [[Complex; 4]; 4];

/// A (1,1) tensor evaluated at a point: the 4x4 matrix mapping vectors to
/// vectors in the fixed coordinate ordering.
#[derive(Debug, Clone, Copy)]
pub struct MixedTensor {
    pub m: CMat4,
    pub point: PhasePoint,
}

impl MixedTensor {
    pub fn new(m: CMat4, point: PhasePoint) -> Self {
        MixedTensor { m, point }
    }

    pub fn apply(&self, v: &CVec4) -> CVec4 {
        mat_vec(&self.m, v)
    }

    pub fn trace(&self) -> Complex {
        self.m[0][0] + self.m[1][1] + self.m[2][2] + self.m[3][3]
    }

    /// Max entry modulus.
    pub fn norm(&self) -> f64 {
        self.m
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.abs())
            .fold(0.0, f64::max)
    }

    pub fn char_poly(&self) -> CharPoly {
        char_poly(&self.m)
    }

    pub fn det(&self) -> Complex {
        self.char_poly().e[3]
    }

    /// Max entrywise deviation from another tensor.
    pub fn distance(&self, other: &MixedTensor) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        worst
    }
}

/// Monic degree-4 characteristic polynomial
/// `t^4 - e1 t^3 + e2 t^2 - e3 t + e4`, together with the elementary
/// symmetric functions `e1..e4` of the eigenvalues (`e4 = det`).
#[derive(Debug, Clone, Copy)]
pub struct CharPoly {
    /// Monic coefficients in descending degree: `[1, -e1, e2, -e3, e4]`.
    pub coeffs: [Complex; 5],
    pub e: [Complex; 4],
}

impl CharPoly {
    pub fn eval(&self, t: Complex) -> Complex {
        let mut acc = self.coeffs[0];
        for c in &self.coeffs[1..] {
            acc = acc * t + *c;
        }
        acc
    }

    /// Eigenvalue estimates as the roots of the characteristic polynomial,
    /// by Durand-Kerner iteration. Multiple roots converge linearly, which
    /// is sufficient for the spectrum-pattern diagnostics here (exact
    /// statements are always checked through `e1..e4`).
    pub fn roots(&self) -> [Complex; 4] {
        durand_kerner(&self.coeffs)
    }
}

fn mat_mul(a: &CMat4, b: &CMat4) -> CMat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = ZERO;
            for (k, bk) in b.iter().enumerate() {
                acc += a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_add_diag(a: &CMat4, s: Complex) -> CMat4 {
    let mut out = *a;
    for (i, row) in out.iter_mut().enumerate() {
        row[i] += s;
    }
    out
}

fn trace(a: &CMat4) -> Complex {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

/// Faddeev-LeVerrier recurrence for the 4x4 characteristic polynomial.
pub fn char_poly(a: &CMat4) -> CharPoly {
    let b1 = *a;
    let e1 = trace(&b1);
    let b2 = mat_mul(a, &mat_add_diag(&b1, -e1));
    let e2 = -trace(&b2).scale(0.5);
    let b3 = mat_mul(a, &mat_add_diag(&b2, e2));
    let e3 = trace(&b3).scale(1.0 / 3.0);
    let b4 = mat_mul(a, &mat_add_diag(&b3, -e3));
    let e4 = -trace(&b4).scale(0.25);
    CharPoly {
        coeffs: [ONE, -e1, e2, -e3, e4],
        e: [e1, e2, e3, e4],
    }
}

fn durand_kerner(coeffs: &[Complex; 5]) -> [Complex; 4] {
    let scale: f64 = coeffs[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return [ZERO; 4];
    }
    // Cauchy bound keeps the iterates inside a disk containing all roots.
    let radius = 1.0 + scale;
    let seed = Complex::new(0.4, 0.9);
    let mut z = [ZERO; 4];
    let mut w = Complex::real(radius);
    for zk in z.iter_mut() {
        w = w * seed;
        *zk = w;
    }
    let eval = |t: Complex| {
        let mut acc = coeffs[0];
        for c in &coeffs[1..] {
            acc = acc * t + *c;
        }
        acc
    };
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..4 {
            let mut denom = ONE;
            for j in 0..4 {
                if j != k {
                    denom = denom * (z[k] - z[j]);
                }
            }
            if denom.abs() == 0.0 {
                continue;
            }
            let step = eval(z[k]) / denom;
            z[k] = z[k] - step;
            max_step = max_step.max(step.abs());
        }
        if max_step < 1e-14 * radius {
            break;
        }
    }
    z
}

/// Orthonormal basis of the null space of a 4x4 matrix, by Gaussian
/// elimination with full pivoting. Pivots below `tol * max_entry` count as
/// zero. Works for real and complex inputs alike.
pub fn kernel_basis(a: &CMat4, tol: f64) -> Vec<CVec4> {
    let maxnorm = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|z| z.abs())
        .fold(0.0, f64::max);
    if maxnorm == 0.0 {
        let mut basis = Vec::with_capacity(4);
        for k in 0..4 {
            let mut v = c4_zero();
            v[k] = ONE;
            basis.push(v);
        }
        return basis;
    }

    let mut m = *a;
    let mut col_perm = [0usize, 1, 2, 3];
    let mut rank = 0;
    for step in 0..4 {
        // full pivot over the remaining submatrix
        let (mut pi, mut pj, mut pmax) = (step, step, 0.0f64);
        for (i, row) in m.iter().enumerate().skip(step) {
            for (j, v) in row.iter().enumerate().skip(step) {
                if v.abs() > pmax {
                    pmax = v.abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        if pmax < tol * maxnorm {
            break;
        }
        m.swap(step, pi);
        for row in m.iter_mut() {
            row.swap(step, pj);
        }
        col_perm.swap(step, pj);
        for i in step + 1..4 {
            let f = m[i][step] / m[step][step];
            for j in step..4 {
                let upper = m[step][j];
                m[i][j] = m[i][j] - f * upper;
            }
        }
        rank += 1;
    }

    let mut basis: Vec<CVec4> = Vec::with_capacity(4 - rank);
    for free in rank..4 {
        let mut xp = c4_zero(); // solution in permuted variables
        xp[free] = ONE;
        for i in (0..rank).rev() {
            let mut acc = ZERO;
            for j in i + 1..4 {
                acc += m[i][j] * xp[j];
            }
            xp[i] = -acc / m[i][i];
        }
        let mut x = c4_zero();
        for j in 0..4 {
            x[col_perm[j]] = xp[j];
        }
        basis.push(x);
    }

    // modified Gram-Schmidt with the Hermitian inner product
    let mut ortho: Vec<CVec4> = Vec::with_capacity(basis.len());
    for mut v in basis {
        for u in &ortho {
            let proj = inner(u, &v);
            for k in 0..4 {
                v[k] = v[k] - proj * u[k];
            }
        }
        let n = norm2(&v).sqrt();
        if n > 0.0 {
            for vk in v.iter_mut() {
                *vk = vk.scale(1.0 / n);
            }
            ortho.push(v);
        }
    }
    ortho
}

fn inner(u: &CVec4, v: &CVec4) -> Complex {
    let mut acc = ZERO;
    for k in 0..4 {
        acc += u[k].conj() * v[k];
    }
    acc
}

fn norm2(v: &CVec4) -> f64 {
    v.iter().map(|z| z.abs_sq()).sum()
}

/// Orthogonal projection of `v` onto the null space of `a`. The projector
/// is independent of the basis [`kernel_basis`] happens to return, so it
/// varies smoothly wherever the rank of `a` is locally constant.
pub fn kernel_project(a: &CMat4, v: &CVec4, tol: f64) -> CVec4 {
    let basis = kernel_basis(a, tol);
    let mut out = c4_zero();
    for k in basis {
        let c = inner(&k, v);
        for (o, kk) in out.iter_mut().zip(k.iter()) {
            *o += c * *kk;
        }
    }
    out
}

/// Residual of membership of `v` in the null space of `a`, relative to the
/// matrix max-norm.
pub fn kernel_residual(a: &CMat4, v: &CVec4) -> f64 {
    let maxnorm = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.abs())
        .fold(0.0, f64::max);
    let av = mat_vec(a, v);
    let r = av.iter().map(|z| z.abs()).fold(0.0, f64::max);
    if maxnorm == 0.0 {
        r
    } else {
        r / maxnorm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> PhasePoint {
        PhasePoint::polar(1.0, 0.0, 0.0, 1.0).unwrap()
    }

    fn real_mat(rows: [[f64; 4]; 4]) -> CMat4 {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = Complex::real(rows[i][j]);
            }
        }
        m
    }

    #[test]
    fn char_poly_identity() {
        let id = real_mat([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        let p = char_poly(&id);
        let want = [1.0, -4.0, 6.0, -4.0, 1.0];
        for (c, w) in p.coeffs.iter().zip(want) {
            assert!((*c - Complex::real(w)).abs() < 1e-14);
        }
    }

    #[test]
    fn char_poly_zero_matrix() {
        let p = char_poly(&[[ZERO; 4]; 4]);
        assert_eq!(p.coeffs[0], ONE);
        for c in &p.coeffs[1..] {
            assert_eq!(c.abs(), 0.0);
        }
        assert_eq!(p.roots(), [ZERO; 4]);
    }

    #[test]
    fn char_poly_diagonal_matches_products() {
        let d = real_mat([
            [2.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, 3.0, 0.0],
            [0.0, 0.0, 0.0, 0.5],
        ]);
        let p = char_poly(&d);
        // e1 = 4.5, e2 = sum of pairwise products, e3, e4 = -3
        assert!((p.e[0] - Complex::real(4.5)).abs() < 1e-14);
        let ev = [2.0, -1.0, 3.0, 0.5];
        let mut e2 = 0.0;
        let mut e3 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                e2 += ev[i] * ev[j];
                for k in j + 1..4 {
                    e3 += ev[i] * ev[j] * ev[k];
                }
            }
        }
        assert!((p.e[1] - Complex::real(e2)).abs() < 1e-13);
        assert!((p.e[2] - Complex::real(e3)).abs() < 1e-13);
        assert!((p.e[3] - Complex::real(-3.0)).abs() < 1e-13);
        // roots recover the diagonal
        let mut roots: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want = [2.0, -1.0, 3.0, 0.5];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (r, w) in roots.iter().zip(want) {
            assert!((r - w).abs() < 1e-9, "{roots:?}");
        }
    }

    #[test]
    fn kernel_of_canonical_form_is_empty() {
        let omega0 = real_mat([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ]);
        assert!(kernel_basis(&omega0, 1e-9).is_empty());
    }

    #[test]
    fn kernel_of_zero_matrix_is_full() {
        let basis = kernel_basis(&[[ZERO; 4]; 4], 1e-9);
        assert_eq!(basis.len(), 4);
    }

    #[test]
    fn kernel_of_rank2_antisymmetric() {
        // W = dq1 ^ dp1 only: kernel spanned by dq2-, dp2-directions.
        let w = real_mat([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ]);
        let basis = kernel_basis(&w, 1e-9);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(kernel_residual(&w, v) < 1e-14);
        }
        // orthonormality
        assert!((inner(&basis[0], &basis[1])).abs() < 1e-14);
        assert!((norm2(&basis[0]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_tensor_det_via_e4() {
        let m = real_mat([
            [1.0, 2.0, 0.0, 1.0],
            [0.0, 1.0, -1.0, 3.0],
            [2.0, 0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0, 2.0],
        ]);
        let t = MixedTensor::new(m, pt());
        // brute-force determinant by cofactor expansion on first row
        let det = brute_det(&m);
        assert!((t.det() - det).abs() < 1e-12);
    }

    fn brute_det(m: &CMat4) -> Complex {
        let mut acc = ZERO;
        // permutations of 4 elements with signs
        let perms: [([usize; 4], f64); 24] = permutations4();
        for (p, sign) in perms {
            let mut prod = Complex::real(sign);
            for (i, pi) in p.iter().enumerate() {
                prod = prod * m[i][*pi];
            }
            acc += prod;
        }
        acc
    }

    fn permutations4() -> [([usize; 4], f64); 24] {
        let mut out = [([0usize; 4], 0.0f64); 24];
        let mut idx = 0;
        let items = [0usize, 1, 2, 3];
        for &a in &items {
            for &b in &items {
                if b == a {
                    continue;
                }
                for &c in &items {
                    if c == a || c == b {
                        continue;
                    }
                    let d = 6 - a - b - c;
                    let perm = [a, b, c, d];
                    let mut inv = 0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if perm[i] > perm[j] {
                                inv += 1;
                            }
                        }
                    }
                    out[idx] = (perm, if inv % 2 == 0 { 1.0 } else { -1.0 });
                    idx += 1;
                }
            }
        }
        out
    }
}
