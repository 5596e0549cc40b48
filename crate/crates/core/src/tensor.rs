//! Dense tensors of order one to four over ℝ³.
//!
//! Product conventions:
//!
//! * `A : B = Σ_ij A_ij B_ij` (Frobenius pairing),
//! * `Γ : A = [Σ_jk Γ_ijk A_jk]_i` for a third-order `Γ`,
//! * `G : A = [Σ_kl G_ijkl A_kl]_ij` for a fourth-order `G`,
//! * `G ⋮ Γ = [Σ_jkl G_ijkl Γ_jkl]_i`.
//!
//! Gradients follow the row convention `(∇f)_ij = ∂f_i/∂x_j`.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat3(pub [[f64; 3]; 3]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor3(pub [[[f64; 3]; 3]; 3]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor4(pub [[[[f64; 3]; 3]; 3]; 3]);

#[inline]
fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    /// Unit vector along axis `i`.
    pub fn unit(i: usize) -> Self {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        Vec3(v)
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = other.0;
        Vec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3(self.0.map(|x| x * s))
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 {
            Some(self.scale(1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f(i, j);
            }
        }
        Mat3(m)
    }

    /// Matrix with a single unit entry at `(i, j)`.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Mat3::ZERO;
        m.0[i][j] = 1.0;
        m
    }

    pub fn diag(d: [f64; 3]) -> Self {
        Mat3::from_fn(|i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Frobenius pairing `A : B`.
    pub fn frob(&self, other: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.frob(self)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn sym(&self) -> Mat3 {
        Mat3::from_fn(|i, j| 0.5 * (self.0[i][j] + self.0[j][i]))
    }

    pub fn skw(&self) -> Mat3 {
        Mat3::from_fn(|i, j| 0.5 * (self.0[i][j] - self.0[j][i]))
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2];
        }
        Vec3(out)
    }

    /// `Aᵀ v` without forming the transpose.
    pub fn tr_mul_vec(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.0[0][j] * v.0[0] + self.0[1][j] * v.0[1] + self.0[2][j] * v.0[2];
        }
        Vec3(out)
    }

    pub fn matmul(&self, other: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, k| (0..3).map(|j| self.0[i][j] * other.0[j][k]).sum())
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        Mat3(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    /// Row-major flattening.
    pub fn to_array(&self) -> [f64; 9] {
        let mut a = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                a[3 * i + j] = self.0[i][j];
            }
        }
        a
    }

    pub fn from_array(a: &[f64; 9]) -> Mat3 {
        Mat3::from_fn(|i, j| a[3 * i + j])
    }
}

/// Symmetric and skew-symmetric parts `(A_sym, A_skw)`.
pub fn sym_skw(a: &Mat3) -> (Mat3, Mat3) {
    (a.sym(), a.skw())
}

/// Outer product `(a ⊗ b)_ij = a_i b_j`.
pub fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
    Mat3::from_fn(|i, j| a.0[i] * b.0[j])
}

/// `(G : A)_ij = Σ_kl G_ijkl A_kl`.
pub fn contract42(g: &Tensor4, a: &Mat3) -> Mat3 {
    Mat3::from_fn(|i, j| {
        let mut s = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                s += g.0[i][j][k][l] * a.0[k][l];
            }
        }
        s
    })
}

/// `(G ⋮ T)_i = Σ_jkl G_ijkl T_jkl`.
pub fn contract43(g: &Tensor4, t: &Tensor3) -> Vec3 {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    s += g.0[i][j][k][l] * t.0[j][k][l];
                }
            }
        }
        *o = s;
    }
    Vec3(out)
}

/// `(T : A)_i = Σ_jk T_ijk A_jk`.
pub fn contract32(t: &Tensor3, a: &Mat3) -> Vec3 {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = t.0[i][0][0] * a.0[0][0]
            + t.0[i][0][1] * a.0[0][1]
            + t.0[i][0][2] * a.0[0][2]
            + t.0[i][1][0] * a.0[1][0]
            + t.0[i][1][1] * a.0[1][1]
            + t.0[i][1][2] * a.0[1][2]
            + t.0[i][2][0] * a.0[2][0]
            + t.0[i][2][1] * a.0[2][1]
            + t.0[i][2][2] * a.0[2][2];
    }
    Vec3(out)
}

impl Tensor3 {
    pub const ZERO: Tensor3 = Tensor3([[[0.0; 3]; 3]; 3]);

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t.0[i][j][k] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Tensor3 {
        Tensor3::from_fn(|i, j, k| self.0[i][j][k] * s)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().flatten().flatten().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .flatten()
            .fold(0.0, |m, x| f64::max(m, x.abs()))
    }
}

impl Tensor4 {
    pub const ZERO: Tensor4 = Tensor4([[[[0.0; 3]; 3]; 3]; 3]);

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor4::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        t.0[i][j][k][l] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    /// `Λ⁰_ijkl = δ_ik δ_jl`, the identity on matrices.
    pub fn identity() -> Self {
        Tensor4::from_fn(|i, j, k, l| delta(i, k) * delta(j, l))
    }

    /// `Λ¹_ijkl = δ_ij δ_kl`, so that `S : Λ¹ : S = (tr S)²`.
    pub fn trace_trace() -> Self {
        Tensor4::from_fn(|i, j, k, l| delta(i, j) * delta(k, l))
    }

    /// `Λ²_ijkl = δ_il δ_jk`, so that `Λ² : A = Aᵀ`.
    pub fn transposition() -> Self {
        Tensor4::from_fn(|i, j, k, l| delta(i, l) * delta(j, k))
    }

    /// `Λ³ = Λ⁰ − Λ²`, so that `∇d : Λ³ : ∇d = |curl d|²`.
    pub fn curl_curl() -> Self {
        Tensor4::identity() - Tensor4::transposition()
    }

    pub fn scale(&self, s: f64) -> Tensor4 {
        Tensor4::from_fn(|i, j, k, l| self.0[i][j][k][l] * s)
    }

    /// Frobenius norm over all 81 entries.
    pub fn norm(&self) -> f64 {
        libm::sqrt(
            self.0
                .iter()
                .flatten()
                .flatten()
                .flatten()
                .map(|x| x * x)
                .sum(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    /// Exhaustive check of `G_ijkl == G_klij` over all entries.
    pub fn is_pair_symmetric(&self) -> bool {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        if self.0[i][j][k][l] != self.0[k][l][i][j] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Largest violation `|G_ijkl − G_klij|`.
    pub fn pair_asymmetry(&self) -> f64 {
        let mut worst = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        worst = f64::max(worst, (self.0[i][j][k][l] - self.0[k][l][i][j]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Quadratic form `A : G : A`.
    pub fn quadratic(&self, a: &Mat3) -> f64 {
        a.frob(&contract42(self, a))
    }

    /// Rank-one form `(a ⊗ b) : G : (a ⊗ b)` appearing in the Legendre–Hadamard condition.
    pub fn rank_one_form(&self, a: &Vec3, b: &Vec3) -> f64 {
        self.quadratic(&outer(a, b))
    }

    /// Symbol of `z ↦ −div(G : ∇z)` at wavevector `k`: `M_im = Σ_jl G_ijml k_j k_l`.
    pub fn symbol(&self, k: &Vec3) -> Mat3 {
        Mat3::from_fn(|i, m| {
            let mut s = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    s += self.0[i][j][m][l] * k.0[j] * k.0[l];
                }
            }
            s
        })
    }

    /// The 9×9 matrix of the map `A ↦ G : A` on row-major flattened matrices.
    pub fn as_matrix(&self) -> [[f64; 9]; 9] {
        let mut m = [[0.0; 9]; 9];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m[3 * i + j][3 * k + l] = self.0[i][j][k][l];
                    }
                }
            }
        }
        m
    }
}

macro_rules! impl_linear_ops {
    ($ty:ident, $($idx:tt)*) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(mut self, rhs: $ty) -> $ty {
                self += rhs;
                self
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(mut self, rhs: $ty) -> $ty {
                self -= rhs;
                self
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                self.scale(-1.0)
            }
        }
        impl Mul<f64> for $ty {
            type Output = $ty;
            fn mul(self, s: f64) -> $ty {
                self.scale(s)
            }
        }
        impl Mul<$ty> for f64 {
            type Output = $ty;
            fn mul(self, t: $ty) -> $ty {
                t.scale(self)
            }
        }
    };
}

impl_linear_ops!(Vec3,);
impl_linear_ops!(Mat3,);
impl_linear_ops!(Tensor3,);
impl_linear_ops!(Tensor4,);

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, rhs: Vec3) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, rhs: Mat3) {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
    }
}

impl SubAssign for Mat3 {
    fn sub_assign(&mut self, rhs: Mat3) {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
    }
}

impl AddAssign for Tensor3 {
    fn add_assign(&mut self, rhs: Tensor3) {
        for (a, b) in self
            .0
            .iter_mut()
            .flatten()
            .flatten()
            .zip(rhs.0.iter().flatten().flatten())
        {
            *a += b;
        }
    }
}

impl SubAssign for Tensor3 {
    fn sub_assign(&mut self, rhs: Tensor3) {
        for (a, b) in self
            .0
            .iter_mut()
            .flatten()
            .flatten()
            .zip(rhs.0.iter().flatten().flatten())
        {
            *a -= b;
        }
    }
}

impl AddAssign for Tensor4 {
    fn add_assign(&mut self, rhs: Tensor4) {
        for (a, b) in self
            .0
            .iter_mut()
            .flatten()
            .flatten()
            .flatten()
            .zip(rhs.0.iter().flatten().flatten().flatten())
        {
            *a += b;
        }
    }
}

impl SubAssign for Tensor4 {
    fn sub_assign(&mut self, rhs: Tensor4) {
        for (a, b) in self
            .0
            .iter_mut()
            .flatten()
            .flatten()
            .flatten()
            .zip(rhs.0.iter().flatten().flatten().flatten())
        {
            *a -= b;
        }
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn rand_vec(seed: &mut u64) -> Vec3 {
        Vec3([lcg(seed), lcg(seed), lcg(seed)])
    }

    fn rand_mat(seed: &mut u64) -> Mat3 {
        Mat3::from_fn(|_, _| lcg(seed))
    }

    fn close(a: f64, b: f64, scale: f64) -> bool {
        (a - b).abs() <= 1e-14 * scale.max(1.0)
    }

    #[test]
    fn sym_skw_basic_cases() {
        let a = Mat3::unit(0, 1);
        let (s, w) = sym_skw(&a);
        assert_eq!(s, Mat3([[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0; 3]]));
        assert_eq!(w, Mat3([[0.0, 0.5, 0.0], [-0.5, 0.0, 0.0], [0.0; 3]]));
        let (s, w) = sym_skw(&Mat3::IDENTITY);
        assert_eq!(s, Mat3::IDENTITY);
        assert_eq!(w, Mat3::ZERO);
    }

    #[test]
    fn sym_skw_reassembles() {
        let mut seed = 3;
        for _ in 0..200 {
            let a = rand_mat(&mut seed);
            let (s, w) = sym_skw(&a);
            assert!((s + w - a).max_abs() <= 1e-15);
            assert_eq!(s, s.transpose());
            assert_eq!(w, -w.transpose());
        }
    }

    #[test]
    fn outer_product_cases() {
        assert_eq!(outer(&Vec3::unit(0), &Vec3::unit(1)), Mat3::unit(0, 1));
        let a = Vec3::new(1.0, 1.0, 0.0);
        assert_eq!(
            outer(&a, &a),
            Mat3([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0; 3]])
        );
        let mut seed = 11;
        for _ in 0..100 {
            let (a, b) = (rand_vec(&mut seed), rand_vec(&mut seed));
            assert!(close(outer(&a, &b).trace(), a.dot(&b), 1.0));
        }
    }

    #[test]
    fn contract42_identities() {
        let mut seed = 5;
        let a = rand_mat(&mut seed);
        assert_eq!(contract42(&Tensor4::identity(), &a), a);
        assert_eq!(
            contract42(&Tensor4::trace_trace(), &Mat3::IDENTITY),
            Mat3::IDENTITY.scale(3.0)
        );
        assert_eq!(contract42(&Tensor4::transposition(), &a), a.transpose());
    }

    #[test]
    fn contract43_cases() {
        let mut t = Tensor3::ZERO;
        t.0[0][1][2] = 1.0;
        let r = contract43(&Tensor4::identity(), &t);
        // Σ_jkl δ_ik δ_jl T_jkl = Σ_j T_jij
        let brute = Vec3::from_array_fn(|i| (0..3).map(|j| t.0[j][i][j]).sum());
        assert_eq!(r, brute);
        assert_eq!(r, Vec3::ZERO);

        let ones4 = Tensor4::from_fn(|_, _, _, _| 1.0);
        let ones3 = Tensor3::from_fn(|_, _, _| 1.0);
        assert_eq!(contract43(&ones4, &ones3), Vec3::new(27.0, 27.0, 27.0));

        let mut seed = 9;
        let g = Tensor4::from_fn(|_, _, _, _| lcg(&mut seed));
        let tt = Tensor3::from_fn(|_, _, _| lcg(&mut seed));
        let lhs = contract43(&g, &tt.scale(2.5));
        let rhs = contract43(&g, &tt).scale(2.5);
        assert!((lhs - rhs).max_abs() < 1e-13);
    }

    #[test]
    fn contract32_cases() {
        let mut t = Tensor3::ZERO;
        t.0[0][0][0] = 1.0;
        assert_eq!(contract32(&t, &Mat3::IDENTITY), Vec3::new(1.0, 0.0, 0.0));
        let ones = Tensor3::from_fn(|_, _, _| 1.0);
        assert_eq!(contract32(&ones, &Mat3::IDENTITY), Vec3::new(3.0, 3.0, 3.0));
        let mut seed = 21;
        let tt = Tensor3::from_fn(|_, _, _| lcg(&mut seed));
        let a = rand_mat(&mut seed);
        let lhs = contract32(&tt.scale(2.0), &a.scale(-3.0));
        let rhs = contract32(&tt, &a).scale(-6.0);
        assert!((lhs - rhs).max_abs() < 1e-13);
    }

    #[test]
    fn frobenius_pairing_identities() {
        let mut seed = 77;
        for _ in 0..500 {
            let (a, b, c) = (rand_mat(&mut seed), rand_mat(&mut seed), rand_mat(&mut seed));
            let s = a.sym();
            let w = a.skw();
            assert!(close(s.frob(&b), s.frob(&b.sym()), 1.0));
            assert!(close(w.frob(&b), w.frob(&b.skw()), 1.0));
            assert!(close(
                a.transpose().matmul(&b).frob(&c),
                b.frob(&a.matmul(&c)),
                1.0
            ));
            let (x, y) = (rand_vec(&mut seed), rand_vec(&mut seed));
            assert!(close(outer(&x, &y).frob(&a), x.dot(&a.mul_vec(&y)), 1.0));
            assert!(close(outer(&x, &x).frob(&a), x.dot(&a.sym().mul_vec(&x)), 1.0));
        }
    }

    #[test]
    fn basis_tensors_are_pair_symmetric() {
        for t in [
            Tensor4::identity(),
            Tensor4::trace_trace(),
            Tensor4::transposition(),
            Tensor4::curl_curl(),
        ] {
            assert!(t.is_pair_symmetric());
        }
        let mut g = Tensor4::identity();
        g.0[0][1][2][0] = 0.5;
        assert!(!g.is_pair_symmetric());
        assert_eq!(g.pair_asymmetry(), 0.5);
    }

    #[test]
    fn curl_curl_form_matches_curl() {
        let mut seed = 4;
        for _ in 0..50 {
            let s = rand_mat(&mut seed);
            let c = Vec3::new(
                s.0[2][1] - s.0[1][2],
                s.0[0][2] - s.0[2][0],
                s.0[1][0] - s.0[0][1],
            );
            assert!(close(Tensor4::curl_curl().quadratic(&s), c.norm_sq(), 1.0));
        }
    }

    #[test]
    fn laplacian_symbol() {
        let k = Vec3::new(1.0, -2.0, 3.0);
        assert_eq!(Tensor4::identity().symbol(&k), Mat3::IDENTITY.scale(14.0));
    }

    impl Vec3 {
        fn from_array_fn(f: impl Fn(usize) -> f64) -> Vec3 {
            Vec3([f(0), f(1), f(2)])
        }
    }
}
