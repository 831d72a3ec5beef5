//! Dense Euclidean Clifford algebra `G_n` for `n <= 8`.
//!
//! A multivector stores `2^n` coefficients. Index `k` is the bitmask of a
//! basis blade: bit `i` set means the letter `e_{i+1}` is present, letters in
//! ascending order. Every letter squares to `+1` and distinct letters
//! anticommute.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported dimension (256 coefficients).
pub const MAX_DIM: usize = 8;

/// Default componentwise comparison tolerances.
pub const DEFAULT_ATOL: f64 = 1e-12;
pub const DEFAULT_RTOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange(n))
    }
}

/// Sign picked up when reordering the letters of `a` followed by `b` into
/// ascending order. Repeated letters cancel with square `+1`.
pub fn blade_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Grade of the blade with the given bitmask.
#[inline]
pub fn grade_of(mask: usize) -> u32 {
    mask.count_ones()
}

/// Bitmask of the bivector blade `e_j ∧ e_k` with 1-based letters.
pub fn bivector_mask(j: usize, k: usize) -> usize {
    (1 << (j - 1)) | (1 << (k - 1))
}

/// Blade name in the `e12` style; the empty blade is `1`.
pub fn blade_name(mask: usize) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let mut s = String::from("e");
    for i in 0..MAX_DIM {
        if mask & (1 << i) != 0 {
            s.push_str(&(i + 1).to_string());
        }
    }
    s
}

/// All `(j, k)` pairs with `1 <= j < k <= n`, in lexicographic order.
pub fn bivector_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 1..=n {
        for k in (j + 1)..=n {
            out.push((j, k));
        }
    }
    out
}

impl Multivector {
    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Multivector { dim, coeffs: vec![0.0; 1 << dim] })
    }

    pub fn scalar(dim: usize, value: f64) -> Result<Self> {
        let mut m = Self::zero(dim)?;
        m.coeffs[0] = value;
        Ok(m)
    }

    /// Basis blade with bitmask `mask` and coefficient `value`.
    pub fn blade(dim: usize, mask: usize, value: f64) -> Result<Self> {
        let mut m = Self::zero(dim)?;
        if mask >= m.coeffs.len() {
            return Err(Error::IndexOutOfRange(format!("blade mask {mask} in G_{dim}")));
        }
        m.coeffs[mask] = value;
        Ok(m)
    }

    /// Unit vector `e_i`, `i` is 1-based.
    pub fn basis_vector(dim: usize, i: usize) -> Result<Self> {
        if i == 0 || i > dim {
            return Err(Error::IndexOutOfRange(format!("letter {i} in G_{dim}")));
        }
        Self::blade(dim, 1 << (i - 1), 1.0)
    }

    /// Grade-1 element from its components.
    pub fn vector(components: &[f64]) -> Result<Self> {
        let mut m = Self::zero(components.len())?;
        for (i, c) in components.iter().enumerate() {
            m.coeffs[1 << i] = *c;
        }
        Ok(m)
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if coeffs.len() != 1 << dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                1 << dim,
                coeffs.len()
            )));
        }
        Ok(Multivector { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs.get(mask).copied().unwrap_or(0.0)
    }

    /// Coefficient of `e_j ∧ e_k` (1-based, `j < k`).
    pub fn bivector_coeff(&self, j: usize, k: usize) -> f64 {
        self.coeff(bivector_mask(j, k))
    }

    /// Components `x·e_i` of the grade-1 part.
    pub fn vector_components(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.coeffs[1 << i]).collect()
    }

    /// Coefficients of the grade-2 part in [`bivector_pairs`] order.
    pub fn bivector_components(&self) -> Vec<f64> {
        bivector_pairs(self.dim)
            .into_iter()
            .map(|(j, k)| self.bivector_coeff(j, k))
            .collect()
    }

    pub fn grade_project(&self, g: u32) -> Multivector {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if grade_of(k) == g { *c } else { 0.0 })
            .collect();
        Multivector { dim: self.dim, coeffs }
    }

    /// True when every coefficient outside grade `g` is zero.
    pub fn is_grade(&self, g: u32) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| grade_of(k) == g || *c == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Multivector {
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    fn same_dim(&self, other: &Multivector) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim, right: other.dim })
        }
    }

    pub fn checked_add(&self, other: &Multivector) -> Result<Multivector> {
        self.same_dim(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Multivector { dim: self.dim, coeffs })
    }

    pub fn checked_sub(&self, other: &Multivector) -> Result<Multivector> {
        self.same_dim(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Multivector { dim: self.dim, coeffs })
    }

    /// Componentwise `|a - b| <= atol + rtol·|b|`.
    pub fn approx_eq(&self, reference: &Multivector, atol: f64, rtol: f64) -> bool {
        self.dim == reference.dim
            && self
                .coeffs
                .iter()
                .zip(&reference.coeffs)
                .all(|(a, b)| (a - b).abs() <= atol + rtol * b.abs())
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}[{}]", self.dim, self)
    }
}

/// Renders nonzero terms as `c*e12`; the scalar part prints bare.
impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{}", blade_name(k))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Multivector> for &Multivector {
            type Output = Multivector;
            /// Panics on dimension mismatch; use the `checked_*` form otherwise.
            fn $m(self, rhs: &Multivector) -> Multivector {
                self.$checked(rhs).expect("multivector dimension mismatch")
            }
        }
        impl $tr<Multivector> for Multivector {
            type Output = Multivector;
            fn $m(self, rhs: Multivector) -> Multivector {
                (&self).$m(&rhs)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, s: f64) -> Multivector {
        self.scale(s)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, s: f64) -> Multivector {
        self.scale(s)
    }
}

fn product_with(
    a: &Multivector,
    b: &Multivector,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<Multivector> {
    a.same_dim(b)?;
    let mut out = vec![0.0; a.coeffs.len()];
    for (i, ca) in a.coeffs.iter().enumerate() {
        if *ca == 0.0 {
            continue;
        }
        for (j, cb) in b.coeffs.iter().enumerate() {
            if *cb == 0.0 || !keep(i, j) {
                continue;
            }
            out[i ^ j] += blade_sign(i, j) * ca * cb;
        }
    }
    Ok(Multivector { dim: a.dim, coeffs: out })
}

/// Clifford product.
pub fn geometric_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    product_with(a, b, |_, _| true)
}

/// Grade-raising part of the product: blades sharing a letter contribute zero.
pub fn outer_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    product_with(a, b, |i, j| i & j == 0)
}

/// Euclidean scalar product in the orthonormal blade basis.
pub fn scalar_product(a: &Multivector, b: &Multivector) -> Result<f64> {
    a.same_dim(b)?;
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y).sum())
}

pub fn norm(a: &Multivector) -> f64 {
    a.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `v / |v|²`.
pub fn vector_inverse(v: &Multivector) -> Result<Multivector> {
    if !v.is_grade(1) {
        return Err(Error::WrongGrade { expected: 1 });
    }
    let n2 = scalar_product(v, v)?;
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.scale(1.0 / n2))
}

/// `e_1 e_2 ... e_n`.
pub fn pseudo_unit(n: usize) -> Result<Multivector> {
    check_dim(n)?;
    Multivector::blade(n, (1 << n) - 1, 1.0)
}

/// `e_n ... e_1 = (-1)^{n(n-1)/2} I_n`.
pub fn pseudo_unit_inverse(n: usize) -> Result<Multivector> {
    check_dim(n)?;
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Multivector::blade(n, (1 << n) - 1, sign)
}

fn require_dim(x: &Multivector, n: usize) -> Result<()> {
    if x.dim == n {
        Ok(())
    } else {
        Err(Error::WrongDimension { expected: n, got: x.dim })
    }
}

/// `(x ∧ y)·I_2`, the 2x2 determinant of the component matrix.
pub fn det2(x: &Multivector, y: &Multivector) -> Result<f64> {
    require_dim(x, 2)?;
    require_dim(y, 2)?;
    Ok(x.coeffs[1] * y.coeffs[2] - x.coeffs[2] * y.coeffs[1])
}

/// `x* = x I_3`.
pub fn dual3(x: &Multivector) -> Result<Multivector> {
    require_dim(x, 3)?;
    if !x.is_grade(1) {
        return Err(Error::WrongGrade { expected: 1 });
    }
    geometric_product(x, &pseudo_unit(3)?)
}

/// `X# = -X I_3`, inverse of [`dual3`] on bivectors.
pub fn undual3(x: &Multivector) -> Result<Multivector> {
    require_dim(x, 3)?;
    if !x.is_grade(2) {
        return Err(Error::WrongGrade { expected: 2 });
    }
    Ok(-geometric_product(x, &pseudo_unit(3)?)?)
}

/// `(a ∧ b)#`, the classical cross product.
pub fn cross(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    require_dim(a, 3)?;
    require_dim(b, 3)?;
    if !a.is_grade(1) || !b.is_grade(1) {
        return Err(Error::WrongGrade { expected: 1 });
    }
    undual3(&outer_product(a, b)?)
}
