//! Finite-dimensional algebra of the Hardy space `H⁺(S¹)` in the monomial
//! basis `z⁰, z¹, …`.
//!
//! Conventions: a radial function `u(ξ)`, `ξ ≥ 0`, is represented through
//! its Laplace transform composed with the Möbius map
//! `s(z) = iκ₀ (z + 1)/(z − 1)`. Under this correspondence
//!
//! - `B(U, V) = −2iκ₀ Σ uⱼ vⱼ` is the transformed `∫₀^∞ u v dξ`,
//! - `D` is the transformed multiplication by `1 + ξ`,
//! - `∂̂ξ = iκ₀ T₊ T₋⁻¹` is the transformed radial derivative.
//!
//! The radial basis is `Ψ₋₁ = T₋(1, 0)/(iκ₀)`, `Ψⱼ = T₋(0, zʲ)/(iκ₀)` and
//! `ψₖ = ∂̂ξ Ψₖ`, so `∂̂ξ` is the identity in the `Ψ → ψ` coordinate pairing.
//! `Ψ₋₁` transforms back to `e^{iκ₀ξ}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{CMatrix, LuFactor};
use crate::{c64, Error, Result, C64};

/// Extra monomials used when `D⁻¹` is applied inside form assembly.
pub const DEFAULT_INVERSE_PADDING: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusParams {
    kappa0: C64,
}

impl MoebiusParams {
    /// Fails unless `Re κ₀ > 0` and both parts are finite.
    pub fn new(kappa0: C64) -> Result<Self> {
        if !(kappa0.re > 0.0) || !kappa0.re.is_finite() || !kappa0.im.is_finite() {
            return Err(Error::InvalidKappa0 { re: kappa0.re, im: kappa0.im });
        }
        Ok(Self { kappa0 })
    }

    #[inline]
    pub fn kappa0(&self) -> C64 {
        self.kappa0
    }

    /// `2iκ₀`.
    #[inline]
    pub fn two_i_kappa0(&self) -> C64 {
        c64(0.0, 2.0) * self.kappa0
    }
}

/// Polynomial `Σ cⱼ zʲ`, optionally with a boundary value `u₀`; in that case
/// the represented element is `T₋(u₀, Σ cⱼ zʲ)/(iκ₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardyCoefficients {
    pub coeffs: Vec<C64>,
    pub boundary: Option<C64>,
}

impl HardyCoefficients {
    /// An empty coefficient list is stored as the zero constant.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![C64::new(0.0, 0.0)] } else { coeffs };
        Self { coeffs, boundary: None }
    }

    pub fn with_boundary(u0: C64, coeffs: Vec<C64>) -> Self {
        let mut h = Self::new(coeffs);
        h.boundary = Some(u0);
        h
    }

    pub fn zero(len: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); len.max(1)])
    }

    /// `scale · zʲ`.
    pub fn monomial(j: usize, scale: C64) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); j + 1];
        c[j] = scale;
        Self::new(c)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient of `zʲ` (zero past the end).
    pub fn get(&self, j: usize) -> C64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    /// Index of the highest non-zero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.re != 0.0 || c.im != 0.0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Plain monomial coefficients, folding in the boundary value if present.
    pub fn to_monomial(&self, params: &MoebiusParams) -> Self {
        match self.boundary {
            None => self.clone(),
            Some(u0) => {
                let t = apply_t(TSign::Minus, u0, &Self::new(self.coeffs.clone()));
                let s = c64(0.0, 1.0) * params.kappa0();
                Self::new(t.coeffs.iter().map(|c| c / s).collect())
            }
        }
    }

    fn padded(&self, len: usize) -> Vec<C64> {
        let mut v = self.coeffs.clone();
        if v.len() < len {
            v.resize(len, C64::new(0.0, 0.0));
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisTag {
    Monomial,
    /// Rows and columns indexed by `Ψ₋₁, Ψ₀, …, Ψ_N`.
    PsiBasis,
    /// Rows and columns indexed by `ψ₋₁, ψ₀, …, ψ_N`.
    PsiPrimeBasis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialFamily {
    /// `Ψₖ`
    Psi,
    /// `ψₖ = ∂̂ξ Ψₖ`
    PsiPrime,
}

impl RadialFamily {
    pub fn tag(self) -> BasisTag {
        match self {
            Self::Psi => BasisTag::PsiBasis,
            Self::PsiPrime => BasisTag::PsiPrimeBasis,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialOperatorMatrix {
    pub entries: CMatrix,
    pub basis_tag: BasisTag,
    pub kappa0: C64,
}

impl RadialOperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }
}

/// `s(z) = iκ₀ (z + 1)/(z − 1)`.
pub fn mobius_s(params: &MoebiusParams, z: C64) -> Result<C64> {
    let den = z - c64(1.0, 0.0);
    if den.norm() == 0.0 {
        return Err(Error::MoebiusPole);
    }
    Ok(c64(0.0, 1.0) * params.kappa0() * (z + c64(1.0, 0.0)) / den)
}

/// `T±(u₀, Û) = ½ (u₀ + (z ± 1) Û)`; the result has one more coefficient than `poly`.
pub fn apply_t(sign: TSign, u0: C64, poly: &HardyCoefficients) -> HardyCoefficients {
    let s = match sign {
        TSign::Plus => 1.0,
        TSign::Minus => -1.0,
    };
    let n = poly.coeffs.len();
    let mut out = vec![C64::new(0.0, 0.0); n + 1];
    for (j, c) in poly.coeffs.iter().enumerate() {
        out[j + 1] += 0.5 * c;
        out[j] += 0.5 * s * c;
    }
    out[0] += 0.5 * u0;
    HardyCoefficients::new(out)
}

/// Preimage of `T₋` for a polynomial of length `L`, with `Û` of length
/// `max(L − 1, 1)`. Every polynomial is an image at this size, so the
/// residual check only guards against non-finite input.
pub fn invert_t_minus(poly: &HardyCoefficients, tol: f64) -> Result<(C64, HardyCoefficients)> {
    let order = poly.coeffs.len().saturating_sub(2);
    invert_t_minus_truncated(poly, order, tol)
}

/// Preimage `(u₀, Û)` with `Û ∈ Π_order`. Fails with
/// [`Error::NotInImage`] when `T₋(u₀, Û)` misses `poly` by more than `tol`
/// (maximum coefficient difference).
pub fn invert_t_minus_truncated(poly: &HardyCoefficients, order: usize, tol: f64) -> Result<(C64, HardyCoefficients)> {
    let p = &poly.coeffs;
    // aⱼ = 2 Σ_{i>j} pᵢ, u₀ = 2 p(1).
    let mut tail = vec![C64::new(0.0, 0.0); p.len() + 1];
    for i in (0..p.len()).rev() {
        tail[i] = tail[i + 1] + p[i];
    }
    let a: Vec<C64> = (0..=order).map(|j| 2.0 * tail.get(j + 1).copied().unwrap_or_default()).collect();
    let u0 = 2.0 * tail[0];
    let hat = HardyCoefficients::new(a);
    let back = apply_t(TSign::Minus, u0, &hat);
    let len = back.len().max(p.len());
    let residual = (0..len).map(|j| (back.get(j) - poly.get(j)).norm()).fold(0.0, f64::max);
    if !(residual <= tol) {
        return Err(Error::NotInImage { residual, tol });
    }
    Ok((u0, hat))
}

/// Truncated matrix of `D` on `z⁰..z^N`:
/// `id + (1/(2iκ₀)) tridiag(1, 2, …; −1, −3, …; 1, 2, …)`.
pub fn d_matrix(n: usize, params: &MoebiusParams) -> RadialOperatorMatrix {
    RadialOperatorMatrix { entries: d_entries(n + 1, params), basis_tag: BasisTag::Monomial, kappa0: params.kappa0() }
}

fn d_entries(size: usize, params: &MoebiusParams) -> CMatrix {
    let inv = params.two_i_kappa0().inv();
    let mut d = CMatrix::zeros(size, size);
    for j in 0..size {
        d[(j, j)] = c64(1.0, 0.0) - (2.0 * j as f64 + 1.0) * inv;
        if j + 1 < size {
            let off = (j as f64 + 1.0) * inv;
            d[(j + 1, j)] = off;
            d[(j, j + 1)] = off;
        }
    }
    d
}

/// Inverse of the truncated `D_N` (not a truncation of the exact inverse).
pub fn i_matrix(n: usize, params: &MoebiusParams) -> Result<RadialOperatorMatrix> {
    let d = d_entries(n + 1, params);
    let lu = LuFactor::new(&d).map_err(|e| match e {
        Error::Singular { pivot, .. } => Error::Singular { pivot, condition: f64::INFINITY },
        other => other,
    })?;
    let cond = lu.condition_estimate();
    if !cond.is_finite() || cond > 1.0 / f64::EPSILON {
        return Err(Error::Singular { pivot: n, condition: cond });
    }
    Ok(RadialOperatorMatrix { entries: lu.inverse(), basis_tag: BasisTag::Monomial, kappa0: params.kappa0() })
}

/// Exact action of `D` on a polynomial; the degree grows by one.
///
/// `D zʲ = zʲ + ((j+1) z^{j+1} − (2j+1) zʲ + j z^{j−1})/(2iκ₀)`.
pub fn apply_d_exact(poly: &HardyCoefficients, params: &MoebiusParams) -> HardyCoefficients {
    let u = poly.to_monomial(params);
    let inv = params.two_i_kappa0().inv();
    let n = u.coeffs.len();
    let mut out = vec![C64::new(0.0, 0.0); n + 1];
    for (j, c) in u.coeffs.iter().enumerate() {
        let jf = j as f64;
        out[j] += c * (c64(1.0, 0.0) - (2.0 * jf + 1.0) * inv);
        out[j + 1] += c * (jf + 1.0) * inv;
        if j > 0 {
            out[j - 1] += c * jf * inv;
        }
    }
    HardyCoefficients::new(out)
}

/// `B(U, V) = −2iκ₀ Σ uⱼ vⱼ` (bilinear, no conjugation).
pub fn bilinear_b(u: &HardyCoefficients, v: &HardyCoefficients, params: &MoebiusParams) -> C64 {
    let u = u.to_monomial(params);
    let v = v.to_monomial(params);
    let s: C64 = u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum();
    -params.two_i_kappa0() * s
}

/// `(Ψ₋₁, …, Ψ_N)` and `(ψ₋₁, …, ψ_N)` as monomial coefficient vectors of
/// length `N + 2`.
pub fn radial_bases(n: usize, params: &MoebiusParams) -> (Vec<HardyCoefficients>, Vec<HardyCoefficients>) {
    let len = n + 2;
    let inv = params.two_i_kappa0().inv();
    let mut psi_cap = Vec::with_capacity(len);
    let mut psi = Vec::with_capacity(len);
    for k in 0..len {
        let mut big = vec![C64::new(0.0, 0.0); len];
        let mut small = vec![C64::new(0.0, 0.0); len];
        if k == 0 {
            big[0] = inv;
            small[0] = c64(0.5, 0.0);
        } else {
            let j = k - 1;
            big[j] = -inv;
            big[j + 1] = inv;
            small[j] = c64(0.5, 0.0);
            small[j + 1] = c64(0.5, 0.0);
        }
        psi_cap.push(HardyCoefficients::new(big));
        psi.push(HardyCoefficients::new(small));
    }
    (psi_cap, psi)
}

/// `∂̂ξ = iκ₀ T₊ T₋⁻¹`.
pub fn apply_dxi(u: &HardyCoefficients, params: &MoebiusParams, tol: f64) -> Result<HardyCoefficients> {
    let m = u.to_monomial(params);
    let s = c64(0.0, 1.0) * params.kappa0();
    let scaled = HardyCoefficients::new(m.coeffs.iter().map(|c| c * s).collect());
    let (u0, hat) = invert_t_minus(&scaled, tol)?;
    Ok(apply_t(TSign::Plus, u0, &hat))
}

/// Radial operator applied before the bilinear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RadialOp {
    Id,
    D,
    D2,
    /// `D⁻¹` realised by a padded truncated inverse.
    I,
    I2,
}

impl RadialOp {
    pub fn d_power(power: usize) -> Option<Self> {
        match power {
            0 => Some(Self::Id),
            1 => Some(Self::D),
            2 => Some(Self::D2),
            _ => None,
        }
    }
}

/// Monomial coefficients of `op Φₖ` as the columns of a matrix with `N + 2`
/// columns. `D` powers are exact; `I` powers solve with the truncated
/// `D` of size `N + 2 + padding`.
pub fn radial_coefficients(n: usize, params: &MoebiusParams, family: RadialFamily, op: RadialOp, padding: usize) -> Result<CMatrix> {
    let (big, small) = radial_bases(n, params);
    let basis = match family {
        RadialFamily::Psi => big,
        RadialFamily::PsiPrime => small,
    };
    let cols = basis.len();
    match op {
        RadialOp::Id | RadialOp::D | RadialOp::D2 => {
            let powers = match op {
                RadialOp::Id => 0,
                RadialOp::D => 1,
                _ => 2,
            };
            let rows = cols + powers;
            let mut out = CMatrix::zeros(rows, cols);
            for (k, b) in basis.into_iter().enumerate() {
                let mut v = b;
                for _ in 0..powers {
                    v = apply_d_exact(&v, params);
                }
                out.set_column(k, &v.padded(rows));
            }
            Ok(out)
        }
        RadialOp::I | RadialOp::I2 => {
            let size = cols + padding;
            let lu = LuFactor::new(&d_entries(size, params))?;
            let reps = if op == RadialOp::I { 1 } else { 2 };
            let mut out = CMatrix::zeros(size, cols);
            for (k, b) in basis.into_iter().enumerate() {
                let mut v = b.padded(size);
                for _ in 0..reps {
                    v = lu.solve(&v);
                }
                out.set_column(k, &v);
            }
            Ok(out)
        }
    }
}

/// `B(A Φⱼ, B Φ'ₖ)` for two coefficient matrices from [`radial_coefficients`].
pub fn pair_matrix(left: &CMatrix, right: &CMatrix, params: &MoebiusParams) -> CMatrix {
    let rows = left.rows().min(right.rows());
    let mut out = CMatrix::zeros(left.cols(), right.cols());
    let f = -params.two_i_kappa0();
    for j in 0..left.cols() {
        for k in 0..right.cols() {
            let mut s = C64::new(0.0, 0.0);
            for r in 0..rows {
                s += left[(r, j)] * right[(r, k)];
            }
            out[(j, k)] = f * s;
        }
    }
    out
}

/// `(N+2)×(N+2)` matrix `B(D^a Φⱼ, D^b Φₖ)`, `j, k ∈ {−1, …, N}`, with `D`
/// applied exactly in monomials.
pub fn radial_form_matrix(
    n: usize,
    params: &MoebiusParams,
    family: RadialFamily,
    d_power_left: usize,
    d_power_right: usize,
) -> Result<RadialOperatorMatrix> {
    let lop = RadialOp::d_power(d_power_left).ok_or(Error::Invalid("D power must be 0, 1 or 2"))?;
    let rop = RadialOp::d_power(d_power_right).ok_or(Error::Invalid("D power must be 0, 1 or 2"))?;
    let l = radial_coefficients(n, params, family, lop, 0)?;
    let r = radial_coefficients(n, params, family, rop, 0)?;
    Ok(RadialOperatorMatrix { entries: pair_matrix(&l, &r, params), basis_tag: family.tag(), kappa0: params.kappa0() })
}
