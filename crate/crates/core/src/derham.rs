//! The tensor-product complex `W → V → Q → X` on the reference prism
//! `[0, ∞) × T̂` and its exactness check.
//!
//! Spaces and block layout (radial index `k = −1..=N` stored as `k + 1`,
//! radial-major inside each block):
//!
//! | space | blocks |
//! |-------|--------|
//! | `W` | `Ψ ⊗ P^p` |
//! | `V` | `ψ ⊗ P^p` (component ξ), `Ψ ⊗ (P^{p−1})²` (surface components) |
//! | `Q` | `Ψ ⊗ P^{p−2}` (component ξ), `ψ ⊗ (P^{p−1})²` (surface components) |
//! | `X` | `ψ ⊗ P^{p−2}` |
//!
//! Since `∂̂ξ Ψₖ = ψₖ`, the radial derivative is the identity between the
//! `Ψ` and `ψ` coordinates and the chain matrices do not depend on `κ₀`.

use alloc::vec::Vec;

use crate::hardy::{MoebiusParams, RadialFamily};
use crate::linalg::{numerical_rank, CMatrix};
use crate::surface::{space_dim, surf_operator, SpaceKind, SurfaceOp, TrianglePolySpace};
use crate::{c64, Error, Result, C64};

/// Relative singular value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    W,
    V,
    Q,
    X,
}

/// One basis function `Φ_k ⊗ s_l` of a tensor space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorIndex {
    /// `0` for the ξ component, `1` for the surface part.
    pub block: usize,
    pub family: RadialFamily,
    /// Radial index shifted by one: `0` is `Φ₋₁`.
    pub radial: usize,
    /// Index into the surface space of the block.
    pub surface: usize,
}

/// Layout of the four spaces for given `(p, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorLayout {
    pub p: usize,
    pub n: usize,
}

impl TensorLayout {
    pub fn radial_len(&self) -> usize {
        self.n + 2
    }

    /// `(family, surface space)` of each block.
    pub fn blocks(&self, space: Space) -> Vec<(RadialFamily, TrianglePolySpace)> {
        use RadialFamily::*;
        use SpaceKind::*;
        let s = |kind| TrianglePolySpace { degree: self.p, kind };
        match space {
            Space::W => alloc::vec![(Psi, s(ScalarH1))],
            Space::V => alloc::vec![(PsiPrime, s(ScalarH1)), (Psi, s(VectorHcurl))],
            Space::Q => alloc::vec![(Psi, s(ScalarL2)), (PsiPrime, s(VectorHcurl))],
            Space::X => alloc::vec![(PsiPrime, s(ScalarL2))],
        }
    }

    pub fn dim(&self, space: Space) -> usize {
        self.blocks(space).iter().map(|(_, s)| s.dim() * self.radial_len()).sum()
    }

    /// Offset of the first function of `block`.
    pub fn block_offset(&self, space: Space, block: usize) -> usize {
        self.blocks(space).iter().take(block).map(|(_, s)| s.dim() * self.radial_len()).sum()
    }

    /// Global index of `(block, radial, surface)`.
    #[inline]
    pub fn index(&self, space: Space, block: usize, radial: usize, surface: usize) -> usize {
        let blocks = self.blocks(space);
        self.block_offset(space, block) + radial * blocks[block].1.dim() + surface
    }

    pub fn basis(&self, space: Space) -> Vec<TensorIndex> {
        let mut out = Vec::with_capacity(self.dim(space));
        for (block, (family, surf)) in self.blocks(space).into_iter().enumerate() {
            for radial in 0..self.radial_len() {
                for surface in 0..surf.dim() {
                    out.push(TensorIndex { block, family, radial, surface });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct DeRhamComplex {
    pub p: usize,
    pub n: usize,
    pub kappa0: C64,
    /// `(dim W, dim V, dim Q, dim X)`.
    pub dims: [usize; 4],
    /// Gradient-like `V ← W`, curl-like `Q ← V`, divergence-like `X ← Q`.
    pub chain: [CMatrix; 3],
    pub layout: TensorLayout,
}

impl DeRhamComplex {
    pub fn grad(&self) -> &CMatrix {
        &self.chain[0]
    }

    pub fn curl(&self) -> &CMatrix {
        &self.chain[1]
    }

    pub fn div(&self) -> &CMatrix {
        &self.chain[2]
    }

    pub fn basis(&self, space: Space) -> Vec<TensorIndex> {
        self.layout.basis(space)
    }

    pub fn alternating_sum(&self) -> isize {
        let d = self.dims.map(|x| x as isize);
        d[0] - d[1] + d[2] - d[3]
    }
}

/// Closed-form dimensions `(dim W, dim V, dim Q, dim X)`.
pub fn expected_dims(p: usize, n: usize) -> [usize; 4] {
    let r = n + 2;
    let h1 = (p + 2) * (p + 1) / 2;
    let hc = (p + 1) * p;
    let l2 = p * p.saturating_sub(1) / 2;
    [h1 * r, r * (h1 + hc), r * (l2 + hc), l2 * r]
}

/// `id_r ⊗ S` placed at `(row0, col0)`, scaled by `sign`.
fn add_kron_identity(out: &mut CMatrix, row0: usize, col0: usize, r: usize, s: &CMatrix, sign: f64) {
    for k in 0..r {
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                let v = s[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    out[(row0 + k * s.rows() + i, col0 + k * s.cols() + j)] += sign * v;
                }
            }
        }
    }
}

/// Identity on `r · m` entries at `(row0, col0)`.
fn add_identity(out: &mut CMatrix, row0: usize, col0: usize, len: usize, value: C64) {
    for i in 0..len {
        out[(row0 + i, col0 + i)] += value;
    }
}

pub fn build_complex(p: usize, n: usize, params: &MoebiusParams) -> Result<DeRhamComplex> {
    if p == 0 {
        return Err(Error::Invalid("surface order p must be at least 1"));
    }
    TrianglePolySpace::new(p, SpaceKind::ScalarH1)?;
    let layout = TensorLayout { p, n };
    let r = layout.radial_len();
    let dims = [Space::W, Space::V, Space::Q, Space::X].map(|s| layout.dim(s));
    let h1 = space_dim(p, SpaceKind::ScalarH1);
    let hc = space_dim(p, SpaceKind::VectorHcurl);
    let l2 = space_dim(p, SpaceKind::ScalarL2);
    let one = c64(1.0, 0.0);

    let sgrad = surf_operator(SurfaceOp::Grad, p)?;
    let sperp = surf_operator(SurfaceOp::PerpGrad, p)?;
    let scurl = surf_operator(SurfaceOp::ScalarCurl, p)?;
    let sdiv = surf_operator(SurfaceOp::Div, p)?;

    // W → V: (∂̂ξ ⊗ id ; id ⊗ ∇)
    let mut grad = CMatrix::zeros(dims[1], dims[0]);
    add_identity(&mut grad, 0, 0, r * h1, one);
    add_kron_identity(&mut grad, r * h1, 0, r, &sgrad, 1.0);

    // V → Q: ĉ_ξ = ∇⊥·ê_s, ĉ_s = −∇⊥ ê_ξ + ∂̂ξ R ê_s with R(a, b) = (−b, a)
    let mut curl = CMatrix::zeros(dims[2], dims[1]);
    add_kron_identity(&mut curl, 0, r * h1, r, &scurl, 1.0);
    add_kron_identity(&mut curl, r * l2, 0, r, &sperp, -1.0);
    let half = hc / 2;
    let mut rot = CMatrix::zeros(hc, hc);
    for l in 0..half {
        rot[(l, half + l)] = -one;
        rot[(half + l, l)] = one;
    }
    add_kron_identity(&mut curl, r * l2, r * h1, r, &rot, 1.0);

    // Q → X: (∂̂ξ ⊗ id , id ⊗ ∇·)
    let mut div = CMatrix::zeros(dims[3], dims[2]);
    add_identity(&mut div, 0, 0, r * l2, one);
    add_kron_identity(&mut div, 0, r * l2, r, &sdiv, 1.0);

    Ok(DeRhamComplex { p, n, kappa0: params.kappa0(), dims, chain: [grad, curl, div], layout })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessReport {
    pub dims: [usize; 4],
    /// Max-abs entry of `curl·grad` and `div·curl`.
    pub composition_norms: [f64; 2],
    pub ranks: [usize; 3],
    pub kernel_dims: [usize; 3],
    pub dims_match_formulas: bool,
    pub passed: bool,
    pub tolerance: f64,
}

/// Checks the complex: both compositions vanish to `tol`, the gradient is
/// injective, `rank grad = dim ker curl`, `rank curl = dim ker div` and the
/// divergence is onto `X`.
pub fn verify_exactness(complex: &DeRhamComplex, tol: f64) -> Result<ExactnessReport> {
    let [g, c, d] = &complex.chain;
    let dims = complex.dims;
    if g.cols() != dims[0] || g.rows() != dims[1] || c.cols() != dims[1] || c.rows() != dims[2] {
        return Err(Error::Shape("chain matrices do not match the space dimensions"));
    }
    if d.cols() != dims[2] || d.rows() != dims[3] {
        return Err(Error::Shape("chain matrices do not match the space dimensions"));
    }
    let comp1 = c.matmul(g).max_abs();
    let comp2 = d.matmul(c).max_abs();
    let ranks = [numerical_rank(g, RANK_TOL), numerical_rank(c, RANK_TOL), numerical_rank(d, RANK_TOL)];
    let kernel_dims = [dims[0] - ranks[0], dims[1] - ranks[1], dims[2] - ranks[2]];
    let dims_match_formulas = dims == expected_dims(complex.p, complex.n);
    let passed = comp1 <= tol
        && comp2 <= tol
        && kernel_dims[0] == 0
        && ranks[0] == kernel_dims[1]
        && ranks[1] == kernel_dims[2]
        && ranks[2] == dims[3]
        && dims_match_formulas;
    Ok(ExactnessReport { dims, composition_norms: [comp1, comp2], ranks, kernel_dims, dims_match_formulas, passed, tolerance: tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(re: f64, im: f64) -> MoebiusParams {
        MoebiusParams::new(c64(re, im)).unwrap()
    }

    #[test]
    fn dims_for_p3_n4() {
        let c = build_complex(3, 4, &params(1.0, 0.0)).unwrap();
        assert_eq!(c.dims, [60, 132, 90, 18]);
        assert_eq!(c.alternating_sum(), 0);
        assert_eq!(c.basis(Space::V).len(), 132);
    }

    #[test]
    fn p1_has_empty_x() {
        let c = build_complex(1, 0, &params(1.0, 0.0)).unwrap();
        assert_eq!(c.dims[3], 0);
        assert_eq!((c.div().rows(), c.div().cols()), (0, c.dims[2]));
        assert!(verify_exactness(&c, 1e-12).unwrap().passed);
    }

    #[test]
    fn p0_is_rejected() {
        assert!(build_complex(0, 2, &params(1.0, 0.0)).is_err());
    }

    #[test]
    fn alternating_sum_vanishes() {
        for p in 1..=8 {
            for n in 0..=6 {
                let d = expected_dims(p, n);
                assert_eq!(d[0] as isize - d[1] as isize + d[2] as isize - d[3] as isize, 0);
                let layout = TensorLayout { p, n };
                assert_eq!(d, [Space::W, Space::V, Space::Q, Space::X].map(|s| layout.dim(s)));
            }
        }
    }

    #[test]
    fn p3_n4_exactness_report() {
        let c = build_complex(3, 4, &params(2.0, 1.0)).unwrap();
        let r = verify_exactness(&c, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.kernel_dims[0], 0);
        assert_eq!(r.ranks[2], 18);
        assert_eq!(r.composition_norms, [0.0, 0.0]);
    }

    #[test]
    fn chain_independent_of_kappa0() {
        let a = build_complex(3, 2, &params(1.0, 0.0)).unwrap();
        let b = build_complex(3, 2, &params(3.0, 2.0)).unwrap();
        for i in 0..3 {
            assert!(a.chain[i].max_abs_diff(&b.chain[i]) <= 1e-14);
        }
    }

    #[test]
    fn small_grid_is_exact() {
        for p in 1..=3 {
            for n in 0..=2 {
                let c = build_complex(p, n, &params(1.0, 0.5)).unwrap();
                let r = verify_exactness(&c, 1e-12).unwrap();
                assert!(r.passed, "p = {p}, N = {n}: {r:?}");
            }
        }
    }

    #[test]
    fn layout_index_matches_basis() {
        let l = TensorLayout { p: 2, n: 1 };
        for space in [Space::W, Space::V, Space::Q, Space::X] {
            for (g, t) in l.basis(space).iter().enumerate() {
                assert_eq!(l.index(space, t.block, t.radial, t.surface), g);
            }
        }
    }

    #[test]
    fn broken_chain_fails() {
        let mut c = build_complex(2, 1, &params(1.0, 0.0)).unwrap();
        c.chain[1][(0, 0)] += c64(1.0, 0.0);
        let r = verify_exactness(&c, 1e-12).unwrap();
        assert!(!r.passed);
        c.chain[2] = CMatrix::zeros(3, 3);
        assert!(verify_exactness(&c, 1e-12).is_err());
    }
}
