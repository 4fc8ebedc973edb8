//! Resonances: the dielectric slab in 1D and single spherical-harmonic
//! modes outside the unit ball.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::interval::{assemble_1d, BoundaryCondition, Exterior, Interval1DProblem};
use crate::hardy::{radial_form_matrix, MoebiusParams, RadialFamily};
use crate::linalg::{eigenvalues, shift_invert_eig_with, CMatrix, EigOptions, Spectrum};
use crate::{c64, Error, Result, C64};

/// Pairs whose energy in the last two Hardy coefficients exceeds this
/// fraction of the total Hardy energy are treated as under-resolved.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 0.5;

/// Default requested residual for resonance computations.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Fraction of `Σ|xₖ|²` carried by the last two entries of `hardy`.
pub fn tail_fraction(hardy: &[C64]) -> f64 {
    let total: f64 = hardy.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let t: f64 = hardy.iter().rev().take(2).map(|c| c.norm_sqr()).sum();
    t / total
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceOptions {
    pub tol: f64,
    pub tail_threshold: f64,
    pub eig: EigOptions,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_EIG_TOL, tail_threshold: DEFAULT_TAIL_THRESHOLD, eig: EigOptions::default() }
    }
}

/// Solves with a few extra pairs, drops under-resolved ones and keeps the
/// `count` nearest to the shift.
fn filtered(
    s: &CMatrix,
    m: &CMatrix,
    shift: C64,
    count: usize,
    hardy: core::ops::Range<usize>,
    multiplicity: usize,
    opts: &ResonanceOptions,
) -> Result<Spectrum> {
    let want = (2 * count + 2).min(s.rows());
    let mut sp = shift_invert_eig_with(s, m, shift, want, opts.tol, &opts.eig)?;
    sp.pairs.retain(|p| tail_fraction(&p.vector[hardy.clone()]) <= opts.tail_threshold);
    sp.pairs.truncate(count);
    for p in &mut sp.pairs {
        p.multiplicity = multiplicity;
    }
    Ok(sp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlabConfig {
    /// Interior permittivity, `> 1`.
    pub eps: f64,
    pub kappa0: C64,
    pub n: usize,
    pub order: usize,
    pub elements: usize,
    pub count: usize,
    /// Shift in the `κ²` plane.
    pub shift: C64,
    pub options: ResonanceOptions,
}

impl SlabConfig {
    /// Four elements; the shift is the square of the mean of the first
    /// `count` closed-form resonances.
    pub fn new(eps: f64, kappa0: C64, n: usize, order: usize, count: usize) -> Self {
        let mean: C64 = (1..=count.max(1)).map(|m| slab_reference(eps, m)).sum::<C64>() / count.max(1) as f64;
        Self { eps, kappa0, n, order, elements: 4, count, shift: mean * mean, options: ResonanceOptions::default() }
    }
}

/// Closed-form slab resonance `κₘ = (mπ − i artanh(1/√ε))/√ε` for a
/// Neumann wall at `x = −1` and unit exterior; for `ε = 4` this is
/// `mπ/2 − (i/4) ln 3`.
pub fn slab_reference(eps: f64, m: usize) -> C64 {
    let r = eps.sqrt();
    c64(m as f64 * core::f64::consts::PI, -(1.0 / r).atanh()) / r
}

pub fn resonances_slab(cfg: &SlabConfig) -> Result<Spectrum> {
    if !(cfg.eps > 1.0) || !cfg.eps.is_finite() {
        return Err(Error::Invalid("slab permittivity must exceed 1"));
    }
    let mut pb = Interval1DProblem::new(-1.0, cfg.elements, cfg.order, c64(0.0, 0.0), Exterior::Hardy { kappa0: cfg.kappa0, n: cfg.n });
    pb.eps = vec![cfg.eps];
    pb.left = BoundaryCondition::Neumann(C64::new(0.0, 0.0));
    let sys = assemble_1d(&pb)?;
    let h = sys.dofs.hardy_offset()..sys.dofs.len();
    filtered(&sys.stiffness, &sys.mass, cfg.shift, cfg.count, h, 1, &cfg.options)
}

/// One spherical-harmonic mode `u = R(r) Yₙ` outside the unit ball with
/// `R(1) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeProblem {
    /// Harmonic degree `n`.
    pub degree: usize,
    pub kappa0: C64,
    /// Hardy truncation `N`.
    pub n: usize,
}

impl ModeProblem {
    /// `(S, M)` on Hardy DOFs `0..=N` with `r = 1 + ξ`:
    /// `S = B(Dψ, Dψ) + n(n+1) B(Ψ, Ψ)`, `M = B(DΨ, DΨ)`.
    pub fn matrices(&self) -> Result<(CMatrix, CMatrix)> {
        let p = MoebiusParams::new(self.kappa0)?;
        let d = self.degree as f64;
        let s = radial_form_matrix(self.n, &p, RadialFamily::PsiPrime, 1, 1)?
            .entries
            .add_scaled(&radial_form_matrix(self.n, &p, RadialFamily::Psi, 0, 0)?.entries, c64(d * (d + 1.0), 0.0));
        let m = radial_form_matrix(self.n, &p, RadialFamily::Psi, 1, 1)?.entries;
        let keep: Vec<usize> = (1..self.n + 2).collect();
        Ok((s.select(&keep, &keep), m.select(&keep, &keep)))
    }

    /// Multiplicity of each scalar-mode resonance in the full 3D problem.
    pub fn multiplicity(&self) -> usize {
        2 * self.degree + 1
    }
}

/// `count` resonances of a mode with `κ²` nearest to `shift`.
pub fn resonances_sphere_mode(mode: &ModeProblem, shift: C64, count: usize) -> Result<Spectrum> {
    resonances_sphere_mode_with(mode, shift, count, &ResonanceOptions::default())
}

pub fn resonances_sphere_mode_with(mode: &ModeProblem, shift: C64, count: usize, opts: &ResonanceOptions) -> Result<Spectrum> {
    let (s, m) = mode.matrices()?;
    let dim = s.rows();
    filtered(&s, &m, shift, count, 0..dim, mode.multiplicity(), opts)
}

/// Coefficients of `Σₖ (n+k)!/(k!(n−k)!) (i/2)ᵏ z^{n−k}`, highest power
/// first. Its roots are the zeros of the outgoing spherical Hankel
/// function `hₙ⁽¹⁾`.
pub fn hankel_polynomial(n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n + 1);
    let half_i = c64(0.0, 0.5);
    let mut pw = c64(1.0, 0.0);
    for k in 0..=n {
        // (n+k)! / (k! (n−k)!) as a product to stay exact for moderate n
        let mut c = 1.0;
        for j in (n - k + 1)..=(n + k) {
            c *= j as f64;
        }
        for j in 1..=k {
            c /= j as f64;
        }
        out.push(pw * c);
        pw *= half_i;
    }
    out
}

/// Roots of the degree-`n` Hankel polynomial as eigenvalues of its
/// companion matrix, sorted by decreasing real part.
pub fn spherical_hankel_roots(n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let c = hankel_polynomial(n);
    let comp = CMatrix::from_fn(n, n, |r, col| {
        if r == 0 {
            -c[col + 1] / c[0]
        } else if col + 1 == r {
            c64(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut roots = eigenvalues(&comp)?;
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// The root with the largest real part, the natural target for a mode.
pub fn leading_hankel_root(n: usize) -> Result<C64> {
    spherical_hankel_roots(n)?.first().copied().ok_or(Error::Invalid("degree 0 has no resonances"))
}
