//! Helmholtz equation `u'' + κ²ε u = 0` on `[a, ∞)`: high-order FEM on
//! `[a, 0]`, Hardy-space exterior on `[0, ∞)`.
//!
//! Outgoing waves behave like `e^{+iκx}`. The exterior contributes
//! `B(∂̂u, ∂̂v) − κ² B(u, v)` to the weak form, whose exact reduction onto
//! the trace at `x = 0` is `−iκ u(0) v(0)`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::hardy::{radial_form_matrix, MoebiusParams, RadialFamily};
use crate::linalg::{norm2, CMatrix, LuFactor};
use crate::quadrature::{gauss_legendre, legendre_values};
use crate::{c64, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCondition {
    /// `u(a) = value`
    Dirichlet(C64),
    /// `u'(a) = value`
    Neumann(C64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Source {
    Zero,
    /// Adds `value · v(x)` to the right-hand side, `a ≤ x ≤ 0`.
    PointLoad {
        x: f64,
        value: C64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exterior {
    Hardy {
        kappa0: C64,
        n: usize,
    },
    /// The exact outgoing condition `−iκ` on the trace DOF. Only meaningful
    /// for source problems at a fixed `κ`.
    ExactDtn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval1DProblem {
    /// Left end of the interior `[a, 0]`.
    pub a: f64,
    pub elements: usize,
    pub order: usize,
    /// One value for all elements, or one per element.
    pub eps: Vec<f64>,
    pub left: BoundaryCondition,
    pub kappa: C64,
    pub exterior: Exterior,
    pub source: Source,
}

impl Interval1DProblem {
    /// Unit permittivity, homogeneous Dirichlet data and no source.
    pub fn new(a: f64, elements: usize, order: usize, kappa: C64, exterior: Exterior) -> Self {
        Self {
            a,
            elements,
            order,
            eps: vec![1.0],
            left: BoundaryCondition::Dirichlet(C64::new(0.0, 0.0)),
            kappa,
            exterior,
            source: Source::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < 0.0) || !self.a.is_finite() {
            return Err(Error::Invalid("the interior interval [a, 0] needs a < 0"));
        }
        if self.elements == 0 {
            return Err(Error::Invalid("empty mesh"));
        }
        if self.order == 0 {
            return Err(Error::Invalid("polynomial order must be at least 1"));
        }
        if self.eps.len() != 1 && self.eps.len() != self.elements {
            return Err(Error::Invalid("eps needs one value or one per element"));
        }
        if self.eps.iter().any(|e| !e.is_finite()) || !self.kappa.re.is_finite() || !self.kappa.im.is_finite() {
            return Err(Error::Invalid("non-finite problem data"));
        }
        if let Source::PointLoad { x, .. } = self.source {
            if !(self.a <= x && x <= 0.0) {
                return Err(Error::Invalid("point load outside [a, 0]"));
            }
        }
        if let Exterior::Hardy { kappa0, .. } = self.exterior {
            MoebiusParams::new(kappa0)?;
        }
        Ok(())
    }

    fn eps_of(&self, e: usize) -> f64 {
        if self.eps.len() == 1 {
            self.eps[0]
        } else {
            self.eps[e]
        }
    }

    fn h(&self) -> f64 {
        -self.a / self.elements as f64
    }
}

/// Global numbering: vertices left to right, then element bubbles, then
/// the Hardy DOFs `0..=N`. The vertex at `x = 0` doubles as `Ψ₋₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DofMap {
    pub elements: usize,
    pub order: usize,
    pub hardy_len: usize,
}

impl DofMap {
    pub fn vertex(&self, i: usize) -> usize {
        i
    }

    /// Bubble `k ∈ 2..=order` of element `e`.
    pub fn bubble(&self, e: usize, k: usize) -> usize {
        self.elements + 1 + e * (self.order - 1) + (k - 2)
    }

    pub fn hardy_offset(&self) -> usize {
        self.elements + 1 + self.elements * (self.order - 1)
    }

    /// Hardy coefficient `k ∈ 0..=N`.
    pub fn hardy(&self, k: usize) -> usize {
        self.hardy_offset() + k
    }

    pub fn len(&self) -> usize {
        self.hardy_offset() + self.hardy_len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn left(&self) -> usize {
        0
    }

    /// Trace DOF at `x = 0`.
    pub fn trace(&self) -> usize {
        self.elements
    }

    /// Local shape function `i` of element `e` → global DOF.
    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let mut d = vec![e, e + 1];
        d.extend((2..=self.order).map(|k| self.bubble(e, k)));
        d
    }

    /// Radial index `k ∈ 0..N+2` (`k = 0` is `Ψ₋₁`) → global DOF.
    pub fn radial(&self, k: usize) -> usize {
        if k == 0 {
            self.trace()
        } else {
            self.hardy(k - 1)
        }
    }
}

/// Shape functions on `[−1, 1]`: the two hat functions, then
/// `(Pₖ − Pₖ₋₂)/(2k − 1)` for `k ≥ 2`. Returns values and `t`-derivatives.
pub fn shape_functions(order: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let p = legendre_values(order.max(1), t);
    let mut v = vec![0.5 * (1.0 - t), 0.5 * (1.0 + t)];
    let mut d = vec![-0.5, 0.5];
    for k in 2..=order {
        v.push((p[k] - p[k - 2]) / (2 * k - 1) as f64);
        d.push(p[k - 1]);
    }
    (v, d)
}

#[derive(Clone, Debug)]
pub struct Assembled1D {
    /// Interior stiffness plus `B(ψ, ψ)`.
    pub stiffness: CMatrix,
    /// Interior `ε`-mass plus `B(Ψ, Ψ)`.
    pub mass: CMatrix,
    /// `stiffness − κ² mass`, plus `−iκ` on the trace for the exact exterior.
    pub matrix: CMatrix,
    pub rhs: Vec<C64>,
    pub dofs: DofMap,
    /// DOF fixed by a Dirichlet condition and its value.
    pub dirichlet: Option<(usize, C64)>,
}

pub fn assemble_1d(problem: &Interval1DProblem) -> Result<Assembled1D> {
    problem.validate()?;
    let hardy_len = match problem.exterior {
        Exterior::Hardy { n, .. } => n + 1,
        Exterior::ExactDtn => 0,
    };
    let dofs = DofMap { elements: problem.elements, order: problem.order, hardy_len };
    let n = dofs.len();
    let mut s = CMatrix::zeros(n, n);
    let mut m = CMatrix::zeros(n, n);
    let mut rhs = vec![C64::new(0.0, 0.0); n];

    let p = problem.order;
    let (gx, gw) = gauss_legendre(2 * p + 2);
    let tables: Vec<(Vec<f64>, Vec<f64>)> = gx.iter().map(|&t| shape_functions(p, t)).collect();
    let mut ke = vec![vec![0.0; p + 1]; p + 1];
    let mut me = vec![vec![0.0; p + 1]; p + 1];
    for ((v, d), w) in tables.iter().zip(&gw) {
        for i in 0..=p {
            for j in 0..=p {
                ke[i][j] += w * d[i] * d[j];
                me[i][j] += w * v[i] * v[j];
            }
        }
    }
    let h = problem.h();
    for e in 0..problem.elements {
        let map = dofs.element_dofs(e);
        let eps = problem.eps_of(e);
        for (i, &gi) in map.iter().enumerate() {
            for (j, &gj) in map.iter().enumerate() {
                s[(gi, gj)] += c64(2.0 / h * ke[i][j], 0.0);
                m[(gi, gj)] += c64(0.5 * h * eps * me[i][j], 0.0);
            }
        }
    }

    if let Exterior::Hardy { kappa0, n: hn } = problem.exterior {
        let params = MoebiusParams::new(kappa0)?;
        let sh = radial_form_matrix(hn, &params, RadialFamily::PsiPrime, 0, 0)?.entries;
        let mh = radial_form_matrix(hn, &params, RadialFamily::Psi, 0, 0)?.entries;
        for j in 0..hn + 2 {
            for k in 0..hn + 2 {
                s[(dofs.radial(j), dofs.radial(k))] += sh[(j, k)];
                m[(dofs.radial(j), dofs.radial(k))] += mh[(j, k)];
            }
        }
    }

    let kappa = problem.kappa;
    let mut matrix = s.add_scaled(&m, -kappa * kappa);
    if problem.exterior == Exterior::ExactDtn {
        matrix[(dofs.trace(), dofs.trace())] += -c64(0.0, 1.0) * kappa;
    }

    let dirichlet = match problem.left {
        BoundaryCondition::Dirichlet(g) => Some((dofs.left(), g)),
        BoundaryCondition::Neumann(h) => {
            rhs[dofs.left()] -= h;
            None
        }
    };
    if let Source::PointLoad { x, value } = problem.source {
        let e = (((x - problem.a) / h).floor() as usize).min(problem.elements - 1);
        let t = 2.0 * (x - (problem.a + e as f64 * h)) / h - 1.0;
        let (v, _) = shape_functions(p, t);
        for (i, gi) in dofs.element_dofs(e).into_iter().enumerate() {
            rhs[gi] += value * v[i];
        }
    }
    Ok(Assembled1D { stiffness: s, mass: m, matrix, rhs, dofs, dirichlet })
}

/// Solves the assembled system, eliminating a Dirichlet DOF if present.
/// Returns the full coefficient vector.
pub fn solve_1d(sys: &Assembled1D) -> Result<Vec<C64>> {
    let n = sys.dofs.len();
    match sys.dirichlet {
        None => LuFactor::new(&sys.matrix).map(|lu| lu.solve(&sys.rhs)),
        Some((d, g)) => {
            let free: Vec<usize> = (0..n).filter(|&i| i != d).collect();
            let a = sys.matrix.select(&free, &free);
            let b: Vec<C64> = free.iter().map(|&i| sys.rhs[i] - sys.matrix[(i, d)] * g).collect();
            let x = LuFactor::new(&a)?.solve(&b);
            let mut out = vec![C64::new(0.0, 0.0); n];
            out[d] = g;
            for (&i, v) in free.iter().zip(x) {
                out[i] = v;
            }
            Ok(out)
        }
    }
}

/// Finite-element field value and `x`-derivative at `x ∈ [a, 0]`.
pub fn evaluate_1d(problem: &Interval1DProblem, dofs: &DofMap, coeffs: &[C64], x: f64) -> (C64, C64) {
    let h = problem.h();
    let e = (((x - problem.a) / h).floor().max(0.0) as usize).min(problem.elements - 1);
    let t = 2.0 * (x - (problem.a + e as f64 * h)) / h - 1.0;
    let (v, d) = shape_functions(problem.order, t);
    let mut u = C64::new(0.0, 0.0);
    let mut du = C64::new(0.0, 0.0);
    for (i, gi) in dofs.element_dofs(e).into_iter().enumerate() {
        u += coeffs[gi] * v[i];
        du += coeffs[gi] * (d[i] * 2.0 / h);
    }
    (u, du)
}

#[derive(Clone, Debug)]
pub struct ScatteringReport {
    pub coefficients: Vec<C64>,
    pub dofs: DofMap,
    /// `‖u_h − e^{iκx}‖` in `L²(a, 0)`.
    pub l2_error: f64,
    /// `‖(u_h − e^{iκx})′‖` in `L²(a, 0)`.
    pub h1_error: f64,
    /// Euclidean norm of the last two Hardy coefficients (zero for the exact exterior).
    pub hardy_tail: f64,
    /// `u_h(0)`, the shared trace / `Ψ₋₁` coefficient.
    pub trace: C64,
}

/// Scattering with Dirichlet data `e^{iκa}` chosen so that `e^{iκx}` is the
/// exact solution. Requires `ε ≡ 1` and no source.
pub fn solve_scattering_1d(problem: &Interval1DProblem) -> Result<ScatteringReport> {
    if !(problem.kappa.re > 0.0) {
        return Err(Error::Invalid("scattering needs Re kappa > 0"));
    }
    if problem.eps.iter().any(|&e| e != 1.0) || problem.source != Source::Zero {
        return Err(Error::Invalid("the analytic reference needs eps = 1 and no source"));
    }
    let i = c64(0.0, 1.0);
    let kappa = problem.kappa;
    let mut pb = problem.clone();
    pb.left = BoundaryCondition::Dirichlet((i * kappa * problem.a).exp());
    let sys = assemble_1d(&pb)?;
    let u = solve_1d(&sys)?;

    let h = pb.h();
    let (gx, gw) = gauss_legendre(pb.order + 8);
    let (mut l2, mut h1) = (0.0, 0.0);
    for e in 0..pb.elements {
        let x0 = pb.a + e as f64 * h;
        for (t, w) in gx.iter().zip(&gw) {
            let x = x0 + 0.5 * h * (t + 1.0);
            let (uh, duh) = evaluate_1d(&pb, &sys.dofs, &u, x);
            let ex = (i * kappa * x).exp();
            l2 += 0.5 * h * w * (uh - ex).norm_sqr();
            h1 += 0.5 * h * w * (duh - i * kappa * ex).norm_sqr();
        }
    }
    let hl = sys.dofs.hardy_len;
    let tail = if hl == 0 { 0.0 } else { norm2(&u[sys.dofs.hardy(hl.saturating_sub(2))..sys.dofs.len()]) };
    Ok(ScatteringReport {
        trace: u[sys.dofs.trace()],
        coefficients: u,
        dofs: sys.dofs,
        l2_error: l2.sqrt(),
        h1_error: h1.sqrt(),
        hardy_tail: tail,
    })
}

/// Hardy approximation of the exterior Dirichlet-to-Neumann contribution:
/// the Schur complement of `S^H − κ² M^H` onto `Ψ₋₁`. Tends to `−iκ`.
pub fn dtn_1d(kappa: C64, kappa0: C64, n: usize) -> Result<C64> {
    if !(kappa.re > 0.0) {
        return Err(Error::Invalid("dtn needs Re kappa > 0"));
    }
    let params = MoebiusParams::new(kappa0)?;
    let sh = radial_form_matrix(n, &params, RadialFamily::PsiPrime, 0, 0)?.entries;
    let mh = radial_form_matrix(n, &params, RadialFamily::Psi, 0, 0)?.entries;
    let a = sh.add_scaled(&mh, -kappa * kappa);
    let rest: Vec<usize> = (1..n + 2).collect();
    let lu = LuFactor::new(&a.select(&rest, &rest))?;
    let col: Vec<C64> = rest.iter().map(|&r| a[(r, 0)]).collect();
    let y = lu.solve(&col);
    let corr: C64 = rest.iter().zip(&y).map(|(&r, v)| a[(0, r)] * v).sum();
    Ok(a[(0, 0)] - corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use proptest::prelude::*;

    fn hardy(kappa0: C64, n: usize) -> Exterior {
        Exterior::Hardy { kappa0, n }
    }

    #[test]
    fn shape_functions_vanish_at_ends() {
        for &t in &[-1.0, 1.0] {
            let (v, _) = shape_functions(6, t);
            for k in 2..=6 {
                assert!(v[k].abs() < 1e-15);
            }
        }
        // derivatives by central differences
        let (_, d) = shape_functions(5, 0.3);
        let (vp, _) = shape_functions(5, 0.3 + 1e-6);
        let (vm, _) = shape_functions(5, 0.3 - 1e-6);
        for k in 0..=5 {
            assert!((d[k] - (vp[k] - vm[k]) / 2e-6).abs() < 1e-8);
        }
    }

    #[test]
    fn exterior_block_at_n0() {
        let k0 = c64(1.3, 0.4);
        let p = MoebiusParams::new(k0).unwrap();
        let sh = radial_form_matrix(0, &p, RadialFamily::PsiPrime, 0, 0).unwrap().entries;
        let mh = radial_form_matrix(0, &p, RadialFamily::Psi, 0, 0).unwrap().entries;
        let f = -c64(0.0, 0.5) * k0;
        let g = c64(0.0, 0.5) / k0;
        let sx = [[f, f], [f, f * 2.0]];
        let mx = [[g, -g], [-g, g * 2.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((sh[(r, c)] - sx[r][c]).norm() < 1e-14);
                assert!((mh[(r, c)] - mx[r][c]).norm() < 1e-14);
            }
        }
        let a = sh.add_scaled(&mh, -k0 * k0);
        assert!((a[(0, 0)] - f * 2.0).norm() < 1e-14);
        assert!((a[(1, 1)] - f * 4.0).norm() < 1e-14);
        assert!(a[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn dtn_exact_at_kappa0() {
        for &k in &[1.0, 2.0, 5.0] {
            for n in 0..=20 {
                let d = dtn_1d(c64(k, 0.0), c64(k, 0.0), n).unwrap();
                assert!((d + c64(0.0, k)).norm() < 1e-12, "kappa {k}, N {n}: {d}");
            }
        }
    }

    #[test]
    fn dtn_converges_at_predicted_rate() {
        // The error contracts by about |(κ − κ₀)/(κ + κ₀)|² per added DOF.
        let (k, k0) = (c64(2.0, 0.0), c64(1.0, 0.0));
        let e: Vec<f64> = (0..12).map(|n| (dtn_1d(k, k0, n).unwrap() + c64(0.0, 1.0) * k).norm()).collect();
        for w in e.windows(2) {
            let r = w[1] / w[0];
            assert!(r > 0.05 && r < 0.2, "ratio {r}");
        }
        assert!((dtn_1d(k, k0, 20).unwrap() + c64(0.0, 2.0)).norm() < 1e-8);
    }

    #[test]
    fn dtn_rejects_bad_input() {
        assert!(dtn_1d(c64(-1.0, 0.0), c64(1.0, 0.0), 3).is_err());
        assert!(dtn_1d(c64(1.0, 0.0), c64(-1.0, 0.0), 3).is_err());
    }

    #[test]
    fn validation() {
        let good = Interval1DProblem::new(-1.0, 2, 3, c64(1.0, 0.0), hardy(c64(1.0, 0.0), 4));
        assert!(good.validate().is_ok());
        let mut bad = good.clone();
        bad.a = 0.5;
        assert!(assemble_1d(&bad).is_err());
        let mut bad = good.clone();
        bad.elements = 0;
        assert!(assemble_1d(&bad).is_err());
        let mut bad = good.clone();
        bad.order = 0;
        assert!(assemble_1d(&bad).is_err());
        let mut bad = good.clone();
        bad.eps = vec![1.0, 2.0, 3.0];
        assert!(assemble_1d(&bad).is_err());
        let mut bad = good;
        bad.kappa = c64(-1.0, 0.0);
        assert!(solve_scattering_1d(&bad).is_err());
    }

    #[test]
    fn interior_mass_and_stiffness_integrate_polynomials() {
        // Constant and linear fields: ∫1 = |a|, ∫(u′)² for u = x is |a|.
        let pb = Interval1DProblem::new(-2.0, 3, 4, c64(1.0, 0.0), Exterior::ExactDtn);
        let sys = assemble_1d(&pb).unwrap();
        let n = sys.dofs.len();
        let ones = vec![c64(1.0, 0.0); n];
        let mut ones_v = vec![C64::new(0.0, 0.0); n];
        let mut lin = vec![C64::new(0.0, 0.0); n];
        for i in 0..=3 {
            ones_v[i] = ones[i];
            lin[i] = c64(-2.0 + 2.0 * i as f64 / 3.0, 0.0);
        }
        assert!((sys.mass.bilinear(&ones_v, &ones_v) - c64(2.0, 0.0)).norm() < 1e-13);
        assert!((sys.stiffness.bilinear(&lin, &lin) - c64(2.0, 0.0)).norm() < 1e-13);
        // ∫ x² = 8/3
        assert!((sys.mass.bilinear(&lin, &lin) - c64(8.0 / 3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn global_matrix_is_complex_symmetric() {
        let mut pb = Interval1DProblem::new(-1.5, 3, 5, c64(1.7, 0.0), hardy(c64(2.0, -0.5), 6));
        pb.eps = vec![1.0, 3.0, 2.0];
        let sys = assemble_1d(&pb).unwrap();
        assert!(sys.matrix.symmetry_defect() < 1e-14 * sys.matrix.max_abs());
    }

    #[test]
    fn exterior_exact_at_kappa0() {
        let k = c64(3.0, 0.0);
        let exact = solve_scattering_1d(&Interval1DProblem::new(-1.0, 1, 12, k, Exterior::ExactDtn)).unwrap();
        let hardy = solve_scattering_1d(&Interval1DProblem::new(-1.0, 1, 12, k, hardy(k, 6))).unwrap();
        assert!(hardy.l2_error <= exact.l2_error * (1.0 + 1e-6) + 1e-14);
        assert!(hardy.l2_error < 1e-6);
        assert!(hardy.hardy_tail < 1e-10);
    }

    #[test]
    fn trace_is_shared() {
        let k = c64(2.0, 0.0);
        let pb = Interval1DProblem::new(-1.0, 2, 6, k, hardy(c64(1.0, 0.0), 8));
        let r = solve_scattering_1d(&pb).unwrap();
        let (u0, _) = evaluate_1d(&pb, &r.dofs, &r.coefficients, 0.0);
        assert_eq!(u0, r.trace);
        assert_eq!(r.coefficients[r.dofs.radial(0)], r.trace);
    }

    #[test]
    fn error_decreases_with_n_until_interior_floor() {
        let k = c64(2.0, 0.0);
        let floor = solve_scattering_1d(&Interval1DProblem::new(-1.0, 2, 12, k, Exterior::ExactDtn)).unwrap().l2_error;
        let errs: Vec<f64> = (0..22)
            .map(|n| solve_scattering_1d(&Interval1DProblem::new(-1.0, 2, 12, k, hardy(c64(1.0, 0.0), n))).unwrap().l2_error)
            .collect();
        for w in errs.windows(2) {
            if w[0] > 10.0 * floor {
                assert!(w[1] < w[0], "{errs:?}");
            }
        }
        assert!(errs.last().unwrap() < &(10.0 * floor), "{errs:?} floor {floor}");
    }

    #[test]
    fn exact_dtn_gives_standard_fem_rates() {
        let k = c64(4.0, 0.0);
        for p in 1..=3usize {
            let run = |e: usize| solve_scattering_1d(&Interval1DProblem::new(-1.0, e, p, k, Exterior::ExactDtn)).unwrap();
            let (a, b) = (run(16), run(32));
            let rate_l2 = (a.l2_error / b.l2_error).log2();
            let rate_h1 = (a.h1_error / b.h1_error).log2();
            assert!((rate_l2 - (p + 1) as f64).abs() < 0.25, "p {p}: L2 rate {rate_l2}");
            assert!((rate_h1 - p as f64).abs() < 0.25, "p {p}: H1 rate {rate_h1}");
        }
    }

    #[test]
    fn neumann_and_point_load() {
        // u'' + κ²u = 0 on [a, 0] with u'(a) = h and outgoing at 0 has
        // u = c e^{iκx}, c = h / (iκ e^{iκa}).
        let k = c64(1.5, 0.0);
        let a = -1.0;
        let hval = c64(0.3, -0.2);
        let mut pb = Interval1DProblem::new(a, 2, 10, k, Exterior::ExactDtn);
        pb.left = BoundaryCondition::Neumann(hval);
        let sys = assemble_1d(&pb).unwrap();
        let u = solve_1d(&sys).unwrap();
        let i = c64(0.0, 1.0);
        let c = hval / (i * k * (i * k * a).exp());
        for &x in &[-1.0, -0.4, 0.0] {
            let (uh, _) = evaluate_1d(&pb, &sys.dofs, &u, x);
            assert!((uh - c * (i * k * x).exp()).norm() < 1e-9);
        }
        // A unit point load at x₀ with u(a) = 0: jump of −1 in u′ at x₀.
        let mut pb = Interval1DProblem::new(a, 4, 8, k, Exterior::ExactDtn);
        pb.source = Source::PointLoad { x: -0.5, value: c64(1.0, 0.0) };
        let sys = assemble_1d(&pb).unwrap();
        let u = solve_1d(&sys).unwrap();
        let (_, dl) = evaluate_1d(&pb, &sys.dofs, &u, -0.5 - 1e-12);
        let (_, dr) = evaluate_1d(&pb, &sys.dofs, &u, -0.5 + 1e-12);
        assert!((dr - dl + c64(1.0, 0.0)).norm() < 1e-8, "jump {}", dr - dl);
    }

    #[test]
    fn gauss_rule_used_is_exact_for_products() {
        let (x, w) = gauss_legendre(8);
        let (v, _) = shape_functions(7, 0.0);
        assert_eq!(v.len(), 8);
        let s: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn dof_permutation_invariance(seed in 0u64..1000, e in 1usize..4, p in 1usize..5, n in 0usize..6) {
            let pb = Interval1DProblem::new(-1.0, e, p, c64(1.3, 0.0), hardy(c64(1.0, -0.3), n));
            let sys = assemble_1d(&pb).unwrap();
            let dim = sys.dofs.len();
            // Deterministic shuffle from the seed.
            let mut perm: Vec<usize> = (0..dim).collect();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            for i in (1..dim).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                perm.swap(i, j);
            }
            let mut rhs = vec![C64::new(0.0, 0.0); dim];
            rhs[sys.dofs.trace()] = c64(1.0, 0.5);
            rhs[0] = c64(-0.2, 0.0);
            let x = LuFactor::new(&sys.matrix).unwrap().solve(&rhs);
            let ap = sys.matrix.select(&perm, &perm);
            let bp: Vec<C64> = perm.iter().map(|&i| rhs[i]).collect();
            let xp = LuFactor::new(&ap).unwrap().solve(&bp);
            for (k, &i) in perm.iter().enumerate() {
                prop_assert!((xp[k] - x[i]).norm() < 1e-12 * (1.0 + norm2(&x)));
            }
        }

        #[test]
        fn dtn_exact_for_any_kappa0(re in 0.2f64..6.0, im in -2.0f64..2.0, n in 0usize..12) {
            let k = c64(re, im);
            let d = dtn_1d(k, k, n).unwrap();
            prop_assert!((d + c64(0.0, 1.0) * k).norm() < 1e-12 * (1.0 + k.norm()));
        }
    }
}
