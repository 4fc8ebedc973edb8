//! Error-versus-parameter sweeps against closed-form references.
//!
//! Each sweep point is independent; [`convergence_point`] computes one and
//! callers may evaluate [`ConvergenceCase::parameters`] in any order or in
//! parallel before collecting with [`ConvergenceTable::from_rows`].

use alloc::vec::Vec;

use super::interval::dtn_1d;
use super::resonance::{leading_hankel_root, resonances_slab, resonances_sphere_mode, slab_reference, ModeProblem, SlabConfig};
use crate::{c64, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvergenceCase {
    /// `dtn_1d(κ, κ₀, N)` against `−iκ` for `N ∈ n_min..=n_max`.
    Dtn { kappa: C64, kappa0: C64, n_min: usize, n_max: usize },
    /// Resonance `m` of the slab against the closed form, sweeping `N`.
    Slab { eps: f64, kappa0: C64, order: usize, elements: usize, m: usize, n_min: usize, n_max: usize },
    /// Resonance `m` of the slab at fixed `N`, sweeping the interior order.
    SlabOrder { eps: f64, kappa0: C64, n: usize, elements: usize, m: usize, order_min: usize, order_max: usize },
    /// Leading resonance of a sphere mode against the Hankel root, sweeping `N`.
    Sphere { degree: usize, kappa0: C64, n_min: usize, n_max: usize },
}

impl ConvergenceCase {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Dtn { .. } => "dtn",
            Self::Slab { .. } => "slab",
            Self::SlabOrder { .. } => "slab-order",
            Self::Sphere { .. } => "sphere",
        }
    }

    /// Sweep values: `N`, or the interior order for [`Self::SlabOrder`].
    pub fn parameters(&self) -> Vec<usize> {
        match *self {
            Self::Dtn { n_min, n_max, .. } | Self::Slab { n_min, n_max, .. } | Self::Sphere { n_min, n_max, .. } => {
                (n_min..=n_max).collect()
            }
            Self::SlabOrder { order_min, order_max, .. } => (order_min..=order_max).collect(),
        }
    }

    pub fn reference(&self) -> Result<C64> {
        match *self {
            Self::Dtn { kappa, .. } => Ok(-c64(0.0, 1.0) * kappa),
            Self::Slab { eps, m, .. } | Self::SlabOrder { eps, m, .. } => Ok(slab_reference(eps, m)),
            Self::Sphere { degree, .. } => leading_hankel_root(degree),
        }
    }

    /// Errors are absolute for the DtN case and relative otherwise.
    pub fn relative(&self) -> bool {
        !matches!(self, Self::Dtn { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub parameter: usize,
    /// Computed value; `NaN` if no admissible eigenpair was found.
    pub value: C64,
    pub reference: C64,
    /// `+∞` if no admissible eigenpair was found.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Errors never increase along the sweep.
    pub monotone: bool,
}

impl ConvergenceTable {
    pub fn from_rows(mut rows: Vec<ConvergenceRow>) -> Self {
        rows.sort_by_key(|r| r.parameter);
        let monotone = non_increasing(rows.iter().map(|r| r.error));
        Self { rows, monotone }
    }

    /// Monotonicity restricted to rows with `parameter ≥ from`.
    pub fn monotone_from(&self, from: usize) -> bool {
        non_increasing(self.rows.iter().filter(|r| r.parameter >= from).map(|r| r.error))
    }

    pub fn last_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.error)
    }
}

fn non_increasing(errors: impl Iterator<Item = f64>) -> bool {
    let mut prev = f64::INFINITY;
    for e in errors {
        if e > prev || e.is_nan() {
            return false;
        }
        prev = e;
    }
    true
}

fn nearest(kappas: &[C64], target: C64) -> Option<C64> {
    kappas.iter().copied().min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
}

pub fn convergence_point(case: &ConvergenceCase, parameter: usize) -> Result<ConvergenceRow> {
    let reference = case.reference()?;
    let value = match *case {
        ConvergenceCase::Dtn { kappa, kappa0, .. } => Some(dtn_1d(kappa, kappa0, parameter)?),
        ConvergenceCase::Slab { eps, kappa0, order, elements, .. } => {
            let mut cfg = SlabConfig::new(eps, kappa0, parameter, order, 1);
            cfg.elements = elements;
            cfg.shift = reference * reference;
            nearest(&resonances_slab(&cfg)?.kappas(), reference)
        }
        ConvergenceCase::SlabOrder { eps, kappa0, n, elements, .. } => {
            let mut cfg = SlabConfig::new(eps, kappa0, n, parameter, 1);
            cfg.elements = elements;
            cfg.shift = reference * reference;
            nearest(&resonances_slab(&cfg)?.kappas(), reference)
        }
        ConvergenceCase::Sphere { degree, kappa0, .. } => {
            let mode = ModeProblem { degree, kappa0, n: parameter };
            nearest(&resonances_sphere_mode(&mode, reference * reference, 1)?.kappas(), reference)
        }
    };
    let scale = if case.relative() { reference.norm() } else { 1.0 };
    Ok(match value {
        Some(v) => ConvergenceRow { parameter, value: v, reference, error: (v - reference).norm() / scale },
        None => ConvergenceRow { parameter, value: C64::new(f64::NAN, f64::NAN), reference, error: f64::INFINITY },
    })
}

/// Sequential sweep.
pub fn convergence_study(case: &ConvergenceCase) -> Result<ConvergenceTable> {
    let rows = case.parameters().into_iter().map(|p| convergence_point(case, p)).collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dtn_sweep() {
        let case = ConvergenceCase::Dtn { kappa: c64(2.0, 0.0), kappa0: c64(1.0, 0.0), n_min: 0, n_max: 20 };
        let t = convergence_study(&case).unwrap();
        assert_eq!(t.rows.len(), 21);
        assert!(t.last_error().unwrap() < 1e-8);
        assert!(t.monotone_from(5));
    }

    #[test]
    fn slab_sweep_reaches_tolerance() {
        let case = ConvergenceCase::Slab { eps: 4.0, kappa0: c64(2.0, 0.0), order: 10, elements: 4, m: 1, n_min: 3, n_max: 15 };
        let t = convergence_study(&case).unwrap();
        assert!(t.last_error().unwrap() < 1e-8, "{:?}", t.rows);
        assert!(t.rows[0].error > t.last_error().unwrap());
    }

    #[test]
    fn slab_order_sweep_decreases() {
        let case = ConvergenceCase::SlabOrder { eps: 4.0, kappa0: c64(2.0, 0.0), n: 20, elements: 1, m: 1, order_min: 4, order_max: 10 };
        let t = convergence_study(&case).unwrap();
        assert!(t.monotone, "{:?}", t.rows);
    }

    #[test]
    fn sphere_sweep() {
        let case = ConvergenceCase::Sphere { degree: 2, kappa0: c64(5.0, -1.0), n_min: 15, n_max: 15 };
        let t = convergence_study(&case).unwrap();
        assert!(t.rows[0].error < 1e-6);
    }

    #[test]
    fn table_flags() {
        let row = |p, e| ConvergenceRow { parameter: p, value: c64(0.0, 0.0), reference: c64(0.0, 0.0), error: e };
        let t = ConvergenceTable::from_rows(vec![row(2, 0.5), row(0, 1.0), row(1, 2.0)]);
        assert_eq!(t.rows[0].parameter, 0);
        assert!(!t.monotone);
        assert!(t.monotone_from(1));
        assert!(ConvergenceTable::from_rows(vec![row(0, f64::INFINITY), row(1, 1.0)]).monotone);
    }
}
