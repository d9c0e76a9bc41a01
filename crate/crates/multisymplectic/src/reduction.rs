//! Quotients by kernel directions in kernel-adapted coordinates: reduced
//! charts and forms, projectability certificates, section transport, and the
//! slice-dependent weak quotient.
//!
//! Quotients drop fiber *coordinate* directions. Models whose kernel is not
//! coordinate-aligned supply a constant linear change of fiber coordinates
//! first (see the metric-affine model's trace coordinates).

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{
    exterior_derivative_fd, interior, pullback_linear, FiberedChart, FormField, VectorValue,
};
use crate::kernels;
use crate::sections::{self, Section};
use crate::system::PremultisymplecticSystem;

/// Coordinate-forgetting quotient data: which fiber coordinates are dropped
/// and the slice values the section `β` assigns to them.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientChart {
    parent: FiberedChart,
    dropped: Vec<usize>,
    beta: Vec<f64>,
    reduced: FiberedChart,
}

impl QuotientChart {
    /// Panics unless the dropped indices are fiber coordinates, sorted and
    /// distinct; `beta` holds one slice value per dropped coordinate.
    pub fn new(parent: FiberedChart, dropped: Vec<usize>, beta: Vec<f64>) -> Self {
        assert_eq!(
            dropped.len(),
            beta.len(),
            "one β value per dropped coordinate"
        );
        assert!(
            dropped.windows(2).all(|w| w[0] < w[1]),
            "dropped indices must be sorted"
        );
        assert!(
            dropped.iter().all(|&i| parent.is_vertical_index(i)),
            "only fiber coordinates can be dropped"
        );
        let keep: Vec<usize> = (0..parent.dim()).filter(|i| !dropped.contains(i)).collect();
        let names: Vec<String> = keep.iter().map(|&i| parent.name(i).to_string()).collect();
        let mut reduced =
            FiberedChart::new(parent.base_dim(), names.len() - parent.base_dim(), names);
        if let Some(jet) = parent.jet() {
            // keep only pairings fully inside the reduced chart, reindexed
            let reindex = |i: usize| keep.iter().position(|&k| k == i);
            let pairings = jet
                .pairings
                .iter()
                .filter_map(|p| {
                    Some(crate::exterior::JetPairing {
                        velocity: reindex(p.velocity)?,
                        field: reindex(p.field)?,
                        base: p.base,
                    })
                })
                .collect();
            reduced = reduced.with_jet(crate::exterior::JetChartMeta::new(pairings));
        }
        QuotientChart {
            parent,
            dropped,
            beta,
            reduced,
        }
    }

    pub fn parent(&self) -> &FiberedChart {
        &self.parent
    }

    pub fn reduced_chart(&self) -> &FiberedChart {
        &self.reduced
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn with_beta(&self, beta: Vec<f64>) -> Self {
        QuotientChart::new(self.parent.clone(), self.dropped.clone(), beta)
    }

    /// `ξ`: forget the dropped coordinates.
    pub fn forget(&self, parent_point: &[f64]) -> Vec<f64> {
        (0..self.parent.dim())
            .filter(|i| !self.dropped.contains(i))
            .map(|i| parent_point[i])
            .collect()
    }

    /// `β`: complete a reduced point with the slice values.
    pub fn complete(&self, reduced_point: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parent.dim());
        let mut cursor = 0usize;
        for i in 0..self.parent.dim() {
            if let Some(pos) = self.dropped.iter().position(|&d| d == i) {
                out.push(self.beta[pos]);
            } else {
                out.push(reduced_point[cursor]);
                cursor += 1;
            }
        }
        out
    }

    /// Jacobian of `β`: the slice injection, `parent.dim() × reduced.dim()`.
    pub fn beta_jacobian(&self) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.parent.dim(), self.reduced.dim());
        let mut cursor = 0usize;
        for i in 0..self.parent.dim() {
            if !self.dropped.contains(&i) {
                jac[(i, cursor)] = 1.0;
                cursor += 1;
            }
        }
        jac
    }

    /// Jacobian of `ξ`: the selection map, `reduced.dim() × parent.dim()`.
    pub fn xi_jacobian(&self) -> DMatrix<f64> {
        self.beta_jacobian().transpose()
    }
}

/// Numeric evidence recorded while building a quotient.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientCertificate {
    /// Worst `‖i(∂_dropped)Ω‖∞` over points and dropped directions.
    pub kernel_residual: f64,
    /// Worst FD directional derivative of the coefficients along a dropped
    /// direction (strong quotients only).
    pub invariance_residual: f64,
    /// Worst coefficient difference between the configured slice and a
    /// shifted slice. Asserted small for strong quotients; reported as the
    /// slice dependence for weak quotients.
    pub slice_dependence: f64,
    pub weak: bool,
}

/// A quotient chart together with the reduced form `Ω_K = β*Ω`.
#[derive(Clone)]
pub struct ReducedSystem {
    pub quotient: QuotientChart,
    pub system: PremultisymplecticSystem,
    pub certificate: QuotientCertificate,
}

fn reduced_field(parent: &PremultisymplecticSystem, quotient: &QuotientChart) -> FormField {
    let omega = parent.omega().clone();
    let q = quotient.clone();
    let jac = quotient.beta_jacobian();
    FormField::new(
        quotient.reduced_chart().clone(),
        omega.degree(),
        move |p_red| {
            let p = q.complete(p_red);
            pullback_linear(&jac, &omega.at(&p))
        },
    )
}

fn slice_offsets(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51CE);
    (0..n).map(|_| rng.gen_range(0.25..1.25)).collect()
}

/// Quotient by kernel-adapted coordinate directions.
///
/// Preconditions checked at every sampled point: each dropped direction lies
/// in the kernel of `Ω`, and every coefficient of `Ω` is invariant along the
/// dropped directions (FD). The certificate also compares the configured
/// slice against a shifted slice.
pub fn build_quotient(
    system: &PremultisymplecticSystem,
    dropped: &[usize],
    beta: &[f64],
    points: &[Vec<f64>],
    h: f64,
    tol: f64,
) -> Result<ReducedSystem> {
    let quotient = QuotientChart::new(system.chart().clone(), dropped.to_vec(), beta.to_vec());
    let dim = system.dim();
    let mut kernel_residual: f64 = 0.0;
    let mut invariance_residual: f64 = 0.0;
    for p in points {
        let omega_p = system.omega().at(p);
        for (slot, &d) in dropped.iter().enumerate() {
            let res = interior(&VectorValue::basis(dim, d), &omega_p).max_norm();
            kernel_residual = kernel_residual.max(res);
            if res > tol {
                return Err(Error::NotInKernel {
                    name: system.chart().name(d).to_string(),
                    residual: res,
                });
            }
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus[d] += h;
            minus[d] -= h;
            let variation = system
                .omega()
                .at(&plus)
                .sub(&system.omega().at(&minus))
                .max_norm()
                / (2.0 * h);
            invariance_residual = invariance_residual.max(variation);
            if variation > tol.max(10.0 * h) {
                let _ = slot;
                return Err(Error::NonProjectable {
                    name: system.chart().name(d).to_string(),
                    residual: variation,
                    tol: tol.max(10.0 * h),
                });
            }
        }
    }

    let slice_dependence = two_slice_difference(system, &quotient, points);
    if slice_dependence > tol.max(100.0 * h * h) {
        return Err(Error::NonProjectable {
            name: format!("slice comparison for {:?}", dropped),
            residual: slice_dependence,
            tol,
        });
    }

    let reduced = PremultisymplecticSystem::new(
        format!("{}/K", system.name()),
        reduced_field(system, &quotient),
    );
    Ok(ReducedSystem {
        quotient,
        system: reduced,
        certificate: QuotientCertificate {
            kernel_residual,
            invariance_residual,
            slice_dependence,
            weak: false,
        },
    })
}

fn two_slice_difference(
    system: &PremultisymplecticSystem,
    quotient: &QuotientChart,
    points: &[Vec<f64>],
) -> f64 {
    let offsets = slice_offsets(quotient.dropped().len());
    let shifted_beta: Vec<f64> = quotient
        .beta()
        .iter()
        .zip(&offsets)
        .map(|(b, o)| b + o)
        .collect();
    let shifted = quotient.with_beta(shifted_beta);
    let f0 = reduced_field(system, quotient);
    let f1 = reduced_field(system, &shifted);
    let mut worst: f64 = 0.0;
    for p in points {
        let red = quotient.forget(p);
        worst = worst.max(f0.at(&red).sub(&f1.at(&red)).max_norm());
    }
    worst
}

/// Closedness (FD) plus 1-nondegeneracy of the reduced form at the images of
/// the sampled parent points.
pub fn check_reduced_multisymplectic(
    reduced: &ReducedSystem,
    parent_points: &[Vec<f64>],
    h: f64,
    tol: f64,
) -> (bool, f64, Option<VectorValue>) {
    let mut worst_d: f64 = 0.0;
    for p in parent_points {
        let red = reduced.quotient.forget(p);
        let d = exterior_derivative_fd(reduced.system.omega(), &red, h);
        worst_d = worst_d.max(d.max_norm());
        let omega_red = reduced.system.omega().at(&red);
        let (nondeg, witness) = kernels::is_1_nondegenerate(&omega_red, crate::linalg::TOL_RANK);
        if !nondeg {
            return (false, worst_d, witness);
        }
    }
    (worst_d <= tol, worst_d, None)
}

/// `ξ∘ψ`: push a parent section down to the reduced chart.
pub fn project_section(section: &Section, quotient: &QuotientChart) -> Section {
    let q = quotient.clone();
    let s = section.clone();
    let m = quotient.reduced_chart().base_dim();
    Section::from_fiber_map(quotient.reduced_chart().clone(), move |x| {
        let full = q.forget(&s.at(x));
        full[m..].to_vec()
    })
}

/// `β∘φ`: complete a reduced section back into the parent chart with the
/// quotient's slice values.
pub fn recover_section(section: &Section, quotient: &QuotientChart) -> Section {
    let q = quotient.clone();
    let s = section.clone();
    let m = quotient.parent().base_dim();
    Section::from_fiber_map(quotient.parent().clone(), move |x| {
        let full = q.complete(&s.at(x));
        full[m..].to_vec()
    })
}

/// Quotient by weak-kernel coordinate directions. The reduced form `Ω_β`
/// depends on the slice: no invariance is required and the certificate only
/// reports the dependence magnitude.
///
/// Every dropped direction must pass the weak-kernel test; the dropped span
/// consists of coordinate directions, so it is involutive by construction.
pub fn weak_quotient(
    system: &PremultisymplecticSystem,
    dropped: &[usize],
    beta: &[f64],
    points: &[Vec<f64>],
    tol: f64,
) -> Result<ReducedSystem> {
    let chart = system.chart();
    let mut kernel_residual: f64 = 0.0;
    for &d in dropped {
        let field = crate::exterior::VectorField::coordinate(chart.clone(), d);
        let (ok, res) = sections::weak_kernel_test(&field, system, points, tol)?;
        kernel_residual = kernel_residual.max(res);
        if !ok {
            return Err(Error::NotWeakKernel {
                name: chart.name(d).to_string(),
                residual: res,
            });
        }
    }
    let quotient = QuotientChart::new(chart.clone(), dropped.to_vec(), beta.to_vec());
    let slice_dependence = two_slice_difference(system, &quotient, points);
    let reduced = PremultisymplecticSystem::new(
        format!("{}/Kw", system.name()),
        reduced_field(system, &quotient),
    );
    Ok(ReducedSystem {
        quotient,
        system: reduced,
        certificate: QuotientCertificate {
            kernel_residual,
            invariance_residual: f64::NAN,
            slice_dependence,
            weak: true,
        },
    })
}
