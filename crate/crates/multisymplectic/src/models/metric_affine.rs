//! Metric-affine gravity in the covariant Hamiltonian picture: the chart
//! carries the metric components `g_{αβ}` (10 symmetric slots) and an
//! independent connection `Γ^α_{βγ}` (64 slots) over a 4-dimensional base.
//!
//! `Ω_H = dH ∧ d⁴x − dΠ^μ_α{}^{βγ} ∧ dΓ^α_{βγ} ∧ d³x_μ` with
//! `H = √|det g|·g^{αβ}(Γ^γ_{βσ}Γ^σ_{γα} − Γ^γ_{βα}Γ^σ_{σγ})` and momenta
//! `Π = √|det g|(δ^μ_α g^{βγ} − δ^β_α g^{μγ})`; both exterior derivatives
//! are expanded analytically, chain-ruling through the inverse metric.
//!
//! Solutions live on the constraint locus where the trace-adjusted torsion
//! `t^α_{βγ} = T^α_{βγ} − (δ^α_β τ_γ − δ^α_γ τ_β)/3` vanishes (torsion is
//! pure trace). The kernel directions tangent to the locus are the four
//! trace fields `Y_β = δ^α_γ ∂/∂Γ^α_{βγ}`; the trace coordinates
//! `c_β = ¼ Σ_α Γ^α_{βα}` make them coordinate directions, which is what the
//! quotient machinery needs.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::exterior::{
    pullback_linear, FiberedChart, FormField, FormValue, VectorField, VectorValue,
};
use crate::models::{closedness_fact, Fact, ModelSpec};
use crate::reduction;
use crate::report::Verdict;
use crate::sections::{self, Section};
use crate::solutions::{self, Distribution};
use crate::system::{PremultisymplecticSystem, RunConfig};

pub const DIM: usize = 78;

/// Symmetric metric slots in lexicographic order (α ≤ β).
pub const G_SLOTS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

#[derive(Debug, Clone, Copy)]
pub struct Indexing;

impl Indexing {
    pub fn base(mu: usize) -> usize {
        mu
    }

    pub fn g_slot(slot: usize) -> usize {
        4 + slot
    }

    pub fn slot_of(alpha: usize, beta: usize) -> usize {
        let (a, b) = if alpha <= beta {
            (alpha, beta)
        } else {
            (beta, alpha)
        };
        G_SLOTS.iter().position(|&p| p == (a, b)).expect("slot")
    }

    pub fn gamma(a: usize, b: usize, c: usize) -> usize {
        14 + 16 * a + 4 * b + c
    }
}

pub fn chart() -> FiberedChart {
    let mut names: Vec<String> = (0..4).map(|m| format!("x{m}")).collect();
    for (a, b) in G_SLOTS {
        names.push(format!("g{a}{b}"));
    }
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                names.push(format!("Gam{a}_{b}{c}"));
            }
        }
    }
    FiberedChart::new(4, 74, names)
}

/// Point data unpacked into tensors.
pub fn unpack(p: &[f64]) -> ([[f64; 4]; 4], [[[f64; 4]; 4]; 4]) {
    let mut g = [[0.0; 4]; 4];
    for (slot, &(a, b)) in G_SLOTS.iter().enumerate() {
        g[a][b] = p[Indexing::g_slot(slot)];
        g[b][a] = p[Indexing::g_slot(slot)];
    }
    let mut gam = [[[0.0; 4]; 4]; 4];
    for (a, row) in gam.iter_mut().enumerate() {
        for (b, col) in row.iter_mut().enumerate() {
            for (c, v) in col.iter_mut().enumerate() {
                *v = p[Indexing::gamma(a, b, c)];
            }
        }
    }
    (g, gam)
}

struct MetricData {
    sqrt_det: f64,
    inv: [[f64; 4]; 4],
    /// d√|det g| per slot; off-diagonal slots move both matrix entries.
    d_sqrt_det: [f64; 10],
    /// d g^{βγ} per slot.
    d_inv: [[[f64; 4]; 4]; 10],
}

fn metric_data(g: &[[f64; 4]; 4]) -> MetricData {
    let gm = DMatrix::from_fn(4, 4, |i, j| g[i][j]);
    let det = gm.determinant();
    assert!(det.abs() > 1e-10, "degenerate metric at a sample point");
    let inv_m = gm.try_inverse().expect("invertible metric");
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = inv_m[(i, j)];
        }
    }
    let sqrt_det = det.abs().sqrt();
    let mut d_sqrt_det = [0.0; 10];
    let mut d_inv = [[[0.0; 4]; 4]; 10];
    for (slot, &(r, s)) in G_SLOTS.iter().enumerate() {
        let double = if r == s { 1.0 } else { 2.0 };
        d_sqrt_det[slot] = 0.5 * sqrt_det * double * inv[r][s];
        for (b, row) in d_inv[slot].iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = if r == s {
                    -inv[b][r] * inv[r][c]
                } else {
                    -(inv[b][r] * inv[s][c] + inv[b][s] * inv[r][c])
                };
            }
        }
    }
    MetricData {
        sqrt_det,
        inv,
        d_sqrt_det,
        d_inv,
    }
}

fn kronecker(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

pub fn omega_at(p: &[f64]) -> FormValue {
    let (g, gam) = unpack(p);
    let md = metric_data(&g);
    let mut w = FormValue::zero(DIM, 5);

    // trace over the first index pair: Σ_σ Γ^σ_{σc}
    let mut tr1 = [0.0; 4];
    for c in 0..4 {
        for s in 0..4 {
            tr1[c] += gam[s][s][c];
        }
    }
    // Q_{ba} = Γ^γ_{bσ}Γ^σ_{γa} − Γ^γ_{ba}·tr1_γ
    let mut q = [[0.0; 4]; 4];
    for b in 0..4 {
        for a in 0..4 {
            for gm in 0..4 {
                for s in 0..4 {
                    q[b][a] += gam[gm][b][s] * gam[s][gm][a];
                }
                q[b][a] -= gam[gm][b][a] * tr1[gm];
            }
        }
    }
    let contraction: f64 = (0..4)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .map(|(a, b)| md.inv[a][b] * q[b][a])
        .sum();

    // dH ∧ d⁴x: metric slots then connection slots
    for slot in 0..10 {
        let mut dh = md.d_sqrt_det[slot] * contraction;
        for a in 0..4 {
            for b in 0..4 {
                dh += md.sqrt_det * md.d_inv[slot][a][b] * q[b][a];
            }
        }
        if dh != 0.0 {
            w.add_term(&[Indexing::g_slot(slot), 0, 1, 2, 3], dh);
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                // ∂/∂Γ^a_{bc} of g^{AB}(Γ^C_{Bs}Γ^s_{CA} − Γ^C_{BA} tr1_C)
                let mut t = 0.0;
                for cap in 0..4 {
                    t += md.inv[cap][b] * gam[c][a][cap]; // C=a, B=b, s=c
                    t += md.inv[c][cap] * gam[b][cap][a]; // s=a, C=b, A=c
                }
                t -= md.inv[c][b] * tr1[a];
                if a == b {
                    let mut s2 = 0.0;
                    for cap in 0..4 {
                        for bb in 0..4 {
                            s2 += md.inv[cap][bb] * gam[c][bb][cap];
                        }
                    }
                    t -= s2;
                }
                let dh = md.sqrt_det * t;
                if dh != 0.0 {
                    w.add_term(&[Indexing::gamma(a, b, c), 0, 1, 2, 3], dh);
                }
            }
        }
    }

    // −dΠ ∧ dΓ^a_{bc} ∧ d³x_μ with Π = √|det g|(δ^μ_a g^{bc} − δ^b_a g^{μc})
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for mu in 0..4 {
                    let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
                    let rest: Vec<usize> = (0..4).filter(|&x| x != mu).collect();
                    for slot in 0..10 {
                        let d_pi = md.d_sqrt_det[slot]
                            * (kronecker(mu, a) * md.inv[b][c] - kronecker(b, a) * md.inv[mu][c])
                            + md.sqrt_det
                                * (kronecker(mu, a) * md.d_inv[slot][b][c]
                                    - kronecker(b, a) * md.d_inv[slot][mu][c]);
                        if d_pi == 0.0 {
                            continue;
                        }
                        let mut idx = vec![Indexing::g_slot(slot), Indexing::gamma(a, b, c)];
                        idx.extend_from_slice(&rest);
                        w.add_term(&idx, -d_pi * sign);
                    }
                }
            }
        }
    }
    w
}

pub fn torsion(gam: &[[[f64; 4]; 4]; 4]) -> [[[f64; 4]; 4]; 4] {
    let mut t = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                t[a][b][c] = gam[a][b][c] - gam[a][c][b];
            }
        }
    }
    t
}

/// Residual of the trace-adjusted torsion constraints.
pub fn locus_residual(p: &[f64]) -> f64 {
    let (_, gam) = unpack(p);
    let t = torsion(&gam);
    let mut tau = [0.0; 4];
    for g in 0..4 {
        for m in 0..4 {
            tau[g] += t[m][m][g];
        }
    }
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let v = t[a][b][c] - (kronecker(a, b) * tau[c] - kronecker(a, c) * tau[b]) / 3.0;
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// Linear projection onto the locus: keep the symmetric part and replace
/// the torsion by its pure-trace part.
pub fn project_to_locus(gam: &[[[f64; 4]; 4]; 4]) -> [[[f64; 4]; 4]; 4] {
    let t = torsion(gam);
    let mut tau = [0.0; 4];
    for g in 0..4 {
        for m in 0..4 {
            tau[g] += t[m][m][g];
        }
    }
    let mut out = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let sym = 0.5 * (gam[a][b][c] + gam[a][c][b]);
                let trace_part = (kronecker(a, b) * tau[c] - kronecker(a, c) * tau[b]) / 3.0;
                out[a][b][c] = sym + 0.5 * trace_part;
            }
        }
    }
    out
}

/// Seeded sample on the constraint locus near the Minkowski metric.
pub fn sample_locus(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p = vec![0.0; DIM];
    for x in p.iter_mut().take(4) {
        *x = rng.gen_range(-1.0..1.0);
    }
    let minkowski = [-1.0, 1.0, 1.0, 1.0];
    for (slot, &(a, b)) in G_SLOTS.iter().enumerate() {
        let base = if a == b { minkowski[a] } else { 0.0 };
        p[Indexing::g_slot(slot)] = base + rng.gen_range(-0.05..0.05);
    }
    let mut gam = [[[0.0; 4]; 4]; 4];
    for row in gam.iter_mut() {
        for col in row.iter_mut() {
            for v in col.iter_mut() {
                *v = rng.gen_range(-0.3..0.3);
            }
        }
    }
    let gam = project_to_locus(&gam);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                p[Indexing::gamma(a, b, c)] = gam[a][b][c];
            }
        }
    }
    p
}

/// The four trace kernel fields `Y_β = Σ_α ∂/∂Γ^α_{βα}`.
pub fn kernel_fields() -> Vec<(String, VectorField)> {
    (0..4)
        .map(|beta| {
            let mut v = vec![0.0; DIM];
            for a in 0..4 {
                v[Indexing::gamma(a, beta, a)] = 1.0;
            }
            (
                format!("trace{beta}"),
                VectorField::constant(chart(), VectorValue::new(v)),
            )
        })
        .collect()
}

const K_LEN: usize = 256;

fn k_index(a: usize, b: usize, g: usize, m: usize) -> usize {
    ((a * 4 + b) * 4 + g) * 4 + m
}

/// Constraint rows on the connection-propagation tensor `K^α_{βγ,μ}`:
/// both traces vanish appropriately and the antisymmetric part in (β,γ) is
/// pinned to the Γ-dependent right-hand side. The matrix is constant; only
/// the right-hand side moves with the point.
fn k_constraints(gam: &[[[f64; 4]; 4]; 4]) -> (DMatrix<f64>, DVector<f64>) {
    let mut rows: Vec<[f64; K_LEN]> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    // Σ_n K^n_{nγμ} = 0
    for g in 0..4 {
        for m in 0..4 {
            let mut r = [0.0; K_LEN];
            for n in 0..4 {
                r[k_index(n, n, g, m)] = 1.0;
            }
            rows.push(r);
            rhs.push(0.0);
        }
    }
    // Σ_n (K^n_{βγn} + K^n_{γβn}) = 0
    for b in 0..4 {
        for g in b..4 {
            let mut r = [0.0; K_LEN];
            for n in 0..4 {
                r[k_index(n, b, g, n)] += 1.0;
                r[k_index(n, g, b, n)] += 1.0;
            }
            rows.push(r);
            rhs.push(0.0);
        }
    }
    // antisymmetric part: K^a_{bγμ} − K^a_{γbμ} + (δ^a_b Tr_γμ − δ^a_γ Tr_bμ)/3 = rhs(Γ)
    let mut tr1 = [0.0; 4];
    for l in 0..4 {
        for n in 0..4 {
            tr1[l] += gam[n][n][l];
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            for g in b + 1..4 {
                for m in 0..4 {
                    let mut r = [0.0; K_LEN];
                    r[k_index(a, b, g, m)] += 1.0;
                    r[k_index(a, g, b, m)] -= 1.0;
                    for n in 0..4 {
                        if a == b {
                            r[k_index(n, g, n, m)] += 1.0 / 3.0;
                        }
                        if a == g {
                            r[k_index(n, b, n, m)] -= 1.0 / 3.0;
                        }
                    }
                    let mut v = 0.0;
                    for l in 0..4 {
                        v -= gam[l][m][g] * gam[a][b][l] - gam[l][m][b] * gam[a][g][l];
                    }
                    if a == b {
                        for l in 0..4 {
                            v += gam[l][m][g] * tr1[l] / 3.0;
                        }
                        for l in 0..4 {
                            for n in 0..4 {
                                v -= gam[l][m][n] * gam[n][g][l] / 3.0;
                            }
                        }
                    }
                    if a == g {
                        for l in 0..4 {
                            v -= gam[l][m][b] * tr1[l] / 3.0;
                        }
                        for l in 0..4 {
                            for n in 0..4 {
                                v += gam[l][m][n] * gam[n][b][l] / 3.0;
                            }
                        }
                    }
                    rows.push(r);
                    rhs.push(v);
                }
            }
        }
    }
    let mat = DMatrix::from_fn(rows.len(), K_LEN, |i, j| rows[i][j]);
    (mat, DVector::from_vec(rhs))
}

/// Least-norm projection of a seed array onto the admissible space at a
/// point: `K = K0 − Aᵀ(AAᵀ)⁺(A·K0 − b(Γ))`.
pub fn admissible_k(seed: &[f64; K_LEN], gam: &[[[f64; 4]; 4]; 4]) -> [f64; K_LEN] {
    let (a, b) = k_constraints(gam);
    let x0 = DVector::from_column_slice(seed);
    let gram = &a * a.transpose();
    let resid = &a * &x0 - b;
    let y = gram
        .svd(true, true)
        .solve(&resid, 1e-12)
        .expect("svd solve");
    let x = x0 - a.transpose() * y;
    let mut out = [0.0; K_LEN];
    out.copy_from_slice(x.as_slice());
    out
}

pub fn random_k_seed(rng: &mut ChaCha8Rng) -> [f64; K_LEN] {
    let mut s = [0.0; K_LEN];
    for v in s.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    s
}

pub fn random_c(rng: &mut ChaCha8Rng) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for row in c.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    c
}

/// Solution family member `X_ν` for a choice of `C_{βν}` and a `K` seed (the
/// seed is re-projected onto the admissible space at every point).
pub fn solution_family(c: [[f64; 4]; 4], k_seed: [f64; K_LEN]) -> Distribution {
    let ch = chart();
    let gens: Vec<VectorField> = (0..4)
        .map(|nu| {
            VectorField::new(chart(), move |p| {
                let (g, gam) = unpack(p);
                let k = admissible_k(&k_seed, &gam);
                let t = torsion(&gam);
                let mut tau = [0.0; 4];
                for v in 0..4 {
                    for l in 0..4 {
                        tau[v] += t[l][l][v];
                    }
                }
                let mut x = vec![0.0; DIM];
                x[nu] = 1.0;
                for (slot, &(s, r)) in G_SLOTS.iter().enumerate() {
                    let mut v = 2.0 / 3.0 * g[s][r] * tau[nu];
                    for l in 0..4 {
                        v += g[s][l] * gam[l][nu][r] + g[r][l] * gam[l][nu][s];
                    }
                    x[Indexing::g_slot(slot)] = v;
                }
                for a in 0..4 {
                    for b in 0..4 {
                        for cc in 0..4 {
                            let mut v = c[b][nu] * kronecker(a, cc) + k[k_index(a, b, cc, nu)];
                            for l in 0..4 {
                                v += gam[l][nu][cc] * gam[a][b][l];
                            }
                            x[Indexing::gamma(a, b, cc)] = v;
                        }
                    }
                }
                VectorValue::new(x)
            })
        })
        .collect();
    Distribution::new(ch, gens)
}

/// Propagated torsion-trace residuals `X_ν(τ_μ)` of a family member; the
/// member generates torsion-trace-free sections exactly when these vanish.
pub fn torsion_trace_propagation(
    c: &[[f64; 4]; 4],
    k: &[f64; K_LEN],
    gam: &[[[f64; 4]; 4]; 4],
) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut v = 0.0;
            for a in 0..4 {
                // propagation coefficient of Γ^a_{μa} minus that of Γ^a_{aμ}
                let mut p1 = c[mu][nu] + k[k_index(a, mu, a, nu)];
                let mut p2 = kronecker(a, mu) * c[a][nu] + k[k_index(a, a, mu, nu)];
                for l in 0..4 {
                    p1 += gam[l][nu][a] * gam[a][mu][l];
                    p2 += gam[l][nu][mu] * gam[a][a][l];
                }
                v += p1 - p2;
            }
            out[mu][nu] = v;
        }
    }
    out
}

/// Solve for the unique `C` that zeroes the propagated torsion trace for a
/// given `K` seed at a point; returns the solution, the rank of the 16×16
/// linear map, and the residual after substitution.
pub fn fix_torsion_trace(k_seed: &[f64; K_LEN], p: &[f64]) -> ([[f64; 4]; 4], usize, f64) {
    let (_, gam) = unpack(p);
    let k = admissible_k(k_seed, &gam);
    let zero_c = [[0.0; 4]; 4];
    let base: Vec<f64> = torsion_trace_propagation(&zero_c, &k, &gam)
        .iter()
        .flatten()
        .copied()
        .collect();
    let mut mat = DMatrix::zeros(16, 16);
    for probe in 0..16 {
        let mut c = [[0.0; 4]; 4];
        c[probe / 4][probe % 4] = 1.0;
        let shifted = torsion_trace_propagation(&c, &k, &gam);
        for (row, v) in shifted.iter().flatten().enumerate() {
            mat[(row, probe)] = v - base[row];
        }
    }
    let rank = crate::linalg::rank(&mat, 1e-10);
    let rhs = DVector::from_vec(base.iter().map(|v| -v).collect());
    let sol = crate::linalg::lstsq(&mat, &rhs);
    let mut c = [[0.0; 4]; 4];
    for i in 0..16 {
        c[i / 4][i % 4] = sol[i];
    }
    let residual = torsion_trace_propagation(&c, &k, &gam)
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    (c, rank, residual)
}

// ---- trace-adapted coordinates for the quotient ----

/// Adapted chart `(x; g-slots, c_0..c_3, trace-free Γ̃ components)` where
/// `Γ^α_{βγ} = Γ̃^α_{βγ} + c_β δ^α_γ` and `Γ̃^3_{β3}` is dropped (recovered
/// from the trace-free condition). The four `c_β` directions are exactly the
/// trace kernel fields.
pub fn adapted_chart() -> FiberedChart {
    let mut names: Vec<String> = (0..4).map(|m| format!("x{m}")).collect();
    for (a, b) in G_SLOTS {
        names.push(format!("g{a}{b}"));
    }
    for beta in 0..4 {
        names.push(format!("c{beta}"));
    }
    for b in 0..4 {
        for a in 0..4 {
            for c in 0..4 {
                if (a, c) != (3, 3) {
                    names.push(format!("Gt{a}_{b}{c}"));
                }
            }
        }
    }
    FiberedChart::new(4, 74, names)
}

fn adapted_trace_index(beta: usize) -> usize {
    14 + beta
}

fn adapted_tilde_index(a: usize, b: usize, c: usize) -> usize {
    // (3,3) is the dropped redundant slot, so a*4 + c stays below 15
    assert!((a, c) != (3, 3), "dropped redundant slot");
    18 + 15 * b + a * 4 + c
}

/// Linear map from adapted to original coordinates (constant Jacobian).
pub fn adapted_to_parent_matrix() -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(DIM, DIM);
    for i in 0..14 {
        jac[(i, i)] = 1.0;
    }
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let row = Indexing::gamma(a, b, c);
                if a == c {
                    jac[(row, adapted_trace_index(b))] += 1.0;
                }
                if (a, c) == (3, 3) {
                    for aa in 0..3 {
                        jac[(row, adapted_tilde_index(aa, b, aa))] -= 1.0;
                    }
                } else {
                    jac[(row, adapted_tilde_index(a, b, c))] += 1.0;
                }
            }
        }
    }
    jac
}

pub fn parent_to_adapted(p: &[f64]) -> Vec<f64> {
    let (_, gam) = unpack(p);
    let mut out = vec![0.0; DIM];
    out[..14].copy_from_slice(&p[..14]);
    for b in 0..4 {
        let trace: f64 = (0..4).map(|a| gam[a][b][a]).sum();
        out[adapted_trace_index(b)] = 0.25 * trace;
        for a in 0..4 {
            for c in 0..4 {
                if (a, c) == (3, 3) {
                    continue;
                }
                out[adapted_tilde_index(a, b, c)] = gam[a][b][c] - 0.25 * trace * kronecker(a, c);
            }
        }
    }
    out
}

pub fn adapted_to_parent(p_ad: &[f64]) -> Vec<f64> {
    let jac = adapted_to_parent_matrix();
    let v = &jac * DVector::from_column_slice(p_ad);
    v.iter().copied().collect()
}

/// The model restated on the adapted chart: `Ω` pulled back along the
/// constant coordinate change.
pub fn adapted_system() -> PremultisymplecticSystem {
    let jac = adapted_to_parent_matrix();
    let omega = FormField::new(adapted_chart(), 5, move |p_ad| {
        let parent = &jac * DVector::from_column_slice(p_ad);
        let parent: Vec<f64> = parent.iter().copied().collect();
        pullback_linear(&jac, &omega_at(&parent))
    });
    PremultisymplecticSystem::new("metric-affine-adapted", omega)
}

pub fn model() -> ModelSpec {
    let system =
        PremultisymplecticSystem::new("metric-affine", FormField::new(chart(), 5, omega_at));
    let mut model = ModelSpec::new("metric-affine", system).with_sampler(|cfg| {
        let mut rng = cfg.rng();
        (0..cfg.points).map(|_| sample_locus(&mut rng)).collect()
    });
    model.known_kernel = kernel_fields();

    model.facts = vec![
        closedness_fact(),
        Fact::new(
            "kernel fields",
            "the four trace directions annihilate Ω",
            |model, cfg| {
                let mut worst: f64 = 0.0;
                for p in model.sample(cfg) {
                    let omega = model.system.omega().at(&p);
                    for (_, field) in &model.known_kernel {
                        worst =
                            worst.max(crate::exterior::interior(&field.at(&p), &omega).max_norm());
                    }
                }
                Verdict::new("kernel fields", "4 trace directions", worst <= 1e-7, worst)
            },
        ),
        Fact::new(
            "family solution",
            "a seeded (C, K) member solves on the locus",
            |model, cfg| {
                let mut rng = cfg.rng();
                let member = solution_family(random_c(&mut rng), random_k_seed(&mut rng));
                let mut worst: f64 = 0.0;
                let mut pass = true;
                for p in model.sample(cfg) {
                    assert!(locus_residual(&p) < 1e-12);
                    let omega = model.system.omega().at(&p);
                    let (ok, wit) =
                        solutions::is_expanded_solution_point(&member, &omega, &p, 1e-6);
                    pass &= ok;
                    if let Some(w) = wit {
                        worst = worst.max(w.residual);
                    }
                }
                Verdict::new("family solution", "seeded (C,K)", pass, worst)
            },
        ),
        Fact::new(
            "related classes",
            "C moves inside a class, K across classes",
            |model, cfg| {
                let mut rng = cfg.rng();
                let k1 = random_k_seed(&mut rng);
                let k2 = random_k_seed(&mut rng);
                let c1 = random_c(&mut rng);
                let c2 = random_c(&mut rng);
                let points = model.sample(cfg);
                let a = solution_family(c1, k1);
                let same_k = solution_family(c2, k1);
                let diff_k = solution_family(c1, k2);
                let related_same =
                    solutions::kernel_related(&a, &same_k, &model.system, &points, 1e-6).0;
                let related_diff =
                    solutions::kernel_related(&a, &diff_k, &model.system, &points, 1e-6).0;
                Verdict::new(
                    "related classes",
                    "same-K yes, different-K no",
                    related_same && !related_diff,
                    0.0,
                )
            },
        ),
        Fact::new(
            "torsion fix",
            "one C per class generates torsion-trace-free sections",
            |model, cfg| {
                let mut rng = cfg.rng();
                let k_seed = random_k_seed(&mut rng);
                let mut pass = true;
                let mut worst: f64 = 0.0;
                for p in model.sample(cfg) {
                    let (c, rank, residual) = fix_torsion_trace(&k_seed, &p);
                    pass &= rank == 16 && residual <= 1e-9;
                    worst = worst.max(residual);
                    // the fixed member is still a solution
                    let member = solution_family(c, k_seed);
                    let omega = model.system.omega().at(&p);
                    let (ok, _) = solutions::is_expanded_solution_point(&member, &omega, &p, 1e-6);
                    pass &= ok;
                }
                Verdict::new("torsion fix", "rank 16, unique C", pass, worst)
            },
        ),
        Fact::new(
            "trace quotient",
            "dropping the trace coordinates transports solutions",
            |model, cfg| {
                let _ = model;
                quotient_fact(cfg)
            },
        ),
    ];
    model
}

fn quotient_fact(cfg: &RunConfig) -> Verdict {
    let adapted = adapted_system();
    let mut rng = cfg.rng();
    let points: Vec<Vec<f64>> = (0..cfg.points.min(3))
        .map(|_| parent_to_adapted(&sample_locus(&mut rng)))
        .collect();
    let dropped: Vec<usize> = (0..4).map(adapted_trace_index).collect();
    let reduced =
        match reduction::build_quotient(&adapted, &dropped, &[0.0; 4], &points, 1e-6, 1e-6) {
            Ok(r) => r,
            Err(e) => {
                return Verdict::new("trace quotient", "", false, f64::NAN)
                    .with_witness(json!({ "error": e.to_string() }))
            }
        };
    // flat section: Minkowski metric, zero connection — a solution on both sides
    let flat = Section::from_fiber_map(adapted_chart(), |_| {
        let mut fiber = vec![0.0; 74];
        fiber[0] = -1.0; // g00
        fiber[4] = 1.0; // g11
        fiber[7] = 1.0; // g22
        fiber[9] = 1.0; // g33
        fiber
    });
    let base_points: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect())
        .collect();
    let (parent_ok, parent_res) =
        sections::section_is_solution(&flat, &adapted, &base_points, 1e-6, 1e-6);
    let projected = reduction::project_section(&flat, &reduced.quotient);
    let (reduced_ok, reduced_res) =
        sections::section_is_solution(&projected, &reduced.system, &base_points, 1e-6, 1e-6);
    let lifted_quotient = reduced.quotient.with_beta(vec![0.3; 4]);
    let recovered = reduction::recover_section(&projected, &lifted_quotient);
    let (recovered_ok, recovered_res) =
        sections::section_is_solution(&recovered, &adapted, &base_points, 1e-6, 1e-6);
    let pass = parent_ok && reduced_ok && recovered_ok;
    Verdict::new(
        "trace quotient",
        "project + recover",
        pass,
        parent_res.max(reduced_res).max(recovered_res),
    )
    .with_witness(json!({
        "kernel_residual": reduced.certificate.kernel_residual,
        "slice_dependence": reduced.certificate.slice_dependence,
    }))
}
