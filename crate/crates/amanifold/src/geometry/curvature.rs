//! Levi-Civita connection and curvature from exact metric derivatives.
//!
//! Conventions, pinned by the identity tests in `verify`:
//!
//! * `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`,
//! * `R(∂_i, ∂_j)∂_k = R^l_kij ∂_l` with
//!   `R^l_kij = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`,
//! * `ρ_ij = R^k_ikj`, so the round sphere has positive Ricci,
//! * `∇_kρ_ij = ∂_kρ_ij − Γ^m_ki ρ_mj − Γ^m_kj ρ_im`.

use nalgebra::{DMatrix, DVector};

use super::{ChartPoint, GeoResult, GeometryError, IndexRole, MetricField, TensorValue};
use crate::jet::Jet;

/// Invert a matrix of jets by Gauss–Jordan elimination with partial pivoting
/// on the value parts. The value matrix is assumed invertible (validated by
/// `MetricField::jets`).
pub(crate) fn invert_jet_matrix(d: usize, entries: &[Jet]) -> GeoResult<Vec<Jet>> {
    let order = entries.iter().map(|j| j.order()).min().unwrap_or(0);
    let dim = entries[0].dim();
    let width = 2 * d;
    let mut rows: Vec<Vec<Jet>> = (0..d)
        .map(|i| {
            let mut row: Vec<Jet> = (0..d).map(|j| entries[i * d + j].truncated(order)).collect();
            for j in 0..d {
                row.push(Jet::constant(dim, order, if i == j { 1.0 } else { 0.0 }));
            }
            row
        })
        .collect();

    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&a, &b| {
                rows[a][col]
                    .value()
                    .abs()
                    .partial_cmp(&rows[b][col].value().abs())
                    .expect("non-finite pivot")
            })
            .expect("empty pivot range");
        if rows[pivot][col].value().abs() < 1e-300 {
            return Err(GeometryError::DegenerateMetric { cond: f64::INFINITY });
        }
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        for j in 0..width {
            rows[col][j] = &rows[col][j] * &inv;
        }
        for i in 0..d {
            if i == col {
                continue;
            }
            let factor = rows[i][col].clone();
            if factor.value() == 0.0 && factor.order() == order {
                // still may have derivative content; no shortcut unless all zero
                let all_zero = (0..width).all(|_| false);
                let _ = all_zero;
            }
            for j in 0..width {
                rows[i][j] = &rows[i][j] - &(&factor * &rows[col][j]);
            }
        }
    }

    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(rows[i][d + j].clone());
        }
    }
    Ok(out)
}

/// Connection and curvature data of a metric at one point, computed once and
/// shared by the higher-level checks.
pub struct CurvatureData {
    dim: usize,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    /// `Γ^k_ij` as order-2 jets, index `[k][i][j]` row-major.
    gamma_jets: Vec<Jet>,
    /// `ρ_ij` as order-1 jets.
    ricci_jets: Vec<Jet>,
    pub christoffel: TensorValue,
    pub riemann: TensorValue,
    pub ricci: DMatrix<f64>,
    /// `∇_k ρ_ij`, index order `(k, i, j)`.
    pub nabla_ricci: TensorValue,
    /// Scalar curvature as an order-1 jet (value plus gradient).
    pub scalar_jet: Jet,
}

impl CurvatureData {
    pub fn at(g: &MetricField, p: &ChartPoint) -> GeoResult<Self> {
        let d = g.dim();
        let g_jets = g.jets(p, 3)?;
        let metric = DMatrix::from_fn(d, d, |i, j| g_jets[i * d + j].value());
        let ginv_jets = invert_jet_matrix(d, &g_jets)?;
        let metric_inv = DMatrix::from_fn(d, d, |i, j| ginv_jets[i * d + j].value());

        // ∂_a g_ij as order-2 jets.
        let dg: Vec<Jet> = (0..d * d * d)
            .map(|idx| {
                let (a, rest) = (idx / (d * d), idx % (d * d));
                g_jets[rest].partial(a)
            })
            .collect();
        let dg_at = |a: usize, i: usize, j: usize| &dg[a * d * d + i * d + j];

        let mut gamma_jets = Vec::with_capacity(d * d * d);
        let mut christoffel =
            TensorValue::zeros(d, &[IndexRole::Upper, IndexRole::Lower, IndexRole::Lower]);
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = Jet::constant(d, 2, 0.0);
                    for l in 0..d {
                        let sym = &(dg_at(i, j, l) + dg_at(j, i, l)) - dg_at(l, i, j);
                        acc = &acc + &(&ginv_jets[k * d + l].truncated(2) * &sym);
                    }
                    let gamma = acc.scale(0.5);
                    christoffel.set(&[k, i, j], gamma.value());
                    gamma_jets.push(gamma);
                }
            }
        }
        let gm = |k: usize, i: usize, j: usize| &gamma_jets[(k * d + i) * d + j];

        // Riemann tensor values and the Ricci contraction as order-1 jets.
        let mut riemann = TensorValue::zeros(
            d,
            &[IndexRole::Upper, IndexRole::Lower, IndexRole::Lower, IndexRole::Lower],
        );
        let zero1 = Jet::constant(d, 1, 0.0);
        let mut ricci_jets = vec![zero1.clone(); d * d];
        for l in 0..d {
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut r = &gm(l, j, k).partial(i) - &gm(l, i, k).partial(j);
                        for m in 0..d {
                            r = &r
                                + &(&(&gm(l, i, m).truncated(1) * &gm(m, j, k).truncated(1))
                                    - &(&gm(l, j, m).truncated(1) * &gm(m, i, k).truncated(1)));
                        }
                        riemann.set(&[l, k, i, j], r.value());
                        if l == i {
                            ricci_jets[k * d + j] = &ricci_jets[k * d + j] + &r;
                        }
                    }
                }
            }
        }
        let ricci = DMatrix::from_fn(d, d, |i, j| ricci_jets[i * d + j].value());

        // ∇ρ from the Ricci jets and Christoffel values.
        let mut nabla_ricci =
            TensorValue::zeros(d, &[IndexRole::Lower, IndexRole::Lower, IndexRole::Lower]);
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut v = ricci_jets[i * d + j].first_partial(k);
                    for m in 0..d {
                        v -= christoffel.get(&[m, k, i]) * ricci[(m, j)];
                        v -= christoffel.get(&[m, k, j]) * ricci[(i, m)];
                    }
                    nabla_ricci.set(&[k, i, j], v);
                }
            }
        }

        let mut scalar_jet = Jet::constant(d, 1, 0.0);
        for i in 0..d {
            for j in 0..d {
                scalar_jet =
                    &scalar_jet + &(&ginv_jets[i * d + j].truncated(1) * &ricci_jets[i * d + j]);
            }
        }

        Ok(CurvatureData {
            dim: d,
            metric,
            metric_inv,
            gamma_jets,
            ricci_jets,
            christoffel,
            riemann,
            ricci,
            nabla_ricci,
            scalar_jet,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma_jets[(k * self.dim + i) * self.dim + j].value()
    }

    /// `∂_m Γ^k_ij`.
    pub fn gamma_partial(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        self.gamma_jets[(k * self.dim + i) * self.dim + j].first_partial(m)
    }

    /// `∂_m ρ_ij`.
    pub fn ricci_partial(&self, m: usize, i: usize, j: usize) -> f64 {
        self.ricci_jets[i * self.dim + j].first_partial(m)
    }

    /// `g^{ik} ρ_kj`.
    pub fn ricci_endomorphism(&self) -> DMatrix<f64> {
        &self.metric_inv * &self.ricci
    }

    /// `∇ρ(X, Y, Z) = X^k Y^i Z^j ∇_kρ_ij`.
    pub fn nabla_ricci_apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    acc += x[k] * y[i] * z[j] * self.nabla_ricci.get(&[k, i, j]);
                }
            }
        }
        acc
    }

    /// The cyclic sum `∇ρ(X,Y,Z) + ∇ρ(Y,Z,X) + ∇ρ(Z,X,Y)`.
    pub fn cyclic_nabla_ricci(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        self.nabla_ricci_apply(x, y, z)
            + self.nabla_ricci_apply(y, z, x)
            + self.nabla_ricci_apply(z, x, y)
    }

    /// `R(X, Y)Z` as a vector.
    pub fn riemann_apply(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |l, _| {
            let mut acc = 0.0;
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        acc += self.riemann.get(&[l, k, i, j]) * z[k] * x[i] * y[j];
                    }
                }
            }
            acc
        })
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.metric * y)[(0, 0)]
    }
}

/// Christoffel symbols `Γ^k_ij` at a point.
pub fn christoffel(g: &MetricField, p: &ChartPoint) -> GeoResult<TensorValue> {
    Ok(CurvatureData::at(g, p)?.christoffel)
}

/// Riemann tensor `R^l_kij` at a point.
pub fn riemann(g: &MetricField, p: &ChartPoint) -> GeoResult<TensorValue> {
    Ok(CurvatureData::at(g, p)?.riemann)
}

/// Ricci tensor `ρ_ij` at a point.
pub fn ricci(g: &MetricField, p: &ChartPoint) -> GeoResult<DMatrix<f64>> {
    Ok(CurvatureData::at(g, p)?.ricci)
}

/// Ricci endomorphism `g^{ik}ρ_kj` at a point.
pub fn ricci_endomorphism(g: &MetricField, p: &ChartPoint) -> GeoResult<DMatrix<f64>> {
    Ok(CurvatureData::at(g, p)?.ricci_endomorphism())
}

/// Covariant derivative of the Ricci tensor, `(∇ρ)_kij = ∇_k ρ_ij`.
pub fn cov_deriv_ricci(g: &MetricField, p: &ChartPoint) -> GeoResult<TensorValue> {
    Ok(CurvatureData::at(g, p)?.nabla_ricci)
}

/// The cyclic sum `∇ρ(X,Y,Z) + ∇ρ(Y,Z,X) + ∇ρ(Z,X,Y)`; an 𝒜-manifold makes
/// this vanish for all triples.
pub fn cyclic_sum_nabla_ricci(
    g: &MetricField,
    p: &ChartPoint,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> GeoResult<f64> {
    Ok(CurvatureData::at(g, p)?.cyclic_nabla_ricci(x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricField;

    fn sphere_metric() -> MetricField {
        // Round unit 2-sphere in polar coordinates (u, v): diag(1, sin²u).
        MetricField::from_entry_fn(2, |vars| {
            let zero = Jet::constant(2, vars[0].order(), 0.0);
            let one = Jet::constant(2, vars[0].order(), 1.0);
            let s = vars[0].sin();
            vec![one, zero.clone(), zero, &s * &s]
        })
    }

    #[test]
    fn flat_metric_has_zero_connection_and_curvature() {
        let g = MetricField::euclidean(3);
        let p = ChartPoint::new(vec![0.3, -1.2, 2.0]).unwrap();
        let data = CurvatureData::at(&g, &p).unwrap();
        assert!(data.christoffel.max_abs() < 1e-15);
        assert!(data.riemann.max_abs() < 1e-15);
        assert!(data.ricci.iter().all(|v| v.abs() < 1e-15));
        assert!(data.nabla_ricci.max_abs() < 1e-15);
    }

    #[test]
    fn sphere_christoffels_match_closed_form() {
        let g = sphere_metric();
        let u = std::f64::consts::FRAC_PI_4;
        let p = ChartPoint::new(vec![u, 0.7]).unwrap();
        let gamma = christoffel(&g, &p).unwrap();
        assert!((gamma.get(&[0, 1, 1]) - (-u.sin() * u.cos())).abs() < 1e-13);
        assert!((gamma.get(&[1, 0, 1]) - u.cos() / u.sin()).abs() < 1e-13);
        assert!((gamma.get(&[1, 1, 0]) - u.cos() / u.sin()).abs() < 1e-13);
        assert!(gamma.get(&[0, 0, 0]).abs() < 1e-14);
    }

    #[test]
    fn sphere_has_unit_sectional_curvature_and_einstein_ricci() {
        let g = sphere_metric();
        for &(u, v) in &[(0.9, 0.0), (1.4, 2.0), (2.0, -1.0), (0.6, 4.0)] {
            let p = ChartPoint::new(vec![u, v]).unwrap();
            let data = CurvatureData::at(&g, &p).unwrap();
            // sec(X,Y) = g(R(X,Y)Y, X) / (|X|²|Y|² − g(X,Y)²) for the
            // coordinate pair.
            let x = DVector::from_vec(vec![1.0, 0.0]);
            let y = DVector::from_vec(vec![0.0, 1.0]);
            let rxyy = data.riemann_apply(&x, &y, &y);
            let num = data.inner(&rxyy, &x);
            let den = data.inner(&x, &x) * data.inner(&y, &y) - data.inner(&x, &y).powi(2);
            assert!((num / den - 1.0).abs() < 1e-10, "sec = {}", num / den);
            // ρ = g on the unit sphere.
            let diff = (&data.ricci - &data.metric).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(diff < 1e-10);
            // Einstein metrics have parallel Ricci.
            assert!(data.nabla_ricci.max_abs() < 1e-10);
        }
    }

    #[test]
    fn perturbed_flat_metric_nabla_ricci_matches_finite_differences() {
        // g = (1 + 0.1 u₁²) δ on ℝ².
        let make = || {
            MetricField::from_entry_fn(2, |vars| {
                let f = &(&vars[0] * &vars[0]).scale(0.1) + 1.0;
                let zero = Jet::constant(2, vars[0].order(), 0.0);
                vec![f.clone(), zero.clone(), zero, f]
            })
        };
        let g = make();
        let p = ChartPoint::new(vec![0.6, -0.4]).unwrap();
        let data = CurvatureData::at(&g, &p).unwrap();
        assert!(data.nabla_ricci.max_abs() > 1e-3);

        // Finite-difference oracle: central differences of ρ at step 1e-4,
        // corrected by the exact connection terms.
        let h = 1e-4;
        for k in 0..2 {
            let mut up = p.as_slice().to_vec();
            let mut dn = up.clone();
            up[k] += h;
            dn[k] -= h;
            let r_up = ricci(&g, &ChartPoint::new(up).unwrap()).unwrap();
            let r_dn = ricci(&g, &ChartPoint::new(dn).unwrap()).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let mut fd = (r_up[(i, j)] - r_dn[(i, j)]) / (2.0 * h);
                    for m in 0..2 {
                        fd -= data.christoffel.get(&[m, k, i]) * data.ricci[(m, j)];
                        fd -= data.christoffel.get(&[m, k, j]) * data.ricci[(i, m)];
                    }
                    assert!(
                        (fd - data.nabla_ricci.get(&[k, i, j])).abs() < 1e-5,
                        "∇ρ[{k}{i}{j}]: fd {fd} vs exact {}",
                        data.nabla_ricci.get(&[k, i, j])
                    );
                }
            }
        }
    }

    #[test]
    fn perturbed_metric_fails_cyclic_condition_somewhere() {
        use rand::{Rng, SeedableRng};
        let g = MetricField::from_entry_fn(2, |vars| {
            let f = &(&vars[0] * &vars[0]).scale(0.1) + 1.0;
            let zero = Jet::constant(2, vars[0].order(), 0.0);
            vec![f.clone(), zero.clone(), zero, f]
        });
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut max = 0.0f64;
        for _ in 0..100 {
            let p = ChartPoint::new(vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
                .unwrap();
            let x = DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0));
            let y = DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0));
            let z = DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0));
            max = max.max(cyclic_sum_nabla_ricci(&g, &p, &x, &y, &z).unwrap().abs());
        }
        assert!(max > 1e-3, "max cyclic sum {max}");
    }

    #[test]
    fn ill_conditioned_metric_is_rejected() {
        let g = MetricField::constant(DMatrix::from_diagonal(&DVector::from_vec(vec![
            1.0, 1e-9,
        ])));
        let p = ChartPoint::origin(2);
        match CurvatureData::at(&g, &p) {
            Err(GeometryError::DegenerateMetric { cond }) => assert!(cond > 1e8),
            other => panic!("expected degenerate-metric rejection, got {other:?}"),
        }
    }
}
