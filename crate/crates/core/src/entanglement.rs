//! Two-site reduced density matrix and its logarithmic negativity.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with `|0⟩` the `σ^z = +1` state.
//! The symmetries of the chain leave only the diagonal and the two
//! anti-diagonal coherences non-zero (an "X" matrix), so the spectrum of the
//! state and of its partial transpose follows from two 2×2 blocks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::Correlators;
use crate::error::{Error, Result};

/// Most negative eigenvalue accepted as quadrature noise.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Trace norms at or below `1 + SEPARABLE_SLACK` count as separable.
pub const SEPARABLE_SLACK: f64 = 1e-12;

/// Hermitian 4×4 matrix with X structure.
///
/// Used both for density matrices and for their partial transposes, which
/// need not be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSiteState {
    /// `⟨00|ρ|00⟩, ⟨01|ρ|01⟩, ⟨10|ρ|10⟩, ⟨11|ρ|11⟩`
    pub diagonal: [f64; 4],
    /// `⟨01|ρ|10⟩`
    pub inner_coherence: Complex64,
    /// `⟨00|ρ|11⟩`
    pub outer_coherence: Complex64,
}

pub type DenseMatrix = [[Complex64; 4]; 4];

impl TwoSiteState {
    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        TwoSiteState {
            diagonal: [0.25; 4],
            inner_coherence: Complex64::new(0.0, 0.0),
            outer_coherence: Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    /// Eigenvalues: outer block pair first, then inner block pair.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let [d00, d01, d10, d11] = self.diagonal;
        let (o1, o2) = block_eigenvalues(d00, d11, self.outer_coherence.norm());
        let (i1, i2) = block_eigenvalues(d01, d10, self.inner_coherence.norm());
        [o1, o2, i1, i2]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Fails with [`Error::NonPhysical`] if an eigenvalue is below `−tol`.
    pub fn check_positive(&self, tol: f64) -> Result<()> {
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -tol {
            Err(Error::NonPhysical { min_eigenvalue })
        } else {
            Ok(())
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let zero = Complex64::new(0.0, 0.0);
        let mut m = [[zero; 4]; 4];
        for (i, d) in self.diagonal.iter().enumerate() {
            m[i][i] = Complex64::new(*d, 0.0);
        }
        m[0][3] = self.outer_coherence;
        m[3][0] = self.outer_coherence.conj();
        m[1][2] = self.inner_coherence;
        m[2][1] = self.inner_coherence.conj();
        m
    }
}

fn block_eigenvalues(p: f64, q: f64, c_abs: f64) -> (f64, f64) {
    let mean = 0.5 * (p + q);
    let radius = (0.5 * (p - q)).hypot(c_abs);
    (mean + radius, mean - radius)
}

/// Builds `ρ₁₂ = ¼ I⊗I + m_z (S^z⊗I + I⊗S^z) + T_xy (S^x⊗S^y + S^y⊗S^x)
/// + Σ_j T_jj S^j⊗S^j` with `S = σ/2`.
pub fn assemble(c: &Correlators) -> TwoSiteState {
    let zz = 0.25 * c.t_zz;
    TwoSiteState {
        diagonal: [0.25 + c.m_z + zz, 0.25 - zz, 0.25 - zz, 0.25 - c.m_z + zz],
        inner_coherence: Complex64::new(0.25 * (c.t_xx + c.t_yy), 0.0),
        outer_coherence: Complex64::new(0.25 * (c.t_xx - c.t_yy), -0.5 * c.t_xy),
    }
}

/// Partial transpose on the first site.
///
/// `(ij),(kl) → (kj),(il)` exchanges the two coherences:
/// `⟨00|ρ^T|11⟩ = ⟨10|ρ|01⟩` and `⟨01|ρ^T|10⟩ = ⟨11|ρ|00⟩`.
pub fn partial_transpose(rho: &TwoSiteState) -> TwoSiteState {
    TwoSiteState {
        diagonal: rho.diagonal,
        inner_coherence: rho.outer_coherence.conj(),
        outer_coherence: rho.inner_coherence.conj(),
    }
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &TwoSiteState) -> f64 {
    m.eigenvalues().iter().map(|e| e.abs()).sum()
}

/// `log₂ ‖ρ^{T_A}‖₁`, zero for PPT states.
///
/// Rejects inputs with an eigenvalue below `−PSD_TOLERANCE`.
pub fn log_negativity(rho: &TwoSiteState) -> Result<f64> {
    rho.check_positive(PSD_TOLERANCE)?;
    let norm = trace_norm(&partial_transpose(rho));
    if norm <= 1.0 + SEPARABLE_SLACK {
        Ok(0.0)
    } else {
        Ok(norm.log2())
    }
}

/// Logarithmic negativity straight from a correlator snapshot.
pub fn correlators_log_negativity(c: &Correlators) -> Result<f64> {
    log_negativity(&assemble(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Complex, Matrix4};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn singlet() -> Correlators {
        Correlators {
            m_z: 0.0,
            t_xx: -1.0,
            t_yy: -1.0,
            t_zz: -1.0,
            t_xy: 0.0,
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli() -> [[[Complex64; 2]; 2]; 4] {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        [[[o, z], [z, o]], [[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]]
    }

    fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> DenseMatrix {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        m
    }

    fn trace_product(a: &DenseMatrix, b: &DenseMatrix) -> Complex64 {
        let mut t = c(0.0, 0.0);
        for i in 0..4 {
            for k in 0..4 {
                t += a[i][k] * b[k][i];
            }
        }
        t
    }

    /// Generic index-swap partial transpose on the first factor.
    fn dense_partial_transpose(m: &DenseMatrix) -> DenseMatrix {
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[2 * k + j][2 * i + l] = m[2 * i + j][2 * k + l];
                    }
                }
            }
        }
        out
    }

    fn dense_trace_norm(m: &DenseMatrix) -> f64 {
        let mat = Matrix4::from_fn(|i, j| Complex::new(m[i][j].re, m[i][j].im));
        mat.symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).sum()
    }

    fn random_x(rng: &mut StdRng) -> TwoSiteState {
        TwoSiteState {
            diagonal: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            inner_coherence: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            outer_coherence: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        }
    }

    #[test]
    fn zero_correlators_give_maximally_mixed() {
        let rho = assemble(&Correlators::default());
        assert_eq!(rho, TwoSiteState::maximally_mixed());
        assert_eq!(partial_transpose(&rho), rho);
        assert_eq!(log_negativity(&rho).unwrap(), 0.0);
    }

    #[test]
    fn singlet_projector() {
        let rho = assemble(&singlet());
        // (|01⟩ − |10⟩)/√2
        assert_eq!(rho.diagonal, [0.0, 0.5, 0.5, 0.0]);
        assert_abs_diff_eq!(rho.inner_coherence.re, -0.5);
        assert_eq!(rho.outer_coherence, c(0.0, 0.0));
        let pt = partial_transpose(&rho);
        assert_abs_diff_eq!(pt.min_eigenvalue(), -0.5, epsilon = 1e-15);
        let mut eig = pt.eigenvalues();
        eig.sort_by(f64::total_cmp);
        assert_eq!(eig, [-0.5, 0.5, 0.5, 0.5]);
        assert_abs_diff_eq!(trace_norm(&pt), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(log_negativity(&rho).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_trace_norm() {
        let m = TwoSiteState {
            diagonal: [0.5, 0.3, 0.2, 0.0],
            inner_coherence: c(0.0, 0.0),
            outer_coherence: c(0.0, 0.0),
        };
        assert_abs_diff_eq!(trace_norm(&m), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_transpose_matches_index_swap() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_x(&mut rng);
            let fast = partial_transpose(&m).to_dense();
            let slow = dense_partial_transpose(&m.to_dense());
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(fast[i][j], slow[i][j]);
                }
            }
        }
    }

    #[test]
    fn transpose_on_either_site_has_same_spectrum() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let m = random_x(&mut rng).to_dense();
            let first = dense_partial_transpose(&m);
            // transpose on the second site = full transpose of the first-site one
            let mut second = first;
            for i in 0..4 {
                for j in 0..4 {
                    second[i][j] = first[j][i];
                }
            }
            assert_abs_diff_eq!(dense_trace_norm(&first), dense_trace_norm(&second), epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_trace_norm_matches_dense_eigensolver() {
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let m = random_x(&mut rng);
            assert_abs_diff_eq!(trace_norm(&m), dense_trace_norm(&m.to_dense()), epsilon = 1e-12);
        }
    }

    #[test]
    fn assemble_round_trips_through_dense_expectations() {
        let mut rng = StdRng::seed_from_u64(3);
        let s = pauli();
        for _ in 0..200 {
            let corr = Correlators {
                m_z: rng.random_range(-0.5..0.5),
                t_xx: rng.random_range(-1.0..1.0),
                t_yy: rng.random_range(-1.0..1.0),
                t_zz: rng.random_range(-1.0..1.0),
                t_xy: rng.random_range(-1.0..1.0),
            };
            let rho = assemble(&corr).to_dense();
            // 4 tr(S^j⊗S^k ρ) = tr(σ^j⊗σ^k ρ)
            let t = |j: usize, k: usize| trace_product(&kron(&s[j], &s[k]), &rho);
            assert_abs_diff_eq!(t(1, 1).re, corr.t_xx, epsilon = 1e-12);
            assert_abs_diff_eq!(t(2, 2).re, corr.t_yy, epsilon = 1e-12);
            assert_abs_diff_eq!(t(3, 3).re, corr.t_zz, epsilon = 1e-12);
            assert_abs_diff_eq!(t(1, 2).re, corr.t_xy, epsilon = 1e-12);
            assert_abs_diff_eq!(t(2, 1).re, corr.t_xy, epsilon = 1e-12);
            // absent terms
            for (j, k) in [(1, 3), (3, 1), (2, 3), (3, 2), (1, 0), (2, 0), (0, 1), (0, 2)] {
                assert!(t(j, k).norm() < 1e-12);
            }
            // 2 tr(S^z⊗I ρ) = tr(σ^z⊗I ρ)/... : ⟨S^z⟩ = tr(σ^z/2 ⊗ I ρ)
            assert_abs_diff_eq!(0.5 * t(3, 0).re, corr.m_z, epsilon = 1e-12);
            assert_abs_diff_eq!(0.5 * t(0, 3).re, corr.m_z, epsilon = 1e-12);
            assert_abs_diff_eq!(t(0, 0).re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn log_negativity_zero_iff_ppt() {
        let mut rng = StdRng::seed_from_u64(5);
        let mut seen = (0, 0);
        for _ in 0..5000 {
            let corr = Correlators {
                m_z: rng.random_range(-0.5..0.5),
                t_xx: rng.random_range(-1.0..1.0),
                t_yy: rng.random_range(-1.0..1.0),
                t_zz: rng.random_range(-1.0..1.0),
                t_xy: rng.random_range(-1.0..1.0),
            };
            let rho = assemble(&corr);
            if rho.min_eigenvalue() < 0.0 {
                assert!(matches!(log_negativity(&rho), Err(Error::NonPhysical { .. })) || rho.min_eigenvalue() >= -PSD_TOLERANCE);
                continue;
            }
            let en = log_negativity(&rho).unwrap();
            assert!(en >= 0.0);
            let ppt = partial_transpose(&rho).min_eigenvalue() >= 0.0;
            if ppt {
                seen.0 += 1;
                assert_eq!(en, 0.0);
            } else {
                seen.1 += 1;
                assert!(en > 0.0);
            }
        }
        assert!(seen.0 > 0 && seen.1 > 0);
    }

    #[test]
    fn non_physical_state_is_rejected() {
        let bad = Correlators {
            m_z: 0.5,
            t_xx: 1.0,
            t_yy: -1.0,
            t_zz: 0.0,
            t_xy: 0.0,
        };
        assert!(matches!(log_negativity(&assemble(&bad)), Err(Error::NonPhysical { .. })));
    }
}
