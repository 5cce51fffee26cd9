//! Validated two-qubit density matrices and the partial-transpose test.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::qlinalg::{
    hermitian_eig, inner, kron_vec, partial_transpose, pauli_product, real_vec, vnorm, Op2, Op4, Pauli, Side, Vec2,
    Vec4, C64, ZERO,
};
use crate::{DEFAULT_TOL, VERDICT_TOL};

/// Pauli coordinates `t[i][j] = Tr(ρ σ_i⊗σ_j)`, indexed by [`Pauli::index`].
pub type PauliTable = [[f64; 4]; 4];

/// A density matrix that passed validation, with its Pauli table cached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: Op4,
    pauli: PauliTable,
}

impl TwoQubitState {
    pub fn rho(&self) -> &Op4 {
        &self.rho
    }

    pub fn pauli(&self) -> &PauliTable {
        &self.pauli
    }

    pub fn t(&self, i: Pauli, j: Pauli) -> f64 {
        self.pauli[i.index()][j.index()]
    }

    /// Alice's reduced state `Tr_B ρ`.
    pub fn reduced_a(&self) -> Op2 {
        let r = &self.rho.0;
        Op2::from_fn(|i, j| r[2 * i][2 * j] + r[2 * i + 1][2 * j + 1])
    }

    /// Bob's reduced state `Tr_A ρ`.
    pub fn reduced_b(&self) -> Op2 {
        let r = &self.rho.0;
        Op2::from_fn(|k, l| r[k][l] + r[2 + k][2 + l])
    }

    /// Rebuilds `ρ = ¼ Σ t_ij σ_i⊗σ_j` from a full Pauli table and validates it.
    pub fn from_pauli_table(t: &PauliTable, tol: f64) -> Result<Self> {
        make_state(rho_from_pauli(t), tol)
    }
}

/// `¼ Σ t_ij σ_i⊗σ_j` without validation.
pub fn rho_from_pauli(t: &PauliTable) -> Op4 {
    let mut rho = Op4::zeros();
    for i in Pauli::ALL {
        for j in Pauli::ALL {
            let c = t[i.index()][j.index()];
            if c != 0.0 {
                rho = rho + pauli_product(i, j).scale_real(0.25 * c);
            }
        }
    }
    rho
}

/// `Re Tr(M σ_i⊗σ_j)` for every Pauli pair.
pub fn pauli_coordinates(m: &Op4) -> PauliTable {
    let mut t = [[0.0; 4]; 4];
    for i in Pauli::ALL {
        for j in Pauli::ALL {
            t[i.index()][j.index()] = m.trace_product(&pauli_product(i, j)).re;
        }
    }
    t
}

/// Validates `rho` as a density matrix.
///
/// The error message names the first violated invariant: finiteness,
/// hermiticity, unit trace, or positivity.
pub fn make_state(rho: Op4, tol: f64) -> Result<TwoQubitState> {
    if !rho.is_finite() {
        return Err(Error::validation("density matrix has non-finite entries"));
    }
    if !rho.is_hermitian(tol) {
        return Err(Error::validation("density matrix is not Hermitian"));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::validation(format!(
            "density matrix trace is {} instead of 1",
            tr.re
        )));
    }
    let eig = hermitian_eig(&rho, tol)?;
    if eig.min_value() < -tol {
        return Err(Error::validation(format!(
            "density matrix has negative eigenvalue {:e}",
            eig.min_value()
        )));
    }
    let pauli = pauli_coordinates(&rho);
    Ok(TwoQubitState { rho, pauli })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub fn vector(self) -> Vec4 {
        let s = FRAC_1_SQRT_2;
        real_vec(match self {
            Bell::PhiPlus => [s, 0.0, 0.0, s],
            Bell::PhiMinus => [s, 0.0, 0.0, -s],
            Bell::PsiPlus => [0.0, s, s, 0.0],
            Bell::PsiMinus => [0.0, s, -s, 0.0],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StandardState {
    Bell(Bell),
    /// `p |Φ⁺⟩⟨Φ⁺| + (1 − p) 𝟙/4`
    Werner(f64),
    PureVector(Vec4),
}

pub fn standard_state(kind: StandardState) -> Result<TwoQubitState> {
    match kind {
        StandardState::Bell(b) => make_state(Op4::outer(&b.vector()), DEFAULT_TOL),
        StandardState::Werner(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::usage(format!("Werner weight {p} outside [0, 1]")));
            }
            let phi = Op4::outer(&Bell::PhiPlus.vector());
            let rho = phi.scale_real(p) + Op4::identity().scale_real((1.0 - p) / 4.0);
            make_state(rho, DEFAULT_TOL)
        }
        StandardState::PureVector(psi) => {
            if (vnorm(&psi) - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::usage("pure state vector is not normalized"));
            }
            make_state(Op4::outer(&psi), DEFAULT_TOL)
        }
    }
}

pub fn maximally_mixed() -> TwoQubitState {
    let rho = Op4::identity().scale_real(0.25);
    make_state(rho, DEFAULT_TOL).expect("maximally mixed state is valid")
}

/// Convex mixture `Σ w_k ρ_k`.
pub fn mixture(parts: &[(f64, &TwoQubitState)], tol: f64) -> Result<TwoQubitState> {
    let mut rho = Op4::zeros();
    for (w, s) in parts {
        if *w < 0.0 {
            return Err(Error::usage("negative mixture weight"));
        }
        rho = rho + s.rho().scale_real(*w);
    }
    make_state(rho, tol)
}

/// State `Σ q_k |a_k⟩⟨a_k| ⊗ |b_k⟩⟨b_k|` of an explicit product mixture.
pub fn product_mixture_state(terms: &[(f64, Vec2, Vec2)], tol: f64) -> Result<TwoQubitState> {
    let mut rho = Op4::zeros();
    for (q, a, b) in terms {
        rho = rho + Op4::outer(&kron_vec(a, b)).scale_real(*q);
    }
    make_state(rho, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PptVerdict {
    Ppt,
    Npt,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptResult {
    pub verdict: PptVerdict,
    /// Smallest eigenvalue of `ρ^{T_B}`.
    pub min_eigenvalue: f64,
    /// Eigenvector of that eigenvalue, present only for NPT.
    pub neg_eigenvector: Option<Vec4>,
}

/// Peres–Horodecki test on `ρ^{T_B}`. For two qubits NPT is equivalent to
/// entanglement. Eigenvalues in `[−tol, 0)` count as PPT.
pub fn is_ppt(state: &TwoQubitState, tol: f64) -> PptResult {
    is_ppt_side(state, Side::B, tol)
}

pub fn is_ppt_side(state: &TwoQubitState, side: Side, tol: f64) -> PptResult {
    let pt = partial_transpose(state.rho(), side);
    // The partial transpose of a valid state is Hermitian; the solver can
    // only fail on malformed input, which make_state already excludes.
    let eig = hermitian_eig(&pt, DEFAULT_TOL.max(tol)).expect("partial transpose is Hermitian");
    let min = eig.min_value();
    if min < -tol {
        PptResult {
            verdict: PptVerdict::Npt,
            min_eigenvalue: min,
            neg_eigenvector: Some(eig.min_vector()),
        }
    } else {
        PptResult {
            verdict: PptVerdict::Ppt,
            min_eigenvalue: min,
            neg_eigenvector: None,
        }
    }
}

pub fn is_entangled(state: &TwoQubitState) -> bool {
    is_ppt(state, VERDICT_TOL).verdict == PptVerdict::Npt
}

/// Source state `Σ_i √p_i |e_i⟩|φ_i⟩` of a prepare-and-measure scheme.
///
/// Measuring Alice's half in the basis `{|e_i⟩}` prepares signal `|φ_i⟩`
/// with probability `p_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceState {
    probs: [f64; 2],
    signals: [Vec2; 2],
}

impl SourceState {
    pub fn new(probs: [f64; 2], signals: [Vec2; 2]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (probs[0] + probs[1] - 1.0).abs() > 1e-12 {
            return Err(Error::usage("signal probabilities must form a distribution"));
        }
        for s in &signals {
            if (vnorm(s) - 1.0).abs() > 1e-12 {
                return Err(Error::usage("signal states must be normalized"));
            }
        }
        Ok(SourceState { probs, signals })
    }

    /// The source used by the 4- and 6-state protocols: `|Φ⁺⟩`, i.e.
    /// signals `|0⟩`, `|1⟩` with equal weight.
    pub fn maximally_entangled() -> Self {
        let zero = real_vec([1.0, 0.0]);
        let one = real_vec([0.0, 1.0]);
        SourceState {
            probs: [0.5, 0.5],
            signals: [zero, one],
        }
    }

    pub fn probs(&self) -> [f64; 2] {
        self.probs
    }

    pub fn signals(&self) -> [Vec2; 2] {
        self.signals
    }

    pub fn vector(&self) -> Vec4 {
        let mut out = [ZERO; 4];
        for i in 0..2 {
            let mut e = [ZERO; 2];
            e[i] = C64::new(1.0, 0.0);
            let t = kron_vec(&e, &self.signals[i]);
            for k in 0..4 {
                out[k] += t[k] * self.probs[i].sqrt();
            }
        }
        out
    }

    pub fn state(&self) -> TwoQubitState {
        make_state(Op4::outer(&self.vector()), DEFAULT_TOL).expect("source vector is normalized")
    }

    /// Signals Bob receives when Alice measures her half in the orthonormal
    /// basis `basis`: `(probability, normalized Bob state)` per outcome.
    pub fn prepared_signals(&self, basis: [Vec2; 2]) -> [(f64, Vec2); 2] {
        let psi = self.vector();
        basis.map(|f| {
            let bob: Vec2 = [
                f[0].conj() * psi[0] + f[1].conj() * psi[2],
                f[0].conj() * psi[1] + f[1].conj() * psi[3],
            ];
            let p = inner(&bob, &bob).re;
            let n = p.sqrt();
            let v = if n > 0.0 { bob.map(|z| z / n) } else { bob };
            (p, v)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_product_mixture, random_state, rng};

    #[test]
    fn maximally_mixed_table() {
        let s = make_state(Op4::identity().scale_real(0.25), 1e-10).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert!((s.pauli()[i][j] - want).abs() < 1e-15);
            }
        }
    }

    // Direct trace oracle: Tr(|Φ⁺⟩⟨Φ⁺| σ_i⊗σ_j) = ⟨Φ⁺|σ_i⊗σ_j|Φ⁺⟩.
    #[test]
    fn phi_plus_table() {
        let phi = Bell::PhiPlus.vector();
        let s = standard_state(StandardState::Bell(Bell::PhiPlus)).unwrap();
        for i in Pauli::ALL {
            for j in Pauli::ALL {
                let direct = pauli_product(i, j).expectation(&phi).re;
                assert!((s.t(i, j) - direct).abs() < 1e-14);
            }
        }
        assert!((s.t(Pauli::X, Pauli::X) - 1.0).abs() < 1e-14);
        assert!((s.t(Pauli::Y, Pauli::Y) + 1.0).abs() < 1e-14);
        assert!((s.t(Pauli::Z, Pauli::Z) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let phi = Op4::outer(&Bell::PhiPlus.vector());
        let bad = Op4::identity().scale_real(0.25) - phi.scale_real(0.3);
        // Trace is 0.7, so fix it to isolate the positivity check.
        let bad = bad.scale_real(1.0 / 0.7);
        match make_state(bad, 1e-10) {
            Err(Error::Validation(m)) => assert!(m.contains("negative eigenvalue"), "{m}"),
            other => panic!("expected validation error, got {other:?}"),
        }
        let unnormalized = Op4::identity().scale_real(0.25) - phi.scale_real(0.3);
        assert!(matches!(make_state(unnormalized, 1e-10), Err(Error::Validation(_))));
        let mut nh = Op4::identity().scale_real(0.25);
        nh.0[0][1] = C64::new(0.1, 0.0);
        match make_state(nh, 1e-10) {
            Err(Error::Validation(m)) => assert!(m.contains("Hermitian")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn werner_family() {
        let w0 = standard_state(StandardState::Werner(0.0)).unwrap();
        assert!(w0.rho().max_abs_diff(&Op4::identity().scale_real(0.25)) < 1e-15);
        let w1 = standard_state(StandardState::Werner(1.0)).unwrap();
        assert!(w1.rho().max_abs_diff(&Op4::outer(&Bell::PhiPlus.vector())) < 1e-15);
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let w = standard_state(StandardState::Werner(p)).unwrap();
            assert!((w.t(Pauli::X, Pauli::X) - p).abs() < 1e-14);
            assert!((w.t(Pauli::Y, Pauli::Y) + p).abs() < 1e-14);
            assert!((w.t(Pauli::Z, Pauli::Z) - p).abs() < 1e-14);
        }
        assert!(matches!(
            standard_state(StandardState::Werner(1.5)),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            standard_state(StandardState::Werner(-0.1)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn ppt_examples() {
        let r = is_ppt(&maximally_mixed(), VERDICT_TOL);
        assert_eq!(r.verdict, PptVerdict::Ppt);
        assert!((r.min_eigenvalue - 0.25).abs() < 1e-14);
        assert!(r.neg_eigenvector.is_none());

        let phi = standard_state(StandardState::Bell(Bell::PhiPlus)).unwrap();
        let r = is_ppt(&phi, VERDICT_TOL);
        assert_eq!(r.verdict, PptVerdict::Npt);
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-14);
        // The negative eigenvector of ½SWAP is the singlet.
        let v = r.neg_eigenvector.unwrap();
        let overlap = inner(&v, &Bell::PsiMinus.vector()).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    // Brute-force eigensolve over a p grid versus the closed form (1 − 3p)/4.
    #[test]
    fn werner_ppt_threshold() {
        for k in 0..=300 {
            let p = k as f64 / 300.0;
            let w = standard_state(StandardState::Werner(p)).unwrap();
            let r = is_ppt(&w, VERDICT_TOL);
            assert!((r.min_eigenvalue - (1.0 - 3.0 * p) / 4.0).abs() < 1e-12);
            let npt = r.verdict == PptVerdict::Npt;
            assert_eq!(npt, p > 1.0 / 3.0 + 1e-8, "p = {p}");
        }
    }

    #[test]
    fn pauli_roundtrip_and_side_invariance() {
        let mut r = rng(21);
        for _ in 0..200 {
            let s = random_state(&mut r);
            let back = TwoQubitState::from_pauli_table(s.pauli(), 1e-10).unwrap();
            assert!(back.rho().max_abs_diff(s.rho()) < 1e-10);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((back.pauli()[i][j] - s.pauli()[i][j]).abs() < 1e-10);
                    assert!(s.pauli()[i][j].abs() <= 1.0 + 1e-10);
                }
            }
            assert!((s.pauli()[0][0] - 1.0).abs() < 1e-12);
            let a = is_ppt_side(&s, Side::A, VERDICT_TOL);
            let b = is_ppt_side(&s, Side::B, VERDICT_TOL);
            assert_eq!(a.verdict, b.verdict);
            assert!((a.min_eigenvalue - b.min_eigenvalue).abs() < 1e-10);
        }
    }

    #[test]
    fn separable_mixtures_stay_ppt() {
        let mut r = rng(4);
        for _ in 0..100 {
            let s1 = product_mixture_state(&random_product_mixture(&mut r, 3), 1e-10).unwrap();
            let s2 = product_mixture_state(&random_product_mixture(&mut r, 5), 1e-10).unwrap();
            assert_eq!(is_ppt(&s1, VERDICT_TOL).verdict, PptVerdict::Ppt);
            for k in 0..=4 {
                let l = k as f64 / 4.0;
                let m = mixture(&[(l, &s1), (1.0 - l, &s2)], 1e-10).unwrap();
                assert_eq!(is_ppt(&m, VERDICT_TOL).verdict, PptVerdict::Ppt);
            }
        }
    }

    #[test]
    fn source_state_matches_phi_plus() {
        let src = SourceState::maximally_entangled();
        let v = src.vector();
        let phi = Bell::PhiPlus.vector();
        assert!((0..4).all(|i| (v[i] - phi[i]).norm() < 1e-15));
        let ra = src.state().reduced_a();
        assert!(ra.max_abs_diff(&Op2::identity().scale_real(0.5)) < 1e-15);

        // Measuring Alice in x prepares |±⟩ for Bob with probability ½ each.
        let s = FRAC_1_SQRT_2;
        let xb = [real_vec([s, s]), real_vec([s, -s])];
        let sig = src.prepared_signals(xb);
        for k in 0..2 {
            assert!((sig[k].0 - 0.5).abs() < 1e-15);
            assert!((inner(&sig[k].1, &xb[k]).norm() - 1.0).abs() < 1e-12);
        }
        assert!(SourceState::new([0.3, 0.6], src.signals()).is_err());
    }
}
