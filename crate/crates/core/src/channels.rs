//! Channels on Bob's qubit, and the intercept-resend attack with Eve's
//! classical record.

use crate::error::{Error, Result};
use crate::information::{pure_terms, ProductTerm, TripartiteTable};
use crate::measurements::{Basis, Outcome, Protocol};
use crate::qlinalg::{kron, Op2, Op4, Pauli};
use crate::states::{make_state, TwoQubitState};
use crate::DEFAULT_TOL;

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    kraus: Vec<Op2>,
}

impl Channel {
    /// Checks `Σ K† K = 𝟙` within 1e-10.
    pub fn new(kraus: Vec<Op2>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::validation("channel needs at least one Kraus operator"));
        }
        let mut sum = Op2::zeros();
        for k in &kraus {
            if !k.is_finite() {
                return Err(Error::validation("Kraus operator has non-finite entries"));
            }
            sum = sum + k.adjoint() * *k;
        }
        let dev = sum.max_abs_diff(&Op2::identity());
        if dev > DEFAULT_TOL {
            return Err(Error::validation(format!(
                "Kraus operators are not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(Channel { kraus })
    }

    pub fn identity() -> Self {
        Channel {
            kraus: vec![Op2::identity()],
        }
    }

    pub fn kraus(&self) -> &[Op2] {
        &self.kraus
    }
}

/// `U(θ) = cos θ 𝟙 − i sin θ σ_y`, a real rotation of Bob's polarization.
pub fn rotation_channel(theta: f64) -> Channel {
    let (s, c) = theta.sin_cos();
    Channel {
        kraus: vec![Op2::from_real([[c, -s], [s, c]])],
    }
}

/// Kraus set `{√(1−3p/4) 𝟙, √(p/4) σ_x, √(p/4) σ_y, √(p/4) σ_z}`.
pub fn depolarizing_channel(p: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::usage(format!("depolarizing probability {p} outside [0, 1]")));
    }
    let a = (1.0 - 0.75 * p).sqrt();
    let b = (p / 4.0).sqrt();
    Channel::new(vec![
        Op2::identity().scale_real(a),
        Pauli::X.matrix().scale_real(b),
        Pauli::Y.matrix().scale_real(b),
        Pauli::Z.matrix().scale_real(b),
    ])
}

/// `Σ_m (𝟙⊗K_m) ρ (𝟙⊗K_m)†`. Alice's reduced state is left untouched.
pub fn apply_to_bob(ch: &Channel, state: &TwoQubitState) -> Result<TwoQubitState> {
    let mut out = Op4::zeros();
    for k in ch.kraus() {
        let big = kron(&Op2::identity(), k);
        out = out + big * *state.rho() * big.adjoint();
    }
    let next = make_state(out.hermitian_part(), DEFAULT_TOL)?;
    let drift = next.reduced_a().max_abs_diff(&state.reduced_a());
    if drift > DEFAULT_TOL {
        return Err(Error::validation(format!(
            "channel changed Alice's reduced state by {drift:e}"
        )));
    }
    Ok(next)
}

/// Eve's record for one intercepted qubit: the basis she chose and her result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EveOutcome {
    pub basis: Basis,
    pub outcome: Outcome,
}

impl EveOutcome {
    pub fn label(&self) -> String {
        format!("{},{}", self.basis.label(), self.outcome.label())
    }
}

/// Result of an intercept-resend attack.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackRecord {
    pub post_state: TwoQubitState,
    pub eve_outcomes: Vec<EveOutcome>,
    /// Per protocol basis pair: `P(a, b, e | basis_a, basis_b)` with outcome
    /// labels `"+1"`/`"-1"` and E labelled by [`EveOutcome::label`].
    pub tables: Vec<((Basis, Basis), TripartiteTable)>,
    eve_basis_prob: f64,
    pre_state: TwoQubitState,
}

impl AttackRecord {
    pub fn table(&self, i: Basis, j: Basis) -> Option<&TripartiteTable> {
        self.tables
            .iter()
            .find(|((a, b), _)| *a == i && *b == j)
            .map(|(_, t)| t)
    }

    /// The post-attack state as an explicit product mixture: for each Eve
    /// outcome, Alice's conditional state (split into pure terms) paired with
    /// the eigenstate Eve resent.
    pub fn separable_mixture(&self) -> Vec<ProductTerm> {
        let mut out = Vec::new();
        for e in &self.eve_outcomes {
            let proj = kron(&Op2::identity(), &e.basis.projector(e.outcome));
            let cond = proj * *self.pre_state.rho() * proj;
            let r = &cond.0;
            // Tr_B of the projected (unnormalized) state.
            let alice = Op2::from_fn(|i, j| r[2 * i][2 * j] + r[2 * i + 1][2 * j + 1]);
            let resent = e.basis.eigenvector(e.outcome);
            for (w, v) in pure_terms(&alice) {
                out.push((self.eve_basis_prob * w, v, resent));
            }
        }
        out
    }
}

/// Eve measures Bob's qubit in a uniformly chosen basis from `bases` and
/// resends the eigenstate of her outcome.
///
/// The per-basis-pair tables are exact: `P(a, b, (k,r) | i, j) =
/// q_k · Tr[ρ (P_{i,a} ⊗ P_{k,r})] · |⟨j,b|k,r⟩|²`. Given Eve's outcome,
/// Alice's and Bob's results are independent.
pub fn intercept_resend(bases: &[Basis], state: &TwoQubitState, protocol: &Protocol) -> Result<AttackRecord> {
    let mut eve_bases: Vec<Basis> = bases.to_vec();
    eve_bases.sort();
    eve_bases.dedup();
    if eve_bases.is_empty() {
        return Err(Error::usage("intercept-resend needs at least one basis"));
    }
    let qk = 1.0 / eve_bases.len() as f64;
    let eve_outcomes: Vec<EveOutcome> = eve_bases
        .iter()
        .flat_map(|&basis| Outcome::ALL.map(|outcome| EveOutcome { basis, outcome }))
        .collect();

    let mut post = Op4::zeros();
    for e in &eve_outcomes {
        let proj = kron(&Op2::identity(), &e.basis.projector(e.outcome));
        post = post + (proj * *state.rho() * proj).scale_real(qk);
    }
    let post_state = make_state(post.hermitian_part(), DEFAULT_TOL)?;

    let outcome_labels: Vec<String> = Outcome::ALL.iter().map(|o| o.label().to_string()).collect();
    let eve_labels: Vec<String> = eve_outcomes.iter().map(EveOutcome::label).collect();
    let mut tables = Vec::new();
    for &i in protocol.bases() {
        for &j in protocol.bases() {
            let probs = Outcome::ALL
                .iter()
                .map(|&a| {
                    Outcome::ALL
                        .iter()
                        .map(|&b| {
                            eve_outcomes
                                .iter()
                                .map(|e| {
                                    let joint = kron(&i.projector(a), &e.basis.projector(e.outcome));
                                    let p_ae = state.rho().trace_product(&joint).re.max(0.0);
                                    let resent = e.basis.eigenvector(e.outcome);
                                    let p_b = j.projector(b).expectation(&resent).re.clamp(0.0, 1.0);
                                    qk * p_ae * p_b
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let t = TripartiteTable::new(
                outcome_labels.clone(),
                outcome_labels.clone(),
                eve_labels.clone(),
                probs,
            )?;
            tables.push(((i, j), t));
        }
    }
    Ok(AttackRecord {
        post_state,
        eve_outcomes,
        tables,
        eve_basis_prob: qk,
        pre_state: *state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::information::{conditional_mutual_information, mutual_information};
    use crate::measurements::{joint_distribution, qber, qber_basis};
    use crate::qlinalg::{real_vec, C64};
    use crate::sampling::{random_state, rng};
    use crate::states::{is_ppt, product_mixture_state, standard_state, Bell, PptVerdict, StandardState};
    use crate::VERDICT_TOL;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn phi_plus() -> TwoQubitState {
        standard_state(StandardState::Bell(Bell::PhiPlus)).unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let mut r = rng(2);
        let s = random_state(&mut r);
        let out = apply_to_bob(&Channel::identity(), &s).unwrap();
        assert!(out.rho().max_abs_diff(s.rho()) < 1e-15);
    }

    #[test]
    fn rotation_matrix() {
        assert_eq!(rotation_channel(0.0).kraus()[0], Op2::identity());
        let u = rotation_channel(FRAC_PI_2).kraus()[0];
        // |0⟩ → |1⟩ and |1⟩ → −|0⟩.
        let e0 = u.apply(&real_vec([1.0, 0.0]));
        let e1 = u.apply(&real_vec([0.0, 1.0]));
        assert!((e0[0]).norm() < 1e-15 && (e0[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((e1[0] + C64::new(1.0, 0.0)).norm() < 1e-15 && e1[1].norm() < 1e-15);
        for k in 0..50 {
            let th = k as f64 * 0.13;
            let u = rotation_channel(th).kraus()[0];
            assert!((u * u.adjoint()).max_abs_diff(&Op2::identity()) < 1e-15);
            // Same operator as cos θ 𝟙 − i sin θ σ_y.
            let direct = Op2::identity().scale_real(th.cos()) - Pauli::Y.matrix().scale(C64::new(0.0, th.sin()));
            assert!(u.max_abs_diff(&direct) < 1e-15);
        }
    }

    #[test]
    fn rotation_on_phi_plus_gives_rotated_bell_vector() {
        for th in [0.0, 0.3, FRAC_PI_3, 2.0] {
            let out = apply_to_bob(&rotation_channel(th), &phi_plus()).unwrap();
            let (s, c) = th.sin_cos();
            let psi = real_vec([c, s, -s, c]);
            let want = Op4::outer(&psi).scale_real(0.5);
            assert!(out.rho().max_abs_diff(&want) < 1e-14);
        }
    }

    // Kraus-sum oracle: depolarizing(p) maps Bob's Bloch vector r → (1−p) r.
    #[test]
    fn depolarizing_on_phi_plus_is_werner() {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let ch = depolarizing_channel(p).unwrap();
            let out = apply_to_bob(&ch, &phi_plus()).unwrap();
            let w = standard_state(StandardState::Werner(1.0 - p)).unwrap();
            assert!(out.rho().max_abs_diff(w.rho()) < 1e-14);
        }
        let mut r = rng(8);
        let s = random_state(&mut r);
        let out = apply_to_bob(&depolarizing_channel(1.0).unwrap(), &s).unwrap();
        assert!(out.reduced_b().max_abs_diff(&Op2::identity().scale_real(0.5)) < 1e-14);
        assert!(out.reduced_a().max_abs_diff(&s.reduced_a()) < 1e-14);
        assert!(depolarizing_channel(1.2).is_err());
        assert!(depolarizing_channel(-0.2).is_err());
    }

    #[test]
    fn channel_validation() {
        assert!(Channel::new(vec![]).is_err());
        assert!(Channel::new(vec![Op2::identity().scale_real(0.9)]).is_err());
        for k in 0..=20 {
            let ch = depolarizing_channel(k as f64 / 20.0).unwrap();
            let sum = ch.kraus().iter().fold(Op2::zeros(), |acc, m| acc + m.adjoint() * *m);
            assert!(sum.max_abs_diff(&Op2::identity()) < 1e-10);
        }
    }

    #[test]
    fn reduced_a_is_preserved() {
        let mut r = rng(13);
        for _ in 0..50 {
            let s = random_state(&mut r);
            for ch in [rotation_channel(0.77), depolarizing_channel(0.4).unwrap()] {
                let out = apply_to_bob(&ch, &s).unwrap();
                assert!(out.reduced_a().max_abs_diff(&s.reduced_a()) < 1e-10);
            }
        }
    }

    #[test]
    fn intercept_resend_error_rates() {
        let rec = intercept_resend(&[Basis::X, Basis::Z], &phi_plus(), &Protocol::four_state()).unwrap();
        let d = joint_distribution(&rec.post_state, &Protocol::four_state());
        assert!((qber(&d).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(is_ppt(&rec.post_state, VERDICT_TOL).verdict, PptVerdict::Ppt);

        let all = [Basis::X, Basis::Y, Basis::Z];
        let rec = intercept_resend(&all, &phi_plus(), &Protocol::six_state()).unwrap();
        let d = joint_distribution(&rec.post_state, &Protocol::six_state());
        assert!((qber(&d).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(is_ppt(&rec.post_state, VERDICT_TOL).verdict, PptVerdict::Ppt);

        assert!(intercept_resend(&[], &phi_plus(), &Protocol::four_state()).is_err());
    }

    // Exhaustive enumeration over (Eve basis z, Eve outcome, Alice, Bob):
    // with Eve always in z, the z data is untouched and x is random.
    #[test]
    fn z_only_attack_enumeration() {
        let rec = intercept_resend(&[Basis::Z], &phi_plus(), &Protocol::four_state()).unwrap();
        let d = joint_distribution(&rec.post_state, &Protocol::four_state());
        assert!(qber_basis(&d, Basis::Z).unwrap().abs() < 1e-15);
        assert!((qber_basis(&d, Basis::X).unwrap() - 0.5).abs() < 1e-15);

        let zz = rec.table(Basis::Z, Basis::Z).unwrap();
        // P(a, b, e=(z,r)) = ½ δ_{a r} δ_{b r}.
        for a in 0..2 {
            for b in 0..2 {
                for e in 0..2 {
                    let want = if a == e && b == e { 0.5 } else { 0.0 };
                    assert!((zz.p(a, b, e) - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn attack_tables_are_consistent() {
        let mut r = rng(41);
        let mut states = vec![phi_plus()];
        states.extend((0..20).map(|_| random_state(&mut r)));
        for s in &states {
            for (bases, proto) in [
                (vec![Basis::X, Basis::Z], Protocol::four_state()),
                (vec![Basis::X, Basis::Y, Basis::Z], Protocol::six_state()),
            ] {
                let rec = intercept_resend(&bases, s, &proto).unwrap();
                let d = joint_distribution(&rec.post_state, &proto);
                for ((i, j), t) in &rec.tables {
                    let m = t.marginal_ab();
                    let c = d.conditional(*i, *j);
                    for a in 0..2 {
                        for b in 0..2 {
                            assert!((m[a][b] - c[a][b]).abs() < 1e-12);
                        }
                    }
                    assert!(conditional_mutual_information(t) < 1e-12);
                }
                let mix = rec.separable_mixture();
                let rebuilt = product_mixture_state(&mix, 1e-10).unwrap();
                assert!(rebuilt.rho().max_abs_diff(rec.post_state.rho()) < 1e-12);
            }
        }
    }

    #[test]
    fn attack_on_phi_plus_leaves_correlations() {
        let rec = intercept_resend(&[Basis::X, Basis::Z], &phi_plus(), &Protocol::four_state()).unwrap();
        let zz = rec.table(Basis::Z, Basis::Z).unwrap();
        let mi = mutual_information(&zz.marginal_ab()).unwrap();
        assert!(mi > 0.18);
        assert!(conditional_mutual_information(zz) < 1e-12);
    }
}
