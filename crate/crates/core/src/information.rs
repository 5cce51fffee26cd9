//! Classical information quantities on finite tables, in bits.
//!
//! The central fact demonstrated here: when observed correlations can be
//! explained by a separable state `Σ q_k |a_k⟩⟨a_k| ⊗ |b_k⟩⟨b_k|`, an
//! eavesdropper holding the mixture index `k` makes Alice's and Bob's
//! outcomes conditionally independent, so `I(A;B|E) = 0` and the intrinsic
//! information (an upper bound on the distillable key) vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::{Basis, Outcome, Protocol};
use crate::qlinalg::{vnorm, Op2, Vec2};

/// Normalization tolerance for tripartite tables.
pub const TABLE_TOL: f64 = 1e-12;

/// Finite distribution `P(a, b, e)` with labelled alphabets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripartiteTable {
    #[serde(rename = "a")]
    alphabet_a: Vec<String>,
    #[serde(rename = "b")]
    alphabet_b: Vec<String>,
    #[serde(rename = "e")]
    alphabet_e: Vec<String>,
    /// `probs[a][b][e]`
    probs: Vec<Vec<Vec<f64>>>,
}

impl TripartiteTable {
    pub fn new(
        alphabet_a: Vec<String>,
        alphabet_b: Vec<String>,
        alphabet_e: Vec<String>,
        probs: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let t = TripartiteTable {
            alphabet_a,
            alphabet_b,
            alphabet_e,
            probs,
        };
        t.validate()?;
        Ok(t)
    }

    /// Checks shape, nonnegativity and unit mass. Needed after
    /// deserialization, which bypasses [`TripartiteTable::new`].
    pub fn validate(&self) -> Result<()> {
        let (na, nb, ne) = self.dims();
        if na == 0 || nb == 0 || ne == 0 {
            return Err(Error::validation("empty alphabet"));
        }
        if self.probs.len() != na
            || self
                .probs
                .iter()
                .any(|r| r.len() != nb || r.iter().any(|c| c.len() != ne))
        {
            return Err(Error::validation("probability array shape does not match alphabets"));
        }
        let mut total = 0.0;
        for p in self.probs.iter().flatten().flatten() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::validation(format!("invalid probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > TABLE_TOL {
            return Err(Error::validation(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.alphabet_a.len(), self.alphabet_b.len(), self.alphabet_e.len())
    }

    pub fn alphabet_a(&self) -> &[String] {
        &self.alphabet_a
    }

    pub fn alphabet_b(&self) -> &[String] {
        &self.alphabet_b
    }

    pub fn alphabet_e(&self) -> &[String] {
        &self.alphabet_e
    }

    pub fn p(&self, a: usize, b: usize, e: usize) -> f64 {
        self.probs[a][b][e]
    }

    /// `P(a, b)` after summing out E.
    pub fn marginal_ab(&self) -> Vec<Vec<f64>> {
        self.probs
            .iter()
            .map(|row| row.iter().map(|cell| cell.iter().sum()).collect())
            .collect()
    }

    pub fn marginal_e(&self) -> Vec<f64> {
        let (_, _, ne) = self.dims();
        let mut out = vec![0.0; ne];
        for cell in self.probs.iter().flatten() {
            for (e, p) in cell.iter().enumerate() {
                out[e] += p;
            }
        }
        out
    }

    /// Restricts to the given A and B labels and renormalizes. Used to
    /// condition on a sifted basis pair.
    pub fn restrict(&self, keep_a: impl Fn(&str) -> bool, keep_b: impl Fn(&str) -> bool) -> Result<Self> {
        let ia: Vec<usize> = (0..self.alphabet_a.len())
            .filter(|&i| keep_a(&self.alphabet_a[i]))
            .collect();
        let ib: Vec<usize> = (0..self.alphabet_b.len())
            .filter(|&i| keep_b(&self.alphabet_b[i]))
            .collect();
        let mut probs: Vec<Vec<Vec<f64>>> = ia
            .iter()
            .map(|&a| ib.iter().map(|&b| self.probs[a][b].clone()).collect())
            .collect();
        let mass: f64 = probs.iter().flatten().flatten().sum();
        if mass <= 0.0 {
            return Err(Error::usage("restriction has zero probability"));
        }
        for p in probs.iter_mut().flatten().flatten() {
            *p /= mass;
        }
        TripartiteTable::new(
            ia.iter().map(|&i| self.alphabet_a[i].clone()).collect(),
            ib.iter().map(|&i| self.alphabet_b[i].clone()).collect(),
            self.alphabet_e.clone(),
            probs,
        )
    }

    /// Conditions on both parties having used `basis`; labels must have the
    /// `"<basis>,<outcome>"` form produced by [`separable_extension`].
    pub fn sifted(&self, basis: Basis) -> Result<Self> {
        let prefix = format!("{},", basis.label());
        self.restrict(|a| a.starts_with(&prefix), |b| b.starts_with(&prefix))
    }

    /// True if every slice `P(a,b | e)` with `P(e) > 0` is a product of its
    /// marginals within `tol`.
    pub fn slices_factorize(&self, tol: f64) -> bool {
        let (na, nb, ne) = self.dims();
        let pe = self.marginal_e();
        (0..ne).filter(|&e| pe[e] > 0.0).all(|e| {
            let pa: Vec<f64> = (0..na).map(|a| (0..nb).map(|b| self.probs[a][b][e]).sum()).collect();
            let pb: Vec<f64> = (0..nb).map(|b| (0..na).map(|a| self.probs[a][b][e]).sum()).collect();
            (0..na)
                .all(|a| (0..nb).all(|b| (self.probs[a][b][e] / pe[e] - pa[a] * pb[b] / (pe[e] * pe[e])).abs() <= tol))
        })
    }
}

fn validate_bipartite(p: &[Vec<f64>]) -> Result<()> {
    if p.is_empty() || p[0].is_empty() || p.iter().any(|r| r.len() != p[0].len()) {
        return Err(Error::validation("bipartite table must be a nonempty rectangle"));
    }
    let mut total = 0.0;
    for x in p.iter().flatten() {
        if !x.is_finite() || *x < 0.0 {
            return Err(Error::validation(format!("invalid probability {x}")));
        }
        total += x;
    }
    if (total - 1.0).abs() > TABLE_TOL {
        return Err(Error::validation(format!("probabilities sum to {total}")));
    }
    Ok(())
}

// Σ p(a,b) log2[p(a,b) / (p(a) p(b))] over an unnormalized block of mass `m`,
// i.e. m · I(A;B | block).
fn mi_weighted(block: &[Vec<f64>]) -> f64 {
    let m: f64 = block.iter().flatten().sum();
    if m <= 0.0 {
        return 0.0;
    }
    let pa: Vec<f64> = block.iter().map(|r| r.iter().sum()).collect();
    let nb = block[0].len();
    let pb: Vec<f64> = (0..nb).map(|b| block.iter().map(|r| r[b]).sum()).collect();
    let mut acc = 0.0;
    for (a, row) in block.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            if p > 0.0 {
                acc += p * (p * m / (pa[a] * pb[b])).log2();
            }
        }
    }
    acc
}

/// `I(A;B)` in bits, with `0 log 0 = 0`.
pub fn mutual_information(p: &[Vec<f64>]) -> Result<f64> {
    validate_bipartite(p)?;
    Ok(mi_weighted(p).max(0.0))
}

/// `I(A;B|E) = Σ_e P(e) I(A;B | E=e)` in bits.
pub fn conditional_mutual_information(t: &TripartiteTable) -> f64 {
    let (na, nb, ne) = t.dims();
    let mut acc = 0.0;
    for e in 0..ne {
        let block: Vec<Vec<f64>> = (0..na).map(|a| (0..nb).map(|b| t.p(a, b, e)).collect()).collect();
        acc += mi_weighted(&block);
    }
    acc.max(0.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

/// One term `(q_k, |a_k⟩, |b_k⟩)` of an explicit product-state mixture.
pub type ProductTerm = (f64, Vec2, Vec2);

fn outcome_prob(v: &Vec2, basis: Basis, outcome: Outcome) -> f64 {
    basis.projector(outcome).expectation(v).re.clamp(0.0, 1.0)
}

/// Protocol labels `"<basis>,<outcome>"`, e.g. `"z,+1"`.
pub fn outcome_labels(protocol: &Protocol) -> Vec<(Basis, Outcome, String)> {
    protocol
        .bases()
        .iter()
        .flat_map(|&b| Outcome::ALL.map(|o| (b, o, format!("{},{}", b.label(), o.label()))))
        .collect()
}

/// Eavesdropper extension of a separable mixture: E is the mixture index.
///
/// `P((i,a), (j,b), k) = q_k · q_i q_j · ⟨a_k|P_{i,a}|a_k⟩ · ⟨b_k|P_{j,b}|b_k⟩`,
/// so each slice factorizes and `I(A;B|E) = 0`, while summing out E gives the
/// protocol distribution of the mixed state.
pub fn separable_extension(mixture: &[ProductTerm], protocol: &Protocol) -> Result<TripartiteTable> {
    if mixture.is_empty() {
        return Err(Error::usage("empty mixture"));
    }
    let mut total = 0.0;
    for (q, a, b) in mixture {
        if !q.is_finite() || *q < 0.0 {
            return Err(Error::usage(format!("invalid mixture weight {q}")));
        }
        if (vnorm(a) - 1.0).abs() > 1e-10 || (vnorm(b) - 1.0).abs() > 1e-10 {
            return Err(Error::usage("mixture vectors must be normalized"));
        }
        total += q;
    }
    if (total - 1.0).abs() > TABLE_TOL {
        return Err(Error::usage(format!("mixture weights sum to {total}")));
    }
    let labels = outcome_labels(protocol);
    let qb = protocol.basis_probability();
    let probs = labels
        .iter()
        .map(|(i, a, _)| {
            labels
                .iter()
                .map(|(j, b, _)| {
                    mixture
                        .iter()
                        .map(|(q, va, vb)| q * qb * qb * outcome_prob(va, *i, *a) * outcome_prob(vb, *j, *b))
                        .collect()
                })
                .collect()
        })
        .collect();
    let names: Vec<String> = labels.into_iter().map(|l| l.2).collect();
    TripartiteTable::new(
        names.clone(),
        names,
        (0..mixture.len()).map(|k| k.to_string()).collect(),
        probs,
    )
}

/// Minimum of `I(A;B|E)` over explicit candidate extensions of one `P(A,B)`.
///
/// This bounds the intrinsic information from above; it is not its value,
/// since the true infimum ranges over every extension an eavesdropper could
/// realize.
pub fn intrinsic_info_upper_bound(candidates: &[TripartiteTable]) -> Result<f64> {
    let first = candidates
        .first()
        .ok_or_else(|| Error::usage("no candidate extensions supplied"))?;
    let reference = first.marginal_ab();
    for c in &candidates[1..] {
        if c.alphabet_a() != first.alphabet_a() || c.alphabet_b() != first.alphabet_b() {
            return Err(Error::usage("candidate extensions use different A/B alphabets"));
        }
        let m = c.marginal_ab();
        let dev = m
            .iter()
            .flatten()
            .zip(reference.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if dev > 1e-9 {
            return Err(Error::usage(format!(
                "candidate extensions disagree on P(A,B) by {dev:e}"
            )));
        }
    }
    Ok(candidates
        .iter()
        .map(conditional_mutual_information)
        .fold(f64::INFINITY, f64::min))
}

/// Splits a single-qubit density operator into weighted pure states.
pub(crate) fn pure_terms(rho: &Op2) -> Vec<(f64, Vec2)> {
    match crate::qlinalg::hermitian_eig(&rho.hermitian_part(), 1e-9) {
        Ok(e) => (0..2)
            .filter(|&k| e.values[k] > 0.0)
            .map(|k| (e.values[k], e.vectors[k]))
            .collect(),
        Err(_) => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::joint_distribution;
    use crate::qlinalg::real_vec;
    use crate::sampling::{random_product_mixture, rng};
    use crate::states::{product_mixture_state, standard_state, StandardState};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn mutual_information_examples() {
        assert!(mutual_information(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap().abs() < 1e-15);
        assert!((mutual_information(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap() - 1.0).abs() < 1e-15);
        // Binary symmetric channel with flip 0.25: 1 − h(0.25).
        let f = 0.25;
        let p = vec![vec![(1.0 - f) / 2.0, f / 2.0], vec![f / 2.0, (1.0 - f) / 2.0]];
        let mi = mutual_information(&p).unwrap();
        let oracle = 1.0 + f * f.log2() + (1.0 - f) * (1.0 - f).log2();
        assert!((mi - oracle).abs() < 1e-14);
        assert!((mi - 0.188_721_875_540_867).abs() < 1e-12);
        assert!(mutual_information(&[vec![0.5, 0.6]]).is_err());
        assert!(mutual_information(&[vec![-0.1, 1.1]]).is_err());
    }

    #[test]
    fn cmi_examples() {
        // E independent of (A,B): I(A;B|E) = I(A;B).
        let pab = [[0.4, 0.1], [0.1, 0.4]];
        let pe = [0.3, 0.7];
        let probs = (0..2)
            .map(|a| (0..2).map(|b| (0..2).map(|e| pab[a][b] * pe[e]).collect()).collect())
            .collect();
        let t = TripartiteTable::new(labels(2), labels(2), labels(2), probs).unwrap();
        let mi = mutual_information(&[pab[0].to_vec(), pab[1].to_vec()]).unwrap();
        assert!((conditional_mutual_information(&t) - mi).abs() < 1e-14);

        // E = A = B uniform.
        let probs = (0..2)
            .map(|a| {
                (0..2)
                    .map(|b| (0..2).map(|e| if a == b && b == e { 0.5 } else { 0.0 }).collect())
                    .collect()
            })
            .collect();
        let t = TripartiteTable::new(labels(2), labels(2), labels(2), probs).unwrap();
        assert_eq!(conditional_mutual_information(&t), 0.0);
        assert!(t.slices_factorize(1e-10));
    }

    #[test]
    fn table_validation() {
        let bad = vec![vec![vec![0.5, 0.6]]];
        assert!(matches!(
            TripartiteTable::new(labels(1), labels(1), labels(2), bad),
            Err(Error::Validation(_))
        ));
        let shape = vec![vec![vec![1.0]]];
        assert!(TripartiteTable::new(labels(2), labels(1), labels(1), shape).is_err());
    }

    #[test]
    fn single_product_term() {
        let zero = real_vec([1.0, 0.0]);
        let t = separable_extension(&[(1.0, zero, zero)], &Protocol::four_state()).unwrap();
        assert!(conditional_mutual_information(&t) < 1e-12);
        let zz = t.sifted(Basis::Z).unwrap();
        let mi = mutual_information(&zz.marginal_ab()).unwrap();
        assert!(mi.abs() < 1e-12, "deterministic outcomes carry no mutual information");
        // A product state with independent basis choices leaves A and B independent.
        assert!(mutual_information(&t.marginal_ab()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn extension_marginals_match_protocol_data() {
        let mut r = rng(31);
        for proto in [Protocol::four_state(), Protocol::six_state()] {
            for _ in 0..50 {
                let mix = random_product_mixture(&mut r, 4);
                let t = separable_extension(&mix, &proto).unwrap();
                assert!(conditional_mutual_information(&t) < 1e-12);
                assert!(t.slices_factorize(1e-10));
                let state = product_mixture_state(&mix, 1e-10).unwrap();
                let d = joint_distribution(&state, &proto);
                let labels = outcome_labels(&proto);
                let m = t.marginal_ab();
                for (ia, (i, a, _)) in labels.iter().enumerate() {
                    for (jb, (j, b, _)) in labels.iter().enumerate() {
                        assert!((m[ia][jb] - d.prob(*i, *a, *j, *b)).abs() < 1e-10);
                    }
                }
            }
        }
    }

    // Werner(1/3) = (1/6) Σ_{b,s} |b,s⟩⟨b,s| ⊗ |b,s⟩*⟨b,s|*, each Pauli
    // eigenstate paired with its complex conjugate. Smaller p mixes in 𝟙/4
    // written as four z-basis product states.
    #[test]
    fn werner_separable_decomposition() {
        for &p in &[0.0, 0.1, 0.25, 1.0 / 3.0] {
            let mut mix = Vec::new();
            let w = 3.0 * p;
            for b in Basis::ALL {
                for s in Outcome::ALL {
                    let v = b.eigenvector(s);
                    mix.push((w / 6.0, v, v.map(|z| z.conj())));
                }
            }
            for a in Outcome::ALL {
                for bb in Outcome::ALL {
                    mix.push(((1.0 - w) / 4.0, Basis::Z.eigenvector(a), Basis::Z.eigenvector(bb)));
                }
            }
            let state = product_mixture_state(&mix, 1e-10).unwrap();
            let werner = standard_state(StandardState::Werner(p)).unwrap();
            assert!(state.rho().max_abs_diff(werner.rho()) < 1e-12, "p = {p}");
            let t = separable_extension(&mix, &Protocol::six_state()).unwrap();
            assert!(conditional_mutual_information(&t) < 1e-12);
        }
    }

    #[test]
    fn upper_bound_over_candidates() {
        let zero = real_vec([1.0, 0.0]);
        let one = real_vec([0.0, 1.0]);
        let mix = vec![(0.5, zero, zero), (0.5, one, one)];
        let sep = separable_extension(&mix, &Protocol::four_state()).unwrap();
        // Same P(A,B) with E carrying no information.
        let pab = sep.marginal_ab();
        let trivial_probs = pab.iter().map(|r| r.iter().map(|p| vec![*p]).collect()).collect();
        let trivial = TripartiteTable::new(
            sep.alphabet_a().to_vec(),
            sep.alphabet_b().to_vec(),
            vec!["-".into()],
            trivial_probs,
        )
        .unwrap();
        let mi = mutual_information(&pab).unwrap();
        assert!((intrinsic_info_upper_bound(std::slice::from_ref(&trivial)).unwrap() - mi).abs() < 1e-14);
        assert!(intrinsic_info_upper_bound(&[trivial.clone(), sep.clone()]).unwrap() < 1e-12);

        // Two handcrafted extensions of the BSC(0.25) table.
        let f = 0.25;
        let bsc = [[(1.0 - f) / 2.0, f / 2.0], [f / 2.0, (1.0 - f) / 2.0]];
        let e_half = TripartiteTable::new(
            labels(2),
            labels(2),
            labels(2),
            (0..2)
                .map(|a| (0..2).map(|b| vec![bsc[a][b] / 2.0; 2]).collect())
                .collect(),
        )
        .unwrap();
        // E reveals whether an error happened.
        let e_err = TripartiteTable::new(
            labels(2),
            labels(2),
            labels(2),
            (0..2)
                .map(|a| {
                    (0..2)
                        .map(|b| {
                            if a == b {
                                vec![bsc[a][b], 0.0]
                            } else {
                                vec![0.0, bsc[a][b]]
                            }
                        })
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        let c1 = conditional_mutual_information(&e_half);
        let c2 = conditional_mutual_information(&e_err);
        // Knowing the error pattern leaves one full bit of shared randomness.
        assert!((c2 - 1.0).abs() < 1e-14);
        assert!((c1 - (1.0 - binary_entropy(f))).abs() < 1e-14);
        assert_eq!(
            intrinsic_info_upper_bound(&[e_err.clone(), e_half.clone()]).unwrap(),
            c1.min(c2)
        );

        assert!(intrinsic_info_upper_bound(&[]).is_err());
        assert!(intrinsic_info_upper_bound(&[e_half, trivial]).is_err());
    }
}
