//! Entanglement witnesses evaluable from protocol data.
//!
//! A 4-state run (bases x and z) only determines the Pauli expectations
//! `t_ij` with `i, j ∈ {0, x, z}`. The witnesses it can evaluate are exactly
//! the operators `Σ_{i,j∈{0,x,z}} c_ij σ_i⊗σ_j` (the EW₄ class), i.e. those
//! with `W = Wᵀ = W^{T_B}`. For such a witness `Tr(Wρ) = Tr(WΩ)` with
//!
//! ```text
//! Ω = ¼ (ρ + ρ^{T_A} + ρ^{T_B} + ρᵀ) = ¼ Σ_{i,j∈{0,x,z}} t_ij σ_i⊗σ_j,
//! ```
//!
//! which the data fixes completely. If `Ω ≥ 0` it is a PPT-invariant state,
//! hence separable, and no EW₄ witness can fire. If `Ω` has a negative
//! eigenvalue, its (real) eigenvector `φ` gives the witness
//! `W = ½(Q + Q^{T_B})`, `Q = |φ⟩⟨φ|`, whose data value equals that
//! eigenvalue. [`detect_4state`] therefore decides detectability with one
//! 4×4 eigensolve; [`grid_search_family`] scans the same family directly and
//! serves as the independent cross-check.
//!
//! For 6-state data the table is complete, ρ is reconstructed, and the
//! partial-transpose test yields an optimal witness `|φ⟩⟨φ|^{T_B}`.

use crate::error::{Error, Result};
use crate::measurements::{observed_pauli_table, Basis, JointDistribution, ObservedTable, Outcome};
use crate::par;
use crate::qlinalg::{hermitian_eig, partial_transpose, pauli_product, schmidt_decompose, Op4, Pauli, Side, Vec4, C64};
use crate::states::{is_ppt, make_state, pauli_coordinates, rho_from_pauli, PauliTable, PptVerdict, TwoQubitState};

/// Threshold below which a Pauli coefficient counts as zero when deciding
/// whether a witness needs an unobserved expectation.
const COEFF_ZERO: f64 = 1e-12;

/// Indices of σ₀, σ_x, σ_z.
const EW4_PAULIS: [Pauli; 3] = [Pauli::I, Pauli::X, Pauli::Z];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessClass {
    /// Evaluable from x/z data: no σ_y factors.
    EW4,
    /// `|φ_e⟩⟨φ_e|^{T_B}` for an entangled `φ_e`.
    OEW,
    General,
}

impl WitnessClass {
    pub fn name(self) -> &'static str {
        match self {
            WitnessClass::EW4 => "EW4",
            WitnessClass::OEW => "OEW",
            WitnessClass::General => "General",
        }
    }
}

/// `W = Σ c_ij σ_i⊗σ_j` with real coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    coefficients: PauliTable,
    generator: Option<Vec4>,
    class: WitnessClass,
}

impl Witness {
    pub fn general(coefficients: PauliTable) -> Self {
        Witness {
            coefficients,
            generator: None,
            class: WitnessClass::General,
        }
    }

    /// Coefficients of a Hermitian operator: `c_ij = Tr(W σ_i⊗σ_j) / 4`.
    pub fn from_operator(w: &Op4) -> Self {
        let t = pauli_coordinates(w);
        Self::general(t.map(|row| row.map(|x| x / 4.0)))
    }

    pub fn coefficients(&self) -> &PauliTable {
        &self.coefficients
    }

    pub fn c(&self, i: Pauli, j: Pauli) -> f64 {
        self.coefficients[i.index()][j.index()]
    }

    pub fn generator(&self) -> Option<&Vec4> {
        self.generator.as_ref()
    }

    pub fn class(&self) -> WitnessClass {
        self.class
    }

    pub fn operator(&self) -> Op4 {
        let mut w = Op4::zeros();
        for i in Pauli::ALL {
            for j in Pauli::ALL {
                let c = self.c(i, j);
                if c != 0.0 {
                    w = w + pauli_product(i, j).scale_real(c);
                }
            }
        }
        w
    }

    pub fn trace(&self) -> f64 {
        4.0 * self.coefficients[0][0]
    }

    /// `Tr(W ρ)` computed from the density matrix.
    pub fn expectation(&self, state: &TwoQubitState) -> f64 {
        self.operator().trace_product(state.rho()).re
    }

    fn has_y_terms(&self) -> bool {
        (0..4).any(|k| {
            self.coefficients[Pauli::Y.index()][k].abs() > COEFF_ZERO
                || self.coefficients[k][Pauli::Y.index()].abs() > COEFF_ZERO
        })
    }
}

/// Outcome of a detection attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Detected,
    NotDetected,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Detected => "Detected",
            Verdict::NotDetected => "NotDetected",
        }
    }

    pub fn is_detected(self) -> bool {
        self == Verdict::Detected
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub verdict: Verdict,
    /// Present iff detected.
    pub witness: Option<Witness>,
    /// Witness value certified from the data. When nothing is detected this
    /// is the smallest value any witness of the searched family attains.
    pub value: f64,
    /// `−value − tol`; positive means detected with that much room.
    pub margin: f64,
}

impl DetectionResult {
    fn new(value: f64, witness: Option<Witness>, tol: f64) -> Self {
        let detected = value < -tol && witness.is_some();
        DetectionResult {
            verdict: if detected {
                Verdict::Detected
            } else {
                Verdict::NotDetected
            },
            witness: if detected { witness } else { None },
            value,
            margin: -value - tol,
        }
    }
}

/// `Ω = ¼(ρ + ρ^{T_A} + ρ^{T_B} + ρᵀ)` from the full density matrix.
pub fn omega(state: &TwoQubitState) -> Op4 {
    let r = *state.rho();
    (r + partial_transpose(&r, Side::A) + partial_transpose(&r, Side::B) + r.transpose()).scale_real(0.25)
}

/// `Ω = ¼ Σ_{i,j∈{0,x,z}} t_ij σ_i⊗σ_j` from observed expectations alone.
pub fn omega_from_table(table: &ObservedTable) -> Result<Op4> {
    let mut out = Op4::zeros();
    for i in EW4_PAULIS {
        for j in EW4_PAULIS {
            let t = table.get(i, j).ok_or_else(|| {
                Error::usage(format!(
                    "observed table lacks t_{}{}, required for Omega",
                    i.label(),
                    j.label()
                ))
            })?;
            out = out + pauli_product(i, j).scale_real(0.25 * t);
        }
    }
    Ok(out)
}

/// `W = Wᵀ = W^{T_B}` within `tol` (max-entry norm).
pub fn is_ew4(w: &Witness, tol: f64) -> bool {
    let op = w.operator();
    op.max_abs_diff(&op.transpose()) <= tol && op.max_abs_diff(&partial_transpose(&op, Side::B)) <= tol
}

/// Coefficients of `½(Q + Q^{T_B})` for a real vector `φ`, `Q = |φ⟩⟨φ|`.
///
/// For `i, j ∈ {0,x,z}` the Paulis are real symmetric, so both halves
/// contribute `⟨φ|σ_i⊗σ_j|φ⟩`; every σ_y term cancels. Hence
/// `c_ij = ⟨φ|σ_i⊗σ_j|φ⟩ / 4`. Pure real arithmetic, no allocation.
pub fn family_coefficients(phi: &[f64; 4]) -> PauliTable {
    // (σ_p|ab⟩) = sign · |flip(a)⟩ for p ∈ {0, x, z}.
    #[inline]
    fn act(p: usize, bit: usize) -> (usize, f64) {
        match p {
            1 => (bit ^ 1, 1.0),
            3 => (bit, if bit == 0 { 1.0 } else { -1.0 }),
            _ => (bit, 1.0),
        }
    }
    let mut c = [[0.0; 4]; 4];
    for &pi in &[0usize, 1, 3] {
        for &pj in &[0usize, 1, 3] {
            let mut acc = 0.0;
            for a in 0..2 {
                let (fa, sa) = act(pi, a);
                for b in 0..2 {
                    let (fb, sb) = act(pj, b);
                    acc += phi[2 * fa + fb] * sa * sb * phi[2 * a + b];
                }
            }
            c[pi][pj] = acc / 4.0;
        }
    }
    c
}

/// The family member `W = ½(Q + Q^{T_B})` generated by a real entangled
/// unit vector. `Tr W = 1` and W belongs to EW₄.
///
/// Imaginary parts up to 1e-12 are truncated; larger ones, non-unit norm, or
/// a Schmidt coefficient `≤ tol` are usage errors.
pub fn witness_from_real_state(phi: &Vec4, tol: f64) -> Result<Witness> {
    if phi.iter().any(|z| z.im.abs() > 1e-12) {
        return Err(Error::usage("generator must be a real vector"));
    }
    let real: [f64; 4] = phi.map(|z| z.re);
    let norm = real.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::usage(format!("generator has norm {norm}, expected 1")));
    }
    let cvec = real.map(|x| C64::new(x, 0.0));
    let schmidt = schmidt_decompose(&cvec)?;
    if schmidt.coefficients[1] <= tol {
        return Err(Error::usage(
            "not an entangled generator: vector is (numerically) a product state",
        ));
    }
    Ok(Witness {
        coefficients: family_coefficients(&real),
        generator: Some(cvec),
        class: WitnessClass::EW4,
    })
}

/// Optimal witness `|φ⟩⟨φ|^{T_B}` for an entangled (complex) `φ`.
pub fn optimal_witness(phi: &Vec4, tol: f64) -> Result<Witness> {
    let schmidt = schmidt_decompose(phi)?;
    if schmidt.coefficients[1] <= tol {
        return Err(Error::usage(
            "not an entangled generator: vector is (numerically) a product state",
        ));
    }
    let op = partial_transpose(&Op4::outer(phi), Side::B);
    let mut w = Witness::from_operator(&op);
    w.generator = Some(*phi);
    w.class = WitnessClass::OEW;
    Ok(w)
}

/// `Tr(Wρ) = Σ c_ij t_ij` using only the observed expectations.
///
/// Fails if the witness needs an expectation the protocol does not provide,
/// e.g. any σ_y term against 4-state data.
pub fn evaluate_from_data(w: &Witness, dist: &JointDistribution) -> Result<f64> {
    evaluate_on_table(w, &observed_pauli_table(dist))
}

pub fn evaluate_on_table(w: &Witness, table: &ObservedTable) -> Result<f64> {
    let mut acc = 0.0;
    for i in Pauli::ALL {
        for j in Pauli::ALL {
            let c = w.c(i, j);
            match table.get(i, j) {
                Some(t) => acc += c * t,
                None if c.abs() <= COEFF_ZERO => {}
                None => {
                    return Err(Error::usage(format!(
                        "witness has coefficient {c:e} on σ_{}⊗σ_{}, which the data does not determine",
                        i.label(),
                        j.label()
                    )))
                }
            }
        }
    }
    Ok(acc)
}

/// A measurable projector `P_{basis, outcome}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjLabel {
    pub basis: Basis,
    pub outcome: Outcome,
}

/// `W = Σ c_k P_{a_k} ⊗ P_{b_k}` over protocol projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoMixture {
    pub terms: Vec<(f64, ProjLabel, ProjLabel)>,
}

impl PseudoMixture {
    pub fn operator(&self) -> Op4 {
        self.terms.iter().fold(Op4::zeros(), |acc, (c, a, b)| {
            acc + crate::qlinalg::kron(&a.basis.projector(a.outcome), &b.basis.projector(b.outcome)).scale_real(*c)
        })
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.0).sum()
    }

    /// `Σ c_k P(a_k, b_k | basis pair)`, the witness value as a linear
    /// functional of the observed conditional probabilities.
    pub fn evaluate(&self, dist: &JointDistribution) -> Result<f64> {
        let mut acc = 0.0;
        for (c, a, b) in &self.terms {
            if !dist.protocol().uses(a.basis) || !dist.protocol().uses(b.basis) {
                return Err(Error::usage("pseudo-mixture uses a basis the protocol lacks"));
            }
            acc += c * dist.conditional(a.basis, b.basis)[a.outcome.index()][b.outcome.index()];
        }
        Ok(acc)
    }
}

// Weight of P_{basis,outcome} when expanding σ_p, with
// 𝟙 = ½(P_{x,+} + P_{x,−}) + ½(P_{z,+} + P_{z,−}).
fn split_weight(p: Pauli, basis: Basis, outcome: Outcome) -> f64 {
    match p {
        Pauli::I => 0.5,
        Pauli::X if basis == Basis::X => outcome.sign(),
        Pauli::Z if basis == Basis::Z => outcome.sign(),
        _ => 0.0,
    }
}

/// Decomposes an EW₄ witness over the 16 products of x/z eigenprojectors.
///
/// Each identity factor is split evenly between the x and z projector pairs,
/// which makes the coefficients unique. Their sum equals `Tr W`.
pub fn pseudo_mixture(w: &Witness) -> Result<PseudoMixture> {
    if w.has_y_terms() {
        return Err(Error::usage("pseudo-mixture over x/z projectors needs an EW4 witness"));
    }
    let projs: Vec<ProjLabel> = [Basis::X, Basis::Z]
        .iter()
        .flat_map(|&basis| Outcome::ALL.map(|outcome| ProjLabel { basis, outcome }))
        .collect();
    let mut terms = Vec::with_capacity(16);
    for a in &projs {
        for b in &projs {
            let mut c = 0.0;
            for i in EW4_PAULIS {
                for j in EW4_PAULIS {
                    c += w.c(i, j) * split_weight(i, a.basis, a.outcome) * split_weight(j, b.basis, b.outcome);
                }
            }
            terms.push((c, *a, *b));
        }
    }
    Ok(PseudoMixture { terms })
}

fn real_min_vector(v: &Vec4) -> Result<[f64; 4]> {
    if v.iter().any(|z| z.im.abs() > 1e-12) {
        return Err(Error::numeric(
            "eigenvector of the real operator Omega came out complex",
        ));
    }
    let r = v.map(|z| z.re);
    let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(r.map(|x| x / n))
}

/// Decides whether 4-state data proves entanglement.
///
/// Builds Ω from the observed x/z expectations and takes its smallest
/// eigenvalue. Negative beyond `tol` → the eigenvector's family witness
/// certifies entanglement, with its value computed from the data. Otherwise
/// no EW₄ witness can detect these correlations.
pub fn detect_4state(dist: &JointDistribution, tol: f64) -> Result<DetectionResult> {
    let table = observed_pauli_table(dist);
    let om = omega_from_table(&table)?;
    let eig = hermitian_eig(&om, 1e-10)?;
    let lambda = eig.min_value();
    if lambda >= -tol {
        return Ok(DetectionResult::new(lambda, None, tol));
    }
    let phi = real_min_vector(&eig.min_vector())?;
    let w = witness_from_real_state(&phi.map(|x| C64::new(x, 0.0)), 0.0)?;
    let value = evaluate_on_table(&w, &table)?;
    Ok(DetectionResult::new(value, Some(w), tol))
}

/// Decides whether 6-state data proves entanglement via tomography and the
/// partial-transpose test; reports the optimal witness when NPT.
pub fn detect_6state(dist: &JointDistribution, tol: f64) -> Result<DetectionResult> {
    let table = observed_pauli_table(dist);
    let full = table
        .to_full()
        .ok_or_else(|| Error::usage("6-state detection needs a complete Pauli table"))?;
    let rho_hat = reconstruct_state(&full, tol)?;
    let ppt = is_ppt(&rho_hat, tol);
    match (ppt.verdict, ppt.neg_eigenvector) {
        (PptVerdict::Npt, Some(v)) => {
            let w = optimal_witness(&v, 0.0)?;
            let value = evaluate_on_table(&w, &table)?;
            Ok(DetectionResult::new(value, Some(w), tol))
        }
        _ => Ok(DetectionResult::new(ppt.min_eigenvalue, None, tol)),
    }
}

/// `ρ̂ = ¼ Σ t_ij σ_i⊗σ_j`, validated with tolerance `max(tol, 1e-9)`.
pub fn reconstruct_state(full: &PauliTable, tol: f64) -> Result<TwoQubitState> {
    make_state(rho_from_pauli(full), tol.max(1e-9))
        .map_err(|e| Error::validation(format!("reconstructed state is invalid: {e}")))
}

/// Real unit 4-vector from hyperspherical angles.
pub fn sphere_point(alpha: f64, beta: f64, gamma: f64) -> [f64; 4] {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    [ca, sa * cb, sa * sb * cg, sa * sb * sg]
}

fn family_value(phi: &[f64; 4], t: &[[f64; 3]; 3]) -> f64 {
    let c = family_coefficients(phi);
    let idx = [0usize, 1, 3];
    let mut acc = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            acc += c[i][j] * t[a][b];
        }
    }
    acc
}

/// Brute-force minimum of the data value over the family
/// `½(Q + Q^{T_B})`, `Q = |φ⟩⟨φ|`, with φ on a `resolution³` grid of the
/// real unit 3-sphere (one hemisphere, since ±φ give the same witness),
/// followed by a shrinking pattern search around the best grid point.
///
/// Grid evaluation runs in parallel under the `parallel` feature; ties go to
/// the lowest grid index so the result is feature-independent.
pub fn grid_search_family(dist: &JointDistribution, resolution: usize, tol: f64) -> Result<DetectionResult> {
    if resolution < 8 {
        return Err(Error::usage(format!(
            "grid resolution {resolution} below the minimum of 8"
        )));
    }
    let table = observed_pauli_table(dist);
    let mut t = [[0.0; 3]; 3];
    for (a, &i) in EW4_PAULIS.iter().enumerate() {
        for (b, &j) in EW4_PAULIS.iter().enumerate() {
            t[a][b] = table
                .get(i, j)
                .ok_or_else(|| Error::usage("grid search needs the x/z expectations"))?;
        }
    }
    let n = resolution;
    let steps = [
        std::f64::consts::FRAC_PI_2 / (n - 1) as f64,
        std::f64::consts::PI / (n - 1) as f64,
        2.0 * std::f64::consts::PI / n as f64,
    ];
    let angles = |k: usize| {
        let (ia, ib, ig) = (k / (n * n), (k / n) % n, k % n);
        [ia as f64 * steps[0], ib as f64 * steps[1], ig as f64 * steps[2]]
    };
    let f = |x: &[f64; 3]| family_value(&sphere_point(x[0], x[1], x[2]), &t);
    let (best_idx, mut best) = par::argmin_range(n * n * n, |k| f(&angles(k)))
        .ok_or_else(|| Error::numeric("grid search produced no finite value"))?;

    let mut x = angles(best_idx);
    let mut step = steps[0].min(steps[1]).min(steps[2]);
    let mut iters = 0;
    while step > 1e-12 && iters < 100_000 {
        iters += 1;
        let mut improved = false;
        for d in 0..3 {
            for s in [1.0, -1.0] {
                let mut y = x;
                y[d] += s * step;
                let v = f(&y);
                if v < best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let phi = sphere_point(x[0], x[1], x[2]);
    let witness = witness_from_real_state(&phi.map(|v| C64::new(v, 0.0)), 0.0).ok();
    let value = match &witness {
        Some(w) => evaluate_on_table(w, &table)?,
        None => best,
    };
    Ok(DetectionResult::new(value, witness, tol))
}
