//! Protocol definitions, exact joint outcome tables, sifted error rate, and
//! the Pauli expectations that a protocol's data actually determines.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qlinalg::{kron, real_vec, Op2, Pauli, Vec2, C64};
use crate::states::{PauliTable, TwoQubitState};

/// Tolerance on total probability and per-basis-pair block sums.
pub const SUM_TOL: f64 = 1e-9;

/// Measurement basis; each has outcomes `+1` and `−1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Basis::X => "x",
            Basis::Y => "y",
            Basis::Z => "z",
        }
    }

    /// Eigenvector of `σ_basis` for `outcome`.
    pub fn eigenvector(self, outcome: Outcome) -> Vec2 {
        let s = FRAC_1_SQRT_2;
        match (self, outcome) {
            (Basis::X, Outcome::Plus) => real_vec([s, s]),
            (Basis::X, Outcome::Minus) => real_vec([s, -s]),
            (Basis::Y, Outcome::Plus) => [C64::new(s, 0.0), C64::new(0.0, s)],
            (Basis::Y, Outcome::Minus) => [C64::new(s, 0.0), C64::new(0.0, -s)],
            (Basis::Z, Outcome::Plus) => real_vec([1.0, 0.0]),
            (Basis::Z, Outcome::Minus) => real_vec([0.0, 1.0]),
        }
    }

    /// `(𝟙 + s σ_basis)/2`
    pub fn projector(self, outcome: Outcome) -> Op2 {
        (Op2::identity() + self.pauli().matrix().scale_real(outcome.sign())).scale_real(0.5)
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Basis::X),
            "y" => Ok(Basis::Y),
            "z" => Ok(Basis::Z),
            _ => Err(Error::usage(format!("unknown basis '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        }
    }
}

impl FromStr for Outcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+1" | "1" => Ok(Outcome::Plus),
            "-1" => Ok(Outcome::Minus),
            _ => Err(Error::usage(format!("unknown outcome '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    FourState,
    SixState,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::FourState => "four-state",
            ProtocolKind::SixState => "six-state",
        }
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four-state" => Ok(ProtocolKind::FourState),
            "six-state" => Ok(ProtocolKind::SixState),
            _ => Err(Error::usage(format!("unknown protocol '{s}'"))),
        }
    }
}

/// A protocol: its bases (chosen uniformly) and the expected sign of `a·b`
/// in each basis when no error occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Protocol {
    kind: ProtocolKind,
    /// Indexed by [`Basis::index`]; `+1` or `−1`.
    correlation_signs: [i8; 3],
}

impl Protocol {
    /// Default signs (+1, −1, +1) for (x, y, z) match a `|Φ⁺⟩` source.
    pub fn new(kind: ProtocolKind) -> Self {
        Protocol {
            kind,
            correlation_signs: [1, -1, 1],
        }
    }

    pub fn four_state() -> Self {
        Self::new(ProtocolKind::FourState)
    }

    pub fn six_state() -> Self {
        Self::new(ProtocolKind::SixState)
    }

    pub fn with_correlation_signs(mut self, signs: [i8; 3]) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::usage("correlation signs must be +1 or -1"));
        }
        self.correlation_signs = signs;
        Ok(self)
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn bases(&self) -> &'static [Basis] {
        match self.kind {
            ProtocolKind::FourState => &[Basis::X, Basis::Z],
            ProtocolKind::SixState => &[Basis::X, Basis::Y, Basis::Z],
        }
    }

    pub fn uses(&self, b: Basis) -> bool {
        self.bases().contains(&b)
    }

    pub fn basis_probability(&self) -> f64 {
        1.0 / self.bases().len() as f64
    }

    pub fn correlation_sign(&self, b: Basis) -> f64 {
        self.correlation_signs[b.index()] as f64
    }
}

/// Probabilities indexed `[basis_a][outcome_a][basis_b][outcome_b]`.
pub type ProbTable = [[[[f64; 2]; 3]; 2]; 3];

/// Observed table `P(basis_a, a, basis_b, b)` of a protocol run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointDistribution {
    protocol: Protocol,
    probs: ProbTable,
}

impl JointDistribution {
    /// Validates nonnegativity, unit total, uniform basis-pair weights, and
    /// zero mass on bases outside the protocol.
    pub fn new(protocol: Protocol, probs: ProbTable) -> Result<Self> {
        let q = protocol.basis_probability();
        let mut total = 0.0;
        for i in Basis::ALL {
            for j in Basis::ALL {
                let mut block = 0.0;
                for a in Outcome::ALL {
                    for b in Outcome::ALL {
                        let p = probs[i.index()][a.index()][j.index()][b.index()];
                        if !p.is_finite() || p < -SUM_TOL {
                            return Err(Error::validation(format!(
                                "invalid probability {p} at ({i},{},{j},{})",
                                a.label(),
                                b.label()
                            )));
                        }
                        block += p;
                    }
                }
                let in_protocol = protocol.uses(i) && protocol.uses(j);
                let want = if in_protocol { q * q } else { 0.0 };
                if (block - want).abs() > SUM_TOL {
                    return Err(Error::validation(format!(
                        "basis pair ({i},{j}) carries probability {block}, expected {want}"
                    )));
                }
                total += block;
            }
        }
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::validation(format!("probabilities sum to {total}")));
        }
        Ok(JointDistribution { protocol, probs })
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn probs(&self) -> &ProbTable {
        &self.probs
    }

    pub fn prob(&self, i: Basis, a: Outcome, j: Basis, b: Outcome) -> f64 {
        self.probs[i.index()][a.index()][j.index()][b.index()]
    }

    /// `P(a, b | basis pair)`, indexed by outcome.
    pub fn conditional(&self, i: Basis, j: Basis) -> [[f64; 2]; 2] {
        let block = &self.probs[i.index()];
        let mut out = [[0.0; 2]; 2];
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] = block[a][j.index()][b];
                s += out[a][b];
            }
        }
        if s > 0.0 {
            for row in out.iter_mut() {
                for p in row.iter_mut() {
                    *p /= s;
                }
            }
        }
        out
    }

    /// Correlator `Σ a·b P(a,b | i,j)`.
    pub fn correlator(&self, i: Basis, j: Basis) -> f64 {
        let c = self.conditional(i, j);
        c[0][0] - c[0][1] - c[1][0] + c[1][1]
    }

    /// Iterates `(basis_a, a, basis_b, b, p)` over the protocol's entries.
    pub fn entries(&self) -> impl Iterator<Item = (Basis, Outcome, Basis, Outcome, f64)> + '_ {
        let bases = self.protocol.bases();
        bases.iter().flat_map(move |&i| {
            Outcome::ALL.into_iter().flat_map(move |a| {
                bases.iter().flat_map(move |&j| {
                    Outcome::ALL
                        .into_iter()
                        .map(move |b| (i, a, j, b, self.prob(i, a, j, b)))
                })
            })
        })
    }
}

/// `P(i,a,j,b) = q_i q_j Tr(ρ P_{i,a}⊗P_{j,b})` for uniform basis weights.
pub fn joint_distribution(state: &TwoQubitState, protocol: &Protocol) -> JointDistribution {
    let q = protocol.basis_probability();
    let mut probs: ProbTable = [[[[0.0; 2]; 3]; 2]; 3];
    for &i in protocol.bases() {
        for a in Outcome::ALL {
            for &j in protocol.bases() {
                for b in Outcome::ALL {
                    let proj = kron(&i.projector(a), &j.projector(b));
                    let p = state.rho().trace_product(&proj).re.max(0.0);
                    probs[i.index()][a.index()][j.index()][b.index()] = q * q * p;
                }
            }
        }
    }
    JointDistribution::new(*protocol, probs).expect("state-derived table is a distribution")
}

/// Error probability within one sifted basis.
pub fn qber_basis(dist: &JointDistribution, basis: Basis) -> Result<f64> {
    if !dist.protocol().uses(basis) {
        return Err(Error::usage(format!("basis {basis} is not part of the protocol")));
    }
    let c = dist.conditional(basis, basis);
    let sign = dist.protocol().correlation_sign(basis);
    let mut err = 0.0;
    for a in Outcome::ALL {
        for b in Outcome::ALL {
            if a.sign() * b.sign() != sign {
                err += c[a.index()][b.index()];
            }
        }
    }
    Ok(err)
}

/// Sifted-key error rate: error probability given matching bases.
pub fn qber(dist: &JointDistribution) -> Result<f64> {
    let mut sift = 0.0;
    let mut err = 0.0;
    let proto = dist.protocol();
    for &i in proto.bases() {
        let sign = proto.correlation_sign(i);
        for a in Outcome::ALL {
            for b in Outcome::ALL {
                let p = dist.prob(i, a, i, b);
                sift += p;
                if a.sign() * b.sign() != sign {
                    err += p;
                }
            }
        }
    }
    if sift <= 0.0 {
        return Err(Error::usage("no sifted events: cannot condition on matching bases"));
    }
    Ok((err / sift).clamp(0.0, 1.0))
}

/// Pauli expectations recoverable from a protocol's data. Entries the
/// protocol cannot reach are `None`, never zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservedTable {
    entries: [[Option<f64>; 4]; 4],
}

impl ObservedTable {
    pub fn get(&self, i: Pauli, j: Pauli) -> Option<f64> {
        self.entries[i.index()][j.index()]
    }

    pub fn entries(&self) -> &[[Option<f64>; 4]; 4] {
        &self.entries
    }

    /// The full table, if every entry is present.
    pub fn to_full(&self) -> Option<PauliTable> {
        let mut t = [[0.0; 4]; 4];
        for (row, entries) in t.iter_mut().zip(&self.entries) {
            for (x, e) in row.iter_mut().zip(entries) {
                *x = (*e)?;
            }
        }
        Some(t)
    }
}

pub fn observed_pauli_table(dist: &JointDistribution) -> ObservedTable {
    let bases = dist.protocol().bases();
    let mut entries = [[None; 4]; 4];
    entries[0][0] = Some(1.0);
    for &i in bases {
        for &j in bases {
            entries[i.pauli().index()][j.pauli().index()] = Some(dist.correlator(i, j));
        }
    }
    // Single-sided expectations, averaged over the other party's bases.
    let n = bases.len() as f64;
    for &i in bases {
        let mut ta = 0.0;
        let mut tb = 0.0;
        for &j in bases {
            let ca = dist.conditional(i, j);
            ta += ca[0][0] + ca[0][1] - ca[1][0] - ca[1][1];
            let cb = dist.conditional(j, i);
            tb += cb[0][0] - cb[0][1] + cb[1][0] - cb[1][1];
        }
        entries[i.pauli().index()][0] = Some(ta / n);
        entries[0][i.pauli().index()] = Some(tb / n);
    }
    ObservedTable { entries }
}
