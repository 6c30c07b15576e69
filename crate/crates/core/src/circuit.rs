//! Trotter circuit compilation.
//!
//! A compiled circuit has three sections: singlet preparation on the
//! electron qubits, `n` identical first-order Trotter steps, and the
//! basis change that maps the singlet onto the computational outcome `|11⟩`.
//! Rotation convention: `R_P(φ) = exp(−i φ/2 P)`, so a term `c·P` evolved for
//! `Δt` becomes `R_P(2 c Δt / ħ)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spinham::{build_pauli_terms, Pauli, PauliTerm, RadicalPairSystem};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    X(usize),
    H(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    /// `exp(−i φ/2 σ_a ⊗ σ_b)` on `qubits = [q_a, q_b]`.
    PauliRot2 {
        qubits: [usize; 2],
        paulis: [Pauli; 2],
        angle: f64,
    },
}

/// Gate kind without operands, for census.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    H,
    Cnot,
    Rx,
    Ry,
    Rz,
    PauliRot2,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Cnot => "CNOT",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::PauliRot2 => "PAULIROT2",
        };
        f.write_str(s)
    }
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X(_) => GateKind::X,
            Gate::H(_) => GateKind::H,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Rx(..) => GateKind::Rx,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Rz(..) => GateKind::Rz,
            Gate::PauliRot2 { .. } => GateKind::PauliRot2,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::H(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::PauliRot2 { qubits, .. } => qubits.to_vec(),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, a) | Gate::Ry(_, a) | Gate::Rz(_, a) => Some(a),
            Gate::PauliRot2 { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::PauliRot2 { .. })
    }

    fn check(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.iter().any(|&q| q >= n_qubits) {
            return Err(Error::InvalidParameter(format!(
                "gate {self} addresses a qubit outside 0..{n_qubits}"
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidParameter(format!(
                "gate {self} repeats qubit {}",
                qs[0]
            )));
        }
        if self.angle().is_some_and(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gate {self} has a non-finite angle"
            )));
        }
        Ok(())
    }
}

/// Text form `KIND q0[,q1][,angle_rad]`, e.g. `RX 0,5.86263e-1`, `RXZ 0,2,1.5e-1`.
impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) => write!(f, "X {q}"),
            Gate::H(q) => write!(f, "H {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control},{target}"),
            Gate::Rx(q, a) => write!(f, "RX {q},{a:.16e}"),
            Gate::Ry(q, a) => write!(f, "RY {q},{a:.16e}"),
            Gate::Rz(q, a) => write!(f, "RZ {q},{a:.16e}"),
            Gate::PauliRot2 {
                qubits: [a, b],
                paulis: [pa, pb],
                angle,
            } => write!(f, "R{}{} {a},{b},{angle:.16e}", pa.symbol(), pb.symbol()),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse gate line `{line}`"));
        let (kind, args) = line.trim().split_once(' ').ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let q =
            |i: usize| -> Result<usize> { args.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let a =
            |i: usize| -> Result<f64> { args.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(bad()) };
        let gate = match kind {
            "X" => {
                arity(1)?;
                Gate::X(q(0)?)
            }
            "H" => {
                arity(1)?;
                Gate::H(q(0)?)
            }
            "CNOT" => {
                arity(2)?;
                Gate::Cnot {
                    control: q(0)?,
                    target: q(1)?,
                }
            }
            "RX" => {
                arity(2)?;
                Gate::Rx(q(0)?, a(1)?)
            }
            "RY" => {
                arity(2)?;
                Gate::Ry(q(0)?, a(1)?)
            }
            "RZ" => {
                arity(2)?;
                Gate::Rz(q(0)?, a(1)?)
            }
            k if k.len() == 3 && k.starts_with('R') => {
                arity(3)?;
                let mut cs = k.chars().skip(1);
                let pa = cs.next().and_then(Pauli::from_symbol).ok_or_else(bad)?;
                let pb = cs.next().and_then(Pauli::from_symbol).ok_or_else(bad)?;
                if pa == Pauli::I || pb == Pauli::I {
                    return Err(bad());
                }
                Gate::PauliRot2 {
                    qubits: [q(0)?, q(1)?],
                    paulis: [pa, pb],
                    angle: a(2)?,
                }
            }
            _ => return Err(bad()),
        };
        Ok(gate)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetadata {
    pub system_hash: String,
    /// Pauli labels of the terms in the order they appear in each step.
    pub term_order: Vec<String>,
}

/// Gate program `prep ++ n × step ++ basis change`, stored with the step
/// once and a repeat count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    prep: Vec<Gate>,
    step: Vec<Gate>,
    trotter_steps: usize,
    basis_change: Vec<Gate>,
    target_time: f64,
    pub metadata: CircuitMetadata,
}

impl Circuit {
    /// Unstructured circuit: every gate counts as overhead, no Trotter steps.
    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        Self::from_sections(n_qubits, gates, Vec::new(), 0, Vec::new(), 0.0)
    }

    pub fn from_sections(
        n_qubits: usize,
        prep: Vec<Gate>,
        step: Vec<Gate>,
        trotter_steps: usize,
        basis_change: Vec<Gate>,
        target_time: f64,
    ) -> Result<Self> {
        for g in prep.iter().chain(&step).chain(&basis_change) {
            g.check(n_qubits)?;
        }
        Ok(Self {
            n_qubits,
            prep,
            step,
            trotter_steps,
            basis_change,
            target_time,
            metadata: CircuitMetadata::default(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Every gate in execution order.
    pub fn gates(&self) -> impl Iterator<Item = &Gate> + '_ {
        self.prep
            .iter()
            .chain((0..self.trotter_steps).flat_map(move |_| self.step.iter()))
            .chain(self.basis_change.iter())
    }

    pub fn trotter_steps(&self) -> usize {
        self.trotter_steps
    }

    pub fn target_time(&self) -> f64 {
        self.target_time
    }

    pub fn len(&self) -> usize {
        self.prep.len() + self.step.len() * self.trotter_steps + self.basis_change.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn prep(&self) -> &[Gate] {
        &self.prep
    }

    /// Gates of one Trotter step (empty when there are none).
    pub fn step(&self) -> &[Gate] {
        &self.step
    }

    pub fn basis_change(&self) -> &[Gate] {
        &self.basis_change
    }

    /// Line-oriented dump with `# qubits=` and `# steps=` headers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# qubits={}", self.n_qubits);
        let _ = writeln!(out, "# steps={}", self.trotter_steps);
        let _ = writeln!(out, "# time_us={:.16e}", self.target_time);
        let _ = writeln!(
            out,
            "# sections={},{},{}",
            self.prep.len(),
            self.step.len(),
            self.basis_change.len()
        );
        if !self.metadata.system_hash.is_empty() {
            let _ = writeln!(out, "# system={}", self.metadata.system_hash);
        }
        if !self.metadata.term_order.is_empty() {
            let _ = writeln!(out, "# terms={}", self.metadata.term_order.join(","));
        }
        for g in self.gates() {
            let _ = writeln!(out, "{g}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_qubits = None;
        let mut steps = 0usize;
        let mut time = 0.0;
        let mut sections = None;
        let mut meta = CircuitMetadata::default();
        let mut gates = Vec::new();
        let bad = |l: &str| Error::InvalidParameter(format!("bad circuit header `{l}`"));
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(h) = line.strip_prefix('#') {
                let (k, v) = h.trim().split_once('=').ok_or_else(|| bad(line))?;
                match k {
                    "qubits" => n_qubits = Some(v.parse().map_err(|_| bad(line))?),
                    "steps" => steps = v.parse().map_err(|_| bad(line))?,
                    "time_us" => time = v.parse().map_err(|_| bad(line))?,
                    "sections" => {
                        let p: Vec<usize> = v
                            .split(',')
                            .map(|s| s.parse().map_err(|_| bad(line)))
                            .collect::<Result<_>>()?;
                        if p.len() != 3 {
                            return Err(bad(line));
                        }
                        sections = Some((p[0], p[1], p[2]));
                    }
                    "system" => meta.system_hash = v.to_string(),
                    "terms" => meta.term_order = v.split(',').map(String::from).collect(),
                    _ => {}
                }
            } else {
                gates.push(line.parse::<Gate>()?);
            }
        }
        let n_qubits =
            n_qubits.ok_or_else(|| Error::InvalidParameter("missing `# qubits=` header".into()))?;
        let (prep_len, step_len, tail_len) = sections.unwrap_or((gates.len(), 0, 0));
        if prep_len + step_len * steps + tail_len != gates.len() {
            return Err(Error::InvalidParameter(
                "section lengths do not match gate count".into(),
            ));
        }
        let step: Vec<Gate> = gates[prep_len..prep_len + step_len].to_vec();
        for k in 1..steps {
            let at = prep_len + k * step_len;
            if gates[at..at + step_len] != step[..] {
                return Err(Error::InvalidParameter(format!(
                    "trotter step {k} differs from step 0"
                )));
            }
        }
        let tail = gates.split_off(prep_len + step_len * steps);
        gates.truncate(prep_len);
        let mut c = Self::from_sections(n_qubits, gates, step, steps, tail, time)?;
        c.metadata = meta;
        Ok(c)
    }
}

/// `X(0), X(1), H(0), CNOT(0→1)`: takes `|00⟩` to `(|01⟩ − |10⟩)/√2`.
pub fn prepare_singlet() -> Vec<Gate> {
    vec![
        Gate::X(0),
        Gate::X(1),
        Gate::H(0),
        Gate::Cnot {
            control: 0,
            target: 1,
        },
    ]
}

/// Inverse of the entangling half of [`prepare_singlet`]: the singlet maps to `|11⟩`.
pub fn measurement_basis_change() -> Vec<Gate> {
    vec![
        Gate::Cnot {
            control: 0,
            target: 1,
        },
        Gate::H(0),
    ]
}

/// One first-order Trotter step: each term becomes a rotation by
/// `2 c Δt / ħ`, in term order. Identity-only terms contribute a global phase
/// and are skipped.
pub fn trotter_step(terms: &[PauliTerm], delta_t: f64, hbar: f64) -> Result<Vec<Gate>> {
    if !(delta_t.is_finite() && delta_t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta_t must be >= 0, got {delta_t}"
        )));
    }
    let mut gates = Vec::with_capacity(terms.len());
    for term in terms {
        let angle = 2.0 * term.coefficient * delta_t / hbar;
        match term.support().as_slice() {
            [] => {}
            [(q, p)] => gates.push(match p {
                Pauli::X => Gate::Rx(*q, angle),
                Pauli::Y => Gate::Ry(*q, angle),
                Pauli::Z => Gate::Rz(*q, angle),
                Pauli::I => unreachable!(),
            }),
            [(qa, pa), (qb, pb)] => gates.push(Gate::PauliRot2 {
                qubits: [*qa, *qb],
                paulis: [*pa, *pb],
                angle,
            }),
            wide => return Err(Error::TermTooWide(wide.len())),
        }
    }
    Ok(gates)
}

/// `prepare_singlet ++ n × trotter_step(t/n) ++ basis change`.
pub fn compile(system: &RadicalPairSystem, t: f64, n: usize) -> Result<Circuit> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "evolution time must be >= 0, got {t}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("trotter_steps must be >= 1".into()));
    }
    let terms = build_pauli_terms(system);
    let step = trotter_step(&terms, t / n as f64, system.hbar)?;
    let mut c = Circuit::from_sections(
        system.n_sites(),
        prepare_singlet(),
        step,
        n,
        measurement_basis_change(),
        t,
    )?;
    c.metadata = CircuitMetadata {
        system_hash: system.content_hash(),
        term_order: terms.iter().map(PauliTerm::label).collect(),
    };
    Ok(c)
}

/// Which exactly-zero rotations are dropped when lowering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroAnglePolicy {
    /// Keep every rotation.
    KeepAll,
    /// Drop zero-angle single-qubit rotations, lower every two-qubit rotation.
    #[default]
    PruneSingleQubit,
    /// Drop every zero-angle rotation.
    PruneAll,
}

fn lower_gate(g: &Gate, policy: ZeroAnglePolicy, out: &mut Vec<Gate>) {
    match *g {
        Gate::Rx(_, a) | Gate::Ry(_, a) | Gate::Rz(_, a)
            if a == 0.0 && policy != ZeroAnglePolicy::KeepAll => {}
        Gate::PauliRot2 { angle, .. } if angle == 0.0 && policy == ZeroAnglePolicy::PruneAll => {}
        Gate::PauliRot2 {
            qubits: [qa, qb],
            paulis,
            angle,
        } => {
            let into = |q: usize, p: Pauli, out: &mut Vec<Gate>| match p {
                Pauli::X => out.push(Gate::H(q)),
                Pauli::Y => out.push(Gate::Rx(q, FRAC_PI_2)),
                _ => {}
            };
            let back = |q: usize, p: Pauli, out: &mut Vec<Gate>| match p {
                Pauli::X => out.push(Gate::H(q)),
                Pauli::Y => out.push(Gate::Rx(q, -FRAC_PI_2)),
                _ => {}
            };
            into(qa, paulis[0], out);
            into(qb, paulis[1], out);
            out.push(Gate::Cnot {
                control: qa,
                target: qb,
            });
            out.push(Gate::Rz(qb, angle));
            out.push(Gate::Cnot {
                control: qa,
                target: qb,
            });
            back(qa, paulis[0], out);
            back(qb, paulis[1], out);
        }
        other => out.push(other),
    }
}

fn lower_slice(gates: &[Gate], policy: ZeroAnglePolicy) -> Vec<Gate> {
    let mut out = Vec::with_capacity(gates.len() * 4);
    for g in gates {
        lower_gate(g, policy, &mut out);
    }
    out
}

/// Rewrite over `{X, H, CNOT, RX, RY, RZ}`. Each `PauliRot2(α, β, φ)` becomes
/// basis change in, `CNOT·RZ(φ)·CNOT`, basis change out (X: H…H,
/// Y: RX(π/2)…RX(−π/2), Z: nothing).
pub fn lower_to_basis(circuit: &Circuit, policy: ZeroAnglePolicy) -> Circuit {
    let prep = lower_slice(circuit.prep(), policy);
    let step = lower_slice(circuit.step(), policy);
    let tail = lower_slice(circuit.basis_change(), policy);
    let mut c = Circuit::from_sections(
        circuit.n_qubits,
        prep,
        step,
        circuit.trotter_steps,
        tail,
        circuit.target_time,
    )
    .expect("lowering keeps qubit indices and angles valid");
    c.metadata = circuit.metadata.clone();
    c
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCount {
    pub total: usize,
    pub per_kind: BTreeMap<GateKind, usize>,
    /// Gates inside the Trotter steps only.
    pub trotter_only: usize,
}

pub fn gate_count(circuit: &Circuit) -> GateCount {
    let mut per_kind = BTreeMap::new();
    let sections = [
        (circuit.prep(), 1),
        (circuit.step(), circuit.trotter_steps()),
        (circuit.basis_change(), 1),
    ];
    for (gates, times) in sections {
        for g in gates {
            *per_kind.entry(g.kind()).or_insert(0) += times;
        }
    }
    per_kind.retain(|_, c| *c > 0);
    GateCount {
        total: circuit.len(),
        per_kind,
        trotter_only: circuit.step().len() * circuit.trotter_steps(),
    }
}
