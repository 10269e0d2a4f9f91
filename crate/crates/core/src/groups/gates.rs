//! Reversible gate sets placed on contiguous wires, and decomposition of even
//! permutations into placed gates.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::bsgs::Bsgs;
use super::factor::{Factorizer, Letter};
use super::perm::Perm;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub perm: Perm,
}

impl Gate {
    pub fn width(&self) -> u32 {
        self.perm.width().expect("gate perms act on bit strings")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSet {
    gates: Vec<Gate>,
}

/// One gate application: `gate` on wires `offset .. offset + width`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateStep {
    pub gate: String,
    pub offset: u32,
}

pub type GateSequence = Vec<GateStep>;

pub fn not_gate() -> Perm {
    Perm::from_table(vec![1, 0]).unwrap()
}

/// Control on the left wire, target on the right.
pub fn cnot_gate() -> Perm {
    Perm::from_table(vec![0, 1, 3, 2]).unwrap()
}

/// Controls on the two left wires, target on the rightmost.
pub fn toffoli_gate() -> Perm {
    Perm::from_table(vec![0, 1, 2, 3, 4, 5, 7, 6]).unwrap()
}

/// Flips wire `target` of `width` wires when every other wire is 1.
pub fn controlled_not(width: u32, target: u32) -> Perm {
    assert!(target < width);
    let all = (1u32 << width) - 1;
    let bit = 1u32 << (width - 1 - target);
    let table = (0..=all).map(|x| if x | bit == all { x ^ bit } else { x }).collect();
    Perm::from_table(table).unwrap()
}

/// Swaps two adjacent wires.
pub fn swap_gate() -> Perm {
    Perm::from_table(vec![0, 2, 1, 3]).unwrap()
}

fn named_gate(name: &str) -> Result<Gate> {
    let perm = match name {
        "NOT" => not_gate(),
        "CNOT" => cnot_gate(),
        "CNOT_T0" => controlled_not(2, 0),
        "TOFFOLI" => toffoli_gate(),
        "TOFFOLI_T0" => controlled_not(3, 0),
        "TOFFOLI_T1" => controlled_not(3, 1),
        "SWAP" => swap_gate(),
        other => return Err(Error::ParameterOutOfRange(format!("unknown gate {other}"))),
    };
    Ok(Gate {
        name: name.to_string(),
        perm,
    })
}

impl GateSet {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::ParameterOutOfRange("empty gate set".into()));
        }
        if let Some(g) = gates.iter().find(|g| g.perm.width().is_none()) {
            return Err(Error::ParameterOutOfRange(format!(
                "gate {} does not act on bit strings",
                g.name
            )));
        }
        Ok(GateSet { gates })
    }

    /// NOT, CNOT and Toffoli with the target on any of their wires.
    ///
    /// `CNOT` and `TOFFOLI` have the target rightmost; `CNOT_T0`, `TOFFOLI_T0`
    /// and `TOFFOLI_T1` put it on wire 0 or 1 of the gate.
    pub fn standard() -> Self {
        let names = ["NOT", "CNOT", "CNOT_T0", "TOFFOLI", "TOFFOLI_T0", "TOFFOLI_T1"];
        GateSet::new(names.iter().map(|n| named_gate(n).unwrap()).collect()).unwrap()
    }

    /// Looks a set up by name: `standard` or a comma-separated list of gate
    /// names (`NOT`, `CNOT`, `CNOT_T0`, `TOFFOLI`, `TOFFOLI_T0`, `TOFFOLI_T1`,
    /// `SWAP`).
    pub fn by_name(spec: &str) -> Result<Self> {
        if spec == "standard" {
            return Ok(Self::standard());
        }
        let gates = spec
            .split(',')
            .map(|n| named_gate(&n.trim().to_ascii_uppercase()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(gates)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    /// Every gate at every contiguous offset on `width` wires.
    pub fn placements(&self, width: u32) -> Vec<(GateStep, Perm)> {
        let mut out = Vec::new();
        for g in &self.gates {
            let k = g.width();
            if k > width {
                continue;
            }
            for offset in 0..=width - k {
                out.push((
                    GateStep {
                        gate: g.name.clone(),
                        offset,
                    },
                    g.perm.placed(offset, width).unwrap(),
                ));
            }
        }
        out
    }

    /// Group generated by all placements on `width` wires.
    pub fn generated_group(&self, width: u32) -> Bsgs {
        let perms: Vec<Perm> = self.placements(width).into_iter().map(|(_, p)| p).collect();
        Bsgs::new(1 << width, &perms)
    }

    /// Replays a gate sequence on `width` wires, left to right.
    pub fn replay(&self, seq: &[GateStep], width: u32) -> Result<Perm> {
        seq.iter().try_fold(Perm::identity_bits(width), |acc, step| {
            let g = self
                .gate(&step.gate)
                .ok_or_else(|| Error::ParameterOutOfRange(format!("unknown gate {}", step.gate)))?;
            Ok(acc.then(&g.perm.placed(step.offset, width)?))
        })
    }
}

/// Decomposer bound to one gate set and width; reusable across targets.
pub struct Decomposer {
    gates: GateSet,
    width: u32,
    steps: Vec<GateStep>,
    orders: Vec<usize>,
    factorizer: Factorizer,
}

impl Decomposer {
    pub fn new(gates: &GateSet, width: u32, seed: u64) -> Result<Self> {
        let placed = gates.placements(width);
        if placed.is_empty() {
            return Err(Error::ParameterOutOfRange("no gate fits the width".into()));
        }
        let perms: Vec<Perm> = placed.iter().map(|(_, p)| p.clone()).collect();
        let orders = perms
            .iter()
            .map(|p| p.order().to_usize().unwrap_or(usize::MAX))
            .collect();
        let factorizer = Factorizer::new(&perms, seed)?;
        Ok(Decomposer {
            gates: gates.clone(),
            width,
            steps: placed.into_iter().map(|(s, _)| s).collect(),
            orders,
            factorizer,
        })
    }

    pub fn group(&self) -> &Bsgs {
        self.factorizer.bsgs()
    }

    pub fn length_bound(&self) -> usize {
        let max_order = self.orders.iter().copied().max().unwrap_or(1);
        self.factorizer.word_length_bound() * max_order.saturating_sub(1).max(1)
    }

    pub fn decompose(&self, target: &Perm) -> Result<GateSequence> {
        if target.width() != Some(self.width) {
            return Err(Error::WidthMismatch(
                target.width().unwrap_or(0),
                self.width,
            ));
        }
        if !target.is_even() {
            return Err(Error::NotEven);
        }
        if target.is_identity() {
            return Ok(Vec::new());
        }
        if let Some(i) = self.factorizer.generators().iter().position(|g| g == target) {
            return Ok(vec![self.steps[i].clone()]);
        }
        let word = self.factorizer.factor(target)?;
        let seq = self.expand(&word);
        if self.gates.replay(&seq, self.width)? != *target {
            return Err(Error::Precondition("gate sequence failed replay".into()));
        }
        Ok(seq)
    }

    fn expand(&self, word: &[Letter]) -> GateSequence {
        let mut out = Vec::new();
        for l in word {
            let reps = if l.inv { self.orders[l.gen as usize] - 1 } else { 1 };
            for _ in 0..reps {
                out.push(self.steps[l.gen as usize].clone());
            }
        }
        out
    }
}

/// Decomposes an even permutation of `{0,1}^m` into contiguous placed gates.
pub fn decompose_even_perm(target: &Perm, gates: &GateSet, seed: u64) -> Result<GateSequence> {
    let width = target
        .width()
        .ok_or_else(|| Error::ParameterOutOfRange("target degree is not 2^m".into()))?;
    if !target.is_even() {
        return Err(Error::NotEven);
    }
    Decomposer::new(gates, width, seed)?.decompose(target)
}
