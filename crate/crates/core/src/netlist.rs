//! Gate netlists: nodes, devices and the fixed topologies of the
//! reconfigurable logic family.
//!
//! Circuits are built through the constructors on [`GateCircuit`], which
//! enforce the structural invariants the solver relies on: exactly one supply
//! rail and one ground rail, inputs that drive only transistor gates (so they
//! draw no current), and full connectivity of the internal network.

use crate::devices::{MemristorState, MosfetParams, Polarity};
use crate::error::{Error, Result};

/// Index of a node within its circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// Electrical role of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    RailVdd,
    RailGnd,
    Input,
    Output,
    Internal,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    pub name: String,
}

/// A MOSFET instance wired into a circuit.
#[derive(Debug, Clone)]
pub struct Transistor {
    pub params: MosfetParams,
    pub gate: NodeId,
    pub source: NodeId,
    pub drain: NodeId,
    pub label: String,
}

/// A memristor instance wired between nodes `a` and `b`; positive branch
/// current flows from `a` to `b`.
#[derive(Debug, Clone)]
pub struct MemristorElement {
    pub state: MemristorState,
    pub a: NodeId,
    pub b: NodeId,
    pub label: String,
}

/// Topology family of a circuit. The NOR variants are rail-exchanged duals
/// of the corresponding NAND topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitKind {
    PlainInverter,
    Inverter2T2R,
    GeneralInverter4R,
    Nand4T3R,
    GeneralNand7R,
    Nor4T3R,
    GeneralNor7R,
}

impl CircuitKind {
    pub fn is_inverter_family(self) -> bool {
        matches!(
            self,
            CircuitKind::PlainInverter | CircuitKind::Inverter2T2R | CircuitKind::GeneralInverter4R
        )
    }

    pub fn is_nand_family(self) -> bool {
        matches!(
            self,
            CircuitKind::Nand4T3R
                | CircuitKind::GeneralNand7R
                | CircuitKind::Nor4T3R
                | CircuitKind::GeneralNor7R
        )
    }
}

/// A validated gate circuit.
#[derive(Debug, Clone)]
pub struct GateCircuit {
    kind: CircuitKind,
    nodes: Vec<Node>,
    transistors: Vec<Transistor>,
    memristors: Vec<MemristorElement>,
    vdd: f64,
    inputs: Vec<(String, NodeId)>,
    output: NodeId,
}

struct Builder {
    nodes: Vec<Node>,
    transistors: Vec<Transistor>,
    memristors: Vec<MemristorElement>,
}

impl Builder {
    fn new() -> Self {
        Self {
            nodes: Vec::new(),
            transistors: Vec::new(),
            memristors: Vec::new(),
        }
    }

    fn node(&mut self, kind: NodeKind, name: &str) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            kind,
            name: name.to_string(),
        });
        id
    }

    fn transistor(&mut self, params: MosfetParams, gate: NodeId, source: NodeId, drain: NodeId, label: &str) {
        self.transistors.push(Transistor {
            params,
            gate,
            source,
            drain,
            label: label.to_string(),
        });
    }

    fn memristor(&mut self, state: MemristorState, a: NodeId, b: NodeId, label: &str) {
        self.memristors.push(MemristorElement {
            state,
            a,
            b,
            label: label.to_string(),
        });
    }

    fn finish(
        self,
        kind: CircuitKind,
        vdd: f64,
        inputs: Vec<(String, NodeId)>,
        output: NodeId,
    ) -> Result<GateCircuit> {
        let circuit = GateCircuit {
            kind,
            nodes: self.nodes,
            transistors: self.transistors,
            memristors: self.memristors,
            vdd,
            inputs,
            output,
        };
        circuit.validate()?;
        Ok(circuit)
    }
}

impl GateCircuit {
    /// Two-transistor CMOS inverter with no memristors; used as the fixed
    /// read-out stage and as a chain element.
    pub fn plain_inverter(pmos: MosfetParams, nmos: MosfetParams, vdd: f64) -> Result<Self> {
        check_polarities(&pmos, &nmos)?;
        let mut b = Builder::new();
        let rail_vdd = b.node(NodeKind::RailVdd, "vdd");
        let rail_gnd = b.node(NodeKind::RailGnd, "gnd");
        let input = b.node(NodeKind::Input, "in");
        let output = b.node(NodeKind::Output, "out");
        b.transistor(pmos, input, rail_vdd, output, "mp");
        b.transistor(nmos, input, rail_gnd, output, "mn");
        b.finish(
            CircuitKind::PlainInverter,
            vdd,
            vec![("in".to_string(), input)],
            output,
        )
    }

    /// Inverter with one memristor per branch, both on the drain side:
    /// supply -> pMOS -> `r_up` -> output -> `r_dn` -> nMOS -> ground.
    /// Memristor 0 is `r_up`, memristor 1 is `r_dn`.
    pub fn inverter_2t2r(
        pmos: MosfetParams,
        nmos: MosfetParams,
        r_up: MemristorState,
        r_dn: MemristorState,
        vdd: f64,
    ) -> Result<Self> {
        check_polarities(&pmos, &nmos)?;
        let mut b = Builder::new();
        let rail_vdd = b.node(NodeKind::RailVdd, "vdd");
        let rail_gnd = b.node(NodeKind::RailGnd, "gnd");
        let input = b.node(NodeKind::Input, "in");
        let output = b.node(NodeKind::Output, "out");
        let p_drain = b.node(NodeKind::Internal, "p_drain");
        let n_drain = b.node(NodeKind::Internal, "n_drain");
        b.transistor(pmos, input, rail_vdd, p_drain, "mp");
        b.memristor(r_up, p_drain, output, "r_up");
        b.memristor(r_dn, output, n_drain, "r_dn");
        b.transistor(nmos, input, rail_gnd, n_drain, "mn");
        b.finish(
            CircuitKind::Inverter2T2R,
            vdd,
            vec![("in".to_string(), input)],
            output,
        )
    }

    /// Fully degenerated inverter with four programmable resistors:
    /// supply -> `r_a` -> pMOS -> `r_b` -> output -> `r_c` -> nMOS -> `r_d`
    /// -> ground. Memristor order is `r_a`, `r_b`, `r_c`, `r_d`.
    pub fn general_inverter_4r(
        pmos: MosfetParams,
        nmos: MosfetParams,
        r_a: MemristorState,
        r_b: MemristorState,
        r_c: MemristorState,
        r_d: MemristorState,
        vdd: f64,
    ) -> Result<Self> {
        check_polarities(&pmos, &nmos)?;
        let mut b = Builder::new();
        let rail_vdd = b.node(NodeKind::RailVdd, "vdd");
        let rail_gnd = b.node(NodeKind::RailGnd, "gnd");
        let input = b.node(NodeKind::Input, "in");
        let output = b.node(NodeKind::Output, "out");
        let p_source = b.node(NodeKind::Internal, "p_source");
        let p_drain = b.node(NodeKind::Internal, "p_drain");
        let n_drain = b.node(NodeKind::Internal, "n_drain");
        let n_source = b.node(NodeKind::Internal, "n_source");
        b.memristor(r_a, rail_vdd, p_source, "r_a");
        b.transistor(pmos, input, p_source, p_drain, "mp");
        b.memristor(r_b, p_drain, output, "r_b");
        b.memristor(r_c, output, n_drain, "r_c");
        b.transistor(nmos, input, n_drain, n_source, "mn");
        b.memristor(r_d, n_source, rail_gnd, "r_d");
        b.finish(
            CircuitKind::GeneralInverter4R,
            vdd,
            vec![("in".to_string(), input)],
            output,
        )
    }

    /// Two-input NAND with one memristor per pull-up branch and one shared
    /// memristor at the top of the series pull-down:
    /// memristor 0 (`m_a`) loads pMOS A, memristor 1 (`m_b`) loads pMOS B,
    /// memristor 2 (`m_c`) sits between the output and the series nMOS pair
    /// (input A above input B).
    #[allow(clippy::too_many_arguments)]
    pub fn nand_4t3r(
        pmos_a: MosfetParams,
        pmos_b: MosfetParams,
        nmos_a: MosfetParams,
        nmos_b: MosfetParams,
        m_a: MemristorState,
        m_b: MemristorState,
        m_c: MemristorState,
        vdd: f64,
    ) -> Result<Self> {
        for p in [&pmos_a, &pmos_b] {
            if p.polarity != Polarity::P {
                return Err(Error::CircuitShape("pull-up devices must be p-channel".into()));
            }
        }
        for n in [&nmos_a, &nmos_b] {
            if n.polarity != Polarity::N {
                return Err(Error::CircuitShape("pull-down devices must be n-channel".into()));
            }
        }
        let mut b = Builder::new();
        let rail_vdd = b.node(NodeKind::RailVdd, "vdd");
        let rail_gnd = b.node(NodeKind::RailGnd, "gnd");
        let in_a = b.node(NodeKind::Input, "a");
        let in_b = b.node(NodeKind::Input, "b");
        let output = b.node(NodeKind::Output, "out");
        let pa_drain = b.node(NodeKind::Internal, "pa_drain");
        let pb_drain = b.node(NodeKind::Internal, "pb_drain");
        let na_drain = b.node(NodeKind::Internal, "na_drain");
        let series_mid = b.node(NodeKind::Internal, "series_mid");
        b.transistor(pmos_a, in_a, rail_vdd, pa_drain, "mp_a");
        b.memristor(m_a, pa_drain, output, "m_a");
        b.transistor(pmos_b, in_b, rail_vdd, pb_drain, "mp_b");
        b.memristor(m_b, pb_drain, output, "m_b");
        b.memristor(m_c, output, na_drain, "m_c");
        b.transistor(nmos_a, in_a, series_mid, na_drain, "mn_a");
        b.transistor(nmos_b, in_b, rail_gnd, series_mid, "mn_b");
        b.finish(
            CircuitKind::Nand4T3R,
            vdd,
            vec![("a".to_string(), in_a), ("b".to_string(), in_b)],
            output,
        )
    }

    /// Fully degenerated two-input NAND with seven programmable resistors.
    ///
    /// Order of `resistors`:
    /// 0 pull-up A source degeneration, 1 pull-up A drain load,
    /// 2 pull-up B source degeneration, 3 pull-up B drain load,
    /// 4 pull-down load between output and the upper nMOS,
    /// 5 shared element between the two series nMOS devices,
    /// 6 pull-down source degeneration to ground.
    #[allow(clippy::too_many_arguments)]
    pub fn general_nand_7r(
        pmos_a: MosfetParams,
        pmos_b: MosfetParams,
        nmos_a: MosfetParams,
        nmos_b: MosfetParams,
        resistors: [MemristorState; 7],
        vdd: f64,
    ) -> Result<Self> {
        for p in [&pmos_a, &pmos_b] {
            if p.polarity != Polarity::P {
                return Err(Error::CircuitShape("pull-up devices must be p-channel".into()));
            }
        }
        for n in [&nmos_a, &nmos_b] {
            if n.polarity != Polarity::N {
                return Err(Error::CircuitShape("pull-down devices must be n-channel".into()));
            }
        }
        let [r_as, r_ad, r_bs, r_bd, r_top, r_shared, r_bot] = resistors;
        let mut b = Builder::new();
        let rail_vdd = b.node(NodeKind::RailVdd, "vdd");
        let rail_gnd = b.node(NodeKind::RailGnd, "gnd");
        let in_a = b.node(NodeKind::Input, "a");
        let in_b = b.node(NodeKind::Input, "b");
        let output = b.node(NodeKind::Output, "out");
        let pa_source = b.node(NodeKind::Internal, "pa_source");
        let pa_drain = b.node(NodeKind::Internal, "pa_drain");
        let pb_source = b.node(NodeKind::Internal, "pb_source");
        let pb_drain = b.node(NodeKind::Internal, "pb_drain");
        let na_drain = b.node(NodeKind::Internal, "na_drain");
        let na_source = b.node(NodeKind::Internal, "na_source");
        let nb_drain = b.node(NodeKind::Internal, "nb_drain");
        let nb_source = b.node(NodeKind::Internal, "nb_source");
        b.memristor(r_as, rail_vdd, pa_source, "r_as");
        b.transistor(pmos_a, in_a, pa_source, pa_drain, "mp_a");
        b.memristor(r_ad, pa_drain, output, "r_ad");
        b.memristor(r_bs, rail_vdd, pb_source, "r_bs");
        b.transistor(pmos_b, in_b, pb_source, pb_drain, "mp_b");
        b.memristor(r_bd, pb_drain, output, "r_bd");
        b.memristor(r_top, output, na_drain, "r_top");
        b.transistor(nmos_a, in_a, na_source, na_drain, "mn_a");
        b.memristor(r_shared, na_source, nb_drain, "r_shared");
        b.transistor(nmos_b, in_b, nb_source, nb_drain, "mn_b");
        b.memristor(r_bot, nb_source, rail_gnd, "r_bot");
        b.finish(
            CircuitKind::GeneralNand7R,
            vdd,
            vec![("a".to_string(), in_a), ("b".to_string(), in_b)],
            output,
        )
    }

    /// Rail-exchanged dual: supply and ground swap, every transistor flips
    /// polarity (same magnitudes), memristor values are preserved. The dual
    /// of a NAND topology is the corresponding NOR and vice versa; applying
    /// the operation twice returns the original structure.
    pub fn nor_dual(&self) -> Result<Self> {
        let kind = match self.kind {
            CircuitKind::Nand4T3R => CircuitKind::Nor4T3R,
            CircuitKind::GeneralNand7R => CircuitKind::GeneralNor7R,
            CircuitKind::Nor4T3R => CircuitKind::Nand4T3R,
            CircuitKind::GeneralNor7R => CircuitKind::GeneralNand7R,
            other => {
                return Err(Error::CircuitShape(format!(
                    "rail-exchange dual is defined for NAND/NOR topologies, not {other:?}"
                )))
            }
        };
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n.kind {
                NodeKind::RailVdd => Node {
                    kind: NodeKind::RailGnd,
                    name: "gnd".to_string(),
                },
                NodeKind::RailGnd => Node {
                    kind: NodeKind::RailVdd,
                    name: "vdd".to_string(),
                },
                _ => n.clone(),
            })
            .collect();
        let transistors = self
            .transistors
            .iter()
            .map(|t| Transistor {
                params: t.params.mirrored(),
                ..t.clone()
            })
            .collect();
        let circuit = GateCircuit {
            kind,
            nodes,
            transistors,
            memristors: self.memristors.clone(),
            vdd: self.vdd,
            inputs: self.inputs.clone(),
            output: self.output,
        };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn kind(&self) -> CircuitKind {
        self.kind
    }

    pub fn vdd(&self) -> f64 {
        self.vdd
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn transistors(&self) -> &[Transistor] {
        &self.transistors
    }

    pub fn memristors(&self) -> &[MemristorElement] {
        &self.memristors
    }

    pub fn inputs(&self) -> &[(String, NodeId)] {
        &self.inputs
    }

    pub fn output(&self) -> NodeId {
        self.output
    }

    pub fn input_node(&self, port: &str) -> Result<NodeId> {
        self.inputs
            .iter()
            .find(|(name, _)| name == port)
            .map(|(_, id)| *id)
            .ok_or_else(|| Error::UnknownPort(port.to_string()))
    }

    /// Number of independently programmable resistances.
    pub fn count_dofs(&self) -> usize {
        self.memristors.len()
    }

    /// Number of node voltages the solver must determine.
    pub fn unknown_node_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Output | NodeKind::Internal))
            .count()
    }

    /// Copy of the circuit with memristor `index` reprogrammed.
    pub fn with_memristor_resistance(&self, index: usize, ohms: f64) -> Result<Self> {
        let element = self.memristors.get(index).ok_or_else(|| {
            Error::CircuitShape(format!(
                "memristor index {index} out of range ({} present)",
                self.memristors.len()
            ))
        })?;
        let state = element.state.program(ohms)?;
        let mut circuit = self.clone();
        circuit.memristors[index].state = state;
        Ok(circuit)
    }

    /// Largest transistor `g_min` in the circuit (conductance floor used by
    /// effective-divider extraction).
    pub fn g_min_floor(&self) -> f64 {
        self.transistors
            .iter()
            .map(|t| t.params.g_min)
            .fold(1e-15_f64, f64::max)
    }

    /// Structural identity: same topology, node roles, device parameters and
    /// programmed values.
    pub fn structurally_equal(&self, other: &Self) -> bool {
        if self.kind != other.kind
            || self.vdd != other.vdd
            || self.output != other.output
            || self.inputs != other.inputs
            || self.nodes.len() != other.nodes.len()
            || self.transistors.len() != other.transistors.len()
            || self.memristors.len() != other.memristors.len()
        {
            return false;
        }
        let nodes_match = self
            .nodes
            .iter()
            .zip(&other.nodes)
            .all(|(a, b)| a.kind == b.kind && a.name == b.name);
        let transistors_match = self.transistors.iter().zip(&other.transistors).all(|(a, b)| {
            a.gate == b.gate
                && a.source == b.source
                && a.drain == b.drain
                && a.params.polarity == b.params.polarity
                && a.params.v_th == b.params.v_th
                && a.params.k_prime == b.params.k_prime
                && a.params.w == b.params.w
                && a.params.l == b.params.l
                && a.params.lambda == b.params.lambda
                && a.params.g_min == b.params.g_min
        });
        let memristors_match = self.memristors.iter().zip(&other.memristors).all(|(a, b)| {
            a.a == b.a && a.b == b.b && a.state.resistance() == b.state.resistance()
        });
        nodes_match && transistors_match && memristors_match
    }

    fn validate(&self) -> Result<()> {
        if !(self.vdd > 0.0) {
            return Err(Error::InvalidParameter {
                name: "vdd",
                value: self.vdd,
                constraint: "must be positive",
            });
        }
        let vdd_rails = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::RailVdd)
            .count();
        let gnd_rails = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::RailGnd)
            .count();
        if vdd_rails != 1 || gnd_rails != 1 {
            return Err(Error::CircuitShape(format!(
                "expected exactly one supply and one ground rail, found {vdd_rails} and {gnd_rails}"
            )));
        }
        if self.inputs.is_empty() {
            return Err(Error::CircuitShape("circuit has no input ports".into()));
        }

        let valid = |id: NodeId| id.0 < self.nodes.len();
        for t in &self.transistors {
            if !valid(t.gate) || !valid(t.source) || !valid(t.drain) {
                return Err(Error::CircuitShape(format!(
                    "transistor {} references a missing node",
                    t.label
                )));
            }
        }
        for m in &self.memristors {
            if !valid(m.a) || !valid(m.b) {
                return Err(Error::CircuitShape(format!(
                    "memristor {} references a missing node",
                    m.label
                )));
            }
        }
        if !valid(self.output) || self.nodes[self.output.0].kind != NodeKind::Output {
            return Err(Error::CircuitShape("output node missing or mislabelled".into()));
        }
        for (name, id) in &self.inputs {
            if !valid(*id) || self.nodes[id.0].kind != NodeKind::Input {
                return Err(Error::CircuitShape(format!(
                    "input port `{name}` does not reference an input node"
                )));
            }
        }

        // Inputs must drive gates only, so they source no current.
        for t in &self.transistors {
            for terminal in [t.source, t.drain] {
                if self.nodes[terminal.0].kind == NodeKind::Input {
                    return Err(Error::CircuitShape(format!(
                        "input node `{}` is wired to a channel terminal of {}",
                        self.nodes[terminal.0].name, t.label
                    )));
                }
            }
        }
        for m in &self.memristors {
            for terminal in [m.a, m.b] {
                if self.nodes[terminal.0].kind == NodeKind::Input {
                    return Err(Error::CircuitShape(format!(
                        "input node `{}` is wired to memristor {}",
                        self.nodes[terminal.0].name, m.label
                    )));
                }
            }
        }

        // Every non-input node must be reachable from a rail through device
        // branches.
        let reachable = self.rail_reachability();
        for (idx, node) in self.nodes.iter().enumerate() {
            if node.kind != NodeKind::Input && !reachable[idx] {
                return Err(Error::CircuitShape(format!(
                    "node `{}` is disconnected from the rails",
                    node.name
                )));
            }
        }
        Ok(())
    }

    /// Flood fill from both rails across device branches.
    fn rail_reachability(&self) -> Vec<bool> {
        let mut reachable = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::RailVdd | NodeKind::RailGnd))
            .map(|(i, _)| i)
            .collect();
        for &s in &stack {
            reachable[s] = true;
        }
        let mut edges: Vec<(usize, usize)> = self
            .transistors
            .iter()
            .map(|t| (t.source.0, t.drain.0))
            .collect();
        for m in &self.memristors {
            edges.push((m.a.0, m.b.0));
        }
        while let Some(node) = stack.pop() {
            for &(a, b) in &edges {
                let next = if a == node {
                    b
                } else if b == node {
                    a
                } else {
                    continue;
                };
                if !reachable[next] {
                    reachable[next] = true;
                    stack.push(next);
                }
            }
        }
        reachable
    }
}

fn check_polarities(pmos: &MosfetParams, nmos: &MosfetParams) -> Result<()> {
    if pmos.polarity != Polarity::P {
        return Err(Error::CircuitShape("pull-up device must be p-channel".into()));
    }
    if nmos.polarity != Polarity::N {
        return Err(Error::CircuitShape("pull-down device must be n-channel".into()));
    }
    Ok(())
}

/// Second stage of a two-gate cascade.
#[derive(Debug, Clone)]
pub enum ChainTarget {
    /// Feed the first gate's output into the named port of another gate.
    Gate(GateCircuit),
    /// Pass the first gate's output through unchanged.
    Identity,
}

/// An ideal cascade: the first gate's solved output drives one input port of
/// the second gate without loading the first.
#[derive(Debug, Clone)]
pub struct GateChain {
    pub first: GateCircuit,
    pub second: ChainTarget,
    pub port: String,
}

impl GateChain {
    pub fn new(first: GateCircuit, second: ChainTarget, port: &str) -> Result<Self> {
        if let ChainTarget::Gate(ref gate) = second {
            gate.input_node(port)?;
        }
        Ok(Self {
            first,
            second,
            port: port.to_string(),
        })
    }
}
