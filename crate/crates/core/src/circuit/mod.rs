//! Linear lumped R/L/C networks and their port impedance.
//!
//! Impedances use the engineering convention `Z_L = iωL`, `Z_C = 1/(iωC)`;
//! `Z(−ω) = Z*(ω)` holds for every network.

mod builtin;
mod mna;
mod noise;
mod reference;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{BuiltinCircuit, CircuitId};
pub use noise::noise_spectrum;
pub use reference::{reference_network, ReferenceCircuit};

/// Reserved name of the ground node.
pub const GROUND: &str = "gnd";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("network has no elements")]
    Empty,
    #[error("element {name}: value {value} must be positive and finite")]
    InvalidValue { name: String, value: f64 },
    #[error("element {name} connects node {node} to itself")]
    SelfLoop { name: String, node: String },
    #[error("invalid identifier '{0}' (must be non-empty, without whitespace or '#')")]
    InvalidName(String),
    #[error("duplicate element name {0}")]
    DuplicateName(String),
    #[error("port nodes must differ (both are {0})")]
    PortNodesIdentical(String),
    #[error("port node {0} is not attached to any element")]
    UnknownPortNode(String),
    #[error("port nodes {0} and {1} are not connected")]
    Disconnected(String, String),
    #[error("no element named {0}")]
    UnknownElement(String),
    #[error("admittance matrix is singular at ω = {omega:e} rad/s (isolated impedance pole)")]
    Singular { omega: f64 },
    #[error("frequency must be finite and non-zero, got {0}")]
    InvalidFrequency(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementKind {
    Resistor,
    Capacitor,
    Inductor,
}

impl ElementKind {
    /// Netlist prefix letter.
    pub fn prefix(self) -> char {
        match self {
            ElementKind::Resistor => 'R',
            ElementKind::Capacitor => 'C',
            ElementKind::Inductor => 'L',
        }
    }

    pub fn from_prefix(c: char) -> Option<Self> {
        match c {
            'R' => Some(ElementKind::Resistor),
            'C' => Some(ElementKind::Capacitor),
            'L' => Some(ElementKind::Inductor),
            _ => None,
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementKind::Resistor => "resistor",
            ElementKind::Capacitor => "capacitor",
            ElementKind::Inductor => "inductor",
        };
        f.write_str(s)
    }
}

/// A two-terminal element. `value` is in ohms, farads or henries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub name: String,
    pub kind: ElementKind,
    pub value: f64,
    pub a: String,
    pub b: String,
}

impl Element {
    pub fn new(
        kind: ElementKind,
        name: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
        value: f64,
    ) -> Self {
        Element {
            name: name.into(),
            kind,
            value,
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn resistor(name: impl Into<String>, a: impl Into<String>, b: impl Into<String>, ohms: f64) -> Self {
        Self::new(ElementKind::Resistor, name, a, b, ohms)
    }

    pub fn capacitor(name: impl Into<String>, a: impl Into<String>, b: impl Into<String>, farads: f64) -> Self {
        Self::new(ElementKind::Capacitor, name, a, b, farads)
    }

    pub fn inductor(name: impl Into<String>, a: impl Into<String>, b: impl Into<String>, henries: f64) -> Self {
        Self::new(ElementKind::Inductor, name, a, b, henries)
    }

    /// Complex admittance at angular frequency `omega` (rad/s, non-zero).
    pub fn admittance(&self, omega: f64) -> Complex64 {
        match self.kind {
            ElementKind::Resistor => Complex64::new(1.0 / self.value, 0.0),
            ElementKind::Capacitor => Complex64::new(0.0, omega * self.value),
            ElementKind::Inductor => Complex64::new(0.0, -1.0 / (omega * self.value)),
        }
    }

    fn validate(&self) -> Result<(), CircuitError> {
        for id in [&self.name, &self.a, &self.b] {
            if !valid_identifier(id) {
                return Err(CircuitError::InvalidName(id.clone()));
            }
        }
        if !(self.value.is_finite() && self.value > 0.0) {
            return Err(CircuitError::InvalidValue {
                name: self.name.clone(),
                value: self.value,
            });
        }
        if self.a == self.b {
            return Err(CircuitError::SelfLoop {
                name: self.name.clone(),
                node: self.a.clone(),
            });
        }
        Ok(())
    }
}

pub(crate) fn valid_identifier(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '#')
}

/// Element values grouped by kind; used to pick characteristic time scales.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ElementScales {
    pub resistances: Vec<f64>,
    pub capacitances: Vec<f64>,
    pub inductances: Vec<f64>,
}

impl ElementScales {
    /// All `RC`, `L/R` and `√(LC)` combinations, optionally including an
    /// extra (probe) capacitance.
    pub fn time_constants(&self, probe: Option<f64>) -> Vec<f64> {
        let mut caps = self.capacitances.clone();
        caps.extend(probe);
        let mut out = Vec::new();
        for &r in &self.resistances {
            out.extend(caps.iter().map(|&c| r * c));
            out.extend(self.inductances.iter().map(|&l| l / r));
        }
        for &l in &self.inductances {
            out.extend(caps.iter().map(|&c| (l * c).sqrt()));
        }
        out.retain(|t| t.is_finite() && *t > 0.0);
        out
    }
}

/// Geometric mean of positive values, `None` if empty.
pub fn geometric_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mean_log = values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64;
    Some(mean_log.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Network,
    Analytic,
}

/// Anything that can report a two-terminal impedance `Z(ω)`.
pub trait PortImpedance: Send + Sync {
    fn impedance(&self, omega: f64) -> Result<Complex64, CircuitError>;

    /// Impedance seen with a capacitor `c` across the port, `Z/(1 + iωCZ)`.
    fn loaded_impedance(&self, omega: f64, c: f64) -> Result<Complex64, CircuitError> {
        let z = self.impedance(omega)?;
        Ok(z / (Complex64::new(1.0, 0.0) + Complex64::new(0.0, omega * c) * z))
    }

    fn element_scales(&self) -> ElementScales;

    fn provenance(&self) -> Provenance;
}

/// Closed-form impedance supplied by the caller.
#[derive(Clone)]
pub struct AnalyticImpedance {
    eval: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    scales: ElementScales,
}

impl AnalyticImpedance {
    /// `scales` should list the element values the expression depends on; they
    /// only steer the integration variable and breakpoints.
    pub fn new<F>(eval: F, scales: ElementScales) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        AnalyticImpedance {
            eval: Arc::new(eval),
            scales,
        }
    }
}

impl fmt::Debug for AnalyticImpedance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticImpedance")
            .field("scales", &self.scales)
            .finish_non_exhaustive()
    }
}

impl PortImpedance for AnalyticImpedance {
    fn impedance(&self, omega: f64) -> Result<Complex64, CircuitError> {
        if !(omega.is_finite() && omega != 0.0) {
            return Err(CircuitError::InvalidFrequency(omega));
        }
        Ok((self.eval)(omega))
    }

    fn element_scales(&self) -> ElementScales {
        self.scales.clone()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }
}

/// Node numbering for nodal analysis: every node in the port's connected
/// component except the second port node, which is the reference.
#[derive(Debug, Clone, PartialEq, Default)]
struct NodalLayout {
    index: HashMap<String, usize>,
    active: Vec<usize>,
    pos: usize,
}

/// A validated two-terminal network. The probed capacitor is not part of it;
/// it attaches across `port`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitNetwork {
    elements: Vec<Element>,
    port: (String, String),
    #[serde(skip)]
    layout: NodalLayout,
}

impl CircuitNetwork {
    pub fn new(
        elements: Vec<Element>,
        port: (impl Into<String>, impl Into<String>),
    ) -> Result<Self, CircuitError> {
        let port = (port.0.into(), port.1.into());
        if elements.is_empty() {
            return Err(CircuitError::Empty);
        }
        let mut names = HashSet::new();
        for e in &elements {
            e.validate()?;
            if !names.insert(e.name.as_str()) {
                return Err(CircuitError::DuplicateName(e.name.clone()));
            }
        }
        if port.0 == port.1 {
            return Err(CircuitError::PortNodesIdentical(port.0));
        }
        for p in [&port.0, &port.1] {
            if !elements.iter().any(|e| &e.a == p || &e.b == p) {
                return Err(CircuitError::UnknownPortNode(p.clone()));
            }
        }
        let layout = Self::layout(&elements, &port)?;
        Ok(CircuitNetwork {
            elements,
            port,
            layout,
        })
    }

    fn layout(elements: &[Element], port: &(String, String)) -> Result<NodalLayout, CircuitError> {
        let mut adjacency: HashMap<&str, Vec<(usize, &str)>> = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            adjacency.entry(&e.a).or_default().push((i, &e.b));
            adjacency.entry(&e.b).or_default().push((i, &e.a));
        }
        let mut seen: HashSet<&str> = HashSet::new();
        let mut active: BTreeSet<usize> = BTreeSet::new();
        let mut queue = VecDeque::from([port.0.as_str()]);
        seen.insert(&port.0);
        while let Some(n) = queue.pop_front() {
            for &(i, m) in adjacency.get(n).into_iter().flatten() {
                active.insert(i);
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        if !seen.contains(port.1.as_str()) {
            return Err(CircuitError::Disconnected(port.0.clone(), port.1.clone()));
        }
        // Deterministic numbering: port node first, then sorted names.
        let mut others: Vec<&str> = seen
            .into_iter()
            .filter(|n| *n != port.0 && *n != port.1)
            .collect();
        others.sort_unstable();
        let mut index = HashMap::new();
        index.insert(port.0.clone(), 0);
        for (k, n) in others.into_iter().enumerate() {
            index.insert(n.to_string(), k + 1);
        }
        Ok(NodalLayout {
            index,
            active: active.into_iter().collect(),
            pos: 0,
        })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn port(&self) -> (&str, &str) {
        (&self.port.0, &self.port.1)
    }

    pub fn nodes(&self) -> BTreeSet<&str> {
        self.elements
            .iter()
            .flat_map(|e| [e.a.as_str(), e.b.as_str()])
            .collect()
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name == name)
    }

    pub fn has_resistor(&self) -> bool {
        self.elements.iter().any(|e| e.kind == ElementKind::Resistor)
    }

    /// Copy with one element's value replaced.
    pub fn with_value(&self, name: &str, value: f64) -> Result<Self, CircuitError> {
        let mut elements = self.elements.clone();
        let e = elements
            .iter_mut()
            .find(|e| e.name == name)
            .ok_or_else(|| CircuitError::UnknownElement(name.to_string()))?;
        e.value = value;
        CircuitNetwork::new(elements, self.port.clone())
    }

    pub fn scales(&self) -> ElementScales {
        let mut s = ElementScales::default();
        for &i in &self.layout.active {
            let e = &self.elements[i];
            match e.kind {
                ElementKind::Resistor => s.resistances.push(e.value),
                ElementKind::Capacitor => s.capacitances.push(e.value),
                ElementKind::Inductor => s.inductances.push(e.value),
            }
        }
        s
    }

    fn node_index(&self, name: &str) -> Option<usize> {
        self.layout.index.get(name).copied()
    }

    /// Solves the nodal equations for a unit current injected at the first port
    /// node and extracted at the second; `probe` adds a capacitor across the port.
    fn solve_unit_drive(&self, omega: f64, probe: Option<f64>) -> Result<Vec<Complex64>, CircuitError> {
        if !(omega.is_finite() && omega != 0.0) {
            return Err(CircuitError::InvalidFrequency(omega));
        }
        let n = self.layout.index.len();
        let mut y = vec![Complex64::new(0.0, 0.0); n * n];
        for &i in &self.layout.active {
            let e = &self.elements[i];
            let adm = e.admittance(omega);
            let a = self.node_index(&e.a);
            let b = self.node_index(&e.b);
            mna::stamp(&mut y, n, a, b, adm);
        }
        if let Some(c) = probe {
            mna::stamp(&mut y, n, Some(self.layout.pos), None, Complex64::new(0.0, omega * c));
        }
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        rhs[self.layout.pos] = Complex64::new(1.0, 0.0);
        mna::solve_dense(&mut y, n, &mut rhs).map_err(|_| CircuitError::Singular { omega })?;
        Ok(rhs)
    }

    /// Port impedance `Z(ω)`.
    pub fn impedance(&self, omega: f64) -> Result<Complex64, CircuitError> {
        let v = self.solve_unit_drive(omega, None)?;
        Ok(v[self.layout.pos])
    }

    /// Voltage across every element (index into [`elements`](Self::elements))
    /// for a unit current driven through the port. Elements outside the port's
    /// component are omitted.
    pub fn element_voltages(&self, omega: f64) -> Result<Vec<(usize, Complex64)>, CircuitError> {
        let v = self.solve_unit_drive(omega, None)?;
        let volt = |node: &str| self.node_index(node).map_or(Complex64::new(0.0, 0.0), |k| v[k]);
        Ok(self
            .layout
            .active
            .iter()
            .map(|&i| {
                let e = &self.elements[i];
                (i, volt(&e.a) - volt(&e.b))
            })
            .collect())
    }
}

impl PortImpedance for CircuitNetwork {
    fn impedance(&self, omega: f64) -> Result<Complex64, CircuitError> {
        CircuitNetwork::impedance(self, omega)
    }

    fn loaded_impedance(&self, omega: f64, c: f64) -> Result<Complex64, CircuitError> {
        let v = self.solve_unit_drive(omega, Some(c))?;
        Ok(v[self.layout.pos])
    }

    fn element_scales(&self) -> ElementScales {
        self.scales()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Network
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn single_resistor() {
        let net = CircuitNetwork::new(vec![Element::resistor("R1", "a", GROUND, 10.0)], ("a", GROUND)).unwrap();
        for w in [1.0, 1e5, 1e12] {
            assert!(close(net.impedance(w).unwrap(), Complex64::new(10.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn series_rc() {
        let net = BuiltinCircuit::SeriesRc { r: 10.0, c0: 1e-12 }.network();
        let z = net.impedance(1e10).unwrap();
        assert!(close(z, Complex64::new(10.0, -100.0), 1e-13), "{z}");
    }

    #[test]
    fn parallel_rl() {
        // ωL = 1 Ω, R = 10 Ω: ωLR(ωL + iR)/(R² + (ωL)²)
        let net = BuiltinCircuit::ParallelRl { r: 10.0, l: 0.1e-9 }.network();
        let z = net.impedance(1e10).unwrap();
        let expect = Complex64::new(10.0, 100.0) / 101.0;
        assert!(close(z, expect, 1e-13), "{z}");
        assert!((z.re - 0.0990).abs() < 1e-4 && (z.im - 0.990).abs() < 1e-3);
    }

    #[test]
    fn loaded_matches_parallel_formula() {
        let net = BuiltinCircuit::Mixed { r: 7.0, l: 2e-9, c0: 3e-13 }.network();
        let c = 4e-14;
        for w in [1e8, 3e10, 1e13] {
            let z = net.impedance(w).unwrap();
            let expect = z / (1.0 + Complex64::new(0.0, w * c) * z);
            assert!(close(net.loaded_impedance(w, c).unwrap(), expect, 1e-12));
        }
    }

    #[test]
    fn hermitian_symmetry_bridge() {
        let net = CircuitNetwork::new(
            vec![
                Element::resistor("R1", "p", "x", 5.0),
                Element::capacitor("C1", "p", "y", 1e-12),
                Element::inductor("L1", "x", "y", 1e-9),
                Element::resistor("R2", "x", GROUND, 20.0),
                Element::capacitor("C2", "y", GROUND, 2e-12),
            ],
            ("p", GROUND),
        )
        .unwrap();
        for w in [1e7, 1e9, 3e10, 1e12] {
            let zp = net.impedance(w).unwrap();
            let zm = net.impedance(-w).unwrap();
            assert!(close(zm, zp.conj(), 1e-12));
            assert!(zp.re >= -1e-12 * zp.norm());
        }
    }

    #[test]
    fn topology_errors() {
        assert_eq!(
            CircuitNetwork::new(vec![Element::resistor("R1", "a", "b", 1.0)], ("a", "a")).unwrap_err(),
            CircuitError::PortNodesIdentical("a".into())
        );
        let err = CircuitNetwork::new(
            vec![Element::resistor("R1", "a", "b", 1.0), Element::resistor("R2", "c", "d", 1.0)],
            ("a", "c"),
        )
        .unwrap_err();
        assert!(matches!(err, CircuitError::Disconnected(..)));
        assert!(matches!(
            CircuitNetwork::new(vec![Element::resistor("R1", "a", "b", -1.0)], ("a", "b")),
            Err(CircuitError::InvalidValue { .. })
        ));
        assert!(matches!(
            CircuitNetwork::new(Vec::new(), ("a", "b")),
            Err(CircuitError::Empty)
        ));
    }

    #[test]
    fn lossless_tank_pole_is_singular() {
        let (l, c) = (1e-9, 1e-12);
        let net = CircuitNetwork::new(
            vec![Element::inductor("L1", "a", GROUND, l), Element::capacitor("C1", "a", GROUND, c)],
            ("a", GROUND),
        )
        .unwrap();
        let w0 = 1.0 / (l * c).sqrt();
        assert!(matches!(net.impedance(w0), Err(CircuitError::Singular { .. })));
        assert!(net.impedance(w0 * 1.01).is_ok());
    }

    #[test]
    fn islands_are_ignored() {
        let net = CircuitNetwork::new(
            vec![Element::resistor("R1", "a", GROUND, 3.0), Element::inductor("L9", "u", "v", 1.0)],
            ("a", GROUND),
        )
        .unwrap();
        assert!(close(net.impedance(1e6).unwrap(), Complex64::new(3.0, 0.0), 1e-15));
        assert!(net.scales().inductances.is_empty());
    }
}
