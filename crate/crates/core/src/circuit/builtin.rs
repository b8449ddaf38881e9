//! The named example circuits. The probed capacitor always sits across
//! `p`–`gnd`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{CircuitError, CircuitNetwork, Element, GROUND};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BuiltinCircuit {
    /// Circuit I: `R` in series with `C0`.
    SeriesRc { r: f64, c0: f64 },
    /// Circuit II: `R` in series with `L`.
    SeriesRl { r: f64, l: f64 },
    /// Circuit III: `R` parallel to `L`.
    ParallelRl { r: f64, l: f64 },
    /// Circuit IV: the `R`–`C0` series branch parallel to `L`.
    Mixed { r: f64, l: f64, c0: f64 },
    /// `R` parallel to `C`; the bath seen by a transmon.
    ParallelRc { r: f64, c: f64 },
}

/// Identifier without parameters, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CircuitId {
    I,
    II,
    III,
    IV,
    ParallelRc,
}

impl CircuitId {
    pub const ALL: [CircuitId; 5] = [CircuitId::I, CircuitId::II, CircuitId::III, CircuitId::IV, CircuitId::ParallelRc];

    pub fn as_str(self) -> &'static str {
        match self {
            CircuitId::I => "I",
            CircuitId::II => "II",
            CircuitId::III => "III",
            CircuitId::IV => "IV",
            CircuitId::ParallelRc => "parallel-rc",
        }
    }

    /// Parameter names the circuit accepts.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            CircuitId::I => &["R", "C0"],
            CircuitId::II | CircuitId::III => &["R", "L"],
            CircuitId::IV => &["R", "L", "C0"],
            CircuitId::ParallelRc => &["R", "C"],
        }
    }
}

impl fmt::Display for CircuitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CircuitId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "i" | "1" => Ok(CircuitId::I),
            "II" | "ii" | "2" => Ok(CircuitId::II),
            "III" | "iii" | "3" => Ok(CircuitId::III),
            "IV" | "iv" | "4" => Ok(CircuitId::IV),
            "parallel-rc" | "parallel-RC" | "prc" => Ok(CircuitId::ParallelRc),
            other => Err(format!("unknown circuit '{other}' (expected I, II, III, IV or parallel-rc)")),
        }
    }
}

impl BuiltinCircuit {
    pub fn id(&self) -> CircuitId {
        match self {
            BuiltinCircuit::SeriesRc { .. } => CircuitId::I,
            BuiltinCircuit::SeriesRl { .. } => CircuitId::II,
            BuiltinCircuit::ParallelRl { .. } => CircuitId::III,
            BuiltinCircuit::Mixed { .. } => CircuitId::IV,
            BuiltinCircuit::ParallelRc { .. } => CircuitId::ParallelRc,
        }
    }

    /// Builds a circuit from `(name, value)` pairs; every parameter listed in
    /// [`CircuitId::params`] must be present.
    pub fn from_params(id: CircuitId, params: &[(&str, f64)]) -> Result<Self, CircuitError> {
        let get = |name: &str| {
            params
                .iter()
                .rev()
                .find(|(n, _)| *n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| CircuitError::UnknownElement(format!("missing parameter {name} for circuit {id}")))
        };
        let c = match id {
            CircuitId::I => BuiltinCircuit::SeriesRc { r: get("R")?, c0: get("C0")? },
            CircuitId::II => BuiltinCircuit::SeriesRl { r: get("R")?, l: get("L")? },
            CircuitId::III => BuiltinCircuit::ParallelRl { r: get("R")?, l: get("L")? },
            CircuitId::IV => BuiltinCircuit::Mixed { r: get("R")?, l: get("L")?, c0: get("C0")? },
            CircuitId::ParallelRc => BuiltinCircuit::ParallelRc { r: get("R")?, c: get("C")? },
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CircuitError> {
        for name in self.id().params() {
            let v = self.param(name).expect("listed parameter");
            if !(v.is_finite() && v > 0.0) {
                return Err(CircuitError::InvalidValue { name: (*name).into(), value: v });
            }
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        use BuiltinCircuit::*;
        match (self, name) {
            (SeriesRc { r, .. } | SeriesRl { r, .. } | ParallelRl { r, .. } | Mixed { r, .. } | ParallelRc { r, .. }, "R") => Some(*r),
            (SeriesRl { l, .. } | ParallelRl { l, .. } | Mixed { l, .. }, "L") => Some(*l),
            (SeriesRc { c0, .. } | Mixed { c0, .. }, "C0") => Some(*c0),
            (ParallelRc { c, .. }, "C") => Some(*c),
            _ => None,
        }
    }

    /// Copy with one named parameter replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, CircuitError> {
        use BuiltinCircuit::*;
        let mut out = *self;
        let slot = match (&mut out, name) {
            (SeriesRc { r, .. } | SeriesRl { r, .. } | ParallelRl { r, .. } | Mixed { r, .. } | ParallelRc { r, .. }, "R") => r,
            (SeriesRl { l, .. } | ParallelRl { l, .. } | Mixed { l, .. }, "L") => l,
            (SeriesRc { c0, .. } | Mixed { c0, .. }, "C0") => c0,
            (ParallelRc { c, .. }, "C") => c,
            _ => {
                return Err(CircuitError::UnknownElement(format!(
                    "circuit {} has no parameter {name}",
                    self.id()
                )))
            }
        };
        *slot = value;
        out.validate()?;
        Ok(out)
    }

    pub fn network(&self) -> CircuitNetwork {
        let els = match *self {
            BuiltinCircuit::SeriesRc { r, c0 } => vec![
                Element::resistor("R1", "a", GROUND, r),
                Element::capacitor("C0", "p", "a", c0),
            ],
            BuiltinCircuit::SeriesRl { r, l } => vec![
                Element::resistor("R1", "a", GROUND, r),
                Element::inductor("L1", "p", "a", l),
            ],
            BuiltinCircuit::ParallelRl { r, l } => vec![
                Element::resistor("R1", "p", GROUND, r),
                Element::inductor("L1", "p", GROUND, l),
            ],
            BuiltinCircuit::Mixed { r, l, c0 } => vec![
                Element::resistor("R1", "a", GROUND, r),
                Element::capacitor("C0", "p", "a", c0),
                Element::inductor("L1", "p", GROUND, l),
            ],
            BuiltinCircuit::ParallelRc { r, c } => vec![
                Element::resistor("R1", "p", GROUND, r),
                Element::capacitor("C1", "p", GROUND, c),
            ],
        };
        CircuitNetwork::new(els, ("p", GROUND)).expect("built-in topology is valid")
    }

    /// Netlist element name carrying a given parameter.
    pub fn element_name(&self, param: &str) -> Option<&'static str> {
        match (self.id(), param) {
            (_, "R") => Some("R1"),
            (CircuitId::I | CircuitId::IV, "C0") => Some("C0"),
            (CircuitId::II | CircuitId::III | CircuitId::IV, "L") => Some("L1"),
            (CircuitId::ParallelRc, "C") => Some("C1"),
            _ => None,
        }
    }
}
