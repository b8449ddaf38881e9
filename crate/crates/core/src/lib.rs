//! Electronic zero-point fluctuation potentials in linear lumped-element circuits.
//!
//! A capacitor `C` attached to a passive network with port impedance
//! `Z(ω) = R(ω) + iX(ω)` stores a zero-point energy driven by the quantum
//! current noise of the network's resistances. This crate evaluates that
//! energy (raw, or renormalized against the network's high-frequency
//! reference circuit), the generalized force it exerts on an internal
//! coordinate of the capacitor, the Lamb-shift-like level shift of a transmon
//! coupled to the same kind of network, and a few companion quantities
//! (plasma-model Casimir force, force-measurement signal/noise estimates).
//!
//! Module map:
//!
//! * [`circuit`]: element graphs, nodal-analysis port impedance, reference circuits.
//! * [`netlist`]: a minimal SPICE-like text format.
//! * [`quad`]: adaptive Gauss–Kronrod quadrature, semi-infinite maps, principal values.
//! * [`zeropoint`]: the energy integral, renormalization, closed forms, validity cutoff.
//! * [`forces`]: generalized forces, capacitor geometries, sweeps, asymptotic fits.
//! * [`casimir`]: ideal and plasma-model Lifshitz forces between plates.
//! * [`qubit`]: transmon level shift and linewidth from a node voltage spectrum.
//! * [`metrology`]: static/dynamic force-measurement estimates.
//! * [`report`] and [`figures`]: CSV/JSON rows and figure datasets used by the CLI.

// NaN-rejecting guards are written as `!(x > y)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod casimir;
pub mod circuit;
pub mod consts;
pub mod figures;
pub mod forces;
pub mod metrology;
pub mod netlist;
pub mod quad;
pub mod qubit;
pub mod report;
pub mod zeropoint;

pub use circuit::{
    BuiltinCircuit, CircuitError, CircuitNetwork, Element, ElementKind, PortImpedance,
    ReferenceCircuit,
};
pub use quad::{QuadError, QuadratureConfig};
pub use zeropoint::{EnergyError, ValidityParams, ZeroPointConfig, ZeroPointResult};
