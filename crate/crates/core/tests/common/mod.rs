//! Random series-parallel networks with an independent impedance oracle.
#![allow(dead_code)]

use circuit_zpf::circuit::{CircuitNetwork, Element, ElementKind};
use num_complex::Complex64;
use rand::Rng;

#[derive(Debug, Clone)]
pub enum Tree {
    Leaf(ElementKind, f64),
    Series(Box<Tree>, Box<Tree>),
    Parallel(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn random<R: Rng>(rng: &mut R, depth: usize) -> Tree {
        if depth == 0 || rng.gen_bool(0.3) {
            let kind = match rng.gen_range(0..3) {
                0 => ElementKind::Resistor,
                1 => ElementKind::Capacitor,
                _ => ElementKind::Inductor,
            };
            // Values chosen so that every element's scale is ~1 at ω ~ 1.
            let value = 10f64.powf(rng.gen_range(-1.0..1.0));
            return Tree::Leaf(kind, value);
        }
        let a = Box::new(Tree::random(rng, depth - 1));
        let b = Box::new(Tree::random(rng, depth - 1));
        if rng.gen_bool(0.5) {
            Tree::Series(a, b)
        } else {
            Tree::Parallel(a, b)
        }
    }

    /// Impedance by series/parallel composition.
    pub fn impedance(&self, w: f64) -> Complex64 {
        match self {
            Tree::Leaf(ElementKind::Resistor, v) => Complex64::new(*v, 0.0),
            Tree::Leaf(ElementKind::Capacitor, v) => Complex64::new(0.0, -1.0 / (w * v)),
            Tree::Leaf(ElementKind::Inductor, v) => Complex64::new(0.0, w * v),
            Tree::Series(a, b) => a.impedance(w) + b.impedance(w),
            Tree::Parallel(a, b) => {
                let (za, zb) = (a.impedance(w), b.impedance(w));
                za * zb / (za + zb)
            }
        }
    }

    /// Largest leaf impedance magnitude, a scale for round-off.
    pub fn scale(&self, w: f64) -> f64 {
        match self {
            Tree::Leaf(..) => self.impedance(w).norm(),
            Tree::Series(a, b) | Tree::Parallel(a, b) => a.scale(w).max(b.scale(w)),
        }
    }

    pub fn network(&self) -> CircuitNetwork {
        let mut els = Vec::new();
        let mut next = 0usize;
        self.emit("p", "gnd", &mut els, &mut next);
        CircuitNetwork::new(els, ("p", "gnd")).expect("generated network is valid")
    }

    fn emit(&self, a: &str, b: &str, els: &mut Vec<Element>, next: &mut usize) {
        match self {
            Tree::Leaf(kind, v) => {
                *next += 1;
                els.push(Element::new(*kind, format!("{}{}", kind.prefix(), next), a, b, *v));
            }
            Tree::Parallel(x, y) => {
                x.emit(a, b, els, next);
                y.emit(a, b, els, next);
            }
            Tree::Series(x, y) => {
                *next += 1;
                let mid = format!("n{next}");
                x.emit(a, &mid, els, next);
                y.emit(&mid, b, els, next);
            }
        }
    }
}
