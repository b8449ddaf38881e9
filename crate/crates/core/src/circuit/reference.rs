//! High-frequency reference circuit: capacitors shorted, inductors opened.

use std::collections::{HashMap, HashSet};

use super::{CircuitNetwork, Element, ElementKind, GROUND};

/// What remains of a network as `ω → ∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceCircuit {
    /// A purely resistive network across the same port.
    Network(CircuitNetwork),
    /// No conducting path between the port nodes.
    Open,
    /// The port nodes are shorted by capacitors.
    ShortedPort,
}

impl ReferenceCircuit {
    pub fn network(&self) -> Option<&CircuitNetwork> {
        match self {
            ReferenceCircuit::Network(n) => Some(n),
            _ => None,
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Builds the reference circuit. Merged nodes are named after the port node they
/// contain, else `gnd`, else the lexicographically smallest member. Dangling and
/// disconnected resistors are dropped, so the operation is idempotent.
pub fn reference_network(net: &CircuitNetwork) -> ReferenceCircuit {
    let nodes: Vec<&str> = net.nodes().into_iter().collect();
    let id: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut uf = UnionFind {
        parent: (0..nodes.len()).collect(),
    };
    for e in net.elements() {
        if e.kind == ElementKind::Capacitor {
            uf.union(id[e.a.as_str()], id[e.b.as_str()]);
        }
    }
    let (p0, p1) = net.port();
    let (r0, r1) = (uf.find(id[p0]), uf.find(id[p1]));
    if r0 == r1 {
        return ReferenceCircuit::ShortedPort;
    }

    let mut label: HashMap<usize, &str> = HashMap::new();
    for &n in &nodes {
        let root = uf.find(id[n]);
        let rank = |s: &str| {
            if s == p0 || s == p1 {
                0
            } else if s == GROUND {
                1
            } else {
                2
            }
        };
        label
            .entry(root)
            .and_modify(|cur| {
                if (rank(n), n) < (rank(cur), *cur) {
                    *cur = n;
                }
            })
            .or_insert(n);
    }

    let mut kept: Vec<Element> = net
        .elements()
        .iter()
        .filter(|e| e.kind == ElementKind::Resistor)
        .filter_map(|e| {
            let (a, b) = (uf.find(id[e.a.as_str()]), uf.find(id[e.b.as_str()]));
            (a != b).then(|| Element::resistor(e.name.clone(), label[&a], label[&b], e.value))
        })
        .collect();

    // Keep only the component containing the port.
    let mut reach: HashSet<String> = HashSet::from([p0.to_string()]);
    loop {
        let before = reach.len();
        for e in &kept {
            if reach.contains(&e.a) || reach.contains(&e.b) {
                reach.insert(e.a.clone());
                reach.insert(e.b.clone());
            }
        }
        if reach.len() == before {
            break;
        }
    }
    if !reach.contains(p1) {
        return ReferenceCircuit::Open;
    }
    kept.retain(|e| reach.contains(&e.a));

    // Strip dangling branches that carry no port current.
    loop {
        let mut degree: HashMap<&str, usize> = HashMap::new();
        for e in &kept {
            *degree.entry(&e.a).or_default() += 1;
            *degree.entry(&e.b).or_default() += 1;
        }
        let leaves: HashSet<String> = degree
            .into_iter()
            .filter(|(n, d)| *d == 1 && *n != p0 && *n != p1)
            .map(|(n, _)| n.to_string())
            .collect();
        if leaves.is_empty() {
            break;
        }
        kept.retain(|e| !leaves.contains(&e.a) && !leaves.contains(&e.b));
    }

    match CircuitNetwork::new(kept, (p0, p1)) {
        Ok(n) => ReferenceCircuit::Network(n),
        Err(_) => ReferenceCircuit::Open,
    }
}
