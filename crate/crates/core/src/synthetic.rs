//! Seeded synthetic graph generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_io::{EdgeList, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SyntheticKind {
    /// Erdős–Rényi G(n, p): every unordered pair independently with probability p.
    Gnp { n: usize, p: f64 },
    /// 3D grid with 6-neighborhoods; triangle free.
    Lattice3d { x: usize, y: usize, z: usize },
    /// R-MAT with `2^scale` vertices and `edge_factor · 2^scale` samples.
    Rmat { scale: u32, edge_factor: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, seed: u64) -> Self {
        Self { kind, seed }
    }
}

const RMAT_PROBS: [f64; 3] = [0.57, 0.19, 0.19];

/// Generates a raw edge list; run it through `normalize` before counting.
pub fn generate_synthetic(spec: &SyntheticSpec) -> EdgeList {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        SyntheticKind::Gnp { n, p } => {
            let mut edges = Vec::new();
            if p > 0.0 {
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.random_bool(p.min(1.0)) {
                            edges.push((u as VertexId, v as VertexId));
                        }
                    }
                }
            }
            EdgeList {
                edges,
                vertex_count: n,
            }
        }
        SyntheticKind::Lattice3d { x, y, z } => {
            let id = |i: usize, j: usize, k: usize| ((i * y + j) * z + k) as VertexId;
            let mut edges = Vec::new();
            for i in 0..x {
                for j in 0..y {
                    for k in 0..z {
                        if i + 1 < x {
                            edges.push((id(i, j, k), id(i + 1, j, k)));
                        }
                        if j + 1 < y {
                            edges.push((id(i, j, k), id(i, j + 1, k)));
                        }
                        if k + 1 < z {
                            edges.push((id(i, j, k), id(i, j, k + 1)));
                        }
                    }
                }
            }
            EdgeList {
                edges,
                vertex_count: x * y * z,
            }
        }
        SyntheticKind::Rmat { scale, edge_factor } => {
            let n = 1usize << scale;
            let samples = edge_factor * n;
            let mut edges = Vec::with_capacity(samples);
            for _ in 0..samples {
                let (mut u, mut v) = (0usize, 0usize);
                for bit in (0..scale).rev() {
                    let r: f64 = rng.random();
                    let (du, dv) = if r < RMAT_PROBS[0] {
                        (0, 0)
                    } else if r < RMAT_PROBS[0] + RMAT_PROBS[1] {
                        (0, 1)
                    } else if r < RMAT_PROBS[0] + RMAT_PROBS[1] + RMAT_PROBS[2] {
                        (1, 0)
                    } else {
                        (1, 1)
                    };
                    u |= du << bit;
                    v |= dv << bit;
                }
                edges.push((u as VertexId, v as VertexId));
            }
            EdgeList {
                edges,
                vertex_count: n,
            }
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gnp { n, p } => write!(f, "gnp:{n}:{p}"),
            Self::Lattice3d { x, y, z } => write!(f, "lattice3d:{x}x{y}x{z}"),
            Self::Rmat { scale, edge_factor } => write!(f, "rmat:{scale}:{edge_factor}"),
        }
    }
}

/// Parses `gnp:N:P`, `lattice3d:XxYxZ` or `rmat:SCALE:EDGE_FACTOR`.
impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse synthetic graph {s:?}"));
        let mut fields = s.split(':');
        let kind = fields.next().ok_or_else(bad)?;
        let rest: Vec<&str> = fields.collect();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match (kind, rest.as_slice()) {
            ("gnp", [n, p]) => {
                let p: f64 = p.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                Ok(Self::Gnp { n: num(n)?, p })
            }
            ("lattice3d", [dims]) => {
                let d: Vec<usize> = dims.split('x').map(num).collect::<Result<_>>()?;
                match d.as_slice() {
                    &[x, y, z] => Ok(Self::Lattice3d { x, y, z }),
                    _ => Err(bad()),
                }
            }
            ("rmat", [scale, ef]) => {
                let scale = num(scale)?;
                if scale > 31 {
                    return Err(bad());
                }
                Ok(Self::Rmat {
                    scale: scale as u32,
                    edge_factor: num(ef)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_zero_is_empty() {
        let el = generate_synthetic(&SyntheticSpec::new(SyntheticKind::Gnp { n: 50, p: 0.0 }, 3));
        assert!(el.is_empty());
        assert_eq!(el.vertex_count, 50);
    }

    #[test]
    fn deterministic_for_seed() {
        let spec = SyntheticSpec::new(SyntheticKind::Gnp { n: 20, p: 0.5 }, 1);
        assert_eq!(generate_synthetic(&spec), generate_synthetic(&spec));
        let other = SyntheticSpec::new(SyntheticKind::Gnp { n: 20, p: 0.5 }, 2);
        assert_ne!(generate_synthetic(&spec), generate_synthetic(&other));
        let rmat = SyntheticSpec::new(
            SyntheticKind::Rmat {
                scale: 8,
                edge_factor: 4,
            },
            9,
        );
        assert_eq!(generate_synthetic(&rmat), generate_synthetic(&rmat));
    }

    #[test]
    fn lattice_edge_count() {
        let el = generate_synthetic(&SyntheticSpec::new(
            SyntheticKind::Lattice3d { x: 4, y: 4, z: 4 },
            0,
        ));
        assert_eq!(el.vertex_count, 64);
        assert_eq!(el.len(), 3 * 4 * 4 * 3);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["gnp:32:0.3", "lattice3d:4x5x6", "rmat:10:8"] {
            let k: SyntheticKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        for s in [
            "gnp:32",
            "gnp:3:1.5",
            "lattice3d:4x4",
            "rmat:40:2",
            "ring:3",
        ] {
            assert!(s.parse::<SyntheticKind>().is_err(), "{s}");
        }
    }
}
