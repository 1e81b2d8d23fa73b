//! The coordinatewise bijection `(ℤ/4)≀ℤ/n → (ℤ/2×ℤ/2)≀ℤ/n` and an exhaustive
//! check that it is an isomorphism of Cayley multigraphs.
//!
//! Both sides use the shift, its inverse and every non-identity lamp at
//! position 0 as generators, so right multiplication by a lamp generator
//! replaces the lamp under the cursor by any other value. Any coordinatewise
//! bijection of lamp values therefore preserves edges, including ones that
//! move the identity lamp; such maps are isomorphisms that do not fix the
//! base vertex. Moving lamps between positions breaks adjacency.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::groups::{Element, Group, GroupSpec, Lamp};

/// Largest `n` accepted by the exhaustive check (`4^8·8 = 524288` vertices).
pub const ISOMETRY_MAX_N: u32 = 8;

/// `table[v]` is the `ℤ/2×ℤ/2` value (as two bits) assigned to `v ∈ ℤ/4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LampBijection {
    table: [u8; 4],
}

impl LampBijection {
    /// Any bijection `{0,1,2,3} → {0,1,2,3}`.
    pub fn new(table: [u8; 4]) -> Result<LampBijection> {
        let mut seen = [false; 4];
        for &v in &table {
            if v > 3 || std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidInput(format!("{table:?} is not a bijection of four lamp values")));
            }
        }
        Ok(LampBijection { table })
    }

    /// `0 ↦ (0,0), 1 ↦ (1,0), 2 ↦ (0,1), 3 ↦ (1,1)`.
    pub fn standard() -> LampBijection {
        LampBijection { table: [0, 1, 2, 3] }
    }

    /// The six bijections fixing the identity lamp.
    pub fn identity_fixing() -> Vec<LampBijection> {
        let mut out = Vec::new();
        for a in 1..4u8 {
            for b in 1..4u8 {
                for c in 1..4u8 {
                    if a != b && b != c && a != c {
                        out.push(LampBijection { table: [0, a, b, c] });
                    }
                }
            }
        }
        out
    }

    pub fn table(&self) -> [u8; 4] {
        self.table
    }

    pub fn fixes_identity(&self) -> bool {
        self.table[0] == 0
    }

    pub fn apply(&self, v: u8) -> u8 {
        self.table[v as usize]
    }
}

fn source_spec(n: u32) -> GroupSpec {
    GroupSpec::WreathOverCycle { lamp: Lamp::Z4, n }
}

fn target_spec(n: u32) -> GroupSpec {
    GroupSpec::WreathOverCycle { lamp: Lamp::Z2xZ2, n }
}

fn map_lamps(lamps: u64, n: u32, f: impl Fn(u32, u8) -> (u32, u8)) -> u64 {
    let mut out = 0u64;
    for i in 0..n {
        let (j, v) = f(i, ((lamps >> (2 * i)) & 3) as u8);
        out |= (v as u64) << (2 * j);
    }
    out
}

/// Applies `b` to every lamp; the cursor is unchanged.
pub fn induced_map(b: &LampBijection, n: u32, g: &Element) -> Result<Element> {
    Group::new(&source_spec(n))?.check(g)?;
    let Element::Wreath { lamps, shift } = *g else { unreachable!("checked") };
    Ok(Element::Wreath { lamps: map_lamps(lamps, n, |i, v| (i, b.apply(v))), shift })
}

/// A candidate vertex map between the two Cayley graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum WreathMap {
    Coordinatewise { table: [u8; 4] },
    /// Coordinatewise, then lamps at positions `i` and `j` exchanged.
    SwapPositions { table: [u8; 4], i: u32, j: u32 },
}

impl WreathMap {
    fn image(&self, n: u32, lamps: u64, shift: u32) -> Element {
        let (table, swap) = match *self {
            WreathMap::Coordinatewise { table } => (table, None),
            WreathMap::SwapPositions { table, i, j } => (table, Some((i, j))),
        };
        let lamps = map_lamps(lamps, n, |p, v| {
            let q = match swap {
                Some((i, j)) if p == i => j,
                Some((i, j)) if p == j => i,
                _ => p,
            };
            (q, table[v as usize])
        });
        Element::Wreath { lamps, shift }
    }

    fn fixes_identity(&self) -> bool {
        match *self {
            WreathMap::Coordinatewise { table } | WreathMap::SwapPositions { table, .. } => table[0] == 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub vertex: Element,
    pub generator: usize,
    pub image: Element,
    pub image_of_neighbor: Element,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsomorphismReport {
    pub n: u32,
    pub map: WreathMap,
    pub vertices: u64,
    pub edges_checked: u64,
    pub bijective: bool,
    pub edges_preserved: bool,
    /// Edge-level isomorphism; isometry follows.
    pub isomorphism: bool,
    pub preserves_identity: bool,
    pub witness: Option<EdgeWitness>,
}

/// Exhaustive check that `b` induces an isomorphism of Cayley multigraphs.
pub fn verify_isomorphism(b: &LampBijection, n: u32) -> Result<IsomorphismReport> {
    verify_map(WreathMap::Coordinatewise { table: b.table }, n)
}

/// For every vertex `g`, the multiset `{φ(g)⁻¹·φ(g·s)}` over source
/// generators `s` must equal the target generating multiset. With `φ`
/// bijective this is equality of edge multisets. Vertices are streamed in
/// parallel; the reported witness is the least failing vertex.
pub fn verify_map(map: WreathMap, n: u32) -> Result<IsomorphismReport> {
    if n == 0 || n > ISOMETRY_MAX_N {
        return Err(Error::Budget {
            what: format!("wreath isomorphism check at n={n}"),
            needed: n as u64,
            limit: ISOMETRY_MAX_N as u64,
        });
    }
    if let WreathMap::SwapPositions { i, j, .. } = map {
        if i >= n || j >= n {
            return Err(Error::InvalidInput(format!("positions {i}, {j} out of range for n={n}")));
        }
    }
    LampBijection::new(match map {
        WreathMap::Coordinatewise { table } | WreathMap::SwapPositions { table, .. } => table,
    })?;
    let src = Group::new(&source_spec(n))?;
    let dst = Group::new(&target_spec(n))?;
    let src_gens = src.generator_elements();
    let mut dst_gens = dst.generator_elements();
    dst_gens.sort();
    let configs = 1u64 << (2 * n);
    let vertices = configs * n as u64;

    // Bijectivity: images hit every target vertex exactly once.
    let hits: Vec<u64> = (0..configs)
        .into_par_iter()
        .flat_map_iter(|lamps| {
            (0..n).map(move |shift| match map.image(n, lamps, shift) {
                Element::Wreath { lamps, shift } => lamps * n as u64 + shift as u64,
                _ => unreachable!(),
            })
        })
        .collect();
    let mut seen = vec![false; vertices as usize];
    let bijective = hits.iter().all(|&h| !std::mem::replace(&mut seen[h as usize], true));

    let failure = (0..configs)
        .into_par_iter()
        .flat_map_iter(|lamps| (0..n).map(move |shift| (lamps, shift)))
        .find_map_first(|(lamps, shift)| {
            let g = Element::Wreath { lamps, shift };
            let image = map.image(n, lamps, shift);
            let image_inv = dst.inverse_unchecked(&image);
            let mut labels = Vec::with_capacity(src_gens.len());
            for (slot, s) in src_gens.iter().enumerate() {
                let Element::Wreath { lamps: l2, shift: s2 } = src.mul_unchecked(&g, s) else { unreachable!() };
                let image_of_neighbor = map.image(n, l2, s2);
                let label = dst.mul_unchecked(&image_inv, &image_of_neighbor);
                if dst_gens.binary_search(&label).is_err() {
                    return Some(EdgeWitness { vertex: g, generator: slot, image, image_of_neighbor });
                }
                labels.push(label);
            }
            labels.sort();
            if labels != dst_gens {
                // Every label is a generator but the multiplicities differ.
                let Element::Wreath { lamps: l2, shift: s2 } = src.mul_unchecked(&g, &src_gens[0]) else { unreachable!() };
                return Some(EdgeWitness { vertex: g, generator: 0, image, image_of_neighbor: map.image(n, l2, s2) });
            }
            None
        });
    let edges_preserved = failure.is_none();
    Ok(IsomorphismReport {
        n,
        map,
        vertices,
        edges_checked: vertices * src_gens.len() as u64,
        bijective,
        edges_preserved,
        isomorphism: bijective && edges_preserved,
        preserves_identity: map.fixes_identity(),
        witness: failure,
    })
}

/// Counts of vertices at each distance from the identity.
pub fn distance_spectrum(spec: &GroupSpec, max_size: u64) -> Result<Vec<u64>> {
    let g = CayleyGraph::build(spec, max_size)?;
    let mut counts = vec![0u64; g.diameter() as usize + 1];
    for &d in g.distances_from_identity() {
        counts[d as usize] += 1;
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub n: u32,
    pub source: Vec<u64>,
    pub target: Vec<u64>,
    pub equal: bool,
}

pub fn compare_distance_spectra(n: u32, max_size: u64) -> Result<SpectrumComparison> {
    let source = distance_spectrum(&source_spec(n), max_size)?;
    let target = distance_spectrum(&target_spec(n), max_size)?;
    Ok(SpectrumComparison { n, equal: source == target, source, target })
}
