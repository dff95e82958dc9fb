//! Permutation of a state into block-diagonal form with irreducible blocks.
//!
//! The support graph has a vertex for every basis index carrying diagonal
//! weight and an edge wherever an off-diagonal entry couples two indices. Its
//! connected components are exactly the irreducible blocks: a block cannot be
//! split further by any basis permutation. Indices with vanishing diagonal
//! form the null space.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::matrix::{ComplexMatrix, DensityMatrix, Permutation};

/// Support structure of a state: which indices carry weight and which pairs
/// are coupled. Entries at or below the tolerance count as exact zeros.
#[derive(Debug, Clone)]
pub struct SupportGraph {
    on_support: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
}

impl SupportGraph {
    pub fn dim(&self) -> usize {
        self.on_support.len()
    }

    pub fn on_support(&self, index: usize) -> bool {
        self.on_support[index]
    }

    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.on_support[i]).collect()
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.neighbors[index]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].contains(&j)
    }

    /// Connected components of the support, each sorted ascending, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.dim()];
        let mut components = Vec::new();
        for start in 0..self.dim() {
            if !self.on_support[start] || seen[start] {
                continue;
            }
            let mut queue = vec![start];
            let mut component = Vec::new();
            seen[start] = true;
            while let Some(v) = queue.pop() {
                component.push(v);
                for &w in &self.neighbors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push(w);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }
}

/// Builds the support graph of `rho`: vertices are indices with diagonal
/// weight above `tol`, edges are off-diagonal entries with modulus above
/// `tol`.
pub fn support_graph(rho: &DensityMatrix, tol: f64) -> SupportGraph {
    let d = rho.dim();
    let on_support: Vec<bool> = (0..d).map(|i| rho.entry(i, i).re > tol).collect();
    let mut neighbors = vec![Vec::new(); d];
    for i in 0..d {
        if !on_support[i] {
            continue;
        }
        for j in (i + 1)..d {
            if on_support[j] && rho.entry(i, j).norm() > tol {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    SupportGraph {
        on_support,
        neighbors,
    }
}

/// One irreducible block: its weight, its trace-one state on the subspace,
/// and the original basis indices spanning the subspace (ascending).
#[derive(Debug, Clone)]
pub struct Block {
    pub weight: f64,
    pub state: DensityMatrix,
    pub indices: Vec<usize>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }
}

/// Result of the block-diagonalizing permutation: blocks ordered by smallest
/// original index, followed by the null space.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub permutation: Permutation,
    pub blocks: Vec<Block>,
    pub null_indices: Vec<usize>,
}

impl BlockDecomposition {
    pub fn null_dim(&self) -> usize {
        self.null_indices.len()
    }

    pub fn total_dim(&self) -> usize {
        self.permutation.dim()
    }

    /// Rebuilds the original state from the weighted direct sum of blocks by
    /// inverting the permutation.
    pub fn reassemble(&self) -> DensityMatrix {
        let d = self.total_dim();
        let mut direct_sum = ComplexMatrix::zeros(d, d);
        let mut offset = 0;
        for block in &self.blocks {
            let k = block.dim();
            for i in 0..k {
                for j in 0..k {
                    direct_sum[(offset + i, offset + j)] = block.state.entry(i, j) * block.weight;
                }
            }
            offset += k;
        }
        DensityMatrix::trusted(direct_sum).permute(&self.permutation.inverse())
    }
}

impl Serialize for BlockDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct BlockSummary<'a> {
            indices: &'a [usize],
            weight: f64,
            dim: usize,
        }
        let blocks: Vec<BlockSummary> = self
            .blocks
            .iter()
            .map(|b| BlockSummary {
                indices: &b.indices,
                weight: b.weight,
                dim: b.dim(),
            })
            .collect();
        let mut state = serializer.serialize_struct("BlockDecomposition", 3)?;
        state.serialize_field("blocks", &blocks)?;
        state.serialize_field("null_dim", &self.null_dim())?;
        state.serialize_field("permutation", self.permutation.image())?;
        state.end()
    }
}

/// Decomposes `rho` into irreducible blocks: connected components of the
/// support graph become blocks ordered by smallest original index, indices
/// with vanishing diagonal form the null space, and the permutation maps the
/// original basis onto the block-diagonal arrangement.
pub fn block_decompose(rho: &DensityMatrix, tol: f64) -> BlockDecomposition {
    let d = rho.dim();
    let graph = support_graph(rho, tol);
    let components = graph.components();

    let mut blocks = Vec::with_capacity(components.len());
    for indices in components {
        let k = indices.len();
        let mut weight = 0.0;
        for &i in &indices {
            weight += rho.entry(i, i).re;
        }
        let mut sub = ComplexMatrix::zeros(k, k);
        let scale = num_complex::Complex64::new(1.0 / weight, 0.0);
        for (bi, &i) in indices.iter().enumerate() {
            for (bj, &j) in indices.iter().enumerate() {
                sub[(bi, bj)] = rho.entry(i, j) * scale;
            }
        }
        blocks.push(Block {
            weight,
            state: DensityMatrix::trusted(sub),
            indices,
        });
    }

    let null_indices: Vec<usize> = (0..d).filter(|&i| !graph.on_support(i)).collect();

    let mut image = vec![0; d];
    let mut position = 0;
    for block in &blocks {
        for &i in &block.indices {
            image[i] = position;
            position += 1;
        }
    }
    for &i in &null_indices {
        image[i] = position;
        position += 1;
    }
    let permutation = Permutation::new(image).expect("block ordering yields a bijection");

    BlockDecomposition {
        permutation,
        blocks,
        null_indices,
    }
}
