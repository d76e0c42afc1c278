//! Finite filtered probability spaces.
//!
//! A space is a finite list of points with strictly positive weights summing
//! to one. Sigma-algebras are partitions, filtrations are refining chains of
//! partitions, and random vectors are `R^m`-valued functions on the points.
//! [`Refinement`] splits points into weighted children; it is the finite
//! surrogate for an innovation that is independent of the past.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// Absolute tolerance for probability-mass bookkeeping.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Locations closer than this (Euclidean) are treated as one atom.
pub const ATOM_MERGE_TOL: f64 = 1e-9;

/// Finite sample space with strictly positive weights summing to one.
#[derive(Debug, Clone)]
pub struct WeightedSpace {
    ids: Vec<String>,
    weights: Vec<f64>,
    index: HashMap<String, usize>,
}

impl WeightedSpace {
    pub fn new(points: Vec<(String, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invariant("space must have at least one point".into()));
        }
        let mut ids = Vec::with_capacity(points.len());
        let mut weights = Vec::with_capacity(points.len());
        let mut index = HashMap::with_capacity(points.len());
        for (id, w) in points {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Invariant(format!(
                    "weight of point '{id}' must be strictly positive, got {w}"
                )));
            }
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::Invariant(format!("duplicate point id '{id}'")));
            }
            ids.push(id);
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Invariant(format!(
                "weights must sum to 1 within {WEIGHT_SUM_TOL}, got {total}"
            )));
        }
        Ok(Self { ids, weights, index })
    }

    /// Uniform space with ids `p0..p{n-1}`.
    pub fn uniform(n: usize) -> Self {
        let w = 1.0 / n as f64;
        Self::new((0..n).map(|i| (format!("p{i}"), w)).collect()).expect("uniform space is valid")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, point: usize) -> &str {
        &self.ids[point]
    }

    pub fn weight(&self, point: usize) -> f64 {
        self.weights[point]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn block_weight(&self, block: &[usize]) -> f64 {
        block.iter().map(|&p| self.weights[p]).sum()
    }

    pub fn iter_points(&self) -> impl Iterator<Item = (usize, &str, f64)> {
        self.ids
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(p, (id, &w))| (p, id.as_str(), w))
    }
}

/// A partition of the point set; on a finite space this is a sigma-algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    n_points: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n_points: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n_points];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::Invariant("partition block is empty".into()));
            }
            block.sort_unstable();
            for &p in block.iter() {
                if p >= n_points {
                    return Err(Error::Domain(format!(
                        "block point index {p} out of range (space has {n_points} points)"
                    )));
                }
                if seen[p] {
                    return Err(Error::Invariant(format!(
                        "point index {p} appears in more than one block"
                    )));
                }
                seen[p] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Invariant("partition blocks do not cover the space".into()));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { n_points, blocks })
    }

    /// One block holding everything: the trivial sigma-algebra.
    pub fn trivial(n_points: usize) -> Self {
        Self::new(n_points, vec![(0..n_points).collect()]).expect("trivial partition is valid")
    }

    /// Every point its own block.
    pub fn finest(n_points: usize) -> Self {
        Self::new(n_points, (0..n_points).map(|p| vec![p]).collect())
            .expect("finest partition is valid")
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Map point -> index of its block.
    pub fn block_assignment(&self) -> Vec<usize> {
        let mut assign = vec![0usize; self.n_points];
        for (b, block) in self.blocks.iter().enumerate() {
            for &p in block {
                assign[p] = b;
            }
        }
        assign
    }

    /// True if every block of `self` is contained in a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.n_points != coarser.n_points {
            return false;
        }
        let coarse = coarser.block_assignment();
        self.blocks
            .iter()
            .all(|block| block.iter().all(|&p| coarse[p] == coarse[block[0]]))
    }
}

/// A refining chain of partitions `P_0, ..., P_K` with `P_0` trivial.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    partitions: Vec<Partition>,
}

impl Filtration {
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        if partitions.len() < 2 {
            return Err(Error::Invariant("filtration horizon must be at least 1".into()));
        }
        let n = partitions[0].n_points();
        if partitions[0].blocks().len() != 1 {
            return Err(Error::Invariant("partition at time 0 must be trivial".into()));
        }
        for (k, pair) in partitions.windows(2).enumerate() {
            if pair[1].n_points() != n {
                return Err(Error::Domain("partitions live on different spaces".into()));
            }
            if !pair[1].refines(&pair[0]) {
                return Err(Error::Invariant(format!(
                    "partition at time {} does not refine its predecessor",
                    k + 1
                )));
            }
        }
        Ok(Self { partitions })
    }

    /// K, the final time of the chain `P_0..P_K`.
    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn partition(&self, k: usize) -> &Partition {
        &self.partitions[k]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }
}

/// An `R^m`-valued function on the points of a space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVector {
    dim: usize,
    values: Vec<f64>,
}

impl RandomVector {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if values.len() % dim != 0 {
            return Err(Error::Domain(format!(
                "value buffer length {} is not a multiple of dim {}",
                values.len(),
                dim
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("values must be finite".into()));
        }
        Ok(Self { dim, values })
    }

    /// Convenience constructor for scalar (m = 1) vectors.
    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    pub fn zeros(dim: usize, n_points: usize) -> Self {
        Self { dim, values: vec![0.0; dim * n_points] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn value(&self, point: usize) -> &[f64] {
        &self.values[point * self.dim..(point + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn add(&self, other: &RandomVector) -> Result<RandomVector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RandomVector) -> Result<RandomVector> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &RandomVector, f: impl Fn(f64, f64) -> f64) -> Result<RandomVector> {
        if self.dim != other.dim || self.values.len() != other.values.len() {
            return Err(Error::Domain("random vectors have mismatched shapes".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(RandomVector { dim: self.dim, values })
    }

    /// Squared L2 norm: sum over points of weight times squared Euclidean value.
    pub fn norm_sq(&self, space: &WeightedSpace) -> f64 {
        (0..self.n_points())
            .map(|p| space.weight(p) * self.value(p).iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    /// L1 norm: sum over points of weight times Euclidean length of the value.
    pub fn l1_norm(&self, space: &WeightedSpace) -> f64 {
        (0..self.n_points())
            .map(|p| {
                space.weight(p) * self.value(p).iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .sum()
    }

    pub fn mean(&self, space: &WeightedSpace) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim];
        for p in 0..self.n_points() {
            let w = space.weight(p);
            for (m, v) in mean.iter_mut().zip(self.value(p)) {
                *m += w * v;
            }
        }
        mean
    }

    /// Largest absolute coordinate over all points.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest Euclidean distance to `other` over all points.
    pub fn max_pointwise_distance(&self, other: &RandomVector) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok((0..diff.n_points())
            .map(|p| diff.value(p).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max))
    }
}

/// Finitely supported probability measure on `R^m` with canonically sorted atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    dim: usize,
    locations: Vec<f64>,
    masses: Vec<f64>,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("finite values") {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

fn euclid_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl DiscreteLaw {
    /// Build a law from weighted locations, merging atoms closer than
    /// [`ATOM_MERGE_TOL`]. Returns the law and, for each input location,
    /// the index of the atom it was merged into.
    pub fn from_weighted_points(
        dim: usize,
        points: &[(&[f64], f64)],
    ) -> Result<(Self, Vec<usize>)> {
        if points.is_empty() {
            return Err(Error::Domain("law needs at least one atom".into()));
        }
        let total: f64 = points.iter().map(|&(_, w)| w).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Domain(format!("total mass must be positive, got {total}")));
        }
        for &(loc, w) in points {
            if loc.len() != dim {
                return Err(Error::Domain("atom location has wrong dimension".into()));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Invariant(format!("atom mass must be positive, got {w}")));
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(points[a].0, points[b].0));

        let mut locations: Vec<f64> = Vec::new();
        let mut masses: Vec<f64> = Vec::new();
        let mut assignment = vec![0usize; points.len()];
        // Running mass-weighted centroid per cluster; merge is transitive along
        // the sorted order.
        let mut centroid: Vec<f64> = Vec::new();
        for &idx in &order {
            let (loc, w) = points[idx];
            let w = w / total;
            if !masses.is_empty() && euclid_dist(loc, &centroid) <= ATOM_MERGE_TOL {
                let last = masses.len() - 1;
                let m_old = masses[last];
                masses[last] += w;
                for d in 0..dim {
                    centroid[d] = (m_old * centroid[d] + w * loc[d]) / masses[last];
                    locations[last * dim + d] = centroid[d];
                }
                assignment[idx] = last;
            } else {
                assignment[idx] = masses.len();
                centroid = loc.to_vec();
                locations.extend_from_slice(loc);
                masses.push(w);
            }
        }
        Ok((Self { dim, locations, masses }, assignment))
    }

    pub fn from_atoms(dim: usize, atoms: &[(Vec<f64>, f64)]) -> Result<Self> {
        let points: Vec<(&[f64], f64)> =
            atoms.iter().map(|(loc, m)| (loc.as_slice(), *m)).collect();
        let (law, _) = Self::from_weighted_points(dim, &points)?;
        let total: f64 = atoms.iter().map(|(_, m)| m).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Invariant(format!(
                "atom masses must sum to 1 within {WEIGHT_SUM_TOL}, got {total}"
            )));
        }
        Ok(law)
    }

    /// Point mass at a single location.
    pub fn dirac(location: Vec<f64>) -> Self {
        Self { dim: location.len(), locations: location, masses: vec![1.0] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_atoms(&self) -> usize {
        self.masses.len()
    }

    pub fn location(&self, atom: usize) -> &[f64] {
        &self.locations[atom * self.dim..(atom + 1) * self.dim]
    }

    pub fn mass(&self, atom: usize) -> f64 {
        self.masses[atom]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim];
        for a in 0..self.n_atoms() {
            for (m, v) in mean.iter_mut().zip(self.location(a)) {
                *m += self.masses[a] * v;
            }
        }
        mean
    }

    pub fn second_moment(&self) -> f64 {
        (0..self.n_atoms())
            .map(|a| self.masses[a] * self.location(a).iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    /// Translate every atom by `shift`.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::Domain("shift has wrong dimension".into()));
        }
        let mut locations = self.locations.clone();
        for a in 0..self.n_atoms() {
            for d in 0..self.dim {
                locations[a * self.dim + d] += shift[d];
            }
        }
        Ok(Self { dim: self.dim, locations, masses: self.masses.clone() })
    }

    /// Index of the atom nearest to `value`; the distance is also returned.
    pub fn nearest_atom(&self, value: &[f64]) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for a in 0..self.n_atoms() {
            let d = euclid_dist(self.location(a), value);
            if d < best.1 {
                best = (a, d);
            }
        }
        best
    }
}

/// Splits every point of a parent space into weighted children.
///
/// Children are ordered by parent position first, insertion order second;
/// their weights must add up to the parent's weight.
#[derive(Debug, Clone)]
pub struct Refinement {
    parents: Vec<usize>,
    child_ids: Vec<String>,
    child_weights: Vec<f64>,
}

impl Refinement {
    pub fn new(parent_space: &WeightedSpace, children: Vec<(usize, String, f64)>) -> Result<Self> {
        let mut children = children;
        children.sort_by_key(|&(parent, _, _)| parent);

        let mut parents = Vec::with_capacity(children.len());
        let mut child_ids = Vec::with_capacity(children.len());
        let mut child_weights = Vec::with_capacity(children.len());
        let mut per_parent = vec![0.0f64; parent_space.len()];
        let mut seen_ids = HashSet::with_capacity(children.len());
        for (parent, id, w) in children {
            if parent >= parent_space.len() {
                return Err(Error::Domain(format!("unknown parent index {parent}")));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Invariant(format!(
                    "child weight must be strictly positive, got {w}"
                )));
            }
            if !seen_ids.insert(id.clone()) {
                return Err(Error::Invariant(format!("duplicate child id '{id}'")));
            }
            per_parent[parent] += w;
            parents.push(parent);
            child_ids.push(id);
            child_weights.push(w);
        }
        for (parent, &acc) in per_parent.iter().enumerate() {
            let expect = parent_space.weight(parent);
            if acc == 0.0 {
                return Err(Error::Domain(format!(
                    "point '{}' has no children",
                    parent_space.id(parent)
                )));
            }
            if (acc - expect).abs() > WEIGHT_SUM_TOL {
                return Err(Error::Invariant(format!(
                    "children of '{}' carry weight {acc}, parent has {expect}",
                    parent_space.id(parent)
                )));
            }
        }
        Ok(Self { parents, child_ids, child_weights })
    }

    /// One child per parent, preserving ids and weights.
    pub fn identity(space: &WeightedSpace) -> Self {
        Self {
            parents: (0..space.len()).collect(),
            child_ids: (0..space.len()).map(|p| space.id(p).to_string()).collect(),
            child_weights: space.weights().to_vec(),
        }
    }

    pub fn n_children(&self) -> usize {
        self.parents.len()
    }

    pub fn parent(&self, child: usize) -> usize {
        self.parents[child]
    }

    pub fn is_identity(&self) -> bool {
        self.parents.len() == self.parents.iter().map(|p| p + 1).max().unwrap_or(0)
            && self.parents.iter().enumerate().all(|(c, &p)| c == p)
    }

    /// Chain `self` (old -> mid) with `next` (mid -> new) into old -> new.
    pub fn compose(&self, next: &Refinement) -> Refinement {
        Refinement {
            parents: next.parents.iter().map(|&mid| self.parents[mid]).collect(),
            child_ids: next.child_ids.clone(),
            child_weights: next.child_weights.clone(),
        }
    }
}

/// New space made of the refinement's children.
pub fn refine(space: &WeightedSpace, r: &Refinement) -> Result<WeightedSpace> {
    if r.parents.iter().any(|&p| p >= space.len()) {
        return Err(Error::Domain("refinement references unknown parents".into()));
    }
    WeightedSpace::new(
        r.child_ids
            .iter()
            .cloned()
            .zip(r.child_weights.iter().copied())
            .collect(),
    )
}

/// Children inherit their parent's value.
pub fn lift_vector(x: &RandomVector, r: &Refinement) -> Result<RandomVector> {
    if r.parents.iter().any(|&p| p >= x.n_points()) {
        return Err(Error::Domain("refinement references unknown parents".into()));
    }
    let dim = x.dim();
    let mut values = Vec::with_capacity(r.n_children() * dim);
    for child in 0..r.n_children() {
        values.extend_from_slice(x.value(r.parent(child)));
    }
    RandomVector::new(dim, values)
}

/// Each block becomes the set of children of its members.
pub fn lift_partition(p: &Partition, r: &Refinement) -> Result<Partition> {
    if p.n_points() != r.parents.iter().copied().max().map_or(0, |m| m + 1)
        && r.parents.iter().any(|&q| q >= p.n_points())
    {
        return Err(Error::Domain("refinement references unknown parents".into()));
    }
    let assign = p.block_assignment();
    let mut blocks = vec![Vec::new(); p.blocks().len()];
    for child in 0..r.n_children() {
        blocks[assign[r.parent(child)]].push(child);
    }
    Partition::new(r.n_children(), blocks)
}

/// Lifts every partition of the filtration; refinement order is preserved.
pub fn lift_filtration(f: &Filtration, r: &Refinement) -> Result<Filtration> {
    Filtration::new(
        f.partitions()
            .iter()
            .map(|p| lift_partition(p, r))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Conditional expectation: the per-block weighted mean.
pub fn cond_exp(x: &RandomVector, a: &Partition, space: &WeightedSpace) -> Result<RandomVector> {
    if x.n_points() != space.len() || a.n_points() != space.len() {
        return Err(Error::Domain("vector, partition and space sizes differ".into()));
    }
    let dim = x.dim();
    let mut values = vec![0.0; dim * space.len()];
    for block in a.blocks() {
        let total = space.block_weight(block);
        let mut mean = vec![0.0; dim];
        for &p in block {
            let w = space.weight(p);
            for (m, v) in mean.iter_mut().zip(x.value(p)) {
                *m += w * v;
            }
        }
        for m in mean.iter_mut() {
            *m /= total;
        }
        for &p in block {
            values[p * dim..(p + 1) * dim].copy_from_slice(&mean);
        }
    }
    RandomVector::new(dim, values)
}

/// Law of `x` restricted to `block`, renormalized by the block's probability.
pub fn conditional_law(
    x: &RandomVector,
    block: &[usize],
    space: &WeightedSpace,
) -> Result<DiscreteLaw> {
    Ok(conditional_law_with_assignment(x, block, space)?.0)
}

/// Same as [`conditional_law`], also mapping each block member to its atom.
pub fn conditional_law_with_assignment(
    x: &RandomVector,
    block: &[usize],
    space: &WeightedSpace,
) -> Result<(DiscreteLaw, Vec<usize>)> {
    if block.is_empty() {
        return Err(Error::Domain("conditional law of an empty block".into()));
    }
    if x.n_points() != space.len() {
        return Err(Error::Domain("vector and space sizes differ".into()));
    }
    if block.iter().any(|&p| p >= space.len()) {
        return Err(Error::Domain("block references unknown points".into()));
    }
    let points: Vec<(&[f64], f64)> =
        block.iter().map(|&p| (x.value(p), space.weight(p))).collect();
    DiscreteLaw::from_weighted_points(x.dim(), &points)
}

/// Law of `x` on the whole space.
pub fn law(x: &RandomVector, space: &WeightedSpace) -> Result<DiscreteLaw> {
    let all: Vec<usize> = (0..space.len()).collect();
    conditional_law(x, &all, space)
}

/// Maximum martingale defect `|E[X_k | P_{k-1}] - X_{k-1}|` with `X_0 = 0`.
///
/// Errors if some `X_k` is not constant on the blocks of `P_k` within `tol`.
pub fn is_martingale(
    xs: &[RandomVector],
    f: &Filtration,
    space: &WeightedSpace,
    tol: f64,
) -> Result<f64> {
    if xs.len() != f.horizon() {
        return Err(Error::Domain(format!(
            "expected {} random vectors for horizon {}, got {}",
            f.horizon(),
            f.horizon(),
            xs.len()
        )));
    }
    let dim = xs[0].dim();
    for (k, x) in xs.iter().enumerate() {
        if x.n_points() != space.len() || x.dim() != dim {
            return Err(Error::Domain(format!("X_{} has mismatched shape", k + 1)));
        }
        // Measurability: constant on each block of P_k.
        for block in f.partition(k + 1).blocks() {
            let head = x.value(block[0]);
            for &p in block {
                if euclid_dist(x.value(p), head) > tol {
                    return Err(Error::Measurability(format!(
                        "X_{} is not constant on a block of P_{} (point '{}')",
                        k + 1,
                        k + 1,
                        space.id(p)
                    )));
                }
            }
        }
    }
    let zero = RandomVector::zeros(dim, space.len());
    let mut defect = 0.0f64;
    for k in 1..=xs.len() {
        let prev = if k == 1 { &zero } else { &xs[k - 2] };
        let proj = cond_exp(&xs[k - 1], f.partition(k - 1), space)?;
        defect = defect.max(proj.max_pointwise_distance(prev)?);
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(values: &[f64]) -> RandomVector {
        RandomVector::scalar(values.to_vec()).unwrap()
    }

    #[test]
    fn space_rejects_bad_weights() {
        assert!(WeightedSpace::new(vec![("a".into(), 0.5), ("b".into(), 0.6)]).is_err());
        assert!(WeightedSpace::new(vec![("a".into(), 1.0), ("a".into(), 0.0)]).is_err());
        assert!(WeightedSpace::new(vec![("a".into(), 1.2), ("b".into(), -0.2)]).is_err());
    }

    #[test]
    fn cond_exp_trivial_partition_is_mean() {
        let space = WeightedSpace::uniform(2);
        let x = sv(&[1.0, 3.0]);
        let e = cond_exp(&x, &Partition::trivial(2), &space).unwrap();
        assert_eq!(e.values(), &[2.0, 2.0]);
    }

    #[test]
    fn cond_exp_finest_partition_is_identity() {
        let space = WeightedSpace::uniform(3);
        let x = sv(&[1.0, -2.0, 0.5]);
        let e = cond_exp(&x, &Partition::finest(3), &space).unwrap();
        assert_eq!(e.values(), x.values());
    }

    #[test]
    fn cond_exp_blockwise_zero_means() {
        let space = WeightedSpace::uniform(4);
        let a = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let x = sv(&[-1.0, 1.0, -2.0, 2.0]);
        let e = cond_exp(&x, &a, &space).unwrap();
        assert_eq!(e.values(), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn cond_exp_rejects_mismatched_domain() {
        let space = WeightedSpace::uniform(3);
        let x = sv(&[1.0, 2.0]);
        assert!(matches!(
            cond_exp(&x, &Partition::trivial(3), &space),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn conditional_law_renormalizes_and_merges() {
        let space = WeightedSpace::uniform(4);
        let x = sv(&[-1.0, 1.0, -2.0, 2.0]);
        let nu = conditional_law(&x, &[0, 1], &space).unwrap();
        assert_eq!(nu.n_atoms(), 2);
        assert_eq!(nu.location(0), &[-1.0]);
        assert!((nu.mass(0) - 0.5).abs() < 1e-15);

        // constant on the block -> a point mass
        let c = sv(&[5.0, 5.0, 0.0, 0.0]);
        let delta = conditional_law(&c, &[0, 1], &space).unwrap();
        assert_eq!(delta.n_atoms(), 1);
        assert!((delta.mass(0) - 1.0).abs() < 1e-15);

        assert!(conditional_law(&x, &[], &space).is_err());
    }

    #[test]
    fn law_merges_coincident_atoms() {
        let space =
            WeightedSpace::new(vec![("a".into(), 0.25), ("b".into(), 0.25), ("c".into(), 0.5)])
                .unwrap();
        let x = sv(&[0.0, 0.0, 1.0]);
        let mu = law(&x, &space).unwrap();
        assert_eq!(mu.n_atoms(), 2);
        assert!((mu.mass(0) - 0.5).abs() < 1e-15);
        assert!((mu.mass(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn refine_splits_and_conserves_weight() {
        let space = WeightedSpace::new(vec![("a".into(), 0.6), ("b".into(), 0.4)]).unwrap();
        let r = Refinement::new(
            &space,
            vec![
                (0, "a/0".into(), 0.2),
                (0, "a/1".into(), 0.4),
                (1, "b".into(), 0.4),
            ],
        )
        .unwrap();
        let refined = refine(&space, &r).unwrap();
        assert_eq!(refined.len(), 3);
        assert!((refined.weight(0) - 0.2).abs() < 1e-15);

        // conservation violation
        assert!(Refinement::new(
            &space,
            vec![
                (0, "a/0".into(), 0.2),
                (0, "a/1".into(), 0.3),
                (1, "b".into(), 0.4),
            ],
        )
        .is_err());
    }

    #[test]
    fn identity_refinement_keeps_the_space() {
        let space = WeightedSpace::new(vec![("a".into(), 0.6), ("b".into(), 0.4)]).unwrap();
        let r = Refinement::identity(&space);
        assert!(r.is_identity());
        let refined = refine(&space, &r).unwrap();
        assert_eq!(refined.id(0), "a");
        assert_eq!(refined.weights(), space.weights());
    }

    #[test]
    fn lift_preserves_values_and_law() {
        let space = WeightedSpace::new(vec![("a".into(), 0.6), ("b".into(), 0.4)]).unwrap();
        let r = Refinement::new(
            &space,
            vec![
                (0, "a/0".into(), 0.2),
                (0, "a/1".into(), 0.4),
                (1, "b".into(), 0.4),
            ],
        )
        .unwrap();
        let x = sv(&[2.0, -1.0]);
        let lifted = lift_vector(&x, &r).unwrap();
        assert_eq!(lifted.values(), &[2.0, 2.0, -1.0]);

        let refined = refine(&space, &r).unwrap();
        let before = law(&x, &space).unwrap();
        let after = law(&lifted, &refined).unwrap();
        assert_eq!(before.n_atoms(), after.n_atoms());
        for a in 0..before.n_atoms() {
            assert!((before.mass(a) - after.mass(a)).abs() < 1e-12);
            assert_eq!(before.location(a), after.location(a));
        }
    }

    #[test]
    fn lift_partition_groups_children() {
        let space = WeightedSpace::uniform(2);
        let r = Refinement::new(
            &space,
            vec![
                (0, "p0/0".into(), 0.25),
                (0, "p0/1".into(), 0.25),
                (1, "p1".into(), 0.5),
            ],
        )
        .unwrap();
        let lifted = lift_partition(&Partition::finest(2), &r).unwrap();
        assert_eq!(lifted.blocks(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn martingale_defect_detects_drift() {
        let space = WeightedSpace::uniform(2);
        let f = Filtration::new(vec![Partition::trivial(2), Partition::finest(2)]).unwrap();
        let fair = vec![sv(&[-1.0, 1.0])];
        assert!(is_martingale(&fair, &f, &space, 1e-9).unwrap() < 1e-15);

        let biased = vec![sv(&[1.0, 1.0])];
        let defect = is_martingale(&biased, &f, &space, 1e-9).unwrap();
        assert!((defect - 1.0).abs() < 1e-12);

        let zero = vec![sv(&[0.0, 0.0])];
        assert_eq!(is_martingale(&zero, &f, &space, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn martingale_measurability_enforced() {
        let space = WeightedSpace::uniform(4);
        let f = Filtration::new(vec![
            Partition::trivial(4),
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
        ])
        .unwrap();
        // not constant on {0,1}
        let bad = vec![sv(&[-1.0, 1.0, 0.0, 0.0])];
        assert!(matches!(
            is_martingale(&bad, &f, &space, 1e-9),
            Err(Error::Measurability(_))
        ));
    }

    #[test]
    fn filtration_requires_trivial_root_and_refinement() {
        assert!(Filtration::new(vec![Partition::finest(2), Partition::finest(2)]).is_err());
        assert!(Filtration::new(vec![
            Partition::trivial(4),
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap(),
        ])
        .is_err());
    }
}
