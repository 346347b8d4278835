//! Random mappings of `[n]`, their functional digraphs and walk encodings.
//!
//! Vertices are stored 0-based; `Mapping::new` and all exported tables
//! use the 1-based labels `1..=n`.

mod enumerate;

pub use enumerate::{enumerate_exact, EnumerationTables, MAX_ENUMERATION_N};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

pub const MAX_MAPPING_SIZE: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mapping {
    image: Vec<u32>,
}

impl Mapping {
    /// Builds a mapping from 1-based images.
    pub fn new(image: &[usize]) -> Result<Self> {
        let n = image.len();
        check_size(n)?;
        if let Some(bad) = image.iter().find(|&&v| v == 0 || v > n) {
            return param(format!("image entry {bad} outside [1, {n}]"));
        }
        Ok(Mapping { image: image.iter().map(|&v| (v - 1) as u32).collect() })
    }

    pub fn from_zero_based(image: Vec<u32>) -> Result<Self> {
        let n = image.len();
        check_size(n)?;
        if let Some(bad) = image.iter().find(|&&v| v as usize >= n) {
            return param(format!("image entry {bad} outside [0, {n})"));
        }
        Ok(Mapping { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// `M(v)` for a 0-based vertex.
    pub fn apply(&self, v: usize) -> usize {
        self.image[v] as usize
    }

    pub fn image_one_based(&self) -> Vec<usize> {
        self.image.iter().map(|&v| v as usize + 1).collect()
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return param("mapping size must be at least 1");
    }
    if n > MAX_MAPPING_SIZE {
        return param(format!("mapping size {n} exceeds the limit {MAX_MAPPING_SIZE}"));
    }
    Ok(())
}

pub fn sample_uniform_mapping<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Mapping> {
    check_size(n)?;
    let image = (0..n).map(|_| rng.random_range(0..n as u32)).collect();
    Ok(Mapping { image })
}

/// Uniform mapping conditioned to have a single cycle, by rejection.
pub fn sample_single_cycle_mapping<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Mapping> {
    loop {
        let m = sample_uniform_mapping(n, rng)?;
        if count_cycles(&m) == 1 {
            return Ok(m);
        }
    }
}

/// Marks cyclic points by repeatedly deleting vertices of in-degree zero.
fn cyclic_flags(m: &Mapping) -> Vec<bool> {
    let n = m.n();
    let mut indeg = vec![0u32; n];
    for &v in &m.image {
        indeg[v as usize] += 1;
    }
    let mut cyclic = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        cyclic[v] = false;
        let w = m.apply(v);
        indeg[w] -= 1;
        if indeg[w] == 0 {
            stack.push(w);
        }
    }
    cyclic
}

pub fn count_cycles(m: &Mapping) -> usize {
    let cyclic = cyclic_flags(m);
    let mut seen = vec![false; m.n()];
    let mut k = 0;
    for v in 0..m.n() {
        if cyclic[v] && !seen[v] {
            k += 1;
            let mut w = v;
            while !seen[w] {
                seen[w] = true;
                w = m.apply(w);
            }
        }
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalDigraph {
    n: usize,
    image: Vec<u32>,
    is_cyclic: Vec<bool>,
    /// Each cycle starts at its least element and follows the mapping.
    cycles: Vec<Vec<u32>>,
    cycle_of: Vec<u32>,
    root_of: Vec<u32>,
    depth: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    height: Vec<u32>,
    tree_size: Vec<u32>,
}

pub fn analyze_digraph(m: &Mapping) -> FunctionalDigraph {
    let n = m.n();
    let is_cyclic = cyclic_flags(m);

    let mut cycles = Vec::new();
    let mut cycle_of = vec![u32::MAX; n];
    for v in 0..n {
        if is_cyclic[v] && cycle_of[v] == u32::MAX {
            let idx = cycles.len() as u32;
            let mut cyc = Vec::new();
            let mut w = v;
            while cycle_of[w] == u32::MAX {
                cycle_of[w] = idx;
                cyc.push(w as u32);
                w = m.apply(w);
            }
            cycles.push(cyc);
        }
    }

    // noncyclic children in increasing label order (CSR)
    let mut child_start = vec![0u32; n + 1];
    for (v, &cyclic) in is_cyclic.iter().enumerate() {
        if !cyclic {
            child_start[m.apply(v) + 1] += 1;
        }
    }
    for v in 0..n {
        child_start[v + 1] += child_start[v];
    }
    let mut fill = child_start.clone();
    let mut children = vec![0u32; child_start[n] as usize];
    for (v, &cyclic) in is_cyclic.iter().enumerate() {
        if !cyclic {
            let p = m.apply(v);
            children[fill[p] as usize] = v as u32;
            fill[p] += 1;
        }
    }

    let mut root_of = vec![0u32; n];
    let mut depth = vec![0u32; n];
    let mut height = vec![0u32; n];
    let mut tree_size = vec![0u32; n];
    let mut stack = Vec::new();
    for c in 0..n {
        if !is_cyclic[c] {
            continue;
        }
        let mut h = 0;
        let mut size = 0;
        stack.push(c);
        while let Some(v) = stack.pop() {
            root_of[v] = c as u32;
            size += 1;
            h = h.max(depth[v]);
            for &ch in &children[child_start[v] as usize..child_start[v + 1] as usize] {
                depth[ch as usize] = depth[v] + 1;
                cycle_of[ch as usize] = cycle_of[c];
                stack.push(ch as usize);
            }
        }
        height[c] = h;
        tree_size[c] = size;
    }

    FunctionalDigraph {
        n,
        image: m.image.clone(),
        is_cyclic,
        cycles,
        cycle_of,
        root_of,
        depth,
        child_start,
        children,
        height,
        tree_size,
    }
}

impl FunctionalDigraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_cyclic(&self, v: usize) -> bool {
        self.is_cyclic[v]
    }

    pub fn cyclic_points(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.is_cyclic[v]).collect()
    }

    pub fn cyclic_count(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Cycles in order of least element; each lists `c, M(c), M²(c), …`.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles.iter().map(|c| c.iter().map(|&v| v as usize).collect()).collect()
    }

    /// Basins indexed like `cycles()`, each sorted.
    pub fn basins(&self) -> Vec<Vec<usize>> {
        let mut b = vec![Vec::new(); self.cycles.len()];
        for v in 0..self.n {
            b[self.cycle_of[v] as usize].push(v);
        }
        b
    }

    pub fn basin_index(&self, v: usize) -> usize {
        self.cycle_of[v] as usize
    }

    pub fn root_of(&self, v: usize) -> usize {
        self.root_of[v] as usize
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    /// `h(c)`, the greatest depth in the tree rooted at cyclic point `c`.
    pub fn height(&self, c: usize) -> usize {
        self.height[c] as usize
    }

    pub fn tree_size(&self, c: usize) -> usize {
        self.tree_size[c] as usize
    }

    /// Sorted vertex set of the tree rooted at cyclic point `c`.
    pub fn tree_of(&self, c: usize) -> Vec<usize> {
        let mut t: Vec<usize> = (0..self.n).filter(|&v| self.root_of[v] as usize == c).collect();
        t.sort_unstable();
        t
    }

    fn children(&self, v: usize) -> &[u32] {
        &self.children[self.child_start[v] as usize..self.child_start[v + 1] as usize]
    }

    fn push_tree_walk(&self, root: usize, steps: &mut Vec<i8>) {
        // (vertex, next child offset)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        steps.push(1);
        while let Some(top) = stack.last_mut() {
            let (v, k) = *top;
            let ch = self.children(v);
            if k < ch.len() {
                top.1 += 1;
                steps.push(1);
                stack.push((ch[k] as usize, 0));
            } else {
                steps.push(-1);
                stack.pop();
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingMode {
    CyclesFirst,
    BasinsFirst,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Sorted basin vertices.
    pub basin: Vec<usize>,
    /// Sorted cyclic points.
    pub cycle: Vec<usize>,
    /// Tree roots `M(c), M²(c), …, c` ending at the distinguished point.
    pub roots: Vec<usize>,
}

pub fn order_components(d: &FunctionalDigraph, mode: OrderingMode) -> Vec<Component> {
    let basins = d.basins();
    // (sort key, cycle index, distinguished cyclic point)
    let mut keys: Vec<(usize, usize, usize)> = match mode {
        OrderingMode::CyclesFirst => {
            d.cycles.iter().enumerate().map(|(i, c)| (c[0] as usize, i, c[0] as usize)).collect()
        }
        OrderingMode::BasinsFirst => basins
            .iter()
            .enumerate()
            .map(|(i, b)| (b[0], i, d.root_of(b[0])))
            .collect(),
    };
    keys.sort_unstable();
    keys.into_iter()
        .map(|(_, i, c)| {
            let cyc = &d.cycles[i];
            let at = cyc.iter().position(|&v| v as usize == c).expect("root lies on its cycle");
            let len = cyc.len();
            let roots = (1..=len).map(|k| cyc[(at + k) % len] as usize).collect();
            let mut cycle: Vec<usize> = cyc.iter().map(|&v| v as usize).collect();
            cycle.sort_unstable();
            Component { basin: basins[i].clone(), cycle, roots }
        })
        .collect()
}

/// Depth-first contour of the tree rooted at `root`: +1 on entering a
/// vertex, -1 on leaving it, children in increasing label order. Labels
/// are 0-based.
pub fn encode_tree_walk(root: usize, tree: &[usize], m: &Mapping) -> Result<Vec<i8>> {
    let n = m.n();
    if root >= n || tree.iter().any(|&v| v >= n) {
        return Err(Error::Structural("vertex outside the mapping".into()));
    }
    let mut in_tree = vec![false; n];
    for &v in tree {
        if in_tree[v] {
            return Err(Error::Structural(format!("vertex {v} listed twice")));
        }
        in_tree[v] = true;
    }
    if !in_tree[root] {
        return Err(Error::Structural("root not in tree".into()));
    }
    // root must be cyclic; its cycle predecessor is the only outside preimage allowed
    let mut pred = root;
    let mut w = m.apply(root);
    let mut steps = 1;
    while w != root {
        if steps > n {
            return Err(Error::Structural(format!("root {root} is not cyclic")));
        }
        pred = w;
        w = m.apply(w);
        steps += 1;
    }
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let p = m.apply(v);
        if v == root {
            continue;
        }
        if in_tree[v] {
            if !in_tree[p] {
                return Err(Error::Structural(format!("vertex {v} maps outside the tree")));
            }
            if v == pred {
                return Err(Error::Structural(format!("cyclic vertex {v} inside another tree")));
            }
            kids[p].push(v);
        } else if in_tree[p] && !(p == root && v == pred) {
            return Err(Error::Structural(format!("tree misses preimage {v} of {p}")));
        }
    }
    let mut out = Vec::with_capacity(2 * tree.len());
    let mut visited = 0;
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    out.push(1);
    while let Some(top) = stack.last_mut() {
        let (v, k) = *top;
        if k == 0 {
            visited += 1;
        }
        if k < kids[v].len() {
            top.1 += 1;
            out.push(1);
            stack.push((kids[v][k], 0));
        } else {
            out.push(-1);
            stack.pop();
        }
        if visited > tree.len() {
            return Err(Error::Structural("cycle among tree vertices".into()));
        }
    }
    if visited != tree.len() {
        return Err(Error::Structural("tree vertices not all reachable from root".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingWalk {
    pub steps: Vec<i8>,
    /// Step index at which each basin segment starts.
    pub component_boundaries: Vec<usize>,
    /// Step counts `k ≥ 1` after which the level is 0.
    pub zero_return_indices: Vec<usize>,
}

impl MappingWalk {
    pub fn levels(&self) -> Vec<i64> {
        let mut lv = Vec::with_capacity(self.steps.len() + 1);
        let mut s = 0i64;
        lv.push(0);
        for &x in &self.steps {
            s += x as i64;
            lv.push(s);
        }
        lv
    }

    pub fn max_level(&self) -> i64 {
        self.levels().into_iter().max().unwrap_or(0)
    }
}

pub fn build_mapping_walk(d: &FunctionalDigraph, mode: OrderingMode) -> MappingWalk {
    let mut steps = Vec::with_capacity(2 * d.n);
    let mut component_boundaries = Vec::new();
    let mut zero_return_indices = Vec::new();
    for comp in order_components(d, mode) {
        component_boundaries.push(steps.len());
        for &r in &comp.roots {
            d.push_tree_walk(r, &mut steps);
            zero_return_indices.push(steps.len());
        }
    }
    MappingWalk { steps, component_boundaries, zero_return_indices }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkStatistics {
    /// Per component `(|B_j|/n, |C_j|/√n)` in walk order.
    pub components: Vec<(f64, f64)>,
    pub cyclic_scaled: f64,
    /// Maximum walk level over `√n`.
    pub scaled_max: f64,
}

pub fn scaled_walk_statistics(w: &MappingWalk, d: &FunctionalDigraph, mode: OrderingMode) -> WalkStatistics {
    let n = d.n as f64;
    let comps = order_components(d, mode);
    let mut bounds = w.component_boundaries.clone();
    bounds.push(w.steps.len());
    let components = comps
        .iter()
        .zip(bounds.windows(2))
        .map(|(c, b)| ((b[1] - b[0]) as f64 / (2.0 * n), c.cycle.len() as f64 / n.sqrt()))
        .collect();
    WalkStatistics {
        components,
        cyclic_scaled: w.zero_return_indices.len() as f64 / n.sqrt(),
        scaled_max: w.max_level() as f64 / n.sqrt(),
    }
}
