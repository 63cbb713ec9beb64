//! Ground-truth tiling counts: perfect matchings of the dual graph, counted
//! by a transfer-matrix sweep over a vertex ordering, plus the count of
//! tilings invariant under the 120 degree rotation.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::region::{Cell, Region};
use crate::{Error, Result};

/// Exact non-negative tiling count.
pub type BigCount = BigUint;

/// Default largest region handled by the oracle.
pub const DEFAULT_CELL_CAP: usize = 120;

/// Undirected graph with positive integer edge weights, vertices in sweep order.
#[derive(Debug, Clone)]
struct SweepGraph {
    adj: Vec<Vec<(usize, u32)>>,
}

/// One step of the sweep: the frontier before and after eliminating a vertex.
struct Step {
    /// Position of the eliminated vertex in the incoming frontier.
    own: Option<usize>,
    /// Incoming frontier position to outgoing position (`None` for the eliminated vertex).
    remap: Vec<Option<usize>>,
    /// Later neighbours as (outgoing frontier position, weight).
    choices: Vec<(usize, u32)>,
}

fn plan(g: &SweepGraph) -> (Vec<Step>, usize) {
    let n = g.adj.len();
    let mut frontier: Vec<usize> = Vec::new();
    let mut steps = Vec::with_capacity(n);
    let mut widest = 0;
    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        let own = frontier.iter().position(|&w| w == i);
        let mut next: Vec<usize> = frontier.iter().copied().filter(|&w| w != i).collect();
        for &(w, _) in &g.adj[i] {
            if w > i && !next.contains(&w) {
                next.push(w);
            }
        }
        next.sort_unstable();
        for (p, &w) in next.iter().enumerate() {
            pos[w] = p;
        }
        let remap = frontier.iter().map(|&w| (w != i).then(|| pos[w])).collect();
        let choices = g.adj[i].iter().filter(|&&(w, _)| w > i).map(|&(w, wt)| (pos[w], wt)).collect();
        widest = widest.max(next.len());
        steps.push(Step { own, remap, choices });
        frontier = next;
    }
    (steps, widest)
}

/// Subset of a frontier.
trait FrontierKey: Clone + Eq + Hash {
    fn empty(width: usize) -> Self;
    fn get(&self, i: usize) -> bool;
    fn set(&mut self, i: usize);
    fn ones(&self) -> Vec<usize>;
}

impl FrontierKey for u128 {
    fn empty(_: usize) -> Self {
        0
    }
    fn get(&self, i: usize) -> bool {
        self >> i & 1 == 1
    }
    fn set(&mut self, i: usize) {
        *self |= 1u128 << i;
    }
    fn ones(&self) -> Vec<usize> {
        let mut v = Vec::new();
        let mut m = *self;
        while m != 0 {
            v.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        v
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct WideKey(Box<[u64]>);

impl FrontierKey for WideKey {
    fn empty(width: usize) -> Self {
        WideKey(vec![0; width.div_ceil(64).max(1)].into_boxed_slice())
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn ones(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut m = word;
            while m != 0 {
                v.push(w * 64 + m.trailing_zeros() as usize);
                m &= m - 1;
            }
        }
        v
    }
}

/// Accumulator for path counts; `add_mul` reports overflow with `false`.
trait Tally: Clone {
    fn nothing() -> Self;
    fn unit() -> Self;
    fn add_mul(&mut self, c: &Self, w: u32) -> bool;
    fn into_big(self) -> BigUint;
}

impl Tally for u128 {
    fn nothing() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn add_mul(&mut self, c: &Self, w: u32) -> bool {
        match c.checked_mul(w as u128).and_then(|p| self.checked_add(p)) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Tally for BigUint {
    fn nothing() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn add_mul(&mut self, c: &Self, w: u32) -> bool {
        *self += c * w;
        true
    }
    fn into_big(self) -> BigUint {
        self
    }
}

/// Weighted perfect-matching count; `None` when `C` overflows.
fn sweep<K: FrontierKey, C: Tally>(steps: &[Step], width: usize) -> Option<BigUint> {
    let mut states: HashMap<K, C> = HashMap::from([(K::empty(width), C::unit())]);
    for step in steps {
        let mut next: HashMap<K, C> = HashMap::with_capacity(states.len());
        for (key, cnt) in &states {
            let covered = step.own.is_some_and(|p| key.get(p));
            let mut base = K::empty(width);
            for p in key.ones() {
                if let Some(q) = step.remap[p] {
                    base.set(q);
                }
            }
            if covered {
                let slot = next.entry(base).or_insert_with(C::nothing);
                if !slot.add_mul(cnt, 1) {
                    return None;
                }
            } else {
                for &(q, w) in &step.choices {
                    if base.get(q) {
                        continue;
                    }
                    let mut k2 = base.clone();
                    k2.set(q);
                    let slot = next.entry(k2).or_insert_with(C::nothing);
                    if !slot.add_mul(cnt, w) {
                        return None;
                    }
                }
            }
        }
        states = next;
        if states.is_empty() {
            return Some(BigUint::zero());
        }
    }
    Some(states.remove(&K::empty(width)).map_or_else(BigUint::zero, C::into_big))
}

fn count_graph(g: &SweepGraph) -> BigUint {
    let (steps, width) = plan(g);
    if width <= 128 {
        sweep::<u128, u128>(&steps, width)
            .or_else(|| sweep::<u128, BigUint>(&steps, width))
            .expect("big counts never overflow")
    } else {
        sweep::<WideKey, u128>(&steps, width)
            .or_else(|| sweep::<WideKey, BigUint>(&steps, width))
            .expect("big counts never overflow")
    }
}

fn check_cap(region: &Region, cell_cap: usize) -> Result<()> {
    if region.len() > cell_cap {
        Err(Error::RegionTooLarge { cells: region.len(), cap: cell_cap })
    } else {
        Ok(())
    }
}

/// Number of lozenge tilings (perfect matchings of the dual graph).
pub fn count_tilings(region: &Region, cell_cap: usize) -> Result<BigCount> {
    check_cap(region, cell_cap)?;
    if !region.is_balanced() {
        return Ok(BigUint::zero());
    }
    let cells = region.cell_vec();
    let index: HashMap<Cell, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let adj = cells
        .iter()
        .map(|c| c.neighbors().iter().filter_map(|nb| index.get(nb).map(|&j| (j, 1))).collect())
        .collect();
    Ok(count_graph(&SweepGraph { adj }))
}

/// Orbits of the rotation and the index of each cell's orbit.
fn orbits(perm: &[usize]) -> Option<(Vec<[usize; 3]>, Vec<usize>)> {
    let mut orbit_of = vec![usize::MAX; perm.len()];
    let mut out = Vec::new();
    for i in 0..perm.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let (j, k) = (perm[i], perm[perm[i]]);
        if j == i || perm[k] != i {
            return None;
        }
        for c in [i, j, k] {
            orbit_of[c] = out.len();
        }
        out.push([i, j, k]);
    }
    Some((out, orbit_of))
}

/// Number of tilings invariant under the 120 degree rotation, counted as
/// weighted matchings of the orbit graph.
pub fn count_invariant_tilings(region: &Region, cell_cap: usize) -> Result<BigCount> {
    check_cap(region, cell_cap)?;
    let perm = region.rotation_map()?;
    if !region.is_balanced() {
        return Ok(BigUint::zero());
    }
    if perm.is_empty() {
        return Ok(BigUint::one());
    }
    let Some((orbit_list, orbit_of)) = orbits(&perm) else {
        // a fixed cell can never sit in an invariant lozenge
        return Ok(BigUint::zero());
    };
    let cells = region.cell_vec();
    let index: HashMap<Cell, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let reps = representatives(&cells, &orbit_list);
    // orbit adjacency with multiplicity, measured from the representative
    let mut weights: Vec<HashMap<usize, u32>> = vec![HashMap::new(); orbit_list.len()];
    for (o, &r) in reps.iter().enumerate() {
        for nb in cells[r].neighbors() {
            if let Some(&j) = index.get(&nb) {
                *weights[o].entry(orbit_of[j]).or_insert(0) += 1;
            }
        }
    }
    let order = best_order(&cells, &reps, &weights);
    let mut rank = vec![0; order.len()];
    for (r, &o) in order.iter().enumerate() {
        rank[o] = r;
    }
    let adj = order
        .iter()
        .map(|&o| {
            let mut v: Vec<(usize, u32)> = weights[o].iter().map(|(&p, &w)| (rank[p], w)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    Ok(count_graph(&SweepGraph { adj }))
}

/// For each orbit the member whose polar angle about the centre is smallest.
fn representatives(cells: &[Cell], orbit_list: &[[usize; 3]]) -> Vec<usize> {
    let (cx, cy) = center3(cells);
    orbit_list
        .iter()
        .map(|orb| {
            *orb.iter()
                .min_by(|&&a, &&b| polar(cells[a], cx, cy).0.total_cmp(&polar(cells[b], cx, cy).0))
                .expect("orbit has three members")
        })
        .collect()
}

fn center3(cells: &[Cell]) -> (f64, f64) {
    let n = cells.len() as f64;
    let (sx, sy) = cells.iter().fold((0i64, 0i64), |(a, b), c| {
        let (u, v) = c.centroid3();
        (a + u, b + v)
    });
    (sx as f64 / n, sy as f64 / n)
}

/// (angle in `[0, 2 pi)`, radius) of a cell centroid about the centre.
fn polar(c: Cell, cx: f64, cy: f64) -> (f64, f64) {
    let (u, v) = c.centroid3();
    let (du, dv) = (u as f64 - cx, v as f64 - cy);
    let (px, py) = (du + dv / 2.0, dv * 3f64.sqrt() / 2.0);
    let mut a = py.atan2(px);
    if a < -1e-12 {
        a += 2.0 * PI;
    }
    (a.max(0.0), px.hypot(py))
}

/// Picks the orbit ordering with the narrowest sweep frontier among a few
/// geometric candidates.
fn best_order(cells: &[Cell], reps: &[usize], weights: &[HashMap<usize, u32>]) -> Vec<usize> {
    let (cx, cy) = center3(cells);
    let key = |o: usize| polar(cells[reps[o]], cx, cy);
    let n = reps.len();
    let mut by_angle: Vec<usize> = (0..n).collect();
    by_angle.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    let mut by_radius: Vec<usize> = (0..n).collect();
    by_radius.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.1.total_cmp(&kb.1).then(ka.0.total_cmp(&kb.0))
    });
    let mut by_cell: Vec<usize> = (0..n).collect();
    by_cell.sort_by_key(|&o| cells[reps[o]]);
    [by_angle, by_radius, by_cell]
        .into_iter()
        .min_by_key(|ord| {
            let mut rank = vec![0; n];
            for (r, &o) in ord.iter().enumerate() {
                rank[o] = r;
            }
            let adj = ord
                .iter()
                .map(|&o| weights[o].iter().map(|(&p, &w)| (rank[p], w)).collect())
                .collect();
            plan(&SweepGraph { adj }).1
        })
        .expect("three candidates")
}

/// Calls `f` with every tiling, given as the down-cell index matched to each
/// up-cell of [`Region::dual_graph`]. Exponential; for small cross-checks.
pub fn for_each_tiling(region: &Region, cell_cap: usize, mut f: impl FnMut(&[usize])) -> Result<()> {
    check_cap(region, cell_cap)?;
    if !region.is_balanced() {
        return Ok(());
    }
    let g = region.dual_graph();
    let mut used = vec![false; g.downs.len()];
    let mut matched = vec![usize::MAX; g.ups.len()];
    fn rec(i: usize, g: &crate::region::DualGraph, used: &mut [bool], matched: &mut [usize], f: &mut dyn FnMut(&[usize])) {
        if i == g.ups.len() {
            f(matched);
            return;
        }
        for &d in &g.adj[i] {
            if !used[d] {
                used[d] = true;
                matched[i] = d;
                rec(i + 1, g, used, matched, f);
                used[d] = false;
            }
        }
    }
    rec(0, &g, &mut used, &mut matched, &mut f);
    Ok(())
}

/// Invariant tilings by filtering the full enumeration; always correct, exponential.
pub fn count_invariant_by_filter(region: &Region, cell_cap: usize) -> Result<BigCount> {
    let perm = region.rotation_map()?;
    let cells = region.cell_vec();
    let g = region.dual_graph();
    let up_index: HashMap<Cell, usize> = g.ups.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let down_index: HashMap<Cell, usize> = g.downs.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let cell_index: HashMap<Cell, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let rot = |c: &Cell| cells[perm[cell_index[c]]];
    let up_rot: Vec<usize> = g.ups.iter().map(|u| up_index[&rot(u)]).collect();
    let down_rot: Vec<usize> = g.downs.iter().map(|d| down_index[&rot(d)]).collect();
    let mut count = 0u64;
    for_each_tiling(region, cell_cap, |m| {
        if (0..m.len()).all(|u| m[up_rot[u]] == down_rot[m[u]]) {
            count += 1;
        }
    })?;
    Ok(BigUint::from(count))
}

/// Total count by explicit enumeration; exponential, for cross-checks.
pub fn count_by_enumeration(region: &Region, cell_cap: usize) -> Result<BigCount> {
    let mut count = 0u64;
    for_each_tiling(region, cell_cap, |_| count += 1)?;
    Ok(BigUint::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{build_region, RegionSpec};
    use proptest::prelude::*;

    fn hex(p: i64, q: i64, r: i64) -> Region {
        build_region(&RegionSpec::Hexagon { p, q, r }).unwrap()
    }

    fn macmahon(a: u64, b: u64, c: u64) -> BigUint {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for i in 1..=a {
            for j in 1..=b {
                for k in 1..=c {
                    num *= i + j + k - 1;
                    den *= i + j + k - 2;
                }
            }
        }
        num / den
    }

    #[test]
    fn hexagon_counts() {
        assert_eq!(count_tilings(&hex(1, 1, 1), 120).unwrap(), BigUint::from(2u32));
        assert_eq!(count_tilings(&hex(2, 2, 2), 120).unwrap(), BigUint::from(20u32));
        assert_eq!(count_tilings(&hex(4, 3, 2), 120).unwrap(), macmahon(4, 3, 2));
    }

    #[test]
    fn invariant_counts() {
        assert_eq!(count_invariant_tilings(&hex(1, 1, 1), 120).unwrap(), BigUint::from(2u32));
        assert_eq!(count_invariant_tilings(&hex(2, 2, 2), 120).unwrap(), BigUint::from(5u32));
        assert_eq!(count_invariant_by_filter(&hex(2, 2, 2), 120).unwrap(), BigUint::from(5u32));
    }

    #[test]
    fn unbalanced_gives_zero_and_cap_is_enforced() {
        let r = build_region(&RegionSpec::DentedTrapezoid { n: 2, l: 4, removed: vec![] }).unwrap();
        assert_eq!(count_tilings(&r, 120).unwrap(), BigUint::zero());
        assert!(matches!(count_tilings(&hex(5, 5, 5), 120), Err(Error::RegionTooLarge { .. })));
    }

    #[test]
    fn asymmetric_region_has_no_invariant_count() {
        let spec = RegionSpec::SGeneral { n1: 2, n2: 3, n3: 2, a: 0, b1: 0, b2: 0, b3: 0, k1: 0, k2: 0, k3: 0 };
        let r = build_region(&spec).unwrap();
        assert_eq!(count_invariant_tilings(&r, 120), Err(Error::NotSymmetric));
    }

    #[test]
    fn full_lobes_reduce_triad_to_s() {
        // with every lobe at full size B the triad is an S region, reflected
        for (n, k, big_b) in [(2, 0, 1), (2, 1, 1), (3, 1, 1), (2, 1, 2)] {
            let t = build_region(&RegionSpec::Triad { n, k, big_b, a: big_b, b: big_b, c: big_b }).unwrap();
            let s = build_region(&RegionSpec::s(n, 0, big_b, k)).unwrap();
            assert_eq!(count_tilings(&t, 300).unwrap(), count_tilings(&s, 300).unwrap(), "n={n} k={k} B={big_b}");
        }
    }

    #[test]
    fn empty_lobes_reduce_triad_to_sprime() {
        for (n, k, big_b) in [(2, 0, 2), (2, 1, 2), (3, 0, 2)] {
            let t = build_region(&RegionSpec::Triad { n, k, big_b, a: 0, b: 0, c: 0 }).unwrap();
            let sp = build_region(&RegionSpec::SPrime { n, a: 0, b: big_b, k: k + big_b / 2 }).unwrap();
            assert_eq!(count_tilings(&t, 300).unwrap(), count_tilings(&sp, 300).unwrap(), "n={n} k={k} B={big_b}");
        }
    }

    #[test]
    fn trapezoid_encoding_matches_region() {
        for spec in [RegionSpec::s(2, 0, 2, 1), RegionSpec::s(2, 2, 0, 0), RegionSpec::s(3, 0, 1, 1)] {
            let direct = count_tilings(&build_region(&spec).unwrap(), 200).unwrap();
            let trap = build_region(&crate::region::sgeneral_as_trapezoid(&spec).unwrap()).unwrap();
            assert_eq!(count_tilings(&trap, 400).unwrap(), direct, "{spec}");
        }
    }

    #[test]
    fn mirror_preserves_counts() {
        for spec in [RegionSpec::s(2, 0, 1, 1), RegionSpec::s(3, 2, 1, 1)] {
            let r = build_region(&spec).unwrap();
            assert_eq!(count_tilings(&r, 200).unwrap(), count_tilings(&r.mirrored(), 200).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn sweep_matches_enumeration(p in 0i64..3, q in 0i64..3, r in 0i64..3) {
            let h = hex(p, q, r);
            prop_assert_eq!(count_tilings(&h, 120).unwrap(), count_by_enumeration(&h, 120).unwrap());
            prop_assert_eq!(count_tilings(&h, 120).unwrap(), macmahon(p as u64, q as u64, r as u64));
        }

        #[test]
        fn invariant_count_bounded_by_total(n in 1i64..4, b in 0i64..3, k in 0i64..2) {
            if let Ok(s) = build_region(&RegionSpec::s(n, 0, b, k)) {
                if s.len() <= 120 {
                    let inv = count_invariant_tilings(&s, 120).unwrap();
                    prop_assert!(inv <= count_tilings(&s, 120).unwrap());
                    if s.len() <= 60 {
                        prop_assert_eq!(inv, count_invariant_by_filter(&s, 120).unwrap());
                    }
                }
            }
        }
    }
}
