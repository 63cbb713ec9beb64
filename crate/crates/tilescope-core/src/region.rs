//! Lattice regions on the triangular lattice: hexagons with triangular holes
//! and dented trapezoids, realised as explicit sets of unit triangles.
//!
//! Points use axial coordinates `(x, y)` meaning `x*e1 + y*e2` with `e1`
//! horizontal and `e2` at 60 degrees. Row `y` is the horizontal strip between
//! heights `y` and `y + 1`. The up-cell `(x, y)` has vertices `(x, y)`,
//! `(x+1, y)`, `(x, y+1)`; the down-cell `(x, y)` has vertices `(x+1, y)`,
//! `(x, y+1)`, `(x+1, y+1)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

/// A unit triangle. Ordering is row-major: row, then column, then up before down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: i64,
    pub col: i64,
    pub orientation: Orientation,
}

impl Cell {
    pub fn up(x: i64, y: i64) -> Cell {
        Cell { row: y, col: x, orientation: Orientation::Up }
    }

    pub fn down(x: i64, y: i64) -> Cell {
        Cell { row: y, col: x, orientation: Orientation::Down }
    }

    pub fn is_up(&self) -> bool {
        self.orientation == Orientation::Up
    }

    pub fn vertices(&self) -> [(i64, i64); 3] {
        let (x, y) = (self.col, self.row);
        match self.orientation {
            Orientation::Up => [(x, y), (x + 1, y), (x, y + 1)],
            Orientation::Down => [(x + 1, y), (x, y + 1), (x + 1, y + 1)],
        }
    }

    /// The three edge-adjacent cells, all of the opposite orientation.
    pub fn neighbors(&self) -> [Cell; 3] {
        let (x, y) = (self.col, self.row);
        match self.orientation {
            Orientation::Up => [Cell::down(x, y), Cell::down(x - 1, y), Cell::down(x, y - 1)],
            Orientation::Down => [Cell::up(x, y), Cell::up(x + 1, y), Cell::up(x, y + 1)],
        }
    }

    /// Three times the centroid, which is always a lattice point.
    pub fn centroid3(&self) -> (i64, i64) {
        let (x, y) = (self.col, self.row);
        match self.orientation {
            Orientation::Up => (3 * x + 1, 3 * y + 1),
            Orientation::Down => (3 * x + 2, 3 * y + 2),
        }
    }

    /// Inverse of [`Cell::centroid3`].
    pub fn from_centroid3(u: i64, v: i64) -> Option<Cell> {
        match (u.rem_euclid(3), v.rem_euclid(3)) {
            (1, 1) => Some(Cell::up((u - 1) / 3, (v - 1) / 3)),
            (2, 2) => Some(Cell::down((u - 2) / 3, (v - 2) / 3)),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = if self.is_up() { "up" } else { "down" };
        write!(f, "{o}({},{})", self.col, self.row)
    }
}

/// Convex lattice polygon cut out by bounds on `x`, `y` and `x + y`
/// (inclusive). Every lattice hexagon and triangle has this shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Hull {
    x: (i64, i64),
    y: (i64, i64),
    z: (i64, i64),
}

const NEG: i64 = i64::MIN / 4;
const POS: i64 = i64::MAX / 4;

impl Hull {
    fn contains_point(&self, (x, y): (i64, i64)) -> bool {
        let z = x + y;
        self.x.0 <= x && x <= self.x.1 && self.y.0 <= y && y <= self.y.1 && self.z.0 <= z && z <= self.z.1
    }

    fn contains_cell(&self, c: &Cell) -> bool {
        c.vertices().iter().all(|&p| self.contains_point(p))
    }

    /// All cells inside; bounds on `x` and `y` must be finite or implied by `z`.
    fn cells(&self) -> Vec<Cell> {
        let ylo = self.y.0.max(self.z.0 - self.x.1);
        let yhi = self.y.1.min(self.z.1 - self.x.0);
        let xlo = self.x.0.max(self.z.0 - self.y.1);
        let xhi = self.x.1.min(self.z.1 - self.y.0);
        let mut out = Vec::new();
        for y in ylo..=yhi {
            for x in (xlo - 1)..=xhi {
                for c in [Cell::up(x, y), Cell::down(x, y)] {
                    if self.contains_cell(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    /// Hexagon `{x >= 0, y >= 0, z <= l, z >= c1, x <= l - c2, y <= l - c3}`.
    fn hexagon(l: i64, c1: i64, c2: i64, c3: i64) -> Hull {
        Hull { x: (0, l - c2), y: (0, l - c3), z: (c1, l) }
    }
}

/// A triangular hole: `anchor` is the bottom-left vertex of an up-triangle
/// or the top-right vertex of a down-triangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hole {
    pub label: String,
    pub orientation: Orientation,
    pub anchor: (i64, i64),
    pub side: i64,
}

impl Hole {
    pub fn up(label: &str, x: i64, y: i64, side: i64) -> Hole {
        Hole { label: label.into(), orientation: Orientation::Up, anchor: (x, y), side }
    }

    pub fn down(label: &str, x: i64, y: i64, side: i64) -> Hole {
        Hole { label: label.into(), orientation: Orientation::Down, anchor: (x, y), side }
    }

    fn hull(&self) -> Hull {
        let (x, y) = self.anchor;
        let s = self.side;
        match self.orientation {
            Orientation::Up => Hull { x: (x, POS), y: (y, POS), z: (NEG, x + y + s) },
            Orientation::Down => Hull { x: (NEG, x), y: (NEG, y), z: (x + y - s, POS) },
        }
    }

    pub fn vertices(&self) -> [(i64, i64); 3] {
        let (x, y) = self.anchor;
        let s = self.side;
        match self.orientation {
            Orientation::Up => [(x, y), (x + s, y), (x, y + s)],
            Orientation::Down => [(x, y), (x - s, y), (x, y - s)],
        }
    }

    /// Unit triangles covered by the hole.
    pub fn cells(&self) -> Vec<Cell> {
        if self.side <= 0 {
            return Vec::new();
        }
        self.hull().cells()
    }

    /// Up-count minus down-count of the covered cells.
    pub fn charge(&self) -> i64 {
        match self.orientation {
            Orientation::Up => self.side,
            Orientation::Down => -self.side,
        }
    }

    /// Image under `p -> R(p - c) + c` with `R` the 120 degree rotation and
    /// `c = center3 / 3`.
    fn rotated(&self, center3: (i64, i64), label: &str) -> Option<Hole> {
        let vs: Vec<(i64, i64)> = self.vertices().iter().map(|&p| rotate_point(p, center3)).collect::<Option<_>>()?;
        let anchor = match self.orientation {
            Orientation::Up => *vs.iter().min_by_key(|&&(x, y)| (y, x))?,
            Orientation::Down => *vs.iter().max_by_key(|&&(x, y)| (y, x))?,
        };
        Some(Hole { label: label.into(), orientation: self.orientation, anchor, side: self.side })
    }
}

/// 120 degree rotation about `c3 / 3`, in axial coordinates.
fn rotate_point((x, y): (i64, i64), c3: (i64, i64)) -> Option<(i64, i64)> {
    let (u, v) = rotate3((3 * x, 3 * y), c3);
    (u % 3 == 0 && v % 3 == 0).then_some((u / 3, v / 3))
}

/// 120 degree rotation of a tripled point about a tripled centre.
fn rotate3((u, v): (i64, i64), (cu, cv): (i64, i64)) -> (i64, i64) {
    let (du, dv) = (u - cu, v - cv);
    (-du - dv + cu, du + cv)
}

/// A horizontal run of removed unit up-triangles in a dented trapezoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub label: &'static str,
    /// Row counted from the bottom starting at 1.
    pub row: i64,
    /// Position of the first triangle in its row, counted from the left starting at 1.
    pub first: i64,
    pub len: i64,
}

impl Chain {
    pub fn dents(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.len).map(move |i| (self.row, self.first + i))
    }
}

/// Parameters of a region family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionSpec {
    /// Hexagon with sides `p, q, r, p, q, r` clockwise from the top.
    Hexagon { p: i64, q: i64, r: i64 },
    /// Core of side `a` with three satellites of side `b` pointing at it.
    S { n: i64, a: i64, b: i64, k: i64 },
    /// Core of side `a` with three satellites of side `b` pointing away from it.
    SPrime { n: i64, a: i64, b: i64, k: i64 },
    SGeneral { n1: i64, n2: i64, n3: i64, a: i64, b1: i64, b2: i64, b3: i64, k1: i64, k2: i64, k3: i64 },
    /// Three bowties whose nodes form a triangle, inside a hexagon.
    Triad { n: i64, k: i64, big_b: i64, a: i64, b: i64, c: i64 },
    /// Up-triangle of side `m` with down-lobes `a` (top), `b` (left), `c` (right) at its corners.
    Shamrock { n1: i64, n2: i64, n3: i64, a: i64, b: i64, c: i64, m: i64 },
    /// `(n, l)`-trapezoid with the listed unit up-triangles `(row, position)` removed, both 1-based.
    DentedTrapezoid { n: i64, l: i64, removed: Vec<(i64, i64)> },
}

impl RegionSpec {
    pub fn s(n: i64, a: i64, b: i64, k: i64) -> RegionSpec {
        RegionSpec::S { n, a, b, k }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            RegionSpec::Hexagon { .. } => "hexagon",
            RegionSpec::S { .. } => "s",
            RegionSpec::SPrime { .. } => "sprime",
            RegionSpec::SGeneral { .. } => "sgeneral",
            RegionSpec::Triad { .. } => "triad",
            RegionSpec::Shamrock { .. } => "shamrock",
            RegionSpec::DentedTrapezoid { .. } => "dented-trapezoid",
        }
    }

    /// Integer parameters in canonical order.
    pub fn params(&self) -> Vec<(&'static str, i64)> {
        match *self {
            RegionSpec::Hexagon { p, q, r } => vec![("p", p), ("q", q), ("r", r)],
            RegionSpec::S { n, a, b, k } | RegionSpec::SPrime { n, a, b, k } => {
                vec![("n", n), ("a", a), ("b", b), ("k", k)]
            }
            RegionSpec::SGeneral { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 } => vec![
                ("n1", n1),
                ("n2", n2),
                ("n3", n3),
                ("a", a),
                ("b1", b1),
                ("b2", b2),
                ("b3", b3),
                ("k1", k1),
                ("k2", k2),
                ("k3", k3),
            ],
            RegionSpec::Triad { n, k, big_b, a, b, c } => {
                vec![("n", n), ("k", k), ("B", big_b), ("a", a), ("b", b), ("c", c)]
            }
            RegionSpec::Shamrock { n1, n2, n3, a, b, c, m } => {
                vec![("n1", n1), ("n2", n2), ("n3", n3), ("a", a), ("b", b), ("c", c), ("m", m)]
            }
            RegionSpec::DentedTrapezoid { n, l, .. } => vec![("n", n), ("l", l)],
        }
    }

    /// `{"variant": name, "params": {name: int}}`, plus `"removed"` for dented trapezoids.
    pub fn to_json(&self) -> Value {
        let params: BTreeMap<&str, i64> = self.params().into_iter().collect();
        let mut v = json!({ "variant": self.variant_name(), "params": params });
        if let RegionSpec::DentedTrapezoid { removed, .. } = self {
            v["removed"] = json!(removed.iter().map(|&(r, c)| [r, c]).collect::<Vec<_>>());
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<RegionSpec> {
        let bad = |m: String| Error::VariantParameter(m);
        let variant = v.get("variant").and_then(Value::as_str).ok_or_else(|| bad("missing \"variant\"".into()))?;
        let empty = serde_json::Map::new();
        let params = v.get("params").and_then(Value::as_object).unwrap_or(&empty);
        let get = |name: &str| -> Result<i64> {
            params
                .get(name)
                .and_then(Value::as_i64)
                .ok_or_else(|| bad(format!("variant {variant} needs integer parameter {name}")))
        };
        let spec = match variant {
            "hexagon" => RegionSpec::Hexagon { p: get("p")?, q: get("q")?, r: get("r")? },
            "s" => RegionSpec::S { n: get("n")?, a: get("a")?, b: get("b")?, k: get("k")? },
            "sprime" => RegionSpec::SPrime { n: get("n")?, a: get("a")?, b: get("b")?, k: get("k")? },
            "sgeneral" => RegionSpec::SGeneral {
                n1: get("n1")?,
                n2: get("n2")?,
                n3: get("n3")?,
                a: get("a")?,
                b1: get("b1")?,
                b2: get("b2")?,
                b3: get("b3")?,
                k1: get("k1")?,
                k2: get("k2")?,
                k3: get("k3")?,
            },
            "triad" => RegionSpec::Triad {
                n: get("n")?,
                k: get("k")?,
                big_b: get("B")?,
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
            },
            "shamrock" => RegionSpec::Shamrock {
                n1: get("n1")?,
                n2: get("n2")?,
                n3: get("n3")?,
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
                m: get("m")?,
            },
            "dented-trapezoid" => {
                let removed = v
                    .get("removed")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("dented-trapezoid needs \"removed\": [[row, pos], ...]".into()))?
                    .iter()
                    .map(|p| {
                        let r = p.get(0).and_then(Value::as_i64);
                        let c = p.get(1).and_then(Value::as_i64);
                        r.zip(c).ok_or_else(|| bad(format!("bad removed entry {p}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                RegionSpec::DentedTrapezoid { n: get("n")?, l: get("l")?, removed }
            }
            other => return Err(bad(format!("unknown variant {other:?}"))),
        };
        Ok(spec)
    }

    /// The symmetric family `S` as its general counterpart.
    pub fn to_general(&self) -> Option<RegionSpec> {
        match *self {
            RegionSpec::S { n, a, b, k } => Some(RegionSpec::SGeneral {
                n1: n,
                n2: n,
                n3: n,
                a,
                b1: b,
                b2: b,
                b3: b,
                k1: k,
                k2: k,
                k3: k,
            }),
            RegionSpec::SGeneral { .. } => Some(self.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.variant_name(), ps.join(","))
    }
}

/// Rows and dents of the six removed chains that turn an
/// `(n1+n2+a+b1+b2+b3, n1+n2+n3+a+b1+b2+b3)`-trapezoid into a region with the
/// same tilings as the general region: two corner runs on the bottom row,
/// then the `b3`, core, `b1` and `b2` runs.
pub fn six_chains(spec: &RegionSpec) -> Result<(i64, i64, Vec<Chain>)> {
    let RegionSpec::SGeneral { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 } =
        spec.to_general().ok_or_else(|| Error::VariantParameter(format!("{spec} has no chain encoding")))?
    else {
        unreachable!()
    };
    let bsum = b1 + b2 + b3;
    let n = n1 + n2 + a + bsum;
    let l = n + n3;
    let h = a / 2;
    let chains = vec![
        Chain { label: "corner-left", row: 1, first: 1, len: n2 },
        Chain { label: "corner-right", row: 1, first: n2 + n3 + a + bsum + 1, len: n1 },
        Chain { label: "b3", row: n3 - 2 * k3 + 1, first: n1 + h + b1 + k3 + 1, len: b3 },
        Chain { label: "core", row: n3 + b3 + 1, first: n1 + b1 + 1, len: a },
        Chain { label: "b1", row: n3 + h + b3 + k1 + 1, first: n1 - 2 * k1 + 1, len: b1 },
        Chain { label: "b2", row: n3 + h + b3 + k2 + 1, first: n1 + h + b1 + k2 + 1, len: b2 },
    ];
    Ok((n, l, chains))
}

/// The general region rewritten as a dented trapezoid.
pub fn sgeneral_as_trapezoid(spec: &RegionSpec) -> Result<RegionSpec> {
    let (n, l, chains) = six_chains(spec)?;
    let removed = chains.iter().flat_map(|c| c.dents().collect::<Vec<_>>()).collect();
    Ok(RegionSpec::DentedTrapezoid { n, l, removed })
}

/// A finite set of unit triangles plus the holes that were cut from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub spec: RegionSpec,
    cells: BTreeSet<Cell>,
    pub holes: Vec<Hole>,
}

/// Bipartite adjacency between up-cells and down-cells, both row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub ups: Vec<Cell>,
    pub downs: Vec<Cell>,
    /// For each up-cell, the indices of its adjacent down-cells.
    pub adj: Vec<Vec<usize>>,
}

impl Region {
    /// A region from an explicit cell set (no holes recorded).
    pub fn from_cells(spec: RegionSpec, cells: impl IntoIterator<Item = Cell>) -> Region {
        Region { spec, cells: cells.into_iter().collect(), holes: Vec::new() }
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    pub fn cell_vec(&self) -> Vec<Cell> {
        self.cells.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.cells.contains(c)
    }

    /// `(up_count, down_count)`.
    pub fn balance(&self) -> (usize, usize) {
        let up = self.cells.iter().filter(|c| c.is_up()).count();
        (up, self.cells.len() - up)
    }

    pub fn is_balanced(&self) -> bool {
        let (u, d) = self.balance();
        u == d
    }

    pub fn dual_graph(&self) -> DualGraph {
        let ups: Vec<Cell> = self.cells.iter().filter(|c| c.is_up()).copied().collect();
        let downs: Vec<Cell> = self.cells.iter().filter(|c| !c.is_up()).copied().collect();
        let index: HashMap<Cell, usize> = downs.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let adj = ups
            .iter()
            .map(|u| {
                let mut v: Vec<usize> = u.neighbors().iter().filter_map(|d| index.get(d).copied()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        DualGraph { ups, downs, adj }
    }

    /// True when the cells form one edge-connected piece (vacuously for the empty region).
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.cells.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([*start]);
        let mut stack = vec![*start];
        while let Some(c) = stack.pop() {
            for nb in c.neighbors() {
                if self.cells.contains(&nb) && seen.insert(nb) {
                    stack.push(nb);
                }
            }
        }
        seen.len() == self.cells.len()
    }

    /// Three times the centroid of all cells, as an exact fraction `(num_x, num_y, den)`.
    fn centroid3(&self) -> (i64, i64, i64) {
        let (mut sx, mut sy) = (0i64, 0i64);
        for c in &self.cells {
            let (u, v) = c.centroid3();
            sx += u;
            sy += v;
        }
        (sx, sy, self.cells.len() as i64)
    }

    /// The 120 degree rotation about the centroid as a permutation of
    /// [`Region::cell_vec`] indices.
    pub fn rotation_map(&self) -> Result<Vec<usize>> {
        if self.cells.is_empty() {
            return Ok(Vec::new());
        }
        let (sx, sy, den) = self.centroid3();
        if sx % den != 0 || sy % den != 0 {
            return Err(Error::NotSymmetric);
        }
        let center = (sx / den, sy / den);
        let cells = self.cell_vec();
        let index: HashMap<Cell, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        cells
            .iter()
            .map(|c| {
                let (u, v) = rotate3(c.centroid3(), center);
                Cell::from_centroid3(u, v).and_then(|r| index.get(&r).copied()).ok_or(Error::NotSymmetric)
            })
            .collect()
    }

    /// The cell a single 120 degree rotation sends `c` to, if the region is symmetric.
    pub fn rotate_cell(&self, c: &Cell) -> Result<Cell> {
        let (sx, sy, den) = self.centroid3();
        if den == 0 || sx % den != 0 || sy % den != 0 {
            return Err(Error::NotSymmetric);
        }
        let (u, v) = rotate3(c.centroid3(), (sx / den, sy / den));
        Cell::from_centroid3(u, v).ok_or(Error::NotSymmetric)
    }

    /// Mirror image in a vertical line: `(x, y) -> (-x - y, y)` on points.
    pub fn mirrored(&self) -> Region {
        let cells = self.cells.iter().map(|c| {
            let (x, y) = (c.col, c.row);
            match c.orientation {
                Orientation::Up => Cell::up(-x - y - 1, y),
                Orientation::Down => Cell::down(-x - y - 2, y),
            }
        });
        Region { spec: self.spec.clone(), cells: cells.collect(), holes: Vec::new() }
    }
}

fn violation(msg: impl Into<String>) -> Error {
    Error::GeometryViolation(msg.into())
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(violation(msg()))
    }
}

/// Cuts `holes` out of the hexagon, requiring each hole inside it and
/// hole interiors pairwise disjoint.
fn carve(spec: &RegionSpec, outer: Hull, holes: Vec<Hole>) -> Result<Region> {
    let mut cells: BTreeSet<Cell> = outer.cells().into_iter().collect();
    let mut taken: BTreeMap<Cell, String> = BTreeMap::new();
    for h in &holes {
        if h.side <= 0 {
            continue;
        }
        if let Some(&p) = h.vertices().iter().find(|&&p| !outer.contains_point(p)) {
            return Err(violation(format!(
                "{} hole of side {} leaves the hexagon at vertex {:?}",
                h.label, h.side, p
            )));
        }
        for c in h.cells() {
            if let Some(other) = taken.insert(c, h.label.clone()) {
                return Err(violation(format!("holes {other} and {} overlap at {c}", h.label)));
            }
            cells.remove(&c);
        }
    }
    Ok(Region { spec: spec.clone(), cells, holes })
}

fn nonneg(spec: &RegionSpec) -> Result<()> {
    for (name, v) in spec.params() {
        require(v >= 0, || format!("parameter {name} = {v} must be non-negative"))?;
    }
    Ok(())
}

/// Builds the cell set of a region, validating its parameters.
pub fn build_region(spec: &RegionSpec) -> Result<Region> {
    nonneg(spec)?;
    match *spec {
        RegionSpec::Hexagon { p, q, r } => carve(spec, Hull::hexagon(p + q + r, q, r, p), Vec::new()),
        RegionSpec::S { n, a, k, .. } => {
            require(a % 2 == 0, || format!("core side a = {a} must be even"))?;
            require(2 * k <= n, || format!("gap k = {k} exceeds n/2 = {n}/2"))?;
            let general = spec.to_general().expect("S has a general form");
            let mut r = build_region(&general)?;
            r.spec = spec.clone();
            Ok(r)
        }
        RegionSpec::SGeneral { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 } => {
            // satellites sit half a core away, so only an empty set of them tolerates odd a
            require(a % 2 == 0 || b1 + b2 + b3 == 0, || format!("core side a = {a} must be even"))?;
            require(n1 <= a + n2 + b2 + n3 + b3, || {
                format!("n1 <= a + n2 + b2 + n3 + b3 fails: {n1} > {}", a + n2 + b2 + n3 + b3)
            })?;
            require(n2 <= a + n1 + b1 + n3 + b3, || {
                format!("n2 <= a + n1 + b1 + n3 + b3 fails: {n2} > {}", a + n1 + b1 + n3 + b3)
            })?;
            require(n3 <= a + n1 + b1 + n2 + b2, || {
                format!("n3 <= a + n1 + b1 + n2 + b2 fails: {n3} > {}", a + n1 + b1 + n2 + b2)
            })?;
            let bsum = b1 + b2 + b3;
            let l = n1 + n2 + n3 + a + bsum;
            let h = a / 2;
            let holes = vec![
                Hole::up("b3", n1 + h + b1 + k3, n3 - 2 * k3, b3),
                Hole::up("core", n1 + b1, n3 + b3, a),
                Hole::up("b1", n1 - 2 * k1, n3 + h + b3 + k1, b1),
                Hole::up("b2", n1 + h + b1 + k2, n3 + h + b3 + k2, b2),
            ];
            carve(spec, Hull::hexagon(l, n2, n1, n3), holes)
        }
        RegionSpec::SPrime { n, a, b, k } => {
            require(b % 2 == 0, || format!("satellite side b = {b} must be even"))?;
            let l = 3 * n + a + 3 * b;
            let top = Hole::up("top", n + b / 2 - k, n + a + b + 2 * k, b);
            let center3 = (l, l);
            let left = top.rotated(center3, "left").ok_or_else(|| violation("rotated satellite off lattice"))?;
            let right = left.rotated(center3, "right").ok_or_else(|| violation("rotated satellite off lattice"))?;
            let holes = vec![Hole::up("core", n + b, n + b, a), top, left, right];
            carve(spec, Hull::hexagon(l, n, n, n), holes)
        }
        RegionSpec::Triad { n, k, big_b, a, b, c } => {
            for (name, v) in [("a", a), ("b", b), ("c", c)] {
                require(v <= big_b, || format!("outer lobe {name} = {v} exceeds B = {big_b}"))?;
            }
            require(2 * k <= n, || format!("lobe-to-side distance n - 2k = {} is negative", n - 2 * k))?;
            let s = n + a + b + c;
            let t = n + 3 * big_b - a - b - c;
            let d = 3 * k + 3 * big_b - a - b - c;
            let p = n - k + a + b;
            let q = n - k + b + c;
            let holes = vec![
                Hole::up("inner-top", p, q + d - (big_b - a), big_b - a),
                Hole::up("inner-left", p, q, big_b - b),
                Hole::up("inner-right", p + d - (big_b - c), q, big_b - c),
                Hole::down("outer-top", p, q + d + a, a),
                Hole::down("outer-left", p, q, b),
                Hole::down("outer-right", p + d + c, q, c),
            ];
            carve(spec, Hull::hexagon(2 * s + t, s, s, s), holes)
        }
        RegionSpec::Shamrock { n1, n2, n3, a, b, c, m } => {
            let big_a = a + b + c;
            let l = n1 + n2 + n3 + 2 * big_a + m;
            let x0 = n1 + n2 - n3 + a + b;
            let y0 = n2 + n3 - n1 + b + c;
            require(x0 >= 0 && y0 >= 0, || {
                format!("shamrock core at ({x0},{y0}) does not fit the prescribed distances")
            })?;
            let holes = vec![
                Hole::up("core", x0, y0, m),
                Hole::down("lobe-top", x0, y0 + m + a, a),
                Hole::down("lobe-left", x0, y0, b),
                Hole::down("lobe-right", x0 + m + c, y0, c),
            ];
            carve(spec, Hull::hexagon(l, n2 + big_a, n3 + big_a, n1 + big_a), holes)
        }
        RegionSpec::DentedTrapezoid { n, l, ref removed } => {
            require(l >= n, || format!("trapezoid base l = {l} shorter than legs n = {n}"))?;
            let outer = Hull { x: (0, POS), y: (0, n), z: (NEG, l) };
            let mut cells: BTreeSet<Cell> = outer.cells().into_iter().collect();
            let mut holes = Vec::new();
            for &(r, c) in removed {
                let cell = Cell::up(c - 1, r - 1);
                require(cells.remove(&cell), || {
                    format!("removed triangle (row {r}, position {c}) is not an available up-triangle")
                })?;
                holes.push(Hole::up("dent", c - 1, r - 1, 1));
            }
            Ok(Region { spec: spec.clone(), cells, holes })
        }
    }
}
