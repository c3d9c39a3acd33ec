//! Finite groupoids: raw data, exhaustive axiom validation and the standard
//! constructions used as examples.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Unvalidated groupoid data with dense arrow indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidData {
    pub arrows: Vec<String>,
    /// Arrow indices of the units.
    pub units: Vec<usize>,
    pub range: Vec<usize>,
    pub source: Vec<usize>,
    pub inverse: Vec<usize>,
    /// Triples `(x, y, xy)`.
    pub compose: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    IndexOutOfRange,
    UnitNotFixed,
    RangeNotUnit,
    SourceNotUnit,
    DuplicateComposition,
    MissingComposition,
    NotComposable,
    RangeMismatch,
    SourceMismatch,
    Associativity,
    InverseLeft,
    InverseRight,
    InverseInvolution,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::IndexOutOfRange => "index out of range",
            ViolationKind::UnitNotFixed => "unit not fixed",
            ViolationKind::RangeNotUnit => "range not a unit",
            ViolationKind::SourceNotUnit => "source not a unit",
            ViolationKind::DuplicateComposition => "duplicate composition",
            ViolationKind::MissingComposition => "missing composition",
            ViolationKind::NotComposable => "composition of non-composable pair",
            ViolationKind::RangeMismatch => "range mismatch",
            ViolationKind::SourceMismatch => "source mismatch",
            ViolationKind::Associativity => "associativity",
            ViolationKind::InverseLeft => "x x^-1 != r(x)",
            ViolationKind::InverseRight => "x^-1 x != s(x)",
            ViolationKind::InverseInvolution => "(x^-1)^-1 != x",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Checks every groupoid axiom over all composable pairs and triples.
pub fn validate(g: &GroupoidData) -> ValidationReport {
    let n = g.arrows.len();
    let mut out = Vec::new();
    let mut push = |kind, detail: String| out.push(Violation { kind, detail });
    let name = |i: usize| g.arrows.get(i).cloned().unwrap_or_else(|| format!("#{i}"));

    if g.range.len() != n || g.source.len() != n || g.inverse.len() != n {
        push(ViolationKind::IndexOutOfRange, "range/source/inverse must have one entry per arrow".into());
        return ValidationReport { violations: out };
    }
    let oob = g.units.iter().chain(&g.range).chain(&g.source).chain(&g.inverse).any(|&i| i >= n)
        || g.compose.iter().any(|&(x, y, z)| x >= n || y >= n || z >= n);
    if oob {
        push(ViolationKind::IndexOutOfRange, "arrow index exceeds arrow count".into());
        return ValidationReport { violations: out };
    }
    let is_unit: Vec<bool> = (0..n).map(|i| g.units.contains(&i)).collect();
    for &u in &g.units {
        if g.range[u] != u || g.source[u] != u {
            push(ViolationKind::UnitNotFixed, format!("unit {}", name(u)));
        }
    }
    for x in 0..n {
        if !is_unit[g.range[x]] {
            push(ViolationKind::RangeNotUnit, format!("r({}) = {}", name(x), name(g.range[x])));
        }
        if !is_unit[g.source[x]] {
            push(ViolationKind::SourceNotUnit, format!("s({}) = {}", name(x), name(g.source[x])));
        }
    }
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    for &(x, y, z) in &g.compose {
        if table.insert((x, y), z).is_some() {
            push(ViolationKind::DuplicateComposition, format!("({}, {})", name(x), name(y)));
        }
        if g.source[x] != g.range[y] {
            push(ViolationKind::NotComposable, format!("({}, {})", name(x), name(y)));
            continue;
        }
        if g.range[z] != g.range[x] {
            push(ViolationKind::RangeMismatch, format!("r({}·{} = {}) != r({})", name(x), name(y), name(z), name(x)));
        }
        if g.source[z] != g.source[y] {
            push(ViolationKind::SourceMismatch, format!("s({}·{} = {}) != s({})", name(x), name(y), name(z), name(y)));
        }
    }
    for x in 0..n {
        for y in 0..n {
            if g.source[x] == g.range[y] && !table.contains_key(&(x, y)) {
                push(ViolationKind::MissingComposition, format!("({}, {})", name(x), name(y)));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let Some(&xy) = table.get(&(x, y)) else { continue };
            for z in 0..n {
                let Some(&yz) = table.get(&(y, z)) else { continue };
                match (table.get(&(xy, z)), table.get(&(x, yz))) {
                    (Some(a), Some(b)) if a == b => {}
                    _ => push(
                        ViolationKind::Associativity,
                        format!("({}·{})·{} vs {}·({}·{})", name(x), name(y), name(z), name(x), name(y), name(z)),
                    ),
                }
            }
        }
    }
    for x in 0..n {
        let xi = g.inverse[x];
        if table.get(&(x, xi)) != Some(&g.range[x]) {
            push(ViolationKind::InverseLeft, name(x));
        }
        if table.get(&(xi, x)) != Some(&g.source[x]) {
            push(ViolationKind::InverseRight, name(x));
        }
        if g.inverse[xi] != x {
            push(ViolationKind::InverseInvolution, name(x));
        }
    }
    ValidationReport { violations: out }
}

/// Which fibered product of `G` with itself to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    /// `{(x, y) : s(x) = r(y)}`
    SourceRange,
    /// `{(x, y) : r(x) = r(y)}`
    RangeRange,
}

/// A validated finite groupoid.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroupoid {
    data: GroupoidData,
    /// Position of each arrow in `units`, if it is a unit.
    unit_pos: Vec<Option<usize>>,
    /// Dense composition table, `n * n`.
    table: Vec<Option<usize>>,
}

impl FiniteGroupoid {
    pub fn new(data: GroupoidData) -> Result<Self> {
        let report = validate(&data);
        if !report.is_valid() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Invalid(format!("groupoid axioms violated: {}", msgs.join("; "))));
        }
        let n = data.arrows.len();
        let mut unit_pos = vec![None; n];
        for (k, &u) in data.units.iter().enumerate() {
            unit_pos[u] = Some(k);
        }
        let mut table = vec![None; n * n];
        for &(x, y, z) in &data.compose {
            table[x * n + y] = Some(z);
        }
        Ok(FiniteGroupoid { data, unit_pos, table })
    }

    pub fn data(&self) -> &GroupoidData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.arrows.is_empty()
    }

    pub fn num_units(&self) -> usize {
        self.data.units.len()
    }

    pub fn arrow(&self, x: usize) -> &str {
        &self.data.arrows[x]
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.data.arrows.iter().position(|a| a == label)
    }

    /// Arrow index of the `k`-th unit.
    pub fn unit(&self, k: usize) -> usize {
        self.data.units[k]
    }

    pub fn units(&self) -> &[usize] {
        &self.data.units
    }

    pub fn unit_position(&self, x: usize) -> Option<usize> {
        self.unit_pos[x]
    }

    /// `r(x)` as an arrow index.
    pub fn r(&self, x: usize) -> usize {
        self.data.range[x]
    }

    /// `s(x)` as an arrow index.
    pub fn s(&self, x: usize) -> usize {
        self.data.source[x]
    }

    /// `r(x)` as a position in [`units`](Self::units).
    pub fn r_unit(&self, x: usize) -> usize {
        self.unit_pos[self.data.range[x]].expect("validated")
    }

    /// `s(x)` as a position in [`units`](Self::units).
    pub fn s_unit(&self, x: usize) -> usize {
        self.unit_pos[self.data.source[x]].expect("validated")
    }

    pub fn inv(&self, x: usize) -> usize {
        self.data.inverse[x]
    }

    pub fn compose(&self, x: usize, y: usize) -> Option<usize> {
        self.table[x * self.len() + y]
    }

    /// `G^u`, ordered by arrow index; `u` is a unit position.
    pub fn range_fiber(&self, u: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.r_unit(x) == u).collect()
    }

    /// `G_u`, ordered by arrow index; `u` is a unit position.
    pub fn source_fiber(&self, u: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.s_unit(x) == u).collect()
    }

    /// Lexicographically ordered pairs.
    pub fn composable_pairs(&self, mode: PairMode) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let ok = match mode {
                    PairMode::SourceRange => self.s(x) == self.r(y),
                    PairMode::RangeRange => self.r(x) == self.r(y),
                };
                if ok {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Composable triples `(x, y, z)` with `s(x) = r(y)` and `s(y) = r(z)`.
    pub fn composable_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (x, y) in self.composable_pairs(PairMode::SourceRange) {
            for z in 0..self.len() {
                if self.s(y) == self.r(z) {
                    out.push((x, y, z));
                }
            }
        }
        out
    }
}

/// Multiplication table of a finite group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTable {
    pub name: String,
    pub labels: Vec<String>,
    /// `mul[a][b] = a·b`.
    pub mul: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn cyclic(n: usize) -> Self {
        GroupTable {
            name: format!("Z{n}"),
            labels: (0..n).map(|k| k.to_string()).collect(),
            mul: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
        }
    }

    /// The symmetric group on three letters, elements as permutations of
    /// `0 1 2` in lexicographic order.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mul = perms.iter().map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
        GroupTable {
            name: "S3".into(),
            labels: perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect(),
            mul,
        }
    }

    /// Checks closure, associativity, identity and inverses; returns the
    /// identity and the inverse table.
    pub fn check(&self) -> Result<(usize, Vec<usize>)> {
        let n = self.labels.len();
        let bad = |m: &str| Error::Invalid(format!("group table {}: {m}", self.name));
        if n == 0 || self.mul.len() != n || self.mul.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(bad("not a closed n x n table"));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul[self.mul[a][b]][c] != self.mul[a][self.mul[b][c]] {
                        return Err(bad("not associative"));
                    }
                }
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|a| self.mul[e][a] == a && self.mul[a][e] == a))
            .ok_or_else(|| bad("no identity"))?;
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            inv.push(
                (0..n).find(|&b| self.mul[a][b] == e && self.mul[b][a] == e).ok_or_else(|| bad("missing inverse"))?,
            );
        }
        Ok((e, inv))
    }
}

/// The pair groupoid on `{1..n}`: arrow `(i,j)` has range `(i,i)`, source
/// `(j,j)` and `(i,j)(j,k) = (i,k)`.
pub fn pair_groupoid(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::Invalid("pair groupoid needs at least one point".into()));
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut data = GroupoidData {
        arrows: Vec::new(),
        units: (0..n).map(|i| idx(i, i)).collect(),
        range: Vec::new(),
        source: Vec::new(),
        inverse: Vec::new(),
        compose: Vec::new(),
    };
    for i in 0..n {
        for j in 0..n {
            data.arrows.push(format!("({},{})", i + 1, j + 1));
            data.range.push(idx(i, i));
            data.source.push(idx(j, j));
            data.inverse.push(idx(j, i));
            for k in 0..n {
                data.compose.push((idx(i, j), idx(j, k), idx(i, k)));
            }
        }
    }
    FiniteGroupoid::new(data)
}

pub fn group_as_groupoid(table: &GroupTable) -> Result<FiniteGroupoid> {
    let (e, inv) = table.check()?;
    let n = table.labels.len();
    let mut compose = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            compose.push((a, b, table.mul[a][b]));
        }
    }
    FiniteGroupoid::new(GroupoidData {
        arrows: table.labels.clone(),
        units: vec![e],
        range: vec![e; n],
        source: vec![e; n],
        inverse: inv,
        compose,
    })
}

/// Disjoint union; arrow labels must not clash.
pub fn disjoint_union(g1: &FiniteGroupoid, g2: &FiniteGroupoid) -> Result<FiniteGroupoid> {
    let (a, b) = (g1.data(), g2.data());
    if a.arrows.iter().any(|x| b.arrows.contains(x)) {
        return Err(Error::Invalid("disjoint union needs distinct arrow labels".into()));
    }
    let off = a.arrows.len();
    let shift = |v: &[usize]| v.iter().map(|i| i + off).collect::<Vec<_>>();
    let mut data = a.clone();
    data.arrows.extend(b.arrows.iter().cloned());
    data.units.extend(shift(&b.units));
    data.range.extend(shift(&b.range));
    data.source.extend(shift(&b.source));
    data.inverse.extend(shift(&b.inverse));
    data.compose.extend(b.compose.iter().map(|&(x, y, z)| (x + off, y + off, z + off)));
    FiniteGroupoid::new(data)
}

/// Bundle of groups over a discrete unit space, one group per unit. Arrow
/// labels are prefixed with the group name.
pub fn group_bundle(groups: &[GroupTable]) -> Result<FiniteGroupoid> {
    let mut acc: Option<FiniteGroupoid> = None;
    for (k, t) in groups.iter().enumerate() {
        let mut named = t.clone();
        named.labels = t.labels.iter().map(|l| format!("{}#{k}:{l}", t.name)).collect();
        let g = group_as_groupoid(&named)?;
        acc = Some(match acc {
            None => g,
            Some(prev) => disjoint_union(&prev, &g)?,
        });
    }
    acc.ok_or_else(|| Error::Invalid("group bundle needs at least one group".into()))
}

/// Transformation groupoid of a left action `act[g][p] = g·p`. The arrow
/// `(g, p)` goes from `p` to `g·p`.
pub fn action_groupoid(group: &GroupTable, points: &[String], act: &[Vec<usize>]) -> Result<FiniteGroupoid> {
    let (e, inv) = group.check()?;
    let ng = group.labels.len();
    let np = points.len();
    if np == 0 || act.len() != ng || act.iter().any(|r| r.len() != np || r.iter().any(|&q| q >= np)) {
        return Err(Error::Invalid("action table has the wrong shape".into()));
    }
    if (0..np).any(|p| act[e][p] != p) {
        return Err(Error::Invalid("identity does not act trivially".into()));
    }
    for g in 0..ng {
        for h in 0..ng {
            for p in 0..np {
                if act[h][act[g][p]] != act[group.mul[h][g]][p] {
                    return Err(Error::Invalid("action is not compatible with multiplication".into()));
                }
            }
        }
    }
    let idx = |g: usize, p: usize| g * np + p;
    let mut data = GroupoidData {
        arrows: Vec::new(),
        units: (0..np).map(|p| idx(e, p)).collect(),
        range: Vec::new(),
        source: Vec::new(),
        inverse: Vec::new(),
        compose: Vec::new(),
    };
    for g in 0..ng {
        for p in 0..np {
            data.arrows.push(format!("({},{})", group.labels[g], points[p]));
            data.range.push(idx(e, act[g][p]));
            data.source.push(idx(e, p));
            data.inverse.push(idx(inv[g], act[g][p]));
            for h in 0..ng {
                data.compose.push((idx(h, act[g][p]), idx(g, p), idx(group.mul[h][g], p)));
            }
        }
    }
    // pairs were generated by (second factor, first factor); sort for a stable listing
    data.compose.sort_unstable();
    FiniteGroupoid::new(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_counts() {
        let p3 = pair_groupoid(3).unwrap();
        assert_eq!((p3.len(), p3.num_units()), (9, 3));
        let s3 = group_as_groupoid(&GroupTable::symmetric3()).unwrap();
        assert_eq!((s3.len(), s3.num_units()), (6, 1));
        let z2 = GroupTable::cyclic(2);
        let swap = action_groupoid(&z2, &["a".into(), "b".into()], &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!((swap.len(), swap.num_units()), (4, 2));
    }

    #[test]
    fn pair_counts() {
        let z2 = group_as_groupoid(&GroupTable::cyclic(2)).unwrap();
        assert_eq!(z2.composable_pairs(PairMode::SourceRange).len(), 4);
        let p2 = pair_groupoid(2).unwrap();
        assert_eq!(p2.composable_pairs(PairMode::SourceRange).len(), 8);
        assert_eq!(p2.composable_pairs(PairMode::RangeRange).len(), 8);
    }

    #[test]
    fn rewired_composition_is_reported() {
        let mut d = pair_groupoid(2).unwrap().data().clone();
        // arrows: 0=(1,1) 1=(1,2) 2=(2,1) 3=(2,2)
        for t in d.compose.iter_mut() {
            if t.0 == 1 && t.1 == 2 {
                t.2 = 3;
            }
        }
        let rep = validate(&d);
        assert!(rep.has(ViolationKind::RangeMismatch));
        assert!(FiniteGroupoid::new(d).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        let mut t = GroupTable::cyclic(3);
        t.mul[1][1] = 1;
        assert!(group_as_groupoid(&t).is_err());
        let z2 = GroupTable::cyclic(2);
        assert!(action_groupoid(&z2, &["a".into(), "b".into()], &[vec![0, 1], vec![0, 0]]).is_err());
    }

    #[test]
    fn fiber_counts_and_translation_bijection() {
        let groupoids = vec![
            pair_groupoid(3).unwrap(),
            group_bundle(&[GroupTable::cyclic(2), GroupTable::cyclic(3)]).unwrap(),
            group_as_groupoid(&GroupTable::symmetric3()).unwrap(),
        ];
        for g in groupoids {
            let sr: usize = (0..g.len()).map(|x| g.range_fiber(g.s_unit(x)).len()).sum();
            assert_eq!(g.composable_pairs(PairMode::SourceRange).len(), sr);
            let rr: usize = (0..g.num_units()).map(|u| g.range_fiber(u).len().pow(2)).sum();
            assert_eq!(g.composable_pairs(PairMode::RangeRange).len(), rr);
            for x in 0..g.len() {
                let mut image: Vec<usize> =
                    g.range_fiber(g.s_unit(x)).iter().map(|&y| g.compose(x, y).unwrap()).collect();
                image.sort_unstable();
                assert_eq!(image, g.range_fiber(g.r_unit(x)));
            }
        }
    }
}
