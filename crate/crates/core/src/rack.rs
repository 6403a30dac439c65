//! Finite racks as operation tables.
//!
//! Elements are the indices `0..n`; `table[x][y] = x ▷ y`. The right
//! translation `β_y: x ↦ x ▷ y` is column `y` of the table.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::{subgroup_closure, PermGroup, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RackError {
    #[error("row {row} has {len} entries, expected {n}")]
    Ragged { row: usize, len: usize, n: usize },
    #[error("entry {x} ▷ {y} = {value} is out of range for order {n}")]
    OutOfRange {
        x: usize,
        y: usize,
        value: usize,
        n: usize,
    },
    #[error("R1 fails: column {y} is not a bijection")]
    NotInvertible { y: usize },
    #[error("R2 fails at ({x}, {y}, {z}): (x▷y)▷z ≠ (x▷z)▷(y▷z)")]
    NotSelfDistributive { x: usize, y: usize, z: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("gcd({t}, {n}) ≠ 1")]
    NotCoprime { t: usize, n: usize },
    #[error("s² ≢ s(1 − t) mod {n} for t = {t}, s = {s}")]
    BadTsPair { n: usize, t: usize, s: usize },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("invalid group table: {0}")]
    BadGroup(String),
    #[error(transparent)]
    Rack(#[from] RackError),
}

/// A validated finite rack.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RackTable {
    n: usize,
    table: Vec<usize>,
}

/// Validates a candidate table, reporting the first violated axiom.
pub fn validate_rack(rows: Vec<Vec<usize>>) -> Result<RackTable, RackError> {
    let n = rows.len();
    let mut table = Vec::with_capacity(n * n);
    for (row, r) in rows.into_iter().enumerate() {
        if r.len() != n {
            return Err(RackError::Ragged {
                row,
                len: r.len(),
                n,
            });
        }
        table.extend(r);
    }
    RackTable::from_flat(n, table)
}

impl RackTable {
    /// Builds and validates a rack from a row-major table.
    pub fn from_flat(n: usize, table: Vec<usize>) -> Result<Self, RackError> {
        assert_eq!(table.len(), n * n, "table must have n² entries");
        for x in 0..n {
            for y in 0..n {
                let value = table[x * n + y];
                if value >= n {
                    return Err(RackError::OutOfRange { x, y, value, n });
                }
            }
        }
        for y in 0..n {
            let mut seen = vec![false; n];
            for x in 0..n {
                let v = table[x * n + y];
                if seen[v] {
                    return Err(RackError::NotInvertible { y });
                }
                seen[v] = true;
            }
        }
        let op = |a: usize, b: usize| table[a * n + b];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if op(op(x, y), z) != op(op(x, z), op(y, z)) {
                        return Err(RackError::NotSelfDistributive { x, y, z });
                    }
                }
            }
        }
        Ok(RackTable { n, table })
    }

    /// Builds a rack from `x ▷ y = f(x, y)`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self, RackError> {
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                table.push(f(x, y));
            }
        }
        Self::from_flat(n, table)
    }

    pub(crate) fn from_flat_unchecked(n: usize, table: Vec<usize>) -> Self {
        debug_assert!(Self::from_flat(n, table.clone()).is_ok());
        RackTable { n, table }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    /// `x ▷ y`.
    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y]
    }

    /// `x ▷⁻¹ y`, the inverse of column `y` applied to `x`.
    pub fn op_inv(&self, x: usize, y: usize) -> usize {
        (0..self.n)
            .find(|&w| self.op(w, y) == x)
            .expect("columns are bijective")
    }

    pub fn row(&self, x: usize) -> &[usize] {
        &self.table[x * self.n..(x + 1) * self.n]
    }

    pub fn flat(&self) -> &[usize] {
        &self.table
    }

    /// The right translation `β_y`.
    pub fn column(&self, y: usize) -> Permutation {
        Permutation::from_images((0..self.n).map(|x| self.op(x, y)).collect())
            .expect("columns are bijective")
    }

    pub fn columns(&self) -> Vec<Permutation> {
        (0..self.n).map(|y| self.column(y)).collect()
    }

    /// The kink map `π: x ↦ x ▷ x`.
    pub fn kink(&self) -> Permutation {
        Permutation::from_images((0..self.n).map(|x| self.op(x, x)).collect())
            .expect("kink map of a rack is a bijection")
    }

    /// If every column is the same permutation `σ`, this is the permutation
    /// rack `X_σ` and `σ` is returned.
    pub fn as_permutation_rack(&self) -> Option<Permutation> {
        if self.n == 0 {
            return Some(Permutation::identity(0));
        }
        let sigma = self.column(0);
        (1..self.n)
            .all(|y| (0..self.n).all(|x| self.op(x, y) == sigma.apply(x)))
            .then_some(sigma)
    }

    /// Whether `phi` satisfies `φ(x ▷ y) = φ(x) ▷ φ(y)`.
    pub fn is_automorphism(&self, phi: &Permutation) -> bool {
        phi.degree() == self.n
            && (0..self.n).all(|x| {
                (0..self.n).all(|y| phi.apply(self.op(x, y)) == self.op(phi.apply(x), phi.apply(y)))
            })
    }

    /// The relabeled table `φ(R)`, with `φ(x) ▷' φ(y) = φ(x ▷ y)`.
    pub fn relabel(&self, phi: &Permutation) -> RackTable {
        let n = self.n;
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                table[phi.apply(x) * n + phi.apply(y)] = phi.apply(self.op(x, y));
            }
        }
        RackTable { n, table }
    }

    /// Renders the rack-table text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for x in 0..self.n {
            let row: Vec<String> = self.row(x).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the next rack block from numbered lines; `None` at end of input.
    pub(crate) fn parse_block<'a>(
        lines: &mut impl Iterator<Item = (usize, &'a str)>,
    ) -> Result<Option<RackTable>, RackError> {
        let mut content = lines.filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let Some((line, header)) = content.next() else {
            return Ok(None);
        };
        let n: usize = header.trim().parse().map_err(|_| RackError::Parse {
            line,
            msg: format!("expected the order, found {:?}", header.trim()),
        })?;
        let mut rows = Vec::with_capacity(n);
        for x in 0..n {
            let (line, text) = content.next().ok_or(RackError::Parse {
                line: line + x + 1,
                msg: format!("expected {n} rows, found {x}"),
            })?;
            let row = text
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| RackError::Parse {
                        line,
                        msg: format!("bad entry {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != n {
                return Err(RackError::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        validate_rack(rows).map(Some)
    }
}

impl FromStr for RackTable {
    type Err = RackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l));
        let rack = RackTable::parse_block(&mut lines)?.ok_or(RackError::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        if let Some((line, extra)) = lines.find(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        }) {
            return Err(RackError::Parse {
                line,
                msg: format!("unexpected trailing content {:?}", extra.trim()),
            });
        }
        Ok(rack)
    }
}

impl fmt::Debug for RackTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RackTable({}: {:?})", self.n, self.table)
    }
}

impl fmt::Display for RackTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Derived flags of a rack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RackFlags {
    pub is_quandle: bool,
    pub is_involutory: bool,
    pub kink: Permutation,
}

impl RackFlags {
    pub fn is_kei(&self) -> bool {
        self.is_quandle && self.is_involutory
    }
}

pub fn rack_flags(rack: &RackTable) -> RackFlags {
    let kink = rack.kink();
    let n = rack.order();
    let is_involutory = (0..n).all(|y| (0..n).all(|x| rack.op(rack.op(x, y), y) == x));
    RackFlags {
        is_quandle: kink.is_identity(),
        is_involutory,
        kink,
    }
}

// --- families -------------------------------------------------------------

/// A finite group given by its multiplication table on `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    /// Validates closure, associativity, identity and inverses.
    pub fn new(order: usize, mul: Vec<usize>) -> Result<Self, FamilyError> {
        if order == 0 {
            return Err(FamilyError::BadGroup("a group is nonempty".into()));
        }
        if mul.len() != order * order {
            return Err(FamilyError::BadGroup(
                "table must have order² entries".into(),
            ));
        }
        if mul.iter().any(|&v| v >= order) {
            return Err(FamilyError::BadGroup("entry out of range".into()));
        }
        let m = |a: usize, b: usize| mul[a * order + b];
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(FamilyError::BadGroup(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| m(e, a) == a && m(a, e) == a))
            .ok_or_else(|| FamilyError::BadGroup("no identity".into()))?;
        let inverse = (0..order)
            .map(|a| {
                (0..order)
                    .find(|&b| m(a, b) == identity && m(b, a) == identity)
                    .ok_or_else(|| FamilyError::BadGroup(format!("{a} has no inverse")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupTable {
            order,
            mul,
            identity,
            inverse,
        })
    }

    /// `Z/nZ` under addition.
    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        GroupTable::new(n, mul).expect("cyclic group table")
    }

    /// Direct product, with `(a, b)` encoded as `a * |other| + b`.
    pub fn product(&self, other: &GroupTable) -> Self {
        let (p, q) = (self.order, other.order);
        let n = p * q;
        let mut mul = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let a = self.mul(x / q, y / q);
                let b = other.mul(x % q, y % q);
                mul[x * n + y] = a * q + b;
            }
        }
        GroupTable::new(n, mul).expect("product of groups")
    }

    /// The multiplication table of a permutation group, elements indexed by
    /// their sorted position, product `a·b = a ∘ b`.
    pub fn from_perm_group(group: &PermGroup) -> Self {
        let els = group.elements();
        let n = els.len();
        let mut mul = vec![0; n * n];
        for (i, a) in els.iter().enumerate() {
            for (j, b) in els.iter().enumerate() {
                mul[i * n + j] = group.index_of(&(a * b)).expect("group is closed");
            }
        }
        GroupTable::new(n, mul).expect("permutation group table")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// The constructible families of racks.
#[derive(Debug, Clone)]
pub enum Family {
    /// `x ▷ y = x`.
    Trivial { n: usize },
    /// `x ▷ y = 2y − x mod n`.
    Dihedral { n: usize },
    /// `x ▷ y = t·x + (1 − t)·y mod n`, `gcd(t, n) = 1`.
    Alexander { n: usize, t: usize },
    /// `a ▷ b = b a b⁻¹`.
    Conjugation { group: GroupTable },
    /// `a ▷ b = b a⁻¹ b`.
    Core { group: GroupTable },
    /// `a ▷ b = 2b − a` on an abelian group.
    Takasaki { group: GroupTable },
    /// `x ▷ y = σ(x)`.
    Permutation { sigma: Permutation },
    /// `x ▷ y = t·x + s·y mod n`, `gcd(t, n) = 1`, `s² ≡ s(1 − t)`.
    TsRack { n: usize, t: usize, s: usize },
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn is_unit_mod(t: usize, n: usize) -> bool {
    n <= 1 || gcd(t % n, n) == 1
}

pub(crate) fn is_ts_pair(n: usize, t: usize, s: usize) -> bool {
    if n == 0 {
        return true;
    }
    let (t, s) = (t % n, s % n);
    (s * s) % n == (s * ((1 + n - t) % n)) % n
}

pub fn make_family(family: &Family) -> Result<RackTable, FamilyError> {
    let rack = match family {
        Family::Trivial { n } => RackTable::from_fn(*n, |x, _| x)?,
        Family::Dihedral { n } => {
            let n = *n;
            RackTable::from_fn(n, |x, y| (2 * y + n - x) % n)?
        }
        Family::Alexander { n, t } => {
            let n = *n;
            if !is_unit_mod(*t, n) {
                return Err(FamilyError::NotCoprime { t: *t, n });
            }
            if n == 0 {
                return Ok(RackTable::from_fn(0, |x, _| x)?);
            }
            let t = *t % n;
            let one_minus_t = (1 + n - t) % n;
            RackTable::from_fn(n, |x, y| (t * x + one_minus_t * y) % n)?
        }
        Family::Conjugation { group } => RackTable::from_fn(group.order(), |a, b| {
            group.mul(group.mul(b, a), group.inv(b))
        })?,
        Family::Core { group } => RackTable::from_fn(group.order(), |a, b| {
            group.mul(group.mul(b, group.inv(a)), b)
        })?,
        Family::Takasaki { group } => {
            if !group.is_abelian() {
                return Err(FamilyError::NotAbelian);
            }
            RackTable::from_fn(group.order(), |a, b| {
                group.mul(group.mul(b, b), group.inv(a))
            })?
        }
        Family::Permutation { sigma } => RackTable::from_fn(sigma.degree(), |x, _| sigma.apply(x))?,
        Family::TsRack { n, t, s } => {
            let n = *n;
            if !is_unit_mod(*t, n) {
                return Err(FamilyError::NotCoprime { t: *t, n });
            }
            if !is_ts_pair(n, *t, *s) {
                return Err(FamilyError::BadTsPair { n, t: *t, s: *s });
            }
            if n == 0 {
                return Ok(RackTable::from_fn(0, |x, _| x)?);
            }
            let (t, s) = (*t % n, *s % n);
            RackTable::from_fn(n, |x, y| (t * x + s * y) % n)?
        }
    };
    Ok(rack)
}

// --- automorphisms and isomorphisms ---------------------------------------

/// Per-element invariant preserved by every isomorphism: the cycle type of
/// `β_y`, the length of the `β_y`-cycle through `y`, the length of the
/// `π`-cycle through `y`, and the number of distinct entries in row `y`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct ElementKey {
    column_type: Vec<usize>,
    self_cycle: usize,
    kink_cycle: usize,
    row_distinct: usize,
}

pub(crate) fn element_keys(rack: &RackTable) -> Vec<ElementKey> {
    let n = rack.order();
    let kink_lens = rack.kink().cycle_lengths();
    (0..n)
        .map(|y| {
            let col = rack.column(y);
            let mut row: Vec<usize> = rack.row(y).to_vec();
            row.sort_unstable();
            row.dedup();
            ElementKey {
                column_type: col.cycle_type(),
                self_cycle: col.cycle_lengths()[y],
                kink_cycle: kink_lens[y],
                row_distinct: row.len(),
            }
        })
        .collect()
}

/// Backtracking search for maps `φ` with `φ(x ▷_R y) = φ(x) ▷_S φ(y)`.
/// Branches on the least unassigned point, trying images in increasing
/// order, so solutions are produced in lexicographic order.
struct IsoSearch<'a> {
    src: &'a RackTable,
    dst: &'a RackTable,
    src_keys: Vec<ElementKey>,
    dst_keys: Vec<ElementKey>,
}

impl<'a> IsoSearch<'a> {
    fn new(src: &'a RackTable, dst: &'a RackTable) -> Option<Self> {
        if src.order() != dst.order() {
            return None;
        }
        let src_keys = element_keys(src);
        let dst_keys = element_keys(dst);
        let mut a = src_keys.clone();
        let mut b = dst_keys.clone();
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
        Some(IsoSearch {
            src,
            dst,
            src_keys,
            dst_keys,
        })
    }

    fn assign(&self, map: &mut [usize], used: &mut [bool], x: usize, v: usize) -> bool {
        if map[x] != usize::MAX {
            return map[x] == v;
        }
        if used[v] || self.src_keys[x] != self.dst_keys[v] {
            return false;
        }
        map[x] = v;
        used[v] = true;
        true
    }

    /// Closes the partial map under `φ(a ▷ b) = φ(a) ▷ φ(b)`.
    fn propagate(&self, map: &mut [usize], used: &mut [bool]) -> bool {
        let n = self.src.order();
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                if map[a] == usize::MAX {
                    continue;
                }
                for b in 0..n {
                    if map[b] == usize::MAX {
                        continue;
                    }
                    let c = self.src.op(a, b);
                    let v = self.dst.op(map[a], map[b]);
                    if map[c] == usize::MAX {
                        if !self.assign(map, used, c, v) {
                            return false;
                        }
                        changed = true;
                    } else if map[c] != v {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&self, map: &[usize], used: &[bool], out: &mut Vec<Permutation>, first_only: bool) {
        if first_only && !out.is_empty() {
            return;
        }
        let Some(x) = map.iter().position(|&v| v == usize::MAX) else {
            out.push(Permutation::from_images(map.to_vec()).expect("bijective by construction"));
            return;
        };
        for v in 0..self.src.order() {
            let mut m = map.to_vec();
            let mut u = used.to_vec();
            if self.assign(&mut m, &mut u, x, v) && self.propagate(&mut m, &mut u) {
                self.run(&m, &u, out, first_only);
                if first_only && !out.is_empty() {
                    return;
                }
            }
        }
    }

    fn solve(&self, first_only: bool) -> Vec<Permutation> {
        let n = self.src.order();
        let mut out = Vec::new();
        self.run(&vec![usize::MAX; n], &vec![false; n], &mut out, first_only);
        out
    }
}

/// All automorphisms of the rack.
pub fn automorphism_group(rack: &RackTable) -> PermGroup {
    let search = IsoSearch::new(rack, rack).expect("a rack matches itself");
    PermGroup::from_elements_unchecked(rack.order(), search.solve(false))
}

/// `Inn(X) = ⟨β_y⟩`.
pub fn inner_group(rack: &RackTable) -> PermGroup {
    subgroup_closure(rack.order(), &rack.columns()).expect("columns share the degree")
}

/// The lexicographically first isomorphism `R → S`, if any.
pub fn find_isomorphism(r: &RackTable, s: &RackTable) -> Option<Permutation> {
    IsoSearch::new(r, s)?.solve(true).into_iter().next()
}
