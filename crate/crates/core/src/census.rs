//! Racks of a given order up to isomorphism, and the per-family counts of
//! 4-Legendrian structure classes.
//!
//! The search fills the table one column permutation at a time. Writing
//! `β_y` for column `y`, self-distributivity is equivalent to
//! `β_{β_z(y)} = β_z β_y β_z⁻¹` for all `y, z`, so every pair of assigned
//! columns either checks or forces another column. Symmetry is broken by a
//! relabeling-invariant key on columns: column 0 carries the least key and
//! is fixed to a canonical permutation of that key. Surviving labelled
//! solutions are bucketed by invariants and deduplicated with explicit
//! isomorphism tests.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::exec::Exec;
use crate::fourleg::classify_structures;
use crate::perm::{all_permutations, Permutation};
use crate::rack::{element_keys, find_isomorphism, rack_flags, RackError, RackTable};

/// Largest order the column search supports (its conjugation table has
/// `(n!)²` entries).
pub const MAX_SEARCH_ORDER: usize = 7;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("order {0} exceeds the supported search bound {MAX_SEARCH_ORDER}")]
    OrderTooLarge(usize),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("rack {index}: {source}")]
    Rack { index: usize, source: RackError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RackFamily {
    Racks,
    Involutory,
    Quandles,
    Kei,
}

impl RackFamily {
    pub const ALL: [RackFamily; 4] = [
        RackFamily::Racks,
        RackFamily::Involutory,
        RackFamily::Quandles,
        RackFamily::Kei,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RackFamily::Racks => "racks",
            RackFamily::Involutory => "involutory",
            RackFamily::Quandles => "quandles",
            RackFamily::Kei => "kei",
        }
    }

    pub fn contains(self, rack: &RackTable) -> bool {
        let f = rack_flags(rack);
        match self {
            RackFamily::Racks => true,
            RackFamily::Involutory => f.is_involutory,
            RackFamily::Quandles => f.is_quandle,
            RackFamily::Kei => f.is_kei(),
        }
    }
}

impl std::str::FromStr for RackFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RackFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub order: usize,
    pub family: RackFamily,
    /// Isomorphism classes of racks in the family.
    pub rack_count: usize,
    /// Isomorphism classes of 4-Legendrian racks over those racks.
    pub structure_count: usize,
}

/// Known structure-class counts for orders 0 to 6, indexed by order, in
/// the family order of [`RackFamily::ALL`].
pub const KNOWN_STRUCTURE_COUNTS: [[usize; 4]; 7] = [
    [1, 1, 1, 1],
    [1, 1, 1, 1],
    [8, 8, 4, 4],
    [33, 24, 16, 16],
    [249, 196, 84, 74],
    [1592, 850, 448, 342],
    [15944, 9248, 3137, 2228],
];

/// Rows whose structure count disagrees with [`KNOWN_STRUCTURE_COUNTS`].
pub fn census_mismatches(rows: &[CensusRow]) -> Vec<(CensusRow, usize)> {
    rows.iter()
        .filter_map(|r| {
            let fam = RackFamily::ALL.iter().position(|&f| f == r.family)?;
            let want = KNOWN_STRUCTURE_COUNTS.get(r.order)?[fam];
            (want != r.structure_count).then(|| (r.clone(), want))
        })
        .collect()
}

// --- column search ----------------------------------------------------------

const UNSET: u16 = u16::MAX;

/// Precomputed data for `S_n`.
struct SymTables {
    n: usize,
    perms: Vec<Permutation>,
    /// `conj[g * m + p]` is the index of `g p g⁻¹`.
    conj: Vec<u16>,
    /// `key[p * n + y]`: relabeling-invariant key of a column `p` at index `y`.
    key: Vec<u32>,
}

impl SymTables {
    fn new(n: usize) -> Self {
        let perms = all_permutations(n);
        let m = perms.len();
        let index: HashMap<&Permutation, u16> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i as u16))
            .collect();
        let mut conj = vec![0u16; m * m];
        for (g, pg) in perms.iter().enumerate() {
            for (p, pp) in perms.iter().enumerate() {
                conj[g * m + p] = index[&pp.conjugate_by(pg)];
            }
        }
        // Order cycle types by fixed-point count first, so that columns with
        // many fixed points (identity above all) are never the least key
        // unless every column is of that kind.
        let mut types: Vec<Vec<usize>> = perms.iter().map(|p| p.cycle_type()).collect();
        types.sort_by_key(|t| (t.iter().filter(|&&l| l == 1).count(), t.clone()));
        types.dedup();
        let type_rank: HashMap<Vec<usize>, u32> = types
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t, i as u32))
            .collect();
        let mut key = vec![0u32; m * n];
        for (p, pp) in perms.iter().enumerate() {
            let rank = type_rank[&pp.cycle_type()];
            let lens = pp.cycle_lengths();
            for y in 0..n {
                key[p * n + y] = rank * 64 + lens[y] as u32;
            }
        }
        SymTables {
            n,
            perms,
            conj,
            key,
        }
    }

    #[inline]
    fn m(&self) -> usize {
        self.perms.len()
    }

    #[inline]
    fn conj(&self, g: u16, p: u16) -> u16 {
        self.conj[g as usize * self.m() + p as usize]
    }

    #[inline]
    fn apply(&self, p: u16, x: usize) -> usize {
        self.perms[p as usize].apply(x)
    }

    #[inline]
    fn key(&self, p: u16, y: usize) -> u32 {
        self.key[p as usize * self.n + y]
    }

    /// The distinct least-column keys and a canonical column for each: the
    /// cycle through 0 has the required length, remaining cycles follow on
    /// consecutive points.
    fn seeds(&self) -> Vec<(u32, u16)> {
        let mut seeds: BTreeMap<u32, u16> = BTreeMap::new();
        for p in 0..self.m() as u16 {
            if self.n > 0 {
                seeds.entry(self.key(p, 0)).or_insert(p);
            }
        }
        // Replace the first-found permutation by the canonical layout.
        seeds
            .into_iter()
            .map(|(k, p)| {
                let pp = &self.perms[p as usize];
                let len0 = pp.cycle_lengths()[0];
                let mut parts = pp.cycle_type();
                let pos = parts.iter().position(|&l| l == len0).unwrap();
                parts.remove(pos);
                let mut cycles = Vec::new();
                let mut next = 0;
                for len in std::iter::once(len0).chain(parts) {
                    cycles.push((next..next + len).collect::<Vec<_>>());
                    next += len;
                }
                let canon = Permutation::from_cycles(self.n, &cycles).unwrap();
                let idx = self.perms.binary_search(&canon).unwrap() as u16;
                debug_assert_eq!(self.key(idx, 0), k);
                (k, idx)
            })
            .collect()
    }
}

#[derive(Clone)]
struct State {
    cols: [u16; MAX_SEARCH_ORDER],
    assigned: usize,
}

struct Search<'a> {
    sym: &'a SymTables,
    min_key: u32,
}

impl Search<'_> {
    fn set(&self, st: &mut State, y: usize, p: u16, queue: &mut Vec<usize>) -> bool {
        let cur = st.cols[y];
        if cur != UNSET {
            return cur == p;
        }
        if self.sym.key(p, y) < self.min_key {
            return false;
        }
        st.cols[y] = p;
        st.assigned += 1;
        queue.push(y);
        true
    }

    /// Closes the partial assignment under `β_{β_z(y)} = β_z β_y β_z⁻¹`.
    fn propagate(&self, st: &mut State, queue: &mut Vec<usize>) -> bool {
        let n = self.sym.n;
        while let Some(y) = queue.pop() {
            let p = st.cols[y];
            for z in 0..n {
                let q = st.cols[z];
                if q == UNSET {
                    continue;
                }
                // pair (z acting on y)
                let target = self.sym.apply(q, y);
                if !self.set(st, target, self.sym.conj(q, p), queue) {
                    return false;
                }
                // pair (y acting on z)
                let target = self.sym.apply(p, z);
                if !self.set(st, target, self.sym.conj(p, q), queue) {
                    return false;
                }
            }
        }
        true
    }

    /// Branches for the least unassigned column.
    fn branches(&self, st: &State) -> Vec<State> {
        let n = self.sym.n;
        let Some(y) = (0..n).find(|&y| st.cols[y] == UNSET) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut queue = Vec::with_capacity(n);
        for p in 0..self.sym.m() as u16 {
            if self.sym.key(p, y) < self.min_key {
                continue;
            }
            let mut next = st.clone();
            queue.clear();
            if self.set(&mut next, y, p, &mut queue) && self.propagate(&mut next, &mut queue) {
                out.push(next);
            }
        }
        out
    }

    fn dfs(&self, st: State, out: &mut Vec<Vec<usize>>) {
        if st.assigned == self.sym.n {
            out.push(self.table(&st));
            return;
        }
        for next in self.branches(&st) {
            self.dfs(next, out);
        }
    }

    fn table(&self, st: &State) -> Vec<usize> {
        let n = self.sym.n;
        let mut t = vec![0; n * n];
        for y in 0..n {
            let col = &self.sym.perms[st.cols[y] as usize];
            for x in 0..n {
                t[x * n + y] = col.apply(x);
            }
        }
        t
    }
}

/// Every labelled rack of order `n` that satisfies the symmetry-breaking
/// normalization; each isomorphism class appears at least once.
fn normalized_racks(n: usize, exec: Exec) -> Vec<Vec<usize>> {
    let sym = SymTables::new(n);
    // shard = (seed, first free branch)
    let mut shards: Vec<(u32, State)> = Vec::new();
    for (min_key, seed) in sym.seeds() {
        let search = Search { sym: &sym, min_key };
        let mut st = State {
            cols: [UNSET; MAX_SEARCH_ORDER],
            assigned: 0,
        };
        let mut queue = Vec::new();
        if !(search.set(&mut st, 0, seed, &mut queue) && search.propagate(&mut st, &mut queue)) {
            continue;
        }
        if st.assigned == n {
            shards.push((min_key, st));
        } else {
            shards.extend(search.branches(&st).into_iter().map(|s| (min_key, s)));
        }
    }
    let found = exec.map(&shards, |(min_key, st)| {
        let search = Search {
            sym: &sym,
            min_key: *min_key,
        };
        let mut out = Vec::new();
        search.dfs(st.clone(), &mut out);
        out
    });
    found.into_iter().flatten().collect()
}

/// Invariant used to bucket candidate racks before pairwise isomorphism tests.
fn bucket_key(rack: &RackTable) -> (Vec<crate::rack::ElementKey>, Vec<usize>) {
    let mut keys = element_keys(rack);
    keys.sort();
    (keys, rack.kink().cycle_type())
}

/// Keeps the first member of every isomorphism class, preserving input order.
pub fn dedup_isomorphic(racks: &[RackTable], exec: Exec) -> Vec<RackTable> {
    let mut buckets: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for (i, r) in racks.iter().enumerate() {
        buckets.entry(bucket_key(r)).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = buckets.into_values().collect();
    let kept = exec.map(&groups, |members| {
        let mut reps: Vec<usize> = Vec::new();
        for &i in members {
            if !reps
                .iter()
                .any(|&j| find_isomorphism(&racks[j], &racks[i]).is_some())
            {
                reps.push(i);
            }
        }
        reps
    });
    let mut kept: Vec<usize> = kept.into_iter().flatten().collect();
    kept.sort_unstable();
    kept.into_iter().map(|i| racks[i].clone()).collect()
}

/// One representative per isomorphism class of racks of order `n`, sorted by
/// table. The result does not depend on `exec`.
pub fn enumerate_racks_with(n: usize, exec: Exec) -> Result<Vec<RackTable>, CensusError> {
    if n > MAX_SEARCH_ORDER {
        return Err(CensusError::OrderTooLarge(n));
    }
    if n == 0 {
        return Ok(vec![RackTable::from_flat_unchecked(0, Vec::new())]);
    }
    let mut tables = normalized_racks(n, exec);
    tables.sort_unstable();
    tables.dedup();
    let racks: Vec<RackTable> = tables
        .into_iter()
        .map(|t| RackTable::from_flat_unchecked(n, t))
        .collect();
    Ok(dedup_isomorphic(&racks, exec))
}

pub fn enumerate_racks(n: usize) -> Result<Vec<RackTable>, CensusError> {
    enumerate_racks_with(n, Exec::default())
}

/// Per-family counts over a given set of class representatives of one order.
pub fn census_counts_from(n: usize, racks: &[RackTable], exec: Exec) -> Vec<CensusRow> {
    let per_rack = exec.map(racks, |r| {
        let f = rack_flags(r);
        (
            f.is_involutory,
            f.is_quandle,
            classify_structures(r).count(),
        )
    });
    RackFamily::ALL
        .iter()
        .map(|&family| {
            let members = per_rack.iter().filter(|(inv, qdl, _)| match family {
                RackFamily::Racks => true,
                RackFamily::Involutory => *inv,
                RackFamily::Quandles => *qdl,
                RackFamily::Kei => *inv && *qdl,
            });
            let (rack_count, structure_count) =
                members.fold((0, 0), |(a, b), (_, _, c)| (a + 1, b + c));
            CensusRow {
                order: n,
                family,
                rack_count,
                structure_count,
            }
        })
        .collect()
}

pub fn census_counts_with(n: usize, exec: Exec) -> Result<Vec<CensusRow>, CensusError> {
    let racks = enumerate_racks_with(n, exec)?;
    Ok(census_counts_from(n, &racks, exec))
}

pub fn census_counts(n: usize) -> Result<Vec<CensusRow>, CensusError> {
    census_counts_with(n, Exec::default())
}

/// CSV with header `order,family,rack_classes,structure_classes`.
pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("order,family,rack_classes,structure_classes\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.order,
            r.family.name(),
            r.rack_count,
            r.structure_count
        ));
    }
    out
}

// --- rack sets on disk -------------------------------------------------------

/// Concatenated rack-table blocks, each preceded by a `# rack <i>` comment.
pub fn rack_set_text(racks: &[RackTable]) -> String {
    let mut out = String::new();
    for (i, r) in racks.iter().enumerate() {
        out.push_str(&format!("# rack {i}\n"));
        out.push_str(&r.to_text());
    }
    out
}

pub fn parse_rack_set(text: &str) -> Result<Vec<RackTable>, CensusError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut out = Vec::new();
    loop {
        match RackTable::parse_block(&mut lines) {
            Ok(Some(r)) => out.push(r),
            Ok(None) => return Ok(out),
            Err(source) => {
                return Err(CensusError::Rack {
                    index: out.len(),
                    source,
                })
            }
        }
    }
}

pub fn export_rack_set(racks: &[RackTable], path: &Path) -> Result<(), CensusError> {
    fs::write(path, rack_set_text(racks)).map_err(|source| CensusError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn import_rack_set(path: &Path) -> Result<Vec<RackTable>, CensusError> {
    let text = fs::read_to_string(path).map_err(|source| CensusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_rack_set(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::PermGroup;
    use crate::rack::{make_family, Family};

    fn counts(n: usize) -> Vec<usize> {
        census_counts(n)
            .unwrap()
            .iter()
            .map(|r| r.structure_count)
            .collect()
    }

    #[test]
    fn tiny_orders() {
        assert_eq!(enumerate_racks(0).unwrap().len(), 1);
        assert_eq!(enumerate_racks(1).unwrap().len(), 1);
        let two = enumerate_racks(2).unwrap();
        assert_eq!(two.len(), 2);
        let t2 = make_family(&Family::Trivial { n: 2 }).unwrap();
        let swap = make_family(&Family::Permutation {
            sigma: Permutation::from_cycles(2, &[vec![0, 1]]).unwrap(),
        })
        .unwrap();
        assert!(two.contains(&t2));
        assert!(two.contains(&swap));
        assert_eq!(counts(2), vec![8, 8, 4, 4]);
    }

    #[test]
    fn order_two_search_matches_exhaustive_tables() {
        // of the four 2×2 tables with bijective columns only the
        // two constant-column ones are self-distributive
        let mut valid = Vec::new();
        for c0 in all_permutations(2) {
            for c1 in all_permutations(2) {
                let t = vec![c0.apply(0), c1.apply(0), c0.apply(1), c1.apply(1)];
                if let Ok(r) = RackTable::from_flat(2, t) {
                    valid.push(r);
                }
            }
        }
        assert_eq!(valid.len(), 2);
        assert_eq!(dedup_isomorphic(&valid, Exec::Sequential).len(), 2);
    }

    #[test]
    fn order_three_counts() {
        assert_eq!(enumerate_racks(3).unwrap().len(), 6);
        assert_eq!(counts(3), vec![33, 24, 16, 16]);
    }

    #[test]
    fn class_totals_small_orders() {
        let expected = [1, 1, 2, 6, 19];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(enumerate_racks(n).unwrap().len(), e, "order {n}");
        }
    }

    #[test]
    fn search_result_independent_of_exec() {
        assert_eq!(
            enumerate_racks_with(4, Exec::Sequential).unwrap(),
            enumerate_racks_with(4, Exec::Parallel).unwrap()
        );
    }

    #[test]
    fn all_order_three_labelled_racks_are_covered() {
        // brute force over all 6³ column choices
        let reps = enumerate_racks(3).unwrap();
        let perms = all_permutations(3);
        for a in &perms {
            for b in &perms {
                for c in &perms {
                    let cols = [a, b, c];
                    let t = (0..9).map(|i| cols[i % 3].apply(i / 3)).collect();
                    if let Ok(r) = RackTable::from_flat(3, t) {
                        let hits = reps
                            .iter()
                            .filter(|s| find_isomorphism(&r, s).is_some())
                            .count();
                        assert_eq!(hits, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn rack_set_round_trip() {
        let racks = enumerate_racks(3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("order3.racks");
        export_rack_set(&racks, &path).unwrap();
        assert_eq!(import_rack_set(&path).unwrap(), racks);
    }

    #[test]
    fn rack_set_rejects_bad_column() {
        let text = "# rack 0\n1\n0\n# rack 1\n2\n0 0\n0 1\n";
        match parse_rack_set(text) {
            Err(CensusError::Rack {
                index: 1,
                source: RackError::NotInvertible { y: 0 },
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn imported_duplicates_collapse() {
        let mut racks = enumerate_racks(3).unwrap();
        let phi = Permutation::from_cycles(3, &[vec![0, 2, 1]]).unwrap();
        let extra: Vec<RackTable> = racks.iter().map(|r| r.relabel(&phi)).collect();
        racks.extend(extra);
        let text = rack_set_text(&racks);
        let back = parse_rack_set(&text).unwrap();
        assert_eq!(dedup_isomorphic(&back, Exec::Sequential).len(), 6);
        let rows = census_counts_from(
            3,
            &dedup_isomorphic(&back, Exec::Sequential),
            Exec::Sequential,
        );
        assert_eq!(rows, census_counts(3).unwrap());
    }

    #[test]
    fn trivial_quandle_in_census() {
        let reps = enumerate_racks(4).unwrap();
        let t4 = make_family(&Family::Trivial { n: 4 }).unwrap();
        assert!(reps.contains(&t4));
        assert_eq!(
            classify_structures(&t4).count() as u64,
            crate::perm::burnside_pair_count(&PermGroup::symmetric(4))
        );
    }

    #[test]
    fn order_bound() {
        assert!(matches!(
            enumerate_racks(MAX_SEARCH_ORDER + 1),
            Err(CensusError::OrderTooLarge(_))
        ));
    }
}
