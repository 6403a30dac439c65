//! Colorings of fronts by finite 4-Legendrian racks.
//!
//! For a permutation rack `X_σ` every crossing acts as `σ^{±1}` and the cusp
//! maps commute with `σ`. Up/down letters of opposite sides that meet in the
//! cusp word multiply to `σ⁻¹`, so the loop map around the knot collapses to
//! a short pair word times a power of `σ`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exec::Exec;
use crate::fourleg::{FourLegRack, FourLegStructure};
use crate::front::{
    classical_invariants, fundamental_presentation, ClassicalInvariants, CuspOp, CuspWord,
    FrontCode, FrontEvent, Presentation, Role, Sign, Vertical,
};
use crate::perm::{centralizer, PermGroup, Permutation};
use crate::rack::{make_family, Family, RackTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("cusp word {0} does not alternate sides")]
    NotAlternating(String),
    #[error("cusp word has {up} up and {down} down letters, expected {want_up} and {want_down}")]
    LetterCount {
        up: i64,
        down: i64,
        want_up: i64,
        want_down: i64,
    },
    #[error("rack is not a permutation rack")]
    NotPermutationRack,
}

fn op_map(s: &FourLegStructure, op: CuspOp) -> &Permutation {
    match op {
        CuspOp::Ul => &s.ul,
        CuspOp::Ur => &s.ur,
        CuspOp::Dl => &s.dl,
        CuspOp::Dr => &s.dr,
    }
}

/// The map a cusp word denotes, earliest letter applied first.
pub fn word_map(s: &FourLegStructure, w: &CuspWord) -> Permutation {
    let mut m = Permutation::identity(s.ul.degree());
    for &op in &w.letters {
        m = op_map(s, op) * &m;
    }
    m
}

// --- generic counting --------------------------------------------------------

struct Prepared<'a> {
    rack: &'a RackTable,
    /// per relation: (incoming, outgoing, over, sign, W, W⁻¹)
    rels: Vec<(usize, usize, usize, Sign, Permutation, Permutation)>,
}

impl Prepared<'_> {
    fn forward(&self, sign: Sign, w: &Permutation, input: usize, over: usize) -> usize {
        let v = w.apply(input);
        match sign {
            Sign::Pos => self.rack.op(v, over),
            Sign::Neg => self.rack.op_inv(v, over),
        }
    }

    fn backward(&self, sign: Sign, winv: &Permutation, output: usize, over: usize) -> usize {
        let v = match sign {
            Sign::Pos => self.rack.op_inv(output, over),
            Sign::Neg => self.rack.op(output, over),
        };
        winv.apply(v)
    }

    /// Fills forced generators; `false` on a violated relation.
    fn propagate(&self, vals: &mut [Option<usize>]) -> bool {
        loop {
            let mut changed = false;
            for (inc, out, over, sign, w, winv) in &self.rels {
                let Some(o) = vals[*over] else { continue };
                match (vals[*inc], vals[*out]) {
                    (Some(a), Some(b)) => {
                        if self.forward(*sign, w, a, o) != b {
                            return false;
                        }
                    }
                    (Some(a), None) => {
                        vals[*out] = Some(self.forward(*sign, w, a, o));
                        changed = true;
                    }
                    (None, Some(b)) => {
                        vals[*inc] = Some(self.backward(*sign, winv, b, o));
                        changed = true;
                    }
                    (None, None) => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn count(&self, vals: &mut [Option<usize>]) -> u64 {
        if !self.propagate(vals) {
            return 0;
        }
        let Some(free) = vals.iter().position(Option::is_none) else {
            return 1;
        };
        let mut total = 0;
        for c in 0..self.rack.order() {
            let mut next = vals.to_vec();
            next[free] = Some(c);
            total += self.count(&mut next);
        }
        total
    }
}

fn prepare<'a>(p: &Presentation, x: &'a FourLegRack) -> Prepared<'a> {
    let rels = p
        .relations
        .iter()
        .map(|r| {
            let w = word_map(x.structure(), &r.word);
            let winv = w.inverse();
            (r.incoming, r.outgoing, r.over, r.sign, w, winv)
        })
        .collect();
    Prepared {
        rack: x.rack(),
        rels,
    }
}

/// Number of homomorphisms from the presented 4-Legendrian rack to `x`.
pub fn count_colorings(p: &Presentation, x: &FourLegRack) -> u64 {
    if let Some(w) = &p.closing_word {
        return word_map(x.structure(), w).fixed_point_count() as u64;
    }
    let prepared = prepare(p, x);
    prepared.count(&mut vec![None; p.generators])
}

/// Scans all `|X|^g` assignments. Independent of the propagation logic.
pub fn count_colorings_brute_force(p: &Presentation, x: &FourLegRack) -> u64 {
    let n = x.rack().order();
    let g = p.generators;
    let s = x.structure();
    let mut vals = vec![0usize; g];
    let mut total = 0;
    if n == 0 {
        return 0;
    }
    loop {
        let ok = match &p.closing_word {
            Some(w) => word_map(s, w).apply(vals[0]) == vals[0],
            None => p.relations.iter().all(|r| {
                let mut v = vals[r.incoming];
                for &op in &r.word.letters {
                    v = op_map(s, op).apply(v);
                }
                let rhs = match r.sign {
                    Sign::Pos => x.rack().op(v, vals[r.over]),
                    Sign::Neg => x.rack().op_inv(v, vals[r.over]),
                };
                rhs == vals[r.outgoing]
            }),
        };
        total += ok as u64;
        // odometer
        let mut i = 0;
        loop {
            if i == g {
                return total;
            }
            vals[i] += 1;
            if vals[i] < n {
                break;
            }
            vals[i] = 0;
            i += 1;
        }
    }
}

// --- word reduction -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedLoop {
    /// `rot`: positive counts surviving down pairs, negative up pairs.
    pub pair_count: i64,
    pub leading_letter: Option<CuspOp>,
    /// `rot + tb`.
    pub sigma_exponent: i64,
    /// Letters left after cancellation, in traversal order.
    pub survivors: CuspWord,
}

impl ReducedLoop {
    /// Power of `σ` that accompanies `survivors`: `writhe - min(U, D)`.
    pub fn survivor_exponent(&self) -> i64 {
        if self.pair_count < 0 {
            self.sigma_exponent - 2 * self.pair_count
        } else {
            self.sigma_exponent
        }
    }
}

/// Cancels adjacent up/down letters (each pair costs one `σ⁻¹`) until only
/// letters of one vertical direction remain.
pub fn reduce_cusp_word(
    w: &CuspWord,
    writhe: i64,
    up: i64,
    down: i64,
) -> Result<ReducedLoop, ColoringError> {
    if !w.alternates() {
        return Err(ColoringError::NotAlternating(w.to_string()));
    }
    let got_up = w
        .letters
        .iter()
        .filter(|c| c.vertical() == Vertical::Up)
        .count() as i64;
    let got_down = w.len() as i64 - got_up;
    if (got_up, got_down) != (up, down) || (up + down) % 2 != 0 {
        return Err(ColoringError::LetterCount {
            up: got_up,
            down: got_down,
            want_up: up,
            want_down: down,
        });
    }
    let mut stack: Vec<CuspOp> = Vec::with_capacity(w.len());
    for &c in &w.letters {
        match stack.last() {
            Some(top) if top.vertical() != c.vertical() => {
                stack.pop();
            }
            _ => stack.push(c),
        }
    }
    Ok(ReducedLoop {
        pair_count: (down - up) / 2,
        leading_letter: stack.first().copied(),
        sigma_exponent: writhe - up,
        survivors: CuspWord::new(stack),
    })
}

/// All cusp letters in event order from the basepoint.
pub fn traversal_word(code: &FrontCode) -> CuspWord {
    CuspWord::new(
        code.events()
            .iter()
            .filter_map(|e| match *e {
                FrontEvent::Cusp { side, vertical } => Some(crate::front::cusp_op(side, vertical)),
                _ => None,
            })
            .collect(),
    )
}

/// The loop map of a permutation rack, read event by event from the
/// basepoint: cusps apply their maps, under-passes apply `σ^sign`.
pub fn unreduced_loop_map(
    code: &FrontCode,
    s: &FourLegStructure,
    sigma: &Permutation,
) -> Permutation {
    let sigma_inv = sigma.inverse();
    let mut m = Permutation::identity(sigma.degree());
    for e in code.events() {
        match *e {
            FrontEvent::Cusp { side, vertical } => {
                m = op_map(s, crate::front::cusp_op(side, vertical)) * &m;
            }
            FrontEvent::Crossing {
                sign,
                role: Role::Under,
                ..
            } => {
                m = match sign {
                    Sign::Pos => sigma * &m,
                    Sign::Neg => &sigma_inv * &m,
                };
            }
            _ => {}
        }
    }
    m
}

pub fn reduced_loop_map(r: &ReducedLoop, s: &FourLegStructure, sigma: &Permutation) -> Permutation {
    &word_map(s, &r.survivors) * &sigma.pow(r.survivor_exponent())
}

/// Fixed points of `(d_l d_r)^rot σ^(rot+tb)`, the colorings of any front
/// with these classical invariants by a permutation rack.
pub fn perm_fast_count(x: &FourLegRack, inv: &ClassicalInvariants) -> Result<u64, ColoringError> {
    let sigma = x
        .rack()
        .as_permutation_rack()
        .ok_or(ColoringError::NotPermutationRack)?;
    let s = x.structure();
    let pair = &s.dl * &s.dr;
    let m = &pair.pow(inv.rot) * &sigma.pow(inv.rot + inv.tb);
    Ok(m.fixed_point_count() as u64)
}

// --- verification -------------------------------------------------------------

/// `X_σ` for one `σ` per cycle type.
#[derive(Debug, Clone)]
pub struct PermRackCase {
    pub id: String,
    pub sigma: Permutation,
    pub rack: RackTable,
}

fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(n)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Permutation racks of orders `1..=max_order`, one per conjugacy class of `σ`.
pub fn permutation_rack_cases(max_order: usize) -> Vec<PermRackCase> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        for parts in partitions(n, n) {
            let mut cycles = Vec::new();
            let mut next = 0;
            for len in parts {
                cycles.push((next..next + len).collect::<Vec<_>>());
                next += len;
            }
            let sigma = Permutation::from_cycles(n, &cycles).expect("disjoint cycles");
            let rack = make_family(&Family::Permutation {
                sigma: sigma.clone(),
            })
            .expect("permutation racks are racks");
            out.push(PermRackCase {
                id: format!("X{n}:{sigma}"),
                sigma,
                rack,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyRow {
    pub code: String,
    pub tb: i64,
    pub rot: i64,
    pub rack_id: String,
    pub ul: Permutation,
    pub ur: Permutation,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastMismatch {
    pub code: String,
    pub rack_id: String,
    pub ul: Permutation,
    pub ur: Permutation,
    pub generic: u64,
    pub fast: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub tb: i64,
    pub rot: i64,
    pub knot: Option<String>,
    pub rack_id: String,
    pub ul: Permutation,
    pub ur: Permutation,
    pub counts: Vec<(String, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSummary {
    pub tb: i64,
    pub rot: i64,
    /// `None` for groups that mix knot types.
    pub knot: Option<String>,
    pub codes: Vec<String>,
    pub structures: usize,
    pub violations: usize,
}

impl GroupSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
    /// Codes of one knot type with equal `(tb, rot)`.
    pub same_knot_groups: Vec<GroupSummary>,
    /// All codes with equal `(tb, rot)`, whatever their knot type.
    pub invariant_groups: Vec<GroupSummary>,
    pub violations: Vec<Violation>,
    pub fast_mismatches: Vec<FastMismatch>,
    pub structures: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.fast_mismatches.is_empty()
    }

    /// `code_name,tb,rot,rack_id,ul,ur,count`.
    pub fn csv(&self) -> String {
        let mut out = String::from("code_name,tb,rot,rack_id,ul,ur,count\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.code, r.tb, r.rot, r.rack_id, r.ul, r.ur, r.count
            ));
        }
        out
    }

    /// One line per group, then totals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let line = |kind: &str, g: &GroupSummary| {
            format!(
                "{kind} tb={} rot={} knot={} codes={} structures={} violations={} {}\n",
                g.tb,
                g.rot,
                g.knot.as_deref().unwrap_or("*"),
                g.codes.join("|"),
                g.structures,
                g.violations,
                if g.passed() { "pass" } else { "FAIL" }
            )
        };
        for g in &self.same_knot_groups {
            out.push_str(&line("same-knot", g));
        }
        for g in &self.invariant_groups {
            out.push_str(&line("cross-knot", g));
        }
        out.push_str(&format!(
            "structures={} fast_path_mismatches={} result={}\n",
            self.structures,
            self.fast_mismatches.len(),
            if self.passed() { "pass" } else { "FAIL" }
        ));
        out
    }
}

/// A front to verify: name, optional knot type and code.
pub type VerifyInput<'a> = (&'a str, Option<&'a str>, &'a FrontCode);

struct StructureResult {
    rows: Vec<VerifyRow>,
    fast: Vec<FastMismatch>,
}

/// Colors every input by every 4-Legendrian structure on every permutation
/// rack of order at most `max_order`, and checks that codes with equal
/// classical invariants always get equal counts. With `check_fast`, each
/// generic count is also compared with [`perm_fast_count`].
pub fn verify_indistinguishability(
    codes: &[VerifyInput<'_>],
    max_order: usize,
    check_fast: bool,
    exec: Exec,
) -> VerifyReport {
    let prepared: Vec<(String, Option<String>, ClassicalInvariants, Presentation)> = codes
        .iter()
        .map(|(name, knot, code)| {
            (
                name.to_string(),
                knot.map(str::to_string),
                classical_invariants(code),
                fundamental_presentation(code),
            )
        })
        .collect();

    let cases = permutation_rack_cases(max_order);
    let mut work: Vec<(usize, Permutation, Permutation)> = Vec::new();
    for (ci, case) in cases.iter().enumerate() {
        let n = case.sigma.degree();
        let u = centralizer(&PermGroup::symmetric(n), std::slice::from_ref(&case.sigma))
            .expect("same degree");
        for ul in u.elements() {
            for ur in u.elements() {
                work.push((ci, ul.clone(), ur.clone()));
            }
        }
    }

    let results = exec.map(&work, |(ci, ul, ur)| {
        let case = &cases[*ci];
        let x = FourLegRack::new(case.rack.clone(), ul.clone(), ur.clone())
            .expect("centralizer elements are GL-structures");
        let mut rows = Vec::with_capacity(prepared.len());
        let mut fast = Vec::new();
        for (name, _, inv, pres) in &prepared {
            let count = count_colorings(pres, &x);
            if check_fast {
                let f = perm_fast_count(&x, inv).expect("permutation rack");
                if f != count {
                    fast.push(FastMismatch {
                        code: name.clone(),
                        rack_id: case.id.clone(),
                        ul: ul.clone(),
                        ur: ur.clone(),
                        generic: count,
                        fast: f,
                    });
                }
            }
            rows.push(VerifyRow {
                code: name.clone(),
                tb: inv.tb,
                rot: inv.rot,
                rack_id: case.id.clone(),
                ul: ul.clone(),
                ur: ur.clone(),
                count,
            });
        }
        StructureResult { rows, fast }
    });

    // group membership: indices into `prepared`
    let mut by_inv: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    let mut by_knot: BTreeMap<(i64, i64, String), Vec<usize>> = BTreeMap::new();
    for (i, (name, knot, inv, _)) in prepared.iter().enumerate() {
        by_inv.entry((inv.tb, inv.rot)).or_default().push(i);
        let k = knot.clone().unwrap_or_else(|| format!("?{name}"));
        by_knot.entry((inv.tb, inv.rot, k)).or_default().push(i);
    }

    let mut report = VerifyReport {
        structures: work.len(),
        ..Default::default()
    };
    let mut check = |tb: i64, rot: i64, knot: Option<String>, members: &[usize]| {
        let mut violations = 0;
        for res in &results {
            let first = res.rows[members[0]].count;
            if members.iter().any(|&i| res.rows[i].count != first) {
                violations += 1;
                let r0 = &res.rows[0];
                report.violations.push(Violation {
                    tb,
                    rot,
                    knot: knot.clone(),
                    rack_id: r0.rack_id.clone(),
                    ul: r0.ul.clone(),
                    ur: r0.ur.clone(),
                    counts: members
                        .iter()
                        .map(|&i| (res.rows[i].code.clone(), res.rows[i].count))
                        .collect(),
                });
            }
        }
        GroupSummary {
            tb,
            rot,
            knot,
            codes: members.iter().map(|&i| prepared[i].0.clone()).collect(),
            structures: results.len(),
            violations,
        }
    };
    let same_knot: Vec<GroupSummary> = by_knot
        .iter()
        .map(|((tb, rot, k), m)| {
            let knot = (!k.starts_with('?')).then(|| k.clone());
            check(*tb, *rot, knot, m)
        })
        .collect();
    let invariant: Vec<GroupSummary> = by_inv
        .iter()
        .map(|((tb, rot), m)| check(*tb, *rot, None, m))
        .collect();
    report.same_knot_groups = same_knot;
    report.invariant_groups = invariant;
    for res in results {
        report.rows.extend(res.rows);
        report.fast_mismatches.extend(res.fast);
    }
    report
}
