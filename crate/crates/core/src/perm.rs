//! Permutations of `0..n` and explicitly listed permutation groups.
//!
//! Composition follows the function convention: `p.compose(&q)` is the map
//! `x ↦ p(q(x))`. Every formula elsewhere in the crate is written in this
//! convention.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("image sequence is not a bijection on 0..{degree}")]
    NotBijective { degree: usize },
    #[error("invalid cycle notation: {0}")]
    BadCycles(String),
    #[error("pair set is not closed under the acting group")]
    NotInvariant,
}

/// A bijection on `0..n`, stored as its image sequence.
///
/// The derived ordering compares image sequences lexicographically, which
/// is the ordering used for canonical orbit representatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &i in &images {
            if i >= degree || seen[i] {
                return Err(PermError::NotBijective { degree });
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[0, 1, 2], [3, 4]]`.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(PermError::BadCycles(format!(
                        "point {x} out of range for degree {degree}"
                    )));
                }
                if used[x] {
                    return Err(PermError::BadCycles(format!("point {x} repeated")));
                }
                used[x] = true;
                images[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)`; `()` or an empty string is
    /// the identity. Commas are accepted as separators inside a cycle.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        let text = text.trim();
        let mut cycles = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| PermError::BadCycles(text.to_string()))?;
            let close = open
                .find(')')
                .ok_or_else(|| PermError::BadCycles(text.to_string()))?;
            let body = &open[..close];
            let cycle = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| PermError::BadCycles(text.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        Self::from_cycles(degree, &cycles)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Permutation { images }
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, exponent: i64) -> Permutation {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut e = exponent.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&sq);
            }
            sq = sq.compose_unchecked(&sq);
            e >>= 1;
        }
        acc
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        let mut images = vec![0; self.degree()];
        for x in 0..self.degree() {
            images[g.images[x]] = g.images[self.images[x]];
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.degree() == other.degree()
            && (0..self.degree())
                .all(|x| self.images[other.images[x]] == other.images[self.images[x]])
    }

    pub fn fixed_point_count(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i == x)
            .count()
    }

    /// Disjoint cycles of length at least two, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Length of the cycle through each point.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree();
        let mut len = vec![0; n];
        for start in 0..n {
            if len[start] != 0 {
                continue;
            }
            let mut k = 1;
            let mut x = self.images[start];
            while x != start {
                k += 1;
                x = self.images[x];
            }
            len[start] = k;
            let mut x = self.images[start];
            while x != start {
                len[x] = k;
                x = self.images[x];
            }
        }
        len
    }

    /// Cycle type as a non-increasing partition of the degree (fixed points included).
    pub fn cycle_type(&self) -> Vec<usize> {
        let lens = self.cycle_lengths();
        let mut seen = vec![false; self.degree()];
        let mut parts = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut x = start;
            loop {
                seen[x] = true;
                x = self.images[x];
                if x == start {
                    break;
                }
            }
            parts.push(lens[start]);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    /// Panics on degree mismatch; use [`Permutation::compose`] for a checked version.
    fn mul(self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch");
        self.compose_unchecked(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.degree())
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Parses an image list such as `[2, 0, 1]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| PermError::BadCycles(s.to_string()))?;
        let images = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| PermError::BadCycles(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::from_images(images)
    }
}

/// All permutations of `0..degree` in lexicographic order of image sequences.
pub fn all_permutations(degree: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..degree).collect();
    loop {
        out.push(Permutation {
            images: current.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (1..degree).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..degree)
            .rev()
            .find(|&j| current[j] > current[i - 1])
            .unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// A finite permutation group given by an explicit, lexicographically sorted
/// listing of its elements.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl PermGroup {
    /// Wraps an element list without checking group axioms. The list is
    /// sorted and deduplicated.
    pub(crate) fn from_elements_unchecked(degree: usize, mut elements: Vec<Permutation>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        PermGroup {
            degree,
            elements,
            index,
        }
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_elements_unchecked(degree, vec![Permutation::identity(degree)])
    }

    pub fn symmetric(degree: usize) -> Self {
        Self::from_elements_unchecked(degree, all_permutations(degree))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    /// Position of `p` in the sorted element listing.
    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter().all(|a| gens.iter().all(|b| a.commutes_with(b)))
    }

    /// A small generating set, built greedily from the sorted listing.
    pub fn generators(&self) -> Vec<Permutation> {
        let mut gens: Vec<Permutation> = Vec::new();
        let mut span = PermGroup::trivial(self.degree);
        for g in &self.elements {
            if span.order() == self.order() {
                break;
            }
            if !span.contains(g) {
                gens.push(g.clone());
                span = closure_of(self.degree, &gens);
            }
        }
        gens
    }

    /// Checks closure under composition (and hence, being finite, inverses).
    pub fn is_closed(&self) -> bool {
        self.contains(&Permutation::identity(self.degree))
            && self.elements.iter().all(|a| {
                self.elements
                    .iter()
                    .all(|b| self.contains(&a.compose_unchecked(b)))
            })
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup(degree {}, order {})",
            self.degree,
            self.order()
        )
    }
}

fn closure_of(degree: usize, generators: &[Permutation]) -> PermGroup {
    let id = Permutation::identity(degree);
    let mut seen: HashMap<Permutation, ()> = HashMap::new();
    seen.insert(id.clone(), ());
    let mut queue = VecDeque::from([id]);
    let mut elements = Vec::new();
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = g.compose_unchecked(s);
            if !seen.contains_key(&h) {
                seen.insert(h.clone(), ());
                queue.push_back(h);
            }
        }
        elements.push(g);
    }
    PermGroup::from_elements_unchecked(degree, elements)
}

/// Smallest group of the given degree containing `generators`, by
/// breadth-first closure under right multiplication.
pub fn subgroup_closure(degree: usize, generators: &[Permutation]) -> Result<PermGroup, PermError> {
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(PermError::DegreeMismatch {
            left: degree,
            right: g.degree(),
        });
    }
    Ok(closure_of(degree, generators))
}

/// `{g ∈ G : g s = s g for all s ∈ S}`.
pub fn centralizer(group: &PermGroup, set: &[Permutation]) -> Result<PermGroup, PermError> {
    if let Some(s) = set.iter().find(|s| s.degree() != group.degree()) {
        return Err(PermError::DegreeMismatch {
            left: group.degree(),
            right: s.degree(),
        });
    }
    let elements = group
        .elements()
        .iter()
        .filter(|g| set.iter().all(|s| g.commutes_with(s)))
        .cloned()
        .collect();
    Ok(PermGroup::from_elements_unchecked(group.degree(), elements))
}

/// One orbit of pairs under diagonal conjugation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOrbit {
    /// Lexicographically least member.
    pub representative: (Permutation, Permutation),
    /// Members in lexicographic order.
    pub members: Vec<(Permutation, Permutation)>,
}

/// Partitions `pairs` into orbits of the action `g·(a, b) = (gag⁻¹, gbg⁻¹)`.
/// Orbits are returned sorted by representative.
pub fn diagonal_pair_orbits(
    pairs: &[(Permutation, Permutation)],
    group: &PermGroup,
) -> Result<Vec<PairOrbit>, PermError> {
    for (a, b) in pairs {
        for p in [a, b] {
            if p.degree() != group.degree() {
                return Err(PermError::DegreeMismatch {
                    left: group.degree(),
                    right: p.degree(),
                });
            }
        }
    }
    let mut sorted: Vec<(Permutation, Permutation)> = pairs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let index: HashMap<&(Permutation, Permutation), usize> =
        sorted.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let gens = group.generators();
    let mut orbit_of = vec![usize::MAX; sorted.len()];
    let mut orbits = Vec::new();
    for start in 0..sorted.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        orbit_of[start] = id;
        let mut members = vec![start];
        let mut k = 0;
        while k < members.len() {
            let (a, b) = &sorted[members[k]];
            for g in &gens {
                let image = (a.conjugate_by(g), b.conjugate_by(g));
                let j = *index.get(&image).ok_or(PermError::NotInvariant)?;
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        // `start` is the least unvisited index, so it is the orbit minimum.
        orbits.push(PairOrbit {
            representative: sorted[start].clone(),
            members: members.into_iter().map(|i| sorted[i].clone()).collect(),
        });
    }
    Ok(orbits)
}

/// Number of orbits of `G × G` under diagonal conjugation by `G`, via
/// Burnside's lemma: `(1/|G|) Σ_g |C_G(g)|²`.
pub fn burnside_pair_count(group: &PermGroup) -> u64 {
    burnside_orbit_count(group, group)
}

/// Number of orbits of `on × on` under diagonal conjugation by `acting`,
/// assuming `on` is normalized by `acting`.
pub fn burnside_orbit_count(acting: &PermGroup, on: &PermGroup) -> u64 {
    let total: u64 = acting
        .elements()
        .iter()
        .map(|g| {
            let fixed = on.elements().iter().filter(|u| u.commutes_with(g)).count() as u64;
            fixed * fixed
        })
        .sum();
    total / acting.order() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, c: &[&[usize]]) -> Permutation {
        let cycles: Vec<Vec<usize>> = c.iter().map(|c| c.to_vec()).collect();
        Permutation::from_cycles(n, &cycles).unwrap()
    }

    #[test]
    fn compose_examples() {
        let id = Permutation::identity(2);
        let t = cyc(2, &[&[0, 1]]);
        assert_eq!(id.compose(&t).unwrap(), t);
        assert!(t.compose(&t).unwrap().is_identity());

        let p = cyc(3, &[&[0, 1, 2]]);
        let q = cyc(3, &[&[0, 1]]);
        assert_eq!(p.compose(&q).unwrap().images(), &[2, 1, 0]);
    }

    #[test]
    fn compose_rejects_degree_mismatch() {
        let err = Permutation::identity(2)
            .compose(&Permutation::identity(3))
            .unwrap_err();
        assert_eq!(err, PermError::DegreeMismatch { left: 2, right: 3 });
    }

    #[test]
    fn closure_examples() {
        assert_eq!(
            subgroup_closure(2, &[cyc(2, &[&[0, 1]])]).unwrap().order(),
            2
        );
        let s3 = subgroup_closure(3, &[cyc(3, &[&[0, 1]]), cyc(3, &[&[1, 2]])]).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(s3.is_closed());
        let triv = subgroup_closure(3, &[]).unwrap();
        assert_eq!(triv.order(), 1);
        assert!(triv.elements()[0].is_identity());
    }

    #[test]
    fn centralizer_examples() {
        let s3 = PermGroup::symmetric(3);
        assert_eq!(
            centralizer(&s3, &[Permutation::identity(3)])
                .unwrap()
                .order(),
            6
        );
        let c = centralizer(&s3, &[cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(c.order(), 3);
        assert!(c.is_closed());
        let s2 = PermGroup::symmetric(2);
        assert_eq!(centralizer(&s2, &[cyc(2, &[&[0, 1]])]).unwrap().order(), 2);
    }

    fn all_pairs(g: &PermGroup) -> Vec<(Permutation, Permutation)> {
        let mut out = Vec::new();
        for a in g.elements() {
            for b in g.elements() {
                out.push((a.clone(), b.clone()));
            }
        }
        out
    }

    #[test]
    fn pair_orbit_examples() {
        let s2 = PermGroup::symmetric(2);
        assert_eq!(diagonal_pair_orbits(&all_pairs(&s2), &s2).unwrap().len(), 4);
        let s3 = PermGroup::symmetric(3);
        let orbits = diagonal_pair_orbits(&all_pairs(&s3), &s3).unwrap();
        assert_eq!(orbits.len(), 11);
        assert_eq!(orbits.iter().map(|o| o.members.len()).sum::<usize>(), 36);
        let id = Permutation::identity(3);
        let single = diagonal_pair_orbits(&[(id.clone(), id.clone())], &s3).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn pair_orbit_representatives_are_minimal() {
        let s3 = PermGroup::symmetric(3);
        for orbit in diagonal_pair_orbits(&all_pairs(&s3), &s3).unwrap() {
            assert_eq!(orbit.representative, orbit.members[0]);
            assert!(orbit.members.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn pair_orbits_reject_non_invariant_sets() {
        let s3 = PermGroup::symmetric(3);
        let t = cyc(3, &[&[0, 1]]);
        let id = Permutation::identity(3);
        assert_eq!(
            diagonal_pair_orbits(&[(t, id)], &s3).unwrap_err(),
            PermError::NotInvariant
        );
    }

    #[test]
    fn burnside_examples() {
        assert_eq!(burnside_pair_count(&PermGroup::trivial(0)), 1);
        assert_eq!(burnside_pair_count(&PermGroup::trivial(4)), 1);
        assert_eq!(burnside_pair_count(&PermGroup::symmetric(2)), 4);
        assert_eq!(burnside_pair_count(&PermGroup::symmetric(3)), 11);
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = cyc(5, &[&[0, 1, 2], &[3, 4]]);
        assert_eq!(p.to_string(), "(0 1 2)(3 4)");
        assert_eq!(Permutation::parse_cycles("(0 1 2)(3 4)", 5).unwrap(), p);
        assert_eq!(Permutation::parse_cycles("(0,1,2) (3,4)", 5).unwrap(), p);
        assert_eq!(Permutation::identity(4).to_string(), "()");
        assert!(Permutation::parse_cycles("()", 4).unwrap().is_identity());
        assert!(Permutation::parse_cycles("(0 5)", 4).is_err());
        assert!(Permutation::parse_cycles("(0 1)(1 2)", 4).is_err());
        assert!(Permutation::parse_cycles("0 1", 4).is_err());
        assert_eq!(
            "[2, 0, 1]".parse::<Permutation>().unwrap().images(),
            &[2, 0, 1]
        );
    }

    #[test]
    fn from_images_rejects_non_bijection() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
    }

    #[test]
    fn cycle_type_and_lengths() {
        let p = cyc(6, &[&[0, 3], &[1, 4, 5]]);
        assert_eq!(p.cycle_type(), vec![3, 2, 1]);
        assert_eq!(p.cycle_lengths(), vec![2, 3, 1, 2, 3, 3]);
        assert_eq!(p.fixed_point_count(), 1);
        assert_eq!(p.pow(6), Permutation::identity(6));
        assert_eq!(p.pow(-1), p.inverse());
        assert_eq!(p.pow(5), p.inverse());
    }

    #[test]
    fn all_permutations_sorted_and_complete() {
        let all = all_permutations(4);
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all_permutations(0).len(), 1);
    }

    #[test]
    fn generators_span_group() {
        for n in 0..=5 {
            let s = PermGroup::symmetric(n);
            let gens = s.generators();
            assert!(gens.len() <= 8);
            assert_eq!(subgroup_closure(n, &gens).unwrap().order(), s.order());
        }
    }
}
