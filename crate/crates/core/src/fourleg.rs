//! GL-structures and 4-Legendrian structures on a finite rack.
//!
//! The GL-structures of `X` form `U_X`, the centralizer of `Inn(X)` in
//! `Aut(X)`. A 4-Legendrian structure is an ordered pair `(u_l, u_r)` of
//! GL-structures; the down maps are derived as `d_l = u_r⁻¹ ∘ π⁻¹` and
//! `d_r = u_l⁻¹ ∘ π⁻¹`. Two structures are isomorphic exactly when the pairs
//! are simultaneously conjugate by an automorphism of `X`.

use std::fmt;

use thiserror::Error;

use crate::perm::{burnside_orbit_count, centralizer, PermGroup, Permutation};
use crate::rack::{automorphism_group, inner_group, RackTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FourLegError {
    #[error("{which} = {map} is not a GL-structure of this rack")]
    NotGlStructure {
        which: &'static str,
        map: Permutation,
    },
    #[error("{which} has degree {got}, rack has order {order}")]
    Degree {
        which: &'static str,
        got: usize,
        order: usize,
    },
}

/// The four cusp maps of a 4-Legendrian rack.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FourLegStructure {
    pub ul: Permutation,
    pub ur: Permutation,
    pub dl: Permutation,
    pub dr: Permutation,
}

impl fmt::Display for FourLegStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ul={} ur={}", self.ul, self.ur)
    }
}

/// Whether `u` is an automorphism commuting with every column `β_y`.
pub fn is_gl_structure(rack: &RackTable, u: &Permutation) -> bool {
    u.degree() == rack.order()
        && rack.is_automorphism(u)
        && (0..rack.order())
            .all(|x| (0..rack.order()).all(|y| u.apply(rack.op(x, y)) == rack.op(u.apply(x), y)))
}

/// `U_X = C_{Aut(X)}(Inn(X))`.
pub fn gl_center(rack: &RackTable) -> PermGroup {
    let aut = automorphism_group(rack);
    let inn = inner_group(rack);
    centralizer(&aut, &inn.generators()).expect("same degree")
}

/// `(d_l, d_r) = (u_r⁻¹ π⁻¹, u_l⁻¹ π⁻¹)`.
pub fn derive_down_maps(
    rack: &RackTable,
    ul: &Permutation,
    ur: &Permutation,
) -> Result<(Permutation, Permutation), FourLegError> {
    for (which, u) in [("ul", ul), ("ur", ur)] {
        if u.degree() != rack.order() {
            return Err(FourLegError::Degree {
                which,
                got: u.degree(),
                order: rack.order(),
            });
        }
        if !is_gl_structure(rack, u) {
            return Err(FourLegError::NotGlStructure {
                which,
                map: u.clone(),
            });
        }
    }
    let pinv = rack.kink().inverse();
    Ok((&ur.inverse() * &pinv, &ul.inverse() * &pinv))
}

impl FourLegStructure {
    pub fn new(rack: &RackTable, ul: Permutation, ur: Permutation) -> Result<Self, FourLegError> {
        let (dl, dr) = derive_down_maps(rack, &ul, &ur)?;
        Ok(FourLegStructure { ul, ur, dl, dr })
    }

    fn derived(pinv: &Permutation, ul: &Permutation, ur: &Permutation) -> Self {
        FourLegStructure {
            dl: &ur.inverse() * pinv,
            dr: &ul.inverse() * pinv,
            ul: ul.clone(),
            ur: ur.clone(),
        }
    }
}

/// A rack together with a 4-Legendrian structure on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourLegRack {
    rack: RackTable,
    structure: FourLegStructure,
}

impl FourLegRack {
    pub fn new(rack: RackTable, ul: Permutation, ur: Permutation) -> Result<Self, FourLegError> {
        let structure = FourLegStructure::new(&rack, ul, ur)?;
        Ok(FourLegRack { rack, structure })
    }

    /// `(u_l, u_r) = (id, id)`.
    pub fn with_identity_structure(rack: RackTable) -> Self {
        let id = Permutation::identity(rack.order());
        FourLegRack::new(rack, id.clone(), id).expect("identity is a GL-structure")
    }

    pub fn rack(&self) -> &RackTable {
        &self.rack
    }

    pub fn structure(&self) -> &FourLegStructure {
        &self.structure
    }
}

/// All `|U_X|²` structures in lexicographic order of `(u_l, u_r)`.
pub fn enumerate_structures(rack: &RackTable) -> Vec<FourLegStructure> {
    let u = gl_center(rack);
    let pinv = rack.kink().inverse();
    let mut out = Vec::with_capacity(u.order() * u.order());
    for ul in u.elements() {
        for ur in u.elements() {
            out.push(FourLegStructure::derived(&pinv, ul, ur));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureClass {
    /// Lexicographically least `(u_l, u_r)` in the class.
    pub ul: Permutation,
    pub ur: Permutation,
    pub orbit_size: usize,
}

/// Isomorphism classes of 4-Legendrian structures on one rack.
#[derive(Debug, Clone)]
pub struct Classification {
    pub aut_order: usize,
    pub inn_order: usize,
    pub gl_order: usize,
    /// Sorted by representative.
    pub classes: Vec<StructureClass>,
}

impl Classification {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

/// Orbits of `U_X × U_X` under diagonal conjugation by `Aut(X)`.
pub fn classify_structures(rack: &RackTable) -> Classification {
    let aut = automorphism_group(rack);
    let inn = inner_group(rack);
    let u = centralizer(&aut, &inn.generators()).expect("same degree");
    let m = u.order();
    // conjugation action of each generator of Aut(X) on U_X, by index
    let actions: Vec<Vec<usize>> = aut
        .generators()
        .iter()
        .map(|g| {
            u.elements()
                .iter()
                .map(|x| {
                    u.index_of(&x.conjugate_by(g))
                        .expect("U_X is normal in Aut(X)")
                })
                .collect()
        })
        .collect();
    let mut visited = vec![false; m * m];
    let mut classes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..m * m {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(p) = stack.pop() {
            size += 1;
            let (i, j) = (p / m, p % m);
            for act in &actions {
                let q = act[i] * m + act[j];
                if !visited[q] {
                    visited[q] = true;
                    stack.push(q);
                }
            }
        }
        // every smaller index was visited earlier, so `start` is the minimum
        classes.push(StructureClass {
            ul: u.elements()[start / m].clone(),
            ur: u.elements()[start % m].clone(),
            orbit_size: size,
        });
    }
    Classification {
        aut_order: aut.order(),
        inn_order: inn.order(),
        gl_order: m,
        classes,
    }
}

/// Class count by Burnside's lemma over `Aut(X)` acting on `U_X × U_X`.
pub fn burnside_structure_count(rack: &RackTable) -> u64 {
    let aut = automorphism_group(rack);
    let inn = inner_group(rack);
    let u = centralizer(&aut, &inn.generators()).expect("same degree");
    burnside_orbit_count(&aut, &u)
}

/// An automorphism `φ` with `φ u_l φ⁻¹ = v_l` and `φ u_r φ⁻¹ = v_r`, if any.
pub fn find_structure_isomorphism(
    rack: &RackTable,
    from: (&Permutation, &Permutation),
    to: (&Permutation, &Permutation),
) -> Option<Permutation> {
    automorphism_group(rack)
        .elements()
        .iter()
        .find(|phi| &from.0.conjugate_by(phi) == to.0 && &from.1.conjugate_by(phi) == to.1)
        .cloned()
}

// --- the eight-axiom form --------------------------------------------------

/// The axiom lines of the sextuple definition. The source lists the
/// right-invariance law twice in its d-form; the u-form is checked as a
/// separate line rather than assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KimuraAxiom {
    /// `d_l u_r = u_r d_l = d_r u_l = u_l d_r`
    CuspProducts,
    /// `d_r u_l (x ▷ x) = x`
    KinkCancellation,
    /// `d_l(x ▷ y) = d_l(x) ▷ y`
    DlEquivariant,
    /// `u_l(x ▷ y) = u_l(x) ▷ y`
    UlEquivariant,
    /// `d_r(x ▷ y) = d_r(x) ▷ y`
    DrEquivariant,
    /// `u_r(x ▷ y) = u_r(x) ▷ y`
    UrEquivariant,
    /// `x ▷ d_l(y) = x ▷ y = x ▷ d_r(y)`
    DownInvariance,
    /// `x ▷ u_l(y) = x ▷ y = x ▷ u_r(y)`
    UpInvariance,
}

impl KimuraAxiom {
    pub const ALL: [KimuraAxiom; 8] = [
        KimuraAxiom::CuspProducts,
        KimuraAxiom::KinkCancellation,
        KimuraAxiom::DlEquivariant,
        KimuraAxiom::UlEquivariant,
        KimuraAxiom::DrEquivariant,
        KimuraAxiom::UrEquivariant,
        KimuraAxiom::DownInvariance,
        KimuraAxiom::UpInvariance,
    ];
}

/// Points at which an axiom fails; `y` is unused by single-variable laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomWitness {
    pub axiom: KimuraAxiom,
    pub x: usize,
    pub y: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    /// One entry per axiom line, in order; `None` means the line holds.
    pub lines: Vec<(KimuraAxiom, Option<AxiomWitness>)>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.lines.iter().all(|(_, w)| w.is_none())
    }

    pub fn first_failure(&self) -> Option<AxiomWitness> {
        self.lines.iter().find_map(|(_, w)| *w)
    }

    pub fn holds(&self, axiom: KimuraAxiom) -> bool {
        self.lines
            .iter()
            .find(|(a, _)| *a == axiom)
            .is_some_and(|(_, w)| w.is_none())
    }
}

/// Checks every axiom line against an arbitrary quadruple of maps.
pub fn check_kimura_axioms(rack: &RackTable, s: &FourLegStructure) -> AxiomReport {
    let n = rack.order();
    let FourLegStructure { ul, ur, dl, dr } = s;
    let pairs = || (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)));

    let check_x = |axiom, ok: &dyn Fn(usize) -> bool| {
        (0..n)
            .find(|&x| !ok(x))
            .map(|x| AxiomWitness { axiom, x, y: None })
    };
    let check_xy = |axiom, ok: &dyn Fn(usize, usize) -> bool| {
        pairs()
            .find(|&(x, y)| !ok(x, y))
            .map(|(x, y)| AxiomWitness {
                axiom,
                x,
                y: Some(y),
            })
    };
    fn equivariant<'a>(
        rack: &'a RackTable,
        f: &'a Permutation,
    ) -> impl Fn(usize, usize) -> bool + 'a {
        move |x, y| f.apply(rack.op(x, y)) == rack.op(f.apply(x), y)
    }

    let lines = KimuraAxiom::ALL
        .iter()
        .map(|&axiom| {
            let witness = match axiom {
                KimuraAxiom::CuspProducts => check_x(axiom, &|x| {
                    let a = dl.apply(ur.apply(x));
                    a == ur.apply(dl.apply(x))
                        && a == dr.apply(ul.apply(x))
                        && a == ul.apply(dr.apply(x))
                }),
                KimuraAxiom::KinkCancellation => {
                    check_x(axiom, &|x| dr.apply(ul.apply(rack.op(x, x))) == x)
                }
                KimuraAxiom::DlEquivariant => check_xy(axiom, &equivariant(rack, dl)),
                KimuraAxiom::UlEquivariant => check_xy(axiom, &equivariant(rack, ul)),
                KimuraAxiom::DrEquivariant => check_xy(axiom, &equivariant(rack, dr)),
                KimuraAxiom::UrEquivariant => check_xy(axiom, &equivariant(rack, ur)),
                KimuraAxiom::DownInvariance => check_xy(axiom, &|x, y| {
                    let v = rack.op(x, y);
                    rack.op(x, dl.apply(y)) == v && rack.op(x, dr.apply(y)) == v
                }),
                KimuraAxiom::UpInvariance => check_xy(axiom, &|x, y| {
                    let v = rack.op(x, y);
                    rack.op(x, ul.apply(y)) == v && rack.op(x, ur.apply(y)) == v
                }),
            };
            (axiom, witness)
        })
        .collect();
    AxiomReport { lines }
}
