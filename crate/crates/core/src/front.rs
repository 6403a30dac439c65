//! Oriented Legendrian fronts as cyclic event codes.
//!
//! A code lists, in traversal order from a basepoint, the cusps met and the
//! passes through crossings. Arcs of the diagram run from one under-pass to
//! the next; cusps do not break arcs but act on colors through the cusp maps
//! of a 4-Legendrian rack.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertical {
    Up,
    Down,
}

impl Vertical {
    pub fn flip(self) -> Vertical {
        match self {
            Vertical::Up => Vertical::Down,
            Vertical::Down => Vertical::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Over,
    Under,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrontEvent {
    Cusp { side: Side, vertical: Vertical },
    Crossing { id: u32, sign: Sign, role: Role },
}

impl FrontEvent {
    pub fn cusp(side: Side, vertical: Vertical) -> Self {
        FrontEvent::Cusp { side, vertical }
    }

    pub fn crossing(id: u32, sign: Sign, role: Role) -> Self {
        FrontEvent::Crossing { id, sign, role }
    }
}

impl fmt::Display for FrontEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FrontEvent::Cusp { side, vertical } => write!(
                f,
                "CUSP {} {}",
                if side == Side::Left { 'L' } else { 'R' },
                if vertical == Vertical::Up { 'U' } else { 'D' }
            ),
            FrontEvent::Crossing { id, sign, role } => write!(
                f,
                "X {id} {} {}",
                if sign == Sign::Pos { '+' } else { '-' },
                if role == Role::Over { 'O' } else { 'U' }
            ),
        }
    }
}

impl FromStr for FrontEvent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tok: Vec<&str> = s.split_whitespace().collect();
        match tok.as_slice() {
            ["CUSP", side, vert] => {
                let side = match *side {
                    "L" => Side::Left,
                    "R" => Side::Right,
                    other => return Err(format!("bad cusp side {other:?}")),
                };
                let vertical = match *vert {
                    "U" => Vertical::Up,
                    "D" => Vertical::Down,
                    other => return Err(format!("bad cusp direction {other:?}")),
                };
                Ok(FrontEvent::Cusp { side, vertical })
            }
            ["X", id, sign, role] => {
                let id = id.parse().map_err(|_| format!("bad crossing id {id:?}"))?;
                let sign = match *sign {
                    "+" => Sign::Pos,
                    "-" => Sign::Neg,
                    other => return Err(format!("bad crossing sign {other:?}")),
                };
                let role = match *role {
                    "O" => Role::Over,
                    "U" => Role::Under,
                    other => return Err(format!("bad crossing role {other:?}")),
                };
                Ok(FrontEvent::Crossing { id, sign, role })
            }
            _ => Err(format!("unrecognized event {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontError {
    #[error("crossing {id} occurs {count} times, expected one over and one under pass")]
    UnmatchedCrossing { id: u32, count: usize },
    #[error("crossing {id} has two {role:?} passes")]
    RepeatedRole { id: u32, role: Role },
    #[error("crossing {id} has passes of different sign")]
    SignMismatch { id: u32 },
    #[error("cusps at events {first} and {second} are both on the {side:?} side")]
    CuspSidesNotAlternating {
        first: usize,
        second: usize,
        side: Side,
    },
    #[error("front has no up cusp")]
    NoUpCusp,
    #[error("front has no down cusp")]
    NoDownCusp,
    #[error("front has an odd number of cusps ({0})")]
    OddCuspCount(usize),
    #[error("position {position} out of range for a code of length {len}")]
    Position { position: usize, len: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassicalInvariants {
    pub tb: i64,
    pub rot: i64,
    pub writhe: i64,
    pub up_cusps: i64,
    pub down_cusps: i64,
}

impl fmt::Display for ClassicalInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tb={} rot={}", self.tb, self.rot)
    }
}

/// A validated cyclic event sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrontCode {
    events: Vec<FrontEvent>,
}

pub fn validate_front(events: Vec<FrontEvent>) -> Result<FrontCode, FrontError> {
    let mut passes: BTreeMap<u32, Vec<(Sign, Role)>> = BTreeMap::new();
    for e in &events {
        if let FrontEvent::Crossing { id, sign, role } = *e {
            passes.entry(id).or_default().push((sign, role));
        }
    }
    for (&id, p) in &passes {
        if p.len() != 2 {
            return Err(FrontError::UnmatchedCrossing { id, count: p.len() });
        }
        if p[0].1 == p[1].1 {
            return Err(FrontError::RepeatedRole { id, role: p[0].1 });
        }
        if p[0].0 != p[1].0 {
            return Err(FrontError::SignMismatch { id });
        }
    }

    let cusps: Vec<(usize, Side, Vertical)> = events
        .iter()
        .enumerate()
        .filter_map(|(i, e)| match *e {
            FrontEvent::Cusp { side, vertical } => Some((i, side, vertical)),
            _ => None,
        })
        .collect();
    if cusps.len() > 1 {
        for k in 0..cusps.len() {
            let (a, sa, _) = cusps[k];
            let (b, sb, _) = cusps[(k + 1) % cusps.len()];
            if sa == sb {
                return Err(FrontError::CuspSidesNotAlternating {
                    first: a,
                    second: b,
                    side: sa,
                });
            }
        }
    }
    if cusps.len() % 2 == 1 {
        return Err(FrontError::OddCuspCount(cusps.len()));
    }
    if !cusps.iter().any(|c| c.2 == Vertical::Up) {
        return Err(FrontError::NoUpCusp);
    }
    if !cusps.iter().any(|c| c.2 == Vertical::Down) {
        return Err(FrontError::NoDownCusp);
    }
    Ok(FrontCode { events })
}

impl FrontCode {
    pub fn events(&self) -> &[FrontEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn crossing_count(&self) -> usize {
        self.under_positions().len()
    }

    fn under_positions(&self) -> Vec<usize> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                matches!(
                    e,
                    FrontEvent::Crossing {
                        role: Role::Under,
                        ..
                    }
                )
            })
            .map(|(i, _)| i)
            .collect()
    }

    fn next_crossing_id(&self) -> u32 {
        self.events
            .iter()
            .filter_map(|e| match e {
                FrontEvent::Crossing { id, .. } => Some(id + 1),
                _ => None,
            })
            .max()
            .unwrap_or(1)
    }

    /// Side of the last cusp strictly before `position`, cyclically.
    fn preceding_cusp_side(&self, position: usize) -> Side {
        let n = self.events.len();
        (1..=n)
            .map(|k| &self.events[(position + n - k) % n])
            .find_map(|e| match e {
                FrontEvent::Cusp { side, .. } => Some(*side),
                _ => None,
            })
            .expect("valid fronts have cusps")
    }

    fn insert(&self, position: usize, new: &[FrontEvent]) -> Result<FrontCode, FrontError> {
        if position > self.events.len() {
            return Err(FrontError::Position {
                position,
                len: self.events.len(),
            });
        }
        let mut events = self.events.clone();
        events.splice(position..position, new.iter().copied());
        validate_front(events)
    }

    /// Inserts a zig-zag before event `position` (`position == len` appends).
    /// Sign `+1` adds two down cusps, `-1` two up cusps.
    pub fn stabilize(&self, sign: Sign, position: usize) -> Result<FrontCode, FrontError> {
        let prev = self.preceding_cusp_side(position.min(self.events.len()));
        let vertical = match sign {
            Sign::Pos => Vertical::Down,
            Sign::Neg => Vertical::Up,
        };
        self.insert(
            position,
            &[
                FrontEvent::cusp(prev.flip(), vertical),
                FrontEvent::cusp(prev, vertical),
            ],
        )
    }

    /// Inserts a small positive loop (one crossing, one up and one down cusp)
    /// before event `position`. Classical invariants are unchanged.
    pub fn add_kink(&self, position: usize) -> Result<FrontCode, FrontError> {
        let id = self.next_crossing_id();
        let prev = self.preceding_cusp_side(position.min(self.events.len()));
        let (first, second) = match prev {
            // moving right
            Side::Left => (
                FrontEvent::cusp(Side::Right, Vertical::Down),
                FrontEvent::cusp(Side::Left, Vertical::Up),
            ),
            Side::Right => (
                FrontEvent::cusp(Side::Left, Vertical::Up),
                FrontEvent::cusp(Side::Right, Vertical::Down),
            ),
        };
        self.insert(
            position,
            &[
                FrontEvent::crossing(id, Sign::Pos, Role::Under),
                first,
                second,
                FrontEvent::crossing(id, Sign::Pos, Role::Over),
            ],
        )
    }

    /// The same front traversed backwards: negates `rot`, keeps `tb`.
    pub fn reversed(&self) -> FrontCode {
        let events = self
            .events
            .iter()
            .rev()
            .map(|e| match *e {
                FrontEvent::Cusp { side, vertical } => FrontEvent::cusp(side, vertical.flip()),
                other => other,
            })
            .collect();
        FrontCode { events }
    }

    /// Moves the basepoint to event `k`.
    pub fn rotated(&self, k: usize) -> FrontCode {
        let mut events = self.events.clone();
        if !events.is_empty() {
            let k = k % events.len();
            events.rotate_left(k);
        }
        FrontCode { events }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for FrontCode {
    type Err = FrontError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(parse_fixture(s)?.code)
    }
}

pub fn classical_invariants(code: &FrontCode) -> ClassicalInvariants {
    let mut writhe = 0;
    let (mut up, mut down) = (0, 0);
    for e in &code.events {
        match *e {
            FrontEvent::Cusp { vertical, .. } => match vertical {
                Vertical::Up => up += 1,
                Vertical::Down => down += 1,
            },
            FrontEvent::Crossing { sign, role, .. } => {
                if role == Role::Under {
                    writhe += sign.value();
                }
            }
        }
    }
    ClassicalInvariants {
        tb: writhe - (up + down) / 2,
        rot: (down - up) / 2,
        writhe,
        up_cusps: up,
        down_cusps: down,
    }
}

// --- presentation -----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CuspOp {
    Ul,
    Ur,
    Dl,
    Dr,
}

impl CuspOp {
    pub fn side(self) -> Side {
        match self {
            CuspOp::Ul | CuspOp::Dl => Side::Left,
            CuspOp::Ur | CuspOp::Dr => Side::Right,
        }
    }

    pub fn vertical(self) -> Vertical {
        match self {
            CuspOp::Ul | CuspOp::Ur => Vertical::Up,
            CuspOp::Dl | CuspOp::Dr => Vertical::Down,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CuspOp::Ul => "u_l",
            CuspOp::Ur => "u_r",
            CuspOp::Dl => "d_l",
            CuspOp::Dr => "d_r",
        }
    }
}

/// The cusp map a cusp contributes. The only place the labeling convention
/// lives.
pub fn cusp_op(side: Side, vertical: Vertical) -> CuspOp {
    match (side, vertical) {
        (Side::Left, Vertical::Up) => CuspOp::Ul,
        (Side::Right, Vertical::Up) => CuspOp::Ur,
        (Side::Left, Vertical::Down) => CuspOp::Dl,
        (Side::Right, Vertical::Down) => CuspOp::Dr,
    }
}

/// Cusp maps in traversal order; the earliest letter acts first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CuspWord {
    pub letters: Vec<CuspOp>,
}

impl CuspWord {
    pub fn new(letters: Vec<CuspOp>) -> Self {
        CuspWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(words: impl IntoIterator<Item = CuspWord>) -> CuspWord {
        CuspWord {
            letters: words.into_iter().flat_map(|w| w.letters).collect(),
        }
    }

    /// Whether consecutive letters always switch side.
    pub fn alternates(&self) -> bool {
        self.letters.windows(2).all(|w| w[0].side() != w[1].side())
    }
}

/// Printed as a composition of maps, so the last letter comes first.
impl fmt::Display for CuspWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.letters.iter().rev().map(|c| c.name()).collect();
        f.write_str(&names.join(" "))
    }
}

/// At an under-pass: `outgoing = word(incoming) ▷^sign over`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub crossing: u32,
    pub incoming: usize,
    pub outgoing: usize,
    pub over: usize,
    pub sign: Sign,
    pub word: CuspWord,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let input = if self.word.is_empty() {
            format!("x{}", self.incoming + 1)
        } else {
            format!("{}(x{})", self.word, self.incoming + 1)
        };
        match self.sign {
            Sign::Neg => write!(f, "x{} ▷ x{} = {input}", self.outgoing + 1, self.over + 1),
            Sign::Pos => write!(f, "x{} = {input} ▷ x{}", self.outgoing + 1, self.over + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    /// Generator `k` is the arc ending at the `k`-th under-pass; generator 0
    /// contains the basepoint.
    pub generators: usize,
    pub relations: Vec<Relation>,
    /// For a front with no crossings: the single arc closes up, `x1 = w(x1)`.
    pub closing_word: Option<CuspWord>,
}

impl Presentation {
    /// All cusp letters in traversal order starting from arc 0.
    pub fn total_word(&self) -> CuspWord {
        match &self.closing_word {
            Some(w) => w.clone(),
            None => CuspWord::concat(self.relations.iter().map(|r| r.word.clone())),
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "generators: {}", self.generators)?;
        for r in &self.relations {
            writeln!(f, "{r}")?;
        }
        if let Some(w) = &self.closing_word {
            if w.is_empty() {
                writeln!(f, "x1 = x1")?;
            } else {
                writeln!(f, "x1 = {w}(x1)")?;
            }
        }
        Ok(())
    }
}

pub fn fundamental_presentation(code: &FrontCode) -> Presentation {
    let events = &code.events;
    let unders = code.under_positions();
    let cusp_at = |i: usize| match events[i] {
        FrontEvent::Cusp { side, vertical } => Some(cusp_op(side, vertical)),
        _ => None,
    };
    if unders.is_empty() {
        let word = CuspWord::new((0..events.len()).filter_map(cusp_at).collect());
        return Presentation {
            generators: 1,
            relations: Vec::new(),
            closing_word: Some(word),
        };
    }
    let n = unders.len();
    let len = events.len();
    // arc containing event i: the first under-pass at or after i, cyclically
    let arc_of = |i: usize| unders.iter().position(|&u| u >= i).unwrap_or(0);
    let relations = (0..n)
        .map(|k| {
            let end = unders[k];
            let start = (unders[(k + n - 1) % n] + 1) % len;
            let mut letters = Vec::new();
            let mut i = start;
            while i != end {
                letters.extend(cusp_at(i));
                i = (i + 1) % len;
            }
            let FrontEvent::Crossing { id, sign, .. } = events[end] else {
                unreachable!()
            };
            let over_pos = events
                .iter()
                .position(|e| {
                    matches!(e, FrontEvent::Crossing { id: j, role: Role::Over, .. } if *j == id)
                })
                .expect("validated crossing has an over pass");
            Relation {
                crossing: id,
                incoming: k,
                outgoing: (k + 1) % n,
                over: arc_of(over_pos),
                sign,
                word: CuspWord::new(letters),
            }
        })
        .collect();
    Presentation {
        generators: n,
        relations,
        closing_word: None,
    }
}

// --- fixtures ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    /// Topological knot type, when known.
    pub knot: Option<String>,
    pub code: FrontCode,
}

impl Fixture {
    pub fn new(name: &str, knot: Option<&str>, code: FrontCode) -> Self {
        Fixture {
            name: name.to_string(),
            knot: knot.map(str::to_string),
            code,
        }
    }

    pub fn invariants(&self) -> ClassicalInvariants {
        classical_invariants(&self.code)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# name: {}\n", self.name);
        if let Some(k) = &self.knot {
            out.push_str(&format!("# knot: {k}\n"));
        }
        out.push_str(&self.code.to_text());
        out
    }
}

/// Parses a front file. `# name:` and `# knot:` comment lines carry metadata;
/// other comments and blank lines are skipped.
pub fn parse_fixture(text: &str) -> Result<Fixture, FrontError> {
    let mut name = String::new();
    let mut knot = None;
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("name:") {
                name = v.trim().to_string();
            } else if let Some(v) = comment.strip_prefix("knot:") {
                knot = Some(v.trim().to_string());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let e = line
            .parse()
            .map_err(|msg| FrontError::Parse { line: i + 1, msg })?;
        events.push(e);
    }
    Ok(Fixture {
        name,
        knot,
        code: validate_front(events)?,
    })
}

fn code(text: &str) -> FrontCode {
    let events = text
        .split(';')
        .map(|e| e.trim().parse::<FrontEvent>().unwrap())
        .collect();
    validate_front(events).unwrap()
}

/// The two-cusp unknot, tb = -1, rot = 0.
pub fn standard_unknot() -> FrontCode {
    code("CUSP L U; CUSP R D")
}

/// Left-handed trefoil with tb = -6, rot = -1, whose arcs carry the cusp words
/// (u_r, d_l), (d_r, u_l), (u_r, u_l).
pub fn left_trefoil() -> FrontCode {
    code(
        "CUSP R D; X 2 - O; CUSP L U; X 1 - U; \
         CUSP R U; X 3 - O; CUSP L D; X 2 - U; \
         CUSP R U; X 1 - O; CUSP L U; X 3 - U",
    )
}

/// Right-handed trefoil with tb = 1, rot = 0.
pub fn right_trefoil() -> FrontCode {
    code(
        "CUSP L U; CUSP R D; X 1 + U; X 2 + O; X 3 + U; \
         CUSP L D; CUSP R U; X 1 + O; X 2 + U; X 3 + O",
    )
}

/// `S₊^a S₋^b` applied to `code`, each zig-zag appended at the end.
pub fn stabilized(code: &FrontCode, positive: usize, negative: usize) -> FrontCode {
    let mut c = code.clone();
    for _ in 0..positive {
        c = c
            .stabilize(Sign::Pos, c.len())
            .expect("append keeps alternation");
    }
    for _ in 0..negative {
        c = c
            .stabilize(Sign::Neg, c.len())
            .expect("append keeps alternation");
    }
    c
}

/// The built-in fixture corpus. Several `(tb, rot)` values are shared by
/// more than one code, some across knot types.
pub fn builtin_fixtures() -> Vec<Fixture> {
    let unknot = standard_unknot();
    let lh = left_trefoil();
    let rh = right_trefoil();
    let s_pm_front = unknot
        .stabilize(Sign::Neg, 0)
        .and_then(|c| c.stabilize(Sign::Pos, 1))
        .expect("valid positions");
    let rh_s = rh
        .stabilize(Sign::Pos, 3)
        .and_then(|c| c.stabilize(Sign::Neg, 9))
        .expect("valid positions");
    vec![
        Fixture::new("unknot", Some("unknot"), unknot.clone()),
        Fixture::new("unknot_kinked", Some("unknot"), unknot.add_kink(1).unwrap()),
        Fixture::new("unknot_s+", Some("unknot"), stabilized(&unknot, 1, 0)),
        Fixture::new("unknot_s-", Some("unknot"), stabilized(&unknot, 0, 1)),
        Fixture::new("unknot_s+s-", Some("unknot"), stabilized(&unknot, 1, 1)),
        Fixture::new("unknot_s-s+", Some("unknot"), s_pm_front),
        Fixture::new("unknot_s+2s-3", Some("unknot"), stabilized(&unknot, 2, 3)),
        Fixture::new("unknot_s+3s-2", Some("unknot"), stabilized(&unknot, 3, 2)),
        Fixture::new("trefoil_lh", Some("trefoil_lh"), lh.clone()),
        Fixture::new(
            "trefoil_lh_kinked",
            Some("trefoil_lh"),
            lh.add_kink(6).unwrap(),
        ),
        Fixture::new("trefoil_lh_reversed", Some("trefoil_lh"), lh.reversed()),
        Fixture::new("trefoil_rh", Some("trefoil_rh"), rh.clone()),
        Fixture::new(
            "trefoil_rh_kinked",
            Some("trefoil_rh"),
            rh.add_kink(4).unwrap(),
        ),
        Fixture::new("trefoil_rh_s+s-", Some("trefoil_rh"), rh_s),
    ]
}

/// Fixture names grouped by classical invariants.
pub fn group_by_invariants(fixtures: &[Fixture]) -> BTreeMap<(i64, i64), Vec<String>> {
    let mut groups: BTreeMap<(i64, i64), Vec<String>> = BTreeMap::new();
    for f in fixtures {
        let inv = f.invariants();
        groups
            .entry((inv.tb, inv.rot))
            .or_default()
            .push(f.name.clone());
    }
    groups
}
