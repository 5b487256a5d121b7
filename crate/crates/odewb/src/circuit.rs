//! Leveled boolean circuits with unbounded fan-in, modular counting gates,
//! a strict normal form, and the derived connection-language tables.
//!
//! Normal form: level 0 holds inputs and negated inputs; for `e ≥ 1`,
//! levels `3e+1` are ∨, levels `3e+2` are ∧, and levels `3e` are MOD
//! (one modulus per level). Constants may sit at any level. Wires connect
//! consecutive levels only, and every output lives on the top level.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

pub type GateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Reads input bit `j` (LSB is bit 0).
    Input(usize),
    /// Reads the negation of input bit `j`.
    NegInput(usize),
    And,
    Or,
    /// Outputs 1 iff the number of 1-predecessors is ≡ 0 (mod p).
    ModP(u32),
    /// Outputs 1 iff more than half of the predecessors are 1.
    Maj,
    Const(bool),
}

impl GateKind {
    pub fn mnemonic(&self) -> String {
        match self {
            GateKind::Input(j) => format!("in {j}"),
            GateKind::NegInput(j) => format!("nin {j}"),
            GateKind::And => "and".into(),
            GateKind::Or => "or".into(),
            GateKind::ModP(p) => format!("mod {p}"),
            GateKind::Maj => "maj".into(),
            GateKind::Const(b) => format!("const {}", u8::from(*b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub level: usize,
    pub preds: Vec<GateId>,
}

/// A leveled circuit over `width` input bits. Gate ids index `gates`;
/// `outputs[t]` is the gate computing output bit `t` (LSB first).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    pub width: usize,
    pub gates: Vec<Gate>,
    pub outputs: Vec<GateId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {0} out of range")]
    BadGateId(GateId),
    #[error("input bit {0} out of range for width {1}")]
    BadInputBit(usize, usize),
    #[error("gate {gate}: {msg}")]
    NotNormalForm { gate: GateId, msg: String },
    #[error("circuit has no outputs")]
    NoOutputs,
    #[error("input value needs {needed} bits, width is {width}")]
    InputTooWide { needed: u64, width: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new(), outputs: Vec::new() }
    }

    pub fn push(&mut self, kind: GateKind, level: usize, preds: Vec<GateId>) -> GateId {
        self.gates.push(Gate { kind, level, preds });
        self.gates.len() - 1
    }

    pub fn depth(&self) -> usize {
        self.gates.iter().map(|g| g.level).max().unwrap_or(0)
    }

    /// Evaluate on an input bit vector (`input[j]` is bit `j`).
    pub fn eval_bits(&self, input: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if input.len() != self.width {
            return Err(CircuitError::InputTooWide {
                needed: input.len() as u64,
                width: self.width,
            });
        }
        let mut vals = vec![false; self.gates.len()];
        // levels are topological: evaluate in increasing level order
        let mut order: Vec<GateId> = (0..self.gates.len()).collect();
        order.sort_by_key(|&id| self.gates[id].level);
        for id in order {
            let gate = &self.gates[id];
            for &p in &gate.preds {
                if p >= self.gates.len() {
                    return Err(CircuitError::BadGateId(p));
                }
            }
            let ones = || gate.preds.iter().filter(|&&p| vals[p]).count();
            vals[id] = match gate.kind {
                GateKind::Input(j) => {
                    *input.get(j).ok_or(CircuitError::BadInputBit(j, self.width))?
                }
                GateKind::NegInput(j) => {
                    !*input.get(j).ok_or(CircuitError::BadInputBit(j, self.width))?
                }
                GateKind::And => ones() == gate.preds.len(),
                GateKind::Or => ones() > 0,
                GateKind::ModP(p) => ones() % p as usize == 0,
                GateKind::Maj => 2 * ones() > gate.preds.len(),
                GateKind::Const(b) => b,
            };
        }
        Ok(self.outputs.iter().map(|&id| vals[id]).collect())
    }

    /// Evaluate on a nonnegative integer, returning the output value with
    /// output bit `t` at weight `2^t`.
    pub fn eval_u64(&self, input: u64) -> Result<u64, CircuitError> {
        let needed = 64 - input.leading_zeros() as u64;
        if needed > self.width as u64 {
            return Err(CircuitError::InputTooWide { needed, width: self.width });
        }
        let bits: Vec<bool> = (0..self.width).map(|j| input >> j & 1 == 1).collect();
        let out = self.eval_bits(&bits)?;
        Ok(out
            .iter()
            .enumerate()
            .fold(0u64, |acc, (t, &b)| acc | (u64::from(b) << t)))
    }
}

/// The proper class of a level number: which gate kinds may live there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelClass {
    Inputs,
    Or,
    And,
    Mod,
}

pub fn level_class(level: usize) -> LevelClass {
    if level == 0 {
        LevelClass::Inputs
    } else {
        match level % 3 {
            1 => LevelClass::Or,
            2 => LevelClass::And,
            _ => LevelClass::Mod,
        }
    }
}

/// Check the normal form. Majority gates are reported as violations: the
/// normal form covers the modular-counting classes only.
pub fn validate_nf(c: &Circuit) -> Vec<CircuitError> {
    let mut errs = Vec::new();
    if c.outputs.is_empty() {
        errs.push(CircuitError::NoOutputs);
    }
    let top = c.depth();
    let mut level_mod: HashMap<usize, u32> = HashMap::new();
    for (id, gate) in c.gates.iter().enumerate() {
        let nf = |msg: String| CircuitError::NotNormalForm { gate: id, msg };
        let class = level_class(gate.level);
        match gate.kind {
            GateKind::Input(j) | GateKind::NegInput(j) => {
                if gate.level != 0 {
                    errs.push(nf(format!("input gate at level {}", gate.level)));
                }
                if j >= c.width {
                    errs.push(CircuitError::BadInputBit(j, c.width));
                }
                if !gate.preds.is_empty() {
                    errs.push(nf("input gate with predecessors".into()));
                }
            }
            GateKind::Or => {
                if class != LevelClass::Or {
                    errs.push(nf(format!("∨ gate at level {}", gate.level)));
                }
            }
            GateKind::And => {
                if class != LevelClass::And {
                    errs.push(nf(format!("∧ gate at level {}", gate.level)));
                }
            }
            GateKind::ModP(p) => {
                if class != LevelClass::Mod || gate.level == 0 {
                    errs.push(nf(format!("MOD gate at level {}", gate.level)));
                }
                if p < 2 {
                    errs.push(nf(format!("MOD modulus {p} must be ≥ 2")));
                }
                // the connection language describes wires as a set of
                // pairs, so MOD-gate fan-in must be a simple set
                let mut seen = gate.preds.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != gate.preds.len() {
                    errs.push(nf("MOD gate with duplicate predecessors".into()));
                }
                match level_mod.entry(gate.level) {
                    std::collections::hash_map::Entry::Occupied(o) if *o.get() != p => {
                        errs.push(nf(format!(
                            "MOD level {} mixes moduli {} and {p}",
                            gate.level,
                            o.get()
                        )));
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(p);
                    }
                    _ => {}
                }
            }
            GateKind::Maj => {
                errs.push(nf("majority gates are outside the normal form".into()));
            }
            GateKind::Const(_) => {
                if !gate.preds.is_empty() {
                    errs.push(nf("constant gate with predecessors".into()));
                }
            }
        }
        for &p in &gate.preds {
            if p >= c.gates.len() {
                errs.push(CircuitError::BadGateId(p));
                continue;
            }
            let pl = c.gates[p].level;
            if pl + 1 != gate.level {
                errs.push(nf(format!(
                    "edge from level {pl} to level {}; edges must join consecutive levels",
                    gate.level
                )));
            }
        }
    }
    for &o in &c.outputs {
        if o >= c.gates.len() {
            errs.push(CircuitError::BadGateId(o));
        } else if c.gates[o].level != top {
            errs.push(CircuitError::NotNormalForm {
                gate: o,
                msg: format!("output at level {}, top level is {top}", c.gates[o].level),
            });
        }
    }
    errs
}

/// Rewrite an arbitrary leveled circuit (letting `level` fields be
/// inconsistent) into normal form, preserving the computed function:
/// reassign levels by longest path, align each gate onto a level of its
/// proper class, and insert identity gadgets to bridge level gaps.
///
/// Identity gadgets: 1-ary ∨ and ∧, and a MOD-p gate with the wire plus
/// `p - 1` constant-1 pads (sum ≡ 0 mod p iff the wire is 1).
pub fn normalize(c: &Circuit) -> Result<Circuit, CircuitError> {
    normalize_with_map(c).map(|(out, _)| out)
}

/// [`normalize`], also returning for each gate of the result the source
/// gate it descends from (`None` for inserted gadget gates and pads).
pub fn normalize_with_map(c: &Circuit) -> Result<(Circuit, Vec<Option<GateId>>), CircuitError> {
    for gate in &c.gates {
        for &p in &gate.preds {
            if p >= c.gates.len() {
                return Err(CircuitError::BadGateId(p));
            }
        }
        if let GateKind::Maj = gate.kind {
            return Err(CircuitError::NotNormalForm {
                gate: c.gates.iter().position(|g| g == gate).unwrap_or(0),
                msg: "majority gates are outside the normal form".into(),
            });
        }
        if let GateKind::Input(j) | GateKind::NegInput(j) = gate.kind {
            if j >= c.width {
                return Err(CircuitError::BadInputBit(j, c.width));
            }
        }
    }
    // longest-path depth, ignoring declared levels
    let n = c.gates.len();
    let mut depth = vec![0usize; n];
    let mut state = vec![0u8; n]; // 0 unvisited, 1 in progress, 2 done
    fn dfs(c: &Circuit, id: GateId, depth: &mut [usize], state: &mut [u8]) -> Result<(), CircuitError> {
        if state[id] == 2 {
            return Ok(());
        }
        if state[id] == 1 {
            return Err(CircuitError::NotNormalForm { gate: id, msg: "wire cycle".into() });
        }
        state[id] = 1;
        let mut d = 0;
        for &p in &c.gates[id].preds {
            dfs(c, p, depth, state)?;
            d = d.max(depth[p] + 1);
        }
        depth[id] = d;
        state[id] = 2;
        Ok(())
    }
    for id in 0..n {
        dfs(c, id, &mut depth, &mut state)?;
    }

    // smallest level ≥ `at_least` whose class fits the kind
    let fit = |kind: &GateKind, at_least: usize| -> usize {
        let want = match kind {
            GateKind::Input(_) | GateKind::NegInput(_) => return 0,
            GateKind::Or => LevelClass::Or,
            GateKind::And => LevelClass::And,
            GateKind::ModP(_) => LevelClass::Mod,
            GateKind::Const(_) => return at_least, // any level fits
            GateKind::Maj => unreachable!(),
        };
        let mut lv = at_least.max(1);
        while level_class(lv) != want {
            lv += 1;
        }
        lv
    };

    let mut out = Circuit::new(c.width);
    let mut origin: Vec<Option<GateId>> = Vec::new();
    let mut placed: Vec<GateId> = vec![0; n];
    let mut placed_level: Vec<usize> = vec![0; n];
    // gadget chains are built lazily; (src gate in `out`, target level) → id
    let mut lifts: HashMap<(GateId, usize), GateId> = HashMap::new();
    // the single modulus of each MOD level, fixed by first use; gadget
    // levels take the circuit's modulus when it is unique so identity
    // lifts never introduce a foreign one
    let mut level_mod: HashMap<usize, u32> = HashMap::new();
    let default_mod: u32 = {
        let mut ms: Vec<u32> = c
            .gates
            .iter()
            .filter_map(|g| match g.kind {
                GateKind::ModP(p) => Some(p),
                _ => None,
            })
            .collect();
        ms.sort_unstable();
        ms.dedup();
        if ms.len() == 1 {
            ms[0]
        } else {
            2
        }
    };

    let mut order: Vec<GateId> = (0..n).collect();
    order.sort_by_key(|&id| depth[id]);

    // raise an already-placed gate to `level` with identity gadgets; a wire
    // through a MOD-q level becomes the wire plus q-1 constant-1 pads
    // (sum ≡ 0 mod q iff the wire is 1)
    fn lift(
        out: &mut Circuit,
        origin: &mut Vec<Option<GateId>>,
        lifts: &mut HashMap<(GateId, usize), GateId>,
        level_mod: &mut HashMap<usize, u32>,
        default_mod: u32,
        src: GateId,
        level: usize,
    ) -> GateId {
        let cur = out.gates[src].level;
        assert!(cur <= level);
        if cur == level {
            return src;
        }
        if let Some(&id) = lifts.get(&(src, level)) {
            return id;
        }
        let below = lift(out, origin, lifts, level_mod, default_mod, src, level - 1);
        let id = match level_class(level) {
            LevelClass::Or => {
                origin.push(None);
                out.push(GateKind::Or, level, vec![below])
            }
            LevelClass::And => {
                origin.push(None);
                out.push(GateKind::And, level, vec![below])
            }
            LevelClass::Mod => {
                let q = *level_mod.entry(level).or_insert(default_mod);
                let mut preds = vec![below];
                for _ in 0..q - 1 {
                    origin.push(None);
                    preds.push(out.push(GateKind::Const(true), level - 1, vec![]));
                }
                origin.push(None);
                out.push(GateKind::ModP(q), level, preds)
            }
            LevelClass::Inputs => unreachable!("cannot lift to level 0"),
        };
        lifts.insert((src, level), id);
        id
    }

    for id in order {
        let gate = &c.gates[id];
        let floor = gate
            .preds
            .iter()
            .map(|&p| placed_level[p] + 1)
            .max()
            .unwrap_or(0);
        let mut level = fit(&gate.kind, floor);
        if let GateKind::ModP(p) = gate.kind {
            // keep one modulus per MOD level
            while level_mod.get(&level).is_some_and(|&q| q != p) {
                level += 3;
            }
            level_mod.insert(level, p);
        }
        let preds: Vec<GateId> = gate
            .preds
            .iter()
            .map(|&p| lift(&mut out, &mut origin, &mut lifts, &mut level_mod, default_mod, placed[p], level - 1))
            .collect();
        origin.push(Some(id));
        let new_id = out.push(gate.kind, level, preds);
        placed[id] = new_id;
        placed_level[id] = level;
    }

    // pad every output up to a common top level
    let top = c
        .outputs
        .iter()
        .map(|&o| placed_level[o])
        .max()
        .unwrap_or(0)
        .max(out.depth());
    for &o in &c.outputs {
        let lifted = lift(&mut out, &mut origin, &mut lifts, &mut level_mod, default_mod, placed[o], top);
        out.outputs.push(lifted);
    }
    let errs = validate_nf(&out);
    if let Some(e) = errs.into_iter().next() {
        return Err(e);
    }
    debug_assert_eq!(origin.len(), out.gates.len());
    Ok((out, origin))
}

// ---------------------------------------------------------------------------
// connection-language tables

/// Per-level gate numbering of a normal-form circuit.
///
/// Level 0: the gate reading input bit `j` has number `j`, the gate reading
/// its negation has number `width + j`, and constant gates are numbered from
/// `2·width` up. Levels `e ≥ 1`: gates are numbered `0, 1, …` in id order;
/// on the top level, output bit `t` is arranged to be gate number `t`.
#[derive(Debug, Clone)]
pub struct ConnTable {
    pub width: usize,
    pub top_level: usize,
    /// `number[id]` = per-level number of gate `id`.
    pub number: Vec<usize>,
    /// `gates_at[e]` = gate ids on level `e`, indexed by number (level 0
    /// positions without a gate hold `None`).
    pub gates_at: Vec<Vec<Option<GateId>>>,
    /// `preds[e]` = set of (pred number at `e-1`, gate number at `e`).
    preds: Vec<std::collections::HashSet<(usize, usize)>>,
    l0_in: std::collections::HashSet<usize>,
    l0_neg: std::collections::HashSet<usize>,
    consts: Vec<HashMap<usize, bool>>,
}

impl ConnTable {
    pub fn is_pred(&self, e: usize, i: usize, t: usize) -> bool {
        self.preds.get(e).is_some_and(|s| s.contains(&(i, t)))
    }

    pub fn any_pred(&self, i: usize, t: usize) -> bool {
        self.preds.iter().any(|s| s.contains(&(i, t)))
    }

    pub fn l0_in(&self, t: usize) -> bool {
        self.l0_in.contains(&t)
    }

    pub fn l0_neg(&self, t: usize) -> bool {
        self.l0_neg.contains(&t)
    }

    pub fn level_mem(&self, e: usize, t: usize) -> bool {
        self.gates_at
            .get(e)
            .is_some_and(|v| t < v.len() && v[t].is_some())
    }

    pub fn const_mem(&self, e: usize, t: usize, value: bool) -> bool {
        self.consts
            .get(e)
            .is_some_and(|m| m.get(&t) == Some(&value))
    }

    pub fn count_at(&self, e: usize) -> usize {
        self.gates_at.get(e).map_or(0, |v| v.len())
    }

    /// Sorted (pred number, gate number) pairs of level `e`.
    pub fn pred_pairs(&self, e: usize) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.preds.get(e).map_or_else(Vec::new, |s| s.iter().copied().collect());
        v.sort_unstable();
        v
    }

    /// Sorted (pred number, gate number) pairs across all levels.
    pub fn all_pred_pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.preds.iter().flat_map(|s| s.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Sorted positions of level-0 gates reading an input bit directly.
    pub fn l0_in_list(&self) -> Vec<usize> {
        let mut v: Vec<_> = self.l0_in.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Sorted positions of level-0 gates reading a negated input bit.
    pub fn l0_neg_list(&self) -> Vec<usize> {
        let mut v: Vec<_> = self.l0_neg.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Sorted gate numbers present on level `e`.
    pub fn level_list(&self, e: usize) -> Vec<usize> {
        self.gates_at.get(e).map_or_else(Vec::new, |v| {
            v.iter()
                .enumerate()
                .filter(|(_, g)| g.is_some())
                .map(|(t, _)| t)
                .collect()
        })
    }

    /// Sorted numbers of constant gates of the given value on level `e`.
    pub fn const_list(&self, e: usize, value: bool) -> Vec<usize> {
        let mut v: Vec<_> = self
            .consts
            .get(e)
            .map_or_else(Vec::new, |m| m.iter().filter(|(_, &b)| b == value).map(|(&t, _)| t).collect());
        v.sort_unstable();
        v
    }
}

/// Number the gates of a normal-form circuit and tabulate the connection
/// language. Fails if the circuit is not in normal form.
pub fn make_conn_table(c: &Circuit) -> Result<ConnTable, CircuitError> {
    if let Some(e) = validate_nf(c).into_iter().next() {
        return Err(e);
    }
    let top = c.depth();
    let mut number = vec![usize::MAX; c.gates.len()];
    let mut gates_at: Vec<Vec<Option<GateId>>> = vec![Vec::new(); top + 1];
    let mut l0_in = std::collections::HashSet::new();
    let mut l0_neg = std::collections::HashSet::new();
    let mut consts: Vec<HashMap<usize, bool>> = vec![HashMap::new(); top + 1];

    // level 0: fixed positions for inputs and negated inputs
    gates_at[0] = vec![None; 2 * c.width];
    for (id, gate) in c.gates.iter().enumerate() {
        if gate.level != 0 {
            continue;
        }
        match gate.kind {
            GateKind::Input(j) => {
                number[id] = j;
                gates_at[0][j] = Some(id);
                l0_in.insert(j);
            }
            GateKind::NegInput(j) => {
                number[id] = c.width + j;
                gates_at[0][c.width + j] = Some(id);
                l0_neg.insert(c.width + j);
            }
            GateKind::Const(b) => {
                let t = gates_at[0].len();
                number[id] = t;
                gates_at[0].push(Some(id));
                consts[0].insert(t, b);
            }
            _ => unreachable!("normal form"),
        }
    }

    // top level: outputs take the leading numbers in output order
    let mut top_assigned: HashMap<GateId, usize> = HashMap::new();
    for (t, &o) in c.outputs.iter().enumerate() {
        if top_assigned.insert(o, t).is_some() {
            return Err(CircuitError::NotNormalForm {
                gate: o,
                msg: "gate drives two output positions; duplicate it first".into(),
            });
        }
    }

    for e in 1..=top {
        let mut ids: Vec<GateId> = (0..c.gates.len())
            .filter(|&id| c.gates[id].level == e)
            .collect();
        if e == top {
            // outputs first, in output order, then the rest in id order
            ids.sort_by_key(|id| (top_assigned.get(id).copied().unwrap_or(usize::MAX), *id));
        }
        for id in ids {
            let t = gates_at[e].len();
            number[id] = t;
            gates_at[e].push(Some(id));
            if let GateKind::Const(b) = c.gates[id].kind {
                consts[e].insert(t, b);
            }
        }
    }
    // outputs must have landed on their own numbers
    for (t, &o) in c.outputs.iter().enumerate() {
        debug_assert_eq!(number[o], t);
    }

    let mut preds: Vec<std::collections::HashSet<(usize, usize)>> =
        vec![std::collections::HashSet::new(); top + 1];
    for (id, gate) in c.gates.iter().enumerate() {
        for &p in &gate.preds {
            preds[gate.level].insert((number[p], number[id]));
        }
    }

    Ok(ConnTable {
        width: c.width,
        top_level: top,
        number,
        gates_at,
        preds,
        l0_in,
        l0_neg,
        consts,
    })
}

// ---------------------------------------------------------------------------
// text format

pub const CIRCUIT_HEADER: &str = "# odewb-circuit v1";

/// Serialize: header, `width w outputs id…`, then one `id level kind preds…`
/// line per gate.
pub fn write_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    s.push_str(CIRCUIT_HEADER);
    s.push('\n');
    s.push_str(&format!("width {} outputs", c.width));
    for &o in &c.outputs {
        let _ = write!(s, " {o}");
    }
    s.push('\n');
    for (id, gate) in c.gates.iter().enumerate() {
        let _ = write!(s, "{id} {} {}", gate.level, gate.kind.mnemonic());
        for &p in &gate.preds {
            let _ = write!(s, " {p}");
        }
        s.push('\n');
    }
    s
}

/// Parse the text format produced by [`write_circuit`].
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let err = |line: usize, msg: String| CircuitError::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    // a leading `#` line must be the version header; later ones are comments
    let mut peeked: Option<(usize, &str)> = lines.next();
    if let Some((line, l)) = peeked {
        if l.starts_with('#') {
            if l != CIRCUIT_HEADER {
                return Err(err(line, format!("unknown header `{l}`")));
            }
            peeked = lines.next();
        }
    }
    let lines = lines.filter(|(_, l)| !l.starts_with('#'));
    let Some((wline, wtext)) = peeked else {
        return Err(err(0, "empty circuit".into()));
    };
    let mut toks = wtext.split_whitespace();
    if toks.next() != Some("width") {
        return Err(err(wline, "expected `width w outputs id…`".into()));
    }
    let width: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(wline, "bad width".into()))?;
    if toks.next() != Some("outputs") {
        return Err(err(wline, "expected `outputs` after width".into()));
    }
    let mut c = Circuit::new(width);
    for t in toks {
        let o: usize = t
            .parse()
            .map_err(|_| err(wline, format!("bad output id `{t}`")))?;
        c.outputs.push(o);
    }

    let mut rows: Vec<(usize, GateId, Gate)> = Vec::new();
    for (ln, l) in lines {
        let mut toks = l.split_whitespace();
        let id: GateId = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln, "bad gate id".into()))?;
        let level: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln, "bad level".into()))?;
        let kind_tok = toks.next().ok_or_else(|| err(ln, "missing gate kind".into()))?;
        let mut arg = |name: &str| -> Result<usize, CircuitError> {
            toks.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(ln, format!("`{kind_tok}` needs a {name} argument")))
        };
        let kind = match kind_tok {
            "in" => GateKind::Input(arg("bit")?),
            "nin" => GateKind::NegInput(arg("bit")?),
            "and" => GateKind::And,
            "or" => GateKind::Or,
            "mod" => GateKind::ModP(arg("modulus")? as u32),
            "maj" => GateKind::Maj,
            "const" => GateKind::Const(arg("value")? != 0),
            other => return Err(err(ln, format!("unknown gate kind `{other}`"))),
        };
        let mut preds = Vec::new();
        for t in toks {
            preds.push(
                t.parse()
                    .map_err(|_| err(ln, format!("bad predecessor `{t}`")))?,
            );
        }
        rows.push((ln, id, Gate { kind, level, preds }));
    }
    let count = rows.len();
    c.gates = vec![
        Gate { kind: GateKind::Const(false), level: 0, preds: vec![] };
        count
    ];
    let mut seen = vec![false; count];
    for (ln, id, gate) in rows {
        if id >= count || seen[id] {
            return Err(err(ln, format!("gate id {id} out of order or duplicated")));
        }
        seen[id] = true;
        c.gates[id] = gate;
    }
    for &o in &c.outputs {
        if o >= count {
            return Err(CircuitError::BadGateId(o));
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::parity_circuit;

    #[test]
    fn parity_fixture_is_normal_and_correct() {
        for width in 2..=6 {
            let c = parity_circuit(width);
            assert!(validate_nf(&c).is_empty(), "width {width}: {:?}", validate_nf(&c));
            for x in 0u64..1 << width {
                let want = u64::from(x.count_ones() % 2);
                assert_eq!(c.eval_u64(x).unwrap(), want, "width {width}, x = {x}");
            }
        }
    }

    #[test]
    fn empty_fanin_conventions() {
        let mut c = Circuit::new(1);
        let a = c.push(GateKind::And, 2, vec![]);
        let o = c.push(GateKind::Or, 1, vec![]);
        let m = c.push(GateKind::ModP(3), 3, vec![]);
        c.outputs = vec![a, o, m];
        // not normal form (outputs at mixed levels) but evaluable
        let vals = c.eval_bits(&[false]).unwrap();
        assert_eq!(vals, vec![true, false, true]);
    }

    #[test]
    fn normalize_repairs_levels() {
        // an ∧ of two inputs at an arbitrary level, output not aligned
        let mut c = Circuit::new(2);
        let i0 = c.push(GateKind::Input(0), 0, vec![]);
        let i1 = c.push(GateKind::Input(1), 0, vec![]);
        let and = c.push(GateKind::And, 1, vec![i0, i1]); // ∧ on an ∨ level
        c.outputs.push(and);
        assert!(!validate_nf(&c).is_empty());
        let n = normalize(&c).unwrap();
        assert!(validate_nf(&n).is_empty(), "{:?}", validate_nf(&n));
        for x in 0u64..4 {
            assert_eq!(n.eval_u64(x).unwrap(), c.eval_u64(x).unwrap());
        }
    }

    #[test]
    fn normalize_bridges_mod_levels() {
        // force a lift across a MOD level: ∨ whose predecessors sit at
        // distance 4 (input → ∨ → ∧ → MOD → ∨)
        let mut c = Circuit::new(2);
        let i0 = c.push(GateKind::Input(0), 0, vec![]);
        let i1 = c.push(GateKind::Input(1), 0, vec![]);
        let a = c.push(GateKind::Or, 1, vec![i0, i1]);
        let b = c.push(GateKind::And, 2, vec![a]);
        let m = c.push(GateKind::ModP(2), 3, vec![b]); // [Σ ≡ 0 mod 2] of 1 wire = ¬wire
        let top = c.push(GateKind::Or, 4, vec![m, /* stale level */ i0]);
        c.outputs.push(top);
        assert!(!validate_nf(&c).is_empty());
        let n = normalize(&c).unwrap();
        assert!(validate_nf(&n).is_empty(), "{:?}", validate_nf(&n));
        for x in 0u64..4 {
            assert_eq!(n.eval_u64(x).unwrap(), c.eval_u64(x).unwrap(), "x = {x}");
        }
    }

    #[test]
    fn conn_table_numbering() {
        let c = parity_circuit(3);
        let t = make_conn_table(&c).unwrap();
        assert_eq!(t.width, 3);
        assert_eq!(t.top_level, 3);
        // negated inputs occupy numbers width..2·width at level 0
        assert!(t.l0_neg(3) && t.l0_neg(4) && t.l0_neg(5));
        assert!(!t.l0_in(0), "parity fixture has no positive input gates");
        // the single output is gate number 0 on the top level
        assert!(t.level_mem(3, 0));
        assert!(!t.level_mem(3, 1));
        // every top gate's predecessors are reported
        assert!((0..t.count_at(2)).any(|i| t.is_pred(3, i, 0)));
        assert!(!t.is_pred(3, 999, 0), "off-range query is false");
    }

    #[test]
    fn text_roundtrip() {
        let c = parity_circuit(4);
        let text = write_circuit(&c);
        assert!(text.starts_with(CIRCUIT_HEADER));
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_circuit("width x outputs 0").is_err());
        assert!(parse_circuit("# odewb-circuit v2\nwidth 1 outputs 0\n0 0 in 0").is_err());
        assert!(parse_circuit("width 1 outputs 0\n0 0 frob 0").is_err());
    }

    #[test]
    fn maj_flagged_by_validate() {
        let mut c = Circuit::new(2);
        let i0 = c.push(GateKind::Input(0), 0, vec![]);
        let m = c.push(GateKind::Maj, 1, vec![i0]);
        c.outputs.push(m);
        let errs = validate_nf(&c);
        assert!(errs
            .iter()
            .any(|e| e.to_string().contains("majority")), "{errs:?}");
    }
}
