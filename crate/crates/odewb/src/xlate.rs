//! Bidirectional compiler between normal-form circuits and schema programs.
//!
//! Forward: a circuit becomes a program whose definitions evaluate the
//! per-level gate values through the connection-language symbols — bounded
//! scans implement ∨/∧ levels and mod-n counting schemas implement MOD
//! levels, with a final derivation collecting the output bits.
//!
//! Backward: an in-fragment program (core basics, composition, the
//! bit-shift schema and the mod-n counting schema) is lowered to a leveled
//! circuit. Every intermediate value is a dual-rail bit bundle (each bit
//! carries its complement, since the normal form has no negation gates)
//! in two's complement at a statically inferred width.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::circuit::{
    make_conn_table, normalize_with_map, validate_nf, Circuit, CircuitError, ConnTable, GateId,
    GateKind,
};
use crate::engine::{
    alpha, Basic, ConnQuery, EvalError, Evaluator, FunctionBody, Program,
    ProgramBuilder, SchemaKind, Term,
};
use crate::stdlib::{define_sb_min01, define_sb_mu};

#[derive(Debug, Error)]
pub enum XlateError {
    #[error("MOD levels use more than one modulus")]
    MixedModuli,
    #[error("circuit is not in normal form: {0}")]
    NotNormalForm(CircuitError),
    #[error("schema outside the lowerable fragment: {0}")]
    UnsupportedSchema(String),
    #[error("symbol outside the lowerable fragment: {0}")]
    UnsupportedSymbol(String),
    #[error("width overflow: {0}")]
    WidthOverflow(String),
    #[error("program does not validate: {0}")]
    InvalidProgram(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

// ---------------------------------------------------------------------------
// forward: circuit → algebra

/// A program compiled from a circuit. The entry takes `(y, x)`: `x` is the
/// circuit input and the driver `y` selects how many output positions are
/// emitted; `driver` is the canonical value (length = number of outputs).
/// The auxiliary definition `main(x)` applies the canonical driver.
#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub program: Program,
    pub width: usize,
    pub driver: BigInt,
    pub notes: Vec<String>,
}

impl CompiledProgram {
    /// Evaluate on a circuit input with the canonical driver.
    pub fn eval_input(&self, ev: &mut Evaluator<'_>, x: &BigInt) -> Result<BigInt, EvalError> {
        let entry = self.program.entry.as_deref().unwrap_or("eval_out");
        ev.eval(entry, &[self.driver.clone(), x.clone()])
    }
}

fn apply(name: &str, args: Vec<Term>) -> Term {
    Term::Call(name.to_string(), args)
}

/// Compile a normal-form circuit into a program over the core basics plus
/// the circuit's connection-language symbols. `k_exp` is the exponent of
/// the nominal `ℓ(x)^k` bound family; scan bounds are instantiated from the
/// actual per-level gate counts, so it is recorded in the notes only.
pub fn circuit_to_algebra(c: &Circuit, k_exp: u32) -> Result<CompiledProgram, XlateError> {
    if let Some(e) = validate_nf(c).into_iter().next() {
        return Err(XlateError::NotNormalForm(e));
    }
    let mut moduli: Vec<u32> = c
        .gates
        .iter()
        .filter_map(|g| match g.kind {
            GateKind::ModP(p) => Some(p),
            _ => None,
        })
        .collect();
    moduli.sort_unstable();
    moduli.dedup();
    if moduli.len() > 1 {
        return Err(XlateError::MixedModuli);
    }
    let table = make_conn_table(c)?;
    let top = table.top_level;
    let width = c.width;
    let m = c.outputs.len();
    let mut notes = vec![format!("compiled from a {width}-bit circuit, nominal bound ℓ(x)^{k_exp}")];

    let mut b = ProgramBuilder::new();
    b.define("l0in", 2, FunctionBody::Basic(Basic::Conn(ConnQuery::L0In)));
    b.define("l0neg", 2, FunctionBody::Basic(Basic::Conn(ConnQuery::L0Neg)));
    b.define("lc1_0", 2, FunctionBody::Basic(Basic::Conn(ConnQuery::Const1At(0))));

    // level 0: input bits, negated input bits and constants by position
    let t = || Term::Arg(0);
    let x = || Term::Arg(1);
    // t − width·[t ≥ width], the read position of a negated-input gate,
    // with the constant multiple expressed by repeated addition
    let guard = Term::sg(Term::sub(Term::add(t(), Term::int(1)), Term::int(width as i64)));
    let mut shift = Term::int(0);
    for _ in 0..width {
        shift = Term::add(shift, guard.clone());
    }
    let eval0 = Term::bor(
        Term::band(apply("l0in", vec![t(), x()]), Term::bit(t(), x())),
        Term::bor(
            Term::band(
                apply("l0neg", vec![t(), x()]),
                Term::cosg(Term::bit(Term::sub(t(), shift), x())),
            ),
            apply("lc1_0", vec![t(), x()]),
        ),
    );
    b.define_term("eval_0", 2, &eval0);
    notes.push("eval_0: level-0 positions read from the input word".into());

    for e in 1..=top {
        let prev = format!("eval_{}", e - 1);
        let scan_driver = alpha(table.count_at(e - 1) as i64);
        let cpred = format!("cpred_{e}");
        b.define(&cpred, 3, FunctionBody::Basic(Basic::Conn(ConnQuery::Pred(e))));
        let lc0 = format!("lc0_{e}");
        let lc1 = format!("lc1_{e}");
        b.define(&lc0, 2, FunctionBody::Basic(Basic::Conn(ConnQuery::Const0At(e))));
        b.define(&lc1, 2, FunctionBody::Basic(Basic::Conn(ConnQuery::Const1At(e))));
        // predecessor selector as a predicate of (i, t, x)
        let sel = format!("sel_{e}");
        b.define_term(
            &sel,
            3,
            &apply(&cpred, vec![Term::Arg(2), Term::Arg(0), Term::Arg(1)]),
        );

        let raw: Term = match crate::circuit::level_class(e) {
            crate::circuit::LevelClass::And => {
                // ∧ = sharply bounded min of the predecessor values
                let gets = format!("get_{e}");
                b.define_term(&gets, 3, &apply(&prev, vec![Term::Arg(0), Term::Arg(2)]));
                let min = format!("min_{e}");
                define_sb_min01(&mut b, &min, &gets, &sel, 2);
                notes.push(format!("eval_{e}: ∧ level as bounded min over {} scans", table.count_at(e - 1)));
                apply(&min, vec![Term::Int(scan_driver.clone()), t(), x()])
            }
            crate::circuit::LevelClass::Or => {
                // ∨ = 1 − min of the complemented predecessor values
                let gets = format!("get_{e}");
                b.define_term(
                    &gets,
                    3,
                    &Term::cosg(apply(&prev, vec![Term::Arg(0), Term::Arg(2)])),
                );
                let min = format!("min_{e}");
                define_sb_min01(&mut b, &min, &gets, &sel, 2);
                notes.push(format!("eval_{e}: ∨ level by duality of the bounded min"));
                Term::cosg(apply(&min, vec![Term::Int(scan_driver.clone()), t(), x()]))
            }
            crate::circuit::LevelClass::Mod => {
                let n = moduli[0];
                // count the 1-predecessors modulo n with the counting schema
                let zg = format!("cnt_g_{e}");
                b.define(&zg, 2, FunctionBody::Basic(Basic::Zero));
                let ck = format!("cnt_k_{e}");
                b.define_term(
                    &ck,
                    3,
                    &Term::band(
                        apply(&cpred, vec![Term::Arg(2), Term::len(Term::Arg(0)), Term::Arg(1)]),
                        apply(&prev, vec![Term::len(Term::Arg(0)), Term::Arg(2)]),
                    ),
                );
                let cnt = format!("cnt_{e}");
                b.define(
                    &cnt,
                    3,
                    FunctionBody::Schema { kind: SchemaKind::NOde { n }, g: zg, steps: vec![ck] },
                );
                notes.push(format!("eval_{e}: MOD-{n} level via the mod-{n} counting schema"));
                // the gate fires iff the count ≡ 0 (mod n)
                Term::cosg(Term::sg(apply(&cnt, vec![Term::Int(scan_driver.clone()), t(), x()])))
            }
            crate::circuit::LevelClass::Inputs => unreachable!("e ≥ 1"),
        };
        // constant gates override the class formula
        let consts01 = Term::bor(apply(&lc0, vec![t(), x()]), apply(&lc1, vec![t(), x()]));
        let wrapped = Term::bor(
            apply(&lc1, vec![t(), x()]),
            Term::band(Term::cosg(consts01), raw),
        );
        b.define_term(&format!("eval_{e}"), 2, &wrapped);
    }

    // output assembly: one bit per length change of the driver, most
    // significant output position first; positions ≥ m emit 0
    let evtop = format!("eval_{top}");
    // least i with i ≥ (m−1) − ℓ(w): clamps the position index at 0
    let ridx = "out_idx_r";
    b.define_term(
        ridx,
        2,
        &Term::sg(Term::sub(
            Term::add(Term::add(Term::Arg(0), Term::int(2)), Term::len(Term::Arg(1))),
            Term::int(m as i64),
        )),
    );
    define_sb_mu(&mut b, "out_idx", ridx, 1);
    let idx = apply("out_idx", vec![Term::Int(alpha(m as i64 - 1)), Term::Arg(0)]);
    let k_out = Term::band(
        Term::sg(Term::sub(Term::int(m as i64), Term::len(Term::Arg(0)))),
        apply(&evtop, vec![idx, Term::Arg(1)]),
    );
    b.define_term("out_k", 2, &k_out);
    b.define("out_g", 1, FunctionBody::Basic(Basic::Zero));
    b.define(
        "eval_out",
        2,
        FunctionBody::Schema { kind: SchemaKind::Ode1, g: "out_g".into(), steps: vec!["out_k".into()] },
    );
    let driver = alpha(m as i64);
    b.define_term("main", 1, &apply("eval_out", vec![Term::Int(driver.clone()), Term::Arg(0)]));
    notes.push(format!("eval_out: collects the {m} output bits; canonical driver α({m})"));

    let mut program = b.finish("eval_out");
    program.conn = Some(std::sync::Arc::new(table));
    let diags = crate::engine::validate(&program);
    debug_assert!(diags.is_empty(), "compiled program must validate: {diags:?}");
    Ok(CompiledProgram { program, width, driver, notes })
}

// ---------------------------------------------------------------------------
// backward: algebra → circuit

/// A circuit lowered from a program. `width` is the bit width of each of
/// the `args` entry arguments (argument `i` occupies input bits
/// `i·width .. (i+1)·width`, least significant first); output bit `t` of
/// the program value is circuit output `t`.
#[derive(Debug, Clone)]
pub struct LoweredCircuit {
    pub circuit: Circuit,
    pub width: usize,
    pub args: usize,
    pub depth: usize,
    /// Per-gate origin notes ("level-alignment gadget" for normalization
    /// inserts).
    pub provenance: Vec<String>,
    /// (modulus, MOD gates emitted) per lowered counting-schema instance.
    pub mod_instances: Vec<(u32, usize)>,
}

impl LoweredCircuit {
    pub fn eval_args(&self, args: &[u64]) -> Result<BigInt, XlateError> {
        assert_eq!(args.len(), self.args);
        let mut bits = Vec::with_capacity(self.args * self.width);
        for &a in args {
            for j in 0..self.width {
                bits.push(a >> j & 1 == 1);
            }
        }
        let out = self.circuit.eval_bits(&bits)?;
        let mut v = BigInt::zero();
        for (t, &bit) in out.iter().enumerate() {
            if bit {
                v.set_bit(t as u64, true);
            }
        }
        Ok(v)
    }
}

const WIDTH_CAP: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Wire {
    pos: GateId,
    neg: GateId,
}

/// A two's complement bit bundle (LSB first) with its exact value range.
/// Bits beyond the stored width repeat the top bit when `lo < 0` and are
/// zero otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bundle {
    bits: Vec<Wire>,
    lo: BigInt,
    hi: BigInt,
}

impl Bundle {
    fn signed(&self) -> bool {
        self.lo.is_negative()
    }
}

fn tc_width(lo: &BigInt, hi: &BigInt) -> Result<usize, XlateError> {
    assert!(lo <= hi);
    let w = if lo.is_negative() {
        let neg_bits = (-lo - 1u8).bits() as usize;
        let pos_bits = if hi.is_negative() { 0 } else { hi.bits() as usize };
        1 + neg_bits.max(pos_bits)
    } else {
        (hi.bits() as usize).max(1)
    };
    if w > WIDTH_CAP {
        return Err(XlateError::WidthOverflow(format!(
            "value range [{lo}, {hi}] needs {w} bits (cap {WIDTH_CAP})"
        )));
    }
    Ok(w)
}

struct Lowerer<'p> {
    prog: &'p Program,
    circuit: Circuit,
    notes: Vec<String>,
    ctx: Vec<String>,
    gate_memo: HashMap<(GateKind, Vec<GateId>), GateId>,
    konst: HashMap<GateId, bool>,
    def_memo: HashMap<(usize, Vec<Bundle>), Bundle>,
    mod_instances: Vec<(u32, usize)>,
}

impl<'p> Lowerer<'p> {
    fn new(prog: &'p Program, width: usize, args: usize) -> Self {
        Lowerer {
            prog,
            circuit: Circuit::new(args * width),
            notes: Vec::new(),
            ctx: vec!["entry".into()],
            gate_memo: HashMap::new(),
            konst: HashMap::new(),
            def_memo: HashMap::new(),
            mod_instances: Vec::new(),
        }
    }

    /// Push a gate without structural dedup (for MOD fan-in, which the
    /// normal form requires to be a simple set of distinct wires).
    fn fresh_gate(&mut self, kind: GateKind, preds: Vec<GateId>) -> GateId {
        let id = self.circuit.push(kind, 0, preds);
        self.notes.push(self.ctx.last().cloned().unwrap_or_default());
        id
    }

    fn gate(&mut self, kind: GateKind, preds: Vec<GateId>) -> GateId {
        let key = (kind, preds.clone());
        if let Some(&id) = self.gate_memo.get(&key) {
            return id;
        }
        let id = self.circuit.push(kind, 0, preds);
        self.notes.push(self.ctx.last().cloned().unwrap_or_default());
        if let GateKind::Const(b) = kind {
            self.konst.insert(id, b);
        }
        self.gate_memo.insert(key, id);
        id
    }

    fn wconst(&mut self, b: bool) -> Wire {
        Wire { pos: self.gate(GateKind::Const(b), vec![]), neg: self.gate(GateKind::Const(!b), vec![]) }
    }

    fn wval(&self, w: Wire) -> Option<bool> {
        self.konst.get(&w.pos).copied()
    }

    fn wnot(&self, w: Wire) -> Wire {
        Wire { pos: w.neg, neg: w.pos }
    }

    fn wand(&mut self, ws: &[Wire]) -> Wire {
        let mut live = Vec::new();
        for &w in ws {
            match self.wval(w) {
                Some(false) => return self.wconst(false),
                Some(true) => {}
                None => live.push(w),
            }
        }
        live.sort_unstable_by_key(|w| w.pos);
        live.dedup();
        match live.len() {
            0 => self.wconst(true),
            1 => live[0],
            _ => Wire {
                pos: self.gate(GateKind::And, live.iter().map(|w| w.pos).collect()),
                neg: self.gate(GateKind::Or, live.iter().map(|w| w.neg).collect()),
            },
        }
    }

    fn wor(&mut self, ws: &[Wire]) -> Wire {
        let flipped: Vec<Wire> = ws.iter().map(|&w| self.wnot(w)).collect();
        let a = self.wand(&flipped);
        self.wnot(a)
    }

    fn wxor(&mut self, a: Wire, b: Wire) -> Wire {
        match (self.wval(a), self.wval(b)) {
            (Some(va), _) => {
                if va {
                    self.wnot(b)
                } else {
                    b
                }
            }
            (_, Some(vb)) => {
                if vb {
                    self.wnot(a)
                } else {
                    a
                }
            }
            _ => {
                let nb = self.wnot(b);
                let na = self.wnot(a);
                let l = self.wand(&[a, nb]);
                let r = self.wand(&[na, b]);
                self.wor(&[l, r])
            }
        }
    }

    // --- bundles ---

    fn bconst(&mut self, v: &BigInt) -> Result<Bundle, XlateError> {
        let w = tc_width(v, v)?;
        let repr = v.mod_floor(&(BigInt::one() << w));
        let bits = (0..w).map(|i| self.wconst(repr.bit(i as u64))).collect();
        Ok(Bundle { bits, lo: v.clone(), hi: v.clone() })
    }

    fn bit_at(&mut self, b: &Bundle, i: usize) -> Wire {
        if i < b.bits.len() {
            b.bits[i]
        } else if b.signed() {
            *b.bits.last().expect("bundles are nonempty")
        } else {
            self.wconst(false)
        }
    }

    /// Shared adder: `a + b + cin` or `a - b - (1 - cin)` when `negate_b`.
    fn badd_core(
        &mut self,
        a: &Bundle,
        b: &Bundle,
        negate_b: bool,
        cin: bool,
        lo: BigInt,
        hi: BigInt,
    ) -> Result<Bundle, XlateError> {
        let w = tc_width(&lo, &hi)?;
        let mut p = Vec::with_capacity(w);
        let mut g = Vec::with_capacity(w);
        for i in 0..w {
            let xi = self.bit_at(a, i);
            let yi = {
                let raw = self.bit_at(b, i);
                if negate_b {
                    self.wnot(raw)
                } else {
                    raw
                }
            };
            p.push(self.wxor(xi, yi));
            g.push(self.wand(&[xi, yi]));
        }
        let cin_w = self.wconst(cin);
        let mut bits = Vec::with_capacity(w);
        let mut carry = cin_w;
        for i in 0..w {
            bits.push(self.wxor(p[i], carry));
            if i + 1 < w {
                // carry lookahead: c_{i+1} = OR_j (g_j ∧ p_{j+1..i}) ∨ (cin ∧ p_{0..i})
                let mut terms = Vec::with_capacity(i + 2);
                for j in 0..=i {
                    let mut conj = vec![g[j]];
                    conj.extend_from_slice(&p[j + 1..=i]);
                    terms.push(self.wand(&conj));
                }
                let mut conj = vec![cin_w];
                conj.extend_from_slice(&p[0..=i]);
                terms.push(self.wand(&conj));
                carry = self.wor(&terms);
            }
        }
        Ok(Bundle { bits, lo, hi })
    }

    fn badd(&mut self, a: &Bundle, b: &Bundle) -> Result<Bundle, XlateError> {
        let (lo, hi) = (&a.lo + &b.lo, &a.hi + &b.hi);
        self.badd_core(a, b, false, false, lo, hi)
    }

    fn bsub(&mut self, a: &Bundle, b: &Bundle) -> Result<Bundle, XlateError> {
        let (lo, hi) = (&a.lo - &b.hi, &a.hi - &b.lo);
        self.badd_core(a, b, true, true, lo, hi)
    }

    fn bdiv2(&mut self, a: &Bundle) -> Result<Bundle, XlateError> {
        let lo = a.lo.div_floor(&BigInt::from(2));
        let hi = a.hi.div_floor(&BigInt::from(2));
        let w = tc_width(&lo, &hi)?;
        let bits = (0..w).map(|i| self.bit_at(a, i + 1)).collect();
        Ok(Bundle { bits, lo, hi })
    }

    fn bsg(&mut self, a: &Bundle) -> Result<Bundle, XlateError> {
        if a.lo.is_positive() {
            return self.bconst(&BigInt::one());
        }
        if !a.hi.is_positive() {
            return self.bconst(&BigInt::zero());
        }
        let nonzero = self.wor(&a.bits.clone());
        let wire = if a.signed() {
            let sign = *a.bits.last().unwrap();
            let nsign = self.wnot(sign);
            self.wand(&[nsign, nonzero])
        } else {
            nonzero
        };
        Ok(Bundle { bits: vec![wire], lo: BigInt::zero(), hi: BigInt::one() })
    }

    fn bcosg(&mut self, a: &Bundle) -> Result<Bundle, XlateError> {
        let s = self.bsg(a)?;
        if s.lo == s.hi {
            return self.bconst(&(BigInt::one() - &s.lo));
        }
        Ok(Bundle { bits: vec![self.wnot(s.bits[0])], lo: BigInt::zero(), hi: BigInt::one() })
    }

    fn require_nonneg(&self, a: &Bundle, what: &str) -> Result<(), XlateError> {
        if a.lo.is_negative() {
            return Err(XlateError::UnsupportedSymbol(format!(
                "{what} needs a provably nonnegative argument (inferred range [{}, {}])",
                a.lo, a.hi
            )));
        }
        Ok(())
    }

    /// `eq[ν] = [value has binary length ν]`, exhaustive for ν = 0..=w.
    fn len_eqs(&mut self, a: &Bundle) -> Result<Vec<Wire>, XlateError> {
        self.require_nonneg(a, "ℓ")?;
        let w = a.bits.len();
        let mut eqs = Vec::with_capacity(w + 1);
        for v in 0..=w {
            let mut conj = Vec::new();
            if v > 0 {
                conj.push(a.bits[v - 1]);
            }
            for k in v..w {
                conj.push(self.wnot(a.bits[k]));
            }
            eqs.push(self.wand(&conj));
        }
        Ok(eqs)
    }

    fn blen(&mut self, a: &Bundle) -> Result<Bundle, XlateError> {
        let eqs = self.len_eqs(a)?;
        let lo = BigInt::from(crate::engine::len_int(&a.lo));
        let hi = BigInt::from(crate::engine::len_int(&a.hi));
        let w = tc_width(&lo, &hi)?;
        let mut bits = Vec::with_capacity(w);
        for j in 0..w {
            let set: Vec<Wire> = eqs
                .iter()
                .enumerate()
                .filter(|(v, _)| v >> j & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            bits.push(self.wor(&set));
        }
        Ok(Bundle { bits, lo, hi })
    }

    /// `[a = v]` for a constant `v ≥ 0`.
    fn beq_const(&mut self, a: &Bundle, v: usize) -> Wire {
        let v = BigInt::from(v);
        if v < a.lo || v > a.hi {
            return self.wconst(false);
        }
        let span = a.bits.len().max(v.bits() as usize) + usize::from(a.signed());
        let mut conj = Vec::with_capacity(span);
        for i in 0..span {
            let bit = self.bit_at(a, i);
            conj.push(if v.bit(i as u64) { bit } else { self.wnot(bit) });
        }
        self.wand(&conj)
    }

    fn bbit(&mut self, i: &Bundle, x: &Bundle) -> Result<Bundle, XlateError> {
        self.require_nonneg(i, "BIT")?;
        self.require_nonneg(x, "BIT")?;
        let mut terms = Vec::new();
        for p in 0..x.bits.len() {
            let e = self.beq_const(i, p);
            let bp = x.bits[p];
            terms.push(self.wand(&[e, bp]));
        }
        let wire = self.wor(&terms);
        let (lo, hi) = match self.wval(wire) {
            Some(b) => (BigInt::from(u8::from(b)), BigInt::from(u8::from(b))),
            None => (BigInt::zero(), BigInt::one()),
        };
        Ok(Bundle { bits: vec![wire], lo, hi })
    }

    fn bsmash(&mut self, x: &Bundle, y: &Bundle) -> Result<Bundle, XlateError> {
        self.require_nonneg(x, "#")?;
        self.require_nonneg(y, "#")?;
        let eqs = self.len_eqs(y)?;
        let shift = |v: &BigInt, b: &BigInt| (v << crate::engine::len_int(b)) + b;
        let lo = shift(&x.lo, &y.lo);
        let hi = shift(&x.hi, &y.hi);
        let w = tc_width(&lo, &hi)?;
        let mut bits = Vec::with_capacity(w);
        for j in 0..w {
            let mut terms = Vec::new();
            // y contributes bit j while j < ℓ(y)
            if j < y.bits.len() {
                let above: Vec<Wire> = eqs[j + 1..].to_vec();
                let ge = self.wor(&above);
                let yb = y.bits[j];
                terms.push(self.wand(&[yb, ge]));
            }
            // x contributes bit j − ℓ(y)
            for (v, &e) in eqs.iter().enumerate() {
                if v <= j && j - v < x.bits.len() {
                    let xb = x.bits[j - v];
                    terms.push(self.wand(&[e, xb]));
                }
            }
            bits.push(self.wor(&terms));
        }
        Ok(Bundle { bits, lo, hi })
    }

    /// Select among `(selector, value)` arms; the selectors must be
    /// exhaustive and mutually exclusive (a length decode).
    fn bmux(&mut self, arms: &[(Wire, Bundle)]) -> Result<Bundle, XlateError> {
        assert!(!arms.is_empty());
        let lo = arms.iter().map(|(_, b)| b.lo.clone()).min().unwrap();
        let hi = arms.iter().map(|(_, b)| b.hi.clone()).max().unwrap();
        let w = tc_width(&lo, &hi)?;
        let mut bits = Vec::with_capacity(w);
        for j in 0..w {
            let mut terms = Vec::with_capacity(arms.len());
            for (sel, b) in arms {
                let bj = self.bit_at(b, j);
                terms.push(self.wand(&[*sel, bj]));
            }
            bits.push(self.wor(&terms));
        }
        Ok(Bundle { bits, lo, hi })
    }

    // --- definitions ---

    fn lower_call(&mut self, name: &str, args: Vec<Bundle>) -> Result<Bundle, XlateError> {
        let idx = self
            .prog
            .index_of(name)
            .ok_or_else(|| XlateError::InvalidProgram(format!("unknown function `{name}`")))?;
        let key = (idx, args.clone());
        if let Some(b) = self.def_memo.get(&key) {
            return Ok(b.clone());
        }
        self.ctx.push(name.to_string());
        let def = &self.prog.defs[idx];
        let out = match def.body.clone() {
            FunctionBody::Basic(basic) => self.lower_basic(&basic, &args),
            FunctionBody::Compose { outer, inners } => {
                let mut vals = Vec::with_capacity(inners.len());
                for inner in &inners {
                    vals.push(self.lower_call(inner, args.clone())?);
                }
                self.lower_call(&outer, vals)
            }
            FunctionBody::Schema { kind, g, steps } => match kind {
                SchemaKind::Ode1 => self.lower_ode1(&g, &steps[0], &args),
                SchemaKind::NOde { n } => self.lower_node(n, &g, &steps[0], &args),
                other => Err(XlateError::UnsupportedSchema(format!(
                    "`{}` uses schema `{}`",
                    def.name,
                    other.name()
                ))),
            },
        }?;
        self.ctx.pop();
        self.def_memo.insert(key, out.clone());
        Ok(out)
    }

    fn lower_basic(&mut self, basic: &Basic, args: &[Bundle]) -> Result<Bundle, XlateError> {
        match basic {
            Basic::Zero => self.bconst(&BigInt::zero()),
            Basic::One => self.bconst(&BigInt::one()),
            Basic::Const(c) => self.bconst(&c.clone()),
            Basic::Proj(i) => Ok(args[*i].clone()),
            Basic::Sg => self.bsg(&args[0].clone()),
            Basic::Cosg => self.bcosg(&args[0].clone()),
            Basic::Len => self.blen(&args[0].clone()),
            Basic::Add => self.badd(&args[0].clone(), &args[1].clone()),
            Basic::Sub => self.bsub(&args[0].clone(), &args[1].clone()),
            Basic::Div2 => self.bdiv2(&args[0].clone()),
            Basic::Bit => self.bbit(&args[0].clone(), &args[1].clone()),
            Basic::Smash => self.bsmash(&args[0].clone(), &args[1].clone()),
            Basic::Conn(q) => self.lower_conn(*q, args),
            Basic::Mul | Basic::Div | Basic::Alpha => Err(XlateError::UnsupportedSymbol(
                format!("basic symbol outside the core set: {basic:?}"),
            )),
        }
    }

    fn table(&self) -> Result<&ConnTable, XlateError> {
        self.prog
            .conn
            .as_deref()
            .ok_or_else(|| XlateError::UnsupportedSymbol("connection symbols need a table".into()))
    }

    fn lower_conn(&mut self, q: ConnQuery, args: &[Bundle]) -> Result<Bundle, XlateError> {
        // membership is a finite table: OR of equality tests
        let or_eq_set = |l: &mut Self, arg: &Bundle, set: Vec<usize>| -> Result<Bundle, XlateError> {
            let mut terms = Vec::with_capacity(set.len());
            for t in set {
                terms.push(l.beq_const(arg, t));
            }
            let wire = l.wor(&terms);
            let (lo, hi) = match l.wval(wire) {
                Some(b) => (BigInt::from(u8::from(b)), BigInt::from(u8::from(b))),
                None => (BigInt::zero(), BigInt::one()),
            };
            Ok(Bundle { bits: vec![wire], lo, hi })
        };
        let or_eq_pairs = |l: &mut Self, a: &Bundle, b: &Bundle, pairs: Vec<(usize, usize)>| {
            let mut terms = Vec::with_capacity(pairs.len());
            for (i, t) in pairs {
                let ei = l.beq_const(a, i);
                let et = l.beq_const(b, t);
                terms.push(l.wand(&[ei, et]));
            }
            let wire = l.wor(&terms);
            let (lo, hi) = match l.wval(wire) {
                Some(bv) => (BigInt::from(u8::from(bv)), BigInt::from(u8::from(bv))),
                None => (BigInt::zero(), BigInt::one()),
            };
            Ok(Bundle { bits: vec![wire], lo, hi })
        };
        match q {
            ConnQuery::Pred(e) => {
                let pairs = self.table()?.pred_pairs(e);
                or_eq_pairs(self, &args[1].clone(), &args[2].clone(), pairs)
            }
            ConnQuery::AnyPred => {
                let pairs = self.table()?.all_pred_pairs();
                or_eq_pairs(self, &args[1].clone(), &args[2].clone(), pairs)
            }
            ConnQuery::L0In => {
                let set = self.table()?.l0_in_list();
                or_eq_set(self, &args[0].clone(), set)
            }
            ConnQuery::L0Neg => {
                let set = self.table()?.l0_neg_list();
                or_eq_set(self, &args[0].clone(), set)
            }
            ConnQuery::Level(e) => {
                let set = self.table()?.level_list(e);
                or_eq_set(self, &args[0].clone(), set)
            }
            ConnQuery::Const0At(e) => {
                let set = self.table()?.const_list(e, false);
                or_eq_set(self, &args[0].clone(), set)
            }
            ConnQuery::Const1At(e) => {
                let set = self.table()?.const_list(e, true);
                or_eq_set(self, &args[0].clone(), set)
            }
        }
    }

    /// Check that a step value is a provable 0/1 bit and extract the wire.
    fn step_bit(&mut self, name: &str, b: &Bundle) -> Result<Wire, XlateError> {
        if b.lo < BigInt::zero() || b.hi > BigInt::one() {
            return Err(XlateError::UnsupportedSchema(format!(
                "step `{name}` is not provably 0/1 (inferred range [{}, {}])",
                b.lo, b.hi
            )));
        }
        Ok(b.bits[0])
    }

    /// Unrolled step values `k(α(u), ȳ)` for `u = 0..count`.
    fn step_bits(&mut self, k: &str, ys: &[Bundle], count: usize) -> Result<Vec<Wire>, XlateError> {
        let mut out = Vec::with_capacity(count);
        for u in 0..count {
            let mut kargs = vec![self.bconst(&alpha(u as i64))?];
            kargs.extend_from_slice(ys);
            let kb = self.lower_call(k, kargs)?;
            out.push(self.step_bit(k, &kb)?);
        }
        Ok(out)
    }

    /// Bit-shift schema: the value after `L = ℓ(x)` steps is the
    /// concatenation `g · 2^L + k_0 k_1 … k_{L-1}` — pure wiring plus a
    /// length decode of the driver (no carries).
    fn lower_ode1(&mut self, g: &str, k: &str, args: &[Bundle]) -> Result<Bundle, XlateError> {
        let x0 = args[0].clone();
        self.require_nonneg(&x0, "schema driver")?;
        let ys = args[1..].to_vec();
        let gb = self.lower_call(g, ys.clone())?;
        self.require_nonneg(&gb, "schema initial value")?;
        let w = x0.bits.len();
        let ks = self.step_bits(k, &ys, w)?;
        let eqs = self.len_eqs(&x0)?;
        let mut arms = Vec::with_capacity(w + 1);
        for (cap_len, &sel) in eqs.iter().enumerate() {
            // value = g·2^L + Σ_{u<L} k_u·2^{L-1-u}
            let mut bits: Vec<Wire> = (0..cap_len).rev().map(|u| ks[u]).collect();
            bits.extend_from_slice(&gb.bits);
            let hi = (&gb.hi << cap_len) + ((BigInt::one() << cap_len) - 1);
            let lo = &gb.lo << cap_len;
            if bits.is_empty() {
                bits.push(self.wconst(false));
            }
            arms.push((sel, Bundle { bits, lo, hi }));
        }
        self.bmux(&arms)
    }

    /// Mod-n counting schema: the value after the steps selected by the
    /// driver length is `(g + Σ masked k_u) mod n`, computed with one MOD-n
    /// gate per residue class.
    fn lower_node(&mut self, n: u32, g: &str, k: &str, args: &[Bundle]) -> Result<Bundle, XlateError> {
        let x0 = args[0].clone();
        self.require_nonneg(&x0, "schema driver")?;
        let ys = args[1..].to_vec();
        let gb = self.lower_call(g, ys.clone())?;
        if gb.lo < BigInt::zero() || gb.hi > BigInt::from(n - 1) {
            return Err(XlateError::UnsupportedSchema(format!(
                "initial value of a mod-{n} schema is not provably in 0..{} (range [{}, {}])",
                n - 1,
                gb.lo,
                gb.hi
            )));
        }
        let w = x0.bits.len();
        let ks = self.step_bits(k, &ys, w)?;
        let eqs = self.len_eqs(&x0)?;
        // unary initial value: [g ≥ j] for j = 1..n-1 sums to g
        let mut preds_base = Vec::new();
        for j in 1..n as usize {
            let mut ges = Vec::new();
            let top = gb.hi.to_usize().unwrap_or(n as usize - 1);
            for v in j..=top {
                ges.push(self.beq_const(&gb, v));
            }
            let ge = self.wor(&ges);
            preds_base.push(ge.pos);
        }
        // steps masked by [ℓ(x) > u]
        for (u, &ku) in ks.iter().enumerate() {
            let above: Vec<Wire> = eqs[u + 1..].to_vec();
            let active = self.wor(&above);
            let masked = self.wand(&[ku, active]);
            preds_base.push(masked.pos);
        }
        // MOD fan-in must be a set of distinct wires: route duplicate
        // wires (collapsed by gate dedup) through fresh identity buffers
        let mut seen = std::collections::HashSet::new();
        for p in preds_base.iter_mut() {
            if !seen.insert(*p) {
                let fresh = self.fresh_gate(GateKind::Or, vec![*p]);
                seen.insert(fresh);
                *p = fresh;
            }
        }
        // residue gates: count ≡ r (mod n) iff count + (n - r) pads ≡ 0,
        // with a pool of distinct constant-1 pad gates
        let pads: Vec<GateId> = (0..n as usize - 1)
            .map(|_| self.fresh_gate(GateKind::Const(true), vec![]))
            .collect();
        let mut residue_gates = Vec::with_capacity(n as usize);
        let mut created = 0usize;
        for r in 0..n as usize {
            let mut preds = preds_base.clone();
            preds.extend_from_slice(&pads[..(n as usize - r) % n as usize]);
            let before = self.circuit.gates.len();
            residue_gates.push(self.gate(GateKind::ModP(n), preds));
            created += self.circuit.gates.len() - before;
        }
        self.mod_instances.push((n, created));
        // binary value bits from the one-hot residues
        let out_w = tc_width(&BigInt::zero(), &BigInt::from(n - 1))?;
        let mut bits = Vec::with_capacity(out_w);
        for j in 0..out_w {
            let pos_set: Vec<GateId> = (0..n as usize)
                .filter(|r| r >> j & 1 == 1)
                .map(|r| residue_gates[r])
                .collect();
            let neg_set: Vec<GateId> = (0..n as usize)
                .filter(|r| r >> j & 1 == 0)
                .map(|r| residue_gates[r])
                .collect();
            bits.push(Wire {
                pos: self.gate(GateKind::Or, pos_set),
                neg: self.gate(GateKind::Or, neg_set),
            });
        }
        Ok(Bundle { bits, lo: BigInt::zero(), hi: BigInt::from(n - 1) })
    }
}

/// Drop gates unreachable from the outputs, renumbering.
fn prune(c: &Circuit, notes: &[String]) -> (Circuit, Vec<String>) {
    let mut keep = vec![false; c.gates.len()];
    let mut stack: Vec<GateId> = c.outputs.clone();
    while let Some(id) = stack.pop() {
        if keep[id] {
            continue;
        }
        keep[id] = true;
        stack.extend(&c.gates[id].preds);
    }
    let mut remap = vec![usize::MAX; c.gates.len()];
    let mut out = Circuit::new(c.width);
    let mut out_notes = Vec::new();
    for id in 0..c.gates.len() {
        if keep[id] {
            remap[id] = out.gates.len();
            let gate = &c.gates[id];
            let preds = gate.preds.iter().map(|&p| remap[p]).collect();
            out.push(gate.kind, gate.level, preds);
            out_notes.push(notes.get(id).cloned().unwrap_or_default());
        }
    }
    out.outputs = c.outputs.iter().map(|&o| remap[o]).collect();
    (out, out_notes)
}

/// Lower an in-fragment program to a normal-form circuit over
/// `entry-arity × width` input bits.
pub fn algebra_to_circuit(p: &Program, width: usize) -> Result<LoweredCircuit, XlateError> {
    let diags = crate::engine::validate(p);
    if !diags.is_empty() {
        return Err(XlateError::InvalidProgram(
            diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }
    let entry = p
        .entry
        .clone()
        .ok_or_else(|| XlateError::InvalidProgram("program has no entry point".into()))?;
    let arity = p.get(&entry).expect("validated").arity;
    let mut low = Lowerer::new(p, width, arity);
    let mut args = Vec::with_capacity(arity);
    let input_hi: BigInt = (BigInt::one() << width) - 1;
    for i in 0..arity {
        let bits = (0..width)
            .map(|j| Wire {
                pos: low.gate(GateKind::Input(i * width + j), vec![]),
                neg: low.gate(GateKind::NegInput(i * width + j), vec![]),
            })
            .collect();
        args.push(Bundle { bits, lo: BigInt::zero(), hi: input_hi.clone() });
    }
    let out = low.lower_call(&entry, args)?;
    low.require_nonneg(&out, "entry output")?;
    low.circuit.outputs = out.bits.iter().map(|w| w.pos).collect();

    let (pruned, pruned_notes) = prune(&low.circuit, &low.notes);
    let (normal, origin) = normalize_with_map(&pruned)?;
    let provenance = origin
        .iter()
        .map(|o| match o {
            Some(src) => pruned_notes[*src].clone(),
            None => "level-alignment gadget".to_string(),
        })
        .collect();
    let depth = normal.depth();
    Ok(LoweredCircuit {
        circuit: normal,
        width,
        args: arity,
        depth,
        provenance,
        mod_instances: low.mod_instances,
    })
}

/// Lower a single basic symbol at the given operand width.
pub fn basic_to_circuit(symbol: &Basic, width: usize) -> Result<LoweredCircuit, XlateError> {
    assert!(width >= 1);
    let arity = match symbol {
        Basic::Proj(i) => i + 1,
        other => other.fixed_arity().unwrap_or(1),
    };
    let mut b = ProgramBuilder::new();
    b.define("main", arity, FunctionBody::Basic(symbol.clone()));
    let prog = b.finish("main");
    algebra_to_circuit(&prog, width)
}

// ---------------------------------------------------------------------------
// round trip

#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub width: usize,
    pub points: u64,
    /// (input, original, compiled, re-lowered) for disagreeing inputs.
    pub counterexamples: Vec<(u64, BigInt, BigInt, BigInt)>,
    pub compiled_depth: usize,
    pub lowered_depth: usize,
}

impl RoundtripReport {
    pub fn agree(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (x, a, b, c) in self.counterexamples.iter().take(10) {
            s.push_str(&format!(
                "mismatch\tx={x}\tcircuit={a}\tcompiled={b}\trelowered={c}\n"
            ));
        }
        s.push_str(&format!(
            "{}: {}/{} inputs agree at width {}\n",
            if self.agree() { "PASS" } else { "FAIL" },
            self.points - self.counterexamples.len() as u64,
            self.points,
            self.width
        ));
        s
    }
}

/// Compile a circuit to a program, re-lower the program, and compare all
/// three exhaustively.
pub fn roundtrip_check(c: &Circuit) -> Result<RoundtripReport, XlateError> {
    if c.outputs.is_empty() {
        return Ok(RoundtripReport {
            width: c.width,
            points: 0,
            counterexamples: Vec::new(),
            compiled_depth: c.depth(),
            lowered_depth: 0,
        });
    }
    let compiled = circuit_to_algebra(c, 1)?;
    // close the driver argument so the relowered circuit matches the
    // original's input layout
    let mut b = ProgramBuilder::new();
    for d in &compiled.program.defs {
        b.push(d.clone());
    }
    b.define_term(
        "rt_main",
        1,
        &Term::Call(
            compiled.program.entry.clone().unwrap(),
            vec![Term::Int(compiled.driver.clone()), Term::Arg(0)],
        ),
    );
    let mut wrapped = b.finish("rt_main");
    wrapped.conn = compiled.program.conn.clone();
    let lowered = algebra_to_circuit(&wrapped, c.width)?;

    let mut ev = Evaluator::new(&compiled.program);
    let points = 1u64 << c.width;
    let mut counterexamples = Vec::new();
    for x in 0..points {
        let original = BigInt::from(c.eval_u64(x)?);
        let compiled_v = compiled.eval_input(&mut ev, &BigInt::from(x))?;
        let relowered = lowered.eval_args(&[x])?;
        if original != compiled_v || original != relowered {
            counterexamples.push((x, original, compiled_v, relowered));
        }
    }
    Ok(RoundtripReport {
        width: c.width,
        points,
        counterexamples,
        compiled_depth: c.depth(),
        lowered_depth: lowered.depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::stdlib;

    fn big(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn compiled_single_mod2_gate() {
        // one MOD-2 gate over 4 inputs; input 0110 (= 6) has two ones → 1
        let c = fixtures::mod_counter(4, 2, 0);
        let compiled = circuit_to_algebra(&c, 1).unwrap();
        let mut ev = Evaluator::new(&compiled.program);
        assert_eq!(compiled.eval_input(&mut ev, &big(0b0110)).unwrap(), big(1));
        for x in 0u64..16 {
            let want = big(c.eval_u64(x).unwrap());
            assert_eq!(compiled.eval_input(&mut ev, &big(x)).unwrap(), want, "x = {x}");
        }
    }

    #[test]
    fn compiled_identity_wire_is_bit_extraction() {
        let c = fixtures::identity_wire_circuit(3);
        let compiled = circuit_to_algebra(&c, 1).unwrap();
        let mut ev = Evaluator::new(&compiled.program);
        for x in 0u64..8 {
            assert_eq!(compiled.eval_input(&mut ev, &big(x)).unwrap(), big(x & 1));
        }
    }

    #[test]
    fn compiled_parity_of_4() {
        let c = fixtures::parity_circuit(4);
        let compiled = circuit_to_algebra(&c, 1).unwrap();
        let mut ev = Evaluator::new(&compiled.program);
        for x in 0u64..16 {
            assert_eq!(
                compiled.eval_input(&mut ev, &big(x)).unwrap(),
                big(u64::from(x.count_ones() % 2 == 1)),
                "x = {x}"
            );
        }
    }

    #[test]
    fn compiled_multi_output() {
        let c = fixtures::two_output_circuit(5);
        let compiled = circuit_to_algebra(&c, 1).unwrap();
        let mut ev = Evaluator::new(&compiled.program);
        for x in 0u64..32 {
            let want = big(c.eval_u64(x).unwrap());
            assert_eq!(compiled.eval_input(&mut ev, &big(x)).unwrap(), want, "x = {x}");
        }
    }

    #[test]
    fn mixed_moduli_rejected() {
        let mut c = fixtures::mod_counter(3, 2, 0);
        // stack a second, incompatible MOD level on top
        let pad1 = c.push(GateKind::Const(true), 5, vec![]);
        let pad2 = c.push(GateKind::Const(true), 5, vec![]);
        let o = c.outputs[0];
        let a = c.push(GateKind::Or, 4, vec![o]);
        let b2 = c.push(GateKind::And, 5, vec![a]);
        let m = c.push(GateKind::ModP(3), 6, vec![b2, pad1, pad2]);
        c.outputs = vec![m];
        assert!(matches!(circuit_to_algebra(&c, 1), Err(XlateError::MixedModuli)));
    }

    #[test]
    fn lowered_cmodn2_width3() {
        let prog = stdlib::build_cmodn(2);
        let low = algebra_to_circuit(&prog, 3).unwrap();
        for x in 0u64..8 {
            assert_eq!(low.eval_args(&[x]).unwrap(), big(u64::from(x.count_ones() % 2)));
        }
    }

    #[test]
    fn lowered_cmodn3_width6() {
        let prog = stdlib::build_cmodn(3);
        let low = algebra_to_circuit(&prog, 6).unwrap();
        for x in 0u64..64 {
            assert_eq!(low.eval_args(&[x]).unwrap(), big(u64::from(x.count_ones() % 3)), "x = {x}");
        }
        // one MOD gate per residue class, per instance
        for (n, count) in &low.mod_instances {
            assert_eq!(*count, *n as usize);
        }
    }

    #[test]
    fn lowered_constant_program() {
        let mut b = ProgramBuilder::new();
        b.define("main", 1, FunctionBody::Basic(Basic::Zero));
        let prog = b.finish("main");
        let low = algebra_to_circuit(&prog, 4).unwrap();
        for x in 0u64..16 {
            assert_eq!(low.eval_args(&[x]).unwrap(), big(0));
        }
    }

    #[test]
    fn basic_blocks() {
        // + at width 4: 5 + 9 = 14
        let add = basic_to_circuit(&Basic::Add, 4).unwrap();
        assert_eq!(add.eval_args(&[5, 9]).unwrap(), big(14));
        for a in 0u64..16 {
            for b in 0u64..16 {
                assert_eq!(add.eval_args(&[a, b]).unwrap(), big(a + b), "{a}+{b}");
            }
        }
        // ÷2 is a right shift
        let half = basic_to_circuit(&Basic::Div2, 5).unwrap();
        for x in 0u64..32 {
            assert_eq!(half.eval_args(&[x]).unwrap(), big(x / 2));
        }
        // ℓ at width 4 of 5 = 3
        let len = basic_to_circuit(&Basic::Len, 4).unwrap();
        assert_eq!(len.eval_args(&[5]).unwrap(), big(3));
        for x in 0u64..16 {
            assert_eq!(len.eval_args(&[x]).unwrap(), big(64 - x.leading_zeros() as u64));
        }
    }

    #[test]
    fn subtraction_inside_sg() {
        // sg(a - b) = [a > b] survives lowering via two's complement
        let mut b = ProgramBuilder::new();
        b.define_term("main", 2, &Term::sg(Term::sub(Term::Arg(0), Term::Arg(1))));
        let prog = b.finish("main");
        let low = algebra_to_circuit(&prog, 4).unwrap();
        for a in 0u64..16 {
            for bb in 0u64..16 {
                assert_eq!(low.eval_args(&[a, bb]).unwrap(), big(u64::from(a > bb)));
            }
        }
    }

    #[test]
    fn bare_subtraction_output_is_rejected() {
        let mut b = ProgramBuilder::new();
        b.define_term("main", 2, &Term::sub(Term::Arg(0), Term::Arg(1)));
        let prog = b.finish("main");
        assert!(matches!(
            algebra_to_circuit(&prog, 3),
            Err(XlateError::UnsupportedSymbol(_))
        ));
    }

    #[test]
    fn unsupported_schema_is_reported() {
        let prog = stdlib::build_bcount(); // plain accumulation is not in the fragment
        assert!(matches!(
            algebra_to_circuit(&prog, 4),
            Err(XlateError::UnsupportedSchema(_))
        ));
    }

    #[test]
    fn smash_lowers() {
        let smash = basic_to_circuit(&Basic::Smash, 3).unwrap();
        for x in 0u64..8 {
            for y in 0u64..8 {
                let want = (x << (64 - y.leading_zeros() as u64).min(64)) + y;
                let want = if y == 0 { x + 0 } else { want };
                assert_eq!(smash.eval_args(&[x, y]).unwrap(), big(want), "{x}#{y}");
            }
        }
    }

    #[test]
    fn roundtrip_parity_and_mod3() {
        let rep = roundtrip_check(&fixtures::parity_circuit(4)).unwrap();
        assert!(rep.agree(), "{}", rep.render());
        assert_eq!(rep.points, 16);
        let rep = roundtrip_check(&fixtures::mod_counter(6, 3, 0)).unwrap();
        assert!(rep.agree(), "{}", rep.render());
        assert_eq!(rep.points, 64);
    }

    #[test]
    fn roundtrip_empty_outputs_is_vacuous() {
        let mut c = Circuit::new(2);
        c.push(GateKind::Input(0), 0, vec![]);
        let rep = roundtrip_check(&c).unwrap();
        assert!(rep.agree());
        assert_eq!(rep.points, 0);
    }
}
