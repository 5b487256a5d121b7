//! The schema interpreter: basic functions, step semantics for every
//! recurrence schema, product-sum closed forms for the linear ones, and
//! well-formedness validation of schema side conditions.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::circuit::ConnTable;
use crate::expr::{eval_expr, sg_int, ExprError, SgExpr, VarSet};

/// `ℓ(x)`: binary length, `ℓ(0) = 0`.
pub fn len_int(x: &BigInt) -> u64 {
    if x.is_zero() {
        0
    } else {
        x.bits()
    }
}

/// `α(u) = 2^u - 1`, the largest integer of length `u`; `α(-1) = 0`.
pub fn alpha(u: i64) -> BigInt {
    if u <= 0 {
        BigInt::zero()
    } else {
        (BigInt::one() << u as u64) - 1
    }
}

/// Queries against an attached circuit connection table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnQuery {
    /// `C_e(x, i, t)`: gate `i` of level `e-1` feeds gate `t` of level `e`.
    Pred(usize),
    /// `C(x, α, β)`: predecessor at any level pair.
    AnyPred,
    /// `L0_in(t, x)`: `t` is an input gate (reading bit `t`).
    L0In,
    /// `L0_neg(t, x)`: `t` is a negated-input gate (reading bit `t - width`).
    L0Neg,
    /// `L_e(t, x)`: `t` is a gate of level `e`.
    Level(usize),
    /// Constant-0 gate membership at a level.
    Const0At(usize),
    /// Constant-1 gate membership at a level.
    Const1At(usize),
}

/// Basic function symbols. The core set is 0, 1, sg, ℓ, +, −, ÷2, #, BIT
/// and projections; `cosg` and `α` are the usual derived helpers. `Const`,
/// `×` and integer division by a constant are extensions used by derived
/// program families; `Conn` symbols expose a fixed circuit's direct
/// connection language in the non-uniform setting.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Basic {
    Zero,
    One,
    Sg,
    Cosg,
    Len,
    Add,
    Sub,
    Div2,
    Smash,
    Bit,
    Alpha,
    Proj(usize),
    Const(BigInt),
    Mul,
    Div,
    Conn(ConnQuery),
}

impl Basic {
    /// Exact arity, or `None` when any arity is accepted (constants) or the
    /// requirement is a lower bound (projections, checked separately).
    pub fn fixed_arity(&self) -> Option<usize> {
        match self {
            Basic::Zero | Basic::One | Basic::Const(_) => None,
            Basic::Sg | Basic::Cosg | Basic::Len | Basic::Div2 | Basic::Alpha => Some(1),
            Basic::Add | Basic::Sub | Basic::Smash | Basic::Bit | Basic::Mul | Basic::Div => {
                Some(2)
            }
            Basic::Proj(_) => None,
            Basic::Conn(ConnQuery::Pred(_)) | Basic::Conn(ConnQuery::AnyPred) => Some(3),
            Basic::Conn(_) => Some(2),
        }
    }
}

/// The recurrence schema kinds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SchemaKind {
    /// General derivation along an arbitrary function `λ(x, ȳ)`;
    /// step function `h(x, ȳ, f)`.
    Lambda { lambda: String },
    /// `∂f/∂ℓ = f + k`, `k ∈ {0,1}`.
    Ode1,
    /// `∂f/∂ℓ = -2·k·f + k`, `g, k ∈ {0,1}`.
    TwoOde,
    /// `∂f/∂ℓ = -n·k·⌊f/(n-1)⌋ + k`, `g ∈ {0..n-1}`, `k ∈ {0,1}`.
    NOde { n: u32 },
    /// `∂f/∂ℓ = -n·⌊(f+k)/n⌋ + k`.
    NOdeStar { n: u32 },
    /// `∂f/∂ℓ = -n·sg(f-c)·k + k` with `c = n-2`.
    NonStrictNOde { n: u32, c: BigInt },
    /// `∂f/∂ℓ = k`.
    ZeroOde,
    /// `∂f/∂ℓ = (2^{ℓ(h(ȳ))}-1)·f + h'`, `h(ȳ) ≥ max(1, h')`.
    Ode2Up { bound: String },
    /// `∂f/∂ℓ = A·f + B`, strict, `A, B ≥ 1`.
    POde { a: SgExpr, b: SgExpr },
    /// `∂f/∂ℓ = -f + K`, `K ∈ {0,1}` limited, `f` only under `sg`.
    B0Ode { k_expr: SgExpr },
    /// `∂f/∂ℓ = -f + B`, `B ≥ 0`, `f` only as `sg(f - c)`, `c ∈ cs`.
    BOde { b: SgExpr, cs: Vec<BigInt> },
    /// Concatenation recursion on notation; steps `h0, h1 ∈ {0,1}`.
    Crn,
    /// k-bounded recursion on notation; every value `≤ bound`.
    Kbrn { bound: BigInt },
}

impl SchemaKind {
    /// Schemas advancing along `ℓ(x)`, i.e. those with an α-point trace.
    pub fn is_length_driven(&self) -> bool {
        !matches!(
            self,
            SchemaKind::Lambda { .. } | SchemaKind::Crn | SchemaKind::Kbrn { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemaKind::Lambda { .. } => "lambda-ode",
            SchemaKind::Ode1 => "ode1",
            SchemaKind::TwoOde => "2ode",
            SchemaKind::NOde { .. } => "node",
            SchemaKind::NOdeStar { .. } => "node*",
            SchemaKind::NonStrictNOde { .. } => "non-strict-node",
            SchemaKind::ZeroOde => "0ode",
            SchemaKind::Ode2Up { .. } => "ode2up",
            SchemaKind::POde { .. } => "pode",
            SchemaKind::B0Ode { .. } => "b0ode",
            SchemaKind::BOde { .. } => "bode",
            SchemaKind::Crn => "crn",
            SchemaKind::Kbrn { .. } => "kbrn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctionBody {
    Basic(Basic),
    Compose { outer: String, inners: Vec<String> },
    Schema { kind: SchemaKind, g: String, steps: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub arity: usize,
    pub body: FunctionBody,
}

/// A set of named definitions with acyclic references. A connection table
/// may be attached when the program uses `Conn` basics.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub defs: Vec<FunctionDef>,
    pub entry: Option<String>,
    pub conn: Option<Arc<ConnTable>>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("schema violation in `{def}`: {msg}")]
    SchemaViolation { def: String, msg: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("arity mismatch calling `{name}`: expected {expected}, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("`{0}` has no linear closed form")]
    NotLinear(String),
    #[error("{0}")]
    Expr(#[from] ExprError),
    #[error("program references circuit connection functions but carries no connection table")]
    MissingConnTable,
}

/// One trace entry: after the length-change step fired at `x_point = α(u)`
/// the function holds `value` (for `u = -1` the initial value `g(ȳ)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePoint {
    pub u: i64,
    pub x_point: BigInt,
    pub value: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub points: Vec<TracePoint>,
}

impl Trace {
    pub fn final_value(&self) -> &BigInt {
        &self.points.last().expect("trace is never empty").value
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub def: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.def, self.message)
    }
}

impl Program {
    pub fn new() -> Self {
        Program::default()
    }

    pub fn push(&mut self, def: FunctionDef) {
        self.index.insert(def.name.clone(), self.defs.len());
        self.defs.push(def);
    }

    pub fn get(&self, name: &str) -> Option<&FunctionDef> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn eval(&self, name: &str, args: &[BigInt]) -> Result<BigInt, EvalError> {
        Evaluator::new(self).eval(name, args)
    }

    pub fn eval_entry(&self, args: &[BigInt]) -> Result<BigInt, EvalError> {
        let entry = self
            .entry
            .clone()
            .ok_or_else(|| EvalError::UnknownFunction("<entry>".into()))?;
        self.eval(&entry, args)
    }
}

/// Evaluate a basic symbol on concrete arguments.
pub fn eval_basic(
    basic: &Basic,
    args: &[BigInt],
    conn: Option<&ConnTable>,
) -> Result<BigInt, EvalError> {
    let need_nonneg = |x: &BigInt, ctx: &str| {
        if x.is_negative() {
            Err(EvalError::Domain(format!("{ctx} requires a nonnegative argument, got {x}")))
        } else {
            Ok(())
        }
    };
    let bool_int = |b: bool| if b { BigInt::one() } else { BigInt::zero() };
    // index arguments to connection queries: off-range (incl. negative) is 0
    let as_index = |x: &BigInt| x.to_usize();
    match basic {
        Basic::Zero => Ok(BigInt::zero()),
        Basic::One => Ok(BigInt::one()),
        Basic::Const(c) => Ok(c.clone()),
        Basic::Sg => Ok(sg_int(&args[0])),
        Basic::Cosg => Ok(BigInt::one() - sg_int(&args[0])),
        Basic::Len => {
            need_nonneg(&args[0], "ℓ")?;
            Ok(BigInt::from(len_int(&args[0])))
        }
        Basic::Add => Ok(&args[0] + &args[1]),
        Basic::Sub => Ok(&args[0] - &args[1]),
        Basic::Div2 => Ok(args[0].div_floor(&BigInt::from(2))),
        Basic::Smash => {
            need_nonneg(&args[0], "#")?;
            need_nonneg(&args[1], "#")?;
            Ok((&args[0] << len_int(&args[1])) + &args[1])
        }
        Basic::Bit => {
            need_nonneg(&args[0], "BIT")?;
            need_nonneg(&args[1], "BIT")?;
            let i = args[0]
                .to_u64()
                .ok_or_else(|| EvalError::Domain("BIT index too large".into()))?;
            Ok(bool_int(args[1].bit(i)))
        }
        Basic::Alpha => {
            need_nonneg(&args[0], "α")?;
            let e = args[0]
                .to_u64()
                .filter(|&e| e <= 1 << 20)
                .ok_or_else(|| EvalError::Domain("α exponent too large".into()))?;
            Ok((BigInt::one() << e) - 1)
        }
        Basic::Proj(i) => args.get(*i).cloned().ok_or_else(|| EvalError::Arity {
            name: format!("π_{i}"),
            expected: i + 1,
            got: args.len(),
        }),
        Basic::Mul => Ok(&args[0] * &args[1]),
        Basic::Div => {
            if !args[1].is_positive() {
                return Err(EvalError::Domain(format!("÷ by nonpositive {}", args[1])));
            }
            Ok(args[0].div_floor(&args[1]))
        }
        Basic::Conn(q) => {
            let table = conn.ok_or(EvalError::MissingConnTable)?;
            Ok(bool_int(match q {
                ConnQuery::Pred(e) => match (as_index(&args[1]), as_index(&args[2])) {
                    (Some(i), Some(t)) => table.is_pred(*e, i, t),
                    _ => false,
                },
                ConnQuery::AnyPred => match (as_index(&args[1]), as_index(&args[2])) {
                    (Some(i), Some(t)) => table.any_pred(i, t),
                    _ => false,
                },
                ConnQuery::L0In => as_index(&args[0]).is_some_and(|t| table.l0_in(t)),
                ConnQuery::L0Neg => as_index(&args[0]).is_some_and(|t| table.l0_neg(t)),
                ConnQuery::Level(e) => as_index(&args[0]).is_some_and(|t| table.level_mem(*e, t)),
                ConnQuery::Const0At(e) => {
                    as_index(&args[0]).is_some_and(|t| table.const_mem(*e, t, false))
                }
                ConnQuery::Const1At(e) => {
                    as_index(&args[0]).is_some_and(|t| table.const_mem(*e, t, true))
                }
            }))
        }
    }
}

/// Memoizing evaluator over one immutable program. Definitions are pure, so
/// caching (def, args) → value is sound; the cache also makes the compiled
/// circuit-evaluation programs tractable.
pub struct Evaluator<'p> {
    pub program: &'p Program,
    cache: HashMap<(usize, Vec<BigInt>), BigInt>,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p Program) -> Self {
        Evaluator { program, cache: HashMap::new() }
    }

    pub fn eval(&mut self, name: &str, args: &[BigInt]) -> Result<BigInt, EvalError> {
        let idx = self
            .program
            .index_of(name)
            .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
        self.eval_idx(idx, args)
    }

    fn eval_idx(&mut self, idx: usize, args: &[BigInt]) -> Result<BigInt, EvalError> {
        let def = &self.program.defs[idx];
        if args.len() != def.arity {
            return Err(EvalError::Arity {
                name: def.name.clone(),
                expected: def.arity,
                got: args.len(),
            });
        }
        // only schema unrollings are worth memoising; basics and
        // compositions are cheaper to recompute than to key
        match &def.body {
            FunctionBody::Basic(b) => eval_basic(b, args, self.program.conn.as_deref()),
            FunctionBody::Compose { outer, inners } => {
                let mut vals = Vec::with_capacity(inners.len());
                for inner in inners.clone() {
                    vals.push(self.eval(&inner, args)?);
                }
                self.eval(&outer.clone(), &vals)
            }
            FunctionBody::Schema { .. } => {
                let key = (idx, args.to_vec());
                if let Some(v) = self.cache.get(&key) {
                    return Ok(v.clone());
                }
                let trace = self.run_recurrence_idx(idx, args)?;
                let value = trace.final_value().clone();
                self.cache.insert(key, value.clone());
                Ok(value)
            }
        }
    }

    /// Unroll a schema definition, producing its trace.
    pub fn run_recurrence(&mut self, name: &str, args: &[BigInt]) -> Result<Trace, EvalError> {
        let idx = self
            .program
            .index_of(name)
            .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
        self.run_recurrence_idx(idx, args)
    }

    fn run_recurrence_idx(&mut self, idx: usize, args: &[BigInt]) -> Result<Trace, EvalError> {
        let def = self.program.defs[idx].clone();
        let FunctionBody::Schema { kind, g, steps } = &def.body else {
            return Err(EvalError::Domain(format!("`{}` is not a schema definition", def.name)));
        };
        if args.is_empty() {
            return Err(EvalError::Arity { name: def.name.clone(), expected: 1, got: 0 });
        }
        let x = &args[0];
        if x.is_negative() {
            return Err(EvalError::Domain(format!("schema driver must be ≥ 0, got {x}")));
        }
        let ys = &args[1..];
        let violation = |msg: String| EvalError::SchemaViolation { def: def.name.clone(), msg };

        let g_val = self.eval(g, ys)?;
        check_initial_range(kind, &g_val).map_err(&violation)?;

        let mut points = vec![TracePoint { u: -1, x_point: BigInt::zero(), value: g_val.clone() }];
        match kind {
            SchemaKind::Lambda { lambda } => {
                // step semantics: walk x upward, firing where λ changes
                let h = &steps[0];
                let mut v = g_val;
                let mut t = BigInt::zero();
                let mut lam_prev = self.eval_lambda(lambda, &t, ys)?;
                let mut u = 0i64;
                while &t < x {
                    let t_next = &t + 1;
                    let lam_next = self.eval_lambda(lambda, &t_next, ys)?;
                    let dl = &lam_next - &lam_prev;
                    if !dl.is_zero() {
                        let mut hargs = Vec::with_capacity(ys.len() + 2);
                        hargs.push(t.clone());
                        hargs.extend_from_slice(ys);
                        hargs.push(v.clone());
                        let hv = self.eval(h, &hargs)?;
                        v += dl * hv;
                        points.push(TracePoint { u, x_point: t_next.clone(), value: v.clone() });
                        u += 1;
                    }
                    lam_prev = lam_next;
                    t = t_next;
                }
            }
            SchemaKind::Crn | SchemaKind::Kbrn { .. } => {
                // recursion on notation: consume binary digits of x, most
                // significant first; the trace records the prefix values
                let bits = len_int(x);
                let mut v = g_val;
                for j in (0..bits).rev() {
                    let prefix = x >> (j + 1);
                    let digit = usize::from(x.bit(j));
                    let mut hargs = Vec::with_capacity(ys.len() + 2);
                    hargs.push(prefix.clone());
                    hargs.extend_from_slice(ys);
                    let step_name = &steps[digit];
                    v = match kind {
                        SchemaKind::Crn => {
                            let hv = self.eval(step_name, &hargs)?;
                            if !hv.is_zero() && !hv.is_one() {
                                return Err(violation(format!("CRN step value {hv} outside {{0,1}}")));
                            }
                            (&v << 1) + hv
                        }
                        SchemaKind::Kbrn { bound } => {
                            hargs.push(v.clone());
                            let hv = self.eval(step_name, &hargs)?;
                            if hv.is_negative() || &hv > bound {
                                return Err(violation(format!(
                                    "k-BRN value {hv} outside {{0..{bound}}}"
                                )));
                            }
                            hv
                        }
                        _ => unreachable!(),
                    };
                    points.push(TracePoint {
                        u: (bits - j) as i64 - 1,
                        x_point: x >> j,
                        value: v.clone(),
                    });
                }
            }
            _ => {
                // derivation along ℓ: one step per length increase, the
                // step at u sampling the point α(u)
                let big_len = len_int(x);
                let mut v = g_val;
                for u in 0..big_len as i64 {
                    let point = alpha(u);
                    v = self.length_step(kind, steps, &def.name, &point, ys, &v)?;
                    check_running_range(kind, &v).map_err(&violation)?;
                    points.push(TracePoint { u, x_point: point, value: v.clone() });
                }
            }
        }
        Ok(Trace { points })
    }

    fn eval_lambda(&mut self, lambda: &str, x: &BigInt, ys: &[BigInt]) -> Result<BigInt, EvalError> {
        let mut largs = Vec::with_capacity(ys.len() + 1);
        largs.push(x.clone());
        largs.extend_from_slice(ys);
        self.eval(lambda, &largs)
    }

    /// One derivative step `v ↦ v + P(point, ȳ, v, h(point, ȳ))` for the
    /// length-driven kinds, with the dynamic side conditions enforced.
    fn length_step(
        &mut self,
        kind: &SchemaKind,
        steps: &[String],
        def_name: &str,
        point: &BigInt,
        ys: &[BigInt],
        v: &BigInt,
    ) -> Result<BigInt, EvalError> {
        let violation = |msg: String| EvalError::SchemaViolation { def: def_name.to_string(), msg };
        let mut sargs = Vec::with_capacity(ys.len() + 1);
        sargs.push(point.clone());
        sargs.extend_from_slice(ys);
        let step_val = self.eval(&steps[0], &sargs)?;
        let check_k01 = |k: &BigInt| {
            if k.is_zero() || k.is_one() {
                Ok(())
            } else {
                Err(violation(format!("k value {k} outside {{0,1}}")))
            }
        };
        match kind {
            SchemaKind::Ode1 => {
                check_k01(&step_val)?;
                Ok(v + (v + &step_val))
            }
            SchemaKind::TwoOde => {
                check_k01(&step_val)?;
                Ok(v + (BigInt::from(-2) * &step_val * v + &step_val))
            }
            SchemaKind::NOde { n } => {
                check_k01(&step_val)?;
                let n = BigInt::from(*n);
                let q = v.div_floor(&(&n - 1));
                Ok(v + (-&n * &step_val * q + &step_val))
            }
            SchemaKind::NOdeStar { n } => {
                check_k01(&step_val)?;
                let n = BigInt::from(*n);
                let q = (v + &step_val).div_floor(&n);
                Ok(v + (-&n * q + &step_val))
            }
            SchemaKind::NonStrictNOde { n, c } => {
                check_k01(&step_val)?;
                let n = BigInt::from(*n);
                Ok(v + (-&n * sg_int(&(v - c)) * &step_val + &step_val))
            }
            SchemaKind::ZeroOde => {
                check_k01(&step_val)?;
                Ok(v + &step_val)
            }
            SchemaKind::Ode2Up { bound } => {
                let hb = self.eval(bound, ys)?;
                let floor = if step_val.is_positive() { step_val.clone() } else { BigInt::one() };
                if hb < floor {
                    return Err(violation(format!(
                        "bound h(ȳ) = {hb} below max(1, step value {step_val})"
                    )));
                }
                let shift = (BigInt::one() << len_int(&hb)) - 1;
                Ok(v + (shift * v + &step_val))
            }
            SchemaKind::POde { a, b } => {
                let env = point_env(point, ys);
                let a_val = eval_expr(a, &env, v, &[step_val.clone()])?;
                let b_val = eval_expr(b, &env, v, &[step_val.clone()])?;
                if a_val < BigInt::one() || b_val < BigInt::one() {
                    return Err(violation(format!("A = {a_val}, B = {b_val}; both must be ≥ 1")));
                }
                Ok(v + (a_val * v + b_val))
            }
            SchemaKind::B0Ode { k_expr } => {
                let env = point_env(point, ys);
                let k_val = eval_expr(k_expr, &env, v, &[step_val.clone()])?;
                if !k_val.is_zero() && !k_val.is_one() {
                    return Err(violation(format!("K value {k_val} outside {{0,1}}")));
                }
                Ok(k_val)
            }
            SchemaKind::BOde { b, .. } => {
                let env = point_env(point, ys);
                let b_val = eval_expr(b, &env, v, &[step_val.clone()])?;
                if b_val.is_negative() {
                    return Err(violation(format!("B value {b_val} is negative")));
                }
                Ok(b_val)
            }
            SchemaKind::Lambda { .. } | SchemaKind::Crn | SchemaKind::Kbrn { .. } => {
                unreachable!("not length-driven")
            }
        }
    }

    /// Evaluate the product-sum solution
    /// `Σ_{u=-1}^{ℓ(x)-1} (Π_{t=u+1}^{ℓ(x)-1} (1 + A_t)) · B_u`
    /// with `B_{-1} = g(ȳ)`, for schemas whose defining expression is
    /// essentially linear (or constant) in `f`.
    pub fn closed_form(&mut self, name: &str, args: &[BigInt]) -> Result<BigInt, EvalError> {
        let idx = self
            .program
            .index_of(name)
            .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
        let def = self.program.defs[idx].clone();
        let FunctionBody::Schema { kind, steps, .. } = &def.body else {
            return Err(EvalError::NotLinear(def.name.clone()));
        };
        if !kind.is_length_driven() {
            return Err(EvalError::NotLinear(def.name.clone()));
        }
        if let SchemaKind::POde { a, b } = kind {
            // user-supplied coefficients must really be essentially constant
            let fset = VarSet::fcall();
            if a.degree(&fset) != 0 || b.degree(&fset) != 0 {
                return Err(EvalError::NotLinear(def.name.clone()));
            }
        }
        let x = &args[0];
        let ys = &args[1..];
        let trace = self.run_recurrence_idx(idx, args)?;
        let big_len = len_int(x) as i64;

        // f(α(t)) = trace value at index t; step values recomputed at α(u)
        let f_at = |t: i64| trace.points[t as usize].value.clone();
        let mut step_at: HashMap<i64, BigInt> = HashMap::new();
        for u in 0..big_len {
            let mut sargs = Vec::with_capacity(ys.len() + 1);
            sargs.push(alpha(u));
            sargs.extend_from_slice(ys);
            step_at.insert(u, self.eval(&steps[0], &sargs)?);
        }

        let coef_a = |ev: &mut Self, t: i64| -> Result<BigInt, EvalError> {
            let k = &step_at[&t];
            Ok(match kind {
                SchemaKind::Ode1 => BigInt::one(),
                SchemaKind::TwoOde => BigInt::from(-2) * k,
                // f occurs only under a sign test: essentially constant
                SchemaKind::NOde { .. }
                | SchemaKind::NOdeStar { .. }
                | SchemaKind::NonStrictNOde { .. }
                | SchemaKind::ZeroOde => BigInt::zero(),
                SchemaKind::Ode2Up { bound } => {
                    let hb = ev.eval(bound, ys)?;
                    (BigInt::one() << len_int(&hb)) - 1
                }
                SchemaKind::POde { a, .. } => {
                    let env = point_env(&alpha(t), ys);
                    eval_expr(a, &env, &f_at(t), &[k.clone()])?
                }
                SchemaKind::B0Ode { .. } | SchemaKind::BOde { .. } => BigInt::from(-1),
                _ => unreachable!(),
            })
        };
        let coef_b = |_ev: &mut Self, u: i64| -> Result<BigInt, EvalError> {
            if u < 0 {
                return Ok(trace.points[0].value.clone());
            }
            let k = &step_at[&u];
            let fv = f_at(u);
            Ok(match kind {
                SchemaKind::Ode1 | SchemaKind::TwoOde | SchemaKind::ZeroOde => k.clone(),
                SchemaKind::NOde { n } => {
                    let n = BigInt::from(*n);
                    let q = fv.div_floor(&(&n - 1));
                    -&n * k * q + k
                }
                SchemaKind::NOdeStar { n } => {
                    let n = BigInt::from(*n);
                    let q = (&fv + k).div_floor(&n);
                    -&n * q + k
                }
                SchemaKind::NonStrictNOde { n, c } => {
                    let n = BigInt::from(*n);
                    -&n * sg_int(&(&fv - c)) * k + k
                }
                SchemaKind::Ode2Up { .. } => k.clone(),
                SchemaKind::POde { b, .. } => {
                    let env = point_env(&alpha(u), ys);
                    eval_expr(b, &env, &fv, &[k.clone()])?
                }
                SchemaKind::B0Ode { k_expr } => {
                    let env = point_env(&alpha(u), ys);
                    eval_expr(k_expr, &env, &fv, &[k.clone()])?
                }
                SchemaKind::BOde { b, .. } => {
                    let env = point_env(&alpha(u), ys);
                    eval_expr(b, &env, &fv, &[k.clone()])?
                }
                _ => unreachable!(),
            })
        };

        let mut total = BigInt::zero();
        for u in -1..big_len {
            let mut prod = BigInt::one();
            for t in (u + 1)..big_len {
                prod *= BigInt::one() + coef_a(self, t)?;
            }
            total += prod * coef_b(self, u)?;
        }
        Ok(total)
    }
}

fn point_env(point: &BigInt, ys: &[BigInt]) -> HashMap<String, BigInt> {
    let mut env = HashMap::with_capacity(ys.len() + 1);
    env.insert("x".to_string(), point.clone());
    for (i, y) in ys.iter().enumerate() {
        env.insert(format!("y{}", i + 1), y.clone());
    }
    env
}

fn check_initial_range(kind: &SchemaKind, g: &BigInt) -> Result<(), String> {
    let in01 = |v: &BigInt| v.is_zero() || v.is_one();
    match kind {
        SchemaKind::TwoOde | SchemaKind::ZeroOde if !in01(g) => {
            Err(format!("g value {g} outside {{0,1}}"))
        }
        SchemaKind::NOde { n } | SchemaKind::NOdeStar { n } | SchemaKind::NonStrictNOde { n, .. }
            if g.is_negative() || g >= &BigInt::from(*n) =>
        {
            Err(format!("g value {g} outside {{0..{}}}", n - 1))
        }
        SchemaKind::Kbrn { bound } if g.is_negative() || g > bound => {
            Err(format!("g value {g} outside {{0..{bound}}}"))
        }
        _ => Ok(()),
    }
}

fn check_running_range(kind: &SchemaKind, v: &BigInt) -> Result<(), String> {
    match kind {
        SchemaKind::TwoOde if !(v.is_zero() || v.is_one()) => {
            Err(format!("trace value {v} escaped {{0,1}}"))
        }
        SchemaKind::NOde { n } | SchemaKind::NOdeStar { n } | SchemaKind::NonStrictNOde { n, .. }
            if v.is_negative() || v >= &BigInt::from(*n) =>
        {
            Err(format!("trace value {v} escaped {{0..{}}}", n - 1))
        }
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// validation

/// Required arity of each step slot, given `g: ℕ^p` (so `f: ℕ^{p+1}`).
fn step_arities(kind: &SchemaKind, p: usize) -> Vec<usize> {
    match kind {
        SchemaKind::Lambda { .. } => vec![p + 2],
        SchemaKind::Crn => vec![p + 1, p + 1],
        SchemaKind::Kbrn { .. } => vec![p + 2, p + 2],
        _ => vec![p + 1],
    }
}

/// Best-effort static output range of a definition; `None` when unknown.
fn static_range(prog: &Program, name: &str, seen: &mut HashSet<String>) -> Option<(BigInt, BigInt)> {
    if !seen.insert(name.to_string()) {
        return None;
    }
    let def = prog.get(name)?;
    let r01 = Some((BigInt::zero(), BigInt::one()));
    let out = match &def.body {
        FunctionBody::Basic(b) => match b {
            Basic::Zero => Some((BigInt::zero(), BigInt::zero())),
            Basic::One => Some((BigInt::one(), BigInt::one())),
            Basic::Const(c) => Some((c.clone(), c.clone())),
            Basic::Sg | Basic::Cosg | Basic::Bit | Basic::Conn(_) => r01,
            _ => None,
        },
        FunctionBody::Compose { outer, .. } => static_range(prog, outer, seen),
        FunctionBody::Schema { kind, g, .. } => match kind {
            SchemaKind::TwoOde => r01,
            SchemaKind::NOde { n } | SchemaKind::NOdeStar { n } | SchemaKind::NonStrictNOde { n, .. } => {
                Some((BigInt::zero(), BigInt::from(*n) - 1))
            }
            SchemaKind::Kbrn { bound } => Some((BigInt::zero(), bound.clone())),
            SchemaKind::B0Ode { .. } => {
                let (lo, hi) = static_range(prog, g, seen)?;
                if lo >= BigInt::zero() && hi <= BigInt::one() {
                    r01
                } else {
                    None
                }
            }
            _ => None,
        },
    };
    seen.remove(name);
    out
}

fn range_within(range: &Option<(BigInt, BigInt)>, lo: &BigInt, hi: &BigInt) -> bool {
    // unknown ranges are deferred to the dynamic checks
    match range {
        Some((rlo, rhi)) => rlo >= lo && rhi <= hi,
        None => true,
    }
}

/// Validate every definition: reference resolution, acyclicity, arities and
/// the syntactic schema side conditions. Range constraints that cannot be
/// established statically are left to the dynamic checks in the stepper.
pub fn validate(prog: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    fn push_diag(diags: &mut Vec<Diagnostic>, def: &str, message: String) {
        diags.push(Diagnostic { def: def.to_string(), message });
    }

    // name resolution + arity of references
    let refs_of = |body: &FunctionBody| -> Vec<String> {
        match body {
            FunctionBody::Basic(_) => vec![],
            FunctionBody::Compose { outer, inners } => {
                let mut v = vec![outer.clone()];
                v.extend(inners.iter().cloned());
                v
            }
            FunctionBody::Schema { kind, g, steps } => {
                let mut v = vec![g.clone()];
                v.extend(steps.iter().cloned());
                if let SchemaKind::Lambda { lambda } = kind {
                    v.push(lambda.clone());
                }
                if let SchemaKind::Ode2Up { bound } = kind {
                    v.push(bound.clone());
                }
                v
            }
        }
    };

    for def in &prog.defs {
        for r in refs_of(&def.body) {
            if prog.get(&r).is_none() {
                push_diag(&mut diags, &def.name, format!("reference to unknown function `{r}`"));
            }
        }
    }
    if let Some(entry) = &prog.entry {
        if prog.get(entry).is_none() {
            push_diag(&mut diags, "<entry>", format!("entry point `{entry}` is not defined"));
        }
    }
    if !diags.is_empty() {
        return diags;
    }

    // acyclicity
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut marks = vec![Mark::White; prog.defs.len()];
    fn visit(
        prog: &Program,
        idx: usize,
        marks: &mut Vec<Mark>,
        refs_of: &dyn Fn(&FunctionBody) -> Vec<String>,
    ) -> bool {
        match marks[idx] {
            Mark::Black => return true,
            Mark::Grey => return false,
            Mark::White => {}
        }
        marks[idx] = Mark::Grey;
        for r in refs_of(&prog.defs[idx].body) {
            let ridx = prog.index_of(&r).unwrap();
            if !visit(prog, ridx, marks, refs_of) {
                return false;
            }
        }
        marks[idx] = Mark::Black;
        true
    }
    for idx in 0..prog.defs.len() {
        if !visit(prog, idx, &mut marks, &refs_of) {
            push_diag(&mut diags, &prog.defs[idx].name, "reference cycle detected".into());
            return diags;
        }
    }

    for def in &prog.defs {
        match &def.body {
            FunctionBody::Basic(b) => {
                if let Some(want) = b.fixed_arity() {
                    if def.arity != want {
                        push_diag(&mut diags, &def.name, format!("basic symbol needs arity {want}, declared {}", def.arity));
                    }
                }
                if let Basic::Proj(i) = b {
                    if *i >= def.arity {
                        push_diag(&mut diags, &def.name, format!("projection index {i} exceeds arity {}", def.arity));
                    }
                }
            }
            FunctionBody::Compose { outer, inners } => {
                let outer_def = prog.get(outer).unwrap();
                if outer_def.arity != inners.len() {
                    push_diag(&mut diags, &def.name, format!(
                        "compose feeds {} values to `{outer}` of arity {}",
                        inners.len(),
                        outer_def.arity
                    ));
                }
                for inner in inners {
                    let inner_def = prog.get(inner).unwrap();
                    if inner_def.arity != def.arity {
                        push_diag(&mut diags, &def.name, format!(
                            "inner `{inner}` has arity {}, expected {}",
                            inner_def.arity, def.arity
                        ));
                    }
                }
            }
            FunctionBody::Schema { kind, g, steps } => {
                if def.arity == 0 {
                    push_diag(&mut diags, &def.name, "schema definitions need arity ≥ 1".into());
                    continue;
                }
                let p = def.arity - 1;
                let g_def = prog.get(g).unwrap();
                if g_def.arity != p {
                    push_diag(&mut diags, &def.name, format!("g `{g}` has arity {}, expected {p}", g_def.arity));
                }
                let wanted = step_arities(kind, p);
                if steps.len() != wanted.len() {
                    push_diag(&mut diags, &def.name, format!(
                        "schema `{}` takes {} step function(s), got {}",
                        kind.name(),
                        wanted.len(),
                        steps.len()
                    ));
                } else {
                    for (s, want) in steps.iter().zip(&wanted) {
                        let s_def = prog.get(s).unwrap();
                        if s_def.arity != *want {
                            push_diag(&mut diags, &def.name, format!(
                                "step `{s}` has arity {}, expected {want}",
                                s_def.arity
                            ));
                        }
                    }
                }
                if let SchemaKind::Lambda { lambda } = kind {
                    let l_def = prog.get(lambda).unwrap();
                    if l_def.arity != p + 1 {
                        push_diag(&mut diags, &def.name, format!(
                            "λ `{lambda}` has arity {}, expected {}",
                            l_def.arity,
                            p + 1
                        ));
                    }
                }
                if let SchemaKind::Ode2Up { bound } = kind {
                    let b_def = prog.get(bound).unwrap();
                    if b_def.arity != p {
                        push_diag(&mut diags, &def.name, format!(
                            "bound `{bound}` has arity {}, expected {p}",
                            b_def.arity
                        ));
                    }
                }

                // schema parameters
                match kind {
                    SchemaKind::NOde { n }
                    | SchemaKind::NOdeStar { n }
                    | SchemaKind::NonStrictNOde { n, .. } => {
                        if *n < 2 {
                            push_diag(&mut diags, &def.name, format!("modulus n = {n} must be ≥ 2"));
                        }
                        if let SchemaKind::NonStrictNOde { n, c } = kind {
                            if *c != BigInt::from(*n) - 2 {
                                push_diag(&mut diags, &def.name, format!("non-strict constant c = {c}, expected n - 2"));
                            }
                        }
                    }
                    SchemaKind::Kbrn { bound } => {
                        if bound.is_negative() {
                            push_diag(&mut diags, &def.name, format!("k-BRN bound {bound} must be ≥ 0"));
                        }
                    }
                    _ => {}
                }

                // expression side conditions
                let fset = VarSet::fcall();
                match kind {
                    SchemaKind::POde { a, b } => {
                        if a.mentions_fcall() || b.mentions_fcall() {
                            push_diag(&mut diags, &def.name, "strict schema: A and B must not reference f".into());
                        }
                    }
                    SchemaKind::B0Ode { k_expr } => {
                        if !k_expr.is_limited() {
                            push_diag(&mut diags, &def.name, "K must be a limited expression (no ×)".into());
                        }
                        if !k_expr.fcall_only_under_sg() {
                            push_diag(&mut diags, &def.name, "f may occur in K only under the scope of the sign function".into());
                        }
                        if k_expr.classify(&fset) == crate::expr::Linearity::Higher {
                            push_diag(&mut diags, &def.name, "K is not essentially linear in f".into());
                        }
                    }
                    SchemaKind::BOde { b, cs } => {
                        if !b.fcall_only_as_sg_sub_const(cs) {
                            push_diag(&mut diags, &def.name, "f may occur in B only as sg(f - c) for a declared constant c".into());
                        }
                    }
                    _ => {}
                }

                // static range checks (dynamic otherwise)
                let g_range = static_range(prog, g, &mut HashSet::new());
                let range_err = |lo: i64, hi: &BigInt| {
                    !range_within(&g_range, &BigInt::from(lo), hi)
                };
                match kind {
                    SchemaKind::TwoOde | SchemaKind::ZeroOde => {
                        if range_err(0, &BigInt::one()) {
                            push_diag(&mut diags, &def.name, "g out of range: must map into {0,1}".into());
                        }
                    }
                    SchemaKind::NOde { n } | SchemaKind::NOdeStar { n } | SchemaKind::NonStrictNOde { n, .. } => {
                        if range_err(0, &(BigInt::from(*n) - 1)) {
                            push_diag(&mut diags, &def.name, format!("g out of range: must map into {{0..{}}}", n - 1));
                        }
                    }
                    _ => {}
                }
                let k_ranged = matches!(
                    kind,
                    SchemaKind::Ode1
                        | SchemaKind::TwoOde
                        | SchemaKind::NOde { .. }
                        | SchemaKind::NOdeStar { .. }
                        | SchemaKind::NonStrictNOde { .. }
                        | SchemaKind::ZeroOde
                );
                if k_ranged {
                    let k_range = static_range(prog, &steps[0], &mut HashSet::new());
                    if !range_within(&k_range, &BigInt::zero(), &BigInt::one()) {
                        push_diag(&mut diags, &def.name, "k out of range: must map into {0,1}".into());
                    }
                }
                if let SchemaKind::Crn = kind {
                    for s in steps {
                        let r = static_range(prog, s, &mut HashSet::new());
                        if !range_within(&r, &BigInt::zero(), &BigInt::one()) {
                            push_diag(&mut diags, &def.name, format!("CRN step `{s}` out of range: must map into {{0,1}}"));
                        }
                    }
                }
            }
        }
    }
    diags
}

// ---------------------------------------------------------------------------
// term builder: lowers expression trees over basics and named calls into
// Compose/Proj definitions, deduplicating structurally equal auxiliaries.

#[derive(Debug, Clone)]
pub enum Term {
    Arg(usize),
    Int(BigInt),
    Basic(Basic, Vec<Term>),
    Call(String, Vec<Term>),
}

impl Term {
    pub fn int(v: i64) -> Term {
        Term::Int(BigInt::from(v))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::Basic(Basic::Add, vec![l, r])
    }

    pub fn sub(l: Term, r: Term) -> Term {
        Term::Basic(Basic::Sub, vec![l, r])
    }

    pub fn sg(t: Term) -> Term {
        Term::Basic(Basic::Sg, vec![t])
    }

    pub fn cosg(t: Term) -> Term {
        Term::Basic(Basic::Cosg, vec![t])
    }

    pub fn len(t: Term) -> Term {
        Term::Basic(Basic::Len, vec![t])
    }

    pub fn bit(i: Term, x: Term) -> Term {
        Term::Basic(Basic::Bit, vec![i, x])
    }

    /// 0/1 conjunction: `sg(a + b - 1)`.
    pub fn band(a: Term, b: Term) -> Term {
        Term::sg(Term::sub(Term::add(a, b), Term::int(1)))
    }

    /// 0/1 disjunction: `sg(a + b)`.
    pub fn bor(a: Term, b: Term) -> Term {
        Term::sg(Term::add(a, b))
    }
}

/// Incrementally assembles a [`Program`], turning [`Term`] trees into
/// definitions.
#[derive(Default)]
pub struct ProgramBuilder {
    prog: Program,
    memo: HashMap<(usize, FunctionBody), String>,
    counter: usize,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, def: FunctionDef) {
        self.prog.push(def);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.prog.get(name).is_some()
    }

    fn fresh(&mut self, hint: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{hint}${}", self.counter);
            if self.prog.get(&name).is_none() {
                return name;
            }
        }
    }

    /// Intern an auxiliary definition, reusing a structurally equal one.
    pub fn intern(&mut self, hint: &str, arity: usize, body: FunctionBody) -> String {
        if let Some(name) = self.memo.get(&(arity, body.clone())) {
            return name.clone();
        }
        let name = self.fresh(hint);
        self.prog.push(FunctionDef { name: name.clone(), arity, body: body.clone() });
        self.memo.insert((arity, body), name.clone());
        name
    }

    /// Lower `term` (over `arity` arguments) to a definition name.
    pub fn term(&mut self, hint: &str, arity: usize, term: &Term) -> String {
        match term {
            Term::Arg(i) => {
                assert!(*i < arity, "argument index out of range");
                self.intern(hint, arity, FunctionBody::Basic(Basic::Proj(*i)))
            }
            Term::Int(v) => self.intern(hint, arity, FunctionBody::Basic(Basic::Const(v.clone()))),
            Term::Basic(b, subs) => {
                let basic_name = self.intern(
                    hint,
                    b.fixed_arity().unwrap_or(subs.len()),
                    FunctionBody::Basic(b.clone()),
                );
                self.compose(hint, arity, &basic_name, subs)
            }
            Term::Call(f, subs) => {
                let f = f.clone();
                self.compose(hint, arity, &f, subs)
            }
        }
    }

    fn compose(&mut self, hint: &str, arity: usize, outer: &str, subs: &[Term]) -> String {
        // identity composition f ∘ (π_0, ..., π_{n-1}) collapses to f itself
        let identity = self
            .prog
            .get(outer)
            .is_some_and(|d| d.arity == arity && d.arity == subs.len())
            && subs.iter().enumerate().all(|(i, s)| matches!(s, Term::Arg(j) if *j == i));
        if identity {
            return outer.to_string();
        }
        let inners: Vec<String> = subs.iter().map(|s| self.term(hint, arity, s)).collect();
        self.intern(
            hint,
            arity,
            FunctionBody::Compose { outer: outer.to_string(), inners },
        )
    }

    /// Add a named definition whose body is a term.
    pub fn define_term(&mut self, name: &str, arity: usize, term: &Term) {
        let inner = self.term(name, arity, term);
        // alias via identity composition over projections
        let proj_args: Vec<Term> = (0..arity).map(Term::Arg).collect();
        let body = if arity == 0 {
            FunctionBody::Compose { outer: inner, inners: vec![] }
        } else {
            let inners: Vec<String> =
                proj_args.iter().map(|t| self.term(name, arity, t)).collect();
            FunctionBody::Compose { outer: inner, inners }
        };
        self.prog.push(FunctionDef { name: name.to_string(), arity, body });
    }

    pub fn define(&mut self, name: &str, arity: usize, body: FunctionBody) {
        self.prog.push(FunctionDef { name: name.to_string(), arity, body });
    }

    pub fn finish(mut self, entry: &str) -> Program {
        self.prog.entry = Some(entry.to_string());
        self.prog
    }

    pub fn finish_anonymous(self) -> Program {
        self.prog
    }

    pub fn finish_with_conn(mut self, entry: &str, conn: Arc<ConnTable>) -> Program {
        self.prog.entry = Some(entry.to_string());
        self.prog.conn = Some(conn);
        self.prog
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn basic_length_and_smash() {
        assert_eq!(eval_basic(&Basic::Len, &[big(0)], None).unwrap(), big(0));
        assert_eq!(eval_basic(&Basic::Len, &[big(5)], None).unwrap(), big(3));
        // 3#5 = 2^ℓ(5)·3 + 5 = 29
        assert_eq!(eval_basic(&Basic::Smash, &[big(3), big(5)], None).unwrap(), big(29));
        // BIT(1, 6): 6 = 110₂
        assert_eq!(eval_basic(&Basic::Bit, &[big(1), big(6)], None).unwrap(), big(1));
        assert!(matches!(
            eval_basic(&Basic::Len, &[big(-1)], None),
            Err(EvalError::Domain(_))
        ));
    }

    fn ode1_ones() -> Program {
        let mut b = ProgramBuilder::new();
        b.define("g0", 0, FunctionBody::Basic(Basic::Zero));
        b.define("k1", 1, FunctionBody::Basic(Basic::One));
        b.define(
            "f",
            1,
            FunctionBody::Schema { kind: SchemaKind::Ode1, g: "g0".into(), steps: vec!["k1".into()] },
        );
        b.finish("f")
    }

    #[test]
    fn ode1_unrolls_to_all_ones() {
        // g = 0, k ≡ 1: 0 → 1 → 3 → 7
        let prog = ode1_ones();
        assert!(validate(&prog).is_empty());
        let mut ev = Evaluator::new(&prog);
        let trace = ev.run_recurrence("f", &[big(7)]).unwrap();
        let values: Vec<BigInt> = trace.points.iter().map(|p| p.value.clone()).collect();
        assert_eq!(values, vec![big(0), big(1), big(3), big(7)]);
        assert_eq!(trace.points[0].u, -1);
        assert_eq!(prog.eval("f", &[big(7)]).unwrap(), big(7));
    }

    #[test]
    fn any_schema_at_zero_is_g() {
        let prog = ode1_ones();
        assert_eq!(prog.eval("f", &[big(0)]).unwrap(), big(0));
    }

    #[test]
    fn node_wraps_at_n_minus_one() {
        // ℓ-nODE step with f = n-1, k = 1 goes to 0
        for n in [2u32, 3, 5, 7] {
            let mut b = ProgramBuilder::new();
            b.define("g", 0, FunctionBody::Basic(Basic::Const(big(n as i64 - 1))));
            b.define("k1", 1, FunctionBody::Basic(Basic::One));
            b.define(
                "f",
                1,
                FunctionBody::Schema {
                    kind: SchemaKind::NOde { n },
                    g: "g".into(),
                    steps: vec!["k1".into()],
                },
            );
            let prog = b.finish("f");
            // one step: driver of length 1
            assert_eq!(prog.eval("f", &[big(1)]).unwrap(), big(0), "n = {n}");
        }
    }

    #[test]
    fn two_ode_closed_form_matches_parity() {
        // ℓ-2ODE with g = 0, k ≡ 1 at x = 7: three toggles → 1
        let mut b = ProgramBuilder::new();
        b.define("g0", 0, FunctionBody::Basic(Basic::Zero));
        b.define("k1", 1, FunctionBody::Basic(Basic::One));
        b.define(
            "f",
            1,
            FunctionBody::Schema { kind: SchemaKind::TwoOde, g: "g0".into(), steps: vec!["k1".into()] },
        );
        let prog = b.finish("f");
        let mut ev = Evaluator::new(&prog);
        assert_eq!(ev.closed_form("f", &[big(7)]).unwrap(), big(1));
        assert_eq!(prog.eval("f", &[big(7)]).unwrap(), big(1));
    }

    #[test]
    fn zero_ode_with_zero_k_keeps_g() {
        let mut b = ProgramBuilder::new();
        b.define("g1", 0, FunctionBody::Basic(Basic::One));
        b.define("k0", 1, FunctionBody::Basic(Basic::Zero));
        b.define(
            "f",
            1,
            FunctionBody::Schema { kind: SchemaKind::ZeroOde, g: "g1".into(), steps: vec!["k0".into()] },
        );
        let prog = b.finish("f");
        let mut ev = Evaluator::new(&prog);
        for x in [0i64, 1, 5, 100, 9999] {
            assert_eq!(ev.closed_form("f", &[big(x)]).unwrap(), big(1));
            assert_eq!(ev.eval("f", &[big(x)]).unwrap(), big(1));
        }
    }

    #[test]
    fn dynamic_k_range_is_enforced() {
        let mut b = ProgramBuilder::new();
        b.define("g0", 0, FunctionBody::Basic(Basic::Zero));
        // k(x) = x + x, escapes {0,1} at sampled point α(1) = 1
        b.define_term("kbad", 1, &Term::add(Term::Arg(0), Term::Arg(0)));
        b.define(
            "f",
            1,
            FunctionBody::Schema { kind: SchemaKind::Ode1, g: "g0".into(), steps: vec!["kbad".into()] },
        );
        let prog = b.finish("f");
        // validation cannot see the range; evaluation must catch it
        assert!(validate(&prog).is_empty());
        assert!(matches!(
            prog.eval("f", &[big(3)]),
            Err(EvalError::SchemaViolation { .. })
        ));
    }

    #[test]
    fn static_g_range_violation_is_diagnosed() {
        let mut b = ProgramBuilder::new();
        b.define("g2", 0, FunctionBody::Basic(Basic::Const(big(2))));
        b.define("k1", 1, FunctionBody::Basic(Basic::One));
        b.define(
            "f",
            1,
            FunctionBody::Schema { kind: SchemaKind::TwoOde, g: "g2".into(), steps: vec!["k1".into()] },
        );
        let prog = b.finish("f");
        let diags = validate(&prog);
        assert!(diags.iter().any(|d| d.message.contains("g out of range")), "{diags:?}");
    }

    #[test]
    fn b0ode_requires_f_under_sg() {
        let mut b = ProgramBuilder::new();
        b.define("g0", 0, FunctionBody::Basic(Basic::Zero));
        b.define("h", 1, FunctionBody::Basic(Basic::One));
        b.define(
            "f",
            1,
            FunctionBody::Schema {
                kind: SchemaKind::B0Ode { k_expr: SgExpr::FCall },
                g: "g0".into(),
                steps: vec!["h".into()],
            },
        );
        let prog = b.finish("f");
        let diags = validate(&prog);
        assert!(diags.iter().any(|d| d.message.contains("sign function")), "{diags:?}");
    }

    #[test]
    fn composition_with_sg_and_sub() {
        // sg(5 - 9) = 0
        let mut b = ProgramBuilder::new();
        b.define_term(
            "f",
            2,
            &Term::sg(Term::sub(Term::Arg(0), Term::Arg(1))),
        );
        let prog = b.finish("f");
        assert_eq!(prog.eval("f", &[big(5), big(9)]).unwrap(), big(0));
        assert_eq!(prog.eval("f", &[big(9), big(5)]).unwrap(), big(1));
    }

    #[test]
    fn projection_program() {
        let mut b = ProgramBuilder::new();
        b.define("id", 1, FunctionBody::Basic(Basic::Proj(0)));
        let prog = b.finish("id");
        assert_eq!(prog.eval("id", &[big(42)]).unwrap(), big(42));
    }

    #[test]
    fn cycle_is_rejected() {
        let mut b = ProgramBuilder::new();
        b.define("a", 1, FunctionBody::Compose { outer: "b".into(), inners: vec!["b".into()] });
        b.define("b", 1, FunctionBody::Compose { outer: "a".into(), inners: vec!["a".into()] });
        let prog = b.finish("a");
        let diags = validate(&prog);
        assert!(diags.iter().any(|d| d.message.contains("cycle")));
    }

    #[test]
    fn lambda_schema_steps_where_lambda_changes() {
        // λ(x) = ℓ(x) recovers ℓ-ODE semantics through the generic stepper;
        // h(x, f) = f + 1 matches ℓ-ODE₁ with k ≡ 1
        let mut b = ProgramBuilder::new();
        b.define("g0", 0, FunctionBody::Basic(Basic::Zero));
        b.define_term("lam", 1, &Term::len(Term::Arg(0)));
        b.define_term("h", 2, &Term::add(Term::Arg(1), Term::int(1)));
        b.define(
            "f",
            1,
            FunctionBody::Schema {
                kind: SchemaKind::Lambda { lambda: "lam".into() },
                g: "g0".into(),
                steps: vec!["h".into()],
            },
        );
        let prog = b.finish("f");
        assert!(validate(&prog).is_empty(), "{:?}", validate(&prog));
        assert_eq!(prog.eval("f", &[big(7)]).unwrap(), big(7));
    }
}
