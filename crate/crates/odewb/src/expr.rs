//! sg-polynomial expressions: representation, exact evaluation and the
//! degree calculus used to validate schema side conditions.
//!
//! An expression ranges over the signature `{+, -, ÷2, ×}` plus the sign
//! function `sg`, with integer constants, named variables and two kinds of
//! designated call slots: `FCall` (the recursively defined function) and
//! `HCall(i)` (the i-th step function value). An expression is *limited*
//! when it contains no `×` node.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Tree of a (possibly limited) sg-polynomial expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SgExpr {
    Const(BigInt),
    Var(String),
    /// Slot for the value of the recursively defined function `f(x, ȳ)`.
    FCall,
    /// Slot for the value of the i-th step function (`h`, `k`, `h0`, ...).
    HCall(usize),
    Add(Box<SgExpr>, Box<SgExpr>),
    Sub(Box<SgExpr>, Box<SgExpr>),
    Div2(Box<SgExpr>),
    Mul(Box<SgExpr>, Box<SgExpr>),
    Sg(Box<SgExpr>),
}

/// Set of identifiers a degree query ranges over. `FCall` participates as a
/// distinguished member so linearity in `f` can be asked directly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
    includes_fcall: bool,
}

impl VarSet {
    pub fn of_vars<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        VarSet {
            names: names.into_iter().map(Into::into).collect(),
            includes_fcall: false,
        }
    }

    /// The set `{f}`: degree queries about the recursive slot.
    pub fn fcall() -> Self {
        VarSet {
            names: Vec::new(),
            includes_fcall: true,
        }
    }

    pub fn with_fcall(mut self) -> Self {
        self.includes_fcall = true;
        self
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn contains_fcall(&self) -> bool {
        self.includes_fcall
    }
}

/// Degree-based classification of an expression w.r.t. a variable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linearity {
    EssentiallyConstant,
    EssentiallyLinear,
    Higher,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("h-slot index {index} out of range (only {available} step values)")]
    HSlotOutOfRange { index: usize, available: usize },
}

impl SgExpr {
    pub fn constant(v: i64) -> Self {
        SgExpr::Const(BigInt::from(v))
    }

    pub fn var(name: &str) -> Self {
        SgExpr::Var(name.to_string())
    }

    pub fn add(l: SgExpr, r: SgExpr) -> Self {
        SgExpr::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: SgExpr, r: SgExpr) -> Self {
        SgExpr::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: SgExpr, r: SgExpr) -> Self {
        SgExpr::Mul(Box::new(l), Box::new(r))
    }

    pub fn div2(e: SgExpr) -> Self {
        SgExpr::Div2(Box::new(e))
    }

    pub fn sg(e: SgExpr) -> Self {
        SgExpr::Sg(Box::new(e))
    }

    /// `cosg(e) = 1 - sg(e)`; sugar kept out of the core signature.
    pub fn cosg(e: SgExpr) -> Self {
        SgExpr::sub(SgExpr::constant(1), SgExpr::sg(e))
    }

    /// True iff no `×` node occurs anywhere, even under `sg`.
    pub fn is_limited(&self) -> bool {
        match self {
            SgExpr::Const(_) | SgExpr::Var(_) | SgExpr::FCall | SgExpr::HCall(_) => true,
            SgExpr::Add(l, r) | SgExpr::Sub(l, r) => l.is_limited() && r.is_limited(),
            SgExpr::Div2(a) | SgExpr::Sg(a) => a.is_limited(),
            SgExpr::Mul(_, _) => false,
        }
    }

    /// Inductive degree of the set `s` in this expression.
    ///
    /// Member variables count 1, constants and non-members 0, `sg(·)` is
    /// always 0, `÷2` is transparent, `+`/`-` take the max and `×` the sum.
    pub fn degree(&self, s: &VarSet) -> u32 {
        match self {
            SgExpr::Const(_) => 0,
            SgExpr::Var(name) => u32::from(s.contains_var(name)),
            SgExpr::FCall => u32::from(s.contains_fcall()),
            SgExpr::HCall(_) => 0,
            SgExpr::Add(l, r) | SgExpr::Sub(l, r) => l.degree(s).max(r.degree(s)),
            SgExpr::Div2(a) => a.degree(s),
            SgExpr::Mul(l, r) => l.degree(s) + r.degree(s),
            SgExpr::Sg(_) => 0,
        }
    }

    pub fn classify(&self, s: &VarSet) -> Linearity {
        match self.degree(s) {
            0 => Linearity::EssentiallyConstant,
            1 => Linearity::EssentiallyLinear,
            _ => Linearity::Higher,
        }
    }

    /// Does `FCall` occur anywhere in the tree?
    pub fn mentions_fcall(&self) -> bool {
        match self {
            SgExpr::FCall => true,
            SgExpr::Const(_) | SgExpr::Var(_) | SgExpr::HCall(_) => false,
            SgExpr::Add(l, r) | SgExpr::Sub(l, r) | SgExpr::Mul(l, r) => {
                l.mentions_fcall() || r.mentions_fcall()
            }
            SgExpr::Div2(a) | SgExpr::Sg(a) => a.mentions_fcall(),
        }
    }

    /// Does every occurrence of `FCall` sit beneath at least one `Sg` node?
    pub fn fcall_only_under_sg(&self) -> bool {
        match self {
            SgExpr::FCall => false,
            SgExpr::Const(_) | SgExpr::Var(_) | SgExpr::HCall(_) => true,
            SgExpr::Add(l, r) | SgExpr::Sub(l, r) | SgExpr::Mul(l, r) => {
                l.fcall_only_under_sg() && r.fcall_only_under_sg()
            }
            SgExpr::Div2(a) => a.fcall_only_under_sg(),
            SgExpr::Sg(_) => true,
        }
    }

    /// Does every occurrence of `FCall` appear exactly as `sg(f - c)` for
    /// one of the constants in `cs`?
    pub fn fcall_only_as_sg_sub_const(&self, cs: &[BigInt]) -> bool {
        match self {
            SgExpr::FCall => false,
            SgExpr::Const(_) | SgExpr::Var(_) | SgExpr::HCall(_) => true,
            SgExpr::Add(l, r) | SgExpr::Sub(l, r) | SgExpr::Mul(l, r) => {
                l.fcall_only_as_sg_sub_const(cs) && r.fcall_only_as_sg_sub_const(cs)
            }
            SgExpr::Div2(a) => a.fcall_only_as_sg_sub_const(cs),
            SgExpr::Sg(inner) => match inner.as_ref() {
                SgExpr::Sub(l, r) => matches!(
                    (l.as_ref(), r.as_ref()),
                    (SgExpr::FCall, SgExpr::Const(c)) if cs.contains(c)
                ),
                other => other.fcall_only_as_sg_sub_const(cs) && !other.mentions_fcall(),
            },
        }
    }

    /// Largest h-slot index used, if any.
    pub fn max_hslot(&self) -> Option<usize> {
        match self {
            SgExpr::HCall(i) => Some(*i),
            SgExpr::Const(_) | SgExpr::Var(_) | SgExpr::FCall => None,
            SgExpr::Add(l, r) | SgExpr::Sub(l, r) | SgExpr::Mul(l, r) => {
                l.max_hslot().max(r.max_hslot())
            }
            SgExpr::Div2(a) | SgExpr::Sg(a) => a.max_hslot(),
        }
    }
}

/// `sg(x) = 1` iff `x > 0`, else 0.
pub fn sg_int(x: &BigInt) -> BigInt {
    if x.is_positive() {
        BigInt::one()
    } else {
        BigInt::zero()
    }
}

/// Exact evaluation; `÷2` is floor division, `sg` the sign test above.
pub fn eval_expr(
    e: &SgExpr,
    env: &HashMap<String, BigInt>,
    fval: &BigInt,
    hvals: &[BigInt],
) -> Result<BigInt, ExprError> {
    match e {
        SgExpr::Const(c) => Ok(c.clone()),
        SgExpr::Var(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| ExprError::UnboundVariable(name.clone())),
        SgExpr::FCall => Ok(fval.clone()),
        SgExpr::HCall(i) => hvals.get(*i).cloned().ok_or(ExprError::HSlotOutOfRange {
            index: *i,
            available: hvals.len(),
        }),
        SgExpr::Add(l, r) => Ok(eval_expr(l, env, fval, hvals)? + eval_expr(r, env, fval, hvals)?),
        SgExpr::Sub(l, r) => Ok(eval_expr(l, env, fval, hvals)? - eval_expr(r, env, fval, hvals)?),
        SgExpr::Div2(a) => Ok(eval_expr(a, env, fval, hvals)?.div_floor(&BigInt::from(2))),
        SgExpr::Mul(l, r) => Ok(eval_expr(l, env, fval, hvals)? * eval_expr(r, env, fval, hvals)?),
        SgExpr::Sg(a) => Ok(sg_int(&eval_expr(a, env, fval, hvals)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, i64)]) -> HashMap<String, BigInt> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), BigInt::from(*v)))
            .collect()
    }

    fn ev(e: &SgExpr, env_pairs: &[(&str, i64)]) -> BigInt {
        eval_expr(e, &env(env_pairs), &BigInt::zero(), &[]).unwrap()
    }

    #[test]
    fn sg_of_negative_is_zero() {
        assert_eq!(ev(&SgExpr::sg(SgExpr::constant(-4)), &[]), BigInt::zero());
        assert_eq!(ev(&SgExpr::sg(SgExpr::constant(3)), &[]), BigInt::one());
        assert_eq!(ev(&SgExpr::sg(SgExpr::constant(0)), &[]), BigInt::zero());
    }

    #[test]
    fn div2_is_floor_division() {
        assert_eq!(ev(&SgExpr::div2(SgExpr::constant(-7)), &[]), BigInt::from(-4));
        assert_eq!(ev(&SgExpr::div2(SgExpr::constant(7)), &[]), BigInt::from(3));
    }

    #[test]
    fn additive_identity() {
        let e = SgExpr::add(SgExpr::var("x"), SgExpr::constant(0));
        assert_eq!(ev(&e, &[("x", 9)]), BigInt::from(9));
    }

    #[test]
    fn unbound_variable_errors() {
        let e = SgExpr::var("nope");
        assert_eq!(
            eval_expr(&e, &HashMap::new(), &BigInt::zero(), &[]),
            Err(ExprError::UnboundVariable("nope".into()))
        );
    }

    #[test]
    fn hslot_out_of_range_errors() {
        let e = SgExpr::HCall(2);
        assert!(matches!(
            eval_expr(&e, &HashMap::new(), &BigInt::zero(), &[BigInt::one()]),
            Err(ExprError::HSlotOutOfRange { index: 2, available: 1 })
        ));
    }

    #[test]
    fn degree_examples() {
        let x = || SgExpr::var("x");
        let xs = VarSet::of_vars(["x"]);
        // sg(x*x) has degree 0
        assert_eq!(SgExpr::sg(SgExpr::mul(x(), x())).degree(&xs), 0);
        // x*x + y has degree 2 in {x}
        let e = SgExpr::add(SgExpr::mul(x(), x()), SgExpr::var("y"));
        assert_eq!(e.degree(&xs), 2);
        assert_eq!(SgExpr::constant(5).degree(&xs), 0);
    }

    #[test]
    fn classify_examples() {
        let fset = VarSet::fcall();
        assert_eq!(
            SgExpr::sg(SgExpr::FCall).classify(&fset),
            Linearity::EssentiallyConstant
        );
        let lin = SgExpr::add(SgExpr::mul(SgExpr::var("a"), SgExpr::FCall), SgExpr::var("b"));
        assert_eq!(lin.classify(&fset), Linearity::EssentiallyLinear);
        let quad = SgExpr::mul(SgExpr::FCall, SgExpr::FCall);
        assert_eq!(quad.classify(&fset), Linearity::Higher);
    }

    #[test]
    fn limitedness() {
        let ok = SgExpr::add(SgExpr::var("x"), SgExpr::div2(SgExpr::var("y")));
        assert!(ok.is_limited());
        let bad = SgExpr::mul(SgExpr::constant(2), SgExpr::var("x"));
        assert!(!bad.is_limited());
        // a Mul under sg still disqualifies
        let hidden = SgExpr::sg(SgExpr::mul(SgExpr::var("x"), SgExpr::var("y")));
        assert!(!hidden.is_limited());
    }

    #[test]
    fn cosg_expands_to_core_signature() {
        let e = SgExpr::cosg(SgExpr::constant(-1));
        assert_eq!(ev(&e, &[]), BigInt::one());
        let e = SgExpr::cosg(SgExpr::constant(5));
        assert_eq!(ev(&e, &[]), BigInt::zero());
    }
}
