//! A small library of derived constructions: modular bit counting, bounded
//! quantifiers and bounded minimisation over 0/1 predicates, and the
//! conversion of the sign-toggling schema into 1-bounded recursion on
//! notation.

use num_bigint::BigInt;

use crate::engine::{
    Basic, EvalError, FunctionBody, Program, ProgramBuilder, SchemaKind, Term,
};

/// `k(w, y) = BIT(ℓ(w), y)`: at the sampled point `α(u)` this reads bit `u`
/// of `y`, so a length-driven accumulation of `k` scans the bits of `y`.
fn bit_scan_step(b: &mut ProgramBuilder, hint: &str) -> String {
    let term = Term::bit(Term::len(Term::Arg(0)), Term::Arg(1));
    let name = format!("{hint}_k");
    b.define_term(&name, 2, &term);
    name
}

fn define_zero(b: &mut ProgramBuilder, name: &str, arity: usize) {
    b.define(name, arity, FunctionBody::Basic(Basic::Zero));
}

/// `cmodn(x) = (number of 1 bits of x) mod n`, computed by the mod-n
/// counting schema scanning the bits of `x`.
pub fn build_cmodn(n: u32) -> Program {
    let mut b = ProgramBuilder::new();
    define_zero(&mut b, "cmodn_g", 1);
    let k = bit_scan_step(&mut b, "cmodn");
    b.define(
        "cmodn_f",
        2,
        FunctionBody::Schema { kind: SchemaKind::NOde { n }, g: "cmodn_g".into(), steps: vec![k] },
    );
    b.define_term("cmodn", 1, &Term::Call("cmodn_f".into(), vec![Term::Arg(0), Term::Arg(0)]));
    b.finish("cmodn")
}

/// Same construction over a different counting schema; used to confirm the
/// mod-n counting variants agree.
pub fn build_cmodn_with(kind: SchemaKind) -> Program {
    let mut b = ProgramBuilder::new();
    define_zero(&mut b, "cmodn_g", 1);
    let k = bit_scan_step(&mut b, "cmodn");
    b.define("cmodn_f", 2, FunctionBody::Schema { kind, g: "cmodn_g".into(), steps: vec![k] });
    b.define_term("cmodn", 1, &Term::Call("cmodn_f".into(), vec![Term::Arg(0), Term::Arg(0)]));
    b.finish("cmodn")
}

/// `bcount(x)` = the number of 1 bits of `x`, via plain accumulation.
pub fn build_bcount() -> Program {
    let mut b = ProgramBuilder::new();
    define_bcount(&mut b);
    b.finish("bcount")
}

fn define_bcount(b: &mut ProgramBuilder) {
    define_zero(b, "bcount_g", 1);
    let k = bit_scan_step(b, "bcount");
    b.define(
        "bcount_f",
        2,
        FunctionBody::Schema { kind: SchemaKind::ZeroOde, g: "bcount_g".into(), steps: vec![k] },
    );
    b.define_term("bcount", 1, &Term::Call("bcount_f".into(), vec![Term::Arg(0), Term::Arg(0)]));
}

/// `modn(x) = bcount(x) mod n`, reduced arithmetically:
/// `bcount(x) - n·⌊bcount(x)/n⌋`.
pub fn build_modn_via_bcount(n: u32) -> Program {
    let mut b = ProgramBuilder::new();
    define_bcount(&mut b);
    let bc = Term::Call("bcount".into(), vec![Term::Arg(0)]);
    let q = Term::Basic(Basic::Div, vec![bc.clone(), Term::int(n as i64)]);
    let term = Term::sub(bc, Term::Basic(Basic::Mul, vec![Term::int(n as i64), q]));
    b.define_term("modn", 1, &term);
    b.finish("modn")
}

fn args_range(from: usize, to: usize) -> Vec<Term> {
    (from..to).map(Term::Arg).collect()
}

/// Define `name(x, ȳ) = [∃ i ≤ ℓ(x): r(i, ȳ) = 1]` for a 0/1 predicate
/// `r` of arity `p + 1`. The accumulator collects `r(0), …, r(ℓ(x))` into
/// the bits of a scratch value whose sign is the answer.
pub fn define_sb_exists(b: &mut ProgramBuilder, name: &str, r: &str, p: usize) {
    let acc = define_exists_acc(b, name, r, p);
    let entry = Term::sg(Term::Call(acc, args_range(0, p + 1)));
    b.define_term(name, p + 1, &entry);
}

/// The raw accumulator behind [`define_sb_exists`]: an ℓ-ODE₁ whose value
/// is nonzero iff some `r(i, ȳ)` with `i ≤ ℓ(x)` holds.
fn define_exists_acc(b: &mut ProgramBuilder, hint: &str, r: &str, p: usize) -> String {
    // g(ȳ) = r(0, ȳ)
    let g = format!("{hint}_g");
    let mut g_args = vec![Term::int(0)];
    g_args.extend(args_range(0, p));
    b.define_term(&g, p, &Term::Call(r.into(), g_args));
    // k(w, ȳ) = r(ℓ(w) + 1, ȳ): at point α(u) this tests index u + 1
    let k = format!("{hint}_k");
    let mut k_args = vec![Term::add(Term::len(Term::Arg(0)), Term::int(1))];
    k_args.extend(args_range(1, p + 1));
    b.define_term(&k, p + 1, &Term::Call(r.into(), k_args));
    let acc = format!("{hint}_acc");
    b.define(&acc, p + 1, FunctionBody::Schema { kind: SchemaKind::Ode1, g, steps: vec![k] });
    acc
}

/// Define the sharply bounded minimum over 0/1 values:
/// `name(x, ȳ) = min { g(i, ȳ) : i ≤ ℓ(x), h(i, ȳ) = 1 }`, with the empty
/// minimum equal to 1. For 0/1 `g` this is
/// `cosg(∃ i ≤ ℓ(x): h(i, ȳ) ∧ ¬g(i, ȳ))`.
pub fn define_sb_min01(b: &mut ProgramBuilder, name: &str, g: &str, h: &str, p: usize) {
    let r = format!("{name}_viol");
    let idx_args = args_range(0, p + 1);
    b.define_term(
        &r,
        p + 1,
        &Term::band(
            Term::Call(h.into(), idx_args.clone()),
            Term::cosg(Term::Call(g.into(), idx_args)),
        ),
    );
    let acc = define_exists_acc(b, name, &r, p);
    b.define_term(name, p + 1, &Term::cosg(Term::sg(Term::Call(acc, args_range(0, p + 1)))));
}

/// Define `name(x, ȳ) = [∀ i ≤ ℓ(x): r(i, ȳ) = 1]` by duality.
pub fn define_sb_forall(b: &mut ProgramBuilder, name: &str, r: &str, p: usize) {
    // ¬r, then ∀ = ¬∃¬
    let negr = format!("{name}_negr");
    b.define_term(&negr, p + 1, &Term::cosg(Term::Call(r.into(), args_range(0, p + 1))));
    let acc = define_exists_acc(b, name, &negr, p);
    let entry = Term::cosg(Term::Call(acc, args_range(0, p + 1)));
    b.define_term(name, p + 1, &entry);
}

/// Define `name(x, ȳ) = μ i ≤ ℓ(x). r(i, ȳ)`: the least witness, or the
/// sentinel `ℓ(x) + 1` when no `i ≤ ℓ(x)` satisfies `r`.
///
/// The accumulator pushes one bit per length change, set from the step `u`
/// at which a witness `≤ u + 1` exists; the position of its leading 1 bit
/// then encodes the least witness, recovered as `ℓ(x) + 1 - ℓ(acc)`.
pub fn define_sb_mu(b: &mut ProgramBuilder, name: &str, r: &str, p: usize) {
    let ex_acc = define_exists_acc(b, &format!("{name}_ex"), r, p);
    // g(ȳ) = r(0, ȳ)
    let g = format!("{name}_g");
    let mut g_args = vec![Term::int(0)];
    g_args.extend(args_range(0, p));
    b.define_term(&g, p, &Term::Call(r.into(), g_args));
    // k(w, ȳ) = sg(exists-acc(2w + 1, ȳ)): prefix witness test up to
    // ℓ(2w + 1) = ℓ(w) + 1
    let k = format!("{name}_k");
    let mut k_args = vec![Term::add(
        Term::add(Term::Arg(0), Term::Arg(0)),
        Term::int(1),
    )];
    k_args.extend(args_range(1, p + 1));
    b.define_term(&k, p + 1, &Term::sg(Term::Call(ex_acc, k_args)));
    let acc = format!("{name}_acc");
    b.define(&acc, p + 1, FunctionBody::Schema { kind: SchemaKind::Ode1, g, steps: vec![k] });
    // μ = ℓ(x) + 1 - ℓ(acc(x, ȳ))
    let entry = Term::sub(
        Term::add(Term::len(Term::Arg(0)), Term::int(1)),
        Term::len(Term::Call(acc, args_range(0, p + 1))),
    );
    b.define_term(name, p + 1, &entry);
}

/// Convert a sign-toggling (`2ODE`) definition into 1-bounded recursion on
/// notation computing the same function, in a fresh program containing all
/// original definitions plus the converted one under `out_name`.
///
/// The recursion consumes the bits of `x` most significant first; the
/// prefix before step `u` has length `u`, so snapping the prefix to the
/// sampled point `α(u)` lets the step reuse the original toggle `k` exactly:
/// `h(z, ȳ, v) = v ⊕ k(α(ℓ(z)), ȳ)`.
pub fn twoode_to_onebrn(prog: &Program, name: &str, out_name: &str) -> Result<Program, EvalError> {
    let def = prog
        .get(name)
        .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
    let FunctionBody::Schema { kind: SchemaKind::TwoOde, g, steps } = &def.body else {
        return Err(EvalError::Domain(format!(
            "`{name}` is not a sign-toggling schema definition"
        )));
    };
    let k = steps[0].clone();
    let p = def.arity - 1;
    let mut b = ProgramBuilder::new();
    for d in &prog.defs {
        b.push(d.clone());
    }
    // h(z, ȳ, v) = v + kk - 2·v·kk  with  kk = k(α(ℓ(z)), ȳ)
    let v = Term::Arg(p + 1);
    let mut k_args = vec![Term::Basic(Basic::Alpha, vec![Term::len(Term::Arg(0))])];
    k_args.extend(args_range(1, p + 1));
    let kk = Term::Call(k, k_args);
    let toggle = Term::sub(
        Term::add(v.clone(), kk.clone()),
        Term::Basic(Basic::Mul, vec![Term::int(2), Term::Basic(Basic::Mul, vec![v, kk])]),
    );
    let h = format!("{out_name}_h");
    b.define_term(&h, p + 2, &toggle);
    b.define(
        out_name,
        p + 1,
        FunctionBody::Schema {
            kind: SchemaKind::Kbrn { bound: BigInt::from(1) },
            g: g.clone(),
            steps: vec![h.clone(), h],
        },
    );
    let mut out = b.finish(out_name);
    out.conn = prog.conn.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::validate;
    use crate::oracle;

    fn big(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn cmodn_counts_bits_mod_n() {
        for n in [2u32, 3, 5] {
            let prog = build_cmodn(n);
            assert!(validate(&prog).is_empty(), "{:?}", validate(&prog));
            for x in 0u64..512 {
                assert_eq!(
                    prog.eval_entry(&[big(x)]).unwrap(),
                    big(oracle::popcount_mod(x, n)),
                    "n = {n}, x = {x}"
                );
            }
        }
    }

    #[test]
    fn bcount_is_popcount() {
        let prog = build_bcount();
        assert!(validate(&prog).is_empty());
        for x in 0u64..512 {
            assert_eq!(prog.eval_entry(&[big(x)]).unwrap(), big(oracle::popcount(x)));
        }
    }

    #[test]
    fn modn_via_bcount_reduces() {
        for n in [2u32, 3, 5] {
            let prog = build_modn_via_bcount(n);
            assert!(validate(&prog).is_empty());
            for x in 0u64..512 {
                assert_eq!(prog.eval_entry(&[big(x)]).unwrap(), big(oracle::popcount_mod(x, n)));
            }
        }
    }

    /// r(i, y) = BIT(i, y): the bits of `y` as a predicate on `i`.
    fn bit_predicate(b: &mut ProgramBuilder) {
        b.define_term("r", 2, &Term::bit(Term::Arg(0), Term::Arg(1)));
    }

    #[test]
    fn exists_matches_brute_force() {
        let mut b = ProgramBuilder::new();
        bit_predicate(&mut b);
        define_sb_exists(&mut b, "ex", "r", 1);
        let prog = b.finish("ex");
        assert!(validate(&prog).is_empty(), "{:?}", validate(&prog));
        for x in 0u64..64 {
            for y in 0u64..64 {
                let bound = crate::engine::len_int(&big(x));
                let want = (0..=bound).any(|i| y >> i & 1 == 1);
                assert_eq!(
                    prog.eval_entry(&[big(x), big(y)]).unwrap(),
                    big(u64::from(want)),
                    "x = {x}, y = {y}"
                );
            }
        }
    }

    #[test]
    fn forall_is_dual() {
        let mut b = ProgramBuilder::new();
        bit_predicate(&mut b);
        define_sb_forall(&mut b, "fa", "r", 1);
        let prog = b.finish("fa");
        for x in 0u64..32 {
            for y in 0u64..64 {
                let bound = crate::engine::len_int(&big(x));
                let want = (0..=bound).all(|i| y >> i & 1 == 1);
                assert_eq!(prog.eval_entry(&[big(x), big(y)]).unwrap(), big(u64::from(want)));
            }
        }
    }

    #[test]
    fn mu_finds_least_witness_or_sentinel() {
        let mut b = ProgramBuilder::new();
        bit_predicate(&mut b);
        define_sb_mu(&mut b, "mu", "r", 1);
        let prog = b.finish("mu");
        for x in 0u64..64 {
            for y in 0u64..64 {
                let bound = crate::engine::len_int(&big(x));
                let want = (0..=bound)
                    .find(|i| y >> i & 1 == 1)
                    .unwrap_or(bound + 1);
                assert_eq!(
                    prog.eval_entry(&[big(x), big(y)]).unwrap(),
                    big(want),
                    "x = {x}, y = {y}"
                );
            }
        }
    }

    #[test]
    fn onebrn_conversion_preserves_parity() {
        // parity of the bits of x via the converted recursion
        let prog = build_cmodn_with(SchemaKind::TwoOde);
        let conv = twoode_to_onebrn(&prog, "cmodn_f", "brn_f").unwrap();
        assert!(validate(&conv).is_empty(), "{:?}", validate(&conv));
        for x in 0u64..512 {
            assert_eq!(
                conv.eval("brn_f", &[big(x), big(x)]).unwrap(),
                big(oracle::popcount_mod(x, 2)),
                "x = {x}"
            );
        }
    }
}
