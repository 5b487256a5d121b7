//! The textual program format.
//!
//! A program file is a sequence of S-expression forms, optionally preceded
//! by the version header line `;; odewb-program v1`:
//!
//! ```text
//! (def <name> (<param>…) <body>)
//! (entry <name>)
//! ```
//!
//! A body is one of:
//!
//! * a low-level form — `(basic <sym>)`, `(proj <i>)`, `(const <c>)`,
//!   `(conn <query> [<level>])`, or `(compose <outer> <inner>…)`;
//! * a schema form — `(ode1 <g> <k>)`, `(2ode <g> <k>)`,
//!   `(node <n> <g> <k>)`, `(node* <n> <g> <k>)`, `(nsnode <n> <c> <g> <k>)`,
//!   `(0ode <g> <k>)`, `(lambda-ode <λ> <g> <h>)`, `(ode2up <bound> <g> <h>)`,
//!   `(pode <A> <B> <g> <h>)`, `(b0ode <K> <g> <h>)`,
//!   `(bode <B> (<c>…) <g> <h>)`, `(crn <g> <h0> <h1>)`, or
//!   `(kbrn <k> <g> <h0> <h1>)`, where `<g>`, `<k>`, `<h·>`, `<λ>` and
//!   `<bound>` are names of other definitions;
//! * or an expression over the parameters — integers, parameter names,
//!   calls `(<name> <arg>…)`, and the operators `+ - * div2 sg cosg len
//!   bit smash alpha div`. Expression bodies are lowered to compositions,
//!   introducing auxiliary definitions (named with a `$`).
//!
//! Inside the `<A>`, `<B>` and `<K>` slots of `pode`, `b0ode` and `bode`,
//! the reserved atoms are `x` (the sampled point), `y1 y2 …` (parameters),
//! `f` (the recursive value) and `h0` (the step value, alias `h`), combined
//! with `+ - * div2 sg cosg` and integers.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::engine::{
    Basic, ConnQuery, FunctionBody, Program, ProgramBuilder, SchemaKind, Term,
};
use crate::expr::SgExpr;
use crate::sexpr::{parse_all, Sexpr, SexprError};

pub const PROGRAM_HEADER: &str = ";; odewb-program v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramTextError {
    #[error("{0}")]
    Sexpr(#[from] SexprError),
    #[error("unknown header `{0}`")]
    BadHeader(String),
    #[error("in `{ctx}`: {msg}")]
    Form { ctx: String, msg: String },
}

fn form_err<T>(ctx: &str, msg: impl Into<String>) -> Result<T, ProgramTextError> {
    Err(ProgramTextError::Form { ctx: ctx.to_string(), msg: msg.into() })
}

const RESERVED_HEADS: &[&str] = &[
    "def", "entry", "basic", "proj", "const", "conn", "compose", "ode1", "2ode", "node", "node*",
    "nsnode", "0ode", "lambda-ode", "ode2up", "pode", "b0ode", "bode", "crn", "kbrn",
];

/// Parse a program file.
pub fn parse_program(text: &str) -> Result<Program, ProgramTextError> {
    // the header is a `;` comment to the reader; reject other `;;` headers
    for line in text.lines() {
        let l = line.trim();
        if l.is_empty() {
            continue;
        }
        if l.starts_with(";;") && l != PROGRAM_HEADER {
            return Err(ProgramTextError::BadHeader(l.to_string()));
        }
        if !l.starts_with(';') {
            break;
        }
    }
    let forms = parse_all(text)?;
    let mut b = ProgramBuilder::new();
    let mut entry: Option<String> = None;
    for form in &forms {
        let Sexpr::List(items) = form else {
            return form_err("<top>", format!("expected a (def …) or (entry …) form, got {form}"));
        };
        match items.first() {
            Some(Sexpr::Sym(s)) if s == "def" => parse_def(&mut b, items)?,
            Some(Sexpr::Sym(s)) if s == "entry" => {
                let [_, Sexpr::Sym(name)] = &items[..] else {
                    return form_err("entry", "expected (entry <name>)");
                };
                entry = Some(name.clone());
            }
            _ => return form_err("<top>", format!("expected a (def …) or (entry …) form, got {form}")),
        }
    }
    let mut prog = match entry {
        Some(e) => b.finish(&e),
        None => b.finish_anonymous(),
    };
    prog.conn = None;
    Ok(prog)
}

fn sym<'a>(ctx: &str, s: &'a Sexpr) -> Result<&'a str, ProgramTextError> {
    match s {
        Sexpr::Sym(name) => Ok(name),
        other => form_err(ctx, format!("expected a name, got {other}")),
    }
}

fn int(ctx: &str, s: &Sexpr) -> Result<BigInt, ProgramTextError> {
    match s {
        Sexpr::Int(v) => Ok(v.clone()),
        other => form_err(ctx, format!("expected an integer, got {other}")),
    }
}

fn small(ctx: &str, s: &Sexpr) -> Result<u32, ProgramTextError> {
    int(ctx, s)?
        .to_u32()
        .ok_or(())
        .or_else(|_| form_err(ctx, "value out of range"))
}

fn parse_def(b: &mut ProgramBuilder, items: &[Sexpr]) -> Result<(), ProgramTextError> {
    let [_, name_s, params_s, body_s] = items else {
        return form_err("def", "expected (def <name> (<param>…) <body>)");
    };
    let name = sym("def", name_s)?.to_string();
    let Sexpr::List(param_forms) = params_s else {
        return form_err(&name, "expected a parameter list");
    };
    let mut params = Vec::new();
    for p in param_forms {
        params.push(sym(&name, p)?.to_string());
    }
    let arity = params.len();

    // low-level and schema forms are dispatched on a reserved head symbol
    if let Sexpr::List(body_items) = body_s {
        if let Some(Sexpr::Sym(head)) = body_items.first() {
            if RESERVED_HEADS.contains(&head.as_str()) && head != "def" && head != "entry" {
                let body = parse_special_body(&name, head, body_items)?;
                b.define(&name, arity, body);
                return Ok(());
            }
        }
    }
    // otherwise: expression sugar over the parameters
    let term = parse_term(&name, &params, body_s)?;
    b.define_term(&name, arity, &term);
    Ok(())
}

fn parse_special_body(
    ctx: &str,
    head: &str,
    items: &[Sexpr],
) -> Result<FunctionBody, ProgramTextError> {
    let rest = &items[1..];
    let name_at = |i: usize| -> Result<String, ProgramTextError> {
        rest.get(i)
            .ok_or(())
            .or_else(|_| form_err(ctx, format!("`{head}` form is missing argument {i}")))
            .and_then(|s| sym(ctx, s).map(str::to_string))
    };
    let need = |n: usize| -> Result<(), ProgramTextError> {
        if rest.len() == n {
            Ok(())
        } else {
            form_err(ctx, format!("`{head}` takes {n} argument(s), got {}", rest.len()))
        }
    };
    let schema = |kind: SchemaKind, g: String, steps: Vec<String>| {
        Ok(FunctionBody::Schema { kind, g, steps })
    };
    match head {
        "basic" => {
            need(1)?;
            let sym_name = name_at(0)?;
            let basic = match sym_name.as_str() {
                "zero" => Basic::Zero,
                "one" => Basic::One,
                "sg" => Basic::Sg,
                "cosg" => Basic::Cosg,
                "len" => Basic::Len,
                "add" => Basic::Add,
                "sub" => Basic::Sub,
                "div2" => Basic::Div2,
                "smash" => Basic::Smash,
                "bit" => Basic::Bit,
                "alpha" => Basic::Alpha,
                "mul" => Basic::Mul,
                "div" => Basic::Div,
                other => return form_err(ctx, format!("unknown basic symbol `{other}`")),
            };
            Ok(FunctionBody::Basic(basic))
        }
        "proj" => {
            need(1)?;
            Ok(FunctionBody::Basic(Basic::Proj(small(ctx, &rest[0])? as usize)))
        }
        "const" => {
            need(1)?;
            Ok(FunctionBody::Basic(Basic::Const(int(ctx, &rest[0])?)))
        }
        "conn" => {
            let q = name_at(0)?;
            let level = |i: usize| small(ctx, &rest[i]).map(|v| v as usize);
            let query = match q.as_str() {
                "any" => {
                    need(1)?;
                    ConnQuery::AnyPred
                }
                "l0in" => {
                    need(1)?;
                    ConnQuery::L0In
                }
                "l0neg" => {
                    need(1)?;
                    ConnQuery::L0Neg
                }
                "pred" => {
                    need(2)?;
                    ConnQuery::Pred(level(1)?)
                }
                "level" => {
                    need(2)?;
                    ConnQuery::Level(level(1)?)
                }
                "const0" => {
                    need(2)?;
                    ConnQuery::Const0At(level(1)?)
                }
                "const1" => {
                    need(2)?;
                    ConnQuery::Const1At(level(1)?)
                }
                other => return form_err(ctx, format!("unknown connection query `{other}`")),
            };
            Ok(FunctionBody::Basic(Basic::Conn(query)))
        }
        "compose" => {
            if rest.is_empty() {
                return form_err(ctx, "`compose` needs an outer function");
            }
            let outer = name_at(0)?;
            let mut inners = Vec::new();
            for i in 1..rest.len() {
                inners.push(name_at(i)?);
            }
            Ok(FunctionBody::Compose { outer, inners })
        }
        "ode1" => {
            need(2)?;
            schema(SchemaKind::Ode1, name_at(0)?, vec![name_at(1)?])
        }
        "2ode" => {
            need(2)?;
            schema(SchemaKind::TwoOde, name_at(0)?, vec![name_at(1)?])
        }
        "0ode" => {
            need(2)?;
            schema(SchemaKind::ZeroOde, name_at(0)?, vec![name_at(1)?])
        }
        "node" => {
            need(3)?;
            schema(SchemaKind::NOde { n: small(ctx, &rest[0])? }, name_at(1)?, vec![name_at(2)?])
        }
        "node*" => {
            need(3)?;
            schema(
                SchemaKind::NOdeStar { n: small(ctx, &rest[0])? },
                name_at(1)?,
                vec![name_at(2)?],
            )
        }
        "nsnode" => {
            need(4)?;
            schema(
                SchemaKind::NonStrictNOde { n: small(ctx, &rest[0])?, c: int(ctx, &rest[1])? },
                name_at(2)?,
                vec![name_at(3)?],
            )
        }
        "lambda-ode" => {
            need(3)?;
            schema(SchemaKind::Lambda { lambda: name_at(0)? }, name_at(1)?, vec![name_at(2)?])
        }
        "ode2up" => {
            need(3)?;
            schema(SchemaKind::Ode2Up { bound: name_at(0)? }, name_at(1)?, vec![name_at(2)?])
        }
        "pode" => {
            need(4)?;
            let a = parse_sg_expr(ctx, &rest[0])?;
            let bx = parse_sg_expr(ctx, &rest[1])?;
            schema(SchemaKind::POde { a, b: bx }, name_at(2)?, vec![name_at(3)?])
        }
        "b0ode" => {
            need(3)?;
            let k_expr = parse_sg_expr(ctx, &rest[0])?;
            schema(SchemaKind::B0Ode { k_expr }, name_at(1)?, vec![name_at(2)?])
        }
        "bode" => {
            need(4)?;
            let bx = parse_sg_expr(ctx, &rest[0])?;
            let Sexpr::List(cs_forms) = &rest[1] else {
                return form_err(ctx, "`bode` needs a list of constants");
            };
            let mut cs = Vec::new();
            for c in cs_forms {
                cs.push(int(ctx, c)?);
            }
            schema(SchemaKind::BOde { b: bx, cs }, name_at(2)?, vec![name_at(3)?])
        }
        "crn" => {
            need(3)?;
            schema(SchemaKind::Crn, name_at(0)?, vec![name_at(1)?, name_at(2)?])
        }
        "kbrn" => {
            need(4)?;
            schema(
                SchemaKind::Kbrn { bound: int(ctx, &rest[0])? },
                name_at(1)?,
                vec![name_at(2)?, name_at(3)?],
            )
        }
        other => form_err(ctx, format!("unknown form `{other}`")),
    }
}

fn parse_term(ctx: &str, params: &[String], s: &Sexpr) -> Result<Term, ProgramTextError> {
    match s {
        Sexpr::Int(v) => Ok(Term::Int(v.clone())),
        Sexpr::Sym(name) => params
            .iter()
            .position(|p| p == name)
            .map(Term::Arg)
            .ok_or(())
            .or_else(|_| form_err(ctx, format!("unknown parameter `{name}`"))),
        Sexpr::List(items) => {
            let Some(Sexpr::Sym(head)) = items.first() else {
                return form_err(ctx, format!("expected an operator or call, got {s}"));
            };
            let mut args = Vec::new();
            for a in &items[1..] {
                args.push(parse_term(ctx, params, a)?);
            }
            let op = |basic: Basic, n: usize, args: Vec<Term>| {
                if args.len() == n {
                    Ok(Term::Basic(basic, args))
                } else {
                    form_err(ctx, format!("`{head}` takes {n} argument(s), got {}", args.len()))
                }
            };
            match head.as_str() {
                "+" => op(Basic::Add, 2, args),
                "-" => op(Basic::Sub, 2, args),
                "*" => op(Basic::Mul, 2, args),
                "div2" => op(Basic::Div2, 1, args),
                "sg" => op(Basic::Sg, 1, args),
                "cosg" => op(Basic::Cosg, 1, args),
                "len" => op(Basic::Len, 1, args),
                "bit" => op(Basic::Bit, 2, args),
                "smash" => op(Basic::Smash, 2, args),
                "alpha" => op(Basic::Alpha, 1, args),
                "div" => op(Basic::Div, 2, args),
                name if RESERVED_HEADS.contains(&name) => {
                    form_err(ctx, format!("`{name}` form is not valid in an expression"))
                }
                name => Ok(Term::Call(name.to_string(), args)),
            }
        }
    }
}

fn parse_sg_expr(ctx: &str, s: &Sexpr) -> Result<SgExpr, ProgramTextError> {
    match s {
        Sexpr::Int(v) => Ok(SgExpr::Const(v.clone())),
        Sexpr::Sym(name) => match name.as_str() {
            "f" => Ok(SgExpr::FCall),
            "h" | "h0" => Ok(SgExpr::HCall(0)),
            other if other == "x" || (other.starts_with('y') && other[1..].parse::<usize>().is_ok()) => {
                Ok(SgExpr::Var(other.to_string()))
            }
            other if other.starts_with('h') && other[1..].parse::<usize>().is_ok() => {
                Ok(SgExpr::HCall(other[1..].parse().unwrap()))
            }
            other => form_err(ctx, format!("unknown expression atom `{other}`")),
        },
        Sexpr::List(items) => {
            let Some(Sexpr::Sym(head)) = items.first() else {
                return form_err(ctx, format!("bad expression {s}"));
            };
            let sub = |i: usize| parse_sg_expr(ctx, &items[1 + i]);
            let need = |n: usize| -> Result<(), ProgramTextError> {
                if items.len() == n + 1 {
                    Ok(())
                } else {
                    form_err(ctx, format!("`{head}` takes {n} argument(s)"))
                }
            };
            match head.as_str() {
                "+" => {
                    need(2)?;
                    Ok(SgExpr::add(sub(0)?, sub(1)?))
                }
                "-" => {
                    need(2)?;
                    Ok(SgExpr::sub(sub(0)?, sub(1)?))
                }
                "*" => {
                    need(2)?;
                    Ok(SgExpr::mul(sub(0)?, sub(1)?))
                }
                "div2" => {
                    need(1)?;
                    Ok(SgExpr::div2(sub(0)?))
                }
                "sg" => {
                    need(1)?;
                    Ok(SgExpr::sg(sub(0)?))
                }
                "cosg" => {
                    need(1)?;
                    Ok(SgExpr::cosg(sub(0)?))
                }
                other => form_err(ctx, format!("unknown expression operator `{other}`")),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// writer

fn write_sg_expr(e: &SgExpr) -> Sexpr {
    let list = |head: &str, subs: Vec<Sexpr>| {
        let mut items = vec![Sexpr::Sym(head.to_string())];
        items.extend(subs);
        Sexpr::List(items)
    };
    match e {
        SgExpr::Const(c) => Sexpr::Int(c.clone()),
        SgExpr::Var(v) => Sexpr::Sym(v.clone()),
        SgExpr::FCall => Sexpr::Sym("f".into()),
        SgExpr::HCall(i) => Sexpr::Sym(format!("h{i}")),
        SgExpr::Add(l, r) => list("+", vec![write_sg_expr(l), write_sg_expr(r)]),
        SgExpr::Sub(l, r) => list("-", vec![write_sg_expr(l), write_sg_expr(r)]),
        SgExpr::Mul(l, r) => list("*", vec![write_sg_expr(l), write_sg_expr(r)]),
        SgExpr::Div2(s) => list("div2", vec![write_sg_expr(s)]),
        SgExpr::Sg(s) => list("sg", vec![write_sg_expr(s)]),
    }
}

fn write_body(body: &FunctionBody) -> Sexpr {
    let syms = |names: &[&str]| -> Vec<Sexpr> {
        names.iter().map(|n| Sexpr::Sym(n.to_string())).collect()
    };
    let list = |items: Vec<Sexpr>| Sexpr::List(items);
    match body {
        FunctionBody::Basic(b) => match b {
            Basic::Proj(i) => list(vec![
                Sexpr::Sym("proj".into()),
                Sexpr::Int(BigInt::from(*i)),
            ]),
            Basic::Const(c) => list(vec![Sexpr::Sym("const".into()), Sexpr::Int(c.clone())]),
            Basic::Conn(q) => {
                let mut items = vec![Sexpr::Sym("conn".into())];
                match q {
                    ConnQuery::AnyPred => items.push(Sexpr::Sym("any".into())),
                    ConnQuery::L0In => items.push(Sexpr::Sym("l0in".into())),
                    ConnQuery::L0Neg => items.push(Sexpr::Sym("l0neg".into())),
                    ConnQuery::Pred(e) => {
                        items.push(Sexpr::Sym("pred".into()));
                        items.push(Sexpr::Int(BigInt::from(*e)));
                    }
                    ConnQuery::Level(e) => {
                        items.push(Sexpr::Sym("level".into()));
                        items.push(Sexpr::Int(BigInt::from(*e)));
                    }
                    ConnQuery::Const0At(e) => {
                        items.push(Sexpr::Sym("const0".into()));
                        items.push(Sexpr::Int(BigInt::from(*e)));
                    }
                    ConnQuery::Const1At(e) => {
                        items.push(Sexpr::Sym("const1".into()));
                        items.push(Sexpr::Int(BigInt::from(*e)));
                    }
                }
                list(items)
            }
            other => {
                let name = match other {
                    Basic::Zero => "zero",
                    Basic::One => "one",
                    Basic::Sg => "sg",
                    Basic::Cosg => "cosg",
                    Basic::Len => "len",
                    Basic::Add => "add",
                    Basic::Sub => "sub",
                    Basic::Div2 => "div2",
                    Basic::Smash => "smash",
                    Basic::Bit => "bit",
                    Basic::Alpha => "alpha",
                    Basic::Mul => "mul",
                    Basic::Div => "div",
                    _ => unreachable!(),
                };
                list(syms(&["basic", name]))
            }
        },
        FunctionBody::Compose { outer, inners } => {
            let mut items = vec![Sexpr::Sym("compose".into()), Sexpr::Sym(outer.clone())];
            items.extend(inners.iter().map(|i| Sexpr::Sym(i.clone())));
            list(items)
        }
        FunctionBody::Schema { kind, g, steps } => {
            let mut items: Vec<Sexpr> = Vec::new();
            match kind {
                SchemaKind::Ode1 => items.push(Sexpr::Sym("ode1".into())),
                SchemaKind::TwoOde => items.push(Sexpr::Sym("2ode".into())),
                SchemaKind::ZeroOde => items.push(Sexpr::Sym("0ode".into())),
                SchemaKind::NOde { n } => {
                    items.push(Sexpr::Sym("node".into()));
                    items.push(Sexpr::Int(BigInt::from(*n)));
                }
                SchemaKind::NOdeStar { n } => {
                    items.push(Sexpr::Sym("node*".into()));
                    items.push(Sexpr::Int(BigInt::from(*n)));
                }
                SchemaKind::NonStrictNOde { n, c } => {
                    items.push(Sexpr::Sym("nsnode".into()));
                    items.push(Sexpr::Int(BigInt::from(*n)));
                    items.push(Sexpr::Int(c.clone()));
                }
                SchemaKind::Lambda { lambda } => {
                    items.push(Sexpr::Sym("lambda-ode".into()));
                    items.push(Sexpr::Sym(lambda.clone()));
                }
                SchemaKind::Ode2Up { bound } => {
                    items.push(Sexpr::Sym("ode2up".into()));
                    items.push(Sexpr::Sym(bound.clone()));
                }
                SchemaKind::POde { a, b } => {
                    items.push(Sexpr::Sym("pode".into()));
                    items.push(write_sg_expr(a));
                    items.push(write_sg_expr(b));
                }
                SchemaKind::B0Ode { k_expr } => {
                    items.push(Sexpr::Sym("b0ode".into()));
                    items.push(write_sg_expr(k_expr));
                }
                SchemaKind::BOde { b, cs } => {
                    items.push(Sexpr::Sym("bode".into()));
                    items.push(write_sg_expr(b));
                    items.push(Sexpr::List(cs.iter().map(|c| Sexpr::Int(c.clone())).collect()));
                }
                SchemaKind::Crn => items.push(Sexpr::Sym("crn".into())),
                SchemaKind::Kbrn { bound } => {
                    items.push(Sexpr::Sym("kbrn".into()));
                    items.push(Sexpr::Int(bound.clone()));
                }
            }
            items.push(Sexpr::Sym(g.clone()));
            items.extend(steps.iter().map(|s| Sexpr::Sym(s.clone())));
            list(items)
        }
    }
}

/// Serialize a program deterministically, one form per line, low-level
/// bodies only.
pub fn write_program(prog: &Program) -> String {
    let mut out = String::new();
    out.push_str(PROGRAM_HEADER);
    out.push('\n');
    for def in &prog.defs {
        let params: Vec<Sexpr> = (0..def.arity)
            .map(|i| Sexpr::Sym(format!("a{i}")))
            .collect();
        let form = Sexpr::List(vec![
            Sexpr::Sym("def".into()),
            Sexpr::Sym(def.name.clone()),
            Sexpr::List(params),
            write_body(&def.body),
        ]);
        out.push_str(&form.to_string());
        out.push('\n');
    }
    if let Some(entry) = &prog.entry {
        out.push_str(
            &Sexpr::List(vec![Sexpr::Sym("entry".into()), Sexpr::Sym(entry.clone())]).to_string(),
        );
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::validate;
    use crate::oracle;

    #[test]
    fn parses_expression_sugar() {
        let text = r#"
;; odewb-program v1
(def parity_k (w y) (bit (len w) y))
(def zero1 (y) 0)
(def parity_f (x y) (2ode zero1 parity_k))
(def parity (x) (parity_f x x))
(entry parity)
"#;
        let prog = parse_program(text).unwrap();
        assert!(validate(&prog).is_empty(), "{:?}", validate(&prog));
        for x in 0u64..256 {
            assert_eq!(
                prog.eval_entry(&[BigInt::from(x)]).unwrap(),
                BigInt::from(oracle::popcount_mod(x, 2))
            );
        }
    }

    #[test]
    fn writer_round_trips() {
        let prog = crate::stdlib::build_cmodn(3);
        let text = write_program(&prog);
        assert!(text.starts_with(PROGRAM_HEADER));
        let back = parse_program(&text).unwrap();
        assert_eq!(back.defs, prog.defs);
        assert_eq!(back.entry, prog.entry);
        // and the reparse evaluates identically
        for x in 0u64..128 {
            assert_eq!(
                back.eval_entry(&[BigInt::from(x)]).unwrap(),
                prog.eval_entry(&[BigInt::from(x)]).unwrap()
            );
        }
    }

    #[test]
    fn sg_expr_forms_round_trip() {
        let text = r#"
(def g1 (y) 1)
(def h1 (x y) 1)
(def fb (x y) (b0ode (sg (- f 1)) g1 h1))
(def fp (x y) (pode (+ 1 h0) 2 g1 h1))
(entry fb)
"#;
        let prog = parse_program(text).unwrap();
        let back = parse_program(&write_program(&prog)).unwrap();
        assert_eq!(back.defs, prog.defs);
    }

    #[test]
    fn rejects_unknown_header_and_forms() {
        assert!(matches!(
            parse_program(";; odewb-program v9\n(def a () 0)"),
            Err(ProgramTextError::BadHeader(_))
        ));
        assert!(parse_program("(frob a)").is_err());
        assert!(parse_program("(def a (x) (node x))").is_err());
        assert!(parse_program("(def a (x) (unknown-op q))").is_err());
    }
}
