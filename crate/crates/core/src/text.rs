//! Text formats: s-expression programs, task files and benchmark files.
//!
//! ```text
//! # task file
//! vars 3 consts -1 5
//! in 0 1 2 out 1
//! ```
//!
//! Programs use `x0..x{n-1}`, n-ary `+`, `(- e)`, `(* k e)`, the comparisons
//! `< <= = >= >`, `and`/`or`/`not`, `true`/`false` and `(ite c t e)`.

use std::fmt::Write as _;

use crate::cond::{Atom, AtomOp, Clause, Dnf, Literal};
use crate::error::ParseError;
use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::program::Program;
use crate::size::ProgramSize;
use crate::task::{Example, PbeTask};

pub fn expr_to_sexp(e: &LinearExpr) -> String {
    let mut ops: Vec<String> = e
        .coeffs()
        .map(|(i, a)| match a {
            1 => format!("x{i}"),
            -1 => format!("(- x{i})"),
            _ => format!("(* {a} x{i})"),
        })
        .collect();
    if e.constant_term() != 0 || ops.is_empty() {
        ops.push(e.constant_term().to_string());
    }
    if ops.len() == 1 {
        ops.pop().unwrap()
    } else {
        format!("(+ {})", ops.join(" "))
    }
}

pub fn atom_to_sexp(a: &Atom) -> String {
    let r = a.rendering();
    let rel = match r.rel {
        AtomOp::Lt => "<",
        AtomOp::Le => "<=",
        AtomOp::Eq => "=",
    };
    if r.left.is_constant() && !r.right.is_constant() && r.rel != AtomOp::Eq {
        let flipped = if r.rel == AtomOp::Lt { ">" } else { ">=" };
        format!("({flipped} {} {})", expr_to_sexp(&r.right), expr_to_sexp(&r.left))
    } else {
        format!("({rel} {} {})", expr_to_sexp(&r.left), expr_to_sexp(&r.right))
    }
}

pub fn literal_to_sexp(l: &Literal) -> String {
    if l.is_negated() {
        format!("(not {})", atom_to_sexp(l.atom()))
    } else {
        atom_to_sexp(l.atom())
    }
}

pub fn clause_to_sexp(c: &Clause) -> String {
    match c.len() {
        0 => "true".to_string(),
        1 => literal_to_sexp(c.literals().next().unwrap()),
        _ => {
            let parts: Vec<String> = c.literals().map(literal_to_sexp).collect();
            format!("(and {})", parts.join(" "))
        }
    }
}

pub fn dnf_to_sexp(d: &Dnf) -> String {
    match d.clauses() {
        [] => "false".to_string(),
        [c] => clause_to_sexp(c),
        cs => {
            let parts: Vec<String> = cs.iter().map(clause_to_sexp).collect();
            format!("(or {})", parts.join(" "))
        }
    }
}

pub fn program_to_sexp(p: &Program) -> String {
    match p {
        Program::Term(e) | Program::TreeLeaf(e) => expr_to_sexp(e),
        Program::DecisionList { branches, default } => {
            let mut out = String::new();
            for (c, t) in branches {
                write!(out, "(ite {} {} ", dnf_to_sexp(c), expr_to_sexp(t)).unwrap();
            }
            out.push_str(&expr_to_sexp(default));
            out.push_str(&")".repeat(branches.len()));
            out
        }
        Program::IteTree { cond, then, otherwise } => format!(
            "(ite {} {} {})",
            dnf_to_sexp(cond),
            program_to_sexp(then),
            program_to_sexp(otherwise)
        ),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Symbol(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(p: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(p.line, p.column, msg)
}

/// Parses exactly one s-expression from `src`; `origin` is the position of
/// `src`'s first character within the enclosing file.
fn read_sexp(src: &str, origin: Pos) -> Result<Sexp, ParseError> {
    let mut tokens: Vec<(String, Pos)> = Vec::new();
    let mut line = origin.line;
    let mut column = origin.column;
    let mut current: Option<(String, Pos)> = None;
    for ch in src.chars() {
        let here = Pos { line, column };
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some(tok) = current.take() {
                tokens.push(tok);
            }
            if !ch.is_whitespace() {
                tokens.push((ch.to_string(), here));
            }
        } else {
            match &mut current {
                Some((s, _)) => s.push(ch),
                None => current = Some((ch.to_string(), here)),
            }
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    if let Some(tok) = current.take() {
        tokens.push(tok);
    }
    let end = Pos { line, column };
    let mut iter = tokens.into_iter().peekable();
    let sexp = read_one(&mut iter, end)?;
    if let Some((tok, p)) = iter.next() {
        return Err(err(p, format!("unexpected trailing `{tok}`")));
    }
    Ok(sexp)
}

fn read_one(
    iter: &mut std::iter::Peekable<impl Iterator<Item = (String, Pos)>>,
    end: Pos,
) -> Result<Sexp, ParseError> {
    let (tok, p) = iter.next().ok_or_else(|| err(end, "unexpected end of input"))?;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match iter.peek() {
                    None => return Err(err(p, "unclosed `(`")),
                    Some((t, _)) if t == ")" => {
                        iter.next();
                        return Ok(Sexp::List(items, p));
                    }
                    Some(_) => items.push(read_one(iter, end)?),
                }
            }
        }
        ")" => Err(err(p, "unexpected `)`")),
        _ => Ok(Sexp::Symbol(tok, p)),
    }
}

fn head(items: &[Sexp]) -> Option<&str> {
    match items.first() {
        Some(Sexp::Symbol(s, _)) => Some(s),
        _ => None,
    }
}

fn parse_int(s: &str, p: Pos) -> Result<i64, ParseError> {
    s.parse::<i64>().map_err(|_| err(p, format!("expected an integer, found `{s}`")))
}

fn overflow(p: Pos) -> ParseError {
    err(p, "integer overflow")
}

fn to_expr(s: &Sexp) -> Result<LinearExpr, ParseError> {
    match s {
        Sexp::Symbol(sym, p) => {
            if let Some(idx) = sym.strip_prefix('x') {
                let i = idx
                    .parse::<usize>()
                    .map_err(|_| err(*p, format!("bad variable `{sym}`")))?;
                Ok(LinearExpr::var(i))
            } else {
                Ok(LinearExpr::constant(parse_int(sym, *p)?))
            }
        }
        Sexp::List(items, p) => {
            let args = &items[1.min(items.len())..];
            match head(items) {
                Some("+") if !args.is_empty() => {
                    let mut acc = LinearExpr::zero();
                    for a in args {
                        acc = acc.checked_add(&to_expr(a)?).ok_or_else(|| overflow(*p))?;
                    }
                    Ok(acc)
                }
                Some("-") if args.len() == 1 => {
                    to_expr(&args[0])?.checked_neg().ok_or_else(|| overflow(*p))
                }
                Some("-") if args.len() == 2 => {
                    to_expr(&args[0])?.checked_sub(&to_expr(&args[1])?).ok_or_else(|| overflow(*p))
                }
                Some("*") if args.len() == 2 => {
                    let l = to_expr(&args[0])?;
                    let r = to_expr(&args[1])?;
                    let (k, e) = if l.is_constant() {
                        (l.constant_term(), r)
                    } else if r.is_constant() {
                        (r.constant_term(), l)
                    } else {
                        return Err(err(*p, "nonlinear multiplication"));
                    };
                    e.checked_scale(k).ok_or_else(|| overflow(*p))
                }
                _ => Err(err(*p, "expected a linear expression")),
            }
        }
    }
}

fn comparison(sym: &str) -> Option<(AtomOp, bool)> {
    match sym {
        "<" => Some((AtomOp::Lt, false)),
        "<=" => Some((AtomOp::Le, false)),
        "=" => Some((AtomOp::Eq, false)),
        ">" => Some((AtomOp::Lt, true)),
        ">=" => Some((AtomOp::Le, true)),
        _ => None,
    }
}

fn to_dnf(s: &Sexp) -> Result<Dnf, ParseError> {
    match s {
        Sexp::Symbol(sym, p) => match sym.as_str() {
            "true" => Ok(Dnf::truth()),
            "false" => Ok(Dnf::falsity()),
            _ => Err(err(*p, format!("expected a condition, found `{sym}`"))),
        },
        Sexp::List(items, p) => {
            let args = &items[1.min(items.len())..];
            let h = head(items).ok_or_else(|| err(*p, "expected a condition"))?;
            if let Some((op, swap)) = comparison(h) {
                if args.len() != 2 {
                    return Err(err(*p, format!("`{h}` takes two arguments")));
                }
                let (mut l, mut r) = (to_expr(&args[0])?, to_expr(&args[1])?);
                if swap {
                    std::mem::swap(&mut l, &mut r);
                }
                let atom = Atom::compare(&l, op, &r).ok_or_else(|| overflow(*p))?;
                return Ok(Dnf::atom(atom));
            }
            match h {
                "not" if args.len() == 1 => Ok(match to_literal(&args[0])? {
                    Some(l) => Dnf::literal(l.negate()),
                    None => to_dnf(&args[0])?.negate(),
                }),
                "and" if !args.is_empty() => {
                    let lits: Option<Vec<Literal>> =
                        args.iter().map(to_literal).collect::<Result<_, _>>()?;
                    match lits {
                        Some(ls) => Ok(Dnf::new([Clause::new(ls)])),
                        None => {
                            let mut acc = Dnf::truth();
                            for a in args {
                                acc = acc.and(&to_dnf(a)?);
                            }
                            Ok(acc)
                        }
                    }
                }
                "or" if !args.is_empty() => {
                    let mut clauses = Vec::new();
                    for a in args {
                        clauses.extend(to_dnf(a)?.clauses().iter().cloned());
                    }
                    Ok(Dnf::new(clauses))
                }
                _ => Err(err(*p, format!("unknown condition `{h}`"))),
            }
        }
    }
}

/// A single literal, or `None` when `s` is a compound condition.
fn to_literal(s: &Sexp) -> Result<Option<Literal>, ParseError> {
    if let Sexp::List(items, _) = s {
        if let Some(h) = head(items) {
            if comparison(h).is_some() {
                let d = to_dnf(s)?;
                return Ok(d.clauses()[0].literals().next().cloned());
            }
            if h == "not" && items.len() == 2 {
                if let Some(l) = to_literal(&items[1])? {
                    return Ok(Some(l.negate()));
                }
            }
        }
    }
    Ok(None)
}

fn to_program(s: &Sexp, nested: bool) -> Result<Program, ParseError> {
    if let Sexp::List(items, p) = s {
        if head(items) == Some("ite") {
            if items.len() != 4 {
                return Err(err(*p, "`ite` takes three arguments"));
            }
            let cond = to_dnf(&items[1])?;
            let then = to_program(&items[2], true)?;
            let otherwise = to_program(&items[3], true)?;
            return Ok(match (then, otherwise) {
                (Program::TreeLeaf(t), Program::TreeLeaf(d)) => {
                    Program::DecisionList { branches: vec![(cond, t)], default: d }
                }
                (Program::TreeLeaf(t), Program::DecisionList { mut branches, default }) => {
                    branches.insert(0, (cond, t));
                    Program::DecisionList { branches, default }
                }
                (then, otherwise) => Program::ite(cond, as_tree(then), as_tree(otherwise)),
            });
        }
    }
    let e = to_expr(s)?;
    Ok(if nested { Program::TreeLeaf(e) } else { Program::Term(e) })
}

/// Rewrites decision-list fragments into explicit trees.
fn as_tree(p: Program) -> Program {
    match p {
        Program::DecisionList { branches, default } => branches
            .into_iter()
            .rev()
            .fold(Program::TreeLeaf(default), |acc, (c, t)| {
                Program::ite(c, Program::TreeLeaf(t), acc)
            }),
        Program::Term(e) => Program::TreeLeaf(e),
        other => other,
    }
}

const START: Pos = Pos { line: 1, column: 1 };

pub fn parse_expr(src: &str) -> Result<LinearExpr, ParseError> {
    to_expr(&read_sexp(src, START)?)
}

pub fn parse_condition(src: &str) -> Result<Dnf, ParseError> {
    to_dnf(&read_sexp(src, START)?)
}

/// Parses a program. A chain of `ite`s whose then-branches are all terms is
/// read as a decision list; anything else becomes an `IteTree`.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    to_program(&read_sexp(src, START)?, false)
}

pub fn serialize_program(p: &Program) -> String {
    program_to_sexp(p)
}

/// Strips a `#` comment, returning the remaining text.
fn content(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Whitespace-separated words with their 1-based columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain([(line.len(), ' ')]) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn parse_header(lineno: usize, ws: &[(usize, &str)]) -> Result<GrammarParams, ParseError> {
    let at = |k: usize| Pos { line: lineno, column: ws.get(k).map_or(1, |w| w.0) };
    if ws.len() != 5 || ws[0].1 != "vars" || ws[2].1 != "consts" {
        return Err(err(at(0), "expected `vars <n> consts <min> <max>`"));
    }
    let n = ws[1]
        .1
        .parse::<usize>()
        .map_err(|_| err(at(1), format!("expected a variable count, found `{}`", ws[1].1)))?;
    let lo = parse_int(ws[3].1, at(3))?;
    let hi = parse_int(ws[4].1, at(4))?;
    GrammarParams::new(n, lo, hi).map_err(|e| err(at(0), e.to_string()))
}

fn parse_example_line(
    lineno: usize,
    ws: &[(usize, &str)],
    arity: usize,
) -> Result<Example, ParseError> {
    let at = |k: usize| Pos { line: lineno, column: ws.get(k).map_or(1, |w| w.0) };
    if ws.first().map(|w| w.1) != Some("in") {
        return Err(err(at(0), "expected `in <inputs...> out <output>`"));
    }
    let out_at = ws
        .iter()
        .position(|w| w.1 == "out")
        .ok_or_else(|| err(at(0), "missing `out`"))?;
    if out_at != arity + 1 {
        return Err(err(at(0), format!("expected {arity} inputs, found {}", out_at - 1)));
    }
    if ws.len() != out_at + 2 {
        return Err(err(at(out_at), "expected exactly one output after `out`"));
    }
    let input = (1..out_at).map(|k| parse_int(ws[k].1, at(k))).collect::<Result<_, _>>()?;
    let output = parse_int(ws[out_at + 1].1, at(out_at + 1))?;
    Ok(Example::new(input, output))
}

fn push_example(task: &mut PbeTask, ex: Example, lineno: usize) -> Result<(), ParseError> {
    task.push(ex).map(|_| ()).map_err(|e| ParseError::new(lineno, 1, e.to_string()))
}

pub fn parse_task(src: &str) -> Result<PbeTask, ParseError> {
    let mut task: Option<PbeTask> = None;
    for (k, raw) in src.lines().enumerate() {
        let lineno = k + 1;
        let ws = words(content(raw));
        if ws.is_empty() {
            continue;
        }
        match &mut task {
            None => task = Some(PbeTask::empty(parse_header(lineno, &ws)?)),
            Some(t) => {
                let ex = parse_example_line(lineno, &ws, t.arity())?;
                push_example(t, ex, lineno)?;
            }
        }
    }
    task.ok_or_else(|| ParseError::new(1, 1, "missing `vars <n> consts <min> <max>` header"))
}

fn header(g: &GrammarParams) -> String {
    format!("vars {} consts {} {}\n", g.num_vars(), g.const_min(), g.const_max())
}

fn example_line(ex: &Example) -> String {
    let ins: Vec<String> = ex.input.iter().map(|v| v.to_string()).collect();
    format!("in {} out {}\n", ins.join(" "), ex.output)
}

pub fn serialize_task(t: &PbeTask) -> String {
    let mut out = header(t.grammar());
    for ex in t.examples() {
        out.push_str(&example_line(ex));
    }
    out
}

/// A named target program with its grammar and, optionally, a fixed example
/// set.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub name: String,
    pub grammar: GrammarParams,
    pub truth: Program,
    pub fixed_task: Option<PbeTask>,
}

/// ```text
/// name max2
/// vars 2 consts -1 1
/// truth (ite (<= x1 x0) x0 x1)
/// in 0 1 out 1        # optional fixed examples
/// ```
pub fn parse_benchmark(src: &str) -> Result<Benchmark, ParseError> {
    let mut name: Option<String> = None;
    let mut grammar: Option<GrammarParams> = None;
    let mut truth: Option<Program> = None;
    let mut task: Option<PbeTask> = None;
    for (k, raw) in src.lines().enumerate() {
        let lineno = k + 1;
        let text = content(raw);
        let ws = words(text);
        let Some(&(col, key)) = ws.first() else { continue };
        let at = Pos { line: lineno, column: col };
        match key {
            "name" if name.is_none() => {
                if ws.len() != 2 {
                    return Err(err(at, "expected `name <identifier>`"));
                }
                name = Some(ws[1].1.to_string());
            }
            "vars" if grammar.is_none() => grammar = Some(parse_header(lineno, &ws)?),
            "truth" if truth.is_none() => {
                let g = grammar.ok_or_else(|| err(at, "`truth` must follow the `vars` line"))?;
                let body_start = col - 1 + "truth".len();
                let body = &text[body_start..];
                let origin = Pos { line: lineno, column: body_start + 1 };
                let p = to_program(&read_sexp(body, origin)?, false)?;
                p.check_range(&g).map_err(|e| err(origin, e.to_string()))?;
                truth = Some(p);
            }
            "in" => {
                let g = grammar.ok_or_else(|| err(at, "examples must follow the `vars` line"))?;
                let t = task.get_or_insert_with(|| PbeTask::empty(g));
                let ex = parse_example_line(lineno, &ws, g.num_vars())?;
                push_example(t, ex, lineno)?;
            }
            _ => return Err(err(at, format!("unexpected `{key}`"))),
        }
    }
    let missing = |what: &str| ParseError::new(1, 1, format!("missing `{what}` line"));
    Ok(Benchmark {
        name: name.ok_or_else(|| missing("name"))?,
        grammar: grammar.ok_or_else(|| missing("vars"))?,
        truth: truth.ok_or_else(|| missing("truth"))?,
        fixed_task: task,
    })
}

pub fn serialize_benchmark(b: &Benchmark) -> String {
    let mut out = format!("name {}\n", b.name);
    out.push_str(&header(&b.grammar));
    writeln!(out, "truth {}", program_to_sexp(&b.truth)).unwrap();
    if let Some(t) = &b.fixed_task {
        for ex in t.examples() {
            out.push_str(&example_line(ex));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motivating;

    #[test]
    fn expr_rendering() {
        assert_eq!(expr_to_sexp(&LinearExpr::zero()), "0");
        assert_eq!(expr_to_sexp(&LinearExpr::new(1, [(0, 1)])), "(+ x0 1)");
        assert_eq!(expr_to_sexp(&LinearExpr::new(-3, [(0, -1), (2, 4)])), "(+ (- x0) (* 4 x2) -3)");
    }

    #[test]
    fn atom_rendering_prefers_readable_sides() {
        let a = Atom::compare(
            &LinearExpr::constant(1),
            AtomOp::Le,
            &LinearExpr::new(0, [(0, 1), (1, 1)]),
        )
        .unwrap();
        assert_eq!(atom_to_sexp(&a), "(>= (+ x0 x1) 1)");
        let b = Atom::new(LinearExpr::var(0), AtomOp::Lt);
        assert_eq!(atom_to_sexp(&b), "(< x0 0)");
        let eq = Atom::new(LinearExpr::new(0, [(0, 1), (1, -1)]), AtomOp::Eq);
        assert_eq!(literal_to_sexp(&eq.negate()), "(not (= x0 x1))");
    }

    #[test]
    fn motivating_target_text() {
        let s = program_to_sexp(&motivating::target());
        assert_eq!(
            s,
            "(ite (>= (+ x0 x1) 1) (ite (>= (+ x0 x2) 1) (+ x0 1) (+ x1 1)) \
             (ite (>= (+ x1 x2) 1) (+ x2 1) (+ x1 1)))"
        );
        let p = parse_program(&s).unwrap();
        assert_eq!(p, motivating::target());
        assert_eq!(program_to_sexp(&p), s);
    }

    #[test]
    fn decision_lists_round_trip() {
        let s = "(ite (and (>= (+ x0 x1) 1) (>= (+ x0 x2) 1)) (+ x0 1) (ite (or (= x1 2) (< x2 0)) (+ x1 1) (+ x2 1)))";
        let p = parse_program(s).unwrap();
        assert!(matches!(&p, Program::DecisionList { branches, .. } if branches.len() == 2));
        assert_eq!(program_to_sexp(&p), s);
        assert_eq!(parse_program(&program_to_sexp(&p)).unwrap(), p);
    }

    #[test]
    fn general_conditions_are_normalized() {
        let d = parse_condition("(not (and (<= x0 0) (= x1 1)))").unwrap();
        for x in -2..=2 {
            for y in -2..=2 {
                assert_eq!(d.eval(&[x, y]).unwrap(), !(x <= 0 && y == 1));
            }
        }
        assert_eq!(parse_expr("(* 2 (+ x0 (- 3 x1)))").unwrap(), LinearExpr::new(6, [(0, 2), (1, -2)]));
        assert!(parse_expr("(* x0 x1)").is_err());
    }

    #[test]
    fn task_round_trip() {
        let t = motivating::task();
        let s = serialize_task(&t);
        assert_eq!(parse_task(&s).unwrap(), t);
        assert!(s.starts_with("vars 3 consts -1 5\nin 0 1 2 out 1\n"));
    }

    #[test]
    fn task_errors_carry_positions() {
        let e = parse_task("vars 1 consts 0 1\nin 0 out 1\nin 0 out 2\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_task("# header\nvars 2 consts 0 1\nin 0 x out 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 6));
        let e = parse_program("(+ x0 1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_program("(+ x0 1))").unwrap_err();
        assert_eq!((e.line, e.column), (1, 9));
    }

    #[test]
    fn benchmark_round_trip() {
        let src = "name max2\nvars 2 consts -1 1\ntruth (ite (>= x0 x1) x0 x1)\nin 0 1 out 1\n";
        let b = parse_benchmark(src).unwrap();
        assert_eq!(b.name, "max2");
        assert_eq!(b.fixed_task.as_ref().unwrap().len(), 1);
        assert_eq!(parse_benchmark(&serialize_benchmark(&b)).unwrap(), b);
        let bad = parse_benchmark("name c\nvars 1 consts 0 1\ntruth (+ x0 7)\n").unwrap_err();
        assert_eq!(bad.line, 3);
    }
}
