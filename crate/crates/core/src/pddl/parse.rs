use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::sexpr::{err_at, parse_one, Pos, SExpr};
use super::PddlError;

const SUPPORTED: &[&str] = &[":strips", ":typing", ":negative-preconditions", ":equality"];

pub fn parse_domain(src: &str) -> Result<DomainDef, PddlError> {
    let top = parse_one(src)?;
    let items = expect_define(&top)?;
    let header = &items[1];
    let name = match header.as_list() {
        Some([kw, n]) if kw.as_atom() == Some("domain") => symbol(n)?,
        _ => return Err(err_at(header.pos(), "expected (domain <name>)")),
    };
    let mut dom = DomainDef {
        name,
        requirements: vec![":strips".into()],
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    for section in &items[2..] {
        let list = section
            .as_list()
            .ok_or_else(|| err_at(section.pos(), "expected a domain section"))?;
        let head = section.head().unwrap_or("");
        match head {
            ":requirements" => {
                dom.requirements.clear();
                for r in &list[1..] {
                    let r_name = symbol(r)?;
                    if !SUPPORTED.contains(&r_name.as_str()) {
                        return Err(err_at(r.pos(), format!("unsupported requirement {r_name}")));
                    }
                    dom.requirements.push(r_name);
                }
            }
            ":types" => {
                need(&dom, ":typing", section.pos(), "types")?;
                for tn in typed_list(&list[1..], false)? {
                    if tn.name == "object" {
                        continue;
                    }
                    if dom.types.iter().any(|(t, _)| *t == tn.name) {
                        return Err(err_at(section.pos(), format!("duplicate type {}", tn.name)));
                    }
                    dom.types.push((tn.name, tn.ty));
                }
            }
            ":constants" => {
                dom.constants = typed_list(&list[1..], false)?;
            }
            ":predicates" => {
                for p in &list[1..] {
                    let pl = p
                        .as_list()
                        .filter(|l| !l.is_empty())
                        .ok_or_else(|| err_at(p.pos(), "expected predicate declaration"))?;
                    let pname = symbol(&pl[0])?;
                    if dom.predicate(&pname).is_some() {
                        return Err(err_at(p.pos(), format!("duplicate predicate {pname}")));
                    }
                    dom.predicates.push(PredicateDecl {
                        name: pname,
                        params: typed_list(&pl[1..], true)?,
                    });
                }
            }
            ":action" => {
                let a = parse_action(&dom, list)?;
                dom.actions.push(a);
            }
            other => {
                return Err(err_at(section.pos(), format!("unsupported domain section {other}")));
            }
        }
    }
    check_domain_types(&dom, top.pos())?;
    Ok(dom)
}

fn need(dom: &DomainDef, req: &str, pos: Pos, what: &str) -> Result<(), PddlError> {
    if dom.requirements.iter().any(|r| r == req) {
        Ok(())
    } else {
        Err(err_at(pos, format!("{what} used without requirement {req}")))
    }
}

fn check_domain_types(dom: &DomainDef, pos: Pos) -> Result<(), PddlError> {
    for (t, p) in &dom.types {
        if !dom.has_type(p) {
            return Err(err_at(pos, format!("type {t} has undeclared parent {p}")));
        }
        if dom.is_subtype(p, t) {
            return Err(err_at(pos, format!("type {t} is part of a cycle")));
        }
    }
    for c in &dom.constants {
        if !dom.has_type(&c.ty) {
            return Err(err_at(pos, format!("constant {} has undeclared type {}", c.name, c.ty)));
        }
    }
    for p in &dom.predicates {
        for a in &p.params {
            if !dom.has_type(&a.ty) {
                return Err(err_at(pos, format!("predicate {} uses undeclared type {}", p.name, a.ty)));
            }
        }
    }
    Ok(())
}

fn expect_define(top: &SExpr) -> Result<&[SExpr], PddlError> {
    match top.as_list() {
        Some(items) if items.len() >= 2 && items[0].as_atom() == Some("define") => Ok(items),
        _ => Err(err_at(top.pos(), "expected (define ...)")),
    }
}

fn symbol(e: &SExpr) -> Result<String, PddlError> {
    match e {
        SExpr::Atom(s, _) => Ok(s.clone()),
        SExpr::List(_, p) => Err(err_at(*p, "expected a symbol")),
    }
}

/// Parses `a b - t c - u d`; untyped trailing names default to `object`.
fn typed_list(items: &[SExpr], vars: bool) -> Result<Vec<TypedName>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = symbol(&items[i])?;
        if s == "-" {
            let ty_expr = items
                .get(i + 1)
                .ok_or_else(|| err_at(items[i].pos(), "missing type after '-'"))?;
            let ty = symbol(ty_expr)?;
            if ty == "either" || ty.starts_with('(') {
                return Err(err_at(ty_expr.pos(), "either-types are not supported"));
            }
            if pending.is_empty() {
                return Err(err_at(items[i].pos(), "'-' without preceding names"));
            }
            for n in pending.drain(..) {
                out.push(TypedName { name: n, ty: ty.clone() });
            }
            i += 2;
            continue;
        }
        let name = if vars {
            s.strip_prefix('?')
                .map(str::to_string)
                .ok_or_else(|| err_at(items[i].pos(), format!("expected a variable, found {s}")))?
        } else {
            if s.starts_with('?') {
                return Err(err_at(items[i].pos(), format!("unexpected variable {s}")));
            }
            s
        };
        pending.push(name);
        i += 1;
    }
    for n in pending {
        out.push(TypedName { name: n, ty: "object".into() });
    }
    Ok(out)
}

struct Scope<'a> {
    dom: &'a DomainDef,
    params: &'a [TypedName],
}

impl Scope<'_> {
    fn term(&self, e: &SExpr) -> Result<(Term, String), PddlError> {
        let s = symbol(e)?;
        if let Some(v) = s.strip_prefix('?') {
            let p = self
                .params
                .iter()
                .find(|p| p.name == v)
                .ok_or_else(|| err_at(e.pos(), format!("unbound variable ?{v}")))?;
            Ok((Term::Var(v.to_string()), p.ty.clone()))
        } else {
            let c = self
                .dom
                .constants
                .iter()
                .find(|c| c.name == s)
                .ok_or_else(|| err_at(e.pos(), format!("unknown constant {s}")))?;
            Ok((Term::Const(s), c.ty.clone()))
        }
    }

    fn atom(&self, e: &SExpr) -> Result<AtomExpr, PddlError> {
        let l = e
            .as_list()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| err_at(e.pos(), "expected an atom"))?;
        let pred = symbol(&l[0])?;
        let decl = self
            .dom
            .predicate(&pred)
            .ok_or_else(|| err_at(e.pos(), format!("undeclared predicate {pred}")))?;
        if decl.params.len() != l.len() - 1 {
            return Err(err_at(
                e.pos(),
                format!("predicate {pred} expects {} arguments, got {}", decl.params.len(), l.len() - 1),
            ));
        }
        let mut args = Vec::new();
        for (arg, want) in l[1..].iter().zip(&decl.params) {
            let (t, ty) = self.term(arg)?;
            if !self.dom.is_subtype(&ty, &want.ty) {
                return Err(err_at(arg.pos(), format!("argument of type {ty} where {} expected", want.ty)));
            }
            args.push(t);
        }
        Ok(AtomExpr { pred, args })
    }

    fn condition(&self, e: &SExpr, out: &mut Vec<Condition>) -> Result<(), PddlError> {
        let Some(l) = e.as_list() else {
            return Err(err_at(e.pos(), "expected a condition"));
        };
        match e.head() {
            None if l.is_empty() => Ok(()),
            Some("and") => {
                for c in &l[1..] {
                    self.condition(c, out)?;
                }
                Ok(())
            }
            Some("not") => {
                if l.len() != 2 {
                    return Err(err_at(e.pos(), "not takes one argument"));
                }
                let inner = &l[1];
                if inner.head() == Some("=") {
                    out.push(self.equality(inner, false)?);
                } else {
                    need(self.dom, ":negative-preconditions", e.pos(), "negative precondition")?;
                    out.push(Condition::Atom {
                        atom: self.atom(inner)?,
                        positive: false,
                    });
                }
                Ok(())
            }
            Some("=") => {
                out.push(self.equality(e, true)?);
                Ok(())
            }
            Some(kw @ ("or" | "imply" | "forall" | "exists" | "when")) => {
                Err(err_at(e.pos(), format!("{kw} is outside the supported STRIPS subset")))
            }
            _ => {
                out.push(Condition::Atom {
                    atom: self.atom(e)?,
                    positive: true,
                });
                Ok(())
            }
        }
    }

    fn equality(&self, e: &SExpr, positive: bool) -> Result<Condition, PddlError> {
        need(self.dom, ":equality", e.pos(), "equality")?;
        let l = e.as_list().unwrap_or(&[]);
        if l.len() != 3 {
            return Err(err_at(e.pos(), "= takes two arguments"));
        }
        Ok(Condition::Equal {
            left: self.term(&l[1])?.0,
            right: self.term(&l[2])?.0,
            positive,
        })
    }

    fn effect(&self, e: &SExpr, add: &mut Vec<AtomExpr>, del: &mut Vec<AtomExpr>) -> Result<(), PddlError> {
        let Some(l) = e.as_list() else {
            return Err(err_at(e.pos(), "expected an effect"));
        };
        match e.head() {
            None if l.is_empty() => Ok(()),
            Some("and") => {
                for c in &l[1..] {
                    self.effect(c, add, del)?;
                }
                Ok(())
            }
            Some("not") if l.len() == 2 => {
                del.push(self.atom(&l[1])?);
                Ok(())
            }
            Some(kw @ ("forall" | "when" | "increase" | "decrease" | "assign")) => {
                Err(err_at(e.pos(), format!("{kw} effects are outside the supported STRIPS subset")))
            }
            _ => {
                add.push(self.atom(e)?);
                Ok(())
            }
        }
    }
}

fn parse_action(dom: &DomainDef, list: &[SExpr]) -> Result<ActionSchema, PddlError> {
    let pos = list[0].pos();
    let name = list
        .get(1)
        .ok_or_else(|| err_at(pos, "action without a name"))
        .and_then(symbol)?;
    if dom.actions.iter().any(|a| a.name == name) {
        return Err(err_at(pos, format!("duplicate action {name}")));
    }
    let mut params = Vec::new();
    let mut pre_expr = None;
    let mut eff_expr = None;
    let mut i = 2;
    while i < list.len() {
        let key = symbol(&list[i])?;
        let val = list
            .get(i + 1)
            .ok_or_else(|| err_at(list[i].pos(), format!("missing value for {key}")))?;
        match key.as_str() {
            ":parameters" => {
                let items = val
                    .as_list()
                    .ok_or_else(|| err_at(val.pos(), "expected a parameter list"))?;
                params = typed_list(items, true)?;
                for p in &params {
                    if !dom.has_type(&p.ty) {
                        return Err(err_at(val.pos(), format!("undeclared type {}", p.ty)));
                    }
                }
                let mut names = HashSet::new();
                if !params.iter().all(|p| names.insert(p.name.clone())) {
                    return Err(err_at(val.pos(), "duplicate parameter"));
                }
            }
            ":precondition" => pre_expr = Some(val),
            ":effect" => eff_expr = Some(val),
            other => return Err(err_at(list[i].pos(), format!("unsupported action key {other}"))),
        }
        i += 2;
    }
    let scope = Scope { dom, params: &params };
    let mut precondition = Vec::new();
    if let Some(p) = pre_expr {
        scope.condition(p, &mut precondition)?;
    }
    let (mut add, mut del) = (Vec::new(), Vec::new());
    if let Some(e) = eff_expr {
        scope.effect(e, &mut add, &mut del)?;
    }
    Ok(ActionSchema {
        name,
        params,
        precondition,
        add,
        del,
    })
}

pub fn parse_problem(src: &str, dom: &DomainDef) -> Result<ProblemDef, PddlError> {
    let top = parse_one(src)?;
    let items = expect_define(&top)?;
    let name = match items[1].as_list() {
        Some([kw, n]) if kw.as_atom() == Some("problem") => symbol(n)?,
        _ => return Err(err_at(items[1].pos(), "expected (problem <name>)")),
    };
    let mut prob = ProblemDef {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    let mut types: HashMap<String, String> = dom
        .constants
        .iter()
        .map(|c| (c.name.clone(), c.ty.clone()))
        .collect();
    let mut init_neg = Vec::new();
    for section in &items[2..] {
        let list = section
            .as_list()
            .ok_or_else(|| err_at(section.pos(), "expected a problem section"))?;
        match section.head().unwrap_or("") {
            ":domain" => {
                let d = list
                    .get(1)
                    .ok_or_else(|| err_at(section.pos(), "missing domain name"))
                    .and_then(symbol)?;
                if d != dom.name {
                    return Err(err_at(section.pos(), format!("problem is for domain {d}, not {}", dom.name)));
                }
                prob.domain = d;
            }
            ":objects" => {
                for o in typed_list(&list[1..], false)? {
                    if !dom.has_type(&o.ty) {
                        return Err(err_at(section.pos(), format!("object {} has undeclared type {}", o.name, o.ty)));
                    }
                    if types.insert(o.name.clone(), o.ty.clone()).is_some() {
                        return Err(err_at(section.pos(), format!("duplicate object {}", o.name)));
                    }
                    prob.objects.push(o);
                }
            }
            ":init" => {
                for f in &list[1..] {
                    match f.head() {
                        Some("not") => {
                            let inner = f.as_list().and_then(|l| l.get(1));
                            let inner = inner.ok_or_else(|| err_at(f.pos(), "empty negation"))?;
                            init_neg.push((ground_fact(dom, &types, inner)?, f.pos()));
                        }
                        _ => {
                            let fact = ground_fact(dom, &types, f)?;
                            if !prob.init.contains(&fact) {
                                prob.init.push(fact);
                            }
                        }
                    }
                }
            }
            ":goal" => {
                let g = list
                    .get(1)
                    .ok_or_else(|| err_at(section.pos(), "missing goal"))?;
                goal_literals(dom, &types, g, &mut prob.goal)?;
            }
            other => {
                return Err(err_at(section.pos(), format!("unsupported problem section {other}")));
            }
        }
    }
    if prob.domain.is_empty() {
        return Err(err_at(top.pos(), "problem lacks a :domain section"));
    }
    for (f, pos) in init_neg {
        if prob.init.contains(&f) {
            return Err(err_at(pos, format!("init contains both {f} and its negation")));
        }
    }
    Ok(prob)
}

fn ground_fact(dom: &DomainDef, types: &HashMap<String, String>, e: &SExpr) -> Result<Fact, PddlError> {
    let l = e
        .as_list()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| err_at(e.pos(), "expected a ground atom"))?;
    let pred = symbol(&l[0])?;
    let decl = dom
        .predicate(&pred)
        .ok_or_else(|| err_at(e.pos(), format!("undeclared predicate {pred}")))?;
    if decl.params.len() != l.len() - 1 {
        return Err(err_at(e.pos(), format!("predicate {pred} expects {} arguments", decl.params.len())));
    }
    let mut args = Vec::new();
    for (a, want) in l[1..].iter().zip(&decl.params) {
        let name = symbol(a)?;
        let ty = types
            .get(&name)
            .ok_or_else(|| err_at(a.pos(), format!("unknown object {name}")))?;
        if !dom.is_subtype(ty, &want.ty) {
            return Err(err_at(a.pos(), format!("object {name} of type {ty} where {} expected", want.ty)));
        }
        args.push(name);
    }
    Ok(Fact { pred, args })
}

fn goal_literals(
    dom: &DomainDef,
    types: &HashMap<String, String>,
    e: &SExpr,
    out: &mut Vec<GoalLiteral>,
) -> Result<(), PddlError> {
    match e.head() {
        None if e.as_list().is_some_and(|l| l.is_empty()) => Ok(()),
        Some("and") => {
            for g in &e.as_list().unwrap()[1..] {
                goal_literals(dom, types, g, out)?;
            }
            Ok(())
        }
        Some("not") => {
            let inner = e
                .as_list()
                .and_then(|l| l.get(1))
                .ok_or_else(|| err_at(e.pos(), "empty negation"))?;
            out.push(GoalLiteral {
                fact: ground_fact(dom, types, inner)?,
                positive: false,
            });
            Ok(())
        }
        Some(kw @ ("or" | "imply" | "forall" | "exists")) => {
            Err(err_at(e.pos(), format!("{kw} goals are outside the supported STRIPS subset")))
        }
        _ => {
            out.push(GoalLiteral {
                fact: ground_fact(dom, types, e)?,
                positive: true,
            });
            Ok(())
        }
    }
}
