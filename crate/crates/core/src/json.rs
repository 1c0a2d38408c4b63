//! Tagged JSON for syntax, judgments and derivations.
//!
//! Syntax fields accept either a tagged object or a surface-syntax string.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::deriv::{Derivation, Judgment, RuleId};
use crate::surface;
use crate::syntax::{fresh_name, Context, Entry, Flavor, Name, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("at {path}: {message}")]
    Shape { path: String, message: String },
}

fn shape(path: &str, message: impl Into<String>) -> JsonError {
    JsonError::Shape {
        path: path.to_string(),
        message: message.into(),
    }
}

fn flavor_tag(f: Flavor) -> &'static str {
    match f {
        Flavor::Kernel => "k",
        Flavor::TopStyle => "t",
        Flavor::Plain => "plain",
    }
}

/// Names binders so they never capture a free variable or an outer binder.
struct Namer {
    avoid: BTreeSet<Name>,
    tscope: Vec<Name>,
    mscope: Vec<Name>,
}

impl Namer {
    fn new(avoid: BTreeSet<Name>) -> Namer {
        Namer {
            avoid,
            tscope: Vec::new(),
            mscope: Vec::new(),
        }
    }

    fn pick(&self, hint: &Name) -> Name {
        fresh_name(hint, |n| {
            self.avoid.contains(n) || self.tscope.contains(n) || self.mscope.contains(n)
        })
    }

    fn ty(&mut self, t: &Type) -> Value {
        match t {
            Type::Top => json!({"tag": "top"}),
            Type::Var(n) => json!({"tag": "tvar", "name": n.as_str()}),
            Type::Bound(i) => {
                let name = self
                    .tscope
                    .len()
                    .checked_sub(1 + *i as usize)
                    .map(|p| self.tscope[p].to_string())
                    .unwrap_or_else(|| format!("#{i}"));
                json!({"tag": "tvar", "name": name})
            }
            Type::Arrow(a, b) => json!({"tag": "arrow", "domain": self.ty(a), "codomain": self.ty(b)}),
            Type::Meet(a, b) => json!({"tag": "meet", "left": self.ty(a), "right": self.ty(b)}),
            Type::Forall(q) => {
                let x = self.pick(q.hint.name());
                let bound = self.ty(&q.bound);
                self.tscope.push(x.clone());
                let body = self.ty(&q.body);
                self.tscope.pop();
                json!({
                    "tag": "forall",
                    "flavor": flavor_tag(q.flavor),
                    "binder": x.as_str(),
                    "bound": bound,
                    "body": body,
                })
            }
        }
    }

    fn term(&mut self, t: &Term) -> Value {
        match t {
            Term::Top => json!({"tag": "top"}),
            Term::Var(n) => json!({"tag": "var", "name": n.as_str()}),
            Term::Bound(i) => {
                let name = self
                    .mscope
                    .len()
                    .checked_sub(1 + *i as usize)
                    .map(|p| self.mscope[p].to_string())
                    .unwrap_or_else(|| format!("#{i}"));
                json!({"tag": "var", "name": name})
            }
            Term::App(f, a) => json!({"tag": "app", "fn": self.term(f), "arg": self.term(a)}),
            Term::TApp(f, a) => json!({"tag": "tapp", "fn": self.term(f), "arg": self.ty(a)}),
            Term::Lam(l) => {
                let x = self.pick(l.hint.name());
                let annot = self.ty(&l.annot);
                self.mscope.push(x.clone());
                let body = self.term(&l.body);
                self.mscope.pop();
                json!({"tag": "lam", "binder": x.as_str(), "annotation": annot, "body": body})
            }
            Term::TLam(l) => {
                let x = self.pick(l.hint.name());
                let bound = self.ty(&l.bound);
                self.tscope.push(x.clone());
                let body = self.term(&l.body);
                self.tscope.pop();
                json!({"tag": "tlam", "binder": x.as_str(), "bound": bound, "body": body})
            }
        }
    }
}

fn avoid_of_type(t: &Type) -> BTreeSet<Name> {
    t.free_vars()
}

fn avoid_of_term(t: &Term) -> BTreeSet<Name> {
    let mut s = t.free_type_vars();
    s.extend(t.free_term_vars());
    s
}

fn avoid_of_context(ctx: &Context) -> BTreeSet<Name> {
    let mut s = BTreeSet::new();
    for e in ctx.entries() {
        s.insert(e.name().clone());
        e.ty().collect_free(&mut s);
    }
    s
}

pub fn type_to_json(t: &Type) -> Value {
    Namer::new(avoid_of_type(t)).ty(t)
}

pub fn term_to_json(t: &Term) -> Value {
    Namer::new(avoid_of_term(t)).term(t)
}

pub fn context_to_json(ctx: &Context) -> Value {
    let avoid = avoid_of_context(ctx);
    let entries: Vec<Value> = ctx
        .entries()
        .iter()
        .map(|e| {
            let mut n = Namer::new(avoid.clone());
            match e {
                Entry::TypeVar { name, bound } => json!({"tvar": name.as_str(), "bound": n.ty(bound)}),
                Entry::TermVar { name, ty } => json!({"var": name.as_str(), "type": n.ty(ty)}),
            }
        })
        .collect();
    Value::Array(entries)
}

pub fn judgment_to_json(j: &Judgment) -> Value {
    let ctx = j.ctx();
    let mut avoid = avoid_of_context(ctx);
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(j.kind()));
    obj.insert("ctx".into(), context_to_json(ctx));
    match j {
        Judgment::WfType { ty, .. } => {
            avoid.extend(avoid_of_type(ty));
            obj.insert("type".into(), Namer::new(avoid).ty(ty));
        }
        Judgment::Subtype { lhs, rhs, .. } => {
            avoid.extend(avoid_of_type(lhs));
            avoid.extend(avoid_of_type(rhs));
            obj.insert("lhs".into(), Namer::new(avoid.clone()).ty(lhs));
            obj.insert("rhs".into(), Namer::new(avoid).ty(rhs));
        }
        Judgment::Typing { term, ty, .. } => {
            avoid.extend(avoid_of_term(term));
            avoid.extend(avoid_of_type(ty));
            obj.insert("term".into(), Namer::new(avoid.clone()).term(term));
            obj.insert("type".into(), Namer::new(avoid).ty(ty));
        }
        Judgment::Equality { lhs, rhs, ty, .. } => {
            avoid.extend(avoid_of_term(lhs));
            avoid.extend(avoid_of_term(rhs));
            avoid.extend(avoid_of_type(ty));
            obj.insert("lhs".into(), Namer::new(avoid.clone()).term(lhs));
            obj.insert("rhs".into(), Namer::new(avoid.clone()).term(rhs));
            obj.insert("type".into(), Namer::new(avoid).ty(ty));
        }
    }
    Value::Object(obj)
}

pub fn derivation_to_json(d: &Derivation) -> Value {
    json!({
        "rule": d.rule.as_str(),
        "conclusion": judgment_to_json(&d.conclusion),
        "premises": d.premises.iter().map(derivation_to_json).collect::<Vec<_>>(),
    })
}

// ------------------------------------------------------------- reading

fn field<'v>(v: &'v Value, key: &str, path: &str) -> Result<&'v Value, JsonError> {
    v.get(key).ok_or_else(|| shape(path, format!("missing field `{key}`")))
}

fn str_field<'v>(v: &'v Value, key: &str, path: &str) -> Result<&'v str, JsonError> {
    field(v, key, path)?
        .as_str()
        .ok_or_else(|| shape(path, format!("field `{key}` must be a string")))
}

pub fn type_from_json(v: &Value) -> Result<Type, JsonError> {
    type_at(v, "$")
}

fn type_at(v: &Value, path: &str) -> Result<Type, JsonError> {
    if let Some(s) = v.as_str() {
        return surface::parse_type(s).map_err(|e| shape(path, e.to_string()));
    }
    let tag = str_field(v, "tag", path)?;
    let sub = |key: &str| type_at(field(v, key, path)?, &format!("{path}.{key}"));
    Ok(match tag {
        "top" => Type::Top,
        "tvar" => Type::var(str_field(v, "name", path)?),
        "arrow" => Type::arrow(sub("domain")?, sub("codomain")?),
        "meet" => Type::meet(sub("left")?, sub("right")?),
        "forall" => {
            let flavor = match str_field(v, "flavor", path)? {
                "k" => Flavor::Kernel,
                "t" => Flavor::TopStyle,
                "plain" => Flavor::Plain,
                other => return Err(shape(path, format!("unknown flavor `{other}`"))),
            };
            let bound = match v.get("bound") {
                Some(b) => type_at(b, &format!("{path}.bound"))?,
                None => Type::Top,
            };
            Type::forall(flavor, str_field(v, "binder", path)?, bound, sub("body")?)
        }
        other => return Err(shape(path, format!("unknown type tag `{other}`"))),
    })
}

pub fn term_from_json(v: &Value) -> Result<Term, JsonError> {
    term_at(v, "$")
}

fn term_at(v: &Value, path: &str) -> Result<Term, JsonError> {
    if let Some(s) = v.as_str() {
        return surface::parse_term(s).map_err(|e| shape(path, e.to_string()));
    }
    let tag = str_field(v, "tag", path)?;
    let ty = |key: &str| type_at(field(v, key, path)?, &format!("{path}.{key}"));
    let tm = |key: &str| term_at(field(v, key, path)?, &format!("{path}.{key}"));
    Ok(match tag {
        "top" => Term::Top,
        "var" => Term::var(str_field(v, "name", path)?),
        "app" => Term::app(tm("fn")?, tm("arg")?),
        "tapp" => Term::tapp(tm("fn")?, ty("arg")?),
        "lam" => Term::lam(str_field(v, "binder", path)?, ty("annotation")?, tm("body")?),
        "tlam" => Term::tlam(str_field(v, "binder", path)?, ty("bound")?, tm("body")?),
        other => return Err(shape(path, format!("unknown term tag `{other}`"))),
    })
}

pub fn context_from_json(v: &Value) -> Result<Context, JsonError> {
    context_at(v, "$")
}

fn context_at(v: &Value, path: &str) -> Result<Context, JsonError> {
    if let Some(s) = v.as_str() {
        return surface::parse_context(s).map_err(|e| shape(path, e.to_string()));
    }
    let items = v
        .as_array()
        .ok_or_else(|| shape(path, "context must be a string or an array"))?;
    let mut ctx = Context::new();
    for (i, item) in items.iter().enumerate() {
        let p = format!("{path}[{i}]");
        if let Some(x) = item.get("tvar").and_then(Value::as_str) {
            let bound = match item.get("bound") {
                Some(b) => type_at(b, &format!("{p}.bound"))?,
                None => Type::Top,
            };
            ctx.push_type_var(Name::from(x), bound);
        } else if let Some(x) = item.get("var").and_then(Value::as_str) {
            ctx.push_term_var(Name::from(x), type_at(field(item, "type", &p)?, &format!("{p}.type"))?);
        } else {
            return Err(shape(&p, "entry needs `tvar` or `var`"));
        }
    }
    Ok(ctx)
}

pub fn judgment_from_json(v: &Value) -> Result<Judgment, JsonError> {
    judgment_at(v, "$")
}

fn judgment_at(v: &Value, path: &str) -> Result<Judgment, JsonError> {
    let ctx = match v.get("ctx") {
        Some(c) => context_at(c, &format!("{path}.ctx"))?,
        None => Context::new(),
    };
    let ty = |key: &str| type_at(field(v, key, path)?, &format!("{path}.{key}"));
    let tm = |key: &str| term_at(field(v, key, path)?, &format!("{path}.{key}"));
    Ok(match str_field(v, "kind", path)? {
        "wf" => Judgment::WfType { ctx, ty: ty("type")? },
        "subtype" => Judgment::Subtype {
            ctx,
            lhs: ty("lhs")?,
            rhs: ty("rhs")?,
        },
        "typing" => Judgment::Typing {
            ctx,
            term: tm("term")?,
            ty: ty("type")?,
        },
        "equality" => Judgment::Equality {
            ctx,
            lhs: tm("lhs")?,
            rhs: tm("rhs")?,
            ty: ty("type")?,
        },
        other => return Err(shape(path, format!("unknown judgment kind `{other}`"))),
    })
}

pub fn derivation_from_json(v: &Value) -> Result<Derivation, JsonError> {
    derivation_at(v, "$")
}

fn derivation_at(v: &Value, path: &str) -> Result<Derivation, JsonError> {
    let rule: RuleId = str_field(v, "rule", path)?
        .parse()
        .map_err(|e: crate::deriv::UnknownRule| shape(path, e.to_string()))?;
    let conclusion = judgment_at(field(v, "conclusion", path)?, &format!("{path}.conclusion"))?;
    let premises = match v.get("premises") {
        None => Vec::new(),
        Some(Value::Array(ps)) => ps
            .iter()
            .enumerate()
            .map(|(i, p)| derivation_at(p, &format!("{path}.premises[{i}]")))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(shape(path, "`premises` must be an array")),
    };
    Ok(Derivation::new(rule, conclusion, premises))
}

pub fn derivation_from_str(text: &str) -> Result<Derivation, JsonError> {
    let v: Value =
        serde_json::from_str(text.trim().trim_end_matches(';')).map_err(|e| JsonError::Syntax(e.to_string()))?;
    derivation_from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_round_trip_with_shadowing() {
        let inner = Type::forall(Flavor::Kernel, "X", Type::var("X"), Type::var("X"));
        let t = Type::forall(Flavor::TopStyle, "X", Type::Top, Type::arrow(Type::var("X"), inner));
        let v = type_to_json(&t);
        assert_eq!(type_from_json(&v).unwrap(), t);
    }

    #[test]
    fn strings_are_surface_syntax() {
        let v = json!({"kind": "subtype", "ctx": "X <: Top", "lhs": "X", "rhs": "Top"});
        let j = judgment_from_json(&v).unwrap();
        assert_eq!(
            j,
            Judgment::subtype(&Context::new().with_type_var("X", Type::Top), Type::var("X"), Type::Top)
        );
    }

    #[test]
    fn flavor_tags() {
        let t = Type::forall(Flavor::Plain, "X", Type::Top, Type::var("X"));
        assert_eq!(type_to_json(&t)["flavor"], "plain");
    }

    #[test]
    fn derivation_round_trip() {
        let ctx = Context::new().with_type_var("X", Type::Top);
        let d = Derivation::new(
            RuleId::Sub(crate::system::SubRule::Var),
            Judgment::subtype(&ctx, Type::var("X"), Type::Top),
            vec![],
        );
        let text = derivation_to_json(&d).to_string();
        assert_eq!(derivation_from_str(&text).unwrap(), d);
    }
}
