//! Encoding of decorated bounded quantification into unbounded quantifiers
//! with meets, and a verifier that discharges the subtyping lemmas behind it
//! on concrete instances.
//!
//! A bounded variable `X <: S` is represented by `X /\ S` with `X` unbounded:
//! `forall_k (X <: S) . T` becomes `forall X . T[X /\ S / X]` and
//! `forall_t (X <: S) . T` substitutes only the negative occurrences.

use std::collections::BTreeMap;
use std::fmt;

use crate::algo::{algo_subtype_with, AlgoOptions};
use crate::check::check_subtype_derivation;
use crate::deriv::{Derivation, Judgment};
use crate::oracle::{SearchResult, SearchSession};
use crate::syntax::{fresh_name, Context, Entry, Flavor, Name, Quant, Term, Type};
use crate::system::SystemId;
use crate::wf::{wf_context, wf_type};

/// Translates a kt type. Bound and body are encoded first and then
/// substituted into; plain quantifiers are read as forall_k.
pub fn encode_type(ty: &Type) -> Type {
    match ty {
        Type::Top | Type::Var(_) | Type::Bound(_) => ty.clone(),
        Type::Arrow(a, b) => Type::arrow(encode_type(a), encode_type(b)),
        Type::Meet(a, b) => Type::meet(encode_type(a), encode_type(b)),
        Type::Forall(q) => {
            let x = fresh_name(q.hint.name(), |n| ty.mentions(n));
            let bound = encode_type(&q.bound);
            let body = encode_type(&q.open_with(&x));
            let rep = Type::meet(Type::Var(x.clone()), bound);
            let body = match q.flavor {
                Flavor::TopStyle => body.neg_subst(&x, &rep),
                Flavor::Kernel | Flavor::Plain => body.subst(&x, &rep),
            };
            Type::forall(Flavor::Plain, x, Type::Top, body)
        }
    }
}

/// Translates a kt term: `tfun (X <: S) => t` becomes a Top-bounded
/// abstraction over `t` with `X /\ S` for `X` in its annotations.
pub fn encode_term(t: &Term) -> Term {
    match t {
        Term::Top | Term::Var(_) | Term::Bound(_) => t.clone(),
        Term::App(f, a) => Term::app(encode_term(f), encode_term(a)),
        Term::TApp(f, ty) => Term::tapp(encode_term(f), encode_type(ty)),
        Term::Lam(l) => {
            let x = fresh_name(l.hint.name(), |n| {
                t.free_term_vars().contains(n) || t.free_type_vars().contains(n)
            });
            Term::lam(x.clone(), encode_type(&l.annot), encode_term(&l.open_with(&x)))
        }
        Term::TLam(l) => {
            let x = fresh_name(l.hint.name(), |n| {
                t.free_term_vars().contains(n) || t.free_type_vars().contains(n)
            });
            let rep = Type::meet(Type::Var(x.clone()), encode_type(&l.bound));
            let body = encode_term(&l.open_with(&x)).subst_type(&x, &rep);
            Term::tlam(x, Type::Top, body)
        }
    }
}

/// Simultaneous substitution of locally closed types for free variables.
pub fn subst_many(ty: &Type, sigma: &[(Name, Type)]) -> Type {
    match ty {
        Type::Var(n) => sigma
            .iter()
            .find(|(x, _)| x == n)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| ty.clone()),
        Type::Top | Type::Bound(_) => ty.clone(),
        Type::Arrow(a, b) => Type::arrow(subst_many(a, sigma), subst_many(b, sigma)),
        Type::Meet(a, b) => Type::meet(subst_many(a, sigma), subst_many(b, sigma)),
        Type::Forall(q) => Type::Forall(Box::new(Quant {
            flavor: q.flavor,
            hint: q.hint.clone(),
            bound: subst_many(&q.bound, sigma),
            body: subst_many(&q.body, sigma),
        })),
    }
}

/// The encoded context together with the substitution `X := X /\ S'` that
/// every type formed in the original context must undergo. Variables
/// bounded by `Top` already mean themselves and are left alone.
pub fn encode_context(ctx: &Context) -> (Context, Vec<(Name, Type)>) {
    let mut out = Context::new();
    let mut sigma: Vec<(Name, Type)> = Vec::new();
    for e in ctx.entries() {
        match e {
            Entry::TypeVar { name, bound } => {
                out.push_type_var(name.clone(), Type::Top);
                if !bound.is_top() {
                    let b = subst_many(&encode_type(bound), &sigma);
                    sigma.push((name.clone(), Type::meet(Type::Var(name.clone()), b)));
                }
            }
            Entry::TermVar { name, ty } => out.push_term_var(name.clone(), subst_many(&encode_type(ty), &sigma)),
        }
    }
    (out, sigma)
}

/// Encodes a whole judgment, context included.
pub fn encode_judgment(j: &Judgment) -> Judgment {
    let (ctx, sigma) = encode_context(j.ctx());
    let ty = |t: &Type| subst_many(&encode_type(t), &sigma);
    let tm = |t: &Term| encode_term(t).map_annotations(&|a| subst_many(a, &sigma));
    match j {
        Judgment::WfType { ty: t, .. } => Judgment::WfType { ctx, ty: ty(t) },
        Judgment::Subtype { lhs, rhs, .. } => Judgment::Subtype {
            ctx,
            lhs: ty(lhs),
            rhs: ty(rhs),
        },
        Judgment::Typing { term, ty: t, .. } => Judgment::Typing {
            ctx,
            term: tm(term),
            ty: ty(t),
        },
        Judgment::Equality { lhs, rhs, ty: t, .. } => Judgment::Equality {
            ctx,
            lhs: tm(lhs),
            rhs: tm(rhs),
            ty: ty(t),
        },
    }
}

// ---------------------------------------------------------- lemmas

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaId {
    KFun,
    MixedMono,
    MixedCong,
    TopRule,
    Loc,
    BetaSide,
    EtaSide,
}

impl LemmaId {
    pub const ALL: [LemmaId; 7] = [
        LemmaId::KFun,
        LemmaId::MixedMono,
        LemmaId::MixedCong,
        LemmaId::TopRule,
        LemmaId::Loc,
        LemmaId::BetaSide,
        LemmaId::EtaSide,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::KFun => "L-KFun",
            LemmaId::MixedMono => "L-MixedMono",
            LemmaId::MixedCong => "L-MixedCong",
            LemmaId::TopRule => "L-TopRule",
            LemmaId::Loc => "L-Loc",
            LemmaId::BetaSide => "L-BetaSide",
            LemmaId::EtaSide => "L-EtaSide",
        }
    }

    /// Metavariables an instance must bind.
    pub fn metavariables(self) -> &'static [&'static str] {
        match self {
            LemmaId::KFun => &["S", "T", "T'"],
            LemmaId::MixedMono => &["S_-", "S_+", "S_-'", "S_+'", "T"],
            LemmaId::MixedCong => &["S_-", "S_+", "T", "T'"],
            LemmaId::TopRule => &["S", "S'", "T"],
            LemmaId::Loc => &["S0", "T0", "S1", "T1"],
            LemmaId::BetaSide => &["S", "S'", "T"],
            LemmaId::EtaSide => &["S", "T"],
        }
    }

    /// The system whose types the bindings range over: decorated types for
    /// the lemmas about encoded quantifiers, meet types otherwise.
    pub fn source_system(self) -> SystemId {
        match self {
            LemmaId::KFun | LemmaId::TopRule | LemmaId::Loc => SystemId::Kt,
            _ => SystemId::Fwedge,
        }
    }

    /// Metavariables formed under the lemma variable.
    fn under_var(self) -> &'static [&'static str] {
        match self {
            LemmaId::KFun => &["T", "T'"],
            LemmaId::MixedMono => &["T"],
            LemmaId::MixedCong => &["T", "T'"],
            LemmaId::TopRule => &["T"],
            LemmaId::Loc => &["S1", "T1"],
            LemmaId::BetaSide | LemmaId::EtaSide => &["T"],
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LemmaId {
    type Err = String;

    fn from_str(s: &str) -> Result<LemmaId, String> {
        let key = s.strip_prefix("L-").unwrap_or(s);
        LemmaId::ALL
            .into_iter()
            .find(|l| l.as_str()[2..].eq_ignore_ascii_case(key))
            .ok_or_else(|| format!("unknown lemma `{s}`"))
    }
}

/// How a premise was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Algo { accepted: bool, steps: u64 },
    Search(SearchResult),
}

impl Evidence {
    pub fn established(&self) -> bool {
        match self {
            Evidence::Algo { accepted, .. } => *accepted,
            Evidence::Search(r) => r.found(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaInstance {
    pub lemma: LemmaId,
    pub ctx: Context,
    /// The variable the lemma substitutes for, conventionally `X`.
    pub var: Name,
    pub bindings: BTreeMap<String, Type>,
    /// Optional pre-established premises, in premise order. A found search
    /// result is accepted after its derivation is checked; anything else is
    /// re-established.
    pub premise_evidence: Vec<Evidence>,
}

impl LemmaInstance {
    pub fn new(
        lemma: LemmaId,
        ctx: Context,
        bindings: impl IntoIterator<Item = (&'static str, Type)>,
    ) -> LemmaInstance {
        LemmaInstance {
            lemma,
            ctx,
            var: Name::from("X"),
            bindings: bindings.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            premise_evidence: Vec::new(),
        }
    }

    fn get(&self, k: &str) -> &Type {
        &self.bindings[k]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LemmaError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PremiseReport {
    pub system: SystemId,
    pub judgment: Judgment,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaOutcome {
    Discharged(SearchResult),
    PremiseNotEstablished { index: usize },
    ConclusionNotFound(SearchResult),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub premises: Vec<PremiseReport>,
    /// The meet-type judgment the lemma concludes.
    pub conclusion: Judgment,
    pub outcome: LemmaOutcome,
}

impl LemmaReport {
    pub fn discharged(&self) -> bool {
        matches!(self.outcome, LemmaOutcome::Discharged(_))
    }
}

fn sub(ctx: &Context, l: Type, r: Type) -> Judgment {
    Judgment::subtype(ctx, l, r)
}

/// Premise judgments (with the system they live in) and the conclusion.
pub fn lemma_statement(inst: &LemmaInstance) -> Result<(Vec<(SystemId, Judgment)>, Judgment), LemmaError> {
    validate(inst)?;
    let x = &inst.var;
    let g = |k: &str| inst.get(k).clone();
    let theta = &inst.ctx;
    let under = |b: Type| theta.clone().with_type_var(x.clone(), b);
    let kt = SystemId::Kt;
    let fw = SystemId::Fwedge;
    let enc = |l: Type, r: Type| encode_judgment(&sub(theta, l, r));
    let quant = |f, b: Type, body: Type| Type::forall(f, x.clone(), b, body);
    Ok(match inst.lemma {
        LemmaId::KFun => (
            vec![(kt, sub(&under(g("S")), g("T"), g("T'")))],
            enc(
                quant(Flavor::Kernel, g("S"), g("T")),
                quant(Flavor::Kernel, g("S"), g("T'")),
            ),
        ),
        LemmaId::TopRule => (
            vec![(kt, sub(theta, g("S'"), g("S")))],
            enc(
                quant(Flavor::TopStyle, g("S"), g("T")),
                quant(Flavor::TopStyle, g("S'"), g("T")),
            ),
        ),
        LemmaId::Loc => (
            vec![
                (kt, sub(theta, g("T0"), g("S0"))),
                (kt, sub(&under(g("S0")), g("S1"), g("T1"))),
            ],
            enc(
                quant(Flavor::Kernel, g("S0"), g("S1")),
                quant(Flavor::TopStyle, g("T0"), g("T1")),
            ),
        ),
        LemmaId::MixedMono => (
            vec![
                (fw, sub(theta, g("S_-'"), g("S_-"))),
                (fw, sub(theta, g("S_+"), g("S_+'"))),
            ],
            sub(
                theta,
                g("T").mixed_subst(x, &g("S_-"), &g("S_+")),
                g("T").mixed_subst(x, &g("S_-'"), &g("S_+'")),
            ),
        ),
        LemmaId::MixedCong => (
            vec![(fw, sub(&under(Type::Top), g("T"), g("T'")))],
            sub(
                theta,
                g("T").mixed_subst(x, &g("S_-"), &g("S_+")),
                g("T'").mixed_subst(x, &g("S_-"), &g("S_+")),
            ),
        ),
        LemmaId::BetaSide => (
            vec![(fw, sub(theta, g("S'"), g("S")))],
            sub(
                theta,
                g("T").subst(x, &Type::meet(g("S"), g("S'"))),
                g("T").subst(x, &g("S'")),
            ),
        ),
        LemmaId::EtaSide => {
            let t = g("T");
            let s = g("S");
            let y = fresh_name(&Name::from("Y"), |n| {
                theta.contains(n) || n == x || t.mentions(n) || s.mentions(n)
            });
            let ctx = theta.clone().with_type_var(y.clone(), Type::Top);
            let ys = Type::meet(Type::Var(y.clone()), s.clone());
            let lhs = t.mixed_subst(x, &Type::meet(ys.clone(), s), &ys);
            let rhs = t.mixed_subst(x, &ys, &Type::Var(y));
            (Vec::new(), sub(&ctx, lhs, rhs))
        }
    })
}

fn validate(inst: &LemmaInstance) -> Result<(), LemmaError> {
    let bad = |m: String| LemmaError::InvalidInstance(m);
    let want = inst.lemma.metavariables();
    for k in inst.bindings.keys() {
        if !want.contains(&k.as_str()) {
            return Err(bad(format!("{} has no metavariable `{k}`", inst.lemma)));
        }
    }
    let sys = inst.lemma.source_system().rules();
    wf_context(&inst.ctx, sys).map_err(|e| bad(e.to_string()))?;
    if inst.ctx.contains(&inst.var) {
        return Err(bad(format!("`{}` is already bound in the context", inst.var)));
    }
    let bound = match inst.lemma {
        LemmaId::KFun | LemmaId::TopRule => inst.bindings.get("S").cloned(),
        LemmaId::Loc => inst.bindings.get("S0").cloned(),
        _ => Some(Type::Top),
    };
    for k in want {
        let ty = inst
            .bindings
            .get(*k)
            .ok_or_else(|| bad(format!("{} needs a binding for `{k}`", inst.lemma)))?;
        let ctx = if inst.lemma.under_var().contains(k) {
            inst.ctx
                .clone()
                .with_type_var(inst.var.clone(), bound.clone().unwrap_or(Type::Top))
        } else {
            inst.ctx.clone()
        };
        wf_type(&ctx, ty, sys).map_err(|e| bad(format!("`{k}`: {e}")))?;
    }
    Ok(())
}

/// Establishes the premises with the subtyping algorithm (decorated
/// premises) or the oracle (meet-type premises), then searches for the
/// conclusion in the meet system.
pub fn verify_lemma_instance(inst: &LemmaInstance, depth: u32) -> Result<LemmaReport, LemmaError> {
    let (premises, conclusion) = lemma_statement(inst)?;
    let mut reports = Vec::new();
    for (i, (system, j)) in premises.into_iter().enumerate() {
        let evidence = supplied(inst, i, system, &j).unwrap_or_else(|| establish(system, &j, depth));
        let ok = evidence.established();
        reports.push(PremiseReport {
            system,
            judgment: j,
            evidence,
        });
        if !ok {
            return Ok(LemmaReport {
                lemma: inst.lemma,
                premises: reports,
                conclusion,
                outcome: LemmaOutcome::PremiseNotEstablished { index: i },
            });
        }
    }
    let (ctx, lhs, rhs) = conclusion.as_subtype().expect("lemmas conclude subtyping");
    let result = SearchSession::new(SystemId::Fwedge, ctx, depth)
        .and_then(|mut s| s.search(lhs, rhs))
        .map_err(|e| LemmaError::InvalidInstance(format!("conclusion: {e}")))?;
    let outcome = if result.found() {
        LemmaOutcome::Discharged(result)
    } else {
        LemmaOutcome::ConclusionNotFound(result)
    };
    Ok(LemmaReport {
        lemma: inst.lemma,
        premises: reports,
        conclusion,
        outcome,
    })
}

fn supplied(inst: &LemmaInstance, i: usize, system: SystemId, j: &Judgment) -> Option<Evidence> {
    match inst.premise_evidence.get(i)? {
        Evidence::Search(r) => {
            let d: &Derivation = r.derivation()?;
            (d.conclusion == *j && check_subtype_derivation(system, d).is_ok()).then(|| Evidence::Search(r.clone()))
        }
        Evidence::Algo { .. } => None,
    }
}

fn establish(system: SystemId, j: &Judgment, depth: u32) -> Evidence {
    let (ctx, l, r) = j.as_subtype().expect("subtyping premise");
    if system.rules().has_algorithm() {
        let res = algo_subtype_with(ctx, l, r, &AlgoOptions::quiet());
        Evidence::Algo {
            accepted: res.accepted(),
            steps: res.trace.step_count,
        }
    } else {
        match SearchSession::new(system, ctx, depth).and_then(|mut s| s.search(l, r)) {
            Ok(res) => Evidence::Search(res),
            Err(_) => Evidence::Algo {
                accepted: false,
                steps: 0,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_term, parse_type};

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn type_examples() {
        assert_eq!(
            encode_type(&ty("forall_k X <: S . X -> X")),
            ty("forall X . (X /\\ S) -> (X /\\ S)")
        );
        assert_eq!(
            encode_type(&ty("forall_t X <: S . X -> X")),
            ty("forall X . (X /\\ S) -> X")
        );
        assert_eq!(encode_type(&ty("forall_k X . Top")), ty("forall X . Top"));
    }

    #[test]
    fn term_examples() {
        let t = parse_term("tfun (Z <: X) => fun (y : Z) => y").unwrap();
        assert_eq!(
            encode_term(&t),
            parse_term("tfun (Z <: Top) => fun (y : Z /\\ X) => y").unwrap()
        );
        let t = parse_term("fun (x : Top) => x").unwrap();
        assert_eq!(encode_term(&t), t);
    }

    #[test]
    fn judgment_encoding_rewrites_bounded_variables() {
        let ctx = Context::new()
            .with_type_var("X", Type::Top)
            .with_type_var("W", Type::var("X"));
        let j = encode_judgment(&Judgment::subtype(&ctx, Type::var("W"), Type::var("X")));
        let (c, l, r) = j.as_subtype().unwrap();
        assert!(c.type_vars().all(|(_, b)| b.is_top()));
        assert_eq!(l, &ty("W /\\ X"));
        assert_eq!(r, &ty("X"));
    }

    #[test]
    fn lemma_examples() {
        let a = Context::new().with_type_var("A", Type::Top);
        let loc = LemmaInstance::new(
            LemmaId::Loc,
            a,
            [
                ("S0", ty("A")),
                ("T0", ty("A")),
                ("S1", ty("X -> X")),
                ("T1", ty("X -> A")),
            ],
        );
        let r = verify_lemma_instance(&loc, 16).unwrap();
        assert!(r.discharged(), "{:?}", r.outcome);
        assert_eq!(
            r.conclusion.as_subtype().unwrap().1,
            &ty("forall X . (X /\\ A) -> (X /\\ A)")
        );

        let top = LemmaInstance::new(
            LemmaId::TopRule,
            Context::new(),
            [("S", Type::Top), ("S'", ty("Top -> Top")), ("T", ty("X -> X"))],
        );
        let r = verify_lemma_instance(&top, 16).unwrap();
        assert!(r.discharged());
        assert_eq!(
            r.conclusion.as_subtype().unwrap().2,
            &ty("forall X . (X /\\ (Top -> Top)) -> X")
        );

        let mono = LemmaInstance::new(
            LemmaId::MixedMono,
            Context::new(),
            [
                ("S_-", Type::Top),
                ("S_+", Type::Top),
                ("S_-'", Type::Top),
                ("S_+'", Type::Top),
                ("T", ty("X -> X")),
            ],
        );
        let r = verify_lemma_instance(&mono, 16).unwrap();
        match &r.outcome {
            LemmaOutcome::Discharged(s) => assert_eq!(s.derivation().unwrap().rule.to_string(), "Refl"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_premise_is_reported() {
        let inst = LemmaInstance::new(
            LemmaId::TopRule,
            Context::new(),
            [("S", ty("Top -> Top")), ("S'", Type::Top), ("T", ty("X"))],
        );
        let r = verify_lemma_instance(&inst, 8).unwrap();
        assert_eq!(r.outcome, LemmaOutcome::PremiseNotEstablished { index: 0 });
    }

    #[test]
    fn bad_bindings_are_rejected() {
        let inst = LemmaInstance::new(LemmaId::EtaSide, Context::new(), [("S", Type::Top)]);
        assert!(verify_lemma_instance(&inst, 8).is_err());
        let inst = LemmaInstance::new(
            LemmaId::EtaSide,
            Context::new(),
            [("S", Type::Top), ("T", ty("X")), ("Q", Type::Top)],
        );
        assert!(verify_lemma_instance(&inst, 8).is_err());
    }
}
