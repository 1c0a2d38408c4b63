//! Node-by-node derivation checking for subtyping, typing and equality.

use std::fmt;

use crate::deriv::{Derivation, EqRule, Judgment, RuleId, TyRule};
use crate::syntax::{Context, Entry, Flavor, Name, Term, Type};
use crate::system::{RuleSystem, SubRule, SystemId};
use crate::wf::{check_constructs, check_term_constructs, wf_term, wf_type, wf_type_in, WfError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckErrorKind {
    RuleMismatch(String),
    WrongSystem(RuleId),
    IllFormed(WfError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct CheckError {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub kind: CheckErrorKind,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() {
            "root".to_string()
        } else {
            self.path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
        };
        match &self.kind {
            CheckErrorKind::RuleMismatch(why) => write!(f, "rule mismatch at {at}: {why}"),
            CheckErrorKind::WrongSystem(r) => write!(f, "rule {r} at {at} is not part of this system"),
            CheckErrorKind::IllFormed(e) => write!(f, "ill-formed judgment at {at}: {e}"),
        }
    }
}

pub type Verdict = Result<(), CheckError>;

/// Checks any derivation, dispatching on each node's rule.
pub fn check_derivation(system: SystemId, d: &Derivation) -> Verdict {
    let c = Checker { sys: system.rules() };
    c.root(d)?;
    c.node(d, &mut Vec::new())
}

pub fn check_subtype_derivation(system: SystemId, d: &Derivation) -> Verdict {
    expect_root_kind(d, "subtype")?;
    check_derivation(system, d)
}

pub fn check_typing_derivation(system: SystemId, d: &Derivation) -> Verdict {
    expect_root_kind(d, "typing")?;
    check_derivation(system, d)
}

pub fn check_equality_derivation(system: SystemId, d: &Derivation) -> Verdict {
    expect_root_kind(d, "equality")?;
    check_derivation(system, d)
}

fn expect_root_kind(d: &Derivation, kind: &str) -> Verdict {
    if d.conclusion.kind() == kind {
        Ok(())
    } else {
        Err(CheckError {
            path: Vec::new(),
            kind: CheckErrorKind::RuleMismatch(format!("expected a {kind} judgment, found {}", d.conclusion.kind())),
        })
    }
}

struct Checker {
    sys: &'static dyn RuleSystem,
}

type Step = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn sub_parts(d: &Derivation) -> Option<(&Context, &Type, &Type)> {
    match &d.conclusion {
        Judgment::Subtype { ctx, lhs, rhs } => Some((ctx, lhs, rhs)),
        _ => None,
    }
}

fn ty_parts(d: &Derivation) -> Option<(&Context, &Term, &Type)> {
    match &d.conclusion {
        Judgment::Typing { ctx, term, ty } => Some((ctx, term, ty)),
        _ => None,
    }
}

fn eq_parts(d: &Derivation) -> Option<(&Context, &Term, &Term, &Type)> {
    match &d.conclusion {
        Judgment::Equality { ctx, lhs, rhs, ty } => Some((ctx, lhs, rhs, ty)),
        _ => None,
    }
}

/// Premise `i` as a subtyping judgment in context `theta`.
fn sub_premise<'d>(d: &'d Derivation, i: usize, theta: &Context) -> Result<(&'d Type, &'d Type), String> {
    let (ctx, l, r) = sub_parts(&d.premises[i]).ok_or_else(|| format!("premise {i} must be a subtyping judgment"))?;
    ensure!(ctx == theta, "premise {i} changes the context");
    Ok((l, r))
}

fn ty_premise<'d>(d: &'d Derivation, i: usize, theta: &Context) -> Result<(&'d Term, &'d Type), String> {
    let (ctx, t, ty) = ty_parts(&d.premises[i]).ok_or_else(|| format!("premise {i} must be a typing judgment"))?;
    ensure!(ctx == theta, "premise {i} changes the context");
    Ok((t, ty))
}

fn eq_premise<'d>(d: &'d Derivation, i: usize, theta: &Context) -> Result<(&'d Term, &'d Term, &'d Type), String> {
    let (ctx, l, r, ty) =
        eq_parts(&d.premises[i]).ok_or_else(|| format!("premise {i} must be an equality judgment"))?;
    ensure!(ctx == theta, "premise {i} changes the context");
    Ok((l, r, ty))
}

/// The name and entry by which a binder premise extends `theta`.
fn extension<'c>(theta: &Context, premise_ctx: &'c Context, i: usize) -> Result<&'c Entry, String> {
    ensure!(
        premise_ctx.len() == theta.len() + 1 && theta.is_prefix_of(premise_ctx),
        "premise {i} must extend the context by exactly one entry"
    );
    let e = &premise_ctx.entries()[theta.len()];
    ensure!(
        !theta.contains(e.name()),
        "`{}` is already bound in the context",
        e.name()
    );
    Ok(e)
}

fn type_extension(theta: &Context, premise_ctx: &Context, i: usize) -> Result<(Name, Type), String> {
    match extension(theta, premise_ctx, i)? {
        Entry::TypeVar { name, bound } => Ok((name.clone(), bound.clone())),
        Entry::TermVar { .. } => Err(format!("premise {i} must bind a type variable")),
    }
}

fn term_extension(theta: &Context, premise_ctx: &Context, i: usize) -> Result<(Name, Type), String> {
    match extension(theta, premise_ctx, i)? {
        Entry::TermVar { name, ty } => Ok((name.clone(), ty.clone())),
        Entry::TypeVar { .. } => Err(format!("premise {i} must bind a term variable")),
    }
}

fn quant(t: &Type, flavor: Flavor, side: &str) -> Result<(Type, Type), String> {
    match t {
        Type::Forall(q) if q.flavor == flavor => Ok((q.bound.clone(), q.body.clone())),
        _ => Err(format!("{side} must be a {} quantifier", flavor.keyword())),
    }
}

fn fresh_in_types(x: &Name, tys: &[&Type]) -> Step {
    ensure!(
        tys.iter().all(|t| !t.mentions(x)),
        "`{x}` occurs free in the conclusion"
    );
    Ok(())
}

fn fresh_in_terms(x: &Name, ts: &[&Term]) -> Step {
    ensure!(
        ts.iter()
            .all(|t| !t.free_term_vars().contains(x) && !t.free_type_vars().contains(x)),
        "`{x}` occurs free in the conclusion"
    );
    Ok(())
}

/// Body of a quantifier opened with `x`.
fn open(body: &Type, x: &Name) -> Type {
    body.open(0, &Type::Var(x.clone()))
}

impl Checker {
    /// Full formation check of the root conclusion.
    fn root(&self, d: &Derivation) -> Verdict {
        self.formed(&d.conclusion).map_err(|e| CheckError {
            path: Vec::new(),
            kind: CheckErrorKind::IllFormed(e),
        })
    }

    fn formed(&self, j: &Judgment) -> Result<(), WfError> {
        match j {
            Judgment::WfType { ctx, ty } => wf_type(ctx, ty, self.sys),
            Judgment::Subtype { ctx, lhs, rhs } => {
                wf_type(ctx, lhs, self.sys)?;
                wf_type_in(ctx, rhs, self.sys)
            }
            Judgment::Typing { ctx, term, ty } => {
                wf_type(ctx, ty, self.sys)?;
                wf_term(ctx, term, self.sys)
            }
            Judgment::Equality { ctx, lhs, rhs, ty } => {
                wf_type(ctx, ty, self.sys)?;
                wf_term(ctx, lhs, self.sys)?;
                wf_term(ctx, rhs, self.sys)
            }
        }
    }

    /// Constructs allowed by the system, checked at every node.
    fn constructs(&self, j: &Judgment) -> Result<(), WfError> {
        match j {
            Judgment::WfType { ty, .. } => check_constructs(ty, self.sys),
            Judgment::Subtype { lhs, rhs, .. } => {
                check_constructs(lhs, self.sys)?;
                check_constructs(rhs, self.sys)
            }
            Judgment::Typing { term, ty, .. } => {
                check_constructs(ty, self.sys)?;
                check_term_constructs(term, self.sys)
            }
            Judgment::Equality { lhs, rhs, ty, .. } => {
                check_constructs(ty, self.sys)?;
                check_term_constructs(lhs, self.sys)?;
                check_term_constructs(rhs, self.sys)
            }
        }
    }

    fn node(&self, d: &Derivation, path: &mut Vec<usize>) -> Verdict {
        let fail = |kind: CheckErrorKind, path: &Vec<usize>| CheckError {
            path: path.clone(),
            kind,
        };
        if let RuleId::Sub(r) = d.rule {
            if !self.sys.allows_rule(r) {
                return Err(fail(CheckErrorKind::WrongSystem(d.rule), path));
            }
        }
        self.constructs(&d.conclusion)
            .map_err(|e| fail(CheckErrorKind::IllFormed(e), path))?;
        let step = match d.rule {
            RuleId::Sub(r) => self.sub_rule(r, d),
            RuleId::Ty(r) => self.ty_rule(r, d),
            RuleId::Eq(r) => self.eq_rule(r, d),
        };
        step.map_err(|why| fail(CheckErrorKind::RuleMismatch(why), path))?;
        if d.premises.is_empty() {
            self.formed(&d.conclusion)
                .map_err(|e| fail(CheckErrorKind::IllFormed(e), path))?;
        }
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            self.node(p, path)?;
            path.pop();
        }
        Ok(())
    }

    fn premises(d: &Derivation, n: usize) -> Step {
        ensure!(
            d.premises.len() == n,
            "{} takes {n} premise(s), found {}",
            d.rule,
            d.premises.len()
        );
        Ok(())
    }

    fn sub_rule(&self, r: SubRule, d: &Derivation) -> Step {
        let (theta, s, t) = sub_parts(d).ok_or_else(|| format!("{} concludes a subtyping judgment", d.rule))?;
        match r {
            SubRule::Var => {
                Self::premises(d, 0)?;
                let x = s.as_var().ok_or("Var needs a type variable on the left")?;
                let b = theta.bound_of(x).ok_or_else(|| format!("`{x}` has no bound"))?;
                ensure!(b == t, "the right side must be the bound of `{x}`");
            }
            SubRule::Top => {
                Self::premises(d, 0)?;
                ensure!(t.is_top(), "Top concludes a supertype Top");
            }
            SubRule::Refl => {
                Self::premises(d, 0)?;
                ensure!(s == t, "Refl needs identical sides");
            }
            SubRule::Trans => {
                Self::premises(d, 2)?;
                let (l0, m0) = sub_premise(d, 0, theta)?;
                let (m1, r1) = sub_premise(d, 1, theta)?;
                ensure!(l0 == s, "first premise must start at the left side");
                ensure!(r1 == t, "second premise must end at the right side");
                ensure!(m0 == m1, "premises disagree on the middle type");
            }
            SubRule::Arrow => {
                Self::premises(d, 2)?;
                let (Type::Arrow(s1, s2), Type::Arrow(t1, t2)) = (s, t) else {
                    return Err("Arrow relates two arrow types".into());
                };
                let (a, b) = sub_premise(d, 0, theta)?;
                ensure!(
                    a == &**t1 && b == &**s1,
                    "first premise must compare domains contravariantly"
                );
                let (a, b) = sub_premise(d, 1, theta)?;
                ensure!(a == &**s2 && b == &**t2, "second premise must compare codomains");
            }
            SubRule::ForallFun => {
                Self::premises(d, 1)?;
                let (s0, s1) = quant(s, Flavor::Kernel, "left side")?;
                let (t0, t1) = quant(t, Flavor::Kernel, "right side")?;
                ensure!(s0 == t0, "ForallFun needs equal bounds");
                self.body_premise(d, 0, theta, &s0, &s1, &t1, s, t)?;
            }
            SubRule::ForallLoc => {
                Self::premises(d, 2)?;
                let (s0, s1) = quant(s, Flavor::Kernel, "left side")?;
                let (t0, t1) = quant(t, Flavor::TopStyle, "right side")?;
                let (a, b) = sub_premise(d, 0, theta)?;
                ensure!(a == &t0 && b == &s0, "first premise must relate the bounds");
                self.body_premise(d, 1, theta, &s0, &s1, &t1, s, t)?;
            }
            SubRule::ForallTop => {
                Self::premises(d, 2)?;
                let (s0, s1) = quant(s, Flavor::TopStyle, "left side")?;
                let (t0, t1) = quant(t, Flavor::TopStyle, "right side")?;
                let (a, b) = sub_premise(d, 0, theta)?;
                ensure!(a == &t0 && b == &s0, "first premise must relate the bounds");
                self.body_premise(d, 1, theta, &Type::Top, &s1, &t1, s, t)?;
            }
            SubRule::ForallOrig => {
                Self::premises(d, 2)?;
                let (s0, s1) = quant(s, Flavor::Plain, "left side")?;
                let (t0, t1) = quant(t, Flavor::Plain, "right side")?;
                let (a, b) = sub_premise(d, 0, theta)?;
                ensure!(a == &t0 && b == &s0, "first premise must relate the bounds");
                self.body_premise(d, 1, theta, &t0, &s1, &t1, s, t)?;
            }
            SubRule::MeetL | SubRule::MeetR => {
                Self::premises(d, 0)?;
                let Type::Meet(a, b) = s else {
                    return Err(format!("{} needs a meet on the left", d.rule));
                };
                let part = if r == SubRule::MeetL { a } else { b };
                ensure!(&**part == t, "the right side must be the selected component");
            }
            SubRule::MeetIntro => {
                Self::premises(d, 2)?;
                let Type::Meet(a, b) = t else {
                    return Err("MeetIntro concludes a meet on the right".into());
                };
                let (l, r0) = sub_premise(d, 0, theta)?;
                ensure!(l == s && r0 == &**a, "first premise must reach the left component");
                let (l, r1) = sub_premise(d, 1, theta)?;
                ensure!(l == s && r1 == &**b, "second premise must reach the right component");
            }
        }
        Ok(())
    }

    /// Premise `i`: `theta, Y <: bound |- s1[Y] <: t1[Y]` for a fresh `Y`.
    #[allow(clippy::too_many_arguments)]
    fn body_premise(
        &self,
        d: &Derivation,
        i: usize,
        theta: &Context,
        bound: &Type,
        s1: &Type,
        t1: &Type,
        s: &Type,
        t: &Type,
    ) -> Step {
        let (ctx, l, r) =
            sub_parts(&d.premises[i]).ok_or_else(|| format!("premise {i} must be a subtyping judgment"))?;
        let (y, b) = type_extension(theta, ctx, i)?;
        fresh_in_types(&y, &[s, t])?;
        ensure!(&b == bound, "premise {i} binds the wrong bound");
        ensure!(
            *l == open(s1, &y) && *r == open(t1, &y),
            "premise {i} must compare the bodies"
        );
        Ok(())
    }

    fn ty_rule(&self, r: TyRule, d: &Derivation) -> Step {
        let (theta, term, ty) = ty_parts(d).ok_or_else(|| format!("{} concludes a typing judgment", d.rule))?;
        match r {
            TyRule::Top => {
                Self::premises(d, 0)?;
                ensure!(*term == Term::Top && ty.is_top(), "top : Top only");
            }
            TyRule::Var => {
                Self::premises(d, 0)?;
                let Term::Var(x) = term else {
                    return Err("var needs a term variable".into());
                };
                let declared = theta.type_of(x).ok_or_else(|| format!("`{x}` is not in the context"))?;
                ensure!(declared == ty, "`{x}` is declared with a different type");
            }
            TyRule::Sub => {
                Self::premises(d, 2)?;
                let (t0, a) = ty_premise(d, 0, theta)?;
                let (l, r) = sub_premise(d, 1, theta)?;
                ensure!(t0 == term, "first premise must type the same term");
                ensure!(a == l && r == ty, "subtyping premise must connect the two types");
            }
            TyRule::ArrowI => {
                Self::premises(d, 1)?;
                let Term::Lam(lam) = term else {
                    return Err("arrow-i types a term abstraction".into());
                };
                let Type::Arrow(dom, cod) = ty else {
                    return Err("arrow-i concludes an arrow type".into());
                };
                ensure!(**dom == lam.annot, "domain must be the annotation");
                let (pctx, pt, pty) = ty_parts(&d.premises[0]).ok_or("premise must be a typing judgment")?;
                let (y, a) = term_extension(theta, pctx, 0)?;
                fresh_in_terms(&y, &[term])?;
                ensure!(a == lam.annot, "premise binds the wrong type");
                ensure!(
                    *pt == lam.open_with(&y) && pty == &**cod,
                    "premise must type the body at the codomain"
                );
            }
            TyRule::ArrowE => {
                Self::premises(d, 2)?;
                let Term::App(f, a) = term else {
                    return Err("arrow-e types an application".into());
                };
                let (f0, fty) = ty_premise(d, 0, theta)?;
                let (a0, aty) = ty_premise(d, 1, theta)?;
                ensure!(
                    f0 == &**f && a0 == &**a,
                    "premises must type the function and the argument"
                );
                let Type::Arrow(dom, cod) = fty else {
                    return Err("function premise must have an arrow type".into());
                };
                ensure!(&**dom == aty && &**cod == ty, "types do not line up");
            }
            TyRule::ForallI => {
                Self::premises(d, 1)?;
                let Term::TLam(lam) = term else {
                    return Err("forall-i types a type abstraction".into());
                };
                let flavor = self.sys.intro_flavor();
                let (b, body_ty) = quant(ty, flavor, "conclusion type")?;
                ensure!(b == lam.bound, "quantifier bound must be the abstraction's bound");
                let (pctx, pt, pty) = ty_parts(&d.premises[0]).ok_or("premise must be a typing judgment")?;
                let (y, pb) = type_extension(theta, pctx, 0)?;
                fresh_in_terms(&y, &[term])?;
                fresh_in_types(&y, &[ty])?;
                ensure!(pb == lam.bound, "premise binds the wrong bound");
                ensure!(
                    *pt == lam.open_with(&y) && *pty == open(&body_ty, &y),
                    "premise must type the body"
                );
            }
            TyRule::ForallE => {
                Self::premises(d, 2)?;
                let Term::TApp(f, arg) = term else {
                    return Err("forall-e types a type application".into());
                };
                let (f0, fty) = ty_premise(d, 0, theta)?;
                ensure!(f0 == &**f, "first premise must type the function");
                let (b, body) = quant(fty, self.sys.elim_flavor(), "function type")?;
                let (l, r) = sub_premise(d, 1, theta)?;
                ensure!(l == arg && *r == b, "argument must be below the bound");
                ensure!(*ty == body.open(0, arg), "conclusion must instantiate the body");
            }
        }
        Ok(())
    }

    fn eq_rule(&self, r: EqRule, d: &Derivation) -> Step {
        let (theta, lhs, rhs, ty) = eq_parts(d).ok_or_else(|| format!("{} concludes an equality judgment", d.rule))?;
        match r {
            EqRule::Top => {
                Self::premises(d, 2)?;
                ensure!(ty.is_top(), "eq-top concludes at type Top");
                let (a, at) = ty_premise(d, 0, theta)?;
                let (b, bt) = ty_premise(d, 1, theta)?;
                ensure!(
                    a == lhs && b == rhs && at.is_top() && bt.is_top(),
                    "premises must type both sides at Top"
                );
            }
            EqRule::Refl => {
                Self::premises(d, 1)?;
                ensure!(lhs == rhs, "eq-refl needs identical sides");
                let (a, at) = ty_premise(d, 0, theta)?;
                ensure!(a == lhs && at == ty, "premise must type the term");
            }
            EqRule::Trans => {
                Self::premises(d, 2)?;
                let (a, m0, t0) = eq_premise(d, 0, theta)?;
                let (m1, b, t1) = eq_premise(d, 1, theta)?;
                ensure!(
                    a == lhs && b == rhs && m0 == m1,
                    "premises must chain from left to right"
                );
                ensure!(t0 == ty && t1 == ty, "premises must be at the conclusion type");
            }
            EqRule::Sym => {
                Self::premises(d, 1)?;
                let (a, b, t0) = eq_premise(d, 0, theta)?;
                ensure!(a == rhs && b == lhs && t0 == ty, "premise must be the swapped equation");
            }
            EqRule::Beta1 => {
                Self::premises(d, 2)?;
                let Term::App(f, s) = lhs else {
                    return Err("beta1 needs an application on the left".into());
                };
                let Term::Lam(lam) = &**f else {
                    return Err("beta1 needs a term abstraction in function position".into());
                };
                ensure!(*rhs == lam.apply(s), "right side must be the contractum");
                let (pctx, pt, pty) = ty_parts(&d.premises[0]).ok_or("premise 0 must be a typing judgment")?;
                let (y, a) = term_extension(theta, pctx, 0)?;
                fresh_in_terms(&y, &[lhs])?;
                ensure!(a == lam.annot, "premise 0 binds the wrong type");
                ensure!(*pt == lam.open_with(&y) && pty == ty, "premise 0 must type the body");
                let (s0, st) = ty_premise(d, 1, theta)?;
                ensure!(s0 == &**s && *st == lam.annot, "premise 1 must type the argument");
            }
            EqRule::Eta1 => {
                Self::premises(d, 1)?;
                let Term::Lam(lam) = lhs else {
                    return Err("eta1 needs a term abstraction on the left".into());
                };
                let y = self.fresh_for(theta, &[lhs, rhs]);
                ensure!(
                    lam.open_with(&y) == Term::app(rhs.clone(), Term::Var(y.clone())),
                    "left side must be the eta-expansion of the right side"
                );
                let Type::Arrow(dom, _) = ty else {
                    return Err("eta1 concludes at an arrow type".into());
                };
                ensure!(**dom == lam.annot, "annotation must be the domain");
                let (t0, tt) = ty_premise(d, 0, theta)?;
                ensure!(t0 == rhs && tt == ty, "premise must type the right side");
            }
            EqRule::Beta2 => {
                Self::premises(d, 2)?;
                let Term::TApp(f, arg) = lhs else {
                    return Err("beta2 needs a type application on the left".into());
                };
                let Term::TLam(lam) = &**f else {
                    return Err("beta2 needs a type abstraction in function position".into());
                };
                ensure!(*rhs == lam.instantiate(arg), "right side must be the contractum");
                let (pctx, pt, pty) = ty_parts(&d.premises[0]).ok_or("premise 0 must be a typing judgment")?;
                let (y, b) = type_extension(theta, pctx, 0)?;
                fresh_in_terms(&y, &[lhs, rhs])?;
                fresh_in_types(&y, &[ty])?;
                ensure!(b == lam.bound, "premise 0 binds the wrong bound");
                ensure!(*pt == lam.open_with(&y), "premise 0 must type the body");
                ensure!(
                    *ty == pty.subst(&y, arg),
                    "conclusion type must instantiate the body type"
                );
                let (l, r) = sub_premise(d, 1, theta)?;
                ensure!(l == arg && *r == lam.bound, "premise 1 must bound the argument");
            }
            EqRule::Eta2 => {
                Self::premises(d, 1)?;
                let Term::TLam(lam) = lhs else {
                    return Err("eta2 needs a type abstraction on the left".into());
                };
                let y = self.fresh_for(theta, &[lhs, rhs]);
                ensure!(
                    lam.open_with(&y) == Term::tapp(rhs.clone(), Type::Var(y.clone())) && !ty.mentions(&y),
                    "left side must be the eta-expansion of the right side"
                );
                let (b, _) = quant(ty, self.sys.elim_flavor(), "conclusion type")?;
                ensure!(b == lam.bound, "bound must be the abstraction's bound");
                let (t0, tt) = ty_premise(d, 0, theta)?;
                ensure!(t0 == rhs && tt == ty, "premise must type the right side");
            }
            EqRule::Abs1 => {
                Self::premises(d, 1)?;
                let (Term::Lam(l), Term::Lam(r)) = (lhs, rhs) else {
                    return Err("abs1 relates two term abstractions".into());
                };
                ensure!(l.annot == r.annot, "annotations must agree");
                let Type::Arrow(dom, cod) = ty else {
                    return Err("abs1 concludes at an arrow type".into());
                };
                ensure!(**dom == l.annot, "domain must be the annotation");
                let (pctx, pl, pr, pty) = eq_parts(&d.premises[0]).ok_or("premise must be an equality judgment")?;
                let (y, a) = term_extension(theta, pctx, 0)?;
                fresh_in_terms(&y, &[lhs, rhs])?;
                ensure!(a == l.annot, "premise binds the wrong type");
                ensure!(
                    *pl == l.open_with(&y) && *pr == r.open_with(&y) && pty == &**cod,
                    "premise must equate the bodies at the codomain"
                );
            }
            EqRule::Abs2 => {
                Self::premises(d, 1)?;
                let (Term::TLam(l), Term::TLam(r)) = (lhs, rhs) else {
                    return Err("abs2 relates two type abstractions".into());
                };
                ensure!(l.bound == r.bound, "bounds must agree");
                let (b, body) = quant(ty, self.sys.intro_flavor(), "conclusion type")?;
                ensure!(b == l.bound, "quantifier bound must be the abstraction's bound");
                let (pctx, pl, pr, pty) = eq_parts(&d.premises[0]).ok_or("premise must be an equality judgment")?;
                let (y, pb) = type_extension(theta, pctx, 0)?;
                fresh_in_terms(&y, &[lhs, rhs])?;
                fresh_in_types(&y, &[ty])?;
                ensure!(pb == l.bound, "premise binds the wrong bound");
                ensure!(
                    *pl == l.open_with(&y) && *pr == r.open_with(&y) && *pty == open(&body, &y),
                    "premise must equate the bodies"
                );
            }
            EqRule::App1 => {
                Self::premises(d, 2)?;
                let (Term::App(f, a), Term::App(g, b)) = (lhs, rhs) else {
                    return Err("app1 relates two applications".into());
                };
                let (f0, g0, fty) = eq_premise(d, 0, theta)?;
                let (a0, b0, aty) = eq_premise(d, 1, theta)?;
                ensure!(f0 == &**f && g0 == &**g, "premise 0 must equate the functions");
                ensure!(a0 == &**a && b0 == &**b, "premise 1 must equate the arguments");
                let Type::Arrow(dom, cod) = fty else {
                    return Err("functions must be equated at an arrow type".into());
                };
                ensure!(&**dom == aty && &**cod == ty, "types do not line up");
            }
            EqRule::App2 => {
                Self::premises(d, 5)?;
                let (Term::TApp(f, r1), Term::TApp(g, r2)) = (lhs, rhs) else {
                    return Err("app2 relates two type applications".into());
                };
                let (f0, g0, fty) = eq_premise(d, 0, theta)?;
                ensure!(f0 == &**f && g0 == &**g, "premise 0 must equate the functions");
                let (b, body) = quant(fty, self.sys.elim_flavor(), "function type")?;
                let (l, r) = sub_premise(d, 1, theta)?;
                ensure!(l == r1 && *r == b, "premise 1 must bound the left argument");
                let (l, r) = sub_premise(d, 2, theta)?;
                ensure!(l == r2 && *r == b, "premise 2 must bound the right argument");
                let (l, r) = sub_premise(d, 3, theta)?;
                ensure!(
                    *l == body.open(0, r1) && r == ty,
                    "premise 3 must widen the left instance"
                );
                let (l, r) = sub_premise(d, 4, theta)?;
                ensure!(
                    *l == body.open(0, r2) && r == ty,
                    "premise 4 must widen the right instance"
                );
            }
        }
        Ok(())
    }

    fn fresh_for(&self, theta: &Context, terms: &[&Term]) -> Name {
        let mut taken: std::collections::BTreeSet<Name> = theta.entries().iter().map(|e| e.name().clone()).collect();
        for t in terms {
            taken.extend(t.free_term_vars());
            taken.extend(t.free_type_vars());
        }
        crate::syntax::fresh_name(&Name::from("v"), |n| taken.contains(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_type;

    fn x_ctx() -> Context {
        Context::new().with_type_var("X", Type::Top)
    }

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    /// X<:Top |- forall_k Z<:X. Z->Z <: forall_t Z<:X. Z->X by ForallLoc.
    fn loc_derivation() -> Derivation {
        let g = x_ctx();
        let gz = g.clone().with_type_var("Z", Type::var("X"));
        let z = Type::var("Z");
        let x = Type::var("X");
        let refl_x = Derivation::sub(SubRule::Refl, &g, x.clone(), x.clone(), vec![]);
        let dom = Derivation::sub(SubRule::Refl, &gz, z.clone(), z.clone(), vec![]);
        let cod = Derivation::sub(SubRule::Var, &gz, z.clone(), x.clone(), vec![]);
        let body = Derivation::sub(
            SubRule::Arrow,
            &gz,
            Type::arrow(z.clone(), z.clone()),
            Type::arrow(z.clone(), x.clone()),
            vec![dom, cod],
        );
        Derivation::sub(
            SubRule::ForallLoc,
            &g,
            ty("forall_k Z <: X . Z -> Z"),
            ty("forall_t Z <: X . Z -> X"),
            vec![refl_x, body],
        )
    }

    #[test]
    fn loc_derivation_checks_in_kt_only() {
        let d = loc_derivation();
        assert_eq!(check_subtype_derivation(SystemId::Kt, &d), Ok(()));
        let e = check_subtype_derivation(SystemId::Kernel, &d).unwrap_err();
        assert!(matches!(
            e.kind,
            CheckErrorKind::WrongSystem(_) | CheckErrorKind::IllFormed(_)
        ));
    }

    #[test]
    fn wrong_right_side_is_a_mismatch() {
        let mut d = loc_derivation();
        if let Judgment::Subtype { rhs, .. } = &mut d.conclusion {
            *rhs = ty("forall_k Z <: X . Z -> X");
        }
        let e = check_subtype_derivation(SystemId::Kt, &d).unwrap_err();
        assert!(matches!(e.kind, CheckErrorKind::RuleMismatch(_)));
        assert!(e.path.is_empty());
    }

    #[test]
    fn meet_left_axiom() {
        let g = Context::new()
            .with_type_var("S", Type::Top)
            .with_type_var("T", Type::Top);
        let d = Derivation::sub(
            SubRule::MeetL,
            &g,
            Type::meet(Type::var("S"), Type::var("T")),
            Type::var("S"),
            vec![],
        );
        assert_eq!(check_subtype_derivation(SystemId::Fwedge, &d), Ok(()));
        assert!(check_subtype_derivation(SystemId::Kt, &d).is_err());
    }

    #[test]
    fn binder_names_must_be_fresh() {
        let g = x_ctx();
        // X <: Top |- forall_k Z<:Top. Z <: forall_k Z<:Top. Z, premise rebinding X
        let gx = g.clone().with_type_var("X", Type::Top);
        let body = Derivation::sub(SubRule::Refl, &gx, Type::var("X"), Type::var("X"), vec![]);
        let d = Derivation::sub(
            SubRule::ForallFun,
            &g,
            ty("forall_k Z . Z"),
            ty("forall_k Z . Z"),
            vec![body],
        );
        assert!(check_subtype_derivation(SystemId::Kt, &d).is_err());
    }

    #[test]
    fn var_axiom_typing() {
        let g = Context::new()
            .with_term_var("x", Type::Top)
            .with_term_var("y", Type::Top);
        let d = Derivation::typing(TyRule::Var, &g, Term::var("x"), Type::Top, vec![]);
        assert_eq!(check_typing_derivation(SystemId::Kt, &d), Ok(()));
    }

    #[test]
    fn beta1_instance() {
        let g = Context::new();
        let lhs = Term::app(Term::lam("x", Type::Top, Term::var("x")), Term::Top);
        let gx = g.clone().with_term_var("x", Type::Top);
        let body = Derivation::typing(TyRule::Var, &gx, Term::var("x"), Type::Top, vec![]);
        let arg = Derivation::typing(TyRule::Top, &g, Term::Top, Type::Top, vec![]);
        let d = Derivation::new(
            RuleId::Eq(EqRule::Beta1),
            Judgment::equality(&g, lhs.clone(), Term::Top, Type::Top),
            vec![body, arg],
        );
        assert_eq!(check_equality_derivation(SystemId::Kt, &d), Ok(()));
        let sym = Derivation::new(
            RuleId::Eq(EqRule::Sym),
            Judgment::equality(&g, lhs, Term::Top, Type::Top),
            vec![d],
        );
        assert!(check_equality_derivation(SystemId::Kt, &sym).is_err());
    }
}
