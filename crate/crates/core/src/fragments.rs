//! Uniformly decorated fragments: classification, elaboration into their own
//! rule systems, and exhaustive enumeration of small types.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::algo::{algo_subtype_with, expose, expose_derivation, minimal_type, typecheck_in, AlgoOptions, MinOutcome};
use crate::deriv::{Derivation, TyRule};
use crate::syntax::{fresh_name, Context, Flavor, Hint, Name, Quant, Term, Type};
use crate::system::{RuleSystem, SubRule, SystemId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct FragmentFlags {
    pub is_kernel: bool,
    pub is_ftop: bool,
    pub is_minimal_for_ftop: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    Kernel,
    Ftop,
    MinimalForFtop,
}

impl Fragment {
    pub fn as_str(self) -> &'static str {
        match self {
            Fragment::Kernel => "kernel",
            Fragment::Ftop => "ftop",
            Fragment::MinimalForFtop => "minimal-ftop",
        }
    }

    pub fn holds(self, flags: FragmentFlags) -> bool {
        match self {
            Fragment::Kernel => flags.is_kernel,
            Fragment::Ftop => flags.is_ftop,
            Fragment::MinimalForFtop => flags.is_minimal_for_ftop,
        }
    }
}

impl std::str::FromStr for Fragment {
    type Err = String;

    fn from_str(s: &str) -> Result<Fragment, String> {
        match s {
            "kernel" => Ok(Fragment::Kernel),
            "ftop" => Ok(Fragment::Ftop),
            "minimal-ftop" | "minimal" => Ok(Fragment::MinimalForFtop),
            other => Err(format!(
                "unknown fragment `{other}` (expected kernel, ftop or minimal-ftop)"
            )),
        }
    }
}

fn only(ty: &Type, flavor: Flavor) -> bool {
    crate::wf::uniformly(ty, flavor)
}

pub fn is_kernel_type(ty: &Type) -> bool {
    only(ty, Flavor::Kernel)
}

pub fn is_ftop_type(ty: &Type) -> bool {
    only(ty, Flavor::TopStyle)
}

/// `T ::= S | forall_k (X<:S).T | S -> T` with `S` an ftop type.
pub fn is_minimal_for_ftop(ty: &Type) -> bool {
    if is_ftop_type(ty) {
        return true;
    }
    match ty {
        Type::Forall(q) => q.flavor == Flavor::Kernel && is_ftop_type(&q.bound) && is_minimal_for_ftop(&q.body),
        Type::Arrow(a, b) => is_ftop_type(a) && is_minimal_for_ftop(b),
        _ => false,
    }
}

pub fn classify_type(ty: &Type) -> FragmentFlags {
    FragmentFlags {
        is_kernel: is_kernel_type(ty),
        is_ftop: is_ftop_type(ty),
        is_minimal_for_ftop: is_minimal_for_ftop(ty),
    }
}

/// Flags that hold for every annotation and type argument of `t`.
pub fn classify_term(t: &Term) -> FragmentFlags {
    let mut flags = FragmentFlags {
        is_kernel: true,
        is_ftop: true,
        is_minimal_for_ftop: true,
    };
    t.for_each_annotation(&mut |ty| {
        let f = classify_type(ty);
        flags.is_kernel &= f.is_kernel;
        flags.is_ftop &= f.is_ftop;
        flags.is_minimal_for_ftop &= f.is_minimal_for_ftop;
    });
    flags
}

pub fn classify_context(ctx: &Context) -> FragmentFlags {
    let mut flags = FragmentFlags {
        is_kernel: true,
        is_ftop: true,
        is_minimal_for_ftop: true,
    };
    for e in ctx.entries() {
        let f = classify_type(e.ty());
        flags.is_kernel &= f.is_kernel;
        flags.is_ftop &= f.is_ftop;
        flags.is_minimal_for_ftop &= f.is_minimal_for_ftop;
    }
    flags
}

// ---------------------------------------------------------- elaboration

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ElabError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not typable in {system}: {reason}")]
    NotTypable { system: SystemId, reason: String },
}

fn pre(cond: bool, which: &str) -> Result<(), ElabError> {
    if cond {
        Ok(())
    } else {
        Err(ElabError::PreconditionViolated(which.to_string()))
    }
}

/// An ftop typing derivation of `ctx |- t : ty` for a beta-normal ftop term
/// typable at the ftop type `ty`, built by induction on `t`.
pub fn elaborate_ftop_typing(ctx: &Context, t: &Term, ty: &Type) -> Result<Derivation, ElabError> {
    pre(classify_context(ctx).is_ftop, "context is not an ftop context")?;
    pre(classify_term(t).is_ftop, "term is not an ftop term")?;
    pre(is_ftop_type(ty), "target is not an ftop type")?;
    pre(t.is_beta_normal(), "term is not beta-normal")?;
    typecheck_in(SystemId::Kt, ctx, t, ty, &AlgoOptions::quiet())
        .map_err(|e| ElabError::PreconditionViolated(format!("typecheck rejects the typing: {e}")))?;
    FtopElab.at(ctx, t, ty)
}

struct FtopElab;

fn internal(msg: impl fmt::Display) -> ElabError {
    ElabError::NotTypable {
        system: SystemId::Ftop,
        reason: msg.to_string(),
    }
}

impl FtopElab {
    fn minimal(&self, ctx: &Context, t: &Term) -> Result<Type, ElabError> {
        match minimal_type(ctx, t).outcome {
            MinOutcome::Typed(s) => Ok(s),
            MinOutcome::Untypable(u) => Err(internal(u)),
        }
    }

    /// `ctx |- s <: t` in ftop; `None` when the types coincide.
    fn widen(&self, ctx: &Context, s: &Type, t: &Type) -> Result<Option<Derivation>, ElabError> {
        if s == t {
            return Ok(None);
        }
        let r = algo_subtype_with(ctx, s, t, &AlgoOptions::quiet());
        match r.derivation() {
            Some(d) => Ok(Some(d)),
            None => Err(internal(format!("{s} is not a subtype of {t}"))),
        }
    }

    fn subsume(&self, ctx: &Context, d: Derivation, s: &Type, t: &Type) -> Result<Derivation, ElabError> {
        Ok(match self.widen(ctx, s, t)? {
            Some(w) => d.subsume(w),
            None => d,
        })
    }

    fn at(&self, ctx: &Context, t: &Term, ty: &Type) -> Result<Derivation, ElabError> {
        let s = self.minimal(ctx, t)?;
        if ty.is_top() && !s.is_top() {
            // type t at an ftop supertype of its minimal type, then forget it
            let s_top = ftop_cover(&s);
            let d = self.at(ctx, t, &s_top)?;
            return self.subsume(ctx, d, &s_top, ty);
        }
        match t {
            Term::Top => Ok(Derivation::typing(TyRule::Top, ctx, Term::Top, Type::Top, vec![])),
            Term::Var(_) => {
                let d = Derivation::typing(TyRule::Var, ctx, t.clone(), s.clone(), vec![]);
                self.subsume(ctx, d, &s, ty)
            }
            Term::App(f, a) => {
                let fs = self.minimal(ctx, f)?;
                let exposed = expose(ctx, &fs);
                let Type::Arrow(dom, cod) = &exposed else {
                    return Err(internal("function position does not expose to an arrow"));
                };
                let fd = self.at(ctx, f, &exposed)?;
                let ad = self.at(ctx, a, dom)?;
                let d = Derivation::typing(TyRule::ArrowE, ctx, t.clone(), (**cod).clone(), vec![fd, ad]);
                self.subsume(ctx, d, cod, ty)
            }
            Term::TApp(f, r) => {
                let fs = self.minimal(ctx, f)?;
                let exposed = expose(ctx, &fs);
                let q = match &exposed {
                    Type::Forall(q) if q.flavor == Flavor::TopStyle => q,
                    _ => return Err(internal("type application on a non-forall_t type")),
                };
                let fd = self.at(ctx, f, &fs)?;
                let fd = match expose_derivation(ctx, &fs) {
                    Some(e) => fd.subsume(e),
                    None => fd,
                };
                let bd = self
                    .widen(ctx, r, &q.bound)?
                    .unwrap_or_else(|| Derivation::sub(SubRule::Refl, ctx, r.clone(), r.clone(), vec![]));
                let inst = q.instantiate(r);
                let d = Derivation::typing(TyRule::ForallE, ctx, t.clone(), inst.clone(), vec![fd, bd]);
                self.subsume(ctx, d, &inst, ty)
            }
            Term::Lam(lam) => {
                let Type::Arrow(_, cod) = ty else {
                    return Err(internal("abstraction checked against a non-arrow type"));
                };
                let x = fresh_for(ctx, lam.hint.name(), t, ty);
                let inner = ctx.clone().with_term_var(x.clone(), lam.annot.clone());
                let bd = self.at(&inner, &lam.open_with(&x), cod)?;
                let own = Type::arrow(lam.annot.clone(), (**cod).clone());
                let d = Derivation::typing(TyRule::ArrowI, ctx, t.clone(), own.clone(), vec![bd]);
                self.subsume(ctx, d, &own, ty)
            }
            Term::TLam(lam) => {
                let q = match ty {
                    Type::Forall(q) if q.flavor == Flavor::TopStyle => q,
                    _ => return Err(internal("type abstraction checked against a non-forall_t type")),
                };
                let x = fresh_for(ctx, lam.hint.name(), t, ty);
                let inner = ctx.clone().with_type_var(x.clone(), lam.bound.clone());
                let body_ty = q.open_with(&x);
                let bd = self.at(&inner, &lam.open_with(&x), &body_ty)?;
                let own = Type::forall(Flavor::TopStyle, x, lam.bound.clone(), body_ty);
                let d = Derivation::typing(TyRule::ForallI, ctx, t.clone(), own.clone(), vec![bd]);
                self.subsume(ctx, d, &own, ty)
            }
            Term::Bound(_) => Err(internal("dangling term index")),
        }
    }
}

/// The ftop type obtained by redecorating every top-level forall_k of a
/// minimal-for-ftop type; a supertype of it.
fn ftop_cover(ty: &Type) -> Type {
    match ty {
        Type::Forall(q) if q.flavor == Flavor::Kernel => Type::Forall(Box::new(Quant {
            flavor: Flavor::TopStyle,
            hint: q.hint.clone(),
            bound: q.bound.clone(),
            body: ftop_cover(&q.body),
        })),
        Type::Arrow(a, b) => Type::arrow((**a).clone(), ftop_cover(b)),
        other => other.clone(),
    }
}

fn fresh_for(ctx: &Context, hint: &Name, t: &Term, ty: &Type) -> Name {
    let tv = t.free_type_vars();
    let mv = t.free_term_vars();
    fresh_name(hint, |n| {
        ctx.contains(n) || tv.contains(n) || mv.contains(n) || ty.mentions(n)
    })
}

/// A kernel typing derivation obtained by replaying minimal typing and the
/// subtyping algorithm with kernel rules only.
pub fn elaborate_kernel(ctx: &Context, t: &Term, ty: &Type) -> Result<Derivation, ElabError> {
    pre(classify_context(ctx).is_kernel, "context is not a kernel context")?;
    pre(classify_term(t).is_kernel, "term is not a kernel term")?;
    pre(is_kernel_type(ty), "target is not a kernel type")?;
    typecheck_in(SystemId::Kernel, ctx, t, ty, &AlgoOptions::quiet())
        .map(|ok| ok.derivation)
        .map_err(|e| ElabError::NotTypable {
            system: SystemId::Kernel,
            reason: e.to_string(),
        })
}

// ---------------------------------------------------------- enumeration

const HINTS: [&str; 6] = ["Y", "Z", "W", "V", "U", "R"];

/// Enumerates every type of a system over the type variables of a context,
/// by increasing size. Sizes count nodes, with an omitted (`Top`) bound
/// counting zero.
///
/// Within one size the order is: `Top`, context variables, bound indices,
/// arrows (by domain size, then domain, then codomain), quantifiers (by
/// flavor, then bound with `Top` first, then body), then meets.
pub struct TypeEnumerator {
    vars: Vec<Name>,
    flavors: Vec<Flavor>,
    meets: bool,
    bounded: bool,
    memo: HashMap<(usize, u32), Rc<Vec<Type>>>,
}

impl TypeEnumerator {
    pub fn new(ctx: &Context, sys: &dyn RuleSystem) -> TypeEnumerator {
        TypeEnumerator {
            vars: ctx.type_vars().map(|(n, _)| n.clone()).collect(),
            flavors: sys.flavors().to_vec(),
            meets: sys.allows_meet(),
            bounded: !sys.unbounded_quantifiers(),
            memo: HashMap::new(),
        }
    }

    /// Types of exactly `size` under `depth` enclosing binders.
    pub fn exactly(&mut self, size: usize, depth: u32) -> Rc<Vec<Type>> {
        if let Some(v) = self.memo.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.push(Type::Top);
            out.extend(self.vars.iter().map(|n| Type::Var(n.clone())));
            out.extend((0..depth).map(Type::Bound));
        }
        if size >= 3 {
            for a in 1..=size - 2 {
                let left = self.exactly(a, depth);
                let right = self.exactly(size - 1 - a, depth);
                for x in left.iter() {
                    for y in right.iter() {
                        out.push(Type::arrow(x.clone(), y.clone()));
                    }
                }
            }
        }
        if size >= 2 {
            let hint = Hint(Name::from(HINTS[depth as usize % HINTS.len()]));
            for flavor in self.flavors.clone() {
                let mut bounds: Vec<(Type, usize)> = vec![(Type::Top, 0)];
                if self.bounded {
                    for k in 1..=size.saturating_sub(2) {
                        for b in self.exactly(k, depth).iter().filter(|b| !b.is_top()) {
                            bounds.push((b.clone(), k));
                        }
                    }
                }
                for (bound, k) in bounds {
                    let bodies = self.exactly(size - 1 - k, depth + 1);
                    for body in bodies.iter() {
                        out.push(Type::Forall(Box::new(Quant {
                            flavor,
                            hint: hint.clone(),
                            bound: bound.clone(),
                            body: body.clone(),
                        })));
                    }
                }
            }
        }
        if size >= 3 && self.meets {
            for a in 1..=size - 2 {
                let left = self.exactly(a, depth);
                let right = self.exactly(size - 1 - a, depth);
                for x in left.iter() {
                    for y in right.iter() {
                        out.push(Type::meet(x.clone(), y.clone()));
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((size, depth), out.clone());
        out
    }

    /// Closed types of size `1..=max_size` in order.
    pub fn up_to(&mut self, max_size: usize) -> Vec<Type> {
        (1..=max_size)
            .flat_map(|n| self.exactly(n, 0).as_ref().clone())
            .collect()
    }
}

/// Every well-formed kt type over `ctx` up to `max_size`, optionally
/// restricted to a fragment.
pub fn enumerate_types(ctx: &Context, max_size: usize, fragment: Option<Fragment>) -> Vec<Type> {
    match fragment {
        None => TypeEnumerator::new(ctx, SystemId::Kt.rules()).up_to(max_size),
        Some(Fragment::Kernel) => TypeEnumerator::new(ctx, SystemId::Kernel.rules()).up_to(max_size),
        Some(Fragment::Ftop) => TypeEnumerator::new(ctx, SystemId::Ftop.rules()).up_to(max_size),
        Some(Fragment::MinimalForFtop) => TypeEnumerator::new(ctx, SystemId::Kt.rules())
            .up_to(max_size)
            .into_iter()
            .filter(is_minimal_for_ftop)
            .collect(),
    }
}

/// Every well-formed type of `system` over `ctx` up to `max_size`.
pub fn enumerate_types_in(system: SystemId, ctx: &Context, max_size: usize) -> Vec<Type> {
    TypeEnumerator::new(ctx, system.rules()).up_to(max_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_typing_derivation;
    use crate::surface::{parse_term, parse_type};
    use crate::wf::wf_type;
    use std::collections::HashSet;

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn x_ctx() -> Context {
        Context::new().with_type_var("X", Type::Top)
    }

    #[test]
    fn classification_examples() {
        let f = classify_type(&ty("forall_t Z <: X . Z -> Z"));
        assert_eq!((f.is_kernel, f.is_ftop, f.is_minimal_for_ftop), (false, true, true));
        let f = classify_type(&ty("forall_k Z <: X . X -> X"));
        assert_eq!((f.is_kernel, f.is_ftop, f.is_minimal_for_ftop), (true, false, true));
        let f = classify_type(&ty("forall_k Z <: (forall_k Y . Y) . Top"));
        assert_eq!((f.is_kernel, f.is_ftop, f.is_minimal_for_ftop), (true, false, false));
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_types(&Context::new(), 1, None), vec![Type::Top]);
        let two = enumerate_types(&x_ctx(), 2, None);
        assert_eq!(
            two,
            vec![
                Type::Top,
                Type::var("X"),
                ty("forall_k Y . Top"),
                ty("forall_k Y . X"),
                ty("forall_k Y . Y"),
                ty("forall_t Y . Top"),
                ty("forall_t Y . X"),
                ty("forall_t Y . Y"),
            ]
        );
    }

    #[test]
    fn enumeration_is_well_formed_and_duplicate_free() {
        let ctx = x_ctx().with_type_var("W", Type::var("X"));
        let all = enumerate_types(&ctx, 5, None);
        let set: HashSet<&Type> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        for t in &all {
            assert_eq!(wf_type(&ctx, t, SystemId::Kt.rules()), Ok(()), "{t}");
        }
    }

    #[test]
    fn footnote_type_is_enumerated() {
        let all = enumerate_types(&x_ctx(), 8, Some(Fragment::Ftop));
        assert!(all.contains(&ty("forall_t Y . forall_t Z <: X . Y -> Y")));
    }

    #[test]
    fn ghelli_elaborates_into_ftop() {
        let t = parse_term("tfun (Z <: X) => fun (y : Z) => y").unwrap();
        for target in ["forall_t Z <: X . Z -> Z", "forall_t Z <: X . Z -> X", "Top"] {
            let d = elaborate_ftop_typing(&x_ctx(), &t, &ty(target)).unwrap();
            assert_eq!(check_typing_derivation(SystemId::Ftop, &d), Ok(()), "{target}");
        }
    }

    #[test]
    fn u_is_rejected_but_its_normal_form_elaborates() {
        let u = parse_term("(tfun (Y <: Top) => tfun (Z <: X) => fun (y : Y) => y) [X]").unwrap();
        let target = ty("forall_t Z <: X . Z -> X");
        assert!(matches!(
            elaborate_ftop_typing(&x_ctx(), &u, &target),
            Err(ElabError::PreconditionViolated(_))
        ));
        let nf = u.beta_normalize(100).unwrap();
        let d = elaborate_ftop_typing(&x_ctx(), &nf, &target).unwrap();
        assert_eq!(check_typing_derivation(SystemId::Ftop, &d), Ok(()));
    }

    #[test]
    fn kernel_elaboration() {
        let id = parse_term("tfun (X <: Top) => fun (x : X) => x").unwrap();
        let d = elaborate_kernel(&Context::new(), &id, &ty("forall_k X . X -> X")).unwrap();
        assert_eq!(check_typing_derivation(SystemId::Kernel, &d), Ok(()));
        let g = parse_term("tfun (Z <: X) => fun (y : Z) => y").unwrap();
        let d = elaborate_kernel(&x_ctx(), &g, &ty("forall_k Z <: X . Z -> Z")).unwrap();
        assert_eq!(check_typing_derivation(SystemId::Kernel, &d), Ok(()));
        assert!(matches!(
            elaborate_kernel(&x_ctx(), &g, &ty("forall_t Z <: X . Z -> Z")),
            Err(ElabError::PreconditionViolated(_))
        ));
    }
}
