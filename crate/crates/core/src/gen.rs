//! Seeded random generators for types, subtyping pairs and well-typed terms.
//! Every generated judgment comes with the declarative derivation it was
//! built from.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::deriv::{Derivation, TyRule};
use crate::syntax::{Context, Flavor, Name, Term, Type};
use crate::system::{RuleSystem, SubRule, SystemId};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generation knobs for one system.
#[derive(Clone, Copy, Debug)]
pub struct Gen {
    pub system: SystemId,
    /// Rough cap on the size of generated types.
    pub type_size: usize,
    /// Rough cap on the number of rule applications per derivation.
    pub budget: u32,
}

const BINDERS: [&str; 5] = ["Y", "Z", "V", "U", "R"];
const TERM_BINDERS: [&str; 4] = ["x", "y", "z", "w"];

impl Gen {
    pub fn new(system: SystemId) -> Gen {
        Gen {
            system,
            type_size: 6,
            budget: 6,
        }
    }

    fn sys(&self) -> &'static dyn RuleSystem {
        self.system.rules()
    }

    fn allows(&self, r: SubRule) -> bool {
        self.sys().allows_rule(r)
    }

    fn binder(rng: &mut GenRng, ctx: &Context) -> Name {
        ctx.fresh(&Name::from(*BINDERS.choose(rng).unwrap()))
    }

    /// A random well-formed type of roughly `size` nodes over `ctx`.
    pub fn ty(&self, rng: &mut GenRng, ctx: &Context, size: usize) -> Type {
        let vars: Vec<Name> = ctx.type_vars().map(|(n, _)| n.clone()).collect();
        if size <= 1 {
            let k = rng.gen_range(0..=vars.len());
            return if k == vars.len() {
                Type::Top
            } else {
                Type::Var(vars[k].clone())
            };
        }
        let mut kinds = vec![0u8, 1];
        if self.sys().allows_meet() && size >= 3 {
            kinds.push(2);
        }
        match *kinds.choose(rng).unwrap() {
            0 if size >= 3 => {
                let left = rng.gen_range(1..size - 1);
                Type::arrow(self.ty(rng, ctx, left), self.ty(rng, ctx, size - 1 - left))
            }
            2 => {
                let left = rng.gen_range(1..size - 1);
                Type::meet(self.ty(rng, ctx, left), self.ty(rng, ctx, size - 1 - left))
            }
            _ => {
                let flavor = *self.sys().flavors().choose(rng).unwrap();
                let bsize = if self.sys().unbounded_quantifiers() || rng.gen_bool(0.5) {
                    0
                } else {
                    rng.gen_range(0..size - 1)
                };
                let bound = if bsize == 0 {
                    Type::Top
                } else {
                    self.ty(rng, ctx, bsize)
                };
                let x = Self::binder(rng, ctx);
                let inner = ctx.clone().with_type_var(x.clone(), bound.clone());
                let body = self.ty(rng, &inner, (size - 1 - bsize).max(1));
                Type::forall(flavor, x, bound, body)
            }
        }
    }

    /// A random context with `types` type variables and `terms` term
    /// variables.
    pub fn context(&self, rng: &mut GenRng, types: usize, terms: usize) -> Context {
        let mut ctx = Context::new();
        for i in 0..types {
            let bound = if self.sys().unbounded_quantifiers() || rng.gen_bool(0.4) {
                Type::Top
            } else {
                {
                    let n = rng.gen_range(1..=3);
                    self.ty(rng, &ctx, n)
                }
            };
            ctx.push_type_var(ctx.fresh(&Name::from(["X", "W", "Q"][i % 3])), bound);
        }
        for i in 0..terms {
            let ty = {
                let n = rng.gen_range(1..=4);
                self.ty(rng, &ctx, n)
            };
            ctx.push_term_var(ctx.fresh(&Name::from(["f", "g", "h"][i % 3])), ty);
        }
        ctx
    }

    fn refl(ctx: &Context, s: &Type) -> (Type, Derivation) {
        (
            s.clone(),
            Derivation::sub(SubRule::Refl, ctx, s.clone(), s.clone(), vec![]),
        )
    }

    /// A supertype `T` of `s` with a derivation of `ctx |- s <: T`.
    pub fn sup(&self, rng: &mut GenRng, ctx: &Context, s: &Type, budget: u32) -> (Type, Derivation) {
        if budget == 0 || rng.gen_bool(0.15) {
            return Self::refl(ctx, s);
        }
        let b = budget - 1;
        if rng.gen_bool(0.08) {
            return (
                Type::Top,
                Derivation::sub(SubRule::Top, ctx, s.clone(), Type::Top, vec![]),
            );
        }
        if self.allows(SubRule::Trans) && rng.gen_bool(0.12) {
            let (m, d1) = self.sup(rng, ctx, s, b / 2);
            let (t, d2) = self.sup(rng, ctx, &m, b / 2);
            return (
                t.clone(),
                Derivation::sub(SubRule::Trans, ctx, s.clone(), t, vec![d1, d2]),
            );
        }
        if self.allows(SubRule::MeetIntro) && rng.gen_bool(0.1) {
            let (a, da) = self.sup(rng, ctx, s, b / 2);
            let (c, dc) = self.sup(rng, ctx, s, b / 2);
            let t = Type::meet(a, c);
            return (
                t.clone(),
                Derivation::sub(SubRule::MeetIntro, ctx, s.clone(), t, vec![da, dc]),
            );
        }
        match s {
            Type::Var(x) => {
                let bound = ctx.bound_of(x).cloned().unwrap_or(Type::Top);
                let var = Derivation::sub(SubRule::Var, ctx, s.clone(), bound.clone(), vec![]);
                if rng.gen_bool(0.5) || !self.allows(SubRule::Trans) {
                    (bound, var)
                } else {
                    let (t, d) = self.sup(rng, ctx, &bound, b);
                    (
                        t.clone(),
                        Derivation::sub(SubRule::Trans, ctx, s.clone(), t, vec![var, d]),
                    )
                }
            }
            Type::Arrow(a, c) => {
                let (a2, da) = self.sub(rng, ctx, a, b / 2);
                let (c2, dc) = self.sup(rng, ctx, c, b / 2);
                let t = Type::arrow(a2, c2);
                (
                    t.clone(),
                    Derivation::sub(SubRule::Arrow, ctx, s.clone(), t, vec![da, dc]),
                )
            }
            Type::Meet(a, c) => {
                let (rule, part) = if rng.gen_bool(0.5) {
                    (SubRule::MeetL, a)
                } else {
                    (SubRule::MeetR, c)
                };
                let first = Derivation::sub(rule, ctx, s.clone(), (**part).clone(), vec![]);
                if rng.gen_bool(0.5) {
                    ((**part).clone(), first)
                } else {
                    let (t, d) = self.sup(rng, ctx, part, b);
                    (
                        t.clone(),
                        Derivation::sub(SubRule::Trans, ctx, s.clone(), t, vec![first, d]),
                    )
                }
            }
            Type::Forall(q) => {
                let mut rules = Vec::new();
                match q.flavor {
                    Flavor::Kernel => {
                        rules.push(SubRule::ForallFun);
                        rules.push(SubRule::ForallLoc);
                    }
                    Flavor::TopStyle => rules.push(SubRule::ForallTop),
                    Flavor::Plain => rules.push(SubRule::ForallOrig),
                }
                rules.retain(|&r| self.allows(r));
                let Some(&rule) = rules.choose(rng) else {
                    return Self::refl(ctx, s);
                };
                let (t0, d0) = if rule == SubRule::ForallFun || self.sys().unbounded_quantifiers() {
                    Self::refl(ctx, &q.bound)
                } else {
                    self.sub(rng, ctx, &q.bound, b / 2)
                };
                let body_bound = match rule {
                    SubRule::ForallFun | SubRule::ForallLoc => q.bound.clone(),
                    SubRule::ForallTop => Type::Top,
                    _ => t0.clone(),
                };
                let x = Self::binder(rng, ctx);
                let inner = ctx.clone().with_type_var(x.clone(), body_bound);
                let (t1, d1) = self.sup(rng, &inner, &q.open_with(&x), b / 2);
                let flavor = if rule == SubRule::ForallLoc {
                    Flavor::TopStyle
                } else {
                    q.flavor
                };
                let t = Type::forall(flavor, x, t0, t1);
                let premises = if rule == SubRule::ForallFun {
                    vec![d1]
                } else {
                    vec![d0, d1]
                };
                (t.clone(), Derivation::sub(rule, ctx, s.clone(), t, premises))
            }
            Type::Top | Type::Bound(_) => Self::refl(ctx, s),
        }
    }

    /// A subtype `S` of `t` with a derivation of `ctx |- S <: t`.
    pub fn sub(&self, rng: &mut GenRng, ctx: &Context, t: &Type, budget: u32) -> (Type, Derivation) {
        if budget == 0 || rng.gen_bool(0.15) {
            return Self::refl(ctx, t);
        }
        let b = budget - 1;
        if t.is_top() {
            let s = {
                let n = rng.gen_range(1..=self.type_size.max(1));
                self.ty(rng, ctx, n)
            };
            return (s.clone(), Derivation::sub(SubRule::Top, ctx, s, Type::Top, vec![]));
        }
        let vars: Vec<Name> = ctx
            .type_vars()
            .filter(|(_, b)| *b == t)
            .map(|(n, _)| n.clone())
            .collect();
        if !vars.is_empty() && rng.gen_bool(0.3) {
            let y = Type::Var(vars.choose(rng).unwrap().clone());
            return (y.clone(), Derivation::sub(SubRule::Var, ctx, y, t.clone(), vec![]));
        }
        if self.allows(SubRule::Trans) && rng.gen_bool(0.12) {
            let (m, d2) = self.sub(rng, ctx, t, b / 2);
            let (s, d1) = self.sub(rng, ctx, &m, b / 2);
            return (
                s.clone(),
                Derivation::sub(SubRule::Trans, ctx, s, t.clone(), vec![d1, d2]),
            );
        }
        if self.allows(SubRule::MeetL) && rng.gen_bool(0.12) {
            let r = self.ty(rng, ctx, 2);
            let (s, rule) = if rng.gen_bool(0.5) {
                (Type::meet(t.clone(), r), SubRule::MeetL)
            } else {
                (Type::meet(r, t.clone()), SubRule::MeetR)
            };
            return (s.clone(), Derivation::sub(rule, ctx, s, t.clone(), vec![]));
        }
        match t {
            Type::Arrow(a, c) => {
                let (a2, da) = self.sup(rng, ctx, a, b / 2);
                let (c2, dc) = self.sub(rng, ctx, c, b / 2);
                let s = Type::arrow(a2, c2);
                (
                    s.clone(),
                    Derivation::sub(SubRule::Arrow, ctx, s, t.clone(), vec![da, dc]),
                )
            }
            Type::Meet(a, c) => {
                let (a2, da) = self.sub(rng, ctx, a, b / 2);
                let (c2, dc) = self.sub(rng, ctx, c, b / 2);
                let s = Type::meet(a2.clone(), c2.clone());
                let left = Derivation::sub(
                    SubRule::Trans,
                    ctx,
                    s.clone(),
                    (**a).clone(),
                    vec![Derivation::sub(SubRule::MeetL, ctx, s.clone(), a2, vec![]), da],
                );
                let right = Derivation::sub(
                    SubRule::Trans,
                    ctx,
                    s.clone(),
                    (**c).clone(),
                    vec![Derivation::sub(SubRule::MeetR, ctx, s.clone(), c2, vec![]), dc],
                );
                (
                    s.clone(),
                    Derivation::sub(SubRule::MeetIntro, ctx, s, t.clone(), vec![left, right]),
                )
            }
            Type::Forall(q) => {
                let mut rules = Vec::new();
                match q.flavor {
                    Flavor::Kernel => rules.push(SubRule::ForallFun),
                    Flavor::TopStyle => {
                        rules.push(SubRule::ForallTop);
                        rules.push(SubRule::ForallLoc);
                    }
                    Flavor::Plain => rules.push(SubRule::ForallOrig),
                }
                rules.retain(|&r| self.allows(r));
                let Some(&rule) = rules.choose(rng) else {
                    return Self::refl(ctx, t);
                };
                let (s0, d0) = if rule == SubRule::ForallFun || self.sys().unbounded_quantifiers() {
                    Self::refl(ctx, &q.bound)
                } else {
                    self.sup(rng, ctx, &q.bound, b / 2)
                };
                let body_bound = match rule {
                    SubRule::ForallFun | SubRule::ForallLoc => s0.clone(),
                    SubRule::ForallTop => Type::Top,
                    _ => q.bound.clone(),
                };
                let x = Self::binder(rng, ctx);
                let inner = ctx.clone().with_type_var(x.clone(), body_bound);
                let (s1, d1) = self.sub(rng, &inner, &q.open_with(&x), b / 2);
                let flavor = if rule == SubRule::ForallLoc {
                    Flavor::Kernel
                } else {
                    q.flavor
                };
                let s = Type::forall(flavor, x, s0, s1);
                let premises = if rule == SubRule::ForallFun {
                    vec![d1]
                } else {
                    vec![d0, d1]
                };
                (s.clone(), Derivation::sub(rule, ctx, s, t.clone(), premises))
            }
            _ => Self::refl(ctx, t),
        }
    }

    /// A random pair `S <: T` with its derivation.
    pub fn sub_pair(&self, rng: &mut GenRng, ctx: &Context) -> (Type, Type, Derivation) {
        let base = {
            let n = rng.gen_range(1..=self.type_size);
            self.ty(rng, ctx, n)
        };
        if rng.gen_bool(0.5) {
            let (t, d) = self.sup(rng, ctx, &base, self.budget);
            (base, t, d)
        } else {
            let (s, d) = self.sub(rng, ctx, &base, self.budget);
            (s, base, d)
        }
    }

    /// A well-typed term with a type and a typing derivation.
    pub fn term(&self, rng: &mut GenRng, ctx: &Context, budget: u32) -> (Term, Type, Derivation) {
        let (t, ty, d) = self.term_raw(rng, ctx, budget);
        if budget > 0 && rng.gen_bool(0.2) {
            let (sup, ds) = self.sup(rng, ctx, &ty, 2);
            if sup != ty {
                return (t, sup, d.subsume(ds));
            }
        }
        (t, ty, d)
    }

    fn term_raw(&self, rng: &mut GenRng, ctx: &Context, budget: u32) -> (Term, Type, Derivation) {
        let vars: Vec<(Name, Type)> = ctx.term_vars().map(|(n, t)| (n.clone(), t.clone())).collect();
        let leaf = |rng: &mut GenRng| {
            if !vars.is_empty() && rng.gen_bool(0.7) {
                let (x, ty) = vars.choose(rng).unwrap().clone();
                let t = Term::Var(x);
                (
                    t.clone(),
                    ty.clone(),
                    Derivation::typing(TyRule::Var, ctx, t, ty, vec![]),
                )
            } else {
                (
                    Term::Top,
                    Type::Top,
                    Derivation::typing(TyRule::Top, ctx, Term::Top, Type::Top, vec![]),
                )
            }
        };
        if budget == 0 {
            return leaf(rng);
        }
        let b = budget - 1;
        for _ in 0..4 {
            match rng.gen_range(0..6) {
                0 => return leaf(rng),
                1 => {
                    let annot = {
                        let n = rng.gen_range(1..=3);
                        self.ty(rng, ctx, n)
                    };
                    let x = ctx.fresh(&Name::from(*TERM_BINDERS.choose(rng).unwrap()));
                    let inner = ctx.clone().with_term_var(x.clone(), annot.clone());
                    let (body, bty, bd) = self.term(rng, &inner, b);
                    let t = Term::lam(x, annot.clone(), body);
                    let ty = Type::arrow(annot, bty);
                    return (
                        t.clone(),
                        ty.clone(),
                        Derivation::typing(TyRule::ArrowI, ctx, t, ty, vec![bd]),
                    );
                }
                2 => {
                    let bound = if self.sys().unbounded_quantifiers() || rng.gen_bool(0.5) {
                        Type::Top
                    } else {
                        let n = rng.gen_range(1..=3);
                        self.ty(rng, ctx, n)
                    };
                    let x = Self::binder(rng, ctx);
                    let inner = ctx.clone().with_type_var(x.clone(), bound.clone());
                    let (body, bty, bd) = self.term(rng, &inner, b);
                    let t = Term::tlam(x.clone(), bound.clone(), body);
                    let ty = Type::forall(self.sys().intro_flavor(), x, bound, bty);
                    return (
                        t.clone(),
                        ty.clone(),
                        Derivation::typing(TyRule::ForallI, ctx, t, ty, vec![bd]),
                    );
                }
                3 => {
                    let (f, fty, fd) = self.term(rng, ctx, b / 2);
                    let (exposed, fd) = expose_typing(ctx, fd, &fty);
                    let Type::Arrow(dom, cod) = &exposed else { continue };
                    let Some((arg, ad)) = self.inhabit(rng, ctx, dom, b / 2) else {
                        continue;
                    };
                    let t = Term::app(f, arg);
                    let ty = (**cod).clone();
                    return (
                        t.clone(),
                        ty.clone(),
                        Derivation::typing(TyRule::ArrowE, ctx, t, ty, vec![fd, ad]),
                    );
                }
                4 => {
                    let (f, fty, fd) = self.term(rng, ctx, b / 2);
                    let (exposed, fd) = expose_typing(ctx, fd, &fty);
                    let Type::Forall(q) = &exposed else { continue };
                    let elim = self.sys().elim_flavor();
                    let fd = if q.flavor == elim {
                        fd
                    } else if q.flavor == Flavor::Kernel && elim == Flavor::TopStyle && self.allows(SubRule::ForallLoc)
                    {
                        fd.subsume(loc_lift(ctx, &exposed))
                    } else {
                        continue;
                    };
                    let (r, rd) = self.sub(rng, ctx, &q.bound, 2);
                    let t = Term::tapp(f, r.clone());
                    let ty = q.instantiate(&r);
                    return (
                        t.clone(),
                        ty.clone(),
                        Derivation::typing(TyRule::ForallE, ctx, t, ty, vec![fd, rd]),
                    );
                }
                _ => {
                    // a redex: an abstraction applied on the spot
                    let annot = {
                        let n = rng.gen_range(1..=2);
                        self.ty(rng, ctx, n)
                    };
                    let x = ctx.fresh(&Name::from("x"));
                    let inner = ctx.clone().with_term_var(x.clone(), annot.clone());
                    let (body, bty, bd) = self.term(rng, &inner, b / 2);
                    let lam = Term::lam(x, annot.clone(), body);
                    let lty = Type::arrow(annot.clone(), bty.clone());
                    let ld = Derivation::typing(TyRule::ArrowI, ctx, lam.clone(), lty, vec![bd]);
                    let Some((arg, ad)) = self.inhabit(rng, ctx, &annot, b / 2) else {
                        continue;
                    };
                    let t = Term::app(lam, arg);
                    return (
                        t.clone(),
                        bty.clone(),
                        Derivation::typing(TyRule::ArrowE, ctx, t, bty, vec![ld, ad]),
                    );
                }
            }
        }
        leaf(rng)
    }

    /// Some term of exactly type `ty`, when one is easy to build.
    pub fn inhabit(&self, rng: &mut GenRng, ctx: &Context, ty: &Type, budget: u32) -> Option<(Term, Derivation)> {
        let typed = |t: Term, d: Derivation| Some((t, d));
        if ty.is_top() {
            if budget > 0 && rng.gen_bool(0.5) {
                let (t, tty, d) = self.term(rng, ctx, budget - 1);
                let top = Derivation::sub(SubRule::Top, ctx, tty, Type::Top, vec![]);
                return typed(t, d.subsume(top));
            }
            return typed(
                Term::Top,
                Derivation::typing(TyRule::Top, ctx, Term::Top, Type::Top, vec![]),
            );
        }
        let candidates: Vec<Name> = ctx
            .term_vars()
            .filter(|(_, t)| *t == ty)
            .map(|(n, _)| n.clone())
            .collect();
        if let Some(x) = candidates.choose(rng) {
            let t = Term::Var(x.clone());
            return typed(t.clone(), Derivation::typing(TyRule::Var, ctx, t, ty.clone(), vec![]));
        }
        match ty {
            Type::Arrow(a, c) => {
                let x = ctx.fresh(&Name::from(*TERM_BINDERS.choose(rng).unwrap()));
                let inner = ctx.clone().with_term_var(x.clone(), (**a).clone());
                let (body, bd) = self.inhabit(rng, &inner, c, budget.saturating_sub(1))?;
                let t = Term::lam(x, (**a).clone(), body);
                typed(
                    t.clone(),
                    Derivation::typing(TyRule::ArrowI, ctx, t, ty.clone(), vec![bd]),
                )
            }
            Type::Forall(q) => {
                let intro = self.sys().intro_flavor();
                if q.flavor != intro
                    && !(q.flavor == Flavor::TopStyle && intro == Flavor::Kernel && self.allows(SubRule::ForallLoc))
                {
                    return None;
                }
                let x = Self::binder(rng, ctx);
                let inner = ctx.clone().with_type_var(x.clone(), q.bound.clone());
                let (body, bd) = self.inhabit(rng, &inner, &q.open_with(&x), budget.saturating_sub(1))?;
                let t = Term::tlam(x.clone(), q.bound.clone(), body);
                let own = Type::forall(intro, x.clone(), q.bound.clone(), q.open_with(&x));
                let d = Derivation::typing(TyRule::ForallI, ctx, t.clone(), own.clone(), vec![bd]);
                if own == *ty {
                    typed(t, d)
                } else {
                    typed(t, d.subsume(loc_lift(ctx, &own)))
                }
            }
            _ => None,
        }
    }
}

/// Subsumes a typing along the bound chain of a variable type.
fn expose_typing(ctx: &Context, d: Derivation, ty: &Type) -> (Type, Derivation) {
    match crate::algo::expose_derivation(ctx, ty) {
        Some(e) => {
            let exposed = ctx.expose(ty);
            (exposed, d.subsume(e))
        }
        None => (ty.clone(), d),
    }
}

/// `forall_k (X<:B).T <: forall_t (X<:B).T` by ForallLoc over reflexivity.
fn loc_lift(ctx: &Context, ty: &Type) -> Derivation {
    let q = ty.as_quant().expect("quantified type");
    let x = ctx.fresh(q.hint.name());
    let inner = ctx.clone().with_type_var(x.clone(), q.bound.clone());
    let body = q.open_with(&x);
    let target = Type::Forall(Box::new(crate::syntax::Quant {
        flavor: Flavor::TopStyle,
        hint: q.hint.clone(),
        bound: q.bound.clone(),
        body: q.body.clone(),
    }));
    Derivation::sub(
        SubRule::ForallLoc,
        ctx,
        ty.clone(),
        target,
        vec![
            Derivation::sub(SubRule::Refl, ctx, q.bound.clone(), q.bound.clone(), vec![]),
            Derivation::sub(SubRule::Refl, &inner, body.clone(), body, vec![]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::{check_subtype_derivation, check_typing_derivation};

    #[test]
    fn generated_subtypings_check() {
        for system in SystemId::ALL {
            let g = Gen::new(system);
            let mut r = rng(7);
            for _ in 0..200 {
                let ctx = g.context(&mut r, 2, 0);
                let (_, _, d) = g.sub_pair(&mut r, &ctx);
                assert_eq!(
                    check_subtype_derivation(system, &d),
                    Ok(()),
                    "{system}: {}",
                    d.conclusion
                );
            }
        }
    }

    #[test]
    fn generated_typings_check() {
        for system in [SystemId::Kt, SystemId::Kernel, SystemId::Ftop] {
            let g = Gen::new(system);
            let mut r = rng(11);
            for _ in 0..200 {
                let ctx = g.context(&mut r, 1, 2);
                let (_, _, d) = g.term(&mut r, &ctx, 5);
                assert_eq!(
                    check_typing_derivation(system, &d),
                    Ok(()),
                    "{system}: {}",
                    d.conclusion
                );
            }
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let g = Gen::new(SystemId::Kt);
        let a = g.sub_pair(&mut rng(3), &Context::new());
        let b = g.sub_pair(&mut rng(3), &Context::new());
        assert_eq!(a, b);
    }
}
