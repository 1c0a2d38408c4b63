//! Type and context formation.

use crate::syntax::{Context, Entry, Flavor, Name, Term, Type};
use crate::system::{RuleSystem, SystemId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WfError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("`{0}` is bound twice in the context")]
    DuplicateBinding(Name),
    #[error("{node} is not allowed in {system}")]
    ForbiddenConstruct { system: SystemId, node: String },
    #[error("dangling de Bruijn index {0}")]
    DanglingIndex(u32),
}

/// Checks that `ty` only uses constructs of `sys`, ignoring scoping.
pub fn check_constructs(ty: &Type, sys: &dyn RuleSystem) -> Result<(), WfError> {
    match ty {
        Type::Top | Type::Var(_) | Type::Bound(_) => Ok(()),
        Type::Arrow(a, b) => {
            check_constructs(a, sys)?;
            check_constructs(b, sys)
        }
        Type::Meet(a, b) => {
            if !sys.allows_meet() {
                return Err(WfError::ForbiddenConstruct {
                    system: sys.id(),
                    node: "meet".into(),
                });
            }
            check_constructs(a, sys)?;
            check_constructs(b, sys)
        }
        Type::Forall(q) => {
            if !sys.allows_flavor(q.flavor) {
                return Err(WfError::ForbiddenConstruct {
                    system: sys.id(),
                    node: format!("{} quantifier", q.flavor.keyword()),
                });
            }
            if sys.unbounded_quantifiers() && !q.bound.is_top() {
                return Err(WfError::ForbiddenConstruct {
                    system: sys.id(),
                    node: "bounded quantifier".into(),
                });
            }
            check_constructs(&q.bound, sys)?;
            check_constructs(&q.body, sys)
        }
    }
}

pub fn check_term_constructs(t: &Term, sys: &dyn RuleSystem) -> Result<(), WfError> {
    let mut out = Ok(());
    t.for_each_annotation(&mut |ty| {
        if out.is_ok() {
            out = check_constructs(ty, sys);
        }
    });
    out
}

/// `ctx ⊢ Top`: distinct names and every entry formed over its prefix.
pub fn wf_context(ctx: &Context, sys: &dyn RuleSystem) -> Result<(), WfError> {
    let mut prefix = Context::new();
    for e in ctx.entries() {
        if prefix.contains(e.name()) {
            return Err(WfError::DuplicateBinding(e.name().clone()));
        }
        wf_type_in(&prefix, e.ty(), sys)?;
        match e {
            Entry::TypeVar { name, bound } => prefix.push_type_var(name.clone(), bound.clone()),
            Entry::TermVar { name, ty } => prefix.push_term_var(name.clone(), ty.clone()),
        }
    }
    Ok(())
}

/// `ctx ⊢ ty`, including formation of `ctx` itself.
pub fn wf_type(ctx: &Context, ty: &Type, sys: &dyn RuleSystem) -> Result<(), WfError> {
    wf_context(ctx, sys)?;
    wf_type_in(ctx, ty, sys)
}

/// `ctx ⊢ ty` assuming `ctx` is already known to be formed.
pub fn wf_type_in(ctx: &Context, ty: &Type, sys: &dyn RuleSystem) -> Result<(), WfError> {
    check_constructs(ty, sys)?;
    let mut scope = Vec::new();
    scoped(ctx, ty, &mut scope)
}

fn scoped(ctx: &Context, ty: &Type, depth: &mut Vec<()>) -> Result<(), WfError> {
    match ty {
        Type::Top => Ok(()),
        Type::Var(n) => ctx
            .bound_of(n)
            .map(|_| ())
            .ok_or_else(|| WfError::UnboundVariable(n.clone())),
        Type::Bound(i) => {
            if (*i as usize) < depth.len() {
                Ok(())
            } else {
                Err(WfError::DanglingIndex(*i))
            }
        }
        Type::Arrow(a, b) | Type::Meet(a, b) => {
            scoped(ctx, a, depth)?;
            scoped(ctx, b, depth)
        }
        Type::Forall(q) => {
            scoped(ctx, &q.bound, depth)?;
            depth.push(());
            let r = scoped(ctx, &q.body, depth);
            depth.pop();
            r
        }
    }
}

/// Annotations are formed in scope and free term variables are bound.
pub fn wf_term(ctx: &Context, t: &Term, sys: &dyn RuleSystem) -> Result<(), WfError> {
    check_term_constructs(t, sys)?;
    let mut ctx = ctx.clone();
    wf_term_rec(&mut ctx, t)
}

fn wf_term_rec(ctx: &mut Context, t: &Term) -> Result<(), WfError> {
    match t {
        Term::Top => Ok(()),
        Term::Var(n) => ctx
            .type_of(n)
            .map(|_| ())
            .ok_or_else(|| WfError::UnboundVariable(n.clone())),
        Term::Bound(i) => Err(WfError::DanglingIndex(*i)),
        Term::Lam(l) => {
            scoped(ctx, &l.annot, &mut Vec::new())?;
            let x = ctx.fresh(l.hint.name());
            let body = l.open_with(&x);
            ctx.push_term_var(x, l.annot.clone());
            let r = wf_term_rec(ctx, &body);
            ctx.pop();
            r
        }
        Term::TLam(l) => {
            scoped(ctx, &l.bound, &mut Vec::new())?;
            let x = ctx.fresh(l.hint.name());
            let body = l.open_with(&x);
            ctx.push_type_var(x, l.bound.clone());
            let r = wf_term_rec(ctx, &body);
            ctx.pop();
            r
        }
        Term::App(f, a) => {
            wf_term_rec(ctx, f)?;
            wf_term_rec(ctx, a)
        }
        Term::TApp(f, ty) => {
            wf_term_rec(ctx, f)?;
            scoped(ctx, ty, &mut Vec::new())
        }
    }
}

/// True when every quantifier in `ty` has the given flavor.
pub fn uniformly(ty: &Type, flavor: Flavor) -> bool {
    let mut ok = true;
    ty.for_each_flavor(&mut |f, _| ok &= f == flavor);
    ok && !ty.has_meet()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SystemId;

    fn kt() -> &'static dyn RuleSystem {
        SystemId::Kt.rules()
    }

    #[test]
    fn formation_examples() {
        let ctx = Context::new().with_type_var("X", Type::Top);
        let t = Type::forall(Flavor::Kernel, "Z", Type::var("X"), Type::var("Z"));
        assert_eq!(wf_type(&ctx, &t, kt()), Ok(()));
        assert_eq!(
            wf_type(&Context::new(), &Type::var("X"), kt()),
            Err(WfError::UnboundVariable("X".into()))
        );
        let dup = Context::new()
            .with_type_var("X", Type::Top)
            .with_type_var("X", Type::Top);
        assert_eq!(
            wf_type(&dup, &Type::Top, kt()),
            Err(WfError::DuplicateBinding("X".into()))
        );
    }

    #[test]
    fn constructs_follow_the_system() {
        let meet = Type::meet(Type::Top, Type::Top);
        assert!(wf_type(&Context::new(), &meet, SystemId::Fwedge.rules()).is_ok());
        assert!(matches!(
            wf_type(&Context::new(), &meet, SystemId::Kernel.rules()),
            Err(WfError::ForbiddenConstruct { .. })
        ));
        let plain = Type::forall(Flavor::Plain, "X", Type::Top, Type::var("X"));
        assert!(wf_type(&Context::new(), &plain, kt()).is_err());
        let bounded = Type::forall(Flavor::Plain, "X", Type::arrow(Type::Top, Type::Top), Type::var("X"));
        assert!(wf_type(&Context::new(), &bounded, SystemId::FsubOrig.rules()).is_ok());
        assert!(wf_type(&Context::new(), &bounded, SystemId::Fwedge.rules()).is_err());
    }

    #[test]
    fn term_variables_are_not_types() {
        let ctx = Context::new().with_term_var("x", Type::Top);
        assert!(wf_type(&ctx, &Type::var("x"), kt()).is_err());
        assert!(wf_term(&ctx, &Term::var("x"), kt()).is_ok());
        assert!(wf_term(&Context::new(), &Term::var("x"), kt()).is_err());
    }
}
