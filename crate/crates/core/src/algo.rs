//! Syntax-directed subtyping, exposure, minimal typing and the typechecker
//! built from them.

use std::fmt;
use std::rc::Rc;

use crate::deriv::{Derivation, Judgment, TyRule};
use crate::syntax::{fresh_name, Context, Flavor, Name, Term, Type};
use crate::system::{SubRule, SystemId};
use crate::wf::{wf_context, wf_term, wf_type_in, WfError};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgoOptions {
    /// Maximum number of rule applications.
    pub fuel: u64,
    /// Keep every step with its judgment in the trace.
    pub record: bool,
}

impl Default for AlgoOptions {
    fn default() -> AlgoOptions {
        AlgoOptions {
            fuel: DEFAULT_FUEL,
            record: true,
        }
    }
}

impl AlgoOptions {
    pub fn quiet() -> AlgoOptions {
        AlgoOptions {
            record: false,
            ..AlgoOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgoRule {
    Top,
    VarRefl,
    Promote,
    Arrow,
    ForallKK,
    ForallLoc,
    ForallTT,
}

impl AlgoRule {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgoRule::Top => "A-Top",
            AlgoRule::VarRefl => "A-Refl",
            AlgoRule::Promote => "A-Promote",
            AlgoRule::Arrow => "A-Arrow",
            AlgoRule::ForallKK => "A-ForallFun",
            AlgoRule::ForallLoc => "A-ForallLoc",
            AlgoRule::ForallTT => "A-ForallTop",
        }
    }
}

impl fmt::Display for AlgoRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgoStep {
    pub rule: AlgoRule,
    pub judgment: Judgment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgoTrace {
    pub steps: Vec<AlgoStep>,
    pub step_count: u64,
    pub fuel_cap: u64,
    pub fuel_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgoOutcome {
    Accepted,
    /// `path` leads from the root goal to the goal no rule applies to.
    Rejected {
        path: Vec<usize>,
        goal: Judgment,
    },
    FuelExhausted,
}

/// Type-variable bindings pushed while descending under quantifiers.
struct Scope {
    name: Name,
    bound: Type,
    parent: Option<Rc<Scope>>,
}

#[derive(Clone)]
struct Env<'a> {
    base: &'a Context,
    scope: Option<Rc<Scope>>,
}

impl<'a> Env<'a> {
    fn bound_of(&self, x: &Name) -> Option<&Type> {
        let mut s = self.scope.as_deref();
        while let Some(node) = s {
            if node.name == *x {
                return Some(&node.bound);
            }
            s = node.parent.as_deref();
        }
        self.base.bound_of(x)
    }

    fn contains(&self, x: &Name) -> bool {
        let mut s = self.scope.as_deref();
        while let Some(node) = s {
            if node.name == *x {
                return true;
            }
            s = node.parent.as_deref();
        }
        self.base.contains(x)
    }

    fn push(&self, name: Name, bound: Type) -> Env<'a> {
        Env {
            base: self.base,
            scope: Some(Rc::new(Scope {
                name,
                bound,
                parent: self.scope.clone(),
            })),
        }
    }

    fn to_context(&self) -> Context {
        let mut pushed = Vec::new();
        let mut s = self.scope.as_deref();
        while let Some(node) = s {
            pushed.push((node.name.clone(), node.bound.clone()));
            s = node.parent.as_deref();
        }
        let mut ctx = self.base.clone();
        for (n, b) in pushed.into_iter().rev() {
            ctx.push_type_var(n, b);
        }
        ctx
    }

    fn fresh(&self, hint: &Name, s: &Type, t: &Type) -> Name {
        fresh_name(hint, |n| self.contains(n) || s.mentions(n) || t.mentions(n))
    }
}

struct Goal<'a> {
    env: Env<'a>,
    lhs: Type,
    rhs: Type,
    parent: Option<(usize, usize)>,
    rule: Option<AlgoRule>,
    children: Vec<usize>,
}

/// Result of one run of the algorithm; keeps the goal tree for conversion
/// into a declarative derivation.
pub struct AlgoResult<'a> {
    pub outcome: AlgoOutcome,
    pub trace: AlgoTrace,
    goals: Vec<Goal<'a>>,
}

impl fmt::Debug for AlgoResult<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgoResult")
            .field("outcome", &self.outcome)
            .field("trace", &self.trace)
            .finish()
    }
}

impl<'a> AlgoResult<'a> {
    pub fn accepted(&self) -> bool {
        self.outcome == AlgoOutcome::Accepted
    }

    /// The declarative derivation this run corresponds to (kt rules; on
    /// uniformly decorated inputs only the rules of the matching fragment).
    pub fn derivation(&self) -> Option<Derivation> {
        if self.accepted() {
            Some(self.convert(0))
        } else {
            None
        }
    }

    fn convert(&self, id: usize) -> Derivation {
        let g = &self.goals[id];
        let ctx = g.env.to_context();
        let kids = || g.children.iter().map(|c| self.convert(*c)).collect::<Vec<_>>();
        let rule = g.rule.expect("accepted goals carry a rule");
        let leaf = |r: SubRule| Derivation::sub(r, &ctx, g.lhs.clone(), g.rhs.clone(), vec![]);
        match rule {
            AlgoRule::Top => leaf(SubRule::Top),
            AlgoRule::VarRefl => leaf(SubRule::Refl),
            AlgoRule::Promote => {
                let child = &self.goals[g.children[0]];
                let var = Derivation::sub(SubRule::Var, &ctx, g.lhs.clone(), child.lhs.clone(), vec![]);
                if child.lhs == g.rhs {
                    var
                } else {
                    Derivation::sub(
                        SubRule::Trans,
                        &ctx,
                        g.lhs.clone(),
                        g.rhs.clone(),
                        vec![var, self.convert(g.children[0])],
                    )
                }
            }
            AlgoRule::Arrow => Derivation::sub(SubRule::Arrow, &ctx, g.lhs.clone(), g.rhs.clone(), kids()),
            AlgoRule::ForallKK => Derivation::sub(SubRule::ForallFun, &ctx, g.lhs.clone(), g.rhs.clone(), kids()),
            AlgoRule::ForallLoc => Derivation::sub(SubRule::ForallLoc, &ctx, g.lhs.clone(), g.rhs.clone(), kids()),
            AlgoRule::ForallTT => Derivation::sub(SubRule::ForallTop, &ctx, g.lhs.clone(), g.rhs.clone(), kids()),
        }
    }
}

pub fn algo_subtype<'a>(ctx: &'a Context, s: &Type, t: &Type) -> AlgoResult<'a> {
    algo_subtype_with(ctx, s, t, &AlgoOptions::default())
}

/// `ctx |-A s <: t`. Every premise is conjunctive, so goals are processed
/// from an explicit worklist without backtracking.
pub fn algo_subtype_with<'a>(ctx: &'a Context, s: &Type, t: &Type, opts: &AlgoOptions) -> AlgoResult<'a> {
    let mut goals = vec![Goal {
        env: Env { base: ctx, scope: None },
        lhs: s.clone(),
        rhs: t.clone(),
        parent: None,
        rule: None,
        children: Vec::new(),
    }];
    let mut work = vec![0usize];
    let mut trace = AlgoTrace {
        steps: Vec::new(),
        step_count: 0,
        fuel_cap: opts.fuel,
        fuel_exhausted: false,
    };
    while let Some(id) = work.pop() {
        if trace.step_count >= opts.fuel {
            trace.fuel_exhausted = true;
            return AlgoResult {
                outcome: AlgoOutcome::FuelExhausted,
                trace,
                goals,
            };
        }
        let (rule, subgoals) = match step(&goals[id]) {
            Some(r) => r,
            None => {
                let goal = Judgment::subtype(
                    &goals[id].env.to_context(),
                    goals[id].lhs.clone(),
                    goals[id].rhs.clone(),
                );
                let mut path = Vec::new();
                let mut cur = id;
                while let Some((p, i)) = goals[cur].parent {
                    path.push(i);
                    cur = p;
                }
                path.reverse();
                return AlgoResult {
                    outcome: AlgoOutcome::Rejected { path, goal },
                    trace,
                    goals,
                };
            }
        };
        trace.step_count += 1;
        if opts.record {
            let g = &goals[id];
            trace.steps.push(AlgoStep {
                rule,
                judgment: Judgment::subtype(&g.env.to_context(), g.lhs.clone(), g.rhs.clone()),
            });
        }
        goals[id].rule = Some(rule);
        let first = goals.len();
        for (i, (env, l, r)) in subgoals.into_iter().enumerate() {
            goals.push(Goal {
                env,
                lhs: l,
                rhs: r,
                parent: Some((id, i)),
                rule: None,
                children: Vec::new(),
            });
        }
        let last = goals.len();
        goals[id].children = (first..last).collect();
        work.extend((first..last).rev());
    }
    AlgoResult {
        outcome: AlgoOutcome::Accepted,
        trace,
        goals,
    }
}

type Subgoal<'a> = (Env<'a>, Type, Type);

fn step<'a>(g: &Goal<'a>) -> Option<(AlgoRule, Vec<Subgoal<'a>>)> {
    let (s, t) = (&g.lhs, &g.rhs);
    if t.is_top() {
        return Some((AlgoRule::Top, vec![]));
    }
    if let Type::Var(x) = s {
        if t.as_var() == Some(x) {
            return Some((AlgoRule::VarRefl, vec![]));
        }
        let u = g.env.bound_of(x)?.clone();
        return Some((AlgoRule::Promote, vec![(g.env.clone(), u, t.clone())]));
    }
    match (s, t) {
        (Type::Arrow(s1, s2), Type::Arrow(t1, t2)) => Some((
            AlgoRule::Arrow,
            vec![
                (g.env.clone(), (**t1).clone(), (**s1).clone()),
                (g.env.clone(), (**s2).clone(), (**t2).clone()),
            ],
        )),
        (Type::Forall(p), Type::Forall(q)) => {
            let y = g.env.fresh(p.hint.name(), s, t);
            let open = |b: &Type| b.open(0, &Type::Var(y.clone()));
            match (p.flavor, q.flavor) {
                (Flavor::Kernel, Flavor::Kernel) => {
                    if p.bound != q.bound {
                        return None;
                    }
                    let env = g.env.push(y.clone(), p.bound.clone());
                    Some((AlgoRule::ForallKK, vec![(env, open(&p.body), open(&q.body))]))
                }
                (Flavor::Kernel, Flavor::TopStyle) => {
                    let env = g.env.push(y.clone(), p.bound.clone());
                    Some((
                        AlgoRule::ForallLoc,
                        vec![
                            (g.env.clone(), q.bound.clone(), p.bound.clone()),
                            (env, open(&p.body), open(&q.body)),
                        ],
                    ))
                }
                (Flavor::TopStyle, Flavor::TopStyle) => {
                    let env = g.env.push(y.clone(), Type::Top);
                    Some((
                        AlgoRule::ForallTT,
                        vec![
                            (g.env.clone(), q.bound.clone(), p.bound.clone()),
                            (env, open(&p.body), open(&q.body)),
                        ],
                    ))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// `ctx*(ty)`: the least non-variable supertype reached through bounds.
pub fn expose(ctx: &Context, ty: &Type) -> Type {
    ctx.expose(ty)
}

/// Derivation of `ctx |- ty <: expose(ctx, ty)` from Var steps, or `None`
/// when `ty` is not a variable.
pub fn expose_derivation(ctx: &Context, ty: &Type) -> Option<Derivation> {
    let x = ty.as_var()?;
    let u = ctx.bound_of(x)?.clone();
    let var = Derivation::sub(SubRule::Var, ctx, ty.clone(), u.clone(), vec![]);
    match expose_derivation(ctx, &u) {
        None => Some(var),
        Some(rest) => {
            let target = rest.result_type().cloned().unwrap();
            Some(Derivation::sub(
                SubRule::Trans,
                ctx,
                ty.clone(),
                target,
                vec![var, rest],
            ))
        }
    }
}

// ------------------------------------------------------------ ⊢M

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Untypable {
    NotAFunction {
        term: Term,
        ty: Type,
    },
    NotAQuantifier {
        term: Term,
        ty: Type,
    },
    ArgumentMismatch {
        argument: Type,
        expected: Type,
    },
    UnboundVariable(Name),
    /// The subtyping algorithm ran out of fuel on a premise.
    FuelExhausted {
        lhs: Type,
        rhs: Type,
    },
    IllFormed(WfError),
}

impl Untypable {
    pub fn code(&self) -> &'static str {
        match self {
            Untypable::NotAFunction { .. } => "NotAFunction",
            Untypable::NotAQuantifier { .. } => "NotAQuantifier",
            Untypable::ArgumentMismatch { .. } => "ArgumentMismatch",
            Untypable::UnboundVariable(_) => "UnboundVariable",
            Untypable::FuelExhausted { .. } => "FuelExhausted",
            Untypable::IllFormed(_) => "IllFormed",
        }
    }
}

impl fmt::Display for Untypable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Untypable::NotAFunction { term, ty } => write!(f, "{term} has type {ty}, which is not a function type"),
            Untypable::NotAQuantifier { term, ty } => {
                write!(f, "{term} has type {ty}, which is not an applicable quantifier")
            }
            Untypable::ArgumentMismatch { argument, expected } => {
                write!(f, "{argument} is not a subtype of {expected}")
            }
            Untypable::UnboundVariable(x) => write!(f, "unbound variable `{x}`"),
            Untypable::FuelExhausted { lhs, rhs } => write!(f, "subtyping {lhs} <: {rhs} ran out of fuel"),
            Untypable::IllFormed(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinStep {
    pub rule: &'static str,
    pub judgment: Judgment,
}

/// The ⊢M derivation, listed in postorder.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MinTrace {
    pub steps: Vec<MinStep>,
    /// Rule applications spent in subtyping premises.
    pub algo_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinOutcome {
    Typed(Type),
    Untypable(Untypable),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinTypeResult {
    pub outcome: MinOutcome,
    pub trace: MinTrace,
    /// Declarative typing derivation of the minimal type.
    pub derivation: Option<Derivation>,
}

impl MinTypeResult {
    pub fn ty(&self) -> Option<&Type> {
        match &self.outcome {
            MinOutcome::Typed(t) => Some(t),
            MinOutcome::Untypable(_) => None,
        }
    }
}

/// Minimal type in kt.
pub fn minimal_type(ctx: &Context, t: &Term) -> MinTypeResult {
    minimal_type_in(SystemId::Kt, ctx, t, &AlgoOptions::quiet())
}

/// Minimal type in `system` (kt, kernel or ftop); the certificate uses only
/// that system's rules.
pub fn minimal_type_in(system: SystemId, ctx: &Context, t: &Term, opts: &AlgoOptions) -> MinTypeResult {
    let mut trace = MinTrace::default();
    let sys = system.rules();
    let checked = wf_context(ctx, sys).and_then(|_| wf_term(ctx, t, sys));
    let result = match checked {
        Err(e) => Err(Untypable::IllFormed(e)),
        Ok(()) => Synth {
            system,
            opts: AlgoOptions { record: false, ..*opts },
            trace: &mut trace,
        }
        .synth(ctx, t),
    };
    match result {
        Ok((ty, d)) => MinTypeResult {
            outcome: MinOutcome::Typed(ty),
            trace,
            derivation: Some(d),
        },
        Err(e) => MinTypeResult {
            outcome: MinOutcome::Untypable(e),
            trace,
            derivation: None,
        },
    }
}

struct Synth<'t> {
    system: SystemId,
    opts: AlgoOptions,
    trace: &'t mut MinTrace,
}

impl Synth<'_> {
    fn subtype(&mut self, ctx: &Context, s: &Type, t: &Type) -> Result<Derivation, Untypable> {
        let r = algo_subtype_with(ctx, s, t, &self.opts);
        self.trace.algo_steps += r.trace.step_count;
        match r.outcome {
            AlgoOutcome::Accepted => Ok(r.derivation().unwrap()),
            AlgoOutcome::Rejected { .. } => Err(Untypable::ArgumentMismatch {
                argument: s.clone(),
                expected: t.clone(),
            }),
            AlgoOutcome::FuelExhausted => Err(Untypable::FuelExhausted {
                lhs: s.clone(),
                rhs: t.clone(),
            }),
        }
    }

    fn record(&mut self, rule: &'static str, ctx: &Context, t: &Term, ty: &Type) {
        self.trace.steps.push(MinStep {
            rule,
            judgment: Judgment::typing(ctx, t.clone(), ty.clone()),
        });
    }

    fn synth(&mut self, ctx: &Context, t: &Term) -> Result<(Type, Derivation), Untypable> {
        let sys = self.system.rules();
        match t {
            Term::Top => {
                self.record("M-top", ctx, t, &Type::Top);
                Ok((
                    Type::Top,
                    Derivation::typing(TyRule::Top, ctx, Term::Top, Type::Top, vec![]),
                ))
            }
            Term::Var(x) => {
                let ty = ctx
                    .type_of(x)
                    .ok_or_else(|| Untypable::UnboundVariable(x.clone()))?
                    .clone();
                self.record("M-var", ctx, t, &ty);
                Ok((ty.clone(), Derivation::typing(TyRule::Var, ctx, t.clone(), ty, vec![])))
            }
            Term::Bound(i) => Err(Untypable::IllFormed(WfError::DanglingIndex(*i))),
            Term::Lam(lam) => {
                let y = fresh_for_term(ctx, lam.hint.name(), t);
                let inner = ctx.clone().with_term_var(y.clone(), lam.annot.clone());
                let (body_ty, bd) = self.synth(&inner, &lam.open_with(&y))?;
                let ty = Type::arrow(lam.annot.clone(), body_ty);
                self.record("M-abs", ctx, t, &ty);
                Ok((
                    ty.clone(),
                    Derivation::typing(TyRule::ArrowI, ctx, t.clone(), ty, vec![bd]),
                ))
            }
            Term::TLam(lam) => {
                let y = fresh_for_term(ctx, lam.hint.name(), t);
                let inner = ctx.clone().with_type_var(y.clone(), lam.bound.clone());
                let (body_ty, bd) = self.synth(&inner, &lam.open_with(&y))?;
                let ty = Type::forall(sys.intro_flavor(), y, lam.bound.clone(), body_ty);
                self.record("M-tabs", ctx, t, &ty);
                Ok((
                    ty.clone(),
                    Derivation::typing(TyRule::ForallI, ctx, t.clone(), ty, vec![bd]),
                ))
            }
            Term::App(f, a) => {
                let (fty, fd) = self.synth(ctx, f)?;
                let exposed = expose(ctx, &fty);
                let Type::Arrow(dom, cod) = &exposed else {
                    return Err(Untypable::NotAFunction {
                        term: (**f).clone(),
                        ty: fty,
                    });
                };
                let fd = match expose_derivation(ctx, &fty) {
                    Some(e) => fd.subsume(e),
                    None => fd,
                };
                let (aty, ad) = self.synth(ctx, a)?;
                let ad = if aty == **dom {
                    ad
                } else {
                    let sd = self.subtype(ctx, &aty, dom)?;
                    ad.subsume(sd)
                };
                let ty = (**cod).clone();
                self.record("M-app", ctx, t, &ty);
                Ok((
                    ty.clone(),
                    Derivation::typing(TyRule::ArrowE, ctx, t.clone(), ty, vec![fd, ad]),
                ))
            }
            Term::TApp(f, arg) => {
                let (fty, fd) = self.synth(ctx, f)?;
                let exposed = expose(ctx, &fty);
                let elim = sys.elim_flavor();
                let q = match &exposed {
                    Type::Forall(q) if q.flavor == elim => q,
                    Type::Forall(q) if q.flavor == Flavor::Kernel && self.system == SystemId::Kt => q,
                    _ => {
                        return Err(Untypable::NotAQuantifier {
                            term: (**f).clone(),
                            ty: fty,
                        })
                    }
                };
                let sd = self.subtype(ctx, arg, &q.bound)?;
                // coerce the function to the eliminable quantifier
                let mut coercion = expose_derivation(ctx, &fty);
                if q.flavor != elim {
                    let lifted = Type::Forall(Box::new(crate::syntax::Quant {
                        flavor: elim,
                        ..(**q).clone()
                    }));
                    let loc = lift_derivation(ctx, &exposed, &lifted);
                    coercion = Some(match coercion {
                        None => loc,
                        Some(e) => Derivation::sub(SubRule::Trans, ctx, fty.clone(), lifted.clone(), vec![e, loc]),
                    });
                }
                let fd = match coercion {
                    Some(c) => fd.subsume(c),
                    None => fd,
                };
                let ty = q.instantiate(arg);
                self.record("M-tapp", ctx, t, &ty);
                Ok((
                    ty.clone(),
                    Derivation::typing(TyRule::ForallE, ctx, t.clone(), ty, vec![fd, sd]),
                ))
            }
        }
    }
}

/// `ctx |- forall_k (X<:S).T <: forall_t (X<:S).T` by ForallLoc with
/// reflexive premises.
fn lift_derivation(ctx: &Context, k: &Type, t: &Type) -> Derivation {
    let q = k.as_quant().expect("quantifier");
    let y = fresh_name(q.hint.name(), |n| ctx.contains(n) || k.mentions(n));
    let inner = ctx.clone().with_type_var(y.clone(), q.bound.clone());
    let body = q.open_with(&y);
    Derivation::sub(
        SubRule::ForallLoc,
        ctx,
        k.clone(),
        t.clone(),
        vec![
            Derivation::sub(SubRule::Refl, ctx, q.bound.clone(), q.bound.clone(), vec![]),
            Derivation::sub(SubRule::Refl, &inner, body.clone(), body, vec![]),
        ],
    )
}

fn fresh_for_term(ctx: &Context, hint: &Name, t: &Term) -> Name {
    let tv = t.free_type_vars();
    let mv = t.free_term_vars();
    fresh_name(hint, |n| ctx.contains(n) || tv.contains(n) || mv.contains(n))
}

// ------------------------------------------------------------ typecheck

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypecheckError {
    Untypable(Untypable),
    NotASubtype { minimal: Type, expected: Type },
    FuelExhausted { minimal: Type, expected: Type },
    IllFormed(WfError),
}

impl fmt::Display for TypecheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypecheckError::Untypable(u) => write!(f, "untypable: {u}"),
            TypecheckError::NotASubtype { minimal, expected } => {
                write!(f, "minimal type {minimal} is not a subtype of {expected}")
            }
            TypecheckError::FuelExhausted { minimal, expected } => {
                write!(f, "subtyping {minimal} <: {expected} ran out of fuel")
            }
            TypecheckError::IllFormed(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typechecked {
    pub minimal: Type,
    pub derivation: Derivation,
    pub min_trace: MinTrace,
    pub algo_steps: u64,
}

/// `ctx |- t : ty` in kt.
pub fn typecheck(ctx: &Context, t: &Term, ty: &Type) -> Result<Typechecked, TypecheckError> {
    typecheck_in(SystemId::Kt, ctx, t, ty, &AlgoOptions::quiet())
}

/// Minimal type, then one subtyping check, then one final `sub` node.
pub fn typecheck_in(
    system: SystemId,
    ctx: &Context,
    t: &Term,
    ty: &Type,
    opts: &AlgoOptions,
) -> Result<Typechecked, TypecheckError> {
    wf_context(ctx, system.rules())
        .and_then(|_| wf_type_in(ctx, ty, system.rules()))
        .map_err(TypecheckError::IllFormed)?;
    let m = minimal_type_in(system, ctx, t, opts);
    let minimal = match m.outcome {
        MinOutcome::Typed(s) => s,
        MinOutcome::Untypable(u) => return Err(TypecheckError::Untypable(u)),
    };
    let r = algo_subtype_with(ctx, &minimal, ty, &AlgoOptions { record: false, ..*opts });
    match r.outcome {
        AlgoOutcome::Accepted => {
            let derivation = m.derivation.unwrap().subsume(r.derivation().unwrap());
            Ok(Typechecked {
                minimal,
                derivation,
                algo_steps: m.trace.algo_steps + r.trace.step_count,
                min_trace: m.trace,
            })
        }
        AlgoOutcome::Rejected { .. } => Err(TypecheckError::NotASubtype {
            minimal,
            expected: ty.clone(),
        }),
        AlgoOutcome::FuelExhausted => Err(TypecheckError::FuelExhausted {
            minimal,
            expected: ty.clone(),
        }),
    }
}
