//! Locally nameless syntax for types, terms and contexts.
//!
//! Free variables are names; variables bound inside a type or term are de
//! Bruijn indices, so structural equality is alpha-equivalence. Binders keep
//! their source name as a [`Hint`] that only the printer looks at.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Name {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Name {
        Name(Arc::from(s))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Binder name used for printing only. Every hint compares equal to every
/// other hint.
#[derive(Clone)]
pub struct Hint(pub Name);

impl Hint {
    pub fn name(&self) -> &Name {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}

impl Eq for Hint {}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Hint) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Hint) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which subtyping rule a quantifier obeys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    /// `forall_k`: compared by equal bounds.
    Kernel,
    /// `forall_t`: compared with bounds ignored in the bodies.
    TopStyle,
    /// Undecorated `forall` of the original calculus and of the meet calculus.
    Plain,
}

impl Flavor {
    pub fn keyword(self) -> &'static str {
        match self {
            Flavor::Kernel => "forall_k",
            Flavor::TopStyle => "forall_t",
            Flavor::Plain => "forall",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Top,
    Var(Name),
    /// De Bruijn index of an enclosing binder. Never free in a well-formed
    /// value handed out by this crate.
    Bound(u32),
    Arrow(Box<Type>, Box<Type>),
    Forall(Box<Quant>),
    Meet(Box<Type>, Box<Type>),
}

/// A bounded quantifier `forall (X <: bound). body`; `body` refers to `X`
/// as `Bound(0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quant {
    pub flavor: Flavor,
    pub hint: Hint,
    pub bound: Type,
    pub body: Type,
}

impl Quant {
    /// The body with the bound variable replaced by `ty`.
    pub fn instantiate(&self, ty: &Type) -> Type {
        self.body.open(0, ty)
    }

    /// The body with the bound variable replaced by the free variable `name`.
    pub fn open_with(&self, name: &Name) -> Type {
        self.instantiate(&Type::Var(name.clone()))
    }
}

impl Type {
    pub fn var(name: impl Into<Name>) -> Type {
        Type::Var(name.into())
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn meet(left: Type, right: Type) -> Type {
        Type::Meet(Box::new(left), Box::new(right))
    }

    /// Builds `forall (name <: bound). body`, abstracting the free occurrences
    /// of `name` in `body`.
    pub fn forall(flavor: Flavor, name: impl Into<Name>, bound: Type, body: Type) -> Type {
        let name = name.into();
        let body = body.close(&name, 0);
        Type::Forall(Box::new(Quant {
            flavor,
            hint: Hint(name),
            bound,
            body,
        }))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Type::Top)
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Type::Var(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_quant(&self) -> Option<&Quant> {
        match self {
            Type::Forall(q) => Some(q),
            _ => None,
        }
    }

    /// Node count, where an omitted (`Top`) quantifier bound costs nothing.
    pub fn size(&self) -> usize {
        match self {
            Type::Top | Type::Var(_) | Type::Bound(_) => 1,
            Type::Arrow(a, b) | Type::Meet(a, b) => 1 + a.size() + b.size(),
            Type::Forall(q) => {
                let bound = if q.bound.is_top() { 0 } else { q.bound.size() };
                1 + bound + q.body.size()
            }
        }
    }

    pub(crate) fn close(&self, name: &Name, depth: u32) -> Type {
        match self {
            Type::Var(n) if n == name => Type::Bound(depth),
            Type::Top | Type::Var(_) | Type::Bound(_) => self.clone(),
            Type::Arrow(a, b) => Type::arrow(a.close(name, depth), b.close(name, depth)),
            Type::Meet(a, b) => Type::meet(a.close(name, depth), b.close(name, depth)),
            Type::Forall(q) => Type::Forall(Box::new(Quant {
                flavor: q.flavor,
                hint: q.hint.clone(),
                bound: q.bound.close(name, depth),
                body: q.body.close(name, depth + 1),
            })),
        }
    }

    /// Replaces `Bound(depth)` by `with`, which must be locally closed.
    pub(crate) fn open(&self, depth: u32, with: &Type) -> Type {
        match self {
            Type::Bound(i) if *i == depth => with.clone(),
            Type::Top | Type::Var(_) | Type::Bound(_) => self.clone(),
            Type::Arrow(a, b) => Type::arrow(a.open(depth, with), b.open(depth, with)),
            Type::Meet(a, b) => Type::meet(a.open(depth, with), b.open(depth, with)),
            Type::Forall(q) => Type::Forall(Box::new(Quant {
                flavor: q.flavor,
                hint: q.hint.clone(),
                bound: q.bound.open(depth, with),
                body: q.body.open(depth + 1, with),
            })),
        }
    }

    /// True when no de Bruijn index escapes its binder.
    pub fn is_locally_closed(&self) -> bool {
        self.closed_above(0)
    }

    pub(crate) fn closed_above(&self, depth: u32) -> bool {
        match self {
            Type::Bound(i) => *i < depth,
            Type::Top | Type::Var(_) => true,
            Type::Arrow(a, b) | Type::Meet(a, b) => a.closed_above(depth) && b.closed_above(depth),
            Type::Forall(q) => q.bound.closed_above(depth) && q.body.closed_above(depth + 1),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    pub(crate) fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(n) => {
                out.insert(n.clone());
            }
            Type::Top | Type::Bound(_) => {}
            Type::Arrow(a, b) | Type::Meet(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Type::Forall(q) => {
                q.bound.collect_free(out);
                q.body.collect_free(out);
            }
        }
    }

    pub fn mentions(&self, name: &Name) -> bool {
        match self {
            Type::Var(n) => n == name,
            Type::Top | Type::Bound(_) => false,
            Type::Arrow(a, b) | Type::Meet(a, b) => a.mentions(name) || b.mentions(name),
            Type::Forall(q) => q.bound.mentions(name) || q.body.mentions(name),
        }
    }

    /// Capture-avoiding substitution `self[s/x]`.
    pub fn subst(&self, x: &Name, s: &Type) -> Type {
        match self {
            Type::Var(n) if n == x => s.clone(),
            Type::Top | Type::Var(_) | Type::Bound(_) => self.clone(),
            Type::Arrow(a, b) => Type::arrow(a.subst(x, s), b.subst(x, s)),
            Type::Meet(a, b) => Type::meet(a.subst(x, s), b.subst(x, s)),
            Type::Forall(q) => Type::Forall(Box::new(Quant {
                flavor: q.flavor,
                hint: q.hint.clone(),
                bound: q.bound.subst(x, s),
                body: q.body.subst(x, s),
            })),
        }
    }

    /// Mixed-variance substitution `self[(neg, pos)/x]`: positive occurrences
    /// of `x` become `pos`, negative ones `neg`. Arrow domains flip polarity;
    /// quantifiers (bound included) and meets are homomorphic.
    pub fn mixed_subst(&self, x: &Name, neg: &Type, pos: &Type) -> Type {
        match self {
            Type::Var(n) if n == x => pos.clone(),
            Type::Top | Type::Var(_) | Type::Bound(_) => self.clone(),
            Type::Arrow(a, b) => Type::arrow(a.mixed_subst(x, pos, neg), b.mixed_subst(x, neg, pos)),
            Type::Meet(a, b) => Type::meet(a.mixed_subst(x, neg, pos), b.mixed_subst(x, neg, pos)),
            Type::Forall(q) => Type::Forall(Box::new(Quant {
                flavor: q.flavor,
                hint: q.hint.clone(),
                bound: q.bound.mixed_subst(x, neg, pos),
                body: q.body.mixed_subst(x, neg, pos),
            })),
        }
    }

    /// `self[s/x^-]`: only negative occurrences are replaced.
    pub fn neg_subst(&self, x: &Name, s: &Type) -> Type {
        self.mixed_subst(x, s, &Type::Var(x.clone()))
    }

    /// Visits every locally closed subterm, outermost first.
    pub fn closed_subterms(&self) -> Vec<Type> {
        fn walk(t: &Type, depth: u32, out: &mut Vec<Type>) {
            if depth == 0 || t.closed_above(0) {
                out.push(t.clone());
            }
            match t {
                Type::Top | Type::Var(_) | Type::Bound(_) => {}
                Type::Arrow(a, b) | Type::Meet(a, b) => {
                    walk(a, depth, out);
                    walk(b, depth, out);
                }
                Type::Forall(q) => {
                    walk(&q.bound, depth, out);
                    walk(&q.body, depth + 1, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, 0, &mut out);
        out
    }

    pub fn has_meet(&self) -> bool {
        match self {
            Type::Meet(..) => true,
            Type::Top | Type::Var(_) | Type::Bound(_) => false,
            Type::Arrow(a, b) => a.has_meet() || b.has_meet(),
            Type::Forall(q) => q.bound.has_meet() || q.body.has_meet(),
        }
    }

    /// Calls `f` on the flavor of every quantifier, outermost first.
    pub fn for_each_flavor(&self, f: &mut impl FnMut(Flavor, &Type)) {
        match self {
            Type::Top | Type::Var(_) | Type::Bound(_) => {}
            Type::Arrow(a, b) | Type::Meet(a, b) => {
                a.for_each_flavor(f);
                b.for_each_flavor(f);
            }
            Type::Forall(q) => {
                f(q.flavor, &q.bound);
                q.bound.for_each_flavor(f);
                q.body.for_each_flavor(f);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Top,
    Var(Name),
    /// De Bruijn index of an enclosing term abstraction.
    Bound(u32),
    Lam(Box<Lam>),
    TLam(Box<TLam>),
    App(Box<Term>, Box<Term>),
    TApp(Box<Term>, Type),
}

/// `fun (x : annot) => body`, with `x` as term index 0 in `body`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lam {
    pub hint: Hint,
    pub annot: Type,
    pub body: Term,
}

/// `tfun (X <: bound) => body`, with `X` as type index 0 in `body`'s types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TLam {
    pub hint: Hint,
    pub bound: Type,
    pub body: Term,
}

impl Lam {
    pub fn open_with(&self, name: &Name) -> Term {
        self.body.open_term(0, &Term::Var(name.clone()))
    }

    pub fn apply(&self, arg: &Term) -> Term {
        self.body.open_term(0, arg)
    }
}

impl TLam {
    pub fn open_with(&self, name: &Name) -> Term {
        self.body.open_type(0, &Type::Var(name.clone()))
    }

    pub fn instantiate(&self, ty: &Type) -> Term {
        self.body.open_type(0, ty)
    }
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var(name.into())
    }

    pub fn lam(name: impl Into<Name>, annot: Type, body: Term) -> Term {
        let name = name.into();
        let body = body.close_term(&name, 0);
        Term::Lam(Box::new(Lam {
            hint: Hint(name),
            annot,
            body,
        }))
    }

    pub fn tlam(name: impl Into<Name>, bound: Type, body: Term) -> Term {
        let name = name.into();
        let body = body.close_type(&name, 0);
        Term::TLam(Box::new(TLam {
            hint: Hint(name),
            bound,
            body,
        }))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn tapp(f: Term, ty: Type) -> Term {
        Term::TApp(Box::new(f), ty)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Top | Term::Var(_) | Term::Bound(_) => 1,
            Term::Lam(l) => 1 + l.annot.size() + l.body.size(),
            Term::TLam(l) => 1 + l.bound.size() + l.body.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::TApp(f, t) => 1 + f.size() + t.size(),
        }
    }

    pub fn is_abstraction(&self) -> bool {
        matches!(self, Term::Lam(_) | Term::TLam(_))
    }

    pub(crate) fn close_term(&self, name: &Name, depth: u32) -> Term {
        match self {
            Term::Var(n) if n == name => Term::Bound(depth),
            Term::Top | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Lam(l) => Term::Lam(Box::new(Lam {
                hint: l.hint.clone(),
                annot: l.annot.clone(),
                body: l.body.close_term(name, depth + 1),
            })),
            Term::TLam(l) => Term::TLam(Box::new(TLam {
                hint: l.hint.clone(),
                bound: l.bound.clone(),
                body: l.body.close_term(name, depth),
            })),
            Term::App(f, a) => Term::app(f.close_term(name, depth), a.close_term(name, depth)),
            Term::TApp(f, t) => Term::tapp(f.close_term(name, depth), t.clone()),
        }
    }

    pub(crate) fn open_term(&self, depth: u32, with: &Term) -> Term {
        match self {
            Term::Bound(i) if *i == depth => with.clone(),
            Term::Top | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Lam(l) => Term::Lam(Box::new(Lam {
                hint: l.hint.clone(),
                annot: l.annot.clone(),
                body: l.body.open_term(depth + 1, with),
            })),
            Term::TLam(l) => Term::TLam(Box::new(TLam {
                hint: l.hint.clone(),
                bound: l.bound.clone(),
                body: l.body.open_term(depth, with),
            })),
            Term::App(f, a) => Term::app(f.open_term(depth, with), a.open_term(depth, with)),
            Term::TApp(f, t) => Term::tapp(f.open_term(depth, with), t.clone()),
        }
    }

    pub(crate) fn close_type(&self, name: &Name, depth: u32) -> Term {
        self.map_types_at(depth, &|t, d| t.close(name, d))
    }

    pub(crate) fn open_type(&self, depth: u32, with: &Type) -> Term {
        self.map_types_at(depth, &|t, d| t.open(d, with))
    }

    /// Applies `f` to every annotation, passing the number of enclosing type
    /// abstractions (plus `depth`).
    fn map_types_at(&self, depth: u32, f: &impl Fn(&Type, u32) -> Type) -> Term {
        match self {
            Term::Top | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Lam(l) => Term::Lam(Box::new(Lam {
                hint: l.hint.clone(),
                annot: f(&l.annot, depth),
                body: l.body.map_types_at(depth, f),
            })),
            Term::TLam(l) => Term::TLam(Box::new(TLam {
                hint: l.hint.clone(),
                bound: f(&l.bound, depth),
                body: l.body.map_types_at(depth + 1, f),
            })),
            Term::App(a, b) => Term::app(a.map_types_at(depth, f), b.map_types_at(depth, f)),
            Term::TApp(a, t) => Term::tapp(a.map_types_at(depth, f), f(t, depth)),
        }
    }

    /// `self[s/x]` on every type annotation and type argument.
    pub fn subst_type(&self, x: &Name, s: &Type) -> Term {
        self.map_types_at(0, &|t, _| t.subst(x, s))
    }

    /// Applies `f` to every annotation and type argument; `f` sees the types
    /// as stored, so it must preserve locally bound indices.
    pub fn map_annotations(&self, f: &impl Fn(&Type) -> Type) -> Term {
        self.map_types_at(0, &|t, _| f(t))
    }

    /// Visits every annotation and type argument.
    pub fn for_each_annotation(&self, f: &mut impl FnMut(&Type)) {
        match self {
            Term::Top | Term::Var(_) | Term::Bound(_) => {}
            Term::Lam(l) => {
                f(&l.annot);
                l.body.for_each_annotation(f);
            }
            Term::TLam(l) => {
                f(&l.bound);
                l.body.for_each_annotation(f);
            }
            Term::App(a, b) => {
                a.for_each_annotation(f);
                b.for_each_annotation(f);
            }
            Term::TApp(a, t) => {
                a.for_each_annotation(f);
                f(t);
            }
        }
    }

    pub fn free_type_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.for_each_annotation(&mut |t| t.collect_free(&mut out));
        out
    }

    pub fn free_term_vars(&self) -> BTreeSet<Name> {
        fn walk(t: &Term, out: &mut BTreeSet<Name>) {
            match t {
                Term::Var(n) => {
                    out.insert(n.clone());
                }
                Term::Top | Term::Bound(_) => {}
                Term::Lam(l) => walk(&l.body, out),
                Term::TLam(l) => walk(&l.body, out),
                Term::App(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Term::TApp(a, _) => walk(a, out),
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    pub fn is_locally_closed(&self) -> bool {
        fn walk(t: &Term, terms: u32, types: u32) -> bool {
            match t {
                Term::Bound(i) => *i < terms,
                Term::Top | Term::Var(_) => true,
                Term::Lam(l) => l.annot.closed_above(types) && walk(&l.body, terms + 1, types),
                Term::TLam(l) => l.bound.closed_above(types) && walk(&l.body, terms, types + 1),
                Term::App(a, b) => walk(a, terms, types) && walk(b, terms, types),
                Term::TApp(a, ty) => walk(a, terms, types) && ty.closed_above(types),
            }
        }
        walk(self, 0, 0)
    }

    pub fn is_beta_normal(&self) -> bool {
        match self {
            Term::Top | Term::Var(_) | Term::Bound(_) => true,
            Term::App(f, a) => !matches!(**f, Term::Lam(_)) && f.is_beta_normal() && a.is_beta_normal(),
            Term::TApp(f, _) => !matches!(**f, Term::TLam(_)) && f.is_beta_normal(),
            Term::Lam(l) => l.body.is_beta_normal(),
            Term::TLam(l) => l.body.is_beta_normal(),
        }
    }

    /// Leftmost-outermost normalization, contracting at most `fuel` redexes.
    pub fn beta_normalize(&self, fuel: u64) -> Result<Term, FuelExhausted> {
        let mut current = self.clone();
        let mut used = 0u64;
        loop {
            match current.contract_leftmost() {
                None => return Ok(current),
                Some(next) => {
                    if used == fuel {
                        return Err(FuelExhausted { fuel, partial: current });
                    }
                    used += 1;
                    current = next;
                }
            }
        }
    }

    /// One leftmost-outermost contraction step, or `None` when normal.
    /// Redexes under binders see the binder's index as a dangling variable;
    /// since contraction only ever substitutes the redex's own argument into
    /// its own body, indices above the redex are shifted consistently.
    fn contract_leftmost(&self) -> Option<Term> {
        match self {
            Term::App(f, a) => {
                if let Term::Lam(l) = &**f {
                    return Some(l.body.subst_term_index(0, a));
                }
                if let Some(f2) = f.contract_leftmost() {
                    return Some(Term::App(Box::new(f2), a.clone()));
                }
                a.contract_leftmost().map(|a2| Term::App(f.clone(), Box::new(a2)))
            }
            Term::TApp(f, t) => {
                if let Term::TLam(l) = &**f {
                    return Some(l.body.subst_type_index(0, t));
                }
                f.contract_leftmost().map(|f2| Term::TApp(Box::new(f2), t.clone()))
            }
            Term::Lam(l) => l.body.contract_leftmost().map(|b| {
                Term::Lam(Box::new(Lam {
                    hint: l.hint.clone(),
                    annot: l.annot.clone(),
                    body: b,
                }))
            }),
            Term::TLam(l) => l.body.contract_leftmost().map(|b| {
                Term::TLam(Box::new(TLam {
                    hint: l.hint.clone(),
                    bound: l.bound.clone(),
                    body: b,
                }))
            }),
            Term::Top | Term::Var(_) | Term::Bound(_) => None,
        }
    }

    /// Substitutes `arg` for term index `depth` and lowers the indices above
    /// it, shifting `arg`'s own dangling indices as it moves under binders.
    fn subst_term_index(&self, depth: u32, arg: &Term) -> Term {
        match self {
            Term::Bound(i) if *i == depth => arg.shift_terms(0, depth),
            Term::Bound(i) if *i > depth => Term::Bound(i - 1),
            Term::Top | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Lam(l) => Term::Lam(Box::new(Lam {
                hint: l.hint.clone(),
                annot: l.annot.clone(),
                body: l.body.subst_term_index(depth + 1, arg),
            })),
            Term::TLam(l) => Term::TLam(Box::new(TLam {
                hint: l.hint.clone(),
                bound: l.bound.clone(),
                body: l.body.subst_term_index(depth, &arg.shift_types(0, 1)),
            })),
            Term::App(f, a) => Term::app(f.subst_term_index(depth, arg), a.subst_term_index(depth, arg)),
            Term::TApp(f, t) => Term::tapp(f.subst_term_index(depth, arg), t.clone()),
        }
    }

    fn subst_type_index(&self, depth: u32, arg: &Type) -> Term {
        self.map_types_at(depth, &|t, d| t.subst_index(d, &arg.shift(0, d - depth)))
    }

    fn shift_terms(&self, cutoff: u32, by: u32) -> Term {
        if by == 0 {
            return self.clone();
        }
        match self {
            Term::Bound(i) if *i >= cutoff => Term::Bound(i + by),
            Term::Top | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Lam(l) => Term::Lam(Box::new(Lam {
                hint: l.hint.clone(),
                annot: l.annot.clone(),
                body: l.body.shift_terms(cutoff + 1, by),
            })),
            Term::TLam(l) => Term::TLam(Box::new(TLam {
                hint: l.hint.clone(),
                bound: l.bound.clone(),
                body: l.body.shift_terms(cutoff, by),
            })),
            Term::App(f, a) => Term::app(f.shift_terms(cutoff, by), a.shift_terms(cutoff, by)),
            Term::TApp(f, t) => Term::tapp(f.shift_terms(cutoff, by), t.clone()),
        }
    }

    fn shift_types(&self, cutoff: u32, by: u32) -> Term {
        if by == 0 {
            return self.clone();
        }
        self.map_types_at(cutoff, &|t, d| t.shift(d, by))
    }
}

impl Type {
    /// Adds `by` to every index `>= cutoff`.
    pub(crate) fn shift(&self, cutoff: u32, by: u32) -> Type {
        if by == 0 {
            return self.clone();
        }
        match self {
            Type::Bound(i) if *i >= cutoff => Type::Bound(i + by),
            Type::Top | Type::Var(_) | Type::Bound(_) => self.clone(),
            Type::Arrow(a, b) => Type::arrow(a.shift(cutoff, by), b.shift(cutoff, by)),
            Type::Meet(a, b) => Type::meet(a.shift(cutoff, by), b.shift(cutoff, by)),
            Type::Forall(q) => Type::Forall(Box::new(Quant {
                flavor: q.flavor,
                hint: q.hint.clone(),
                bound: q.bound.shift(cutoff, by),
                body: q.body.shift(cutoff + 1, by),
            })),
        }
    }

    /// Substitutes `arg` (already shifted for this depth) for index `depth`
    /// and lowers the indices above it.
    pub(crate) fn subst_index(&self, depth: u32, arg: &Type) -> Type {
        match self {
            Type::Bound(i) if *i == depth => arg.clone(),
            Type::Bound(i) if *i > depth => Type::Bound(i - 1),
            Type::Top | Type::Var(_) | Type::Bound(_) => self.clone(),
            Type::Arrow(a, b) => Type::arrow(a.subst_index(depth, arg), b.subst_index(depth, arg)),
            Type::Meet(a, b) => Type::meet(a.subst_index(depth, arg), b.subst_index(depth, arg)),
            Type::Forall(q) => Type::Forall(Box::new(Quant {
                flavor: q.flavor,
                hint: q.hint.clone(),
                bound: q.bound.subst_index(depth, arg),
                body: q.body.subst_index(depth + 1, &arg.shift(0, 1)),
            })),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("beta normalization stopped after {fuel} contractions")]
pub struct FuelExhausted {
    pub fuel: u64,
    pub partial: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    TypeVar { name: Name, bound: Type },
    TermVar { name: Name, ty: Type },
}

impl Entry {
    pub fn name(&self) -> &Name {
        match self {
            Entry::TypeVar { name, .. } | Entry::TermVar { name, .. } => name,
        }
    }

    pub fn ty(&self) -> &Type {
        match self {
            Entry::TypeVar { bound, .. } => bound,
            Entry::TermVar { ty, .. } => ty,
        }
    }
}

/// An ordered sequence of type-variable bounds and term-variable typings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    entries: Vec<Entry>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn from_entries(entries: Vec<Entry>) -> Context {
        Context { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn with_type_var(mut self, name: impl Into<Name>, bound: Type) -> Context {
        self.push_type_var(name.into(), bound);
        self
    }

    pub fn with_term_var(mut self, name: impl Into<Name>, ty: Type) -> Context {
        self.push_term_var(name.into(), ty);
        self
    }

    pub fn push_type_var(&mut self, name: Name, bound: Type) {
        self.entries.push(Entry::TypeVar { name, bound });
    }

    pub fn push_term_var(&mut self, name: Name, ty: Type) {
        self.entries.push(Entry::TermVar { name, ty });
    }

    pub fn pop(&mut self) -> Option<Entry> {
        self.entries.pop()
    }

    pub fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }

    pub fn is_prefix_of(&self, other: &Context) -> bool {
        other.entries.len() >= self.entries.len() && other.entries[..self.entries.len()] == self.entries[..]
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.iter().any(|e| e.name() == name)
    }

    /// The bound of type variable `name`, searching from the right.
    pub fn bound_of(&self, name: &Name) -> Option<&Type> {
        self.entries.iter().rev().find_map(|e| match e {
            Entry::TypeVar { name: n, bound } if n == name => Some(bound),
            _ => None,
        })
    }

    pub fn type_of(&self, name: &Name) -> Option<&Type> {
        self.entries.iter().rev().find_map(|e| match e {
            Entry::TermVar { name: n, ty } if n == name => Some(ty),
            _ => None,
        })
    }

    pub fn type_vars(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.entries.iter().filter_map(|e| match e {
            Entry::TypeVar { name, bound } => Some((name, bound)),
            _ => None,
        })
    }

    pub fn term_vars(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.entries.iter().filter_map(|e| match e {
            Entry::TermVar { name, ty } => Some((name, ty)),
            _ => None,
        })
    }

    /// `hint` if unused, otherwise `hint` with the smallest numeric suffix
    /// that is unused.
    pub fn fresh(&self, hint: &Name) -> Name {
        fresh_name(hint, |n| self.contains(n))
    }

    /// Follows type-variable bounds until the result is not a variable.
    pub fn expose(&self, ty: &Type) -> Type {
        let mut current = ty;
        let mut steps = 0;
        while let Type::Var(n) = current {
            match self.bound_of(n) {
                Some(b) if steps <= self.entries.len() => {
                    current = b;
                    steps += 1;
                }
                _ => break,
            }
        }
        current.clone()
    }
}

/// `hint` or the first `hint<k>` (k = 1, 2, ...) for which `taken` is false.
pub fn fresh_name(hint: &Name, taken: impl Fn(&Name) -> bool) -> Name {
    if !taken(hint) {
        return hint.clone();
    }
    let stem = hint.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { hint.as_str() } else { stem };
    (1u32..)
        .map(|k| Name::from(format!("{stem}{k}")))
        .find(|n| !taken(n))
        .expect("unbounded name supply")
}

/// Alpha-equivalence. The locally nameless representation makes it plain
/// structural equality; kept as a function for readability at call sites.
pub fn alpha_eq<T: PartialEq>(a: &T, b: &T) -> bool {
    a == b
}
