//! Judgments, rule labels and explicit derivation trees.

use std::fmt;
use std::str::FromStr;

use crate::syntax::{Context, Term, Type};
use crate::system::SubRule;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Judgment {
    WfType {
        ctx: Context,
        ty: Type,
    },
    Subtype {
        ctx: Context,
        lhs: Type,
        rhs: Type,
    },
    Typing {
        ctx: Context,
        term: Term,
        ty: Type,
    },
    Equality {
        ctx: Context,
        lhs: Term,
        rhs: Term,
        ty: Type,
    },
}

impl Judgment {
    pub fn ctx(&self) -> &Context {
        match self {
            Judgment::WfType { ctx, .. }
            | Judgment::Subtype { ctx, .. }
            | Judgment::Typing { ctx, .. }
            | Judgment::Equality { ctx, .. } => ctx,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Judgment::WfType { .. } => "wf",
            Judgment::Subtype { .. } => "subtype",
            Judgment::Typing { .. } => "typing",
            Judgment::Equality { .. } => "equality",
        }
    }

    pub fn as_subtype(&self) -> Option<(&Context, &Type, &Type)> {
        match self {
            Judgment::Subtype { ctx, lhs, rhs } => Some((ctx, lhs, rhs)),
            _ => None,
        }
    }

    pub fn as_typing(&self) -> Option<(&Context, &Term, &Type)> {
        match self {
            Judgment::Typing { ctx, term, ty } => Some((ctx, term, ty)),
            _ => None,
        }
    }

    pub fn subtype(ctx: &Context, lhs: Type, rhs: Type) -> Judgment {
        Judgment::Subtype {
            ctx: ctx.clone(),
            lhs,
            rhs,
        }
    }

    pub fn typing(ctx: &Context, term: Term, ty: Type) -> Judgment {
        Judgment::Typing {
            ctx: ctx.clone(),
            term,
            ty,
        }
    }

    pub fn equality(ctx: &Context, lhs: Term, rhs: Term, ty: Type) -> Judgment {
        Judgment::Equality {
            ctx: ctx.clone(),
            lhs,
            rhs,
            ty,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TyRule {
    Top,
    Var,
    Sub,
    ArrowI,
    ArrowE,
    ForallI,
    ForallE,
}

impl TyRule {
    pub const ALL: [TyRule; 7] = [
        TyRule::Top,
        TyRule::Var,
        TyRule::Sub,
        TyRule::ArrowI,
        TyRule::ArrowE,
        TyRule::ForallI,
        TyRule::ForallE,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TyRule::Top => "top",
            TyRule::Var => "var",
            TyRule::Sub => "sub",
            TyRule::ArrowI => "arrow-i",
            TyRule::ArrowE => "arrow-e",
            TyRule::ForallI => "forall-i",
            TyRule::ForallE => "forall-e",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqRule {
    Top,
    Refl,
    Trans,
    Sym,
    Beta1,
    Eta1,
    Beta2,
    Eta2,
    Abs1,
    Abs2,
    App1,
    App2,
}

impl EqRule {
    pub const ALL: [EqRule; 12] = [
        EqRule::Top,
        EqRule::Refl,
        EqRule::Trans,
        EqRule::Sym,
        EqRule::Beta1,
        EqRule::Eta1,
        EqRule::Beta2,
        EqRule::Eta2,
        EqRule::Abs1,
        EqRule::Abs2,
        EqRule::App1,
        EqRule::App2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EqRule::Top => "eq-top",
            EqRule::Refl => "eq-refl",
            EqRule::Trans => "eq-trans",
            EqRule::Sym => "eq-sym",
            EqRule::Beta1 => "beta1",
            EqRule::Eta1 => "eta1",
            EqRule::Beta2 => "beta2",
            EqRule::Eta2 => "eta2",
            EqRule::Abs1 => "abs1",
            EqRule::Abs2 => "abs2",
            EqRule::App1 => "app1",
            EqRule::App2 => "app2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Sub(SubRule),
    Ty(TyRule),
    Eq(EqRule),
}

impl RuleId {
    pub fn all() -> Vec<RuleId> {
        SubRule::ALL
            .iter()
            .map(|r| RuleId::Sub(*r))
            .chain(TyRule::ALL.iter().map(|r| RuleId::Ty(*r)))
            .chain(EqRule::ALL.iter().map(|r| RuleId::Eq(*r)))
            .collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Sub(r) => r.as_str(),
            RuleId::Ty(r) => r.as_str(),
            RuleId::Eq(r) => r.as_str(),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<RuleId, UnknownRule> {
        RuleId::all()
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: RuleId,
    pub conclusion: Judgment,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: RuleId, conclusion: Judgment, premises: Vec<Derivation>) -> Derivation {
        Derivation {
            rule,
            conclusion,
            premises,
        }
    }

    pub fn leaf(rule: RuleId, conclusion: Judgment) -> Derivation {
        Derivation::new(rule, conclusion, Vec::new())
    }

    pub fn sub(rule: SubRule, ctx: &Context, lhs: Type, rhs: Type, premises: Vec<Derivation>) -> Derivation {
        Derivation::new(RuleId::Sub(rule), Judgment::subtype(ctx, lhs, rhs), premises)
    }

    pub fn typing(rule: TyRule, ctx: &Context, term: Term, ty: Type, premises: Vec<Derivation>) -> Derivation {
        Derivation::new(RuleId::Ty(rule), Judgment::typing(ctx, term, ty), premises)
    }

    /// The subsumption step `t : T` to `t : T'` given `T <: T'`.
    pub fn subsume(self, by: Derivation) -> Derivation {
        let (ctx, term) = match &self.conclusion {
            Judgment::Typing { ctx, term, .. } => (ctx.clone(), term.clone()),
            _ => panic!("subsume expects a typing derivation"),
        };
        let ty = match &by.conclusion {
            Judgment::Subtype { rhs, .. } => rhs.clone(),
            _ => panic!("subsume expects a subtyping derivation"),
        };
        Derivation::new(
            RuleId::Ty(TyRule::Sub),
            Judgment::Typing { ctx, term, ty },
            vec![self, by],
        )
    }

    /// Type of a typing conclusion, right side of a subtyping conclusion.
    pub fn result_type(&self) -> Option<&Type> {
        match &self.conclusion {
            Judgment::Typing { ty, .. } | Judgment::Equality { ty, .. } => Some(ty),
            Judgment::Subtype { rhs, .. } => Some(rhs),
            Judgment::WfType { .. } => None,
        }
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(|p| p.height()).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(|p| p.node_count()).sum::<usize>()
    }

    /// Paths (child indices from the root) of every node in preorder.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        fn walk(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(path.clone());
            for (i, p) in d.premises.iter().enumerate() {
                path.push(i);
                walk(p, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn at(&self, path: &[usize]) -> Option<&Derivation> {
        let mut d = self;
        for &i in path {
            d = d.premises.get(i)?;
        }
        Some(d)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Derivation> {
        let mut d = self;
        for &i in path {
            d = d.premises.get_mut(i)?;
        }
        Some(d)
    }

    /// Rules used anywhere in the tree, in preorder.
    pub fn rules(&self) -> Vec<RuleId> {
        self.paths().iter().map(|p| self.at(p).unwrap().rule).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::all() {
            assert_eq!(r.as_str().parse::<RuleId>().unwrap(), r);
        }
        assert_eq!(RuleId::all().len(), 31);
        assert!("ForallWhatever".parse::<RuleId>().is_err());
    }

    #[test]
    fn shape_helpers() {
        let ctx = Context::new();
        let refl = Derivation::sub(SubRule::Refl, &ctx, Type::Top, Type::Top, vec![]);
        let d = Derivation::sub(SubRule::Trans, &ctx, Type::Top, Type::Top, vec![refl.clone(), refl]);
        assert_eq!(d.height(), 2);
        assert_eq!(d.node_count(), 3);
        assert_eq!(d.paths(), vec![vec![], vec![0], vec![1]]);
        assert_eq!(d.at(&[1]).unwrap().rule, RuleId::Sub(SubRule::Refl));
    }
}
