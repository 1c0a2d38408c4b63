//! Bounded-depth proof search for declarative subtyping.
//!
//! Goals live in a hash-consed arena, so alpha-equivalent judgments share one
//! entry. A query explores every goal reachable within the depth bound and
//! then computes exact minimal derivation heights bottom-up (a Knuth-style
//! shortest-derivation pass), which gives the same answers as iterative
//! deepening without re-exploring. A [`SearchSession`] keeps settled goals
//! across queries over one context.

use std::fmt;
use std::rc::Rc;

use rustc_hash::FxHashMap;

use crate::deriv::Derivation;
use crate::syntax::{Context, Flavor, Hint, Name, Quant, Type};
use crate::system::{RuleSystem, SubRule, SystemId};
use crate::wf::{wf_context, wf_type_in};

pub const DEFAULT_DEPTH: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Derivation),
    NotFoundWithinDepth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    /// Height of the derivation found, or the depth bound otherwise.
    pub depth_used: u32,
    /// Goals explored by this query.
    pub nodes_expanded: u64,
}

impl SearchResult {
    pub fn found(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Found(_))
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match &self.outcome {
            SearchOutcome::Found(d) => Some(d),
            SearchOutcome::NotFoundWithinDepth => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// One-off search with its own memo table.
pub fn search_subtype(
    system: SystemId,
    ctx: &Context,
    s: &Type,
    t: &Type,
    depth: u32,
) -> Result<SearchResult, SearchError> {
    SearchSession::new(system, ctx, depth)?.search(s, t)
}

type TyId = u32;
type CtxId = u32;
type GoalId = u32;

const TOP: TyId = 0;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Top,
    /// Context variable by level.
    Fv(u32),
    Bv(u32),
    Arrow(TyId, TyId),
    Forall(Flavor, TyId, TyId),
    Meet(TyId, TyId),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    /// One more than the largest dangling index; 0 when locally closed.
    free_depth: Vec<u32>,
    hints: Vec<Option<Hint>>,
    index: FxHashMap<Node, TyId>,
    opened: FxHashMap<(TyId, u32, u32), TyId>,
    subterms: FxHashMap<TyId, Rc<[TyId]>>,
}

impl Arena {
    fn new() -> Arena {
        let mut a = Arena::default();
        a.mk(Node::Top);
        a
    }

    fn mk(&mut self, n: Node) -> TyId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let fd = match n {
            Node::Top | Node::Fv(_) => 0,
            Node::Bv(i) => i + 1,
            Node::Arrow(a, b) | Node::Meet(a, b) => self.free_depth[a as usize].max(self.free_depth[b as usize]),
            Node::Forall(_, b, body) => {
                self.free_depth[b as usize].max(self.free_depth[body as usize].saturating_sub(1))
            }
        };
        let id = self.nodes.len() as TyId;
        self.nodes.push(n);
        self.free_depth.push(fd);
        self.hints.push(None);
        self.index.insert(n, id);
        id
    }

    fn mk_hinted(&mut self, n: Node, hint: Option<&Hint>) -> TyId {
        let id = self.mk(n);
        if self.hints[id as usize].is_none() {
            self.hints[id as usize] = hint.cloned();
        }
        id
    }

    fn node(&self, id: TyId) -> Node {
        self.nodes[id as usize]
    }

    fn intern(&mut self, ty: &Type, levels: &FxHashMap<Name, u32>) -> Result<TyId, Name> {
        Ok(match ty {
            Type::Top => TOP,
            Type::Var(n) => self.mk(Node::Fv(*levels.get(n).ok_or_else(|| n.clone())?)),
            Type::Bound(i) => self.mk(Node::Bv(*i)),
            Type::Arrow(a, b) => {
                let (a, b) = (self.intern(a, levels)?, self.intern(b, levels)?);
                self.mk(Node::Arrow(a, b))
            }
            Type::Meet(a, b) => {
                let (a, b) = (self.intern(a, levels)?, self.intern(b, levels)?);
                self.mk(Node::Meet(a, b))
            }
            Type::Forall(q) => {
                let (b, body) = (self.intern(&q.bound, levels)?, self.intern(&q.body, levels)?);
                self.mk_hinted(Node::Forall(q.flavor, b, body), Some(&q.hint))
            }
        })
    }

    /// Replaces index `k` by the context variable at `level`.
    fn open(&mut self, id: TyId, k: u32, level: u32) -> TyId {
        if self.free_depth[id as usize] <= k {
            return id;
        }
        if let Some(&r) = self.opened.get(&(id, k, level)) {
            return r;
        }
        let r = match self.node(id) {
            Node::Bv(i) if i == k => self.mk(Node::Fv(level)),
            n @ (Node::Top | Node::Fv(_) | Node::Bv(_)) => self.mk(n),
            Node::Arrow(a, b) => {
                let (a, b) = (self.open(a, k, level), self.open(b, k, level));
                self.mk(Node::Arrow(a, b))
            }
            Node::Meet(a, b) => {
                let (a, b) = (self.open(a, k, level), self.open(b, k, level));
                self.mk(Node::Meet(a, b))
            }
            Node::Forall(f, b, body) => {
                let (b, body) = (self.open(b, k, level), self.open(body, k + 1, level));
                let hint = self.hints[id as usize].clone();
                self.mk_hinted(Node::Forall(f, b, body), hint.as_ref())
            }
        };
        self.opened.insert((id, k, level), r);
        r
    }

    /// Locally closed subterms in preorder, without repeats.
    fn closed_subterms(&mut self, id: TyId) -> Rc<[TyId]> {
        if let Some(s) = self.subterms.get(&id) {
            return s.clone();
        }
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(t) = stack.pop() {
            if self.free_depth[t as usize] == 0 && !out.contains(&t) {
                out.push(t);
            }
            match self.node(t) {
                Node::Arrow(a, b) | Node::Meet(a, b) | Node::Forall(_, a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => {}
            }
        }
        let out: Rc<[TyId]> = out.into();
        self.subterms.insert(id, out.clone());
        out
    }

    fn to_type(&self, id: TyId, names: &[Name]) -> Type {
        match self.node(id) {
            Node::Top => Type::Top,
            Node::Fv(l) => Type::Var(names[l as usize].clone()),
            Node::Bv(i) => Type::Bound(i),
            Node::Arrow(a, b) => Type::arrow(self.to_type(a, names), self.to_type(b, names)),
            Node::Meet(a, b) => Type::meet(self.to_type(a, names), self.to_type(b, names)),
            Node::Forall(flavor, b, body) => Type::Forall(Box::new(Quant {
                flavor,
                hint: self.hint(id),
                bound: self.to_type(b, names),
                body: self.to_type(body, names),
            })),
        }
    }

    fn hint(&self, id: TyId) -> Hint {
        self.hints[id as usize].clone().unwrap_or_else(|| Hint(Name::from("Y")))
    }
}

struct CtxNode {
    /// Bounds by level.
    bounds: Vec<TyId>,
    /// Binders added on top of the session context.
    ext: u32,
    /// Cut candidates contributed by the context.
    cuts: Rc<[TyId]>,
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    rule: SubRule,
    prem: [GoalId; 2],
    n: u8,
}

impl Edge {
    fn premises(&self) -> &[GoalId] {
        &self.prem[..self.n as usize]
    }
}

#[derive(Clone, Copy, Debug)]
enum Status {
    Unknown,
    Local(u32),
    Proved { height: u8, edge: Edge },
    Refuted,
}

/// Memo table for subtyping searches over one context at a fixed depth.
///
/// Settled goals are exact: a goal is proved with its minimal height, or
/// refuted when no derivation fits in what is left of the depth bound below
/// its binders.
pub struct SearchSession {
    system: SystemId,
    sys: &'static dyn RuleSystem,
    ctx: Context,
    names: Vec<Name>,
    levels: FxHashMap<Name, u32>,
    depth: u32,
    arena: Arena,
    ctxs: Vec<CtxNode>,
    ctx_index: FxHashMap<(CtxId, TyId), CtxId>,
    goal_index: FxHashMap<(CtxId, TyId, TyId), GoalId>,
    goals: Vec<(CtxId, TyId, TyId)>,
    status: Vec<Status>,
}

impl fmt::Debug for SearchSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SearchSession")
            .field("system", &self.system)
            .field("depth", &self.depth)
            .field("goals", &self.goals.len())
            .finish()
    }
}

impl SearchSession {
    pub fn new(system: SystemId, ctx: &Context, depth: u32) -> Result<SearchSession, SearchError> {
        if depth == 0 || depth > u8::MAX as u32 {
            return Err(SearchError::InvalidInput(format!(
                "depth must be between 1 and 255, got {depth}"
            )));
        }
        let sys = system.rules();
        wf_context(ctx, sys).map_err(|e| SearchError::InvalidInput(e.to_string()))?;
        let mut s = SearchSession {
            system,
            sys,
            ctx: ctx.clone(),
            names: Vec::new(),
            levels: FxHashMap::default(),
            depth,
            arena: Arena::new(),
            ctxs: Vec::new(),
            ctx_index: FxHashMap::default(),
            goal_index: FxHashMap::default(),
            goals: Vec::new(),
            status: Vec::new(),
        };
        let mut bounds = Vec::new();
        for (name, bound) in ctx.type_vars() {
            let b = s.arena.intern(bound, &s.levels).expect("formed context");
            s.levels.insert(name.clone(), s.names.len() as u32);
            s.names.push(name.clone());
            bounds.push(b);
        }
        let cuts = s.context_cuts(&bounds);
        s.ctxs.push(CtxNode { bounds, ext: 0, cuts });
        Ok(s)
    }

    pub fn system(&self) -> SystemId {
        self.system
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    /// Number of goals ever created in this session.
    pub fn goal_count(&self) -> usize {
        self.goals.len()
    }

    pub fn search(&mut self, s: &Type, t: &Type) -> Result<SearchResult, SearchError> {
        for ty in [s, t] {
            wf_type_in(&self.ctx, ty, self.sys).map_err(|e| SearchError::InvalidInput(e.to_string()))?;
        }
        let sid = self
            .arena
            .intern(s, &self.levels)
            .map_err(|n| SearchError::InvalidInput(format!("`{n}` is not a type variable")))?;
        let tid = self
            .arena
            .intern(t, &self.levels)
            .map_err(|n| SearchError::InvalidInput(format!("`{n}` is not a type variable")))?;
        let root = self.goal(0, sid, tid);
        let nodes_expanded = match self.status[root as usize] {
            Status::Unknown => self.solve(root),
            _ => 0,
        };
        Ok(match self.status[root as usize] {
            Status::Proved { height, .. } => {
                let mut names = self.names.clone();
                let d = self.rebuild(root, &self.ctx.clone(), &mut names);
                SearchResult {
                    outcome: SearchOutcome::Found(d),
                    depth_used: height as u32,
                    nodes_expanded,
                }
            }
            _ => SearchResult {
                outcome: SearchOutcome::NotFoundWithinDepth,
                depth_used: self.depth,
                nodes_expanded,
            },
        })
    }

    /// Cheaper than [`search`](Self::search) when no derivation is needed.
    pub fn derivable(&mut self, s: &Type, t: &Type) -> Result<bool, SearchError> {
        for ty in [s, t] {
            wf_type_in(&self.ctx, ty, self.sys).map_err(|e| SearchError::InvalidInput(e.to_string()))?;
        }
        let sid = self
            .arena
            .intern(s, &self.levels)
            .map_err(|n| SearchError::InvalidInput(n.to_string()))?;
        let tid = self
            .arena
            .intern(t, &self.levels)
            .map_err(|n| SearchError::InvalidInput(n.to_string()))?;
        let root = self.goal(0, sid, tid);
        if let Status::Unknown = self.status[root as usize] {
            self.solve(root);
        }
        Ok(matches!(self.status[root as usize], Status::Proved { .. }))
    }

    fn context_cuts(&mut self, bounds: &[TyId]) -> Rc<[TyId]> {
        let mut out: Vec<TyId> = Vec::new();
        let push = |out: &mut Vec<TyId>, t: TyId| {
            if t != TOP && !out.contains(&t) {
                out.push(t);
            }
        };
        for &b in bounds {
            for &t in self.arena.closed_subterms(b).iter() {
                push(&mut out, t);
            }
        }
        let vars: Vec<TyId> = (0..bounds.len() as u32).map(|l| self.arena.mk(Node::Fv(l))).collect();
        for &v in &vars {
            push(&mut out, v);
        }
        if self.sys.allows_meet() {
            let parts: Vec<TyId> = vars
                .iter()
                .copied()
                .chain(bounds.iter().copied().filter(|&b| b != TOP))
                .collect();
            for &a in &parts {
                for &b in &parts {
                    if a != b {
                        let m = self.arena.mk(Node::Meet(a, b));
                        push(&mut out, m);
                    }
                }
            }
        }
        out.into()
    }

    fn extend(&mut self, c: CtxId, bound: TyId) -> CtxId {
        if let Some(&id) = self.ctx_index.get(&(c, bound)) {
            return id;
        }
        let mut bounds = self.ctxs[c as usize].bounds.clone();
        bounds.push(bound);
        let ext = self.ctxs[c as usize].ext + 1;
        let cuts = self.context_cuts(&bounds);
        let id = self.ctxs.len() as CtxId;
        self.ctxs.push(CtxNode { bounds, ext, cuts });
        self.ctx_index.insert((c, bound), id);
        id
    }

    fn goal(&mut self, c: CtxId, s: TyId, t: TyId) -> GoalId {
        if let Some(&g) = self.goal_index.get(&(c, s, t)) {
            return g;
        }
        let g = self.goals.len() as GoalId;
        self.goals.push((c, s, t));
        self.status.push(Status::Unknown);
        self.goal_index.insert((c, s, t), g);
        g
    }

    /// Largest height a derivation of a goal in `c` can have.
    fn cap(&self, c: CtxId) -> u32 {
        self.depth - self.ctxs[c as usize].ext
    }

    /// Rule instances concluding goal `g`, in a fixed order. When an axiom
    /// applies only the first one is returned.
    fn expand(&mut self, g: GoalId) -> Vec<Edge> {
        let (c, s, t) = self.goals[g as usize];
        let sys = self.sys;
        let allows = |r: SubRule| sys.allows_rule(r);
        let axiom = |rule| {
            vec![Edge {
                rule,
                prem: [0, 0],
                n: 0,
            }]
        };
        let sn = self.arena.node(s);
        let tn = self.arena.node(t);
        if allows(SubRule::Refl) && s == t {
            return axiom(SubRule::Refl);
        }
        if allows(SubRule::Top) && t == TOP {
            return axiom(SubRule::Top);
        }
        if let Node::Fv(l) = sn {
            if allows(SubRule::Var) && self.ctxs[c as usize].bounds[l as usize] == t {
                return axiom(SubRule::Var);
            }
        }
        if let Node::Meet(a, b) = sn {
            if allows(SubRule::MeetL) && a == t {
                return axiom(SubRule::MeetL);
            }
            if allows(SubRule::MeetR) && b == t {
                return axiom(SubRule::MeetR);
            }
        }
        let mut edges = Vec::new();
        let two = |rule, a, b| Edge {
            rule,
            prem: [a, b],
            n: 2,
        };
        if let (Node::Arrow(s1, s2), Node::Arrow(t1, t2)) = (sn, tn) {
            if allows(SubRule::Arrow) {
                let (p, q) = (self.goal(c, t1, s1), self.goal(c, s2, t2));
                edges.push(two(SubRule::Arrow, p, q));
            }
        }
        let binder_ok = self.cap(c) > 1;
        if let (Node::Forall(fs, s0, s1), Node::Forall(ft, t0, t1)) = (sn, tn) {
            let level = self.ctxs[c as usize].bounds.len() as u32;
            let rule = match (fs, ft) {
                (Flavor::Kernel, Flavor::Kernel) => Some(SubRule::ForallFun),
                (Flavor::Kernel, Flavor::TopStyle) => Some(SubRule::ForallLoc),
                (Flavor::TopStyle, Flavor::TopStyle) => Some(SubRule::ForallTop),
                (Flavor::Plain, Flavor::Plain) => Some(SubRule::ForallOrig),
                _ => None,
            };
            if let Some(rule) = rule.filter(|&r| allows(r) && binder_ok) {
                let body_bound = match rule {
                    SubRule::ForallFun | SubRule::ForallLoc => s0,
                    SubRule::ForallTop => TOP,
                    _ => t0,
                };
                if rule != SubRule::ForallFun || s0 == t0 {
                    let inner = self.extend(c, body_bound);
                    let (a, b) = (self.arena.open(s1, 0, level), self.arena.open(t1, 0, level));
                    let body = self.goal(inner, a, b);
                    if rule == SubRule::ForallFun {
                        edges.push(Edge {
                            rule,
                            prem: [body, 0],
                            n: 1,
                        });
                    } else {
                        let bounds = self.goal(c, t0, s0);
                        edges.push(two(rule, bounds, body));
                    }
                }
            }
        }
        if let Node::Meet(a, b) = tn {
            if allows(SubRule::MeetIntro) {
                let (p, q) = (self.goal(c, s, a), self.goal(c, s, b));
                edges.push(two(SubRule::MeetIntro, p, q));
            }
        }
        if allows(SubRule::Trans) {
            for cut in self.cuts(c, s, t) {
                let (p, q) = (self.goal(c, s, cut), self.goal(c, cut, t));
                edges.push(two(SubRule::Trans, p, q));
            }
        }
        edges
    }

    fn cuts(&mut self, c: CtxId, s: TyId, t: TyId) -> Vec<TyId> {
        let mut out = Vec::new();
        let from_s = self.arena.closed_subterms(s);
        let from_t = self.arena.closed_subterms(t);
        let from_ctx = self.ctxs[c as usize].cuts.clone();
        for &x in from_s.iter().chain(from_t.iter()).chain(from_ctx.iter()) {
            if x != s && x != t && x != TOP && !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    /// Explores everything reachable from `root` and settles it. Returns the
    /// number of goals explored.
    fn solve(&mut self, root: GoalId) -> u64 {
        let mut local: Vec<GoalId> = vec![root];
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        self.status[root as usize] = Status::Local(0);
        let mut i = 0;
        while i < local.len() {
            let g = local[i];
            let mut es = self.expand(g);
            es.retain(|e| {
                e.premises()
                    .iter()
                    .all(|&p| !matches!(self.status[p as usize], Status::Refuted))
            });
            for e in &es {
                for &p in e.premises() {
                    if let Status::Unknown = self.status[p as usize] {
                        self.status[p as usize] = Status::Local(local.len() as u32);
                        local.push(p);
                    }
                }
            }
            edges.push(es);
            i += 1;
        }

        let n = local.len();
        let caps: Vec<u32> = local.iter().map(|&g| self.cap(self.goals[g as usize].0)).collect();
        let mut parents: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut remaining: Vec<Vec<u8>> = Vec::with_capacity(n);
        let mut maxh: Vec<Vec<u8>> = Vec::with_capacity(n);
        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.depth as usize + 2];
        for (gi, es) in edges.iter().enumerate() {
            let mut rem = Vec::with_capacity(es.len());
            let mut mh = Vec::with_capacity(es.len());
            for (ei, e) in es.iter().enumerate() {
                let mut r = 0u8;
                let mut h = 0u8;
                for &p in e.premises() {
                    match self.status[p as usize] {
                        Status::Local(pi) => {
                            r += 1;
                            parents[pi as usize].push((gi as u32, ei as u32));
                        }
                        Status::Proved { height, .. } => h = h.max(height),
                        _ => unreachable!("premise left unexplored"),
                    }
                }
                if r == 0 && (h as u32 + 1) <= caps[gi] {
                    buckets[h as usize + 1].push((gi as u32, ei as u32));
                }
                rem.push(r);
                mh.push(h);
            }
            remaining.push(rem);
            maxh.push(mh);
        }

        let mut best: Vec<Option<(u8, u32)>> = vec![None; n];
        for h in 1..=self.depth as usize {
            let bucket = std::mem::take(&mut buckets[h]);
            let mut settled = Vec::new();
            for (gi, ei) in bucket {
                match &mut best[gi as usize] {
                    None => {
                        best[gi as usize] = Some((h as u8, ei));
                        settled.push(gi);
                    }
                    Some((bh, be)) if *bh as usize == h && ei < *be => *be = ei,
                    _ => {}
                }
            }
            for gi in settled {
                for &(pi, ei) in &parents[gi as usize] {
                    let (pi, ei) = (pi as usize, ei as usize);
                    remaining[pi][ei] -= 1;
                    maxh[pi][ei] = maxh[pi][ei].max(h as u8);
                    let cand = maxh[pi][ei] as usize + 1;
                    if remaining[pi][ei] == 0 && best[pi].is_none() && cand as u32 <= caps[pi] {
                        buckets[cand].push((pi as u32, ei as u32));
                    }
                }
            }
        }

        for (gi, &g) in local.iter().enumerate() {
            self.status[g as usize] = match best[gi] {
                Some((height, ei)) => Status::Proved {
                    height,
                    edge: edges[gi][ei as usize],
                },
                None => Status::Refuted,
            };
        }
        n as u64
    }

    fn rebuild(&self, g: GoalId, ctx: &Context, names: &mut Vec<Name>) -> Derivation {
        let (c, s, t) = self.goals[g as usize];
        let lhs = self.arena.to_type(s, names);
        let rhs = self.arena.to_type(t, names);
        let Status::Proved { edge, .. } = self.status[g as usize] else {
            unreachable!("rebuilding an unproved goal")
        };
        let mut premises = Vec::new();
        for &p in edge.premises() {
            let pc = self.goals[p as usize].0;
            if pc == c {
                premises.push(self.rebuild(p, ctx, names));
            } else {
                let level = names.len();
                let bound = self.ctxs[pc as usize].bounds[level];
                let hint = self.arena.hint(s);
                let name = ctx.fresh(hint.name());
                let inner = ctx
                    .clone()
                    .with_type_var(name.clone(), self.arena.to_type(bound, names));
                names.push(name);
                premises.push(self.rebuild(p, &inner, names));
                names.pop();
            }
        }
        Derivation::sub(edge.rule, ctx, lhs, rhs, premises)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_subtype_derivation;
    use crate::surface::parse_type;

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn x_ctx() -> Context {
        Context::new().with_type_var("X", Type::Top)
    }

    #[test]
    fn loc_query_is_found() {
        let r = search_subtype(
            SystemId::Kt,
            &x_ctx(),
            &ty("forall_k Z <: X . Z -> Z"),
            &ty("forall_t Z <: X . Z -> X"),
            8,
        )
        .unwrap();
        let d = r.derivation().expect("found");
        assert_eq!(d.rule.to_string(), "ForallLoc");
        assert_eq!(check_subtype_derivation(SystemId::Kt, d), Ok(()));
        assert_eq!(r.depth_used as usize, d.height());
    }

    #[test]
    fn top_by_refl_at_depth_one() {
        let r = search_subtype(SystemId::Kt, &Context::new(), &Type::Top, &Type::Top, 1).unwrap();
        assert_eq!(r.derivation().unwrap().rule.to_string(), "Refl");
        assert_eq!(r.depth_used, 1);
    }

    #[test]
    fn top_style_does_not_reach_kernel() {
        let r = search_subtype(
            SystemId::Kt,
            &Context::new(),
            &ty("forall_t Z . Z"),
            &ty("forall_k Z . Z"),
            12,
        )
        .unwrap();
        assert_eq!(r.outcome, SearchOutcome::NotFoundWithinDepth);
        assert_eq!(r.depth_used, 12);
    }

    #[test]
    fn trans_through_variable_chain() {
        let ctx = x_ctx()
            .with_type_var("W", Type::var("X"))
            .with_type_var("V", Type::var("W"));
        let r = search_subtype(SystemId::Kernel, &ctx, &Type::var("V"), &Type::var("X"), 4).unwrap();
        let d = r.derivation().unwrap();
        assert_eq!(d.rule.to_string(), "Trans");
        assert_eq!(check_subtype_derivation(SystemId::Kernel, d), Ok(()));
        assert!(
            !search_subtype(SystemId::Kernel, &ctx, &Type::var("V"), &Type::var("X"), 1)
                .unwrap()
                .found()
        );
        assert_eq!(r.depth_used, 2);
    }

    #[test]
    fn orig_rebounds_and_meets_intro() {
        let ctx = x_ctx();
        let r = search_subtype(
            SystemId::FsubOrig,
            &ctx,
            &ty("forall Z <: Top . Z"),
            &ty("forall Z <: X . Z"),
            6,
        )
        .unwrap();
        assert_eq!(
            check_subtype_derivation(SystemId::FsubOrig, r.derivation().unwrap()),
            Ok(())
        );
        let ctx = Context::new()
            .with_type_var("X", Type::Top)
            .with_type_var("W", Type::Top);
        let r = search_subtype(SystemId::Fwedge, &ctx, &ty("X /\\ W"), &ty("W /\\ X"), 6).unwrap();
        assert_eq!(
            check_subtype_derivation(SystemId::Fwedge, r.derivation().unwrap()),
            Ok(())
        );
    }

    #[test]
    fn ill_formed_query_is_invalid_input() {
        let r = search_subtype(SystemId::Kernel, &Context::new(), &ty("forall_t Z . Z"), &Type::Top, 4);
        assert!(matches!(r, Err(SearchError::InvalidInput(_))));
        let r = search_subtype(SystemId::Kt, &Context::new(), &Type::var("Q"), &Type::Top, 4);
        assert!(matches!(r, Err(SearchError::InvalidInput(_))));
    }

    #[test]
    fn session_matches_fresh_searches() {
        let ctx = x_ctx();
        let mut session = SearchSession::new(SystemId::Kt, &ctx, 10).unwrap();
        let pairs = [
            ("forall_k Z <: X . Z -> Z", "forall_t Z <: X . Z -> X"),
            ("X -> X", "Top -> X"),
            ("Top -> X", "X -> Top"),
            ("forall_k Z . Z", "forall_t Z . Z"),
        ];
        for (a, b) in pairs {
            let fresh = search_subtype(SystemId::Kt, &ctx, &ty(a), &ty(b), 10).unwrap();
            let shared = session.search(&ty(a), &ty(b)).unwrap();
            assert_eq!(fresh.found(), shared.found(), "{a} <: {b}");
            assert_eq!(fresh.depth_used, shared.depth_used);
            assert_eq!(fresh.derivation(), shared.derivation());
        }
    }
}
