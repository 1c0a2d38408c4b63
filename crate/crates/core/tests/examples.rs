//! Worked examples for each public operation, run through the crate API.

use boundq::algo::{algo_subtype, expose, minimal_type, typecheck, AlgoOutcome};
use boundq::check::{check_equality_derivation, check_subtype_derivation, check_typing_derivation, CheckErrorKind};
use boundq::deriv::{EqRule, TyRule};
use boundq::encode::{encode_term, encode_type, verify_lemma_instance, LemmaId, LemmaInstance, LemmaOutcome};
use boundq::fragments::{classify_type, elaborate_ftop_typing, elaborate_kernel, enumerate_types, ElabError, Fragment};
use boundq::oracle::{search_subtype, SearchOutcome};
use boundq::surface::{parse_source, parse_term, parse_type, print_type, Payload, SourceError};
use boundq::wf::{wf_context, wf_type, WfError};
use boundq::{Context, Derivation, Judgment, Name, RuleId, SubRule, SystemId, Term, Type};

fn ty(s: &str) -> Type {
    parse_type(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn tm(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn ctx(s: &str) -> Context {
    boundq::surface::parse_context(s).unwrap()
}

fn names(v: &[&str]) -> std::collections::BTreeSet<Name> {
    v.iter().map(|s| Name::from(*s)).collect()
}

const U: &str = "(tfun (Y <: Top) => tfun (Z <: X) => fun (y : Y) => y) [X]";
const GHELLI: &str = "tfun (Z <: X) => fun (y : Z) => y";

#[test]
fn free_variables() {
    assert!(Type::Top.free_vars().is_empty());
    assert_eq!(ty("X -> Y").free_vars(), names(&["X", "Y"]));
    assert_eq!(ty("forall_k X <: Top . X -> Y").free_vars(), names(&["Y"]));
}

#[test]
fn substitution() {
    let x = Name::from("X");
    assert_eq!(ty("X -> Y").subst(&x, &Type::Top), ty("Top -> Y"));
    assert_eq!(
        ty("forall_k Z <: X . Z -> X").subst(&x, &ty("S")),
        ty("forall_k Z <: S . Z -> S")
    );
    let captured = ty("forall_k Y <: Top . X").subst(&x, &ty("Y"));
    assert_eq!(captured, ty("forall_k W <: Top . Y"));
    assert_ne!(print_type(&captured), "forall_k Y <: Top . Y");
}

#[test]
fn mixed_substitution() {
    let x = Name::from("X");
    let (a, b) = (ty("A"), ty("B"));
    assert_eq!(ty("X -> X").mixed_subst(&x, &a, &b), ty("A -> B"));
    assert_eq!(ty("(X -> X) -> X").mixed_subst(&x, &a, &b), ty("(B -> A) -> B"));
    assert_eq!(Type::Top.mixed_subst(&x, &a, &b), Type::Top);
}

#[test]
fn substitution_in_terms() {
    let z = Name::from("Z");
    assert_eq!(
        tm("fun (y : Z) => y").subst_type(&z, &ty("Z /\\ X")),
        tm("fun (y : Z /\\ X) => y")
    );
    assert_eq!(Term::Top.subst_type(&z, &ty("S")), Term::Top);
    assert_eq!(tm("t [Z]").subst_type(&z, &ty("S")), tm("t [S]"));
}

#[test]
fn alpha_equivalence() {
    assert_eq!(ty("forall_k X <: Top . X"), ty("forall_k Y <: Top . Y"));
    assert_ne!(ty("forall_k X <: Top . X"), ty("forall_t X <: Top . X"));
    assert_ne!(ty("X"), ty("Y"));
}

#[test]
fn beta_normal_forms() {
    assert!(!tm(U).is_beta_normal());
    assert!(tm(GHELLI).is_beta_normal());
    assert!(tm("f x").is_beta_normal());
    assert_eq!(
        tm(U).beta_normalize(100).unwrap(),
        tm("tfun (Z <: X) => fun (y : X) => y")
    );
    assert_eq!(tm("(fun (x : Top) => x) top").beta_normalize(100).unwrap(), Term::Top);
    assert_eq!(tm(GHELLI).beta_normalize(100).unwrap(), tm(GHELLI));
}

#[test]
fn source_units() {
    let u = parse_source("system kt; ctx X <: Top; sub forall_k Z <: X . Z -> Z <: forall_t Z <: X . Z -> X").unwrap();
    assert_eq!(
        u.payload,
        Payload::Sub {
            lhs: ty("forall_k Z <: X . Z -> Z"),
            rhs: ty("forall_t Z <: X . Z -> X")
        }
    );
    let m = parse_source("system fwedge; ctx; sub Top /\\ Top <: Top").unwrap();
    assert!(matches!(
        m.payload,
        Payload::Sub {
            lhs: Type::Meet(..),
            ..
        }
    ));
    assert!(matches!(
        parse_source("system kernel; ctx; sub Top /\\ Top <: Top"),
        Err(SourceError::SystemMismatch { .. })
    ));
    assert_eq!(print_type(&ty("forall_k X <: Top . X")), "forall_k X <: Top . X");
    assert_eq!(print_type(&Type::meet(ty("X"), ty("S"))), "X /\\ S");
}

#[test]
fn well_formedness() {
    let kt = SystemId::Kt.rules();
    assert_eq!(wf_type(&ctx("X <: Top"), &ty("forall_k Z <: X . Z"), kt), Ok(()));
    assert_eq!(
        wf_type(&Context::new(), &ty("X"), kt),
        Err(WfError::UnboundVariable(Name::from("X")))
    );
    let twice = Context::new()
        .with_type_var("X", Type::Top)
        .with_type_var("X", Type::Top);
    assert_eq!(wf_context(&twice, kt), Err(WfError::DuplicateBinding(Name::from("X"))));
}

fn loc_first() -> Derivation {
    let g = ctx("X <: Top");
    let gz = ctx("X <: Top, Z <: X");
    Derivation::sub(
        SubRule::ForallLoc,
        &g,
        ty("forall_k Z <: X . Z -> Z"),
        ty("forall_t Z <: X . Z -> Z"),
        vec![
            Derivation::sub(SubRule::Refl, &g, ty("X"), ty("X"), vec![]),
            Derivation::sub(SubRule::Refl, &gz, ty("Z -> Z"), ty("Z -> Z"), vec![]),
        ],
    )
}

#[test]
fn subtyping_derivations() {
    assert_eq!(check_subtype_derivation(SystemId::Kt, &loc_first()), Ok(()));
    let mut bad = loc_first();
    bad.conclusion = Judgment::subtype(
        &ctx("X <: Top"),
        ty("forall_k Z <: X . Z -> Z"),
        ty("forall_k Z <: X . Z -> X"),
    );
    assert!(matches!(
        check_subtype_derivation(SystemId::Kt, &bad).unwrap_err().kind,
        CheckErrorKind::RuleMismatch(_)
    ));
    let g = ctx("A <: Top, B <: Top");
    let meet = Derivation::sub(SubRule::MeetL, &g, ty("A /\\ B"), ty("A"), vec![]);
    assert_eq!(check_subtype_derivation(SystemId::Fwedge, &meet), Ok(()));
}

#[test]
fn typing_derivations() {
    let g = ctx("X <: Top");
    let d = typecheck(&g, &tm(GHELLI), &ty("forall_t Z <: X . Z -> X"))
        .unwrap()
        .derivation;
    assert_eq!(d.rule, RuleId::Ty(TyRule::Sub));
    assert_eq!(d.premises[0].rule, RuleId::Ty(TyRule::ForallI));
    assert_eq!(check_typing_derivation(SystemId::Kt, &d), Ok(()));

    let mut wrong = d.premises[0].clone();
    wrong.conclusion = Judgment::typing(&g, tm(GHELLI), ty("forall_t Z <: X . Z -> Z"));
    assert!(matches!(
        check_typing_derivation(SystemId::Kt, &wrong).unwrap_err().kind,
        CheckErrorKind::RuleMismatch(_)
    ));

    let gx = Context::new().with_term_var("x", ty("Top"));
    let var = Derivation::typing(TyRule::Var, &gx, tm("x"), Type::Top, vec![]);
    assert_eq!(check_typing_derivation(SystemId::Kt, &var), Ok(()));
}

#[test]
fn equality_derivations() {
    let g = Context::new();
    let gx = g.clone().with_term_var("x", Type::Top);
    let beta = Derivation::new(
        RuleId::Eq(EqRule::Beta1),
        Judgment::equality(&g, tm("(fun (x : Top) => x) top"), Term::Top, Type::Top),
        vec![
            Derivation::typing(TyRule::Var, &gx, tm("x"), Type::Top, vec![]),
            Derivation::typing(TyRule::Top, &g, Term::Top, Type::Top, vec![]),
        ],
    );
    assert_eq!(check_equality_derivation(SystemId::Kt, &beta), Ok(()));
    let sym = Derivation::new(
        RuleId::Eq(EqRule::Sym),
        Judgment::equality(&g, tm("(fun (x : Top) => x) top"), Term::Top, Type::Top),
        vec![beta],
    );
    assert!(check_equality_derivation(SystemId::Kt, &sym).is_err());
}

#[test]
fn oracle_examples() {
    let g = ctx("X <: Top");
    let r = search_subtype(
        SystemId::Kt,
        &g,
        &ty("forall_k Z <: X . Z -> Z"),
        &ty("forall_t Z <: X . Z -> X"),
        8,
    )
    .unwrap();
    let d = r.derivation().unwrap();
    assert_eq!(d.rule, RuleId::Sub(SubRule::ForallLoc));
    assert_eq!(check_subtype_derivation(SystemId::Kt, d), Ok(()));

    let r = search_subtype(SystemId::Kt, &Context::new(), &Type::Top, &Type::Top, 1).unwrap();
    assert_eq!(r.derivation().unwrap().rule, RuleId::Sub(SubRule::Refl));

    let (s, t) = (ty("forall_t Z <: Top . Z"), ty("forall_k Z <: Top . Z"));
    let r = search_subtype(SystemId::Kt, &Context::new(), &s, &t, 12).unwrap();
    assert_eq!(r.outcome, SearchOutcome::NotFoundWithinDepth);
    assert!(!algo_subtype(&Context::new(), &s, &t).accepted());
}

#[test]
fn exposure() {
    assert_eq!(expose(&Context::new(), &ty("S -> T")), ty("S -> T"));
    assert_eq!(expose(&ctx("X <: Top, Y <: X"), &ty("Y")), Type::Top);
    assert_eq!(expose(&ctx("X <: Top -> Top"), &ty("X")), ty("Top -> Top"));
}

#[test]
fn algorithmic_subtyping() {
    let g = ctx("X <: Top");
    assert!(algo_subtype(&g, &ty("forall_k Z <: X . Z -> Z"), &ty("forall_t Z <: X . Z -> X")).accepted());
    let r = algo_subtype(&g, &ty("forall_k Z <: X . X -> Z"), &Type::Top);
    assert_eq!(r.outcome, AlgoOutcome::Accepted);
    assert_eq!(r.trace.step_count, 1);
    assert!(!algo_subtype(
        &Context::new(),
        &ty("forall_t Z <: Top . Z"),
        &ty("forall_k Z <: Top . Z")
    )
    .accepted());
}

#[test]
fn minimal_types_and_typechecking() {
    let g = ctx("X <: Top");
    assert_eq!(
        minimal_type(&g, &tm(GHELLI)).ty(),
        Some(&ty("forall_k Z <: X . Z -> Z"))
    );
    assert_eq!(minimal_type(&g, &tm(U)).ty(), Some(&ty("forall_k Z <: X . X -> X")));
    assert_eq!(minimal_type(&Context::new(), &Term::Top).ty(), Some(&Type::Top));

    assert!(typecheck(&g, &tm(U), &ty("forall_t Z <: X . Z -> X")).is_ok());
    assert!(typecheck(&g, &tm(GHELLI), &ty("forall_t Z <: X . Z -> Z")).is_ok());
    assert!(typecheck(&g, &tm(GHELLI), &ty("forall_t Z <: X . Z -> X")).is_ok());
    let gx = Context::new().with_term_var("x", Type::Top);
    assert!(typecheck(&gx, &tm("x"), &ty("Top -> Top")).is_err());
}

#[test]
fn fragments() {
    let f = classify_type(&ty("forall_t Z <: X . Z -> Z"));
    assert!(!f.is_kernel && f.is_ftop && f.is_minimal_for_ftop);
    let f = classify_type(&ty("forall_k Z <: X . X -> X"));
    assert!(f.is_kernel && !f.is_ftop && f.is_minimal_for_ftop);
    let f = classify_type(&ty("forall_k Z <: (forall_k Y <: Top . Y) . Top"));
    assert!(f.is_kernel && !f.is_ftop && !f.is_minimal_for_ftop);
}

#[test]
fn elaboration() {
    let g = ctx("X <: Top");
    let d = elaborate_ftop_typing(&g, &tm(GHELLI), &ty("forall_t Z <: X . Z -> X")).unwrap();
    assert_eq!(check_typing_derivation(SystemId::Ftop, &d), Ok(()));
    let top = elaborate_ftop_typing(&Context::new(), &Term::Top, &Type::Top).unwrap();
    assert_eq!(top.node_count(), 1);
    assert!(matches!(
        elaborate_ftop_typing(&g, &tm(U), &ty("forall_t Z <: X . Z -> X")),
        Err(ElabError::PreconditionViolated(_))
    ));

    let id = elaborate_kernel(
        &Context::new(),
        &tm("tfun (X <: Top) => fun (x : X) => x"),
        &ty("forall_k X <: Top . X -> X"),
    )
    .unwrap();
    assert_eq!(check_typing_derivation(SystemId::Kernel, &id), Ok(()));
    let k = elaborate_kernel(&g, &tm(GHELLI), &ty("forall_k Z <: X . Z -> Z")).unwrap();
    assert_eq!(check_typing_derivation(SystemId::Kernel, &k), Ok(()));
    assert!(matches!(
        elaborate_kernel(&g, &tm(GHELLI), &ty("forall_t Z <: X . Z -> Z")),
        Err(ElabError::PreconditionViolated(_))
    ));
}

#[test]
fn enumeration() {
    assert_eq!(enumerate_types(&Context::new(), 1, None), vec![Type::Top]);
    let two = enumerate_types(&ctx("X <: Top"), 2, None);
    assert_eq!(&two[..2], &[Type::Top, ty("X")]);
    assert!(enumerate_types(&ctx("X <: Top"), 8, Some(Fragment::Ftop))
        .contains(&ty("forall_t Y <: Top . forall_t Z <: X . Y -> Y")));
}

#[test]
fn encoding() {
    assert_eq!(
        encode_type(&ty("forall_k X <: S . X -> X")),
        ty("forall X . (X /\\ S) -> (X /\\ S)")
    );
    assert_eq!(
        encode_type(&ty("forall_t X <: S . X -> X")),
        ty("forall X . (X /\\ S) -> X")
    );
    assert_eq!(encode_type(&ty("forall_k X <: Top . Top")), ty("forall X . Top"));
    assert_eq!(
        encode_term(&tm(GHELLI)),
        tm("tfun (Z <: Top) => fun (y : Z /\\ X) => y")
    );
    assert_eq!(encode_term(&tm("fun (x : Top) => x")), tm("fun (x : Top) => x"));
    assert_eq!(
        encode_term(&tm("tfun (X <: Top) => fun (x : X) => x")),
        tm("tfun (X <: Top) => fun (x : X /\\ Top) => x")
    );
}

#[test]
fn lemma_instances() {
    let loc = LemmaInstance::new(
        LemmaId::Loc,
        ctx("A <: Top"),
        [
            ("S0", ty("A")),
            ("T0", ty("A")),
            ("S1", ty("X -> X")),
            ("T1", ty("X -> A")),
        ],
    );
    let r = verify_lemma_instance(&loc, 16).unwrap();
    assert!(r.discharged());
    assert_eq!(
        r.conclusion,
        Judgment::subtype(
            &ctx("A <: Top"),
            ty("forall X . (X /\\ A) -> (X /\\ A)"),
            ty("forall X . (X /\\ A) -> A")
        )
    );
    let top = LemmaInstance::new(
        LemmaId::TopRule,
        Context::new(),
        [("S", Type::Top), ("S'", ty("Top -> Top")), ("T", ty("X -> X"))],
    );
    let r = verify_lemma_instance(&top, 16).unwrap();
    assert_eq!(
        r.conclusion,
        Judgment::subtype(
            &Context::new(),
            ty("forall X . (X /\\ Top) -> X"),
            ty("forall X . (X /\\ (Top -> Top)) -> X")
        )
    );
    assert!(r.discharged());
    let t = ty("(X -> X) -> X");
    let mono = LemmaInstance::new(
        LemmaId::MixedMono,
        ctx("A <: Top"),
        [
            ("S_-", ty("A")),
            ("S_+", Type::Top),
            ("S_-'", ty("A")),
            ("S_+'", Type::Top),
            ("T", t),
        ],
    );
    match verify_lemma_instance(&mono, 16).unwrap().outcome {
        LemmaOutcome::Discharged(s) => assert_eq!(s.derivation().unwrap().rule, RuleId::Sub(SubRule::Refl)),
        other => panic!("{other:?}"),
    }
}
