//! The five rule systems, each a [`RuleSystem`] registered by name.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::syntax::Flavor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    Kt,
    Kernel,
    Ftop,
    FsubOrig,
    Fwedge,
}

impl SystemId {
    pub const ALL: [SystemId; 5] = [
        SystemId::Kt,
        SystemId::Kernel,
        SystemId::Ftop,
        SystemId::FsubOrig,
        SystemId::Fwedge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SystemId::Kt => "kt",
            SystemId::Kernel => "kernel",
            SystemId::Ftop => "ftop",
            SystemId::FsubOrig => "fsub-orig",
            SystemId::Fwedge => "fwedge",
        }
    }

    pub fn rules(self) -> &'static dyn RuleSystem {
        match self {
            SystemId::Kt => &Kt,
            SystemId::Kernel => &Kernel,
            SystemId::Ftop => &Ftop,
            SystemId::FsubOrig => &FsubOrig,
            SystemId::Fwedge => &Fwedge,
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown system `{0}` (expected kt, kernel, ftop, fsub-orig or fwedge)")]
pub struct UnknownSystem(pub String);

impl FromStr for SystemId {
    type Err = UnknownSystem;

    fn from_str(s: &str) -> Result<SystemId, UnknownSystem> {
        SystemId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| UnknownSystem(s.to_string()))
    }
}

/// Declarative subtyping rules across all systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubRule {
    Var,
    Top,
    Refl,
    Trans,
    Arrow,
    ForallFun,
    ForallLoc,
    ForallTop,
    ForallOrig,
    MeetL,
    MeetR,
    MeetIntro,
}

impl SubRule {
    pub const ALL: [SubRule; 12] = [
        SubRule::Var,
        SubRule::Top,
        SubRule::Refl,
        SubRule::Trans,
        SubRule::Arrow,
        SubRule::ForallFun,
        SubRule::ForallLoc,
        SubRule::ForallTop,
        SubRule::ForallOrig,
        SubRule::MeetL,
        SubRule::MeetR,
        SubRule::MeetIntro,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubRule::Var => "Var",
            SubRule::Top => "Top",
            SubRule::Refl => "Refl",
            SubRule::Trans => "Trans",
            SubRule::Arrow => "Arrow",
            SubRule::ForallFun => "ForallFun",
            SubRule::ForallLoc => "ForallLoc",
            SubRule::ForallTop => "ForallTop",
            SubRule::ForallOrig => "ForallOrig",
            SubRule::MeetL => "MeetL",
            SubRule::MeetR => "MeetR",
            SubRule::MeetIntro => "MeetIntro",
        }
    }
}

const CORE: [SubRule; 5] = [
    SubRule::Var,
    SubRule::Top,
    SubRule::Refl,
    SubRule::Trans,
    SubRule::Arrow,
];

/// One declarative calculus: which syntax it admits and which rules it uses.
pub trait RuleSystem: Send + Sync {
    fn id(&self) -> SystemId;

    fn name(&self) -> &'static str {
        self.id().as_str()
    }

    fn description(&self) -> &'static str;

    /// Quantifier flavors allowed in types of this system.
    fn flavors(&self) -> &'static [Flavor];

    fn allows_meet(&self) -> bool {
        false
    }

    /// Quantifiers in types must be bounded by `Top` (contexts are unrestricted).
    fn unbounded_quantifiers(&self) -> bool {
        false
    }

    fn subtype_rules(&self) -> &'static [SubRule];

    fn allows_rule(&self, rule: SubRule) -> bool {
        self.subtype_rules().contains(&rule)
    }

    /// Flavor concluded by type abstraction.
    fn intro_flavor(&self) -> Flavor;

    /// Flavor consumed by type application.
    fn elim_flavor(&self) -> Flavor;

    /// Whether the syntax-directed subtyping algorithm applies.
    fn has_algorithm(&self) -> bool;

    fn allows_flavor(&self, flavor: Flavor) -> bool {
        self.flavors().contains(&flavor)
    }
}

impl fmt::Debug for dyn RuleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub struct Kt;
pub struct Kernel;
pub struct Ftop;
pub struct FsubOrig;
pub struct Fwedge;

impl RuleSystem for Kt {
    fn id(&self) -> SystemId {
        SystemId::Kt
    }
    fn description(&self) -> &'static str {
        "decorated quantifiers forall_k and forall_t"
    }
    fn flavors(&self) -> &'static [Flavor] {
        &[Flavor::Kernel, Flavor::TopStyle]
    }
    fn subtype_rules(&self) -> &'static [SubRule] {
        static R: [SubRule; 8] = [
            CORE[0],
            CORE[1],
            CORE[2],
            CORE[3],
            CORE[4],
            SubRule::ForallFun,
            SubRule::ForallLoc,
            SubRule::ForallTop,
        ];
        &R
    }
    fn intro_flavor(&self) -> Flavor {
        Flavor::Kernel
    }
    fn elim_flavor(&self) -> Flavor {
        Flavor::TopStyle
    }
    fn has_algorithm(&self) -> bool {
        true
    }
}

impl RuleSystem for Kernel {
    fn id(&self) -> SystemId {
        SystemId::Kernel
    }
    fn description(&self) -> &'static str {
        "forall_k only, quantifiers compared at equal bounds"
    }
    fn flavors(&self) -> &'static [Flavor] {
        &[Flavor::Kernel]
    }
    fn subtype_rules(&self) -> &'static [SubRule] {
        static R: [SubRule; 6] = [CORE[0], CORE[1], CORE[2], CORE[3], CORE[4], SubRule::ForallFun];
        &R
    }
    fn intro_flavor(&self) -> Flavor {
        Flavor::Kernel
    }
    fn elim_flavor(&self) -> Flavor {
        Flavor::Kernel
    }
    fn has_algorithm(&self) -> bool {
        true
    }
}

impl RuleSystem for Ftop {
    fn id(&self) -> SystemId {
        SystemId::Ftop
    }
    fn description(&self) -> &'static str {
        "forall_t only, bodies compared under a Top bound"
    }
    fn flavors(&self) -> &'static [Flavor] {
        &[Flavor::TopStyle]
    }
    fn subtype_rules(&self) -> &'static [SubRule] {
        static R: [SubRule; 6] = [CORE[0], CORE[1], CORE[2], CORE[3], CORE[4], SubRule::ForallTop];
        &R
    }
    fn intro_flavor(&self) -> Flavor {
        Flavor::TopStyle
    }
    fn elim_flavor(&self) -> Flavor {
        Flavor::TopStyle
    }
    fn has_algorithm(&self) -> bool {
        true
    }
}

impl RuleSystem for FsubOrig {
    fn id(&self) -> SystemId {
        SystemId::FsubOrig
    }
    fn description(&self) -> &'static str {
        "undecorated bounded quantifiers with rebounding"
    }
    fn flavors(&self) -> &'static [Flavor] {
        &[Flavor::Plain]
    }
    fn subtype_rules(&self) -> &'static [SubRule] {
        static R: [SubRule; 6] = [CORE[0], CORE[1], CORE[2], CORE[3], CORE[4], SubRule::ForallOrig];
        &R
    }
    fn intro_flavor(&self) -> Flavor {
        Flavor::Plain
    }
    fn elim_flavor(&self) -> Flavor {
        Flavor::Plain
    }
    fn has_algorithm(&self) -> bool {
        false
    }
}

impl RuleSystem for Fwedge {
    fn id(&self) -> SystemId {
        SystemId::Fwedge
    }
    fn description(&self) -> &'static str {
        "unbounded quantifiers with binary meets"
    }
    fn flavors(&self) -> &'static [Flavor] {
        &[Flavor::Plain]
    }
    fn allows_meet(&self) -> bool {
        true
    }
    fn unbounded_quantifiers(&self) -> bool {
        true
    }
    fn subtype_rules(&self) -> &'static [SubRule] {
        static R: [SubRule; 9] = [
            CORE[0],
            CORE[1],
            CORE[2],
            CORE[3],
            CORE[4],
            SubRule::ForallOrig,
            SubRule::MeetL,
            SubRule::MeetR,
            SubRule::MeetIntro,
        ];
        &R
    }
    fn intro_flavor(&self) -> Flavor {
        Flavor::Plain
    }
    fn elim_flavor(&self) -> Flavor {
        Flavor::Plain
    }
    fn has_algorithm(&self) -> bool {
        false
    }
}

/// Rule systems looked up by name.
pub struct Registry {
    systems: BTreeMap<&'static str, Box<dyn RuleSystem>>,
}

impl Registry {
    pub fn empty() -> Registry {
        Registry {
            systems: BTreeMap::new(),
        }
    }

    /// All five built-in systems.
    pub fn standard() -> Registry {
        let mut r = Registry::empty();
        r.register(Box::new(Kt));
        r.register(Box::new(Kernel));
        r.register(Box::new(Ftop));
        r.register(Box::new(FsubOrig));
        r.register(Box::new(Fwedge));
        r
    }

    pub fn register(&mut self, system: Box<dyn RuleSystem>) {
        self.systems.insert(system.name(), system);
    }

    pub fn get(&self, name: &str) -> Option<&dyn RuleSystem> {
        self.systems.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.systems.keys().copied()
    }
}
