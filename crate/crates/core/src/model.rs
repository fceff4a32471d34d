//! TCP-net structure: variables, CPTs, importance arcs and CITs, plus the
//! assignment and constraint types shared by the analysis modules.
//!
//! Nets are described by name in a [`NetDraft`], checked with [`validate`]
//! and turned into an immutable, index-based [`TcpNet`] by
//! [`NetDraft::build`]. Variables of a built net are sorted by name, so
//! [`VarId`] order is name order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Index of a variable inside one particular [`TcpNet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcKind {
    Cp,
    I,
    Ci,
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcKind::Cp => "cp",
            ArcKind::I => "i",
            ArcKind::Ci => "ci",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
    #[error("value {value} is not in the domain of {variable}")]
    UnknownValue { variable: String, value: String },
    #[error("variable {0} assigned more than once")]
    DuplicateAssignment(String),
    #[error("outcome does not assign {0}")]
    Unassigned(String),
    #[error("constraint over ({scope}): {reason}")]
    BadConstraint { scope: String, reason: String },
}

// ---------------------------------------------------------------------------
// Name-level description
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Vec<String>,
}

/// One CPT row: the parent assignment it applies to and the ranking of the
/// subject's values, best first. Each tier should hold exactly one value;
/// tiers with several values are ties and are rejected by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CptRowDecl {
    pub condition: Vec<(String, String)>,
    pub order: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CptDecl {
    pub subject: String,
    pub rows: Vec<CptRowDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CiArcDecl {
    pub endpoints: (String, String),
    pub selector: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CitRowDecl {
    pub condition: Vec<(String, String)>,
    pub more_important: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CitDecl {
    pub endpoints: (String, String),
    pub rows: Vec<CitRowDecl>,
}

/// Name-based TCP-net description. May be ill-formed; see [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NetDraft {
    pub variables: Vec<VariableSpec>,
    pub cp_arcs: Vec<(String, String)>,
    pub i_arcs: Vec<(String, String)>,
    pub ci_arcs: Vec<CiArcDecl>,
    pub cpts: Vec<CptDecl>,
    pub cits: Vec<CitDecl>,
}

fn owned_pairs(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

impl NetDraft {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(mut self, name: &str, domain: &[&str]) -> Self {
        self.variables.push(VariableSpec {
            name: name.into(),
            domain: domain.iter().map(|v| v.to_string()).collect(),
        });
        self
    }

    pub fn cp(mut self, from: &str, to: &str) -> Self {
        self.cp_arcs.push((from.into(), to.into()));
        self
    }

    pub fn iarc(mut self, more: &str, less: &str) -> Self {
        self.i_arcs.push((more.into(), less.into()));
        self
    }

    pub fn ci(mut self, a: &str, b: &str, selector: &[&str]) -> Self {
        self.ci_arcs.push(CiArcDecl {
            endpoints: (a.into(), b.into()),
            selector: selector.iter().map(|v| v.to_string()).collect(),
        });
        self
    }

    /// Adds a strict CPT row, creating the table on first use.
    pub fn cpt(mut self, subject: &str, condition: &[(&str, &str)], order: &[&str]) -> Self {
        let row = CptRowDecl {
            condition: owned_pairs(condition),
            order: order.iter().map(|v| vec![v.to_string()]).collect(),
        };
        match self.cpts.iter_mut().find(|c| c.subject == subject) {
            Some(table) => table.rows.push(row),
            None => self.cpts.push(CptDecl {
                subject: subject.into(),
                rows: vec![row],
            }),
        }
        self
    }

    /// Adds a CIT row for the ci-arc `{a, b}`, creating the table on first use.
    pub fn cit(mut self, a: &str, b: &str, condition: &[(&str, &str)], more_important: &str) -> Self {
        let row = CitRowDecl {
            condition: owned_pairs(condition),
            more_important: more_important.into(),
        };
        let key = unordered(a, b);
        match self
            .cits
            .iter_mut()
            .find(|c| unordered(&c.endpoints.0, &c.endpoints.1) == key)
        {
            Some(table) => table.rows.push(row),
            None => self.cits.push(CitDecl {
                endpoints: (a.into(), b.into()),
                rows: vec![row],
            }),
        }
        self
    }

    pub fn build(&self) -> Result<TcpNet, ValidationReport> {
        let report = validate(self);
        if !report.is_empty() {
            return Err(report);
        }
        Ok(TcpNet::from_valid_draft(self))
    }
}

fn unordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// A single well-formedness problem. [`Violation::code`] is a stable,
/// human-readable category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateVariable { name: String },
    SmallDomain { variable: String },
    DuplicateValue { variable: String, value: String },
    UnknownVariable { context: String, name: String },
    UnknownValue { context: String, variable: String, value: String },
    SelfArc { kind: ArcKind, variable: String },
    DuplicateArc { kind: ArcKind, from: String, to: String },
    CpParentMismatch { variable: String, arcs: Vec<String>, parents: Vec<String> },
    DuplicateImportance { a: String, b: String },
    MissingCpt { variable: String },
    DuplicateCpt { variable: String },
    CptConditionMismatch { variable: String, expected: Vec<String>, found: Vec<String> },
    MissingCptRow { variable: String, condition: Vec<(String, String)> },
    DuplicateCptRow { variable: String, condition: Vec<(String, String)> },
    CptTie { variable: String, condition: Vec<(String, String)> },
    CptRowNotPermutation { variable: String, condition: Vec<(String, String)> },
    EmptySelector { a: String, b: String },
    SelectorOverlapsEndpoint { a: String, b: String, variable: String },
    DuplicateSelectorVariable { a: String, b: String, variable: String },
    MissingCit { a: String, b: String },
    DuplicateCit { a: String, b: String },
    CitWithoutCiArc { a: String, b: String },
    CitConditionMismatch { a: String, b: String, found: Vec<String> },
    DuplicateCitRow { a: String, b: String, condition: Vec<(String, String)> },
    BadOrientation { a: String, b: String, named: String },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::DuplicateVariable { .. } => "duplicate variable",
            Violation::SmallDomain { .. } => "domain too small",
            Violation::DuplicateValue { .. } => "duplicate domain value",
            Violation::UnknownVariable { .. } => "unknown variable",
            Violation::UnknownValue { .. } => "unknown value",
            Violation::SelfArc { .. } => "self arc",
            Violation::DuplicateArc { .. } => "duplicate arc",
            Violation::CpParentMismatch { .. } => "cp-arc/parent mismatch",
            Violation::DuplicateImportance { .. } => "duplicate importance relation",
            Violation::MissingCpt { .. } => "missing cpt",
            Violation::DuplicateCpt { .. } => "duplicate cpt",
            Violation::CptConditionMismatch { .. } => "cpt condition mismatch",
            Violation::MissingCptRow { .. } => "missing cpt row",
            Violation::DuplicateCptRow { .. } => "duplicate cpt row",
            Violation::CptTie { .. } => "cpt tie",
            Violation::CptRowNotPermutation { .. } => "cpt row not a permutation",
            Violation::EmptySelector { .. } => "empty selector",
            Violation::SelectorOverlapsEndpoint { .. } => "selector overlaps endpoint",
            Violation::DuplicateSelectorVariable { .. } => "duplicate selector variable",
            Violation::MissingCit { .. } => "missing cit",
            Violation::DuplicateCit { .. } => "duplicate cit",
            Violation::CitWithoutCiArc { .. } => "cit without ci-arc",
            Violation::CitConditionMismatch { .. } => "cit condition mismatch",
            Violation::DuplicateCitRow { .. } => "duplicate cit row",
            Violation::BadOrientation { .. } => "bad cit orientation",
        }
    }
}

struct Cond<'a>(&'a [(String, String)]);

impl fmt::Display for Cond<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(no condition)");
        }
        for (i, (var, val)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{var}={val}")?;
        }
        Ok(())
    }
}

struct Names<'a>(&'a [String]);

impl fmt::Display for Names<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(n)?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.code())?;
        match self {
            Violation::DuplicateVariable { name } => write!(f, "{name} declared more than once"),
            Violation::SmallDomain { variable } => write!(f, "{variable} needs at least two values"),
            Violation::DuplicateValue { variable, value } => write!(f, "{variable} lists {value} twice"),
            Violation::UnknownVariable { context, name } => write!(f, "{name} referenced by {context}"),
            Violation::UnknownValue { context, variable, value } => {
                write!(f, "{variable}={value} referenced by {context}")
            }
            Violation::SelfArc { kind, variable } => write!(f, "{kind}-arc from {variable} to itself"),
            Violation::DuplicateArc { kind, from, to } => write!(f, "{kind}-arc {from} -> {to} repeated"),
            Violation::CpParentMismatch { variable, arcs, parents } => write!(
                f,
                "cp-arcs into {variable} come from {} but its CPT conditions on {}",
                Names(arcs),
                Names(parents)
            ),
            Violation::DuplicateImportance { a, b } => {
                write!(f, "{a} and {b} carry more than one importance relation")
            }
            Violation::MissingCpt { variable } => write!(f, "{variable} has no CPT"),
            Violation::DuplicateCpt { variable } => write!(f, "{variable} has more than one CPT"),
            Violation::CptConditionMismatch { variable, expected, found } => write!(
                f,
                "a row of {variable} conditions on {} instead of {}",
                Names(found),
                Names(expected)
            ),
            Violation::MissingCptRow { variable, condition } => {
                write!(f, "{variable} has no row for {}", Cond(condition))
            }
            Violation::DuplicateCptRow { variable, condition } => {
                write!(f, "{variable} has several rows for {}", Cond(condition))
            }
            Violation::CptTie { variable, condition } => {
                write!(f, "row {} of {variable} ranks two values equally", Cond(condition))
            }
            Violation::CptRowNotPermutation { variable, condition } => write!(
                f,
                "row {} of {variable} does not rank every value exactly once",
                Cond(condition)
            ),
            Violation::EmptySelector { a, b } => {
                write!(f, "ci-arc {a} ~ {b} has no selector variables (use an i-arc)")
            }
            Violation::SelectorOverlapsEndpoint { a, b, variable } => {
                write!(f, "selector of {a} ~ {b} contains endpoint {variable}")
            }
            Violation::DuplicateSelectorVariable { a, b, variable } => {
                write!(f, "selector of {a} ~ {b} lists {variable} twice")
            }
            Violation::MissingCit { a, b } => write!(f, "ci-arc {a} ~ {b} has no CIT"),
            Violation::DuplicateCit { a, b } => write!(f, "ci-arc {a} ~ {b} has several CITs"),
            Violation::CitWithoutCiArc { a, b } => write!(f, "CIT for {a} ~ {b} without a ci-arc"),
            Violation::CitConditionMismatch { a, b, found } => write!(
                f,
                "a CIT row of {a} ~ {b} conditions on {} instead of the selector",
                Names(found)
            ),
            Violation::DuplicateCitRow { a, b, condition } => {
                write!(f, "CIT of {a} ~ {b} has several rows for {}", Cond(condition))
            }
            Violation::BadOrientation { a, b, named } => {
                write!(f, "CIT of {a} ~ {b} names {named}, which is not an endpoint")
            }
        }
    }
}

/// Every violation found in a draft; empty iff the draft is well-formed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code() == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Checker<'a> {
    domains: BTreeMap<&'a str, &'a [String]>,
    out: Vec<Violation>,
}

impl<'a> Checker<'a> {
    fn known(&mut self, context: &str, name: &str) -> bool {
        if self.domains.contains_key(name) {
            true
        } else {
            self.out.push(Violation::UnknownVariable {
                context: context.into(),
                name: name.into(),
            });
            false
        }
    }

    fn known_value(&mut self, context: &str, var: &str, value: &str) -> bool {
        match self.domains.get(var) {
            Some(dom) if dom.iter().any(|v| v == value) => true,
            Some(_) => {
                self.out.push(Violation::UnknownValue {
                    context: context.into(),
                    variable: var.into(),
                    value: value.into(),
                });
                false
            }
            None => self.known(context, var),
        }
    }
}

/// Checks every structural invariant of a TCP-net description.
pub fn validate(draft: &NetDraft) -> ValidationReport {
    let mut ck = Checker {
        domains: BTreeMap::new(),
        out: Vec::new(),
    };

    for spec in &draft.variables {
        if ck.domains.contains_key(spec.name.as_str()) {
            ck.out.push(Violation::DuplicateVariable {
                name: spec.name.clone(),
            });
            continue;
        }
        if spec.domain.len() < 2 {
            ck.out.push(Violation::SmallDomain {
                variable: spec.name.clone(),
            });
        }
        let mut seen = BTreeSet::new();
        for v in &spec.domain {
            if !seen.insert(v.as_str()) {
                ck.out.push(Violation::DuplicateValue {
                    variable: spec.name.clone(),
                    value: v.clone(),
                });
            }
        }
        ck.domains.insert(spec.name.as_str(), spec.domain.as_slice());
    }

    // Directed arcs.
    let mut cp_into: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut importance: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for (kind, arcs) in [(ArcKind::Cp, &draft.cp_arcs), (ArcKind::I, &draft.i_arcs)] {
        let mut seen = BTreeSet::new();
        for (from, to) in arcs.iter() {
            let context = alloc::format!("{kind}-arc {from} -> {to}");
            let ok_from = ck.known(&context, from);
            let ok_to = ck.known(&context, to);
            if !(ok_from && ok_to) {
                continue;
            }
            if from == to {
                ck.out.push(Violation::SelfArc {
                    kind,
                    variable: from.clone(),
                });
                continue;
            }
            if !seen.insert((from.as_str(), to.as_str())) {
                ck.out.push(Violation::DuplicateArc {
                    kind,
                    from: from.clone(),
                    to: to.clone(),
                });
                continue;
            }
            match kind {
                ArcKind::Cp => {
                    cp_into.entry(to.as_str()).or_default().insert(from.as_str());
                }
                _ => *importance.entry(unordered(from, to)).or_default() += 1,
            }
        }
    }

    // ci-arcs and their selectors.
    let mut ci_selectors: BTreeMap<(&str, &str), &[String]> = BTreeMap::new();
    for arc in &draft.ci_arcs {
        let (a, b) = (&arc.endpoints.0, &arc.endpoints.1);
        let context = alloc::format!("ci-arc {a} ~ {b}");
        let ok_a = ck.known(&context, a);
        let ok_b = ck.known(&context, b);
        if !(ok_a && ok_b) {
            continue;
        }
        if a == b {
            ck.out.push(Violation::SelfArc {
                kind: ArcKind::Ci,
                variable: a.clone(),
            });
            continue;
        }
        let key = unordered(a, b);
        if ci_selectors.contains_key(&key) {
            ck.out.push(Violation::DuplicateArc {
                kind: ArcKind::Ci,
                from: key.0.into(),
                to: key.1.into(),
            });
            continue;
        }
        *importance.entry(key).or_default() += 1;
        if arc.selector.is_empty() {
            ck.out.push(Violation::EmptySelector {
                a: key.0.into(),
                b: key.1.into(),
            });
        }
        let mut seen = BTreeSet::new();
        for z in &arc.selector {
            ck.known(&context, z);
            if z == a || z == b {
                ck.out.push(Violation::SelectorOverlapsEndpoint {
                    a: key.0.into(),
                    b: key.1.into(),
                    variable: z.clone(),
                });
            }
            if !seen.insert(z.as_str()) {
                ck.out.push(Violation::DuplicateSelectorVariable {
                    a: key.0.into(),
                    b: key.1.into(),
                    variable: z.clone(),
                });
            }
        }
        ci_selectors.insert(key, arc.selector.as_slice());
    }
    for ((a, b), count) in &importance {
        if *count > 1 {
            ck.out.push(Violation::DuplicateImportance {
                a: (*a).into(),
                b: (*b).into(),
            });
        }
    }

    // CPTs.
    let mut cpt_by_subject: BTreeMap<&str, &CptDecl> = BTreeMap::new();
    for table in &draft.cpts {
        let context = alloc::format!("cpt of {}", table.subject);
        if !ck.known(&context, &table.subject) {
            continue;
        }
        if cpt_by_subject.insert(table.subject.as_str(), table).is_some() {
            ck.out.push(Violation::DuplicateCpt {
                variable: table.subject.clone(),
            });
        }
    }
    let names: Vec<&str> = ck.domains.keys().copied().collect();
    for name in names {
        let arcs: Vec<String> = cp_into
            .get(name)
            .map(|s| s.iter().map(|p| p.to_string()).collect())
            .unwrap_or_default();
        let Some(table) = cpt_by_subject.get(name).copied() else {
            ck.out.push(Violation::MissingCpt {
                variable: name.into(),
            });
            continue;
        };
        check_cpt(&mut ck, table, &arcs);
    }

    // CITs.
    let mut cit_seen: BTreeSet<(&str, &str)> = BTreeSet::new();
    for table in &draft.cits {
        let (a, b) = (&table.endpoints.0, &table.endpoints.1);
        let key = unordered(a, b);
        let Some(selector) = ci_selectors.get(&key).copied() else {
            ck.out.push(Violation::CitWithoutCiArc {
                a: key.0.into(),
                b: key.1.into(),
            });
            continue;
        };
        if !cit_seen.insert(key) {
            ck.out.push(Violation::DuplicateCit {
                a: key.0.into(),
                b: key.1.into(),
            });
            continue;
        }
        let expected: BTreeSet<&str> = selector.iter().map(|s| s.as_str()).collect();
        let context = alloc::format!("cit of {} ~ {}", key.0, key.1);
        let mut rows_seen = BTreeSet::new();
        for row in &table.rows {
            let found: Vec<&str> = row.condition.iter().map(|(v, _)| v.as_str()).collect();
            let found_set: BTreeSet<&str> = found.iter().copied().collect();
            if found_set != expected || found.len() != found_set.len() {
                ck.out.push(Violation::CitConditionMismatch {
                    a: key.0.into(),
                    b: key.1.into(),
                    found: found.iter().map(|s| s.to_string()).collect(),
                });
                continue;
            }
            let mut values_ok = true;
            for (var, val) in &row.condition {
                values_ok &= ck.known_value(&context, var, val);
            }
            if row.more_important != key.0 && row.more_important != key.1 {
                ck.out.push(Violation::BadOrientation {
                    a: key.0.into(),
                    b: key.1.into(),
                    named: row.more_important.clone(),
                });
            }
            if values_ok && !rows_seen.insert(sorted_condition(&row.condition)) {
                ck.out.push(Violation::DuplicateCitRow {
                    a: key.0.into(),
                    b: key.1.into(),
                    condition: row.condition.clone(),
                });
            }
        }
    }
    for key in ci_selectors.keys() {
        if !cit_seen.contains(key) {
            ck.out.push(Violation::MissingCit {
                a: key.0.into(),
                b: key.1.into(),
            });
        }
    }

    ValidationReport { violations: ck.out }
}

fn sorted_condition(cond: &[(String, String)]) -> Vec<(String, String)> {
    let mut c = cond.to_vec();
    c.sort();
    c
}

fn check_cpt(ck: &mut Checker<'_>, table: &CptDecl, arcs: &[String]) {
    let subject = table.subject.as_str();
    let context = alloc::format!("cpt of {subject}");
    let parents: Vec<String> = match table.rows.first() {
        Some(row) => {
            let mut p: Vec<String> = row.condition.iter().map(|(v, _)| v.clone()).collect();
            p.sort();
            p
        }
        None => Vec::new(),
    };
    if parents != arcs {
        ck.out.push(Violation::CpParentMismatch {
            variable: subject.into(),
            arcs: arcs.to_vec(),
            parents: parents.clone(),
        });
        return;
    }
    let subject_domain: Vec<String> = ck.domains[subject].to_vec();
    let mut rows_seen: BTreeSet<Vec<(String, String)>> = BTreeSet::new();
    for row in &table.rows {
        let mut found: Vec<String> = row.condition.iter().map(|(v, _)| v.clone()).collect();
        found.sort();
        if found != parents {
            ck.out.push(Violation::CptConditionMismatch {
                variable: subject.into(),
                expected: parents.clone(),
                found,
            });
            continue;
        }
        let mut values_ok = true;
        for (var, val) in &row.condition {
            values_ok &= ck.known_value(&context, var, val);
        }
        let key = sorted_condition(&row.condition);
        if values_ok && !rows_seen.insert(key) {
            ck.out.push(Violation::DuplicateCptRow {
                variable: subject.into(),
                condition: row.condition.clone(),
            });
            continue;
        }
        if row.order.iter().any(|tier| tier.len() > 1) {
            ck.out.push(Violation::CptTie {
                variable: subject.into(),
                condition: row.condition.clone(),
            });
            continue;
        }
        let listed: Vec<&String> = row.order.iter().flatten().collect();
        let listed_set: BTreeSet<&String> = listed.iter().copied().collect();
        let domain_set: BTreeSet<&String> = subject_domain.iter().collect();
        if listed.len() != subject_domain.len() || listed_set != domain_set {
            ck.out.push(Violation::CptRowNotPermutation {
                variable: subject.into(),
                condition: row.condition.clone(),
            });
        }
    }
    // Every parent assignment needs a row.
    let parent_domains: Vec<&[String]> = parents
        .iter()
        .map(|p| ck.domains.get(p.as_str()).copied().unwrap_or(&[]))
        .collect();
    let radices: Vec<usize> = parent_domains.iter().map(|d| d.len()).collect();
    for digits in MixedRadix::new(&radices) {
        let cond: Vec<(String, String)> = parents
            .iter()
            .zip(&digits)
            .zip(&parent_domains)
            .map(|((p, &d), dom)| (p.clone(), dom[d].clone()))
            .collect();
        if !rows_seen.contains(&cond) {
            ck.out.push(Violation::MissingCptRow {
                variable: subject.into(),
                condition: cond,
            });
        }
    }
}

/// Iterates all digit vectors of a mixed-radix number, most significant
/// digit first, in lexicographic order. A zero-length radix list yields one
/// empty vector; any zero radix yields nothing.
#[derive(Debug, Clone)]
pub struct MixedRadix {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MixedRadix {
    pub fn new(radices: &[usize]) -> Self {
        let next = if radices.contains(&0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        MixedRadix {
            radices: radices.to_vec(),
            next,
        }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        let mut carried_out = true;
        while i > 0 {
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.radices[i] {
                carried_out = false;
                break;
            }
            succ[i] = 0;
        }
        if !carried_out {
            self.next = Some(succ);
        }
        Some(current)
    }
}

// ---------------------------------------------------------------------------
// Built net
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    name: String,
    domain: Vec<String>,
}

impl Variable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }
}

/// Conditional preference table. Rows are indexed in mixed radix over the
/// parents (first parent most significant); each row lists the subject's
/// values best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpt {
    parents: Vec<VarId>,
    radices: Vec<usize>,
    rows: Vec<Vec<usize>>,
    ranks: Vec<Vec<usize>>,
}

impl Cpt {
    pub(crate) fn new(parents: Vec<VarId>, radices: Vec<usize>, rows: Vec<Vec<usize>>) -> Self {
        let ranks = rows
            .iter()
            .map(|order| {
                let mut rank = vec![0; order.len()];
                for (r, &v) in order.iter().enumerate() {
                    rank[v] = r;
                }
                rank
            })
            .collect();
        Cpt {
            parents,
            radices,
            rows,
            ranks,
        }
    }

    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Row index for the parent values produced by `value_of`.
    pub fn row_index(&self, mut value_of: impl FnMut(VarId) -> usize) -> usize {
        self.parents
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&p, &r)| acc * r + value_of(p))
    }

    pub fn row_for_outcome(&self, o: &Outcome) -> usize {
        self.row_index(|p| o.value(p))
    }

    /// Parent values of a row, aligned with [`Cpt::parents`].
    pub fn row_condition(&self, mut row: usize) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for i in (0..self.radices.len()).rev() {
            digits[i] = row % self.radices[i];
            row /= self.radices[i];
        }
        digits
    }

    pub fn order(&self, row: usize) -> &[usize] {
        &self.rows[row]
    }

    pub fn rank(&self, row: usize, value: usize) -> usize {
        self.ranks[row][value]
    }

    /// `better` strictly precedes `worse` in the given row.
    pub fn prefers(&self, row: usize, better: usize, worse: usize) -> bool {
        self.ranks[row][better] < self.ranks[row][worse]
    }

    pub fn best(&self, row: usize) -> usize {
        self.rows[row][0]
    }
}

/// A ci-arc with its conditional importance table. Endpoints are stored with
/// the lower [`VarId`] first; rows map selector values (aligned with
/// [`CiArc::selector`]) to the more important endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiArc {
    endpoints: (VarId, VarId),
    selector: Vec<VarId>,
    rows: BTreeMap<Vec<usize>, VarId>,
}

impl CiArc {
    pub(crate) fn new(endpoints: (VarId, VarId), selector: Vec<VarId>, rows: BTreeMap<Vec<usize>, VarId>) -> Self {
        let endpoints = if endpoints.0 <= endpoints.1 {
            endpoints
        } else {
            (endpoints.1, endpoints.0)
        };
        CiArc {
            endpoints,
            selector,
            rows,
        }
    }

    pub fn endpoints(&self) -> (VarId, VarId) {
        self.endpoints
    }

    pub fn selector(&self) -> &[VarId] {
        &self.selector
    }

    pub fn rows(&self) -> &BTreeMap<Vec<usize>, VarId> {
        &self.rows
    }

    pub fn other(&self, v: VarId) -> VarId {
        if v == self.endpoints.0 {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }

    /// More important endpoint under the selector values given by `value_of`,
    /// or `None` when the table has no row for them.
    pub fn orientation(&self, mut value_of: impl FnMut(VarId) -> usize) -> Option<VarId> {
        let key: Vec<usize> = self.selector.iter().map(|&z| value_of(z)).collect();
        self.rows.get(&key).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Importance {
    /// Unconditional: `more` ▷ `less`.
    Unconditional { more: VarId, less: VarId },
    /// Conditional; index into [`TcpNet::ci_arcs`].
    Conditional(usize),
}

/// A validated TCP-net. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcpNet {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    i_arcs: BTreeSet<(VarId, VarId)>,
    ci_arcs: Vec<CiArc>,
    importance: BTreeMap<(VarId, VarId), Importance>,
    children: Vec<Vec<VarId>>,
}

impl TcpNet {
    fn from_valid_draft(draft: &NetDraft) -> TcpNet {
        let mut specs: Vec<&VariableSpec> = draft.variables.iter().collect();
        specs.sort_by(|a, b| a.name.cmp(&b.name));
        let variables: Vec<Variable> = specs
            .iter()
            .map(|s| Variable {
                name: s.name.clone(),
                domain: s.domain.clone(),
            })
            .collect();
        let id = |name: &str| VarId(variables.iter().position(|v| v.name == name).unwrap());
        let value = |var: VarId, name: &str| variables[var.0].value_index(name).unwrap();

        let mut cpts = Vec::with_capacity(variables.len());
        for (x, var) in variables.iter().enumerate() {
            let decl = draft.cpts.iter().find(|c| c.subject == var.name).unwrap();
            let mut parents: Vec<VarId> = decl
                .rows
                .first()
                .map(|r| r.condition.iter().map(|(p, _)| id(p)).collect())
                .unwrap_or_default();
            parents.sort();
            let radices: Vec<usize> = parents.iter().map(|p| variables[p.0].domain.len()).collect();
            let size: usize = radices.iter().product();
            let mut rows = vec![Vec::new(); size];
            let shell = Cpt::new(parents.clone(), radices.clone(), Vec::new());
            for row in &decl.rows {
                let cond: BTreeMap<VarId, usize> = row
                    .condition
                    .iter()
                    .map(|(p, v)| {
                        let p = id(p);
                        (p, value(p, v))
                    })
                    .collect();
                let idx = shell.row_index(|p| cond[&p]);
                rows[idx] = row.order.iter().map(|t| value(VarId(x), &t[0])).collect();
            }
            cpts.push(Cpt::new(parents, radices, rows));
        }

        let i_arcs = draft.i_arcs.iter().map(|(a, b)| (id(a), id(b))).collect();
        let mut ci_arcs: Vec<CiArc> = draft
            .ci_arcs
            .iter()
            .map(|decl| {
                let (a, b) = (id(&decl.endpoints.0), id(&decl.endpoints.1));
                let mut selector: Vec<VarId> = decl.selector.iter().map(|z| id(z)).collect();
                selector.sort();
                let key = unordered(&decl.endpoints.0, &decl.endpoints.1);
                let cit = draft
                    .cits
                    .iter()
                    .find(|c| unordered(&c.endpoints.0, &c.endpoints.1) == key)
                    .unwrap();
                let rows = cit
                    .rows
                    .iter()
                    .map(|row| {
                        let cond: BTreeMap<VarId, usize> = row
                            .condition
                            .iter()
                            .map(|(z, v)| {
                                let z = id(z);
                                (z, value(z, v))
                            })
                            .collect();
                        let k: Vec<usize> = selector.iter().map(|z| cond[z]).collect();
                        (k, id(&row.more_important))
                    })
                    .collect();
                CiArc::new((a, b), selector, rows)
            })
            .collect();
        ci_arcs.sort_by_key(|c| c.endpoints);
        TcpNet::from_parts(variables, cpts, i_arcs, ci_arcs)
    }

    /// Assembles a net from already consistent indexed parts.
    pub(crate) fn from_parts(
        variables: Vec<Variable>,
        cpts: Vec<Cpt>,
        i_arcs: BTreeSet<(VarId, VarId)>,
        mut ci_arcs: Vec<CiArc>,
    ) -> TcpNet {
        ci_arcs.sort_by_key(|c| c.endpoints);
        let mut importance = BTreeMap::new();
        for &(more, less) in &i_arcs {
            importance.insert(ordered_pair(more, less), Importance::Unconditional { more, less });
        }
        for (i, arc) in ci_arcs.iter().enumerate() {
            importance.insert(arc.endpoints, Importance::Conditional(i));
        }
        let mut children = vec![Vec::new(); variables.len()];
        for (x, cpt) in cpts.iter().enumerate() {
            for &p in &cpt.parents {
                children[p.0].push(VarId(x));
            }
        }
        TcpNet {
            variables,
            cpts,
            i_arcs,
            ci_arcs,
            importance,
            children,
        }
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn var_ids(&self) -> impl DoubleEndedIterator<Item = VarId> + ExactSizeIterator {
        (0..self.variables.len()).map(VarId)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, v: VarId) -> &Variable {
        &self.variables[v.0]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.variables[v.0].name
    }

    pub fn domain_size(&self, v: VarId) -> usize {
        self.variables[v.0].domain.len()
    }

    pub fn value_name(&self, v: VarId, value: usize) -> &str {
        &self.variables[v.0].domain[value]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables
            .binary_search_by(|v| v.name.as_str().cmp(name))
            .ok()
            .map(VarId)
    }

    pub fn lookup(&self, name: &str) -> Result<VarId, ModelError> {
        self.var_by_name(name)
            .ok_or_else(|| ModelError::UnknownVariable(name.into()))
    }

    pub fn lookup_value(&self, v: VarId, value: &str) -> Result<usize, ModelError> {
        self.variables[v.0]
            .value_index(value)
            .ok_or_else(|| ModelError::UnknownValue {
                variable: self.name(v).into(),
                value: value.into(),
            })
    }

    pub fn cpt(&self, v: VarId) -> &Cpt {
        &self.cpts[v.0]
    }

    pub fn parents(&self, v: VarId) -> &[VarId] {
        &self.cpts[v.0].parents
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        &self.children[v.0]
    }

    /// cp-arcs `(parent, child)` in sorted order.
    pub fn cp_arcs(&self) -> Vec<(VarId, VarId)> {
        let mut arcs: Vec<(VarId, VarId)> = self
            .cpts
            .iter()
            .enumerate()
            .flat_map(|(x, c)| c.parents.iter().map(move |&p| (p, VarId(x))))
            .collect();
        arcs.sort();
        arcs
    }

    pub fn i_arcs(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.i_arcs
    }

    pub fn ci_arcs(&self) -> &[CiArc] {
        &self.ci_arcs
    }

    /// Union of all selector sets.
    pub fn selector_vars(&self) -> Vec<VarId> {
        let set: BTreeSet<VarId> = self.ci_arcs.iter().flat_map(|c| c.selector.iter().copied()).collect();
        set.into_iter().collect()
    }

    /// Importance relation between an unordered pair, if any.
    pub fn importance(&self, a: VarId, b: VarId) -> Option<Importance> {
        self.importance.get(&ordered_pair(a, b)).copied()
    }

    /// Number of outcomes, or `None` on overflow.
    pub fn outcome_count(&self) -> Option<usize> {
        self.variables
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.domain.len()))
    }

    pub fn radices(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.domain.len()).collect()
    }

    /// Name-level description of this net in canonical order.
    pub fn to_draft(&self) -> NetDraft {
        let name = |v: VarId| self.name(v).to_string();
        let val = |v: VarId, x: usize| self.value_name(v, x).to_string();
        let variables = self
            .variables
            .iter()
            .map(|v| VariableSpec {
                name: v.name.clone(),
                domain: v.domain.clone(),
            })
            .collect();
        let cp_arcs = self.cp_arcs().into_iter().map(|(a, b)| (name(a), name(b))).collect();
        let i_arcs = self.i_arcs.iter().map(|&(a, b)| (name(a), name(b))).collect();
        let ci_arcs = self
            .ci_arcs
            .iter()
            .map(|c| CiArcDecl {
                endpoints: (name(c.endpoints.0), name(c.endpoints.1)),
                selector: c.selector.iter().map(|&z| name(z)).collect(),
            })
            .collect();
        let cpts = self
            .var_ids()
            .map(|x| {
                let cpt = self.cpt(x);
                let rows = (0..cpt.rows.len())
                    .map(|r| CptRowDecl {
                        condition: cpt
                            .parents
                            .iter()
                            .zip(cpt.row_condition(r))
                            .map(|(&p, v)| (name(p), val(p, v)))
                            .collect(),
                        order: cpt.rows[r].iter().map(|&v| vec![val(x, v)]).collect(),
                    })
                    .collect();
                CptDecl { subject: name(x), rows }
            })
            .collect();
        let cits = self
            .ci_arcs
            .iter()
            .map(|c| CitDecl {
                endpoints: (name(c.endpoints.0), name(c.endpoints.1)),
                rows: c
                    .rows
                    .iter()
                    .map(|(key, &more)| CitRowDecl {
                        condition: c
                            .selector
                            .iter()
                            .zip(key)
                            .map(|(&z, &v)| (name(z), val(z, v)))
                            .collect(),
                        more_important: name(more),
                    })
                    .collect(),
            })
            .collect();
        NetDraft {
            variables,
            cp_arcs,
            i_arcs,
            ci_arcs,
            cpts,
            cits,
        }
    }

    /// Re-runs validation on this net's description. Always empty for nets
    /// produced by this crate.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_draft())
    }

    /// Builds an outcome from `(variable, value)` name pairs covering every variable.
    pub fn outcome(&self, pairs: &[(&str, &str)]) -> Result<Outcome, ModelError> {
        let partial = self.partial(pairs)?;
        partial.complete(self)
    }

    /// Builds a partial assignment from `(variable, value)` name pairs.
    pub fn partial(&self, pairs: &[(&str, &str)]) -> Result<PartialAssignment, ModelError> {
        let mut out = PartialAssignment::new();
        for (var, value) in pairs {
            let v = self.lookup(var)?;
            let x = self.lookup_value(v, value)?;
            if out.0.insert(v, x).is_some() {
                return Err(ModelError::DuplicateAssignment((*var).into()));
            }
        }
        Ok(out)
    }

    /// Restriction of an outcome to the named variables.
    pub fn project(&self, outcome: &Outcome, vars: &[&str]) -> Result<PartialAssignment, ModelError> {
        let ids = vars.iter().map(|n| self.lookup(n)).collect::<Result<Vec<_>, _>>()?;
        outcome.project(&ids)
    }

    pub fn display_outcome<'a>(&'a self, o: &'a Outcome) -> OutcomeDisplay<'a> {
        OutcomeDisplay { net: self, outcome: o }
    }

    pub fn display_partial<'a>(&'a self, p: &'a PartialAssignment) -> PartialDisplay<'a> {
        PartialDisplay { net: self, partial: p }
    }
}

pub(crate) fn ordered_pair(a: VarId, b: VarId) -> (VarId, VarId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

// ---------------------------------------------------------------------------
// Assignments
// ---------------------------------------------------------------------------

/// A total assignment, one value index per variable of the net (in
/// [`VarId`] order). Ordering is lexicographic by variable name, then by
/// domain storage order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(Vec<usize>);

impl Outcome {
    pub fn new(values: Vec<usize>) -> Self {
        Outcome(values)
    }

    pub fn value(&self, v: VarId) -> usize {
        self.0[v.0]
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with(&self, v: VarId, value: usize) -> Outcome {
        let mut values = self.0.clone();
        values[v.0] = value;
        Outcome(values)
    }

    pub fn set(&mut self, v: VarId, value: usize) {
        self.0[v.0] = value;
    }

    pub fn project(&self, vars: &[VarId]) -> Result<PartialAssignment, ModelError> {
        let mut out = PartialAssignment::new();
        for &v in vars {
            let value = *self.0.get(v.0).ok_or(ModelError::VariableOutOfRange(v.0))?;
            out.0.insert(v, value);
        }
        Ok(out)
    }

    /// Variables on which the two outcomes differ.
    pub fn diff(&self, other: &Outcome) -> Vec<VarId> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| VarId(i))
            .collect()
    }

    /// Mixed-radix index of this outcome (first variable most significant).
    pub fn index(&self, radices: &[usize]) -> usize {
        self.0.iter().zip(radices).fold(0, |acc, (&v, &r)| acc * r + v)
    }

    pub fn from_index(mut index: usize, radices: &[usize]) -> Outcome {
        let mut values = vec![0; radices.len()];
        for i in (0..radices.len()).rev() {
            values[i] = index % radices[i];
            index /= radices[i];
        }
        Outcome(values)
    }

    pub fn agrees_with(&self, partial: &PartialAssignment) -> bool {
        partial.0.iter().all(|(v, &x)| self.0[v.0] == x)
    }
}

/// A partial assignment of values to variables of one net.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PartialAssignment(BTreeMap<VarId, usize>);

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: VarId) -> Option<usize> {
        self.0.get(&v).copied()
    }

    /// Assigns `v`; returns the previous value if `v` was already assigned.
    pub fn insert(&mut self, v: VarId, value: usize) -> Option<usize> {
        self.0.insert(v, value)
    }

    pub fn remove(&mut self, v: VarId) -> Option<usize> {
        self.0.remove(&v)
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.0.iter().map(|(&v, &x)| (v, x))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.keys().copied()
    }

    /// Union; values in `other` win on overlap.
    pub fn merged(&self, other: &PartialAssignment) -> PartialAssignment {
        let mut out = self.clone();
        out.0.extend(other.0.iter().map(|(&v, &x)| (v, x)));
        out
    }

    /// Checks every value lies in its variable's domain.
    pub fn check(&self, net: &TcpNet) -> Result<(), ModelError> {
        for (&v, &x) in &self.0 {
            if v.0 >= net.len() {
                return Err(ModelError::VariableOutOfRange(v.0));
            }
            if x >= net.domain_size(v) {
                return Err(ModelError::UnknownValue {
                    variable: net.name(v).into(),
                    value: alloc::format!("#{x}"),
                });
            }
        }
        Ok(())
    }

    /// Turns a covering assignment into an outcome.
    pub fn complete(&self, net: &TcpNet) -> Result<Outcome, ModelError> {
        self.check(net)?;
        net.var_ids()
            .map(|v| {
                self.get(v)
                    .ok_or_else(|| ModelError::Unassigned(net.name(v).into()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Outcome)
    }
}

impl FromIterator<(VarId, usize)> for PartialAssignment {
    fn from_iter<I: IntoIterator<Item = (VarId, usize)>>(iter: I) -> Self {
        PartialAssignment(iter.into_iter().collect())
    }
}

/// Renders an outcome as comma-separated `X=v` pairs in variable order.
pub struct OutcomeDisplay<'a> {
    net: &'a TcpNet,
    outcome: &'a Outcome,
}

impl fmt::Display for OutcomeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.net.var_ids() {
            if v.0 > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", self.net.name(v), self.net.value_name(v, self.outcome.value(v)))?;
        }
        Ok(())
    }
}

pub struct PartialDisplay<'a> {
    net: &'a TcpNet,
    partial: &'a PartialAssignment,
}

impl fmt::Display for PartialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, x)) in self.partial.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", self.net.name(v), self.net.value_name(v, x))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Hard constraints
// ---------------------------------------------------------------------------

/// Extensional constraint: the scope's joint values must be one of `allowed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    scope: Vec<VarId>,
    allowed: BTreeSet<Vec<usize>>,
}

impl Constraint {
    pub fn new(net: &TcpNet, scope: Vec<VarId>, allowed: BTreeSet<Vec<usize>>) -> Result<Self, ModelError> {
        let scope_name = || {
            scope
                .iter()
                .map(|&v| if v.0 < net.len() { net.name(v) } else { "?" })
                .collect::<Vec<_>>()
                .join(",")
        };
        let bad = |reason: &str| ModelError::BadConstraint {
            scope: scope_name(),
            reason: reason.into(),
        };
        let mut distinct = BTreeSet::new();
        for &v in &scope {
            if v.0 >= net.len() {
                return Err(ModelError::VariableOutOfRange(v.0));
            }
            if !distinct.insert(v) {
                return Err(bad("scope variables must be distinct"));
            }
        }
        for tuple in &allowed {
            if tuple.len() != scope.len() {
                return Err(bad("tuple arity does not match the scope"));
            }
            if tuple.iter().zip(&scope).any(|(&x, &v)| x >= net.domain_size(v)) {
                return Err(bad("tuple value outside its domain"));
            }
        }
        Ok(Constraint { scope, allowed })
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn allowed(&self) -> &BTreeSet<Vec<usize>> {
        &self.allowed
    }

    pub fn satisfied_by(&self, o: &Outcome) -> bool {
        let key: Vec<usize> = self.scope.iter().map(|&v| o.value(v)).collect();
        self.allowed.contains(&key)
    }
}

/// A conjunction of hard constraints over one net's variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    /// Adds a constraint given by names, e.g. scope `["J", "P"]` and tuples
    /// `[["black", "white"], ["white", "black"]]`.
    pub fn allow(&mut self, net: &TcpNet, scope: &[&str], tuples: &[&[&str]]) -> Result<(), ModelError> {
        let ids = scope.iter().map(|n| net.lookup(n)).collect::<Result<Vec<_>, _>>()?;
        let mut allowed = BTreeSet::new();
        for t in tuples {
            if t.len() != ids.len() {
                return Err(ModelError::BadConstraint {
                    scope: scope.join(","),
                    reason: "tuple arity does not match the scope".into(),
                });
            }
            let values = ids
                .iter()
                .zip(t.iter())
                .map(|(&v, val)| net.lookup_value(v, val))
                .collect::<Result<Vec<_>, _>>()?;
            allowed.insert(values);
        }
        self.push(Constraint::new(net, ids, allowed)?);
        Ok(())
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn satisfied_by(&self, o: &Outcome) -> bool {
        self.constraints.iter().all(|c| c.satisfied_by(o))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn evening_net_is_valid() {
        let draft = fixtures::evening_draft();
        assert!(validate(&draft).is_empty(), "{}", validate(&draft));
        let net = draft.build().unwrap();
        assert_eq!(net.len(), 3);
        assert_eq!(net.cp_arcs().len(), 2);
        assert_eq!(net.i_arcs().len(), 1);
        assert!(net.ci_arcs().is_empty());
    }

    #[test]
    fn cp_arc_parent_mismatch() {
        // S's CPT conditions on P only while arcs come from J and P.
        let draft = NetDraft::new()
            .var("J", &["black", "white"])
            .var("P", &["black", "white"])
            .var("S", &["red", "white"])
            .cp("J", "S")
            .cp("P", "S")
            .cpt("J", &[], &["black", "white"])
            .cpt("P", &[], &["black", "white"])
            .cpt("S", &[("P", "black")], &["red", "white"])
            .cpt("S", &[("P", "white")], &["white", "red"]);
        let report = validate(&draft);
        assert!(report.has("cp-arc/parent mismatch"), "{report}");
    }

    #[test]
    fn duplicate_importance_relation() {
        let draft = NetDraft::new()
            .var("X", &["x1", "x2"])
            .var("Y", &["y1", "y2"])
            .var("Z", &["z1", "z2"])
            .iarc("X", "Y")
            .ci("X", "Y", &["Z"])
            .cit("X", "Y", &[("Z", "z1")], "Y")
            .cpt("X", &[], &["x1", "x2"])
            .cpt("Y", &[], &["y1", "y2"])
            .cpt("Z", &[], &["z1", "z2"]);
        let report = validate(&draft);
        assert!(report.has("duplicate importance relation"), "{report}");
        assert_eq!(report.len(), 1);
    }

    #[test]
    fn antisymmetric_i_arcs() {
        let draft = NetDraft::new()
            .var("X", &["x1", "x2"])
            .var("Y", &["y1", "y2"])
            .iarc("X", "Y")
            .iarc("Y", "X")
            .cpt("X", &[], &["x1", "x2"])
            .cpt("Y", &[], &["y1", "y2"]);
        assert!(validate(&draft).has("duplicate importance relation"));
    }

    #[test]
    fn ties_missing_rows_and_bad_rows() {
        let mut draft = NetDraft::new()
            .var("A", &["a1", "a2", "a3"])
            .var("B", &["b1", "b2"])
            .cp("B", "A")
            .cpt("B", &[], &["b1", "b2"])
            .cpt("A", &[("B", "b1")], &["a1", "a2", "a3"]);
        assert!(validate(&draft).has("missing cpt row"));
        draft.cpts[1].rows.push(CptRowDecl {
            condition: vec![("B".into(), "b2".into())],
            order: vec![vec!["a1".into(), "a2".into()], vec!["a3".into()]],
        });
        let report = validate(&draft);
        assert!(report.has("cpt tie"), "{report}");
        assert!(!report.has("missing cpt row"));
        draft.cpts[1].rows[1].order = vec![vec!["a1".into()], vec!["a2".into()]];
        assert!(validate(&draft).has("cpt row not a permutation"));
    }

    #[test]
    fn ci_arc_checks() {
        let base = NetDraft::new()
            .var("X", &["x1", "x2"])
            .var("Y", &["y1", "y2"])
            .var("Z", &["z1", "z2"])
            .cpt("X", &[], &["x1", "x2"])
            .cpt("Y", &[], &["y1", "y2"])
            .cpt("Z", &[], &["z1", "z2"]);
        let empty = base.clone().ci("X", "Y", &[]);
        let r = validate(&empty);
        assert!(r.has("empty selector") && r.has("missing cit"), "{r}");
        let overlap = base
            .clone()
            .ci("X", "Y", &["X"])
            .cit("X", "Y", &[("X", "x1")], "X");
        assert!(validate(&overlap).has("selector overlaps endpoint"));
        let orphan = base.clone().cit("X", "Y", &[("Z", "z1")], "X");
        assert!(validate(&orphan).has("cit without ci-arc"));
        let bad = base
            .clone()
            .ci("X", "Y", &["Z"])
            .cit("X", "Y", &[("Z", "z1")], "Z")
            .cit("X", "Y", &[("Z", "z3")], "X");
        let r = validate(&bad);
        assert!(r.has("bad cit orientation") && r.has("unknown value"), "{r}");
        let partial = base.ci("X", "Y", &["Z"]).cit("X", "Y", &[("Z", "z2")], "Y");
        assert!(validate(&partial).is_empty());
    }

    #[test]
    fn unknown_references_and_domains() {
        let draft = NetDraft::new()
            .var("A", &["a"])
            .var("A", &["a1", "a2"])
            .var("B", &["b1", "b1"])
            .cp("Q", "A")
            .cp("B", "B");
        let r = validate(&draft);
        for code in ["domain too small", "duplicate variable", "duplicate domain value", "unknown variable", "self arc"] {
            assert!(r.has(code), "missing {code} in {r}");
        }
    }

    #[test]
    fn validate_is_idempotent() {
        let draft = NetDraft::new().var("A", &["a"]).cp("A", "B");
        assert_eq!(validate(&draft), validate(&draft));
    }

    #[test]
    fn projection() {
        let net = fixtures::evening();
        let o = net.outcome(&[("J", "black"), ("P", "white"), ("S", "white")]).unwrap();
        let p = net.project(&o, &["J", "P"]).unwrap();
        assert_eq!(p, net.partial(&[("J", "black"), ("P", "white")]).unwrap());
        assert!(net.project(&o, &[]).unwrap().is_empty());
        assert_eq!(
            net.project(&o, &["Q"]),
            Err(ModelError::UnknownVariable("Q".into()))
        );

        let flight = fixtures::flight();
        let o = flight
            .outcome(&[("D", "1d"), ("A", "ba"), ("T", "m"), ("S", "1s"), ("C", "b")])
            .unwrap();
        let p = flight.project(&o, &["T", "A"]).unwrap();
        assert_eq!(p, flight.partial(&[("T", "m"), ("A", "ba")]).unwrap());
    }

    #[test]
    fn cpt_row_sizes_match_parent_space() {
        for net in [fixtures::evening(), fixtures::flight(), fixtures::ab()] {
            for x in net.var_ids() {
                let cpt = net.cpt(x);
                let expected: usize = cpt.parents().iter().map(|&p| net.domain_size(p)).product();
                assert_eq!(cpt.rows().len(), expected);
            }
            for c in net.ci_arcs() {
                let (a, b) = c.endpoints();
                assert!(!c.selector().contains(&a) && !c.selector().contains(&b));
            }
            assert!(net.validate().is_empty());
            assert_eq!(net.to_draft().build().unwrap(), net);
        }
    }

    #[test]
    fn declaration_order_does_not_matter() {
        let a = NetDraft::new()
            .var("B", &["b1", "b2"])
            .var("A", &["a1", "a2"])
            .cp("A", "B")
            .cpt("B", &[("A", "a2")], &["b2", "b1"])
            .cpt("A", &[], &["a1", "a2"])
            .cpt("B", &[("A", "a1")], &["b1", "b2"]);
        let b = NetDraft::new()
            .var("A", &["a1", "a2"])
            .var("B", &["b1", "b2"])
            .cpt("A", &[], &["a1", "a2"])
            .cpt("B", &[("A", "a1")], &["b1", "b2"])
            .cpt("B", &[("A", "a2")], &["b2", "b1"])
            .cp("A", "B");
        assert_eq!(a.build().unwrap(), b.build().unwrap());
    }

    #[test]
    fn mixed_radix_enumeration() {
        let all: Vec<Vec<usize>> = MixedRadix::new(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(MixedRadix::new(&[]).count(), 1);
        assert_eq!(MixedRadix::new(&[2, 0]).count(), 0);
    }

    #[test]
    fn constraint_checks() {
        let net = fixtures::evening();
        let mut c = ConstraintSet::new();
        c.allow(&net, &["J", "P"], &[&["black", "white"], &["white", "black"]]).unwrap();
        assert_eq!(c.constraints()[0].allowed().len(), 2);
        assert!(c.allow(&net, &["J", "Q"], &[&["black", "white"]]).is_err());
        assert!(c.allow(&net, &["J"], &[&["black", "white"]]).is_err());
        assert!(c.allow(&net, &["J", "J"], &[&["black", "white"]]).is_err());
        let o = net.outcome(&[("J", "black"), ("P", "white"), ("S", "red")]).unwrap();
        assert!(c.satisfied_by(&o));
        assert!(!c.satisfied_by(&o.with(VarId(1), 0)));
    }
}
