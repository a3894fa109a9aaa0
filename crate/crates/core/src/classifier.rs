//! Rule engine turning [`SetFacts`] into classification verdicts.
//!
//! Each rule is a guard over the facts plus the verdict it yields and the
//! citation tags backing it. Reports carry those tags verbatim so a reader can
//! trace every verdict.

use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::distance_set::{compute_facts, DistanceSetDesc, DistanceSetError, OrderType, SetFacts, Tristate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("A is not a distance set (needs 0 ∈ A and A countable or 0 a limit point)")]
    NotRealizable,
    #[error(transparent)]
    Description(#[from] DistanceSetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComplexityKind {
    Borel,
    Sigma11Complete,
    Sigma11Hard,
    Pi11Complete,
    Pi11Hard,
    D2Sigma11Complete,
    D2Sigma11Hard,
    NeitherSigma11NorPi11,
    Pi12Complete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpperBound {
    Pi11,
    D2Sigma11,
    Pi12,
}

/// A complexity verdict. Hardness-only verdicts carry the best known upper
/// bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexityClass {
    pub class: ComplexityKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<UpperBound>,
}

impl ComplexityClass {
    fn exact(class: ComplexityKind) -> Self {
        ComplexityClass {
            class,
            upper_bound: None,
        }
    }

    fn hard(class: ComplexityKind) -> Self {
        ComplexityClass {
            class,
            upper_bound: Some(UpperBound::Pi12),
        }
    }

    pub fn is_hardness_only(&self) -> bool {
        matches!(
            self.class,
            ComplexityKind::Sigma11Hard | ComplexityKind::Pi11Hard | ComplexityKind::D2Sigma11Hard
        )
    }
}

/// Position in a chain of order type `ω + 1`: `1..` finite, or `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainPosition {
    Finite(usize),
    Omega,
}

impl Serialize for ChainPosition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ChainPosition::Finite(n) => s.serialize_u64(*n as u64),
            ChainPosition::Omega => s.serialize_str("omega"),
        }
    }
}

impl fmt::Display for ChainPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainPosition::Finite(n) => write!(f, "{n}"),
            ChainPosition::Omega => f.write_str("ω"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case")]
pub enum IsomVerdict {
    BorelChain { position: ChainPosition },
    GraphIsoBireducible,
    StrictlyAboveGraphIsoBelowOrbitComplete,
    OrbitComplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case")]
pub enum EmbedVerdict {
    BorelChain { position: ChainPosition },
    CompleteAnalyticQuasiOrder { invariantly_universal: bool },
}

/// `true` or `unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownTrue {
    True,
    Unknown,
}

impl Serialize for KnownTrue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KnownTrue::True => s.serialize_bool(true),
            KnownTrue::Unknown => s.serialize_str("unknown"),
        }
    }
}

/// Verdicts of the form "every space with distance set A has property P" and
/// "some space with distance set A has property P".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyVerdicts {
    pub all_zero_dimensional: bool,
    pub all_ultrametric: bool,
    pub all_discrete: bool,
    pub all_locally_compact: bool,
    pub all_sigma_compact: bool,
    pub all_connected: bool,
    pub all_compact: bool,
    pub exists_zero_dimensional: bool,
    pub exists_ultrametric: bool,
    pub exists_discrete: bool,
    pub exists_connected: bool,
    pub exists_compact: bool,
    pub exists_locally_compact: bool,
    pub citations: Vec<&'static str>,
}

/// Verdict with its supporting citations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cited<T> {
    pub verdict: T,
    pub citations: Vec<&'static str>,
}

fn cited<T>(verdict: T, citations: &[&'static str]) -> Cited<T> {
    Cited {
        verdict,
        citations: citations.to_vec(),
    }
}

/// A value that only exists for realizable `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Applicable<T> {
    Value(T),
    NotApplicable,
}

impl<T> Applicable<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Applicable::Value(v) => Some(v),
            Applicable::NotApplicable => None,
        }
    }
}

impl<T: Serialize> Serialize for Applicable<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Applicable::Value(v) => v.serialize(s),
            Applicable::NotApplicable => s.serialize_str("NotApplicable"),
        }
    }
}

fn require_realizable(facts: &SetFacts) -> Result<(), ClassifyError> {
    if is_realizable(facts) {
        Ok(())
    } else {
        Err(ClassifyError::NotRealizable)
    }
}

pub fn is_realizable(facts: &SetFacts) -> bool {
    facts.zero_in_a && (facts.countable || facts.zero_is_limit())
}

fn is_singleton_zero(facts: &SetFacts) -> bool {
    facts.zero_in_a && facts.order_type_if_wf == OrderType::Finite(1)
}

pub fn classify_topology(facts: &SetFacts) -> Result<TopologyVerdicts, ClassifyError> {
    require_realizable(facts)?;
    let singleton = is_singleton_zero(facts);
    let finite = matches!(facts.order_type_if_wf, OrderType::Finite(_));
    let compact_a = facts.closed && facts.has_max;
    Ok(TopologyVerdicts {
        all_zero_dimensional: !facts.contains_right_nbhd_of_zero,
        all_ultrametric: facts.well_spaced,
        all_discrete: facts.zero_isolated,
        all_locally_compact: facts.zero_isolated,
        all_sigma_compact: facts.zero_isolated,
        all_connected: singleton,
        all_compact: singleton,
        exists_zero_dimensional: true,
        exists_ultrametric: facts.countable,
        exists_discrete: facts.countable,
        exists_connected: facts.initial_interval,
        exists_compact: compact_a && (finite || facts.zero_is_limit()),
        // Representable sets are σ-compact, so only the countability clause
        // and the limit-point clause matter.
        exists_locally_compact: facts.countable || facts.zero_is_limit(),
        citations: vec![
            "Thm 3.4(1)",
            "Thm 3.4(2)",
            "Thm 3.4(3)",
            "Thm 3.4(4)",
            "Thm 3.2(1)",
            "Thm 3.2(2)",
            "Thm 3.2(3)",
            "Thm 3.2(4)",
            "Thm 3.2(5)",
        ],
    })
}

/// Complexity of the spaces with distances inside `A` (needs `0 ∈ A`).
pub fn classify_va(facts: &SetFacts) -> Cited<ComplexityClass> {
    if facts.closed || facts.zero_isolated {
        cited(ComplexityClass::exact(ComplexityKind::Borel), &["Cor 4.3", "Thm 4.2(2)"])
    } else {
        cited(
            ComplexityClass::exact(ComplexityKind::Pi11Complete),
            &["Thm 4.2(3)", "Fact 4.1"],
        )
    }
}

/// Complexity of the spaces whose distance set is exactly `A`.
pub fn classify_va_star(facts: &SetFacts) -> Result<Cited<ComplexityClass>, ClassifyError> {
    require_realizable(facts)?;
    use ComplexityKind::*;
    let zero_unique_limit = facts.zero_is_limit() && !facts.has_limit_point_other_than_zero;
    if facts.zero_isolated || zero_unique_limit {
        return Ok(cited(ComplexityClass::exact(Borel), &["Thm 4.5(1)", "Thm 4.7(1)"]));
    }
    let verdict = match (facts.countable, facts.closed, facts.some_nonzero_limit_point_in_a) {
        (true, true, _) => cited(ComplexityClass::exact(Sigma11Complete), &["Thm 4.7(2)", "Thm 4.5(2)(a)"]),
        (true, false, false) => cited(ComplexityClass::exact(Pi11Complete), &["Thm 4.7(3)", "Thm 4.5(2)(b)"]),
        (true, false, true) => cited(
            ComplexityClass::exact(D2Sigma11Complete),
            &["Thm 4.7(4)", "Thm 4.5(2)(c)"],
        ),
        (false, true, _) => cited(ComplexityClass::hard(Sigma11Hard), &["Thm 4.5(2)(a)", "Fact 4.1"]),
        (false, false, false) => cited(ComplexityClass::hard(Pi11Hard), &["Thm 4.5(2)(b)", "Fact 4.1"]),
        (false, false, true) => cited(ComplexityClass::hard(D2Sigma11Hard), &["Thm 4.5(2)(c)", "Fact 4.1"]),
    };
    Ok(verdict)
}

fn chain_position(facts: &SetFacts) -> ChainPosition {
    match facts.order_type_if_wf {
        OrderType::Finite(n) => ChainPosition::Finite(n),
        OrderType::Omega => ChainPosition::Omega,
        OrderType::NotApplicable => unreachable!("chain position needs a well-founded A"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsometryClassification {
    pub isometry_star: Cited<IsomVerdict>,
    pub graph_iso_reduces: Cited<bool>,
    pub isom_equals_isom_star: Cited<KnownTrue>,
}

/// The four guards, in verdict order. Exactly one holds for consistent facts.
pub fn isometry_guards(facts: &SetFacts) -> [bool; 4] {
    let chain = facts.well_founded && facts.well_spaced;
    [
        chain,
        !chain && !facts.dense_near_zero,
        facts.dense_near_zero && !facts.contains_right_nbhd_of_zero,
        facts.contains_right_nbhd_of_zero,
    ]
}

struct WitnessRule {
    name: &'static str,
    applies: fn(&SetFacts) -> bool,
}

/// Known injective, non-surjective metric-preserving self-maps of `A`.
const WITNESS_REGISTRY: &[WitnessRule] = &[
    WitnessRule {
        // identity below a, then a + (b-a)(r-a)/(1+r-a): misses b
        name: "interval piecewise map",
        applies: |f| f.contains_right_nbhd_of_zero,
    },
    WitnessRule {
        name: "r/(1+r)",
        applies: |f| f.countable && f.dense_near_zero,
    },
];

pub fn classify_isometry(facts: &SetFacts) -> Result<IsometryClassification, ClassifyError> {
    require_realizable(facts)?;
    let guards = isometry_guards(facts);
    let isometry_star = if guards[0] {
        cited(
            IsomVerdict::BorelChain {
                position: chain_position(facts),
            },
            &["Thm 5.6(1)"],
        )
    } else if guards[1] {
        cited(IsomVerdict::GraphIsoBireducible, &["Thm 5.6(2)"])
    } else if guards[2] {
        cited(IsomVerdict::StrictlyAboveGraphIsoBelowOrbitComplete, &["Thm 5.6(3)"])
    } else {
        cited(IsomVerdict::OrbitComplete, &["Thm 5.6(4)"])
    };

    let graph_iso_reduces = cited(!facts.well_founded || !facts.well_spaced, &["Thm 5.5"]);

    let isom_equals_isom_star = if facts.countable {
        cited(KnownTrue::True, &["Thm 5.10"])
    } else if !facts.dense_near_zero {
        cited(KnownTrue::True, &["Thm 5.7(i)"])
    } else if facts.has_max {
        cited(KnownTrue::True, &["Thm 5.7(ii)"])
    } else if WITNESS_REGISTRY.iter().any(|w| (w.applies)(facts)) {
        cited(KnownTrue::True, &["Thm 5.7(iii)"])
    } else {
        cited(KnownTrue::Unknown, &["Thm 5.7"])
    };

    Ok(IsometryClassification {
        isometry_star,
        graph_iso_reduces,
        isom_equals_isom_star,
    })
}

/// Name of the registered witness map for `facts`, if any.
pub fn registered_witness(facts: &SetFacts) -> Option<&'static str> {
    WITNESS_REGISTRY.iter().find(|w| (w.applies)(facts)).map(|w| w.name)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddabilityClassification {
    pub embeddability_star: Cited<EmbedVerdict>,
    /// Embeddability on spaces inside `A` and on spaces exactly `A` always
    /// have the same complexity.
    pub embed_equals_embed_star: Cited<bool>,
}

pub fn classify_embeddability(facts: &SetFacts) -> Result<EmbeddabilityClassification, ClassifyError> {
    require_realizable(facts)?;
    let embeddability_star = if facts.well_founded && facts.well_spaced {
        cited(
            EmbedVerdict::BorelChain {
                position: chain_position(facts),
            },
            &["Thm 5.12(1)"],
        )
    } else {
        cited(
            EmbedVerdict::CompleteAnalyticQuasiOrder {
                invariantly_universal: true,
            },
            &["Thm 5.12(2)", "Thm 5.19"],
        )
    };
    Ok(EmbeddabilityClassification {
        embeddability_star,
        embed_equals_embed_star: cited(true, &["Cor 5.13"]),
    })
}

pub fn urysohn_exists(facts: &SetFacts) -> Result<Cited<Tristate>, ClassifyError> {
    require_realizable(facts)?;
    let verdict = if !facts.closed && !facts.zero_isolated {
        Tristate::False
    } else {
        facts.four_values
    };
    Ok(cited(verdict, &["Thm 4.9"]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub description: String,
    pub facts: SetFacts,
    pub realizable: Cited<bool>,
    pub topology: Applicable<TopologyVerdicts>,
    pub v_a: Applicable<Cited<ComplexityClass>>,
    pub v_a_star: Applicable<Cited<ComplexityClass>>,
    pub isometry_star: Applicable<Cited<IsomVerdict>>,
    pub graph_iso_reduces: Applicable<Cited<bool>>,
    pub isom_equals_isom_star: Applicable<Cited<KnownTrue>>,
    pub embeddability_star: Applicable<Cited<EmbedVerdict>>,
    pub embed_equals_embed_star: Applicable<Cited<bool>>,
    pub urysohn_exists: Applicable<Cited<Tristate>>,
    /// Every citation above, deduplicated in first-seen order.
    pub citations: Vec<&'static str>,
}

fn applicable<T, E>(r: Result<T, E>) -> Applicable<T> {
    r.map_or(Applicable::NotApplicable, Applicable::Value)
}

pub fn classify_facts(description: String, facts: SetFacts) -> ClassificationReport {
    let realizable = is_realizable(&facts);
    let topology = applicable(classify_topology(&facts));
    let v_a = if facts.zero_in_a {
        Applicable::Value(classify_va(&facts))
    } else {
        Applicable::NotApplicable
    };
    let v_a_star = applicable(classify_va_star(&facts));
    let (isometry_star, graph_iso_reduces, isom_equals_isom_star) = match classify_isometry(&facts) {
        Ok(i) => (
            Applicable::Value(i.isometry_star),
            Applicable::Value(i.graph_iso_reduces),
            Applicable::Value(i.isom_equals_isom_star),
        ),
        Err(_) => (
            Applicable::NotApplicable,
            Applicable::NotApplicable,
            Applicable::NotApplicable,
        ),
    };
    let (embeddability_star, embed_equals_embed_star) = match classify_embeddability(&facts) {
        Ok(e) => (
            Applicable::Value(e.embeddability_star),
            Applicable::Value(e.embed_equals_embed_star),
        ),
        Err(_) => (Applicable::NotApplicable, Applicable::NotApplicable),
    };
    let urysohn = applicable(urysohn_exists(&facts));

    let mut citations: Vec<&'static str> = vec!["Thm 1.2"];
    let mut push = |tags: &[&'static str]| {
        for t in tags {
            if !citations.contains(t) {
                citations.push(t);
            }
        }
    };
    if let Some(t) = topology.value() {
        push(&t.citations);
    }
    for tags in [
        v_a.value().map(|c| &c.citations),
        v_a_star.value().map(|c| &c.citations),
        isometry_star.value().map(|c| &c.citations),
        graph_iso_reduces.value().map(|c| &c.citations),
        isom_equals_isom_star.value().map(|c| &c.citations),
        embeddability_star.value().map(|c| &c.citations),
        embed_equals_embed_star.value().map(|c| &c.citations),
        urysohn.value().map(|c| &c.citations),
    ]
    .into_iter()
    .flatten()
    {
        push(tags);
    }

    ClassificationReport {
        description,
        facts,
        realizable: cited(realizable, &["Thm 1.2"]),
        topology,
        v_a,
        v_a_star,
        isometry_star,
        graph_iso_reduces,
        isom_equals_isom_star,
        embeddability_star,
        embed_equals_embed_star,
        urysohn_exists: urysohn,
        citations,
    }
}

pub fn classify(a: &DistanceSetDesc) -> Result<ClassificationReport, ClassifyError> {
    let facts = compute_facts(a)?;
    Ok(classify_facts(a.to_string(), facts))
}

fn va_row_label(c: &ComplexityClass) -> &'static str {
    match c.class {
        ComplexityKind::Borel => "A closed or 0 isolated in A",
        ComplexityKind::Pi11Complete => "A Borel not closed and 0 not isolated in A",
        ComplexityKind::NeitherSigma11NorPi11 => "A true analytic",
        ComplexityKind::Pi12Complete => "A Σ¹₁-complete",
        _ => "-",
    }
}

fn va_star_row_label(c: &ComplexityClass) -> &'static str {
    match c.class {
        ComplexityKind::Borel => "0 isolated in A or 0 unique limit point of A",
        ComplexityKind::Sigma11Hard => "0 not isolated in A, A closed with other limit points",
        ComplexityKind::Sigma11Complete => "0 not isolated in A, A countable closed with other limit points",
        ComplexityKind::Pi11Hard => "0 not isolated in A, A not closed with other limit points",
        ComplexityKind::Pi11Complete => {
            "0 not isolated in A, A countable not closed with all other limit points not in A"
        }
        ComplexityKind::D2Sigma11Hard => "0 not isolated in A, A not closed with other limit points in A",
        ComplexityKind::D2Sigma11Complete => {
            "0 not isolated in A, A countable not closed with other limit points in A"
        }
        ComplexityKind::Pi12Complete => "A Σ¹₁-complete",
        ComplexityKind::NeitherSigma11NorPi11 => "-",
    }
}

fn class_label(c: &ComplexityClass) -> String {
    let name = match c.class {
        ComplexityKind::Borel => "Borel",
        ComplexityKind::Sigma11Complete => "Σ¹₁-complete",
        ComplexityKind::Sigma11Hard => "Σ¹₁-hard",
        ComplexityKind::Pi11Complete => "Π¹₁-complete",
        ComplexityKind::Pi11Hard => "Π¹₁-hard",
        ComplexityKind::D2Sigma11Complete => "D₂(Σ¹₁)-complete",
        ComplexityKind::D2Sigma11Hard => "D₂(Σ¹₁)-hard",
        ComplexityKind::NeitherSigma11NorPi11 => "neither Σ¹₁ nor Π¹₁",
        ComplexityKind::Pi12Complete => "Π¹₂-complete",
    };
    match c.upper_bound {
        Some(UpperBound::Pi12) => format!("{name} (and Π¹₂)"),
        Some(UpperBound::Pi11) => format!("{name} (and Π¹₁)"),
        Some(UpperBound::D2Sigma11) => format!("{name} (and D₂(Σ¹₁))"),
        None => name.to_string(),
    }
}

/// Plain-text rendering; complexity rows use the summary-table phrasing.
pub fn render_text(report: &ClassificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "A = {}", report.description);
    let _ = writeln!(out, "distance set: {}", report.realizable.verdict);
    if let Some(v) = report.v_a.value() {
        let _ = writeln!(
            out,
            "V_A:  {} | {} | {}",
            va_row_label(&v.verdict),
            class_label(&v.verdict),
            v.citations.join(", ")
        );
    }
    if let Some(v) = report.v_a_star.value() {
        let _ = writeln!(
            out,
            "V*_A: {} | {} | {}",
            va_star_row_label(&v.verdict),
            class_label(&v.verdict),
            v.citations.join(", ")
        );
    }
    if let Some(t) = report.topology.value() {
        let _ = writeln!(
            out,
            "every member: zero-dimensional={} ultrametric={} discrete={} connected={}",
            t.all_zero_dimensional, t.all_ultrametric, t.all_discrete, t.all_connected
        );
        let _ = writeln!(
            out,
            "some member: ultrametric={} discrete={} connected={} compact={} locally-compact={}",
            t.exists_ultrametric, t.exists_discrete, t.exists_connected, t.exists_compact, t.exists_locally_compact
        );
    }
    if let Some(i) = report.isometry_star.value() {
        let verdict = match i.verdict {
            IsomVerdict::BorelChain { position } => {
                format!("Borel, position {position} of the well-founded well-spaced chain")
            }
            IsomVerdict::GraphIsoBireducible => "Borel bireducible with countable graph isomorphism".into(),
            IsomVerdict::StrictlyAboveGraphIsoBelowOrbitComplete => {
                "strictly above countable graph isomorphism, below a complete orbit equivalence relation".into()
            }
            IsomVerdict::OrbitComplete => "Borel bireducible with a complete orbit equivalence relation".into(),
        };
        let _ = writeln!(out, "isometry on V*_A: {verdict} | {}", i.citations.join(", "));
    }
    if let Some(g) = report.graph_iso_reduces.value() {
        let _ = writeln!(out, "graph isomorphism reduces: {} | {}", g.verdict, g.citations.join(", "));
    }
    if let Some(e) = report.isom_equals_isom_star.value() {
        let eq = match e.verdict {
            KnownTrue::True => "true",
            KnownTrue::Unknown => "unknown",
        };
        let _ = writeln!(out, "isometry on V_A ~ isometry on V*_A: {eq} | {}", e.citations.join(", "));
    }
    if let Some(e) = report.embeddability_star.value() {
        let verdict = match e.verdict {
            EmbedVerdict::BorelChain { position } => {
                format!("Borel, position {position} of the well-founded well-spaced chain")
            }
            EmbedVerdict::CompleteAnalyticQuasiOrder { .. } => {
                "Borel bireducible with a complete analytic quasi-order (invariantly universal)".into()
            }
        };
        let _ = writeln!(out, "embeddability on V*_A: {verdict} | {}", e.citations.join(", "));
    }
    if let Some(u) = report.urysohn_exists.value() {
        let _ = writeln!(out, "A-Urysohn space exists: {} | {}", u.verdict, u.citations.join(", "));
    }
    out
}
