//! Symbolic descriptions of distance sets `A ⊆ ℝ⁺` and their structural facts.
//!
//! A description is a finite union of components, each with a closed-form
//! order structure. Every predicate the classifier needs is decided exactly
//! from that structure; nothing here samples or approximates.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;
use crate::urysohn::four_values_check;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceSetError {
    #[error("a distance-set description needs at least one component")]
    EmptyDescription,
    #[error("component {index}: {reason}")]
    InvalidComponent { index: usize, reason: String },
    #[error("no rule for component kind `{0}`")]
    UnsupportedDescription(String),
}

/// One piece of a distance-set union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Component {
    #[serde(rename = "finite")]
    FiniteSet { values: BTreeSet<Rational> },
    /// `{ r0·qⁿ : n ≥ 0 }` with `0 < q < 1`.
    #[serde(rename = "geomdown")]
    GeomDown { r0: Rational, q: Rational },
    /// `{ r0·qⁿ : n ≥ 0 }` with `q > 1`.
    #[serde(rename = "geomup")]
    GeomUp { r0: Rational, q: Rational },
    /// `[0, b]`
    #[serde(rename = "closedinterval")]
    ClosedInterval { b: Rational },
    /// `[0, b)`
    #[serde(rename = "halfopeninterval")]
    HalfOpenInterval { b: Rational },
    /// `ℚ ∩ [a, b]`
    #[serde(rename = "denserationals")]
    DenseRationals { a: Rational, b: Rational },
}

impl Component {
    pub fn finite<I: IntoIterator<Item = Rational>>(values: I) -> Self {
        Component::FiniteSet {
            values: values.into_iter().collect(),
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            Component::FiniteSet { values } => match values.iter().find(|v| v.is_negative()) {
                Some(v) => Err(format!("negative value {v}")),
                None => Ok(()),
            },
            Component::GeomDown { r0, q } => {
                if !r0.is_positive() {
                    Err("geomdown needs r0 > 0".into())
                } else if !(q.is_positive() && *q < Rational::one()) {
                    Err("geomdown needs 0 < q < 1".into())
                } else {
                    Ok(())
                }
            }
            Component::GeomUp { r0, q } => {
                if !r0.is_positive() {
                    Err("geomup needs r0 > 0".into())
                } else if *q <= Rational::one() {
                    Err("geomup needs q > 1".into())
                } else {
                    Ok(())
                }
            }
            Component::ClosedInterval { b } | Component::HalfOpenInterval { b } => {
                if b.is_positive() {
                    Ok(())
                } else {
                    Err("interval needs b > 0".into())
                }
            }
            Component::DenseRationals { a, b } => {
                if a.is_negative() {
                    Err("denserationals needs a >= 0".into())
                } else if b <= a {
                    Err("denserationals needs b > a".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        if x.is_negative() {
            return false;
        }
        match self {
            Component::FiniteSet { values } => values.contains(x),
            Component::GeomDown { r0, q } | Component::GeomUp { r0, q } => {
                is_geometric_member(r0, q, x)
            }
            Component::ClosedInterval { b } => x <= b,
            Component::HalfOpenInterval { b } => x < b,
            Component::DenseRationals { a, b } => a <= x && x <= b,
        }
    }

    fn is_interval(&self) -> bool {
        matches!(
            self,
            Component::ClosedInterval { .. } | Component::HalfOpenInterval { .. }
        )
    }
}

/// Is `x = r0·qⁿ` for some `n ≥ 0`?
fn is_geometric_member(r0: &Rational, q: &Rational, x: &Rational) -> bool {
    if !x.is_positive() {
        return false;
    }
    let one = Rational::one();
    // Normalize so that the walk moves upward towards 1.
    let (mut t, step) = if *q < one {
        (x / r0, q.recip())
    } else {
        (r0 / x, q.clone())
    };
    while t < one {
        t = t * &step;
    }
    t == one
}

/// A validated, nonempty union of components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Component>", into = "Vec<Component>")]
pub struct DistanceSetDesc {
    components: Vec<Component>,
}

impl TryFrom<Vec<Component>> for DistanceSetDesc {
    type Error = DistanceSetError;

    fn try_from(components: Vec<Component>) -> Result<Self, Self::Error> {
        DistanceSetDesc::new(components)
    }
}

impl From<DistanceSetDesc> for Vec<Component> {
    fn from(desc: DistanceSetDesc) -> Self {
        desc.components
    }
}

impl fmt::Display for DistanceSetDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| match c {
                Component::FiniteSet { values } => {
                    let vs: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                    format!("{{{}}}", vs.join(", "))
                }
                Component::GeomDown { r0, q } | Component::GeomUp { r0, q } => {
                    format!("{{{r0}·({q})^n}}")
                }
                Component::ClosedInterval { b } => format!("[0, {b}]"),
                Component::HalfOpenInterval { b } => format!("[0, {b})"),
                Component::DenseRationals { a, b } => format!("Q ∩ [{a}, {b}]"),
            })
            .collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

impl DistanceSetDesc {
    pub fn new(components: Vec<Component>) -> Result<Self, DistanceSetError> {
        if components.is_empty() {
            return Err(DistanceSetError::EmptyDescription);
        }
        for (index, c) in components.iter().enumerate() {
            c.check()
                .map_err(|reason| DistanceSetError::InvalidComponent { index, reason })?;
        }
        Ok(DistanceSetDesc { components })
    }

    pub fn finite<I: IntoIterator<Item = Rational>>(values: I) -> Self {
        DistanceSetDesc::new(vec![Component::finite(values)]).expect("finite set with negative value")
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// The union with one more component.
    pub fn with(mut self, c: Component) -> Result<Self, DistanceSetError> {
        self.components.push(c);
        DistanceSetDesc::new(self.components)
    }

    /// All values, when every component is a finite set.
    pub fn finite_values(&self) -> Option<BTreeSet<Rational>> {
        let mut out = BTreeSet::new();
        for c in &self.components {
            match c {
                Component::FiniteSet { values } => out.extend(values.iter().cloned()),
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.components.iter().any(|c| c.contains(x))
    }

    fn any(&self, pred: impl Fn(&Component) -> bool) -> bool {
        self.components.iter().any(pred)
    }

    fn zero_is_limit_point(&self) -> bool {
        self.any(|c| match c {
            Component::GeomDown { .. } => true,
            Component::ClosedInterval { .. } | Component::HalfOpenInterval { .. } => true,
            Component::DenseRationals { a, .. } => a.is_zero(),
            _ => false,
        })
    }

    fn is_countable(&self) -> bool {
        !self.any(Component::is_interval)
    }
}

/// Realizability test: `0 ∈ A` and either `A` is countable or `0` is a limit
/// point of `A`. Analyticity holds for every representable description.
pub fn is_distance_set(a: &DistanceSetDesc) -> bool {
    a.contains(&Rational::zero()) && (a.is_countable() || a.zero_is_limit_point())
}

pub fn contains(a: &DistanceSetDesc, x: &Rational) -> bool {
    a.contains(x)
}

/// Three-valued answer used where a finite procedure may not settle a
/// question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tristate {
    True,
    False,
    Undecided,
}

impl From<bool> for Tristate {
    fn from(b: bool) -> Self {
        if b {
            Tristate::True
        } else {
            Tristate::False
        }
    }
}

impl fmt::Display for Tristate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tristate::True => "true",
            Tristate::False => "false",
            Tristate::Undecided => "undecided",
        })
    }
}

impl Serialize for Tristate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Tristate::True => s.serialize_bool(true),
            Tristate::False => s.serialize_bool(false),
            Tristate::Undecided => s.serialize_str("undecided"),
        }
    }
}

/// Order type of a well-founded `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderType {
    Finite(usize),
    Omega,
    NotApplicable,
}

impl Serialize for OrderType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            OrderType::Finite(n) => s.serialize_u64(*n as u64),
            OrderType::Omega => s.serialize_str("omega"),
            OrderType::NotApplicable => s.serialize_str("not_applicable"),
        }
    }
}

/// Structural facts about `A`; the sole input of the classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetFacts {
    pub zero_in_a: bool,
    pub zero_isolated: bool,
    pub countable: bool,
    pub closed: bool,
    pub well_spaced: bool,
    pub well_founded: bool,
    pub order_type_if_wf: OrderType,
    pub has_max: bool,
    pub dense_near_zero: bool,
    pub contains_right_nbhd_of_zero: bool,
    pub has_limit_point_other_than_zero: bool,
    pub some_nonzero_limit_point_in_a: bool,
    /// `A` is `{0}`, `[0, b]` or `[0, b)`.
    pub initial_interval: bool,
    pub four_values: Tristate,
}

impl SetFacts {
    /// `0` is a limit point of `A` (whether or not it belongs to `A`).
    pub fn zero_is_limit(&self) -> bool {
        self.zero_in_a && !self.zero_isolated
    }

    /// The internal consistency conditions every computed `SetFacts` meets.
    pub fn is_consistent(&self) -> bool {
        let implies = |p: bool, q: bool| !p || q;
        implies(self.contains_right_nbhd_of_zero, self.dense_near_zero)
            && implies(self.well_spaced, !self.dense_near_zero)
            && implies(self.zero_isolated, !self.dense_near_zero)
            && implies(self.zero_isolated, self.zero_in_a)
            && implies(
                self.well_spaced && self.well_founded,
                self.order_type_if_wf != OrderType::NotApplicable,
            )
            && implies(
                self.well_founded,
                self.order_type_if_wf != OrderType::NotApplicable,
            )
            && implies(
                !self.well_founded,
                self.order_type_if_wf == OrderType::NotApplicable,
            )
            && implies(self.dense_near_zero, !self.well_founded)
            && implies(self.some_nonzero_limit_point_in_a, self.has_limit_point_other_than_zero)
            && implies(!self.countable, self.dense_near_zero || self.has_limit_point_other_than_zero)
    }
}

pub fn compute_facts(a: &DistanceSetDesc) -> Result<SetFacts, DistanceSetError> {
    let zero = Rational::zero();
    let zero_in_a = a.contains(&zero);
    let zero_limit = a.zero_is_limit_point();
    let countable = a.is_countable();
    let any_interval = a.any(Component::is_interval);
    let any_dense = a.any(|c| matches!(c, Component::DenseRationals { .. }));
    let any_down = a.any(|c| matches!(c, Component::GeomDown { .. }));
    let any_up = a.any(|c| matches!(c, Component::GeomUp { .. }));

    let well_founded = !(any_down || any_interval || any_dense);
    let order_type_if_wf = if !well_founded {
        OrderType::NotApplicable
    } else if any_up {
        OrderType::Omega
    } else {
        let values = a.finite_values().expect("well-founded without geomup is finite");
        OrderType::Finite(values.len())
    };

    let dense_near_zero = a.any(|c| match c {
        Component::ClosedInterval { .. } | Component::HalfOpenInterval { .. } => true,
        Component::DenseRationals { a, .. } => a.is_zero(),
        _ => false,
    });
    let has_other_limit = any_interval || any_dense;

    let four_values = match a.finite_values() {
        Some(values) => {
            let values: Vec<Rational> = values.into_iter().collect();
            Tristate::from(four_values_check(&values).is_ok())
        }
        None => Tristate::Undecided,
    };

    Ok(SetFacts {
        zero_in_a,
        zero_isolated: zero_in_a && !zero_limit,
        countable,
        closed: is_closed(a, zero_limit),
        well_spaced: is_well_spaced(a),
        well_founded,
        order_type_if_wf,
        has_max: has_max(a),
        dense_near_zero,
        contains_right_nbhd_of_zero: any_interval,
        has_limit_point_other_than_zero: has_other_limit,
        // Every component with a nonzero limit point contains rational ones.
        some_nonzero_limit_point_in_a: has_other_limit,
        initial_interval: is_initial_interval(a),
        four_values,
    })
}

fn is_closed(a: &DistanceSetDesc, zero_limit: bool) -> bool {
    if zero_limit && !a.contains(&Rational::zero()) {
        return false;
    }
    let interval_reach = |b: &Rational| {
        a.any(|c| match c {
            Component::ClosedInterval { b: e } | Component::HalfOpenInterval { b: e } => e >= b,
            _ => false,
        })
    };
    a.components.iter().all(|c| match c {
        Component::HalfOpenInterval { b } => a.contains(b),
        // The irrationals of [a, b] must come from some interval component;
        // intervals all start at 0, and b itself is rational.
        Component::DenseRationals { b, .. } => interval_reach(b),
        _ => true,
    })
}

fn has_max(a: &DistanceSetDesc) -> bool {
    if a.any(|c| matches!(c, Component::GeomUp { .. })) {
        return false;
    }
    let sup = a
        .components
        .iter()
        .filter_map(|c| match c {
            Component::FiniteSet { values } => values.iter().next_back().cloned(),
            Component::GeomDown { r0, .. } => Some(r0.clone()),
            Component::ClosedInterval { b }
            | Component::HalfOpenInterval { b }
            | Component::DenseRationals { b, .. } => Some(b.clone()),
            Component::GeomUp { .. } => None,
        })
        .max();
    match sup {
        Some(s) => a.contains(&s),
        None => false,
    }
}

fn is_initial_interval(a: &DistanceSetDesc) -> bool {
    let reach = a
        .components
        .iter()
        .filter_map(|c| match c {
            Component::ClosedInterval { b } | Component::HalfOpenInterval { b } => Some(b.clone()),
            _ => None,
        })
        .max();
    let Some(reach) = reach else {
        return a.finite_values().is_some_and(|v| v.len() == 1 && v.contains(&Rational::zero()));
    };
    a.components.iter().all(|c| match c {
        Component::FiniteSet { values } => values.iter().all(|v| *v <= reach),
        Component::GeomDown { r0, .. } => *r0 <= reach,
        Component::GeomUp { .. } => false,
        Component::ClosedInterval { .. } | Component::HalfOpenInterval { .. } => true,
        Component::DenseRationals { b, .. } => *b <= reach,
    })
}

/// Writes `q` (positive, `≠ 1`) as `g^e` with `g > 1` not a perfect power.
fn primitive_base(q: &Rational) -> (Rational, i64) {
    let one = Rational::one();
    let (g, sign) = if *q > one { (q.clone(), 1) } else { (q.recip(), -1) };
    let bits = g.numer().bits().max(g.denom().bits()).max(1) as u32;
    for k in (2..=bits).rev() {
        if let Some(root) = g.exact_root(k) {
            // Roots of roots are caught by the descending scan.
            return (root, sign * k as i64);
        }
    }
    (g, sign)
}

/// Common base and period exponent for a family of geometric ratios, or
/// `None` when two of them are multiplicatively independent.
fn common_period(ratios: &[&Rational]) -> Option<(Rational, i64)> {
    let mut base: Option<Rational> = None;
    let mut period = BigInt::one();
    for q in ratios {
        let (g, e) = primitive_base(q);
        match &base {
            None => base = Some(g),
            Some(b) if *b == g => {}
            Some(_) => return None,
        }
        period = period.lcm(&BigInt::from(e.abs()));
    }
    let period: i64 = period.try_into().ok()?;
    base.map(|b| (b, period))
}

/// `r < r'` in `A` implies `2r < r'`.
///
/// Geometric tails heading to the same end are either commensurable, in which
/// case the union is periodic in scale and one period of the tail suffices, or
/// they are not, in which case their scales interleave densely and some pair
/// lands within a factor of two.
fn is_well_spaced(a: &DistanceSetDesc) -> bool {
    if a.any(|c| c.is_interval() || matches!(c, Component::DenseRationals { .. })) {
        return false;
    }
    let downs: Vec<(&Rational, &Rational)> = a
        .components
        .iter()
        .filter_map(|c| match c {
            Component::GeomDown { r0, q } => Some((r0, q)),
            _ => None,
        })
        .collect();
    let ups: Vec<(&Rational, &Rational)> = a
        .components
        .iter()
        .filter_map(|c| match c {
            Component::GeomUp { r0, q } => Some((r0, q)),
            _ => None,
        })
        .collect();

    let down_period = if downs.is_empty() {
        None
    } else {
        match common_period(&downs.iter().map(|d| d.1).collect::<Vec<_>>()) {
            Some((g, l)) => Some(g.pow(-(l as i32))),
            None => return false,
        }
    };
    let up_period = if ups.is_empty() {
        None
    } else {
        match common_period(&ups.iter().map(|u| u.1).collect::<Vec<_>>()) {
            Some((g, l)) => Some(g.pow(l as i32)),
            None => return false,
        }
    };

    // Anchors: every element that is not deep inside a geometric tail.
    let mut anchors: Vec<Rational> = Vec::new();
    for c in &a.components {
        match c {
            Component::FiniteSet { values } => {
                anchors.extend(values.iter().filter(|v| v.is_positive()).cloned())
            }
            Component::GeomDown { r0, .. } | Component::GeomUp { r0, .. } => anchors.push(r0.clone()),
            _ => {}
        }
    }
    let (Some(t_low), Some(t_high)) = (anchors.iter().min(), anchors.iter().max()) else {
        return true;
    };
    let two = Rational::from_integer(2);
    let lo = match &down_period {
        Some(p) => t_low * p / &two,
        None => Rational::zero(),
    };
    let hi = match &up_period {
        Some(p) => &two * t_high * p,
        None => t_high.clone(),
    };

    let mut window: BTreeSet<Rational> = BTreeSet::new();
    for c in &a.components {
        match c {
            Component::FiniteSet { values } => {
                window.extend(values.iter().filter(|v| v.is_positive()).cloned())
            }
            Component::GeomDown { r0, q } => {
                let mut t = r0.clone();
                while t >= lo {
                    window.insert(t.clone());
                    t = t * q;
                }
            }
            Component::GeomUp { r0, q } => {
                let mut t = r0.clone();
                while t <= hi {
                    window.insert(t.clone());
                    t = t * q;
                }
            }
            _ => unreachable!("intervals and dense blocks rejected above"),
        }
    }
    let values: Vec<&Rational> = window.iter().collect();
    values.windows(2).all(|w| *w[1] > &two * w[0])
}

/// The first `per_component` elements of each component (geometric terms in
/// index order, interval/dense blocks sampled on a uniform grid). Used by
/// tests and diagnostics.
pub fn sample_elements(a: &DistanceSetDesc, per_component: usize) -> BTreeSet<Rational> {
    let mut out = BTreeSet::new();
    for c in &a.components {
        match c {
            Component::FiniteSet { values } => out.extend(values.iter().cloned()),
            Component::GeomDown { r0, q } | Component::GeomUp { r0, q } => {
                let mut t = r0.clone();
                for _ in 0..per_component {
                    out.insert(t.clone());
                    t = t * q;
                }
            }
            Component::ClosedInterval { b } | Component::HalfOpenInterval { b } => {
                let steps = per_component.max(1) as i64;
                for i in 0..steps {
                    out.insert(b * Rational::new(i, steps));
                }
                if matches!(c, Component::ClosedInterval { .. }) {
                    out.insert(b.clone());
                }
            }
            Component::DenseRationals { a: lo, b: hi } => {
                let steps = per_component.max(1) as i64;
                for i in 0..=steps {
                    out.insert(lo + (hi - lo) * Rational::new(i, steps));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn fin(vals: &[i64]) -> DistanceSetDesc {
        DistanceSetDesc::finite(vals.iter().map(|&v| int(v)))
    }

    fn geom_down(r0: Rational, ratio: Rational) -> DistanceSetDesc {
        DistanceSetDesc::new(vec![
            Component::GeomDown { r0, q: ratio },
            Component::finite([int(0)]),
        ])
        .unwrap()
    }

    #[test]
    fn membership() {
        let g = DistanceSetDesc::new(vec![Component::GeomDown { r0: int(1), q: q(1, 3) }]).unwrap();
        assert!(g.contains(&q(1, 27)));
        assert!(g.contains(&int(1)));
        assert!(!g.contains(&q(1, 2)));
        assert!(!g.contains(&int(3)));
        assert!(!g.contains(&int(0)));
        let up = DistanceSetDesc::new(vec![Component::GeomUp { r0: q(1, 2), q: int(3) }]).unwrap();
        assert!(up.contains(&q(9, 2)));
        assert!(!up.contains(&q(1, 6)));
        let closed = DistanceSetDesc::new(vec![Component::ClosedInterval { b: int(1) }]).unwrap();
        let open = DistanceSetDesc::new(vec![Component::HalfOpenInterval { b: int(1) }]).unwrap();
        assert!(closed.contains(&int(1)));
        assert!(!open.contains(&int(1)));
        assert!(!fin(&[0, 1, 2]).contains(&q(3, 2)));
        assert!(!fin(&[0, 1, 2]).contains(&int(-1)));
    }

    #[test]
    fn rejects_bad_components() {
        assert_eq!(DistanceSetDesc::new(vec![]), Err(DistanceSetError::EmptyDescription));
        assert!(DistanceSetDesc::new(vec![Component::GeomDown { r0: int(1), q: int(1) }]).is_err());
        assert!(DistanceSetDesc::new(vec![Component::GeomUp { r0: int(1), q: q(1, 2) }]).is_err());
        assert!(DistanceSetDesc::new(vec![Component::DenseRationals { a: int(1), b: int(1) }]).is_err());
        assert!(DistanceSetDesc::new(vec![Component::finite([int(-1)])]).is_err());
        assert!(DistanceSetDesc::new(vec![Component::ClosedInterval { b: int(0) }]).is_err());
    }

    #[test]
    fn realizability() {
        assert!(is_distance_set(&fin(&[0, 1, 2])));
        assert!(!is_distance_set(&fin(&[1, 2])));
        let closed = DistanceSetDesc::new(vec![Component::ClosedInterval { b: int(1) }]).unwrap();
        assert!(is_distance_set(&closed));
        // Uncountable with 0 isolated.
        let far = DistanceSetDesc::new(vec![
            Component::finite([int(0)]),
            Component::DenseRationals { a: int(1), b: int(2) },
        ])
        .unwrap();
        assert!(is_distance_set(&far));
    }

    #[test]
    fn facts_for_finite_well_spaced() {
        let f = compute_facts(&fin(&[0, 1, 3, 9])).unwrap();
        assert!(f.well_spaced);
        assert!(f.well_founded);
        assert_eq!(f.order_type_if_wf, OrderType::Finite(4));
        assert!(f.zero_isolated);
        assert!(f.closed);
        assert!(f.has_max);
        assert!(f.is_consistent());
    }

    #[test]
    fn facts_for_geometric_tails() {
        let f = compute_facts(&geom_down(int(1), q(1, 3))).unwrap();
        assert!(f.well_spaced);
        assert!(!f.well_founded);
        assert!(!f.zero_isolated);
        assert!(!f.dense_near_zero);
        assert!(f.closed);
        assert!(f.has_max);
        assert!(!f.has_limit_point_other_than_zero);
        assert_eq!(f.four_values, Tristate::Undecided);

        let half = compute_facts(&geom_down(int(1), q(1, 2))).unwrap();
        assert!(!half.well_spaced);
    }

    #[test]
    fn facts_for_dense_rationals() {
        let a = DistanceSetDesc::new(vec![Component::DenseRationals { a: int(0), b: int(1) }]).unwrap();
        let f = compute_facts(&a).unwrap();
        assert!(f.dense_near_zero);
        assert!(!f.contains_right_nbhd_of_zero);
        assert!(!f.closed);
        assert!(f.some_nonzero_limit_point_in_a);
        assert!(f.countable);
        assert!(f.zero_in_a);
        assert!(!f.well_spaced);
        assert!(f.is_consistent());
    }

    #[test]
    fn closedness_across_components() {
        let open = DistanceSetDesc::new(vec![Component::HalfOpenInterval { b: int(1) }]).unwrap();
        assert!(!compute_facts(&open).unwrap().closed);
        let patched = open.clone().with(Component::finite([int(1)])).unwrap();
        assert!(compute_facts(&patched).unwrap().closed);
        let covered = DistanceSetDesc::new(vec![
            Component::DenseRationals { a: q(1, 2), b: int(1) },
            Component::ClosedInterval { b: int(1) },
        ])
        .unwrap();
        assert!(compute_facts(&covered).unwrap().closed);
        // geomdown without 0 misses its limit point
        let tail = DistanceSetDesc::new(vec![Component::GeomDown { r0: int(1), q: q(1, 3) }]).unwrap();
        assert!(!compute_facts(&tail).unwrap().closed);
    }

    #[test]
    fn well_spacing_of_unions() {
        // Same ratio, interleaved scales.
        let nested = DistanceSetDesc::new(vec![
            Component::GeomDown { r0: int(1), q: q(1, 9) },
            Component::GeomDown { r0: q(1, 3), q: q(1, 9) },
            Component::finite([int(0)]),
        ])
        .unwrap();
        assert!(compute_facts(&nested).unwrap().well_spaced);
        let clash = DistanceSetDesc::new(vec![
            Component::GeomDown { r0: int(1), q: q(1, 3) },
            Component::GeomDown { r0: q(1, 2), q: q(1, 3) },
        ])
        .unwrap();
        assert!(!compute_facts(&clash).unwrap().well_spaced);
        // 1/3 and 1/5 are independent: scales interleave densely.
        let independent = DistanceSetDesc::new(vec![
            Component::GeomDown { r0: int(1), q: q(1, 3) },
            Component::GeomDown { r0: int(1), q: q(1, 5) },
        ])
        .unwrap();
        assert!(!compute_facts(&independent).unwrap().well_spaced);
        // Tails going opposite ways, plus finite glue between them.
        let both = DistanceSetDesc::new(vec![
            Component::GeomDown { r0: int(1), q: q(1, 4) },
            Component::GeomUp { r0: int(3), q: int(3) },
            Component::finite([int(0)]),
        ])
        .unwrap();
        assert!(compute_facts(&both).unwrap().well_spaced);
        let touching = both.with(Component::finite([int(5)])).unwrap();
        assert!(!compute_facts(&touching).unwrap().well_spaced);
    }

    #[test]
    fn order_types() {
        let up = DistanceSetDesc::new(vec![
            Component::finite([int(0)]),
            Component::GeomUp { r0: int(1), q: int(3) },
        ])
        .unwrap();
        let f = compute_facts(&up).unwrap();
        assert_eq!(f.order_type_if_wf, OrderType::Omega);
        assert!(f.well_spaced && f.well_founded && !f.has_max && f.closed);
    }

    #[test]
    fn primitive_bases() {
        assert_eq!(primitive_base(&q(1, 9)), (int(3), -2));
        assert_eq!(primitive_base(&int(8)), (int(2), 3));
        assert_eq!(primitive_base(&q(4, 9)), (q(3, 2), -2));
        assert_eq!(primitive_base(&int(6)), (int(6), 1));
        assert_eq!(primitive_base(&int(64)), (int(2), 6));
    }

    #[test]
    fn description_file_format() {
        let text = r#"[{"kind":"finite","values":["0","1","2"]},{"kind":"geomdown","r0":"1","q":"1/3"}]"#;
        let a: DistanceSetDesc = serde_json::from_str(text).unwrap();
        assert!(a.contains(&q(1, 9)));
        assert_eq!(serde_json::to_string(&a).unwrap(), text);
        assert!(serde_json::from_str::<DistanceSetDesc>("[]").is_err());
    }
}
