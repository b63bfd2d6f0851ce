use std::fmt;

use serde::{Serialize, Serializer};

use super::ball::Ball;
use super::interval::IntervalValue;
use super::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    Holds,
    Fails,
    Indeterminate,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::Holds => "HOLDS",
            VerdictKind::Fails => "FAILS",
            VerdictKind::Indeterminate => "INDETERMINATE",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for VerdictKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

/// Outcome of a comparison. `margin` is oriented so that a positive value
/// points towards the relation holding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub margin: f64,
}

impl Verdict {
    pub fn indeterminate() -> Verdict {
        Verdict { kind: VerdictKind::Indeterminate, margin: f64::NAN }
    }

    pub fn holds(&self) -> bool {
        self.kind == VerdictKind::Holds
    }

    pub fn fails(&self) -> bool {
        self.kind == VerdictKind::Fails
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Binary64,
    HighPrecision,
}

/// A decided (or undecidable) comparison with the enclosures used to decide it.
#[derive(Clone, Copy, Debug)]
pub struct Decision {
    pub lhs: IntervalValue,
    pub rhs: IntervalValue,
    pub relation: Relation,
    pub verdict: Verdict,
    pub precision: Precision,
}

/// An inequality whose two sides can be evaluated in any [`Real`] model.
pub trait Inequality {
    fn relation(&self) -> Relation;
    fn sides<R: Real>(&self) -> (R, R);
}

fn oriented_margin(rel: Relation, lhs_mid: f64, rhs_mid: f64) -> f64 {
    match rel {
        Relation::Lt | Relation::Le => rhs_mid - lhs_mid,
        Relation::Gt | Relation::Ge => lhs_mid - rhs_mid,
    }
}

/// Decides `lhs rel rhs` from two enclosures.
pub fn compare(lhs: IntervalValue, rel: Relation, rhs: IntervalValue) -> Verdict {
    let kind = if !lhs.is_finite() || !rhs.is_finite() {
        VerdictKind::Indeterminate
    } else {
        let (holds, fails) = match rel {
            Relation::Lt => (lhs.hi() < rhs.lo(), lhs.lo() >= rhs.hi()),
            Relation::Le => (lhs.hi() <= rhs.lo(), lhs.lo() > rhs.hi()),
            Relation::Gt => (lhs.lo() > rhs.hi(), lhs.hi() <= rhs.lo()),
            Relation::Ge => (lhs.lo() >= rhs.hi(), lhs.hi() < rhs.lo()),
        };
        if holds {
            VerdictKind::Holds
        } else if fails {
            VerdictKind::Fails
        } else {
            VerdictKind::Indeterminate
        }
    };
    Verdict { kind, margin: oriented_margin(rel, lhs.mid(), rhs.mid()) }
}

fn compare_balls(lhs: &Ball, rel: Relation, rhs: &Ball) -> VerdictKind {
    let (holds, fails) = match rel {
        Relation::Lt => (lhs.upper() < rhs.lower(), lhs.lower() >= rhs.upper()),
        Relation::Le => (lhs.upper() <= rhs.lower(), lhs.lower() > rhs.upper()),
        Relation::Gt => (lhs.lower() > rhs.upper(), lhs.upper() <= rhs.lower()),
        Relation::Ge => (lhs.lower() >= rhs.upper(), lhs.upper() < rhs.lower()),
    };
    if holds {
        VerdictKind::Holds
    } else if fails {
        VerdictKind::Fails
    } else {
        VerdictKind::Indeterminate
    }
}

/// Evaluates in binary64 intervals first; an undecided comparison is
/// re-evaluated with [`Ball`] arithmetic.
pub fn decide<I: Inequality + ?Sized>(ineq: &I) -> Decision {
    let rel = ineq.relation();
    let (lhs, rhs) = ineq.sides::<IntervalValue>();
    let verdict = compare(lhs, rel, rhs);
    if verdict.kind != VerdictKind::Indeterminate {
        return Decision { lhs, rhs, relation: rel, verdict, precision: Precision::Binary64 };
    }
    decide_high_precision(ineq)
}

/// Skips the binary64 pass. Used by tests that cross-check the two tiers.
pub fn decide_high_precision<I: Inequality + ?Sized>(ineq: &I) -> Decision {
    let rel = ineq.relation();
    let (bl, br) = ineq.sides::<Ball>();
    let kind = compare_balls(&bl, rel, &br);
    let margin = oriented_margin(rel, bl.mid_f64(), br.mid_f64());
    Decision {
        lhs: bl.enclosure(),
        rhs: br.enclosure(),
        relation: rel,
        verdict: Verdict { kind, margin },
        precision: Precision::HighPrecision,
    }
}
