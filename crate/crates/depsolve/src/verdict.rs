//! Engine answers and their witnesses.

use std::fmt;

use crate::axioms::Deduction;
use crate::chase::ChaseTrace;
use crate::semantics::Database;

#[derive(Clone, Debug)]
pub enum Evidence {
    Deduction(Deduction),
    Chase(Box<ChaseTrace>),
    /// Path or closure argument, rendered as text.
    Reason(String),
}

#[derive(Clone, Debug)]
pub enum Refutation {
    /// A finite database satisfying Σ and violating σ.
    Database(Box<Database>),
    /// No finite witness exists or none was built; the text names the argument.
    Certificate(String),
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Implied(Evidence),
    NotImplied(Refutation),
    Unknown(String),
    Unsupported(String),
}

impl Verdict {
    pub fn implied(&self) -> bool {
        matches!(self, Verdict::Implied(_))
    }

    pub fn not_implied(&self) -> bool {
        matches!(self, Verdict::NotImplied(_))
    }

    pub fn decided(&self) -> Option<bool> {
        match self {
            Verdict::Implied(_) => Some(true),
            Verdict::NotImplied(_) => Some(false),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Database> {
        match self {
            Verdict::NotImplied(Refutation::Database(d)) => Some(d),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Implied(_) => "implied",
            Verdict::NotImplied(_) => "not_implied",
            Verdict::Unknown(_) => "unknown",
            Verdict::Unsupported(_) => "unsupported",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Implied(_) => 0,
            Verdict::NotImplied(_) => 1,
            Verdict::Unknown(_) => 2,
            Verdict::Unsupported(_) => 3,
        }
    }

    pub(crate) fn refuted_by(d: Database) -> Self {
        Verdict::NotImplied(Refutation::Database(Box::new(d)))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Unknown(s) | Verdict::Unsupported(s) => write!(f, "{}: {s}", self.label()),
            _ => f.write_str(self.label()),
        }
    }
}
