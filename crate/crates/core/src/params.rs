//! Validated protocol parameters.
//!
//! A [`SchemeSpec`] collects the raw knobs (server count, collusion and
//! corruption budgets, instance counts, hash width, adversary model) and
//! [`SchemeSpec::build`] turns them into a [`SchemeParams`] after checking
//! every structural requirement: a positive retrieval rate requires
//! `N > T + B`, the untouched-server model requires `E + B < N`, the field
//! must hold at least `l^2` elements, and the evaluation points must be
//! distinct (and nonzero unless explicitly overridden for the three-server
//! worked example, which pins one point to zero).

use crate::field::{self, Field, FieldError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("capacity is zero: {servers} servers cannot tolerate {collusion} colluding and {byzantine} corrupted")]
    CapacityZero {
        servers: usize,
        collusion: usize,
        byzantine: usize,
    },
    #[error("observation bound violated: E={observed} plus B={byzantine} must stay below N={servers}")]
    ObservationBound {
        observed: usize,
        byzantine: usize,
        servers: usize,
    },
    #[error("field modulus {modulus} is below the required minimum {needed}")]
    FieldTooSmall { modulus: u64, needed: u64 },
    #[error("expected {expected} evaluation points, got {got}")]
    EvalPointCount { expected: usize, got: usize },
    #[error("evaluation point zero requires the explicit override")]
    ZeroEvalPoint,
    #[error("hash count {hash_count} must equal (N-T-B) * beta = {expected}")]
    HashCountMismatch { hash_count: usize, expected: usize },
    #[error("secret-channel model takes no extra instances, got beta = {0}")]
    UnexpectedExtraInstances(usize),
    #[error("untouched-server model needs beta >= 1")]
    MissingExtraInstances,
    #[error("{name} must be at least {min}")]
    BelowMinimum { name: &'static str, min: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which limited-knowledge adversary the run assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    /// The adversary sees all queries and answers but not the hash material,
    /// which travels over channels it cannot read.
    SecretChannel,
    /// The adversary sees only the queries and answers of `observed` servers
    /// and the hash material rides an authenticated broadcast.
    Untouched { observed: usize },
}

impl Model {
    pub fn observed(&self) -> Option<usize> {
        match self {
            Model::SecretChannel => None,
            Model::Untouched { observed } => Some(*observed),
        }
    }
}

/// Raw parameter bundle, to be validated by [`SchemeSpec::build`].
#[derive(Debug, Clone)]
pub struct SchemeSpec {
    pub messages: usize,
    pub servers: usize,
    pub collusion: usize,
    pub byzantine: usize,
    pub instances: usize,
    pub hash_count: usize,
    pub extra_instances: usize,
    pub model: Model,
    /// Explicit modulus; default is the smallest prime at or above
    /// `max(l^2, N + 1)`.
    pub field_modulus: Option<u64>,
    /// Explicit evaluation points; default is `1..=N`.
    pub eval_points: Option<Vec<u64>>,
    pub allow_zero_eval_point: bool,
}

impl SchemeSpec {
    pub fn secret_channel(
        messages: usize,
        servers: usize,
        collusion: usize,
        byzantine: usize,
        instances: usize,
        hash_count: usize,
    ) -> Self {
        SchemeSpec {
            messages,
            servers,
            collusion,
            byzantine,
            instances,
            hash_count,
            extra_instances: 0,
            model: Model::SecretChannel,
            field_modulus: None,
            eval_points: None,
            allow_zero_eval_point: false,
        }
    }

    /// Untouched-server configuration; the hash width is forced to
    /// `(N - T - B) * extra_instances`.
    pub fn untouched(
        messages: usize,
        servers: usize,
        collusion: usize,
        byzantine: usize,
        observed: usize,
        instances: usize,
        extra_instances: usize,
    ) -> Self {
        let block_len = servers.saturating_sub(collusion + byzantine);
        SchemeSpec {
            messages,
            servers,
            collusion,
            byzantine,
            instances,
            hash_count: block_len * extra_instances,
            extra_instances,
            model: Model::Untouched { observed },
            field_modulus: None,
            eval_points: None,
            allow_zero_eval_point: false,
        }
    }

    pub fn modulus(mut self, q: u64) -> Self {
        self.field_modulus = Some(q);
        self
    }

    pub fn eval_points(mut self, points: Vec<u64>) -> Self {
        self.eval_points = Some(points);
        self
    }

    pub fn allow_zero_eval_point(mut self) -> Self {
        self.allow_zero_eval_point = true;
        self
    }

    pub fn build(self) -> Result<SchemeParams, ParamsError> {
        if self.messages < 1 {
            return Err(ParamsError::BelowMinimum {
                name: "messages",
                min: 1,
            });
        }
        if self.instances < 1 {
            return Err(ParamsError::BelowMinimum {
                name: "instances",
                min: 1,
            });
        }
        if self.hash_count < 1 {
            return Err(ParamsError::BelowMinimum {
                name: "hash_count",
                min: 1,
            });
        }
        if self.servers <= self.collusion + self.byzantine {
            return Err(ParamsError::CapacityZero {
                servers: self.servers,
                collusion: self.collusion,
                byzantine: self.byzantine,
            });
        }
        let block_len = self.servers - self.collusion - self.byzantine;
        match self.model {
            Model::SecretChannel => {
                if self.extra_instances != 0 {
                    return Err(ParamsError::UnexpectedExtraInstances(self.extra_instances));
                }
            }
            Model::Untouched { observed } => {
                if observed + self.byzantine >= self.servers {
                    return Err(ParamsError::ObservationBound {
                        observed,
                        byzantine: self.byzantine,
                        servers: self.servers,
                    });
                }
                if self.extra_instances < 1 {
                    return Err(ParamsError::MissingExtraInstances);
                }
                let expected = block_len * self.extra_instances;
                if self.hash_count != expected {
                    return Err(ParamsError::HashCountMismatch {
                        hash_count: self.hash_count,
                        expected,
                    });
                }
            }
        }

        let instance_sq = (self.instances as u64)
            .checked_mul(self.instances as u64)
            .expect("l^2 overflowed u64");
        // Default evaluation points 1..=N additionally need q > N.
        let needed = if self.eval_points.is_none() {
            instance_sq.max(self.servers as u64 + 1)
        } else {
            instance_sq
        };
        let modulus = match self.field_modulus {
            Some(q) => q,
            None => field::next_prime_at_least(needed),
        };
        let fld = Field::new(modulus)?;
        if modulus < needed {
            return Err(ParamsError::FieldTooSmall { modulus, needed });
        }

        let eval_points = match self.eval_points {
            Some(points) => points,
            None => (1..=self.servers as u64).collect(),
        };
        if eval_points.len() != self.servers {
            return Err(ParamsError::EvalPointCount {
                expected: self.servers,
                got: eval_points.len(),
            });
        }
        for (i, &p) in eval_points.iter().enumerate() {
            if p >= modulus {
                return Err(FieldError::PointOutOfRange(p).into());
            }
            if eval_points[..i].contains(&p) {
                return Err(FieldError::DuplicatePoint(p).into());
            }
            if p == 0 && !self.allow_zero_eval_point {
                return Err(ParamsError::ZeroEvalPoint);
            }
        }

        Ok(SchemeParams {
            messages: self.messages,
            servers: self.servers,
            collusion: self.collusion,
            byzantine: self.byzantine,
            instances: self.instances,
            hash_count: self.hash_count,
            extra_instances: self.extra_instances,
            model: self.model,
            field: fld,
            eval_points,
        })
    }
}

/// Fully validated parameters shared by every protocol stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    messages: usize,
    servers: usize,
    collusion: usize,
    byzantine: usize,
    instances: usize,
    hash_count: usize,
    extra_instances: usize,
    model: Model,
    field: Field,
    eval_points: Vec<u64>,
}

impl SchemeParams {
    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn servers(&self) -> usize {
        self.servers
    }

    pub fn collusion(&self) -> usize {
        self.collusion
    }

    pub fn byzantine(&self) -> usize {
        self.byzantine
    }

    pub fn instances(&self) -> usize {
        self.instances
    }

    pub fn hash_count(&self) -> usize {
        self.hash_count
    }

    pub fn extra_instances(&self) -> usize {
        self.extra_instances
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn eval_points(&self) -> &[u64] {
        &self.eval_points
    }

    /// Symbols per message block, `N - T - B`.
    pub fn block_len(&self) -> usize {
        self.servers - self.collusion - self.byzantine
    }

    /// Rows of the payload matrix, `N - B`.
    pub fn payload_rows(&self) -> usize {
        self.servers - self.byzantine
    }

    /// Instances actually run, `l + beta`.
    pub fn total_instances(&self) -> usize {
        self.instances + self.extra_instances
    }

    /// Length of one query row, `K (N - T - B)`.
    pub fn query_len(&self) -> usize {
        self.messages * self.block_len()
    }

    /// Stored symbols per message, `(N - T - B)(l + beta)`.
    pub fn stored_message_len(&self) -> usize {
        self.block_len() * self.total_instances()
    }

    /// Retrievable symbols per message, `(N - T - B) l`.
    pub fn message_len(&self) -> usize {
        self.block_len() * self.instances
    }
}
