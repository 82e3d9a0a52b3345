use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use splitspin::{Axis, HeraldRule, SphereGrid};

use crate::error::{schema, Result};

pub const CONFIG_VERSION: u32 = 1;

/// Measurement axis of a sweep, named relative to the squeezing frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum AxisSpec {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "yprime")]
    YPrime,
    #[serde(rename = "zprime")]
    ZPrime,
    /// Angle from `z'` towards `y'`.
    #[serde(rename = "planeAngle")]
    PlaneAngle(f64),
}

impl AxisSpec {
    pub fn axis(self) -> Axis {
        match self {
            AxisSpec::X => Axis::X,
            AxisSpec::YPrime => Axis::YPrime,
            AxisSpec::ZPrime => Axis::ZPrime,
            AxisSpec::PlaneAngle(a) => Axis::PlaneAngle(a),
        }
    }

    pub fn label(self) -> String {
        match self {
            AxisSpec::X => "x".into(),
            AxisSpec::YPrime => "yprime".into(),
            AxisSpec::ZPrime => "zprime".into(),
            AxisSpec::PlaneAngle(a) => format!("plane:{a:?}"),
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x" => Ok(AxisSpec::X),
            "yprime" => Ok(AxisSpec::YPrime),
            "zprime" => Ok(AxisSpec::ZPrime),
            _ => s
                .strip_prefix("plane:")
                .and_then(|a| a.parse().ok())
                .map(AxisSpec::PlaneAngle)
                .ok_or_else(|| format!("unknown axis '{s}' (x, yprime, zprime or plane:<angle>)")),
        }
    }
}

/// Herald rule choosing `l_A` as a function of `N_A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum RuleSpec {
    CeilHalf,
    BelowTop(usize),
    Fixed(usize),
}

impl RuleSpec {
    pub fn rule(self) -> HeraldRule {
        match self {
            RuleSpec::CeilHalf => HeraldRule::CeilHalf,
            RuleSpec::BelowTop(k) => HeraldRule::BelowTop(k),
            RuleSpec::Fixed(l) => HeraldRule::Fixed(l),
        }
    }

    pub fn label(self) -> String {
        match self {
            RuleSpec::CeilHalf => "ceilHalf".into(),
            RuleSpec::BelowTop(k) => format!("belowTop:{k}"),
            RuleSpec::Fixed(l) => format!("fixed:{l}"),
        }
    }
}

/// Explicit outcomes at fixed `N_A`, or every outcome `0..=N_A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeList {
    Values(Vec<usize>),
    All(AllOutcomes),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AllOutcomes {
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

/// How the partition size `N_A` enters a sweep point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Average {
    /// A single block, `N_A = nA` (default `n/2`).
    #[default]
    None,
    /// `sum p(N_B) F_Q[rho_B] / N_B` over heralded pure blocks.
    NumberFluct,
    /// `F_Q` of the block-diagonal mixture over `N_A`, per mean `N_B`.
    JointBlock,
    /// Detection noise on `l_A` in every block, optionally also on `N_A`.
    Full,
}

impl Average {
    pub fn label(self) -> &'static str {
        match self {
            Average::None => "none",
            Average::NumberFluct => "numberFluct",
            Average::JointBlock => "jointBlock",
            Average::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Quantity {
    Prob,
    Fq,
    FqRaw,
    Negativity,
    Oat,
    Wigner,
}

impl Quantity {
    pub fn column(self) -> &'static str {
        match self {
            Quantity::Prob => "prob",
            Quantity::Fq => "fq_density",
            Quantity::FqRaw => "fq_raw",
            Quantity::Negativity => "negativity",
            Quantity::Oat => "oat_fq_density",
            Quantity::Wigner => "wigner_file",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SweepConfig {
    pub version: u32,
    pub n: usize,
    pub mu_grid: Vec<f64>,
    pub axis: OneOrMany<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleSpec>,
    #[serde(rename = "lAstar", default, skip_serializing_if = "Option::is_none")]
    pub l_a_star: Option<OutcomeList>,
    pub sigma_grid: Vec<f64>,
    #[serde(rename = "nA", default, skip_serializing_if = "Option::is_none")]
    pub n_a: Option<usize>,
    #[serde(default)]
    pub average: Average,
    #[serde(rename = "nAstar", default, skip_serializing_if = "Option::is_none")]
    pub n_a_star: Option<usize>,
    #[serde(rename = "sigmaN", default, skip_serializing_if = "Option::is_none")]
    pub sigma_n: Option<f64>,
    pub outputs: Vec<Quantity>,
    #[serde(default)]
    pub skip_zero_probability: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner_grid: Option<[usize; 2]>,
}

/// Outcome selection resolved against the partition size.
#[derive(Clone, Debug, PartialEq)]
pub enum Selector {
    Outcomes(Vec<usize>),
    Rule(RuleSpec),
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn axes(&self) -> Vec<AxisSpec> {
        self.axis.to_vec()
    }

    /// `N_A` for single-block sweeps.
    pub fn partition(&self) -> Option<usize> {
        (self.average == Average::None).then(|| self.n_a.unwrap_or(self.n / 2))
    }

    pub fn selector(&self) -> Selector {
        match (&self.l_a_star, self.rule, self.partition()) {
            (Some(OutcomeList::Values(v)), _, _) => Selector::Outcomes(v.clone()),
            (Some(OutcomeList::All(_)), _, Some(n_a)) => Selector::Outcomes((0..=n_a).collect()),
            (_, rule, _) => Selector::Rule(rule.unwrap_or(RuleSpec::CeilHalf)),
        }
    }

    pub fn wants(&self, q: Quantity) -> bool {
        self.outputs.contains(&q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(schema(format!("unsupported version {} (expected {CONFIG_VERSION})", self.version)));
        }
        if self.n < 2 {
            return Err(schema("n must be at least 2"));
        }
        if self.mu_grid.is_empty() {
            return Err(schema("muGrid is empty"));
        }
        if self.mu_grid.iter().any(|m| !m.is_finite()) {
            return Err(schema("muGrid contains a non-finite value"));
        }
        if self.sigma_grid.is_empty() {
            return Err(schema("sigmaGrid is empty"));
        }
        if self.sigma_grid.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(schema("sigmaGrid values must be finite and non-negative"));
        }
        let axes = self.axes();
        if axes.is_empty() {
            return Err(schema("axis list is empty"));
        }
        if axes.iter().any(|a| matches!(a, AxisSpec::PlaneAngle(t) if !t.is_finite())) {
            return Err(schema("planeAngle must be finite"));
        }
        if self.outputs.is_empty() {
            return Err(schema("outputs is empty"));
        }
        let mut sorted = self.outputs.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.outputs.len() {
            return Err(schema("outputs contains duplicates"));
        }
        if self.rule.is_some() && self.l_a_star.is_some() {
            return Err(schema("give either rule or lAstar, not both"));
        }
        if let Some(OutcomeList::Values(v)) = &self.l_a_star {
            if v.is_empty() {
                return Err(schema("lAstar is empty"));
            }
        }
        if let Some([nt, np]) = self.wigner_grid {
            if nt < 2 || np < 2 {
                return Err(schema("wignerGrid needs at least 2 x 2 nodes"));
            }
        }
        match self.average {
            Average::None => self.validate_single_block(),
            avg => self.validate_averaged(avg),
        }
    }

    fn validate_single_block(&self) -> Result<()> {
        let n_a = match self.n_a {
            Some(n_a) => n_a,
            None if self.n.is_multiple_of(2) => self.n / 2,
            None => return Err(schema("n must be even when nA defaults to n/2")),
        };
        if n_a >= self.n {
            return Err(schema(format!("nA = {n_a} leaves no probe particles (n = {})", self.n)));
        }
        if let Some(OutcomeList::Values(v)) = &self.l_a_star {
            if let Some(l) = v.iter().find(|&&l| l > n_a) {
                return Err(schema(format!("lAstar {l} exceeds nA = {n_a}")));
            }
        }
        if let Some(rule) = self.rule {
            if rule.rule().outcome(n_a).is_none() {
                return Err(schema(format!("rule {} selects no outcome at nA = {n_a}", rule.label())));
            }
        }
        if self.n_a_star.is_some() || self.sigma_n.is_some() {
            return Err(schema("nAstar and sigmaN require average = full"));
        }
        if let Some([nt, np]) = self.wigner_grid {
            let n_b = self.n - n_a;
            SphereGrid::new(nt, np)
                .and_then(|g| g.check_resolves(n_b))
                .map_err(|e| schema(format!("wignerGrid: {e}")))?;
        }
        Ok(())
    }

    fn validate_averaged(&self, avg: Average) -> Result<()> {
        if self.n_a.is_some() {
            return Err(schema("nA is fixed only when average = none"));
        }
        if self.l_a_star.is_some() {
            return Err(schema("averaged sweeps select outcomes with a rule, not lAstar"));
        }
        if [Quantity::FqRaw, Quantity::Negativity, Quantity::Wigner].iter().any(|q| self.wants(*q)) {
            return Err(schema("fqRaw, negativity and wigner outputs need average = none"));
        }
        if self.wigner_grid.is_some() {
            return Err(schema("wignerGrid needs average = none"));
        }
        if avg != Average::Full {
            if self.sigma_grid.iter().any(|&s| s != 0.0) {
                return Err(schema("detection noise needs average = full or none"));
            }
            if self.n_a_star.is_some() || self.sigma_n.is_some() {
                return Err(schema("nAstar and sigmaN require average = full"));
            }
        }
        if let Some(s) = self.sigma_n {
            if !(s.is_finite() && s >= 0.0) {
                return Err(schema("sigmaN must be finite and non-negative"));
            }
            if self.n_a_star.is_none() {
                return Err(schema("sigmaN requires nAstar"));
            }
        }
        if let Some(n) = self.n_a_star {
            if n >= self.n {
                return Err(schema(format!("nAstar = {n} must be below n = {}", self.n)));
            }
        }
        Ok(())
    }
}

/// Hex SHA-256 of the canonical JSON form of `configs`.
pub fn config_hash(configs: &[SweepConfig]) -> String {
    let canonical = serde_json::to_vec(configs).expect("configs serialize");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}
