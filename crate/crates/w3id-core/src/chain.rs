//! Quadruple identifier chains: four records over one object with strictly
//! increasing timestamps.
//!
//! Each record hashes its own `timestamp ‖ object` preimage only; records
//! do not hash over earlier records. Causality is the validation rule that
//! the four timestamps strictly increase in issuance order, checked on the
//! 20-digit strings (lexicographic order equals chronological order).

use crate::error::{Result, W3idError};
use crate::id::{generate, recompute_matches, IdRecord};
use crate::object::CanonicalObject;
use crate::timestamp::MonotonicIssuer;

/// A chain is always exactly four records.
pub const CHAIN_LEN: usize = 4;

/// Four identifier records over one object.
///
/// Construction enforces the shape (exactly four well-formed records);
/// causality is a validation outcome, so chains loaded from disk with
/// disordered timestamps are representable and report as rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadChain {
    records: Vec<IdRecord>,
}

impl QuadChain {
    pub fn new(records: Vec<IdRecord>) -> Result<Self> {
        if records.len() != CHAIN_LEN {
            return Err(W3idError::MalformedChain(format!(
                "expected {CHAIN_LEN} records, got {}",
                records.len()
            )));
        }
        for (i, record) in records.iter().enumerate() {
            record
                .validate()
                .map_err(|e| W3idError::MalformedChain(format!("record {}: {e}", i + 1)))?;
        }
        Ok(QuadChain { records })
    }

    pub fn records(&self) -> &[IdRecord] {
        &self.records
    }

    /// JSON array of the four sidecar records, order significant.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.records).expect("chain serializes")
    }

    /// Parse a chain file; arrays of any length other than four are
    /// rejected, as is any malformed member.
    pub fn from_json(s: &str) -> Result<Self> {
        let records: Vec<IdRecord> =
            serde_json::from_str(s).map_err(|e| W3idError::MalformedChain(e.to_string()))?;
        QuadChain::new(records)
    }
}

/// Which records must recompute correctly for a chain to be accepted.
/// Causality must hold under either policy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ValidationPolicy {
    /// All four records must match (the strict default).
    #[default]
    AllFour,
    /// Some window of three adjacent records must all match.
    ThreeConsecutive,
}

impl ValidationPolicy {
    fn accepts(&self, matches: &[bool; CHAIN_LEN]) -> bool {
        match self {
            ValidationPolicy::AllFour => matches.iter().all(|&m| m),
            ValidationPolicy::ThreeConsecutive => {
                matches.windows(3).any(|w| w.iter().all(|&m| m))
            }
        }
    }
}

impl std::fmt::Display for ValidationPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationPolicy::AllFour => f.write_str("all-four"),
            ValidationPolicy::ThreeConsecutive => f.write_str("three-consecutive"),
        }
    }
}

/// Outcome of validating one chain against one object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub per_record_match: [bool; CHAIN_LEN],
    pub causality_ok: bool,
    pub accepted: bool,
    pub policy: ValidationPolicy,
}

/// Issue four records over the object; timestamps strictly increase by
/// construction of the issuer.
pub fn generate_chain(obj: &CanonicalObject, issuer: &MonotonicIssuer) -> Result<QuadChain> {
    let mut records = Vec::with_capacity(CHAIN_LEN);
    for _ in 0..CHAIN_LEN {
        records.push(generate(&issuer.next()?, obj));
    }
    Ok(QuadChain { records })
}

/// Recompute every record against the object and check time progression.
/// Acceptance requires the policy's match rule AND causality.
pub fn validate_chain(
    chain: &QuadChain,
    obj: &CanonicalObject,
    policy: ValidationPolicy,
) -> Result<ChainReport> {
    let mut per_record_match = [false; CHAIN_LEN];
    for (i, record) in chain.records.iter().enumerate() {
        per_record_match[i] = recompute_matches(record, obj)
            .map_err(|e| W3idError::MalformedChain(format!("record {}: {e}", i + 1)))?;
    }
    let causality_ok = chain
        .records
        .windows(2)
        .all(|pair| pair[0].timestamp.format() < pair[1].timestamp.format());
    let accepted = policy.accepts(&per_record_match) && causality_ok;
    Ok(ChainReport { per_record_match, causality_ok, accepted, policy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timestamp::{ManualClock, Timestamp};
    use std::sync::Arc;

    fn frozen_issuer() -> MonotonicIssuer {
        let ts = Timestamp::parse("20230503194715925404").unwrap();
        MonotonicIssuer::new(Arc::new(ManualClock::new(ts)))
    }

    fn corrupt_hex_digit(record: &mut IdRecord, pos: usize) {
        let mut bytes = record.w3id.clone().into_bytes();
        bytes[pos] = if bytes[pos] == b'0' { b'1' } else { b'0' };
        record.w3id = String::from_utf8(bytes).unwrap();
    }

    #[test]
    fn generated_chain_has_four_distinct_increasing_records() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        assert_eq!(chain.records().len(), 4);

        let hashes: std::collections::HashSet<_> =
            chain.records().iter().map(|r| r.w3id.clone()).collect();
        assert_eq!(hashes.len(), 4);

        for pair in chain.records().windows(2) {
            assert!(pair[0].timestamp < pair[1].timestamp);
            assert_eq!(
                pair[1].timestamp.to_epoch_micros() - pair[0].timestamp.to_epoch_micros(),
                1
            );
        }
    }

    #[test]
    fn two_chains_over_one_object_share_no_hashes() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let issuer = frozen_issuer();
        let first = generate_chain(&obj, &issuer).unwrap();
        let second = generate_chain(&obj, &issuer).unwrap();
        let all: std::collections::HashSet<_> = first
            .records()
            .iter()
            .chain(second.records())
            .map(|r| r.w3id.clone())
            .collect();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn own_chain_validates_under_both_policies() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        for policy in [ValidationPolicy::AllFour, ValidationPolicy::ThreeConsecutive] {
            let report = validate_chain(&chain, &obj, policy).unwrap();
            assert!(report.accepted);
            assert!(report.causality_ok);
            assert_eq!(report.per_record_match, [true; 4]);
        }
    }

    #[test]
    fn swapped_records_fail_causality() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        let mut records = chain.records().to_vec();
        records.swap(1, 2);
        let swapped = QuadChain::new(records).unwrap();
        for policy in [ValidationPolicy::AllFour, ValidationPolicy::ThreeConsecutive] {
            let report = validate_chain(&swapped, &obj, policy).unwrap();
            assert!(!report.causality_ok);
            assert!(!report.accepted);
        }
    }

    #[test]
    fn first_record_corruption_passes_only_three_consecutive() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        let mut records = chain.records().to_vec();
        corrupt_hex_digit(&mut records[0], 10);
        let damaged = QuadChain::new(records).unwrap();

        let lenient =
            validate_chain(&damaged, &obj, ValidationPolicy::ThreeConsecutive).unwrap();
        assert_eq!(lenient.per_record_match, [false, true, true, true]);
        assert!(lenient.accepted);

        let strict = validate_chain(&damaged, &obj, ValidationPolicy::AllFour).unwrap();
        assert!(!strict.accepted);
    }

    #[test]
    fn middle_record_corruption_fails_both_policies() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        let mut records = chain.records().to_vec();
        corrupt_hex_digit(&mut records[2], 0);
        let damaged = QuadChain::new(records).unwrap();
        for policy in [ValidationPolicy::AllFour, ValidationPolicy::ThreeConsecutive] {
            assert!(!validate_chain(&damaged, &obj, policy).unwrap().accepted);
        }
    }

    #[test]
    fn tampered_object_fails_every_record() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        let other = CanonicalObject::ingest(&b"chainee"[..]);
        let report = validate_chain(&chain, &other, ValidationPolicy::ThreeConsecutive).unwrap();
        assert_eq!(report.per_record_match, [false; 4]);
        assert!(!report.accepted);
    }

    #[test]
    fn chain_json_round_trips_and_rejects_wrong_length() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        let json = chain.to_json();
        assert_eq!(QuadChain::from_json(&json).unwrap(), chain);

        let three: Vec<IdRecord> = chain.records()[..3].to_vec();
        let short = serde_json::to_string(&three).unwrap();
        assert!(matches!(QuadChain::from_json(&short), Err(W3idError::MalformedChain(_))));
        assert!(matches!(QuadChain::from_json("[]"), Err(W3idError::MalformedChain(_))));
        assert!(matches!(QuadChain::from_json("not json"), Err(W3idError::MalformedChain(_))));
    }

    #[test]
    fn new_rejects_malformed_members() {
        let obj = CanonicalObject::ingest(&b"chained"[..]);
        let chain = generate_chain(&obj, &frozen_issuer()).unwrap();
        let mut records = chain.records().to_vec();
        records[3].w3id.truncate(63);
        assert!(matches!(QuadChain::new(records), Err(W3idError::MalformedChain(_))));
    }
}
