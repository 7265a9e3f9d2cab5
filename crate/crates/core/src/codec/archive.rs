//! JSON files for a compressed database: the archive (tokens and residuals)
//! and the code set it refers to. Together they decode losslessly.

use serde::{Deserialize, Serialize};

use super::{CodeSet, EncodedDatabase, EncodedSequence, RuleUsage};
use crate::error::{Error, Result};
use crate::rulemine::{canonical_cmp, MinedRule, RuleRecord};

const ARCHIVE_FORMAT: &str = "comsr-archive";
const CODESET_FORMAT: &str = "comsr-codeset";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct ArchiveFile {
    pub format: String,
    pub version: u32,
    pub sequences: Vec<EncodedSequence>,
    pub usage: Vec<RuleUsage>,
}

impl ArchiveFile {
    pub fn to_json(enc: &EncodedDatabase) -> Result<String> {
        let file = ArchiveFile {
            format: ARCHIVE_FORMAT.into(),
            version: VERSION,
            sequences: enc.sequences.clone(),
            usage: enc.usage.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<EncodedDatabase> {
        let file: ArchiveFile = serde_json::from_str(text)?;
        check_header(&file.format, file.version, ARCHIVE_FORMAT)?;
        Ok(EncodedDatabase {
            sequences: file.sequences,
            usage: file.usage,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IndexedRule {
    pub index: usize,
    #[serde(flatten)]
    pub rule: RuleRecord,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CodeSetFile {
    pub format: String,
    pub version: u32,
    pub rules: Vec<IndexedRule>,
}

impl CodeSetFile {
    pub fn to_json(code: &CodeSet) -> Result<String> {
        let file = CodeSetFile {
            format: CODESET_FORMAT.into(),
            version: VERSION,
            rules: code
                .rules()
                .iter()
                .enumerate()
                .map(|(index, m)| IndexedRule {
                    index,
                    rule: m.clone().into(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Reads a code set. Indices must be exactly `0..n` and the rules must
    /// already be in canonical order.
    pub fn from_json(text: &str) -> Result<CodeSet> {
        let mut file: CodeSetFile = serde_json::from_str(text)?;
        check_header(&file.format, file.version, CODESET_FORMAT)?;
        file.rules.sort_by_key(|r| r.index);
        if let Some((i, r)) = file.rules.iter().enumerate().find(|(i, r)| r.index != *i) {
            return Err(Error::Decode(format!("code set index {} found where {i} expected", r.index)));
        }
        let rules = file
            .rules
            .into_iter()
            .map(|r| MinedRule::try_from(r.rule))
            .collect::<Result<Vec<_>>>()?;
        if let Some(w) = rules.windows(2).find(|w| canonical_cmp(&w[0], &w[1]).is_gt()) {
            return Err(Error::Decode(format!(
                "code set is not in canonical order at {}",
                w[1].rule
            )));
        }
        CodeSet::from_canonical(rules)
    }
}

fn check_header(format: &str, version: u32, want: &str) -> Result<()> {
    if format != want {
        return Err(Error::Decode(format!("expected format {want:?}, found {format:?}")));
    }
    if version != VERSION {
        return Err(Error::Decode(format!("unsupported {want} version {version}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::tests::{merged_code, two_sequences};
    use crate::codec::{cover_database, decode, CoverPolicy};

    #[test]
    fn archive_pair_round_trips() {
        let db = two_sequences();
        let code = merged_code(&db);
        let enc = cover_database(&code, &db, CoverPolicy::Repeat).unwrap();

        let archive = ArchiveFile::to_json(&enc).unwrap();
        let codeset = CodeSetFile::to_json(&code).unwrap();
        assert!(archive.contains("\"kind\": \"full\""));
        assert!(codeset.contains("\"index\": 0"));

        let enc2 = ArchiveFile::from_json(&archive).unwrap();
        let code2 = CodeSetFile::from_json(&codeset).unwrap();
        assert_eq!(enc2, enc);
        assert_eq!(code2, code);
        assert_eq!(decode(&enc2, &code2).unwrap(), db);
    }

    #[test]
    fn wrong_format_rejected() {
        let db = two_sequences();
        let codeset = CodeSetFile::to_json(&merged_code(&db)).unwrap();
        assert!(ArchiveFile::from_json(&codeset).is_err());
    }

    #[test]
    fn out_of_order_code_set_rejected() {
        let db = two_sequences();
        let json = CodeSetFile::to_json(&merged_code(&db)).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rules = value["rules"].as_array_mut().unwrap();
        rules[0]["index"] = 2.into();
        rules[2]["index"] = 0.into();
        assert!(CodeSetFile::from_json(&value.to_string()).is_err());
    }
}
