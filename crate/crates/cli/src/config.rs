//! Flat `key = value` configuration files with `[section]` headers.
//!
//! Keys before the first header belong to `[global]`. A key is the long name of a command-line
//! flag, with `_` accepted for `-`. Lines starting with `#` or `;` are comments.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = "global".to_string();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| format!("line {}: unterminated section header", n + 1))?
                    .trim();
                if name.is_empty() {
                    return Err(format!("line {}: empty section name", n + 1));
                }
                current = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                return Err(format!("line {}: empty key", n + 1));
            }
            sections.entry(current.clone()).or_default().insert(key, v.trim().to_string());
        }
        Ok(Self { sections })
    }

    /// The entries of `section` as command-line flags.
    pub fn flags_for(&self, section: &str) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(entries) = self.sections.get(section) {
            for (k, v) in entries.iter().filter(|(k, _)| k.as_str() != "config") {
                out.push(format!("--{k}"));
                out.push(v.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let c = ConfigFile::parse("seed = 7\n# note\n[ec]\nfield=two_bump\nlevel = 0.3,0.5\n\n[moments]\nreps=10\n").unwrap();
        assert_eq!(c.flags_for("global"), ["--seed", "7"]);
        assert_eq!(c.flags_for("ec"), ["--field", "two_bump", "--level", "0.3,0.5"]);
        assert_eq!(c.flags_for("moments"), ["--reps", "10"]);
        assert!(c.flags_for("validate").is_empty());
    }

    #[test]
    fn underscores_become_dashes_and_errors_report_lines() {
        let c = ConfigFile::parse("[primitive]\nec_resolution = 512\n").unwrap();
        assert_eq!(c.flags_for("primitive"), ["--ec-resolution", "512"]);
        assert!(ConfigFile::parse("[ec\n").unwrap_err().contains("line 1"));
        assert!(ConfigFile::parse("x\n").unwrap_err().contains("line 1"));
    }
}
