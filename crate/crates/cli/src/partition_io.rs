//! Partition artifact: TSV `token_id<TAB>{high|low|unscored}` sorted by id.
//! The rows cover the native overlap exactly, so the file is self-contained.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

use overlap_core::types::{OverlapPartition, TokenId};

pub fn render(partition: &OverlapPartition, header: &str) -> String {
    let mut out = String::new();
    out.push_str(header);
    let _ = writeln!(
        out,
        "# native={} high={} low={} unscored={}",
        partition.native().len(),
        partition.high().len(),
        partition.low().len(),
        partition.unscored().len()
    );
    for id in partition.native() {
        let class = if partition.high().contains(id) {
            "high"
        } else if partition.low().contains(id) {
            "low"
        } else {
            "unscored"
        };
        let _ = writeln!(out, "{id}\t{class}");
    }
    out
}

pub fn load(path: &Path) -> Result<OverlapPartition> {
    let content = std::fs::read_to_string(path)
        .with_context(|| format!("reading partition {}", path.display()))?;
    let mut native = BTreeSet::new();
    let mut high = BTreeSet::new();
    let mut low = BTreeSet::new();
    let mut unscored = BTreeSet::new();
    for (idx, line) in content.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, class) = line.split_once('\t').ok_or_else(|| {
            anyhow!(
                "{}:{}: expected token_id<TAB>class",
                path.display(),
                idx + 1
            )
        })?;
        let id: u32 = id.parse().map_err(|_| {
            anyhow!("{}:{}: malformed token id {id:?}", path.display(), idx + 1)
        })?;
        let id = TokenId(id);
        native.insert(id);
        match class {
            "high" => {
                high.insert(id);
            }
            "low" => {
                low.insert(id);
            }
            "unscored" => {
                unscored.insert(id);
            }
            other => {
                return Err(anyhow!(
                    "{}:{}: unknown class {other:?}",
                    path.display(),
                    idx + 1
                ))
            }
        }
    }
    OverlapPartition::new(native, high, low, unscored)
        .map_err(|e| anyhow!("{}: {e}", path.display()))
}
