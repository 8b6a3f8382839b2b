use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{KripkeFrame, KripkeModel};
use crate::error::{Error, Result};
use crate::formula::VarContext;

/// On-disk model:
/// `{"vars": [..], "worlds": [..], "order": [[a, b], ..], "val": {var: [worlds]}}`.
///
/// `order` may list covers or any relation whose reflexive-transitive closure
/// is a partial order. Written files always list covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub vars: Vec<String>,
    pub worlds: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
}

/// On-disk frame: `{"worlds": [..], "order": [[a, b], ..]}`. Extra keys are
/// ignored, so a model file also reads as its underlying frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameFile {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
}

impl ModelFile {
    pub fn into_model(self) -> Result<KripkeModel> {
        let ctx = VarContext::new(self.vars.iter().cloned())?;
        let frame = KripkeFrame::new(&self.worlds, &self.order)?;
        let mut valuation = vec![Vec::new(); ctx.len()];
        for (var, worlds) in &self.val {
            let k = ctx
                .index_of(var)
                .ok_or_else(|| Error::UnknownVariable(var.clone()))?;
            for w in worlds {
                valuation[k].push(frame.world(w)?);
            }
        }
        KripkeModel::from_valuation(frame, ctx, &valuation)
    }

    pub fn from_model(m: &KripkeModel) -> Self {
        let frame = m.frame();
        let mut order = Vec::new();
        for w in 0..m.len() {
            for &u in frame.covers(w) {
                order.push((m.id(w).to_string(), m.id(u).to_string()));
            }
        }
        let val = m
            .ctx()
            .names()
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let worlds = (0..m.len())
                    .filter(|&w| m.color(w).get(k))
                    .map(|w| m.id(w).to_string())
                    .collect();
                (name.clone(), worlds)
            })
            .collect();
        ModelFile {
            vars: m.ctx().names().to_vec(),
            worlds: frame.ids().to_vec(),
            order,
            val,
        }
    }
}

impl FrameFile {
    pub fn into_frame(self) -> Result<KripkeFrame> {
        KripkeFrame::new(&self.worlds, &self.order)
    }

    pub fn from_frame(f: &KripkeFrame) -> Self {
        let mut order = Vec::new();
        for w in 0..f.len() {
            for &u in f.covers(w) {
                order.push((f.id(w).to_string(), f.id(u).to_string()));
            }
        }
        FrameFile {
            worlds: f.ids().to_vec(),
            order,
        }
    }
}

impl KripkeModel {
    pub fn from_json(text: &str) -> Result<KripkeModel> {
        serde_json::from_str::<ModelFile>(text)?.into_model()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from_model(self)).expect("plain data serializes")
    }
}

impl KripkeFrame {
    pub fn from_json(text: &str) -> Result<KripkeFrame> {
        serde_json::from_str::<FrameFile>(text)?.into_frame()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FrameFile::from_frame(self)).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"vars": ["p1","p2"], "worlds": ["a","b"], "order": [["a","b"]], "val": {"p1": ["b"], "p2": ["b"]}}"#;

    #[test]
    fn reads_the_documented_format() {
        let m = KripkeModel::from_json(SAMPLE).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.color(0).to_string(), "00");
        assert_eq!(m.color(1).to_string(), "11");
        let back = KripkeModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn model_file_reads_as_frame() {
        let f = KripkeFrame::from_json(SAMPLE).unwrap();
        assert!(f.leq(0, 1));
    }

    #[test]
    fn rejects_unknown_names() {
        let bad = r#"{"vars": ["p"], "worlds": ["a"], "order": [], "val": {"q": ["a"]}}"#;
        assert_eq!(
            KripkeModel::from_json(bad).unwrap_err(),
            Error::UnknownVariable("q".into())
        );
        let bad = r#"{"vars": ["p"], "worlds": ["a"], "order": [["a","z"]], "val": {}}"#;
        assert_eq!(
            KripkeModel::from_json(bad).unwrap_err(),
            Error::UnknownWorld("z".into())
        );
    }
}
