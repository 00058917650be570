use anyhow::{anyhow, Context, Result};
use rlsum::cyclic::FunctionSystem;
use rlsum::lattices::{HyplatDescriptor, LatDescriptorRepr};
use rlsum::operators::{BlockOperatorMatrix, BlockSpec, ConvOperator};
use rlsum::{PowerFn, C64};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::path::Path;

/// Parses `text` as `T`, naming the JSON path and line of the first violation.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        anyhow!("{origin}:{}:{}: at `{}`: {inner}", inner.line(), inner.column(), e.path())
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_json(&text, &path.display().to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemInput {
    pub spec: BlockSpec,
    pub vectors: Vec<Vec<PowerFn>>,
    #[serde(default)]
    pub expect: Option<bool>,
}

impl SystemInput {
    pub fn system(&self) -> Result<FunctionSystem> {
        FunctionSystem::new(self.spec.clone(), self.vectors.clone()).map_err(|e| anyhow!("vectors: {e}"))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecInput {
    pub spec: BlockSpec,
}

/// A matrix given as rows of field strings, or as a Jordan cell sum raised to a power.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInput {
    #[serde(default)]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub cells: Option<Vec<usize>>,
    #[serde(default = "one")]
    pub power: usize,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorInput {
    pub spec: BlockSpec,
    pub descriptor: LatDescriptorRepr,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanInput {
    pub spec: BlockSpec,
    #[serde(default)]
    pub descriptors: Vec<HyplatDescriptor>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipInput {
    pub spec: BlockSpec,
    pub ops: Vec<ConvOperator>,
    #[serde(default)]
    pub expect: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutantInput {
    pub spec: BlockSpec,
    #[serde(default)]
    pub kernels: Option<Vec<Vec<PowerFn>>>,
    #[serde(default)]
    pub matrix: Option<BlockOperatorMatrix>,
    #[serde(default = "six")]
    pub degree: u32,
    #[serde(default)]
    pub expect: Option<bool>,
}

fn six() -> u32 {
    6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarInput {
    pub matrix: Vec<Vec<PowerFn>>,
}

/// Complex numbers as `-1`, `i`, `0.5-2i` or `polar:r,theta`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(rest) = t.strip_prefix("polar:") {
        let (r, th) = rest.split_once(',').ok_or_else(|| anyhow!("polar form needs `r,theta`: {s}"))?;
        return Ok(C64::from_polar(r.parse()?, th.parse()?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(t.parse().with_context(|| format!("bad complex number {s}"))?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let cut = body
        .char_indices()
        .rev()
        .find(|&(i, c)| i > 0 && (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
        .map(|(i, _)| i);
    let im = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().with_context(|| format!("bad imaginary part in {s}")),
        }
    };
    match cut {
        Some(i) => Ok(C64::new(body[..i].parse().with_context(|| format!("bad real part in {s}"))?, im(&body[i..])?)),
        None => Ok(C64::new(0.0, im(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("-1").unwrap(), C64::new(-1.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.5-2i").unwrap(), C64::new(0.5, -2.0));
        assert_eq!(parse_complex("1e-3+1e-3i").unwrap(), C64::new(1e-3, 1e-3));
        assert!((parse_complex("polar:1,0.7853981633974483").unwrap() - C64::new(0.5f64.sqrt(), 0.5f64.sqrt())).norm() < 1e-12);
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn errors_name_the_path() {
        let text = r#"{"spec": {"alpha": "1/0", "blocks": []}}"#;
        let err = parse_json::<SpecInput>(text, "in.json").err().unwrap().to_string();
        assert!(err.contains("spec.alpha"), "{err}");
        let text = "{\n\"spec\": {\"alpha\": \"1\", \"blocks\": [{\"lambda\": {\"re\": 1, \"im\": 0}, \"flavor\": \"Q\"}]}}";
        let err = parse_json::<SpecInput>(text, "in.json").err().unwrap().to_string();
        assert!(err.starts_with("in.json:2:") && err.contains("flavor"), "{err}");
    }

    #[test]
    fn admissibility_is_reported() {
        let text = r#"{"spec": {"alpha": "3/2", "blocks": [{"lambda": {"re": 1, "im": 0}, "k": 3, "flavor": "W"}]}}"#;
        let err = parse_json::<SpecInput>(text, "in.json").err().unwrap().to_string();
        assert!(err.contains("alpha > k - 1/p"), "{err}");
    }
}
