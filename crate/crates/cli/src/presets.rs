//! Scene configs bundled into the binary.

use crate::config::SceneConfig;
use crate::Failure;

const PRESETS: &[(&str, &str)] = &[
    ("example1", include_str!("../presets/example1.json")),
    ("example1b", include_str!("../presets/example1b.json")),
    ("example1-perturbed", include_str!("../presets/example1-perturbed.json")),
    ("example2", include_str!("../presets/example2.json")),
    ("example2b", include_str!("../presets/example2b.json")),
    ("example3", include_str!("../presets/example3.json")),
    ("example3b", include_str!("../presets/example3b.json")),
    ("example4", include_str!("../presets/example4.json")),
    ("example4b", include_str!("../presets/example4b.json")),
    ("example4b-caption", include_str!("../presets/example4b-caption.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<SceneConfig, Failure> {
    let text = source(name).ok_or_else(|| {
        Failure::Validation(format!(
            "unknown preset '{name}'; available: {}",
            names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    SceneConfig::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_names_itself() {
        for name in names() {
            let cfg = load(name).unwrap();
            assert_eq!(cfg.name.as_deref(), Some(name));
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(load("example9"), Err(Failure::Validation(_))));
    }
}
