//! Desk-scale experiment presets shipped with the repository.

/// `(name, JSON)` of every preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig3a-desk", include_str!("../../../../presets/fig3a-desk.json")),
    ("fig3b-desk", include_str!("../../../../presets/fig3b-desk.json")),
    ("fig3c-desk", include_str!("../../../../presets/fig3c-desk.json")),
    ("fig3d-desk", include_str!("../../../../presets/fig3d-desk.json")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, j)| *j)
}
