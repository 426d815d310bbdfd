//! Bundled experiment configs.

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

pub const RECIPES: &[(&str, &str)] = &[
    ("convection_fig1", include_str!("../../recipes/convection_fig1.conf")),
    ("parabolic_fig2", include_str!("../../recipes/parabolic_fig2.conf")),
    ("burgers_fig3", include_str!("../../recipes/burgers_fig3.conf")),
    ("vorticity_fig4", include_str!("../../recipes/vorticity_fig4.conf")),
    ("burgers_desk", include_str!("../../recipes/burgers_desk.conf")),
    ("vorticity_converge", include_str!("../../recipes/vorticity_converge.conf")),
    ("parabolic_converge", include_str!("../../recipes/parabolic_converge.conf")),
];

pub fn recipe_text(name: &str) -> Option<&'static str> {
    RECIPES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn recipe(name: &str) -> Result<ExperimentConfig> {
    recipe_text(name)
        .ok_or_else(|| Error::config("recipe", format!("no bundled recipe named `{name}`")))?
        .parse()
}
