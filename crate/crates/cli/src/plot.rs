//! matplotlib scripts that render a CSV written next to them.

use std::path::Path;

fn header(csv: &Path) -> String {
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "import os\n\
         import numpy as np\n\
         import matplotlib\n\
         matplotlib.use(\"Agg\")\n\
         import matplotlib.pyplot as plt\n\
         \n\
         here = os.path.dirname(os.path.abspath(__file__))\n\
         data = np.genfromtxt(os.path.join(here, {name:?}), delimiter=\",\", names=True)\n\
         fig, ax = plt.subplots(figsize=(6, 4))\n"
    )
}

fn footer(csv: &Path) -> String {
    let png = csv.with_extension("png");
    let name = png.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "ax.legend(frameon=False)\n\
         fig.tight_layout()\n\
         fig.savefig(os.path.join(here, {name:?}), dpi=150)\n"
    )
}

/// Absorption solid, dispersion dashed.
pub fn spectrum_script(csv: &Path, title: &str) -> String {
    format!(
        "{}ax.plot(data[\"delta\"], data[\"absorption\"], \"k-\", label=\"absorption  -Im chi\")\n\
         ax.plot(data[\"delta\"], data[\"re_chi\"], \"k--\", label=\"dispersion  Re chi\")\n\
         ax.axhline(0.0, color=\"0.7\", lw=0.5)\n\
         ax.set_xlabel(\"delta / beta\")\n\
         ax.set_ylabel(\"chi (arb. units)\")\n\
         ax.set_title({title:?})\n{}",
        header(csv),
        footer(csv)
    )
}

pub fn trajectory_script(csv: &Path, title: &str) -> String {
    format!(
        "{}ax.plot(data[\"t\"], np.hypot(data[\"re_a1\"], data[\"im_a1\"]), \"k-\", label=\"|a1|\")\n\
         ax.plot(data[\"t\"], data[\"re_a1\"], \"b--\", lw=0.8, label=\"Re a1\")\n\
         ax.plot(data[\"t\"], data[\"im_a1\"], \"r:\", lw=0.8, label=\"Im a1\")\n\
         ax.set_xlabel(\"t beta\")\n\
         ax.set_title({title:?})\n{}",
        header(csv),
        footer(csv)
    )
}

pub fn pulse_script(csv: &Path, title: &str) -> String {
    format!(
        "{}ax.plot(data[\"t\"], data[\"abs_E\"], \"k-\", label=\"|E|\")\n\
         ax.set_xlabel(\"t beta\")\n\
         ax.set_title({title:?})\n{}",
        header(csv),
        footer(csv)
    )
}

pub fn dos_script(csv: &Path, title: &str) -> String {
    format!(
        "{}rho = np.where(np.isfinite(data[\"rho\"]), data[\"rho\"], np.nan)\n\
         ax.plot(data[\"x\"], rho, \"k-\", label=\"rho(x)\")\n\
         ax.set_ylim(0.0, 5.0)\n\
         ax.set_xlabel(\"(omega - omega_g) / beta\")\n\
         ax.set_title({title:?})\n{}",
        header(csv),
        footer(csv)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_script_uses_solid_and_dashed_lines() {
        let s = spectrum_script(Path::new("/tmp/out/fig.csv"), "isotropic");
        assert!(s.contains("\"fig.csv\""));
        assert!(s.contains("\"fig.png\""));
        assert!(s.contains("data[\"absorption\"], \"k-\""));
        assert!(s.contains("data[\"re_chi\"], \"k--\""));
    }
}
