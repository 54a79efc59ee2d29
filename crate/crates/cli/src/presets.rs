//! Built-in configurations, written in the config format itself.

pub const PRESETS: &[(&str, &str)] = &[
    ("classical", "forcing {\n    family = plateau\n    a = 1\n}\n"),
    ("empty", "forcing {\n    family = zero\n    lo = -1\n    hi = 1\n}\n"),
    ("figure1-a1", "forcing {\n    family = plateau\n    a = 1\n}\n"),
    ("figure1-a1.8", "forcing {\n    family = plateau\n    a = 1.8\n}\n"),
    ("figure1-a2", "forcing {\n    family = plateau\n    a = 2\n}\n"),
    ("figure1-a2.2", "forcing {\n    family = plateau\n    a = 2.2\n}\n"),
    ("figure2-a4", "forcing {\n    family = reversed-plateau\n    a = 4\n}\n"),
    ("dead-band", "forcing {\n    family = dead-band\n    b = 0.5\n}\n"),
    ("dead-core", "forcing {\n    family = cubic-dead-core\n    b = 0.5\n}\n"),
    ("affine", "forcing {\n    family = affine\n    a = 2.5\n}\n"),
    (
        "power-law-mild",
        "forcing {\n    family = power-law\n    radius = 1\n    r0 = 0.5\n    f-plus = 1\n    c = 0.1\n    beta = 0.5\n}\n",
    ),
    (
        "power-law-steep",
        "forcing {\n    family = power-law\n    radius = 1\n    r0 = 0.9\n    f-plus = 1\n    c = 0.01\n    beta = 1.5\n}\n",
    ),
    (
        "disk-certificate",
        "forcing {
    domain = 0 1
    piece {
        lo = 0
        hi = 0.8
        constant = 1
    }
    piece {
        lo = 0.8
        hi = 1
        constant = -0.05
    }
}
rho = 0.1
alpha = 2
mesh {
    kind = disk
    n = 128
    dim = 2
}
compact {
    shape = ball
    radius = 0.625
}
",
    ),
    (
        "interval-certificate",
        "forcing {
    domain = -1 1
    piece {
        lo = -1
        hi = -0.625
        constant = -0.02
    }
    piece {
        lo = -0.625
        hi = 0.625
        constant = 1
    }
    piece {
        lo = 0.625
        hi = 1
        constant = -0.02
    }
}
rho = 0.0625
alpha = 2.5
mesh {
    kind = interval
    n = 256
}
compact {
    shape = segment
    lo = -0.5
    hi = 0.5
}
",
    ),
    (
        "semilinear",
        "forcing {\n    family = plateau-unit\n    a = 2\n}\nsemilinear {\n    lambda = 0\n    alpha = 0.5\n}\n",
    ),
    (
        "semilinear-resonant",
        "forcing {\n    family = plateau-unit\n    a = 2\n}\nsemilinear {\n    lambda = 3\n    alpha = 0.5\n}\n",
    ),
    (
        "parabolic",
        "forcing {
    family = plateau-unit
    a = 2
}
mesh {
    kind = interval
    n = 512
}
parabolic {
    initial = phi2
    dt = 1e-4
    theta = 0.5
    horizon = 4
    decay-horizon = 1
}
",
    ),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn every_preset_parses() {
        for (name, text) in PRESETS {
            RunConfig::from_text(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
