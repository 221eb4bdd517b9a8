"""Run-configuration parsing and validation."""

import pytest

from riemhf.config import ConfigError, parse_config, with_overrides

MINIMAL = "molecule = h2.xyz\nbox_length = 16\npoints_per_axis = 32\nn_orbitals = 1\n"


def test_minimal_config_defaults():
    config = parse_config(MINIMAL)
    assert config.molecule_path == "h2.xyz"
    assert config.box_length == 16.0
    assert config.points_per_axis == 32
    assert config.n_orbitals == 1
    assert config.solver == "cg"
    assert config.manifold == "stiefel"
    assert config.guess == "random"
    assert config.softening is None
    assert config.line_search.r == 1e-4
    assert config.line_search.tau == 0.5
    assert config.line_search.gamma == 1.4
    assert config.line_search.alpha_max == 10.0
    assert config.cg.beta_max == 5.0
    assert config.cg.eta_powell == 0.3
    assert config.cg.restart_cooldown == 4
    assert config.stop.update_tol_l2 == 1e-4
    assert config.stop.max_iterations == 200


def test_alpha0_default_depends_on_solver():
    assert parse_config(MINIMAL).line_search.alpha0 == 1.0
    assert parse_config(MINIMAL + "solver = steepest\n").line_search.alpha0 == 0.5
    assert parse_config(MINIMAL + "solver = scf\nalpha0 = 2.0\n").line_search.alpha0 == 2.0


def test_grassmann_manifold_selected():
    config = parse_config(MINIMAL + "solver = cg\nmanifold = grassmann\n")
    assert config.cg.manifold == "grassmann"


def test_comments_and_blank_lines_ignored():
    text = "# a comment\n\nmolecule = m.xyz  # trailing\nbox_length = 8\npoints_per_axis = 16\nn_orbitals = 2\n"
    config = parse_config(text)
    assert config.molecule_path == "m.xyz"
    assert config.n_orbitals == 2


def test_boolean_parsing():
    config = parse_config(MINIMAL + "dump_orbitals = yes\nrestart_on_reject = 0\n")
    assert config.dump_orbitals is True
    assert config.cg.restart_on_reject is False


@pytest.mark.parametrize(
    "extra,excerpt",
    [
        ("colour = blue\n", "unknown key"),
        ("n_orbitals = 2\n", "duplicate key"),
        ("seed = many\n", "cannot parse"),
        ("tau = 1.5\n", "tau"),
        ("solver = newton\n", "solver"),
        ("softening = -0.1\n", "softening"),
        ("box_length = 0\n", None),
        ("points_per_axis = 17\n", None),
    ],
)
def test_config_errors(extra, excerpt):
    if excerpt in ("unknown key", "duplicate key", "cannot parse", "tau", "solver", "softening"):
        text = MINIMAL + extra
    else:
        # replace the conflicting required line instead of duplicating it
        key = extra.split("=")[0].strip()
        lines = [l for l in MINIMAL.splitlines() if not l.startswith(key)]
        text = "\n".join(lines) + "\n" + extra
    with pytest.raises(ConfigError, match=excerpt):
        parse_config(text)


def test_error_reports_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("molecule = m.xyz\ncolour = blue\n")


def test_missing_required_key():
    with pytest.raises(ConfigError, match="missing required key"):
        parse_config("molecule = m.xyz\nbox_length = 8\n")


def test_missing_equals_sign():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just words\n")


def test_with_overrides():
    config = parse_config(MINIMAL)
    assert config.seed == 0
    assert config.out_dir == "."
    updated = with_overrides(config, seed=7, out_dir="results")
    assert updated.seed == 7
    assert updated.out_dir == "results"
    unchanged = with_overrides(config)
    assert unchanged == config
