import pytest

from steklov_neumann.config import ENV_TAU_0, ENV_TAU_M, ENV_THREADS, ConfigError, load_config, parse_config

CONCENTRIC = "[domain]\nkind = concentric\nR1 = 1\nR2 = 2\n"


def test_defaults():
    cfg = parse_config("solve", CONCENTRIC)
    assert cfg.solver.N == 24 and cfg.solver.conformal
    assert cfg.name == "solve" and cfg.assertions and cfg.plot and cfg.threads == 1


def test_typed_values():
    cfg = parse_config("solve", CONCENTRIC + "[solver]\nN = 32\nconformal = no\nmodes = 5\n")
    assert cfg.solver.N == 32 and not cfg.solver.conformal
    assert cfg.section("solver")["modes"] == 5


def test_grid_forms():
    text = CONCENTRIC + "[grid]\nstart = 0\nstop = 0.9\nnum = 4\n[sweep]\nkind = eccentricity\n"
    assert parse_config("sweep", text.replace("concentric", "eccentric")).grid == pytest.approx((0, 0.3, 0.6, 0.9))
    cfg = parse_config("dumbbell", "[grid]\nvalues = 0.1, 0.05\n")
    assert cfg.grid == (0.1, 0.05)


@pytest.mark.parametrize("text", [
    CONCENTRIC + "[solver]\nNN = 3\n",                      # unknown key
    CONCENTRIC + "[bogus]\nx = 1\n",                        # unknown section
    CONCENTRIC + "[nodal]\nseed = 1\n",                     # section not used by solve
    CONCENTRIC + "[solver]\nN = many\n",                    # wrong type
    CONCENTRIC + "[solver]\nN = 0\n",                       # out of range
    CONCENTRIC + "[solver]\nmode = dirichlet\n",            # bad choice
    CONCENTRIC.replace("R2 = 2", "R2 = 0.5"),               # hole bigger than outer
    CONCENTRIC + "d = 0.3\n",                               # concentric with offset
    "[domain]\nkind = star\nR1 = 0.2\nrho_coefficients = 1, 0.1\n",  # even coefficient count
    "[domain]\nkind = star\nR1 = 0.9\nrho_coefficients = 1, 0, 0, 0.3, 0\n",  # hole not inside
    CONCENTRIC + "[output]\nname = ../escape\n",
    CONCENTRIC.replace("[domain]", "[domain]\nn = 3"),       # solver is planar
    "[solver]\nN = 24\n",                                   # missing domain
    "not an ini file",
])
def test_rejections(text):
    with pytest.raises(ConfigError):
        parse_config("solve", text)


def test_grid_required_and_exclusive():
    base = "[domain]\nkind = eccentric\nR1 = 1\nR2 = 2\n"
    with pytest.raises(ConfigError):
        parse_config("sweep", base)
    with pytest.raises(ConfigError):
        parse_config("sweep", base + "[grid]\nvalues = 0.1\nstart = 0\n")
    with pytest.raises(ConfigError):
        parse_config("sweep", base + "[grid]\nstart = 0\nstop = 1\n")


def test_exact_needs_concentric():
    with pytest.raises(ConfigError):
        parse_config("exact", "[domain]\nkind = eccentric\nR1 = 1\nR2 = 2\nd = 0.5\n")


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv(ENV_THREADS, "3")
    monkeypatch.setenv(ENV_TAU_M, "1e-10")
    monkeypatch.setenv(ENV_TAU_0, "1e-7")
    cfg = parse_config("solve", CONCENTRIC)
    assert cfg.threads == 3 and cfg.solver.tau_M == 1e-10 and cfg.solver.tau_0 == 1e-7


@pytest.mark.parametrize("var,value", [(ENV_THREADS, "0"), (ENV_THREADS, "two"), (ENV_TAU_M, "small")])
def test_bad_environment(monkeypatch, var, value):
    monkeypatch.setenv(var, value)
    with pytest.raises(ConfigError):
        parse_config("solve", CONCENTRIC)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config("solve", tmp_path / "missing.ini")
    p = tmp_path / "a.ini"
    p.write_text(CONCENTRIC)
    with pytest.raises(ConfigError):
        load_config("frobnicate", p)
    assert load_config("solve", p).source == str(p)
