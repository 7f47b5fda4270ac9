import pytest

from relaylab.analysis import ChiTail, OutageKind
from relaylab.exceptions import ConfigurationError
from relaylab.harness import ExperimentConfig, load_config, parse_config
from relaylab.harness.config import parse_text
from relaylab.simulation import Combining

G2_TEXT = """
# unit variances, two relays
profile.n_relays = 2
profile.sigma2_f = 1
profile.sigma2_g = 1.0
budget.rho_db = 0:2:40      # dB
budget.max_rounds = 5
analysis.methods = exact, direct
analysis.l_values = 5
sim.enabled = true
sim.trials = 100000
sim.seed = 7
"""


@pytest.fixture
def g2_config():
    return parse_config(G2_TEXT)


def test_parse_full_config(g2_config):
    cfg = g2_config
    assert cfg.profile.n_relays == 2
    assert cfg.profile.sigma2_f == (1.0, 1.0)
    assert cfg.rho_db[0] == 0.0 and cfg.rho_db[-1] == 40.0
    assert len(cfg.rho_db) == 21
    assert cfg.methods == (OutageKind.EXACT, OutageKind.DIRECT)
    assert cfg.l_values == (5,)
    assert cfg.sim_enabled
    assert cfg.trials == 100_000
    assert cfg.seed == 7
    assert cfg.combining == Combining.ALAMOUTI


def test_budgets_are_linear(g2_config):
    budgets = g2_config.budgets
    assert budgets[0].rho == 1.0
    assert abs(budgets[5].rho - 10.0) < 1e-12
    assert all(b.max_rounds == 5 and b.rate == 1.0 for b in budgets)


def test_per_relay_variances():
    cfg = parse_config("profile.n_relays = 3\nprofile.sigma2_f = 1, 2, 0.5\nbudget.rho_db = 10\n")
    assert cfg.profile.sigma2_f == (1.0, 2.0, 0.5)
    assert cfg.profile.sigma2_g == (1.0, 1.0, 1.0)


def test_l_values_default_to_last_round():
    cfg = parse_config("budget.rho_db = 0, 5\nbudget.max_rounds = 3\n")
    assert cfg.l_values == (3,)
    assert cfg.with_overrides(max_rounds=4).l_values == (4,)


def test_round_trip_through_text(g2_config):
    assert parse_config(g2_config.to_text()) == g2_config

    odd = parse_config(
        "profile.n_relays = 2\nprofile.sigma2_f = 0.3, 1.7\nprofile.sigma2_g = 2.5\nprofile.sigma2_f0 = 0.1\n"
        "budget.rho_db = -3.5, 0.1, 12.25\nbudget.rate = 1.5\nanalysis.methods = upper_bound\n"
        "analysis.chi_tail = collapsed\nanalysis.rho_max = 0.001\noutput.path = out/x.csv\noutput.timing = true\n"
    )
    again = parse_config(odd.to_text())
    assert again == odd
    assert again.to_text() == odd.to_text()


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("budget.rho_db = 0\nprofile.colour = red\n", "unknown key"),
        ("budget.rho_db = 0\nbudget.rho_db = 1\n", "duplicate key"),
        ("budget.rho_db 0\n", "expected 'key = value'"),
        ("profile.n_relays = 2\n", "budget.rho_db is required"),
        ("budget.rho_db = 0:-1:5\n", "budget.rho_db"),
        ("budget.rho_db = 0\nbudget.max_rounds = 0\n", "budget.max_rounds"),
        ("budget.rho_db = 0\nanalysis.methods = magic\n", "analysis.methods"),
        ("budget.rho_db = 0\nprofile.n_relays = 2\nprofile.sigma2_f = 1, 2, 3\n", "profile"),
        ("budget.rho_db = 0\nsim.enabled = true\nsim.trials = 10\n", "at least 1000 trials"),
        ("budget.rho_db = 0\nanalysis.l_values = 6\n", "outside 1..5"),
        ("budget.rho_db = 0\nanalysis.methods = asymptotic\nanalysis.l_values = 1\n", "l >= 2"),
        ("budget.rho_db = 0, 0\n", "repeated"),
        ("budget.rho_db = 0\nanalysis.rho_max = 0\n", "analysis.rho_max"),
    ],
)
def test_invalid_configs(text, fragment):
    with pytest.raises(ConfigurationError, match=fragment):
        parse_config(text)


def test_parse_text_strips_comments():
    assert parse_text("# header\n\nsim.seed = 3   # trailing\n") == {"sim.seed": "3"}


def test_overrides_validate():
    cfg = parse_config("budget.rho_db = 0\n")
    updated = cfg.with_overrides(seed=11, trials=None, chi_tail=ChiTail.COLLAPSED)
    assert updated.seed == 11
    assert updated.trials == cfg.trials
    assert updated.chi_tail == ChiTail.COLLAPSED
    with pytest.raises(ConfigurationError):
        cfg.with_overrides(sim_enabled=True, trials=5)


def test_load_config(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(G2_TEXT, encoding="utf-8")
    assert isinstance(load_config(path), ExperimentConfig)
    with pytest.raises(ConfigurationError, match="Cannot read"):
        load_config(tmp_path / "missing.cfg")
