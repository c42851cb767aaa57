import json

import pytest

from wgdoublet.config import config_from_dict, paper_config, paper_config_text, parse_config
from wgdoublet.errors import ConfigError


def base():
    return json.loads(paper_config_text())


def test_paper_config_values(bundled):
    assert bundled.cavity.f_c == 11.77355e9
    assert bundled.cavity.delta0 == 603.0
    assert bundled.sweep.n_b == 201 and bundled.sweep.n_f == 2001
    assert bundled.sweep.b_axis()[0] == -2e-3 and bundled.sweep.b_axis()[-1] == 1e-3
    labels = [ln.label for ln in bundled.medium.lines]
    assert any("quadruple" in s for s in labels)


def test_round_trip_dict(bundled):
    again = config_from_dict(json.loads(json.dumps(bundled.to_dict())))
    assert again == bundled


@pytest.mark.parametrize(
    "path, value, key",
    [
        (("sweep", "n_b"), 0, "sweep.n_b"),
        (("sweep", "n_f"), 1, "sweep.n_f"),
        (("sweep", "b_max_t"), -3e-3, "sweep.b_max_t"),
        (("cavity", "family"), "TE", "cavity.family"),
        (("cavity", "delta0_hz"), -1.0, "cavity.delta0_hz"),
        (("cavity", "f_c_hz"), "fast", "cavity.f_c_hz"),
        (("medium", "eta", "m11"), 2.0, "medium.eta"),
        (("fit", "max_iter"), 1.5, "fit.max_iter"),
        (("noise", "seed"), -1, "noise.seed"),
    ],
)
def test_rejects_with_key_path(path, value, key):
    d = base()
    node = d
    for p in path[:-1]:
        node = node[p]
    node[path[-1]] = value
    with pytest.raises(ConfigError) as info:
        config_from_dict(d)
    assert info.value.key == key


def test_line_entry_path():
    d = base()
    d["medium"]["lines"][1]["gamma_hz"] = 0
    with pytest.raises(ConfigError) as info:
        config_from_dict(d)
    assert info.value.key == "medium.lines[1].gamma_hz"


def test_unknown_and_missing_keys():
    d = base()
    d["cavity"]["colour"] = "blue"
    with pytest.raises(ConfigError, match="cavity.colour"):
        config_from_dict(d)
    d = base()
    del d["sweep"]
    with pytest.raises(ConfigError, match="sweep"):
        config_from_dict(d)


def test_json_syntax_error_reports_line():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config('{\n  "medium": {},\n  oops\n}')


def test_optional_sections_default():
    d = base()
    del d["noise"], d["fit"]
    cfg = config_from_dict(d)
    assert cfg.noise.snr_db is None and cfg.noise.seed == 0
    assert cfg.fit.min_prominence_db == 10.0


def test_single_point_sweep():
    d = base()
    d["sweep"].update(n_b=1, b_max_t=d["sweep"]["b_min_t"])
    cfg = config_from_dict(d)
    assert list(cfg.sweep.b_axis()) == [d["sweep"]["b_min_t"]]


def test_overrides(bundled):
    assert bundled.with_seed(7).noise.seed == 7
    assert bundled.with_snr(20).noise.snr_db == 20
    assert paper_config() == bundled
