import math

import pytest

from csltrap.config import default_config, extract_embedded, load_config, parse_config
from csltrap.errors import ConfigError
from csltrap.trap import TrapConfig


def test_empty_is_reference():
    c = parse_config("")
    t = c.trap()
    ref = TrapConfig()
    for name in ("kappa", "omega_rf", "z0", "r0", "v_end", "v_rf"):
        assert getattr(t, name) == pytest.approx(getattr(ref, name), rel=1e-14)
    s = c.system()
    assert s.ion1.mass_amu == pytest.approx(138.0)
    assert s.ion2.name == "porphyrin-12"
    assert c.wavelength() == pytest.approx(1762e-9)


def test_sections_and_dotted_keys():
    text = """
    # comment
    [trap]
    v_end = 5.5   # trailing comment
    readout.wavelength_nm = 493
    [csl]
    both_radial = yes
    """
    c = parse_config(text)
    assert c["trap"]["v_end"] == 5.5
    assert c["readout"]["wavelength_nm"] == 493.0
    assert c["csl"]["both_radial"] is True


def test_negative_v_end_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("trap.v_end = -1")
    assert exc.value.key == "trap.v_end" and exc.value.line == 1


def test_unknown_key_named():
    with pytest.raises(ConfigError) as exc:
        parse_config("\n\ntrap.voltage = 3")
    assert "trap.voltage" in str(exc.value)
    assert exc.value.line == 3


@pytest.mark.parametrize("text, line", [
    ("[nope]", 1), ("[trap]\nv_end", 2), ("v_end = 3", 1), ("[trap]\nv_end = abc", 2),
    ("[trap]\nv_end = 1\nv_end = 2", 3), ("[ion1]\ncharge_e = 1.5", 2), ("[csl]\nrc_points = 1", 2),
    ("[trap]\nkappa = 1.5", 2), ("[trap\n", 1), ("[trap]\nv_end =", 2),
])
def test_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line


def test_rc_order_checked():
    with pytest.raises(ConfigError):
        parse_config("[csl]\nrc_min = 1e-2\nrc_max = 1e-3")


def test_ring_model_consistency():
    c = parse_config("[ion2]\nn_rings = 3")
    assert c["ion2"]["mass_amu"] == 3 * 4338.0
    assert c["ion2"]["charge_e"] == 36
    with pytest.raises(ConfigError):
        parse_config("[ion2]\nmass_amu = 1000")
    point = parse_config("[ion2]\nn_rings = 0\nmass_amu = 1000\ncharge_e = 3")
    assert point.ion2().is_point_like
    assert point.ion2().mass_amu == pytest.approx(1000.0)


def test_opposite_charges_rejected():
    with pytest.raises(ConfigError):
        parse_config("[ion2]\nn_rings = 0\ncharge_e = -2")


def test_dump_round_trip():
    c = parse_config("[trap]\nv_rf = 800.125\n[scan]\nvariable = n_rings\nlow = 1")
    again = parse_config(c.dump())
    assert again == c
    assert again.dump() == c.dump()


def test_replace_revalidates():
    c = default_config()
    assert c.replace(csl__tau_s=2.0)["csl"]["tau_s"] == 2.0
    with pytest.raises(ConfigError):
        c.replace(csl__tau_s=-1.0)
    with pytest.raises(ConfigError):
        c.replace(csl__bogus=1)


def test_extract_embedded():
    text = "# csltrap 0.1.0\n# config: [trap]\n# config: v_end = 3.0\nx,y\n1,2\n"
    assert extract_embedded(text) == "[trap]\nv_end = 3.0\n"
    assert extract_embedded("a,b\n") is None


def test_psd_table(tmp_path):
    table = tmp_path / "psd.txt"
    table.write_text("# omega psd\n1e5 1e-14\n1e6 2e-14\n")
    c = parse_config(f"[noise]\npsd_z = {table}")
    assert c.noise().axial(5.5e5) == pytest.approx(1.5e-14)
    with pytest.raises(ConfigError):
        parse_config("[noise]\npsd_z = -1").noise()
    with pytest.raises(ConfigError):
        parse_config(f"[noise]\npsd_z = {tmp_path / 'missing.txt'}").noise()


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.cfg")


def test_scan_spec_defaults_and_overrides():
    c = parse_config("[scan]\nvariable = v_rf\nlow = 300\nhigh = 900\npoints = 7\nscale = log")
    spec = c.scan_spec()
    assert (spec.low, spec.high, spec.points, spec.scale) == (300.0, 900.0, 7, "log")
    other = c.scan_spec("v_end")
    assert other.low == 0.5 and other.high == 30.0
    assert math.isnan(default_config()["scan"]["low"])
    with pytest.raises(ConfigError):
        parse_config("[ion2]\nn_rings = 0").scan_spec("n_rings")
