import io
import math

import numpy as np
import pytest

from omo.checks import CHECKS, format_table, run_checks
from omo.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, MapSpecError, main, parse_map_spec
from omo.config import ConfigError, parse_config
from omo.domain import Box
from omo.equilibrium import read_pool
from omo.integral import QuadratureRule
from omo.maps import AffineMap, QuadraticGradient
from omo.plot import svg_lines
from omo.regret import read_trace_csv


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# -- config -------------------------------------------------------------


def test_defaults_are_resolved():
    cfg = parse_config("")
    assert (cfg.family, cfg.n_firms, cfg.controls_per_firm, cfg.dim) == ("mln", 5, 2, 10)
    assert cfg.items()["eta"] == "auto"
    sc = parse_config("[network]\nfamily = supply-chain\n")
    assert (sc.n_firms, sc.controls_per_firm) == (3, 2)


def test_config_sections_and_types():
    cfg = parse_config("[experiment]\nT = 25\nseed = 4\n[learner]\nalgo = omod\neta = 0.2\n"
                       "[domain]\ndomain = ball\nradius = 2\n[network]\nd_range = -2, 2\n")
    assert (cfg.T, cfg.seed, cfg.algo, cfg.eta, cfg.radius, cfg.d_range) == (25, 4, "omod", "0.2", 2.0, (-2.0, 2.0))
    assert cfg.make_domain().radius == 2.0


@pytest.mark.parametrize("text", [
    "[experiment]\nT = 0\n",
    "[experiment]\nbogus = 1\n",
    "[nonsense]\nT = 1\n",
    "[experiment]\nT = many\n",
    "[learner]\neta = -1\n",
    "[learner]\nalgo = omod\nregularizer = entropy\n",
    "[network]\nfamily = roads\n",
    "[quadrature]\nnodes = 1\n",
    "[domain]\ndomain = torus\n",
    "[domain]\nlower = 0 0 0\n",
    "[experiment]\ncomparator = oracle\n",
    "not an ini file",
])
def test_bad_configs_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_overrides_win():
    assert parse_config("[experiment]\nseed = 1\n", {"seed": 9, "out": None}).seed == 9


# -- map specs ----------------------------------------------------------


def test_map_spec_parsing():
    F = parse_map_spec("affine:A=[[1,2],[3,4]];b=[0,1]")
    assert isinstance(F, AffineMap)
    np.testing.assert_array_equal(F.A, [[1, 2], [3, 4]])
    assert isinstance(parse_map_spec("quadratic: Q=[[2,0],[0,2]]; c=[0,0]"), QuadraticGradient)
    assert parse_map_spec("Saddle").name == "saddle"


@pytest.mark.parametrize("text,line,col", [
    ("affne", 1, 1),
    ("affine:A=[[1,0],[0,1]];b=[0,0", 1, 30),
    ("affine:A=[[1,0],\n[0,x]];b=[0,0]", 2, 4),
    ("affine:A=[[1]];z=[1]", 1, 16),
    ("affine:A=[[1]]", 1, 15),
])
def test_map_spec_errors_have_positions(text, line, col):
    with pytest.raises(MapSpecError) as info:
        parse_map_spec(text)
    assert (info.value.line, info.value.column) == (line, col)


# -- integrate ----------------------------------------------------------


def test_integrate_saddle(capsys):
    code, out, _ = run(["integrate", "saddle", "--a", "1,1", "--b", "0,0"], capsys)
    assert code == EXIT_OK
    value = float(out.split("integral = ")[1].split()[0])
    assert value == pytest.approx(-2 / 3, abs=1e-15)
    assert "eps_q = 1e-09" in out


def test_integrate_zero_and_green(capsys):
    assert "integral = 0.0" in run(["integrate", "saddle", "--a", "0.2,0.4", "--b", "[0.2, 0.4]"], capsys)[1]
    total = 0.0
    for a, b in (("0,0", "1,0"), ("1,0", "0,1"), ("0,1", "0,0")):
        out = run(["integrate", "rotation2d", "--a", a, "--b", b], capsys)[1]
        total += float(out.split("integral = ")[1].split()[0])
    assert total == pytest.approx(1.0, abs=1e-14)


def test_integrate_errors(capsys):
    code, _, err = run(["integrate", "affine:A=[[1]];b=[0", "--a", "0", "--b", "1"], capsys)
    assert code == EXIT_CONFIG and "line 1, column" in err
    assert run(["integrate", "saddle", "--a", "1,2,3", "--b", "0,0"], capsys)[0] == EXIT_CONFIG
    assert run(["integrate", "saddle", "--a", "1,1", "--b", "0,0", "--nodes", "1"], capsys)[0] == EXIT_CONFIG


# -- verify -------------------------------------------------------------


def test_verify_passes(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == EXIT_OK
    assert f"{len(CHECKS)}/{len(CHECKS)} checks passed" in out


def test_verify_injected_nonmonotone(capsys):
    code, out, _ = run(["verify", "--inject-nonmonotone"], capsys)
    assert code == EXIT_CHECK
    line = next(ln for ln in out.splitlines() if ln.startswith("monotonicity of map families"))
    assert "FAIL" in line and "injected" in line


def test_verify_single_node(capsys):
    code, out, _ = run(["verify", "--quad-nodes", "1"], capsys)
    assert code == EXIT_CHECK
    failed = [ln.split("  ")[0] for ln in out.splitlines() if "  FAIL  " in ln]
    assert "saddle loss closed form" in failed
    # one-point Gauss-Legendre is still exact for affine integrands
    assert not any(name.startswith("psd-affine") for name in failed)


def test_check_table_format():
    res = run_checks()
    assert all(r.passed for r in res)
    table = format_table(res)
    assert table.count("PASS") == len(CHECKS)
    bad = run_checks(QuadratureRule.unchecked("trapezoid", 1))
    assert any(not r.passed and r.name.startswith("psd-affine") for r in bad)


# -- run / gen ----------------------------------------------------------


SMALL = "[experiment]\nT = 60\n[network]\npool_size = 3\nfamily = supply-chain\n"


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "o"
    code, _, _ = run(["run", "--config", write(tmp_path, SMALL), "--seed", "5", "--out", str(out)], capsys)
    assert code == EXIT_OK
    cols = read_trace_csv(open(out / "trace.csv"))
    assert len(cols["t"]) == 60
    np.testing.assert_array_equal(cols["t"], np.arange(1, 61))
    meta = dict(ln.split(" = ", 1) for ln in (out / "metadata.txt").read_text().splitlines())
    for key in ("seed", "seed_scheme", "u_T", "pool_residual_max", "eps_q", "eta_resolved", "u_T_caveat",
                "quad_nodes", "solver_tol", "solver_gamma", "solver_max_iter", "comparator", "domain_resolved"):
        assert key in meta, key
    assert meta["seed"] == "5" and meta["status"] == "ok"
    assert float(meta["pool_residual_max"]) <= 1e-8
    svg = (out / "plot.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 3
    pool = read_pool(open(out / "pool.txt"), Box.unit(6), n_firms=3, controls_per_firm=2)
    assert len(pool) == 3


def test_run_is_byte_identical(tmp_path, capsys):
    cfg = write(tmp_path, SMALL)
    run(["run", "--config", cfg, "--out", str(tmp_path / "a")], capsys)
    run(["run", "--config", cfg, "--out", str(tmp_path / "b")], capsys)
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()


def test_run_rejects_T0_before_side_effects(tmp_path, capsys):
    out = tmp_path / "never"
    code, _, err = run(["run", "--config", write(tmp_path, "[experiment]\nT = 0\n"), "--out", str(out)], capsys)
    assert code == EXIT_CONFIG and "T must be" in err
    assert not out.exists()


def test_run_missing_config_file(tmp_path, capsys):
    assert run(["run", "--config", str(tmp_path / "nope.ini")], capsys)[0] == EXIT_CONFIG


def test_run_solver_failure_flushes_partial_trace(tmp_path, capsys):
    out = tmp_path / "o"
    code, _, _ = run(["run", "--config", write(tmp_path, SMALL + "[solver]\nmax_iter = 3\n"),
                      "--out", str(out)], capsys)
    assert code == EXIT_SOLVER
    assert (out / "trace.csv").read_text().startswith("t,regret_n")
    assert "did not reach" in (out / "metadata.txt").read_text()


def test_single_network_run_decays(tmp_path, capsys):
    out = tmp_path / "o"
    text = "[experiment]\nT = 2000\n[network]\npool_size = 1\n"
    assert run(["run", "--config", write(tmp_path, text), "--out", str(out)], capsys)[0] == EXIT_OK
    avg = read_trace_csv(open(out / "trace.csv"))["avg_regret_n"]
    assert np.all(np.diff(avg[20:]) <= 0)
    assert avg[-1] < 0.15 * avg[9]


def test_average_equilibrium_comparator_runs(tmp_path, capsys):
    out = tmp_path / "o"
    text = SMALL.replace("T = 60", "T = 60\ncomparator = average-equilibrium")
    assert run(["run", "--config", write(tmp_path, text), "--out", str(out)], capsys)[0] == EXIT_OK
    assert "surrogate" in (out / "metadata.txt").read_text()


def test_gen_writes_pool_and_meta(tmp_path, capsys):
    out = tmp_path / "g"
    code, _, _ = run(["gen", "--config", write(tmp_path, SMALL), "--seed", "2", "--out", str(out)], capsys)
    assert code == EXIT_OK
    meta = (out / "pool.meta").read_text()
    assert "seed = 2" in meta and "entry_seeds" in meta
    assert (out / "pool.txt").read_text().splitlines()[0] == "3"


# -- plot ---------------------------------------------------------------


def test_svg_log_scale_drops_zeros():
    svg = svg_lines(np.arange(1, 6), {"a": np.array([0.0, 1.0, 10.0, 100.0, 1000.0])}, log_y=True)
    pts = svg.split('points="')[1].split('"')[0].split()
    assert len(pts) == 4
    assert "1e3.0" in svg
    flat = svg_lines(np.arange(3), {"c": np.ones(3)}, title="a < b")
    assert "a &lt; b" in flat and not any(math.isnan(float(v)) for p in flat.split('points="')[1].split('"')[0].split()
                                           for v in p.split(","))
    assert io.StringIO(flat).read().endswith("</svg>\n")


def test_config_inline_comments():
    cfg = parse_config("[network]\nfamily = supply-chain   ; three firms\n[learner]\neta = 0.01 ; fixed\n")
    assert cfg.family == "supply-chain"
    assert cfg.eta == "0.01"
