import csv
import io

import pytest

from lchp.cli import main
from lchp.exceptions import ConfigError, InvalidParameterError
from lchp.experiments import (
    CSV_COLUMNS,
    DEFAULT_PSI,
    ScenarioConfig,
    emit_chart,
    parse_config,
    read_rows,
    rows_to_csv,
    run_sweep,
    write_atomic,
)
from lchp.topology import load_edge_list


def rows_by(rows, *keys):
    return {tuple(r[k] for k in keys): r for r in rows}


class TestConfig:
    def test_defaults(self):
        cfg = parse_config("")
        assert cfg.topology == "grid" and cfg.h == (2, 3) and cfg.psi == DEFAULT_PSI
        assert cfg.c_o == 5.0 and cfg.N == 100

    def test_lists_and_comments(self):
        cfg = parse_config("topology = tree  # binary\nh = 2, 3\npsi = 0.5,1\npolicies = LCHP,greedy\n")
        assert cfg.topology == "tree" and cfg.psi == (0.5, 1.0) and cfg.policies == ("LCHP", "greedy")

    def test_overrides_win(self):
        cfg = parse_config("h = 2\nc_o = 3\n", {"h": "3", "c_o": "7.5"})
        assert cfg.h == (3,) and cfg.c_o == 7.5

    @pytest.mark.parametrize("text,field", [
        ("colour = red", "colour"),
        ("h = two", "h"),
        ("policies =", "policies"),
        ("psi = 0, 1", "psi"),
        ("h = 0", "h"),
        ("topology = ring", "topology"),
        ("evaluator = guess", "evaluator"),
        ("topology = edgelist\nedgelist = /nonexistent/file.txt\nevaluator = simulated", "edgelist"),
        ("policies = algorithm1", "evaluator"),
    ])
    def test_errors_name_field(self, text, field):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.field == field

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config("h 2")


class TestSweep:
    def test_grid_published(self):
        rows = run_sweep(ScenarioConfig(h=(2, 3), psi=(1.0,), policies=("LCHP", "HCHP")))
        assert len(rows) == 4
        got = [float(r["in_network"]) for r in rows]
        assert got == pytest.approx([0.71, 1.22, 0.91, 1.63], abs=0.005)
        assert [(r["policy"], r["h"]) for r in rows] == [("LCHP", "2"), ("LCHP", "3"), ("HCHP", "2"), ("HCHP", "3")]

    def test_tree_greedy(self):
        (row,) = run_sweep(ScenarioConfig(topology="tree", h=(2,), psi=(1.0,), policies=("greedy",)))
        assert float(row["in_network"]) == pytest.approx(0.22, abs=0.005)
        assert float(row["origin_coeff"]) == pytest.approx(0.65, abs=0.005)
        total = float(row["in_network"]) + 5 * float(row["origin_coeff"])
        assert float(row["total"]) == pytest.approx(total)

    def test_empty_policies(self):
        with pytest.raises(ConfigError):
            run_sweep(ScenarioConfig(policies=()))

    @pytest.mark.parametrize("topology", ["grid", "tree"])
    def test_analytic_and_simulated_agree(self, topology):
        cfg = ScenarioConfig(topology=topology, policies=("LCHP", "HCHP", "greedy"), evaluator="both")
        rows = run_sweep(cfg)
        cells = rows_by(rows, "policy", "h", "psi", "evaluator")
        for policy in cfg.policies:
            for h in cfg.h:
                for psi in cfg.psi:
                    key = (policy, str(h), f"{psi:.12g}")
                    a, s = cells[key + ("analytic",)], cells[key + ("simulated",)]
                    assert float(a["total"]) == pytest.approx(float(s["total"]), abs=1e-9)

    def test_figure_ordering(self):
        for topology in ("grid", "tree"):
            rows = run_sweep(ScenarioConfig(topology=topology))
            cells = rows_by(rows, "policy", "h", "psi")
            for (policy, h, psi), row in cells.items():
                if policy == "LCHP":
                    assert float(row["total"]) < float(cells[("HCHP", h, psi)]["total"])

    def test_deterministic_and_thread_independent(self):
        cfg = ScenarioConfig(policies=("LCHP", "HCHP", "greedy"), evaluator="both")
        first = rows_to_csv(run_sweep(cfg))
        assert first == rows_to_csv(run_sweep(cfg))
        assert first == rows_to_csv(run_sweep(ScenarioConfig(**{**cfg.__dict__, "workers": 4})))

    def test_montecarlo_rows(self):
        cfg = ScenarioConfig(topology="tree", h=(2,), psi=(1.0,), policies=("greedy", "LCHP"),
                             evaluator="montecarlo", mc_requests=200_000, seed=3)
        rows = run_sweep(cfg)
        assert all(float(r["stderr"]) > 0 for r in rows)
        greedy = rows_by(rows, "policy")[("greedy",)]
        assert float(greedy["total"]) == pytest.approx(0.2249 + 5 * 0.6466, abs=4 * float(greedy["stderr"]))
        assert rows == run_sweep(cfg)

    def test_edgelist_simulated(self, tmp_path):
        path = tmp_path / "ring.txt"
        path.write_text("\n".join(f"{i} {(i + 1) % 12}" for i in range(12)) + "\n")
        cfg = ScenarioConfig(topology="edgelist", edgelist=str(path), h=(1, 2), psi=(1.0,),
                             policies=("LCHP", "HCHP", "greedy", "algorithm1"), evaluator="simulated")
        rows = run_sweep(cfg)
        assert len(rows) == 8
        assert {r["topology"] for r in rows} == {"ring"}
        # every node of a ring is equally central, so both policies coincide
        cells = rows_by(rows, "policy", "h")
        assert cells[("LCHP", "2")]["total"] == cells[("HCHP", "2")]["total"]

    def test_csv_columns(self):
        text = rows_to_csv(run_sweep(ScenarioConfig(psi=(1.0,), h=(2,))))
        header = text.splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)
        assert len(read_rows(io.StringIO(text))) == 2


def test_write_atomic_leaves_nothing_on_failure(tmp_path):
    target = tmp_path / "out.csv"

    with pytest.raises(TypeError):
        write_atomic(target, 12345)
    assert list(tmp_path.iterdir()) == []
    write_atomic(target, "a,b\n")
    assert target.read_text() == "a,b\n"


class TestChart:
    def test_svg(self, tmp_path):
        rows = run_sweep(ScenarioConfig(psi=(0.5, 1.0, 1.5)))
        path = emit_chart(rows, tmp_path / "fig.svg")
        text = path.read_text()
        assert text.startswith("<?xml") and "</svg>" in text

    def test_single_point(self, tmp_path):
        rows = run_sweep(ScenarioConfig(psi=(1.0,), h=(2,), policies=("LCHP",)))
        assert emit_chart(rows, tmp_path / "one.svg").stat().st_size > 0

    def test_empty(self, tmp_path):
        with pytest.raises(InvalidParameterError):
            emit_chart([], tmp_path / "none.svg")

    def test_reproducible(self, tmp_path):
        rows = run_sweep(ScenarioConfig(psi=(0.5, 1.0)))
        a = emit_chart(rows, tmp_path / "a.svg").read_bytes()
        b = emit_chart(rows, tmp_path / "b.svg").read_bytes()
        assert a == b


class TestCli:
    def test_sweep_and_chart(self, tmp_path, capsys):
        cfg = tmp_path / "grid.cfg"
        cfg.write_text("topology = grid\nh = 2,3\npsi = 0.5,1.0\npolicies = LCHP,HCHP\n")
        out = tmp_path / "res" / "grid.csv"
        assert main(["sweep", str(cfg), "--output", str(out), "--chart", str(tmp_path / "g.svg")]) == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 8
        assert main(["chart", str(out), str(tmp_path / "again.svg")]) == 0
        assert (tmp_path / "again.svg").exists()

    def test_sweep_byte_identical(self, tmp_path):
        cfg = tmp_path / "tree.cfg"
        cfg.write_text("topology = tree\npolicies = LCHP,HCHP,greedy\nevaluator = both\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", str(cfg), "--output", str(a)]) == 0
        assert main(["sweep", str(cfg), "--output", str(b), "--workers", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_flag_overrides_config(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("h = 2\npsi = 1\npolicies = LCHP\n")
        assert main(["sweep", str(cfg), "--h", "3", "--output", "-"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert [r["h"] for r in rows] == ["3"]

    def test_env_output_dir(self, tmp_path, monkeypatch):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("h = 2\npsi = 1\n")
        monkeypatch.setenv("LCHP_OUTPUT_DIR", str(tmp_path / "envdir"))
        assert main(["sweep", str(cfg)]) == 0
        assert (tmp_path / "envdir" / "sweep.csv").exists()

    def test_config_error_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("policies =\n")
        assert main(["sweep", str(cfg)]) == 2
        assert "policies" in capsys.readouterr().err
        assert main(["sweep", str(tmp_path / "missing.cfg")]) == 2

    def test_gen_edge_list_roundtrip(self, tmp_path):
        out = tmp_path / "lat.txt"
        assert main(["gen", "lattice", "--n", "4", "--out", str(out)]) == 0
        t = load_edge_list(out.open())
        assert t.n_nodes == 16 and t.n_edges == 24

    def test_gen_centrality_and_placement(self, capsys):
        assert main(["gen", "tree", "--depth", "3", "--centrality", "ccc", "--h", "2"]) == 0
        assert capsys.readouterr().out.startswith("# metric=ccc h=2\nnode,score\n")
        assert main(["gen", "lattice", "--n", "5", "--placement", "algorithm1", "--h", "2"]) == 0
        assert capsys.readouterr().out.startswith("# policy=algorithm1 h=2")

    def test_verify_exit_code_tracks_failures(self, capsys):
        rc = main(["verify", "--quick"])
        out = capsys.readouterr().out
        failed = [line for line in out.splitlines() if line.startswith("[FAIL")]
        assert rc == (1 if failed else 0)
        assert "[FLAGGED]" in out
