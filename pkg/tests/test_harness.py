import json

import numpy as np
import pytest

from riskey.capacity import csk_closed_form, csk_independent_eve
from riskey.errors import InvalidParameterError
from riskey.harness import (
    CSV_FIELDS,
    ExperimentConfig,
    Mode,
    read_rows,
    run_capacity_sweep,
    run_key_experiment,
    write_rows,
)
from riskey.keys import read_key_bits


def small(**kw):
    base = dict(snr_grid_db=[0.0, 10.0], trials=2000, n_units=12, turn_on_ratio=0.5, master_seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            {"trials": 0},
            {"snr_grid_db": []},
            {"rho_values": []},
            {"turn_on_ratio": 0.0},
            {"turn_on_ratio": 1.2},
            {"modes": ["Ours", "Bogus"]},
            {"rho_values": [1.5]},
            {"master_seed": -1},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises((InvalidParameterError, ValueError)):
            ExperimentConfig(**kw)

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.snr_grid_db == [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0]
        assert (cfg.trials, cfg.n_units, cfg.budget) == (100_000, 80, 64)


class TestCapacitySweep:
    def test_no_ris_near_ris_scenario(self):
        cfg = small(modes=["NoRis"], rho_values=[0.0, 0.5, 0.9], eve_scenario="near_ris")
        for row in run_capacity_sweep(cfg):
            x = 10 ** (row.snr_db / 10)
            assert row.mean_csk == pytest.approx(csk_independent_eve(x), abs=1e-12)
            assert row.std_csk == pytest.approx(0.0, abs=1e-12)
            # the sample-covariance estimate agrees with the independent-Eve value
            assert row.empirical_csk == pytest.approx(csk_independent_eve(x), abs=0.1)

    def test_no_ris_near_node_uses_direct_path(self):
        rows = run_capacity_sweep(small(modes=["NoRis"], rho_values=[0.0, 0.4]))
        for row in rows:
            x = 10 ** (row.snr_db / 10)
            assert row.mean_csk == pytest.approx(csk_closed_form(x, row.rho), abs=1e-12)

    def test_full_budget_modes_agree(self):
        rows = run_capacity_sweep(small(turn_on_ratio=1.0, modes=["Ours", "Random"]))
        by_cell = {}
        for row in rows:
            by_cell.setdefault(row.snr_db, {})[row.mode] = row.mean_csk
        for cell in by_cell.values():
            assert cell[Mode.OURS] == cell[Mode.RANDOM]

    def test_rows_valid_and_sorted(self):
        rows = run_capacity_sweep(small(rho_values=[0.1, 0.6]))
        assert len(rows) == 2 * 2 * 3
        assert rows == sorted(rows, key=lambda r: r.sort_key())
        for row in rows:
            assert row.mean_csk >= 0 and 0 <= row.ukr <= 1
            assert (row.n, row.m, row.trials, row.seed) == (12, 6, 2000, 7)

    def test_cell_independent_of_grid(self):
        alone = run_capacity_sweep(small(snr_grid_db=[10.0]))
        grid = [r for r in run_capacity_sweep(small(snr_grid_db=[0.0, 10.0, 4.0])) if r.snr_db == 10.0]
        assert alone == grid

    def test_seed_changes_results(self):
        a = run_capacity_sweep(small(master_seed=1))
        b = run_capacity_sweep(small(master_seed=2))
        assert [r.mean_csk for r in a] != [r.mean_csk for r in b]

    def test_mean_csk_non_increasing_in_rho(self):
        """Fixed-SNR correlation sweep; tracks the closed-form dip near rho = 0.75."""
        rhos = [round(r, 2) for r in np.arange(0.0, 1.001, 0.1)]
        rows = run_capacity_sweep(small(snr_grid_db=[18.0], rho_values=rhos, modes=["Ours"], trials=500))
        means = [r.mean_csk for r in sorted(rows, key=lambda r: r.rho)]
        assert all(b <= a for a, b in zip(means, means[1:])), means


class TestDeterminism:
    def test_byte_identical_outputs(self, tmp_path):
        out = tmp_path / "keys.csv"
        snapshots = []
        for _ in range(2):
            run_key_experiment(small(output_path=str(out), trials=3000))
            snapshots.append({p.name: p.read_bytes() for p in sorted(tmp_path.rglob("*")) if p.is_file()})
        assert len(snapshots[0]) == 2 + 6
        assert snapshots[0] == snapshots[1]

    def test_worker_count_irrelevant(self, tmp_path):
        one = tmp_path / "one.csv"
        two = tmp_path / "two.csv"
        run_capacity_sweep(small(output_path=str(one), rho_values=[0.2, 0.7]))
        run_capacity_sweep(small(output_path=str(two), rho_values=[0.2, 0.7], workers=2))
        assert one.read_bytes() == two.read_bytes()


class TestCsv:
    def test_header(self, tmp_path):
        out = tmp_path / "cap.csv"
        run_capacity_sweep(small(output_path=str(out)))
        assert out.read_text().splitlines()[0] == "snr_db,rho,mode,n,m,trials,mean_csk,std_csk,ukr,seed"
        assert ",".join(CSV_FIELDS) == out.read_text().splitlines()[0]

    def test_round_trip(self, tmp_path):
        rows = run_capacity_sweep(small())
        path = write_rows(tmp_path / "r.csv", rows)
        back = read_rows(path)
        assert len(back) == len(rows)
        for a, b in zip(rows, back):
            assert (a.snr_db, a.rho, a.mode, a.n, a.m) == (b.snr_db, b.rho, b.mode, b.n, b.m)
            assert b.mean_csk == pytest.approx(a.mean_csk, rel=1e-9)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("snr,rho\n1,2\n")
        with pytest.raises(InvalidParameterError):
            read_rows(path)

    def test_metadata_sidecar(self, tmp_path):
        out = tmp_path / "cap.csv"
        rows = run_capacity_sweep(small(output_path=str(out)), preset="demo", notes=("a note",))
        meta = json.loads((tmp_path / "cap.csv.meta.json").read_text())
        assert meta["kind"] == "capacity" and meta["preset"] == "demo"
        assert "a note" in meta["notes"]
        assert len(meta["empirical_csk"]) == len(rows)
        assert meta["config"]["rho_values"] == [0.3]

    def test_unwritable_output(self, tmp_path):
        with pytest.raises(OSError):
            run_capacity_sweep(small(output_path=str(tmp_path / "missing" / "x.csv")))


class TestKeyExperiment:
    def test_noiseless_hook(self):
        rows, _ = run_key_experiment(small(noiseless=True, trials=5000))
        assert all(row.ukr == 0.0 for row in rows)

    def test_key_files(self, tmp_path):
        rows, keys = run_key_experiment(small(trials=1000), key_dir=tmp_path)
        names = sorted(p.name for p in tmp_path.iterdir())
        assert "keys_Ours_snr10.txt" in names and "keys_NoRis_snr0.txt" in names
        assert len(names) == 6
        bits = read_key_bits(tmp_path / "keys_Ours_snr10.txt")
        np.testing.assert_array_equal(bits, keys[(Mode.OURS, 10.0, 0.3)])
        assert len(bits) == 2000

    def test_multi_rho_names(self, tmp_path):
        run_key_experiment(small(trials=500, rho_values=[0.1, 0.5], modes=["Ours"]), key_dir=tmp_path)
        assert (tmp_path / "keys_Ours_snr0_rho0.1.txt").exists()

    def test_high_snr_ours(self):
        cfg = ExperimentConfig(snr_grid_db=[18.0], trials=100_000, modes=["Ours"], master_seed=3)
        (row,), _ = run_key_experiment(cfg)
        assert row.ukr <= 0.005

    def test_low_snr_paired(self):
        diffs = []
        for seed in range(30):
            cfg = ExperimentConfig(snr_grid_db=[2.0], trials=5000, modes=["Ours", "Random"], master_seed=seed)
            rows, _ = run_key_experiment(cfg)
            ukr = {r.mode: r.ukr for r in rows}
            diffs.append(ukr[Mode.OURS] - ukr[Mode.RANDOM])
        assert np.mean(diffs) <= 0.0


def test_capacity_trials_analytic_only_matches():
    from riskey.harness import capacity_trials

    cfg = small(snr_grid_db=[4.0], trials=3000)
    full, samples = capacity_trials(cfg, 4.0, 0.3)
    fast, none = capacity_trials(cfg, 4.0, 0.3, with_samples=False)
    assert none is None and samples[Mode.OURS].shape == (3000, 3)
    for mode in cfg.modes:
        np.testing.assert_array_equal(full[mode], fast[mode])
