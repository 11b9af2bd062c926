import math

import pytest

from fluidrank.errors import MissingPreference
from fluidrank.perception import (
    PerceptionProfile,
    decode,
    encode_nearest,
    likelihood,
    likelihood_table,
    saliency_matrix,
)
from fluidrank.signals import Configuration, default_modalities, make_point, signal_space
from fluidrank.tasks import uniform_task

from oracles import channel_row

MODS = {m.kind: m for m in default_modalities()}
PA = Configuration("PA", (MODS["pressure"], MODS["area"]))
P_ONLY = Configuration("P", (MODS["pressure"],))
SEARCH = uniform_task("search", (4, 4))
SEARCH_X = uniform_task("search_x", (4,))
ASSEMBLY = uniform_task("assembly", (7, 3))


def profile(beta=24.0, alpha=0.25, **prefs):
    base = {"pressure": 1.0, "frequency": 1.0, "area": 1.0}
    base.update(prefs)
    return PerceptionProfile(base, beta=beta, alpha=alpha)


class TestSaliency:
    def test_exact_weight_values(self):
        # (P + 0.25) / 1.25 at the three reference slider positions
        for p_val, expected in [(0.0, 0.2), (0.5, 0.6), (1.0, 1.0)]:
            w = saliency_matrix(profile(pressure=p_val), P_ONLY)
            assert w[0] == expected

    def test_weights_fall_in_closed_interval(self):
        alpha = 0.25
        lo = alpha / (1 + alpha)
        for p_val in (0.0, 0.1, 0.437, 0.9, 1.0):
            w = saliency_matrix(profile(pressure=p_val), P_ONLY)[0]
            assert lo <= w <= 1.0

    def test_missing_preference(self):
        sparse = PerceptionProfile({"pressure": 0.5}, beta=8.0)
        with pytest.raises(MissingPreference):
            saliency_matrix(sparse, PA)


class TestLikelihood:
    def test_rows_sum_to_one(self):
        for beta in (0.0, 8.0, 24.0, 1e6):
            table = likelihood_table(PA, SEARCH, profile(beta=beta))
            for row in table:
                assert math.fsum(row) == pytest.approx(1.0, abs=1e-12)

    def test_beta_zero_uniform(self):
        table = likelihood_table(PA, SEARCH, profile(beta=0.0))
        for row in table:
            assert all(p == pytest.approx(1.0 / 12.0, abs=1e-15) for p in row)

    def test_beta_large_delta_on_aligned_grid(self):
        syn = Configuration("SYN", (MODS["pressure"], MODS["pressure"]))
        table = likelihood_table(syn, SEARCH, profile(beta=1e6))
        points = signal_space(syn)
        for i, theta in enumerate(SEARCH.theta_values()):
            col = next(c for c, p in enumerate(points) if p.indices == theta)
            assert table[i][col] == pytest.approx(1.0, abs=1e-9)

    def test_single_axis_concentration_and_symmetry(self):
        # theta_x = 1 of 4 on the 4-level pressure channel at beta=8
        prof = profile(beta=8.0)
        table = likelihood_table(P_ONLY, SEARCH_X, prof)
        row = table[1]
        assert row[1] == max(row)
        assert row[0] == row[2]  # exact mirror about the expected level
        expected = channel_row((1,), (4,), (4,), (1.0,), 8.0)
        assert row == pytest.approx(expected, abs=1e-12)

    def test_mirror_rows_reverse_exactly(self):
        prof = profile(beta=24.0)
        table = likelihood_table(P_ONLY, SEARCH_X, prof)
        for theta in range(4):
            assert table[theta] == list(reversed(table[3 - theta]))

    def test_beta_monotonicity_at_expected_point(self):
        prev = 0.0
        for beta in (0.5, 2.0, 8.0, 32.0, 128.0):
            table = likelihood_table(P_ONLY, SEARCH_X, profile(beta=beta))
            value = table[0][0]
            assert value >= prev
            prev = value

    def test_scalar_likelihood_matches_table(self):
        prof = profile(beta=24.0)
        table = likelihood_table(PA, SEARCH, prof)
        pt = make_point(PA, (2, 1))
        points = signal_space(PA)
        col = next(c for c, p in enumerate(points) if p.indices == (2, 1))
        assert likelihood(pt, (1, 2), PA, SEARCH, prof) == table[SEARCH.flat_index((1, 2))][col]

    def test_beta_w_scaling_invariance(self):
        # beta scaled by c with all weights scaled by 1/c leaves rows unchanged
        c = 3.7
        base = PerceptionProfile({"pressure": 1.0, "area": 1.0, "frequency": 1.0}, beta=24.0)
        w = saliency_matrix(base, PA)
        t1 = likelihood_table(PA, SEARCH, base)
        t2 = []
        for theta in SEARCH.theta_values():
            t2.append(
                channel_row(theta, SEARCH.axes, [4, 3], [wi / c for wi in w], base.beta * c)
            )
        for r1, r2 in zip(t1, t2):
            assert r1 == pytest.approx(r2, abs=1e-12)


class TestDecode:
    def test_delta_limit_recovers_theta(self):
        syn = Configuration("SYN", (MODS["pressure"], MODS["pressure"]))
        prof = profile(beta=1e6)
        for theta in SEARCH.theta_values():
            pt = encode_nearest(syn, SEARCH, theta)
            assert decode(pt, syn, SEARCH, prof, mode="map").theta == theta

    def test_uniform_posterior_ties_to_lowest_index(self):
        prof = profile(beta=0.0)
        pt = make_point(PA, (2, 1))
        result = decode(pt, PA, SEARCH, prof, mode="map")
        assert result.theta == (0, 0)
        assert result.posterior[0] == pytest.approx(1.0 / 16.0)

    def test_sampling_mode_is_seeded(self):
        prof = profile(beta=8.0)
        pt = make_point(PA, (1, 1))
        a = decode(pt, PA, SEARCH, prof, mode="sample", rng_seed=123)
        b = decode(pt, PA, SEARCH, prof, mode="sample", rng_seed=123)
        assert a.theta == b.theta

    def test_assembly_collapsed_cells_share_argmax(self):
        # 7 ingredient values on the 4-level pressure channel: brute-force the
        # 7x4 table and confirm decode matches its per-column argmax
        prof = profile(beta=8.0)
        p7 = uniform_task("ingredients", (7,))
        table = likelihood_table(P_ONLY, p7, prof)
        for col in range(4):
            post = [table[i][col] for i in range(7)]
            best = post.index(max(post))
            pt = make_point(P_ONLY, (col,))
            assert decode(pt, P_ONLY, p7, prof, mode="map").theta == (best,)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            decode(make_point(PA, (0, 0)), PA, SEARCH, profile(), mode="argmax")


class TestEncodeNearest:
    def test_aligned_axes_are_identity(self):
        syn = Configuration("SYN", (MODS["pressure"], MODS["pressure"]))
        for theta in SEARCH.theta_values():
            assert encode_nearest(syn, SEARCH, theta).indices == theta

    def test_ties_go_to_lower_index(self):
        # 7 values on 4 levels: theta=1 sits exactly between levels 0 and 1
        p7 = uniform_task("ingredients", (7,))
        assert encode_nearest(P_ONLY, p7, (1,)).indices == (0,)
        assert encode_nearest(P_ONLY, p7, (3,)).indices == (1,)
        assert encode_nearest(P_ONLY, p7, (5,)).indices == (2,)

    def test_monotone_in_theta(self):
        p7 = uniform_task("ingredients", (7,))
        cells = [encode_nearest(P_ONLY, p7, (j,)).indices[0] for j in range(7)]
        assert cells == sorted(cells)


def test_profile_validation():
    with pytest.raises(ValueError):
        PerceptionProfile({"pressure": 1.2}, beta=8.0)
    with pytest.raises(ValueError):
        PerceptionProfile({}, beta=-1.0)
    with pytest.raises(ValueError):
        PerceptionProfile({}, alpha=1.5)


def test_profile_json_round_trip(tmp_path):
    prof = PerceptionProfile({"pressure": 0.8, "frequency": 0.4, "area": 0.6}, beta=8.0, alpha=0.25)
    data = prof.to_dict()
    assert data == {"area": 0.6, "frequency": 0.4, "pressure": 0.8, "alpha": 0.25, "beta": 8.0}
    assert PerceptionProfile.from_dict(data) == prof
