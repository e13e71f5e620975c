from collections import Counter

import numpy as np
import pytest

from torusbench.agents import AgentState
from torusbench.comms import (
    REWARD_ALPHABET,
    SharedInfo,
    imitation_select,
    merged_reward_map,
    stigmergy_exchange,
    talking_exchange,
)
from torusbench.grid import (
    Action,
    Environment,
    MovementPattern,
    Position,
    observe,
    reward_at,
)


def make_env(m, good, evil):
    stay = MovementPattern((Action.STAY,))
    return Environment(m, Position(*good), Position(*evil), stay, stay)


def observations_at(env, positions):
    return {i: observe(env, Position(*p)) for i, p in enumerate(positions)}


class TestTalking:
    def test_single_agent_has_no_peers(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(8, 8)])
        shared = talking_exchange(obs, 0)
        assert shared.peer_cells == ()
        assert shared.own == obs[0]

    def test_disjoint_windows_yield_18_exact_cells(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(5, 5), (15, 15), (15, 5)])
        shared = talking_exchange(obs, 0)
        peer = dict(shared.peer_cells)
        assert len(peer) == 18
        for cell, r in peer.items():
            assert r == reward_at(cell, env)

    def test_colocated_peers_add_nothing_new(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(8, 8), (8, 8)])
        shared = talking_exchange(obs, 0)
        assert {c for c, _ in shared.peer_cells} == {c for c, _ in obs[0].cells}

    def test_overlap_deduplicated(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(5, 5), (6, 5), (7, 5)])
        shared = talking_exchange(obs, 0)
        cells = [c for c, _ in shared.peer_cells]
        assert len(cells) == len(set(cells))

    def test_never_alters_rewards(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            m = int(rng.integers(7, 20))
            good = (int(rng.integers(m)), int(rng.integers(m)))
            evil = (int(rng.integers(m)), int(rng.integers(m)))
            if good == evil:
                continue
            env = make_env(m, good, evil)
            pts = [(int(rng.integers(m)), int(rng.integers(m))) for _ in range(4)]
            obs = observations_at(env, pts)
            for receiver in obs:
                for cell, r in talking_exchange(obs, receiver).peer_cells:
                    assert r == reward_at(cell, env)


class TestStigmergy:
    def test_single_agent_unaffected(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(8, 8)])
        shared = stigmergy_exchange(obs, 0, np.random.default_rng(0))
        assert shared.peer_cells == ()

    def test_own_observation_stays_exact(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(4, 4), (4, 5), (10, 10)])
        shared = stigmergy_exchange(obs, 0, np.random.default_rng(0))
        for cell, r in shared.own.cells:
            assert r == reward_at(cell, env)

    def test_peer_positions_intact_values_from_alphabet(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(4, 4), (15, 15)])
        shared = stigmergy_exchange(obs, 0, np.random.default_rng(1))
        assert [c for c, _ in shared.peer_cells] == [c for c, _ in obs[1].cells]
        assert all(r in REWARD_ALPHABET for _, r in shared.peer_cells)

    def test_fake_rewards_are_mean_zero(self):
        env = make_env(30, (3, 3), (20, 20))
        positions = [(i, (7 * i) % 30) for i in range(12)]
        obs = observations_at(env, positions)
        rng = np.random.default_rng(2024)
        total, count = 0.0, 0
        while count < 1_000_000:
            shared = stigmergy_exchange(obs, 0, rng)
            for _, r in shared.peer_cells:
                total += r
                count += 1
        assert total / count == pytest.approx(0.0, abs=0.01)

    def test_seeded_corruption_reproducible(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(4, 4), (15, 15), (9, 2)])
        a = stigmergy_exchange(obs, 0, np.random.default_rng(55))
        b = stigmergy_exchange(obs, 0, np.random.default_rng(55))
        assert a == b

    def test_receivers_draw_independent_fakes(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(4, 4), (15, 15), (9, 2)])
        a = stigmergy_exchange(obs, 0, np.random.default_rng(7))
        b = stigmergy_exchange(obs, 1, np.random.default_rng(8))
        common = set(c for c, _ in a.peer_cells) & set(c for c, _ in b.peer_cells)
        assert common  # both hear about agent 2's window
        va, vb = dict(a.peer_cells), dict(b.peer_cells)
        assert any(va[c] != vb[c] for c in common)


class TestImitation:
    def make_states(self, positions, last_actions=None):
        last_actions = last_actions or [Action.STAY] * len(positions)
        return [
            AgentState(id=i, pos=Position(*p), last_action=a)
            for i, (p, a) in enumerate(zip(positions, last_actions))
        ]

    def test_nobody_in_range(self):
        states = self.make_states([(0, 0), (5, 5)])
        assert imitation_select(states, 0, np.random.default_rng(0), 20) is None

    def test_single_visible_agent_is_copied(self):
        states = self.make_states([(0, 0), (1, 1)], [Action.STAY, Action.UP])
        assert imitation_select(states, 0, np.random.default_rng(0), 20) is Action.UP

    def test_colocated_agent_is_visible(self):
        states = self.make_states([(4, 4), (4, 4)], [Action.STAY, Action.LEFT])
        assert imitation_select(states, 0, np.random.default_rng(0), 20) is Action.LEFT

    def test_distance_two_is_out_of_range(self):
        states = self.make_states([(0, 0), (2, 0)], [Action.STAY, Action.DOWN])
        assert imitation_select(states, 0, np.random.default_rng(0), 20) is None

    def test_uniform_choice_among_three(self):
        states = self.make_states(
            [(5, 5), (4, 5), (6, 5), (5, 4)],
            [Action.STAY, Action.LEFT, Action.RIGHT, Action.UP],
        )
        trials = 100_000
        rng = np.random.default_rng(3)
        counts = Counter(imitation_select(states, 0, rng, 20) for _ in range(trials))
        for action in (Action.LEFT, Action.RIGHT, Action.UP):
            assert counts[action] / trials == pytest.approx(1 / 3, abs=0.01)

    def test_wrap_visibility(self):
        states = self.make_states([(0, 0), (19, 19)], [Action.STAY, Action.DOWN_LEFT])
        assert imitation_select(states, 0, np.random.default_rng(0), 20) is Action.DOWN_LEFT


class TestOrderIndependence:
    def test_exchanges_ignore_mapping_insertion_order(self):
        env = make_env(20, (3, 3), (12, 12))
        pts = [(4, 4), (15, 15), (9, 2), (0, 19)]
        forward = observations_at(env, pts)
        backward = {i: forward[i] for i in reversed(sorted(forward))}
        assert talking_exchange(forward, 2) == talking_exchange(backward, 2)
        assert stigmergy_exchange(forward, 2, np.random.default_rng(4)) == stigmergy_exchange(
            backward, 2, np.random.default_rng(4)
        )

    def test_imitation_ignores_state_list_order(self):
        env_m = 20
        states = [
            AgentState(id=i, pos=Position(5 + dx, 5 + dy), last_action=a)
            for i, (dx, dy, a) in enumerate(
                [(0, 0, Action.STAY), (1, 0, Action.LEFT), (0, 1, Action.RIGHT), (1, 1, Action.UP)]
            )
        ]
        a = imitation_select(states, 0, np.random.default_rng(12), env_m)
        b = imitation_select(list(reversed(states)), 0, np.random.default_rng(12), env_m)
        assert a is b


class TestMergedMap:
    def test_own_window_overrides_peer_claims(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(4, 4), (4, 5)])
        shared = stigmergy_exchange(obs, 0, np.random.default_rng(6))
        info = merged_reward_map(shared)
        for cell, r in obs[0].cells:
            assert info[cell] == r

    def test_peer_only_cells_present(self):
        env = make_env(20, (3, 3), (12, 12))
        obs = observations_at(env, [(4, 4), (15, 15)])
        shared = talking_exchange(obs, 0)
        info = merged_reward_map(shared)
        assert len(info) == 18
        for cell, r in obs[1].cells:
            assert info[cell] == r
