"""
Shared fixtures: a hand-built two-attacker instance, shared-threat and generated instances.
"""

import numpy as np
import pytest

from mosg_solver.bench.generator import BenchConfig, generate_instance, shared_threat_instance
from mosg_solver.game.core import GameInstance
from mosg_solver.game.discretize import ideal_profile, target_order
from mosg_solver.solver.moea import EAConfig


def make_instance(u_cov_att, u_unc_att, u_cov_def, u_unc_def, r=0.5):
    u_unc_att = np.atleast_2d(np.asarray(u_unc_att, dtype=float))
    n, t = u_unc_att.shape
    return GameInstance(
        num_attackers=n,
        num_targets=t,
        resource_ratio=r,
        u_cov_att=np.broadcast_to(np.asarray(u_cov_att, dtype=float), (n, t)),
        u_unc_att=u_unc_att,
        u_cov_def=np.broadcast_to(np.asarray(u_cov_def, dtype=float), (n, t)),
        u_unc_def=np.broadcast_to(np.asarray(u_unc_def, dtype=float), (n, t)),
    )


@pytest.fixture
def two_attacker_instance():
    """A1 prefers target 3 alone; A2's top two targets are 3 and 0."""
    return make_instance(-5, [[3, 2, 1, 9], [7, 1, 2, 9]], 5, -5, r=0.5)


@pytest.fixture
def two_attacker_prepared(two_attacker_instance):
    order = target_order(two_attacker_instance)
    return two_attacker_instance, order, ideal_profile(two_attacker_instance, order)


@pytest.fixture
def small_instance():
    return generate_instance(BenchConfig(attackers=2, targets=4, resource_ratio=0.5, seed=1))


@pytest.fixture
def shared_threat():
    return shared_threat_instance(
        BenchConfig(attackers=3, targets=6, resource_ratio=0.3, seed=4)
    )


@pytest.fixture
def generated_instances():
    return [
        generate_instance(BenchConfig(attackers=n, targets=t, resource_ratio=r, seed=seed))
        for seed, (n, t, r) in enumerate([(2, 3, 0.3), (2, 5, 0.5), (3, 4, 0.3), (3, 6, 0.2)])
    ]


@pytest.fixture
def tiny_config():
    return EAConfig(pop_size=12, max_gen=8, seed=3, show_progress=False)
