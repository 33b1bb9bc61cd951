import pytest

from thc_threshold_bandit.utils.seeding import SeedPurpose, derive_seed, make_rng


def test_streams_are_reproducible():
    assert make_rng(7, SeedPurpose.REWARDS, 3, 1).random(5).tolist() == make_rng(7, SeedPurpose.REWARDS, 3, 1).random(5).tolist()


def test_streams_depend_on_every_part_of_their_identity():
    draws = {
        tuple(make_rng(*identity).random(3).tolist())
        for identity in [
            (7, SeedPurpose.REWARDS, 3, 1),
            (8, SeedPurpose.REWARDS, 3, 1),
            (7, SeedPurpose.INSTANCE, 3, 1),
            (7, SeedPurpose.REWARDS, 4, 1),
            (7, SeedPurpose.REWARDS, 3, 2),
            (7, SeedPurpose.REWARDS, 3),
        ]
    }
    assert len(draws) == 6


def test_derive_seed():
    seed = derive_seed(0, SeedPurpose.EPISODE, 12)
    assert seed == derive_seed(0, SeedPurpose.EPISODE, 12)
    assert 0 <= seed < 2**63
    assert seed != derive_seed(0, SeedPurpose.EPISODE, 13)


def test_negative_seed():
    with pytest.raises(ValueError):
        make_rng(-1, SeedPurpose.EPISODE)
