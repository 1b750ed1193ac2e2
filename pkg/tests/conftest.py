import pytest

from globalobs.sequences import PartitionSequence


@pytest.fixture(scope="session")
def seq_half():
    return PartitionSequence(0.5)


@pytest.fixture(scope="session")
def seq_035():
    return PartitionSequence(0.35)
