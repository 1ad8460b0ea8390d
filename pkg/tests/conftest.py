from __future__ import annotations

from pathlib import Path

import pytest

from gpdkit import speclang

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus_files() -> dict[str, dict]:
    """Every good corpus file, elaborated: filename -> {name -> value}."""
    return {f.name: speclang.load(f) for f in sorted(CORPUS_DIR.glob("*.gpd"))}


@pytest.fixture(scope="session")
def corpus_groupoids(corpus_files) -> dict[str, object]:
    """The canonical groupoid test corpus, keyed by a stable id."""
    return {
        "qubit": corpus_files["qubit.gpd"]["Qubit"],
        "classical_bit": corpus_files["classical_bit.gpd"]["ClassicalBit"],
        "pair1": corpus_files["pairs.gpd"]["P1"],
        "pair2": corpus_files["pairs.gpd"]["P2"],
        "pair3": corpus_files["pairs.gpd"]["P3"],
        "pair4": corpus_files["pairs.gpd"]["P4"],
        "pair5": corpus_files["pairs.gpd"]["P5"],
        "pair6": corpus_files["pairs.gpd"]["P6"],
        "z2": corpus_files["groups.gpd"]["Z2"],
        "s3": corpus_files["groups.gpd"]["S3"],
        "swap2": corpus_files["actions.gpd"]["Swap2"],
        "swap_restr": corpus_files["actions.gpd"]["SwapRestr"],
        "union23": corpus_files["unions.gpd"]["U23"],
        "qubit_pair": corpus_files["unions.gpd"]["QQ"],
        "restr2": corpus_files["restricts.gpd"]["R2"],
    }


@pytest.fixture(scope="session")
def corpus_event_spaces(corpus_files) -> dict[str, object]:
    return dict(corpus_files["eventspaces.gpd"])


@pytest.fixture()
def qubit(corpus_groupoids):
    return corpus_groupoids["qubit"]
