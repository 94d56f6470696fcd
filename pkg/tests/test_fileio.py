"""Parsers, emitters, and the results table round trip."""

from __future__ import annotations

import io
import json

import numpy as np
import pytest

from paircomp import (
    BadDiagonal,
    BadHeader,
    DataMatrix,
    DuplicatePair,
    IPCM,
    NegativeCount,
    NonPositiveEntry,
    NotReciprocal,
    ParseError,
    SimulationConfig,
    enumerate_connected,
    ford_condition,
    pcm_consistency,
    run,
)
from paircomp.fileio import (
    emit_pairs,
    emit_pcm,
    graphs_json,
    parse_pairs,
    parse_pcm,
    read_results,
    results_rows,
    write_results,
)
from tests.conftest import SPORTS_COUNTS

SPORTS_FILE = """i,j,worse,better
1,2,1,2
1,3,1,2
1,4,1,1
2,3,1,1
2,4,2,1
3,4,2,1
"""


class TestParsePairs:
    def test_sports_file(self):
        data = parse_pairs(io.StringIO(SPORTS_FILE))
        assert data.n == 4
        assert data.entries == SPORTS_COUNTS
        assert data.entries[(1, 3)] == (2.0, 1.0)

    def test_empty_body_with_override(self):
        data = parse_pairs(io.StringIO("i,j,worse,better\n"), n=3)
        assert data.n == 3
        assert data.comparison_pairs == ()
        assert not ford_condition(data)

    def test_empty_body_without_override(self):
        with pytest.raises(ParseError):
            parse_pairs(io.StringIO("i,j,worse,better\n"))

    def test_probability_rows_are_accepted(self):
        data = parse_pairs(io.StringIO("i,j,worse,better\n1,2,0.562,0.438\n"))
        assert data.entries[(0, 1)] == (0.562, 0.438)

    def test_bad_header(self):
        with pytest.raises(BadHeader):
            parse_pairs(io.StringIO("a,b,c,d\n1,2,1,1\n"))

    def test_duplicate_pair(self):
        with pytest.raises(DuplicatePair):
            parse_pairs(io.StringIO("i,j,worse,better\n1,2,1,1\n1,2,2,2\n"))

    def test_negative_count(self):
        with pytest.raises(NegativeCount):
            parse_pairs(io.StringIO("i,j,worse,better\n1,2,-1,1\n"))

    def test_bad_indices(self):
        with pytest.raises(ParseError):
            parse_pairs(io.StringIO("i,j,worse,better\n2,2,1,1\n"))
        with pytest.raises(ParseError):
            parse_pairs(io.StringIO("i,j,worse,better\n1,5,1,1\n"), n=3)

    def test_round_trip_is_bit_exact(self):
        rng = np.random.default_rng(13)
        entries = {
            (i, j): (float(rng.uniform(0, 3)), float(rng.uniform(0, 3)))
            for i in range(5)
            for j in range(i + 1, 5)
        }
        data = DataMatrix(5, entries)
        again = parse_pairs(io.StringIO(emit_pairs(data)))
        assert again.entries == data.entries

    def test_reads_from_path(self, tmp_path):
        target = tmp_path / "pairs.csv"
        target.write_text(SPORTS_FILE, encoding="utf-8")
        assert parse_pairs(target).n == 4


def pcm_text(pcm: IPCM) -> str:
    return emit_pcm(pcm)


class TestParsePcm:
    def test_consistent_grid(self, sports_ratios):
        parsed = parse_pcm(io.StringIO(pcm_text(sports_ratios)))
        assert parsed.is_complete
        assert pcm_consistency(parsed).consistent
        assert parsed.value(0, 1) == 2.0

    def test_incomplete_grid_with_stars(self, ratios_incomplete):
        text = pcm_text(ratios_incomplete)
        assert "*" in text
        parsed = parse_pcm(io.StringIO(text))
        assert parsed.known_pairs() == ((0, 1), (0, 2), (0, 3), (2, 3))
        assert not pcm_consistency(parsed).consistent

    def test_not_reciprocal(self):
        with pytest.raises(NotReciprocal):
            parse_pcm(io.StringIO("1,2\n3,1\n"))

    def test_one_sided_entry(self):
        with pytest.raises(NotReciprocal):
            parse_pcm(io.StringIO("1,2,*\n0.5,1,3\n*,*,1\n"))

    def test_bad_diagonal(self):
        with pytest.raises(BadDiagonal):
            parse_pcm(io.StringIO("2,1\n1,1\n"))
        with pytest.raises(BadDiagonal):
            parse_pcm(io.StringIO("*,2\n0.5,1\n"))

    def test_non_positive_entry(self):
        with pytest.raises(NonPositiveEntry):
            parse_pcm(io.StringIO("1,0\n0,1\n"))
        with pytest.raises(NonPositiveEntry):
            parse_pcm(io.StringIO("1,-2\n-0.5,1\n"))

    def test_ragged_grid(self):
        with pytest.raises(ParseError):
            parse_pcm(io.StringIO("1,2\n0.5,1,3\n"))

    def test_round_trip_is_bit_exact(self, ratios_modified, ratios_incomplete):
        for pcm in (ratios_modified, ratios_incomplete):
            again = parse_pcm(io.StringIO(pcm_text(pcm)))
            assert again.entries == pcm.entries

    def test_printed_precision_reciprocals_are_repaired(self):
        # A file printed at low precision passes the loose file tolerance;
        # the in-memory matrix then carries exact reciprocals.
        text = "1,0.779\n1.2837,1\n"
        parsed = parse_pcm(io.StringIO(text), reciprocity_tol=1e-3)
        assert parsed.value(0, 1) == 0.779
        assert parsed.value(1, 0) == 1.0 / 0.779


@pytest.fixture(scope="module")
def summary():
    return run(SimulationConfig(n=4, perturb=0.2, num_sims=5, seed=21))


class TestResultsTable:
    def test_round_trip(self, summary):
        buffer = io.StringIO()
        write_results(summary, buffer)
        rows = read_results(io.StringIO(buffer.getvalue()))
        assert len(rows) == len(summary.classes) * 6
        by_key = {(r.graph_id, r.measure): r for r in rows}
        for (graph_id, measure), cell in summary.stats.items():
            row = by_key[(graph_id, measure)]
            assert row.mean == cell.mean
            assert row.stddev == cell.stddev
            assert row.num_sims == 5
            assert row.excluded == 5 - cell.count

    def test_rows_carry_structure_metadata(self, summary):
        for row in results_rows(summary):
            cls = row.graph_class()
            assert cls.edge_count == row.edges
            assert cls.member().edge_count == row.edges
            assert row.model == "logistic"
            assert row.n == 4

    def test_header_is_validated(self):
        with pytest.raises(BadHeader):
            read_results(io.StringIO("a,b\n1,2\n"))


class TestGraphsJson:
    def test_catalog_entries(self):
        payload = json.loads(graphs_json(enumerate_connected(4)))
        assert len(payload) == 6
        assert [entry["id"] for entry in payload] == [f"g{k}" for k in range(1, 7)]
        star = payload[0]
        assert star["properties"]["is_star"]
        assert star["edge_count"] == 3
        # 1-based vertex labels in files.
        flat = [v for edge in star["edges"] for v in edge]
        assert min(flat) >= 1 and max(flat) <= 4
        complete = payload[-1]
        assert complete["edge_count"] == 6
        assert complete["properties"]["is_regular"]
