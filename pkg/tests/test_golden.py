"""Byte-exact regeneration of the pinned reference curves.

The golden CSVs were generated by the CLI with default parameters after the
acceptance suite verified the physics they encode (resonance peaks, packet
dependence near zero momentum, the age-difference dips). Any change to the
closed forms, formatting, or grid conventions shows up here first.
"""

from pathlib import Path

from tunneltimes.cli import main

GOLDEN = Path(__file__).parent / "golden"


def test_fig3_regenerates_identically(tmp_path):
    out = tmp_path / "fig3.csv"
    assert main(["figure", "fig3", "--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "fig3.csv").read_bytes()


def test_fig4_regenerates_identically(tmp_path):
    out = tmp_path / "fig4.csv"
    assert main(["figure", "fig4", "--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "fig4.csv").read_bytes()
