"""Generate the frozen stock tables under src/monoidlab/data/monoids/.

Each stock semigroup is derived from its presentation via the certified
bounded congruence closure and written out.  E.monoid is hand-transcribed
and never overwritten; this script instead asserts that the closure derives
exactly the same table (the two routes are independent).

Run from the repository root:  python3 tools/gen_catalog.py
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from monoidlab.monoids import (  # noqa: E402
    STOCK_PRESENTATIONS,
    format_monoid_text,
    from_presentation,
    parse_monoid_text,
    validate,
)

OUT = pathlib.Path(__file__).resolve().parents[1] / "src/monoidlab/data/monoids"


def main() -> None:
    for name, (gens, rels) in sorted(STOCK_PRESENTATIONS.items()):
        M = from_presentation(gens, rels, name=name)
        report = validate(M)
        assert report.ok, (name, report.problems)
        path = OUT / f"{name}.monoid"
        if name == "E":
            frozen = parse_monoid_text(path.read_text(encoding="utf-8"))
            assert frozen == M, "closure-derived E disagrees with the frozen table"
            print(f"E: frozen table confirmed (order {M.order})")
            continue
        path.write_text(format_monoid_text(M), encoding="utf-8")
        ident = M.elements[M.identity] if M.identity is not None else "-"
        print(f"{name}: order {M.order}, identity {ident}, elements {' '.join(M.elements)}")


if __name__ == "__main__":
    main()
