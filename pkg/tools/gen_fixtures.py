#!/usr/bin/env python3
"""Record service documents as frontend contract fixtures.

The UI test suite renders these exact documents; regenerating them after an
engine change keeps the contract tests honest.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from archforge import documents
from archforge.explain import ExplainRequest, explain, render_template
from archforge.synthesis import synthesize

FIXTURES = Path(__file__).resolve().parents[1] / "frontend" / "fixtures"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    catalog = documents.load_catalog([documents.bundled_path("catalog_dc.catalog.json")])
    query = documents.load_query(documents.bundled_path("ml_training.query.json"))
    design = synthesize(catalog, query)
    design_doc = documents.design_to_json(design)
    documents.write_document(FIXTURES / "ml_training.design.json", design_doc)
    documents.write_document(
        FIXTURES / "ml_training.query.json", documents.query_to_json(query)
    )

    conflict = explain(
        catalog,
        query,
        design,
        ExplainRequest("ML_Training", "load_balancer", "PacketSpray", "load_balancing"),
    )
    conflict_doc = documents.explanation_to_json(conflict)
    conflict_doc["rendered"] = render_template(conflict)
    documents.write_document(FIXTURES / "packetspray.explain.json", conflict_doc)

    flexible = frozenset({"transport", "cca"} | {f"pod1.rack0.compute{i}" for i in range(7)})
    alternative = explain(
        catalog,
        query,
        design,
        ExplainRequest(
            "ML_Training", "load_balancer", "PacketSpray", "load_balancing", flexible=flexible
        ),
    )
    alt_doc = documents.explanation_to_json(alternative)
    alt_doc["rendered"] = render_template(alternative)
    documents.write_document(FIXTURES / "packetspray_flexible.explain.json", alt_doc)

    # a design carrying a warning banner: bump the load so the monitor lands
    # on Simon beyond its benchmarked link speeds
    query2_doc = json.loads(
        documents.bundled_path("inference_no_prog.query.json").read_text()
    )
    query2_doc["workloads"][0]["scalars"]["network_load"] = 45
    query2 = documents.query_from_json(query2_doc)
    design2 = synthesize(catalog, query2)
    assert any("Simon" in source for source, _ in design2.warnings), design2.warnings
    documents.write_document(
        FIXTURES / "inference_hot.design.json", documents.design_to_json(design2)
    )
    print(f"wrote fixtures under {FIXTURES}")


if __name__ == "__main__":
    main()
