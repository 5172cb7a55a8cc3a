"""Knowledge-base mechanics: dataset routing, ranked keyword search, and
sentinel resolution.

Run from the repository root:  python3 demos/03_attack_kb_search.py
"""

import os

from aegisshield.attack_kb import (
    keyword_search,
    load_bundles,
    resolve_pattern,
    select_datasets,
)
from aegisshield.domain import SENTINEL_STIX_ID

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")

kb = load_bundles([
    os.path.join(FIXTURES, "kb", name)
    for name in ("enterprise-attack.json", "ics-attack.json", "mobile-attack.json")
])
print(f"loaded {len(kb)} patterns; bundle versions {kb.versions}")

# Application type decides which ATT&CK datasets feed the candidate list.
for app_type in ("Web application", "Mobile application", "ICS/SCADA",
                 "IoT Device/System"):
    print(f"  {app_type:20} -> {sorted(select_datasets(app_type))}")

# Ranked search: distinct keywords matched first, then occurrence count,
# then technique id; duplicates across datasets collapse by technique id.
print("\nkeywords ['firmware'] over Enterprise + ICS:")
for pattern in keyword_search(kb, {"Enterprise", "ICS"}, ["firmware"], 25):
    print(f"  {pattern.technique_id:10} {pattern.name}  [{pattern.dataset}]")

print("\nkeywords ['spoofing', 'credential', 'network']:")
for pattern in keyword_search(kb, {"Enterprise"}, ["spoofing", "credential", "network"], 5):
    print(f"  {pattern.technique_id:10} {pattern.name}")

# The all-zeros sentinel id resolves to the Unknown placeholder instead of
# erroring; it is how "no relevant technique" flows through reports.
placeholder = resolve_pattern(kb, SENTINEL_STIX_ID)
print(f"\nsentinel resolves to: name={placeholder.name!r}, "
      f"technique={placeholder.technique_id!r}, url={placeholder.url}")
