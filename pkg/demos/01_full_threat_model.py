"""End-to-end threat-model run against the bundled mock provider.

Walks the whole pipeline for the drone-services demo profile: STRIDE
threat generation, attack-pattern mapping, DREAD scoring, mitigations,
Gherkin test cases, the attack tree, and finally the markdown + PDF
report. Everything is offline and deterministic.

Run from the repository root:  python3 demos/01_full_threat_model.py
"""

import json
import os

from aegisshield.attack_kb import load_bundles
from aegisshield.domain import ApplicationProfile, PipelineConfig, validate_profile
from aegisshield.gateway import Gateway, MockChatProvider
from aegisshield.pipeline import run_full
from aegisshield.report import render_markdown, render_pdf

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")

# 1. The application profile: the questionnaire answers plus a free-text
#    description of the system under analysis.
with open(os.path.join(FIXTURES, "profiles", "daas.json"), encoding="utf-8") as fh:
    profile = validate_profile(ApplicationProfile.from_doc(json.load(fh)))
print(f"profile: {profile.app_type} / {profile.industry_sector} "
      f"(sensitivity {profile.data_sensitivity})")

# 2. The ATT&CK knowledge base. These are miniature fixture bundles; use
#    `aegis kb fetch --dest <dir>` to cache the real ones.
kb = load_bundles([
    os.path.join(FIXTURES, "kb", name)
    for name in ("enterprise-attack.json", "ics-attack.json", "mobile-attack.json")
])
print(f"knowledge base: {len(kb)} attack patterns")

# 3. A gateway. The mock provider serves canned responses keyed by prompt
#    kind; swap in HttpChatProvider() with AEGIS_LLM_* set for live runs.
gateway = Gateway(MockChatProvider(directory=os.path.join(FIXTURES, "mock-provider")))

run = run_full(profile, PipelineConfig(), gateway, kb)

print(f"\nthreats: {len(run.threats)} "
      f"({sum(1 for m in run.mappings if m.mapped)} mapped to techniques)")
for threat, mapping, score in list(zip(run.threats, run.mappings, run.dread))[:5]:
    technique = mapping.technique_id if mapping.mapped else "unmapped"
    print(f"  [{threat.threat_type.value:24}] risk {score.risk_score}  "
          f"{technique:10}  {threat.scenario[:60]}")
print("  ...")

if run.metadata.warnings:
    print(f"\nwarnings recorded in run metadata: {len(run.metadata.warnings)}")

# 4. Reports.
markdown = render_markdown(run)
md_path = os.path.join(HERE, "demo-report.md")
with open(md_path, "w", encoding="utf-8") as fh:
    fh.write(markdown)
pdf_path = os.path.join(HERE, "demo-report.pdf")
with open(pdf_path, "wb") as fh:
    fh.write(render_pdf(markdown))
print(f"\nwrote {md_path}")
print(f"wrote {pdf_path}")
