import re

import pytest

from aegisshield.domain import ThreatModelRun
from aegisshield.report import (
    ATTACK_TREE_INSTRUCTION,
    REPORT_TITLE,
    SECTION_ORDER,
    render_markdown,
    render_pdf,
)
from pdftext import extract_text


class TestRenderMarkdown:
    def test_all_eight_sections_in_order(self, mock_run):
        markdown = render_markdown(mock_run)
        positions = [markdown.index(f"## {name}") for name in SECTION_ORDER]
        assert positions == sorted(positions)
        assert len(SECTION_ORDER) == 8
        assert markdown.startswith(f"# {REPORT_TITLE}")

    def test_dread_rows_show_two_decimal_scores(self, mock_run):
        markdown = render_markdown(mock_run)
        assert "| 9 | 6 | 8 | 8 | 7 | 7.60 |" in markdown
        assert "| 8 | 5 | 7 | 9 | 6 | 7.00 |" in markdown

    def test_attack_tree_instruction_line(self, mock_run):
        markdown = render_markdown(mock_run)
        assert "paste it into" in markdown
        assert ATTACK_TREE_INSTRUCTION in markdown
        assert "https://mermaid.live/" in markdown

    def test_missing_dread_reads_not_generated(self, mock_run):
        bare = ThreatModelRun(
            profile=mock_run.profile,
            threats=mock_run.threats,
            improvement_suggestions=mock_run.improvement_suggestions,
            mappings=mock_run.mappings,
        )
        markdown = render_markdown(bare)
        dread_section = markdown.split("## DREAD Risk Assessment")[1] \
                                .split("## Attack Tree")[0]
        assert "not generated" in dread_section.lower()

    def test_every_threat_appears_exactly_once_in_stride_section(self, mock_run):
        markdown = render_markdown(mock_run)
        stride = markdown.split("## STRIDE Threat Model")[1].split("## MITRE ATT&CK")[0]
        for threat in mock_run.threats:
            assert stride.count(threat.scenario) == 1

    def test_mitre_section_lists_mapping_fields(self, mock_run):
        markdown = render_markdown(mock_run)
        mitre = markdown.split("## MITRE ATT&CK")[1].split("## Mitigations")[0]
        mapped = [m for m in mock_run.mappings if m.mapped]
        assert mapped, "mock run should map at least one threat"
        sample = mapped[0]
        assert sample.name in mitre
        assert sample.url in mitre
        assert sample.technique_id in mitre
        assert sample.stix_id in mitre

    def test_unmapped_threat_renders_unknown(self, mock_run):
        markdown = render_markdown(mock_run)
        assert "Name: Unknown" in markdown
        assert "Technique ID:** N/A" in markdown

    def test_pure_and_deterministic(self, mock_run):
        assert render_markdown(mock_run) == render_markdown(mock_run)


class TestRenderPdf:
    def test_pdf_magic_header(self):
        pdf = render_pdf("# Title\n\nSome text.")
        assert pdf.startswith(b"%PDF-")

    def test_all_headings_in_text_layer(self, mock_run):
        pdf = render_pdf(render_markdown(mock_run))
        text = extract_text(pdf)
        assert REPORT_TITLE in text
        for name in SECTION_ORDER:
            assert name in text

    def test_all_18_dread_scenarios_survive(self, mock_run):
        pdf = render_pdf(render_markdown(mock_run))
        text = extract_text(pdf)
        for threat in mock_run.threats:
            assert threat.scenario in text

    def test_unclosed_fence_best_effort(self):
        pdf = render_pdf("# Report\n\n```mermaid\ngraph LR\n  A --> B\n")
        assert pdf.startswith(b"%PDF-")
        assert "graph LR" in extract_text(pdf)

    def test_table_not_truncated(self):
        rows = "\n".join(f"| row{i} | value number {i} |" for i in range(1, 19))
        markdown = f"# T\n\n| a | b |\n|---|---|\n{rows}\n"
        text = extract_text(render_pdf(markdown))
        for i in range(1, 19):
            assert f"value number {i}" in text
