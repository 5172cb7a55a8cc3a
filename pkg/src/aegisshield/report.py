"""Render a ThreatModelRun into the security report: markdown first,
PDF from markdown.

The markdown layout carries eight fixed sections in order; optional
artifacts that were never generated render as "not generated". PDF output
keeps content streams uncompressed so the text layer is verifiable.
"""

from __future__ import annotations

import io
import re

from reportlab.lib import colors
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.pdfgen import canvas as pdfcanvas
from reportlab.platypus import (
    Paragraph,
    Preformatted,
    SimpleDocTemplate,
    Spacer,
    Table,
    TableStyle,
)

from .domain import ThreatModelRun
from .errors import RenderFailedError

REPORT_TITLE = "AegisShield Security Report"

SECTION_ORDER = (
    "Application Description",
    "Improvement Suggestions",
    "STRIDE Threat Model",
    "MITRE ATT&CK",
    "Mitigations",
    "DREAD Risk Assessment",
    "Attack Tree",
    "Test Cases",
)

ATTACK_TREE_INSTRUCTION = (
    "Attack Tree diagram instructions: Copy the below code and paste it into "
    "https://mermaid.live/"
)

NOT_GENERATED = "_Not generated._"


def _cell(text: str) -> str:
    # keep table rows intact when prose contains a pipe
    return str(text).replace("|", "\\|").replace("\n", " ")


def _assumptions_text(threat) -> str:
    if not threat.assumptions:
        return ""
    return " ".join(
        f"{a.assumption} (Role: {a.role}, Condition: {a.condition})"
        for a in threat.assumptions
    )


def render_markdown(run: ThreatModelRun) -> str:
    """Deterministic markdown report with the eight sections in order."""
    profile = run.profile
    out: list[str] = [f"# {REPORT_TITLE}", ""]

    out += [f"## {SECTION_ORDER[0]}", ""]
    out += [
        f"- **Application Type:** {profile.app_type}",
        f"- **Industry Sector:** {profile.industry_sector}",
        f"- **Sensitive Data:** {profile.data_sensitivity}",
        f"- **Internet Facing:** {'Yes' if profile.internet_facing else 'No'}",
        f"- **Number of Employees:** {profile.employee_range}",
        f"- **Compliance Requirements:** [{', '.join(profile.compliance) or 'None'}]",
        f"- **Technical Ability:** {profile.technical_ability}",
        f"- **Authentication Method:** {', '.join(profile.auth_methods) or 'N/A'}",
    ]
    if profile.technologies:
        tech_names = ", ".join(t.name for t in profile.technologies)
        versions = ", ".join(
            f"{t.name} {t.version_pattern}".strip() for t in profile.technologies
        )
        out += [
            f"- **Selected Technologies:** {tech_names}",
            f"- **Selected Versions:** {versions}",
        ]
    out += ["", profile.description, ""]

    out += [f"## {SECTION_ORDER[1]}", ""]
    if run.improvement_suggestions:
        out += [f"- {s}" for s in run.improvement_suggestions]
    else:
        out.append(NOT_GENERATED)
    out.append("")

    out += [f"## {SECTION_ORDER[2]}", ""]
    out.append("| Threat Type | Scenario | Assumptions | Potential Impact |")
    out.append("|-------------|----------|-------------|------------------|")
    for threat in run.threats:
        out.append(
            f"| {threat.threat_type.value} | {_cell(threat.scenario)} | "
            f"{_cell(_assumptions_text(threat))} | {_cell(threat.potential_impact)} |"
        )
    out.append("")

    out += [f"## {SECTION_ORDER[3]}", ""]
    if run.mappings:
        for threat, mapping in zip(run.threats, run.mappings):
            out += [
                f"**Threat:** {threat.threat_type.value}",
                "",
                f"**Scenario:** {threat.scenario}",
                "",
                f"**Potential Impact:** {threat.potential_impact}",
                "",
                f"Name: {mapping.name}",
                "",
                f"- **URL:** <{mapping.url}>",
                f"- **Technique ID:** {mapping.technique_id}",
                f"- **Attack Pattern ID:** {mapping.stix_id}",
                "",
            ]
    else:
        out += [NOT_GENERATED, ""]

    out += [f"## {SECTION_ORDER[4]}", ""]
    if run.mitigations is not None:
        out += [run.mitigations.raw_markdown.strip(), ""]
    else:
        out += [NOT_GENERATED, ""]

    out += [f"## {SECTION_ORDER[5]}", ""]
    if run.dread is not None:
        out.append(
            "| Threat Type | Scenario | Damage Potential | Reproducibility | "
            "Exploitability | Affected Users | Discoverability | Risk Score |"
        )
        out.append("|---|---|---|---|---|---|---|---|")
        for threat, score in zip(run.threats, run.dread):
            out.append(
                f"| {threat.threat_type.value} | {_cell(threat.scenario)} | "
                f"{score.damage} | {score.reproducibility} | {score.exploitability} | "
                f"{score.affected_users} | {score.discoverability} | {score.risk_score} |"
            )
        out.append("")
    else:
        out += [NOT_GENERATED, ""]

    out += [f"## {SECTION_ORDER[6]}", ""]
    if run.attack_tree is not None:
        out += [ATTACK_TREE_INSTRUCTION, "", "```", run.attack_tree.mermaid_source, "```", ""]
    else:
        out += [NOT_GENERATED, ""]

    out += [f"## {SECTION_ORDER[7]}", ""]
    if run.test_cases is not None:
        for suite in run.test_cases.suites:
            if suite.get("title"):
                out += [f"**{suite['title']}**", ""]
            out += ["```gherkin", suite["gherkin_source"], "```", ""]
    else:
        out += [NOT_GENERATED, ""]

    return "\n".join(out)


_HEADING = re.compile(r"^(#{1,6})\s+(.*)$")
_TABLE_LINE = re.compile(r"^\s*\|(.+)\|\s*$")
_TABLE_SEPARATOR = re.compile(r"^\s*\|[\s:|-]+\|\s*$")
_BULLET = re.compile(r"^\s*[-*]\s+(.*)$")


def _inline(text: str) -> str:
    """Markdown inline emphasis to the tiny HTML subset Paragraph accepts."""
    text = text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    text = re.sub(r"\*\*(.+?)\*\*", r"<b>\1</b>", text)
    text = re.sub(r"(?<!\*)\*(?!\*)(.+?)(?<!\*)\*(?!\*)", r"<i>\1</i>", text)
    text = re.sub(r"_(.+?)_", r"<i>\1</i>", text)
    return text


def render_pdf(markdown: str) -> bytes:
    """Best-effort PDF from the report markdown.

    Every heading and table row lands in the text layer; unclosed fences
    are tolerated. Raises RenderFailedError only when the document cannot
    be produced at all.
    """
    try:
        return _render_pdf(markdown)
    except RenderFailedError:
        raise
    except Exception as exc:  # reportlab raises plain Exceptions
        raise RenderFailedError(f"PDF rendering failed: {exc}") from exc


def _uncompressed_canvas(*args, **kwargs):
    kwargs["pageCompression"] = 0
    return pdfcanvas.Canvas(*args, **kwargs)


def _render_pdf(markdown: str) -> bytes:
    styles = getSampleStyleSheet()
    body = styles["BodyText"]
    mono = ParagraphStyle("Mono", parent=body, fontName="Courier", fontSize=7, leading=8.5)
    cell_style = ParagraphStyle("Cell", parent=body, fontSize=7, leading=8.5)

    flow = []
    lines = markdown.splitlines()
    i = 0
    in_fence = False
    fence_buffer: list[str] = []
    table_buffer: list[list[str]] = []

    def flush_table():
        if not table_buffer:
            return
        width = max(len(row) for row in table_buffer)
        data = [
            [Paragraph(_inline(cell), cell_style) for cell in row + [""] * (width - len(row))]
            for row in table_buffer
        ]
        table = Table(data, colWidths=[(7.0 / width) * inch] * width, repeatRows=1)
        table.setStyle(
            TableStyle(
                [
                    ("GRID", (0, 0), (-1, -1), 0.25, colors.grey),
                    ("BACKGROUND", (0, 0), (-1, 0), colors.whitesmoke),
                    ("VALIGN", (0, 0), (-1, -1), "TOP"),
                ]
            )
        )
        flow.append(table)
        flow.append(Spacer(1, 6))
        table_buffer.clear()

    def flush_fence():
        if fence_buffer:
            flow.append(Preformatted("\n".join(fence_buffer), mono))
            flow.append(Spacer(1, 6))
            fence_buffer.clear()

    while i < len(lines):
        line = lines[i]
        i += 1
        if line.strip().startswith("```"):
            if in_fence:
                flush_fence()
            in_fence = not in_fence
            continue
        if in_fence:
            fence_buffer.append(line)
            continue
        if _TABLE_LINE.match(line):
            if _TABLE_SEPARATOR.match(line):
                continue
            cells = [c.strip() for c in _TABLE_LINE.match(line).group(1).split("|")]
            table_buffer.append(cells)
            continue
        flush_table()
        heading = _HEADING.match(line)
        if heading:
            level = min(len(heading.group(1)), 4)
            style = styles[f"Heading{level}"]
            flow.append(Paragraph(_inline(heading.group(2)), style))
            continue
        bullet = _BULLET.match(line)
        if bullet:
            flow.append(Paragraph(_inline(bullet.group(1)), body, bulletText="\u2022"))
            continue
        if line.strip():
            flow.append(Paragraph(_inline(line), body))
        else:
            flow.append(Spacer(1, 4))
    # tolerate an unclosed fence or trailing table
    flush_fence()
    flush_table()

    buffer = io.BytesIO()
    document = SimpleDocTemplate(
        buffer, pagesize=letter,
        leftMargin=0.75 * inch, rightMargin=0.75 * inch,
        topMargin=0.75 * inch, bottomMargin=0.75 * inch,
        title=REPORT_TITLE,
    )
    document.build(flow, canvasmaker=_uncompressed_canvas)
    return buffer.getvalue()
