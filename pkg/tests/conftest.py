import json
import os

import pytest

import acceptance_report

from aegisshield.attack_kb import load_bundles
from aegisshield.domain import ApplicationProfile, PipelineConfig, validate_profile
from aegisshield.gateway import Gateway, MockChatProvider
from aegisshield.pipeline import run_full

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_path(*parts) -> str:
    return os.path.abspath(os.path.join(FIXTURES, *parts))


@pytest.fixture(scope="session")
def kb_paths():
    return [
        fixture_path("kb", "enterprise-attack.json"),
        fixture_path("kb", "ics-attack.json"),
        fixture_path("kb", "mobile-attack.json"),
    ]


@pytest.fixture(scope="session")
def kb(kb_paths):
    return load_bundles(kb_paths)


@pytest.fixture(scope="session")
def mock_dir():
    return fixture_path("mock-provider")


@pytest.fixture()
def mock_gateway(mock_dir):
    return Gateway(MockChatProvider(directory=mock_dir))


@pytest.fixture(scope="session")
def daas_profile():
    with open(fixture_path("profiles", "daas.json"), encoding="utf-8") as fh:
        return validate_profile(ApplicationProfile.from_doc(json.load(fh)))


@pytest.fixture()
def mock_run(daas_profile, kb, mock_gateway):
    return run_full(daas_profile, PipelineConfig(), mock_gateway, kb)


@pytest.fixture(scope="session")
def canned_threat_doc(mock_dir):
    from aegisshield.gateway import extract_structured

    with open(os.path.join(mock_dir, "threat_model.txt"), encoding="utf-8") as fh:
        return extract_structured(fh.read())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_report.RESULTS:
        return  # acceptance module not part of this run
    terminalreporter.section("acceptance criteria")
    for line in acceptance_report.summary_lines():
        terminalreporter.write_line(line)
