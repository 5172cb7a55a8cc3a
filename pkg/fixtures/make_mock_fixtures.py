"""Regenerates the canned mock-provider responses under fixtures/mock-provider/.

The canned run models a drone-services platform: 18 threats (3 per STRIDE
category) with assumptions and search keywords, a DREAD table, a
mitigation table, Gherkin suites, and a mermaid attack tree. The threat
wording mirrors the kind of report the live pipeline produces.
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "mock-provider")


def threat(threat_type, scenario, impact, assumptions, keywords):
    return {
        "Threat Type": threat_type,
        "Scenario": scenario,
        "Assumptions": [
            {"Assumption": a, "Role": r, "Condition": c} for a, r, c in assumptions
        ],
        "Potential Impact": impact,
        "MITRE ATT&CK Keywords": keywords,
    }


THREATS = [
    threat(
        "Spoofing",
        "An attacker impersonates a drone operator to gain control of UAVs.",
        "Unauthorized control of UAVs affects service integrity and confidentiality.",
        [("No strict authentication for operators.", "Attacker",
          "Operators have weak or no authentication mechanisms."),
         ("Access to communication channels.", "Attacker",
          "Attacker intercepts communication or uses social engineering.")],
        ["spoofing", "credential", "network"],
    ),
    threat(
        "Spoofing",
        "An attacker spoofs GPS signals to redirect a drone.",
        "Disruption of navigation leads to lost drones and service interruption.",
        [("Drones rely solely on GPS for navigation.", "Attacker",
          "No additional verification of location data is implemented."),
         ("Proximity to drone's operational space.", "Attacker",
          "Physical proximity to the area of drone operation.")],
        ["spoofing", "interception", "navigation"],
    ),
    threat(
        "Spoofing",
        "Phishing attack leading to credential theft from GCS operators.",
        "Credential theft leads to unauthorized data access and mission disruption.",
        [("Operators use unvetted third-party email clients.", "Attacker",
          "Lack of email security training for the staff."),
         ("Sensitive data accessible via email credentials.", "Attacker",
          "Critical system access through compromised credentials.")],
        ["phishing", "credential", "email"],
    ),
    threat(
        "Tampering",
        "Firmware on drones is maliciously altered to change drone behavior.",
        "Compromised firmware causes performance failures and data breaches.",
        [("Access to drone firmware update process.", "Attacker",
          "Weak protection of the update process."),
         ("Firmware is not signed or verified post-update.", "Attacker",
          "Lacking digital signature verification.")],
        ["firmware", "tampering", "update"],
    ),
    threat(
        "Tampering",
        "Data communication channels are altered leading to misinformation.",
        "Corrupted data misguides decision-making disrupting operations.",
        [("Unsecured communication protocols.", "Attacker",
          "Insufficient encryption or integrity checks during transmission."),
         ("Access to network traffic.", "Attacker",
          "Proximity and ability to intercept the communication.")],
        ["network", "interception", "data in transit"],
    ),
    threat(
        "Tampering",
        "An attacker modifies stored data in the cloud infrastructure.",
        "Altered cloud data results in misinformation and potential data breaches.",
        [("Weak access controls on cloud services.", "Attacker",
          "No stringent identity and access management policies."),
         ("Presence of exploitable cloud vulnerabilities.", "Attacker",
          "Vulnerabilities in cloud configurations or software.")],
        ["cloud", "data", "storage"],
    ),
    threat(
        "Repudiation",
        "An operator's command logs are missing due to inadequate logging.",
        "Difficulties in forensic investigation and operational accountability.",
        [("Lack of comprehensive logging mechanisms.", "Application",
          "Insufficient audits trail for critical actions."),
         ("Log tampering goes undetected.", "Attacker",
          "Absence of tamper-proof log systems.")],
        ["logs", "audit", "deletion"],
    ),
    threat(
        "Repudiation",
        "Attackers perform unauthorized actions and deny responsibility.",
        "Compromised accountability leads to untraceable unauthorized actions.",
        [("No digital signature on critical commands.", "Application",
          "Command execution without verification."),
         ("Inadequate user action monitoring.", "System Administrator",
          "Absence of robust monitoring tools.")],
        ["accounts", "credential", "audit"],
    ),
    threat(
        "Repudiation",
        "An insider disables telemetry recording to conceal unauthorized flight plans.",
        "Loss of flight accountability hampers incident investigation.",
        [("Telemetry recording can be switched off per mission.", "Insider",
          "Recording controls lack a second-person rule."),
         ("Telemetry gaps raise no alert.", "Application",
          "No monitoring of recording coverage.")],
        ["logs", "telemetry", "audit"],
    ),
    threat(
        "Information Disclosure",
        "Sensitive data is exposed through unsecured cloud storage.",
        "Exposure of sensitive operation data breaches confidentiality.",
        [("Default cloud storage settings are insecure.", "Cloud Provider",
          "Inadequate securing of storage permissions."),
         ("Sensitive data not encrypted at rest.", "Data Handler",
          "Encryption policies are not enforced.")],
        ["cloud", "storage", "exposure"],
    ),
    threat(
        "Information Disclosure",
        "Intercepted communication leads to leakage of operational data.",
        "Operational plans leak to adversaries affecting mission integrity.",
        [("Weak encryption on communication channels.", "Application Architect",
          "Inadequate encryption protocols for transmission."),
         ("Advancement in interception tools.", "Attacker",
          "High sophistication tools present in threat landscape.")],
        ["interception", "network", "eavesdropping"],
    ),
    threat(
        "Information Disclosure",
        "Verbose error messages from the GCS API reveal internal system details.",
        "Leaked configuration details ease reconnaissance for further attacks.",
        [("Error handlers return stack traces.", "Application",
          "Debug configuration enabled in production."),
         ("API reachable without authentication.", "Attacker",
          "Unauthenticated endpoints exposed to the internet.")],
        ["information disclosure", "api", "reconnaissance"],
    ),
    threat(
        "Denial of Service",
        "Overloading the GCS with traffic prevents normal operational access.",
        "Disruption of drone operations due to unavailability of GCS.",
        [("GCS lacks robust anti-DDoS protections.", "Defender",
          "Absence of traffic analysis or limiting measures."),
         ("Sufficient resources to launch large-scale attack.", "Attacker",
          "Attacker has access to botnet resources.")],
        ["denial of service", "flood", "network"],
    ),
    threat(
        "Denial of Service",
        "Attackers exploit firmware vulnerabilities to crash UAVs.",
        "Operational drones crash leading to mission failure and potential hazards.",
        [("Known firmware vulnerabilities present.", "Attacker",
          "Exploitable vulnerabilities without patches."),
         ("Remote access to UAV systems.", "Attacker",
          "Access through unauthorized channels or compromised nodes.")],
        ["firmware", "denial of service", "crash"],
    ),
    threat(
        "Denial of Service",
        "An attacker jams the radio link between drones and the ground station.",
        "Loss of command link grounds the fleet and interrupts service.",
        [("Radio link uses a fixed public frequency band.", "Attacker",
          "No frequency hopping or link redundancy."),
         ("Jamming hardware is obtainable.", "Attacker",
          "Commodity transmitters cover the control band.")],
        ["jamming", "communication", "availability"],
    ),
    threat(
        "Elevation of Privilege",
        "Exploitation of Linux Kernel vulnerabilities for unauthorized control access.",
        "Unauthorized privilege gain resulting in full system control.",
        [("Vulnerabilities unpatched in kernel system.", "Attacker",
          "System updates neglected or irregularly applied."),
         ("System privileges inadequately segregated.", "System Administrator",
          "Lack of least privilege enforcements.")],
        ["privilege escalation", "kernel", "vulnerability"],
    ),
    threat(
        "Elevation of Privilege",
        "A compromised maintenance account is used to gain administrative rights on the GCS.",
        "Full administrative control enables tampering with every mission.",
        [("Maintenance accounts share passwords.", "Vendor",
          "Vendor access is not individually credentialed."),
         ("Admin role attainable without approval.", "Application",
          "Role changes lack a review step.")],
        ["privilege escalation", "accounts", "credential"],
    ),
    threat(
        "Elevation of Privilege",
        "Exploitation of a container escape flaw in the cloud analytics service grants host access.",
        "Host-level access exposes data from all tenants.",
        [("Analytics containers run privileged.", "Cloud Provider",
          "Hardening profiles are not applied."),
         ("Host kernel is outdated.", "Operator",
          "Patch cadence slower than disclosure cadence.")],
        ["privilege escalation", "container", "cloud"],
    ),
]

SUGGESTIONS = [
    "Provide detailed list of authentication methods including credentials, multi-factor authentication, and security tokens.",
    "Specify version details and configurations for all software including drone firmware and cloud services.",
    "Include descriptions of any security policies or measures in place for data access, encryption standards, and communication protocols.",
    "Detail the security measures implemented for each component, such as encryption methods, authentication protocols, and physical security controls.",
    "State whether penetration tests or security audits have been conducted and summarized their findings.",
]

# DREAD dimensions per (type, scenario); first thirteen rows are the
# canonical report-example values, the rest follow the same style.
DREAD_ROWS = [
    ("Spoofing", 0, (9, 6, 8, 8, 7)),
    ("Spoofing", 1, (8, 5, 7, 9, 6)),
    ("Spoofing", 2, (8, 7, 8, 9, 5)),
    ("Tampering", 3, (9, 6, 7, 8, 6)),
    ("Tampering", 4, (8, 5, 6, 7, 5)),
    ("Tampering", 5, (8, 6, 7, 8, 5)),
    ("Repudiation", 6, (6, 4, 5, 6, 4)),
    ("Repudiation", 7, (7, 6, 6, 7, 6)),
    ("Repudiation", 8, (6, 5, 5, 6, 4)),
    ("Information Disclosure", 9, (8, 5, 6, 9, 7)),
    ("Information Disclosure", 10, (7, 6, 7, 8, 5)),
    ("Information Disclosure", 11, (6, 8, 7, 6, 8)),
    ("Denial of Service", 12, (9, 8, 8, 8, 5)),
    ("Denial of Service", 13, (9, 6, 7, 8, 6)),
    ("Denial of Service", 14, (7, 7, 6, 8, 6)),
    ("Elevation of Privilege", 15, (9, 5, 7, 7, 6)),
    ("Elevation of Privilege", 16, (9, 6, 7, 7, 5)),
    ("Elevation of Privilege", 17, (9, 4, 5, 8, 4)),
]

MITIGATIONS = [
    "Implement multi-factor authentication (MFA) for all operators. Encrypt communication channels between operators and drones to prevent interception. Regularly update and patch systems to protect against known vulnerabilities.",
    "Integrate redundant navigation systems (e.g., inertial measurement units or ground-based signals) to verify GPS data. Employ GPS signal authentication mechanisms and continually monitor GPS signal integrity.",
    "Conduct regular phishing awareness training for operators. Implement email filtering solutions to detect and block phishing attempts. Use MFA for access to critical systems.",
    "Require digital signature verification for all firmware updates. Harden the firmware update process with encryption and access controls. Regularly audit firmware integrity through automated and manual checks.",
    "Utilize end-to-end encryption and integrity checks, such as hashing, for all communications. Set up intrusion detection systems to alert on suspicious activities in communication channels.",
    "Enforce strict identity and access management policies, including role-based access controls. Regularly audit access logs and cloud configurations for anomalies. Apply data integrity checks and employ encryption at rest and in transit.",
    "Implement comprehensive logging policies to capture all critical actions. Use tamper-evident log solutions, such as secure, centralized logging servers with checksum validation. Conduct regular log audits to ensure completeness and accuracy.",
    "Digitally sign all commands and use strong authentication methods to ensure command authenticity. Enhance user activity monitoring and provide regular accountability reviews.",
    "Require dual authorization to change telemetry recording settings and alert on recording coverage gaps.",
    "Apply strict access controls and encryption for cloud storage. Use cloud security posture management tools to ensure storage configurations comply with security policies. Conduct periodic penetration tests and vulnerability assessments.",
    "Use strong encryption protocols, such as TLS, for all data communications. Conduct regular threat assessments to identify emerging interception technologies and adapt defensive measures.",
    "Disable verbose error output in production and require authentication on all GCS API endpoints.",
    "Employ proper network segmentation and DDoS protection services to absorb and mitigate attack traffic. Implement rate limiting and anomaly detection to monitor and respond to abnormal traffic patterns.",
    "Regularly update and patch UAV firmware to address vulnerabilities. Establish an incident response plan specific to UAV operations to quickly isolate and recover compromised systems.",
    "Adopt frequency-hopping radios and a secondary command path so that a jammed band does not ground the fleet.",
    "Keep the Linux kernel and associated packages up-to-date with the latest patches. Enforce the principle of least privilege for all user accounts. Perform regular security audits and assessments to identify and rectify privilege escalation vectors.",
    "Issue individual vendor credentials, rotate maintenance passwords, and gate administrative role changes behind an approval workflow.",
    "Run analytics workloads unprivileged with hardened seccomp profiles and keep container hosts patched.",
]

TEST_CASES = [
    ("Test Case: UAV Operator Authentication", "Spoofing Authentication",
     "An attacker impersonates a drone operator to gain control of UAVs",
     ["Given operators have weak or no authentication mechanisms",
      "And an attacker intercepts communication or uses social engineering",
      "When the attacker attempts to impersonate a drone operator",
      "Then the attacker gains unauthorized control of the UAVs",
      "And the service integrity and confidentiality are compromised"]),
    ("Test Case: GPS Signal Spoofing", "GPS Navigation Spoofing",
     "An attacker spoofs GPS signals to redirect a drone",
     ["Given drones rely solely on GPS for navigation",
      "And the attacker is in proximity to the drone's operational space",
      "When the attacker spoofs GPS signals",
      "Then the drone's navigation is disrupted",
      "And this leads to lost drones and service interruption"]),
    ("Test Case: Phishing for Credentials", "Operator Credential Phishing",
     "Phishing attack leading to credential theft from GCS operators",
     ["Given operators use unvetted third-party email clients",
      "And critical system access is possible through compromised credentials",
      "When an attacker successfully conducts a phishing attack",
      "Then credentials are stolen",
      "And unauthorized data access and mission disruption occur"]),
    ("Test Case: Firmware Tampering", "Drone Firmware Alteration",
     "Firmware on drones is maliciously altered",
     ["Given weak protection of the firmware update process",
      "And lack of digital signature verification",
      "When the attacker alters the firmware",
      "Then the drone behavior changes",
      "And performance failures and data breaches occur"]),
    ("Test Case: Ground Station Flooding", "GCS Availability",
     "Overloading the GCS with traffic prevents normal operational access",
     ["Given the GCS lacks robust anti-DDoS protections",
      "And the attacker controls sufficient traffic sources",
      "When the attacker floods the ground control station",
      "Then normal operational access is prevented",
      "And drone operations are disrupted"]),
    ("Test Case: Kernel Privilege Escalation", "Control Host Hardening",
     "Exploitation of Linux Kernel vulnerabilities for unauthorized control access",
     ["Given kernel vulnerabilities remain unpatched",
      "And system privileges are inadequately segregated",
      "When the attacker exploits a kernel vulnerability",
      "Then the attacker gains unauthorized elevated control",
      "And full system control is possible"]),
]

ATTACK_TREE = """graph LR
  A["Compromise of Drone Services Platform (CIA)"] --> B(Spoofing)
  A --> C(Tampering)
  A --> D(Repudiation)
  A --> E["Information Disclosure"]
  A --> F["Denial of Service (DoS)"]
  A --> G["Elevation of Privilege"]

  %% Subgraph for Spoofing Threats
  subgraph Spoofing Threats
    B(Operator and Signal Spoofing)
    B --> B1["Spoofing UAV Operators"]
    B --> B2["GPS Spoofing"]
    B --> B3["Credential Theft via Phishing"]
    B1 --> B1a["Adversary-in-the-Middle (T1557): Intercept communication"]
    B2 --> B2a["Adversary-in-the-Middle (T1557): Spoof GPS signals"]
    B3 --> B3a["Spearphishing Attachment (T1566.001)"]
  end

  %% Subgraph for Tampering Threats
  subgraph Tampering Threats
    C(UAV Firmware and Data Tampering)
    C --> C1["Firmware Tampering"]
    C --> C2["Communication Alteration"]
    C --> C3["Cloud Data Manipulation"]
    C1 --> C1a["System Firmware (T1542.001): Alter firmware"]
    C2 --> C2a["Insufficient encryption or integrity checks"]
    C3 --> C3a["Data Destruction (T1485): Modify stored data"]
  end

  %% Subgraph for Repudiation Threats
  subgraph Repudiation Threats
    D["Command and Action Repudiation"]
    D --> D1["Missing Command Logs"]
    D --> D2["Denial of Unauthorized Actions"]
    D --> D3["Disabled Telemetry Recording"]
    D1 --> D1a["Clear Linux or Mac System Logs (T1070.002)"]
    D2 --> D2a["Valid Accounts (T1078): Act with stolen credentials"]
  end

  %% Subgraph for Information Disclosure Threats
  subgraph Information Disclosure Threats
    E["Leakage of Sensitive Data"]
    E --> E1["Unsecured Cloud Storage"]
    E --> E2["Intercepted Communication"]
    E --> E3["Verbose API Errors"]
    E2 --> E2a["Traffic Duplication (T1020.001)"]
  end

  %% Subgraph for Denial of Service Threats
  subgraph Denial of Service Threats
    F["Service Disruption"]
    F --> F1["Network DDoS on GCS"]
    F --> F2["Firmware Vulnerability Exploitation"]
    F --> F3["Radio Link Jamming"]
    F1 --> F1a["Network Denial of Service (T1498): Overwhelm GCS"]
  end

  %% Subgraph for Elevation of Privilege Threats
  subgraph Elevation of Privilege Threats
    G["Unlawful Access"]
    G --> G1["Linux Kernel Exploitation"]
    G --> G2["Maintenance Account Abuse"]
    G --> G3["Container Escape"]
    G1 --> G1a["Exploit kernel vulnerabilities for privilege escalation"]
  end"""


def main():
    os.makedirs(OUT, exist_ok=True)

    doc = {"threat_model": THREATS, "improvement_suggestions": SUGGESTIONS}
    with open(os.path.join(OUT, "threat_model.txt"), "w", encoding="utf-8") as fh:
        fh.write("```json\n" + json.dumps(doc, indent=2) + "\n```\n")

    with open(os.path.join(OUT, "mitre_select.txt"), "w", encoding="utf-8") as fh:
        fh.write('["attack-pattern--035bb001-ab69-4a0b-9f6c-2de8b09e1b9d"]\n')

    assessment = []
    for threat_type, index, dims in DREAD_ROWS:
        damage, repro, exploit, affected, discover = dims
        assessment.append({
            "Threat Type": threat_type,
            "Scenario": THREATS[index]["Scenario"],
            "Damage Potential": damage,
            "Reproducibility": repro,
            "Exploitability": exploit,
            "Affected Users": affected,
            "Discoverability": discover,
        })
    with open(os.path.join(OUT, "dread.txt"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"Risk Assessment": assessment}, indent=2) + "\n")

    lines = ["| Threat Type | Scenario | Suggested Mitigation(s) |",
             "|-------------|----------|--------------------------|"]
    for entry, mitigation in zip(THREATS, MITIGATIONS):
        lines.append(f"| {entry['Threat Type']} | {entry['Scenario']} | {mitigation} |")
    with open(os.path.join(OUT, "mitigations.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    blocks = []
    for title, feature, scenario, steps in TEST_CASES:
        body = "\n".join([f"Feature: {feature}", f"Scenario: {scenario}"] + steps)
        blocks.append(f"{title}\n\n```gherkin\n{body}\n```")
    with open(os.path.join(OUT, "test_cases.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n\n".join(blocks) + "\n")

    with open(os.path.join(OUT, "attack_tree.txt"), "w", encoding="utf-8") as fh:
        fh.write("```mermaid\n" + ATTACK_TREE + "\n```\n")

    print("wrote mock provider responses to", OUT)


if __name__ == "__main__":
    main()
