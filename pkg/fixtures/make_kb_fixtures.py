"""Regenerates the STIX bundle fixtures under fixtures/kb/.

The bundles are miniature but structurally faithful: attack-pattern
objects with ATT&CK catalog references, a collection object carrying the
version tag, non-pattern objects that loaders must skip, and one revoked
plus one deprecated pattern. Descriptions are original summaries written
for these fixtures.
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def pattern(stix_id, technique_id, name, description):
    url_tid = technique_id.replace(".", "/")
    return {
        "type": "attack-pattern",
        "id": stix_id,
        "name": name,
        "description": description,
        "external_references": [
            {
                "source_name": "mitre-attack",
                "external_id": technique_id,
                "url": f"https://attack.mitre.org/techniques/{url_tid}/",
            }
        ],
    }


ENTERPRISE = [
    {
        "type": "x-mitre-collection",
        "id": "x-mitre-collection--11111111-1111-1111-1111-111111111111",
        "name": "Enterprise ATT&CK (fixture)",
        "x_mitre_version": "fixture-1.0",
    },
    pattern(
        "attack-pattern--035bb001-ab69-4a0b-9f6c-2de8b09e1b9d", "T1557",
        "Adversary-in-the-Middle",
        "Adversaries position themselves between networked devices to carry out "
        "interception of communication, spoofing of identities, credential capture, "
        "and manipulation of data in transit. Such network eavesdropping against "
        "authentication exchanges and traffic supports follow-on attacks.",
    ),
    pattern(
        "attack-pattern--2e34237d-8574-43f6-aace-ae2915de8597", "T1566.001",
        "Spearphishing Attachment",
        "Adversaries send phishing messages carrying malicious attachments to "
        "obtain credential material or execute payloads on operator workstations. "
        "Email lures are tailored to the target organization.",
    ),
    pattern(
        "attack-pattern--16ab6452-c3c1-497c-a47d-206018ca1ada", "T1542.001",
        "System Firmware",
        "Adversaries modify system firmware to establish a persistent foothold "
        "below the operating system. A tampered firmware update mechanism lets "
        "malicious images survive reinstallation.",
    ),
    pattern(
        "attack-pattern--aaf0ce52-2a27-4211-86e3-824a866a9e29", "T1495",
        "Firmware Corruption",
        "Adversaries overwrite or corrupt the firmware of devices and components, "
        "rendering them inoperable or unstable and hard to recover.",
    ),
    pattern(
        "attack-pattern--d74c4a7e-ffbf-432f-9365-7ebf1f787cab", "T1498",
        "Network Denial of Service",
        "Adversaries flood a network or service with traffic to cause a denial of "
        "service, degrading availability of the target for legitimate users.",
    ),
    pattern(
        "attack-pattern--2bce5b30-7014-4a5d-ade7-12913fe6ac36", "T1070.002",
        "Clear Linux or Mac System Logs",
        "Adversaries clear system logs and audit records to hide intrusion "
        "activity, complicating forensics through deletion of evidence.",
    ),
    pattern(
        "attack-pattern--d45a3d09-b3cf-48f4-9f0f-f521ee5cb05c", "T1485",
        "Data Destruction",
        "Adversaries destroy or irreversibly alter data on systems and in cloud "
        "storage to interrupt availability of services and information.",
    ),
    pattern(
        "attack-pattern--b17a1a56-e99c-403c-8948-561df0cffe81", "T1078",
        "Valid Accounts",
        "Adversaries obtain and abuse credential material of existing accounts to "
        "gain access and evade defenses; stolen accounts also support privilege "
        "escalation and repudiation of audit trails.",
    ),
    pattern(
        "attack-pattern--7c46b364-8496-4234-8a56-f7e6727e21e1", "T1020.001",
        "Traffic Duplication",
        "Adversaries leverage traffic mirroring to duplicate network communication "
        "and forward it outward, enabling large-scale interception and "
        "eavesdropping on data in transit.",
    ),
    pattern(
        "attack-pattern--b21c3b2d-02e6-45b1-980b-e69051040839", "T1068",
        "Exploitation for Privilege Escalation",
        "Adversaries exploit a software vulnerability in the kernel or privileged "
        "services to achieve privilege escalation and administrative control.",
    ),
    # retired entries: loaders must drop both
    {
        **pattern(
            "attack-pattern--99999999-9999-4999-8999-999999999991", "T9901",
            "Retired Interception Technique",
            "Historic interception entry kept only for the revocation filter.",
        ),
        "revoked": True,
    },
    {
        **pattern(
            "attack-pattern--99999999-9999-4999-8999-999999999992", "T9902",
            "Deprecated Flooding Technique",
            "Historic denial of service entry kept only for the deprecation filter.",
        ),
        "x_mitre_deprecated": True,
    },
    # non-pattern objects: loaders must ignore
    {
        "type": "intrusion-set",
        "id": "intrusion-set--44444444-4444-4444-4444-444444444444",
        "name": "Fixture Group",
    },
    {
        "type": "relationship",
        "id": "relationship--55555555-5555-4555-8555-555555555555",
        "relationship_type": "uses",
        "source_ref": "intrusion-set--44444444-4444-4444-4444-444444444444",
        "target_ref": "attack-pattern--035bb001-ab69-4a0b-9f6c-2de8b09e1b9d",
    },
]

ICS = [
    {
        "type": "x-mitre-collection",
        "id": "x-mitre-collection--22222222-2222-2222-2222-222222222222",
        "name": "ICS ATT&CK (fixture)",
        "x_mitre_version": "fixture-1.0",
    },
    pattern(
        "attack-pattern--bb24e183-1982-4c6a-8a22-1c5b4b8e0839", "T0839",
        "Module Firmware",
        "Adversaries install malicious or vulnerable firmware onto modules of "
        "field devices to keep persistent control over industrial equipment.",
    ),
    pattern(
        "attack-pattern--cc15e183-4455-4c6a-8a22-1c5b4b8e0814", "T0814",
        "Denial of Service",
        "Adversaries perform denial of service against control system functions "
        "by exhausting resources or crashing devices, interrupting operation.",
    ),
    # same technique id as the enterprise entry: blending must dedupe
    pattern(
        "attack-pattern--dd26e183-6677-4c6a-8a22-1c5b4b8e1498", "T1498",
        "Network Denial of Service",
        "Adversaries flood industrial network links with traffic to cause a "
        "denial of service against supervisory channels.",
    ),
]

MOBILE = [
    {
        "type": "x-mitre-collection",
        "id": "x-mitre-collection--33333333-3333-3333-3333-333333333333",
        "name": "Mobile ATT&CK (fixture)",
        "x_mitre_version": "fixture-1.0",
    },
    pattern(
        "attack-pattern--ee37e183-8899-4c6a-8a22-1c5b4b8e1461", "T1461",
        "Lockscreen Bypass",
        "Adversaries bypass the device lockscreen to obtain access to a mobile "
        "device through biometric spoofing or credential guessing.",
    ),
]


def write(name, objects):
    bundle = {
        "type": "bundle",
        "id": f"bundle--0000000b-000b-4b0b-800b-{name[:12]:<012}".replace(" ", "0"),
        "objects": objects,
    }
    path = os.path.join(HERE, "kb", f"{name}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle, fh, indent=2)
    print("wrote", path)


if __name__ == "__main__":
    write("enterprise-attack", ENTERPRISE)
    write("ics-attack", ICS)
    write("mobile-attack", MOBILE)
