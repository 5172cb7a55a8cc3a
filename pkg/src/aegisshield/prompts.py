"""The six generation-stage prompt templates and their renderer.

Templates are embedded verbatim (including their original quirks) so the
text sent to the provider is bit-identical across runs. Placeholders are
literal tokens replaced by name; JSON example braces inside the templates
are never touched, which is why str.format is deliberately not used.
"""

from __future__ import annotations

from enum import Enum

from .errors import MissingBindingError


class PromptKind(Enum):
    THREAT_MODEL = "threat_model"
    MITRE_SELECT = "mitre_select"
    DREAD = "dread"
    MITIGATIONS = "mitigations"
    TEST_CASES = "test_cases"
    ATTACK_TREE = "attack_tree"


_THREAT_MODEL_TEMPLATE = """Act as a cybersecurity expert in the {industry_sector} sector with more than 20 years of experience using the STRIDE threat modeling methodology to produce comprehensive threat models for a wide range of applications. Your task is to use the application description and additional provided data to produce a list of specific threats for the application.

1. On a scale of Low, Medium, or High, the user's technical ability is: {technical_ability}. Simplify explanations for lower abilities without omitting details. For higher abilities, include all technical aspects; for lower abilities, provide clear, more readable explanations despite their lack of technical experience.
2. For each of the STRIDE categories (Spoofing, Tampering, Repudiation, Information Disclosure, Denial of Service, and Elevation of Privilege), list a mandatory multiple (3) credible threats if applicable. Each threat scenario should provide a credible scenario in which the threat could occur in the context of the application. It is very important that your responses are tailored to reflect the details you are given.
3. For each threat scenario, assess the potential impact on data confidentiality, integrity, and availability. Describe how the threat could lead to unauthorized disclosure of sensitive information, corruption or tampering of data, and disruption to system or data access. Not every threat scenario will impact all three aspects, but you should consider each in your analysis.
4. Threat models always have assumptions. For each threat scenario, provide a list of assumptions that must be true for the threat to be realized. Each assumption should include a description of the assumption, the role of the actor making the assumption, and the condition under which the assumption is valid.
5. When providing the threat model, use a JSON-formatted response with the keys "threat_model" and "improvement_suggestions". Under "threat_model", include an array of objects with the keys "Threat Type", "Scenario", "Potential Impact", and "MITRE ATT&CK Keywords".
6. Under "MITRE ATT&CK Keywords", include an array of relevant keywords that accurately represent the threat scenario. These should be a mix of specific and broad terms that capture relevant MITRE ATT&CK techniques. Avoid overly narrow terms and consider including related actions (e.g., "injection," "spoofing") and targets (e.g., "network," "device"). Do NOT include STIX IDs, ATT&CK Reference IDs, or Technique IDs.
7. Ensure that the "Potential Impact" is a concise summary string, not a nested object.
8. Under "improvement_suggestions", include an array of strings with suggestions on how the threat modeler can improve their application description to allow the tool to produce a more comprehensive threat model.

APPLICATION TYPE: {app_type}
INDUSTRY SECTOR: {industry_sector}
AUTHENTICATION METHODS: {authentication}
INTERNET FACING: {internet_facing}
SENSITIVE DATA: {sensitive_data}
APPLICATION DESCRIPTION: {app_input}
HIGH RISK NVD CVE VULNERABILITIES BELOW BASED ON TECHNOLOGIES USED IN THE APPLICATION:
{nvd_vulnerabilities}
ALIENVAULT OTX PULSE DATA FOR THE INDUSTRY SECTOR:
{otx_data}

Example of expected JSON response format:

{
  "threat_model": [
    {
      "Threat Type": "Spoofing",
      "Scenario": "Example Scenario 1",
      "Assumptions": [
        {
          "Assumption": "Example Assumption 1",
          "Role": "Example Role 1",
          "Condition": "Example Condition 1"
        },
        {
          "Assumption": "Example Assumption 2",
          "Role": "Example Role 2",
          "Condition": "Example Condition 2"
        }
      ],
      "Potential Impact": "Example Potential Impact 1",
      "MITRE ATT&CK Keywords": [
        "Example Keyword 1",
        "Example Keyword 2",
        "Example Keyword 3"
      ]
    },
    {
      "Threat Type": "Spoofing",
      "Scenario": "Example Scenario 2",
      "Assumptions": [
        {
          "Assumption": "Example Assumption 3",
          "Role": "Example Role 3",
          "Condition": "Example Condition 3"
        },
        {
          "Assumption": "Example Assumption 4",
          "Role": "Example Role 4",
          "Condition": "Example Condition 4"
        }
      ],
      "Potential Impact": "Example Potential Impact 2",
      "MITRE ATT&CK Keywords": [
        "Example Keyword 1",
        "Example Keyword 2",
        "Example Keyword 3",
        "Example Keyword 4"
      ]
    }
    // ... more threats
  ],
  "improvement_suggestions": [
    "Example improvement suggestion 1.",
    "Example improvement suggestion 2."
    // ... more suggestions
  ]
}
"""

_MITRE_SELECT_TEMPLATE = """You are to respond in a very specific format. Do not include any additional text, explanations, or context. Only output the JSON array as specified below.
Act as a cybersecurity expert in the {app_details['industry_sector']} sector with more than 20 years of experience using the STRIDE threat modeling methodology.
Your task is to analyze the following threat scenario and select the single most relevant MITRE ATT&CK attack pattern from the provided list of 25.

APPLICATION TYPE: {app_details['app_type']}
INDUSTRY SECTOR: {app_details['industry_sector']}
AUTHENTICATION METHODS: {app_details['authentication']}
INTERNET FACING: {app_details['internet_facing']}
SENSITIVE DATA: {app_details['sensitive_data']}
APPLICATION DESCRIPTION: {app_details['app_input']}

Threat Scenario:

{Json. Dumps(threat, indent=2)}

MITRE ATT&CK Techniques:

{Json. Dumps(technique_descriptions, indent=2)}

Your response should ****ONLY**** include the single most relevant MITRE ATT&CK Attack Pattern ID from the above MITRE ATT&CK Techniques, in a JSON array format like this:

```
["attack-pattern--xxxxxxxx-xxxx-xxxx-xxxx-xxxxxxxxxxxxx"]
```

Select the closest one if none of the provided techniques are a perfect match. If there truly is no relevant match, respond with ["attack-pattern--00000000-0000-0000-0000-000000000000"].
"""

_DREAD_TEMPLATE = """Act as a cyber security expert with more than 20 years of experience in threat modeling using STRIDE and DREAD methodologies.

Your task is to produce a DREAD risk assessment for the threats identified in a threat model.

Below is the list of identified threats (This should be your primary focus):

{threats}

Below is how they map to the MITRE ATT&CK framework (This is supplemental information for context):

{mitre_mapping}

Below are potential vulnerabilities found in the National Vulnerability Database (NVD) that could be exploited by attackers (This is supplemental information for context):

{nvd_vulnerabilities}

When providing the risk assessment, use a JSON formatted response with a top-level key "Risk Assessment" and a list of threats, each with the following sub-keys:

- "Threat Type": A string representing the type of threat (e.g., "Spoofing").
- "Scenario": A string describing the threat scenario.
- "Damage Potential": An integer between 1 and 10.
- "Reproducibility": An integer between 1 and 10.
- "Exploitability": An integer between 1 and 10.
- "Affected Users": An integer between 1 and 10.
- "Discoverability": An integer between 1 and 10.

Assign a value between 1 and 10 for each sub-key based on the DREAD methodology.

Use the following scale:

- 1-3: Low
- 4-6: Medium
- 7-10: High

Ensure the JSON response is correctly formatted and does not contain any additional text. Here is an example of the expected JSON response format:

```
{ "Risk Assessment": [ { "Threat Type": "Spoofing", "Scenario": "An attacker could create a fake OAuth2 provider and trick users into logging in through it.", "Damage Potential": 8, "Reproducibility": 6, "Exploitability": 5, "Affected Users": 9, "Discoverability": 7 }, { "Threat Type": "Spoofing", "Scenario": "An attacker could intercept the OAuth2 token exchange process through a Man-in-the-Middle (MitM) attack.", "Damage Potential": 8, "Reproducibility": 7, "Exploitability": 6, "Affected Users": 8, "Discoverability": 6 } ] }
```
"""

_MITIGATIONS_TEMPLATE = """Act as a cybersecurity expert with more than 20 years of experience using the STRIDE threat modeling methodology. Your task is to provide potential mitigations for the threats identified in the threat model. It is crucial that your responses are tailored to reflect the details of the threats.

Please output the results in a markdown table format using the following columns:

- Column A: Threat Type
- Column B: Scenario
- Column C: Suggested Mitigation(s)

Do not use '<br>' or any other HTML tags in your response as a line break and do not use bullet points in a table cell.

Below is the list of identified threats:

{threats}

Below is how they map to the MITRE ATT&CK framework:

{mitre_mapping}

Below are potential vulnerabilities found in the National Vulnerability Database (NVD) that could be exploited by attackers:

{nvd_vulnerabilities}

YOUR RESPONSE (do not wrap in a code block):
"""

_TEST_CASES_TEMPLATE = """Act as a cyber security expert with more than 20 years experience of using the STRIDE threat modelling methodology.

Your task is to provide Gherkin test cases for the threats identified in a threat model. It is very important that your responses are tailored to reflect the details of the threats.

Below is the list of identified threats:

{threats}

Use the threat descriptions in the 'Given' steps so that the test cases are specific to the threats identified.

Put the Gherkin syntax inside triple backticks (```) to format the test cases in Markdown. Add a title for each test case.

For example:

```gherkin
Given a user with a valid account
When the user logs in
Then the user should be able to access the system
```

YOUR RESPONSE (do not add introductory text, just provide the Gherkin test cases):
"""

_ATTACK_TREE_TEMPLATE = """Act as a cyber security expert with more than 20 years of experience using the STRIDE threat modelling methodology to produce comprehensive threat models for a wide range of applications. Your task is to use the application description provided to you to produce an attack tree in Mermaid syntax.

The attack tree should reflect the potential threats for the application based on all the details given. You should create multiple levels in the tree to capture the hierarchy of threats and sub-threats, ensuring a very detailed and comprehensive representation of the attack scenarios. Use subgraphs to group related threats for better readability.

You MUST only respond with the Mermaid code block. See below for an example of the required format and syntax for your output.

Please utilize proper terminology and structure to ensure the attack tree is clear, organized, and informative. If a MITRE ATT&CK pattern is mentioned, include the relevant details in the attack tree.

```mermaid
graph LR
  A["Compromise of Application (CIA)"] --> B(Spoofing)
  A --> C(Tampering)
  A --> D(Repudiation)
  A --> E["Information Disclosure"]
  A --> F["Denial of Service (DoS)"]
  A --> G["Elevation of Privilege"]

  %% Subgraph for Spoofing Threats
  subgraph Spoofing Threats
    B[Sub-threat 1: Spoofing]
    B --> B1[Detailed Threat 1.1]
    B --> B2[Detailed Threat 1.2]
    B1 --> B1a[Specific Attack Vector 1.1]
    B2 --> B2a[Specific Attack Vector 1.2]
    ...
  end

  %% Subgraph for Tampering Threats
  subgraph Tampering Threats
    C[Sub-threat 2: Tampering]
    C --> C1[Detailed Threat 2.1]
    C --> C2[Detailed Threat 2.2]
    ...
    ...
    C1 --> C1a[Specific Attack Vector 2.1]
    C2 --> C2a[Specific Attack Vector 2.2]
    ...
    ...
  end

  %% Subgraph for Repudiation Threats
  subgraph Repudiation Threats
    D[Sub-threat 3: Repudiation]
    D --> D1[Detailed Threat 3.1]
    D --> D2[Detailed Threat 3.2]
    ...
    ...
    D1 --> D1a[Specific Attack Vector 3.1]
    D2 --> D2a[Specific Attack Vector 3.2]
    ...
    ...
  end

  %% Subgraph for Information Disclosure Threats
  subgraph Information Disclosure Threats
    E[Sub-threat 4: Information Disclosure]
    E --> E1[Detailed Threat 4.1]
    E --> E2[Detailed Threat 4.2]
    ...
    ...
    E1 --> E1a[Specific Attack Vector 4.1]
    E2 --> E2a[Specific Attack Vector 4.2]
    ...
    ...
  end
```

APPLICATION DESCRIPTION: {app_input}

Below is the list of identified threats:

{threats}

Below is how they map to the MITRE ATT&CK framework:

{mitre_mapping}
"""

# Placeholder tokens per template, exactly as they appear in the text.
_PLACEHOLDERS: dict[PromptKind, dict[str, str]] = {
    PromptKind.THREAT_MODEL: {
        "industry_sector": "{industry_sector}",
        "technical_ability": "{technical_ability}",
        "app_type": "{app_type}",
        "authentication": "{authentication}",
        "internet_facing": "{internet_facing}",
        "sensitive_data": "{sensitive_data}",
        "app_input": "{app_input}",
        "nvd_vulnerabilities": "{nvd_vulnerabilities}",
        "otx_data": "{otx_data}",
    },
    PromptKind.MITRE_SELECT: {
        "app_type": "{app_details['app_type']}",
        "industry_sector": "{app_details['industry_sector']}",
        "authentication": "{app_details['authentication']}",
        "internet_facing": "{app_details['internet_facing']}",
        "sensitive_data": "{app_details['sensitive_data']}",
        "app_input": "{app_details['app_input']}",
        "threat": "{Json. Dumps(threat, indent=2)}",
        "technique_descriptions": "{Json. Dumps(technique_descriptions, indent=2)}",
    },
    PromptKind.DREAD: {
        "threats": "{threats}",
        "mitre_mapping": "{mitre_mapping}",
        "nvd_vulnerabilities": "{nvd_vulnerabilities}",
    },
    PromptKind.MITIGATIONS: {
        "threats": "{threats}",
        "mitre_mapping": "{mitre_mapping}",
        "nvd_vulnerabilities": "{nvd_vulnerabilities}",
    },
    PromptKind.TEST_CASES: {
        "threats": "{threats}",
    },
    PromptKind.ATTACK_TREE: {
        "app_input": "{app_input}",
        "threats": "{threats}",
        "mitre_mapping": "{mitre_mapping}",
    },
}

_TEMPLATES: dict[PromptKind, str] = {
    PromptKind.THREAT_MODEL: _THREAT_MODEL_TEMPLATE,
    PromptKind.MITRE_SELECT: _MITRE_SELECT_TEMPLATE,
    PromptKind.DREAD: _DREAD_TEMPLATE,
    PromptKind.MITIGATIONS: _MITIGATIONS_TEMPLATE,
    PromptKind.TEST_CASES: _TEST_CASES_TEMPLATE,
    PromptKind.ATTACK_TREE: _ATTACK_TREE_TEMPLATE,
}


def template_text(kind: PromptKind) -> str:
    return _TEMPLATES[kind]


def placeholder_names(kind: PromptKind) -> tuple[str, ...]:
    return tuple(_PLACEHOLDERS[kind])


def render_prompt(kind: PromptKind, bindings: dict[str, str]) -> str:
    """Substitute every placeholder of ``kind``'s template.

    Raises MissingBindingError naming the first unbound placeholder. JSON
    braces in the template examples are left alone; only the declared
    tokens are replaced.
    """
    text = _TEMPLATES[kind]
    for name, token in _PLACEHOLDERS[kind].items():
        if name not in bindings:
            raise MissingBindingError(name)
        text = text.replace(token, str(bindings[name]))
    return text
