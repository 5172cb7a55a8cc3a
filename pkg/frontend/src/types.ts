/** Wire shapes shared with the HTTP API. Field names follow the service's
 * JSON contracts exactly. */

export interface TechnologySelection {
  category: 'Database' | 'OperatingSystem' | 'Language' | 'WebFramework';
  name: string;
  version_pattern: string;
}

export interface ProfileDraft {
  description: string;
  app_type: string;
  industry_sector: string;
  data_sensitivity: '' | 'None' | 'Low' | 'Medium' | 'High';
  internet_facing: boolean | null;
  employee_range: string;
  compliance: string[];
  auth_methods: string[];
  technical_ability: 'Low' | 'Medium' | 'High';
  technologies: TechnologySelection[];
  /** Optional data-flow-diagram attachment (name only; never parsed). */
  diagram_filename: string | null;
}

export interface AssumptionEntry {
  Assumption: string;
  Role: string;
  Condition: string;
}

export interface ThreatEntry {
  'Threat Type': string;
  Scenario: string;
  Assumptions?: AssumptionEntry[];
  'Potential Impact': string;
  'MITRE ATT&CK Keywords'?: string[];
}

export interface MappingEntry {
  'Attack Pattern ID': string;
  'Technique ID': string;
  Name: string;
  URL: string;
  Mapped: boolean;
  Hallucination?: boolean;
}

export interface ThreatModelResponse {
  run_id: string;
  threat_model: ThreatEntry[];
  improvement_suggestions: string[];
  mappings: MappingEntry[];
  warnings: string[];
}

export interface DreadEntry {
  'Damage Potential': number;
  Reproducibility: number;
  Exploitability: number;
  'Affected Users': number;
  Discoverability: number;
  'Risk Score': string;
}

export interface MitigationSetResponse {
  raw_markdown: string;
  entries: { threat_type: string; scenario: string; mitigation_text: string }[];
}

export interface GherkinSuite {
  title: string;
  gherkin_source: string;
}

export const STRIDE_CATEGORIES = [
  'Spoofing',
  'Tampering',
  'Repudiation',
  'Information Disclosure',
  'Denial of Service',
  'Elevation of Privilege',
] as const;

export type StrideCategory = (typeof STRIDE_CATEGORIES)[number];
