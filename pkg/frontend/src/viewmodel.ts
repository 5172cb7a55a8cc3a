/** Pure view models derived from wizard state. The DOM layer only formats
 * what these return, so identical states render identical views. */

import type { WizardState } from './wizard.js';
import {
  STRIDE_CATEGORIES,
  type DreadEntry,
  type StrideCategory,
  type ThreatEntry,
} from './types.js';

export interface ThreatRow {
  threatType: string;
  scenario: string;
  assumptions: string;
  potentialImpact: string;
}

export interface StrideGroup {
  category: StrideCategory;
  threats: ThreatRow[];
}

export interface MitreRow {
  threatType: string;
  scenario: string;
  name: string;
  techniqueId: string;
  patternId: string;
  /** null when unmapped: render plain text, no hyperlink */
  url: string | null;
}

export interface DreadRow {
  threatType: string;
  scenario: string;
  damage: number;
  reproducibility: number;
  exploitability: number;
  affectedUsers: number;
  discoverability: number;
  riskScore: string;
}

export interface GherkinView {
  title: string;
  source: string;
}

export interface AttackTreeView {
  source: string;
  /** true when the client should attempt a diagram preview; the raw source
   * is always shown as fallback */
  previewRequested: boolean;
}

/** Mean of the five dimensions, half-up to two decimals (e.g. 9,6,8,8,7
 * renders 7.60). */
export function riskScore(entry: DreadEntry): string {
  const sum =
    entry['Damage Potential'] +
    entry.Reproducibility +
    entry.Exploitability +
    entry['Affected Users'] +
    entry.Discoverability;
  const cents = Math.floor((sum * 100) / 5 + 0.5);
  return (cents / 100).toFixed(2);
}

function assumptionText(threat: ThreatEntry): string {
  return (threat.Assumptions ?? [])
    .map((a) => `${a.Assumption} (Role: ${a.Role}, Condition: ${a.Condition})`)
    .join(' ');
}

export function threatRows(state: WizardState): ThreatRow[] {
  const threats = state.results.threats?.threat_model ?? [];
  return threats.map((threat) => ({
    threatType: threat['Threat Type'],
    scenario: threat.Scenario,
    assumptions: assumptionText(threat),
    potentialImpact: threat['Potential Impact'],
  }));
}

export function strideGroups(state: WizardState): StrideGroup[] {
  const rows = threatRows(state);
  return STRIDE_CATEGORIES.map((category) => ({
    category,
    threats: rows.filter((row) => row.threatType === category),
  }));
}

export function mitreRows(state: WizardState): MitreRow[] {
  const response = state.results.threats;
  if (!response) return [];
  return response.threat_model.map((threat, index) => {
    const mapping = response.mappings[index];
    const mapped = mapping?.Mapped ?? false;
    return {
      threatType: threat['Threat Type'],
      scenario: threat.Scenario,
      name: mapped ? mapping.Name : 'Unknown',
      techniqueId: mapped ? mapping['Technique ID'] : 'N/A',
      patternId: mapping?.['Attack Pattern ID'] ?? '',
      url: mapped ? mapping.URL : null,
    };
  });
}

export function dreadRows(state: WizardState): DreadRow[] {
  const entries = state.results.dread ?? [];
  const threats = state.results.threats?.threat_model ?? [];
  return entries.map((entry, index) => ({
    threatType: threats[index]?.['Threat Type'] ?? '',
    scenario: threats[index]?.Scenario ?? '',
    damage: entry['Damage Potential'],
    reproducibility: entry.Reproducibility,
    exploitability: entry.Exploitability,
    affectedUsers: entry['Affected Users'],
    discoverability: entry.Discoverability,
    riskScore: riskScore(entry),
  }));
}

export function gherkinViews(state: WizardState): GherkinView[] {
  return (state.results.testCases ?? []).map((suite) => ({
    title: suite.title,
    source: suite.gherkin_source,
  }));
}

export function attackTreeView(state: WizardState): AttackTreeView | null {
  const source = state.results.attackTree;
  if (source === null) return null;
  return { source, previewRequested: source.trimStart().startsWith('graph') };
}

export interface ResultsView {
  strideGroups: StrideGroup[];
  mitre: MitreRow[];
  dread: DreadRow[];
  gherkin: GherkinView[];
  attackTree: AttackTreeView | null;
  improvementSuggestions: string[];
  mitigationsMarkdown: string | null;
}

export function renderResults(state: WizardState): ResultsView {
  return {
    strideGroups: strideGroups(state),
    mitre: mitreRows(state),
    dread: dreadRows(state),
    gherkin: gherkinViews(state),
    attackTree: attackTreeView(state),
    improvementSuggestions: state.results.threats?.improvement_suggestions ?? [],
    mitigationsMarkdown: state.results.mitigations?.raw_markdown ?? null,
  };
}
