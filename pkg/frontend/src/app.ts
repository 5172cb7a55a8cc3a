/** DOM wiring for the wizard. Renders entirely from (state, view models);
 * the API key and session id never leave page memory. */

import { ApiClient } from './api.js';
import { downloadReport, runStage, submitNext } from './controller.js';
import { renderPreview } from './mermaid-preview.js';
import { renderResults } from './viewmodel.js';
import {
  advance,
  initialState,
  stageForNext,
  STEP_TITLES,
  stepReachable,
  type Step,
  type WizardState,
} from './wizard.js';

const DATA_SENSITIVITY = ['None', 'Low', 'Medium', 'High'];
const EMPLOYEE_RANGES = ['Unknown', '0-10', '11-100', '101-1000', 'Over 1000'];
const APP_TYPES = [
  'Web application', 'Mobile application', 'Desktop application', 'Cloud service',
  'IoT Device/System', 'ICS/SCADA', '5G/Wireless System', 'Voice application',
];
const SECTORS = [
  'Aerospace', 'Agriculture', 'Automotive', 'Energy', 'Finance', 'Healthcare',
  'Manufacturing', 'Retail', 'Social Media', 'Telecommunications',
];

export class WizardApp {
  state: WizardState = initialState();
  private api: ApiClient;

  constructor(private root: HTMLElement, api?: ApiClient) {
    this.api = api ?? new ApiClient();
    this.render();
  }

  private set(state: WizardState): void {
    this.state = state;
    this.render();
  }

  async start(llmKey: string): Promise<void> {
    // the key goes straight into the request body and is discarded here
    const sessionId = await this.api.createSession(llmKey ? { llm_api_key: llmKey } : {});
    this.set(advance(this.state, { type: 'set-session', sessionId }));
  }

  async next(): Promise<void> {
    const busyStage = stageForNext(this.state, this.state.currentStep);
    if (busyStage) this.setBusy(true);
    try {
      this.set(await submitNext(this.state, this.api));
    } finally {
      this.setBusy(false);
    }
  }

  back(): void {
    this.set(advance(this.state, { type: 'back' }));
  }

  goto(step: Step): void {
    this.set(advance(this.state, { type: 'goto', step }));
  }

  async download(): Promise<void> {
    this.setBusy(true);
    try {
      const { state, pdf } = await downloadReport(this.state, this.api);
      this.set(state);
      const url = URL.createObjectURL(pdf);
      const anchor = document.createElement('a');
      anchor.href = url;
      anchor.download = 'security-report.pdf';
      anchor.click();
      URL.revokeObjectURL(url);
    } catch (error) {
      this.set(advance(this.state, {
        type: 'stage-failed', stage: 'attackTree', message: String(error),
      }));
    } finally {
      this.setBusy(false);
    }
  }

  async regenerateStage(): Promise<void> {
    const stage = stageForNext(this.state, this.state.currentStep);
    if (!stage) return;
    this.set(await runStage(this.state, this.api, stage));
  }

  private setBusy(busy: boolean): void {
    this.root.classList.toggle('busy', busy);
  }

  private render(): void {
    const view = renderResults(this.state);
    const step = this.state.currentStep;
    const nav = STEP_TITLES.map((title, index) => {
      const target = (index + 1) as Step;
      const reachable = stepReachable(this.state, target);
      const current = target === step ? ' aria-current="step"' : '';
      return `<li${current}><button data-goto="${target}" ${reachable ? '' : 'disabled'}>${title}</button></li>`;
    }).join('');

    this.root.innerHTML = `
      <ol class="wizard-nav">${nav}</ol>
      ${this.state.error ? `<p class="error" role="alert">${escapeHtml(this.state.error)}</p>` : ''}
      <section class="wizard-step" data-step="${step}">
        ${this.stepBody(step, view)}
      </section>
      <footer>
        ${step > 1 ? '<button data-action="back">Back</button>' : ''}
        ${step < 7 ? '<button data-action="next">Next</button>' : ''}
        ${step === 7 ? '<button data-action="download">Download PDF Report</button>' : ''}
      </footer>`;
    this.bind();
  }

  private stepBody(step: Step, view: ReturnType<typeof renderResults>): string {
    const errors = this.state.fieldErrors;
    const profile = this.state.profile;
    switch (step) {
      case 1:
        return `
          <label>Describe the application to be modeled (Required)
            <textarea name="description">${escapeHtml(profile.description)}</textarea>
          </label>
          ${fieldError(errors, 'description')}
          <label>Upload a dataflow diagram (optional)
            <input type="file" name="diagram" />
          </label>
          <label>Number of employees
            ${select('employee_range', EMPLOYEE_RANGES, profile.employee_range)}
          </label>
          <label>Compliance requirements (comma separated)
            <input name="compliance" value="${escapeHtml(profile.compliance.join(', '))}" />
          </label>
          <label>Authentication methods (comma separated)
            <input name="auth_methods" value="${escapeHtml(profile.auth_methods.join(', '))}" />
          </label>`;
      case 2:
        return `
          <label>Application type (Required)
            ${select('app_type', APP_TYPES, profile.app_type, true)}
          </label>
          ${fieldError(errors, 'app_type')}
          <label>Industry sector (Required)
            ${select('industry_sector', SECTORS, profile.industry_sector, true)}
          </label>
          ${fieldError(errors, 'industry_sector')}
          <label>Data sensitivity (Required)
            ${select('data_sensitivity', DATA_SENSITIVITY, profile.data_sensitivity, true)}
          </label>
          ${fieldError(errors, 'data_sensitivity')}
          <label>Internet-facing? (Required)
            ${select('internet_facing',
                     ['Yes', 'No'],
                     profile.internet_facing === null ? '' : profile.internet_facing ? 'Yes' : 'No',
                     true)}
          </label>
          ${fieldError(errors, 'internet_facing')}
          <div class="technologies">${this.technologiesBody()}</div>`;
      case 3: {
        const groups = view.strideGroups
          .map((group) => `
            <details open class="stride-group" data-category="${group.category}">
              <summary>${group.category} (${group.threats.length})</summary>
              <table><thead><tr><th>Scenario</th><th>Assumptions</th><th>Potential Impact</th></tr></thead>
              <tbody>${group.threats
                .map((t) => `<tr><td>${escapeHtml(t.scenario)}</td><td>${escapeHtml(t.assumptions)}</td><td>${escapeHtml(t.potentialImpact)}</td></tr>`)
                .join('')}</tbody></table>
            </details>`)
          .join('');
        const mitre = view.mitre
          .map((row) => `
            <li>${escapeHtml(row.scenario)} &mdash;
              ${row.url
                ? `<a href="${row.url}" target="_blank" rel="noreferrer">${escapeHtml(row.name)} (${row.techniqueId})</a>`
                : `${escapeHtml(row.name)} / ${row.techniqueId}`}
            </li>`)
          .join('');
        const suggestions = view.improvementSuggestions
          .map((s) => `<li>${escapeHtml(s)}</li>`)
          .join('');
        return `${groups}
          <h3>MITRE ATT&amp;CK</h3><ul class="mitre">${mitre}</ul>
          <h3>Improvement Suggestions</h3><ul class="suggestions">${suggestions}</ul>`;
      }
      case 4:
        return `<pre class="mitigations">${escapeHtml(view.mitigationsMarkdown ?? '')}</pre>`;
      case 5: {
        const rows = view.dread
          .map((row) => `<tr><td>${row.threatType}</td><td>${escapeHtml(row.scenario)}</td>
            <td>${row.damage}</td><td>${row.reproducibility}</td><td>${row.exploitability}</td>
            <td>${row.affectedUsers}</td><td>${row.discoverability}</td>
            <td class="risk">${row.riskScore}</td></tr>`)
          .join('');
        return `<table class="dread"><thead><tr>
          <th>Threat Type</th><th>Scenario</th><th>Damage Potential</th><th>Reproducibility</th>
          <th>Exploitability</th><th>Affected Users</th><th>Discoverability</th><th>Risk Score</th>
          </tr></thead><tbody>${rows}</tbody></table>`;
      }
      case 6:
        return view.gherkin
          .map((suite, index) => `
            <article class="gherkin">
              <h3>${escapeHtml(suite.title)}</h3>
              <button data-copy="${index}">Copy</button>
              <pre>${escapeHtml(suite.source)}</pre>
            </article>`)
          .join('');
      case 7: {
        const tree = view.attackTree;
        return `
          <p>The report bundles every section below into a single PDF.</p>
          ${tree
            ? `<div class="attack-tree"><div class="preview" data-preview></div><pre>${escapeHtml(tree.source)}</pre></div>`
            : '<p>The attack tree is generated when you download the report.</p>'}`;
      }
    }
  }

  private technologiesBody(): string {
    const rows = this.state.profile.technologies
      .map((tech, index) => `
        <li>${tech.category}: ${escapeHtml(tech.name)} ${escapeHtml(tech.version_pattern)}
          <button data-remove-tech="${index}">Remove</button></li>`)
      .join('');
    return `
      <h3>Technologies (optional, versions may end in .*)</h3>
      <ul>${rows}</ul>
      ${select('tech_category', ['Database', 'OperatingSystem', 'Language', 'WebFramework'], 'Database')}
      <input name="tech_name" placeholder="e.g. MySQL" />
      <input name="tech_version" placeholder="e.g. 5.8.*" />
      <button data-action="add-tech">Add technology</button>`;
  }

  private bind(): void {
    this.root.querySelectorAll<HTMLButtonElement>('[data-goto]').forEach((button) => {
      button.onclick = () => this.goto(Number(button.dataset.goto) as Step);
    });
    const next = this.root.querySelector<HTMLButtonElement>('[data-action="next"]');
    if (next) next.onclick = () => void this.next();
    const back = this.root.querySelector<HTMLButtonElement>('[data-action="back"]');
    if (back) back.onclick = () => this.back();
    const download = this.root.querySelector<HTMLButtonElement>('[data-action="download"]');
    if (download) download.onclick = () => void this.download();

    this.root.querySelectorAll<HTMLElement>('[name]').forEach((input) => {
      input.onchange = () => this.readField(input as HTMLInputElement);
    });
    const addTech = this.root.querySelector<HTMLButtonElement>('[data-action="add-tech"]');
    if (addTech) addTech.onclick = () => this.addTechnology();
    this.root.querySelectorAll<HTMLButtonElement>('[data-remove-tech]').forEach((button) => {
      button.onclick = () =>
        this.set(advance(this.state, {
          type: 'remove-technology', index: Number(button.dataset.removeTech),
        }));
    });
    this.root.querySelectorAll<HTMLButtonElement>('[data-copy]').forEach((button) => {
      button.onclick = () => {
        const source = this.state.results.testCases?.[Number(button.dataset.copy)];
        if (source) void navigator.clipboard?.writeText(source.gherkin_source);
      };
    });
    const preview = this.root.querySelector<HTMLElement>('[data-preview]');
    const tree = this.state.results.attackTree;
    if (preview && tree) {
      void renderPreview(tree).then((result) => {
        if (result.svg) preview.innerHTML = result.svg;
        // on fallback the raw <pre> below stays as the display
      });
    }
  }

  private readField(input: HTMLInputElement): void {
    const name = input.name;
    const value = input.value;
    switch (name) {
      case 'description':
        this.set(advance(this.state, { type: 'edit-profile', patch: { description: value } }));
        break;
      case 'employee_range':
        this.set(advance(this.state, { type: 'edit-profile', patch: { employee_range: value } }));
        break;
      case 'compliance': {
        const values = value.split(',').map((s) => s.trim()).filter(Boolean);
        this.set(advance(this.state, { type: 'edit-profile', patch: { compliance: values } }));
        break;
      }
      case 'auth_methods': {
        const values = value.split(',').map((s) => s.trim()).filter(Boolean);
        this.set(advance(this.state, { type: 'edit-profile', patch: { auth_methods: values } }));
        break;
      }
      case 'app_type':
        this.set(advance(this.state, { type: 'edit-profile', patch: { app_type: value } }));
        break;
      case 'industry_sector':
        this.set(advance(this.state, { type: 'edit-profile', patch: { industry_sector: value } }));
        break;
      case 'data_sensitivity':
        this.set(advance(this.state, {
          type: 'edit-profile',
          patch: { data_sensitivity: value as WizardState['profile']['data_sensitivity'] },
        }));
        break;
      case 'internet_facing':
        this.set(advance(this.state, {
          type: 'edit-profile', patch: { internet_facing: value === 'Yes' },
        }));
        break;
      case 'diagram':
        this.set(advance(this.state, {
          type: 'edit-profile',
          patch: { diagram_filename: (input.files?.[0]?.name ?? null) },
        }));
        break;
      default:
        break; // tech_* fields are read when Add is clicked
    }
  }

  private addTechnology(): void {
    const category = this.root.querySelector<HTMLSelectElement>('[name="tech_category"]')?.value;
    const name = this.root.querySelector<HTMLInputElement>('[name="tech_name"]')?.value ?? '';
    const version = this.root.querySelector<HTMLInputElement>('[name="tech_version"]')?.value ?? '';
    if (!name.trim()) return;
    const categories = ['Database', 'OperatingSystem', 'Language', 'WebFramework'] as const;
    const chosen = categories.find((c) => c === category) ?? 'Database';
    this.set(advance(this.state, {
      type: 'add-technology',
      technology: { category: chosen, name: name.trim(), version_pattern: version.trim() },
    }));
  }
}

function select(name: string, options: string[], current: string, required = false): string {
  const blank = required ? '<option value="">Choose an option</option>' : '';
  const body = options
    .map((opt) => `<option value="${opt}" ${opt === current ? 'selected' : ''}>${opt}</option>`)
    .join('');
  return `<select name="${name}">${blank}${body}</select>`;
}

function fieldError(errors: Record<string, string>, field: string): string {
  return errors[field]
    ? `<p class="field-error" data-field="${field}">${escapeHtml(errors[field])}</p>`
    : '';
}

function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

export function mount(root: HTMLElement, api?: ApiClient): WizardApp {
  return new WizardApp(root, api);
}
