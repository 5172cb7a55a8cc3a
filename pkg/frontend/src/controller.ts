/** Async driver: runs the generation stage demanded by a Next click and
 * feeds the response back through the pure state machine. API errors land
 * inline on the current step without losing any entered data. */

import { ApiClient, ApiError } from './api.js';
import {
  advance,
  applyStageResult,
  runId,
  stageForNext,
  validateStep,
  type Stage,
  type WizardState,
} from './wizard.js';

export async function submitNext(state: WizardState, api: ApiClient): Promise<WizardState> {
  const errors = validateStep(state, state.currentStep);
  if (Object.keys(errors).length > 0) {
    return advance(state, { type: 'next' }); // surfaces field errors
  }
  const stage = stageForNext(state, state.currentStep);
  if (!stage) {
    return advance(state, { type: 'next' });
  }
  return runStage(state, api, stage);
}

export async function runStage(
  state: WizardState,
  api: ApiClient,
  stage: Stage,
): Promise<WizardState> {
  state = advance(state, { type: 'stage-started', stage });
  try {
    switch (stage) {
      case 'threats': {
        const response = await api.generateThreatModel(state.profile);
        return applyStageResult(state, 'threats', response);
      }
      case 'mitigations': {
        const response = await api.generateMitigations(requireRun(state));
        return applyStageResult(state, 'mitigations', response.mitigations);
      }
      case 'dread': {
        const response = await api.generateDread(requireRun(state));
        return applyStageResult(state, 'dread', response.dread);
      }
      case 'testCases': {
        const response = await api.generateTestCases(requireRun(state));
        return applyStageResult(state, 'testCases', response.test_cases.suites);
      }
      case 'attackTree': {
        const response = await api.generateAttackTree(requireRun(state));
        return applyStageResult(state, 'attackTree', response.attack_tree.mermaid_source);
      }
    }
  } catch (error) {
    const message =
      error instanceof ApiError
        ? `Generation failed (${error.status}): ${error.message}`
        : `Generation failed: ${String(error)}`;
    return advance(state, { type: 'stage-failed', stage, message });
  }
}

/** Step 7's download: make sure the attack tree exists (the report needs
 * all eight sections), then hand back the PDF bytes. */
export async function downloadReport(
  state: WizardState,
  api: ApiClient,
): Promise<{ state: WizardState; pdf: Blob }> {
  if (state.results.attackTree === null) {
    state = await runStage(state, api, 'attackTree');
    if (state.results.attackTree === null) {
      throw new ApiError(502, state.error ?? 'attack tree generation failed');
    }
  }
  const pdf = await api.fetchReportPdf(requireRun(state));
  return { state, pdf };
}

function requireRun(state: WizardState): string {
  const id = runId(state);
  if (!id) throw new ApiError(409, 'no threat model generated yet');
  return id;
}
