import { describe, expect, it } from 'vitest';

import {
  advance,
  applyStageResult,
  initialState,
  stageForNext,
  stepReachable,
  validateStep,
  type Step,
  type WizardState,
} from '../src/wizard.js';
import recorded from './fixtures/recorded-responses.json';

const threatsResponse = recorded.threat_model;

function filledState(): WizardState {
  let state = initialState();
  state = advance(state, { type: 'set-session', sessionId: 's1' });
  state = advance(state, {
    type: 'edit-profile',
    patch: {
      description: 'A drone fleet platform.',
      app_type: 'IoT Device/System',
      industry_sector: 'Aerospace',
      data_sensitivity: 'High',
      internet_facing: true,
    },
  });
  return state;
}

describe('step gating', () => {
  it('blocks Next on step 1 with an empty description', () => {
    const state = advance(initialState(), { type: 'next' });
    expect(state.currentStep).toBe(1);
    expect(state.fieldErrors.description).toMatch(/describe/i);
  });

  it('step 2 requires the four profile selections', () => {
    let state = initialState();
    state = advance(state, {
      type: 'edit-profile',
      patch: { description: 'x' },
    });
    const errors = validateStep({ ...state, currentStep: 2 }, 2);
    expect(Object.keys(errors).sort()).toEqual([
      'app_type', 'data_sensitivity', 'industry_sector', 'internet_facing',
    ]);
  });

  it('step k+1 is unreachable until step k results exist', () => {
    const state = filledState();
    expect(stepReachable(state, 2)).toBe(true);
    expect(stepReachable(state, 3)).toBe(false); // no threats yet
    const withThreats = applyStageResult(state, 'threats', threatsResponse);
    expect(stepReachable(withThreats, 3)).toBe(true);
    expect(stepReachable(withThreats, 4)).toBe(false); // no mitigations yet
  });

  it('goto refuses unreachable steps', () => {
    const state = filledState();
    expect(advance(state, { type: 'goto', step: 5 }).currentStep).toBe(1);
  });
});

describe('generation triggers', () => {
  it('leaving step 2 demands the threat model', () => {
    const state = { ...filledState(), currentStep: 2 as Step };
    expect(stageForNext(state, 2)).toBe('threats');
    const withThreats = applyStageResult(state, 'threats', threatsResponse);
    expect(stageForNext(withThreats, 2)).toBeNull(); // already generated
  });

  it('applyStageResult lands on the step showing the artifact', () => {
    const state = { ...filledState(), currentStep: 2 as Step };
    const after = applyStageResult(state, 'threats', threatsResponse);
    expect(after.currentStep).toBe(3);
    expect(after.results.threats?.threat_model).toHaveLength(18);
    expect(after.pendingStage).toBeNull();
  });

  it('stage failure keeps the step and data, surfacing the error inline', () => {
    let state = { ...filledState(), currentStep: 2 as Step };
    state = advance(state, { type: 'stage-started', stage: 'threats' });
    state = advance(state, { type: 'stage-failed', stage: 'threats', message: 'HTTP 502' });
    expect(state.currentStep).toBe(2);
    expect(state.error).toBe('HTTP 502');
    expect(state.profile.description).toBe('A drone fleet platform.');
  });
});

describe('back navigation', () => {
  it('preserves entered data and generated results', () => {
    let state = applyStageResult(
      { ...filledState(), currentStep: 2 as Step },
      'threats',
      threatsResponse,
    );
    state = advance(state, { type: 'back' });
    expect(state.currentStep).toBe(2);
    expect(state.profile.app_type).toBe('IoT Device/System');
    expect(state.results.threats).not.toBeNull();
    // forward again without regenerating
    expect(stageForNext(state, 2)).toBeNull();
    expect(advance(state, { type: 'next' }).currentStep).toBe(3);
  });
});

describe('replay purity', () => {
  it('replaying the same recorded responses yields identical states', () => {
    const build = () => {
      let state = { ...filledState(), currentStep: 2 as Step };
      state = applyStageResult(state, 'threats', threatsResponse);
      state = applyStageResult(state, 'mitigations', recorded.mitigations.mitigations);
      state = applyStageResult(state, 'dread', recorded.dread.dread);
      state = applyStageResult(state, 'testCases', recorded.test_cases.test_cases.suites);
      state = applyStageResult(state, 'attackTree', recorded.attack_tree.attack_tree.mermaid_source);
      return state;
    };
    expect(build()).toEqual(build());
    expect(build().currentStep).toBe(7);
  });
});
