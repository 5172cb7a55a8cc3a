/** The seven-step wizard state machine.
 *
 * Steps: 1 Description, 2 Technology, 3 Threat Model, 4 Mitigations,
 * 5 DREAD Risk Assessment, 6 Test Cases, 7 Generate PDF Report.
 *
 * `advance` is a pure transition: navigation and edits never talk to the
 * network, and generation results enter the state only through
 * `applyStageResult` / `applyStageError`. Replaying recorded responses
 * therefore reproduces identical states (and views). Step k+1 is
 * reachable only once step k's required inputs or results exist;
 * back-navigation never discards anything.
 */

import type {
  DreadEntry,
  GherkinSuite,
  MitigationSetResponse,
  ProfileDraft,
  TechnologySelection,
  ThreatModelResponse,
} from './types.js';

export const STEP_TITLES = [
  'Step 1: Description',
  'Step 2: Technology',
  'Step 3: Threat Model',
  'Step 4: Mitigations',
  'Step 5: DREAD Risk Assessment',
  'Step 6: Test Cases',
  'Step 7: Generate PDF Report',
] as const;

export type Step = 1 | 2 | 3 | 4 | 5 | 6 | 7;

/** Artifact generated on entry to each step past the technology page. */
export type Stage = 'threats' | 'mitigations' | 'dread' | 'testCases' | 'attackTree';

export interface StageResults {
  threats: ThreatModelResponse | null;
  mitigations: MitigationSetResponse | null;
  dread: DreadEntry[] | null;
  testCases: GherkinSuite[] | null;
  attackTree: string | null;
}

export interface WizardState {
  currentStep: Step;
  profile: ProfileDraft;
  results: StageResults;
  sessionId: string | null;
  /** Stage currently being generated, if any. */
  pendingStage: Stage | null;
  /** Inline error for the current step; cleared on the next action. */
  error: string | null;
  fieldErrors: Record<string, string>;
}

export type WizardAction =
  | { type: 'set-session'; sessionId: string }
  | { type: 'edit-profile'; patch: Partial<ProfileDraft> }
  | { type: 'add-technology'; technology: TechnologySelection }
  | { type: 'remove-technology'; index: number }
  | { type: 'next' }
  | { type: 'back' }
  | { type: 'goto'; step: Step }
  | { type: 'stage-started'; stage: Stage }
  | { type: 'stage-failed'; stage: Stage; message: string };

export function emptyProfile(): ProfileDraft {
  return {
    description: '',
    app_type: '',
    industry_sector: '',
    data_sensitivity: '',
    internet_facing: null,
    employee_range: 'Unknown',
    compliance: [],
    auth_methods: [],
    technical_ability: 'Medium',
    technologies: [],
    diagram_filename: null,
  };
}

export function initialState(): WizardState {
  return {
    currentStep: 1,
    profile: emptyProfile(),
    results: {
      threats: null,
      mitigations: null,
      dread: null,
      testCases: null,
      attackTree: null,
    },
    sessionId: null,
    pendingStage: null,
    error: null,
    fieldErrors: {},
  };
}

/** Required-field validation for the data-entry steps. */
export function validateStep(state: WizardState, step: Step): Record<string, string> {
  const errors: Record<string, string> = {};
  const profile = state.profile;
  if (step === 1) {
    if (!profile.description.trim()) {
      errors.description = 'Describe the application before continuing.';
    }
  }
  if (step === 2) {
    if (!profile.app_type) errors.app_type = 'Application type is required.';
    if (!profile.industry_sector) errors.industry_sector = 'Industry sector is required.';
    if (!profile.data_sensitivity) errors.data_sensitivity = 'Data sensitivity is required.';
    if (profile.internet_facing === null) {
      errors.internet_facing = 'Choose whether the application is internet-facing.';
    }
  }
  return errors;
}

/** The artifact that must exist before `step` may be shown. */
function requiredResult(step: Step): keyof StageResults | null {
  switch (step) {
    case 3:
      return 'threats';
    case 4:
      return 'mitigations';
    case 5:
      return 'dread';
    case 6:
      return 'testCases';
    default:
      return null;
  }
}

export function stepReachable(state: WizardState, step: Step): boolean {
  for (let k = 1 as Step; k < step; k = (k + 1) as Step) {
    if (Object.keys(validateStep(state, k)).length > 0) return false;
    const needed = requiredResult((k + 1) as Step);
    if (needed && state.results[needed] === null) return false;
  }
  return true;
}

/** Stage that `next` from `step` must generate before the wizard moves on
 * (null means plain navigation). */
export function stageForNext(state: WizardState, step: Step): Stage | null {
  switch (step) {
    case 2:
      return state.results.threats ? null : 'threats';
    case 3:
      return state.results.mitigations ? null : 'mitigations';
    case 4:
      return state.results.dread ? null : 'dread';
    case 5:
      return state.results.testCases ? null : 'testCases';
    case 6:
      return state.results.attackTree ? null : 'attackTree';
    default:
      return null;
  }
}

export function advance(state: WizardState, action: WizardAction): WizardState {
  switch (action.type) {
    case 'set-session':
      return { ...state, sessionId: action.sessionId, error: null };

    case 'edit-profile':
      return {
        ...state,
        profile: { ...state.profile, ...action.patch },
        error: null,
        fieldErrors: {},
      };

    case 'add-technology':
      return {
        ...state,
        profile: {
          ...state.profile,
          technologies: [...state.profile.technologies, action.technology],
        },
        error: null,
      };

    case 'remove-technology':
      return {
        ...state,
        profile: {
          ...state.profile,
          technologies: state.profile.technologies.filter((_, i) => i !== action.index),
        },
        error: null,
      };

    case 'next': {
      const errors = validateStep(state, state.currentStep);
      if (Object.keys(errors).length > 0) {
        return { ...state, fieldErrors: errors };
      }
      if (stageForNext(state, state.currentStep)) {
        // caller must run the stage first (stage-started / applyStageResult)
        return state;
      }
      const step = Math.min(state.currentStep + 1, 7) as Step;
      return { ...state, currentStep: step, error: null, fieldErrors: {} };
    }

    case 'back': {
      const step = Math.max(state.currentStep - 1, 1) as Step;
      // all entered data and generated results are preserved
      return { ...state, currentStep: step, error: null, fieldErrors: {} };
    }

    case 'goto':
      if (!stepReachable(state, action.step)) return state;
      return { ...state, currentStep: action.step, error: null, fieldErrors: {} };

    case 'stage-started':
      return { ...state, pendingStage: action.stage, error: null };

    case 'stage-failed':
      // surfaced inline; nothing else is lost
      return { ...state, pendingStage: null, error: action.message };
  }
}

/** Fold a finished generation into the state; pure, so recorded responses
 * replay into identical states. Advances to the step that shows the new
 * artifact. */
export function applyStageResult(
  state: WizardState,
  stage: Stage,
  result: ThreatModelResponse | MitigationSetResponse | DreadEntry[] | GherkinSuite[] | string,
): WizardState {
  const results: StageResults = { ...state.results };
  let nextStep = state.currentStep;
  switch (stage) {
    case 'threats':
      results.threats = result as ThreatModelResponse;
      nextStep = 3;
      break;
    case 'mitigations':
      results.mitigations = result as MitigationSetResponse;
      nextStep = 4;
      break;
    case 'dread':
      results.dread = result as DreadEntry[];
      nextStep = 5;
      break;
    case 'testCases':
      results.testCases = result as GherkinSuite[];
      nextStep = 6;
      break;
    case 'attackTree':
      results.attackTree = result as string;
      nextStep = 7;
      break;
  }
  return {
    ...state,
    results,
    currentStep: nextStep as Step,
    pendingStage: null,
    error: null,
    fieldErrors: {},
  };
}

export function runId(state: WizardState): string | null {
  return state.results.threats?.run_id ?? null;
}
