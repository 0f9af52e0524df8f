// Shapes exchanged with the study service. These mirror the published JSON
// Schemas; the contract tests validate everything the UI emits against the
// schema files themselves.

export type ResponseFormat = 'GraphicalSample' | 'TextSample' | 'ModeInterval' | 'Histogram';
export type StepName = 'prior' | 'stimulus' | 'posterior' | 'attention';
export type AttentionRange = 'R0_30' | 'R30_60' | 'R60_100';

export type Condition = {
  format: ResponseFormat;
  uncertainty: 'Uncertainty' | 'NoUncertainty';
  elicitation: 'Elicitation' | 'NoElicitation';
};

export type WidgetSpec = {
  kind: 'IconArraySample' | 'TextSample' | 'ModeInterval' | 'BallsAndBins';
  target: 'prior' | 'posterior';
  rounds?: number;
  grid_rows?: number;
  grid_cols?: number;
  bins?: number;
  balls?: number;
  copy?: string;
};

export type StimulusSpec = {
  kind: 'static' | 'hops';
  proportion?: number;
  icon_unit?: number;
  grid_rows?: number;
  grid_cols?: number;
  label?: string;
  frames?: number[];
  frame_duration_ms?: number;
};

export type AttentionSpec = {
  question: string;
  ranges: AttentionRange[];
};

export type StepSpec = {
  session_id: string;
  study_id: string;
  dataset: string;
  condition: Condition;
  step: StepName | null;
  step_index: number;
  step_count: number;
  completed: boolean;
  widget: WidgetSpec | null;
  stimulus: StimulusSpec | null;
  attention: AttentionSpec | null;
};

export type SamplesPayload = {
  kind: 'samples';
  samples: number[];
  confidences: number[];
};

export type ModeIntervalPayload = {
  kind: 'mode_interval';
  mode: number;
  subjective_probability: number;
};

export type HistogramPayload = {
  kind: 'histogram';
  bin_counts: number[];
};

export type BeliefPayload = SamplesPayload | ModeIntervalPayload | HistogramPayload;

export type StimulusAck = { dwell_ms: number };
export type AttentionAnswer = { answer: AttentionRange };

export type SubmissionPayload = BeliefPayload | StimulusAck | AttentionAnswer;

export type ResponseSubmission = {
  step: StepName;
  payload: SubmissionPayload;
};

export type SubmitResult = {
  next_step: StepName | null;
  completed: boolean;
  attention_pass?: boolean;
};
