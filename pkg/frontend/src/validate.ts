// Client-side gate mirroring the server's belief constraints, so obviously
// bad payloads never leave the browser. The server remains the authority;
// anything it rejects is surfaced inline by the flow.

import type { BeliefPayload } from './types.js';

export function validateBelief(payload: BeliefPayload): string[] {
  const errors: string[] = [];
  switch (payload.kind) {
    case 'samples': {
      const { samples, confidences } = payload;
      if (samples.length < 1 || samples.length > 5) {
        errors.push('between 1 and 5 samples required');
      }
      if (confidences.length !== samples.length) {
        errors.push('one confidence per sample required');
      }
      for (const s of samples) {
        if (!Number.isFinite(s) || s < 0 || s > 1) errors.push(`sample ${s} outside [0, 1]`);
      }
      for (const c of confidences) {
        if (!Number.isInteger(c) || c < 0 || c > 100) errors.push(`confidence ${c} outside 0-100`);
      }
      break;
    }
    case 'mode_interval': {
      const { mode, subjective_probability } = payload;
      if (!Number.isFinite(mode) || mode <= 0 || mode >= 1) {
        errors.push('mode must lie strictly between 0% and 100%');
      }
      if (!Number.isFinite(subjective_probability) || subjective_probability < 0 || subjective_probability > 1) {
        errors.push('interval probability must lie in [0, 1]');
      }
      break;
    }
    case 'histogram': {
      const { bin_counts } = payload;
      if (bin_counts.length !== 20) errors.push('exactly 20 bins required');
      let total = 0;
      for (const n of bin_counts) {
        if (!Number.isInteger(n) || n < 0) errors.push(`bin count ${n} invalid`);
        total += n;
      }
      if (total !== 100) errors.push(`exactly 100 balls required, have ${total}`);
      break;
    }
  }
  return errors;
}
