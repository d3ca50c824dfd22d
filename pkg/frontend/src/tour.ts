// Guided tours are declarative step lists shipped as data (JSON emitted by
// `qrewrite derive ... --json`), replayed through the HTTP protocol.

import type { ExplorerApi, SessionSummary } from "./api.js";
import type { MatchJson } from "./api.js";

export interface TourSnapshot {
  label: string;
  cqc: string;
  hash: string;
}

export interface TourStep extends MatchJson {
  verified?: string;
}

export interface TourData {
  secret?: string;
  policy: string;
  snapshots: TourSnapshot[];
  steps: TourStep[];
  final_cqc: string;
  all_verified: boolean;
}

export interface TourProgress {
  index: number;
  total: number;
  step: TourStep;
  summary: SessionSummary;
}

export interface TourResult {
  sessionId: string;
  finalCqc: string;
  badges: string[];
}

export class TourBadgeError extends Error {
  constructor(readonly step: TourStep, readonly badge: string) {
    super(`step ${step.rule} returned badge ${badge}`);
  }
}

/** Replay every tour step through the service, insisting on a verified
 * badge at each one. Returns the final server-side CQC text. */
export async function runTour(
  api: ExplorerApi,
  tour: TourData,
  onProgress?: (progress: TourProgress) => void,
): Promise<TourResult> {
  const session = await api.createSession(tour.snapshots[0].cqc, tour.policy);
  let revision = session.revision;
  const badges: string[] = [];
  let summary = session;
  for (const [index, step] of tour.steps.entries()) {
    summary = await api.apply(session.id, {
      rule: step.rule,
      at: step.at,
      wires: step.wires ?? [],
      reverse: step.reverse ?? false,
      variant: step.variant ?? "",
      revision,
    });
    revision = summary.revision;
    badges.push(summary.badge);
    if (!summary.badge.startsWith("verified")) {
      throw new TourBadgeError(step, summary.badge);
    }
    onProgress?.({ index, total: tour.steps.length, step, summary });
  }
  return {
    sessionId: session.id,
    finalCqc: summary.circuit.cqc,
    badges,
  };
}
