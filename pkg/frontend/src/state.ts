// View state and its pure transitions. The UI never mutates circuits
// locally: every entry here is derived from a server response, so the
// timeline always mirrors the server-side history.

import type {
  MatchJson,
  RuleInfoJson,
  SessionSummary,
  VerifyResponse,
} from "./api.js";

export interface TimelineEntry {
  label: string;
  badge: string;
  hash: string;
}

export interface ViewState {
  sessionId: string | null;
  revision: number;
  policy: string;
  cqc: string;
  svg: string;
  badge: string;
  palette: RuleInfoJson[];
  selectedRule: string | null;
  matches: MatchJson[];
  highlighted: number[];
  timeline: TimelineEntry[];
  error: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    revision: -1,
    policy: "opaque",
    cqc: "",
    svg: "",
    badge: "",
    palette: [],
    selectedRule: null,
    matches: [],
    highlighted: [],
    timeline: [],
    error: null,
  };
}

function describeMatch(match: MatchJson): string {
  const direction = match.reverse ? " (reverse)" : "";
  return `${match.rule} at [${match.at.join(", ")}]${direction}`;
}

export function withPalette(
  state: ViewState,
  palette: RuleInfoJson[],
): ViewState {
  return { ...state, palette };
}

export function withSession(
  state: ViewState,
  summary: SessionSummary,
): ViewState {
  return {
    ...state,
    sessionId: summary.id,
    revision: summary.revision,
    policy: summary.policy,
    cqc: summary.circuit.cqc,
    badge: summary.badge,
    matches: [],
    highlighted: [],
    timeline: [
      {
        label: "loaded",
        badge: summary.badge,
        hash: summary.circuit.hash,
      },
    ],
    error: null,
  };
}

export function afterApply(
  state: ViewState,
  summary: SessionSummary,
  match: MatchJson,
): ViewState {
  return {
    ...state,
    revision: summary.revision,
    cqc: summary.circuit.cqc,
    badge: summary.badge,
    matches: [],
    highlighted: [],
    timeline: [
      ...state.timeline,
      {
        label: describeMatch(match),
        badge: summary.badge,
        hash: summary.circuit.hash,
      },
    ],
    error: null,
  };
}

export function afterUndo(
  state: ViewState,
  summary: SessionSummary,
): ViewState {
  return {
    ...state,
    revision: summary.revision,
    cqc: summary.circuit.cqc,
    badge: summary.badge,
    matches: [],
    highlighted: [],
    timeline: state.timeline.slice(0, Math.max(1, state.timeline.length - 1)),
    error: null,
  };
}

export function selectRule(state: ViewState, rule: string | null): ViewState {
  return { ...state, selectedRule: rule, matches: [], highlighted: [] };
}

export function withMatches(
  state: ViewState,
  matches: MatchJson[],
): ViewState {
  return { ...state, matches, highlighted: [] };
}

export function highlightMatch(
  state: ViewState,
  match: MatchJson | null,
): ViewState {
  return { ...state, highlighted: match ? [...match.at] : [] };
}

export function withDiagram(state: ViewState, svg: string): ViewState {
  return { ...state, svg };
}

export function withBadge(
  state: ViewState,
  verify: VerifyResponse,
): ViewState {
  return { ...state, badge: verify.badge };
}

export function withError(state: ViewState, message: string): ViewState {
  return { ...state, error: message };
}

/** Timeline length must equal server-side history length. */
export function timelineConsistent(
  state: ViewState,
  summary: SessionSummary,
): boolean {
  return state.timeline.length === summary.history_length;
}
