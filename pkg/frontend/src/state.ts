import type { ApiClient } from "./api.js";
import type { CommunityDesign, Universe } from "./types.js";

export interface SelectedUtterance {
  threadId: string;
  utteranceIndex: number;
}

/** Client view state. The server is the source of truth: everything here
 * except the unsubmitted design draft can be rebuilt from API reads. */
export interface ViewState {
  designId: string | null;
  /** Editable copy of the design; diverges from the server until submit. */
  draft: CommunityDesign;
  activeUniverseId: string | null;
  /** Sibling universes under the same parent community (multiverse tabs),
   * oldest first. Includes the active universe. */
  siblingUniverseIds: string[];
  /** WhatIf anchor; must resolve into the active universe. */
  selected: SelectedUtterance | null;
  /** At most one generation job is tracked at a time. */
  pendingJobId: string | null;
  threadPage: number;
}

export function emptyDraft(): CommunityDesign {
  return { goal: "", rules: [], seed_personas: [] };
}

export function initialState(): ViewState {
  return {
    designId: null,
    draft: emptyDraft(),
    activeUniverseId: null,
    siblingUniverseIds: [],
    selected: null,
    pendingJobId: null,
    threadPage: 0,
  };
}

/** True when the anchor points at an utterance that exists in the universe. */
export function selectionResolves(
  selected: SelectedUtterance | null,
  universe: Universe | null,
): boolean {
  if (selected === null) return true;
  if (universe === null) return false;
  const thread = universe.threads.find((t) => t.id === selected.threadId);
  if (!thread) return false;
  return selected.utteranceIndex >= 0
    && selected.utteranceIndex < thread.utterances.length;
}

/** Switch tabs. The utterance selection cannot survive a universe change,
 * so it is always cleared. */
export function activateUniverse(state: ViewState, universeId: string): ViewState {
  if (!state.siblingUniverseIds.includes(universeId)) {
    throw new Error(`unknown universe tab: ${universeId}`);
  }
  if (universeId === state.activeUniverseId) return state;
  return { ...state, activeUniverseId: universeId, selected: null, threadPage: 0 };
}

/** Record a submitted job. Starting a second job while one is pending is a
 * UI bug; the invariant is at most one pending job displayed. */
export function trackJob(state: ViewState, jobId: string): ViewState {
  if (state.pendingJobId !== null) {
    throw new Error(`a job is already pending: ${state.pendingJobId}`);
  }
  return { ...state, pendingJobId: jobId };
}

/** Job finished: swap to its universe (if any) and append the tab while
 * keeping every earlier sibling so the designer can toggle back. */
export function completeJob(state: ViewState, universeId: string | null): ViewState {
  if (universeId === null) {
    return { ...state, pendingJobId: null };
  }
  const siblings = state.siblingUniverseIds.includes(universeId)
    ? state.siblingUniverseIds
    : [...state.siblingUniverseIds, universeId];
  return {
    ...state,
    pendingJobId: null,
    siblingUniverseIds: siblings,
    activeUniverseId: universeId,
    selected: null,
    threadPage: 0,
  };
}

export function selectUtterance(
  state: ViewState,
  universe: Universe,
  threadId: string,
  utteranceIndex: number,
): ViewState {
  if (universe.id !== state.activeUniverseId) {
    throw new Error("selection must target the active universe");
  }
  const selected = { threadId, utteranceIndex };
  if (!selectionResolves(selected, universe)) {
    throw new Error(`utterance ${utteranceIndex} of ${threadId} does not exist`);
  }
  return { ...state, selected };
}

export function clearSelection(state: ViewState): ViewState {
  return { ...state, selected: null };
}

/** Rebuild the view state from the server, as on a page refresh. Only the
 * unsubmitted draft is client-local; everything else comes from API reads. */
export async function restoreState(
  client: ApiClient,
  designId: string,
  activeUniverseId?: string,
): Promise<ViewState> {
  const draft = await client.getDesign(designId);
  const { universes } = await client.listUniverses(designId);
  const siblings = universes.map((u) => u.id);
  let active: string | null = null;
  if (activeUniverseId && siblings.includes(activeUniverseId)) {
    active = activeUniverseId;
  } else if (siblings.length > 0) {
    active = siblings[siblings.length - 1];
  }
  return {
    ...initialState(),
    designId,
    draft,
    siblingUniverseIds: siblings,
    activeUniverseId: active,
  };
}
