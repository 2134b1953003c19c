// In-memory application state. Deliberately no cookies, no localStorage, no
// persistence of any kind: the highlight set lives only until reload.

import type { Designation, Resolution } from './api.js';

export type DraftPhase = 'editing' | 'submitting' | 'pending' | 'released';

export interface DraftState {
  chosenSurveys: string[];
  selections: Map<string, Set<string>>; // question id -> tag ids
  resolution: Resolution;
  designation: Designation | null;
  phase: DraftPhase;
  error: string | null;
}

export interface AppState {
  draft: DraftState;
  lastSubmittedTags: Set<string>; // transient, cleared on reload by nature
}

export function freshDraft(): DraftState {
  return {
    chosenSurveys: [],
    selections: new Map(),
    resolution: 'city',
    designation: null,
    phase: 'editing',
    error: null,
  };
}

type Listener = () => void;

export class Store {
  state: AppState = { draft: freshDraft(), lastSubmittedTags: new Set() };
  private listeners: Listener[] = [];

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  update(mutate: (state: AppState) => void): void {
    mutate(this.state);
    for (const fn of this.listeners) fn();
  }

  selectedTags(): string[] {
    const out: string[] = [];
    for (const tags of this.state.draft.selections.values()) {
      out.push(...tags);
    }
    return out.sort();
  }

  toggleTag(questionId: string, tagId: string, multi: boolean): void {
    this.update((s) => {
      const current = s.draft.selections.get(questionId) ?? new Set<string>();
      if (current.has(tagId)) {
        current.delete(tagId);
      } else {
        if (!multi) current.clear();
        current.add(tagId);
      }
      if (current.size === 0) {
        s.draft.selections.delete(questionId);
      } else {
        s.draft.selections.set(questionId, current);
      }
    });
  }
}
