/** JSON shapes exchanged with the simulacra HTTP service. */

export type RulePolarity = "prescriptive" | "restrictive";

export interface Rule {
  text: string;
  polarity: RulePolarity;
}

export interface Persona {
  name: string;
  description: string;
}

export interface CommunityDesign {
  goal: string;
  rules: Rule[];
  seed_personas: Persona[];
}

export type AblationMode = "full" | "no_description" | "no_personas";

/** Generation overrides accepted by the generate/multiverse endpoints. */
export interface GenerationOverrides {
  persona_pool_size?: number;
  thread_count?: number;
  ablation?: AblationMode;
  rng_seed?: number;
  multiverse_rng_seed?: number;
}

export type UtteranceKind = "post" | "reply" | "intervention";

export interface Utterance {
  id: string;
  author: string;
  text: string;
  kind: UtteranceKind;
  index: number;
}

export interface Thread {
  id: string;
  utterances: Utterance[];
}

export interface Universe {
  id: string;
  design: CommunityDesign;
  config: Record<string, unknown>;
  roster: Persona[];
  threads: Thread[];
  parent_community: string;
  created_at: string;
}

export interface UniverseSummary {
  id: string;
  parent_community: string;
  created_at: string;
  thread_count: number;
  roster_size: number;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface Job {
  id: string;
  kind: string;
  state: JobState;
  progress: { threads_done: number; threads_total: number };
  universe_id: string | null;
  error: string | null;
}

export interface ThreadPage {
  page: number;
  page_size: number;
  total: number;
  threads: Thread[];
}

export interface WhatIfRequest {
  thread_id: string;
  at_utterance_index: number;
  injected_name?: string;
  injected_description?: string;
  intervention_text?: string;
  alternatives?: number;
  title_override?: string;
}

export interface Branch {
  thread: Thread;
  source_thread_id: string;
  branch_kind: "whatif" | "intervention" | "multiverse";
  branch_index: number;
  spec: Record<string, unknown> | null;
}

export interface BranchSet {
  branches: Branch[];
}
