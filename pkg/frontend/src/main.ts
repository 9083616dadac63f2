import { ApiClient, ApiError, pollJob } from "./api.js";
import {
  activateUniverse,
  completeJob,
  emptyDraft,
  initialState,
  restoreState,
  selectUtterance,
  trackJob,
  type ViewState,
} from "./state.js";
import {
  renderBranchPanel,
  renderCommunityPage,
  renderContentWarning,
  renderDesignEditor,
  renderJobProgress,
  renderWhatIfDialog,
} from "./render.js";
import type { CommunityDesign, Universe, WhatIfRequest } from "./types.js";

/** Single-page app glue: owns the view state, drives the API client, and
 * re-renders the whole page after every state change. The server is the
 * source of truth; a refresh rebuilds everything from API reads. */
export class App {
  readonly client: ApiClient;
  state: ViewState;
  private readonly root: HTMLElement;
  private readonly doc: Document;
  private universeCache = new Map<string, Universe>();
  private violations: string[] = [];
  private warningShown = false;

  constructor(root: HTMLElement, client: ApiClient) {
    this.root = root;
    this.doc = root.ownerDocument;
    this.client = client;
    this.state = initialState();
  }

  /** Entry point: restore from the URL hash (`#design/<id>[/<universe>]`)
   * or start with an empty editor. */
  async start(hash = ""): Promise<void> {
    const match = /^#?design\/([^/]+)(?:\/(.+))?$/.exec(hash);
    if (match) {
      this.state = await restoreState(this.client, match[1], match[2]);
    }
    await this.render();
  }

  async submitDesign(design: CommunityDesign): Promise<void> {
    this.violations = [];
    try {
      const { design_id } = await this.client.createDesign(design);
      this.state = { ...this.state, designId: design_id, draft: design };
      await this.generate();
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        this.violations = error.violations;
        await this.render();
        return;
      }
      throw error;
    }
  }

  async generate(): Promise<void> {
    if (!this.state.designId || this.state.pendingJobId) return;
    const { job_id } = await this.client.startGenerate(this.state.designId);
    await this.awaitJob(job_id);
  }

  /** The "re-generate" button: a community-wide multiverse sibling. */
  async regenerate(): Promise<void> {
    if (!this.state.designId || this.state.pendingJobId) return;
    const { job_id } = await this.client.startMultiverse(this.state.designId);
    await this.awaitJob(job_id);
  }

  private async awaitJob(jobId: string): Promise<void> {
    this.state = trackJob(this.state, jobId);
    await this.render();
    const job = await pollJob(this.client, jobId, {
      intervalMs: 200,
      onProgress: async (j) => {
        const slot = this.root.querySelector('[data-testid="job-progress"]');
        slot?.replaceWith(renderJobProgress(this.doc, j));
      },
    });
    if (job.state === "failed") {
      this.state = { ...this.state, pendingJobId: null };
      this.violations = [job.error ?? "generation failed"];
    } else {
      this.state = completeJob(this.state, job.universe_id);
    }
    await this.render();
  }

  async switchUniverse(universeId: string): Promise<void> {
    this.state = activateUniverse(this.state, universeId);
    await this.render();
  }

  async openWhatIf(threadId: string, utteranceIndex: number): Promise<void> {
    const universe = await this.activeUniverse();
    if (!universe) return;
    this.state = selectUtterance(this.state, universe, threadId, utteranceIndex);
    await this.render();
  }

  async runWhatIf(choice: {
    injectedName?: string;
    injectedDescription?: string;
    interventionText?: string;
  }, alternatives = 3): Promise<void> {
    const { selected, activeUniverseId } = this.state;
    if (!selected || !activeUniverseId) return;
    const spec: WhatIfRequest = {
      thread_id: selected.threadId,
      at_utterance_index: selected.utteranceIndex,
      alternatives,
    };
    if (choice.interventionText !== undefined) {
      spec.intervention_text = choice.interventionText;
    } else {
      spec.injected_name = choice.injectedName;
      spec.injected_description = choice.injectedDescription;
    }
    const { branches } = await this.client.whatIf(activeUniverseId, spec);
    await this.render();
    this.root.append(renderBranchPanel(this.doc, branches));
  }

  async setPage(page: number): Promise<void> {
    this.state = { ...this.state, threadPage: page };
    await this.render();
  }

  private async activeUniverse(): Promise<Universe | null> {
    const id = this.state.activeUniverseId;
    if (!id) return null;
    const cached = this.universeCache.get(id);
    if (cached) return cached;
    const universe = await this.client.getUniverse(id);
    this.universeCache.set(id, universe);
    return universe;
  }

  async render(): Promise<void> {
    this.root.replaceChildren();
    if (!this.warningShown) {
      this.root.append(renderContentWarning(this.doc));
      this.warningShown = true;
    }

    this.root.append(renderDesignEditor(
      this.doc,
      this.state.designId ? this.state.draft : emptyDraft(),
      this.violations,
      { onSubmit: (design) => void this.submitDesign(design) },
    ));

    if (this.state.pendingJobId) {
      const job = await this.client.getJob(this.state.pendingJobId);
      this.root.append(renderJobProgress(this.doc, job));
    }

    const universe = await this.activeUniverse();
    if (universe) {
      const page = await this.client.getThreads(universe.id, this.state.threadPage);
      this.root.append(renderCommunityPage(
        this.doc, universe, page, this.state.siblingUniverseIds, {
          onSelectUtterance: (t, i) => void this.openWhatIf(t, i),
          onSwitchUniverse: (id) => void this.switchUniverse(id),
          onRegenerate: () => void this.regenerate(),
          onPageChange: (p) => void this.setPage(p),
        },
      ));
      if (this.state.selected) {
        this.root.append(renderWhatIfDialog(
          this.doc, this.state.selected,
          (choice) => void this.runWhatIf(choice),
        ));
      }
    }
  }
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== "undefined" && window.document?.getElementById("app")) {
  const root = window.document.getElementById("app") as HTMLElement;
  const baseUrl = root.dataset.apiUrl ?? window.location.origin;
  const app = new App(root, new ApiClient({ baseUrl }));
  void app.start(window.location.hash);
}
