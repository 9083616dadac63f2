import type {
  Branch,
  CommunityDesign,
  Job,
  Thread,
  ThreadPage,
  Universe,
  Utterance,
} from "./types.js";

/** Callbacks the rendered community page can fire. */
export interface PageHandlers {
  onSelectUtterance?: (threadId: string, utteranceIndex: number) => void;
  onSwitchUniverse?: (universeId: string) => void;
  onRegenerate?: () => void;
  onPageChange?: (page: number) => void;
}

export interface EditorHandlers {
  onSubmit?: (design: CommunityDesign) => void;
}

function el(
  doc: Document,
  tag: string,
  className?: string,
  text?: string,
): HTMLElement {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** One-time banner: the tool deliberately surfaces anti-social content
 * (trolling, harassment) so designers can test their defenses against it. */
export function renderContentWarning(doc: Document): HTMLElement {
  const banner = el(doc, "div", "content-warning");
  banner.setAttribute("role", "alert");
  banner.setAttribute("data-testid", "content-warning");
  banner.append(
    el(doc, "strong", undefined, "Content warning: "),
    doc.createTextNode(
      "generated threads intentionally include anti-social behavior "
      + "(trolling, hostility) so you can prototype how your community "
      + "design holds up against it. All members and posts are synthetic."),
  );
  const dismiss = el(doc, "button", "dismiss", "Dismiss") as HTMLButtonElement;
  dismiss.addEventListener("click", () => banner.remove());
  banner.append(dismiss);
  return banner;
}

function renderUtterance(
  doc: Document,
  threadId: string,
  utterance: Utterance,
  handlers: PageHandlers,
): HTMLElement {
  const row = el(doc, "div", `utterance kind-${utterance.kind}`);
  row.setAttribute("data-testid", "utterance");
  row.setAttribute("data-thread-id", threadId);
  row.setAttribute("data-index", String(utterance.index));
  row.append(
    el(doc, "span", "author", utterance.author),
    el(doc, "span", "text", utterance.text),
  );
  const probe = el(doc, "button", "whatif-button", "What if…") as HTMLButtonElement;
  probe.addEventListener("click", () =>
    handlers.onSelectUtterance?.(threadId, utterance.index));
  row.append(probe);
  return row;
}

export function renderThread(
  doc: Document,
  thread: Thread,
  handlers: PageHandlers = {},
): HTMLElement {
  const card = el(doc, "article", "thread");
  card.setAttribute("data-testid", "thread");
  card.setAttribute("data-thread-id", thread.id);
  const [post, ...replies] = thread.utterances;
  if (post) {
    const headline = renderUtterance(doc, thread.id, post, handlers);
    headline.classList.add("headline");
    card.append(headline);
  }
  const repliesBox = el(doc, "div", "replies");
  for (const reply of replies) {
    repliesBox.append(renderUtterance(doc, thread.id, reply, handlers));
  }
  card.append(repliesBox);
  return card;
}

function renderAboutPanel(doc: Document, design: CommunityDesign): HTMLElement {
  const panel = el(doc, "aside", "panel about-community");
  panel.setAttribute("data-testid", "about-community");
  panel.append(
    el(doc, "h2", undefined, "About Community"),
    el(doc, "p", "goal", design.goal),
  );
  return panel;
}

function renderRulesPanel(doc: Document, design: CommunityDesign): HTMLElement {
  const panel = el(doc, "aside", "panel community-rules");
  panel.setAttribute("data-testid", "community-rules");
  panel.append(el(doc, "h2", undefined, "Community Rules"));
  const list = el(doc, "ol");
  for (const rule of design.rules) {
    const item = el(doc, "li", `rule ${rule.polarity}`, rule.text);
    item.setAttribute("data-polarity", rule.polarity);
    list.append(item);
  }
  panel.append(list);
  return panel;
}

export function renderUniverseTabs(
  doc: Document,
  siblingIds: string[],
  activeId: string | null,
  handlers: PageHandlers = {},
): HTMLElement {
  const tabs = el(doc, "nav", "universe-tabs");
  tabs.setAttribute("data-testid", "universe-tabs");
  siblingIds.forEach((id, i) => {
    const tab = el(doc, "button", "tab", `Universe ${i + 1}`) as HTMLButtonElement;
    tab.setAttribute("data-universe-id", id);
    if (id === activeId) tab.classList.add("active");
    tab.addEventListener("click", () => handlers.onSwitchUniverse?.(id));
    tabs.append(tab);
  });
  return tabs;
}

/** The subreddit-styled community page: tabs for sibling universes, the
 * thread list, and the goal/rules side panels with a re-generate button. */
export function renderCommunityPage(
  doc: Document,
  universe: Universe,
  page: ThreadPage,
  siblingIds: string[],
  handlers: PageHandlers = {},
): HTMLElement {
  const root = el(doc, "div", "community-page");
  root.setAttribute("data-testid", "community-page");
  root.setAttribute("data-universe-id", universe.id);

  root.append(renderUniverseTabs(doc, siblingIds, universe.id, handlers));

  const main = el(doc, "main", "threads");
  for (const thread of page.threads) {
    main.append(renderThread(doc, thread, handlers));
  }
  const pageCount = Math.max(1, Math.ceil(page.total / page.page_size));
  if (pageCount > 1) {
    const pager = el(doc, "div", "pager");
    pager.setAttribute("data-testid", "pager");
    for (let p = 0; p < pageCount; p += 1) {
      const link = el(doc, "button", "page", String(p + 1)) as HTMLButtonElement;
      if (p === page.page) link.classList.add("current");
      link.addEventListener("click", () => handlers.onPageChange?.(p));
      pager.append(link);
    }
    main.append(pager);
  }
  root.append(main);

  const sidebar = el(doc, "div", "sidebar");
  sidebar.append(
    renderAboutPanel(doc, universe.design),
    renderRulesPanel(doc, universe.design),
  );
  const regen = el(doc, "button", "re-generate", "re-generate") as HTMLButtonElement;
  regen.setAttribute("data-testid", "re-generate");
  regen.addEventListener("click", () => handlers.onRegenerate?.());
  sidebar.append(regen);
  root.append(sidebar);
  return root;
}

/** Goal/rules/personas editor. Violations returned by the service render
 * inline and highlight the matching field. */
export function renderDesignEditor(
  doc: Document,
  draft: CommunityDesign,
  violations: string[] = [],
  handlers: EditorHandlers = {},
): HTMLElement {
  const form = el(doc, "form", "design-editor") as HTMLFormElement;
  form.setAttribute("data-testid", "design-editor");

  const goalField = el(doc, "label", "field goal-field", "Community goal ");
  const goalInput = el(doc, "input") as HTMLInputElement;
  goalInput.name = "goal";
  goalInput.value = draft.goal;
  goalField.append(goalInput);
  form.append(goalField);

  const rulesBox = el(doc, "fieldset", "rules-field");
  rulesBox.append(el(doc, "legend", undefined, "Rules"));
  draft.rules.forEach((rule, i) => {
    const row = el(doc, "div", "rule-row");
    const textInput = el(doc, "input") as HTMLInputElement;
    textInput.name = `rule-${i}`;
    textInput.value = rule.text;
    const polarity = el(doc, "button", "polarity-toggle", rule.polarity) as HTMLButtonElement;
    polarity.type = "button";
    polarity.setAttribute("data-rule-index", String(i));
    polarity.addEventListener("click", () => {
      const next = polarity.textContent === "restrictive"
        ? "prescriptive" : "restrictive";
      polarity.textContent = next;
    });
    row.append(textInput, polarity);
    rulesBox.append(row);
  });
  form.append(rulesBox);

  const personasBox = el(doc, "fieldset", "personas-field");
  personasBox.append(el(doc, "legend", undefined, "Seed personas"));
  draft.seed_personas.forEach((persona, i) => {
    const row = el(doc, "div", "persona-row");
    const name = el(doc, "input") as HTMLInputElement;
    name.name = `persona-name-${i}`;
    name.value = persona.name;
    const description = el(doc, "input") as HTMLInputElement;
    description.name = `persona-description-${i}`;
    description.value = persona.description;
    row.append(name, description);
    personasBox.append(row);
  });
  form.append(personasBox);

  if (violations.length > 0) {
    const errors = el(doc, "ul", "violations");
    errors.setAttribute("data-testid", "violations");
    for (const violation of violations) {
      errors.append(el(doc, "li", "violation", violation));
      const field = violation.split(" ")[0];
      const target = form.querySelector(`.${field}-field`)
        ?? form.querySelector(`.${field.replace(/_/, "-")}s-field`);
      target?.classList.add("invalid");
    }
    form.append(errors);
  }

  const submit = el(doc, "button", "submit", "Generate") as HTMLButtonElement;
  submit.type = "submit";
  form.append(submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onSubmit?.(readDraft(form, draft));
  });
  return form;
}

/** Read the editor fields back into a design payload. */
export function readDraft(form: HTMLElement, shape: CommunityDesign): CommunityDesign {
  const value = (name: string): string =>
    (form.querySelector(`input[name="${name}"]`) as HTMLInputElement | null)?.value ?? "";
  return {
    goal: value("goal"),
    rules: shape.rules.map((_, i) => ({
      text: value(`rule-${i}`),
      polarity:
        (form.querySelector(`button[data-rule-index="${i}"]`)?.textContent
          ?? "restrictive") as "prescriptive" | "restrictive",
    })),
    seed_personas: shape.seed_personas.map((_, i) => ({
      name: value(`persona-name-${i}`),
      description: value(`persona-description-${i}`),
    })),
  };
}

export function renderJobProgress(doc: Document, job: Job): HTMLElement {
  const box = el(doc, "div", `job-progress state-${job.state}`);
  box.setAttribute("data-testid", "job-progress");
  box.setAttribute("data-job-id", job.id);
  const { threads_done: done, threads_total: total } = job.progress;
  const label = job.state === "failed"
    ? `Generation failed: ${job.error ?? "unknown error"}`
    : `Generating… ${done}/${total} threads (${job.state})`;
  box.append(el(doc, "span", "label", label));
  const bar = el(doc, "progress") as HTMLProgressElement;
  bar.max = Math.max(total, 1);
  bar.value = done;
  box.append(bar);
  return box;
}

/** Side-by-side alternative continuations from a WhatIf or Multiverse
 * probe, shown in a panel of their own. */
export function renderBranchPanel(
  doc: Document,
  branches: Branch[],
  handlers: PageHandlers = {},
): HTMLElement {
  const panel = el(doc, "section", "branch-panel");
  panel.setAttribute("data-testid", "branch-panel");
  panel.append(el(doc, "h2", undefined, "Alternative continuations"));
  const columns = el(doc, "div", "alternatives");
  for (const branch of branches) {
    const column = el(doc, "div", `alternative ${branch.branch_kind}`);
    column.setAttribute("data-testid", "alternative");
    column.setAttribute("data-branch-index", String(branch.branch_index));
    column.append(
      el(doc, "h3", undefined, `Alternative ${branch.branch_index + 1}`),
      renderThread(doc, branch.thread, handlers),
    );
    columns.append(column);
  }
  panel.append(columns);
  return panel;
}

/** Dialog anchored on a selected utterance: inject a persona or write a
 * moderator intervention. */
export function renderWhatIfDialog(
  doc: Document,
  anchor: { threadId: string; utteranceIndex: number },
  onSubmit: (choice: {
    injectedName?: string;
    injectedDescription?: string;
    interventionText?: string;
  }) => void,
): HTMLElement {
  const dialog = el(doc, "div", "whatif-dialog");
  dialog.setAttribute("data-testid", "whatif-dialog");
  dialog.setAttribute("data-thread-id", anchor.threadId);
  dialog.setAttribute("data-index", String(anchor.utteranceIndex));
  dialog.append(el(doc, "h2", undefined, "What if…"));

  const name = el(doc, "input", "injected-name") as HTMLInputElement;
  name.placeholder = "Injected persona name";
  const description = el(doc, "input", "injected-description") as HTMLInputElement;
  description.placeholder = "…who is";
  const inject = el(doc, "button", "inject", "Inject persona") as HTMLButtonElement;
  inject.addEventListener("click", () =>
    onSubmit({ injectedName: name.value, injectedDescription: description.value }));

  const intervention = el(doc, "textarea", "intervention-text") as HTMLTextAreaElement;
  intervention.placeholder = "Moderator intervention";
  const intervene = el(doc, "button", "intervene", "Intervene") as HTMLButtonElement;
  intervene.addEventListener("click", () =>
    onSubmit({ interventionText: intervention.value }));

  dialog.append(name, description, inject, intervention, intervene);
  return dialog;
}
