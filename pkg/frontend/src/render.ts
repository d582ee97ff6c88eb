/** DOM rendering for the upload, credibility, and evidence panels. */

import type {
  Breakdown,
  Evidence,
  Judgment,
  PipelineConfig,
  Report,
  ScoreEntry,
  SourceCategory,
} from "./api.js";
import { UiSelectionState } from "./state.js";

const CATEGORY_LABELS: Record<SourceCategory, string> = {
  news: "News",
  blog: "Blog",
  wiki: "Wiki",
  social_media: "Social media",
  scientific_medical_article: "Scientific/medical article",
  government_website: "Government website",
  other: "Other",
};

const VERDICT_LABELS = {
  supported: "supported",
  not_supported: "not supported",
  irrelevant: "irrelevant",
} as const;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// ---------------------------------------------------------------------------
// Upload panel
// ---------------------------------------------------------------------------

export interface UploadSubmission {
  text: string;
  config: Partial<PipelineConfig>;
}

export function renderUploadPanel(
  root: HTMLElement,
  defaults: PipelineConfig,
  onSubmit: (submission: UploadSubmission) => void,
): void {
  root.replaceChildren();
  const form = el("form", "upload-panel");
  form.noValidate = true;

  const textarea = el("textarea", "upload-text");
  textarea.id = "upload-text";
  textarea.rows = 8;
  textarea.placeholder = "Paste the text you want to verify…";
  form.append(labeled("Text to verify", textarea));

  const profile = select("llm-profile", ["primary", "secondary"], defaults.llm_profile);
  const mode = select("retrieval-mode", ["sparse", "dense"], defaults.retrieval_mode);
  const topN = numberInput("top-n", defaults.top_n_results, 1);
  const topK = numberInput("top-k", defaults.top_k_passages, 1);
  const context = numberInput("context-m", defaults.context_window_m, 0);
  const threshold = el("input") as HTMLInputElement;
  threshold.type = "text";
  threshold.id = "threshold-t";
  threshold.value = defaults.threshold_t;

  const grid = el("div", "config-grid");
  grid.append(
    labeled("Verifier model", profile),
    labeled("Retrieval mode", mode),
    labeled("Web results per claim", topN),
    labeled("Passages per result", topK),
    labeled("Context sentences per side", context),
    labeled("Not-factual threshold", threshold),
  );
  form.append(grid);

  const error = el("p", "form-error");
  error.id = "upload-error";
  error.hidden = true;
  form.append(error);

  const submit = el("button", "submit-button", "Verify");
  submit.type = "submit";
  submit.id = "upload-submit";
  form.append(submit);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!textarea.value.trim()) {
      error.textContent = "Please enter some text to verify.";
      error.hidden = false;
      return;
    }
    error.hidden = true;
    onSubmit({
      text: textarea.value,
      config: {
        llm_profile: profile.value,
        retrieval_mode: mode.value as PipelineConfig["retrieval_mode"],
        top_n_results: Number(topN.value),
        top_k_passages: Number(topK.value),
        context_window_m: Number(context.value),
        threshold_t: threshold.value,
      },
    });
  });
  root.append(form);
}

export function showUploadError(root: HTMLElement, message: string): void {
  const error = root.querySelector<HTMLElement>("#upload-error");
  if (error) {
    error.textContent = message;
    error.hidden = false;
  }
}

function labeled(text: string, control: HTMLElement): HTMLElement {
  const wrapper = el("label", "field");
  wrapper.append(el("span", "field-name", text), control);
  return wrapper;
}

function select(id: string, options: string[], value: string): HTMLSelectElement {
  const node = el("select") as HTMLSelectElement;
  node.id = id;
  for (const option of options) {
    const item = el("option", undefined, option) as HTMLOptionElement;
    item.value = option;
    node.append(item);
  }
  node.value = value;
  return node;
}

function numberInput(id: string, value: number, min: number): HTMLInputElement {
  const node = el("input") as HTMLInputElement;
  node.type = "number";
  node.id = id;
  node.min = String(min);
  node.value = String(value);
  return node;
}

// ---------------------------------------------------------------------------
// Progress + credibility panel
// ---------------------------------------------------------------------------

export function renderProgress(root: HTMLElement, state: string, completed: number, total: number): void {
  root.replaceChildren();
  const box = el("div", "progress-box");
  box.append(el("p", "progress-state", `Verifying… stage: ${state.replace(/_/g, " ")}`));
  box.append(el("p", "progress-units", total ? `${completed} of ${total} steps done` : "starting"));
  root.append(box);
}

function scoreFor(report: Report, breakdown: Breakdown | null, index: number): ScoreEntry | undefined {
  const scores = breakdown ? breakdown.sentence_scores : report.sentence_scores;
  return scores[String(index)];
}

export function renderCredibilityPanel(
  root: HTMLElement,
  report: Report,
  breakdown: Breakdown | null,
): void {
  root.replaceChildren();
  const overall = breakdown ? breakdown.overall_score : report.overall_score;
  const header = el("div", "doc-score");
  header.id = "document-score";
  if (overall) {
    header.dataset.value = overall.value;
    header.append(
      el("span", `score-chip bucket-${overall.bucket}`, overall.value),
      el("span", "score-caption", ` document credibility (${overall.bucket})`),
    );
  } else {
    header.dataset.value = "";
    header.append(el("span", "score-caption", "No scored sentences."));
  }
  root.append(header);

  const textView = el("p", "credibility-text");
  for (const sentence of [...report.sentences].sort((a, b) => a.index - b.index)) {
    const entry = scoreFor(report, breakdown, sentence.index);
    const span = el("span");
    span.dataset.sentence = String(sentence.index);
    if (entry) {
      span.className = `sentence bucket-${entry.bucket}`;
      span.title = `credibility ${entry.value} (${entry.bucket}), ${entry.support}/${entry.total} supported`;
      span.append(
        document.createTextNode(sentence.text + " "),
        el("sup", "sentence-tag", `${entry.value} ${entry.bucket}`),
      );
    } else {
      span.className = "sentence bucket-none";
      span.title =
        sentence.status === "no_claims"
          ? "No checkable claims in this sentence."
          : "Could not verify this sentence (no usable evidence).";
      span.append(
        document.createTextNode(sentence.text + " "),
        el("sup", "sentence-tag", "unverified"),
      );
    }
    textView.append(span, document.createTextNode(" "));
  }
  root.append(textView);
}

// ---------------------------------------------------------------------------
// Evidence panel
// ---------------------------------------------------------------------------

export interface EvidencePanelHooks {
  onToggleEvidence: (id: string, included: boolean) => void;
  onToggleCategory: (category: SourceCategory, included: boolean) => void;
}

export function renderEvidencePanel(
  root: HTMLElement,
  report: Report,
  state: UiSelectionState,
  hooks: EvidencePanelHooks,
): void {
  root.replaceChildren();
  const evidenceById = new Map(report.evidence.map((e) => [e.id, e]));
  const judgmentsByClaim = new Map<string, Judgment[]>();
  for (const judgment of report.judgments) {
    const list = judgmentsByClaim.get(judgment.claim_id) ?? [];
    list.push(judgment);
    judgmentsByClaim.set(judgment.claim_id, list);
  }

  const categories = [...new Set(report.evidence.map((e) => e.category))].sort();
  if (categories.length) {
    const bar = el("fieldset", "category-bar");
    bar.append(el("legend", undefined, "Source types"));
    for (const category of categories) {
      const label = el("label", "category-toggle");
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.checked = state.categoryChecked(category);
      box.dataset.category = category;
      box.addEventListener("change", () => hooks.onToggleCategory(category, box.checked));
      label.append(box, el("span", undefined, CATEGORY_LABELS[category]));
      bar.append(label);
    }
    root.append(bar);
  }

  for (const sentence of [...report.sentences].sort((a, b) => a.index - b.index)) {
    const section = el("details", "sentence-block");
    section.open = true;
    section.append(el("summary", "sentence-summary", `S${sentence.index + 1}: ${sentence.text}`));
    if (!sentence.claims.length) {
      section.append(el("p", "empty-note", "No checkable claims."));
    }
    for (const claim of sentence.claims) {
      const claimBox = el("div", "claim-block");
      claimBox.append(el("p", "claim-text", claim.text));
      const judgments = judgmentsByClaim.get(claim.id) ?? [];
      if (!judgments.length) {
        claimBox.append(el("p", "empty-note", "No evidence retrieved for this claim."));
      }
      for (const judgment of judgments) {
        const evidence = evidenceById.get(judgment.evidence_id);
        if (evidence) claimBox.append(evidenceRow(evidence, judgment, state, hooks));
      }
      section.append(claimBox);
    }
    root.append(section);
  }
}

function evidenceRow(
  evidence: Evidence,
  judgment: Judgment,
  state: UiSelectionState,
  hooks: EvidencePanelHooks,
): HTMLElement {
  const categoryExcluded = !state.categoryChecked(evidence.category);
  const row = el("div", "evidence-row");
  row.dataset.evidence = evidence.id;
  row.dataset.category = evidence.category;
  if (categoryExcluded) row.classList.add("row-disabled");

  const box = el("input") as HTMLInputElement;
  box.type = "checkbox";
  box.checked = state.evidenceChecked(evidence.id);
  box.disabled = categoryExcluded;
  box.dataset.evidenceCheckbox = evidence.id;
  box.addEventListener("change", () => hooks.onToggleEvidence(evidence.id, box.checked));
  row.append(box);

  const body = el("div", "evidence-body");
  const heading = el("p", "evidence-heading");
  const link = el("a", "evidence-link", evidence.hostname) as HTMLAnchorElement;
  link.href = evidence.url;
  link.target = "_blank";
  link.rel = "noreferrer noopener";
  heading.append(
    el("span", `verdict verdict-${judgment.verdict}`, VERDICT_LABELS[judgment.verdict]),
    document.createTextNode(" · "),
    link,
    document.createTextNode(" "),
    el("span", "source-tag", CATEGORY_LABELS[evidence.category]),
  );
  if (evidence.snippet_fallback) {
    heading.append(document.createTextNode(" "), el("span", "fallback-tag", "snippet only"));
  }
  body.append(heading);
  body.append(el("p", "rationale", judgment.rationale));
  row.append(body);
  return row;
}

// ---------------------------------------------------------------------------
// Readme / banner
// ---------------------------------------------------------------------------

export function renderReadme(root: HTMLElement): void {
  root.replaceChildren();
  const box = el("div", "readme");
  box.append(el("h2", undefined, "What this tool does"));
  for (const paragraph of [
    "factlens helps you judge how trustworthy a piece of machine-generated " +
      "text is. It splits the text into sentences, rewrites each sentence " +
      "into small standalone claims, searches the web for each claim, and " +
      "checks the claim against every source it finds.",
    "Each sentence gets a credibility score: the fraction of checks that " +
      "supported its claims. Scores are color-coded (red below 0.3, orange " +
      "below 0.6, green above) and every verdict comes with the model's " +
      "written rationale and a link to the source, so you can audit any step.",
    "You stay in control: untick any single piece of evidence, or whole " +
      "source types (blogs, social media, …), and the scores recompute " +
      "instantly from the remaining verdicts. Nothing is re-run and nothing " +
      "is hidden.",
    "Settings on the upload panel: which verifier model to use, keyword or " +
      "embedding retrieval, how many web results to read per claim, how many " +
      "passages to take per page, how much surrounding context each passage " +
      "keeps, and the score threshold below which a sentence is flagged as " +
      "not factual.",
  ]) {
    box.append(el("p", undefined, paragraph));
  }
  root.append(box);
}

export function renderBanner(root: HTMLElement, message: string | null): void {
  root.replaceChildren();
  if (message) {
    root.append(el("div", "banner", message));
  }
}
