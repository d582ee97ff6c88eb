/** Application wiring: upload -> poll -> visualize -> interactive recompute.
 *
 * Recompute requests are single-flight: while one is in the air, further
 * checkbox toggles only update the desired mask, and the newest mask is sent
 * once the current request settles.
 */

import { ApiClient, Breakdown, isReport, Report, SourceCategory } from "./api.js";
import {
  renderBanner,
  renderCredibilityPanel,
  renderEvidencePanel,
  renderProgress,
  renderReadme,
  renderUploadPanel,
  showUploadError,
  UploadSubmission,
} from "./render.js";
import { UiSelectionState } from "./state.js";

const POLL_INTERVAL_MS = 1000;

export interface AppElements {
  upload: HTMLElement;
  credibility: HTMLElement;
  evidence: HTMLElement;
  readme: HTMLElement;
  banner: HTMLElement;
  status: HTMLElement;
}

export class App {
  private report: Report | null = null;
  private breakdown: Breakdown | null = null;
  private readonly selection = new UiSelectionState();
  private recomputeInFlight = false;
  private recomputeQueued = false;
  private jobId = "";

  constructor(
    private readonly api: ApiClient,
    private readonly ui: AppElements,
    private readonly pollIntervalMs = POLL_INTERVAL_MS,
  ) {}

  async start(): Promise<void> {
    renderReadme(this.ui.readme);
    try {
      const health = await this.api.health();
      this.ui.status.textContent = `service ok (${health.mode} mode)`;
      const defaults = await this.api.defaults();
      renderUploadPanel(this.ui.upload, defaults, (submission) => {
        void this.submit(submission);
      });
    } catch (error) {
      this.ui.status.textContent = "service unreachable";
      renderBanner(this.ui.banner, `Cannot reach the verification service: ${String(error)}`);
    }
  }

  private async submit(submission: UploadSubmission): Promise<void> {
    renderBanner(this.ui.banner, null);
    try {
      this.jobId = await this.api.submit(submission.text, submission.config);
    } catch (error: unknown) {
      const message =
        (error as { status?: number }).status === 429
          ? "The verification queue is full right now; try again in a moment."
          : `Submission failed: ${String(error)}`;
      showUploadError(this.ui.upload, message);
      return;
    }
    await this.pollUntilDone();
  }

  private async pollUntilDone(): Promise<void> {
    for (;;) {
      let result;
      try {
        result = await this.api.poll(this.jobId);
      } catch (error) {
        renderBanner(this.ui.banner, `Polling failed: ${String(error)}`);
        return;
      }
      if (isReport(result)) {
        this.report = result;
        this.breakdown = null;
        this.selection.reset();
        this.renderAll();
        return;
      }
      if (result.state === "failed") {
        renderBanner(this.ui.banner, `Verification failed: ${result.error ?? "unknown error"}`);
        return;
      }
      renderProgress(
        this.ui.credibility,
        result.state,
        result.progress?.completed_units ?? 0,
        result.progress?.total_units ?? 0,
      );
      await new Promise((resolve) => setTimeout(resolve, this.pollIntervalMs));
    }
  }

  private renderAll(): void {
    if (!this.report) return;
    renderCredibilityPanel(this.ui.credibility, this.report, this.breakdown);
    renderEvidencePanel(this.ui.evidence, this.report, this.selection, {
      onToggleEvidence: (id, included) => {
        this.selection.setEvidenceIncluded(id, included);
        this.scheduleRecompute();
      },
      onToggleCategory: (category: SourceCategory, included) => {
        this.selection.setCategoryIncluded(category, included);
        this.scheduleRecompute();
      },
    });
  }

  private scheduleRecompute(): void {
    if (this.recomputeInFlight) {
      this.recomputeQueued = true;
      return;
    }
    void this.runRecompute();
  }

  private async runRecompute(): Promise<void> {
    if (!this.report) return;
    this.recomputeInFlight = true;
    const mask = this.selection.toMask();
    try {
      const breakdown = await this.api.recompute(this.report.job_id, mask);
      this.breakdown = breakdown;
      renderBanner(this.ui.banner, null);
      this.renderAll();
    } catch (error) {
      // Stale scores: surface it and revert the checkboxes to the last
      // breakdown the server actually confirmed.
      renderBanner(
        this.ui.banner,
        `Recompute failed, showing previous scores: ${String(error)}`,
      );
      this.renderAll();
    } finally {
      this.recomputeInFlight = false;
      if (this.recomputeQueued) {
        this.recomputeQueued = false;
        void this.runRecompute();
      }
    }
  }

  /** Test hook: wait until no recompute is pending. */
  async idle(): Promise<void> {
    while (this.recomputeInFlight || this.recomputeQueued) {
      await new Promise((resolve) => setTimeout(resolve, 10));
    }
  }
}

export function mount(root: HTMLElement, baseUrl: string, pollIntervalMs?: number): App {
  root.replaceChildren();
  const make = (id: string, heading?: string): HTMLElement => {
    const section = document.createElement("section");
    section.id = id;
    if (heading) {
      const h = document.createElement("h2");
      h.textContent = heading;
      section.append(h);
    }
    const body = document.createElement("div");
    body.className = "section-body";
    section.append(body);
    root.append(section);
    return body;
  };
  const banner = document.createElement("div");
  banner.id = "banner-area";
  const status = document.createElement("p");
  status.id = "service-status";
  root.append(status, banner);
  const ui: AppElements = {
    status,
    banner,
    upload: make("upload-panel-section", "Verify a text"),
    credibility: make("credibility-section", "Credibility"),
    evidence: make("evidence-section", "Evidence"),
    readme: make("readme-section", "About"),
  };
  const app = new App(new ApiClient(baseUrl), ui, pollIntervalMs);
  void app.start();
  return app;
}

declare global {
  interface Window {
    factlensMount?: typeof mount;
  }
}

if (typeof window !== "undefined") {
  window.factlensMount = mount;
  const auto = document.getElementById("app");
  if (auto && !auto.dataset.noAutomount) {
    mount(auto, auto.dataset.apiBase ?? "");
  }
}
