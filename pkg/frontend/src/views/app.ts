/** Root controller: owns the API client and view state, fetches fresh
 * documents from the service on every refresh (the UI keeps no corpus state
 * of its own), and delegates to the panel renderers. */

import {
  ApiError,
  TaxonomyDoc,
  ThtApi,
  TransmissionDoc,
  TreeDoc,
  WorkDoc,
  WorkSummary,
} from "../api.js";
import { clear, el } from "../dom.js";
import { findLayer, parsePath, workLabels } from "../lookup.js";
import { Store } from "../state.js";
import { renderBrowser } from "./browser.js";
import { renderEditor } from "./editor.js";
import { renderEvidence } from "./evidence.js";
import { renderLogin } from "./login.js";
import { renderReports } from "./reports.js";

export interface AppData {
  works: WorkSummary[];
  work: WorkDoc | null;
  taxonomy: TaxonomyDoc;
  siblingLimit: number;
}

export interface SupportRow {
  label: string;
  supported: number;
  total: number;
  percentage: number;
}

export interface PanelData {
  /** Token indices of the evidence target unit already supported by the
   * selected layer's label. */
  supported: Set<number>;
  supportRows: SupportRow[];
  transmission: TransmissionDoc | null;
}

export interface AppContext {
  doc: Document;
  api: ThtApi;
  store: Store;
  data: AppData;
  panel: PanelData;
  app: App;
  refresh: () => Promise<void>;
  /** Run a mutation; on success refresh everything, on failure surface the
   * error (falling back to login when the token is rejected). */
  perform: (action: () => Promise<unknown>) => Promise<boolean>;
  showError: (error: unknown) => void;
}

export class App {
  data: AppData = {
    works: [],
    work: null,
    taxonomy: { Direct: [], Indirect: [] },
    siblingLimit: 8,
  };
  panel: PanelData = { supported: new Set(), supportRows: [], transmission: null };
  lastError: string | null = null;
  banner: string | null = null;

  // Transient form choices (not corpus state; a reload recomputes the rest).
  evidenceUnit: string | null = null;
  evidenceKind: string | null = null;
  reportUnits: string | null = null;
  treeMethod = "upgma";
  treeSources = "manuscripts";
  treeUnits = "";
  lastTree: TreeDoc | null = null;

  constructor(
    private root: HTMLElement,
    public api: ThtApi,
    public store: Store,
  ) {}

  private get doc(): Document {
    return this.root.ownerDocument;
  }

  async login(username: string, password: string): Promise<void> {
    await this.api.login(username, password);
    this.store.setSession(this.api.token!, username);
    this.banner = null;
    await this.refresh();
  }

  logout(): void {
    this.api.token = null;
    this.store.expireSession();
    this.render();
  }

  private handleAuthFailure(error: ApiError): void {
    this.api.token = null;
    this.store.expireSession();
    this.banner = error.code === "AuthExpired"
      ? "Session expired. Log in again — unsent drafts were kept."
      : "Please log in.";
    this.render();
  }

  showError = (error: unknown): void => {
    if (error instanceof ApiError && error.status === 401) {
      this.handleAuthFailure(error);
      return;
    }
    if (error instanceof ApiError) {
      const detail = error.detail ? ` (${JSON.stringify(error.detail)})` : "";
      this.lastError = `${error.code}: ${error.message}${detail}`;
    } else {
      this.lastError = String(error);
    }
    this.render();
  };

  /** The evidence panel's target unit: the explicit choice, else the unit of
   * the selected layer path. */
  targetUnit(): string | null {
    if (this.evidenceUnit) return this.evidenceUnit;
    const path = this.store.state.selectedPath;
    return path ? parsePath(path).unitId : null;
  }

  reportUnitIds(): string[] {
    if (this.reportUnits !== null && this.reportUnits.trim() !== "") {
      return this.reportUnits.split(",").map((s) => s.trim()).filter(Boolean);
    }
    return this.data.work?.units.map((u) => u.id) ?? [];
  }

  private async loadPanel(): Promise<void> {
    const panel: PanelData = {
      supported: new Set(),
      supportRows: [],
      transmission: null,
    };
    const work = this.data.work;
    if (!work) {
      this.panel = panel;
      return;
    }
    const path = this.store.state.selectedPath;
    const parsed = path ? parsePath(path) : null;
    const layer = path && this.data.work ? findLayer(this.data.work, path) : null;

    if (layer && parsed) {
      const unitId = this.targetUnit();
      if (unitId) {
        try {
          const support = await this.api.supportReport(work.id, [unitId], layer.label);
          panel.supported = new Set(support.supported_token_indices[unitId] ?? []);
        } catch {
          // label out of scope for that unit: nothing marked as supported
        }
      }
    }

    const unitIds = this.reportUnitIds();
    if (unitIds.length > 0) {
      for (const label of workLabels(work)) {
        try {
          const support = await this.api.supportReport(work.id, unitIds, label);
          panel.supportRows.push({
            label,
            supported: support.supported_count,
            total: support.total_tokens,
            percentage: support.percentage,
          });
        } catch {
          // label exists nowhere under the chosen units; skip the row
        }
      }
    }

    const transmissionUnit = parsed?.unitId ?? null;
    if (transmissionUnit) {
      try {
        panel.transmission = await this.api.transmissionReport(work.id, transmissionUnit);
      } catch {
        panel.transmission = null;
      }
    }
    this.panel = panel;
  }

  refresh = async (): Promise<void> => {
    if (!this.store.canMutate) {
      this.render();
      return;
    }
    try {
      const [works, taxonomy, config] = await Promise.all([
        this.api.listWorks(),
        this.api.taxonomy(),
        this.api.config(),
      ]);
      this.data.works = works.works;
      this.data.taxonomy = taxonomy;
      this.data.siblingLimit = config.sibling_limit;
      const selected = this.store.state.selectedWork ?? this.data.works[0]?.id ?? null;
      this.data.work = selected ? await this.api.getWork(selected) : null;
      if (selected && !this.store.state.selectedWork) {
        this.store.state.selectedWork = selected;
      }
      await this.loadPanel();
      this.lastError = null;
    } catch (error) {
      this.showError(error);
      return;
    }
    this.render();
  };

  perform = async (action: () => Promise<unknown>): Promise<boolean> => {
    try {
      await action();
    } catch (error) {
      this.showError(error);
      return false;
    }
    await this.refresh();
    return true;
  };

  context(): AppContext {
    return {
      doc: this.doc,
      api: this.api,
      store: this.store,
      data: this.data,
      panel: this.panel,
      app: this,
      refresh: this.refresh,
      perform: this.perform,
      showError: this.showError,
    };
  }

  render(): void {
    const doc = this.doc;
    clear(this.root);
    if (!this.store.canMutate) {
      this.root.append(renderLogin(doc, this.banner, (u, p) =>
        this.login(u, p).catch(this.showError)));
      return;
    }
    const header = el(doc, "header", { class: "topbar" },
      el(doc, "strong", {}, "textual history tool"),
      el(doc, "span", { class: "who" }, ` ${this.store.state.username ?? ""} `),
      el(doc, "button", {
        id: "logout", onclick: () => this.logout(),
      }, "log out"));
    const errorBox = this.lastError
      ? el(doc, "div", { class: "error-banner", id: "error-banner" }, this.lastError)
      : null;
    const ctx = this.context();
    const main = el(doc, "main", { class: "columns" },
      el(doc, "section", { class: "col browser" }, renderBrowser(ctx)),
      el(doc, "section", { class: "col editor" },
        renderEditor(ctx), renderEvidence(ctx)),
      el(doc, "section", { class: "col reports" }, renderReports(ctx)));
    this.root.append(header);
    if (errorBox) this.root.append(errorBox);
    this.root.append(main);
  }
}
