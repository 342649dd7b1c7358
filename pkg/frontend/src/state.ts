/** Client view state. The server is the only corpus authority: this holds
 * nothing but the session, the current selection, unsent drafts, and the
 * last revision seen per open layer (every edit submits with it). Drafts
 * survive a token expiry via the provided storage. */

export interface PendingSpan {
  unitId: string;
  indices: number[];
}

export interface ViewState {
  token: string | null;
  username: string | null;
  selectedWork: string | null;
  selectedPath: string | null;
  drafts: Record<string, string>;
  revisions: Record<string, number>;
  pendingSpan: PendingSpan | null;
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const DRAFT_KEY = "tht-drafts";

export class Store {
  state: ViewState;
  private listeners: Array<() => void> = [];

  constructor(private storage: StorageLike | null = null) {
    this.state = {
      token: null,
      username: null,
      selectedWork: null,
      selectedPath: null,
      drafts: this.loadDrafts(),
      revisions: {},
      pendingSpan: null,
    };
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  private loadDrafts(): Record<string, string> {
    try {
      const raw = this.storage?.getItem(DRAFT_KEY);
      return raw ? JSON.parse(raw) : {};
    } catch {
      return {};
    }
  }

  private persistDrafts(): void {
    this.storage?.setItem(DRAFT_KEY, JSON.stringify(this.state.drafts));
  }

  setSession(token: string, username: string): void {
    this.state.token = token;
    this.state.username = username;
    this.emit();
  }

  /** Token rejected or expired: drop the session, keep drafts. */
  expireSession(): void {
    this.state.token = null;
    this.state.username = null;
    this.emit();
  }

  get canMutate(): boolean {
    return this.state.token !== null;
  }

  select(workId: string | null, path: string | null): void {
    this.state.selectedWork = workId;
    this.state.selectedPath = path;
    this.state.pendingSpan = null;
    this.emit();
  }

  setDraft(path: string, text: string): void {
    this.state.drafts[path] = text;
    this.persistDrafts();
  }

  draftFor(path: string, fallback: string): string {
    return this.state.drafts[path] ?? fallback;
  }

  clearDraft(path: string): void {
    delete this.state.drafts[path];
    this.persistDrafts();
  }

  noteRevision(path: string, revision: number): void {
    this.state.revisions[path] = revision;
  }

  revisionFor(path: string): number | undefined {
    return this.state.revisions[path];
  }

  setPendingSpan(span: PendingSpan | null): void {
    this.state.pendingSpan = span;
    this.emit();
  }
}
