/** Layer entry and editing. Adding is blocked (with an explanatory tooltip)
 * once a parent has as many child layers as the configured limit. Edits
 * always submit the last-known revision; a 409 keeps the draft and shows the
 * server's current text next to it for manual merging. */

import { ApiError, LayerDoc } from "../api.js";
import { el } from "../dom.js";
import { childLayers, findLayer, parsePath } from "../lookup.js";
import { AppContext } from "./app.js";

export function renderEditor(ctx: AppContext): HTMLElement {
  const { doc, store, data } = ctx;
  const container = el(doc, "div", { id: "layer-editor" },
    el(doc, "h2", {}, "layers"));
  const path = store.state.selectedPath;
  if (!path || !data.work) {
    container.append(el(doc, "p", { class: "hint" },
      "Select a unit or layer to add commentary."));
    return container;
  }
  const parsed = parsePath(path);
  if (!parsed.unitId) {
    container.append(el(doc, "p", { class: "hint" },
      "Select a unit to attach a commentary, or a layer for a sub-commentary."));
    return container;
  }

  container.append(renderAddForm(ctx, path));
  const layer = parsed.labels.length ? findLayer(data.work, path) : null;
  if (layer) {
    container.append(renderEditForm(ctx, path, layer));
  }
  return container;
}

function renderAddForm(ctx: AppContext, parentPath: string): HTMLElement {
  const { doc, data } = ctx;
  const siblings = childLayers(data.work!, parentPath);
  const atLimit = siblings.length >= data.siblingLimit;
  const label = el(doc, "input", {
    id: "add-label", placeholder: "label (e.g. Ny)",
  }) as HTMLInputElement;
  const text = el(doc, "textarea", {
    id: "add-text", rows: "3", placeholder: "commentary text",
  }) as HTMLTextAreaElement;
  const kind = parsePath(parentPath).labels.length ? "sub-commentary" : "commentary";
  const button = el(doc, "button", {
    id: "add-layer", type: "submit",
    ...(atLimit ? {
      disabled: "",
      title: `limit of ${data.siblingLimit} layers per parent reached`,
    } : {}),
  }, `add ${kind}`) as HTMLButtonElement;
  const form = el(doc, "form", {
    id: "add-layer-form",
    onsubmit: (event) => {
      event.preventDefault();
      if (atLimit) return;
      ctx.perform(() => ctx.api.addLayer(parentPath, label.value, text.value));
    },
  },
    el(doc, "h3", {}, `add ${kind} under ${parentPath}`),
    label, text, button,
    atLimit ? el(doc, "p", { class: "hint limit-hint" },
      `This node already carries ${siblings.length} layers ` +
      `(configured limit ${data.siblingLimit}).`) : null);
  return form;
}

function renderEditForm(ctx: AppContext, path: string, layer: LayerDoc): HTMLElement {
  const { doc, store } = ctx;
  store.noteRevision(path, layer.revision);
  const draft = el(doc, "textarea", {
    id: "edit-text", rows: "6",
    oninput: () => store.setDraft(path, draft.value),
  }) as HTMLTextAreaElement;
  draft.value = store.draftFor(path, layer.text);

  const conflictBox = el(doc, "div", { id: "conflict-box" });

  const save = async (): Promise<void> => {
    const expected = store.revisionFor(path) ?? layer.revision;
    try {
      await ctx.api.editLayer(path, draft.value, expected);
    } catch (error) {
      if (error instanceof ApiError && error.code === "RevisionConflict") {
        // Fetch the winner's text and show it beside the draft; adopt the
        // server revision so the next save applies on top of it.
        const server = await ctx.api.getNode(path) as unknown as LayerDoc;
        store.noteRevision(path, server.revision);
        conflictBox.replaceChildren(
          el(doc, "div", { class: "conflict" },
            el(doc, "h4", {}, `edit conflict: server is at revision ${server.revision}`),
            el(doc, "p", { class: "hint" },
              "Merge the server text into your draft, then save again."),
            el(doc, "pre", { id: "server-text" }, server.text)));
        return;
      }
      ctx.showError(error);
      return;
    }
    store.clearDraft(path);
    await ctx.refresh();
  };

  return el(doc, "form", {
    id: "edit-layer-form",
    onsubmit: (event) => {
      event.preventDefault();
      void save();
    },
  },
    el(doc, "h3", {}, `edit ${path} (revision ${layer.revision})`),
    draft,
    el(doc, "button", { id: "save-layer", type: "submit" }, "save"),
    conflictBox);
}
