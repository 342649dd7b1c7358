/** Collapsible hierarchy: work -> functional units -> layers, nested without
 * a depth limit. Clicking a node selects it for the editor panels. */

import { LayerDoc, UnitDoc } from "../api.js";
import { el } from "../dom.js";
import { AppContext } from "./app.js";

export function renderBrowser(ctx: AppContext): HTMLElement {
  const { doc, data, store } = ctx;
  const container = el(doc, "div", { id: "unit-browser" },
    el(doc, "h2", {}, "corpus"));
  if (data.works.length === 0) {
    container.append(el(doc, "p", { class: "empty-state" },
      "No works yet. Create one through the API or `tht import` a corpus."));
    return container;
  }
  for (const summary of data.works) {
    const isOpen = data.work?.id === summary.id;
    const details = el(doc, "details", isOpen ? { open: "" } : {});
    details.append(
      el(doc, "summary", {},
        nodeButton(ctx, summary.id, summary.id, "work")));
    if (isOpen && data.work) {
      for (const unit of data.work.units) {
        details.append(renderUnit(ctx, data.work.id, unit));
      }
    }
    container.append(details);
  }
  const path = store.state.selectedPath;
  container.append(el(doc, "p", { class: "selection", id: "selection-path" },
    path ? `selected: ${path}` : "nothing selected"));
  return container;
}

function renderUnit(ctx: AppContext, workId: string, unit: UnitDoc): HTMLElement {
  const { doc } = ctx;
  const unitPath = `${workId}/${unit.id}`;
  const node = el(doc, "div", { class: "unit-node" },
    nodeButton(ctx, unitPath, `${unit.id} · ${unit.kind}`, "unit"));
  for (const layer of unit.layers ?? []) {
    node.append(renderLayer(ctx, unitPath, layer));
  }
  return node;
}

function renderLayer(ctx: AppContext, parentPath: string, layer: LayerDoc): HTMLElement {
  const { doc } = ctx;
  const wrap = el(doc, "div", { class: "layer-node" },
    nodeButton(ctx, layer.path, `${layer.label} (rev ${layer.revision})`, "layer"));
  for (const child of layer.layers ?? []) {
    wrap.append(renderLayer(ctx, layer.path, child));
  }
  return wrap;
}

function nodeButton(
  ctx: AppContext, path: string, text: string, kind: string,
): HTMLElement {
  const selected = ctx.store.state.selectedPath === path;
  return el(ctx.doc, "button", {
    class: `node-btn ${kind}${selected ? " selected" : ""}`,
    "data-path": path,
    onclick: () => {
      ctx.store.select(path.split("/")[0], path);
      ctx.refresh();
    },
  }, text);
}
