/** Dashboards: per-layer support over a unit group, transmission uniformity
 * and archetype hints for the selected unit, and tree requests whose Newick
 * response is parsed and drawn as an SVG dendrogram client-side. */

import { el, svgEl } from "../dom.js";
import { layoutTree } from "../dendrogram.js";
import { parseNewick } from "../newick.js";
import { AppContext } from "./app.js";

export function renderReports(ctx: AppContext): HTMLElement {
  const { doc, data } = ctx;
  const container = el(doc, "div", { id: "reports" },
    el(doc, "h2", {}, "reports"));
  if (!data.work) {
    container.append(el(doc, "p", { class: "hint" }, "No work loaded."));
    return container;
  }
  container.append(renderSupportTable(ctx));
  container.append(renderTransmission(ctx));
  container.append(renderTreePanel(ctx));
  return container;
}

function renderSupportTable(ctx: AppContext): HTMLElement {
  const { doc, app, panel } = ctx;
  const unitsInput = el(doc, "input", {
    id: "report-units",
    placeholder: "unit ids, comma-separated (default: all)",
    onchange: () => {
      app.reportUnits = (unitsInput as HTMLInputElement).value;
      void ctx.refresh();
    },
  }) as HTMLInputElement;
  unitsInput.value = app.reportUnits ?? "";

  const table = el(doc, "table", { id: "support-table" },
    el(doc, "tr", {},
      el(doc, "th", {}, "layer"),
      el(doc, "th", {}, "supported"),
      el(doc, "th", {}, "%")));
  for (const row of panel.supportRows) {
    table.append(el(doc, "tr", { "data-layer": row.label },
      el(doc, "td", {}, row.label),
      el(doc, "td", { class: "support-count" },
        `${row.supported}/${row.total}`),
      el(doc, "td", {}, row.percentage.toFixed(1))));
  }
  return el(doc, "div", { class: "support-panel" },
    el(doc, "h3", {}, "word support"),
    el(doc, "p", {}, "units: ", unitsInput),
    table);
}

function renderTransmission(ctx: AppContext): HTMLElement {
  const { doc, panel } = ctx;
  const wrap = el(doc, "div", { id: "transmission-panel" },
    el(doc, "h3", {}, "transmission"));
  const report = panel.transmission;
  if (!report) {
    wrap.append(el(doc, "p", { class: "hint" },
      "Select a unit to inspect its transmission."));
    return wrap;
  }
  wrap.append(el(doc, "h4", {}, `unit ${report.unit_id}`));
  const list = el(doc, "ul", { class: "uniformity" });
  for (const [label, entry] of Object.entries(report.layers)) {
    const item = el(doc, "li", { "data-layer": label },
      `${label}: ${entry.uniform ? "uniform" : `${entry.variations.length} variation(s)`}`);
    if (!entry.uniform) {
      const sub = el(doc, "ul", {});
      for (const variation of entry.variations) {
        sub.append(el(doc, "li", {},
          `token ${variation.token_index}: ` +
          `base “${variation.base_form}” vs quoted “${variation.quoted_form}”`));
      }
      item.append(sub);
    }
    list.append(item);
  }
  wrap.append(list);
  wrap.append(el(doc, "p", { id: "archetype-hints" },
    report.archetype_hints.length
      ? `archetype hints: ${report.archetype_hints.join(", ")}`
      : "archetype hints: (none)"));
  return wrap;
}

function renderTreePanel(ctx: AppContext): HTMLElement {
  const { doc, app } = ctx;
  const method = el(doc, "select", { id: "tree-method" }) as HTMLSelectElement;
  for (const name of ["upgma", "nj"]) {
    const option = el(doc, "option", { value: name }, name) as HTMLOptionElement;
    if (name === app.treeMethod) option.setAttribute("selected", "");
    method.append(option);
  }
  const sources = el(doc, "select", { id: "tree-sources" }) as HTMLSelectElement;
  for (const name of ["manuscripts", "commentaries", "both"]) {
    const option = el(doc, "option", { value: name }, name) as HTMLOptionElement;
    if (name === app.treeSources) option.setAttribute("selected", "");
    sources.append(option);
  }
  const units = el(doc, "input", {
    id: "tree-units", placeholder: "unit scope (default: all)",
  }) as HTMLInputElement;
  units.value = app.treeUnits;

  const form = el(doc, "form", {
    id: "tree-form",
    onsubmit: (event) => {
      event.preventDefault();
      app.treeMethod = method.value;
      app.treeSources = sources.value;
      app.treeUnits = units.value;
      const scope = units.value.split(",").map((s) => s.trim()).filter(Boolean);
      void (async () => {
        try {
          app.lastTree = await ctx.api.requestTree(ctx.data.work!.id, {
            method: method.value,
            sources: sources.value,
            units: scope.length ? scope : null,
          });
          app.render();
        } catch (error) {
          ctx.showError(error);  // InsufficientOverlap carries the taxon pair
        }
      })();
    },
  },
    el(doc, "h3", {}, "tree"),
    method, sources, units,
    el(doc, "button", { id: "tree-submit", type: "submit" }, "build"));

  const wrap = el(doc, "div", { id: "tree-panel" }, form);
  if (app.lastTree) {
    wrap.append(el(doc, "p", { id: "tree-newick", class: "newick" },
      app.lastTree.newick));
    if (app.lastTree.clamped) {
      wrap.append(el(doc, "p", { class: "hint" },
        "negative branch lengths were clamped to 0"));
    }
    wrap.append(renderDendrogram(ctx, app.lastTree.newick));
  }
  return wrap;
}

function renderDendrogram(ctx: AppContext, newick: string): HTMLElement {
  const { doc } = ctx;
  const layout = layoutTree(parseNewick(newick));
  const labelSpace = 90;
  const svg = svgEl(doc, "svg", {
    id: "dendrogram",
    width: String(layout.width + labelSpace),
    height: String(layout.height),
    viewBox: `0 0 ${layout.width + labelSpace} ${layout.height}`,
  });
  for (const seg of layout.segments) {
    svg.append(svgEl(doc, "line", {
      x1: String(seg.x1), y1: String(seg.y1),
      x2: String(seg.x2), y2: String(seg.y2),
      stroke: "#345", "stroke-width": "1.5",
    }));
  }
  for (const leaf of layout.leaves) {
    const text = svgEl(doc, "text", {
      x: String(leaf.x + 4), y: String(leaf.y + 4),
      "font-size": "12", class: "leaf-label",
    });
    text.textContent = leaf.label;
    svg.append(text);
  }
  return el(doc, "div", { class: "dendrogram-wrap" }, svg as unknown as HTMLElement);
}
