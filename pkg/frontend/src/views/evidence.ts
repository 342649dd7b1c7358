/** Evidence marking: the target unit's base-text tokens render as chips;
 * a contiguous chip range plus a kind (and a subtype from the served
 * taxonomy for Direct/Indirect) posts one annotation. Tokens the selected
 * layer already supports are highlighted. */

import { el } from "../dom.js";
import { findLayer, findUnit, parsePath } from "../lookup.js";
import { isContiguous, spanFromSelection, toggleIndex } from "../spans.js";
import { AppContext } from "./app.js";

const KINDS = ["Direct", "Indirect", "Both", "Default"];

export function renderEvidence(ctx: AppContext): HTMLElement {
  const { doc, store, data, app } = ctx;
  const container = el(doc, "div", { id: "evidence-marker" },
    el(doc, "h2", {}, "evidence"));
  const path = store.state.selectedPath;
  const work = data.work;
  const layer = path && work ? findLayer(work, path) : null;
  if (!layer || !work || !path) {
    container.append(el(doc, "p", { class: "hint" },
      "Select a layer to mark the evidence it provides."));
    return container;
  }

  const unitId = app.targetUnit();
  const unit = unitId ? findUnit(work, unitId) : null;

  const unitSelect = el(doc, "select", {
    id: "evidence-unit",
    onchange: () => {
      app.evidenceUnit = (unitSelect as HTMLSelectElement).value;
      store.setPendingSpan(null);
      void ctx.refresh();
    },
  }) as HTMLSelectElement;
  for (const u of work.units) {
    const option = el(doc, "option", { value: u.id }, u.id) as HTMLOptionElement;
    if (u.id === unitId) option.setAttribute("selected", "");
    unitSelect.append(option);
  }
  container.append(el(doc, "p", {},
    `from ${layer.label} onto unit `, unitSelect));
  if (!unit) return container;

  const selection = store.state.pendingSpan?.unitId === unit.id
    ? store.state.pendingSpan.indices
    : [];

  const chipRow = el(doc, "div", { id: "token-chips", class: "chips" });
  (unit.tokens ?? []).forEach((token, index) => {
    const classes = ["chip"];
    if (ctx.panel.supported.has(index)) classes.push("supported");
    if (selection.includes(index)) classes.push("picked");
    chipRow.append(el(doc, "button", {
      class: classes.join(" "),
      "data-index": String(index),
      onclick: () => {
        const next = toggleIndex(selection, index);
        store.setPendingSpan({ unitId: unit.id, indices: next });
        app.render();
      },
    }, token));
  });
  container.append(chipRow);

  const kind = app.evidenceKind ?? "Direct";
  const kindSelect = el(doc, "select", {
    id: "evidence-kind",
    onchange: () => {
      app.evidenceKind = kindSelect.value;
      app.render();  // re-filter the subtype dropdown
    },
  }) as HTMLSelectElement;
  for (const name of KINDS) {
    const option = el(doc, "option", { value: name }, name) as HTMLOptionElement;
    if (name === kind) option.setAttribute("selected", "");
    kindSelect.append(option);
  }
  const subtypes = kind === "Direct" ? data.taxonomy.Direct
    : kind === "Indirect" ? data.taxonomy.Indirect : [];
  const subtypeSelect = el(doc, "select", { id: "evidence-subtype" }) as HTMLSelectElement;
  subtypeSelect.append(el(doc, "option", { value: "" }, "(no subtype)"));
  for (const name of subtypes) {
    subtypeSelect.append(el(doc, "option", { value: name }, name));
  }

  const contiguous = isContiguous(selection);
  const submit = el(doc, "button", {
    id: "evidence-submit",
    ...(contiguous ? {} : { disabled: "" }),
    onclick: () => {
      const span = spanFromSelection(selection);
      if (!span) return;
      void ctx.perform(async () => {
        await ctx.api.annotate(path, {
          unit_id: unit.id,
          start: span.start,
          end: span.end,
          kind,
          subtype: subtypeSelect.value || null,
        });
        store.setPendingSpan(null);
      });
    },
  }, "mark evidence");

  const controls = el(doc, "p", { class: "evidence-controls" },
    kindSelect,
    subtypes.length > 0 ? subtypeSelect : null,
    submit,
    !contiguous && selection.length > 0
      ? el(doc, "span", { class: "hint", id: "contiguity-hint" },
        " selection must be contiguous")
      : null,
    selection.length === 0
      ? el(doc, "span", { class: "hint" }, " pick a token range")
      : null);
  container.append(controls);
  return container;
}
