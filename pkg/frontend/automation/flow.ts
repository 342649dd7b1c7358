/** End-to-end UI flow against a live service: log in, add a sub-commentary
 * under Ny, mark a Direct evidence span, watch the support report
 * increment. Drives the real compiled views inside a DOM emulation;
 * network goes over real HTTP to the server given as argv[2].
 *
 * Usage: node dist/automation/flow.js http://127.0.0.1:8901
 */

import { Window } from "happy-dom";

import { ThtApi } from "../src/api.js";
import { Store } from "../src/state.js";
import { App } from "../src/views/app.js";

const base = process.argv[2];
if (!base) {
  console.error("usage: flow.js <service base url>");
  process.exit(2);
}

const window = new Window({ url: base + "/" });
const doc = window.document as unknown as Document;
doc.body.innerHTML = '<div id="app"></div>';
const root = doc.getElementById("app") as HTMLElement;

const api = new ThtApi(base, (url, init) => fetch(url, init));
const store = new Store(window.localStorage as unknown as Storage);
const app = new App(root, api, store);

let failures = 0;

function check(label: string, ok: boolean, extra = ""): void {
  const mark = ok ? "ok" : "FAIL";
  console.log(`${mark}  ${label}${extra ? ` — ${extra}` : ""}`);
  if (!ok) failures += 1;
}

async function waitFor(label: string, predicate: () => boolean,
                       timeoutMs = 5000): Promise<void> {
  const start = Date.now();
  while (Date.now() - start < timeoutMs) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`timed out waiting for ${label}`);
}

function fire(target: Element, type: string): void {
  target.dispatchEvent(new (window as any).Event(type,
    { bubbles: true, cancelable: true }));
}

function q<T extends Element>(selector: string): T {
  const node = doc.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

function supportCell(label: string): string | null {
  const cell = doc.querySelector(
    `#support-table tr[data-layer="${label}"] .support-count`);
  return cell ? cell.textContent : null;
}

async function main(): Promise<void> {
  app.render();

  // 1. log in through the form
  q<HTMLInputElement>("#login-username").value = "flow";
  q<HTMLInputElement>("#login-password").value = "flow-pass";
  fire(q("#login-form"), "submit");
  await waitFor("login + corpus load", () =>
    doc.querySelector('[data-path="KV/1.1.1/Ny"]') !== null);
  check("login and unit browser shows KV with Ny", true);

  // 2. focus the support table on the unsupported third section
  const unitsInput = q<HTMLInputElement>("#report-units");
  unitsInput.value = "1.1.1.3";
  fire(unitsInput, "change");
  await waitFor("support table scoped to 1.1.1.3", () =>
    supportCell("Ny") === "0/6");
  check("support table shows Ny 0/6 on 1.1.1.3", true);
  const hadTpRow = supportCell("Tp") !== null;
  check("no Tp commentary exists yet", !hadTpRow);

  // 3. add the sub-commentary Tp under Ny
  q<HTMLElement>('[data-path="KV/1.1.1/Ny"]').click();
  await waitFor("Ny selected", () =>
    doc.querySelector("#add-layer-form") !== null);
  q<HTMLInputElement>("#add-label").value = "Tp";
  q<HTMLTextAreaElement>("#add-text").value = "तन्त्रप्रदीपः अत्र";
  fire(q("#add-layer-form"), "submit");
  await waitFor("Tp appears in the browser", () =>
    doc.querySelector('[data-path="KV/1.1.1/Ny/Tp"]') !== null);
  check("sub-commentary Tp added under Ny (depth 2)", true);

  // 4. mark a Direct evidence span from Tp onto unit 1.1.1.3
  q<HTMLElement>('[data-path="KV/1.1.1/Ny/Tp"]').click();
  await waitFor("evidence panel for Tp", () =>
    doc.querySelector("#evidence-unit") !== null);
  const unitSelect = q<HTMLSelectElement>("#evidence-unit");
  unitSelect.value = "1.1.1.3";
  fire(unitSelect, "change");
  await waitFor("chips for 1.1.1.3", () =>
    doc.querySelectorAll("#token-chips .chip").length === 6);

  q<HTMLElement>('#token-chips [data-index="0"]').click();
  q<HTMLElement>('#token-chips [data-index="1"]').click();
  const subtype = q<HTMLSelectElement>("#evidence-subtype");
  subtype.value = "pratīka";
  const submit = q<HTMLButtonElement>("#evidence-submit");
  check("submit enabled for contiguous two-token span",
    !submit.hasAttribute("disabled"));
  submit.click();

  // 5. the support report increments: Tp now supports 2 of the 6 tokens
  await waitFor("support row for Tp", () => supportCell("Tp") === "2/6");
  check("support report increments to Tp 2/6 after marking", true);
  check("Ny report unchanged by the sub-commentary's evidence",
    supportCell("Ny") === "0/6");

  const supportedChips = doc.querySelectorAll("#token-chips .chip.supported");
  check("marked tokens render as supported chips", supportedChips.length === 2);

  const hints = doc.querySelector("#archetype-hints");
  check("transmission panel lists archetype hints",
    hints !== null && /post-Ny/.test(hints.textContent ?? ""),
    hints?.textContent ?? "(missing)");
}

main()
  .then(() => {
    if (failures === 0) {
      console.log("PASS ui flow: login -> add sub-commentary -> mark evidence -> support increment");
      process.exit(0);
    }
    console.log(`FAIL ui flow: ${failures} check(s) failed`);
    process.exit(1);
  })
  .catch((error) => {
    console.log(`FAIL ui flow: ${error}`);
    process.exit(1);
  });
