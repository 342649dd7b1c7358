/** Browser entry point. The API base defaults to the serving origin and can
 * be overridden with ?api=http://host:port for development. */

import { ThtApi } from "./api.js";
import { Store } from "./state.js";
import { App } from "./views/app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "";
const api = new ThtApi(base);
const store = new Store(window.localStorage);
const root = document.getElementById("app")!;

const app = new App(root, api, store);
app.render();

declare global {
  interface Window {
    thtApp: App;
  }
}
window.thtApp = app;
