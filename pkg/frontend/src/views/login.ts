import { el } from "../dom.js";

export function renderLogin(
  doc: Document,
  banner: string | null,
  onSubmit: (username: string, password: string) => void,
): HTMLElement {
  const username = el(doc, "input", {
    id: "login-username", name: "username", autocomplete: "username",
  }) as HTMLInputElement;
  const password = el(doc, "input", {
    id: "login-password", name: "password", type: "password",
  }) as HTMLInputElement;
  const form = el(doc, "form", {
    id: "login-form",
    onsubmit: (event) => {
      event.preventDefault();
      onSubmit(username.value, password.value);
    },
  },
    el(doc, "h1", {}, "textual history tool"),
    banner ? el(doc, "p", { class: "banner", id: "login-banner" }, banner) : null,
    el(doc, "label", {}, "user ", username),
    el(doc, "label", {}, "password ", password),
    el(doc, "button", { id: "login-submit", type: "submit" }, "log in"));
  return el(doc, "div", { class: "login-wrap" }, form);
}
