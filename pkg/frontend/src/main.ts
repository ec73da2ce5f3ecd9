/** Browser bootstrap; the service base comes from ?base= or defaults to localhost. */

import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("base") ?? "http://127.0.0.1:8000";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}

const app = new App(root, base);
void app.init().then(() => {
  app.startPolling(3000);
});
