import { mountApp } from "./main.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app element");
}
mountApp(root);
