/**
 * End-to-end test against a real service process: menu -> create chain ->
 * add instances -> drag a connection -> generate a download; expert-mode
 * gating; structural restore after a reload.
 */
import { spawn, ChildProcess } from "node:child_process";
import { readFileSync, mkdtempSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { mountApp, AppHandle } from "../src/main.js";
import { setDownloadSink } from "../src/download.js";

// vitest runs with the frontend directory as cwd; the canonical template
// fixtures live in the Python package's test data one level up.
const PRODUCTION_SHEX = readFileSync(
  join(process.cwd(), "..", "tests", "data", "production.shex"),
  "utf-8",
);
const TRANSPORT_SHEX = readFileSync(
  join(process.cwd(), "..", "tests", "data", "truck_transport.shex"),
  "utf-8",
);

let service: ChildProcess;
let baseUrl: string;
let app: AppHandle | null = null;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitFor<T>(
  probe: () => T | null | undefined | false,
  what: string,
  timeoutMs = 15_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = probe();
    if (value) return value;
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

async function serviceReady(): Promise<void> {
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/supply-chain`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not start");
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
}

function mouse(target: Element, type: string): void {
  target.dispatchEvent(new window.MouseEvent(type, { bubbles: true, cancelable: true }));
}

function click(target: Element | null): void {
  if (!target) throw new Error("clicked element is missing");
  mouse(target, "mousedown");
  mouse(target, "mouseup");
  target.dispatchEvent(new window.MouseEvent("click", { bubbles: true, cancelable: true }));
}

function root(): HTMLElement {
  return document.getElementById("app")!;
}

function buttonByText(scope: ParentNode, text: string): HTMLButtonElement | null {
  return (
    [...scope.querySelectorAll("button")].find((b) => b.textContent === text) ?? null
  );
}

function nodeByTitle(label: string): SVGGElement | null {
  return (
    [...root().querySelectorAll<SVGGElement>("g.node")].find(
      (g) => g.querySelector(".node-title")?.textContent === label,
    ) ?? null
  );
}

function modal(): HTMLElement {
  const dialog = document.querySelector<HTMLElement>(".modal");
  if (!dialog) throw new Error("no open modal");
  return dialog;
}

function fillModal(values: Record<string, string>): void {
  const dialog = modal();
  for (const [name, value] of Object.entries(values)) {
    const input = dialog.querySelector<HTMLInputElement | HTMLTextAreaElement>(
      `[name="${name}"]`,
    );
    if (!input) throw new Error(`modal has no field ${name}`);
    input.value = value;
  }
}

async function createTemplateViaModal(label: string, rawShex: string): Promise<void> {
  click(root().querySelector('[data-action="create-template"]'));
  fillModal({ label, description: "", raw_shex: rawShex });
  click(buttonByText(modal(), "Create"));
  await waitFor(
    () =>
      [...root().querySelectorAll(".template-card .card-title")].some(
        (t) => t.textContent === label,
      ),
    `template card ${label}`,
  );
}

async function addInstance(templateLabel: string, expectedNodes: number): Promise<void> {
  const card = [...root().querySelectorAll<HTMLElement>(".template-card")].find(
    (c) => c.querySelector(".card-title")?.textContent === templateLabel,
  );
  if (!card) throw new Error(`no template card ${templateLabel}`);
  click(card.querySelector('[data-action="add-instance"]'));
  await waitFor(
    () => root().querySelectorAll("g.node").length === expectedNodes,
    `${expectedNodes} canvas nodes`,
  );
}

beforeAll(async () => {
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  const storeDir = mkdtempSync(join(tmpdir(), "shexgen-ui-"));
  service = spawn(
    "python3",
    ["-m", "shexgen", "serve", "--port", String(port), "--store", join(storeDir, "ui.db")],
    { stdio: "ignore" },
  );
  await serviceReady();
  window.SHEXGEN_API_BASE = baseUrl;
  document.body.innerHTML = '<div id="app"></div>';
});

afterAll(() => {
  app?.dispose();
  service?.kill();
});

describe("supply chain modeler", () => {
  it("models and downloads a wired chain end to end", async () => {
    app = mountApp(root());

    // Menu: empty store shows the hint, then create a chain via the modal.
    await waitFor(() => root().querySelector(".hint-text"), "menu hint");
    await waitFor(() => root().querySelector(".empty-hint"), "empty chain list");
    click(root().querySelector('[data-action="create-chain"]'));
    fillModal({ label: "Bakery", description: "flour to shelf" });
    click(buttonByText(modal(), "Create"));
    const card = await waitFor(
      () => root().querySelector<HTMLElement>(".chain-card"),
      "chain card",
    );
    expect(card.querySelector(".card-title")?.textContent).toBe("Bakery");

    // Open navigates to the shareable chain URL.
    click(card.querySelector('[data-action="open-chain"]'));
    await waitFor(() => root().querySelector(".canvas"), "chain canvas");
    expect(window.location.pathname).toMatch(/^\/supply-chain\/\d+$/);

    // Expert mode on, author both templates.
    const expertToggle = root().querySelector<HTMLInputElement>(
      '[data-action="toggle-expert"]',
    )!;
    expertToggle.checked = true;
    expertToggle.dispatchEvent(new window.Event("change", { bubbles: true }));
    await waitFor(
      () =>
        !root().querySelector<HTMLButtonElement>('[data-action="create-template"]')!
          .disabled,
      "enabled template creation",
    );
    await createTemplateViaModal("Production", PRODUCTION_SHEX);
    await createTemplateViaModal("Transport", TRANSPORT_SHEX);

    // Instantiate both; nodes appear with labeled handles.
    await addInstance("Production", 1);
    await addInstance("Transport", 2);
    const production = nodeByTitle("Production")!;
    expect(production.querySelectorAll('[data-direction="in"]').length).toBe(1);
    expect(production.querySelectorAll('[data-direction="out"]').length).toBe(2);

    // An invalid gesture (out -> out) must not create an edge.
    const productOut = production.querySelector('[data-direction="out"][data-var="product"]')!;
    const locationOut = production.querySelector('[data-direction="out"][data-var="location"]')!;
    mouse(productOut, "mousedown");
    mouse(locationOut, "mouseup");
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect(root().querySelectorAll(".edge-group").length).toBe(0);

    // Drag a valid connection from the product output to the good input.
    const transport = nodeByTitle("Transport")!;
    const goodIn = transport.querySelector('[data-direction="in"][data-var="good"]')!;
    mouse(productOut, "mousedown");
    mouse(goodIn, "mouseup");
    await waitFor(
      () => root().querySelectorAll(".edge-group").length === 1,
      "rendered connection",
    );
    // Direction marker: the connection carries an arrow head.
    expect(root().querySelector(".connection")?.getAttribute("marker-end")).toBe(
      "url(#arrow)",
    );

    // Generate: the downloaded Turtle contains the sameAs link.
    const downloads: { filename: string; content: string }[] = [];
    setDownloadSink((filename, content) => downloads.push({ filename, content }));
    click(root().querySelector('[data-action="generate"]'));
    await waitFor(() => downloads.length === 1, "captured download");
    expect(downloads[0].filename).toMatch(/\.ttl$/);
    expect(downloads[0].content).toContain("owl:sameAs");
    expect(downloads[0].content).not.toContain("http://exVar/");
    setDownloadSink(null);

    // Expert mode off: template authoring controls are disabled.
    expertToggle.checked = false;
    expertToggle.dispatchEvent(new window.Event("change", { bubbles: true }));
    await waitFor(
      () =>
        root().querySelector<HTMLButtonElement>('[data-action="create-template"]')!
          .disabled,
      "disabled template creation",
    );
    for (const button of root().querySelectorAll<HTMLButtonElement>(
      ".template-card .expert-only",
    )) {
      expect(button.disabled).toBe(true);
    }
    // Instantiating stays available regardless of the mode.
    const addButtons = root().querySelectorAll<HTMLButtonElement>(
      '[data-action="add-instance"]',
    );
    expect(addButtons.length).toBeGreaterThan(0);
    for (const button of addButtons) {
      expect(button.disabled).toBe(false);
    }

    // Reload: remounting at the same URL restores nodes and connection.
    app.dispose();
    app = mountApp(root());
    await waitFor(() => root().querySelectorAll("g.node").length === 2, "restored nodes");
    await waitFor(
      () => root().querySelectorAll(".edge-group").length === 1,
      "restored connection",
    );
    // Expert mode stayed off across the reload.
    expect(
      root().querySelector<HTMLInputElement>('[data-action="toggle-expert"]')!.checked,
    ).toBe(false);

    // Auto layout orders the wired pair left to right.
    click(root().querySelector('[data-action="auto-layout"]'));
    const transform = (label: string) =>
      nodeByTitle(label)!.getAttribute("transform") ?? "";
    const x = (label: string) => Number(/translate\(([-\d.]+)/.exec(transform(label))?.[1]);
    expect(x("Production")).toBeLessThan(x("Transport"));

    // Deleting the selected edge removes it on the server too.
    click(root().querySelector(".edge-group .delete-icon"));
    await waitFor(
      () => root().querySelectorAll(".edge-group").length === 0,
      "edge removed from canvas",
    );
    const persisted = await fetch(
      `${baseUrl}/supply-chain/${window.location.pathname.split("/").pop()}`,
    ).then((r) => r.json());
    expect(persisted.edges).toEqual([]);
  }, 60_000);

  it("routes an unknown chain id to the error page", async () => {
    app?.dispose();
    window.history.pushState(null, "", "/supply-chain/999999");
    app = mountApp(root());
    await waitFor(() => root().querySelector(".error-page"), "error page");
    expect(root().textContent).toContain("999999");
    click(buttonByText(root(), "Back to menu"));
    await waitFor(() => root().querySelector(".chain-list"), "menu after error page");
  });
});
