import type { Edge, SupplyChain, Template, TemplateInstance } from "./types.js";

declare global {
  interface Window {
    SHEXGEN_API_BASE?: string;
  }
}

/** Service root; the reverse proxy maps /backend/ onto the Python service. */
export function apiBase(): string {
  const base = window.SHEXGEN_API_BASE ?? "/backend";
  return base.endsWith("/") ? base.slice(0, -1) : base;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
  const response = await fetch(apiBase() + path, {
    method,
    headers: body === undefined ? {} : { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (!response.ok) {
    let code = "error";
    let message = response.statusText;
    try {
      const payload = await response.json();
      code = payload.error ?? code;
      message = payload.message ?? message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
  }
  if (response.status === 204) {
    return undefined as T;
  }
  const type = response.headers.get("content-type") ?? "";
  if (type.startsWith("text/turtle")) {
    return (await response.text()) as T;
  }
  return (await response.json()) as T;
}

export const api = {
  listChains: () => request<SupplyChain[]>("GET", "/supply-chain"),
  getChain: (id: number) => request<SupplyChain>("GET", `/supply-chain/${id}`),
  createChain: (label: string, description: string) =>
    request<SupplyChain>("POST", "/supply-chain", { label, description }),
  updateChain: (id: number, label: string, description: string) =>
    request<SupplyChain>("PUT", `/supply-chain/${id}`, { label, description }),
  deleteChain: (id: number) => request<void>("DELETE", `/supply-chain/${id}`),

  listTemplates: () => request<Template[]>("GET", "/template"),
  createTemplate: (label: string, description: string, rawShex: string) =>
    request<Template>("POST", "/template", { label, description, raw_shex: rawShex }),
  updateTemplate: (id: number, label: string, description: string, rawShex: string) =>
    request<Template>("PUT", `/template/${id}`, { label, description, raw_shex: rawShex }),
  deleteTemplate: (id: number) => request<void>("DELETE", `/template/${id}`),

  instantiate: (templateId: number, chainId: number) =>
    request<TemplateInstance>("POST", "/template-instance", {
      template_id: templateId,
      supply_chain_id: chainId,
    }),
  deleteInstance: (id: number) => request<void>("DELETE", `/template-instance/${id}`),

  addEdge: (chainId: number, sourceIoId: number, targetIoId: number) =>
    request<Edge>("POST", "/edge", {
      supply_chain_id: chainId,
      source_io_id: sourceIoId,
      target_io_id: targetIoId,
    }),
  deleteEdge: (id: number) => request<void>("DELETE", `/edge/${id}`),

  chainGraph: (id: number, merge = false) =>
    request<string>("GET", `/supply-chain/${id}/graph?merge=${merge}`),
};
