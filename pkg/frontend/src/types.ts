export type IoDirection = "in" | "out";

export interface IoVariable {
  id: number;
  direction: IoDirection;
  iri: string;
  skolem_iri: string;
}

export interface TemplateInstance {
  id: number;
  label: string;
  io_variables: IoVariable[];
}

export interface Edge {
  id: number;
  source_io_id: number;
  target_io_id: number;
}

export interface SupplyChain {
  id: number;
  label: string;
  description: string;
  template_instances: TemplateInstance[];
  edges: Edge[];
}

export interface Template {
  id: number;
  label: string;
  description: string;
  raw_shex: string;
  warnings: string[];
}

/** Short display name of an exVar IRI, e.g. "location". */
export function varName(iri: string): string {
  const slash = iri.lastIndexOf("/");
  return slash >= 0 ? iri.slice(slash + 1) : iri;
}
