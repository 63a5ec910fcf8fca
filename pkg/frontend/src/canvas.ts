import { layeredLayout, Point } from "./layout.js";
import type { Edge, IoDirection, TemplateInstance } from "./types.js";
import { varName } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const NODE_WIDTH = 220;
const HEADER_HEIGHT = 34;
const ROW_HEIGHT = 26;
const FOOTER = 12;

export interface CanvasCallbacks {
  /** source is always the out-handle, target the in-handle. */
  onConnect(sourceIoId: number, targetIoId: number): Promise<void>;
  onDeleteInstance(id: number): Promise<void>;
  onDeleteEdge(id: number): Promise<void>;
}

interface HandleInfo {
  ioId: number;
  instanceId: number;
  direction: IoDirection;
  position: Point;
}

type Selection = { kind: "node" | "edge"; id: number } | null;

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function nodeHeight(instance: TemplateInstance): number {
  const ins = instance.io_variables.filter((v) => v.direction === "in").length;
  const outs = instance.io_variables.filter((v) => v.direction === "out").length;
  return HEADER_HEIGHT + Math.max(ins, outs, 1) * ROW_HEIGHT + FOOTER;
}

/** Interactive node editor: one box per instance, handles per IO variable. */
export class Canvas {
  private readonly svg: SVGSVGElement;
  private instances: TemplateInstance[] = [];
  private edges: Edge[] = [];
  private positions = new Map<number, Point>();
  private selection: Selection = null;
  private pending: HandleInfo | null = null;
  private tempLine: SVGPathElement | null = null;
  private drag: { instanceId: number; offsetX: number; offsetY: number } | null = null;

  constructor(
    root: HTMLElement,
    private readonly callbacks: CanvasCallbacks,
  ) {
    this.svg = svgEl("svg", { class: "canvas", width: "100%", height: "100%" });
    this.svg.setAttribute("viewBox", "0 0 1600 900");
    root.appendChild(this.svg);
    this.svg.addEventListener("mousemove", (event) => this.onMouseMove(event));
    this.svg.addEventListener("mouseup", () => this.clearGesture());
    this.svg.addEventListener("mousedown", (event) => {
      if (event.target === this.svg) {
        this.select(null);
      }
    });
  }

  setData(instances: TemplateInstance[], edges: Edge[]): void {
    this.instances = instances;
    this.edges = edges;
    const known = new Set(instances.map((i) => i.id));
    for (const id of [...this.positions.keys()]) {
      if (!known.has(id)) {
        this.positions.delete(id);
      }
    }
    let placed = this.positions.size;
    for (const instance of instances) {
      if (!this.positions.has(instance.id)) {
        this.positions.set(instance.id, { x: 60 + placed * 60, y: 60 + placed * 50 });
        placed += 1;
      }
    }
    if (this.selection) {
      const pool = this.selection.kind === "node" ? known : new Set(edges.map((e) => e.id));
      if (!pool.has(this.selection.id)) {
        this.selection = null;
      }
    }
    this.render();
  }

  autoLayout(): void {
    const positions = layeredLayout(
      this.instances.map((i) => i.id),
      this.edgeEndpoints(),
    );
    this.positions = positions;
    this.render();
  }

  position(instanceId: number): Point | undefined {
    return this.positions.get(instanceId);
  }

  private edgeEndpoints(): { source: number; target: number }[] {
    const owner = new Map<number, number>();
    for (const instance of this.instances) {
      for (const io of instance.io_variables) {
        owner.set(io.id, instance.id);
      }
    }
    return this.edges
      .map((edge) => ({
        source: owner.get(edge.source_io_id) ?? -1,
        target: owner.get(edge.target_io_id) ?? -1,
      }))
      .filter((e) => e.source >= 0 && e.target >= 0);
  }

  private handleInfos(): Map<number, HandleInfo> {
    const infos = new Map<number, HandleInfo>();
    for (const instance of this.instances) {
      const origin = this.positions.get(instance.id);
      if (!origin) continue;
      let inRow = 0;
      let outRow = 0;
      for (const io of instance.io_variables) {
        const row = io.direction === "in" ? inRow++ : outRow++;
        infos.set(io.id, {
          ioId: io.id,
          instanceId: instance.id,
          direction: io.direction,
          position: {
            x: io.direction === "in" ? origin.x : origin.x + NODE_WIDTH,
            y: origin.y + HEADER_HEIGHT + row * ROW_HEIGHT + ROW_HEIGHT / 2,
          },
        });
      }
    }
    return infos;
  }

  private select(selection: Selection): void {
    this.selection = selection;
    this.render();
  }

  private clearGesture(): void {
    this.pending = null;
    this.drag = null;
    if (this.tempLine) {
      this.tempLine.remove();
      this.tempLine = null;
    }
  }

  private onMouseMove(event: MouseEvent): void {
    if (this.drag) {
      const point = this.eventPoint(event);
      this.positions.set(this.drag.instanceId, {
        x: point.x - this.drag.offsetX,
        y: point.y - this.drag.offsetY,
      });
      this.render();
      return;
    }
    if (this.pending && this.tempLine) {
      const point = this.eventPoint(event);
      const from = this.pending.position;
      this.tempLine.setAttribute(
        "d",
        `M ${from.x} ${from.y} L ${point.x} ${point.y}`,
      );
    }
  }

  private eventPoint(event: MouseEvent): Point {
    const rect = this.svg.getBoundingClientRect();
    const scaleX = rect.width > 0 ? 1600 / rect.width : 1;
    const scaleY = rect.height > 0 ? 900 / rect.height : 1;
    return { x: (event.clientX - rect.left) * scaleX, y: (event.clientY - rect.top) * scaleY };
  }

  private beginConnection(handle: HandleInfo): void {
    this.pending = handle;
    this.tempLine = svgEl("path", { class: "temp-connection" });
    this.svg.appendChild(this.tempLine);
  }

  private async completeConnection(handle: HandleInfo): Promise<void> {
    const pending = this.pending;
    this.clearGesture();
    if (!pending || pending.ioId === handle.ioId) {
      return;
    }
    // Invalid gestures are rejected before any request is made.
    if (pending.direction === handle.direction || pending.instanceId === handle.instanceId) {
      this.flashRejection(handle.ioId);
      return;
    }
    const [source, target] = pending.direction === "out" ? [pending, handle] : [handle, pending];
    await this.callbacks.onConnect(source.ioId, target.ioId);
  }

  private flashRejection(ioId: number): void {
    const circle = this.svg.querySelector(`[data-io-id="${ioId}"]`);
    circle?.classList.add("rejected");
    setTimeout(() => circle?.classList.remove("rejected"), 400);
  }

  private render(): void {
    this.svg.textContent = "";
    const defs = svgEl("defs");
    const marker = svgEl("marker", {
      id: "arrow",
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    });
    marker.appendChild(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", class: "arrow-head" }));
    defs.appendChild(marker);
    this.svg.appendChild(defs);

    const handles = this.handleInfos();
    for (const edge of this.edges) {
      this.renderEdge(edge, handles);
    }
    for (const instance of this.instances) {
      this.renderNode(instance, handles);
    }
  }

  private renderEdge(edge: Edge, handles: Map<number, HandleInfo>): void {
    const source = handles.get(edge.source_io_id);
    const target = handles.get(edge.target_io_id);
    if (!source || !target) return;
    const group = svgEl("g", { class: "edge-group", "data-edge-id": String(edge.id) });
    if (this.selection?.kind === "edge" && this.selection.id === edge.id) {
      group.classList.add("selected");
    }
    const dx = Math.max(40, Math.abs(target.position.x - source.position.x) / 2);
    const path = svgEl("path", {
      class: "connection",
      "marker-end": "url(#arrow)",
      d:
        `M ${source.position.x} ${source.position.y} ` +
        `C ${source.position.x + dx} ${source.position.y}, ` +
        `${target.position.x - dx} ${target.position.y}, ` +
        `${target.position.x} ${target.position.y}`,
    });
    path.addEventListener("mousedown", (event) => {
      event.stopPropagation();
      this.select({ kind: "edge", id: edge.id });
    });
    group.appendChild(path);

    const midX = (source.position.x + target.position.x) / 2;
    const midY = (source.position.y + target.position.y) / 2;
    group.appendChild(
      this.deleteIcon(midX, midY, "data-delete-edge", String(edge.id), () =>
        this.callbacks.onDeleteEdge(edge.id),
      ),
    );
    this.svg.appendChild(group);
  }

  private renderNode(instance: TemplateInstance, handles: Map<number, HandleInfo>): void {
    const origin = this.positions.get(instance.id);
    if (!origin) return;
    const height = nodeHeight(instance);
    const group = svgEl("g", {
      class: "node",
      "data-instance-id": String(instance.id),
      transform: `translate(${origin.x}, ${origin.y})`,
    });
    if (this.selection?.kind === "node" && this.selection.id === instance.id) {
      group.classList.add("selected");
    }

    const box = svgEl("rect", {
      class: "node-box",
      width: String(NODE_WIDTH),
      height: String(height),
      rx: "8",
    });
    box.addEventListener("mousedown", (event) => {
      event.stopPropagation();
      this.select({ kind: "node", id: instance.id });
      const point = this.eventPoint(event);
      this.drag = {
        instanceId: instance.id,
        offsetX: point.x - origin.x,
        offsetY: point.y - origin.y,
      };
    });
    group.appendChild(box);

    const title = svgEl("text", {
      class: "node-title",
      x: String(NODE_WIDTH / 2),
      y: "22",
      "text-anchor": "middle",
    });
    title.textContent = instance.label;
    group.appendChild(title);

    for (const io of instance.io_variables) {
      const info = handles.get(io.id);
      if (!info) continue;
      const localX = info.position.x - origin.x;
      const localY = info.position.y - origin.y;
      const circle = svgEl("circle", {
        class: `handle handle-${io.direction}`,
        "data-io-id": String(io.id),
        "data-direction": io.direction,
        "data-var": varName(io.iri),
        cx: String(localX),
        cy: String(localY),
        r: "9",
      });
      circle.addEventListener("mousedown", (event) => {
        event.stopPropagation();
        this.beginConnection(info);
      });
      circle.addEventListener("mouseup", (event) => {
        event.stopPropagation();
        void this.completeConnection(info);
      });
      group.appendChild(circle);
      const label = svgEl("text", {
        class: "handle-label",
        x: String(io.direction === "in" ? localX + 14 : localX - 14),
        y: String(localY + 4),
        "text-anchor": io.direction === "in" ? "start" : "end",
      });
      label.textContent = varName(io.iri);
      group.appendChild(label);
    }

    group.appendChild(
      this.deleteIcon(NODE_WIDTH - 4, 4, "data-delete-instance", String(instance.id), () =>
        this.callbacks.onDeleteInstance(instance.id),
      ),
    );
    this.svg.appendChild(group);
  }

  private deleteIcon(
    x: number,
    y: number,
    attribute: string,
    value: string,
    action: () => Promise<void>,
  ): SVGGElement {
    const icon = svgEl("g", { class: "delete-icon", transform: `translate(${x}, ${y})` });
    icon.setAttribute(attribute, value);
    icon.appendChild(svgEl("circle", { r: "9", class: "delete-circle" }));
    const cross = svgEl("text", { class: "delete-cross", "text-anchor": "middle", y: "4" });
    cross.textContent = "✕";
    icon.appendChild(cross);
    icon.addEventListener("mousedown", (event) => event.stopPropagation());
    icon.addEventListener("click", (event) => {
      event.stopPropagation();
      void action();
    });
    return icon;
  }
}
