export interface LayoutEdge {
  source: number;
  target: number;
}

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  columnWidth: number;
  rowHeight: number;
  marginX: number;
  marginY: number;
}

const DEFAULTS: LayoutOptions = {
  columnWidth: 300,
  rowHeight: 170,
  marginX: 40,
  marginY: 40,
};

/**
 * Layered left-to-right layout: a node's column is the longest edge path
 * leading into it, nodes within a column stack vertically. Cycles are
 * tolerated by capping the relaxation at the node count.
 */
export function layeredLayout(
  nodeIds: number[],
  edges: LayoutEdge[],
  options: Partial<LayoutOptions> = {},
): Map<number, Point> {
  const opts = { ...DEFAULTS, ...options };
  const rank = new Map<number, number>();
  for (const id of nodeIds) {
    rank.set(id, 0);
  }
  const relevant = edges.filter((e) => rank.has(e.source) && rank.has(e.target));
  for (let pass = 0; pass < nodeIds.length; pass += 1) {
    let changed = false;
    for (const edge of relevant) {
      const proposed = (rank.get(edge.source) ?? 0) + 1;
      if (proposed > (rank.get(edge.target) ?? 0) && proposed <= nodeIds.length) {
        rank.set(edge.target, proposed);
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
  }
  const columnCounts = new Map<number, number>();
  const positions = new Map<number, Point>();
  for (const id of nodeIds) {
    const column = rank.get(id) ?? 0;
    const row = columnCounts.get(column) ?? 0;
    columnCounts.set(column, row + 1);
    positions.set(id, {
      x: opts.marginX + column * opts.columnWidth,
      y: opts.marginY + row * opts.rowHeight,
    });
  }
  return positions;
}
