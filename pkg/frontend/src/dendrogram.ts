/** Rectangular dendrogram layout: root at the left, leaves evenly spaced on
 * the vertical axis, horizontal extent proportional to cumulative branch
 * length. Pure geometry; the view turns segments into SVG lines. */

import { NewickNode } from "./newick.js";

export interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface LeafPoint {
  x: number;
  y: number;
  label: string;
}

export interface Layout {
  segments: Segment[];
  leaves: LeafPoint[];
  width: number;
  height: number;
}

interface Placed {
  y: number;
  depth: number;
}

export function layoutTree(
  root: NewickNode,
  width = 520,
  rowHeight = 22,
  padding = 8,
): Layout {
  const leafCount = countLeaves(root);
  const height = Math.max(leafCount * rowHeight, rowHeight) + 2 * padding;
  const maxDepth = maxCumulativeLength(root, 0);
  // Degenerate all-zero branch lengths still get a readable spread.
  const scale = maxDepth > 0 ? (width - 2 * padding) / maxDepth : 1;

  const segments: Segment[] = [];
  const leaves: LeafPoint[] = [];
  let nextRow = 0;

  function place(node: NewickNode, depthBefore: number): Placed {
    const depth = depthBefore + node.length;
    if (node.children.length === 0) {
      const y = padding + (nextRow + 0.5) * rowHeight;
      nextRow += 1;
      const x = padding + depth * scale;
      segments.push({ x1: padding + depthBefore * scale, y1: y, x2: x, y2: y });
      leaves.push({ x, y, label: node.label ?? "" });
      return { y, depth };
    }
    const placed = node.children.map((child) => place(child, depth));
    const y = (placed[0].y + placed[placed.length - 1].y) / 2;
    const x = padding + depth * scale;
    // vertical connector across the children, then this node's own branch
    segments.push({ x1: x, y1: placed[0].y, x2: x, y2: placed[placed.length - 1].y });
    segments.push({ x1: padding + depthBefore * scale, y1: y, x2: x, y2: y });
    return { y, depth };
  }

  place(root, 0);
  return { segments, leaves, width, height };
}

function countLeaves(node: NewickNode): number {
  if (node.children.length === 0) return 1;
  return node.children.reduce((acc, child) => acc + countLeaves(child), 0);
}

function maxCumulativeLength(node: NewickNode, acc: number): number {
  const here = acc + node.length;
  if (node.children.length === 0) return here;
  return Math.max(...node.children.map((c) => maxCumulativeLength(c, here)));
}
