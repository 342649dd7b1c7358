import { describe, expect, it } from "vitest";

import { layoutTree } from "../src/dendrogram.js";
import { parseNewick } from "../src/newick.js";

describe("layoutTree", () => {
  it("places ultrametric leaves at one x coordinate", () => {
    const layout = layoutTree(parseNewick("((A:1,B:1):1,C:2);"));
    expect(layout.leaves).toHaveLength(3);
    const xs = layout.leaves.map((l) => l.x);
    expect(Math.max(...xs) - Math.min(...xs)).toBeLessThan(1e-9);
  });

  it("keeps leaf order and spaces rows evenly", () => {
    const layout = layoutTree(parseNewick("((A:1,B:1):1,C:2);"), 520, 20, 0);
    expect(layout.leaves.map((l) => l.label)).toEqual(["A", "B", "C"]);
    const ys = layout.leaves.map((l) => l.y);
    expect(ys[1] - ys[0]).toBeCloseTo(20);
    expect(ys[2] - ys[1]).toBeCloseTo(20);
  });

  it("scales x by cumulative branch length", () => {
    const layout = layoutTree(parseNewick("(A:1,B:3);"), 100, 20, 0);
    const a = layout.leaves.find((l) => l.label === "A")!;
    const b = layout.leaves.find((l) => l.label === "B")!;
    expect(b.x).toBeCloseTo(100);
    expect(a.x).toBeCloseTo(100 / 3);
  });

  it("emits one horizontal segment per node and connectors for internals", () => {
    const layout = layoutTree(parseNewick("((A:1,B:1):1,C:2);"));
    // 4 horizontal branches (A, B, AB, C) + root branch + 2 vertical connectors
    const horizontal = layout.segments.filter((s) => s.y1 === s.y2);
    const vertical = layout.segments.filter((s) => s.x1 === s.x2 && s.y1 !== s.y2);
    expect(horizontal.length).toBe(5);
    expect(vertical.length).toBe(2);
  });

  it("survives zero-length trees", () => {
    const layout = layoutTree(parseNewick("(A:0,B:0);"));
    expect(layout.leaves).toHaveLength(2);
  });
});
