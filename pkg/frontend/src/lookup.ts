/** Navigate fetched work documents by slash path ("KV/1.1.1/Ny/Tp"). */

import { LayerDoc, UnitDoc, WorkDoc } from "./api.js";

export interface ParsedPath {
  workId: string;
  unitId: string | null;
  labels: string[];
}

export function parsePath(path: string): ParsedPath {
  const segments = path.split("/").filter((s) => s !== "");
  return {
    workId: segments[0] ?? "",
    unitId: segments[1] ?? null,
    labels: segments.slice(2),
  };
}

export function findUnit(work: WorkDoc, unitId: string): UnitDoc | null {
  return work.units.find((u) => u.id === unitId) ?? null;
}

export function findLayer(work: WorkDoc, path: string): LayerDoc | null {
  const parsed = parsePath(path);
  if (work.id !== parsed.workId || !parsed.unitId) return null;
  const unit = findUnit(work, parsed.unitId);
  if (!unit) return null;
  let siblings = unit.layers ?? [];
  let node: LayerDoc | null = null;
  for (const label of parsed.labels) {
    node = siblings.find((l) => l.label === label) ?? null;
    if (!node) return null;
    siblings = node.layers ?? [];
  }
  return node;
}

/** All layer labels used anywhere in the work, sorted. */
export function workLabels(work: WorkDoc): string[] {
  const labels = new Set<string>();
  const walk = (layers: LayerDoc[] | undefined) => {
    for (const layer of layers ?? []) {
      labels.add(layer.label);
      walk(layer.layers);
    }
  };
  for (const unit of work.units) walk(unit.layers);
  return [...labels].sort();
}

/** Sibling layers under a unit or layer path (for the limit check). */
export function childLayers(work: WorkDoc, path: string): LayerDoc[] {
  const parsed = parsePath(path);
  if (!parsed.unitId) return [];
  if (parsed.labels.length === 0) {
    return findUnit(work, parsed.unitId)?.layers ?? [];
  }
  return findLayer(work, path)?.layers ?? [];
}
