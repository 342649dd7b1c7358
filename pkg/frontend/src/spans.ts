/** Token-chip selection rules: evidence spans are contiguous half-open
 * intervals, so submission is only possible for a gap-free selection. */

export function toggleIndex(selection: number[], index: number): number[] {
  const next = selection.includes(index)
    ? selection.filter((i) => i !== index)
    : [...selection, index];
  return next.sort((a, b) => a - b);
}

export function isContiguous(selection: number[]): boolean {
  if (selection.length === 0) return false;
  const sorted = [...selection].sort((a, b) => a - b);
  return sorted[sorted.length - 1] - sorted[0] === sorted.length - 1;
}

/** Half-open [start, end) for a contiguous selection, else null. */
export function spanFromSelection(
  selection: number[],
): { start: number; end: number } | null {
  if (!isContiguous(selection)) return null;
  const sorted = [...selection].sort((a, b) => a - b);
  return { start: sorted[0], end: sorted[sorted.length - 1] + 1 };
}
