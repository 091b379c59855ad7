// Rendering-only decimation for series panels. Picks per-bucket extrema so
// spikes survive; the underlying data is never modified.

export function downsampleIndices(values: Array<number | null>, maxPoints: number): number[] {
  const n = values.length;
  if (maxPoints < 2) throw new Error("maxPoints must be >= 2");
  if (n <= maxPoints) {
    return Array.from({ length: n }, (_, i) => i);
  }
  const picked = new Set<number>([0, n - 1]);
  // two picks per bucket keeps the output within maxPoints
  const buckets = Math.max(1, Math.floor((maxPoints - 2) / 2));
  const step = n / buckets;
  for (let b = 0; b < buckets; b++) {
    const start = Math.floor(b * step);
    const end = Math.min(n, Math.floor((b + 1) * step));
    let minIdx = -1;
    let maxIdx = -1;
    for (let i = start; i < end; i++) {
      const v = values[i];
      if (v === null || v === undefined || !Number.isFinite(v)) continue;
      if (minIdx === -1 || v < (values[minIdx] as number)) minIdx = i;
      if (maxIdx === -1 || v > (values[maxIdx] as number)) maxIdx = i;
    }
    if (minIdx !== -1) picked.add(minIdx);
    if (maxIdx !== -1) picked.add(maxIdx);
  }
  return [...picked].sort((a, b) => a - b);
}
