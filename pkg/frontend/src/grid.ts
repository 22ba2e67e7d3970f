import type { GridConstraint, GridOperator, GridQueryBody } from './types';

export const GRID_SIZE = 7;

/** Cell address in the engine's grammar: row letter a-g (top) + column digit 0-6. */
export function cellCode(row: number, col: number): string {
  if (!Number.isInteger(row) || row < 0 || row >= GRID_SIZE) {
    throw new RangeError(`row out of range: ${row}`);
  }
  if (!Number.isInteger(col) || col < 0 || col >= GRID_SIZE) {
    throw new RangeError(`col out of range: ${col}`);
  }
  return String.fromCharCode(97 + row) + String(col);
}

export function parseCellCode(cell: string): { row: number; col: number } {
  const m = /^([a-g])([0-6])$/.exec(cell);
  if (!m) throw new RangeError(`bad cell code: ${cell}`);
  return { row: m[1].charCodeAt(0) - 97, col: Number(m[2]) };
}

/** Class names are normalized exactly as the engine does. */
export function normalizeClass(name: string): string {
  return name.trim().toLowerCase().replace(/\s+/g, '_');
}

/**
 * Mutable model behind the drag-to-grid panel. Each placement pins one object
 * class to one cell; the emitted query body matches the service's GridQuery
 * JSON byte-for-byte modulo key order.
 */
export class GridBuilder {
  private placements = new Map<string, Set<string>>();
  operator: GridOperator = 'AND';

  place(row: number, col: number, className: string): GridConstraint {
    const cell = cellCode(row, col);
    const cls = normalizeClass(className);
    if (!cls) throw new RangeError('empty class name');
    let set = this.placements.get(cell);
    if (!set) {
      set = new Set();
      this.placements.set(cell, set);
    }
    set.add(cls);
    return { cell, class: cls };
  }

  remove(row: number, col: number, className: string): boolean {
    const cell = cellCode(row, col);
    const set = this.placements.get(cell);
    const removed = set?.delete(normalizeClass(className)) ?? false;
    if (set && set.size === 0) this.placements.delete(cell);
    return removed;
  }

  clear(): void {
    this.placements.clear();
  }

  get size(): number {
    let n = 0;
    for (const set of this.placements.values()) n += set.size;
    return n;
  }

  /** Constraints sorted by cell then class, for a stable request body. */
  constraints(): GridConstraint[] {
    const out: GridConstraint[] = [];
    for (const cell of [...this.placements.keys()].sort()) {
      for (const cls of [...this.placements.get(cell)!].sort()) {
        out.push({ cell, class: cls });
      }
    }
    return out;
  }

  toQuery(): GridQueryBody | undefined {
    const constraints = this.constraints();
    if (constraints.length === 0) return undefined;
    return { constraints, operator: this.operator };
  }
}
