export const PAGE_SIZES = [10, 20, 50] as const;

export type PageSize = (typeof PAGE_SIZES)[number];

export function isPageSize(n: number): n is PageSize {
  return (PAGE_SIZES as readonly number[]).includes(n);
}

export interface PageView {
  page: number;
  pageCount: number;
  /** number of hits on this page (the last page may be short) */
  pageLength: number;
  hasPrev: boolean;
  hasNext: boolean;
}

/** Pure page arithmetic; the service does the actual slicing. */
export function pageView(total: number, page: number, pageSize: PageSize): PageView {
  if (total < 0) throw new RangeError('total must be >= 0');
  const pageCount = Math.max(1, Math.ceil(total / pageSize));
  const clamped = Math.min(Math.max(1, page), pageCount);
  const start = (clamped - 1) * pageSize;
  return {
    page: clamped,
    pageCount,
    pageLength: Math.max(0, Math.min(total - start, pageSize)),
    hasPrev: clamped > 1,
    hasNext: clamped < pageCount,
  };
}

/** Page numbers to render in the bar: current +/- radius with endpoints. */
export function pageLabels(view: PageView, radius = 2): number[] {
  const pages = new Set<number>([1, view.pageCount]);
  for (let p = view.page - radius; p <= view.page + radius; p++) {
    if (p >= 1 && p <= view.pageCount) pages.add(p);
  }
  return [...pages].sort((a, b) => a - b);
}
