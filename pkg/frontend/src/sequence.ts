/**
 * Guards a panel against out-of-order responses: each issued request gets a
 * monotonically increasing sequence number, and only the most recent request
 * may deliver its result.
 */
export class RequestSequencer {
  private issued = 0;
  private delivered = 0;

  next(): number {
    return ++this.issued;
  }

  /** True exactly once, for the newest request seen so far. */
  accept(seq: number): boolean {
    if (seq <= this.delivered || seq < this.issued) return false;
    this.delivered = seq;
    return true;
  }

  /** Wrap an async producer so stale completions resolve to undefined. */
  async run<T>(producer: () => Promise<T>): Promise<T | undefined> {
    const seq = this.next();
    const result = await producer();
    return this.accept(seq) ? result : undefined;
  }
}
