/** Pure view-state logic, kept free of DOM and network so it is unit
 * testable: page merging for infinite scroll, verdict bookkeeping,
 * percentage formatting, and an offline retry queue. */

import type { Progress, QueueItem, Verdict } from "./api.js";

export const PAGE_SIZE = 25;

/** Accumulates queue pages in rank order.  Pages may arrive more than
 * once (refetch after century switch, retries); merging is idempotent and
 * the result never has gaps or overlaps within the fetched prefix. */
export class QueueStore {
  private byRank = new Map<number, QueueItem>();
  total = 0;

  mergePage(items: QueueItem[], total: number): void {
    this.total = total;
    for (const item of items) {
      this.byRank.set(item.rank, item);
    }
  }

  /** Contiguous prefix of fetched items, in rank order starting at 1. */
  orderedPrefix(): QueueItem[] {
    const out: QueueItem[] = [];
    for (let rank = 1; rank <= this.total; rank++) {
      const item = this.byRank.get(rank);
      if (!item) break;
      out.push(item);
    }
    return out;
  }

  /** Offset to request next, or null when the queue is fully fetched. */
  nextOffset(): number | null {
    const have = this.orderedPrefix().length;
    return have >= this.total && this.total > 0 ? null : have;
  }

  get(rank: number): QueueItem | undefined {
    return this.byRank.get(rank);
  }

  setVerdict(docId: string, verdict: Verdict): void {
    for (const item of this.byRank.values()) {
      if (item.doc_id === docId) {
        item.current_verdict = verdict;
      }
    }
  }

  clear(): void {
    this.byRank.clear();
    this.total = 0;
  }
}

/** First rank at or after `fromRank` without a verdict, else null. */
export function nextUnreviewedRank(
  store: QueueStore,
  fromRank: number,
): number | null {
  for (let rank = Math.max(1, fromRank); rank <= store.total; rank++) {
    const item = store.get(rank);
    if (item === undefined) return rank; // not fetched yet; let caller fetch
    if (item.current_verdict === null) return rank;
  }
  return null;
}

/** Confirmation rate as a one-decimal percentage ("12.5%"); an em dash
 * when nothing has been evaluated yet, never NaN. */
export function formatRate(progress: Pick<Progress, "evaluated" | "confirmation_rate">): string {
  if (progress.evaluated === 0) return "—";
  return `${(progress.confirmation_rate * 100).toFixed(1)}%`;
}

export interface PendingVerdict {
  docId: string;
  verdict: Verdict;
  annotator: string;
}

/** Holds verdicts whose POST failed (service down, network blip) so they
 * are retried rather than silently dropped. */
export class RetryQueue {
  private pending: PendingVerdict[] = [];

  add(entry: PendingVerdict): void {
    const dup = this.pending.some(
      (p) => p.docId === entry.docId && p.annotator === entry.annotator,
    );
    if (!dup) this.pending.push(entry);
  }

  get size(): number {
    return this.pending.length;
  }

  /** Re-attempts every pending verdict; entries that fail again stay
   * queued in order. Returns how many were flushed. */
  async flush(
    post: (entry: PendingVerdict) => Promise<unknown>,
  ): Promise<number> {
    const still: PendingVerdict[] = [];
    let sent = 0;
    for (const entry of this.pending) {
      try {
        await post(entry);
        sent += 1;
      } catch {
        still.push(entry);
      }
    }
    this.pending = still;
    return sent;
  }
}
