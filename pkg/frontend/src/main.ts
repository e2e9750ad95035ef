/** Review UI entry point: queue list with infinite scroll, a detail pane
 * with excerpt-first display and lazy full-text load, verdict buttons with
 * keyboard shortcuts, and a progress panel refreshed from the service
 * after every verdict. */

import { ApiError, ReviewApi, type QueueItem, type Verdict } from "./api.js";
import {
  PAGE_SIZE,
  QueueStore,
  RetryQueue,
  formatRate,
  nextUnreviewedRank,
} from "./state.js";

const api = new ReviewApi();
const store = new QueueStore();
const retries = new RetryQueue();

let century = 17;
let currentRank = 1;
let loading = false;
let annotator = localStorage.getItem("annotator") ?? "";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const listEl = el<HTMLUListElement>("queue-list");
const detailEl = el<HTMLDivElement>("detail");
const progressEl = el<HTMLDivElement>("progress");
const bannerEl = el<HTMLDivElement>("retry-banner");
const centurySelect = el<HTMLSelectElement>("century");
const annotatorInput = el<HTMLInputElement>("annotator");

function verdictGlyph(v: Verdict | null): string {
  if (v === "confirm") return "✓";
  if (v === "reject") return "✗";
  if (v === "uncertain") return "?";
  return "";
}

function renderList(): void {
  const items = store.orderedPrefix();
  listEl.replaceChildren(
    ...items.map((item) => {
      const li = document.createElement("li");
      li.dataset.rank = String(item.rank);
      li.className = [
        item.rank === currentRank ? "current" : "",
        item.current_verdict ? "verdicted" : "",
        item.disagreement ? "disagreement" : "",
      ]
        .filter(Boolean)
        .join(" ");
      li.textContent =
        `#${item.rank}  ${item.doc_id}  ` +
        `${item.score.toFixed(4)} ${verdictGlyph(item.current_verdict)}`;
      li.addEventListener("click", () => select(item.rank));
      return li;
    }),
  );
  if (items.length === 0) {
    const empty = document.createElement("li");
    empty.className = "empty";
    empty.textContent = "Queue is empty for this century.";
    listEl.replaceChildren(empty);
  }
}

function renderDetail(item: QueueItem | undefined): void {
  if (!item) {
    detailEl.replaceChildren();
    return;
  }
  const head = document.createElement("h2");
  head.textContent = `#${item.rank} — ${item.doc_id}`;
  const meta = document.createElement("p");
  meta.className = "meta";
  meta.textContent =
    `score ${item.score.toFixed(6)} · model ${item.model_fingerprint}` +
    (item.disagreement ? " · annotators disagree" : "");
  const excerpt = document.createElement("pre");
  excerpt.className = "excerpt";
  excerpt.textContent = item.text_excerpt;

  const expand = document.createElement("button");
  expand.textContent = "Load full text";
  expand.disabled = !item.full_text_available;
  expand.addEventListener("click", async () => {
    expand.disabled = true;
    try {
      excerpt.textContent = await api.getText(item.doc_id);
      expand.remove();
    } catch {
      expand.disabled = false;
    }
  });

  const buttons = document.createElement("div");
  buttons.className = "verdicts";
  for (const [verdict, label, key] of [
    ["confirm", "Confirm", "c"],
    ["reject", "Reject", "r"],
    ["uncertain", "Uncertain", "u"],
  ] as const) {
    const b = document.createElement("button");
    b.textContent = `${label} (${key})`;
    b.addEventListener("click", () => submitVerdict(item, verdict));
    buttons.append(b);
  }

  detailEl.replaceChildren(head, meta, buttons, excerpt);
}

async function refreshProgress(): Promise<void> {
  try {
    const p = await api.getProgress(century);
    progressEl.textContent =
      `evaluated ${p.evaluated} · confirmed ${p.confirmed} · ` +
      `rejected ${p.rejected} · remaining ${p.remaining} · ` +
      `rate ${formatRate(p)}`;
  } catch {
    progressEl.textContent = "progress unavailable";
  }
}

function renderBanner(): void {
  bannerEl.hidden = retries.size === 0;
  bannerEl.textContent =
    retries.size > 0
      ? `${retries.size} verdict(s) pending retry — click to resend`
      : "";
}

async function submitVerdict(item: QueueItem, verdict: Verdict): Promise<void> {
  if (!annotator) {
    annotatorInput.focus();
    return;
  }
  try {
    const outcome = await api.postVerdict(item.doc_id, verdict, annotator);
    if (outcome.kind === "conflict") {
      meta_conflict(item, outcome.existing.verdict);
      return;
    }
    store.setVerdict(item.doc_id, verdict);
  } catch (err) {
    if (err instanceof ApiError) throw err; // 4xx: a real mistake, surface it
    retries.add({ docId: item.doc_id, verdict, annotator });
    renderBanner();
    store.setVerdict(item.doc_id, verdict); // optimistic; retried until acked
  }
  await refreshProgress();
  const next = nextUnreviewedRank(store, item.rank + 1);
  if (next !== null) await select(next);
  renderList();
}

function meta_conflict(item: QueueItem, existing: Verdict): void {
  const note = document.createElement("p");
  note.className = "conflict";
  note.textContent =
    `You already recorded "${existing}" for this document this round. ` +
    `Resolve by discussion; the log keeps the original.`;
  detailEl.append(note);
  store.setVerdict(item.doc_id, existing);
  renderList();
}

async function select(rank: number): Promise<void> {
  currentRank = rank;
  if (!store.get(rank)) await loadMore();
  renderDetail(store.get(rank));
  renderList();
  const row = listEl.querySelector<HTMLElement>(`[data-rank="${rank}"]`);
  row?.scrollIntoView({ block: "nearest" });
}

async function loadMore(): Promise<void> {
  if (loading) return;
  const offset = store.nextOffset();
  if (offset === null && store.total > 0) return;
  loading = true;
  try {
    const page = await api.getQueue(century, offset ?? 0, PAGE_SIZE);
    store.mergePage(page.items, page.total);
    renderList();
  } catch {
    /* transient; scrolling again retries */
  } finally {
    loading = false;
  }
}

async function switchCentury(next: number): Promise<void> {
  century = next;
  store.clear();
  currentRank = 1;
  renderList();
  renderDetail(undefined);
  await loadMore();
  await refreshProgress();
  await select(1);
}

function bindEvents(): void {
  listEl.addEventListener("scroll", () => {
    if (listEl.scrollTop + listEl.clientHeight >= listEl.scrollHeight - 40) {
      void loadMore();
    }
  });
  centurySelect.addEventListener("change", () => {
    void switchCentury(Number(centurySelect.value));
  });
  annotatorInput.value = annotator;
  annotatorInput.addEventListener("change", () => {
    annotator = annotatorInput.value.trim();
    localStorage.setItem("annotator", annotator);
  });
  bannerEl.addEventListener("click", async () => {
    await retries.flush(({ docId, verdict, annotator: who }) =>
      api.postVerdict(docId, verdict, who),
    );
    renderBanner();
    await refreshProgress();
  });
  document.addEventListener("keydown", (ev) => {
    if (ev.target instanceof HTMLInputElement) return;
    const item = store.get(currentRank);
    if (ev.key === "n" || ev.key === "j") void select(currentRank + 1);
    else if (ev.key === "p" || ev.key === "k")
      void select(Math.max(1, currentRank - 1));
    else if (item && ev.key === "c") void submitVerdict(item, "confirm");
    else if (item && ev.key === "r") void submitVerdict(item, "reject");
    else if (item && ev.key === "u") void submitVerdict(item, "uncertain");
  });
}

async function start(): Promise<void> {
  bindEvents();
  await switchCentury(Number(centurySelect.value));
}

void start();
