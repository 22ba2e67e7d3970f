import type { Neighbor, SearchHit, TemporalHit } from './types';
import { PAGE_SIZES, PageView, pageLabels } from './pagination';

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function formatTimestamp(ms: number): string {
  const totalSec = Math.floor(ms / 1000);
  const min = Math.floor(totalSec / 60);
  const sec = String(totalSec % 60).padStart(2, '0');
  const frac = String(ms % 1000).padStart(3, '0');
  return `${min}:${sec}.${frac}`;
}

/** Scores are shown exactly as the service serialized them. */
export function formatScore(score: number): string {
  return JSON.stringify(score);
}

function card(hit: SearchHit, mediaUrl: string, extra = ''): string {
  const vid = escapeHtml(hit.video_id);
  return (
    `<figure class="hit" data-video="${vid}" data-kf="${hit.keyframe_index}">` +
    `<img src="${mediaUrl}" alt="${vid} keyframe ${hit.keyframe_index}">` +
    `<figcaption>` +
    `<span class="hit-video">${vid}</span>` +
    `<span class="hit-time">${formatTimestamp(hit.timestamp_ms)}</span>` +
    `<span class="hit-frame">frame ${hit.frame_number}</span>` +
    `<span class="hit-score">${formatScore(hit.score)}</span>` +
    `<button class="hit-player" title="neighbor frames">&#9658;</button>` +
    `</figcaption>${extra}</figure>`
  );
}

export function renderHit(hit: SearchHit, mediaUrl: (v: string, k: number) => string): string {
  return card(hit, mediaUrl(hit.video_id, hit.keyframe_index));
}

/**
 * A temporal hit renders its pivot card plus a highlighted chain strip: one
 * slot per later scene, filled slots marked chain-link, empty ones chain-miss.
 */
export function renderTemporalHit(
  hit: TemporalHit,
  mediaUrl: (v: string, k: number) => string,
): string {
  const slots = hit.chain
    .map((link, i) => {
      if (link === null) {
        return `<span class="chain-miss" data-scene="${i + 2}">&ndash;</span>`;
      }
      return (
        `<span class="chain-link" data-scene="${i + 2}" data-kf="${link.keyframe_index}">` +
        `<img src="${mediaUrl(link.video_id, link.keyframe_index)}"` +
        ` alt="scene ${i + 2} keyframe ${link.keyframe_index}"></span>`
      );
    })
    .join('');
  const chain = `<div class="chain">${slots}</div>`;
  return card(hit, mediaUrl(hit.video_id, hit.keyframe_index), chain);
}

export function renderNeighborStrip(center: SearchHit, neighbors: Neighbor[]): string {
  const cells = neighbors.map((n) => {
    const cls = n.keyframe_index < center.keyframe_index ? 'before' : 'after';
    return (
      `<a class="neighbor ${cls}" href="${n.media_url}" data-kf="${n.keyframe_index}">` +
      `<img src="${n.media_url}" alt="keyframe ${n.keyframe_index}"></a>`
    );
  });
  const mid = cells.filter((c) => c.includes('before')).length;
  cells.splice(
    mid,
    0,
    `<span class="neighbor current" data-kf="${center.keyframe_index}">` +
      `<img src="" alt="keyframe ${center.keyframe_index}"></span>`,
  );
  return `<div class="neighbor-strip">${cells.join('')}</div>`;
}

export function renderPaginationBar(view: PageView, pageSize: number): string {
  const prev = `<button class="page-prev"${view.hasPrev ? '' : ' disabled'}>&larr;</button>`;
  const next = `<button class="page-next"${view.hasNext ? '' : ' disabled'}>&rarr;</button>`;
  let last = 0;
  const numbers = pageLabels(view)
    .map((p) => {
      const gap = p - last > 1 ? '<span class="page-gap">&hellip;</span>' : '';
      last = p;
      const current = p === view.page ? ' page-current' : '';
      return `${gap}<button class="page-num${current}" data-page="${p}">${p}</button>`;
    })
    .join('');
  const sizes = PAGE_SIZES.map(
    (s) => `<option value="${s}"${s === pageSize ? ' selected' : ''}>${s}</option>`,
  ).join('');
  return (
    `<nav class="pagination">${prev}${numbers}${next}` +
    `<select class="page-size">${sizes}</select></nav>`
  );
}

export function renderError(message: string): string {
  return (
    `<div class="error-banner" role="alert">${escapeHtml(message)}` +
    `<button class="error-retry">Retry</button></div>`
  );
}
