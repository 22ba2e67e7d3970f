import { ApiClient } from './api';
import { GridBuilder, GRID_SIZE, cellCode } from './grid';
import { isPageSize, pageView } from './pagination';
import {
  renderError,
  renderHit,
  renderNeighborStrip,
  renderPaginationBar,
  renderTemporalHit,
} from './render';
import { RequestSequencer } from './sequence';
import {
  addScene,
  buildStages,
  SessionState,
  stateFromParams,
  stateToParams,
} from './state';
import type { ConfigResponse, SearchHit, TemporalHit } from './types';

/**
 * Glue between the pure modules and the page. Panel A holds per-scene query
 * bars, panel B the drag-to-grid builder, panel C the result gallery.
 */
export class App {
  private state: SessionState;
  private grids: GridBuilder[] = [];
  private searchSeq = new RequestSequencer();
  private neighborSeq = new RequestSequencer();
  private config?: ConfigResponse;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {
    this.state = stateFromParams(new URLSearchParams(location.search));
  }

  async start(): Promise<void> {
    this.config = await this.api.config();
    if (!this.state.scenes[0].space && this.config.spaces.length > 0) {
      for (const scene of this.state.scenes) scene.space = this.config.spaces[0].name;
    }
    this.grids = this.state.scenes.map(() => new GridBuilder());
    this.renderShell();
    this.bind();
  }

  private renderShell(): void {
    const cfg = this.config!;
    const spaceOptions = cfg.spaces
      .map((s) => `<option value="${s.name}">${s.name} (${s.dim}d)</option>`)
      .join('');
    const classChips = cfg.object_classes
      .map((c) => `<span class="chip" draggable="true" data-class="${c}">${c}</span>`)
      .join('');
    let cells = '';
    for (let r = 0; r < GRID_SIZE; r++) {
      for (let c = 0; c < GRID_SIZE; c++) {
        cells += `<div class="cell" data-cell="${cellCode(r, c)}"></div>`;
      }
    }
    this.root.innerHTML = `
      <section id="panel-a">
        <div id="scene-bars"></div>
        <label>space <select id="space">${spaceOptions}</select></label>
        <label><input type="checkbox" id="expand"> expand</label>
        <label>top-k <input type="number" id="top-k" value="${this.state.topK}"></label>
        <label>window <input type="number" id="window" value="${this.state.window}"></label>
        <button id="add-scene">+ scene</button>
        <button id="run">Run</button>
      </section>
      <section id="panel-b">
        <div id="chips">${classChips}</div>
        <div id="grid" style="display:grid;grid-template-columns:repeat(${GRID_SIZE},1fr)">${cells}</div>
        <label><input type="radio" name="op" value="AND" checked> AND</label>
        <label><input type="radio" name="op" value="OR"> OR</label>
        <label>tags <input id="tags"></label>
        <label>ocr <input id="ocr"></label>
        <label>scene <select id="scene-bind"></select></label>
      </section>
      <section id="panel-c">
        <div id="status"></div>
        <div id="results"></div>
        <div id="pager"></div>
        <div id="neighbors"></div>
      </section>`;
    this.renderSceneBars();
  }

  private renderSceneBars(): void {
    const bars = this.root.querySelector('#scene-bars')!;
    bars.innerHTML = this.state.scenes
      .map(
        (s, i) =>
          `<input class="scene-text" data-scene="${i}" placeholder="scene ${i + 1} text"` +
          ` value="${s.text.replace(/"/g, '&quot;')}">`,
      )
      .join('');
    const bind = this.root.querySelector('#scene-bind') as HTMLSelectElement;
    bind.innerHTML = this.state.scenes
      .map((_, i) => `<option value="${i}">scene ${i + 1}</option>`)
      .join('');
    bind.value = String(this.state.activeScene);
  }

  private bind(): void {
    const $ = (sel: string) => this.root.querySelector(sel) as HTMLElement;
    $('#run').addEventListener('click', () => void this.run());
    $('#add-scene').addEventListener('click', () => {
      this.state = addScene(this.state);
      while (this.grids.length < this.state.scenes.length) this.grids.push(new GridBuilder());
      this.renderSceneBars();
    });
    this.root.addEventListener('input', (ev) => {
      const el = ev.target as HTMLElement;
      if (el.classList.contains('scene-text')) {
        const i = Number(el.dataset.scene);
        this.state.scenes[i].text = (el as HTMLInputElement).value;
      }
    });
    this.root.addEventListener('change', (ev) => {
      const el = ev.target as HTMLInputElement;
      const scene = this.state.scenes[this.state.activeScene];
      if (el.id === 'space') for (const s of this.state.scenes) s.space = el.value;
      if (el.id === 'expand') for (const s of this.state.scenes) s.expand = el.checked;
      if (el.id === 'top-k') this.state.topK = Math.max(1, Number(el.value) || 1);
      if (el.id === 'window') this.state.window = Math.max(1, Number(el.value) || 1);
      if (el.id === 'tags') scene.tags = el.value || undefined;
      if (el.id === 'ocr') scene.ocr = el.value || undefined;
      if (el.id === 'scene-bind') this.state.activeScene = Number(el.value);
      if (el.name === 'op') {
        this.activeGrid().operator = el.value as 'AND' | 'OR';
        this.syncGrid();
      }
    });
    // drag object chips onto grid cells
    this.root.addEventListener('dragstart', (ev) => {
      const chip = (ev.target as HTMLElement).closest('.chip') as HTMLElement | null;
      if (chip) (ev as DragEvent).dataTransfer?.setData('text/plain', chip.dataset.class!);
    });
    this.root.addEventListener('dragover', (ev) => {
      if ((ev.target as HTMLElement).closest('.cell')) ev.preventDefault();
    });
    this.root.addEventListener('drop', (ev) => {
      const cell = (ev.target as HTMLElement).closest('.cell') as HTMLElement | null;
      const cls = (ev as DragEvent).dataTransfer?.getData('text/plain');
      if (!cell || !cls) return;
      ev.preventDefault();
      const code = cell.dataset.cell!;
      const row = code.charCodeAt(0) - 97;
      const col = Number(code[1]);
      this.activeGrid().place(row, col, cls);
      this.syncGrid();
    });
    this.root.addEventListener('click', (ev) => {
      const el = ev.target as HTMLElement;
      const page = el.closest('.page-num') as HTMLElement | null;
      if (page) {
        this.state.page = Number(page.dataset.page);
        void this.run();
      }
      if (el.closest('.page-prev')) {
        this.state.page = Math.max(1, this.state.page - 1);
        void this.run();
      }
      if (el.closest('.page-next')) {
        this.state.page += 1;
        void this.run();
      }
      if (el.closest('.error-retry')) void this.run();
      const player = el.closest('.hit-player');
      if (player) {
        const fig = player.closest('.hit') as HTMLElement;
        void this.showNeighbors(fig.dataset.video!, Number(fig.dataset.kf));
      }
    });
    const sizeSel = this.root.querySelector('#pager');
    sizeSel?.addEventListener('change', (ev) => {
      const el = ev.target as HTMLSelectElement;
      if (el.classList.contains('page-size')) {
        const n = Number(el.value);
        if (isPageSize(n)) {
          this.state.pageSize = n;
          this.state.page = 1;
          void this.run();
        }
      }
    });
  }

  private activeGrid(): GridBuilder {
    return this.grids[this.state.activeScene];
  }

  private syncGrid(): void {
    const scene = this.state.scenes[this.state.activeScene];
    scene.grid = this.activeGrid().toQuery();
    for (const cell of this.root.querySelectorAll('.cell')) {
      cell.textContent = '';
    }
    for (const c of this.activeGrid().constraints()) {
      const el = this.root.querySelector(`.cell[data-cell="${c.cell}"]`)!;
      el.textContent = el.textContent ? `${el.textContent},${c.class}` : c.class;
    }
  }

  async run(): Promise<void> {
    const stages = buildStages(this.state);
    const status = this.root.querySelector('#status')!;
    const results = this.root.querySelector('#results')!;
    const pager = this.root.querySelector('#pager')!;
    if (stages.length === 0) {
      status.innerHTML = renderError('enter at least one query');
      return;
    }
    history.replaceState(null, '', `?${stateToParams(this.state)}`);
    try {
      if (stages.length === 1) {
        const resp = await this.searchSeq.run(() =>
          this.api.search({ ...stages[0], page: this.state.page, page_size: this.state.pageSize }),
        );
        if (!resp) return; // superseded by a newer request
        status.textContent = `${resp.total} hits`;
        results.innerHTML = resp.hits
          .map((h: SearchHit) => renderHit(h, (v, k) => this.api.mediaUrl(v, k)))
          .join('');
        pager.innerHTML = renderPaginationBar(
          pageView(resp.total, this.state.page, this.state.pageSize),
          this.state.pageSize,
        );
      } else {
        const resp = await this.searchSeq.run(() =>
          this.api.temporalSearch(stages, this.state.window, this.state.topK),
        );
        if (!resp) return;
        status.textContent = `${resp.total} sequences`;
        results.innerHTML = resp.hits
          .map((h: TemporalHit) => renderTemporalHit(h, (v, k) => this.api.mediaUrl(v, k)))
          .join('');
        pager.innerHTML = '';
      }
    } catch (err) {
      status.innerHTML = renderError(err instanceof Error ? err.message : String(err));
    }
  }

  async showNeighbors(videoId: string, keyframeIndex: number): Promise<void> {
    this.state.selected = { video_id: videoId, keyframe_index: keyframeIndex };
    const target = this.root.querySelector('#neighbors')!;
    try {
      const resp = await this.neighborSeq.run(() => this.api.neighbors(videoId, keyframeIndex, 10));
      if (!resp) return;
      const center: SearchHit = {
        video_id: videoId,
        keyframe_index: keyframeIndex,
        frame_number: 0,
        timestamp_ms: 0,
        score: 0,
      };
      target.innerHTML =
        renderNeighborStrip(center, resp.neighbors) +
        `<a href="/media/${encodeURIComponent(videoId)}/" class="folder-link">open media folder</a>`;
    } catch (err) {
      target.innerHTML = renderError(err instanceof Error ? err.message : String(err));
    }
  }
}

export function mount(selector = '#app'): App {
  const root = document.querySelector(selector);
  if (!root) throw new Error(`mount point ${selector} not found`);
  const app = new App(root as HTMLElement);
  void app.start();
  return app;
}
