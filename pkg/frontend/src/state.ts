import type { GridQueryBody, StageBody } from './types';
import { isPageSize, PageSize } from './pagination';

export const MAX_SCENES = 4;

/** Draft of one temporal scene, edited in panels A (text) and B (metadata). */
export interface SceneDraft {
  text: string;
  space: string;
  expand: boolean;
  grid?: GridQueryBody;
  tags?: string;
  ocr?: string;
}

export interface SessionState {
  scenes: SceneDraft[];
  activeScene: number;
  topK: number;
  page: number;
  pageSize: PageSize;
  window: number;
  selected?: { video_id: string; keyframe_index: number };
}

export function emptyScene(space: string): SceneDraft {
  return { text: '', space, expand: false };
}

export function defaultState(space = ''): SessionState {
  return {
    scenes: [emptyScene(space)],
    activeScene: 0,
    topK: 100,
    page: 1,
    pageSize: 20,
    window: 10,
  };
}

export function addScene(state: SessionState): SessionState {
  if (state.scenes.length >= MAX_SCENES) return state;
  const space = state.scenes[0]?.space ?? '';
  return {
    ...state,
    scenes: [...state.scenes, emptyScene(space)],
    activeScene: state.scenes.length,
  };
}

export function removeScene(state: SessionState, index: number): SessionState {
  if (state.scenes.length <= 1) return state;
  const scenes = state.scenes.filter((_, i) => i !== index);
  return { ...state, scenes, activeScene: Math.min(state.activeScene, scenes.length - 1) };
}

/** A scene draft becomes a request stage; empty drafts yield undefined. */
export function sceneToStage(scene: SceneDraft, topK: number): StageBody | undefined {
  const hasMeta = scene.grid !== undefined || scene.tags || scene.ocr;
  if (hasMeta) {
    return {
      kind: 'metadata',
      ...(scene.grid !== undefined ? { grid: scene.grid } : {}),
      ...(scene.tags ? { tags: scene.tags } : {}),
      ...(scene.ocr ? { ocr: scene.ocr } : {}),
      top_k: topK,
    };
  }
  if (scene.text.trim()) {
    return {
      kind: 'embedding',
      space: scene.space,
      text: scene.text.trim(),
      ...(scene.expand ? { expand: true } : {}),
      top_k: topK,
    };
  }
  return undefined;
}

/** Stages for the Run button: all non-empty scenes, in scene order. */
export function buildStages(state: SessionState): StageBody[] {
  return state.scenes
    .map((s) => sceneToStage(s, state.topK))
    .filter((s): s is StageBody => s !== undefined);
}

/**
 * Serialize the whole session into URL search params so a query can be
 * shared and reproduced from the address bar alone.
 */
export function stateToParams(state: SessionState): URLSearchParams {
  const params = new URLSearchParams();
  params.set('scenes', JSON.stringify(state.scenes));
  params.set('active', String(state.activeScene));
  params.set('top_k', String(state.topK));
  params.set('page', String(state.page));
  params.set('page_size', String(state.pageSize));
  params.set('window', String(state.window));
  if (state.selected) {
    params.set('sel', `${state.selected.video_id}:${state.selected.keyframe_index}`);
  }
  return params;
}

export function stateFromParams(params: URLSearchParams, fallbackSpace = ''): SessionState {
  const state = defaultState(fallbackSpace);
  const rawScenes = params.get('scenes');
  if (rawScenes) {
    try {
      const scenes = JSON.parse(rawScenes) as SceneDraft[];
      if (Array.isArray(scenes) && scenes.length >= 1 && scenes.length <= MAX_SCENES) {
        state.scenes = scenes;
      }
    } catch {
      // malformed share link: keep the default single scene
    }
  }
  const active = Number(params.get('active'));
  if (Number.isInteger(active) && active >= 0 && active < state.scenes.length) {
    state.activeScene = active;
  }
  const topK = Number(params.get('top_k'));
  if (Number.isInteger(topK) && topK > 0) state.topK = topK;
  const page = Number(params.get('page'));
  if (Number.isInteger(page) && page >= 1) state.page = page;
  const pageSize = Number(params.get('page_size'));
  if (isPageSize(pageSize)) state.pageSize = pageSize;
  const window = Number(params.get('window'));
  if (Number.isInteger(window) && window >= 1) state.window = window;
  const sel = params.get('sel');
  if (sel) {
    const at = sel.lastIndexOf(':');
    const idx = Number(sel.slice(at + 1));
    if (at > 0 && Number.isInteger(idx)) {
      state.selected = { video_id: sel.slice(0, at), keyframe_index: idx };
    }
  }
  return state;
}
