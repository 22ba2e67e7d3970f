// Shapes mirror the service's JSON payloads verbatim; the client never
// recomputes or reformats scores.

export interface KeyframeRef {
  video_id: string;
  keyframe_index: number;
  frame_number: number;
  timestamp_ms: number;
}

export interface SearchHit extends KeyframeRef {
  score: number;
}

export interface TemporalHit extends SearchHit {
  chain: Array<KeyframeRef | null>;
}

export interface SearchResponse {
  hits: SearchHit[];
  total: number;
  page?: number;
  page_size?: number;
}

export interface TemporalResponse {
  hits: TemporalHit[];
  total: number;
}

export interface Neighbor extends KeyframeRef {
  media_url: string;
}

export interface NeighborsResponse {
  neighbors: Neighbor[];
}

export interface VideoInfo {
  video_id: string;
  fps: number;
  keyframe_count: number;
}

export interface VideosResponse {
  corpus_name: string;
  videos: VideoInfo[];
}

export interface SpaceInfo {
  name: string;
  dim: number;
}

export interface ConfigResponse {
  corpus_name: string;
  spaces: SpaceInfo[];
  color_terms: string[];
  object_classes: string[];
  grid_size: number;
  page_sizes: number[];
  defaults: Record<string, number>;
}

export interface GridConstraint {
  cell: string;
  class: string;
}

export type GridOperator = 'AND' | 'OR';

export interface GridQueryBody {
  constraints: GridConstraint[];
  operator: GridOperator;
}

export interface MetadataStageBody {
  kind: 'metadata';
  grid?: GridQueryBody;
  tags?: string;
  ocr?: string;
  top_k?: number;
}

export interface EmbeddingStageBody {
  kind: 'embedding';
  space: string;
  text: string;
  expand?: boolean;
  top_k?: number;
}

export type StageBody = EmbeddingStageBody | MetadataStageBody;

export interface ApiErrorBody {
  error: { code: string; message: string };
}
