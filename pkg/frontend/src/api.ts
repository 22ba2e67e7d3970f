import type {
  ApiErrorBody,
  ConfigResponse,
  NeighborsResponse,
  SearchResponse,
  StageBody,
  TemporalResponse,
  VideosResponse,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

/**
 * Thin typed client over the service's /api endpoints. Holds no state beyond
 * the base URL; an injectable fetch makes it testable without a browser.
 */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  mediaUrl(videoId: string, keyframeIndex: number): string {
    return `${this.baseUrl}/media/${encodeURIComponent(videoId)}/${keyframeIndex}.jpg`;
  }

  async search(body: StageBody & { page?: number; page_size?: number }): Promise<SearchResponse> {
    return this.post<SearchResponse>('/api/search', body);
  }

  async temporalSearch(
    stages: StageBody[],
    window?: number,
    topK?: number,
  ): Promise<TemporalResponse> {
    const body: Record<string, unknown> = { stages };
    if (window !== undefined) body.window = window;
    if (topK !== undefined) body.top_k = topK;
    return this.post<TemporalResponse>('/api/temporal-search', body);
  }

  async neighbors(videoId: string, keyframeIndex: number, n = 10): Promise<NeighborsResponse> {
    const path = `/api/keyframes/${encodeURIComponent(videoId)}/${keyframeIndex}/neighbors?n=${n}`;
    return this.get<NeighborsResponse>(path);
  }

  async videos(): Promise<VideosResponse> {
    return this.get<VideosResponse>('/api/videos');
  }

  async config(): Promise<ConfigResponse> {
    return this.get<ConfigResponse>('/api/config');
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    return this.decode<T>(resp);
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    return this.decode<T>(resp);
  }

  private async decode<T>(resp: Response): Promise<T> {
    if (!resp.ok) {
      let code = 'http_error';
      let message = `HTTP ${resp.status}`;
      try {
        const err = (await resp.json()) as ApiErrorBody;
        code = err.error.code;
        message = err.error.message;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }
}
