/**
 * Client for the qiupsim HTTP service.
 *
 * Grids arrive as base64-encoded little-endian float32 with the dimensions
 * in a header object; every displayed number originates from a service
 * response, never from client-side physics.
 */

export interface GridHeader {
  width: number;
  height: number;
  dtype: string;
  data: string;
  pitch_um?: number;
  step_inv_m?: number;
}

export interface Grid {
  width: number;
  height: number;
  pitchUm: number;
  values: Float32Array;
}

export interface VisibilityResponse {
  grid: Grid;
  summary: { min: number; max: number; magnification: number };
}

export interface ResolutionPoint {
  waist_um: number;
  d_limit_um?: number;
  deconvolved?: boolean;
  samples?: [number, number][];
  error?: string;
}

export interface ResolutionResponse {
  points: ResolutionPoint[];
  csv: string;
}

export interface KernelResponse {
  grid: Grid;
  sumTimesArea: number;
  extentInvM: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: unknown,
  ) {
    super(`service returned ${status}: ${JSON.stringify(payload)}`);
  }
}

function base64ToBytes(b64: string): Uint8Array {
  if (typeof atob === "function") {
    const bin = atob(b64);
    const out = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
    return out;
  }
  return new Uint8Array(Buffer.from(b64, "base64"));
}

export function decodeGrid(header: GridHeader): Grid {
  if (header.dtype !== "float32-le") {
    throw new Error(`unsupported grid dtype ${header.dtype}`);
  }
  const bytes = base64ToBytes(header.data);
  if (bytes.byteLength !== header.width * header.height * 4) {
    throw new Error(
      `grid payload is ${bytes.byteLength} bytes, expected ${header.width * header.height * 4}`,
    );
  }
  // the wire format is little-endian; so are all the platforms we target,
  // but go through a DataView to stay correct everywhere
  const values = new Float32Array(header.width * header.height);
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  for (let i = 0; i < values.length; i++) values[i] = view.getFloat32(i * 4, true);
  const pitchUm = header.pitch_um ?? header.step_inv_m ?? 0;
  return { width: header.width, height: header.height, pitchUm, values };
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post(path: string, body: unknown, signal?: AbortSignal): Promise<any> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    const payload = await resp.json();
    if (!resp.ok) throw new ApiError(resp.status, payload);
    return payload;
  }

  async visibility(body: unknown, signal?: AbortSignal): Promise<VisibilityResponse> {
    const payload = await this.post("/v1/visibility", body, signal);
    return { grid: decodeGrid(payload.grid), summary: payload.summary };
  }

  async resolution(body: unknown, signal?: AbortSignal): Promise<ResolutionResponse> {
    return this.post("/v1/resolution", body, signal);
  }

  async kernel(setup: string, waistUm?: number): Promise<KernelResponse> {
    const params = new URLSearchParams({ setup });
    if (waistUm !== undefined) params.set("waist", String(waistUm));
    const resp = await this.fetchFn(`${this.baseUrl}/v1/kernel?${params}`);
    const payload = await resp.json();
    if (!resp.ok) throw new ApiError(resp.status, payload);
    return {
      grid: decodeGrid(payload.grid),
      sumTimesArea: payload.sum_times_area,
      extentInvM: payload.extent_inv_m,
    };
  }
}
