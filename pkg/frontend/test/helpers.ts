// Shared test scaffolding: a small catalog, a scripted fetch that records
// every request, a scripted geolocation, and a coordinate-leak scanner
// applied to intercepted POST bodies.

import type { SchemaResponse } from '../src/api.js';

export const TEST_KEY = 'test-shared-key';

export const SCHEMA: SchemaResponse = {
  version: 'v-test',
  surveys: [
    {
      id: 'colors',
      name: 'Colors',
      questions: [
        {
          id: 'favorite',
          text: 'Favorite colors',
          multi_select: true,
          tags: [
            { id: 'favorite-red', label: 'red' },
            { id: 'favorite-green', label: 'green' },
            { id: 'favorite-blue', label: 'blue' },
          ],
        },
        {
          id: 'brightness',
          text: 'Preferred brightness',
          multi_select: false,
          tags: [
            { id: 'brightness-dim', label: 'dim' },
            { id: 'brightness-bright', label: 'bright' },
          ],
        },
      ],
    },
    {
      id: 'shapes',
      name: 'Shapes',
      questions: [
        {
          id: 'kind',
          text: 'Shapes you saw',
          multi_select: true,
          tags: [
            { id: 'kind-circle', label: 'circle' },
            { id: 'kind-square', label: 'square' },
            { id: 'kind-triangle', label: 'triangle' },
          ],
        },
      ],
    },
  ],
};

export interface RecordedRequest {
  url: string;
  method: string;
  body: string | null;
  headers: Record<string, string>;
}

export interface ScriptedServer {
  fetch: (url: string, init?: RequestInit) => Promise<Response>;
  requests: RecordedRequest[];
  responses: Map<string, () => unknown>; // path prefix -> payload factory
}

export function scriptedServer(): ScriptedServer {
  const requests: RecordedRequest[] = [];
  const responses = new Map<string, () => unknown>();
  responses.set('/api/v1/schema', () => SCHEMA);
  responses.set('/api/v1/reports', () => ({ status: 'pending' }));
  responses.set('/api/v1/aggregates/tag-counts', () => ({ counts: {} }));
  responses.set('/api/v1/aggregates/geography', () => ({ rows: [] }));

  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const headers: Record<string, string> = {};
    for (const [k, v] of Object.entries(init?.headers ?? {})) headers[k] = String(v);
    requests.push({
      url,
      method: init?.method ?? 'GET',
      body: typeof init?.body === 'string' ? init.body : null,
      headers,
    });
    const path = url.replace(/^https?:\/\/[^/]+/, '').split('?')[0];
    for (const [prefix, factory] of responses) {
      if (path === prefix) {
        return new Response(JSON.stringify(factory()), {
          status: init?.method === 'POST' ? 202 : 200,
          headers: { 'Content-Type': 'application/json' },
        });
      }
    }
    return new Response(JSON.stringify({ error: 'not-found' }), { status: 404 });
  };
  return { fetch: fetchFn, requests, responses };
}

export function grantedGeolocation(lat: number, lon: number): Geolocation {
  return {
    getCurrentPosition(success: PositionCallback) {
      success({
        coords: {
          latitude: lat,
          longitude: lon,
          accuracy: 25,
          altitude: null,
          altitudeAccuracy: null,
          heading: null,
          speed: null,
          toJSON: () => ({}),
        },
        timestamp: Date.now(),
        toJSON: () => ({}),
      } as GeolocationPosition);
    },
    watchPosition: () => 0,
    clearWatch: () => undefined,
  } as Geolocation;
}

export function deniedGeolocation(): Geolocation {
  return {
    getCurrentPosition(_success: PositionCallback, error?: PositionErrorCallback) {
      error?.({
        code: 1,
        message: 'User denied Geolocation',
        PERMISSION_DENIED: 1,
        POSITION_UNAVAILABLE: 2,
        TIMEOUT: 3,
      } as GeolocationPositionError);
    },
    watchPosition: () => 0,
    clearWatch: () => undefined,
  } as Geolocation;
}

// ---- coordinate-leak scanner over an intercepted JSON payload ----

const COORD_KEY = /lat|lon|lng|coord|position|geo/i;
const PAIR_IN_STRING = /(-?\d{1,3}\.\d+)[,;\s]+(-?\d{1,3}\.\d+)/;

function inRange(a: number, b: number): boolean {
  return a >= -90 && a <= 90 && b >= -180 && b <= 180;
}

export function coordinateFindings(doc: unknown): string[] {
  const findings: string[] = [];
  const walk = (node: unknown, path: string) => {
    if (Array.isArray(node)) {
      if (
        node.length === 2 &&
        node.every((x) => typeof x === 'number') &&
        inRange(node[0] as number, node[1] as number)
      ) {
        findings.push(`pair-array at ${path}`);
      }
      node.forEach((v, i) => walk(v, `${path}[${i}]`));
      return;
    }
    if (node !== null && typeof node === 'object') {
      const numbers: number[] = [];
      for (const [k, v] of Object.entries(node)) {
        if (COORD_KEY.test(k) && typeof v === 'number') {
          findings.push(`coord-key ${path}.${k}`);
        }
        if (typeof v === 'number') numbers.push(v);
        walk(v, `${path}.${k}`);
      }
      for (let i = 0; i + 1 < numbers.length; i += 1) {
        if (inRange(numbers[i], numbers[i + 1]) && (numbers[i] % 1 !== 0 || numbers[i + 1] % 1 !== 0)) {
          findings.push(`sibling-pair at ${path}`);
        }
      }
      return;
    }
    if (typeof node === 'string') {
      const m = PAIR_IN_STRING.exec(node);
      if (m && inRange(parseFloat(m[1]), parseFloat(m[2]))) {
        findings.push(`embedded-pair at ${path}`);
      }
    }
  };
  walk(doc, '$');
  return findings;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export function click(el: Element | null): void {
  if (!el) throw new Error('element not found');
  (el as HTMLElement).click();
}

export function setChecked(input: HTMLInputElement, value = true): void {
  input.checked = value;
  input.dispatchEvent(new Event('change', { bubbles: true }));
}
