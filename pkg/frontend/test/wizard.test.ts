// Scripted submission sessions: drive the wizard DOM end to end with an
// intercepting fetch, then inspect exactly what would have gone on the wire.

import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { HttpGeocoderChannel } from '../src/geo.js';
import { Store } from '../src/state.js';
import { renderWizard } from '../src/wizard.js';
import {
  click,
  coordinateFindings,
  deniedGeolocation,
  flush,
  grantedGeolocation,
  scriptedServer,
  setChecked,
  TEST_KEY,
} from './helpers.js';

const GEOCODER_URL = 'https://geocoder.test/reverse';

function setup(geolocation: Geolocation) {
  const server = scriptedServer();
  const geocoderCalls: string[] = [];
  const geocoderFetch = async (url: string): Promise<Response> => {
    geocoderCalls.push(url);
    return new Response(
      JSON.stringify({ country: 'USA', province: 'Indiana', city: 'Bloomington' }),
      { status: 200 },
    );
  };
  const api = new ApiClient('', TEST_KEY, server.fetch);
  const geocoder = new HttpGeocoderChannel(GEOCODER_URL, geocoderFetch);
  const store = new Store();
  const root = document.createElement('div');
  document.body.innerHTML = '';
  document.body.append(root);
  return { server, geocoderCalls, api, geocoder, store, root, geolocation };
}

async function runWizardSession(env: ReturnType<typeof setup>): Promise<void> {
  await renderWizard(env.root, {
    api: env.api,
    geocoder: env.geocoder,
    store: env.store,
    geolocation: env.geolocation,
  });

  // step 1: pick BOTH surveys (multi-survey reporting is the headline path)
  for (const value of ['colors', 'shapes']) {
    const box = env.root.querySelector<HTMLInputElement>(`input[value="${value}"]`);
    setChecked(box!);
    await flush();
  }
  click(env.root.querySelector('button.next'));
  await flush();

  // step 2: answer questions in both surveys
  for (const tag of ['favorite-red', 'favorite-blue', 'brightness-dim', 'kind-circle']) {
    const input = env.root.querySelector<HTMLInputElement>(`input[value="${tag}"]`);
    setChecked(input!);
    await flush();
  }
  click(env.root.querySelector('button.next'));
  await flush();
}

describe('submission wizard', () => {
  let env: ReturnType<typeof setup>;

  beforeEach(() => {
    env = setup(grantedGeolocation(39.16383, -86.52639));
  });

  it('submits a two-survey report whose wire payload has no coordinates', async () => {
    await runWizardSession(env);

    // step 3: city resolution via browser location + geocoder channel
    click(env.root.querySelector('button.locate'));
    await flush();
    expect(env.root.querySelector('.location-status')!.textContent).toContain(
      'USA / Indiana / Bloomington',
    );
    click(env.root.querySelector('button.next'));
    await flush();

    // step 4: submit
    click(env.root.querySelector('button.submit'));
    await flush();
    await flush();

    const posts = env.server.requests.filter((r) => r.method === 'POST');
    expect(posts).toHaveLength(1);
    const post = posts[0];
    expect(post.url).toBe('/api/v1/reports');
    expect(post.headers['X-Auth-MAC']).toMatch(/^[0-9a-f]{64}$/);

    const body = JSON.parse(post.body!);
    expect(Object.keys(body).sort()).toEqual(['designation', 'schema_version', 'selections']);
    expect(body.selections).toEqual([
      'brightness-dim',
      'favorite-blue',
      'favorite-red',
      'kind-circle',
    ]);
    expect(body.designation).toEqual({
      country: 'USA',
      province: 'Indiana',
      city: 'Bloomington',
      resolution: 'city',
    });

    // the report channel never saw a coordinate; the geocoder channel did
    expect(coordinateFindings(body)).toEqual([]);
    expect(post.body).not.toContain('39.16');
    expect(post.body).not.toContain('-86.5');
    expect(env.geocoderCalls).toHaveLength(1);
    expect(env.geocoderCalls[0].startsWith(GEOCODER_URL)).toBe(true);

    expect(env.root.querySelector('.done')!.getAttribute('data-phase')).toBe('pending');
    expect([...env.store.state.lastSubmittedTags].sort()).toEqual(body.selections);
  });

  it('coarsens locally when a coarser resolution is chosen', async () => {
    await runWizardSession(env);
    const province = env.root.querySelector<HTMLInputElement>('input[value="province"]');
    setChecked(province!);
    await flush();
    click(env.root.querySelector('button.locate'));
    await flush();
    click(env.root.querySelector('button.next'));
    await flush();
    click(env.root.querySelector('button.submit'));
    await flush();
    await flush();

    const body = JSON.parse(env.server.requests.filter((r) => r.method === 'POST')[0].body!);
    expect(body.designation).toEqual({
      country: 'USA',
      province: 'Indiana',
      resolution: 'province',
    });
    expect(coordinateFindings(body)).toEqual([]);
  });

  it('falls back to the manual picker when geolocation is denied', async () => {
    env = setup(deniedGeolocation());
    await runWizardSession(env);

    click(env.root.querySelector('button.locate'));
    await flush();
    const manual = env.root.querySelector('.manual-picker');
    expect(manual).not.toBeNull();

    env.root.querySelector<HTMLInputElement>('input[name="country"]')!.value = 'USA';
    env.root.querySelector<HTMLInputElement>('input[name="province"]')!.value = 'Indiana';
    env.root.querySelector<HTMLInputElement>('input[name="city"]')!.value = 'Bloomington';
    click(env.root.querySelector('button.apply-manual'));
    await flush();
    click(env.root.querySelector('button.next'));
    await flush();
    click(env.root.querySelector('button.submit'));
    await flush();
    await flush();

    const posts = env.server.requests.filter((r) => r.method === 'POST');
    expect(posts).toHaveLength(1);
    const body = JSON.parse(posts[0].body!);
    expect(body.designation.city).toBe('Bloomington');
    expect(coordinateFindings(body)).toEqual([]);
    expect(env.geocoderCalls).toHaveLength(0);
  });

  it('cannot submit with zero selections', async () => {
    await renderWizard(env.root, {
      api: env.api,
      geocoder: env.geocoder,
      store: env.store,
      geolocation: env.geolocation,
    });
    setChecked(env.root.querySelector<HTMLInputElement>('input[value="colors"]')!);
    await flush();
    click(env.root.querySelector('button.next'));
    await flush();
    click(env.root.querySelector('button.next')); // skip questions without answers
    await flush();
    click(env.root.querySelector('button.locate'));
    await flush();
    click(env.root.querySelector('button.next'));
    await flush();
    const submit = env.root.querySelector<HTMLButtonElement>('button.submit');
    expect(submit!.disabled).toBe(true);
    expect(env.server.requests.filter((r) => r.method === 'POST')).toHaveLength(0);
  });

  it('renders validation violations inline', async () => {
    env.server.responses.set('/api/v1/reports', () => ({
      error: 'validation',
      violations: [{ code: 'schema-version-mismatch', message: 'catalog changed', element: 'v' }],
    }));
    const origFetch = env.server.fetch;
    const api = new ApiClient('', TEST_KEY, async (url, init) => {
      const resp = await origFetch(url, init);
      if (init?.method === 'POST') {
        return new Response(await resp.text(), { status: 400 });
      }
      return resp;
    });
    await renderWizard(env.root, {
      api,
      geocoder: env.geocoder,
      store: env.store,
      geolocation: env.geolocation,
    });
    setChecked(env.root.querySelector<HTMLInputElement>('input[value="colors"]')!);
    await flush();
    click(env.root.querySelector('button.next'));
    await flush();
    setChecked(env.root.querySelector<HTMLInputElement>('input[value="favorite-red"]')!);
    await flush();
    click(env.root.querySelector('button.next'));
    await flush();
    click(env.root.querySelector('button.locate'));
    await flush();
    click(env.root.querySelector('button.next'));
    await flush();
    click(env.root.querySelector('button.submit'));
    await flush();
    await flush();
    const error = env.root.querySelector('.error');
    expect(error!.textContent).toContain('catalog changed');
    expect(env.store.state.draft.phase).toBe('editing');
  });
});

describe('identity-free invariant', () => {
  it('uses no cookies or persistent storage during a full session', async () => {
    const env2 = setup(grantedGeolocation(39.16, -86.52));
    await runWizardSession(env2);
    click(env2.root.querySelector('button.locate'));
    await flush();
    click(env2.root.querySelector('button.next'));
    await flush();
    click(env2.root.querySelector('button.submit'));
    await flush();
    await flush();
    expect(document.cookie).toBe('');
    expect(globalThis.localStorage.length).toBe(0);
    expect(globalThis.sessionStorage.length).toBe(0);
  });
});
