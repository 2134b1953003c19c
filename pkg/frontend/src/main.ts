// Entry point: two tabs over one in-memory store. Deployment injects the
// service URL, the provisioned submission key, geocoder URL, and optionally
// the geobox table for map centroids via globals on window.

import { ApiClient } from './api.js';
import { renderExplore } from './explore.js';
import { HttpGeocoderChannel, type GeoBox } from './geo.js';
import { Store } from './state.js';
import { renderWizard } from './wizard.js';

declare global {
  interface Window {
    GEOQUORUM_URL?: string;
    GEOQUORUM_KEY?: string;
    GEOQUORUM_GEOCODER_URL?: string;
    GEOQUORUM_GEOBOXES?: GeoBox[];
  }
}

export function mountApp(root: HTMLElement): void {
  const baseUrl = window.GEOQUORUM_URL ?? '';
  const key = window.GEOQUORUM_KEY ?? 'dev-shared-key';
  const api = new ApiClient(baseUrl, key);
  const geocoder = new HttpGeocoderChannel(
    window.GEOQUORUM_GEOCODER_URL ?? 'https://geocoder.example/reverse',
  );
  const store = new Store();

  root.innerHTML = '';
  const tabs = document.createElement('nav');
  tabs.className = 'tabs';
  const content = document.createElement('main');
  root.append(tabs, content);

  const views: Record<string, () => void> = {
    Submit: () => {
      void renderWizard(content, { api, geocoder, store });
    },
    Explore: () => {
      void renderExplore(content, {
        api,
        store,
        geoboxes: window.GEOQUORUM_GEOBOXES,
        cooccurrencePair: { questionA: 'sa-activity', questionB: 'sa-relationship' },
      });
    },
  };
  for (const name of Object.keys(views)) {
    const button = document.createElement('button');
    button.textContent = name;
    button.addEventListener('click', () => {
      content.innerHTML = '';
      views[name]();
    });
    tabs.append(button);
  }
  views.Submit();
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  mountApp(document.getElementById('app')!);
}
