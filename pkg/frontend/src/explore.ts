// Explore view: aggregate bar chart with the user's own last-submission tags
// highlighted, a designation dot map (geobox centroids — reports carry no
// coordinates to plot), and a co-occurrence "given" chart.

import type { ApiClient, CatalogQuestion, SchemaResponse } from './api.js';
import { barChart, dotMap, type Bar, type MapDot } from './charts.js';
import { centroidIndex, type GeoBox } from './geo.js';
import type { Store } from './state.js';

export interface ExploreDeps {
  api: ApiClient;
  store: Store;
  geoboxes?: GeoBox[];
  cooccurrencePair?: { questionA: string; questionB: string };
  topN?: number;
}

function labelFor(schema: SchemaResponse, tagId: string): string {
  for (const survey of schema.surveys) {
    for (const question of survey.questions) {
      const tag = question.tags.find((t) => t.id === tagId);
      if (tag) return tag.label;
    }
  }
  return tagId;
}

function questionById(schema: SchemaResponse, id: string): CatalogQuestion | undefined {
  for (const survey of schema.surveys) {
    const q = survey.questions.find((question) => question.id === id);
    if (q) return q;
  }
  return undefined;
}

export async function renderExplore(root: HTMLElement, deps: ExploreDeps): Promise<void> {
  root.innerHTML = '';
  const schema = await deps.api.getSchema();
  const { counts } = await deps.api.tagCounts();

  const tagSection = document.createElement('section');
  tagSection.className = 'explore-tags';
  const h = document.createElement('h2');
  h.textContent = 'What people report';
  tagSection.append(h);

  const entries = Object.entries(counts).sort((a, b) => b[1] - a[1]);
  if (entries.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No data yet — released reports will appear here.';
    tagSection.append(empty);
    root.append(tagSection);
    return;
  }

  // highlight = intersection of the user's last submission with what is shown
  const own = deps.store.state.lastSubmittedTags;
  const bars: Bar[] = entries.slice(0, deps.topN ?? 25).map(([tagId, value]) => ({
    label: labelFor(schema, tagId),
    value,
    highlighted: own.has(tagId),
  }));
  const chart = barChart(bars);
  chart.classList.add('tag-counts');
  bars.forEach((bar, i) => {
    chart.children[i]?.setAttribute('data-tag-id', entries[i][0]);
  });
  tagSection.append(chart);
  root.append(tagSection);

  const mapSection = document.createElement('section');
  mapSection.className = 'explore-map';
  const mh = document.createElement('h2');
  mh.textContent = 'Where reports come from';
  mapSection.append(mh);
  const { rows } = await deps.api.geography();
  if (deps.geoboxes && rows.length > 0) {
    const centroids = centroidIndex(deps.geoboxes);
    const dots: MapDot[] = [];
    for (const row of rows) {
      const c = centroids.get(row.name);
      if (c) dots.push({ key: row.name, lat: c.lat, lon: c.lon, count: row.count });
    }
    mapSection.append(dotMap(dots));
  } else {
    const list = document.createElement('ol');
    list.className = 'geo-list';
    for (const row of rows) {
      const li = document.createElement('li');
      li.textContent = `${row.name}: ${row.count}`;
      list.append(li);
    }
    mapSection.append(list);
  }
  root.append(mapSection);

  if (deps.cooccurrencePair) {
    const { questionA, questionB } = deps.cooccurrencePair;
    const table = await deps.api.cooccurrence(questionA, questionB);
    const section = document.createElement('section');
    section.className = 'explore-cooccurrence';
    const ch = document.createElement('h2');
    const qa = questionById(schema, questionA);
    const qb = questionById(schema, questionB);
    ch.textContent = `${qa?.text ?? questionA} given ${qb?.text ?? questionB}`;
    const baseNote = document.createElement('p');
    baseNote.className = 'base-note';
    baseNote.dataset.base = String(table.base);
    baseNote.textContent = `${table.base} reports answered both questions.`;
    section.append(ch, baseNote);

    const bars: Bar[] = table.cells
      .slice()
      .sort((a, b) => b.count - a.count)
      .slice(0, deps.topN ?? 25)
      .map((cell) => ({
        label: `${labelFor(schema, cell.tag_a)} | ${labelFor(schema, cell.tag_b)}`,
        value: cell.count,
      }));
    const chart2 = barChart(bars);
    chart2.classList.add('cooccurrence-chart');
    section.append(chart2);
    root.append(section);
  }
}
