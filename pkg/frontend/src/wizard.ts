// Guided submission flow. Four steps: choose surveys (explicitly plural —
// one report can and should cover every survey that applies), answer the
// questions, pick a location resolution and resolve it, review and send.

import type { ApiClient, CatalogSurvey, Designation, Resolution, SchemaResponse } from './api.js';
import { ApiError } from './api.js';
import {
  acquireDesignation,
  coarsen,
  GeolocationDenied,
  type FullDesignation,
  type GeocoderChannel,
} from './geo.js';
import type { Store } from './state.js';

export interface WizardDeps {
  api: ApiClient;
  geocoder: GeocoderChannel;
  store: Store;
  geolocation?: Geolocation;
  onSubmitted?: (tags: string[]) => void;
}

interface WizardCtx extends WizardDeps {
  schema: SchemaResponse;
  root: HTMLElement;
  step: number;
  manualPick: boolean;
  full: FullDesignation | null;
}

const STEP_TITLES = ['Surveys', 'Questions', 'Location', 'Review & submit'];

export async function renderWizard(root: HTMLElement, deps: WizardDeps): Promise<void> {
  const schema = await deps.api.getSchema();
  const ctx: WizardCtx = { ...deps, schema, root, step: 0, manualPick: false, full: null };
  draw(ctx);
}

function chosenSurveys(ctx: WizardCtx): CatalogSurvey[] {
  return ctx.schema.surveys.filter((s) => ctx.store.state.draft.chosenSurveys.includes(s.id));
}

function draw(ctx: WizardCtx): void {
  ctx.root.innerHTML = '';
  const nav = document.createElement('nav');
  nav.className = 'wizard-nav';
  STEP_TITLES.forEach((title, i) => {
    const button = document.createElement('button');
    button.textContent = `${i + 1}. ${title}`;
    button.disabled = i > ctx.step;
    if (i === ctx.step) button.classList.add('active');
    button.addEventListener('click', () => {
      ctx.step = i;
      draw(ctx);
    });
    nav.append(button);
  });
  const section = document.createElement('section');
  section.className = 'wizard-step';
  ctx.root.append(nav, section);

  const phase = ctx.store.state.draft.phase;
  if (phase === 'pending' || phase === 'released') {
    drawDone(ctx, section);
    return;
  }
  [drawSurveyStep, drawQuestionStep, drawLocationStep, drawReviewStep][ctx.step](ctx, section);
}

function nextButton(ctx: WizardCtx, enabled: boolean, label = 'Continue'): HTMLButtonElement {
  const button = document.createElement('button');
  button.className = 'next';
  button.textContent = label;
  button.disabled = !enabled;
  button.addEventListener('click', () => {
    ctx.step += 1;
    draw(ctx);
  });
  return button;
}

function drawSurveyStep(ctx: WizardCtx, section: HTMLElement): void {
  const intro = document.createElement('p');
  intro.className = 'hint multi-survey-hint';
  intro.textContent =
    'Pick every survey that applies — a single report can answer several surveys at once.';
  section.append(intro);

  const list = document.createElement('div');
  list.className = 'survey-list';
  for (const survey of ctx.schema.surveys) {
    const label = document.createElement('label');
    const box = document.createElement('input');
    box.type = 'checkbox';
    box.value = survey.id;
    box.checked = ctx.store.state.draft.chosenSurveys.includes(survey.id);
    box.addEventListener('change', () => {
      ctx.store.update((s) => {
        const set = new Set(s.draft.chosenSurveys);
        if (box.checked) {
          set.add(survey.id);
        } else {
          set.delete(survey.id);
          for (const q of survey.questions) s.draft.selections.delete(q.id);
        }
        s.draft.chosenSurveys = [...set];
      });
      draw(ctx);
    });
    label.append(box, document.createTextNode(` ${survey.name}`));
    list.append(label);
  }
  section.append(list, nextButton(ctx, ctx.store.state.draft.chosenSurveys.length > 0));
}

function drawQuestionStep(ctx: WizardCtx, section: HTMLElement): void {
  for (const survey of chosenSurveys(ctx)) {
    const h = document.createElement('h3');
    h.textContent = survey.name;
    section.append(h);
    for (const question of survey.questions) {
      const fieldset = document.createElement('fieldset');
      fieldset.dataset.questionId = question.id;
      const legend = document.createElement('legend');
      legend.textContent = question.text + (question.multi_select ? ' (any that apply)' : '');
      fieldset.append(legend);
      for (const tag of question.tags) {
        const label = document.createElement('label');
        const input = document.createElement('input');
        input.type = question.multi_select ? 'checkbox' : 'radio';
        input.name = question.id;
        input.value = tag.id;
        input.checked = ctx.store.state.draft.selections.get(question.id)?.has(tag.id) ?? false;
        input.addEventListener('change', () => {
          ctx.store.toggleTag(question.id, tag.id, question.multi_select);
        });
        label.append(input, document.createTextNode(` ${tag.label}`));
        fieldset.append(label);
      }
      section.append(fieldset);
    }
  }
  const count = document.createElement('p');
  count.className = 'selection-count';
  count.textContent = `${ctx.store.selectedTags().length} selected`;
  const refresh = () => {
    count.textContent = `${ctx.store.selectedTags().length} selected`;
  };
  ctx.store.subscribe(refresh);
  section.append(count, nextButton(ctx, true));
}

function drawLocationStep(ctx: WizardCtx, section: HTMLElement): void {
  const intro = document.createElement('p');
  intro.className = 'hint';
  intro.textContent =
    'Choose how precisely your report is located. Only the place names below ever leave this device for the report server.';
  section.append(intro);

  const resFieldset = document.createElement('fieldset');
  resFieldset.className = 'resolution-pick';
  for (const res of ['city', 'province', 'country'] as Resolution[]) {
    const label = document.createElement('label');
    const input = document.createElement('input');
    input.type = 'radio';
    input.name = 'resolution';
    input.value = res;
    input.checked = ctx.store.state.draft.resolution === res;
    input.addEventListener('change', () => {
      ctx.store.update((s) => {
        s.draft.resolution = res;
        if (ctx.full) s.draft.designation = coarsen(ctx.full, res);
      });
      draw(ctx);
    });
    label.append(input, document.createTextNode(` ${res}`));
    resFieldset.append(label);
  }
  section.append(resFieldset);

  const status = document.createElement('p');
  status.className = 'location-status';
  const d = ctx.store.state.draft.designation;
  status.textContent = d
    ? `Reporting from: ${[d.country, d.province, d.city].filter(Boolean).join(' / ')} (${d.resolution})`
    : 'No location set yet.';
  section.append(status);

  if (!ctx.manualPick) {
    const locate = document.createElement('button');
    locate.className = 'locate';
    locate.textContent = 'Use my location';
    locate.addEventListener('click', async () => {
      try {
        ctx.full = await acquireDesignation(ctx.geocoder, ctx.geolocation);
        ctx.store.update((s) => {
          s.draft.designation = coarsen(ctx.full!, s.draft.resolution);
          s.draft.error = null;
        });
      } catch (e) {
        if (e instanceof GeolocationDenied) {
          ctx.manualPick = true;
        } else {
          ctx.store.update((s) => {
            s.draft.error = String(e instanceof Error ? e.message : e);
          });
        }
      }
      draw(ctx);
    });
    const manual = document.createElement('button');
    manual.className = 'manual';
    manual.textContent = 'Enter location manually';
    manual.addEventListener('click', () => {
      ctx.manualPick = true;
      draw(ctx);
    });
    section.append(locate, manual);
  } else {
    drawManualPicker(ctx, section);
  }

  if (ctx.store.state.draft.error) {
    const err = document.createElement('p');
    err.className = 'error';
    err.textContent = ctx.store.state.draft.error;
    section.append(err);
  }
  section.append(nextButton(ctx, ctx.store.state.draft.designation !== null));
}

function drawManualPicker(ctx: WizardCtx, section: HTMLElement): void {
  const form = document.createElement('div');
  form.className = 'manual-picker';
  const fields: Partial<Record<'country' | 'province' | 'city', HTMLInputElement>> = {};
  const res = ctx.store.state.draft.resolution;
  const needed: Array<'country' | 'province' | 'city'> =
    res === 'country' ? ['country'] : res === 'province' ? ['country', 'province'] : ['country', 'province', 'city'];
  for (const name of needed) {
    const label = document.createElement('label');
    label.textContent = `${name}: `;
    const input = document.createElement('input');
    input.type = 'text';
    input.name = name;
    fields[name] = input;
    label.append(input);
    form.append(label);
  }
  const apply = document.createElement('button');
  apply.className = 'apply-manual';
  apply.textContent = 'Set location';
  apply.addEventListener('click', () => {
    const country = fields.country?.value.trim() ?? '';
    if (!country) {
      ctx.store.update((s) => {
        s.draft.error = 'country is required';
      });
      draw(ctx);
      return;
    }
    const designation: Designation = { country, resolution: res };
    if (res !== 'country') designation.province = fields.province?.value.trim() || undefined;
    if (res === 'city') designation.city = fields.city?.value.trim() || undefined;
    ctx.store.update((s) => {
      s.draft.designation = designation;
      s.draft.error = null;
    });
    draw(ctx);
  });
  form.append(apply);
  section.append(form);
}

function drawReviewStep(ctx: WizardCtx, section: HTMLElement): void {
  const tags = ctx.store.selectedTags();
  const d = ctx.store.state.draft.designation;
  const summary = document.createElement('p');
  summary.className = 'review-summary';
  summary.textContent =
    `${tags.length} selections across ${ctx.store.state.draft.chosenSurveys.length} survey(s), ` +
    (d ? `from ${[d.country, d.province, d.city].filter(Boolean).join(' / ')}` : 'no location');
  section.append(summary);

  if (ctx.store.state.draft.error) {
    const err = document.createElement('p');
    err.className = 'error';
    err.textContent = ctx.store.state.draft.error;
    section.append(err);
  }

  const submit = document.createElement('button');
  submit.className = 'submit';
  submit.textContent = 'Submit anonymously';
  submit.disabled = tags.length === 0 || d === null || ctx.store.state.draft.phase === 'submitting';
  submit.addEventListener('click', async () => {
    const designation = ctx.store.state.draft.designation;
    if (!designation || tags.length === 0) return;
    ctx.store.update((s) => {
      s.draft.phase = 'submitting';
      s.draft.error = null;
    });
    try {
      const result = await ctx.api.submitReport(ctx.schema.version, tags, designation);
      ctx.store.update((s) => {
        s.draft.phase = result.status;
        s.lastSubmittedTags = new Set(tags);
      });
      ctx.onSubmitted?.(tags);
    } catch (e) {
      ctx.store.update((s) => {
        s.draft.phase = 'editing';
        s.draft.error =
          e instanceof ApiError && e.violations.length
            ? e.violations.map((v) => `${v.element || v.code}: ${v.message}`).join('; ')
            : String(e instanceof Error ? e.message : e);
      });
    }
    draw(ctx);
  });
  section.append(submit);
}

function drawDone(ctx: WizardCtx, section: HTMLElement): void {
  const phase = ctx.store.state.draft.phase;
  const p = document.createElement('p');
  p.className = `done ${phase}`;
  p.textContent =
    phase === 'released'
      ? 'Your report was released immediately as part of a batch. Thank you!'
      : 'Your report is queued anonymously and will become public once enough reports from the same area accumulate.';
  p.dataset.phase = phase;
  section.append(p);
}
