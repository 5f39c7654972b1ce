/**
 * DOM controller: renders the dashboard from view state and forwards
 * user actions to the API client. Dynamic text always goes through
 * textContent; the only innerHTML assignments are markup this module
 * builds itself from numbers.
 */

import { ApiClient, ApiError } from './api.js';
import { buildChart, chartSvg } from './chart.js';
import { additionalCount, fixed2, interval2, interval4, sig4 } from './format.js';
import {
  ViewState,
  initialState,
  parseCodeIds,
  parsePattern,
  selectedAdditional,
  withDoc,
  withDraft,
  withDuplicateId,
  withError,
  withMethod,
  withProjection,
} from './state.js';
import type { ProjectionMethod, RuleStatus, SessionDoc } from './types.js';

export interface KeyValueStore {
  get(key: string): string | null;
  set(key: string, value: string): void;
  remove(key: string): void;
}

const SESSION_KEY = 'satkm.session_id';

const RULE_LABELS: Record<string, string> = {
  first_zero: 'first zero',
  'consecutive_zero(3)': '3 consecutive zeros',
  ten_plus_three: '10 interviews + 3 zeros',
};

function el<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

function ruleText(status: RuleStatus): string {
  return status.stopped ? `stopped at interview ${status.stop_seq}` : 'still running';
}

const SKELETON = `
<header class="top">
  <h1>Saturation dashboard</h1>
  <div class="session-line">
    <span data-testid="session-name"></span>
    <span data-testid="session-alpha" class="muted"></span>
  </div>
</header>
<section class="create" data-panel="create" hidden>
  <form data-form="create">
    <label>Study name <input name="name" placeholder="e.g. fatigue instrument round 1"></label>
    <button type="submit">Start session</button>
  </form>
</section>
<section class="dashboard" data-panel="dashboard" hidden>
  <div class="headline">
    <div class="badge">
      <div class="badge-label">probability not saturated</div>
      <div class="badge-value" data-testid="headline-s"></div>
      <div class="badge-ci" data-testid="headline-ci"></div>
      <div class="badge-detail muted" data-testid="headline-detail"></div>
    </div>
    <ul class="rules" data-testid="rules"></ul>
    <dl class="landmarks">
      <dt>estimate reaches zero at</dt><dd data-testid="landmark-zero"></dd>
      <dt>projected zero (estimate)</dt><dd data-testid="landmark-extrapolated"></dd>
      <dt>projected zero (upper limit)</dt><dd data-testid="landmark-upper"></dd>
    </dl>
  </div>
  <div class="chart" data-testid="chart"></div>
  <div class="crc">
    <h2>Code population</h2>
    <p data-testid="crc-summary"></p>
    <p class="warn" data-testid="crc-degraded" hidden>
      Some interviews were entered as counts only, so recapture estimates
      are degraded. Enter code ids to restore them.
    </p>
  </div>
  <div class="entry">
    <h2>Add interview</h2>
    <form data-form="entry">
      <label>Interview id <input name="interview_id" required></label>
      <label>Code ids (comma separated, empty for none new)
        <input name="code_ids" placeholder="sleep quality, mobility"></label>
      <label>or just how many were new <input name="new_codes" type="number" min="0"></label>
      <button type="submit">Append</button>
      <button type="button" data-action="undo">Undo last</button>
    </form>
  </div>
  <div class="whatif">
    <h2>What if</h2>
    <form data-form="whatif">
      <label>Hypothetical outcomes (0/1 per future interview)
        <input name="pattern" placeholder="0 0 0"></label>
      <button type="submit">Project</button>
    </form>
    <div data-testid="whatif-result" hidden>
      <p>
        projected final probability <strong data-testid="whatif-final"></strong>
        <span data-testid="whatif-ci"></span>
      </p>
      <p>
        additional interviews to finish
        (<label><input type="radio" name="method" value="extrapolation"> extrapolation</label>
        <label><input type="radio" name="method" value="rule_completion"> rule completion</label>):
        <strong data-testid="whatif-figure"></strong>
      </p>
      <p class="muted">dashed line on the chart is hypothetical</p>
    </div>
  </div>
  <div class="interviews">
    <h2>Interviews</h2>
    <table>
      <thead><tr><th>#</th><th>id</th><th>new codes</th><th>codes</th></tr></thead>
      <tbody data-testid="interview-rows"></tbody>
    </table>
  </div>
</section>
<p class="error" data-testid="error" hidden></p>
`;

export function renderDashboard(container: HTMLElement, state: ViewState): void {
  if (!container.dataset.skeleton) {
    container.innerHTML = SKELETON;
    container.dataset.skeleton = 'yes';
  }
  const createPanel = el<HTMLElement>(container, '[data-panel="create"]');
  const dashboard = el<HTMLElement>(container, '[data-panel="dashboard"]');
  const errorBox = el<HTMLElement>(container, '[data-testid="error"]');

  errorBox.hidden = state.error === null;
  errorBox.textContent = state.error ?? '';

  if (!state.doc) {
    createPanel.hidden = false;
    dashboard.hidden = true;
    return;
  }
  createPanel.hidden = true;
  dashboard.hidden = false;
  const doc = state.doc;

  el(container, '[data-testid="session-name"]').textContent = doc.name || doc.session_id;
  el(container, '[data-testid="session-alpha"]').textContent =
    `${doc.interviews.length} interviews, alpha ${sig4(doc.alpha)}`;

  const final = doc.curve ? doc.curve.points[doc.curve.points.length - 1] : null;
  el(container, '[data-testid="headline-s"]').textContent = final ? fixed2(final.S) : 'n/a';
  el(container, '[data-testid="headline-ci"]').textContent = final
    ? interval2(final.ci_low, final.ci_high)
    : 'enter the first interview';
  el(container, '[data-testid="headline-detail"]').textContent = final
    ? `S = ${sig4(final.S)}, CI ${interval4(final.ci_low, final.ci_high)}`
    : '';

  const rules = el(container, '[data-testid="rules"]');
  rules.textContent = '';
  for (const [key, status] of Object.entries(doc.stopping_rules)) {
    const item = container.ownerDocument.createElement('li');
    item.dataset.rule = key;
    item.dataset.stopped = String(status.stopped);
    item.textContent = `${RULE_LABELS[key] ?? key}: ${ruleText(status)}`;
    rules.appendChild(item);
  }

  const summary = doc.curve?.summary;
  el(container, '[data-testid="landmark-zero"]').textContent =
    summary && summary.km_zero_seq !== null ? `interview ${summary.km_zero_seq}` : 'not reached';
  el(container, '[data-testid="landmark-extrapolated"]').textContent =
    summary && summary.km_extrapolated_zero !== null
      ? `interview ${sig4(summary.km_extrapolated_zero)}`
      : 'not estimable';
  el(container, '[data-testid="landmark-upper"]').textContent =
    summary && summary.upper_ci_extrapolated_zero !== null
      ? `interview ${sig4(summary.upper_ci_extrapolated_zero)}`
      : 'not estimable';

  const chartBox = el(container, '[data-testid="chart"]');
  if (doc.curve) {
    const overlay = state.whatif.projection ? state.whatif.projection.curve : null;
    chartBox.innerHTML = chartSvg(buildChart(doc.curve, overlay));
  } else {
    chartBox.textContent = 'no data yet';
  }

  const lastCrc = doc.crc.length ? doc.crc[doc.crc.length - 1] : null;
  el(container, '[data-testid="crc-summary"]').textContent = lastCrc
    ? `estimated total codes ${sig4(lastCrc.chapman)} (Chapman), ` +
      `${sig4(lastCrc.lp)} (Lincoln-Petersen), ${sig4(lastCrc.good_turing)} (Good-Turing); ` +
      `estimated still unseen ${sig4(lastCrc.remaining_chapman)}`
    : 'needs at least two interviews';
  el<HTMLElement>(container, '[data-testid="crc-degraded"]').hidden = !doc.crc_degraded;

  const rows = el(container, '[data-testid="interview-rows"]');
  rows.textContent = '';
  for (const interview of doc.interviews) {
    const tr = container.ownerDocument.createElement('tr');
    const cells = [
      String(interview.seq),
      interview.interview_id,
      String(interview.new_codes),
      interview.mode === 'count' ? '(count only)' : interview.code_ids.join(', '),
    ];
    for (const text of cells) {
      const td = container.ownerDocument.createElement('td');
      td.textContent = text;
      tr.appendChild(td);
    }
    rows.appendChild(tr);
  }

  const whatifResult = el<HTMLElement>(container, '[data-testid="whatif-result"]');
  const projection = state.whatif.projection;
  whatifResult.hidden = projection === null;
  if (projection) {
    el(container, '[data-testid="whatif-final"]').textContent = fixed2(projection.km_final);
    el(container, '[data-testid="whatif-ci"]').textContent = interval2(
      projection.ci_low,
      projection.ci_high,
    );
    el(container, '[data-testid="whatif-figure"]').textContent = additionalCount(
      selectedAdditional(state),
    );
    const radios = container.querySelectorAll<HTMLInputElement>('input[name="method"]');
    radios.forEach((radio) => {
      radio.checked = radio.value === state.whatif.method;
    });
  }

  const patternInput = el<HTMLInputElement>(container, 'input[name="pattern"]');
  if (patternInput.value !== state.whatif.draftText) {
    patternInput.value = state.whatif.draftText;
  }
  if (state.duplicateId !== null) {
    const idInput = el<HTMLInputElement>(container, 'input[name="interview_id"]');
    idInput.value = state.duplicateId;
    idInput.focus();
  }
}

export class SessionController {
  state: ViewState = initialState();

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
    private readonly storage: KeyValueStore | null = null,
  ) {}

  private setState(state: ViewState): void {
    this.state = state;
    renderDashboard(this.container, state);
  }

  private fail(error: unknown): void {
    if (error instanceof ApiError) {
      this.setState(withError(this.state, `${error.body.code}: ${error.body.message}`));
    } else {
      this.setState(withError(this.state, String(error)));
    }
  }

  /** Recover the stored session if there is one, else show the create form. */
  async start(): Promise<void> {
    this.wire();
    const stored = this.storage?.get(SESSION_KEY) ?? null;
    if (stored) {
      try {
        this.adopt(await this.api.getSession(stored));
        return;
      } catch {
        this.storage?.remove(SESSION_KEY);
      }
    }
    this.setState(this.state);
  }

  private adopt(doc: SessionDoc): void {
    this.storage?.set(SESSION_KEY, doc.session_id);
    this.setState(withDoc(this.state, doc));
  }

  async createSession(name: string): Promise<void> {
    try {
      this.adopt(await this.api.createSession(name));
    } catch (error) {
      this.fail(error);
    }
  }

  async addInterview(interviewId: string, codesText: string, countText: string): Promise<void> {
    if (!this.state.sessionId) return;
    const entry: { interview_id: string; code_ids?: string[]; new_codes?: number } = {
      interview_id: interviewId.trim(),
    };
    if (countText.trim().length > 0) {
      entry.new_codes = Number(countText);
    } else {
      entry.code_ids = parseCodeIds(codesText);
    }
    try {
      this.adopt(await this.api.appendInterview(this.state.sessionId, entry));
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.setState(
          withDuplicateId(
            this.state,
            entry.interview_id,
            `${error.body.message}; choose a different interview id`,
          ),
        );
      } else {
        this.fail(error);
      }
    }
  }

  async undo(): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      this.adopt(await this.api.undo(this.state.sessionId));
    } catch (error) {
      this.fail(error);
    }
  }

  async runWhatif(patternText: string): Promise<void> {
    if (!this.state.sessionId) return;
    let pattern: number[];
    try {
      pattern = parsePattern(patternText);
    } catch (error) {
      this.setState(withError(withDraft(this.state, patternText), String((error as Error).message)));
      return;
    }
    try {
      const projection = await this.api.whatif(this.state.sessionId, pattern);
      this.setState(withProjection(withDraft(this.state, patternText), projection));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Pure state switch: no request leaves the page. */
  setMethod(method: ProjectionMethod): void {
    this.setState(withMethod(this.state, method));
  }

  private wire(): void {
    renderDashboard(this.container, this.state);
    const createForm = el<HTMLFormElement>(this.container, '[data-form="create"]');
    createForm.addEventListener('submit', (event) => {
      event.preventDefault();
      const name = el<HTMLInputElement>(createForm, 'input[name="name"]').value;
      void this.createSession(name);
    });
    const entryForm = el<HTMLFormElement>(this.container, '[data-form="entry"]');
    entryForm.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.addInterview(
        el<HTMLInputElement>(entryForm, 'input[name="interview_id"]').value,
        el<HTMLInputElement>(entryForm, 'input[name="code_ids"]').value,
        el<HTMLInputElement>(entryForm, 'input[name="new_codes"]').value,
      );
      entryForm.reset();
    });
    el<HTMLButtonElement>(entryForm, '[data-action="undo"]').addEventListener('click', () => {
      void this.undo();
    });
    const whatifForm = el<HTMLFormElement>(this.container, '[data-form="whatif"]');
    whatifForm.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.runWhatif(el<HTMLInputElement>(whatifForm, 'input[name="pattern"]').value);
    });
    this.container.addEventListener('change', (event) => {
      const target = event.target as HTMLInputElement;
      if (target.name === 'method') {
        this.setMethod(target.value as ProjectionMethod);
      }
    });
  }
}
