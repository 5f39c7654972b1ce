import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';
import { fixed2, interval2 } from '../src/format.js';
import type { SessionDoc } from '../src/types.js';
import { Exchange, ScriptedFetch, walkthrough } from './replay.js';

let scripted: ScriptedFetch;
let client: ApiClient;

beforeEach(() => {
  scripted = new ScriptedFetch(walkthrough);
  client = new ApiClient('', scripted.fetch);
});

function appendBodies(sessionId: string): Exchange[] {
  return walkthrough.filter(
    (e) => e.method === 'POST' && e.path === `/api/sessions/${sessionId}/interviews` && e.status === 200,
  );
}

describe('front-loaded walkthrough', () => {
  it('shows 0.50 with interval (0.27, 0.93) after the tenth interview', async () => {
    const created = await client.createSession('front-loaded demo', 0.05);
    expect(created.interviews).toHaveLength(0);
    expect(created.curve).toBeNull();

    let doc: SessionDoc = created;
    for (const exchange of appendBodies(created.session_id)) {
      doc = await client.appendInterview(created.session_id, {
        interview_id: exchange.body!.interview_id as string,
        code_ids: exchange.body!.code_ids as string[],
      });
    }
    expect(doc.interviews).toHaveLength(10);
    expect(doc.new_codes).toEqual([4, 3, 1, 2, 1, 0, 0, 0, 0, 0]);

    const final = doc.curve!.points[doc.curve!.points.length - 1];
    expect(fixed2(final.S)).toBe('0.50');
    expect(interval2(final.ci_low, final.ci_high)).toBe('(0.27, 0.93)');

    expect(doc.stopping_rules['first_zero']).toEqual({ stopped: true, stop_seq: 6 });
    expect(doc.stopping_rules['consecutive_zero(3)']).toEqual({ stopped: true, stop_seq: 8 });
    expect(doc.stopping_rules['ten_plus_three']).toEqual({ stopped: true, stop_seq: 10 });
  });

  it('projects the empty pattern onto the realized curve unchanged', async () => {
    const created = await client.createSession('front-loaded demo', 0.05);
    for (const exchange of appendBodies(created.session_id)) {
      await client.appendInterview(created.session_id, exchange.body as never);
    }
    const doc = await client.getSession(created.session_id);
    const projection = await client.whatif(created.session_id, []);
    expect(projection.curve).toEqual(doc.curve);
    expect(projection.hypothetical_interviews).toBe(0);
  });

  it('surfaces API errors with their code and message', async () => {
    const created = await client.createSession('front-loaded demo', 0.05);
    for (const exchange of appendBodies(created.session_id)) {
      await client.appendInterview(created.session_id, exchange.body as never);
    }

    const duplicate = client.appendInterview(created.session_id, {
      interview_id: 'INT-10',
      code_ids: ['anything'],
    });
    await expect(duplicate).rejects.toMatchObject({ status: 409, body: { code: 'conflict' } });

    const badPattern = client.whatif(created.session_id, [2]);
    await expect(badPattern).rejects.toMatchObject({
      status: 422,
      body: { code: 'validation_error' },
    });

    const missing = client.getSession('missing');
    await expect(missing).rejects.toMatchObject({ status: 404, body: { code: 'not_found' } });
    await expect(missing).rejects.toBeInstanceOf(ApiError);
  });

  it('undo removes exactly the last interview', async () => {
    const created = await client.createSession('front-loaded demo', 0.05);
    for (const exchange of appendBodies(created.session_id)) {
      await client.appendInterview(created.session_id, exchange.body as never);
    }
    const doc = await client.undo(created.session_id);
    expect(doc.interviews).toHaveLength(9);
    expect(doc.interviews[doc.interviews.length - 1].interview_id).toBe('INT-09');
  });
});

describe('projection walkthrough', () => {
  it('five events plus five hypothetical zeros projects to 0.50', async () => {
    const created = await client.createSession('projection demo', 0.05);
    for (const exchange of appendBodies(created.session_id)) {
      await client.appendInterview(created.session_id, exchange.body as never);
    }
    const projection = await client.whatif(created.session_id, [0, 0, 0, 0, 0]);
    expect(projection.realized_interviews).toBe(5);
    expect(projection.hypothetical_interviews).toBe(5);
    expect(projection.pattern).toEqual([1, 1, 1, 1, 1, 0, 0, 0, 0, 0]);
    expect(fixed2(projection.km_final)).toBe('0.50');
    expect(projection.curve.points).toHaveLength(10);
  });
});

describe('fixture coverage', () => {
  it('the full walkthrough consumes every recorded exchange', async () => {
    const first = await client.createSession('front-loaded demo', 0.05);
    for (const exchange of appendBodies(first.session_id)) {
      await client.appendInterview(first.session_id, exchange.body as never);
    }
    await client.getSession(first.session_id);
    await client.whatif(first.session_id, []);
    await client.whatif(first.session_id, [0, 0]);
    await client
      .appendInterview(first.session_id, { interview_id: 'INT-10', code_ids: ['anything'] })
      .catch(() => undefined);
    await client.whatif(first.session_id, [2]).catch(() => undefined);
    await client.getSession('missing').catch(() => undefined);
    await client.undo(first.session_id);

    const second = await client.createSession('projection demo', 0.05);
    for (const exchange of appendBodies(second.session_id)) {
      await client.appendInterview(second.session_id, exchange.body as never);
    }
    await client.whatif(second.session_id, [0, 0, 0, 0, 0]);

    expect(scripted.consumedCount).toBe(walkthrough.length);
    expect(scripted.requestCount).toBe(walkthrough.length);
  });
});
